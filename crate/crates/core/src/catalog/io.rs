//! Catalog files.
//!
//! Comment lines start with `#` and carry `key = value` metadata. The first
//! non-comment line is the column header:
//!
//! ```text
//! # seed = 7
//! # gr_b = 0.97
//! time_iso,t_hr,x_km,y_km,magnitude,cell
//! 1992-01-14T03:25:12.345,9210.42,12.3,18.9,1.42,611
//! ```
//!
//! Readers need `x_km`, `y_km`, `magnitude` and one of `t_hr` or `time_iso`;
//! `cell` is optional.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Catalog, GRParams, SeismicEvent};
use crate::calendar::{iso_time, parse_iso_time};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogHeader {
    pub seed: Option<u64>,
    pub run: Option<u64>,
    pub gr: Option<GRParams>,
    pub grid_hash: Option<String>,
}

pub fn write_catalog<W: Write>(mut w: W, catalog: &Catalog, header: &CatalogHeader) -> std::io::Result<()> {
    if let Some(s) = header.seed {
        writeln!(w, "# seed = {s}")?;
    }
    if let Some(r) = header.run {
        writeln!(w, "# run = {r}")?;
    }
    if let Some(gr) = &header.gr {
        writeln!(w, "# gr_a = {}", gr.a)?;
        writeln!(w, "# gr_b = {}", gr.b)?;
        writeln!(w, "# gr_m_c = {}", gr.m_c)?;
        writeln!(w, "# gr_m_max = {}", gr.m_max)?;
    }
    if let Some(h) = &header.grid_hash {
        writeln!(w, "# grid_hash = {h}")?;
    }
    writeln!(w, "time_iso,t_hr,x_km,y_km,magnitude,cell")?;
    for e in &catalog.events {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            iso_time(e.t),
            e.t,
            e.x,
            e.y,
            e.magnitude,
            e.cell
        )?;
    }
    Ok(())
}

pub fn read_catalog(path: &Path) -> Result<(CatalogHeader, Catalog)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut header = CatalogHeader::default();
    let mut gr = GRParams::default();
    let mut gr_seen = false;
    let mut columns: Option<Vec<String>> = None;
    let mut events = Vec::new();
    let bad = |line: usize, msg: String| Error::parse(path, format!("line {line}: {msg}"));

    for (ln, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let ln = ln + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(meta) = text.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                let (k, v) = (k.trim(), v.trim());
                let num = || v.parse::<f64>().map_err(|_| bad(ln, format!("bad value for {k}")));
                match k {
                    "seed" => header.seed = Some(v.parse().map_err(|_| bad(ln, "bad seed".into()))?),
                    "run" => header.run = Some(v.parse().map_err(|_| bad(ln, "bad run".into()))?),
                    "gr_a" => (gr.a, gr_seen) = (num()?, true),
                    "gr_b" => (gr.b, gr_seen) = (num()?, true),
                    "gr_m_c" => (gr.m_c, gr_seen) = (num()?, true),
                    "gr_m_max" => (gr.m_max, gr_seen) = (num()?, true),
                    "grid_hash" => header.grid_hash = Some(v.to_string()),
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        let Some(cols) = &columns else {
            columns = Some(fields.iter().map(|s| s.to_string()).collect());
            continue;
        };
        if fields.len() != cols.len() {
            return Err(bad(
                ln,
                format!("expected {} fields, found {}", cols.len(), fields.len()),
            ));
        }
        let get = |name: &str| cols.iter().position(|c| c == name).map(|i| fields[i]);
        let num = |name: &str| -> Result<f64> {
            let s = get(name).ok_or_else(|| bad(ln, format!("missing column {name}")))?;
            s.parse().map_err(|_| bad(ln, format!("bad number {s:?} in {name}")))
        };
        let t = match get("t_hr") {
            Some(s) => s.parse().map_err(|_| bad(ln, format!("bad t_hr {s:?}")))?,
            None => {
                let s = get("time_iso").ok_or_else(|| bad(ln, "no time column".into()))?;
                parse_iso_time(s).map_err(|e| bad(ln, e.to_string()))?
            }
        };
        let cell = match get("cell") {
            Some(s) => s.parse().map_err(|_| bad(ln, format!("bad cell {s:?}")))?,
            None => usize::MAX,
        };
        events.push(SeismicEvent {
            t,
            x: num("x_km")?,
            y: num("y_km")?,
            cell,
            magnitude: num("magnitude")?,
        });
    }
    if gr_seen {
        header.gr = Some(gr);
    }
    let mut catalog = Catalog { events };
    catalog.sort();
    Ok((header, catalog))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let cat = Catalog {
            events: vec![
                SeismicEvent {
                    t: 9210.123456789,
                    x: 1.0 / 3.0,
                    y: 2.5,
                    cell: 4,
                    magnitude: 1.234567891234,
                },
                SeismicEvent {
                    t: 10000.0,
                    x: 0.1,
                    y: 0.2,
                    cell: 7,
                    magnitude: 3.6,
                },
            ],
        };
        let header = CatalogHeader {
            seed: Some(7),
            run: Some(2),
            gr: Some(GRParams::default()),
            grid_hash: Some("00ff".into()),
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_catalog(std::fs::File::create(&p).unwrap(), &cat, &header).unwrap();
        let (h, c) = read_catalog(&p).unwrap();
        assert_eq!(h, header);
        assert_eq!(c, cat);
    }

    #[test]
    fn iso_only_files_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        std::fs::write(&p, "time_iso,x_km,y_km,magnitude\n1965-10-02T12:30:00.000,1,2,1.5\n").unwrap();
        let (_, c) = read_catalog(&p).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c.events[0].t - 36.5).abs() < 1e-9);
    }

    #[test]
    fn malformed_rows_are_reported_with_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        std::fs::write(&p, "t_hr,x_km,y_km,magnitude\n1,2,3\n").unwrap();
        let e = read_catalog(&p).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
    }
}
