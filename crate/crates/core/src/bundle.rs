//! Result bundles: one directory per run holding the catalog, the time
//! series, the controller log and a manifest with content hashes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::calendar::iso_time;
use crate::catalog::{write_catalog, CatalogHeader};
use crate::error::{Error, Result};
use crate::scenario::{DatasetSource, EnsembleStats, ScenarioConfig, SimulationResult};

pub const CATALOG_FILE: &str = "catalog.csv";
pub const SERIES_FILE: &str = "timeseries.csv";
pub const CONTROL_FILE: &str = "controller_log.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub mode: String,
    pub seed: u64,
    pub run: u64,
    /// The full configuration as TOML.
    pub config: String,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hashes of the files a config reads. The synthetic generator has none.
pub fn input_hashes(cfg: &ScenarioConfig) -> Result<Vec<FileHash>> {
    match &cfg.dataset {
        DatasetSource::Synthetic { .. } => Ok(Vec::new()),
        DatasetSource::Files {
            wells,
            extraction,
            density,
            ..
        } => [wells, extraction, density]
            .into_iter()
            .map(|p| {
                Ok(FileHash {
                    path: p.display().to_string(),
                    sha256: sha256_file(p)?,
                })
            })
            .collect(),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::parse(path, format!("{other:?}")),
    }
}

pub fn write_series(path: &Path, r: &SimulationResult) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut head: Vec<String> = [
        "time_iso",
        "t_hr",
        "lambda_per_hr",
        "mean_r_per_km3_yr",
        "cum_events",
        "expected_cum_events",
        "q_total_m3_per_month",
        "demand_m3_per_month",
        "extracted_m3",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    head.extend(r.well_ids.iter().map(|id| format!("q_{id}_m3_per_month")));
    w.write_record(&head).map_err(|e| csv_error(path, e))?;
    let s = &r.series;
    for k in 0..s.len() {
        let mut row = vec![
            iso_time(s.t[k]),
            s.t[k].to_string(),
            s.lambda[k].to_string(),
            s.mean_r[k].to_string(),
            s.cum_events[k].to_string(),
            s.expected_cum[k].to_string(),
            s.total_flux(k).to_string(),
            s.demand[k].to_string(),
            s.extracted_cum[k].to_string(),
        ];
        row.extend(s.q_applied[k].iter().map(|q| q.to_string()));
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_control_log(path: &Path, r: &SimulationResult) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut head: Vec<String> = [
        "time_iso",
        "t_hr",
        "n_events",
        "y_hat_per_km3_hr",
        "y_r_per_km3_hr",
        "sigma",
        "nu",
        "rho",
        "target_m3_per_month",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    head.extend(r.well_ids.iter().map(|id| format!("qc_{id}_m3_per_month")));
    head.extend(r.well_ids.iter().map(|id| format!("q_{id}_m3_per_month")));
    w.write_record(&head).map_err(|e| csv_error(path, e))?;
    for c in &r.control_log {
        let mut row = vec![
            iso_time(c.t),
            c.t.to_string(),
            c.n_events.to_string(),
            c.y_hat.to_string(),
            c.y_r.to_string(),
            c.sigma.to_string(),
            c.nu.to_string(),
            c.rho.to_string(),
            c.target.map(|v| v.to_string()).unwrap_or_default(),
        ];
        row.extend(c.q_c.iter().map(|q| q.to_string()));
        row.extend(c.q_applied.iter().map(|q| q.to_string()));
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write the bundle of one run into `dir` (created if missing).
pub fn write_bundle(dir: &Path, cfg: &ScenarioConfig, r: &SimulationResult, grid_hash: &str) -> Result<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let header = CatalogHeader {
        seed: Some(r.seed),
        run: Some(r.run),
        gr: Some(cfg.catalog),
        grid_hash: Some(grid_hash.to_string()),
    };
    let cat_path = dir.join(CATALOG_FILE);
    let mut w = create(&cat_path)?;
    write_catalog(&mut w, &r.catalog, &header)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&cat_path, e))?;
    write_series(&dir.join(SERIES_FILE), r)?;
    let mut names = vec![CATALOG_FILE, SERIES_FILE];
    if !r.control_log.is_empty() {
        write_control_log(&dir.join(CONTROL_FILE), r)?;
        names.push(CONTROL_FILE);
    }
    let outputs = names
        .into_iter()
        .map(|n| {
            Ok(FileHash {
                path: n.to_string(),
                sha256: sha256_file(&dir.join(n))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode: r.mode.as_str().to_string(),
        seed: r.seed,
        run: r.run,
        config: cfg.to_toml(),
        inputs: input_hashes(cfg)?,
        outputs,
    };
    let m_path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::parse(&m_path, e.to_string()))?;
    std::fs::write(&m_path, text + "\n").map_err(|e| Error::io(&m_path, e))?;
    Ok(manifest)
}

/// Check every output listed in a bundle's manifest against its hash.
/// Returns the files whose content differs.
pub fn verify_bundle(dir: &Path) -> Result<Vec<PathBuf>> {
    let m_path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&m_path).map_err(|e| Error::io(&m_path, e))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| Error::parse(&m_path, e.to_string()))?;
    let mut bad = Vec::new();
    for f in &manifest.outputs {
        let p = dir.join(&f.path);
        if sha256_file(&p)? != f.sha256 {
            bad.push(p);
        }
    }
    Ok(bad)
}

/// Ensemble table: mean and std of the cumulative count per month end.
pub fn write_ensemble(path: &Path, stats: &EnsembleStats, steps_per_month: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "time_iso",
        "t_hr",
        "mean_cum_events",
        "std_cum_events",
        "expected_cum_events",
    ])
    .map_err(|e| csv_error(path, e))?;
    for k in (steps_per_month.max(1) - 1..stats.t.len()).step_by(steps_per_month.max(1)) {
        w.write_record([
            iso_time(stats.t[k]),
            stats.t[k].to_string(),
            stats.mean[k].to_string(),
            stats.std[k].to_string(),
            stats.expected[k].to_string(),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
