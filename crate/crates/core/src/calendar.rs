//! Simulation clock.
//!
//! t = 0 hr is 1965-10-01T00:00:00. Months are uniform, 730.5 hr each, so
//! month m starts at m·730.5 hr; month labels (YYYY-MM) count calendar
//! months from the epoch month.

use chrono::{Duration, NaiveDate, NaiveDateTime};

use crate::error::{Error, Result};
use crate::units::HOURS_PER_MONTH;

pub const EPOCH_YEAR: i32 = 1965;
pub const EPOCH_MONTH: u32 = 10;

pub fn epoch() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(EPOCH_YEAR, EPOCH_MONTH, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid epoch")
}

/// Month index of a (year, month) pair; negative before the epoch.
pub fn month_index(year: i32, month: u32) -> i64 {
    (year as i64 - EPOCH_YEAR as i64) * 12 + month as i64 - EPOCH_MONTH as i64
}

/// (year, month) of a month index.
pub fn year_month(index: i64) -> (i32, u32) {
    let total = EPOCH_YEAR as i64 * 12 + (EPOCH_MONTH as i64 - 1) + index;
    (total.div_euclid(12) as i32, (total.rem_euclid(12) + 1) as u32)
}

pub fn month_label(index: i64) -> String {
    let (y, m) = year_month(index);
    format!("{y:04}-{m:02}")
}

/// Parse `YYYY-MM` into a month index.
pub fn parse_month(s: &str) -> Result<i64> {
    let s = s.trim();
    let (y, m) = s
        .split_once('-')
        .ok_or_else(|| Error::config(format!("expected YYYY-MM, got {s:?}")))?;
    let y: i32 = y.parse().map_err(|_| Error::config(format!("bad year in {s:?}")))?;
    let m: u32 = m.parse().map_err(|_| Error::config(format!("bad month in {s:?}")))?;
    if !(1..=12).contains(&m) {
        return Err(Error::config(format!("month out of range in {s:?}")));
    }
    Ok(month_index(y, m))
}

pub fn month_start_hours(index: i64) -> f64 {
    index as f64 * HOURS_PER_MONTH
}

/// ISO-8601 timestamp with millisecond fraction for `t_hr` after the epoch.
pub fn iso_time(t_hr: f64) -> String {
    let ms = (t_hr * 3.6e6).round() as i64;
    (epoch() + Duration::milliseconds(ms))
        .format("%Y-%m-%dT%H:%M:%S%.3f")
        .to_string()
}

/// Hours after the epoch of an ISO-8601 timestamp.
pub fn parse_iso_time(s: &str) -> Result<f64> {
    let dt = NaiveDateTime::parse_from_str(s.trim(), "%Y-%m-%dT%H:%M:%S%.f")
        .map_err(|e| Error::config(format!("bad timestamp {s:?}: {e}")))?;
    let d = dt - epoch();
    Ok(d.num_milliseconds() as f64 / 3.6e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn month_arithmetic() {
        assert_eq!(month_index(1965, 10), 0);
        assert_eq!(month_index(1991, 12), 314);
        assert_eq!(month_index(2023, 1), 687);
        assert_eq!(month_label(314), "1991-12");
        assert_eq!(month_label(-1), "1965-09");
        assert_eq!(parse_month("2023-01").unwrap(), 687);
        assert!(parse_month("2023-13").is_err());
        assert!(parse_month("202301").is_err());
    }

    #[test]
    fn iso_round_trip() {
        assert_eq!(iso_time(0.0), "1965-10-01T00:00:00.000");
        assert_eq!(iso_time(36.5), "1965-10-02T12:30:00.000");
        let t = 123456.789;
        assert!((parse_iso_time(&iso_time(t)).unwrap() - t).abs() < 1e-6);
    }
}
