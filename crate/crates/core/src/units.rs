//! Canonical units and conversions.
//!
//! Internally everything runs in km, hr, MPa and km³. Well fluxes enter and
//! leave the crate in m³/month, seismicity densities in events/(km³·year).

/// Hours in one month (365.25 days / 12).
pub const HOURS_PER_MONTH: f64 = 730.5;

/// Hours in one Julian year.
pub const HOURS_PER_YEAR: f64 = 12.0 * HOURS_PER_MONTH;

const M3_PER_KM3: f64 = 1e9;

/// m³/month → km³/hr.
#[inline]
pub fn m3_per_month_to_km3_per_hr(q: f64) -> f64 {
    q / (M3_PER_KM3 * HOURS_PER_MONTH)
}

/// km³/hr → m³/month.
#[inline]
pub fn km3_per_hr_to_m3_per_month(q: f64) -> f64 {
    q * (M3_PER_KM3 * HOURS_PER_MONTH)
}

/// events/year → events/hr (works for densities too).
#[inline]
pub fn per_year_to_per_hr(r: f64) -> f64 {
    r / HOURS_PER_YEAR
}

/// events/hr → events/year.
#[inline]
pub fn per_hr_to_per_year(r: f64) -> f64 {
    r * HOURS_PER_YEAR
}

#[inline]
pub fn months_to_hours(m: f64) -> f64 {
    m * HOURS_PER_MONTH
}

#[inline]
pub fn hours_to_months(h: f64) -> f64 {
    h / HOURS_PER_MONTH
}

/// Physical unit attached to a [`ScalarField`](crate::grid::ScalarField).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Unit {
    /// Pore-pressure change.
    MPa,
    /// Pore-pressure rate.
    MPaPerHr,
    /// Volumetric source rate, km³/(km³·hr).
    PerHr,
    /// Seismicity-rate density, events/(km³·year).
    EventsPerKm3Year,
    /// Seismicity-rate density, events/(km³·hr).
    EventsPerKm3Hr,
    /// Coupling coefficient γ₁.
    PerMPa,
    /// Normalized quantities and the spatial density d(x) (per km³).
    Dimensionless,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn month_is_a_twelfth_of_a_julian_year() {
        assert_eq!(HOURS_PER_MONTH * 12.0, 365.25 * 24.0);
    }

    #[test]
    fn flux_conversion_factor() {
        let q = m3_per_month_to_km3_per_hr(-1e6);
        assert!((q - (-1e6 * 1e-9 / 730.5)).abs() <= 1e-15 * q.abs());
    }

    proptest! {
        #[test]
        fn flux_round_trip(q in -1e9f64..1e9) {
            let back = km3_per_hr_to_m3_per_month(m3_per_month_to_km3_per_hr(q));
            prop_assert!((back - q).abs() <= 1e-15 * q.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn rate_round_trip(r in 0.0f64..1e6) {
            let back = per_hr_to_per_year(per_year_to_per_hr(r));
            prop_assert!((back - r).abs() <= 1e-15 * r.max(f64::MIN_POSITIVE));
        }
    }
}
