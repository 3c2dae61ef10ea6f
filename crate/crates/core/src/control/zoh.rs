//! Zero-order hold of sampled commands.

/// Sampling instants t0 + k·period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSchedule {
    pub t0: f64,
    pub period: f64,
}

impl SampleSchedule {
    /// Index of the most recent instant at or before `t` (left-closed
    /// intervals); `None` before t0. Times within 1e-9 relative of an
    /// instant count as that instant.
    pub fn index_at(&self, t: f64) -> Option<u64> {
        let x = (t - self.t0) / self.period;
        let k = x.round();
        let x = if (x - k).abs() <= 1e-9 * k.abs().max(1.0) {
            k
        } else {
            x.floor()
        };
        (x >= 0.0).then_some(x as u64)
    }

    pub fn instant(&self, k: u64) -> f64 {
        self.t0 + k as f64 * self.period
    }
}

/// History of held commands.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZeroOrderHold {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl ZeroOrderHold {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record the command computed at sampling instant `t_k`; instants must
    /// increase.
    pub fn push(&mut self, t_k: f64, q: Vec<f64>) {
        debug_assert!(self.times.last().is_none_or(|&t| t < t_k));
        self.times.push(t_k);
        self.values.push(q);
    }

    /// Command in force at `t`: the one from the latest instant ≤ t.
    pub fn value_at(&self, t: f64) -> Option<&[f64]> {
        let k = self.times.partition_point(|&tk| tk <= t);
        (k > 0).then(|| self.values[k - 1].as_slice())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Applied flux at `t` given a schedule and the commands computed at each
/// of its instants (`held[k]` belongs to instant k).
pub fn zoh_hold<'a>(held: &'a [Vec<f64>], t: f64, schedule: &SampleSchedule) -> Option<&'a [f64]> {
    let k = schedule.index_at(t)? as usize;
    held.get(k.min(held.len().checked_sub(1)?)).map(|v| v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn left_closed_hold() {
        let s = SampleSchedule {
            t0: 100.0,
            period: 730.5,
        };
        let held = vec![vec![1.0], vec![2.0], vec![3.0]];
        assert_eq!(zoh_hold(&held, 99.0, &s), None);
        assert_eq!(zoh_hold(&held, 100.0, &s), Some(&[1.0][..]));
        assert_eq!(zoh_hold(&held, 830.4, &s), Some(&[1.0][..]));
        assert_eq!(zoh_hold(&held, 830.5, &s), Some(&[2.0][..]));
        let mut z = ZeroOrderHold::new();
        z.push(100.0, vec![1.0]);
        z.push(830.5, vec![2.0]);
        assert_eq!(z.value_at(830.5), Some(&[2.0][..]));
        assert_eq!(z.value_at(830.4999), Some(&[1.0][..]));
    }

    #[test]
    fn substeps_inside_a_month_see_one_command() {
        // a year of 0.1-month substeps against monthly updates
        let s = SampleSchedule { t0: 0.0, period: 730.5 };
        let held: Vec<Vec<f64>> = (0..12).map(|k| vec![k as f64]).collect();
        for step in 0..120u64 {
            let t = step as f64 * 73.05;
            let q = zoh_hold(&held, t, &s).unwrap()[0];
            assert_eq!(q, (step / 10) as f64, "substep {step}");
        }
    }
}
