//! Per-trial survival bookkeeping: the eaten-fraction series and the
//! average living time.
//!
//! The eaten fraction accumulates the per-step kill counts against the
//! initial school size. Tracking the cumulative count as an integer and
//! dividing once per step keeps the recursion exact: the value at step t
//! is bit-identical to the closed form `(N - survivors(t)) / N`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Snapshot of the school observables at one recorded step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub step: usize,
    pub diameter: f64,
    pub velocity_std: f64,
    pub n_groups: usize,
}

/// Full agent snapshot at one recorded step. Dead prey keep their frozen
/// coordinates and are marked by the `alive` flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub step: usize,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub alive: Vec<bool>,
    pub pred_position: Vec<f64>,
    pub pred_velocity: Vec<f64>,
}

/// Everything one pursuit produced.
///
/// `n_survived` always has `t_max + 1` entries (step 0 included); a run
/// that ends early because the school was wiped out is padded with
/// zeros. `eaten_times` maps prey index to the step it was caught.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n_initial: usize,
    pub t_max: usize,
    pub dims: usize,
    pub record_every: usize,
    pub n_survived: Vec<usize>,
    pub eaten_times: BTreeMap<usize, usize>,
    pub metrics: Vec<MetricSample>,
    pub frames: Vec<Frame>,
}

impl TrialRecord {
    /// Number of prey eaten over the whole pursuit.
    pub fn n_eaten(&self) -> usize {
        self.eaten_times.len()
    }

    /// Final eaten fraction.
    pub fn p_eaten_final(&self) -> f64 {
        *p_eaten_series(self).last().unwrap()
    }
}

/// Cumulative eaten fraction at every step, starting at zero.
///
/// Entry t grows from entry t-1 by the fraction of the initial school
/// caught during step t. The cumulative count is carried as an integer,
/// so each entry equals `(n_initial - n_survived[t]) / n_initial`
/// exactly.
pub fn p_eaten_series(rec: &TrialRecord) -> Vec<f64> {
    let n = rec.n_initial as f64;
    let mut series = Vec::with_capacity(rec.n_survived.len());
    let mut cumulative_eaten: usize = 0;
    let mut prev_survived = rec.n_initial;
    for (t, &survived) in rec.n_survived.iter().enumerate() {
        if t == 0 {
            series.push(0.0);
        } else {
            cumulative_eaten += prev_survived - survived;
            series.push(cumulative_eaten as f64 / n);
        }
        prev_survived = survived;
    }
    series
}

/// Mean number of steps a prey stayed alive.
///
/// Prey never caught are credited with the full `t_max`; if nobody was
/// caught the result is exactly `t_max`. Measured in steps (multiply by
/// `dt` for model time).
pub fn average_living_time(rec: &TrialRecord) -> f64 {
    if rec.eaten_times.is_empty() {
        return rec.t_max as f64;
    }
    let survivors = rec.n_initial - rec.eaten_times.len();
    let total: usize =
        rec.eaten_times.values().sum::<usize>() + survivors * rec.t_max;
    total as f64 / rec.n_initial as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n_initial: usize, n_survived: Vec<usize>, eaten: &[(usize, usize)]) -> TrialRecord {
        let t_max = n_survived.len() - 1;
        TrialRecord {
            n_initial,
            t_max,
            dims: 2,
            record_every: 1,
            n_survived,
            eaten_times: eaten.iter().copied().collect(),
            metrics: Vec::new(),
            frames: Vec::new(),
        }
    }

    #[test]
    fn eaten_fraction_worked_example() {
        // Survivors 10, 10, 8, 8 out of 10.
        let rec = record(10, vec![10, 10, 8, 8], &[(0, 2), (1, 2)]);
        assert_eq!(p_eaten_series(&rec), vec![0.0, 0.0, 0.2, 0.2]);
    }

    #[test]
    fn eaten_fraction_stays_zero_without_kills() {
        let rec = record(7, vec![7; 50], &[]);
        let series = p_eaten_series(&rec);
        assert!(series.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn eaten_fraction_reaches_one_on_wipeout() {
        let rec = record(4, vec![4, 2, 0, 0, 0], &[(0, 1), (1, 1), (2, 2), (3, 2)]);
        let series = p_eaten_series(&rec);
        assert_eq!(*series.last().unwrap(), 1.0);
        assert_eq!(series, vec![0.0, 0.5, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn eaten_fraction_matches_closed_form_exactly() {
        // Awkward divisor: increments of 1/7 accumulated as integers must
        // still land exactly on (N - survivors)/N.
        let rec = record(
            7,
            vec![7, 6, 6, 5, 3, 3, 2, 1, 1],
            &[
                (0, 1),
                (1, 3),
                (2, 4),
                (3, 4),
                (4, 6),
                (5, 7),
            ],
        );
        let series = p_eaten_series(&rec);
        for (t, &p) in series.iter().enumerate() {
            let closed = (7 - rec.n_survived[t]) as f64 / 7.0;
            assert_eq!(p, closed, "step {t}");
        }
    }

    #[test]
    fn living_time_worked_example() {
        // Two prey, one caught at step 100, horizon 3000: (100 + 3000)/2.
        let mut survived = vec![2; 3001];
        for s in survived.iter_mut().skip(100) {
            *s = 1;
        }
        let rec = record(2, survived, &[(0, 100)]);
        assert_eq!(average_living_time(&rec), 1550.0);
    }

    #[test]
    fn living_time_without_kills_is_the_horizon() {
        let rec = record(5, vec![5; 3001], &[]);
        assert_eq!(average_living_time(&rec), 3000.0);
    }

    #[test]
    fn living_time_all_caught_at_step_one() {
        let rec = record(3, vec![3, 0, 0], &[(0, 1), (1, 1), (2, 1)]);
        assert_eq!(average_living_time(&rec), 1.0);
    }

    #[test]
    fn living_time_is_order_independent() {
        let a = record(3, vec![3, 2, 1, 1], &[(0, 1), (2, 2)]);
        let b = record(3, vec![3, 2, 1, 1], &[(2, 1), (0, 2)]);
        assert_eq!(average_living_time(&a), average_living_time(&b));
    }

    #[test]
    fn record_accessors() {
        let rec = record(10, vec![10, 9, 9], &[(4, 1)]);
        assert_eq!(rec.n_eaten(), 1);
        assert!((rec.p_eaten_final() - 0.1).abs() < 1e-15);
    }
}
