//! Property tests for the model invariants that should hold for any
//! admissible state, not just the hand-worked cases: force symmetry,
//! frame independence, the velocity cap, survival bookkeeping, and
//! reproducibility.

use proptest::prelude::*;
use shoal_core::{
    average_living_time, count_subgroups, p_eaten_series, predation_step, run_trial,
    school_diameter, school_step, velocity_std, NoiseSource, PatternLabel, PredatorState,
    SimParams, SwarmState,
};

/// Coordinates on a 0.1 grid in [-5, 5]; coarse enough to shrink well.
fn coord() -> impl Strategy<Value = f64> {
    (-50i32..=50).prop_map(|k| f64::from(k) / 10.0)
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(coord(), n)
}

fn quiet_params(n_prey: usize) -> SimParams {
    let mut p = SimParams::baseline();
    p.n_prey = n_prey;
    p.sigma_prey = 0.0;
    p.sigma_pred = 0.0;
    p.k_friction = 0.0;
    p.v_max = 1e12;
    p
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // One pair, starting from rest with no noise or friction: the two
    // velocity kicks are the same pair force with opposite sign, and the
    // sign flip survives the dt multiply bitwise.
    #[test]
    fn two_prey_step_kicks_are_antisymmetric(pos in coords(4)) {
        prop_assume!((pos[0] - pos[2]).abs() + (pos[1] - pos[3]).abs() > 0.2);
        let p = quiet_params(2);
        let mut state = SwarmState::at_rest(2, 2, pos);
        let mut src = NoiseSource::new(1);
        school_step(&mut state, &p, &mut src);
        let v0 = state.velocity(0).to_vec();
        let v1 = state.velocity(1).to_vec();
        prop_assert_eq!(v0[0], -v1[0]);
        prop_assert_eq!(v0[1], -v1[1]);
    }

    // Pair forces sum to zero over the school, so a noiseless step from
    // rest leaves the total momentum at zero up to rounding.
    #[test]
    fn momentum_is_conserved_from_rest(pos in coords(10)) {
        let p = quiet_params(5);
        let mut state = SwarmState::at_rest(5, 2, pos);
        let mut src = NoiseSource::new(2);
        school_step(&mut state, &p, &mut src);
        let vs = state.velocities_flat().to_vec();
        let scale = max_abs(&vs).max(1.0);
        for k in 0..2 {
            let total: f64 = (0..5).map(|i| vs[i * 2 + k]).sum();
            prop_assert!(total.abs() <= 1e-12 * scale, "axis {} total {}", k, total);
        }
    }

    // The dynamics depend on relative positions only: translating every
    // agent translates the trajectory and leaves velocities unchanged.
    #[test]
    fn school_step_is_translation_equivariant(
        pos in coords(8),
        shift in (-30i32..=30).prop_map(|k| f64::from(k) / 4.0),
    ) {
        let mut p = quiet_params(4);
        p.sigma_prey = 0.05;
        p.k_friction = 0.5;

        let mut plain = SwarmState::at_rest(4, 2, pos.clone());
        let shifted_pos: Vec<f64> = pos.iter().map(|x| x + shift).collect();
        let mut moved = SwarmState::at_rest(4, 2, shifted_pos);

        let mut src_a = NoiseSource::new(7);
        let mut src_b = NoiseSource::new(7);
        for _ in 0..5 {
            school_step(&mut plain, &p, &mut src_a);
            school_step(&mut moved, &p, &mut src_b);
        }
        for i in 0..4 {
            for k in 0..2 {
                let a = plain.position(i)[k] + shift;
                let b = moved.position(i)[k];
                prop_assert!((a - b).abs() < 1e-9, "position {} axis {}: {} vs {}", i, k, a, b);
                let va = plain.velocity(i)[k];
                let vb = moved.velocity(i)[k];
                prop_assert!((va - vb).abs() < 1e-9);
            }
        }
    }

    // With the cap enabled no live prey ever exceeds v_max, whatever the
    // incoming velocities were.
    #[test]
    fn prey_speed_never_exceeds_cap(pos in coords(8), vel in coords(8)) {
        let mut p = SimParams::baseline();
        p.n_prey = 4;
        p.v_max = 2.0;
        let big_vel: Vec<f64> = vel.iter().map(|v| v * 40.0).collect();
        let mut state = SwarmState::new(2, pos, big_vel);
        let mut pred = PredatorState::at_rest(vec![20.0, 20.0]);
        let mut src = NoiseSource::new(3);
        for step in 0..4 {
            if predation_step(&mut state, &mut pred, &p, &mut src, step).is_err() {
                break;
            }
            for i in 0..state.len() {
                if state.alive(i) {
                    let speed = state.velocity(i).iter().map(|v| v * v).sum::<f64>().sqrt();
                    prop_assert!(speed <= p.v_max + 1e-12, "prey {} speed {}", i, speed);
                }
            }
        }
    }

    // Survival bookkeeping: the survivor series never increases, the
    // eaten fraction is its exact mirror, and the average living time
    // stays inside the horizon.
    #[test]
    fn survival_series_is_consistent(seed in any::<u64>()) {
        let mut p = SimParams::baseline();
        p.n_prey = 6;
        p.t_max = 80;
        p.t_max_school = 40;
        p.m_catch = 1.0;
        let rec = run_trial(&p, seed, 0, 10, false).unwrap();

        prop_assert_eq!(rec.n_survived[0], 6);
        for w in rec.n_survived.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        let series = p_eaten_series(&rec);
        prop_assert_eq!(series.len(), rec.n_survived.len());
        for (i, (&s, &pe)) in rec.n_survived.iter().zip(series.iter()).enumerate() {
            prop_assert!((0.0..=1.0).contains(&pe));
            let closed = (6 - s) as f64 / 6.0;
            prop_assert_eq!(pe, closed, "step {}", i);
            if i > 0 {
                prop_assert!(series[i] >= series[i - 1]);
            }
        }
        let t_bar = average_living_time(&rec);
        prop_assert!(t_bar > 0.0 && t_bar <= p.t_max as f64);
    }

    // Growing the linking distance can only merge subgroups.
    #[test]
    fn subgroup_count_is_monotone_in_link_distance(pos in coords(12)) {
        let state = SwarmState::at_rest(6, 2, pos);
        let links = [0.05, 0.5, 1.5, 4.0, 1e9];
        let counts: Vec<usize> = links
            .iter()
            .map(|&l| count_subgroups(&state, l))
            .collect();
        for w in counts.windows(2) {
            prop_assert!(w[1] <= w[0], "counts {:?}", counts);
        }
        prop_assert_eq!(*counts.last().unwrap(), 1);
    }

    // Diameter and velocity spread describe shape, not placement: both
    // are invariant under translating the school, and the diameter under
    // rotating it.
    #[test]
    fn shape_metrics_ignore_rigid_motion(
        pos in coords(10),
        vel in coords(10),
        shift in coord(),
        angle in (0i32..=62).prop_map(|k| f64::from(k) / 10.0),
    ) {
        let state = SwarmState::new(2, pos.clone(), vel.clone());
        let d0 = school_diameter(&state).unwrap();
        let s0 = velocity_std(&state).unwrap();

        let moved_pos: Vec<f64> = pos.iter().map(|x| x + shift).collect();
        let moved = SwarmState::new(2, moved_pos, vel.clone());
        prop_assert!((school_diameter(&moved).unwrap() - d0).abs() < 1e-9);
        prop_assert!((velocity_std(&moved).unwrap() - s0).abs() < 1e-9);

        let (c, s) = (angle.cos(), angle.sin());
        let rot = |xs: &[f64]| -> Vec<f64> {
            xs.chunks(2)
                .flat_map(|q| [c * q[0] - s * q[1], s * q[0] + c * q[1]])
                .collect()
        };
        let spun = SwarmState::new(2, rot(&pos), rot(&vel));
        prop_assert!((school_diameter(&spun).unwrap() - d0).abs() < 1e-9);
        prop_assert!((velocity_std(&spun).unwrap() - s0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // The same seed and trial index reproduce the full record bit for
    // bit, frames included.
    #[test]
    fn trials_are_reproducible(seed in any::<u64>(), trial in 0u64..8) {
        let mut p = SimParams::for_pattern(PatternLabel::Scattered);
        p.n_prey = 5;
        p.t_max = 60;
        p.t_max_school = 30;
        let a = run_trial(&p, seed, trial, 10, true).unwrap();
        let b = run_trial(&p, seed, trial, 10, true).unwrap();
        prop_assert_eq!(a, b);
    }
}

// Halving dt should roughly halve the endpoint error of the noiseless
// integrator (first order in dt). The ratio is checked against a
// reference run at a much smaller step.
#[test]
fn step_error_shrinks_first_order_in_dt() {
    let t_final = 0.5;
    let run = |dt: f64| -> Vec<f64> {
        let mut p = quiet_params(2);
        p.k_friction = 0.5;
        p.dt = dt;
        let mut state = SwarmState::at_rest(2, 2, vec![0.0, 0.0, 1.6, 0.0]);
        let mut src = NoiseSource::new(1);
        let steps = (t_final / dt).round() as usize;
        for _ in 0..steps {
            school_step(&mut state, &p, &mut src);
        }
        state.positions_flat().to_vec()
    };

    let reference = run(1.0 / 4096.0);
    let err = |dt: f64| -> f64 {
        run(dt)
            .iter()
            .zip(reference.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max)
    };
    let e1 = err(1.0 / 64.0);
    let e2 = err(1.0 / 128.0);
    assert!(e1 > 0.0 && e2 > 0.0);
    let ratio = e1 / e2;
    assert!(
        (1.5..=2.5).contains(&ratio),
        "error ratio {ratio} not first order (e1 {e1}, e2 {e2})"
    );
}
