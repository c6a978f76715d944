//! School formation: the pair interaction and the damped schooling
//! integrator that produces a settled school from random positions.
//!
//! Prey i feels, from every living prey j, a position force
//!
//! ```text
//!   -alpha * ((r/d)^p - (r/d)^q) * (x_i - x_j)
//! ```
//!
//! repulsive inside the equilibrium spacing `r`, attractive outside, and
//! a velocity-matching force `-beta * ((r/d)^p + (r/d)^q) * (v_i - v_j)`
//! that damps relative motion at short range. During formation a linear
//! friction `-k v` bleeds off the initial kinetic energy so the school
//! relaxes into a lattice-like cluster.
//!
//! Integration is the stochastic generalization of semi-explicit Euler:
//! positions advance with pre-step velocities plus a Brownian increment,
//! then velocities advance using the just-updated positions. Pair forces
//! are accumulated in a fixed half-loop order (i < j, acting on both
//! rows), so force antisymmetry cancels exactly in the total and a given
//! state always sums in the same order regardless of how many worker
//! threads run trials above it.

use crate::error::SimError;
use crate::noise::NoiseSource;
use crate::params::SimParams;
use crate::state::SwarmState;
use crate::vecmath::{dist, norm, powf_fast, rescale};

/// The two scalar weights of the pair interaction at distance `d`:
/// `(r/d)^p - (r/d)^q` for the position force and `(r/d)^p + (r/d)^q`
/// for the velocity force. `d` is floored by `eps_dist`.
#[inline]
pub(crate) fn pair_scalars(d: f64, params: &SimParams) -> (f64, f64) {
    let ratio = params.r_crit / d.max(params.eps_dist);
    let tp = powf_fast(ratio, params.p_exp);
    let tq = powf_fast(ratio, params.q_exp);
    (tp - tq, tp + tq)
}

/// Position and velocity force exerted on prey `i` by prey `j`.
///
/// Returned as `(position_force, velocity_force)`; swapping the two prey
/// negates both, component for component.
pub fn pair_interaction(
    xi: &[f64],
    xj: &[f64],
    vi: &[f64],
    vj: &[f64],
    params: &SimParams,
) -> (Vec<f64>, Vec<f64>) {
    let d = dist(xi, xj);
    let (sp, sv) = pair_scalars(d, params);
    let dims = xi.len();
    let mut pos = vec![0.0; dims];
    let mut vel = vec![0.0; dims];
    for k in 0..dims {
        pos[k] = -params.alpha * sp * (xi[k] - xj[k]);
        vel[k] = -params.beta * sv * (vi[k] - vj[k]);
    }
    (pos, vel)
}

/// Accumulate the summed pair forces for every living prey into `accel`
/// (flat `n * dims`, zeroed here). Dead rows give and receive nothing.
///
/// Each unordered pair is evaluated once and applied antisymmetrically,
/// which both halves the work and makes the all-prey force total cancel
/// bitwise.
pub(crate) fn accumulate_pair_forces(state: &SwarmState, params: &SimParams, accel: &mut [f64]) {
    let n = state.len();
    let dims = state.dims();
    debug_assert_eq!(accel.len(), n * dims);
    accel.fill(0.0);
    let xs = state.positions_flat();
    let vs = state.velocities_flat();
    for i in 0..n {
        if !state.alive(i) {
            continue;
        }
        for j in (i + 1)..n {
            if !state.alive(j) {
                continue;
            }
            let d = dist(&xs[i * dims..(i + 1) * dims], &xs[j * dims..(j + 1) * dims]);
            let (sp, sv) = pair_scalars(d, params);
            for k in 0..dims {
                let dx = xs[i * dims + k] - xs[j * dims + k];
                let dv = vs[i * dims + k] - vs[j * dims + k];
                let f = -params.alpha * sp * dx - params.beta * sv * dv;
                accel[i * dims + k] += f;
                accel[j * dims + k] -= f;
            }
        }
    }
}

/// Clamp a velocity row to `v_max`, leaving slower rows untouched.
#[inline]
pub(crate) fn cap_speed(v: &mut [f64], v_max: f64) {
    if norm(v) > v_max {
        rescale(v, v_max);
    }
}

pub(crate) fn check_finite_swarm(state: &SwarmState, step: usize) -> Result<(), SimError> {
    if !state.positions_flat().iter().all(|x| x.is_finite()) {
        return Err(SimError::Diverged {
            step,
            quantity: "prey position",
        });
    }
    if !state.velocities_flat().iter().all(|x| x.is_finite()) {
        return Err(SimError::Diverged {
            step,
            quantity: "prey velocity",
        });
    }
    Ok(())
}

/// Advance the forming school by one step: positions first (pre-step
/// velocities plus noise), then velocities from pair forces and friction
/// evaluated at the new positions, then the speed cap.
///
/// Expects every prey alive; the predator does not exist yet.
pub fn school_step(state: &mut SwarmState, params: &SimParams, src: &mut NoiseSource) {
    debug_assert_eq!(state.n_alive(), state.len(), "school phase has no dead prey");
    let n = state.len();
    let dims = state.dims();
    let dt = params.dt;

    let noise = src.wiener_increments(n, dims, params.sigma_prey, dt);
    {
        // Positions move with the velocities from before this step.
        let (xs, vs, _) = state.buffers_mut();
        for idx in 0..n * dims {
            xs[idx] = (xs[idx] + vs[idx] * dt) + noise[idx];
        }
    }

    let mut accel = vec![0.0; n * dims];
    accumulate_pair_forces(state, params, &mut accel);
    for i in 0..n {
        let base = i * dims;
        let v = state.velocity_mut(i);
        for k in 0..dims {
            v[k] += (accel[base + k] - params.k_friction * v[k]) * dt;
        }
        cap_speed(v, params.v_max);
    }
}

/// Run the formation phase from scratch: scatter `n_prey` prey uniformly
/// in the initial box with zero velocity, integrate `t_max_school` steps,
/// and translate the result so the school center sits at the origin.
pub fn generate_school(params: &SimParams, src: &mut NoiseSource) -> Result<SwarmState, SimError> {
    let n = params.n_prey;
    let dims = params.dims;
    let positions = src.uniform_positions(n, dims, params.resolved_half_width());
    let mut state = SwarmState::at_rest(n, dims, positions);

    for step in 1..=params.t_max_school {
        school_step(&mut state, params, src);
        check_finite_swarm(&state, step)?;
    }

    // Center the school on the origin so the pursuit phase starts from a
    // translation-independent frame.
    let mut center = vec![0.0; dims];
    for i in 0..n {
        for k in 0..dims {
            center[k] += state.position(i)[k];
        }
    }
    for c in center.iter_mut() {
        *c /= n as f64;
    }
    for i in 0..n {
        let row = state.position_mut(i);
        for k in 0..dims {
            row[k] -= center[k];
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SimParams;

    fn test_params() -> SimParams {
        let mut p = SimParams::baseline();
        p.sigma_prey = 0.0;
        p.sigma_pred = 0.0;
        p
    }

    #[test]
    fn pair_position_force_vanishes_at_equilibrium() {
        let mut p = test_params();
        p.r_crit = 1.3;
        let (pos, _) = pair_interaction(
            &[0.0, 0.0],
            &[1.3, 0.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
            &p,
        );
        assert_eq!(pos, vec![0.0, 0.0]);
    }

    #[test]
    fn pair_force_worked_example() {
        // Separation 2 with r = 1, p = 2, q = 4, alpha = 1:
        // scalar = (1/2)^2 - (1/2)^4 = 3/16, force = -(3/16)(-2, 0) = (3/8, 0).
        let mut p = test_params();
        p.alpha = 1.0;
        p.beta = 0.5;
        p.p_exp = 2.0;
        p.q_exp = 4.0;
        p.r_crit = 1.0;
        let (pos, vel) = pair_interaction(
            &[0.0, 0.0],
            &[2.0, 0.0],
            &[0.4, -0.1],
            &[0.4, -0.1],
            &p,
        );
        assert!((pos[0] - 0.375).abs() < 1e-15);
        assert_eq!(pos[1], 0.0);
        assert_eq!(vel, vec![0.0, 0.0]);
    }

    #[test]
    fn pair_force_repels_inside_equilibrium() {
        let mut p = test_params();
        p.alpha = 1.0;
        p.p_exp = 2.0;
        p.q_exp = 4.0;
        p.r_crit = 1.0;
        // Prey at the origin with a neighbor at (0.5, 0): pushed in -x.
        let (pos, _) = pair_interaction(&[0.0, 0.0], &[0.5, 0.0], &[0.0; 2], &[0.0; 2], &p);
        assert!(pos[0] < 0.0, "expected repulsion, got {pos:?}");
        // And attraction outside r.
        let (pos, _) = pair_interaction(&[0.0, 0.0], &[3.0, 0.0], &[0.0; 2], &[0.0; 2], &p);
        assert!(pos[0] > 0.0, "expected attraction, got {pos:?}");
    }

    #[test]
    fn velocity_force_damps_relative_motion() {
        let p = test_params();
        let (_, vel) = pair_interaction(
            &[0.0, 0.0],
            &[1.5, 0.0],
            &[1.0, 0.0],
            &[0.0, 0.0],
            &p,
        );
        // i moves faster than j, so the matching force pulls i back.
        assert!(vel[0] < 0.0, "{vel:?}");
    }

    #[test]
    fn pair_force_is_antisymmetric_bitwise() {
        let p = test_params();
        let xi = [0.3, -1.2];
        let xj = [2.1, 0.7];
        let vi = [0.5, 0.25];
        let vj = [-0.75, 1.5];
        let (pos_ij, vel_ij) = pair_interaction(&xi, &xj, &vi, &vj, &p);
        let (pos_ji, vel_ji) = pair_interaction(&xj, &xi, &vj, &vi, &p);
        for k in 0..2 {
            assert_eq!(pos_ij[k], -pos_ji[k]);
            assert_eq!(vel_ij[k], -vel_ji[k]);
        }
    }

    #[test]
    fn coincident_prey_stay_finite() {
        let p = test_params();
        let (pos, vel) = pair_interaction(&[1.0, 1.0], &[1.0, 1.0], &[0.0; 2], &[1.0, 0.0], &p);
        assert!(pos.iter().all(|x| x.is_finite()));
        assert!(vel.iter().all(|x| x.is_finite()));
        // Zero displacement gives zero position force even at the eps floor.
        assert_eq!(pos, vec![0.0, 0.0]);
    }

    #[test]
    fn equilateral_school_at_equilibrium_is_stationary() {
        // Three prey pairwise at distance r with zero velocity: every pair
        // force vanishes, so a noiseless step leaves the school in place.
        // The diagonal side lengths round to a few ulps off r, so the
        // velocities are only near zero, not exactly zero.
        let mut p = test_params();
        p.n_prey = 3;
        let r = p.r_crit;
        let positions = vec![
            0.0,
            0.0,
            r,
            0.0,
            r / 2.0,
            r * (3.0f64).sqrt() / 2.0,
        ];
        let mut state = SwarmState::at_rest(3, 2, positions.clone());
        let mut src = NoiseSource::new(1);
        school_step(&mut state, &p, &mut src);
        assert_eq!(state.positions_flat(), positions.as_slice());
        assert!(state.velocities_flat().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn speed_cap_hits_exactly() {
        // One prey, no pairs, no friction: the cap is the only effect.
        let mut p = test_params();
        p.n_prey = 1;
        p.k_friction = 0.0;
        p.v_max = 1.0;
        let mut state = SwarmState::new(2, vec![0.0, 0.0], vec![10.0, 0.0]);
        let mut src = NoiseSource::new(1);
        school_step(&mut state, &p, &mut src);
        assert_eq!(norm(state.velocity(0)), 1.0);
    }

    #[test]
    fn one_step_matches_scalar_reimplementation() {
        // Two prey, every term written out longhand with scalars only.
        let mut p = test_params();
        p.n_prey = 2;
        p.alpha = 1.0;
        p.beta = 0.5;
        p.p_exp = 2.0;
        p.q_exp = 4.0;
        p.r_crit = 1.0;
        p.k_friction = 0.25;
        p.dt = 0.01;
        p.v_max = 100.0;

        let (x1, y1, x2, y2) = (0.0, 0.0, 2.0, 0.0);
        let (u1, w1, u2, w2) = (0.3, 0.1, -0.2, 0.4);
        let mut state = SwarmState::new(2, vec![x1, y1, x2, y2], vec![u1, w1, u2, w2]);
        let mut src = NoiseSource::new(0);
        school_step(&mut state, &p, &mut src);

        // Positions advance with the old velocities.
        let nx1 = x1 + u1 * 0.01;
        let ny1 = y1 + w1 * 0.01;
        let nx2 = x2 + u2 * 0.01;
        let ny2 = y2 + w2 * 0.01;

        // Pair scalars at the new separation.
        let ddx = nx1 - nx2;
        let ddy = ny1 - ny2;
        let d = (ddx * ddx + ddy * ddy).sqrt();
        let tp = (1.0 / d).powi(2);
        let tq = (1.0 / d).powi(4);
        let sp = tp - tq;
        let sv = tp + tq;

        let f1x = -1.0 * sp * ddx - 0.5 * sv * (u1 - u2);
        let f1y = -1.0 * sp * ddy - 0.5 * sv * (w1 - w2);

        let nu1 = u1 + (f1x - 0.25 * u1) * 0.01;
        let nw1 = w1 + (f1y - 0.25 * w1) * 0.01;
        let nu2 = u2 + (-f1x - 0.25 * u2) * 0.01;
        let nw2 = w2 + (-f1y - 0.25 * w2) * 0.01;

        let got_x = state.positions_flat();
        let got_v = state.velocities_flat();
        for (got, want) in got_x.iter().zip([nx1, ny1, nx2, ny2]) {
            assert!((got - want).abs() < 1e-12, "position {got} vs {want}");
        }
        for (got, want) in got_v.iter().zip([nu1, nw1, nu2, nw2]) {
            assert!((got - want).abs() < 1e-12, "velocity {got} vs {want}");
        }
    }

    #[test]
    fn total_pair_force_cancels() {
        // Each pair contributes +f and -f bitwise, but the two sides land
        // in different rows whose running sums round independently, so
        // the grand total is zero only up to accumulated rounding.
        let mut p = test_params();
        p.n_prey = 6;
        p.k_friction = 0.0;
        let mut src = NoiseSource::new(17);
        let positions = src.uniform_positions(6, 2, 3.0);
        let velocities = src.uniform_positions(6, 2, 1.0);
        let state = SwarmState::new(2, positions, velocities);
        let mut accel = vec![0.0; 12];
        accumulate_pair_forces(&state, &p, &mut accel);
        let scale = accel.iter().fold(1.0f64, |m, &a| m.max(a.abs()));
        for k in 0..2 {
            let total: f64 = (0..6).map(|i| accel[i * 2 + k]).sum();
            assert!(total.abs() <= 1e-13 * scale, "axis {k} total {total}");
        }
    }

    #[test]
    fn single_prey_school_lands_on_origin() {
        let mut p = test_params();
        p.n_prey = 1;
        p.t_max_school = 50;
        let mut src = NoiseSource::new(4);
        let school = generate_school(&p, &mut src).unwrap();
        assert_eq!(school.position(0), &[0.0, 0.0]);
        assert_eq!(school.velocity(0), &[0.0, 0.0]);
    }

    #[test]
    fn generated_school_is_centered() {
        let mut p = SimParams::baseline();
        p.n_prey = 12;
        p.t_max_school = 200;
        let mut src = NoiseSource::new(11);
        let school = generate_school(&p, &mut src).unwrap();
        for k in 0..2 {
            let mean: f64 =
                (0..12).map(|i| school.position(i)[k]).sum::<f64>() / 12.0;
            assert!(mean.abs() < 1e-9, "axis {k} mean {mean}");
        }
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let mut p = SimParams::baseline();
        p.n_prey = 8;
        p.t_max_school = 100;
        let a = generate_school(&p, &mut NoiseSource::new(21)).unwrap();
        let b = generate_school(&p, &mut NoiseSource::new(21)).unwrap();
        let c = generate_school(&p, &mut NoiseSource::new(22)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
