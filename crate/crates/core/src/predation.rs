//! Pursuit phase: a single predator against the settled school.
//!
//! Prey keep their pair interaction (friction gone) and add a flee force
//! pointing away from the predator,
//!
//! ```text
//!   H_i = delta * (R1 / |x_i - y|)^theta1 * (x_i - y)
//! ```
//!
//! The predator accelerates by one of two strategies: toward the school's
//! mean position/velocity (center attack), or toward a distance-weighted
//! average over the living prey in which near prey dominate (nearest
//! attack). Prey strictly inside the catch radius `m * r` at the end of a
//! step are eaten: their rows freeze and drop out of every sum from the
//! next evaluation on.
//!
//! Step order mirrors the formation integrator: all positions advance
//! with pre-step velocities plus noise, prey velocities update from
//! forces at the new positions, then the predator velocity updates from
//! the new prey state. Only prey speeds are capped; the predator's never
//! is.

use std::collections::BTreeMap;

use crate::error::SimError;
use crate::metrics::{count_subgroups, school_center, school_diameter, velocity_std};
use crate::noise::NoiseSource;
use crate::params::{SimParams, Strategy};
use crate::school::{accumulate_pair_forces, cap_speed, check_finite_swarm};
use crate::state::{PredatorState, SwarmState};
use crate::survival::{Frame, MetricSample, TrialRecord};
use crate::vecmath::{dist, powf_fast};

/// What one pursuit step produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepEvents {
    pub step: usize,
    /// Prey eaten this step, ascending by index.
    pub eaten: Vec<usize>,
}

/// Flee force on a prey at `xi` from a predator at `y`.
pub fn flight_force(xi: &[f64], y: &[f64], params: &SimParams) -> Vec<f64> {
    let d = dist(xi, y).max(params.eps_dist);
    let w = params.delta * powf_fast(params.r1_flee / d, params.theta1);
    xi.iter().zip(y).map(|(a, b)| w * (a - b)).collect()
}

/// Center attack: pull toward the mean position of the living prey,
/// aligning with their mean velocity.
pub fn hunting_force_center(
    state: &SwarmState,
    pred: &PredatorState,
    params: &SimParams,
) -> Vec<f64> {
    let (xc, vc) = school_center(state).expect("hunting requires a living prey");
    let d = dist(&pred.position, &xc).max(params.eps_dist);
    let w = powf_fast(params.r2_hunt / d, params.theta2);
    let dims = state.dims();
    let mut f = vec![0.0; dims];
    for k in 0..dims {
        f[k] = -w
            * (params.gamma1 * (pred.position[k] - xc[k])
                + params.gamma1 * params.gamma2 * (pred.velocity[k] - vc[k]));
    }
    f
}

/// Nearest attack: every living prey contributes a pull weighted by
/// `(R2/d_j)^theta2`, so the closest prey dominates; the sum is averaged
/// over the living count.
pub fn hunting_force_nearest(
    state: &SwarmState,
    pred: &PredatorState,
    params: &SimParams,
) -> Vec<f64> {
    let n_alive = state.n_alive();
    assert!(n_alive > 0, "hunting requires a living prey");
    let dims = state.dims();
    let mut f = vec![0.0; dims];
    for j in state.alive_indices() {
        let xj = state.position(j);
        let vj = state.velocity(j);
        let d = dist(&pred.position, xj).max(params.eps_dist);
        let w = powf_fast(params.r2_hunt / d, params.theta2);
        for k in 0..dims {
            f[k] -= w
                * (params.gamma1 * (pred.position[k] - xj[k])
                    + params.gamma1 * params.gamma2 * (pred.velocity[k] - vj[k]));
        }
    }
    for x in f.iter_mut() {
        *x /= n_alive as f64;
    }
    f
}

/// The hunting force selected by `params.strategy`.
pub fn hunting_force(state: &SwarmState, pred: &PredatorState, params: &SimParams) -> Vec<f64> {
    match params.strategy {
        Strategy::CenterAttack => hunting_force_center(state, pred, params),
        Strategy::NearestAttack => hunting_force_nearest(state, pred, params),
    }
}

/// Total acceleration on every prey row (flat `n * dims`): summed pair
/// forces plus the flee force. Dead rows are zero.
pub fn prey_acceleration(
    state: &SwarmState,
    pred: &PredatorState,
    params: &SimParams,
) -> Vec<f64> {
    let n = state.len();
    let dims = state.dims();
    let mut accel = vec![0.0; n * dims];
    accumulate_pair_forces(state, params, &mut accel);
    for i in state.alive_indices() {
        let h = flight_force(state.position(i), &pred.position, params);
        for k in 0..dims {
            accel[i * dims + k] += h[k];
        }
    }
    accel
}

/// Place the predator at the configured spawn distance from the school
/// center, in a uniformly random direction, at rest.
pub fn predator_spawn(
    school: &SwarmState,
    params: &SimParams,
    src: &mut NoiseSource,
) -> PredatorState {
    let (xc, _) = school_center(school).expect("cannot spawn a predator on an empty school");
    let dir = src.unit_direction(school.dims());
    let spawn = params.resolved_spawn_dist();
    let position = xc
        .iter()
        .zip(&dir)
        .map(|(c, u)| c + spawn * u)
        .collect();
    PredatorState::at_rest(position)
}

/// Advance the pursuit by one step. `step` is the 1-based step index,
/// carried into events and divergence errors.
pub fn predation_step(
    state: &mut SwarmState,
    pred: &mut PredatorState,
    params: &SimParams,
    src: &mut NoiseSource,
    step: usize,
) -> Result<StepEvents, SimError> {
    let n = state.len();
    let dims = state.dims();
    let dt = params.dt;

    // Noise is drawn for every row, dead or not, so the stream position
    // never depends on how many prey remain.
    let prey_noise = src.wiener_increments(n, dims, params.sigma_prey, dt);
    let pred_noise = src.wiener_increments(1, dims, params.sigma_pred, dt);

    {
        let (xs, vs, alive) = state.buffers_mut();
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            for k in 0..dims {
                let idx = i * dims + k;
                xs[idx] = (xs[idx] + vs[idx] * dt) + prey_noise[idx];
            }
        }
    }
    for k in 0..dims {
        pred.position[k] = (pred.position[k] + pred.velocity[k] * dt) + pred_noise[k];
    }

    // Prey velocities from forces at the new positions (old velocities on
    // the right-hand side, all rows updating simultaneously).
    let accel = prey_acceleration(state, pred, params);
    {
        let (_, vs, alive) = state.buffers_mut();
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            for k in 0..dims {
                let idx = i * dims + k;
                vs[idx] += accel[idx] * dt;
            }
        }
    }

    // Predator velocity from the new prey positions and velocities.
    let force = hunting_force(state, pred, params);
    for k in 0..dims {
        pred.velocity[k] += force[k] * dt;
    }

    if params.cap_prey_velocity {
        let v_max = params.v_max;
        let (_, vs, alive) = state.buffers_mut();
        for i in 0..n {
            if alive[i] {
                cap_speed(&mut vs[i * dims..(i + 1) * dims], v_max);
            }
        }
    }

    // Strictly inside the catch radius means eaten; exactly on it survives.
    let catch_radius = params.catch_radius();
    let mut eaten = Vec::new();
    for i in 0..n {
        if state.alive(i) && dist(state.position(i), &pred.position) < catch_radius {
            state.mark_eaten(i);
            eaten.push(i);
        }
    }

    check_finite_swarm(state, step)?;
    if !pred.position.iter().all(|x| x.is_finite())
        || !pred.velocity.iter().all(|x| x.is_finite())
    {
        return Err(SimError::Diverged {
            step,
            quantity: "predator state",
        });
    }

    Ok(StepEvents { step, eaten })
}

/// Run the full pursuit from a settled school and a spawned predator.
///
/// `record_every` sets the cadence of the metric series (and of the
/// position snapshots when `record_frames` is on); step 0 is always
/// recorded. The survivor series covers every step 0..=t_max: when the
/// school is wiped out early the series is extended with zeros so all
/// trials have uniform length.
pub fn run_predation(
    initial: SwarmState,
    predator: PredatorState,
    params: &SimParams,
    src: &mut NoiseSource,
    record_every: usize,
    record_frames: bool,
) -> Result<TrialRecord, SimError> {
    assert!(record_every > 0, "record_every must be positive");
    let mut state = initial;
    let mut pred = predator;
    let n_initial = state.n_alive();
    let t_max = params.t_max;

    let mut n_survived = Vec::with_capacity(t_max + 1);
    n_survived.push(n_initial);
    let mut eaten_times = BTreeMap::new();
    let mut metrics = Vec::new();
    let mut frames = Vec::new();

    let snapshot_metrics = |state: &SwarmState, step: usize| MetricSample {
        step,
        diameter: school_diameter(state).expect("metrics recorded while prey live"),
        velocity_std: velocity_std(state).expect("metrics recorded while prey live"),
        n_groups: count_subgroups(state, params.resolved_link_dist()),
    };
    let snapshot_frame = |state: &SwarmState, pred: &PredatorState, step: usize| Frame {
        step,
        positions: state.positions_flat().to_vec(),
        velocities: state.velocities_flat().to_vec(),
        alive: state.alive_flags().to_vec(),
        pred_position: pred.position.clone(),
        pred_velocity: pred.velocity.clone(),
    };

    if n_initial > 0 {
        metrics.push(snapshot_metrics(&state, 0));
    }
    if record_frames {
        frames.push(snapshot_frame(&state, &pred, 0));
    }

    for t in 1..=t_max {
        let events = predation_step(&mut state, &mut pred, params, src, t)?;
        for id in events.eaten {
            eaten_times.insert(id, t);
        }
        let alive = state.n_alive();
        n_survived.push(alive);

        if t % record_every == 0 {
            if alive > 0 {
                metrics.push(snapshot_metrics(&state, t));
            }
            if record_frames {
                frames.push(snapshot_frame(&state, &pred, t));
            }
        }

        if alive == 0 {
            n_survived.resize(t_max + 1, 0);
            break;
        }
    }

    Ok(TrialRecord {
        n_initial,
        t_max,
        dims: state.dims(),
        record_every,
        n_survived,
        eaten_times,
        metrics,
        frames,
    })
}
