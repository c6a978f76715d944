//! Model parameters, built-in presets, and validation.
//!
//! A [`SimParams`] value carries every coefficient of the interaction model
//! together with the integration settings and the plumbing knobs (initial
//! spread, spawn distance, grouping radius, classifier thresholds). All
//! engine entry points take a validated `SimParams` by reference; nothing
//! else is configurable at run time.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::SimError;

/// How the predator selects its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Accelerate toward the mean position and mean velocity of the
    /// living prey.
    #[serde(rename = "center")]
    CenterAttack,
    /// Accelerate toward a distance-weighted average over living prey, so
    /// the nearest prey dominates the pull.
    #[serde(rename = "nearest")]
    NearestAttack,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::CenterAttack => write!(f, "center"),
            Strategy::NearestAttack => write!(f, "nearest"),
        }
    }
}

impl FromStr for Strategy {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "center" => Ok(Strategy::CenterAttack),
            "nearest" => Ok(Strategy::NearestAttack),
            other => Err(SimError::invalid(
                "strategy",
                format!("unknown strategy '{other}' (expected 'center' or 'nearest')"),
            )),
        }
    }
}

/// The four qualitative evasion regimes the model reproduces, used both to
/// name the built-in presets and as classifier output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternLabel {
    SplitReunion,
    SplitTwoGroups,
    Scattered,
    MaintainFormation,
}

impl PatternLabel {
    pub const ALL: [PatternLabel; 4] = [
        PatternLabel::SplitReunion,
        PatternLabel::SplitTwoGroups,
        PatternLabel::Scattered,
        PatternLabel::MaintainFormation,
    ];

    /// Roman-numeral tag used on the command line and in configs.
    pub fn numeral(self) -> &'static str {
        match self {
            PatternLabel::SplitReunion => "I",
            PatternLabel::SplitTwoGroups => "II",
            PatternLabel::Scattered => "III",
            PatternLabel::MaintainFormation => "IV",
        }
    }
}

impl fmt::Display for PatternLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.numeral())
    }
}

impl FromStr for PatternLabel {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(PatternLabel::SplitReunion),
            "II" => Ok(PatternLabel::SplitTwoGroups),
            "III" => Ok(PatternLabel::Scattered),
            "IV" => Ok(PatternLabel::MaintainFormation),
            other => Err(SimError::invalid(
                "pattern",
                format!("unknown pattern '{other}' (expected I, II, III, or IV)"),
            )),
        }
    }
}

/// Full parameter set for one simulation.
///
/// Optional fields (`half_width`, `spawn_dist`, `link_dist`) fall back to
/// values derived from the core coefficients; use the `resolved_*`
/// accessors to read the effective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// Number of prey in the school.
    pub n_prey: usize,
    /// Spatial dimension, 2 or 3.
    pub dims: usize,

    /// Prey-prey attraction/repulsion strength.
    pub alpha: f64,
    /// Prey-prey velocity-matching strength.
    pub beta: f64,
    /// Fright strength: how hard prey accelerate away from the predator.
    pub delta: f64,
    /// Linear velocity damping; active only while the school forms,
    /// never during the pursuit.
    pub k_friction: f64,

    /// Repulsion exponent of the pair interaction. Must exceed 1.
    pub p_exp: f64,
    /// Attraction exponent; must exceed `p_exp` so the pair force is
    /// repulsive inside `r_crit` and attractive outside.
    pub q_exp: f64,

    /// Pair equilibrium distance: the spacing at which the position force
    /// between two prey vanishes.
    pub r_crit: f64,
    /// Fright length scale; beyond it the flee force decays (or grows)
    /// by `theta1`.
    pub r1_flee: f64,
    /// Hunt length scale of the predator's weighting kernel.
    pub r2_hunt: f64,

    /// Exponent shaping how the flee force scales with predator distance.
    pub theta1: f64,
    /// Exponent shaping the predator's distance weighting.
    pub theta2: f64,

    /// Predator position-pull gain.
    pub gamma1: f64,
    /// Predator velocity-alignment gain, relative to `gamma1`.
    pub gamma2: f64,

    /// Catch radius as a fraction of `r_crit`: prey strictly closer than
    /// `m_catch * r_crit` to the predator are eaten.
    pub m_catch: f64,

    /// Diffusion of prey positions.
    pub sigma_prey: f64,
    /// Diffusion of the predator position.
    pub sigma_pred: f64,

    /// Integration time step.
    pub dt: f64,
    /// Number of pursuit steps.
    pub t_max: usize,
    /// Prey speed cap.
    pub v_max: f64,

    pub strategy: Strategy,

    /// Floor applied to every distance before it is used as a
    /// denominator, so coincident agents cannot produce infinities.
    pub eps_dist: f64,

    /// Number of school-formation steps run before the predator appears.
    pub t_max_school: usize,
    /// Whether the prey speed cap also applies during the pursuit.
    pub cap_prey_velocity: bool,

    /// Half-width of the initial uniform position box.
    /// Default: `2 * r_crit * n_prey^(1/dims)`.
    pub half_width: Option<f64>,
    /// Predator spawn distance from the school center. Default: `2 * r1_flee`.
    pub spawn_dist: Option<f64>,
    /// Proximity-graph edge length used when counting subgroups.
    /// Default: `3 * r_crit`.
    pub link_dist: Option<f64>,

    /// Classifier: final diameter above `scatter_ratio * initial` reads
    /// as scattering.
    pub scatter_ratio: f64,
    /// Classifier: after a split, a final diameter below
    /// `reunion_ratio * initial` reads as a reunion.
    pub reunion_ratio: f64,
    /// Classifier: relative diameter band treated as formation keeping.
    pub maintain_tol: f64,
}

impl SimParams {
    /// Baseline parameter set: the coefficient values used for the
    /// school-size study, plus documented defaults for everything the
    /// pattern presets do not pin down.
    pub fn baseline() -> Self {
        SimParams {
            n_prey: 30,
            dims: 2,
            alpha: 15.0,
            beta: 1.0,
            delta: 1.0,
            k_friction: 0.5,
            p_exp: 4.0,
            q_exp: 6.0,
            r_crit: 1.0,
            r1_flee: 3.0,
            r2_hunt: 5.0,
            theta1: 0.1,
            theta2: 0.5,
            gamma1: 0.1,
            gamma2: 0.1,
            m_catch: 0.5,
            sigma_prey: 0.05,
            sigma_pred: 0.05,
            dt: 5e-3,
            t_max: 3000,
            v_max: 2.0,
            strategy: Strategy::CenterAttack,
            eps_dist: 1e-8,
            t_max_school: 2000,
            cap_prey_velocity: true,
            half_width: None,
            spawn_dist: None,
            link_dist: None,
            scatter_ratio: 3.0,
            reunion_ratio: 1.5,
            maintain_tol: 0.25,
        }
    }

    /// The parameter set of the school-size sweep. Identical to
    /// [`SimParams::baseline`]; the alias exists so call sites say what
    /// they mean.
    pub fn sweep_default() -> Self {
        SimParams::baseline()
    }

    /// Baseline overlaid with the named pattern preset.
    pub fn for_pattern(label: PatternLabel) -> Self {
        let mut p = SimParams::baseline();
        pattern_preset(label).apply(&mut p);
        p
    }

    /// Effective half-width of the initial position box.
    pub fn resolved_half_width(&self) -> f64 {
        self.half_width
            .unwrap_or_else(|| 2.0 * self.r_crit * (self.n_prey as f64).powf(1.0 / self.dims as f64))
    }

    /// Effective predator spawn distance.
    pub fn resolved_spawn_dist(&self) -> f64 {
        self.spawn_dist.unwrap_or(2.0 * self.r1_flee)
    }

    /// Effective subgroup linking distance.
    pub fn resolved_link_dist(&self) -> f64 {
        self.link_dist.unwrap_or(3.0 * self.r_crit)
    }

    /// Distance below which a prey is caught.
    pub fn catch_radius(&self) -> f64 {
        self.m_catch * self.r_crit
    }

    /// See [`validate_params`].
    pub fn validated(self) -> Result<Self, SimError> {
        validate_params(self)
    }
}

/// Coefficient overlay producing one of the four evasion regimes.
///
/// Applying a preset rewrites the interaction coefficients and the attack
/// strategy; integration settings and plumbing knobs keep whatever the
/// base parameters said. The attraction exponent follows the repulsion
/// exponent as `q = p + 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternPreset {
    pub label: PatternLabel,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub p_exp: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub strategy: Strategy,
}

impl PatternPreset {
    pub fn apply(&self, params: &mut SimParams) {
        params.alpha = self.alpha;
        params.beta = self.beta;
        params.delta = self.delta;
        params.p_exp = self.p_exp;
        params.q_exp = self.p_exp + 2.0;
        params.theta1 = self.theta1;
        params.theta2 = self.theta2;
        params.gamma1 = self.gamma1;
        params.gamma2 = self.gamma2;
        params.strategy = self.strategy;
    }
}

/// Coefficients of the named evasion regime.
pub fn pattern_preset(label: PatternLabel) -> PatternPreset {
    match label {
        // Tight school, weakly pulled predator homing on the nearest prey:
        // the school splits around the attacker and reunites behind it.
        PatternLabel::SplitReunion => PatternPreset {
            label,
            alpha: 15.0,
            beta: 0.5,
            delta: 1.0,
            p_exp: 4.0,
            theta1: 1.0,
            theta2: 0.5,
            gamma1: 0.08,
            gamma2: 0.1,
            strategy: Strategy::NearestAttack,
        },
        // Loose school, short-range panic, center-seeking predator: the
        // school splits into two lobes that never rejoin.
        PatternLabel::SplitTwoGroups => PatternPreset {
            label,
            alpha: 1.0,
            beta: 0.5,
            delta: 1.0,
            p_exp: 4.0,
            theta1: 5.0,
            theta2: 1.0,
            gamma1: 0.1,
            gamma2: 0.1,
            strategy: Strategy::CenterAttack,
        },
        // Weak cohesion and a violent fright response: the school blows
        // apart and stragglers get picked off.
        PatternLabel::Scattered => PatternPreset {
            label,
            alpha: 1.0,
            beta: 0.5,
            delta: 5.0,
            p_exp: 2.0,
            theta1: 1.0,
            theta2: 2.0,
            gamma1: 1.0,
            gamma2: 0.1,
            strategy: Strategy::NearestAttack,
        },
        // Mild fright and a strongly velocity-aligned predator: the school
        // keeps formation and outpaces the attack.
        PatternLabel::MaintainFormation => PatternPreset {
            label,
            alpha: 2.0,
            beta: 0.5,
            delta: 0.1,
            p_exp: 2.0,
            theta1: 1.0,
            theta2: 1.0,
            gamma1: 5.0,
            gamma2: 10.0,
            strategy: Strategy::CenterAttack,
        },
    }
}

fn require_finite(field: &'static str, v: f64) -> Result<(), SimError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(SimError::invalid(field, format!("must be finite, got {v}")))
    }
}

fn require_positive(field: &'static str, v: f64) -> Result<(), SimError> {
    require_finite(field, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(SimError::invalid(field, format!("must be > 0, got {v}")))
    }
}

fn require_nonnegative(field: &'static str, v: f64) -> Result<(), SimError> {
    require_finite(field, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(SimError::invalid(field, format!("must be >= 0, got {v}")))
    }
}

/// Check every structural constraint on the parameters and hand them back
/// unchanged. The first violated constraint is reported; validation never
/// mutates anything, so validating twice is a no-op.
pub fn validate_params(params: SimParams) -> Result<SimParams, SimError> {
    let p = &params;
    if p.n_prey < 1 {
        return Err(SimError::invalid("n_prey", "must be at least 1"));
    }
    if p.dims != 2 && p.dims != 3 {
        return Err(SimError::invalid(
            "dims",
            format!("must be 2 or 3, got {}", p.dims),
        ));
    }
    require_positive("alpha", p.alpha)?;
    require_positive("beta", p.beta)?;
    require_positive("delta", p.delta)?;
    require_nonnegative("k_friction", p.k_friction)?;
    require_finite("p_exp", p.p_exp)?;
    if p.p_exp <= 1.0 {
        return Err(SimError::invalid(
            "p_exp",
            format!("must exceed 1, got {}", p.p_exp),
        ));
    }
    require_finite("q_exp", p.q_exp)?;
    if p.q_exp <= p.p_exp {
        return Err(SimError::invalid("q_exp", "q must exceed p"));
    }
    require_positive("r_crit", p.r_crit)?;
    require_finite("r1_flee", p.r1_flee)?;
    if p.r1_flee <= p.r_crit {
        return Err(SimError::invalid(
            "r1_flee",
            format!("must exceed r_crit = {}, got {}", p.r_crit, p.r1_flee),
        ));
    }
    require_finite("r2_hunt", p.r2_hunt)?;
    if p.r2_hunt <= p.r_crit {
        return Err(SimError::invalid(
            "r2_hunt",
            format!("must exceed r_crit = {}, got {}", p.r_crit, p.r2_hunt),
        ));
    }
    require_positive("theta1", p.theta1)?;
    require_positive("theta2", p.theta2)?;
    require_positive("gamma1", p.gamma1)?;
    require_positive("gamma2", p.gamma2)?;
    require_finite("m_catch", p.m_catch)?;
    if !(0.01..=1.0).contains(&p.m_catch) {
        return Err(SimError::invalid("m_catch", "m out of [0.01, 1]"));
    }
    require_nonnegative("sigma_prey", p.sigma_prey)?;
    require_nonnegative("sigma_pred", p.sigma_pred)?;
    require_positive("dt", p.dt)?;
    if p.t_max < 1 {
        return Err(SimError::invalid("t_max", "must be at least 1 step"));
    }
    require_positive("v_max", p.v_max)?;
    require_positive("eps_dist", p.eps_dist)?;
    if let Some(hw) = p.half_width {
        require_positive("half_width", hw)?;
    }
    if let Some(sd) = p.spawn_dist {
        require_positive("spawn_dist", sd)?;
    }
    if let Some(ld) = p.link_dist {
        require_positive("link_dist", ld)?;
    }
    require_finite("scatter_ratio", p.scatter_ratio)?;
    if p.scatter_ratio <= 1.0 {
        return Err(SimError::invalid(
            "scatter_ratio",
            format!("must exceed 1, got {}", p.scatter_ratio),
        ));
    }
    require_positive("reunion_ratio", p.reunion_ratio)?;
    require_finite("maintain_tol", p.maintain_tol)?;
    if !(p.maintain_tol > 0.0 && p.maintain_tol <= 1.0) {
        return Err(SimError::invalid(
            "maintain_tol",
            format!("must lie in (0, 1], got {}", p.maintain_tol),
        ));
    }
    Ok(params)
}
