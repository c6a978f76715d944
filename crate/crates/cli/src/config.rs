//! Flat `key = value` parameter files.
//!
//! One assignment per line; `#` starts a full-line comment; blank lines
//! are skipped. Keys are exactly the simulation parameter names, plus
//! two meta keys: `pattern = I|II|III|IV` overlays one of the built-in
//! evasion presets and `preset = sweep-default` overlays the school-size
//! study coefficients. Precedence is defaults, then the preset, then the
//! file's explicit assignments in order, then validation. A pattern
//! passed on the command line replaces the file's `pattern`/`preset`
//! choice but never the explicit assignments.

use std::fmt;
use std::fs;
use std::path::Path;

use shoal_core::{pattern_preset, PatternLabel, SimError, SimParams};
use thiserror::Error;

/// Which built-in coefficient block was applied, if any. Carried into
/// the run manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetChoice {
    Pattern(PatternLabel),
    SweepDefault,
}

impl fmt::Display for PresetChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresetChoice::Pattern(label) => write!(f, "{}", label.numeral()),
            PresetChoice::SweepDefault => write!(f, "sweep-default"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Invalid(#[from] SimError),
}

/// A parsed but not yet resolved config file: the preset selection and
/// the explicit assignments in file order.
#[derive(Debug, Clone)]
pub struct RawConfig {
    path: String,
    preset: Option<PresetChoice>,
    assignments: Vec<Assignment>,
}

#[derive(Debug, Clone)]
struct Assignment {
    key: String,
    value: String,
    line: usize,
}

pub fn parse_file(path: &Path) -> Result<RawConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text, &path.display().to_string())
}

pub fn parse_str(text: &str, origin: &str) -> Result<RawConfig, ConfigError> {
    let err = |line: usize, message: String| ConfigError::Parse {
        path: origin.to_string(),
        line,
        message,
    };

    let mut preset: Option<(PresetChoice, usize)> = None;
    let mut assignments = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(line_no, format!("expected 'key = value', got '{line}'")));
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(err(line_no, "empty key".into()));
        }
        if value.is_empty() {
            return Err(err(line_no, format!("key '{key}' has no value")));
        }

        match key {
            "pattern" => {
                let label: PatternLabel = value
                    .parse()
                    .map_err(|e: SimError| err(line_no, e.to_string()))?;
                set_preset(&mut preset, PresetChoice::Pattern(label), line_no, origin)?;
            }
            "preset" => {
                if value != "sweep-default" {
                    return Err(err(
                        line_no,
                        format!("unknown preset '{value}' (expected 'sweep-default')"),
                    ));
                }
                set_preset(&mut preset, PresetChoice::SweepDefault, line_no, origin)?;
            }
            _ => {
                if !is_known_key(key) {
                    return Err(err(line_no, format!("unknown key '{key}'")));
                }
                assignments.push(Assignment {
                    key: key.to_string(),
                    value: value.to_string(),
                    line: line_no,
                });
            }
        }
    }

    Ok(RawConfig {
        path: origin.to_string(),
        preset: preset.map(|(c, _)| c),
        assignments,
    })
}

fn set_preset(
    slot: &mut Option<(PresetChoice, usize)>,
    choice: PresetChoice,
    line: usize,
    origin: &str,
) -> Result<(), ConfigError> {
    if let Some((_, first_line)) = slot {
        return Err(ConfigError::Parse {
            path: origin.to_string(),
            line,
            message: format!(
                "'pattern' and 'preset' are mutually exclusive and may appear once \
                 (already set on line {first_line})"
            ),
        });
    }
    *slot = Some((choice, line));
    Ok(())
}

impl RawConfig {
    /// Turn the parsed file into validated parameters. `override_pattern`
    /// (from the command line) replaces the file's preset choice.
    pub fn resolve(
        &self,
        override_pattern: Option<PatternLabel>,
    ) -> Result<(SimParams, Option<PresetChoice>), ConfigError> {
        let choice = override_pattern
            .map(PresetChoice::Pattern)
            .or(self.preset);

        let mut params = match choice {
            Some(PresetChoice::Pattern(label)) => {
                let mut p = SimParams::baseline();
                pattern_preset(label).apply(&mut p);
                p
            }
            Some(PresetChoice::SweepDefault) => SimParams::sweep_default(),
            None => SimParams::baseline(),
        };

        for a in &self.assignments {
            apply_key(&mut params, &a.key, &a.value).map_err(|message| ConfigError::Parse {
                path: self.path.clone(),
                line: a.line,
                message,
            })?;
        }

        let params = params.validated()?;
        Ok((params, choice))
    }
}

/// Load and resolve a config file in one call.
pub fn load_config(
    path: &Path,
    override_pattern: Option<PatternLabel>,
) -> Result<(SimParams, Option<PresetChoice>), ConfigError> {
    parse_file(path)?.resolve(override_pattern)
}

const KNOWN_KEYS: &[&str] = &[
    "n_prey",
    "dims",
    "alpha",
    "beta",
    "delta",
    "k_friction",
    "p_exp",
    "q_exp",
    "r_crit",
    "r1_flee",
    "r2_hunt",
    "theta1",
    "theta2",
    "gamma1",
    "gamma2",
    "m_catch",
    "sigma_prey",
    "sigma_pred",
    "dt",
    "t_max",
    "v_max",
    "strategy",
    "eps_dist",
    "t_max_school",
    "cap_prey_velocity",
    "half_width",
    "spawn_dist",
    "link_dist",
    "scatter_ratio",
    "reunion_ratio",
    "maintain_tol",
];

fn is_known_key(key: &str) -> bool {
    KNOWN_KEYS.contains(&key)
}

fn apply_key(p: &mut SimParams, key: &str, value: &str) -> Result<(), String> {
    fn real(v: &str) -> Result<f64, String> {
        v.parse()
            .map_err(|_| format!("expected a number, got '{v}'"))
    }
    fn integer(v: &str) -> Result<usize, String> {
        v.parse()
            .map_err(|_| format!("expected a nonnegative integer, got '{v}'"))
    }
    fn boolean(v: &str) -> Result<bool, String> {
        match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(format!("expected 'true' or 'false', got '{v}'")),
        }
    }

    match key {
        "n_prey" => p.n_prey = integer(value)?,
        "dims" => p.dims = integer(value)?,
        "alpha" => p.alpha = real(value)?,
        "beta" => p.beta = real(value)?,
        "delta" => p.delta = real(value)?,
        "k_friction" => p.k_friction = real(value)?,
        "p_exp" => p.p_exp = real(value)?,
        "q_exp" => p.q_exp = real(value)?,
        "r_crit" => p.r_crit = real(value)?,
        "r1_flee" => p.r1_flee = real(value)?,
        "r2_hunt" => p.r2_hunt = real(value)?,
        "theta1" => p.theta1 = real(value)?,
        "theta2" => p.theta2 = real(value)?,
        "gamma1" => p.gamma1 = real(value)?,
        "gamma2" => p.gamma2 = real(value)?,
        "m_catch" => p.m_catch = real(value)?,
        "sigma_prey" => p.sigma_prey = real(value)?,
        "sigma_pred" => p.sigma_pred = real(value)?,
        "dt" => p.dt = real(value)?,
        "t_max" => p.t_max = integer(value)?,
        "v_max" => p.v_max = real(value)?,
        "strategy" => p.strategy = value.parse().map_err(|e: SimError| e.to_string())?,
        "eps_dist" => p.eps_dist = real(value)?,
        "t_max_school" => p.t_max_school = integer(value)?,
        "cap_prey_velocity" => p.cap_prey_velocity = boolean(value)?,
        "half_width" => p.half_width = Some(real(value)?),
        "spawn_dist" => p.spawn_dist = Some(real(value)?),
        "link_dist" => p.link_dist = Some(real(value)?),
        "scatter_ratio" => p.scatter_ratio = real(value)?,
        "reunion_ratio" => p.reunion_ratio = real(value)?,
        "maintain_tol" => p.maintain_tol = real(value)?,
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}
