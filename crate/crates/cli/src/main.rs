//! `shoal`: a stochastic predator-prey schooling simulator.
//!
//! Subcommands: `school` settles a predator-free school, `run` executes
//! one full pursuit trial, `sweep` runs Monte Carlo batches over school
//! sizes, and `metrics` recomputes per-step summaries from a recorded
//! trajectory. Exit codes: 0 success, 1 configuration or I/O problems,
//! 2 numerical divergence at runtime.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::Rng as _;

use shoal_cli::config::{self, ConfigError, PresetChoice};
use shoal_cli::manifest::{manifest_path_for, RunManifest};
use shoal_cli::output::{self, CsvError, MetricsRow};
use shoal_core::{
    count_subgroups, generate_school, install_worker_limit, run_trial, school_diameter,
    sweep_school_size, velocity_std, NoiseSource, PatternLabel, SimError, SimParams, Strategy,
    SwarmState,
};

#[derive(Parser)]
#[command(
    name = "shoal",
    version,
    about = "Simulate a prey school evading a predator",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Parameter file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Base RNG seed. Drawn from system entropy and logged when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory: `run` writes into it, other subcommands resolve
    /// relative --out paths against it.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Limit on concurrent trial workers (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Suppress informational stderr output.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Settle a predator-free school and write it as CSV.
    School {
        /// Output CSV path (columns id, x1.., v1..).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,

        /// Built-in preset: I, II, III, IV, or custom (use the config
        /// as-is). Overrides the config file's choice.
        #[arg(long, value_name = "I|II|III|IV|custom")]
        pattern: Option<String>,
    },

    /// Run one full trial and record trajectory and survival series.
    Run {
        /// Built-in preset: I, II, III, IV, or custom (use the config
        /// as-is). Overrides the config file's choice.
        #[arg(long, value_name = "I|II|III|IV|custom")]
        pattern: Option<String>,

        /// Steps between recorded trajectory frames.
        #[arg(long, default_value_t = 1, value_name = "STEPS")]
        record_every: usize,
    },

    /// Monte Carlo sweep over school sizes.
    Sweep {
        /// Output CSV path for the statistics table.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,

        /// Comma-separated school sizes, e.g. 1,5,20,100.
        #[arg(long, value_delimiter = ',', required = true, value_name = "N,...")]
        n_list: Vec<usize>,

        /// Trials per school size.
        #[arg(long, default_value_t = 200)]
        trials: usize,

        /// Attack strategy rows to produce: center, nearest, or both
        /// (default: the configured strategy).
        #[arg(long, value_name = "center|nearest|both")]
        strategy: Option<String>,
    },

    /// Recompute per-step metrics from a recorded trajectory.
    Metrics {
        /// Trajectory CSV produced by `run`.
        #[arg(long, value_name = "FILE")]
        trajectory: PathBuf,

        /// Output CSV path.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Config(ConfigError),
    Csv(CsvError),
    Sim(SimError),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Csv(e) => e.fmt(f),
            CliError::Sim(e) => e.fmt(f),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Sim(SimError::Diverged { .. }) | CliError::Sim(SimError::NoAlivePrey) => 2,
            _ => 1,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}
impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Csv(e)
    }
}
impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Sim(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::School { out, pattern } => cmd_school(&cli, out.clone(), pattern.as_deref()),
        Cmd::Run {
            pattern,
            record_every,
        } => cmd_run(&cli, pattern.as_deref(), *record_every),
        Cmd::Sweep {
            out,
            n_list,
            trials,
            strategy,
        } => cmd_sweep(&cli, out.clone(), n_list, *trials, strategy.as_deref()),
        Cmd::Metrics { trajectory, out } => cmd_metrics(&cli, trajectory.clone(), out.clone()),
    }
}

/// Parse a --pattern value; "custom" (or absence) means no override.
fn pattern_override(arg: Option<&str>) -> Result<Option<PatternLabel>, CliError> {
    match arg {
        None | Some("custom") => Ok(None),
        Some(s) => s
            .parse::<PatternLabel>()
            .map(Some)
            .map_err(CliError::Sim),
    }
}

/// Resolve parameters from the config file, preset override, and
/// defaults described in the subcommand help. Returns the params and the
/// preset label for the manifest.
fn load_params(
    config: Option<&Path>,
    pattern: Option<PatternLabel>,
    default_preset: Option<PresetChoice>,
) -> Result<(SimParams, String), CliError> {
    let (params, choice) = match config {
        Some(path) => config::load_config(path, pattern)?,
        None => {
            let choice = pattern.map(PresetChoice::Pattern).or(default_preset);
            let params = match choice {
                Some(PresetChoice::Pattern(label)) => SimParams::for_pattern(label),
                Some(PresetChoice::SweepDefault) => SimParams::sweep_default(),
                None => SimParams::baseline(),
            };
            (params.validated().map_err(ConfigError::from)?, choice)
        }
    };
    let label = choice.map_or_else(|| "custom".to_string(), |c| c.to_string());
    Ok((params, label))
}

/// Use the given seed, or draw one from system entropy and log it.
fn resolve_seed(cli: &Cli) -> u64 {
    match cli.seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::rng().random();
            if !cli.quiet {
                eprintln!("seed: {s} (from system entropy; pass --seed {s} to reproduce)");
            }
            s
        }
    }
}

/// Resolve an --out path against the global --out-dir.
fn resolve_out(cli: &Cli, out: PathBuf) -> PathBuf {
    match (&cli.out_dir, out.is_relative()) {
        (Some(dir), true) => dir.join(out),
        _ => out,
    }
}

fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

fn cmd_school(cli: &Cli, out: PathBuf, pattern: Option<&str>) -> Result<(), CliError> {
    let started = Instant::now();
    let (params, preset) = load_params(
        cli.config.as_deref(),
        pattern_override(pattern)?,
        None,
    )?;
    let seed = resolve_seed(cli);

    let mut src = NoiseSource::new(seed);
    let school = generate_school(&params, &mut src)?;

    let out = resolve_out(cli, out);
    output::write_school(&school, &out)?;
    if !cli.quiet {
        eprintln!(
            "school: {} prey settled over {} steps, diameter {:.3}",
            school.n_alive(),
            params.t_max_school,
            school_diameter(&school)?
        );
    }

    let manifest_path = manifest_path_for(&out, false);
    RunManifest {
        tool_version: tool_version(),
        subcommand: "school".into(),
        preset,
        seed: Some(seed),
        params,
        duration_secs: started.elapsed().as_secs_f64(),
        inputs: vec![],
        outputs: vec![
            out.display().to_string(),
            manifest_path.display().to_string(),
        ],
    }
    .write(&manifest_path)?;
    Ok(())
}

fn cmd_run(cli: &Cli, pattern: Option<&str>, record_every: usize) -> Result<(), CliError> {
    let started = Instant::now();
    if record_every == 0 {
        return Err(CliError::Usage("--record-every must be at least 1".into()));
    }
    let Some(dir) = cli.out_dir.clone() else {
        return Err(CliError::Usage("run requires --out-dir".into()));
    };
    let (params, preset) = load_params(
        cli.config.as_deref(),
        pattern_override(pattern)?,
        None,
    )?;
    let seed = resolve_seed(cli);

    let record = run_trial(&params, seed, 0, record_every, true)?;

    let trajectory = dir.join("trajectory.csv");
    let survival = dir.join("survival.csv");
    output::write_trajectory(&record, &trajectory)?;
    output::write_survival(&record, &survival)?;
    if !cli.quiet {
        eprintln!(
            "run: {} of {} prey survived to step {}",
            record.n_survived.last().copied().unwrap_or(0),
            record.n_initial,
            record.t_max
        );
    }

    let manifest_path = manifest_path_for(&dir, true);
    RunManifest {
        tool_version: tool_version(),
        subcommand: "run".into(),
        preset,
        seed: Some(seed),
        params,
        duration_secs: started.elapsed().as_secs_f64(),
        inputs: vec![],
        outputs: vec![
            trajectory.display().to_string(),
            survival.display().to_string(),
            manifest_path.display().to_string(),
        ],
    }
    .write(&manifest_path)?;
    Ok(())
}

fn cmd_sweep(
    cli: &Cli,
    out: PathBuf,
    n_list: &[usize],
    trials: usize,
    strategy: Option<&str>,
) -> Result<(), CliError> {
    let started = Instant::now();
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if let Some(&bad) = n_list.iter().find(|&&n| n == 0) {
        return Err(CliError::Usage(format!(
            "--n-list entries must be at least 1, got {bad}"
        )));
    }

    let (base, preset) = load_params(
        cli.config.as_deref(),
        None,
        Some(PresetChoice::SweepDefault),
    )?;
    let strategies: Vec<Strategy> = match strategy {
        None => vec![base.strategy],
        Some("both") => vec![Strategy::CenterAttack, Strategy::NearestAttack],
        Some(s) => vec![s.parse().map_err(CliError::Sim)?],
    };
    let seed = resolve_seed(cli);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    install_worker_limit(cli.jobs, || {
        for &strat in &strategies {
            let mut params = base.clone();
            params.strategy = strat;
            let table = sweep_school_size(&params, n_list, trials, seed);
            rows.extend(table.rows);
            failures.extend(table.failures);
        }
    });

    if !cli.quiet {
        for row in &rows {
            eprintln!(
                "sweep: n={} strategy={} trials={} p_eaten_mean={:.4} t_alive_mean={:.1}",
                row.n_prey, row.strategy, row.n_trials, row.p_eaten_mean, row.t_alive_mean
            );
        }
    }
    if !failures.is_empty() {
        eprintln!(
            "warning: {} of {} trials diverged and were excluded",
            failures.len(),
            strategies.len() * n_list.len() * trials
        );
        for f in failures.iter().take(5) {
            eprintln!("  n={} trial={}: {}", f.n_prey, f.trial, f.error);
        }
    }

    let out = resolve_out(cli, out);
    output::write_sweep(&rows, &out)?;

    let manifest_path = manifest_path_for(&out, false);
    RunManifest {
        tool_version: tool_version(),
        subcommand: "sweep".into(),
        preset,
        seed: Some(seed),
        params: base,
        duration_secs: started.elapsed().as_secs_f64(),
        inputs: vec![],
        outputs: vec![
            out.display().to_string(),
            manifest_path.display().to_string(),
        ],
    }
    .write(&manifest_path)?;
    Ok(())
}

fn cmd_metrics(cli: &Cli, trajectory: PathBuf, out: PathBuf) -> Result<(), CliError> {
    let started = Instant::now();
    let (params, preset) = load_params(cli.config.as_deref(), None, None)?;
    let traj = output::read_trajectory(&trajectory)?;

    // A prey's eaten step is the first recorded step where it appears
    // dead; exact when the trajectory was recorded every step, otherwise
    // rounded up to the recording cadence.
    let n = traj.n_prey;
    let mut eaten_step: Vec<Option<usize>> = vec![None; n];
    for frame in &traj.frames {
        for (i, &alive) in frame.alive.iter().enumerate() {
            if !alive && eaten_step[i].is_none() {
                eaten_step[i] = Some(frame.step);
            }
        }
    }

    let link_dist = params.resolved_link_dist();
    let mut rows = Vec::with_capacity(traj.frames.len());
    for frame in &traj.frames {
        let mut state = SwarmState::new(traj.dims, frame.positions.clone(), frame.velocities.clone());
        for (i, &alive) in frame.alive.iter().enumerate() {
            if !alive {
                state.mark_eaten(i);
            }
        }
        let n_survived = state.n_alive();
        let (diameter, vstd) = if n_survived > 0 {
            (school_diameter(&state)?, velocity_std(&state)?)
        } else {
            (0.0, 0.0)
        };
        let lived: usize = eaten_step
            .iter()
            .map(|e| match e {
                Some(step) if *step <= frame.step => *step,
                _ => frame.step,
            })
            .sum();
        rows.push(MetricsRow {
            step: frame.step,
            diameter,
            velocity_std: vstd,
            n_groups: count_subgroups(&state, link_dist),
            n_survived,
            p_eaten: (n - n_survived) as f64 / n as f64,
            t_bar_alive: lived as f64 / n as f64,
        });
    }

    let out = resolve_out(cli, out);
    output::write_metrics(&rows, &out)?;
    if !cli.quiet {
        eprintln!(
            "metrics: {} frames, final p_eaten {:.4}",
            rows.len(),
            rows.last().map_or(0.0, |r| r.p_eaten)
        );
    }

    let manifest_path = manifest_path_for(&out, false);
    RunManifest {
        tool_version: tool_version(),
        subcommand: "metrics".into(),
        preset,
        seed: None,
        params,
        duration_secs: started.elapsed().as_secs_f64(),
        inputs: vec![trajectory.display().to_string()],
        outputs: vec![
            out.display().to_string(),
            manifest_path.display().to_string(),
        ],
    }
    .write(&manifest_path)?;
    Ok(())
}
