//! CSV artifacts: the settled school, per-step trajectories, survival
//! series, sweep tables, and recomputed metrics.
//!
//! Floats are rendered with 17 significant digits so that parsing a file
//! back yields bit-identical values.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use shoal_core::{SweepRow, SwarmState, TrialRecord};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CsvError + '_ {
    move |source| CsvError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Render a float with enough digits to round-trip exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn open_writer(path: &Path) -> Result<BufWriter<File>, CsvError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(io_err(path))?;
        }
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn axis_headers(prefix: &str, dims: usize) -> String {
    (1..=dims)
        .map(|k| format!("{prefix}{k}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn float_fields(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_float(x)).collect::<Vec<_>>().join(",")
}

/// Settled school: one row per prey with position and velocity.
pub fn write_school(state: &SwarmState, path: &Path) -> Result<(), CsvError> {
    let mut w = open_writer(path)?;
    let dims = state.dims();
    let err = io_err(path);
    writeln!(w, "id,{},{}", axis_headers("x", dims), axis_headers("v", dims)).map_err(&err)?;
    for i in 0..state.len() {
        writeln!(
            w,
            "{},{},{}",
            i,
            float_fields(state.position(i)),
            float_fields(state.velocity(i))
        )
        .map_err(&err)?;
    }
    w.flush().map_err(&err)
}

/// Recorded frames: one row per agent per recorded step. Prey keep their
/// ids 0..N-1; the predator takes agent id N. Eaten prey stay in the
/// file with `alive` false and their values frozen at the moment of
/// death.
pub fn write_trajectory(rec: &TrialRecord, path: &Path) -> Result<(), CsvError> {
    let mut w = open_writer(path)?;
    let dims = rec.dims;
    let err = io_err(path);
    writeln!(
        w,
        "step,agent_id,kind,alive,{},{}",
        axis_headers("x", dims),
        axis_headers("v", dims)
    )
    .map_err(&err)?;
    for frame in &rec.frames {
        let n = frame.alive.len();
        for i in 0..n {
            writeln!(
                w,
                "{},{},prey,{},{},{}",
                frame.step,
                i,
                frame.alive[i],
                float_fields(&frame.positions[i * dims..(i + 1) * dims]),
                float_fields(&frame.velocities[i * dims..(i + 1) * dims]),
            )
            .map_err(&err)?;
        }
        writeln!(
            w,
            "{},{},predator,true,{},{}",
            frame.step,
            n,
            float_fields(&frame.pred_position),
            float_fields(&frame.pred_velocity),
        )
        .map_err(&err)?;
    }
    w.flush().map_err(&err)
}

/// Survivor count at every step, 0..=t_max.
pub fn write_survival(rec: &TrialRecord, path: &Path) -> Result<(), CsvError> {
    let mut w = open_writer(path)?;
    let err = io_err(path);
    writeln!(w, "step,n_survived").map_err(&err)?;
    for (step, n) in rec.n_survived.iter().enumerate() {
        writeln!(w, "{step},{n}").map_err(&err)?;
    }
    w.flush().map_err(&err)
}

/// Sweep statistics, one row per (school size, strategy) batch.
pub fn write_sweep(rows: &[SweepRow], path: &Path) -> Result<(), CsvError> {
    let mut w = open_writer(path)?;
    let err = io_err(path);
    writeln!(
        w,
        "n,strategy,trials,p_eaten_mean,p_eaten_std,p_eaten_q25,p_eaten_q50,p_eaten_q75,\
         t_alive_mean,t_alive_std,n_eaten_mean"
    )
    .map_err(&err)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n_prey,
            r.strategy,
            r.n_trials,
            fmt_float(r.p_eaten_mean),
            fmt_float(r.p_eaten_std),
            fmt_float(r.p_eaten_q25),
            fmt_float(r.p_eaten_q50),
            fmt_float(r.p_eaten_q75),
            fmt_float(r.t_alive_mean),
            fmt_float(r.t_alive_std),
            fmt_float(r.n_eaten_mean),
        )
        .map_err(&err)?;
    }
    w.flush().map_err(&err)
}

/// Per-step summary derived from a trajectory file.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub step: usize,
    pub diameter: f64,
    pub velocity_std: f64,
    pub n_groups: usize,
    pub n_survived: usize,
    pub p_eaten: f64,
    /// Mean living time over all prey if the run had ended at this step
    /// (eaten prey keep their eaten step, survivors take the current
    /// step); at the final step this is the trial's average living time.
    pub t_bar_alive: f64,
}

pub fn write_metrics(rows: &[MetricsRow], path: &Path) -> Result<(), CsvError> {
    let mut w = open_writer(path)?;
    let err = io_err(path);
    writeln!(
        w,
        "step,diameter,velocity_std,n_groups,n_survived,p_eaten,t_bar_alive"
    )
    .map_err(&err)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.step,
            fmt_float(r.diameter),
            fmt_float(r.velocity_std),
            r.n_groups,
            r.n_survived,
            fmt_float(r.p_eaten),
            fmt_float(r.t_bar_alive),
        )
        .map_err(&err)?;
    }
    w.flush().map_err(&err)
}

/// One recorded step read back from a trajectory file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFrame {
    pub step: usize,
    /// Flattened N x dims prey positions in agent-id order.
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub alive: Vec<bool>,
    pub pred_position: Vec<f64>,
    pub pred_velocity: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dims: usize,
    pub n_prey: usize,
    pub frames: Vec<TrajectoryFrame>,
}

/// Parse a file produced by [`write_trajectory`]. Rows must be grouped
/// by step with prey in id order followed by the predator row, which is
/// how the writer lays them out.
pub fn read_trajectory(path: &Path) -> Result<Trajectory, CsvError> {
    let file = File::open(path).map_err(io_err(path))?;
    let reader = BufReader::new(file);
    let fail = |line: usize, message: String| CsvError::Format {
        path: path.display().to_string(),
        line,
        message,
    };

    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| fail(1, "empty file".into()))?;
    let header = header.map_err(io_err(path))?;
    let cols: Vec<&str> = header.split(',').collect();
    let n_x = cols.iter().filter(|c| c.starts_with('x')).count();
    let n_v = cols.iter().filter(|c| c.starts_with('v')).count();
    if cols.len() < 6 || n_x != n_v || n_x == 0 || cols[..4] != ["step", "agent_id", "kind", "alive"] {
        return Err(fail(1, format!("unrecognized trajectory header '{header}'")));
    }
    let dims = n_x;

    let mut frames: Vec<TrajectoryFrame> = Vec::new();
    let mut current: Option<TrajectoryFrame> = None;

    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.map_err(io_err(path))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 + 2 * dims {
            return Err(fail(
                line_no,
                format!("expected {} fields, got {}", 4 + 2 * dims, fields.len()),
            ));
        }
        let step: usize = fields[0]
            .parse()
            .map_err(|_| fail(line_no, format!("bad step '{}'", fields[0])))?;
        let kind = fields[2];
        let alive = match fields[3] {
            "true" => true,
            "false" => false,
            other => return Err(fail(line_no, format!("bad alive flag '{other}'"))),
        };
        let mut nums = Vec::with_capacity(2 * dims);
        for f in &fields[4..] {
            nums.push(
                f.parse::<f64>()
                    .map_err(|_| fail(line_no, format!("bad number '{f}'")))?,
            );
        }
        let (pos, vel) = nums.split_at(dims);

        if current.as_ref().is_some_and(|f| f.step != step) {
            frames.push(current.take().unwrap());
        }
        let frame = current.get_or_insert_with(|| TrajectoryFrame {
            step,
            positions: Vec::new(),
            velocities: Vec::new(),
            alive: Vec::new(),
            pred_position: Vec::new(),
            pred_velocity: Vec::new(),
        });

        match kind {
            "prey" => {
                frame.positions.extend_from_slice(pos);
                frame.velocities.extend_from_slice(vel);
                frame.alive.push(alive);
            }
            "predator" => {
                frame.pred_position = pos.to_vec();
                frame.pred_velocity = vel.to_vec();
            }
            other => return Err(fail(line_no, format!("unknown agent kind '{other}'"))),
        }
    }
    if let Some(f) = current.take() {
        frames.push(f);
    }
    if frames.is_empty() {
        return Err(fail(2, "trajectory has no data rows".into()));
    }

    let n_prey = frames[0].alive.len();
    for f in &frames {
        if f.alive.len() != n_prey || f.pred_position.len() != dims {
            return Err(fail(
                2,
                format!("inconsistent frame at step {}", f.step),
            ));
        }
    }

    Ok(Trajectory {
        dims,
        n_prey,
        frames,
    })
}
