//! School-level observables and the evasion-pattern classifier.
//!
//! Every quantity here is computed over living prey only; dead rows are
//! invisible. The diameter follows the source model's convention: the
//! largest distance from the school center to a member, not the largest
//! pairwise distance.

use std::fmt;

use crate::error::SimError;
use crate::params::SimParams;
use crate::state::SwarmState;
use crate::survival::TrialRecord;
use crate::vecmath::dist;

/// Mean position and mean velocity of the living prey.
pub fn school_center(state: &SwarmState) -> Result<(Vec<f64>, Vec<f64>), SimError> {
    let n = state.n_alive();
    if n == 0 {
        return Err(SimError::NoAlivePrey);
    }
    let dims = state.dims();
    let mut xc = vec![0.0; dims];
    let mut vc = vec![0.0; dims];
    for i in state.alive_indices() {
        let x = state.position(i);
        let v = state.velocity(i);
        for k in 0..dims {
            xc[k] += x[k];
            vc[k] += v[k];
        }
    }
    for k in 0..dims {
        xc[k] /= n as f64;
        vc[k] /= n as f64;
    }
    Ok((xc, vc))
}

/// Largest distance from the school center to a living prey.
pub fn school_diameter(state: &SwarmState) -> Result<f64, SimError> {
    let (xc, _) = school_center(state)?;
    let mut sup: f64 = 0.0;
    for i in state.alive_indices() {
        sup = sup.max(dist(state.position(i), &xc));
    }
    Ok(sup)
}

/// Root mean square deviation of living-prey velocities from their mean.
pub fn velocity_std(state: &SwarmState) -> Result<f64, SimError> {
    let (_, vc) = school_center(state)?;
    let n = state.n_alive();
    let dims = state.dims();
    let mut acc = 0.0;
    for i in state.alive_indices() {
        let v = state.velocity(i);
        for k in 0..dims {
            let d = v[k] - vc[k];
            acc += d * d;
        }
    }
    Ok((acc / n as f64).sqrt())
}

/// Number of connected components of the proximity graph on living prey,
/// where two prey are linked when their distance is at most `link_dist`.
/// Zero when no prey live.
pub fn count_subgroups(state: &SwarmState, link_dist: f64) -> usize {
    let alive: Vec<usize> = state.alive_indices().collect();
    if alive.is_empty() {
        return 0;
    }
    let mut uf = UnionFind::new(alive.len());
    for a in 0..alive.len() {
        for b in (a + 1)..alive.len() {
            if dist(state.position(alive[a]), state.position(alive[b])) <= link_dist {
                uf.union(a, b);
            }
        }
    }
    uf.component_count()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn component_count(&mut self) -> usize {
        let n = self.parent.len();
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

/// Classifier verdict over one pursuit's metric series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    SplitReunion,
    SplitTwoGroups,
    Scattered,
    MaintainFormation,
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::SplitReunion => "split-reunion",
            Classification::SplitTwoGroups => "split-two-groups",
            Classification::Scattered => "scattered",
            Classification::MaintainFormation => "maintain-formation",
            Classification::Unclassified => "unclassified",
        };
        write!(f, "{s}")
    }
}

/// Label a pursuit from its diameter and subgroup-count series.
///
/// Rules, checked in order against the thresholds in `params`:
/// scattered (final diameter above `scatter_ratio` times initial and more
/// than two final groups), split-reunion (groups reached two or more and
/// came back to one, with the final diameter under `reunion_ratio` times
/// initial), split-two-groups (ends at exactly two groups), and
/// maintain-formation (never split, final diameter within `maintain_tol`
/// of initial). Anything else is unclassified.
///
/// The velocity-spread series is part of the interface for symmetry with
/// the recorded metrics but the current rules do not consult it.
pub fn classify_pattern(
    diam_series: &[f64],
    _vstd_series: &[f64],
    group_series: &[usize],
    params: &SimParams,
) -> Classification {
    if diam_series.len() < 2 || group_series.len() != diam_series.len() {
        return Classification::Unclassified;
    }
    let d0 = diam_series[0];
    let d_end = *diam_series.last().unwrap();
    let g_end = *group_series.last().unwrap();
    let split_happened = group_series[1..].iter().any(|&g| g >= 2);

    if d_end > params.scatter_ratio * d0 && g_end > 2 {
        return Classification::Scattered;
    }
    if split_happened && g_end == 1 && d_end < params.reunion_ratio * d0 {
        return Classification::SplitReunion;
    }
    if g_end == 2 {
        return Classification::SplitTwoGroups;
    }
    if !split_happened && (d_end - d0).abs() <= params.maintain_tol * d0 {
        return Classification::MaintainFormation;
    }
    Classification::Unclassified
}

/// Classify straight from a trial record's metric series.
pub fn classify_record(rec: &TrialRecord, params: &SimParams) -> Classification {
    let diam: Vec<f64> = rec.metrics.iter().map(|m| m.diameter).collect();
    let vstd: Vec<f64> = rec.metrics.iter().map(|m| m.velocity_std).collect();
    let groups: Vec<usize> = rec.metrics.iter().map(|m| m.n_groups).collect();
    classify_pattern(&diam, &vstd, &groups, params)
}
