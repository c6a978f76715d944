//! Agent state containers.
//!
//! Prey are stored in flat row-major buffers with one row per prey, alive
//! or dead. Rows are never compacted: a prey's index is its identity for
//! the whole run, which keeps eaten-time attribution and recorded output
//! stable. Dead rows are frozen in place and excluded from every force
//! sum and statistic.

use serde::{Deserialize, Serialize};

/// Positions, velocities, and liveness of the prey school.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmState {
    dims: usize,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    alive: Vec<bool>,
}

impl SwarmState {
    /// Build a state from flat coordinate buffers (`n * dims` each).
    /// All prey start alive.
    ///
    /// # Panics
    /// If the buffer lengths are not equal multiples of `dims`.
    pub fn new(dims: usize, positions: Vec<f64>, velocities: Vec<f64>) -> Self {
        assert!(dims == 2 || dims == 3, "dims must be 2 or 3");
        assert_eq!(positions.len() % dims, 0, "position buffer not a multiple of dims");
        assert_eq!(positions.len(), velocities.len(), "position/velocity length mismatch");
        let n = positions.len() / dims;
        SwarmState {
            dims,
            positions,
            velocities,
            alive: vec![true; n],
        }
    }

    /// Prey at rest: `n` rows of zeros.
    pub fn at_rest(n: usize, dims: usize, positions: Vec<f64>) -> Self {
        let len = positions.len();
        assert_eq!(len, n * dims);
        SwarmState::new(dims, positions, vec![0.0; len])
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Total number of rows, dead ones included.
    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn n_alive(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    pub fn alive_flags(&self) -> &[bool] {
        &self.alive
    }

    /// Indices of living prey, ascending.
    pub fn alive_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter_map(|(i, &a)| a.then_some(i))
    }

    pub fn position(&self, i: usize) -> &[f64] {
        &self.positions[i * self.dims..(i + 1) * self.dims]
    }

    pub fn velocity(&self, i: usize) -> &[f64] {
        &self.velocities[i * self.dims..(i + 1) * self.dims]
    }

    pub fn position_mut(&mut self, i: usize) -> &mut [f64] {
        let d = self.dims;
        &mut self.positions[i * d..(i + 1) * d]
    }

    pub fn velocity_mut(&mut self, i: usize) -> &mut [f64] {
        let d = self.dims;
        &mut self.velocities[i * d..(i + 1) * d]
    }

    pub fn positions_flat(&self) -> &[f64] {
        &self.positions
    }

    pub fn velocities_flat(&self) -> &[f64] {
        &self.velocities
    }

    /// Simultaneous mutable access to both coordinate buffers, for the
    /// integrators that advance positions from velocities in one pass.
    pub(crate) fn buffers_mut(&mut self) -> (&mut [f64], &mut [f64], &[bool]) {
        (&mut self.positions, &mut self.velocities, &self.alive)
    }

    /// Kill prey `i`. Its row freezes at the current values; liveness
    /// never flips back.
    pub fn mark_eaten(&mut self, i: usize) {
        self.alive[i] = false;
    }

    /// Drop the given rows entirely, reindexing the rest. Intended for
    /// tests that compare against a state with dead rows removed.
    pub fn without_rows(&self, drop: &[usize]) -> SwarmState {
        let d = self.dims;
        let mut positions = Vec::new();
        let mut velocities = Vec::new();
        let mut alive = Vec::new();
        for i in 0..self.len() {
            if drop.contains(&i) {
                continue;
            }
            positions.extend_from_slice(self.position(i));
            velocities.extend_from_slice(self.velocity(i));
            alive.push(self.alive[i]);
        }
        SwarmState {
            dims: d,
            positions,
            velocities,
            alive,
        }
    }
}

/// The single predator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredatorState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl PredatorState {
    pub fn new(position: Vec<f64>, velocity: Vec<f64>) -> Self {
        assert_eq!(position.len(), velocity.len());
        PredatorState { position, velocity }
    }

    pub fn at_rest(position: Vec<f64>) -> Self {
        let v = vec![0.0; position.len()];
        PredatorState::new(position, v)
    }

    pub fn dims(&self) -> usize {
        self.position.len()
    }
}
