//! Two-compartment gas of neutrons separated by a spin-active mirror.
//!
//! Every step each surviving particle hits the mirror once from the side it is
//! on, and the outcome is drawn from the channel probabilities of that side and
//! spin. Walls preserve spin and side. Macro-states are `(compartment, spin)`;
//! a nonzero circulation around
//! `(I,+) → (II,+) → (II,−) → (I,−) → (I,+)` marks broken detailed balance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::spin::Spin;
use crate::stack::ScatteringSolution;

/// Per-row tolerance on probability sums.
pub const ROW_TOLERANCE: f64 = 1e-9;

/// Fraction of the run used for steady-state averages.
pub const STEADY_FRACTION: f64 = 0.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VesselError {
    #[error("negative probability {value:e} for {side:?} side, incident {spin:?}")]
    NegativeProbability { side: Side, spin: Spin, value: f64 },
    #[error("channel probabilities for {side:?} side, incident {spin:?} sum to {sum}")]
    RowSum { side: Side, spin: Spin, sum: f64 },
    #[error("solutions were computed at different k ({0} vs {1})")]
    MismatchedK(f64, f64),
    #[error("need at least {min} {what}, got {got}")]
    TooSmall { what: &'static str, min: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Compartment I.
    Left,
    /// Compartment II.
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Outcome probabilities for one (side, incident spin).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelProbabilities {
    pub transmit_no_flip: f64,
    pub transmit_flip: f64,
    pub reflect_no_flip: f64,
    pub reflect_flip: f64,
    pub absorb: f64,
}

impl ChannelProbabilities {
    pub fn sum(&self) -> f64 {
        self.transmit_no_flip + self.transmit_flip + self.reflect_no_flip + self.reflect_flip + self.absorb
    }

    fn as_array(&self) -> [f64; 5] {
        [self.transmit_no_flip, self.transmit_flip, self.reflect_no_flip, self.reflect_flip, self.absorb]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorChannelTable {
    rows: [[ChannelProbabilities; 2]; 2],
}

impl MirrorChannelTable {
    /// Validates non-negativity and unit row sums.
    pub fn new(rows: [[ChannelProbabilities; 2]; 2]) -> Result<Self, VesselError> {
        for side in Side::BOTH {
            for spin in Spin::BOTH {
                let row = &rows[side.index()][spin.index()];
                if let Some(&value) = row.as_array().iter().find(|&&p| p < 0.0 || !p.is_finite()) {
                    return Err(VesselError::NegativeProbability { side, spin, value });
                }
                let sum = row.sum();
                if (sum - 1.0).abs() > ROW_TOLERANCE {
                    return Err(VesselError::RowSum { side, spin, sum });
                }
            }
        }
        Ok(Self { rows })
    }

    /// Builds the table from left-incident solutions of the mirror and of its mirror image.
    ///
    /// `right` must be the solution for the stack traversed in reverse order
    /// (or the helix with reversed rotation), so its "reflection" is the reflection
    /// back into compartment II.
    pub fn from_solutions(left: &ScatteringSolution, right: &ScatteringSolution) -> Result<Self, VesselError> {
        if left.k != right.k {
            return Err(VesselError::MismatchedK(left.k, right.k));
        }
        let mut rows = [[ChannelProbabilities::default(); 2]; 2];
        for (side, sol) in [(Side::Left, left), (Side::Right, right)] {
            let (rp, tp) = (sol.reflection_probabilities(), sol.transmission_probabilities());
            for spin in Spin::BOTH {
                let flip = spin.flipped();
                let mut row = ChannelProbabilities {
                    transmit_no_flip: tp.get(spin, spin),
                    transmit_flip: tp.get(flip, spin),
                    reflect_no_flip: rp.get(spin, spin),
                    reflect_flip: rp.get(flip, spin),
                    absorb: 0.0,
                };
                let absorb = 1.0 - row.sum();
                if absorb < -ROW_TOLERANCE {
                    return Err(VesselError::NegativeProbability { side, spin, value: absorb });
                }
                row.absorb = absorb.max(0.0);
                rows[side.index()][spin.index()] = row;
            }
        }
        Self::new(rows)
    }

    /// Spin-independent mirror with transmission probability `t` and no absorption.
    pub fn spin_blind(transmission: f64) -> Result<Self, VesselError> {
        let row = ChannelProbabilities {
            transmit_no_flip: transmission,
            reflect_no_flip: 1.0 - transmission,
            ..Default::default()
        };
        Self::new([[row; 2]; 2])
    }

    pub fn row(&self, side: Side, spin: Spin) -> &ChannelProbabilities {
        &self.rows[side.index()][spin.index()]
    }

    /// No row loses more than rounding (`ROW_TOLERANCE`) to absorption.
    pub fn is_lossless(&self) -> bool {
        self.rows.iter().flatten().all(|r| r.absorb <= ROW_TOLERANCE)
    }
}

/// Index of a macro-state: `2·compartment + spin`.
pub fn macro_state(side: Side, spin: Spin) -> usize {
    2 * side.index() + spin.index()
}

/// The four loop edges `(I,+)→(II,+)→(II,−)→(I,−)→(I,+)`.
pub const LOOP_EDGES: [(usize, usize); 4] = [(0, 2), (2, 3), (3, 1), (1, 0)];

#[derive(Debug, Clone, PartialEq)]
pub struct VesselReport {
    pub n_particles: usize,
    pub n_steps: usize,
    pub seed: u64,
    /// `transitions[a][b]`: number of mirror encounters taking state `a` to `b`.
    pub transitions: [[u64; 4]; 4],
    pub absorbed: u64,
    /// Mean fraction of particles in each macro-state over the steady window.
    pub state_occupancy: [f64; 4],
    /// Fraction of surviving particles in compartments I and II over the steady window.
    pub compartment_occupancy: [f64; 2],
    pub compartment_occupancy_sigma: f64,
    /// `(n₊ − n₋)/n` per compartment over the steady window.
    pub polarization: [f64; 2],
    pub polarization_sigma: [f64; 2],
    /// Change in compartment-I occupancy between the two halves of the steady window.
    pub occupancy_drift: f64,
    pub cycle_current: f64,
    pub cycle_current_sigma: f64,
}

impl VesselReport {
    /// Net flux `N(a→b) − N(b→a)` along each loop edge.
    pub fn loop_net_flux(&self) -> [i64; 4] {
        LOOP_EDGES.map(|(a, b)| self.transitions[a][b] as i64 - self.transitions[b][a] as i64)
    }

    pub fn cycle_significance(&self) -> f64 {
        if self.cycle_current_sigma > 0.0 {
            self.cycle_current / self.cycle_current_sigma
        } else if self.cycle_current == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone)]
struct Tally {
    transitions: [[u64; 4]; 4],
    absorbed: u64,
    /// Occupation of each macro-state after each step.
    occupancy: Vec<[u64; 4]>,
}

impl Tally {
    fn new(n_steps: usize) -> Self {
        Self { transitions: [[0; 4]; 4], absorbed: 0, occupancy: vec![[0; 4]; n_steps] }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for a in 0..4 {
            for b in 0..4 {
                self.transitions[a][b] += other.transitions[a][b];
            }
        }
        self.absorbed += other.absorbed;
        for (mine, theirs) in self.occupancy.iter_mut().zip(&other.occupancy) {
            for s in 0..4 {
                mine[s] += theirs[s];
            }
        }
        self
    }
}

/// Index of the channel selected by a uniform draw `x`; rounding overshoot goes to the last open channel.
fn pick_channel(p: &[f64; 5], x: f64) -> usize {
    let mut acc = 0.0;
    let mut last_open = 0;
    for (i, &pi) in p.iter().enumerate() {
        if pi > 0.0 {
            last_open = i;
        }
        acc += pi;
        if x < acc {
            return i;
        }
    }
    last_open
}

fn run_particle(table: &MirrorChannelTable, n_steps: usize, seed: u64, index: u64, tally: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    // homogeneous, unpolarised start
    let mut side = if rng.random::<bool>() { Side::Left } else { Side::Right };
    let mut spin = if rng.random::<bool>() { Spin::Up } else { Spin::Down };
    for step in 0..n_steps {
        let from = macro_state(side, spin);
        let row = table.row(side, spin);
        match pick_channel(&row.as_array(), rng.random()) {
            0 => side = side.other(),
            1 => {
                side = side.other();
                spin = spin.flipped();
            }
            2 => {}
            3 => spin = spin.flipped(),
            _ => {
                tally.absorbed += 1;
                return;
            }
        }
        tally.transitions[from][macro_state(side, spin)] += 1;
        tally.occupancy[step][macro_state(side, spin)] += 1;
    }
}

/// Runs the vessel for `n_particles` independent trajectories of `n_steps` mirror encounters.
///
/// Trajectory `i` draws from ChaCha stream `i` of `seed`, so the counters are
/// identical for a given seed regardless of thread scheduling.
pub fn run_vessel(
    table: &MirrorChannelTable,
    n_particles: usize,
    n_steps: usize,
    seed: u64,
) -> Result<VesselReport, VesselError> {
    if n_particles < 1000 {
        return Err(VesselError::TooSmall { what: "particles", min: 1000, got: n_particles });
    }
    if n_steps < 100 {
        return Err(VesselError::TooSmall { what: "steps", min: 100, got: n_steps });
    }

    let tally = (0..n_particles as u64)
        .into_par_iter()
        .fold(
            || Tally::new(n_steps),
            |mut t, i| {
                run_particle(table, n_steps, seed, i, &mut t);
                t
            },
        )
        .reduce(|| Tally::new(n_steps), Tally::merge);

    Ok(summarize(tally, n_particles, n_steps, seed))
}

fn summarize(tally: Tally, n_particles: usize, n_steps: usize, seed: u64) -> VesselReport {
    let window = ((n_steps as f64 * STEADY_FRACTION).round() as usize).max(2);
    let start = n_steps - window;
    let steady = &tally.occupancy[start..];

    let mean_over = |rows: &[[u64; 4]]| -> [f64; 4] {
        let mut acc = [0.0; 4];
        for row in rows {
            for s in 0..4 {
                acc[s] += row[s] as f64;
            }
        }
        acc.map(|v| v / rows.len() as f64)
    };
    let counts = mean_over(steady);
    let alive: f64 = counts.iter().sum();
    let state_occupancy = counts.map(|c| c / n_particles as f64);

    let in_comp = [counts[0] + counts[1], counts[2] + counts[3]];
    let compartment_occupancy = in_comp.map(|c| if alive > 0.0 { c / alive } else { 0.0 });
    // single-snapshot binomial spreads; the window average can only be tighter
    let compartment_occupancy_sigma = if alive > 0.0 {
        let f = compartment_occupancy[0];
        (f * (1.0 - f) / alive).sqrt().max(0.5 / alive)
    } else {
        0.0
    };
    let mut polarization = [0.0; 2];
    let mut polarization_sigma = [0.0; 2];
    for c in 0..2 {
        let (up, down) = (counts[2 * c], counts[2 * c + 1]);
        let n = up + down;
        if n > 0.0 {
            polarization[c] = (up - down) / n;
            polarization_sigma[c] = ((1.0 - polarization[c].powi(2)) / n).sqrt().max(1.0 / n);
        }
    }

    let half = steady.len() / 2;
    let frac_i = |rows: &[[u64; 4]]| {
        let m = mean_over(rows);
        let tot: f64 = m.iter().sum();
        if tot > 0.0 { (m[0] + m[1]) / tot } else { 0.0 }
    };
    let occupancy_drift = frac_i(&steady[half..]) - frac_i(&steady[..half]);

    let total_steps = (n_particles * n_steps) as f64;
    let mut net = 0.0;
    let mut var = 0.0;
    for (a, b) in LOOP_EDGES {
        let (fwd, bwd) = (tally.transitions[a][b] as f64, tally.transitions[b][a] as f64);
        net += fwd - bwd;
        var += fwd + bwd;
    }
    let edges = LOOP_EDGES.len() as f64;

    VesselReport {
        n_particles,
        n_steps,
        seed,
        transitions: tally.transitions,
        absorbed: tally.absorbed,
        state_occupancy,
        compartment_occupancy,
        compartment_occupancy_sigma,
        polarization,
        polarization_sigma,
        occupancy_drift,
        cycle_current: net / edges / total_steps,
        cycle_current_sigma: var.sqrt() / edges / total_steps,
    }
}
