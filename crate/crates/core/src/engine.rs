//! Drives the growing-graph walk: exact distribution evolution across
//! phases, return-probability series, Monte Carlo trajectory sampling, and
//! hitting-time experiments.
//!
//! Exact evolution is linear algebra, never sampling; Monte Carlo exists to
//! cross-validate it and to reach regimes past the state cap via the lumped
//! projections.

use crate::error::{Error, Result};
use crate::families::TransitionFamily;
use crate::matrix::SparseStochasticMatrix;
use crate::numeric::Scalar;
use crate::schedule::DurationSchedule;
use crate::state::{Parity, StateIndex, ORIGIN};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Identifier of the walker RNG recorded in run metadata. Walker `w` draws
/// from stream `w` of a counter-based generator seeded by the run seed, so
/// results do not depend on the thread count.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Distributions over state spaces at most this large are stored densely.
pub const DENSE_LIMIT: usize = 1 << 16;

/// Whether to evolve the full chain or its exact lumped projection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionMode {
    Full,
    Lumped,
}

impl EvolutionMode {
    fn build<T: Scalar>(
        self,
        family: &TransitionFamily,
        n: u32,
    ) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
        match self {
            EvolutionMode::Full => family.build(n),
            EvolutionMode::Lumped => family.build_lumped(n),
        }
    }
}

#[derive(Clone, Debug)]
enum Values<T> {
    Dense(Vec<T>),
    /// Sorted by index.
    Sparse(Vec<(u32, T)>),
}

/// A probability vector over a `StateIndex`, tracking the level it lives on
/// and the parity of the step count that produced it.
#[derive(Clone, Debug)]
pub struct DistributionVector<T> {
    values: Values<T>,
    dim: usize,
    level: u32,
    steps: u64,
}

impl<T: Scalar> DistributionVector<T> {
    pub fn point_mass(dim: usize, index: u32, level: u32) -> Self {
        let values = if dim <= DENSE_LIMIT {
            let mut v = vec![T::zero(); dim];
            v[index as usize] = T::one();
            Values::Dense(v)
        } else {
            Values::Sparse(vec![(index, T::one())])
        };
        DistributionVector { values, dim, level, steps: 0 }
    }

    pub fn from_dense(values: Vec<T>, level: u32, steps: u64) -> Self {
        let dim = values.len();
        DistributionVector { values: Values::Dense(values), dim, level, steps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn parity(&self) -> Parity {
        Parity::of_steps(self.steps)
    }

    pub fn get(&self, index: u32) -> T {
        match &self.values {
            Values::Dense(v) => v[index as usize].clone(),
            Values::Sparse(entries) => match entries.binary_search_by_key(&index, |e| e.0) {
                Ok(k) => entries[k].1.clone(),
                Err(_) => T::zero(),
            },
        }
    }

    pub fn mass(&self) -> T {
        match &self.values {
            Values::Dense(v) => v.iter().fold(T::zero(), |a, x| a + x.clone()),
            Values::Sparse(entries) => entries.iter().fold(T::zero(), |a, (_, x)| a + x.clone()),
        }
    }

    pub fn to_dense(&self) -> Vec<T> {
        match &self.values {
            Values::Dense(v) => v.clone(),
            Values::Sparse(entries) => {
                let mut v = vec![T::zero(); self.dim];
                for (i, x) in entries {
                    v[*i as usize] = x.clone();
                }
                v
            }
        }
    }

    pub fn iter_nonzero(&self) -> Vec<(u32, T)> {
        match &self.values {
            Values::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i as u32, x.clone()))
                .collect(),
            Values::Sparse(entries) => entries.clone(),
        }
    }
}

/// One transition `x P`. Mass is conserved exactly in rational mode and to
/// roundoff in f64.
pub fn evolve_step<T: Scalar>(
    x: &DistributionVector<T>,
    p: &SparseStochasticMatrix<T>,
) -> Result<DistributionVector<T>> {
    if x.dim != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x.dim });
    }
    let values = match &x.values {
        Values::Dense(v) => Values::Dense(p.apply_left(v)?),
        Values::Sparse(entries) => {
            let mut out = Vec::new();
            p.apply_left_sparse(entries, &mut out);
            Values::Sparse(out)
        }
    };
    Ok(DistributionVector { values, dim: x.dim, level: x.level, steps: x.steps + 1 })
}

/// Re-index a distribution into the next level's state space; mass on new
/// states is zero and total mass is preserved exactly.
pub fn lift_level<T: Scalar>(
    x: &DistributionVector<T>,
    from: &StateIndex,
    to: &StateIndex,
) -> Result<DistributionVector<T>> {
    if x.dim != from.len() {
        return Err(Error::DimensionMismatch { expected: from.len(), got: x.dim });
    }
    let map = from.embed_into(to)?;
    let dim = to.len();
    let values = if dim <= DENSE_LIMIT {
        let mut v = vec![T::zero(); dim];
        for (i, val) in x.iter_nonzero() {
            v[map[i as usize] as usize] = val;
        }
        Values::Dense(v)
    } else {
        let mut entries: Vec<(u32, T)> =
            x.iter_nonzero().into_iter().map(|(i, val)| (map[i as usize], val)).collect();
        entries.sort_by_key(|e| e.0);
        Values::Sparse(entries)
    };
    Ok(DistributionVector { values, dim, level: to.level(), steps: x.steps })
}

/// Return-probability series `R(t)`, its partial sums
/// `S(T) = sum_{t=1..T} R(t)`, the phase governing each time step, and the
/// phase boundaries crossed during the run.
#[derive(Clone, Debug)]
pub struct ReturnSeries<T> {
    pub r: Vec<T>,
    pub s: Vec<T>,
    /// `phase[t]` is the phase whose matrix drives the transition out of `t`.
    pub phase: Vec<u32>,
    /// `(n, T_n)` for every phase completed within the horizon.
    pub boundaries: Vec<(u32, u64)>,
}

impl<T: Scalar> ReturnSeries<T> {
    pub fn horizon(&self) -> u64 {
        (self.r.len() - 1) as u64
    }

    pub fn to_f64(&self) -> ReturnSeries<f64> {
        ReturnSeries {
            r: self.r.iter().map(Scalar::to_f64).collect(),
            s: self.s.iter().map(Scalar::to_f64).collect(),
            phase: self.phase.clone(),
            boundaries: self.boundaries.clone(),
        }
    }

    /// Boundary time `T_n` of a completed phase.
    pub fn boundary_time(&self, n: u32) -> Option<u64> {
        self.boundaries.iter().find(|(m, _)| *m == n).map(|(_, t)| *t)
    }

    /// Sum of `R(t)` over `t in (T_{n-1}, T_n]` for a completed phase `n`.
    pub fn phase_increment(&self, n: u32) -> Option<T> {
        let t_end = self.boundary_time(n)?;
        let t_start = if n == 1 { 0 } else { self.boundary_time(n - 1)? };
        let mut acc = T::zero();
        for t in (t_start + 1)..=t_end {
            acc = acc + self.r[t as usize].clone();
        }
        Some(acc)
    }
}

impl ReturnSeries<f64> {
    /// CSV with columns `t, R, S, phase`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,R,S,phase\n");
        for t in 0..self.r.len() {
            out.push_str(&format!("{t},{},{},{}\n", self.r[t], self.s[t], self.phase[t]));
        }
        out
    }
}

/// Run metadata echoed into JSON next to a series.
#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub artifact_version: String,
    pub family: String,
    pub schedule: String,
    pub horizon: u64,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walkers: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub state_cap: u64,
    pub rng_algorithm: String,
    pub timestamp_unix: u64,
}

/// The level in effect at each time step and the phase boundaries crossed.
/// Explicit schedules that run out keep the walk on their final level (a
/// static tail), so a truncated list means "stop growing".
struct LevelPlan {
    /// `level_at[t]` for `t = 0..=horizon`.
    level_at: Vec<u32>,
    boundaries: Vec<(u32, u64)>,
    max_level: u32,
}

const MAX_STALLED_PHASES: u32 = 1_000_000;

fn plan_levels(schedule: &DurationSchedule, horizon: u64) -> Result<LevelPlan> {
    let mut level_at = Vec::with_capacity(horizon as usize + 1);
    let mut boundaries = Vec::new();
    let mut t = 0u64;
    let mut phase = 1u32;
    loop {
        let dur = match schedule.eval(phase) {
            Ok(d) => d,
            Err(Error::ScheduleIndexOutOfRange { .. }) => {
                let tail_level = phase.saturating_sub(1).max(1);
                while t <= horizon {
                    level_at.push(tail_level);
                    t += 1;
                }
                return Ok(LevelPlan { level_at, boundaries, max_level: tail_level });
            }
            Err(e) => return Err(e),
        };
        let remaining = (horizon + 1).saturating_sub(t);
        let steps = dur.min(remaining);
        for _ in 0..steps {
            level_at.push(phase);
            t += 1;
        }
        if steps < dur || t > horizon {
            // Horizon hit mid-phase, or the phase ends one step past the
            // last recorded time; either way no boundary lies in range.
            return Ok(LevelPlan { level_at, boundaries, max_level: phase });
        }
        boundaries.push((phase, t));
        if phase > horizon as u32 + MAX_STALLED_PHASES {
            return Err(Error::InvalidParameter(
                "schedule stalls: too many consecutive zero-duration phases".into(),
            ));
        }
        phase += 1;
    }
}

/// The level in effect at each `t = 0..=horizon` (the phase whose matrix
/// drives the transition out of `t`), for callers that pace trajectories
/// against a schedule.
pub fn level_profile(schedule: &DurationSchedule, horizon: u64) -> Result<Vec<u32>> {
    Ok(plan_levels(schedule, horizon)?.level_at)
}

/// Exact `R(t)` for `t = 0..=horizon` by phase-wise evolution: evolve under
/// `P(n)` during phase `n` and re-index at phase boundaries (consecutively
/// for zero-duration phases).
pub fn run_exact<T: Scalar>(
    family: &TransitionFamily,
    schedule: &DurationSchedule,
    horizon: u64,
    mode: EvolutionMode,
) -> Result<ReturnSeries<T>> {
    let plan = plan_levels(schedule, horizon)?;
    let mut level = plan.level_at[0];
    let (mut idx, mut p) = mode.build::<T>(family, level)?;
    let mut x = DistributionVector::point_mass(idx.len(), ORIGIN, level);
    let mut r = Vec::with_capacity(horizon as usize + 1);
    let mut s = Vec::with_capacity(horizon as usize + 1);
    r.push(x.get(ORIGIN));
    s.push(T::zero());
    for t in 0..horizon {
        let target = plan.level_at[t as usize];
        while level < target {
            level += 1;
            let (next_idx, next_p) = mode.build::<T>(family, level)?;
            x = lift_level(&x, &idx, &next_idx)?;
            idx = next_idx;
            p = next_p;
        }
        x = evolve_step(&x, &p)?;
        let rt = x.get(ORIGIN);
        s.push(s[t as usize].clone() + rt.clone());
        r.push(rt);
    }
    Ok(ReturnSeries { r, s, phase: plan.level_at, boundaries: plan.boundaries })
}

/// Exact series of the time-homogeneous walk on the level-`n` graph.
pub fn run_static<T: Scalar>(
    family: &TransitionFamily,
    n: u32,
    horizon: u64,
    mode: EvolutionMode,
) -> Result<ReturnSeries<T>> {
    let (idx, p) = mode.build::<T>(family, n)?;
    let mut x = DistributionVector::point_mass(idx.len(), ORIGIN, n);
    let mut r = Vec::with_capacity(horizon as usize + 1);
    let mut s = Vec::with_capacity(horizon as usize + 1);
    r.push(x.get(ORIGIN));
    s.push(T::zero());
    for t in 0..horizon {
        x = evolve_step(&x, &p)?;
        let rt = x.get(ORIGIN);
        s.push(s[t as usize].clone() + rt.clone());
        r.push(rt);
    }
    Ok(ReturnSeries { r, s, phase: vec![n; horizon as usize + 1], boundaries: Vec::new() })
}

/// Matrices and embeddings for every level touched by a walker run.
struct WalkerWorld {
    min_level: u32,
    matrices: Vec<(StateIndex, SparseStochasticMatrix<f64>)>,
    /// `embeddings[i]` maps level `min_level+i` into level `min_level+i+1`.
    embeddings: Vec<Vec<u32>>,
}

impl WalkerWorld {
    fn prepare(family: &TransitionFamily, plan: &LevelPlan, mode: EvolutionMode) -> Result<Self> {
        let min_level = plan.level_at[0];
        let mut matrices = Vec::new();
        for n in min_level..=plan.max_level {
            matrices.push(mode.build::<f64>(family, n)?);
        }
        let mut embeddings = Vec::new();
        for w in matrices.windows(2) {
            embeddings.push(w[0].0.embed_into(&w[1].0)?);
        }
        Ok(WalkerWorld { min_level, matrices, embeddings })
    }

    fn matrix(&self, level: u32) -> &SparseStochasticMatrix<f64> {
        &self.matrices[(level - self.min_level) as usize].1
    }

    fn index(&self, level: u32) -> &StateIndex {
        &self.matrices[(level - self.min_level) as usize].0
    }

    fn embed(&self, level: u32, state: u32) -> u32 {
        self.embeddings[(level - self.min_level) as usize][state as usize]
    }
}

fn sample_row(p: &SparseStochasticMatrix<f64>, state: u32, u: f64) -> u32 {
    let mut acc = 0.0;
    let mut last = state;
    for (c, v) in p.row(state as usize) {
        acc += *v;
        last = c;
        if u < acc {
            return c;
        }
    }
    last
}

/// Empirical return frequencies from independent walkers; reproducible for
/// a fixed seed. The per-time standard error is at most `1/(2 sqrt(w))`.
pub fn run_monte_carlo(
    family: &TransitionFamily,
    schedule: &DurationSchedule,
    horizon: u64,
    walkers: u64,
    seed: u64,
    mode: EvolutionMode,
) -> Result<ReturnSeries<f64>> {
    if walkers < 1 {
        return Err(Error::InvalidParameter("walker count must be >= 1".into()));
    }
    let plan = plan_levels(schedule, horizon)?;
    let world = WalkerWorld::prepare(family, &plan, mode)?;
    let len = horizon as usize + 1;

    let counts: Vec<u64> = (0..walkers)
        .into_par_iter()
        .fold(
            || vec![0u64; len],
            |mut acc, w| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(w);
                let mut level = plan.level_at[0];
                let mut state = ORIGIN;
                acc[0] += 1;
                for t in 0..horizon {
                    let target = plan.level_at[t as usize];
                    while level < target {
                        state = world.embed(level, state);
                        level += 1;
                    }
                    state = sample_row(world.matrix(level), state, rng.random::<f64>());
                    if state == ORIGIN {
                        acc[(t + 1) as usize] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; len],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );

    let w = walkers as f64;
    let r: Vec<f64> = counts.iter().map(|&c| c as f64 / w).collect();
    let mut s = Vec::with_capacity(len);
    s.push(0.0);
    for t in 1..len {
        s.push(s[t - 1] + r[t]);
    }
    Ok(ReturnSeries { r, s, phase: plan.level_at, boundaries: plan.boundaries })
}

/// First-hitting-time samples for a walk started at the origin, censored at
/// the horizon. The target is a state key; it cannot be hit before the walk
/// has grown to a level where the key exists.
pub fn hitting_experiment(
    family: &TransitionFamily,
    schedule: &DurationSchedule,
    target_key: u128,
    trials: u64,
    seed: u64,
    horizon: u64,
) -> Result<Vec<Option<u64>>> {
    let plan = plan_levels(schedule, horizon)?;
    let world = WalkerWorld::prepare(family, &plan, EvolutionMode::Full)?;
    let targets: Vec<Option<u32>> = (world.min_level..=plan.max_level)
        .map(|n| world.index(n).index_of(target_key))
        .collect();
    if targets.iter().all(Option::is_none) {
        return Err(Error::InvalidParameter(
            "target state does not exist at any level within the horizon".into(),
        ));
    }

    let hits: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let mut level = plan.level_at[0];
            let mut state = ORIGIN;
            let target_at = |lv: u32| targets[(lv - world.min_level) as usize];
            if target_at(level) == Some(state) {
                return Some(0);
            }
            for t in 0..horizon {
                let target = plan.level_at[t as usize];
                while level < target {
                    state = world.embed(level, state);
                    level += 1;
                }
                state = sample_row(world.matrix(level), state, rng.random::<f64>());
                if target_at(level) == Some(state) {
                    return Some(t + 1);
                }
            }
            None
        })
        .collect();
    Ok(hits)
}
