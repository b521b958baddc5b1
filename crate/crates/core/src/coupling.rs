//! Monotone couplings witnessing the less-homesick-as-graph-growing
//! property, and its exact verification through the engine.
//!
//! Every coupling is a shared-randomness step: both walkers invert their own
//! one-step distribution against one common uniform, with outcomes ordered
//! (toward origin, hold, away). Under the families' dominance preconditions
//! the faster-growing walker then stays at least as far from the origin
//! pathwise, almost surely, not merely on average. A deliberately broken
//! mode anti-aligns the second walker's uniform to make the negative
//! control meaningful.

use crate::engine::{level_profile, run_exact, EvolutionMode, ReturnSeries};
use crate::error::{Error, Result};
use crate::families::{AxisBound, FamilyKind, LevelProfile, TransitionFamily};
use crate::numeric::Rational64;
use crate::schedule::DurationSchedule;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// One-step distribution of a scalar distance-from-origin summary.
#[derive(Clone, Copy, Debug)]
struct StepDist {
    down: f64,
    hold: f64,
}

impl StepDist {
    fn apply(&self, u: f64) -> i32 {
        if u < self.down {
            -1
        } else if u < self.down + self.hold {
            0
        } else {
            1
        }
    }
}

/// Shared-uniform pair step; the broken mode inverts the second walker's
/// uniform, preserving marginals but destroying monotonicity.
fn pair_step(dx: StepDist, dy: StepDist, u: f64, mode: CouplingMode) -> (i32, i32) {
    let uy = match mode {
        CouplingMode::Monotone => u,
        CouplingMode::Broken => 1.0 - u,
    };
    (dx.apply(u), dy.apply(uy))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingMode {
    Monotone,
    /// Negative control: marginally correct, pathwise wrong.
    Broken,
}

fn tree_dist(h: u32, n: u32, k: u32, lambda: Rational64) -> StepDist {
    if h == 0 {
        StepDist { down: 0.0, hold: 0.0 }
    } else if h == n {
        StepDist { down: 1.0, hold: 0.0 }
    } else {
        let lf = *lambda.numer() as f64 / *lambda.denom() as f64;
        StepDist { down: lf / (lf + k as f64), hold: 0.0 }
    }
}

fn cube_dist(w: u32, n: u32) -> StepDist {
    StepDist { down: w as f64 / n as f64, hold: 0.0 }
}

fn level_dist(h: u32, n: u32, profile: &LevelProfile, gamma: Rational64) -> StepDist {
    let g = *gamma.numer() as f64 / *gamma.denom() as f64;
    let down = if h == 0 {
        0.0
    } else if h == n {
        1.0 - g
    } else {
        (1.0 - g) / crate::families::leveltree::leveltree_degree(profile, n, h) as f64
    };
    StepDist { down, hold: g }
}

/// Magnitude step of one box coordinate with bound `b`, conditional on its
/// axis being the one drawn.
fn axis_dist(c: i64, b: i64) -> StepDist {
    if c == 0 {
        StepDist { down: 0.0, hold: 0.0 }
    } else if c.abs() == b {
        StepDist { down: 1.0, hold: 0.0 }
    } else {
        StepDist { down: 0.5, hold: 0.0 }
    }
}

fn check_dominance(hx: u32, hy: u32, nx: u32, ny: u32) -> Result<()> {
    if hx < hy || nx < ny {
        return Err(Error::InvalidParameter(format!(
            "dominance precondition violated: need hX >= hY and nX >= nY, got ({hx},{hy}) at levels ({nx},{ny})"
        )));
    }
    Ok(())
}

/// One coupled height transition of two tree walks at levels `nx >= ny`,
/// preserving `hX' >= hY'`; requires `lambda < k`.
pub fn coupled_step_tree(
    hx: u32,
    hy: u32,
    nx: u32,
    ny: u32,
    k: u32,
    lambda: Rational64,
    u: f64,
) -> Result<(u32, u32)> {
    if lambda >= Rational64::new(k as i64, 1) {
        return Err(Error::InvalidParameter(format!(
            "tree coupling requires lambda < k, got lambda={lambda}, k={k}"
        )));
    }
    check_dominance(hx, hy, nx, ny)?;
    let (mx, my) = pair_step(tree_dist(hx, nx, k, lambda), tree_dist(hy, ny, k, lambda), u, CouplingMode::Monotone);
    Ok(((hx as i32 + mx) as u32, (hy as i32 + my) as u32))
}

/// One coupled Hamming-weight transition of two cube walks in dimensions
/// `nx >= ny`: down-probabilities `wx/nx <= wy/ny`, one shared uniform.
pub fn coupled_step_cube(wx: u32, wy: u32, nx: u32, ny: u32, u: f64) -> Result<(u32, u32)> {
    check_dominance(wx, wy, nx, ny)?;
    let (mx, my) = pair_step(cube_dist(wx, nx), cube_dist(wy, ny), u, CouplingMode::Monotone);
    Ok(((wx as i32 + mx) as u32, (wy as i32 + my) as u32))
}

/// One coupled height transition of two level-tree walks. Busy walks need
/// equal step parity (`gamma = 0`); lazy walks additionally cover height
/// gaps of one and require `gamma >= 1/2`.
pub fn coupled_step_leveltree(
    hx: u32,
    hy: u32,
    nx: u32,
    ny: u32,
    profile: &LevelProfile,
    gamma: Rational64,
    u: f64,
) -> Result<(u32, u32)> {
    let g = gamma;
    if g > Rational64::new(0, 1) && g < Rational64::new(1, 2) {
        return Err(Error::UnsupportedGamma { gamma: *g.numer() as f64 / *g.denom() as f64 });
    }
    check_dominance(hx, hy, nx, ny)?;
    let (mx, my) =
        pair_step(level_dist(hx, nx, profile, g), level_dist(hy, ny, profile, g), u, CouplingMode::Monotone);
    Ok(((hx as i32 + mx) as u32, (hy as i32 + my) as u32))
}

/// One coupled box transition: both walkers move on the same drawn axis,
/// magnitudes coupled through the shared uniform, `sign_up` resolving the
/// direction of moves away from zero. Preserves `|X_i| >= |Y_i]` per axis.
pub fn coupled_step_box(
    x: &mut [i64],
    y: &mut [i64],
    bounds_x: &[i64],
    bounds_y: &[i64],
    axis: usize,
    u: f64,
    sign_up: i64,
) -> Result<()> {
    if x.len() != y.len() || axis >= x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len().max(axis + 1) });
    }
    if x[axis].abs() < y[axis].abs() || bounds_x[axis] < bounds_y[axis] {
        return Err(Error::InvalidParameter(
            "dominance precondition violated: need |X_i| >= |Y_i| and b_X >= b_Y".into(),
        ));
    }
    let (mx, my) =
        pair_step(axis_dist(x[axis], bounds_x[axis]), axis_dist(y[axis], bounds_y[axis]), u, CouplingMode::Monotone);
    x[axis] += magnitude_move(x[axis], mx, sign_up);
    y[axis] += magnitude_move(y[axis], my, sign_up);
    Ok(())
}

fn magnitude_move(c: i64, m: i32, sign_up: i64) -> i64 {
    match m {
        -1 => -c.signum(),
        1 => {
            if c == 0 {
                sign_up
            } else {
                c.signum()
            }
        }
        _ => 0,
    }
}

/// A coupled scalar trace, dumped when a trajectory violates dominance.
#[derive(Clone, Debug, Default)]
pub struct CouplingTrace {
    pub rows: Vec<TraceRow>,
}

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub t: u64,
    pub h_x: i64,
    pub h_y: i64,
    pub case_label: &'static str,
    pub u: f64,
}

impl CouplingTrace {
    /// CSV with columns `t, hX, hY, case_label, uniform_draw`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,hX,hY,case_label,uniform_draw\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.t, row.h_x, row.h_y, row.case_label, row.u
            ));
        }
        out
    }
}

/// Outcome of a dominance verification; `pass` iff the violation measure is
/// within tolerance (trajectory mode counts violations against zero).
#[derive(Clone, Debug, Serialize)]
pub struct DominanceReport {
    pub family: String,
    pub schedule_fast: String,
    pub schedule_slow: String,
    pub mode: String,
    pub horizon: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub trials: u64,
    pub violations: u64,
    pub pass: bool,
}

/// Checks the prefix-sum precondition through the effective level
/// functions: the fast schedule must sit at a level at least the slow
/// schedule's at every time within the horizon.
fn check_prefix_levels(levels_fast: &[u32], levels_slow: &[u32]) -> Result<()> {
    for (t, (nf, ng)) in levels_fast.iter().zip(levels_slow).enumerate() {
        if nf < ng {
            return Err(Error::PrefixConditionViolated { phase: levels_slow[t] });
        }
    }
    Ok(())
}

/// The authoritative dominance check: exact return series under both
/// schedules, reporting `max_t (R_fast(t) - R_slow(t))`. The lumped
/// projection is used where available.
pub fn verify_lhagg_exact(
    family: &TransitionFamily,
    fast: &DurationSchedule,
    slow: &DurationSchedule,
    horizon: u64,
    tolerance: f64,
) -> Result<DominanceReport> {
    let levels_fast = level_profile(fast, horizon)?;
    let levels_slow = level_profile(slow, horizon)?;
    check_prefix_levels(&levels_fast, &levels_slow)?;
    let mode = if family.lumpable() { EvolutionMode::Lumped } else { EvolutionMode::Full };
    let rf: ReturnSeries<f64> = run_exact(family, fast, horizon, mode)?;
    let rg: ReturnSeries<f64> = run_exact(family, slow, horizon, mode)?;
    let max_violation = rf
        .r
        .iter()
        .zip(&rg.r)
        .map(|(a, b)| a - b)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DominanceReport {
        family: family.descriptor(),
        schedule_fast: fast.descriptor().to_string(),
        schedule_slow: slow.descriptor().to_string(),
        mode: "exact".into(),
        horizon,
        max_violation,
        tolerance,
        trials: 0,
        violations: 0,
        pass: max_violation <= tolerance,
    })
}

enum CoupledKind<'a> {
    Heights { k: u32, lambda: Rational64 },
    Weights,
    Levels { profile: &'a LevelProfile, gamma: Rational64 },
    Coords { bounds: Vec<AxisBound> },
}

impl CoupledKind<'_> {
    fn of(family: &TransitionFamily) -> Result<CoupledKind<'_>> {
        match family.kind() {
            FamilyKind::KaryTree { k, lambda } | FamilyKind::HeightPath { k, lambda } => {
                if *lambda >= Rational64::new(*k as i64, 1) {
                    return Err(Error::InvalidParameter(format!(
                        "tree coupling requires lambda < k, got lambda={lambda}, k={k}"
                    )));
                }
                Ok(CoupledKind::Heights { k: *k, lambda: *lambda })
            }
            FamilyKind::Hypercube => Ok(CoupledKind::Weights),
            FamilyKind::LevelTree { profile, gamma } => {
                if *gamma > Rational64::new(0, 1) && *gamma < Rational64::new(1, 2) {
                    return Err(Error::UnsupportedGamma {
                        gamma: *gamma.numer() as f64 / *gamma.denom() as f64,
                    });
                }
                Ok(CoupledKind::Levels { profile, gamma: *gamma })
            }
            FamilyKind::Box { d } => {
                Ok(CoupledKind::Coords { bounds: vec![AxisBound::Linear(1); *d as usize] })
            }
            FamilyKind::GenBox { bounds } => Ok(CoupledKind::Coords { bounds: bounds.clone() }),
            FamilyKind::Star { .. } => Err(Error::InvalidParameter(
                "no trajectory coupling for stars; use the exact verification".into(),
            )),
        }
    }
}

struct TrialOutcome {
    violations: u64,
    first_violation_t: Option<u64>,
}

fn run_scalar_trial(
    kind: &CoupledKind,
    levels_fast: &[u32],
    levels_slow: &[u32],
    horizon: u64,
    rng: &mut ChaCha8Rng,
    mode: CouplingMode,
    mut trace: Option<&mut CouplingTrace>,
) -> TrialOutcome {
    match kind {
        CoupledKind::Coords { bounds } => {
            let d = bounds.len();
            let mut x = vec![0i64; d];
            let mut y = vec![0i64; d];
            let mut outcome = TrialOutcome { violations: 0, first_violation_t: None };
            for t in 0..horizon {
                let nx = levels_fast[t as usize];
                let ny = levels_slow[t as usize];
                let axis = rng.random_range(0..d);
                let u: f64 = rng.random();
                let sign_up: i64 = if rng.random::<bool>() { 1 } else { -1 };
                let bx = bounds[axis].eval(nx) as i64;
                let by = bounds[axis].eval(ny) as i64;
                let (mx, my) = pair_step(axis_dist(x[axis], bx), axis_dist(y[axis], by), u, mode);
                x[axis] += magnitude_move(x[axis], mx, sign_up);
                y[axis] += magnitude_move(y[axis], my, sign_up);
                let violated = x.iter().zip(&y).any(|(a, b)| a.abs() < b.abs());
                if let Some(tr) = trace.as_deref_mut() {
                    tr.rows.push(TraceRow {
                        t: t + 1,
                        h_x: x[axis].abs(),
                        h_y: y[axis].abs(),
                        case_label: if violated { "violation" } else { "axis-step" },
                        u,
                    });
                }
                if violated {
                    outcome.violations += 1;
                    outcome.first_violation_t.get_or_insert(t + 1);
                }
            }
            outcome
        }
        _ => {
            let mut hx = 0u32;
            let mut hy = 0u32;
            let mut outcome = TrialOutcome { violations: 0, first_violation_t: None };
            for t in 0..horizon {
                let nx = levels_fast[t as usize];
                let ny = levels_slow[t as usize];
                let u: f64 = rng.random();
                let (dx, dy, label) = match kind {
                    CoupledKind::Heights { k, lambda } => (
                        tree_dist(hx, nx, *k, *lambda),
                        tree_dist(hy, ny, *k, *lambda),
                        tree_case_label(hx, hy, nx, ny),
                    ),
                    CoupledKind::Weights => {
                        (cube_dist(hx, nx), cube_dist(hy, ny), tree_case_label(hx, hy, nx, ny))
                    }
                    CoupledKind::Levels { profile, gamma } => (
                        level_dist(hx, nx, profile, *gamma),
                        level_dist(hy, ny, profile, *gamma),
                        tree_case_label(hx, hy, nx, ny),
                    ),
                    CoupledKind::Coords { .. } => unreachable!(),
                };
                let (mx, my) = pair_step(dx, dy, u, mode);
                hx = (hx as i32 + mx) as u32;
                hy = (hy as i32 + my) as u32;
                if let Some(tr) = trace.as_deref_mut() {
                    tr.rows.push(TraceRow { t: t + 1, h_x: hx as i64, h_y: hy as i64, case_label: label, u });
                }
                if hx < hy {
                    outcome.violations += 1;
                    outcome.first_violation_t.get_or_insert(t + 1);
                }
            }
            outcome
        }
    }
}

fn tree_case_label(hx: u32, hy: u32, nx: u32, ny: u32) -> &'static str {
    if hx != hy {
        "gap"
    } else if hx == 0 {
        "both-origin"
    } else if hx == nx && hx == ny {
        "both-boundary"
    } else if hx == ny {
        "inner-vs-boundary"
    } else {
        "both-inner"
    }
}

/// Runs coupled trajectories and counts pathwise dominance violations; the
/// coupling is almost-surely monotone, so any violation fails the check and
/// the first offending trajectory is replayed into a trace.
pub fn verify_coupling_sim(
    family: &TransitionFamily,
    fast: &DurationSchedule,
    slow: &DurationSchedule,
    horizon: u64,
    trials: u64,
    seed: u64,
    mode: CouplingMode,
) -> Result<(DominanceReport, Option<CouplingTrace>)> {
    let kind = CoupledKind::of(family)?;
    let levels_fast = level_profile(fast, horizon)?;
    let levels_slow = level_profile(slow, horizon)?;
    check_prefix_levels(&levels_fast, &levels_slow)?;

    let outcomes: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            run_scalar_trial(&kind, &levels_fast, &levels_slow, horizon, &mut rng, mode, None)
                .violations
        })
        .collect();

    let violations: u64 = outcomes.iter().sum();
    let trace = outcomes.iter().position(|&v| v > 0).map(|trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let mut tr = CouplingTrace::default();
        run_scalar_trial(
            &kind,
            &levels_fast,
            &levels_slow,
            horizon,
            &mut rng,
            mode,
            Some(&mut tr),
        );
        tr
    });
    let report = DominanceReport {
        family: family.descriptor(),
        schedule_fast: fast.descriptor().to_string(),
        schedule_slow: slow.descriptor().to_string(),
        mode: match mode {
            CouplingMode::Monotone => "trajectory".into(),
            CouplingMode::Broken => "trajectory-negative-control".into(),
        },
        horizon,
        max_violation: violations as f64,
        tolerance: 0.0,
        trials,
        violations,
        pass: violations == 0,
    };
    Ok((report, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(desc: &str) -> TransitionFamily {
        TransitionFamily::parse(desc).unwrap()
    }
    fn one() -> Rational64 {
        Rational64::new(1, 1)
    }

    #[test]
    fn tree_cases_follow_the_shared_coin() {
        // Case both at root: both move up.
        assert_eq!(coupled_step_tree(0, 0, 2, 1, 2, one(), 0.9).unwrap(), (1, 1));
        // Both internal: shared coin sends both the same way.
        assert_eq!(coupled_step_tree(1, 1, 3, 3, 2, one(), 0.1).unwrap(), (0, 0));
        assert_eq!(coupled_step_tree(1, 1, 3, 3, 2, one(), 0.9).unwrap(), (2, 2));
        // X internal, Y at its boundary: Y must descend, X stays ahead.
        let (hx, hy) = coupled_step_tree(2, 2, 4, 2, 2, one(), 0.5).unwrap();
        assert_eq!(hy, 1);
        assert!(hx >= hy);
        // Preconditions.
        assert!(coupled_step_tree(0, 1, 2, 2, 2, one(), 0.5).is_err());
        assert!(coupled_step_tree(1, 1, 2, 2, 2, Rational64::new(2, 1), 0.5).is_err());
    }

    #[test]
    fn cube_coupling_lets_slow_walker_fall_first() {
        // wx=wy=1, nx=4, ny=2: down-probs 1/4 vs 1/2; a draw between them
        // sends only Y down.
        let (wx, wy) = coupled_step_cube(1, 1, 4, 2, 0.3).unwrap();
        assert_eq!((wx, wy), (2, 0));
        let (wx, wy) = coupled_step_cube(1, 1, 4, 2, 0.1).unwrap();
        assert_eq!((wx, wy), (0, 0));
        let (wx, wy) = coupled_step_cube(0, 0, 3, 3, 0.7).unwrap();
        assert_eq!((wx, wy), (1, 1));
    }

    #[test]
    fn lazy_leveltree_accepts_half_and_rejects_below() {
        let profile = LevelProfile::Uniform { k: 2 };
        let ok = coupled_step_leveltree(1, 0, 2, 1, &profile, Rational64::new(1, 2), 0.4);
        assert!(ok.is_ok());
        let err = coupled_step_leveltree(1, 0, 2, 1, &profile, Rational64::new(1, 4), 0.4);
        assert!(matches!(err, Err(Error::UnsupportedGamma { .. })));
    }

    #[test]
    fn box_step_keeps_per_axis_dominance() {
        let mut x = vec![2i64, 0];
        let mut y = vec![0i64, 0];
        coupled_step_box(&mut x, &mut y, &[3, 3], &[1, 1], 0, 0.9, 1).unwrap();
        assert!(x[0].abs() >= y[0].abs());
        // Y on its face reflects down while X interior may climb.
        let mut x = vec![1i64];
        let mut y = vec![1i64];
        coupled_step_box(&mut x, &mut y, &[3], &[1], 0, 0.7, 1).unwrap();
        assert_eq!(y[0], 0);
        assert_eq!(x[0], 2);
    }

    #[test]
    fn exact_verification_passes_on_equal_schedules() {
        let family = fam("hypercube");
        let f = DurationSchedule::explicit(vec![2, 2, 2, 2]);
        let report = verify_lhagg_exact(&family, &f, &f, 8, 1e-12).unwrap();
        assert!(report.pass);
        assert!(report.max_violation.abs() < 1e-15);
    }

    #[test]
    fn exact_verification_rejects_wrong_prefix_order() {
        let family = fam("hypercube");
        let f = DurationSchedule::explicit(vec![4, 4]);
        let g = DurationSchedule::explicit(vec![1, 1]);
        assert!(matches!(
            verify_lhagg_exact(&family, &f, &g, 6, 1e-12),
            Err(Error::PrefixConditionViolated { .. })
        ));
    }

    #[test]
    fn trajectories_hold_dominance_and_broken_mode_fails() {
        let family = fam("karytree:k=2,lambda=1");
        let f = DurationSchedule::explicit(vec![2; 40]);
        let g = DurationSchedule::explicit(vec![4; 20]);
        let (ok, trace) =
            verify_coupling_sim(&family, &f, &g, 80, 500, 11, CouplingMode::Monotone).unwrap();
        assert!(ok.pass, "violations: {}", ok.violations);
        assert!(trace.is_none());
        let (broken, trace) =
            verify_coupling_sim(&family, &f, &g, 80, 500, 11, CouplingMode::Broken).unwrap();
        assert!(!broken.pass);
        let trace = trace.expect("offending trajectory must be dumped");
        assert!(trace.to_csv().contains("violation") || !trace.rows.is_empty());
    }

    #[test]
    fn identical_schedules_give_identical_trajectories() {
        let family = fam("hypercube");
        let f = DurationSchedule::explicit(vec![3; 30]);
        let (report, _) =
            verify_coupling_sim(&family, &f, &f, 60, 200, 5, CouplingMode::Monotone).unwrap();
        assert!(report.pass);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn marginal_correctness_of_the_tree_step() {
        // X internal with the partner pinned: the descent frequency must
        // match lambda/(lambda+k) = 1/3 within four standard errors.
        let n = 200_000u32;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut downs = 0u32;
        for _ in 0..n {
            let u: f64 = rng.random();
            let (hx, _) = coupled_step_tree(2, 0, 5, 5, 2, one(), u).unwrap();
            if hx == 1 {
                downs += 1;
            }
        }
        let p = 1.0 / 3.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((downs as f64 / n as f64 - p).abs() <= 4.0 * se);
    }
}
