//! Recurrence/transience classification from the families' series criteria.
//!
//! Schedules of the symbolic form `d(n) = round(base^n / (n^a (ln n)^b))`
//! weighted by a family term `geo^n n^p (ln n)^q` stay inside one algebra:
//! the series is classified by the exact geometric ratio first and the
//! Bertrand boundary `(a, b)` second, with no numeric summation. Explicit
//! schedules have no decidable tail and come back `Undecided`.

use crate::families::{FamilyKind, StarGrowth, StarStart, TransitionFamily};
use crate::numeric::Rational64;
use crate::schedule::{DurationSchedule, SymbolicScheduleFamily};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Recurrent,
    Transient,
    Undecided,
}

/// A classification outcome: the verdict, which criterion produced it, the
/// decided series, and the vertex it concerns.
#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceVerdict {
    pub verdict: Verdict,
    pub theorem: String,
    pub series_term: String,
    pub subject: String,
    pub notes: String,
}

impl RecurrenceVerdict {
    fn undecided(theorem: &str, subject: &str, notes: String) -> Self {
        RecurrenceVerdict {
            verdict: Verdict::Undecided,
            theorem: theorem.to_string(),
            series_term: String::new(),
            subject: subject.to_string(),
            notes,
        }
    }
}

/// One term `geo^n * n^poly * (ln n)^logp` of a positive series; the
/// geometric ratio is exact so boundary cases like `base * lambda/k = 1`
/// are decided correctly.
#[derive(Clone, Copy, Debug)]
struct SeriesTerm {
    geo: Rational64,
    poly: f64,
    logp: f64,
}

impl SeriesTerm {
    fn new(geo: Rational64, poly: f64, logp: f64) -> Self {
        SeriesTerm { geo, poly, logp }
    }

    fn mul(self, other: SeriesTerm) -> SeriesTerm {
        SeriesTerm {
            geo: self.geo * other.geo,
            poly: self.poly + other.poly,
            logp: self.logp + other.logp,
        }
    }

    /// Convergence of `sum_n geo^n n^poly (ln n)^logp` by the geometric
    /// ratio and the Bertrand boundary.
    fn series_converges(&self) -> bool {
        let one = Rational64::new(1, 1);
        if self.geo < one {
            return true;
        }
        if self.geo > one {
            return false;
        }
        self.poly < -1.0 || (self.poly == -1.0 && self.logp < -1.0)
    }

    /// Limit behaviour of the term itself as `n` grows.
    fn grows_unboundedly(&self) -> bool {
        let one = Rational64::new(1, 1);
        self.geo > one || (self.geo == one && (self.poly > 0.0 || (self.poly == 0.0 && self.logp > 0.0)))
    }

    fn tends_to_zero(&self) -> bool {
        let one = Rational64::new(1, 1);
        self.geo < one || (self.geo == one && (self.poly < 0.0 || (self.poly == 0.0 && self.logp < 0.0)))
    }

    fn render(&self, schedule_part: &str) -> String {
        let mut weight = String::new();
        if self.geo != Rational64::new(1, 1) {
            weight.push_str(&format!(" * ({})^n", self.geo));
        }
        if self.poly != 0.0 {
            weight.push_str(&format!(" * n^{}", self.poly));
        }
        if self.logp != 0.0 {
            weight.push_str(&format!(" * (ln n)^{}", self.logp));
        }
        format!("sum_n {schedule_part}{weight}")
    }
}

fn schedule_term(s: &SymbolicScheduleFamily) -> SeriesTerm {
    SeriesTerm::new(s.base(), -s.poly_power(), -s.log_power())
}

/// Does `sum_n d(n) w(n)` diverge, where `d(n)` is the rounded symbolic
/// schedule? Rounding matters only when the unrounded term stays below 1:
/// a term tending to zero eventually rounds to zero and the sum is finite.
fn weighted_schedule_diverges(d: SeriesTerm, weight: SeriesTerm) -> bool {
    if d.tends_to_zero() {
        return false;
    }
    if d.grows_unboundedly() {
        return !d.mul(weight).series_converges();
    }
    // The unit-coefficient symbolic family makes the only remaining limit 1.
    !weight.series_converges()
}

/// Same for `sum_n (d(n) - 1) w(n)`; a schedule pinned at 1 contributes
/// nothing.
fn weighted_schedule_minus_one_diverges(d: SeriesTerm, weight: SeriesTerm) -> bool {
    if d.tends_to_zero() || !d.grows_unboundedly() {
        return false;
    }
    !d.mul(weight).series_converges()
}

fn two_sided(
    diverges: bool,
    theorem: &str,
    series_term: String,
    subject: &str,
    notes: &str,
) -> RecurrenceVerdict {
    RecurrenceVerdict {
        verdict: if diverges { Verdict::Recurrent } else { Verdict::Transient },
        theorem: theorem.to_string(),
        series_term,
        subject: subject.to_string(),
        notes: notes.to_string(),
    }
}

/// Is the schedule the constant-1 schedule (the only form the star criteria
/// cover)?
fn is_unit_schedule(s: &SymbolicScheduleFamily) -> bool {
    s.base() == Rational64::new(1, 1) && s.poly_power() == 0.0 && s.log_power() == 0.0 && s.d1() == 1
}

/// Applies the family's recurrence/transience criterion to a symbolic
/// schedule. One-sided criteria (generalized boxes, level trees) return
/// `Undecided` when their sufficient condition fails; parameters outside a
/// criterion's hypotheses are never guessed at.
pub fn classify(family: &TransitionFamily, schedule: &DurationSchedule) -> RecurrenceVerdict {
    // The star center is recurrent for every schedule, symbolic or not.
    if let FamilyKind::Star { start: StarStart::Center, .. } = family.kind() {
        return RecurrenceVerdict {
            verdict: Verdict::Recurrent,
            theorem: "star-center-trivial".into(),
            series_term: String::new(),
            subject: "center".into(),
            notes: "every excursion from the center returns in two steps".into(),
        };
    }
    let sym = match schedule.as_symbolic() {
        Some(s) => s,
        None => {
            return RecurrenceVerdict::undecided(
                "none",
                subject_of(family),
                "explicit schedules have no decidable tail; use a symbolic schedule".into(),
            )
        }
    };
    let d = schedule_term(sym);
    match family.kind() {
        FamilyKind::KaryTree { k, lambda } | FamilyKind::HeightPath { k, lambda } => {
            let k_ratio = Rational64::new(*k as i64, 1);
            if *lambda >= k_ratio {
                return RecurrenceVerdict {
                    verdict: Verdict::Recurrent,
                    theorem: "tree-strong-homesickness".into(),
                    series_term: String::new(),
                    subject: subject_of(family).into(),
                    notes: format!("lambda={lambda} >= k={k}: recurrent for every schedule"),
                };
            }
            let weight = SeriesTerm::new(*lambda / k_ratio, 0.0, 0.0);
            two_sided(
                weighted_schedule_diverges(d, weight),
                "tree-geometric-series",
                weight.render("d(n)"),
                subject_of(family),
                "recurrent iff sum_n d(n) (lambda/k)^n diverges",
            )
        }
        FamilyKind::Box { d: dim } => {
            if *dim < 4 {
                return RecurrenceVerdict::undecided(
                    "box-polynomial-series",
                    "origin",
                    format!("two-sided criterion requires d >= 4, got d={dim}"),
                );
            }
            let weight = SeriesTerm::new(Rational64::new(1, 1), -(*dim as f64), 0.0);
            two_sided(
                weighted_schedule_diverges(d, weight),
                "box-polynomial-series",
                weight.render("d(n)"),
                "origin",
                "recurrent iff sum_n d(n)/n^d diverges",
            )
        }
        FamilyKind::Hypercube => {
            let weight = SeriesTerm::new(Rational64::new(1, 2), 0.0, 0.0);
            two_sided(
                weighted_schedule_diverges(d, weight),
                "cube-geometric-series",
                weight.render("d(n)"),
                "origin",
                "recurrent iff sum_n d(n)/2^n diverges",
            )
        }
        FamilyKind::GenBox { bounds } => {
            let linear_axes = bounds
                .iter()
                .filter(|b| matches!(b, crate::families::AxisBound::Linear(_)))
                .count();
            let inv_volume = SeriesTerm::new(Rational64::new(1, 1), -(linear_axes as f64), 0.0);
            if weighted_schedule_minus_one_diverges(d, inv_volume) {
                return RecurrenceVerdict {
                    verdict: Verdict::Recurrent,
                    theorem: "genbox-onesided".into(),
                    series_term: inv_volume.render("(d(n)-1)"),
                    subject: "origin".into(),
                    notes: "sum_n (d(n)-1)/|V_n| diverges".into(),
                };
            }
            // Transient side: both the schedule and the mixing term must be
            // summable against 1/|V_n|. The mixing term is
            // (sum_i b_i(n)^2) ln|V_n|.
            let mixing = if linear_axes > 0 {
                SeriesTerm::new(Rational64::new(1, 1), 2.0, 1.0)
            } else {
                SeriesTerm::new(Rational64::new(1, 1), 0.0, 0.0)
            };
            let schedule_side = !weighted_schedule_diverges(d, inv_volume);
            let mixing_side = mixing.mul(inv_volume).series_converges();
            if schedule_side && mixing_side {
                return RecurrenceVerdict {
                    verdict: Verdict::Transient,
                    theorem: "genbox-onesided".into(),
                    series_term: inv_volume.render("max(d(n), mix(n))"),
                    subject: "origin".into(),
                    notes: "sum_n max(d(n), (sum_i b_i(n)^2) ln|V_n|)/|V_n| converges".into(),
                };
            }
            RecurrenceVerdict::undecided(
                "genbox-onesided",
                "origin",
                "neither one-sided condition applies".into(),
            )
        }
        FamilyKind::LevelTree { profile, gamma } => {
            let zero = Rational64::new(0, 1);
            let half = Rational64::new(1, 2);
            let arity = profile.tail_arity();
            // |E_n| grows like arity^n (or like n for an eventual path).
            let inv_edges = if arity >= 2 {
                SeriesTerm::new(Rational64::new(1, arity as i64), 0.0, 0.0)
            } else {
                SeriesTerm::new(Rational64::new(1, 1), -1.0, 0.0)
            };
            if *gamma == zero {
                let diverges = weighted_schedule_minus_one_diverges(d, inv_edges);
                if diverges {
                    RecurrenceVerdict {
                        verdict: Verdict::Recurrent,
                        theorem: "leveltree-busy-onesided".into(),
                        series_term: inv_edges.render("(d(n)-1)"),
                        subject: "root".into(),
                        notes: "sum_n (d(n)-1)/|E_n| diverges".into(),
                    }
                } else {
                    RecurrenceVerdict::undecided(
                        "leveltree-busy-onesided",
                        "root",
                        "recurrence condition fails; no transience criterion for level trees".into(),
                    )
                }
            } else if *gamma >= half {
                let diverges = weighted_schedule_diverges(d, inv_edges);
                if diverges {
                    RecurrenceVerdict {
                        verdict: Verdict::Recurrent,
                        theorem: "leveltree-lazy-onesided".into(),
                        series_term: inv_edges.render("d(n)"),
                        subject: "root".into(),
                        notes: "sum_n d(n)/|E_n| diverges".into(),
                    }
                } else {
                    RecurrenceVerdict::undecided(
                        "leveltree-lazy-onesided",
                        "root",
                        "recurrence condition fails; no transience criterion for level trees".into(),
                    )
                }
            } else {
                RecurrenceVerdict::undecided(
                    "leveltree-lazy-onesided",
                    "root",
                    format!("gamma={gamma} in (0, 1/2): dominance coupling unsupported"),
                )
            }
        }
        FamilyKind::Star { growth, start: StarStart::Leaf, .. } => {
            if !is_unit_schedule(sym) {
                return RecurrenceVerdict::undecided(
                    "star-leaf-harmonic",
                    "leaf v_i",
                    "leaf criterion covers only the constant-1 schedule".into(),
                );
            }
            let diverges = match growth {
                StarGrowth::Linear | StarGrowth::Const(_) => true,
                StarGrowth::Poly { power } => *power <= 1.0,
            };
            two_sided(
                diverges,
                "star-leaf-harmonic",
                "sum_n 1/M(n)".into(),
                "leaf v_i",
                "recurrent iff sum_n 1/M(n) diverges (any fixed leaf)",
            )
        }
        FamilyKind::Star { start: StarStart::Center, .. } => unreachable!("handled above"),
    }
}

fn subject_of(family: &TransitionFamily) -> &'static str {
    match family.kind() {
        FamilyKind::KaryTree { .. } | FamilyKind::LevelTree { .. } => "root",
        FamilyKind::HeightPath { .. } => "height 0",
        FamilyKind::Box { .. } | FamilyKind::GenBox { .. } | FamilyKind::Hypercube => "origin",
        FamilyKind::Star { start: StarStart::Leaf, .. } => "leaf v_i",
        FamilyKind::Star { .. } => "center",
    }
}
