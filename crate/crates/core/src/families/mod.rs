//! The growing-graph transition families: an indexed family
//! `n -> (V(n), P_n)` of state spaces and sparse row-stochastic matrices
//! with nested embeddings `V(n) ⊆ V(n+1)`.

pub mod grid;
pub mod hypercube;
pub mod karytree;
pub mod leveltree;

use crate::error::{Error, Result};
use crate::matrix::SparseStochasticMatrix;
use crate::numeric::{parse_rational, Rational64, Scalar};
use crate::state::StateIndex;

pub use grid::AxisBound;
pub use leveltree::{LevelProfile, StarGrowth, StarStart};

/// Builders refuse state spaces above this many states unless overridden;
/// exponential families must fail loudly and the lumped projections exist
/// precisely to go deeper.
pub const DEFAULT_STATE_CAP: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    KaryTree { k: u32, lambda: Rational64 },
    HeightPath { k: u32, lambda: Rational64 },
    Box { d: u32 },
    GenBox { bounds: Vec<AxisBound> },
    Hypercube,
    LevelTree { profile: LevelProfile, gamma: Rational64 },
    Star { growth: StarGrowth, gamma: Rational64, start: StarStart },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionFamily {
    kind: FamilyKind,
    cap: u64,
}

impl TransitionFamily {
    pub fn new(kind: FamilyKind) -> Result<Self> {
        match &kind {
            FamilyKind::KaryTree { k, lambda } | FamilyKind::HeightPath { k, lambda } => {
                if *k < 2 {
                    return Err(Error::InvalidParameter("k must be >= 2".into()));
                }
                if *lambda <= Rational64::new(0, 1) {
                    return Err(Error::InvalidParameter("lambda must be positive".into()));
                }
            }
            FamilyKind::Box { d } => {
                if *d < 1 || *d as usize > grid::MAX_AXES {
                    return Err(Error::InvalidParameter(format!(
                        "box dimension must be in 1..={}",
                        grid::MAX_AXES
                    )));
                }
            }
            FamilyKind::GenBox { bounds } => {
                if bounds.is_empty() || bounds.len() > grid::MAX_AXES {
                    return Err(Error::InvalidParameter(format!(
                        "genbox needs 1..={} axes",
                        grid::MAX_AXES
                    )));
                }
                for b in bounds {
                    b.validate()?;
                }
            }
            FamilyKind::Hypercube => {}
            FamilyKind::LevelTree { profile, gamma } => {
                profile.validate()?;
                check_gamma_range(*gamma)?;
            }
            FamilyKind::Star { growth, gamma, .. } => {
                growth.validate()?;
                check_gamma_range(*gamma)?;
            }
        }
        Ok(TransitionFamily { kind, cap: DEFAULT_STATE_CAP })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Parse a family descriptor, e.g. `karytree:k=2,lambda=1`, `box:d=4`,
    /// `genbox:d=2,b1=1,b2=n`, `hypercube`, `leveltree:k=2,gamma=0.5`,
    /// `star:M=linear,gamma=0,start=leaf`.
    pub fn parse(desc: &str) -> Result<Self> {
        let bad = || Error::InvalidDescriptor(desc.to_string());
        let (head, rest) = match desc.split_once(':') {
            Some((h, r)) => (h.trim(), r),
            None => (desc.trim(), ""),
        };
        let kv: Vec<(&str, &str)> = if rest.is_empty() {
            Vec::new()
        } else {
            rest.split(',')
                .map(|item| item.split_once('=').ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .map(|(k, v)| (k.trim(), v.trim()))
                .collect()
        };
        let get = |key: &str| kv.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let kind = match head {
            "karytree" | "heightpath" => {
                let k: u32 = get("k").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let lambda = parse_rational(get("lambda").ok_or_else(bad)?).ok_or_else(bad)?;
                if head == "karytree" {
                    FamilyKind::KaryTree { k, lambda }
                } else {
                    FamilyKind::HeightPath { k, lambda }
                }
            }
            "box" => {
                let d: u32 = get("d").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                FamilyKind::Box { d }
            }
            "genbox" => {
                let d: usize = get("d").ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let mut bounds = Vec::with_capacity(d);
                for i in 1..=d {
                    let raw = get(&format!("b{i}")).ok_or_else(bad)?;
                    bounds.push(parse_axis_bound(raw).ok_or_else(bad)?);
                }
                FamilyKind::GenBox { bounds }
            }
            "hypercube" => FamilyKind::Hypercube,
            "leveltree" => {
                let gamma = parse_rational(get("gamma").unwrap_or("0")).ok_or_else(bad)?;
                let profile = if let Some(k) = get("k") {
                    LevelProfile::Uniform { k: k.parse().map_err(|_| bad())? }
                } else if let Some(children) = get("children") {
                    let counts = children
                        .split(';')
                        .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
                        .collect::<Result<Vec<_>>>()?;
                    let rest: u32 = match get("rest") {
                        Some(r) => r.parse().map_err(|_| bad())?,
                        None => *counts.last().ok_or_else(bad)?,
                    };
                    LevelProfile::PerHeight { counts, rest }
                } else {
                    return Err(bad());
                };
                FamilyKind::LevelTree { profile, gamma }
            }
            "star" => {
                let growth = match get("M").ok_or_else(bad)? {
                    "linear" => StarGrowth::Linear,
                    other => {
                        if let Some(c) = other.strip_prefix("const:") {
                            StarGrowth::Const(c.parse().map_err(|_| bad())?)
                        } else if let Some(a) = other.strip_prefix("poly:") {
                            StarGrowth::Poly { power: a.parse().map_err(|_| bad())? }
                        } else {
                            return Err(bad());
                        }
                    }
                };
                let gamma = parse_rational(get("gamma").unwrap_or("0")).ok_or_else(bad)?;
                let start = match get("start") {
                    None | Some("center") => StarStart::Center,
                    Some("leaf") => StarStart::Leaf,
                    Some(_) => return Err(bad()),
                };
                FamilyKind::Star { growth, gamma, start }
            }
            _ => return Err(bad()),
        };
        TransitionFamily::new(kind)
    }

    /// Canonical descriptor string (parses back to an equal family).
    pub fn descriptor(&self) -> String {
        match &self.kind {
            FamilyKind::KaryTree { k, lambda } => format!("karytree:k={k},lambda={lambda}"),
            FamilyKind::HeightPath { k, lambda } => format!("heightpath:k={k},lambda={lambda}"),
            FamilyKind::Box { d } => format!("box:d={d}"),
            FamilyKind::GenBox { bounds } => {
                let mut s = format!("genbox:d={}", bounds.len());
                for (i, b) in bounds.iter().enumerate() {
                    let v = match b {
                        AxisBound::Const(c) => c.to_string(),
                        AxisBound::Linear(1) => "n".to_string(),
                        AxisBound::Linear(c) => format!("{c}n"),
                    };
                    s.push_str(&format!(",b{}={v}", i + 1));
                }
                s
            }
            FamilyKind::Hypercube => "hypercube".to_string(),
            FamilyKind::LevelTree { profile, gamma } => match profile {
                LevelProfile::Uniform { k } => format!("leveltree:k={k},gamma={gamma}"),
                LevelProfile::PerHeight { counts, rest } => format!(
                    "leveltree:children={},rest={rest},gamma={gamma}",
                    counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
                ),
            },
            FamilyKind::Star { growth, gamma, start } => {
                let m = match growth {
                    StarGrowth::Linear => "linear".to_string(),
                    StarGrowth::Const(c) => format!("const:{c}"),
                    StarGrowth::Poly { power } => format!("poly:{power}"),
                };
                let start = match start {
                    StarStart::Center => "center",
                    StarStart::Leaf => "leaf",
                };
                format!("star:M={m},gamma={gamma},start={start}")
            }
        }
    }

    /// `|V(n)|`, saturating.
    pub fn state_count(&self, n: u32) -> u64 {
        match &self.kind {
            FamilyKind::KaryTree { k, .. } => karytree::tree_state_count(*k, n),
            FamilyKind::HeightPath { .. } => n as u64 + 1,
            FamilyKind::Box { d } => {
                grid::genbox_state_count(&vec![AxisBound::Linear(1); *d as usize], n)
            }
            FamilyKind::GenBox { bounds } => grid::genbox_state_count(bounds, n),
            FamilyKind::Hypercube => hypercube::cube_state_count(n),
            FamilyKind::LevelTree { profile, .. } => leveltree::leveltree_state_count(profile, n),
            FamilyKind::Star { growth, .. } => growth.eval(n) + 1,
        }
    }

    /// Whether every `P_n` has period 2 (no self-loops).
    pub fn is_busy(&self) -> bool {
        match &self.kind {
            FamilyKind::LevelTree { gamma, .. } | FamilyKind::Star { gamma, .. } => {
                *gamma == Rational64::new(0, 1)
            }
            _ => true,
        }
    }

    /// Whether an exact lower-dimensional projection is available.
    pub fn lumpable(&self) -> bool {
        !matches!(self.kind, FamilyKind::Box { .. } | FamilyKind::GenBox { .. })
    }

    pub fn build<T: Scalar>(&self, n: u32) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
        match &self.kind {
            FamilyKind::KaryTree { k, lambda } => karytree::build_karytree(*k, *lambda, n, self.cap),
            FamilyKind::HeightPath { k, lambda } => karytree::build_height_path(*k, *lambda, n),
            FamilyKind::Box { d } => grid::build_box(*d, n, self.cap),
            FamilyKind::GenBox { bounds } => grid::build_genbox(bounds, n, self.cap),
            FamilyKind::Hypercube => hypercube::build_hypercube(n, self.cap),
            FamilyKind::LevelTree { profile, gamma } => {
                leveltree::build_leveltree(profile, *gamma, n, self.cap)
            }
            FamilyKind::Star { growth, gamma, start } => {
                leveltree::build_star(*growth, *gamma, *start, n, self.cap)
            }
        }
    }

    /// The exact projected chain whose origin-return probabilities equal the
    /// full chain's: heights for trees, Hamming weight for the hypercube,
    /// vertex classes for stars.
    pub fn build_lumped<T: Scalar>(&self, n: u32) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
        match &self.kind {
            FamilyKind::KaryTree { k, lambda } | FamilyKind::HeightPath { k, lambda } => {
                karytree::build_height_path(*k, *lambda, n)
            }
            FamilyKind::Hypercube => hypercube::build_weight_chain(n),
            FamilyKind::LevelTree { profile, gamma } => {
                leveltree::build_leveltree_height_chain(profile, *gamma, n)
            }
            FamilyKind::Star { growth, gamma, start } => {
                leveltree::build_star_lumped(*growth, *gamma, *start, n)
            }
            FamilyKind::Box { .. } | FamilyKind::GenBox { .. } => {
                Err(Error::NotLumpable(self.descriptor()))
            }
        }
    }

    /// Largest level whose full state space fits under the cap.
    pub fn max_level_under_cap(&self, hint: u32) -> u32 {
        let mut n = 1;
        while n < hint && self.state_count(n + 1) <= self.cap {
            n += 1;
        }
        n
    }
}

fn check_gamma_range(gamma: Rational64) -> Result<()> {
    if gamma < Rational64::new(0, 1) || gamma >= Rational64::new(1, 1) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0,1), got {gamma}")));
    }
    Ok(())
}

fn parse_axis_bound(raw: &str) -> Option<AxisBound> {
    let raw = raw.trim();
    if raw == "n" {
        return Some(AxisBound::Linear(1));
    }
    if let Some(coeff) = raw.strip_suffix('n') {
        return coeff.parse().ok().map(AxisBound::Linear);
    }
    raw.parse().ok().map(AxisBound::Const)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Parity;

    #[test]
    fn parse_and_roundtrip() {
        for desc in [
            "karytree:k=2,lambda=1",
            "heightpath:k=3,lambda=0.5",
            "box:d=4",
            "genbox:d=2,b1=1,b2=n",
            "genbox:d=1,b1=2n",
            "hypercube",
            "leveltree:k=2,gamma=0.5",
            "leveltree:children=3;2,rest=2,gamma=0",
            "star:M=linear,gamma=0,start=leaf",
            "star:M=poly:1.5,gamma=0.25,start=center",
        ] {
            let fam = TransitionFamily::parse(desc).unwrap();
            let again = TransitionFamily::parse(&fam.descriptor()).unwrap();
            assert_eq!(fam, again, "{desc}");
        }
        assert!(TransitionFamily::parse("torus:d=2").is_err());
        assert!(TransitionFamily::parse("karytree:k=1,lambda=1").is_err());
        assert!(TransitionFamily::parse("leveltree:k=2,gamma=1").is_err());
    }

    #[test]
    fn every_family_builds_stochastic_rows() {
        for desc in [
            "karytree:k=2,lambda=1",
            "heightpath:k=2,lambda=2",
            "box:d=2",
            "genbox:d=2,b1=1,b2=n",
            "hypercube",
            "leveltree:k=3,gamma=0",
            "leveltree:k=2,gamma=0.5",
            "star:M=linear,gamma=0,start=leaf",
        ] {
            let fam = TransitionFamily::parse(desc).unwrap();
            for n in 1..=3 {
                let (idx, m) = fam.build::<f64>(n).unwrap();
                assert_eq!(idx.len() as u64, fam.state_count(n), "{desc} n={n}");
                assert!(m.max_row_sum_error() < 1e-12, "{desc} n={n}");
                assert_eq!(idx.parity_of(0), Parity::Even);
                if fam.lumpable() {
                    let (lidx, lm) = fam.build_lumped::<f64>(n).unwrap();
                    assert!(lm.max_row_sum_error() < 1e-12);
                    assert_eq!(lidx.parity_of(0), Parity::Even);
                }
            }
        }
    }

    #[test]
    fn embeddings_exist_and_are_injective() {
        for desc in ["karytree:k=2,lambda=1", "box:d=2", "hypercube", "star:M=linear,gamma=0"] {
            let fam = TransitionFamily::parse(desc).unwrap();
            for n in 1..=3 {
                let (small, _) = fam.build::<f64>(n).unwrap();
                let (large, _) = fam.build::<f64>(n + 1).unwrap();
                let map = small.embed_into(&large).unwrap();
                let mut seen = std::collections::HashSet::new();
                assert!(map.iter().all(|j| seen.insert(*j)));
                assert_eq!(map[0], 0, "origin index is stable");
            }
        }
    }

    #[test]
    fn lumped_box_is_rejected() {
        let fam = TransitionFamily::parse("box:d=2").unwrap();
        assert!(matches!(fam.build_lumped::<f64>(2), Err(Error::NotLumpable(_))));
    }
}
