//! Level trees (equal degree at equal height) and growing stars, busy or
//! lazy.

use crate::error::{Error, Result};
use crate::matrix::SparseStochasticMatrix;
use crate::numeric::{round_half_even, Rational64, Scalar};
use crate::state::{Parity, StateIndex};

/// Child counts per height. `Uniform { k }` is the complete k-ary tree;
/// `PerHeight` lists counts for the first heights and continues with `rest`.
/// Counts do not depend on the level, so deeper trees extend shallower ones
/// node for node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelProfile {
    Uniform { k: u32 },
    PerHeight { counts: Vec<u32>, rest: u32 },
}

impl LevelProfile {
    /// Children of a node at height `h`.
    pub fn children_at(&self, h: u32) -> u32 {
        match self {
            LevelProfile::Uniform { k } => *k,
            LevelProfile::PerHeight { counts, rest } => {
                counts.get(h as usize).copied().unwrap_or(*rest)
            }
        }
    }

    /// Eventual arity, used for asymptotic edge-count comparisons.
    pub fn tail_arity(&self) -> u32 {
        match self {
            LevelProfile::Uniform { k } => *k,
            LevelProfile::PerHeight { rest, .. } => *rest,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            LevelProfile::Uniform { k } => *k >= 1,
            LevelProfile::PerHeight { counts, rest } => {
                *rest >= 1 && counts.iter().all(|&c| c >= 1)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("level-tree child counts must be >= 1".into()))
        }
    }
}

fn check_gamma(gamma: Rational64) -> Result<(i64, i64)> {
    if gamma < Rational64::new(0, 1) || gamma >= Rational64::new(1, 1) {
        return Err(Error::InvalidParameter(format!("gamma must lie in [0,1), got {gamma}")));
    }
    Ok((*gamma.numer(), *gamma.denom()))
}

pub fn leveltree_state_count(profile: &LevelProfile, n: u32) -> u64 {
    let mut total = 0u64;
    let mut layer = 1u64;
    for h in 0..=n {
        total = total.saturating_add(layer);
        if h < n {
            layer = layer.saturating_mul(profile.children_at(h) as u64);
        }
    }
    total
}

/// Degree of a node at height `h` in the level-`n` tree.
pub fn leveltree_degree(profile: &LevelProfile, n: u32, h: u32) -> u32 {
    if h == 0 {
        profile.children_at(0)
    } else if h == n {
        1
    } else {
        profile.children_at(h) + 1
    }
}

/// Lazy or busy simple walk on a level tree: self-loop `gamma`, and
/// `(1-gamma)/deg(u)` to each neighbor. States are indexed breadth-first.
pub fn build_leveltree<T: Scalar>(
    profile: &LevelProfile,
    gamma: Rational64,
    n: u32,
    cap: u64,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    profile.validate()?;
    let (gn, gd) = check_gamma(gamma)?;
    if n < 1 {
        return Err(Error::InvalidParameter("level must be >= 1".into()));
    }
    let states = leveltree_state_count(profile, n);
    if states > cap {
        return Err(Error::StateCapExceeded { states, cap });
    }

    // Layer offsets in BFS order.
    let mut offsets = Vec::with_capacity((n + 2) as usize);
    let mut layer = 1u64;
    let mut offset = 0u64;
    for h in 0..=n {
        offsets.push(offset);
        offset += layer;
        if h < n {
            layer *= profile.children_at(h) as u64;
        }
    }
    offsets.push(offset);

    let lazy = gn > 0;
    let mut index_states = Vec::with_capacity(states as usize);
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(states as usize);
    for h in 0..=n {
        let parity = if h % 2 == 0 { Parity::Even } else { Parity::Odd };
        let deg = leveltree_degree(profile, n, h) as i64;
        // (1-gamma)/deg = (gd-gn)/(gd*deg)
        let step = T::from_ratio(gd - gn, gd * deg);
        let layer_size = offsets[(h + 1) as usize] - offsets[h as usize];
        for j in 0..layer_size {
            let i = offsets[h as usize] + j;
            index_states.push((i as u128, parity));
            let mut row: Vec<(u32, T)> = Vec::new();
            if lazy {
                row.push((i as u32, T::from_ratio(gn, gd)));
            }
            if h > 0 {
                let c_parent = profile.children_at(h - 1) as u64;
                let parent = offsets[(h - 1) as usize] + j / c_parent;
                row.push((parent as u32, step.clone()));
            }
            if h < n {
                let c = profile.children_at(h) as u64;
                for m in 0..c {
                    let child = offsets[(h + 1) as usize] + j * c + m;
                    row.push((child as u32, step.clone()));
                }
            }
            rows.push(row);
        }
    }
    Ok((StateIndex::new(n, index_states), SparseStochasticMatrix::from_rows(states as usize, rows)))
}

/// Exact height projection of the level-tree walk (degrees depend on height
/// only, so height classes lump exactly).
pub fn build_leveltree_height_chain<T: Scalar>(
    profile: &LevelProfile,
    gamma: Rational64,
    n: u32,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    profile.validate()?;
    let (gn, gd) = check_gamma(gamma)?;
    if n < 1 {
        return Err(Error::InvalidParameter("level must be >= 1".into()));
    }
    let lazy = gn > 0;
    let states = (n + 1) as usize;
    let mut index_states = Vec::with_capacity(states);
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(states);
    for h in 0..=n {
        let parity = if h % 2 == 0 { Parity::Even } else { Parity::Odd };
        index_states.push((h as u128, parity));
        let deg = leveltree_degree(profile, n, h) as i64;
        let mut row: Vec<(u32, T)> = Vec::new();
        if lazy {
            row.push((h, T::from_ratio(gn, gd)));
        }
        if h > 0 {
            row.push((h - 1, T::from_ratio(gd - gn, gd * deg)));
        }
        if h < n {
            let c = profile.children_at(h) as i64;
            row.push((h + 1, T::from_ratio((gd - gn) * c, gd * deg)));
        }
        rows.push(row);
    }
    Ok((StateIndex::new(n, index_states), SparseStochasticMatrix::from_rows(states, rows)))
}

/// Degree weights of the level-tree walk (self-loops leave detailed balance
/// untouched), one entry per BFS index.
pub fn leveltree_weights<T: Scalar>(profile: &LevelProfile, n: u32) -> Vec<T> {
    let mut phi = Vec::new();
    let mut layer = 1u64;
    for h in 0..=n {
        let w = T::from_ratio(leveltree_degree(profile, n, h) as i64, 1);
        for _ in 0..layer {
            phi.push(w.clone());
        }
        if h < n {
            layer *= profile.children_at(h) as u64;
        }
    }
    phi
}

/// Leaf count function `M(n)` of a growing star.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StarGrowth {
    /// `M(n) = n`.
    Linear,
    Const(u64),
    /// `M(n) = max(1, round(n^power))`, `power >= 0`.
    Poly { power: f64 },
}

impl StarGrowth {
    pub fn eval(&self, n: u32) -> u64 {
        match *self {
            StarGrowth::Linear => n as u64,
            StarGrowth::Const(c) => c,
            StarGrowth::Poly { power } => round_half_even((n as f64).powf(power)).max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            StarGrowth::Linear => true,
            StarGrowth::Const(c) => c >= 1,
            StarGrowth::Poly { power } => power.is_finite() && power >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("star growth must be monotone and positive".into()))
        }
    }
}

/// Which vertex the walk starts from (and hence whose return probability
/// the origin index tracks). The center is trivially recurrent; the
/// interesting phase transition concerns a fixed leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarStart {
    Center,
    Leaf,
}

const STAR_CENTER_KEY: u128 = 0;

/// Star with center `r` and `M(n)` leaves; busy (`gamma = 0`) or lazy walk.
/// With `start = Leaf` the first leaf is the origin index.
pub fn build_star<T: Scalar>(
    growth: StarGrowth,
    gamma: Rational64,
    start: StarStart,
    n: u32,
    cap: u64,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    growth.validate()?;
    let (gn, gd) = check_gamma(gamma)?;
    let m = growth.eval(n);
    let states = m + 1;
    if states > cap {
        return Err(Error::StateCapExceeded { states, cap });
    }
    if start == StarStart::Leaf && m < 1 {
        return Err(Error::InvalidParameter("leaf start requires M(n) >= 1".into()));
    }
    let lazy = gn > 0;

    // Enumeration puts the origin first; leaf v_i keeps key i at every level.
    let mut keys: Vec<u128> = Vec::with_capacity(states as usize);
    match start {
        StarStart::Center => {
            keys.push(STAR_CENTER_KEY);
            keys.extend((1..=m).map(|i| i as u128));
        }
        StarStart::Leaf => {
            keys.push(1);
            keys.push(STAR_CENTER_KEY);
            keys.extend((2..=m).map(|i| i as u128));
        }
    }
    let index_states: Vec<(u128, Parity)> = keys
        .iter()
        .map(|&key| {
            let is_center = key == STAR_CENTER_KEY;
            let parity = match (start, is_center) {
                (StarStart::Center, true) | (StarStart::Leaf, false) => Parity::Even,
                _ => Parity::Odd,
            };
            (key, parity)
        })
        .collect();
    let idx = StateIndex::new(n, index_states);

    let center = idx.index_of(STAR_CENTER_KEY).unwrap();
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(states as usize);
    for i in 0..states as u32 {
        let mut row: Vec<(u32, T)> = Vec::new();
        if lazy {
            row.push((i, T::from_ratio(gn, gd)));
        }
        if i == center {
            for leaf_key in 1..=m {
                let leaf = idx.index_of(leaf_key as u128).unwrap();
                row.push((leaf, T::from_ratio(gd - gn, gd * m as i64)));
            }
        } else {
            row.push((center, T::from_ratio(gd - gn, gd)));
        }
        rows.push(row);
    }
    Ok((idx, SparseStochasticMatrix::from_rows(states as usize, rows)))
}

/// Exact class projection of the star walk. With a center start the classes
/// are {center, leaves}; with a leaf start the tracked leaf is kept apart:
/// {v_1, center, other leaves}.
pub fn build_star_lumped<T: Scalar>(
    growth: StarGrowth,
    gamma: Rational64,
    start: StarStart,
    n: u32,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    growth.validate()?;
    let (gn, gd) = check_gamma(gamma)?;
    let m = growth.eval(n) as i64;
    let lazy = gn > 0;
    let lazy_row = |mut row: Vec<(u32, T)>, i: u32| {
        if lazy {
            row.push((i, T::from_ratio(gn, gd)));
        }
        row
    };
    match start {
        StarStart::Center => {
            // Keys: 0 = center, 1 = leaf class.
            let idx = StateIndex::new(n, vec![(0, Parity::Even), (1, Parity::Odd)]);
            let rows = vec![
                lazy_row(vec![(1, T::from_ratio(gd - gn, gd))], 0),
                lazy_row(vec![(0, T::from_ratio(gd - gn, gd))], 1),
            ];
            Ok((idx, SparseStochasticMatrix::from_rows(2, rows)))
        }
        StarStart::Leaf if m == 1 => {
            // Keys: 1 = tracked leaf, 0 = center.
            let idx = StateIndex::new(n, vec![(1, Parity::Even), (0, Parity::Odd)]);
            let rows = vec![
                lazy_row(vec![(1, T::from_ratio(gd - gn, gd))], 0),
                lazy_row(vec![(0, T::from_ratio(gd - gn, gd))], 1),
            ];
            Ok((idx, SparseStochasticMatrix::from_rows(2, rows)))
        }
        StarStart::Leaf => {
            // Keys: 1 = tracked leaf, 0 = center, 2 = other-leaves class.
            let idx = StateIndex::new(
                n,
                vec![(1, Parity::Even), (0, Parity::Odd), (2, Parity::Even)],
            );
            let rows = vec![
                lazy_row(vec![(1, T::from_ratio(gd - gn, gd))], 0),
                lazy_row(
                    vec![
                        (0, T::from_ratio(gd - gn, gd * m)),
                        (2, T::from_ratio((gd - gn) * (m - 1), gd * m)),
                    ],
                    1,
                ),
                lazy_row(vec![(1, T::from_ratio(gd - gn, gd))], 2),
            ];
            Ok((idx, SparseStochasticMatrix::from_rows(3, rows)))
        }
    }
}
