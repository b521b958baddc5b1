//! Stationary-distribution machinery for the period-2 families:
//! detailed-balance weights, closed-form and numeric even-time stationary
//! distributions, and the sandwich bounds on the origin mass.

use crate::error::{Error, Result};
use crate::families::{karytree, FamilyKind, TransitionFamily};
use crate::matrix::SparseStochasticMatrix;
use crate::numeric::{Rational, Rational64, Scalar};
use crate::state::{Parity, ORIGIN};
use num::Zero;

/// Positive per-state weights certifying reversibility.
#[derive(Clone, Debug)]
pub struct ReversibilityWeights<T> {
    pub phi: Vec<T>,
}

/// Closed-form detailed-balance weights for the level-`n` chain, indexed
/// like the family's full state space.
pub fn closed_form_weights<T: Scalar>(family: &TransitionFamily, n: u32) -> Result<ReversibilityWeights<T>> {
    let phi = match family.kind() {
        FamilyKind::KaryTree { k, lambda } => karytree::tree_weights::<T>(*k, *lambda, n)?,
        FamilyKind::HeightPath { k, lambda } => karytree::path_weights::<T>(*k, *lambda, n)?,
        FamilyKind::Box { .. } | FamilyKind::GenBox { .. } => {
            let bounds = match family.kind() {
                FamilyKind::Box { d } => vec![crate::families::AxisBound::Linear(1); *d as usize],
                FamilyKind::GenBox { bounds } => bounds.clone(),
                _ => unreachable!(),
            };
            let (idx, _) = family.build::<T>(n)?;
            crate::families::grid::genbox_weights::<T>(&bounds, &idx, n)
        }
        FamilyKind::Hypercube => vec![T::one(); family.state_count(n) as usize],
        FamilyKind::LevelTree { profile, .. } => {
            crate::families::leveltree::leveltree_weights::<T>(profile, n)
        }
        FamilyKind::Star { .. } => {
            return Err(Error::NoClosedForm(family.descriptor()));
        }
    };
    Ok(ReversibilityWeights { phi })
}

/// Largest detailed-balance residual `|phi(u) P(u,v) - phi(v) P(v,u)|`.
pub fn detailed_balance_residual<T: Scalar>(phi: &[T], p: &SparseStochasticMatrix<T>) -> f64 {
    let mut worst: f64 = 0.0;
    for u in 0..p.dim() {
        for (v, puv) in p.row(u) {
            let fwd = phi[u].clone() * puv.clone();
            let bwd = phi[v as usize].clone() * p.entry(v as usize, u as u32);
            worst = worst.max((fwd - bwd).abs_val().to_f64());
        }
    }
    worst
}

/// An even-time stationary distribution: supported on the origin's parity
/// class, fixed under two transitions.
#[derive(Clone, Debug)]
pub struct EvenStationary {
    /// Full-dimension vector, zero outside the even class.
    pub pi: Vec<f64>,
    /// `p(n)`, the mass at the origin.
    pub p_origin: f64,
}

/// Closed-form even-time stationary distribution: the detailed-balance
/// weights normalized over the even parity class. Defined for the period-2
/// families with closed-form weights.
pub fn even_stationary_closed(family: &TransitionFamily, n: u32) -> Result<EvenStationary> {
    if !family.is_busy() {
        return Err(Error::NoClosedForm(format!("{} is aperiodic", family.descriptor())));
    }
    let weights = closed_form_weights::<f64>(family, n)?;
    let (idx, _) = family.build::<f64>(n)?;
    let mut total = 0.0;
    for i in idx.even_class() {
        total += weights.phi[i as usize];
    }
    let pi: Vec<f64> = (0..idx.len() as u32)
        .map(|i| {
            if idx.parity_of(i) == Parity::Even {
                weights.phi[i as usize] / total
            } else {
                0.0
            }
        })
        .collect();
    let p_origin = pi[ORIGIN as usize];
    Ok(EvenStationary { pi, p_origin })
}

/// Scalar `p(n)` without materializing the full state space, using each
/// family's closed formula or its lumped weights.
pub fn p_origin_closed(family: &TransitionFamily, n: u32) -> Result<f64> {
    if !family.is_busy() {
        return Err(Error::NoClosedForm(format!("{} is aperiodic", family.descriptor())));
    }
    match family.kind() {
        FamilyKind::KaryTree { k, lambda } | FamilyKind::HeightPath { k, lambda } => {
            karytree::karytree_p_closed(*k, *lambda, n)
        }
        FamilyKind::Hypercube => Ok((2.0f64).powi(1 - n as i32)),
        FamilyKind::Box { .. } | FamilyKind::GenBox { .. } => {
            Ok(even_stationary_closed(family, n)?.p_origin)
        }
        FamilyKind::LevelTree { profile, .. } => {
            // phi = degree, summed per height layer over even heights.
            let mut total = 0.0;
            let mut layer = 1.0f64;
            for h in 0..=n {
                if h % 2 == 0 {
                    total += layer * crate::families::leveltree::leveltree_degree(profile, n, h) as f64;
                }
                if h < n {
                    layer *= profile.children_at(h) as f64;
                }
            }
            Ok(crate::families::leveltree::leveltree_degree(profile, n, 0) as f64 / total)
        }
        FamilyKind::Star { .. } => Err(Error::NoClosedForm(family.descriptor())),
    }
}

/// Start vector for the numeric fixed-point iteration. The uniform start
/// keeps the numeric route independent of the closed form it is checked
/// against; a weight start is available when convergence matters more.
pub enum NumericStart<'a> {
    UniformEven,
    Weights(&'a [f64]),
}

/// Fixed point of `P^2` on the even class by power iteration, to residual
/// `max |x P^2 - x| <= tol`.
pub fn even_stationary_numeric(
    p: &SparseStochasticMatrix<f64>,
    parity: &[Parity],
    start: NumericStart,
    tol: f64,
    max_iters: u64,
) -> Result<EvenStationary> {
    let dim = p.dim();
    if parity.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: parity.len() });
    }
    let even: Vec<usize> =
        (0..dim).filter(|&i| parity[i] == Parity::Even).collect();
    let mut x = match start {
        NumericStart::UniformEven => {
            let mut v = vec![0.0; dim];
            let w = 1.0 / even.len() as f64;
            for &i in &even {
                v[i] = w;
            }
            v
        }
        NumericStart::Weights(phi) => {
            let total: f64 = even.iter().map(|&i| phi[i]).sum();
            let mut v = vec![0.0; dim];
            for &i in &even {
                v[i] = phi[i] / total;
            }
            v
        }
    };
    let mut residual = f64::INFINITY;
    for _ in 0..max_iters {
        let y = p.apply_left(&p.apply_left(&x)?)?;
        residual = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if residual <= tol {
            // Renormalize drift from accumulated roundoff.
            let mass: f64 = x.iter().sum();
            for v in &mut x {
                *v /= mass;
            }
            let p_origin = x[ORIGIN as usize];
            return Ok(EvenStationary { pi: x, p_origin });
        }
    }
    Err(Error::NonConvergence { iterations: max_iters, residual })
}

/// Exact fixed point of `P^2` restricted to the even class, by rational
/// Gaussian elimination. Ground truth for small chains.
#[allow(clippy::needless_range_loop)]
pub fn even_stationary_rational(
    p: &SparseStochasticMatrix<Rational>,
    parity: &[Parity],
) -> Result<Vec<Rational>> {
    let dim = p.dim();
    if parity.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: parity.len() });
    }
    let even: Vec<usize> = (0..dim).filter(|&i| parity[i] == Parity::Even).collect();
    let m = even.len();
    let slot: Vec<Option<usize>> = {
        let mut s = vec![None; dim];
        for (j, &i) in even.iter().enumerate() {
            s[i] = Some(j);
        }
        s
    };

    // Rows of P^2 restricted to the even class.
    let mut p2 = vec![vec![Rational::zero(); m]; m];
    for (j, &u) in even.iter().enumerate() {
        let mut e = vec![Rational::zero(); dim];
        e[u] = Rational::from_ratio(1, 1);
        let row = p.apply_left(&p.apply_left(&e)?)?;
        for (i, value) in row.into_iter().enumerate() {
            if !value.is_zero() {
                let k = slot[i].ok_or_else(|| {
                    Error::InvalidParameter("P^2 leaks mass out of the even class".into())
                })?;
                p2[j][k] = value;
            }
        }
    }

    // Solve x (P2 - I) = 0 with sum(x) = 1: transpose to A y = b where the
    // last equation is replaced by the normalization.
    let mut a = vec![vec![Rational::zero(); m]; m];
    for j in 0..m {
        for k in 0..m {
            a[k][j] = p2[j][k].clone();
        }
        a[j][j] = a[j][j].clone() - Rational::from_ratio(1, 1);
    }
    for col in 0..m {
        a[m - 1][col] = Rational::from_ratio(1, 1);
    }
    let mut b = vec![Rational::zero(); m];
    b[m - 1] = Rational::from_ratio(1, 1);

    // Gaussian elimination with first-nonzero pivoting.
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::InvalidParameter("singular system: chain not irreducible on the even class".into()))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rational::from_ratio(1, 1) / a[col][col].clone();
        for r in 0..m {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() * inv.clone();
            for c in col..m {
                let delta = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[r] = b[r].clone() - delta;
        }
    }
    let mut pi = vec![Rational::zero(); dim];
    for (j, &i) in even.iter().enumerate() {
        pi[i] = b[j].clone() / a[j][j].clone();
    }
    Ok(pi)
}

/// Sandwich bounds on `p(n)`: for trees with `lambda < k`,
/// `((k-lambda)/k) (lambda/k)^{n+1} <= p(n) <= (lambda/k)^{n-1}`; for boxes,
/// `1/(2n+1)^d <= p(n) <= 2/(2n-1)^d`.
pub fn p_bounds(family: &TransitionFamily, n: u32) -> Result<(f64, f64)> {
    match family.kind() {
        FamilyKind::KaryTree { k, lambda } | FamilyKind::HeightPath { k, lambda } => {
            let kf = *k as f64;
            let lf = *lambda.numer() as f64 / *lambda.denom() as f64;
            if *lambda >= Rational64::new(*k as i64, 1) {
                return Err(Error::NoBound("tree bounds require lambda < k".into()));
            }
            let ratio = lf / kf;
            Ok(((kf - lf) / kf * ratio.powi(n as i32 + 1), ratio.powi(n as i32 - 1)))
        }
        FamilyKind::Box { d } => {
            let df = *d as i32;
            let lower = 1.0 / ((2 * n + 1) as f64).powi(df);
            let upper = 2.0 / ((2 * n - 1) as f64).powi(df);
            Ok((lower, upper))
        }
        _ => Err(Error::NoBound(family.descriptor())),
    }
}
