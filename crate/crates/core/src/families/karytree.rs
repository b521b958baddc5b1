//! Complete k-ary trees with a homesickness bias, and the exact height
//! projection onto a path chain.
//!
//! States are indexed breadth-first (root = 0, children of `i` are
//! `k*i+1 .. k*i+k`), which makes the level-to-level embedding the identity
//! on indices.

use crate::error::{Error, Result};
use crate::matrix::SparseStochasticMatrix;
use crate::numeric::{Rational64, Scalar};
use crate::state::{Parity, StateIndex};

/// `|V_n| = (k^{n+1} - 1)/(k - 1)`, saturating at `u64::MAX`.
pub fn tree_state_count(k: u32, n: u32) -> u64 {
    let mut total: u64 = 0;
    let mut layer: u64 = 1;
    for _ in 0..=n {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(k as u64);
    }
    total
}

/// First BFS index of height `h`.
fn layer_offset(k: u64, h: u32) -> u64 {
    let mut offset = 0u64;
    let mut layer = 1u64;
    for _ in 0..h {
        offset += layer;
        layer *= k;
    }
    offset
}

fn check_params(k: u32, lambda: Rational64) -> Result<(i64, i64)> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("tree arity k must be >= 2, got {k}")));
    }
    if lambda <= Rational64::new(0, 1) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok((*lambda.numer(), *lambda.denom()))
}

/// Transition matrix over the complete k-ary tree of height `n`:
/// root to each child `1/k`; internal node to each child `1/(lambda+k)`,
/// to its parent `lambda/(lambda+k)`; leaf to its parent with probability 1.
pub fn build_karytree<T: Scalar>(
    k: u32,
    lambda: Rational64,
    n: u32,
    cap: u64,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    let (p, q) = check_params(k, lambda)?;
    if n < 1 {
        return Err(Error::InvalidParameter("tree height must be >= 1".into()));
    }
    let states = tree_state_count(k, n);
    if states > cap {
        return Err(Error::StateCapExceeded { states, cap });
    }
    let states = states as usize;
    let k64 = k as u64;
    // lambda/(lambda+k) = p/(p+kq), 1/(lambda+k) = q/(p+kq)
    let denom = p + k as i64 * q;
    let to_parent = T::from_ratio(p, denom);
    let to_child = T::from_ratio(q, denom);
    let root_to_child = T::from_ratio(1, k as i64);

    let mut index_states = Vec::with_capacity(states);
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(states);
    for h in 0..=n {
        let offset = layer_offset(k64, h);
        let layer = k64.pow(h);
        let parity = if h % 2 == 0 { Parity::Even } else { Parity::Odd };
        for j in 0..layer {
            let i = offset + j;
            index_states.push((i as u128, parity));
            let mut row: Vec<(u32, T)> = Vec::new();
            if h == 0 {
                for c in 1..=k64 {
                    row.push((c as u32, root_to_child.clone()));
                }
            } else if h == n {
                row.push((((i - 1) / k64) as u32, T::one()));
            } else {
                row.push((((i - 1) / k64) as u32, to_parent.clone()));
                for c in 0..k64 {
                    row.push(((k64 * i + 1 + c) as u32, to_child.clone()));
                }
            }
            rows.push(row);
        }
    }
    let idx = StateIndex::new(n, index_states);
    let matrix = SparseStochasticMatrix::from_rows(states, rows);
    Ok((idx, matrix))
}

/// The height projection `Q_n` of the tree walk: an `(n+1)`-state chain with
/// `Q(0,1) = 1`, interior up-probability `k/(lambda+k)`, down-probability
/// `lambda/(lambda+k)`, and `Q(n,n-1) = 1`.
pub fn build_height_path<T: Scalar>(
    k: u32,
    lambda: Rational64,
    n: u32,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    let (p, q) = check_params(k, lambda)?;
    if n < 1 {
        return Err(Error::InvalidParameter("path length must be >= 1".into()));
    }
    let denom = p + k as i64 * q;
    let up = T::from_ratio(k as i64 * q, denom);
    let down = T::from_ratio(p, denom);
    let states = (n + 1) as usize;
    let mut index_states = Vec::with_capacity(states);
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(states);
    for h in 0..=n {
        let parity = if h % 2 == 0 { Parity::Even } else { Parity::Odd };
        index_states.push((h as u128, parity));
        let row = if h == 0 {
            vec![(1u32, T::one())]
        } else if h == n {
            vec![(n - 1, T::one())]
        } else {
            vec![(h - 1, down.clone()), (h + 1, up.clone())]
        };
        rows.push(row);
    }
    Ok((StateIndex::new(n, index_states), SparseStochasticMatrix::from_rows(states, rows)))
}

fn pow_ratio<T: Scalar>(num: i64, den: i64, e: u32) -> T {
    let base = T::from_ratio(num, den);
    let mut acc = T::one();
    for _ in 0..e {
        acc = acc * base.clone();
    }
    acc
}

/// Detailed-balance weights of the tree walk:
/// `phi(r) = k/(lambda+k)`, `phi(v) = lambda^{-h(v)}` for internal `v`, and
/// `phi(leaf) = lambda/(lambda+k) * lambda^{-n}`.
pub fn tree_weights<T: Scalar>(k: u32, lambda: Rational64, n: u32) -> Result<Vec<T>> {
    let (p, q) = check_params(k, lambda)?;
    let denom = p + k as i64 * q;
    let k64 = k as u64;
    let mut phi = Vec::new();
    for h in 0..=n {
        let w = if h == 0 {
            T::from_ratio(k as i64 * q, denom)
        } else if h == n {
            T::from_ratio(p, denom) * pow_ratio::<T>(q, p, n)
        } else {
            pow_ratio::<T>(q, p, h)
        };
        for _ in 0..k64.pow(h) {
            phi.push(w.clone());
        }
    }
    Ok(phi)
}

/// Height-class sums of `tree_weights`: the detailed-balance weights of the
/// projected chain `Q_n`.
pub fn path_weights<T: Scalar>(k: u32, lambda: Rational64, n: u32) -> Result<Vec<T>> {
    let (p, q) = check_params(k, lambda)?;
    let denom = p + k as i64 * q;
    let mut phi = Vec::with_capacity((n + 1) as usize);
    for h in 0..=n {
        let w = if h == 0 {
            T::from_ratio(k as i64 * q, denom)
        } else if h == n {
            // lambda/(lambda+k) * (k/lambda)^n
            T::from_ratio(p, denom) * pow_ratio::<T>(k as i64 * q, p, n)
        } else {
            pow_ratio::<T>(k as i64 * q, p, h)
        };
        phi.push(w);
    }
    Ok(phi)
}

/// The stationary mass at the root, in the two-branch closed form
/// (geometric sums over even heights; empty sums are zero).
pub fn karytree_p_closed(k: u32, lambda: Rational64, n: u32) -> Result<f64> {
    check_params(k, lambda)?;
    let kf = k as f64;
    let lf = *lambda.numer() as f64 / *lambda.denom() as f64;
    let a = kf / (lf + kf);
    let ratio = kf / lf; // (k/lambda)
    let mut denom = a;
    if n % 2 == 1 {
        for i in 1..=(n / 2) {
            denom += ratio.powi(2 * i as i32);
        }
    } else {
        for i in 1..=(n / 2).saturating_sub(1) {
            denom += ratio.powi(2 * i as i32);
        }
        denom += lf / (lf + kf) * ratio.powi(n as i32);
    }
    Ok(a / denom)
}
