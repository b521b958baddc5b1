//! Simple walk on the 0-1 hypercube skeleton with a growing dimension, and
//! its exact Hamming-weight projection.
//!
//! A state of `{0,1}^n` is encoded as a bitmask; growing the dimension
//! appends the new coordinate as 0, so masks (and the all-zeros origin) are
//! stable across levels.

use crate::error::{Error, Result};
use crate::matrix::SparseStochasticMatrix;
use crate::numeric::Scalar;
use crate::state::{Parity, StateIndex};

pub fn cube_state_count(n: u32) -> u64 {
    1u64.checked_shl(n).unwrap_or(u64::MAX)
}

/// Walk on `{0,1}^n`: each of the `n` neighbors with probability `1/n`.
pub fn build_hypercube<T: Scalar>(n: u32, cap: u64) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    if n < 1 {
        return Err(Error::InvalidParameter("hypercube dimension must be >= 1".into()));
    }
    let states = cube_state_count(n);
    if states > cap {
        return Err(Error::StateCapExceeded { states, cap });
    }
    let states = states as usize;
    let step = T::from_ratio(1, n as i64);
    let mut index_states = Vec::with_capacity(states);
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(states);
    for mask in 0..states as u64 {
        let parity = if mask.count_ones() % 2 == 0 { Parity::Even } else { Parity::Odd };
        index_states.push((mask as u128, parity));
        let row = (0..n).map(|bit| ((mask ^ (1 << bit)) as u32, step.clone())).collect();
        rows.push(row);
    }
    Ok((StateIndex::new(n, index_states), SparseStochasticMatrix::from_rows(states, rows)))
}

/// Exact projection onto the Hamming weight: the `(n+1)`-state birth-death
/// chain with down-probability `h/n` and up-probability `1 - h/n`.
pub fn build_weight_chain<T: Scalar>(n: u32) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    if n < 1 {
        return Err(Error::InvalidParameter("hypercube dimension must be >= 1".into()));
    }
    let states = (n + 1) as usize;
    let mut index_states = Vec::with_capacity(states);
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(states);
    for h in 0..=n {
        let parity = if h % 2 == 0 { Parity::Even } else { Parity::Odd };
        index_states.push((h as u128, parity));
        let mut row: Vec<(u32, T)> = Vec::new();
        if h > 0 {
            row.push((h - 1, T::from_ratio(h as i64, n as i64)));
        }
        if h < n {
            row.push((h + 1, T::from_ratio((n - h) as i64, n as i64)));
        }
        rows.push(row);
    }
    Ok((StateIndex::new(n, index_states), SparseStochasticMatrix::from_rows(states, rows)))
}

/// Weight-chain detailed-balance weights: the binomial coefficients
/// `C(n, h)` (the full-cube walk has uniform weights).
pub fn weight_chain_weights<T: Scalar>(n: u32) -> Vec<T> {
    let mut phi = Vec::with_capacity((n + 1) as usize);
    let mut acc = T::one();
    phi.push(acc.clone());
    for h in 0..n {
        acc = acc * T::from_ratio((n - h) as i64, (h + 1) as i64);
        phi.push(acc.clone());
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_cube_is_a_flip_chain() {
        let (_, m) = build_hypercube::<f64>(1, 1 << 22).unwrap();
        assert_eq!(m.entry(0, 1), 1.0);
        assert_eq!(m.entry(1, 0), 1.0);
    }

    #[test]
    fn origin_row_at_dimension_three() {
        let (idx, m) = build_hypercube::<f64>(3, 1 << 22).unwrap();
        assert_eq!(idx.len(), 8);
        for mask in [0b001u32, 0b010, 0b100] {
            assert!((m.entry(0, mask) - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(m.entry(0, 0b011), 0.0);
    }

    #[test]
    fn embedding_pads_with_zero() {
        let (small, _) = build_hypercube::<f64>(2, 1 << 22).unwrap();
        let (large, _) = build_hypercube::<f64>(3, 1 << 22).unwrap();
        let map = small.embed_into(&large).unwrap();
        // Bitmask identity: (0,1) = mask 2 keeps index 2 under zero-padding.
        assert_eq!(map, vec![0, 1, 2, 3]);
    }

    #[test]
    fn weight_chain_probabilities() {
        let (_, q) = build_weight_chain::<f64>(2).unwrap();
        assert_eq!(q.entry(1, 0), 0.5);
        assert_eq!(q.entry(1, 2), 0.5);
        assert_eq!(q.entry(0, 1), 1.0);
        assert_eq!(q.entry(2, 1), 1.0);
    }

    #[test]
    fn weight_chain_weights_are_binomials() {
        let phi = weight_chain_weights::<f64>(4);
        assert_eq!(phi, vec![1.0, 4.0, 6.0, 4.0, 1.0]);
    }
}
