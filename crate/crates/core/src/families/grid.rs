//! Reflecting simple walks on boxes of the integer grid, with per-axis
//! bounds for the generalized variant.

use crate::error::{Error, Result};
use crate::matrix::SparseStochasticMatrix;
use crate::numeric::Scalar;
use crate::state::{Parity, StateIndex};

/// Per-axis bound function `b_i(n)`, monotone nondecreasing in the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisBound {
    Const(u32),
    /// `b(n) = coeff * n`.
    Linear(u32),
}

impl AxisBound {
    pub fn eval(&self, n: u32) -> u32 {
        match *self {
            AxisBound::Const(c) => c,
            AxisBound::Linear(c) => c * n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AxisBound::Const(c) => c >= 1,
            AxisBound::Linear(c) => c >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("axis bound must be positive".into()))
        }
    }
}

const AXIS_BITS: u32 = 16;
const AXIS_OFFSET: i64 = 1 << (AXIS_BITS - 1);
pub const MAX_AXES: usize = 8;
pub const MAX_COORD: i64 = AXIS_OFFSET - 1;

/// Packs signed coordinates into a level-independent state key.
pub fn pack_coords(coords: &[i64]) -> u128 {
    debug_assert!(coords.len() <= MAX_AXES);
    let mut key = 0u128;
    for (i, &c) in coords.iter().enumerate() {
        debug_assert!(c.abs() <= MAX_COORD);
        key |= ((c + AXIS_OFFSET) as u128) << (AXIS_BITS * i as u32);
    }
    key
}

pub fn unpack_coords(key: u128, d: usize) -> Vec<i64> {
    (0..d)
        .map(|i| (((key >> (AXIS_BITS * i as u32)) & 0xffff) as i64) - AXIS_OFFSET)
        .collect()
}

pub fn genbox_state_count(bounds: &[AxisBound], n: u32) -> u64 {
    bounds
        .iter()
        .fold(1u64, |acc, b| acc.saturating_mul(2 * b.eval(n) as u64 + 1))
}

/// Reflecting walk on `prod_i {-b_i(n), .., b_i(n)}`: pick an axis and a
/// direction with probability `1/(2d)` each; on a face (`|u_i| = b_i(n)`)
/// the single admissible move on that axis has probability `1/d`.
pub fn build_genbox<T: Scalar>(
    bounds: &[AxisBound],
    n: u32,
    cap: u64,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    let d = bounds.len();
    if d == 0 || d > MAX_AXES {
        return Err(Error::InvalidParameter(format!("dimension must be in 1..={MAX_AXES}, got {d}")));
    }
    for b in bounds {
        b.validate()?;
    }
    if n < 1 {
        return Err(Error::InvalidParameter("level must be >= 1".into()));
    }
    let states = genbox_state_count(bounds, n);
    if states > cap {
        return Err(Error::StateCapExceeded { states, cap });
    }
    let b: Vec<i64> = bounds.iter().map(|bi| bi.eval(n) as i64).collect();
    if b.iter().any(|&bi| bi > MAX_COORD) {
        return Err(Error::InvalidParameter(format!("axis bound exceeds packing range {MAX_COORD}")));
    }

    // Origin first, then odometer order over the remaining states.
    let mut order: Vec<Vec<i64>> = Vec::with_capacity(states as usize);
    order.push(vec![0; d]);
    let mut coords: Vec<i64> = b.iter().map(|&bi| -bi).collect();
    'outer: loop {
        if coords.iter().any(|&c| c != 0) {
            order.push(coords.clone());
        }
        for i in 0..d {
            if coords[i] < b[i] {
                coords[i] += 1;
                continue 'outer;
            }
            coords[i] = -b[i];
        }
        break;
    }
    debug_assert_eq!(order.len() as u64, states);

    let mut index_states = Vec::with_capacity(order.len());
    for c in &order {
        let parity = if c.iter().map(|x| x.unsigned_abs()).sum::<u64>() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        };
        index_states.push((pack_coords(c), parity));
    }
    let idx = StateIndex::new(n, index_states);

    let half = T::from_ratio(1, 2 * d as i64);
    let full = T::from_ratio(1, d as i64);
    let mut rows: Vec<Vec<(u32, T)>> = Vec::with_capacity(order.len());
    for c in &order {
        let mut row: Vec<(u32, T)> = Vec::with_capacity(2 * d);
        for i in 0..d {
            if c[i].abs() == b[i] {
                let mut to = c.clone();
                to[i] -= c[i].signum();
                row.push((idx.index_of(pack_coords(&to)).unwrap(), full.clone()));
            } else {
                for step in [-1i64, 1] {
                    let mut to = c.clone();
                    to[i] += step;
                    row.push((idx.index_of(pack_coords(&to)).unwrap(), half.clone()));
                }
            }
        }
        rows.push(row);
    }
    let matrix = SparseStochasticMatrix::from_rows(order.len(), rows);
    Ok((idx, matrix))
}

/// The symmetric box `{-n, .., n}^d`.
pub fn build_box<T: Scalar>(
    d: u32,
    n: u32,
    cap: u64,
) -> Result<(StateIndex, SparseStochasticMatrix<T>)> {
    if d < 1 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    build_genbox(&vec![AxisBound::Linear(1); d as usize], n, cap)
}

/// Detailed-balance weights `phi(v) = 2^{-|{i : |v_i| = b_i(n)}|}`.
pub fn genbox_weights<T: Scalar>(bounds: &[AxisBound], idx: &StateIndex, n: u32) -> Vec<T> {
    let d = bounds.len();
    let b: Vec<i64> = bounds.iter().map(|bi| bi.eval(n) as i64).collect();
    (0..idx.len() as u32)
        .map(|i| {
            let coords = unpack_coords(idx.key(i), d);
            let faces = coords.iter().zip(&b).filter(|(c, &bi)| c.abs() == bi).count();
            T::from_ratio(1, 1i64 << faces)
        })
        .collect()
}
