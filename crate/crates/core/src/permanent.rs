//! Matrix permanent via Ryser's inclusion-exclusion formula with Gray-code subset updates.

use ndarray::ArrayView2;
use num_traits::{One, Zero};

use crate::error::{LopError, Result};
use crate::scalar::{Real, C};

/// Largest size accepted; `2^k` subsets are visited.
pub const MAX_PERMANENT_SIZE: usize = 30;

/// Permanent of a square complex matrix, `sum over sigma of prod_i X[i, sigma(i)]`.
///
/// Runs in `O(2^k k)`: consecutive subsets in Gray-code order differ by a single column, so the
/// row sums are updated with one addition or subtraction per row. The empty matrix has
/// permanent 1.
pub fn permanent<T: Real>(m: ArrayView2<C<T>>) -> Result<C<T>> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(LopError::NotSquare { rows, cols });
    }
    let k = rows;
    match k {
        0 => return Ok(C::one()),
        1 => return Ok(m[[0, 0]]),
        2 => return Ok(m[[0, 0]] * m[[1, 1]] + m[[0, 1]] * m[[1, 0]]),
        _ => {}
    }
    if k > MAX_PERMANENT_SIZE {
        return Err(LopError::PermanentTooLarge(k));
    }

    let mut row_sums = vec![C::<T>::zero(); k];
    let mut total = C::<T>::zero();
    let mut gray: u64 = 0;
    for g in 1u64..(1u64 << k) {
        let bit = g.trailing_zeros() as usize;
        gray ^= 1 << bit;
        let adding = gray & (1 << bit) != 0;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            if adding {
                *sum = *sum + m[[i, bit]];
            } else {
                *sum = *sum - m[[i, bit]];
            }
        }
        let prod = row_sums.iter().fold(C::<T>::one(), |acc, s| acc * s);
        // (-1)^(k - |S|)
        if (k - gray.count_ones() as usize).is_multiple_of(2) {
            total = total + prod;
        } else {
            total = total - prod;
        }
    }
    Ok(total)
}
