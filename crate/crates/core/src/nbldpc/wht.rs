//! Walsh-Hadamard transform over the additive group of GF(2^8).
//!
//! Convolution of two distributions over field values under XOR becomes an
//! elementwise product after the transform, which is what the check-node
//! update relies on.

use crate::error::{Error, Result};
use crate::gf256::ORDER;

/// In-place fast transform, `F[a] = sum_b (-1)^{popcount(a & b)} v[b]`.
///
/// Eight butterfly stages of 128 add/subtract pairs. Applying it twice
/// scales the input by 256.
#[inline]
pub fn fwht_in_place(v: &mut [f64; ORDER]) {
    let mut h = 1;
    while h < ORDER {
        for block in (0..ORDER).step_by(2 * h) {
            for j in block..block + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
        h <<= 1;
    }
}

/// Checked, allocating wrapper around [`fwht_in_place`].
pub fn wht256(v: &[f64]) -> Result<Vec<f64>> {
    let arr: &[f64; ORDER] = v
        .try_into()
        .map_err(|_| Error::Input(format!("transform needs 256 values, got {}", v.len())))?;
    let mut out = *arr;
    fwht_in_place(&mut out);
    Ok(out.to_vec())
}
