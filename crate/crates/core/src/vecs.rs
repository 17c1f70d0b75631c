//! Small dense-vector helpers for the general (R^d) kernel evaluators.

use crate::error::{Error, Result};
use crate::primitives::clamp_unit_unchecked;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Returns (||x||, ||z||, cos(x, z)) with the cosine clamped into [-1, 1].
/// Zero-norm inputs are rejected; the row index in the error is 0 for `x`
/// and 1 for `z`.
pub(crate) fn norms_and_cosine(x: &[f64], z: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != z.len() {
        return Err(Error::ShapeMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            z.len()
        )));
    }
    let nx = norm(x);
    let nz = norm(z);
    if nx == 0.0 {
        return Err(Error::ZeroNormInput(0));
    }
    if nz == 0.0 {
        return Err(Error::ZeroNormInput(1));
    }
    let u = clamp_unit_unchecked(dot(x, z) / (nx * nz));
    Ok((nx, nz, u))
}
