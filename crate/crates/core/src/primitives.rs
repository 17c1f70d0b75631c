//! Scalar kernel primitives shared by every kernel family: the degree-0 and
//! degree-1 arc-cosine kernels and the Laplace kernel restricted to the
//! sphere, plus its degree-1 homogeneous extension to R^d.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Half-width of the band around ±1 inside which cosines are clamped before
/// acos/sqrt. Dot products of nominally-unit vectors drift past 1 by a few
/// ulps; anything further out is a genuine domain error.
pub const CLAMP_BAND: f64 = 1e-12;

/// Validates that `u` is a cosine up to the clamp band and clamps it into
/// [-1, 1].
pub fn clamp_unit(u: f64) -> Result<f64> {
    if !u.is_finite() || u.abs() > 1.0 + CLAMP_BAND {
        return Err(Error::CosineOutOfRange(u));
    }
    Ok(u.clamp(-1.0, 1.0))
}

#[inline]
pub(crate) fn clamp_unit_unchecked(u: f64) -> f64 {
    u.clamp(-1.0, 1.0)
}

/// Degree-0 arc-cosine kernel `(1/pi) (pi - acos u)`, the dual of the ReLU
/// derivative. Maps [-1, 1] onto [0, 1], nondecreasing.
pub fn kappa0(u: f64) -> Result<f64> {
    Ok(kappa0_clamped(clamp_unit(u)?))
}

#[inline]
pub(crate) fn kappa0_clamped(u: f64) -> f64 {
    (PI - u.acos()) / PI
}

/// Degree-1 arc-cosine kernel `(1/pi) (u (pi - acos u) + sqrt(1 - u^2))`, the
/// dual of ReLU itself. Maps [-1, 1] onto [0, 1]; its derivative on (-1, 1)
/// is `kappa0`.
pub fn kappa1(u: f64) -> Result<f64> {
    Ok(kappa1_clamped(clamp_unit(u)?))
}

#[inline]
pub(crate) fn kappa1_clamped(u: f64) -> f64 {
    (u * (PI - u.acos()) + (1.0 - u * u).max(0.0).sqrt()) / PI
}

/// Laplace kernel on the sphere: `exp(-c sqrt(2 (1 - u)))`, which equals
/// `exp(-c ||x - z||)` for unit vectors with `u = x.z`.
pub fn laplace_sphere(u: f64, c: f64) -> Result<f64> {
    validate_scale(c)?;
    Ok(laplace_sphere_clamped(clamp_unit(u)?, c))
}

#[inline]
pub(crate) fn laplace_sphere_clamped(u: f64, c: f64) -> f64 {
    (-c * (2.0 * (1.0 - u)).max(0.0).sqrt()).exp()
}

pub(crate) fn validate_scale(c: f64) -> Result<()> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "c",
            value: c,
            constraint: "c > 0",
        });
    }
    Ok(())
}

/// Degree-1 homogeneous extension of the spherical Laplace kernel:
/// `||x|| ||z|| exp(-c sqrt(2 (1 - cos(x, z))))`.
pub fn homogenized_laplace(x: &[f64], z: &[f64], c: f64) -> Result<f64> {
    validate_scale(c)?;
    let (nx, nz, u) = crate::vecs::norms_and_cosine(x, z)?;
    Ok(nx * nz * laplace_sphere_clamped(u, c))
}
