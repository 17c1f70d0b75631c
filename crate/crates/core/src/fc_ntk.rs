//! Neural tangent kernel of a bias-free fully connected ReLU network with L
//! hidden layers, evaluated by composing the arc-cosine kernels layer by
//! layer and normalizing so the on-sphere diagonal is 1.

use crate::error::{Error, Result};
use crate::primitives::{clamp_unit, clamp_unit_unchecked, kappa0_clamped, kappa1_clamped};
use serde::{Deserialize, Serialize};

/// Depth of a fully connected network, `layers >= 1` hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FcNtkSpec {
    layers: usize,
}

impl FcNtkSpec {
    pub fn new(layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::InvalidParameter {
                name: "layers",
                value: 0.0,
                constraint: "layers >= 1",
            });
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> usize {
        self.layers
    }
}

/// On-sphere kernel profile at cosine `u`.
///
/// Carries the pair (activation covariance, unnormalized kernel) through the
/// depth iteratively, so depths up to 10^4 cost O(L) with no stack growth,
/// and divides by L+1 at the end; the result is 1 at u = 1.
pub fn fc_ntk_sphere(u: f64, spec: FcNtkSpec) -> Result<f64> {
    Ok(fc_ntk_sphere_clamped(clamp_unit(u)?, spec.layers))
}

pub(crate) fn fc_ntk_sphere_clamped(u: f64, layers: usize) -> f64 {
    let mut cov = u;
    let mut kernel = u;
    for _ in 0..layers {
        let gate = kappa0_clamped(cov);
        // kappa1 maps into [0, 1] analytically; rounding can exceed by ulps.
        let next = clamp_unit_unchecked(kappa1_clamped(cov));
        kernel = kernel * gate + next;
        cov = next;
    }
    kernel / (layers as f64 + 1.0)
}

/// Kernel value for arbitrary nonzero inputs via degree-1 homogeneity:
/// `||x|| ||z||` times the on-sphere profile at the cosine of the angle.
pub fn fc_ntk_general(x: &[f64], z: &[f64], spec: FcNtkSpec) -> Result<f64> {
    let (nx, nz, u) = crate::vecs::norms_and_cosine(x, z)?;
    Ok(nx * nz * fc_ntk_sphere_clamped(u, spec.layers))
}
