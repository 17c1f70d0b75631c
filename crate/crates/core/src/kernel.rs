//! Unified handle over the implemented kernel families, used wherever a
//! kernel is chosen at runtime (spectra, coefficient extraction, Gram
//! assembly, the CLI).

use crate::error::{Error, Result};
use crate::fc_ntk::{fc_ntk_sphere_clamped, FcNtkSpec};
use crate::primitives::{clamp_unit, laplace_sphere_clamped, validate_scale};
use crate::res_ntk::{res_ntk_sphere_clamped, AlphaRule, ResNtkSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    FcNtk { layers: usize },
    ResNtk { layers: usize, alpha: f64, tau: f64 },
    Laplace { scale: f64 },
    HomLaplace { scale: f64 },
}

impl KernelSpec {
    pub fn fc(layers: usize) -> Result<Self> {
        FcNtkSpec::new(layers)?;
        Ok(KernelSpec::FcNtk { layers })
    }

    pub fn res(layers: usize, alpha: f64, tau: f64) -> Result<Self> {
        ResNtkSpec::new(layers, alpha, tau)?;
        Ok(KernelSpec::ResNtk { layers, alpha, tau })
    }

    pub fn res_with_rule(layers: usize, rule: AlphaRule, tau: f64) -> Result<Self> {
        let spec = ResNtkSpec::from_rule(layers, rule, tau)?;
        Ok(KernelSpec::ResNtk {
            layers,
            alpha: spec.alpha(),
            tau,
        })
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        validate_scale(scale)?;
        Ok(KernelSpec::Laplace { scale })
    }

    pub fn hom_laplace(scale: f64) -> Result<Self> {
        validate_scale(scale)?;
        Ok(KernelSpec::HomLaplace { scale })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::FcNtk { layers } => FcNtkSpec::new(layers).map(|_| ()),
            KernelSpec::ResNtk { layers, alpha, tau } => {
                ResNtkSpec::new(layers, alpha, tau).map(|_| ())
            }
            KernelSpec::Laplace { scale } | KernelSpec::HomLaplace { scale } => {
                validate_scale(scale)
            }
        }
    }

    /// Zonal profile at cosine `u`. All four families coincide with their
    /// vector form on unit inputs.
    pub fn eval_sphere(&self, u: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.eval_sphere_clamped(clamp_unit(u)?))
    }

    pub(crate) fn eval_sphere_clamped(&self, u: f64) -> f64 {
        match *self {
            KernelSpec::FcNtk { layers } => fc_ntk_sphere_clamped(u, layers),
            KernelSpec::ResNtk { layers, alpha, tau } => {
                let spec = ResNtkSpec::new(layers, alpha, tau).expect("validated spec");
                res_ntk_sphere_clamped(u, &spec)
            }
            KernelSpec::Laplace { scale } | KernelSpec::HomLaplace { scale } => {
                laplace_sphere_clamped(u, scale)
            }
        }
    }

    /// Kernel value for vectors in R^d. The NTK families and the homogenized
    /// Laplace kernel extend from the sphere by degree-1 homogeneity (or the
    /// full recursion when biased); the plain Laplace kernel is
    /// `exp(-c ||x - z||)`.
    pub fn eval(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        self.validate()?;
        match *self {
            KernelSpec::FcNtk { layers } => {
                crate::fc_ntk::fc_ntk_general(x, z, FcNtkSpec::new(layers)?)
            }
            KernelSpec::ResNtk { layers, alpha, tau } => {
                crate::res_ntk::res_ntk_general(x, z, &ResNtkSpec::new(layers, alpha, tau)?)
            }
            KernelSpec::Laplace { scale } => {
                if x.len() != z.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "vectors of length {} and {}",
                        x.len(),
                        z.len()
                    )));
                }
                let dist = x
                    .iter()
                    .zip(z)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                Ok((-scale * dist).exp())
            }
            KernelSpec::HomLaplace { scale } => crate::primitives::homogenized_laplace(x, z, scale),
        }
    }

    /// True when the kernel needs nonzero input norms (everything except the
    /// plain Laplace kernel).
    pub fn requires_nonzero_inputs(&self) -> bool {
        !matches!(self, KernelSpec::Laplace { .. })
    }

    /// Profile value at u = 1 (the Gram diagonal on unit-norm data).
    pub fn diagonal_value(&self) -> f64 {
        self.eval_sphere_clamped(1.0)
    }

    pub fn label(&self) -> String {
        match *self {
            KernelSpec::FcNtk { layers } => format!("fcntk(layers={layers})"),
            KernelSpec::ResNtk { layers, alpha, tau } => {
                format!("resntk(layers={layers}, alpha={alpha}, tau={tau})")
            }
            KernelSpec::Laplace { scale } => format!("laplace(c={scale})"),
            KernelSpec::HomLaplace { scale } => format!("homlaplace(c={scale})"),
        }
    }
}
