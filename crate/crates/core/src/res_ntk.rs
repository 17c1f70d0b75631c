//! Neural tangent kernel of a fully connected residual network with L
//! blocks, skip/residual balance `alpha`, and bias scale `tau`.
//!
//! On the sphere the recursion collapses to scalar sequences: the block
//! kernel K_l, its normalizer (1+alpha^2)^l, the induced cosines, and the
//! backward weights B_l accumulated from the output side. `tau` enters only
//! the kappa0 summand, never the K recursion, and with `tau > 0` the kernel
//! is deliberately left unnormalized.

use crate::error::{Error, Result};
use crate::primitives::{clamp_unit, clamp_unit_unchecked, kappa0_clamped, kappa1_clamped};
use serde::{Deserialize, Serialize};

/// Rule resolving the skip/residual balance from the depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaRule {
    /// Depth-independent balance.
    Constant(f64),
    /// `alpha = L^{-gamma}` with `0.5 <= gamma <= 1`.
    PowerLaw(f64),
}

impl AlphaRule {
    pub fn resolve(&self, layers: usize) -> Result<f64> {
        match *self {
            AlphaRule::Constant(a) => {
                if !a.is_finite() || a <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "alpha",
                        value: a,
                        constraint: "alpha > 0",
                    });
                }
                Ok(a)
            }
            AlphaRule::PowerLaw(gamma) => {
                if !(0.5..=1.0).contains(&gamma) {
                    return Err(Error::InvalidParameter {
                        name: "gamma",
                        value: gamma,
                        constraint: "0.5 <= gamma <= 1",
                    });
                }
                Ok((layers as f64).powf(-gamma))
            }
        }
    }
}

/// Residual-network kernel hyperparameters. The alpha rule is resolved at
/// construction; downstream code only ever sees the concrete value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResNtkSpec {
    layers: usize,
    alpha: f64,
    tau: f64,
}

impl ResNtkSpec {
    pub fn new(layers: usize, alpha: f64, tau: f64) -> Result<Self> {
        if layers == 0 {
            return Err(Error::InvalidParameter {
                name: "layers",
                value: 0.0,
                constraint: "layers >= 1",
            });
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "alpha > 0",
            });
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau,
                constraint: "tau >= 0",
            });
        }
        // (1+alpha^2)^{L-1} must stay finite; the normalizer overflows past
        // exp(~709).
        if (layers as f64 - 1.0) * (1.0 + alpha * alpha).ln() > 700.0 {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "(1+alpha^2)^(layers-1) representable in f64",
            });
        }
        Ok(Self { layers, alpha, tau })
    }

    pub fn from_rule(layers: usize, rule: AlphaRule, tau: f64) -> Result<Self> {
        Self::new(layers, rule.resolve(layers)?, tau)
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Full record of one on-sphere recursion: everything needed to re-assemble
/// the kernel value or to probe per-block invariants.
///
/// Index conventions, with L = `block_kernel.len()`:
/// - `block_kernel[l]` = K_l and `cosines[l]` = K_l / (1+alpha^2)^l for
///   l = 0..L-1, with `scales[l]` = (1+alpha^2)^l;
/// - `back_weights[l]` = B_{l+2}, so `back_weights[L-1]` = B_{L+1} = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrace {
    pub u: f64,
    pub tau: f64,
    pub block_kernel: Vec<f64>,
    pub cosines: Vec<f64>,
    pub scales: Vec<f64>,
    pub back_weights: Vec<f64>,
    pub normalizer: f64,
}

impl LayerTrace {
    /// Re-assembles the kernel value from the stored per-block quantities.
    pub fn resum(&self) -> f64 {
        let layers = self.block_kernel.len();
        let tau2 = self.tau * self.tau;
        let mut sum = 0.0;
        for l in 1..=layers {
            let cos = self.cosines[l - 1];
            sum += self.back_weights[l - 1]
                * (self.scales[l - 1] * kappa1_clamped(cos)
                    + (self.block_kernel[l - 1] + tau2) * kappa0_clamped(cos));
        }
        self.normalizer * sum
    }
}

/// On-sphere kernel profile at cosine `u`.
pub fn res_ntk_sphere(u: f64, spec: &ResNtkSpec) -> Result<f64> {
    Ok(res_ntk_sphere_clamped(clamp_unit(u)?, spec))
}

pub(crate) fn res_ntk_sphere_clamped(u: f64, spec: &ResNtkSpec) -> f64 {
    let layers = spec.layers;
    let a2 = spec.alpha * spec.alpha;
    let growth = 1.0 + a2;
    let tau2 = spec.tau * spec.tau;

    let mut kvals = Vec::with_capacity(layers);
    let mut cosines = Vec::with_capacity(layers);
    let mut k = u;
    let mut scale = 1.0;
    for l in 0..layers {
        if l > 0 {
            k += a2 * scale * kappa1_clamped(cosines[l - 1]);
            scale *= growth;
        }
        kvals.push(k);
        cosines.push(clamp_unit_unchecked(k / scale));
    }
    let top_scale = scale; // (1+alpha^2)^{L-1}

    let mut back = 1.0; // B_{L+1}
    let mut sum = 0.0;
    for l in (1..=layers).rev() {
        let cos = cosines[l - 1];
        sum += back * (scale * kappa1_clamped(cos) + (kvals[l - 1] + tau2) * kappa0_clamped(cos));
        back *= 1.0 + a2 * kappa0_clamped(cos);
        scale /= growth;
    }
    sum / (2.0 * layers as f64 * top_scale)
}

/// Kernel value for arbitrary nonzero inputs. Bias-free kernels use the
/// degree-1 homogeneous shortcut through the sphere profile; with `tau > 0`
/// homogeneity is lost and the full vector recursion runs instead.
pub fn res_ntk_general(x: &[f64], z: &[f64], spec: &ResNtkSpec) -> Result<f64> {
    let (nx, nz, u) = crate::vecs::norms_and_cosine(x, z)?;
    if spec.tau == 0.0 {
        return Ok(nx * nz * res_ntk_sphere_clamped(u, spec));
    }
    Ok(res_ntk_general_biased(nx, nz, u, spec))
}

fn res_ntk_general_biased(nx: f64, nz: f64, u: f64, spec: &ResNtkSpec) -> f64 {
    let layers = spec.layers;
    let a2 = spec.alpha * spec.alpha;
    let growth = 1.0 + a2;
    let tau2 = spec.tau * spec.tau;

    let mut kxz = nx * nz * u;
    let mut kxx = nx * nx;
    let mut kzz = nz * nz;
    let mut kvals = Vec::with_capacity(layers);
    let mut norms = Vec::with_capacity(layers);
    let mut cosines = Vec::with_capacity(layers);
    for l in 0..layers {
        if l > 0 {
            let v = norms[l - 1];
            kxz += a2 * v * kappa1_clamped(cosines[l - 1]);
            kxx *= growth;
            kzz *= growth;
        }
        let v = (kxx * kzz).sqrt();
        kvals.push(kxz);
        norms.push(v);
        cosines.push(clamp_unit_unchecked(kxz / v));
    }

    let mut back = 1.0;
    let mut sum = 0.0;
    for l in (1..=layers).rev() {
        let cos = cosines[l - 1];
        sum += back
            * (norms[l - 1] * kappa1_clamped(cos) + (kvals[l - 1] + tau2) * kappa0_clamped(cos));
        back *= 1.0 + a2 * kappa0_clamped(cos);
    }
    sum / (2.0 * layers as f64 * growth.powi(layers as i32 - 1))
}

/// Runs the on-sphere recursion and returns every intermediate quantity.
pub fn res_ntk_trace(u: f64, spec: &ResNtkSpec) -> Result<LayerTrace> {
    let u = clamp_unit(u)?;
    let layers = spec.layers;
    let a2 = spec.alpha * spec.alpha;
    let growth = 1.0 + a2;

    let mut block_kernel = Vec::with_capacity(layers);
    let mut cosines = Vec::with_capacity(layers);
    let mut scales = Vec::with_capacity(layers);
    let mut k = u;
    let mut scale = 1.0;
    for l in 0..layers {
        if l > 0 {
            k += a2 * scales[l - 1] * kappa1_clamped(cosines[l - 1]);
            scale *= growth;
        }
        block_kernel.push(k);
        scales.push(scale);
        cosines.push(clamp_unit_unchecked(k / scale));
    }

    let mut back_weights = vec![1.0; layers];
    for l in (2..=layers).rev() {
        back_weights[l - 2] = back_weights[l - 1] * (1.0 + a2 * kappa0_clamped(cosines[l - 1]));
    }

    Ok(LayerTrace {
        u,
        tau: spec.tau,
        block_kernel,
        cosines,
        scales,
        back_weights,
        normalizer: 1.0 / (2.0 * layers as f64 * scales[layers - 1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fc_ntk::{fc_ntk_sphere, FcNtkSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn spec_validation() {
        assert!(ResNtkSpec::new(0, 1.0, 0.0).is_err());
        assert!(ResNtkSpec::new(5, 0.0, 0.0).is_err());
        assert!(ResNtkSpec::new(5, 1.0, -0.1).is_err());
        assert!(ResNtkSpec::new(10_000, 1.0, 0.0).is_err()); // normalizer overflow
        assert!(ResNtkSpec::new(10_000, 1e-4, 0.0).is_ok());
        assert_abs_diff_eq!(
            AlphaRule::PowerLaw(0.5).resolve(16).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert!(AlphaRule::PowerLaw(0.4).resolve(16).is_err());
        assert!(AlphaRule::Constant(-1.0).resolve(16).is_err());
    }

    #[test]
    fn unit_diagonal_for_bias_free_kernel() {
        for &(layers, alpha) in &[(1, 0.5), (4, 0.5), (7, 1.0), (60, 0.1), (100, 1.0)] {
            let spec = ResNtkSpec::new(layers, alpha, 0.0).unwrap();
            let v = res_ntk_sphere(1.0, &spec).unwrap();
            assert!((v - 1.0).abs() < 1e-12, "L={layers} alpha={alpha}: {v}");
        }
    }

    #[test]
    fn single_block_equals_two_layer_fc_kernel_for_any_alpha() {
        for &alpha in &[0.1, 1.0, 10.0] {
            let spec = ResNtkSpec::new(1, alpha, 0.0).unwrap();
            let fc = FcNtkSpec::new(1).unwrap();
            for i in 0..=1000 {
                let u = -1.0 + 2.0 * i as f64 / 1000.0;
                let r = res_ntk_sphere(u, &spec).unwrap();
                let f = fc_ntk_sphere(u, fc).unwrap();
                assert!((r - f).abs() < 1e-14, "alpha={alpha} u={u}: {r} vs {f}");
            }
        }
    }

    /// Straight-line transcription of the vector-form recursion, kept
    /// independent of the library path on purpose.
    fn vector_form_oracle(x: &[f64], z: &[f64], layers: usize, alpha: f64, tau: f64) -> f64 {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let a2 = alpha * alpha;
        let mut kxz = vec![dot(x, z)];
        let mut kxx = vec![dot(x, x)];
        let mut kzz = vec![dot(z, z)];
        for l in 1..layers {
            let v = (kxx[l - 1] * kzz[l - 1]).sqrt();
            let u = (kxz[l - 1] / v).clamp(-1.0, 1.0);
            kxz.push(kxz[l - 1] + a2 * v * crate::primitives::kappa1(u).unwrap());
            kxx.push(kxx[l - 1] + a2 * kxx[l - 1] * crate::primitives::kappa1(1.0).unwrap());
            kzz.push(kzz[l - 1] + a2 * kzz[l - 1] * crate::primitives::kappa1(1.0).unwrap());
        }
        let mut b = vec![1.0; layers + 2]; // b[l] = B_l, valid for l = 2..=L+1
        for l in (2..=layers).rev() {
            let v = (kxx[l - 2] * kzz[l - 2]).sqrt();
            let u = (kxz[l - 2] / v).clamp(-1.0, 1.0);
            b[l] = b[l + 1] * (1.0 + a2 * crate::primitives::kappa0(u).unwrap());
        }
        let c = 1.0 / (2.0 * layers as f64 * (1.0 + a2).powi(layers as i32 - 1));
        let mut sum = 0.0;
        for l in 1..=layers {
            let v = (kxx[l - 1] * kzz[l - 1]).sqrt();
            let u = (kxz[l - 1] / v).clamp(-1.0, 1.0);
            sum += b[l + 1]
                * (v * crate::primitives::kappa1(u).unwrap()
                    + (kxz[l - 1] + tau * tau) * crate::primitives::kappa0(u).unwrap());
        }
        c * sum
    }

    #[test]
    fn sphere_path_matches_vector_form_oracle() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let spec = ResNtkSpec::new(2, 1.0, 0.0).unwrap();
        let fast = res_ntk_sphere(0.0, &spec).unwrap();
        let oracle = vector_form_oracle(&e1, &e2, 2, 1.0, 0.0);
        assert!((fast - oracle).abs() < 1e-12, "{fast} vs {oracle}");

        for &(layers, alpha, tau) in &[(3usize, 0.7, 0.0), (5, 1.3, 0.5), (8, 0.2, 1.0)] {
            let spec = ResNtkSpec::new(layers, alpha, tau).unwrap();
            for &u in &[-0.8, -0.3, 0.0, 0.4, 0.9] {
                let x = [1.0, 0.0, 0.0];
                let z = [u, (1.0 - u * u).sqrt(), 0.0];
                let fast = res_ntk_sphere(u, &spec).unwrap();
                let oracle = vector_form_oracle(&x, &z, layers, alpha, tau);
                assert!(
                    (fast - oracle).abs() < 1e-12,
                    "L={layers} a={alpha} tau={tau} u={u}: {fast} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn biased_general_path_reduces_to_sphere_on_unit_vectors() {
        let spec = ResNtkSpec::new(6, 0.8, 1.0).unwrap();
        let u = 0.37;
        let x = [1.0, 0.0, 0.0];
        let z = [u, (1.0 - u * u).sqrt(), 0.0];
        let gen = res_ntk_general(&x, &z, &spec).unwrap();
        let sph = res_ntk_sphere(u, &spec).unwrap();
        assert_abs_diff_eq!(gen, sph, epsilon = 1e-13);
    }

    #[test]
    fn bias_free_homogeneity_and_diagonal() {
        let spec = ResNtkSpec::new(3, 1.0, 0.0).unwrap();
        let x = [0.3, -0.4, 1.2];
        let z = [2.0, 0.5, -0.7];
        let base = res_ntk_general(&x, &z, &spec).unwrap();
        let x3: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let z5: Vec<f64> = z.iter().map(|v| 5.0 * v).collect();
        let scaled = res_ntk_general(&x3, &z5, &spec).unwrap();
        assert_abs_diff_eq!(scaled, 15.0 * base, epsilon = 1e-10 * scaled.abs());

        let n2 = x.iter().map(|v| v * v).sum::<f64>();
        assert_abs_diff_eq!(
            res_ntk_general(&x, &x, &spec).unwrap(),
            n2,
            epsilon = 1e-12 * n2
        );

        let e1 = [1.0, 0.0, 0.0];
        assert_abs_diff_eq!(
            res_ntk_general(&e1, &e1, &spec).unwrap(),
            1.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn trace_norm_factor_and_geometry() {
        // At u = 1 the block kernel telescopes to the pure growth powers.
        let spec = ResNtkSpec::new(4, 0.5, 0.0).unwrap();
        let trace = res_ntk_trace(1.0, &spec).unwrap();
        for l in 0..4 {
            assert_abs_diff_eq!(
                trace.block_kernel[l],
                1.25f64.powi(l as i32),
                epsilon = 1e-13
            );
        }

        for layers in [10usize, 100] {
            let spec = ResNtkSpec::new(layers, 0.3, 0.0).unwrap();
            let trace = res_ntk_trace(1.0, &spec).unwrap();
            for l in 0..layers {
                let expect = 1.09f64.powi(l as i32);
                assert!(
                    (trace.block_kernel[l] / expect - 1.0).abs() < 1e-12,
                    "L={layers} l={l}"
                );
            }
        }

        // Cosine sequence is bounded and nondecreasing.
        let spec = ResNtkSpec::new(10, 1.0, 0.0).unwrap();
        let trace = res_ntk_trace(0.3, &spec).unwrap();
        for w in trace.cosines.windows(2) {
            assert!(w[1] >= w[0] - 1e-15, "cosines not monotone: {w:?}");
        }
        assert!(trace.cosines.iter().all(|c| c.abs() <= 1.0));
        assert_eq!(*trace.back_weights.last().unwrap(), 1.0);

        let spec = ResNtkSpec::new(2, 1.0, 0.0).unwrap();
        let trace = res_ntk_trace(-1.0, &spec).unwrap();
        assert_eq!(trace.block_kernel[0], -1.0);
    }

    #[test]
    fn trace_resum_reproduces_sphere_value() {
        for &(layers, alpha, tau) in &[(1usize, 0.5, 0.0), (7, 1.0, 0.0), (20, 0.2, 1.0)] {
            let spec = ResNtkSpec::new(layers, alpha, tau).unwrap();
            for &u in &[-1.0, -0.435, 0.0, 0.671, 1.0] {
                let direct = res_ntk_sphere(u, &spec).unwrap();
                let resummed = res_ntk_trace(u, &spec).unwrap().resum();
                assert!(
                    (direct - resummed).abs() < 1e-14,
                    "L={layers} u={u}: {direct} vs {resummed}"
                );
            }
        }
    }

    #[test]
    fn depth_stability_depends_on_alpha_scaling() {
        // Constant alpha concentrates mass near u = 1 as depth grows.
        let shallow = ResNtkSpec::new(5, 1.0, 0.0).unwrap();
        let deep = ResNtkSpec::new(100, 1.0, 0.0).unwrap();
        let at_half_shallow = res_ntk_sphere(0.5, &shallow).unwrap();
        let at_half_deep = res_ntk_sphere(0.5, &deep).unwrap();
        assert!(at_half_deep < at_half_shallow);

        // alpha = 1/L keeps the profile stable.
        let shallow = ResNtkSpec::new(5, 1.0 / 5.0, 0.0).unwrap();
        let deep = ResNtkSpec::new(100, 1.0 / 100.0, 0.0).unwrap();
        let mut sup = 0.0f64;
        for i in 0..=1000 {
            let u = -0.9 + 1.8 * i as f64 / 1000.0;
            let d = (res_ntk_sphere(u, &shallow).unwrap() - res_ntk_sphere(u, &deep).unwrap())
                .abs();
            sup = sup.max(d);
        }
        assert!(sup < 0.05, "sup deviation {sup}");
    }
}
