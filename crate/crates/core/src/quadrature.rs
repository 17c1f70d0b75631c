//! Gauss-Jacobi quadrature for the weight (1-x)^a (1+x)^b on [-1, 1].
//!
//! Nodes are the roots of the degree-n Jacobi polynomial, located by Newton
//! iteration from trigonometric initial guesses; weights come from the
//! classical derivative formula. Dense eigen-solver (Golub-Welsch) routes
//! are O(n^3) and unusable at the orders the spectral module needs, so the
//! root-finding path is the primary one here.

use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
}

impl GaussJacobi {
    /// Builds the n-point rule for the weight (1-x)^alpha (1+x)^beta.
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "quad_order",
                value: n as f64,
                constraint: "quad_order >= 2",
            });
        }
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() || v <= -1.0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    constraint: "exponent > -1",
                });
            }
        }

        // Initial guesses x_k = cos(theta_k), ordered from +1 down to -1.
        let nf = n as f64;
        let mut nodes: Vec<f64> = (1..=n)
            .map(|k| {
                let theta =
                    (k as f64 + alpha / 2.0 - 0.25) * PI / (nf + (alpha + beta + 1.0) / 2.0);
                theta.cos()
            })
            .collect();

        // Newton sweeps, all nodes updated per sweep.
        let mut converged = false;
        for _ in 0..60 {
            let (pn, pn1) = eval_jacobi_pair(&nodes, n, alpha, beta);
            let mut max_step = 0.0f64;
            for k in 0..n {
                let x = nodes[k];
                let denom = (2.0 * nf + alpha + beta) * (1.0 - x * x);
                let deriv = (nf * (alpha - beta - (2.0 * nf + alpha + beta) * x) * pn[k]
                    + 2.0 * (nf + alpha) * (nf + beta) * pn1[k])
                    / denom;
                let step = pn[k] / deriv;
                let next = (x - step).clamp(-1.0 + 1e-300, 1.0 - 1e-300);
                max_step = max_step.max((next - x).abs());
                nodes[k] = next;
            }
            if max_step < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::QuadratureDiverged { degree: n });
        }

        nodes.reverse(); // ascending
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::QuadratureDiverged { degree: n });
        }

        // w_k = M / ((1 - x^2) P_n'(x)^2) with
        // M = 2^(a+b+1) G(n+a+1) G(n+b+1) / (G(n+1) G(n+a+b+1)).
        let ln_m = (alpha + beta + 1.0) * 2.0f64.ln() + ln_gamma(nf + alpha + 1.0)
            + ln_gamma(nf + beta + 1.0)
            - ln_gamma(nf + 1.0)
            - ln_gamma(nf + alpha + beta + 1.0);
        let m = ln_m.exp();
        let (pn, pn1) = eval_jacobi_pair(&nodes, n, alpha, beta);
        let weights: Vec<f64> = (0..n)
            .map(|k| {
                let x = nodes[k];
                let denom = (2.0 * nf + alpha + beta) * (1.0 - x * x);
                let deriv = (nf * (alpha - beta - (2.0 * nf + alpha + beta) * x) * pn[k]
                    + 2.0 * (nf + alpha) * (nf + beta) * pn1[k])
                    / denom;
                m / ((1.0 - x * x) * deriv * deriv)
            })
            .collect();

        Ok(Self {
            nodes,
            weights,
            alpha,
            beta,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Approximates the weighted integral of `f` over [-1, 1], summing in
    /// fixed node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Evaluates (P_n, P_{n-1}) at every point by the three-term recurrence.
fn eval_jacobi_pair(xs: &[f64], n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut prev: Vec<f64> = vec![1.0; xs.len()];
    let mut cur: Vec<f64> = xs
        .iter()
        .map(|&x| ((a + b + 2.0) * x + (a - b)) / 2.0)
        .collect();
    if n == 1 {
        return (cur, prev);
    }
    for j in 2..=n {
        let jf = j as f64;
        let c1 = 2.0 * jf * (jf + a + b) * (2.0 * jf + a + b - 2.0);
        let c2 = 2.0 * jf + a + b - 1.0;
        let c3 = (2.0 * jf + a + b) * (2.0 * jf + a + b - 2.0);
        let c4 = 2.0 * (jf + a - 1.0) * (jf + b - 1.0) * (2.0 * jf + a + b);
        let aa = a * a - b * b;
        for (k, &x) in xs.iter().enumerate() {
            let next = (c2 * (c3 * x + aa) * cur[k] - c4 * prev[k]) / c1;
            prev[k] = cur[k];
            cur[k] = next;
        }
    }
    (cur, prev)
}

type RuleCache = Mutex<HashMap<(usize, u64, u64), Arc<GaussJacobi>>>;

static CACHE: OnceLock<RuleCache> = OnceLock::new();

/// Cached rule lookup; spectra at the same (order, weight) reuse one rule.
pub fn gauss_jacobi_cached(n: usize, alpha: f64, beta: f64) -> Result<Arc<GaussJacobi>> {
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(GaussJacobi::new(n, alpha, beta)?);
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}
