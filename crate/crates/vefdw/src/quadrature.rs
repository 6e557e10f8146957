//! Gauss-Jacobi quadrature on (0, 1) with weight (1-z)^a z^b.
//!
//! Nodes and weights come from the Golub-Welsch algorithm: eigenvalues of the
//! symmetric tridiagonal Jacobi matrix built from the three-term recurrence,
//! with weights proportional to the squared first components of the
//! eigenvectors. The doubly singular kernel of the generalized identity
//! function is exactly of this weight class, so the rule sees only the smooth
//! factor of the integrand.

use crate::error::{Error, Result};
use crate::special::beta;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct GaussJacobiRule {
    alpha: f64,
    beta: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussJacobiRule {
    /// n-point rule for ∫_0^1 (1-z)^a z^b f(z) dz, exact for polynomial f of
    /// degree <= 2n-1. Requires n >= 1 and a, b > -1.
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidQuadrature("node count must be >= 1".into()));
        }
        if !(a > -1.0) || !(b > -1.0) {
            return Err(Error::InvalidQuadrature(format!(
                "Jacobi exponents must exceed -1, got a = {a}, b = {b}"
            )));
        }

        // Jacobi matrix for the weight (1-x)^a (1+x)^b on (-1, 1).
        let mut m = DMatrix::<f64>::zeros(n, n);
        m[(0, 0)] = (b - a) / (a + b + 2.0);
        for k in 1..n {
            let kf = k as f64;
            let denom = 2.0 * kf + a + b;
            m[(k, k)] = (b * b - a * a) / (denom * (denom + 2.0));
            // For k = 1 the general expression carries the removable factor
            // (k + a + b)/(denom - 1), which is 0/0 when a + b = -1; the
            // reduced form avoids it.
            let sq = if k == 1 {
                (1.0 + a) * (1.0 + b) / (denom * denom * (denom + 1.0))
            } else {
                kf * (kf + a) * (kf + b) * (kf + a + b)
                    / (denom * denom * (denom + 1.0) * (denom - 1.0))
            };
            let off = 2.0 * sq.sqrt();
            m[(k, k - 1)] = off;
            m[(k - 1, k)] = off;
        }

        let eigen = m
            .try_symmetric_eigen(f64::EPSILON, 100_000)
            .ok_or(Error::EigenFailure { n })?
            .try_into_sorted_pairs()
            .map_err(|_| Error::EigenFailure { n })?;

        // Map x in (-1,1) to z = (1+x)/2 and scale so the weights sum to the
        // zeroth moment on (0,1), which is B(b+1, a+1).
        let mu0 = beta(b + 1.0, a + 1.0);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (node, first) in eigen {
            nodes.push(0.5 * (node + 1.0));
            weights.push(mu0 * first * first);
        }
        Ok(Self {
            alpha: a,
            beta: b,
            nodes,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta_exponent(&self) -> f64 {
        self.beta
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_0^1 (1-z)^a z^b f(z) dz for the smooth factor f.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }

    /// Plain ∫_lo^hi f(x) dx; only meaningful for the Legendre case a = b = 0.
    pub fn integrate_plain<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        debug_assert!(self.alpha == 0.0 && self.beta == 0.0);
        let len = hi - lo;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(lo + len * z))
            .sum::<f64>()
            * len
    }
}

/// Gauss-Legendre rule on (0, 1), a special case of the Jacobi construction.
pub fn gauss_legendre(n: usize) -> Result<GaussJacobiRule> {
    GaussJacobiRule::new(n, 0.0, 0.0)
}

trait SortedPairs {
    fn try_into_sorted_pairs(self) -> std::result::Result<Vec<(f64, f64)>, ()>;
}

impl SortedPairs for nalgebra::linalg::SymmetricEigen<f64, nalgebra::Dyn> {
    fn try_into_sorted_pairs(self) -> std::result::Result<Vec<(f64, f64)>, ()> {
        let n = self.eigenvalues.len();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (self.eigenvalues[i], self.eigenvectors[(0, i)]))
            .collect();
        if pairs.iter().any(|p| !p.0.is_finite()) {
            return Err(());
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(pairs)
    }
}
