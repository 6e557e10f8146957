//! Temporal quadrature weights shared by both schemes.
//!
//! * `w_k = g(t_{k+1}) - g(t_k)`: increments of the generalized identity
//!   function, produced by the piecewise-linear treatment of the `g'`
//!   history term. Identically zero for constant exponents.
//! * `chi_n`: second-order convolution quadrature weights, the power-series
//!   coefficients of `[(1-z)(3-z)/2]^(-abar)`.
//! * `omega_n`: correction weights restoring accuracy for a nonzero initial
//!   state, `omega_n = n^abar/Γ(abar+1) - sum_{j=1}^n chi_{n-j}`.
//! * averaged product-integration weights `omega_{n,j}` for the second-order
//!   scheme; they depend only on the lag `n - j` (plus the diagonal), are
//!   positive, and have the closed form of second differences of
//!   `B(s) = s^(abar+1)/Γ(abar+2)`.

use crate::error::Result;
use crate::exponent::{eval_g, ExponentFunction, GQuadrature};
use crate::special::gamma;

/// Evaluates g on the uniform grid t_n = n tau, n = 0..=n_steps.
pub fn g_on_grid(
    f: &ExponentFunction,
    q: &GQuadrature,
    n_steps: usize,
    tau: f64,
) -> Result<Vec<f64>> {
    (0..=n_steps)
        .map(|n| eval_g(f, n as f64 * tau, q))
        .collect()
}

/// Kernel increments w_k = g(t_{k+1}) - g(t_k) for k = 0..n_steps-1.
pub fn kernel_increments(
    f: &ExponentFunction,
    q: &GQuadrature,
    n_steps: usize,
    tau: f64,
) -> Result<Vec<f64>> {
    let g = g_on_grid(f, q, n_steps, tau)?;
    Ok(increments_of(&g))
}

fn increments_of(g: &[f64]) -> Vec<f64> {
    g.windows(2).map(|p| p[1] - p[0]).collect()
}

/// Binomial-series coefficients of (1 - z)^(-abar): c_0 = 1,
/// c_n = c_{n-1} (n - 1 + abar)/n.
fn binomial_series(abar: f64, count: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(count);
    c.push(1.0);
    for n in 1..count {
        let prev = c[n - 1];
        c.push(prev * (n as f64 - 1.0 + abar) / n as f64);
    }
    c
}

/// Convolution quadrature weights chi_n for n = 0..count-1:
/// chi_n = (2/3)^abar sum_{j=0}^n 3^(-j) c_{n-j} c_j.
///
/// The inner sum is a Cauchy product whose terms decay like 3^(-j); it is cut
/// off once a term stops contributing at machine precision.
pub fn cq_weights(abar: f64, count: usize) -> Vec<f64> {
    assert!(abar > 0.0 && abar < 1.0, "abar must lie in (0, 1)");
    let c = binomial_series(abar, count);
    let scale = (2.0f64 / 3.0).powf(abar);
    let mut chi = Vec::with_capacity(count);
    for n in 0..count {
        let mut sum = 0.0;
        let mut pow3 = 1.0;
        for j in 0..=n {
            let term = pow3 * c[n - j] * c[j];
            sum += term;
            if term < f64::EPSILON * sum {
                break;
            }
            pow3 /= 3.0;
        }
        chi.push(scale * sum);
    }
    chi
}

/// Correction weights omega_n = n^abar/Γ(abar+1) - sum_{j=1}^n chi_{n-j},
/// n = 1..=count; entry 0 is unused and set to zero.
pub fn correction_weights(chi: &[f64], abar: f64, count: usize) -> Vec<f64> {
    assert!(chi.len() >= count);
    let gamma_a1 = gamma(abar + 1.0);
    let mut omega = Vec::with_capacity(count + 1);
    omega.push(0.0);
    let mut chi_prefix = 0.0; // sum_{j=1}^n chi_{n-j} = chi_0 + ... + chi_{n-1}
    for n in 1..=count {
        chi_prefix += chi[n - 1];
        omega.push((n as f64).powf(abar) / gamma_a1 - chi_prefix);
    }
    omega
}

/// Stable second difference (m+1)^p - 2 m^p + (m-1)^p for p in (1, 2).
///
/// Direct evaluation loses eps*m^2 relative accuracy, which matters for the
/// long histories of the convergence studies; for larger m the difference is
/// summed as the even part of the binomial series of (1 +/- 1/m)^p.
fn central_power_diff(m: f64, p: f64) -> f64 {
    if m < 32.0 {
        (m + 1.0).powf(p) - 2.0 * m.powf(p) + (m - 1.0).powf(p)
    } else {
        let x2 = 1.0 / (m * m);
        let mut term = p * (p - 1.0) * x2; // 2*C(p,2) x^2
        let mut sum = term;
        for k in 2..=8u32 {
            let kf = 2.0 * k as f64;
            term *= (p - kf + 2.0) * (p - kf + 1.0) / ((kf - 1.0) * kf) * x2;
            sum += term;
        }
        m.powf(p) * sum
    }
}

/// Averaged product-integration weights: the diagonal weight
/// `tau^abar/Γ(abar+2)` and, per lag m >= 1,
/// `(1/tau)[B((m+1)tau) - 2 B(m tau) + B((m-1)tau)]` with
/// `B(s) = s^(abar+1)/Γ(abar+2)`.
pub fn pi_weights(abar: f64, tau: f64, n_steps: usize) -> (f64, Vec<f64>) {
    assert!(abar > 0.0 && abar < 1.0, "abar must lie in (0, 1)");
    assert!(tau > 0.0);
    let p = abar + 1.0;
    let gamma_p1 = gamma(p + 1.0);
    let diag = tau.powf(abar) / gamma(abar + 2.0);
    let scale = tau.powf(abar) / gamma_p1;
    let off: Vec<f64> = (1..n_steps)
        .map(|m| scale * central_power_diff(m as f64, p))
        .collect();
    (diag, off)
}

/// All precomputed temporal weights for one run.
#[derive(Debug, Clone)]
pub struct WeightTables {
    pub tau: f64,
    pub abar: f64,
    /// g(t_n) for n = 0..=N.
    pub g: Vec<f64>,
    /// w_k = g(t_{k+1}) - g(t_k) for k = 0..N-1.
    pub w: Vec<f64>,
    /// chi_n for n = 0..N-1.
    pub chi: Vec<f64>,
    /// omega_n for n = 1..=N at index n; index 0 unused.
    pub omega_corr: Vec<f64>,
    /// Diagonal averaged-PI weight omega_{n,n}.
    pub pi_diag: f64,
    /// Off-diagonal averaged-PI weights by lag: pi_off[m-1] = omega_{n,n-m}.
    pub pi_off: Vec<f64>,
}

impl WeightTables {
    pub fn build(
        f: &ExponentFunction,
        q: &GQuadrature,
        n_steps: usize,
        tau: f64,
    ) -> Result<Self> {
        assert!(n_steps >= 1 && tau > 0.0);
        let abar = f.abar();
        let g = g_on_grid(f, q, n_steps, tau)?;
        let w = increments_of(&g);
        let chi = cq_weights(abar, n_steps.max(1));
        let omega_corr = correction_weights(&chi, abar, n_steps);
        let (pi_diag, pi_off) = pi_weights(abar, tau, n_steps);
        // Convexity of B makes every averaged-PI weight positive and the
        // off-diagonal ones decreasing in the lag; a violation is a bug.
        assert!(pi_diag > 0.0);
        let mut prev = f64::INFINITY;
        for (m, &v) in pi_off.iter().enumerate() {
            assert!(v > 0.0 && v <= prev, "pi_off[{m}] = {v} not positive decreasing");
            prev = v;
        }
        Ok(Self {
            tau,
            abar,
            g,
            w,
            chi,
            omega_corr,
            pi_diag,
            pi_off,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.w.len()
    }

    /// omega_{n,j} of the averaged PI rule for 1 <= j <= n.
    pub fn pi_weight(&self, n: usize, j: usize) -> f64 {
        debug_assert!(1 <= j && j <= n);
        if j == n {
            self.pi_diag
        } else {
            self.pi_off[n - j - 1]
        }
    }
}
