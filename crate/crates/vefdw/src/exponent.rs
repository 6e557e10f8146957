//! Admissible variable exponents `alpha(t)` and the generalized identity
//! function `g(t)`.
//!
//! An exponent is admissible when `1 < alpha(t) < 2` on the whole time
//! horizon; construction rejects anything else by dense sampling. The
//! supported families are closed under the operations the experiments need:
//! constant, polynomial offset, sine offset, the monotone transition curve,
//! and the smoothed variant that enforces `alpha'(0) = alpha''(0) = 0` by
//! replacing the initial layer with a two-point Hermite polynomial.
//!
//! `g(t)` is the convolution of the Abel kernel with `beta_{alpha0-1}`; its
//! integrand factors into a smooth part and the Jacobi weight
//! `(1-z)^(alpha0-2) z^(1-alpha0)`, so it is evaluated with Gauss-Jacobi
//! rules of doubling size until two consecutive sizes agree.

use crate::error::{Error, Result};
use crate::quadrature::GaussJacobiRule;
use crate::special::gamma;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// How many points the admissibility sampling uses per construction.
const RANGE_SAMPLES: usize = 4096;

#[derive(Debug, Clone)]
enum Kind {
    Constant,
    PolyOffset { coeff: f64, power: f64 },
    SineOffset { amplitude: f64 },
    Transition { z1: f64, z2: f64, horizon: f64 },
    Smoothed { base: Box<ExponentFunction>, sigma: f64, poly: [f64; 8] },
}

/// A variable exponent `alpha(t)` on `[0, T]` with `1 < alpha < 2`.
#[derive(Debug, Clone)]
pub struct ExponentFunction {
    kind: Kind,
    alpha0: f64,
    t_end: f64,
}

impl ExponentFunction {
    /// alpha(t) = alpha0.
    pub fn constant(alpha0: f64, t_end: f64) -> Result<Self> {
        Self::build(Kind::Constant, alpha0, t_end)
    }

    /// alpha(t) = alpha0 + coeff * t^power with power >= 1.
    pub fn poly_offset(alpha0: f64, coeff: f64, power: f64, t_end: f64) -> Result<Self> {
        if power < 1.0 {
            return Err(Error::InvalidExponent(format!(
                "polynomial offset power must be >= 1, got {power}"
            )));
        }
        Self::build(Kind::PolyOffset { coeff, power }, alpha0, t_end)
    }

    /// alpha(t) = alpha0 + amplitude * sin(t).
    pub fn sine_offset(alpha0: f64, amplitude: f64, t_end: f64) -> Result<Self> {
        Self::build(Kind::SineOffset { amplitude }, alpha0, t_end)
    }

    /// The monotone transition curve
    /// `a(t; z1, z2) = z1 + (z2 - z1)(1 - t/Th - sin(2 pi (1 - t/Th)) / (2 pi))`
    /// running from `a(0) = z2` down to `a(Th) = z1` over `[0, horizon]` and
    /// held at `z1` afterwards.
    pub fn transition(z1: f64, z2: f64, horizon: f64, t_end: f64) -> Result<Self> {
        for z in [z1, z2] {
            if !(1.0 < z && z < 2.0) {
                return Err(Error::InvalidExponent(format!(
                    "transition endpoints must lie in (1, 2), got {z}"
                )));
            }
        }
        if horizon <= 0.0 {
            return Err(Error::InvalidExponent("transition horizon must be positive".into()));
        }
        Self::build(Kind::Transition { z1, z2, horizon }, z2, t_end)
    }

    /// Smoothed variant: `alpha0` on `[0, sigma]`, the original exponent on
    /// `[2 sigma, T]`, and on `[sigma, 2 sigma]` the unique degree-7
    /// polynomial matching value and first three derivatives at both ends
    /// (value `alpha0` with zero derivatives at `sigma`). The result
    /// satisfies `alpha'(0) = alpha''(0) = 0`.
    pub fn smoothed(base: ExponentFunction, sigma: f64) -> Result<Self> {
        let t_end = base.t_end;
        if !(sigma > 0.0 && 2.0 * sigma < t_end) {
            return Err(Error::InvalidExponent(format!(
                "smoothing width must satisfy 0 < 2 sigma < T, got sigma = {sigma}"
            )));
        }
        let alpha0 = base.alpha0;
        let t2 = 2.0 * sigma;
        // Hermite data in the normalized variable s = (t - sigma)/sigma.
        let left = [alpha0, 0.0, 0.0, 0.0];
        let right = [
            base.alpha(t2),
            sigma * base.d1(t2),
            sigma * sigma * base.d2(t2),
            sigma * sigma * sigma * base.d3(t2),
        ];
        let poly = hermite_two_point(left, right);
        for i in 0..=512 {
            let s = i as f64 / 512.0;
            let v = poly_eval(&poly, s);
            if !(1.0 < v && v < 2.0) {
                return Err(Error::ExponentOutOfRange {
                    t: sigma + s * sigma,
                    value: v,
                });
            }
        }
        Self::build(
            Kind::Smoothed {
                base: Box::new(base),
                sigma,
                poly,
            },
            alpha0,
            t_end,
        )
    }

    fn build(kind: Kind, alpha0: f64, t_end: f64) -> Result<Self> {
        if t_end <= 0.0 {
            return Err(Error::InvalidExponent("time horizon must be positive".into()));
        }
        let f = Self { kind, alpha0, t_end };
        for i in 0..=RANGE_SAMPLES {
            let t = t_end * i as f64 / RANGE_SAMPLES as f64;
            let v = f.alpha(t);
            if !(1.0 < v && v < 2.0) {
                return Err(Error::ExponentOutOfRange { t, value: v });
            }
        }
        debug_assert_eq!(f.alpha(0.0), alpha0);
        Ok(f)
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// abar = alpha0 - 1, the order of the fractional integral in the
    /// transformed model.
    pub fn abar(&self) -> f64 {
        self.alpha0 - 1.0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, Kind::Constant)
    }

    /// alpha(t).
    pub fn alpha(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant => self.alpha0,
            Kind::PolyOffset { coeff, power } => self.alpha0 + coeff * t.powf(*power),
            Kind::SineOffset { amplitude } => self.alpha0 + amplitude * t.sin(),
            Kind::Transition { z1, z2, horizon } => {
                if t >= *horizon {
                    *z1
                } else {
                    // 1 - v - sin(2 pi (1 - v))/(2 pi) rewritten with
                    // sin(2 pi (1 - v)) = -sin(2 pi v) so that t = 0 gives
                    // exactly z2.
                    let v = t / horizon;
                    z1 + (z2 - z1) * ((1.0 - v) + (2.0 * PI * v).sin() / (2.0 * PI))
                }
            }
            Kind::Smoothed { base, sigma, poly } => {
                if t <= *sigma {
                    self.alpha0
                } else if t >= 2.0 * sigma {
                    base.alpha(t)
                } else {
                    poly_eval(poly, (t - sigma) / sigma)
                }
            }
        }
    }

    /// alpha'(t).
    pub fn d1(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant => 0.0,
            Kind::PolyOffset { coeff, power } => coeff * power * t.powf(power - 1.0),
            Kind::SineOffset { amplitude } => amplitude * t.cos(),
            Kind::Transition { z1, z2, horizon } => {
                if t >= *horizon {
                    0.0
                } else {
                    let v = t / horizon;
                    (z2 - z1) / horizon * ((2.0 * PI * v).cos() - 1.0)
                }
            }
            Kind::Smoothed { base, sigma, poly } => {
                if t <= *sigma {
                    0.0
                } else if t >= 2.0 * sigma {
                    base.d1(t)
                } else {
                    poly_deriv_eval(poly, (t - sigma) / sigma, 1) / sigma
                }
            }
        }
    }

    /// alpha''(t).
    pub fn d2(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant => 0.0,
            Kind::PolyOffset { coeff, power } => {
                coeff * power * (power - 1.0) * t.powf(power - 2.0)
            }
            Kind::SineOffset { amplitude } => -amplitude * t.sin(),
            Kind::Transition { z1, z2, horizon } => {
                if t >= *horizon {
                    0.0
                } else {
                    let v = t / horizon;
                    -2.0 * PI * (z2 - z1) / (horizon * horizon) * (2.0 * PI * v).sin()
                }
            }
            Kind::Smoothed { base, sigma, poly } => {
                if t <= *sigma {
                    0.0
                } else if t >= 2.0 * sigma {
                    base.d2(t)
                } else {
                    poly_deriv_eval(poly, (t - sigma) / sigma, 2) / (sigma * sigma)
                }
            }
        }
    }

    /// alpha'''(t).
    pub fn d3(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Constant => 0.0,
            Kind::PolyOffset { coeff, power } => {
                coeff * power * (power - 1.0) * (power - 2.0) * t.powf(power - 3.0)
            }
            Kind::SineOffset { amplitude } => -amplitude * t.cos(),
            Kind::Transition { z1, z2, horizon } => {
                if t >= *horizon {
                    0.0
                } else {
                    let v = t / horizon;
                    -4.0 * PI * PI * (z2 - z1) / (horizon * horizon * horizon)
                        * (2.0 * PI * v).cos()
                }
            }
            Kind::Smoothed { base, sigma, poly } => {
                if t <= *sigma {
                    0.0
                } else if t >= 2.0 * sigma {
                    base.d3(t)
                } else {
                    poly_deriv_eval(poly, (t - sigma) / sigma, 3) / (sigma * sigma * sigma)
                }
            }
        }
    }
}

/// Confluent node vector of the two-point Hermite interpolant on [0, 1].
const HERMITE_NODES: [f64; 8] = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];

/// Newton coefficients of the degree-7 polynomial on [0, 1] matching value
/// and first three derivatives at both endpoints. Inputs are
/// `[p(x), p'(x), p''(x), p'''(x)]` at x = 0 and x = 1. The Newton form on
/// the confluent nodes stays well conditioned where a monomial expansion
/// would lose several digits in the higher derivatives.
fn hermite_two_point(left: [f64; 4], right: [f64; 4]) -> [f64; 8] {
    // Divided differences with repeated nodes: a difference spanning equal
    // nodes is the matching derivative value over k!.
    let data = [left, right];
    let mut table = [[0.0f64; 8]; 8];
    for i in 0..8 {
        table[i][0] = data[i / 4][0];
    }
    for k in 1..8 {
        for i in 0..8 - k {
            if HERMITE_NODES[i + k] == HERMITE_NODES[i] {
                let fact: f64 = (1..=k).map(|m| m as f64).product();
                table[i][k] = data[i / 4][k] / fact;
            } else {
                table[i][k] = (table[i + 1][k - 1] - table[i][k - 1])
                    / (HERMITE_NODES[i + k] - HERMITE_NODES[i]);
            }
        }
    }
    let mut c = [0.0f64; 8];
    for k in 0..8 {
        c[k] = table[0][k];
    }
    c
}

/// Evaluates the Newton-form polynomial and its first three derivatives by
/// Horner recursion with derivative propagation.
fn newton_eval_all(c: &[f64; 8], x: f64) -> [f64; 4] {
    let mut p = c[7];
    let (mut d1, mut d2, mut d3) = (0.0, 0.0, 0.0);
    for k in (0..7).rev() {
        let dx = x - HERMITE_NODES[k];
        d3 = d3 * dx + 3.0 * d2;
        d2 = d2 * dx + 2.0 * d1;
        d1 = d1 * dx + p;
        p = p * dx + c[k];
    }
    [p, d1, d2, d3]
}

fn poly_eval(c: &[f64; 8], x: f64) -> f64 {
    newton_eval_all(c, x)[0]
}

fn poly_deriv_eval(c: &[f64; 8], x: f64, order: usize) -> f64 {
    newton_eval_all(c, x)[order]
}

/// Node-count ladder for the adaptive evaluation of g.
const G_NODE_LADDER: [usize; 6] = [16, 32, 64, 128, 256, 512];

/// Quadrature context for `g(t)`: Gauss-Jacobi rules with the exact kernel
/// weight `(1-z)^(alpha0-2) z^(1-alpha0)`, built lazily per node count.
#[derive(Debug)]
pub struct GQuadrature {
    alpha0: f64,
    rel_tol: f64,
    gamma_abar: f64,
    rungs: [OnceLock<GaussJacobiRule>; G_NODE_LADDER.len()],
}

impl GQuadrature {
    pub fn new(alpha0: f64, rel_tol: f64) -> Result<Self> {
        if !(1.0 < alpha0 && alpha0 < 2.0) {
            return Err(Error::InvalidQuadrature(format!(
                "alpha0 must lie in (1, 2), got {alpha0}"
            )));
        }
        let q = Self {
            alpha0,
            rel_tol,
            gamma_abar: gamma(alpha0 - 1.0),
            rungs: Default::default(),
        };
        q.rung(0)?; // surface eigensolver problems at construction
        Ok(q)
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_nodes(&self) -> usize {
        *G_NODE_LADDER.last().unwrap()
    }

    fn rung(&self, i: usize) -> Result<&GaussJacobiRule> {
        if self.rungs[i].get().is_none() {
            let rule =
                GaussJacobiRule::new(G_NODE_LADDER[i], self.alpha0 - 2.0, 1.0 - self.alpha0)?;
            let _ = self.rungs[i].set(rule);
        }
        Ok(self.rungs[i].get().unwrap())
    }
}

/// Evaluates the generalized identity function
///
/// g(t) = ∫_0^1 (tz)^(alpha0 - alpha(tz)) / (Γ(alpha0-1) Γ(2-alpha(tz)))
///        · (1-z)^(alpha0-2) z^(1-alpha0) dz,
///
/// doubling the node count until two consecutive rule sizes agree to the
/// relative tolerance. g(0) = 1 by continuity; for constant exponents the
/// integrand collapses and g ≡ 1.
pub fn eval_g(f: &ExponentFunction, t: f64, q: &GQuadrature) -> Result<f64> {
    debug_assert_eq!(f.alpha0(), q.alpha0());
    if t <= 0.0 {
        return Ok(1.0);
    }
    let alpha0 = q.alpha0;
    let smooth = |z: f64| {
        let a = f.alpha(t * z);
        (t * z).powf(alpha0 - a) / (q.gamma_abar * gamma(2.0 - a))
    };
    let mut prev = q.rung(0)?.integrate(smooth);
    for i in 1..G_NODE_LADDER.len() {
        let cur = q.rung(i)?.integrate(smooth);
        if (cur - prev).abs() <= q.rel_tol * cur.abs().max(1.0) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::GNonConvergence {
        t,
        max_nodes: q.max_nodes(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn family_point_values() {
        let c = ExponentFunction::constant(1.5, 1.0).unwrap();
        assert_eq!(c.alpha(0.3), 1.5);

        let p = ExponentFunction::poly_offset(1.2, 0.5, 3.0, 0.5).unwrap();
        assert_relative_eq!(p.alpha(0.5), 1.2625, max_relative = 1e-15);

        let s = ExponentFunction::sine_offset(1.4, 0.125, 1.0).unwrap();
        assert_eq!(s.alpha(0.0), 1.4);
        assert_eq!(s.alpha0(), 1.4);
    }

    #[test]
    fn rejects_exponent_leaving_range() {
        // 1.9 + t^3/2 reaches 2.4 at t = 1.
        let r = ExponentFunction::poly_offset(1.9, 0.5, 3.0, 1.0);
        assert!(matches!(r, Err(Error::ExponentOutOfRange { .. })));
        let r = ExponentFunction::constant(2.0, 1.0);
        assert!(r.is_err());
    }

    #[test]
    fn transition_curve_endpoints_and_midpoint() {
        let a = ExponentFunction::transition(1.4, 1.9, 15.0, 15.0).unwrap();
        assert_eq!(a.alpha(0.0), 1.9);
        assert_eq!(a.alpha(15.0), 1.4);
        // sin(pi) = 0, so the bracket is exactly one half.
        assert_relative_eq!(a.alpha(7.5), 1.65, max_relative = 1e-14);
        // monotone decreasing
        let mut prev = a.alpha(0.0);
        for i in 1..=150 {
            let v = a.alpha(15.0 * i as f64 / 150.0);
            assert!(v <= prev + 1e-14);
            prev = v;
        }
    }

    #[test]
    fn transition_clamps_past_horizon() {
        let a = ExponentFunction::transition(1.4, 1.9, 1.0, 15.0).unwrap();
        assert_eq!(a.alpha(0.0), 1.9);
        assert_eq!(a.alpha(1.0), 1.4);
        assert_eq!(a.alpha(7.3), 1.4);
        assert_eq!(a.d1(2.0), 0.0);
    }

    #[test]
    fn smoothed_is_piecewise_identity() {
        let base = ExponentFunction::sine_offset(1.4, 0.125, 1.0).unwrap();
        let s = ExponentFunction::smoothed(base.clone(), 0.1).unwrap();
        assert_eq!(s.alpha(0.05), 1.4);
        assert_eq!(s.alpha0(), 1.4);
        assert_relative_eq!(s.alpha(0.5), 1.4 + 0.5f64.sin() / 8.0, max_relative = 1e-15);
        // zero initial derivatives
        assert_eq!(s.d1(0.0), 0.0);
        assert_eq!(s.d2(0.0), 0.0);
    }

    #[test]
    fn smoothed_matches_base_derivatives_at_junction() {
        let base = ExponentFunction::sine_offset(1.4, 0.125, 1.0).unwrap();
        let s = ExponentFunction::smoothed(base.clone(), 0.1).unwrap();
        let t2 = 0.2;
        let eps = 1e-12;
        assert_relative_eq!(s.alpha(t2 - eps), base.alpha(t2), max_relative = 1e-10);
        for (left, right) in [
            (s.d1(t2 - eps), base.d1(t2)),
            (s.d2(t2 - eps), base.d2(t2)),
            (s.d3(t2 - eps), base.d3(t2)),
        ] {
            assert_relative_eq!(left, right, max_relative = 1e-6, epsilon = 1e-8);
        }
    }

    #[test]
    fn smoothed_derivatives_by_finite_differences() {
        let base = ExponentFunction::sine_offset(1.4, 0.125, 1.0).unwrap();
        let s = ExponentFunction::smoothed(base, 0.1).unwrap();
        let t = 0.15; // inside the Hermite layer
        let h = 1e-5;
        let fd1 = (s.alpha(t + h) - s.alpha(t - h)) / (2.0 * h);
        let fd2 = (s.alpha(t + h) - 2.0 * s.alpha(t) + s.alpha(t - h)) / (h * h);
        assert_relative_eq!(fd1, s.d1(t), max_relative = 1e-7, epsilon = 1e-9);
        assert_relative_eq!(fd2, s.d2(t), max_relative = 1e-4, epsilon = 1e-6);
    }

    #[test]
    fn derivative_formulas_by_finite_differences() {
        let cases = [
            ExponentFunction::poly_offset(1.2, 0.5, 3.0, 0.5).unwrap(),
            ExponentFunction::sine_offset(1.4, 0.125, 2.0).unwrap(),
            ExponentFunction::transition(1.4, 1.9, 1.0, 2.0).unwrap(),
        ];
        for f in &cases {
            let t = 0.37;
            let h = 1e-5;
            let fd1 = (f.alpha(t + h) - f.alpha(t - h)) / (2.0 * h);
            let fd2 = (f.alpha(t + h) - 2.0 * f.alpha(t) + f.alpha(t - h)) / (h * h);
            let fd3 = (f.d2(t + h) - f.d2(t - h)) / (2.0 * h);
            assert_relative_eq!(fd1, f.d1(t), max_relative = 1e-7, epsilon = 1e-10);
            assert_relative_eq!(fd2, f.d2(t), max_relative = 1e-4, epsilon = 1e-6);
            assert_relative_eq!(fd3, f.d3(t), max_relative = 1e-7, epsilon = 1e-8);
        }
    }

    #[test]
    fn g_is_one_for_constant_exponent() {
        let f = ExponentFunction::constant(1.5, 1.0).unwrap();
        let q = GQuadrature::new(1.5, 1e-12).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let g = eval_g(&f, t, &q).unwrap();
            assert!((g - 1.0).abs() < 1e-12, "g({t}) = {g}");
        }
    }

    #[test]
    fn g_at_zero_is_one() {
        let f = ExponentFunction::poly_offset(1.5, 0.5, 3.0, 0.5).unwrap();
        let q = GQuadrature::new(1.5, 1e-12).unwrap();
        assert_eq!(eval_g(&f, 0.0, &q).unwrap(), 1.0);
    }
}
