//! Problem data: initial values, source terms, and the full problem
//! specification consumed by the steppers.

use crate::error::{Error, Result};
use crate::exponent::{ExponentFunction, GQuadrature};
use crate::special::gamma;
use std::fmt;

type Scalar2d = dyn Fn([f64; 2]) -> f64 + Send + Sync;
type Grad2d = dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync;

/// A scalar spatial field, optionally with an analytic gradient (needed for
/// Ritz projection; nonsmooth data fall back to nodal interpolation).
pub struct SpatialFn {
    value: Option<Box<Scalar2d>>,
    gradient: Option<Box<Grad2d>>,
}

impl SpatialFn {
    pub fn zero() -> Self {
        Self {
            value: None,
            gradient: None,
        }
    }

    pub fn new<F: Fn([f64; 2]) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Self {
            value: Some(Box::new(f)),
            gradient: None,
        }
    }

    pub fn with_gradient<F, G>(f: F, grad: G) -> Self
    where
        F: Fn([f64; 2]) -> f64 + Send + Sync + 'static,
        G: Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    {
        Self {
            value: Some(Box::new(f)),
            gradient: Some(Box::new(grad)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_none()
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        self.value.as_ref().map_or(0.0, |f| f(x))
    }

    pub fn gradient_at(&self, x: [f64; 2]) -> Option<[f64; 2]> {
        self.gradient.as_ref().map(|g| g(x))
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }
}

impl fmt::Debug for SpatialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialFn")
            .field("zero", &self.is_zero())
            .field("has_gradient", &self.has_gradient())
            .finish()
    }
}

/// Time factor of a separable source, with a closed-form fractional integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeFactor {
    /// T(t) = 1.
    One,
    /// T(t) = exp(-rate * t), rate >= 0.
    Exp { rate: f64 },
}

impl TimeFactor {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFactor::One => 1.0,
            TimeFactor::Exp { rate } => (-rate * t).exp(),
        }
    }

    /// (beta_abar * T)(t), the fractional integral of order abar.
    ///
    /// For the exponential factor this is
    /// e^(-rate t)/Γ(abar) ∫_0^t r^(abar-1) e^(rate r) dr, summed as a
    /// positive term series (no cancellation).
    pub fn frac_integral(&self, abar: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            TimeFactor::One => t.powf(abar) / gamma(abar + 1.0),
            TimeFactor::Exp { rate } => {
                if *rate == 0.0 {
                    return t.powf(abar) / gamma(abar + 1.0);
                }
                let lt = rate * t;
                let mut p = 1.0; // (rate t)^k / k!
                let mut sum = 1.0 / abar;
                for k in 1..500 {
                    p *= lt / k as f64;
                    let term = p / (abar + k as f64);
                    sum += term;
                    if term < f64::EPSILON * sum {
                        break;
                    }
                }
                (-lt).exp() * t.powf(abar) * sum / gamma(abar)
            }
        }
    }
}

/// Source term f(x, t) of the model.
pub enum SourceTerm {
    Zero,
    /// f(x, t) = T(t) X(x); the convolution (beta_abar * f) is analytic.
    Separable { time: TimeFactor, space: SpatialFn },
    /// Arbitrary source; convolutions fall back to product-integration rules.
    General(Box<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>),
}

impl SourceTerm {
    pub fn constant(c: f64) -> Self {
        SourceTerm::Separable {
            time: TimeFactor::One,
            space: SpatialFn::new(move |_| c),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SourceTerm::Zero)
    }

    pub fn eval(&self, x: [f64; 2], t: f64) -> f64 {
        match self {
            SourceTerm::Zero => 0.0,
            SourceTerm::Separable { time, space } => time.eval(t) * space.eval(x),
            SourceTerm::General(f) => f(x, t),
        }
    }
}

impl fmt::Debug for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceTerm::Zero => write!(f, "SourceTerm::Zero"),
            SourceTerm::Separable { time, .. } => {
                write!(f, "SourceTerm::Separable {{ time: {time:?}, .. }}")
            }
            SourceTerm::General(_) => write!(f, "SourceTerm::General(..)"),
        }
    }
}

/// How the initial value u0 enters the discrete scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialProjection {
    /// Ritz projection when a gradient is available, nodal otherwise.
    #[default]
    Auto,
    Ritz,
    Nodal,
}

/// Everything that defines one evolution problem (space discretization and
/// time step count come separately).
#[derive(Debug)]
pub struct ProblemSpec {
    pub exponent: ExponentFunction,
    pub kappa: f64,
    pub u0: SpatialFn,
    pub ubar0: SpatialFn,
    pub source: SourceTerm,
    pub u0_projection: InitialProjection,
    gq: GQuadrature,
}

impl ProblemSpec {
    pub fn new(
        exponent: ExponentFunction,
        kappa: f64,
        u0: SpatialFn,
        ubar0: SpatialFn,
        source: SourceTerm,
    ) -> Result<Self> {
        Self::with_rel_tol(exponent, kappa, u0, ubar0, source, 1e-12)
    }

    pub fn with_rel_tol(
        exponent: ExponentFunction,
        kappa: f64,
        u0: SpatialFn,
        ubar0: SpatialFn,
        source: SourceTerm,
        rel_tol: f64,
    ) -> Result<Self> {
        if kappa <= 0.0 {
            return Err(Error::InvalidStudy(format!(
                "diffusivity kappa must be positive, got {kappa}"
            )));
        }
        let gq = GQuadrature::new(exponent.alpha0(), rel_tol)?;
        Ok(Self {
            exponent,
            kappa,
            u0,
            ubar0,
            source,
            u0_projection: InitialProjection::default(),
            gq,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.exponent.t_end()
    }

    pub fn abar(&self) -> f64 {
        self.exponent.abar()
    }

    pub fn g_quadrature(&self) -> &GQuadrature {
        &self.gq
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_time_factor_integral() {
        // (beta_abar * 1)(t) = t^abar/Γ(abar+1)
        let tf = TimeFactor::One;
        assert_relative_eq!(
            tf.frac_integral(0.5, 0.25),
            0.25f64.sqrt() / gamma(1.5),
            max_relative = 1e-14
        );
        assert_eq!(tf.frac_integral(0.5, 0.0), 0.0);
    }

    #[test]
    fn exponential_factor_reduces_to_constant_at_zero_rate() {
        let a = TimeFactor::Exp { rate: 0.0 };
        let b = TimeFactor::One;
        assert_relative_eq!(
            a.frac_integral(0.7, 1.3),
            b.frac_integral(0.7, 1.3),
            max_relative = 1e-14
        );
    }

    #[test]
    fn exponential_series_small_rate_matches_expansion() {
        // For small rate, (beta*e^{-rt})(t) ≈ B_{a+1}(t) - r B_{a+2}(t)·(a+1)…
        // checked against a two-term Taylor expansion in the rate.
        let abar = 0.5;
        let t: f64 = 0.8;
        let rate = 1e-6;
        let f = TimeFactor::Exp { rate };
        let lead = t.powf(abar) / gamma(abar + 1.0);
        let corr = rate * t.powf(abar + 1.0) / gamma(abar + 2.0);
        assert_relative_eq!(f.frac_integral(abar, t), lead - corr, max_relative = 1e-9);
    }

    #[test]
    fn source_eval_combines_factors() {
        let s = SourceTerm::Separable {
            time: TimeFactor::Exp { rate: 1.0 },
            space: SpatialFn::new(|x| x[0] + 1.0),
        };
        assert_relative_eq!(
            s.eval([2.0, 0.0], 3.0),
            3.0 * (-3.0f64).exp(),
            max_relative = 1e-15
        );
        assert!(SourceTerm::Zero.is_zero());
        assert_eq!(SourceTerm::Zero.eval([1.0, 0.0], 1.0), 0.0);
    }

    #[test]
    fn problem_rejects_nonpositive_kappa() {
        let e = ExponentFunction::constant(1.5, 1.0).unwrap();
        let r = ProblemSpec::new(e, 0.0, SpatialFn::zero(), SpatialFn::zero(), SourceTerm::Zero);
        assert!(r.is_err());
    }
}
