//! Canonical experiment setups: four example problems, the eight
//! convergence-table studies built from them, and the transition figure.
//!
//! Example 1 drives the alpha0-order scheme on smooth 1D data with a cubic
//! exponent offset; Example 2 drives the second-order scheme on polynomial
//! data; Example 3 uses a sine exponent offset whose derivatives do not
//! vanish at t = 0, with smooth (a) and nonsmooth (b) data; Example 4 is the
//! 2D variant. Table studies reproduce the published refinement ladders per
//! base exponent.

use crate::error::{Error, Result};
use crate::fem::MeshDomain;
use crate::harness::{StudyAxis, StudySpec, TransitionConfig};
use crate::problem::{ProblemSpec, SourceTerm, SpatialFn};
use crate::exponent::ExponentFunction;
use crate::schemes::SchemeKind;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    Example1,
    Example2,
    Example3a,
    Example3b,
    Example4,
}

impl ExampleId {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "example1" => Ok(Self::Example1),
            "example2" => Ok(Self::Example2),
            "example3a" => Ok(Self::Example3a),
            "example3b" => Ok(Self::Example3b),
            "example4" => Ok(Self::Example4),
            _ => Err(Error::InvalidStudy(format!("unknown example preset '{name}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Example1 => "example1",
            Self::Example2 => "example2",
            Self::Example3a => "example3a",
            Self::Example3b => "example3b",
            Self::Example4 => "example4",
        }
    }

    /// The scheme the corresponding tables use by default.
    pub fn default_scheme(&self) -> SchemeKind {
        match self {
            Self::Example1 => SchemeKind::Alpha0,
            Self::Example2 => SchemeKind::SecondOrder,
            _ => SchemeKind::Alpha0,
        }
    }
}

fn sin_pi() -> SpatialFn {
    SpatialFn::with_gradient(|x| (PI * x[0]).sin(), |x| [PI * (PI * x[0]).cos(), 0.0])
}

fn poly44() -> SpatialFn {
    SpatialFn::with_gradient(
        |x| x[0].powi(4) * (1.0 - x[0]).powi(4),
        |x| {
            let t = x[0];
            [
                4.0 * t.powi(3) * (1.0 - t).powi(4) - 4.0 * t.powi(4) * (1.0 - t).powi(3),
                0.0,
            ]
        },
    )
}

fn poly22() -> SpatialFn {
    SpatialFn::new(|x| x[0].powi(2) * (1.0 - x[0]).powi(2))
}

fn sin_pi_2d() -> SpatialFn {
    SpatialFn::with_gradient(
        |x| (PI * x[0]).sin() * (PI * x[1]).sin(),
        |x| {
            [
                PI * (PI * x[0]).cos() * (PI * x[1]).sin(),
                PI * (PI * x[0]).sin() * (PI * x[1]).cos(),
            ]
        },
    )
}

fn poly2222() -> SpatialFn {
    SpatialFn::new(|x| {
        x[0].powi(2) * (1.0 - x[0]).powi(2) * x[1].powi(2) * (1.0 - x[1]).powi(2)
    })
}

/// Builds the problem and domain of one example for a given base exponent.
pub fn example_problem(id: ExampleId, alpha0: f64) -> Result<(ProblemSpec, MeshDomain)> {
    let unit = MeshDomain::Interval { a: 0.0, b: 1.0 };
    match id {
        ExampleId::Example1 => {
            let e = ExponentFunction::poly_offset(alpha0, 0.5, 3.0, 0.5)?;
            let spec = ProblemSpec::new(
                e,
                1.0,
                sin_pi(),
                SpatialFn::new(|x| (2.0 * PI * x[0]).sin()),
                SourceTerm::Zero,
            )?;
            Ok((spec, unit))
        }
        ExampleId::Example2 => {
            let e = ExponentFunction::poly_offset(alpha0, 0.25, 3.0, 1.0)?;
            let spec = ProblemSpec::new(e, 1.0, poly44(), poly22(), SourceTerm::Zero)?;
            Ok((spec, unit))
        }
        ExampleId::Example3a => {
            let e = ExponentFunction::sine_offset(alpha0, 0.125, 1.0)?;
            let spec =
                ProblemSpec::new(e, 1.0, sin_pi(), poly22(), SourceTerm::constant(1.0))?;
            Ok((spec, unit))
        }
        ExampleId::Example3b => {
            let e = ExponentFunction::sine_offset(alpha0, 0.125, 1.0)?;
            // u0 = x^(-1/4) has no H^1 gradient; it enters by nodal
            // interpolation (all interior nodes are positive). ubar0 is the
            // indicator of (0, 1/2].
            let u0 = SpatialFn::new(|x| x[0].powf(-0.25));
            let ubar0 = SpatialFn::new(|x| if x[0] <= 0.5 { 1.0 } else { 0.0 });
            let spec = ProblemSpec::new(e, 1.0, u0, ubar0, SourceTerm::constant(1.0))?;
            Ok((spec, unit))
        }
        ExampleId::Example4 => {
            let e = ExponentFunction::sine_offset(alpha0, 1.0 / 9.0, 1.0)?;
            let spec = ProblemSpec::new(
                e,
                1.0,
                sin_pi_2d(),
                poly2222(),
                SourceTerm::constant(1.0),
            )?;
            Ok((
                spec,
                MeshDomain::Rectangle {
                    a: 0.0,
                    b: 1.0,
                    c: 0.0,
                    d: 1.0,
                },
            ))
        }
    }
}

fn doubling(from: usize, count: usize) -> Vec<usize> {
    (0..count).map(|k| from << k).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

/// The published temporal refinement ladder of an example at a given base
/// exponent; falls back to a generic ladder off the published columns.
pub fn paper_n_list(id: ExampleId, alpha0: f64) -> Vec<usize> {
    let col = |starts: &[(f64, usize)]| {
        starts
            .iter()
            .find(|(a, _)| close(*a, alpha0))
            .map(|&(_, s)| doubling(s, 5))
    };
    match id {
        ExampleId::Example1 => col(&[(1.2, 1024), (1.5, 512), (1.9, 256)]),
        ExampleId::Example2 => col(&[(1.2, 64), (1.4, 128), (1.7, 256)]),
        ExampleId::Example3a | ExampleId::Example3b => {
            // four levels in the published tables
            [(1.4, 512usize), (1.85, 128)]
                .iter()
                .find(|(a, _)| close(*a, alpha0))
                .map(|&(_, s)| doubling(s, 4))
        }
        ExampleId::Example4 => None,
    }
    .unwrap_or_else(|| doubling(256, 4))
}

/// Temporal study of one example with the published fixed mesh.
pub fn time_study(
    id: ExampleId,
    alpha0: f64,
    scheme: SchemeKind,
    label: String,
    n_list: Option<Vec<usize>>,
    j: Option<usize>,
) -> Result<StudySpec> {
    let (problem, domain) = example_problem(id, alpha0)?;
    let default_j = match id {
        ExampleId::Example1 => 16,
        _ => 32,
    };
    Ok(StudySpec {
        label,
        scheme,
        problem,
        domain,
        axis: StudyAxis::Time {
            j: j.unwrap_or(default_j),
            n_list: n_list.unwrap_or_else(|| paper_n_list(id, alpha0)),
        },
    })
}

/// Spatial study of one example with the published fixed step count.
pub fn space_study(
    id: ExampleId,
    alpha0: f64,
    scheme: SchemeKind,
    label: String,
    j_list: Option<Vec<usize>>,
    n: Option<usize>,
) -> Result<StudySpec> {
    let (problem, domain) = example_problem(id, alpha0)?;
    let default_list = match id {
        ExampleId::Example1 => doubling(32, 5),
        ExampleId::Example2 => doubling(64, 5),
        ExampleId::Example4 => doubling(16, 4),
        _ => doubling(32, 4),
    };
    Ok(StudySpec {
        label,
        scheme,
        problem,
        domain,
        axis: StudyAxis::Space {
            n: n.unwrap_or(32),
            j_list: j_list.unwrap_or(default_list),
        },
    })
}

fn a_tag(alpha0: f64) -> String {
    format!("a{}", (alpha0 * 100.0).round() as i64)
}

/// All studies of one published table, labeled `<table>_<alpha tag>[_scheme]`.
pub fn table_studies(name: &str) -> Result<Vec<StudySpec>> {
    use ExampleId::*;
    use SchemeKind::*;
    let mut out = Vec::new();
    match name {
        "table1" => {
            for a in [1.2, 1.5, 1.9] {
                out.push(time_study(Example1, a, Alpha0, format!("table1_{}", a_tag(a)), None, None)?);
            }
        }
        "table2" => {
            for a in [1.2, 1.5, 1.9] {
                out.push(space_study(Example1, a, Alpha0, format!("table2_{}", a_tag(a)), None, None)?);
            }
        }
        "table3" => {
            for a in [1.2, 1.4, 1.7] {
                out.push(time_study(Example2, a, SecondOrder, format!("table3_{}", a_tag(a)), None, None)?);
            }
        }
        "table4" => {
            for a in [1.2, 1.4, 1.7] {
                out.push(space_study(Example2, a, SecondOrder, format!("table4_{}", a_tag(a)), None, None)?);
            }
        }
        "table5" | "table6" => {
            let id = if name == "table5" { Example3a } else { Example3b };
            for a in [1.4, 1.85] {
                out.push(time_study(id, a, Alpha0, format!("{name}_{}_alpha0", a_tag(a)), None, None)?);
                out.push(time_study(id, a, SecondOrder, format!("{name}_{}_second", a_tag(a)), None, None)?);
            }
        }
        "table7" => {
            for (a, start) in [(1.2, 256), (1.9, 64)] {
                out.push(time_study(
                    Example4,
                    a,
                    Alpha0,
                    format!("table7_{}_time", a_tag(a)),
                    Some(doubling(start, 4)),
                    Some(32),
                )?);
                out.push(space_study(Example4, a, Alpha0, format!("table7_{}_space", a_tag(a)), None, None)?);
            }
        }
        "table8" => {
            for (a, start) in [(1.4, 256), (1.85, 64)] {
                out.push(time_study(
                    Example4,
                    a,
                    SecondOrder,
                    format!("table8_{}_time", a_tag(a)),
                    Some(doubling(start, 4)),
                    Some(32),
                )?);
                out.push(space_study(Example4, a, SecondOrder, format!("table8_{}_space", a_tag(a)), None, None)?);
            }
        }
        _ => {
            return Err(Error::InvalidStudy(format!(
                "unknown table preset '{name}' (expected table1..table8)"
            )))
        }
    }
    Ok(out)
}

/// The figure-1 configuration.
pub fn fig1_config() -> TransitionConfig {
    TransitionConfig::default()
}

/// Named presets the command line accepts.
pub fn list_presets() -> Vec<(&'static str, &'static str)> {
    vec![
        ("example1", "1D, smooth data, cubic exponent offset, T = 1/2 (alpha0-order tables)"),
        ("example2", "1D, polynomial data, cubic exponent offset, T = 1 (second-order tables)"),
        ("example3a", "1D, smooth data, sine exponent offset, f = 1"),
        ("example3b", "1D, nonsmooth data (x^(-1/4), indicator), sine exponent offset, f = 1"),
        ("example4", "2D tensor grid, sine exponent offset, f = 1"),
        ("table1", "temporal rates of the alpha0-order scheme on example1, J = 16"),
        ("table2", "spatial rates of the alpha0-order scheme on example1, N = 32"),
        ("table3", "temporal rates of the second-order scheme on example2, J = 32"),
        ("table4", "spatial rates of the second-order scheme on example2, N = 32"),
        ("table5", "temporal rates of both schemes on example3a, J = 32"),
        ("table6", "temporal rates of both schemes on example3b, J = 32"),
        ("table7", "2D temporal and spatial rates of the alpha0-order scheme on example4"),
        ("table8", "2D temporal and spatial rates of the second-order scheme on example4"),
        ("fig1", "transition demonstration: exponent moving from 1.9 to 1.4"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_presets_construct() {
        for (id, a) in [
            (ExampleId::Example1, 1.5),
            (ExampleId::Example2, 1.4),
            (ExampleId::Example3a, 1.85),
            (ExampleId::Example3b, 1.4),
            (ExampleId::Example4, 1.85),
        ] {
            let (spec, _) = example_problem(id, a).unwrap();
            assert_eq!(spec.exponent.alpha0(), a);
        }
    }

    #[test]
    fn example1_matches_published_setup() {
        let (spec, domain) = example_problem(ExampleId::Example1, 1.5).unwrap();
        assert_eq!(spec.t_end(), 0.5);
        assert_eq!(domain, MeshDomain::Interval { a: 0.0, b: 1.0 });
        assert!(spec.source.is_zero());
        // alpha(t) = 1.5 + t^3/2
        assert!((spec.exponent.alpha(0.5) - (1.5 + 0.0625)).abs() < 1e-15);
        // u0(1/2) = 1, ubar0(1/4) = 1
        assert!((spec.u0.eval([0.5, 0.0]) - 1.0).abs() < 1e-15);
        assert!((spec.ubar0.eval([0.25, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example4_matches_published_setup() {
        let (spec, domain) = example_problem(ExampleId::Example4, 1.85).unwrap();
        assert!(matches!(domain, MeshDomain::Rectangle { .. }));
        // alpha(t) = alpha0 + sin(t)/9
        assert!((spec.exponent.alpha(1.0) - (1.85 + 1f64.sin() / 9.0)).abs() < 1e-15);
        assert!((spec.source.eval([0.3, 0.7], 0.2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn paper_ladders() {
        assert_eq!(paper_n_list(ExampleId::Example1, 1.9), vec![256, 512, 1024, 2048, 4096]);
        assert_eq!(paper_n_list(ExampleId::Example3a, 1.85), vec![128, 256, 512, 1024]);
        // off-column exponents get the generic ladder
        assert_eq!(paper_n_list(ExampleId::Example1, 1.33), vec![256, 512, 1024, 2048]);
    }

    #[test]
    fn tables_expand() {
        for t in ["table1", "table2", "table3", "table4", "table7", "table8"] {
            let studies = table_studies(t).unwrap();
            assert!(!studies.is_empty(), "{t}");
        }
        assert_eq!(table_studies("table5").unwrap().len(), 4);
        assert!(table_studies("table9").is_err());
    }

    #[test]
    fn nonsmooth_data_values() {
        let (spec, _) = example_problem(ExampleId::Example3b, 1.4).unwrap();
        assert!((spec.u0.eval([1.0 / 32.0, 0.0]) - 32f64.powf(0.25)).abs() < 1e-12);
        assert_eq!(spec.ubar0.eval([0.5, 0.0]), 1.0);
        assert_eq!(spec.ubar0.eval([0.5 + 1e-12, 0.0]), 0.0);
        assert!(!spec.u0.has_gradient());
    }
}
