//! Convergence studies and the transition-behavior demonstration.
//!
//! Errors are self-convergence errors: a run is compared against the run
//! with twice the number of steps (temporal studies) or twice the number of
//! subdivisions per axis (spatial studies), at the final time, in the lumped
//! norm. Rates are base-2 logarithms of consecutive error ratios. Runs at
//! distinct refinement levels share nothing mutable and execute in parallel;
//! consecutive levels share the finer run, so a study of L levels costs L+1
//! runs.

use crate::error::{Error, Result};
use crate::fem::{Mesh, MeshDomain};
use crate::problem::{ProblemSpec, SourceTerm, SpatialFn, TimeFactor};
use crate::schemes::{run, SchemeKind, SolutionHistory};
use crate::exponent::ExponentFunction;
use rayon::prelude::*;
use std::time::Instant;

/// Which discretization parameter a study refines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StudyAxis {
    /// Refine the step count over `n_list` at fixed spatial resolution `j`.
    Time { j: usize, n_list: Vec<usize> },
    /// Refine the mesh over `j_list` at fixed step count `n`.
    Space { n: usize, j_list: Vec<usize> },
}

impl StudyAxis {
    fn levels(&self) -> &[usize] {
        match self {
            StudyAxis::Time { n_list, .. } => n_list,
            StudyAxis::Space { j_list, .. } => j_list,
        }
    }
}

/// One convergence study: a problem, a scheme, and a refinement axis.
#[derive(Debug)]
pub struct StudySpec {
    pub label: String,
    pub scheme: SchemeKind,
    pub problem: ProblemSpec,
    pub domain: MeshDomain,
    pub axis: StudyAxis,
}

#[derive(Debug, Clone, Copy)]
pub struct ReportRow {
    pub param: usize,
    pub error: f64,
    /// log2 of the previous error over this one; absent on the first row.
    pub rate: Option<f64>,
}

/// Errors and rates of one study, plus the stability monitor.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub label: String,
    pub scheme: SchemeKind,
    pub alpha0: f64,
    /// "N" for temporal studies, "J" for spatial ones.
    pub axis_name: &'static str,
    pub fixed_name: &'static str,
    pub fixed_value: usize,
    pub rows: Vec<ReportRow>,
    /// max_n lumped norm of the scheme variable, per refinement level run.
    pub state_norms: Vec<f64>,
    pub runtime_sec: f64,
}

impl ConvergenceReport {
    pub fn final_rate(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.rate)
    }

    fn error_name(&self) -> &'static str {
        match self.axis_name {
            "N" => "E",
            _ => "G",
        }
    }

    fn rate_name(&self) -> &'static str {
        match self.axis_name {
            "N" => "rate^t",
            _ => "rate^x",
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level_param,error,rate\n");
        for row in &self.rows {
            let rate = row.rate.map_or(String::new(), |r| format!("{r:.2}"));
            out.push_str(&format!("{},{:.4e},{}\n", row.param, row.error, rate));
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!(
            "### {} ({} scheme, alpha0 = {}, {} = {})\n\n| {} | {} | {} |\n|---:|---:|---:|\n",
            self.label,
            self.scheme.label(),
            self.alpha0,
            self.fixed_name,
            self.fixed_value,
            self.axis_name,
            self.error_name(),
            self.rate_name(),
        );
        for row in &self.rows {
            let rate = row.rate.map_or("*".to_string(), |r| format!("{r:.2}"));
            out.push_str(&format!("| {} | {:.4e} | {} |\n", row.param, row.error, rate));
        }
        out
    }
}

/// Lumped-norm distance of two final states on the same mesh.
pub fn final_time_diff(coarse: &SolutionHistory, fine: &SolutionHistory) -> f64 {
    let a = coarse.final_solution();
    let b = fine.final_solution();
    let d: Vec<f64> = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x - y)
        .collect();
    coarse.space.lumped_norm(&d)
}

/// Lumped-norm distance of final states across one mesh refinement: coarse
/// interior node j sits at fine interior node 2j (1-based), i.e. at 0-based
/// fine index 2c + 1 per axis.
pub fn final_space_diff(coarse: &SolutionHistory, fine: &SolutionHistory) -> f64 {
    let a = coarse.final_solution();
    let b = fine.final_solution();
    let mc = coarse.space.mesh.m();
    let mf = fine.space.mesh.m();
    assert_eq!(mf, 2 * (mc + 1) - 1, "fine mesh must halve the coarse one");
    let mut d = Vec::with_capacity(a.len());
    match coarse.space.mesh.dim() {
        1 => {
            for c in 0..mc {
                d.push(a.as_slice()[c] - b.as_slice()[2 * c + 1]);
            }
        }
        _ => {
            for cx in 0..mc {
                for cy in 0..mc {
                    let fine_idx = (2 * cx + 1) * mf + (2 * cy + 1);
                    d.push(a.as_slice()[cx * mc + cy] - b.as_slice()[fine_idx]);
                }
            }
        }
    }
    coarse.space.lumped_norm(&d)
}

/// E(tau, h): runs at (n, j) and (2n, j) and compares final states.
pub fn self_error_time(
    problem: &ProblemSpec,
    domain: MeshDomain,
    scheme: SchemeKind,
    j: usize,
    n: usize,
) -> Result<f64> {
    let mesh = Mesh::new(domain, j)?;
    let (coarse, fine) = rayon::join(
        || run(problem, mesh, n, scheme),
        || run(problem, mesh, 2 * n, scheme),
    );
    Ok(final_time_diff(&coarse?, &fine?))
}

/// G(tau, h): runs at (n, j) and (n, 2j) and compares final states at the
/// shared nodes.
pub fn self_error_space(
    problem: &ProblemSpec,
    domain: MeshDomain,
    scheme: SchemeKind,
    j: usize,
    n: usize,
) -> Result<f64> {
    let coarse_mesh = Mesh::new(domain, j)?;
    let fine_mesh = Mesh::new(domain, 2 * j)?;
    let (coarse, fine) = rayon::join(
        || run(problem, coarse_mesh, n, scheme),
        || run(problem, fine_mesh, n, scheme),
    );
    Ok(final_space_diff(&coarse?, &fine?))
}

fn validate_doubling(levels: &[usize]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidStudy("empty refinement list".into()));
    }
    for w in levels.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::InvalidStudy(format!(
                "refinement list must double at each level, got {} after {}",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// Runs a convergence study: all refinement levels (plus the one extra run
/// each self-error needs) in parallel, then errors and rates.
pub fn run_study(study: &StudySpec) -> Result<ConvergenceReport> {
    let start = Instant::now();
    let levels = study.axis.levels();
    validate_doubling(levels)?;
    let mut params: Vec<usize> = levels.to_vec();
    params.push(2 * *levels.last().unwrap());

    let runs: Vec<SolutionHistory> = params
        .par_iter()
        .map(|&p| {
            let (mesh, n) = match &study.axis {
                StudyAxis::Time { j, .. } => (Mesh::new(study.domain, *j)?, p),
                StudyAxis::Space { n, .. } => (Mesh::new(study.domain, p)?, *n),
            };
            run(&study.problem, mesh, n, study.scheme).map_err(|e| Error::StudyLevel {
                level: p,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<ReportRow> = Vec::with_capacity(levels.len());
    for (k, &param) in levels.iter().enumerate() {
        let error = match &study.axis {
            StudyAxis::Time { .. } => final_time_diff(&runs[k], &runs[k + 1]),
            StudyAxis::Space { .. } => final_space_diff(&runs[k], &runs[k + 1]),
        };
        let rate = if k > 0 && error > 0.0 && rows[k - 1].error > 0.0 {
            Some((rows[k - 1].error / error).log2())
        } else {
            None
        };
        rows.push(ReportRow { param, error, rate });
    }

    let (axis_name, fixed_name, fixed_value) = match &study.axis {
        StudyAxis::Time { j, .. } => ("N", "J", *j),
        StudyAxis::Space { n, .. } => ("J", "N", *n),
    };
    Ok(ConvergenceReport {
        label: study.label.clone(),
        scheme: study.scheme,
        alpha0: study.problem.exponent.alpha0(),
        axis_name,
        fixed_name,
        fixed_value,
        rows,
        state_norms: runs.iter().map(|r| r.max_state_lumped_norm()).collect(),
        runtime_sec: start.elapsed().as_secs_f64(),
    })
}

/// Configuration of the transition demonstration: a near-point source acting
/// on (0, 2) over a long horizon, solved under two constant exponents and
/// one exponent that transits from the high to the low value early on.
#[derive(Debug, Clone, Copy)]
pub struct TransitionConfig {
    pub t_end: f64,
    pub domain: MeshDomain,
    pub j: usize,
    pub n: usize,
    pub kappa: f64,
    pub z_low: f64,
    pub z_high: f64,
    /// The variable exponent reaches `z_low` at this time and stays there.
    pub transition_horizon: f64,
    /// Coordinate whose trace is recorded (must be a mesh node).
    pub probe_x: f64,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        Self {
            t_end: 15.0,
            domain: MeshDomain::Interval { a: 0.0, b: 2.0 },
            j: 128,
            n: 512,
            kappa: 1.0,
            z_low: 1.4,
            z_high: 1.9,
            transition_horizon: 1.0,
            probe_x: 1.0,
        }
    }
}

/// Traces of the three runs at the probe point.
#[derive(Debug, Clone)]
pub struct TransitionDemo {
    pub config: TransitionConfig,
    pub times: Vec<f64>,
    pub u_high: Vec<f64>,
    pub u_low: Vec<f64>,
    pub u_var: Vec<f64>,
}

/// Relative l2 distance between two traces over a time window.
fn window_distance(times: &[f64], var: &[f64], reference: &[f64], window: (f64, f64)) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &t) in times.iter().enumerate() {
        if t >= window.0 && t <= window.1 {
            num += (var[i] - reference[i]).powi(2);
            den += reference[i].powi(2);
        }
    }
    (num / den).sqrt()
}

impl TransitionDemo {
    /// Relative distance of the variable-exponent trace to the high-exponent
    /// trace over a window.
    pub fn distance_to_high(&self, window: (f64, f64)) -> f64 {
        window_distance(&self.times, &self.u_var, &self.u_high, window)
    }

    pub fn distance_to_low(&self, window: (f64, f64)) -> f64 {
        window_distance(&self.times, &self.u_var, &self.u_low, window)
    }

    pub fn to_csv(&self) -> String {
        let col = |z: f64| format!("u_{:.0}", z * 10.0);
        let mut out = format!(
            "t,{},{},u_var\n",
            col(self.config.z_high),
            col(self.config.z_low)
        );
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{:.6},{:.10e},{:.10e},{:.10e}\n",
                self.times[i], self.u_high[i], self.u_low[i], self.u_var[i]
            ));
        }
        out
    }
}

/// Runs the three demo cases with the alpha0-order scheme and extracts the
/// probe traces. The source is the separable near-point pulse
/// `f = e^(-t) e^(-(x - probe)^2 / 2)`, identical across the cases.
pub fn run_transition_demo(config: TransitionConfig) -> Result<TransitionDemo> {
    let (a, b) = match config.domain {
        MeshDomain::Interval { a, b } => (a, b),
        _ => {
            return Err(Error::InvalidStudy(
                "transition demo runs on an interval".into(),
            ))
        }
    };
    let mesh = Mesh::new(config.domain, config.j)?;
    let h = (b - a) / config.j as f64;
    let probe_steps = (config.probe_x - a) / h;
    if (probe_steps - probe_steps.round()).abs() > 1e-9 {
        return Err(Error::InvalidStudy(format!(
            "probe x = {} is not a mesh node",
            config.probe_x
        )));
    }
    let probe_node = probe_steps.round() as usize;
    if probe_node == 0 || probe_node >= config.j {
        return Err(Error::InvalidStudy("probe must be an interior node".into()));
    }
    let probe_dof = probe_node - 1;

    let make_problem = |exponent: ExponentFunction| -> Result<ProblemSpec> {
        let probe = config.probe_x;
        ProblemSpec::new(
            exponent,
            config.kappa,
            SpatialFn::zero(),
            SpatialFn::zero(),
            SourceTerm::Separable {
                time: TimeFactor::Exp { rate: 1.0 },
                space: SpatialFn::new(move |x| (-(x[0] - probe).powi(2) / 2.0).exp()),
            },
        )
    };

    let exponents = [
        ExponentFunction::constant(config.z_high, config.t_end)?,
        ExponentFunction::constant(config.z_low, config.t_end)?,
        ExponentFunction::transition(
            config.z_low,
            config.z_high,
            config.transition_horizon,
            config.t_end,
        )?,
    ];
    let traces: Vec<Vec<f64>> = exponents
        .into_par_iter()
        .map(|e| {
            let problem = make_problem(e)?;
            let hist = run(&problem, mesh, config.n, SchemeKind::Alpha0)?;
            Ok(hist.trace_at(probe_dof))
        })
        .collect::<Result<_>>()?;

    let tau = config.t_end / config.n as f64;
    let mut it = traces.into_iter();
    Ok(TransitionDemo {
        config,
        times: (0..=config.n).map(|i| i as f64 * tau).collect(),
        u_high: it.next().unwrap(),
        u_low: it.next().unwrap(),
        u_var: it.next().unwrap(),
    })
}

/// Installs a global rayon pool with the requested thread count. Call once,
/// before any parallel work; later calls are ignored.
pub fn configure_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_validation() {
        assert!(validate_doubling(&[16, 32, 64]).is_ok());
        assert!(validate_doubling(&[16, 48]).is_err());
        assert!(validate_doubling(&[]).is_err());
    }

    #[test]
    fn identical_runs_have_zero_self_error() {
        use std::f64::consts::PI;
        let e = ExponentFunction::poly_offset(1.5, 0.5, 3.0, 0.5).unwrap();
        let spec = ProblemSpec::new(
            e,
            1.0,
            SpatialFn::with_gradient(|x| (PI * x[0]).sin(), |x| [PI * (PI * x[0]).cos(), 0.0]),
            SpatialFn::zero(),
            SourceTerm::Zero,
        )
        .unwrap();
        let domain = MeshDomain::Interval { a: 0.0, b: 1.0 };
        let mesh = Mesh::new(domain, 8).unwrap();
        let h1 = run(&spec, mesh, 8, SchemeKind::Alpha0).unwrap();
        let h2 = run(&spec, mesh, 8, SchemeKind::Alpha0).unwrap();
        assert_eq!(final_time_diff(&h1, &h2), 0.0);
    }

    #[test]
    fn zero_data_study_reports_zero_errors_and_no_rates() {
        let e = ExponentFunction::poly_offset(1.5, 0.5, 3.0, 0.5).unwrap();
        let spec = ProblemSpec::new(
            e,
            1.0,
            SpatialFn::zero(),
            SpatialFn::zero(),
            SourceTerm::Zero,
        )
        .unwrap();
        let study = StudySpec {
            label: "zero".into(),
            scheme: SchemeKind::SecondOrder,
            problem: spec,
            domain: MeshDomain::Interval { a: 0.0, b: 1.0 },
            axis: StudyAxis::Time {
                j: 4,
                n_list: vec![4, 8],
            },
        };
        let report = run_study(&study).unwrap();
        for row in &report.rows {
            assert_eq!(row.error, 0.0);
            assert!(row.rate.is_none());
        }
    }

    #[test]
    fn report_formats_are_stable() {
        let report = ConvergenceReport {
            label: "demo".into(),
            scheme: SchemeKind::Alpha0,
            alpha0: 1.5,
            axis_name: "N",
            fixed_name: "J",
            fixed_value: 16,
            rows: vec![
                ReportRow {
                    param: 256,
                    error: 7.3897e-5,
                    rate: None,
                },
                ReportRow {
                    param: 512,
                    error: 1.8645e-5,
                    rate: Some(1.99),
                },
            ],
            state_norms: vec![1.0, 1.0, 1.0],
            runtime_sec: 0.0,
        };
        let csv = report.to_csv();
        assert_eq!(
            csv,
            "level_param,error,rate\n256,7.3897e-5,\n512,1.8645e-5,1.99\n"
        );
        let md = report.to_markdown();
        assert!(md.contains("| 256 | 7.3897e-5 | * |"));
        assert!(md.contains("| 512 | 1.8645e-5 | 1.99 |"));
    }
}
