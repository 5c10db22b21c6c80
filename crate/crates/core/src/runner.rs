//! Experiment execution and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{BoundaryKind, Experiment, ExperimentConfig, Initial};
use crate::error::{Error, Result};
use crate::evolution::{
    evolve, evolve_2d, grid_positions, mean, trace_error_vectors, BoundarySpec, GridSpec,
    PlaneBoundary, Scheme, SolverConfig, StepMetrics, TimeSeries,
};
use crate::navier_stokes::{evolve_ns, FlowBoundary, FlowState};
use crate::oracle::{
    classical_cavity, classical_evolve, classical_evolve_2d, classical_rd,
    classical_rd_implicit_linear, classical_rd_step,
};
use crate::reaction::{
    brusselator_initial, evolve_rd, evolve_rd_implicit_linear, gray_scott_mid_pulse, RDSystem,
};
use crate::vqls::{min_layers, SolveOptions};

/// What to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Quantum,
    /// Classical twin only.
    OracleOnly,
    /// Quantum run plus trace errors against the classical twin.
    Verify,
}

#[derive(Debug, Clone)]
enum Problem {
    Heat1d {
        grid: GridSpec,
        bc: BoundarySpec,
        u0: Vec<f64>,
        scheme: Scheme,
    },
    Heat2d {
        grid: GridSpec,
        bc: PlaneBoundary,
        u0: Vec<f64>,
    },
    Rd {
        system: RDSystem,
        grid: GridSpec,
        u0: (Vec<f64>, Vec<f64>),
    },
    LinearRd {
        k: [[f64; 2]; 2],
        grid: GridSpec,
        bc: [BoundarySpec; 2],
        u0: (Vec<f64>, Vec<f64>),
    },
    Cavity {
        initial: FlowState,
        walls: FlowBoundary,
    },
}

/// A validated, fully defaulted single experiment.
#[derive(Debug, Clone)]
pub struct Plan {
    pub experiment: Experiment,
    pub solver: SolverConfig,
    problem: Problem,
}

fn to_config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn dirichlet_pair(cfg: &ExperimentConfig, defaults: (f64, f64)) -> Result<BoundarySpec> {
    match cfg.boundary.unwrap_or(BoundaryKind::Dirichlet) {
        BoundaryKind::Dirichlet => Ok(BoundarySpec::dirichlet(
            cfg.left.unwrap_or(defaults.0),
            cfg.right.unwrap_or(defaults.1),
        )),
        BoundaryKind::Neumann if cfg.left.is_some() || cfg.right.is_some() => Err(Error::Config(
            "`left`/`right` values need Dirichlet boundaries".into(),
        )),
        BoundaryKind::Neumann => Ok(BoundarySpec::neumann()),
    }
}

impl Plan {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        if cfg.is_sweep() {
            return Err(Error::Config(
                "configuration holds sweep lists; use the sweep command".into(),
            ));
        }
        Self::build(cfg).map_err(to_config_error)
    }

    fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let experiment = cfg.experiment.base();
        let n = cfg.n_value();
        let (problem, default_layers) = match experiment {
            Experiment::Heat1d | Experiment::Sweep => {
                let n = n.unwrap_or(3);
                let n_t = cfg.n_t.unwrap_or(20);
                let dt = cfg.dt.unwrap_or(1.0 / n_t as f64);
                let length = cfg.length.unwrap_or(1.0);
                let grid = match cfg.diffusion {
                    Some(d) => GridSpec::line_physical(n, length, d, dt, n_t)?,
                    None if cfg.length.is_some() => {
                        return Err(Error::Config("`length` needs `diffusion`".into()))
                    }
                    None => GridSpec::line(n, cfg.delta_value().unwrap_or(1.0), dt, n_t)?,
                };
                let bc = dirichlet_pair(cfg, (1.0, 0.0))?;
                let (gl, gr) = (cfg.left.unwrap_or(1.0), cfg.right.unwrap_or(0.0));
                let u0 = grid_positions(&grid)
                    .into_iter()
                    .map(|x| match cfg.initial.unwrap_or(Initial::Zero) {
                        Initial::Zero => 0.0,
                        Initial::Sine => (std::f64::consts::PI * x / length).sin(),
                        Initial::Linear => gl + (gr - gl) * x / length,
                    })
                    .collect();
                (
                    Problem::Heat1d {
                        grid,
                        bc,
                        u0,
                        scheme: cfg.scheme_value(),
                    },
                    n,
                )
            }
            Experiment::Heat2d => {
                let (mx, my) = (cfg.mx.unwrap_or(3), cfg.my.unwrap_or(3));
                let n_t = cfg.n_t.unwrap_or(20);
                let dx = cfg.delta_value().unwrap_or(1.0);
                let grid = GridSpec::plane(
                    mx,
                    my,
                    dx,
                    cfg.delta_y.unwrap_or(dx),
                    cfg.dt.unwrap_or(1.0 / n_t as f64),
                    n_t,
                )?;
                let bc = PlaneBoundary {
                    x: BoundarySpec::dirichlet(cfg.left.unwrap_or(0.0), cfg.right.unwrap_or(0.0)),
                    y: BoundarySpec::dirichlet(
                        cfg.y_left.unwrap_or(1.0),
                        cfg.y_right.unwrap_or(0.0),
                    ),
                };
                (
                    Problem::Heat2d {
                        grid,
                        bc,
                        u0: vec![0.0; grid.len()],
                    },
                    6,
                )
            }
            Experiment::GrayScott => {
                let n = n.unwrap_or(6);
                let system = RDSystem::gray_scott(
                    [cfg.d1.unwrap_or(1e-4), cfg.d2.unwrap_or(1e-6)],
                    cfg.k1.unwrap_or(0.04),
                    cfg.k2.unwrap_or(0.02),
                );
                system.validate()?;
                let grid = GridSpec::line(n, 0.0, cfg.dt.unwrap_or(0.5), cfg.n_t.unwrap_or(1200))?;
                (
                    Problem::Rd {
                        system,
                        grid,
                        u0: gray_scott_mid_pulse(n),
                    },
                    8,
                )
            }
            Experiment::Brusselator => {
                let n = n.unwrap_or(4);
                let system = RDSystem::brusselator(
                    [cfg.d1.unwrap_or(1e-4), cfg.d2.unwrap_or(1e-4)],
                    cfg.k1.unwrap_or(3.0),
                    cfg.k2.unwrap_or(1.0),
                );
                system.validate()?;
                let grid = GridSpec::line(n, 0.0, cfg.dt.unwrap_or(0.5), cfg.n_t.unwrap_or(800))?;
                (
                    Problem::Rd {
                        system,
                        grid,
                        u0: brusselator_initial(n),
                    },
                    4,
                )
            }
            Experiment::LinearRd => {
                let n = n.unwrap_or(2);
                let n_t = cfg.n_t.unwrap_or(10);
                let grid = GridSpec::line(
                    n,
                    cfg.delta_value().unwrap_or(1.0),
                    cfg.dt.unwrap_or(0.1),
                    n_t,
                )?;
                let off = cfg.k12.unwrap_or(0.3);
                let k = [
                    [cfg.k11.unwrap_or(-1.0), off],
                    [off, cfg.k22.unwrap_or(-1.0)],
                ];
                let side = dirichlet_pair(cfg, (0.0, 0.0))?;
                let xs = grid_positions(&grid);
                let pi = std::f64::consts::PI;
                let u0 = (
                    xs.iter().map(|x| (pi * x).sin()).collect(),
                    xs.iter().map(|x| (2.0 * pi * x).sin()).collect(),
                );
                (
                    Problem::LinearRd {
                        k,
                        grid,
                        bc: [side.clone(), side],
                        u0,
                    },
                    min_layers(n + 1),
                )
            }
            Experiment::Cavity => {
                let re = cfg.reynolds.unwrap_or(100.0);
                let grid = GridSpec::cavity(
                    cfg.mx.unwrap_or(3),
                    cfg.my.unwrap_or(3),
                    re,
                    cfg.dt.unwrap_or(0.5),
                    cfg.n_t.unwrap_or(10),
                )?;
                (
                    Problem::Cavity {
                        initial: FlowState::at_rest(grid, re),
                        walls: FlowBoundary::lid_driven(cfg.lid.unwrap_or(1.0)),
                    },
                    12,
                )
            }
        };
        let defaults = SolveOptions::default();
        let solver = SolverConfig {
            layers: cfg.layers_value().unwrap_or(default_layers),
            options: SolveOptions {
                tol: cfg.tol.unwrap_or(defaults.tol),
                max_evals: cfg.max_evals.unwrap_or(defaults.max_evals),
                memory: cfg.memory.unwrap_or(defaults.memory),
                ..defaults
            },
            seed: cfg.seed_value(),
            warm_start: cfg.warm_start.unwrap_or(true),
            restarts: cfg.restarts.unwrap_or(1),
        };
        Ok(Plan {
            experiment,
            solver,
            problem,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.solver.seed = seed;
        self
    }

    pub fn n_qubits(&self) -> usize {
        match &self.problem {
            Problem::Heat1d { grid, .. }
            | Problem::Heat2d { grid, .. }
            | Problem::Rd { grid, .. } => grid.n_qubits(),
            Problem::LinearRd { grid, .. } => grid.n_qubits() + 1,
            Problem::Cavity { initial, .. } => initial.grid.n_qubits(),
        }
    }
}

/// One solution field over time.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub label: String,
    pub snapshots: Vec<Vec<f64>>,
}

/// Per-step metrics of one family of linear solves.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveLog {
    pub label: String,
    pub metrics: Vec<StepMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: Experiment,
    pub mode: Mode,
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    pub solves: Vec<SolveLog>,
    pub warnings: Vec<String>,
    /// Experiment-specific summary entries.
    pub extras: Vec<(String, f64)>,
}

/// Shortest round-trip text for a float, in scientific notation outside
/// `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn blank_metrics(n_t: usize) -> Vec<StepMetrics> {
    (1..=n_t)
        .map(|step| StepMetrics {
            step,
            cost: None,
            n_function_evals: 0,
            n_gradient_evals: 0,
            n_iterations: 0,
            converged: true,
            trace_error: None,
        })
        .collect()
}

fn field(label: &str, snapshots: Vec<Vec<f64>>) -> Field {
    Field {
        label: label.to_string(),
        snapshots,
    }
}

fn solve_log(label: &str, metrics: Vec<StepMetrics>) -> SolveLog {
    SolveLog {
        label: label.to_string(),
        metrics,
    }
}

fn split_stacked(snapshots: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    snapshots
        .iter()
        .map(|s| {
            let (a, b) = s.split_at(s.len() / 2);
            (a.to_vec(), b.to_vec())
        })
        .unzip()
}

impl Report {
    pub fn mean_trace_error(&self) -> Option<f64> {
        mean(
            self.solves
                .iter()
                .flat_map(|s| s.metrics.iter().filter_map(|m| m.trace_error)),
        )
    }

    pub fn mean_function_evals(&self) -> f64 {
        mean(
            self.solves
                .iter()
                .flat_map(|s| s.metrics.iter().map(|m| m.n_function_evals as f64)),
        )
        .unwrap_or(0.0)
    }

    pub fn mean_iterations(&self) -> f64 {
        mean(
            self.solves
                .iter()
                .flat_map(|s| s.metrics.iter().map(|m| m.n_iterations as f64)),
        )
        .unwrap_or(0.0)
    }

    pub fn nonconverged_steps(&self) -> usize {
        self.solves
            .iter()
            .map(|s| s.metrics.iter().filter(|m| !m.converged).count())
            .sum()
    }

    pub fn summary_line(&self) -> String {
        let te = self
            .mean_trace_error()
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
        let mut line = format!(
            "experiment={} steps={} mean_trace_error={te} mean_function_evals={:.6e} mean_iterations={:.6e} nonconverged={}",
            self.experiment.name(),
            self.times.len().saturating_sub(1),
            self.mean_function_evals(),
            self.mean_iterations(),
            self.nonconverged_steps()
        );
        for (k, v) in &self.extras {
            let _ = write!(line, " {k}={v:.6e}");
        }
        line
    }

    pub fn solutions_csv(&self) -> String {
        let labelled = self.fields.len() > 1;
        let mut out = String::from(if labelled {
            "step,time,grid_index,value,component\n"
        } else {
            "step,time,grid_index,value\n"
        });
        for f in &self.fields {
            for (step, (t, snap)) in self.times.iter().zip(&f.snapshots).enumerate() {
                for (i, v) in snap.iter().enumerate() {
                    let _ = write!(out, "{step},{},{i},{}", fmt_f64(*t), fmt_f64(*v));
                    if labelled {
                        let _ = write!(out, ",{}", f.label);
                    }
                    out.push('\n');
                }
            }
        }
        out
    }

    pub fn metrics_csv(&self) -> String {
        let labelled = self.solves.len() > 1;
        let mut out = String::from("step,cost,n_function_evals,n_iterations,trace_error_vs_oracle");
        out.push_str(if labelled { ",component\n" } else { "\n" });
        let opt = |v: Option<f64>| v.map_or_else(String::new, fmt_f64);
        for s in &self.solves {
            for m in &s.metrics {
                let _ = write!(
                    out,
                    "{},{},{},{},{}",
                    m.step,
                    opt(m.cost),
                    m.n_function_evals,
                    m.n_iterations,
                    opt(m.trace_error)
                );
                if labelled {
                    let _ = write!(out, ",{}", s.label);
                }
                out.push('\n');
            }
        }
        out
    }

    /// Writes `solutions.csv`, `metrics.csv` and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("solutions.csv"), self.solutions_csv())?;
        fs::write(dir.join("metrics.csv"), self.metrics_csv())?;
        fs::write(dir.join("summary.txt"), self.summary_line() + "\n")?;
        Ok(())
    }
}

fn heat_report(
    experiment: Experiment,
    mode: Mode,
    quantum: Option<TimeSeries>,
    oracle: Option<Vec<Vec<f64>>>,
) -> Result<Report> {
    let (times, snapshots, metrics, warnings) = match (quantum, oracle) {
        (Some(mut q), oracle) => {
            if let Some(r) = &oracle {
                q.attach_reference(r)?;
            }
            (q.times, q.snapshots, q.metrics, q.warnings)
        }
        (None, Some(o)) => {
            let n_t = o.len() - 1;
            (Vec::new(), o, blank_metrics(n_t), Vec::new())
        }
        (None, None) => unreachable!("a run produces at least one twin"),
    };
    Ok(Report {
        experiment,
        mode,
        times,
        fields: vec![field("u", snapshots)],
        solves: vec![solve_log("u", metrics)],
        warnings,
        extras: Vec::new(),
    })
}

fn times_of(grid: &GridSpec) -> Vec<f64> {
    (0..=grid.n_t).map(|k| grid.time(k)).collect()
}

/// Executes a plan.
pub fn run_plan(plan: &Plan, mode: Mode) -> Result<Report> {
    let quantum = mode != Mode::OracleOnly;
    let classical = mode != Mode::Quantum;
    let cfg = &plan.solver;
    let mut report = match &plan.problem {
        Problem::Heat1d {
            grid,
            bc,
            u0,
            scheme,
        } => {
            let q = quantum
                .then(|| evolve(grid, bc, u0, *scheme, cfg))
                .transpose()?;
            let o = classical
                .then(|| classical_evolve(*scheme, grid, bc, u0, None))
                .transpose()?;
            heat_report(plan.experiment, mode, q, o.map(|o| o.snapshots))?
        }
        Problem::Heat2d { grid, bc, u0 } => {
            let q = quantum.then(|| evolve_2d(grid, bc, u0, cfg)).transpose()?;
            let o = classical
                .then(|| classical_evolve_2d(grid, bc, u0))
                .transpose()?;
            heat_report(plan.experiment, mode, q, o.map(|o| o.snapshots))?
        }
        Problem::LinearRd { k, grid, bc, u0 } => {
            let u0r = (u0.0.as_slice(), u0.1.as_slice());
            let q = quantum
                .then(|| evolve_rd_implicit_linear(*k, grid, bc, u0r, cfg))
                .transpose()?;
            let o = classical
                .then(|| classical_rd_implicit_linear(*k, grid, bc, u0r))
                .transpose()?;
            let mut r = heat_report(plan.experiment, mode, q, o.map(|o| o.snapshots))?;
            let (a, b) = split_stacked(&r.fields[0].snapshots);
            r.fields = vec![field("1", a), field("2", b)];
            r
        }
        Problem::Rd { system, grid, u0 } => rd_report(plan, mode, system, grid, u0)?,
        Problem::Cavity { initial, walls } => cavity_report(plan, mode, initial, walls)?,
    };
    if report.times.is_empty() {
        report.times = match &plan.problem {
            Problem::Heat1d { grid, .. }
            | Problem::Heat2d { grid, .. }
            | Problem::Rd { grid, .. }
            | Problem::LinearRd { grid, .. } => times_of(grid),
            Problem::Cavity { initial, .. } => times_of(&initial.grid),
        };
    }
    Ok(report)
}

/// Reaction-diffusion runs compare each quantum step against one classical
/// step taken from the same quantum state, so the error is step-local.
fn rd_report(
    plan: &Plan,
    mode: Mode,
    system: &RDSystem,
    grid: &GridSpec,
    u0: &(Vec<f64>, Vec<f64>),
) -> Result<Report> {
    let u0r = (u0.0.as_slice(), u0.1.as_slice());
    let (snaps, mut metrics, warnings) = if mode == Mode::OracleOnly {
        let [a, b] = classical_rd(system, grid, u0r)?;
        (
            [a.snapshots, b.snapshots],
            [blank_metrics(grid.n_t), blank_metrics(grid.n_t)],
            Vec::new(),
        )
    } else {
        let [a, b] = evolve_rd(system, grid, u0r, &plan.solver)?;
        let warnings = a
            .warnings
            .iter()
            .cloned()
            .chain(b.warnings.iter().map(|w| format!("component 2: {w}")))
            .collect();
        ([a.snapshots, b.snapshots], [a.metrics, b.metrics], warnings)
    };
    if mode == Mode::Verify {
        for k in 0..grid.n_t {
            let (c1, c2) =
                classical_rd_step(system, grid, (&snaps[0][k], &snaps[1][k]), grid.time(k + 1))?;
            metrics[0][k].trace_error = trace_error_vectors(&snaps[0][k + 1], &c1)?;
            metrics[1][k].trace_error = trace_error_vectors(&snaps[1][k + 1], &c2)?;
        }
    }
    let [s1, s2] = snaps;
    let [m1, m2] = metrics;
    Ok(Report {
        experiment: plan.experiment,
        mode,
        times: times_of(grid),
        fields: vec![field("1", s1), field("2", s2)],
        solves: vec![solve_log("1", m1), solve_log("2", m2)],
        warnings,
        extras: Vec::new(),
    })
}

fn cavity_report(
    plan: &Plan,
    mode: Mode,
    initial: &FlowState,
    walls: &FlowBoundary,
) -> Result<Report> {
    let n_t = initial.grid.n_t;
    let oracle = (mode != Mode::Quantum)
        .then(|| classical_cavity(initial, walls))
        .transpose()?;
    let oracle_fields = oracle.as_ref().map(|steps| {
        let pick = |f: &dyn Fn(&FlowState) -> &Vec<f64>| -> Vec<Vec<f64>> {
            std::iter::once(initial)
                .chain(steps.iter().map(|s| &s.state))
                .map(|s| f(s).clone())
                .collect()
        };
        [pick(&|s| &s.u), pick(&|s| &s.v), pick(&|s| &s.p)]
    });
    let mut extras = Vec::new();
    let (fields, metrics, warnings) = if mode == Mode::OracleOnly {
        let steps = oracle.as_ref().expect("oracle run");
        extras.push((
            "final_divergence".to_string(),
            steps.last().map_or(0.0, |s| s.divergence_after),
        ));
        (
            oracle_fields.expect("oracle run"),
            [blank_metrics(n_t), blank_metrics(n_t), blank_metrics(n_t)],
            Vec::new(),
        )
    } else {
        let run = evolve_ns(initial, walls, &plan.solver)?;
        let pick = |f: &dyn Fn(&FlowState) -> &Vec<f64>| -> Vec<Vec<f64>> {
            run.states.iter().map(|s| f(s).clone()).collect()
        };
        let fields = [pick(&|s| &s.u), pick(&|s| &s.v), pick(&|s| &s.p)];
        let mut metrics = [
            run.metrics.iter().map(|m| m.u.clone()).collect::<Vec<_>>(),
            run.metrics.iter().map(|m| m.v.clone()).collect(),
            run.metrics.iter().map(|m| m.p.clone()).collect(),
        ];
        if let Some(reference) = &oracle_fields {
            for (ms, (q, r)) in metrics.iter_mut().zip(fields.iter().zip(reference)) {
                for (k, m) in ms.iter_mut().enumerate() {
                    m.trace_error = trace_error_vectors(&q[k + 1], &r[k + 1])?;
                }
            }
        }
        extras.push((
            "final_divergence".to_string(),
            run.metrics.last().map_or(0.0, |m| m.divergence_after),
        ));
        extras.push((
            "pressure_velocity_eval_ratio".to_string(),
            run.pressure_velocity_eval_ratio(),
        ));
        (fields, metrics, run.warnings)
    };
    let [u, v, p] = fields;
    let [mu, mv, mp] = metrics;
    Ok(Report {
        experiment: plan.experiment,
        mode,
        times: times_of(&initial.grid),
        fields: vec![field("u", u), field("v", v), field("p", p)],
        solves: vec![solve_log("u", mu), solve_log("v", mv), solve_log("p", mp)],
        warnings,
        extras,
    })
}

/// Validates `cfg` and runs it once.
pub fn run_config(cfg: &ExperimentConfig, mode: Mode) -> Result<Report> {
    run_plan(&Plan::from_config(cfg)?, mode)
}

/// Metrics of one seeded run inside a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub point: usize,
    pub n: usize,
    pub layers: usize,
    pub delta: Option<f64>,
    pub seed: u64,
    pub mean_trace_error: Option<f64>,
    pub mean_function_evals: f64,
    pub mean_iterations: f64,
    pub nonconverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub n: usize,
    pub layers: usize,
    pub delta: Option<f64>,
    pub runs: usize,
    pub trace_error: (f64, f64),
    pub function_evals: (f64, f64),
    pub iterations: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub records: Vec<RunRecord>,
    pub points: Vec<PointStats>,
    /// Least-squares slope of `log T_eval` against `log(n l)`, when at
    /// least two distinct products were swept.
    pub slope: Option<f64>,
    pub warnings: Vec<String>,
}

/// Sample mean and standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Runs every sweep point `runs` times with seeds `seed, seed + 1, ...`,
/// always verifying against the classical twin.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let points = cfg.points();
    let plans: Vec<Plan> = points
        .iter()
        .map(Plan::from_config)
        .collect::<Result<_>>()?;
    let runs = cfg.runs_value();
    let base_seed = cfg.seed_value();
    let jobs: Vec<(usize, u64)> = (0..plans.len())
        .flat_map(|p| (0..runs as u64).map(move |r| (p, base_seed.wrapping_add(r))))
        .collect();
    let results: Vec<Result<(RunRecord, Vec<String>)>> = jobs
        .par_iter()
        .map(|&(p, seed)| {
            let plan = plans[p].clone().with_seed(seed);
            let report = run_plan(&plan, Mode::Verify)?;
            let record = RunRecord {
                point: p,
                n: plan.n_qubits(),
                layers: plan.solver.layers,
                delta: points[p].delta_value(),
                seed,
                mean_trace_error: report.mean_trace_error(),
                mean_function_evals: report.mean_function_evals(),
                mean_iterations: report.mean_iterations(),
                nonconverged: report.nonconverged_steps(),
            };
            let warnings = report
                .warnings
                .iter()
                .map(|w| format!("point {p} seed {seed}: {w}"))
                .collect();
            Ok((record, warnings))
        })
        .collect();
    let mut records = Vec::with_capacity(results.len());
    let mut warnings = Vec::new();
    for r in results {
        let (rec, w) = r?;
        records.push(rec);
        warnings.extend(w);
    }
    let stats: Vec<PointStats> = (0..plans.len())
        .map(|p| {
            let rs: Vec<&RunRecord> = records.iter().filter(|r| r.point == p).collect();
            let col = |f: &dyn Fn(&RunRecord) -> Option<f64>| {
                mean_std(&rs.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            PointStats {
                n: rs[0].n,
                layers: rs[0].layers,
                delta: rs[0].delta,
                runs: rs.len(),
                trace_error: col(&|r| r.mean_trace_error),
                function_evals: col(&|r| Some(r.mean_function_evals)),
                iterations: col(&|r| Some(r.mean_iterations)),
            }
        })
        .collect();
    let nl: Vec<f64> = stats
        .iter()
        .map(|s| ((s.n * s.layers) as f64).ln())
        .collect();
    let ev: Vec<f64> = stats.iter().map(|s| s.function_evals.0.ln()).collect();
    let distinct = nl.iter().any(|v| (v - nl[0]).abs() > 0.0);
    let slope = if distinct && ev.iter().all(|v| v.is_finite()) {
        fit_slope(&nl, &ev)
    } else {
        None
    };
    Ok(SweepReport {
        records,
        points: stats,
        slope,
        warnings,
    })
}

impl SweepReport {
    pub fn stats_csv(&self) -> String {
        let mut out = String::from(
            "n,layers,delta,runs,mean_trace_error,std_trace_error,mean_function_evals,std_function_evals,mean_iterations,std_iterations\n",
        );
        for p in &self.points {
            let d = p.delta.map_or_else(String::new, fmt_f64);
            let stats = [
                p.trace_error.0,
                p.trace_error.1,
                p.function_evals.0,
                p.function_evals.1,
                p.iterations.0,
                p.iterations.1,
            ]
            .map(fmt_f64)
            .join(",");
            let _ = writeln!(out, "{},{},{d},{},{stats}", p.n, p.layers, p.runs);
        }
        out
    }

    pub fn runs_csv(&self) -> String {
        let mut out = String::from("point,n,layers,delta,seed,mean_trace_error,mean_function_evals,mean_iterations,nonconverged\n");
        for r in &self.records {
            let d = r.delta.map_or_else(String::new, fmt_f64);
            let te = r.mean_trace_error.map_or_else(String::new, fmt_f64);
            let (ev, it) = (fmt_f64(r.mean_function_evals), fmt_f64(r.mean_iterations));
            let _ = writeln!(
                out,
                "{},{},{},{d},{},{te},{ev},{it},{}",
                r.point, r.n, r.layers, r.seed, r.nonconverged
            );
        }
        out
    }

    pub fn summary_line(&self) -> String {
        let slope = self
            .slope
            .map_or_else(|| "n/a".to_string(), |s| format!("{s:.4}"));
        format!(
            "points={} runs={} nl_slope={slope}",
            self.points.len(),
            self.records.len()
        )
    }

    /// Writes `sweep_stats.csv`, `sweep_runs.csv` and `summary.txt`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("sweep_stats.csv"), self.stats_csv())?;
        fs::write(dir.join("sweep_runs.csv"), self.runs_csv())?;
        fs::write(dir.join("summary.txt"), self.summary_line() + "\n")?;
        Ok(())
    }
}
