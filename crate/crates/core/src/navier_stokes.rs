//! Incompressible flow by the projection method on a collocated grid.
//!
//! Each step:
//! 1. predictor: `(I + dx A_x + dy A_y) u* = (1 - dt F^k) u^k + boundary`,
//!    with `F^k = diag(u) B_x + diag(v) B_y` the explicit advection;
//! 2. corrector: a Neumann pressure Poisson equation, regularized by
//!    `1/2 |0><0|` per axis so it has full rank;
//! 3. update: `u = u* - dt B_N p`.

use crate::error::{arg, Result};
use crate::evolution::{
    plane_operator, BoundarySpec, GridSpec, PlaneBoundary, SolverConfig, StepMetrics,
};
use crate::operators::{
    decompose_laplacian_2d, Boundary, DecomposedOperator, Factor, HamiltonianTerm,
};
use crate::state::l2_norm;

impl GridSpec {
    /// Unit-square flow grid with viscous parameters `dt / (Re dx^2)`.
    pub fn cavity(mx: usize, my: usize, reynolds: f64, dt: f64, n_t: usize) -> Result<Self> {
        if !(reynolds > 0.0) {
            return arg("Reynolds number must be positive");
        }
        let dx = 1.0 / ((1usize << mx) as f64 + 1.0);
        let dy = 1.0 / ((1usize << my) as f64 + 1.0);
        let g = GridSpec::plane(
            mx,
            my,
            dt / (reynolds * dx * dx),
            dt / (reynolds * dy * dy),
            dt,
            n_t,
        )?;
        Ok(GridSpec {
            diffusion: 1.0 / reynolds,
            ..g
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub p: Vec<f64>,
    pub reynolds: f64,
    pub grid: GridSpec,
}

impl FlowState {
    pub fn at_rest(grid: GridSpec, reynolds: f64) -> Self {
        let len = grid.len();
        Self {
            u: vec![0.0; len],
            v: vec![0.0; len],
            p: vec![0.0; len],
            reynolds,
            grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let len = self.grid.len();
        if self.grid.dims() != 2 {
            return arg("flow state needs a 2D grid");
        }
        if self.u.len() != len || self.v.len() != len || self.p.len() != len {
            return arg(format!("flow fields must have {len} entries"));
        }
        Ok(())
    }

    /// Pressure shifted to zero mean.
    pub fn pressure_zero_mean(&self) -> Vec<f64> {
        zero_mean(&self.p)
    }
}

pub fn zero_mean(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len().max(1) as f64;
    v.iter().map(|x| x - m).collect()
}

/// Wall velocities for both components.
#[derive(Debug, Clone)]
pub struct FlowBoundary {
    pub u: PlaneBoundary,
    pub v: PlaneBoundary,
}

impl FlowBoundary {
    /// No-slip box whose `y = 0` wall slides with speed `lid` along x.
    pub fn lid_driven(lid: f64) -> Self {
        let still = || PlaneBoundary {
            x: BoundarySpec::dirichlet(0.0, 0.0),
            y: BoundarySpec::dirichlet(0.0, 0.0),
        };
        Self {
            u: PlaneBoundary {
                x: BoundarySpec::dirichlet(0.0, 0.0),
                y: BoundarySpec::dirichlet(lid, 0.0),
            },
            v: still(),
        }
    }
}

/// `B f` along x, with `B = (1/2dx)[alpha 1; -1 0 1; ...; -1 -alpha]` per row.
pub fn central_difference_x(f: &[f64], grid: &GridSpec, boundary: Boundary) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (s, alpha) = (0.5 / grid.dx, boundary.divergence_alpha());
    let mut out = vec![0.0; f.len()];
    for j in 0..ny {
        let row = &f[j * nx..(j + 1) * nx];
        for i in 0..nx {
            let right = if i + 1 < nx { row[i + 1] } else { 0.0 };
            let left = if i > 0 { row[i - 1] } else { 0.0 };
            let edge = if i == 0 {
                alpha * row[i]
            } else if i == nx - 1 {
                -alpha * row[i]
            } else {
                0.0
            };
            out[j * nx + i] = s * (right - left + edge);
        }
    }
    out
}

/// `B f` along y.
pub fn central_difference_y(f: &[f64], grid: &GridSpec, boundary: Boundary) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (s, alpha) = (0.5 / grid.dy, boundary.divergence_alpha());
    let mut out = vec![0.0; f.len()];
    for j in 0..ny {
        for i in 0..nx {
            let up = if j + 1 < ny { f[(j + 1) * nx + i] } else { 0.0 };
            let down = if j > 0 { f[(j - 1) * nx + i] } else { 0.0 };
            let edge = if j == 0 {
                alpha * f[j * nx + i]
            } else if j == ny - 1 {
                -alpha * f[j * nx + i]
            } else {
                0.0
            };
            out[j * nx + i] = s * (up - down + edge);
        }
    }
    out
}

/// `B_{x,D} u + B_{y,D} v`
pub fn divergence(u: &[f64], v: &[f64], grid: &GridSpec) -> Vec<f64> {
    let bx = central_difference_x(u, grid, Boundary::Dirichlet);
    let by = central_difference_y(v, grid, Boundary::Dirichlet);
    bx.iter().zip(&by).map(|(a, b)| a + b).collect()
}

/// `F^k w = u (B_{x,D} w) + v (B_{y,D} w)` pointwise.
pub fn advect(u: &[f64], v: &[f64], w: &[f64], grid: &GridSpec) -> Vec<f64> {
    let wx = central_difference_x(w, grid, Boundary::Dirichlet);
    let wy = central_difference_y(w, grid, Boundary::Dirichlet);
    (0..w.len()).map(|i| u[i] * wx[i] + v[i] * wy[i]).collect()
}

/// Shared left-hand side of both predictor solves.
pub fn predictor_operator(grid: &GridSpec) -> Result<DecomposedOperator> {
    plane_operator(grid, Boundary::Dirichlet, Boundary::Dirichlet)
}

/// `(1 - dt F^k) w^k + delta_x w_{x,D} + delta_y w_{y,D}` for `w = u, v`.
pub fn predictor_rhs(
    state: &FlowState,
    walls: &FlowBoundary,
    t_next: f64,
) -> Result<[Vec<f64>; 2]> {
    state.validate()?;
    let g = &state.grid;
    let build = |w: &[f64], bc: &PlaneBoundary| -> Vec<f64> {
        let fw = advect(&state.u, &state.v, w, g);
        let (bx, by) = bc.boundary_vectors(g, t_next);
        (0..w.len())
            .map(|i| w[i] - g.dt * fw[i] + g.delta_x * bx[i] + g.delta_y * by[i])
            .collect()
    };
    Ok([build(&state.u, &walls.u), build(&state.v, &walls.v)])
}

pub fn assemble_predictor(
    state: &FlowState,
    walls: &FlowBoundary,
    t_next: f64,
) -> Result<[(DecomposedOperator, Vec<f64>); 2]> {
    let op = predictor_operator(&state.grid)?;
    let [bu, bv] = predictor_rhs(state, walls, t_next)?;
    Ok([(op.clone(), bu), (op, bv)])
}

/// `(dt/dx^2)(A_{x,N} + I0/2) + (dt/dy^2)(A_{y,N} + I0/2)`, with `I0` the
/// projector onto basis state 0 of the whole register.
pub fn corrector_operator(grid: &GridSpec) -> Result<DecomposedOperator> {
    let (ax, ay) = decompose_laplacian_2d(grid.mx, grid.my, Boundary::Neumann, Boundary::Neumann)?;
    let (cx, cy) = (grid.dt / (grid.dx * grid.dx), grid.dt / (grid.dy * grid.dy));
    let mut op = ax.scaled(cx).add(&ay.scaled(cy))?;
    let pin = vec![Factor::I0; grid.n_qubits()];
    op.push_term(HamiltonianTerm::new(0.5 * cx, pin.clone()))?;
    op.push_term(HamiltonianTerm::new(0.5 * cy, pin))?;
    Ok(op)
}

/// `-(B_{x,D} u* + B_{y,D} v*)`
pub fn corrector_rhs(u_star: &[f64], v_star: &[f64], grid: &GridSpec) -> Vec<f64> {
    divergence(u_star, v_star, grid)
        .into_iter()
        .map(|d| -d)
        .collect()
}

pub fn assemble_corrector(
    u_star: &[f64],
    v_star: &[f64],
    grid: &GridSpec,
) -> Result<(DecomposedOperator, Vec<f64>)> {
    if u_star.len() != grid.len() || v_star.len() != grid.len() {
        return arg(format!("velocities must have {} entries", grid.len()));
    }
    Ok((
        corrector_operator(grid)?,
        corrector_rhs(u_star, v_star, grid),
    ))
}

/// `u = u* - dt B_{x,N} p`, `v = v* - dt B_{y,N} p`.
pub fn velocity_update(
    u_star: &[f64],
    v_star: &[f64],
    p: &[f64],
    grid: &GridSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if u_star.len() != grid.len() || v_star.len() != grid.len() || p.len() != grid.len() {
        return arg(format!("fields must have {} entries", grid.len()));
    }
    let px = central_difference_x(p, grid, Boundary::Neumann);
    let py = central_difference_y(p, grid, Boundary::Neumann);
    let u = u_star
        .iter()
        .zip(&px)
        .map(|(a, g)| a - grid.dt * g)
        .collect();
    let v = v_star
        .iter()
        .zip(&py)
        .map(|(a, g)| a - grid.dt * g)
        .collect();
    Ok((u, v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsStepMetrics {
    pub step: usize,
    pub u: StepMetrics,
    pub v: StepMetrics,
    pub p: StepMetrics,
    /// `|B_x u* + B_y v*|` before the pressure correction.
    pub divergence_before: f64,
    /// Same norm after the velocity update.
    pub divergence_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NsRun {
    /// `n_t + 1` states including the initial one.
    pub states: Vec<FlowState>,
    pub metrics: Vec<NsStepMetrics>,
    pub velocity_terms: usize,
    pub pressure_terms: usize,
    pub warnings: Vec<String>,
}

impl NsRun {
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("initial state")
    }

    /// Cumulative cost evaluations of the pressure solves over those of one
    /// velocity component (averaged over `u` and `v`).
    pub fn pressure_velocity_eval_ratio(&self) -> f64 {
        let sum =
            |f: &dyn Fn(&NsStepMetrics) -> usize| self.metrics.iter().map(f).sum::<usize>() as f64;
        let p = sum(&|m| m.p.n_function_evals);
        let vel = 0.5 * (sum(&|m| m.u.n_function_evals) + sum(&|m| m.v.n_function_evals));
        p / vel
    }

    /// The same ratio with every evaluation weighted by the number of
    /// expectation terms (one circuit each) it requires.
    pub fn pressure_velocity_circuit_ratio(&self) -> f64 {
        self.pressure_velocity_eval_ratio() * self.pressure_terms as f64
            / self.velocity_terms as f64
    }
}

/// Cavity-style evolution with three variational solves per step.
pub fn evolve_ns(
    initial: &FlowState,
    walls: &FlowBoundary,
    config: &SolverConfig,
) -> Result<NsRun> {
    initial.validate()?;
    let grid = initial.grid;
    let vel_op = predictor_operator(&grid)?;
    let p_op = corrector_operator(&grid)?;
    let mut run = NsRun {
        states: vec![initial.clone()],
        metrics: Vec::new(),
        velocity_terms: vel_op.term_count(),
        pressure_terms: p_op.term_count(),
        warnings: config.depth_warning(grid.n_qubits()).into_iter().collect(),
    };
    let [mut su, mut sv, mut sp] = [config.solver(0), config.solver(1), config.solver(2)];
    for k in 0..grid.n_t {
        let state = run.last().clone();
        let t_next = grid.time(k + 1);
        let [bu, bv] = predictor_rhs(&state, walls, t_next)?;
        let (ru, rv) = rayon::join(|| su.solve(&vel_op, &bu), || sv.solve(&vel_op, &bv));
        let (ru, rv) = (ru?, rv?);
        let bp = corrector_rhs(&ru.x, &rv.x, &grid);
        let rp = sp.solve(&p_op, &bp)?;
        let (u, v) = velocity_update(&ru.x, &rv.x, &rp.x, &grid)?;
        let m = NsStepMetrics {
            step: k + 1,
            u: StepMetrics::from_solve(k + 1, &ru),
            v: StepMetrics::from_solve(k + 1, &rv),
            p: StepMetrics::from_solve(k + 1, &rp),
            divergence_before: l2_norm(&bp),
            divergence_after: l2_norm(&divergence(&u, &v, &grid)),
        };
        for (name, sm) in [("u", &m.u), ("v", &m.v), ("p", &m.p)] {
            if !sm.converged {
                run.warnings
                    .push(format!("step {}: {name} solve did not converge", k + 1));
            }
        }
        run.metrics.push(m);
        run.states.push(FlowState {
            u,
            v,
            p: rp.x,
            reynolds: state.reynolds,
            grid,
        });
    }
    Ok(run)
}
