//! Implicit time-stepping of the heat equation with a variational linear
//! solve per step.
//!
//! Each step builds `A x = b` classically, hands the normalized `b` to the
//! variational solver, warm-started from the previous step's angles, and
//! rescales the result by `|b|`.

use std::fmt;
use std::sync::Arc;

use crate::error::{arg, Error, Result};
use crate::operators::{
    decompose_laplacian_1d, decompose_laplacian_2d, Boundary, DecomposedOperator,
};
use crate::state::{dot, l2_norm, qubits_for_len, StateVector};
use crate::vqls::{min_layers, SolveOptions, VectorSolve, WarmStartSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Explicit,
    ImplicitEuler,
    CrankNicolson,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Explicit => "EX",
            Scheme::ImplicitEuler => "IE",
            Scheme::CrankNicolson => "CN",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EX" | "EXPLICIT" => Ok(Scheme::Explicit),
            "IE" => Ok(Scheme::ImplicitEuler),
            "CN" => Ok(Scheme::CrankNicolson),
            _ => Err(Error::Argument(format!("unknown scheme `{s}`"))),
        }
    }
}

/// Space-time grid. `my == 0` marks a 1D problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub mx: usize,
    pub my: usize,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
    pub n_t: usize,
    pub diffusion: f64,
    pub delta_x: f64,
    pub delta_y: f64,
}

impl GridSpec {
    /// 1D grid of `2^n` interior nodes on `[0, 1]` with a prescribed `delta`.
    pub fn line(n: usize, delta: f64, dt: f64, n_t: usize) -> Result<Self> {
        let dx = 1.0 / ((1usize << n) as f64 + 1.0);
        let g = Self {
            mx: n,
            my: 0,
            dx,
            dy: 0.0,
            dt,
            n_t,
            diffusion: delta * dx * dx / dt,
            delta_x: delta,
            delta_y: 0.0,
        };
        g.validate()?;
        Ok(g)
    }

    /// 1D grid on `[0, length]` with `delta = D dt / dx^2`.
    pub fn line_physical(
        n: usize,
        length: f64,
        diffusion: f64,
        dt: f64,
        n_t: usize,
    ) -> Result<Self> {
        if !(length > 0.0) {
            return arg("domain length must be positive");
        }
        let dx = length / ((1usize << n) as f64 + 1.0);
        let g = Self {
            mx: n,
            my: 0,
            dx,
            dy: 0.0,
            dt,
            n_t,
            diffusion,
            delta_x: diffusion * dt / (dx * dx),
            delta_y: 0.0,
        };
        g.validate()?;
        Ok(g)
    }

    /// 2D unit-square grid with prescribed diffusion parameters per axis.
    pub fn plane(
        mx: usize,
        my: usize,
        delta_x: f64,
        delta_y: f64,
        dt: f64,
        n_t: usize,
    ) -> Result<Self> {
        if my == 0 {
            return arg("a plane needs at least one y qubit");
        }
        let dx = 1.0 / ((1usize << mx) as f64 + 1.0);
        let dy = 1.0 / ((1usize << my) as f64 + 1.0);
        let g = Self {
            mx,
            my,
            dx,
            dy,
            dt,
            n_t,
            diffusion: delta_x * dx * dx / dt,
            delta_x,
            delta_y,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mx == 0 {
            return arg("need at least one qubit along x");
        }
        if self.mx + self.my > 20 {
            return arg("grid too large for the statevector simulator");
        }
        if self.n_t == 0 {
            return arg("need at least one time step");
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return arg(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.delta_x >= 0.0 && self.delta_y >= 0.0) {
            return arg("diffusion parameters must be nonnegative");
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        if self.my == 0 {
            1
        } else {
            2
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.mx + self.my
    }

    pub fn len(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn nx(&self) -> usize {
        1 << self.mx
    }

    pub fn ny(&self) -> usize {
        1 << self.my
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.len() {
            return arg(format!(
                "expected {} grid values, got {}",
                self.len(),
                v.len()
            ));
        }
        Ok(())
    }
}

/// Boundary condition on one face.
#[derive(Clone)]
pub enum Face {
    Dirichlet(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Zero flux.
    Neumann,
}

impl Face {
    pub fn dirichlet(value: f64) -> Self {
        Face::Dirichlet(Arc::new(move |_| value))
    }

    pub fn dirichlet_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Face::Dirichlet(Arc::new(f))
    }

    fn value(&self, t: f64) -> f64 {
        match self {
            Face::Dirichlet(g) => g(t),
            Face::Neumann => 0.0,
        }
    }

    fn boundary(&self) -> Boundary {
        match self {
            Face::Dirichlet(_) => Boundary::Dirichlet,
            Face::Neumann => Boundary::Neumann,
        }
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Face::Dirichlet(g) => write!(f, "Dirichlet(g(0)={})", g(0.0)),
            Face::Neumann => f.write_str("Neumann"),
        }
    }
}

/// Boundary conditions at the two ends of one axis.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub left: Face,
    pub right: Face,
}

impl BoundarySpec {
    pub fn dirichlet(left: f64, right: f64) -> Self {
        Self {
            left: Face::dirichlet(left),
            right: Face::dirichlet(right),
        }
    }

    pub fn neumann() -> Self {
        Self {
            left: Face::Neumann,
            right: Face::Neumann,
        }
    }

    /// The shared boundary type; mixed faces are not representable by the
    /// operator decomposition.
    pub fn kind(&self) -> Result<Boundary> {
        let (l, r) = (self.left.boundary(), self.right.boundary());
        if l != r {
            return arg("both faces of an axis must share a boundary type");
        }
        Ok(l)
    }

    /// `(g_L, 0, ..., 0, g_R)` at time `t`.
    pub fn boundary_vector(&self, len: usize, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; len];
        if len > 0 {
            v[0] += self.left.value(t);
            v[len - 1] += self.right.value(t);
        }
        v
    }
}

/// Boundary conditions of a 2D problem, one spec per axis.
#[derive(Debug, Clone)]
pub struct PlaneBoundary {
    pub x: BoundarySpec,
    pub y: BoundarySpec,
}

impl PlaneBoundary {
    /// `(u_{x,D}, u_{y,D})` on the row-major grid (x fastest).
    pub fn boundary_vectors(&self, grid: &GridSpec, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (nx, ny) = (grid.nx(), grid.ny());
        let mut ux = vec![0.0; nx * ny];
        let mut uy = vec![0.0; nx * ny];
        let (xl, xr) = (self.x.left.value(t), self.x.right.value(t));
        let (yl, yr) = (self.y.left.value(t), self.y.right.value(t));
        for j in 0..ny {
            ux[j * nx] += xl;
            ux[j * nx + nx - 1] += xr;
        }
        for i in 0..nx {
            uy[i] += yl;
            uy[(ny - 1) * nx + i] += yr;
        }
        (ux, uy)
    }
}

/// Variational solver settings shared by all drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub layers: usize,
    pub options: SolveOptions,
    pub seed: u64,
    pub warm_start: bool,
    pub restarts: usize,
}

impl SolverConfig {
    pub fn new(layers: usize, seed: u64) -> Self {
        Self {
            layers,
            options: SolveOptions::default(),
            seed,
            warm_start: true,
            restarts: 1,
        }
    }

    /// Independent solver for the `slot`-th system of a run; slots get
    /// decorrelated seeds so concurrent solves stay reproducible.
    pub fn solver(&self, slot: u64) -> WarmStartSolver {
        let seed = self
            .seed
            .wrapping_add(slot.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        WarmStartSolver::new(self.layers, self.options, seed)
            .with_warm_start(self.warm_start)
            .with_restarts(self.restarts)
    }

    pub(crate) fn depth_warning(&self, n_qubits: usize) -> Option<String> {
        let l_min = min_layers(n_qubits);
        (self.layers < l_min).then(|| {
            format!("ansatz depth {} is below 2^n/n = {} for n = {}; solves may not reach the tolerance", self.layers, l_min, n_qubits)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepMetrics {
    pub step: usize,
    /// `None` when the right-hand side vanished and no optimization ran.
    pub cost: Option<f64>,
    pub n_function_evals: usize,
    pub n_gradient_evals: usize,
    pub n_iterations: usize,
    pub converged: bool,
    pub trace_error: Option<f64>,
}

impl StepMetrics {
    pub(crate) fn from_solve(step: usize, solve: &VectorSolve) -> Self {
        match &solve.result {
            Some(r) => Self {
                step,
                cost: Some(r.cost),
                n_function_evals: r.n_function_evals,
                n_gradient_evals: r.n_gradient_evals,
                n_iterations: r.n_iterations,
                converged: r.converged,
                trace_error: None,
            },
            None => Self {
                step,
                cost: None,
                n_function_evals: 0,
                n_gradient_evals: 0,
                n_iterations: 0,
                converged: true,
                trace_error: None,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub scheme: Scheme,
    pub times: Vec<f64>,
    /// `n_t + 1` snapshots, the first being the initial condition.
    pub snapshots: Vec<Vec<f64>>,
    /// One entry per step, `step` running from 1 to `n_t`.
    pub metrics: Vec<StepMetrics>,
    pub warnings: Vec<String>,
}

impl TimeSeries {
    pub(crate) fn new(scheme: Scheme, u0: Vec<f64>) -> Self {
        Self {
            scheme,
            times: vec![0.0],
            snapshots: vec![u0],
            metrics: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, time: f64, u: Vec<f64>, metrics: StepMetrics) {
        if !metrics.converged {
            self.warnings.push(format!(
                "step {}: solve did not converge within the evaluation budget",
                metrics.step
            ));
        }
        self.times.push(time);
        self.snapshots.push(u);
        self.metrics.push(metrics);
    }

    pub fn n_steps(&self) -> usize {
        self.metrics.len()
    }

    pub fn last(&self) -> &[f64] {
        self.snapshots.last().expect("initial snapshot")
    }

    /// Fills the per-step trace error against reference snapshots of the
    /// same length (reference[0] pairs with the initial condition).
    pub fn attach_reference(&mut self, reference: &[Vec<f64>]) -> Result<()> {
        if reference.len() != self.snapshots.len() {
            return arg(format!(
                "reference has {} snapshots, run has {}",
                reference.len(),
                self.snapshots.len()
            ));
        }
        for (m, (u, r)) in self
            .metrics
            .iter_mut()
            .zip(self.snapshots.iter().zip(reference).skip(1))
        {
            m.trace_error = trace_error_vectors(u, r)?;
        }
        Ok(())
    }

    /// Mean trace error over steps that have one.
    pub fn mean_trace_error(&self) -> Option<f64> {
        mean(self.metrics.iter().filter_map(|m| m.trace_error))
    }

    pub fn mean_function_evals(&self) -> f64 {
        mean(self.metrics.iter().map(|m| m.n_function_evals as f64)).unwrap_or(0.0)
    }

    pub fn mean_iterations(&self) -> f64 {
        mean(self.metrics.iter().map(|m| m.n_iterations as f64)).unwrap_or(0.0)
    }

    pub fn nonconverged_steps(&self) -> usize {
        self.metrics.iter().filter(|m| !m.converged).count()
    }
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// `sqrt(1 - |<psi|u_hat>|^2)` for a normalized state and a nonzero reference.
pub fn trace_error(psi: &StateVector, u_ref: &[f64]) -> Result<f64> {
    if psi.dim() != u_ref.len() {
        return arg(format!(
            "state has {} amplitudes, reference {}",
            psi.dim(),
            u_ref.len()
        ));
    }
    let norm = l2_norm(u_ref);
    if norm == 0.0 {
        return Err(Error::Degenerate(
            "trace error against a zero reference".into(),
        ));
    }
    if psi.max_imag() == 0.0 {
        return Ok(unit_trace_error(&psi.real_parts(), 1.0, u_ref, norm));
    }
    let c: num_complex::Complex64 = psi
        .amplitudes()
        .iter()
        .zip(u_ref)
        .map(|(a, r)| a.conj() * (r / norm))
        .sum();
    Ok((1.0 - c.norm_sqr().min(1.0)).sqrt())
}

/// Trace error between two unnormalized real vectors. Two zero vectors agree
/// exactly; a zero paired with a nonzero vector has no defined error.
pub fn trace_error_vectors(u: &[f64], reference: &[f64]) -> Result<Option<f64>> {
    if u.len() != reference.len() {
        return arg(format!(
            "lengths differ: {} vs {}",
            u.len(),
            reference.len()
        ));
    }
    let (nu, nr) = (l2_norm(u), l2_norm(reference));
    Ok(match (nu == 0.0, nr == 0.0) {
        (true, true) => Some(0.0),
        (false, false) => Some(unit_trace_error(u, nu, reference, nr)),
        _ => None,
    })
}

/// Uses `1 - c = |a - s b|^2 / 2` (s the overlap sign) to keep precision
/// when the vectors nearly coincide.
fn unit_trace_error(a: &[f64], na: f64, b: &[f64], nb: f64) -> f64 {
    let s = if dot(a, b) < 0.0 { -1.0 } else { 1.0 };
    let d2: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x / na - s * y / nb).powi(2))
        .sum();
    let one_minus_c = (0.5 * d2).min(1.0);
    (one_minus_c * (2.0 - one_minus_c)).sqrt()
}

/// `sin(pi x / L) exp(-D t (pi / L)^2)`
pub fn exact_heat(x: f64, t: f64, diffusion: f64, length: f64) -> f64 {
    let k = std::f64::consts::PI / length;
    (k * x).sin() * (-diffusion * t * k * k).exp()
}

/// Interior node positions `x_i = (i + 1) dx` of a 1D grid.
pub fn grid_positions(grid: &GridSpec) -> Vec<f64> {
    (0..grid.nx()).map(|i| (i as f64 + 1.0) * grid.dx).collect()
}

/// `I + delta A` with `A` the 1D Laplacian of the given boundary type.
pub(crate) fn ie_operator(n: usize, delta: f64, boundary: Boundary) -> Result<DecomposedOperator> {
    Ok(decompose_laplacian_1d(n, boundary)?
        .scaled(delta)
        .plus_identity(1.0))
}

fn add_scaled(out: &mut [f64], scale: f64, v: &[f64]) {
    out.iter_mut().zip(v).for_each(|(o, x)| *o += scale * x);
}

fn check_1d(grid: &GridSpec, u: &[f64]) -> Result<()> {
    if grid.dims() != 1 {
        return arg("expected a 1D grid");
    }
    grid.check_len(u)
}

/// Implicit-Euler system `(I + delta A) u^{k+1} = u^k + delta u_D(t_{k+1}) [+ dt f]`.
pub fn assemble_ie(
    grid: &GridSpec,
    bc: &BoundarySpec,
    u_k: &[f64],
    t_next: f64,
    source: Option<&[f64]>,
) -> Result<(DecomposedOperator, Vec<f64>)> {
    check_1d(grid, u_k)?;
    let op = ie_operator(grid.mx, grid.delta_x, bc.kind()?)?;
    Ok((op, ie_rhs(grid, bc, u_k, t_next, source)?))
}

pub(crate) fn ie_rhs(
    grid: &GridSpec,
    bc: &BoundarySpec,
    u_k: &[f64],
    t_next: f64,
    source: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let mut b = u_k.to_vec();
    add_scaled(&mut b, grid.delta_x, &bc.boundary_vector(u_k.len(), t_next));
    if let Some(f) = source {
        if f.len() != b.len() {
            return arg(format!("source has {} entries, grid {}", f.len(), b.len()));
        }
        add_scaled(&mut b, grid.dt, f);
    }
    Ok(b)
}

/// Crank-Nicolson system `(2I + delta A) u^{k+1} = b^k`.
///
/// The first step (`step == 0`) assembles `b^0 = (2I - delta A) u^0 +
/// delta (u_D^1 + u_D^0)` directly; later steps use the recurrence
/// `b^k = 4 u^k - b^{k-1} + delta (u_D^{k+1} + u_D^k)`, which avoids
/// applying `A` to the current state.
pub fn assemble_cn(
    grid: &GridSpec,
    bc: &BoundarySpec,
    u_k: &[f64],
    b_prev: Option<&[f64]>,
    step: usize,
    t_k: f64,
    t_next: f64,
) -> Result<(DecomposedOperator, Vec<f64>)> {
    check_1d(grid, u_k)?;
    let op = decompose_laplacian_1d(grid.mx, bc.kind()?)?
        .scaled(grid.delta_x)
        .plus_identity(2.0);
    let mut b: Vec<f64> = if step == 0 {
        let a_u = op.apply(u_k)?;
        u_k.iter().zip(&a_u).map(|(u, au)| 4.0 * u - au).collect()
    } else {
        let prev = b_prev.ok_or_else(|| {
            Error::State(format!(
                "Crank-Nicolson step {step} needs the previous right-hand side"
            ))
        })?;
        grid.check_len(prev)?;
        u_k.iter().zip(prev).map(|(u, p)| 4.0 * u - p).collect()
    };
    add_scaled(&mut b, grid.delta_x, &bc.boundary_vector(u_k.len(), t_next));
    add_scaled(&mut b, grid.delta_x, &bc.boundary_vector(u_k.len(), t_k));
    Ok((op, b))
}

/// Time-steps the 1D heat equation with a variational solve per step.
pub fn evolve(
    grid: &GridSpec,
    bc: &BoundarySpec,
    u0: &[f64],
    scheme: Scheme,
    config: &SolverConfig,
) -> Result<TimeSeries> {
    check_1d(grid, u0)?;
    qubits_for_len(u0.len())?;
    let mut series = TimeSeries::new(scheme, u0.to_vec());
    series.warnings.extend(config.depth_warning(grid.mx));
    let mut solver = config.solver(0);
    let mut b_prev: Option<Vec<f64>> = None;
    for k in 0..grid.n_t {
        let u_k = series.last().to_vec();
        let (t_k, t_next) = (grid.time(k), grid.time(k + 1));
        let (op, b) = match scheme {
            Scheme::ImplicitEuler => assemble_ie(grid, bc, &u_k, t_next, None)?,
            Scheme::CrankNicolson => {
                assemble_cn(grid, bc, &u_k, b_prev.as_deref(), k, t_k, t_next)?
            }
            Scheme::Explicit => {
                return arg("explicit stepping needs no linear solve; use the classical oracle")
            }
        };
        let solve = solver.solve(&op, &b)?;
        let metrics = StepMetrics::from_solve(k + 1, &solve);
        series.push(t_next, solve.x, metrics);
        b_prev = Some(b);
    }
    Ok(series)
}

/// `I + delta_x A_x + delta_y A_y` on the plane's register.
pub(crate) fn plane_operator(
    grid: &GridSpec,
    bx: Boundary,
    by: Boundary,
) -> Result<DecomposedOperator> {
    let (ax, ay) = decompose_laplacian_2d(grid.mx, grid.my, bx, by)?;
    ax.scaled(grid.delta_x)
        .add(&ay.scaled(grid.delta_y))
        .map(|op| op.plus_identity(1.0))
}

/// Implicit-Euler evolution of the 2D heat equation on a row-major grid
/// (x index fastest).
pub fn evolve_2d(
    grid: &GridSpec,
    bc: &PlaneBoundary,
    u0: &[f64],
    config: &SolverConfig,
) -> Result<TimeSeries> {
    if grid.dims() != 2 {
        return arg("expected a 2D grid");
    }
    grid.check_len(u0)?;
    let op = plane_operator(grid, bc.x.kind()?, bc.y.kind()?)?;
    let mut series = TimeSeries::new(Scheme::ImplicitEuler, u0.to_vec());
    series
        .warnings
        .extend(config.depth_warning(grid.n_qubits()));
    let mut solver = config.solver(0);
    for k in 0..grid.n_t {
        let t_next = grid.time(k + 1);
        let b = plane_rhs(grid, bc, series.last(), t_next);
        let solve = solver.solve(&op, &b)?;
        let metrics = StepMetrics::from_solve(k + 1, &solve);
        series.push(t_next, solve.x, metrics);
    }
    Ok(series)
}

pub(crate) fn plane_rhs(grid: &GridSpec, bc: &PlaneBoundary, u_k: &[f64], t_next: f64) -> Vec<f64> {
    let (ux, uy) = bc.boundary_vectors(grid, t_next);
    let mut b = u_k.to_vec();
    add_scaled(&mut b, grid.delta_x, &ux);
    add_scaled(&mut b, grid.delta_y, &uy);
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::laplacian_1d_dense;

    fn fig1_grid(n: usize) -> GridSpec {
        GridSpec::line(n, 1.0, 0.05, 20).unwrap()
    }

    #[test]
    fn grid_constructors() {
        let g = GridSpec::line_physical(3, 1.0, 0.5, 0.01, 10).unwrap();
        assert!((g.dx - 1.0 / 9.0).abs() < 1e-15);
        assert!((g.delta_x - 0.5 * 0.01 * 81.0).abs() < 1e-12);
        assert!(GridSpec::line(3, 1.0, 0.0, 10).is_err());
        assert!(GridSpec::line(3, 1.0, 0.1, 0).is_err());
        assert_eq!(GridSpec::plane(2, 3, 1.0, 1.0, 0.1, 1).unwrap().len(), 32);
    }

    #[test]
    fn boundary_vectors() {
        let bc = BoundarySpec::dirichlet(1.0, 2.0);
        assert_eq!(bc.boundary_vector(4, 0.0), vec![1.0, 0.0, 0.0, 2.0]);
        assert_eq!(
            BoundarySpec::neumann().boundary_vector(4, 0.0),
            vec![0.0; 4]
        );
        let timed = BoundarySpec {
            left: Face::dirichlet_fn(|t| t * t),
            right: Face::dirichlet(0.0),
        };
        assert_eq!(timed.boundary_vector(2, 3.0), vec![9.0, 0.0]);
        let mixed = BoundarySpec {
            left: Face::Neumann,
            right: Face::dirichlet(0.0),
        };
        assert!(mixed.kind().is_err());

        let grid = GridSpec::plane(1, 1, 1.0, 1.0, 0.1, 1).unwrap();
        let pb = PlaneBoundary {
            x: BoundarySpec::dirichlet(1.0, 2.0),
            y: BoundarySpec::dirichlet(3.0, 0.0),
        };
        let (ux, uy) = pb.boundary_vectors(&grid, 0.0);
        assert_eq!(ux, vec![1.0, 2.0, 1.0, 2.0]);
        assert_eq!(uy, vec![3.0, 3.0, 0.0, 0.0]);
    }

    #[test]
    fn ie_assembly_examples() {
        let grid = fig1_grid(3);
        let bc = BoundarySpec::dirichlet(1.0, 0.0);
        let (op, b) = assemble_ie(&grid, &bc, &[0.0; 8], grid.time(1), None).unwrap();
        assert_eq!(b, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let expected = laplacian_1d_dense(3, Boundary::Dirichlet)
            .unwrap()
            .plus(&crate::operators::DenseMatrix::identity(3))
            .unwrap();
        assert!(op.to_dense().max_abs_diff(&expected) < 1e-14);

        let grid = GridSpec::line(2, 0.5, 0.1, 1).unwrap();
        let bc = BoundarySpec::dirichlet(2.0, -1.0);
        let (op, b) = assemble_ie(&grid, &bc, &[1.0; 4], 0.1, Some(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        // Hand assembly: u + 0.5 (2, 0, 0, -1) + 0.1 f.
        let want = [2.1, 1.2, 1.3, 0.9];
        for (x, y) in b.iter().zip(want) {
            assert!((x - y).abs() < 1e-14);
        }
        let zero = GridSpec::line(2, 0.0, 0.1, 1).unwrap();
        let (op0, _) = assemble_ie(&zero, &bc, &[1.0; 4], 0.1, None).unwrap();
        assert!(
            op0.to_dense()
                .max_abs_diff(&crate::operators::DenseMatrix::identity(2))
                < 1e-15
        );
        assert_eq!(op.dim(), 4);
    }

    #[test]
    fn cn_recurrence_matches_direct_assembly() {
        // Direct assembly (2I - delta A) u^k + delta (u_D^{k+1} + u_D^k) with
        // an exactly propagated u^k.
        let grid = GridSpec::line(3, 1.0, 0.05, 6).unwrap();
        let bc = BoundarySpec {
            left: Face::dirichlet_fn(|t| 1.0 + t),
            right: Face::dirichlet(0.5),
        };
        let a = laplacian_1d_dense(3, Boundary::Dirichlet).unwrap();
        let mut u: Vec<f64> = (0..8)
            .map(|i| ((i as f64 + 1.0) / 9.0 * std::f64::consts::PI).sin())
            .collect();
        let mut b_prev: Option<Vec<f64>> = None;
        for k in 0..grid.n_t {
            let (op, b) = assemble_cn(
                &grid,
                &bc,
                &u,
                b_prev.as_deref(),
                k,
                grid.time(k),
                grid.time(k + 1),
            )
            .unwrap();
            let au = a.matvec(&u);
            let (g0, g1) = (
                bc.boundary_vector(8, grid.time(k)),
                bc.boundary_vector(8, grid.time(k + 1)),
            );
            for i in 0..8 {
                let direct = 2.0 * u[i] - au[i] + g0[i] + g1[i];
                assert!((b[i] - direct).abs() < 1e-12, "step {k} entry {i}");
            }
            u = crate::oracle::lu_solve(&op.to_dense(), &b).unwrap();
            b_prev = Some(b);
        }
        assert!(matches!(
            assemble_cn(&grid, &bc, &u, None, 3, 0.0, 0.1),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn cn_without_diffusion_is_stationary() {
        let grid = GridSpec::line(2, 0.0, 0.1, 3).unwrap();
        let bc = BoundarySpec::dirichlet(0.0, 0.0);
        let u0 = [0.3, -0.2, 0.9, 0.1];
        let (_, b0) = assemble_cn(&grid, &bc, &u0, None, 0, 0.0, 0.1).unwrap();
        assert_eq!(b0, u0.iter().map(|u| 2.0 * u).collect::<Vec<_>>());
        let (_, b1) = assemble_cn(&grid, &bc, &u0, Some(&b0), 1, 0.1, 0.2).unwrap();
        assert_eq!(b1, b0);
    }

    #[test]
    fn trace_error_examples() {
        let psi = StateVector::from_real(&[0.6, 0.8]).unwrap();
        assert!(trace_error(&psi, &[3.0, 4.0]).unwrap().abs() < 1e-15);
        assert!((trace_error(&psi, &[-4.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_error(&psi, &[1.0, 0.0]).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(
            trace_error(&psi, &[0.0, 0.0]),
            Err(Error::Degenerate(_))
        ));
        assert_eq!(
            trace_error_vectors(&[0.0; 2], &[0.0; 2]).unwrap(),
            Some(0.0)
        );
        assert_eq!(trace_error_vectors(&[1.0, 0.0], &[0.0; 2]).unwrap(), None);
    }

    #[test]
    fn exact_heat_examples() {
        let pi = std::f64::consts::PI;
        assert!((exact_heat(0.3, 0.0, 1.0, 1.0) - (0.3 * pi).sin()).abs() < 1e-15);
        assert!((exact_heat(0.5, 1.0, 1.0 / (pi * pi), 1.0) - (-1f64).exp()).abs() < 1e-12);
        assert!(exact_heat(0.0, 0.7, 1.0, 1.0).abs() < 1e-15);
        assert!(exact_heat(2.0, 0.7, 1.0, 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_diffusion_keeps_state() {
        let grid = GridSpec::line(2, 0.0, 0.1, 2).unwrap();
        let u0 = [0.5, 0.25, -0.5, 1.0];
        for scheme in [Scheme::ImplicitEuler, Scheme::CrankNicolson] {
            let ts = evolve(
                &grid,
                &BoundarySpec::dirichlet(0.0, 0.0),
                &u0,
                scheme,
                &SolverConfig::new(3, 1),
            )
            .unwrap();
            assert_eq!(ts.snapshots.len(), 3);
            for s in &ts.snapshots[1..] {
                assert!(
                    trace_error_vectors(s, &u0).unwrap().unwrap() < 1e-4,
                    "{s:?}"
                );
                assert!((l2_norm(s) - l2_norm(&u0)).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn explicit_scheme_is_rejected() {
        let grid = GridSpec::line(2, 0.1, 0.1, 1).unwrap();
        assert!(evolve(
            &grid,
            &BoundarySpec::neumann(),
            &[1.0; 4],
            Scheme::Explicit,
            &SolverConfig::new(2, 0)
        )
        .is_err());
    }

    #[test]
    fn shallow_ansatz_warns() {
        let grid = GridSpec::line(3, 1.0, 0.05, 1).unwrap();
        let ts = evolve(
            &grid,
            &BoundarySpec::dirichlet(1.0, 0.0),
            &[0.0; 8],
            Scheme::ImplicitEuler,
            &SolverConfig::new(1, 0),
        )
        .unwrap();
        assert!(ts.warnings.iter().any(|w| w.contains("below")));
    }
}
