//! Classical reference solvers: dense assembly and LU solves for every
//! system the variational drivers hand to the optimizer.

use nalgebra::DVector;

use crate::error::{arg, Error, Result};
use crate::evolution::{BoundarySpec, GridSpec, PlaneBoundary, Scheme};
use crate::navier_stokes::{predictor_rhs, FlowBoundary, FlowState};
use crate::operators::{divergence_dense, laplacian_1d_dense, Boundary, DenseMatrix};
use crate::reaction::RDSystem;
use crate::state::l2_norm;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub scheme: Scheme,
    /// `n_t + 1` snapshots including the initial condition.
    pub snapshots: Vec<Vec<f64>>,
    /// Left-hand matrix of the (time-invariant) step system.
    pub matrix: DenseMatrix,
}

impl OracleRun {
    pub fn last(&self) -> &[f64] {
        self.snapshots.last().expect("initial snapshot")
    }
}

/// Dense LU with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.dim() {
        return arg(format!(
            "matrix is {}x{}, right-hand side has {} entries",
            a.dim(),
            a.dim(),
            b.len()
        ));
    }
    let lu = a.matrix().clone().lu();
    let u = lu.u();
    let diag = u.diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
        (lo.min(d.abs()), hi.max(d.abs()))
    });
    if !(lo > hi * 1e-14) {
        return Err(Error::SingularMatrix);
    }
    let x = lu
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::SingularMatrix)?;
    Ok(x.as_slice().to_vec())
}

/// `delta L` for the 1D Laplacian of the grid's boundary type.
fn scaled_laplacian(grid: &GridSpec, bc: &BoundarySpec) -> Result<DenseMatrix> {
    Ok(laplacian_1d_dense(grid.mx, bc.kind()?)?.scaled(grid.delta_x))
}

/// Explicit source `f(t_k, u^k)` added as `dt f` to every step.
pub type Source<'a> = &'a dyn Fn(f64, &[f64]) -> Vec<f64>;

/// One-parameter family `(I + th dA) u^{k+1} = (I - (1 - th) dA) u^k +
/// d (th u_D^{k+1} + (1 - th) u_D^k) + dt f^k`, with `th` = 0, 1, 1/2.
pub fn classical_evolve(
    scheme: Scheme,
    grid: &GridSpec,
    bc: &BoundarySpec,
    u0: &[f64],
    source: Option<Source<'_>>,
) -> Result<OracleRun> {
    if grid.dims() != 1 || u0.len() != grid.len() {
        return arg("expected a 1D grid matching the initial condition");
    }
    let th = match scheme {
        Scheme::Explicit => {
            if grid.delta_x > 0.5 {
                return Err(Error::Unstable(grid.delta_x));
            }
            0.0
        }
        Scheme::ImplicitEuler => 1.0,
        Scheme::CrankNicolson => 0.5,
    };
    let da = scaled_laplacian(grid, bc)?;
    let id = DenseMatrix::identity(grid.mx);
    let lhs = id.plus(&da.scaled(th))?;
    let rhs_matrix = id.plus(&da.scaled(th - 1.0))?;
    let mut snapshots = vec![u0.to_vec()];
    for k in 0..grid.n_t {
        let u = &snapshots[k];
        let (t_k, t_next) = (grid.time(k), grid.time(k + 1));
        let mut b = rhs_matrix.matvec(u);
        let (g0, g1) = (
            bc.boundary_vector(u.len(), t_k),
            bc.boundary_vector(u.len(), t_next),
        );
        for i in 0..b.len() {
            b[i] += grid.delta_x * (th * g1[i] + (1.0 - th) * g0[i]);
        }
        if let Some(f) = source {
            b.iter_mut()
                .zip(f(t_k, u))
                .for_each(|(bi, fi)| *bi += grid.dt * fi);
        }
        let next = if th == 0.0 { b } else { lu_solve(&lhs, &b)? };
        snapshots.push(next);
    }
    Ok(OracleRun {
        scheme,
        snapshots,
        matrix: lhs,
    })
}

/// Dense `I + delta_x (I (x) L_x) + delta_y (L_y (x) I)`.
pub fn plane_matrix(grid: &GridSpec, bc: &PlaneBoundary) -> Result<DenseMatrix> {
    let lx = laplacian_1d_dense(grid.mx, bc.x.kind()?)?;
    let ly = laplacian_1d_dense(grid.my, bc.y.kind()?)?;
    let ax = DenseMatrix::identity(grid.my)
        .kron(&lx)
        .scaled(grid.delta_x);
    let ay = ly
        .kron(&DenseMatrix::identity(grid.mx))
        .scaled(grid.delta_y);
    DenseMatrix::identity(grid.mx + grid.my)
        .plus(&ax)?
        .plus(&ay)
}

/// Implicit-Euler 2D heat evolution.
pub fn classical_evolve_2d(grid: &GridSpec, bc: &PlaneBoundary, u0: &[f64]) -> Result<OracleRun> {
    if grid.dims() != 2 || u0.len() != grid.len() {
        return arg("expected a 2D grid matching the initial condition");
    }
    let lhs = plane_matrix(grid, bc)?;
    let mut snapshots = vec![u0.to_vec()];
    for k in 0..grid.n_t {
        let (ux, uy) = bc.boundary_vectors(grid, grid.time(k + 1));
        let b: Vec<f64> = (0..u0.len())
            .map(|i| snapshots[k][i] + grid.delta_x * ux[i] + grid.delta_y * uy[i])
            .collect();
        snapshots.push(lu_solve(&lhs, &b)?);
    }
    Ok(OracleRun {
        scheme: Scheme::ImplicitEuler,
        snapshots,
        matrix: lhs,
    })
}

/// Dense `I + delta_i L` for component `i` of a reaction-diffusion system.
fn rd_matrix(system: &RDSystem, grid: &GridSpec, i: usize) -> Result<DenseMatrix> {
    let g = system.component_grid(grid, i);
    DenseMatrix::identity(grid.mx).plus(&scaled_laplacian(&g, &system.boundary[i])?)
}

/// One semi-implicit step from `(u1, u2)` with the reaction frozen at the
/// current state.
pub fn classical_rd_step(
    system: &RDSystem,
    grid: &GridSpec,
    u: (&[f64], &[f64]),
    t_next: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (f1, f2) = system.reaction.evaluate(u.0, u.1)?;
    let mut out = Vec::with_capacity(2);
    for (i, (ui, fi)) in [(u.0, f1), (u.1, f2)].into_iter().enumerate() {
        let g = system.component_grid(grid, i);
        let bd = system.boundary[i].boundary_vector(ui.len(), t_next);
        let b: Vec<f64> = (0..ui.len())
            .map(|j| ui[j] + g.delta_x * bd[j] + g.dt * fi[j])
            .collect();
        out.push(lu_solve(&rd_matrix(system, grid, i)?, &b)?);
    }
    let u2 = out.pop().expect("two components");
    Ok((out.pop().expect("two components"), u2))
}

/// Semi-implicit reaction-diffusion propagated classically from `u0`.
pub fn classical_rd(
    system: &RDSystem,
    grid: &GridSpec,
    u0: (&[f64], &[f64]),
) -> Result<[OracleRun; 2]> {
    system.validate()?;
    let mut s1 = vec![u0.0.to_vec()];
    let mut s2 = vec![u0.1.to_vec()];
    for k in 0..grid.n_t {
        let (a, b) = classical_rd_step(system, grid, (&s1[k], &s2[k]), grid.time(k + 1))?;
        if !a.iter().chain(&b).all(|x| x.is_finite()) {
            return Err(Error::Diverged(k + 1));
        }
        s1.push(a);
        s2.push(b);
    }
    Ok([
        OracleRun {
            scheme: Scheme::ImplicitEuler,
            snapshots: s1,
            matrix: rd_matrix(system, grid, 0)?,
        },
        OracleRun {
            scheme: Scheme::ImplicitEuler,
            snapshots: s2,
            matrix: rd_matrix(system, grid, 1)?,
        },
    ])
}

/// Dense `I + delta (I_2 (x) L) - dt (K (x) I_N)` on stacked `[u1; u2]`.
pub fn rd_implicit_matrix(
    k: [[f64; 2]; 2],
    grid: &GridSpec,
    boundary: Boundary,
) -> Result<DenseMatrix> {
    let kmat = DenseMatrix::from_rows(&[vec![k[0][0], k[0][1]], vec![k[1][0], k[1][1]]])?;
    let diffusion = DenseMatrix::identity(1)
        .kron(&laplacian_1d_dense(grid.mx, boundary)?)
        .scaled(grid.delta_x);
    let reaction = kmat.kron(&DenseMatrix::identity(grid.mx)).scaled(-grid.dt);
    DenseMatrix::identity(grid.mx + 1)
        .plus(&diffusion)?
        .plus(&reaction)
}

/// Fully implicit linear reaction-diffusion on stacked components.
pub fn classical_rd_implicit_linear(
    k: [[f64; 2]; 2],
    grid: &GridSpec,
    boundary: &[BoundarySpec; 2],
    u0: (&[f64], &[f64]),
) -> Result<OracleRun> {
    let matrix = rd_implicit_matrix(k, grid, boundary[0].kind()?)?;
    let mut snapshots = vec![[u0.0, u0.1].concat()];
    let len = grid.len();
    for step in 0..grid.n_t {
        let t_next = grid.time(step + 1);
        let mut b = snapshots[step].clone();
        for (c, bc) in boundary.iter().enumerate() {
            for (j, g) in bc.boundary_vector(len, t_next).into_iter().enumerate() {
                b[c * len + j] += grid.delta_x * g;
            }
        }
        snapshots.push(lu_solve(&matrix, &b)?);
    }
    Ok(OracleRun {
        scheme: Scheme::ImplicitEuler,
        snapshots,
        matrix,
    })
}

/// Dense `B_x` and `B_y` on the plane.
pub fn plane_divergence_matrices(
    grid: &GridSpec,
    boundary: Boundary,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let bx = DenseMatrix::identity(grid.my).kron(&divergence_dense(grid.mx, boundary, grid.dx)?);
    let by = divergence_dense(grid.my, boundary, grid.dy)?.kron(&DenseMatrix::identity(grid.mx));
    Ok((bx, by))
}

/// Dense regularized pressure matrix.
pub fn pressure_matrix(grid: &GridSpec, regularize: bool) -> Result<DenseMatrix> {
    let (cx, cy) = (grid.dt / (grid.dx * grid.dx), grid.dt / (grid.dy * grid.dy));
    let lx = DenseMatrix::identity(grid.my).kron(&laplacian_1d_dense(grid.mx, Boundary::Neumann)?);
    let ly = laplacian_1d_dense(grid.my, Boundary::Neumann)?.kron(&DenseMatrix::identity(grid.mx));
    let mut m = lx.scaled(cx).plus(&ly.scaled(cy))?.into_inner();
    if regularize {
        m[(0, 0)] += 0.5 * (cx + cy);
    }
    DenseMatrix::new(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionStep {
    pub state: FlowState,
    pub u_star: Vec<f64>,
    pub v_star: Vec<f64>,
    pub divergence_before: f64,
    pub divergence_after: f64,
    /// `|A_p p - b_p| / |b_p|` (zero for a vanishing right-hand side).
    pub pressure_residual: f64,
}

/// One projection step with dense LU solves.
pub fn classical_projection_step(
    state: &FlowState,
    walls: &FlowBoundary,
    t_next: f64,
) -> Result<ProjectionStep> {
    let g = state.grid;
    let [bu, bv] = predictor_rhs(state, walls, t_next)?;
    let predictor = plane_matrix(
        &g,
        &PlaneBoundary {
            x: BoundarySpec::dirichlet(0.0, 0.0),
            y: BoundarySpec::dirichlet(0.0, 0.0),
        },
    )?;
    let u_star = lu_solve(&predictor, &bu)?;
    let v_star = lu_solve(&predictor, &bv)?;

    let (bxd, byd) = plane_divergence_matrices(&g, Boundary::Dirichlet)?;
    let div_star: Vec<f64> = bxd
        .matvec(&u_star)
        .iter()
        .zip(byd.matvec(&v_star))
        .map(|(a, b)| a + b)
        .collect();
    let bp: Vec<f64> = div_star.iter().map(|d| -d).collect();
    let ap = pressure_matrix(&g, true)?;
    let p = lu_solve(&ap, &bp)?;
    let r: Vec<f64> = ap.matvec(&p).iter().zip(&bp).map(|(a, b)| a - b).collect();
    let bnorm = l2_norm(&bp);
    let pressure_residual = if bnorm == 0.0 {
        l2_norm(&r)
    } else {
        l2_norm(&r) / bnorm
    };

    let (bxn, byn) = plane_divergence_matrices(&g, Boundary::Neumann)?;
    let (px, py) = (bxn.matvec(&p), byn.matvec(&p));
    let u: Vec<f64> = u_star.iter().zip(&px).map(|(a, d)| a - g.dt * d).collect();
    let v: Vec<f64> = v_star.iter().zip(&py).map(|(a, d)| a - g.dt * d).collect();
    let div_after: Vec<f64> = bxd
        .matvec(&u)
        .iter()
        .zip(byd.matvec(&v))
        .map(|(a, b)| a + b)
        .collect();

    Ok(ProjectionStep {
        state: FlowState {
            u,
            v,
            p,
            reynolds: state.reynolds,
            grid: g,
        },
        u_star,
        v_star,
        divergence_before: bnorm,
        divergence_after: l2_norm(&div_after),
        pressure_residual,
    })
}

/// Classical projection run over `grid.n_t` steps.
pub fn classical_cavity(initial: &FlowState, walls: &FlowBoundary) -> Result<Vec<ProjectionStep>> {
    initial.validate()?;
    let mut steps: Vec<ProjectionStep> = Vec::with_capacity(initial.grid.n_t);
    for k in 0..initial.grid.n_t {
        let current = steps.last().map_or(initial, |s| &s.state);
        let next = classical_projection_step(current, walls, initial.grid.time(k + 1))?;
        steps.push(next);
    }
    Ok(steps)
}
