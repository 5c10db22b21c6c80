//! Two-component reaction-diffusion systems.
//!
//! Diffusion is implicit and reactions explicit: each step solves
//! `(I + delta_i A) u_i^{k+1} = u_i^k + delta_i u_{D,i} + dt f_i(u^k)` for both
//! components against the same frozen `u^k`. A linear symmetric reaction
//! can instead be folded into one fully implicit system on `n + 1` qubits.

use std::f64::consts::PI;

use crate::error::{arg, Error, Result};
use crate::evolution::{
    ie_operator, ie_rhs, BoundarySpec, GridSpec, Scheme, SolverConfig, StepMetrics, TimeSeries,
};
use crate::operators::{reaction_implicit_operator, Boundary};
use crate::state::l2_norm;

/// `[k1 (1 - u1) - u1 u2^2, -(k1 + k2) u2 + u1 u2^2]`
pub fn gray_scott_source(u1: &[f64], u2: &[f64], k1: f64, k2: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    pointwise(u1, u2, |a, b| {
        let r = a * b * b;
        (k1 * (1.0 - a) - r, -(k1 + k2) * b + r)
    })
}

/// `[-(k1 + 1) u1 + u1^2 u2 + k2, k1 u1 - u1^2 u2]`
pub fn brusselator_source(
    u1: &[f64],
    u2: &[f64],
    k1: f64,
    k2: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    pointwise(u1, u2, |a, b| {
        let r = a * a * b;
        (-(k1 + 1.0) * a + r + k2, k1 * a - r)
    })
}

fn pointwise(
    u1: &[f64],
    u2: &[f64],
    f: impl Fn(f64, f64) -> (f64, f64),
) -> Result<(Vec<f64>, Vec<f64>)> {
    if u1.len() != u2.len() {
        return arg(format!(
            "component lengths differ: {} vs {}",
            u1.len(),
            u2.len()
        ));
    }
    Ok(u1.iter().zip(u2).map(|(&a, &b)| f(a, b)).unzip())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reaction {
    None,
    GrayScott { k1: f64, k2: f64 },
    Brusselator { k1: f64, k2: f64 },
}

impl Reaction {
    pub fn evaluate(&self, u1: &[f64], u2: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        match *self {
            Reaction::None => pointwise(u1, u2, |_, _| (0.0, 0.0)),
            Reaction::GrayScott { k1, k2 } => gray_scott_source(u1, u2, k1, k2),
            Reaction::Brusselator { k1, k2 } => brusselator_source(u1, u2, k1, k2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RDSystem {
    pub diffusion: [f64; 2],
    pub reaction: Reaction,
    pub boundary: [BoundarySpec; 2],
}

impl RDSystem {
    /// Dirichlet data `u1 = 1`, `u2 = 0` at both ends.
    pub fn gray_scott(diffusion: [f64; 2], k1: f64, k2: f64) -> Self {
        Self {
            diffusion,
            reaction: Reaction::GrayScott { k1, k2 },
            boundary: [
                BoundarySpec::dirichlet(1.0, 1.0),
                BoundarySpec::dirichlet(0.0, 0.0),
            ],
        }
    }

    /// Zero flux for both components.
    pub fn brusselator(diffusion: [f64; 2], k1: f64, k2: f64) -> Self {
        Self {
            diffusion,
            reaction: Reaction::Brusselator { k1, k2 },
            boundary: [BoundarySpec::neumann(), BoundarySpec::neumann()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.diffusion.iter().any(|d| !(*d >= 0.0)) {
            return arg("diffusion coefficients must be nonnegative");
        }
        for b in &self.boundary {
            b.kind()?;
        }
        Ok(())
    }

    /// Grid of component `i`, with `delta = 4^n dt D_i` (spacing `2^-n`).
    pub fn component_grid(&self, grid: &GridSpec, i: usize) -> GridSpec {
        GridSpec {
            delta_x: rd_delta(grid.mx, grid.dt, self.diffusion[i]),
            ..*grid
        }
    }
}

pub fn rd_delta(n: usize, dt: f64, diffusion: f64) -> f64 {
    (1u64 << (2 * n)) as f64 * dt * diffusion
}

/// Node positions on `(0, 1)`: `(i + 1)/(N + 1)` for Dirichlet grids,
/// cell centres `(i + 1/2)/N` for zero-flux grids.
pub fn rd_positions(n: usize, boundary: Boundary) -> Vec<f64> {
    let len = 1usize << n;
    (0..len)
        .map(|i| match boundary {
            Boundary::Dirichlet => (i as f64 + 1.0) / (len as f64 + 1.0),
            Boundary::Neumann => (i as f64 + 0.5) / len as f64,
        })
        .collect()
}

/// `u1 = 1 - sin^100(pi x)/2`, `u2 = sin^100(pi x)/4`.
pub fn gray_scott_mid_pulse(n: usize) -> (Vec<f64>, Vec<f64>) {
    rd_positions(n, Boundary::Dirichlet)
        .into_iter()
        .map(|x| {
            let s = (PI * x).sin().abs().powi(100);
            (1.0 - 0.5 * s, 0.25 * s)
        })
        .unzip()
}

/// `u1 = 1/2`, `u2 = 1 + 5x`.
pub fn brusselator_initial(n: usize) -> (Vec<f64>, Vec<f64>) {
    rd_positions(n, Boundary::Neumann)
        .into_iter()
        .map(|x| (0.5, 1.0 + 5.0 * x))
        .unzip()
}

fn check_pair(grid: &GridSpec, u0: (&[f64], &[f64])) -> Result<()> {
    if grid.dims() != 1 {
        return arg("reaction-diffusion runs on 1D grids");
    }
    if u0.0.len() != grid.len() || u0.1.len() != grid.len() {
        return arg(format!(
            "initial components must have {} entries",
            grid.len()
        ));
    }
    Ok(())
}

/// Semi-implicit evolution; the two component solves of each step run
/// concurrently with independent warm starts.
pub fn evolve_rd(
    system: &RDSystem,
    grid: &GridSpec,
    u0: (&[f64], &[f64]),
    config: &SolverConfig,
) -> Result<[TimeSeries; 2]> {
    system.validate()?;
    check_pair(grid, u0)?;
    let grids = [
        system.component_grid(grid, 0),
        system.component_grid(grid, 1),
    ];
    let ops = [
        ie_operator(grid.mx, grids[0].delta_x, system.boundary[0].kind()?)?,
        ie_operator(grid.mx, grids[1].delta_x, system.boundary[1].kind()?)?,
    ];
    let mut series = [
        TimeSeries::new(Scheme::ImplicitEuler, u0.0.to_vec()),
        TimeSeries::new(Scheme::ImplicitEuler, u0.1.to_vec()),
    ];
    if let Some(w) = config.depth_warning(grid.mx) {
        series[0].warnings.push(w);
    }
    let mut solvers = [config.solver(0), config.solver(1)];
    for k in 0..grid.n_t {
        let t_next = grid.time(k + 1);
        let (u1, u2) = (series[0].last().to_vec(), series[1].last().to_vec());
        let (f1, f2) = system.reaction.evaluate(&u1, &u2)?;
        let b1 = ie_rhs(&grids[0], &system.boundary[0], &u1, t_next, Some(&f1))?;
        let b2 = ie_rhs(&grids[1], &system.boundary[1], &u2, t_next, Some(&f2))?;
        if !(l2_norm(&b1).is_finite() && l2_norm(&b2).is_finite()) {
            return Err(Error::Diverged(k + 1));
        }
        let [s1, s2] = &mut solvers;
        let (r1, r2) = rayon::join(|| s1.solve(&ops[0], &b1), || s2.solve(&ops[1], &b2));
        for (ts, solve) in series.iter_mut().zip([r1?, r2?]) {
            let m = StepMetrics::from_solve(k + 1, &solve);
            ts.push(t_next, solve.x, m);
        }
    }
    Ok(series)
}

/// Fully implicit evolution with a linear symmetric reaction `f = K u`.
/// Both components share `grid.delta_x`; the returned snapshots stack
/// `[u1; u2]`.
pub fn evolve_rd_implicit_linear(
    k: [[f64; 2]; 2],
    grid: &GridSpec,
    boundary: &[BoundarySpec; 2],
    u0: (&[f64], &[f64]),
    config: &SolverConfig,
) -> Result<TimeSeries> {
    check_pair(grid, u0)?;
    let kind = boundary[0].kind()?;
    if boundary[1].kind()? != kind {
        return arg("both components must share a boundary type");
    }
    let op = reaction_implicit_operator(grid.mx, k, grid.dt, grid.delta_x, kind)?;
    let mut stacked = u0.0.to_vec();
    stacked.extend_from_slice(u0.1);
    let mut series = TimeSeries::new(Scheme::ImplicitEuler, stacked);
    series.warnings.extend(config.depth_warning(grid.mx + 1));
    let mut solver = config.solver(0);
    let len = grid.len();
    for step in 0..grid.n_t {
        let t_next = grid.time(step + 1);
        let b = stacked_rhs(grid, boundary, series.last(), t_next);
        let solve = solver.solve(&op, &b)?;
        let m = StepMetrics::from_solve(step + 1, &solve);
        series.push(t_next, solve.x, m);
    }
    debug_assert_eq!(series.last().len(), 2 * len);
    Ok(series)
}

pub(crate) fn stacked_rhs(
    grid: &GridSpec,
    boundary: &[BoundarySpec; 2],
    u: &[f64],
    t_next: f64,
) -> Vec<f64> {
    let len = grid.len();
    let mut b = u.to_vec();
    for (c, bc) in boundary.iter().enumerate() {
        for (bi, g) in b[c * len..(c + 1) * len]
            .iter_mut()
            .zip(bc.boundary_vector(len, t_next))
        {
            *bi += grid.delta_x * g;
        }
    }
    b
}

/// Number of strict local maxima above `floor`, scanning interior points.
pub fn count_local_maxima(v: &[f64], floor: f64) -> usize {
    v.windows(3)
        .filter(|w| w[1] > w[0] && w[1] >= w[2] && w[1] > floor)
        .count()
}

/// Sign changes of `series - mean(series)`.
pub fn mean_crossings(series: &[f64]) -> usize {
    if series.is_empty() {
        return 0;
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let signs: Vec<bool> = series
        .iter()
        .filter(|v| **v != mean)
        .map(|v| *v > mean)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::trace_error_vectors;

    #[test]
    fn gray_scott_examples() {
        let (f1, f2) = gray_scott_source(&[1.0], &[0.0], 0.04, 0.02).unwrap();
        assert_eq!((f1[0], f2[0]), (0.0, 0.0));
        let (f1, f2) = gray_scott_source(&[1.0], &[0.25], 0.04, 0.02).unwrap();
        assert!((f1[0] + 0.0625).abs() < 1e-15 && (f2[0] - 0.0475).abs() < 1e-15);
        let (_, f2) = gray_scott_source(&[0.3, 0.7, 1.2], &[0.0; 3], 0.04, 0.02).unwrap();
        assert!(f2.iter().all(|v| *v == 0.0));
        assert!(gray_scott_source(&[1.0], &[1.0, 2.0], 0.1, 0.1).is_err());
    }

    #[test]
    fn brusselator_examples() {
        let (f1, f2) = brusselator_source(&[1.0], &[3.0], 3.0, 1.0).unwrap();
        assert!(f1[0].abs() < 1e-15 && f2[0].abs() < 1e-15);
        let (f1, f2) = brusselator_source(&[0.0], &[7.0], 3.0, 1.0).unwrap();
        assert_eq!((f1[0], f2[0]), (1.0, 0.0));
        let (f1, f2) = brusselator_source(&[0.5], &[1.0 + 5.0 * 0.2], 3.0, 1.0).unwrap();
        assert!((f1[0] + 0.5).abs() < 1e-15 && (f2[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn initial_conditions() {
        let (u1, u2) = gray_scott_mid_pulse(6);
        assert_eq!(u1.len(), 64);
        assert!(u2.iter().all(|v| *v >= 0.0));
        let peak = u2.iter().cloned().fold(0.0, f64::max);
        assert!(peak > 0.24 && peak <= 0.25);
        assert!(u2[0] < 1e-30);
        let (b1, b2) = brusselator_initial(4);
        assert!(b1.iter().all(|v| *v == 0.5));
        assert!((b2[0] - (1.0 + 5.0 / 32.0)).abs() < 1e-15);
        assert_eq!(rd_delta(6, 0.5, 1e-4), 4096.0 * 0.5 * 1e-4);
    }

    #[test]
    fn shape_statistics() {
        assert_eq!(count_local_maxima(&[0.0, 1.0, 0.0, 2.0, 0.0], 0.5), 2);
        assert_eq!(count_local_maxima(&[0.0, 0.1, 0.0], 0.5), 0);
        assert_eq!(mean_crossings(&[1.0, -1.0, 1.0, -1.0]), 3);
        assert_eq!(mean_crossings(&[2.0; 5]), 0);
    }

    #[test]
    fn frozen_second_component_without_reaction() {
        let system = RDSystem {
            diffusion: [1e-2, 0.0],
            reaction: Reaction::None,
            boundary: [BoundarySpec::dirichlet(1.0, 0.0), BoundarySpec::neumann()],
        };
        let grid = GridSpec::line(2, 0.0, 0.5, 3).unwrap();
        let u2 = [0.3, 0.1, 0.4, 0.2];
        let [s1, s2] =
            evolve_rd(&system, &grid, (&[0.0; 4], &u2), &SolverConfig::new(3, 2)).unwrap();
        for s in &s2.snapshots {
            assert!(trace_error_vectors(s, &u2).unwrap().unwrap() < 1e-4);
        }
        assert_eq!(s1.snapshots.len(), 4);
    }

    #[test]
    fn diagonal_decay() {
        let grid = GridSpec::line(2, 0.0, 0.25, 3).unwrap();
        let k = [[-1.0, 0.0], [0.0, -1.0]];
        let bcs = [
            BoundarySpec::dirichlet(0.0, 0.0),
            BoundarySpec::dirichlet(0.0, 0.0),
        ];
        let u1 = [1.0, 0.5, -0.5, 0.25];
        let u2 = [0.2, 0.4, 0.6, 0.8];
        let ts = evolve_rd_implicit_linear(k, &grid, &bcs, (&u1, &u2), &SolverConfig::new(4, 3))
            .unwrap();
        let mut expected: Vec<f64> = u1.iter().chain(&u2).cloned().collect();
        for s in &ts.snapshots[1..] {
            expected.iter_mut().for_each(|v| *v /= 1.25);
            for (a, b) in s.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-4, "{s:?} vs {expected:?}");
            }
        }
        assert!(evolve_rd_implicit_linear(
            [[0.0, 1.0], [0.5, 0.0]],
            &grid,
            &bcs,
            (&u1, &u2),
            &SolverConfig::new(4, 3)
        )
        .is_err());
    }
}
