//! Variational linear solves.
//!
//! The ansatz is `l` layers of single-qubit RY rotations, each followed by a
//! linear CX ladder. For `A x = b` the cost is
//!
//! ```text
//! E(theta) = -1/2 <psi|b>^2 / <psi|A|psi>
//! ```
//!
//! which is minimized when `A |psi> ∝ |b>`; the proportionality constant is
//! `r = |<psi|b>| / <psi|A|psi>`, so `x = r |psi>` for a normalized `b`.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg, Error, Result};
use crate::operators::DecomposedOperator;
use crate::optimize::{self, LbfgsOptions};
use crate::state::{self, dot, kernels, l2_norm, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzParams {
    n_qubits: usize,
    layers: usize,
    theta: Vec<f64>,
}

impl AnsatzParams {
    /// `theta` is row-major over `(layer, qubit)`.
    pub fn new(n_qubits: usize, layers: usize, theta: Vec<f64>) -> Result<Self> {
        if n_qubits == 0 || layers == 0 {
            return arg("ansatz needs at least one qubit and one layer");
        }
        if theta.len() != n_qubits * layers {
            return arg(format!(
                "expected {} angles, got {}",
                n_qubits * layers,
                theta.len()
            ));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return arg("ansatz angles must be finite");
        }
        Ok(Self {
            n_qubits,
            layers,
            theta,
        })
    }

    pub fn zeros(n_qubits: usize, layers: usize) -> Result<Self> {
        Self::new(n_qubits, layers, vec![0.0; n_qubits * layers])
    }

    /// Angles drawn uniformly from `[0, 2pi)`.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, layers: usize, rng: &mut R) -> Result<Self> {
        let theta = (0..n_qubits * layers)
            .map(|_| rng.random_range(0.0..TAU))
            .collect();
        Self::new(n_qubits, layers, theta)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn n_params(&self) -> usize {
        self.theta.len()
    }

    pub fn angle(&self, layer: usize, qubit: usize) -> f64 {
        self.theta[layer * self.n_qubits + qubit]
    }
}

/// Smallest layer count for which the ansatz has at least as many angles as
/// the system has unknowns.
pub fn min_layers(n_qubits: usize) -> usize {
    (1usize << n_qubits).div_ceil(n_qubits)
}

pub fn prepare_ansatz(params: &AnsatzParams) -> StateVector {
    StateVector::from_real_unchecked(&ansatz_real(params.n_qubits, params.layers, &params.theta))
}

fn ansatz_real(n: usize, layers: usize, theta: &[f64]) -> Vec<f64> {
    let mut amps = vec![0.0; 1 << n];
    amps[0] = 1.0;
    for layer in 0..layers {
        for q in 0..n {
            kernels::ry(&mut amps, q, theta[layer * n + q]);
        }
        for q in 0..n.saturating_sub(1) {
            kernels::cx(&mut amps, q, q + 1);
        }
    }
    amps
}

/// Cost landscape for one linear system; `b` is a real unit vector.
struct Problem<'a> {
    op: &'a DecomposedOperator,
    b: Vec<f64>,
    n: usize,
    layers: usize,
}

struct Evaluation {
    psi: Vec<f64>,
    overlap: f64,
    denom: f64,
}

impl<'a> Problem<'a> {
    fn new(op: &'a DecomposedOperator, b: &StateVector, layers: usize) -> Result<Self> {
        if op.n_qubits() != b.n_qubits() {
            return arg(format!(
                "operator acts on {} qubits, b on {}",
                op.n_qubits(),
                b.n_qubits()
            ));
        }
        if b.max_imag() > 1e-12 {
            return arg("right-hand side must have real amplitudes");
        }
        Ok(Self {
            op,
            b: b.real_parts(),
            n: b.n_qubits(),
            layers,
        })
    }

    fn check(&self, params: &AnsatzParams) -> Result<()> {
        if params.n_qubits != self.n {
            return arg(format!(
                "ansatz has {} qubits, system has {}",
                params.n_qubits, self.n
            ));
        }
        Ok(())
    }

    fn evaluate(&self, theta: &[f64]) -> Result<Evaluation> {
        let psi = ansatz_real(self.n, self.layers, theta);
        let overlap = dot(&psi, &self.b);
        let denom = self.op.expect_amps(&psi);
        if !(denom > 0.0) {
            return Err(Error::SingularCost(denom));
        }
        Ok(Evaluation {
            psi,
            overlap,
            denom,
        })
    }

    fn cost(&self, theta: &[f64]) -> Result<f64> {
        let e = self.evaluate(theta)?;
        Ok(-0.5 * e.overlap * e.overlap / e.denom)
    }

    /// Cost and its exact gradient via one backward sweep through the circuit.
    fn cost_and_gradient(&self, theta: &[f64], grad: &mut [f64]) -> Result<f64> {
        let Evaluation {
            psi,
            overlap: o,
            denom: a,
        } = self.evaluate(theta)?;
        let a_psi = self.op.apply_real(&psi);
        // dE = <dpsi| w> with w = -(o/a) b + (o^2/a^2) A psi.
        let (cb, ca) = (-o / a, o * o / (a * a));
        let mut lambda: Vec<f64> = self
            .b
            .iter()
            .zip(&a_psi)
            .map(|(b, ap)| cb * b + ca * ap)
            .collect();
        let mut phi = psi;
        let mut scratch = vec![0.0; phi.len()];
        let n = self.n;
        for layer in (0..self.layers).rev() {
            for q in (0..n.saturating_sub(1)).rev() {
                kernels::cx(&mut phi, q, q + 1);
                kernels::cx(&mut lambda, q, q + 1);
            }
            for q in (0..n).rev() {
                let angle = theta[layer * n + q];
                kernels::ry(&mut phi, q, -angle);
                scratch.copy_from_slice(&phi);
                kernels::ry_derivative(&mut scratch, q, angle);
                grad[layer * n + q] = dot(&scratch, &lambda);
                kernels::ry(&mut lambda, q, -angle);
            }
        }
        Ok(-0.5 * o * o / a)
    }

    /// Parameter-shift gradient: both `<psi|b><b|psi>` and `<psi|A|psi>` are
    /// expectation values, so each obeys the two-point shift rule.
    fn parameter_shift_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let centre = self.evaluate(theta)?;
        let (o2, a) = (centre.overlap * centre.overlap, centre.denom);
        let mut shifted = theta.to_vec();
        let mut grad = Vec::with_capacity(theta.len());
        for j in 0..theta.len() {
            let mut parts = [(0.0, 0.0); 2];
            for (slot, sign) in [1.0, -1.0].into_iter().enumerate() {
                shifted[j] = theta[j] + sign * FRAC_PI_2;
                let psi = ansatz_real(self.n, self.layers, &shifted);
                let ov = dot(&psi, &self.b);
                parts[slot] = (ov * ov, self.op.expect_amps(&psi));
            }
            shifted[j] = theta[j];
            let d_o2 = 0.5 * (parts[0].0 - parts[1].0);
            let d_a = 0.5 * (parts[0].1 - parts[1].1);
            grad.push(-0.5 * (d_o2 * a - o2 * d_a) / (a * a));
        }
        Ok(grad)
    }
}

pub fn cost(params: &AnsatzParams, a: &DecomposedOperator, b: &StateVector) -> Result<f64> {
    let p = Problem::new(a, b, params.layers)?;
    p.check(params)?;
    p.cost(&params.theta)
}

pub fn norm_r(params: &AnsatzParams, a: &DecomposedOperator, b: &StateVector) -> Result<f64> {
    let p = Problem::new(a, b, params.layers)?;
    p.check(params)?;
    let e = p.evaluate(&params.theta)?;
    Ok(e.overlap.abs() / e.denom)
}

/// [`norm_r`] with the overlap measured through the ancilla interference
/// circuit instead of read off the statevector.
pub fn norm_r_superposition(
    params: &AnsatzParams,
    a: &DecomposedOperator,
    b: &StateVector,
) -> Result<f64> {
    let p = Problem::new(a, b, params.layers)?;
    p.check(params)?;
    let e = p.evaluate(&params.theta)?;
    let overlap = state::overlap_via_superposition(&prepare_ansatz(params), b)?;
    Ok(overlap / e.denom)
}

pub fn gradient(
    params: &AnsatzParams,
    a: &DecomposedOperator,
    b: &StateVector,
) -> Result<Vec<f64>> {
    let p = Problem::new(a, b, params.layers)?;
    p.check(params)?;
    let mut g = vec![0.0; params.n_params()];
    p.cost_and_gradient(&params.theta, &mut g)?;
    Ok(g)
}

pub fn gradient_parameter_shift(
    params: &AnsatzParams,
    a: &DecomposedOperator,
    b: &StateVector,
) -> Result<Vec<f64>> {
    let p = Problem::new(a, b, params.layers)?;
    p.check(params)?;
    p.parameter_shift_gradient(&params.theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientMethod {
    #[default]
    Exact,
    ParameterShift,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_evals: usize,
    pub memory: usize,
    pub gradient: GradientMethod,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_evals: 10_000,
            memory: 10,
            gradient: GradientMethod::Exact,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub theta_opt: AnsatzParams,
    pub r_opt: f64,
    /// `r_opt * psi(theta_opt)`, sign-fixed so that its overlap with `b` is
    /// nonnegative.
    pub solution: Vec<f64>,
    pub cost: f64,
    /// Cost-function evaluations, counting each gradient as one evaluation
    /// per parameter (the price of a derivative-free gradient estimate).
    pub n_function_evals: usize,
    /// Gradient evaluations actually requested by the optimizer.
    pub n_gradient_evals: usize,
    pub n_iterations: usize,
    pub converged: bool,
}

/// Minimizes the cost from `theta0` and returns `r |psi>` for the unit
/// vector `b`.
pub fn vqls_solve(
    a: &DecomposedOperator,
    b: &StateVector,
    theta0: &AnsatzParams,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    if !(opts.tol > 0.0) {
        return arg("tolerance must be positive");
    }
    let problem = Problem::new(a, b, theta0.layers)?;
    problem.check(theta0)?;
    let lbfgs = LbfgsOptions {
        f_tol: opts.tol,
        g_tol: opts.tol,
        memory: opts.memory.max(1),
        max_evals: opts.max_evals,
        max_iterations: opts.max_evals,
    };
    let min = match opts.gradient {
        GradientMethod::Exact => optimize::minimize(
            |x, g| problem.cost_and_gradient(x, g),
            &theta0.theta,
            &lbfgs,
        )?,
        GradientMethod::ParameterShift => optimize::minimize(
            |x, g| {
                g.copy_from_slice(&problem.parameter_shift_gradient(x)?);
                problem.cost(x)
            },
            &theta0.theta,
            &lbfgs,
        )?,
    };

    let mut theta = min.x;
    let e = problem.evaluate(&theta)?;
    let r = e.overlap.abs() / e.denom;
    let mut psi = e.psi;
    if e.overlap < 0.0 {
        // RY(t + 2pi) = -RY(t): flip the global sign inside the circuit so the
        // returned angles reproduce the returned solution.
        theta[0] += TAU;
        psi = ansatz_real(problem.n, problem.layers, &theta);
    }
    let p = theta.len();
    Ok(SolveResult {
        theta_opt: AnsatzParams::new(problem.n, problem.layers, theta)?,
        r_opt: r,
        solution: psi.iter().map(|v| r * v).collect(),
        cost: -0.5 * e.overlap * e.overlap / e.denom,
        n_function_evals: min.evals * (1 + p),
        n_gradient_evals: min.evals,
        n_iterations: min.iterations,
        converged: min.converged,
    })
}

/// Outcome of solving `A x = b` for an unnormalized `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSolve {
    pub x: Vec<f64>,
    /// `None` when `b` vanished and no optimization was run.
    pub result: Option<SolveResult>,
}

/// Per-system solver state: owns the warm-start angles and the generator
/// used for random initializations.
#[derive(Debug, Clone)]
pub struct WarmStartSolver {
    pub layers: usize,
    pub options: SolveOptions,
    pub warm_start: bool,
    /// Independent random initializations tried on a cold start; the one
    /// with the lowest final cost is kept.
    pub restarts: usize,
    theta: Option<AnsatzParams>,
    rng: ChaCha8Rng,
}

impl WarmStartSolver {
    pub fn new(layers: usize, options: SolveOptions, seed: u64) -> Self {
        Self {
            layers,
            options,
            warm_start: true,
            restarts: 1,
            theta: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn with_warm_start(mut self, warm_start: bool) -> Self {
        self.warm_start = warm_start;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts.max(1);
        self
    }

    pub fn last_theta(&self) -> Option<&AnsatzParams> {
        self.theta.as_ref()
    }

    /// Solves `A x = b`, rescaling by `|b|` and short-circuiting `b = 0`.
    pub fn solve(&mut self, a: &DecomposedOperator, b: &[f64]) -> Result<VectorSolve> {
        let n = state::qubits_for_len(b.len())?;
        if n != a.n_qubits() {
            return arg(format!(
                "operator acts on {} qubits, b has length {}",
                a.n_qubits(),
                b.len()
            ));
        }
        let norm = l2_norm(b);
        if norm == 0.0 {
            return Ok(VectorSolve {
                x: vec![0.0; b.len()],
                result: None,
            });
        }
        if !norm.is_finite() {
            return Err(Error::Degenerate("right-hand side is not finite".into()));
        }
        let b_hat =
            StateVector::from_real_unchecked(&b.iter().map(|v| v / norm).collect::<Vec<_>>());

        let best = match (&self.theta, self.warm_start) {
            (Some(theta), true) => vqls_solve(a, &b_hat, theta, &self.options)?,
            _ => {
                let mut best: Option<SolveResult> = None;
                let mut spent = (0, 0, 0);
                for _ in 0..self.restarts {
                    let theta0 = AnsatzParams::random(n, self.layers, &mut self.rng)?;
                    let res = vqls_solve(a, &b_hat, &theta0, &self.options)?;
                    spent = (
                        spent.0 + res.n_function_evals,
                        spent.1 + res.n_gradient_evals,
                        spent.2 + res.n_iterations,
                    );
                    if best.as_ref().is_none_or(|b| res.cost < b.cost) {
                        best = Some(res);
                    }
                }
                let mut best = best.expect("at least one restart");
                (
                    best.n_function_evals,
                    best.n_gradient_evals,
                    best.n_iterations,
                ) = spent;
                best
            }
        };
        self.theta = Some(best.theta_opt.clone());
        let x = best.solution.iter().map(|v| v * norm).collect();
        Ok(VectorSolve {
            x,
            result: Some(best),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{decompose_laplacian_1d, Boundary};
    use std::f64::consts::PI;

    fn heat_ie(n: usize, delta: f64) -> DecomposedOperator {
        decompose_laplacian_1d(n, Boundary::Dirichlet)
            .unwrap()
            .scaled(delta)
            .plus_identity(1.0)
    }

    fn random_params(n: usize, l: usize, seed: u64) -> AnsatzParams {
        AnsatzParams::random(n, l, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    fn random_unit(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
        state::encode(&v).unwrap().state
    }

    #[test]
    fn ansatz_examples() {
        for (n, l) in [(1, 1), (3, 2)] {
            assert_eq!(
                prepare_ansatz(&AnsatzParams::zeros(n, l).unwrap()),
                StateVector::zero(n).unwrap()
            );
        }
        let s = prepare_ansatz(&AnsatzParams::new(1, 1, vec![PI / 2.0]).unwrap());
        let h = 1.0 / 2f64.sqrt();
        assert!(
            (s.amplitudes()[0].re - h).abs() < 1e-15 && (s.amplitudes()[1].re - h).abs() < 1e-15
        );
        // Qubit 0 rotated to |1>, then CX(0 -> 1) sets qubit 1: index 0b11.
        let s = prepare_ansatz(&AnsatzParams::new(2, 1, vec![PI, 0.0]).unwrap());
        let amps: Vec<f64> = s.amplitudes().iter().map(|c| c.re).collect();
        assert!(amps[..3].iter().all(|a| a.abs() < 1e-15) && (amps[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(AnsatzParams::new(2, 2, vec![0.0; 3]).is_err());
        assert!(AnsatzParams::new(0, 2, vec![]).is_err());
        assert!(AnsatzParams::new(1, 1, vec![f64::NAN]).is_err());
        assert_eq!(min_layers(3), 3);
        assert_eq!(min_layers(4), 4);
        assert_eq!(min_layers(6), 11);
    }

    #[test]
    fn cost_and_norm_examples() {
        let theta = random_params(3, 2, 1);
        let psi = prepare_ansatz(&theta);
        let id = DecomposedOperator::identity(3, 1.0);
        assert!((cost(&theta, &id, &psi).unwrap() + 0.5).abs() < 1e-14);
        let two = DecomposedOperator::identity(3, 2.0);
        assert!((norm_r(&theta, &two, &psi).unwrap() - 0.5).abs() < 1e-14);

        // A vector orthogonal to psi.
        let p = psi.real_parts();
        let mut q: Vec<f64> = (0..8).map(|i| (i as f64).cos()).collect();
        let proj = dot(&p, &q);
        q.iter_mut().zip(&p).for_each(|(qi, pi)| *qi -= proj * pi);
        let q = state::encode(&q).unwrap().state;
        assert!(cost(&theta, &id, &q).unwrap().abs() < 1e-14);
        assert!(norm_r(&theta, &id, &q).unwrap().abs() < 1e-14);

        assert!(matches!(
            cost(&theta, &DecomposedOperator::identity(3, 0.0), &psi),
            Err(Error::SingularCost(_))
        ));
    }

    #[test]
    fn cost_matches_dense_formula() {
        for n in [2, 3] {
            let op = heat_ie(n, 1.0);
            let dense = op.to_dense();
            let theta = random_params(n, 2, 7 + n as u64);
            let b = random_unit(n, 11);
            let psi = prepare_ansatz(&theta).real_parts();
            let bv = b.real_parts();
            let o = dot(&psi, &bv);
            let a = dense.quadratic_form(&psi);
            assert!((cost(&theta, &op, &b).unwrap() + 0.5 * o * o / a).abs() < 1e-13);
            assert!((norm_r(&theta, &op, &b).unwrap() - o.abs() / a).abs() < 1e-13);
            let via = norm_r_superposition(&theta, &op, &b).unwrap();
            assert!((via - o.abs() / a).abs() < 1e-10);
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let h = 1e-5;
        for seed in 0..20u64 {
            let n = 1 + (seed % 3) as usize;
            let l = 1 + (seed % 4) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let op = heat_ie(n, rng.random_range(0.1..3.0));
            let b = random_unit(n, 200 + seed);
            let theta = random_params(n, l, 300 + seed);
            let g = gradient(&theta, &op, &b).unwrap();
            let ps = gradient_parameter_shift(&theta, &op, &b).unwrap();
            for j in 0..theta.n_params() {
                let mut tp = theta.theta().to_vec();
                let mut tm = tp.clone();
                tp[j] += h;
                tm[j] -= h;
                let fp = cost(&AnsatzParams::new(n, l, tp).unwrap(), &op, &b).unwrap();
                let fm = cost(&AnsatzParams::new(n, l, tm).unwrap(), &op, &b).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (g[j] - fd).abs() < 1e-6,
                    "seed {seed} param {j}: {} vs {fd}",
                    g[j]
                );
                assert!(
                    (g[j] - ps[j]).abs() < 1e-10,
                    "seed {seed} param {j}: {} vs {}",
                    g[j],
                    ps[j]
                );
            }
        }
    }

    #[test]
    fn constant_cost_has_zero_gradient() {
        let theta = random_params(3, 2, 5);
        let psi = prepare_ansatz(&theta);
        let g = gradient(&theta, &DecomposedOperator::identity(3, 1.0), &psi).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn identity_system_recovers_b() {
        let n = 3;
        let b = random_unit(n, 9);
        let theta0 = random_params(n, min_layers(n) + 1, 10);
        let res = vqls_solve(
            &DecomposedOperator::identity(n, 1.0),
            &b,
            &theta0,
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(res.converged, "{res:?}");
        assert!((res.r_opt - 1.0).abs() < 1e-4);
        let resid: f64 = res
            .solution
            .iter()
            .zip(b.real_parts())
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(resid < 1e-4, "{resid}");
        let psi = prepare_ansatz(&res.theta_opt).real_parts();
        for (s, p) in res.solution.iter().zip(&psi) {
            assert!((s - res.r_opt * p).abs() < 1e-12);
        }
        assert!(res.cost <= 0.0);
    }

    #[test]
    fn warm_restart_is_cheap() {
        let op = heat_ie(3, 1.0);
        let b = random_unit(3, 3);
        let res = vqls_solve(&op, &b, &random_params(3, 3, 4), &SolveOptions::default()).unwrap();
        let again = vqls_solve(&op, &b, &res.theta_opt, &SolveOptions::default()).unwrap();
        assert!(again.n_iterations <= 5, "{}", again.n_iterations);
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let mut s = WarmStartSolver::new(2, SolveOptions::default(), 0);
        let out = s.solve(&heat_ie(2, 1.0), &[0.0; 4]).unwrap();
        assert_eq!(out.x, vec![0.0; 4]);
        assert!(out.result.is_none());
    }

    #[test]
    fn solver_rescales_and_fixes_sign() {
        let op = heat_ie(2, 0.5);
        let b = [-3.0, -1.0, -2.0, -0.5];
        let mut s = WarmStartSolver::new(4, SolveOptions::default(), 1).with_restarts(2);
        let out = s.solve(&op, &b).unwrap();
        let ax = op.apply(&out.x).unwrap();
        for (l, r) in ax.iter().zip(&b) {
            assert!((l - r).abs() < 1e-5, "{ax:?}");
        }
        assert!(dot(&out.x, &b) > 0.0);
    }
}
