//! Operator decompositions into weighted simple Hamiltonians.
//!
//! A [`DecomposedOperator`] is `c * I + sum_k w_k * T_k`, where every term
//! `T_k` is a tensor product over `{I, X, I0, I1}` optionally conjugated by a
//! cyclic shift `S^dag (.) S` on a qubit range. Expectation values only ever
//! touch the statevector through the bit-mask kernels in [`crate::state`];
//! the dense matrices built here are for validation and classical oracles.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{arg, Result};
use crate::state::kernels::{self, Masks};
use crate::state::{check_range, qubits_for_len, Amplitude, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

impl Boundary {
    /// Corner offset of the tridiagonal Laplacian: `1 + alpha` on the corners.
    pub fn laplacian_alpha(self) -> f64 {
        match self {
            Boundary::Dirichlet => 1.0,
            Boundary::Neumann => 0.0,
        }
    }

    /// Weight of the projector term subtracted inside the shift conjugation.
    pub fn projector_coefficient(self) -> f64 {
        match self {
            Boundary::Dirichlet => 0.0,
            Boundary::Neumann => 1.0,
        }
    }

    /// Corner entry of the central-difference matrix (before the `1/2dx` factor).
    pub fn divergence_alpha(self) -> f64 {
        match self {
            Boundary::Dirichlet => 0.0,
            Boundary::Neumann => -1.0,
        }
    }
}

/// Single-qubit factor of a simple Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    I,
    X,
    /// `|0><0|`
    I0,
    /// `|1><1|`
    I1,
}

impl Factor {
    fn matrix(self) -> DMatrix<f64> {
        let v = match self {
            Factor::I => [1.0, 0.0, 0.0, 1.0],
            Factor::X => [0.0, 1.0, 1.0, 0.0],
            Factor::I0 => [1.0, 0.0, 0.0, 0.0],
            Factor::I1 => [0.0, 0.0, 0.0, 1.0],
        };
        DMatrix::from_row_slice(2, 2, &v)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::I => "I",
            Factor::X => "X",
            Factor::I0 => "I0",
            Factor::I1 => "I1",
        })
    }
}

/// Weighted tensor product of single-qubit factors, most significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub weight: f64,
    factors: Vec<Factor>,
    shift: Option<(usize, usize)>,
    masks: Masks,
}

impl HamiltonianTerm {
    pub fn new(weight: f64, factors: Vec<Factor>) -> Self {
        let n = factors.len();
        let mut masks = Masks {
            x: 0,
            zero: 0,
            one: 0,
        };
        for (pos, f) in factors.iter().enumerate() {
            let bit = 1usize << (n - 1 - pos);
            match f {
                Factor::I => {}
                Factor::X => masks.x |= bit,
                Factor::I0 => masks.zero |= bit,
                Factor::I1 => masks.one |= bit,
            }
        }
        Self {
            weight,
            factors,
            shift: None,
            masks,
        }
    }

    /// Conjugates the term by the cyclic shift on qubits `[lo, hi)`.
    pub fn shifted(mut self, lo: usize, hi: usize) -> Result<Self> {
        check_range(lo, hi, self.factors.len())?;
        self.shift = Some((lo, hi));
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn shift_range(&self) -> Option<(usize, usize)> {
        self.shift
    }

    fn same_operator(&self, other: &Self) -> bool {
        self.factors == other.factors && self.shift == other.shift
    }

    pub(crate) fn expect_unweighted<T: Amplitude>(&self, amps: &[T]) -> f64 {
        match self.shift {
            Some((lo, hi)) => kernels::expect(&kernels::shift(amps, lo, hi, false), self.masks),
            None => kernels::expect(amps, self.masks),
        }
    }

    /// `out += scale * weight * (S^dag) H (S) |amps>`
    pub(crate) fn apply_add<T: Amplitude>(&self, amps: &[T], scale: f64, out: &mut [T]) {
        let w = scale * self.weight;
        match self.shift {
            Some((lo, hi)) => {
                let shifted = kernels::shift(amps, lo, hi, false);
                let mut h = vec![T::default(); amps.len()];
                kernels::apply_add(&shifted, self.masks, 1.0, &mut h);
                let back = kernels::shift(&h, lo, hi, true);
                for (o, v) in out.iter_mut().zip(back) {
                    *o = *o + v * w;
                }
            }
            None => kernels::apply_add(amps, self.masks, w, out),
        }
    }

    /// Dense matrix of the weighted term.
    pub fn dense(&self) -> DenseMatrix {
        let mut m = DMatrix::from_element(1, 1, 1.0);
        for f in &self.factors {
            m = m.kronecker(&f.matrix());
        }
        if let Some((lo, hi)) = self.shift {
            let s = shift_dense(self.n_qubits(), lo, hi);
            m = s.transpose() * m * s;
        }
        DenseMatrix { m: m * self.weight }
    }
}

impl fmt::Display for HamiltonianTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.factors.iter().map(|x| x.to_string()).collect();
        match self.shift {
            Some((lo, hi)) => {
                write!(
                    f,
                    "{:+} S[{lo},{hi})^dag {} S[{lo},{hi})",
                    self.weight,
                    body.join(".")
                )
            }
            None => write!(f, "{:+} {}", self.weight, body.join(".")),
        }
    }
}

/// Dense permutation matrix of the cyclic shift on qubits `[lo, hi)`.
pub fn shift_dense(n_qubits: usize, lo: usize, hi: usize) -> DMatrix<f64> {
    let dim = 1usize << n_qubits;
    let mut s = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = vec![0.0; dim];
        e[col] = 1.0;
        let moved = kernels::shift(&e, lo, hi, false);
        for (row, v) in moved.into_iter().enumerate() {
            s[(row, col)] = v;
        }
    }
    s
}

/// `identity_coefficient * I + sum(terms)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedOperator {
    n_qubits: usize,
    pub identity_coefficient: f64,
    terms: Vec<HamiltonianTerm>,
    /// Boundary type per spatial axis (x first), empty when not applicable.
    pub boundaries: Vec<Boundary>,
}

impl DecomposedOperator {
    pub fn identity(n_qubits: usize, coefficient: f64) -> Self {
        Self {
            n_qubits,
            identity_coefficient: coefficient,
            terms: Vec::new(),
            boundaries: Vec::new(),
        }
    }

    pub fn from_terms(
        n_qubits: usize,
        identity_coefficient: f64,
        terms: Vec<HamiltonianTerm>,
    ) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.n_qubits() != n_qubits) {
            return arg(format!("term {t} does not act on {n_qubits} qubits"));
        }
        Ok(Self {
            n_qubits,
            identity_coefficient,
            terms,
            boundaries: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.identity_coefficient *= factor;
        for t in &mut out.terms {
            t.weight *= factor;
        }
        out
    }

    pub fn plus_identity(mut self, c: f64) -> Self {
        self.identity_coefficient += c;
        self
    }

    /// Adds a term, merging it into an existing term for the same operator.
    pub fn push_term(&mut self, term: HamiltonianTerm) -> Result<()> {
        if term.n_qubits() != self.n_qubits {
            return arg(format!(
                "term {term} does not act on {} qubits",
                self.n_qubits
            ));
        }
        match self.terms.iter_mut().find(|t| t.same_operator(&term)) {
            Some(t) => t.weight += term.weight,
            None => self.terms.push(term),
        }
        Ok(())
    }

    /// Sum of two operators on the same register; identical terms are merged.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.n_qubits != self.n_qubits {
            return arg(format!(
                "qubit counts differ: {} vs {}",
                self.n_qubits, other.n_qubits
            ));
        }
        let mut out = self.clone();
        out.identity_coefficient += other.identity_coefficient;
        for t in &other.terms {
            out.push_term(t.clone())?;
        }
        for b in &other.boundaries {
            if out.boundaries.len() < 2 {
                out.boundaries.push(*b);
            }
        }
        Ok(out)
    }

    pub(crate) fn expect_amps<T: Amplitude>(&self, amps: &[T]) -> f64 {
        self.identity_coefficient
            + self
                .terms
                .iter()
                .map(|t| t.weight * t.expect_unweighted(amps))
                .sum::<f64>()
    }

    /// `A |v>` evaluated term by term.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return arg(format!(
                "vector length {} does not match operator dimension {}",
                v.len(),
                self.dim()
            ));
        }
        Ok(self.apply_real(v))
    }

    pub(crate) fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = v.iter().map(|x| x * self.identity_coefficient).collect();
        for t in &self.terms {
            t.apply_add(v, 1.0, &mut out);
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let dim = self.dim();
        let mut m = DMatrix::identity(dim, dim) * self.identity_coefficient;
        for t in &self.terms {
            m += t.dense().m;
        }
        DenseMatrix { m }
    }
}

impl fmt::Display for DecomposedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} I", self.identity_coefficient)?;
        for t in &self.terms {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

/// `<psi|A|psi>`.
pub fn expect_operator(state: &StateVector, op: &DecomposedOperator) -> Result<f64> {
    if state.n_qubits() != op.n_qubits {
        return arg(format!(
            "state has {} qubits, operator {}",
            state.n_qubits(),
            op.n_qubits
        ));
    }
    Ok(op.expect_amps(state.amplitudes()))
}

/// Laplacian terms for one axis whose register occupies qubits `[lo, hi)`
/// of an `n_qubits` register.
fn laplacian_axis(
    n_qubits: usize,
    lo: usize,
    hi: usize,
    boundary: Boundary,
) -> Result<DecomposedOperator> {
    check_range(lo, hi, n_qubits)?;
    let pattern = |low: Factor, upper: Factor| -> Vec<Factor> {
        (0..n_qubits)
            .rev()
            .map(|q| match q {
                q if q < lo || q >= hi => Factor::I,
                q if q == lo => low,
                _ => upper,
            })
            .collect()
    };
    let mut terms = vec![
        HamiltonianTerm::new(-1.0, pattern(Factor::X, Factor::I)),
        HamiltonianTerm::new(-1.0, pattern(Factor::X, Factor::I)).shifted(lo, hi)?,
        HamiltonianTerm::new(1.0, pattern(Factor::X, Factor::I0)).shifted(lo, hi)?,
    ];
    if boundary == Boundary::Neumann {
        let b = boundary.projector_coefficient();
        terms.push(HamiltonianTerm::new(-b, pattern(Factor::I, Factor::I0)).shifted(lo, hi)?);
    }
    let mut op = DecomposedOperator::from_terms(n_qubits, 2.0, terms)?;
    op.boundaries = vec![boundary];
    Ok(op)
}

/// Shift-based decomposition of the 1D finite-difference Laplacian.
pub fn decompose_laplacian_1d(n: usize, boundary: Boundary) -> Result<DecomposedOperator> {
    if n == 0 {
        return arg("need at least one qubit");
    }
    laplacian_axis(n, 0, n, boundary)
}

/// `(A_x, A_y)` on `mx + my` qubits; x occupies the low bits.
pub fn decompose_laplacian_2d(
    mx: usize,
    my: usize,
    boundary_x: Boundary,
    boundary_y: Boundary,
) -> Result<(DecomposedOperator, DecomposedOperator)> {
    if mx == 0 || my == 0 {
        return arg("each axis needs at least one qubit");
    }
    let n = mx + my;
    Ok((
        laplacian_axis(n, 0, mx, boundary_x)?,
        laplacian_axis(n, mx, n, boundary_y)?,
    ))
}

/// Fully implicit operator for a linear symmetric two-component source:
/// `I + delta (I (x) A_1d) - dt (k11 I0 + k22 I1 + k12 X) (x) I^n`.
/// The component qubit is the most significant one.
pub fn reaction_implicit_operator(
    n: usize,
    k: [[f64; 2]; 2],
    dt: f64,
    delta: f64,
    boundary: Boundary,
) -> Result<DecomposedOperator> {
    if n == 0 {
        return arg("need at least one qubit");
    }
    if k[0][1] != k[1][0] {
        return arg(format!(
            "rate matrix must be symmetric, got k12={} k21={}",
            k[0][1], k[1][0]
        ));
    }
    let total = n + 1;
    let mut op = laplacian_axis(total, 0, n, boundary)?
        .scaled(delta)
        .plus_identity(1.0);
    let lead = |f: Factor| {
        let mut v = vec![f];
        v.extend(std::iter::repeat_n(Factor::I, n));
        v
    };
    op.terms
        .push(HamiltonianTerm::new(-dt * k[0][0], lead(Factor::I0)));
    op.terms
        .push(HamiltonianTerm::new(-dt * k[1][1], lead(Factor::I1)));
    op.terms
        .push(HamiltonianTerm::new(-dt * k[0][1], lead(Factor::X)));
    Ok(op)
}

/// Square real matrix whose dimension is a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    m: DMatrix<f64>,
}

impl DenseMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return arg(format!("matrix is {}x{}, not square", m.nrows(), m.ncols()));
        }
        qubits_for_len(m.nrows())?;
        Ok(Self { m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return arg("rows must all have length equal to the row count");
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n_qubits: usize) -> Self {
        let d = 1usize << n_qubits;
        Self {
            m: DMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// `self (x) other`, with `self` on the most significant qubits.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            m: self.m.kronecker(&other.m),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { m: &self.m * s }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return arg("dimension mismatch");
        }
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.m.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        self.matvec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m).abs().max()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.m - self.m.transpose()).abs().max() <= tol
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let sym = (&self.m + self.m.transpose()) * 0.5;
        let mut ev: Vec<f64> = sym.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Numerical rank from singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let sv = self.m.clone().singular_values();
        let max = sv.max();
        sv.iter().filter(|s| **s > tol * max).count()
    }

    /// 2-norm condition number.
    pub fn condition_number(&self) -> f64 {
        let sv = self.m.clone().singular_values();
        sv.max() / sv.min()
    }
}

/// Tridiagonal `-1, 2, -1` with corners `1 + alpha`.
pub fn laplacian_1d_dense(n: usize, boundary: Boundary) -> Result<DenseMatrix> {
    if n == 0 {
        return arg("need at least one qubit");
    }
    let dim = 1usize << n;
    let corner = 1.0 + boundary.laplacian_alpha();
    let m = DMatrix::from_fn(dim, dim, |i, j| match (i, j) {
        (i, j) if i == j && (i == 0 || i == dim - 1) => corner,
        (i, j) if i == j => 2.0,
        (i, j) if i.abs_diff(j) == 1 => -1.0,
        _ => 0.0,
    });
    Ok(DenseMatrix { m })
}

/// Central-difference matrix `(1/2dx) [alpha 1; -1 0 1; ...; -1 -alpha]`.
///
/// With `alpha = -1` (zero flux) the first and last rows become one-sided
/// differences, so constants have zero gradient everywhere.
pub fn divergence_dense(n: usize, boundary: Boundary, dx: f64) -> Result<DenseMatrix> {
    if n == 0 {
        return arg("need at least one qubit");
    }
    if dx.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return arg(format!("grid spacing must be positive, got {dx}"));
    }
    let dim = 1usize << n;
    let alpha = boundary.divergence_alpha();
    let s = 1.0 / (2.0 * dx);
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        s * match (i, j) {
            (0, 0) => alpha,
            (i, j) if i == j && i == dim - 1 => -alpha,
            (i, j) if j == i + 1 => 1.0,
            (i, j) if i == j + 1 => -1.0,
            _ => 0.0,
        }
    });
    Ok(DenseMatrix { m })
}

fn pauli_label(n: usize, x: usize, z: usize) -> String {
    (0..n)
        .rev()
        .map(|q| match ((x >> q) & 1, (z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        })
        .collect()
}

/// `P_{k^x, k}` for the Pauli string with bit masks `(x, z)`; `Y` sets both.
fn pauli_entry(x: usize, z: usize, k: usize) -> Complex64 {
    let ys = (x & z).count_ones();
    let sign = if (k & z).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    Complex64::new(0.0, 1.0).powu(ys) * sign
}

/// Coefficients `c_P = tr(P A) / 2^n` over the Pauli basis, keyed by labels
/// such as `"IX"` (most significant qubit first). Diagnostic only, `n <= 6`.
pub fn pauli_coefficients_diagnostic(a: &DenseMatrix) -> Result<BTreeMap<String, f64>> {
    let n = a.n_qubits();
    if n > 6 {
        return arg(format!("{n} qubits exceeds the diagnostic limit of 6"));
    }
    let dim = a.dim();
    let mut out = BTreeMap::new();
    for x in 0..dim {
        for z in 0..dim {
            let tr: Complex64 = (0..dim)
                .map(|k| pauli_entry(x, z, k) * a.m[(k, k ^ x)])
                .sum();
            out.insert(pauli_label(n, x, z), tr.re / dim as f64);
        }
    }
    Ok(out)
}

/// `sum_P c_P P` (real part) for coefficients produced by
/// [`pauli_coefficients_diagnostic`].
pub fn pauli_reconstruct(n: usize, coefficients: &BTreeMap<String, f64>) -> Result<DenseMatrix> {
    let dim = 1usize << n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (label, c) in coefficients {
        if label.len() != n {
            return arg(format!("label {label} has wrong length"));
        }
        let (mut x, mut z) = (0usize, 0usize);
        for (pos, ch) in label.chars().enumerate() {
            let bit = 1usize << (n - 1 - pos);
            match ch {
                'I' => {}
                'X' => x |= bit,
                'Y' => {
                    x |= bit;
                    z |= bit
                }
                'Z' => z |= bit,
                other => return arg(format!("unknown Pauli {other}")),
            }
        }
        for k in 0..dim {
            m[(k ^ x, k)] += (pauli_entry(x, z, k) * c).re;
        }
    }
    DenseMatrix::new(m)
}
