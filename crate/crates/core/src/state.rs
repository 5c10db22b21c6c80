//! Minimal statevector simulator.
//!
//! Qubit `q` is bit `q` of the basis index (qubit 0 is least significant).
//! Tensor-product factor lists elsewhere in the crate are written most
//! significant factor first, so `[X, I0]` on two qubits puts `X` on qubit 1
//! and `I0` on qubit 0.
//!
//! Gate kernels are generic over the amplitude type: the public
//! [`StateVector`] carries complex amplitudes, while the optimizer's hot
//! loop runs the same kernels over plain `f64` buffers (every circuit used
//! by the solver is real).

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{arg, Error, Result};
use crate::operators::HamiltonianTerm;

const NORM_TOL: f64 = 1e-10;

pub(crate) trait Amplitude:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    /// `Re(conj(self) * other)`
    fn re_dot(self, other: Self) -> f64;
}

impl Amplitude for f64 {
    #[inline]
    fn re_dot(self, other: Self) -> f64 {
        self * other
    }
}

impl Amplitude for Complex64 {
    #[inline]
    fn re_dot(self, other: Self) -> f64 {
        self.re * other.re + self.im * other.im
    }
}

pub(crate) mod kernels {
    use super::Amplitude;

    /// RY(angle) = [[cos a/2, -sin a/2], [sin a/2, cos a/2]] on `qubit`.
    pub fn ry<T: Amplitude>(amps: &mut [T], qubit: usize, angle: f64) {
        let (s, c) = (0.5 * angle).sin_cos();
        rotate(amps, qubit, c, s);
    }

    /// Applies dRY/dangle, which is not unitary.
    pub fn ry_derivative<T: Amplitude>(amps: &mut [T], qubit: usize, angle: f64) {
        let (s, c) = (0.5 * angle).sin_cos();
        let bit = 1usize << qubit;
        for i in 0..amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a0, a1) = (amps[i], amps[j]);
                amps[i] = (a0 * s + a1 * c) * -0.5;
                amps[j] = (a0 * c - a1 * s) * 0.5;
            }
        }
    }

    #[inline]
    fn rotate<T: Amplitude>(amps: &mut [T], qubit: usize, c: f64, s: f64) {
        let bit = 1usize << qubit;
        for i in 0..amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a0, a1) = (amps[i], amps[j]);
                amps[i] = a0 * c - a1 * s;
                amps[j] = a0 * s + a1 * c;
            }
        }
    }

    pub fn cx<T: Amplitude>(amps: &mut [T], control: usize, target: usize) {
        let (cbit, tbit) = (1usize << control, 1usize << target);
        for i in 0..amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                amps.swap(i, i | tbit);
            }
        }
    }

    /// Cyclic shift of the bit-field `[lo, hi)`: field value `f` goes to
    /// `f + 1` (or `f - 1` when `inverse`) modulo `2^(hi - lo)`.
    pub fn shift<T: Amplitude>(amps: &[T], lo: usize, hi: usize, inverse: bool) -> Vec<T> {
        let mask = (1usize << (hi - lo)) - 1;
        let field = mask << lo;
        let step = if inverse { mask } else { 1 };
        let mut out = vec![T::default(); amps.len()];
        for (i, &a) in amps.iter().enumerate() {
            let f = ((i >> lo) + step) & mask;
            out[(i & !field) | (f << lo)] = a;
        }
        out
    }

    /// Bit masks describing a tensor product over {I, X, I0, I1}.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
    pub struct Masks {
        pub x: usize,
        pub zero: usize,
        pub one: usize,
    }

    impl Masks {
        #[inline]
        pub fn admits(&self, i: usize) -> bool {
            i & self.zero == 0 && i & self.one == self.one
        }
    }

    /// `<phi|H|phi>` for the product operator described by `masks`.
    pub fn expect<T: Amplitude>(amps: &[T], masks: Masks) -> f64 {
        let mut acc = 0.0;
        for (i, &a) in amps.iter().enumerate() {
            if masks.admits(i) {
                acc += a.re_dot(amps[i ^ masks.x]);
            }
        }
        acc
    }

    /// `out += weight * H |phi>`
    pub fn apply_add<T: Amplitude>(amps: &[T], masks: Masks, weight: f64, out: &mut [T]) {
        for i in 0..amps.len() {
            if masks.admits(i) {
                out[i] = out[i] + amps[i ^ masks.x] * weight;
            }
        }
    }
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits >= usize::BITS as usize {
            return arg(format!("qubit count {n_qubits} out of range"));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return arg(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            ));
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Wraps already-normalized amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return arg(format!("amplitudes have norm {norm}, expected 1"));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Wraps already-normalized real amplitudes.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub(crate) fn from_real_unchecked(amps: &[f64]) -> Self {
        Self {
            n_qubits: amps.len().trailing_zeros() as usize,
            amps: amps.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest imaginary part in magnitude.
    pub fn max_imag(&self) -> f64 {
        self.amps.iter().fold(0.0, |m, a| m.max(a.im.abs()))
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.re).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return arg(format!(
                "qubit {q} out of range for {} qubits",
                self.n_qubits
            ));
        }
        Ok(())
    }

    pub fn apply_ry(&self, qubit: usize, angle: f64) -> Result<Self> {
        self.check_qubit(qubit)?;
        let mut out = self.clone();
        kernels::ry(&mut out.amps, qubit, angle);
        Ok(out)
    }

    pub fn apply_cx(&self, control: usize, target: usize) -> Result<Self> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return arg("control and target must differ");
        }
        let mut out = self.clone();
        kernels::cx(&mut out.amps, control, target);
        Ok(out)
    }

    /// Cyclic shift on the qubit range `[lo, hi)`.
    pub fn apply_shift(&self, lo: usize, hi: usize, inverse: bool) -> Result<Self> {
        check_range(lo, hi, self.n_qubits)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            amps: kernels::shift(&self.amps, lo, hi, inverse),
        })
    }
}

pub(crate) fn check_range(lo: usize, hi: usize, n_qubits: usize) -> Result<()> {
    if lo >= hi || hi > n_qubits {
        return arg(format!(
            "qubit range [{lo}, {hi}) invalid for {n_qubits} qubits"
        ));
    }
    Ok(())
}

pub(crate) fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return arg(format!("length {len} is not a power of two >= 2"));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Amplitude-encoded real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedState {
    pub state: StateVector,
    /// Euclidean norm of the vector before normalization.
    pub norm: f64,
    /// Global phase removed so the stored amplitudes are real with the
    /// input's signs.
    pub phase_correction: Complex64,
}

impl EncodedState {
    /// `norm * amplitudes`, the vector that was encoded.
    pub fn decode(&self) -> Vec<f64> {
        let phase = self.phase_correction;
        self.state
            .amplitudes()
            .iter()
            .map(|a| (a * phase).re * self.norm)
            .collect()
    }
}

/// Encodes a real vector by direct amplitude injection.
pub fn encode(vector: &[f64]) -> Result<EncodedState> {
    qubits_for_len(vector.len())?;
    let norm = l2_norm(vector);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate(
            "cannot encode a zero or non-finite vector".into(),
        ));
    }
    let amps: Vec<f64> = vector.iter().map(|v| v / norm).collect();
    Ok(EncodedState {
        state: StateVector::from_real_unchecked(&amps),
        norm,
        phase_correction: Complex64::new(1.0, 0.0),
    })
}

/// Conjugate-linear inner product `<a|b>`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.n_qubits != b.n_qubits {
        return arg(format!(
            "qubit counts differ: {} vs {}",
            a.n_qubits, b.n_qubits
        ));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|<psi|b>|` obtained from the `X (x) I` expectation on the ancilla-extended
/// superpositions `(|0>|psi> + |1>|b>)/sqrt2` and `(|0>|psi> + |1>i|b>)/sqrt2`.
pub fn overlap_via_superposition(psi: &StateVector, b: &StateVector) -> Result<f64> {
    if psi.n_qubits != b.n_qubits {
        return arg(format!(
            "qubit counts differ: {} vs {}",
            psi.n_qubits, b.n_qubits
        ));
    }
    let n = psi.n_qubits;
    let ancilla_x = kernels::Masks {
        x: 1 << n,
        zero: 0,
        one: 0,
    };
    let joined = |phase: Complex64| -> Vec<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        psi.amps
            .iter()
            .map(|a| a * s)
            .chain(b.amps.iter().map(|a| a * phase * s))
            .collect()
    };
    let re = kernels::expect(&joined(Complex64::new(1.0, 0.0)), ancilla_x);
    let im_part = kernels::expect(&joined(Complex64::new(0.0, 1.0)), ancilla_x);
    Ok((Complex64::new(re, 0.0) - Complex64::new(0.0, 1.0) * im_part).norm())
}

/// `<phi|H|phi>`, or `<phi|S^dag H S|phi>` when the term carries a shift.
pub fn expect_term(state: &StateVector, term: &HamiltonianTerm) -> Result<f64> {
    if term.n_qubits() != state.n_qubits {
        return arg(format!(
            "term acts on {} qubits, state has {}",
            term.n_qubits(),
            state.n_qubits
        ));
    }
    Ok(term.expect_unweighted(&state.amps))
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
