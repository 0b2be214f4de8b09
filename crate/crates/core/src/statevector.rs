//! Minimal dense statevector engine.
//!
//! Amplitude index `i` is read as a big-endian bitstring: qubit 0 is the most
//! significant bit. All operations take `&StateVector` and return a new value.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Tolerance for identities that should hold to machine precision.
pub const INTERNAL_TOL: f64 = 1e-12;
/// Tolerance for normalization of caller-supplied coefficients.
pub const INPUT_TOL: f64 = 1e-9;
/// Unitarity tolerance used when a gate matrix is constructed.
pub const UNITARY_TOL: f64 = 1e-10;
/// Forcing a branch whose Born probability is below this is an error.
pub const ZERO_BRANCH_TOL: f64 = 1e-14;

/// Register sizes beyond this are refused; dense vectors only.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("target coefficients are not normalized: |alpha|^2 + |beta|^2 = {norm_sqr}")]
    NonNormalizedTarget { norm_sqr: f64 },
    #[error("alpha must be real and non-negative, got {0}")]
    NegativeAlpha(f64),
    #[error("forced branch has probability {0:e}, below the zero-branch threshold")]
    ZeroProbabilityBranch(f64),
    #[error("matrix is not unitary (max |U^dag U - I| = {0:e})")]
    NonUnitary(f64),
    #[error("control and target are the same qubit ({0})")]
    SameQubit(usize),
    #[error("qubit {0} appears more than once in the fan-out target list")]
    DuplicateTarget(usize),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("amplitude vector length {0} is not a power of two >= 2")]
    InvalidLength(usize),
    #[error("register of {0} qubits exceeds the dense limit")]
    TooManyQubits(usize),
    #[error("amplitudes contain a non-finite value")]
    NonFinite,
    #[error("state is not normalized: squared norm {0}")]
    NonNormalized(f64),
    #[error("measurement would leave an empty register")]
    EmptyRegister,
    #[error("basis vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),
}

pub type StateResult<T> = Result<T, StateError>;

/// Pure state of `n_qubits` qubits as 2^n complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> StateResult<Self> {
        if n_qubits == 0 {
            return Err(StateError::InvalidLength(1));
        }
        if n_qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(n_qubits));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> StateResult<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= s.amps.len() {
            return Err(StateError::InvalidLength(index));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Validates length, finiteness and normalization (within [`INPUT_TOL`]),
    /// then rescales to unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> StateResult<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(StateError::InvalidLength(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(n_qubits));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(StateError::NonFinite);
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > INPUT_TOL {
            return Err(StateError::NonNormalized(norm_sqr));
        }
        Ok(Self::renormalized(n_qubits, amps))
    }

    fn renormalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Self {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> StateResult<Complex64> {
        self.same_dims(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every amplitude by a unit-modulus phase.
    pub fn with_global_phase(&self, phase: Complex64) -> StateResult<Self> {
        if (phase.norm() - 1.0).abs() > INPUT_TOL {
            return Err(StateError::NonNormalized(phase.norm_sqr()));
        }
        let amps = self.amps.iter().map(|a| a * phase).collect();
        Ok(Self::renormalized(self.n_qubits, amps))
    }

    /// `self ⊗ other`, with `self` occupying the leading (most significant) qubits.
    pub fn tensor(&self, other: &StateVector) -> StateResult<Self> {
        let n_qubits = self.n_qubits + other.n_qubits;
        if n_qubits > MAX_QUBITS {
            return Err(StateError::TooManyQubits(n_qubits));
        }
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(Self { n_qubits, amps })
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_deviation(&self, other: &StateVector) -> StateResult<f64> {
        self.same_dims(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn same_dims(&self, other: &StateVector) -> StateResult<()> {
        if self.n_qubits != other.n_qubits {
            return Err(StateError::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> StateResult<()> {
        if qubit >= self.n_qubits {
            return Err(StateError::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    /// Bit mask of `qubit` within an amplitude index.
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < INTERNAL_TOL {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "({:.8}{:+.8}i)|{:0width$b}⟩",
                a.re,
                a.im,
                i,
                width = self.n_qubits
            )?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct StateVectorRepr {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        StateVectorRepr {
            n_qubits: self.n_qubits,
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = StateVectorRepr::deserialize(deserializer)?;
        let amps: Vec<Complex64> = repr
            .amplitudes
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let state = StateVector::from_amplitudes(amps).map_err(serde::de::Error::custom)?;
        if state.n_qubits != repr.n_qubits {
            return Err(serde::de::Error::custom(format!(
                "n_qubits {} does not match {} amplitudes",
                repr.n_qubits,
                state.amps.len()
            )));
        }
        Ok(state)
    }
}

/// Checked 2×2 unitary, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2([[Complex64; 2]; 2]);

impl Unitary2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> StateResult<Self> {
        let dev = unitarity_defect(&m.iter().flatten().copied().collect::<Vec<_>>(), 2);
        if dev > UNITARY_TOL {
            return Err(StateError::NonUnitary(dev));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self::real([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn hadamard() -> Self {
        Self::real([
            [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        ])
    }

    fn real(m: [[f64; 2]; 2]) -> Self {
        Self(m.map(|row| row.map(|x| Complex64::new(x, 0.0))))
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }
}

/// U1 = |1⟩⟨0| − |0⟩⟨1|; maps (β, −α) back to (α, β).
pub fn u1_gate() -> Unitary2 {
    Unitary2::real([[0.0, -1.0], [1.0, 0.0]])
}

/// U2 = |0⟩⟨1| + |1⟩⟨0|, the bit flip.
pub fn u2_gate() -> Unitary2 {
    Unitary2::real([[0.0, 1.0], [1.0, 0.0]])
}

/// Checked 4×4 unitary, row-major, acting on an ordered qubit pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary4([[Complex64; 4]; 4]);

impl Unitary4 {
    pub fn new(m: [[Complex64; 4]; 4]) -> StateResult<Self> {
        let dev = unitarity_defect(&m.iter().flatten().copied().collect::<Vec<_>>(), 4);
        if dev > UNITARY_TOL {
            return Err(StateError::NonUnitary(dev));
        }
        Ok(Self(m))
    }

    /// CNOT with the first qubit of the pair as control.
    pub fn cnot() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        m[0][0] = one;
        m[1][1] = one;
        m[2][3] = one;
        m[3][2] = one;
        Self(m)
    }

    pub fn matrix(&self) -> &[[Complex64; 4]; 4] {
        &self.0
    }
}

/// max |(U†U − I)_ij| for a row-major `dim`×`dim` matrix.
fn unitarity_defect(m: &[Complex64], dim: usize) -> f64 {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let dot: Complex64 = (0..dim)
                .map(|k| m[k * dim + i].conj() * m[k * dim + j])
                .sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - expected).norm());
        }
    }
    worst
}

/// Outcome of a two-outcome projective measurement in a [`MeasurementBasis`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Psi,
    PsiPerp,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Psi, Outcome::PsiPerp];
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Psi => "Psi",
            Outcome::PsiPerp => "PsiPerp",
        })
    }
}

/// How a measurement picks its branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OutcomeSelector {
    /// Take this branch regardless of its probability (unless it is zero).
    Forced(Outcome),
    /// A uniform draw in [0, 1): `Psi` when the draw falls below P(Psi).
    Sampled(f64),
}

/// Orthonormal single-qubit basis {|ψ⟩, |ψ⊥⟩}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementBasis {
    psi: [Complex64; 2],
    psi_perp: [Complex64; 2],
}

impl MeasurementBasis {
    pub fn new(psi: [Complex64; 2], psi_perp: [Complex64; 2]) -> StateResult<Self> {
        let n0 = (psi[0].norm_sqr() + psi[1].norm_sqr() - 1.0).abs();
        let n1 = (psi_perp[0].norm_sqr() + psi_perp[1].norm_sqr() - 1.0).abs();
        let overlap = (psi[0].conj() * psi_perp[0] + psi[1].conj() * psi_perp[1]).norm();
        let dev = n0.max(n1).max(overlap);
        if dev.is_nan() || dev > INTERNAL_TOL {
            return Err(StateError::NotOrthonormal(dev));
        }
        Ok(Self { psi, psi_perp })
    }

    /// {|0⟩, |1⟩}, with |0⟩ playing the role of ψ.
    pub fn computational() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            psi: [one, zero],
            psi_perp: [zero, one],
        }
    }

    pub fn psi(&self) -> [Complex64; 2] {
        self.psi
    }

    pub fn psi_perp(&self) -> [Complex64; 2] {
        self.psi_perp
    }

    pub fn vector(&self, outcome: Outcome) -> [Complex64; 2] {
        match outcome {
            Outcome::Psi => self.psi,
            Outcome::PsiPerp => self.psi_perp,
        }
    }
}

/// Result of [`measure_in_basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub outcome: Outcome,
    pub prob: f64,
    /// State of the unmeasured qubits, renormalized.
    pub collapsed: StateVector,
}

/// (|00⟩ + |11⟩)/√2.
pub fn make_bell() -> StateVector {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    StateVector {
        n_qubits: 2,
        amps: vec![h, z, z, h],
    }
}

/// Basis with ψ = (α, β) and ψ⊥ = (β*, −α). `alpha` must already be real and
/// non-negative.
pub fn basis_from_target(alpha: f64, beta: Complex64) -> StateResult<MeasurementBasis> {
    let norm_sqr = alpha * alpha + beta.norm_sqr();
    if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > INPUT_TOL {
        return Err(StateError::NonNormalizedTarget { norm_sqr });
    }
    if alpha < 0.0 {
        return Err(StateError::NegativeAlpha(alpha));
    }
    let norm = norm_sqr.sqrt();
    let (a, b) = (Complex64::new(alpha / norm, 0.0), beta / norm);
    MeasurementBasis::new([a, b], [b.conj(), -a])
}

/// Projects `qubit` onto the selected basis vector and removes it from the
/// register.
pub fn measure_in_basis(
    state: &StateVector,
    qubit: usize,
    basis: &MeasurementBasis,
    select: OutcomeSelector,
) -> StateResult<Measurement> {
    state.check_qubit(qubit)?;
    if state.n_qubits == 1 {
        return Err(StateError::EmptyRegister);
    }
    let project = |outcome: Outcome| -> Vec<Complex64> {
        let v = basis.vector(outcome);
        let (c0, c1) = (v[0].conj(), v[1].conj());
        let low_bits = state.n_qubits - 1 - qubit;
        let low_mask = (1usize << low_bits) - 1;
        let bit = state.mask(qubit);
        (0..state.amps.len() / 2)
            .map(|r| {
                let i0 = ((r & !low_mask) << 1) | (r & low_mask);
                c0 * state.amps[i0] + c1 * state.amps[i0 | bit]
            })
            .collect()
    };
    let prob_of = |amps: &[Complex64]| amps.iter().map(|a| a.norm_sqr()).sum::<f64>();

    let (outcome, amps, prob) = match select {
        OutcomeSelector::Forced(outcome) => {
            let amps = project(outcome);
            let prob = prob_of(&amps);
            if prob < ZERO_BRANCH_TOL {
                return Err(StateError::ZeroProbabilityBranch(prob));
            }
            (outcome, amps, prob)
        }
        OutcomeSelector::Sampled(u) => {
            let psi = project(Outcome::Psi);
            let p_psi = prob_of(&psi);
            if u < p_psi && p_psi >= ZERO_BRANCH_TOL {
                (Outcome::Psi, psi, p_psi)
            } else {
                let perp = project(Outcome::PsiPerp);
                let p = prob_of(&perp);
                (Outcome::PsiPerp, perp, p)
            }
        }
    };
    Ok(Measurement {
        outcome,
        prob,
        collapsed: StateVector::renormalized(state.n_qubits - 1, amps),
    })
}

pub fn apply_1q(state: &StateVector, qubit: usize, u: &Unitary2) -> StateResult<StateVector> {
    state.check_qubit(qubit)?;
    let bit = state.mask(qubit);
    let m = u.matrix();
    let mut amps = state.amps.clone();
    for i0 in (0..amps.len()).filter(|i| i & bit == 0) {
        let (a0, a1) = (state.amps[i0], state.amps[i0 | bit]);
        amps[i0] = m[0][0] * a0 + m[0][1] * a1;
        amps[i0 | bit] = m[1][0] * a0 + m[1][1] * a1;
    }
    Ok(StateVector {
        n_qubits: state.n_qubits,
        amps,
    })
}

/// Applies `u` to the ordered pair (`first`, `second`); `first` is the more
/// significant qubit of the 4×4 block.
pub fn apply_2q(
    state: &StateVector,
    first: usize,
    second: usize,
    u: &Unitary4,
) -> StateResult<StateVector> {
    state.check_qubit(first)?;
    state.check_qubit(second)?;
    if first == second {
        return Err(StateError::SameQubit(first));
    }
    let (b1, b2) = (state.mask(first), state.mask(second));
    let m = u.matrix();
    let mut amps = state.amps.clone();
    for base in (0..amps.len()).filter(|i| i & (b1 | b2) == 0) {
        let idx = [base, base | b2, base | b1, base | b1 | b2];
        let input = idx.map(|i| state.amps[i]);
        for (row, &out) in idx.iter().enumerate() {
            amps[out] = (0..4).map(|k| m[row][k] * input[k]).sum();
        }
    }
    Ok(StateVector {
        n_qubits: state.n_qubits,
        amps,
    })
}

pub fn apply_cnot(state: &StateVector, control: usize, target: usize) -> StateResult<StateVector> {
    state.check_qubit(control)?;
    state.check_qubit(target)?;
    if control == target {
        return Err(StateError::SameQubit(control));
    }
    let (c, t) = (state.mask(control), state.mask(target));
    let amps = (0..state.amps.len())
        .map(|i| state.amps[if i & c != 0 { i ^ t } else { i }])
        .collect();
    Ok(StateVector {
        n_qubits: state.n_qubits,
        amps,
    })
}

/// `state ⊗ |0⟩^k`.
pub fn append_ancillas(state: &StateVector, k: usize) -> StateResult<StateVector> {
    if k == 0 {
        return Ok(state.clone());
    }
    state.tensor(&StateVector::zero(k)?)
}

/// Sequential CNOTs from `control` onto each of `targets`, in order.
pub fn cnot_fanout(
    state: &StateVector,
    control: usize,
    targets: &[usize],
) -> StateResult<StateVector> {
    for (i, &t) in targets.iter().enumerate() {
        if t == control {
            return Err(StateError::SameQubit(t));
        }
        if targets[..i].contains(&t) {
            return Err(StateError::DuplicateTarget(t));
        }
    }
    targets
        .iter()
        .try_fold(state.clone(), |s, &t| apply_cnot(&s, control, t))
}

/// |⟨a|b⟩|², blind to global phase.
pub fn fidelity_mod_phase(a: &StateVector, b: &StateVector) -> StateResult<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Rebuilds the Bell pair from its expansion over {ψ, ψ⊥} on the first qubit
/// and returns the largest elementwise deviation from [`make_bell`].
pub fn check_decomposition(alpha: f64, beta: Complex64) -> f64 {
    let a = Complex64::new(alpha, 0.0);
    let psi = [a, beta];
    let psi_perp = [beta.conj(), -a];
    let bob_if_perp = [beta, -a];
    let bob_if_psi = [a, beta.conj()];
    let bell = make_bell();
    (0..4)
        .map(|i| {
            let (hi, lo) = (i >> 1, i & 1);
            let rebuilt =
                (psi_perp[hi] * bob_if_perp[lo] + psi[hi] * bob_if_psi[lo]) * FRAC_1_SQRT_2;
            (rebuilt - bell.amps[i]).norm()
        })
        .fold(0.0, f64::max)
}
