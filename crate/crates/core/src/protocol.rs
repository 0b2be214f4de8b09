//! The two parties and the messages between them.
//!
//! Alice holds qubit 0 of a shared Bell pair and knows the target
//! α|0…0⟩ + β|1…1⟩. She measures in {|ψ⟩, |ψ⊥⟩} built from the target and
//! sends Bob a short classical message. Bob holds qubit 1, applies the
//! correction the message names, then fans his qubit out onto m − 1 fresh
//! ancillas with CNOTs.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::statevector::{
    append_ancillas, apply_1q, basis_from_target, cnot_fanout, fidelity_mod_phase, make_bell,
    measure_in_basis, u1_gate, u2_gate, Outcome, OutcomeSelector, StateError, StateVector,
    INPUT_TOL, MAX_QUBITS,
};

/// A run counts as successful when Bob's fidelity reaches this.
pub const SUCCESS_FIDELITY: f64 = 1.0 - 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("target is not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NonNormalized(f64),
    #[error("target needs at least 2 qubits, got m = {0}")]
    BadQubitCount(usize),
    #[error("message {0:?} is not part of the protocol codec")]
    MalformedMessage(String),
    #[error("Bob's collapsed state must be a single qubit, got {0} qubits")]
    BadCollapsedState(usize),
    #[error(transparent)]
    State(#[from] StateError),
}

pub type ProtocolResult<T> = Result<T, ProtocolError>;

/// Tolerances applied to caller-supplied coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Allowed |α|² + |β|² − 1.
    pub normalization: f64,
    /// Slack for the Case A / Case B membership tests.
    pub case: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            normalization: INPUT_TOL,
            case: INPUT_TOL,
        }
    }
}

/// Which correction regime a target falls in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CaseTag {
    /// Only the ψ⊥ branch can be corrected.
    General,
    /// α and β both real.
    CaseA,
    /// α = 1/√2, β = e^{iθ}/√2.
    CaseB { theta: f64 },
}

impl CaseTag {
    pub fn is_special(&self) -> bool {
        !matches!(self, CaseTag::General)
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::General => f.write_str("General"),
            CaseTag::CaseA => f.write_str("CaseA"),
            CaseTag::CaseB { theta } => write!(f, "CaseB(theta={theta})"),
        }
    }
}

/// A canonical GHZ-class target: α ≥ 0 real, unit norm, m ≥ 2 qubits.
///
/// Only obtainable through [`canonicalize_target`], so every value upholds
/// its invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TargetSpec {
    alpha: f64,
    beta: Complex64,
    m: usize,
    case_tag: CaseTag,
}

impl TargetSpec {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn case_tag(&self) -> CaseTag {
        self.case_tag
    }

    /// Same coefficients on a different number of qubits.
    pub fn with_qubits(&self, m: usize) -> ProtocolResult<Self> {
        check_qubit_count(m)?;
        Ok(Self { m, ..*self })
    }
}

fn check_qubit_count(m: usize) -> ProtocolResult<()> {
    if !(2..=MAX_QUBITS).contains(&m) {
        return Err(ProtocolError::BadQubitCount(m));
    }
    Ok(())
}

pub fn canonicalize_target(
    alpha_raw: Complex64,
    beta_raw: Complex64,
    m: usize,
) -> ProtocolResult<TargetSpec> {
    canonicalize_target_with(alpha_raw, beta_raw, m, Tolerance::default())
}

/// Removes a global phase so α is real and non-negative, rescales to exact
/// unit norm and classifies the result.
///
/// When α is exactly zero the phase is taken from β instead, so |1…1⟩ always
/// comes out with β = 1.
pub fn canonicalize_target_with(
    alpha_raw: Complex64,
    beta_raw: Complex64,
    m: usize,
    tol: Tolerance,
) -> ProtocolResult<TargetSpec> {
    let norm_sqr = alpha_raw.norm_sqr() + beta_raw.norm_sqr();
    if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > tol.normalization {
        return Err(ProtocolError::NonNormalized(norm_sqr));
    }
    check_qubit_count(m)?;

    let phase = if alpha_raw.norm() > 0.0 {
        alpha_raw.conj() / alpha_raw.norm()
    } else {
        beta_raw.conj() / beta_raw.norm()
    };
    let norm = norm_sqr.sqrt();
    let alpha = (alpha_raw * phase).re.max(0.0) / norm;
    let beta = beta_raw * phase / norm;
    Ok(TargetSpec {
        alpha,
        beta,
        m,
        case_tag: classify_case_with(alpha, beta, tol.case),
    })
}

pub fn classify_case(alpha: f64, beta: Complex64) -> CaseTag {
    classify_case_with(alpha, beta, INPUT_TOL)
}

/// Case A wins when both tests pass (real equatorial targets).
pub fn classify_case_with(alpha: f64, beta: Complex64, tol: f64) -> CaseTag {
    if beta.im.abs() <= tol {
        CaseTag::CaseA
    } else if (alpha - FRAC_1_SQRT_2).abs() <= tol && (beta.norm() - FRAC_1_SQRT_2).abs() <= tol {
        CaseTag::CaseB { theta: beta.arg() }
    } else {
        CaseTag::General
    }
}

/// α|0…0⟩ + β|1…1⟩ on `target.m()` qubits.
pub fn build_target_state(target: &TargetSpec) -> StateVector {
    let dim = 1usize << target.m;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[0] = Complex64::new(target.alpha, 0.0);
    amps[dim - 1] = target.beta;
    StateVector::from_amplitudes(amps).expect("TargetSpec is normalized by construction")
}

/// Alice → Bob frame. The wire form is the bare bit string (`0`, `10`, `11`)
/// or the token `ABORT`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalMessage {
    Payload(Vec<u8>),
    Abort,
}

pub const ABORT_TOKEN: &str = "ABORT";

impl ClassicalMessage {
    /// Payload length in bits; an abort costs nothing.
    pub fn bit_count(&self) -> usize {
        match self {
            ClassicalMessage::Payload(bits) => bits.len(),
            ClassicalMessage::Abort => 0,
        }
    }

    pub fn is_well_formed(&self) -> bool {
        match self {
            ClassicalMessage::Payload(bits) => {
                matches!(bits.as_slice(), [0] | [1, 0] | [1, 1])
            }
            ClassicalMessage::Abort => true,
        }
    }
}

impl fmt::Display for ClassicalMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassicalMessage::Payload(bits) => bits.iter().try_for_each(|b| write!(f, "{b}")),
            ClassicalMessage::Abort => f.write_str(ABORT_TOKEN),
        }
    }
}

impl FromStr for ClassicalMessage {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let msg = match s {
            ABORT_TOKEN => ClassicalMessage::Abort,
            "0" => ClassicalMessage::Payload(vec![0]),
            "10" => ClassicalMessage::Payload(vec![1, 0]),
            "11" => ClassicalMessage::Payload(vec![1, 1]),
            other => return Err(ProtocolError::MalformedMessage(other.to_string())),
        };
        Ok(msg)
    }
}

impl Serialize for ClassicalMessage {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassicalMessage {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Outcome coding: ψ⊥ → "0"; ψ → "10" (Case A), "11" (Case B), or abort.
pub fn alice_encode(outcome: Outcome, case_tag: CaseTag) -> ClassicalMessage {
    match (outcome, case_tag) {
        (Outcome::PsiPerp, _) => ClassicalMessage::Payload(vec![0]),
        (Outcome::Psi, CaseTag::CaseA) => ClassicalMessage::Payload(vec![1, 0]),
        (Outcome::Psi, CaseTag::CaseB { .. }) => ClassicalMessage::Payload(vec![1, 1]),
        (Outcome::Psi, CaseTag::General) => ClassicalMessage::Abort,
    }
}

/// Bob's response to a message: optional correction on his qubit, then
/// fan-out onto `m − 1` ancillas. `None` on abort.
pub fn bob_act(
    message: &ClassicalMessage,
    collapsed: &StateVector,
    m: usize,
) -> ProtocolResult<Option<StateVector>> {
    let correction = match message {
        ClassicalMessage::Abort => return Ok(None),
        ClassicalMessage::Payload(bits) => match bits.as_slice() {
            [0] => Some(u1_gate()),
            // Case A: the collapsed qubit is already (α, β).
            [1, 0] => None,
            [1, 1] => Some(u2_gate()),
            _ => return Err(ProtocolError::MalformedMessage(message.to_string())),
        },
    };
    if collapsed.n_qubits() != 1 {
        return Err(ProtocolError::BadCollapsedState(collapsed.n_qubits()));
    }
    check_qubit_count(m)?;

    let corrected = match correction {
        Some(u) => apply_1q(collapsed, 0, &u)?,
        None => collapsed.clone(),
    };
    let register = append_ancillas(&corrected, m - 1)?;
    let targets: Vec<usize> = (1..m).collect();
    Ok(Some(cnot_fanout(&register, 0, &targets)?))
}

/// One protocol run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub outcome: Outcome,
    /// Born probability of `outcome`.
    pub probability: f64,
    pub message: ClassicalMessage,
    pub bob_state: Option<StateVector>,
    pub fidelity: f64,
    pub success: bool,
    pub bits_sent: usize,
}

pub fn run_trial(target: &TargetSpec, select: OutcomeSelector) -> ProtocolResult<TrialRecord> {
    let basis = basis_from_target(target.alpha, target.beta)?;
    let measured = measure_in_basis(&make_bell(), 0, &basis, select)?;
    let message = alice_encode(measured.outcome, target.case_tag);
    let bob_state = bob_act(&message, &measured.collapsed, target.m)?;
    let fidelity = match &bob_state {
        Some(state) => fidelity_mod_phase(state, &build_target_state(target))?,
        None => 0.0,
    };
    Ok(TrialRecord {
        outcome: measured.outcome,
        probability: measured.prob,
        bits_sent: message.bit_count(),
        message,
        bob_state,
        fidelity,
        success: fidelity >= SUCCESS_FIDELITY,
    })
}
