//! Test-only oracles and target generators. Nothing here calls into the gate
//! kernels under test.
#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsp_core::{canonicalize_target, CaseTag, TargetSpec};

pub type Matrix = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn small(m: [[f64; 2]; 2]) -> Matrix {
    m.iter()
        .map(|row| row.iter().map(|&x| c(x, 0.0)).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let (ca, cb) = (a[0].len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_vec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// CNOT on `n` qubits as |0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ X_t, assembled from 2×2
/// factors with qubit 0 leftmost.
pub fn dense_cnot(n: usize, control: usize, target: usize) -> Matrix {
    let id = small([[1.0, 0.0], [0.0, 1.0]]);
    let p0 = small([[1.0, 0.0], [0.0, 0.0]]);
    let p1 = small([[0.0, 0.0], [0.0, 1.0]]);
    let x = small([[0.0, 1.0], [1.0, 0.0]]);
    let chain =
        |factor: &dyn Fn(usize) -> Matrix| (1..n).fold(factor(0), |acc, q| kron(&acc, &factor(q)));
    let off = chain(&|q| if q == control { p0.clone() } else { id.clone() });
    let on = chain(&|q| {
        if q == control {
            p1.clone()
        } else if q == target {
            x.clone()
        } else {
            id.clone()
        }
    });
    add(&off, &on)
}

/// (α|0⟩ + β|1⟩) ⊗ |0⟩^(m−1) as a Kronecker product of column vectors.
pub fn seed_register(alpha: Complex64, beta: Complex64, m: usize) -> Vec<Complex64> {
    let zero = [c(1.0, 0.0), c(0.0, 0.0)];
    (1..m).fold(vec![alpha, beta], |acc, _| {
        acc.iter()
            .flat_map(|a| zero.iter().map(move |z| a * z))
            .collect()
    })
}

pub fn max_dev(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Uniformly spread normalized pair with α ≥ 0 and arbitrary β phase.
pub fn random_pair(rng: &mut impl Rng) -> (f64, Complex64) {
    let t: f64 = rng.random_range(0.0..=FRAC_PI_2);
    let phi: f64 = rng.random_range(-PI..PI);
    (t.cos(), Complex64::from_polar(t.sin(), phi))
}

pub fn random_case_a(rng: &mut impl Rng, m: usize) -> TargetSpec {
    let t: f64 = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
    let spec = canonicalize_target(c(t.cos(), 0.0), c(t.sin(), 0.0), m).unwrap();
    assert_eq!(spec.case_tag(), CaseTag::CaseA);
    spec
}

pub fn random_case_b(rng: &mut impl Rng, m: usize) -> TargetSpec {
    // Keep clear of θ ∈ {0, π}, which classify as Case A.
    let mut theta: f64 = rng.random_range(0.05..PI - 0.05);
    if rng.random_bool(0.5) {
        theta = -theta;
    }
    let spec = canonicalize_target(
        c(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, theta),
        m,
    )
    .unwrap();
    assert!(matches!(spec.case_tag(), CaseTag::CaseB { .. }));
    spec
}

/// Complex β with |Im β| well above the case tolerance and α away from 1/√2.
pub fn random_general(rng: &mut impl Rng, m: usize) -> TargetSpec {
    loop {
        let (alpha, beta) = random_pair(rng);
        if beta.im.abs() < 1e-3 || (alpha - FRAC_1_SQRT_2).abs() < 1e-3 {
            continue;
        }
        let spec = canonicalize_target(c(alpha, 0.0), beta, m).unwrap();
        assert_eq!(spec.case_tag(), CaseTag::General);
        return spec;
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
