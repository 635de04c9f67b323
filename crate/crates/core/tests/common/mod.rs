#![allow(dead_code)]

use dotphase::{ComplexAmp, GateMatrix, QuantumState};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Haar-ish random unitary by Gram-Schmidt on a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> GateMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= proj * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            entries[r * dim + c] = *z;
        }
    }
    GateMatrix::unitary(dim, entries).expect("orthonormal columns")
}

pub fn random_state(rng: &mut ChaCha8Rng, m: usize) -> QuantumState {
    let amps: Vec<Complex64> = (0..1usize << m).map(|_| random_complex(rng)).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    QuantumState::from_amplitudes(m, false, amps.into_iter().map(|z| z / norm).collect()).unwrap()
}

/// Dense row-major matrix over the whole register.
pub type Dense = Vec<Vec<ComplexAmp>>;

fn bit(index: usize, qubit: usize, m: usize) -> usize {
    (index >> (m - qubit)) & 1
}

/// Full 2^m × 2^m matrix of a gate acting on `qubits` (1-based, qubit 1 most
/// significant), built entry by entry from the definition of the tensor action.
pub fn embed(gate: &GateMatrix, qubits: &[usize], m: usize) -> Dense {
    let n = 1usize << m;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let spectators_match = (1..=m)
                .filter(|q| !qubits.contains(q))
                .all(|q| bit(i, q, m) == bit(j, q, m));
            if !spectators_match {
                continue;
            }
            let local = |idx: usize| qubits.iter().fold(0, |acc, &q| (acc << 1) | bit(idx, q, m));
            *entry = gate.get(local(i), local(j));
        }
    }
    out
}

pub fn dense_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn dense_apply(a: &Dense, v: &[ComplexAmp]) -> Vec<ComplexAmp> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn max_diff(a: &[ComplexAmp], b: &[ComplexAmp]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
