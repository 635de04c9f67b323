//! Dense state vectors over `m` charge qubits and an optional cavity mode.
//!
//! Basis ordering: qubit 1 is the most significant bit of a basis index,
//! qubit `m` the least significant qubit bit. When the cavity mode is present
//! it occupies the lowest bit, truncated to photon numbers {0, 1}.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Maximum entrywise deviation of `U†U` from the identity accepted for a gate.
pub const UNITARY_TOL: f64 = 1e-12;

/// Maximum deviation of the squared norm from 1 accepted for a state.
pub const NORM_TOL: f64 = 1e-10;

// Below this many amplitudes a single-qubit kernel runs on one thread.
const PAR_THRESHOLD: usize = 1 << 14;

/// A 2×2 or 4×4 complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    /// Builds a matrix from row-major entries. Only the shape is checked here;
    /// unitarity is checked when the gate is applied to a state.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::Validation(format!(
                "gate dimension must be 2 or 4, got {dim}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Validation("gate has non-finite entries".into()));
        }
        Ok(Self { dim, entries })
    }

    /// Like [`GateMatrix::from_entries`] but also rejects non-unitary input.
    pub fn unitary(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let g = Self::from_entries(dim, entries)?;
        g.check_unitary()?;
        Ok(g)
    }

    pub(crate) fn from_rows2(rows: [[Complex64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub(crate) fn from_rows4(rows: [[Complex64; 4]; 4]) -> Self {
        Self {
            dim: 4,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self { dim, entries }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let dim = diag.len();
        let mut g = Self::identity(dim);
        for (i, d) in diag.iter().enumerate() {
            g.entries[i * dim + i] = *d;
        }
        g
    }

    /// The textbook Hadamard `(1/√2)[[1, 1], [1, −1]]`.
    pub fn hadamard() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::from_rows2([[s, s], [s, -s]])
    }

    /// Phase gate `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)])
    }

    /// CNOT on the ordered pair (control, target).
    pub fn cnot() -> Self {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        Self::from_rows4([[l, o, o, o], [o, l, o, o], [o, o, o, l], [o, o, l, o]])
    }

    /// Controlled phase `diag(1, 1, 1, e^{iθ})`.
    pub fn controlled_phase(theta: f64) -> Self {
        let l = Complex64::new(1.0, 0.0);
        Self::diagonal(&[l, l, l, Complex64::from_polar(1.0, theta)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[r * d + c] = (0..d).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
            }
        }
        Ok(GateMatrix { dim: d, entries })
    }

    pub fn adjoint(&self) -> GateMatrix {
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                entries[c * d + r] = self.get(r, c).conj();
            }
        }
        GateMatrix { dim: d, entries }
    }

    /// `self^exponent` by repeated squaring.
    pub fn pow(&self, mut exponent: u64) -> GateMatrix {
        let mut result = GateMatrix::identity(self.dim);
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.matmul(&base).expect("same dimension");
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.matmul(&base).expect("same dimension");
            }
        }
        result
    }

    /// `trace(self† · other)`.
    pub fn trace_inner(&self, other: &GateMatrix) -> Result<Complex64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in 0..d {
                let z: Complex64 = (0..d).map(|k| self.get(k, r).conj() * self.get(k, c)).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((z - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() <= UNITARY_TOL
    }

    pub fn check_unitary(&self) -> Result<()> {
        let err = self.unitarity_error();
        if err > UNITARY_TOL {
            return Err(Error::Validation(format!(
                "gate is not unitary: max |U†U - I| = {err:.3e}"
            )));
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &GateMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Outcome of measuring every qubit of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    /// One entry (0 or 1) per qubit, qubit 1 first.
    pub bits: Vec<u8>,
    /// Post-measurement state. The cavity factor keeps its conditional amplitudes.
    pub collapsed: QuantumState,
    pub probability: f64,
    pub seed_used: u64,
    pub generator: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    has_cavity: bool,
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// `|0…0⟩` (with the cavity in vacuum when present).
    pub fn new(num_qubits: usize, with_cavity: bool) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {num_qubits}"
            )));
        }
        let len = 1usize << (num_qubits + usize::from(with_cavity));
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            has_cavity: with_cavity,
            amps,
        })
    }

    /// Wraps explicit amplitudes, checking length, finiteness and normalisation.
    pub fn from_amplitudes(
        num_qubits: usize,
        has_cavity: bool,
        amps: Vec<Complex64>,
    ) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {num_qubits}"
            )));
        }
        let expected = 1usize << (num_qubits + usize::from(has_cavity));
        if amps.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amps.len(),
            });
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("amplitudes must be finite".into()));
        }
        let state = Self {
            num_qubits,
            has_cavity,
            amps,
        };
        state.check_normalized()?;
        Ok(state)
    }

    /// Computational basis state with the given register index (cavity in vacuum).
    pub fn basis(num_qubits: usize, with_cavity: bool, index: usize) -> Result<Self> {
        let mut s = Self::new(num_qubits, with_cavity)?;
        if index >= 1 << num_qubits {
            return Err(Error::OutOfRange(format!(
                "basis index {index} needs more than {num_qubits} qubits"
            )));
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index << usize::from(with_cavity)] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn has_cavity(&self) -> bool {
        self.has_cavity
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Numerical(format!(
                "state norm² = {n:.15} deviates from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(())
    }

    fn check_qubit(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.num_qubits {
            return Err(Error::IndexOutOfRange {
                index,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    // Bit position of qubit `index` (1-based) within a basis index.
    #[inline]
    fn shift_of(&self, index: usize) -> usize {
        self.num_qubits - index + usize::from(self.has_cavity)
    }

    /// Applies a 2×2 unitary to qubit `qubit` (1-based).
    pub fn apply_1q(&mut self, qubit: usize, gate: &GateMatrix) -> Result<()> {
        self.check_qubit(qubit)?;
        if gate.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: gate.dim(),
            });
        }
        gate.check_unitary()?;
        let stride = 1usize << self.shift_of(qubit);
        let (g00, g01, g10, g11) = (
            gate.get(0, 0),
            gate.get(0, 1),
            gate.get(1, 0),
            gate.get(1, 1),
        );
        let kernel = |block: &mut [Complex64]| {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = g00 * x + g01 * y;
                *b = g10 * x + g11 * y;
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_chunks_exact_mut(2 * stride).for_each(kernel);
        } else {
            self.amps.chunks_exact_mut(2 * stride).for_each(kernel);
        }
        Ok(())
    }

    /// Applies a 4×4 unitary to the ordered pair (`control`, `target`), whose
    /// local basis is `|control target⟩` = {00, 01, 10, 11}.
    pub fn apply_2q(&mut self, control: usize, target: usize, gate: &GateMatrix) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Validation(format!(
                "control and target must differ (both {control})"
            )));
        }
        let (hi, lo) = (self.shift_of(control), self.shift_of(target));
        self.apply_pair(hi, lo, gate)
    }

    /// Applies a 4×4 unitary to (qubit ⊗ cavity) with local basis
    /// {|g0⟩, |g1⟩, |e0⟩, |e1⟩}.
    pub fn apply_qubit_cavity(&mut self, qubit: usize, gate: &GateMatrix) -> Result<()> {
        if !self.has_cavity {
            return Err(Error::Configuration(
                "qubit-cavity gate requires a state with a cavity mode".into(),
            ));
        }
        self.check_qubit(qubit)?;
        let hi = self.shift_of(qubit);
        self.apply_pair(hi, 0, gate)
    }

    // `hi` is the bit of the first tensor factor, `lo` the bit of the second.
    fn apply_pair(&mut self, hi: usize, lo: usize, gate: &GateMatrix) -> Result<()> {
        if gate.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: gate.dim(),
            });
        }
        gate.check_unitary()?;
        let (mask_hi, mask_lo) = (1usize << hi, 1usize << lo);
        let (small, large) = if hi < lo { (hi, lo) } else { (lo, hi) };
        let g = gate.entries();
        let quarter = self.amps.len() >> 2;
        for k in 0..quarter {
            let base = insert_zero_bit(insert_zero_bit(k, small), large);
            let idx = [
                base,
                base | mask_lo,
                base | mask_hi,
                base | mask_hi | mask_lo,
            ];
            let v = idx.map(|i| self.amps[i]);
            for (r, &i) in idx.iter().enumerate() {
                let row = &g[4 * r..4 * r + 4];
                self.amps[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
        Ok(())
    }

    /// Born-rule probabilities over the full basis (cavity included).
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Probabilities over register indices only, summing out the cavity.
    pub fn register_probabilities(&self) -> Vec<f64> {
        if self.has_cavity {
            self.amps
                .chunks_exact(2)
                .map(|p| p[0].norm_sqr() + p[1].norm_sqr())
                .collect()
        } else {
            self.probabilities()
        }
    }

    /// Measures every qubit using a stream seeded by `seed`.
    pub fn measure_all(&self, seed: u64) -> MeasurementRecord {
        let probs = self.register_probabilities();
        let u: f64 = rng::seeded(seed).gen();
        let outcome = sample_index(&probs, u);
        let bits = (1..=self.num_qubits)
            .map(|q| ((outcome >> (self.num_qubits - q)) & 1) as u8)
            .collect();

        let cav = usize::from(self.has_cavity);
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let start = outcome << cav;
        let end = start + (1 << cav);
        let norm = probs[outcome].sqrt();
        for i in start..end {
            amps[i] = self.amps[i] / norm;
        }
        MeasurementRecord {
            bits,
            collapsed: QuantumState {
                num_qubits: self.num_qubits,
                has_cavity: self.has_cavity,
                amps,
            },
            probability: probs[outcome],
            seed_used: seed,
            generator: rng::GENERATOR_ID,
        }
    }

    /// Inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &QuantumState) -> Result<Complex64> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                found: other.amps.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product `self ⊗ |bit⟩` with one more qubit appended after the
    /// last register qubit. Not defined for states carrying a cavity.
    pub fn append_qubit(&self, bit: u8) -> Result<QuantumState> {
        if self.has_cavity {
            return Err(Error::Configuration(
                "cannot append a qubit to a state with a cavity mode".into(),
            ));
        }
        if self.num_qubits + 1 > MAX_QUBITS {
            return Err(Error::Capacity(format!("more than {MAX_QUBITS} qubits")));
        }
        let zero = Complex64::new(0.0, 0.0);
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| if bit == 0 { [a, zero] } else { [zero, a] })
            .collect();
        Ok(QuantumState {
            num_qubits: self.num_qubits + 1,
            has_cavity: false,
            amps,
        })
    }
}

/// Inverse-CDF draw: the first index whose cumulative probability exceeds `u`.
/// Zero-probability entries are never returned.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    CumulativeTable::new(probs).sample(u)
}

/// Inverse-CDF lookup table for repeated sampling from one distribution.
///
/// Prefix sums are accumulated in index order, so `sample` returns exactly
/// what a linear scan would.
pub(crate) struct CumulativeTable {
    cumulative: Vec<f64>,
    total: f64,
    last_nonzero: usize,
}

impl CumulativeTable {
    pub(crate) fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        let cumulative = probs
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                if p > 0.0 {
                    acc += p;
                    last_nonzero = i;
                }
                acc
            })
            .collect();
        Self {
            cumulative,
            total: probs.iter().sum(),
            last_nonzero,
        }
    }

    /// First index whose running sum exceeds `u · total`.
    pub(crate) fn sample(&self, u: f64) -> usize {
        let target = u * self.total;
        let i = self.cumulative.partition_point(|&c| c <= target);
        if i < self.cumulative.len() {
            i
        } else {
            self.last_nonzero
        }
    }
}

// Inserts a 0 at bit position `pos`, shifting higher bits up.
#[inline]
fn insert_zero_bit(value: usize, pos: usize) -> usize {
    let low = value & ((1 << pos) - 1);
    ((value >> pos) << (pos + 1)) | low
}
