//! Phase estimation on a register of `m` charge qubits.
//!
//! The protocol runs in three stages:
//!
//! 1. Every register qubit gets a Hadamard; qubit `j` then receives the phase
//!    gate of angle `φ` applied `2^(m−j)` times, leaving
//!    `2^(−m/2) Σ_k e^{iφk} |k⟩`.
//! 2. The inverse QFT: Hadamard on qubit 1, then for each qubit `r = 2..m` the
//!    five-gate controlled-phase sequence with every earlier qubit `s`, and a
//!    Hadamard on `r`.
//! 3. All qubits are measured; the bits are read in reverse order to give the
//!    binary fraction `0.φ₁…φ_m` of the phase.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{hadamard_pulse_params, phase_gate_pulse_params, single_pulse_unitary};
use crate::rng;
use crate::statevector::{CumulativeTable, GateMatrix, QuantumState, NORM_TOL};

/// Largest register accepted by [`QpeConfig`].
pub const MAX_REGISTER: usize = 20;

/// How single-qubit gates are realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateMode {
    /// Textbook Hadamard and `diag(1, e^{iθ})` phase gates.
    #[default]
    Ideal,
    /// Laser-pulse unitaries at the nominal pulse settings.
    PulseLiteral,
}

impl GateMode {
    pub fn hadamard(self) -> GateMatrix {
        match self {
            GateMode::Ideal => GateMatrix::hadamard(),
            GateMode::PulseLiteral => single_pulse_unitary(hadamard_pulse_params()),
        }
    }

    pub fn phase(self, theta: f64) -> GateMatrix {
        match self {
            GateMode::Ideal => GateMatrix::phase(theta),
            GateMode::PulseLiteral => single_pulse_unitary(phase_gate_pulse_params(theta)),
        }
    }

    // Phase gate applied `times` times in a row.
    fn repeated_phase(self, theta: f64, times: u64) -> GateMatrix {
        match self {
            // Exact: the exponent is a power of two, so times·θ is exact too.
            GateMode::Ideal => GateMatrix::phase(times as f64 * theta),
            GateMode::PulseLiteral => self.phase(theta).pow(times),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    pub m: usize,
    pub n: usize,
    pub true_phase: f64,
    pub gate_mode: GateMode,
    pub include_target_qubit: bool,
    /// 0 selects the exact distribution instead of sampling.
    pub shots: u64,
    pub seed: u64,
}

impl QpeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > MAX_REGISTER {
            return Err(Error::Validation(format!(
                "register size m must be in 1..={MAX_REGISTER}, got {}",
                self.m
            )));
        }
        if self.include_target_qubit && self.m + 1 > MAX_REGISTER {
            return Err(Error::Validation(format!(
                "register plus target qubit exceeds {MAX_REGISTER} qubits"
            )));
        }
        if self.n == 0 || self.n > self.m {
            return Err(Error::Validation(format!(
                "accuracy bits n must be in 1..=m ({}), got {}",
                self.m, self.n
            )));
        }
        check_phase(self.true_phase)
    }
}

fn check_phase(phi: f64) -> Result<()> {
    if !(phi.is_finite() && phi > 0.0 && phi <= TAU) {
        return Err(Error::Validation(format!(
            "phase must lie in (0, 2π], got {phi}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    /// Readout bits `φ₁ … φ_m` (already reversed from register order).
    pub bits: Vec<u8>,
    /// `j = Σ φ_i 2^(m−i)`.
    pub readout: usize,
    /// `2π · j / 2^m`.
    pub estimated_phase: f64,
    /// `estimated_phase / true_phase × 100`.
    pub eta_percent: f64,
}

/// Readout statistics indexed by the readout integer `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub m: usize,
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Most probable readout; the smallest `j` wins ties.
    pub fn most_likely(&self) -> usize {
        let mut best = 0;
        for (j, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = j;
            }
        }
        best
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn check(&self) -> Result<()> {
        let total = self.total();
        if self.probs.iter().any(|p| p.is_nan() || *p < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!(
                "outcome distribution sums to {total}"
            )));
        }
        Ok(())
    }

    /// Probability that the readout lies strictly within `1/2^n` of the true
    /// phase fraction, measured around the circle.
    pub fn success_mass(&self, n: usize, phi: f64) -> f64 {
        let target = phi / TAU;
        let radius = 0.5f64.powi(n as i32);
        let size = self.probs.len() as f64;
        self.probs
            .iter()
            .enumerate()
            .filter(|(j, _)| circular_distance(*j as f64 / size, target) < radius)
            .map(|(_, p)| p)
            .sum()
    }

    /// Total-variation distance to another distribution of the same size.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> Result<f64> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                found: other.probs.len(),
            });
        }
        Ok(0.5
            * self
                .probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>())
    }
}

/// Distance between two fractions of a turn, in `[0, 1/2]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Reverses the low `bits` bits of `value`.
pub fn bit_reverse(value: usize, bits: usize) -> usize {
    if bits == 0 {
        return 0;
    }
    value.reverse_bits() >> (usize::BITS as usize - bits)
}

/// `|0…0⟩` with a Hadamard on every qubit.
pub fn prepare_register(m: usize, mode: GateMode) -> Result<QuantumState> {
    let mut state = QuantumState::new(m, false)?;
    let h = mode.hadamard();
    for q in 1..=m {
        state.apply_1q(q, &h)?;
    }
    Ok(state)
}

/// Applies the phase gate of angle `phi` to qubit `j` of the first `m`
/// register qubits `2^(m−j)` times.
pub fn apply_phase_kicks(
    state: &mut QuantumState,
    phi: f64,
    m: usize,
    mode: GateMode,
) -> Result<()> {
    if m > state.num_qubits() {
        return Err(Error::IndexOutOfRange {
            index: m,
            num_qubits: state.num_qubits(),
        });
    }
    for j in 1..=m {
        let times = 1u64 << (m - j);
        state.apply_1q(j, &mode.repeated_phase(phi, times))?;
    }
    Ok(())
}

/// Which member of a (control, target) pair a gate acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairQubit {
    Control,
    Target,
}

/// One element of a controlled-phase gate sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SequenceGate {
    /// `diag(1, e^{i·angle})` on one qubit of the pair.
    Phase { on: PairQubit, angle: f64 },
    /// CNOT from control to target.
    Cnot,
}

/// The five gates, in time order, whose product is `diag(1, 1, 1, e^{−2iθ})`:
/// `U_c(−θ)`, CNOT, `U_t(θ)`, CNOT, `U_t(−θ)`.
pub fn controlled_phase_sequence(theta: f64) -> [SequenceGate; 5] {
    use PairQubit::*;
    [
        SequenceGate::Phase {
            on: Control,
            angle: -theta,
        },
        SequenceGate::Cnot,
        SequenceGate::Phase {
            on: Target,
            angle: theta,
        },
        SequenceGate::Cnot,
        SequenceGate::Phase {
            on: Target,
            angle: -theta,
        },
    ]
}

/// 4×4 unitary of a gate sequence on the pair basis `|control target⟩`,
/// using ideal gates.
pub fn sequence_unitary(gates: &[SequenceGate]) -> GateMatrix {
    let mut total = GateMatrix::identity(4);
    for g in gates {
        let step = match *g {
            SequenceGate::Cnot => GateMatrix::cnot(),
            SequenceGate::Phase { on, angle } => {
                let e = Complex64::from_polar(1.0, angle);
                let l = Complex64::new(1.0, 0.0);
                match on {
                    PairQubit::Control => GateMatrix::diagonal(&[l, l, e, e]),
                    PairQubit::Target => GateMatrix::diagonal(&[l, e, l, e]),
                }
            }
        };
        total = step.matmul(&total).expect("4x4 gates");
    }
    total
}

/// θ for the sequence between earlier qubit `s` and qubit `r > s`:
/// `π / 2^(r−s+1)`, so the pair picks up a phase of `−2π / 2^(r−s+1)`.
pub fn sequence_angle(s: usize, r: usize) -> f64 {
    PI / 2f64.powi((r - s + 1) as i32)
}

/// Runs the inverse QFT on register qubits `1..=m`.
pub fn inverse_qft(state: &mut QuantumState, m: usize, mode: GateMode) -> Result<()> {
    if m > state.num_qubits() {
        return Err(Error::IndexOutOfRange {
            index: m,
            num_qubits: state.num_qubits(),
        });
    }
    let h = mode.hadamard();
    let cnot = GateMatrix::cnot();
    for r in 1..=m {
        for s in 1..r {
            for gate in controlled_phase_sequence(sequence_angle(s, r)) {
                match gate {
                    SequenceGate::Cnot => state.apply_2q(s, r, &cnot)?,
                    SequenceGate::Phase { on, angle } => {
                        let q = match on {
                            PairQubit::Control => s,
                            PairQubit::Target => r,
                        };
                        state.apply_1q(q, &mode.phase(angle))?;
                    }
                }
            }
        }
        state.apply_1q(r, &h)?;
    }
    Ok(())
}

/// Preparation, phase kicks and inverse QFT.
///
/// With `include_target`, qubit `m+1` is held in `|1⟩` and the kicks are true
/// controlled-phase gates onto it.
pub fn run_circuit(
    m: usize,
    phi: f64,
    mode: GateMode,
    include_target: bool,
) -> Result<QuantumState> {
    let mut state = if include_target {
        let mut s = prepare_register(m, mode)?.append_qubit(1)?;
        for j in 1..=m {
            let times = 1u64 << (m - j);
            let kick = match mode {
                GateMode::Ideal => GateMatrix::controlled_phase(times as f64 * phi),
                GateMode::PulseLiteral => controlled(&mode.phase(phi).pow(times)),
            };
            s.apply_2q(j, m + 1, &kick)?;
        }
        s
    } else {
        let mut s = prepare_register(m, mode)?;
        apply_phase_kicks(&mut s, phi, m, mode)?;
        s
    };
    inverse_qft(&mut state, m, mode)?;
    state.check_normalized()?;
    Ok(state)
}

// |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U
fn controlled(u: &GateMatrix) -> GateMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    GateMatrix::from_rows4([
        [l, o, o, o],
        [o, l, o, o],
        [o, o, u.get(0, 0), u.get(0, 1)],
        [o, o, u.get(1, 0), u.get(1, 1)],
    ])
}

// Probability of each register configuration of qubits 1..=m.
fn register_marginal(state: &QuantumState, m: usize) -> Vec<f64> {
    let probs = state.register_probabilities();
    let extra = state.num_qubits() - m;
    if extra == 0 {
        return probs;
    }
    probs
        .chunks_exact(1 << extra)
        .map(|c| c.iter().sum())
        .collect()
}

/// Exact readout distribution of the full protocol.
pub fn exact_distribution(m: usize, phi: f64, mode: GateMode) -> Result<OutcomeDistribution> {
    if m == 0 || m > MAX_REGISTER {
        return Err(Error::Validation(format!(
            "register size m must be in 1..={MAX_REGISTER}, got {m}"
        )));
    }
    let state = run_circuit(m, phi, mode, false)?;
    Ok(distribution_of(&state, m))
}

/// Readout distribution of a post-QFT state (register qubits `1..=m`).
pub fn distribution_of(state: &QuantumState, m: usize) -> OutcomeDistribution {
    let by_register = register_marginal(state, m);
    let mut probs = vec![0.0; by_register.len()];
    for (k, p) in by_register.into_iter().enumerate() {
        probs[bit_reverse(k, m)] = p;
    }
    OutcomeDistribution { m, probs }
}

/// Builds the estimate for readout integer `j`.
pub fn estimate_from_readout(readout: usize, m: usize, true_phase: f64) -> PhaseEstimate {
    let bits = (1..=m).map(|i| ((readout >> (m - i)) & 1) as u8).collect();
    let estimated_phase = TAU * readout as f64 / (1u64 << m) as f64;
    PhaseEstimate {
        bits,
        readout,
        estimated_phase,
        eta_percent: estimated_phase / true_phase * 100.0,
    }
}

/// Measures the register and reads it in reverse order.
pub fn measure_and_estimate(
    state: &QuantumState,
    m: usize,
    true_phase: f64,
    seed: u64,
) -> Result<PhaseEstimate> {
    if m == 0 || m > state.num_qubits() {
        return Err(Error::IndexOutOfRange {
            index: m,
            num_qubits: state.num_qubits(),
        });
    }
    let record = state.measure_all(seed);
    // Register order gives φ_m … φ_1.
    let readout = record.bits[..m]
        .iter()
        .rev()
        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
    Ok(estimate_from_readout(readout, m, true_phase))
}

/// Readouts of `shots` independent measurements of `state`.
///
/// Shot `i` uses seed `derive_seed(seed, i)` and yields exactly what
/// `measure_and_estimate(state, m, _, derive_seed(seed, i))` would.
pub fn sample_readouts(state: &QuantumState, m: usize, shots: u64, seed: u64) -> Vec<usize> {
    let table = CumulativeTable::new(&state.register_probabilities());
    (0..shots)
        .into_par_iter()
        .map(|i| {
            let u: f64 = rng::seeded(rng::derive_seed(seed, i)).gen();
            let k = table.sample(u) >> (state.num_qubits() - m);
            bit_reverse(k, m)
        })
        .collect()
}

/// `1 − 1/(2^(m−n+1) − 4)`, defined for `m ≥ n + 2`.
pub fn success_probability_bound(m: usize, n: usize) -> Result<f64> {
    if m <= n {
        return Err(Error::Domain(format!(
            "success bound needs m > n (m = {m}, n = {n})"
        )));
    }
    if m == n + 1 {
        return Err(Error::BoundUndefined { m, n });
    }
    Ok(1.0 - 1.0 / (2f64.powi((m - n + 1) as i32) - 4.0))
}

/// Exact probability that an `m`-bit run lands within `1/2^n` of `phi/2π`.
pub fn empirical_success(m: usize, n: usize, phi: f64, mode: GateMode) -> Result<f64> {
    if m < n {
        return Err(Error::Domain(format!(
            "empirical success needs m ≥ n (m = {m}, n = {n})"
        )));
    }
    Ok(exact_distribution(m, phi, mode)?.success_mass(n, phi))
}

/// `|⟨a ⊗ 1|b⟩|` where `a` uses single-qubit kicks on `m` qubits and `b` uses
/// controlled-phase kicks onto an explicit target qubit in `|1⟩`.
pub fn kick_equivalence_check(m: usize, phi: f64) -> Result<f64> {
    if m == 0 || m > 10 {
        return Err(Error::Domain(format!(
            "kick equivalence is checked for 1 ≤ m ≤ 10, got {m}"
        )));
    }
    let mut a = prepare_register(m, GateMode::Ideal)?;
    apply_phase_kicks(&mut a, phi, m, GateMode::Ideal)?;
    let a = a.append_qubit(1)?;

    let mut b = prepare_register(m, GateMode::Ideal)?.append_qubit(1)?;
    let cphase = GateMatrix::controlled_phase(phi);
    for j in 1..=m {
        for _ in 0..(1u64 << (m - j)) {
            b.apply_2q(j, m + 1, &cphase)?;
        }
    }
    Ok(a.overlap(&b)?.norm())
}

/// Result of an end-to-end estimation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRun {
    pub distribution: OutcomeDistribution,
    /// Most probable readout.
    pub best: PhaseEstimate,
    /// One estimate per shot (empty in exact mode).
    pub shots: Vec<PhaseEstimate>,
}

/// Runs the protocol described by `config`.
pub fn run_estimate(config: &QpeConfig) -> Result<EstimateRun> {
    config.validate()?;
    let state = run_circuit(
        config.m,
        config.true_phase,
        config.gate_mode,
        config.include_target_qubit,
    )?;
    if (state.norm_sqr() - 1.0).abs() > NORM_TOL {
        return Err(Error::Numerical("final state lost normalisation".into()));
    }
    let distribution = distribution_of(&state, config.m);
    distribution.check()?;
    let best = estimate_from_readout(distribution.most_likely(), config.m, config.true_phase);
    let shots = sample_readouts(&state, config.m, config.shots, config.seed)
        .into_iter()
        .map(|j| estimate_from_readout(j, config.m, config.true_phase))
        .collect();
    Ok(EstimateRun {
        distribution,
        best,
        shots,
    })
}
