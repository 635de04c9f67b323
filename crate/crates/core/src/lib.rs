//! Dense state-vector simulation of quantum phase estimation on
//! cavity-coupled double quantum-dot charge qubits.
//!
//! The crate is organised bottom-up:
//!
//! * [`statevector`]: amplitudes, gate application, measurement.
//! * [`pulse`]: unitaries generated by laser and cavity pulses, pulse fitting,
//!   and device feasibility arithmetic.
//! * [`qpe`]: register preparation, phase kicks, the inverse-QFT circuit built
//!   from controlled-phase sequences, readout and success statistics.
//! * [`calibration`]: the electro-optic phase/time relation and the clock
//!   regulation verdict.
//!
//! Shared types are re-exported at the crate root.

pub mod calibration;
pub mod error;
pub mod optimize;
pub mod pulse;
pub mod qpe;
pub mod rng;
pub mod statevector;

pub use calibration::{
    calibrate_clock, calibration_verdict, clock_total_time, length_estimate, phase_to_time,
    time_resolution, time_to_phase, ClockCalibration, ComparisonMode, ElectroOpticParams,
    PhaseFromTime, Verdict, VerdictOutcome,
};
pub use error::{Error, Result};
pub use pulse::feasibility::{
    effective_rabi, feasibility, max_qubits, protocol_time, separation_factor, FeasibilityReport,
    Frequency, FrequencyUnit, PhysicalParams, HBAR_EV_S,
};
pub use pulse::{
    cavity_pulse_unitary, fit_pulse, gate_distance, hadamard_pulse_params, phase_gate_pulse_params,
    single_pulse_unitary, PulseFit, PulseSpec,
};
pub use qpe::{
    apply_phase_kicks, controlled_phase_sequence, empirical_success, estimate_from_readout,
    exact_distribution, inverse_qft, kick_equivalence_check, measure_and_estimate,
    prepare_register, run_circuit, run_estimate, sample_readouts, success_probability_bound,
    EstimateRun, GateMode, OutcomeDistribution, PairQubit, PhaseEstimate, QpeConfig, SequenceGate,
};
pub use statevector::{GateMatrix, MeasurementRecord, QuantumState};

/// Complex amplitude type used throughout the crate.
pub type ComplexAmp = num_complex::Complex64;
