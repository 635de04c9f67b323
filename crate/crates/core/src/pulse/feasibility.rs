//! Device-level arithmetic: effective cavity coupling, spatial separation
//! factor, protocol duration and the qubit budget under a coherence time.
//!
//! Energies are in meV, frequencies carry an explicit [`FrequencyUnit`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyUnit {
    #[serde(rename = "Hz")]
    Hz,
    #[serde(rename = "kHz")]
    KHz,
    #[serde(rename = "MHz")]
    MHz,
    #[serde(rename = "GHz")]
    GHz,
}

impl FrequencyUnit {
    pub fn hertz(self) -> f64 {
        match self {
            FrequencyUnit::Hz => 1.0,
            FrequencyUnit::KHz => 1e3,
            FrequencyUnit::MHz => 1e6,
            FrequencyUnit::GHz => 1e9,
        }
    }
}

impl fmt::Display for FrequencyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FrequencyUnit::Hz => "Hz",
            FrequencyUnit::KHz => "kHz",
            FrequencyUnit::MHz => "MHz",
            FrequencyUnit::GHz => "GHz",
        };
        f.write_str(s)
    }
}

/// A (possibly angular) frequency with its unit attached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub value: f64,
    pub unit: FrequencyUnit,
}

impl Frequency {
    pub fn new(value: f64, unit: FrequencyUnit) -> Self {
        Self { value, unit }
    }

    pub fn in_hertz(&self) -> f64 {
        self.value * self.unit.hertz()
    }

    pub fn to_unit(&self, unit: FrequencyUnit) -> Frequency {
        Frequency {
            value: self.in_hertz() / unit.hertz(),
            unit,
        }
    }

    /// `ħω` in meV, treating `value` as an angular frequency.
    pub fn energy_mev(&self) -> f64 {
        self.in_hertz() * HBAR_EV_S * 1e3
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit)
    }
}

/// Level energies `E_g`, `E_e`, `E_i` in meV.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelEnergies {
    pub ground: f64,
    pub excited: f64,
    pub intermediate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Single-qubit laser coupling Ω₁ (meV).
    pub omega1_mev: f64,
    /// Two-photon laser coupling Ω₂ (meV).
    pub omega2_mev: f64,
    /// Cavity coupling Ω_c.
    pub omega_c: Frequency,
    /// Detuning δ from the |g⟩ → |i⟩ transition (meV).
    pub delta_mev: f64,
    /// Tunnelling coupling t between |e⟩ and |i⟩ (meV).
    pub tunneling_mev: f64,
    /// Δ = E_e − E_i (meV).
    pub level_split_mev: f64,
    pub coherence_time_s: f64,
    pub single_gate_time_s: f64,
    pub two_gate_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels_mev: Option<LevelEnergies>,
}

impl Default for PhysicalParams {
    /// Typical weakly coupled double-dot values: t = 0.01 meV, Δ = 10 meV,
    /// Ω₂ = 0.1 meV, δ = 1 meV, Ω_c = 300 MHz, Ω₁ = 1e-4 meV, T_c = 10 s,
    /// a few hundred ns per single-qubit gate and 1e-4 s per two-qubit gate.
    fn default() -> Self {
        Self {
            omega1_mev: 1e-4,
            omega2_mev: 0.1,
            omega_c: Frequency::new(300.0, FrequencyUnit::MHz),
            delta_mev: 1.0,
            tunneling_mev: 0.01,
            level_split_mev: 10.0,
            coherence_time_s: 10.0,
            single_gate_time_s: 3e-7,
            two_gate_time_s: 1e-4,
            levels_mev: None,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega1_mev", self.omega1_mev),
            ("omega2_mev", self.omega2_mev),
            ("omega_c", self.omega_c.value),
            ("delta_mev", self.delta_mev),
            ("tunneling_mev", self.tunneling_mev),
            ("level_split_mev", self.level_split_mev),
            ("coherence_time_s", self.coherence_time_s),
            ("single_gate_time_s", self.single_gate_time_s),
            ("two_gate_time_s", self.two_gate_time_s),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{name} must be finite, got {v}")));
            }
        }
        if self.delta_mev == 0.0 {
            return Err(Error::DivisionByZero("detuning delta is zero"));
        }
        let nonneg = [
            ("omega1_mev", self.omega1_mev),
            ("omega2_mev", self.omega2_mev),
            ("omega_c", self.omega_c.value),
            ("tunneling_mev", self.tunneling_mev),
            ("level_split_mev", self.level_split_mev),
        ];
        for (name, v) in nonneg {
            if v < 0.0 {
                return Err(Error::Validation(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        let positive = [
            ("coherence_time_s", self.coherence_time_s),
            ("single_gate_time_s", self.single_gate_time_s),
            ("two_gate_time_s", self.two_gate_time_s),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.tunneling_mev == 0.0 && self.level_split_mev == 0.0 {
            return Err(Error::Domain(
                "tunneling and level splitting are both zero".into(),
            ));
        }
        Ok(())
    }

    /// Laser energy meeting the two-photon resonance `ω₂ = E_e − E_g − ω_c` (meV).
    pub fn resonant_laser_mev(&self) -> Option<f64> {
        self.levels_mev
            .map(|l| l.excited - l.ground - self.omega_c.energy_mev())
    }
}

/// `Ω_eff = Ω_c · Ω₂ / δ`, in the unit of `Ω_c`.
pub fn effective_rabi(pp: &PhysicalParams) -> Result<Frequency> {
    if pp.delta_mev == 0.0 {
        return Err(Error::DivisionByZero("detuning delta is zero"));
    }
    Ok(Frequency {
        value: pp.omega_c.value * (pp.omega2_mev / pp.delta_mev),
        unit: pp.omega_c.unit,
    })
}

/// `γ = t² / (Δ² + t²)`.
pub fn separation_factor(pp: &PhysicalParams) -> Result<f64> {
    let t2 = pp.tunneling_mev * pp.tunneling_mev;
    let d2 = pp.level_split_mev * pp.level_split_mev;
    if t2 + d2 == 0.0 {
        return Err(Error::Domain(
            "separation factor undefined for t = Δ = 0".into(),
        ));
    }
    Ok(t2 / (d2 + t2))
}

/// Duration of `n(n−1)/2` sequential two-qubit gates.
pub fn protocol_time(n: u64, two_gate_time: f64) -> f64 {
    let pairs = n * n.saturating_sub(1) / 2;
    pairs as f64 * two_gate_time
}

/// Largest `n` whose [`protocol_time`] fits in the coherence time.
pub fn max_qubits(coherence_time: f64, two_gate_time: f64) -> Result<u64> {
    if !(coherence_time > 0.0 && coherence_time.is_finite())
        || !(two_gate_time > 0.0 && two_gate_time.is_finite())
    {
        return Err(Error::Domain(format!(
            "coherence time and gate time must be positive (got {coherence_time}, {two_gate_time})"
        )));
    }
    let ratio = coherence_time / two_gate_time;
    let mut n = ((1.0 + (1.0 + 8.0 * ratio).sqrt()) / 2.0).floor().max(1.0) as u64;
    while n > 1 && protocol_time(n, two_gate_time) > coherence_time {
        n -= 1;
    }
    while protocol_time(n + 1, two_gate_time) <= coherence_time {
        n += 1;
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub gamma: f64,
    pub omega_eff: Frequency,
    pub omega1_over_omega2: f64,
    pub single_gate_time_s: f64,
    pub two_gate_time_s: f64,
    /// Register size the protocol time was evaluated for.
    pub n: u64,
    pub protocol_time_s: f64,
    pub coherence_time_s: f64,
    pub within_coherence: bool,
    pub max_qubits: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonant_laser_mev: Option<f64>,
    pub warnings: Vec<String>,
}

// The widely quoted Ω_eff for Ω₂ = 0.1 meV, δ = 1 meV, Ω_c = 300 MHz.
const QUOTED_OMEGA_EFF_HZ: f64 = 30e3;

/// Evaluates every feasibility figure for an `n`-qubit run.
pub fn feasibility(pp: &PhysicalParams, n: u64) -> Result<FeasibilityReport> {
    pp.validate()?;
    if n == 0 {
        return Err(Error::Validation("qubit count must be at least 1".into()));
    }
    let gamma = separation_factor(pp)?;
    let omega_eff = effective_rabi(pp)?;
    let protocol = protocol_time(n, pp.two_gate_time_s);
    let max_n = max_qubits(pp.coherence_time_s, pp.two_gate_time_s)?;

    let mut warnings = Vec::new();
    let defaults = PhysicalParams::default();
    if pp.omega2_mev == defaults.omega2_mev
        && pp.delta_mev == defaults.delta_mev
        && pp.omega_c.in_hertz() == defaults.omega_c.in_hertz()
    {
        warnings.push(format!(
            "omega_eff = Omega_c * Omega_2 / delta evaluates to {} ({} Hz); the often quoted \
             value for these inputs is 30 kHz, a factor {:.0} smaller",
            omega_eff,
            omega_eff.in_hertz(),
            omega_eff.in_hertz() / QUOTED_OMEGA_EFF_HZ
        ));
    }
    let within = protocol <= pp.coherence_time_s;
    if !within {
        warnings.push(format!(
            "protocol time {protocol} s for n = {n} exceeds the coherence time {} s (max n = {max_n})",
            pp.coherence_time_s
        ));
    }
    Ok(FeasibilityReport {
        gamma,
        omega_eff,
        omega1_over_omega2: if pp.omega2_mev != 0.0 {
            pp.omega1_mev / pp.omega2_mev
        } else {
            f64::INFINITY
        },
        single_gate_time_s: pp.single_gate_time_s,
        two_gate_time_s: pp.two_gate_time_s,
        n,
        protocol_time_s: protocol,
        coherence_time_s: pp.coherence_time_s,
        within_coherence: within,
        max_qubits: max_n,
        resonant_laser_mev: pp.resonant_laser_mev(),
        warnings,
    })
}
