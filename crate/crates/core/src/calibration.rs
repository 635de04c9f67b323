//! Clock and length calibration from an estimated phase.
//!
//! The phase written onto the register comes from light crossing an
//! electro-optic crystal for a duration `T`:
//!
//! ```text
//! φ₁ = 2πϕ + π/2 = ϖ · n₀² · n · r₆₃ · E · T / 2
//! ```
//!
//! so a phase estimate converts back to a duration. A clock that ticked `h`
//! of its `O` scale marks during `T` has period `T_total = O·T/h`, which is
//! compared against the period of an ideal clock.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElectroOpticParams {
    /// Angular frequency of the applied field ϖ (rad/s).
    pub varpi: f64,
    /// Refractive index of the crystal.
    pub n0: f64,
    /// The second index factor `n`; equals `c/v` for the velocity form.
    pub n_vac: f64,
    /// Electro-optic tensor component r₆₃ (m/V).
    pub r63: f64,
    /// Applied field (V/m).
    pub field: f64,
    /// Light speed in the crystal (m/s).
    pub v: f64,
    /// Vacuum light speed (m/s).
    pub c: f64,
}

impl Default for ElectroOpticParams {
    /// KDP-like constants under a 1 MV/m field at 1 GHz.
    fn default() -> Self {
        Self {
            varpi: TAU * 1e9,
            n0: 1.51,
            n_vac: 1.0,
            r63: 10.6e-12,
            field: 1e6,
            v: 299_792_458.0 / 1.51,
            c: 299_792_458.0,
        }
    }
}

impl ElectroOpticParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("varpi", self.varpi),
            ("n0", self.n0),
            ("n_vac", self.n_vac),
            ("r63", self.r63),
            ("field", self.field),
            ("v", self.v),
            ("c", self.c),
        ];
        for (name, x) in fields {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Validation(format!(
                    "electro-optic parameter {name} must be positive and finite, got {x}"
                )));
            }
        }
        if !(self.coefficient() > 0.0 && self.coefficient().is_finite()) {
            return Err(Error::Validation(
                "electro-optic coefficient ϖ·n0²·n·r63·E must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `ϖ · n₀² · n · r₆₃ · E` (1/s).
    pub fn coefficient(&self) -> f64 {
        self.varpi * self.n0 * self.n0 * self.n_vac * self.r63 * self.field
    }

    /// `ϖ · n₀³ · v · r₆₃ · E / c`, which matches [`Self::coefficient`] when
    /// `n_vac = n₀·v/c`.
    pub fn velocity_form_coefficient(&self) -> f64 {
        self.varpi * self.n0.powi(3) * self.v * self.r63 * self.field / self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseFromTime {
    /// Laser phase φ₁ (rad).
    pub phi1: f64,
    /// Fraction of a turn ϕ = (φ₁ − π/2)/2π, in `[0, 1)`.
    pub varphi: f64,
}

/// Phase written by a crossing of duration `duration` (s).
pub fn time_to_phase(duration: f64, eo: &ElectroOpticParams) -> Result<PhaseFromTime> {
    eo.validate()?;
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::Validation(format!(
            "duration must be non-negative, got {duration}"
        )));
    }
    let phi1 = eo.coefficient() * duration / 2.0;
    let varphi = (phi1 - FRAC_PI_2) / TAU;
    if !(0.0..1.0).contains(&varphi) {
        return Err(Error::OutOfRange(format!(
            "duration {duration} s maps to {varphi} turns; only [0, 1) can be encoded"
        )));
    }
    Ok(PhaseFromTime { phi1, varphi })
}

/// Duration (s) that writes the fraction `varphi` of a turn.
pub fn phase_to_time(varphi: f64, eo: &ElectroOpticParams) -> Result<f64> {
    eo.validate()?;
    if !(0.0..1.0).contains(&varphi) {
        return Err(Error::OutOfRange(format!(
            "phase fraction must lie in [0, 1), got {varphi}"
        )));
    }
    Ok((TAU * varphi + FRAC_PI_2) * 2.0 / eo.coefficient())
}

/// Duration change corresponding to one step of an `m`-bit phase readout.
pub fn time_resolution(m: usize, eo: &ElectroOpticParams) -> Result<f64> {
    eo.validate()?;
    Ok(2.0 * (TAU / 2f64.powi(m as i32)) / eo.coefficient())
}

/// Full-circle period of a clock that advanced `h` of its `o` marks in `duration`.
pub fn clock_total_time(duration: f64, o: u64, h: u64) -> Result<f64> {
    if h == 0 {
        return Err(Error::Validation(
            "elapsed scale count h must be at least 1".into(),
        ));
    }
    if o < h {
        return Err(Error::Validation(format!(
            "total scale count O ({o}) must be at least h ({h})"
        )));
    }
    Ok(o as f64 * duration / h as f64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonMode {
    /// Accurate iff η′ ≤ η.
    PaperLiteral,
    /// Accurate iff |η′ − 100| ≤ |η − 100|.
    #[default]
    Deviation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accurate,
    IncreaseFrequency,
    DecreaseFrequency,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictOutcome {
    pub eta_prime_percent: f64,
    pub verdict: Verdict,
}

/// Decides whether the clock needs regulating, given the phase-estimation
/// ratio `eta_percent`.
pub fn calibration_verdict(
    total_time: f64,
    ideal_time: f64,
    eta_percent: f64,
    mode: ComparisonMode,
) -> Result<VerdictOutcome> {
    if !(ideal_time > 0.0 && ideal_time.is_finite()) {
        return Err(Error::Validation(format!(
            "ideal period must be positive, got {ideal_time}"
        )));
    }
    if !total_time.is_finite() || !eta_percent.is_finite() {
        return Err(Error::Validation("non-finite calibration input".into()));
    }
    let eta_prime = total_time / ideal_time * 100.0;
    let within = match mode {
        ComparisonMode::PaperLiteral => eta_prime <= eta_percent,
        ComparisonMode::Deviation => (eta_prime - 100.0).abs() <= (eta_percent - 100.0).abs(),
    };
    let verdict = if total_time == ideal_time || within {
        Verdict::Accurate
    } else if total_time < ideal_time {
        Verdict::IncreaseFrequency
    } else {
        Verdict::DecreaseFrequency
    };
    Ok(VerdictOutcome {
        eta_prime_percent: eta_prime,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockCalibration {
    pub duration_s: f64,
    pub scale_total: u64,
    pub scales_elapsed: u64,
    pub total_time_s: f64,
    pub ideal_time_s: f64,
    pub eta_percent: f64,
    pub eta_prime_percent: f64,
    pub verdict: Verdict,
    pub comparison_mode: ComparisonMode,
}

/// Runs [`clock_total_time`] and [`calibration_verdict`] and collects the record.
pub fn calibrate_clock(
    duration: f64,
    scale_total: u64,
    scales_elapsed: u64,
    ideal_time: f64,
    eta_percent: f64,
    mode: ComparisonMode,
) -> Result<ClockCalibration> {
    let total = clock_total_time(duration, scale_total, scales_elapsed)?;
    let outcome = calibration_verdict(total, ideal_time, eta_percent, mode)?;
    Ok(ClockCalibration {
        duration_s: duration,
        scale_total,
        scales_elapsed,
        total_time_s: total,
        ideal_time_s: ideal_time,
        eta_percent,
        eta_prime_percent: outcome.eta_prime_percent,
        verdict: outcome.verdict,
        comparison_mode: mode,
    })
}

/// Crystal length `l = v·T`.
pub fn length_estimate(v: f64, duration: f64) -> Result<f64> {
    if !(v >= 0.0 && duration >= 0.0) || !v.is_finite() || !duration.is_finite() {
        return Err(Error::Validation(format!(
            "velocity and duration must be non-negative (v = {v}, T = {duration})"
        )));
    }
    Ok(v * duration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_product() -> ElectroOpticParams {
        ElectroOpticParams {
            varpi: 1.0,
            n0: 1.0,
            n_vac: 1.0,
            r63: 1.0,
            field: 1.0,
            v: 1.0,
            c: 1.0,
        }
    }

    #[test]
    fn offset_point() {
        let eo = ElectroOpticParams::default();
        let t0 = PI / eo.coefficient();
        let p = time_to_phase(t0, &eo).unwrap();
        assert!((p.phi1 - FRAC_PI_2).abs() < 1e-15);
        assert!(p.varphi.abs() < 1e-15);
        assert_eq!(phase_to_time(0.0, &eo).unwrap(), t0);
    }

    #[test]
    fn phase_linear_in_time() {
        let eo = unit_product();
        let a = time_to_phase(4.0, &eo).unwrap().phi1;
        let b = time_to_phase(8.0, &eo).unwrap().phi1;
        assert!((b - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn five_eighths() {
        let eo = unit_product();
        let t = phase_to_time(0.625, &eo).unwrap();
        assert!((t - 3.5 * PI).abs() < 1e-14);
        let p = time_to_phase(t, &eo).unwrap();
        assert!((p.varphi - 0.625).abs() < 1e-15);
        assert!((p.phi1 - (TAU * 0.625 + FRAC_PI_2)).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_phases() {
        let eo = unit_product();
        assert!(matches!(time_to_phase(0.0, &eo), Err(Error::OutOfRange(_))));
        assert!(matches!(
            time_to_phase(100.0, &eo),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(phase_to_time(1.0, &eo), Err(Error::OutOfRange(_))));
        assert!(matches!(
            phase_to_time(-0.1, &eo),
            Err(Error::OutOfRange(_))
        ));
        let bad = ElectroOpticParams {
            r63: 0.0,
            ..unit_product()
        };
        assert!(matches!(
            phase_to_time(0.1, &bad),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn forms_agree_when_index_matches_velocity() {
        let eo = ElectroOpticParams::default();
        let eo = ElectroOpticParams {
            n_vac: eo.n0 * eo.v / eo.c,
            ..eo
        };
        let rel = (eo.coefficient() - eo.velocity_form_coefficient()).abs() / eo.coefficient();
        assert!(rel < 1e-14);
    }

    #[test]
    fn total_time_examples() {
        assert_eq!(clock_total_time(1.0, 60, 60).unwrap(), 1.0);
        assert_eq!(clock_total_time(0.5, 60, 15).unwrap(), 2.0);
        assert_eq!(clock_total_time(1.0, 100, 25).unwrap(), 4.0);
        assert!(clock_total_time(1.0, 60, 0).is_err());
        assert!(clock_total_time(1.0, 10, 11).is_err());
    }

    #[test]
    fn verdict_examples() {
        for mode in [ComparisonMode::PaperLiteral, ComparisonMode::Deviation] {
            let v = calibration_verdict(3.0, 3.0, 50.0, mode).unwrap();
            assert_eq!(v.verdict, Verdict::Accurate);
        }
        let v = calibration_verdict(0.9, 1.0, 100.0, ComparisonMode::Deviation).unwrap();
        assert_eq!(v.verdict, Verdict::IncreaseFrequency);
        let v = calibration_verdict(1.2, 1.0, 100.0, ComparisonMode::Deviation).unwrap();
        assert_eq!(v.verdict, Verdict::DecreaseFrequency);
        assert!(calibration_verdict(1.0, 0.0, 100.0, ComparisonMode::Deviation).is_err());
    }

    #[test]
    fn length_examples() {
        assert_eq!(length_estimate(0.0, 5.0).unwrap(), 0.0);
        assert!((length_estimate(2e8, 1e-9).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(
            length_estimate(3.0, 2.0 * 0.7).unwrap(),
            2.0 * length_estimate(3.0, 0.7).unwrap()
        );
        assert!(length_estimate(-1.0, 1.0).is_err());
    }

    #[test]
    fn calibrate_record() {
        let rec = calibrate_clock(0.5, 60, 15, 2.0, 100.0, ComparisonMode::Deviation).unwrap();
        assert_eq!(rec.total_time_s, 2.0);
        assert_eq!(rec.eta_prime_percent, 100.0);
        assert_eq!(rec.verdict, Verdict::Accurate);
    }
}
