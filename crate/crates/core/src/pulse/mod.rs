//! Unitaries generated by resonant laser pulses on a charge qubit and by the
//! two-photon (laser + cavity) transition, taken literally as evolution maps.
//!
//! A single laser pulse with Rabi angle `θ = Ω₁t` and laser phase `φ` maps
//!
//! ```text
//! |g⟩ → −i e^{−iφ} sin θ |g⟩ + cos θ |e⟩
//! |e⟩ →  cos θ |g⟩ − i e^{iφ} sin θ |e⟩
//! ```
//!
//! and the cavity-assisted pulse with `θ = Ω_eff t`, phase `φ₂` acts on
//! (qubit ⊗ cavity) as
//!
//! ```text
//! |g0⟩ → |g0⟩
//! |g1⟩ → cos θ |g1⟩ − i e^{iφ₂} sin θ |e0⟩
//! |e0⟩ → cos θ |e0⟩ − i e^{−iφ₂} sin θ |g1⟩
//! |e1⟩ → |e1⟩
//! ```
//!
//! Note that the single-pulse map is not `exp(−iHt)` of the Rabi Hamiltonian
//! under the usual convention; the textbook Hadamard and phase gates are not
//! produced by the nominal pulse settings. [`gate_distance`] quantifies the gap.

pub mod feasibility;
mod fit;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::GateMatrix;

pub use fit::{fit_pulse, PulseFit, FIT_GRID_STEPS};

/// Pulse parameters: the dimensionless Rabi angle (Ω·t) and the laser phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub rabi_angle: f64,
    pub phase: f64,
}

impl PulseSpec {
    pub fn new(rabi_angle: f64, phase: f64) -> Result<Self> {
        if !rabi_angle.is_finite() || !phase.is_finite() {
            return Err(Error::Validation(format!(
                "pulse parameters must be finite (rabi_angle = {rabi_angle}, phase = {phase})"
            )));
        }
        Ok(Self { rabi_angle, phase })
    }

    /// Rabi angle reduced to `[0, 2π)`.
    pub fn canonical_rabi_angle(&self) -> f64 {
        wrap_tau(self.rabi_angle)
    }

    /// Phase reduced to `[0, 2π)`.
    pub fn canonical_phase(&self) -> f64 {
        wrap_tau(self.phase)
    }

    pub fn canonical(&self) -> PulseSpec {
        PulseSpec {
            rabi_angle: self.canonical_rabi_angle(),
            phase: self.canonical_phase(),
        }
    }
}

pub(crate) fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// 2×2 laser-pulse unitary. Columns are the images of `|g⟩` and `|e⟩`.
pub fn single_pulse_unitary(p: PulseSpec) -> GateMatrix {
    let (s, c) = p.rabi_angle.sin_cos();
    let minus_i = Complex64::new(0.0, -1.0);
    let gg = minus_i * Complex64::from_polar(1.0, -p.phase) * s;
    let ee = minus_i * Complex64::from_polar(1.0, p.phase) * s;
    let c = Complex64::new(c, 0.0);
    GateMatrix::from_rows2([[gg, c], [c, ee]])
}

/// 4×4 cavity-assisted pulse unitary on the basis {|g0⟩, |g1⟩, |e0⟩, |e1⟩}.
pub fn cavity_pulse_unitary(p: PulseSpec) -> GateMatrix {
    let (s, c) = p.rabi_angle.sin_cos();
    let minus_i = Complex64::new(0.0, -1.0);
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let c = Complex64::new(c, 0.0);
    // column g1 -> (row g1: c, row e0: −i e^{iφ} s)
    let e0_from_g1 = minus_i * Complex64::from_polar(1.0, p.phase) * s;
    // column e0 -> (row g1: −i e^{−iφ} s, row e0: c)
    let g1_from_e0 = minus_i * Complex64::from_polar(1.0, -p.phase) * s;
    GateMatrix::from_rows4([
        [l, o, o, o],
        [o, c, g1_from_e0, o],
        [o, e0_from_g1, c, o],
        [o, o, o, l],
    ])
}

/// Nominal Hadamard settings: `θ = π/4`, `φ = π/2`.
pub fn hadamard_pulse_params() -> PulseSpec {
    PulseSpec {
        rabi_angle: FRAC_PI_4,
        phase: FRAC_PI_2,
    }
}

/// Nominal settings for a phase gate of angle `phi`: `θ = π/2`, `φ₁ = phi + π/2`.
pub fn phase_gate_pulse_params(phi: f64) -> PulseSpec {
    PulseSpec {
        rabi_angle: FRAC_PI_2,
        phase: phi + FRAC_PI_2,
    }
}

/// Frobenius distance between two gates minimised over a global phase,
/// `sqrt(2·dim − 2·|tr(a†b)|)` for unitaries.
///
/// Evaluated as `‖a − e^{iα}b‖_F` with the optimal `α`, which avoids the
/// cancellation in `2·dim − 2·|tr|` near zero.
pub fn gate_distance(a: &GateMatrix, b: &GateMatrix) -> Result<f64> {
    let overlap = b.trace_inner(a)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let sq: f64 = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum();
    Ok(sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_angle_swaps_levels() {
        for phase in [0.0, 0.3, -2.0, 5.0] {
            let u = single_pulse_unitary(PulseSpec::new(0.0, phase).unwrap());
            let expect =
                GateMatrix::from_rows2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
            assert!(u.max_abs_diff(&expect) < 1e-15);
        }
    }

    #[test]
    fn nominal_hadamard_pulse_matrix() {
        let u = single_pulse_unitary(hadamard_pulse_params());
        let r = FRAC_1_SQRT_2;
        let expect = GateMatrix::from_rows2([[c(-r, 0.0), c(r, 0.0)], [c(r, 0.0), c(r, 0.0)]]);
        assert!(u.max_abs_diff(&expect) < 1e-15, "{u:?}");
        assert!(u.matmul(&u).unwrap().max_abs_diff(&GateMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn nominal_phase_pulse_matrix() {
        for phi in [0.0, PI / 3.0, 0.7, -1.1] {
            let u = single_pulse_unitary(phase_gate_pulse_params(phi));
            let expect = GateMatrix::diagonal(&[
                -Complex64::from_polar(1.0, -phi),
                Complex64::from_polar(1.0, phi),
            ]);
            assert!(u.max_abs_diff(&expect) < 1e-15);
        }
    }

    #[test]
    fn nominal_parameter_values() {
        assert_eq!(
            hadamard_pulse_params(),
            PulseSpec {
                rabi_angle: PI / 4.0,
                phase: PI / 2.0
            }
        );
        assert_eq!(
            phase_gate_pulse_params(0.0),
            PulseSpec {
                rabi_angle: PI / 2.0,
                phase: PI / 2.0
            }
        );
        assert_eq!(
            phase_gate_pulse_params(PI / 3.0),
            PulseSpec {
                rabi_angle: PI / 2.0,
                phase: PI / 3.0 + PI / 2.0
            }
        );
    }

    #[test]
    fn cavity_pulse_examples() {
        let id = cavity_pulse_unitary(PulseSpec::new(0.0, 1.3).unwrap());
        assert!(id.max_abs_diff(&GateMatrix::identity(4)) < 1e-15);

        let u = cavity_pulse_unitary(PulseSpec::new(PI / 2.0, 0.0).unwrap());
        // |g1⟩ (index 1) -> −i|e0⟩ (index 2)
        assert!((u.get(2, 1) - c(0.0, -1.0)).norm() < 1e-15);
        assert!(u.get(1, 1).norm() < 1e-15);
        // |e0⟩ -> −i|g1⟩
        assert!((u.get(1, 2) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn cavity_pulse_fixes_g0_and_e1() {
        for (theta, phase) in [(0.1, 0.2), (PI, 3.0), (7.7, -4.0)] {
            let u = cavity_pulse_unitary(PulseSpec::new(theta, phase).unwrap());
            for fixed in [0, 3] {
                for row in 0..4 {
                    let expect = if row == fixed {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    };
                    assert_eq!(u.get(row, fixed), expect);
                }
            }
        }
    }

    #[test]
    fn distance_examples() {
        let u = single_pulse_unitary(PulseSpec::new(0.4, 1.9).unwrap());
        assert_eq!(gate_distance(&u, &u).unwrap(), 0.0);
        let shifted = GateMatrix::from_entries(
            2,
            u.entries()
                .iter()
                .map(|z| z * Complex64::from_polar(1.0, 2.3))
                .collect(),
        )
        .unwrap();
        assert!(gate_distance(&u, &shifted).unwrap() < 1e-12);

        let d = gate_distance(
            &single_pulse_unitary(hadamard_pulse_params()),
            &GateMatrix::hadamard(),
        )
        .unwrap();
        assert!((d - 2.0).abs() < 1e-12, "{d}");

        assert!(matches!(
            gate_distance(&GateMatrix::identity(2), &GateMatrix::identity(4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_agrees_with_trace_formula() {
        let a = single_pulse_unitary(PulseSpec::new(0.9, 0.1).unwrap());
        let b = single_pulse_unitary(PulseSpec::new(2.0, 4.0).unwrap());
        let tr = a.trace_inner(&b).unwrap().norm();
        let expect = (4.0 - 2.0 * tr).sqrt();
        assert!((gate_distance(&a, &b).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn canonical_form() {
        let p = PulseSpec::new(-PI / 2.0, 7.0).unwrap();
        assert!((p.canonical_rabi_angle() - 1.5 * PI).abs() < 1e-15);
        assert!((p.canonical_phase() - (7.0 - TAU)).abs() < 1e-15);
        assert_eq!(wrap_tau(-1e-18), 0.0);
        assert!(PulseSpec::new(f64::NAN, 0.0).is_err());
    }
}
