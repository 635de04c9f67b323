use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{gate_distance, single_pulse_unitary, wrap_tau, PulseSpec};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::statevector::GateMatrix;

/// Grid points per axis in the coarse search (step `2π / 512 = π/256`).
pub const FIT_GRID_STEPS: usize = 512;

// Grid values closer than this (in squared distance) count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseFit {
    /// Best parameters, both reduced to `[0, 2π)`.
    pub spec: PulseSpec,
    /// `gate_distance(single_pulse_unitary(spec), target)`.
    pub residual: f64,
}

/// Finds the single-pulse parameters whose unitary is closest to `target`
/// up to global phase.
///
/// A coarse grid over `[0, 2π)²` picks a starting point (ties go to the
/// smallest Rabi angle, then the smallest phase), then a Nelder-Mead simplex
/// refines it. Deterministic for a given target; never fails.
pub fn fit_pulse(target: &GateMatrix) -> PulseFit {
    let cost = |x: &[f64]| -> f64 {
        let u = single_pulse_unitary(PulseSpec {
            rabi_angle: x[0],
            phase: x[1],
        });
        gate_distance(&u, target).map_or(f64::INFINITY, |d| d * d)
    };

    let step = TAU / FIT_GRID_STEPS as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..FIT_GRID_STEPS {
        let theta = i as f64 * step;
        for j in 0..FIT_GRID_STEPS {
            let phase = j as f64 * step;
            let v = cost(&[theta, phase]);
            if v < best.0 - TIE_TOL {
                best = (v, theta, phase);
            }
        }
    }

    let refined = nelder_mead(
        cost,
        &[best.1, best.2],
        &NelderMeadOptions {
            initial_step: step,
            x_tolerance: 1e-10,
            f_tolerance: 0.0,
            max_iterations: 5_000,
        },
    );
    let (theta, phase) = if refined.value <= best.0 {
        (refined.x[0], refined.x[1])
    } else {
        (best.1, best.2)
    };
    let spec = PulseSpec {
        rabi_angle: wrap_tau(theta),
        phase: wrap_tau(phase),
    };
    let residual = gate_distance(&single_pulse_unitary(spec), target).unwrap_or(f64::INFINITY);
    PulseFit { spec, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn recovers_member_of_model_class() {
        let target = single_pulse_unitary(PulseSpec::new(PI / 5.0, 1.0).unwrap());
        let fit = fit_pulse(&target);
        assert!(fit.residual < 1e-8, "{fit:?}");
    }

    #[test]
    fn recovers_phase_gate_structure() {
        let phi = 0.7;
        let target = GateMatrix::diagonal(&[
            -Complex64::from_polar(1.0, -phi),
            Complex64::from_polar(1.0, phi),
        ]);
        let fit = fit_pulse(&target);
        assert!(fit.residual < 1e-8, "{fit:?}");
        assert!((fit.spec.rabi_angle - FRAC_PI_2).abs() < 1e-7, "{fit:?}");
        assert!((fit.spec.phase - (phi + FRAC_PI_2)).abs() < 1e-7, "{fit:?}");
    }

    #[test]
    fn deterministic() {
        let target = GateMatrix::hadamard();
        assert_eq!(fit_pulse(&target), fit_pulse(&target));
    }

    #[test]
    fn never_fails_on_unreachable_target() {
        // [[0, 1], [-1, 0]] has zero trace overlap with every pulse unitary.
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let target = GateMatrix::from_entries(2, vec![o, l, -l, o]).unwrap();
        let fit = fit_pulse(&target);
        assert!((fit.residual - 2.0).abs() < 1e-9, "{fit:?}");
    }
}
