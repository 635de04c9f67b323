//! Subcommand implementations. Each takes the resolved config section and
//! returns the `results` payload plus any warnings.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use dotphase::qpe::circular_distance;
use dotphase::{
    calibrate_clock, empirical_success, estimate_from_readout, exact_distribution, feasibility,
    fit_pulse, gate_distance, hadamard_pulse_params, length_estimate, phase_gate_pulse_params,
    phase_to_time, run_estimate, single_pulse_unitary, success_probability_bound, time_resolution,
    time_to_phase, Error, GateMatrix, GateMode, PhaseEstimate, PulseSpec, QpeConfig,
};

use crate::config::{
    Angle, CalibrateClockArgs, EstimateArgs, FeasibilityArgs, PulseFitArgs, SweepArgs,
};
use crate::error::{CliError, Result};

#[derive(Debug)]
pub struct Outcome {
    pub results: Value,
    pub warnings: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results are plain data")
}

/// `None` where the bound is undefined for this `(m, n)`.
fn optional_bound(m: usize, n: usize) -> Result<Option<f64>> {
    match success_probability_bound(m, n) {
        Ok(b) => Ok(Some(b)),
        Err(Error::BoundUndefined { .. } | Error::Domain(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn bound_note(m: usize, n: usize) -> String {
    format!("success bound undefined for m = {m}, n = {n} (needs m >= n + 2)")
}

pub fn estimate(a: &EstimateArgs, seed: u64) -> Result<Outcome> {
    let cfg = QpeConfig {
        m: a.m.unwrap_or_default(),
        n: a.n.unwrap_or_default(),
        true_phase: a.phi.map_or(f64::NAN, |p| p.0),
        gate_mode: a.gate_mode.unwrap_or_default(),
        include_target_qubit: a.include_target_qubit.unwrap_or(false),
        shots: a.shots.unwrap_or(0),
        seed,
    };
    let run = run_estimate(&cfg)?;
    let mut warnings = Vec::new();

    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for s in &run.shots {
        *counts.entry(s.readout).or_default() += 1;
    }
    // Sampled runs report the modal readout; ties go to the smallest.
    let estimate: PhaseEstimate = match counts.iter().max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0)))
    {
        Some((&j, _)) => estimate_from_readout(j, cfg.m, cfg.true_phase),
        None => run.best.clone(),
    };

    let bound = optional_bound(cfg.m, cfg.n)?;
    if bound.is_none() {
        warnings.push(bound_note(cfg.m, cfg.n));
    }
    let error_turns = circular_distance(estimate.estimated_phase / TAU, cfg.true_phase / TAU);

    let mut results = json!({
        "estimate": estimate,
        "most_likely": run.best,
        "success_probability": run.distribution.success_mass(cfg.n, cfg.true_phase),
        "success_bound": bound,
        "shots": cfg.shots,
        "shot_counts": counts
            .iter()
            .map(|(j, c)| json!({ "readout": j, "count": c }))
            .collect::<Vec<_>>(),
        "extensions": { "abs_error_turns": error_turns },
    });
    if a.distribution.unwrap_or(false) {
        results["distribution"] = to_value(&run.distribution.probs);
    }
    Ok(Outcome { results, warnings })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub n: usize,
    pub phi: f64,
    pub empirical_success: f64,
    pub bound: Option<f64>,
    pub meets_bound: Option<bool>,
}

/// Explicit phases followed by `random_phis` draws from `(0, 2π]`.
pub fn sweep_phases(a: &SweepArgs, seed: u64) -> Vec<f64> {
    let mut phis: Vec<f64> = a.phis.iter().flatten().map(|p: &Angle| p.0).collect();
    let mut rng = dotphase::rng::seeded(seed);
    for _ in 0..a.random_phis.unwrap_or(0) {
        phis.push(TAU * (1.0 - rng.gen::<f64>()));
    }
    phis
}

pub fn sweep_rows(a: &SweepArgs, seed: u64) -> Result<Vec<SweepRow>> {
    let n = a.n.unwrap_or_default();
    let mode = a.gate_mode.unwrap_or_default();
    let ms = a.m_values.clone().unwrap_or_default();
    let phis = sweep_phases(a, seed);
    if phis.is_empty() {
        return Err(CliError::usage(
            "sweep: no phases given (use --phi or --random-phis)",
        ));
    }
    for &m in &ms {
        QpeConfig {
            m,
            n,
            true_phase: TAU,
            gate_mode: mode,
            include_target_qubit: false,
            shots: 0,
            seed,
        }
        .validate()?;
    }
    // Rows are m-major in input order; rayon's indexed collect keeps it.
    let jobs: Vec<(usize, f64)> = ms
        .iter()
        .flat_map(|&m| phis.iter().map(move |&phi| (m, phi)))
        .collect();
    jobs.par_iter()
        .map(|&(m, phi)| {
            let s = empirical_success(m, n, phi, mode)?;
            let bound = optional_bound(m, n)?;
            Ok(SweepRow {
                m,
                n,
                phi,
                empirical_success: s,
                bound,
                meets_bound: bound.map(|b| s >= b - 1e-9),
            })
        })
        .collect()
}

pub fn sweep(a: &SweepArgs, seed: u64) -> Result<(Outcome, Vec<SweepRow>)> {
    let rows = sweep_rows(a, seed)?;
    let n = a.n.unwrap_or_default();
    let mut warnings: Vec<String> = Vec::new();
    for m in a.m_values.iter().flatten() {
        if rows.iter().any(|r| r.m == *m && r.bound.is_none()) {
            warnings.push(bound_note(*m, n));
        }
    }
    let failures = rows.iter().filter(|r| r.meets_bound == Some(false)).count();
    if failures > 0 {
        warnings.push(format!("{failures} rows fall below the success bound"));
    }
    let results = json!({ "rows": rows });
    Ok((Outcome { results, warnings }, rows))
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let map = |e: csv::Error| CliError::io("writing csv", std::io::Error::other(e));
    for r in rows {
        w.serialize(r).map_err(map)?;
    }
    w.flush().map_err(|e| CliError::io("writing csv", e))
}

/// A named target gate and, for presets, the pulse settings nominally
/// prescribed for it.
struct Target {
    gate: GateMatrix,
    nominal: Option<(PulseSpec, GateMatrix)>,
}

fn parse_target(a: &PulseFitArgs) -> Result<Target> {
    if let Some(values) = &a.matrix {
        if values.len() != 8 {
            return Err(CliError::usage(format!(
                "pulse-fit: --matrix needs 8 reals (row-major re, im), got {}",
                values.len()
            )));
        }
        let entries = values
            .chunks(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        return Ok(Target {
            gate: GateMatrix::unitary(2, entries)?,
            nominal: None,
        });
    }
    let preset = a.preset.as_deref().unwrap_or_default();
    let (name, arg) = match preset.split_once(':') {
        Some((n, x)) => (n, Some(x.parse::<Angle>().map_err(CliError::usage)?.0)),
        None => (preset, None),
    };
    let target = match (name, arg) {
        ("hadamard", None) => {
            let p = hadamard_pulse_params();
            Target {
                gate: GateMatrix::hadamard(),
                nominal: Some((p, GateMatrix::hadamard())),
            }
        }
        ("paper-hadamard", None) => {
            let p = hadamard_pulse_params();
            Target {
                gate: single_pulse_unitary(p),
                nominal: Some((p, GateMatrix::hadamard())),
            }
        }
        ("phase", Some(phi)) => {
            let p = phase_gate_pulse_params(phi);
            Target {
                gate: GateMatrix::phase(phi),
                nominal: Some((p, GateMatrix::phase(phi))),
            }
        }
        ("paper-phase", Some(phi)) => {
            let p = phase_gate_pulse_params(phi);
            Target {
                gate: single_pulse_unitary(p),
                nominal: Some((p, GateMatrix::phase(phi))),
            }
        }
        _ => {
            return Err(CliError::usage(format!(
                "pulse-fit: unknown preset '{preset}' \
                 (hadamard, phase:<angle>, paper-hadamard, paper-phase:<angle>)"
            )))
        }
    };
    Ok(target)
}

fn matrix_value(g: &GateMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..g.dim())
        .map(|r| {
            (0..g.dim())
                .map(|c| [g.get(r, c).re, g.get(r, c).im])
                .collect()
        })
        .collect();
    to_value(&rows)
}

pub fn pulse_fit(a: &PulseFitArgs) -> Result<Outcome> {
    let target = parse_target(a)?;
    let fit = fit_pulse(&target.gate);
    let mut warnings = Vec::new();
    let mut results = json!({
        "target": matrix_value(&target.gate),
        "fit": fit,
        "fitted_unitary": matrix_value(&single_pulse_unitary(fit.spec)),
    });
    if let Some((spec, ideal)) = &target.nominal {
        let pulse = single_pulse_unitary(*spec);
        let d = gate_distance(&pulse, ideal)?;
        if d > 1e-9 {
            warnings.push(format!(
                "nominal pulse settings miss the ideal gate by distance {d:.6}"
            ));
        }
        results["nominal"] = json!({
            "spec": spec,
            "unitary": matrix_value(&pulse),
            "distance_to_ideal": d,
        });
    }
    Ok(Outcome { results, warnings })
}

pub fn calibrate(a: &CalibrateClockArgs) -> Result<Outcome> {
    let eo = a.electro_optic();
    eo.validate()?;
    let mut warnings = Vec::new();

    let (measured, varphi) = match (a.duration_s, a.varphi) {
        (Some(t), _) => (t, time_to_phase(t, &eo)?.varphi),
        (None, Some(v)) => (phase_to_time(v, &eo)?, v),
        (None, None) => return Err(CliError::usage("calibrate-clock: no duration or phase")),
    };
    let encoded = time_to_phase(measured, &eo)?;

    let mut duration = measured;
    let mut eta = a.eta_percent;
    let mut qpe = Value::Null;
    if let Some(m) = a.register_bits {
        // φ = 0 is the same point as 2π on the circle.
        let phi = if varphi == 0.0 { TAU } else { TAU * varphi };
        let dist = exact_distribution(m, phi, GateMode::Ideal)?;
        let est = estimate_from_readout(dist.most_likely(), m, phi);
        let t_hat = phase_to_time(est.estimated_phase / TAU % 1.0, &eo)?;
        let step = time_resolution(m, &eo)?;
        duration = t_hat;
        eta.get_or_insert(est.eta_percent);
        qpe = json!({
            "register_bits": m,
            "estimate": est,
            "estimated_duration_s": t_hat,
            "time_resolution_s": step,
        });
    }
    if a.eta_percent.is_none() && a.register_bits.is_none() {
        warnings.push("no phase estimate given; using eta = 100%".to_string());
    }
    let eta = eta.unwrap_or(100.0);

    let record = calibrate_clock(
        duration,
        a.scale_total.unwrap_or_default(),
        a.scales_elapsed.unwrap_or_default(),
        a.ideal_time_s.unwrap_or(f64::NAN),
        eta,
        a.comparison_mode.unwrap_or_default(),
    )?;
    let length = length_estimate(eo.v, duration)?;
    let results = json!({
        "phase": { "phi1": encoded.phi1, "varphi": varphi },
        "measured_duration_s": measured,
        "qpe": qpe,
        "calibration": record,
        "crystal_length_m": length,
    });
    Ok(Outcome { results, warnings })
}

pub fn feasibility_report(a: &FeasibilityArgs) -> Result<Outcome> {
    let pp = a.physical();
    let mut report = feasibility(&pp, a.n.unwrap_or(450))?;
    let warnings = std::mem::take(&mut report.warnings);
    Ok(Outcome {
        results: to_value(&report),
        warnings,
    })
}
