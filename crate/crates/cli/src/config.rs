//! Run configuration: command-line flags layered over an optional config file.
//!
//! Each subcommand has one section type whose fields are all optional. The
//! same type is parsed from flags and from the file; flags win. After
//! defaults are filled in, the section is echoed verbatim into the report,
//! so a report's `config` object is itself a valid config file.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use dotphase::{ComparisonMode, GateMode};

use crate::error::{CliError, Result};

/// An angle in radians. Parsed from a bare number or a number with a
/// `rad` suffix (radians) or `turn` suffix (fraction of 2π).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle(pub f64);

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let (number, scale) =
            if let Some(n) = s.strip_suffix("turns").or_else(|| s.strip_suffix("turn")) {
                (n, std::f64::consts::TAU)
            } else if let Some(n) = s.strip_suffix("rad") {
                (n, 1.0)
            } else {
                (s, 1.0)
            };
        let x: f64 = number
            .trim()
            .parse()
            .map_err(|_| format!("invalid angle '{s}' (use radians, '<x>rad' or '<x>turn')"))?;
        if !x.is_finite() {
            return Err(format!("angle '{s}' is not finite"));
        }
        Ok(Angle(x * scale))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(Angle(x)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}

fn parse_gate_mode(s: &str) -> std::result::Result<GateMode, String> {
    match s {
        "ideal" => Ok(GateMode::Ideal),
        "pulse-literal" => Ok(GateMode::PulseLiteral),
        other => Err(format!(
            "unknown gate mode '{other}' (ideal, pulse-literal)"
        )),
    }
}

fn parse_comparison(s: &str) -> std::result::Result<ComparisonMode, String> {
    match s {
        "paper-literal" => Ok(ComparisonMode::PaperLiteral),
        "deviation" => Ok(ComparisonMode::Deviation),
        other => Err(format!(
            "unknown comparison mode '{other}' (paper-literal, deviation)"
        )),
    }
}

// Fills every `None` field of `$a` from `$b`.
macro_rules! layer {
    ($a:expr, $b:expr; $($f:ident),+ $(,)?) => {
        $( if $a.$f.is_none() { $a.$f = $b.$f; } )+
    };
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateArgs {
    /// Register size m.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Accuracy bits n used for the success probability (default max(1, m-2)).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// True phase in (0, 2π]: radians, '<x>rad' or '<x>turn'.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Angle>,
    /// ideal | pulse-literal
    #[arg(long, value_parser = parse_gate_mode)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_mode: Option<GateMode>,
    /// Hold an explicit target qubit in |1⟩ and use controlled-phase kicks.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub include_target_qubit: Option<bool>,
    /// Number of sampled shots; 0 reports the exact distribution.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Emit the full readout distribution (default only when 2^m ≤ 4096).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<bool>,
}

impl EstimateArgs {
    fn layer(&mut self, file: EstimateArgs) {
        layer!(self, file; m, n, phi, gate_mode, include_target_qubit, shots, distribution);
    }

    fn fill_defaults(&mut self) -> Result<()> {
        let m = self
            .m
            .ok_or_else(|| CliError::usage("estimate: --m is required"))?;
        if self.phi.is_none() {
            return Err(CliError::usage("estimate: --phi is required"));
        }
        self.n.get_or_insert(m.saturating_sub(2).max(1));
        self.gate_mode.get_or_insert(GateMode::Ideal);
        self.include_target_qubit.get_or_insert(false);
        self.shots.get_or_insert(0);
        self.distribution.get_or_insert(m <= 12);
        Ok(())
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Register sizes, comma separated.
    #[arg(long = "m", value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<usize>>,
    /// Accuracy bits n.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Explicit phases, comma separated.
    #[arg(long = "phi", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phis: Option<Vec<Angle>>,
    /// Additional phases drawn uniformly from (0, 2π] with the run seed.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_phis: Option<usize>,
    #[arg(long, value_parser = parse_gate_mode)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate_mode: Option<GateMode>,
}

impl SweepArgs {
    fn layer(&mut self, file: SweepArgs) {
        layer!(self, file; m_values, n, phis, random_phis, gate_mode);
    }

    fn fill_defaults(&mut self) -> Result<()> {
        if self.m_values.as_ref().map_or(true, Vec::is_empty) {
            return Err(CliError::usage(
                "sweep: --m needs at least one register size",
            ));
        }
        if self.n.is_none() {
            return Err(CliError::usage("sweep: --n is required"));
        }
        self.phis.get_or_insert_with(Vec::new);
        self.random_phis.get_or_insert(0);
        self.gate_mode.get_or_insert(GateMode::Ideal);
        Ok(())
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseFitArgs {
    /// hadamard | phase:<angle> | paper-hadamard | paper-phase:<angle>
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Target as 8 reals, row-major (re, im) pairs, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<f64>>,
}

impl PulseFitArgs {
    fn layer(&mut self, file: PulseFitArgs) {
        // A target given on the command line replaces the file's target.
        if self.preset.is_some() || self.matrix.is_some() {
            return;
        }
        layer!(self, file; preset, matrix);
    }

    fn fill_defaults(&mut self) -> Result<()> {
        match (&self.preset, &self.matrix) {
            (Some(_), Some(_)) => Err(CliError::usage(
                "pulse-fit: give either --preset or --matrix, not both",
            )),
            (None, None) => Err(CliError::usage(
                "pulse-fit: --preset or --matrix is required",
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateClockArgs {
    /// Duration measured by the clock under test (s).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    /// Phase fraction ϕ in [0, 1) obtained from a previous estimation.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varphi: Option<f64>,
    /// Estimate the duration through an m-bit phase estimation first.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub register_bits: Option<usize>,
    /// Phase ratio η in percent (defaults to the estimate's η, or 100).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_percent: Option<f64>,
    /// Total scale marks O of the clock.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_total: Option<u64>,
    /// Marks h elapsed during the duration.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales_elapsed: Option<u64>,
    /// Full-circle period of the reference clock (s).
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal_time_s: Option<f64>,
    /// deviation | paper-literal
    #[arg(long, value_parser = parse_comparison)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison_mode: Option<ComparisonMode>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varpi: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_vac: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r63: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl CalibrateClockArgs {
    fn layer(&mut self, file: CalibrateClockArgs) {
        layer!(self, file;
            duration_s, varphi, register_bits, eta_percent, scale_total, scales_elapsed,
            ideal_time_s, comparison_mode, varpi, n0, n_vac, r63, field, v, c);
    }

    fn fill_defaults(&mut self) -> Result<()> {
        match (self.duration_s, self.varphi) {
            (Some(_), Some(_)) => {
                return Err(CliError::usage(
                    "calibrate-clock: give either --duration-s or --varphi, not both",
                ))
            }
            (None, None) => {
                return Err(CliError::usage(
                    "calibrate-clock: --duration-s or --varphi is required",
                ))
            }
            _ => {}
        }
        for (name, missing) in [
            ("--scale-total", self.scale_total.is_none()),
            ("--scales-elapsed", self.scales_elapsed.is_none()),
            ("--ideal-time-s", self.ideal_time_s.is_none()),
        ] {
            if missing {
                return Err(CliError::usage(format!(
                    "calibrate-clock: {name} is required"
                )));
            }
        }
        let eo = dotphase::ElectroOpticParams::default();
        self.comparison_mode
            .get_or_insert(ComparisonMode::Deviation);
        self.varpi.get_or_insert(eo.varpi);
        self.n0.get_or_insert(eo.n0);
        self.n_vac.get_or_insert(eo.n_vac);
        self.r63.get_or_insert(eo.r63);
        self.field.get_or_insert(eo.field);
        self.v.get_or_insert(eo.v);
        self.c.get_or_insert(eo.c);
        Ok(())
    }

    pub fn electro_optic(&self) -> dotphase::ElectroOpticParams {
        let d = dotphase::ElectroOpticParams::default();
        dotphase::ElectroOpticParams {
            varpi: self.varpi.unwrap_or(d.varpi),
            n0: self.n0.unwrap_or(d.n0),
            n_vac: self.n_vac.unwrap_or(d.n_vac),
            r63: self.r63.unwrap_or(d.r63),
            field: self.field.unwrap_or(d.field),
            v: self.v.unwrap_or(d.v),
            c: self.c.unwrap_or(d.c),
        }
    }
}

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibilityArgs {
    /// Register size n for the protocol time.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega1_mev: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega2_mev: Option<f64>,
    /// Cavity coupling Ω_c in MHz.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_c_mhz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_mev: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tunneling_mev: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level_split_mev: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_time_s: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub single_gate_time_s: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_gate_time_s: Option<f64>,
}

impl FeasibilityArgs {
    fn layer(&mut self, file: FeasibilityArgs) {
        layer!(self, file;
            n, omega1_mev, omega2_mev, omega_c_mhz, delta_mev, tunneling_mev, level_split_mev,
            coherence_time_s, single_gate_time_s, two_gate_time_s);
    }

    fn fill_defaults(&mut self) -> Result<()> {
        let d = dotphase::PhysicalParams::default();
        self.n.get_or_insert(450);
        self.omega1_mev.get_or_insert(d.omega1_mev);
        self.omega2_mev.get_or_insert(d.omega2_mev);
        self.omega_c_mhz.get_or_insert(d.omega_c.value);
        self.delta_mev.get_or_insert(d.delta_mev);
        self.tunneling_mev.get_or_insert(d.tunneling_mev);
        self.level_split_mev.get_or_insert(d.level_split_mev);
        self.coherence_time_s.get_or_insert(d.coherence_time_s);
        self.single_gate_time_s.get_or_insert(d.single_gate_time_s);
        self.two_gate_time_s.get_or_insert(d.two_gate_time_s);
        Ok(())
    }

    pub fn physical(&self) -> dotphase::PhysicalParams {
        let d = dotphase::PhysicalParams::default();
        dotphase::PhysicalParams {
            omega1_mev: self.omega1_mev.unwrap_or(d.omega1_mev),
            omega2_mev: self.omega2_mev.unwrap_or(d.omega2_mev),
            omega_c: dotphase::Frequency::new(
                self.omega_c_mhz.unwrap_or(d.omega_c.value),
                dotphase::FrequencyUnit::MHz,
            ),
            delta_mev: self.delta_mev.unwrap_or(d.delta_mev),
            tunneling_mev: self.tunneling_mev.unwrap_or(d.tunneling_mev),
            level_split_mev: self.level_split_mev.unwrap_or(d.level_split_mev),
            coherence_time_s: self.coherence_time_s.unwrap_or(d.coherence_time_s),
            single_gate_time_s: self.single_gate_time_s.unwrap_or(d.single_gate_time_s),
            two_gate_time_s: self.two_gate_time_s.unwrap_or(d.two_gate_time_s),
            levels_mev: None,
        }
    }
}

/// Which subcommand a configuration drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Estimate,
    Sweep,
    PulseFit,
    CalibrateClock,
    Feasibility,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Estimate => "estimate",
            CommandKind::Sweep => "sweep",
            CommandKind::PulseFit => "pulse-fit",
            CommandKind::CalibrateClock => "calibrate-clock",
            CommandKind::Feasibility => "feasibility",
        }
    }
}

/// The whole run configuration; also the layout of a config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse_fit: Option<PulseFitArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrate_clock: Option<CalibrateClockArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<FeasibilityArgs>,
}

/// Section given on the command line for the chosen subcommand.
#[derive(Clone, Debug)]
pub enum SectionFlags {
    Estimate(EstimateArgs),
    Sweep(SweepArgs),
    PulseFit(PulseFitArgs),
    CalibrateClock(CalibrateClockArgs),
    Feasibility(FeasibilityArgs),
}

impl SectionFlags {
    pub fn kind(&self) -> CommandKind {
        match self {
            SectionFlags::Estimate(_) => CommandKind::Estimate,
            SectionFlags::Sweep(_) => CommandKind::Sweep,
            SectionFlags::PulseFit(_) => CommandKind::PulseFit,
            SectionFlags::CalibrateClock(_) => CommandKind::CalibrateClock,
            SectionFlags::Feasibility(_) => CommandKind::Feasibility,
        }
    }

    /// An empty section of the given kind (no flags set).
    pub fn empty(kind: CommandKind) -> Self {
        match kind {
            CommandKind::Estimate => SectionFlags::Estimate(Default::default()),
            CommandKind::Sweep => SectionFlags::Sweep(Default::default()),
            CommandKind::PulseFit => SectionFlags::PulseFit(Default::default()),
            CommandKind::CalibrateClock => SectionFlags::CalibrateClock(Default::default()),
            CommandKind::Feasibility => SectionFlags::Feasibility(Default::default()),
        }
    }
}

/// Top-level flags shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct GlobalFlags {
    pub seed: Option<u64>,
    pub output_path: Option<String>,
    pub output_format: Option<OutputFormat>,
}

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "DOTPHASE_OUTPUT_DIR";

/// Reads a config file. `.json` files are JSON, anything else TOML. A JSON
/// report (an object with `config` and `results`) yields its `config`.
pub fn load_file(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
    let is_json = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        let value = match value {
            serde_json::Value::Object(mut obj)
                if obj.contains_key("config") && obj.contains_key("results") =>
            {
                obj.remove("config").unwrap_or_default()
            }
            other => other,
        };
        serde_json::from_value(value)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    } else {
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

/// Layers flags over the file, fills defaults, and validates presence of
/// required fields. The result is the config echoed into the report.
pub fn resolve(
    global: GlobalFlags,
    section: SectionFlags,
    file: Option<RunConfig>,
) -> Result<RunConfig> {
    let file = file.unwrap_or_default();
    let kind = section.kind();
    if let Some(other) = file.command {
        if other != kind {
            return Err(CliError::usage(format!(
                "config file is for '{}' but '{}' was requested",
                other.name(),
                kind.name()
            )));
        }
    }
    let mut out = RunConfig {
        command: Some(kind),
        seed: Some(global.seed.or(file.seed).unwrap_or(0)),
        output_path: global.output_path.or(file.output_path),
        output_format: Some(
            global
                .output_format
                .or(file.output_format)
                .unwrap_or(OutputFormat::Json),
        ),
        ..RunConfig::default()
    };
    match section {
        SectionFlags::Estimate(mut a) => {
            if let Some(f) = file.estimate {
                a.layer(f);
            }
            a.fill_defaults()?;
            out.estimate = Some(a);
        }
        SectionFlags::Sweep(mut a) => {
            if let Some(f) = file.sweep {
                a.layer(f);
            }
            a.fill_defaults()?;
            out.sweep = Some(a);
        }
        SectionFlags::PulseFit(mut a) => {
            if let Some(f) = file.pulse_fit {
                a.layer(f);
            }
            a.fill_defaults()?;
            out.pulse_fit = Some(a);
        }
        SectionFlags::CalibrateClock(mut a) => {
            if let Some(f) = file.calibrate_clock {
                a.layer(f);
            }
            a.fill_defaults()?;
            out.calibrate_clock = Some(a);
        }
        SectionFlags::Feasibility(mut a) => {
            if let Some(f) = file.feasibility {
                a.layer(f);
            }
            a.fill_defaults()?;
            out.feasibility = Some(a);
        }
    }
    if out.output_format == Some(OutputFormat::Csv) && kind != CommandKind::Sweep {
        return Err(CliError::usage(format!(
            "csv output is only available for sweep, not '{}'",
            kind.name()
        )));
    }
    Ok(out)
}
