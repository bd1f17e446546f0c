//! Scenario sweeps, estimation runs and config validation behind the
//! `cv-thermo` binary.
//!
//! A config is a flat TOML table. Scenario presets supply defaults, the file
//! overrides them and command-line flags override the file.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::estimator::{
    mse_study, sample_with, trial_rng, write_samples, EstimationReport, HomodyneModel, JointModel,
    VarianceModel, STEADY_STATE_GAMMA_T,
};
use crate::fisher::{
    cfi_homodyne_approx, cfi_homodyne_closed, cfi_joint_two_mode, classical_bound,
    optimize_gaussian_measurement, qfi, qfi_rate_single_closed, squeezed_probe, tmsv_probe,
    FisherResult,
};
use crate::gaussian::vacuum;
use crate::optimize::{linear_grid, log_grid};

/// Significant digits written to CSV files.
pub const CSV_DIGITS: usize = 12;

/// Default grid in γt.
pub const DEFAULT_GAMMA_T_MIN: f64 = 1e-4;
pub const DEFAULT_GAMMA_T_MAX: f64 = 30.0;
pub const DEFAULT_POINTS: usize = 121;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Fig3,
    Fig4,
    Fig6,
    AppendixB,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Fig3,
        Scenario::Fig4,
        Scenario::Fig6,
        Scenario::AppendixB,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Fig6 => "fig6",
            Scenario::AppendixB => "appendix-b",
            Scenario::Custom => "custom",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                format!("unknown scenario `{s}` (expected fig3, fig4, fig6, appendix-b or custom)")
            })
    }
}

/// Quantities selectable in the custom scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Qfi,
    QfiRate,
    CfiHom,
    CfiHomRate,
    CfiJoint,
    CfiJointRate,
    ClassicalBound,
    CfiOptGaussian,
}

impl Quantity {
    pub const ALL: [Quantity; 8] = [
        Quantity::Qfi,
        Quantity::QfiRate,
        Quantity::CfiHom,
        Quantity::CfiHomRate,
        Quantity::CfiJoint,
        Quantity::CfiJointRate,
        Quantity::ClassicalBound,
        Quantity::CfiOptGaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Qfi => "qfi",
            Quantity::QfiRate => "qfi_rate",
            Quantity::CfiHom => "cfi_hom",
            Quantity::CfiHomRate => "cfi_hom_rate",
            Quantity::CfiJoint => "cfi_joint",
            Quantity::CfiJointRate => "cfi_joint_rate",
            Quantity::ClassicalBound => "classical_bound",
            Quantity::CfiOptGaussian => "cfi_opt_gaussian",
        }
    }

    /// Rates divide by t and need t > 0.
    pub fn is_rate(self) -> bool {
        matches!(
            self,
            Quantity::QfiRate
                | Quantity::CfiHomRate
                | Quantity::CfiJointRate
                | Quantity::ClassicalBound
        )
    }

    pub fn needs_entanglement(self) -> bool {
        matches!(self, Quantity::CfiJoint | Quantity::CfiJointRate)
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| format!("unknown quantity `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "linear" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            _ => Err(format!("unknown spacing `{s}` (expected linear or log)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    Homodyne,
    Joint,
}

impl FromStr for MeasurementKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "homodyne" => Ok(MeasurementKind::Homodyne),
            "joint" => Ok(MeasurementKind::Joint),
            _ => Err(format!(
                "unknown measurement `{s}` (expected homodyne or joint)"
            )),
        }
    }
}

/// Raw config as read from TOML; every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Option<String>,
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    /// Temperatures of the appendix-b scenario.
    pub temperatures: Option<Vec<f64>>,
    pub omega: Option<f64>,
    pub gamma: Option<f64>,
    pub r: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<String>,
    pub quantities: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub out: Option<String>,
    /// Interrogation time of estimation runs; absent means steady state.
    pub t_est: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub measurement: Option<String>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("invalid config: {}", e.message()))
    }

    pub fn load(path: &Path) -> std::result::Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text)
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merged(mut self, other: &SweepConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(if other.$f.is_some() { self.$f = other.$f.clone(); })*};
        }
        take!(
            scenario,
            temperature,
            temperatures,
            omega,
            gamma,
            r,
            t_min,
            t_max,
            points,
            spacing,
            quantities,
            seed,
            out,
            t_est,
            l,
            measurement
        );
        self
    }
}

/// A fully resolved sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub scenario: Scenario,
    pub temperature: f64,
    pub temperatures: Vec<f64>,
    pub omega: f64,
    pub gamma: f64,
    pub r: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub quantities: Vec<Quantity>,
    pub seed: u64,
    pub out: Option<String>,
}

/// Preset parameters of a scenario before any overrides.
pub fn preset(scenario: Scenario) -> SweepConfig {
    let gamma = match scenario {
        Scenario::AppendixB => 0.1,
        _ => 0.2,
    };
    SweepConfig {
        scenario: Some(scenario.name().into()),
        temperature: Some(1.0),
        temperatures: Some(vec![0.2, 5.0]),
        omega: Some(1.0),
        gamma: Some(gamma),
        r: Some(1e-3),
        points: Some(DEFAULT_POINTS),
        spacing: Some("log".into()),
        seed: Some(0),
        ..SweepConfig::default()
    }
}

fn positive(name: &str, v: f64, problems: &mut Vec<String>) {
    if !(v > 0.0 && v.is_finite()) {
        problems.push(format!("{name} must be positive, got {v}"));
    }
}

impl SweepSpec {
    /// Applies the scenario preset under `config` and checks every
    /// invariant, returning all violations at once.
    pub fn resolve(config: &SweepConfig) -> std::result::Result<Self, Vec<String>> {
        let mut problems = Vec::new();
        // without an explicit scenario, a quantities list means custom
        let default = if config.quantities.is_some() {
            "custom"
        } else {
            "fig3"
        };
        let scenario = match config
            .scenario
            .as_deref()
            .unwrap_or(default)
            .parse::<Scenario>()
        {
            Ok(s) => s,
            Err(e) => return Err(vec![e]),
        };
        let c = preset(scenario).merged(config);
        let (temperature, omega, gamma, r) = (
            c.temperature.unwrap_or(1.0),
            c.omega.unwrap_or(1.0),
            c.gamma.unwrap_or(0.2),
            c.r.unwrap_or(1e-3),
        );
        positive("T", temperature, &mut problems);
        positive("omega", omega, &mut problems);
        positive("gamma", gamma, &mut problems);
        if !(r > 0.0 && r <= 1.0) {
            problems.push(format!("r must be in (0,1], got {r}"));
        }
        let temperatures = c.temperatures.clone().unwrap_or_default();
        if scenario == Scenario::AppendixB {
            if temperatures.is_empty() {
                problems.push("temperatures must list at least one value".into());
            }
            for &tt in &temperatures {
                positive("temperatures entry", tt, &mut problems);
            }
        }
        let points = c.points.unwrap_or(DEFAULT_POINTS);
        if points < 2 {
            problems.push(format!("points must be at least 2, got {points}"));
        }
        let spacing = match c.spacing.as_deref().unwrap_or("log").parse::<Spacing>() {
            Ok(s) => s,
            Err(e) => {
                problems.push(e);
                Spacing::Log
            }
        };
        let g = if gamma > 0.0 { gamma } else { 1.0 };
        let t_min = c.t_min.unwrap_or(DEFAULT_GAMMA_T_MIN / g);
        let t_max = c.t_max.unwrap_or(DEFAULT_GAMMA_T_MAX / g);
        if !(t_min >= 0.0 && t_min.is_finite()) {
            problems.push(format!("t_min must be finite and >= 0, got {t_min}"));
        }
        if !(t_max > t_min && t_max.is_finite()) {
            problems.push(format!("t_max must exceed t_min, got [{t_min}, {t_max}]"));
        }

        let mut quantities = Vec::new();
        match (&c.quantities, scenario) {
            (Some(names), Scenario::Custom) => {
                for n in names {
                    match n.parse::<Quantity>() {
                        Ok(q) => quantities.push(q),
                        Err(e) => problems.push(e),
                    }
                }
                if names.is_empty() {
                    problems.push("quantities must not be empty for the custom scenario".into());
                }
            }
            (None, Scenario::Custom) => {
                problems.push("the custom scenario needs a quantities list".into())
            }
            (Some(_), _) => problems.push(format!(
                "quantities can only be chosen with scenario = \"custom\", not {}",
                scenario.name()
            )),
            (None, _) => {}
        }
        let columns = columns(scenario, &quantities, &temperatures);
        if t_min <= 0.0 {
            if let Some(rate) = columns
                .iter()
                .find(|c| c.contains("rate") || c.as_str() == "classical_bound")
            {
                problems.push(format!("t_min must be > 0 for rate quantity `{rate}`"));
            } else if spacing == Spacing::Log {
                problems.push("t_min must be > 0 for a log grid".into());
            }
        }
        let needs_joint =
            matches!(scenario, Scenario::Fig4) || quantities.iter().any(|q| q.needs_entanglement());
        if needs_joint && r == 1.0 {
            problems.push("cfi_joint requires r < 1".into());
        }

        if !problems.is_empty() {
            return Err(problems);
        }
        Ok(Self {
            scenario,
            temperature,
            temperatures,
            omega,
            gamma,
            r,
            t_min,
            t_max,
            points,
            spacing,
            quantities,
            seed: c.seed.unwrap_or(0),
            out: c.out.clone(),
        })
    }

    pub fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.gamma, self.omega, self.temperature)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        match self.spacing {
            Spacing::Linear => linear_grid(self.t_min, self.t_max, self.points),
            Spacing::Log => log_grid(self.t_min, self.t_max, self.points),
        }
    }

    pub fn header(&self) -> Vec<String> {
        columns(self.scenario, &self.quantities, &self.temperatures)
    }
}

fn temp_label(t: f64) -> String {
    format!("T{t}")
}

fn columns(scenario: Scenario, quantities: &[Quantity], temperatures: &[f64]) -> Vec<String> {
    let fixed: &[&str] = match scenario {
        Scenario::Fig3 => &[
            "t",
            "qfi_vacuum",
            "qfi_squeezed",
            "qfi_rate_vacuum",
            "qfi_rate_squeezed",
            "cfi_opt_gaussian_vacuum",
            "cfi_opt_gaussian_squeezed",
        ],
        Scenario::Fig4 => &[
            "t",
            "qfi_single",
            "qfi_rate_single",
            "qfi_two_mode",
            "qfi_rate_two_mode",
            "cfi_hom",
            "cfi_hom_rate",
            "cfi_joint",
            "cfi_joint_rate",
        ],
        Scenario::Fig6 => &[
            "t",
            "cfi_hom_exact_squeezed",
            "cfi_hom_approx_squeezed",
            "cfi_hom_exact_vacuum",
            "cfi_hom_approx_vacuum",
        ],
        Scenario::AppendixB => {
            let mut cols = vec!["t".to_string()];
            for &tt in temperatures {
                let l = temp_label(tt);
                for base in [
                    "qfi_vacuum",
                    "qfi_rate_vacuum",
                    "qfi_squeezed",
                    "qfi_rate_squeezed",
                ] {
                    cols.push(format!("{base}_{l}"));
                }
            }
            return cols;
        }
        Scenario::Custom => {
            let mut cols = vec!["t".to_string()];
            cols.extend(quantities.iter().map(|q| q.name().to_string()));
            return cols;
        }
    };
    fixed.iter().map(|s| s.to_string()).collect()
}

fn opt_gaussian(r: f64, p: &ChannelParams, t: f64) -> Result<f64> {
    let (s, d) = if r == 1.0 {
        crate::fisher::evolve_with_derivative(
            &vacuum(1)?,
            p,
            t,
            crate::fisher::DerivativeSpec::Analytic,
        )?
    } else {
        squeezed_probe(r, p, t)?
    };
    Ok(optimize_gaussian_measurement(s.cov(), &d.cov)?.value)
}

fn two_mode_qfi(r: f64, p: &ChannelParams, t: f64) -> Result<FisherResult> {
    let (s, d) = tmsv_probe(r, p, t)?;
    Ok(FisherResult::new(qfi(&s, &d)?, t))
}

/// One CSV row (including t) of `spec` at time `t`.
pub fn row(spec: &SweepSpec, t: f64) -> Result<Vec<f64>> {
    let p = spec.params()?;
    let r = spec.r;
    Ok(match spec.scenario {
        Scenario::Fig3 => {
            let v = classical_bound(&p, t)?;
            let s = qfi_rate_single_closed(r, &p, t)?;
            vec![
                t,
                v.value,
                s.value,
                v.rate,
                s.rate,
                opt_gaussian(1.0, &p, t)?,
                opt_gaussian(r, &p, t)?,
            ]
        }
        Scenario::Fig4 => {
            let s = qfi_rate_single_closed(r, &p, t)?;
            let q2 = two_mode_qfi(r, &p, t)?;
            let h = cfi_homodyne_closed(r, &p, t, 0.0)?;
            let j = cfi_joint_two_mode(r, &p, t)?;
            vec![
                t, s.value, s.rate, q2.value, q2.rate, h.value, h.rate, j.value, j.rate,
            ]
        }
        Scenario::Fig6 => vec![
            t,
            cfi_homodyne_closed(r, &p, t, 0.0)?.value,
            cfi_homodyne_approx(r, &p, t)?.value,
            cfi_homodyne_closed(1.0, &p, t, 0.0)?.value,
            cfi_homodyne_approx(1.0, &p, t)?.value,
        ],
        Scenario::AppendixB => {
            let mut out = vec![t];
            for &tt in &spec.temperatures {
                let pt = p.with_temperature(tt)?;
                let v = classical_bound(&pt, t)?;
                let s = qfi_rate_single_closed(r, &pt, t)?;
                out.extend([v.value, v.rate, s.value, s.rate]);
            }
            out
        }
        Scenario::Custom => {
            let mut out = vec![t];
            for q in &spec.quantities {
                out.push(match q {
                    Quantity::Qfi => qfi_at(r, &p, t)?.value,
                    Quantity::QfiRate => qfi_at(r, &p, t)?.rate,
                    Quantity::CfiHom => cfi_homodyne_closed(r, &p, t, 0.0)?.value,
                    Quantity::CfiHomRate => cfi_homodyne_closed(r, &p, t, 0.0)?.rate,
                    Quantity::CfiJoint => cfi_joint_two_mode(r, &p, t)?.value,
                    Quantity::CfiJointRate => cfi_joint_two_mode(r, &p, t)?.rate,
                    Quantity::ClassicalBound => classical_bound(&p, t)?.rate,
                    Quantity::CfiOptGaussian => opt_gaussian(r, &p, t)?,
                });
            }
            out
        }
    })
}

fn qfi_at(r: f64, p: &ChannelParams, t: f64) -> Result<FisherResult> {
    if t == 0.0 {
        return Ok(FisherResult::new(0.0, 0.0));
    }
    qfi_rate_single_closed(r, p, t)
}

/// Header and rows of a sweep, rows in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// CSV text: header line, then rows with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// Parses text written by [`Table::to_csv`].
    pub fn from_csv(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .ok_or("empty CSV")?
            .split(',')
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if row.len() != header.len() {
                return Err(format!(
                    "row {} has {} cells, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                ));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }
}

/// `v` in scientific notation with [`CSV_DIGITS`] significant digits.
pub fn format_number(v: f64) -> String {
    format!("{:.*e}", CSV_DIGITS - 1, v)
}

/// Evaluates every grid point (in parallel on the current rayon pool).
pub fn run_sweep(spec: &SweepSpec) -> Result<Table> {
    let grid = spec.grid()?;
    let rows = grid
        .par_iter()
        .map(|&t| row(spec, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        header: spec.header(),
        rows,
    })
}

/// Runs `f` on a pool of `threads` workers (0 = one per logical core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Outcome of `validate`: an empty list means the config is fine.
pub fn validate_config(config: &SweepConfig) -> Vec<String> {
    let mut problems = match SweepSpec::resolve(config) {
        Ok(_) => Vec::new(),
        Err(p) => p,
    };
    if let Some(m) = &config.measurement {
        if let Err(e) = m.parse::<MeasurementKind>() {
            problems.push(e);
        }
    }
    if let Some(l) = config.l {
        if !(0.0..=1.0).contains(&l) {
            problems.push(format!("L must be in [0,1], got {l}"));
        }
    }
    if let Some(t) = config.t_est {
        if !(t > 0.0 && t.is_finite()) {
            problems.push(format!("t_est must be positive, got {t}"));
        }
    }
    problems
}

/// Validates the file at `path`; `Err` only when it cannot be read.
pub fn validate_file(path: &Path) -> std::result::Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(match SweepConfig::from_toml(&text) {
        Ok(c) => validate_config(&c),
        Err(e) => vec![e],
    })
}

/// A resolved Cramér–Rao study.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSpec {
    pub temperature: f64,
    pub omega: f64,
    pub gamma: f64,
    pub r: f64,
    /// `None` is steady state (γt = 40).
    pub t: Option<f64>,
    pub l: f64,
    pub measurement: MeasurementKind,
    pub repetitions: usize,
    pub trials: usize,
    pub seed: u64,
}

impl EstimateSpec {
    pub fn from_config(
        config: &SweepConfig,
        repetitions: usize,
        trials: usize,
        seed: u64,
    ) -> std::result::Result<Self, Vec<String>> {
        let problems = validate_config(config);
        if !problems.is_empty() {
            return Err(problems);
        }
        let spec = SweepSpec::resolve(config)?;
        let measurement = config
            .measurement
            .as_deref()
            .unwrap_or("homodyne")
            .parse::<MeasurementKind>()
            .map_err(|e| vec![e])?;
        let mut problems = Vec::new();
        if measurement == MeasurementKind::Joint && config.t_est.is_none() {
            problems.push(
                "the joint measurement needs t_est (its steady state carries no correlations)"
                    .into(),
            );
        }
        if repetitions < 2 {
            problems.push(format!("M must be at least 2, got {repetitions}"));
        }
        if trials < 100 {
            problems.push(format!("trials must be at least 100, got {trials}"));
        }
        if !problems.is_empty() {
            return Err(problems);
        }
        Ok(Self {
            temperature: spec.temperature,
            omega: spec.omega,
            gamma: spec.gamma,
            r: spec.r,
            t: config.t_est,
            l: config.l.unwrap_or(0.0),
            measurement,
            repetitions,
            trials,
            seed,
        })
    }

    pub fn homodyne_model(&self) -> Result<HomodyneModel> {
        match self.t {
            Some(t) => HomodyneModel::new(self.gamma, self.omega, self.r, t, self.l),
            None => HomodyneModel::steady_state(self.gamma, self.omega, self.l),
        }
    }

    pub fn joint_model(&self) -> Result<JointModel> {
        let t = self.t.unwrap_or(STEADY_STATE_GAMMA_T / self.gamma);
        JointModel::new(self.gamma, self.omega, self.r, t)
    }
}

/// A study report plus the invariant checks applied to it.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationOutcome {
    pub report: EstimationReport,
    pub checks: Vec<(&'static str, bool)>,
}

impl EstimationOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    /// The key=value report file.
    pub fn render(&self) -> String {
        let mut s = self.report.to_key_value();
        for (name, ok) in &self.checks {
            let _ = writeln!(s, "check_{name}={}", if *ok { "pass" } else { "fail" });
        }
        let _ = writeln!(s, "status={}", if self.passed() { "pass" } else { "fail" });
        s
    }
}

/// Trials needed before a single report's MSE is compared with 0.85·CRB;
/// the MSE then scatters by about √(2/trials) ≤ 5%.
pub const DIRECTION_MIN_TRIALS: usize = 800;

/// Checks on a report: finite positive bound and ratio; for M ≥ 10³ (and
/// enough trials) the MSE is not far below the bound; for M ≥ 10⁴ the
/// estimator is consistent.
pub fn report_checks(report: &EstimationReport) -> Vec<(&'static str, bool)> {
    let mut checks = vec![
        ("crb_positive", report.crb > 0.0 && report.crb.is_finite()),
        (
            "ratio_positive",
            report.ratio > 0.0 && report.ratio.is_finite(),
        ),
    ];
    if report.repetitions >= 1000 && report.trials >= DIRECTION_MIN_TRIALS {
        checks.push(("crb_direction", report.ratio >= 0.85));
    }
    if report.repetitions >= 10_000 {
        checks.push(("consistency", report.is_consistent()));
    }
    checks
}

pub fn run_estimation(spec: &EstimateSpec) -> Result<EstimationOutcome> {
    let report = match spec.measurement {
        MeasurementKind::Homodyne => mse_study(
            &spec.homodyne_model()?,
            spec.temperature,
            spec.repetitions,
            spec.trials,
            spec.seed,
        )?,
        MeasurementKind::Joint => mse_study(
            &spec.joint_model()?,
            spec.temperature,
            spec.repetitions,
            spec.trials,
            spec.seed,
        )?,
    };
    let checks = report_checks(&report);
    Ok(EstimationOutcome { report, checks })
}

/// Raw outcomes of the first trial of a homodyne study.
pub fn dump_first_trial<W: std::io::Write>(spec: &EstimateSpec, out: &mut W) -> Result<()> {
    let model = spec.homodyne_model()?;
    let mut rng = trial_rng(spec.seed, 0);
    let batch = sample_with(
        &model,
        spec.temperature,
        spec.repetitions,
        &mut rng,
        spec.seed,
    )?;
    write_samples(out, &batch).map_err(|e| Error::Numerical(format!("write failed: {e}")))
}

/// Fisher information per repetition of the configured measurement.
pub fn configured_fisher(spec: &EstimateSpec) -> Result<f64> {
    match spec.measurement {
        MeasurementKind::Homodyne => spec
            .homodyne_model()?
            .fisher_per_repetition(spec.temperature),
        MeasurementKind::Joint => spec.joint_model()?.fisher_per_repetition(spec.temperature),
    }
}
