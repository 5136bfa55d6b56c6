//! Executable checks of identities, inequalities and convergence claims.
//!
//! Inequality checks are two-phase: a constant is fitted on a calibration
//! corpus and asserted on a disjoint test corpus. A check whose hypothesis
//! fails at runtime is reported as vacuous, never as a pass.

mod calibrate;
mod convergence;
mod identities;
mod inequalities;
mod suite;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use calibrate::{
    calibrate_constants, energy_fit, lipschitz_fit, CalibrationCorpus, EnergyFit, C2_FLOOR, MIN_CORPUS,
};
pub use convergence::{check_contraction, eps_convergence, ContractionInput};
pub use identities::{check_l2_dissipation, check_linear_identity, check_scaling, check_t_oracle, dense_t};
pub use inequalities::{
    check_energy_inequality, check_interpolation, check_lipschitz_budget, check_log_bound, check_phi_machinery,
    check_r_eps_scaling, check_small_data_decay, interpolation_ratios,
};
pub use suite::{run_check, run_suite, suite_checks, SuiteContext, CHECK_NAMES, SUITES};

use crate::error::Result;
use crate::io::{fmt_f64, write_atomic};
use crate::spectral::{hs_norm, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

/// Outcome of one check, with every measured value and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub measured: BTreeMap<String, f64>,
    pub series: BTreeMap<String, Vec<f64>>,
    pub tolerance: BTreeMap<String, f64>,
    pub fitted: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub artifacts: Vec<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::Fail,
            measured: BTreeMap::new(),
            series: BTreeMap::new(),
            tolerance: BTreeMap::new(),
            fitted: BTreeMap::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn measure(&mut self, key: &str, v: f64) -> &mut Self {
        self.measured.insert(key.into(), v);
        self
    }

    pub fn series(&mut self, key: &str, v: Vec<f64>) -> &mut Self {
        self.series.insert(key.into(), v);
        self
    }

    pub fn tol(&mut self, key: &str, v: f64) -> &mut Self {
        self.tolerance.insert(key.into(), v);
        self
    }

    pub fn fit(&mut self, key: &str, v: f64) -> &mut Self {
        self.fitted.insert(key.into(), v);
        self
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes.push(s.into());
        self
    }

    /// Sets pass or fail unless the result is already vacuous.
    pub fn decide(&mut self, pass: bool) -> &mut Self {
        if self.verdict != Verdict::Vacuous {
            self.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
        }
        self
    }

    pub fn vacuous(&mut self, why: impl Into<String>) -> &mut Self {
        self.verdict = Verdict::Vacuous;
        self.note(why)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One line: name, verdict and the measured values.
    pub fn summary_line(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Vacuous => "VACUOUS",
        };
        let measured: Vec<String> = self.measured.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect();
        format!("{verdict:<7} {:<20} {}", self.name, measured.join(" "))
    }
}

/// Human-readable report of many results.
pub fn text_summary(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&r.summary_line());
        out.push('\n');
        for n in &r.notes {
            out.push_str("        ");
            out.push_str(n);
            out.push('\n');
        }
    }
    let failed = results.iter().filter(|r| r.verdict == Verdict::Fail).count();
    let vacuous = results.iter().filter(|r| r.verdict == Verdict::Vacuous).count();
    out.push_str(&format!(
        "{} checks, {} failed, {} vacuous\n",
        results.len(),
        failed,
        vacuous
    ));
    out
}

/// Tolerances of every check, overridable by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub linear_identity: f64,
    pub t_oracle: f64,
    pub l2_dissipation: f64,
    pub l2_cadence_gain: f64,
    pub decay_slack: f64,
    pub scaling: f64,
    pub scaling_refinement_gain: f64,
    pub critical_norms: f64,
    pub r_eps_spread: f64,
    pub eps_rate: f64,
    pub envelope: f64,
    pub contraction_identical: f64,
    pub contraction_spread: f64,
    pub lipschitz_spread: f64,
    pub energy_spread: f64,
    pub phi_norm_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            linear_identity: 2e-2,
            t_oracle: 1e-6,
            l2_dissipation: 1e-4,
            l2_cadence_gain: 3.5,
            decay_slack: 1e-10,
            scaling: 1e-3,
            scaling_refinement_gain: 2.0,
            critical_norms: 5e-3,
            r_eps_spread: 4.0,
            eps_rate: 0.4,
            envelope: 1.1,
            contraction_identical: 1e-10,
            contraction_spread: 2.0,
            lipschitz_spread: 4.0,
            energy_spread: 4.0,
            phi_norm_factor: 2.0,
        }
    }
}

/// Where checks write their CSV artifacts; `None` keeps them in memory.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub dir: Option<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    /// Writes the series of `result` as `series.csv`.
    pub fn save_series(&self, result: &mut CheckResult) -> Result<()> {
        let bytes = series_csv(result);
        self.save(result, "series.csv", &bytes)
    }

    /// Writes `bytes` to `<dir>/<check>/<file>` and records the path.
    pub fn save(&self, result: &mut CheckResult, file: &str, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = &self.dir {
            let path = dir.join(&result.name).join(file);
            write_atomic(&path, bytes)?;
            result.artifacts.push(path.display().to_string());
        }
        Ok(())
    }
}

/// The series of a result as columns, shorter ones padded with empty cells.
pub fn series_csv(result: &CheckResult) -> Vec<u8> {
    let keys: Vec<&String> = result.series.keys().collect();
    let rows = result.series.values().map(Vec::len).max().unwrap_or(0);
    let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for j in 0..rows {
        let cells: Vec<String> = result
            .series
            .values()
            .map(|v| v.get(j).map(|&x| fmt_f64(x)).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// `‖f - g‖_{Ḣ^{1/2}}`.
pub fn h12_distance(f: &Field, g: &Field) -> Result<f64> {
    Ok(hs_norm(&f.sub(g)?, 0.5))
}

/// Trapezoid rule on samples `(t_j, y_j)`.
pub fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    t.windows(2)
        .zip(y.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}

/// Running trapezoid integral, starting at 0.
pub fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    for j in 1..t.len() {
        out[j] = out[j - 1] + 0.5 * (t[j] - t[j - 1]) * (y[j] + y[j - 1]);
    }
    out
}

/// `max / min` of positive values; `+∞` if any value is not positive.
pub fn spread(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo > 0.0 && hi.is_finite() {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// `max / min` of values sharing one sign, by magnitude.
pub fn signed_spread(values: &[f64]) -> f64 {
    if values.iter().all(|&v| v < 0.0) {
        let m: Vec<f64> = values.iter().map(|v| -v).collect();
        spread(&m)
    } else {
        spread(values)
    }
}
