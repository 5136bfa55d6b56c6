use rayon::prelude::*;

use crate::constants::{ConstantSet, Provenance};
use crate::corpus::{normalize_h32, random_bandlimited};
use crate::error::{Error, Result};
use crate::functionals::ReportContext;
use crate::phi::PhiWeight;
use crate::rhs::{QuadratureSpec, RegularizationParams};
use crate::spectral::{Field, Grid};
use crate::stepper::{evolve, EvolveOptions, StepperSpec, Trajectory};

/// Lower bound on a fitted `C2`.
pub const C2_FLOOR: f64 = 1e-3;

/// Fewest runs a calibration accepts.
pub const MIN_CORPUS: usize = 10;

/// A family of regularized runs from which constants are fitted.
#[derive(Debug, Clone)]
pub struct CalibrationCorpus {
    pub fields: Vec<Field>,
    pub params: RegularizationParams,
    pub spec: StepperSpec,
    pub quad: QuadratureSpec,
}

impl CalibrationCorpus {
    /// `count` random band-limited fields on modes `1..=8`, normalized to
    /// `‖f‖_{Ḣ^{3/2}} = h32`, with `N = 128`, `ε = 1e-2` and `t ∈ [0, 0.5]`.
    pub fn small_random(count: usize, h32: f64, seed: u64) -> Result<Self> {
        let grid = Grid::new(2.0 * std::f64::consts::PI, 128)?;
        let fields = (0..count as u64)
            .map(|i| normalize_h32(&random_bandlimited(grid, 1, 8, 1.0, seed + i)?, h32))
            .collect::<Result<_>>()?;
        Ok(Self {
            fields,
            params: RegularizationParams::new(1e-2, RegularizationParams::DEFAULT_BETA)?,
            spec: StepperSpec::new(0.5, 0.025),
            quad: QuadratureSpec::default(),
        })
    }

    /// Runs every field with `φ ≡ 1`; a halted run is an error.
    pub fn run(&self) -> Result<Vec<Trajectory>> {
        if self.fields.is_empty() {
            return Err(Error::Calibration("calibration corpus is empty".into()));
        }
        if self.fields.len() < MIN_CORPUS {
            return Err(Error::Calibration(format!(
                "calibration needs at least {MIN_CORPUS} runs, got {}",
                self.fields.len()
            )));
        }
        let ctx = ReportContext::new(PhiWeight::one(), self.quad, self.params.beta, ConstantSet::default());
        let out: Vec<Trajectory> = self
            .fields
            .par_iter()
            .map(|f| evolve(f, &self.params, &self.quad, &self.spec, &ctx, EvolveOptions::default()))
            .collect::<Result<_>>()?;
        for (i, t) in out.iter().enumerate() {
            if t.status.is_halted() {
                return Err(Error::Calibration(format!(
                    "corpus run {i} stopped with {}",
                    t.status.as_str()
                )));
            }
        }
        Ok(out)
    }
}

/// Smallest `C0` with `Δlip/Δt <= C0 (⟨‖f‖²_{Ḣ²}⟩ + ε^β ⟨holder⟩)` on every
/// report interval, where `⟨·⟩` is the interval mean. May be negative.
pub fn lipschitz_fit(traj: &Trajectory, eps: f64, beta: f64) -> f64 {
    let w = eps.powf(beta);
    let mut fit = f64::NEG_INFINITY;
    for p in traj.rows.windows(2) {
        let (a, b) = (&p[0].report, &p[1].report);
        let dt = b.t - a.t;
        if dt <= 0.0 {
            continue;
        }
        let slope = (b.lip - a.lip) / dt;
        let budget = 0.5 * (a.h2().powi(2) + b.h2().powi(2)) + w * 0.5 * (a.holder_c2beta + b.holder_c2beta);
        if budget > 0.0 {
            fit = fit.max(slope / budget);
        } else if slope > 0.0 {
            return f64::INFINITY;
        }
    }
    fit
}

/// Interval terms of the energy inequality: the dissipation
/// `D = -ΔA/Δt - ν⟨P⟩`, the coercive weight `w = ⟨B/(1 + lip²)⟩` and the
/// growth weight `v = ⟨(√A + A) μ B⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyFit {
    pub d: Vec<f64>,
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl EnergyFit {
    /// `min D/w` over intervals with `w > 0`.
    pub fn coercive_ratio(&self) -> f64 {
        self.d
            .iter()
            .zip(&self.w)
            .filter(|(_, &w)| w > 0.0)
            .map(|(d, w)| d / w)
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest `C2` with `-D + C1 w <= C2 v` on every interval; `-∞` when
    /// no interval constrains it.
    pub fn required_c2(&self, c1: f64) -> f64 {
        let mut c2 = f64::NEG_INFINITY;
        for ((d, w), v) in self.d.iter().zip(&self.w).zip(&self.v) {
            let excess = c1 * w - d;
            if *v > 0.0 {
                c2 = c2.max(excess / v);
            } else if excess > 0.0 {
                return f64::INFINITY;
            }
        }
        c2
    }
}

pub fn energy_fit(traj: &Trajectory) -> EnergyFit {
    let mut fit = EnergyFit {
        d: Vec::new(),
        w: Vec::new(),
        v: Vec::new(),
    };
    for p in traj.rows.windows(2) {
        let (a, b) = (&p[0].report, &p[1].report);
        let dt = b.t - a.t;
        if dt <= 0.0 {
            continue;
        }
        let mean = |g: &dyn Fn(&crate::functionals::EnergyReport) -> f64| 0.5 * (g(a) + g(b));
        fit.d.push(-(b.a_phi - a.a_phi) / dt - traj.nu * mean(&|r| r.p_phi));
        fit.w.push(mean(&|r| r.b_phi / (1.0 + r.lip * r.lip)));
        fit.v.push(mean(&|r| (r.a_phi.sqrt() + r.a_phi) * r.mu_phi * r.b_phi));
    }
    fit
}

/// Fits `C0`, `C1`, `C2` on the corpus runs with a safety factor of 2:
/// `C0 = max(1, 2 max fit)`, `C1 = min D/w / 2` and
/// `C2 = 2 max(C2_FLOOR, required C2)`.
pub fn calibrate_constants(corpus: &CalibrationCorpus) -> Result<ConstantSet> {
    let runs = corpus.run()?;
    let eps = corpus.params.eps.unwrap_or(0.0);
    let lip = runs
        .iter()
        .map(|t| lipschitz_fit(t, eps, corpus.params.beta))
        .fold(f64::NEG_INFINITY, f64::max);
    let fits: Vec<EnergyFit> = runs.iter().map(energy_fit).collect();
    let ratio = fits.iter().map(EnergyFit::coercive_ratio).fold(f64::INFINITY, f64::min);
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Calibration(format!(
            "corpus shows no coercive dissipation (min D/w = {ratio})"
        )));
    }
    let c1 = 0.5 * ratio;
    let c2 = fits.iter().map(|f| f.required_c2(c1)).fold(C2_FLOOR, f64::max);
    if lip == f64::INFINITY || lip.is_nan() || !c2.is_finite() {
        return Err(Error::Calibration("fitted constant is not finite".into()));
    }
    ConstantSet::new((2.0 * lip).max(1.0), c1, 2.0 * c2, Provenance::Calibrated)
}
