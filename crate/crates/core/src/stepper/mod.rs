//! Exponential time differencing for `∂_t f = -σ(D) f + G(f)` with
//! `σ(ξ) = ν ξ² + |ξ|` and `G = T(f) f + R_ε(f)`.

mod horizon;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use horizon::{envelope, local_time_horizon};

use crate::error::{config, Error, Result};
use crate::functionals::{EnergyReport, ReportContext};
use crate::rhs::{explicit_part, mollify_initial, QuadratureSpec, RegularizationParams};
use crate::spectral::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Finished,
    HaltedBlowup,
    HaltedResolution,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Running => "running",
            Status::Finished => "finished",
            Status::HaltedBlowup => "halted_blowup",
            Status::HaltedResolution => "halted_resolution",
        }
    }

    pub fn is_halted(self) -> bool {
        matches!(self, Status::HaltedBlowup | Status::HaltedResolution)
    }
}

/// Thresholds of [`blowup_guard`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuardSpec {
    #[serde(default = "default_slope_max")]
    pub slope_max: f64,
    /// Largest admissible fraction of the non-zero spectral mass on `|k| > N/4`.
    #[serde(default = "default_tail_max")]
    pub tail_max: f64,
}

fn default_slope_max() -> f64 {
    50.0
}

fn default_tail_max() -> f64 {
    1e-3
}

impl Default for GuardSpec {
    fn default() -> Self {
        Self {
            slope_max: default_slope_max(),
            tail_max: default_tail_max(),
        }
    }
}

/// Time-integration controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSpec {
    pub t_end: f64,
    #[serde(default = "default_dt0")]
    pub dt0: f64,
    /// Time between reports.
    pub cadence: f64,
    /// Step-doubling tolerance on the relative `L²` difference.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_dt_min")]
    pub dt_min: f64,
    #[serde(default)]
    pub dt_max: Option<f64>,
    /// `false` takes fixed steps of `dt0`.
    #[serde(default = "default_true")]
    pub adaptive: bool,
    #[serde(default)]
    pub guards: GuardSpec,
}

fn default_dt0() -> f64 {
    1e-3
}

fn default_tol() -> f64 {
    1e-8
}

fn default_dt_min() -> f64 {
    1e-12
}

fn default_true() -> bool {
    true
}

impl StepperSpec {
    pub fn new(t_end: f64, cadence: f64) -> Self {
        Self {
            t_end,
            dt0: default_dt0(),
            cadence,
            tol: default_tol(),
            dt_min: default_dt_min(),
            dt_max: None,
            adaptive: true,
            guards: GuardSpec::default(),
        }
    }

    pub fn with_dt0(mut self, dt0: f64) -> Self {
        self.dt0 = dt0;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn fixed(mut self) -> Self {
        self.adaptive = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("stepper.t_end", self.t_end),
            ("stepper.dt0", self.dt0),
            ("stepper.cadence", self.cadence),
            ("stepper.tol", self.tol),
            ("stepper.dt_min", self.dt_min),
            ("stepper.guards.slope_max", self.guards.slope_max),
            ("stepper.guards.tail_max", self.guards.tail_max),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config(format!("{key} must be positive, got {v}")));
            }
        }
        if let Some(d) = self.dt_max {
            if !(d >= self.dt_min && d.is_finite()) {
                return Err(config(format!("stepper.dt_max must be at least dt_min, got {d}")));
            }
        }
        if self.dt0 < self.dt_min {
            return Err(config("stepper.dt0 must be at least stepper.dt_min"));
        }
        if self.t_end / self.cadence > 1e6 {
            return Err(config("stepper.cadence gives more than 10^6 reports"));
        }
        Ok(())
    }

    /// Report times `0, c, 2c, ...` and `t_end`.
    pub fn report_times(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut j = 1u64;
        loop {
            let t = j as f64 * self.cadence;
            if t >= self.t_end * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            j += 1;
        }
        out.push(self.t_end);
        out
    }
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub f: Field,
    pub params: RegularizationParams,
    pub dt: f64,
    pub step_count: u64,
    pub status: Status,
    pub diagnostic: Option<String>,
}

impl SolverState {
    pub fn new(f: Field, params: RegularizationParams, dt: f64) -> Self {
        Self {
            t: 0.0,
            f,
            params,
            dt,
            step_count: 0,
            status: Status::Running,
            diagnostic: None,
        }
    }

    fn halt(mut self, status: Status, why: String) -> Self {
        self.status = status;
        self.diagnostic = Some(why);
        self
    }
}

/// `(e^z - 1)/z` and `(e^z - 1 - z)/z²`.
fn phi_functions(z: f64) -> (f64, f64) {
    if z.abs() < 0.1 {
        let (mut p1, mut p2) = (0.0, 0.0);
        let mut term = 1.0;
        for j in 0..16 {
            p1 += term / (j + 1) as f64;
            p2 += term / ((j + 1) * (j + 2)) as f64;
            term *= z / (j + 1) as f64;
        }
        (p1, p2)
    } else {
        let e = z.exp_m1();
        (e / z, (e - z) / (z * z))
    }
}

/// Mode-wise coefficients `(e^{-σh}, h φ1(-σh), h φ2(-σh))`.
fn etd_coefficients(f: &Field, nu: f64, h: f64) -> Vec<(f64, f64, f64)> {
    let grid = f.grid();
    (0..grid.n())
        .map(|slot| {
            let xi = grid.wavenumber(slot);
            let sigma = nu * xi * xi + xi.abs();
            let z = -sigma * h;
            let (p1, p2) = phi_functions(z);
            (z.exp(), h * p1, h * p2)
        })
        .collect()
}

/// One ETDRK2 step of size `h`.
fn etd_step(f: &Field, params: &RegularizationParams, quad: &QuadratureSpec, h: f64) -> Result<Field> {
    if h == 0.0 {
        return Ok(f.clone());
    }
    let coef = etd_coefficients(f, params.nu(), h);
    let n0 = explicit_part(f, params, quad)?;
    let a: Vec<Complex64> = f
        .spectrum()
        .iter()
        .zip(n0.spectrum())
        .zip(&coef)
        .map(|((u, g), (e, p1, _))| u * e + g * p1)
        .collect();
    let a = Field::from_spectrum(*f.grid(), a)?;
    let n1 = explicit_part(&a, params, quad)?;
    let out: Vec<Complex64> = a
        .spectrum()
        .iter()
        .zip(n1.spectrum().iter().zip(n0.spectrum()))
        .zip(&coef)
        .map(|((u, (g1, g0)), (_, _, p2))| u + (g1 - g0) * p2)
        .collect();
    Field::from_spectrum(*f.grid(), out)
}

fn nonfinite(e: &Error) -> bool {
    matches!(e, Error::NonFiniteMode { .. } | Error::NonFiniteSample { .. })
}

/// Advances `state` by `state.dt` with the second-order exponential
/// Runge–Kutta scheme. Non-finite values halt with `halted_resolution`.
pub fn step_etd(state: SolverState, quad: &QuadratureSpec) -> Result<SolverState> {
    if state.status != Status::Running {
        return Err(config(format!("cannot step a {} state", state.status.as_str())));
    }
    if !(state.dt >= 0.0 && state.dt.is_finite()) {
        return Err(config(format!("step size must be non-negative, got {}", state.dt)));
    }
    match etd_step(&state.f, &state.params, quad, state.dt) {
        Ok(f) => Ok(SolverState {
            t: state.t + state.dt,
            f,
            step_count: state.step_count + 1,
            ..state
        }),
        Err(e) if nonfinite(&e) => {
            let t = state.t;
            Ok(state.halt(Status::HaltedResolution, format!("non-finite update at t = {t}: {e}")))
        }
        Err(e) => Err(e),
    }
}

/// Fraction of the non-zero spectral mass on `|k| > N/4`.
pub fn tail_fraction(f: &Field) -> f64 {
    let grid = f.grid();
    let cut = grid.n() as i64 / 4;
    let (mut tail, mut total) = (0.0, 0.0);
    for (slot, c) in f.spectrum().iter().enumerate().skip(1) {
        let m = c.norm_sqr();
        total += m;
        if grid.mode(slot).abs() > cut {
            tail += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

fn sampled_slope(f: &Field) -> f64 {
    crate::spectral::derivative(f, 1)
        .refined_samples(2)
        .iter()
        .fold(0.0, |m, v| m.max(v.abs()))
}

/// Status after the blow-up and resolution guards; a running state stays
/// running only if both pass.
pub fn blowup_guard(state: &SolverState, guards: &GuardSpec) -> Status {
    if state.status != Status::Running {
        return state.status;
    }
    guard_field(&state.f, guards).map_or(Status::Running, |(s, _)| s)
}

fn guard_field(f: &Field, guards: &GuardSpec) -> Option<(Status, String)> {
    let slope = sampled_slope(f);
    if !(slope <= guards.slope_max) {
        return Some((
            Status::HaltedBlowup,
            format!("slope {slope} exceeds slope_max {}", guards.slope_max),
        ));
    }
    let tail = tail_fraction(f);
    if tail > guards.tail_max {
        return Some((
            Status::HaltedResolution,
            format!("top-octave mass fraction {tail} exceeds tail_max {}", guards.tail_max),
        ));
    }
    None
}

/// One trajectory row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub report: EnergyReport,
    /// Last accepted step size.
    pub dt: f64,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    /// Fields at the report times, when requested.
    pub fields: Vec<Field>,
    pub final_field: Field,
    pub status: Status,
    pub diagnostic: Option<String>,
    pub steps: u64,
    pub rejected: u64,
    pub nu: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.report.t).collect()
    }
}

/// Options of [`evolve`] beyond the stepper controls.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvolveOptions {
    /// Keep the field at every report.
    pub keep_fields: bool,
    /// Skip the mollification of the data in regularized runs.
    pub raw_data: bool,
}

/// Integrates from `f0` to `spec.t_end`, reporting at `spec.cadence`.
///
/// Regularized runs start from `f0 ⋆ χ_ε`. Guards are checked on the data
/// and after every accepted step; a halt ends the run with a final row at
/// the halt time.
pub fn evolve(
    f0: &Field,
    params: &RegularizationParams,
    quad: &QuadratureSpec,
    spec: &StepperSpec,
    ctx: &ReportContext,
    opts: EvolveOptions,
) -> Result<Trajectory> {
    spec.validate()?;
    params.validate()?;
    quad.validate(f0.grid())?;
    let f = match params.eps {
        Some(eps) if !opts.raw_data => mollify_initial(f0, eps, &params.bump)?,
        _ => f0.clone(),
    };
    let mut state = SolverState::new(f, *params, spec.dt0);
    let mut traj = Trajectory {
        rows: Vec::new(),
        fields: Vec::new(),
        final_field: f0.clone(),
        status: Status::Running,
        diagnostic: None,
        steps: 0,
        rejected: 0,
        nu: params.nu(),
    };
    let times = spec.report_times();
    let mut last_dt = 0.0;
    let mut next = 0;

    if let Some((s, why)) = guard_field(&state.f, &spec.guards) {
        state = state.halt(s, why);
    }

    while state.status == Status::Running {
        if state.t >= times[next] * (1.0 - 1e-14) {
            state.t = state.t.max(times[next]);
            next += 1;
            let status = if next == times.len() { Status::Finished } else { Status::Running };
            record(&mut traj, &state, last_dt, status, ctx, opts)?;
            if next == times.len() {
                state.status = Status::Finished;
                break;
            }
            continue;
        }
        let target = times[next];
        let room = target - state.t;
        let clipped = state.dt >= room * (1.0 - 1e-9);
        let h = if clipped { room } else { state.dt };
        if !spec.adaptive {
            let keep = state.dt;
            state.dt = h;
            state = step_etd(state, quad)?;
            state.dt = keep;
            if state.status == Status::Running {
                if clipped {
                    state.t = target;
                }
                last_dt = h;
                if let Some((s, why)) = guard_field(&state.f, &spec.guards) {
                    state = state.halt(s, why);
                }
            }
            continue;
        }
        match doubled_step(&state.f, params, quad, h) {
            Err(e) if nonfinite(&e) => {
                state.dt = 0.5 * h;
                traj.rejected += 1;
            }
            Err(e) => return Err(e),
            Ok((g, err)) if err <= spec.tol => {
                state.f = g;
                state.t = if clipped { target } else { state.t + h };
                state.step_count += 1;
                last_dt = h;
                if !clipped {
                    state.dt = h * 1.2;
                    if let Some(m) = spec.dt_max {
                        state.dt = state.dt.min(m);
                    }
                }
                if let Some((s, why)) = guard_field(&state.f, &spec.guards) {
                    state = state.halt(s, why);
                }
            }
            Ok(_) => {
                state.dt = 0.5 * h;
                traj.rejected += 1;
            }
        }
        if state.status == Status::Running && state.dt < spec.dt_min {
            let t = state.t;
            state = state.halt(Status::HaltedResolution, format!("step size fell below dt_min at t = {t}"));
        }
    }

    if state.status.is_halted() {
        record(&mut traj, &state, last_dt, state.status, ctx, opts)?;
    }
    traj.status = state.status;
    traj.diagnostic = state.diagnostic.clone();
    traj.steps = state.step_count;
    traj.final_field = state.f;
    Ok(traj)
}

fn record(
    traj: &mut Trajectory,
    state: &SolverState,
    dt: f64,
    status: Status,
    ctx: &ReportContext,
    opts: EvolveOptions,
) -> Result<()> {
    traj.rows.push(TrajectoryRow {
        report: EnergyReport::compute(state.t, &state.f, ctx)?,
        dt,
        status,
    });
    if opts.keep_fields {
        traj.fields.push(state.f.clone());
    }
    Ok(())
}

/// Two half steps, and the relative `L²` distance to one full step.
fn doubled_step(f: &Field, params: &RegularizationParams, quad: &QuadratureSpec, h: f64) -> Result<(Field, f64)> {
    let full = etd_step(f, params, quad, h)?;
    let half = etd_step(f, params, quad, 0.5 * h)?;
    let two = etd_step(&half, params, quad, 0.5 * h)?;
    let diff = two.sub(&full)?.l2_norm_spectral();
    let scale = two.l2_norm_spectral();
    let err = if diff == 0.0 { 0.0 } else { diff / scale.max(f64::MIN_POSITIVE) };
    Ok((two, err))
}

/// Fixed-step integration over `steps` steps of size `dt`.
pub fn integrate_fixed(
    f0: &Field,
    params: &RegularizationParams,
    quad: &QuadratureSpec,
    dt: f64,
    steps: usize,
) -> Result<Field> {
    let mut f = f0.clone();
    for _ in 0..steps {
        f = etd_step(&f, params, quad, dt)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests;
