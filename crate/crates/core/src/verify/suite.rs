use std::f64::consts::PI;
use std::sync::OnceLock;

use super::calibrate::{calibrate_constants, CalibrationCorpus};
use super::convergence::{check_contraction, eps_convergence, ContractionInput};
use super::identities::{check_l2_dissipation, check_linear_identity, check_scaling, check_t_oracle};
use super::inequalities::{
    check_energy_inequality, check_interpolation, check_lipschitz_budget, check_log_bound, check_phi_machinery,
    check_r_eps_scaling, check_small_data_decay,
};
use super::{Artifacts, CheckResult, Tolerances};
use crate::constants::ConstantSet;
use crate::corpus::{normalize_h32, power_law, random_bandlimited, random_family, single_mode};
use crate::error::{config, Error, Result};
use crate::functionals::ReportContext;
use crate::io::trajectory_csv;
use crate::phi::{make_log_phi, PhiWeight};
use crate::rhs::{BumpSpec, QuadratureSpec, RegularizationParams};
use crate::spectral::{Field, Grid};
use crate::stepper::{evolve, EvolveOptions, StepperSpec, Trajectory};

/// Every check, in report order.
pub const CHECK_NAMES: [&str; 13] = [
    "linear_identity",
    "t_oracle",
    "l2_dissipation",
    "scaling",
    "r_eps_scaling",
    "interpolation",
    "log_bound",
    "energy_inequality",
    "lipschitz_budget",
    "small_data_decay",
    "phi_machinery",
    "eps_convergence",
    "contraction",
];

/// Suite names accepted by [`suite_checks`].
pub const SUITES: [&str; 4] = ["identities", "inequalities", "convergence", "all"];

/// Checks of a suite, or `None` for an unknown name.
pub fn suite_checks(suite: &str) -> Option<&'static [&'static str]> {
    match suite {
        "identities" => Some(&CHECK_NAMES[..4]),
        "inequalities" => Some(&CHECK_NAMES[4..11]),
        "convergence" => Some(&CHECK_NAMES[11..]),
        "all" => Some(&CHECK_NAMES[..]),
        _ => None,
    }
}

/// Shared state of a verification session.
#[derive(Debug, Default)]
pub struct SuiteContext {
    pub tolerances: Tolerances,
    pub artifacts: Artifacts,
    /// Used instead of calibrated constants when set.
    pub constants: Option<ConstantSet>,
    calibrated: OnceLock<ConstantSet>,
}

impl SuiteContext {
    pub fn new(tolerances: Tolerances, artifacts: Artifacts, constants: Option<ConstantSet>) -> Self {
        Self {
            tolerances,
            artifacts,
            constants,
            calibrated: OnceLock::new(),
        }
    }

    /// User constants, or calibrated ones if a check already needed them.
    pub fn known_constants(&self) -> Option<ConstantSet> {
        self.constants.or_else(|| self.calibrated.get().copied())
    }

    /// User constants, or constants calibrated once on the default corpus.
    pub fn constants(&self) -> Result<ConstantSet> {
        if let Some(c) = self.constants {
            return Ok(c);
        }
        if let Some(c) = self.calibrated.get() {
            return Ok(*c);
        }
        let c = calibrate_constants(&CalibrationCorpus::small_random(10, 0.05, 1000)?)?;
        Ok(*self.calibrated.get_or_init(|| c))
    }
}

/// Runs one check by name. Errors raised inside a check become a failed
/// result; I/O errors are returned.
pub fn run_check(name: &str, ctx: &SuiteContext) -> Result<CheckResult> {
    let out = match name {
        "linear_identity" => linear_identity(ctx),
        "t_oracle" => t_oracle(ctx),
        "l2_dissipation" => l2_dissipation(ctx),
        "scaling" => scaling(ctx),
        "r_eps_scaling" => r_eps_scaling(ctx),
        "interpolation" => interpolation(ctx),
        "log_bound" => log_bound(ctx),
        "energy_inequality" => energy_inequality(ctx),
        "lipschitz_budget" => lipschitz_budget(ctx),
        "small_data_decay" => small_data_decay(ctx),
        "phi_machinery" => phi_machinery(ctx),
        "eps_convergence" => eps_convergence_check(ctx),
        "contraction" => contraction(ctx),
        other => return Err(config(format!("unknown check `{other}`"))),
    };
    match out {
        Ok(r) => Ok(r),
        Err(Error::Io(e)) => Err(Error::Io(e)),
        Err(e) => {
            let mut r = CheckResult::new(name);
            r.note(format!("error: {e}"));
            Ok(r)
        }
    }
}

pub fn run_suite(suite: &str, ctx: &SuiteContext) -> Result<Vec<CheckResult>> {
    let names = suite_checks(suite).ok_or_else(|| {
        config(format!("suite must be one of {}, got `{suite}`", SUITES.join(", ")))
    })?;
    names.iter().map(|n| run_check(n, ctx)).collect()
}

fn periodic(n: usize) -> Result<Grid> {
    Grid::new(2.0 * PI, n)
}

fn unit_ctx() -> ReportContext {
    ReportContext::new(
        PhiWeight::one(),
        QuadratureSpec::default(),
        RegularizationParams::DEFAULT_BETA,
        ConstantSet::default(),
    )
}

fn save_run(ctx: &SuiteContext, r: &mut CheckResult, file: &str, t: &Trajectory) -> Result<()> {
    ctx.artifacts.save(r, file, &trajectory_csv(t))
}

fn finish(ctx: &SuiteContext, mut r: CheckResult) -> Result<CheckResult> {
    ctx.artifacts.save_series(&mut r)?;
    Ok(r)
}

fn linear_identity(ctx: &SuiteContext) -> Result<CheckResult> {
    let l = 64.0 * PI;
    let f = Field::from_fn(Grid::new(l, 4096)?, |x| (3.0 * x).sin())?;
    let r = check_linear_identity(&f, &[l / 8.0, l / 4.0, l / 2.0], ctx.tolerances.linear_identity)?;
    finish(ctx, r)
}

/// Five fields at `N = 512` with slopes of order one.
pub(crate) fn t_oracle_corpus() -> Result<Vec<Field>> {
    let g = periodic(512)?;
    let mut out = vec![single_mode(g, 0.5, 1)?, single_mode(g, 0.1, 7)?];
    for seed in 1..=3 {
        out.push(normalize_h32(&random_bandlimited(g, 1, 24, 1.0, seed)?, 1.0)?);
    }
    Ok(out)
}

fn t_oracle(ctx: &SuiteContext) -> Result<CheckResult> {
    let r = check_t_oracle(&t_oracle_corpus()?, 20_000, ctx.tolerances.t_oracle)?;
    finish(ctx, r)
}

fn l2_dissipation(ctx: &SuiteContext) -> Result<CheckResult> {
    let f0 = single_mode(periodic(1024)?, 0.1, 1)?;
    let rctx = unit_ctx();
    let run = |cadence: f64| {
        evolve(
            &f0,
            &RegularizationParams::off(),
            &rctx.quad,
            &StepperSpec::new(0.1, cadence),
            &rctx,
            EvolveOptions::default(),
        )
    };
    let (coarse, fine) = (run(0.01)?, run(0.005)?);
    let mut r = check_l2_dissipation(
        &[&coarse, &fine],
        ctx.tolerances.l2_dissipation,
        ctx.tolerances.l2_cadence_gain,
    )?;
    save_run(ctx, &mut r, "trajectory_coarse.csv", &coarse)?;
    save_run(ctx, &mut r, "trajectory_fine.csv", &fine)?;
    finish(ctx, r)
}

/// Small multi-mode data for the scaling and contraction checks.
pub(crate) fn small_multimode(g: Grid) -> Result<Field> {
    Field::from_fn(g, |x| 0.1 * x.sin() + 0.04 * (2.0 * x + 0.3).cos() + 0.02 * (3.0 * x).sin())
}

fn scaling(ctx: &SuiteContext) -> Result<CheckResult> {
    let f0 = small_multimode(periodic(64)?)?;
    let t = &ctx.tolerances;
    let r = check_scaling(&f0, 2.0, 0.2, 0.05, 4e-3, &unit_ctx(), t.scaling, t.scaling_refinement_gain, t.critical_norms)?;
    finish(ctx, r)
}

fn r_eps_scaling(ctx: &SuiteContext) -> Result<CheckResult> {
    let g = periodic(32768)?;
    let fields: Vec<Field> = (1..=5)
        .map(|s| power_law(g, 2.0, s).map(|f| f.scale(0.01)))
        .collect::<Result<_>>()?;
    let r = check_r_eps_scaling(
        &fields,
        &[1e-1, 1e-2, 1e-3, 1e-4],
        &BumpSpec::default(),
        &QuadratureSpec::default(),
        ctx.tolerances.r_eps_spread,
    )?;
    finish(ctx, r)
}

fn family(n: usize, seeds: std::ops::Range<u64>) -> Result<Vec<Field>> {
    let g = periodic(n)?;
    seeds.map(|s| random_family(g, s)).collect()
}

fn interpolation(ctx: &SuiteContext) -> Result<CheckResult> {
    let cal = family(256, 0..1000)?;
    let test = family(256, 1000..2000)?;
    let r = check_interpolation(&cal, &test, &make_log_phi(1.0)?, ctx.tolerances.envelope)?;
    finish(ctx, r)
}

fn log_bound(ctx: &SuiteContext) -> Result<CheckResult> {
    let cal = family(128, 0..3000)?;
    let test = family(128, 3000..4000)?;
    let r = check_log_bound(&cal, &test, &QuadratureSpec::default(), ctx.tolerances.envelope)?;
    finish(ctx, r)
}

fn energy_inequality(ctx: &SuiteContext) -> Result<CheckResult> {
    let constants = ctx.constants()?;
    let runs = CalibrationCorpus::small_random(10, 0.05, 2000)?.run()?;
    let refs: Vec<&Trajectory> = runs.iter().collect();
    let r = check_energy_inequality(&refs, &constants, ctx.tolerances.energy_spread)?;
    finish(ctx, r)
}

fn lipschitz_budget(ctx: &SuiteContext) -> Result<CheckResult> {
    let g = periodic(128)?;
    let beta = RegularizationParams::DEFAULT_BETA;
    let rctx = unit_ctx();
    let spec = StepperSpec::new(0.5, 0.025);
    let run = |a: f64, eps: f64| -> Result<Trajectory> {
        let p = RegularizationParams::new(eps, beta)?;
        evolve(&single_mode(g, a, 1)?, &p, &rctx.quad, &spec, &rctx, EvolveOptions::default())
    };
    let amps = [0.05, 0.1, 0.2];
    let epss = [1e-1, 1e-2, 1e-3];
    let amp_runs: Vec<Trajectory> = amps.iter().map(|&a| run(a, 1e-2)).collect::<Result<_>>()?;
    let eps_runs: Vec<Trajectory> = epss.iter().map(|&e| run(0.1, e)).collect::<Result<_>>()?;
    let a: Vec<(f64, &Trajectory)> = amps.iter().cloned().zip(&amp_runs).collect();
    let e: Vec<(f64, &Trajectory)> = epss.iter().cloned().zip(&eps_runs).collect();
    let mut r = check_lipschitz_budget(&a, 1e-2, &e, beta, ctx.tolerances.lipschitz_spread)?;
    for (i, t) in amp_runs.iter().enumerate() {
        save_run(ctx, &mut r, &format!("trajectory_amplitude_{i}.csv"), t)?;
    }
    for (i, t) in eps_runs.iter().enumerate() {
        save_run(ctx, &mut r, &format!("trajectory_eps_{i}.csv"), t)?;
    }
    finish(ctx, r)
}

fn small_data_decay(ctx: &SuiteContext) -> Result<CheckResult> {
    let constants = ctx.constants()?;
    let g = periodic(256)?;
    let f0 = normalize_h32(&random_bandlimited(g, 1, 16, 1.0, 4)?, 0.05)?;
    let rctx = unit_ctx();
    let traj = evolve(
        &f0,
        &RegularizationParams::off(),
        &rctx.quad,
        &StepperSpec::new(1.0, 0.02),
        &rctx,
        EvolveOptions::default(),
    )?;
    let mut r = check_small_data_decay(&traj, &f0, &constants, ctx.tolerances.decay_slack)?;
    r.fit("c0", constants.c0).fit("c1", constants.c1).fit("c2", constants.c2);
    save_run(ctx, &mut r, "trajectory.csv", &traj)?;
    finish(ctx, r)
}

fn phi_machinery(ctx: &SuiteContext) -> Result<CheckResult> {
    let r = check_phi_machinery(4096, 7, ctx.tolerances.phi_norm_factor)?;
    finish(ctx, r)
}

fn eps_convergence_check(ctx: &SuiteContext) -> Result<CheckResult> {
    let f0 = single_mode(periodic(128)?, 0.1, 1)?;
    let rctx = unit_ctx();
    let r = eps_convergence(
        &f0,
        &[1e-1, 5e-2, 2.5e-2, 1.25e-2],
        RegularizationParams::DEFAULT_BETA,
        &StepperSpec::new(0.5, 0.05),
        &rctx.quad,
        &rctx,
        ctx.tolerances.eps_rate,
    )?;
    finish(ctx, r)
}

fn contraction(ctx: &SuiteContext) -> Result<CheckResult> {
    let g = periodic(128)?;
    let input = ContractionInput {
        base: small_multimode(g)?,
        direction: single_mode(g, 1.0, 2)?,
        deltas: vec![1e-3, 1e-4, 1e-5],
        params: RegularizationParams::off(),
        spec: StepperSpec::new(1.0, 0.05),
        m_bound: 1.0,
    };
    let rctx = unit_ctx();
    let t = &ctx.tolerances;
    let r = check_contraction(&input, &rctx.quad, &rctx, t.contraction_identical, t.contraction_spread)?;
    finish(ctx, r)
}
