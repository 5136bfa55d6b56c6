use std::path::Path;

use muskat::functionals::smallness_margin;
use muskat::io::{fmt_f64, trajectory_csv, write_data_csv, write_spectrum_csv};
use muskat::verify::{run_check, suite_checks, text_summary, trapezoid, Artifacts, SuiteContext, Verdict, SUITES};
use muskat::{evolve, EvolveOptions, Field, ReportContext, Trajectory};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Axis, DataConfig, Eps, Loaded, RunConfig};
use crate::error::{CliError, Exit};
use crate::manifest::{resolve_output, RunManifest};

pub const SWEEP_HEADER: &str = "point,value,status,sup_lip,sup_A,int_B,smallness_margin";

fn spectrum_bytes(f: &Field) -> Vec<u8> {
    let mut buf = Vec::new();
    write_spectrum_csv(f, &mut buf).expect("writing to memory");
    buf
}

fn data_bytes(f: &Field) -> Vec<u8> {
    let mut buf = Vec::new();
    write_data_csv(f, &mut buf).expect("writing to memory");
    buf
}

/// Initial data, weight and report context of one run.
struct Prepared {
    f0: Field,
    ctx: ReportContext,
    params: muskat::rhs::RegularizationParams,
}

fn prepare(cfg: &RunConfig, base: &Path) -> Result<Prepared, CliError> {
    let grid = cfg.require_grid()?;
    let f0 = cfg.initial_data(grid, base)?;
    let params = cfg.regularization.params()?;
    let phi = cfg.phi.build(Some(&f0))?;
    let constants = cfg.constants.unwrap_or_default();
    let ctx = ReportContext::new(phi, cfg.quadrature, params.beta, constants);
    Ok(Prepared { f0, ctx, params })
}

fn run_one(cfg: &RunConfig, p: &Prepared, keep_fields: bool) -> Result<Trajectory, CliError> {
    let spec = cfg.require_stepper()?;
    let opts = EvolveOptions {
        keep_fields,
        raw_data: false,
    };
    Ok(evolve(&p.f0, &p.params, &cfg.quadrature, &spec, &p.ctx, opts)?)
}

/// Records the resolved solver settings in the manifest.
fn describe(m: &mut RunManifest, cfg: &RunConfig, p: &Prepared) {
    let grid = p.f0.grid();
    m.set("quadrature", cfg.quadrature);
    m.set(
        "truncation",
        json!({ "delta0": cfg.quadrature.delta0(grid), "a_max": cfg.quadrature.a_max(grid) }),
    );
    m.set("regularization", p.params);
    m.set("nu", p.params.nu());
    m.set("constants", p.ctx.constants);
    m.set("phi", p.ctx.phi.header());
}

pub fn solve(config: &Path) -> Result<Exit, CliError> {
    let loaded = Loaded::read(config)?;
    let cfg = &loaded.config;
    let p = prepare(cfg, &loaded.base)?;
    let every = cfg.output.snapshot_every;
    let traj = run_one(cfg, &p, every > 0)?;

    let mut m = RunManifest::new(resolve_output(&cfg.output.directory), "solve", &loaded.bytes);
    describe(&mut m, cfg, &p);
    m.write("data.csv", &data_bytes(&p.f0))?;
    m.write("trajectory.csv", &trajectory_csv(&traj))?;
    m.write("spectrum_final.csv", &spectrum_bytes(&traj.final_field))?;
    if every > 0 {
        for (j, f) in traj.fields.iter().enumerate().step_by(every) {
            m.write(&format!("snapshots/spectrum_{j:05}.csv"), &spectrum_bytes(f))?;
        }
    }
    if !p.ctx.phi.is_one() {
        write_phi(&mut m, &p.ctx.phi)?;
    }
    m.set("steps", traj.steps);
    m.set("rejected_steps", traj.rejected);
    m.set("diagnostic", &traj.diagnostic);
    m.set("smallness_margin", smallness_margin(&p.f0, &p.ctx.constants));
    let status = traj.status.as_str();
    let path = m.finish(status)?;
    eprintln!("solve: {status} after {} steps; manifest {}", traj.steps, path.display());
    if let Some(d) = &traj.diagnostic {
        eprintln!("solve: {d}");
    }
    Ok(if traj.status.is_halted() { Exit::GuardHalt } else { Exit::Ok })
}

fn write_phi(m: &mut RunManifest, phi: &muskat::PhiWeight) -> Result<(), CliError> {
    let mut csv = Vec::new();
    phi.write_csv(&mut csv)?;
    m.write("phi.csv", &csv)?;
    let header = serde_json::to_vec_pretty(&phi.header()).expect("phi header serializes");
    m.write("phi.json", &header)
}

pub fn verify(suite: &str, config: &Path) -> Result<Exit, CliError> {
    let names = suite_checks(suite).ok_or_else(|| {
        CliError::config(format!("unknown suite `{suite}`; expected one of {}", SUITES.join(", ")))
    })?;
    let loaded = Loaded::read(config)?;
    let cfg = &loaded.config;
    let verify = cfg.verify.clone().unwrap_or_default();
    let selected: Vec<&str> = match &verify.checks {
        None => names.to_vec(),
        Some(only) => {
            if let Some(n) = only.iter().find(|n| !names.contains(&n.as_str())) {
                return Err(CliError::config(format!("key `verify.checks`: `{n}` is not in suite `{suite}`")));
            }
            names.iter().copied().filter(|n| only.iter().any(|o| o == n)).collect()
        }
    };
    let dir = resolve_output(&cfg.output.directory);
    let tolerances = verify.tolerances;
    let ctx = SuiteContext::new(tolerances, Artifacts::new(Some(dir.join("checks"))), cfg.constants);
    let results = selected.iter().map(|n| run_check(n, &ctx)).collect::<Result<Vec<_>, _>>()?;

    let mut m = RunManifest::new(dir, "verify", &loaded.bytes);
    m.set("suite", suite);
    m.set("tolerances", tolerances);
    if let Some(c) = ctx.known_constants() {
        m.set("constants", c);
    }
    for r in &results {
        for a in &r.artifacts {
            m.adopt(Path::new(a))?;
        }
    }
    let report = serde_json::to_vec_pretty(&results).expect("results serialize");
    m.write("report.json", &report)?;
    let summary = text_summary(&results);
    m.write("report.txt", summary.as_bytes())?;
    print!("{summary}");
    let failed = results.iter().any(|r| r.verdict == Verdict::Fail);
    m.finish(if failed { "failed" } else { "passed" })?;
    Ok(if failed { Exit::CheckFailure } else { Exit::Ok })
}

/// One sweep point's configuration.
fn point_config(base: &RunConfig, axis: Axis, v: f64) -> RunConfig {
    let mut c = base.clone();
    match axis {
        Axis::Amplitude => {
            if let Some(d) = &mut c.data {
                match d {
                    DataConfig::SingleMode { amplitude, .. }
                    | DataConfig::RandomBandlimited { amplitude, .. }
                    | DataConfig::GaussianBump { amplitude, .. } => *amplitude = v,
                    DataConfig::FromFile { amplitude, .. } => *amplitude = Some(v),
                }
            }
        }
        Axis::Eps => c.regularization.eps = Eps::Value(v),
        Axis::N => {
            if let Some(g) = &mut c.grid {
                g.n = v as usize;
            }
        }
    }
    c.sweep = None;
    c
}

struct PointOutcome {
    row: String,
    /// Trajectory CSV, or the error that stopped the point.
    trajectory: Result<Vec<u8>, String>,
}

fn sweep_point(i: usize, v: f64, cfg: &RunConfig, base: &Path) -> Result<PointOutcome, CliError> {
    let p = prepare(cfg, base)?;
    let traj = run_one(cfg, &p, false)?;
    let reports: Vec<_> = traj.rows.iter().map(|r| &r.report).collect();
    let sup_lip = reports.iter().map(|r| r.lip).fold(0.0, f64::max);
    let sup_a = reports.iter().map(|r| r.a_phi).fold(0.0, f64::max);
    let times: Vec<f64> = reports.iter().map(|r| r.t).collect();
    let b: Vec<f64> = reports.iter().map(|r| r.b_phi).collect();
    let margin = smallness_margin(&p.f0, &p.ctx.constants);
    let cells = [sup_lip, sup_a, trapezoid(&times, &b), margin].map(fmt_f64);
    Ok(PointOutcome {
        row: format!("{i},{},{},{}", fmt_f64(v), traj.status.as_str(), cells.join(",")),
        trajectory: Ok(trajectory_csv(&traj)),
    })
}

pub fn sweep(config: &Path) -> Result<Exit, CliError> {
    let loaded = Loaded::read(config)?;
    let cfg = &loaded.config;
    let s = cfg.sweep.as_ref().ok_or_else(|| CliError::config("missing key `sweep`"))?;
    cfg.require_grid()?;
    cfg.require_stepper()?;
    if cfg.data.is_none() {
        return Err(CliError::config("missing key `data`"));
    }
    let configs: Vec<RunConfig> = s.values.iter().map(|&v| point_config(cfg, s.axis, v)).collect();
    for c in &configs {
        c.validate().map_err(CliError::config)?;
    }
    let outcomes: Vec<PointOutcome> = configs
        .par_iter()
        .zip(s.values.par_iter())
        .enumerate()
        .map(|(i, (c, &v))| match sweep_point(i, v, c, &loaded.base) {
            Ok(o) => o,
            Err(e) => PointOutcome {
                row: format!("{i},{},error,,,,", fmt_f64(v)),
                trajectory: Err(format!("point {i}: {e}")),
            },
        })
        .collect();

    let mut m = RunManifest::new(resolve_output(&cfg.output.directory), "sweep", &loaded.bytes);
    m.set("axis", s.axis);
    m.set("constants", cfg.constants.unwrap_or_default());
    let mut summary = String::from(SWEEP_HEADER);
    summary.push('\n');
    let mut errors = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        summary.push_str(&o.row);
        summary.push('\n');
        match &o.trajectory {
            Ok(t) => m.write(&format!("point_{i:03}/trajectory.csv"), t)?,
            Err(e) => {
                eprintln!("sweep: {e}");
                errors.push(e.clone());
            }
        }
    }
    m.write("summary.csv", summary.as_bytes())?;
    m.set("point_errors", errors);
    m.finish("finished")?;
    print!("{summary}");
    Ok(Exit::Ok)
}

pub fn phi_adapt(data_file: &Path, out: &Path, s: f64) -> Result<Exit, CliError> {
    let bytes = std::fs::read(data_file).map_err(|e| CliError::io(format!("reading {}", data_file.display()), e))?;
    let f = muskat::io::read_data_csv(&bytes[..])
        .map_err(|e| CliError::config(format!("{}: {e}", data_file.display())))?;
    let phi = muskat::adapt_phi_to_data(&f, s)?;
    let args = json!({ "data_file": data_file.display().to_string(), "s": s });
    let mut m = RunManifest::new(resolve_output(out), "phi-adapt", args.to_string().as_bytes());
    m.set("data_sha256", crate::manifest::sha256_hex(&bytes));
    write_phi(&mut m, &phi)?;
    m.finish("finished")?;
    Ok(Exit::Ok)
}
