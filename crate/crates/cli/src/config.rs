//! Run configuration.

use std::path::{Path, PathBuf};

use muskat::corpus;
use muskat::rhs::{BumpSpec, QuadratureSpec, RegularizationParams};
use muskat::verify::{Tolerances, CHECK_NAMES};
use muskat::{make_log_phi, ConstantSet, Field, Grid, PhiWeight, StepperSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataConfig>,
    #[serde(default)]
    pub regularization: RegularizationConfig,
    #[serde(default)]
    pub phi: PhiConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stepper: Option<StepperSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantSet>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

/// Initial data. `amplitude` is the peak value for every kind except
/// `from_file`, which it rescales only when given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataConfig {
    SingleMode {
        amplitude: f64,
        #[serde(default = "one_u32")]
        wavenumber: u32,
    },
    RandomBandlimited {
        amplitude: f64,
        band: [u32; 2],
        #[serde(default = "one_f64")]
        decay: f64,
        seed: u64,
    },
    GaussianBump {
        amplitude: f64,
        width: f64,
    },
    FromFile {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        amplitude: Option<f64>,
    },
}

fn one_u32() -> u32 {
    1
}

fn one_f64() -> f64 {
    1.0
}

/// `eps` is a positive number or the string `"off"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularizationConfig {
    pub eps: Eps,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub bump: BumpSpec,
}

fn default_beta() -> f64 {
    RegularizationParams::DEFAULT_BETA
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        Self {
            eps: Eps::Off(Off::Off),
            beta: default_beta(),
            bump: BumpSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, expecting = "a positive number or \"off\"")]
pub enum Eps {
    Value(f64),
    Off(Off),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Off {
    Off,
}

impl RegularizationConfig {
    pub fn params(&self) -> Result<RegularizationParams, CliError> {
        let p = RegularizationParams {
            eps: match self.eps {
                Eps::Value(e) => Some(e),
                Eps::Off(_) => None,
            },
            beta: self.beta,
            bump: self.bump,
        };
        p.validate().map_err(|e| CliError::config(format!("regularization: {e}")))?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiConfig {
    #[default]
    One,
    Log {
        a: f64,
    },
    /// Adapted to the initial data in `Ḣ^s`.
    Adapted {
        #[serde(default = "default_s")]
        s: f64,
    },
}

fn default_s() -> f64 {
    1.5
}

impl PhiConfig {
    pub fn build(&self, f0: Option<&Field>) -> Result<PhiWeight, CliError> {
        let w = match *self {
            PhiConfig::One => Ok(PhiWeight::one()),
            PhiConfig::Log { a } => make_log_phi(a),
            PhiConfig::Adapted { s } => {
                let f0 = f0.ok_or_else(|| CliError::config("phi.kind = adapted needs initial data"))?;
                muskat::adapt_phi_to_data(f0, s)
            }
        };
        w.map_err(|e| CliError::config(format!("phi: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    /// Write a spectrum snapshot every this many reports; 0 writes none.
    #[serde(default)]
    pub snapshot_every: usize,
}

fn default_dir() -> PathBuf {
    PathBuf::from("muskat-out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_dir(),
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Runs only these checks of the suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Amplitude,
    Eps,
    #[serde(rename = "N")]
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Vec<f64>,
}

/// Largest number of points in one sweep.
pub const MAX_SWEEP_POINTS: usize = 256;

/// A parsed configuration with its source.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub bytes: Vec<u8>,
    pub base: PathBuf,
}

impl Loaded {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        let config = parse(&bytes).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { config, bytes, base })
    }
}

/// Parses JSON, naming the offending key and position on failure.
pub fn parse(bytes: &[u8]) -> Result<RunConfig, String> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let config: RunConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            format!("{inner}")
        } else {
            format!("key `{path}`: {inner}")
        }
    })?;
    de.end().map_err(|e| format!("trailing content: {e}"))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    /// Checks every section that is present against the solver preconditions.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(g) = self.grid {
            if g.n % 2 != 0 {
                return Err(format!("key `grid.N`: must be even, got {}", g.n));
            }
            let grid = Grid::new(g.length, g.n).map_err(|e| format!("key `grid`: {e}"))?;
            self.quadrature.validate(&grid).map_err(|e| format!("key `quadrature`: {e}"))?;
        }
        if let Some(d) = &self.data {
            let amp = match d {
                DataConfig::SingleMode { amplitude, .. }
                | DataConfig::RandomBandlimited { amplitude, .. }
                | DataConfig::GaussianBump { amplitude, .. } => Some(*amplitude),
                DataConfig::FromFile { amplitude, .. } => *amplitude,
            };
            if let Some(a) = amp {
                if !a.is_finite() {
                    return Err(format!("key `data.amplitude`: must be finite, got {a}"));
                }
            }
            if let DataConfig::RandomBandlimited { decay, .. } = d {
                if !decay.is_finite() {
                    return Err("key `data.decay`: must be finite".into());
                }
            }
        }
        self.regularization.params().map_err(|e| e.to_string())?;
        if let PhiConfig::Log { a } = self.phi {
            make_log_phi(a).map_err(|e| format!("key `phi.a`: {e}"))?;
        }
        if let Some(s) = &self.stepper {
            s.validate().map_err(|e| format!("key `stepper`: {e}"))?;
        }
        if let Some(c) = &self.constants {
            c.validate().map_err(|e| format!("key `constants`: {e}"))?;
        }
        if let Some(v) = &self.verify {
            if let Some(names) = &v.checks {
                if let Some(n) = names.iter().find(|n| !CHECK_NAMES.contains(&n.as_str())) {
                    return Err(format!("key `verify.checks`: unknown check `{n}`"));
                }
            }
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err("key `sweep.values`: the axis is empty".into());
            }
            if s.values.len() > MAX_SWEEP_POINTS {
                return Err(format!("key `sweep.values`: at most {MAX_SWEEP_POINTS} points"));
            }
            if let Some(v) = s.values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(format!("key `sweep.values`: values must be positive, got {v}"));
            }
            if s.axis == Axis::N && s.values.iter().any(|v| v.fract() != 0.0 || *v as usize % 2 != 0) {
                return Err("key `sweep.values`: N values must be even integers".into());
            }
        }
        Ok(())
    }

    pub fn require_grid(&self) -> Result<Grid, CliError> {
        let g = self.grid.ok_or_else(|| CliError::config("missing key `grid`"))?;
        Grid::new(g.length, g.n).map_err(|e| CliError::config(format!("key `grid`: {e}")))
    }

    pub fn require_stepper(&self) -> Result<StepperSpec, CliError> {
        self.stepper.ok_or_else(|| CliError::config("missing key `stepper`"))
    }

    /// Builds the initial data on `grid`; relative paths resolve against `base`.
    pub fn initial_data(&self, grid: Grid, base: &Path) -> Result<Field, CliError> {
        let data = self.data.as_ref().ok_or_else(|| CliError::config("missing key `data`"))?;
        let cfg = |e: muskat::Error| CliError::config(format!("data: {e}"));
        let peak = |f: Field, a: f64| -> Result<Field, CliError> {
            let m = f.max_abs();
            if m == 0.0 {
                return Err(CliError::config("data: field is identically zero"));
            }
            Ok(f.scale(a / m))
        };
        match data {
            DataConfig::SingleMode { amplitude, wavenumber } => {
                corpus::single_mode(grid, *amplitude, *wavenumber).map_err(cfg)
            }
            DataConfig::RandomBandlimited {
                amplitude,
                band,
                decay,
                seed,
            } => peak(corpus::random_bandlimited(grid, band[0], band[1], *decay, *seed).map_err(cfg)?, *amplitude),
            DataConfig::GaussianBump { amplitude, width } => {
                corpus::gaussian_bump(grid, *amplitude, *width).map_err(cfg)
            }
            DataConfig::FromFile { path, amplitude } => {
                let p = base.join(path);
                let file = std::fs::File::open(&p).map_err(|e| CliError::io(format!("reading {}", p.display()), e))?;
                let f = muskat::io::read_data_csv(std::io::BufReader::new(file))
                    .map_err(|e| CliError::config(format!("data.path {}: {e}", p.display())))?;
                if f.grid().n() != grid.n() || (f.grid().length() - grid.length()).abs() > 1e-9 * grid.length() {
                    return Err(CliError::config(format!(
                        "data.path {}: file grid (L = {}, N = {}) differs from `grid`",
                        p.display(),
                        f.grid().length(),
                        f.grid().n()
                    )));
                }
                let f = Field::from_samples(grid, f.samples().to_vec()).map_err(cfg)?;
                match amplitude {
                    Some(a) => peak(f, *a),
                    None => Ok(f),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
        "grid": {"L": 6.283185307179586, "N": 64},
        "data": {"kind": "random_bandlimited", "amplitude": 0.1, "band": [1, 8], "seed": 3},
        "regularization": {"eps": 0.01, "beta": 0.2},
        "phi": {"kind": "log", "a": 1.0},
        "stepper": {"t_end": 0.1, "cadence": 0.05},
        "constants": {"c0": 2.0, "c1": 1.0, "c2": 0.5, "provenance": "user"},
        "output": {"directory": "out", "snapshot_every": 1},
        "verify": {"tolerances": {"scaling": 0.5}, "checks": ["scaling"]},
        "sweep": {"axis": "eps", "values": [0.1, 0.01]}
    }"#;

    #[test]
    fn round_trip() {
        let a = parse(FULL.as_bytes()).unwrap();
        let text = serde_json::to_string(&a).unwrap();
        let b = parse(text.as_bytes()).unwrap();
        assert_eq!(a, b);
        let off = parse(br#"{"regularization": {"eps": "off"}}"#).unwrap();
        let again = parse(serde_json::to_string(&off).unwrap().as_bytes()).unwrap();
        assert_eq!(off, again);
        assert_eq!(off.regularization.params().unwrap().eps, None);
    }

    #[test]
    fn errors_name_keys() {
        let e = parse(br#"{"grid": {"L": 1.0, "N": 63}}"#).unwrap_err();
        assert!(e.contains("grid.N"), "{e}");
        let e = parse(br#"{"verify": {"tolerances": {"scalin": 1.0}}}"#).unwrap_err();
        assert!(e.contains("verify.tolerances") && e.contains("scalin"), "{e}");
        let e = parse(br#"{"verify": {"checks": ["nope"]}}"#).unwrap_err();
        assert!(e.contains("verify.checks"), "{e}");
        let e = parse(br#"{"regularization": {"eps": "on"}}"#).unwrap_err();
        assert!(e.contains("regularization.eps"), "{e}");
        let e = parse(br#"{"sweep": {"axis": "amplitude", "values": []}}"#).unwrap_err();
        assert!(e.contains("sweep.values"), "{e}");
        let e = parse(br#"{"stepper": {"t_end": -1, "cadence": 0.1}}"#).unwrap_err();
        assert!(e.contains("stepper.t_end"), "{e}");
    }

    #[test]
    fn peak_amplitude() {
        let c = parse(FULL.as_bytes()).unwrap();
        let g = c.require_grid().unwrap();
        let f = c.initial_data(g, Path::new(".")).unwrap();
        assert!((f.max_abs() - 0.1).abs() < 1e-15);
    }
}
