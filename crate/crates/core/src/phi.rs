//! Fourier weights `phi: [0, inf) -> [1, inf)` and their sampled certificates.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::error::{config, Error, Result};
use crate::spectral::Field;

/// Default right end of the validated range for closed-form weights.
pub const DEFAULT_R_MAX: f64 = 1e9;
/// Left end of every certificate grid.
pub const R_MIN: f64 = 1e-3;
/// Default number of certificate samples.
pub const DEFAULT_SAMPLES: usize = 1024;

type PhiFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One dyadic shell `[lo, 2 lo)` of a data-adapted weight.
///
/// On the shell `phi(r) = min(c * log(4 + r), cap)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shell {
    pub lo: f64,
    pub c: f64,
    pub cap: f64,
}

#[derive(Clone)]
pub enum PhiKind {
    One,
    /// `(log(4 + r) / log 4)^a`.
    Log { a: f64 },
    /// Piecewise weight on dyadic shells; the last shell extends to infinity.
    Adapted { s: f64, shells: Vec<Shell> },
    Custom { name: String, f: PhiFn },
}

impl fmt::Debug for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiKind::One => write!(f, "One"),
            PhiKind::Log { a } => write!(f, "Log {{ a: {a} }}"),
            PhiKind::Adapted { s, shells } => write!(f, "Adapted {{ s: {s}, shells: {} }}", shells.len()),
            PhiKind::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

/// Geometric sample grid `r_i = r_min (r_max/r_min)^{i/(n-1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n: usize,
}

impl SampleGrid {
    pub fn points(&self) -> Vec<f64> {
        let ratio = (self.r_max / self.r_min).ln();
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.r_max
                } else {
                    self.r_min * (ratio * i as f64 / (self.n - 1) as f64).exp()
                }
            })
            .collect()
    }
}

/// Sampled evidence for the weight hypotheses.
///
/// `h1_pass` only witnesses growth over the last octave of the sampled range:
/// `phi(r_max) > (1 + 1e-9) phi(r_max / 2)`.
/// Unboundedness itself cannot be certified from samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiCertificate {
    pub h1_pass: bool,
    pub h2_c0: f64,
    pub h3_pass: bool,
    pub monotone: bool,
    pub at_least_one: bool,
    pub sample_grid: SampleGrid,
}

impl PhiCertificate {
    pub fn passes(&self) -> bool {
        self.h1_pass && self.h3_pass && self.monotone && self.at_least_one && self.h2_c0.is_finite()
    }
}

#[derive(Debug, Clone)]
pub struct PhiWeight {
    kind: PhiKind,
    r_max: f64,
    certificate: PhiCertificate,
}

fn ell(r: f64) -> f64 {
    (4.0 + r).ln()
}

impl PhiWeight {
    /// The trivial weight `phi = 1`. Its certificate fails H1.
    pub fn one() -> Self {
        Self::certified(PhiKind::One, DEFAULT_R_MAX).expect("constant weight is finite")
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static, r_max: f64) -> Result<Self> {
        Self::certified(
            PhiKind::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
            r_max,
        )
    }

    fn certified(kind: PhiKind, r_max: f64) -> Result<Self> {
        let mut w = PhiWeight {
            kind,
            r_max,
            certificate: PhiCertificate {
                h1_pass: false,
                h2_c0: f64::NAN,
                h3_pass: false,
                monotone: false,
                at_least_one: false,
                sample_grid: SampleGrid { r_min: R_MIN, r_max, n: DEFAULT_SAMPLES },
            },
        };
        w.certificate = validate_phi(&w, r_max, DEFAULT_SAMPLES)?;
        Ok(w)
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn certificate(&self) -> &PhiCertificate {
        &self.certificate
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind, PhiKind::One)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.max(0.0);
        match &self.kind {
            PhiKind::One => 1.0,
            PhiKind::Log { a } => (ell(r) / 4f64.ln()).powf(*a),
            PhiKind::Adapted { shells, .. } => eval_shells(shells, r),
            PhiKind::Custom { f, .. } => f(r),
        }
    }

    /// Kind and parameters as JSON.
    pub fn header(&self) -> serde_json::Value {
        let kind = match &self.kind {
            PhiKind::One => json!({ "kind": "one" }),
            PhiKind::Log { a } => json!({ "kind": "log", "a": a }),
            PhiKind::Adapted { s, shells } => json!({ "kind": "adapted", "s": s, "shells": shells }),
            PhiKind::Custom { name, .. } => json!({ "kind": "custom", "name": name }),
        };
        json!({ "phi": kind, "r_max": self.r_max, "certificate": self.certificate })
    }

    /// Writes `r,phi` rows on the certificate grid.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,phi")?;
        let mut b1 = ryu::Buffer::new();
        let mut b2 = ryu::Buffer::new();
        for r in self.certificate.sample_grid.points() {
            writeln!(out, "{},{}", b1.format(r), b2.format(self.eval(r)))?;
        }
        Ok(())
    }
}

fn eval_shells(shells: &[Shell], r: f64) -> f64 {
    if shells.is_empty() || r < shells[0].lo {
        return 1.0;
    }
    let idx = shells.partition_point(|s| s.lo <= r) - 1;
    let s = &shells[idx];
    (s.c * ell(r)).min(s.cap)
}

/// `phi_a(r) = (log(4 + r) / log 4)^a` for `0 < a <= 1`.
pub fn make_log_phi(a: f64) -> Result<PhiWeight> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(config(format!("log weight exponent must lie in (0, 1], got {a}")));
    }
    PhiWeight::certified(PhiKind::Log { a }, DEFAULT_R_MAX)
}

/// Checks the weight hypotheses on a geometric grid over `[1e-3, r_max]`.
pub fn validate_phi(phi: &PhiWeight, r_max: f64, n_samples: usize) -> Result<PhiCertificate> {
    if !(r_max > 1.0 && r_max.is_finite()) {
        return Err(config(format!("r_max must exceed 1, got {r_max}")));
    }
    if n_samples < 64 {
        return Err(config(format!("need at least 64 samples, got {n_samples}")));
    }
    let grid = SampleGrid { r_min: R_MIN, r_max, n: n_samples };
    let rs = grid.points();
    let mut vals = Vec::with_capacity(n_samples);
    for &r in &rs {
        let v = phi.eval(r);
        let v2 = phi.eval(2.0 * r);
        if !v.is_finite() || !v2.is_finite() {
            return Err(Error::Weight(format!("non-finite weight value near r = {r}")));
        }
        vals.push((v, v2));
    }
    let tol = 1e-12;
    let at_least_one = phi.eval(0.0) >= 1.0 - tol && vals.iter().all(|(v, _)| *v >= 1.0 - tol);
    let monotone = vals.windows(2).all(|w| w[1].0 >= w[0].0 * (1.0 - tol));
    let ratios: Vec<f64> = rs.iter().zip(&vals).map(|(r, (v, _))| v / ell(*r)).collect();
    let h3_pass = ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + tol));
    let h2_c0 = vals.iter().fold(1.0f64, |m, (v, v2)| m.max(v2 / v));
    let h1_pass = phi.eval(r_max) > (1.0 + 1e-9) * phi.eval(0.5 * r_max);
    Ok(PhiCertificate {
        h1_pass,
        h2_c0,
        h3_pass,
        monotone,
        at_least_one,
        sample_grid: grid,
    })
}

/// Builds an unbounded weight that the tail decay of `f0` can pay for.
///
/// With `m_j` the `Ḣ^s` mass of `f0` on the shell `[2^j, 2^{j+1})` and
/// `T_j = sum_{k >= j} m_k`, the weight is capped by `G_j = (T_j / T_0)^{-1/4}`
/// on shell `j` and otherwise follows the largest multiple of `log(4 + r)`
/// compatible with the caps seen so far. The result is continuous,
/// nondecreasing, at least 1, has `phi / log(4 + r)` nonincreasing and
/// satisfies `‖f0‖_{Ḣ^s,φ} <= sqrt(2) ‖f0‖_{Ḣ^s}`.
pub fn adapt_phi_to_data(f0: &Field, s: f64) -> Result<PhiWeight> {
    let grid = f0.grid();
    let xi_max = grid.xi_max();
    let mut mass: Vec<(i32, f64)> = Vec::new();
    for (slot, c) in f0.spectrum().iter().enumerate().skip(1) {
        let xi = grid.wavenumber(slot).abs();
        let m = xi.powf(2.0 * s) * c.norm_sqr();
        if !m.is_finite() {
            return Err(Error::NonFiniteMode { mode: slot });
        }
        if m == 0.0 {
            continue;
        }
        let j = xi.log2().floor() as i32;
        match mass.iter_mut().find(|(k, _)| *k == j) {
            Some((_, acc)) => *acc += m,
            None => mass.push((j, m)),
        }
    }
    if mass.is_empty() {
        return make_log_phi(1.0);
    }
    mass.sort_by_key(|(j, _)| *j);
    let j0 = mass[0].0;
    let j1 = mass[mass.len() - 1].0;
    let mut shell_mass = vec![0.0; (j1 - j0 + 1) as usize];
    for (j, m) in &mass {
        shell_mass[(j - j0) as usize] = *m;
    }
    let mut tails = vec![0.0; shell_mass.len()];
    let mut acc = 0.0;
    for i in (0..shell_mass.len()).rev() {
        acc += shell_mass[i];
        tails[i] = acc;
    }
    let total = tails[0];
    let lo0 = 2f64.powi(j0);
    let mut c = 1.0 / ell(lo0);
    let mut shells = Vec::with_capacity(tails.len() + 1);
    for (i, &t) in tails.iter().enumerate() {
        let lo = 2f64.powi(j0 + i as i32);
        let cap = if t > 0.0 { (t / total).powf(-0.25) } else { f64::INFINITY };
        shells.push(Shell { lo, c, cap });
        c = c.min(cap / ell(2.0 * lo));
    }
    shells.push(Shell {
        lo: 2f64.powi(j1 + 1),
        c,
        cap: f64::INFINITY,
    });
    PhiWeight::certified(PhiKind::Adapted { s, shells }, xi_max.max(2.0))
}
