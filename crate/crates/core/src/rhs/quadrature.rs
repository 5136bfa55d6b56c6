use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::spectral::Grid;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..(order + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Which form of the alpha-kernels to integrate.
///
/// `Periodic` sums every kernel exactly over the lattice `alpha + nL`, so an
/// integral over one period equals the integral over the real line for a
/// periodic profile. `Truncated` integrates the bare kernel over `|alpha| <= A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AlphaKernel {
    #[default]
    Periodic,
    Truncated,
}

/// Symmetric graded panel quadrature in the shift variable.
///
/// Panels are `[0, delta0]` and the dyadic intervals `[2^m delta0, 2^{m+1} delta0]`
/// up to the truncation `A`, each split into equal subpanels no wider than
/// `max_panel`. Every panel carries a Gauss rule of `gauss_order` nodes and
/// every node `+alpha` has its partner `-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Inner panel edge; defaults to `dx / 4`.
    #[serde(default)]
    pub delta0: Option<f64>,
    /// Truncation; defaults to `L / 2`.
    #[serde(default)]
    pub a_max: Option<f64>,
    #[serde(default = "default_order")]
    pub gauss_order: usize,
    /// Widest subpanel in units of `dx`.
    #[serde(default = "default_panel")]
    pub max_panel_dx: f64,
    /// Apply the 2/3 rule to operator outputs.
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default)]
    pub kernel: AlphaKernel,
}

fn default_order() -> usize {
    8
}

fn default_panel() -> f64 {
    4.0
}

fn default_true() -> bool {
    true
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            delta0: None,
            a_max: None,
            gauss_order: default_order(),
            max_panel_dx: default_panel(),
            dealias: true,
            kernel: AlphaKernel::Periodic,
        }
    }
}

impl QuadratureSpec {
    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn with_a_max(mut self, a: f64) -> Self {
        self.a_max = Some(a);
        self
    }

    pub fn with_kernel(mut self, kernel: AlphaKernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.gauss_order = order;
        self
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(1..=64).contains(&self.gauss_order) {
            return Err(config(format!(
                "quadrature.gauss_order must lie in 1..=64, got {}",
                self.gauss_order
            )));
        }
        if !(self.max_panel_dx > 0.0 && self.max_panel_dx.is_finite()) {
            return Err(config("quadrature.max_panel_dx must be positive"));
        }
        if let Some(d) = self.delta0 {
            if !(d > 0.0 && d.is_finite()) {
                return Err(config(format!("quadrature.delta0 must be positive, got {d}")));
            }
        }
        if let Some(a) = self.a_max {
            if !(a > 0.0 && a <= 0.5 * grid.length() * (1.0 + 1e-12)) {
                return Err(config(format!(
                    "quadrature.a_max must lie in (0, L/2] = (0, {}], got {a}",
                    0.5 * grid.length()
                )));
            }
        }
        Ok(())
    }

    pub fn delta0(&self, grid: &Grid) -> f64 {
        self.delta0.unwrap_or(0.25 * grid.dx())
    }

    pub fn a_max(&self, grid: &Grid) -> f64 {
        self.a_max.unwrap_or(0.5 * grid.length()).min(0.5 * grid.length())
    }

    /// The rule on `|alpha| <= A` for this grid.
    pub fn rule(&self, grid: &Grid) -> Result<QuadratureRule> {
        self.validate(grid)?;
        Ok(QuadratureRule::graded(
            self.delta0(grid),
            self.a_max(grid),
            &[],
            self.max_panel_dx * grid.dx(),
            self.gauss_order,
        ))
    }
}

/// Positive half of a symmetric rule: `(alpha, weight)` with `alpha > 0`,
/// sorted by `alpha`. The mirrored nodes `-alpha` carry the same weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<(f64, f64)>,
}

impl QuadratureRule {
    /// Graded rule on `(0, a]`, with extra panel edges at `breaks`.
    pub fn graded(delta0: f64, a: f64, breaks: &[f64], max_panel: f64, order: usize) -> Self {
        let mut edges = vec![0.0, a];
        let mut e = delta0;
        while e < a {
            edges.push(e);
            e *= 2.0;
        }
        edges.extend(breaks.iter().copied().filter(|&b| b > 0.0 && b < a));
        edges.sort_by(|x, y| x.total_cmp(y));
        edges.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * a);
        let gl = GaussLegendre::new(order);
        let mut nodes = Vec::new();
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let pieces = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
            let h = (hi - lo) / pieces as f64;
            for p in 0..pieces {
                let a0 = lo + p as f64 * h;
                let b0 = if p + 1 == pieces { hi } else { a0 + h };
                nodes.extend(gl.on(a0, b0));
            }
        }
        Self { nodes }
    }

    /// Builds a rule from signed nodes, rejecting sets that are not symmetric.
    pub fn from_signed_nodes(signed: &[(f64, f64)]) -> Result<Self> {
        let mut pos: Vec<(f64, f64)> = signed.iter().copied().filter(|(a, _)| *a > 0.0).collect();
        let mut neg: Vec<(f64, f64)> = signed
            .iter()
            .copied()
            .filter(|(a, _)| *a < 0.0)
            .map(|(a, w)| (-a, w))
            .collect();
        if signed.iter().any(|(a, _)| *a == 0.0 || !a.is_finite()) {
            return Err(config("quadrature nodes must be finite and nonzero"));
        }
        pos.sort_by(|x, y| x.0.total_cmp(&y.0));
        neg.sort_by(|x, y| x.0.total_cmp(&y.0));
        let symmetric = pos.len() == neg.len()
            && pos
                .iter()
                .zip(&neg)
                .all(|(p, n)| (p.0 - n.0).abs() <= 1e-14 * p.0 && (p.1 - n.1).abs() <= 1e-14 * p.1.abs());
        if !symmetric {
            return Err(config("quadrature node set is not symmetric under alpha -> -alpha"));
        }
        Ok(Self { nodes: pos })
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// Number of signed nodes.
    pub fn len(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `int_{-A}^{A} g(alpha) d alpha` for a scalar integrand.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().map(|&(a, w)| w * (g(a) + g(-a))).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_exactness() {
        for order in [1, 2, 5, 8, 16] {
            let gl = GaussLegendre::new(order);
            for p in 0..2 * order {
                let q: f64 = gl.nodes.iter().zip(&gl.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "order {order} degree {p}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn graded_rule_integrates_polynomials_and_tails() {
        let rule = QuadratureRule::graded(1e-3, 10.0, &[], 0.5, 8);
        let q = rule.integrate(|a| a * a);
        assert!((q - 2000.0 / 3.0).abs() < 1e-10);
        let tail = rule.integrate(|a| 1.0 / (1.0 + a * a));
        assert!((tail - 2.0 * 10f64.atan()).abs() < 1e-12);
    }

    #[test]
    fn breaks_become_edges() {
        let rule = QuadratureRule::graded(1e-2, 1.0, &[0.3], 10.0, 4);
        // A kink at 0.3 is integrated exactly when it is a panel edge.
        let q = rule.integrate(|a| (a.abs() - 0.3).abs());
        let exact = 2.0 * (0.3 * 0.3 / 2.0 + 0.7 * 0.7 / 2.0);
        assert!((q - exact).abs() < 1e-14);
    }

    #[test]
    fn asymmetric_nodes_rejected() {
        assert!(QuadratureRule::from_signed_nodes(&[(0.5, 1.0), (-0.5, 1.0)]).is_ok());
        assert!(QuadratureRule::from_signed_nodes(&[(0.5, 1.0), (-0.4, 1.0)]).is_err());
        assert!(QuadratureRule::from_signed_nodes(&[(0.5, 1.0), (-0.5, 0.9)]).is_err());
        assert!(QuadratureRule::from_signed_nodes(&[(0.5, 1.0)]).is_err());
    }

    #[test]
    fn spec_defaults() {
        let g = Grid::new(2.0 * PI, 64).unwrap();
        let spec = QuadratureSpec::default();
        assert_eq!(spec.delta0(&g), g.dx() / 4.0);
        assert_eq!(spec.a_max(&g), PI);
        let rule = spec.rule(&g).unwrap();
        let total: f64 = rule.nodes().iter().map(|(_, w)| 2.0 * w).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);
        assert!(spec.with_a_max(10.0).rule(&g).is_err());
    }
}
