//! Diagonal realization of a nonnegative self-adjoint operator.
//!
//! An operator `A` is presented by a finite spectral measure: a list of
//! eigenvalues `lambda_k >= 0` with positive weights `w_k`. Vectors are
//! coefficient lists against that measure, so `phi(A) f` acts coefficient-wise
//! and `||A^s f||^2 = sum_k w_k lambda_k^(2s) c_k^2`.
//!
//! Continuous spectra are sampled through a symbol `xi -> lambda(xi)` and a
//! quadrature rule on a frequency interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version tag written into serialized measure documents.
pub const MEASURE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub lambda: f64,
    pub weight: f64,
}

/// Weighted spectral measure of `A`, sorted ascending by eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralMeasure {
    label: String,
    modes: Vec<Mode>,
}

/// Coefficients of a Hilbert-space element against a [`SpectralMeasure`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModalVector {
    pub coeffs: Vec<f64>,
}

impl ModalVector {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(len: usize) -> Self {
        Self { coeffs: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn conform(&self, measure: &SpectralMeasure) -> Result<()> {
        if self.coeffs.len() != measure.len() {
            return Err(Error::Shape {
                expected: measure.len(),
                found: self.coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &ModalVector) -> Result<ModalVector> {
        if self.len() != other.len() {
            return Err(Error::Shape {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(ModalVector::new(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        ))
    }
}

/// `lambda^p` with the convention `0^0 = 1`.
pub fn lambda_pow(lambda: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        lambda.powf(p)
    }
}

impl SpectralMeasure {
    /// Builds a measure from `(lambda, weight)` pairs, sorting by eigenvalue.
    pub fn new(label: impl Into<String>, modes: Vec<Mode>) -> Result<Self> {
        let mut modes = modes;
        for (i, m) in modes.iter().enumerate() {
            if !m.lambda.is_finite() || m.lambda < 0.0 {
                return Err(Error::Domain(format!(
                    "mode {i}: eigenvalue {} is not a finite nonnegative number",
                    m.lambda
                )));
            }
            if !m.weight.is_finite() || m.weight <= 0.0 {
                return Err(Error::Config(format!(
                    "mode {i}: weight {} must be positive",
                    m.weight
                )));
            }
        }
        if modes.is_empty() {
            return Err(Error::Config("a spectral measure needs at least one mode".into()));
        }
        modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        Ok(Self {
            label: label.into(),
            modes,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn lambdas(&self) -> impl Iterator<Item = f64> + '_ {
        self.modes.iter().map(|m| m.lambda)
    }

    pub fn total_weight(&self) -> f64 {
        self.modes.iter().map(|m| m.weight).sum()
    }

    /// `sum_k w_k g(lambda_k, k)` accumulated in ascending-mode order.
    pub fn weighted_sum(&self, mut g: impl FnMut(usize, f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (k, m) in self.modes.iter().enumerate() {
            acc += m.weight * g(k, m.lambda);
        }
        acc
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = MeasureDocument {
            version: MEASURE_FORMAT_VERSION,
            label: self.label.clone(),
            modes: self.modes.iter().map(|m| [m.lambda, m.weight]).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MeasureDocument = serde_json::from_str(text)?;
        doc.into_measure()
    }
}

/// Serialized form of a [`SpectralMeasure`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasureDocument {
    #[serde(default = "default_version")]
    pub version: u32,
    pub label: String,
    pub modes: Vec<[f64; 2]>,
}

fn default_version() -> u32 {
    MEASURE_FORMAT_VERSION
}

impl MeasureDocument {
    pub fn into_measure(self) -> Result<SpectralMeasure> {
        if self.version != MEASURE_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported measure document version {}",
                self.version
            )));
        }
        let modes = self
            .modes
            .into_iter()
            .map(|[lambda, weight]| Mode { lambda, weight })
            .collect();
        SpectralMeasure::new(self.label, modes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadratureRule {
    /// Equal cells, one node at each cell midpoint.
    Midpoint,
    /// A single Gauss-Legendre panel with `points` nodes.
    GaussLegendre,
    /// Equal panels of `order`-point Gauss-Legendre.
    CompositeGaussLegendre { order: usize },
    /// Panels of `order`-point Gauss-Legendre whose widths grow geometrically
    /// away from the lower endpoint; the first panel has width `first_panel`.
    GradedGaussLegendre { order: usize, first_panel: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrequencyGrid {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
    pub rule: QuadratureRule,
}

impl FrequencyGrid {
    /// Nodes and weights of the rule on `[lower, upper]`.
    pub fn nodes_and_weights(&self) -> Result<Vec<(f64, f64)>> {
        let (a, b, n) = (self.lower, self.upper, self.points);
        if n == 0 {
            return Err(Error::Config("quadrature needs at least one point".into()));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::Config(format!("invalid frequency interval [{a}, {b}]")));
        }
        match self.rule {
            QuadratureRule::Midpoint => {
                let h = (b - a) / n as f64;
                Ok((0..n).map(|i| (a + (i as f64 + 0.5) * h, h)).collect())
            }
            QuadratureRule::GaussLegendre => Ok(gauss_legendre_panel(n, a, b)),
            QuadratureRule::CompositeGaussLegendre { order } => {
                let panels = panel_count(n, order)?;
                let h = (b - a) / panels as f64;
                Ok((0..panels)
                    .flat_map(|p| gauss_legendre_panel(order, a + p as f64 * h, a + (p + 1) as f64 * h))
                    .collect())
            }
            QuadratureRule::GradedGaussLegendre { order, first_panel } => {
                let panels = panel_count(n, order)?;
                if !(first_panel > 0.0 && first_panel < b - a) {
                    return Err(Error::Config(format!(
                        "first panel width {first_panel} must lie in (0, {})",
                        b - a
                    )));
                }
                let mut edges = vec![a];
                if panels == 1 {
                    edges.push(b);
                } else {
                    // edges a, a + d, a + d g, ..., b with d g^(panels - 1) = b - a
                    let growth = ((b - a) / first_panel).powf(1.0 / (panels - 1) as f64);
                    for p in 0..panels - 1 {
                        edges.push(a + first_panel * growth.powi(p as i32));
                    }
                    edges.push(b);
                }
                Ok(edges
                    .windows(2)
                    .flat_map(|w| gauss_legendre_panel(order, w[0], w[1]))
                    .collect())
            }
        }
    }
}

fn panel_count(points: usize, order: usize) -> Result<usize> {
    if order == 0 || points % order != 0 {
        return Err(Error::Config(format!(
            "{points} points cannot be split into panels of order {order}"
        )));
    }
    Ok(points / order)
}

/// Gauss-Legendre nodes and weights on `[a, b]`, by Newton iteration on `P_n`.
pub fn gauss_legendre_panel(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A symbol-sampled measure together with the frequency behind each mode.
#[derive(Clone, Debug)]
pub struct SymbolSampling {
    pub measure: SpectralMeasure,
    /// `frequencies[k]` is the node `xi` with `symbol(xi) = lambda_k`.
    pub frequencies: Vec<f64>,
}

pub fn sample_symbol(
    label: impl Into<String>,
    symbol: impl Fn(f64) -> f64,
    grid: &FrequencyGrid,
    density: impl Fn(f64) -> f64,
) -> Result<SymbolSampling> {
    let mut rows = Vec::with_capacity(grid.points);
    for (xi, qw) in grid.nodes_and_weights()? {
        let lambda = symbol(xi);
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "symbol value {lambda} at xi = {xi} is not a finite nonnegative number"
            )));
        }
        let weight = qw * density(xi);
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::Config(format!("nonpositive weight {weight} at xi = {xi}")));
        }
        rows.push((xi, Mode { lambda, weight }));
    }
    rows.sort_by(|p, q| p.1.lambda.total_cmp(&q.1.lambda));
    let frequencies = rows.iter().map(|r| r.0).collect();
    let measure = SpectralMeasure::new(label, rows.into_iter().map(|r| r.1).collect())?;
    Ok(SymbolSampling {
        measure,
        frequencies,
    })
}

/// Realizes `A` through its symbol: `lambda_k = symbol(xi_k)` and
/// `w_k = quadrature weight * density(xi_k)`.
pub fn build_symbol_measure(
    label: impl Into<String>,
    symbol: impl Fn(f64) -> f64,
    grid: &FrequencyGrid,
    density: impl Fn(f64) -> f64,
) -> Result<SpectralMeasure> {
    sample_symbol(label, symbol, grid, density).map(|s| s.measure)
}

/// Spectrum of the combinatorial Laplacian of the path graph on `n` vertices:
/// `2 - 2 cos(k pi / n)`, `k = 0..n`, unit weights.
pub fn path_graph_measure(n: usize) -> Result<SpectralMeasure> {
    if n == 0 {
        return Err(Error::Argument("path graph needs at least one vertex".into()));
    }
    let modes = (0..n)
        .map(|k| {
            let lambda = if k == 0 {
                0.0
            } else {
                (2.0 - 2.0 * (k as f64 * PI / n as f64).cos()).max(0.0)
            };
            Mode { lambda, weight: 1.0 }
        })
        .collect();
    SpectralMeasure::new(format!("path-graph-{n}"), modes)
}

/// Functional calculus: `phi(A) f`, i.e. `c_k -> phi(lambda_k) c_k`.
pub fn apply_spectral_function(
    measure: &SpectralMeasure,
    f: &ModalVector,
    phi: impl Fn(f64) -> f64,
) -> Result<ModalVector> {
    f.conform(measure)?;
    Ok(ModalVector::new(
        measure
            .lambdas()
            .zip(&f.coeffs)
            .map(|(lambda, c)| phi(lambda) * c)
            .collect(),
    ))
}

/// `||A^s f||`, with `s = 0` giving the plain norm even on the kernel.
pub fn sobolev_norm(measure: &SpectralMeasure, f: &ModalVector, s: f64) -> Result<f64> {
    f.conform(measure)?;
    if !(s >= 0.0) {
        return Err(Error::Argument(format!("smoothness index {s} must be nonnegative")));
    }
    Ok(measure
        .weighted_sum(|k, lambda| lambda_pow(lambda, 2.0 * s) * f.coeffs[k] * f.coeffs[k])
        .sqrt())
}

pub fn inner_product(measure: &SpectralMeasure, f: &ModalVector, g: &ModalVector) -> Result<f64> {
    f.conform(measure)?;
    g.conform(measure)?;
    Ok(measure.weighted_sum(|k, _| f.coeffs[k] * g.coeffs[k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn midpoint_single_cell() {
        let grid = FrequencyGrid {
            lower: 0.0,
            upper: 1.0,
            points: 1,
            rule: QuadratureRule::Midpoint,
        };
        let m = build_symbol_measure("one", |x| x * x, &grid, |_| 1.0).unwrap();
        assert_eq!(m.modes(), &[Mode { lambda: 0.25, weight: 1.0 }]);
    }

    #[test]
    fn beam_symbol_at_unit_frequency() {
        let beam = |x: f64| x.powi(4) + x * x;
        assert_eq!(beam(1.0), 2.0);
    }

    #[test]
    fn gauss_legendre_integrates_constants() {
        let grid = FrequencyGrid {
            lower: 0.0,
            upper: 2.0,
            points: 64,
            rule: QuadratureRule::GaussLegendre,
        };
        let m = build_symbol_measure("wave", |x| x * x, &grid, |_| 1.0).unwrap();
        approx(m.total_weight(), 2.0, 1e-12);
        // degree 2n-1 exactness on a polynomial
        let s = sample_symbol("wave", |x| x * x, &grid, |_| 1.0).unwrap();
        let int: f64 = s
            .frequencies
            .iter()
            .zip(s.measure.modes())
            .map(|(x, m)| m.weight * x.powi(9))
            .sum();
        approx(int, 2f64.powi(10) / 10.0, 1e-10);
    }

    #[test]
    fn graded_panels_cover_the_interval() {
        let grid = FrequencyGrid {
            lower: 0.0,
            upper: 2.0,
            points: 256,
            rule: QuadratureRule::GradedGaussLegendre {
                order: 8,
                first_panel: 2e-4,
            },
        };
        let nodes = grid.nodes_and_weights().unwrap();
        assert_eq!(nodes.len(), 256);
        let total: f64 = nodes.iter().map(|n| n.1).sum();
        approx(total, 2.0, 1e-12);
        let gauss: f64 = nodes.iter().map(|(x, w)| w * (-x * x * 1e4).exp()).sum();
        approx(gauss, 0.5 * PI.sqrt() / 100.0, 1e-12);
        assert!(nodes[0].0 < 1e-4);
    }

    #[test]
    fn negative_symbol_names_frequency() {
        let grid = FrequencyGrid {
            lower: 0.0,
            upper: 1.0,
            points: 1,
            rule: QuadratureRule::Midpoint,
        };
        let err = build_symbol_measure("bad", |x| -x, &grid, |_| 1.0).unwrap_err();
        assert!(matches!(err, Error::Domain(ref msg) if msg.contains("xi = 0.5")), "{err}");
        let err = build_symbol_measure("bad", |x| x, &grid, |_| 0.0).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        let bad_grid = FrequencyGrid { points: 0, ..grid };
        assert!(build_symbol_measure("bad", |x| x, &bad_grid, |_| 1.0).is_err());
    }

    #[test]
    fn path_graph_small_cases() {
        let l = |n| path_graph_measure(n).unwrap().lambdas().collect::<Vec<_>>();
        assert_eq!(l(1), vec![0.0]);
        let two = l(2);
        approx(two[0], 0.0, 0.0);
        approx(two[1], 2.0, 1e-15);
        let three = l(3);
        approx(three[1], 1.0, 1e-15);
        approx(three[2], 3.0, 1e-15);
        assert!(matches!(path_graph_measure(0), Err(Error::Argument(_))));
    }

    #[test]
    fn functional_calculus_examples() {
        let m = path_graph_measure(3).unwrap();
        let f = ModalVector::new(vec![1.0, 1.0, 1.0]);
        assert_eq!(apply_spectral_function(&m, &f, |_| 1.0).unwrap(), f);
        let af = apply_spectral_function(&m, &f, |l| l).unwrap();
        approx(af.coeffs[1], 1.0, 1e-15);
        approx(af.coeffs[2], 3.0, 1e-15);
        let heat = apply_spectral_function(&m, &f, |l| (-7.0 * l).exp()).unwrap();
        assert_eq!(heat.coeffs[0], 1.0);
        let short = ModalVector::new(vec![1.0]);
        assert!(matches!(
            apply_spectral_function(&m, &short, |l| l),
            Err(Error::Shape { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn sobolev_norm_examples() {
        let single = SpectralMeasure::new("s", vec![Mode { lambda: 5.0, weight: 1.0 }]).unwrap();
        approx(sobolev_norm(&single, &ModalVector::new(vec![3.0]), 0.0).unwrap(), 3.0, 1e-15);
        let m = path_graph_measure(3).unwrap();
        let f = ModalVector::new(vec![1.0, 1.0, 1.0]);
        approx(sobolev_norm(&m, &f, 0.5).unwrap(), 2.0, 1e-14);
        let half = SpectralMeasure::new("h", vec![Mode { lambda: 2.0, weight: 0.5 }]).unwrap();
        approx(
            sobolev_norm(&half, &ModalVector::new(vec![1.0]), 1.0).unwrap(),
            2f64.sqrt(),
            1e-15,
        );
        // kernel element keeps its norm at s = 0
        let zero = SpectralMeasure::new("z", vec![Mode { lambda: 0.0, weight: 1.0 }]).unwrap();
        assert_eq!(sobolev_norm(&zero, &ModalVector::new(vec![2.0]), 0.0).unwrap(), 2.0);
    }

    #[test]
    fn json_document_round_trip_and_validation() {
        let m = path_graph_measure(4).unwrap();
        let back = SpectralMeasure::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(m, back);
        let unsorted = r#"{"label":"u","modes":[[3.0,1.0],[1.0,2.0]]}"#;
        let m = SpectralMeasure::from_json(unsorted).unwrap();
        assert_eq!(m.modes()[0].lambda, 1.0);
        assert!(SpectralMeasure::from_json(r#"{"label":"n","modes":[[-1.0,1.0]]}"#).is_err());
        assert!(SpectralMeasure::from_json(r#"{"label":"w","modes":[[1.0,0.0]]}"#).is_err());
        assert!(SpectralMeasure::from_json(r#"{"version":9,"label":"v","modes":[[1.0,1.0]]}"#).is_err());
    }
}
