//! Scenario documents: an operator (spectral measure), initial data, the checks
//! to run and the time windows used by decay diagnostics.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::TimeWindow;
use crate::error::{Error, Result};
use crate::spectral::{
    path_graph_measure, sample_symbol, FrequencyGrid, Mode, ModalVector, QuadratureRule, SpectralMeasure,
};

pub const MAX_M: usize = 8;

/// Identifier of a single verification check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    ModalResidual,
    EnergyIdentity,
    EnergyMonotone,
    EnergyWeightedSup,
    MaxRegIdentity,
    MaxRegInequality,
    VRecursion,
    DerivativeFormula,
    FirstOrderDecomposition,
    UChainDecomposition,
    ExpansionRate,
    RemainderSup,
    ProfileContraction,
    TheoremCoefficients,
    TakedaCoefficients,
    CatalanBranch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Recursions,
    Decay,
    Oracle,
    All,
}

impl CheckId {
    pub const ALL: [CheckId; 16] = [
        CheckId::ModalResidual,
        CheckId::EnergyIdentity,
        CheckId::EnergyMonotone,
        CheckId::EnergyWeightedSup,
        CheckId::MaxRegIdentity,
        CheckId::MaxRegInequality,
        CheckId::VRecursion,
        CheckId::DerivativeFormula,
        CheckId::FirstOrderDecomposition,
        CheckId::UChainDecomposition,
        CheckId::ExpansionRate,
        CheckId::RemainderSup,
        CheckId::ProfileContraction,
        CheckId::TheoremCoefficients,
        CheckId::TakedaCoefficients,
        CheckId::CatalanBranch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::ModalResidual => "modal-residual",
            CheckId::EnergyIdentity => "energy-identity",
            CheckId::EnergyMonotone => "energy-monotone",
            CheckId::EnergyWeightedSup => "energy-weighted-sup",
            CheckId::MaxRegIdentity => "max-reg-identity",
            CheckId::MaxRegInequality => "max-reg-inequality",
            CheckId::VRecursion => "v-recursion",
            CheckId::DerivativeFormula => "derivative-formula",
            CheckId::FirstOrderDecomposition => "first-order-decomposition",
            CheckId::UChainDecomposition => "u-chain-decomposition",
            CheckId::ExpansionRate => "expansion-rate",
            CheckId::RemainderSup => "remainder-sup",
            CheckId::ProfileContraction => "profile-contraction",
            CheckId::TheoremCoefficients => "theorem-coefficients",
            CheckId::TakedaCoefficients => "takeda-coefficients",
            CheckId::CatalanBranch => "catalan-branch",
        }
    }

    pub fn suite(self) -> Suite {
        match self {
            CheckId::ModalResidual
            | CheckId::EnergyIdentity
            | CheckId::EnergyMonotone
            | CheckId::EnergyWeightedSup
            | CheckId::MaxRegIdentity
            | CheckId::MaxRegInequality => Suite::Identities,
            CheckId::VRecursion
            | CheckId::DerivativeFormula
            | CheckId::FirstOrderDecomposition
            | CheckId::UChainDecomposition => Suite::Recursions,
            CheckId::ExpansionRate | CheckId::RemainderSup | CheckId::ProfileContraction => Suite::Decay,
            CheckId::TheoremCoefficients | CheckId::TakedaCoefficients | CheckId::CatalanBranch => Suite::Oracle,
        }
    }

    /// Label of the statement in the source text that the check exercises.
    pub fn paper_ref(self) -> &'static str {
        match self {
            CheckId::ModalResidual => "ADW",
            CheckId::EnergyIdentity | CheckId::EnergyMonotone | CheckId::EnergyWeightedSup => "lem:0th-en",
            CheckId::MaxRegIdentity => "lem:max-reg",
            CheckId::MaxRegInequality => "eq:lem1-1",
            CheckId::VRecursion => "def:V_m",
            CheckId::DerivativeFormula => "lem:V-derivative",
            CheckId::FirstOrderDecomposition => "lem:order1",
            CheckId::UChainDecomposition => "lem:orderm",
            CheckId::ExpansionRate => "thm:main",
            CheckId::RemainderSup => "prop:U_mm",
            CheckId::ProfileContraction => "eq:contraction",
            CheckId::TheoremCoefficients => "eq:diff-sum",
            CheckId::TakedaCoefficients => "dw",
            CheckId::CatalanBranch => "ADW-order1",
        }
    }
}

impl Suite {
    pub fn includes(self, check: CheckId) -> bool {
        self == Suite::All || check.suite() == self
    }
}

/// How a scenario's measure is built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    /// `lambda = symbol(xi)` sampled on a frequency quadrature with density `xi^density_power`.
    Symbol {
        symbol: SymbolSpec,
        grid: GridSpec,
        #[serde(default)]
        density_power: f64,
    },
    PathGraph {
        n: usize,
    },
    /// Explicit `[lambda, weight]` pairs.
    Explicit {
        modes: Vec<[f64; 2]>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SymbolSpec {
    /// `xi^2`
    Laplacian,
    /// `xi^4 + alpha xi^2`
    Beam {
        #[serde(default = "one")]
        alpha: f64,
    },
    /// `sum_k c_k xi^k`
    Polynomial { coefficients: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl SymbolSpec {
    pub fn eval(&self, xi: f64) -> f64 {
        match self {
            SymbolSpec::Laplacian => xi * xi,
            SymbolSpec::Beam { alpha } => xi.powi(4) + alpha * xi * xi,
            SymbolSpec::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * xi + c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleSpec {
    Midpoint,
    GaussLegendre,
    CompositeGaussLegendre,
    GradedGaussLegendre,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lower: f64,
    pub upper: f64,
    pub points: usize,
    pub rule: RuleSpec,
    /// Panel order for the composite rules.
    #[serde(default)]
    pub order: Option<usize>,
    /// Width of the first panel of the graded rule.
    #[serde(default)]
    pub first_panel: Option<f64>,
}

impl GridSpec {
    fn to_grid(&self) -> Result<FrequencyGrid> {
        let need_order = || {
            self.order
                .ok_or_else(|| Error::Config("composite rules need `order`".into()))
        };
        let rule = match self.rule {
            RuleSpec::Midpoint => QuadratureRule::Midpoint,
            RuleSpec::GaussLegendre => QuadratureRule::GaussLegendre,
            RuleSpec::CompositeGaussLegendre => QuadratureRule::CompositeGaussLegendre { order: need_order()? },
            RuleSpec::GradedGaussLegendre => QuadratureRule::GradedGaussLegendre {
                order: need_order()?,
                first_panel: self
                    .first_panel
                    .ok_or_else(|| Error::Config("graded rule needs `first_panel`".into()))?,
            },
        };
        Ok(FrequencyGrid {
            lower: self.lower,
            upper: self.upper,
            points: self.points,
            rule,
        })
    }
}

/// Initial data, as coefficients over the modes of the measure. Builders that
/// depend on frequency use the sampling node for symbol measures and
/// `sqrt(lambda)` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataSpec {
    /// `scale * exp(-xi^2)`
    Gaussian {
        #[serde(default = "one")]
        scale: f64,
    },
    Constant {
        value: f64,
    },
    /// 1 for `lower <= xi <= upper`, 0 otherwise.
    Indicator {
        lower: f64,
        upper: f64,
    },
    /// Uniform on `[-1, 1]`, reproducible from `seed`.
    Random {
        seed: u64,
    },
    Explicit {
        coeffs: Vec<f64>,
    },
}

impl DataSpec {
    fn build(&self, frequencies: &[f64]) -> Result<ModalVector> {
        let coeffs = match self {
            DataSpec::Gaussian { scale } => frequencies.iter().map(|xi| scale * (-xi * xi).exp()).collect(),
            DataSpec::Constant { value } => vec![*value; frequencies.len()],
            DataSpec::Indicator { lower, upper } => frequencies
                .iter()
                .map(|xi| if (lower..=upper).contains(&xi) { 1.0 } else { 0.0 })
                .collect(),
            DataSpec::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                frequencies.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect()
            }
            DataSpec::Explicit { coeffs } => {
                if coeffs.len() != frequencies.len() {
                    return Err(Error::Shape {
                        expected: frequencies.len(),
                        found: coeffs.len(),
                    });
                }
                coeffs.clone()
            }
        };
        let v = ModalVector::new(coeffs);
        if let Some(c) = v.coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Config(format!("non-finite data coefficient {c}")));
        }
        Ok(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl From<WindowSpec> for TimeWindow {
    fn from(w: WindowSpec) -> Self {
        TimeWindow {
            t_min: w.t_min,
            t_max: w.t_max,
            points: w.points,
        }
    }
}

/// The JSON form of a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub name: String,
    pub measure: MeasureSpec,
    #[serde(default)]
    pub u0: Option<DataSpec>,
    #[serde(default)]
    pub u1: Option<DataSpec>,
    /// Defaults to every check.
    #[serde(default)]
    pub checks: Option<Vec<CheckId>>,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default = "default_window")]
    pub window: WindowSpec,
    #[serde(default = "default_fit_window")]
    pub fit_window: WindowSpec,
}

fn default_m_max() -> usize {
    3
}

fn default_window() -> WindowSpec {
    WindowSpec {
        t_min: 0.0,
        t_max: 1e4,
        points: 200,
    }
}

fn default_fit_window() -> WindowSpec {
    WindowSpec {
        t_min: 10.0,
        t_max: 1e3,
        points: 48,
    }
}

/// A validated scenario ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub measure: SpectralMeasure,
    /// Frequency attached to each mode (sampling node, or `sqrt(lambda)`).
    pub frequencies: Vec<f64>,
    pub u0: ModalVector,
    pub u1: ModalVector,
    pub checks: Vec<CheckId>,
    pub m_max: usize,
    pub window: TimeWindow,
    pub fit_window: TimeWindow,
    pub document: ScenarioDocument,
}

impl Scenario {
    pub fn from_document(doc: ScenarioDocument) -> Result<Self> {
        let at = |pointer: &str, e: Error| Error::Schema {
            pointer: pointer.to_string(),
            message: e.to_string(),
        };
        if doc.name.trim().is_empty() {
            return Err(at("/name", Error::Config("name must not be empty".into())));
        }
        if doc.m_max > MAX_M {
            return Err(at(
                "/m_max",
                Error::Config(format!("m_max {} exceeds {MAX_M}", doc.m_max)),
            ));
        }
        for (pointer, w) in [("/window", doc.window), ("/fit_window", doc.fit_window)] {
            if !(w.t_min >= 0.0 && w.t_max > w.t_min && w.t_max.is_finite() && w.points >= 3) {
                return Err(at(
                    pointer,
                    Error::Config("need 0 <= t_min < t_max < inf and at least 3 points".into()),
                ));
            }
        }
        let (measure, frequencies) = build_measure(&doc.name, &doc.measure).map_err(|e| at("/measure", e))?;
        let default_data = DataSpec::Gaussian { scale: 1.0 };
        let u0 = doc
            .u0
            .as_ref()
            .unwrap_or(&default_data)
            .build(&frequencies)
            .map_err(|e| at("/u0", e))?;
        let u1 = doc
            .u1
            .as_ref()
            .unwrap_or(&default_data)
            .build(&frequencies)
            .map_err(|e| at("/u1", e))?;
        let mut checks = doc.checks.clone().unwrap_or_else(|| CheckId::ALL.to_vec());
        checks.sort();
        checks.dedup();
        Ok(Self {
            name: doc.name.clone(),
            measure,
            frequencies,
            u0,
            u1,
            checks,
            m_max: doc.m_max,
            window: doc.window.into(),
            fit_window: doc.fit_window.into(),
            document: doc,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: ScenarioDocument = serde_path_to_error::deserialize(de).map_err(|e| {
            let mut pointer = json_pointer(e.path());
            let message = e.inner().to_string();
            if let Some(field) = missing_field(&message) {
                pointer = format!("{}/{field}", pointer.trim_end_matches('/'));
            }
            Error::Schema { pointer, message }
        })?;
        Self::from_document(doc)
    }

    /// `v0 = u0 + u1`, the data of the parabolic flow.
    pub fn diffusion_datum(&self) -> ModalVector {
        self.u0.add(&self.u1).expect("data conform to the measure")
    }
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => {}
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn missing_field(message: &str) -> Option<&str> {
    let rest = message.strip_prefix("missing field `")?;
    rest.split('`').next()
}

fn build_measure(name: &str, spec: &MeasureSpec) -> Result<(SpectralMeasure, Vec<f64>)> {
    match spec {
        MeasureSpec::Symbol {
            symbol,
            grid,
            density_power,
        } => {
            let sampling = sample_symbol(name, |xi| symbol.eval(xi), &grid.to_grid()?, |xi| {
                if *density_power == 0.0 {
                    1.0
                } else {
                    xi.abs().powf(*density_power)
                }
            })?;
            Ok((sampling.measure, sampling.frequencies))
        }
        MeasureSpec::PathGraph { n } => {
            let m = path_graph_measure(*n)?;
            let f = root_frequencies(&m);
            Ok((m, f))
        }
        MeasureSpec::Explicit { modes } => {
            let m = SpectralMeasure::new(
                name,
                modes.iter().map(|&[lambda, weight]| Mode { lambda, weight }).collect(),
            )?;
            let f = root_frequencies(&m);
            Ok((m, f))
        }
    }
}

fn root_frequencies(m: &SpectralMeasure) -> Vec<f64> {
    m.lambdas().map(f64::sqrt).collect()
}

pub const BUILTIN_NAMES: [&str; 5] = ["wave-line", "beam", "path-graph-16", "zero-mode", "gap"];

fn line_grid() -> GridSpec {
    GridSpec {
        lower: 0.0,
        upper: 2.0,
        points: 256,
        rule: RuleSpec::GradedGaussLegendre,
        order: Some(8),
        first_panel: Some(1e-3),
    }
}

/// The document behind a built-in scenario.
pub fn builtin_document(name: &str) -> Result<ScenarioDocument> {
    let base = |measure: MeasureSpec| ScenarioDocument {
        name: name.to_string(),
        measure,
        u0: None,
        u1: None,
        checks: None,
        m_max: default_m_max(),
        window: default_window(),
        fit_window: default_fit_window(),
    };
    let doc = match name {
        "wave-line" => base(MeasureSpec::Symbol {
            symbol: SymbolSpec::Laplacian,
            grid: line_grid(),
            density_power: 0.0,
        }),
        "beam" => base(MeasureSpec::Symbol {
            symbol: SymbolSpec::Beam { alpha: 1.0 },
            grid: line_grid(),
            density_power: 0.0,
        }),
        "path-graph-16" => base(MeasureSpec::PathGraph { n: 16 }),
        "zero-mode" => ScenarioDocument {
            u0: Some(DataSpec::Constant { value: 0.0 }),
            u1: Some(DataSpec::Constant { value: 1.0 }),
            ..base(MeasureSpec::Explicit {
                modes: vec![[0.0, 1.0]],
            })
        },
        "gap" => base(MeasureSpec::Explicit {
            modes: vec![[1.0, 1.0]],
        }),
        _ => {
            return Err(Error::UnknownScenario {
                name: name.to_string(),
                available: BUILTIN_NAMES.join(", "),
            })
        }
    };
    Ok(doc)
}

pub fn builtin(name: &str) -> Result<Scenario> {
    Scenario::from_document(builtin_document(name)?)
}

/// Loads a built-in by name, or a JSON scenario file by path.
pub fn load_scenario(name_or_path: &str) -> Result<Scenario> {
    if BUILTIN_NAMES.contains(&name_or_path) {
        return builtin(name_or_path);
    }
    let path = Path::new(name_or_path);
    if path.extension().is_some_and(|e| e == "json") || path.exists() {
        return Scenario::from_json(&std::fs::read_to_string(path)?);
    }
    builtin(name_or_path)
}
