//! Experiment configuration, read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chernoff::{AssignmentSpec, PolynomialSpec, TSearch};
use crate::error::{Error, Result};
use crate::expander::GraphSpec;
use crate::inequalities::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    TensorProps,
    Inequalities,
    Expander,
    ChernoffSweep,
}

impl Suite {
    pub fn label(&self) -> &'static str {
        match self {
            Suite::TensorProps => "tensor_props",
            Suite::Inequalities => "inequalities",
            Suite::Expander => "expander",
            Suite::ChernoffSweep => "chernoff_sweep",
        }
    }
}

/// Point at which the contraction certificate and the expectation sandwich
/// are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaPoint {
    /// Largest `t` of the sandwich grid; the certificate uses this `t`.
    pub t: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for LemmaPoint {
    fn default() -> Self {
        Self { t: 0.3, a: 1.0, b: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    #[serde(default)]
    pub seed: u64,
    /// Randomized trials per property check.
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_graph")]
    pub graph: GraphSpec,
    #[serde(default = "default_assignment")]
    pub assignment: AssignmentSpec,
    #[serde(default = "PolynomialSpec::identity")]
    pub poly: PolynomialSpec,
    #[serde(default = "default_kappa")]
    pub kappa: usize,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_theta")]
    pub theta: Vec<f64>,
    #[serde(default = "default_walks")]
    pub num_walks: usize,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_window")]
    pub domination_window: f64,
    #[serde(default)]
    pub t_search: TSearch,
    #[serde(default)]
    pub lemma: LemmaPoint,
}

fn default_trials() -> usize {
    100
}

fn default_graph() -> GraphSpec {
    GraphSpec::Complete { n: 4 }
}

fn default_assignment() -> AssignmentSpec {
    AssignmentSpec::Random {
        dims: vec![2, 2],
        radius: 1.0,
        seed: None,
    }
}

fn default_kappa() -> usize {
    8
}

fn default_k() -> usize {
    1
}

/// `ϑ = 20, 40, …, 400`.
fn default_theta() -> Vec<f64> {
    (1..=20).map(|i| 20.0 * i as f64).collect()
}

fn default_walks() -> usize {
    10_000
}

fn default_window() -> f64 {
    6.0
}

impl ExperimentConfig {
    /// Defaults for everything except the suite.
    pub fn for_suite(suite: Suite) -> Self {
        toml::from_str(&format!("suite = \"{}\"", suite.label())).expect("defaults parse")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Relative graph and manifest paths resolve against the config file's
    /// directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let prefix = |m: String| Error::Config(format!("{}: {m}", path.display()));
        let mut cfg: Self = toml::from_str(&text).map_err(|e| prefix(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let GraphSpec::EdgeList { path: p } = &mut cfg.graph {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let AssignmentSpec::Manifest { path: p } = &mut cfg.assignment {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate().map_err(|e| match e {
            Error::Config(m) => prefix(m),
            other => other,
        })?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("field `{field}`: {msg}")));
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if self.kappa == 0 {
            return bad("kappa", "must be at least 1".into());
        }
        if self.k == 0 {
            return bad("k", "must be at least 1".into());
        }
        if self.num_walks < 2 {
            return bad("num_walks", "must be at least 2".into());
        }
        if let Some(t) = self.theta.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return bad("theta", format!("entries must be positive, got {t}"));
        }
        if !(self.domination_window > 0.0 && self.domination_window.is_finite()) {
            return bad("domination_window", format!("must be positive, got {}", self.domination_window));
        }
        if !(self.lemma.t > 0.0 && self.lemma.a >= 0.0 && self.lemma.b.is_finite()) {
            return bad("lemma", format!("need t > 0 and a ≥ 0, got {:?}", self.lemma));
        }
        self.quadrature.validate().or_else(|e| bad("quadrature", e.to_string()))?;
        self.t_search.validate().or_else(|e| bad("t_search", e.to_string()))?;
        self.poly.validate().or_else(|e| bad("poly", e.to_string()))?;
        if let GraphSpec::EdgeList { path } = &self.graph {
            if !path.is_file() {
                return bad("graph.path", format!("{} does not exist", path.display()));
            }
        }
        if let AssignmentSpec::Manifest { path } = &self.assignment {
            if !path.is_file() {
                return bad("assignment.path", format!("{} does not exist", path.display()));
            }
        }
        if let AssignmentSpec::Random { dims, radius, .. } = &self.assignment {
            let dim: usize = dims.iter().product();
            if dims.is_empty() || dim == 0 {
                return bad("assignment.dims", "must be nonempty and positive".into());
            }
            if self.k > dim {
                return bad("k", format!("{} exceeds the tensor dimension {dim}", self.k));
            }
            if !(*radius > 0.0 && radius.is_finite()) {
                return bad("assignment.radius", format!("must be positive, got {radius}"));
            }
        }
        Ok(())
    }
}
