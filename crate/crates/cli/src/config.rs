use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shadowlab_core::bodies::{generate_body, BodyParams};
use shadowlab_core::geometry::{Body, Polytope};
use shadowlab_core::geometry::TOL_GROUP;
use shadowlab_core::strata::TOL_SUBSPACE;

use crate::error::{CliError, CliResult};

/// Top-level experiment configuration. Every table rejects unknown keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub body: BodySpec,
    #[serde(default)]
    pub chain: ChainConfig,
    #[serde(default)]
    pub estimate: EstimateConfig,
    #[serde(default)]
    pub information: InformationConfig,
    #[serde(default)]
    pub strata: StrataConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// A built-in generator (`name`) or a vertex file (`file`), not both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sides: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    /// Chain length; `n - 1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub samples: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { m: None, samples: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateConfig {
    /// Strictly decreasing ε grid.
    pub epsilons: Vec<f64>,
    /// Haar draws per `N_ε` estimate.
    pub samples: usize,
    pub outer: usize,
    pub inner: usize,
    /// ε for the bound; the smallest grid value when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_epsilon: Option<f64>,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            epsilons: vec![0.5, 0.2, 0.1, 0.05],
            samples: 2000,
            outer: 20,
            inner: 500,
            bound_epsilon: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InformationConfig {
    /// Descriptor grid; `0.05 * circumradius` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Multiples of δ for the sensitivity sweep.
    pub delta_multipliers: Vec<f64>,
    pub chains: usize,
    /// Last stage for `mi` and `dpi`; `n - 1` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub bootstrap: usize,
}

impl Default for InformationConfig {
    fn default() -> Self {
        InformationConfig {
            delta: None,
            delta_multipliers: vec![0.5, 1.0, 2.0],
            chains: 2000,
            m: None,
            bootstrap: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrataConfig {
    pub samples: usize,
}

impl Default for StrataConfig {
    fn default() -> Self {
        StrataConfig { samples: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub group: f64,
    pub subspace: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            group: TOL_GROUP,
            subspace: TOL_SUBSPACE,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    /// Reads and validates a config file; a relative body file path is
    /// resolved against the config's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if let Some(file) = &cfg.body.file {
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.body.file = Some(base.join(file));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| config_err(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is representable as TOML")
    }

    pub fn validate(&self) -> CliResult<()> {
        let b = &self.body;
        match (&b.name, &b.file) {
            (Some(_), Some(_)) => return Err(config_err("body: give `name` or `file`, not both")),
            (None, None) => return Err(config_err("body: one of `name` or `file` is required")),
            (None, Some(f)) if !f.is_file() => {
                return Err(config_err(format!("body.file `{}` does not exist", f.display())))
            }
            (Some(_), None) if b.n.is_none() => return Err(config_err("body.n is required")),
            _ => {}
        }
        let counts = [
            ("chain.samples", self.chain.samples),
            ("estimate.samples", self.estimate.samples),
            ("estimate.outer", self.estimate.outer),
            ("estimate.inner", self.estimate.inner),
            ("information.chains", self.information.chains),
            ("information.bootstrap", self.information.bootstrap),
            ("strata.samples", self.strata.samples),
        ];
        for (key, v) in counts {
            if v < 1 {
                return Err(config_err(format!("{key} must be at least 1")));
            }
        }
        if self.information.bootstrap < 2 {
            return Err(config_err("information.bootstrap must be at least 2"));
        }
        let eps = &self.estimate.epsilons;
        if eps.is_empty() {
            return Err(config_err("estimate.epsilons must not be empty"));
        }
        if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(config_err("estimate.epsilons must be positive"));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(config_err("estimate.epsilons must be strictly decreasing"));
        }
        let positive = [
            ("estimate.bound_epsilon", self.estimate.bound_epsilon),
            ("information.delta", self.information.delta),
            ("tolerances.group", Some(self.tolerances.group)),
            ("tolerances.subspace", Some(self.tolerances.subspace)),
        ];
        for (key, v) in positive {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(config_err(format!("{key} must be positive")));
                }
            }
        }
        let mults = &self.information.delta_multipliers;
        if mults.is_empty() || mults.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(config_err("information.delta_multipliers must be nonempty and positive"));
        }
        Ok(())
    }

    pub fn bound_epsilon(&self) -> f64 {
        self.estimate
            .bound_epsilon
            .unwrap_or(*self.estimate.epsilons.last().expect("validated nonempty"))
    }
}

impl BodySpec {
    fn params(&self, n: usize) -> BodyParams {
        BodyParams {
            n,
            half_widths: self.half_widths.clone(),
            radius: self.radius,
            points: self.points,
            seed: self.seed,
            sides: self.sides,
            height: self.height,
        }
    }

    pub fn build(&self) -> CliResult<Body> {
        if let Some(file) = &self.file {
            let text = fs::read_to_string(file).map_err(|e| CliError::io(file, e))?;
            let p: Polytope = text.parse()?;
            if let Some(n) = self.n {
                if n != p.dim() {
                    return Err(config_err(format!(
                        "body.n = {n} but `{}` has dimension {}",
                        file.display(),
                        p.dim()
                    )));
                }
            }
            return Ok(Body::Polytope(p));
        }
        let name = self.name.as_deref().expect("validated");
        Ok(generate_body(name, &self.params(self.n.expect("validated")))?)
    }

    /// Stable identifier: the generator name with every given parameter, or
    /// the vertex file's name.
    pub fn id(&self) -> String {
        if let Some(file) = &self.file {
            let name = file.file_name().map(|f| f.to_string_lossy().into_owned());
            return format!("file:{}", name.unwrap_or_default());
        }
        let mut parts = Vec::new();
        if let Some(n) = self.n {
            parts.push(format!("n={n}"));
        }
        if let Some(h) = &self.half_widths {
            let hs: Vec<String> = h.iter().map(|x| x.to_string()).collect();
            parts.push(format!("half_widths=[{}]", hs.join(";")));
        }
        if let Some(r) = self.radius {
            parts.push(format!("radius={r}"));
        }
        if let Some(p) = self.points {
            parts.push(format!("points={p}"));
        }
        if let Some(s) = self.seed {
            parts.push(format!("seed={s}"));
        }
        if let Some(s) = self.sides {
            parts.push(format!("sides={s}"));
        }
        if let Some(h) = self.height {
            parts.push(format!("height={h}"));
        }
        format!("{}({})", self.name.as_deref().unwrap_or("?"), parts.join(","))
    }
}
