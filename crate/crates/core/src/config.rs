//! Experiment configuration files.
//!
//! A configuration is a flat TOML table. `n`, `layers` and `delta` may be
//! given as lists; `run` requires single values while `sweep` expands the
//! Cartesian product in the order `n`, `layers`, `delta`.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::evolution::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Heat1d,
    Heat2d,
    #[serde(rename = "grayscott")]
    GrayScott,
    Brusselator,
    Cavity,
    LinearRd,
    /// A heat1d study driven through `sweep`.
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Heat1d => "heat1d",
            Experiment::Heat2d => "heat2d",
            Experiment::GrayScott => "grayscott",
            Experiment::Brusselator => "brusselator",
            Experiment::Cavity => "cavity",
            Experiment::LinearRd => "linear_rd",
            Experiment::Sweep => "sweep",
        }
    }

    /// The experiment actually simulated.
    pub fn base(self) -> Self {
        if self == Experiment::Sweep {
            Experiment::Heat1d
        } else {
            self
        }
    }

    fn keys(self) -> Vec<&'static str> {
        const SOLVER: [&str; 9] = [
            "experiment",
            "layers",
            "seed",
            "tol",
            "max_evals",
            "memory",
            "warm_start",
            "restarts",
            "runs",
        ];
        const IO: [&str; 2] = ["output", "n_t"];
        let own: &[&str] = match self.base() {
            Experiment::Heat1d | Experiment::Sweep => &[
                "scheme",
                "n",
                "delta",
                "diffusion",
                "length",
                "dt",
                "boundary",
                "left",
                "right",
                "initial",
            ],
            Experiment::Heat2d => &[
                "mx", "my", "delta", "delta_y", "dt", "left", "right", "y_left", "y_right",
            ],
            Experiment::GrayScott | Experiment::Brusselator => &["n", "dt", "d1", "d2", "k1", "k2"],
            Experiment::Cavity => &["mx", "my", "dt", "reynolds", "lid"],
            Experiment::LinearRd => &[
                "n", "delta", "dt", "boundary", "left", "right", "k11", "k12", "k22",
            ],
        };
        SOLVER
            .iter()
            .chain(IO.iter())
            .chain(own.iter())
            .copied()
            .collect()
    }
}

/// A scalar or a list of sweep values.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    Zero,
    /// `sin(pi x / L)`
    Sine,
    /// Straight line between the two Dirichlet values.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub scheme: Option<String>,
    pub n: Option<OneOrMany<usize>>,
    pub mx: Option<usize>,
    pub my: Option<usize>,
    pub layers: Option<OneOrMany<usize>>,
    pub delta: Option<OneOrMany<f64>>,
    pub delta_y: Option<f64>,
    pub diffusion: Option<f64>,
    pub length: Option<f64>,
    pub dt: Option<f64>,
    pub n_t: Option<usize>,
    pub tol: Option<f64>,
    pub max_evals: Option<usize>,
    pub memory: Option<usize>,
    pub seed: Option<u64>,
    pub warm_start: Option<bool>,
    pub restarts: Option<usize>,
    pub runs: Option<usize>,
    pub output: Option<PathBuf>,
    pub boundary: Option<BoundaryKind>,
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub y_left: Option<f64>,
    pub y_right: Option<f64>,
    pub initial: Option<Initial>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k11: Option<f64>,
    pub k12: Option<f64>,
    pub k22: Option<f64>,
    pub reynolds: Option<f64>,
    pub lid: Option<f64>,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates a configuration, rejecting keys that the
    /// chosen experiment does not use.
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let cfg: Self = table
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let allowed = cfg.experiment.keys();
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                return config_err(format!(
                    "key `{key}` does not apply to experiment `{}`",
                    cfg.experiment.name()
                ));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let lists = [
            self.n.as_ref().map(|v| v.values().len()),
            self.layers.as_ref().map(|v| v.values().len()),
            self.delta.as_ref().map(|v| v.values().len()),
        ];
        if lists.iter().flatten().any(|&len| len == 0) {
            return config_err("sweep lists must not be empty");
        }
        if let Some(s) = &self.scheme {
            let scheme: Scheme = s
                .parse()
                .map_err(|_| Error::Config(format!("unknown scheme `{s}` (expected IE or CN)")))?;
            if scheme == Scheme::Explicit {
                return config_err("the explicit scheme has no variational solve; use IE or CN");
            }
        }
        if self.delta.is_some() && self.diffusion.is_some() {
            return config_err("give either `delta` or `diffusion`, not both");
        }
        if self.n_t == Some(0) {
            return config_err("`n_t` must be at least 1");
        }
        if self.runs == Some(0) {
            return config_err("`runs` must be at least 1");
        }
        if self
            .layers
            .as_ref()
            .is_some_and(|l| l.values().contains(&0))
        {
            return config_err("`layers` must be at least 1");
        }
        if self.tol.is_some_and(|t| !(t > 0.0)) {
            return config_err("`tol` must be positive");
        }
        for (name, v) in [
            ("dt", self.dt),
            ("length", self.length),
            ("reynolds", self.reynolds),
        ] {
            if v.is_some_and(|x| !(x > 0.0 && x.is_finite())) {
                return config_err(format!("`{name}` must be positive"));
            }
        }
        for (name, v) in [
            ("diffusion", self.diffusion),
            ("delta_y", self.delta_y),
            ("d1", self.d1),
            ("d2", self.d2),
        ] {
            if v.is_some_and(|x| !(x >= 0.0)) {
                return config_err(format!("`{name}` must be nonnegative"));
            }
        }
        if self
            .delta
            .as_ref()
            .is_some_and(|d| d.values().iter().any(|x| !(*x >= 0.0)))
        {
            return config_err("`delta` must be nonnegative");
        }
        Ok(())
    }

    /// True when any sweep key holds more than one value.
    pub fn is_sweep(&self) -> bool {
        self.points().len() > 1
    }

    /// Single-valued configurations in sweep order.
    pub fn points(&self) -> Vec<ExperimentConfig> {
        let ns = self
            .n
            .as_ref()
            .map(|v| v.values().into_iter().map(Some).collect())
            .unwrap_or_else(|| vec![None]);
        let ls = self
            .layers
            .as_ref()
            .map(|v| v.values().into_iter().map(Some).collect())
            .unwrap_or_else(|| vec![None]);
        let ds = self
            .delta
            .as_ref()
            .map(|v| v.values().into_iter().map(Some).collect())
            .unwrap_or_else(|| vec![None]);
        let mut out = Vec::new();
        for n in &ns {
            for l in &ls {
                for d in &ds {
                    out.push(ExperimentConfig {
                        n: n.map(OneOrMany::One),
                        layers: l.map(OneOrMany::One),
                        delta: d.map(OneOrMany::One),
                        ..self.clone()
                    });
                }
            }
        }
        out
    }

    fn single<T: Clone>(v: &Option<OneOrMany<T>>) -> Option<T> {
        v.as_ref().map(|v| v.values()[0].clone())
    }

    pub fn n_value(&self) -> Option<usize> {
        Self::single(&self.n)
    }

    pub fn layers_value(&self) -> Option<usize> {
        Self::single(&self.layers)
    }

    pub fn delta_value(&self) -> Option<f64> {
        Self::single(&self.delta)
    }

    pub fn scheme_value(&self) -> Scheme {
        self.scheme
            .as_deref()
            .and_then(|s| s.parse().ok())
            .unwrap_or(Scheme::ImplicitEuler)
    }

    pub fn runs_value(&self) -> usize {
        self.runs.unwrap_or(1)
    }

    pub fn seed_value(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}
