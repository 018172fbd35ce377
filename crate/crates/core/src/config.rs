//! Run configuration, read from JSON and adjusted by command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pseudo_hermitian::PairSpec;
use crate::trend::Ladder;
use crate::triplet::{WeightRule, WeightedTriplet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckBiorthogonal,
    FrameReport,
    Bessel,
    RieszFischer,
    Strictness,
    Reconstruct,
    Example,
    PseudoHermitian,
    FullReport,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::CheckBiorthogonal => "check-biorthogonal",
            Command::FrameReport => "frame-report",
            Command::Bessel => "bessel",
            Command::RieszFischer => "riesz-fischer",
            Command::Strictness => "strictness",
            Command::Reconstruct => "reconstruct",
            Command::Example => "example",
            Command::PseudoHermitian => "pseudo-hermitian",
            Command::FullReport => "full-report",
        }
    }

    /// Commands that draw random samples and therefore need a seed.
    pub fn is_randomized(self) -> bool {
        matches!(self, Command::Bessel | Command::PseudoHermitian | Command::FullReport)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleName {
    Hermite,
    Sobolev,
    NumberOp,
    Schwartz,
}

impl ExampleName {
    pub const ALL: [ExampleName; 4] = [
        ExampleName::Hermite,
        ExampleName::Sobolev,
        ExampleName::NumberOp,
        ExampleName::Schwartz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleName::Hermite => "hermite",
            ExampleName::Sobolev => "sobolev",
            ExampleName::NumberOp => "number-op",
            ExampleName::Schwartz => "schwartz",
        }
    }
}

impl std::str::FromStr for ExampleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleName::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown example {s:?} (expected hermite, sobolev, number-op or schwartz)"
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected json or csv)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub dim: Option<usize>,
    pub ladder: Option<Ladder>,
    pub weights: Option<Vec<f64>>,
    pub weight_rule: Option<WeightRule>,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_levels() -> usize {
    1
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            dim: None,
            ladder: None,
            weights: None,
            weight_rule: None,
            levels: default_levels(),
        }
    }
}

impl ModelSpec {
    /// Explicit weights, else the weight rule, else the number-operator weights.
    pub fn triplet(&self, n: usize) -> Result<WeightedTriplet> {
        match (&self.weights, &self.weight_rule) {
            (Some(w), _) => {
                if w.len() != n {
                    return Err(Error::Dimension(format!(
                        "model has {} weights, data has dimension {n}",
                        w.len()
                    )));
                }
                WeightedTriplet::new(w.clone(), self.levels)
            }
            (None, Some(rule)) => WeightedTriplet::from_rule(n, rule, self.levels),
            (None, None) => WeightedTriplet::from_rule(n, &WeightRule::Linear, self.levels),
        }
    }

    /// Configured ladder, or `{d, 2d, 4d, 8d}` from `dim`.
    pub fn ladder_or(&self, default_dim: usize) -> Ladder {
        self.ladder
            .clone()
            .unwrap_or_else(|| Ladder::doubling(self.dim.unwrap_or(default_dim), 4))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Family `Ξ`, one column per vector.
    pub xi: Option<PathBuf>,
    /// Dual family `Z`.
    pub zeta: Option<PathBuf>,
    /// Operator `T`.
    pub t: Option<PathBuf>,
    /// Vector `f` for reconstruction.
    pub f: Option<PathBuf>,
    /// Functional `Ψ` for weak expansions.
    pub psi: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub biorthogonality: f64,
    pub gram: f64,
    pub bessel_samples: usize,
    pub probe_trials: usize,
    /// Constant `C` in "dominated by `C · p_q`".
    pub probe_bound: f64,
    pub similarity_pairs: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            biorthogonality: 1e-10,
            gram: 1e-8,
            bessel_samples: 10_000,
            probe_trials: 200,
            probe_bound: 1.0,
            similarity_pairs: 100,
        }
    }
}

impl Tolerances {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("tolerance {key}: {value:?} is not a number")))
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("tolerance {key}: {value:?} is not a count")))
        };
        match key {
            "biorthogonality" => self.biorthogonality = float()?,
            "gram" => self.gram = float()?,
            "bessel_samples" => self.bessel_samples = count()?,
            "probe_trials" => self.probe_trials = count()?,
            "probe_bound" => self.probe_bound = float()?,
            "similarity_pairs" => self.similarity_pairs = count()?,
            _ => return Err(Error::Config(format!("unknown tolerance key {key:?}"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        for (k, v) in [
            ("biorthogonality", self.biorthogonality),
            ("gram", self.gram),
            ("probe_bound", self.probe_bound),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("tolerance {k} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub model: ModelSpec,
    pub example: Option<ExampleName>,
    /// Number of basis functions for the Hermite and Sobolev examples.
    pub count: Option<usize>,
    #[serde(default)]
    pub inputs: Inputs,
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    pub pair: Option<PairSpec>,
    #[serde(default = "default_timing")]
    pub timing: bool,
}

fn default_timing() -> bool {
    true
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            model: ModelSpec::default(),
            example: None,
            count: None,
            inputs: Inputs::default(),
            seed: None,
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
            pair: None,
            timing: true,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: e.line() as u64,
            column: e.column(),
            message: e.to_string(),
        })?;
        // relative input paths are taken relative to the config file
        if let Some(dir) = path.parent() {
            cfg.inputs.resolve(dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.is_randomized() && self.seed.is_none() {
            return Err(Error::Config(format!(
                "command {} runs randomized probes and needs a seed",
                self.command.as_str()
            )));
        }
        if self.model.levels == 0 {
            return Err(Error::Config("model.levels must be at least 1".into()));
        }
        if self.model.dim == Some(0) {
            return Err(Error::Config("model.dim must be positive".into()));
        }
        if let (Some(w), Some(d)) = (&self.model.weights, self.model.dim) {
            if w.len() != d {
                return Err(Error::Config(format!(
                    "model.weights has {} entries but dim is {d}",
                    w.len()
                )));
            }
        }
        if self.count == Some(0) {
            return Err(Error::Config("count must be positive".into()));
        }
        self.tolerances.validate()?;
        let needs_example = matches!(self.command, Command::Example);
        if needs_example && self.example.is_none() {
            return Err(Error::Config("command example needs an example name".into()));
        }
        if matches!(self.command, Command::CheckBiorthogonal)
            && (self.inputs.xi.is_none() || self.inputs.zeta.is_none())
        {
            return Err(Error::Config(
                "check-biorthogonal needs inputs.xi and inputs.zeta".into(),
            ));
        }
        if matches!(self.command, Command::FrameReport | Command::RieszFischer) && self.inputs.xi.is_none() {
            return Err(Error::Config(format!("{} needs inputs.xi", self.command.as_str())));
        }
        Ok(())
    }

    /// SHA-256 of the configuration with output settings and timing removed,
    /// so that the same run written to different places hashes the same.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputSpec::default();
        c.timing = false;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl Inputs {
    fn resolve(&mut self, dir: &Path) {
        for p in [&mut self.xi, &mut self.zeta, &mut self.t, &mut self.f, &mut self.psi]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }
}
