use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::Deserialize;

use crate::convergence::EigensolverKind;
use crate::error::{Error, Result};
use crate::markov::mtx;
use crate::markov::vector::Distribution;
use crate::models::fixtures::random_distribution;
use crate::models::{builtin_with_limit, ingest, MatrixKind, Model, DEFAULT_STATE_LIMIT};

/// Where the initial distribution comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum P0Source {
    /// The model's own initial state or distribution.
    Model,
    Index(usize),
    Uniform,
    Random,
    File(PathBuf),
}

impl FromStr for P0Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::parse("--p0", format!("`{s}`: {m}"));
        match s {
            "model" | "default" => Ok(P0Source::Model),
            "uniform" => Ok(P0Source::Uniform),
            "random" => Ok(P0Source::Random),
            _ => match s.split_once(':') {
                Some(("index", i)) => i
                    .parse()
                    .map(P0Source::Index)
                    .map_err(|_| bad("invalid index")),
                Some(("file", p)) if !p.is_empty() => Ok(P0Source::File(PathBuf::from(p))),
                _ => Err(bad("expected index:I, uniform, random, file:PATH or model")),
            },
        }
    }
}

impl<'de> Deserialize<'de> for P0Source {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn parse_count(t: &str) -> std::result::Result<usize, String> {
    let t = t.trim();
    // Accept `1e4`-style integers as well.
    t.parse::<usize>().or_else(|_| match t.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
        _ => Err(format!("`{t}` is not a nonnegative integer")),
    })
}

/// Flags shared by the run verbs. Every flag may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON file with the same keys as the flags (flags win)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Catalog model, e.g. lotka-volterra, workstation-cluster, lumpable:3,5,4
    #[arg(long)]
    pub model: Option<String>,
    /// MatrixMarket file with a generator or stochastic matrix
    #[arg(long, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    /// How to read --matrix
    #[arg(long, value_enum)]
    pub matrix_kind: Option<MatrixKindArg>,
    /// Uniformisation rate for generators
    #[arg(long)]
    pub rate: Option<f64>,
    /// Initial distribution: index:I | uniform | random | file:PATH | model
    #[arg(long)]
    pub p0: Option<String>,
    /// Stopping threshold for the criterion (required by aggregate and bench)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Evaluate the criterion every this many expansions
    #[arg(long)]
    pub check_every: Option<usize>,
    /// Dimension cap
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// Step counts, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub horizons: Option<Vec<usize>>,
    /// Aggregation dimensions, ascending, comma separated
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Repetitions per timing
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_enum)]
    pub eigensolver: Option<EigensolverArg>,
    /// Second Gram-Schmidt pass in every expansion
    #[arg(long)]
    pub reorthogonalize: bool,
    /// Largest state space a builtin model may explore
    #[arg(long)]
    pub state_limit: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKindArg {
    Auto,
    Generator,
    Stochastic,
}

impl From<MatrixKindArg> for MatrixKind {
    fn from(k: MatrixKindArg) -> Self {
        match k {
            MatrixKindArg::Auto => MatrixKind::Auto,
            MatrixKindArg::Generator => MatrixKind::Generator,
            MatrixKindArg::Stochastic => MatrixKind::Stochastic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigensolverArg {
    Auto,
    Dense,
    KrylovSchur,
}

impl From<EigensolverArg> for EigensolverKind {
    fn from(k: EigensolverArg) -> Self {
        match k {
            EigensolverArg::Auto => EigensolverKind::Auto,
            EigensolverArg::Dense => EigensolverKind::Dense,
            EigensolverArg::KrylovSchur => EigensolverKind::KrylovSchur,
        }
    }
}

/// Keys accepted in a `--config` JSON file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    model: Option<String>,
    matrix: Option<PathBuf>,
    matrix_kind: Option<MatrixKindArg>,
    rate: Option<f64>,
    p0: Option<P0Source>,
    epsilon: Option<f64>,
    check_every: Option<usize>,
    max_dim: Option<usize>,
    horizons: Option<Vec<usize>>,
    dims: Option<Vec<usize>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    reps: Option<usize>,
    eigensolver: Option<EigensolverArg>,
    reorthogonalize: Option<bool>,
    state_limit: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_REPS: usize = 5;
pub const DEFAULT_HORIZON: usize = 10_000;

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Option<String>,
    pub matrix: Option<PathBuf>,
    pub matrix_kind: MatrixKind,
    pub rate: Option<f64>,
    pub p0: P0Source,
    pub epsilon: Option<f64>,
    pub check_every: usize,
    pub max_dim: Option<usize>,
    pub horizons: Vec<usize>,
    pub dims: Vec<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub reps: usize,
    pub eigensolver: EigensolverKind,
    pub reorthogonalize: bool,
    pub state_limit: usize,
}

impl RunConfig {
    /// Merges the optional JSON file with the flags; flags take precedence.
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file: FileConfig = match &args.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => FileConfig::default(),
        };
        let p0 = match &args.p0 {
            Some(s) => s.parse()?,
            None => file.p0.unwrap_or(P0Source::Model),
        };
        let cfg = RunConfig {
            model: args.model.clone().or(file.model),
            matrix: args.matrix.clone().or(file.matrix),
            matrix_kind: args
                .matrix_kind
                .or(file.matrix_kind)
                .map_or(MatrixKind::Auto, Into::into),
            rate: args.rate.or(file.rate),
            p0,
            epsilon: args.epsilon.or(file.epsilon),
            check_every: args.check_every.or(file.check_every).unwrap_or(10),
            max_dim: args.max_dim.or(file.max_dim),
            horizons: args
                .horizons
                .clone()
                .or(file.horizons)
                .unwrap_or_else(|| vec![DEFAULT_HORIZON]),
            dims: args.dims.clone().or(file.dims).unwrap_or_default(),
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("arnagg-out")),
            reps: args.reps.or(file.reps).unwrap_or(DEFAULT_REPS),
            eigensolver: args
                .eigensolver
                .or(file.eigensolver)
                .map_or(EigensolverKind::Auto, Into::into),
            reorthogonalize: args.reorthogonalize || file.reorthogonalize.unwrap_or(false),
            state_limit: args
                .state_limit
                .or(file.state_limit)
                .unwrap_or(DEFAULT_STATE_LIMIT),
        };
        if cfg.horizons.is_empty() {
            return Err(Error::InvalidArgument("horizons must not be empty".into()));
        }
        if cfg.check_every == 0 {
            return Err(Error::InvalidArgument(
                "check-every must be at least 1".into(),
            ));
        }
        if cfg.reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn require_epsilon(&self) -> Result<f64> {
        let eps = self.epsilon.ok_or_else(|| {
            Error::InvalidArgument("--epsilon is required (there is no default)".into())
        })?;
        if eps.is_nan() || eps < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be nonnegative, got {eps}"
            )));
        }
        Ok(eps)
    }

    /// Loads the model named by `--model` or read from `--matrix`.
    pub fn load_model(&self) -> Result<Model> {
        match (&self.model, &self.matrix) {
            (Some(name), path) if name == "rsvp-ingest" => {
                builtin_with_limit(name, path.as_deref(), self.state_limit)
            }
            (Some(name), None) => builtin_with_limit(name, None, self.state_limit),
            (None, Some(path)) => ingest("matrix", path, self.matrix_kind, self.rate),
            (Some(_), Some(_)) => Err(Error::InvalidArgument(
                "--matrix is only combined with --model rsvp-ingest".into(),
            )),
            (None, None) => Err(Error::InvalidArgument(
                "either --model or --matrix is required".into(),
            )),
        }
    }

    pub fn initial_distribution(&self, model: &Model) -> Result<Distribution> {
        let n = model.state_count();
        match &self.p0 {
            P0Source::Model => model.default_initial(),
            P0Source::Index(i) => Distribution::dirac(n, *i),
            P0Source::Uniform => Distribution::uniform(n),
            P0Source::Random => random_distribution(n, self.seed),
            P0Source::File(path) => read_distribution(path, n),
        }
    }
}

fn read_distribution(path: &Path, n: usize) -> Result<Distribution> {
    let v = mtx::read_vector_file(path)?;
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    Distribution::new(v)
}
