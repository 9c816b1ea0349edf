//! Named benchmark models.
//!
//! | name                     | states  | kind                       |
//! |--------------------------|---------|----------------------------|
//! | `lotka-volterra[:CAP]`   | 10,201  | reaction network, cap 100  |
//! | `workstation-cluster[:N]`| 15,540  | structured generator, N=20 |
//! | `gene-expression[:CAP]`  | see docs| reaction network, cap 5    |
//! | `rsvp-ingest`            | file    | ingested MatrixMarket      |
//! | `identity:N`             | N       | `P = I`                    |
//! | `lumpable:S1,S2,..`      | ΣS      | lumpable fixture, seeded   |
//! | `random:N[,PER_ROW]`     | N       | random sparse, seeded      |
//!
//! Continuous-time models are uniformised at their largest exit rate unless
//! a rate is supplied.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::chain::uniformise;
use crate::markov::mtx;
use crate::markov::sparse::{CsrMatrix, SparseGeneratorMatrix, SparseStochasticMatrix};
use crate::markov::vector::Distribution;
use crate::models::cluster::workstation_cluster_with_limit;
use crate::models::explore::DEFAULT_STATE_LIMIT;
use crate::models::fixtures::{lumpable_test_chain, random_distribution, random_stochastic};
use crate::models::reaction::ReactionNetwork;

/// Default uniformisation rate for ingested RSVP generators.
pub const RSVP_RATE: f64 = 30.01;

/// Whether a matrix file holds a generator or a stochastic matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// Decided by the row sums.
    #[default]
    Auto,
    Generator,
    Stochastic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub name: String,
    pub state_count: usize,
    /// Uniformisation rate for continuous-time models.
    pub uniformisation_rate: Option<f64>,
    /// Index of the initial state.
    pub initial_state: usize,
    /// Population vector or record of the initial state, when meaningful.
    pub initial_population: Option<Vec<u32>>,
    pub kind: MatrixKind,
    pub provenance: String,
}

/// Transition structure of a catalog model.
#[derive(Debug, Clone)]
pub enum ModelMatrix {
    Generator(SparseGeneratorMatrix),
    Stochastic(SparseStochasticMatrix),
}

#[derive(Debug, Clone)]
pub struct Model {
    pub descriptor: ModelDescriptor,
    pub matrix: ModelMatrix,
    /// The reaction network behind the model, if any.
    pub network: Option<ReactionNetwork>,
    /// A preferred initial distribution (fixtures only).
    pub initial_distribution: Option<Distribution>,
}

impl Model {
    pub fn state_count(&self) -> usize {
        self.descriptor.state_count
    }

    /// The DTMC of the model; generators are uniformised at `rate`, else at the catalog rate.
    pub fn stochastic(&self, rate: Option<f64>) -> Result<(SparseStochasticMatrix, Option<f64>)> {
        match &self.matrix {
            ModelMatrix::Stochastic(p) => Ok((p.clone(), None)),
            ModelMatrix::Generator(q) => {
                let (p, l) = uniformise(q, rate.or(self.descriptor.uniformisation_rate))?;
                Ok((p, Some(l)))
            }
        }
    }

    /// Default initial distribution: the fixture's own, else a point mass on the initial state.
    pub fn default_initial(&self) -> Result<Distribution> {
        match &self.initial_distribution {
            Some(d) => Ok(d.clone()),
            None => Distribution::dirac(self.state_count(), self.descriptor.initial_state),
        }
    }

    /// Writes `model.mtx` and `model.json` into `dir`.
    pub fn export(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let csr: &CsrMatrix = match &self.matrix {
            ModelMatrix::Generator(q) => q,
            ModelMatrix::Stochastic(p) => p,
        };
        mtx::write_coordinate_file(csr, dir.join("model.mtx"))?;
        std::fs::write(
            dir.join("model.json"),
            serde_json::to_string_pretty(&self.descriptor)? + "\n",
        )?;
        Ok(())
    }
}

/// Predator-prey network with the classical constants: prey birth `X → 2X`
/// (10), predation `X + Y → 2Y` (0.01), predator death `Y → ∅` (10).
pub fn lotka_volterra_network(cap: u32) -> Result<ReactionNetwork> {
    ReactionNetwork::from_sparse(
        &["prey", "predator"],
        &[
            (&[(0, 1)], &[(0, 2)], 10.0),
            (&[(0, 1), (1, 1)], &[(1, 2)], 0.01),
            (&[(1, 1)], &[], 10.0),
        ],
        vec![cap, cap],
    )
}

pub fn lotka_volterra_initial(cap: u32) -> Vec<u32> {
    let x = (cap / 10).max(1);
    vec![x, x]
}

/// Species of the prokaryotic gene-expression network.
pub const GENE_EXPRESSION_SPECIES: [&str; 12] = [
    "Pro", "RNAP", "ProRNAP", "TrRNAP", "RBS", "ElRNAP", "Rib", "RibRBS", "ElRib", "Protein",
    "RNase", "RNaseRBS",
];

/// Transcription and translation initiation with mRNA decay and protein
/// degradation: RNA polymerase binds the promoter, clears it while exposing a
/// ribosome binding site (RBS), ribosomes bind the RBS and elongate to
/// protein, and RNase competes for the RBS and degrades it.
pub fn gene_expression_network(cap: u32) -> Result<ReactionNetwork> {
    const PRO: usize = 0;
    const RNAP: usize = 1;
    const PRO_RNAP: usize = 2;
    const TR_RNAP: usize = 3;
    const RBS: usize = 4;
    const EL_RNAP: usize = 5;
    const RIB: usize = 6;
    const RIB_RBS: usize = 7;
    const EL_RIB: usize = 8;
    const PROTEIN: usize = 9;
    const RNASE: usize = 10;
    const RNASE_RBS: usize = 11;
    ReactionNetwork::from_sparse(
        &GENE_EXPRESSION_SPECIES,
        &[
            (&[(PRO, 1), (RNAP, 1)], &[(PRO_RNAP, 1)], 1.0),
            (&[(PRO_RNAP, 1)], &[(PRO, 1), (RNAP, 1)], 1.0),
            (&[(PRO_RNAP, 1)], &[(TR_RNAP, 1)], 0.1),
            (&[(TR_RNAP, 1)], &[(RBS, 1), (PRO, 1), (EL_RNAP, 1)], 3.0),
            (&[(EL_RNAP, 1)], &[(RNAP, 1)], 0.067),
            (&[(RBS, 1), (RIB, 1)], &[(RIB_RBS, 1)], 1.0),
            (&[(RIB_RBS, 1)], &[(RBS, 1), (RIB, 1)], 2.25),
            (&[(RIB_RBS, 1)], &[(EL_RIB, 1), (RBS, 1)], 0.5),
            (&[(EL_RIB, 1)], &[(PROTEIN, 1), (RIB, 1)], 0.015),
            (&[(PROTEIN, 1)], &[], 6.42e-5),
            (&[(RBS, 1), (RNASE, 1)], &[(RNASE_RBS, 1)], 0.1),
            (&[(RNASE_RBS, 1)], &[(RNASE, 1)], 0.3),
        ],
        vec![cap; 12],
    )
}

pub fn gene_expression_initial(cap: u32) -> Vec<u32> {
    let mut s = vec![0; 12];
    s[0] = 1;
    s[1] = cap;
    s[6] = cap;
    s[10] = cap;
    s
}

fn network_model(
    name: &str,
    net: ReactionNetwork,
    initial: Vec<u32>,
    provenance: &str,
    limit: usize,
) -> Result<Model> {
    let chain = net.explore(&initial, limit)?;
    let rate = chain.generator.max_exit_rate();
    Ok(Model {
        descriptor: ModelDescriptor {
            name: name.to_string(),
            state_count: chain.space.len(),
            uniformisation_rate: Some(if rate > 0.0 { rate } else { 1.0 }),
            initial_state: 0,
            initial_population: Some(initial),
            kind: MatrixKind::Generator,
            provenance: provenance.to_string(),
        },
        matrix: ModelMatrix::Generator(chain.generator),
        network: Some(net),
        initial_distribution: None,
    })
}

fn parse_list(name: &str, arg: &str) -> Result<Vec<usize>> {
    arg.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Error::parse(format!("model `{name}`"), format!("`{t}`: {e}")))
        })
        .collect()
}

fn parse_one(name: &str, arg: Option<&str>, default: usize) -> Result<usize> {
    match arg {
        None => Ok(default),
        Some(a) => {
            let v = parse_list(name, a)?;
            if v.len() != 1 {
                return Err(Error::parse(
                    format!("model `{name}`"),
                    "expected one integer",
                ));
            }
            Ok(v[0])
        }
    }
}

fn to_u32(name: &str, v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::parse(format!("model `{name}`"), "parameter too large"))
}

/// Reads a matrix file as a model; generators are uniformised at `rate` (or the largest exit rate).
pub fn ingest(name: &str, path: &Path, kind: MatrixKind, rate: Option<f64>) -> Result<Model> {
    let csr = mtx::read_coordinate_file(path)?;
    let resolved = match kind {
        MatrixKind::Auto => {
            let n = csr.rows();
            let zero_rows = (0..n).all(|i| csr.row_sum(i).abs() <= 1e-9);
            if zero_rows && n > 0 && (0..n).any(|i| !csr.row(i).0.is_empty()) {
                MatrixKind::Generator
            } else {
                MatrixKind::Stochastic
            }
        }
        k => k,
    };
    let provenance = format!("ingested from {}", path.display());
    let (matrix, rate) = match resolved {
        MatrixKind::Generator => {
            let q = SparseGeneratorMatrix::new(csr)?;
            let r = rate.unwrap_or_else(|| q.max_exit_rate().max(f64::MIN_POSITIVE));
            (ModelMatrix::Generator(q), Some(r))
        }
        _ => (
            ModelMatrix::Stochastic(SparseStochasticMatrix::new(csr)?),
            None,
        ),
    };
    let state_count = match &matrix {
        ModelMatrix::Generator(q) => q.n(),
        ModelMatrix::Stochastic(p) => p.n(),
    };
    Ok(Model {
        descriptor: ModelDescriptor {
            name: name.to_string(),
            state_count,
            uniformisation_rate: rate,
            initial_state: 0,
            initial_population: None,
            kind: resolved,
            provenance,
        },
        matrix,
        network: None,
        initial_distribution: None,
    })
}

/// Looks up a catalog model. `ingest_path` is required for `rsvp-ingest`.
///
/// Fixture names accept a seed suffix, e.g. `lumpable:3,5,4@7`.
pub fn builtin(name: &str, ingest_path: Option<&Path>) -> Result<Model> {
    builtin_with_limit(name, ingest_path, DEFAULT_STATE_LIMIT)
}

/// [`builtin`] with an explicit bound on the number of explored states.
pub fn builtin_with_limit(name: &str, ingest_path: Option<&Path>, limit: usize) -> Result<Model> {
    let (base, seed) = match name.split_once('@') {
        Some((b, s)) => (
            b,
            s.parse::<u64>()
                .map_err(|e| Error::parse(format!("model `{name}`"), format!("seed: {e}")))?,
        ),
        None => (name, 1),
    };
    let (head, arg) = match base.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (base, None),
    };
    match head {
        "lotka-volterra" => {
            let cap = to_u32(name, parse_one(name, arg, 100)?)?;
            network_model(
                base,
                lotka_volterra_network(cap)?,
                lotka_volterra_initial(cap),
                "predator-prey mass-action network, constants 10 / 0.01 / 10, population cap per species",
                limit,
            )
        }
        "gene-expression" => {
            let cap = to_u32(name, parse_one(name, arg, 5)?)?;
            network_model(
                base,
                gene_expression_network(cap)?,
                gene_expression_initial(cap),
                "prokaryotic transcription/translation initiation network, population cap per species; \
                 rate constants are assumed values",
                limit,
            )
        }
        "workstation-cluster" => {
            let n = to_u32(name, parse_one(name, arg, 20)?)?;
            let chain = workstation_cluster_with_limit(n, limit)?;
            let rate = chain.generator.max_exit_rate();
            Ok(Model {
                descriptor: ModelDescriptor {
                    name: base.to_string(),
                    state_count: chain.space.len(),
                    uniformisation_rate: Some(rate),
                    initial_state: 0,
                    initial_population: Some(chain.space.state(0).to_vec()),
                    kind: MatrixKind::Generator,
                    provenance: format!(
                        "two clusters of {n} workstations, switches and backbone, one shared repair unit"
                    ),
                },
                matrix: ModelMatrix::Generator(chain.generator),
                network: None,
                initial_distribution: None,
            })
        }
        "rsvp-ingest" => {
            let path = ingest_path.ok_or_else(|| {
                Error::InvalidArgument("rsvp-ingest needs a matrix file (--matrix)".into())
            })?;
            ingest(base, path, MatrixKind::Auto, Some(RSVP_RATE)).map(|mut m| {
                if m.descriptor.kind == MatrixKind::Stochastic {
                    m.descriptor.uniformisation_rate = None;
                }
                m
            })
        }
        "identity" => {
            let n = parse_one(name, arg, 1)?;
            if n == 0 {
                return Err(Error::parse(
                    format!("model `{name}`"),
                    "size must be positive",
                ));
            }
            Ok(fixture_model(
                name,
                SparseStochasticMatrix::identity(n),
                None,
                "identity chain",
            ))
        }
        "lumpable" => {
            let sizes = parse_list(name, arg.unwrap_or("3,5,4"))?;
            let chain = lumpable_test_chain(&sizes, seed)?;
            Ok(fixture_model(
                name,
                chain.matrix,
                Some(chain.p0),
                &format!(
                    "lumpable fixture with {} blocks, seed {seed}",
                    chain.exact_size
                ),
            ))
        }
        "random" => {
            let args = parse_list(name, arg.unwrap_or("50"))?;
            let n = args[0];
            let per_row = args.get(1).copied().unwrap_or(5.min(n));
            let p = random_stochastic(n, per_row, seed)?;
            let p0 = random_distribution(n, seed.wrapping_add(1))?;
            Ok(fixture_model(
                name,
                p,
                Some(p0),
                &format!("random sparse chain, seed {seed}"),
            ))
        }
        _ => Err(Error::UnknownModel(name.to_string())),
    }
}

fn fixture_model(
    name: &str,
    p: SparseStochasticMatrix,
    initial: Option<Distribution>,
    provenance: &str,
) -> Model {
    Model {
        descriptor: ModelDescriptor {
            name: name.to_string(),
            state_count: p.n(),
            uniformisation_rate: None,
            initial_state: 0,
            initial_population: None,
            kind: MatrixKind::Stochastic,
            provenance: provenance.to_string(),
        },
        matrix: ModelMatrix::Stochastic(p),
        network: None,
        initial_distribution: initial,
    }
}

/// Catalog names listed by `arnagg model describe`.
pub const CATALOG: [&str; 4] = [
    "lotka-volterra",
    "workstation-cluster",
    "gene-expression",
    "rsvp-ingest",
];
