//! Seeded synthetic chains for tests and experiments.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::markov::sparse::{CsrMatrix, SparseStochasticMatrix};
use crate::markov::vector::Distribution;

/// A chain that is both ordinarily and exactly lumpable with respect to a
/// known partition, started from a distribution that is uniform on blocks.
#[derive(Debug, Clone)]
pub struct LumpableChain {
    pub matrix: SparseStochasticMatrix,
    /// Upper bound on the dimension of an invariant Krylov space: the number of blocks.
    pub exact_size: usize,
    pub p0: Distribution,
    /// Block of each state.
    pub partition: Vec<usize>,
}

fn normalized_weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..len).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Builds `P[B, C] = A(B, C)·M_BC` for a random block matrix `A` and blocks
/// `M_BC` whose rows sum to one and whose columns sum to `|B|/|C|`.
///
/// Each `M_BC` starts at the constant `1/|C|` and receives random "swap"
/// perturbations `±d` on 2×2 sub-grids, which keep both margins fixed. The
/// row margin makes every state of `B` move to block `C` with probability
/// `A(B, C)`; the column margin keeps block-uniform distributions block-uniform.
pub fn lumpable_test_chain(block_sizes: &[usize], seed: u64) -> Result<LumpableChain> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::InvalidArgument(
            "block sizes must be nonempty and positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = block_sizes.len();
    let n: usize = block_sizes.iter().sum();
    let starts: Vec<usize> = block_sizes
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect();
    let aggregate: Vec<Vec<f64>> = (0..m).map(|_| normalized_weights(&mut rng, m)).collect();

    let mut dense = vec![0.0; n * n];
    for (bi, &bs) in block_sizes.iter().enumerate() {
        for (ci, &cs) in block_sizes.iter().enumerate() {
            let mut block = vec![1.0 / cs as f64; bs * cs];
            if bs >= 2 && cs >= 2 {
                for _ in 0..2 * bs * cs {
                    let rows = sample(&mut rng, bs, 2);
                    let cols = sample(&mut rng, cs, 2);
                    let (r1, r2, c1, c2) =
                        (rows.index(0), rows.index(1), cols.index(0), cols.index(1));
                    let room = block[r1 * cs + c2].min(block[r2 * cs + c1]);
                    let d = rng.gen_range(0.0..=0.9) * room;
                    block[r1 * cs + c1] += d;
                    block[r2 * cs + c2] += d;
                    block[r1 * cs + c2] -= d;
                    block[r2 * cs + c1] -= d;
                }
            }
            let a = aggregate[bi][ci];
            for r in 0..bs {
                for c in 0..cs {
                    dense[(starts[bi] + r) * n + starts[ci] + c] = a * block[r * cs + c];
                }
            }
        }
    }
    let triplets: Vec<(usize, usize, f64)> = dense
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(k, &v)| (k / n, k % n, v))
        .collect();
    let matrix = SparseStochasticMatrix::new(CsrMatrix::from_triplets(n, n, &triplets)?)?;

    let masses = normalized_weights(&mut rng, m);
    let mut p0 = vec![0.0; n];
    let mut partition = vec![0; n];
    for (bi, &bs) in block_sizes.iter().enumerate() {
        for k in 0..bs {
            p0[starts[bi] + k] = masses[bi] / bs as f64;
            partition[starts[bi] + k] = bi;
        }
    }
    Ok(LumpableChain {
        matrix,
        exact_size: m,
        p0: Distribution::normalized(p0)?,
        partition,
    })
}

/// Random sparse stochastic matrix with `per_row` distinct nonzeros in every row.
pub fn random_stochastic(n: usize, per_row: usize, seed: u64) -> Result<SparseStochasticMatrix> {
    if n == 0 || per_row == 0 || per_row > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= per_row <= n, got per_row = {per_row}, n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::with_capacity(n * per_row);
    for i in 0..n {
        let cols = sample(&mut rng, n, per_row);
        let weights = normalized_weights(&mut rng, per_row);
        for (j, w) in cols.iter().zip(weights) {
            triplets.push((i, j, w));
        }
    }
    SparseStochasticMatrix::new(CsrMatrix::from_triplets(n, n, &triplets)?)
}

/// Random distribution with full support.
pub fn random_distribution(n: usize, seed: u64) -> Result<Distribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Distribution::normalized(normalized_weights(&mut rng, n))
}
