use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::sparse::SparseGeneratorMatrix;
use crate::models::explore::{explore, ExploredChain, StateSpace, DEFAULT_STATE_LIMIT};

/// A reaction as sparse `(species index, count)` lists of inputs and outputs plus its rate.
pub type SparseReaction<'a> = (&'a [(usize, u32)], &'a [(usize, u32)], f64);

/// A mass-action reaction `Σ input_s·S_s → Σ output_s·S_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub input: Vec<u32>,
    pub output: Vec<u32>,
    /// Rate constant (per unit time).
    pub rate: f64,
}

/// Species, reactions and per-species population caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionNetwork {
    species: Vec<String>,
    reactions: Vec<Reaction>,
    caps: Vec<u32>,
}

fn falling_factorial(n: u32, k: u32) -> f64 {
    (0..k).map(|i| f64::from(n.saturating_sub(i))).product()
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>, caps: Vec<u32>) -> Result<Self> {
        let s = species.len();
        if s == 0 {
            return Err(Error::InvalidArgument(
                "a reaction network needs at least one species".into(),
            ));
        }
        if caps.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: caps.len(),
            });
        }
        if caps.contains(&0) {
            return Err(Error::InvalidArgument(
                "population caps must be at least 1".into(),
            ));
        }
        for (k, r) in reactions.iter().enumerate() {
            if r.input.len() != s || r.output.len() != s {
                return Err(Error::InvalidArgument(format!(
                    "reaction {k}: stoichiometry vectors must have {s} entries"
                )));
            }
            if !(r.rate > 0.0) || !r.rate.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "reaction {k}: rate constant must be positive, got {}",
                    r.rate
                )));
            }
        }
        Ok(ReactionNetwork {
            species,
            reactions,
            caps,
        })
    }

    /// Builds a network from `(input, output, rate)` triples given as sparse
    /// `(species index, count)` lists.
    pub fn from_sparse(
        species: &[&str],
        reactions: &[SparseReaction<'_>],
        caps: Vec<u32>,
    ) -> Result<Self> {
        let s = species.len();
        let dense = |terms: &[(usize, u32)]| -> Result<Vec<u32>> {
            let mut v = vec![0; s];
            for &(i, c) in terms {
                *v.get_mut(i).ok_or_else(|| {
                    Error::InvalidArgument(format!("species index {i} out of range"))
                })? += c;
            }
            Ok(v)
        };
        let reactions = reactions
            .iter()
            .map(|&(i, o, rate)| {
                Ok(Reaction {
                    input: dense(i)?,
                    output: dense(o)?,
                    rate,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ReactionNetwork::new(
            species.iter().map(|x| x.to_string()).collect(),
            reactions,
            caps,
        )
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    /// Mass-action propensity `c·Π_s (x_s)_{input_s}` (falling factorials).
    pub fn propensity(&self, reaction: &Reaction, state: &[u32]) -> f64 {
        reaction.rate
            * state
                .iter()
                .zip(&reaction.input)
                .map(|(&x, &k)| falling_factorial(x, k))
                .product::<f64>()
    }

    /// Enabled reactions and their targets; firings that would exceed a cap are blocked.
    pub fn successors(&self, state: &[u32], out: &mut Vec<(f64, Vec<u32>)>) {
        for r in &self.reactions {
            if state.iter().zip(&r.input).any(|(&x, &k)| x < k) {
                continue;
            }
            let target: Vec<u32> = state
                .iter()
                .zip(r.input.iter().zip(&r.output))
                .map(|(&x, (&i, &o))| x - i + o)
                .collect();
            if target.iter().zip(&self.caps).any(|(&x, &c)| x > c) {
                continue;
            }
            let a = self.propensity(r, state);
            if a > 0.0 {
                out.push((a, target));
            }
        }
    }

    fn check_initial(&self, initial: &[u32]) -> Result<()> {
        if initial.len() != self.species.len() {
            return Err(Error::DimensionMismatch {
                expected: self.species.len(),
                found: initial.len(),
            });
        }
        if initial.iter().zip(&self.caps).any(|(&x, &c)| x > c) {
            return Err(Error::InvalidArgument(
                "initial state exceeds the population caps".into(),
            ));
        }
        Ok(())
    }

    /// Reachable states and generator in one pass.
    pub fn explore(&self, initial: &[u32], limit: usize) -> Result<ExploredChain> {
        self.check_initial(initial)?;
        explore(initial.to_vec(), limit, |s, out| self.successors(s, out))
    }
}

/// Breadth-first closure of `initial` under the network's reactions.
pub fn enumerate_state_space(net: &ReactionNetwork, initial: &[u32]) -> Result<StateSpace> {
    enumerate_state_space_with_limit(net, initial, DEFAULT_STATE_LIMIT)
}

pub fn enumerate_state_space_with_limit(
    net: &ReactionNetwork,
    initial: &[u32],
    limit: usize,
) -> Result<StateSpace> {
    Ok(net.explore(initial, limit)?.space)
}

/// Mass-action generator on an enumerated state space. Transitions leaving
/// the space are dropped, which only happens when `space` was not produced
/// from `net`.
pub fn build_generator(net: &ReactionNetwork, space: &StateSpace) -> Result<SparseGeneratorMatrix> {
    if space.width() != net.species_count() {
        return Err(Error::DimensionMismatch {
            expected: net.species_count(),
            found: space.width(),
        });
    }
    let mut buf = Vec::new();
    let mut rows = Vec::with_capacity(space.len());
    for state in space.iter() {
        buf.clear();
        net.successors(state, &mut buf);
        let row: Vec<(usize, f64)> = buf
            .iter()
            .filter(|(_, t)| t.as_slice() != state)
            .filter_map(|(a, t)| space.index_of(t).map(|j| (j, *a)))
            .collect();
        rows.push(row);
    }
    crate::models::explore::generator_from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn birth_chain_with_cap_two() {
        let net = ReactionNetwork::from_sparse(&["X"], &[(&[], &[(0, 1)], 1.5)], vec![2]).unwrap();
        let space = enumerate_state_space(&net, &[0]).unwrap();
        assert_eq!(space.len(), 3);
        assert_eq!(space.state(2), &[2]);
        let q = build_generator(&net, &space).unwrap();
        assert_eq!(q.get(0, 1), 1.5);
        assert_eq!(q.get(0, 0), -1.5);
        assert_eq!(q.get(2, 2), 0.0);
    }

    #[test]
    fn single_birth_cap_one() {
        let net = ReactionNetwork::from_sparse(&["X"], &[(&[], &[(0, 1)], 3.0)], vec![1]).unwrap();
        let space = enumerate_state_space(&net, &[0]).unwrap();
        let q = build_generator(&net, &space).unwrap();
        assert_eq!(q.to_dense().as_slice(), &[-3.0, 3.0, 0.0, 0.0]);
    }

    #[test]
    fn fail_repair() {
        // Up -> Down at rate f, Down -> Up at rate r.
        let net = ReactionNetwork::from_sparse(
            &["Up", "Down"],
            &[(&[(0, 1)], &[(1, 1)], 0.25), (&[(1, 1)], &[(0, 1)], 4.0)],
            vec![1, 1],
        )
        .unwrap();
        let space = enumerate_state_space(&net, &[1, 0]).unwrap();
        let q = build_generator(&net, &space).unwrap();
        assert_eq!(q.to_dense().as_slice(), &[-0.25, 0.25, 4.0, -4.0]);
    }

    #[test]
    fn mass_action_uses_falling_factorials() {
        let net = ReactionNetwork::from_sparse(&["A"], &[(&[(0, 2)], &[], 0.5)], vec![5]).unwrap();
        assert_eq!(net.propensity(&net.reactions()[0], &[4]), 0.5 * 4.0 * 3.0);
        assert_eq!(net.propensity(&net.reactions()[0], &[1]), 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        let net = ReactionNetwork::from_sparse(&["X"], &[(&[], &[(0, 1)], 1.0)], vec![50]).unwrap();
        assert!(matches!(
            enumerate_state_space_with_limit(&net, &[0], 10),
            Err(Error::StateSpaceOverflow { limit: 10 })
        ));
    }

    #[test]
    fn invalid_networks_are_rejected() {
        assert!(ReactionNetwork::from_sparse(&["X"], &[(&[], &[(0, 1)], 0.0)], vec![1]).is_err());
        assert!(ReactionNetwork::from_sparse(&["X"], &[(&[], &[(0, 1)], 1.0)], vec![0]).is_err());
        assert!(ReactionNetwork::from_sparse(&["X"], &[(&[], &[(1, 1)], 1.0)], vec![1]).is_err());
    }
}
