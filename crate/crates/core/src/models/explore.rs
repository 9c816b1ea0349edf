use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::markov::sparse::{CsrMatrix, SparseGeneratorMatrix};

/// Default cap on the number of enumerated states.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

/// Reachable states of a population or record model, numbered in
/// breadth-first order from the initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    width: usize,
    states: Vec<u32>,
    index: HashMap<Vec<u32>, usize>,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Number of components of each state vector.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i * self.width..(i + 1) * self.width]
    }

    pub fn index_of(&self, state: &[u32]) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.states.chunks_exact(self.width.max(1))
    }
}

/// A reachable state space together with its generator.
#[derive(Debug, Clone)]
pub struct ExploredChain {
    pub space: StateSpace,
    pub generator: SparseGeneratorMatrix,
}

/// Breadth-first exploration of a CTMC given by a successor function.
///
/// `successors` lists `(rate, target)` pairs; transitions with zero rate or
/// back into the same state are ignored and parallel transitions are summed.
pub fn explore<F>(initial: Vec<u32>, limit: usize, mut successors: F) -> Result<ExploredChain>
where
    F: FnMut(&[u32], &mut Vec<(f64, Vec<u32>)>),
{
    let width = initial.len();
    let mut states = initial.clone();
    let mut index = HashMap::new();
    index.insert(initial, 0usize);
    let mut queue = VecDeque::from([0usize]);
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut buf = Vec::new();
    while let Some(i) = queue.pop_front() {
        buf.clear();
        let current = states[i * width..(i + 1) * width].to_vec();
        successors(&current, &mut buf);
        let mut row = Vec::with_capacity(buf.len());
        for (rate, target) in buf.drain(..) {
            if rate == 0.0 || target == current {
                continue;
            }
            if !(rate > 0.0) || !rate.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "transition rate {rate} is not positive"
                )));
            }
            let next = index.len();
            let t = match index.entry(target) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    if next >= limit {
                        return Err(Error::StateSpaceOverflow { limit });
                    }
                    states.extend_from_slice(e.key());
                    e.insert(next);
                    queue.push_back(next);
                    next
                }
            };
            row.push((t, rate));
        }
        rows.push(row);
    }
    let generator = generator_from_rows(rows)?;
    Ok(ExploredChain {
        space: StateSpace {
            width,
            states,
            index,
        },
        generator,
    })
}

/// Assembles a generator from off-diagonal rate lists; the diagonal is the negative row sum.
pub fn generator_from_rows(rows: Vec<Vec<(usize, f64)>>) -> Result<SparseGeneratorMatrix> {
    let n = rows.len();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    row_offsets.push(0);
    for (i, mut row) in rows.into_iter().enumerate() {
        row.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len() + 1);
        for (j, v) in row {
            match merged.last_mut() {
                Some((lj, lv)) if *lj == j => *lv += v,
                _ => merged.push((j, v)),
            }
        }
        let exit: f64 = merged.iter().map(|&(_, v)| v).sum();
        let pos = merged.partition_point(|&(j, _)| j < i);
        if exit != 0.0 {
            merged.insert(pos, (i, -exit));
        }
        for (j, v) in merged {
            col_indices.push(j);
            values.push(v);
        }
        row_offsets.push(col_indices.len());
    }
    SparseGeneratorMatrix::new(CsrMatrix::try_new(n, n, row_offsets, col_indices, values)?)
}
