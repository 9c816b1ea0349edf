use std::fmt;
use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::arnoldi::{ArnoldiAggregation, ArnoldiState, Expansion};
use crate::convergence::config::CriterionConfig;
use crate::convergence::criterion::criterion_from_rows;
use crate::convergence::eigen::{dominant_eigenvector, DominantEigenvector, EigenOutcome};
use crate::error::{Error, Result};
use crate::markov::sparse::SparseStochasticMatrix;

/// Why the adaptive driver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    CriterionMet,
    InvariantSubspace,
    MaxDimension,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::CriterionMet => "criterion-met",
            StopReason::InvariantSubspace => "invariant-subspace",
            StopReason::MaxDimension => "max-dimension",
        }
    }

    /// False only when the dimension cap was hit first.
    pub fn is_converged(self) -> bool {
        self != StopReason::MaxDimension
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of the eigenvector step at a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Real,
    ComplexRejected,
    SolverFailed,
}

/// One evaluation of the stopping criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub j: usize,
    /// `None` when no real eigenvector was available.
    pub criterion: Option<f64>,
    pub status: CheckStatus,
    pub h_next: f64,
    /// Time since the start of the run.
    pub elapsed_ns: u128,
}

#[derive(Debug, Clone)]
pub struct AdaptiveRun {
    pub aggregation: ArnoldiAggregation,
    /// The normalized eigenvector at the final dimension, when it was real.
    pub eigenvector: Option<DominantEigenvector>,
    /// Criterion value at the final dimension, when available.
    pub criterion: Option<f64>,
    pub stop_reason: StopReason,
    pub trace: Vec<TraceRow>,
    /// Time spent in eigenvector computations and criterion evaluation.
    pub criterion_time: Duration,
    pub total_time: Duration,
}

impl AdaptiveRun {
    pub fn converged(&self) -> bool {
        self.stop_reason.is_converged()
    }
}

/// A finished check: the trace row plus the eigenvector when it was real.
pub(crate) struct Check {
    pub row: TraceRow,
    pub eigenvector: Option<DominantEigenvector>,
}

/// Evaluates the criterion on the size-`j` prefix of `state`.
pub(crate) fn check_prefix(
    state: &ArnoldiState,
    j: usize,
    cfg: &CriterionConfig,
    start: Instant,
) -> Result<Check> {
    let h = state.hessenberg(j)?;
    let (status, eigenvector, criterion) = match dominant_eigenvector(&h, cfg) {
        Ok(EigenOutcome::Real(ev)) => {
            let lifted = state.combine_rows(ev.vector())?;
            match ev.normalized_by_lift(&lifted) {
                Ok(ev) => {
                    let b = state.residual_row_sums(j)?;
                    let value = criterion_from_rows(ev.vector(), &b);
                    (CheckStatus::Real, Some(ev), Some(value))
                }
                Err(Error::EigenSolver(_)) => (CheckStatus::SolverFailed, None, None),
                Err(e) => return Err(e),
            }
        }
        Ok(EigenOutcome::Complex(_)) => (CheckStatus::ComplexRejected, None, None),
        Err(Error::EigenSolver(_)) => (CheckStatus::SolverFailed, None, None),
        Err(e) => return Err(e),
    };
    Ok(Check {
        row: TraceRow {
            j,
            criterion,
            status,
            h_next: state.boundary_coefficient(j),
            elapsed_ns: start.elapsed().as_nanos(),
        },
        eigenvector,
    })
}

/// Expands the Arnoldi iteration until the criterion drops to `ε`, the Krylov
/// space becomes invariant or the dimension cap is reached.
///
/// The criterion is evaluated whenever the dimension is a multiple of
/// `check_every`; complex eigenvectors and eigensolver failures just mean
/// the iteration continues. A final evaluation is made at the stopping
/// dimension if none happened there.
pub fn run_adaptive(
    p0: &[f64],
    p: &SparseStochasticMatrix,
    cfg: &CriterionConfig,
) -> Result<AdaptiveRun> {
    let cap = cfg.validate(p.n())?;
    let start = Instant::now();
    let mut criterion_time = Duration::ZERO;
    let mut trace = Vec::new();
    let mut state = ArnoldiState::new(p0, p, cfg.arnoldi)?;
    let mut last: Option<Check>;

    let stop_reason = loop {
        let j = state.dimension();
        let invariant = state.is_invariant();
        if invariant || j % cfg.check_every == 0 || j >= cap {
            let t = Instant::now();
            let check = check_prefix(&state, j, cfg, start)?;
            criterion_time += t.elapsed();
            trace.push(check.row.clone());
            let met = check.row.criterion.is_some_and(|c| c <= cfg.epsilon);
            last = Some(check);
            if invariant {
                break StopReason::InvariantSubspace;
            }
            if met {
                break StopReason::CriterionMet;
            }
            if j >= cap {
                break StopReason::MaxDimension;
            }
        }
        if state.expand(p)? == Expansion::Invariant {
            unreachable!("invariance is handled before expanding");
        }
    };

    let last = last.expect("the loop always evaluates before stopping");
    Ok(AdaptiveRun {
        aggregation: state.to_aggregation()?,
        eigenvector: last.eigenvector,
        criterion: last.row.criterion,
        stop_reason,
        trace,
        criterion_time,
        total_time: start.elapsed(),
    })
}

pub const TRACE_CSV_HEADER: &str = "# arnagg-trace v1";

/// Writes the trace as CSV; the stop reason appears on the last row only.
pub fn write_trace_csv<W: Write>(trace: &[TraceRow], stop: StopReason, mut w: W) -> Result<()> {
    writeln!(w, "{TRACE_CSV_HEADER}")?;
    writeln!(w, "j,criterion,h_next,elapsed_ns,stop_reason")?;
    for (i, row) in trace.iter().enumerate() {
        let criterion = row
            .criterion
            .map_or_else(|| "nan".to_string(), |c| format!("{c:e}"));
        let reason = if i + 1 == trace.len() {
            stop.as_str()
        } else {
            ""
        };
        writeln!(
            w,
            "{},{},{:e},{},{}",
            row.j, criterion, row.h_next, row.elapsed_ns, reason
        )?;
    }
    w.flush()?;
    Ok(())
}
