//! Peeling (BP) decoder for the erasure channel.

use crate::error::{Error, Result};
use crate::graph::{ResidualSummary, ResolutionLedger, TannerGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    Success,
    Stalled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    /// `None` where the decoder could not determine the bit.
    pub assignment: Vec<Option<u8>>,
    pub residual: ResidualSummary,
    /// (check, variable) removals performed on the graph so far.
    pub iterations: usize,
}

impl DecodeOutcome {
    pub fn is_success(&self) -> bool {
        self.status == DecodeStatus::Success
    }

    /// The decoded word when every bit is known.
    pub fn word(&self) -> Option<Vec<u8>> {
        self.assignment.iter().copied().collect()
    }

    pub(crate) fn from_graph(graph: &TannerGraph, ledger: &mut ResolutionLedger) -> Self {
        let status = if graph.alive_vars() == 0 {
            DecodeStatus::Success
        } else {
            DecodeStatus::Stalled
        };
        let c = graph.counters();
        Self {
            status,
            assignment: ledger.resolve(),
            residual: graph.summary(),
            iterations: c.peels + c.merges,
        }
    }
}

/// Peels degree-one checks until none remain. Calling it again on a stalled
/// graph is a no-op; after other mutations it resumes where it stopped.
pub fn bp_run(graph: &mut TannerGraph, ledger: &mut ResolutionLedger) -> Result<DecodeOutcome> {
    bp_peel(graph, ledger)?;
    Ok(DecodeOutcome::from_graph(graph, ledger))
}

/// The peeling loop without building an outcome; returns the number of peels.
pub(crate) fn bp_peel(graph: &mut TannerGraph, ledger: &mut ResolutionLedger) -> Result<usize> {
    let cap = graph.num_vars() + graph.num_checks();
    let mut steps = 0;
    while graph.alive_vars() > 0 && graph.remove_degree1_check(ledger)?.is_some() {
        steps += 1;
        if steps > cap {
            return Err(Error::IterationCap(cap));
        }
    }
    Ok(steps)
}
