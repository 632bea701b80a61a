//! TEP decoder: when peeling stalls, a degree-two check is eliminated by
//! merging its two variables, and peeling resumes as soon as a degree-one
//! check appears. Halts on success or when no check of degree one or two is
//! left.

use std::str::FromStr;

use crate::bp::{bp_peel, DecodeOutcome};
use crate::error::{Error, Result};
use crate::graph::{ResolutionLedger, TannerGraph};
use crate::trace::TrajectoryRow;

/// Order in which the two primitives are applied after the first stall.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// Peel whenever a degree-one check exists, merge otherwise.
    #[default]
    Practical,
    /// Merge while degree-two checks exist, then peel; repeat. This is the
    /// ordering the asymptotic Stage A / Stage B analysis models.
    Analysis,
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "practical" => Ok(Schedule::Practical),
            "analysis" => Ok(Schedule::Analysis),
            other => Err(Error::InvalidArgument(format!("unknown schedule '{other}'"))),
        }
    }
}

/// Runs BP to a stall, then TEP until success or exhaustion.
pub fn tep_run(graph: &mut TannerGraph, ledger: &mut ResolutionLedger, schedule: Schedule) -> Result<DecodeOutcome> {
    drive(graph, ledger, schedule, None)
}

/// Like [`tep_run`], also recording the normalized degree distribution every
/// `every` post-stall iterations (and at the stall and the end). Time is the
/// iteration count since the stall divided by the code's edge count.
pub fn tep_trace(
    graph: &mut TannerGraph,
    ledger: &mut ResolutionLedger,
    schedule: Schedule,
    every: usize,
) -> Result<(DecodeOutcome, Vec<TrajectoryRow>)> {
    let mut rows = Vec::new();
    let out = drive(graph, ledger, schedule, Some((&mut rows, every.max(1))))?;
    Ok((out, rows))
}

/// Normalized degree fractions of the current graph.
pub fn snapshot(graph: &TannerGraph, t: f64, shared: bool) -> TrajectoryRow {
    let e_ref = graph.reference_edges().max(1) as f64;
    let scale = |h: &[usize]| {
        h.iter()
            .enumerate()
            .map(|(i, &count)| (i * count) as f64 / e_ref)
            .collect()
    };
    TrajectoryRow {
        t,
        e: graph.edges() as f64 / e_ref,
        l: scale(graph.var_degree_hist()),
        r: scale(graph.check_degree_hist()),
        shared: if shared { 1.0 } else { 0.0 },
    }
}

fn drive(
    graph: &mut TannerGraph,
    ledger: &mut ResolutionLedger,
    schedule: Schedule,
    mut trace: Option<(&mut Vec<TrajectoryRow>, usize)>,
) -> Result<DecodeOutcome> {
    bp_peel(graph, ledger)?;
    if graph.alive_vars() == 0 {
        return Ok(DecodeOutcome::from_graph(graph, ledger));
    }
    let e_ref = graph.reference_edges().max(1) as f64;
    if let Some((rows, _)) = trace.as_mut() {
        rows.push(snapshot(graph, 0.0, false));
    }
    let cap = graph.num_vars() + graph.num_checks();
    let mut steps = 0usize;
    loop {
        if graph.alive_vars() == 0 {
            break;
        }
        let (d1, d2) = match schedule {
            Schedule::Practical => {
                let d1 = graph.peek_degree1();
                (d1, if d1.is_none() { graph.peek_degree2() } else { None })
            }
            Schedule::Analysis => {
                let d2 = graph.peek_degree2();
                (if d2.is_none() { graph.peek_degree1() } else { None }, d2)
            }
        };
        let shared = if let Some(c) = d2 {
            !graph.merge_variables(c, ledger)?.shared.is_empty()
        } else if d1.is_some() {
            graph.remove_degree1_check(ledger)?;
            false
        } else {
            break;
        };
        steps += 1;
        if steps > cap {
            return Err(Error::IterationCap(cap));
        }
        if let Some((rows, every)) = trace.as_mut() {
            if steps % *every == 0 {
                rows.push(snapshot(graph, steps as f64 / e_ref, shared));
            }
        }
    }
    if let Some((rows, every)) = trace.as_mut() {
        if steps % *every != 0 {
            rows.push(snapshot(graph, steps as f64 / e_ref, false));
        }
    }
    Ok(DecodeOutcome::from_graph(graph, ledger))
}
