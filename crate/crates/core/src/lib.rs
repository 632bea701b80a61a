//! Tree-structured expectation propagation (TEP) decoding of LDPC codes over
//! the binary erasure channel, with the peeling (BP) baseline, a
//! density-evolution engine for the asymptotic analysis, and a Monte-Carlo
//! word-error-rate harness.

pub mod bp;
pub mod channel;
pub mod de;
pub mod ensemble;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod tep;
pub mod trace;

pub use bp::{bp_run, DecodeOutcome, DecodeStatus};
pub use channel::{transmit, ReceivedWord};
pub use ensemble::{sample_graph, systematic_encode, CodeGraph, DegreeDistribution, EnsembleInstance};
pub use error::{Error, Result};
pub use graph::{ResolutionLedger, TannerGraph};
pub use tep::{tep_run, tep_trace, Schedule};
