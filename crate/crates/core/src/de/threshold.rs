//! Stage A threshold search.

use rayon::prelude::*;

use super::{bp_positivity_check, bp_threshold, residual_dd_at_stall, stage_a_integrate, stage_b_integrate};
use super::{DeConfig, EndReason};
use crate::ensemble::DegreeDistribution;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct TepThreshold {
    pub eps_bp: f64,
    pub eps_max_a: f64,
    pub e_ref: f64,
    pub dt_rel: f64,
}

impl TepThreshold {
    /// `key=value` lines.
    pub fn report(&self) -> String {
        use crate::trace::format_sig;
        format!(
            "eps_bp={}\neps_maxA={}\nE_ref={}\ndt={}\n",
            format_sig(self.eps_bp, 9),
            format_sig(self.eps_max_a, 9),
            format_sig(self.e_ref, 9),
            format_sig(self.dt_rel, 9)
        )
    }
}

/// Stage A reaches `p_B = 1`, and after Stage B peeling finishes the graph.
pub fn tep_succeeds(dd: &DegreeDistribution, eps: f64, cfg: &DeConfig) -> Result<bool> {
    let start = residual_dd_at_stall(dd, eps, cfg.e_ref)?;
    let dt = cfg.step_for(&start);
    let a = stage_a_integrate(&start, dt, cfg)?;
    if a.end_reason != EndReason::PbReachedOne {
        return Ok(false);
    }
    let b = stage_b_integrate(&a.final_state, dt, cfg)?;
    Ok(bp_positivity_check(&b.final_state))
}

/// Largest `ε` (to within `1e-4`) at which [`tep_succeeds`] holds. Each round
/// evaluates three interior points concurrently, quartering the bracket.
pub fn tep_threshold_lower_bound(dd: &DegreeDistribution, cfg: &DeConfig) -> Result<TepThreshold> {
    let eps_bp = bp_threshold(dd);
    let done = |eps_max_a| TepThreshold {
        eps_bp,
        eps_max_a,
        e_ref: cfg.e_ref,
        dt_rel: cfg.dt_rel,
    };
    let mut lo = eps_bp + 1e-4;
    if lo >= 1.0 || !tep_succeeds(dd, lo, cfg)? {
        return Ok(done(eps_bp));
    }
    let mut hi = 1.0 - dd.rate();
    if hi <= lo {
        return Ok(done(lo));
    }
    while hi - lo > 1e-4 {
        let pts: Vec<f64> = (1..=3).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect();
        let ok: Vec<bool> = pts
            .par_iter()
            .map(|&e| tep_succeeds(dd, e, cfg))
            .collect::<Result<_>>()?;
        // the predicate is monotone in ε; keep the last success / first failure
        match ok.iter().position(|&b| !b) {
            Some(0) => hi = pts[0],
            Some(k) => {
                lo = pts[k - 1];
                hi = pts[k];
            }
            None => lo = pts[2],
        }
    }
    Ok(done(lo))
}
