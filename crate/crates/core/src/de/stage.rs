//! Stage A / Stage B integration.
//!
//! Both stages merge the two variables of a degree-two check. A merged pair
//! of degrees `j` and `k` becomes one variable of degree `j + k − 2` (Stage A:
//! no other check in common) or `j + k − 4` (Stage B: exactly one other check
//! in common, which loses two edges). Left side, per unit time:
//!
//! `dl_i/dt = −2 i l_i/e + i Σ_{j+k=i+s} l_j l_k / e²`, `s ∈ {2, 4}`.
//!
//! Stage A removes one degree-two check (`dr₂/dt = de/dt = −2`). In Stage B
//! the shared check has degree `m` with probability `r_m / Σ_{m'≥2} r_{m'}`
//! and drops to `m − 2`, so `de/dt = −4`.

use std::cell::RefCell;

use realfft::RealFftPlanner;

use super::{DeConfig, ResidualDD};
use crate::error::{Error, Result};

/// Entries below this are dropped from the top of the left support; it sits
/// above the round-off floor of the FFT convolution.
const NEGLIGIBLE: f64 = 1e-16;
/// Supports shorter than this are convolved directly.
const DIRECT_MAX: usize = 128;

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

/// `c[s] = Σ_{j+k=s} l_j l_k`.
fn self_convolve(l: &[f64]) -> Vec<f64> {
    let len = l.len();
    let mut conv = vec![0.0; (2 * len).saturating_sub(1)];
    if len < DIRECT_MAX {
        for (j, &lj) in l.iter().enumerate() {
            if lj == 0.0 {
                continue;
            }
            conv[2 * j] += lj * lj;
            let twice = 2.0 * lj;
            for (k, &lk) in l.iter().enumerate().skip(j + 1) {
                conv[j + k] += twice * lk;
            }
        }
        return conv;
    }
    let n = conv.len().next_power_of_two();
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });
    let mut buf = vec![0.0; n];
    buf[..len].copy_from_slice(l);
    let mut freq = fwd.make_output_vec();
    fwd.process(&mut buf, &mut freq).expect("fft length");
    for z in freq.iter_mut() {
        *z = *z * *z;
    }
    inv.process(&mut freq, &mut buf).expect("fft length");
    let total: f64 = l.iter().sum();
    let floor = 1e-15 * total * total;
    let scale = 1.0 / n as f64;
    for (c, &b) in conv.iter_mut().zip(&buf) {
        let v = b * scale;
        *c = if v.abs() < floor { 0.0 } else { v };
    }
    conv
}
/// Tolerated negative overshoot before it is treated as a step-size failure.
const NEG_TOL: f64 = -1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndReason {
    /// The shared-check probability reached one.
    PbReachedOne,
    /// No degree-two checks remain.
    RanOutOfDegree2,
    /// The residual graph vanished.
    EdgesExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageResult {
    pub end_time: f64,
    pub end_reason: EndReason,
    /// Sampled states (empty unless `record_every > 0`), including start and end.
    pub trajectory: Vec<ResidualDD>,
    pub final_state: ResidualDD,
    pub steps: usize,
    /// Largest `p_B` seen (before clamping to one).
    pub max_p_b: f64,
}

/// `l̄² Σ_{m≥2} r_m / (e · E_ref)`, the chance that a merge hits a shared check, unclamped.
pub fn p_shared_raw(s: &ResidualDD) -> f64 {
    if s.e <= 0.0 {
        return 0.0;
    }
    let lbar = s.lbar();
    let r_ge2: f64 = s.r.iter().skip(2).sum();
    lbar * lbar * r_ge2 / (s.e * s.e_ref)
}

/// [`p_shared_raw`] clamped to `[0, 1]`.
pub fn p_shared_check(s: &ResidualDD) -> f64 {
    p_shared_raw(s).clamp(0.0, 1.0)
}

/// Left-side time derivative of a merge step with degree loss `shift`.
/// Returns `(dl, d tail mass, d tail moment)`; `dl` may be longer than `l`.
pub fn merge_left_derivative(
    l: &[f64],
    tail_mass: f64,
    tail_degree: f64,
    e: f64,
    shift: usize,
    d_max: usize,
) -> (Vec<f64>, f64, f64) {
    let len = l.len();
    let conv = self_convolve(l);
    let top = conv.len().saturating_sub(shift + 1).min(d_max);
    let mut dl = vec![0.0; top.max(len - 1) + 1];
    let e2 = e * e;
    let (mut dt_mass, mut dt_moment) = (0.0, 0.0);
    for (s, &c) in conv.iter().enumerate() {
        if s <= shift || c == 0.0 {
            continue;
        }
        let i = s - shift;
        let g = i as f64 * c / e2;
        if i <= d_max {
            dl[i] += g;
        } else {
            dt_mass += g;
            dt_moment += i as f64 * g;
        }
    }
    for (i, &v) in l.iter().enumerate() {
        dl[i] -= 2.0 * i as f64 * v / e;
    }
    if tail_mass > 0.0 {
        let p_tail = tail_mass / e;
        dt_mass -= 2.0 * tail_degree * p_tail;
        dt_moment -= 2.0 * tail_degree * tail_degree * p_tail;
        // pairs involving the tail stay in the tail
        let mut pair = |deg: f64, p: f64| {
            if deg > 0.0 {
                dt_mass += p * deg;
                dt_moment += p * deg * deg;
            }
        };
        for (k, &v) in l.iter().enumerate() {
            pair(tail_degree + k as f64 - shift as f64, 2.0 * p_tail * v / e);
        }
        pair(2.0 * tail_degree - shift as f64, p_tail * p_tail);
    }
    (dl, dt_mass, dt_moment)
}

fn step_left(s: &mut ResidualDD, h: f64, shift: usize, d_max: usize) -> Result<()> {
    let (dl, d_mass, d_moment) = merge_left_derivative(&s.l, s.tail_mass, s.tail_degree, s.e, shift, d_max);
    if s.l.len() < dl.len() {
        s.l.resize(dl.len(), 0.0);
    }
    for (i, (v, d)) in s.l.iter_mut().zip(&dl).enumerate() {
        *v += h * d;
        if *v < 0.0 {
            if *v < NEG_TOL {
                return Err(Error::StepSize {
                    t: s.t,
                    what: format!("l_{i} = {v:e}"),
                });
            }
            *v = 0.0;
        }
    }
    if s.tail_mass > 0.0 || d_mass > 0.0 {
        let moment = s.tail_mass * s.tail_degree + h * d_moment;
        s.tail_mass = (s.tail_mass + h * d_mass).max(0.0);
        s.tail_degree = if s.tail_mass > 0.0 { moment / s.tail_mass } else { 0.0 };
    }
    let keep = s.l.iter().rposition(|&v| v >= NEGLIGIBLE).map_or(1, |p| p + 1);
    s.l.truncate(keep.max(2));
    s.l_cap = (2 * s.l_cap).saturating_sub(shift).max(s.l_cap).min(d_max);
    Ok(())
}

fn check_right(s: &mut ResidualDD) -> Result<()> {
    for (i, v) in s.r.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v < NEG_TOL {
                return Err(Error::StepSize {
                    t: s.t,
                    what: format!("r_{i} = {v:e}"),
                });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

fn prepare(initial: &ResidualDD, dt: f64, cfg: &DeConfig) -> Result<ResidualDD> {
    let mut s = initial.clone();
    if s.r.len() < 5 {
        s.r.resize(5, 0.0);
    }
    s.e_ref = cfg.e_ref;
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {dt}")));
    }
    if !(s.r[2] > 0.0) || !(s.e > 0.0) {
        return Err(Error::Degenerate(format!(
            "no degree-two checks to merge (r2 = {}, e = {})",
            s.r[2], s.e
        )));
    }
    Ok(s)
}

struct Recorder {
    every: usize,
    out: Vec<ResidualDD>,
}

impl Recorder {
    fn push(&mut self, steps: usize, s: &ResidualDD) {
        if self.every > 0 && steps % self.every == 0 {
            self.out.push(s.clone());
        }
    }

    fn finish(mut self, steps: usize, s: &ResidualDD) -> Vec<ResidualDD> {
        if self.every > 0 && steps % self.every != 0 {
            self.out.push(s.clone());
        }
        self.out
    }
}

/// Integrates Stage A from `initial` with Euler step `dt` until `p_B` reaches
/// one or `r₂` runs out; the last step lands exactly on `r₂ = 0`.
pub fn stage_a_integrate(initial: &ResidualDD, dt: f64, cfg: &DeConfig) -> Result<StageResult> {
    let mut s = prepare(initial, dt, cfg)?;
    let mut rec = Recorder {
        every: cfg.record_every,
        out: Vec::new(),
    };
    let mut steps = 0;
    let mut max_p_b = 0.0f64;
    let reason = loop {
        rec.push(steps, &s);
        let pb = p_shared_raw(&s);
        max_p_b = max_p_b.max(pb);
        if pb >= 1.0 {
            break EndReason::PbReachedOne;
        }
        if s.r[2] <= 0.0 {
            break EndReason::RanOutOfDegree2;
        }
        if s.e <= 0.0 {
            break EndReason::EdgesExhausted;
        }
        let landing = 2.0 * dt >= s.r[2];
        let h = if landing { 0.5 * s.r[2] } else { dt };
        step_left(&mut s, h, 2, cfg.d_max)?;
        s.r[2] = if landing { 0.0 } else { s.r[2] - 2.0 * h };
        s.e -= 2.0 * h;
        s.t += h;
        steps += 1;
    };
    Ok(StageResult {
        end_time: s.t,
        end_reason: reason,
        trajectory: rec.finish(steps, &s),
        final_state: s,
        steps,
        max_p_b,
    })
}

/// Right-side derivative of a Stage B step.
pub fn stage_b_right_derivative(r: &[f64]) -> Vec<f64> {
    let mut dr = vec![0.0; r.len()];
    let shared: f64 = r.iter().skip(2).sum();
    if shared <= 0.0 {
        return dr;
    }
    let at = |m: usize| r.get(m).copied().unwrap_or(0.0);
    dr[1] = at(3) / shared;
    for (m, d) in dr.iter_mut().enumerate().skip(2) {
        *d = m as f64 * (at(m + 2) - at(m)) / shared;
    }
    dr[2] -= 2.0;
    dr
}

/// Integrates Stage B from `initial` (normally the end of Stage A) until no
/// degree-two checks remain.
pub fn stage_b_integrate(initial: &ResidualDD, dt: f64, cfg: &DeConfig) -> Result<StageResult> {
    let mut s = prepare(initial, dt, cfg)?;
    let mut rec = Recorder {
        every: cfg.record_every,
        out: Vec::new(),
    };
    let mut steps = 0;
    let mut max_p_b = 0.0f64;
    let reason = loop {
        rec.push(steps, &s);
        max_p_b = max_p_b.max(p_shared_raw(&s));
        if s.r[2] <= 0.0 {
            break EndReason::RanOutOfDegree2;
        }
        if s.e <= 0.0 {
            break EndReason::EdgesExhausted;
        }
        let dr = stage_b_right_derivative(&s.r);
        let mut h = dt;
        let mut landing = false;
        if dr[2] < 0.0 && s.r[2] + h * dr[2] <= 0.0 {
            h = s.r[2] / -dr[2];
            landing = true;
        }
        step_left(&mut s, h, 4, cfg.d_max)?;
        for (v, d) in s.r.iter_mut().zip(&dr) {
            *v += h * d;
        }
        if landing {
            s.r[2] = 0.0;
        }
        check_right(&mut s)?;
        s.e -= 4.0 * h;
        s.t += h;
        steps += 1;
    };
    Ok(StageResult {
        end_time: s.t,
        end_reason: reason,
        trajectory: rec.finish(steps, &s),
        final_state: s,
        steps,
        max_p_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::de::residual_dd_at_stall;
    use crate::ensemble::DegreeDistribution;

    fn start(eps: f64) -> ResidualDD {
        residual_dd_at_stall(&DegreeDistribution::regular(3, 6).unwrap(), eps, 150.0).unwrap()
    }

    #[test]
    fn p_b_example() {
        // l̄ = 2, e = 0.1, Σ_{m≥2} r_m = 0.1, E_ref = 1000
        let s = ResidualDD {
            l: vec![0.0, 0.0, 0.1],
            tail_mass: 0.0,
            tail_degree: 0.0,
            r: vec![0.0, 0.0, 0.1],
            e: 0.1,
            t: 0.0,
            e_ref: 1000.0,
            l_cap: 2,
        };
        assert!((p_shared_check(&s) - 4e-3).abs() < 1e-15);
    }

    #[test]
    fn derivative_conserves_mass() {
        let l = [0.0, 0.0, 0.05, 0.1, 0.02, 0.0, 0.03];
        let e: f64 = l.iter().sum();
        let (dl, _, _) = merge_left_derivative(&l, 0.0, 0.0, e, 2, 100);
        assert!((dl.iter().sum::<f64>() + 2.0).abs() < 1e-12);
        // Stage B loses four edges per merge
        let (dl, _, _) = merge_left_derivative(&l, 0.0, 0.0, e, 4, 100);
        assert!((dl.iter().sum::<f64>() + 4.0).abs() < 1e-12);
        let r = [0.0, 0.0, 0.2, 0.1, 0.05, 0.01];
        assert!((stage_b_right_derivative(&r).iter().sum::<f64>() + 4.0).abs() < 1e-12);
    }

    #[test]
    fn fft_matches_direct() {
        let l: Vec<f64> = (0..300).map(|i| if i < 2 { 0.0 } else { 0.3 * 0.98f64.powi(i) / 40.0 }).collect();
        let fast = self_convolve(&l);
        for (s, &c) in fast.iter().enumerate() {
            let direct: f64 = (0..=s).filter(|&j| j < l.len() && s - j < l.len()).map(|j| l[j] * l[s - j]).sum();
            assert!((c - direct).abs() < 1e-15, "{s}");
        }
    }

    #[test]
    fn tail_bucket_conserves_mass() {
        let l = [0.0, 0.0, 0.05, 0.1, 0.02, 0.0, 0.03];
        let e = l.iter().sum::<f64>() + 0.01;
        let (dl, dm, _) = merge_left_derivative(&l, 0.01, 8.0, e, 2, 6);
        assert!((dl.iter().sum::<f64>() + dm + 2.0).abs() < 1e-12);
    }

    #[test]
    fn stage_a_conserves_and_grows_degree() {
        let cfg = DeConfig {
            record_every: 500,
            ..DeConfig::default()
        };
        let s0 = start(0.45);
        let res = stage_a_integrate(&s0, cfg.step_for(&s0), &cfg).unwrap();
        let mut last = 0.0;
        for s in &res.trajectory {
            assert!((s.left_mass() - s.e).abs() < 1e-8);
            assert!((s.right_mass() - s.e).abs() < 1e-8);
            let pb = p_shared_check(s);
            assert!(pb + 1e-15 >= last);
            last = pb;
        }
        assert!(res.final_state.lbar() > 3.0);
    }

    #[test]
    fn stage_b_drains_degree_two() {
        let cfg = DeConfig::default();
        let s0 = start(0.4305);
        let dt = cfg.step_for(&s0);
        let a = stage_a_integrate(&s0, dt, &cfg).unwrap();
        assert_eq!(a.end_reason, EndReason::PbReachedOne);
        let b = stage_b_integrate(&a.final_state, dt, &cfg).unwrap();
        assert_eq!(b.end_reason, EndReason::RanOutOfDegree2);
        let f = &b.final_state;
        assert_eq!(f.r[2], 0.0);
        assert!((f.left_mass() - f.e).abs() < 1e-8, "{} {} {} {}", f.left_mass(), f.right_mass(), f.e, f.tail_mass);
        assert!((f.right_mass() - f.e).abs() < 1e-8);
    }
}
