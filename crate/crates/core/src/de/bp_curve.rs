//! Peeling-decoder asymptotics.

use super::{thinned_right, ResidualDD};
use crate::ensemble::DegreeDistribution;
use crate::error::{Error, Result};

const GRID: usize = 10_000;

/// Degree-one check fraction along the peeling trajectory,
/// `r₁(x) = ε λ(x) [x − 1 + ρ(1 − ε λ(x))]`.
pub fn r1_analytic(dd: &DegreeDistribution, eps: f64, x: f64) -> f64 {
    eps * dd.lambda_poly(x) * gap(dd, eps, x)
}

fn gap(dd: &DegreeDistribution, eps: f64, x: f64) -> f64 {
    x - 1.0 + dd.rho_poly(1.0 - eps * dd.lambda_poly(x))
}

/// `gap(x)/x`: same sign as `r₁` on `(0, 1]` and well scaled near zero.
fn scaled_gap(dd: &DegreeDistribution, eps: f64, x: f64) -> f64 {
    gap(dd, eps, x) / x
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Minimum of the scaled gap over `(0, 1]`: grid search then golden-section refinement.
fn min_gap(dd: &DegreeDistribution, eps: f64) -> (f64, f64) {
    let f = |x: f64| scaled_gap(dd, eps, x);
    let mut best = (1, f64::INFINITY);
    for k in 1..=GRID {
        let v = f(k as f64 / GRID as f64);
        if v < best.1 {
            best = (k, v);
        }
    }
    let h = 1.0 / GRID as f64;
    let lo = (best.0 as f64 - 1.0) * h;
    let hi = ((best.0 + 1) as f64 * h).min(1.0);
    let refined = golden_min(f, lo.max(1e-12), hi);
    if refined.1 < best.1 {
        refined
    } else {
        (best.0 as f64 * h, best.1)
    }
}

/// Largest `ε` for which `r₁(x) > 0` on all of `(0, 1]`.
pub fn bp_threshold(dd: &DegreeDistribution) -> f64 {
    let positive = |eps: f64| min_gap(dd, eps).1 > 0.0;
    if positive(1.0) {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn bisect_root(f: impl Fn(f64) -> f64, mut neg: f64, mut pos: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (neg + pos);
        if f(mid) <= 0.0 {
            neg = mid;
        } else {
            pos = mid;
        }
        if (pos - neg).abs() < 1e-15 {
            break;
        }
    }
    neg
}

/// Largest `x ∈ (0, 1)` with `r₁(x) = 0`: where peeling halts.
pub fn stall_point(dd: &DegreeDistribution, eps: f64) -> Result<f64> {
    let f = |x: f64| scaled_gap(dd, eps, x);
    let h = 1.0 / GRID as f64;
    let mut above = 1.0;
    let mut k = GRID;
    while k >= 1 {
        let x = k as f64 * h;
        if f(x) <= 0.0 {
            return Ok(if x >= 1.0 { x } else { bisect_root(f, x, above) });
        }
        above = x;
        k -= 1;
    }
    // a dip narrower than the grid spacing
    let (xm, vm) = min_gap(dd, eps);
    if vm <= 0.0 {
        let up = ((xm / h).floor() + 1.0) * h;
        return Ok(bisect_root(f, xm, up.min(1.0)));
    }
    Err(Error::NoStall {
        eps,
        threshold: bp_threshold(dd),
    })
}

/// Residual edge fractions when peeling stalls at `eps > ε_BP`.
pub fn residual_dd_at_stall(dd: &DegreeDistribution, eps: f64, e_ref: f64) -> Result<ResidualDD> {
    let x = stall_point(dd, eps)?;
    let y = eps * dd.lambda_poly(x);
    let mut l = vec![0.0; dd.max_left_degree() + 1];
    for (i, c) in dd.lambda_terms() {
        l[i] = eps * c * x.powi(i as i32);
    }
    let e: f64 = l.iter().sum();
    let mut r = thinned_right(dd, y);
    if r.len() < 3 {
        r.resize(3, 0.0);
    }
    r[1] = 0.0;
    // binomial thinning already sums to e up to the (vanishing) r₁ term; absorb rounding
    let s: f64 = r.iter().sum();
    if s > 0.0 {
        for v in r.iter_mut() {
            *v *= e / s;
        }
    }
    Ok(ResidualDD {
        l_cap: dd.max_left_degree(),
        l,
        tail_mass: 0.0,
        tail_degree: 0.0,
        r,
        e,
        t: 0.0,
        e_ref,
    })
}

/// A sample of the numerical peeling trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeelingPoint {
    /// `ln x`, where `l_i ∝ x^i` along the trajectory.
    pub ln_x: f64,
    pub e: f64,
    pub r1: f64,
}

/// Integrates the peeling ODE
///
/// `dl_i/dt = −i l_i/e`,
/// `dr_j/dt = (ā − 1) j (r_{j+1} − r_j)/e` for `j ≥ 2`,
/// `dr₁/dt = (ā − 1)(r₂ − r₁)/e − 1`
///
/// from `state` with relative step `h` (each step removes a fraction `h` of
/// the remaining edges), until `r₁` hits zero or `e` falls below `e_stop`.
pub fn peeling_trajectory(state: &ResidualDD, h: f64, e_stop: f64) -> Vec<PeelingPoint> {
    let mut l = state.l.clone();
    let (mut tail, tail_deg) = (state.tail_mass, state.tail_degree);
    let mut r = state.r.clone();
    if r.len() < 3 {
        r.resize(3, 0.0);
    }
    let mut e = state.e;
    let mut ln_x = 0.0;
    let mut out = vec![PeelingPoint { ln_x, e, r1: r[1] }];
    let mut dr = vec![0.0; r.len()];
    while e > e_stop && r[1] > 0.0 {
        let moment: f64 = l.iter().enumerate().map(|(i, &v)| i as f64 * v).sum::<f64>() + tail * tail_deg;
        let a = moment / e;
        let dt = h * e / a;
        let k = (a - 1.0) / e;
        let last = r.len() - 1;
        for j in 2..=last {
            let up = if j < last { r[j + 1] } else { 0.0 };
            dr[j] = k * j as f64 * (up - r[j]);
        }
        dr[1] = k * (r[2] - r[1]) - 1.0;
        for j in 1..=last {
            r[j] += dt * dr[j];
        }
        for r_j in r.iter_mut().skip(2) {
            *r_j = r_j.max(0.0);
        }
        for (i, v) in l.iter_mut().enumerate() {
            *v -= dt * i as f64 * *v / e;
        }
        // high degrees decay like x^i; drop them before they go subnormal
        while l.len() > 1 && l[l.len() - 1] < 1e-250 {
            l.pop();
        }
        tail -= dt * tail_deg * tail / e;
        ln_x -= dt / e;
        e -= a * dt;
        out.push(PeelingPoint { ln_x, e, r1: r[1] });
    }
    out
}

/// Whether peeling started from `state` runs to completion (`r₁ > 0` until
/// the residual vanishes).
pub fn bp_positivity_check(state: &ResidualDD) -> bool {
    if state.e <= 0.0 {
        return true;
    }
    let traj = peeling_trajectory(state, 1e-4, 1e-7 * state.e);
    traj.last().map(|p| p.r1 > 0.0).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd36() -> DegreeDistribution {
        DegreeDistribution::regular(3, 6).unwrap()
    }

    #[test]
    fn r1_value_at_one() {
        // 0.4 · (1 − 1 + 0.6⁵)
        assert!((r1_analytic(&dd36(), 0.4, 1.0) - 0.031104).abs() < 1e-12);
    }

    #[test]
    fn threshold_of_36() {
        let t = bp_threshold(&dd36());
        assert!((t - 0.4294).abs() < 1e-4, "{t}");
    }

    #[test]
    fn stall_below_threshold_fails() {
        assert!(matches!(stall_point(&dd36(), 0.40), Err(Error::NoStall { .. })));
    }

    #[test]
    fn stall_is_a_root() {
        let dd = dd36();
        let x = stall_point(&dd, 0.45).unwrap();
        assert!(x > 0.5 && x < 1.0);
        assert!(r1_analytic(&dd, 0.45, x).abs() < 1e-12);
        assert!(r1_analytic(&dd, 0.45, (x + 1e-4).min(1.0)) > 0.0);
    }

    #[test]
    fn residual_masses_balance() {
        let s = residual_dd_at_stall(&dd36(), 0.45, 150.0).unwrap();
        assert!((s.left_mass() - s.right_mass()).abs() < 1e-14);
        assert_eq!(s.r_at(1), 0.0);
    }

    #[test]
    fn peeling_ode_tracks_closed_form() {
        let dd = dd36();
        let traj = peeling_trajectory(&ResidualDD::fresh(&dd, 0.40, 1.0), 1e-4, 1e-6);
        let worst = traj
            .iter()
            .map(|p| (p.r1 - r1_analytic(&dd, 0.40, p.ln_x.exp())).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
        assert!(bp_positivity_check(&ResidualDD::fresh(&dd, 0.40, 1.0)));
        assert!(!bp_positivity_check(&ResidualDD::fresh(&dd, 0.45, 1.0)));
    }
}
