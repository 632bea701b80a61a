//! Asymptotic analysis of peeling and TEP decoding.
//!
//! Degree distributions are tracked from the edge perspective in units of the
//! original edge count `E`: `l[i]` is the number of surviving edges whose
//! variable has degree `i`, divided by `E`; `r[i]` likewise for checks, and
//! `e = Σ l = Σ r`. Time advances by `1/E` per decoder iteration.
//!
//! * [`bp_curve`]: the closed-form peeling curve `r₁(x)`, the BP threshold, the
//!   stall point and the residual ensemble at the stall, plus the numerical
//!   peeling ODE used to check whether BP completes from an arbitrary state.
//! * [`stage`]: explicit Euler integration of the Stage A (pairs never share a
//!   second check) and Stage B (pairs always share one) ODE systems.
//! * [`threshold`]: bisection for the largest erasure probability at which
//!   Stage A reaches `p_B = 1` and BP then completes.

pub mod bp_curve;
pub mod stage;
pub mod threshold;

pub use bp_curve::{
    bp_positivity_check, bp_threshold, peeling_trajectory, r1_analytic, residual_dd_at_stall, stall_point,
    PeelingPoint,
};
pub use stage::{
    merge_left_derivative, p_shared_check, stage_a_integrate, stage_b_integrate, EndReason, StageResult,
};
pub use threshold::{tep_succeeds, tep_threshold_lower_bound, TepThreshold};

use crate::ensemble::DegreeDistribution;
use crate::trace::TrajectoryRow;

/// Settings shared by the integrators.
#[derive(Clone, Debug, PartialEq)]
pub struct DeConfig {
    /// Reference edge count in the `1/E` finite-size term of `p_B`.
    pub e_ref: f64,
    /// Euler step as a fraction of `r₂` at the BP stall.
    pub dt_rel: f64,
    /// Degrees above this are pooled into a single tail bucket.
    pub d_max: usize,
    /// Keep every `record_every`-th state in the trajectory (0 disables).
    pub record_every: usize,
}

impl DeConfig {
    /// Settings used for the reported `(3,6)` Stage A threshold.
    pub const DEFAULT_E_REF: f64 = 150.0;
    pub const DEFAULT_DT_REL: f64 = 1e-5;
    pub const DEFAULT_D_MAX: usize = 1 << 14;
}

impl DeConfig {
    /// Absolute Euler step for an integration started at `start`.
    pub fn step_for(&self, start: &ResidualDD) -> f64 {
        self.dt_rel * start.r_at(2)
    }
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            e_ref: Self::DEFAULT_E_REF,
            dt_rel: Self::DEFAULT_DT_REL,
            d_max: Self::DEFAULT_D_MAX,
            record_every: 0,
        }
    }
}

/// Edge-degree fractions of a residual graph at scaled time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualDD {
    /// `l[i]` for `i <= d_max`; index 0 is always zero.
    pub l: Vec<f64>,
    /// Edge mass of all degrees above `d_max`.
    pub tail_mass: f64,
    /// Mass-weighted mean degree of the tail bucket.
    pub tail_degree: f64,
    /// `r[i]`, index 0 unused.
    pub r: Vec<f64>,
    pub e: f64,
    pub t: f64,
    pub e_ref: f64,
    /// Left support bound; follows `cap ← 2·cap − 2` per merge step up to `d_max`.
    pub l_cap: usize,
}

impl ResidualDD {
    /// Erased fraction `ε` of a fresh ensemble, before any peeling.
    pub fn fresh(dd: &DegreeDistribution, eps: f64, e_ref: f64) -> Self {
        let mut l = vec![0.0; dd.max_left_degree() + 1];
        for (i, c) in dd.lambda_terms() {
            l[i] = eps * c;
        }
        let r = thinned_right(dd, eps);
        Self {
            l_cap: dd.max_left_degree(),
            e: l.iter().sum(),
            l,
            tail_mass: 0.0,
            tail_degree: 0.0,
            r,
            t: 0.0,
            e_ref,
        }
    }

    pub fn left_mass(&self) -> f64 {
        self.l.iter().sum::<f64>() + self.tail_mass
    }

    pub fn right_mass(&self) -> f64 {
        self.r.iter().sum()
    }

    /// Σ i·l_i including the tail.
    pub fn left_moment(&self) -> f64 {
        self.l
            .iter()
            .enumerate()
            .map(|(i, &x)| i as f64 * x)
            .sum::<f64>()
            + self.tail_mass * self.tail_degree
    }

    /// Average edge left degree `Σ i·l_i / e`.
    pub fn lbar(&self) -> f64 {
        self.left_moment() / self.e
    }

    pub fn r_at(&self, i: usize) -> f64 {
        self.r.get(i).copied().unwrap_or(0.0)
    }

    pub fn l_at(&self, i: usize) -> f64 {
        self.l.get(i).copied().unwrap_or(0.0)
    }

    /// Row for the trajectory CSV; the tail bucket is reported at its mean degree.
    pub fn to_row(&self, shared: f64) -> TrajectoryRow {
        let mut l = self.l.clone();
        if self.tail_mass > 0.0 {
            let d = self.tail_degree.round() as usize;
            if l.len() <= d {
                l.resize(d + 1, 0.0);
            }
            l[d] += self.tail_mass;
        }
        TrajectoryRow {
            t: self.t,
            e: self.e,
            l,
            r: self.r.clone(),
            shared,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Right edge fractions when every check edge independently survives with
/// probability `y`: `r_j = Σ_k ρ_k C(k-1, j-1) y^j (1-y)^(k-j)`.
pub(crate) fn thinned_right(dd: &DegreeDistribution, y: f64) -> Vec<f64> {
    let mut r = vec![0.0; dd.max_right_degree() + 1];
    for (k, rho) in dd.rho_terms() {
        for (j, slot) in r.iter_mut().enumerate().take(k + 1).skip(1) {
            *slot += rho * binomial(k - 1, j - 1) * y.powi(j as i32) * (1.0 - y).powi((k - j) as i32);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_state_masses_agree() {
        let dd = DegreeDistribution::from_polynomials("0.4x + 0.6x^3", "0.5x^4 + 0.5x^6").unwrap();
        let s = ResidualDD::fresh(&dd, 0.37, 1e4);
        assert!((s.left_mass() - 0.37).abs() < 1e-14);
        assert!((s.right_mass() - 0.37).abs() < 1e-14);
        // r1 at x = 1 is ε·ρ(1-ε)
        assert!((s.r_at(1) - 0.37 * dd.rho_poly(0.63)).abs() < 1e-14);
    }

    #[test]
    fn lbar_of_regular() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        let s = ResidualDD::fresh(&dd, 0.5, 1.0);
        assert!((s.lbar() - 3.0).abs() < 1e-15);
    }
}
