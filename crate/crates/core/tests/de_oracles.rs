mod common;

use common::{bp_threshold_grid, dd36};
use tep_core::bp_run;
use tep_core::channel::{apply_erasures, trial_rng};
use tep_core::de::{self, DeConfig, ResidualDD};
use tep_core::ensemble::{sample_graph, DegreeDistribution};
use tep_core::graph::{ResolutionLedger, TannerGraph};
use tep_core::tep::snapshot;

#[test]
fn bp_threshold_matches_fixed_point_oracle() {
    for (lambda, rho) in [("x^2", "x^5"), ("x^2", "x^3"), ("x", "x^2"), ("0.5x + 0.5x^2", "x^4")] {
        let dd = DegreeDistribution::from_polynomials(lambda, rho).unwrap();
        let fast = de::bp_threshold(&dd);
        let oracle = bp_threshold_grid(&dd, 200_000).min(1.0);
        assert!((fast - oracle).abs() < 1e-5, "{lambda}/{rho}: {fast} vs {oracle}");
    }
}

#[test]
fn stall_residual_matches_large_graph() {
    let n = 1_000_000;
    let eps = 0.45;
    let inst = sample_graph(&dd36(), n, 3).unwrap();
    let mut rng = trial_rng(3, 0);
    let rw = apply_erasures(&vec![0u8; n], eps, 3, &mut rng);
    let mut g = TannerGraph::initialize(&inst.code, &rw).unwrap();
    let mut ledger = ResolutionLedger::from_received(&rw);
    bp_run(&mut g, &mut ledger).unwrap();
    let empirical = snapshot(&g, 0.0, false);

    let theory = de::residual_dd_at_stall(&dd36(), eps, DeConfig::DEFAULT_E_REF).unwrap();
    let l1 = |a: &[f64], b: &[f64]| {
        (0..a.len().max(b.len()))
            .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
            .sum::<f64>()
    };
    let err = l1(&empirical.l, &theory.l) + l1(&empirical.r, &theory.r);
    assert!(err <= 0.02 * 2.0 * theory.e, "L1 {err} vs e {}", theory.e);
    assert!((empirical.e / theory.e - 1.0).abs() < 0.02);
}

#[test]
fn stage_a_left_degree_grows_only_through_merges() {
    let start = de::residual_dd_at_stall(&dd36(), 0.43, DeConfig::DEFAULT_E_REF).unwrap();
    let cfg = DeConfig {
        record_every: 1000,
        ..DeConfig::default()
    };
    let res = de::stage_a_integrate(&start, cfg.step_for(&start), &cfg).unwrap();
    for w in res.trajectory.windows(2) {
        // r₂ falls at exactly two edges per unit time, e likewise
        let dt = w[1].t - w[0].t;
        assert!((w[0].r_at(2) - w[1].r_at(2) - 2.0 * dt).abs() < 1e-12);
        assert!((w[0].e - w[1].e - 2.0 * dt).abs() < 1e-12);
        assert!(w[1].lbar() >= w[0].lbar() - 1e-12);
        // right degrees other than two are untouched
        for m in 3..w[0].r.len() {
            assert_eq!(w[0].r_at(m), w[1].r_at(m));
        }
    }
}

#[test]
fn tep_threshold_brackets_bp_threshold() {
    let t = de::tep_threshold_lower_bound(&dd36(), &DeConfig::default()).unwrap();
    assert!(t.eps_max_a > t.eps_bp);
    assert!(t.eps_max_a < 1.0 - dd36().rate());
    assert!(de::tep_succeeds(&dd36(), t.eps_max_a - 5e-4, &DeConfig::default()).unwrap());
    assert!(!de::tep_succeeds(&dd36(), t.eps_max_a + 5e-4, &DeConfig::default()).unwrap());
    assert!(t.report().contains("eps_maxA="));
}

#[test]
fn fresh_state_peels_to_closed_form_stall() {
    let dd = dd36();
    let traj = de::peeling_trajectory(&ResidualDD::fresh(&dd, 0.45, 1.0), 1e-5, 1e-9);
    let x = traj.last().unwrap().ln_x.exp();
    assert!((x - de::stall_point(&dd, 0.45).unwrap()).abs() < 1e-3, "{x}");
}
