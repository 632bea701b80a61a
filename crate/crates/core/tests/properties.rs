mod common;

use proptest::prelude::*;
use rand::Rng;

use common::{random_transmission, small_instance};
use tep_core::channel::{trial_rng, ReceivedWord};
use tep_core::ensemble::Encoder;
use tep_core::graph::{ResolutionLedger, TannerGraph};
use tep_core::harness::{ml_oracle_decode, paired_trial, Decoder};
use tep_core::{bp_run, tep_run, Schedule};

fn erase(word: &[u8], mask: &[bool]) -> ReceivedWord {
    ReceivedWord {
        values: word.iter().zip(mask).map(|(&b, &e)| (!e).then_some(b)).collect(),
        epsilon: 0.5,
        seed: 0,
    }
}

fn mask(n: usize, eps: f64, seed: u64) -> Vec<bool> {
    let mut rng = trial_rng(seed, 99);
    (0..n).map(|_| rng.gen::<f64>() < eps).collect()
}

fn bp_residual(code: &tep_core::CodeGraph, rw: &ReceivedWord) -> Vec<usize> {
    let mut g = TannerGraph::initialize(code, rw).unwrap();
    let mut ledger = ResolutionLedger::from_received(rw);
    bp_run(&mut g, &mut ledger).unwrap();
    g.alive_var_indices().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bp_is_monotone_in_erasures(seed in 0u64..10_000, eps in 0.2f64..0.6, extra in 0.0f64..0.3) {
        let inst = small_instance(60, seed);
        let zero = vec![0u8; 60];
        let a = mask(60, eps, seed);
        let b: Vec<bool> = {
            let mut rng = trial_rng(seed, 7);
            a.iter().map(|&x| x || rng.gen::<f64>() < extra).collect()
        };
        let fail_a = !bp_residual(&inst.code, &erase(&zero, &a)).is_empty();
        let fail_b = !bp_residual(&inst.code, &erase(&zero, &b)).is_empty();
        prop_assert!(!fail_a || fail_b);
    }

    #[test]
    fn peeling_order_does_not_matter(seed in 0u64..10_000, eps in 0.2f64..0.6) {
        let inst = small_instance(48, seed);
        let rw = erase(&vec![0u8; 48], &mask(48, eps, seed));
        let fifo = bp_residual(&inst.code, &rw);

        // highest-index degree-one check first
        let mut g = TannerGraph::initialize(&inst.code, &rw).unwrap();
        let mut ledger = ResolutionLedger::from_received(&rw);
        loop {
            let next = (0..g.num_checks()).rev().find(|&c| g.is_check_alive(c) && g.check_degree(c) == 1);
            match next {
                Some(c) => { g.peel_check(c, &mut ledger).unwrap(); }
                None => break,
            }
        }
        let other: Vec<usize> = g.alive_var_indices().collect();
        prop_assert_eq!(fifo, other);
    }

    #[test]
    fn ghost_parity_and_structure(seed in 0u64..10_000, eps in 0.3f64..0.7, choices in prop::collection::vec(any::<bool>(), 64)) {
        let inst = small_instance(40, seed);
        let rw = erase(&vec![0u8; 40], &mask(40, eps, seed));
        let mut g = TannerGraph::initialize(&inst.code, &rw).unwrap();
        let mut ledger = ResolutionLedger::from_received(&rw);
        let max_dc = 6u64;
        for &prefer_merge in &choices {
            let (vars, checks, touches) = (g.alive_vars(), g.alive_checks(), g.counters().touches);
            let d2 = g.peek_degree2();
            let d1 = g.peek_degree1();
            let step = match (prefer_merge, d1, d2) {
                (true, _, Some(c)) | (false, None, Some(c)) => {
                    let (a, b) = (g.check_neighbors(c)[0] as usize, g.check_neighbors(c)[1] as usize);
                    let budget = 2 * (g.var_degree(a) + g.var_degree(b)) as u64 * (1 + max_dc);
                    g.merge_variables(c, &mut ledger).unwrap();
                    prop_assert!(g.counters().touches - touches <= budget);
                    true
                }
                (_, Some(_), _) => { g.remove_degree1_check(&mut ledger).unwrap(); true }
                _ => false,
            };
            if !step { break; }
            prop_assert_eq!(g.alive_vars(), vars - 1);
            prop_assert!(g.alive_checks() < checks);
            prop_assert!(g.audit().is_ok(), "{:?}", g.audit());
            // all-zero truth: every alive check must carry parity 0
            for c in g.alive_check_indices() {
                prop_assert_eq!(g.check_parity(c), 0);
            }
        }
    }

    #[test]
    fn decoders_are_sound_and_ordered(seed in 0u64..10_000, eps in 0.25f64..0.6) {
        let inst = small_instance(64, seed);
        let enc = Encoder::new(&inst.code);
        let (cw, rw) = random_transmission(&inst, &enc, eps, seed, 1);
        let out = paired_trial(&inst.code, &rw, &[Decoder::Bp, Decoder::Tep, Decoder::Ml]).unwrap();
        let (bp, tep, ml) = (out.bp.unwrap(), out.tep.unwrap(), out.ml.unwrap());
        prop_assert!(!bp || tep);
        prop_assert!(!tep || ml);
        if tep {
            prop_assert_eq!(out.tep_word.as_ref().unwrap(), &cw);
        }
        let ml_out = ml_oracle_decode(&inst.code, &rw).unwrap();
        if ml {
            prop_assert_eq!(ml_out.word().unwrap(), cw.clone());
        }
        // partial outputs never contradict the transmitted word
        for sched in [Schedule::Practical, Schedule::Analysis] {
            let mut g = TannerGraph::initialize(&inst.code, &rw).unwrap();
            let mut ledger = ResolutionLedger::from_received(&rw);
            let o = tep_run(&mut g, &mut ledger, sched).unwrap();
            prop_assert_eq!(o.is_success(), tep);
            for (b, &s) in o.assignment.iter().zip(&cw) {
                prop_assert!(b.is_none_or(|b| b == s));
            }
            prop_assert!(o.iterations <= rw.erasures());
            if let Some(w) = o.word() {
                prop_assert!(inst.code.is_codeword(&w));
            }
        }
    }
}

#[test]
fn bp_succeeds_well_below_threshold() {
    let inst = small_instance(1024, 5);
    let zero = vec![0u8; 1024];
    let mut ok = 0;
    for t in 0..1000 {
        let rw = erase(&zero, &mask(1024, 0.35, 1000 + t));
        ok += bp_residual(&inst.code, &rw).is_empty() as usize;
    }
    assert!(ok >= 980, "{ok}/1000");
}

#[test]
fn tep_improves_on_bp_above_threshold() {
    let mut strict = 0;
    for g in 0..20 {
        let inst = small_instance(512, 300 + g);
        for t in 0..50 {
            let rw = erase(&vec![0u8; 512], &mask(512, 0.44, g * 1000 + t));
            let out = paired_trial(&inst.code, &rw, &[Decoder::Bp, Decoder::Tep]).unwrap();
            assert!(!out.bp.unwrap() || out.tep.unwrap());
            strict += (out.tep.unwrap() && !out.bp.unwrap()) as usize;
        }
    }
    assert!(strict > 0);
}
