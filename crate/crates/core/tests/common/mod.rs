//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use tep_core::channel::{apply_erasures, trial_rng, ReceivedWord};
use tep_core::ensemble::{sample_graph, DegreeDistribution, EnsembleInstance, Encoder};
use rand::Rng;

pub fn dd36() -> DegreeDistribution {
    DegreeDistribution::regular(3, 6).unwrap()
}

/// Left-degree derivative written case by case for `i ≥ 3`:
/// `−i(p₁ + 2p₂ − p₃)` with `p₁ = 2 q_i (1 − q_i − q₂)`, `p₂ = q_i²`,
/// `p₃ = Σ_{j,k≥3, j+k=i+2} q_j q_k`, `q = l/e`. Entries 0..=2 are NaN.
pub fn case_form_derivative(l: &[f64], e: f64, out_len: usize) -> Vec<f64> {
    let q = |i: usize| l.get(i).copied().unwrap_or(0.0) / e;
    (0..out_len)
        .map(|i| {
            if i < 3 {
                return f64::NAN;
            }
            let p1 = 2.0 * q(i) * (1.0 - q(i) - q(2));
            let p2 = q(i) * q(i);
            let mut p3 = 0.0;
            for j in 3..=i - 1 {
                let k = i + 2 - j;
                if k >= 3 {
                    p3 += q(j) * q(k);
                }
            }
            -(i as f64) * (p1 + 2.0 * p2 - p3)
        })
        .collect()
}

/// Expected change of `l_i` by enumerating ordered pairs `(j, k)` of merged
/// variable degrees: both lose their edges, the merged node has `j + k − shift`.
pub fn pair_enumeration_derivative(l: &[f64], e: f64, shift: usize, out_len: usize) -> Vec<f64> {
    let mut d = vec![0.0; out_len];
    for (j, &lj) in l.iter().enumerate() {
        for (k, &lk) in l.iter().enumerate() {
            let p = (lj / e) * (lk / e);
            if p == 0.0 {
                continue;
            }
            if j < out_len {
                d[j] -= j as f64 * p;
            }
            if k < out_len {
                d[k] -= k as f64 * p;
            }
            if j + k > shift && j + k - shift < out_len {
                let m = j + k - shift;
                d[m] += m as f64 * p;
            }
        }
    }
    d
}

/// BP threshold as `inf_{y∈(0,1]} y / λ(1 − ρ(1 − y))` on a uniform grid.
pub fn bp_threshold_grid(dd: &DegreeDistribution, points: usize) -> f64 {
    (1..=points)
        .map(|k| {
            let y = k as f64 / points as f64;
            y / dd.lambda_poly(1.0 - dd.rho_poly(1.0 - y))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random word of the code's span with its erased transmission.
pub fn random_transmission(inst: &EnsembleInstance, enc: &Encoder, eps: f64, seed: u64, stream: u64) -> (Vec<u8>, ReceivedWord) {
    let mut rng = trial_rng(seed, stream);
    let msg: Vec<u8> = (0..enc.message_len()).map(|_| rng.gen_range(0..2)).collect();
    let cw = enc.encode(&msg).unwrap();
    assert!(inst.code.is_codeword(&cw));
    let rw = apply_erasures(&cw, eps, seed, &mut rng);
    (cw, rw)
}

pub fn small_instance(n: usize, seed: u64) -> EnsembleInstance {
    sample_graph(&dd36(), n, seed).unwrap()
}
