//! Word-error-rate campaigns with paired erasure patterns across decoders.
//!
//! The all-zero codeword is transmitted: the codes are linear and erasure
//! patterns do not depend on the transmitted word.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rayon::prelude::*;

use super::ml_oracle_decode;
use crate::bp::bp_peel;
use crate::channel::{apply_erasures, trial_rng};
use crate::ensemble::{sample_graph, CodeGraph, DegreeDistribution};
use crate::error::{Error, Result};
use crate::graph::{ResolutionLedger, TannerGraph};
use crate::tep::{tep_run, Schedule};
use crate::trace::format_sig;

pub const WER_CSV_HEADER: &str = "eps,n,decoder,graphs,trials,failures,wer,ci95,seed";

const Z95: f64 = 1.959963984540054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoder {
    Bp,
    Tep,
    Ml,
}

impl FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bp" => Ok(Decoder::Bp),
            "tep" => Ok(Decoder::Tep),
            "ml" => Ok(Decoder::Ml),
            other => Err(Error::InvalidArgument(format!("unknown decoder '{other}'"))),
        }
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decoder::Bp => "bp",
            Decoder::Tep => "tep",
            Decoder::Ml => "ml",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WerRecord {
    pub eps: f64,
    pub n: usize,
    pub decoder: Decoder,
    pub graphs: usize,
    pub trials_per_graph: usize,
    pub failures: u64,
    pub wer: f64,
    pub ci95: f64,
    pub seed: u64,
}

impl WerRecord {
    pub fn total(&self) -> u64 {
        (self.graphs * self.trials_per_graph) as u64
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.failures, self.total())
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            format_sig(self.eps, 9),
            self.n,
            self.decoder,
            self.graphs,
            self.trials_per_graph,
            self.failures,
            format_sig(self.wer, 9),
            format_sig(self.ci95, 9),
            self.seed
        )
    }
}

pub fn records_csv(records: &[WerRecord]) -> String {
    let mut out = String::from(WER_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Wilson score interval for `failures` out of `total` at 95% confidence.
pub fn wilson_interval(failures: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn wilson_half_width(failures: u64, total: u64) -> f64 {
    let (lo, hi) = wilson_interval(failures, total);
    0.5 * (hi - lo)
}

/// `start:stop:step` (inclusive of `stop` up to rounding) or a comma list.
pub fn parse_eps_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("bad epsilon grid '{text}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid: Vec<f64> = if let [a, b, h] = text.split(':').collect::<Vec<_>>()[..] {
        let (a, b, h) = (num(a)?, num(b)?, num(h)?);
        if !(h > 0.0) || b < a {
            return Err(bad());
        }
        let steps = ((b - a) / h + 1e-9).floor() as usize;
        (0..=steps).map(|k| a + k as f64 * h).map(|x| (x * 1e12).round() / 1e12).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(bad());
    }
    Ok(grid)
}

/// Per-decoder success on one erasure pattern; `None` when not requested.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialOutcome {
    pub bp: Option<bool>,
    pub tep: Option<bool>,
    pub ml: Option<bool>,
    /// Word recovered by TEP, when it succeeded.
    pub tep_word: Option<Vec<u8>>,
}

impl TrialOutcome {
    fn success(&self, d: Decoder) -> Option<bool> {
        match d {
            Decoder::Bp => self.bp,
            Decoder::Tep => self.tep,
            Decoder::Ml => self.ml,
        }
    }
}

/// Runs the requested decoders on one received word. TEP continues from the
/// BP stall so both see the same peeling prefix.
pub fn paired_trial(
    code: &CodeGraph,
    received: &crate::channel::ReceivedWord,
    decoders: &[Decoder],
) -> Result<TrialOutcome> {
    let mut out = TrialOutcome::default();
    let want = |d| decoders.contains(&d);
    if want(Decoder::Bp) || want(Decoder::Tep) {
        let mut g = TannerGraph::initialize(code, received)?;
        let mut ledger = ResolutionLedger::from_received(received);
        bp_peel(&mut g, &mut ledger)?;
        if want(Decoder::Bp) {
            out.bp = Some(g.alive_vars() == 0);
        }
        if want(Decoder::Tep) {
            let res = tep_run(&mut g, &mut ledger, Schedule::Practical)?;
            out.tep = Some(res.is_success());
            out.tep_word = res.word();
        }
    }
    if want(Decoder::Ml) {
        out.ml = Some(ml_oracle_decode(code, received)?.is_success());
    }
    Ok(out)
}

/// Seed of the `g`-th sampled graph of a campaign.
fn graph_seed(seed: u64, g: usize) -> u64 {
    trial_rng(seed, (1u64 << 63) | g as u64).next_u64()
}

/// Failure counts for `graphs` sampled codes × `trials` erasure patterns at
/// every `eps`. Records are ordered by `eps`, then by the order of `decoders`.
pub fn wer_campaign(
    dd: &DegreeDistribution,
    n: usize,
    eps_grid: &[f64],
    graphs: usize,
    trials: usize,
    seed: u64,
    decoders: &[Decoder],
) -> Result<Vec<WerRecord>> {
    if graphs == 0 || trials == 0 {
        return Err(Error::InvalidArgument("graphs and trials must be positive".into()));
    }
    if decoders.is_empty() {
        return Err(Error::InvalidArgument("no decoders requested".into()));
    }
    let grid_len = eps_grid.len();
    // failures[graph][eps][decoder]
    let per_graph: Vec<Vec<Vec<u64>>> = (0..graphs)
        .into_par_iter()
        .map(|g| -> Result<Vec<Vec<u64>>> {
            let inst = sample_graph(dd, n, graph_seed(seed, g))?;
            let zero = vec![0u8; n];
            let mut counts = vec![vec![0u64; decoders.len()]; grid_len];
            for (ei, &eps) in eps_grid.iter().enumerate() {
                for t in 0..trials {
                    let stream = ((g * grid_len + ei) * trials + t) as u64;
                    let mut rng = trial_rng(seed, stream);
                    let rw = apply_erasures(&zero, eps, seed, &mut rng);
                    let out = paired_trial(&inst.code, &rw, decoders)?;
                    for (di, &d) in decoders.iter().enumerate() {
                        if out.success(d) == Some(false) {
                            counts[ei][di] += 1;
                        }
                    }
                }
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;

    let total = (graphs * trials) as u64;
    let mut records = Vec::with_capacity(grid_len * decoders.len());
    for (ei, &eps) in eps_grid.iter().enumerate() {
        for (di, &decoder) in decoders.iter().enumerate() {
            let failures: u64 = per_graph.iter().map(|c| c[ei][di]).sum();
            records.push(WerRecord {
                eps,
                n,
                decoder,
                graphs,
                trials_per_graph: trials,
                failures,
                wer: failures as f64 / total as f64,
                ci95: wilson_half_width(failures, total),
                seed,
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_eps_grid("0.38:0.46:0.005").unwrap();
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], 0.38);
        assert_eq!(*g.last().unwrap(), 0.46);
        assert_eq!(parse_eps_grid("0.1,0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_eps_grid("0.5:0.1:0.1").is_err());
        assert!(parse_eps_grid("1.5").is_err());
    }

    #[test]
    fn wilson_known_value() {
        // 10 of 100: centre 0.1 + 1.92/100 … interval ≈ [0.0552, 0.1744]
        let (lo, hi) = wilson_interval(10, 100);
        assert!((lo - 0.05522914).abs() < 1e-6, "{lo}");
        assert!((hi - 0.17436566).abs() < 1e-6, "{hi}");
        let (lo, hi) = wilson_interval(0, 50);
        assert!(lo < 1e-15);
        assert!(hi > 0.0 && hi < 0.1);
    }

    #[test]
    fn zero_erasure_never_fails() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        let recs = wer_campaign(&dd, 64, &[0.0], 3, 5, 7, &[Decoder::Bp, Decoder::Tep, Decoder::Ml]).unwrap();
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| r.failures == 0 && r.wer == 0.0));
    }

    #[test]
    fn campaign_is_reproducible() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        let run = || records_csv(&wer_campaign(&dd, 64, &[0.4, 0.45], 4, 10, 3, &[Decoder::Bp, Decoder::Tep]).unwrap());
        let a = run();
        assert_eq!(a, run());
        assert!(a.starts_with(WER_CSV_HEADER));
        assert_eq!(a.lines().count(), 5);
    }

    #[test]
    fn zero_trials_rejected() {
        let dd = DegreeDistribution::regular(3, 6).unwrap();
        assert!(wer_campaign(&dd, 64, &[0.4], 1, 0, 0, &[Decoder::Bp]).is_err());
    }
}
