//! LDPC ensembles: degree distributions, configuration-model sampling and a
//! systematic GF(2) encoder.

mod code;
mod dd;
mod encode;

pub use code::CodeGraph;
pub use dd::{parse_polynomial, DegreeDistribution};
pub use encode::{systematic_encode, Encoder};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One sampled member of an LDPC ensemble.
#[derive(Clone, Debug)]
pub struct EnsembleInstance {
    pub n: usize,
    /// Socket count, `round(n / Σ λ_i/i)` up to rounding adjustments.
    pub edges: usize,
    pub code: CodeGraph,
    pub seed: u64,
    /// Variable-check pairs matched more than once by the socket permutation.
    pub collapsed_pairs: usize,
    /// Per-node degrees before mod-2 collapse.
    pub variable_degrees: Vec<usize>,
    pub check_degrees: Vec<usize>,
}

impl EnsembleInstance {
    pub fn num_checks(&self) -> usize {
        self.code.num_checks()
    }
}

/// Distributes `total` items over `fractions` by largest remainder.
fn apportion(total: usize, fractions: &[(usize, f64)]) -> Vec<(usize, usize)> {
    let exact: Vec<f64> = fractions.iter().map(|&(_, f)| f * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    // largest fractional part first; ties to the lower degree
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().take(total.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    fractions
        .iter()
        .zip(counts)
        .map(|(&(d, _), c)| (d, c))
        .collect()
}

/// Node degree sequences `(variables, checks)` for length `n`.
fn degree_sequences(dd: &DegreeDistribution, n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < dd.max_left_degree() {
        return Err(Error::Infeasible(format!(
            "n={n} is smaller than the maximum variable degree {}",
            dd.max_left_degree()
        )));
    }
    let var_counts = apportion(n, &dd.variable_node_fractions());
    let sockets: usize = var_counts.iter().map(|&(d, c)| d * c).sum();

    let m = (n as f64 * (1.0 - dd.rate())).round() as usize;
    if m == 0 {
        return Err(Error::Infeasible(format!("n={n} yields no check nodes")));
    }
    let check_counts = apportion(m, &dd.check_node_fractions());
    let mut check_degrees: Vec<usize> = check_counts
        .iter()
        .flat_map(|&(d, c)| std::iter::repeat(d).take(c))
        .collect();

    // Equalize socket totals on the highest-degree check class.
    let check_sockets: usize = check_degrees.iter().sum();
    let top = *check_degrees.iter().max().unwrap();
    let top_idx: Vec<usize> = (0..m).filter(|&i| check_degrees[i] == top).collect();
    if sockets != check_sockets {
        let delta = sockets.abs_diff(check_sockets);
        for k in 0..delta {
            let i = top_idx[k % top_idx.len()];
            if sockets > check_sockets {
                check_degrees[i] += 1;
            } else if check_degrees[i] > 1 {
                check_degrees[i] -= 1;
            } else {
                return Err(Error::Infeasible(format!(
                    "cannot remove {delta} check sockets from the degree-{top} class"
                )));
            }
        }
    }
    let max_check = *check_degrees.iter().max().unwrap();
    if max_check > n {
        return Err(Error::Infeasible(format!(
            "check degree {max_check} exceeds n={n}"
        )));
    }
    debug_assert_eq!(check_degrees.iter().sum::<usize>(), sockets);

    let variable_degrees = var_counts
        .iter()
        .flat_map(|&(d, c)| std::iter::repeat(d).take(c))
        .collect();
    Ok((variable_degrees, check_degrees))
}

/// Samples a Tanner graph from the configuration model: a uniformly random
/// matching between variable and check sockets, with parallel edges
/// cancelled mod 2.
pub fn sample_graph(dd: &DegreeDistribution, n: usize, seed: u64) -> Result<EnsembleInstance> {
    let (variable_degrees, check_degrees) = degree_sequences(dd, n)?;
    let edges: usize = variable_degrees.iter().sum();

    let mut var_sockets: Vec<u32> = Vec::with_capacity(edges);
    for (v, &d) in variable_degrees.iter().enumerate() {
        var_sockets.extend(std::iter::repeat(v as u32).take(d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    var_sockets.shuffle(&mut rng);

    let mut checks = Vec::with_capacity(check_degrees.len());
    let mut collapsed_pairs = 0;
    let mut pos = 0;
    for &d in &check_degrees {
        let mut adj = var_sockets[pos..pos + d].to_vec();
        pos += d;
        adj.sort_unstable();
        let (kept, repeated) = code::collapse_mod2(&adj);
        collapsed_pairs += repeated;
        checks.push(kept);
    }
    let code = CodeGraph::from_checks(n, checks, None)?;
    Ok(EnsembleInstance {
        n,
        edges,
        code,
        seed,
        collapsed_pairs,
        variable_degrees,
        check_degrees,
    })
}
