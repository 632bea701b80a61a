//! Maximum-likelihood erasure decoding by Gaussian elimination on the erased
//! columns of the parity-check matrix.

use crate::bp::{DecodeOutcome, DecodeStatus};
use crate::channel::ReceivedWord;
use crate::ensemble::CodeGraph;
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::graph::ResidualSummary;

/// Solves `H_E x_E = s` where `s` collects the known bits and check parities.
/// Bits in the span of the free columns stay `None`; the word is recovered iff
/// the erased columns have full rank.
pub fn ml_oracle_decode(code: &CodeGraph, received: &ReceivedWord) -> Result<DecodeOutcome> {
    let n = code.num_vars();
    if received.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: received.len(),
        });
    }
    let erased: Vec<usize> = received.erased_positions().collect();
    let mut col = vec![usize::MAX; n];
    for (k, &v) in erased.iter().enumerate() {
        col[v] = k;
    }
    let k = erased.len();
    let m = code.num_checks();
    let mut a = BitMatrix::zeros(m, k + 1);
    for c in 0..m {
        let mut rhs = code.parity(c);
        for &v in code.check(c) {
            match received.values[v as usize] {
                Some(b) => rhs ^= b,
                None => a.flip(c, col[v as usize]),
            }
        }
        a.set(c, k, rhs == 1);
    }
    let pivots = a.row_reduce(k);
    let rank = pivots.len();
    if let Some(c) = (rank..m).find(|&r| a.get(r, k)) {
        return Err(Error::Contradiction { check: c });
    }
    let mut assignment = received.values.clone();
    let mut is_pivot = vec![false; k];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for (row, &p) in pivots.iter().enumerate() {
        // determined only if no free column appears in this row
        let free_in_row = (0..k).any(|j| !is_pivot[j] && a.get(row, j));
        if !free_in_row {
            assignment[erased[p]] = Some(a.get(row, k) as u8);
        }
    }
    let unresolved = assignment.iter().filter(|b| b.is_none()).count();
    Ok(DecodeOutcome {
        status: if unresolved == 0 {
            DecodeStatus::Success
        } else {
            DecodeStatus::Stalled
        },
        assignment,
        residual: ResidualSummary {
            alive_vars: unresolved,
            ..ResidualSummary::default()
        },
        iterations: rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rw(values: &[Option<u8>]) -> ReceivedWord {
        ReceivedWord {
            values: values.to_vec(),
            epsilon: 0.5,
            seed: 0,
        }
    }

    #[test]
    fn nothing_erased() {
        let code = CodeGraph::from_checks(3, vec![vec![0, 1, 2]], None).unwrap();
        let out = ml_oracle_decode(&code, &rw(&[Some(1), Some(0), Some(1)])).unwrap();
        assert!(out.is_success());
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn four_cycle_is_rank_one() {
        let code = CodeGraph::from_checks(3, vec![vec![0, 1, 2], vec![0, 1]], None).unwrap();
        let out = ml_oracle_decode(&code, &rw(&[None, None, Some(0)])).unwrap();
        assert!(!out.is_success());
        assert_eq!(out.iterations, 1);
        assert_eq!(out.assignment, vec![None, None, Some(0)]);
    }

    #[test]
    fn solves_beyond_peeling() {
        // every check has two erased neighbours, yet the system has rank 3
        let code = CodeGraph::from_checks(4, vec![vec![0, 1, 2, 3], vec![0, 1, 3], vec![1, 2, 3]], None).unwrap();
        assert!(code.is_codeword(&[0, 1, 0, 1]));
        let out = ml_oracle_decode(&code, &rw(&[None, None, None, Some(1)])).unwrap();
        assert_eq!(out.word().unwrap(), vec![0, 1, 0, 1]);
    }

    #[test]
    fn inconsistent_observation() {
        let code = CodeGraph::from_checks(2, vec![vec![0, 1]], None).unwrap();
        assert!(matches!(
            ml_oracle_decode(&code, &rw(&[Some(1), Some(0)])),
            Err(Error::Contradiction { check: 0 })
        ));
    }
}
