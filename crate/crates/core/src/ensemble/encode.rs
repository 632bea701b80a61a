use super::{CodeGraph, EnsembleInstance};
use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Systematic encoder from the reduced row echelon form of `H`.
///
/// Non-pivot columns carry the message; each pivot column is the parity of
/// the message bits in its reduced row.
#[derive(Clone, Debug)]
pub struct Encoder {
    n: usize,
    checks: usize,
    reduced: BitMatrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl Encoder {
    /// Builds an encoder even when `H` is rank deficient; the message length
    /// is then `n - rank`.
    pub fn new(code: &CodeGraph) -> Self {
        let n = code.num_vars();
        let m = code.num_checks();
        let mut h = BitMatrix::zeros(m, n);
        for (c, adj) in code.checks().enumerate() {
            for &v in adj {
                h.set(c, v as usize, true);
            }
        }
        let pivots = h.row_reduce(n);
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free = (0..n).filter(|&j| !is_pivot[j]).collect();
        Self {
            n,
            checks: m,
            reduced: h,
            pivots,
            free,
        }
    }

    /// Like [`Encoder::new`] but rejects a rank-deficient `H`.
    pub fn full_rank(code: &CodeGraph) -> Result<Self> {
        let enc = Self::new(code);
        if enc.rank() < enc.checks {
            return Err(Error::RankDeficient {
                rank: enc.rank(),
                checks: enc.checks,
            });
        }
        Ok(enc)
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn message_len(&self) -> usize {
        self.n - self.rank()
    }

    /// Positions of the codeword that carry the message, in message order.
    pub fn systematic_positions(&self) -> &[usize] {
        &self.free
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.message_len() {
            return Err(Error::LengthMismatch {
                expected: self.message_len(),
                got: message.len(),
            });
        }
        let mut word = vec![0u8; self.n];
        let mut mask = vec![0u64; self.n.div_ceil(64)];
        for (&pos, &bit) in self.free.iter().zip(message) {
            word[pos] = bit & 1;
            if bit & 1 == 1 {
                mask[pos / 64] |= 1 << (pos % 64);
            }
        }
        for (r, &p) in self.pivots.iter().enumerate() {
            word[p] = self.reduced.masked_parity(r, &mask);
        }
        Ok(word)
    }
}

/// Encodes `message` with the instance's parity-check matrix, which must have
/// full row rank.
pub fn systematic_encode(instance: &EnsembleInstance, message: &[u8]) -> Result<Vec<u8>> {
    Encoder::full_rank(&instance.code)?.encode(message)
}
