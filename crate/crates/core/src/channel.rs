//! Binary erasure channel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Channel output: `Some(bit)` for received positions, `None` for erasures.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedWord {
    pub values: Vec<Option<u8>>,
    pub epsilon: f64,
    pub seed: u64,
}

impl ReceivedWord {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn erasures(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn erased_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.is_none().then_some(i))
    }
}

/// RNG for trial `stream` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-position erasure flags. Depends only on `(rng state, n, epsilon)`.
pub fn erasure_pattern(n: usize, epsilon: f64, rng: &mut impl Rng) -> Vec<bool> {
    (0..n).map(|_| rng.gen::<f64>() < epsilon).collect()
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!(
            "erasure probability {epsilon} outside [0, 1]"
        )));
    }
    Ok(())
}

pub fn transmit(codeword: &[u8], epsilon: f64, seed: u64) -> Result<ReceivedWord> {
    check_epsilon(epsilon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(apply_erasures(codeword, epsilon, seed, &mut rng))
}

pub fn apply_erasures(codeword: &[u8], epsilon: f64, seed: u64, rng: &mut impl Rng) -> ReceivedWord {
    let values = erasure_pattern(codeword.len(), epsilon, rng)
        .into_iter()
        .zip(codeword)
        .map(|(erased, &b)| (!erased).then_some(b))
        .collect();
    ReceivedWord {
        values,
        epsilon,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_total_erasure() {
        let word = vec![1, 0, 1, 1, 0];
        let r = transmit(&word, 0.0, 3).unwrap();
        assert_eq!(r.values, word.iter().map(|&b| Some(b)).collect::<Vec<_>>());
        let r = transmit(&word, 1.0, 3).unwrap();
        assert_eq!(r.erasures(), 5);
        assert!(transmit(&word, 1.5, 3).is_err());
    }

    #[test]
    fn erased_fraction_concentrates() {
        let n = 1_000_000;
        let r = transmit(&vec![0; n], 0.43, 2024).unwrap();
        let frac = r.erasures() as f64 / n as f64;
        let bound = 3.0 * (0.43f64 * 0.57 / n as f64).sqrt();
        assert!((frac - 0.43).abs() <= bound, "{frac}");
    }

    #[test]
    fn pattern_independent_of_content() {
        let a = transmit(&[0; 64], 0.5, 9).unwrap();
        let b = transmit(&[1; 64], 0.5, 9).unwrap();
        let ea: Vec<_> = a.erased_positions().collect();
        let eb: Vec<_> = b.erased_positions().collect();
        assert_eq!(ea, eb);
        assert!(b.values.iter().flatten().all(|&v| v == 1));
    }

    #[test]
    fn streams_differ() {
        let a = erasure_pattern(128, 0.5, &mut trial_rng(1, 0));
        let b = erasure_pattern(128, 0.5, &mut trial_rng(1, 1));
        assert_ne!(a, b);
        assert_eq!(a, erasure_pattern(128, 0.5, &mut trial_rng(1, 0)));
    }
}
