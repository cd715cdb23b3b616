//! Exact lotteries over candidates.

use alloc::vec::Vec;

use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::preference::check_candidate;
use crate::rational::{common_denominator, from_usize, Rational};

/// Probability vector over `m` candidates; entries are non-negative and sum to exactly 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CandidateDistribution {
    probs: Vec<Rational>,
}

impl CandidateDistribution {
    pub fn new(probs: Vec<Rational>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::precondition("distribution over zero candidates"));
        }
        if probs.iter().any(Signed::is_negative) {
            return Err(Error::precondition("negative probability"));
        }
        let total: Rational = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::precondition(alloc::format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    /// All mass on candidate `j` (1-based).
    pub fn point(m: usize, j: usize) -> Result<Self> {
        check_candidate(j, m)?;
        let mut probs = alloc::vec![Rational::zero(); m];
        probs[j - 1] = Rational::one();
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Self {
        let p = Rational::one() / from_usize(m);
        Self {
            probs: alloc::vec![p; m],
        }
    }

    /// Builds `counts[j] / total`; `counts` must sum to `total`.
    pub(crate) fn from_counts(counts: &[u64], total: u64) -> Self {
        debug_assert_eq!(counts.iter().sum::<u64>(), total);
        let denom = BigInt::from(total);
        Self {
            probs: counts
                .iter()
                .map(|&c| Rational::new(BigInt::from(c), denom.clone()))
                .collect(),
        }
    }

    pub(crate) fn from_raw(probs: Vec<Rational>) -> Self {
        debug_assert!(Self::new(probs.clone()).is_ok());
        Self { probs }
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// Probability of candidate `j` (1-based).
    pub fn prob(&self, j: usize) -> Result<&Rational> {
        check_candidate(j, self.m())?;
        Ok(&self.probs[j - 1])
    }

    /// `Σ_j p_j · values_j`.
    pub fn expectation(&self, values: &[Rational]) -> Rational {
        debug_assert_eq!(values.len(), self.m());
        self.probs
            .iter()
            .zip(values)
            .filter(|(p, _)| !p.is_zero())
            .fold(Rational::zero(), |acc, (p, v)| acc + p * v)
    }

    /// Draws a candidate (1-based) with a ChaCha8 generator seeded by `seed`.
    pub fn sample(&self, seed: u64) -> usize {
        self.sample_with(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// Exact draw: a uniform integer below the common denominator picks the bucket.
    pub fn sample_with<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let denom = common_denominator(&self.probs);
        let draw = rng.gen_bigint_range(&BigInt::zero(), &denom);
        let mut cumulative = BigInt::zero();
        for (j, p) in self.probs.iter().enumerate() {
            cumulative += p.numer() * (&denom / p.denom());
            if draw < cumulative {
                return j + 1;
            }
        }
        unreachable!("probabilities sum to one")
    }

    /// Relabels the outcome: the result gives `perm[j]` the mass of `j` (0-based perm).
    pub fn push_forward(&self, perm: &[usize]) -> Self {
        let mut probs = alloc::vec![Rational::zero(); self.m()];
        for (j, p) in self.probs.iter().enumerate() {
            probs[perm[j]] += p;
        }
        Self { probs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use alloc::vec;

    #[test]
    fn rejects_invalid_vectors() {
        assert!(CandidateDistribution::new(vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(CandidateDistribution::new(vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(CandidateDistribution::new(vec![]).is_err());
        assert!(CandidateDistribution::new(vec![rat(1, 3), rat(2, 3)]).is_ok());
    }

    #[test]
    fn degenerate_sampling_is_certain() {
        let d = CandidateDistribution::point(3, 1).unwrap();
        for seed in 0..50 {
            assert_eq!(d.sample(seed), 1);
        }
        let d = CandidateDistribution::new(vec![rat(0, 1), rat(0, 1), rat(1, 1)]).unwrap();
        assert!((0..50).all(|s| d.sample(s) == 3));
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = CandidateDistribution::uniform(5);
        for seed in [0, 7, 12345] {
            assert_eq!(d.sample(seed), d.sample(seed));
        }
    }
}
