//! Expected welfare of a mechanism relative to range voting.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::distribution::CandidateDistribution;
use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::profile::Profile;
use crate::rational::Rational;

/// Everything needed to audit one `ratio(J, u)` value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WelfareReport {
    pub welfare: Vec<Rational>,
    /// 1-based.
    pub rv_winner: usize,
    pub rv_welfare: Rational,
    pub distribution: CandidateDistribution,
    pub expected_welfare: Rational,
    pub ratio: Rational,
}

impl WelfareReport {
    pub fn compute(mech: &Mechanism, u: &Profile) -> Result<Self> {
        let distribution = mech.evaluate(u)?;
        let rv_welfare = u.rv_welfare().clone();
        if rv_welfare.is_zero() {
            return Err(Error::UndefinedRatio);
        }
        let expected_welfare = distribution.expectation(u.welfares());
        let ratio = &expected_welfare / &rv_welfare;
        Ok(Self {
            welfare: u.welfares().to_vec(),
            rv_winner: u.rv_winner(),
            rv_welfare,
            distribution,
            expected_welfare,
            ratio,
        })
    }
}

/// `E[Wel(J(u), u)] / Wel(RV(u), u)`.
pub fn ratio(mech: &Mechanism, u: &Profile) -> Result<Rational> {
    ratio_of(&mech.evaluate(u)?, u)
}

/// Welfare ratio of an already evaluated distribution.
pub fn ratio_of(dist: &CandidateDistribution, u: &Profile) -> Result<Rational> {
    let best = u.rv_welfare();
    if best.is_zero() {
        return Err(Error::UndefinedRatio);
    }
    Ok(dist.expectation(u.welfares()) / best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::Preference;
    use crate::rational::{int, rat};
    use num_traits::One;
    use proptest::prelude::*;

    fn profile(rows: &[&[(i64, i64)]]) -> Profile {
        Profile::relaxed(
            rows.iter()
                .map(|r| Preference::relaxed(r.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ratio_examples() {
        let u = profile(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        assert_eq!(ratio(&Mechanism::TopQ(1), &u).unwrap(), int(1));
        let u = profile(&[&[(1, 1), (0, 1), (1, 2)], &[(0, 1), (1, 1), (1, 2)], &[(0, 1), (1, 1), (1, 2)]]);
        // dictator picks: 1 w.p. 1/3 (welfare 1), 2 w.p. 2/3 (welfare 2); RV welfare 2
        assert_eq!(ratio(&Mechanism::TopQ(1), &u).unwrap(), rat(5, 6));
        assert_eq!(ratio(&Mechanism::RangeVoting, &u).unwrap(), int(1));
    }

    #[test]
    fn zero_welfare_is_undefined() {
        let u = profile(&[&[(0, 1), (0, 1)]]);
        assert_eq!(ratio(&Mechanism::TopQ(1), &u), Err(Error::UndefinedRatio));
        assert_eq!(WelfareReport::compute(&Mechanism::RangeVoting, &u), Err(Error::UndefinedRatio));
    }

    #[test]
    fn report_is_consistent() {
        let u = profile(&[&[(1, 1), (1, 2), (0, 1)], &[(0, 1), (1, 1), (1, 2)]]);
        let r = WelfareReport::compute(&Mechanism::TopQ(1), &u).unwrap();
        assert_eq!(r.rv_winner, 2);
        assert_eq!(r.rv_welfare, rat(3, 2));
        assert_eq!(r.expected_welfare, rat(5, 4));
        assert_eq!(r.ratio, rat(5, 6));
    }

    proptest! {
        #[test]
        fn ratio_never_exceeds_one(rows in proptest::collection::vec(proptest::collection::vec(0u64..=4, 3), 1..4), q in 1usize..4) {
            let u = Profile::relaxed(
                rows.into_iter()
                    .map(|r| Preference::relaxed(r.into_iter().map(|l| rat(l as i64, 4)).collect()).unwrap())
                    .collect(),
            )
            .unwrap();
            prop_assume!(!u.rv_welfare().is_zero());
            for mech in [Mechanism::TopQ(q), Mechanism::PairwiseQuota(q), Mechanism::JStar] {
                let r = ratio(&mech, &u).unwrap();
                prop_assert!(r >= int(0) && r <= Rational::one());
            }
            prop_assert!(ratio(&Mechanism::RangeVoting, &u).unwrap().is_one());
        }
    }
}
