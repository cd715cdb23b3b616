//! A single voter's cardinal utilities.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{in_unit_interval, Rational};

/// Utilities of one voter over `m >= 2` candidates, every value in `[0, 1]`.
///
/// The strict order used by every ordinal mechanism is cached at construction:
/// candidates sorted by value descending, ties broken toward the lower index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Preference {
    values: Vec<Rational>,
    // 0-based candidate indices, most preferred first.
    order: Vec<usize>,
}

impl Preference {
    /// Normalized preference: minimum exactly 0 and maximum exactly 1.
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        let pref = Self::relaxed(values)?;
        if !pref.is_normalized() {
            return Err(Error::precondition(
                "preference must attain both 0 and 1 (use `relaxed` otherwise)",
            ));
        }
        Ok(pref)
    }

    /// Any utility vector in `[0, 1]`, without requiring 0 and 1 to be attained.
    pub fn relaxed(values: Vec<Rational>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::precondition("a preference needs at least two candidates"));
        }
        if let Some(bad) = values.iter().find(|v| !in_unit_interval(v)) {
            return Err(Error::precondition(alloc::format!(
                "utility {bad} outside [0, 1]"
            )));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
        Ok(Self { values, order })
    }

    /// Builds a normalized preference from grid levels `level / k`.
    pub fn from_levels(levels: &[u64], k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::precondition("grid resolution k must be positive"));
        }
        Self::new(
            levels
                .iter()
                .map(|&l| Rational::new(l.into(), k.into()))
                .collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Utility of candidate `j` (1-based).
    pub fn value(&self, j: usize) -> Result<&Rational> {
        check_candidate(j, self.m())?;
        Ok(&self.values[j - 1])
    }

    pub fn is_normalized(&self) -> bool {
        let min = self.values.iter().min().expect("m >= 2");
        let max = self.values.iter().max().expect("m >= 2");
        min.is_zero() && max.is_one()
    }

    pub fn is_tie_free(&self) -> bool {
        self.order
            .windows(2)
            .all(|w| self.values[w[0]] != self.values[w[1]])
    }

    /// Candidates (1-based), most preferred first, ties broken by lower index.
    pub fn strict_order(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.order.iter().map(|&c| c + 1)
    }

    pub(crate) fn order0(&self) -> &[usize] {
        &self.order
    }

    /// Number of candidates valued at least as much as `j`.
    ///
    /// Only defined on tie-free preferences, where it is a bijection onto `1..=m`.
    pub fn rank(&self, j: usize) -> Result<usize> {
        check_candidate(j, self.m())?;
        if !self.is_tie_free() {
            return Err(Error::precondition("rank requires a tie-free preference"));
        }
        let v = &self.values[j - 1];
        Ok(self.values.iter().filter(|w| *w >= v).count())
    }

    /// The `q` most preferred candidates (1-based) under the strict order.
    pub fn top_q_set(&self, q: usize) -> Result<Vec<usize>> {
        if q == 0 || q > self.m() {
            return Err(Error::Index {
                what: "top-q size",
                index: q,
                bound: self.m(),
            });
        }
        Ok(self.order[..q].iter().map(|&c| c + 1).collect())
    }

    /// Expected utility of a lottery given as a probability vector.
    pub fn expected_utility(&self, probs: &[Rational]) -> Rational {
        debug_assert_eq!(probs.len(), self.m());
        self.values
            .iter()
            .zip(probs)
            .filter(|(_, p)| !p.is_zero())
            .fold(Rational::zero(), |acc, (v, p)| acc + v * p)
    }

    /// `self ∘ perm`: candidate `j` of the result carries the utility of `perm[j]`.
    ///
    /// `perm` is a 0-based permutation of `0..m`.
    pub fn compose(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.m());
        let values = perm.iter().map(|&p| self.values[p].clone()).collect();
        Self::relaxed(values).expect("permuting a valid preference stays valid")
    }

    /// Same ordering pattern including ties: `u(a) > u(b)` iff `v(a) > v(b)`.
    pub fn ordinal_equivalent(&self, other: &Self) -> bool {
        if self.m() != other.m() {
            return false;
        }
        let m = self.m();
        (0..m).all(|a| {
            (0..m).all(|b| {
                (self.values[a] > self.values[b]) == (other.values[a] > other.values[b])
            })
        })
    }

    /// For each candidate, the number of candidates it is strictly below.
    ///
    /// Two preferences share this key iff they are ordinal equivalent.
    pub fn weak_order_key(&self) -> Vec<usize> {
        self.values
            .iter()
            .map(|v| self.values.iter().filter(|w| *w > v).count())
            .collect()
    }
}

impl PartialOrd for Preference {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic by candidate values.
impl Ord for Preference {
    fn cmp(&self, other: &Self) -> Ordering {
        self.values.cmp(&other.values)
    }
}

/// Maps `raw` affinely onto `[0, 1]`: `(x - min) / (max - min)`.
pub fn normalize(raw: &[Rational]) -> Result<Preference> {
    if raw.len() < 2 {
        return Err(Error::precondition("need at least two candidates"));
    }
    let min = raw.iter().min().expect("non-empty");
    let max = raw.iter().max().expect("non-empty");
    if min == max {
        return Err(Error::Normalization);
    }
    let span = max - min;
    Preference::new(raw.iter().map(|x| (x - min) / &span).collect())
}

pub(crate) fn check_candidate(j: usize, m: usize) -> Result<()> {
    if j == 0 || j > m {
        return Err(Error::Index {
            what: "candidate",
            index: j,
            bound: m,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::vec;
    use proptest::prelude::*;

    fn pref(values: &[(i64, i64)]) -> Preference {
        Preference::relaxed(values.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let u = normalize(&[rat(2, 10), rat(6, 10), rat(4, 10)]).unwrap();
        assert_eq!(u.values(), &[int(0), int(1), rat(1, 2)]);
        let u = normalize(&[int(0), int(1)]).unwrap();
        assert_eq!(u.values(), &[int(0), int(1)]);
        assert_eq!(
            normalize(&[int(1), int(1), int(1)]),
            Err(Error::Normalization)
        );
    }

    #[test]
    fn constructors_enforce_their_contracts() {
        assert!(Preference::new(vec![rat(1, 2), int(1)]).is_err());
        assert!(Preference::relaxed(vec![rat(1, 2), int(1)]).is_ok());
        assert!(Preference::relaxed(vec![int(2), int(1)]).is_err());
        assert!(Preference::relaxed(vec![int(1)]).is_err());
        assert!(Preference::relaxed(vec![rat(-1, 2), int(1)]).is_err());
    }

    #[test]
    fn rank_examples() {
        let u = pref(&[(1, 1), (1, 2), (0, 1)]);
        assert_eq!(u.rank(1).unwrap(), 1);
        assert_eq!(u.rank(3).unwrap(), 3);
        let u = pref(&[(0, 1), (1, 4), (1, 2), (1, 1)]);
        assert_eq!(u.rank(2).unwrap(), 3);
        let tied = pref(&[(1, 1), (1, 1), (0, 1)]);
        assert!(matches!(tied.rank(1), Err(Error::Precondition(_))));
        assert!(matches!(u.rank(5), Err(Error::Index { .. })));
    }

    #[test]
    fn top_q_examples() {
        let u = pref(&[(1, 1), (1, 2), (0, 1)]);
        assert_eq!(u.top_q_set(2).unwrap(), vec![1, 2]);
        assert_eq!(pref(&[(1, 1), (1, 1), (0, 1)]).top_q_set(1).unwrap(), vec![1]);
        assert_eq!(pref(&[(0, 1), (1, 1), (1, 1)]).top_q_set(1).unwrap(), vec![2]);
        assert!(u.top_q_set(0).is_err());
        assert!(u.top_q_set(4).is_err());
    }

    #[test]
    fn ordinal_equivalence_examples() {
        let a = pref(&[(1, 1), (1, 2), (0, 1)]);
        assert!(a.ordinal_equivalent(&pref(&[(1, 1), (3, 4), (0, 1)])));
        assert!(!a.ordinal_equivalent(&pref(&[(1, 1), (1, 1), (0, 1)])));
        assert!(!pref(&[(1, 1), (0, 1)]).ordinal_equivalent(&pref(&[(0, 1), (1, 1)])));
    }

    fn arb_pref() -> impl Strategy<Value = Preference> {
        (2usize..6).prop_flat_map(|m| {
            proptest::collection::vec(0u64..=6, m).prop_filter_map("needs 0 and 6", |levels| {
                Preference::from_levels(&levels, 6).ok()
            })
        })
    }

    proptest! {
        #[test]
        fn normalize_is_exact_and_order_preserving(raw in proptest::collection::vec(-50i64..50, 2..7)) {
            let raw: Vec<Rational> = raw.into_iter().map(int).collect();
            match normalize(&raw) {
                Err(Error::Normalization) => prop_assert!(raw.iter().all(|x| *x == raw[0])),
                Err(e) => prop_assert!(false, "unexpected {e}"),
                Ok(u) => {
                    prop_assert!(u.is_normalized());
                    for a in 0..raw.len() {
                        for b in 0..raw.len() {
                            prop_assert_eq!(raw[a].cmp(&raw[b]), u.values()[a].cmp(&u.values()[b]));
                        }
                    }
                }
            }
        }

        #[test]
        fn top_q_is_monotone_and_agrees_with_rank(u in arb_pref()) {
            for q in 1..u.m() {
                let small = u.top_q_set(q).unwrap();
                let big = u.top_q_set(q + 1).unwrap();
                prop_assert!(small.iter().all(|j| big.contains(j)));
            }
            if u.is_tie_free() {
                for q in 1..=u.m() {
                    let top = u.top_q_set(q).unwrap();
                    for j in 1..=u.m() {
                        prop_assert_eq!(top.contains(&j), u.rank(j).unwrap() <= q);
                    }
                }
            }
        }

        #[test]
        fn weak_order_key_characterizes_ordinal_equivalence(a in arb_pref(), b in arb_pref()) {
            if a.m() == b.m() {
                prop_assert_eq!(a.weak_order_key() == b.weak_order_key(), a.ordinal_equivalent(&b));
            }
        }
    }
}
