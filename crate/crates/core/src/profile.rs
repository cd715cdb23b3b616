//! Preference profiles and their welfare vectors.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::preference::{check_candidate, Preference};
use crate::rational::Rational;

/// `n >= 1` preferences over a common candidate set.
///
/// The per-candidate welfare `u(j) = Σ_i u_i(j)` is computed once at construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile {
    prefs: Vec<Preference>,
    welfare: Vec<Rational>,
}

impl Profile {
    /// Profile of normalized preferences.
    pub fn new(prefs: Vec<Preference>) -> Result<Self> {
        if let Some(i) = prefs.iter().position(|p| !p.is_normalized()) {
            return Err(Error::precondition(alloc::format!(
                "voter {} is not normalized (use `relaxed` otherwise)",
                i + 1
            )));
        }
        Self::relaxed(prefs)
    }

    /// Profile that admits non-normalized preferences.
    pub fn relaxed(prefs: Vec<Preference>) -> Result<Self> {
        let first = prefs
            .first()
            .ok_or_else(|| Error::precondition("a profile needs at least one voter"))?;
        let m = first.m();
        if prefs.iter().any(|p| p.m() != m) {
            return Err(Error::precondition("voters disagree on the candidate count"));
        }
        let mut welfare = alloc::vec![Rational::zero(); m];
        for p in &prefs {
            for (w, v) in welfare.iter_mut().zip(p.values()) {
                *w += v;
            }
        }
        Ok(Self { prefs, welfare })
    }

    pub fn m(&self) -> usize {
        self.welfare.len()
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    /// Voter `i` (1-based).
    pub fn voter(&self, i: usize) -> Result<&Preference> {
        if i == 0 || i > self.n() {
            return Err(Error::Index {
                what: "voter",
                index: i,
                bound: self.n(),
            });
        }
        Ok(&self.prefs[i - 1])
    }

    pub fn is_normalized(&self) -> bool {
        self.prefs.iter().all(Preference::is_normalized)
    }

    pub fn is_tie_free(&self) -> bool {
        self.prefs.iter().all(Preference::is_tie_free)
    }

    /// `Wel(j, u)` for candidate `j` (1-based).
    pub fn welfare(&self, j: usize) -> Result<&Rational> {
        check_candidate(j, self.m())?;
        Ok(&self.welfare[j - 1])
    }

    /// Welfare of every candidate, 0-based.
    pub fn welfares(&self) -> &[Rational] {
        &self.welfare
    }

    /// Range-voting winner (1-based); the lowest index among the welfare maximizers.
    pub fn rv_winner(&self) -> usize {
        let mut best = 0;
        for (j, w) in self.welfare.iter().enumerate().skip(1) {
            if *w > self.welfare[best] {
                best = j;
            }
        }
        best + 1
    }

    pub fn rv_welfare(&self) -> &Rational {
        &self.welfare[self.rv_winner() - 1]
    }

    /// Copy with voter `i` (1-based) replaced.
    pub fn with_voter(&self, i: usize, pref: Preference) -> Result<Self> {
        self.voter(i)?;
        if pref.m() != self.m() {
            return Err(Error::precondition("replacement has a different candidate count"));
        }
        let mut prefs = self.prefs.clone();
        prefs[i - 1] = pref;
        Self::relaxed(prefs)
    }

    /// Voters of `self` followed by voters of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut prefs = self.prefs.clone();
        prefs.extend(other.prefs.iter().cloned());
        Self::relaxed(prefs)
    }

    /// Relabels voters and candidates: voter `i` of the result is
    /// `u_{voter_perm[i]} ∘ cand_perm` (both 0-based permutations).
    pub fn permuted(&self, voter_perm: &[usize], cand_perm: &[usize]) -> Self {
        let prefs = voter_perm
            .iter()
            .map(|&i| self.prefs[i].compose(cand_perm))
            .collect();
        Self::relaxed(prefs).expect("permutation of a valid profile")
    }

    pub fn into_prefs(self) -> Vec<Preference> {
        self.prefs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::vec;
    use proptest::prelude::*;

    pub(crate) fn profile(rows: &[&[(i64, i64)]]) -> Profile {
        Profile::relaxed(
            rows.iter()
                .map(|r| Preference::relaxed(r.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn welfare_examples() {
        let u = profile(&[&[(1, 1), (0, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(u.welfare(1).unwrap(), &int(2));
        let u = profile(&[&[(1, 1), (0, 1), (1, 2)], &[(0, 1), (1, 1), (1, 2)]]);
        assert_eq!(u.welfare(3).unwrap(), &int(1));
        let u = profile(&[&[(1, 1), (0, 1)]]);
        assert_eq!(u.welfare(2).unwrap(), &int(0));
        assert!(matches!(u.welfare(3), Err(Error::Index { .. })));
        assert!(matches!(u.welfare(0), Err(Error::Index { .. })));
    }

    #[test]
    fn rv_winner_examples() {
        let u = profile(&[&[(1, 1), (1, 2), (0, 1)], &[(0, 1), (1, 1), (1, 2)]]);
        assert_eq!(u.rv_winner(), 2);
        assert_eq!(u.welfares(), &[int(1), rat(3, 2), rat(1, 2)]);
        assert_eq!(profile(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]).rv_winner(), 1);
        assert_eq!(profile(&[&[(0, 1), (1, 1)]]).rv_winner(), 2);
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(Profile::relaxed(vec![]).is_err());
        let a = Preference::new(vec![int(0), int(1)]).unwrap();
        let b = Preference::new(vec![int(0), int(1), int(1)]).unwrap();
        assert!(Profile::relaxed(vec![a.clone(), b]).is_err());
        let half = Preference::relaxed(vec![rat(1, 2), int(1)]).unwrap();
        assert!(Profile::new(vec![a.clone(), half.clone()]).is_err());
        assert!(Profile::relaxed(vec![a, half]).is_ok());
    }

    fn arb_profile(m: usize) -> impl Strategy<Value = Profile> {
        proptest::collection::vec(proptest::collection::vec(0i64..=8, m), 1..5).prop_map(
            move |rows| {
                Profile::relaxed(
                    rows.into_iter()
                        .map(|r| Preference::relaxed(r.into_iter().map(|l| rat(l, 8)).collect()).unwrap())
                        .collect(),
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn welfare_is_additive(u in arb_profile(4), v in arb_profile(4)) {
            let joined = u.concat(&v).unwrap();
            for j in 1..=4 {
                prop_assert_eq!(
                    joined.welfare(j).unwrap(),
                    &(u.welfare(j).unwrap() + v.welfare(j).unwrap())
                );
            }
        }

        #[test]
        fn welfare_is_bounded_by_n(u in arb_profile(3)) {
            for w in u.welfares() {
                prop_assert!(*w >= int(0) && *w <= int(u.n() as i64));
            }
        }
    }
}
