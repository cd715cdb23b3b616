//! Exhaustive checkers for truthfulness, ordinality, neutrality and anonymity
//! over finite grids of normalized preferences.
//!
//! A grid `(m, n, k)` is every profile of `n` voters whose utilities lie on
//! `{0, 1/k, ..., 1}` and attain both 0 and 1. A `holds` verdict only speaks
//! for that grid.
//!
//! Enumeration order is fixed so that the first witness is reproducible:
//! preferences are ordered lexicographically by their grid levels (candidate 1
//! most significant), profiles lexicographically by voter (voter 1 most
//! significant), and within a profile the checkers walk voters, then
//! misreports or permutations, in ascending lexicographic order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::distribution::CandidateDistribution;
use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::perm::{factorial, permutations};
use crate::preference::Preference;
use crate::profile::Profile;
use crate::rational::Rational;

/// Default cap on the number of elementary checks of one exhaustive run.
pub const DEFAULT_CHECK_BUDGET: u128 = 10_000_000;

/// Iterator over `R_k`: grid preferences containing both 0 and 1.
#[derive(Clone, Debug)]
pub struct RkGrid {
    k: u64,
    tie_free: bool,
    levels: Vec<u64>,
    done: bool,
}

impl Iterator for RkGrid {
    type Item = Preference;

    fn next(&mut self) -> Option<Preference> {
        while !self.done {
            let current = self.levels.clone();
            self.advance();
            if self.admits(&current) {
                return Some(Preference::from_levels(&current, self.k).expect("admitted levels are normalized"));
            }
        }
        None
    }
}

impl RkGrid {
    fn advance(&mut self) {
        for slot in self.levels.iter_mut().rev() {
            if *slot < self.k {
                *slot += 1;
                return;
            }
            *slot = 0;
        }
        self.done = true;
    }

    fn admits(&self, levels: &[u64]) -> bool {
        if !levels.contains(&0) || !levels.contains(&self.k) {
            return false;
        }
        if self.tie_free {
            let mut sorted = levels.to_vec();
            sorted.sort_unstable();
            return sorted.windows(2).all(|w| w[0] != w[1]);
        }
        true
    }
}

/// Every normalized preference on the `1/k` grid, lexicographically by level.
///
/// The ties-allowed grid has `(k+1)^m - 2k^m + (k-1)^m` members.
pub fn enumerate_rk_prefs(m: usize, k: u64, tie_free: bool) -> Result<RkGrid> {
    if m < 2 {
        return Err(Error::precondition("need m >= 2"));
    }
    if k == 0 {
        return Err(Error::precondition("need k >= 1"));
    }
    if tie_free && k + 1 < m as u64 {
        return Err(Error::precondition(alloc::format!(
            "a tie-free grid over {m} candidates needs k >= {}",
            m - 1
        )));
    }
    Ok(RkGrid {
        k,
        tie_free,
        levels: alloc::vec![0; m],
        done: false,
    })
}

/// `u ~ v`: identical ordering of candidates, ties included.
pub fn ordinal_equivalent(u: &Preference, v: &Preference) -> bool {
    u.ordinal_equivalent(v)
}

/// The `(m, n, k)` grid a checker enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridSpace {
    pub m: usize,
    pub n: usize,
    pub k: u64,
    pub tie_free: bool,
    pub budget: u128,
}

impl GridSpace {
    pub fn new(m: usize, n: usize, k: u64) -> Self {
        Self {
            m,
            n,
            k,
            tie_free: false,
            budget: DEFAULT_CHECK_BUDGET,
        }
    }

    pub fn tie_free(mut self) -> Self {
        self.tie_free = true;
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    /// All grid profiles, voter 1 most significant.
    pub fn profiles(&self) -> Result<ProfileGrid> {
        if self.n == 0 {
            return Err(Error::precondition("need n >= 1"));
        }
        let prefs: Vec<Preference> = enumerate_rk_prefs(self.m, self.k, self.tie_free)?.collect();
        let count = (prefs.len() as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX);
        Ok(ProfileGrid {
            prefs,
            n: self.n,
            count,
        })
    }
}

/// The `n`-fold product of a preference list.
#[derive(Clone, Debug)]
pub struct ProfileGrid {
    prefs: Vec<Preference>,
    n: usize,
    count: u128,
}

impl ProfileGrid {
    pub fn prefs(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn len(&self) -> u128 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let r = self.prefs.len();
        let mut digits = alloc::vec![0; self.n];
        for d in digits.iter_mut().rev() {
            *d = index % r;
            index /= r;
        }
        digits
    }

    fn index(&self, digits: &[usize]) -> usize {
        let r = self.prefs.len();
        digits.iter().fold(0, |acc, &d| acc * r + d)
    }

    fn profile(&self, digits: &[usize]) -> Profile {
        Profile::relaxed(digits.iter().map(|&d| self.prefs[d].clone()).collect()).expect("grid profile")
    }

    /// Iterates the profiles in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.count as usize).map(move |i| self.profile(&self.digits(i)))
    }

    fn evaluate_all(&self, mech: &Mechanism) -> Result<Vec<CandidateDistribution>> {
        self.iter().map(|u| mech.evaluate(&u)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Truthful,
    Ordinal,
    Neutral,
    Anonymous,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Truthful => "truthful",
            Property::Ordinal => "ordinal",
            Property::Neutral => "neutral",
            Property::Anonymous => "anonymous",
        }
    }
}

/// What an exhaustive run covered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpace {
    pub grid: GridSpace,
    pub preferences: usize,
    pub profiles: u128,
    pub checks: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Voter `voter` (1-based) gains `gain > 0` in expectation by reporting `misreport`.
    Manipulation {
        profile: Profile,
        voter: usize,
        misreport: Preference,
        honest_utility: Rational,
        misreport_utility: Rational,
        gain: Rational,
    },
    /// Ordinal-equivalent profiles with different outcomes.
    OrdinalPair {
        profile: Profile,
        other: Profile,
        distribution: CandidateDistribution,
        other_distribution: CandidateDistribution,
    },
    /// Relabeling candidates by `permutation` (1-based, `u_i ∘ σ`) did not relabel the outcome.
    Neutrality {
        profile: Profile,
        permutation: Vec<usize>,
        expected: Vec<Rational>,
        actual: CandidateDistribution,
    },
    /// Reordering voters by `permutation` (1-based) changed the outcome.
    Anonymity {
        profile: Profile,
        permutation: Vec<usize>,
        expected: CandidateDistribution,
        actual: CandidateDistribution,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Witness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub property: Property,
    pub mechanism: alloc::string::String,
    pub space: SearchSpace,
    pub verdict: Verdict,
}

impl WitnessReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Holds => None,
            Verdict::Violated(w) => Some(w),
        }
    }
}

impl Witness {
    /// Re-evaluates `mech` and confirms the stored violation, exactly.
    pub fn replay(&self, mech: &Mechanism) -> Result<bool> {
        Ok(match self {
            Witness::Manipulation {
                profile,
                voter,
                misreport,
                honest_utility,
                misreport_utility,
                gain,
            } => {
                let honest = profile.voter(*voter)?;
                let truthful = honest.expected_utility(mech.evaluate(profile)?.probs());
                let lied = honest.expected_utility(
                    mech.evaluate(&profile.with_voter(*voter, misreport.clone())?)?.probs(),
                );
                truthful == *honest_utility
                    && lied == *misreport_utility
                    && &lied - &truthful == *gain
                    && lied > truthful
            }
            Witness::OrdinalPair {
                profile,
                other,
                distribution,
                other_distribution,
            } => {
                let equivalent = profile.n() == other.n()
                    && profile
                        .prefs()
                        .iter()
                        .zip(other.prefs())
                        .all(|(a, b)| a.ordinal_equivalent(b));
                let a = mech.evaluate(profile)?;
                let b = mech.evaluate(other)?;
                equivalent && a == *distribution && b == *other_distribution && a != b
            }
            Witness::Neutrality {
                profile,
                permutation,
                expected,
                actual,
            } => {
                let sigma: Vec<usize> = permutation.iter().map(|j| j - 1).collect();
                let base = mech.evaluate(profile)?;
                let moved = mech.evaluate(&profile.permuted(&identity(profile.n()), &sigma))?;
                let want: Vec<Rational> = sigma.iter().map(|&s| base.probs()[s].clone()).collect();
                want == *expected && moved == *actual && moved.probs() != want.as_slice()
            }
            Witness::Anonymity {
                profile,
                permutation,
                expected,
                actual,
            } => {
                let pi: Vec<usize> = permutation.iter().map(|i| i - 1).collect();
                let base = mech.evaluate(profile)?;
                let moved = mech.evaluate(&profile.permuted(&pi, &identity(profile.m())))?;
                base == *expected && moved == *actual && base != moved
            }
        })
    }
}

fn identity(len: usize) -> Vec<usize> {
    (0..len).collect()
}

fn guard(space: &GridSpace, grid: &ProfileGrid, per_profile: u128) -> Result<u128> {
    let required = grid.len().saturating_mul(per_profile.max(1));
    if required > space.budget {
        return Err(Error::Budget {
            required,
            budget: space.budget,
        });
    }
    Ok(required)
}

fn report(property: Property, mech: &Mechanism, space: GridSpace, grid: &ProfileGrid, checks: u128, verdict: Verdict) -> WitnessReport {
    WitnessReport {
        property,
        mechanism: alloc::format!("{mech}"),
        space: SearchSpace {
            grid: space,
            preferences: grid.prefs().len(),
            profiles: grid.len(),
            checks,
        },
        verdict,
    }
}

/// No voter gains in expectation by misreporting any grid preference.
pub fn check_truthful(mech: &Mechanism, space: GridSpace) -> Result<WitnessReport> {
    let grid = space.profiles()?;
    let r = grid.prefs().len();
    let checks = guard(&space, &grid, (space.n * r) as u128)?;
    let outcomes = grid.evaluate_all(mech)?;
    for index in 0..outcomes.len() {
        let digits = grid.digits(index);
        for voter in 0..space.n {
            let honest = &grid.prefs()[digits[voter]];
            let truthful = honest.expected_utility(outcomes[index].probs());
            let mut alt = digits.clone();
            for lie in 0..r {
                if lie == digits[voter] {
                    continue;
                }
                alt[voter] = lie;
                let lied = honest.expected_utility(outcomes[grid.index(&alt)].probs());
                if lied > truthful {
                    let witness = Witness::Manipulation {
                        profile: grid.profile(&digits),
                        voter: voter + 1,
                        misreport: grid.prefs()[lie].clone(),
                        gain: &lied - &truthful,
                        honest_utility: truthful,
                        misreport_utility: lied,
                    };
                    return Ok(report(Property::Truthful, mech, space, &grid, checks, Verdict::Violated(witness)));
                }
            }
        }
    }
    Ok(report(Property::Truthful, mech, space, &grid, checks, Verdict::Holds))
}

/// Ordinal-equivalent grid profiles always receive identical distributions.
pub fn check_ordinal(mech: &Mechanism, space: GridSpace) -> Result<WitnessReport> {
    let grid = space.profiles()?;
    let checks = guard(&space, &grid, 1)?;
    let classes: Vec<Vec<usize>> = grid.prefs().iter().map(Preference::weak_order_key).collect();
    let outcomes = grid.evaluate_all(mech)?;
    let mut first_of_class: BTreeMap<Vec<&[usize]>, usize> = BTreeMap::new();
    for (index, outcome) in outcomes.iter().enumerate() {
        let digits = grid.digits(index);
        let key: Vec<&[usize]> = digits.iter().map(|&d| classes[d].as_slice()).collect();
        let rep = *first_of_class.entry(key).or_insert(index);
        if outcomes[rep] != *outcome {
            let witness = Witness::OrdinalPair {
                profile: grid.profile(&grid.digits(rep)),
                other: grid.profile(&digits),
                distribution: outcomes[rep].clone(),
                other_distribution: outcome.clone(),
            };
            return Ok(report(Property::Ordinal, mech, space, &grid, checks, Verdict::Violated(witness)));
        }
    }
    Ok(report(Property::Ordinal, mech, space, &grid, checks, Verdict::Holds))
}

/// Relabeling candidates relabels the outcome: `J(u ∘ σ)(j) = J(u)(σ(j))`.
pub fn check_neutral(mech: &Mechanism, space: GridSpace) -> Result<WitnessReport> {
    let grid = space.profiles()?;
    let perms = permutations(space.m);
    let checks = guard(&space, &grid, factorial(space.m))?;
    let lookup: BTreeMap<&Preference, usize> = grid.prefs().iter().enumerate().map(|(i, p)| (p, i)).collect();
    let outcomes = grid.evaluate_all(mech)?;
    for (index, outcome) in outcomes.iter().enumerate() {
        let digits = grid.digits(index);
        for sigma in perms.iter().skip(1) {
            let moved: Vec<usize> = digits
                .iter()
                .map(|&d| lookup[&grid.prefs()[d].compose(sigma)])
                .collect();
            let actual = &outcomes[grid.index(&moved)];
            let expected: Vec<Rational> = sigma.iter().map(|&s| outcome.probs()[s].clone()).collect();
            if actual.probs() != expected.as_slice() {
                let witness = Witness::Neutrality {
                    profile: grid.profile(&digits),
                    permutation: sigma.iter().map(|s| s + 1).collect(),
                    expected,
                    actual: actual.clone(),
                };
                return Ok(report(Property::Neutral, mech, space, &grid, checks, Verdict::Violated(witness)));
            }
        }
    }
    Ok(report(Property::Neutral, mech, space, &grid, checks, Verdict::Holds))
}

/// Reordering voters never changes the outcome.
pub fn check_anonymous(mech: &Mechanism, space: GridSpace) -> Result<WitnessReport> {
    let grid = space.profiles()?;
    let perms = permutations(space.n);
    let checks = guard(&space, &grid, factorial(space.n))?;
    let outcomes = grid.evaluate_all(mech)?;
    for (index, outcome) in outcomes.iter().enumerate() {
        let digits = grid.digits(index);
        for pi in perms.iter().skip(1) {
            let moved: Vec<usize> = pi.iter().map(|&i| digits[i]).collect();
            let actual = &outcomes[grid.index(&moved)];
            if actual != outcome {
                let witness = Witness::Anonymity {
                    profile: grid.profile(&digits),
                    permutation: pi.iter().map(|i| i + 1).collect(),
                    expected: outcome.clone(),
                    actual: actual.clone(),
                };
                return Ok(report(Property::Anonymous, mech, space, &grid, checks, Verdict::Violated(witness)));
            }
        }
    }
    Ok(report(Property::Anonymous, mech, space, &grid, checks, Verdict::Holds))
}

/// Dispatches on [`Property`].
pub fn check(property: Property, mech: &Mechanism, space: GridSpace) -> Result<WitnessReport> {
    match property {
        Property::Truthful => check_truthful(mech, space),
        Property::Ordinal => check_ordinal(mech, space),
        Property::Neutral => check_neutral(mech, space),
        Property::Anonymous => check_anonymous(mech, space),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use alloc::vec;

    /// Direct count without the lexicographic walker: all level vectors, filtered.
    fn brute_count(m: u32, k: u64, tie_free: bool) -> usize {
        let mut count = 0;
        for code in 0..(k + 1).pow(m) {
            let mut levels = Vec::new();
            let mut c = code;
            for _ in 0..m {
                levels.push(c % (k + 1));
                c /= k + 1;
            }
            let ok = levels.contains(&0) && levels.contains(&k);
            let distinct = {
                let mut s = levels.clone();
                s.sort_unstable();
                s.dedup();
                s.len() == levels.len()
            };
            if ok && (!tie_free || distinct) {
                count += 1;
            }
        }
        count
    }

    fn inclusion_exclusion(m: u32, k: u64) -> u64 {
        (k + 1).pow(m) + (k - 1).pow(m) - 2 * k.pow(m)
    }

    #[test]
    fn grid_counts() {
        let prefs: Vec<_> = enumerate_rk_prefs(2, 1, false).unwrap().collect();
        assert_eq!(prefs.len(), 2);
        assert_eq!(prefs[0].values(), &[int(0), int(1)]);
        assert_eq!(prefs[1].values(), &[int(1), int(0)]);
        assert_eq!(enumerate_rk_prefs(3, 2, false).unwrap().count(), 12);
        assert_eq!(enumerate_rk_prefs(3, 3, false).unwrap().count(), 18);
        for m in 2..=4u32 {
            for k in 1..=5u64 {
                let n = enumerate_rk_prefs(m as usize, k, false).unwrap().count();
                assert_eq!(n, brute_count(m, k, false));
                assert_eq!(n as u64, inclusion_exclusion(m, k));
                if k + 1 >= m as u64 {
                    let t = enumerate_rk_prefs(m as usize, k, true).unwrap().count();
                    assert_eq!(t, brute_count(m, k, true));
                }
            }
        }
        assert!(matches!(enumerate_rk_prefs(4, 2, true), Err(Error::Precondition(_))));
        assert!(enumerate_rk_prefs(3, 2, true).is_ok());
    }

    #[test]
    fn random_dictatorship_is_truthful_small() {
        let r = check_truthful(&Mechanism::TopQ(1), GridSpace::new(2, 2, 2)).unwrap();
        assert!(r.holds());
        assert_eq!(r.space.profiles, 4);
    }

    #[test]
    fn jstar_is_truthful_at_3_2_3() {
        let r = check_truthful(&Mechanism::JStar, GridSpace::new(3, 2, 3)).unwrap();
        assert!(r.holds());
        assert_eq!(r.space.preferences, 18);
        assert_eq!(r.space.checks, 18 * 18 * 2 * 18);
    }

    #[test]
    fn range_voting_is_manipulable() {
        let r = check_truthful(&Mechanism::RangeVoting, GridSpace::new(3, 2, 10)).unwrap();
        let w = r.witness().expect("range voting is not truthful");
        assert!(w.replay(&Mechanism::RangeVoting).unwrap());
        if let Witness::Manipulation { gain, .. } = w {
            assert!(*gain > int(0));
        }
    }

    #[test]
    fn hand_checked_range_voting_manipulation() {
        let honest = Profile::new(vec![
            Preference::from_levels(&[10, 9, 0], 10).unwrap(),
            Preference::from_levels(&[0, 10, 9], 10).unwrap(),
        ])
        .unwrap();
        let lie = Preference::from_levels(&[10, 0, 0], 10).unwrap();
        let witness = Witness::Manipulation {
            profile: honest,
            voter: 1,
            misreport: lie,
            honest_utility: rat(9, 10),
            misreport_utility: int(1),
            gain: rat(1, 10),
        };
        assert!(witness.replay(&Mechanism::RangeVoting).unwrap());
        assert!(!witness.replay(&Mechanism::TopQ(1)).unwrap());
    }

    #[test]
    fn ordinality() {
        let space = GridSpace::new(3, 2, 3);
        assert!(check_ordinal(&Mechanism::TopQ(1), space).unwrap().holds());
        for q in 1..=3 {
            assert!(check_ordinal(&Mechanism::PairwiseQuota(q), space).unwrap().holds());
        }
        let r = check_ordinal(&Mechanism::RangeVoting, GridSpace::new(3, 2, 4)).unwrap();
        let w = r.witness().expect("range voting is cardinal");
        assert!(w.replay(&Mechanism::RangeVoting).unwrap());
    }

    #[test]
    fn neutrality_and_anonymity() {
        let space = GridSpace::new(3, 2, 3);
        let sym = Mechanism::symmetrize(Mechanism::Constant(1), 3, 2).unwrap();
        assert!(check_neutral(&sym, space).unwrap().holds());
        assert!(check_anonymous(&sym, space).unwrap().holds());
        let tf = space.tie_free();
        assert!(check_neutral(&Mechanism::TopQ(1), tf).unwrap().holds());
        assert!(check_anonymous(&Mechanism::TopQ(1), tf).unwrap().holds());

        let r = check_neutral(&Mechanism::TopQ(1), space).unwrap();
        let w = r.witness().expect("name tie-break breaks neutrality");
        assert!(w.replay(&Mechanism::TopQ(1)).unwrap());

        let r = check_anonymous(&Mechanism::Constant(1), space).unwrap();
        assert!(r.holds());
        let dictator_one = Mechanism::RangeVoting;
        assert!(check_anonymous(&dictator_one, space).unwrap().holds());
    }

    #[test]
    fn tied_favorite_breaks_neutrality() {
        let u = Profile::new(vec![Preference::from_levels(&[1, 1, 0], 1).unwrap()]).unwrap();
        let witness = Witness::Neutrality {
            profile: u,
            permutation: vec![2, 1, 3],
            expected: vec![int(0), int(1), int(0)],
            actual: CandidateDistribution::point(3, 1).unwrap(),
        };
        assert!(witness.replay(&Mechanism::TopQ(1)).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let space = GridSpace::new(3, 3, 3).with_budget(1000);
        assert!(matches!(
            check_truthful(&Mechanism::TopQ(1), space),
            Err(Error::Budget { .. })
        ));
    }
}
