//! Grid classification of preferences, the `g`/`ḡ` functionals of `J*`, the
//! block-sliding and projection reductions, the closed-form lower bound and a
//! brute-force minimum-ratio search.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::distribution::CandidateDistribution;
use crate::error::{Error, Result};
use crate::generators::{gen_dk, two_block_preference, DkClass, DkParams};
use crate::mechanisms::Mechanism;
use crate::preference::Preference;
use crate::profile::Profile;
use crate::rational::{cube_root_floor, from_usize, Rational};
use crate::welfare::ratio_of;

/// A grid preference together with every quantity the reductions read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedPref {
    pub pref: Preference,
    pub k: u64,
    /// `levels[j] = k · u(j)`.
    pub levels: Vec<u64>,
    /// Distinct levels in the image, ascending.
    pub image: Vec<u64>,
    /// Number of `t ∈ 0..k` where exactly one of `t/k`, `(t+1)/k` is in the image.
    pub a_value: usize,
    /// `ū(j) = [u(j) > 1/2]`.
    pub bar: Vec<bool>,
    pub count: usize,
    /// `rank(j) = #{j' : u(j') ≥ u(j)}`, 1-based candidates mapped 0-based.
    pub ranks: Vec<usize>,
    /// Candidates (1-based) of rank 1.
    pub s_top: Vec<usize>,
    /// Candidates (1-based) of rank `2..=⌊m^{1/3}⌋`.
    pub s_next: Vec<usize>,
    pub in_c_k: bool,
    pub dk_class: Option<DkClass>,
}

impl ClassifiedPref {
    pub fn in_d_k(&self) -> bool {
        self.dk_class.is_some()
    }

    /// `S(u)`: the only part of a voter that `J*` reads.
    pub fn s_pair(&self) -> (&[usize], &[usize]) {
        (&self.s_top, &self.s_next)
    }
}

fn grid_levels(u: &Preference, k: u64) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::Grid("k must be positive".into()));
    }
    let scale = BigInt::from(k);
    u.values()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let scaled = v * &scale;
            if !scaled.is_integer() {
                return Err(Error::Grid(alloc::format!("u({}) = {v} is not a multiple of 1/{k}", j + 1)));
            }
            u64::try_from(scaled.to_integer())
                .ok()
                .filter(|&l| l <= k)
                .ok_or_else(|| Error::Grid(alloc::format!("u({}) = {v} is outside [0, 1]", j + 1)))
        })
        .collect()
}

/// Classifies a member of `R_k`; values off the `1/k` grid or a missing 0 or 1
/// give [`Error::Grid`].
pub fn classify(u: &Preference, k: u64) -> Result<ClassifiedPref> {
    let levels = grid_levels(u, k)?;
    if !levels.contains(&0) || !levels.contains(&k) {
        return Err(Error::Grid("a grid preference must attain both 0 and 1".into()));
    }
    let m = u.m();
    let mut present = alloc::vec![false; k as usize + 1];
    for &l in &levels {
        present[l as usize] = true;
    }
    let image: Vec<u64> = (0..=k).filter(|&t| present[t as usize]).collect();
    let a_value = (0..k as usize).filter(|&t| present[t] != present[t + 1]).count();
    let bar: Vec<bool> = levels.iter().map(|&l| 2 * l > k).collect();
    let count = bar.iter().filter(|&&b| b).count();
    let ranks: Vec<usize> = levels
        .iter()
        .map(|&l| levels.iter().filter(|&&o| o >= l).count())
        .collect();
    let top_k = cube_root_floor(m);
    let s_top = (1..=m).filter(|&j| ranks[j - 1] == 1).collect();
    let s_next = (1..=m).filter(|&j| (2..=top_k).contains(&ranks[j - 1])).collect();
    let in_c_k = a_value == 2;
    let dk_class = if !in_c_k {
        None
    } else if count <= 2 && bar[0] {
        Some(DkClass::A)
    } else if count == 1 && ranks[0] > top_k {
        Some(DkClass::B)
    } else if count == top_k + 1 && ranks[0] == top_k + 1 {
        Some(DkClass::C)
    } else {
        None
    };
    Ok(ClassifiedPref {
        pref: u.clone(),
        k,
        levels,
        image,
        a_value,
        bar,
        count,
        ranks,
        s_top,
        s_next,
        in_c_k,
        dk_class,
    })
}

/// `E[Σ_i u_i(J*(u))] / Σ_i u_i(1)`: the welfare ratio of `J*` with candidate 1
/// standing in for the range-voting winner.
pub fn g_value(u: &Profile) -> Result<Rational> {
    let denom = u.welfare(1)?;
    if denom.is_zero() {
        return Err(Error::UndefinedRatio);
    }
    Ok(Mechanism::JStar.evaluate(u)?.expectation(u.welfares()) / denom)
}

/// `g` with every utility replaced by its threshold indicator `ū`.
pub fn gbar_value(u: &Profile) -> Result<Rational> {
    let dist = Mechanism::JStar.evaluate(u)?;
    gbar_with(&dist, u)
}

fn bar_welfare(u: &Profile) -> Vec<u64> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut counts = alloc::vec![0u64; u.m()];
    for pref in u.prefs() {
        for (j, v) in pref.values().iter().enumerate() {
            if *v > half {
                counts[j] += 1;
            }
        }
    }
    counts
}

fn gbar_with(dist: &CandidateDistribution, u: &Profile) -> Result<Rational> {
    let counts = bar_welfare(u);
    if counts[0] == 0 {
        return Err(Error::UndefinedRatio);
    }
    let values: Vec<Rational> = counts.iter().map(|&c| Rational::from_integer(c.into())).collect();
    Ok(dist.expectation(&values) / Rational::from_integer(counts[0].into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// One grid step of one interior block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlideStep {
    /// 1-based voter.
    pub voter: usize,
    /// Block levels `(lo, hi)` before the step.
    pub block: (u64, u64),
    pub direction: Direction,
    pub g_before: Rational,
    pub g_after: Rational,
    pub pref_after: Preference,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub profile: Profile,
    pub steps: Vec<SlideStep>,
}

/// Lowest maximal run of occupied levels that touches neither 0 nor `k`.
fn lowest_interior_block(levels: &[u64], k: u64) -> Option<(u64, u64)> {
    let mut present = alloc::vec![false; k as usize + 2];
    for &l in levels {
        present[l as usize] = true;
    }
    let mut t = 1;
    while t < k {
        if present[t as usize] && !present[t as usize - 1] {
            let mut end = t;
            while present[end as usize + 1] {
                end += 1;
            }
            if end < k {
                return Some((t, end));
            }
            return None;
        }
        t += 1;
    }
    None
}

/// Slides interior blocks of grid voters until every voter is in `C_k`.
///
/// Repeatedly takes the first voter whose image has an interior block, and
/// moves that voter's lowest interior block one grid step toward whichever side
/// gives the smaller `g` (left on ties) until it merges with a neighbor. No
/// step changes any voter's ordering, so the `J*` lottery is fixed throughout.
pub fn reduce_to_ck(u: &Profile, k: u64) -> Result<Reduction> {
    if !u.is_tie_free() {
        return Err(Error::precondition("reduction needs tie-free voters"));
    }
    let mut levels: Vec<Vec<u64>> = u
        .prefs()
        .iter()
        .map(|p| classify(p, k).map(|c| c.levels))
        .collect::<Result<_>>()?;
    if u.welfare(1)?.is_zero() {
        return Err(Error::UndefinedRatio);
    }
    let dist = Mechanism::JStar.evaluate(u)?;
    let probs = dist.probs();
    // welfare in grid units: numerator Σ_j p_j W_j, denominator W_1
    let mut welfare: Vec<BigInt> = (0..u.m())
        .map(|j| levels.iter().map(|l| BigInt::from(l[j])).sum())
        .collect();
    let g_of = |w: &[BigInt]| -> Rational {
        let num: Rational = probs
            .iter()
            .zip(w)
            .map(|(p, x)| p * Rational::from_integer(x.clone()))
            .sum();
        num / Rational::from_integer(w[0].clone())
    };

    let mut steps = Vec::new();
    let mut prefs: Vec<Preference> = u.prefs().to_vec();
    while let Some((voter, (lo, hi))) = levels
        .iter()
        .enumerate()
        .find_map(|(i, l)| lowest_interior_block(l, k).map(|b| (i, b)))
    {
        let members: Vec<usize> = (0..u.m()).filter(|&j| (lo..=hi).contains(&levels[voter][j])).collect();
        let g_before = g_of(&welfare);
        let shifted = |delta: i64| {
            let mut w = welfare.clone();
            for &j in &members {
                w[j] += delta;
            }
            w
        };
        let (left, right) = (shifted(-1), shifted(1));
        let (g_left, g_right) = (g_of(&left), g_of(&right));
        let (direction, w, g_after) = if g_left <= g_right {
            (Direction::Left, left, g_left)
        } else {
            (Direction::Right, right, g_right)
        };
        welfare = w;
        for &j in &members {
            match direction {
                Direction::Left => levels[voter][j] -= 1,
                Direction::Right => levels[voter][j] += 1,
            }
        }
        let pref_after = Preference::from_levels(&levels[voter], k)?;
        debug_assert_eq!(pref_after.order0(), prefs[voter].order0());
        prefs[voter] = pref_after.clone();
        steps.push(SlideStep {
            voter: voter + 1,
            block: (lo, hi),
            direction,
            g_before,
            g_after,
            pref_after,
        });
    }
    Ok(Reduction {
        profile: Profile::new(prefs)?,
        steps,
    })
}

/// Which replacement rule produced a projected voter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionCase {
    /// Candidate 1 is the favorite: keep the order, top block `{1}`.
    FavoriteIsOne,
    /// Candidate 1 ranked `2..=⌊m^{1/3}⌋`: favorite then 1 form the top block.
    NearTop,
    /// Candidate 1 ranked lower but above 1/2: moved to rank `⌊m^{1/3}⌋ + 1`, closing the top block.
    LowButApproved,
    /// Candidate 1 ranked lower and at most 1/2: keep the order, top block = favorite.
    LowAndRejected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionStep {
    /// 1-based voter.
    pub voter: usize,
    pub case: ProjectionCase,
    pub before: Preference,
    pub after: Preference,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub profile: Profile,
    pub steps: Vec<ProjectionStep>,
}

/// Replaces every `C_k` voter outside `D_k` by a two-block voter in `D_k` with
/// the same `S(u)`, weakly more approval for candidate 1 and weakly less for
/// everyone else. Voters already in `D_k` are kept as they are.
pub fn project_to_dk(u: &Profile, k: u64) -> Result<Projection> {
    let m = u.m();
    if k < 4 * m as u64 {
        return Err(Error::precondition("projection needs k >= 4m"));
    }
    if !u.is_tie_free() {
        return Err(Error::precondition("projection needs tie-free voters"));
    }
    let top_k = cube_root_floor(m);
    let mut prefs = Vec::with_capacity(u.n());
    let mut steps = Vec::new();
    for (i, pref) in u.prefs().iter().enumerate() {
        let c = classify(pref, k)?;
        if !c.in_c_k {
            return Err(Error::precondition(alloc::format!("voter {} is not in C_k", i + 1)));
        }
        if c.in_d_k() {
            prefs.push(pref.clone());
            continue;
        }
        let order = pref.order0();
        let rank_one = c.ranks[0];
        let (case, new_order, top): (ProjectionCase, Vec<usize>, usize) = if rank_one == 1 {
            (ProjectionCase::FavoriteIsOne, order.to_vec(), 1)
        } else if rank_one <= top_k {
            let mut o = alloc::vec![order[0], 0];
            o.extend(order[1..].iter().filter(|&&j| j != 0));
            (ProjectionCase::NearTop, o, 2)
        } else if c.bar[0] {
            let mut o: Vec<usize> = order[..top_k].to_vec();
            o.push(0);
            o.extend(order[top_k..].iter().filter(|&&j| j != 0));
            (ProjectionCase::LowButApproved, o, top_k + 1)
        } else {
            (ProjectionCase::LowAndRejected, order.to_vec(), 1)
        };
        let after = two_block_preference(&new_order, top, k);
        steps.push(ProjectionStep {
            voter: i + 1,
            case,
            before: pref.clone(),
            after: after.clone(),
        });
        prefs.push(after);
    }
    let profile = Profile::new(prefs)?;
    if bar_welfare(&profile)[0] == 0 {
        return Err(Error::DegenerateProjection);
    }
    Ok(Projection { profile, steps })
}

/// `a/(2n·K) + b²/(2n(m-1)(a+c)) + c²·K/(2n(m-1)(a+c))` with `K = ⌊m^{1/3}⌋`.
pub fn lower_bound_formula(a: usize, b: usize, c: usize, n: usize, m: usize) -> Result<Rational> {
    if a + b + c != n {
        return Err(Error::precondition("need a + b + c = n"));
    }
    if a + c == 0 {
        return Err(Error::precondition("need a + c >= 1"));
    }
    if m < 8 {
        return Err(Error::precondition("the bound is stated for m >= 8"));
    }
    let big = |x: usize| BigInt::from(x);
    let top_k = big(cube_root_floor(m));
    let two_n = big(2 * n);
    let tail = &two_n * big(m - 1) * big(a + c);
    Ok(Rational::new(big(a), &two_n * &top_k)
        + Rational::new(big(b * b), tail.clone())
        + Rational::new(big(c * c) * &top_k, tail))
}

/// One `(a, b, c, seed)` point of the lower-bound experiment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundRow {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub seed: u64,
    pub gbar: Rational,
    pub bound: Rational,
}

impl LowerBoundRow {
    pub fn slack(&self) -> Rational {
        &self.gbar - &self.bound
    }
}

/// Evaluates `ḡ` of seeded `D_k` profiles against the closed-form bound for
/// every `(a, b, c)` with `a, b` on multiples of `step`, `c = n - a - b` and `a + c ≥ 1`.
pub fn lower_bound_experiment(m: usize, n: usize, k: u64, step: usize, seeds: &[u64]) -> Result<Vec<LowerBoundRow>> {
    if step == 0 {
        return Err(Error::precondition("grid step must be positive"));
    }
    let mut rows = Vec::new();
    for a in (0..=n).step_by(step) {
        for b in (0..=n - a).step_by(step) {
            let c = n - a - b;
            if a + c == 0 {
                continue;
            }
            let bound = lower_bound_formula(a, b, c, n, m)?;
            for &seed in seeds {
                let u = gen_dk(&DkParams::new(m, k, a, b, c), seed)?;
                rows.push(LowerBoundRow {
                    a,
                    b,
                    c,
                    seed,
                    gbar: gbar_value(&u)?,
                    bound: bound.clone(),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinRatio {
    pub profile: Profile,
    pub ratio: Rational,
    /// Profiles examined, including those with undefined ratio.
    pub visited: usize,
}

/// Smallest exact ratio over at most `budget` members of `family`.
///
/// Profiles with zero range-voting welfare are skipped. Ties go to the
/// lexicographically smallest profile, so the result does not depend on the
/// order of the family.
pub fn min_ratio_search(
    mech: &Mechanism,
    family: impl IntoIterator<Item = Profile>,
    budget: usize,
) -> Result<MinRatio> {
    let mut best: Option<(Rational, Profile)> = None;
    let mut visited = 0;
    for u in family.into_iter().take(budget) {
        visited += 1;
        let r = match ratio_of(&mech.evaluate(&u)?, &u) {
            Ok(r) => r,
            Err(Error::UndefinedRatio) => continue,
            Err(e) => return Err(e),
        };
        let better = match &best {
            None => true,
            Some((br, bp)) => r < *br || (r == *br && u.prefs() < bp.prefs()),
        };
        if better {
            best = Some((r, u));
        }
    }
    best.map(|(ratio, profile)| MinRatio { profile, ratio, visited })
        .ok_or_else(|| Error::precondition("the family has no profile with a defined ratio"))
}

/// `(m-1)/k`: how far a `C_k` utility can sit from its indicator when `k > 2(m-1)`.
pub fn block_gap(m: usize, k: u64) -> Rational {
    from_usize(m - 1) / Rational::from_integer(BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_grid_profile, TopShape};
    use crate::properties::enumerate_rk_prefs;
    use crate::rational::{int, rat};
    use crate::welfare::ratio;
    use alloc::vec;
    use proptest::prelude::*;

    fn pref(levels: &[u64], k: u64) -> Preference {
        Preference::from_levels(levels, k).unwrap()
    }

    #[test]
    fn classify_small_examples() {
        let c = classify(&pref(&[0, 3, 4], 4), 4).unwrap();
        assert_eq!(c.a_value, 2);
        assert!(c.in_c_k);
        assert_eq!(c.bar, vec![false, true, true]);
        assert_eq!(c.count, 2);
        let c = classify(&pref(&[0, 1, 4], 4), 4).unwrap();
        assert_eq!((c.a_value, c.in_c_k), (2, true));
        let c = classify(&pref(&[0, 2, 4], 4), 4).unwrap();
        assert_eq!((c.a_value, c.in_c_k), (4, false));
        let c = classify(&pref(&[0, 2], 2), 2).unwrap();
        assert_eq!((c.a_value, c.count, c.bar.clone()), (2, 1, vec![false, true]));
        assert_eq!(c.image, vec![0, 2]);
    }

    #[test]
    fn classify_rejects_off_grid() {
        let u = Preference::new(vec![int(0), rat(1, 3), int(1)]).unwrap();
        assert!(matches!(classify(&u, 4), Err(Error::Grid(_))));
        let u = Preference::relaxed(vec![rat(1, 4), int(1), rat(1, 2)]).unwrap();
        assert!(matches!(classify(&u, 4), Err(Error::Grid(_))));
    }

    /// Direct XOR count, independent of `classify`.
    fn xor_count(levels: &[u64], k: u64) -> usize {
        (0..k).filter(|t| levels.contains(t) != levels.contains(&(t + 1))).count()
    }

    #[test]
    fn a_value_is_even_and_positive_on_small_grids() {
        for k in 3..=5 {
            for u in enumerate_rk_prefs(3, k, false).unwrap() {
                let c = classify(&u, k).unwrap();
                assert_eq!(c.a_value, xor_count(&c.levels, k));
                assert!(c.a_value >= 2 && c.a_value % 2 == 0, "{:?}", c.levels);
                // C_k: image is a bottom run from 0 and a top run to k
                let bottom = (0..).take_while(|t| c.levels.contains(t)).count() as u64;
                let top = (0..=k).rev().take_while(|t| c.levels.contains(t)).count() as u64;
                let runs_only = c.levels.iter().all(|&l| l < bottom || l > k - top);
                assert_eq!(c.in_c_k, runs_only, "{:?}", c.levels);
            }
        }
    }

    #[test]
    fn rank_counts_ties_from_above() {
        let c = classify(&pref(&[4, 4, 0, 2], 4), 4).unwrap();
        assert_eq!(c.ranks, vec![2, 2, 4, 3]);
        assert!(c.s_top.is_empty());
    }

    #[test]
    fn gbar_for_singleton_tops() {
        for (m, top_k) in [(8usize, 2i64), (27, 3), (30, 3)] {
            let u = gen_dk(&DkParams::new(m, 64 * m as u64, 5, 0, 0).with_shape(TopShape::Singleton), 3).unwrap();
            assert_eq!(gbar_value(&u).unwrap(), rat(1, 2) + rat(1, 2 * top_k));
        }
        let u = gen_dk(&DkParams::new(8, 512, 2, 0, 0).with_shape(TopShape::Singleton), 0).unwrap();
        assert_eq!(gbar_value(&u).unwrap(), rat(3, 4));
    }

    #[test]
    fn g_and_gbar_single_voter() {
        let u = Profile::new(vec![pref(&[16, 15, 0, 0, 0, 0, 0, 0], 16)]).unwrap();
        assert_eq!(g_value(&u).unwrap(), rat(63, 64));
        assert_eq!(gbar_value(&u).unwrap(), int(1));
        assert!(gbar_value(&u).unwrap() - g_value(&u).unwrap() <= block_gap(8, 16) * int(2));
        let zero = Profile::new(vec![pref(&[0, 16, 5], 16)]).unwrap();
        assert_eq!(g_value(&zero), Err(Error::UndefinedRatio));
        assert_eq!(gbar_value(&zero), Err(Error::UndefinedRatio));
    }

    #[test]
    fn reduce_example_block_in_the_middle() {
        let u = Profile::new(vec![pref(&[10, 4, 5, 0], 10)]).unwrap();
        let before = g_value(&u).unwrap();
        let r = reduce_to_ck(&u, 10).unwrap();
        let out = &r.profile;
        assert!(classify(&out.prefs()[0], 10).unwrap().in_c_k);
        assert!(g_value(out).unwrap() <= before);
        // the two terminal positions of the block, by hand
        let low = Profile::new(vec![pref(&[10, 1, 2, 0], 10)]).unwrap();
        let high = Profile::new(vec![pref(&[10, 8, 9, 0], 10)]).unwrap();
        let best = core::cmp::min(g_value(&low).unwrap(), g_value(&high).unwrap());
        assert_eq!(g_value(out).unwrap(), best);
        assert_eq!(r.steps.len(), 3);
    }

    #[test]
    fn reduce_is_identity_on_ck() {
        let u = gen_dk(&DkParams::new(8, 64, 2, 1, 1), 5).unwrap();
        let r = reduce_to_ck(&u, 64).unwrap();
        assert!(r.steps.is_empty());
        assert_eq!(r.profile, u);
    }

    #[test]
    fn projection_cases() {
        let k = 64;
        // favorite is 1 with a wide top block
        let u = two_block_preference(&[0, 3, 1, 2, 4, 5, 6, 7], 5, k);
        let p = project_to_dk(&Profile::new(vec![u.clone()]).unwrap(), k).unwrap();
        assert_eq!(p.steps[0].case, ProjectionCase::FavoriteIsOne);
        let v = classify(&p.profile.prefs()[0], k).unwrap();
        assert_eq!((v.dk_class, v.count), (Some(DkClass::A), 1));
        assert_eq!(v.pref.order0(), u.order0());

        // 1 ranked below ⌊8^{1/3}⌋ = 2, not approved, count 3
        let u = two_block_preference(&[4, 2, 3, 0, 1, 5, 6, 7], 3, k);
        let other = two_block_preference(&[0, 1, 2, 3, 4, 5, 6, 7], 1, k);
        let p = project_to_dk(&Profile::new(vec![u, other.clone()]).unwrap(), k).unwrap();
        assert_eq!(p.steps.len(), 1);
        assert_eq!(p.steps[0].case, ProjectionCase::LowAndRejected);
        let v = classify(&p.profile.prefs()[0], k).unwrap();
        assert_eq!((v.dk_class, v.s_top.clone()), (Some(DkClass::B), vec![5]));
        assert_eq!(p.profile.prefs()[1], other);

        let lone = two_block_preference(&[4, 2, 3, 0, 1, 5, 6, 7], 3, k);
        assert_eq!(
            project_to_dk(&Profile::new(vec![lone]).unwrap(), k),
            Err(Error::DegenerateProjection)
        );
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_formula(7, 0, 0, 7, 8).unwrap(), rat(1, 4));
        assert_eq!(lower_bound_formula(0, 9, 1, 10, 8).unwrap(), rat(83, 140));
        assert!(lower_bound_formula(0, 10, 0, 10, 8).is_err());
        assert!(lower_bound_formula(1, 1, 1, 4, 8).is_err());
        assert!(lower_bound_formula(1, 0, 0, 1, 7).is_err());
    }

    #[test]
    fn min_ratio_examples() {
        let grid: Vec<Profile> = crate::properties::GridSpace::new(2, 2, 2).profiles().unwrap().iter().collect();
        assert_eq!(grid.len(), 4);
        let rv = min_ratio_search(&Mechanism::RangeVoting, grid.clone(), 100).unwrap();
        assert_eq!((rv.ratio, rv.visited), (int(1), 4));
        // brute force over the four profiles
        let best = grid.iter().map(|u| ratio(&Mechanism::JStar, u).unwrap()).min().unwrap();
        assert_eq!(best, int(1));
        let found = min_ratio_search(&Mechanism::JStar, grid.clone(), 100).unwrap();
        assert_eq!(found.ratio, best);
        let mut reversed = grid.clone();
        reversed.reverse();
        assert_eq!(min_ratio_search(&Mechanism::JStar, reversed, 100).unwrap().profile, found.profile);
        assert!(min_ratio_search(&Mechanism::JStar, Vec::new(), 100).is_err());

        let neg = crate::generators::gen_negative(27, 1).unwrap();
        let single = min_ratio_search(&Mechanism::TopQ(1), vec![neg.clone()], 1).unwrap();
        assert_eq!(single.ratio, ratio(&Mechanism::TopQ(1), &neg).unwrap());
    }

    fn check_chain(u: &Profile, k: u64) -> core::result::Result<(), TestCaseError> {
        let r = reduce_to_ck(u, k).unwrap();
        let mut current = u.clone();
        for step in &r.steps {
            current = current.with_voter(step.voter, step.pref_after.clone()).unwrap();
            prop_assert_eq!(g_value(&current).unwrap(), step.g_after.clone());
            prop_assert!(step.g_after <= step.g_before);
        }
        prop_assert_eq!(&current, &r.profile);
        prop_assert!(r.profile.prefs().iter().all(|p| classify(p, k).unwrap().in_c_k));
        prop_assert_eq!(Mechanism::JStar.evaluate(&r.profile).unwrap(), Mechanism::JStar.evaluate(u).unwrap());
        prop_assert!(g_value(&r.profile).unwrap() <= g_value(u).unwrap());

        let before = gbar_value(&r.profile).ok();
        match project_to_dk(&r.profile, k) {
            Ok(p) => {
                prop_assert!(p.profile.prefs().iter().all(|v| classify(v, k).unwrap().in_d_k()));
                for step in &p.steps {
                    let old = classify(&step.before, k).unwrap();
                    let new = classify(&step.after, k).unwrap();
                    prop_assert_eq!(old.s_pair(), new.s_pair());
                    prop_assert!(new.bar[0] >= old.bar[0]);
                    prop_assert!((1..u.m()).all(|j| new.bar[j] <= old.bar[j]));
                }
                if let Some(before) = before {
                    prop_assert!(gbar_value(&p.profile).unwrap() <= before);
                }
                prop_assert_eq!(Mechanism::JStar.evaluate(&p.profile).unwrap(), Mechanism::JStar.evaluate(u).unwrap());
            }
            Err(e) => prop_assert_eq!(e, Error::DegenerateProjection),
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn chain_invariants_hold(seed in 0u64..10_000, n in 1usize..5) {
            let u = random_grid_profile(8, n, 64, true, seed).unwrap();
            prop_assume!(!u.welfare(1).unwrap().is_zero());
            check_chain(&u, 64)?;
        }

        #[test]
        fn g_matches_ratio_when_one_wins(seed in 0u64..10_000) {
            let raw = random_grid_profile(5, 3, 20, true, seed).unwrap();
            let mut swap: Vec<usize> = (0..5).collect();
            swap.swap(0, raw.rv_winner() - 1);
            let u = raw.permuted(&[0, 1, 2], &swap);
            prop_assert_eq!(u.rv_winner(), 1);
            prop_assert_eq!(ratio(&Mechanism::JStar, &u).unwrap(), g_value(&u).unwrap());
        }

        #[test]
        fn gbar_respects_closed_form_bound(seed in 0u64..1000, a in 0usize..6, b in 0usize..6, c in 0usize..6) {
            prop_assume!(a + c >= 1);
            for m in [8usize, 27] {
                let u = gen_dk(&DkParams::new(m, 64 * m as u64, a, b, c), seed).unwrap();
                prop_assert!(gbar_value(&u).unwrap() >= lower_bound_formula(a, b, c, a + b + c, m).unwrap());
            }
        }

        #[test]
        fn block_geometry(seed in 0u64..1000) {
            let u = gen_dk(&DkParams::new(8, 64, 2, 2, 2), seed).unwrap();
            for p in u.prefs() {
                let c = classify(p, 64).unwrap();
                for (v, b) in p.values().iter().zip(&c.bar) {
                    let indicator = if *b { int(1) } else { int(0) };
                    let gap = if *v > indicator { v - &indicator } else { &indicator - v };
                    prop_assert!(gap <= block_gap(8, 64));
                }
            }
        }
    }
}
