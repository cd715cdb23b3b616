//! Voting schemes as exact maps from profiles to lotteries.
//!
//! Spec strings (used by the CLI and by [`Mechanism`]'s `Display`/`FromStr`):
//!
//! | string                | scheme |
//! |-----------------------|--------|
//! | `rv`                  | range voting (lowest index wins welfare ties) |
//! | `j1:<q>`              | random voter, then uniform over that voter's top `q` |
//! | `j2:<q>`              | random candidate pair, pairwise vote with quota `q`, coin flip otherwise |
//! | `jstar`               | `1/2 j1:1 + 1/2 j1:⌊m^{1/3}⌋`, `m` taken from the profile |
//! | `const:<j>`           | always candidate `j` |
//! | `mix:<w>*<s>+<w>*<s>` | convex combination; nested mixes go in parentheses |
//! | `sym:<s>`             | average of `<s>` over all voter and candidate relabelings |

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::distribution::CandidateDistribution;
use crate::error::{Error, Result};
use crate::perm::{factorial, permutations};
use crate::profile::Profile;
use crate::rational::{cube_root_floor, format_rational, parse_rational, Rational};

/// Default cap on `n! · m!` for [`Mechanism::symmetrize`].
pub const DEFAULT_SYMMETRIZE_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Mechanism {
    RangeVoting,
    /// `J^{1,q}`.
    TopQ(usize),
    /// `J^{2,q}`.
    PairwiseQuota(usize),
    /// `J*` with `⌊m^{1/3}⌋` read from the profile being evaluated.
    JStar,
    /// Always elects the given candidate (1-based).
    Constant(usize),
    Mix(Vec<(Rational, Mechanism)>),
    Symmetrized { inner: Box<Mechanism>, budget: u128 },
}

impl Mechanism {
    pub fn range_voting() -> Self {
        Mechanism::RangeVoting
    }

    pub fn j1q(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::precondition("j1q needs q >= 1"));
        }
        Ok(Mechanism::TopQ(q))
    }

    /// `J^{2,q}`. Quotas outside `⌊n/2⌋+1 ..= n+1` are accepted; see
    /// [`PairwiseTally::distribution`] for how they behave.
    pub fn j2q(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::precondition("j2q needs q >= 1"));
        }
        Ok(Mechanism::PairwiseQuota(q))
    }

    /// The explicit mixture `1/2 J^{1,1} + 1/2 J^{1,⌊m^{1/3}⌋}` for a fixed `m`.
    pub fn j_star(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::precondition("j_star needs m >= 2"));
        }
        let half = Rational::new(1.into(), 2.into());
        Self::mix(alloc::vec![
            (half.clone(), Mechanism::TopQ(1)),
            (half, Mechanism::TopQ(cube_root_floor(m))),
        ])
    }

    /// `J*` resolved against each profile's own `m`.
    pub fn jstar() -> Self {
        Mechanism::JStar
    }

    pub fn constant(j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::precondition("candidates are 1-based"));
        }
        Ok(Mechanism::Constant(j))
    }

    /// Convex combination; weights must be non-negative and sum to exactly 1.
    pub fn mix(parts: Vec<(Rational, Mechanism)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Weight("empty mixture".into()));
        }
        if parts.iter().any(|(w, _)| w.is_negative()) {
            return Err(Error::Weight("negative weight".into()));
        }
        let total: Rational = parts.iter().map(|(w, _)| w).sum();
        if !total.is_one() {
            return Err(Error::Weight(alloc::format!(
                "weights sum to {}",
                format_rational(&total)
            )));
        }
        Ok(Mechanism::Mix(parts))
    }

    /// Symmetrization over all `n!·m!` relabelings, checked against the default budget.
    pub fn symmetrize(inner: Mechanism, m: usize, n: usize) -> Result<Self> {
        Self::symmetrize_with_budget(inner, m, n, DEFAULT_SYMMETRIZE_BUDGET)
    }

    pub fn symmetrize_with_budget(inner: Mechanism, m: usize, n: usize, budget: u128) -> Result<Self> {
        check_symmetrize_budget(m, n, budget)?;
        Ok(Mechanism::Symmetrized {
            inner: Box::new(inner),
            budget,
        })
    }

    /// Whether the scheme is known to be truthful (used to pick test subjects).
    pub fn claimed_truthful(&self) -> bool {
        match self {
            Mechanism::RangeVoting => false,
            Mechanism::TopQ(_)
            | Mechanism::PairwiseQuota(_)
            | Mechanism::JStar
            | Mechanism::Constant(_) => true,
            Mechanism::Mix(parts) => parts.iter().all(|(_, m)| m.claimed_truthful()),
            Mechanism::Symmetrized { inner, .. } => inner.claimed_truthful(),
        }
    }

    /// Whether the output depends only on each voter's ordering.
    pub fn claimed_ordinal(&self) -> bool {
        match self {
            Mechanism::RangeVoting => false,
            Mechanism::TopQ(_)
            | Mechanism::PairwiseQuota(_)
            | Mechanism::JStar
            | Mechanism::Constant(_) => true,
            Mechanism::Mix(parts) => parts.iter().all(|(_, m)| m.claimed_ordinal()),
            Mechanism::Symmetrized { inner, .. } => inner.claimed_ordinal(),
        }
    }

    pub fn evaluate(&self, u: &Profile) -> Result<CandidateDistribution> {
        match self {
            Mechanism::RangeVoting => CandidateDistribution::point(u.m(), u.rv_winner()),
            Mechanism::TopQ(q) => top_q_distribution(u, *q),
            Mechanism::PairwiseQuota(q) => PairwiseTally::new(u).distribution(*q),
            Mechanism::JStar => {
                let k = cube_root_floor(u.m());
                let favorite = top_q_distribution(u, 1)?;
                let top_k = top_q_distribution(u, k)?;
                let half = Rational::new(1.into(), 2.into());
                let probs = favorite
                    .probs()
                    .iter()
                    .zip(top_k.probs())
                    .map(|(a, b)| (a + b) * &half)
                    .collect();
                Ok(CandidateDistribution::from_raw(probs))
            }
            Mechanism::Constant(j) => CandidateDistribution::point(u.m(), *j),
            Mechanism::Mix(parts) => {
                let mut probs = alloc::vec![Rational::zero(); u.m()];
                for (w, mech) in parts {
                    let d = mech.evaluate(u)?;
                    if w.is_zero() {
                        continue;
                    }
                    for (acc, p) in probs.iter_mut().zip(d.probs()) {
                        *acc += w * p;
                    }
                }
                Ok(CandidateDistribution::from_raw(probs))
            }
            Mechanism::Symmetrized { inner, budget } => symmetrized_distribution(inner, u, *budget),
        }
    }
}

/// Draws a winner of `mech` on `u` from a generator seeded with `seed`.
pub fn sample(mech: &Mechanism, u: &Profile, seed: u64) -> Result<usize> {
    Ok(mech.evaluate(u)?.sample(seed))
}

fn check_symmetrize_budget(m: usize, n: usize, budget: u128) -> Result<()> {
    let required = factorial(n).saturating_mul(factorial(m));
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(())
}

fn top_q_distribution(u: &Profile, q: usize) -> Result<CandidateDistribution> {
    if q == 0 || q > u.m() {
        return Err(Error::Index {
            what: "top-q size",
            index: q,
            bound: u.m(),
        });
    }
    let mut counts = alloc::vec![0u64; u.m()];
    for pref in u.prefs() {
        for &c in &pref.order0()[..q] {
            counts[c] += 1;
        }
    }
    Ok(CandidateDistribution::from_counts(&counts, (u.n() * q) as u64))
}

fn symmetrized_distribution(inner: &Mechanism, u: &Profile, budget: u128) -> Result<CandidateDistribution> {
    let (m, n) = (u.m(), u.n());
    check_symmetrize_budget(m, n, budget)?;
    let voter_perms = permutations(n);
    let mut acc = alloc::vec![Rational::zero(); m];
    for tau in permutations(m) {
        let relabeled: Vec<_> = u.prefs().iter().map(|p| p.compose(&tau)).collect();
        for sigma in &voter_perms {
            let prefs = sigma.iter().map(|&i| relabeled[i].clone()).collect();
            let d = inner.evaluate(&Profile::relaxed(prefs)?)?;
            // candidate j of the relabeled profile is candidate tau[j] of u
            for (j, p) in d.probs().iter().enumerate() {
                acc[tau[j]] += p;
            }
        }
    }
    let total = Rational::from_integer((factorial(n) * factorial(m)).into());
    Ok(CandidateDistribution::from_raw(
        acc.into_iter().map(|p| p / &total).collect(),
    ))
}

/// Pairwise vote counts of a profile, shared by every quota of `J^{2,q}`.
#[derive(Clone, Debug)]
pub struct PairwiseTally {
    m: usize,
    n: usize,
    // prefer[a * m + b]: voters ranking a above b under the strict order
    prefer: Vec<u32>,
}

impl PairwiseTally {
    pub fn new(u: &Profile) -> Self {
        let m = u.m();
        let mut prefer = alloc::vec![0u32; m * m];
        let mut position = alloc::vec![0usize; m];
        for pref in u.prefs() {
            for (pos, &c) in pref.order0().iter().enumerate() {
                position[c] = pos;
            }
            for a in 0..m {
                for b in (a + 1)..m {
                    if position[a] < position[b] {
                        prefer[a * m + b] += 1;
                    } else {
                        prefer[b * m + a] += 1;
                    }
                }
            }
        }
        Self { m, n: u.n(), prefer }
    }

    /// Voters preferring `a` to `b` (both 1-based, distinct).
    pub fn votes(&self, a: usize, b: usize) -> u32 {
        self.prefer[(a - 1) * self.m + (b - 1)]
    }

    /// Distribution of `J^{2,q}`.
    ///
    /// A candidate reaching the quota takes the pair. For quotas at most `n/2`
    /// both may reach it; the one with more votes then wins, and an exact tie
    /// falls back to the coin flip.
    pub fn distribution(&self, q: usize) -> Result<CandidateDistribution> {
        let m = self.m;
        if m < 2 {
            return Err(Error::Index {
                what: "candidate count",
                index: m,
                bound: 2,
            });
        }
        if q == 0 {
            return Err(Error::precondition("quota must be at least 1"));
        }
        let q = q as u64;
        // half-pair units: a pair won outright is worth 2, a coin flip 1 each
        let mut units = alloc::vec![0u64; m];
        for a in 0..m {
            for b in (a + 1)..m {
                let va = self.prefer[a * m + b] as u64;
                let vb = self.prefer[b * m + a] as u64;
                debug_assert_eq!(va + vb, self.n as u64);
                match (va >= q, vb >= q) {
                    (true, false) => units[a] += 2,
                    (false, true) => units[b] += 2,
                    (true, true) if va > vb => units[a] += 2,
                    (true, true) if vb > va => units[b] += 2,
                    _ => {
                        units[a] += 1;
                        units[b] += 1;
                    }
                }
            }
        }
        Ok(CandidateDistribution::from_counts(&units, (m * (m - 1)) as u64))
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::RangeVoting => write!(f, "rv"),
            Mechanism::TopQ(q) => write!(f, "j1:{q}"),
            Mechanism::PairwiseQuota(q) => write!(f, "j2:{q}"),
            Mechanism::JStar => write!(f, "jstar"),
            Mechanism::Constant(j) => write!(f, "const:{j}"),
            Mechanism::Mix(parts) => {
                write!(f, "mix:")?;
                for (i, (w, mech)) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    if matches!(mech, Mechanism::Mix(_)) {
                        write!(f, "{}*({mech})", format_rational(w))?;
                    } else {
                        write!(f, "{}*{mech}", format_rational(w))?;
                    }
                }
                Ok(())
            }
            Mechanism::Symmetrized { inner, .. } => write!(f, "sym:{inner}"),
        }
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_spec(s.trim())
    }
}

fn parse_error(token: &str, reason: &str) -> Error {
    Error::Parse {
        token: token.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_spec(s: &str) -> Result<Mechanism> {
    if let Some(inner) = strip_parens(s) {
        return parse_spec(inner.trim());
    }
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (s, None),
    };
    let positive = |arg: Option<&str>| -> Result<usize> {
        let a = arg.ok_or_else(|| parse_error(s, "missing numeric argument"))?;
        match a.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(parse_error(a, "expected a positive integer")),
        }
    };
    match head.trim() {
        "rv" if arg.is_none() => Ok(Mechanism::RangeVoting),
        "jstar" if arg.is_none() => Ok(Mechanism::JStar),
        "j1" => Ok(Mechanism::TopQ(positive(arg)?)),
        "j2" => Ok(Mechanism::PairwiseQuota(positive(arg)?)),
        "const" => Ok(Mechanism::Constant(positive(arg)?)),
        "sym" => {
            let inner = arg.ok_or_else(|| parse_error(s, "missing inner spec"))?;
            Ok(Mechanism::Symmetrized {
                inner: Box::new(parse_spec(inner.trim())?),
                budget: DEFAULT_SYMMETRIZE_BUDGET,
            })
        }
        "mix" => {
            let body = arg.ok_or_else(|| parse_error(s, "missing mixture terms"))?;
            let mut parts = Vec::new();
            for term in split_top_level(body, '+').map_err(|t| parse_error(&t, "unbalanced parentheses"))? {
                let (w, spec) = term
                    .split_once('*')
                    .ok_or_else(|| parse_error(term, "expected <weight>*<spec>"))?;
                let weight = parse_rational(w).ok_or_else(|| parse_error(w, "not a rational weight"))?;
                parts.push((weight, parse_spec(spec.trim())?));
            }
            Mechanism::mix(parts)
        }
        _ => Err(parse_error(head, "unknown mechanism")),
    }
}

/// The contents of `s` if it is a single parenthesized group.
fn strip_parens(s: &str) -> Option<&str> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    (depth == 0).then_some(inner)
}

fn split_top_level(s: &str, sep: char) -> core::result::Result<Vec<&str>, String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(s[..=i].to_string());
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(s.to_string());
    }
    parts.push(&s[start..]);
    Ok(parts)
}
