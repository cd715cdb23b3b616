//! Parameter sweeps behind the `experiment` subcommands.

use cardvote_core::bounds::{lower_bound_experiment, LowerBoundRow};
use cardvote_core::generators::{gen_cyclic, gen_negative};
use cardvote_core::mechanisms::PairwiseTally;
use cardvote_core::rational::format_rational;
use cardvote_core::welfare::ratio_of;
use cardvote_core::{Mechanism, Profile, Rational};
use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::Result;
use crate::formats::exact;
use crate::output::{decimal, float_decimal, Report, Table};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QSelection {
    /// `1..=m` for `J^{1,q}`, `⌊n/2⌋+1..=n+1` for `J^{2,q}`.
    All,
    List(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeRow {
    pub m: usize,
    pub n: usize,
    pub mechanism: Mechanism,
    pub q: usize,
    /// Whether `q` lies in the mechanism's standard range.
    pub in_range: bool,
    pub ratio: Rational,
}

/// Ratios of every `J^{1,q}` and `J^{2,q}` on the adversarial profile for each `m`.
pub fn negative_experiment(ms: &[usize], qs: &QSelection) -> Result<Vec<NegativeRow>> {
    let mut rows = Vec::new();
    for &m in ms {
        let u = gen_negative(m, 1)?;
        let n = u.n();
        let j2_range = n / 2 + 1..=n + 1;
        let (j1_qs, j2_qs): (Vec<usize>, Vec<usize>) = match qs {
            QSelection::All => ((1..=m).collect(), j2_range.clone().collect()),
            QSelection::List(list) => (
                list.iter().copied().filter(|&q| (1..=m).contains(&q)).collect(),
                list.iter().copied().filter(|&q| q >= 1).collect(),
            ),
        };
        for q in j1_qs {
            let mechanism = Mechanism::TopQ(q);
            let ratio = ratio_of(&mechanism.evaluate(&u)?, &u)?;
            rows.push(NegativeRow { m, n, mechanism, q, in_range: true, ratio });
        }
        let tally = PairwiseTally::new(&u);
        for q in j2_qs {
            let ratio = ratio_of(&tally.distribution(q)?, &u)?;
            rows.push(NegativeRow {
                m,
                n,
                mechanism: Mechanism::PairwiseQuota(q),
                q,
                in_range: j2_range.contains(&q),
                ratio,
            });
        }
    }
    Ok(rows)
}

/// `m^{-2/3}` as a float.
pub fn reference(m: usize) -> f64 {
    (m as f64).powf(-2.0 / 3.0)
}

pub fn negative_report(rows: &[NegativeRow]) -> Report {
    let mut table = Table::new(["m", "n", "mechanism", "q", "in_range", "ratio", "ratio_exact", "reference"]);
    let mut json_rows = Vec::new();
    for r in rows {
        table.push(vec![
            r.m.to_string(),
            r.n.to_string(),
            r.mechanism.to_string(),
            r.q.to_string(),
            r.in_range.to_string(),
            decimal(&r.ratio),
            format_rational(&r.ratio),
            float_decimal(reference(r.m)),
        ]);
        json_rows.push(json!({
            "m": r.m,
            "n": r.n,
            "mechanism": r.mechanism.to_string(),
            "q": r.q,
            "in_range": r.in_range,
            "ratio": exact(&r.ratio),
            "ratio_decimal": decimal(&r.ratio),
            "reference": reference(r.m),
        }));
    }
    Report {
        json: json!({"rows": json_rows}),
        table,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicRow {
    pub m: usize,
    pub star: usize,
    pub eps: Rational,
    pub ratio: Rational,
    /// `1/m + m²·eps`.
    pub bound: Rational,
    /// Voterwise ordinal equivalence with the `star = 1` profile.
    pub same_orderings: bool,
}

/// `J*` on every cyclic profile of each size; `eps` defaults to `1/m³`.
pub fn cyclic_experiment(ms: &[usize], eps: Option<&Rational>) -> Result<Vec<CyclicRow>> {
    let mut rows = Vec::new();
    for &m in ms {
        let big_m = BigInt::from(m);
        let eps = eps
            .cloned()
            .unwrap_or_else(|| Rational::new(BigInt::one(), big_m.pow(3)));
        let bound = Rational::new(BigInt::one(), big_m.clone()) + Rational::from_integer(big_m.pow(2)) * &eps;
        let first = gen_cyclic(m, 1, &eps)?;
        for star in 1..=m {
            let u = gen_cyclic(m, star, &eps)?;
            rows.push(CyclicRow {
                m,
                star,
                eps: eps.clone(),
                ratio: ratio_of(&Mechanism::JStar.evaluate(&u)?, &u)?,
                bound: bound.clone(),
                same_orderings: same_orderings(&first, &u),
            });
        }
    }
    Ok(rows)
}

fn same_orderings(a: &Profile, b: &Profile) -> bool {
    a.n() == b.n() && a.prefs().iter().zip(b.prefs()).all(|(x, y)| x.ordinal_equivalent(y))
}

pub fn cyclic_report(rows: &[CyclicRow]) -> Report {
    let mut table = Table::new([
        "m",
        "star",
        "eps",
        "ratio",
        "ratio_exact",
        "bound",
        "bound_exact",
        "same_orderings",
    ]);
    let mut json_rows = Vec::new();
    for r in rows {
        table.push(vec![
            r.m.to_string(),
            r.star.to_string(),
            format_rational(&r.eps),
            decimal(&r.ratio),
            format_rational(&r.ratio),
            decimal(&r.bound),
            format_rational(&r.bound),
            r.same_orderings.to_string(),
        ]);
        json_rows.push(json!({
            "m": r.m,
            "star": r.star,
            "eps": exact(&r.eps),
            "ratio": exact(&r.ratio),
            "bound": exact(&r.bound),
            "same_orderings": r.same_orderings,
        }));
    }
    Report {
        json: json!({"rows": json_rows}),
        table,
    }
}

/// The lower-bound sweep for seeds `seed..seed + seeds`.
pub fn lower_experiment(m: usize, n: usize, k: u64, step: usize, seed: u64, seeds: u64) -> Result<Vec<LowerBoundRow>> {
    let seed_list: Vec<u64> = (seed..seed + seeds).collect();
    Ok(lower_bound_experiment(m, n, k, step, &seed_list)?)
}

pub fn lower_report(rows: &[LowerBoundRow]) -> Report {
    let mut table = Table::new([
        "a",
        "b",
        "c",
        "seed",
        "gbar",
        "gbar_exact",
        "bound",
        "bound_exact",
        "slack",
        "slack_exact",
    ]);
    let mut json_rows: Vec<Value> = Vec::new();
    for r in rows {
        let slack = r.slack();
        table.push(vec![
            r.a.to_string(),
            r.b.to_string(),
            r.c.to_string(),
            r.seed.to_string(),
            decimal(&r.gbar),
            format_rational(&r.gbar),
            decimal(&r.bound),
            format_rational(&r.bound),
            decimal(&slack),
            format_rational(&slack),
        ]);
        json_rows.push(json!({
            "a": r.a,
            "b": r.b,
            "c": r.c,
            "seed": r.seed,
            "gbar": exact(&r.gbar),
            "bound": exact(&r.bound),
            "slack": exact(&slack),
        }));
    }
    Report {
        json: json!({"rows": json_rows}),
        table,
    }
}

/// Largest ratio per `m` over the given rows, in order of first appearance.
pub fn max_ratio_by_m(rows: &[NegativeRow]) -> Vec<(usize, Rational)> {
    let mut out: Vec<(usize, Rational)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|(m, _)| *m == r.m) {
            Some((_, best)) if r.ratio > *best => *best = r.ratio.clone(),
            Some(_) => {}
            None => out.push((r.m, r.ratio.clone())),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cardvote_core::rational::rat;

    #[test]
    fn negative_rows_cover_both_families() {
        let rows = negative_experiment(&[8], &QSelection::All).unwrap();
        let n = gen_negative(8, 1).unwrap().n();
        let j1 = rows.iter().filter(|r| matches!(r.mechanism, Mechanism::TopQ(_))).count();
        let j2 = rows.iter().filter(|r| matches!(r.mechanism, Mechanism::PairwiseQuota(_))).count();
        assert_eq!((j1, j2), (8, n + 1 - n / 2));
        assert!(rows.iter().all(|r| r.in_range));
        let picked = negative_experiment(&[8], &QSelection::List(vec![1, 100])).unwrap();
        assert_eq!(picked.len(), 3);
        assert!(!picked[2].in_range);
    }

    #[test]
    fn cyclic_rows_default_eps() {
        let rows = cyclic_experiment(&[3], None).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.eps == rat(1, 27) && r.same_orderings));
        assert_eq!(rows[0].bound, rat(1, 3) + rat(9, 27));
    }

    #[test]
    fn max_by_m_keeps_order() {
        let rows = negative_experiment(&[8, 9], &QSelection::List(vec![1, 2])).unwrap();
        let best = max_ratio_by_m(&rows);
        assert_eq!(best.iter().map(|p| p.0).collect::<Vec<_>>(), vec![8, 9]);
        for (m, r) in best {
            assert!(rows.iter().filter(|x| x.m == m).all(|x| x.ratio <= r));
        }
    }
}
