//! Profile files and JSON renderings of core values.
//!
//! Profiles are stored either as JSON,
//! `{"m": 3, "n": 2, "prefs": [[[1, 1], [1, 2], [0, 1]], ...]}` with one
//! `[numerator, denominator]` pair per utility, or as CSV with one voter per
//! row and `p/q` cells. The JSON reader also takes `"p/q"` strings and bare
//! integers as values. Unknown top-level keys are ignored.

use std::path::Path;

use cardvote_core::bounds::{Direction, Projection, ProjectionCase, Reduction};
use cardvote_core::properties::{Verdict, Witness, WitnessReport};
use cardvote_core::rational::{format_rational, parse_rational};
use cardvote_core::{CandidateDistribution, Preference, Profile, Rational};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::output::decimal;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn pair(v: &Rational) -> Result<Value> {
    let num = v.numer().to_i128().ok_or_else(|| format_err("numerator exceeds 128 bits"))?;
    let den = v.denom().to_i128().ok_or_else(|| format_err("denominator exceeds 128 bits"))?;
    Ok(json!([num, den]))
}

fn integer(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    if let Some(u) = v.as_u64() {
        return Ok(BigInt::from(u));
    }
    // serde_json keeps i128 values beyond 64 bits as their decimal text
    v.to_string()
        .parse::<BigInt>()
        .map_err(|_| format_err(format!("expected an integer, found {v}")))
}

fn value_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Array(parts) if parts.len() == 2 => {
            let den = integer(&parts[1])?;
            if den == BigInt::from(0) {
                return Err(format_err("zero denominator"));
            }
            Ok(Rational::new(integer(&parts[0])?, den))
        }
        Value::String(s) => parse_rational(s).ok_or_else(|| format_err(format!("bad rational `{s}`"))),
        Value::Number(_) => Ok(Rational::from_integer(integer(v)?)),
        other => Err(format_err(format!("expected [num, den], found {other}"))),
    }
}

fn build_profile(rows: Vec<Vec<Rational>>) -> Result<Profile> {
    let prefs = rows
        .into_iter()
        .map(Preference::relaxed)
        .collect::<cardvote_core::Result<Vec<_>>>()?;
    Ok(Profile::relaxed(prefs)?)
}

pub fn profile_to_json(u: &Profile) -> Result<Value> {
    let prefs = u
        .prefs()
        .iter()
        .map(|p| p.values().iter().map(pair).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({"m": u.m(), "n": u.n(), "prefs": prefs}))
}

pub fn profile_from_json_value(v: &Value) -> Result<Profile> {
    let rows = v
        .get("prefs")
        .and_then(Value::as_array)
        .ok_or_else(|| format_err("missing `prefs` array"))?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| format_err("each voter must be an array"))?
                .iter()
                .map(value_rational)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let u = build_profile(rows)?;
    for (key, actual) in [("m", u.m()), ("n", u.n())] {
        if let Some(declared) = v.get(key) {
            if declared.as_u64() != Some(actual as u64) {
                return Err(format_err(format!("declared {key} = {declared} but found {actual}")));
            }
        }
    }
    Ok(u)
}

pub fn profile_from_json(text: &str) -> Result<Profile> {
    profile_from_json_value(&serde_json::from_str(text)?)
}

pub fn profile_to_csv(u: &Profile) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for p in u.prefs() {
        w.write_record(p.values().iter().map(format_rational))?;
    }
    let bytes = w.into_inner().map_err(|e| format_err(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| format_err(e.to_string()))
}

/// Reads one voter per row; `#` lines are comments.
pub fn profile_from_csv(text: &str) -> Result<Profile> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        rows.push(
            record
                .iter()
                .map(|cell| parse_rational(cell).ok_or_else(|| format_err(format!("bad rational `{cell}`"))))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    build_profile(rows)
}

/// Loads a profile, choosing CSV for `.csv` files and JSON otherwise.
pub fn load_profile(path: &Path) -> Result<Profile> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        profile_from_csv(&text)
    } else {
        profile_from_json(&text)
    }
}

pub fn exact(v: &Rational) -> Value {
    Value::String(format_rational(v))
}

pub fn exact_all(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(exact).collect())
}

pub fn distribution_json(d: &CandidateDistribution) -> Value {
    exact_all(d.probs())
}

/// Profile as rows of exact strings, for embedding in reports.
pub fn profile_rows(u: &Profile) -> Value {
    Value::Array(u.prefs().iter().map(|p| exact_all(p.values())).collect())
}

pub fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Manipulation {
            profile,
            voter,
            misreport,
            honest_utility,
            misreport_utility,
            gain,
        } => json!({
            "kind": "manipulation",
            "profile": profile_rows(profile),
            "voter": voter,
            "misreport": exact_all(misreport.values()),
            "honest_utility": exact(honest_utility),
            "misreport_utility": exact(misreport_utility),
            "gain": exact(gain),
        }),
        Witness::OrdinalPair {
            profile,
            other,
            distribution,
            other_distribution,
        } => json!({
            "kind": "ordinal_pair",
            "profile": profile_rows(profile),
            "other": profile_rows(other),
            "distribution": distribution_json(distribution),
            "other_distribution": distribution_json(other_distribution),
        }),
        Witness::Neutrality {
            profile,
            permutation,
            expected,
            actual,
        } => json!({
            "kind": "neutrality",
            "profile": profile_rows(profile),
            "permutation": permutation,
            "expected": exact_all(expected),
            "actual": distribution_json(actual),
        }),
        Witness::Anonymity {
            profile,
            permutation,
            expected,
            actual,
        } => json!({
            "kind": "anonymity",
            "profile": profile_rows(profile),
            "permutation": permutation,
            "expected": distribution_json(expected),
            "actual": distribution_json(actual),
        }),
    }
}

pub fn witness_report_json(r: &WitnessReport) -> Value {
    let grid = &r.space.grid;
    json!({
        "property": r.property.name(),
        "mechanism": r.mechanism,
        "space": {
            "m": grid.m,
            "n": grid.n,
            "k": grid.k,
            "tie_free": grid.tie_free,
            "preferences": r.space.preferences,
            "profiles": r.space.profiles.to_string(),
            "checks": r.space.checks.to_string(),
        },
        "holds": r.holds(),
        "witness": match &r.verdict {
            Verdict::Holds => Value::Null,
            Verdict::Violated(w) => witness_json(w),
        },
    })
}

pub fn reduction_json(r: &Reduction) -> Result<Value> {
    let steps: Vec<Value> = r
        .steps
        .iter()
        .map(|s| {
            json!({
                "voter": s.voter,
                "block": [s.block.0, s.block.1],
                "direction": match s.direction { Direction::Left => "left", Direction::Right => "right" },
                "g_before": exact(&s.g_before),
                "g_after": exact(&s.g_after),
                "g_after_decimal": decimal(&s.g_after),
            })
        })
        .collect();
    Ok(json!({"profile": profile_to_json(&r.profile)?, "steps": steps}))
}

fn case_name(c: ProjectionCase) -> &'static str {
    match c {
        ProjectionCase::FavoriteIsOne => "favorite-is-one",
        ProjectionCase::NearTop => "near-top",
        ProjectionCase::LowButApproved => "low-but-approved",
        ProjectionCase::LowAndRejected => "low-and-rejected",
    }
}

pub fn projection_json(p: &Projection) -> Result<Value> {
    let steps: Vec<Value> = p
        .steps
        .iter()
        .map(|s| {
            json!({
                "voter": s.voter,
                "case": case_name(s.case),
                "before": exact_all(s.before.values()),
                "after": exact_all(s.after.values()),
            })
        })
        .collect();
    Ok(json!({"profile": profile_to_json(&p.profile)?, "steps": steps}))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cardvote_core::rational::{int, rat};

    #[test]
    fn json_accepts_pairs_strings_and_integers() {
        let u = profile_from_json(r#"{"m": 3, "prefs": [[[1, 1], "1/2", 0], ["0", [3, 4], 1]]}"#).unwrap();
        assert_eq!(u.prefs()[0].values(), &[int(1), rat(1, 2), int(0)]);
        assert_eq!(u.prefs()[1].values(), &[int(0), rat(3, 4), int(1)]);
    }

    #[test]
    fn json_rejects_inconsistent_headers() {
        assert!(profile_from_json(r#"{"m": 2, "prefs": [[0, 1, 1]]}"#).is_err());
        assert!(profile_from_json(r#"{"prefs": [[[1, 0], 1]]}"#).is_err());
        assert!(profile_from_json(r#"{"prefs": [[2, 1]]}"#).is_err());
        assert!(profile_from_json(r#"{"n": 1}"#).is_err());
    }

    #[test]
    fn csv_skips_comments() {
        let u = profile_from_csv("# two voters\n1, 1/2, 0\n0,1,1/3\n").unwrap();
        assert_eq!(u.n(), 2);
        assert_eq!(u.prefs()[1].values()[2], rat(1, 3));
        assert!(profile_from_csv("1,x\n").is_err());
    }
}
