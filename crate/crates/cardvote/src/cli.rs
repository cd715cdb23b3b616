//! Command-line front end.
//!
//! Every run is determined by its arguments; the parsed configuration is echoed
//! at the top of each report. Exit code 0 means success, 2 a property
//! violation (the witness is in the report), 1 an error.

use std::path::PathBuf;

use cardvote_core::bounds::{min_ratio_search, project_to_dk, reduce_to_ck};
use cardvote_core::generators::{gen_cyclic, gen_dk, gen_negative, random_grid_profile, DkParams, TopShape};
use cardvote_core::properties::{check, GridSpace, Property, DEFAULT_CHECK_BUDGET};
use cardvote_core::rational::{format_rational, parse_rational};
use cardvote_core::welfare::ratio_of;
use cardvote_core::{Mechanism, Profile, Rational, WelfareReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::{
    cyclic_experiment, cyclic_report, lower_experiment, lower_report, negative_experiment, negative_report, QSelection,
};
use crate::fit::{fit_slope, read_points_where};
use crate::formats::{
    distribution_json, exact, exact_all, load_profile, profile_rows, profile_to_csv, profile_to_json,
    projection_json, reduction_json, witness_report_json,
};
use crate::output::{decimal, float_decimal, Format, Report, Table};

#[derive(Parser, Debug)]
#[command(name = "cardvote", version, about = "Exact welfare analysis of randomized cardinal voting schemes")]
pub struct Cli {
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output format; experiments default to csv, everything else to json
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Cap on enumerated profiles or visited family members
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Outcome lottery, welfare and ratio of a mechanism on a profile
    Eval(MechProfile),
    /// Welfare ratio only
    Ratio(MechProfile),
    /// Generate a profile
    #[command(subcommand)]
    Gen(GenKind),
    /// Exhaustively check a property over a grid
    Verify(VerifyArgs),
    /// Parameter sweeps
    #[command(subcommand)]
    Experiment(ExperimentKind),
    /// Slide interior blocks until every voter has one bottom and one top block
    Reduce(GridProfile),
    /// Replace voters by structured two-block voters with the same top data
    Project(GridProfile),
    /// Lower-bound tools
    #[command(subcommand)]
    Bounds(BoundsKind),
    /// Log-log least-squares slope of a CSV column pair
    Fit(FitArgs),
}

#[derive(Args, Debug)]
pub struct MechProfile {
    /// Mechanism spec: rv, j1:q, j2:q, jstar, const:j, mix:w*spec+..., sym:spec
    #[arg(long)]
    pub mech: String,
    /// Profile file (.json or .csv)
    #[arg(long)]
    pub profile: PathBuf,
}

#[derive(Args, Debug)]
pub struct GridProfile {
    #[arg(long)]
    pub profile: PathBuf,
    #[arg(long)]
    pub k: u64,
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Adversarial profile against ordinal truthful schemes
    Negative {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Structured two-block profile with a, b, c voters of each class
    Dk {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        c: usize,
        /// Class-(a) voters approve only candidate 1
        #[arg(long)]
        singleton: bool,
        /// Accepted for symmetry with other generators; must equal a + b + c
        #[arg(long)]
        n: Option<usize>,
    },
    /// Cyclic profile without normalization
    Cyclic {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        star: usize,
        #[arg(long)]
        eps: String,
    },
    /// Random grid profile
    Grid {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        tie_free: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PropertyArg {
    Truthful,
    Ordinal,
    Neutral,
    Anonymous,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Truthful => Property::Truthful,
            PropertyArg::Ordinal => Property::Ordinal,
            PropertyArg::Neutral => Property::Neutral,
            PropertyArg::Anonymous => Property::Anonymous,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub property: PropertyArg,
    #[arg(long)]
    pub mech: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: u64,
    #[arg(long)]
    pub tie_free: bool,
}

#[derive(Args, Debug)]
pub struct LowerArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: u64,
    /// Step of the (a, b) grid; defaults to ⌈n/10⌉
    #[arg(long)]
    pub grid_step: Option<usize>,
    /// Seeds per point, counting up from --seed
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentKind {
    /// Ratios of J^{1,q} and J^{2,q} on adversarial profiles
    Negative {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        /// `all` or a comma list of quotas
        #[arg(long, default_value = "all")]
        qs: String,
    },
    /// Structured profiles against the closed-form lower bound
    Lower(LowerArgs),
    /// J* on cyclic profiles
    Cyclic {
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        /// Defaults to 1/m³
        #[arg(long)]
        eps: Option<String>,
    },
    /// Smallest ratio over an exhaustive grid
    Minratio {
        #[arg(long)]
        mech: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        tie_free: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum BoundsKind {
    /// Same as `experiment lower`
    LowerExperiment(LowerArgs),
    /// Same as top-level `reduce`
    Reduce(GridProfile),
    /// Same as top-level `project`
    Project(GridProfile),
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// CSV with a header row
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "m")]
    pub x: String,
    #[arg(long, default_value = "ratio")]
    pub y: String,
    /// Keep only rows where `column=value`
    #[arg(long)]
    pub filter: Option<String>,
}

/// Rendered report plus whether it records a property violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub violation: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.violation {
            2
        } else {
            0
        }
    }
}

fn mechanism(spec: &str) -> Result<Mechanism> {
    Ok(spec.parse::<Mechanism>()?)
}

fn rational_arg(text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| Error::Format(format!("bad rational `{text}`")))
}

fn profile_report(u: &Profile) -> Result<Report> {
    let mut table = Table::new((1..=u.m()).map(|j| format!("u{j}")));
    for p in u.prefs() {
        table.push(p.values().iter().map(format_rational).collect());
    }
    Ok(Report {
        json: profile_to_json(u)?,
        table,
    })
}

fn eval_report(mech: &Mechanism, u: &Profile) -> Result<Report> {
    let dist = mech.evaluate(u)?;
    let ratio = match ratio_of(&dist, u) {
        Ok(r) => Some(r),
        Err(cardvote_core::Error::UndefinedRatio) => None,
        Err(e) => return Err(e.into()),
    };
    let mut table = Table::new(["candidate", "probability", "probability_exact", "welfare", "welfare_exact"]);
    for (j, (p, w)) in dist.probs().iter().zip(u.welfares()).enumerate() {
        table.push(vec![(j + 1).to_string(), decimal(p), format_rational(p), decimal(w), format_rational(w)]);
    }
    let expected = dist.expectation(u.welfares());
    let json = json!({
        "mechanism": mech.to_string(),
        "m": u.m(),
        "n": u.n(),
        "distribution": distribution_json(&dist),
        "welfare": exact_all(u.welfares()),
        "rv_winner": u.rv_winner(),
        "rv_welfare": exact(u.rv_welfare()),
        "expected_welfare": exact(&expected),
        "ratio": ratio.as_ref().map(exact),
        "ratio_decimal": ratio.as_ref().map(decimal),
    });
    Ok(Report { json, table })
}

fn ratio_report(mech: &Mechanism, u: &Profile) -> Result<Report> {
    let r = WelfareReport::compute(mech, u)?;
    let mut table = Table::new(["mechanism", "ratio", "ratio_exact"]);
    table.push(vec![mech.to_string(), decimal(&r.ratio), format_rational(&r.ratio)]);
    Ok(Report {
        json: json!({"mechanism": mech.to_string(), "ratio": exact(&r.ratio), "ratio_decimal": decimal(&r.ratio)}),
        table,
    })
}

fn reduce_report(args: &GridProfile) -> Result<Report> {
    let u = load_profile(&args.profile)?;
    let r = reduce_to_ck(&u, args.k)?;
    let mut table = Table::new(["voter", "block_lo", "block_hi", "direction", "g_before", "g_after"]);
    for s in &r.steps {
        table.push(vec![
            s.voter.to_string(),
            s.block.0.to_string(),
            s.block.1.to_string(),
            format!("{:?}", s.direction).to_lowercase(),
            format_rational(&s.g_before),
            format_rational(&s.g_after),
        ]);
    }
    Ok(Report {
        json: reduction_json(&r)?,
        table,
    })
}

fn project_report(args: &GridProfile) -> Result<Report> {
    let u = load_profile(&args.profile)?;
    let p = project_to_dk(&u, args.k)?;
    let json = projection_json(&p)?;
    let mut table = Table::new(["voter", "case", "before", "after"]);
    for (s, j) in p.steps.iter().zip(json["steps"].as_array().into_iter().flatten()) {
        table.push(vec![
            s.voter.to_string(),
            j["case"].as_str().unwrap_or_default().to_string(),
            p_join(s.before.values()),
            p_join(s.after.values()),
        ]);
    }
    Ok(Report { json, table })
}

fn p_join(values: &[Rational]) -> String {
    values.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}

fn lower_run(args: &LowerArgs, seed: u64) -> Result<Report> {
    let step = args.grid_step.unwrap_or(args.n.div_ceil(10).max(1));
    let rows = lower_experiment(args.m, args.n, args.k, step, seed, args.seeds)?;
    Ok(lower_report(&rows))
}

fn fit_report(args: &FitArgs) -> Result<Report> {
    let text = std::fs::read_to_string(&args.input)?;
    let filter = match &args.filter {
        Some(f) => Some(
            f.split_once('=')
                .ok_or_else(|| Error::Format(format!("filter `{f}` is not column=value")))?,
        ),
        None => None,
    };
    let fit = fit_slope(&read_points_where(&text, &args.x, &args.y, filter)?)?;
    let mut table = Table::new(["slope", "intercept", "residual"]);
    table.push(vec![
        float_decimal(fit.slope),
        float_decimal(fit.intercept),
        float_decimal(fit.residual),
    ]);
    Ok(Report {
        json: json!({"slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual}),
        table,
    })
}

/// Executes one parsed command line and renders its report.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let config = format!(
        "seed={} budget={:?} command={:?}",
        cli.seed, cli.budget, cli.command
    );
    let mut violation = false;
    let mut default_format = Format::Json;
    let report = match &cli.command {
        Command::Eval(a) => eval_report(&mechanism(&a.mech)?, &load_profile(&a.profile)?)?,
        Command::Ratio(a) => ratio_report(&mechanism(&a.mech)?, &load_profile(&a.profile)?)?,
        Command::Gen(kind) => {
            let u = match kind {
                GenKind::Negative { m, repeat } => gen_negative(*m, *repeat)?,
                GenKind::Dk { m, k, a, b, c, singleton, n } => {
                    if n.is_some_and(|n| n != a + b + c) {
                        return Err(Error::Data("n must equal a + b + c".into()));
                    }
                    let shape = if *singleton { TopShape::Singleton } else { TopShape::Random };
                    gen_dk(&DkParams::new(*m, *k, *a, *b, *c).with_shape(shape), cli.seed)?
                }
                GenKind::Cyclic { m, star, eps } => gen_cyclic(*m, *star, &rational_arg(eps)?)?,
                GenKind::Grid { m, n, k, tie_free } => random_grid_profile(*m, *n, *k, *tie_free, cli.seed)?,
            };
            if cli.format.is_some_and(|f| matches!(f, FormatArg::Csv)) {
                // CSV profiles stay loadable: comment line, then one voter per row
                let text = format!("# config: {config}\n{}", profile_to_csv(&u)?);
                return Ok(Outcome { text, violation });
            }
            profile_report(&u)?
        }
        Command::Verify(a) => {
            let mech = mechanism(&a.mech)?;
            let mut space = GridSpace::new(a.m, a.n, a.k).with_budget(cli.budget.unwrap_or(DEFAULT_CHECK_BUDGET));
            if a.tie_free {
                space = space.tie_free();
            }
            let report = check(a.property.into(), &mech, space)?;
            violation = !report.holds();
            let mut table = Table::new(["property", "mechanism", "m", "n", "k", "holds", "profiles", "checks"]);
            table.push(vec![
                report.property.name().into(),
                report.mechanism.clone(),
                a.m.to_string(),
                a.n.to_string(),
                a.k.to_string(),
                report.holds().to_string(),
                report.space.profiles.to_string(),
                report.space.checks.to_string(),
            ]);
            Report {
                json: witness_report_json(&report),
                table,
            }
        }
        Command::Experiment(kind) => {
            default_format = Format::Csv;
            match kind {
                ExperimentKind::Negative { m, qs } => {
                    let selection = if qs == "all" {
                        QSelection::All
                    } else {
                        QSelection::List(
                            qs.split(',')
                                .map(|q| q.trim().parse().map_err(|_| Error::Format(format!("bad quota `{q}`"))))
                                .collect::<Result<_>>()?,
                        )
                    };
                    negative_report(&negative_experiment(m, &selection)?)
                }
                ExperimentKind::Lower(args) => lower_run(args, cli.seed)?,
                ExperimentKind::Cyclic { m, eps } => {
                    let eps = eps.as_deref().map(rational_arg).transpose()?;
                    cyclic_report(&cyclic_experiment(m, eps.as_ref())?)
                }
                ExperimentKind::Minratio { mech, m, n, k, tie_free } => {
                    default_format = Format::Json;
                    let mech = mechanism(mech)?;
                    let mut space = GridSpace::new(*m, *n, *k);
                    if *tie_free {
                        space = space.tie_free();
                    }
                    let grid = space.profiles()?;
                    let budget = cli.budget.map_or(usize::MAX, |b| usize::try_from(b).unwrap_or(usize::MAX));
                    let found = min_ratio_search(&mech, grid.iter(), budget)?;
                    let mut table = Table::new(["mechanism", "ratio", "ratio_exact", "visited"]);
                    table.push(vec![
                        mech.to_string(),
                        decimal(&found.ratio),
                        format_rational(&found.ratio),
                        found.visited.to_string(),
                    ]);
                    Report {
                        json: json!({
                            "mechanism": mech.to_string(),
                            "ratio": exact(&found.ratio),
                            "ratio_decimal": decimal(&found.ratio),
                            "visited": found.visited,
                            "profile": profile_rows(&found.profile),
                        }),
                        table,
                    }
                }
            }
        }
        Command::Reduce(a) => reduce_report(a)?,
        Command::Project(a) => project_report(a)?,
        Command::Bounds(kind) => match kind {
            BoundsKind::LowerExperiment(args) => {
                default_format = Format::Csv;
                lower_run(args, cli.seed)?
            }
            BoundsKind::Reduce(a) => reduce_report(a)?,
            BoundsKind::Project(a) => project_report(a)?,
        },
        Command::Fit(a) => fit_report(a)?,
    };
    let format = match cli.format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) => Format::Csv,
        None => default_format,
    };
    Ok(Outcome {
        text: report.render(format, &config)?,
        violation,
    })
}
