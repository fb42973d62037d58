use serde::{Deserialize, Serialize};

use finite_bb84::oracle::suite::{inequality_slacks, run_oracle_suite, SuiteConfig, SuiteRow, SUITE_ROWS};
use finite_bb84::oracle::{PauliErrorDistribution, DEFAULT_ORACLE_GUARD};

use super::{mark, table, Context};
use crate::error::CliError;
use crate::report::{num, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Random channels per logical length.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub l_min: Option<usize>,
    #[arg(long)]
    pub l_max: Option<usize>,
    /// Test mode: add a deliberately wrong bound, which must make the run fail.
    #[arg(long, hide = true)]
    pub inject_broken: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    samples: Option<usize>,
    l_min: Option<usize>,
    l_max: Option<usize>,
    seed: Option<u64>,
}

/// Slack of a bound at the noiseless point mass, where the bounds are tight.
#[derive(Serialize)]
struct EqualityCase {
    name: String,
    l: usize,
    slack: f64,
}

#[derive(Serialize)]
struct Body {
    config: SuiteConfig,
    tolerance: f64,
    rows: Vec<SuiteRow>,
    point_mass: Vec<EqualityCase>,
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome, CliError> {
    let file: File = ctx.load()?.unwrap_or_default();
    let defaults = SuiteConfig::default();
    let cfg = SuiteConfig {
        samples: args.samples.or(file.samples).unwrap_or(defaults.samples),
        l_min: args.l_min.or(file.l_min).unwrap_or(defaults.l_min),
        l_max: args.l_max.or(file.l_max).unwrap_or(defaults.l_max),
        seed: ctx.global.seed.or(file.seed).unwrap_or(defaults.seed),
        inject_broken: args.inject_broken,
        guard: ctx.global.guard_override.unwrap_or(DEFAULT_ORACLE_GUARD),
    };
    let report = run_oracle_suite(&cfg).map_err(|e| ctx.invalid(e))?;
    let names: Vec<&str> = SUITE_ROWS.iter().copied().filter(|n| *n != "dense-mutual-information").collect();
    let mut point_mass = Vec::new();
    for l in cfg.l_min..=cfg.l_max {
        let slacks = inequality_slacks(&PauliErrorDistribution::point_mass(l, 0, 0))?;
        for (name, slack) in names.iter().zip(slacks) {
            point_mass.push(EqualityCase {
                name: name.to_string(),
                l,
                slack,
            });
        }
    }
    let equality_ok = point_mass.iter().all(|c| c.slack >= -report.tolerance);
    let passed = report.all_hold() && equality_ok;

    let mut text = format!(
        "oracle check: {} samples per l in {}..={}, seed {}, tolerance {:e}\n",
        cfg.samples, cfg.l_min, cfg.l_max, cfg.seed, report.tolerance
    );
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.samples.to_string(),
                num(r.worst_slack),
                r.violations.to_string(),
                mark(r.holds()).into(),
            ]
        })
        .collect();
    text.push_str(&table(&["inequality", "samples", "worst slack", "violations", "status"], &rows));
    let worst = point_mass.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    text.push_str(&format!(
        "point mass at no error: worst slack {} over {} cases ({})\n",
        num(worst),
        point_mass.len(),
        mark(equality_ok)
    ));
    let body = Body {
        config: cfg,
        tolerance: report.tolerance,
        rows: report.rows,
        point_mass,
    };
    let seed = body.config.seed;
    Ok(Outcome::new(&body, text, passed).with_seed(seed))
}
