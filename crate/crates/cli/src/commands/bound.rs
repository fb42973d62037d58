use serde::{Deserialize, Serialize};

use finite_bb84::bounds::{bound_report, BoundInputs, BoundReport, Direction};
use finite_bb84::channel::ClassCounts;

use super::{mark, table, Context};
use crate::error::CliError;
use crate::report::{num, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    /// `J⁰..J⁵`.
    j: [usize; 6],
    /// Phase errors among normally detected single photons; used when no distribution is given.
    #[serde(default)]
    t: usize,
    m: usize,
    l: usize,
    n_bar: Option<usize>,
    n_under: Option<usize>,
    t_distribution: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct Check {
    name: String,
    holds: bool,
}

#[derive(Serialize)]
struct Body {
    inputs: BoundInputs,
    reports: Vec<BoundReport>,
    checks: Vec<Check>,
}

pub fn run(_: &Args, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.no_seed("bound")?;
    ctx.no_guard("bound")?;
    let file: File = ctx.require("bound")?;
    let counts = ClassCounts::from_parts(file.j, file.t);
    let mut inputs = BoundInputs::point_mass(counts, file.m, file.l);
    inputs.n_bar = file.n_bar.unwrap_or(file.l);
    inputs.n_under = file.n_under.unwrap_or(file.l);
    if file.t_distribution.is_some() {
        inputs.t_distribution = file.t_distribution;
    } else if file.t > file.j[1] {
        return Err(ctx.invalid(finite_bb84::Error::Domain(format!(
            "t = {} exceeds J1 = {}",
            file.t, file.j[1]
        ))));
    }
    let reports = [Direction::Forward, Direction::Reverse, Direction::TwoWay]
        .into_iter()
        .map(|d| bound_report(&inputs, d))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ctx.invalid(e))?;

    let mut checks = Vec::new();
    let mut check = |name: &str, holds: bool| {
        checks.push(Check {
            name: name.into(),
            holds,
        })
    };
    check("N_under <= l <= N_bar", inputs.check_lengths().is_ok());
    let p: Vec<f64> = reports.iter().map(|r| r.phase_error).collect();
    check("two-way bound >= forward and reverse", p[2] >= p[0] && p[2] >= p[1]);
    let in_unit = reports
        .iter()
        .all(|r| (0.0..=1.0).contains(&r.phase_error) && (0.0..=inputs.l as f64).contains(&r.eve_info));
    check("0 <= P_ph <= 1 and 0 <= I <= l", in_unit);
    let passed = checks.iter().all(|c| c.holds);

    let mut text = format!(
        "bound: J = {:?}, m = {}, l = {}, N_bar = {}, N_under = {}\n",
        inputs.counts.j, inputs.m, inputs.l, inputs.n_bar, inputs.n_under
    );
    let opt = |x: Option<f64>| x.map_or("-".to_string(), num);
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.direction.name().into(),
                num(r.phase_error),
                num(r.eve_info),
                num(r.distinguishability.fid_pair_lb),
                num(r.tn_pair_fvdg),
                opt(r.success),
                num(r.averaged_eve_info),
                opt(r.per_bit_eve_info),
            ]
        })
        .collect();
    text.push_str(&table(
        &["direction", "P_ph", "I_Eve", "F_pair >=", "TN_pair (FvdG)", "P_succ", "I_avg", "I_per_bit"],
        &rows,
    ));
    for c in &checks {
        text.push_str(&format!("{}: {}\n", c.name, mark(c.holds)));
    }
    let body = Body { inputs, reports, checks };
    Ok(Outcome::new(&body, text, passed))
}
