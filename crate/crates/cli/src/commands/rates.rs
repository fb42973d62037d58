use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use finite_bb84::decoy::SourceDistribution;
use finite_bb84::rates::{verify_rate_ordering, Eta, OrderingCheck, RateInputs, RateTable};

use super::{table, Context};
use crate::error::CliError;
use crate::report::{num, Outcome};

/// Ordering checks tolerate this much rounding.
const ORDERING_TOLERANCE: f64 = 1e-12;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Also write the rate table as CSV, for plotting.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

/// One input varied over `steps + 1` evenly spaced values from `from` to `to`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sweep {
    param: String,
    from: f64,
    to: f64,
    steps: usize,
}

// Spelled out rather than flattened so parse errors keep their line numbers.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    nu: SourceDistribution,
    q1: f64,
    r1: f64,
    p0: f64,
    p_d: f64,
    p_nu_plus: f64,
    s_nu_plus: f64,
    #[serde(default)]
    eta: Eta,
    sweep: Option<Sweep>,
}

impl File {
    fn inputs(&self) -> RateInputs {
        RateInputs {
            nu: self.nu,
            q1: self.q1,
            r1: self.r1,
            p0: self.p0,
            p_d: self.p_d,
            p_nu_plus: self.p_nu_plus,
            s_nu_plus: self.s_nu_plus,
            eta: self.eta,
        }
    }
}

#[derive(Serialize)]
struct Row {
    value: Option<f64>,
    rates: RateTable,
    checks: Vec<OrderingCheck>,
    holds: bool,
}

#[derive(Serialize)]
struct Body {
    inputs: RateInputs,
    sweep: Option<Sweep>,
    tolerance: f64,
    rows: Vec<Row>,
}

fn set_param(inputs: &mut RateInputs, param: &str, value: f64) -> Result<(), CliError> {
    let slot = match param {
        "q1" => &mut inputs.q1,
        "r1" => &mut inputs.r1,
        "p0" => &mut inputs.p0,
        "p_d" => &mut inputs.p_d,
        "p_nu_plus" => &mut inputs.p_nu_plus,
        "s_nu_plus" => &mut inputs.s_nu_plus,
        other => {
            return Err(CliError::Usage(format!(
                "cannot sweep {other:?}; choose one of q1, r1, p0, p_d, p_nu_plus, s_nu_plus"
            )))
        }
    };
    *slot = value;
    Ok(())
}

fn write_csv(path: &PathBuf, rows: &[Row]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io {
        path: path.display().to_string(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["value", "forward", "reverse", "twoway", "bar_forward", "bar_reverse", "gllp_ilm"])
        .map_err(io)?;
    for r in rows {
        let t = &r.rates;
        let value = r.value.map_or(String::new(), num);
        let cells = [t.forward, t.reverse, t.twoway, t.bar_forward, t.bar_reverse, t.gllp_ilm].map(num);
        w.write_record(std::iter::once(value).chain(cells)).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.no_seed("rates")?;
    ctx.no_guard("rates")?;
    let file: File = ctx.require("rates")?;
    let values: Vec<Option<f64>> = match &file.sweep {
        None => vec![None],
        Some(s) if s.steps == 0 => vec![Some(s.from)],
        Some(s) => (0..=s.steps)
            .map(|k| Some(s.from + (s.to - s.from) * k as f64 / s.steps as f64))
            .collect(),
    };
    let mut rows = Vec::with_capacity(values.len());
    for value in values {
        let mut inputs = file.inputs();
        if let (Some(v), Some(s)) = (value, &file.sweep) {
            set_param(&mut inputs, &s.param, v)?;
        }
        let report = verify_rate_ordering(&inputs).map_err(|e| ctx.invalid(e))?;
        rows.push(Row {
            value,
            holds: report.all_hold(ORDERING_TOLERANCE),
            rates: report.rates,
            checks: report.checks,
        });
    }
    if let Some(path) = &args.table {
        write_csv(path, &rows)?;
    }
    let passed = rows.iter().all(|r| r.holds);

    let mut text = String::from("asymptotic key rates per pulse\n");
    let first = match &file.sweep {
        Some(s) => s.param.as_str(),
        None => "-",
    };
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let t = &r.rates;
            let mut c = vec![r.value.map_or("-".to_string(), num)];
            c.extend([t.forward, t.reverse, t.twoway, t.bar_forward, t.bar_reverse, t.gllp_ilm].map(num));
            c.push(if r.holds { "ok" } else { "FAIL" }.into());
            c
        })
        .collect();
    text.push_str(&table(
        &[first, "I_fwd", "I_rev", "I_two", "Ibar_fwd", "Ibar_rev", "I_GLLP", "ordering"],
        &cells,
    ));
    for (r, i) in rows.iter().zip(0..) {
        for c in r.checks.iter().filter(|c| !c.holds(ORDERING_TOLERANCE)) {
            text.push_str(&format!("row {i}: {} fails by {}\n", c.relation, num(-c.slack)));
        }
    }
    let body = Body {
        inputs: file.inputs(),
        sweep: file.sweep,
        tolerance: ORDERING_TOLERANCE,
        rows,
    };
    Ok(Outcome::new(&body, text, passed))
}
