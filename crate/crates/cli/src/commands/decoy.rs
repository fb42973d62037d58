use serde::{Deserialize, Serialize};

use finite_bb84::decoy::{
    estimate_interval, estimate_vacuum_single, feasibility_check, minimize_key_term, ChannelParameters,
    EstimateInterval, KeyTermMinimum, ObservedRates, PointEstimate, SourceDistribution, DEFAULT_GRID_RESOLUTION,
};

use super::{mark, Context};
use crate::error::CliError;
use crate::report::{num, Outcome};

/// Agreement required of a round trip through exact forward rates.
const RECOVERY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, clap::Args)]
pub struct Args {}

/// Exact rates computed from a known channel, for round-trip checks.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Forward {
    p0: f64,
    p_d: f64,
    q1: f64,
    r1_x: f64,
    r1_plus: f64,
    #[serde(default)]
    q2_x: f64,
    #[serde(default)]
    q2_plus: f64,
    #[serde(default)]
    r2_x: f64,
    #[serde(default)]
    r2_plus: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    nu: SourceDistribution,
    resolution: Option<f64>,
    observed: Option<ObservedRates>,
    forward: Option<Forward>,
}

#[derive(Serialize)]
struct Truth {
    params: ChannelParameters,
    feasible: bool,
    q1_bracketed: bool,
    r1_bracketed: bool,
    /// `|estimate − truth|` for the closed-form point estimate, when it applies.
    q1_error: Option<f64>,
    r1_error: Option<f64>,
}

#[derive(Serialize)]
struct Check {
    name: String,
    holds: bool,
}

#[derive(Serialize)]
struct Body {
    nu: SourceDistribution,
    observed: ObservedRates,
    symmetric: bool,
    point_estimate: Option<PointEstimate>,
    interval: EstimateInterval,
    key_term: KeyTermMinimum,
    truth: Option<Truth>,
    checks: Vec<Check>,
}

pub fn run(_: &Args, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.no_seed("estimate-decoy")?;
    ctx.no_guard("estimate-decoy")?;
    let file: File = ctx.require("estimate-decoy")?;
    let nu = file.nu;
    nu.validate().map_err(|e| ctx.invalid(e))?;
    let (observed, truth) = match (file.observed, file.forward) {
        (Some(obs), None) => (obs, None),
        (None, Some(f)) => {
            let params = ChannelParameters {
                q1: f.q1,
                r1_x: f.r1_x,
                r1_plus: f.r1_plus,
                q2_x: f.q2_x,
                q2_plus: f.q2_plus,
                r2_x: f.r2_x,
                r2_plus: f.r2_plus,
            };
            (params.observed(&nu, f.p0, f.p_d), Some(params))
        }
        _ => return Err(CliError::Usage("estimate-decoy needs exactly one of [observed] or [forward]".into())),
    };
    observed.validate().map_err(|e| ctx.invalid(e))?;
    let resolution = file.resolution.unwrap_or(DEFAULT_GRID_RESOLUTION);
    let interval = estimate_interval(&nu, &observed).map_err(|e| ctx.invalid(e))?;
    let key_term = minimize_key_term(&nu, &observed, resolution).map_err(|e| ctx.invalid(e))?;
    // The closed form needs a source without multi-photon pulses.
    let point_estimate = (nu.nu[2] == 0.0)
        .then(|| estimate_vacuum_single(&nu, &observed))
        .transpose()
        .map_err(|e| ctx.invalid(e))?;

    let mut checks = Vec::new();
    let mut check = |name: &str, holds: bool| {
        checks.push(Check {
            name: name.into(),
            holds,
        })
    };
    let tol = RECOVERY_TOLERANCE;
    check("q1_min <= q1_max", interval.q1_min <= interval.q1_max + tol);
    check("r1_min_tilde <= r1_min <= r1_max", interval.r1_min_tilde <= interval.r1_min + tol && interval.r1_min <= interval.r1_max + tol);
    check("q1 width within bound", interval.q1_max - interval.q1_min <= interval.q_width_bound + tol);
    let symmetric = observed.is_symmetric();
    if interval.r1_min_tilde >= 0.0 {
        check(
            "r1 width within bound",
            interval.r1_max - interval.r1_min_tilde <= interval.r_width_bound + tol,
        );
    }
    if let Some(p) = &point_estimate {
        check(
            "point estimate inside interval",
            interval.q1_min - tol <= p.q1 && p.q1 <= interval.q1_max + tol,
        );
    }
    let truth = truth.map(|params| {
        let error = |est: Option<f64>, t: f64| est.map(|e| (e - t).abs());
        Truth {
            feasible: feasibility_check(&nu, &observed, &params),
            q1_bracketed: interval.q1_min - tol <= params.q1 && params.q1 <= interval.q1_max + tol,
            r1_bracketed: interval.r1_min - tol <= params.r1_x && params.r1_x <= interval.r1_max + tol,
            q1_error: error(point_estimate.as_ref().map(|p| p.q1), params.q1),
            r1_error: error(point_estimate.as_ref().map(|p| p.r1), params.r1_x),
            params,
        }
    });
    if let Some(t) = &truth {
        check("truth is feasible", t.feasible);
        check("truth inside interval", t.q1_bracketed && t.r1_bracketed);
        if let (Some(q), Some(r)) = (t.q1_error, t.r1_error) {
            check("point estimate recovers truth to 1e-12", q <= tol && r <= tol);
        }
    }
    let passed = checks.iter().all(|c| c.holds);

    let mut text = format!("decoy estimate, nu = {:?}\n", nu.nu);
    if let Some(p) = &point_estimate {
        text.push_str(&format!("point estimate: q1 = {}, r1 = {}\n", num(p.q1), num(p.r1)));
        for w in &p.warnings {
            text.push_str(&format!("  warning: {} = {} clamped to {}\n", w.quantity, num(w.raw), num(w.clamped)));
        }
    }
    text.push_str(&format!("q1 in [{}, {}]\n", num(interval.q1_min), num(interval.q1_max)));
    text.push_str(&format!(
        "r1 in [{}, {}], closed-form lower bound {}\n",
        num(interval.r1_min),
        num(interval.r1_max),
        num(interval.r1_min_tilde)
    ));
    text.push_str(&format!(
        "min q1(1 - h(r1)) = {} at q1 = {}, r1 = {}\n",
        num(key_term.value),
        num(key_term.q1),
        num(key_term.r1)
    ));
    if let Some(t) = &truth {
        let e = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:e}"));
        text.push_str(&format!("truth recovery error: q1 {}, r1 {}\n", e(t.q1_error), e(t.r1_error)));
    }
    for c in &checks {
        text.push_str(&format!("{}: {}\n", c.name, mark(c.holds)));
    }
    let body = Body {
        nu,
        observed,
        symmetric,
        point_estimate,
        interval,
        key_term,
        truth,
        checks,
    };
    Ok(Outcome::new(&body, text, passed))
}
