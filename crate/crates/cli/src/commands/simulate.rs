use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use finite_bb84::channel::ChannelStrategy;
use finite_bb84::protocol::{run_batch, BasisOutcome, ExperimentData, SessionConfig, SessionOutcome, SessionStatus, Transcript};

use super::{mark, table, Context};
use crate::error::CliError;
use crate::report::{num, Outcome};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Independent sessions; session `i` uses stream `i` of the seed.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Write the public transcript of the first session here.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    trials: Option<usize>,
    session: SessionConfig,
    strategy: ChannelStrategy,
}

#[derive(Serialize)]
struct BasisSummary {
    kind: usize,
    errors: usize,
    checked: usize,
    ec_bits: usize,
    m: usize,
    l: usize,
    ec_success: bool,
    alice: String,
    bob: String,
    /// Phase errors among the hidden single photons of the raw key.
    hidden_phase_errors: usize,
    phase_error_bound: f64,
    eve_info_bound: f64,
}

impl From<&BasisOutcome> for BasisSummary {
    fn from(b: &BasisOutcome) -> Self {
        Self {
            kind: b.kind,
            errors: b.errors,
            checked: b.checked,
            ec_bits: b.ec_bits,
            m: b.m,
            l: b.l,
            ec_success: b.ec_success,
            alice: b.keys.alice.to_string(),
            bob: b.keys.bob.to_string(),
            hidden_phase_errors: b.hidden.t,
            phase_error_bound: b.bounds.phase_error,
            eve_info_bound: b.bounds.eve_info,
        }
    }
}

#[derive(Serialize)]
struct Check {
    name: String,
    holds: bool,
}

#[derive(Serialize)]
struct SessionSummary {
    trial: usize,
    status: SessionStatus,
    reached_step: u8,
    keys_equal: bool,
    data: ExperimentData,
    plus: Option<BasisSummary>,
    times: Option<BasisSummary>,
    transcript_lines: usize,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct Body {
    session: SessionConfig,
    strategy: ChannelStrategy,
    trials: usize,
    completed: usize,
    keys_equal: usize,
    sessions: Vec<SessionSummary>,
}

const TEXT_SESSION_LIMIT: usize = 8;

/// Invariants every session must satisfy, whatever its outcome.
fn session_checks(cfg: &SessionConfig, out: &SessionOutcome) -> Vec<Check> {
    let mut checks = Vec::new();
    let mut check = |name: &str, holds: bool| {
        checks.push(Check {
            name: name.into(),
            holds,
        })
    };
    let text = out.transcript.to_string();
    check("transcript round-trips", text.parse::<Transcript>().is_ok_and(|t| t == out.transcript));
    check("pulse kinds sum to N_prime", out.initial.a.iter().sum::<usize>() == cfg.n_prime);
    let counts_ordered = (0..out.data.c.len()).all(|i| {
        out.data.c[i] <= out.data.a[i] && out.data.e[i] <= out.data.c[i] && out.data.h[i] <= out.data.checks[i]
    });
    if out.reached_step >= 6 {
        check("H <= checks, E <= C <= A per kind", counts_ordered);
    }
    if out.completed() {
        let lengths = [&out.plus, &out.times]
            .iter()
            .all(|b| b.as_ref().is_some_and(|b| (cfg.n_under..=cfg.n_bar).contains(&b.l) && b.l + b.m <= cfg.n));
        check("N_under <= l <= N_bar and l + m <= N", lengths);
    }
    checks
}

fn status_text(s: &SessionStatus) -> String {
    match s {
        SessionStatus::Completed => "completed".into(),
        SessionStatus::Aborted { step, reason } => format!("aborted at step {step}: {reason}"),
    }
}

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome, CliError> {
    let file: File = ctx.require("simulate")?;
    let mut cfg = file.session;
    if let Some(seed) = ctx.global.seed {
        cfg.rng_seed = seed;
    }
    if let Some(guard) = ctx.global.guard_override {
        cfg.ec_guard = guard;
    }
    cfg.validate().map_err(|e| ctx.invalid(e))?;
    file.strategy.validate().map_err(|e| ctx.invalid(e))?;
    let trials = args.trials.or(file.trials).unwrap_or(1);
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let outcomes = run_batch(&cfg, &file.strategy, trials).map_err(|e| ctx.invalid(e))?;
    if let Some(path) = &args.transcript {
        std::fs::write(path, outcomes[0].transcript.to_string()).map_err(|e| CliError::io(path, e))?;
    }
    let sessions: Vec<SessionSummary> = outcomes
        .iter()
        .enumerate()
        .map(|(trial, out)| SessionSummary {
            trial,
            status: out.status.clone(),
            reached_step: out.reached_step,
            keys_equal: out.keys_equal,
            data: out.data.clone(),
            plus: out.plus.as_ref().map(BasisSummary::from),
            times: out.times.as_ref().map(BasisSummary::from),
            transcript_lines: out.transcript.len(),
            checks: session_checks(&cfg, out),
        })
        .collect();
    let passed = sessions.iter().all(|s| s.checks.iter().all(|c| c.holds));
    let completed = outcomes.iter().filter(|o| o.completed()).count();
    let keys_equal = outcomes.iter().filter(|o| o.completed() && o.keys_equal).count();

    let mut text = format!("simulate: {trials} session(s), seed {}, {} direction\n", cfg.rng_seed, cfg.ec_direction.bounds_direction().name());
    text.push_str(&format!("completed: {completed}, with equal keys: {keys_equal}\n"));
    for s in sessions.iter().take(TEXT_SESSION_LIMIT) {
        text.push_str(&format!("session {}: {}, reached step {}\n", s.trial, status_text(&s.status), s.reached_step));
        let rows: Vec<Vec<String>> = [("+", &s.plus), ("x", &s.times)]
            .iter()
            .filter_map(|(name, b)| {
                b.as_ref().map(|b| {
                    vec![
                        name.to_string(),
                        format!("{}/{}", b.errors, b.checked),
                        b.ec_bits.to_string(),
                        b.m.to_string(),
                        b.l.to_string(),
                        b.ec_success.to_string(),
                        num(b.phase_error_bound),
                        b.alice.clone(),
                    ]
                })
            })
            .collect();
        if !rows.is_empty() {
            text.push_str(&table(&["basis", "errors", "l+m", "m", "l", "ec ok", "P_ph bound", "key"], &rows));
        }
        for c in &s.checks {
            text.push_str(&format!("  {}: {}\n", c.name, mark(c.holds)));
        }
    }
    if sessions.len() > TEXT_SESSION_LIMIT {
        text.push_str(&format!("({} more sessions in the JSON report)\n", sessions.len() - TEXT_SESSION_LIMIT));
    }
    let body = Body {
        session: cfg.clone(),
        strategy: file.strategy,
        trials,
        completed,
        keys_equal,
        sessions,
    };
    Ok(Outcome::new(&body, text, passed).with_seed(cfg.rng_seed))
}

