use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use finite_bb84::privacy::{universality_profile_guarded, DEFAULT_SEED_GUARD};

use super::{table, Context};
use crate::error::CliError;
use crate::report::Outcome;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Output length of the hash.
    #[arg(long)]
    pub l: Option<usize>,
    /// Sacrificed bits; the hash compresses `l + m` bits to `l`.
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct File {
    l: Option<usize>,
    m: Option<usize>,
}

#[derive(Serialize)]
struct Fraction {
    z: String,
    fraction: String,
}

#[derive(Serialize)]
struct Body {
    l: usize,
    m: usize,
    guard: usize,
    bound: String,
    max_fraction: String,
    /// Number of nonzero `Z` attaining each fraction.
    histogram: BTreeMap<String, usize>,
    profile: Vec<Fraction>,
}

/// Profiles longer than this are summarised by their histogram in text output.
const TEXT_PROFILE_LIMIT: usize = 64;

pub fn run(args: &Args, ctx: &Context) -> Result<Outcome, CliError> {
    ctx.no_seed("verify-toeplitz")?;
    let file: File = ctx.load()?.unwrap_or_default();
    let l = args.l.or(file.l).ok_or_else(|| CliError::Usage("verify-toeplitz needs --l".into()))?;
    let m = args.m.or(file.m).ok_or_else(|| CliError::Usage("verify-toeplitz needs --m".into()))?;
    let guard = ctx.global.guard_override.unwrap_or(DEFAULT_SEED_GUARD);
    let profile = universality_profile_guarded(l, m, guard).map_err(|e| ctx.invalid(e))?;
    let passed = profile.satisfies_bound();
    let mut histogram = BTreeMap::new();
    for f in profile.fractions.values() {
        *histogram.entry(f.to_string()).or_insert(0) += 1;
    }
    let body = Body {
        l,
        m,
        guard,
        bound: profile.bound().to_string(),
        max_fraction: profile.max_fraction().to_string(),
        histogram,
        profile: profile
            .fractions
            .iter()
            .map(|(z, f)| Fraction {
                z: z.to_string(),
                fraction: f.to_string(),
            })
            .collect(),
    };
    let mut text = format!("Toeplitz universality, l = {l}, m = {m}\n");
    text.push_str(&format!("bound 2^-m: {}\n", body.bound));
    text.push_str(&format!("max fraction: {}\n", body.max_fraction));
    let hist: Vec<Vec<String>> = body.histogram.iter().map(|(f, n)| vec![f.clone(), n.to_string()]).collect();
    text.push_str(&table(&["fraction", "count"], &hist));
    if body.profile.len() <= TEXT_PROFILE_LIMIT {
        let rows: Vec<Vec<String>> = body.profile.iter().map(|f| vec![f.z.clone(), f.fraction.clone()]).collect();
        text.push_str(&table(&["Z", "P(Z in Im M_p^T)"], &rows));
    }
    Ok(Outcome::new(&body, text, passed))
}
