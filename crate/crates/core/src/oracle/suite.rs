//! Randomised check of every Eve-figure bound against the exact oracle.
//!
//! Each row reports the worst slack `bound − exact` over the suite (for
//! lower bounds, `exact − bound`), so a row holds when its worst slack is at
//! least `−tolerance`. The dense row reports `−|closed form − dense|` for the
//! mutual information, which puts agreement on the same footing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{dense, eve_figures, eve_mutual_information, PauliErrorDistribution, DEFAULT_ORACLE_GUARD};
use crate::bounds::{distinguishability_bounds, eve_info_bound, fvdg_trace_norm_bounds, success_bound};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// Random distributions per logical length.
    pub samples: usize,
    pub l_min: usize,
    pub l_max: usize,
    pub seed: u64,
    /// Adds a deliberately wrong bound, for exercising failure reporting.
    #[serde(default)]
    pub inject_broken: bool,
    #[serde(default = "default_guard")]
    pub guard: usize,
}

fn default_guard() -> usize {
    DEFAULT_ORACLE_GUARD
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            l_min: 1,
            l_max: 3,
            seed: 0,
            inject_broken: false,
            guard: DEFAULT_ORACLE_GUARD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub name: String,
    pub samples: usize,
    pub worst_slack: f64,
    /// Samples whose slack is below `−tolerance`.
    pub violations: usize,
}

impl SuiteRow {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            worst_slack: f64::INFINITY,
            violations: 0,
        }
    }

    fn record(&mut self, slack: f64, tolerance: f64) {
        self.samples += 1;
        self.worst_slack = self.worst_slack.min(slack);
        if slack < -tolerance {
            self.violations += 1;
        }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub tolerance: f64,
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(SuiteRow::holds)
    }

    pub fn row(&self, name: &str) -> Option<&SuiteRow> {
        self.rows.iter().find(|r| r.name == name)
    }
}

pub const SUITE_TOLERANCE: f64 = 1e-9;

/// Row names, in report order. The last two are the Fuchs–van de Graaf
/// forms `2√(1 − F²)` built from the fidelity bounds.
pub const SUITE_ROWS: [&str; 9] = [
    "mutual-information",
    "pair-fidelity",
    "pair-trace-norm",
    "average-fidelity",
    "average-trace-norm",
    "success-probability",
    "dense-mutual-information",
    "pair-trace-norm-fvdg",
    "average-trace-norm-fvdg",
];

/// Positions in [`SUITE_ROWS`] of the slacks returned by [`inequality_slacks`].
const CLOSED_FORM_ROWS: [usize; 8] = [0, 1, 2, 3, 4, 5, 7, 8];

/// Slack of every closed-form bound on `p`, in [`SUITE_ROWS`] order without the dense row.
pub fn inequality_slacks(p: &PauliErrorDistribution) -> Result<[f64; 8]> {
    let l = p.l();
    let f = eve_figures(p);
    let ph = f.phase_error_prob.clamp(0.0, 1.0);
    let d = distinguishability_bounds(ph)?;
    let (tn_pair, tn_avg) = fvdg_trace_norm_bounds(ph)?;
    Ok([
        eve_info_bound(ph, l)? - f.mutual_info_bits,
        f.min_pair_fidelity - d.fid_pair_lb,
        d.tn_pair_ub - f.max_pair_trace_norm,
        f.min_avg_fidelity - d.fid_avg_lb,
        d.tn_avg_ub - f.max_avg_trace_norm,
        success_bound(ph, l)? - f.opt_success_prob,
        tn_pair - f.max_pair_trace_norm,
        tn_avg - f.max_avg_trace_norm,
    ])
}

pub fn run_oracle_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.l_min == 0 || cfg.l_min > cfg.l_max {
        return Err(Error::InvalidInput(format!(
            "need 1 <= l_min <= l_max, got {}..={}",
            cfg.l_min, cfg.l_max
        )));
    }
    if cfg.l_max > cfg.guard {
        return Err(Error::Capacity {
            what: "oracle logical length",
            size: cfg.l_max as u64,
            limit: cfg.guard as u64,
        });
    }
    let tol = SUITE_TOLERANCE;
    let mut rows: Vec<SuiteRow> = SUITE_ROWS.iter().map(|n| SuiteRow::new(n)).collect();
    let mut broken = SuiteRow::new("injected-broken");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for l in cfg.l_min..=cfg.l_max {
        for _ in 0..cfg.samples {
            let p = PauliErrorDistribution::random(l, &mut rng);
            let slacks = inequality_slacks(&p)?;
            for (i, s) in CLOSED_FORM_ROWS.iter().zip(slacks) {
                rows[*i].record(s, tol);
            }
            if l <= dense::DENSE_GUARD {
                let dense_info = dense::dense_figures(&p)?.mutual_info_bits;
                rows[6].record(-(dense_info - eve_mutual_information(&p)).abs(), tol);
            }
            if cfg.inject_broken {
                let f = eve_figures(&p);
                let info = eve_info_bound(f.phase_error_prob.clamp(0.0, 1.0), l)?;
                broken.record(0.5 * info - f.mutual_info_bits - tol, tol);
            }
        }
    }
    rows.retain(|r| r.samples > 0);
    if cfg.inject_broken {
        rows.push(broken);
    }
    Ok(SuiteReport { tolerance: tol, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_reports_every_row() {
        let cfg = SuiteConfig {
            samples: 50,
            l_max: 2,
            ..SuiteConfig::default()
        };
        let report = run_oracle_suite(&cfg).unwrap();
        assert_eq!(report.rows.len(), SUITE_ROWS.len());
        for name in ["mutual-information", "pair-fidelity", "average-fidelity", "success-probability"] {
            assert!(report.row(name).unwrap().holds(), "{name}");
        }
        assert!(report.row("dense-mutual-information").unwrap().holds());
        assert!(report.row("pair-trace-norm-fvdg").unwrap().holds());
    }

    #[test]
    fn injected_bound_fails() {
        let cfg = SuiteConfig {
            samples: 20,
            l_max: 1,
            inject_broken: true,
            ..SuiteConfig::default()
        };
        let report = run_oracle_suite(&cfg).unwrap();
        assert!(!report.row("injected-broken").unwrap().holds());
        assert!(!report.all_hold());
    }

    #[test]
    fn point_mass_is_an_equality_case() {
        let slacks = inequality_slacks(&PauliErrorDistribution::point_mass(2, 0, 0)).unwrap();
        for (i, s) in slacks.iter().enumerate() {
            assert!(s.abs() < 1e-12 || i == 5, "row {i}: {s}");
        }
    }

    #[test]
    fn guard_and_range_are_checked() {
        let cfg = SuiteConfig {
            l_max: 9,
            ..SuiteConfig::default()
        };
        assert!(matches!(run_oracle_suite(&cfg), Err(Error::Capacity { .. })));
        let cfg = SuiteConfig {
            l_min: 0,
            ..SuiteConfig::default()
        };
        assert!(run_oracle_suite(&cfg).is_err());
    }
}
