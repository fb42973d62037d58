//! Maximisation of the expected phase-error bound over channel strategies.
//!
//! The bound averaged over sessions is linear in Eve's conditional error
//! distribution, so its maximum over that polytope sits at a deterministic
//! vertex. This module evaluates the expectation exactly for strategies
//! applied independently to each of `N` pulses and maximises over a supplied
//! list, typically [`vertex_strategies`] together with a [`grid_strategies`]
//! sweep. The sacrifice `m` may depend on the one quantity Bob observes
//! directly, the number of detected pulses.

use serde::{Deserialize, Serialize};

use super::{min_decoding_bound, Direction};
use crate::channel::{ChannelStrategy, MultiResponse, PauliWeights, StrategyMode};
use crate::error::{check_probability, Error, Result};

/// Cap on the number of pulses enumerated exactly.
pub const DEFAULT_EXTREMAL_GUARD: usize = 16;

/// Per-pulse outcomes, in enumeration order.
const OUTCOMES: usize = 8;
const J0: usize = 0;
const J1_CLEAN: usize = 1;
const J1_PHASE: usize = 2;
const J2: usize = 3;
const J3: usize = 4;
const J4: usize = 5;
const J5: usize = 6;
const LOST: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSource {
    /// Probability that a pulse holds 0, 1 and at least 2 photons.
    pub class_probs: [f64; 3],
    /// Probability that a multi-photon pulse was prepared in the + basis.
    pub multi_plus: f64,
}

impl PulseSource {
    fn validate(&self) -> Result<()> {
        for p in self.class_probs {
            check_probability("class probability", p)?;
        }
        check_probability("multi_plus", self.multi_plus)?;
        let total: f64 = self.class_probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("class probabilities sum to {total}, not 1")));
        }
        Ok(())
    }
}

/// Probability of each per-pulse outcome under `strategy`.
fn outcome_probabilities(source: &PulseSource, s: &ChannelStrategy) -> [f64; OUTCOMES] {
    let [c0, c1, c2] = source.class_probs;
    let pd = s.dark_count;
    let q2 = source.multi_plus * s.multi_plus.yield_ + (1.0 - source.multi_plus) * s.multi_times.yield_;
    let phase = s.single_errors.phase_error_rate();
    let mut p = [0.0; OUTCOMES];
    p[J0] = c0 * s.vacuum_yield;
    p[J1_CLEAN] = c1 * s.single_yield * (1.0 - phase);
    p[J1_PHASE] = c1 * s.single_yield * phase;
    p[J2] = c2 * q2;
    p[J3] = c0 * pd;
    p[J4] = c1 * pd;
    p[J5] = c2 * pd;
    p[LOST] = (1.0 - p[..LOST].iter().sum::<f64>()).max(0.0);
    p
}

/// `E[min{2^{J¹h̄(t/J¹) + K² − m(J)}, 1}]` over `pulses` independent pulses.
pub fn expected_phase_bound<F>(
    source: &PulseSource,
    strategy: &ChannelStrategy,
    pulses: usize,
    direction: Direction,
    m_rule: F,
) -> Result<f64>
where
    F: Fn(usize) -> usize,
{
    source.validate()?;
    strategy.validate()?;
    if pulses > DEFAULT_EXTREMAL_GUARD {
        return Err(Error::Capacity {
            what: "pulses in exact strategy evaluation",
            size: pulses as u64,
            limit: DEFAULT_EXTREMAL_GUARD as u64,
        });
    }
    let probs = outcome_probabilities(source, strategy);
    let log_fact: Vec<f64> = (0..=pulses)
        .scan(0.0, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let mut counts = [0usize; OUTCOMES];
    let mut total = 0.0;
    enumerate(0, pulses, &mut counts, &mut |c| {
        let mut log_p = log_fact[pulses];
        for (k, &n) in c.iter().enumerate() {
            if n > 0 {
                if probs[k] == 0.0 {
                    return Ok(());
                }
                log_p += n as f64 * probs[k].ln() - log_fact[n];
            }
        }
        let j = [c[J0], c[J1_CLEAN] + c[J1_PHASE], c[J2], c[J3], c[J4], c[J5]];
        let detected: usize = j.iter().sum();
        let bound = min_decoding_bound(j[1], direction.untrusted(&j), c[J1_PHASE], m_rule(detected))?;
        total += log_p.exp() * bound;
        Ok(())
    })?;
    Ok(total.min(1.0))
}

fn enumerate<F>(slot: usize, remaining: usize, counts: &mut [usize; OUTCOMES], visit: &mut F) -> Result<()>
where
    F: FnMut(&[usize; OUTCOMES]) -> Result<()>,
{
    if slot == OUTCOMES - 1 {
        counts[slot] = remaining;
        return visit(counts);
    }
    for n in 0..=remaining {
        counts[slot] = n;
        enumerate(slot + 1, remaining - n, counts, visit)?;
    }
    Ok(())
}

/// Every deterministic strategy for a detector with dark-count rate `dark_count`.
pub fn vertex_strategies(dark_count: f64) -> Vec<ChannelStrategy> {
    let y = 1.0 - dark_count;
    let paulis = [
        PauliWeights::IDENTITY,
        PauliWeights { none: 0.0, phase: 1.0, bit: 0.0, both: 0.0 },
        PauliWeights { none: 0.0, phase: 0.0, bit: 1.0, both: 0.0 },
        PauliWeights { none: 0.0, phase: 0.0, bit: 0.0, both: 1.0 },
    ];
    let mut out = Vec::new();
    for yields in 0..16u32 {
        let q = |k: u32| if yields >> k & 1 == 1 { y } else { 0.0 };
        for &single_errors in &paulis {
            for flips in 0..4u32 {
                out.push(ChannelStrategy {
                    dark_count,
                    vacuum_yield: q(0),
                    single_yield: q(1),
                    single_errors,
                    multi_plus: MultiResponse { yield_: q(2), flip: (flips & 1) as f64 },
                    multi_times: MultiResponse { yield_: q(3), flip: (flips >> 1) as f64 },
                    mode: StrategyMode::Extremal,
                });
            }
        }
    }
    out
}

/// Honest-loss strategies on a `steps + 1` point grid of single-photon yield,
/// phase-error rate, vacuum yield and multi-photon yield.
pub fn grid_strategies(dark_count: f64, steps: usize) -> Vec<ChannelStrategy> {
    let steps = steps.max(1);
    let y = 1.0 - dark_count;
    let grid: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
    let mut out = Vec::new();
    for &single in &grid {
        for &phase in &grid {
            for &vacuum in &grid {
                for &multi in &grid {
                    out.push(ChannelStrategy {
                        dark_count,
                        vacuum_yield: vacuum * y,
                        single_yield: single * y,
                        single_errors: PauliWeights::independent(0.0, phase),
                        multi_plus: MultiResponse { yield_: multi * y, flip: 0.0 },
                        multi_times: MultiResponse { yield_: multi * y, flip: 0.0 },
                        mode: StrategyMode::HonestLoss,
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub best_index: usize,
    pub best_value: f64,
    pub values: Vec<f64>,
}

/// The candidate with the largest expected bound; ties keep the first.
pub fn maximize_expected_bound<F>(
    source: &PulseSource,
    candidates: &[ChannelStrategy],
    pulses: usize,
    direction: Direction,
    m_rule: F,
) -> Result<ExtremalResult>
where
    F: Fn(usize) -> usize,
{
    if candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate strategies".into()));
    }
    let values = candidates
        .iter()
        .map(|s| expected_phase_bound(source, s, pulses, direction, &m_rule))
        .collect::<Result<Vec<_>>>()?;
    let (best_index, best_value) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best });
    Ok(ExtremalResult {
        best_index,
        best_value,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOURCE: PulseSource = PulseSource {
        class_probs: [0.3, 0.5, 0.2],
        multi_plus: 0.5,
    };

    #[test]
    fn noiseless_single_photons_give_two_to_minus_m() {
        let source = PulseSource {
            class_probs: [0.0, 1.0, 0.0],
            multi_plus: 0.5,
        };
        let v = expected_phase_bound(&source, &ChannelStrategy::noiseless(), 6, Direction::Forward, |_| 4).unwrap();
        assert!((v - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_sum_for_two_pulses() {
        let mut s = ChannelStrategy::noiseless();
        s.dark_count = 0.1;
        s.single_yield = 0.6;
        s.vacuum_yield = 0.2;
        s.multi_plus.yield_ = 0.9;
        s.multi_times.yield_ = 0.4;
        s.single_errors = PauliWeights::independent(0.0, 0.25);
        let probs = outcome_probabilities(&SOURCE, &s);
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let mut direct = 0.0;
        for a in 0..OUTCOMES {
            for b in 0..OUTCOMES {
                let mut c = [0usize; OUTCOMES];
                c[a] += 1;
                c[b] += 1;
                let j = [c[J0], c[J1_CLEAN] + c[J1_PHASE], c[J2], c[J3], c[J4], c[J5]];
                direct += probs[a] * probs[b]
                    * min_decoding_bound(j[1], Direction::Reverse.untrusted(&j), c[J1_PHASE], 3).unwrap();
            }
        }
        let v = expected_phase_bound(&SOURCE, &s, 2, Direction::Reverse, |_| 3).unwrap();
        assert!((v - direct).abs() < 1e-12);
    }

    #[test]
    fn vertices_are_valid_extremal_strategies() {
        let vs = vertex_strategies(0.05);
        assert_eq!(vs.len(), 256);
        assert!(vs.iter().all(|s| s.validate().is_ok()));
    }

    #[test]
    fn vertex_maximum_dominates_the_grid() {
        let m_rule = |_: usize| 5;
        let vertices = maximize_expected_bound(&SOURCE, &vertex_strategies(0.0), 5, Direction::Forward, m_rule).unwrap();
        let grid = maximize_expected_bound(&SOURCE, &grid_strategies(0.0, 2), 5, Direction::Forward, m_rule).unwrap();
        assert!(grid.best_value <= vertices.best_value + 1e-12);
    }

    #[test]
    fn guard_and_inputs_are_checked() {
        let s = ChannelStrategy::noiseless();
        assert!(expected_phase_bound(&SOURCE, &s, 40, Direction::Forward, |_| 1).is_err());
        let bad = PulseSource {
            class_probs: [0.5, 0.6, 0.0],
            multi_plus: 0.5,
        };
        assert!(expected_phase_bound(&bad, &s, 2, Direction::Forward, |_| 1).is_err());
        assert!(maximize_expected_bound(&SOURCE, &[], 2, Direction::Forward, |_| 1).is_err());
    }
}
