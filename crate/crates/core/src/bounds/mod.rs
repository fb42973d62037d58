//! Closed-form finite-length bounds on Eve's knowledge of the final key.
//!
//! Every bound is driven by a phase-error probability `P`. The block bounds
//! take `P = P_ph` for the chosen `M_p`; the averaged bounds take the
//! session average `P_av`, with the final length confined to `[N̲, N̄]`.
//! All logarithms are base 2.

pub mod decoding;
pub mod extremal;

use serde::{Deserialize, Serialize};

use crate::channel::ClassCounts;
use crate::error::{check_probability, Error, Result};

pub use decoding::{verify_proposition_decoding, DecodingCheck, DecodingInstance, SeedSampling};

/// Binary entropy, clamped to 1 above one half.
pub fn hbar(x: f64) -> Result<f64> {
    check_probability("x", x)?;
    Ok(hbar_unchecked(x))
}

pub(crate) fn hbar_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 0.5 {
        1.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// `h̄(P) + l·P` bits.
pub fn eve_info_bound(p: f64, l: usize) -> Result<f64> {
    check_probability("P_ph", p)?;
    Ok(hbar_unchecked(p) + l as f64 * p)
}

/// Lower bounds on fidelity and upper bounds on trace norm, for a pair of
/// key values and for a key value against the average state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distinguishability {
    pub fid_pair_lb: f64,
    pub tn_pair_ub: f64,
    pub fid_avg_lb: f64,
    pub tn_avg_ub: f64,
}

/// `(1 − 2P, min{4P, 2}, 1 − P, min{2P, 2})`.
///
/// The two trace-norm values are the linear forms as stated; they do not
/// follow from the fidelity bounds and fail on exact instances. See
/// [`fvdg_trace_norm_bounds`] for bounds that do hold.
pub fn distinguishability_bounds(p: f64) -> Result<Distinguishability> {
    check_probability("P_ph", p)?;
    Ok(Distinguishability {
        fid_pair_lb: 1.0 - 2.0 * p,
        tn_pair_ub: (4.0 * p).min(2.0),
        fid_avg_lb: 1.0 - p,
        tn_avg_ub: (2.0 * p).min(2.0),
    })
}

/// `(pair, average)` trace-norm bounds `2√(1 − F²)` from the fidelity lower
/// bounds, with `F` clamped to `[0, 1]`.
pub fn fvdg_trace_norm_bounds(p: f64) -> Result<(f64, f64)> {
    let d = distinguishability_bounds(p)?;
    let tn = |f: f64| {
        let f = f.clamp(0.0, 1.0);
        (2.0 * (1.0 - f * f).sqrt()).min(2.0)
    };
    Ok((tn(d.fid_pair_lb), tn(d.fid_avg_lb)))
}

/// `(√P √(1 − 2^{-l}) + √(1 − P) √2^{-l})²`.
pub fn success_bound(p: f64, l: usize) -> Result<f64> {
    check_probability("P_ph", p)?;
    if l == 0 {
        return Err(Error::InvalidInput("success_bound needs l >= 1".into()));
    }
    let q = 0.5f64.powi(l as i32);
    let root = p.sqrt() * (1.0 - q).sqrt() + (1.0 - p).sqrt() * q.sqrt();
    Ok(root * root)
}

/// `min{2^{K¹ h̄(t/K¹) + K² − m}, 1}`, where the entropy term is 0 when `K¹ = 0`.
pub fn min_decoding_bound(k1: usize, k2: usize, t: usize, m: usize) -> Result<f64> {
    if t > k1 {
        return Err(Error::InvalidInput(format!("t = {t} exceeds K1 = {k1}")));
    }
    let entropy = if k1 == 0 {
        0.0
    } else {
        k1 as f64 * hbar_unchecked(t as f64 / k1 as f64)
    };
    let exponent = entropy + k2 as f64 - m as f64;
    Ok(exponent.exp2().min(1.0))
}

/// Which detected pulses cannot be vouched for by the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Forward error correction: multi-photon and every dark count, `J²+J⁴+J⁵`.
    Forward,
    /// Reverse error correction: vacuum and multi-photon, `J⁰+J²`.
    Reverse,
    /// Two-way error correction: `J⁰+J²+J⁴+J⁵`.
    TwoWay,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Forward, Direction::Reverse, Direction::TwoWay];

    pub fn untrusted(self, j: &[usize; 6]) -> usize {
        match self {
            Direction::Forward => j[2] + j[4] + j[5],
            Direction::Reverse => j[0] + j[2],
            Direction::TwoWay => j[0] + j[2] + j[4] + j[5],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
            Direction::TwoWay => "two-way",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub counts: ClassCounts,
    pub m: usize,
    pub l: usize,
    pub n_bar: usize,
    pub n_under: usize,
    /// `p(t/J¹)` indexed by `t = 0..=J¹`; absent means only `counts.t` is known.
    #[serde(default)]
    pub t_distribution: Option<Vec<f64>>,
}

impl BoundInputs {
    /// Inputs whose `t` distribution is the point mass at `counts.t`.
    pub fn point_mass(counts: ClassCounts, m: usize, l: usize) -> Self {
        let mut dist = vec![0.0; counts.j[1] + 1];
        if counts.t < dist.len() {
            dist[counts.t] = 1.0;
        }
        Self {
            counts,
            m,
            l,
            n_bar: l,
            n_under: l,
            t_distribution: Some(dist),
        }
    }

    pub fn t_distribution(&self) -> Result<&[f64]> {
        let dist = self
            .t_distribution
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("the bound needs a t distribution".into()))?;
        let j1 = self.counts.j[1];
        if dist.len() > j1 + 1 && dist[j1 + 1..].iter().any(|&p| p != 0.0) {
            return Err(Error::Domain(format!("t distribution has mass above J1 = {j1}")));
        }
        for &p in dist {
            check_probability("p(t)", p)?;
        }
        let total: f64 = dist.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("t distribution sums to {total}, not 1")));
        }
        Ok(dist)
    }

    pub fn check_lengths(&self) -> Result<()> {
        if self.n_under <= self.l && self.l <= self.n_bar {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "need N_under <= l <= N_bar, got {} <= {} <= {}",
                self.n_under, self.l, self.n_bar
            )))
        }
    }
}

/// `Σ_t p(t/J¹) min{2^{J¹h̄(t/J¹) + K² − m}, 1}` with `K²` chosen by `direction`.
pub fn phase_error_bound(inputs: &BoundInputs, direction: Direction) -> Result<f64> {
    let dist = inputs.t_distribution()?;
    let j1 = inputs.counts.j[1];
    let k2 = direction.untrusted(&inputs.counts.j);
    let mut total = 0.0;
    for (t, &p) in dist.iter().enumerate().take(j1 + 1) {
        if p > 0.0 {
            total += p * min_decoding_bound(j1, k2, t, inputs.m)?;
        }
    }
    Ok(total.min(1.0))
}

pub fn forward_bound(inputs: &BoundInputs) -> Result<f64> {
    phase_error_bound(inputs, Direction::Forward)
}

pub fn reverse_bound(inputs: &BoundInputs) -> Result<f64> {
    phase_error_bound(inputs, Direction::Reverse)
}

pub fn twoway_bound(inputs: &BoundInputs) -> Result<f64> {
    phase_error_bound(inputs, Direction::TwoWay)
}

/// `P(N̄ + 1 − log₂ P)`, continuous at `P = 0`.
pub fn averaged_eve_info_bound(p_av: f64, n_bar: usize) -> Result<f64> {
    check_probability("P_av", p_av)?;
    if p_av == 0.0 {
        return Ok(0.0);
    }
    Ok(p_av * (n_bar as f64 + 1.0 - p_av.log2()))
}

pub fn averaged_success_bound(p_av: f64, n_under: usize) -> Result<f64> {
    success_bound(p_av, n_under)
}

/// `h̄(P)/N̲ + P` bits per final key bit.
pub fn per_bit_eve_info_bound(p_av: f64, n_under: usize) -> Result<f64> {
    check_probability("P_av", p_av)?;
    if n_under == 0 {
        return Err(Error::InvalidInput("per-bit bound needs N_under >= 1".into()));
    }
    Ok(hbar_unchecked(p_av) / n_under as f64 + p_av)
}

/// Every figure derived from one phase-error bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub direction: Direction,
    pub phase_error: f64,
    pub eve_info: f64,
    pub distinguishability: Distinguishability,
    pub tn_pair_fvdg: f64,
    pub tn_avg_fvdg: f64,
    pub success: Option<f64>,
    pub averaged_eve_info: f64,
    pub averaged_success: Option<f64>,
    pub per_bit_eve_info: Option<f64>,
}

pub fn bound_report(inputs: &BoundInputs, direction: Direction) -> Result<BoundReport> {
    let p = phase_error_bound(inputs, direction)?;
    let (tn_pair_fvdg, tn_avg_fvdg) = fvdg_trace_norm_bounds(p)?;
    let positive = |n: usize| (n > 0).then_some(n);
    Ok(BoundReport {
        direction,
        phase_error: p,
        eve_info: eve_info_bound(p, inputs.l)?,
        distinguishability: distinguishability_bounds(p)?,
        tn_pair_fvdg,
        tn_avg_fvdg,
        success: positive(inputs.l).map(|l| success_bound(p, l)).transpose()?,
        averaged_eve_info: averaged_eve_info_bound(p, inputs.n_bar)?,
        averaged_success: positive(inputs.n_under)
            .map(|n| averaged_success_bound(p, n))
            .transpose()?,
        per_bit_eve_info: positive(inputs.n_under)
            .map(|n| per_bit_eve_info_bound(p, n))
            .transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-6
    }

    fn inputs(j: [usize; 6], t_dist: Vec<f64>, m: usize) -> BoundInputs {
        BoundInputs {
            counts: ClassCounts::from_parts(j, 0),
            m,
            l: 4,
            n_bar: 4,
            n_under: 4,
            t_distribution: Some(t_dist),
        }
    }

    #[test]
    fn hbar_values() {
        assert_eq!(hbar(0.0).unwrap(), 0.0);
        assert_eq!(hbar(0.7).unwrap(), 1.0);
        assert_eq!(hbar(0.5).unwrap(), 1.0);
        assert!(close(hbar(0.25).unwrap(), 0.811278));
        assert!(hbar(1.5).is_err());
        assert!(hbar(f64::NAN).is_err());
    }

    #[test]
    fn theorem_bound_values() {
        assert_eq!(eve_info_bound(0.0, 3).unwrap(), 0.0);
        assert!(close(eve_info_bound(0.5, 10).unwrap(), 6.0));
        assert!(close(eve_info_bound(0.25, 4).unwrap(), 1.811278));

        let d = distinguishability_bounds(0.1).unwrap();
        assert!(close(d.fid_pair_lb, 0.8) && close(d.tn_pair_ub, 0.4));
        assert!(close(d.fid_avg_lb, 0.9) && close(d.tn_avg_ub, 0.2));
        assert_eq!(distinguishability_bounds(0.6).unwrap().tn_pair_ub, 2.0);
        let zero = distinguishability_bounds(0.0).unwrap();
        assert_eq!((zero.fid_pair_lb, zero.tn_pair_ub, zero.fid_avg_lb, zero.tn_avg_ub), (1.0, 0.0, 1.0, 0.0));

        assert!(close(success_bound(0.0, 3).unwrap(), 0.125));
        assert!(close(success_bound(1.0, 3).unwrap(), 0.875));
        assert!(close(success_bound(0.01, 8).unwrap(), 0.026241));
        assert!(success_bound(0.1, 0).is_err());
    }

    #[test]
    fn fvdg_bounds() {
        let (pair, avg) = fvdg_trace_norm_bounds(0.25).unwrap();
        assert!(close(pair, 2.0 * 0.75f64.sqrt()));
        assert!(close(avg, 2.0 * (1.0 - 0.5625f64).sqrt()));
        assert_eq!(fvdg_trace_norm_bounds(0.0).unwrap(), (0.0, 0.0));
        assert_eq!(fvdg_trace_norm_bounds(0.9).unwrap().0, 2.0);
    }

    #[test]
    fn min_decoding_values() {
        assert_eq!(min_decoding_bound(5, 0, 0, 3).unwrap(), 0.125);
        assert_eq!(min_decoding_bound(4, 2, 2, 8).unwrap(), 0.25);
        assert_eq!(min_decoding_bound(2, 5, 1, 3).unwrap(), 1.0);
        assert_eq!(min_decoding_bound(0, 0, 0, 2).unwrap(), 0.25);
        assert!(min_decoding_bound(2, 0, 3, 1).is_err());
    }

    #[test]
    fn direction_bounds() {
        let mut point = vec![0.0; 5];
        point[0] = 1.0;
        assert_eq!(forward_bound(&inputs([0, 4, 0, 0, 0, 0], point.clone(), 10)).unwrap(), 2f64.powi(-10));
        point[0] = 0.0;
        point[2] = 1.0;
        assert_eq!(forward_bound(&inputs([0, 4, 1, 0, 1, 0], point, 8)).unwrap(), 0.25);
        let two = inputs([0, 4, 0, 0, 0, 0], vec![0.5, 0.0, 0.0, 0.0, 0.5], 6);
        assert_eq!(forward_bound(&two).unwrap(), 0.1328125);

        assert_eq!(reverse_bound(&inputs([3, 2, 1, 0, 0, 0], vec![0.0, 1.0, 0.0], 10)).unwrap(), 2f64.powi(-4));
        assert_eq!(twoway_bound(&inputs([1, 2, 0, 0, 1, 0], vec![1.0, 0.0, 0.0], 5)).unwrap(), 0.125);

        let f = inputs([0, 2, 0, 0, 2, 1], vec![1.0, 0.0, 0.0], 9);
        assert!(reverse_bound(&f).unwrap() < forward_bound(&f).unwrap());
    }

    #[test]
    fn distribution_errors() {
        let mut i = inputs([0, 2, 0, 0, 0, 0], vec![0.5, 0.5, 0.0, 0.1], 3);
        assert!(forward_bound(&i).is_err());
        i.t_distribution = Some(vec![0.5, 0.2]);
        assert!(forward_bound(&i).is_err());
        i.t_distribution = None;
        assert!(forward_bound(&i).is_err());
    }

    #[test]
    fn averaged_values() {
        assert!(close(averaged_eve_info_bound(2f64.powi(-10), 20).unwrap(), 0.0302734375));
        assert_eq!(averaged_eve_info_bound(1.0, 0).unwrap(), 1.0);
        assert_eq!(averaged_eve_info_bound(0.0, 5).unwrap(), 0.0);
        assert!(averaged_eve_info_bound(1e-300, 5).unwrap() < 1e-295);
        assert!(close(averaged_success_bound(0.0, 8).unwrap(), 2f64.powi(-8)));
        assert!(close(averaged_success_bound(0.01, 8).unwrap(), 0.026241));
        assert_eq!(per_bit_eve_info_bound(0.0, 5).unwrap(), 0.0);
        assert!(close(per_bit_eve_info_bound(0.5, 100).unwrap(), 0.51));
        assert!(per_bit_eve_info_bound(0.5, 0).is_err());
    }

    #[test]
    fn report_collects_all_figures() {
        let i = BoundInputs::point_mass(ClassCounts::from_parts([0, 4, 0, 0, 0, 0], 0), 6, 3);
        let r = bound_report(&i, Direction::Forward).unwrap();
        assert_eq!(r.phase_error, 2f64.powi(-6));
        assert!(close(r.eve_info, eve_info_bound(r.phase_error, 3).unwrap()));
        assert!(r.success.is_some());
    }
}
