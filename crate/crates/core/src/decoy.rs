//! Estimation of the single-photon yield `q¹` and error rate `r¹` from counting rates.
//!
//! A source emits 0, 1 and "2 or more" photons with probabilities
//! `ν(0), ν(1), ν(2)`. In each basis the observed counting rate `p` and error
//! rate `s` satisfy
//!
//! ```text
//! p   = ν(0)p₀ + ν(1)(p_D + q¹) + ν(2)(p_D + q²)
//! s·p = ½ν(0)p₀ + ν(1)(½p_D + r¹q¹) + ν(2)(½p_D + r²q²)
//! ```
//!
//! with `q¹, q² ∈ [0, 1 − p_D]` and `r¹, r² ∈ [0, 1]`. Write
//! `B = p − ν(0)p₀ − p_D(ν(1) + ν(2))` and `S = s·p − ½ν(0)p₀ − ½p_D(ν(1) + ν(2))`.
//! Then `ν(1)q¹ + ν(2)q² = B` and `ν(1)r¹q¹ + ν(2)r²q² = S`, so an
//! observation is feasible iff `q¹` can be placed in its range and
//! `0 ≤ S ≤ B`; the set of feasible `q¹` is an interval.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::hbar;
use crate::error::{check_probability, Error, Result};

/// Tolerance of the counting equations in [`feasibility_check`].
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Default step of the `q¹` grid in [`minimize_key_term`].
pub const DEFAULT_GRID_RESOLUTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceDistribution {
    /// `ν(0), ν(1), ν(2)`; the last entry holds all multi-photon mass.
    pub nu: [f64; 3],
}

impl SourceDistribution {
    pub fn new(nu: [f64; 3]) -> Result<Self> {
        let s = Self { nu };
        s.validate()?;
        Ok(s)
    }

    /// Aggregates a photon-number distribution `ν(0), ν(1), ν(2), …`.
    pub fn from_photon_numbers(probs: &[f64]) -> Result<Self> {
        let get = |n: usize| probs.get(n).copied().unwrap_or(0.0);
        Self::new([get(0), get(1), probs.iter().skip(2).sum()])
    }

    pub fn validate(&self) -> Result<()> {
        for (n, &p) in self.nu.iter().enumerate() {
            check_probability(&format!("nu({n})"), p)?;
        }
        let total: f64 = self.nu.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("source distribution sums to {total}, not 1")));
        }
        if self.nu[1] <= 0.0 {
            return Err(Error::Domain("estimation needs nu(1) > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedRates {
    /// Counting rate of vacuum pulses, dark counts included.
    pub p0: f64,
    pub p_d: f64,
    pub p_nu_x: f64,
    pub p_nu_plus: f64,
    pub s_nu_x: f64,
    pub s_nu_plus: f64,
    /// Detector or generator error probability in the × basis.
    #[serde(default)]
    pub p_s: f64,
    /// The same in the + basis.
    #[serde(default)]
    pub p_s_tilde: f64,
}

impl ObservedRates {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p0", self.p0),
            ("p_d", self.p_d),
            ("p_nu_x", self.p_nu_x),
            ("p_nu_plus", self.p_nu_plus),
            ("s_nu_x", self.s_nu_x),
            ("s_nu_plus", self.s_nu_plus),
            ("p_s", self.p_s),
            ("p_s_tilde", self.p_s_tilde),
        ] {
            check_probability(name, p)?;
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        (self.p_nu_x - self.p_nu_plus).abs() <= FEASIBILITY_TOLERANCE
            && (self.s_nu_x - self.s_nu_plus).abs() <= FEASIBILITY_TOLERANCE
    }

    fn basis(&self, basis: EstimateBasis) -> (f64, f64) {
        match basis {
            EstimateBasis::Times => (self.p_nu_x, self.s_nu_x),
            EstimateBasis::Plus => (self.p_nu_plus, self.s_nu_plus),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EstimateBasis {
    Times,
    Plus,
}

/// An estimate pushed outside `[0, 1]` and clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClampWarning {
    pub quantity: String,
    pub raw: f64,
    pub clamped: f64,
}

fn clamp_unit(quantity: &str, raw: f64, warnings: &mut Vec<ClampWarning>) -> f64 {
    let clamped = raw.clamp(0.0, 1.0);
    if clamped != raw {
        warnings.push(ClampWarning {
            quantity: quantity.into(),
            raw,
            clamped,
        });
    }
    clamped
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub q1: f64,
    pub r1: f64,
    /// Non-empty when the observation lies outside the model.
    pub warnings: Vec<ClampWarning>,
}

/// Every unknown of the counting equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParameters {
    pub q1: f64,
    pub r1_x: f64,
    pub r1_plus: f64,
    pub q2_x: f64,
    pub q2_plus: f64,
    pub r2_x: f64,
    pub r2_plus: f64,
}

impl ChannelParameters {
    /// The exact rates these parameters produce, with `p_S = 0`.
    pub fn observed(&self, nu: &SourceDistribution, p0: f64, p_d: f64) -> ObservedRates {
        let [n0, n1, n2] = nu.nu;
        let count = |q2: f64| n0 * p0 + n1 * (p_d + self.q1) + n2 * (p_d + q2);
        let errors = |r1: f64, q2: f64, r2: f64| {
            0.5 * n0 * p0 + n1 * (0.5 * p_d + r1 * self.q1) + n2 * (0.5 * p_d + r2 * q2)
        };
        let p_x = count(self.q2_x);
        let p_plus = count(self.q2_plus);
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        ObservedRates {
            p0,
            p_d,
            p_nu_x: p_x,
            p_nu_plus: p_plus,
            s_nu_x: ratio(errors(self.r1_x, self.q2_x, self.r2_x), p_x),
            s_nu_plus: ratio(errors(self.r1_plus, self.q2_plus, self.r2_plus), p_plus),
            p_s: 0.0,
            p_s_tilde: 0.0,
        }
    }
}

/// `r = (r' − p_S)/(1 − 2p_S)`, inverting `r' = p_S(1 − r) + (1 − p_S)r`.
pub fn correct_detector_error(r1_raw: f64, p_s: f64) -> Result<f64> {
    let mut warnings = Vec::new();
    correct_detector_error_flagged(r1_raw, p_s, &mut warnings)
}

fn correct_detector_error_flagged(r1_raw: f64, p_s: f64, warnings: &mut Vec<ClampWarning>) -> Result<f64> {
    check_probability("r1_raw", r1_raw)?;
    check_probability("p_s", p_s)?;
    if p_s >= 0.5 {
        return Err(Error::Domain(format!("p_s = {p_s} must be below 1/2")));
    }
    Ok(clamp_unit("r1", (r1_raw - p_s) / (1.0 - 2.0 * p_s), warnings))
}

/// `q¹` and `r¹_×` for a source without multi-photon pulses.
pub fn estimate_vacuum_single(nu: &SourceDistribution, obs: &ObservedRates) -> Result<PointEstimate> {
    nu.validate()?;
    obs.validate()?;
    let [n0, n1, n2] = nu.nu;
    if n2 > 1e-15 {
        return Err(Error::InvalidInput(format!("nu(2) = {n2} but the closed form needs nu(2) = 0")));
    }
    let p = obs.p_nu_x;
    let denominator = p - n0 * obs.p0 - n1 * obs.p_d;
    if denominator <= 0.0 {
        return Err(Error::Infeasible(format!(
            "p_nu_x - nu(0) p0 - nu(1) p_d = {denominator} leaves no single-photon counts"
        )));
    }
    let mut warnings = Vec::new();
    let q1 = clamp_unit("q1", (p - n0 * obs.p0) / n1 - obs.p_d, &mut warnings);
    let raw = (obs.s_nu_x * p - 0.5 * n0 * obs.p0 - 0.5 * n1 * obs.p_d) / denominator;
    let raw = clamp_unit("r1_raw", raw, &mut warnings);
    let r1 = if obs.p_s == 0.0 {
        raw
    } else {
        correct_detector_error_flagged(raw, obs.p_s, &mut warnings)?
    };
    Ok(PointEstimate { q1, r1, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateInterval {
    pub q1_min: f64,
    pub q1_max: f64,
    pub r1_max: f64,
    /// The exact minimum of `r¹_×` over the feasible set.
    pub r1_min: f64,
    /// `a/(b + x)`, a closed-form lower bound on `r1_min`.
    pub r1_min_tilde: f64,
    /// `ν(2)(1 − p_D)/ν(1)`, which bounds `q1_max − q1_min`.
    pub q_width_bound: f64,
    /// `(x/b)(1 + a/b)`, which bounds `r1_max − r1_min_tilde` (and so `r1_max − r1_min`)
    /// when `a ≥ 0`; for `a < 0` the proxy is negative and the bound says nothing.
    pub r_width_bound: f64,
}

/// The closed forms of the symmetric case, `p_× = p_+` and `s_× = s_+`.
pub fn estimate_interval_symmetric(nu: &SourceDistribution, obs: &ObservedRates) -> Result<EstimateInterval> {
    nu.validate()?;
    obs.validate()?;
    if !obs.is_symmetric() {
        return Err(Error::InvalidInput("the symmetric closed forms need p_x = p_plus and s_x = s_plus".into()));
    }
    let [n0, n1, n2] = nu.nu;
    let (p0, pd, p) = (obs.p0, obs.p_d, obs.p_nu_x);
    let sp = obs.s_nu_x * p;
    let b = p - p0 * n0 - pd * n1 - n2;
    if b <= 0.0 {
        return Err(Error::Infeasible(format!(
            "p - p0 nu(0) - p_d nu(1) - nu(2) = {b} is not positive"
        )));
    }
    let a0 = sp - 0.5 * p0 * n0 - 0.5 * pd * n1 - 0.5 * pd * n2;
    let x = n2 * (1.0 - pd);
    let a = a0 - x;
    Ok(EstimateInterval {
        q1_min: (p - p0 * n0 - n2) / n1 - pd,
        q1_max: (p - p0 * n0 - n2 * pd) / n1 - pd,
        r1_max: a0 / b,
        r1_min: (a / b).max(0.0),
        r1_min_tilde: a / (b + x),
        q_width_bound: x / n1,
        r_width_bound: (x / b) * (1.0 + a / b),
    })
}

/// Range of `q¹` allowed by the counting equation of one basis.
fn q1_range(nu: &SourceDistribution, obs: &ObservedRates, basis: EstimateBasis) -> Result<(f64, f64, f64)> {
    let [n0, n1, n2] = nu.nu;
    let (p, s) = obs.basis(basis);
    let pd = obs.p_d;
    let b = p - n0 * obs.p0 - pd * (n1 + n2);
    let big_s = s * p - 0.5 * n0 * obs.p0 - 0.5 * pd * (n1 + n2);
    let eps = FEASIBILITY_TOLERANCE;
    if big_s < -eps || big_s > b + eps {
        return Err(Error::Infeasible(format!(
            "error counts {big_s} cannot be split between single and multi-photon pulses carrying {b}"
        )));
    }
    let lo = ((b - n2 * (1.0 - pd)) / n1).max(0.0);
    let hi = (b / n1).min(1.0 - pd);
    Ok((lo, hi, big_s.max(0.0)))
}

/// The feasible `q¹` interval and `S_×`, intersecting both bases.
fn feasible_q1(nu: &SourceDistribution, obs: &ObservedRates) -> Result<(f64, f64, f64)> {
    nu.validate()?;
    obs.validate()?;
    let (lo_x, hi_x, s_x) = q1_range(nu, obs, EstimateBasis::Times)?;
    let (lo_p, hi_p, _) = q1_range(nu, obs, EstimateBasis::Plus)?;
    let lo = lo_x.max(lo_p);
    let hi = hi_x.min(hi_p);
    if lo > hi + FEASIBILITY_TOLERANCE {
        return Err(Error::Infeasible(format!("no single-photon yield fits both bases: [{lo}, {hi}]")));
    }
    Ok((lo, hi.max(lo), s_x))
}

/// Exact `q¹` and `r¹_×` ranges over the feasible set of both bases.
///
/// The width bounds are the symmetric-case expressions built from the
/// × basis, which the exact widths never exceed.
pub fn estimate_interval(nu: &SourceDistribution, obs: &ObservedRates) -> Result<EstimateInterval> {
    let (lo, hi, s_x) = feasible_q1(nu, obs)?;
    let [n0, n1, n2] = nu.nu;
    let pd = obs.p_d;
    let p = obs.p_nu_x;
    let b_x = p - n0 * obs.p0 - pd * (n1 + n2);
    let r_at = |q1: f64, r2: f64| {
        let single = n1 * q1;
        if single <= 0.0 {
            return if r2 == 0.0 { 1.0 } else { 0.0 };
        }
        let multi = b_x - single;
        ((s_x - r2 * multi) / single).clamp(0.0, 1.0)
    };
    let b = p - obs.p0 * n0 - pd * n1 - n2;
    let x = n2 * (1.0 - pd);
    let a = s_x - x;
    let (r1_min_tilde, r_width_bound) = if b > 0.0 {
        (a / (b + x), (x / b) * (1.0 + a / b))
    } else {
        (0.0, f64::INFINITY)
    };
    Ok(EstimateInterval {
        q1_min: lo,
        q1_max: hi,
        r1_max: r_at(lo, 0.0),
        r1_min: r_at(lo, 1.0),
        r1_min_tilde,
        q_width_bound: x / n1,
        r_width_bound,
    })
}

/// Whether the parameters lie in range and reproduce all four observations within
/// [`FEASIBILITY_TOLERANCE`].
pub fn feasibility_check(nu: &SourceDistribution, obs: &ObservedRates, candidate: &ChannelParameters) -> bool {
    let pd = obs.p_d;
    let yields = [candidate.q1, candidate.q2_x, candidate.q2_plus];
    let rates = [candidate.r1_x, candidate.r1_plus, candidate.r2_x, candidate.r2_plus];
    let eps = FEASIBILITY_TOLERANCE;
    if yields.iter().any(|&q| !(-eps..=1.0 - pd + eps).contains(&q)) || rates.iter().any(|&r| !(-eps..=1.0 + eps).contains(&r)) {
        return false;
    }
    let expected = candidate.observed(nu, obs.p0, pd);
    let close = |a: f64, b: f64| (a - b).abs() <= eps;
    close(expected.p_nu_x, obs.p_nu_x)
        && close(expected.p_nu_plus, obs.p_nu_plus)
        && close(expected.s_nu_x * expected.p_nu_x, obs.s_nu_x * obs.p_nu_x)
        && close(expected.s_nu_plus * expected.p_nu_plus, obs.s_nu_plus * obs.p_nu_plus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyTermMinimum {
    pub q1: f64,
    pub r1: f64,
    /// `q¹(1 − h̄(r¹_×))`.
    pub value: f64,
}

/// Minimises `q¹(1 − h̄(r¹_×))` over the feasible set.
///
/// For fixed `q¹` the term is smallest at the largest admissible error rate
/// `r¹_× = min{1, S_×/(ν(1)q¹)}`, so the search runs over `q¹` alone: the
/// lower end of the feasible interval, where the analysis places the optimum,
/// plus a grid of step `resolution` across the interval. Ties go to the
/// smaller `(q¹, r¹)`.
pub fn minimize_key_term(nu: &SourceDistribution, obs: &ObservedRates, resolution: f64) -> Result<KeyTermMinimum> {
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::InvalidInput(format!("grid resolution {resolution} must lie in (0, 1]")));
    }
    let (lo, hi, s_x) = feasible_q1(nu, obs)?;
    let n1 = nu.nu[1];
    let evaluate = |q1: f64| -> Result<KeyTermMinimum> {
        let r1 = if q1 > 0.0 { (s_x / (n1 * q1)).min(1.0) } else { 1.0 };
        Ok(KeyTermMinimum {
            q1,
            r1,
            value: q1 * (1.0 - hbar(r1)?),
        })
    };
    let mut best = evaluate(lo)?;
    let steps = ((hi - lo) / resolution).ceil() as usize;
    for k in 1..=steps {
        let q1 = (lo + k as f64 * resolution).min(hi);
        let c = evaluate(q1)?;
        let better = c.value < best.value
            || (c.value == best.value && (c.q1, c.r1).partial_cmp(&(best.q1, best.r1)) == Some(std::cmp::Ordering::Less));
        if better {
            best = c;
        }
    }
    Ok(best)
}

/// Monte Carlo counting and error rates of `pulses` pulses per basis.
pub fn simulate_observed_rates<R: Rng + ?Sized>(
    nu: &SourceDistribution,
    params: &ChannelParameters,
    p0: f64,
    p_d: f64,
    pulses: usize,
    rng: &mut R,
) -> Result<ObservedRates> {
    nu.validate()?;
    let mut run = |q2: f64, r1: f64, r2: f64| -> (f64, f64) {
        let (mut counts, mut errors) = (0usize, 0usize);
        for _ in 0..pulses {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let (detected, error_prob) = if u < nu.nu[0] {
                (v < p0, 0.5)
            } else {
                let (q, r) = if u < nu.nu[0] + nu.nu[1] { (params.q1, r1) } else { (q2, r2) };
                if v < p_d {
                    (true, 0.5)
                } else {
                    (v < p_d + q, r)
                }
            };
            if detected {
                counts += 1;
                if rng.random::<f64>() < error_prob {
                    errors += 1;
                }
            }
        }
        let p = counts as f64 / pulses as f64;
        let s = if counts > 0 { errors as f64 / counts as f64 } else { 0.0 };
        (p, s)
    };
    let (p_nu_x, s_nu_x) = run(params.q2_x, params.r1_x, params.r2_x);
    let (p_nu_plus, s_nu_plus) = run(params.q2_plus, params.r1_plus, params.r2_plus);
    Ok(ObservedRates {
        p0,
        p_d,
        p_nu_x,
        p_nu_plus,
        s_nu_x,
        s_nu_plus,
        p_s: 0.0,
        p_s_tilde: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn rates(p0: f64, p_d: f64, p: f64, s: f64) -> ObservedRates {
        ObservedRates {
            p0,
            p_d,
            p_nu_x: p,
            p_nu_plus: p,
            s_nu_x: s,
            s_nu_plus: s,
            p_s: 0.0,
            p_s_tilde: 0.0,
        }
    }

    #[test]
    fn vacuum_single_example() {
        let nu = SourceDistribution::new([0.5, 0.5, 0.0]).unwrap();
        let est = estimate_vacuum_single(&nu, &rates(0.01, 0.001, 0.1055, 0.0115 / 0.1055)).unwrap();
        assert!(close(est.q1, 0.2, 1e-12));
        assert!(close(est.r1, 0.0875, 1e-12));
        assert!(est.warnings.is_empty());

        let perfect = SourceDistribution::new([0.0, 1.0, 0.0]).unwrap();
        let est = estimate_vacuum_single(&perfect, &rates(0.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!((est.q1, est.r1), (1.0, 0.0));
    }

    #[test]
    fn vacuum_single_errors() {
        let nu = SourceDistribution::new([0.5, 0.5, 0.0]).unwrap();
        let only_dark = rates(0.01, 0.001, 0.5 * 0.01 + 0.5 * 0.001, 0.5);
        assert!(matches!(estimate_vacuum_single(&nu, &only_dark), Err(Error::Infeasible(_))));
        assert!(SourceDistribution::new([0.5, 0.0, 0.5]).is_err());
        let multi = SourceDistribution::new([0.4, 0.5, 0.1]).unwrap();
        assert!(estimate_vacuum_single(&multi, &rates(0.01, 0.001, 0.2, 0.05)).is_err());
    }

    #[test]
    fn clamping_is_flagged() {
        let nu = SourceDistribution::new([0.5, 0.5, 0.0]).unwrap();
        let est = estimate_vacuum_single(&nu, &rates(0.01, 0.001, 0.1055, 0.001)).unwrap();
        assert_eq!(est.r1, 0.0);
        assert_eq!(est.warnings.len(), 1);
    }

    #[test]
    fn detector_error_correction() {
        assert_eq!(correct_detector_error(0.3, 0.0).unwrap(), 0.3);
        assert_eq!(correct_detector_error(0.02, 0.02).unwrap(), 0.0);
        assert!(close(correct_detector_error(0.0875, 0.01).unwrap(), 0.0775 / 0.98, 1e-12));
        assert!(correct_detector_error(0.1, 0.5).is_err());
    }

    #[test]
    fn symmetric_interval_example() {
        let nu = SourceDistribution::new([0.05, 0.90, 0.05]).unwrap();
        let obs = rates(0.01, 0.001, 0.15, 0.05);
        let iv = estimate_interval_symmetric(&nu, &obs).unwrap();
        assert!(close(iv.q1_min, (0.15 - 0.0005 - 0.05) / 0.9 - 0.001, 1e-12));
        assert!(close(iv.q1_max - iv.q1_min, 0.05 * 0.999 / 0.9, 1e-12));
        let general = estimate_interval(&nu, &obs).unwrap();
        for (a, b) in [
            (iv.q1_min, general.q1_min),
            (iv.q1_max, general.q1_max),
            (iv.r1_max, general.r1_max),
            (iv.r1_min, general.r1_min),
            (iv.r1_min_tilde, general.r1_min_tilde),
        ] {
            assert!(close(a, b, 1e-12), "{a} vs {b}");
        }
        assert!(iv.r1_min_tilde <= iv.r1_min);
        // The width bound only speaks when `r̃¹_min ≥ 0`.
        if iv.r1_min_tilde >= 0.0 {
            assert!(iv.r1_max - iv.r1_min_tilde <= iv.r_width_bound + 1e-12);
        }
    }

    #[test]
    fn width_bound_holds_when_a_is_nonnegative() {
        let nu = SourceDistribution::new([0.3, 0.69, 0.01]).unwrap();
        let obs = rates(0.02, 0.001, 0.2, 0.3);
        let iv = estimate_interval_symmetric(&nu, &obs).unwrap();
        assert!(iv.r1_min_tilde >= 0.0, "{iv:?}");
        assert!(iv.r1_max - iv.r1_min_tilde <= iv.r_width_bound + 1e-12);
    }

    #[test]
    fn interval_without_multi_photons_collapses() {
        let nu = SourceDistribution::new([0.5, 0.5, 0.0]).unwrap();
        let obs = rates(0.01, 0.001, 0.1055, 0.0115 / 0.1055);
        let iv = estimate_interval_symmetric(&nu, &obs).unwrap();
        let point = estimate_vacuum_single(&nu, &obs).unwrap();
        assert!(close(iv.q1_min, iv.q1_max, 1e-15));
        assert!(close(iv.q1_min, point.q1, 1e-12));
        assert!(close(iv.r1_max, point.r1, 1e-12));
    }

    #[test]
    fn extremal_multi_photon_point_is_feasible() {
        let nu = SourceDistribution::new([0.05, 0.90, 0.05]).unwrap();
        let obs = rates(0.01, 0.001, 0.15, 0.05);
        let iv = estimate_interval_symmetric(&nu, &obs).unwrap();
        let c = ChannelParameters {
            q1: iv.q1_min,
            r1_x: iv.r1_max,
            r1_plus: iv.r1_max,
            q2_x: 1.0 - 0.001,
            q2_plus: 1.0 - 0.001,
            r2_x: 0.0,
            r2_plus: 0.0,
        };
        assert!(feasibility_check(&nu, &obs, &c));
        let mut off = obs;
        off.p_nu_x += 1e-3;
        assert!(!feasibility_check(&nu, &off, &c));
    }

    #[test]
    fn key_term_minimum() {
        let nu = SourceDistribution::new([0.05, 0.90, 0.05]).unwrap();
        let obs = rates(0.01, 0.001, 0.15, 0.05);
        let iv = estimate_interval_symmetric(&nu, &obs).unwrap();
        let min = minimize_key_term(&nu, &obs, DEFAULT_GRID_RESOLUTION).unwrap();
        assert!(close(min.value, iv.q1_min * (1.0 - hbar(iv.r1_max).unwrap()), 1e-12));
        assert!(minimize_key_term(&nu, &obs, 0.0).is_err());
    }

    #[test]
    fn infeasible_error_rates() {
        let nu = SourceDistribution::new([0.05, 0.90, 0.05]).unwrap();
        assert!(matches!(estimate_interval(&nu, &rates(0.01, 0.2, 0.15, 0.01)), Err(Error::Infeasible(_))));
    }
}
