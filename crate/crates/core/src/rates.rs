//! Asymptotic key-generation rates per sent pulse.
//!
//! Every rate carries the factor ½ for basis sifting and has the form
//! `½[photon term + credit − leak]`, where the leak `p(1 − η(s))` pays for
//! error correction in the + basis:
//!
//! | rate          | photon term        | credit      |
//! |---------------|--------------------|-------------|
//! | `I→`          | `ν(1)q¹(1−h̄(r¹))` | `ν(0)p₀`    |
//! | `I←`          | `ν(1)q¹(1−h̄(r¹))` | `p_D`       |
//! | `I↔`          | `ν(1)q¹(1−h̄(r¹))` | `ν(0)p_D`   |
//! | `Ī→`          | `ν(1)q̄¹(1−h̄(r̄¹))` | `ν(0)p₀`    |
//! | `Ī←`          | `ν(1)q̄¹(1−h̄(r̄¹))` | 0           |
//! | `I_GLLP-ILM`  | `ν(1)q̄¹(1−h̄(r̄¹))` | 0           |
//!
//! The barred parameters fold dark counts into the single-photon yield. By
//! concavity of `h̄` the barred photon term never exceeds the plain one.
//! Negative rates mean no key and are returned unclamped.

use serde::{Deserialize, Serialize};

use crate::bounds::{hbar, Direction};
use crate::decoy::SourceDistribution;
use crate::error::{check_probability, Error, Result};

/// The error-correction rate `η(e)`: the fraction of a block kept after correcting error rate `e`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Eta {
    /// `1 − h̄(e)`.
    #[default]
    Shannon,
    /// `1 − f·h̄(e)`, floored at 0, for a code working at efficiency `f ≥ 1`.
    Efficiency { f: f64 },
    /// A fixed rate independent of `e`.
    Constant { eta: f64 },
}

impl Eta {
    pub fn eval(&self, e: f64) -> Result<f64> {
        let h = hbar(e)?;
        match *self {
            Eta::Shannon => Ok(1.0 - h),
            Eta::Efficiency { f } => {
                if !(f >= 1.0 && f.is_finite()) {
                    return Err(Error::Domain(format!("efficiency f = {f} must be at least 1")));
                }
                Ok((1.0 - f * h).max(0.0))
            }
            Eta::Constant { eta } => {
                check_probability("eta", eta)?;
                Ok(eta)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    pub nu: SourceDistribution,
    pub q1: f64,
    pub r1: f64,
    pub p0: f64,
    pub p_d: f64,
    pub p_nu_plus: f64,
    pub s_nu_plus: f64,
    #[serde(default)]
    pub eta: Eta,
}

impl RateInputs {
    pub fn validate(&self) -> Result<()> {
        self.nu.validate()?;
        for (name, p) in [
            ("q1", self.q1),
            ("r1", self.r1),
            ("p0", self.p0),
            ("p_d", self.p_d),
            ("p_nu_plus", self.p_nu_plus),
            ("s_nu_plus", self.s_nu_plus),
        ] {
            check_probability(name, p)?;
        }
        self.eta.eval(self.s_nu_plus).map(|_| ())
    }

    fn photon_term(&self, q: f64, r: f64) -> f64 {
        self.nu.nu[1] * q * (1.0 - crate::bounds::hbar_unchecked(r))
    }

    fn leak(&self) -> Result<f64> {
        Ok(self.p_nu_plus * (1.0 - self.eta.eval(self.s_nu_plus)?))
    }

    fn rate(&self, photon: f64, credit: f64) -> Result<f64> {
        self.validate()?;
        Ok(0.5 * (photon + credit - self.leak()?))
    }

    fn plain(&self) -> f64 {
        self.photon_term(self.q1, self.r1)
    }

    fn barred(&self) -> Result<f64> {
        let (q, r) = gllp_effective_params(self.q1, self.r1, self.p_d)?;
        Ok(self.photon_term(q, r))
    }
}

/// `q̄¹ = q¹ + p_D` and `r̄¹ = (r¹q¹ + ½p_D)/(q¹ + p_D)`.
pub fn gllp_effective_params(q1: f64, r1: f64, p_d: f64) -> Result<(f64, f64)> {
    if p_d == 0.0 && q1 > 0.0 {
        // Exact, so that the barred rates coincide with the plain ones.
        return Ok((q1, r1));
    }
    let q_bar = q1 + p_d;
    if q_bar <= 0.0 {
        return Err(Error::Domain("q1 + p_d must be positive".into()));
    }
    Ok((q_bar, (r1 * q1 + 0.5 * p_d) / q_bar))
}

pub fn rate_forward(i: &RateInputs) -> Result<f64> {
    i.rate(i.plain(), i.nu.nu[0] * i.p0)
}

pub fn rate_reverse(i: &RateInputs) -> Result<f64> {
    i.rate(i.plain(), i.p_d)
}

pub fn rate_twoway(i: &RateInputs) -> Result<f64> {
    i.rate(i.plain(), i.nu.nu[0] * i.p_d)
}

pub fn rate_gllp_ilm(i: &RateInputs) -> Result<f64> {
    i.rate(i.barred()?, 0.0)
}

pub fn rate_bar_forward(i: &RateInputs) -> Result<f64> {
    i.rate(i.barred()?, i.nu.nu[0] * i.p0)
}

pub fn rate_bar_reverse(i: &RateInputs) -> Result<f64> {
    i.rate(i.barred()?, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub forward: f64,
    pub reverse: f64,
    pub twoway: f64,
    pub bar_forward: f64,
    pub bar_reverse: f64,
    pub gllp_ilm: f64,
}

impl RateTable {
    pub fn compute(i: &RateInputs) -> Result<Self> {
        Ok(Self {
            forward: rate_forward(i)?,
            reverse: rate_reverse(i)?,
            twoway: rate_twoway(i)?,
            bar_forward: rate_bar_forward(i)?,
            bar_reverse: rate_bar_reverse(i)?,
            gllp_ilm: rate_gllp_ilm(i)?,
        })
    }

    /// Whether every rate is non-positive.
    pub fn no_key(&self) -> bool {
        [self.forward, self.reverse, self.twoway, self.bar_forward, self.bar_reverse, self.gllp_ilm]
            .iter()
            .all(|&r| r <= 0.0)
    }
}

/// `N(1 − ν(1)q¹(1−h̄(r¹))/p − c/p)` with the credit `c` of `direction`.
pub fn initial_eve_information_rates(i: &RateInputs, n: f64, direction: Direction) -> Result<f64> {
    i.validate()?;
    if i.p_nu_plus <= 0.0 {
        return Err(Error::Domain("the counting rate p_nu_plus must be positive".into()));
    }
    let credit = match direction {
        Direction::Forward => i.nu.nu[0] * i.p0,
        Direction::Reverse => i.p_d,
        Direction::TwoWay => i.nu.nu[0] * i.p_d,
    };
    Ok(n * (1.0 - i.plain() / i.p_nu_plus - credit / i.p_nu_plus))
}

/// `J¹h̄(r¹)` plus the untrusted counts of `direction`.
pub fn initial_eve_information_counts(j: &[usize; 6], r1: f64, direction: Direction) -> Result<f64> {
    Ok(j[1] as f64 * hbar(r1)? + direction.untrusted(j) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingCheck {
    pub relation: String,
    /// Left side minus right side.
    pub slack: f64,
    /// False when the relation's proviso does not hold for these inputs.
    pub applicable: bool,
}

impl OrderingCheck {
    pub fn holds(&self, tolerance: f64) -> bool {
        !self.applicable || self.slack >= -tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub rates: RateTable,
    pub checks: Vec<OrderingCheck>,
}

impl OrderingReport {
    pub fn all_hold(&self, tolerance: f64) -> bool {
        self.checks.iter().all(|c| c.holds(tolerance))
    }
}

/// The chains `I→ ≥ Ī→ ≥ I_GLLP-ILM`, `I← ≥ I↔ ≥ Ī← ≥ I_GLLP-ILM` and
/// `I→ ≥ I↔`, plus `I→ ≥ I←`, which needs `ν(0)p₀ ≥ p_D`.
///
/// `I→ ≥ I↔` compares credits `ν(0)p₀ ≥ ν(0)p_D` and so needs `p₀ ≥ p_D`,
/// which holds whenever the vacuum counting rate includes the dark counts.
pub fn verify_rate_ordering(i: &RateInputs) -> Result<OrderingReport> {
    let r = RateTable::compute(i)?;
    let check = |relation: &str, lhs: f64, rhs: f64, applicable: bool| OrderingCheck {
        relation: relation.into(),
        slack: lhs - rhs,
        applicable,
    };
    let checks = vec![
        check("I_fwd >= Ibar_fwd", r.forward, r.bar_forward, true),
        check("Ibar_fwd >= I_GLLP", r.bar_forward, r.gllp_ilm, true),
        check("I_rev >= I_two", r.reverse, r.twoway, true),
        check("I_two >= Ibar_rev", r.twoway, r.bar_reverse, true),
        check("Ibar_rev >= I_GLLP", r.bar_reverse, r.gllp_ilm, true),
        check("I_fwd >= I_two", r.forward, r.twoway, i.p0 >= i.p_d),
        check("I_fwd >= I_rev", r.forward, r.reverse, i.nu.nu[0] * i.p0 >= i.p_d),
    ];
    Ok(OrderingReport { rates: r, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perfect() -> RateInputs {
        RateInputs {
            nu: SourceDistribution::new([0.0, 1.0, 0.0]).unwrap(),
            q1: 1.0,
            r1: 0.0,
            p0: 0.0,
            p_d: 0.0,
            p_nu_plus: 1.0,
            s_nu_plus: 0.0,
            eta: Eta::Shannon,
        }
    }

    fn full_set() -> RateInputs {
        RateInputs {
            nu: SourceDistribution::new([0.5, 0.5, 0.0]).unwrap(),
            q1: 0.2,
            r1: 0.0875,
            p0: 0.01,
            p_d: 0.001,
            p_nu_plus: 0.1055,
            s_nu_plus: 0.109,
            eta: Eta::Shannon,
        }
    }

    #[test]
    fn gllp_params() {
        assert_eq!(gllp_effective_params(0.2, 0.1, 0.0).unwrap(), (0.2, 0.1));
        let (q, r) = gllp_effective_params(0.2, 0.0875, 0.001).unwrap();
        assert!((q - 0.201).abs() < 1e-15);
        assert!((r - 0.018 / 0.201).abs() < 1e-12);
        assert_eq!(gllp_effective_params(0.0, 0.3, 0.01).unwrap(), (0.01, 0.5));
        assert!(gllp_effective_params(0.0, 0.3, 0.0).is_err());
    }

    #[test]
    fn perfect_source_rates() {
        let t = RateTable::compute(&perfect()).unwrap();
        assert_eq!(t.forward, 0.5);
        assert_eq!(t.reverse, 0.5);
        assert_eq!(t.twoway, 0.5);
        assert!(!t.no_key());
    }

    #[test]
    fn high_phase_error_leaves_only_credit() {
        let mut i = full_set();
        i.r1 = 0.7;
        i.eta = Eta::Constant { eta: 1.0 };
        assert!((rate_forward(&i).unwrap() - 0.5 * 0.5 * 0.01).abs() < 1e-15);
    }

    #[test]
    fn full_set_matches_direct_evaluation() {
        let i = full_set();
        let h = |x: f64| -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        let photon = 0.5 * 0.2 * (1.0 - h(0.0875));
        let leak = 0.1055 * h(0.109);
        assert!((rate_forward(&i).unwrap() - 0.5 * (photon + 0.005 - leak)).abs() < 1e-12);
        assert!((rate_reverse(&i).unwrap() - 0.5 * (photon + 0.001 - leak)).abs() < 1e-12);
        assert!((rate_twoway(&i).unwrap() - 0.5 * (photon + 0.0005 - leak)).abs() < 1e-12);
        let rb = 0.018 / 0.201;
        let photon_bar = 0.5 * 0.201 * (1.0 - h(rb));
        assert!((rate_gllp_ilm(&i).unwrap() - 0.5 * (photon_bar - leak)).abs() < 1e-12);
        assert!((rate_bar_forward(&i).unwrap() - 0.5 * (photon_bar + 0.005 - leak)).abs() < 1e-12);
        assert_ne!(rate_bar_forward(&i).unwrap(), rate_forward(&i).unwrap());
    }

    #[test]
    fn zero_dark_counts_collapse_the_chain() {
        let mut i = full_set();
        i.p_d = 0.0;
        let t = RateTable::compute(&i).unwrap();
        assert_eq!(t.bar_reverse, t.reverse);
        assert_eq!(t.twoway, t.reverse);
        assert_eq!(t.bar_forward, t.forward);
        assert!(verify_rate_ordering(&i).unwrap().all_hold(1e-12));
    }

    #[test]
    fn initial_information() {
        let j = [1, 4, 1, 1, 1, 0];
        assert_eq!(initial_eve_information_counts(&j, 0.5, Direction::Forward).unwrap(), 6.0);
        assert_eq!(initial_eve_information_counts(&j, 0.5, Direction::Reverse).unwrap(), 6.0);
        assert_eq!(initial_eve_information_rates(&perfect(), 100.0, Direction::Forward).unwrap(), 0.0);
    }

    #[test]
    fn eta_variants() {
        assert_eq!(Eta::Shannon.eval(0.0).unwrap(), 1.0);
        assert_eq!(Eta::Efficiency { f: 1.2 }.eval(0.5).unwrap(), 0.0);
        assert!(Eta::Efficiency { f: 0.5 }.eval(0.1).is_err());
        assert_eq!(Eta::Constant { eta: 0.3 }.eval(0.2).unwrap(), 0.3);
    }
}
