//! Exact figures of merit for Eve's states under an `l`-qubit Pauli channel.
//!
//! With `|y⟩` sent in the + basis, Eve holds `ρ_E(y) = ⊕_x P(x) |ψ_{y,x}⟩⟨ψ_{y,x}|`
//! where `|ψ_{y,x}⟩ = Σ_z (−1)^{z·y} √P(z|x) |x,z⟩`. The blocks indexed by `x`
//! are mutually orthogonal, so every quantity below reduces to sums over
//! blocks of pure-state expressions:
//!
//! * the average state is `⊕_x P(x) diag(P(·|x))`, hence
//!   `I_E = H(Z|X)` in bits;
//! * `⟨ψ_{y,x}|ψ_{y',x}⟩ = Σ_z (−1)^{z·(y⊕y')} P(z|x)`, so pair figures depend
//!   only on `d = y ⊕ y'`;
//! * the fidelity of a pure block with its diagonal is `√(Σ_z P(z|x)²)`.
//!
//! Fidelity is `F(ρ, σ) = Tr √(√σ ρ √σ)` (not squared). Logarithms are base 2
//! and `0 log 0 = 0`. [`dense`] recomputes the same figures from explicit
//! density matrices for `l ≤ 2`.

pub mod dense;
pub mod ensemble;
pub mod reduce;
pub mod suite;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub use reduce::{reduce_code_channel, CodeChannel, ReducedChannel, DEFAULT_REDUCE_GUARD};

/// Default cap on `l` for exact Eve computations.
pub const DEFAULT_ORACLE_GUARD: usize = 4;

/// A joint distribution `P(x, z)` over `x, z ∈ F₂^l`.
///
/// Entry `x | z << l` of the probability table holds `P(x, z)`, with bit `i`
/// of each mask the `i`-th coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliErrorDistribution {
    l: usize,
    probs: Vec<f64>,
}

impl PauliErrorDistribution {
    pub fn new(l: usize, probs: Vec<f64>) -> Result<Self> {
        Self::new_guarded(l, probs, DEFAULT_ORACLE_GUARD)
    }

    pub fn new_guarded(l: usize, probs: Vec<f64>, guard: usize) -> Result<Self> {
        if l > guard {
            return Err(Error::Capacity {
                what: "Pauli distribution logical length",
                size: l as u64,
                limit: guard as u64,
            });
        }
        let expected = 1usize << (2 * l);
        if probs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: probs.len(),
            });
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::Domain(format!("probability {p} is negative or not finite")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { l, probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(l: usize, weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::Domain("weights must have a positive sum".into()));
        }
        Self::new_guarded(l, weights.into_iter().map(|w| w / sum).collect(), usize::MAX)
    }

    pub fn point_mass(l: usize, x: u64, z: u64) -> Self {
        let mut probs = vec![0.0; 1 << (2 * l)];
        probs[(x | z << l) as usize] = 1.0;
        Self { l, probs }
    }

    /// `P(z|x)` uniform over `F₂^l` for every `x`, with `x` drawn from `px`.
    pub fn uniform_phase(l: usize, px: &[f64]) -> Result<Self> {
        if px.len() != 1 << l {
            return Err(Error::DimensionMismatch {
                expected: 1 << l,
                found: px.len(),
            });
        }
        let scale = 1.0 / (1u64 << l) as f64;
        let mut probs = vec![0.0; 1 << (2 * l)];
        for (x, &p) in px.iter().enumerate() {
            for z in 0..1usize << l {
                probs[x | z << l] = p * scale;
            }
        }
        Self::new_guarded(l, probs, usize::MAX)
    }

    /// A random distribution for exercising bounds.
    ///
    /// Mixes dense, sparse and nearly error-free shapes so that small and
    /// large phase-error probabilities are both well covered.
    pub fn random<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Self {
        let n = 1usize << (2 * l);
        let mut weights = vec![0.0; n];
        let support = rng.random_range(1..=n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..support {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        let sharpness = [0.25, 1.0, 3.0][rng.random_range(0..3)];
        for &i in &idx[..support] {
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            weights[i] = (-u.ln()).powf(sharpness);
        }
        if rng.random_bool(0.3) {
            // Concentrate on z = 0 so that P_ph is small.
            let boost = 10f64.powf(rng.random_range(0.0..4.0));
            for x in 0..1usize << l {
                weights[x] += boost * rng.random::<f64>();
            }
        }
        Self::from_weights(l, weights).expect("weights have a positive entry")
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: u64, z: u64) -> f64 {
        self.probs[(x | z << self.l) as usize]
    }

    pub fn prob_of(&self, x: &BitVector, z: &BitVector) -> Result<f64> {
        for v in [x, z] {
            if v.len() != self.l {
                return Err(Error::DimensionMismatch {
                    expected: self.l,
                    found: v.len(),
                });
            }
        }
        Ok(self.prob(x.to_mask(), z.to_mask()))
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        let side = 1usize << self.l;
        (0..side)
            .map(|x| (0..side).map(|z| self.probs[x | z << self.l]).sum())
            .collect()
    }

    pub fn z_marginal(&self) -> Vec<f64> {
        let side = 1usize << self.l;
        (0..side)
            .map(|z| (0..side).map(|x| self.probs[x | z << self.l]).sum())
            .collect()
    }

    /// `(P(x), P(·|x))` for every `x` with `P(x) > 0`.
    pub fn blocks(&self) -> Vec<(f64, Vec<f64>)> {
        let side = 1usize << self.l;
        (0..side)
            .filter_map(|x| {
                let joint: Vec<f64> = (0..side).map(|z| self.probs[x | z << self.l]).collect();
                let px: f64 = joint.iter().sum();
                (px > 0.0).then(|| (px, joint.into_iter().map(|p| p / px).collect()))
            })
            .collect()
    }
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum()
}

/// `P_ph = 1 − Σ_x P(x, 0)`.
pub fn phase_error_probability(p: &PauliErrorDistribution) -> f64 {
    let zero_phase: f64 = (0..1u64 << p.l).map(|x| p.prob(x, 0)).sum();
    (1.0 - zero_phase).max(0.0)
}

/// `I_E = Σ_x P(x) H(P(·|x))` in bits.
pub fn eve_mutual_information(p: &PauliErrorDistribution) -> f64 {
    p.blocks().iter().map(|(px, cond)| px * shannon_entropy(cond)).sum()
}

/// `⟨ψ_{y,x}|ψ_{y⊕d,x}⟩ = Σ_z (−1)^{z·d} P(z|x)`.
fn block_overlap(cond: &[f64], d: u64) -> f64 {
    cond.iter()
        .enumerate()
        .map(|(z, &q)| if (z as u64 & d).count_ones() % 2 == 1 { -q } else { q })
        .sum()
}

/// Fidelity and trace norm between `ρ_E(y)` and `ρ_E(y ⊕ d)`, for `d ≠ 0`.
pub fn pair_figures(p: &PauliErrorDistribution, d: u64) -> (f64, f64) {
    let mut fid = 0.0;
    let mut tn = 0.0;
    for (px, cond) in p.blocks() {
        let overlap = block_overlap(&cond, d);
        fid += px * overlap.abs();
        tn += px * 2.0 * (1.0 - overlap * overlap).max(0.0).sqrt();
    }
    (fid, tn)
}

/// Largest eigenvalue of `a aᵀ − diag(p)` with `a_z = √p_z`.
///
/// The matrix is traceless with at most one positive eigenvalue `λ`, which
/// solves `Σ_z p_z / (λ + p_z) = 1`; its trace norm is `2λ`.
fn pure_minus_diagonal_eigenvalue(p: &[f64]) -> f64 {
    let support: Vec<f64> = p.iter().copied().filter(|&q| q > 0.0).collect();
    if support.len() <= 1 {
        return 0.0;
    }
    let secular = |lam: f64| support.iter().map(|&q| q / (lam + q)).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if secular(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Fidelity and trace norm between `ρ_E(y)` and the average state; both are independent of `y`.
pub fn average_state_figures(p: &PauliErrorDistribution) -> (f64, f64) {
    let mut fid = 0.0;
    let mut tn = 0.0;
    for (px, cond) in p.blocks() {
        fid += px * cond.iter().map(|q| q * q).sum::<f64>().sqrt();
        tn += px * 2.0 * pure_minus_diagonal_eigenvalue(&cond);
    }
    (fid, tn)
}

/// `Σ_x P(x) (Σ_z √P(z|x))² / 2^l`, the optimal probability of guessing `y`.
pub fn optimal_success_probability(p: &PauliErrorDistribution) -> f64 {
    let scale = 1.0 / (1u64 << p.l) as f64;
    p.blocks()
        .iter()
        .map(|(px, cond)| {
            let s: f64 = cond.iter().map(|q| q.sqrt()).sum();
            px * s * s * scale
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EveFigures {
    pub mutual_info_bits: f64,
    pub min_pair_fidelity: f64,
    pub max_pair_trace_norm: f64,
    pub min_avg_fidelity: f64,
    pub max_avg_trace_norm: f64,
    pub opt_success_prob: f64,
    pub phase_error_prob: f64,
}

/// Every figure at once. Pair extrema range over `y ≠ y'`; for `l = 0` they
/// are taken over the empty set as fidelity 1 and trace norm 0.
pub fn eve_figures(p: &PauliErrorDistribution) -> EveFigures {
    let mut min_pair_fidelity = 1.0f64;
    let mut max_pair_trace_norm = 0.0f64;
    for d in 1..1u64 << p.l {
        let (f, t) = pair_figures(p, d);
        min_pair_fidelity = min_pair_fidelity.min(f);
        max_pair_trace_norm = max_pair_trace_norm.max(t);
    }
    let (min_avg_fidelity, max_avg_trace_norm) = average_state_figures(p);
    EveFigures {
        mutual_info_bits: eve_mutual_information(p),
        min_pair_fidelity,
        max_pair_trace_norm,
        min_avg_fidelity,
        max_avg_trace_norm,
        opt_success_prob: optimal_success_probability(p),
        phase_error_prob: phase_error_probability(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_quarters() -> PauliErrorDistribution {
        // l = 1, x = 0 always, P(z = 0) = 3/4.
        PauliErrorDistribution::new(1, vec![0.75, 0.0, 0.25, 0.0]).unwrap()
    }

    #[test]
    fn phase_error_examples() {
        assert_eq!(phase_error_probability(&PauliErrorDistribution::point_mass(2, 0, 0)), 0.0);
        let uniform = PauliErrorDistribution::new(1, vec![0.25; 4]).unwrap();
        assert_eq!(phase_error_probability(&uniform), 0.5);
        assert_eq!(phase_error_probability(&PauliErrorDistribution::point_mass(2, 1, 3)), 1.0);
    }

    #[test]
    fn mutual_information_examples() {
        assert_eq!(eve_mutual_information(&PauliErrorDistribution::point_mass(3, 0, 0)), 0.0);
        let uni = PauliErrorDistribution::uniform_phase(3, &[0.5, 0.0, 0.25, 0.0, 0.0, 0.0, 0.25, 0.0]).unwrap();
        assert!((eve_mutual_information(&uni) - 3.0).abs() < 1e-12);
        assert!((eve_mutual_information(&three_quarters()) - 0.811_278_124_459_132_9).abs() < 1e-12);
    }

    #[test]
    fn pair_examples() {
        let f = eve_figures(&PauliErrorDistribution::point_mass(2, 0, 0));
        assert_eq!((f.min_pair_fidelity, f.max_pair_trace_norm), (1.0, 0.0));
        let uni = PauliErrorDistribution::uniform_phase(1, &[1.0, 0.0]).unwrap();
        let f = eve_figures(&uni);
        assert!(f.min_pair_fidelity.abs() < 1e-15);
        assert!((f.max_pair_trace_norm - 2.0).abs() < 1e-15);
        let f = eve_figures(&three_quarters());
        assert!((f.min_pair_fidelity - 0.5).abs() < 1e-15);
        assert!((f.max_pair_trace_norm - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn average_state_examples() {
        let (f, t) = average_state_figures(&three_quarters());
        assert!((f - (0.625f64).sqrt()).abs() < 1e-15);
        // For two outcomes the eigenvalue is √(p(1−p)).
        assert!((t - 2.0 * (0.1875f64).sqrt()).abs() < 1e-12);
        assert_eq!(average_state_figures(&PauliErrorDistribution::point_mass(1, 1, 0)), (1.0, 0.0));
    }

    #[test]
    fn success_examples() {
        let uni = PauliErrorDistribution::uniform_phase(2, &[0.25; 4]).unwrap();
        assert!((optimal_success_probability(&uni) - 1.0).abs() < 1e-12);
        assert!((optimal_success_probability(&PauliErrorDistribution::point_mass(3, 5, 0)) - 0.125).abs() < 1e-15);
        let expected = (3f64.sqrt() + 1.0).powi(2) / 8.0;
        assert!((optimal_success_probability(&three_quarters()) - expected).abs() < 1e-12);
        assert!((expected - 0.933_012_701_892_219_3).abs() < 1e-12);
    }

    #[test]
    fn construction_is_validated() {
        assert!(PauliErrorDistribution::new(1, vec![0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(PauliErrorDistribution::new(1, vec![1.0, 0.0]).is_err());
        assert!(PauliErrorDistribution::new(5, vec![0.0; 1 << 10]).is_err());
        assert!(PauliErrorDistribution::new(1, vec![1.5, -0.5, 0.0, 0.0]).is_err());
    }
}
