//! Session ensembles for the averaged bounds.
//!
//! Each session labels `N` detected positions with a photon class and a
//! detection kind, fixes a final length `l ∈ [N̲, N̄]` from the labels, draws a
//! systematic error-correction code `M_e` and a Toeplitz `M_p`, and reduces the
//! per-position Pauli channel to Eve's exact logical figures. A position's
//! channel encodes what Eve may know about it:
//!
//! * forward (Alice's key): vacuum and dark-counted vacuum pulses carry no
//!   information to Eve (uniform bit error, no phase error); single photons
//!   follow the strategy; multi-photon pulses and dark-counted photon-bearing
//!   pulses leave a uniform phase;
//! * reverse (Bob's key): every dark count gives Bob a private uniform bit;
//!   vacuum and multi-photon pulses leave a uniform phase; single photons
//!   follow the strategy;
//! * two-way: every position untrusted in either direction leaves a uniform
//!   phase, and dark-counted vacuum pulses stay private.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::Direction;
use crate::channel::{classify, Basis, ChannelStrategy, ClassCounts, Detection, PauliWeights, PhotonClass, PulseLabel};
use crate::error::{check_probability, Error, Result};
use crate::gf2::BitMatrix;
use crate::oracle::reduce::CodePair;
use crate::oracle::{eve_mutual_information, optimal_success_probability, CodeChannel, DEFAULT_REDUCE_GUARD};
use crate::privacy::{LinearHash, ToeplitzHash};

/// Draws before giving up on a strategy that detects almost nothing.
const MAX_DETECTION_DRAWS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// `N`, the number of detected positions per session.
    pub positions: usize,
    /// Parity checks of the error-correction code; `M_e` has `N − redundancy` columns.
    pub redundancy: usize,
    pub n_under: usize,
    pub n_bar: usize,
    /// Photon-class probabilities of emitted pulses.
    pub class_probs: [f64; 3],
    pub strategy: ChannelStrategy,
    pub direction: Direction,
    pub sessions: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub counts: ClassCounts,
    pub l: usize,
    pub m: usize,
    pub phase_error: f64,
    pub eve_info: f64,
    pub success: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub sessions: Vec<SessionOutcome>,
    pub mean_phase_error: f64,
    pub mean_eve_info: f64,
    pub mean_success: f64,
}

impl EnsembleConfig {
    fn validate(&self) -> Result<()> {
        let k = self.positions.saturating_sub(self.redundancy);
        if self.redundancy > self.positions || self.n_under == 0 || self.n_under > self.n_bar || self.n_bar >= k {
            return Err(Error::InvalidInput(format!(
                "need 1 <= N_under <= N_bar < N - redundancy, got {} <= {} < {k}",
                self.n_under, self.n_bar
            )));
        }
        if self.sessions == 0 {
            return Err(Error::InvalidInput("an ensemble needs at least one session".into()));
        }
        for p in self.class_probs {
            check_probability("class probability", p)?;
        }
        let total: f64 = self.class_probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("class probabilities sum to {total}, not 1")));
        }
        self.strategy.validate()
    }

    /// `m = K² + 1` clamped so that `l = N − redundancy − m` lies in `[N̲, N̄]`.
    pub fn sacrifice(&self, counts: &ClassCounts) -> usize {
        let k = self.positions - self.redundancy;
        let wanted = self.direction.untrusted(&counts.j) + 1;
        wanted.clamp(k - self.n_bar, k - self.n_under)
    }
}

/// The Pauli weights of one detected position.
pub fn position_weights(label: &PulseLabel, strategy: &ChannelStrategy, direction: Direction) -> PauliWeights {
    let uniform_bit_only = PauliWeights::independent(0.5, 0.0);
    match (direction, label.detection, label.class) {
        (_, Detection::Normal, PhotonClass::Single) => strategy.single_errors,
        (Direction::Forward, Detection::Normal, PhotonClass::Vacuum) => uniform_bit_only,
        (Direction::Forward, Detection::Dark, PhotonClass::Vacuum) => uniform_bit_only,
        (Direction::Forward | Direction::TwoWay, Detection::Dark, PhotonClass::Single | PhotonClass::Multi { .. }) => {
            PauliWeights::independent(0.5, 0.5)
        }
        (_, Detection::Normal, PhotonClass::Multi { basis, .. }) => {
            let flip = match basis {
                Basis::Plus => strategy.multi_plus.flip,
                Basis::Times => strategy.multi_times.flip,
            };
            PauliWeights::independent(flip, 0.5)
        }
        (Direction::Reverse | Direction::TwoWay, Detection::Normal, PhotonClass::Vacuum) => PauliWeights::independent(0.5, 0.5),
        (_, Detection::Dark, _) => uniform_bit_only,
        (_, Detection::Undetected, _) => PauliWeights::independent(0.5, 0.5),
    }
}

fn sample_detected<R: Rng + ?Sized>(cfg: &EnsembleConfig, rng: &mut R) -> Result<PulseLabel> {
    for _ in 0..MAX_DETECTION_DRAWS {
        let u: f64 = rng.random();
        let class = if u < cfg.class_probs[0] {
            PhotonClass::Vacuum
        } else if u < cfg.class_probs[0] + cfg.class_probs[1] {
            PhotonClass::Single
        } else {
            let basis = if rng.random() { Basis::Plus } else { Basis::Times };
            PhotonClass::Multi { n: 2, basis }
        };
        let detection = cfg.strategy.sample_detection(class, rng);
        if detection != Detection::Undetected {
            return Ok(PulseLabel::new(class, detection));
        }
    }
    Err(Error::Domain("the strategy detects too few pulses to fill a session".into()))
}

/// `[I_k; P]` with a uniform `P`.
fn systematic_encoder<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> BitMatrix {
    let mut m_e = BitMatrix::zeros(n, k);
    for i in 0..k {
        m_e.set(i, i, true);
    }
    for i in k..n {
        for j in 0..k {
            m_e.set(i, j, rng.random());
        }
    }
    m_e
}

pub fn run_session<R: Rng + ?Sized>(cfg: &EnsembleConfig, rng: &mut R) -> Result<SessionOutcome> {
    let mut labels = (0..cfg.positions)
        .map(|_| sample_detected(cfg, rng))
        .collect::<Result<Vec<_>>>()?;
    labels.shuffle(rng);
    let counts = classify(&labels);
    let k = cfg.positions - cfg.redundancy;
    let m = cfg.sacrifice(&counts);
    let l = k - m;
    let m_e = systematic_encoder(cfg.positions, k, rng);
    let m_p = ToeplitzHash::sample(rng, l, m)?.matrix();
    let weights = labels
        .iter()
        .map(|label| position_weights(label, &cfg.strategy, cfg.direction))
        .collect();
    let reduced = CodePair::new(&m_e, &m_p, DEFAULT_REDUCE_GUARD)?
        .reduce(&CodeChannel::Product(weights))?;
    Ok(SessionOutcome {
        counts,
        l,
        m,
        phase_error: reduced.phase_error_min,
        eve_info: eve_mutual_information(&reduced.logical),
        success: optimal_success_probability(&reduced.logical),
    })
}

pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleSummary> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sessions = (0..cfg.sessions)
        .map(|_| run_session(cfg, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let n = sessions.len() as f64;
    let mean = |f: fn(&SessionOutcome) -> f64| sessions.iter().map(f).sum::<f64>() / n;
    Ok(EnsembleSummary {
        mean_phase_error: mean(|s| s.phase_error),
        mean_eve_info: mean(|s| s.eve_info),
        mean_success: mean(|s| s.success),
        sessions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(strategy: ChannelStrategy, direction: Direction) -> EnsembleConfig {
        EnsembleConfig {
            positions: 6,
            redundancy: 1,
            n_under: 1,
            n_bar: 3,
            class_probs: [0.2, 0.6, 0.2],
            strategy,
            direction,
            sessions: 20,
            seed: 5,
        }
    }

    #[test]
    fn sessions_respect_length_window() {
        let mut s = ChannelStrategy::noiseless();
        s.dark_count = 0.1;
        s.vacuum_yield = 0.3;
        s.single_yield = 0.7;
        s.multi_plus.yield_ = 0.9;
        s.multi_times.yield_ = 0.9;
        s.single_errors = PauliWeights::independent(0.05, 0.1);
        for direction in Direction::ALL {
            let summary = run_ensemble(&config(s.clone(), direction)).unwrap();
            for session in &summary.sessions {
                assert!((1..=3).contains(&session.l));
                assert_eq!(session.l + session.m, 5);
                assert!((0.0..=1.0).contains(&session.phase_error));
                assert!(session.eve_info <= session.l as f64 + 1e-9);
                assert!(session.success >= 0.5f64.powi(session.l as i32) - 1e-12);
            }
        }
    }

    #[test]
    fn single_photons_without_phase_errors_are_secret() {
        let mut cfg = config(ChannelStrategy::noiseless(), Direction::Forward);
        cfg.class_probs = [0.0, 1.0, 0.0];
        let summary = run_ensemble(&cfg).unwrap();
        assert_eq!(summary.mean_phase_error, 0.0);
        assert!(summary.mean_eve_info.abs() < 1e-12);
    }

    #[test]
    fn ensembles_are_reproducible() {
        let cfg = config(ChannelStrategy::noiseless(), Direction::Reverse);
        assert_eq!(run_ensemble(&cfg).unwrap(), run_ensemble(&cfg).unwrap());
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = config(ChannelStrategy::noiseless(), Direction::Forward);
        cfg.n_bar = 5;
        assert!(run_ensemble(&cfg).is_err());
    }
}
