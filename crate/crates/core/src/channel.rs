//! The reduced Pauli channel with photon-number and dark-count labels.
//!
//! Every pulse carries a [`PulseLabel`]: the photon class Alice emitted and how
//! Bob's detector responded. The channel then draws one [`ErrorSymbol`] per
//! pulse. Detection is additive: a pulse of class `n` is dark-counted with
//! probability `p_D`, normally detected with the class yield `q_n`, and lost
//! otherwise, so `p_D + q_n ≤ 1`.
//!
//! Counting conventions for [`classify`]: undetected pulses are dropped; `K`
//! counts detected pulses (normal or dark) by photon class; `J⁰..J²` count
//! normal detections and `J³..J⁵` dark counts, each by class.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::gf2::BitVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Plus,
    Times,
}

impl Basis {
    pub fn other(self) -> Self {
        match self {
            Basis::Plus => Basis::Times,
            Basis::Times => Basis::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Basis::Plus => '+',
            Basis::Times => 'x',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhotonClass {
    Vacuum,
    Single,
    /// `n ≥ 2` photons prepared in `basis`.
    Multi { n: u32, basis: Basis },
}

impl PhotonClass {
    pub fn multi(n: u32, basis: Basis) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("multi-photon class needs n >= 2, got {n}")));
        }
        Ok(PhotonClass::Multi { n, basis })
    }

    /// 0, 1 or 2 for vacuum, single and multi-photon.
    pub fn index(self) -> usize {
        match self {
            PhotonClass::Vacuum => 0,
            PhotonClass::Single => 1,
            PhotonClass::Multi { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Detection {
    Undetected,
    Normal,
    Dark,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PulseLabel {
    pub class: PhotonClass,
    pub detection: Detection,
}

impl PulseLabel {
    pub fn new(class: PhotonClass, detection: Detection) -> Self {
        Self { class, detection }
    }

    /// Position in the six-part split `J⁰..J⁵`, or `None` if undetected.
    pub fn part(&self) -> Option<usize> {
        match self.detection {
            Detection::Undetected => None,
            Detection::Normal => Some(self.class.index()),
            Detection::Dark => Some(3 + self.class.index()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorSymbol {
    /// `v`: the pulse is lost.
    Lost,
    /// `s`: a vacuum pulse replaced by a maximally mixed qubit.
    Random,
    /// `X^x Z^z` applied to a single photon.
    Pauli { x: bool, z: bool },
    /// Multi-photon outcome `0` (kept) or `1` (flipped).
    Flip(bool),
    /// `d`: a dark count, which yields a uniform bit.
    Dark,
}

impl ErrorSymbol {
    pub fn admissible_for(&self, label: &PulseLabel) -> bool {
        match (label.detection, label.class, self) {
            (Detection::Dark, _, ErrorSymbol::Dark) => true,
            (Detection::Dark, _, _) => false,
            (Detection::Undetected, _, ErrorSymbol::Lost) => true,
            (Detection::Undetected, _, _) => false,
            (_, _, ErrorSymbol::Lost) => true,
            (_, PhotonClass::Vacuum, ErrorSymbol::Random) => true,
            (_, PhotonClass::Single, ErrorSymbol::Pauli { .. }) => true,
            (_, PhotonClass::Multi { .. }, ErrorSymbol::Flip(_)) => true,
            _ => false,
        }
    }

    /// Whether the symbol is a phase error on a single photon.
    pub fn is_phase_error(&self) -> bool {
        matches!(self, ErrorSymbol::Pauli { z: true, .. })
    }
}

/// Partition counts of a labelled block of pulses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassCounts {
    /// `K⁰, K¹, K²`: detected pulses by photon class.
    pub k: [usize; 3],
    /// `J⁰..J⁵`: normal detections by class, then dark counts by class.
    pub j: [usize; 6],
    /// Phase errors among normally detected single photons.
    pub t: usize,
}

impl ClassCounts {
    pub fn from_parts(j: [usize; 6], t: usize) -> Self {
        Self {
            k: [j[0] + j[3], j[1] + j[4], j[2] + j[5]],
            j,
            t,
        }
    }

    pub fn total(&self) -> usize {
        self.j.iter().sum()
    }
}

pub fn classify(labels: &[PulseLabel]) -> ClassCounts {
    let mut counts = ClassCounts::default();
    for label in labels {
        if let Some(part) = label.part() {
            counts.j[part] += 1;
            counts.k[label.class.index()] += 1;
        }
    }
    counts
}

pub fn count_phase_errors(labels: &[PulseLabel], errors: &[ErrorSymbol]) -> Result<usize> {
    check_parallel(labels.len(), errors.len())?;
    Ok(labels
        .iter()
        .zip(errors)
        .filter(|(l, e)| l.class == PhotonClass::Single && l.detection == Detection::Normal && e.is_phase_error())
        .count())
}

/// Probabilities of `(x, z) = (0,0), (0,1), (1,0), (1,1)` on a single photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliWeights {
    pub none: f64,
    pub phase: f64,
    pub bit: f64,
    pub both: f64,
}

impl PauliWeights {
    pub const IDENTITY: Self = Self {
        none: 1.0,
        phase: 0.0,
        bit: 0.0,
        both: 0.0,
    };

    /// Independent bit flips with rate `bit` and phase flips with rate `phase`.
    pub fn independent(bit: f64, phase: f64) -> Self {
        Self {
            none: (1.0 - bit) * (1.0 - phase),
            phase: (1.0 - bit) * phase,
            bit: bit * (1.0 - phase),
            both: bit * phase,
        }
    }

    /// Indexed by `x | z << 1`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.none, self.bit, self.phase, self.both]
    }

    pub fn bit_error_rate(&self) -> f64 {
        self.bit + self.both
    }

    pub fn phase_error_rate(&self) -> f64 {
        self.phase + self.both
    }

    fn validate(&self) -> Result<()> {
        for (name, p) in [("none", self.none), ("phase", self.phase), ("bit", self.bit), ("both", self.both)] {
            check_probability(name, p)?;
        }
        let sum = self.none + self.phase + self.bit + self.both;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("single-photon error weights sum to {sum}, not 1")));
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (bool, bool) {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, w) in self.as_array().into_iter().enumerate() {
            acc += w;
            if u < acc {
                return (i & 1 == 1, i & 2 == 2);
            }
        }
        // Rounding left u above the cumulative sum; fall back to the last supported outcome.
        let last = (0..4).rev().find(|&i| self.as_array()[i] > 0.0).unwrap_or(0);
        (last & 1 == 1, last & 2 == 2)
    }
}

/// Response of the channel to multi-photon pulses prepared in one basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiResponse {
    /// Normal-detection probability, excluding dark counts.
    #[serde(rename = "yield")]
    pub yield_: f64,
    /// Probability of outcome `1` (Bob's bit flipped).
    pub flip: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyMode {
    /// Independent per-pulse draws from the stated probabilities.
    #[default]
    HonestLoss,
    /// A vertex of the conditional-distribution polytope: every choice left to Eve is deterministic.
    Extremal,
}

/// Eve's channel, given per photon class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStrategy {
    /// `p_D`.
    pub dark_count: f64,
    /// `q⁰`: normal detections of vacuum pulses, so `p₀ = q⁰ + p_D`.
    pub vacuum_yield: f64,
    /// `q¹`.
    pub single_yield: f64,
    pub single_errors: PauliWeights,
    pub multi_plus: MultiResponse,
    pub multi_times: MultiResponse,
    #[serde(default)]
    pub mode: StrategyMode,
}

impl ChannelStrategy {
    /// Lossless, error-free transmission without dark counts.
    pub fn noiseless() -> Self {
        Self {
            dark_count: 0.0,
            vacuum_yield: 0.0,
            single_yield: 1.0,
            single_errors: PauliWeights::IDENTITY,
            multi_plus: MultiResponse { yield_: 1.0, flip: 0.0 },
            multi_times: MultiResponse { yield_: 1.0, flip: 0.0 },
            mode: StrategyMode::HonestLoss,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pd = self.dark_count;
        check_probability("dark_count", pd)?;
        for (name, q) in [
            ("vacuum_yield", self.vacuum_yield),
            ("single_yield", self.single_yield),
            ("multi_plus.yield", self.multi_plus.yield_),
            ("multi_times.yield", self.multi_times.yield_),
        ] {
            check_probability(name, q)?;
            if pd + q > 1.0 + 1e-12 {
                return Err(Error::Domain(format!("{name} + dark_count = {} exceeds 1", pd + q)));
            }
        }
        check_probability("multi_plus.flip", self.multi_plus.flip)?;
        check_probability("multi_times.flip", self.multi_times.flip)?;
        self.single_errors.validate()?;
        if self.mode == StrategyMode::Extremal {
            // p_D belongs to the detector; Eve's vertices put each yield at 0 or 1 − p_D.
            let yields = [
                self.vacuum_yield,
                self.single_yield,
                self.multi_plus.yield_,
                self.multi_times.yield_,
            ];
            let mut flips = vec![self.multi_plus.flip, self.multi_times.flip];
            flips.extend(self.single_errors.as_array());
            let vertex_yield = |q: f64| q == 0.0 || (q - (1.0 - pd)).abs() < 1e-12;
            if !yields.into_iter().all(vertex_yield) || flips.iter().any(|&p| p != 0.0 && p != 1.0) {
                return Err(Error::InvalidInput(
                    "an extremal strategy needs yields in {0, 1 - dark_count} and error probabilities in {0, 1}".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn normal_yield(&self, class: PhotonClass) -> f64 {
        match class {
            PhotonClass::Vacuum => self.vacuum_yield,
            PhotonClass::Single => self.single_yield,
            PhotonClass::Multi { basis: Basis::Plus, .. } => self.multi_plus.yield_,
            PhotonClass::Multi { basis: Basis::Times, .. } => self.multi_times.yield_,
        }
    }

    /// Total detection probability `p_D + q_n`.
    pub fn detection_probability(&self, class: PhotonClass) -> f64 {
        self.dark_count + self.normal_yield(class)
    }

    pub fn sample_detection<R: Rng + ?Sized>(&self, class: PhotonClass, rng: &mut R) -> Detection {
        let u: f64 = rng.random();
        if u < self.dark_count {
            Detection::Dark
        } else if u < self.dark_count + self.normal_yield(class) {
            Detection::Normal
        } else {
            Detection::Undetected
        }
    }

    pub fn sample_symbol<R: Rng + ?Sized>(&self, label: &PulseLabel, rng: &mut R) -> ErrorSymbol {
        match (label.detection, label.class) {
            (Detection::Undetected, _) => ErrorSymbol::Lost,
            (Detection::Dark, _) => ErrorSymbol::Dark,
            (Detection::Normal, PhotonClass::Vacuum) => ErrorSymbol::Random,
            (Detection::Normal, PhotonClass::Single) => {
                let (x, z) = self.single_errors.sample(rng);
                ErrorSymbol::Pauli { x, z }
            }
            (Detection::Normal, PhotonClass::Multi { basis, .. }) => {
                let flip = match basis {
                    Basis::Plus => self.multi_plus.flip,
                    Basis::Times => self.multi_times.flip,
                };
                ErrorSymbol::Flip(rng.random::<f64>() < flip)
            }
        }
    }
}

/// Draws one error symbol per label from the strategy.
pub fn sample_error_pattern<R: Rng + ?Sized>(
    strategy: &ChannelStrategy,
    labels: &[PulseLabel],
    rng: &mut R,
) -> Result<Vec<ErrorSymbol>> {
    strategy.validate()?;
    Ok(labels.iter().map(|l| strategy.sample_symbol(l, rng)).collect())
}

/// Whether Bob's bit differs from Alice's for a pulse prepared and measured in `basis`.
///
/// Random outcomes (`s` and `d`) draw a fresh uniform bit, which equals
/// Alice's with probability one half.
pub fn bit_flip<R: Rng + ?Sized>(symbol: &ErrorSymbol, basis: Basis, rng: &mut R) -> Result<bool> {
    Ok(match symbol {
        ErrorSymbol::Lost => {
            return Err(Error::InvalidInput("lost pulses carry no key bit".into()));
        }
        ErrorSymbol::Random | ErrorSymbol::Dark => rng.random(),
        ErrorSymbol::Pauli { x, z } => match basis {
            Basis::Plus => *x,
            Basis::Times => *z,
        },
        ErrorSymbol::Flip(f) => *f,
    })
}

/// Bob's raw key for a key sent in the + basis.
pub fn apply_bit_errors<R: Rng + ?Sized>(
    key: &BitVector,
    labels: &[PulseLabel],
    errors: &[ErrorSymbol],
    rng: &mut R,
) -> Result<BitVector> {
    apply_bit_errors_in_basis(key, labels, errors, Basis::Plus, rng)
}

pub fn apply_bit_errors_in_basis<R: Rng + ?Sized>(
    key: &BitVector,
    labels: &[PulseLabel],
    errors: &[ErrorSymbol],
    basis: Basis,
    rng: &mut R,
) -> Result<BitVector> {
    check_parallel(key.len(), labels.len())?;
    check_parallel(labels.len(), errors.len())?;
    let mut out = key.clone();
    for (i, (label, symbol)) in labels.iter().zip(errors).enumerate() {
        if label.detection == Detection::Undetected {
            return Err(Error::InvalidInput(format!("position {i} is undetected")));
        }
        if !symbol.admissible_for(label) {
            return Err(Error::InvalidInput(format!(
                "symbol {symbol:?} is not admissible for {label:?} at position {i}"
            )));
        }
        if bit_flip(symbol, basis, rng)? {
            out.flip(i);
        }
    }
    Ok(out)
}

fn check_parallel(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn label(class: PhotonClass, detection: Detection) -> PulseLabel {
        PulseLabel::new(class, detection)
    }

    fn multi(n: u32) -> PhotonClass {
        PhotonClass::multi(n, Basis::Plus).unwrap()
    }

    #[test]
    fn classify_examples() {
        let singles = vec![label(PhotonClass::Single, Detection::Normal); 7];
        let c = classify(&singles);
        assert_eq!(c.k, [0, 7, 0]);
        assert_eq!(c.t, 0);

        let mixed = [
            label(PhotonClass::Vacuum, Detection::Normal),
            label(PhotonClass::Single, Detection::Normal),
            label(multi(2), Detection::Normal),
            label(PhotonClass::Vacuum, Detection::Dark),
            label(PhotonClass::Single, Detection::Dark),
            label(multi(3), Detection::Dark),
        ];
        let c = classify(&mixed);
        assert_eq!(c.j, [1, 1, 1, 1, 1, 1]);
        assert_eq!(c.k, [2, 2, 2]);
        assert_eq!(&classify(&mixed[..3]).j[3..], &[0, 0, 0]);
    }

    #[test]
    fn undetected_pulses_are_not_counted() {
        let c = classify(&[label(PhotonClass::Single, Detection::Undetected)]);
        assert_eq!(c.total(), 0);
    }

    #[test]
    fn phase_error_examples() {
        let labels = vec![label(PhotonClass::Single, Detection::Normal); 4];
        let clean = vec![ErrorSymbol::Pauli { x: false, z: false }; 4];
        assert_eq!(count_phase_errors(&labels, &clean).unwrap(), 0);
        let mut both = clean.clone();
        for e in both.iter_mut().take(3) {
            *e = ErrorSymbol::Pauli { x: true, z: true };
        }
        assert_eq!(count_phase_errors(&labels, &both).unwrap(), 3);
        let multis = vec![label(multi(2), Detection::Normal); 4];
        assert_eq!(count_phase_errors(&multis, &[ErrorSymbol::Flip(true); 4]).unwrap(), 0);
        assert!(count_phase_errors(&labels, &clean[..2]).is_err());
    }

    #[test]
    fn admissibility_table() {
        let s = label(PhotonClass::Single, Detection::Normal);
        assert!(ErrorSymbol::Pauli { x: true, z: false }.admissible_for(&s));
        assert!(ErrorSymbol::Lost.admissible_for(&s));
        assert!(!ErrorSymbol::Random.admissible_for(&s));
        let d = label(PhotonClass::Vacuum, Detection::Dark);
        assert!(ErrorSymbol::Dark.admissible_for(&d));
        assert!(!ErrorSymbol::Random.admissible_for(&d));
        assert!(ErrorSymbol::Flip(false).admissible_for(&label(multi(4), Detection::Normal)));
        assert!(PhotonClass::multi(1, Basis::Times).is_err());
    }

    #[test]
    fn noiseless_and_always_phase_flipping() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let labels = vec![label(PhotonClass::Single, Detection::Normal); 20];
        let clean = sample_error_pattern(&ChannelStrategy::noiseless(), &labels, &mut rng).unwrap();
        assert_eq!(count_phase_errors(&labels, &clean).unwrap(), 0);
        let mut flipping = ChannelStrategy::noiseless();
        flipping.single_errors = PauliWeights::independent(0.0, 1.0);
        let e = sample_error_pattern(&flipping, &labels, &mut rng).unwrap();
        assert_eq!(count_phase_errors(&labels, &e).unwrap(), 20);
    }

    #[test]
    fn bit_errors_follow_the_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let labels = vec![label(PhotonClass::Single, Detection::Normal); 5];
        let key: BitVector = "10110".parse().unwrap();
        let none = vec![ErrorSymbol::Pauli { x: false, z: false }; 5];
        assert_eq!(apply_bit_errors(&key, &labels, &none, &mut rng).unwrap(), key);
        let bits = vec![ErrorSymbol::Pauli { x: true, z: false }; 5];
        assert_eq!(apply_bit_errors(&key, &labels, &bits, &mut rng).unwrap().to_string(), "01001");
        assert_eq!(
            apply_bit_errors_in_basis(&key, &labels, &bits, Basis::Times, &mut rng).unwrap(),
            key
        );
    }

    #[test]
    fn extremal_strategies_must_be_vertices() {
        let mut s = ChannelStrategy::noiseless();
        s.mode = StrategyMode::Extremal;
        assert!(s.validate().is_ok());
        s.single_yield = 0.5;
        assert!(s.validate().is_err());
        s.dark_count = 0.5;
        s.vacuum_yield = 0.5;
        s.multi_plus.yield_ = 0.5;
        s.multi_times.yield_ = 0.0;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn yields_and_dark_counts_cannot_exceed_one() {
        let mut s = ChannelStrategy::noiseless();
        s.dark_count = 0.1;
        assert!(s.validate().is_err());
        s.single_yield = 0.9;
        s.multi_plus.yield_ = 0.9;
        s.multi_times.yield_ = 0.9;
        assert!(s.validate().is_ok());
    }
}
