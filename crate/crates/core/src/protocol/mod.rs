//! Seeded simulation of the ten-step decoy BB84 protocol.
//!
//! Pulse kinds: kind 0 is a true vacuum, kind `i ∈ 1..=k` is prepared in the ×
//! basis from `ν_i` and kind `i + k` in the + basis from `ν_i`. The + key comes
//! from kind `i₀ + k`, the × key from kind `i₀`.
//!
//! Model choices: Bob picks his basis uniformly and independently for every
//! detected pulse; a detection in the wrong basis, a vacuum detection and a
//! dark count give him a uniform bit; a normally detected pulse measured in its
//! own basis is flipped by the channel and then by the detector error `p_S`
//! (× basis) or `p̃_S` (+ basis). `Nη(·)` is floored.

pub mod ec;
pub mod transcript;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_report, BoundInputs, BoundReport, Direction};
use crate::channel::{bit_flip, classify, Basis, ChannelStrategy, ClassCounts, Detection, ErrorSymbol, PhotonClass, PulseLabel};
use crate::decoy::{minimize_key_term, ObservedRates, SourceDistribution, DEFAULT_GRID_RESOLUTION};
use crate::error::{check_probability, Error, Result};
use crate::gf2::BitVector;
use crate::privacy::{LinearHash, ToeplitzHash};
use crate::rates::Eta;

pub use ec::{forward_error_correct, reverse_error_correct, Decoder, EcResult, SystematicCode, DEFAULT_EC_GUARD};
pub use transcript::{Announcement, Transcript, TRANSCRIPT_HEADER};

use transcript::join_list;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EcDirection {
    Forward,
    Reverse,
}

impl EcDirection {
    pub fn bounds_direction(self) -> Direction {
        match self {
            EcDirection::Forward => Direction::Forward,
            EcDirection::Reverse => Direction::Reverse,
        }
    }
}

/// How step 6 chooses the sacrifice `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SacrificeRule {
    Fixed { plus: usize, times: usize },
    /// `⌈N(1 − (ν(1)·min q¹(1−h̄(r¹)) + c)/p)⌉ + margin` over the decoy-feasible
    /// set of `ν_{i₀}`, where `p` is the counting rate of the key basis and `c`
    /// the direction's credit: `ν(0)p₀` forward, `p_D` reverse.
    DecoyEstimate {
        margin: usize,
        #[serde(default = "default_resolution")]
        resolution: f64,
    },
}

fn default_resolution() -> f64 {
    DEFAULT_GRID_RESOLUTION
}

fn default_ec_guard() -> usize {
    DEFAULT_EC_GUARD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_bar")]
    pub n_bar: usize,
    #[serde(rename = "N_under")]
    pub n_under: usize,
    #[serde(rename = "N_prime")]
    pub n_prime: usize,
    pub k: usize,
    /// `[ν_i(0), ν_i(1), ν_i(≥2)]` for `i = 1..=k`.
    pub nus: Vec<[f64; 3]>,
    pub i0: usize,
    /// `p̄_0..p̄_{2k}`.
    pub p_bar: Vec<f64>,
    #[serde(rename = "pD")]
    pub p_d: f64,
    #[serde(rename = "pS", default)]
    pub p_s: f64,
    #[serde(rename = "pS_tilde", default)]
    pub p_s_tilde: f64,
    #[serde(default)]
    pub eta: Eta,
    pub m_rule: SacrificeRule,
    pub ec_direction: EcDirection,
    pub rng_seed: u64,
    /// Cap on `min(k, N − k)` for decoding; see [`DEFAULT_EC_GUARD`].
    #[serde(default = "default_ec_guard")]
    pub ec_guard: usize,
}

impl SessionConfig {
    pub fn kinds(&self) -> usize {
        2 * self.k + 1
    }

    pub fn kind_basis(&self, kind: usize) -> Option<Basis> {
        match kind {
            0 => None,
            i if i <= self.k => Some(Basis::Times),
            _ => Some(Basis::Plus),
        }
    }

    fn kind_nu(&self, kind: usize) -> [f64; 3] {
        self.nus[(kind - 1) % self.k]
    }

    fn key_kind(&self, basis: Basis) -> usize {
        match basis {
            Basis::Times => self.i0,
            Basis::Plus => self.i0 + self.k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InvalidInput(what));
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.nus.len() != self.k {
            return bad(format!("nus has {} entries, expected k = {}", self.nus.len(), self.k));
        }
        if self.p_bar.len() != self.kinds() {
            return bad(format!("p_bar has {} entries, expected 2k+1 = {}", self.p_bar.len(), self.kinds()));
        }
        if !(1..=self.k).contains(&self.i0) {
            return bad(format!("i0 = {} must lie in 1..={}", self.i0, self.k));
        }
        if self.n >= self.n_prime {
            return bad(format!("need N < N_prime, got {} >= {}", self.n, self.n_prime));
        }
        if !(1 <= self.n_under && self.n_under <= self.n_bar && self.n_bar <= self.n) {
            return bad(format!(
                "need 1 <= N_under <= N_bar <= N, got {} <= {} <= {}",
                self.n_under, self.n_bar, self.n
            ));
        }
        for (i, nu) in self.nus.iter().enumerate() {
            for &p in nu {
                check_probability(&format!("nus[{i}]"), p)?;
            }
            let total: f64 = nu.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!("nus[{i}] sums to {total}, not 1")));
            }
        }
        for &p in &self.p_bar {
            check_probability("p_bar", p)?;
        }
        let total: f64 = self.p_bar.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("p_bar sums to {total}, not 1")));
        }
        check_probability("pD", self.p_d)?;
        check_probability("pS", self.p_s)?;
        check_probability("pS_tilde", self.p_s_tilde)?;
        self.eta.eval(0.0)?;
        if let SacrificeRule::DecoyEstimate { resolution, .. } = self.m_rule {
            SourceDistribution::new(self.nus[self.i0 - 1])?;
            if !(resolution > 0.0 && resolution <= 1.0) {
                return bad(format!("resolution {resolution} must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

/// `D_i` and `D̃_i`: what the parties fix before transmission, plus `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub a: Vec<usize>,
    pub nus: Vec<[f64; 3]>,
    pub p_s: f64,
    pub p_s_tilde: f64,
    pub p_d: f64,
}

/// `D_e`, indexed by kind `0..=2k`; `e[0]`, `h[0]` and `checks[0]` stay 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentData {
    pub a: Vec<usize>,
    pub c: Vec<usize>,
    pub e: Vec<usize>,
    pub h: Vec<usize>,
    /// Publicly compared bits per kind: `E_i − N` for the key kinds, `E_i` for the rest.
    pub checks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SessionStatus {
    Completed,
    Aborted { step: u8, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyPair {
    pub alice: BitVector,
    pub bob: BitVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisOutcome {
    pub basis: Basis,
    pub kind: usize,
    /// `H/(E − N)` as numerator and denominator.
    pub errors: usize,
    pub checked: usize,
    /// `⌊Nη(H/(E − N))⌋ = l + m`.
    pub ec_bits: usize,
    pub m: usize,
    pub l: usize,
    pub ec_success: bool,
    pub keys: KeyPair,
    /// Photon classes and phase errors of the raw-key pulses, hidden from both parties.
    pub hidden: ClassCounts,
    pub bounds: BoundReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub status: SessionStatus,
    /// The last step entered.
    pub reached_step: u8,
    pub initial: InitialData,
    pub data: ExperimentData,
    pub plus: Option<BasisOutcome>,
    pub times: Option<BasisOutcome>,
    /// Alice's and Bob's final keys agree in both bases.
    pub keys_equal: bool,
    pub transcript: Transcript,
}

impl SessionOutcome {
    pub fn completed(&self) -> bool {
        self.status == SessionStatus::Completed
    }

    pub fn final_key_plus(&self) -> Option<&KeyPair> {
        self.plus.as_ref().map(|b| &b.keys)
    }

    pub fn final_key_times(&self) -> Option<&KeyPair> {
        self.times.as_ref().map(|b| &b.keys)
    }
}

/// `(D_i, D_e)` of a session that reached step 6.
pub fn extract_experiment_data(outcome: &SessionOutcome) -> Result<(InitialData, ExperimentData)> {
    if outcome.reached_step < 6 {
        return Err(Error::InvalidInput(format!(
            "the session stopped at step {} before the data of step 6 existed",
            outcome.reached_step
        )));
    }
    Ok((outcome.initial.clone(), outcome.data.clone()))
}

#[derive(Debug, Clone)]
struct Pulse {
    kind: usize,
    label: PulseLabel,
    symbol: ErrorSymbol,
    alice_bit: bool,
    bob_basis: Basis,
    bob_bit: bool,
}

impl Pulse {
    fn detected(&self) -> bool {
        self.label.detection != Detection::Undetected
    }
}

fn bits_of(pulses: &[Pulse], positions: &[usize], f: impl Fn(&Pulse) -> bool) -> BitVector {
    BitVector::from_bools(&positions.iter().map(|&p| f(&pulses[p])).collect::<Vec<_>>())
}

fn bit_text(v: &BitVector) -> String {
    if v.is_empty() {
        "-".into()
    } else {
        v.to_string()
    }
}

fn weighted_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // Rounding left `u` above the running sum: take the last positive weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

fn transmit<R: Rng + ?Sized>(cfg: &SessionConfig, strategy: &ChannelStrategy, rng: &mut R) -> Result<Vec<Pulse>> {
    let mut pulses = Vec::with_capacity(cfg.n_prime);
    for _ in 0..cfg.n_prime {
        let kind = weighted_index(&cfg.p_bar, rng);
        let basis = cfg.kind_basis(kind);
        let class = match basis {
            None => PhotonClass::Vacuum,
            Some(b) => match weighted_index(&cfg.kind_nu(kind), rng) {
                0 => PhotonClass::Vacuum,
                1 => PhotonClass::Single,
                _ => PhotonClass::multi(2, b)?,
            },
        };
        let alice_bit = basis.is_some() && rng.random();
        let detection = strategy.sample_detection(class, rng);
        let label = PulseLabel::new(class, detection);
        let symbol = strategy.sample_symbol(&label, rng);
        let bob_basis = if rng.random() { Basis::Plus } else { Basis::Times };
        let bob_bit = match (detection, basis) {
            (Detection::Undetected, _) => false,
            (Detection::Normal, Some(b)) if b == bob_basis && class != PhotonClass::Vacuum => {
                let p_s = match b {
                    Basis::Times => cfg.p_s,
                    Basis::Plus => cfg.p_s_tilde,
                };
                let detector_flip = rng.random::<f64>() < p_s;
                alice_bit ^ bit_flip(&symbol, b, rng)? ^ detector_flip
            }
            _ => rng.random(),
        };
        pulses.push(Pulse {
            kind,
            label,
            symbol,
            alice_bit,
            bob_basis,
            bob_bit,
        });
    }
    Ok(pulses)
}

/// The phase error of a raw-key pulse: the flip it would carry in the other basis.
fn phase_error(p: &Pulse, key_basis: Basis) -> bool {
    match (p.label.detection, p.symbol) {
        (Detection::Normal, ErrorSymbol::Pauli { x, z }) => match key_basis {
            Basis::Plus => z,
            Basis::Times => x,
        },
        _ => false,
    }
}

struct Plan {
    basis: Basis,
    kind: usize,
    ec_bits: usize,
    m: usize,
    l: usize,
}

fn decoy_sacrifice(
    cfg: &SessionConfig,
    data: &ExperimentData,
    key_basis: Basis,
    margin: usize,
    resolution: f64,
) -> std::result::Result<usize, String> {
    let nu = SourceDistribution::new(cfg.nus[cfg.i0 - 1]).map_err(|e| e.to_string())?;
    let rate = |kind: usize| -> std::result::Result<f64, String> {
        if data.a[kind] == 0 {
            return Err(format!("no pulses of kind {kind} were sent"));
        }
        Ok(data.c[kind] as f64 / data.a[kind] as f64)
    };
    let p0 = if nu.nu[0] == 0.0 && data.a[0] == 0 { 0.0 } else { rate(0)? };
    let (kx, kp) = (cfg.i0, cfg.i0 + cfg.k);
    let err = |kind: usize| data.h[kind] as f64 / data.checks[kind] as f64;
    let mut obs = ObservedRates {
        p0,
        p_d: cfg.p_d,
        p_nu_x: rate(kx)?,
        p_nu_plus: rate(kp)?,
        s_nu_x: err(kx),
        s_nu_plus: err(kp),
        p_s: cfg.p_s,
        p_s_tilde: cfg.p_s_tilde,
    };
    if key_basis == Basis::Times {
        // The × key's phase errors show up in the + basis.
        std::mem::swap(&mut obs.p_nu_x, &mut obs.p_nu_plus);
        std::mem::swap(&mut obs.s_nu_x, &mut obs.s_nu_plus);
        std::mem::swap(&mut obs.p_s, &mut obs.p_s_tilde);
    }
    let best = minimize_key_term(&nu, &obs, resolution).map_err(|e| format!("decoy estimate failed: {e}"))?;
    let credit = match cfg.ec_direction {
        EcDirection::Forward => nu.nu[0] * obs.p0,
        EcDirection::Reverse => cfg.p_d,
    };
    if obs.p_nu_plus <= 0.0 {
        return Err("the key kind has counting rate 0".into());
    }
    let fraction = (1.0 - (nu.nu[1] * best.value + credit) / obs.p_nu_plus).clamp(0.0, 1.0);
    Ok((cfg.n as f64 * fraction - 1e-9).ceil().max(0.0) as usize + margin)
}

fn plan_basis(cfg: &SessionConfig, data: &ExperimentData, basis: Basis) -> Result<std::result::Result<Plan, String>> {
    let kind = cfg.key_kind(basis);
    let rate = data.h[kind] as f64 / data.checks[kind] as f64;
    let ec_bits = ((cfg.n as f64 * cfg.eta.eval(rate)?).floor() as usize).min(cfg.n);
    let m = match cfg.m_rule {
        SacrificeRule::Fixed { plus, times } => match basis {
            Basis::Plus => plus,
            Basis::Times => times,
        },
        SacrificeRule::DecoyEstimate { margin, resolution } => match decoy_sacrifice(cfg, data, basis, margin, resolution) {
            Ok(m) => m,
            Err(reason) => return Ok(Err(format!("basis={} {reason}", basis.symbol()))),
        },
    };
    if ec_bits < m + cfg.n_under {
        return Ok(Err(format!(
            "basis={} key length {ec_bits} - {m} below N_under={}",
            basis.symbol(),
            cfg.n_under
        )));
    }
    let m = if ec_bits - m > cfg.n_bar { ec_bits - cfg.n_bar } else { m };
    Ok(Ok(Plan {
        basis,
        kind,
        ec_bits,
        m,
        l: ec_bits - m,
    }))
}

pub fn run_session(cfg: &SessionConfig, strategy: &ChannelStrategy) -> Result<SessionOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    run_session_with_rng(cfg, strategy, &mut rng)
}

/// Session `index` of a batch draws from stream `index` of the seed's
/// generator; stream 0 reproduces [`run_session`].
pub fn run_batch(cfg: &SessionConfig, strategy: &ChannelStrategy, trials: usize) -> Result<Vec<SessionOutcome>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(index);
            run_session_with_rng(cfg, strategy, &mut rng)
        })
        .collect()
}

pub fn run_session_with_rng<R: Rng + ?Sized>(
    cfg: &SessionConfig,
    strategy: &ChannelStrategy,
    rng: &mut R,
) -> Result<SessionOutcome> {
    cfg.validate()?;
    strategy.validate()?;
    let kinds = cfg.kinds();
    let mut t = Transcript::default();

    // Steps 1 and 2.
    let pulses = transmit(cfg, strategy, rng)?;
    let mut data = ExperimentData {
        a: vec![0; kinds],
        c: vec![0; kinds],
        e: vec![0; kinds],
        h: vec![0; kinds],
        checks: vec![0; kinds],
    };
    let mut common: Vec<Vec<usize>> = vec![Vec::new(); kinds];
    for (pos, p) in pulses.iter().enumerate() {
        data.a[p.kind] += 1;
        if p.detected() {
            data.c[p.kind] += 1;
            if cfg.kind_basis(p.kind) == Some(p.bob_basis) {
                data.e[p.kind] += 1;
                common[p.kind].push(pos);
            }
        }
    }
    t.push(1, "sent", format!("pulses={}", cfg.n_prime));
    t.push(2, "kinds", join_list(pulses.iter().map(|p| p.kind)));
    let initial = InitialData {
        a: data.a.clone(),
        nus: cfg.nus.clone(),
        p_s: cfg.p_s,
        p_s_tilde: cfg.p_s_tilde,
        p_d: cfg.p_d,
    };

    // Step 3.
    let all_common: Vec<usize> = {
        let mut v: Vec<usize> = common.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    };
    t.push(3, "common", join_list(all_common));
    t.push(3, "counts", format!("C={} E={}", join_list(&data.c), join_list(&data.e[1..])));

    let mut outcome = SessionOutcome {
        status: SessionStatus::Completed,
        reached_step: 4,
        initial,
        data: ExperimentData::default(),
        plus: None,
        times: None,
        keys_equal: false,
        transcript: Transcript::default(),
    };
    let abort = |mut outcome: SessionOutcome, mut t: Transcript, data: ExperimentData, step: u8, reason: String| {
        t.push(step, "abort", reason.clone());
        outcome.status = SessionStatus::Aborted { step, reason };
        outcome.data = data;
        outcome.transcript = t;
        outcome
    };

    // Step 4.
    for kind in [cfg.key_kind(Basis::Times), cfg.key_kind(Basis::Plus)] {
        if data.e[kind] <= cfg.n {
            let reason = format!("E{kind}={} <= N={}", data.e[kind], cfg.n);
            return Ok(abort(outcome, t, data, 4, reason));
        }
    }
    let mut raw: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (slot, kind) in [cfg.key_kind(Basis::Times), cfg.key_kind(Basis::Plus)].into_iter().enumerate() {
        let positions = &common[kind];
        let checks = positions.len() - cfg.n;
        let mut chosen = sample(rng, positions.len(), checks).into_vec();
        chosen.sort_unstable();
        let mut is_check = vec![false; positions.len()];
        for &c in &chosen {
            is_check[c] = true;
        }
        let check_positions: Vec<usize> = chosen.iter().map(|&c| positions[c]).collect();
        raw[slot] = positions
            .iter()
            .zip(&is_check)
            .filter(|(_, &c)| !c)
            .map(|(&p, _)| p)
            .collect();
        data.checks[kind] = checks;
        data.h[kind] = check_positions
            .iter()
            .filter(|&&p| pulses[p].alice_bit != pulses[p].bob_bit)
            .count();
        t.push(
            4,
            "check",
            format!(
                "kind={kind} positions={} bits={}",
                join_list(&check_positions),
                bit_text(&bits_of(&pulses, &check_positions, |p| p.alice_bit))
            ),
        );
        t.push(4, "errors", format!("kind={kind} H={}", data.h[kind]));
    }

    // Step 5.
    outcome.reached_step = 5;
    for kind in 1..kinds {
        if kind == cfg.key_kind(Basis::Times) || kind == cfg.key_kind(Basis::Plus) {
            continue;
        }
        let positions = &common[kind];
        data.checks[kind] = positions.len();
        data.h[kind] = positions
            .iter()
            .filter(|&&p| pulses[p].alice_bit != pulses[p].bob_bit)
            .count();
        t.push(
            5,
            "reveal",
            format!(
                "kind={kind} positions={} alice={} bob={}",
                join_list(positions),
                bit_text(&bits_of(&pulses, positions, |p| p.alice_bit)),
                bit_text(&bits_of(&pulses, positions, |p| p.bob_bit))
            ),
        );
    }
    t.push(5, "errors", format!("H={}", join_list(&data.h[1..])));

    // Step 6.
    outcome.reached_step = 6;
    let mut plans = Vec::with_capacity(2);
    for basis in [Basis::Plus, Basis::Times] {
        match plan_basis(cfg, &data, basis)? {
            Ok(plan) => plans.push(plan),
            Err(reason) => return Ok(abort(outcome, t, data, 6, reason)),
        }
    }
    for plan in &plans {
        t.push(
            6,
            "plan",
            format!(
                "basis={} kind={} error_rate={}/{} n_ec={} m={} l={}",
                plan.basis.symbol(),
                plan.kind,
                data.h[plan.kind],
                data.checks[plan.kind],
                plan.ec_bits,
                plan.m,
                plan.l
            ),
        );
    }

    // Steps 7 to 10: + basis first.
    for (plan, step) in plans.iter().zip([7u8, 9]) {
        outcome.reached_step = step;
        let positions = match plan.basis {
            Basis::Times => &raw[0],
            Basis::Plus => &raw[1],
        };
        let x_alice = bits_of(&pulses, positions, |p| p.alice_bit);
        let x_bob = bits_of(&pulses, positions, |p| p.bob_bit);
        let code = SystematicCode::sample(rng, cfg.n, plan.ec_bits)?;
        let ec = match cfg.ec_direction {
            EcDirection::Forward => forward_error_correct(&x_alice, &x_bob, &code, cfg.ec_guard, rng)?,
            EcDirection::Reverse => reverse_error_correct(&x_alice, &x_bob, &code, cfg.ec_guard, rng)?,
        };
        let parity = join_list(code.parity().row_vectors().iter().map(bit_text));
        t.push(
            step,
            "ec",
            format!(
                "basis={} direction={} parity={parity} sent={}",
                plan.basis.symbol(),
                cfg.ec_direction.bounds_direction().name(),
                bit_text(&ec.sent)
            ),
        );
        outcome.reached_step = step + 1;
        let hash = ToeplitzHash::sample(rng, plan.l, plan.m)?;
        t.push(
            step + 1,
            "pa",
            format!("basis={} seed={}", plan.basis.symbol(), bit_text(hash.seed())),
        );
        let keys = KeyPair {
            alice: hash.hash_key(&ec.z_alice)?,
            bob: hash.hash_key(&ec.z_bob)?,
        };
        let labels: Vec<PulseLabel> = positions.iter().map(|&p| pulses[p].label).collect();
        let mut hidden = classify(&labels);
        hidden.t = positions
            .iter()
            .filter(|&&p| pulses[p].label.class == PhotonClass::Single && phase_error(&pulses[p], plan.basis))
            .count();
        let mut inputs = BoundInputs::point_mass(hidden, plan.m, plan.l);
        inputs.n_bar = cfg.n_bar;
        inputs.n_under = cfg.n_under;
        let result = BasisOutcome {
            basis: plan.basis,
            kind: plan.kind,
            errors: data.h[plan.kind],
            checked: data.checks[plan.kind],
            ec_bits: plan.ec_bits,
            m: plan.m,
            l: plan.l,
            ec_success: ec.success,
            keys,
            hidden,
            bounds: bound_report(&inputs, cfg.ec_direction.bounds_direction())?,
        };
        match plan.basis {
            Basis::Plus => outcome.plus = Some(result),
            Basis::Times => outcome.times = Some(result),
        }
    }
    outcome.keys_equal = [&outcome.plus, &outcome.times]
        .iter()
        .all(|b| b.as_ref().is_some_and(|b| b.keys.alice == b.keys.bob));
    outcome.data = data;
    outcome.transcript = t;
    Ok(outcome)
}
