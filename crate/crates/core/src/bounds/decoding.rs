//! Exhaustive check of the decoding-error bound `2^{n₁h̄(t/n₁) + n₂ − m}`.
//!
//! Coordinates split into three consecutive parts of sizes `n₀, n₁, n₂`. The
//! channel leaves part 0 intact, flips at most `t` bits of part 1 and is
//! arbitrary on part 2. `C₁ = Im M_e` has dimension `l + m` and
//! `C₂(X) = M_e(Ker M_p)` for a Toeplitz `M_p` with seed `X`, so messages are
//! the cosets `C₂^⊥/C₁^⊥`. Alice sends a uniform representative `x'` of her
//! coset. The decoder `Γ` returns the `z ∈ C₂^⊥` with `π₀(z) = π₀(y)` that
//! minimises `|π₁(y − z)|`, ties going to the lexicographically smallest `z`;
//! part 2 is ignored. It fails when `[Γ(y)] ≠ [x']`.
//!
//! For each message and noise pattern the failure rate is averaged over the
//! coset representatives and over seeds. The bound must hold for every
//! channel law on the admissible noise set, hence for every pattern, so the
//! check compares the worst pattern against it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::min_decoding_bound;
use crate::error::{Error, Result};
use crate::gf2::table::{lex_less, parity, to_mask};
use crate::gf2::{BitMatrix, BitVector, LinearCode};
use crate::privacy::{ToeplitzHash, DEFAULT_SEED_GUARD};

/// Default cap on `n₀ + n₁ + n₂`.
pub const DEFAULT_DECODING_GUARD: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecodingInstance {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    pub t: usize,
    /// `l + m`, the dimension of `C₁`.
    pub code_dim: usize,
    pub m: usize,
    /// Seeds the redundancy block of a systematic `M_e` when `l + m < N`.
    pub code_seed: u64,
}

impl DecodingInstance {
    pub fn length(&self) -> usize {
        self.n0 + self.n1 + self.n2
    }

    pub fn bound(&self) -> f64 {
        min_decoding_bound(self.n1, self.n2, self.t.min(self.n1), self.m).expect("t clamped to n1")
    }

    /// `M_e = I` when `l + m = N`, otherwise `[I; P]` with `P` drawn from `code_seed`.
    pub fn encoder(&self) -> BitMatrix {
        let n = self.length();
        let k = self.code_dim;
        let mut m_e = BitMatrix::zeros(n, k);
        for i in 0..k {
            m_e.set(i, i, true);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.code_seed);
        for i in k..n {
            for j in 0..k {
                m_e.set(i, j, rng.random());
            }
        }
        m_e
    }

    fn validate(&self, guard: usize) -> Result<()> {
        let n = self.length();
        if n > guard.min(63) {
            return Err(Error::Capacity {
                what: "decoding check length",
                size: n as u64,
                limit: guard.min(63) as u64,
            });
        }
        if self.t > self.n1 {
            return Err(Error::InvalidInput(format!("t = {} exceeds n1 = {}", self.t, self.n1)));
        }
        if self.code_dim > n || self.m >= self.code_dim {
            return Err(Error::InvalidInput(format!(
                "need m < l + m <= N, got m = {}, l + m = {}, N = {n}",
                self.m, self.code_dim
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedSampling {
    /// Every seed of `l + m − 1` bits.
    Exhaustive,
    /// `trials` seeds drawn uniformly from `ChaCha8(rng_seed)`.
    Random { trials: usize, rng_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodingCheck {
    pub instance: DecodingInstance,
    /// Mean over messages and over part-1 patterns, worst case over part 2.
    pub mean_error: f64,
    /// Worst case over messages and admissible noise patterns.
    pub worst_error: f64,
    pub bound: f64,
    pub seeds: usize,
}

impl DecodingCheck {
    pub fn satisfied(&self) -> bool {
        self.worst_error <= self.bound + 1e-12
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.worst_error
    }
}

pub fn verify_proposition_decoding(instance: &DecodingInstance, sampling: SeedSampling) -> Result<DecodingCheck> {
    verify_proposition_decoding_guarded(instance, sampling, DEFAULT_DECODING_GUARD)
}

pub fn verify_proposition_decoding_guarded(
    instance: &DecodingInstance,
    sampling: SeedSampling,
    guard: usize,
) -> Result<DecodingCheck> {
    instance.validate(guard)?;
    let m = instance.m;
    let l = instance.code_dim - m;
    let m_e = instance.encoder();
    let c1 = LinearCode::column_space(&m_e);
    let c1_checks: Vec<u64> = c1.basis().iter().map(to_mask).collect();
    let in_c1_dual = |w: u64| c1_checks.iter().all(|&c| !parity(c & w));

    let seed_bits = l + m - 1;
    let seeds: Vec<BitVector> = match sampling {
        SeedSampling::Exhaustive => {
            if seed_bits > DEFAULT_SEED_GUARD {
                return Err(Error::Capacity {
                    what: "exhaustive seed enumeration (bits)",
                    size: seed_bits as u64,
                    limit: DEFAULT_SEED_GUARD as u64,
                });
            }
            (0..1u64 << seed_bits).map(|s| BitVector::from_mask(seed_bits, s)).collect()
        }
        SeedSampling::Random { trials, rng_seed } => {
            if trials == 0 {
                return Err(Error::InvalidInput("random seed sampling needs trials >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            (0..trials)
                .map(|_| ToeplitzHash::sample(&mut rng, l, m).map(|h| h.seed().clone()))
                .collect::<Result<_>>()?
        }
    };

    let (n0, n1, n2) = (instance.n0, instance.n1, instance.n2);
    let part0 = (1u64 << n0) - 1;
    let part1 = ((1u64 << n1) - 1) << n0;
    let e1_patterns: Vec<u64> = (0..1u64 << n1).filter(|e| e.count_ones() as usize <= instance.t).collect();
    let e2_count = 1usize << n2;

    let messages = 1usize << l;
    // failures[msg][e1][e2] summed over seeds, as a fraction of the coset size.
    let mut failures = vec![0.0f64; messages * e1_patterns.len() * e2_count];
    let cell = |msg: usize, a: usize, b: usize| (msg * e1_patterns.len() + a) * e2_count + b;

    for seed in &seeds {
        let hash = ToeplitzHash::new(l, m, seed.clone())?;
        let g2 = m_e.mul(&hash.kernel_generator())?;
        let c2 = LinearCode::column_space(&g2);
        let c2_dual = c2.dual();
        let words: Vec<u64> = c2_dual
            .codewords(u64::MAX)?
            .iter()
            .map(to_mask)
            .collect();

        let quotient = QuotientIndex::new(&c2_dual, &c1, l)?;

        let mut gamma = vec![u64::MAX; 1usize << (n0 + n1)];
        let mut decode = |key: u64| -> u64 {
            let slot = (key & (part0 | part1)) as usize;
            if gamma[slot] == u64::MAX {
                let mut best: Option<(u32, u64)> = None;
                for &z in &words {
                    if (z ^ key) & part0 != 0 {
                        continue;
                    }
                    let d = ((z ^ key) & part1).count_ones();
                    if best.is_none_or(|(bd, bz)| d < bd || (d == bd && lex_less(z, bz))) {
                        best = Some((d, z));
                    }
                }
                gamma[slot] = best.expect("x' itself matches part 0").1;
            }
            gamma[slot]
        };

        let mut coset_size = vec![0usize; messages];
        for &x in &words {
            coset_size[quotient.message(x)] += 1;
        }
        for &x in &words {
            let msg = quotient.message(x);
            let weight = 1.0 / coset_size[msg] as f64;
            for (a, &e1) in e1_patterns.iter().enumerate() {
                let shifted = x ^ (e1 << n0);
                let z = decode(shifted);
                let failed = !in_c1_dual(z ^ x);
                if failed {
                    // Γ ignores part 2, so every part-2 pattern fails alike.
                    for b in 0..e2_count {
                        failures[cell(msg, a, b)] += weight;
                    }
                }
            }
        }
    }

    let scale = 1.0 / seeds.len() as f64;
    let mut worst = 0.0f64;
    let mut mean = 0.0;
    for msg in 0..messages {
        for a in 0..e1_patterns.len() {
            let row_worst = (0..e2_count)
                .map(|b| failures[cell(msg, a, b)] * scale)
                .fold(0.0, f64::max);
            worst = worst.max(row_worst);
            mean += row_worst;
        }
    }
    mean /= (messages * e1_patterns.len()) as f64;
    Ok(DecodingCheck {
        instance: *instance,
        mean_error: mean,
        worst_error: worst,
        bound: instance.bound(),
        seeds: seeds.len(),
    })
}

/// Maps a word of `C₂^⊥` to the index of its coset modulo `C₁^⊥`.
struct QuotientIndex {
    /// Functionals `w ↦ b·w` for a basis `b` of `C₁` completing `C₂`: they
    /// vanish on `C₁^⊥` and separate the cosets of `C₂^⊥/C₁^⊥`.
    functionals: Vec<u64>,
}

impl QuotientIndex {
    fn new(c2_dual: &LinearCode, c1: &LinearCode, l: usize) -> Result<Self> {
        let n = c1.length();
        let c2 = c2_dual.dual();
        // Extend a basis of C₂ to one of C₁; the added vectors give the functionals.
        let mut span: Vec<BitVector> = c2.basis().to_vec();
        let mut functionals = Vec::with_capacity(l);
        for b in c1.basis() {
            let mut trial = span.clone();
            trial.push(b.clone());
            if LinearCode::from_generators(n, &trial)?.dimension() > span.len() {
                span = trial;
                functionals.push(to_mask(b));
            }
        }
        if functionals.len() != l {
            return Err(Error::InvalidInput(format!(
                "C2 is not a codimension-{l} subcode of C1"
            )));
        }
        Ok(Self { functionals })
    }

    fn message(&self, w: u64) -> usize {
        self.functionals
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &f)| acc | (parity(f & w) as usize) << k)
    }
}
