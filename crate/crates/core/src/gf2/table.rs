//! Complete minimum-distance decoding tables for short codes, on `u64` masks.
//!
//! Bit `i` of a mask is coordinate `i`. The tie-break matches
//! [`min_distance_decode`](super::min_distance_decode): among nearest codewords
//! the lexicographically smallest wins, reading bit 0 first.

use crate::error::{Error, Result};
use crate::gf2::{BitVector, LinearCode};

/// Largest code length for which a full table may be built.
pub const MAX_TABLE_LENGTH: usize = 24;

/// Whether `a` precedes `b` lexicographically with bit 0 most significant.
pub fn lex_less(a: u64, b: u64) -> bool {
    let d = a ^ b;
    d != 0 && a & (d & d.wrapping_neg()) == 0
}

pub fn parity(v: u64) -> bool {
    v.count_ones() % 2 == 1
}

pub fn to_mask(v: &BitVector) -> u64 {
    v.to_mask()
}

/// `decode[r]` is the codeword nearest to `r` for every `r ∈ F₂ⁿ`.
#[derive(Debug, Clone)]
pub struct DecodeTable {
    length: usize,
    decode: Vec<u64>,
}

impl DecodeTable {
    pub fn new(code: &LinearCode, guard_length: usize) -> Result<Self> {
        let n = code.length();
        let limit = guard_length.min(MAX_TABLE_LENGTH);
        if n > limit {
            return Err(Error::Capacity {
                what: "decoding table length",
                size: n as u64,
                limit: limit as u64,
            });
        }
        let checks: Vec<u64> = code.dual().basis().iter().map(to_mask).collect();
        let syndrome = |r: u64| -> usize {
            checks
                .iter()
                .enumerate()
                .fold(0usize, |s, (k, &h)| s | (parity(h & r) as usize) << k)
        };
        let cosets = 1usize << checks.len();
        let mut best_weight = vec![u32::MAX; cosets];
        let mut leaders: Vec<Vec<u64>> = vec![Vec::new(); cosets];
        let size = 1u64 << n;
        let mut syndromes = Vec::with_capacity(size as usize);
        for r in 0..size {
            let s = syndrome(r);
            syndromes.push(s as u32);
            let w = r.count_ones();
            if w < best_weight[s] {
                best_weight[s] = w;
                leaders[s].clear();
            }
            if w == best_weight[s] {
                leaders[s].push(r);
            }
        }
        let decode = (0..size)
            .map(|r| {
                let mut best: Option<u64> = None;
                for &e in &leaders[syndromes[r as usize] as usize] {
                    let c = r ^ e;
                    if best.is_none_or(|b| lex_less(c, b)) {
                        best = Some(c);
                    }
                }
                best.expect("every coset has a leader")
            })
            .collect();
        Ok(Self { length: n, decode })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn decode(&self, received: u64) -> u64 {
        self.decode[received as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{min_distance_decode, DEFAULT_DECODE_GUARD};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lex_order_on_masks() {
        assert!(lex_less(0b10, 0b01));
        assert!(!lex_less(0b01, 0b10));
        assert!(!lex_less(5, 5));
    }

    #[test]
    fn table_matches_scan_decoder() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let n = rng.random_range(1..=9);
            let k = rng.random_range(0..=n);
            let gens: Vec<BitVector> = (0..k).map(|_| BitVector::from_mask(n, rng.random())).collect();
            let code = LinearCode::from_generators(n, &gens).unwrap();
            let table = DecodeTable::new(&code, 12).unwrap();
            let words = code.codewords(DEFAULT_DECODE_GUARD).unwrap();
            for r in 0..1u64 << n {
                let scan = min_distance_decode(&BitVector::from_mask(n, r), &words).unwrap();
                assert_eq!(table.decode(r), scan.to_mask());
            }
        }
    }
}
