//! Error correction with a systematic binary code.
//!
//! `M_e = [I_k; P]` is `N × k`, so the message is the first `k` bits of a
//! codeword. Decoding is minimum-distance on `Im M_e`, ties broken towards the
//! lexicographically least error pattern (bit 0 first). With few parity
//! checks a cost table over the columns of `H = [P | I]` yields the coset
//! leader of any syndrome in `O(N)`; with few message bits the codewords are
//! enumerated.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Cap on `min(k, N − k)`; the cost table has `(N + 1)·2^(N − k)` entries.
pub const DEFAULT_EC_GUARD: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicCode {
    /// `P`, of size `(N − k) × k`.
    parity: BitMatrix,
}

impl SystematicCode {
    pub fn new(parity: BitMatrix) -> Self {
        Self { parity }
    }

    /// A code with uniformly random `P`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidInput(format!("message length {k} exceeds block length {n}")));
        }
        let mut parity = BitMatrix::zeros(n - k, k);
        for i in 0..n - k {
            for j in 0..k {
                parity.set(i, j, rng.random());
            }
        }
        Ok(Self { parity })
    }

    pub fn length(&self) -> usize {
        self.parity.rows() + self.parity.cols()
    }

    pub fn dimension(&self) -> usize {
        self.parity.cols()
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    /// `M_e = [I_k; P]`.
    pub fn generator(&self) -> BitMatrix {
        let k = self.dimension();
        let mut m = BitMatrix::zeros(self.length(), k);
        for i in 0..k {
            m.set(i, i, true);
        }
        for i in 0..self.parity.rows() {
            for j in 0..k {
                m.set(k + i, j, self.parity.get(i, j));
            }
        }
        m
    }

    pub fn encode(&self, z: &BitVector) -> Result<BitVector> {
        if z.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: z.len(),
            });
        }
        Ok(z.concat(&self.parity.mat_vec_mul(z)?))
    }

    pub fn decoder(&self, guard: usize) -> Result<Decoder> {
        let (n, k) = (self.length(), self.dimension());
        let r = n - k;
        if r <= guard && r < 64 {
            Ok(Decoder::Syndrome(SyndromeTable::new(self)))
        } else if k <= guard && k < 64 {
            Ok(Decoder::Enumerate(self.clone()))
        } else {
            Err(Error::Capacity {
                what: "min(k, N - k) for exhaustive decoding",
                size: r.min(k) as u64,
                limit: guard as u64,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyndromeTable {
    code: SystematicCode,
    /// Column `j` of `H = [P | I]` as a mask.
    columns: Vec<u64>,
    /// `cost[j·2^r + s]`: least weight of an error on positions `j..N` with syndrome `s`.
    cost: Vec<u16>,
}

impl SyndromeTable {
    fn new(code: &SystematicCode) -> Self {
        let (n, k) = (code.length(), code.dimension());
        let r = n - k;
        let mut columns = Vec::with_capacity(n);
        for j in 0..k {
            columns.push((0..r).fold(0u64, |acc, i| acc | ((code.parity.get(i, j) as u64) << i)));
        }
        columns.extend((0..r).map(|i| 1u64 << i));
        let size = 1usize << r;
        let mut cost = vec![u16::MAX; (n + 1) * size];
        cost[n * size] = 0;
        for j in (0..n).rev() {
            for s in 0..size {
                let skip = cost[(j + 1) * size + s];
                let take = cost[(j + 1) * size + (s ^ columns[j] as usize)].saturating_add(1);
                cost[j * size + s] = skip.min(take);
            }
        }
        Self {
            code: code.clone(),
            columns,
            cost,
        }
    }

    fn syndrome(&self, y: &BitVector) -> usize {
        (0..y.len())
            .filter(|&j| y.get(j))
            .fold(0u64, |acc, j| acc ^ self.columns[j]) as usize
    }

    /// The lexicographically least minimum-weight error with the syndrome of `y`.
    fn leader(&self, y: &BitVector) -> BitVector {
        let n = self.code.length();
        let size = 1usize << (n - self.code.dimension());
        let mut s = self.syndrome(y);
        let mut e = BitVector::zeros(n);
        for j in 0..n {
            // A zero at `j` wins whenever it keeps the optimum.
            if self.cost[(j + 1) * size + s] != self.cost[j * size + s] {
                e.set(j, true);
                s ^= self.columns[j] as usize;
            }
        }
        e
    }
}

#[derive(Debug, Clone)]
pub enum Decoder {
    Syndrome(SyndromeTable),
    Enumerate(SystematicCode),
}

impl Decoder {
    fn code(&self) -> &SystematicCode {
        match self {
            Decoder::Syndrome(t) => &t.code,
            Decoder::Enumerate(c) => c,
        }
    }

    /// The nearest codeword to `y`.
    pub fn decode_codeword(&self, y: &BitVector) -> Result<BitVector> {
        let code = self.code();
        if y.len() != code.length() {
            return Err(Error::DimensionMismatch {
                expected: code.length(),
                found: y.len(),
            });
        }
        match self {
            Decoder::Syndrome(t) => Ok(y ^ &t.leader(y)),
            Decoder::Enumerate(c) => {
                let k = c.dimension();
                let mut best: Option<(usize, BitVector, BitVector)> = None;
                for mask in 0..1u64 << k {
                    let word = c.encode(&BitVector::from_mask(k, mask))?;
                    let e = y ^ &word;
                    let w = e.weight();
                    let better = match &best {
                        None => true,
                        Some((bw, be, _)) => w < *bw || (w == *bw && e.lex_cmp(be).is_lt()),
                    };
                    if better {
                        best = Some((w, e, word));
                    }
                }
                Ok(best.map(|b| b.2).expect("a code has at least one codeword"))
            }
        }
    }

    /// The message whose codeword is nearest to `y`.
    pub fn decode(&self, y: &BitVector) -> Result<BitVector> {
        Ok(self.decode_codeword(y)?.slice(0, self.code().dimension()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EcResult {
    pub z_alice: BitVector,
    pub z_bob: BitVector,
    /// The public word `M_eZ + X` (forward) or `M_eZ + X′` (reverse).
    pub sent: BitVector,
    pub success: bool,
}

fn check_keys(x_alice: &BitVector, x_bob: &BitVector, code: &SystematicCode) -> Result<()> {
    for x in [x_alice, x_bob] {
        if x.len() != code.length() {
            return Err(Error::DimensionMismatch {
                expected: code.length(),
                found: x.len(),
            });
        }
    }
    Ok(())
}

fn random_message<R: Rng + ?Sized>(k: usize, rng: &mut R) -> BitVector {
    let bits: Vec<bool> = (0..k).map(|_| rng.random()).collect();
    BitVector::from_bools(&bits)
}

/// Alice draws `Z` and sends `M_eZ + X`; Bob decodes `M_eZ + X − X′`.
pub fn forward_error_correct<R: Rng + ?Sized>(
    x_alice: &BitVector,
    x_bob: &BitVector,
    code: &SystematicCode,
    guard: usize,
    rng: &mut R,
) -> Result<EcResult> {
    check_keys(x_alice, x_bob, code)?;
    let decoder = code.decoder(guard)?;
    let z = random_message(code.dimension(), rng);
    let sent = &code.encode(&z)? ^ x_alice;
    let z_bob = decoder.decode(&(&sent ^ x_bob))?;
    Ok(EcResult {
        success: z_bob == z,
        z_alice: z,
        z_bob,
        sent,
    })
}

/// Bob draws `Z` and sends `M_eZ + X′`; Alice decodes `M_eZ + X′ − X`.
pub fn reverse_error_correct<R: Rng + ?Sized>(
    x_alice: &BitVector,
    x_bob: &BitVector,
    code: &SystematicCode,
    guard: usize,
    rng: &mut R,
) -> Result<EcResult> {
    check_keys(x_alice, x_bob, code)?;
    let decoder = code.decoder(guard)?;
    let z = random_message(code.dimension(), rng);
    let sent = &code.encode(&z)? ^ x_bob;
    let z_alice = decoder.decode(&(&sent ^ x_alice))?;
    Ok(EcResult {
        success: z_alice == z,
        z_alice,
        z_bob: z,
        sent,
    })
}
