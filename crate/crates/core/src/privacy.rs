//! Privacy amplification by Toeplitz hashing.
//!
//! A hash `M_p = (X, I)` maps `l + m` bits to `l` bits. The first `m`
//! coordinates of an input `Z` meet the `X` block ("x-part") and the last `l`
//! meet the identity ("y-part"). The seed has `l + m − 1` bits; seed index `k`
//! (0-based) is the variable `Y_{k+1}` and `X[i][j] = seed[i + j]`.
//!
//! Universality is the statement that for every nonzero `Z`, the fraction of
//! seeds with `Z ∈ Im M_pᵀ` is at most `2^{-m}`. Since
//! `Im M_pᵀ = {(Xᵀy, y)}`, [`universality_profile`] counts, for each seed and
//! each `y`, the single image point `(Xᵀy, y)`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Default cap on the number of enumerated seed bits.
pub const DEFAULT_SEED_GUARD: usize = 20;

/// A linear hash `F₂^{l+m} → F₂^l` applied as `Z ↦ M Z`.
pub trait LinearHash {
    fn output_len(&self) -> usize;
    fn input_len(&self) -> usize;
    fn matrix(&self) -> BitMatrix;

    fn hash_key(&self, z: &BitVector) -> Result<BitVector> {
        self.matrix().mat_vec_mul(z)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ToeplitzHash {
    l: usize,
    m: usize,
    seed: BitVector,
}

impl ToeplitzHash {
    pub fn new(l: usize, m: usize, seed: BitVector) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidInput("output length l must be positive".into()));
        }
        let expected = l + m - 1;
        if seed.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: seed.len(),
            });
        }
        Ok(Self { l, m, seed })
    }

    /// Uniform seed of `l + m − 1` bits drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, l: usize, m: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidInput("output length l must be positive".into()));
        }
        let bits: Vec<bool> = (0..l + m - 1).map(|_| rng.random()).collect();
        Self::new(l, m, BitVector::from_bools(&bits))
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> &BitVector {
        &self.seed
    }

    /// The `l × m` block `X`.
    pub fn x_block(&self) -> BitMatrix {
        let mut x = BitMatrix::zeros(self.l, self.m);
        for i in 0..self.l {
            for j in 0..self.m {
                x.set(i, j, self.seed.get(i + j));
            }
        }
        x
    }

    /// `Ker M_p = {(a, X a) : a ∈ F₂^m}`, as the `(l+m) × m` matrix `(I; X)`.
    pub fn kernel_generator(&self) -> BitMatrix {
        BitMatrix::identity(self.m)
            .vconcat(&self.x_block())
            .expect("both blocks have m columns")
    }

    /// Splits `Z` into its x-part (length `m`) and y-part (length `l`).
    pub fn split(&self, z: &BitVector) -> Result<(BitVector, BitVector)> {
        self.check_input(z)?;
        Ok((z.slice(0, self.m), z.slice(self.m, self.l)))
    }

    /// Whether `Z ∈ Im M_pᵀ`, i.e. whether `x = Xᵀ y`.
    pub fn in_transpose_image(&self, z: &BitVector) -> Result<bool> {
        let (x, y) = self.split(z)?;
        Ok(self.x_block().transpose().mat_vec_mul(&y)? == x)
    }

    fn check_input(&self, z: &BitVector) -> Result<()> {
        if z.len() == self.l + self.m {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.l + self.m,
                found: z.len(),
            })
        }
    }
}

impl LinearHash for ToeplitzHash {
    fn output_len(&self) -> usize {
        self.l
    }

    fn input_len(&self) -> usize {
        self.l + self.m
    }

    fn matrix(&self) -> BitMatrix {
        self.x_block()
            .hconcat(&BitMatrix::identity(self.l))
            .expect("both blocks have l rows")
    }

    fn hash_key(&self, z: &BitVector) -> Result<BitVector> {
        let (x, y) = self.split(z)?;
        let mut out = self.x_block().mat_vec_mul(&x)?;
        out ^= &y;
        Ok(out)
    }
}

/// A hash whose `l × (l+m)` matrix is uniformly random (`l(l+m)` seed bits).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RandomMatrixHash {
    matrix: BitMatrix,
}

impl RandomMatrixHash {
    pub fn new(matrix: BitMatrix) -> Self {
        Self { matrix }
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R, l: usize, m: usize) -> Self {
        let mut matrix = BitMatrix::zeros(l, l + m);
        for i in 0..l {
            for j in 0..l + m {
                matrix.set(i, j, rng.random());
            }
        }
        Self { matrix }
    }
}

impl LinearHash for RandomMatrixHash {
    fn output_len(&self) -> usize {
        self.matrix.rows()
    }

    fn input_len(&self) -> usize {
        self.matrix.cols()
    }

    fn matrix(&self) -> BitMatrix {
        self.matrix.clone()
    }
}

pub fn build_toeplitz(l: usize, m: usize, seed: &BitVector) -> Result<BitMatrix> {
    Ok(ToeplitzHash::new(l, m, seed.clone())?.matrix())
}

/// Exact membership fractions `P_seed{Z ∈ Im M_pᵀ}` for every nonzero `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniversalityProfile {
    pub l: usize,
    pub m: usize,
    pub fractions: BTreeMap<BitVector, Ratio<u64>>,
}

impl UniversalityProfile {
    pub fn bound(&self) -> Ratio<u64> {
        Ratio::new(1, 1u64 << self.m)
    }

    pub fn max_fraction(&self) -> Ratio<u64> {
        self.fractions
            .values()
            .copied()
            .max()
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    /// Whether every fraction is at most `2^{-m}`, compared exactly.
    pub fn satisfies_bound(&self) -> bool {
        let bound = self.bound();
        self.fractions.values().all(|f| *f <= bound)
    }
}

pub fn universality_profile(l: usize, m: usize) -> Result<UniversalityProfile> {
    universality_profile_guarded(l, m, DEFAULT_SEED_GUARD)
}

pub fn universality_profile_guarded(l: usize, m: usize, guard: usize) -> Result<UniversalityProfile> {
    if l == 0 {
        return Err(Error::InvalidInput("output length l must be positive".into()));
    }
    let seed_bits = l + m - 1;
    if seed_bits > guard || l + m > 40 {
        return Err(Error::Capacity {
            what: "Toeplitz seed enumeration (seed bits)",
            size: seed_bits as u64,
            limit: guard as u64,
        });
    }
    let n = l + m;
    let mut counts = vec![0u64; 1usize << n];
    let x_rows = |seed: u64| -> Vec<u64> {
        // Row i of X is seed bits i..i+m; packed so that bit j is X[i][j].
        (0..l).map(|i| (seed >> i) & ((1u64 << m) - 1)).collect()
    };
    for seed in 0..1u64 << seed_bits {
        let rows = x_rows(seed);
        let mut xty = 0u64;
        counts[0] += 1;
        // Gray-code walk over y: Xᵀy accumulates rows of X.
        for step in 1u64..1 << l {
            let i = step.trailing_zeros() as usize;
            xty ^= rows[i];
            let y = step ^ (step >> 1);
            counts[(xty | (y << m)) as usize] += 1;
        }
    }
    let total = 1u64 << seed_bits;
    let fractions = (1..1usize << n)
        .map(|z| (BitVector::from_mask(n, z as u64), Ratio::new(counts[z], total)))
        .collect();
    Ok(UniversalityProfile { l, m, fractions })
}

/// The same profile over all `2^{l(l+m)}` uniformly random matrices.
pub fn random_matrix_universality_profile(l: usize, m: usize, guard: usize) -> Result<UniversalityProfile> {
    let n = l + m;
    let bits = l * n;
    if bits > guard || n > 40 {
        return Err(Error::Capacity {
            what: "random matrix enumeration (matrix bits)",
            size: bits as u64,
            limit: guard as u64,
        });
    }
    let mut counts = vec![0u64; 1usize << n];
    let row_mask = (1u64 << n) - 1;
    let mut image = Vec::with_capacity(1 << l);
    for mat in 0..1u64 << bits {
        let rows: Vec<u64> = (0..l).map(|i| (mat >> (i * n)) & row_mask).collect();
        image.clear();
        image.push(0u64);
        for r in &rows {
            let shifted: Vec<u64> = image.iter().map(|v| v ^ r).collect();
            image.extend(shifted);
        }
        image.sort_unstable();
        image.dedup();
        for &z in &image {
            counts[z as usize] += 1;
        }
    }
    let total = 1u64 << bits;
    let fractions = (1..1usize << n)
        .map(|z| (BitVector::from_mask(n, z as u64), Ratio::new(counts[z], total)))
        .collect();
    Ok(UniversalityProfile { l, m, fractions })
}
