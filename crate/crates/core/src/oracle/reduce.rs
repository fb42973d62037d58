//! Reduction of an `N`-qubit Pauli channel and a code pair to the logical level.
//!
//! With `C₁ = Im M_e` and `C₂ = M_e(Ker M_p)`, the key is carried by `C₁/C₂`
//! in the + basis, equivalently by `C₂^⊥/C₁^⊥` in the × basis.
//!
//! Phase side: a representative `z ∈ C₁^⊥` is hit by the phase pattern `e`,
//! decoded to the nearest `ẑ ∈ C₂^⊥`, and leaves the residual `w = ẑ ⊕ z ∈ C₂^⊥`.
//! Its logical value is the unique `u` with `M_pᵀ u = M_eᵀ w`; decoding fails
//! exactly when `u ≠ 0`, i.e. when `ẑ ∉ C₁^⊥`. Because the lexicographic
//! tie-break is not translation invariant, every `z ∈ C₁^⊥` is averaged with
//! equal weight.
//!
//! Bit side: a codeword `c ∈ C₁` is hit by the bit pattern `f`, decoded to the
//! nearest codeword of `C₁`, and the residual `ρ = M_e Z` contributes the
//! logical bit error `M_p Z`. Codewords are averaged uniformly over `C₁`.

use crate::channel::PauliWeights;
use crate::error::{Error, Result};
use crate::gf2::table::{parity, DecodeTable};
use crate::gf2::{BitMatrix, BitVector, LinearCode};
use crate::oracle::PauliErrorDistribution;

/// Default cap on the physical length `N`.
pub const DEFAULT_REDUCE_GUARD: usize = 12;

/// Joint law of the physical bit pattern `f` and phase pattern `e`.
#[derive(Debug, Clone, PartialEq)]
pub enum CodeChannel {
    /// Independent phase flips with the given per-qubit rates and no bit flips.
    PhaseOnly(Vec<f64>),
    /// Independent qubits, each with its own `(x, z)` weights.
    Product(Vec<PauliWeights>),
    /// Explicit `(f, e, probability)` entries.
    Explicit(Vec<(BitVector, BitVector, f64)>),
}

impl CodeChannel {
    pub fn length(&self) -> Option<usize> {
        match self {
            CodeChannel::PhaseOnly(p) => Some(p.len()),
            CodeChannel::Product(w) => Some(w.len()),
            CodeChannel::Explicit(entries) => entries.first().map(|(f, _, _)| f.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedChannel {
    /// Logical `P(x, z)` on `F₂^l`.
    pub logical: PauliErrorDistribution,
    /// Failure probability of minimum-distance phase decoding.
    pub phase_error_min: f64,
}

/// Linear maps and decoding tables shared by every channel on one code pair.
#[derive(Debug, Clone)]
pub struct CodePair {
    n: usize,
    l: usize,
    c1_words: Vec<u64>,
    c1_dual_words: Vec<u64>,
    c1_table: DecodeTable,
    c2_dual_table: DecodeTable,
    /// Rows of `F₂ᴺ → F₂^l` giving the logical phase of residuals in `C₂^⊥`.
    logical_z: Vec<u64>,
    /// Rows of `F₂ᴺ → F₂^l` giving the logical bit of residuals in `C₁`.
    logical_x: Vec<u64>,
}

fn masks(vs: &[BitVector]) -> Vec<u64> {
    vs.iter().map(BitVector::to_mask).collect()
}

fn span(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &b in basis {
        let shifted: Vec<u64> = out.iter().map(|v| v ^ b).collect();
        out.extend(shifted);
    }
    out
}

fn apply(rows: &[u64], v: u64) -> u64 {
    rows.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &r)| acc | (parity(r & v) as u64) << i)
}

impl CodePair {
    pub fn new(m_e: &BitMatrix, m_p: &BitMatrix, guard: usize) -> Result<Self> {
        let n = m_e.rows();
        let k = m_e.cols();
        if n > guard {
            return Err(Error::Capacity {
                what: "code-channel reduction length",
                size: n as u64,
                limit: guard as u64,
            });
        }
        if m_p.cols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: m_p.cols(),
            });
        }
        if m_e.rank() != k {
            return Err(Error::InvalidInput("M_e must have full column rank".into()));
        }
        let l = m_p.rows();
        let ech_p = m_p.echelon();
        if ech_p.pivots.len() != l {
            return Err(Error::InvalidInput("M_p must have full row rank".into()));
        }

        let c1 = LinearCode::column_space(m_e);
        let kernel_images: Vec<BitVector> = m_p
            .kernel_basis()
            .iter()
            .map(|v| m_e.mat_vec_mul(v))
            .collect::<Result<_>>()?;
        let c2 = LinearCode::from_generators(n, &kernel_images)?;
        let c1_dual = c1.dual();
        let c2_dual = c2.dual();

        let me_cols: Vec<u64> = (0..k).map(|j| m_e.column(j).to_mask()).collect();

        // u = (Bᵀ)⁻¹ (M_eᵀ w)_S for l independent columns S of M_p.
        let b = m_p.select_columns(&ech_p.pivots);
        let bt_inv = b.transpose().inverse()?.expect("pivot columns are independent");
        let logical_z = (0..l)
            .map(|i| {
                bt_inv.row(i).ones_positions().iter().fold(0u64, |acc, &s| acc ^ me_cols[ech_p.pivots[s]])
            })
            .collect();

        // Z = A⁻¹ ρ_R for k independent rows R of M_e, then x = M_p Z.
        let rows_r = m_e.transpose().echelon().pivots;
        let a = BitMatrix::from_rows(k, rows_r.iter().map(|&r| m_e.row(r).clone()).collect())?;
        let a_inv = a.inverse()?.expect("pivot rows are independent");
        let mp_ainv = m_p.mul(&a_inv)?;
        let logical_x = (0..l)
            .map(|i| {
                mp_ainv.row(i).ones_positions().iter().fold(0u64, |acc, &r| acc | 1u64 << rows_r[r])
            })
            .collect();

        Ok(Self {
            n,
            l,
            c1_words: span(&masks(c1.basis())),
            c1_dual_words: span(&masks(c1_dual.basis())),
            c1_table: DecodeTable::new(&c1, guard)?,
            c2_dual_table: DecodeTable::new(&c2_dual, guard)?,
            logical_z,
            logical_x,
        })
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn logical_length(&self) -> usize {
        self.l
    }

    /// Distribution of the logical phase error caused by `e`, as `(u, weight)` pairs.
    pub fn phase_outcomes(&self, e: u64) -> Vec<(u64, f64)> {
        let weight = 1.0 / self.c1_dual_words.len() as f64;
        let mut acc = Vec::new();
        for &z in &self.c1_dual_words {
            let w = self.c2_dual_table.decode(z ^ e) ^ z;
            push(&mut acc, apply(&self.logical_z, w), weight);
        }
        acc
    }

    /// Distribution of the logical bit error caused by `f`.
    pub fn bit_outcomes(&self, f: u64) -> Vec<(u64, f64)> {
        let weight = 1.0 / self.c1_words.len() as f64;
        let mut acc = Vec::new();
        for &c in &self.c1_words {
            let rho = self.c1_table.decode(c ^ f) ^ c;
            push(&mut acc, apply(&self.logical_x, rho), weight);
        }
        acc
    }

    pub fn reduce(&self, channel: &CodeChannel) -> Result<ReducedChannel> {
        let n = self.n;
        if let Some(len) = channel.length() {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        let l = self.l;
        let mut joint = vec![0.0; 1usize << (2 * l)];
        let mut accumulate = |f_out: &[(u64, f64)], z_out: &[(u64, f64)], p: f64| {
            for &(a, pa) in f_out {
                for &(b, pb) in z_out {
                    joint[(a | b << l) as usize] += p * pa * pb;
                }
            }
        };
        match channel {
            CodeChannel::PhaseOnly(rates) => {
                let bits = self.bit_outcomes(0);
                for e in 0..1u64 << n {
                    let p = (0..n)
                        .map(|i| if e >> i & 1 == 1 { rates[i] } else { 1.0 - rates[i] })
                        .product::<f64>();
                    if p > 0.0 {
                        accumulate(&bits, &self.phase_outcomes(e), p);
                    }
                }
            }
            CodeChannel::Product(weights) => {
                let phase: Vec<Vec<(u64, f64)>> = (0..1u64 << n).map(|e| self.phase_outcomes(e)).collect();
                let arrays: Vec<[f64; 4]> = weights.iter().map(PauliWeights::as_array).collect();
                for f in 0..1u64 << n {
                    let bits = self.bit_outcomes(f);
                    for e in 0..1u64 << n {
                        let p = (0..n)
                            .map(|i| arrays[i][((f >> i & 1) | (e >> i & 1) << 1) as usize])
                            .product::<f64>();
                        if p > 0.0 {
                            accumulate(&bits, &phase[e as usize], p);
                        }
                    }
                }
            }
            CodeChannel::Explicit(entries) => {
                for (f, e, p) in entries {
                    if f.len() != n || e.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: if f.len() != n { f.len() } else { e.len() },
                        });
                    }
                    if *p < 0.0 {
                        return Err(Error::Domain(format!("negative probability {p}")));
                    }
                    accumulate(&self.bit_outcomes(f.to_mask()), &self.phase_outcomes(e.to_mask()), *p);
                }
            }
        }
        let total: f64 = joint.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("channel probabilities sum to {total}, not 1")));
        }
        let joint: Vec<f64> = joint.into_iter().map(|p| p / total).collect();
        let phase_error_min = (1.0 - (0..1usize << l).map(|x| joint[x]).sum::<f64>()).max(0.0);
        Ok(ReducedChannel {
            logical: PauliErrorDistribution::new_guarded(l, joint, usize::MAX)?,
            phase_error_min,
        })
    }
}

fn push(acc: &mut Vec<(u64, f64)>, key: u64, w: f64) {
    match acc.iter_mut().find(|(k, _)| *k == key) {
        Some(entry) => entry.1 += w,
        None => acc.push((key, w)),
    }
}

pub fn reduce_code_channel(channel: &CodeChannel, m_e: &BitMatrix, m_p: &BitMatrix) -> Result<ReducedChannel> {
    CodePair::new(m_e, m_p, DEFAULT_REDUCE_GUARD)?.reduce(channel)
}
