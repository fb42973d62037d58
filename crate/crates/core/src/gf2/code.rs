use crate::error::{Error, Result};
use crate::gf2::matrix::reduce_rows;
use crate::gf2::{BitMatrix, BitVector};

/// Default cap on the number of codewords an exhaustive decoder may scan.
pub const DEFAULT_DECODE_GUARD: u64 = 1 << 20;

/// A binary linear code `C ⊆ F₂ⁿ`, kept as a reduced echelon basis.
///
/// The basis is canonical: two codes are equal iff their bases are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearCode {
    length: usize,
    basis: Vec<BitVector>,
}

impl LinearCode {
    /// The span of `generators`, which need not be independent.
    pub fn from_generators(length: usize, generators: &[BitVector]) -> Result<Self> {
        for g in generators {
            if g.len() != length {
                return Err(Error::DimensionMismatch {
                    expected: length,
                    found: g.len(),
                });
            }
        }
        let ech = reduce_rows(generators.to_vec(), length);
        Ok(Self {
            length,
            basis: ech.rows,
        })
    }

    /// The column space `Im M`.
    pub fn column_space(m: &BitMatrix) -> Self {
        let cols: Vec<BitVector> = (0..m.cols()).map(|j| m.column(j)).collect();
        Self::from_generators(m.rows(), &cols).expect("columns have the row count as length")
    }

    /// The row space of `M`.
    pub fn row_space(m: &BitMatrix) -> Self {
        Self::from_generators(m.cols(), m.row_vectors()).expect("rows have the column count as length")
    }

    pub fn zero(length: usize) -> Self {
        Self {
            length,
            basis: Vec::new(),
        }
    }

    pub fn full(length: usize) -> Self {
        let units: Vec<_> = (0..length).map(|i| BitVector::unit(length, i)).collect();
        Self::from_generators(length, &units).expect("unit vectors have the right length")
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    /// `|C| = 2^dim`, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        1u64.checked_shl(self.basis.len() as u32).unwrap_or(u64::MAX)
    }

    /// `C^⊥ = {v : v·c = 0 for all c ∈ C}`.
    pub fn dual(&self) -> Self {
        let gen = BitMatrix::from_rows(self.length, self.basis.clone()).expect("basis vectors share the code length");
        Self::from_generators(self.length, &gen.dual_code_basis()).expect("kernel vectors share the code length")
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.length {
            return Err(Error::DimensionMismatch {
                expected: self.length,
                found: v.len(),
            });
        }
        // The basis is in reduced echelon form, so reduction by leading bits decides membership.
        let mut r = v.clone();
        for b in &self.basis {
            let lead = b.ones_positions()[0];
            if r.get(lead) {
                r ^= b;
            }
        }
        Ok(r.is_zero())
    }

    pub fn is_subcode_of(&self, other: &Self) -> Result<bool> {
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Codeword with coordinates `coeffs` in the basis.
    pub fn encode(&self, coeffs: &BitVector) -> Result<BitVector> {
        if coeffs.len() != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.basis.len(),
                found: coeffs.len(),
            });
        }
        let mut out = BitVector::zeros(self.length);
        for i in coeffs.ones_positions() {
            out ^= &self.basis[i];
        }
        Ok(out)
    }

    /// All codewords, in Gray-code order over the basis coefficients.
    pub fn codewords(&self, guard: u64) -> Result<Vec<BitVector>> {
        let size = self.size();
        if self.basis.len() >= 64 || size > guard {
            return Err(Error::Capacity {
                what: "codeword enumeration",
                size,
                limit: guard,
            });
        }
        let mut out = Vec::with_capacity(size as usize);
        let mut current = BitVector::zeros(self.length);
        out.push(current.clone());
        for i in 1..size {
            current ^= &self.basis[i.trailing_zeros() as usize];
            out.push(current.clone());
        }
        Ok(out)
    }

    /// Minimum-distance decoding by exhaustive scan.
    pub fn decode(&self, received: &BitVector, guard: u64) -> Result<BitVector> {
        let words = self.codewords(guard)?;
        min_distance_decode(received, &words)
    }
}

/// The codeword closest to `received` in Hamming distance.
///
/// Ties go to the lexicographically smallest codeword (bit 0 first, `0 < 1`),
/// so the result does not depend on the order of `codewords`.
pub fn min_distance_decode(received: &BitVector, codewords: &[BitVector]) -> Result<BitVector> {
    let mut best: Option<(usize, &BitVector)> = None;
    for c in codewords {
        let d = received.distance(c)?;
        let better = match best {
            None => true,
            Some((bd, bc)) => d < bd || (d == bd && c < bc),
        };
        if better {
            best = Some((d, c));
        }
    }
    best.map(|(_, c)| c.clone())
        .ok_or_else(|| Error::InvalidInput("cannot decode in an empty code".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn decode_examples() {
        let rep3 = LinearCode::from_generators(3, &[bv("111")]).unwrap();
        assert_eq!(rep3.decode(&bv("111"), DEFAULT_DECODE_GUARD).unwrap(), bv("111"));
        assert_eq!(rep3.decode(&bv("110"), DEFAULT_DECODE_GUARD).unwrap(), bv("111"));
        let rep2 = LinearCode::from_generators(2, &[bv("11")]).unwrap();
        assert_eq!(rep2.decode(&bv("10"), DEFAULT_DECODE_GUARD).unwrap(), bv("00"));
        assert_eq!(rep2.decode(&bv("01"), DEFAULT_DECODE_GUARD).unwrap(), bv("00"));
    }

    #[test]
    fn decode_guard_is_explicit() {
        let full = LinearCode::full(21);
        assert!(matches!(
            full.decode(&BitVector::zeros(21), DEFAULT_DECODE_GUARD),
            Err(Error::Capacity { .. })
        ));
        assert!(full.decode(&BitVector::zeros(21), 1 << 21).is_ok());
    }

    #[test]
    fn repetition_code_is_self_dual() {
        let rep2 = LinearCode::from_generators(2, &[bv("11")]).unwrap();
        assert_eq!(rep2.dual(), rep2);
        assert_eq!(LinearCode::zero(2).dual(), LinearCode::full(2));
    }

    #[test]
    fn codewords_are_distinct_and_closed() {
        let c = LinearCode::from_generators(5, &[bv("11000"), bv("01100"), bv("10100")]).unwrap();
        assert_eq!(c.dimension(), 2);
        let words = c.codewords(16).unwrap();
        let mut sorted = words.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
        for a in &words {
            for b in &words {
                assert!(c.contains(&(a ^ b)).unwrap());
            }
        }
    }

    #[test]
    fn empty_code_is_rejected() {
        assert!(min_distance_decode(&bv("1"), &[]).is_err());
    }
}
