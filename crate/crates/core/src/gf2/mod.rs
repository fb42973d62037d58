//! Bit-packed linear algebra over GF(2).
//!
//! Vectors are indexed from 0. Lexicographic order compares bit 0 first, which
//! fixes the tie-break of every minimum-distance decoder in the crate.

mod code;
mod matrix;
pub mod table;
mod vector;

pub use code::{min_distance_decode, LinearCode, DEFAULT_DECODE_GUARD};
pub use matrix::{BitMatrix, Echelon};
pub use vector::BitVector;
