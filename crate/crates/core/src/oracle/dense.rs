//! Direct density-matrix evaluation of Eve's figures for `l ≤ 2`.
//!
//! Eve's state is built entry by entry from the purification
//! `ρ_E(y)[(x,z),(x',z')] = √P(x,z) √P(x',z') ⟨y| (X^{x'} Z^{z'})† X^x Z^z |y⟩`
//! using explicit Pauli matrices, without the block simplification used by the
//! main oracle. Matrix functions go through symmetric eigendecompositions.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{EveFigures, PauliErrorDistribution};
use crate::error::{Error, Result};

pub const DENSE_GUARD: usize = 2;

/// Eigenvalues below this are treated as zero when taking logarithms and roots.
const EIGEN_FLOOR: f64 = 1e-13;

fn pauli_x(l: usize, x: usize) -> DMatrix<f64> {
    let n = 1 << l;
    DMatrix::from_fn(n, n, |r, c| if r == c ^ x { 1.0 } else { 0.0 })
}

fn pauli_z(l: usize, z: usize) -> DMatrix<f64> {
    let n = 1 << l;
    DMatrix::from_fn(n, n, |r, c| {
        if r != c {
            0.0
        } else if (r & z).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    })
}

/// `ρ_E(y)` as a `4^l × 4^l` matrix indexed by `x | z << l`.
pub fn eve_state(p: &PauliErrorDistribution, y: usize) -> Result<DMatrix<f64>> {
    let l = p.l();
    if l > DENSE_GUARD {
        return Err(Error::Capacity {
            what: "dense Eve state logical length",
            size: l as u64,
            limit: DENSE_GUARD as u64,
        });
    }
    let side = 1usize << l;
    let dim = side * side;
    let ket = DMatrix::from_fn(side, 1, |r, _| if r == y { 1.0 } else { 0.0 });
    let ops: Vec<DMatrix<f64>> = (0..dim)
        .map(|idx| pauli_x(l, idx % side) * pauli_z(l, idx / side))
        .collect();
    let images: Vec<DMatrix<f64>> = ops.iter().map(|w| w * &ket).collect();
    let amp: Vec<f64> = p.probs().iter().map(|q| q.sqrt()).collect();
    Ok(DMatrix::from_fn(dim, dim, |a, b| {
        let overlap = (images[b].transpose() * &images[a])[(0, 0)];
        amp[a] * amp[b] * overlap
    }))
}

fn eigen(m: &DMatrix<f64>) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new((m + m.transpose()) * 0.5)
}

fn matrix_function(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let e = eigen(m);
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// `D(ρ‖σ) = Tr ρ (log₂ ρ − log₂ σ)`, assuming `supp ρ ⊆ supp σ`.
pub fn relative_entropy(rho: &DMatrix<f64>, sigma: &DMatrix<f64>) -> f64 {
    let trace_rho_log = |m: &DMatrix<f64>| {
        let e = eigen(m);
        let mut acc = 0.0;
        for (k, &lam) in e.eigenvalues.iter().enumerate() {
            if lam > EIGEN_FLOOR {
                let v = e.eigenvectors.column(k);
                acc += (v.transpose() * rho * v)[(0, 0)] * lam.log2();
            }
        }
        acc
    };
    trace_rho_log(rho) - trace_rho_log(sigma)
}

/// `Tr √(√σ ρ √σ)`.
pub fn fidelity(rho: &DMatrix<f64>, sigma: &DMatrix<f64>) -> f64 {
    let root = matrix_function(sigma, |v| v.max(0.0).sqrt());
    let inner = &root * rho * &root;
    eigen(&inner).eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum()
}

pub fn trace_norm(m: &DMatrix<f64>) -> f64 {
    eigen(m).eigenvalues.iter().map(|v| v.abs()).sum()
}

/// Success probability of the square-root measurement for uniform priors.
pub fn square_root_measurement_success(states: &[DMatrix<f64>]) -> f64 {
    let k = states.len() as f64;
    let total = states.iter().fold(DMatrix::zeros(states[0].nrows(), states[0].ncols()), |acc, s| acc + s);
    let inv_root = matrix_function(&(total / k), |v| if v > EIGEN_FLOOR { 1.0 / v.sqrt() } else { 0.0 });
    states
        .iter()
        .map(|s| {
            let pi = &inv_root * s * &inv_root / k;
            (s * pi).trace() / k
        })
        .sum()
}

/// Helstrom success probability `½(1 + ½‖ρ₀ − ρ₁‖₁)` for two equiprobable states.
pub fn helstrom_success(rho0: &DMatrix<f64>, rho1: &DMatrix<f64>) -> f64 {
    0.5 * (1.0 + 0.5 * trace_norm(&(rho0 - rho1)))
}

/// Dense counterpart of [`super::eve_figures`]; the success field holds the
/// square-root-measurement value.
pub fn dense_figures(p: &PauliErrorDistribution) -> Result<EveFigures> {
    let side = 1usize << p.l();
    let states: Vec<DMatrix<f64>> = (0..side).map(|y| eve_state(p, y)).collect::<Result<_>>()?;
    let avg = states.iter().fold(DMatrix::zeros(side * side, side * side), |a, s| a + s) / side as f64;
    let mut figures = EveFigures {
        mutual_info_bits: states.iter().map(|s| relative_entropy(s, &avg)).sum::<f64>() / side as f64,
        min_pair_fidelity: 1.0,
        max_pair_trace_norm: 0.0,
        min_avg_fidelity: 1.0,
        max_avg_trace_norm: 0.0,
        opt_success_prob: square_root_measurement_success(&states),
        phase_error_prob: super::phase_error_probability(p),
    };
    for y in 0..side {
        figures.min_avg_fidelity = figures.min_avg_fidelity.min(fidelity(&states[y], &avg));
        figures.max_avg_trace_norm = figures.max_avg_trace_norm.max(trace_norm(&(&states[y] - &avg)));
        for y2 in y + 1..side {
            figures.min_pair_fidelity = figures.min_pair_fidelity.min(fidelity(&states[y], &states[y2]));
            figures.max_pair_trace_norm = figures
                .max_pair_trace_norm
                .max(trace_norm(&(&states[y] - &states[y2])));
        }
    }
    Ok(figures)
}
