use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use super::{partial_trace, DensityMatrix};
use crate::error::{Error, Result};

/// Eigenvalues within this distance of 0 or 1 contribute no entropy. This
/// absorbs eigensolver noise on rank-deficient states so that pure states
/// have exactly zero entropy.
pub const ENTROPY_NOISE_FLOOR: f64 = 1e-13;

/// Eigenvalues below `-NEGATIVE_EIGENVALUE_ERROR` are not a state.
pub const NEGATIVE_EIGENVALUE_ERROR: f64 = 1e-9;

/// Rank tolerance for the support test of the relative entropy.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `-Σ p ln p` with `0 ln 0 = 0`.
pub fn entropy_of_spectrum(populations: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &p in populations {
        if p < -NEGATIVE_EIGENVALUE_ERROR {
            return Err(Error::InvalidState(format!("negative eigenvalue {p:.3e}")));
        }
        if p > ENTROPY_NOISE_FLOOR && p < 1.0 - ENTROPY_NOISE_FLOOR {
            s -= p * p.ln();
        }
    }
    Ok(s.max(0.0))
}

pub fn von_neumann_entropy(state: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(state.eigenvalues())
}

/// `Tr ρ (ln ρ − ln σ)`, or `f64::INFINITY` when the support of `rho` is not
/// contained in the support of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "relative entropy of dim {} against dim {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let neg_entropy = -von_neumann_entropy(rho)?;
    let vectors = sigma.spectrum().vectors();
    let r = rho.entries();
    let n = rho.dim();
    let mut cross = 0.0;
    let mut outside = 0.0;
    for (k, &s) in sigma.eigenvalues().iter().enumerate() {
        let v = vectors.column(k);
        // ⟨v|ρ|v⟩
        let mut w = 0.0;
        for i in 0..n {
            let mut row = num_complex::Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += r[(i, j)] * v[j];
            }
            w += (v[i].conj() * row).re;
        }
        if s <= SUPPORT_TOL {
            outside += w;
        } else {
            cross += w * s.ln();
        }
    }
    if outside > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    Ok(neg_entropy - cross)
}

/// `S_A + S_B − S_AB` where `part_a` lists the subsystems of A and B is the
/// complement.
pub fn mutual_information(state: &DensityMatrix, dims: &[usize], part_a: &[usize]) -> Result<f64> {
    let mut a: Vec<usize> = part_a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Dimension("bipartition names an unknown subsystem".into()));
    }
    let b: Vec<usize> = (0..dims.len()).filter(|k| !a.contains(k)).collect();
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("bipartition must have two non-empty parts".into()));
    }
    let s_a = von_neumann_entropy(&partial_trace(state, dims, &a)?)?;
    let s_b = von_neumann_entropy(&partial_trace(state, dims, &b)?)?;
    let s_ab = von_neumann_entropy(state)?;
    Ok(s_a + s_b - s_ab)
}

/// `Σ_i S_i − S_total` over all single subsystems.
pub fn total_correlation(state: &DensityMatrix, dims: &[usize]) -> Result<f64> {
    let mut sum = 0.0;
    for k in 0..dims.len() {
        sum += von_neumann_entropy(&partial_trace(state, dims, &[k])?)?;
    }
    Ok(sum - von_neumann_entropy(state)?)
}
