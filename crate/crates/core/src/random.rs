//! Seeded random operators and states for scenario generation and property
//! suites.

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;
use rand::Rng;

use crate::error::Result;
use crate::qmat::{CMatrix, DensityMatrix, HermitianOperator};

fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let phi = 2.0 * core::f64::consts::PI * u2;
    (r * phi.cos(), r * phi.sin())
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        let (re, im) = gaussian_pair(rng);
        Complex64::new(re, im)
    })
}

/// GUE-like Hermitian matrix, rescaled so that its largest absolute
/// eigenvalue equals `norm`.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> Result<HermitianOperator> {
    let g = ginibre(rng, dim);
    let h = HermitianOperator::new((&g + g.adjoint()).scale(0.5))?;
    let current = h.norm();
    if current == 0.0 {
        return Ok(h);
    }
    HermitianOperator::new(h.entries().scale(norm / current))
}

/// Hermitian matrix with ground energy 0 and spectral range `range`.
pub fn local_hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize, range: f64) -> Result<HermitianOperator> {
    let h = hermitian(rng, dim, 1.0)?;
    let spread = h.spectral_range();
    let shifted = h.shifted(-h.ground_energy());
    if spread == 0.0 {
        return Ok(shifted);
    }
    HermitianOperator::new(shifted.entries().scale(range / spread))
}

/// Unitary obtained from the QR factorization of a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = ginibre(rng, dim).qr();
    let (q, r) = qr.unpack();
    // fix the phases so the distribution does not depend on the QR convention
    let mut q = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Full-rank mixed state `G G† / Tr(G G†)`.
pub fn density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
    let g = ginibre(rng, dim);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr))
}

/// Haar-like pure state.
pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
    let amps: alloc::vec::Vec<Complex64> = (0..dim)
        .map(|_| {
            let (re, im) = gaussian_pair(rng);
            Complex64::new(re, im)
        })
        .collect();
    DensityMatrix::pure(&amps)
}
