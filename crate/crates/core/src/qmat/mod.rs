//! Dense complex Hermitian linear algebra: operators, states, tensor
//! products, partial traces, unitary evolution and entropy functionals.
//!
//! Everything is in units with ħ = k_B = 1 and entropies are in nats.

mod entropy;
mod linalg;

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::error::{Error, Result};

pub use entropy::{
    entropy_of_spectrum, mutual_information, relative_entropy, total_correlation,
    von_neumann_entropy, ENTROPY_NOISE_FLOOR, NEGATIVE_EIGENVALUE_ERROR, SUPPORT_TOL,
};
pub use linalg::{kron_all, partial_trace, tensor_product, Tensor};

pub type CMatrix = DMatrix<Complex64>;

/// Default cap on the dimension of any composite space.
pub const DEFAULT_DIM_CAP: usize = 256;

/// Asymmetry above which construction logs a warning before symmetrizing.
pub const HERMITIAN_WARN_TOL: f64 = 1e-8;

/// Density-matrix invariants.
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-12;

/// Relative tolerance used to detect a degenerate ground level.
pub const DEFAULT_DEGENERACY_RTOL: f64 = 1e-9;

/// Ascending eigenvalues with matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl Spectrum {
    /// Diagonalizes a Hermitian matrix. The input is assumed Hermitian.
    fn of_hermitian(m: &CMatrix) -> Self {
        let n = m.nrows();
        let eig = nalgebra::linalg::SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Spectrum { values, vectors }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Rebuilds `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let c = f(v);
            for i in 0..n {
                scaled[(i, j)] *= c;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Ground-level summary of a Hamiltonian spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    pub degeneracy_tol: f64,
}

impl SpectralData {
    pub fn from_eigenvalues(eigenvalues: &[f64], degeneracy_tol: f64) -> Self {
        let ground_energy = eigenvalues[0];
        let ground_degeneracy = eigenvalues
            .iter()
            .take_while(|&&e| e - ground_energy <= degeneracy_tol)
            .count();
        SpectralData {
            eigenvalues: eigenvalues.to_vec(),
            ground_energy,
            ground_degeneracy,
            degeneracy_tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_range(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] - self.ground_energy
    }

    /// True when every level sits inside the ground cluster.
    pub fn is_flat(&self) -> bool {
        self.ground_degeneracy == self.dim()
    }

    /// Energies measured from the ground level, with the ground cluster
    /// snapped to exactly zero.
    pub fn excitation_energies(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, &e)| if k < self.ground_degeneracy { 0.0 } else { e - self.ground_energy })
            .collect()
    }
}

fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitize(m: CMatrix) -> CMatrix {
    (&m + m.adjoint()).scale(0.5)
}

fn require_square(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Finite-dimensional Hermitian operator with a cached spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
    spectrum: Spectrum,
}

impl HermitianOperator {
    /// Symmetrizes `(M + M†)/2` and diagonalizes. Asymmetry above
    /// [`HERMITIAN_WARN_TOL`] is logged, not rejected.
    pub fn new(entries: CMatrix) -> Result<Self> {
        require_square(&entries)?;
        let asym = max_asymmetry(&entries);
        if asym > HERMITIAN_WARN_TOL {
            log::warn!("symmetrizing operator with asymmetry {asym:.3e}");
        }
        Ok(Self::from_hermitian(hermitize(entries)))
    }

    /// Like [`HermitianOperator::new`] but refuses inputs whose asymmetry
    /// exceeds `tol`.
    pub fn new_strict(entries: CMatrix, tol: f64) -> Result<Self> {
        require_square(&entries)?;
        let asymmetry = max_asymmetry(&entries);
        if asymmetry > tol {
            return Err(Error::NotHermitian { asymmetry });
        }
        Ok(Self::from_hermitian(hermitize(entries)))
    }

    fn from_hermitian(entries: CMatrix) -> Self {
        let spectrum = Spectrum::of_hermitian(&entries);
        HermitianOperator { entries, spectrum }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Dimension("empty diagonal".into()));
        }
        let n = diag.len();
        let entries = CMatrix::from_fn(n, n, |i, j| {
            if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        Ok(Self::from_hermitian(entries))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_real_diagonal(&alloc::vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_real_diagonal(&alloc::vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    pub fn ground_energy(&self) -> f64 {
        self.spectrum.values[0]
    }

    pub fn spectral_range(&self) -> f64 {
        self.spectrum.values[self.dim() - 1] - self.spectrum.values[0]
    }

    /// Largest absolute eigenvalue.
    pub fn norm(&self) -> f64 {
        self.spectrum.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Ground-level data with the default tolerance
    /// `1e-9 * max(1, spectral range)`.
    pub fn spectral_data(&self) -> SpectralData {
        let tol = DEFAULT_DEGENERACY_RTOL * self.spectral_range().max(1.0);
        self.spectral_data_with_tol(tol)
    }

    pub fn spectral_data_with_tol(&self, degeneracy_tol: f64) -> SpectralData {
        SpectralData::from_eigenvalues(&self.spectrum.values, degeneracy_tol)
    }

    /// `exp(-i H t)` from the cached decomposition.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.spectrum.map(|e| Complex64::new(0.0, -e * t).exp())
    }

    /// `Tr(ρ H)`.
    pub fn expectation(&self, state: &DensityMatrix) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "state dim {} vs operator dim {}",
                state.dim(),
                self.dim()
            )));
        }
        Ok(trace_product(&state.entries, &self.entries).re)
    }

    /// `H + c·I`.
    pub fn shifted(&self, c: f64) -> Self {
        let n = self.dim();
        let mut entries = self.entries.clone();
        for i in 0..n {
            entries[(i, i)] += Complex64::new(c, 0.0);
        }
        let spectrum = Spectrum {
            values: self.spectrum.values.iter().map(|v| v + c).collect(),
            vectors: self.spectrum.vectors.clone(),
        };
        HermitianOperator { entries, spectrum }
    }

    /// `U H U†` for a unitary `U`.
    pub fn conjugated(&self, unitary: &CMatrix) -> Result<Self> {
        Self::new(unitary * &self.entries * unitary.adjoint())
    }
}

/// Unit-trace positive-semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    spectrum: Spectrum,
}

impl DensityMatrix {
    /// Validates trace, hermiticity (by symmetrization) and positivity.
    pub fn new(entries: CMatrix) -> Result<Self> {
        require_square(&entries)?;
        let asym = max_asymmetry(&entries);
        if asym > HERMITIAN_WARN_TOL {
            log::warn!("symmetrizing state with asymmetry {asym:.3e}");
        }
        let entries = hermitize(entries);
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {:.3e}{:+.3e}i, expected 1",
                trace.re, trace.im
            )));
        }
        let spectrum = Spectrum::of_hermitian(&entries);
        if spectrum.values[0] < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:.3e}",
                spectrum.values[0]
            )));
        }
        Ok(DensityMatrix { entries, spectrum })
    }

    /// `|ψ⟩⟨ψ|` for the normalized input vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("pure state vector has zero norm".into()));
        }
        let n = amplitudes.len();
        let psi: Vec<Complex64> = amplitudes.iter().map(|a| a / norm).collect();
        Self::new(CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    /// Computational basis projector `|k⟩⟨k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Dimension(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self::pure(&amps)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("zero dimension".into()));
        }
        let p = 1.0 / dim as f64;
        Self::from_spectrum(alloc::vec![p; dim], CMatrix::identity(dim, dim))
    }

    /// State with given populations in the given orthonormal basis (columns).
    /// Populations must be a probability vector.
    pub fn from_spectrum(populations: Vec<f64>, basis: CMatrix) -> Result<Self> {
        let n = populations.len();
        if basis.nrows() != n || basis.ncols() != n {
            return Err(Error::Dimension("basis does not match populations".into()));
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL || populations.iter().any(|&p| p < -POSITIVITY_TOL) {
            return Err(Error::InvalidState("populations are not a probability vector".into()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| populations[a].total_cmp(&populations[b]).then(a.cmp(&b)));
        let spectrum = Spectrum {
            values: order.iter().map(|&k| populations[k]).collect(),
            vectors: CMatrix::from_fn(n, n, |i, j| basis[(i, order[j])]),
        };
        let entries = spectrum.map(|p| Complex64::new(p, 0.0));
        Ok(DensityMatrix { entries: hermitize(entries), spectrum })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Largest entrywise deviation from another state.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `U ρ U†`.
    pub fn conjugated(&self, unitary: &CMatrix) -> Result<Self> {
        Self::new(unitary * &self.entries * unitary.adjoint())
    }
}

/// `U ρ U†` with `U = exp(-i H t)` built from the cached spectrum of `H`.
pub fn evolve(state: &DensityMatrix, hamiltonian: &HermitianOperator, t: f64) -> Result<DensityMatrix> {
    if state.dim() != hamiltonian.dim() {
        return Err(Error::Dimension(format!(
            "state dim {} vs Hamiltonian dim {}",
            state.dim(),
            hamiltonian.dim()
        )));
    }
    if !t.is_finite() {
        return Err(Error::Domain(format!("evolution time {t} is not finite")));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    state.conjugated(&hamiltonian.propagator(t))
}
