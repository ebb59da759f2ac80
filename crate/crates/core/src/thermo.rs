//! Gibbs states, thermal entropy and energy curves, and the
//! effective-temperature solver with the ground-degeneracy deficit `ζ`.
//!
//! Inverse temperatures are extended reals: `f64::INFINITY` is the
//! zero-temperature point. Boltzmann factors are always evaluated relative to
//! the ground level, `exp(-β (E - E_g))`, so large `β` never overflows.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::error::{Error, Result};
use crate::qmat::{DensityMatrix, HermitianOperator, SpectralData};

/// Entropy tolerance of the bisection.
pub const ENTROPY_MATCH_TOL: f64 = 1e-12;
pub const MAX_BISECTIONS: usize = 200;
/// `β_cap = BETA_CAP_SCALE / spectral range`; beyond it the solver answers `+∞`.
pub const BETA_CAP_SCALE: f64 = 1e9;
/// Slack on `S_target ≤ ln dim`.
pub const TARGET_SLACK: f64 = 1e-9;

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::Domain(format!("inverse temperature must be nonnegative, got {beta}")));
    }
    Ok(())
}

/// Boltzmann weights of one `β`, relative to the ground level.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalWeights {
    pub beta: f64,
    /// Populations in ascending-energy order.
    pub populations: Vec<f64>,
    /// `ln Σ_k exp(-β (E_k - E_g))`.
    pub log_partition_shifted: f64,
    /// `Σ_k p_k (E_k - E_g)`.
    pub mean_excitation: f64,
}

impl ThermalWeights {
    /// `β ⟨E - E_g⟩ + ln Z̃`, the form that stays accurate as `β → ∞`.
    pub fn entropy(&self) -> f64 {
        if self.beta.is_infinite() {
            return self.log_partition_shifted;
        }
        self.beta * self.mean_excitation + self.log_partition_shifted
    }
}

/// Thermal quantities of one Hamiltonian as functions of `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalCurve {
    spectral: SpectralData,
    excitations: Vec<f64>,
}

impl ThermalCurve {
    pub fn new(hamiltonian: &HermitianOperator) -> Self {
        Self::from_spectral(hamiltonian.spectral_data())
    }

    pub fn from_spectral(spectral: SpectralData) -> Self {
        let excitations = spectral.excitation_energies();
        ThermalCurve { spectral, excitations }
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    pub fn weights(&self, beta: f64) -> Result<ThermalWeights> {
        check_beta(beta)?;
        let dg = self.spectral.ground_degeneracy;
        let n = self.excitations.len();
        if beta.is_infinite() {
            let mut populations = alloc::vec![0.0; n];
            for p in populations.iter_mut().take(dg) {
                *p = 1.0 / dg as f64;
            }
            return Ok(ThermalWeights {
                beta,
                populations,
                log_partition_shifted: (dg as f64).ln(),
                mean_excitation: 0.0,
            });
        }
        let factors: Vec<f64> = self
            .excitations
            .iter()
            .map(|&e| if e == 0.0 { 1.0 } else { (-beta * e).exp() })
            .collect();
        let tail: f64 = factors[dg..].iter().sum();
        let z = dg as f64 + tail;
        let log_partition_shifted = (dg as f64).ln() + (tail / dg as f64).ln_1p();
        let populations: Vec<f64> = factors.iter().map(|f| f / z).collect();
        let mean_excitation = populations.iter().zip(&self.excitations).map(|(p, e)| p * e).sum();
        Ok(ThermalWeights { beta, populations, log_partition_shifted, mean_excitation })
    }

    pub fn entropy(&self, beta: f64) -> Result<f64> {
        Ok(self.weights(beta)?.entropy())
    }

    pub fn energy(&self, beta: f64) -> Result<f64> {
        Ok(self.spectral.ground_energy + self.weights(beta)?.mean_excitation)
    }

    /// `D(w[β_t] ‖ w[β_0])` in nats, from the closed Gibbs form
    /// `β_0 ⟨E - E_g⟩_t − S_t + ln Z̃_0`.
    pub fn relative_entropy(&self, beta_t: f64, beta_0: f64) -> Result<f64> {
        let wt = self.weights(beta_t)?;
        let w0 = self.weights(beta_0)?;
        if beta_t == beta_0 {
            return Ok(0.0);
        }
        if beta_0.is_infinite() {
            if wt.mean_excitation > 0.0 {
                return Ok(f64::INFINITY);
            }
            return Ok(w0.log_partition_shifted - wt.entropy());
        }
        Ok(beta_0 * wt.mean_excitation - wt.entropy() + w0.log_partition_shifted)
    }

    /// `T_0 · D(w[β_t] ‖ w[1/T_0])`, finite for every `T_0 ≥ 0`. At `T_0 = 0`
    /// it is the limit `E^th(t) − E_g`.
    pub fn scaled_relative_entropy(&self, beta_t: f64, temperature_0: f64) -> Result<f64> {
        if temperature_0.is_nan() || temperature_0 < 0.0 || temperature_0.is_infinite() {
            return Err(Error::Domain(format!(
                "reference temperature must be finite and nonnegative, got {temperature_0}"
            )));
        }
        let wt = self.weights(beta_t)?;
        if temperature_0 == 0.0 {
            return Ok(wt.mean_excitation);
        }
        let w0 = self.weights(1.0 / temperature_0)?;
        Ok(wt.mean_excitation + temperature_0 * (w0.log_partition_shifted - wt.entropy()))
    }

    /// Solves for the effective temperature matching `s_target`.
    pub fn solve(&self, s_target: f64) -> Result<EffectiveTemperature> {
        let n = self.excitations.len();
        let ln_dim = (n as f64).ln();
        if !s_target.is_finite() || s_target < -TARGET_SLACK || s_target > ln_dim + TARGET_SLACK {
            return Err(Error::Domain(format!(
                "target entropy {s_target} outside [0, ln {n}] = [0, {ln_dim}]"
            )));
        }
        let s = s_target.clamp(0.0, ln_dim);

        if self.spectral.is_flat() {
            return Ok(EffectiveTemperature {
                beta: 0.0,
                temperature: f64::INFINITY,
                zeta: ln_dim - s,
                case: TemperatureCase::FlatHamiltonian,
            });
        }

        let ln_dg = (self.spectral.ground_degeneracy as f64).ln();
        if s < ln_dg {
            return Ok(EffectiveTemperature::zero(ln_dg - s, TemperatureCase::GroundDegenerate));
        }
        if s == ln_dg {
            return Ok(EffectiveTemperature::zero(0.0, TemperatureCase::EntropyMatched));
        }
        if s >= ln_dim {
            return Ok(EffectiveTemperature::matched(0.0));
        }

        let cap = BETA_CAP_SCALE / self.spectral.spectral_range();
        let mut lo = 0.0;
        let mut hi = 1.0_f64.min(cap);
        while self.entropy(hi)? > s {
            if hi >= cap {
                return Ok(EffectiveTemperature::zero(0.0, TemperatureCase::EntropyMatched));
            }
            lo = hi;
            hi = (2.0 * hi).min(cap);
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            let sm = self.entropy(mid)?;
            if sm == s {
                return Ok(EffectiveTemperature::matched(mid));
            }
            if sm > s {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
        }
        Ok(EffectiveTemperature::matched(0.5 * (lo + hi)))
    }
}

/// Which branch of the entropy-matching prescription produced a temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemperatureCase {
    /// `S_target ≥ ln d_g`: a unique `β` reproduces the entropy.
    EntropyMatched,
    /// `S_target < ln d_g`: `T = 0` with a positive deficit `ζ`.
    GroundDegenerate,
    /// Every `β` gives the same state; reported as `β = 0`.
    FlatHamiltonian,
}

impl TemperatureCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            TemperatureCase::EntropyMatched => "entropy_matched",
            TemperatureCase::GroundDegenerate => "ground_degenerate",
            TemperatureCase::FlatHamiltonian => "flat_hamiltonian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveTemperature {
    pub beta: f64,
    /// `1/β`; zero at `β = ∞` and infinite at `β = 0`.
    pub temperature: f64,
    /// `S[w[β]] − S_target ≥ 0`, in nats.
    pub zeta: f64,
    pub case: TemperatureCase,
}

impl EffectiveTemperature {
    fn matched(beta: f64) -> Self {
        EffectiveTemperature { beta, temperature: 1.0 / beta, zeta: 0.0, case: TemperatureCase::EntropyMatched }
    }

    fn zero(zeta: f64, case: TemperatureCase) -> Self {
        EffectiveTemperature { beta: f64::INFINITY, temperature: 0.0, zeta, case }
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }
}

/// Thermal state `exp(-βH)/Z` together with its thermodynamic data.
#[derive(Debug, Clone)]
pub struct GibbsState<'h> {
    pub hamiltonian: &'h HermitianOperator,
    pub beta: f64,
    pub state: DensityMatrix,
    /// `ln Z`. At `β = ∞` this is `ln d_g` when `E_g = 0` and `∓∞` otherwise.
    pub log_partition: f64,
    pub thermal_energy: f64,
    pub thermal_entropy: f64,
}

pub fn gibbs_state(hamiltonian: &HermitianOperator, beta: f64) -> Result<GibbsState<'_>> {
    let curve = ThermalCurve::new(hamiltonian);
    let w = curve.weights(beta)?;
    let eg = curve.spectral.ground_energy;
    let log_partition = if beta.is_infinite() {
        if eg == 0.0 { w.log_partition_shifted } else { -eg.signum() * f64::INFINITY }
    } else {
        -beta * eg + w.log_partition_shifted
    };
    let state = DensityMatrix::from_spectrum(w.populations.clone(), hamiltonian.spectrum().vectors().clone())?;
    Ok(GibbsState {
        hamiltonian,
        beta,
        state,
        log_partition,
        thermal_energy: eg + w.mean_excitation,
        thermal_entropy: w.entropy(),
    })
}

pub fn thermal_entropy_curve(hamiltonian: &HermitianOperator, beta: f64) -> Result<f64> {
    ThermalCurve::new(hamiltonian).entropy(beta)
}

pub fn thermal_energy(hamiltonian: &HermitianOperator, beta: f64) -> Result<f64> {
    ThermalCurve::new(hamiltonian).energy(beta)
}

pub fn solve_effective_temperature(hamiltonian: &HermitianOperator, s_target: f64) -> Result<EffectiveTemperature> {
    ThermalCurve::new(hamiltonian).solve(s_target)
}
