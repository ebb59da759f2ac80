//! Composite systems, unitary trajectories and per-time thermodynamic
//! snapshots.
//!
//! Every snapshot is obtained by propagating the initial state directly to
//! its time with `exp(-iHt)`; there is no time stepping, so refining the grid
//! never changes a snapshot.

mod operators;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{
    evolve, kron_all, partial_trace, tensor_product, von_neumann_entropy, CMatrix, DensityMatrix,
    HermitianOperator, DEFAULT_DIM_CAP,
};
use crate::thermo::{TemperatureCase, ThermalCurve};

pub use operators::LocalOperator;

/// Tolerance for the product-state test on initial states.
pub const PRODUCT_TOL: f64 = 1e-10;

/// Relative asymmetry tolerated in an assembled coupling.
pub const COUPLING_HERMITIAN_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Subsystem {
    pub label: String,
    pub hamiltonian: HermitianOperator,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, hamiltonian: HermitianOperator) -> Self {
        Subsystem { label: label.into(), hamiltonian }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }
}

/// `strength × ⊗ factors`, identity on unlisted subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTerm {
    pub strength: f64,
    pub factors: Vec<(usize, LocalOperator)>,
}

/// Sum of coupling terms, optionally completed by its Hermitian conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub terms: Vec<CouplingTerm>,
    pub hermitian_conjugate: bool,
}

impl Coupling {
    pub fn single(strength: f64, factors: Vec<(usize, LocalOperator)>) -> Self {
        Coupling { terms: alloc::vec![CouplingTerm { strength, factors }], hermitian_conjugate: false }
    }

    /// Assembles the full-space operator. Fails when the result is not
    /// Hermitian, e.g. a lone `σ₊ ⊗ b` without its conjugate.
    pub fn operator(&self, dims: &[usize], cap: usize) -> Result<HermitianOperator> {
        let total: usize = dims.iter().product();
        if total > cap {
            return Err(Error::DimensionCap { required: total, cap });
        }
        let mut sum = CMatrix::zeros(total, total);
        for term in &self.terms {
            let mut locals: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::identity(d, d)).collect();
            for (idx, op) in &term.factors {
                let d = *dims.get(*idx).ok_or_else(|| {
                    Error::Dimension(format!("coupling names subsystem {idx}, only {} exist", dims.len()))
                })?;
                locals[*idx] = &locals[*idx] * op.matrix(d)?;
            }
            let refs: Vec<&CMatrix> = locals.iter().collect();
            sum += kron_all(&refs, cap)?.scale(term.strength);
        }
        if self.hermitian_conjugate {
            sum = &sum + sum.adjoint();
        }
        let scale = sum.iter().fold(0.0_f64, |m, z| m.max(z.norm())).max(1.0);
        HermitianOperator::new_strict(sum, COUPLING_HERMITIAN_RTOL * scale)
    }
}

/// Ordered subsystems plus full-space coupling operators.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSystem {
    subsystems: Vec<Subsystem>,
    couplings: Vec<HermitianOperator>,
    dims: Vec<usize>,
    interaction: CMatrix,
    total: HermitianOperator,
}

impl CompositeSystem {
    pub fn new(subsystems: Vec<Subsystem>, couplings: Vec<HermitianOperator>) -> Result<Self> {
        Self::with_cap(subsystems, couplings, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(subsystems: Vec<Subsystem>, couplings: Vec<HermitianOperator>, cap: usize) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::Dimension("a composite system needs at least one subsystem".into()));
        }
        for (k, s) in subsystems.iter().enumerate() {
            if subsystems[..k].iter().any(|o| o.label == s.label) {
                return Err(Error::Dimension(format!("duplicate subsystem label `{}`", s.label)));
            }
        }
        let dims: Vec<usize> = subsystems.iter().map(Subsystem::dim).collect();
        let required = dims.iter().fold(1usize, |acc, &d| acc.saturating_mul(d));
        if required > cap {
            return Err(Error::DimensionCap { required, cap });
        }
        let mut interaction = CMatrix::zeros(required, required);
        for v in &couplings {
            if v.dim() != required {
                return Err(Error::Dimension(format!(
                    "coupling of dim {} on a {required}-dimensional space",
                    v.dim()
                )));
            }
            interaction += v.entries();
        }
        let mut total = interaction.clone();
        for i in 0..subsystems.len() {
            total += embed(&subsystems, &dims, i, cap)?;
        }
        let total = HermitianOperator::new(total)?;
        Ok(CompositeSystem { subsystems, couplings, dims, interaction, total })
    }

    /// Builds each coupling from local factors first.
    pub fn from_couplings(subsystems: Vec<Subsystem>, couplings: &[Coupling]) -> Result<Self> {
        let dims: Vec<usize> = subsystems.iter().map(Subsystem::dim).collect();
        let ops = couplings
            .iter()
            .map(|c| c.operator(&dims, DEFAULT_DIM_CAP))
            .collect::<Result<Vec<_>>>()?;
        Self::new(subsystems, ops)
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn couplings(&self) -> &[HermitianOperator] {
        &self.couplings
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.total.dim()
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownName(String::from(label)))
    }

    pub fn total_hamiltonian(&self) -> &HermitianOperator {
        &self.total
    }

    /// Sum of all couplings on the full space.
    pub fn interaction(&self) -> &CMatrix {
        &self.interaction
    }

    /// `‖H_total‖`, floored at 1.
    pub fn energy_scale(&self) -> f64 {
        self.total.norm().max(1.0)
    }

    /// Tensor product of per-subsystem states in declared order.
    pub fn product_state(&self, locals: &[DensityMatrix]) -> Result<DensityMatrix> {
        if locals.len() != self.len() {
            return Err(Error::Dimension(format!(
                "{} local states for {} subsystems",
                locals.len(),
                self.len()
            )));
        }
        for (s, l) in self.subsystems.iter().zip(locals) {
            if s.dim() != l.dim() {
                return Err(Error::Dimension(format!(
                    "state of `{}` has dim {}, subsystem has dim {}",
                    s.label,
                    l.dim(),
                    s.dim()
                )));
            }
        }
        let refs: Vec<&DensityMatrix> = locals.iter().collect();
        tensor_product(&refs, usize::MAX)
    }

    /// True when `state` equals the product of its single-subsystem marginals.
    pub fn is_product(&self, state: &DensityMatrix) -> Result<bool> {
        let locals = (0..self.len())
            .map(|i| partial_trace(state, &self.dims, &[i]))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.product_state(&locals)?.max_abs_diff(state) <= PRODUCT_TOL)
    }
}

fn embed(subsystems: &[Subsystem], dims: &[usize], i: usize, cap: usize) -> Result<CMatrix> {
    let ids: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::identity(d, d)).collect();
    let refs: Vec<&CMatrix> =
        (0..dims.len()).map(|k| if k == i { subsystems[i].hamiltonian.entries() } else { &ids[k] }).collect();
    kron_all(&refs, cap)
}

/// `Σ_i I⊗…⊗H_i⊗…⊗I + Σ_k V_k`.
pub fn build_total_hamiltonian(system: &CompositeSystem) -> Result<HermitianOperator> {
    Ok(system.total_hamiltonian().clone())
}

/// `Σ_k Tr{V_k ρ}`.
pub fn interaction_energy(state: &DensityMatrix, system: &CompositeSystem) -> Result<f64> {
    if state.dim() != system.total_dim() {
        return Err(Error::Dimension(format!(
            "state dim {} vs system dim {}",
            state.dim(),
            system.total_dim()
        )));
    }
    Ok(crate::qmat::trace_product(state.entries(), system.interaction()).re)
}

/// Per-subsystem entries of a snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemRecord {
    /// `E_i = Tr{H_i ρ_i}`.
    pub energy: f64,
    /// `S_i`, nats.
    pub entropy: f64,
    pub beta: f64,
    pub temperature: f64,
    pub zeta: f64,
    pub case: TemperatureCase,
    /// `E_i^th = Tr{H_i w_i[β_i]}`.
    pub thermal_energy: f64,
    /// `S[w_i[β_i]] = S_i + ζ_i`.
    pub thermal_entropy: f64,
    /// Heat extracted from the subsystem, `−ΔE_i^th`.
    pub heat: f64,
    /// Work extracted from the subsystem, `−Δ(E_i − E_i^th)`.
    pub work: f64,
    /// `D(w_i[β_i(t)] ‖ w_i[β_i(0)])`, nats, possibly `+∞`.
    pub divergence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermoSnapshot {
    pub t: f64,
    pub subsystems: Vec<SubsystemRecord>,
    pub interaction_energy: f64,
    pub total_entropy: f64,
    /// `Σ_i S_i − S_total`: the mutual information for two subsystems, the
    /// total correlation otherwise.
    pub correlation: f64,
    /// `correlation + Σ_i D_i`, nats.
    pub sigma: f64,
    /// `|Σ_i [β_i(0) ΔE_i^th − Δζ_i] − sigma|`; NaN when some `β_i(0)` or
    /// `D_i` is infinite.
    pub identity_residual: f64,
}

impl ThermoSnapshot {
    pub fn total_energy(&self) -> f64 {
        self.subsystems.iter().map(|r| r.energy).sum::<f64>() + self.interaction_energy
    }
}

/// Unitary trajectory of a composite system from a product initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub system: CompositeSystem,
    pub initial_state: DensityMatrix,
    pub initial_is_product: bool,
    pub times: Vec<f64>,
    pub snapshots: Vec<ThermoSnapshot>,
}

impl Trajectory {
    /// Re-propagates the global state at `times[k]`.
    pub fn state_at(&self, k: usize) -> Result<DensityMatrix> {
        let t = *self
            .times
            .get(k)
            .ok_or_else(|| Error::Dimension(format!("snapshot index {k} out of range")))?;
        evolve(&self.initial_state, self.system.total_hamiltonian(), t)
    }

    pub fn initial(&self) -> &ThermoSnapshot {
        &self.snapshots[0]
    }
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::Domain("time grid must start at t = 0".into()));
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `n` equally spaced times on `[0, t_end]`.
pub fn uniform_times(t_end: f64, n: usize) -> Result<Vec<f64>> {
    if n < 1 || !t_end.is_finite() || t_end < 0.0 || (n > 1 && t_end == 0.0) {
        return Err(Error::Domain(format!("cannot build {n} times on [0, {t_end}]")));
    }
    if n == 1 {
        return Ok(alloc::vec![0.0]);
    }
    Ok((0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect())
}

/// Evaluates one snapshot; `reference` is the `t = 0` snapshot, or `None`
/// when computing that snapshot itself.
pub fn snapshot(
    system: &CompositeSystem,
    curves: &[ThermalCurve],
    state: &DensityMatrix,
    t: f64,
    reference: Option<&ThermoSnapshot>,
) -> Result<ThermoSnapshot> {
    let mut records = Vec::with_capacity(system.len());
    for (i, sub) in system.subsystems().iter().enumerate() {
        let local = partial_trace(state, system.dims(), &[i])?;
        let energy = sub.hamiltonian.expectation(&local)?;
        let entropy = von_neumann_entropy(&local)?;
        let eff = curves[i].solve(entropy)?;
        let thermal_energy = curves[i].energy(eff.beta)?;
        let thermal_entropy = curves[i].entropy(eff.beta)?;
        let (heat, work, divergence) = match reference {
            None => (0.0, 0.0, curves[i].relative_entropy(eff.beta, eff.beta)?),
            Some(r) => {
                let r = &r.subsystems[i];
                // written as 0 − x so that no change gives +0, not −0
                let heat = 0.0 - (thermal_energy - r.thermal_energy);
                let work = 0.0 - ((energy - thermal_energy) - (r.energy - r.thermal_energy));
                (heat, work, curves[i].relative_entropy(eff.beta, r.beta)?)
            }
        };
        records.push(SubsystemRecord {
            energy,
            entropy,
            beta: eff.beta,
            temperature: eff.temperature,
            zeta: eff.zeta,
            case: eff.case,
            thermal_energy,
            thermal_entropy,
            heat,
            work,
            divergence,
        });
    }
    let interaction_energy = interaction_energy(state, system)?;
    let total_entropy = von_neumann_entropy(state)?;
    let correlation = records.iter().map(|r| r.entropy).sum::<f64>() - total_entropy;
    let sigma = correlation + records.iter().map(|r| r.divergence).sum::<f64>();

    let reference_records = reference.map(|r| &r.subsystems[..]).unwrap_or(&records[..]);
    let mut clausius = 0.0;
    for (r, r0) in records.iter().zip(reference_records) {
        let heat_term = if r.thermal_energy == r0.thermal_energy { 0.0 } else { r0.beta * (r.thermal_energy - r0.thermal_energy) };
        clausius += heat_term - (r.zeta - r0.zeta);
    }
    let identity_residual = if sigma.is_finite() && clausius.is_finite() {
        (clausius - sigma).abs()
    } else {
        f64::NAN
    };

    Ok(ThermoSnapshot {
        t,
        subsystems: records,
        interaction_energy,
        total_entropy,
        correlation,
        sigma,
        identity_residual,
    })
}

/// Propagates `initial_state` to every time and records snapshots.
pub fn propagate(system: &CompositeSystem, initial_state: &DensityMatrix, times: &[f64]) -> Result<Trajectory> {
    validate_times(times)?;
    if initial_state.dim() != system.total_dim() {
        return Err(Error::Dimension(format!(
            "initial state dim {} vs system dim {}",
            initial_state.dim(),
            system.total_dim()
        )));
    }
    let curves: Vec<ThermalCurve> = system.subsystems().iter().map(|s| ThermalCurve::new(&s.hamiltonian)).collect();
    let initial_is_product = system.is_product(initial_state)?;
    let first = snapshot(system, &curves, initial_state, 0.0, None)?;
    let mut snapshots = Vec::with_capacity(times.len());
    snapshots.push(first);
    for &t in &times[1..] {
        let state = evolve(initial_state, system.total_hamiltonian(), t)?;
        let snap = snapshot(system, &curves, &state, t, Some(&snapshots[0]))?;
        snapshots.push(snap);
    }
    Ok(Trajectory {
        system: system.clone(),
        initial_state: initial_state.clone(),
        initial_is_product,
        times: times.to_vec(),
        snapshots,
    })
}

/// Amplitudes helper for explicit pure states.
pub fn real_amplitudes(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}
