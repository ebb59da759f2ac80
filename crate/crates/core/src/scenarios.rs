//! Declarative scenarios: named presets, seeded random generators and a
//! runner that propagates a scenario and executes its audits.
//!
//! Numeric parameters of the presets (frequencies, couplings, time grids)
//! are defaults chosen for the demonstrations, not measured values.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{propagate, uniform_times, CompositeSystem, Coupling, CouplingTerm, LocalOperator, Subsystem, Trajectory};
use crate::ergotropy::{ergotropy_decay, local_control_family, ErgotropyDecay, SearchConfig};
use crate::error::{Error, Result};
use crate::laws::{
    conservation_audit, entropy_production_identity, multipartite_production, thermodynamic_identity_check,
    zero_temperature_audit, AuditSummary, MultipartiteReport, SecondLawReport, ThermodynamicIdentitySeries, Tolerances,
};
use crate::qmat::{CMatrix, DensityMatrix, HermitianOperator, DEFAULT_DIM_CAP};
use crate::random;
use crate::thermo::gibbs_state;

pub const PRESET_NAMES: [&str; 5] = ["ex1_ground_ground", "ex2_pure_pure", "three_body_chain", "random", "random_ground"];

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    /// `diag(0, ω)`.
    Qubit { omega: f64 },
    /// `ω · diag(0, 1, …, levels − 1)`.
    Oscillator { levels: usize, omega: f64 },
    /// Diagonal with the given energies.
    Levels(Vec<f64>),
    Matrix(CMatrix),
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<HermitianOperator> {
        match self {
            HamiltonianSpec::Qubit { omega } => finite(*omega, "omega").and_then(|w| HermitianOperator::from_real_diagonal(&[0.0, w])),
            HamiltonianSpec::Oscillator { levels, omega } => {
                let w = finite(*omega, "omega")?;
                if *levels < 1 {
                    return Err(Error::Dimension("oscillator needs at least one level".into()));
                }
                let diag: Vec<f64> = (0..*levels).map(|n| w * n as f64).collect();
                HermitianOperator::from_real_diagonal(&diag)
            }
            HamiltonianSpec::Levels(levels) => {
                if levels.iter().any(|e| !e.is_finite()) {
                    return Err(Error::Domain("energy levels must be finite".into()));
                }
                HermitianOperator::from_real_diagonal(levels)
            }
            HamiltonianSpec::Matrix(m) => {
                if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::Domain("Hamiltonian entries must be finite".into()));
                }
                HermitianOperator::new(m.clone())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            HamiltonianSpec::Qubit { .. } => 2,
            HamiltonianSpec::Oscillator { levels, .. } => *levels,
            HamiltonianSpec::Levels(l) => l.len(),
            HamiltonianSpec::Matrix(m) => m.nrows(),
        }
    }
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() { Ok(x) } else { Err(Error::Domain(format!("{what} must be finite, got {x}"))) }
}

/// Initial state of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalState {
    /// Gibbs state; `β = ∞` is the uniform mixture over the ground level.
    Gibbs { beta: f64 },
    /// Lowest eigenvector of the local Hamiltonian.
    Ground,
    /// `k`-th eigenvector of the local Hamiltonian, counted from the bottom.
    Level(usize),
    /// Amplitudes in the computational basis, normalized on construction.
    Pure(Vec<Complex64>),
    Matrix(CMatrix),
}

impl LocalState {
    pub fn build(&self, h: &HermitianOperator) -> Result<DensityMatrix> {
        let n = h.dim();
        let state = match self {
            LocalState::Gibbs { beta } => gibbs_state(h, *beta)?.state,
            LocalState::Ground => eigenstate(h, 0)?,
            LocalState::Level(k) => eigenstate(h, *k)?,
            LocalState::Pure(a) => DensityMatrix::pure(a)?,
            LocalState::Matrix(m) => DensityMatrix::new(m.clone())?,
        };
        if state.dim() != n {
            return Err(Error::Dimension(format!("initial state of dim {} for a {n}-level Hamiltonian", state.dim())));
        }
        Ok(state)
    }
}

fn eigenstate(h: &HermitianOperator, k: usize) -> Result<DensityMatrix> {
    if k >= h.dim() {
        return Err(Error::Dimension(format!("level {k} of a {}-level Hamiltonian", h.dim())));
    }
    let v: Vec<Complex64> = h.spectrum().vectors().column(k).iter().copied().collect();
    DensityMatrix::pure(&v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemSpec {
    pub label: String,
    pub hamiltonian: HamiltonianSpec,
    pub initial: LocalState,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    /// `strength × ⊗ factors` on the named subsystems, plus h.c. if asked.
    Product {
        strength: f64,
        factors: Vec<(String, LocalOperator)>,
        hermitian_conjugate: bool,
    },
    /// Full-space Hermitian matrix.
    Matrix(CMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_end: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AuditSpec {
    EntropyProduction { subsystem: String },
    ZeroTemperature { subsystem: String },
    Multipartite,
    ThermodynamicIdentity { subsystem: String },
    Conservation,
    ErgotropyDecay { search: SearchConfig },
}

impl AuditSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            AuditSpec::EntropyProduction { .. } => "entropy_production",
            AuditSpec::ZeroTemperature { .. } => "zero_temperature",
            AuditSpec::Multipartite => "multipartite",
            AuditSpec::ThermodynamicIdentity { .. } => "thermodynamic_identity",
            AuditSpec::Conservation => "conservation",
            AuditSpec::ErgotropyDecay { .. } => "ergotropy_decay",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub subsystems: Vec<SubsystemSpec>,
    pub couplings: Vec<CouplingSpec>,
    pub times: TimeGrid,
    pub audits: Vec<AuditSpec>,
    pub dim_cap: usize,
}

impl Scenario {
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownName(format!("subsystem `{label}`")))
    }

    pub fn build_system(&self) -> Result<CompositeSystem> {
        let subsystems = self
            .subsystems
            .iter()
            .map(|s| Ok(Subsystem::new(s.label.clone(), s.hamiltonian.build()?)))
            .collect::<Result<Vec<_>>>()?;
        let dims: Vec<usize> = subsystems.iter().map(Subsystem::dim).collect();
        let total = dims.iter().fold(1usize, |a, &d| a.saturating_mul(d));
        if total > self.dim_cap {
            return Err(Error::DimensionCap { required: total, cap: self.dim_cap });
        }
        let mut ops = Vec::with_capacity(self.couplings.len());
        for c in &self.couplings {
            ops.push(match c {
                CouplingSpec::Product { strength, factors, hermitian_conjugate } => {
                    let factors = factors
                        .iter()
                        .map(|(label, op)| Ok((self.index_of(label)?, op.clone())))
                        .collect::<Result<Vec<_>>>()?;
                    let coupling = Coupling {
                        terms: vec![CouplingTerm { strength: finite(*strength, "coupling strength")?, factors }],
                        hermitian_conjugate: *hermitian_conjugate,
                    };
                    coupling.operator(&dims, self.dim_cap)?
                }
                CouplingSpec::Matrix(m) => HermitianOperator::new(m.clone())?,
            });
        }
        CompositeSystem::with_cap(subsystems, ops, self.dim_cap)
    }

    /// System and product initial state.
    pub fn build(&self) -> Result<(CompositeSystem, DensityMatrix)> {
        let system = self.build_system()?;
        let locals = self
            .subsystems
            .iter()
            .zip(system.subsystems())
            .map(|(spec, sub)| spec.initial.build(&sub.hamiltonian))
            .collect::<Result<Vec<_>>>()?;
        let state = system.product_state(&locals)?;
        Ok((system, state))
    }

    pub fn time_grid(&self) -> Result<Vec<f64>> {
        uniform_times(self.times.t_end, self.times.points)
    }

    pub fn propagate(&self) -> Result<Trajectory> {
        let (system, state) = self.build()?;
        propagate(&system, &state, &self.time_grid()?)
    }

    /// Propagates and runs every declared audit.
    pub fn run(&self, tol: &Tolerances) -> Result<ScenarioRun> {
        let trajectory = self.propagate()?;
        let audits = self.audits.iter().map(|a| run_audit(&trajectory, a, tol)).collect::<Result<Vec<_>>>()?;
        Ok(ScenarioRun { trajectory, audits })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AuditDetail {
    SecondLaw(SecondLawReport),
    Multipartite(MultipartiteReport),
    ThermodynamicIdentity(ThermodynamicIdentitySeries),
    Conservation,
    ErgotropyDecay(ErgotropyDecay),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOutcome {
    pub summary: AuditSummary,
    pub detail: AuditDetail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub trajectory: Trajectory,
    pub audits: Vec<AuditOutcome>,
}

impl ScenarioRun {
    pub fn passed(&self) -> bool {
        self.audits.iter().all(|a| a.summary.passed())
    }
}

pub fn run_audit(traj: &Trajectory, audit: &AuditSpec, tol: &Tolerances) -> Result<AuditOutcome> {
    let index = |label: &str| traj.system.index_of(label);
    Ok(match audit {
        AuditSpec::EntropyProduction { subsystem } => {
            let r = entropy_production_identity(traj, index(subsystem)?, tol)?;
            AuditOutcome { summary: r.summary.clone(), detail: AuditDetail::SecondLaw(r) }
        }
        AuditSpec::ZeroTemperature { subsystem } => {
            let r = zero_temperature_audit(traj, index(subsystem)?, tol)?;
            AuditOutcome { summary: r.summary.clone(), detail: AuditDetail::SecondLaw(r) }
        }
        AuditSpec::Multipartite => {
            let r = multipartite_production(traj, tol)?;
            AuditOutcome { summary: r.summary.clone(), detail: AuditDetail::Multipartite(r) }
        }
        AuditSpec::ThermodynamicIdentity { subsystem } => {
            let r = thermodynamic_identity_check(traj, index(subsystem)?)?;
            AuditOutcome { summary: r.summary(), detail: AuditDetail::ThermodynamicIdentity(r) }
        }
        AuditSpec::Conservation => {
            AuditOutcome { summary: conservation_audit(traj, tol), detail: AuditDetail::Conservation }
        }
        AuditSpec::ErgotropyDecay { search } => {
            let family = local_control_family(&traj.system)?;
            let r = ergotropy_decay(traj, &family, search)?;
            AuditOutcome { summary: r.summary(), detail: AuditDetail::ErgotropyDecay(r) }
        }
    })
}

fn xx(a: &str, b: &str, g: f64) -> CouplingSpec {
    CouplingSpec::Product {
        strength: g,
        factors: vec![(a.into(), LocalOperator::SigmaX), (b.into(), LocalOperator::SigmaX)],
        hermitian_conjugate: false,
    }
}

fn qubit(label: &str, initial: LocalState) -> SubsystemSpec {
    SubsystemSpec { label: label.into(), hamiltonian: HamiltonianSpec::Qubit { omega: 1.0 }, initial }
}

/// Two resonant qubits starting in their ground states.
pub fn ex1_ground_ground() -> Scenario {
    Scenario {
        name: "ex1_ground_ground".into(),
        subsystems: vec![qubit("A", LocalState::Ground), qubit("B", LocalState::Ground)],
        couplings: vec![xx("A", "B", 0.2)],
        times: TimeGrid { t_end: 20.0, points: 201 },
        audits: vec![
            AuditSpec::ZeroTemperature { subsystem: "A".into() },
            AuditSpec::ZeroTemperature { subsystem: "B".into() },
            AuditSpec::Multipartite,
            AuditSpec::Conservation,
        ],
        dim_cap: DEFAULT_DIM_CAP,
    }
}

/// Excited qubit exchanging quanta with a qutrit in `(|0⟩ + |2⟩)/√2`.
pub fn ex2_pure_pure() -> Scenario {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    Scenario {
        name: "ex2_pure_pure".into(),
        subsystems: vec![
            qubit("A", LocalState::Level(1)),
            SubsystemSpec {
                label: "B".into(),
                hamiltonian: HamiltonianSpec::Oscillator { levels: 3, omega: 1.0 },
                initial: LocalState::Pure(vec![Complex64::new(h, 0.0), zero, Complex64::new(h, 0.0)]),
            },
        ],
        couplings: vec![CouplingSpec::Product {
            strength: 0.15,
            factors: vec![("A".into(), LocalOperator::SigmaPlus), ("B".into(), LocalOperator::Lower)],
            hermitian_conjugate: true,
        }],
        times: TimeGrid { t_end: 40.0, points: 201 },
        audits: vec![
            AuditSpec::ZeroTemperature { subsystem: "A".into() },
            AuditSpec::ZeroTemperature { subsystem: "B".into() },
            AuditSpec::Conservation,
        ],
        dim_cap: DEFAULT_DIM_CAP,
    }
}

/// Three qubits at `β = (0.5, 1, 2)` in an `σ_x σ_x` chain.
pub fn three_body_chain() -> Scenario {
    Scenario {
        name: "three_body_chain".into(),
        subsystems: vec![
            qubit("A", LocalState::Gibbs { beta: 0.5 }),
            qubit("B", LocalState::Gibbs { beta: 1.0 }),
            qubit("C", LocalState::Gibbs { beta: 2.0 }),
        ],
        couplings: vec![xx("A", "B", 0.2), xx("B", "C", 0.2)],
        times: TimeGrid { t_end: 20.0, points: 81 },
        audits: vec![
            AuditSpec::Multipartite,
            AuditSpec::Conservation,
            AuditSpec::ErgotropyDecay { search: SearchConfig { grid_points: 3, iterations: 30, shrink: 0.5, starts: 2 } },
        ],
        dim_cap: DEFAULT_DIM_CAP,
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| if i < 26 { ((b'A' + i as u8) as char).to_string() } else { format!("S{i}") }).collect()
}

fn matrix_spec(h: &HermitianOperator) -> HamiltonianSpec {
    HamiltonianSpec::Matrix(h.entries().clone())
}

fn random_coupling(rng: &mut ChaCha8Rng, total: usize) -> Result<CouplingSpec> {
    let norm = rng.random_range(0.0..=0.5);
    Ok(CouplingSpec::Matrix(random::hermitian(rng, total, norm)?.entries().clone()))
}

/// Gibbs states at seeded `β_i ∈ [0.2, 5]`, random local Hamiltonians with
/// unit spectral range and a random full-space coupling of norm ≤ 0.5, over
/// 50 time points. Identical seeds give identical scenarios.
pub fn random_scenario(seed: u64, dims: &[usize]) -> Result<Scenario> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::Dimension("random scenarios need at least two nonempty subsystems".into()));
    }
    let total = dims.iter().fold(1usize, |a, &d| a.saturating_mul(d));
    if total > DEFAULT_DIM_CAP {
        return Err(Error::DimensionCap { required: total, cap: DEFAULT_DIM_CAP });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = labels(dims.len());
    let mut subsystems = Vec::new();
    for (label, &d) in names.iter().zip(dims) {
        let h = random::local_hamiltonian(&mut rng, d, 1.0)?;
        let beta = rng.random_range(0.2..=5.0);
        subsystems.push(SubsystemSpec { label: label.clone(), hamiltonian: matrix_spec(&h), initial: LocalState::Gibbs { beta } });
    }
    let couplings = vec![random_coupling(&mut rng, total)?];
    let mut audits: Vec<AuditSpec> = if dims.len() == 2 {
        names.iter().map(|l| AuditSpec::EntropyProduction { subsystem: l.clone() }).collect()
    } else {
        vec![AuditSpec::Multipartite]
    };
    audits.push(AuditSpec::Conservation);
    Ok(Scenario {
        name: format!("random_{seed}"),
        subsystems,
        couplings,
        times: TimeGrid { t_end: 10.0, points: 50 },
        audits,
        dim_cap: DEFAULT_DIM_CAP,
    })
}

/// Two subsystems with B at zero temperature: either a nondegenerate ground
/// state, or (odd seeds, `dims[1] ≥ 3`) a random pure state inside a
/// two-fold degenerate ground level. A starts in a Gibbs state.
pub fn random_ground_scenario(seed: u64, dims: &[usize]) -> Result<Scenario> {
    if dims.len() != 2 {
        return Err(Error::Dimension("zero-temperature scenarios have exactly two subsystems".into()));
    }
    let mut s = random_scenario(seed, dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e_ed0f_9a55);
    let db = dims[1];
    let degenerate = seed % 2 == 1 && db >= 3;
    let b = &mut s.subsystems[1];
    if degenerate {
        let mut levels = vec![0.0, 0.0];
        for _ in 2..db {
            levels.push(rng.random_range(0.2..=1.0));
        }
        let u = random::unitary(&mut rng, 2);
        let mut amps = vec![Complex64::new(0.0, 0.0); db];
        amps[0] = u[(0, 0)];
        amps[1] = u[(1, 0)];
        b.hamiltonian = HamiltonianSpec::Levels(levels);
        b.initial = LocalState::Pure(amps);
    } else {
        b.initial = LocalState::Ground;
    }
    s.name = format!("random_ground_{seed}");
    s.audits = vec![AuditSpec::ZeroTemperature { subsystem: "B".into() }, AuditSpec::Conservation];
    Ok(s)
}

/// Subsystem dimensions in `2..=4` drawn from the seed.
pub fn random_dims(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..n).map(|_| rng.random_range(2..=4)).collect()
}

/// Named preset. `random` and `random_ground` draw two subsystems of
/// dimension 2–4 from `seed`; the fixed presets ignore it.
pub fn preset(name: &str, seed: u64) -> Result<Scenario> {
    match name {
        "ex1_ground_ground" => Ok(ex1_ground_ground()),
        "ex2_pure_pure" => Ok(ex2_pure_pure()),
        "three_body_chain" => Ok(three_body_chain()),
        "random" => random_scenario(seed, &random_dims(seed, 2)),
        "random_ground" => {
            let mut dims = random_dims(seed, 2);
            if seed % 2 == 1 {
                dims[1] = dims[1].max(3);
            }
            random_ground_scenario(seed, &dims)
        }
        other => Err(Error::UnknownName(format!("preset `{other}`; known presets: {}", PRESET_NAMES.join(", ")))),
    }
}
