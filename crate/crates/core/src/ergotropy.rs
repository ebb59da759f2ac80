//! Passive states, ergotropy and work extractable under a restricted family
//! of unitaries `U[α] = exp(−i Σ_j α_j G_j)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::dynamics::{CompositeSystem, Trajectory};
use crate::error::{Error, Result};
use crate::laws::AuditSummary;
use crate::qmat::{kron_all, trace_product, CMatrix, DensityMatrix, HermitianOperator};

/// Largest parameter count accepted by [`restricted_ergotropy`].
pub const MAX_PARAMETERS: usize = 8;

/// Budget for the coarse grid; the points per axis are reduced until the
/// full grid fits.
pub const MAX_GRID_EVALUATIONS: usize = 20_000;

fn check_dims(rho: &DensityMatrix, h: &HermitianOperator) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::Dimension(format!("state dim {} vs Hamiltonian dim {}", rho.dim(), h.dim())));
    }
    Ok(())
}

/// Eigenvalues of `ρ` in descending order, ties kept in eigenvector order.
fn descending_populations(rho: &DensityMatrix) -> Vec<(usize, f64)> {
    let mut pops: Vec<(usize, f64)> = rho.eigenvalues().iter().copied().enumerate().collect();
    pops.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    pops
}

/// Largest population on the lowest level, next largest on the next level,
/// and so on, in the eigenbasis of `H`.
pub fn passive_state(rho: &DensityMatrix, h: &HermitianOperator) -> Result<DensityMatrix> {
    check_dims(rho, h)?;
    let pops = descending_populations(rho).into_iter().map(|(_, p)| p.max(0.0)).collect();
    DensityMatrix::from_spectrum(pops, h.spectrum().vectors().clone())
}

/// `Tr(ρ_passive H)` without building the passive state.
pub fn passive_energy(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    check_dims(rho, h)?;
    Ok(descending_populations(rho).iter().zip(h.eigenvalues()).map(|((_, p), e)| p * e).sum())
}

/// `Tr(ρH) − Tr(ρ_passive H)`.
pub fn ergotropy(rho: &DensityMatrix, h: &HermitianOperator) -> Result<f64> {
    Ok(h.expectation(rho)? - passive_energy(rho, h)?)
}

/// Declared control operations `U[α] = exp(−i Σ_j α_j G_j)` over a box.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlFamily {
    pub name: String,
    generators: Vec<HermitianOperator>,
    bounds: Vec<(f64, f64)>,
}

impl ControlFamily {
    pub fn new(name: impl Into<String>, generators: Vec<HermitianOperator>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Dimension("control family needs at least one generator".into()));
        }
        if generators.len() != bounds.len() {
            return Err(Error::Dimension(format!(
                "{} generators but {} bounds",
                generators.len(),
                bounds.len()
            )));
        }
        let dim = generators[0].dim();
        if generators.iter().any(|g| g.dim() != dim) {
            return Err(Error::Dimension("generators have different dimensions".into()));
        }
        if bounds.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
            return Err(Error::Domain("parameter bounds must be finite with lo <= hi".into()));
        }
        Ok(ControlFamily { name: name.into(), generators, bounds })
    }

    /// Same box `[lo, hi]` on every coordinate.
    pub fn uniform(name: impl Into<String>, generators: Vec<HermitianOperator>, lo: f64, hi: f64) -> Result<Self> {
        let bounds = vec![(lo, hi); generators.len()];
        Self::new(name, generators, bounds)
    }

    pub fn parameter_count(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn unitary(&self, alpha: &[f64]) -> Result<CMatrix> {
        if alpha.len() != self.generators.len() {
            return Err(Error::Dimension(format!(
                "{} parameters for {} generators",
                alpha.len(),
                self.generators.len()
            )));
        }
        let n = self.dim();
        let mut sum = CMatrix::zeros(n, n);
        for (a, g) in alpha.iter().zip(&self.generators) {
            sum += g.entries() * Complex64::new(*a, 0.0);
        }
        Ok(HermitianOperator::new(sum)?.propagator(1.0))
    }
}

/// Grid-then-coordinate-search settings. The coordinate search runs from
/// the `starts` best grid points, since a single start can stall on the box
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub grid_points: usize,
    pub iterations: usize,
    pub shrink: f64,
    pub starts: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { grid_points: 9, iterations: 60, shrink: 0.5, starts: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedErgotropy {
    pub value: f64,
    pub alpha: Vec<f64>,
}

fn grid_points_per_axis(requested: usize, k: usize) -> usize {
    let mut n = requested.max(1);
    while n > 2 && n.checked_pow(k as u32).is_none_or(|total| total > MAX_GRID_EVALUATIONS) {
        n -= 1;
    }
    n
}

/// Best extracted work `Tr(ρH) − Tr(U[α]ρU[α]† H)` found over the box. The
/// search is heuristic, so the value is a lower bound on the restricted
/// optimum.
pub fn restricted_ergotropy(
    rho: &DensityMatrix,
    h: &HermitianOperator,
    family: &ControlFamily,
    search: &SearchConfig,
) -> Result<RestrictedErgotropy> {
    check_dims(rho, h)?;
    if family.dim() != h.dim() {
        return Err(Error::Dimension(format!("control family dim {} vs Hamiltonian dim {}", family.dim(), h.dim())));
    }
    let k = family.parameter_count();
    if k > MAX_PARAMETERS {
        return Err(Error::Unsupported(format!(
            "{k} control parameters; at most {MAX_PARAMETERS} are searchable"
        )));
    }
    if !(search.shrink > 0.0 && search.shrink < 1.0) {
        return Err(Error::Domain(format!("shrink factor {} outside (0, 1)", search.shrink)));
    }
    let e0 = h.expectation(rho)?;
    let objective = |alpha: &[f64]| -> Result<f64> {
        let u = family.unitary(alpha)?;
        let moved = &u * rho.entries() * u.adjoint();
        Ok(e0 - trace_product(&moved, h.entries()).re)
    };

    let bounds = family.bounds();
    let points = grid_points_per_axis(search.grid_points, k);
    if points < search.grid_points {
        log::info!("restricted ergotropy: grid reduced to {points} points per axis for {k} parameters");
    }
    let axis = |j: usize, i: usize| -> f64 {
        let (lo, hi) = bounds[j];
        if points == 1 { 0.0_f64.clamp(lo, hi) } else { lo + (hi - lo) * i as f64 / (points - 1) as f64 }
    };

    // the identity is always a candidate when the box contains it
    let identity: Vec<f64> = bounds.iter().map(|&(lo, hi)| 0.0_f64.clamp(lo, hi)).collect();
    let starts = search.starts.max(1);
    let mut candidates: Vec<(f64, Vec<f64>)> = vec![(objective(&identity)?, identity)];
    let mut index = vec![0usize; k];
    let mut alpha = vec![0.0; k];
    loop {
        for j in 0..k {
            alpha[j] = axis(j, index[j]);
        }
        let v = objective(&alpha)?;
        if candidates.len() < starts || v > candidates[candidates.len() - 1].0 {
            let at = candidates.partition_point(|(c, _)| *c >= v);
            candidates.insert(at, (v, alpha.clone()));
            candidates.truncate(starts);
        }
        let mut j = 0;
        while j < k {
            index[j] += 1;
            if index[j] < points {
                break;
            }
            index[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }

    let initial_steps: Vec<f64> = bounds.iter().map(|&(lo, hi)| (hi - lo) / (points.max(2) - 1) as f64).collect();
    let (mut best, mut best_alpha) = (f64::NEG_INFINITY, Vec::new());
    for (start_value, start) in candidates {
        let (value, at) = coordinate_search(&objective, bounds, start_value, start, initial_steps.clone(), search)?;
        if value > best {
            best = value;
            best_alpha = at;
        }
    }
    Ok(RestrictedErgotropy { value: best, alpha: best_alpha })
}

/// Coordinate search from `alpha`, shrinking the steps after every sweep
/// that finds no improvement.
fn coordinate_search(
    objective: &impl Fn(&[f64]) -> Result<f64>,
    bounds: &[(f64, f64)],
    mut best: f64,
    mut best_alpha: Vec<f64>,
    mut steps: Vec<f64>,
    search: &SearchConfig,
) -> Result<(f64, Vec<f64>)> {
    for _ in 0..search.iterations {
        let mut improved = false;
        for j in 0..best_alpha.len() {
            for dir in [1.0, -1.0] {
                let (lo, hi) = bounds[j];
                let mut trial = best_alpha.clone();
                trial[j] = (trial[j] + dir * steps[j]).clamp(lo, hi);
                if trial[j] == best_alpha[j] {
                    continue;
                }
                let v = objective(&trial)?;
                if v > best {
                    best = v;
                    best_alpha = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            for s in &mut steps {
                *s *= search.shrink;
            }
        }
    }
    Ok((best, best_alpha))
}

/// `|j⟩⟨k| + |k⟩⟨j|` and `i|k⟩⟨j| − i|j⟩⟨k|` for adjacent levels of every
/// subsystem, embedded in the composite space. On qubits these are the
/// local `σ_x` and `σ_y`. Every parameter ranges over `[−π, π]`.
pub fn local_control_family(system: &CompositeSystem) -> Result<ControlFamily> {
    let dims = system.dims();
    let mut generators = Vec::new();
    for (s, &d) in dims.iter().enumerate() {
        for j in 0..d.saturating_sub(1) {
            let mut x = CMatrix::zeros(d, d);
            x[(j, j + 1)] = Complex64::new(1.0, 0.0);
            x[(j + 1, j)] = Complex64::new(1.0, 0.0);
            let mut y = CMatrix::zeros(d, d);
            y[(j, j + 1)] = Complex64::new(0.0, 1.0);
            y[(j + 1, j)] = Complex64::new(0.0, -1.0);
            for local in [x, y] {
                let factors: Vec<CMatrix> = dims
                    .iter()
                    .enumerate()
                    .map(|(r, &dr)| if r == s { local.clone() } else { CMatrix::identity(dr, dr) })
                    .collect();
                let refs: Vec<&CMatrix> = factors.iter().collect();
                generators.push(HermitianOperator::new(kron_all(&refs, system.total_dim())?)?);
            }
        }
    }
    let pi = core::f64::consts::PI;
    ControlFamily::uniform("local", generators, -pi, pi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgotropyRow {
    pub t: f64,
    pub ergotropy: f64,
    pub restricted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgotropyDecay {
    pub family: String,
    pub rows: Vec<ErgotropyRow>,
}

impl ErgotropyDecay {
    fn half_means(&self) -> (f64, f64) {
        let n = self.rows.len();
        let mean = |rows: &[ErgotropyRow]| {
            if rows.is_empty() { 0.0 } else { rows.iter().map(|r| r.restricted).sum::<f64>() / rows.len() as f64 }
        };
        (mean(&self.rows[..n / 2]), mean(&self.rows[n / 2..]))
    }

    /// Mean restricted ergotropy over the second half of the grid minus the
    /// mean over the first half; non-positive when it decays on average.
    pub fn average_increase(&self) -> f64 {
        let (first, second) = self.half_means();
        second - first
    }

    /// Informational: the residual is the average increase, floored at 0.
    pub fn summary(&self) -> AuditSummary {
        let mut s = AuditSummary::informational(format!("ergotropy_decay[{}]", self.family));
        let increase = self.average_increase().max(0.0);
        let t = self.rows.last().map_or(0.0, |r| r.t);
        s.check(true, increase, self.rows.len().saturating_sub(1), t, String::new);
        s
    }
}

/// Ergotropy of the global state with respect to the total Hamiltonian and
/// its restricted counterpart under `family`, along the trajectory.
pub fn ergotropy_decay(traj: &Trajectory, family: &ControlFamily, search: &SearchConfig) -> Result<ErgotropyDecay> {
    let h = traj.system.total_hamiltonian();
    let mut rows = Vec::with_capacity(traj.times.len());
    for (k, &t) in traj.times.iter().enumerate() {
        let state = traj.state_at(k)?;
        let restricted = restricted_ergotropy(&state, h, family, search)?.value;
        rows.push(ErgotropyRow { t, ergotropy: ergotropy(&state, h)?, restricted });
    }
    Ok(ErgotropyDecay { family: family.name.clone(), rows })
}
