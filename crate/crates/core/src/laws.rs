//! Second-law identities and inequalities audited along trajectories.
//!
//! Heat and work follow one sign convention everywhere: `Q_B = −ΔE_B^th` is
//! heat extracted from B and `W_B = −Δ(E_B − E_B^th)` is work extracted from
//! B, so `ΔE_B = −Q_B − W_B` holds identically.
//!
//! The entropy-production identity is checked by evaluating its two sides
//! through different code: the left side from the snapshot bookkeeping
//! (entropies, thermal energies, `ζ`), the right side from the re-propagated
//! global state (mutual information) and from the generic matrix relative
//! entropy of the two Gibbs states.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)] // needed without std
use num_traits::Float;

use crate::dynamics::{CompositeSystem, Trajectory};
use crate::error::{Error, Result};
use crate::qmat::{evolve, mutual_information, partial_trace, relative_entropy, total_correlation, von_neumann_entropy, DensityMatrix};
use crate::thermo::{gibbs_state, ThermalCurve};

/// Audit tolerances. Identity residuals are scaled by the system energy
/// scale; inequality slack is absolute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub identity: f64,
    pub inequality: f64,
    /// Slack on `σ ≥ 0`, `I ≥ 0`, `D ≥ 0`.
    pub nonnegativity: f64,
    /// Energy drift, relative to the energy scale.
    pub energy_conservation: f64,
    pub entropy_conservation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-8,
            inequality: 1e-10,
            nonnegativity: 1e-9,
            energy_conservation: 1e-10,
            entropy_conservation: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub row: usize,
    pub t: f64,
    pub detail: String,
}

/// Pass/fail summary shared by all audits.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditSummary {
    pub name: String,
    pub checks: usize,
    pub violations: usize,
    pub max_residual: f64,
    pub first_violation: Option<Violation>,
    /// Informational audits never fail.
    pub informational: bool,
}

impl AuditSummary {
    pub(crate) fn new(name: impl Into<String>) -> Self {
        AuditSummary {
            name: name.into(),
            checks: 0,
            violations: 0,
            max_residual: 0.0,
            first_violation: None,
            informational: false,
        }
    }

    pub(crate) fn informational(name: impl Into<String>) -> Self {
        AuditSummary { informational: true, ..Self::new(name) }
    }

    /// Records one check. `residual` enters `max_residual`; `ok` decides
    /// pass/fail.
    pub(crate) fn check(&mut self, ok: bool, residual: f64, row: usize, t: f64, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if residual.is_finite() {
            self.max_residual = self.max_residual.max(residual);
        }
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(Violation { row, t, detail: detail() });
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.informational || self.violations == 0
    }
}

fn check_pair(traj: &Trajectory, b: usize) -> Result<usize> {
    if traj.system.len() != 2 {
        return Err(Error::Unsupported(format!(
            "the bipartite identity needs exactly two subsystems, got {}",
            traj.system.len()
        )));
    }
    if b > 1 {
        return Err(Error::Dimension(format!("subsystem index {b} out of range")));
    }
    Ok(1 - b)
}

fn require_product(traj: &Trajectory) -> Result<()> {
    if !traj.initial_is_product {
        return Err(Error::Unsupported(
            "initial state is correlated; the audited second law assumes uncorrelated subsystems at t = 0".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub t: f64,
    /// `T_B(0)ΔS_A + ΔE_B^th − T_B(0)Δζ_B`.
    pub lhs: f64,
    /// `T_B(0) I_AB`.
    pub rhs_mutual: f64,
    /// `T_B(0) D(w_B[β_B(t)] ‖ w_B[β_B(0)])`.
    pub rhs_drive: f64,
    pub residual: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTemperatureRow {
    pub t: f64,
    /// `Q_B(t)`, must be `≤ 0`.
    pub heat: f64,
    pub work: f64,
    /// `ΔE_A + ΔE_int`, a lower bound on `W_B`.
    pub work_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SecondLawRows {
    Identity(Vec<IdentityRow>),
    ZeroTemperature(Vec<ZeroTemperatureRow>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondLawReport {
    pub subsystem: String,
    /// `T_B(0)`.
    pub temperature_0: f64,
    pub rows: SecondLawRows,
    pub summary: AuditSummary,
}

/// Entropy-production identity for subsystem `b` of a bipartite trajectory
/// with finite, positive `T_B(0)`.
pub fn entropy_production_identity(traj: &Trajectory, b: usize, tol: &Tolerances) -> Result<SecondLawReport> {
    let a = check_pair(traj, b)?;
    require_product(traj)?;
    let first = traj.initial();
    let beta_0 = first.subsystems[b].beta;
    let label = traj.system.subsystems()[b].label.clone();
    if beta_0.is_infinite() {
        return Err(Error::WrongAudit(format!(
            "T_{label}(0) = 0: use the zero-temperature audit instead"
        )));
    }
    if beta_0 == 0.0 {
        return Err(Error::Domain(format!("T_{label}(0) is infinite")));
    }
    let t0 = 1.0 / beta_0;
    let h_b = &traj.system.subsystems()[b].hamiltonian;
    let reference = gibbs_state(h_b, beta_0)?.state;
    let scale = traj.system.energy_scale();
    let dims = traj.system.dims();

    let mut summary = AuditSummary::new(format!("entropy_production_identity[{label}]"));
    let mut rows = Vec::with_capacity(traj.snapshots.len());
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let rec_a = &snap.subsystems[a];
        let rec_b = &snap.subsystems[b];
        let lhs = t0 * (rec_a.entropy - first.subsystems[a].entropy)
            + (rec_b.thermal_energy - first.subsystems[b].thermal_energy)
            - t0 * (rec_b.zeta - first.subsystems[b].zeta);

        let state = traj.state_at(k)?;
        let mutual = mutual_information(&state, dims, &[a])?;
        let drive = relative_entropy(&gibbs_state(h_b, rec_b.beta)?.state, &reference)?;
        let rhs_mutual = t0 * mutual;
        let rhs_drive = t0 * drive;
        let residual = (lhs - rhs_mutual - rhs_drive).abs();
        let sigma = rhs_mutual + rhs_drive;

        summary.check(residual <= tol.identity * scale, residual, k, snap.t, || {
            format!("identity residual {residual:.3e} exceeds {:.1e}", tol.identity * scale)
        });
        summary.check(mutual >= -tol.nonnegativity, 0.0, k, snap.t, || format!("I_AB = {mutual:.3e} < 0"));
        summary.check(drive >= -tol.nonnegativity, 0.0, k, snap.t, || format!("D = {drive:.3e} < 0"));
        summary.check(sigma >= -tol.nonnegativity, 0.0, k, snap.t, || format!("sigma = {sigma:.3e} < 0"));
        rows.push(IdentityRow { t: snap.t, lhs, rhs_mutual, rhs_drive, residual, sigma });
    }
    Ok(SecondLawReport { subsystem: label, temperature_0: t0, rows: SecondLawRows::Identity(rows), summary })
}

/// `Q_B(t) ≤ 0` and `W_B(t) ≥ ΔE_A(t) + ΔE_int(t)` for a subsystem starting
/// at zero effective temperature. A is everything except B.
pub fn zero_temperature_audit(traj: &Trajectory, b: usize, tol: &Tolerances) -> Result<SecondLawReport> {
    if b >= traj.system.len() {
        return Err(Error::Dimension(format!("subsystem index {b} out of range")));
    }
    require_product(traj)?;
    let first = traj.initial();
    let label = traj.system.subsystems()[b].label.clone();
    if !first.subsystems[b].beta.is_infinite() {
        return Err(Error::WrongAudit(format!(
            "T_{label}(0) = {} > 0: use the entropy-production identity instead",
            first.subsystems[b].temperature
        )));
    }
    let mut summary = AuditSummary::new(format!("zero_temperature_audit[{label}]"));
    let mut rows = Vec::with_capacity(traj.snapshots.len());
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let heat = snap.subsystems[b].heat;
        let work = snap.subsystems[b].work;
        let rest: f64 = snap
            .subsystems
            .iter()
            .zip(&first.subsystems)
            .enumerate()
            .filter(|(i, _)| *i != b)
            .map(|(_, (r, r0))| r.energy - r0.energy)
            .sum();
        let work_bound = rest + (snap.interaction_energy - first.interaction_energy);
        summary.check(heat <= tol.inequality, heat.max(0.0), k, snap.t, || format!("Q_{label} = {heat:.3e} > 0"));
        let slack = work - work_bound;
        summary.check(slack >= -tol.inequality, (-slack).max(0.0), k, snap.t, || {
            format!("W_{label} = {work:.6e} below bound {work_bound:.6e}")
        });
        rows.push(ZeroTemperatureRow { t: snap.t, heat, work, work_bound });
    }
    Ok(SecondLawReport { subsystem: label, temperature_0: 0.0, rows: SecondLawRows::ZeroTemperature(rows), summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub temperature: f64,
    /// `T·D(w_B[β_B(t)] ‖ w_B[1/T])`.
    pub scaled_divergence: f64,
    /// `E_B^th(t) − E_g`.
    pub limit: f64,
    pub deviation: f64,
    /// `E_B^th(t) − E_B^th(0)`.
    pub thermal_energy_change: f64,
    /// `|T·D − ΔE_B^th| = T |ΔS[w_B]|`; vanishes exactly without coupling.
    pub increment_deviation: f64,
    /// `T·Δζ_B(t)`.
    pub scaled_zeta_change: f64,
    /// `|T·Δζ_B| ≤ T ln d_g`.
    pub zeta_bounded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitTable {
    pub subsystem: String,
    pub time: f64,
    pub rows: Vec<LimitRow>,
    pub monotone: bool,
    /// Last deviation over first (0 when the first is 0).
    pub final_ratio: f64,
}

impl LimitTable {
    /// Monotone decrease with the final deviation at most `ratio` times the
    /// first, and every `ζ` row bounded.
    pub fn converges(&self, ratio: f64) -> bool {
        self.monotone && self.final_ratio <= ratio && self.rows.iter().all(|r| r.zeta_bounded)
    }
}

/// Convergence of `T·D` to `E_B^th(t) − E_g` as the initial temperature of B
/// goes to zero. B starts in its Gibbs state at each temperature; the other
/// subsystems start in `locals`.
pub fn zero_temperature_limit_check(
    system: &CompositeSystem,
    locals: &[DensityMatrix],
    b: usize,
    temperatures: &[f64],
    t: f64,
) -> Result<LimitTable> {
    if b >= system.len() {
        return Err(Error::Dimension(format!("subsystem index {b} out of range")));
    }
    if temperatures.is_empty()
        || temperatures.iter().any(|&x| x <= 0.0 || !x.is_finite())
        || temperatures.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::Domain("temperatures must be positive, finite and strictly decreasing".into()));
    }
    let h_b = &system.subsystems()[b].hamiltonian;
    let curve = ThermalCurve::new(h_b);
    let ln_dg = (curve.spectral().ground_degeneracy as f64).ln();
    let mut locals = locals.to_vec();
    let mut rows = Vec::with_capacity(temperatures.len());
    for &temp in temperatures {
        locals[b] = gibbs_state(h_b, 1.0 / temp)?.state;
        let initial = system.product_state(&locals)?;
        let eff_0 = curve.solve(von_neumann_entropy(&locals[b])?)?;
        let thermal_energy_0 = curve.energy(eff_0.beta)?;
        let state = evolve(&initial, system.total_hamiltonian(), t)?;
        let reduced = partial_trace(&state, system.dims(), &[b])?;
        let eff = curve.solve(von_neumann_entropy(&reduced)?)?;
        let scaled_divergence = curve.scaled_relative_entropy(eff.beta, temp)?;
        let limit = curve.energy(eff.beta)? - curve.spectral().ground_energy;
        let scaled_zeta_change = temp * (eff.zeta - eff_0.zeta);
        let thermal_energy_change = curve.energy(eff.beta)? - thermal_energy_0;
        rows.push(LimitRow {
            temperature: temp,
            scaled_divergence,
            limit,
            deviation: (scaled_divergence - limit).abs(),
            thermal_energy_change,
            increment_deviation: (scaled_divergence - thermal_energy_change).abs(),
            scaled_zeta_change,
            zeta_bounded: scaled_zeta_change.abs() <= temp * ln_dg + 1e-15,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation);
    let first = rows[0].deviation;
    let last = rows[rows.len() - 1].deviation;
    let final_ratio = if first == 0.0 { 0.0 } else { last / first };
    Ok(LimitTable {
        subsystem: system.subsystems()[b].label.clone(),
        time: t,
        rows,
        monotone,
        final_ratio,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteRow {
    pub t: f64,
    /// `C(t) = Σ_i S_i − S_total`, from the propagated state.
    pub total_correlation: f64,
    /// `Σ_i ΔS_i`, from the snapshot bookkeeping.
    pub entropy_change: f64,
    /// `Σ_i [β_i(0) ΔE_i^th − Δζ_i]`, when every `T_i(0) > 0`.
    pub clausius: Option<f64>,
    /// `C(t) + Σ_i D_i(t)`, when every `T_i(0) > 0`.
    pub clausius_rhs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteReport {
    pub rows: Vec<MultipartiteRow>,
    pub summary: AuditSummary,
}

/// Entropy production as correlation build-up between N subsystems.
pub fn multipartite_production(traj: &Trajectory, tol: &Tolerances) -> Result<MultipartiteReport> {
    if traj.system.len() < 2 {
        return Err(Error::Domain("multipartite production needs at least two subsystems".into()));
    }
    require_product(traj)?;
    let first = traj.initial();
    let dims = traj.system.dims();
    let clausius_defined = first.subsystems.iter().all(|r| r.beta.is_finite());
    let references = if clausius_defined {
        traj.system
            .subsystems()
            .iter()
            .zip(&first.subsystems)
            .map(|(s, r)| gibbs_state(&s.hamiltonian, r.beta).map(|g| g.state))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let mut summary = AuditSummary::new("multipartite_production");
    let mut rows = Vec::with_capacity(traj.snapshots.len());
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let state = traj.state_at(k)?;
        let corr = total_correlation(&state, dims)?;
        let entropy_change: f64 =
            snap.subsystems.iter().zip(&first.subsystems).map(|(r, r0)| r.entropy - r0.entropy).sum();
        let gap = (entropy_change - corr).abs();
        summary.check(gap <= tol.identity, gap, k, snap.t, || {
            format!("Σ ΔS_i − C(t) = {gap:.3e}")
        });
        summary.check(corr >= -tol.nonnegativity, 0.0, k, snap.t, || format!("C(t) = {corr:.3e} < 0"));

        let (clausius, clausius_rhs) = if clausius_defined {
            let mut lhs = 0.0;
            let mut rhs = corr;
            for (i, (r, r0)) in snap.subsystems.iter().zip(&first.subsystems).enumerate() {
                lhs += r0.beta * (r.thermal_energy - r0.thermal_energy) - (r.zeta - r0.zeta);
                let h = &traj.system.subsystems()[i].hamiltonian;
                rhs += relative_entropy(&gibbs_state(h, r.beta)?.state, &references[i])?;
            }
            let gap = (lhs - rhs).abs();
            summary.check(gap <= tol.identity, gap, k, snap.t, || format!("Clausius residual {gap:.3e}"));
            summary.check(rhs >= -tol.nonnegativity, 0.0, k, snap.t, || format!("Clausius sum {rhs:.3e} < 0"));
            (Some(lhs), Some(rhs))
        } else {
            (None, None)
        };
        rows.push(MultipartiteRow { t: snap.t, total_correlation: corr, entropy_change, clausius, clausius_rhs });
    }
    Ok(MultipartiteReport { rows, summary })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResidual {
    pub t: f64,
    /// Half-width of the central difference.
    pub h: f64,
    /// `|ΔE^th − T ΔS^th| / (2h)`, the rate mismatch of `dE^th = T dS^th`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermodynamicIdentitySeries {
    pub subsystem: String,
    pub rows: Vec<IdentityResidual>,
    /// Interior times skipped because `T_B` was zero or infinite there.
    pub skipped: Vec<f64>,
}

impl ThermodynamicIdentitySeries {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.residual))
    }

    pub fn summary(&self) -> AuditSummary {
        let mut s = AuditSummary::informational(format!("thermodynamic_identity[{}]", self.subsystem));
        for (k, r) in self.rows.iter().enumerate() {
            s.check(true, r.residual, k, r.t, String::new);
        }
        s
    }
}

/// Central-difference check of `dE_B = T_B dS_B − δW_B` with `δW_B`
/// eliminated: `dE_B^th = T_B d(S_B + ζ_B)` at interior grid points.
pub fn thermodynamic_identity_check(traj: &Trajectory, b: usize) -> Result<ThermodynamicIdentitySeries> {
    if b >= traj.system.len() {
        return Err(Error::Dimension(format!("subsystem index {b} out of range")));
    }
    let snaps = &traj.snapshots;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for k in 1..snaps.len().saturating_sub(1) {
        let (prev, here, next) = (&snaps[k - 1].subsystems[b], &snaps[k].subsystems[b], &snaps[k + 1].subsystems[b]);
        let regular = |beta: f64| beta.is_finite() && beta > 0.0;
        if !(regular(prev.beta) && regular(here.beta) && regular(next.beta)) {
            skipped.push(snaps[k].t);
            continue;
        }
        let width = snaps[k + 1].t - snaps[k - 1].t;
        let de = next.thermal_energy - prev.thermal_energy;
        let ds = next.thermal_entropy - prev.thermal_entropy;
        rows.push(IdentityResidual { t: snaps[k].t, h: 0.5 * width, residual: (de - here.temperature * ds).abs() / width });
    }
    if !skipped.is_empty() {
        log::info!("thermodynamic identity: skipped {} times with zero or infinite T", skipped.len());
    }
    Ok(ThermodynamicIdentitySeries { subsystem: traj.system.subsystems()[b].label.clone(), rows, skipped })
}

/// Energy conservation, global entropy invariance and `ΔE_i = −Q_i − W_i`.
pub fn conservation_audit(traj: &Trajectory, tol: &Tolerances) -> AuditSummary {
    let first = traj.initial();
    let e0 = first.total_energy();
    let scale = traj.system.energy_scale();
    let mut summary = AuditSummary::new("conservation");
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let de = (snap.total_energy() - e0).abs();
        summary.check(de <= tol.energy_conservation * scale, de, k, snap.t, || format!("energy drift {de:.3e}"));
        let ds = (snap.total_entropy - first.total_entropy).abs();
        summary.check(ds <= tol.entropy_conservation, ds, k, snap.t, || format!("entropy drift {ds:.3e}"));
        for (r, r0) in snap.subsystems.iter().zip(&first.subsystems) {
            let split = (r.energy - r0.energy + r.heat + r.work).abs();
            summary.check(split <= tol.energy_conservation * scale, split, k, snap.t, || {
                format!("ΔE ≠ −Q − W by {split:.3e}")
            });
        }
    }
    summary
}

impl core::fmt::Display for AuditSummary {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let status = if self.informational { "INFO" } else if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} checks, max residual {:.3e})", self.name, self.checks, self.max_residual)?;
        if let Some(v) = &self.first_violation {
            write!(f, "; first violation at row {} (t = {}): {}", v.row, v.t, v.detail)?;
        }
        Ok(())
    }
}

impl SecondLawReport {
    pub fn identity_rows(&self) -> Option<&[IdentityRow]> {
        match &self.rows {
            SecondLawRows::Identity(r) => Some(r),
            SecondLawRows::ZeroTemperature(_) => None,
        }
    }

    pub fn zero_temperature_rows(&self) -> Option<&[ZeroTemperatureRow]> {
        match &self.rows {
            SecondLawRows::ZeroTemperature(r) => Some(r),
            SecondLawRows::Identity(_) => None,
        }
    }
}

#[cfg(test)]
mod tests;
