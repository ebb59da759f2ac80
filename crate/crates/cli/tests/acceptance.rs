//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use effthermo_core::dynamics::{propagate, LocalOperator, uniform_times, CompositeSystem, Subsystem, Trajectory};
use effthermo_core::ergotropy::{ergotropy, passive_state, restricted_ergotropy, ControlFamily, SearchConfig};
use effthermo_core::laws::{
    entropy_production_identity, zero_temperature_audit, zero_temperature_limit_check, Tolerances,
};
use effthermo_core::qmat::{evolve, DensityMatrix, HermitianOperator};
use effthermo_core::random;
use effthermo_core::scenarios::{
    ex1_ground_ground, ex2_pure_pure, random_dims, random_ground_scenario, random_scenario, CouplingSpec, HamiltonianSpec,
    LocalState, Scenario,
};
use effthermo_core::thermo::{solve_effective_temperature, TemperatureCase, ThermalCurve};
use effthermo_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok { Ok(()) } else { Err(msg()) }
}

fn e<T>(r: Result<T, Error>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Energy and global entropy drift over a trajectory.
fn conservation_residuals(traj: &Trajectory) -> (f64, f64) {
    let first = traj.initial();
    traj.snapshots.iter().fold((0.0_f64, 0.0_f64), |(de, ds), s| {
        (de.max((s.total_energy() - first.total_energy()).abs()), ds.max((s.total_entropy - first.total_entropy).abs()))
    })
}

/// Worst conservation residuals seen by criteria 1–3, checked by criterion 4.
#[derive(Default)]
struct Conservation {
    energy: f64,
    entropy: f64,
    scenarios: usize,
}

impl Conservation {
    fn record(&mut self, traj: &Trajectory) {
        let (de, ds) = conservation_residuals(traj);
        self.energy = self.energy.max(de);
        self.entropy = self.entropy.max(ds);
        self.scenarios += 1;
    }
}

fn criterion_1(cons: &mut Conservation) -> Check {
    let tol = Tolerances::default();
    let (mut worst_residual, mut worst_sigma, mut snapshots) = (0.0_f64, f64::INFINITY, 0usize);
    for seed in 0..100u64 {
        let s = e(random_scenario(seed, &random_dims(seed, 2)))?;
        let traj = e(s.propagate())?;
        ensure(traj.snapshots.len() == 50, || format!("seed {seed}: {} snapshots", traj.snapshots.len()))?;
        cons.record(&traj);
        for b in 0..2 {
            let report = e(entropy_production_identity(&traj, b, &tol))?;
            for row in report.identity_rows().unwrap() {
                worst_residual = worst_residual.max(row.residual);
                worst_sigma = worst_sigma.min(row.sigma);
                ensure(row.residual <= 1e-8, || format!("seed {seed} b {b} t {}: residual {:.3e}", row.t, row.residual))?;
                ensure(row.sigma >= -1e-9, || format!("seed {seed} b {b} t {}: sigma {:.3e}", row.t, row.sigma))?;
                snapshots += 1;
            }
        }
    }
    Ok(format!("100 scenarios, {snapshots} rows, max residual {worst_residual:.2e}, min sigma {worst_sigma:.2e}"))
}

fn criterion_2(cons: &mut Conservation) -> Check {
    let tol = Tolerances::default();
    let (mut max_q, mut min_slack, mut degenerate) = (f64::NEG_INFINITY, f64::INFINITY, 0);
    for seed in 0..50u64 {
        let mut dims = random_dims(seed, 2);
        if seed % 2 == 1 {
            dims[1] = dims[1].max(3);
            degenerate += 1;
        }
        let s = e(random_ground_scenario(seed, &dims))?;
        let traj = e(s.propagate())?;
        cons.record(&traj);
        let b0 = &traj.initial().subsystems[1];
        ensure(b0.temperature == 0.0, || format!("seed {seed}: T_B(0) = {}", b0.temperature))?;
        let report = e(zero_temperature_audit(&traj, 1, &tol))?;
        for (row, snap) in report.zero_temperature_rows().unwrap().iter().zip(&traj.snapshots) {
            let first = traj.initial();
            let bound = (snap.subsystems[0].energy - first.subsystems[0].energy)
                + (snap.interaction_energy - first.interaction_energy);
            let w = snap.subsystems[1].work;
            max_q = max_q.max(snap.subsystems[1].heat);
            min_slack = min_slack.min(w - bound);
            ensure(snap.subsystems[1].heat <= 1e-10, || format!("seed {seed} t {}: Q_B = {:.3e}", row.t, snap.subsystems[1].heat))?;
            ensure(w >= bound - 1e-10, || format!("seed {seed} t {}: W_B − bound = {:.3e}", row.t, w - bound))?;
        }
    }
    Ok(format!("50 scenarios ({degenerate} with d_g = 2), max Q_B {max_q:.2e}, min W_B − bound {min_slack:.2e}"))
}

fn limit_case(name: &str, base: &Scenario, temps: &[f64], t: f64, cons: &mut Conservation) -> Result<String, String> {
    let (system, _) = e(base.build())?;
    let locals = base
        .subsystems
        .iter()
        .zip(system.subsystems())
        .map(|(spec, sub)| spec.initial.build(&sub.hamiltonian))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let table = e(zero_temperature_limit_check(&system, &locals, 1, temps, t))?;
    let devs: Vec<String> = table.rows.iter().map(|r| format!("{:.2e}", r.deviation)).collect();
    ensure(table.monotone, || format!("{name}: deviations not monotone: {devs:?}"))?;
    ensure(table.final_ratio <= 0.05, || format!("{name}: final/first = {:.3e}", table.final_ratio))?;
    for r in &table.rows {
        ensure(r.zeta_bounded, || format!("{name}: |T Δζ| = {:.3e} at T = {}", r.scaled_zeta_change.abs(), r.temperature))?;
    }
    // the same initial states, propagated for criterion 4
    for &temp in temps {
        let mut s = base.clone();
        s.subsystems[1].initial = LocalState::Gibbs { beta: 1.0 / temp };
        s.times.t_end = t;
        s.times.points = 21;
        cons.record(&e(s.propagate())?);
    }
    Ok(format!("{name}: ratio {:.2e}, deviations {}", table.final_ratio, devs.join(" ")))
}

fn criterion_3(cons: &mut Conservation) -> Check {
    let temps = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let ex1 = ex1_ground_ground();
    let a = limit_case("ex1 pair", &ex1, &temps, 10.0, cons)?;
    // B with a two-fold degenerate ground level, so Δζ can be nonzero
    let mut degenerate = ex1.clone();
    degenerate.subsystems[1].hamiltonian = HamiltonianSpec::Levels(vec![0.0, 0.0, 1.0]);
    degenerate.couplings = vec![CouplingSpec::Product {
        strength: 0.2,
        factors: vec![("A".into(), LocalOperator::SigmaPlus), ("B".into(), LocalOperator::Lower)],
        hermitian_conjugate: true,
    }];
    let b = limit_case("d_g = 2", &degenerate, &temps, 10.0, cons)?;
    Ok(format!("T0 = 1e-1 … 1e-3; {a}; {b}"))
}

fn criterion_4(cons: &Conservation) -> Check {
    ensure(cons.energy <= 1e-9, || format!("energy drift {:.3e}", cons.energy))?;
    ensure(cons.entropy <= 1e-9, || format!("entropy drift {:.3e}", cons.entropy))?;
    Ok(format!("{} trajectories, max energy drift {:.2e}, max entropy drift {:.2e}", cons.scenarios, cons.energy, cons.entropy))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0_f64;
    for k in 0..1000 {
        let dim = rng.random_range(2..=6);
        let h = e(random::hermitian(&mut rng, dim, 1.0))?;
        let beta = 10f64.powf(rng.random_range(-2.0..=1.7));
        let curve = ThermalCurve::new(&h);
        let s = e(curve.entropy(beta))?;
        let solved = e(curve.solve(s))?;
        let rel = (solved.beta - beta).abs() / beta;
        worst = worst.max(rel);
        ensure(rel <= 1e-6, || format!("pair {k}: β = {beta}, recovered {}", solved.beta))?;
    }
    for dg in [2usize, 3] {
        let mut levels = vec![0.0; dg];
        levels.extend([0.4, 1.3]);
        let h = e(HermitianOperator::from_real_diagonal(&levels))?;
        let ln_dg = (dg as f64).ln();
        for target in [0.0, 0.25 * ln_dg, 0.5 * ln_dg, 0.999 * ln_dg] {
            let t = e(solve_effective_temperature(&h, target))?;
            ensure(t.temperature == 0.0 && t.case == TemperatureCase::GroundDegenerate, || {
                format!("d_g = {dg}, S = {target}: T = {}", t.temperature)
            })?;
            ensure(t.zeta == ln_dg - target, || format!("d_g = {dg}: ζ = {} vs {}", t.zeta, ln_dg - target))?;
        }
    }
    Ok(format!("1000 pairs, max relative β error {worst:.2e}; degenerate branch exact for d_g = 2, 3"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let dim = rng.random_range(2..=5);
        let curve = ThermalCurve::new(&e(random::local_hamiltonian(&mut rng, dim, 1.0))?);
        for k in 0..=40 {
            let beta = 0.1 * 100f64.powf(k as f64 / 40.0);
            let h = 1e-4 * beta;
            let de = e(curve.energy(beta + h))? - e(curve.energy(beta - h))?;
            let ds = e(curve.entropy(beta + h))? - e(curve.entropy(beta - h))?;
            let rel = (de / ds * beta - 1.0).abs();
            worst = worst.max(rel);
            ensure(rel <= 1e-3, || format!("β = {beta}: dE/dS = {} vs T = {}", de / ds, 1.0 / beta))?;
        }
    }
    Ok(format!("β ∈ [0.1, 10], 410 points, max relative error {worst:.2e}"))
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = [0.0_f64; 3];
    let search = SearchConfig { grid_points: 5, iterations: 30, shrink: 0.5, starts: 2 };
    for k in 0..200 {
        let dim = rng.random_range(2..=5);
        let h = e(random::hermitian(&mut rng, dim, 1.0))?;
        let rho = e(random::density_matrix(&mut rng, dim))?;
        let w = e(ergotropy(&rho, &h))?;
        ensure(w >= -1e-10, || format!("instance {k}: ergotropy {w:.3e}"))?;
        let passive = e(ergotropy(&e(passive_state(&rho, &h))?, &h))?;
        ensure(passive.abs() <= 1e-10, || format!("instance {k}: passive ergotropy {passive:.3e}"))?;
        let u = random::unitary(&mut rng, dim);
        let moved = e(ergotropy(&e(rho.conjugated(&u))?, &e(h.conjugated(&u))?))?;
        ensure((moved - w).abs() <= 1e-10, || format!("instance {k}: invariance gap {:.3e}", (moved - w).abs()))?;
        let gens = (0..2).map(|_| random::hermitian(&mut rng, dim, 1.0)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let family = e(ControlFamily::uniform("random", gens, -1.5, 1.5))?;
        let r = e(restricted_ergotropy(&rho, &h, &family, &search))?;
        ensure(r.value <= w + 1e-10, || format!("instance {k}: restricted {} > {w}", r.value))?;
        worst[0] = worst[0].max((-w).max(0.0));
        worst[1] = worst[1].max(passive.abs());
        worst[2] = worst[2].max((moved - w).abs());
    }
    let pi = std::f64::consts::PI;
    let paulis = ["sigma_x", "sigma_y", "sigma_z"]
        .iter()
        .map(|n| {
            let m = LocalOperator::parse(n).and_then(|op| op.matrix(2))?;
            HermitianOperator::new(m)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let family = e(ControlFamily::uniform("su2", paulis, -pi, pi))?;
    let mut qubit_gap = 0.0_f64;
    for k in 0..20 {
        let h = e(random::hermitian(&mut rng, 2, 1.0))?;
        let rho = if k == 0 { e(DensityMatrix::basis(2, 1))? } else { e(random::density_matrix(&mut rng, 2))? };
        let w = e(ergotropy(&rho, &h))?;
        let r = e(restricted_ergotropy(&rho, &h, &family, &SearchConfig::default()))?;
        qubit_gap = qubit_gap.max((w - r.value).abs());
        ensure((w - r.value).abs() <= 1e-4, || format!("qubit {k}: restricted {} vs {w}", r.value))?;
    }
    Ok(format!(
        "200 instances (worst: negativity {:.1e}, passive {:.1e}, invariance {:.1e}); qubit full-algebra gap {qubit_gap:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion_8() -> Check {
    let traj = e(ex1_ground_ground().propagate())?;
    let first = traj.initial();
    ensure(first.subsystems.iter().all(|r| r.temperature == 0.0), || "ex1: T(0) ≠ 0".into())?;
    for s in &traj.snapshots[1..] {
        ensure(s.subsystems.iter().all(|r| r.temperature > 0.0), || format!("ex1: T = 0 at t = {}", s.t))?;
        ensure(s.interaction_energy <= 0.0, || format!("ex1: E_int = {:.3e} at t = {}", s.interaction_energy, s.t))?;
    }
    let max_t = traj.snapshots.iter().map(|s| s.subsystems[1].temperature).fold(0.0, f64::max);
    let min_int = traj.snapshots.iter().map(|s| s.interaction_energy).fold(0.0, f64::min);

    let traj = e(ex2_pure_pure().propagate())?;
    let first = traj.initial();
    ensure(first.subsystems.iter().all(|r| r.temperature == 0.0), || "ex2: T(0) ≠ 0".into())?;
    let max_w: Vec<f64> = (0..2)
        .map(|i| traj.snapshots.iter().map(|s| s.subsystems[i].work.abs()).fold(0.0, f64::max))
        .collect();
    ensure(max_w.iter().all(|&w| w > 1e-3), || format!("ex2: work terms {max_w:?}"))?;
    Ok(format!(
        "ex1: T > 0 for t > 0 (max T_B {max_t:.3}), E_int ≤ 0 (min {min_int:.3e}); ex2: T(0) = 0, max |W_A| {:.3}, max |W_B| {:.3}",
        max_w[0], max_w[1]
    ))
}

fn run_cli(args: &[&str]) -> Result<(i32, String), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_effthermo")).args(args).output().map_err(|e| e.to_string())?;
    Ok((o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stderr).into_owned()))
}

fn criterion_9() -> Check {
    // a correlated initial state: the forward-evolved state run backwards
    // under −H, which returns to the uncorrelated product
    let (sys, _) = e(ex1_ground_ground().build())?;
    let h = sys.subsystems()[0].hamiltonian.clone();
    let gibbs = |b: f64| e(effthermo_core::thermo::gibbs_state(&h, b).map(|g| g.state));
    let rho0 = e(sys.product_state(&[gibbs(0.5)?, gibbs(2.0)?]))?;
    let forward = e(evolve(&rho0, sys.total_hamiltonian(), 8.0))?;
    let negate = |op: &HermitianOperator| HermitianOperator::new(-op.entries());
    let subsystems = e(sys
        .subsystems()
        .iter()
        .map(|s| Ok(Subsystem::new(s.label.clone(), negate(&s.hamiltonian)?)))
        .collect::<Result<Vec<_>, Error>>())?;
    let couplings = e(sys.couplings().iter().map(negate).collect::<Result<Vec<_>, Error>>())?;
    let reversed = e(CompositeSystem::new(subsystems, couplings))?;
    let backward = e(propagate(&reversed, &forward, &e(uniform_times(8.0, 17))?))?;
    ensure(!backward.initial_is_product, || "time-reversed start looks uncorrelated".into())?;
    let (i_start, i_end) = (backward.initial().correlation, backward.snapshots.last().unwrap().correlation);
    ensure(i_end < i_start && i_end.abs() <= 1e-9, || format!("reversal did not decorrelate: I {i_start:.3e} -> {i_end:.3e}"))?;
    match entropy_production_identity(&backward, 1, &Tolerances::default()) {
        Err(Error::Unsupported(m)) if m.contains("correlated") => {}
        other => return Err(format!("time-reversed trajectory not refused: {other:?}")),
    }

    let dir = std::env::temp_dir().join(format!("effthermo-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let out = dir.join("out");
    let out = out.to_str().unwrap();
    let (code, _) = run_cli(&["run", "ex1_ground_ground", "--out", out])?;
    ensure(code == 0, || format!("passing run exited {code}"))?;
    let (code, err) = run_cli(&["run", "random", "--seed", "3", "--tol-identity", "0", "--out", out])?;
    ensure(code == 1 && err.contains("first violation at row"), || format!("failing audit: exit {code}, {err}"))?;
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "[[subsystems]]\nlabel = \"A\"\nhamiltonian = \"qubit(1.0)\"\ninitial = \"ground\"\n")
        .map_err(|e| e.to_string())?;
    let (code, err) = run_cli(&["run", bad.to_str().unwrap(), "--out", out])?;
    ensure(code == 2 && err.contains("missing field `dim`") && err.contains("line 1"), || format!("missing dim: exit {code}, {err}"))?;
    let wrong = dir.join("wrong.toml");
    std::fs::write(&wrong, "preset = \"ex1_ground_ground\"\naudits = [\"entropy_production:B\"]\n").map_err(|e| e.to_string())?;
    let (code, err) = run_cli(&["run", wrong.to_str().unwrap(), "--out", out])?;
    ensure(code == 2 && err.contains("zero-temperature audit"), || format!("wrong audit: exit {code}, {err}"))?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("time-reversed trajectory (I: {i_start:.2e} -> {i_end:.1e}) refused as correlated; exit codes 0/1/2 with messages"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut cons = Conservation::default();
    let results: Vec<(usize, &str, Check)> = vec![
        (1, "identity suite", criterion_1(&mut cons)),
        (2, "zero-temperature second law", criterion_2(&mut cons)),
        (3, "limit convergence", criterion_3(&mut cons)),
        (4, "conservation", criterion_4(&cons)),
        (5, "effective-temperature solver", criterion_5()),
        (6, "Gibbs identity", criterion_6()),
        (7, "ergotropy suite", criterion_7()),
        (8, "Ex1/Ex2 reproduction", criterion_8()),
        (9, "refusal correctness", criterion_9()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {}/{} passed in {:.1}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
