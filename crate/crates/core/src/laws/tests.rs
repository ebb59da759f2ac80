use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::dynamics::{propagate, uniform_times, Coupling, CouplingTerm, LocalOperator, Subsystem};
use crate::qmat::HermitianOperator;
use crate::random;

fn qubit(omega: f64) -> HermitianOperator {
    HermitianOperator::from_real_diagonal(&[0.0, omega]).unwrap()
}

fn xx(g: f64) -> Coupling {
    Coupling::single(g, vec![(0, LocalOperator::SigmaX), (1, LocalOperator::SigmaX)])
}

fn two_qubits(g: f64) -> CompositeSystem {
    CompositeSystem::from_couplings(vec![Subsystem::new("A", qubit(1.0)), Subsystem::new("B", qubit(1.0))], &[xx(g)]).unwrap()
}

fn gibbs_pair(sys: &CompositeSystem, ba: f64, bb: f64) -> DensityMatrix {
    let s = sys.subsystems();
    sys.product_state(&[gibbs_state(&s[0].hamiltonian, ba).unwrap().state, gibbs_state(&s[1].hamiltonian, bb).unwrap().state])
        .unwrap()
}

fn ex2_system(g: f64) -> CompositeSystem {
    let exchange = Coupling {
        terms: vec![CouplingTerm { strength: g, factors: vec![(0, LocalOperator::SigmaPlus), (1, LocalOperator::Lower)] }],
        hermitian_conjugate: true,
    };
    CompositeSystem::from_couplings(
        vec![
            Subsystem::new("A", qubit(1.0)),
            Subsystem::new("B", HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap()),
        ],
        &[exchange],
    )
    .unwrap()
}

fn ex2_initial(sys: &CompositeSystem) -> DensityMatrix {
    let b = DensityMatrix::pure(&[Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(0.0, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)]).unwrap();
    sys.product_state(&[DensityMatrix::basis(2, 1).unwrap(), b]).unwrap()
}

#[test]
fn identity_vanishes_at_t0_and_when_stationary() {
    let sys = two_qubits(0.0);
    let traj = propagate(&sys, &gibbs_pair(&sys, 0.5, 2.0), &uniform_times(20.0, 21).unwrap()).unwrap();
    let report = entropy_production_identity(&traj, 1, &Tolerances::default()).unwrap();
    assert!(report.summary.passed());
    for row in report.identity_rows().unwrap() {
        assert!(row.lhs.abs() <= 1e-12 && row.rhs_mutual.abs() <= 1e-12 && row.rhs_drive.abs() <= 1e-12);
    }
    let coupled = two_qubits(0.3);
    let traj = propagate(&coupled, &gibbs_pair(&coupled, 0.5, 2.0), &[0.0, 1.0]).unwrap();
    let report = entropy_production_identity(&traj, 1, &Tolerances::default()).unwrap();
    let row0 = &report.identity_rows().unwrap()[0];
    assert!(row0.lhs.abs() <= 1e-12 && row0.sigma.abs() <= 1e-12);
}

#[test]
fn identity_holds_along_coupled_qubits() {
    let sys = two_qubits(0.3);
    let traj = propagate(&sys, &gibbs_pair(&sys, 0.5, 2.0), &uniform_times(20.0, 201).unwrap()).unwrap();
    for b in [0, 1] {
        let report = entropy_production_identity(&traj, b, &Tolerances::default()).unwrap();
        assert!(report.summary.passed(), "{}", report.summary);
        let rows = report.identity_rows().unwrap();
        assert!(rows.iter().all(|r| r.residual <= 1e-9 && r.sigma >= 0.0));
        assert!(rows.iter().any(|r| r.sigma > 1e-4));
    }
    assert!((entropy_production_identity(&traj, 1, &Tolerances::default()).unwrap().temperature_0 - 0.5).abs() <= 1e-10);
}

#[test]
fn identity_refusals() {
    let sys = two_qubits(0.2);
    let ground = DensityMatrix::basis(4, 0).unwrap();
    let traj = propagate(&sys, &ground, &uniform_times(5.0, 6).unwrap()).unwrap();
    assert!(matches!(entropy_production_identity(&traj, 1, &Tolerances::default()), Err(Error::WrongAudit(_))));

    let warm = propagate(&sys, &gibbs_pair(&sys, 1.0, 1.0), &[0.0, 1.0]).unwrap();
    assert!(matches!(zero_temperature_audit(&warm, 1, &Tolerances::default()), Err(Error::WrongAudit(_))));

    let three = CompositeSystem::new(
        vec![Subsystem::new("A", qubit(1.0)), Subsystem::new("B", qubit(1.0)), Subsystem::new("C", qubit(1.0))],
        vec![],
    )
    .unwrap();
    let rho = three.product_state(&[DensityMatrix::maximally_mixed(2).unwrap(), gibbs_state(&qubit(1.0), 1.0).unwrap().state, DensityMatrix::basis(2, 0).unwrap()]).unwrap();
    let t3 = propagate(&three, &rho, &[0.0]).unwrap();
    assert!(matches!(entropy_production_identity(&t3, 1, &Tolerances::default()), Err(Error::Unsupported(_))));
}

#[test]
fn time_reversed_trajectory_is_refused() {
    // forward evolution to t1 builds correlations; starting a trajectory from
    // that state (the time-reversed process) must not be audited
    let sys = two_qubits(0.3);
    let forward = propagate(&sys, &gibbs_pair(&sys, 0.5, 2.0), &[0.0, 7.0]).unwrap();
    assert!(forward.snapshots[1].correlation > 1e-3);
    let correlated = forward.state_at(1).unwrap();
    let reversed_h = HermitianOperator::new(-sys.total_hamiltonian().entries().clone()).unwrap();
    let reversed_sys = CompositeSystem::new(
        sys.subsystems().to_vec(),
        vec![HermitianOperator::new(-sys.interaction().clone() - (sys.total_hamiltonian().entries() - sys.interaction()).scale(2.0)).unwrap()],
    )
    .unwrap();
    // reversed_sys has total Hamiltonian −H, so it walks back to the product state
    assert!((reversed_sys.total_hamiltonian().entries() - reversed_h.entries()).iter().all(|z| z.norm() <= 1e-14));
    let back = propagate(&reversed_sys, &correlated, &[0.0, 7.0]).unwrap();
    assert!(!back.initial_is_product);
    assert!(back.snapshots[1].correlation.abs() <= 1e-9);
    let err = entropy_production_identity(&back, 1, &Tolerances::default()).unwrap_err();
    assert!(matches!(err, Error::Unsupported(ref m) if m.contains("correlated")));
    assert!(matches!(multipartite_production(&back, &Tolerances::default()), Err(Error::Unsupported(_))));
}

#[test]
fn ex1_zero_temperature_audit() {
    let sys = two_qubits(0.2);
    let traj = propagate(&sys, &DensityMatrix::basis(4, 0).unwrap(), &uniform_times(20.0, 201).unwrap()).unwrap();
    for b in [0, 1] {
        let report = zero_temperature_audit(&traj, b, &Tolerances::default()).unwrap();
        assert!(report.summary.passed(), "{}", report.summary);
        let rows = report.zero_temperature_rows().unwrap();
        assert!(rows.iter().all(|r| r.heat <= 0.0));
        assert!(rows.iter().any(|r| r.heat < -1e-3));
    }
}

#[test]
fn zero_temperature_stationary_ground() {
    let sys = two_qubits(0.0);
    let rho = sys.product_state(&[gibbs_state(&qubit(1.0), 1.3).unwrap().state, DensityMatrix::basis(2, 0).unwrap()]).unwrap();
    let traj = propagate(&sys, &rho, &uniform_times(10.0, 11).unwrap()).unwrap();
    let report = zero_temperature_audit(&traj, 1, &Tolerances::default()).unwrap();
    for r in report.zero_temperature_rows().unwrap() {
        assert_eq!(r.heat, 0.0);
        assert!(r.work.abs() <= 1e-15);
        assert!((r.work - r.work_bound).abs() <= 1e-15);
    }
}

#[test]
fn zero_temperature_with_degenerate_ground() {
    let hb = HermitianOperator::from_real_diagonal(&[0.0, 0.0, 1.0]).unwrap();
    let coupling = Coupling {
        terms: vec![
            CouplingTerm { strength: 0.25, factors: vec![(0, LocalOperator::SigmaX), (1, LocalOperator::Position)] },
            CouplingTerm { strength: 0.1, factors: vec![(0, LocalOperator::SigmaZ), (1, LocalOperator::Number)] },
        ],
        hermitian_conjugate: false,
    };
    let sys = CompositeSystem::from_couplings(vec![Subsystem::new("A", qubit(1.0)), Subsystem::new("B", hb)], &[coupling]).unwrap();
    let b0 = DensityMatrix::pure(&[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), Complex64::new(0.0, 0.0)]).unwrap();
    let rho = sys.product_state(&[gibbs_state(&qubit(1.0), 0.8).unwrap().state, b0]).unwrap();
    let traj = propagate(&sys, &rho, &uniform_times(25.0, 101).unwrap()).unwrap();
    assert_eq!(traj.initial().subsystems[1].case, crate::thermo::TemperatureCase::GroundDegenerate);
    let report = zero_temperature_audit(&traj, 1, &Tolerances::default()).unwrap();
    assert!(report.summary.passed(), "{}", report.summary);
}

#[test]
fn limit_table_converges_for_ex1_like_scenario() {
    let sys = two_qubits(0.2);
    let locals = vec![DensityMatrix::basis(2, 0).unwrap(), DensityMatrix::basis(2, 0).unwrap()];
    let temps = [0.1, 0.03, 0.01, 0.003, 0.001];
    let table = zero_temperature_limit_check(&sys, &locals, 1, &temps, 5.0).unwrap();
    assert!(table.monotone, "{:?}", table.rows);
    assert!(table.final_ratio <= 0.05);
    assert!(table.converges(0.05));
    // first-order convergence: deviation/T is roughly constant
    let r0 = table.rows[0].deviation / temps[0];
    let r4 = table.rows[4].deviation / temps[4];
    assert!(r4 <= 10.0 * r0);
    assert!(table.rows.iter().all(|r| r.limit > 0.0));
}

#[test]
fn limit_table_without_coupling_is_zero_and_gauge_invariant() {
    let sys = two_qubits(0.0);
    let locals = vec![DensityMatrix::basis(2, 0).unwrap(), DensityMatrix::basis(2, 0).unwrap()];
    let temps = [0.1, 0.03, 0.01];
    let table = zero_temperature_limit_check(&sys, &locals, 1, &temps, 3.0).unwrap();
    for r in &table.rows {
        // without coupling the state of B never moves: T·D = 0 and the
        // deviation is the thermal energy of the initial Gibbs state
        assert!(r.increment_deviation <= 1e-15, "{r:?}");
        assert!(r.scaled_divergence.abs() <= 1e-15);
        let eth = crate::thermo::thermal_energy(&qubit(1.0), 1.0 / r.temperature).unwrap();
        // populations below the entropy noise floor count as zero
        assert!((r.deviation - eth).abs() <= 1e-13);
    }
    assert!(table.monotone);

    let coupled = two_qubits(0.2);
    let shifted = CompositeSystem::new(
        vec![Subsystem::new("A", qubit(1.0)), Subsystem::new("B", qubit(1.0).shifted(-1.0))],
        coupled.couplings().to_vec(),
    )
    .unwrap();
    let t1 = zero_temperature_limit_check(&coupled, &locals, 1, &temps, 3.0).unwrap();
    let t2 = zero_temperature_limit_check(&shifted, &locals, 1, &temps, 3.0).unwrap();
    for (a, b) in t1.rows.iter().zip(&t2.rows) {
        assert!((a.deviation - b.deviation).abs() <= 1e-12);
        assert!((a.limit - b.limit).abs() <= 1e-12);
    }
    assert!(matches!(zero_temperature_limit_check(&coupled, &locals, 1, &[0.01, 0.1], 3.0), Err(Error::Domain(_))));
}

#[test]
fn multipartite_reduces_to_mutual_information() {
    let sys = two_qubits(0.3);
    let traj = propagate(&sys, &gibbs_pair(&sys, 0.5, 2.0), &uniform_times(10.0, 21).unwrap()).unwrap();
    let report = multipartite_production(&traj, &Tolerances::default()).unwrap();
    assert!(report.summary.passed(), "{}", report.summary);
    for (k, row) in report.rows.iter().enumerate() {
        let i = mutual_information(&traj.state_at(k).unwrap(), sys.dims(), &[0]).unwrap();
        assert!((row.total_correlation - i).abs() <= 1e-14);
    }
}

#[test]
fn three_qubit_chain_production_is_nonnegative() {
    let subs = vec![Subsystem::new("A", qubit(1.0)), Subsystem::new("B", qubit(1.0)), Subsystem::new("C", qubit(1.0))];
    let chain = [
        Coupling::single(0.2, vec![(0, LocalOperator::SigmaX), (1, LocalOperator::SigmaX)]),
        Coupling::single(0.2, vec![(1, LocalOperator::SigmaX), (2, LocalOperator::SigmaX)]),
    ];
    let sys = CompositeSystem::from_couplings(subs, &chain).unwrap();
    let locals: Vec<DensityMatrix> = [0.5, 1.0, 2.0].iter().map(|&b| gibbs_state(&qubit(1.0), b).unwrap().state).collect();
    let traj = propagate(&sys, &sys.product_state(&locals).unwrap(), &uniform_times(20.0, 81).unwrap()).unwrap();
    let report = multipartite_production(&traj, &Tolerances::default()).unwrap();
    assert!(report.summary.passed(), "{}", report.summary);
    for row in &report.rows {
        assert!(row.total_correlation >= -1e-9);
        assert!(row.clausius_rhs.unwrap() >= -1e-9);
    }

    let free = CompositeSystem::new(sys.subsystems().to_vec(), vec![]).unwrap();
    let traj = propagate(&free, &free.product_state(&locals).unwrap(), &uniform_times(20.0, 11).unwrap()).unwrap();
    for row in multipartite_production(&traj, &Tolerances::default()).unwrap().rows {
        assert!(row.total_correlation.abs() <= 1e-12 && row.clausius.unwrap().abs() <= 1e-12);
    }
}

#[test]
fn thermodynamic_identity_stationary_is_zero() {
    let sys = two_qubits(0.0);
    let traj = propagate(&sys, &gibbs_pair(&sys, 0.5, 2.0), &uniform_times(4.0, 9).unwrap()).unwrap();
    let series = thermodynamic_identity_check(&traj, 1).unwrap();
    assert_eq!(series.rows.len(), 7);
    assert!(series.max_residual() <= 1e-12);
    assert!(series.summary().passed());
}

#[test]
fn thermodynamic_identity_is_second_order_for_ex2() {
    let sys = ex2_system(0.15);
    let rho = ex2_initial(&sys);
    let full = propagate(&sys, &rho, &uniform_times(20.0, 41).unwrap()).unwrap();
    let series = thermodynamic_identity_check(&full, 1).unwrap();
    assert!(series.rows.len() > 30);
    // t = 0 is zero temperature and sits at the edge of the grid
    assert_eq!(full.initial().subsystems[1].temperature, 0.0);

    let t_star = 6.0;
    let residual = |h: f64| {
        let traj = propagate(&sys, &rho, &[0.0, t_star - h, t_star, t_star + h]).unwrap();
        let s = thermodynamic_identity_check(&traj, 1).unwrap();
        s.rows.iter().find(|r| r.t == t_star).unwrap().residual
    };
    let (r1, r2) = (residual(0.02), residual(0.01));
    let ratio = r1 / r2;
    assert!((ratio - 4.0).abs() <= 1.2, "ratio {ratio} ({r1:.3e} / {r2:.3e})");
}

#[test]
fn thermodynamic_identity_on_the_gibbs_curve() {
    // same identity along β with no dynamics at all
    let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0, 2.0]).unwrap();
    let curve = ThermalCurve::new(&h);
    let beta = |t: f64| 0.5 + 0.3 * t;
    let resid = |t: f64, step: f64| {
        let de = curve.energy(beta(t + step)).unwrap() - curve.energy(beta(t - step)).unwrap();
        let ds = curve.entropy(beta(t + step)).unwrap() - curve.entropy(beta(t - step)).unwrap();
        (de - ds / beta(t)).abs() / (2.0 * step)
    };
    let ratio = resid(2.0, 0.02) / resid(2.0, 0.01);
    assert!((ratio - 4.0).abs() <= 1.2, "ratio {ratio}");
}

#[test]
fn conservation_audit_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..5 {
        let ha = random::local_hamiltonian(&mut rng, 3, 1.0).unwrap();
        let hb = random::local_hamiltonian(&mut rng, 2, 1.0).unwrap();
        let v = random::hermitian(&mut rng, 6, 0.5).unwrap();
        let sys = CompositeSystem::new(vec![Subsystem::new("A", ha.clone()), Subsystem::new("B", hb.clone())], vec![v]).unwrap();
        let rho = sys
            .product_state(&[gibbs_state(&ha, rng.random_range(0.2..5.0)).unwrap().state, gibbs_state(&hb, rng.random_range(0.2..5.0)).unwrap().state])
            .unwrap();
        let traj = propagate(&sys, &rho, &uniform_times(10.0, 21).unwrap()).unwrap();
        let summary = conservation_audit(&traj, &Tolerances::default());
        assert!(summary.passed(), "{summary}");
    }
}
