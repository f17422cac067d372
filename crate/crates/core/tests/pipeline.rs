use std::fs;

use lwpm::harness::{gen_random_matrix, run_reverse_experiment};
use lwpm::reductions::{forward_reduce, lift_solution, reverse_lift, reverse_reduce, ReverseLiftOptions};
use lwpm::{
    AffineSystem, BinaryMatrix, Engine, ExperimentConfig, MinPmInstance, Projection, ReductionCertificate,
    SolverConfig,
};

#[test]
fn certificate_text_round_trip_and_lift() {
    let inst: MinPmInstance = "poly 1 + x^2 + x^5\nn 12\n".parse().unwrap();
    let cert = forward_reduce(&inst);
    let back: ReductionCertificate = cert.to_string().parse().unwrap();
    assert_eq!(back.to_string(), cert.to_string());

    let working = cert.working_system().unwrap();
    let (x, _) = working.exhaustive_solve(false).unwrap();
    let full = cert.restore(&x);
    let k = lift_solution(&inst, &full).unwrap();
    assert!(inst.poly().divides(&k).unwrap());
    assert_eq!(k.weight(), cert.system().violation_count(&full).unwrap());

    let sys: AffineSystem = working.to_string().parse().unwrap();
    assert_eq!(sys, working);
}

#[test]
fn reverse_lift_never_worsens_its_seed() {
    let a = gen_random_matrix(60, 24, 0.5, 5).unwrap();
    let inst = reverse_reduce(&a, Projection::default()).unwrap();
    let cfg = SolverConfig::default().with_seed(9).with_forbid_zero(true);
    let multiple = lwpm::reductions::solve_min_pm(&inst, Engine::HillClimb, &cfg).unwrap().multiple;
    for engine in [Engine::HillClimb, Engine::SimulatedAnneal] {
        let lift = reverse_lift(&a, &multiple, inst.poly(), engine, &cfg, ReverseLiftOptions::default()).unwrap();
        assert!(lift.norm <= lift.initial_norm);
    }
}

#[test]
fn experiment_directory_layout() {
    let cfg = ExperimentConfig {
        sizes: vec![(20, 10), (30, 12)],
        trials: 3,
        base_seed: 4,
        ..ExperimentConfig::default()
    };
    let report = run_reverse_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    report.write_dir(dir.path()).unwrap();
    for name in ["summary.csv", "aggregates.csv", "config.txt", "20_10_pq.csv", "30_12_sa.csv", "30_12_records.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);

    let again = run_reverse_experiment(&cfg).unwrap();
    assert_eq!(again.summary_csv(), report.summary_csv());
}

#[test]
fn matrix_text_round_trip() {
    let a = gen_random_matrix(9, 4, 0.3, 2).unwrap();
    let b: BinaryMatrix = a.to_string().parse().unwrap();
    assert_eq!(a, b);
}
