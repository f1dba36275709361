//! Acceptance suite. Each criterion prints one PASS/FAIL line with the
//! measured value, the pinned tolerance and the wall time.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use ssh_passage::adiabatic::adiabaticity_parameter;
use ssh_passage::disorder::{ensemble_fidelity, sample_realization, DisorderSpec};
use ssh_passage::dynamics::{
    atom_excited, fidelity, propagate, receiving_target, standard_target, Drive, Stepping, SweepSchedule, Trajectory,
};
use ssh_passage::effective::{embed_dark_state, five_state_model, hybridization_energy, FiveStateModel};
use ssh_passage::experiments::{run_collect, ExperimentConfig, ExperimentKind};
use ssh_passage::model::{Chain1Contact, Chain2Contact, ChainParams, CouplingScenario, Lattice, Phase};
use ssh_passage::spectral::EigenSystem;

const SPECTRUM_TOL: f64 = 1e-12;
const DARKNESS_TOL: f64 = 1e-12;
const QUINTET_TOL: f64 = 5e-5;
const DARK_OVERLAP_MIN: f64 = 0.999;
const TRIVIAL_ATOM_MIN: f64 = 0.99;
const HALF_TOL: f64 = 0.02;
const ATOM_LEFTOVER_MAX: f64 = 0.01;
const RATIO_REL_TOL: f64 = 0.10;
const SPLIT_TOL: f64 = 0.03;
const DETUNING_FIDELITY_MIN: f64 = 0.95;
const DETUNING_WINDOW: f64 = 0.15;
const HYBRIDIZATION_MIN: f64 = 1e-3;
const LAMBDA_MAX: f64 = 0.1;
const BOND_MEAN_TOL: f64 = 0.02;
const NORM_DRIFT_MAX: f64 = 1e-9;
const DT_HALVING_MAX: f64 = 1e-6;
const RESIDUAL_MAX: f64 = 1e-10;
const END_WEIGHT_MIN: f64 = 0.98;

const N: usize = 4;
const G: f64 = 0.01;
const OMEGA: f64 = 1e-4;

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn ac(g1: f64, g2: f64) -> CouplingScenario {
    CouplingScenario::new(Chain1Contact::A, 1, Chain2Contact::C, 1, g1, g2)
}

fn lattice(s: &CouplingScenario) -> Lattice {
    Lattice::new(N, 1.0, s, None).unwrap()
}

fn full_sweep(l: &Lattice, stepping: &Stepping) -> Trajectory {
    let drive = Drive::Sweep(SweepSchedule::full(OMEGA).unwrap());
    propagate(l, &drive, &atom_excited(l.n_cells()), stepping).unwrap()
}

/// Final populations on the two receiving end sites and the atom.
fn end_populations(l: &Lattice, traj: &Trajectory) -> (f64, f64, f64) {
    let basis = l.basis();
    let (s1, s2) = l.scenario().receiving_sites(l.n_cells());
    let p = traj.final_populations();
    (
        p[basis.index(s1).unwrap()],
        p[basis.index(s2).unwrap()],
        p[basis.atom()],
    )
}

fn topological_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|k| (0.5 + 0.5 * k as f64 / points as f64) * PI)
        .collect()
}

fn closed_form_spectrum() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (g, g1, g2) = (
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let m = FiveStateModel::from_couplings(g, g1, g2);
        let outer = (g * g + g1 * g1 + g2 * g2).sqrt();
        let expected = [-outer, -f64::abs(g), 0.0, f64::abs(g), outer];
        for (a, b) in m.eigenvalues().iter().zip(expected) {
            worst = worst.max((a - b).abs());
        }
    }
    outcome(
        worst <= SPECTRUM_TOL,
        format!("max |Δλ| = {worst:.2e} (tol {SPECTRUM_TOL:.0e})"),
    )
}

fn darkness() -> Outcome {
    let s = ac(G, G);
    let mut worst: f64 = 0.0;
    for theta in topological_grid(100) {
        let m = five_state_model(&ChainParams::new(N, 1.0, theta).unwrap(), &s).unwrap();
        let d = m.dark_state().unwrap();
        worst = worst.max((m.matrix * d.vector).amax());
    }
    outcome(
        worst <= DARKNESS_TOL,
        format!("max ‖H_sub Ψ_0‖∞ = {worst:.2e} (tol {DARKNESS_TOL:.0e})"),
    )
}

fn effective_equivalence() -> Outcome {
    let params = ChainParams::new(N, 1.0, 0.72 * PI).unwrap();
    let s = ac(G, G);
    let model = five_state_model(&params, &s).unwrap();
    let eig = EigenSystem::of_symmetric(lattice(&s).hamiltonian(params.theta()).matrix()).unwrap();
    let mut quintet: Vec<f64> = eig.smallest_magnitude(5).into_iter().map(|k| eig.values[k]).collect();
    quintet.sort_by(f64::total_cmp);
    let worst = quintet
        .iter()
        .zip(model.eigenvalues())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let dark = embed_dark_state(&model.dark_state().unwrap(), &params, &s).unwrap();
    let overlap = dark.dot(&eig.vector(eig.min_abs_index())).abs();
    outcome(
        worst < QUINTET_TOL && overlap >= DARK_OVERLAP_MIN,
        format!("max |ΔE| = {worst:.2e} (tol {QUINTET_TOL:.0e}), overlap = {overlap:.6} (min {DARK_OVERLAP_MIN})"),
    )
}

fn trivial_decoupling() -> Outcome {
    let l = lattice(&ac(G, G));
    let drive = Drive::hold(0.4 * PI, 5e3).unwrap();
    let traj = propagate(&l, &drive, &atom_excited(N), &Stepping::with_dt(0.1).sample_every(10)).unwrap();
    let min_atom = traj.series(l.basis().atom()).into_iter().fold(f64::INFINITY, f64::min);
    outcome(
        min_atom > TRIVIAL_ATOM_MIN,
        format!("min atom population = {min_atom:.6} (min {TRIVIAL_ATOM_MIN})"),
    )
}

fn equal_transfer() -> Outcome {
    let l = lattice(&ac(G, G));
    let traj = full_sweep(&l, &Stepping::with_dt(0.1));
    let (b, d, atom) = end_populations(&l, &traj);
    let pass = (b - 0.5).abs() <= HALF_TOL && (d - 0.5).abs() <= HALF_TOL && atom < ATOM_LEFTOVER_MAX;
    outcome(
        pass,
        format!("B_N = {b:.5}, D_N = {d:.5} (0.5 ± {HALF_TOL}), atom = {atom:.2e} (max {ATOM_LEFTOVER_MAX})"),
    )
}

fn ratio_control() -> Outcome {
    let l = lattice(&ac(G, 2.0 * G));
    let traj = full_sweep(&l, &Stepping::with_dt(0.1));
    let (b, d, _) = end_populations(&l, &traj);
    let ratio = d / b;
    let (eb, ed) = (b / (b + d), d / (b + d));
    let pass =
        (ratio / 4.0 - 1.0).abs() <= RATIO_REL_TOL && (eb - 0.2).abs() <= SPLIT_TOL && (ed - 0.8).abs() <= SPLIT_TOL;
    outcome(
        pass,
        format!(
            "D_N/B_N = {ratio:.4} (4 ± {:.0}%), split {eb:.4}/{ed:.4} (0.2/0.8 ± {SPLIT_TOL})",
            RATIO_REL_TOL * 100.0
        ),
    )
}

fn detuning_robustness() -> Outcome {
    let config = ExperimentConfig::resolve_str(
        ExperimentKind::FidelityVsDelta,
        None,
        &[
            "grid.delta.start=-0.4".into(),
            "grid.delta.end=0.4".into(),
            "grid.delta.points=81".into(),
            format!("sweep.omega={OMEGA}"),
        ],
    )
    .unwrap();
    let table = run_collect(&config).unwrap().remove(0);
    let deltas = table.column("delta").unwrap();
    let f = table.column("fidelity").unwrap();

    let inside: Vec<f64> = deltas
        .iter()
        .zip(&f)
        .filter(|(d, _)| d.abs() < DETUNING_WINDOW - 1e-12)
        .map(|(_, f)| *f)
        .collect();
    let min_inside = inside.iter().copied().fold(f64::INFINITY, f64::min);

    // beyond the window, F must fall as |Δ| grows on either side
    let right: Vec<f64> = deltas
        .iter()
        .zip(&f)
        .filter(|(d, _)| **d >= DETUNING_WINDOW - 1e-12)
        .map(|(_, f)| *f)
        .collect();
    let left: Vec<f64> = deltas
        .iter()
        .zip(&f)
        .rev()
        .filter(|(d, _)| **d <= -DETUNING_WINDOW + 1e-12)
        .map(|(_, f)| *f)
        .collect();
    let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let pass = !inside.is_empty() && min_inside > DETUNING_FIDELITY_MIN && monotone(&right) && monotone(&left);
    outcome(
        pass,
        format!(
            "{} points, min F(|Δ| < {DETUNING_WINDOW}) = {min_inside:.5} (min {DETUNING_FIDELITY_MIN}), \
             decreasing beyond: left {} right {}",
            deltas.len(),
            monotone(&left),
            monotone(&right)
        ),
    )
}

fn adiabatic_gap() -> Outcome {
    let g = hybridization_energy(&ChainParams::new(N, 1.0, 0.775 * PI).unwrap()).unwrap();
    let s = ac(G, G);
    let points = 100;
    let mut worst: f64 = 0.0;
    for k in 0..=points {
        let theta = (0.55 + 0.225 * k as f64 / points as f64) * PI;
        let params = ChainParams::new(N, 1.0, theta).unwrap();
        worst = worst.max(adiabaticity_parameter(&params, &s, OMEGA, None).unwrap());
    }
    let pass = g.abs() > HYBRIDIZATION_MIN && worst < LAMBDA_MAX;
    outcome(
        pass,
        format!(
            "|G(0.775π)| = {:.3e} (min {HYBRIDIZATION_MIN:.0e}), max Λ = {worst:.2e} (max {LAMBDA_MAX})",
            g.abs()
        ),
    )
}

fn disorder_contrast() -> Outcome {
    let l = lattice(&ac(G, G));
    let drive = Drive::Sweep(SweepSchedule::full(OMEGA).unwrap());
    let target = standard_target(l.scenario(), N).unwrap();
    let stepping = Stepping::with_dt(0.1);
    let clean = fidelity(full_sweep(&l, &stepping).final_state(), &target).unwrap();
    let mean = |xi_onsite: f64, xi_bond: f64| {
        let spec = DisorderSpec {
            xi_onsite,
            xi_bond,
            n_realizations: 20,
            master_seed: 2024,
        };
        let stats = ensemble_fidelity(&l, &drive, &atom_excited(N), &target, &stepping, &spec).unwrap();
        assert!(stats.failures.is_empty());
        stats.quantity("fidelity").unwrap().mean
    };
    let onsite = mean(1e-3, 0.0);
    let bond = mean(0.0, 1e-3);
    let pass = (bond - clean).abs() <= BOND_MEAN_TOL && onsite < bond;
    outcome(
        pass,
        format!("clean {clean:.5}, bond mean {bond:.5} (within {BOND_MEAN_TOL}), onsite mean {onsite:.5} (< bond)"),
    )
}

fn unitarity_and_convergence() -> Outcome {
    let l = lattice(&ac(G, G));
    let coarse = full_sweep(&l, &Stepping::with_dt(0.1).sample_every(100));
    let fine = full_sweep(&l, &Stepping::with_dt(0.05).sample_every(200));
    let drift = coarse.max_norm_drift().max(fine.max_norm_drift());

    let aligned = coarse.len() == fine.len() && coarse.times.iter().zip(&fine.times).all(|(a, b)| (a - b).abs() < 1e-6);
    let halving = coarse
        .populations
        .iter()
        .zip(&fine.populations)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max);

    let mut residual: f64 = 0.0;
    let spec = DisorderSpec {
        xi_onsite: 1e-3,
        xi_bond: 1e-3,
        n_realizations: 1,
        master_seed: 2024,
    };
    for n in [1, 4, 10] {
        let contacts = [
            CouplingScenario::new(Chain1Contact::A, 1, Chain2Contact::C, 1, G, G),
            CouplingScenario::new(Chain1Contact::B, n, Chain2Contact::D, 1, G, 2.0 * G).with_delta(0.05),
        ];
        let dirty = sample_realization(&spec, 0, n).unwrap();
        for s in &contacts {
            for r in [None, Some(&dirty)] {
                let l = Lattice::new(n, 1.0, s, r).unwrap();
                for k in 0..=100 {
                    let h = l.hamiltonian(PI * k as f64 / 100.0);
                    let eig = EigenSystem::of_symmetric(h.matrix()).unwrap();
                    residual = residual.max(eig.max_residual(h.matrix()));
                }
            }
        }
    }
    let pass = drift <= NORM_DRIFT_MAX && aligned && halving < DT_HALVING_MAX && residual <= RESIDUAL_MAX;
    outcome(
        pass,
        format!(
            "norm drift {drift:.2e} (max {NORM_DRIFT_MAX:.0e}), dt-halving {halving:.2e} over {} samples \
             (max {DT_HALVING_MAX:.0e}), eigen-residual {residual:.2e} (max {RESIDUAL_MAX:.0e})",
            coarse.len()
        ),
    )
}

fn scenario_symmetry() -> Outcome {
    let cases = [
        (
            "(A,D)",
            CouplingScenario::new(Chain1Contact::A, 1, Chain2Contact::D, N, G, G),
        ),
        (
            "(B,C)",
            CouplingScenario::new(Chain1Contact::B, N, Chain2Contact::C, 1, G, G),
        ),
        (
            "(B,D)",
            CouplingScenario::new(Chain1Contact::B, N, Chain2Contact::D, N, G, G),
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, s) in cases {
        let l = lattice(&s);
        let traj = full_sweep(&l, &Stepping::with_dt(0.1));
        let (p1, p2, _) = end_populations(&l, &traj);
        let (s1, s2) = s.receiving_sites(N);
        let ok = p1 + p2 > END_WEIGHT_MIN && (p1 - 0.5).abs() <= HALF_TOL && (p2 - 0.5).abs() <= HALF_TOL;
        let f = fidelity(traj.final_state(), &receiving_target(&s, N)).unwrap();
        pass &= ok;
        parts.push(format!("{name}: {s1} {p1:.4} + {s2} {p2:.4}, F {f:.4}"));
    }
    outcome(
        pass,
        format!("{} (total > {END_WEIGHT_MIN}, each 0.5 ± {HALF_TOL})", parts.join("; ")),
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        (
            1,
            "closed-form five-state spectrum",
            Duration::from_secs(1),
            closed_form_spectrum,
        ),
        (2, "dark-state darkness", Duration::from_secs(1), darkness),
        (
            3,
            "effective-model equivalence",
            Duration::from_secs(1),
            effective_equivalence,
        ),
        (
            4,
            "trivial-phase decoupling",
            Duration::from_secs(10),
            trivial_decoupling,
        ),
        (
            5,
            "adiabatic transfer, equal couplings",
            Duration::from_secs(60),
            equal_transfer,
        ),
        (6, "coupling-ratio control", Duration::from_secs(60), ratio_control),
        (7, "detuning robustness", Duration::from_secs(600), detuning_robustness),
        (8, "adiabatic-gap check", Duration::from_secs(5), adiabatic_gap),
        (9, "disorder contrast", Duration::from_secs(1200), disorder_contrast),
        (
            10,
            "unitarity and convergence",
            Duration::from_secs(60),
            unitarity_and_convergence,
        ),
        (11, "scenario symmetry", Duration::from_secs(60), scenario_symmetry),
    ];
    assert_eq!(
        ChainParams::new(N, 1.0, 0.775 * PI).unwrap().phase(),
        Phase::Topological
    );

    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    let _ = writeln!(err);
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = out.pass && in_time;
        if !pass {
            failed.push(id);
        }
        let _ = writeln!(
            err,
            "acceptance {id:>2} {} {name}: {} [{:.2} s, budget {} s{}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over budget" }
        );
    }
    assert!(failed.is_empty(), "failed acceptance criteria: {failed:?}");
}
