//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfluid::fespace::{ElementKind, ElementPair, FESpace, Spaces};
use pfluid::mesh::unit_square_mesh;
use pfluid::pstructure::{equivalence_envelope, ShiftedNFunction};
use pfluid::stepper::{run_simulation, ProblemData, SolverOptions, StepProblem, Stepper, Strategy, InitialGuess, TimeGrid, Unforced};
use pfluid::verification::{
    bochner_check, convergence_study, euclidean, gate_rule, gronwall_check, harvest_gronwall, least_squares_rate,
    quasi_norm_suite, temporal_study, weak_residual_gate, GronwallData, ManufacturedProblem, ManufacturedSolution,
    Separable, StudyConfig, StudyReport, TauChoice, TimeProfile,
};
use pfluid::StressModel;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const P_GRID: [f64; 4] = [1.3, 1.5, 1.8, 2.0];
const DELTA_GRID: [f64; 3] = [0.0, 0.01, 1.0];

fn algebra_envelopes() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut all_positive = true;
    let mut identity_err: f64 = 0.0;
    for p in P_GRID {
        for delta in DELTA_GRID {
            let model = StressModel::new(p, delta, 3).unwrap();
            let env = equivalence_envelope(&model, 10_000, 42, 10.0);
            all_positive &= env.min.iter().all(|m| *m > 0.0);
            worst = env.spread().iter().copied().fold(worst, f64::max);
            if p == 2.0 && delta == 0.0 {
                identity_err = (env.min[0] - 1.0).abs().max((env.max[0] - 1.0).abs());
            }
        }
    }
    let pass = all_positive && worst <= 100.0 && identity_err <= 1e-12;
    outcome(pass, format!("worst max/min {worst:.3}, p=2 delta=0 first ratio off by {identity_err:.1e}"))
}

fn fenchel_young() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (mut worst_violation, mut worst_equality): (f64, f64) = (f64::NEG_INFINITY, 0.0);
    for i in 0..10_000 {
        let p = P_GRID[i % 4];
        let delta = DELTA_GRID[(i / 4) % 3];
        let a = rng.gen_range(0.0..5.0);
        let phi = ShiftedNFunction::new(StressModel::new(p, delta, 3).unwrap(), a).unwrap();
        let t: f64 = rng.gen_range(0.0..10.0);
        let s: f64 = rng.gen_range(0.0..10.0);
        let young = phi.value(t).unwrap() + phi.conjugate(s).unwrap();
        worst_violation = worst_violation.max(t * s - young);
        let st = phi.derivative(t);
        let eq = phi.value(t).unwrap() + phi.conjugate(st).unwrap() - t * st;
        worst_equality = worst_equality.max(eq.abs());
    }
    let pass = worst_violation <= 1e-8 && worst_equality <= 1e-8;
    outcome(pass, format!("max ts - (phi + phi*) = {worst_violation:.2e}, equality defect {worst_equality:.2e}"))
}

fn quasi_norm_envelope() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [1.5, 1.8] {
        for delta in [0.0, 0.1] {
            let model = StressModel::new(p, delta, 2).unwrap();
            let mins: Vec<f64> = [8, 16]
                .iter()
                .map(|&n| quasi_norm_suite(&Arc::new(unit_square_mesh(n)), &model, 200, 7).unwrap().min_ratio)
                .collect();
            let drift = mins[0].max(mins[1]) / mins[0].min(mins[1]);
            pass &= mins.iter().all(|m| *m > 0.0) && drift <= 3.0;
            parts.push(format!("({p},{delta}) min {:.3}/{:.3}", mins[0], mins[1]));
        }
    }
    outcome(pass, parts.join(", "))
}

const STUDY_MODELS: [(f64, f64); 3] = [(2.0, 1.0), (1.8, 0.1), (1.7, 0.05)];

fn weak_residual() -> Outcome {
    let space = FESpace::new(Arc::new(unit_square_mesh(16)), ElementKind::P1Bubble, 2).unwrap();
    let rule = gate_rule();
    let ms = ManufacturedSolution::smooth_periodic();
    let mut worst: f64 = 0.0;
    for (p, delta) in STUDY_MODELS {
        let model = StressModel::new(p, delta, 2).unwrap();
        for t in [0.0, 0.3, 0.77] {
            worst = worst.max(weak_residual_gate(&space, &ms, &model, t, &rule, 100, 42).max_abs);
        }
    }
    outcome(worst <= 1e-10, format!("max |R(v)| = {worst:.2e} over 100 random fields, n = 16"))
}

fn study_reports() -> Vec<StudyReport> {
    STUDY_MODELS
        .iter()
        .map(|&(p, delta)| {
            let cfg = StudyConfig { p, delta, levels: vec![4, 8, 16], sigma: 0.25, ..Default::default() };
            convergence_study(&cfg).expect("study runs")
        })
        .collect()
}

fn coupled_rates(reports: &[StudyReport]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in reports {
        let last = r.levels.last().unwrap();
        let eoc = last.eoc_f.unwrap();
        let ratios: Vec<f64> = r.levels.iter().map(|l| l.ratio).collect();
        let nonincreasing = ratios.windows(2).all(|w| w[1] <= w[0]);
        let drift = ratios.iter().copied().fold(0.0, f64::max) / ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let ok = (0.85..=2.2).contains(&eoc) && (nonincreasing || drift <= 3.0);
        pass &= ok;
        parts.push(format!("({},{}) eoc_F {eoc:.3} ratio drift {drift:.3}", r.config.p, r.config.delta));
    }
    outcome(pass, parts.join(", "))
}

fn temporal_rate() -> Outcome {
    let model = StressModel::new(1.8, 0.1, 2).unwrap();
    let rows = temporal_study(
        &model,
        ElementPair::TaylorHood,
        TimeProfile::TimeDominant,
        &SolverOptions::default(),
        16,
        1.0,
        &[8, 16, 32, 64],
    )
    .unwrap();
    let eocs: Vec<f64> = rows.iter().filter_map(|r| r.eoc_l2).collect();
    let pass = eocs.iter().all(|e| (0.8..=1.3).contains(e));
    let shown: Vec<String> = eocs.iter().map(|e| format!("{e:.3}")).collect();
    outcome(pass, format!("Taylor-Hood, EOC in kappa {}", shown.join(" ")))
}

fn stability() -> Outcome {
    let ms = ManufacturedSolution::smooth_periodic();
    let mut pass = true;
    let mut energies = Vec::new();
    let mut bound = 0.0;
    for steps in [8, 16, 32] {
        let spaces = Spaces::new(Arc::new(unit_square_mesh(8)), ElementPair::Mini).unwrap();
        let st = Stepper::new(spaces, StressModel::new(1.8, 0.1, 2).unwrap(), SolverOptions::default());
        let traj = run_simulation(&st, TimeGrid::new(1.0, steps).unwrap(), &Unforced(&ms)).unwrap();
        for m in 1..traj.len() {
            pass &= traj.kinetic[m].sqrt() <= traj.kinetic[m - 1].sqrt() + 1e-12;
        }
        // kappa sum ||F(Du^m)||^2 <= ||u^0||^2 / 2 from the discrete energy identity.
        bound = 1.5 * traj.kinetic[0];
        pass &= traj.energy() <= bound * (1.0 + 1e-12);
        energies.push(traj.energy());
    }
    let shown: Vec<String> = energies.iter().map(|e| format!("{e:.4e}")).collect();
    outcome(pass, format!("energy {} <= {bound:.4e}", shown.join(" ")))
}

fn gronwall(reports: &[StudyReport]) -> (Outcome, Duration) {
    let start = Instant::now();
    let zero = gronwall_check(&GronwallData::zeros(1.8, 0.1, 0.25, 10));
    let zero_ok = zero.hypotheses_ok && zero.stepwise_ok && zero.conclusion_ok && zero.mu4 == 0.0;
    let mut violation = GronwallData::zeros(1.8, 0.1, 0.25, 8);
    violation.a = (0..=8).map(|m| 1e-3 * 2f64.powi(m)).collect();
    let flagged = !gronwall_check(&violation).stepwise_ok;
    let mut harvest_ok = true;
    let mut worst_drift: f64 = 0.0;
    for r in reports {
        let mu4: Vec<f64> = r
            .levels
            .iter()
            .map(|l| {
                let rep = gronwall_check(&harvest_gronwall(&l.record, r.config.p, r.config.delta, l.h));
                harvest_ok &= rep.hypotheses_ok && rep.conclusion_ok;
                rep.mu4
            })
            .collect();
        harvest_ok &= mu4.iter().all(|m| m.is_finite() && *m > 0.0);
        let drift = mu4.iter().copied().fold(0.0, f64::max) / mu4.iter().copied().fold(f64::INFINITY, f64::min);
        worst_drift = worst_drift.max(drift);
    }
    let pass = zero_ok && flagged && harvest_ok && worst_drift <= 2.0;
    (
        outcome(pass, format!("zero data ok {zero_ok}, violation flagged {flagged}, mu4 drift {worst_drift:.3}")),
        start.elapsed(),
    )
}

fn bochner() -> Outcome {
    let g = vec![1.0, -2.0, 0.5];
    let constant = Separable { profile: |_t: f64| (1.0, 0.0), g: g.clone() };
    let linear = Separable { profile: |t: f64| (t, 1.0), g: g.clone() };
    let sine = Separable { profile: |t: f64| ((2.0 * PI * t).sin(), 2.0 * PI * (2.0 * PI * t).cos()), g };
    let mut pass = true;
    let mut slopes = Vec::new();
    for (name, f) in [("constant", &constant as &dyn pfluid::verification::TimeFunction), ("linear", &linear), ("sine", &sine)] {
        let mut kappas = Vec::new();
        let mut lhs = Vec::new();
        for steps in [4, 8, 16] {
            let r = bochner_check(f, &TimeGrid::new(1.0, steps).unwrap(), TauChoice::Right, &euclidean);
            pass &= r.holds;
            kappas.push(r.kappa);
            lhs.push(r.lhs);
        }
        if name != "constant" {
            let slope = least_squares_rate(&kappas, &lhs);
            pass &= (slope - 2.0).abs() <= 0.15;
            slopes.push(format!("{name} {slope:.3}"));
        } else {
            pass &= lhs.iter().all(|v| *v == 0.0);
        }
    }
    outcome(pass, format!("LHS <= RHS everywhere, slopes {}", slopes.join(", ")))
}

fn uniqueness() -> Outcome {
    let spaces = Spaces::new(Arc::new(unit_square_mesh(8)), ElementPair::Mini).unwrap();
    let model = StressModel::new(1.6, 0.1, 2).unwrap();
    let base = Stepper::new(spaces, model, SolverOptions::default());
    let data = ManufacturedProblem::new(ManufacturedSolution::smooth_periodic(), model);
    let grid = TimeGrid::new(1.0, 32).unwrap();
    let traj = run_simulation(&base, grid, &data).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let variants = [
        SolverOptions { strategy: Strategy::Picard, ..Default::default() },
        SolverOptions { initial_guess: InitialGuess::Zero, ..Default::default() },
    ];
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let m = rng.gen_range(1..=grid.steps());
        let t = grid.node(m);
        let f = |x: &[f64; 2]| data.forcing(t, x);
        let problem = StepProblem { u_prev: &traj.velocities[m - 1], t, kappa: grid.kappa(), forcing: &f };
        let reference = base.solve_step(&problem).unwrap();
        for opts in variants {
            let other = base.clone().with_options(opts).solve_step(&problem).unwrap();
            for (a, b) in reference.u.iter().chain(&reference.q).zip(other.u.iter().chain(&other.q)) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    outcome(worst <= 1e-8, format!("max difference {worst:.2e} over 5 steps, p = 1.6"))
}

fn report(id: usize, name: &str, limit: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = run();
    report_timed(id, name, limit, out, start.elapsed())
}

fn report_timed(id: usize, name: &str, limit: Duration, out: Outcome, elapsed: Duration) -> bool {
    let pass = out.pass && elapsed <= limit;
    println!(
        "[{}] {id:>2} {name}: {} ({:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = Vec::new();
    results.push(report(1, "algebra envelopes", secs(10), algebra_envelopes));
    results.push(report(2, "Fenchel-Young", secs(5), fenchel_young));
    results.push(report(3, "quasi-norm envelope", secs(30), quasi_norm_envelope));
    results.push(report(4, "weak residual gate", secs(10), weak_residual));
    let start = Instant::now();
    let reports = study_reports();
    let rates = coupled_rates(&reports);
    results.push(report_timed(5, "coupled space-time rate", secs(600), rates, start.elapsed()));
    results.push(report(6, "temporal rate", secs(300), temporal_rate));
    results.push(report(7, "stability", secs(60), stability));
    let (out, elapsed) = gronwall(&reports);
    results.push(report_timed(8, "Gronwall checker", secs(5), out, elapsed));
    results.push(report(9, "Bochner checker", secs(5), bochner));
    results.push(report(10, "uniqueness", secs(60), uniqueness));
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
