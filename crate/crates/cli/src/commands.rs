use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use serde::Serialize;
use serde_json::json;

use pfluid::fespace::{DiscreteField, FeError, Spaces};
use pfluid::mesh::unit_square_mesh;
use pfluid::pstructure::{equivalence_envelope, ENVELOPE_CSV_HEADER};
use pfluid::stepper::{run_simulation, StepError, Stepper, TimeGrid, Unforced};
use pfluid::verification::{
    bochner_check, convergence_study, error_record, euclidean, gronwall_check, harvest_gronwall, quasi_norm_suite,
    BochnerReport, GronwallReport, ManufacturedProblem, ManufacturedSolution, Separable, StudyConfig, StudyError,
    StudyReport, TimeFunction,
};
use pfluid::StressModel;

use crate::config::{BochnerFamily, Command, ConfigError, ForcingKind, RunConfig};
use crate::report::{report, Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    NonConvergence(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::CheckFailed(_) => 4,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::NonConvergence(_) => "non-convergence",
            CliError::CheckFailed(_) => "check-failed",
            CliError::Io(_) => "io",
            CliError::Internal(_) => "internal",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

impl From<StepError> for CliError {
    fn from(e: StepError) -> Self {
        match e {
            StepError::NonConvergence { .. } | StepError::LinearSolve { .. } => CliError::NonConvergence(e.to_string()),
            StepError::InvalidGrid(m) => CliError::Config(ConfigError::Invalid(m)),
            StepError::Fe(e) => e.into(),
        }
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Step { .. } => CliError::NonConvergence(e.to_string()),
            StudyError::Config(_) | StudyError::Coupling { .. } => CliError::Config(ConfigError::Invalid(e.to_string())),
            StudyError::Fe(e) => e.into(),
        }
    }
}

impl From<FeError> for CliError {
    fn from(e: FeError) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Files written by a run and a short text summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub text: String,
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Writer { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    fn finish(self, text: String) -> RunSummary {
        RunSummary { output_dir: self.dir, files: self.files, text }
    }
}

fn model_of(cfg: &RunConfig) -> Result<StressModel, CliError> {
    let m = cfg.model.ok_or_else(|| ConfigError::Invalid("model {p, delta} is required".into()))?;
    StressModel::new(m.p, m.delta, 2).map_err(|e| ConfigError::Invalid(e.to_string()).into())
}

fn mesh_size(n: usize) -> f64 {
    1.0 / n as f64
}

/// Fills defaults that depend on the command so the written config
/// reproduces the run on its own.
pub fn resolve(mut cfg: RunConfig) -> RunConfig {
    let d = &mut cfg.discretization;
    match cfg.command {
        Command::Simulate => {
            if d.steps.is_none() {
                let h = mesh_size(d.n.unwrap_or(1));
                let sigma = d.sigma.unwrap_or(0.25);
                d.steps = Some(((d.t_final.unwrap_or(1.0) / (sigma * h)).round() as usize).max(1));
            }
        }
        Command::Study | Command::GronwallCheck if cfg.gronwall.is_none() => {
            d.sigma.get_or_insert(0.25);
        }
        _ => {}
    }
    cfg
}

/// Executes a validated configuration, writing artifacts into `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let cfg = resolve(cfg.clone());
    let mut w = Writer::new(out)?;
    w.json("config.json", &cfg)?;
    match cfg.command {
        Command::Simulate => simulate(&cfg, w),
        Command::Study => study(&cfg, w),
        Command::Properties => properties(&cfg, w),
        Command::GronwallCheck => gronwall(&cfg, w),
        Command::BochnerCheck => bochner(&cfg, w),
    }
}

fn simulate(cfg: &RunConfig, mut w: Writer) -> Result<RunSummary, CliError> {
    let model = model_of(cfg)?;
    let d = &cfg.discretization;
    let n = d.n.expect("validated");
    let grid = TimeGrid::new(d.t_final.expect("validated"), d.steps.expect("resolved"))?;
    let spaces = Spaces::new(Arc::new(unit_square_mesh(n)), d.element)?;
    let vs = spaces.velocity.clone();
    let stepper = Stepper::new(spaces, model, cfg.solver);
    let ms = ManufacturedSolution::new(cfg.manufactured);
    info!("simulate: n = {n}, M = {}, p = {}, delta = {}", grid.steps(), model.p(), model.delta());
    let traj = match cfg.forcing {
        ForcingKind::Manufactured => run_simulation(&stepper, grid, &ManufacturedProblem::new(ms, model))?,
        ForcingKind::None => run_simulation(&stepper, grid, &Unforced(&ms))?,
    };
    w.write("trajectory.csv", &traj.to_csv())?;
    let last = DiscreteField::new(vs.clone(), traj.velocities.last().expect("nonempty").clone())?;
    w.write("velocity_final.csv", &last.to_csv())?;

    let mut table = Table::new(&["quantity", "value"]).with_title(format!(
        "simulate: p = {}, delta = {}, n = {n}, M = {}",
        model.p(),
        model.delta(),
        grid.steps()
    ));
    table.push(vec!["kappa".into(), grid.kappa().into()]);
    table.push(vec!["energy".into(), traj.energy().into()]);
    table.push(vec!["max divergence".into(), traj.divergence.iter().copied().fold(0.0, f64::max).into()]);
    let newton: usize = traj.diagnostics.iter().map(|d| d.newton_iterations).sum();
    let picard: usize = traj.diagnostics.iter().map(|d| d.picard_iterations).sum();
    table.push(vec!["Newton iterations".into(), newton.into()]);
    table.push(vec!["Picard iterations".into(), picard.into()]);
    let mut summary = json!({
        "kappa": grid.kappa(),
        "energy": traj.energy(),
        "newton_iterations": newton,
        "picard_iterations": picard,
    });
    if cfg.forcing == ForcingKind::Manufactured {
        let rec = error_record(&traj, &vs, &ms, &model);
        let mut csv = String::from("m,t_m,err_L2,err_F,err_Dp\n");
        for m in 0..traj.len() {
            csv.push_str(&format!(
                "{m},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                grid.node(m),
                rec.l2[m],
                rec.f_distance[m],
                rec.sym_grad_p[m]
            ));
        }
        w.write("errors.csv", &csv)?;
        table.push(vec!["err_L2max".into(), rec.l2_max().into()]);
        table.push(vec!["err_Fagg".into(), rec.f_agg().into()]);
        summary["err_L2max"] = json!(rec.l2_max());
        summary["err_Fagg"] = json!(rec.f_agg());
    }
    let text = report(&table);
    w.write("summary.txt", &text)?;
    w.json("report.json", &json!({ "config": cfg, "summary": summary }))?;
    Ok(w.finish(text))
}

fn study_config(cfg: &RunConfig) -> Result<StudyConfig, CliError> {
    let model = cfg.model.ok_or_else(|| ConfigError::Invalid("model {p, delta} is required".into()))?;
    let d = &cfg.discretization;
    Ok(StudyConfig {
        p: model.p,
        delta: model.delta,
        pair: d.element,
        levels: d.levels.clone().unwrap_or_default(),
        t_final: d.t_final.unwrap_or(1.0),
        sigma: cfg.sigma(),
        sigma0: d.sigma0,
        profile: cfg.manufactured,
        solver: cfg.solver,
        parallel: d.parallel,
    })
}

/// Fixed-width table of a study.
pub fn study_table(r: &StudyReport) -> Table {
    let mut t = Table::new(&["n", "h", "kappa", "err_L2max", "err_Fagg", "eoc_L2", "eoc_F", "ratio", "gronwall_mu4", "energy"])
        .with_title(format!(
            "study: p = {}, delta = {}{}",
            r.config.p,
            r.config.delta,
            if r.experimental { " (experimental)" } else { "" }
        ));
    for l in &r.levels {
        t.push(vec![
            l.n.into(),
            l.h.into(),
            l.kappa.into(),
            l.l2_max.into(),
            l.f_agg.into(),
            l.eoc_l2.into(),
            l.eoc_f.into(),
            l.ratio.into(),
            l.gronwall_mu4.into(),
            l.energy.into(),
        ]);
    }
    t
}

fn study(cfg: &RunConfig, mut w: Writer) -> Result<RunSummary, CliError> {
    let r = convergence_study(&study_config(cfg)?)?;
    w.write("study.csv", &r.to_csv())?;
    let text = format!(
        "{}least-squares rates: err_L2max {}, err_Fagg {}\n",
        report(&study_table(&r)),
        crate::report::sig6(r.rate_l2),
        crate::report::sig6(r.rate_f)
    );
    w.write("summary.txt", &text)?;
    w.json("report.json", &json!({ "config": cfg, "study": r }))?;
    Ok(w.finish(text))
}

const P_GRID: [f64; 4] = [1.3, 1.5, 1.8, 2.0];
const DELTA_GRID: [f64; 3] = [0.0, 0.01, 1.0];

fn properties(cfg: &RunConfig, mut w: Writer) -> Result<RunSummary, CliError> {
    let models: Vec<(f64, f64)> = match cfg.model {
        Some(m) => vec![(m.p, m.delta)],
        None => P_GRID.iter().flat_map(|&p| DELTA_GRID.iter().map(move |&d| (p, d))).collect(),
    };
    let pc = &cfg.properties;
    let mut env_csv = format!("{ENVELOPE_CSV_HEADER}\n");
    let mut qn_csv = String::from("p,delta,n,samples,min_ratio,max_ratio\n");
    let mut table = Table::new(&["p", "delta", "worst spread", "quasi-norm min"]).with_title("properties");
    let mut failures = Vec::new();
    let mut envelopes = Vec::new();
    for (p, delta) in models {
        let model = StressModel::new(p, delta, 3).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let env = equivalence_envelope(&model, pc.samples, cfg.seed, pc.range);
        for row in env.csv_rows() {
            env_csv.push_str(&row);
            env_csv.push('\n');
        }
        if env.min.iter().any(|m| !(*m > 0.0)) {
            failures.push(format!("envelope ratio not positive for p = {p}, delta = {delta}"));
        }
        let model2 = StressModel::new(p, delta, 2).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let mut qmin = f64::INFINITY;
        for &n in &pc.quasi_norm_levels {
            let q = quasi_norm_suite(&Arc::new(unit_square_mesh(n)), &model2, pc.quasi_norm_samples, cfg.seed)?;
            qn_csv.push_str(&format!(
                "{p},{delta},{n},{},{:.12e},{:.12e}\n",
                q.samples, q.min_ratio, q.max_ratio
            ));
            if !(q.min_ratio > 0.0) {
                failures.push(format!("quasi-norm ratio not positive for p = {p}, delta = {delta}, n = {n}"));
            }
            qmin = qmin.min(q.min_ratio);
        }
        let spread = env.spread().iter().copied().fold(0.0, f64::max);
        table.push(vec![p.into(), delta.into(), spread.into(), Cell::from(qmin)]);
        envelopes.push(env);
    }
    w.write("envelopes.csv", &env_csv)?;
    w.write("quasi_norm.csv", &qn_csv)?;
    let text = report(&table);
    w.write("summary.txt", &text)?;
    w.json("report.json", &json!({ "config": cfg, "envelopes": envelopes, "failures": failures }))?;
    if !failures.is_empty() {
        return Err(CliError::CheckFailed(failures.join("; ")));
    }
    Ok(w.finish(text))
}

fn gronwall(cfg: &RunConfig, mut w: Writer) -> Result<RunSummary, CliError> {
    let mut table = Table::new(&["level", "h", "kappa", "mu4", "max_b", "hypotheses", "stepwise", "conclusion"])
        .with_title("gronwall-check");
    let flag = |b: bool| Cell::from(if b { "ok" } else { "fail" });
    let mut csv = String::from("level,h,kappa,mu4,max_b,hypotheses_ok,stepwise_ok,conclusion_ok\n");
    let mut row = |t: &mut Table, level: &str, h: f64, k: f64, r: &GronwallReport| {
        csv.push_str(&format!(
            "{level},{h:.12e},{k:.12e},{:.12e},{:.12e},{},{},{}\n",
            r.mu4, r.max_b, r.hypotheses_ok, r.stepwise_ok, r.conclusion_ok
        ));
        t.push(vec![
            level.into(),
            h.into(),
            k.into(),
            r.mu4.into(),
            r.max_b.into(),
            flag(r.hypotheses_ok),
            flag(r.stepwise_ok),
            flag(r.conclusion_ok),
        ]);
    };
    let mut reports = Vec::new();
    let failed = if let Some(data) = &cfg.gronwall {
        let r = gronwall_check(data);
        row(&mut table, "-", data.h, data.kappa, &r);
        let failed = !(r.hypotheses_ok && r.stepwise_ok && r.conclusion_ok);
        reports.push(r);
        failed
    } else {
        let sc = study_config(cfg)?;
        let study = convergence_study(&sc)?;
        let mut failed = false;
        for l in &study.levels {
            let r = gronwall_check(&harvest_gronwall(&l.record, sc.p, sc.delta, l.h));
            row(&mut table, &l.n.to_string(), l.h, l.kappa, &r);
            failed |= !(r.hypotheses_ok && r.conclusion_ok);
            reports.push(r);
        }
        failed
    };
    w.write("gronwall.csv", &csv)?;
    let text = report(&table);
    w.write("summary.txt", &text)?;
    w.json("report.json", &json!({ "config": cfg, "reports": reports }))?;
    if failed {
        return Err(CliError::CheckFailed("Gronwall inequalities violated, see gronwall.csv".into()));
    }
    Ok(w.finish(text))
}

fn bochner(cfg: &RunConfig, mut w: Writer) -> Result<RunSummary, CliError> {
    let t_final = cfg.discretization.t_final.expect("validated");
    let g = vec![1.0, -2.0, 0.5];
    let constant = Separable { profile: |_t: f64| (1.0, 0.0), g: g.clone() };
    let linear = Separable { profile: |t: f64| (t, 1.0), g: g.clone() };
    let sine = Separable { profile: |t: f64| ((2.0 * PI * t).sin(), 2.0 * PI * (2.0 * PI * t).cos()), g };
    let mut csv = String::from("family,tau,M,kappa,lhs,rhs,ratio,holds\n");
    let mut table = Table::new(&["family", "M", "kappa", "lhs", "rhs", "ratio", "holds"]).with_title("bochner-check");
    let tau = serde_json::to_value(cfg.bochner.tau).expect("serializable");
    let tau = tau.as_str().unwrap_or("right");
    let mut results: Vec<(BochnerFamily, BochnerReport)> = Vec::new();
    for &family in &cfg.bochner.families {
        let f: &dyn TimeFunction = match family {
            BochnerFamily::Constant => &constant,
            BochnerFamily::Linear => &linear,
            BochnerFamily::Sine => &sine,
        };
        let name = serde_json::to_value(family).expect("serializable");
        let name = name.as_str().unwrap_or("?").to_string();
        for &steps in &cfg.bochner.steps {
            let r = bochner_check(f, &TimeGrid::new(t_final, steps)?, cfg.bochner.tau, &euclidean);
            csv.push_str(&format!(
                "{name},{tau},{steps},{:.12e},{:.12e},{:.12e},{:.12e},{}\n",
                r.kappa,
                r.lhs,
                r.rhs,
                r.ratio(),
                r.holds
            ));
            table.push(vec![
                name.as_str().into(),
                steps.into(),
                r.kappa.into(),
                r.lhs.into(),
                r.rhs.into(),
                r.ratio().into(),
                (if r.holds { "yes" } else { "no" }).into(),
            ]);
            results.push((family, r));
        }
    }
    w.write("bochner.csv", &csv)?;
    let text = report(&table);
    w.write("summary.txt", &text)?;
    w.json("report.json", &json!({ "config": cfg, "results": results }))?;
    if results.iter().any(|(_, r)| !r.holds) {
        return Err(CliError::CheckFailed("Bochner estimate violated, see bochner.csv".into()));
    }
    Ok(w.finish(text))
}
