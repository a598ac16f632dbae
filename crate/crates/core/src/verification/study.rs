use std::sync::Arc;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fespace::{ElementPair, FeError, Spaces};
use crate::mesh::unit_square_mesh;
use crate::pstructure::StressModel;
use crate::stepper::{run_simulation, SolverOptions, StepError, Stepper, TimeGrid, Trajectory};

use super::{error_record, gronwall_check, harvest_gronwall, ErrorRecord, ManufacturedProblem, ManufacturedSolution, TimeProfile};

/// Smallest `p` a study accepts; values in `[P_EXPERIMENTAL, 1.6]` are flagged.
pub const P_EXPERIMENTAL: f64 = 1.55;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StudyError {
    #[error("invalid study configuration: {0}")]
    Config(String),
    #[error("level n = {n}: coupling h^(4/p') = {lhs:e} exceeds sigma0 * kappa = {rhs:e}")]
    Coupling { n: usize, lhs: f64, rhs: f64 },
    #[error("level n = {n}: {source}")]
    Step { n: usize, source: StepError },
    #[error(transparent)]
    Fe(#[from] FeError),
}

/// Space-time refinement study with `kappa ~ sigma * h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StudyConfig {
    pub p: f64,
    pub delta: f64,
    pub pair: ElementPair,
    /// Subdivisions per side of the unit square, coarse to fine.
    pub levels: Vec<usize>,
    pub t_final: f64,
    pub sigma: f64,
    pub sigma0: f64,
    pub profile: TimeProfile,
    pub solver: SolverOptions,
    /// Run levels concurrently.
    pub parallel: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            p: 1.8,
            delta: 0.1,
            pair: ElementPair::Mini,
            levels: vec![4, 8, 16],
            t_final: 1.0,
            sigma: 0.25,
            sigma0: 2.0,
            profile: TimeProfile::SmoothPeriodic,
            solver: SolverOptions::default(),
            parallel: true,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), StudyError> {
        let bad = |m: String| Err(StudyError::Config(m));
        if !(self.p > 1.0 && self.p <= 2.0) {
            return bad(format!("p must lie in (1,2], got {}", self.p));
        }
        if self.p < P_EXPERIMENTAL {
            return bad(format!("studies need p >= {P_EXPERIMENTAL}, got {}", self.p));
        }
        if !(self.delta >= 0.0) {
            return bad(format!("delta must be nonnegative, got {}", self.delta));
        }
        if self.levels.len() < 3 {
            return bad(format!("a study needs at least 3 levels, got {}", self.levels.len()));
        }
        if self.levels.iter().any(|&n| n == 0) || self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return bad("levels must be positive and strictly increasing".into());
        }
        if !(self.t_final > 0.0) {
            return bad(format!("T must be positive, got {}", self.t_final));
        }
        if !(self.sigma > 0.0 && self.sigma0 > 0.0) {
            return bad("sigma and sigma0 must be positive".into());
        }
        Ok(())
    }

    /// True when `p` lies outside the range covered by the error estimate.
    pub fn experimental(&self) -> bool {
        self.p <= 1.6
    }
}

/// Outcome of one refinement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResult {
    pub n: usize,
    pub h: f64,
    pub kappa: f64,
    pub steps: usize,
    pub l2_max: f64,
    pub f_agg: f64,
    /// `(max_m a_m^2 + kappa sum F^2) / (h^2 + kappa^2)`.
    pub ratio: f64,
    pub eoc_l2: Option<f64>,
    pub eoc_f: Option<f64>,
    pub gronwall_mu4: f64,
    pub energy: f64,
    pub coupling_lhs: f64,
    pub coupling_rhs: f64,
    pub newton_iterations: usize,
    pub picard_iterations: usize,
    #[serde(skip)]
    pub record: ErrorRecord,
}

impl LevelResult {
    pub fn coupling_ok(&self) -> bool {
        self.coupling_lhs <= self.coupling_rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub experimental: bool,
    pub levels: Vec<LevelResult>,
    pub rate_l2: f64,
    pub rate_f: f64,
}

pub const STUDY_CSV_HEADER: &str = "p,delta,level,h,kappa,err_L2max,err_Fagg,eoc_L2,eoc_F,gronwall_mu4,energy";

impl StudyReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{STUDY_CSV_HEADER}\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        for l in &self.levels {
            out.push_str(&format!(
                "{},{},{},{:.10e},{:.10e},{:.10e},{:.10e},{},{},{:.10e},{:.10e}\n",
                self.config.p,
                self.config.delta,
                l.n,
                l.h,
                l.kappa,
                l.l2_max,
                l.f_agg,
                opt(l.eoc_l2),
                opt(l.eoc_f),
                l.gronwall_mu4,
                l.energy
            ));
        }
        out
    }
}

/// `log(e1 / e2) / log(h1 / h2)`.
pub fn eoc(e1: f64, e2: f64, h1: f64, h2: f64) -> f64 {
    (e1 / e2).ln() / (h1 / h2).ln()
}

/// Slope of the least-squares line through `(log h, log e)`.
pub fn least_squares_rate(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Solves the manufactured problem on an `n x n` mesh with `steps` time steps.
pub fn run_manufactured(
    model: &StressModel,
    pair: ElementPair,
    profile: TimeProfile,
    solver: &SolverOptions,
    n: usize,
    t_final: f64,
    steps: usize,
) -> Result<(Trajectory, ErrorRecord, f64), StudyError> {
    let mesh = Arc::new(unit_square_mesh(n));
    let h = mesh.quality().map_err(|e| StudyError::Config(e.to_string()))?.h_max;
    let spaces = Spaces::new(mesh, pair)?;
    let vs = spaces.velocity.clone();
    let stepper = Stepper::new(spaces, *model, solver.clone());
    let ms = ManufacturedSolution::new(profile);
    let data = ManufacturedProblem::new(ms, *model);
    let grid = TimeGrid::new(t_final, steps).map_err(|e| StudyError::Config(e.to_string()))?;
    let traj = run_simulation(&stepper, grid, &data).map_err(|source| StudyError::Step { n, source })?;
    let record = error_record(&traj, &vs, &ms, model);
    Ok((traj, record, h))
}

fn run_level(cfg: &StudyConfig, model: &StressModel, n: usize) -> Result<LevelResult, StudyError> {
    let h = unit_square_mesh(n).quality().map_err(|e| StudyError::Config(e.to_string()))?.h_max;
    let steps = ((cfg.t_final / (cfg.sigma * h)).round() as usize).max(1);
    let (traj, record, h) = run_manufactured(model, cfg.pair, cfg.profile, &cfg.solver, n, cfg.t_final, steps)?;
    let kappa = record.kappa;
    let p_conj = cfg.p / (cfg.p - 1.0);
    let gd = harvest_gronwall(&record, cfg.p, cfg.delta, h);
    let gr = gronwall_check(&gd);
    let level = LevelResult {
        n,
        h,
        kappa,
        steps,
        l2_max: record.l2_max(),
        f_agg: record.f_agg(),
        ratio: record.total_sq() / (h * h + kappa * kappa),
        eoc_l2: None,
        eoc_f: None,
        gronwall_mu4: gr.mu4,
        energy: traj.energy(),
        coupling_lhs: h.powf(4.0 / p_conj),
        coupling_rhs: cfg.sigma0 * kappa,
        newton_iterations: traj.diagnostics.iter().map(|d| d.newton_iterations).sum(),
        picard_iterations: traj.diagnostics.iter().map(|d| d.picard_iterations).sum(),
        record,
    };
    info!(
        "level n = {n}: h = {h:.4e}, kappa = {kappa:.4e}, L2max = {:.4e}, Fagg = {:.4e}",
        level.l2_max, level.f_agg
    );
    Ok(level)
}

/// Runs every level, computes EOCs and checks the `h`-`kappa` coupling.
///
/// The coupling only has to hold for `h` below some threshold, so a
/// violation on coarser levels is logged while one on the finest level is an
/// error, unless the configuration is experimental.
pub fn convergence_study(cfg: &StudyConfig) -> Result<StudyReport, StudyError> {
    cfg.validate()?;
    let model = StressModel::new(cfg.p, cfg.delta, 2).map_err(|e| StudyError::Config(e.to_string()))?;
    let results: Vec<Result<LevelResult, StudyError>> = if cfg.parallel {
        cfg.levels.par_iter().map(|&n| run_level(cfg, &model, n)).collect()
    } else {
        cfg.levels.iter().map(|&n| run_level(cfg, &model, n)).collect()
    };
    let mut levels = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    for i in 1..levels.len() {
        let (a, b) = (&levels[i - 1], &levels[i]);
        let eoc_l2 = eoc(a.l2_max, b.l2_max, a.h, b.h);
        let eoc_f = eoc(a.f_agg, b.f_agg, a.h, b.h);
        levels[i].eoc_l2 = Some(eoc_l2);
        levels[i].eoc_f = Some(eoc_f);
    }
    let experimental = cfg.experimental();
    for (i, l) in levels.iter().enumerate() {
        if l.coupling_ok() {
            continue;
        }
        if i + 1 == levels.len() && !experimental {
            return Err(StudyError::Coupling { n: l.n, lhs: l.coupling_lhs, rhs: l.coupling_rhs });
        }
        warn!("level n = {}: coupling h^(4/p') <= sigma0 kappa violated ({:.3e} > {:.3e})", l.n, l.coupling_lhs, l.coupling_rhs);
    }
    let hs: Vec<f64> = levels.iter().map(|l| l.h).collect();
    let rate_l2 = least_squares_rate(&hs, &levels.iter().map(|l| l.l2_max).collect::<Vec<_>>());
    let rate_f = least_squares_rate(&hs, &levels.iter().map(|l| l.f_agg).collect::<Vec<_>>());
    Ok(StudyReport { config: cfg.clone(), experimental, levels, rate_l2, rate_f })
}

/// Refinement in time only on a fixed mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalRow {
    pub steps: usize,
    pub kappa: f64,
    pub l2_max: f64,
    pub f_agg: f64,
    pub eoc_l2: Option<f64>,
}

/// Halves `kappa` through `steps` on the `n x n` mesh and reports the EOC of
/// `max_m ||u_h^m - u(t_m)||_2` in `kappa`.
pub fn temporal_study(
    model: &StressModel,
    pair: ElementPair,
    profile: TimeProfile,
    solver: &SolverOptions,
    n: usize,
    t_final: f64,
    steps: &[usize],
) -> Result<Vec<TemporalRow>, StudyError> {
    let rows: Vec<Result<TemporalRow, StudyError>> = steps
        .par_iter()
        .map(|&m| {
            let (_, rec, _) = run_manufactured(model, pair, profile, solver, n, t_final, m)?;
            Ok(TemporalRow { steps: m, kappa: rec.kappa, l2_max: rec.l2_max(), f_agg: rec.f_agg(), eoc_l2: None })
        })
        .collect();
    let mut rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    for i in 1..rows.len() {
        let (a, b) = (&rows[i - 1], &rows[i]);
        rows[i].eoc_l2 = Some(eoc(a.l2_max, b.l2_max, a.kappa, b.kappa));
    }
    Ok(rows)
}
