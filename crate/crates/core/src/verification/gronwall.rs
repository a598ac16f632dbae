use serde::{Deserialize, Serialize};

use super::ErrorRecord;

/// Sequences and constants of the discrete Gronwall inequality.
///
/// `a`, `b` are indexed `0..=M`; `r`, `s`, `rho`, `sigma` are indexed
/// `1..=M` and stored at positions `0..M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GronwallData {
    pub p: f64,
    pub kappa: f64,
    pub h: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    pub mu0: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub mu5: f64,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub theta: f64,
}

impl GronwallData {
    /// All sequences zero, unit constants.
    pub fn zeros(p: f64, kappa: f64, h: f64, steps: usize) -> Self {
        GronwallData {
            p,
            kappa,
            h,
            a: vec![0.0; steps + 1],
            b: vec![0.0; steps + 1],
            r: vec![0.0; steps],
            s: vec![0.0; steps],
            rho: vec![0.0; steps],
            sigma: vec![0.0; steps],
            mu0: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            mu3: 1.0,
            mu5: 1.0,
            lambda: 0.0,
            big_lambda: 1.0,
            theta: 1.0,
        }
    }

    pub fn steps(&self) -> usize {
        self.a.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    pub hypotheses_ok: bool,
    /// Every step satisfies the inequality with the `mu2 b_{m-1} b_m` coupling.
    pub first_step_form_ok: bool,
    /// Every step satisfies the inequality with the `mu3 b_m b_{m-1}^(1-theta) a_{m-1}^theta` coupling.
    pub second_step_form_ok: bool,
    pub stepwise_ok: bool,
    pub conclusion_ok: bool,
    /// Smallest `mu4` for which the final estimate holds.
    pub mu4: f64,
    pub max_b: f64,
    /// Per-step `rhs - lhs` of the two step inequalities.
    pub first_margins: Vec<f64>,
    pub second_margins: Vec<f64>,
    /// Slack of each hypothesis, `mu0 * bound - value`.
    pub hypothesis_margins: Vec<f64>,
    pub problems: Vec<String>,
}

fn degenerate_power(lambda: f64, b: f64, p: f64) -> f64 {
    if lambda == 0.0 && b == 0.0 {
        0.0
    } else {
        (lambda + b).powf(p - 2.0) * b * b
    }
}

/// Checks hypotheses, both step inequalities and the conclusion numerically.
pub fn gronwall_check(data: &GronwallData) -> GronwallReport {
    let mut problems = Vec::new();
    let m_steps = data.steps();
    let d = data;
    if d.b.len() != m_steps + 1 {
        problems.push(format!("b has length {}, expected {}", d.b.len(), m_steps + 1));
    }
    for (name, seq) in [("r", &d.r), ("s", &d.s), ("rho", &d.rho), ("sigma", &d.sigma)] {
        if seq.len() != m_steps {
            problems.push(format!("{name} has length {}, expected {m_steps}", seq.len()));
        }
    }
    for (name, seq) in [("a", &d.a), ("b", &d.b), ("r", &d.r), ("s", &d.s), ("rho", &d.rho), ("sigma", &d.sigma)] {
        if seq.iter().any(|v| !(*v >= 0.0)) {
            problems.push(format!("{name} has a negative or non-finite entry"));
        }
    }
    if !(d.theta > 0.0 && d.theta <= 1.0) {
        problems.push(format!("theta = {} outside (0, 1]", d.theta));
    }
    if !(d.lambda >= 0.0 && d.lambda <= d.big_lambda) {
        problems.push(format!("lambda = {} outside [0, Lambda = {}]", d.lambda, d.big_lambda));
    }
    if !problems.is_empty() {
        return GronwallReport {
            hypotheses_ok: false,
            first_step_form_ok: false,
            second_step_form_ok: false,
            stepwise_ok: false,
            conclusion_ok: false,
            mu4: f64::NAN,
            max_b: f64::NAN,
            first_margins: Vec::new(),
            second_margins: Vec::new(),
            hypothesis_margins: Vec::new(),
            problems,
        };
    }

    let (k, h, p) = (d.kappa, d.h, d.p);
    let ksum = |v: &[f64]| k * v.iter().map(|x| x * x).sum::<f64>();
    let h2 = h * h;
    let hypothesis_margins = vec![
        d.mu0 * h2 - d.a[0] * d.a[0],
        d.mu0 * h2 - d.b[0] * d.b[0],
        d.mu0 * h2 - ksum(&d.r),
        d.mu0 * h2 - ksum(&d.s),
        d.mu0 * k * k - ksum(&d.rho),
        d.mu0 * k * k - ksum(&d.sigma),
    ];
    let hypotheses_ok = hypothesis_margins.iter().all(|m| *m >= 0.0) && h * d.mu0.sqrt() < 1.0;

    let mut first_margins = Vec::with_capacity(m_steps);
    let mut second_margins = Vec::with_capacity(m_steps);
    for m in 1..=m_steps {
        let i = m - 1;
        let lhs = (d.a[m] * d.a[m] - d.a[m - 1] * d.a[m - 1]) / k + d.mu1 * degenerate_power(d.lambda, d.b[m], p);
        let common = d.b[m] * d.r[i] + d.b[m] * d.rho[i] + d.s[i] * d.s[i] + d.sigma[i] * d.sigma[i];
        let first = common + d.mu2 * d.b[m - 1] * d.b[m];
        let second = common + d.mu3 * d.b[m] * d.b[m - 1].powf(1.0 - d.theta) * d.a[m - 1].powf(d.theta);
        first_margins.push(first - lhs);
        second_margins.push(second - lhs);
    }
    let ok = |v: &[f64]| v.iter().all(|m| *m >= -1e-12);
    let first_step_form_ok = ok(&first_margins);
    let second_step_form_ok = ok(&second_margins);

    let max_b = d.b.iter().copied().fold(0.0, f64::max);
    let max_a2 = d.a.iter().map(|a| a * a).fold(0.0, f64::max);
    let lhs = max_a2 + d.mu1 * (1.0 + d.big_lambda).powf(p - 2.0) * ksum(&d.b);
    let mu4 = lhs / ((h2 + k * k) * (2.0 * d.mu5 * k * m_steps as f64).exp());
    GronwallReport {
        hypotheses_ok,
        first_step_form_ok,
        second_step_form_ok,
        stepwise_ok: first_step_form_ok && second_step_form_ok,
        conclusion_ok: max_b <= 1.0 && mu4.is_finite(),
        mu4,
        max_b,
        first_margins,
        second_margins,
        hypothesis_margins,
        problems,
    }
}

/// Gronwall data from a computed error record: `a_m` and `b_m` are the
/// measured errors, the remainder sequences are zero, `mu0` is the smallest
/// value meeting the initial hypotheses and the other constants are one.
pub fn harvest_gronwall(record: &ErrorRecord, p: f64, delta: f64, h: f64) -> GronwallData {
    let steps = record.l2.len() - 1;
    let mut data = GronwallData::zeros(p, record.kappa, h, steps);
    data.a = record.l2.clone();
    data.b = record.sym_grad_p.clone();
    data.mu0 = (data.a[0].powi(2).max(data.b[0].powi(2)) / (h * h)).max(f64::MIN_POSITIVE);
    data.lambda = delta;
    data.big_lambda = delta.max(1.0);
    data.theta = ((10.0 * p - 16.0) / (5.0 * p - 6.0)).clamp(f64::EPSILON, 1.0);
    data
}
