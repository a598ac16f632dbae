//! Randomized measurement of the equivalences between the stress, the
//! `F`-map and the shifted N-functions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::{Characteristics, StressModel};
use super::nfunction::ShiftedNFunction;
use super::tensor::SymTensor;

pub const DEFAULT_SEED: u64 = 42;

/// Names of the five ratios in [`EquivalenceReport::ratios`], in order.
pub const RATIO_NAMES: [&str; 5] = [
    "monotone/f_distance",
    "monotone/shifted_phi",
    "monotone/phi_second",
    "f_norm/phi",
    "stress_distance/shifted_phi_prime",
];

/// All pairwise quantities entering the equivalences for one pair `(P, Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `P^sym == Q^sym`; the ratios are then reported as 1.
    pub degenerate: bool,
    /// `(S(P) - S(Q)) . (P - Q)`
    pub monotone: f64,
    /// `|F(P) - F(Q)|^2`
    pub f_distance_sq: f64,
    /// `phi_{|P|}(|P - Q|)`
    pub shifted_phi: f64,
    /// `phi''(|P| + |Q|) |P - Q|^2`
    pub phi_second_form: f64,
    /// `|S(P) - S(Q)|`
    pub stress_distance: f64,
    /// `phi'_{|P|}(|P - Q|)`
    pub shifted_phi_prime: f64,
    pub ratios: [f64; 5],
}

/// Evaluates the five equivalences of the stress algebra at `(P, Q)`.
///
/// The fourth ratio `|F(Q)|^2 / phi(|Q|)` is taken at `P` instead when
/// `Q^sym = 0`.
pub fn check_equivalences(model: &StressModel, p: &SymTensor, q: &SymTensor) -> EquivalenceReport {
    let diff = *p - *q;
    let dn = diff.norm();
    if dn == 0.0 {
        return EquivalenceReport {
            degenerate: true,
            monotone: 0.0,
            f_distance_sq: 0.0,
            shifted_phi: 0.0,
            phi_second_form: 0.0,
            stress_distance: 0.0,
            shifted_phi_prime: 0.0,
            ratios: [1.0; 5],
        };
    }
    let pn = p.norm();
    let qn = q.norm();
    let sdiff = model.stress(p) - model.stress(q);
    let fdiff = model.f_map(p) - model.f_map(q);
    let shifted = ShiftedNFunction::new(*model, pn).expect("norm is nonnegative");

    let monotone = sdiff.dot(&diff);
    let f_distance_sq = fdiff.dot(&fdiff);
    let shifted_phi = shifted.value_unchecked(dn);
    let phi_second_form = model.phi_second(pn + qn) * dn * dn;
    let stress_distance = sdiff.norm();
    let shifted_phi_prime = shifted.derivative(dn);

    let anchor = if qn > 0.0 { q } else { p };
    let f_anchor = model.f_map(anchor);
    let f_norm_ratio = f_anchor.dot(&f_anchor) / model.phi(anchor.norm()).expect("norm is nonnegative");

    EquivalenceReport {
        degenerate: false,
        monotone,
        f_distance_sq,
        shifted_phi,
        phi_second_form,
        stress_distance,
        shifted_phi_prime,
        ratios: [
            monotone / f_distance_sq,
            monotone / shifted_phi,
            monotone / phi_second_form,
            f_norm_ratio,
            stress_distance / shifted_phi_prime,
        ],
    }
}

/// Outcome of [`quasi_norm_lower_bound_ratio`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LowerBoundRatio {
    Value(f64),
    /// `||Du - Dv||_p = 0`; the ratio is `+inf` by convention.
    Degenerate,
}

impl LowerBoundRatio {
    pub fn value(&self) -> f64 {
        match self {
            LowerBoundRatio::Value(v) => *v,
            LowerBoundRatio::Degenerate => f64::INFINITY,
        }
    }
}

/// `||F(Du) - F(Dv)||_2^2 / [(delta + ||Du||_p + ||Du - Dv||_p)^(p-2) ||Du - Dv||_p^2]`.
pub fn quasi_norm_lower_bound_ratio(
    model: &StressModel,
    norm_du_p: f64,
    norm_diff_p: f64,
    f_dist_sq: f64,
) -> LowerBoundRatio {
    if norm_diff_p == 0.0 {
        return LowerBoundRatio::Degenerate;
    }
    let base = model.delta() + norm_du_p + norm_diff_p;
    LowerBoundRatio::Value(f_dist_sq / (base.powf(model.p() - 2.0) * norm_diff_p * norm_diff_p))
}

/// Uniformly random symmetric tensor with (pre-symmetrization) entries in `[-range, range]`.
pub fn random_sym_tensor<R: Rng>(rng: &mut R, dim: usize, range: f64) -> SymTensor {
    let rows: Vec<Vec<f64>> = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-range..=range)).collect()).collect();
    SymTensor::sym_part(&rows)
}

/// Observed range of every ratio for one `(p, delta)` over random pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub p: f64,
    pub delta: f64,
    pub seed: u64,
    pub samples: usize,
    pub min: [f64; 5],
    pub max: [f64; 5],
}

impl EnvelopeReport {
    /// `max / min` per ratio.
    pub fn spread(&self) -> [f64; 5] {
        std::array::from_fn(|i| self.max[i] / self.min[i])
    }

    /// CSV rows `p,delta,ratio,ratio_min,ratio_max,seed`, one per ratio.
    pub fn csv_rows(&self) -> Vec<String> {
        (0..5)
            .map(|i| {
                format!(
                    "{},{},{},{:.12e},{:.12e},{}",
                    self.p, self.delta, RATIO_NAMES[i], self.min[i], self.max[i], self.seed
                )
            })
            .collect()
    }
}

pub const ENVELOPE_CSV_HEADER: &str = "p,delta,ratio,ratio_min,ratio_max,seed";

/// Samples `samples` random pairs with entries in `[-range, range]` and
/// records the envelope of each ratio. Degenerate pairs are skipped.
pub fn equivalence_envelope(model: &StressModel, samples: usize, seed: u64, range: f64) -> EnvelopeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min = [f64::INFINITY; 5];
    let mut max = [0.0f64; 5];
    for _ in 0..samples {
        let p = random_sym_tensor(&mut rng, model.dim(), range);
        let q = random_sym_tensor(&mut rng, model.dim(), range);
        let rep = check_equivalences(model, &p, &q);
        if rep.degenerate {
            continue;
        }
        for i in 0..5 {
            min[i] = min[i].min(rep.ratios[i]);
            max[i] = max[i].max(rep.ratios[i]);
        }
    }
    EnvelopeReport { p: model.p(), delta: model.delta(), seed, samples, min, max }
}

pub(crate) fn measure_characteristics(model: &StressModel, samples: usize, seed: u64) -> Characteristics {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c0 = f64::INFINITY;
    let mut c1: f64 = 0.0;
    for _ in 0..samples {
        let p = random_sym_tensor(&mut rng, model.dim(), 10.0);
        let q = random_sym_tensor(&mut rng, model.dim(), 10.0);
        let Ok(jac) = model.stress_jacobian(&p) else { continue };
        let weight = (model.delta() + p.norm()).powf(model.p() - 2.0);
        let qn2 = q.dot(&q);
        if qn2 > 0.0 {
            c0 = c0.min(jac.contract(&q, &q) / (weight * qn2));
        }
        c1 = c1.max(jac.max_abs_entry() / weight);
    }
    Characteristics { c0, c1, samples, seed }
}
