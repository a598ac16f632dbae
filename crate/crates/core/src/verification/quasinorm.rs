use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fespace::{DiscreteField, ElementKind, FESpace, FeError};
use crate::mesh::Mesh;
use crate::pstructure::{quasi_norm_lower_bound_ratio, StressModel, SymTensor};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiNormReport {
    pub p: f64,
    pub delta: f64,
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Lower-bound ratio of the F-distance against the `L^p` distance of
/// symmetric gradients over random pairs of continuous P1 vector fields.
///
/// Each pair draws nodal values uniformly in `[-s, s]` with a random scale
/// `s = 10^U(-2, 1)` shared by both fields; gradients are cellwise constant,
/// so the one-point rule is exact.
pub fn quasi_norm_suite(mesh: &Arc<Mesh>, model: &StressModel, samples: usize, seed: u64) -> Result<QuasiNormReport, FeError> {
    let space = Arc::new(FESpace::new(mesh.clone(), ElementKind::P1, 2)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroid = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
    let p = model.p();
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    let mut counted = 0;
    for _ in 0..samples {
        let scale = 10f64.powf(rng.gen_range(-2.0..1.0));
        let mut draw = || (0..space.n_dofs()).map(|_| rng.gen_range(-scale..=scale)).collect::<Vec<f64>>();
        let u = DiscreteField::new(space.clone(), draw())?;
        let v = DiscreteField::new(space.clone(), draw())?;
        let (mut du_p, mut diff_p, mut fd) = (0.0, 0.0, 0.0);
        for k in 0..space.n_cells() {
            let area = space.geometry(k).area;
            let a = SymTensor::sym_part2(&u.gradient_in_cell(k, &centroid));
            let b = SymTensor::sym_part2(&v.gradient_in_cell(k, &centroid));
            du_p += area * a.norm().powf(p);
            diff_p += area * (a - b).norm().powf(p);
            let df = model.f_map(&a) - model.f_map(&b);
            fd += area * df.dot(&df);
        }
        let r = quasi_norm_lower_bound_ratio(model, du_p.powf(1.0 / p), diff_p.powf(1.0 / p), fd).value();
        if r.is_finite() {
            counted += 1;
            min_ratio = min_ratio.min(r);
            max_ratio = max_ratio.max(r);
        }
    }
    Ok(QuasiNormReport { p, delta: model.delta(), samples: counted, min_ratio, max_ratio })
}
