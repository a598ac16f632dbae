use std::fmt::Write;
use std::sync::Arc;

use super::element::ElementKind;
use super::quadrature::quadrature_for;
use super::space::FESpace;
use super::FeError;

/// Barycentric tolerance used when deciding whether a point lies in a cell.
const INSIDE_TOL: f64 = 1e-12;

/// Coefficient vector over a space.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    space: Arc<FESpace>,
    coeffs: Vec<f64>,
}

impl DiscreteField {
    pub fn new(space: Arc<FESpace>, coeffs: Vec<f64>) -> Result<Self, FeError> {
        if coeffs.len() != space.n_dofs() {
            return Err(FeError::Dimension(format!("{} coefficients for {} dofs", coeffs.len(), space.n_dofs())));
        }
        Ok(DiscreteField { space, coeffs })
    }

    pub fn zeros(space: Arc<FESpace>) -> Self {
        let n = space.n_dofs();
        DiscreteField { space, coeffs: vec![0.0; n] }
    }

    pub fn space(&self) -> &Arc<FESpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Local coefficients of cell `k`, `[component][local dof]`.
    pub fn local(&self, k: usize) -> [[f64; 6]; 2] {
        let mut out = [[0.0; 6]; 2];
        let ns = self.space.n_scalar();
        for (c, row) in out.iter_mut().enumerate().take(self.space.components()) {
            for (i, &d) in self.space.cell_dofs(k).iter().enumerate() {
                row[i] = self.coeffs[c * ns + d];
            }
        }
        out
    }

    /// Value at barycentric point `l` of cell `k`; unused components are 0.
    pub fn value_in_cell(&self, k: usize, l: &[f64; 4]) -> [f64; 2] {
        let kind = self.space.kind();
        let mut phi = [0.0; 6];
        kind.values(l, &mut phi);
        let loc = self.local(k);
        let mut v = [0.0; 2];
        for c in 0..self.space.components() {
            v[c] = (0..kind.n_local()).map(|i| loc[c][i] * phi[i]).sum();
        }
        v
    }

    /// Gradient `g[c][j] = d u_c / d x_j` at barycentric point `l` of cell `k`.
    pub fn gradient_in_cell(&self, k: usize, l: &[f64; 4]) -> [[f64; 2]; 2] {
        let kind = self.space.kind();
        let geo = self.space.geometry(k);
        let mut db = [[0.0; 3]; 6];
        kind.bary_gradients(l, &mut db);
        let loc = self.local(k);
        let mut g = [[0.0; 2]; 2];
        for c in 0..self.space.components() {
            for i in 0..kind.n_local() {
                let gi = geo.cartesian(&db[i]);
                g[c][0] += loc[c][i] * gi[0];
                g[c][1] += loc[c][i] * gi[1];
            }
        }
        g
    }

    /// Finds a cell containing `x`, trying `hint` first.
    pub fn locate(&self, x: &[f64; 2], hint: Option<usize>) -> Result<(usize, [f64; 4]), FeError> {
        let inside = |k: usize| {
            let l = self.space.geometry(k).barycentric(x);
            l[..3].iter().all(|&v| v >= -INSIDE_TOL).then_some((k, l))
        };
        if let Some(found) = hint.filter(|&k| k < self.space.n_cells()).and_then(inside) {
            return Ok(found);
        }
        (0..self.space.n_cells()).find_map(inside).ok_or(FeError::PointNotFound { x: x[0], y: x[1] })
    }

    pub fn evaluate(&self, x: &[f64; 2], hint: Option<usize>) -> Result<[f64; 2], FeError> {
        let (k, l) = self.locate(x, hint)?;
        Ok(self.value_in_cell(k, &l))
    }

    pub fn evaluate_gradient(&self, x: &[f64; 2], hint: Option<usize>) -> Result<[[f64; 2]; 2], FeError> {
        let (k, l) = self.locate(x, hint)?;
        Ok(self.gradient_in_cell(k, &l))
    }

    /// `||u||_2` with a degree-7 rule.
    pub fn l2_norm(&self) -> f64 {
        let rule = quadrature_for(2, 7).expect("degree 7 available");
        let mut s = 0.0;
        for k in 0..self.space.n_cells() {
            let area = self.space.geometry(k).area;
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let v = self.value_in_cell(k, l);
                s += 2.0 * area * w * (v[0] * v[0] + v[1] * v[1]);
            }
        }
        s.sqrt()
    }

    /// One line per global dof: `dof,x,y,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dof,x,y,value\n");
        let ns = self.space.n_scalar();
        for (d, v) in self.coeffs.iter().enumerate() {
            let x = self.space.node(d % ns);
            let _ = writeln!(out, "{d},{:.12e},{:.12e},{:.12e}", x[0], x[1], v);
        }
        out
    }
}

/// Nodal interpolation of a vector function; components beyond the space's
/// component count are ignored. Bubble coefficients match the cell average.
pub fn interpolate(space: &Arc<FESpace>, f: impl Fn(&[f64; 2]) -> [f64; 2]) -> DiscreteField {
    let ns = space.n_scalar();
    let nc = space.components();
    let mut coeffs = vec![0.0; space.n_dofs()];
    for s in 0..ns {
        let v = f(&space.node(s));
        for c in 0..nc {
            coeffs[c * ns + s] = v[c];
        }
    }
    if space.kind() == ElementKind::P1Bubble {
        // Cell mean of 27 l0 l1 l2 is 9/20.
        let rule = quadrature_for(2, 7).expect("degree 7 available");
        let nv = space.mesh().n_vertices();
        for k in 0..space.n_cells() {
            let geo = space.geometry(k);
            let mut avg = [0.0; 2];
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let v = f(&geo.point(l));
                avg[0] += 2.0 * w * v[0];
                avg[1] += 2.0 * w * v[1];
            }
            let dofs = space.cell_dofs(k);
            for c in 0..nc {
                let lin: f64 = dofs[..3].iter().map(|&d| coeffs[c * ns + d]).sum::<f64>() / 3.0;
                coeffs[c * ns + nv + k] = (avg[c] - lin) / 0.45;
            }
        }
    }
    DiscreteField { space: space.clone(), coeffs }
}

pub fn interpolate_scalar(space: &Arc<FESpace>, f: impl Fn(&[f64; 2]) -> f64) -> DiscreteField {
    interpolate(space, |x| [f(x), 0.0])
}
