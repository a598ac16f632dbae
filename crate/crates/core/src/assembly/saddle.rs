use crate::linalg::{LinearSolveError, SparseLu, SparseMatrix};

/// Block system
///
/// ```text
/// [  A  -B^T  0 ] [u]   [ g ]
/// [ -B   0    m ] [q] = [-h ]
/// [  0   m^T  0 ] [l]   [ c ]
/// ```
///
/// where `m` holds the pressure basis means, so the last row fixes the mean of
/// `q` to `c` (zero unless set) and the multiplier `l` vanishes for
/// compatible data.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub mean: Vec<f64>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub u: Vec<f64>,
    pub q: Vec<f64>,
    pub multiplier: f64,
}

impl SaddleSystem {
    pub fn new(a: SparseMatrix, b: SparseMatrix, g: Vec<f64>, mean: Vec<f64>) -> Self {
        let h = vec![0.0; b.nrows()];
        SaddleSystem { a, b, g, h, mean, c: 0.0 }
    }

    pub fn n_velocity(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_pressure(&self) -> usize {
        self.b.nrows()
    }

    pub fn size(&self) -> usize {
        self.n_velocity() + self.n_pressure() + 1
    }

    pub fn matrix(&self) -> SparseMatrix {
        let nv = self.n_velocity();
        let nq = self.n_pressure();
        let n = self.size();
        let mut t: Vec<(usize, usize, f64)> = self.a.iter().collect();
        for (k, j, v) in self.b.iter() {
            t.push((j, nv + k, -v));
            t.push((nv + k, j, -v));
        }
        for (k, &m) in self.mean.iter().enumerate() {
            t.push((nv + k, nv + nq, m));
            t.push((nv + nq, nv + k, m));
        }
        SparseMatrix::from_triplets(n, n, t)
    }

    pub fn rhs(&self) -> Vec<f64> {
        let mut r = self.g.clone();
        r.extend(self.h.iter().map(|v| -v));
        r.push(self.c);
        r
    }

    pub fn split(&self, x: &[f64]) -> SaddleSolution {
        let nv = self.n_velocity();
        let nq = self.n_pressure();
        SaddleSolution { u: x[..nv].to_vec(), q: x[nv..nv + nq].to_vec(), multiplier: x[nv + nq] }
    }

    pub fn solve(&self) -> Result<SaddleSolution, LinearSolveError> {
        let lu = SparseLu::factor(&self.matrix())?;
        Ok(self.split(&lu.solve(&self.rhs())?))
    }
}

/// Symmetric elimination of homogeneous Dirichlet dofs: their rows and
/// columns in `A` become identity rows, their columns in `B` are dropped and
/// their load entries are zeroed.
pub fn apply_dirichlet(system: SaddleSystem, boundary: &[usize]) -> SaddleSystem {
    let n = system.n_velocity();
    let mut mask = vec![false; n];
    for &d in boundary {
        mask[d] = true;
    }
    let mut ta: Vec<(usize, usize, f64)> = system.a.iter().filter(|&(i, j, _)| !mask[i] && !mask[j]).collect();
    ta.extend(boundary.iter().map(|&d| (d, d, 1.0)));
    let tb: Vec<(usize, usize, f64)> = system.b.iter().filter(|&(_, j, _)| !mask[j]).collect();
    let mut g = system.g;
    for &d in boundary {
        g[d] = 0.0;
    }
    SaddleSystem {
        a: SparseMatrix::from_triplets(n, n, ta),
        b: SparseMatrix::from_triplets(system.b.nrows(), n, tb),
        g,
        h: system.h,
        mean: system.mean,
        c: system.c,
    }
}
