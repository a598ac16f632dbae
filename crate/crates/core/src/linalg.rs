//! Compressed sparse row matrices and a direct solver backed by `faer`.

use faer::sparse::linalg::solvers::SymbolicLu;
use faer::sparse::{SparseColMat, Triplet};
use faer::{prelude::Solve, Mat};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinearSolveError {
    #[error("matrix is singular or structurally rank deficient: {0}")]
    Singular(String),
    #[error("solve residual {backward_error:e} exceeds tolerance {tolerance:e}")]
    Inaccurate { backward_error: f64, tolerance: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Accumulates `(row, col, value)` entries; duplicates are summed on build.
#[derive(Debug, Clone, Default)]
pub struct TripletList {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletList {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        TripletList { nrows, ncols, entries: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        TripletList { nrows, ncols, entries: Vec::with_capacity(cap) }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn extend(&mut self, other: TripletList) {
        self.entries.extend(other.entries);
    }

    pub fn build(self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.nrows, self.ncols, self.entries)
    }
}

/// CSR matrix with sorted, duplicate-free column indices in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn from_triplets(nrows: usize, ncols: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            assert!(r < nrows && c < ncols, "entry ({r},{c}) outside {nrows}x{ncols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix { nrows, ncols, row_ptr, col_idx, values }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
            })
            .collect()
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix::from_triplets(self.ncols, self.nrows, self.iter().map(|(i, j, v)| (j, i, v)).collect())
    }

    pub fn scaled(&self, alpha: f64) -> SparseMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `self + alpha * other`.
    pub fn add_scaled(&self, alpha: f64, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut e: Vec<_> = self.iter().collect();
        e.extend(other.iter().map(|(i, j, v)| (i, j, alpha * v)));
        SparseMatrix::from_triplets(self.nrows, self.ncols, e)
    }

    /// `max |A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        self.add_scaled(-1.0, &self.transpose()).max_abs()
    }

    /// `max |A_ij + A_ji|`.
    pub fn max_skew_defect(&self) -> f64 {
        self.add_scaled(1.0, &self.transpose()).max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, j, v) in self.iter() {
            d[i][j] += v;
        }
        d
    }

    fn to_faer(&self) -> SparseColMat<usize, f64> {
        let t: Vec<Triplet<usize, usize, f64>> = self.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t).expect("valid triplets")
    }
}

/// Normwise backward error `||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf)`.
pub fn backward_error(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let r = a.mul_vec(x);
    let rn = r.iter().zip(b).map(|(ri, bi)| (ri - bi).abs()).fold(0.0, f64::max);
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let denom = a.norm_inf() * xn + bn;
    if denom == 0.0 {
        0.0
    } else {
        rn / denom
    }
}

/// Sparse LU with partial pivoting and a few steps of iterative refinement.
pub struct SparseLu {
    matrix: SparseMatrix,
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    tolerance: f64,
}

/// Default bound on the normwise backward error of [`SparseLu::solve`].
pub const SOLVE_TOLERANCE: f64 = 1e-12;

impl SparseLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self, LinearSolveError> {
        if a.nrows != a.ncols {
            return Err(LinearSolveError::Dimension(format!("{}x{} is not square", a.nrows, a.ncols)));
        }
        let fa = a.to_faer();
        let symbolic =
            SymbolicLu::try_new(fa.symbolic()).map_err(|e| LinearSolveError::Singular(format!("{e:?}")))?;
        let lu = faer::sparse::linalg::solvers::Lu::try_new_with_symbolic(symbolic, fa.as_ref())
            .map_err(|e| LinearSolveError::Singular(format!("{e:?}")))?;
        Ok(SparseLu { matrix: a.clone(), lu, tolerance: SOLVE_TOLERANCE })
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    fn raw_solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinearSolveError> {
        if b.len() != self.matrix.nrows {
            return Err(LinearSolveError::Dimension(format!("rhs has length {}", b.len())));
        }
        let mut x = self.raw_solve(b);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LinearSolveError::Singular("non-finite solution".into()));
        }
        let mut err = backward_error(&self.matrix, &x, b);
        for _ in 0..3 {
            if err <= self.tolerance {
                break;
            }
            let ax = self.matrix.mul_vec(&x);
            let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            let dx = self.raw_solve(&r);
            for (xi, di) in x.iter_mut().zip(&dx) {
                *xi += di;
            }
            err = backward_error(&self.matrix, &x, b);
        }
        if !(err <= self.tolerance) {
            return Err(LinearSolveError::Inaccurate { backward_error: err, tolerance: self.tolerance });
        }
        Ok(x)
    }
}
