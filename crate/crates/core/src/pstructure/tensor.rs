//! Small dense tensors of order two and four in two or three dimensions.

use std::ops::{Add, Mul, Sub};

/// A `d x d` matrix, `d` in `{2, 3}`, stored in a fixed 3x3 buffer.
///
/// Entries outside the leading `d x d` block are always zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor {
    dim: usize,
    m: [[f64; 3]; 3],
}

impl SymTensor {
    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "tensor dimension must be 2 or 3, got {dim}");
        SymTensor { dim, m: [[0.0; 3]; 3] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zero(dim);
        for i in 0..dim {
            t.m[i][i] = 1.0;
        }
        t
    }

    pub fn diag(entries: &[f64]) -> Self {
        let mut t = Self::zero(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            t.m[i][i] = v;
        }
        t
    }

    /// Symmetric part of a square matrix given row by row.
    ///
    /// Panics if the rows are not square of size 2 or 3.
    pub fn sym_part<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let dim = rows.len();
        let mut t = Self::zero(dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), dim, "matrix must be square");
            for j in 0..dim {
                t.m[i][j] += 0.5 * row[j];
                t.m[j][i] += 0.5 * row[j];
            }
        }
        t
    }

    /// Symmetric part of a 2x2 gradient.
    #[inline]
    pub fn sym_part2(g: &[[f64; 2]; 2]) -> Self {
        let off = 0.5 * (g[0][1] + g[1][0]);
        SymTensor { dim: 2, m: [[g[0][0], off, 0.0], [off, g[1][1], 0.0], [0.0; 3]] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.m[i][..self.dim].to_vec()).collect()
    }

    /// Frobenius inner product `P . Q`.
    #[inline]
    pub fn dot(&self, other: &SymTensor) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    /// Frobenius norm `|P|`.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.m[i][j] == self.m[j][i]))
    }

    pub fn max_abs_diff(&self, other: &SymTensor) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }
}

impl Add for SymTensor {
    type Output = SymTensor;
    fn add(mut self, rhs: SymTensor) -> SymTensor {
        for i in 0..3 {
            for j in 0..3 {
                self.m[i][j] += rhs.m[i][j];
            }
        }
        self
    }
}

impl Sub for SymTensor {
    type Output = SymTensor;
    fn sub(mut self, rhs: SymTensor) -> SymTensor {
        for i in 0..3 {
            for j in 0..3 {
                self.m[i][j] -= rhs.m[i][j];
            }
        }
        self
    }
}

impl Mul<SymTensor> for f64 {
    type Output = SymTensor;
    fn mul(self, mut rhs: SymTensor) -> SymTensor {
        for row in rhs.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= self;
            }
        }
        rhs
    }
}

/// Derivative of the stress map at a fixed argument `P`.
///
/// For `S(P) = g(|P|) P` with `g(t) = (delta + t)^(p-2)` the derivative acts on
/// a direction `Q` as `g Q^sym + h (P . Q) P` where `h = g'(|P|) / |P|`. Only
/// the two scalars and `P` are stored; entries are produced on demand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressJacobian {
    pub(crate) scale: f64,
    pub(crate) rank_one: f64,
    pub(crate) dir: SymTensor,
}

impl StressJacobian {
    pub fn dim(&self) -> usize {
        self.dir.dim()
    }

    /// `sum_{kl} dS_ij/dP_kl Q_kl`.
    #[inline]
    pub fn apply(&self, q: &SymTensor) -> SymTensor {
        let qs = SymTensor::sym_part(&q.rows());
        self.apply_sym(&qs)
    }

    /// Same as [`apply`](Self::apply) for an already symmetric direction.
    #[inline]
    pub fn apply_sym(&self, q: &SymTensor) -> SymTensor {
        let pq = self.dir.dot(q);
        self.scale * *q + (self.rank_one * pq) * self.dir
    }

    /// `sum_{ijkl} dS_ij/dP_kl Q_ij R_kl`.
    #[inline]
    pub fn contract(&self, q: &SymTensor, r: &SymTensor) -> f64 {
        self.apply_sym(r).dot(q)
    }

    /// Entry `dS_ij / dP_kl` with respect to the full (unsymmetrized) argument.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let kd = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        let sym = 0.5 * (kd(i, k) * kd(j, l) + kd(i, l) * kd(j, k));
        self.scale * sym + self.rank_one * (self.dir.get(i, j) * self.dir.get(k, l))
    }

    /// All `d^4` entries, indexed `[i][j][k][l]`.
    pub fn to_array(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|k| (0..d).map(|l| self.entry(i, j, k, l)).collect()).collect())
                    .collect()
            })
            .collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        let d = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        m = m.max(self.entry(i, j, k, l).abs());
                    }
                }
            }
        }
        m
    }
}
