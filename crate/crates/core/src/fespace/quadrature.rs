//! Quadrature on the reference simplex and on intervals.

use super::FeError;

/// Points in barycentric coordinates with weights summing to the reference
/// volume (`1/2` for the triangle, `1/6` for the tetrahedron).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub dim: usize,
    pub degree: usize,
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

pub const MAX_DEGREE: usize = 21;

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn reference_volume(&self) -> f64 {
        if self.dim == 2 {
            0.5
        } else {
            1.0 / 6.0
        }
    }

    /// Cartesian coordinates of point `q` on the reference simplex.
    pub fn reference_point(&self, q: usize) -> [f64; 3] {
        let l = &self.points[q];
        [l[1], l[2], if self.dim == 3 { l[3] } else { 0.0 }]
    }

    /// Integral over the reference simplex.
    pub fn integrate(&self, f: impl Fn(&[f64; 3]) -> f64) -> f64 {
        (0..self.len()).map(|q| self.weights[q] * f(&self.reference_point(q))).sum()
    }

    /// Splits every cell of the rule's domain into `4^levels` (2D) similar
    /// children and places a copy of the rule on each. Exactness degree is kept.
    pub fn composite(&self, levels: usize) -> QuadratureRule {
        assert_eq!(self.dim, 2, "composite rules are implemented for triangles");
        let mut tris: Vec<[[f64; 2]; 3]> = vec![[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]];
        for _ in 0..levels {
            let mut next = Vec::with_capacity(4 * tris.len());
            for [a, b, c] in tris {
                let mid = |p: [f64; 2], q: [f64; 2]| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
                next.extend_from_slice(&[[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
            }
            tris = next;
        }
        let scale = 1.0 / tris.len() as f64;
        let mut points = Vec::with_capacity(tris.len() * self.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for t in &tris {
            for (l, w) in self.points.iter().zip(&self.weights) {
                let x = l[0] * t[0][0] + l[1] * t[1][0] + l[2] * t[2][0];
                let y = l[0] * t[0][1] + l[1] * t[1][1] + l[2] * t[2][1];
                points.push([1.0 - x - y, x, y, 0.0]);
                weights.push(w * scale);
            }
        }
        QuadratureRule { dim: 2, degree: self.degree, points, weights }
    }
}

/// Rule on the reference simplex of dimension `dim` exact for polynomials of
/// total degree `degree`.
pub fn quadrature_for(dim: usize, degree: usize) -> Result<QuadratureRule, FeError> {
    if degree > MAX_DEGREE {
        return Err(FeError::UnsupportedQuadrature { dim, degree });
    }
    match dim {
        2 => Ok(triangle_rule(degree)),
        3 => Ok(tetrahedron_rule(degree)),
        _ => Err(FeError::UnsupportedQuadrature { dim, degree }),
    }
}

fn triangle_rule(degree: usize) -> QuadratureRule {
    let (points, weights) = match degree {
        0 | 1 => (vec![[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]], vec![0.5]),
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            (vec![[a, b, b, 0.0], [b, a, b, 0.0], [b, b, a, 0.0]], vec![1.0 / 6.0; 3])
        }
        3..=5 => radon7(),
        _ => return collapsed_triangle(degree),
    };
    QuadratureRule { dim: 2, degree: degree.max(1), points, weights }
}

// Seven-point degree-5 rule.
fn radon7() -> (Vec<[f64; 4]>, Vec<f64>) {
    let s = 15f64.sqrt();
    let a = (6.0 - s) / 21.0;
    let b = (6.0 + s) / 21.0;
    let wa = (155.0 - s) / 2400.0;
    let wb = (155.0 + s) / 2400.0;
    let t = 1.0 / 3.0;
    let mut pts = vec![[t, t, t, 0.0]];
    let mut w = vec![9.0 / 80.0];
    for (x, wx) in [(a, wa), (b, wb)] {
        let y = 1.0 - 2.0 * x;
        pts.extend_from_slice(&[[y, x, x, 0.0], [x, y, x, 0.0], [x, x, y, 0.0]]);
        w.extend_from_slice(&[wx; 3]);
    }
    (pts, w)
}

fn collapsed_triangle(degree: usize) -> QuadratureRule {
    let k = (degree + 3) / 2;
    let (x, w) = gauss_legendre_unit(k);
    let mut points = Vec::with_capacity(k * k);
    let mut weights = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let u = x[i];
            let v = (1.0 - u) * x[j];
            points.push([1.0 - u - v, u, v, 0.0]);
            weights.push(w[i] * w[j] * (1.0 - u));
        }
    }
    QuadratureRule { dim: 2, degree, points, weights }
}

fn tetrahedron_rule(degree: usize) -> QuadratureRule {
    if degree <= 1 {
        return QuadratureRule { dim: 3, degree: 1, points: vec![[0.25; 4]], weights: vec![1.0 / 6.0] };
    }
    let k = (degree + 4) / 2;
    let (x, w) = gauss_legendre_unit(k);
    let mut points = Vec::with_capacity(k * k * k);
    let mut weights = Vec::with_capacity(k * k * k);
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let a = x[i];
                let b = (1.0 - a) * x[j];
                let c = (1.0 - a) * (1.0 - x[j]) * x[l];
                points.push([1.0 - a - b - c, a, b, c]);
                weights.push(w[i] * w[j] * w[l] * (1.0 - x[i]).powi(2) * (1.0 - x[j]));
            }
        }
    }
    QuadratureRule { dim: 3, degree, points, weights }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss-Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (x.iter().map(|t| 0.5 * (t + 1.0)).collect(), w.iter().map(|v| 0.5 * v).collect())
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // int_T x^a y^b = a! b! / (a + b + 2)!
    fn monomial_triangle(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn monomial_tet(a: u32, b: u32, c: u32) -> f64 {
        factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3)
    }

    #[test]
    fn weights_positive_and_sum_to_area() {
        for deg in 0..=MAX_DEGREE {
            let q = quadrature_for(2, deg).unwrap();
            assert!(q.weights.iter().all(|&w| w > 0.0), "degree {deg}");
            assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-15);
        }
        assert_eq!(quadrature_for(2, 1).unwrap().weights, vec![0.5]);
        assert!(quadrature_for(2, MAX_DEGREE + 1).is_err());
    }

    #[test]
    fn triangle_monomials_exact() {
        for deg in 1..=12usize {
            let q = quadrature_for(2, deg).unwrap();
            for a in 0..=deg as u32 {
                for b in 0..=(deg as u32 - a) {
                    let got = q.integrate(|x| x[0].powi(a as i32) * x[1].powi(b as i32));
                    let want = monomial_triangle(a, b);
                    assert!((got - want).abs() < 1e-15, "deg {deg} x^{a} y^{b}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn documented_monomials() {
        assert_eq!(monomial_triangle(2, 1), 1.0 / 60.0);
        let q3 = quadrature_for(2, 3).unwrap();
        assert!((q3.integrate(|x| x[0] * x[0] * x[1]) - 1.0 / 60.0).abs() < 1e-16);
        let q7 = quadrature_for(2, 7).unwrap();
        assert!((q7.integrate(|x| x[0].powi(7)) - 1.0 / 72.0).abs() < 1e-16);
        // Degree 5 is not enough for x^6.
        let q5 = quadrature_for(2, 5).unwrap();
        assert!((q5.integrate(|x| x[0].powi(6)) - monomial_triangle(6, 0)).abs() > 1e-8);
    }

    #[test]
    fn tetrahedron_monomials_exact() {
        for deg in [1usize, 3, 5, 7] {
            let q = quadrature_for(3, deg).unwrap();
            assert!((q.weights.iter().sum::<f64>() - 1.0 / 6.0).abs() < 1e-15);
            for a in 0..=deg as u32 {
                for b in 0..=(deg as u32 - a) {
                    for c in 0..=(deg as u32 - a - b) {
                        let got = q.integrate(|x| x[0].powi(a as i32) * x[1].powi(b as i32) * x[2].powi(c as i32));
                        assert!((got - monomial_tet(a, b, c)).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn composite_rule_keeps_exactness() {
        let q = quadrature_for(2, 7).unwrap().composite(2);
        assert_eq!(q.len(), 16 * 25);
        assert!((q.integrate(|x| x[0].powi(4) * x[1].powi(3)) - monomial_triangle(4, 3)).abs() < 1e-16);
        assert!((q.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 64] {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n {n} k {k}");
            }
        }
    }
}
