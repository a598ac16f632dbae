//! The N-function generated by the stress and its shifted family.
//!
//! With `c = delta + a` every member satisfies `phi_a'(t) = (c + t)^(p-2) t`
//! and admits the closed-form antiderivative
//! `phi_a(t) = c^p g(t / c)` where
//! `g(x) = ((1+x)^p - 1)/p - ((1+x)^(p-1) - 1)/(p-1)`.
//! Near `x = 0` the two terms of `g` cancel, so small arguments go through
//! the power series `g(x) = sum_{k>=2} (k-1)/k! (p-2)(p-3)...(p-k+1) x^k`.

use super::model::StressModel;
use super::PStructureError;

const SERIES_CUTOFF: f64 = 0.05;
const LARGE_RATIO: f64 = 1e8;
const CONJUGATE_RTOL: f64 = 1e-12;
const CONJUGATE_MAX_ITER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedNFunction {
    model: StressModel,
    shift: f64,
}

impl ShiftedNFunction {
    pub fn new(model: StressModel, shift: f64) -> Result<Self, PStructureError> {
        if !(shift >= 0.0) || !shift.is_finite() {
            return Err(PStructureError::Domain { what: "shift", value: shift });
        }
        Ok(ShiftedNFunction { model, shift })
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn model(&self) -> &StressModel {
        &self.model
    }

    #[inline]
    fn c(&self) -> f64 {
        self.model.delta() + self.shift
    }

    /// `phi_a(t)`.
    pub fn value(&self, t: f64) -> Result<f64, PStructureError> {
        if !(t >= 0.0) {
            return Err(PStructureError::Domain { what: "t", value: t });
        }
        Ok(self.value_unchecked(t))
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        let p = self.model.p();
        let c = self.c();
        if t == 0.0 {
            return 0.0;
        }
        if c == 0.0 {
            return t.powf(p) / p;
        }
        let x = t / c;
        if x > LARGE_RATIO {
            let ct = c + t;
            return ct.powf(p) / p - c * ct.powf(p - 1.0) / (p - 1.0) + c.powf(p) * (1.0 / (p - 1.0) - 1.0 / p);
        }
        c.powf(p) * reduced(p, x)
    }

    /// `phi_a'(t) = (delta + a + t)^(p-2) t`.
    pub fn derivative(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            (self.c() + t).powf(self.model.p() - 2.0) * t
        }
    }

    /// `phi_a''(t)`.
    pub fn second_derivative(&self, t: f64) -> f64 {
        let p = self.model.p();
        if p == 2.0 {
            return 1.0;
        }
        let c = self.c();
        (c + t).powf(p - 3.0) * ((p - 1.0) * t + c)
    }

    /// Solves `phi_a'(t) = s` for `t >= 0`.
    pub fn inverse_derivative(&self, s: f64) -> Result<f64, PStructureError> {
        if !(s >= 0.0) {
            return Err(PStructureError::Domain { what: "s", value: s });
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        let p = self.model.p();
        let c = self.c();
        if p == 2.0 {
            return Ok(s);
        }
        // phi_a' is increasing; bracket the root by doubling.
        let guess = if c > 0.0 && s < c.powf(p - 1.0) { s * c.powf(2.0 - p) } else { s.powf(1.0 / (p - 1.0)) };
        let mut lo = 0.0;
        let mut hi = guess.max(f64::MIN_POSITIVE);
        let mut iter = 0;
        while self.derivative(hi) < s {
            lo = hi;
            hi *= 2.0;
            iter += 1;
            if iter > 2100 || !hi.is_finite() {
                return Err(PStructureError::NonConvergence { s, iterations: iter });
            }
        }
        // Safeguarded Newton.
        let mut t = guess.clamp(lo, hi);
        for _ in 0..CONJUGATE_MAX_ITER {
            let r = self.derivative(t) - s;
            if r == 0.0 {
                return Ok(t);
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.second_derivative(t);
            let mut next = t - r / d;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let step = (next - t).abs();
            t = next;
            if step <= CONJUGATE_RTOL * t || (hi - lo) <= CONJUGATE_RTOL * hi {
                return Ok(t);
            }
        }
        Err(PStructureError::NonConvergence { s, iterations: CONJUGATE_MAX_ITER })
    }

    /// Legendre-Fenchel conjugate `(phi_a)^*(s) = s t* - phi_a(t*)` with `phi_a'(t*) = s`.
    pub fn conjugate(&self, s: f64) -> Result<f64, PStructureError> {
        let t = self.inverse_derivative(s)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok((s * t - self.value_unchecked(t)).max(0.0))
    }
}

/// `g(x)` with `phi_a(t) = c^p g(t/c)`.
fn reduced(p: f64, x: f64) -> f64 {
    if x <= SERIES_CUTOFF {
        // a_2 = 1/2, a_{k+1} = a_k * k (p - k) / ((k + 1)(k - 1))
        let mut a = 0.5;
        let mut xk = x * x;
        let mut sum = a * xk;
        for k in 2..60 {
            let kf = k as f64;
            a *= kf * (p - kf) / ((kf + 1.0) * (kf - 1.0));
            xk *= x;
            let term = a * xk;
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let l = x.ln_1p();
        (p * l).exp_m1() / p - ((p - 1.0) * l).exp_m1() / (p - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sn(p: f64, delta: f64, a: f64) -> ShiftedNFunction {
        ShiftedNFunction::new(StressModel::new(p, delta, 2).unwrap(), a).unwrap()
    }

    /// Adaptive Simpson quadrature of `phi_a'`, independent of the closed form.
    fn quad_oracle(f: &ShiftedNFunction, t: f64) -> f64 {
        fn simpson(g: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b))
        }
        fn rec(g: &dyn Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let l = simpson(g, a, m);
            let r = simpson(g, m, b);
            if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
                l + r + (l + r - whole) / 15.0
            } else {
                rec(g, a, m, l, 0.5 * tol, depth - 1) + rec(g, m, b, r, 0.5 * tol, depth - 1)
            }
        }
        let g = |s: f64| f.derivative(s);
        rec(&g, 0.0, t, simpson(&g, 0.0, t), 1e-14, 40)
    }

    #[test]
    fn quadratic_case() {
        let f = sn(2.0, 0.0, 0.0);
        assert_eq!(f.value(3.0).unwrap(), 4.5);
        assert_eq!(f.conjugate(2.0).unwrap(), 2.0);
    }

    #[test]
    fn zero_values() {
        for a in [0.0, 0.3, 10.0] {
            let f = sn(1.4, 0.2, a);
            assert_eq!(f.value(0.0).unwrap(), 0.0);
            assert_eq!(f.conjugate(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn negative_arguments_rejected() {
        assert!(sn(1.5, 0.0, 0.0).value(-1.0).is_err());
        assert!(sn(1.5, 0.0, 0.0).conjugate(-1.0).is_err());
        assert!(ShiftedNFunction::new(StressModel::new(1.5, 0.0, 2).unwrap(), -0.5).is_err());
    }

    #[test]
    fn closed_form_reference_value() {
        let v = sn(1.5, 1.0, 0.0).value(1.0).unwrap();
        assert_relative_eq!(v, (4.0 - 2.0 * 2f64.sqrt()) / 3.0, max_relative = 1e-14);
        assert_relative_eq!(v, 0.390524, epsilon = 1e-6);
        assert_relative_eq!(v, quad_oracle(&sn(1.5, 1.0, 0.0), 1.0), max_relative = 1e-10);
    }

    #[test]
    fn closed_form_matches_quadrature_across_regimes() {
        for &(p, d, a) in &[(1.3, 0.0, 0.0), (1.3, 0.01, 0.5), (1.8, 1.0, 0.0), (1.5, 0.0, 2.0), (1.99, 0.1, 0.1)] {
            let f = sn(p, d, a);
            for &t in &[1e-4, 0.02, 0.3, 1.0, 7.0, 40.0] {
                let exact = quad_oracle(&f, t);
                assert_relative_eq!(f.value(t).unwrap(), exact, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn series_and_direct_branches_agree_at_cutoff() {
        let p = 1.37;
        let below = reduced(p, SERIES_CUTOFF);
        let l = SERIES_CUTOFF.ln_1p();
        let direct = (p * l).exp_m1() / p - ((p - 1.0) * l).exp_m1() / (p - 1.0);
        assert_relative_eq!(below, direct, max_relative = 1e-12);
    }

    #[test]
    fn conjugate_matches_grid_search() {
        let f = sn(1.5, 1.0, 0.0);
        let s = 0.5;
        // sup over t of s t - phi(t): coarse grid then a fine grid around the best point.
        let mut best = (0.0, 0.0);
        for i in 0..=200_000 {
            let t = i as f64 * 1e-4;
            let v = s * t - f.value(t).unwrap();
            if v > best.1 {
                best = (t, v);
            }
        }
        let t0 = best.0;
        for i in 0..=20_000 {
            let t = t0 - 1e-4 + i as f64 * 1e-8;
            let v = s * t - f.value(t).unwrap();
            if v > best.1 {
                best = (t, v);
            }
        }
        assert!((f.conjugate(s).unwrap() - best.1).abs() <= 1e-8);
    }

    #[test]
    fn inverse_derivative_roundtrip() {
        for &(p, d, a) in &[(1.1, 0.0, 0.0), (1.5, 0.0, 3.0), (1.9, 2.0, 0.0)] {
            let f = sn(p, d, a);
            for &s in &[1e-8, 1e-3, 0.7, 25.0, 1e4] {
                let t = f.inverse_derivative(s).unwrap();
                assert_relative_eq!(f.derivative(t), s, max_relative = 1e-10);
            }
        }
    }
}
