//! Truncated Taylor series ("jets") for exact forward-mode differentiation.
//!
//! A [`Jet`] stores the Taylor coefficients `c[k] = f^(k)(x) / k!` of a
//! function at a point. Closed-form profiles are evaluated on a jet seeded with
//! [`Jet::variable`], which yields every derivative up to [`JET_LEN`] - 1 at
//! rounding-level accuracy.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Number of stored Taylor coefficients.
pub const JET_LEN: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; JET_LEN],
}

impl Jet {
    pub const ZERO: Jet = Jet { c: [0.0; JET_LEN] };

    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Jet { c }
    }

    /// The identity function seeded at `x`.
    pub fn variable(x: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x;
        c[1] = 1.0;
        Jet { c }
    }

    pub fn from_coeffs(c: [f64; JET_LEN]) -> Self {
        Jet { c }
    }

    pub fn coeffs(&self) -> &[f64; JET_LEN] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative, i.e. `k! * c[k]`.
    pub fn derivative(&self, k: usize) -> f64 {
        if k >= JET_LEN {
            return f64::NAN;
        }
        self.c[k] * factorial(k)
    }

    /// Jet of the derivative. The top coefficient is lost and set to NaN so that
    /// reading past the available order is never silently zero.
    pub fn differentiate(&self) -> Self {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN - 1 {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        c[JET_LEN - 1] = f64::NAN;
        Jet { c }
    }

    pub fn is_finite(&self) -> bool {
        self.c[0].is_finite()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Jet { c }
    }

    pub fn recip(&self) -> Self {
        Jet::constant(1.0) / *self
    }

    pub fn sqrt(&self) -> Self {
        let a = &self.c;
        let mut s = [0.0; JET_LEN];
        s[0] = a[0].sqrt();
        for k in 1..JET_LEN {
            let mut acc = a[k];
            for j in 1..k {
                acc -= s[j] * s[k - j];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        Jet { c: s }
    }

    /// `self^p` for real `p`; requires a nonzero value.
    pub fn powf(&self, p: f64) -> Self {
        let a = &self.c;
        let mut y = [0.0; JET_LEN];
        y[0] = a[0].powf(p);
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += (p * j as f64 - (k - j) as f64) * a[j] * y[k - j];
            }
            y[k] = acc / (k as f64 * a[0]);
        }
        Jet { c: y }
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut out = Jet::constant(1.0);
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    pub fn sin_cos(&self) -> (Self, Self) {
        let u = &self.c;
        let mut s = [0.0; JET_LEN];
        let mut c = [0.0; JET_LEN];
        s[0] = u[0].sin();
        c[0] = u[0].cos();
        for k in 1..JET_LEN {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                ds += j as f64 * u[j] * c[k - j];
                dc -= j as f64 * u[j] * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = dc / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn asin(&self) -> Self {
        let w = (Jet::constant(1.0) - *self * *self).sqrt().recip();
        let mut y = self.integrate_against(&w);
        y.c[0] = self.c[0].asin();
        y
    }

    pub fn acos(&self) -> Self {
        let mut y = self.asin().scale(-1.0);
        y.c[0] = self.c[0].acos();
        y
    }

    /// Treat `self` as Taylor coefficients about `inner.value()` and compose
    /// with `inner`. Coefficient `k` only feeds orders `>= k`, so a NaN marking
    /// an unavailable top order never leaks into lower ones.
    pub fn compose(&self, inner: Jet) -> Self {
        let mut d = inner;
        d.c[0] = 0.0;
        let mut out = [0.0; JET_LEN];
        out[0] = self.c[0];
        let mut pow = d;
        for k in 1..JET_LEN {
            for j in k..JET_LEN {
                if pow.c[j] != 0.0 {
                    out[j] += self.c[k] * pow.c[j];
                }
            }
            pow = pow * d;
        }
        Jet { c: out }
    }

    /// Coefficients of `y` with `y' = u' * w`, leaving `y[0]` at zero.
    fn integrate_against(&self, w: &Jet) -> Self {
        let u = &self.c;
        let mut y = [0.0; JET_LEN];
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * u[j] * w.c[k - j];
            }
            y[k] = acc / k as f64;
        }
        Jet { c: y }
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.c;
        c.iter_mut().zip(rhs.c.iter()).for_each(|(a, b)| *a += b);
        Jet { c }
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum();
        }
        Jet { c }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = self.c[k];
            for j in 0..k {
                acc -= c[j] * rhs.c[k - j];
            }
            c[k] = acc / rhs.c[0];
        }
        Jet { c }
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn polynomial_derivatives() {
        // f(x) = x^3 - 2x at x = 1.5
        let x = Jet::variable(1.5);
        let f = x * x * x - x * 2.0;
        assert!(close(f.value(), 0.375, 1e-15));
        assert!(close(f.derivative(1), 3.0 * 2.25 - 2.0, 1e-15));
        assert!(close(f.derivative(2), 9.0, 1e-15));
        assert!(close(f.derivative(3), 6.0, 1e-15));
        assert_eq!(f.derivative(4), 0.0);
    }

    #[test]
    fn elementary_functions_match_known_derivatives() {
        let x0 = 0.3;
        let x = Jet::variable(x0);
        let s = x.sin();
        assert!(close(s.derivative(3), -x0.cos(), 1e-14));
        let a = x.asin();
        assert!(close(a.derivative(1), 1.0 / (1.0 - x0 * x0).sqrt(), 1e-14));
        assert!(close(
            a.derivative(2),
            x0 / (1.0 - x0 * x0).powf(1.5),
            1e-14
        ));
        let r = x.sqrt();
        assert!(close(r.derivative(2), -0.25 * x0.powf(-1.5), 1e-14));
        let p = x.powf(-2.5);
        assert!(close(p.derivative(2), 2.5 * 3.5 * x0.powf(-4.5), 1e-13));
        let q = (Jet::constant(1.0) + x).recip();
        assert!(close(q.derivative(3), -6.0 / (1.0 + x0).powi(4), 1e-13));
    }

    #[test]
    fn sin_of_asin_is_identity() {
        let x = Jet::variable(0.7);
        let y = x.asin().sin();
        assert!(close(y.value(), 0.7, 1e-15));
        assert!(close(y.derivative(1), 1.0, 1e-13));
        for k in 2..6 {
            assert!(
                y.derivative(k).abs() < 1e-10,
                "order {k}: {}",
                y.derivative(k)
            );
        }
    }

    #[test]
    fn differentiate_shifts_coefficients() {
        let x = Jet::variable(0.4);
        let f = x.powi(4);
        let d = f.differentiate();
        assert!(close(d.value(), 4.0 * 0.4f64.powi(3), 1e-15));
        assert!(close(d.derivative(1), 12.0 * 0.16, 1e-15));
        assert!(d.coeffs()[JET_LEN - 1].is_nan());
    }

    #[test]
    fn composition_is_the_chain_rule() {
        // sin about 0.4, composed with y = x^2 seeded at x = 0.4^0.5
        let x0 = 0.4f64.sqrt();
        let x = Jet::variable(x0);
        let outer = Jet::variable(0.4).sin();
        let direct = (x * x).sin();
        let composed = outer.compose(x * x);
        for k in 0..JET_LEN {
            assert!(
                close(composed.coeffs()[k], direct.coeffs()[k], 1e-13),
                "order {k}"
            );
        }
    }

    #[test]
    fn composition_keeps_nan_in_top_order() {
        let d = Jet::variable(0.5).powi(3).differentiate();
        let c = d.compose(Jet::constant(0.5));
        assert_eq!(c.value(), 0.75);
        assert!(c.coeffs()[1..].iter().all(|v| *v == 0.0));
    }
}
