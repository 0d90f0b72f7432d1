//! Truncated Taylor arithmetic in one real variable.
//!
//! A [`Jet`] stores the Taylor coefficients `f(x0), f'(x0), f''(x0)/2!, ...`
//! up to [`MAX_ORDER`]. Arithmetic on jets is exact polynomial arithmetic
//! truncated at that order, so pushing a jet through a closed-form expression
//! yields its derivatives to rounding error.

use core::ops::{Add, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

/// Highest derivative order carried by a jet.
pub const MAX_ORDER: usize = 4;
const LEN: usize = MAX_ORDER + 1;

/// Real truncated Taylor series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet(pub [f64; LEN]);

impl Jet {
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = value;
        Jet(c)
    }

    /// The independent variable `x0 + t`.
    pub fn variable(value: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = value;
        c[1] = 1.0;
        Jet(c)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `d^k f / dx^k` at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.0[k] * fact
    }

    pub fn scale(self, s: f64) -> Self {
        let mut c = self.0;
        c.iter_mut().for_each(|x| *x *= s);
        Jet(c)
    }

    pub fn add_const(mut self, s: f64) -> Self {
        self.0[0] += s;
        self
    }

    pub fn recip(self) -> Self {
        Jet::constant(1.0).div(self)
    }

    pub fn div(self, rhs: Self) -> Self {
        let a = self.0;
        let b = rhs.0;
        let mut q = [0.0; LEN];
        for k in 0..LEN {
            let mut acc = a[k];
            for j in 1..=k {
                acc -= b[j] * q[k - j];
            }
            q[k] = acc / b[0];
        }
        Jet(q)
    }

    /// Square root; the expansion point must be strictly positive.
    pub fn sqrt(self) -> Self {
        let x = self.0;
        let mut y = [0.0; LEN];
        y[0] = x[0].sqrt();
        for k in 1..LEN {
            let mut acc = x[k];
            for j in 1..k {
                acc -= y[j] * y[k - j];
            }
            y[k] = acc / (2.0 * y[0]);
        }
        Jet(y)
    }

    /// `(sin u, cos u)`.
    pub fn sin_cos(self) -> (Self, Self) {
        self.trig_pair(-1.0)
    }

    /// `(sinh u, cosh u)`.
    pub fn sinh_cosh(self) -> (Self, Self) {
        self.trig_pair(1.0)
    }

    // s' = c u', c' = sign * s u'
    fn trig_pair(self, sign: f64) -> (Self, Self) {
        let u = self.0;
        let mut s = [0.0; LEN];
        let mut c = [0.0; LEN];
        if sign < 0.0 {
            s[0] = u[0].sin();
            c[0] = u[0].cos();
        } else {
            s[0] = u[0].sinh();
            c[0] = u[0].cosh();
        }
        for k in 1..LEN {
            let mut ds = 0.0;
            let mut dc = 0.0;
            for j in 1..=k {
                let ju = j as f64 * u[j];
                ds += ju * c[k - j];
                dc += ju * s[k - j];
            }
            s[k] = ds / k as f64;
            c[k] = sign * dc / k as f64;
        }
        (Jet(s), Jet(c))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = self.0;
        c.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        Jet(c)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut c = self.0;
        c.iter_mut().zip(rhs.0).for_each(|(a, b)| *a -= b);
        Jet(c)
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
        let a = self.0;
        let b = rhs.0;
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            for j in 0..=k {
                c[k] += a[j] * b[k - j];
            }
        }
        Jet(c)
    }
}

/// Complex truncated Taylor series in a real variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CJet {
    pub re: Jet,
    pub im: Jet,
}

impl CJet {
    pub fn new(re: Jet, im: Jet) -> Self {
        CJet { re, im }
    }

    pub fn real(re: Jet) -> Self {
        CJet { re, im: Jet::constant(0.0) }
    }

    pub fn constant(re: f64, im: f64) -> Self {
        CJet { re: Jet::constant(re), im: Jet::constant(im) }
    }

    /// `exp(-i theta)` for a real jet `theta`.
    pub fn expi_neg(theta: Jet) -> Self {
        let (s, c) = theta.sin_cos();
        CJet { re: c, im: -s }
    }

    pub fn conj(self) -> Self {
        CJet { re: self.re, im: -self.im }
    }

    /// Multiply by `i`.
    pub fn mul_i(self) -> Self {
        CJet { re: -self.im, im: self.re }
    }

    pub fn scale(self, s: f64) -> Self {
        CJet { re: self.re.scale(s), im: self.im.scale(s) }
    }

    pub fn mul_real(self, r: Jet) -> Self {
        CJet { re: self.re * r, im: self.im * r }
    }

    /// `|z|^2` as a real jet.
    pub fn norm_sqr(self) -> Jet {
        self.re * self.re + self.im * self.im
    }

    pub fn value(&self) -> crate::Complex {
        crate::Complex::new(self.re.value(), self.im.value())
    }
}

impl Add for CJet {
    type Output = CJet;
    fn add(self, rhs: CJet) -> CJet {
        CJet { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Mul for CJet {
    type Output = CJet;
    fn mul(self, rhs: CJet) -> CJet {
        CJet {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}
