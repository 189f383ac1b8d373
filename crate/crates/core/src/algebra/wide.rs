//! Complex numbers with a separate binary exponent.
//!
//! Orbits near a superattracting point shrink like `z^(δ^n)`, which leaves the
//! f64 range after a handful of steps. `Wide` keeps a normalized mantissa and an
//! `i128` exponent so logs of orbit points stay exact in their integer part.

use std::f64::consts::LN_2;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{Rational, Scalar};

/// Iteration should stop once a binary exponent exceeds this in magnitude:
/// exact exponent arithmetic with small rational weights stays inside `i128`.
pub const EXPONENT_LIMIT: i128 = 1 << 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wide {
    m: Complex64,
    e: i128,
}

pub(crate) fn ldexp(mut x: f64, mut k: i128) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    if k > 4000 {
        return x * f64::INFINITY;
    }
    if k < -4000 {
        return x * 0.0;
    }
    let step = 2f64.powi(1000);
    while k > 1000 {
        x *= step;
        k -= 1000;
    }
    while k < -1000 {
        x /= step;
        k += 1000;
    }
    x * 2f64.powi(k as i32)
}

// k with x * 2^-k in [0.5, 1), for finite x > 0
fn binary_exponent(x: f64) -> i128 {
    let bits = x.to_bits();
    let ex = ((bits >> 52) & 0x7ff) as i128;
    if ex == 0 {
        return binary_exponent(x * 2f64.powi(64)) - 64;
    }
    ex - 1022
}

impl Wide {
    pub const ZERO: Wide = Wide { m: Complex64 { re: 0.0, im: 0.0 }, e: 0 };
    pub const ONE: Wide = Wide { m: Complex64 { re: 0.5, im: 0.0 }, e: 1 };

    pub fn new(m: Complex64, e: i128) -> Wide {
        let s = m.re.abs().max(m.im.abs());
        if s == 0.0 {
            return Wide::ZERO;
        }
        if !s.is_finite() {
            return Wide { m, e };
        }
        let k = binary_exponent(s);
        Wide { m: Complex64::new(ldexp(m.re, -k), ldexp(m.im, -k)), e: e + k }
    }

    pub fn from_c64(c: Complex64) -> Wide {
        Wide::new(c, 0)
    }

    pub fn from_real(x: f64) -> Wide {
        Wide::new(Complex64::new(x, 0.0), 0)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.m
    }

    pub fn exponent(&self) -> i128 {
        self.e
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.m.re.is_finite() && self.m.im.is_finite()
    }

    /// Whether further products could push the exponent out of exact range.
    pub fn out_of_range(&self) -> bool {
        self.e.abs() > EXPONENT_LIMIT
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(ldexp(self.m.re, self.e), ldexp(self.m.im, self.e))
    }

    /// Natural log of the modulus; `-inf` at zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.m.norm().ln() + self.e as f64 * LN_2
    }

    pub fn arg(&self) -> f64 {
        self.m.arg()
    }

    /// `ln|self| - t ln|other|` with the exponent part combined exactly.
    /// Both arguments must be nonzero and `t` must have a small denominator.
    pub fn ln_abs_ratio_pow(&self, other: &Wide, t: Rational) -> f64 {
        let (n, d) = (*t.numer() as i128, *t.denom() as i128);
        let exact = d * self.e - n * other.e;
        let tf = n as f64 / d as f64;
        self.m.norm().ln() - tf * other.m.norm().ln() + (exact as f64 / d as f64) * LN_2
    }

    /// `ln|self| - t ln|other|` for an arbitrary real `t` (no exact exponent part).
    pub fn ln_abs_ratio_powf(&self, other: &Wide, t: f64) -> f64 {
        self.ln_abs() - t * other.ln_abs()
    }

    pub fn exp_of(c: Complex64) -> Wide {
        // e^c = 2^(c.re / ln2) * e^(i c.im); keep the integer part in the exponent
        let y = c.re / LN_2;
        if !y.is_finite() {
            return if y < 0.0 { Wide::ZERO } else { Wide::new(Complex64::new(f64::INFINITY, 0.0), 0) };
        }
        let k = y.floor();
        let frac = y - k;
        let mag = (frac * LN_2).exp();
        Wide::new(Complex64::from_polar(mag, c.im), k as i128)
    }

    /// Principal `k`-th root, with argument in `(-π/k, π/k]`.
    pub fn root(&self, k: u32) -> Wide {
        if self.is_zero() {
            return Wide::ZERO;
        }
        let k = k as i128;
        let q = self.e.div_euclid(k);
        let r = self.e.rem_euclid(k);
        let mag = (self.m.norm() * 2f64.powi(r as i32)).powf(1.0 / k as f64);
        let arg = self.m.arg() / k as f64;
        Wide::new(Complex64::from_polar(mag, arg), q)
    }

    pub fn scale(&self, c: Complex64) -> Wide {
        Wide::new(self.m * c, self.e)
    }

    /// `|self| < |other|`.
    pub fn abs_lt(&self, other: &Wide) -> bool {
        if self.is_zero() {
            return !other.is_zero();
        }
        if other.is_zero() {
            return false;
        }
        // mantissa moduli lie in [0.5, √2), so only exponent gaps above 1 decide alone
        let gap = self.e - other.e;
        if gap.abs() > 1 {
            return gap < 0;
        }
        self.m.norm() * 2f64.powi(gap as i32) < other.m.norm()
    }
}

impl From<Complex64> for Wide {
    fn from(c: Complex64) -> Wide {
        Wide::from_c64(c)
    }
}

impl Mul for Wide {
    type Output = Wide;
    fn mul(self, o: Wide) -> Wide {
        if self.is_zero() || o.is_zero() {
            return Wide::ZERO;
        }
        Wide::new(self.m * o.m, self.e + o.e)
    }
}

impl Div for Wide {
    type Output = Wide;
    fn div(self, o: Wide) -> Wide {
        if self.is_zero() {
            return Wide::ZERO;
        }
        Wide::new(self.m / o.m, self.e - o.e)
    }
}

impl Add for Wide {
    type Output = Wide;
    fn add(self, o: Wide) -> Wide {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (hi, lo) = if self.e >= o.e { (self, o) } else { (o, self) };
        let shift = lo.e - hi.e;
        if shift < -1100 {
            return hi;
        }
        let lm = Complex64::new(ldexp(lo.m.re, shift), ldexp(lo.m.im, shift));
        Wide::new(hi.m + lm, hi.e)
    }
}

impl Neg for Wide {
    type Output = Wide;
    fn neg(self) -> Wide {
        Wide { m: -self.m, e: self.e }
    }
}

impl Sub for Wide {
    type Output = Wide;
    fn sub(self, o: Wide) -> Wide {
        self + (-o)
    }
}

impl Scalar for Wide {
    fn zero() -> Self {
        Wide::ZERO
    }
    fn one() -> Self {
        Wide::ONE
    }
    fn from_c64(c: Complex64) -> Self {
        Wide::from_c64(c)
    }
}
