use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;

/// Numbers a sparse polynomial can be evaluated over.
pub trait Scalar: Copy + Add<Output = Self> + Mul<Output = Self> {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_c64(c: Complex64) -> Self;

    fn ipow(self, mut n: u32) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            n >>= 1;
            if n > 0 {
                base = base * base;
            }
        }
        acc
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_c64(c: Complex64) -> Self {
        c
    }
}

/// Sparse one-variable polynomial. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UniPoly {
    coeffs: BTreeMap<u32, Complex64>,
}

impl UniPoly {
    pub fn new<I: IntoIterator<Item = (u32, Complex64)>>(terms: I) -> UniPoly {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        UniPoly { coeffs }
    }

    pub fn monomial(k: u32, c: Complex64) -> UniPoly {
        UniPoly::new([(k, c)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn low_degree(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn coeff(&self, k: u32) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn single_term(&self) -> Option<(u32, Complex64)> {
        if self.coeffs.len() == 1 {
            self.terms().next()
        } else {
            None
        }
    }

    /// Sparse Horner evaluation. A single term `c x^k` is evaluated as
    /// `c * x.ipow(k)`, so callers can reproduce it bit for bit.
    pub fn eval<S: Scalar>(&self, x: S) -> S {
        let mut it = self.coeffs.iter().rev();
        let Some((&top, &c0)) = it.next() else {
            return S::zero();
        };
        let mut acc = S::from_c64(c0);
        let mut prev = top;
        for (&k, &c) in it {
            acc = acc * x.ipow(prev - k) + S::from_c64(c);
            prev = k;
        }
        if prev > 0 {
            acc = acc * x.ipow(prev);
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(self.terms().filter(|&(k, _)| k > 0).map(|(k, c)| (k - 1, c * k as f64)))
    }
}

/// Sparse polynomial in `(z, w)`, keyed by the exponent pair `(i, j)` of `z^i w^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BiPoly {
    coeffs: BTreeMap<(u32, u32), Complex64>,
    // j -> coefficient of w^j as a polynomial in z
    fibers: BTreeMap<u32, UniPoly>,
}

impl BiPoly {
    pub fn new<I: IntoIterator<Item = ((u32, u32), Complex64)>>(terms: I) -> BiPoly {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        let mut grouped: BTreeMap<u32, Vec<(u32, Complex64)>> = BTreeMap::new();
        for (&(i, j), &c) in &coeffs {
            grouped.entry(j).or_default().push((i, c));
        }
        let fibers = grouped.into_iter().map(|(j, t)| (j, UniPoly::new(t))).collect();
        BiPoly { coeffs, fibers }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Complex64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn support(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn w_degree(&self) -> Option<u32> {
        self.fibers.keys().next_back().copied()
    }

    /// The coefficient polynomials `c_j(z)` with `q = Σ c_j(z) w^j`.
    pub fn fibers(&self) -> impl Iterator<Item = (u32, &UniPoly)> + '_ {
        self.fibers.iter().map(|(&j, p)| (j, p))
    }

    /// Values `c_j(z)` of the fiber coefficients, ascending in `j`.
    pub fn fiber_coeffs<S: Scalar>(&self, z: S) -> Vec<(u32, S)> {
        self.fibers.iter().map(|(&j, p)| (j, p.eval(z))).collect()
    }

    /// Horner in `w` over the fiber coefficients, each evaluated by sparse Horner in `z`.
    /// A single term `b z^i w^j` evaluates as `(b * z.ipow(i)) * w.ipow(j)`.
    pub fn eval<S: Scalar>(&self, z: S, w: S) -> S {
        let mut it = self.fibers.iter().rev();
        let Some((&top, p0)) = it.next() else {
            return S::zero();
        };
        let mut acc = p0.eval(z);
        let mut prev = top;
        for (&j, p) in it {
            acc = acc * w.ipow(prev - j) + p.eval(z);
            prev = j;
        }
        if prev > 0 {
            acc = acc * w.ipow(prev);
        }
        acc
    }
}
