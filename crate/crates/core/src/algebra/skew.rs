use std::collections::BTreeSet;

use num_complex::Complex64;

use super::{BiPoly, Scalar, UniPoly};
use crate::error::{Error, Result};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e12;

/// `f(z, w) = (p(z), q(z, w))` with a superattracting fixed point at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewProduct {
    p: UniPoly,
    q: BiPoly,
}

impl SkewProduct {
    /// Requires `p = a z^δ + ...` with `δ ≥ 2`, `q ≠ 0`, and every term of `q`
    /// of total degree at least 2 except a possible `z` term.
    pub fn new(p: UniPoly, q: BiPoly) -> Result<SkewProduct> {
        let delta = p.low_degree().ok_or_else(|| Error::InvalidMap("p is zero".into()))?;
        if delta < 2 {
            return Err(Error::InvalidMap(format!("p has order {delta} at the origin, need at least 2")));
        }
        if q.is_zero() {
            return Err(Error::InvalidMap("q is zero".into()));
        }
        for (i, j) in q.support() {
            if i + j < 2 && (i, j) != (1, 0) {
                return Err(Error::InvalidMap(format!(
                    "term z^{i} w^{j} of q breaks superattraction at the origin"
                )));
            }
        }
        Ok(SkewProduct { p, q })
    }

    /// No validation; for blow-up results and general polynomial maps.
    pub fn new_unchecked(p: UniPoly, q: BiPoly) -> SkewProduct {
        SkewProduct { p, q }
    }

    /// `(z^δ, b z^γ w^d)`.
    pub fn monomial(delta: u32, gamma: u32, d: u32) -> Result<SkewProduct> {
        SkewProduct::new(
            UniPoly::monomial(delta, Complex64::new(1.0, 0.0)),
            BiPoly::new([((gamma, d), Complex64::new(1.0, 0.0))]),
        )
    }

    pub fn p(&self) -> &UniPoly {
        &self.p
    }

    pub fn q(&self) -> &BiPoly {
        &self.q
    }

    /// Order of `p` at the origin.
    pub fn delta(&self) -> u32 {
        self.p.low_degree().unwrap_or(0)
    }

    /// Leading coefficient `a` of `p = a z^δ + ...`.
    pub fn a(&self) -> Complex64 {
        self.p.coeff(self.delta())
    }

    pub fn eval<S: Scalar>(&self, z: S, w: S) -> (S, S) {
        (self.p.eval(z), self.q.eval(z, w))
    }
}

pub fn eval_skew(f: &SkewProduct, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
    f.eval(z, w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPoint {
    pub z: Complex64,
    pub w: Complex64,
    /// Last point: a coordinate exceeded the escape radius.
    pub escaped: bool,
    /// Last point: a coordinate is NaN or infinite.
    pub overflow: bool,
    /// A nonzero coordinate fell below `1e-290`; its logs are no longer reliable in f64.
    pub underflow: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub points: Vec<OrbitPoint>,
}

impl Orbit {
    pub fn escaped(&self) -> bool {
        self.points.last().is_some_and(|p| p.escaped || p.overflow)
    }
}

fn underflowing(c: Complex64) -> bool {
    c != Complex64::new(0.0, 0.0) && c.norm() < 1e-290
}

/// Forward orbit `x_0 .. x_n` in plain f64. Stops early at the first point that is
/// non-finite or beyond `escape_radius`; that point is included and flagged.
pub fn iterate(f: &SkewProduct, z: Complex64, w: Complex64, n_max: usize, escape_radius: f64) -> Orbit {
    let mut points = Vec::with_capacity(n_max + 1);
    let (mut z, mut w) = (z, w);
    for n in 0..=n_max {
        let finite = z.re.is_finite() && z.im.is_finite() && w.re.is_finite() && w.im.is_finite();
        let escaped = finite && (z.norm() > escape_radius || w.norm() > escape_radius);
        points.push(OrbitPoint {
            z,
            w,
            escaped,
            overflow: !finite,
            underflow: underflowing(z) || underflowing(w),
        });
        if !finite || escaped || n == n_max {
            break;
        }
        (z, w) = f.eval(z, w);
    }
    Orbit { points }
}

/// Exponent support of `q` and the order `δ` of `p`.
pub fn as_rational_geometry(f: &SkewProduct) -> (BTreeSet<(u32, u32)>, u32) {
    (f.q.support().collect(), f.delta())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn zw3() -> SkewProduct {
        SkewProduct::new(UniPoly::monomial(2, c(1.0)), BiPoly::new([((1, 3), c(1.0))])).unwrap()
    }

    #[test]
    fn validation() {
        let p2 = UniPoly::monomial(2, c(1.0));
        assert!(SkewProduct::new(UniPoly::monomial(1, c(1.0)), BiPoly::new([((0, 2), c(1.0))])).is_err());
        assert!(SkewProduct::new(p2.clone(), BiPoly::default()).is_err());
        assert!(SkewProduct::new(p2.clone(), BiPoly::new([((0, 1), c(1.0))])).is_err());
        assert!(SkewProduct::new(p2.clone(), BiPoly::new([((0, 0), c(1.0))])).is_err());
        assert!(SkewProduct::new(p2.clone(), BiPoly::new([((1, 0), c(1.0))])).is_ok());
        // general maps still iterate
        let g = SkewProduct::new_unchecked(p2, BiPoly::new([((0, 2), c(1.0)), ((0, 0), c(2.0))]));
        assert_eq!(g.eval(c(1.0), c(1.0)), (c(1.0), c(3.0)));
    }

    #[test]
    fn eval_and_iterate() {
        let f = zw3();
        assert_eq!(eval_skew(&f, c(0.0), c(1.0)), (c(0.0), c(0.0)));
        let orbit = iterate(&f, c(0.5), c(0.5), 2, DEFAULT_ESCAPE_RADIUS);
        let got: Vec<_> = orbit.points.iter().map(|p| (p.z.re, p.w.re)).collect();
        assert_eq!(got, vec![(0.5, 0.5), (0.25, 0.0625), (0.0625, 6.103515625e-5)]);
        assert!(!orbit.escaped());
    }

    #[test]
    fn iterate_stops_at_escape() {
        let f = SkewProduct::new_unchecked(
            UniPoly::monomial(2, c(1.0)),
            BiPoly::new([((0, 2), c(1.0)), ((0, 0), c(2.0))]),
        );
        let orbit = iterate(&f, c(0.0), c(0.0), 64, DEFAULT_ESCAPE_RADIUS);
        let last = orbit.points.last().unwrap();
        assert!(last.escaped && last.w.norm() > 1e12);
        assert!(orbit.points[..orbit.points.len() - 1].iter().all(|p| !p.escaped));
        assert!(orbit.points.len() < 10);
    }

    #[test]
    fn geometry() {
        let (s, d) = as_rational_geometry(&zw3());
        assert_eq!(d, 2);
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![(1, 3)]);
    }
}
