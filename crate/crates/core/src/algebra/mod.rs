//! Exact rationals, sparse complex polynomials, skew products and their orbits.

mod poly;
mod rational;
mod roots;
mod skew;
mod wide;

pub use poly::{BiPoly, Scalar, UniPoly};
pub use roots::poly_roots;
pub use rational::{parse_rational, rat, ratio_f64, Rational};
pub use skew::{as_rational_geometry, eval_skew, iterate, Orbit, OrbitPoint, SkewProduct, DEFAULT_ESCAPE_RADIUS};
pub use wide::{Wide, EXPONENT_LIMIT};

pub type ComplexScalar = num_complex::Complex64;
