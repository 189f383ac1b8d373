//! Fixtures shared by the benchmarks.

use num_complex::Complex64;
use skewprod::algebra::{BiPoly, UniPoly};
use skewprod::SkewProduct;

/// `(z^δ, Σ q)` with unit first coefficient.
pub fn real_map(delta: u32, q: &[((u32, u32), f64)]) -> SkewProduct {
    SkewProduct::new(
        UniPoly::monomial(delta, Complex64::new(1.0, 0.0)),
        BiPoly::new(q.iter().map(|&(k, b)| (k, Complex64::new(b, 0.0)))),
    )
    .expect("fixture maps are valid")
}

/// `(z³, w⁵ + z w² + z⁴)`, a Case 4 map.
pub fn case4() -> SkewProduct {
    real_map(3, &[((0, 5), 1.0), ((1, 2), 1.0), ((4, 0), 1.0)])
}

/// `(z⁴, z w³ + z² w²)`.
pub fn weighted_cubic() -> SkewProduct {
    real_map(4, &[((1, 3), 1.0), ((2, 2), 1.0)])
}
