//! Böttcher coordinate `φ = lim f₀⁻ⁿ∘fⁿ` on a wedge, where `f₀ = (a z^δ, b z^γ w^d)`
//! is the dominant monomial part of `f`.
//!
//! Writing `fⁿ = f₀ⁿ` perturbed by the per-step log ratios
//! `μₖ = (Log p(zₖ)/(a zₖ^δ), Log q(zₖ, wₖ)/(b zₖ^γ wₖ^d))`, the limit telescopes to
//!
//! ```text
//! log φ = log(z, w) + Σₖ E^-(k+1) μₖ,    E = [[δ, 0], [γ, d]]
//! ```
//!
//! The logs are principal and taken on ratios near 1, which is the branch with
//! `f₀⁻ⁿ∘f₀ⁿ = id`; `a` and `b` drop out. With `E⁻¹ = [[1/δ, 0], [-γ/(δd), 1/d]]`
//! the off-diagonal entry of `E^-n` is `-γ Σ δ^-(i+1) d^-(n-i)`, which becomes
//! `-nγ/d^(n+1)` when `δ = d`.

use num_complex::Complex64;

use crate::algebra::{Scalar, SkewProduct, Wide};
use crate::error::{Error, Result};
use crate::green::GreenConfig;
use crate::newton::{Classification, DominantTerm};
use crate::regions::WedgeSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialMap {
    pub delta: u32,
    pub gamma: u32,
    pub d: u32,
    pub a: Complex64,
    pub b: Complex64,
}

impl MonomialMap {
    /// Evaluated exactly as the polynomial evaluator treats a single term.
    pub fn eval(&self, z: Wide, w: Wide) -> (Wide, Wide) {
        let z1 = Wide::from_c64(self.a) * z.ipow(self.delta);
        let w1 = (Wide::from_c64(self.b) * z.ipow(self.gamma)) * w.ipow(self.d);
        (z1, w1)
    }
}

fn nearest_root(x: Wide, k: u32, target: Wide) -> Wide {
    let principal = x.root(k);
    let mut best = principal;
    let mut best_dist = f64::INFINITY;
    for j in 0..k {
        let cand = principal.scale(Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / k as f64));
        let dist = (cand - target).ln_abs();
        if dist < best_dist {
            best = cand;
            best_dist = dist;
        }
    }
    best
}

/// `f₀⁻ⁿ(Z, W)`, inverting one step at a time. `trail` is a reference orbit
/// `x₀, .., x_{n-1}` leading to `(Z, W)`; at each step the root closest to the
/// matching trail point is taken.
pub fn monomial_inverse(f0: &MonomialMap, n: usize, z: Wide, w: Wide, trail: &[(Wide, Wide)]) -> Result<(Wide, Wide)> {
    if n == 0 {
        return Ok((z, w));
    }
    if trail.len() < n {
        return Err(Error::InvalidMap(format!("branch trail has {} points, need {n}", trail.len())));
    }
    if f0.d == 0 {
        return Err(Error::Regime("monomial part has d = 0, no inverse in w".into()));
    }
    let (mut zz, mut ww) = (z, w);
    for k in (0..n).rev() {
        if zz.is_zero() || ww.is_zero() {
            return Err(Error::Undefined("inverse of a point on a coordinate axis"));
        }
        let (tz, tw) = trail[k];
        let zp = nearest_root(zz.scale(1.0 / f0.a), f0.delta, tz);
        let wp = nearest_root(ww.scale(1.0 / f0.b) / zp.ipow(f0.gamma), f0.d, tw);
        (zz, ww) = (zp, wp);
    }
    Ok((zz, ww))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BottcherEstimate {
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub n_used: usize,
    /// Componentwise relative `|φ∘f - f₀∘φ| / |f₀∘φ|`.
    pub conj_residual: f64,
    /// `max(|φ1/z - 1|, |φ2/w - 1|)`.
    pub id_deviation: f64,
    /// No convergence theorem covers this regime (`d = 1` at a two-term vertex).
    pub no_theorem: bool,
}

type Mat = [[f64; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn apply(m: &Mat, v: [Complex64; 2]) -> [Complex64; 2] {
    [v[0] * m[0][0] + v[1] * m[0][1], v[0] * m[1][0] + v[1] * m[1][1]]
}

fn principal_log_ratio(num: Wide, den: Wide) -> Result<Complex64> {
    if den.is_zero() {
        return Err(Error::Undefined("dominant term vanishes along the orbit"));
    }
    let r = (num / den).to_c64();
    if r.norm() == 0.0 || !r.re.is_finite() || !r.im.is_finite() {
        return Err(Error::Undefined("dominant term does not dominate along the orbit"));
    }
    Ok(r.ln())
}

/// Böttcher coordinate at the classification's primary dominant term.
pub fn bottcher(f: &SkewProduct, c: &Classification, region: &WedgeSpec, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<BottcherEstimate> {
    bottcher_for_term(f, c, c.primary(), region, z, w, cfg)
}

/// Böttcher coordinate for a chosen dominant term; every orbit point used must stay in `region`.
pub fn bottcher_for_term(
    f: &SkewProduct,
    c: &Classification,
    term: &DominantTerm,
    region: &WedgeSpec,
    z: Complex64,
    w: Complex64,
    cfg: &GreenConfig,
) -> Result<BottcherEstimate> {
    let (delta, gamma, d) = (c.delta, term.gamma, term.d);
    if d == 0 {
        return Err(Error::Regime("d = 0: no Böttcher coordinate in w".into()));
    }
    let f0 = MonomialMap { delta, gamma, d, a: f.a(), b: f.q().coeff(gamma, d) };
    let no_theorem = c.flags.two_dominant_terms && d <= 1;
    let inv_e: Mat = [[1.0 / delta as f64, 0.0], [-(gamma as f64) / (delta as f64 * d as f64), 1.0 / d as f64]];

    let (z0, w0) = (Wide::from(z), Wide::from(w));
    let (s0, n_used) = log_correction(f, &f0, &inv_e, region, z0, w0, cfg)?;
    let phi1 = z0 * Wide::exp_of(s0[0]);
    let phi2 = w0 * Wide::exp_of(s0[1]);

    // φ at f(x) from its own orbit and its own stopping point
    let (z1, w1) = f.eval(z0, w0);
    let (s1, _) = log_correction(f, &f0, &inv_e, region, z1, w1, cfg)?;
    let (lhs1, lhs2) = (z1 * Wide::exp_of(s1[0]), w1 * Wide::exp_of(s1[1]));
    let (rhs1, rhs2) = f0.eval(phi1, phi2);
    let rel = |a: Wide, b: Wide| (a / b - Wide::ONE).to_c64().norm();
    let dev = |t: Complex64| (Wide::exp_of(t) - Wide::ONE).to_c64().norm();
    Ok(BottcherEstimate {
        phi1: phi1.to_c64(),
        phi2: phi2.to_c64(),
        n_used,
        conj_residual: rel(lhs1, rhs1).max(rel(lhs2, rhs2)),
        id_deviation: dev(s0[0]).max(dev(s0[1])),
        no_theorem,
    })
}

// Σₖ E^-(k+1) μₖ along the orbit of (z, w), folded from the tail.
fn log_correction(
    f: &SkewProduct,
    f0: &MonomialMap,
    inv_e: &Mat,
    region: &WedgeSpec,
    z: Wide,
    w: Wide,
    cfg: &GreenConfig,
) -> Result<([Complex64; 2], usize)> {
    if z.is_zero() || w.is_zero() {
        return Err(Error::Undefined("Böttcher coordinate on a coordinate axis"));
    }
    let mut mus: Vec<[Complex64; 2]> = Vec::new();
    let mut m = *inv_e;
    let mut small = 0;
    let (mut zn, mut wn) = (z, w);
    let mut converged = false;
    for n in 0..=cfg.n_max {
        if !region.contains_wide(zn, wn) {
            return Err(Error::LeftWedge(n));
        }
        let (pz, qz) = f.eval(zn, wn);
        let (dz, dw) = f0.eval(zn, wn);
        let mu = [principal_log_ratio(pz, dz)?, principal_log_ratio(qz, dw)?];
        let inc = apply(&m, mu);
        mus.push(mu);
        small = if inc[0].norm().max(inc[1].norm()) <= cfg.tol { small + 1 } else { 0 };
        if small >= 2 {
            converged = true;
            break;
        }
        if pz.is_zero() || qz.is_zero() || pz.out_of_range() || qz.out_of_range() {
            break;
        }
        (zn, wn) = (pz, qz);
        m = mat_mul(&m, inv_e);
    }
    if !converged && mus.len() < 3 {
        return Err(Error::Inconclusive("orbit too short for the Böttcher series".into()));
    }
    let mut acc = [Complex64::new(0.0, 0.0); 2];
    for mu in mus.iter().rev() {
        acc = apply(inv_e, [mu[0] + acc[0], mu[1] + acc[1]]);
    }
    Ok((acc, mus.len() - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, BiPoly, UniPoly};
    use crate::green::{g_p, g_z_alpha};
    use crate::newton::classify;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_round_trip() {
        let f0 = MonomialMap { delta: 2, gamma: 1, d: 3, a: c(1.0, 0.0), b: c(1.0, 0.0) };
        let start = (Wide::from(c(0.3, 0.2)), Wide::from(c(-0.1, 0.25)));
        assert_eq!(monomial_inverse(&f0, 0, start.0, start.1, &[]).unwrap(), start);
        let mut trail = vec![start];
        for n in 1..=8 {
            let (z, w) = trail[n - 1];
            let img = f0.eval(z, w);
            let back = monomial_inverse(&f0, n, img.0, img.1, &trail).unwrap();
            assert!(((back.0 - start.0).to_c64()).norm() < 1e-12);
            assert!(((back.1 - start.1).to_c64()).norm() < 1e-12);
            trail.push(img);
        }
    }

    #[test]
    fn identity_for_monomial() {
        for (delta, gamma, d) in [(2, 1, 3), (3, 1, 2), (2, 1, 2), (2, 0, 3)] {
            let f = SkewProduct::monomial(delta, gamma, d).unwrap();
            let cl = classify(&f).unwrap();
            let u = WedgeSpec::lower(rat(0, 1), 0.5);
            let e = bottcher(&f, &cl, &u, c(0.3, 0.1), c(0.2, -0.1), &GreenConfig::default()).unwrap();
            assert!(e.conj_residual < 1e-14, "{e:?}");
            assert_eq!(e.id_deviation, 0.0);
            assert_eq!((e.phi1, e.phi2), (c(0.3, 0.1), c(0.2, -0.1)));
        }
    }

    #[test]
    fn perturbed_case_two() {
        // (z², zw³ + w⁴): α = -1, primary term z w³
        let f = SkewProduct::new(
            UniPoly::monomial(2, c(1.0, 0.0)),
            BiPoly::new([((1, 3), c(1.0, 0.0)), ((0, 4), c(1.0, 0.0))]),
        )
        .unwrap();
        let cl = classify(&f).unwrap();
        let u = WedgeSpec::lower(rat(1, 1), 1e-2);
        let e = bottcher(&f, &cl, &u, c(5e-3, 1e-3), c(1e-5, 2e-5), &GreenConfig::default()).unwrap();
        assert!(e.conj_residual < 1e-8, "{e:?}");
        assert!(e.id_deviation < 1e-2);
        // log|φ1| = G_p and log|φ1^-α φ2| = G_z^α
        let gp = g_p(&f, c(5e-3, 1e-3), &GreenConfig::default()).value.to_f64();
        assert!((e.phi1.norm().ln() - gp).abs() < 1e-8);
        let ga = g_z_alpha(&f, &cl, c(5e-3, 1e-3), c(1e-5, 2e-5), &GreenConfig::default()).unwrap().value.to_f64();
        assert!(((e.phi1 * e.phi2).norm().ln() - ga).abs() < 1e-8);
    }

    #[test]
    fn rejects() {
        let f = SkewProduct::monomial(2, 1, 3).unwrap();
        let cl = classify(&f).unwrap();
        let u = WedgeSpec::lower(rat(1, 1), 1e-2);
        assert_eq!(bottcher(&f, &cl, &u, c(0.5, 0.0), c(0.5, 0.0), &GreenConfig::default()).unwrap_err(), Error::LeftWedge(0));
        let g = SkewProduct::new(
            UniPoly::monomial(2, c(1.0, 0.0)),
            BiPoly::new([((0, 4), c(1.0, 0.0)), ((2, 1), c(1.0, 0.0)), ((3, 0), c(1.0, 0.0))]),
        )
        .unwrap();
        let cg = classify(&g).unwrap();
        assert!(matches!(bottcher(&g, &cg, &u, c(1e-3, 0.0), c(1e-6, 0.0), &GreenConfig::default()), Err(Error::Regime(_))));
    }
}
