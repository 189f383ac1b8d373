//! Named verification suites behind `verify --suite`. Each returns a list of
//! checks; the metric functions are public so tests can pin their own limits.

use std::collections::BTreeSet;
use std::fmt;

use anyhow::{anyhow, Result};
use num_complex::Complex64;
use rand::Rng;
use skewprod::algebra::{eval_skew, rat, BiPoly, Rational, UniPoly};
use skewprod::green::estimate;
use skewprod::newton::NewtonPolygon;
use skewprod::oracles::{
    build_semiconjugate, g_h_infty_plus, hull_vertices_brute_force, julia_membership, monomial_reference, semiconjugate_iterate, Membership,
    OneDimPoly, SemiconjugateKind, SemiconjugateSpec,
};
use skewprod::regions::{sample_rng, verify_invariance, ViolationReport};
use skewprod::weights::{d_value, invariance_radii};
use skewprod::{classify, GreenKind, GreenValue, SkewProduct, WedgeSpec};

use crate::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", if self.pass { "pass" } else { "FAIL" }, self.name, self.detail)
    }
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

pub const SUITES: [&str; 4] = ["monomial", "invariance", "hull", "semiconjugate"];

pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<Vec<Check>> {
    match name {
        "monomial" => Ok(monomial_suite(cfg)),
        "invariance" => invariance_suite(cfg),
        "hull" => Ok(hull_suite(cfg)),
        "semiconjugate" => semiconjugate_suite(cfg),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
        _ => Err(anyhow!("unknown suite {name:?}; expected one of {}, all", SUITES.join(", "))),
    }
}

// ---- monomial maps against their closed forms ----

/// `(δ, γ, d)`: γ > 0 and γ = 0, each with δ < d, δ = d, δ > d.
pub const MONOMIAL_REGIMES: [(u32, u32, u32); 6] = [(2, 1, 3), (2, 1, 2), (3, 1, 2), (2, 0, 3), (2, 0, 2), (3, 0, 2)];
pub const MONOMIAL_KINDS: [GreenKind; 5] = [GreenKind::P, GreenKind::Alpha, GreenKind::Infty, GreenKind::Z, GreenKind::F];

#[derive(Debug, Clone, PartialEq)]
pub struct MonomialComparison {
    pub regime: (u32, u32, u32),
    pub kind: GreenKind,
    /// Points where the closed form applies.
    pub compared: usize,
    pub worst: f64,
    /// Points where the estimator errored, or one side was infinite and the other not.
    pub mismatched: usize,
}

/// Seeded generic points with `|z| ∈ (0.2, 0.9)` and `|w| ∈ (0.1, 1.9)`.
pub fn generic_points(n: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
    (0..n as u64)
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let z = Complex64::from_polar(rng.gen_range(0.2..0.9), rng.gen_range(-3.1..3.1));
            let w = Complex64::from_polar(rng.gen_range(0.1..1.9), rng.gen_range(-3.1..3.1));
            (z, w)
        })
        .collect()
}

pub fn monomial_comparisons(points_per_regime: usize, seed: u64, cfg: &RunConfig) -> Vec<MonomialComparison> {
    let pts = generic_points(points_per_regime, seed);
    let mut out = Vec::new();
    for (delta, gamma, d) in MONOMIAL_REGIMES {
        let f = SkewProduct::monomial(delta, gamma, d).expect("monomial regimes are valid maps");
        let c = classify(&f).expect("monomials classify");
        for kind in MONOMIAL_KINDS {
            let mut cmp = MonomialComparison { regime: (delta, gamma, d), kind, compared: 0, worst: 0.0, mismatched: 0 };
            for &(z, w) in &pts {
                let Ok(reference) = monomial_reference(delta, gamma, d, kind, z, w) else { continue };
                cmp.compared += 1;
                match (estimate(&f, &c, kind, z, w, &cfg.green()).map(|e| e.value), reference) {
                    (Ok(GreenValue::Finite(a)), GreenValue::Finite(b)) => cmp.worst = cmp.worst.max((a - b).abs()),
                    (Ok(a), b) if a == b => {}
                    _ => cmp.mismatched += 1,
                }
            }
            out.push(cmp);
        }
    }
    out
}

fn monomial_suite(cfg: &RunConfig) -> Vec<Check> {
    monomial_comparisons(10, cfg.seed, cfg)
        .into_iter()
        .filter(|m| m.compared > 0)
        .map(|m| {
            let (a, b, c) = m.regime;
            check(
                format!("monomial.{a}_{b}_{c}.{}", m.kind.name()),
                m.worst <= 1e-8 && m.mismatched == 0,
                format!("points={} worst={:e} mismatched={}", m.compared, m.worst, m.mismatched),
            )
        })
        .collect()
}

// ---- invariance of lower wedges ----

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceCase {
    pub name: String,
    pub map: SkewProduct,
    pub wedge: WedgeSpec,
}

impl InvarianceCase {
    pub fn inflated(&self, factor: f64) -> WedgeSpec {
        match self.wedge {
            WedgeSpec::Lower { l, r1, r2 } => WedgeSpec::Lower { l, r1: r1 * factor, r2: r2 * factor },
            ref other => other.clone(),
        }
    }
}

fn real_map(delta: u32, q: &[((u32, u32), f64)]) -> SkewProduct {
    let one = Complex64::new(1.0, 0.0);
    SkewProduct::new(UniPoly::monomial(delta, one), BiPoly::new(q.iter().map(|&(k, b)| (k, Complex64::new(b, 0.0))))).expect("valid map")
}

/// Lower wedge at weight `l` with `r2` given and `r1` from the sufficient inequality.
pub fn witness_wedge(f: &SkewProduct, l: Rational, r2: f64) -> Result<WedgeSpec> {
    let c = classify(f)?;
    let dv = d_value(f.q(), l)?;
    let r = invariance_radii(f, &c, &dv, r2)?;
    Ok(WedgeSpec::Lower { l, r1: r.r1, r2: r.r2 })
}

/// `(z², zw³ + z⁵)` at weight 1 and the Case 4 family `(z³, w⁵ + zw² + c z⁴)` at weight 1/2.
pub fn invariance_cases() -> Result<Vec<InvarianceCase>> {
    let mut out = Vec::new();
    let f = real_map(2, &[((1, 3), 1.0), ((5, 0), 1.0)]);
    out.push(InvarianceCase { name: "z2_zw3+z5_l1".into(), wedge: witness_wedge(&f, rat(1, 1), 0.1)?, map: f });
    for cc in [0.5, 1.0, 2.0] {
        let f = real_map(3, &[((0, 5), 1.0), ((1, 2), 1.0), ((4, 0), cc)]);
        out.push(InvarianceCase { name: format!("case4_c{cc}_l1/2"), wedge: witness_wedge(&f, rat(1, 2), 0.1)?, map: f });
    }
    Ok(out)
}

fn invariance_suite(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for case in invariance_cases()? {
        let rep = verify_invariance(&case.map, &case.wedge, 10_000, cfg.seed)?;
        out.push(check(format!("invariance.{}", case.name), rep.passed(), report_detail(&case.wedge, &rep)));
        let big = case.inflated(10.0);
        let rep = verify_invariance(&case.map, &big, 10_000, cfg.seed)?;
        out.push(check(format!("invariance.{}.inflated", case.name), !rep.passed(), report_detail(&big, &rep)));
    }
    Ok(out)
}

pub fn report_detail(spec: &WedgeSpec, rep: &ViolationReport) -> String {
    format!("[{spec}] checked={} skipped={} violations={}", rep.checked, rep.skipped, rep.violations.len())
}

// ---- Newton polygon against the brute-force hull ----

/// Seeded support with 1 to 12 distinct points, exponents at most 9.
pub fn random_support(seed: u64, index: u64) -> BTreeSet<(u32, u32)> {
    let mut rng = sample_rng(seed, index);
    let n = rng.gen_range(1..=12);
    (0..n).map(|_| (rng.gen_range(0..=9u32), rng.gen_range(0..=9u32))).collect()
}

/// `j`-axis intercept of the line through two vertices, written independently
/// of the library's form.
fn intercept(a: (u32, u32), b: (u32, u32)) -> Rational {
    let (n0, m0, n1, m1) = (a.0 as i64, a.1 as i64, b.0 as i64, b.1 as i64);
    Rational::new(m0 * n1 - m1 * n0, n1 - n0)
}

/// Index and description of every support where the two disagree.
pub fn hull_mismatches(count: u64, seed: u64) -> Vec<(u64, String)> {
    let mut bad = Vec::new();
    for k in 0..count {
        let s = random_support(seed, k);
        let want = hull_vertices_brute_force(&s);
        let want_t: Vec<Rational> = want.windows(2).map(|v| intercept(v[0], v[1])).collect();
        match NewtonPolygon::from_support(s.iter().copied()) {
            Ok(p) if p.vertices() == want.as_slice() && p.intercepts() == want_t.as_slice() => {}
            Ok(p) => bad.push((k, format!("{:?} gave {:?} want {:?}", s, p.vertices(), want))),
            Err(e) => bad.push((k, format!("{s:?}: {e}"))),
        }
    }
    bad
}

fn hull_suite(cfg: &RunConfig) -> Vec<Check> {
    let bad = hull_mismatches(1000, cfg.seed);
    let detail = match bad.first() {
        None => "supports=1000 mismatches=0".to_string(),
        Some((k, d)) => format!("supports=1000 mismatches={} first=#{k} {d}", bad.len()),
    };
    vec![check("hull.brute_force", bad.is_empty(), detail)]
}

// ---- semiconjugate examples ----

/// `h(w) = w³ + w²`.
pub fn cubic_h() -> OneDimPoly {
    let one = Complex64::new(1.0, 0.0);
    OneDimPoly::new(UniPoly::new([(3, one), (2, one)])).expect("monic cubic")
}

/// `(z⁴, z w³ + z² w²)`, semiconjugate to `(z⁴, w³ + w²)` with weight 1.
pub fn degenerate_example() -> SemiconjugateSpec {
    SemiconjugateSpec { h: cubic_h(), alpha: 1, delta: 4, kind: SemiconjugateKind::Degenerate }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TransportStats {
    pub cells: usize,
    pub band: usize,
    /// Worst `|G_z^{α,+} − G_h^{∞,+}(w/z^α)|` over cells outside the band.
    pub max_error: f64,
    /// Cells outside the band where positivity of `G_z^{α,+}` disagrees with escape under `h`.
    pub sign_disagreements: usize,
    /// Cells whose positivity differs from a 4-neighbour yet lie outside the band.
    pub locus_outside_band: usize,
    pub estimator_errors: usize,
}

/// Compare `G_z^{α,+}` on the fiber over `z` with the one-variable escape rate
/// on an `n × n` grid of `w ∈ [-1, 1]²`.
///
/// The band is the set of cells whose one-variable label is undecided within
/// `cfg.n_max` steps or differs from a neighbouring cell's: a declared
/// thickening of `z^α J_h` at the grid resolution.
pub fn transport_grid(spec: &SemiconjugateSpec, z: Complex64, n: usize, cfg: &RunConfig) -> Result<TransportStats> {
    let f = build_semiconjugate(spec)?;
    let c = classify(&f)?;
    let za = z.powi(spec.alpha as i32);
    let step = 2.0 / n as f64;
    let at = |ix: usize, iy: usize| Complex64::new(-1.0 + (ix as f64 + 0.5) * step, 1.0 - (iy as f64 + 0.5) * step);
    let cells: Vec<(Membership, Option<f64>, f64)> = cfg.install(|| {
        use rayon::prelude::*;
        (0..n * n)
            .into_par_iter()
            .map(|k| {
                let w = at(k % n, k / n);
                let u = w / za;
                let m = julia_membership(&spec.h, u, cfg.n_max);
                let g2 = estimate(&f, &c, GreenKind::AlphaPlus, z, w, &cfg.green()).ok().and_then(|e| e.value.finite());
                let g1 = g_h_infty_plus(&spec.h, u, cfg.n_max, cfg.tol).value.to_f64();
                (m, g2, g1)
            })
            .collect()
    })?;
    let idx = |ix: usize, iy: usize| iy * n + ix;
    let neighbours = |ix: usize, iy: usize| {
        let mut v = Vec::with_capacity(4);
        if ix > 0 {
            v.push(idx(ix - 1, iy));
        }
        if ix + 1 < n {
            v.push(idx(ix + 1, iy));
        }
        if iy > 0 {
            v.push(idx(ix, iy - 1));
        }
        if iy + 1 < n {
            v.push(idx(ix, iy + 1));
        }
        v
    };
    let mut s = TransportStats { cells: n * n, ..Default::default() };
    for iy in 0..n {
        for ix in 0..n {
            let k = idx(ix, iy);
            let (m, g2, g1) = cells[k];
            let nb = neighbours(ix, iy);
            let in_band = m == Membership::BoundaryBand || nb.iter().any(|&j| cells[j].0 != m);
            let Some(g2) = g2 else {
                s.estimator_errors += 1;
                continue;
            };
            let positive = g2 > 0.0;
            let locus = nb.iter().any(|&j| cells[j].1.is_some_and(|o| (o > 0.0) != positive));
            if in_band {
                s.band += 1;
                continue;
            }
            s.max_error = s.max_error.max((g2 - g1).abs());
            if positive != (m == Membership::Escaping) {
                s.sign_disagreements += 1;
            }
            if locus {
                s.locus_outside_band += 1;
            }
        }
    }
    Ok(s)
}

/// Worst relative gap between `fⁿ` and its closed form over a few points, `n ≤ 3`.
pub fn iterate_transport(spec: &SemiconjugateSpec) -> Result<f64> {
    let f = build_semiconjugate(spec)?;
    let delta = f.delta();
    let mut worst = 0.0f64;
    for (z0, w0) in generic_points(20, 11) {
        let (mut z, mut w) = (z0, w0);
        for n in 1..=3 {
            (z, w) = eval_skew(&f, z, w);
            let (zc, wc) = semiconjugate_iterate(&spec.h, spec.alpha, delta, n, z0, w0);
            let scale = wc.norm().max(zc.norm()).max(1e-300);
            worst = worst.max(((z - zc).norm() + (w - wc).norm()) / scale);
        }
    }
    Ok(worst)
}

fn semiconjugate_suite(cfg: &RunConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let deg = degenerate_example();
    let nondeg = SemiconjugateSpec { h: cubic_h(), alpha: 1, delta: 3, kind: SemiconjugateKind::Nondegenerate };
    for (name, spec) in [("degenerate", &deg), ("nondegenerate", &nondeg)] {
        match iterate_transport(spec) {
            Ok(e) => out.push(check(format!("semiconjugate.{name}.iterates"), e < 1e-10, format!("worst_relative={e:e}"))),
            Err(e) => out.push(check(format!("semiconjugate.{name}.iterates"), false, e.to_string())),
        }
    }
    let s = transport_grid(&deg, Complex64::new(0.5, 0.0), 32, cfg)?;
    let frac = s.sign_disagreements as f64 / s.cells as f64;
    out.push(check(
        "semiconjugate.degenerate.green_transport",
        s.max_error < 1e-6 && frac < 0.01 && s.locus_outside_band == 0 && s.estimator_errors == 0,
        format!(
            "cells={} band={} max_error={:e} sign_disagreements={} locus_outside_band={} errors={}",
            s.cells, s.band, s.max_error, s.sign_disagreements, s.locus_outside_band, s.estimator_errors
        ),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &RunConfig::default()).is_err());
    }

    #[test]
    fn monomial_suite_passes() {
        let checks = monomial_suite(&RunConfig::default());
        assert!(checks.len() >= 20);
        for c in &checks {
            assert!(c.pass, "{c}");
        }
    }

    #[test]
    fn intercept_forms_agree() {
        let p = NewtonPolygon::from_support([(0, 4), (2, 1), (3, 0)]).unwrap();
        assert_eq!(p.intercepts(), &[intercept((0, 4), (2, 1)), intercept((2, 1), (3, 0))]);
        assert!(hull_mismatches(50, 1).is_empty());
    }
}
