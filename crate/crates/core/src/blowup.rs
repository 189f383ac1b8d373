//! Weighted blow-ups `(z, c) ↦ (z, z^l c)` and `(t, w) ↦ (t w^k, w)` at the
//! exponent level, with the transformed maps where they are polynomial.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::{rat, BiPoly, Rational, SkewProduct};
use crate::error::{Error, Result};
use crate::newton::{classify, Classification};

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupResult {
    /// For the first blow-up, the conjugated map. For the second, `(p, q̃)` with
    /// `p` the original first component; the true first component is
    /// `t^first_exponents.0 w^first_exponents.1 (1 + ζ)`, not polynomial.
    pub transformed: SkewProduct,
    /// Original support point to transformed exponent.
    pub exponent_map: BTreeMap<(u32, u32), (u32, u32)>,
    /// Transformed exponent of the dominant term of the input.
    pub gamma_tilde: Rational,
    pub d_tilde: u32,
    pub superattracting_at_origin: bool,
    pub degenerates_axis: bool,
    pub first_exponents: Option<(Rational, Rational)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TablePrediction {
    /// Every transformed exponent is nonnegative.
    pub holomorphic: bool,
    pub superattracting: bool,
    pub degenerates: bool,
}

fn monomial_p(f: &SkewProduct) -> Result<(u32, Complex64)> {
    f.p().single_term().ok_or_else(|| Error::Regime("the exact transform needs p = a z^δ".into()))
}

fn flags_from_support(support: impl Iterator<Item = (Rational, u32)> + Clone) -> TablePrediction {
    let holomorphic = support.clone().all(|(i, _)| i >= Rational::zero());
    let superattracting = !support.clone().any(|(i, j)| i.is_zero() && j <= 1);
    let degenerates = support.clone().all(|(i, _)| i > Rational::zero());
    TablePrediction { holomorphic, superattracting, degenerates }
}

/// Exponent-level prediction for `(z, c) ↦ (z, z^l c)`: `ĩ = i + l j - l δ`.
/// Works for rational `l`.
pub fn check_blowup_tables(f: &SkewProduct, l: Rational) -> Result<TablePrediction> {
    if l <= Rational::zero() {
        return Err(Error::WeightOutOfRange { weight: l.to_string(), reason: "blow-up weight must be positive".into() });
    }
    let delta = f.delta() as i64;
    let pts: Vec<(Rational, u32)> =
        f.q().support().map(|(i, j)| (rat(i as i64, 1) + l * rat(j as i64 - delta, 1), j)).collect();
    Ok(flags_from_support(pts.into_iter()))
}

/// Conjugate by `(z, c) ↦ (z, z^l c)`: `q̃(z, c) = q(z, z^l c) / (a z^δ)^l`.
pub fn blowup_pi1(f: &SkewProduct, c: &Classification, l: u32) -> Result<BlowupResult> {
    if l == 0 {
        return Err(Error::WeightOutOfRange { weight: "0".into(), reason: "blow-up weight must be at least 1".into() });
    }
    let (delta, a) = monomial_p(f)?;
    let scale = a.powi(-(l as i32));
    let mut exponent_map = BTreeMap::new();
    let mut terms = Vec::new();
    for ((i, j), b) in f.q().terms() {
        let e = i as i64 + l as i64 * (j as i64 - delta as i64);
        if e < 0 {
            return Err(Error::NotHolomorphic { i, j, exponent: e.to_string() });
        }
        exponent_map.insert((i, j), (e as u32, j));
        terms.push(((e as u32, j), b * scale));
    }
    let term = c.primary();
    let gamma_tilde = rat(term.gamma as i64 + l as i64 * (term.d as i64 - delta as i64), 1);
    let pred = flags_from_support(exponent_map.values().map(|&(i, j)| (rat(i as i64, 1), j)));
    Ok(BlowupResult {
        transformed: SkewProduct::new_unchecked(f.p().clone(), BiPoly::new(terms)),
        exponent_map,
        gamma_tilde,
        d_tilde: term.d,
        superattracting_at_origin: pred.superattracting,
        degenerates_axis: pred.degenerates,
        first_exponents: None,
    })
}

/// `(p(z), q(z, z^l c) / p(z)^l)` evaluated directly, for any `p`.
pub fn pi1_conjugate_eval(f: &SkewProduct, l: u32, z: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let pz = f.p().eval(z);
    (pz, f.q().eval(z, z.powu(l) * c) / pz.powu(l))
}

/// Conjugate by `(t, w) ↦ (t w^k, w)` with `k = l_inv`: `j̃ = k i + j`, and the
/// dominant height `d̃ = k γ + d` must be the lowest with `d ≤ d̃ ≤ δ`.
pub fn blowup_pi2(f1: &SkewProduct, c: &Classification, l_inv: u32) -> Result<BlowupResult> {
    if l_inv == 0 {
        return Err(Error::WeightOutOfRange { weight: "0".into(), reason: "inverse weight must be at least 1".into() });
    }
    let (delta, _) = monomial_p(f1)?;
    let term = c.primary();
    let d_tilde = l_inv * term.gamma + term.d;
    let mut exponent_map = BTreeMap::new();
    let mut terms = Vec::new();
    for ((i, j), b) in f1.q().terms() {
        let jt = l_inv * i + j;
        exponent_map.insert((i, j), (i, jt));
        terms.push(((i, jt), b));
    }
    let lowest = exponent_map.values().map(|&(_, j)| j).min().unwrap_or(0);
    if !(term.d <= d_tilde && d_tilde <= delta) || lowest != d_tilde {
        return Err(Error::Regime(format!(
            "second blow-up needs d <= d̃ <= δ with d̃ lowest; got d = {}, d̃ = {d_tilde}, δ = {delta}, lowest = {lowest}",
            term.d
        )));
    }
    let first = (
        rat(delta as i64 - (l_inv * term.gamma) as i64, 1),
        rat(l_inv as i64 * (delta as i64 - d_tilde as i64), 1),
    );
    let q2 = BiPoly::new(terms);
    let sa = !q2.support().any(|(i, j)| i + j <= 1 && (i, j) != (1, 0));
    let degenerates = q2.support().all(|(_, j)| j > 0);
    Ok(BlowupResult {
        transformed: SkewProduct::new_unchecked(f1.p().clone(), q2),
        exponent_map,
        gamma_tilde: rat(term.gamma as i64, 1),
        d_tilde,
        superattracting_at_origin: sa,
        degenerates_axis: degenerates,
        first_exponents: Some(first),
    })
}

/// `(i, j) ↦ (i + l1(j - δ), k(i + l1(j - δ)) + j)`: both blow-ups at once.
pub fn composite_exponent(l1: u32, l_inv: u32, delta: u32, (i, j): (u32, u32)) -> Option<(u32, u32)> {
    let it = i as i64 + l1 as i64 * (j as i64 - delta as i64);
    (it >= 0).then(|| (it as u32, (l_inv as i64 * it + j as i64) as u32))
}

/// First blow-up, reclassification, then second blow-up.
pub fn blowup_composite(f: &SkewProduct, l1: u32, l_inv: u32) -> Result<(BlowupResult, BlowupResult)> {
    let c = classify(f)?;
    let first = blowup_pi1(f, &c, l1)?;
    let c1 = classify(&first.transformed)?;
    let second = blowup_pi2(&first.transformed, &c1, l_inv)?;
    Ok((first, second))
}

pub fn transformed_support(r: &BlowupResult) -> BTreeSet<(u32, u32)> {
    r.exponent_map.values().copied().collect()
}
