//! Finite-n estimators of the Green functions of a skew product.
//!
//! Every estimator is a normalized log of an orbit quantity. Orbits are run in
//! [`Wide`] arithmetic so that the superattracting collapse toward the origin
//! does not underflow before the sequence settles.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{poly_roots, rat, Rational, SkewProduct, Wide};
use crate::error::{Error, Result};
use crate::newton::Classification;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenValue {
    Finite(f64),
    PosInf,
    NegInf,
    /// Indeterminate, e.g. `∞ - ∞` on `E_z ∩ E_w`.
    Undefined,
}

impl GreenValue {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            GreenValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Infinities map to `±inf`, undefined to NaN.
    pub fn to_f64(&self) -> f64 {
        match *self {
            GreenValue::Finite(v) => v,
            GreenValue::PosInf => f64::INFINITY,
            GreenValue::NegInf => f64::NEG_INFINITY,
            GreenValue::Undefined => f64::NAN,
        }
    }
}

impl fmt::Display for GreenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreenValue::Finite(v) => write!(f, "{v:.17e}"),
            GreenValue::PosInf => f.write_str("inf"),
            GreenValue::NegInf => f.write_str("-inf"),
            GreenValue::Undefined => f.write_str("nan"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    /// The orbit or the weighted ratio passed its escape radius; the current
    /// value is returned and the tail bound folded into the residual.
    EscapedWithTail,
    Budget,
    HitZero,
    HitEz,
    Divergent,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Converged => "converged",
            Termination::EscapedWithTail => "escaped_with_tail",
            Termination::Budget => "budget",
            Termination::HitZero => "hit_zero",
            Termination::HitEz => "hit_Ez",
            Termination::Divergent => "divergent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEstimate {
    pub value: GreenValue,
    pub n_used: usize,
    pub termination: Termination,
    /// Last increment of the normalized sequence, plus any tail bound.
    pub residual: f64,
    /// Computed in a regime (two dominant terms with `d ≤ 1`) where the limit is not known to exist.
    pub no_theorem: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenConfig {
    pub n_max: usize,
    pub tol: f64,
    pub escape_radius: f64,
    /// Escape radius for the weighted ratio `|w_n / z_n^α|` in the `log⁺` estimator.
    pub ratio_escape: f64,
}

impl Default for GreenConfig {
    fn default() -> Self {
        GreenConfig { n_max: 64, tol: 1e-10, escape_radius: 1e12, ratio_escape: 1e12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenKind {
    /// `δ⁻ⁿ log|zₙ|`
    P,
    /// `d⁻ⁿ log|wₙ / zₙ^α|`
    Alpha,
    /// `d⁻ⁿ log(|wₙ| / |zₙ|^{γn/d})`, for `δ = d`
    Infty,
    /// `d⁻ⁿ log⁺|wₙ / zₙ^α|`
    AlphaPlus,
    /// `λ⁻ⁿ log|wₙ|`
    Z,
    /// `λ⁻ⁿ log max(|zₙ|, |wₙ|)`
    F,
    /// `λ⁻ⁿ log max(|zₙ|^α, |wₙ|)`
    FAlpha,
}

impl GreenKind {
    pub const ALL: [GreenKind; 7] =
        [GreenKind::P, GreenKind::Alpha, GreenKind::Infty, GreenKind::AlphaPlus, GreenKind::Z, GreenKind::F, GreenKind::FAlpha];

    pub fn name(&self) -> &'static str {
        match self {
            GreenKind::P => "Gp",
            GreenKind::Alpha => "Gza",
            GreenKind::Infty => "Gzi",
            GreenKind::AlphaPlus => "Gzap",
            GreenKind::Z => "Gz",
            GreenKind::F => "Gf",
            GreenKind::FAlpha => "Gfa",
        }
    }

    pub fn from_name(s: &str) -> Option<GreenKind> {
        GreenKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

enum Step {
    /// Unnormalized log term; the flag says whether convergence may be declared.
    Log(f64, bool),
    /// Term whose ratio escaped, with a bound on the neglected tail (unnormalized).
    Tail(f64, f64),
    Stop(GreenValue, Termination),
}

fn drive(
    f: &SkewProduct,
    z: Complex64,
    w: Complex64,
    cfg: &GreenConfig,
    base: f64,
    only_p: bool,
    term: impl Fn(usize, &Wide, &Wide) -> Step,
) -> GreenEstimate {
    let (mut zn, mut wn) = (Wide::from(z), Wide::from(w));
    let ln_escape = cfg.escape_radius.ln();
    let mut prev: Option<f64> = None;
    let mut last_inc = f64::INFINITY;
    let mut small = 0usize;
    let mut growing = 0usize;
    let mut est = f64::NAN;
    // past the escape radius the orbit keeps going in extended range; the
    // tail is computed rather than dropped, and the label records it
    let mut escaped = false;
    let done = |value, n_used, termination, residual| GreenEstimate { value, n_used, termination, residual, no_theorem: false };
    let settled = |escaped: bool| if escaped { Termination::EscapedWithTail } else { Termination::Converged };

    for n in 0..=cfg.n_max {
        let scale = base.powi(-(n as i32));
        match term(n, &zn, &wn) {
            Step::Stop(v, t) => return done(v, n, t, 0.0),
            Step::Tail(l, bound) => {
                let v = l * scale;
                let inc = prev.map_or(0.0, |p| (v - p).abs());
                return done(GreenValue::Finite(v), n, Termination::EscapedWithTail, bound * scale / base + inc.min(last_inc));
            }
            Step::Log(l, may_converge) => {
                est = l * scale;
                if let Some(p) = prev {
                    let inc = est - p;
                    if inc.abs() <= cfg.tol && may_converge {
                        small += 1;
                    } else {
                        small = 0;
                    }
                    if inc.abs() > 1e3 * cfg.tol && last_inc.is_finite() && inc.abs() >= 0.99 * last_inc {
                        growing += 1;
                    } else {
                        growing = 0;
                    }
                    last_inc = inc.abs();
                    if small >= 2 {
                        return done(GreenValue::Finite(est), n, settled(escaped), last_inc);
                    }
                    if growing >= 5 {
                        let v = if inc < 0.0 { GreenValue::NegInf } else { GreenValue::PosInf };
                        return done(v, n, Termination::Divergent, last_inc);
                    }
                }
                prev = Some(est);
            }
        }
        if n == cfg.n_max {
            break;
        }
        let zw = if only_p { (f.p().eval(zn), wn) } else { f.eval(zn, wn) };
        (zn, wn) = zw;
        if !(zn.is_finite() && wn.is_finite()) {
            return done(GreenValue::Finite(est), n, Termination::EscapedWithTail, last_inc);
        }
        escaped |= zn.ln_abs() > ln_escape || (!only_p && wn.ln_abs() > ln_escape);
        if zn.out_of_range() || wn.out_of_range() {
            let t = if last_inc <= cfg.tol { settled(escaped) } else { Termination::Budget };
            return done(GreenValue::Finite(est), n, t, last_inc);
        }
    }
    let t = if last_inc <= cfg.tol { settled(escaped) } else { Termination::Budget };
    done(GreenValue::Finite(est), cfg.n_max, t, last_inc)
}

fn flag(c: &Classification, mut e: GreenEstimate) -> GreenEstimate {
    e.no_theorem = c.flags.two_dominant_terms && c.d() <= 1;
    e
}

/// `G_p(z) = lim δ⁻ⁿ log|pⁿ(z)|`.
pub fn g_p(f: &SkewProduct, z: Complex64, cfg: &GreenConfig) -> GreenEstimate {
    drive(f, z, Complex64::new(0.0, 0.0), cfg, f.delta() as f64, true, |_, zn, _| {
        if zn.is_zero() {
            Step::Stop(GreenValue::NegInf, Termination::HitZero)
        } else {
            Step::Log(zn.ln_abs(), true)
        }
    })
}

fn alpha_of(c: &Classification) -> Result<Rational> {
    c.alpha.ok_or(Error::Undefined("alpha"))
}

fn need_fiber_degree(d: u32) -> Result<()> {
    if d == 0 {
        Err(Error::Regime("fiber degree d = 0".into()))
    } else {
        Ok(())
    }
}

// on z_n = 0 the weighted ratio |w / z^α| is 0, ∞ or |w| depending on the sign of α
fn ratio_on_axis(alpha: Rational, w: &Wide) -> Option<GreenValue> {
    let zero = rat(0, 1);
    if alpha < zero {
        Some(GreenValue::NegInf)
    } else if alpha > zero {
        Some(if w.is_zero() { GreenValue::Undefined } else { GreenValue::PosInf })
    } else {
        None
    }
}

/// `G_z^α` with explicit `α` and normalizing degree `d`.
pub fn g_z_alpha_with(f: &SkewProduct, alpha: Rational, d: u32, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<GreenEstimate> {
    need_fiber_degree(d)?;
    Ok(drive(f, z, w, cfg, d as f64, false, |_, zn, wn| {
        if zn.is_zero() {
            if let Some(v) = ratio_on_axis(alpha, wn) {
                return Step::Stop(v, Termination::HitEz);
            }
        }
        if wn.is_zero() {
            return Step::Stop(GreenValue::NegInf, Termination::HitZero);
        }
        if zn.is_zero() {
            return Step::Log(wn.ln_abs(), true);
        }
        Step::Log(wn.ln_abs_ratio_pow(zn, alpha), true)
    }))
}

/// `G_z^α = lim d⁻ⁿ log|wₙ / zₙ^α|` with the primary `d` and `α`.
pub fn g_z_alpha(f: &SkewProduct, c: &Classification, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<GreenEstimate> {
    let a = alpha_of(c)?;
    Ok(flag(c, g_z_alpha_with(f, a, c.d(), z, w, cfg)?))
}

/// `G_z^∞ = lim d⁻ⁿ log(|wₙ| / |zₙ|^{γn/d})`, defined when `δ = d`.
pub fn g_z_infty(f: &SkewProduct, c: &Classification, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<GreenEstimate> {
    let (gamma, d) = (c.gamma(), c.d());
    if d != c.delta {
        return Err(Error::Regime(format!("the infinite variant needs δ = d, got δ = {}, d = {d}", c.delta)));
    }
    need_fiber_degree(d)?;
    Ok(flag(
        c,
        drive(f, z, w, cfg, d as f64, false, |n, zn, wn| {
            let t = rat(n as i64 * gamma as i64, d as i64);
            if zn.is_zero() && gamma > 0 {
                let v = if wn.is_zero() { GreenValue::Undefined } else { GreenValue::PosInf };
                return Step::Stop(v, Termination::HitEz);
            }
            if wn.is_zero() {
                return Step::Stop(GreenValue::NegInf, Termination::HitZero);
            }
            if zn.is_zero() {
                return Step::Log(wn.ln_abs(), true);
            }
            Step::Log(wn.ln_abs_ratio_pow(zn, t), true)
        }),
    ))
}

/// `G_z^{α,+} = lim d⁻ⁿ log⁺|wₙ / zₙ^α|`, stopping once the ratio passes `cfg.ratio_escape`.
pub fn g_z_alpha_plus_with(f: &SkewProduct, alpha: Rational, d: u32, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<GreenEstimate> {
    need_fiber_degree(d)?;
    let ln_r = cfg.ratio_escape.ln();
    // one-step correction bound from the dominant coefficient
    let b = f.q().terms().find(|&((_, j), _)| j == d).map_or(1.0, |(_, b)| b.norm());
    let tail = b.ln().abs();
    Ok(drive(f, z, w, cfg, d as f64, false, |_, zn, wn| {
        if wn.is_zero() {
            return Step::Log(0.0, false);
        }
        let l = if zn.is_zero() {
            match ratio_on_axis(alpha, wn) {
                Some(GreenValue::NegInf) => return Step::Stop(GreenValue::Finite(0.0), Termination::HitEz),
                Some(v) => return Step::Stop(v, Termination::HitEz),
                None => wn.ln_abs(),
            }
        } else {
            wn.ln_abs_ratio_pow(zn, alpha)
        };
        if l > ln_r {
            Step::Tail(l, tail)
        } else {
            Step::Log(l.max(0.0), l > 0.0)
        }
    }))
}

pub fn g_z_alpha_plus(f: &SkewProduct, c: &Classification, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<GreenEstimate> {
    let a = alpha_of(c)?;
    Ok(flag(c, g_z_alpha_plus_with(f, a, c.d(), z, w, cfg)?))
}

/// `G_z = lim λ⁻ⁿ log|wₙ|`.
pub fn g_z(f: &SkewProduct, c: &Classification, z: Complex64, w: Complex64, cfg: &GreenConfig) -> GreenEstimate {
    flag(
        c,
        drive(f, z, w, cfg, c.lambda as f64, false, |_, _, wn| {
            if wn.is_zero() {
                Step::Stop(GreenValue::NegInf, Termination::HitZero)
            } else {
                Step::Log(wn.ln_abs(), true)
            }
        }),
    )
}

// λ⁻ⁿ log|zₙ|, scaled by `weight`
fn z_part(f: &SkewProduct, c: &Classification, z: Complex64, weight: f64, cfg: &GreenConfig) -> GreenEstimate {
    drive(f, z, Complex64::new(0.0, 0.0), cfg, c.lambda as f64, true, |_, zn, _| {
        if zn.is_zero() {
            Step::Stop(if weight > 0.0 { GreenValue::NegInf } else { GreenValue::PosInf }, Termination::HitZero)
        } else {
            Step::Log(weight * zn.ln_abs(), true)
        }
    })
}

// The limit of a max of two logs is the max of the limits, and the two parts
// settle separately; iterating the max directly stalls where the parts cross.
fn max_estimate(a: GreenEstimate, b: GreenEstimate) -> GreenEstimate {
    let (hi, lo) = if b.value.to_f64() > a.value.to_f64() || a.value == GreenValue::Undefined { (b, a) } else { (a, b) };
    let residual = if lo.value.to_f64() == f64::NEG_INFINITY { hi.residual } else { hi.residual.max(lo.residual) };
    GreenEstimate { residual, n_used: a.n_used.max(b.n_used), ..hi }
}

/// `G_f = lim λ⁻ⁿ log max(|zₙ|, |wₙ|)`.
pub fn g_f(f: &SkewProduct, c: &Classification, z: Complex64, w: Complex64, cfg: &GreenConfig) -> GreenEstimate {
    flag(c, max_estimate(z_part(f, c, z, 1.0, cfg), g_z(f, c, z, w, cfg)))
}

/// `G_f^α = lim λ⁻ⁿ log max(|zₙ|^α, |wₙ|)` with `z⁰ = 1`.
pub fn g_f_alpha(f: &SkewProduct, c: &Classification, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<GreenEstimate> {
    let alpha = alpha_of(c)?;
    let af = crate::algebra::ratio_f64(alpha);
    let zp = if alpha == rat(0, 1) {
        GreenEstimate { value: GreenValue::Finite(0.0), n_used: 0, termination: Termination::Converged, residual: 0.0, no_theorem: false }
    } else {
        z_part(f, c, z, af, cfg)
    };
    Ok(flag(c, max_estimate(zp, g_z(f, c, z, w, cfg))))
}

pub fn estimate(f: &SkewProduct, c: &Classification, kind: GreenKind, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<GreenEstimate> {
    match kind {
        GreenKind::P => Ok(flag(c, g_p(f, z, cfg))),
        GreenKind::Alpha => g_z_alpha(f, c, z, w, cfg),
        GreenKind::Infty => g_z_infty(f, c, z, w, cfg),
        GreenKind::AlphaPlus => g_z_alpha_plus(f, c, z, w, cfg),
        GreenKind::Z => Ok(g_z(f, c, z, w, cfg)),
        GreenKind::F => Ok(g_f(f, c, z, w, cfg)),
        GreenKind::FAlpha => g_f_alpha(f, c, z, w, cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualKind {
    /// `G_z^α ∘ f = d G_z^α`
    Alpha,
    /// `G_z^∞ ∘ f = d G_z^∞ + γ G_p`
    Infty,
    /// `G_z^{α,+} ∘ f = d G_z^{α,+}`
    AlphaPlus,
}

fn finite_or(e: &GreenEstimate, what: &str) -> Result<f64> {
    e.value.finite().ok_or_else(|| Error::Inconclusive(format!("{what} is {}", e.value)))
}

/// Single-step defect of the functional equation at `(z, w)`.
pub fn functional_residual(f: &SkewProduct, c: &Classification, kind: ResidualKind, z: Complex64, w: Complex64, cfg: &GreenConfig) -> Result<f64> {
    let (fz, fw) = f.eval(z, w);
    let d = c.d() as f64;
    match kind {
        ResidualKind::Alpha => {
            let a = finite_or(&g_z_alpha(f, c, fz, fw, cfg)?, "G at the image")?;
            let b = finite_or(&g_z_alpha(f, c, z, w, cfg)?, "G at the point")?;
            Ok((a - d * b).abs())
        }
        ResidualKind::AlphaPlus => {
            let a = finite_or(&g_z_alpha_plus(f, c, fz, fw, cfg)?, "G at the image")?;
            let b = finite_or(&g_z_alpha_plus(f, c, z, w, cfg)?, "G at the point")?;
            Ok((a - d * b).abs())
        }
        ResidualKind::Infty => {
            let a = finite_or(&g_z_infty(f, c, fz, fw, cfg)?, "G at the image")?;
            let b = finite_or(&g_z_infty(f, c, z, w, cfg)?, "G at the point")?;
            let gp = if c.gamma() == 0 { 0.0 } else { finite_or(&g_p(f, z, cfg), "G_p")? };
            Ok((a - (d * b + c.gamma() as f64 * gp)).abs())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmeanReport {
    pub center_value: f64,
    pub circle_mean: f64,
    /// `center - mean`; `≤ 0` for a subharmonic function, `0` for a harmonic one.
    pub deficit: f64,
}

/// Trapezoid mean of `sampler` over `m` equally spaced points of a circle.
pub fn submean_check(sampler: impl Fn(Complex64) -> GreenValue, center: Complex64, radius: f64, m: usize) -> Result<SubmeanReport> {
    let c = sampler(center).finite().ok_or_else(|| Error::Inconclusive("non-finite value at the center".into()))?;
    let mut sum = 0.0;
    for k in 0..m {
        let t = std::f64::consts::TAU * k as f64 / m as f64;
        let v = sampler(center + Complex64::from_polar(radius, t))
            .finite()
            .ok_or_else(|| Error::Inconclusive("non-finite value on the circle".into()))?;
        sum += v;
    }
    let mean = sum / m as f64;
    Ok(SubmeanReport { center_value: c, circle_mean: mean, deficit: c - mean })
}

/// All `w` with `Q_z^n(w) = 0`, where `Q_z^n` is the n-fold fiber composition
/// along the orbit of `z`. Solved backwards one fiber polynomial at a time;
/// repeated roots are collapsed.
pub fn fiber_zero_preimages(f: &SkewProduct, z: Complex64, n: usize) -> Result<Vec<Complex64>> {
    if n > 6 {
        return Err(Error::Regime(format!("n = {n} exceeds the supported depth 6")));
    }
    let mut zs = vec![z];
    for k in 0..n {
        zs.push(f.p().eval(zs[k]));
    }
    let mut targets = vec![Complex64::new(0.0, 0.0)];
    for k in (0..n).rev() {
        let cs = f.q().fiber_coeffs(zs[k]);
        let deg = cs.iter().rev().find(|(j, c)| *j >= 1 && c.norm() > 0.0).map(|&(j, _)| j);
        let Some(deg) = deg else {
            return Err(Error::DegenerateFiber(k));
        };
        let mut dense = vec![Complex64::new(0.0, 0.0); deg as usize + 1];
        for &(j, c) in &cs {
            if j <= deg {
                dense[j as usize] = c;
            }
        }
        let mut next: Vec<Complex64> = Vec::new();
        for &t in &targets {
            let mut shifted = dense.clone();
            shifted[0] -= t;
            for r in poly_roots(&shifted) {
                let scale = 1.0 + r.norm();
                if !next.iter().any(|&s| (s - r).norm() <= 1e-7 * scale) {
                    next.push(r);
                }
            }
        }
        targets = next;
    }
    for &r in &targets {
        let mut v = r;
        for &zk in zs.iter().take(n) {
            v = f.q().eval(zk, v);
        }
        if v.norm() >= 1e-8 {
            return Err(Error::RootResidual(v.norm()));
        }
    }
    targets.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(targets)
}
