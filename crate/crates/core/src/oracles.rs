//! Reference implementations: closed forms for monomial maps, semiconjugate
//! examples built from a one-variable polynomial, one-variable escape rates,
//! and a brute-force Newton polygon.

use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::algebra::{rat, BiPoly, Rational, SkewProduct, UniPoly, Wide};
use crate::error::{Error, Result};
use crate::green::{GreenEstimate, GreenKind, GreenValue, Termination};

fn log_abs(x: Complex64) -> GreenValue {
    if x.norm() == 0.0 {
        GreenValue::NegInf
    } else {
        GreenValue::Finite(x.norm().ln())
    }
}

fn lin(a: f64, x: GreenValue, b: f64, y: GreenValue) -> GreenValue {
    // a x + b y for logs that may be -inf, with a, b of either sign
    let term = |k: f64, v: GreenValue| match v {
        GreenValue::Finite(t) => GreenValue::Finite(k * t),
        _ if k == 0.0 => GreenValue::Finite(0.0),
        GreenValue::NegInf if k > 0.0 => GreenValue::NegInf,
        GreenValue::NegInf => GreenValue::PosInf,
        _ => GreenValue::Undefined,
    };
    match (term(a, x), term(b, y)) {
        (GreenValue::Finite(p), GreenValue::Finite(q)) => GreenValue::Finite(p + q),
        (GreenValue::NegInf, GreenValue::PosInf) | (GreenValue::PosInf, GreenValue::NegInf) => GreenValue::Undefined,
        (GreenValue::Undefined, _) | (_, GreenValue::Undefined) => GreenValue::Undefined,
        (GreenValue::NegInf, _) | (_, GreenValue::NegInf) => GreenValue::NegInf,
        _ => GreenValue::PosInf,
    }
}

fn max_value(a: GreenValue, b: GreenValue) -> GreenValue {
    match (a, b) {
        (GreenValue::Undefined, _) | (_, GreenValue::Undefined) => GreenValue::Undefined,
        (GreenValue::PosInf, _) | (_, GreenValue::PosInf) => GreenValue::PosInf,
        (GreenValue::NegInf, v) | (v, GreenValue::NegInf) => v,
        (GreenValue::Finite(x), GreenValue::Finite(y)) => GreenValue::Finite(x.max(y)),
    }
}

fn mismatch(what: &str) -> Error {
    Error::Regime(format!("no closed form for {what} here"))
}

/// Closed-form value of a Green function of `(z^δ, z^γ w^d)`.
pub fn monomial_reference(delta: u32, gamma: u32, d: u32, kind: GreenKind, z: Complex64, w: Complex64) -> Result<GreenValue> {
    let (lz, lw) = (log_abs(z), log_abs(w));
    let alpha = (delta != d).then(|| gamma as f64 / (delta as f64 - d as f64));
    let zero_z = z.norm() == 0.0;
    let g_z = || -> Result<GreenValue> {
        Ok(if gamma == 0 {
            match delta.cmp(&d) {
                std::cmp::Ordering::Greater if w.norm() != 0.0 => GreenValue::Finite(0.0),
                std::cmp::Ordering::Greater => GreenValue::NegInf,
                _ => lw,
            }
        } else {
            match delta.cmp(&d) {
                std::cmp::Ordering::Less => lin(1.0, lw, -alpha.unwrap(), lz),
                std::cmp::Ordering::Greater if w.norm() != 0.0 => lin(alpha.unwrap(), lz, 0.0, lw),
                std::cmp::Ordering::Greater => GreenValue::NegInf,
                std::cmp::Ordering::Equal if z.norm() < 1.0 => GreenValue::NegInf,
                std::cmp::Ordering::Equal => return Err(mismatch("G_z with |z| >= 1")),
            }
        })
    };
    // lim λ⁻ⁿ log|zₙ|
    let z_part = if zero_z {
        GreenValue::NegInf
    } else if delta >= d {
        lz
    } else {
        GreenValue::Finite(0.0)
    };
    match kind {
        GreenKind::P => Ok(lz),
        GreenKind::Alpha | GreenKind::AlphaPlus => {
            let a = alpha.ok_or_else(|| mismatch("the alpha variant with δ = d"))?;
            let v = if gamma == 0 {
                lw
            } else {
                if delta > d && zero_z {
                    return Err(mismatch("the alpha variant on z = 0"));
                }
                lin(1.0, lw, -a, lz)
            };
            Ok(if kind == GreenKind::AlphaPlus { max_value(v, GreenValue::Finite(0.0)) } else { v })
        }
        GreenKind::Infty => {
            if delta != d {
                return Err(mismatch("the infinite variant with δ ≠ d"));
            }
            if gamma > 0 && zero_z {
                return Err(mismatch("the infinite variant on z = 0"));
            }
            Ok(lw)
        }
        GreenKind::Z => g_z(),
        GreenKind::F => Ok(max_value(z_part, g_z()?)),
        GreenKind::FAlpha => {
            let a = match alpha {
                Some(a) => a,
                None if gamma == 0 => 0.0,
                None => return Err(mismatch("G_f^α with δ = d")),
            };
            let zp = if a == 0.0 { GreenValue::Finite(0.0) } else { lin(a, z_part, 0.0, lw) };
            Ok(max_value(zp, g_z()?))
        }
    }
}

/// Monic `h(w) = w^d + ... + b_m w^m` with `d ≥ 2`, `m ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneDimPoly {
    poly: UniPoly,
}

impl OneDimPoly {
    pub fn new(poly: UniPoly) -> Result<OneDimPoly> {
        let d = poly.degree().ok_or_else(|| Error::InvalidMap("h is zero".into()))?;
        let m = poly.low_degree().unwrap();
        if d < 2 {
            return Err(Error::InvalidMap(format!("h has degree {d}, need at least 2")));
        }
        if m < 1 {
            return Err(Error::InvalidMap("h must vanish at 0".into()));
        }
        if poly.coeff(d) != Complex64::new(1.0, 0.0) {
            return Err(Error::InvalidMap("h must be monic".into()));
        }
        Ok(OneDimPoly { poly })
    }

    pub fn poly(&self) -> &UniPoly {
        &self.poly
    }

    pub fn degree(&self) -> u32 {
        self.poly.degree().unwrap()
    }

    pub fn low_degree(&self) -> u32 {
        self.poly.low_degree().unwrap()
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.poly.eval(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiconjugateKind {
    /// `δ > d`
    Degenerate,
    /// `δ = d`
    Nondegenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiconjugateSpec {
    pub h: OneDimPoly,
    pub alpha: i64,
    pub delta: u32,
    pub kind: SemiconjugateKind,
}

/// `f = (z^δ, z^{αδ} h(w / z^α))`, semiconjugate to `(z^δ, h(w))` by `(z, w) ↦ (z, z^α w)`.
pub fn build_semiconjugate(spec: &SemiconjugateSpec) -> Result<SkewProduct> {
    let d = spec.h.degree();
    let delta = match spec.kind {
        SemiconjugateKind::Degenerate if spec.delta <= d => {
            return Err(Error::InvalidMap(format!("degenerate kind needs δ > d, got δ = {}, d = {d}", spec.delta)))
        }
        SemiconjugateKind::Degenerate => spec.delta,
        SemiconjugateKind::Nondegenerate => d,
    };
    let mut terms = Vec::new();
    for (k, b) in spec.h.poly().terms() {
        let e = spec.alpha * (delta as i64 - k as i64);
        if e < 0 {
            return Err(Error::InvalidMap(format!("term w^{k} gets the negative z exponent {e}")));
        }
        terms.push(((e as u32, k), b));
    }
    let one = Complex64::new(1.0, 0.0);
    let f = SkewProduct::new(UniPoly::monomial(delta, one), BiPoly::new(terms))?;

    // f∘π = π∘g on a fixed set of points
    let mut worst = 0.0f64;
    for k in 0..100 {
        let t = k as f64;
        let z = Complex64::from_polar(0.2 + 0.7 * ((t * 0.618).fract()), t * 2.39996);
        let w = Complex64::from_polar(0.1 + 1.4 * ((t * 0.414).fract()), t * 1.1);
        let za = z.powi(spec.alpha as i32);
        let lhs = f.q().eval(z, za * w);
        let rhs = z.powi((spec.alpha * delta as i64) as i32) * spec.h.eval(w);
        worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1e-300));
    }
    if worst > 1e-10 {
        return Err(Error::Semiconjugacy(worst));
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    InsideFilled,
    Escaping,
    BoundaryBand,
}

pub const ESCAPE_RADIUS_1D: f64 = 1e12;

// radius of a disk around 0 mapped into half of itself, if 0 is attracting
fn trap_radius(h: &OneDimPoly) -> Option<f64> {
    let mut rho = 1.0f64;
    let rate = |r: f64| h.poly().terms().map(|(k, b)| b.norm() * r.powi(k as i32 - 1)).sum::<f64>();
    let m = h.low_degree();
    if m == 1 && h.poly().coeff(1).norm() >= 1.0 {
        return None;
    }
    let target = if m == 1 { (1.0 + h.poly().coeff(1).norm()) / 2.0 } else { 0.5 };
    for _ in 0..200 {
        if rate(rho) <= target {
            return Some(rho);
        }
        rho /= 2.0;
    }
    None
}

/// Escape past `1e12`, capture by the basin of 0, or neither within `budget` steps.
pub fn julia_membership(h: &OneDimPoly, w: Complex64, budget: usize) -> Membership {
    let trap = trap_radius(h);
    let mut u = w;
    for _ in 0..=budget {
        if !(u.norm() <= ESCAPE_RADIUS_1D) {
            return Membership::Escaping;
        }
        if trap.is_some_and(|r| u.norm() < r) {
            return Membership::InsideFilled;
        }
        u = h.eval(u);
    }
    Membership::BoundaryBand
}

fn run_1d(h: &OneDimPoly, w: Complex64, n_max: usize, tol: f64, base: f64, plus: bool) -> GreenEstimate {
    let ln_r = ESCAPE_RADIUS_1D.ln();
    let mut u = Wide::from(w);
    let mut prev: Option<f64> = None;
    let (mut small, mut last) = (0, f64::INFINITY);
    let mut est = 0.0;
    let finish = |value, n_used, termination, residual| GreenEstimate { value, n_used, termination, residual, no_theorem: false };
    for n in 0..=n_max {
        if u.is_zero() {
            if plus {
                return finish(GreenValue::Finite(0.0), n, Termination::HitZero, 0.0);
            }
            return finish(GreenValue::NegInf, n, Termination::HitZero, 0.0);
        }
        let l = u.ln_abs();
        let scale = base.powi(-(n as i32));
        if plus && l > ln_r {
            return finish(GreenValue::Finite(l * scale), n, Termination::EscapedWithTail, last);
        }
        est = if plus { l.max(0.0) } else { l } * scale;
        if let Some(p) = prev {
            last = (est - p).abs();
            let settled = last <= tol && (!plus || l > 0.0);
            small = if settled { small + 1 } else { 0 };
            if small >= 2 {
                return finish(GreenValue::Finite(est), n, Termination::Converged, last);
            }
        }
        prev = Some(est);
        if n == n_max {
            break;
        }
        u = h.poly().eval(u);
        if u.out_of_range() {
            let t = if last <= tol { Termination::Converged } else { Termination::Budget };
            return finish(GreenValue::Finite(est), n, t, last);
        }
    }
    let t = if last <= tol { Termination::Converged } else { Termination::Budget };
    finish(GreenValue::Finite(est), n_max, t, last)
}

/// `G_h^∞(w) = lim d⁻ⁿ log|hⁿ(w)|`.
pub fn g_h_infty(h: &OneDimPoly, w: Complex64, n_max: usize, tol: f64) -> GreenEstimate {
    run_1d(h, w, n_max, tol, h.degree() as f64, false)
}

/// `G_h^0(w) = lim m⁻ⁿ log|hⁿ(w)|`, meaningful in the basin of 0.
pub fn g_h_zero(h: &OneDimPoly, w: Complex64, n_max: usize, tol: f64) -> GreenEstimate {
    run_1d(h, w, n_max, tol, h.low_degree() as f64, false)
}

/// `G_h^{∞,+}(w) = lim d⁻ⁿ log⁺|hⁿ(w)|`, stopping once `|hⁿ| > 1e12`.
pub fn g_h_infty_plus(h: &OneDimPoly, w: Complex64, n_max: usize, tol: f64) -> GreenEstimate {
    run_1d(h, w, n_max, tol, h.degree() as f64, true)
}

/// Polygon vertices by exhaustion: a support point is a vertex unless it lies in
/// `conv{Q, R} + R≥0²` for some other support points `Q`, `R`. Cubic time.
pub fn hull_vertices_brute_force(support: &BTreeSet<(u32, u32)>) -> Vec<(u32, u32)> {
    let pts: Vec<(i64, i64)> = support.iter().map(|&(i, j)| (i as i64, j as i64)).collect();
    // is there t in [0,1] with (1-t) q + t r <= p componentwise?
    let below = |p: (i64, i64), q: (i64, i64), r: (i64, i64)| {
        let (mut lo, mut hi) = (rat(0, 1), rat(1, 1));
        for (pc, qc, rc) in [(p.0, q.0, r.0), (p.1, q.1, r.1)] {
            // qc + t (rc - qc) <= pc
            let slope = rc - qc;
            let room = pc - qc;
            if slope == 0 {
                if room < 0 {
                    return false;
                }
            } else if slope > 0 {
                hi = hi.min(Rational::new(room, slope));
            } else {
                lo = lo.max(Rational::new(room, slope));
            }
        }
        lo <= hi
    };
    let mut out = Vec::new();
    for (a, &p) in pts.iter().enumerate() {
        let others: Vec<(i64, i64)> = pts.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, &q)| q).collect();
        let covered = others.iter().any(|&q| others.iter().any(|&r| below(p, q, r)));
        if !covered {
            out.push((p.0 as u32, p.1 as u32));
        }
    }
    out
}

/// `z^{αδⁿ} hⁿ(w / z^α)`: closed form of the second coordinate of `fⁿ`.
pub fn semiconjugate_iterate(h: &OneDimPoly, alpha: i64, delta: u32, n: u32, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
    let dn = delta.pow(n);
    let mut u = w / z.powi(alpha as i32);
    for _ in 0..n {
        u = h.eval(u);
    }
    (z.powu(dn), z.powi((alpha * dn as i64) as i32) * u)
}
