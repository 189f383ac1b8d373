//! Admissible weights for invariant wedges, the dominant degree `D`, and radii
//! for which `f(U) ⊂ U`.

use std::fmt;

use crate::algebra::{rat, ratio_f64, BiPoly, Rational, SkewProduct};
use crate::error::{Error, Result};
use crate::newton::{Case, Classification, DominantTerm};

/// Interval of weights; `hi = None` means unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightInterval {
    pub lo: Rational,
    pub hi: Option<Rational>,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl WeightInterval {
    pub fn closed(lo: Rational, hi: Rational) -> WeightInterval {
        WeightInterval { lo, hi: Some(hi), lo_open: false, hi_open: false }
    }

    pub fn point(x: Rational) -> WeightInterval {
        WeightInterval::closed(x, x)
    }

    pub fn contains(&self, l: Rational) -> bool {
        let above = if self.lo_open { l > self.lo } else { l >= self.lo };
        let below = match self.hi {
            None => true,
            Some(h) if self.hi_open => l < h,
            Some(h) => l <= h,
        };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        match self.hi {
            None => false,
            Some(h) => h < self.lo || (h == self.lo && (self.lo_open || self.hi_open)),
        }
    }

    pub fn is_singleton(&self) -> bool {
        self.hi == Some(self.lo) && !self.lo_open && !self.hi_open
    }
}

impl fmt::Display for WeightInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_open { '(' } else { '[' };
        match self.hi {
            None => write!(f, "{open}{}, inf)", self.lo),
            Some(h) => write!(f, "{open}{}, {}{}", self.lo, h, if self.hi_open { ')' } else { ']' }),
        }
    }
}

fn term_alpha(c: &Classification, t: &DominantTerm) -> Option<Rational> {
    t.alpha(c.delta).or(c.alpha)
}

/// Interval for a Case 1, 2 or 3 dominant term.
pub fn weight_interval_for(c: &Classification, t: &DominantTerm) -> Result<WeightInterval> {
    let zero = rat(0, 1);
    match t.case {
        Case::One => Ok(WeightInterval { lo: zero, hi: None, lo_open: true, hi_open: true }),
        Case::Two => {
            if c.delta <= t.d {
                Ok(WeightInterval { lo: t.l1, hi: None, lo_open: false, hi_open: true })
            } else {
                let a = term_alpha(c, t).ok_or(Error::Undefined("alpha"))?;
                Ok(WeightInterval::closed(t.l1, a))
            }
        }
        Case::Three => {
            let l2 = t.l2.expect("first vertex of a polygon with an edge");
            if t.gamma > 0 {
                let a = term_alpha(c, t).ok_or(Error::Undefined("alpha"))?;
                Ok(WeightInterval::closed(a, l2))
            } else {
                Ok(WeightInterval { lo: zero, hi: Some(l2), lo_open: true, hi_open: false })
            }
        }
        Case::Four => Err(Error::Regime("the middle case uses a pair of weights".into())),
    }
}

/// Interval for the primary dominant term.
pub fn weight_interval(c: &Classification) -> Result<WeightInterval> {
    weight_interval_for(c, c.primary())
}

fn case4_term(c: &Classification) -> Result<&DominantTerm> {
    c.term(Case::Four).ok_or_else(|| Error::Regime(format!("{} has no middle dominant term", c.case())))
}

/// First weight of the middle case: `[l1, l1+l2) ∩ (0, α]`.
pub fn case4_first_interval(c: &Classification) -> Result<WeightInterval> {
    let t = case4_term(c)?;
    let a = term_alpha(c, t).ok_or(Error::Undefined("alpha"))?;
    let top = t.upper_weight().expect("middle vertex has two edges");
    Ok(if a < top {
        WeightInterval::closed(t.l1, a)
    } else {
        WeightInterval { lo: t.l1, hi: Some(top), lo_open: false, hi_open: true }
    })
}

/// Second weight given the first: `[α - l_(1), l1 + l2 - l_(1)] ∩ R>0`.
pub fn case4_second_interval(c: &Classification, first: Rational) -> Result<WeightInterval> {
    if !case4_first_interval(c)?.contains(first) {
        return Err(Error::WeightOutOfRange { weight: first.to_string(), reason: "first weight outside its interval".into() });
    }
    let t = case4_term(c)?;
    let a = term_alpha(c, t).ok_or(Error::Undefined("alpha"))?;
    let top = t.upper_weight().expect("middle vertex has two edges");
    let lo = a - first;
    let zero = rat(0, 1);
    Ok(if lo > zero {
        WeightInterval::closed(lo, top - first)
    } else {
        WeightInterval { lo: zero, hi: Some(top - first), lo_open: true, hi_open: false }
    })
}

/// Admissible pairs in the coordinates `(l_(1), l_(1) + l_(2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightRectangle {
    pub first: WeightInterval,
    pub sum: WeightInterval,
    pub excluded_corner: Option<(Rational, Rational)>,
}

impl WeightRectangle {
    pub fn contains(&self, first: Rational, second: Rational) -> bool {
        let s = first + second;
        self.first.contains(first) && self.sum.contains(s) && self.excluded_corner != Some((first, s))
    }
}

pub fn case4_rectangle(c: &Classification) -> Result<WeightRectangle> {
    let t = case4_term(c)?;
    let a = term_alpha(c, t).ok_or(Error::Undefined("alpha"))?;
    let top = t.upper_weight().expect("middle vertex has two edges");
    Ok(if a == top {
        WeightRectangle {
            first: WeightInterval { lo: t.l1, hi: Some(a), lo_open: false, hi_open: true },
            sum: WeightInterval::point(a),
            excluded_corner: None,
        }
    } else if a == t.l1 {
        WeightRectangle {
            first: WeightInterval::point(a),
            sum: WeightInterval { lo: a, hi: Some(top), lo_open: true, hi_open: false },
            excluded_corner: None,
        }
    } else {
        WeightRectangle {
            first: WeightInterval::closed(t.l1, a),
            sum: WeightInterval::closed(a, top),
            excluded_corner: Some((a, a)),
        }
    })
}

/// `D_l = min (i/l + j)` over the support, with where it is attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DValue {
    pub l: Rational,
    pub d: Rational,
    /// Attaining point with the smallest `j` (a polygon vertex).
    pub vertex: (u32, u32),
    pub attaining: Vec<(u32, u32)>,
    /// Minimum over the points strictly above the line `i + l j = l D`.
    pub d_star: Option<Rational>,
}

fn weighted(l: Rational, (i, j): (u32, u32)) -> Rational {
    rat(i as i64, 1) / l + rat(j as i64, 1)
}

pub fn d_value(q: &BiPoly, l: Rational) -> Result<DValue> {
    if l <= rat(0, 1) {
        return Err(Error::WeightOutOfRange { weight: l.to_string(), reason: "weights are positive".into() });
    }
    let vals: Vec<((u32, u32), Rational)> = q.support().map(|p| (p, weighted(l, p))).collect();
    let d = vals.iter().map(|&(_, v)| v).min().ok_or_else(|| Error::InvalidMap("q is zero".into()))?;
    let attaining: Vec<(u32, u32)> = vals.iter().filter(|&&(_, v)| v == d).map(|&(p, _)| p).collect();
    let vertex = *attaining.iter().min_by_key(|&&(_, j)| j).unwrap();
    let d_star = vals.iter().filter(|&&(_, v)| v > d).map(|&(_, v)| v).min();
    Ok(DValue { l, d, vertex, attaining, d_star })
}

/// `min (i/l + j)` over the support with one point left out.
pub fn d_star_excluding(q: &BiPoly, l: Rational, point: (u32, u32)) -> Option<Rational> {
    q.support().filter(|&p| p != point).map(|p| weighted(l, p)).min()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiiBranch {
    /// `D > δ`: `C r1^{l(D-δ)} < r2`.
    Above,
    /// `D = δ`: the line terms are bounded by `r2/2` and the rest by `2C r1^{l(D*-δ)} < r2`.
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radii {
    pub r1: f64,
    pub r2: f64,
    /// The constant `C` evaluated at `r1`.
    pub constant: f64,
    /// The power of `r1` in the sufficient inequality.
    pub exponent: f64,
    pub branch: RadiiBranch,
}

const R_CAP: f64 = 1e6;

fn sup_where(ok: impl Fn(f64) -> bool, cap: f64) -> f64 {
    // largest r in (0, cap] with ok(r), for ok monotone (true then false)
    if ok(cap) {
        return cap;
    }
    let (mut lo, mut hi) = (-700.0f64, cap.ln());
    if !ok(lo.exp()) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid.exp()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

/// Radii `(r1, r2)` with `f(U^l_{r1,r2}) ⊂ U^l_{r1,r2}` from the sufficient
/// inequality on `|q / p^l|`.
///
/// `r1` is half the largest radius satisfying the inequality (and keeping the
/// disk `|z| < r1` mapped into itself), halved further until the inequality is
/// strict.
pub fn invariance_radii(f: &SkewProduct, c: &Classification, dv: &DValue, r2: f64) -> Result<Radii> {
    let l = dv.l;
    if c.case() == Case::Three && !c.flags.two_dominant_terms {
        return Err(Error::Regime("radii for the upper wedge are not derived here".into()));
    }
    let delta = rat(c.delta as i64, 1);
    if dv.d < delta {
        return Err(Error::Regime(format!("D = {} is below δ = {}", dv.d, c.delta)));
    }
    if !(r2 > 0.0) {
        return Err(Error::Regime("r2 must be positive".into()));
    }
    let lf = ratio_f64(l);
    let a = f.a().norm();
    let higher: Vec<(f64, f64)> =
        f.p().terms().filter(|&(k, _)| k > c.delta).map(|(k, b)| ((k - c.delta) as f64, b.norm())).collect();
    let c1 = |r: f64| a - higher.iter().map(|&(k, b)| b * r.powf(k)).sum::<f64>();
    let g = sup_where(|r| c1(r) >= a / 2.0, R_CAP);
    let p_terms: Vec<(f64, f64)> = f.p().terms().map(|(k, b)| (k as f64, b.norm())).collect();
    let h = sup_where(|r| p_terms.iter().map(|&(k, b)| b * r.powf(k)).sum::<f64>() <= r, R_CAP);
    let cap = g.min(h);

    let line = l * dv.d;
    let mut on_line = 0.0;
    let mut rest: Vec<(Rational, f64)> = Vec::new();
    for ((i, j), b) in f.q().terms() {
        let s = rat(i as i64, 1) + l * rat(j as i64, 1);
        let coef = b.norm() * r2.powi(j as i32);
        if s == line {
            on_line += coef;
        } else {
            rest.push((s, coef));
        }
    }

    let (branch, base, exponent) = if dv.d > delta {
        let sum = |r: f64| on_line + rest.iter().map(|&(s, k)| k * r.powf(ratio_f64(s - line))).sum::<f64>();
        let e = ratio_f64(l * (dv.d - delta));
        (RadiiBranch::Above, Box::new(sum) as Box<dyn Fn(f64) -> f64>, e)
    } else {
        if on_line / a.powf(lf) >= r2 / 2.0 {
            return Err(Error::Regime(format!("r2 = {r2} too large for the terms on the dominant line")));
        }
        match dv.d_star {
            None => {
                let r1 = cap / 2.0;
                return Ok(Radii { r1, r2, constant: 0.0, exponent: 0.0, branch: RadiiBranch::Equal });
            }
            Some(ds) => {
                let line_star = l * ds;
                let sum = move |r: f64| 2.0 * rest.iter().map(|&(s, k)| k * r.powf(ratio_f64(s - line_star))).sum::<f64>();
                (RadiiBranch::Equal, Box::new(sum) as Box<dyn Fn(f64) -> f64>, ratio_f64(l * (ds - delta)))
            }
        }
    };
    let constant = |r: f64| base(r) / c1(r).powf(lf);
    let holds = |r: f64| {
        let ok = constant(r) * r.powf(exponent) < r2;
        match branch {
            RadiiBranch::Above => ok,
            RadiiBranch::Equal => ok && on_line / c1(r).powf(lf) < r2 / 2.0,
        }
    };
    let rstar = sup_where(|r| holds(r) || constant(r) * r.powf(exponent) == r2, cap);
    let mut r1 = rstar / 2.0;
    let mut tries = 0;
    while !holds(r1) {
        r1 /= 2.0;
        tries += 1;
        if tries > 64 || r1 == 0.0 {
            return Err(Error::Regime("no radius satisfies the invariance inequality".into()));
        }
    }
    Ok(Radii { r1, r2, constant: constant(r1), exponent, branch })
}
