//! Newton polygon of `q` and the case classification of a skew product.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{rat, BiPoly, Rational, SkewProduct};
use crate::error::{Error, Result};

/// Vertices of the convex hull of `⋃ (i, j) + R≥0²` over the support,
/// ordered with `n` strictly increasing and `m` strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    vertices: Vec<(u32, u32)>,
    intercepts: Vec<Rational>,
}

fn cross(o: (u32, u32), a: (u32, u32), b: (u32, u32)) -> i64 {
    let (ox, oy) = (o.0 as i64, o.1 as i64);
    (a.0 as i64 - ox) * (b.1 as i64 - oy) - (a.1 as i64 - oy) * (b.0 as i64 - ox)
}

impl NewtonPolygon {
    pub fn from_support<I: IntoIterator<Item = (u32, u32)>>(support: I) -> Result<NewtonPolygon> {
        let pts: BTreeSet<(u32, u32)> = support.into_iter().collect();
        if pts.is_empty() {
            return Err(Error::InvalidMap("empty support".into()));
        }
        // staircase: points not dominated by another point with i' <= i, j' <= j
        let mut stair: Vec<(u32, u32)> = Vec::new();
        for &(i, j) in &pts {
            if stair.last().is_none_or(|&(_, mj)| j < mj) {
                stair.push((i, j));
            }
        }
        let mut hull: Vec<(u32, u32)> = Vec::with_capacity(stair.len());
        for p in stair {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        let intercepts = hull
            .windows(2)
            .map(|v| {
                let ((n0, m0), (n1, m1)) = (v[0], v[1]);
                rat(m0 as i64, 1) + rat(n0 as i64 * (m0 as i64 - m1 as i64), n1 as i64 - n0 as i64)
            })
            .collect();
        Ok(NewtonPolygon { vertices: hull, intercepts })
    }

    pub fn vertices(&self) -> &[(u32, u32)] {
        &self.vertices
    }

    /// `T_k`: where the line through vertices `k` and `k+1` meets the `j` axis.
    /// Strictly decreasing, one fewer than the vertices.
    pub fn intercepts(&self) -> &[Rational] {
        &self.intercepts
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Slope parameter `(n_{k+1} - n_k) / (m_k - m_{k+1})` of edge `k`.
    pub fn edge_weight(&self, k: usize) -> Rational {
        let ((n0, m0), (n1, m1)) = (self.vertices[k], self.vertices[k + 1]);
        rat(n1 as i64 - n0 as i64, m0 as i64 - m1 as i64)
    }
}

pub fn newton_polygon(q: &BiPoly) -> Result<NewtonPolygon> {
    NewtonPolygon::from_support(q.support())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Case {
    One,
    Two,
    Three,
    Four,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Case::One => 1,
            Case::Two => 2,
            Case::Three => 3,
            Case::Four => 4,
        };
        write!(f, "Case{n}")
    }
}

/// A vertex `(γ, d)` of the polygon that dominates `q` near the invariant wedge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominantTerm {
    pub case: Case,
    /// Index into the polygon vertices.
    pub vertex: usize,
    pub gamma: u32,
    pub d: u32,
    pub l1: Rational,
    /// `None` stands for `+∞`. In the middle case this is the increment, so the
    /// wedge's upper weight is `l1 + l2`.
    pub l2: Option<Rational>,
}

impl DominantTerm {
    /// `γ / (δ - d)` when `d ≠ δ`.
    pub fn alpha(&self, delta: u32) -> Option<Rational> {
        (self.d != delta).then(|| rat(self.gamma as i64, delta as i64 - self.d as i64))
    }

    pub fn upper_weight(&self) -> Option<Rational> {
        self.l2.map(|l2| self.l1 + l2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassFlags {
    /// `δ` equals an intercept, so two adjacent vertices dominate.
    pub two_dominant_terms: bool,
    /// The first vertex is `(0, δ)`.
    pub special_case: bool,
    pub d_at_least_2: bool,
    pub gamma_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub delta: u32,
    pub polygon: NewtonPolygon,
    /// Primary term first; a second entry when two terms dominate.
    pub dominant: Vec<DominantTerm>,
    pub alpha: Option<Rational>,
    pub lambda: u32,
    pub c_infinity: u32,
    pub flags: ClassFlags,
}

impl Classification {
    pub fn primary(&self) -> &DominantTerm {
        &self.dominant[0]
    }

    pub fn alternate(&self) -> Option<&DominantTerm> {
        self.dominant.get(1)
    }

    pub fn case(&self) -> Case {
        self.primary().case
    }

    pub fn gamma(&self) -> u32 {
        self.primary().gamma
    }

    pub fn d(&self) -> u32 {
        self.primary().d
    }

    /// The dominant term of the given case, if any.
    pub fn term(&self, case: Case) -> Option<&DominantTerm> {
        self.dominant.iter().find(|t| t.case == case)
    }
}

/// `min i/(δ-j)` over support points below height `δ`; `0` when only `(0, δ)`
/// is available; undefined otherwise.
pub fn alpha_redefined<I: IntoIterator<Item = (u32, u32)>>(support: I, delta: u32) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    let mut pivot = false;
    for (i, j) in support {
        if j < delta {
            let v = rat(i as i64, delta as i64 - j as i64);
            best = Some(best.map_or(v, |b| b.min(v)));
        } else if (i, j) == (0, delta) {
            pivot = true;
        }
    }
    best.or(pivot.then(|| rat(0, 1)))
}

fn term_at(poly: &NewtonPolygon, k: usize) -> DominantTerm {
    let s = poly.len();
    let (gamma, d) = poly.vertices()[k];
    let (case, l1, l2) = if s == 1 {
        (Case::One, rat(0, 1), None)
    } else if k == 0 {
        (Case::Three, rat(0, 1), Some(poly.edge_weight(0)))
    } else if k == s - 1 {
        (Case::Two, poly.edge_weight(k - 1), None)
    } else {
        let l1 = poly.edge_weight(k - 1);
        (Case::Four, l1, Some(poly.edge_weight(k) - l1))
    };
    DominantTerm { case, vertex: k, gamma, d, l1, l2 }
}

pub fn classify(f: &SkewProduct) -> Result<Classification> {
    classify_support(f.q().support(), f.delta())
}

pub fn classify_support<I: IntoIterator<Item = (u32, u32)>>(support: I, delta: u32) -> Result<Classification> {
    let support: Vec<(u32, u32)> = support.into_iter().collect();
    let polygon = NewtonPolygon::from_support(support.iter().copied())?;
    let s = polygon.len();
    let t = polygon.intercepts();
    let dr = rat(delta as i64, 1);
    // vertex k dominates iff T_k <= δ <= T_{k-1}, with T_{-1} = +∞ and T_{s-1} = -∞
    let dominant: Vec<DominantTerm> = (0..s)
        .filter(|&k| (k == s - 1 || t[k] <= dr) && (k == 0 || dr <= t[k - 1]))
        .map(|k| term_at(&polygon, k))
        .collect();
    // the intercepts strictly decrease, so one vertex or two adjacent ones qualify
    debug_assert!(matches!(dominant.len(), 1 | 2));

    let primary = &dominant[0];
    let (gamma, d) = (primary.gamma, primary.d);
    let alpha = match primary.alpha(delta) {
        Some(a) => Some(a),
        None => alpha_redefined(support.iter().copied(), delta),
    };
    let lambda = delta.max(d);
    let c_infinity = if gamma > 0 || delta <= d { delta } else { d };
    let flags = ClassFlags {
        two_dominant_terms: dominant.len() == 2,
        special_case: polygon.vertices()[0] == (0, delta),
        d_at_least_2: d >= 2,
        gamma_positive: gamma > 0,
    };
    Ok(Classification { delta, polygon, dominant, alpha, lambda, c_infinity, flags })
}
