//! Wedges around the superattracting point, sampled invariance checks, and
//! basin labels for single points.

use std::fmt;
use std::ops::Range;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{ratio_f64, Rational, SkewProduct, Wide};
use crate::error::{Error, Result};
use crate::green::{estimate, GreenConfig, GreenEstimate, GreenKind};
use crate::newton::Classification;

/// Default relative thickness of the equality sets `SOut` and `SIn`.
pub const EQUALITY_BAND: f64 = 1e-6;
pub const EDEG_THRESHOLD: f64 = 1e-9;
pub const BASIN_ESCAPE: f64 = 1e12;
const DECAY_STEPS: usize = 5;
const BISECTION_STEPS: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub enum WedgeSpec {
    /// `{|z| < r1, |w| < r2 |z|^l}`
    Lower { l: Rational, r1: f64, r2: f64 },
    /// Same set as `Lower`; the region where the log⁺ estimators live.
    Plus { l: Rational, r1: f64, r2: f64 },
    /// `{|z|^(l1+l2) < r^l2 |w|, |w| < r |z|^l1}`
    Between { l1: Rational, l2: Rational, r: f64 },
    /// `{0 < |z| < r, r |z|^l <= |w| < r3}`
    Outer { l: Rational, r: f64, r3: f64 },
    /// `{|z|^(l1+l2) < r^l2 |w|, |w| = r |z|^l1}`, equality within `band`
    SOut { l1: Rational, l2: Rational, r: f64, band: f64 },
    /// `{|z|^(l1+l2) = r^l2 |w|, |w| < r |z|^l1}`, equality within `band`
    SIn { l1: Rational, l2: Rational, r: f64, band: f64 },
}

impl WedgeSpec {
    /// `{|z| < r, |w| < r |z|^l}`.
    pub fn lower(l: Rational, r: f64) -> WedgeSpec {
        WedgeSpec::Lower { l, r1: r, r2: r }
    }

    pub fn validate(&self) -> Result<()> {
        let radius_ok = |x: f64| x.is_finite() && x > 0.0;
        let bad = |m: &str| Err(Error::InvalidMap(format!("wedge: {m}")));
        let (weights_ok, radii): (bool, Vec<f64>) = match self {
            WedgeSpec::Lower { l, r1, r2 } | WedgeSpec::Plus { l, r1, r2 } => (!l.is_negative(), vec![*r1, *r2]),
            WedgeSpec::Between { l1, l2, r } => (!l1.is_negative() && l2.is_positive(), vec![*r]),
            WedgeSpec::Outer { l, r, r3 } => (!l.is_negative(), vec![*r, *r3]),
            WedgeSpec::SOut { l1, l2, r, band } | WedgeSpec::SIn { l1, l2, r, band } => {
                (!l1.is_negative() && l2.is_positive() && *band > 0.0, vec![*r])
            }
        };
        if !weights_ok {
            return bad("weights out of range");
        }
        if !radii.into_iter().all(radius_ok) {
            return bad("radii must be positive and finite");
        }
        Ok(())
    }

    pub fn contains(&self, z: Complex64, w: Complex64) -> bool {
        self.contains_wide(Wide::from(z), Wide::from(w))
    }

    pub fn contains_wide(&self, z: Wide, w: Wide) -> bool {
        let zero_z = z.is_zero();
        // ln|w| - t ln|z| for z, w nonzero
        let lr = |t: Rational| w.ln_abs_ratio_pow(&z, t);
        match *self {
            WedgeSpec::Lower { l, r1, r2 } | WedgeSpec::Plus { l, r1, r2 } => {
                if z.ln_abs() >= r1.ln() {
                    return false;
                }
                if w.is_zero() {
                    return !zero_z || l.is_zero();
                }
                if zero_z {
                    return l.is_zero() && w.ln_abs() < r2.ln();
                }
                lr(l) < r2.ln()
            }
            WedgeSpec::Between { l1, l2, r } => {
                if w.is_zero() {
                    return false;
                }
                if zero_z {
                    return l1.is_zero() && w.ln_abs() < r.ln();
                }
                lr(l1 + l2) > -ratio_f64(l2) * r.ln() && lr(l1) < r.ln()
            }
            WedgeSpec::Outer { l, r, r3 } => {
                if zero_z || z.ln_abs() >= r.ln() || w.ln_abs() >= r3.ln() {
                    return false;
                }
                !w.is_zero() && lr(l) >= r.ln()
            }
            WedgeSpec::SOut { l1, l2, r, band } => {
                if zero_z || w.is_zero() {
                    return false;
                }
                lr(l1 + l2) > -ratio_f64(l2) * r.ln() && (lr(l1) - r.ln()).abs() <= band
            }
            WedgeSpec::SIn { l1, l2, r, band } => {
                if zero_z || w.is_zero() {
                    return false;
                }
                (lr(l1 + l2) + ratio_f64(l2) * r.ln()).abs() <= band && lr(l1) < r.ln()
            }
        }
    }

    /// Largest `|z|` occurring in the region.
    fn z_bound(&self) -> f64 {
        match *self {
            WedgeSpec::Lower { r1, .. } | WedgeSpec::Plus { r1, .. } => r1,
            WedgeSpec::Outer { r, .. } => r,
            WedgeSpec::Between { l2, r, .. } | WedgeSpec::SOut { l2, r, .. } | WedgeSpec::SIn { l2, r, .. } => {
                r.powf(1.0 + 1.0 / ratio_f64(l2))
            }
        }
    }

    // (lo, hi) for |w| over the fiber at |z| = s; lo == hi for equality sets
    fn w_range(&self, s: f64) -> (f64, f64) {
        let pw = |t: Rational| s.powf(ratio_f64(t));
        match *self {
            WedgeSpec::Lower { l, r2, .. } | WedgeSpec::Plus { l, r2, .. } => (0.0, r2 * pw(l)),
            WedgeSpec::Between { l1, l2, r } => (pw(l1 + l2) / r.powf(ratio_f64(l2)), r * pw(l1)),
            WedgeSpec::Outer { l, r, r3 } => (r * pw(l), r3),
            WedgeSpec::SOut { l1, r, .. } => (r * pw(l1), r * pw(l1)),
            WedgeSpec::SIn { l1, l2, r, .. } => {
                let v = pw(l1 + l2) / r.powf(ratio_f64(l2));
                (v, v)
            }
        }
    }

    /// Seeded sample: `|z|` log-uniform over `(ρ·1e-8, ρ)`, `|w|` uniform over the
    /// fiber, arguments uniform. May land outside after rounding; callers check.
    pub fn sample(&self, rng: &mut impl Rng) -> (Complex64, Complex64) {
        let rho = self.z_bound();
        let s = rho * 10f64.powf(-8.0 * rng.gen::<f64>());
        let (lo, hi) = self.w_range(s);
        let t = lo + (hi - lo) * rng.gen::<f64>();
        let z = Complex64::from_polar(s, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let w = Complex64::from_polar(t, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        (z, w)
    }
}

impl fmt::Display for WedgeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WedgeSpec::Lower { l, r1, r2 } => write!(f, "lower l={l} r1={r1:e} r2={r2:e}"),
            WedgeSpec::Plus { l, r1, r2 } => write!(f, "plus l={l} r1={r1:e} r2={r2:e}"),
            WedgeSpec::Between { l1, l2, r } => write!(f, "between l1={l1} l2={l2} r={r:e}"),
            WedgeSpec::Outer { l, r, r3 } => write!(f, "outer l={l} r={r:e} r3={r3:e}"),
            WedgeSpec::SOut { l1, l2, r, band } => write!(f, "s_out l1={l1} l2={l2} r={r:e} band={band:e}"),
            WedgeSpec::SIn { l1, l2, r, band } => write!(f, "s_in l1={l1} l2={l2} r={r:e} band={band:e}"),
        }
    }
}

/// Per-index sampler: the same `(seed, index)` always gives the same point.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: u64,
    pub z: Complex64,
    pub w: Complex64,
    pub image: (Complex64, Complex64),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    /// Samples inside the region whose image was tested.
    pub checked: u64,
    /// Samples that rounding put outside the region.
    pub skipped: u64,
    /// Ordered by sample index.
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Combine reports over disjoint index ranges.
    pub fn merge(mut self, other: ViolationReport) -> ViolationReport {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
        self.violations.sort_by_key(|v| v.index);
        self
    }
}

pub fn verify_invariance_range(f: &SkewProduct, spec: &WedgeSpec, seed: u64, indices: Range<u64>) -> Result<ViolationReport> {
    spec.validate()?;
    let mut report = ViolationReport::default();
    for index in indices {
        let mut rng = sample_rng(seed, index);
        let (z, w) = spec.sample(&mut rng);
        let (zw, ww) = (Wide::from(z), Wide::from(w));
        if !spec.contains_wide(zw, ww) {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let (fz, fw) = f.eval(zw, ww);
        if !spec.contains_wide(fz, fw) {
            report.violations.push(Violation { index, z, w, image: (fz.to_c64(), fw.to_c64()) });
        }
    }
    Ok(report)
}

/// Maps `samples` seeded points of the region once and reports every image outside it.
pub fn verify_invariance(f: &SkewProduct, spec: &WedgeSpec, samples: u64, seed: u64) -> Result<ViolationReport> {
    verify_invariance_range(f, spec, seed, 0..samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basin {
    InA0AndAfl,
    InA0NotYetAfl,
    EscapesOrOutside,
    OnEz,
    NearEdeg,
}

impl fmt::Display for Basin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basin::InA0AndAfl => "in_A0_and_Afl",
            Basin::InA0NotYetAfl => "in_A0_not_yet_Afl",
            Basin::EscapesOrOutside => "escapes_or_outside",
            Basin::OnEz => "on_Ez",
            Basin::NearEdeg => "near_Edeg",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasinLabel {
    pub label: Basin,
    /// Step at which the orbit was first seen in the wedge, or at which the label was decided.
    pub entry_step: Option<usize>,
    /// Budget ran out; `label` is only the decay heuristic's guess.
    pub undecided: bool,
}

fn decided(label: Basin, n: usize) -> BasinLabel {
    BasinLabel { label, entry_step: Some(n), undecided: false }
}

/// Working polydisk radius for the decay test.
fn decay_radius(spec: &WedgeSpec) -> f64 {
    spec.z_bound().min(0.05)
}

/// Iterates until the orbit is seen in the wedge, lands on `z = 0`, sits over a
/// nearly degenerate fiber, or passes `1e12`. Decisions depend only on the
/// orbit prefix, so raising `budget` never changes a decided label.
pub fn classify_point(f: &SkewProduct, spec: &WedgeSpec, z: Complex64, w: Complex64, budget: usize) -> BasinLabel {
    let rho0 = decay_radius(spec);
    let ln_rho0 = rho0.ln();
    let ln_escape = BASIN_ESCAPE.ln();
    let (mut zn, mut wn) = (Wide::from(z), Wide::from(w));
    let mut decaying = 0;
    let mut prev: Option<(f64, f64)> = None;
    for n in 0..=budget {
        if zn.is_zero() {
            return decided(Basin::OnEz, n);
        }
        let lz = zn.ln_abs();
        if lz >= ln_rho0 {
            let fibers = f.q().fiber_coeffs(zn);
            let mut upper = fibers.iter().filter(|(j, _)| *j >= 1).peekable();
            if upper.peek().is_some() && upper.all(|(_, c)| c.ln_abs() < EDEG_THRESHOLD.ln()) {
                return decided(Basin::NearEdeg, n);
            }
        }
        if spec.contains_wide(zn, wn) {
            return decided(Basin::InA0AndAfl, n);
        }
        let lw = wn.ln_abs();
        if !(lz <= ln_escape && lw <= ln_escape) {
            return decided(Basin::EscapesOrOutside, n);
        }
        let inside = lz < ln_rho0 && lw < ln_rho0;
        decaying = match prev {
            Some((pz, pw)) if inside && lz <= pz && lw <= pw => decaying + 1,
            _ => 0,
        };
        prev = Some((lz, lw));
        if n == budget {
            break;
        }
        (zn, wn) = f.eval(zn, wn);
        if zn.out_of_range() || wn.out_of_range() {
            break;
        }
    }
    let label = if decaying >= DECAY_STEPS { Basin::InA0NotYetAfl } else { Basin::EscapesOrOutside };
    BasinLabel { label, entry_step: None, undecided: true }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSample {
    pub w: Complex64,
    pub label: BasinLabel,
    pub green: GreenEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProbe {
    /// In-basin points visited by the bisection, approaching the boundary.
    pub approach: Vec<ProbeSample>,
    /// Midpoint of the final bracket.
    pub boundary: Complex64,
}

/// Walks the ray `t·direction`, `0 < t <= w_max`, in the fiber over `z0` until the
/// wedge basin label flips, then bisects the bracket and records `kind` along the
/// inside approach.
#[allow(clippy::too_many_arguments)]
pub fn boundary_probe(
    f: &SkewProduct,
    c: &Classification,
    spec: &WedgeSpec,
    z0: Complex64,
    direction: Complex64,
    w_max: f64,
    kind: GreenKind,
    budget: usize,
    cfg: &GreenConfig,
) -> Result<BoundaryProbe> {
    spec.validate()?;
    // z0 must lie in the basin of p, off the exceptional fiber
    let mut zn = Wide::from(z0);
    let mut captured = false;
    for _ in 0..=budget.max(64) {
        if zn.is_zero() || zn.ln_abs() > BASIN_ESCAPE.ln() {
            break;
        }
        if zn.ln_abs() < -700.0 {
            captured = true;
            break;
        }
        zn = f.p().eval(zn);
    }
    if !captured {
        return Err(Error::Regime("probe fiber is not over the basin of p".into()));
    }
    let u = direction / direction.norm();
    let inside = |t: f64| classify_point(f, spec, z0, u * t, budget).label == Basin::InA0AndAfl;
    const SCAN: usize = 64;
    let mut bracket = None;
    let mut last_in: Option<f64> = None;
    for k in 1..=SCAN {
        let t = w_max * k as f64 / SCAN as f64;
        if inside(t) {
            last_in = Some(t);
        } else if let Some(t_in) = last_in {
            bracket = Some((t_in, t));
            break;
        }
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoBoundary)?;
    let mut approach = Vec::new();
    let mut record = |t: f64| -> Result<()> {
        let w = u * t;
        let label = classify_point(f, spec, z0, w, budget);
        approach.push(ProbeSample { w, label, green: estimate(f, c, kind, z0, w, cfg)? });
        Ok(())
    };
    record(lo)?;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            lo = mid;
            record(lo)?;
        } else {
            hi = mid;
        }
    }
    Ok(BoundaryProbe { approach, boundary: u * (0.5 * (lo + hi)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, BiPoly, UniPoly};
    use crate::newton::classify;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn contains_examples() {
        let u = WedgeSpec::lower(rat(1, 1), 0.1);
        assert!(u.contains(c(0.05, 0.0), c(0.004, 0.0)));
        assert!(!u.contains(c(0.0, 0.0), c(0.0, 0.0)));
        assert!(!u.contains(c(0.05, 0.0), c(0.006, 0.0)));
        let b = WedgeSpec::Between { l1: rat(1, 1), l2: rat(1, 1), r: 0.1 };
        assert!(!b.contains(c(0.05, 0.0), c(0.03, 0.0)));
        // 0.05² / 0.1 = 0.025 < |w| < 0.005 is empty; take a smaller z
        assert!(b.contains(c(0.005, 0.0), c(0.0003, 0.0)));
        // case 3 wedge holds the w-axis away from 0
        let b3 = WedgeSpec::Between { l1: rat(0, 1), l2: rat(2, 1), r: 0.1 };
        assert!(b3.contains(c(0.0, 0.0), c(0.05, 0.0)));
        assert!(!b3.contains(c(0.0, 0.0), c(0.0, 0.0)));
        let v = WedgeSpec::Outer { l: rat(1, 1), r: 0.1, r3: 0.5 };
        assert!(v.contains(c(0.05, 0.0), c(0.3, 0.0)));
        assert!(!v.contains(c(0.0, 0.0), c(0.3, 0.0)));
        assert!(!v.contains(c(0.05, 0.0), c(0.001, 0.0)));
    }

    #[test]
    fn contains_far_below_f64() {
        let u = WedgeSpec::lower(rat(2, 1), 0.1);
        let z = Wide::new(c(0.5, 0.0), -5000);
        let w_in = Wide::new(c(0.5, 0.0), -10010);
        let w_out = Wide::new(c(0.5, 0.0), -9990);
        assert!(u.contains_wide(z, w_in));
        assert!(!u.contains_wide(z, w_out));
    }

    #[test]
    fn equality_sets() {
        let s = WedgeSpec::SOut { l1: rat(0, 1), l2: rat(1, 1), r: 0.1, band: EQUALITY_BAND };
        let mut rng = sample_rng(1, 0);
        for _ in 0..100 {
            let (z, w) = s.sample(&mut rng);
            assert!(s.contains(z, w));
            assert!(!s.contains(z, w * 1.01));
        }
        let si = WedgeSpec::SIn { l1: rat(1, 1), l2: rat(1, 1), r: 0.1, band: EQUALITY_BAND };
        for _ in 0..100 {
            let (z, w) = si.sample(&mut rng);
            assert!(si.contains(z, w));
        }
    }

    #[test]
    fn monomial_invariance() {
        let f = SkewProduct::monomial(2, 1, 3).unwrap();
        let rep = verify_invariance(&f, &WedgeSpec::lower(rat(1, 1), 0.1), 10_000, 7).unwrap();
        assert!(rep.passed());
        assert!(rep.checked > 9_900);
        // splitting the index range does not change the outcome
        let a = verify_invariance_range(&f, &WedgeSpec::lower(rat(1, 1), 0.1), 7, 0..500).unwrap();
        let b = verify_invariance_range(&f, &WedgeSpec::lower(rat(1, 1), 0.1), 7, 500..1000).unwrap();
        let whole = verify_invariance(&f, &WedgeSpec::lower(rat(1, 1), 0.1), 1000, 7).unwrap();
        assert_eq!(a.merge(b), whole);
    }

    #[test]
    fn inflated_radius_is_caught() {
        // (z², zw³) on U¹ needs |z|·|w|³/|z|² < r|z|², i.e. |w|³ < r³... fails once r ≥ 1
        let f = SkewProduct::monomial(2, 1, 3).unwrap();
        let rep = verify_invariance(&f, &WedgeSpec::lower(rat(1, 1), 10.0), 2000, 3).unwrap();
        assert!(!rep.passed());
        let v = &rep.violations[0];
        assert!(WedgeSpec::lower(rat(1, 1), 10.0).contains(v.z, v.w));
    }

    #[test]
    fn labels() {
        let f = SkewProduct::monomial(2, 1, 3).unwrap();
        let u = WedgeSpec::lower(rat(1, 1), 0.1);
        let l = classify_point(&f, &u, c(0.05, 0.0), c(0.001, 0.0), 10);
        assert_eq!(l, BasinLabel { label: Basin::InA0AndAfl, entry_step: Some(0), undecided: false });
        let l = classify_point(&f, &u, c(0.5, 0.0), c(10.0, 0.0), 50);
        assert_eq!(l.label, Basin::EscapesOrOutside);
        assert!(!l.undecided);
        assert_eq!(classify_point(&f, &u, c(0.0, 0.0), c(0.3, 0.0), 10).label, Basin::OnEz);
        // enters after a few steps
        let l = classify_point(&f, &u, c(0.5, 0.0), c(0.5, 0.0), 50);
        assert_eq!(l.label, Basin::InA0AndAfl);
        assert!(l.entry_step.unwrap() > 0);
        // budget 0 from outside: undecided
        let l = classify_point(&f, &u, c(0.5, 0.0), c(0.5, 0.0), 0);
        assert!(l.undecided);
    }

    #[test]
    fn degenerate_fiber() {
        // q = (z - 0.5) w² + z²: the fiber over 0.5 collapses
        let q = BiPoly::new([((1, 2), c(1.0, 0.0)), ((0, 2), c(-0.5, 0.0)), ((2, 0), c(1.0, 0.0))]);
        let f = SkewProduct::new_unchecked(UniPoly::monomial(2, c(1.0, 0.0)), q);
        let u = WedgeSpec::lower(rat(1, 1), 0.1);
        assert_eq!(classify_point(&f, &u, c(0.5, 0.0), c(0.3, 0.0), 10).label, Basin::NearEdeg);
    }

    #[test]
    fn probe_semiconjugate_fiber() {
        use crate::oracles::{build_semiconjugate, OneDimPoly, SemiconjugateKind, SemiconjugateSpec};
        let h = OneDimPoly::new(UniPoly::new([(3, c(1.0, 0.0)), (2, c(1.0, 0.0))])).unwrap();
        let spec = SemiconjugateSpec { h, alpha: 1, delta: 4, kind: SemiconjugateKind::Degenerate };
        let f = build_semiconjugate(&spec).unwrap();
        let cl = classify(&f).unwrap();
        // h has the repelling fixed point (√5 - 1)/2 on the positive axis; in the fiber
        // over z0 = 0.5 the boundary sits at 0.5 times that
        let wedge = WedgeSpec::lower(rat(1, 1), 0.05);
        let probe = boundary_probe(&f, &cl, &wedge, c(0.5, 0.0), c(1.0, 0.0), 1.0, GreenKind::AlphaPlus, 200, &GreenConfig::default()).unwrap();
        let expected = 0.5 * (5f64.sqrt() - 1.0) / 2.0;
        assert!((probe.boundary.re - expected).abs() < 1e-6, "{:?}", probe.boundary);
        assert!(probe.approach.iter().all(|s| s.label.label == Basin::InA0AndAfl));
        // monomial with δ > d: the whole fiber is in the basin
        let m = SkewProduct::monomial(3, 1, 2).unwrap();
        let cm = classify(&m).unwrap();
        let e = boundary_probe(&m, &cm, &WedgeSpec::lower(rat(0, 1), 0.1), c(0.5, 0.0), c(1.0, 0.0), 2.0, GreenKind::Alpha, 200, &GreenConfig::default());
        assert_eq!(e.unwrap_err(), Error::NoBoundary);
    }
}
