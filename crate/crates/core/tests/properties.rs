use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;

use skewprod::algebra::{iterate, rat, ratio_f64, BiPoly, Rational, SkewProduct, UniPoly, Wide};
use skewprod::blowup::{blowup_pi1, check_blowup_tables};
use skewprod::newton::{classify_support, newton_polygon, Case};
use skewprod::oracles::hull_vertices_brute_force;
use skewprod::regions::{classify_point, sample_rng, WedgeSpec};
use skewprod::weights::{case4_first_interval, case4_rectangle, case4_second_interval, d_value, weight_interval_for};
use skewprod::Error;

fn support_strategy(max_terms: usize, max_exp: u32) -> impl Strategy<Value = BTreeSet<(u32, u32)>> {
    prop::collection::btree_set((0..=max_exp, 0..=max_exp), 1..=max_terms)
}

// supports valid for a superattracting skew product
fn map_support() -> impl Strategy<Value = BTreeSet<(u32, u32)>> {
    support_strategy(12, 9).prop_filter("no constant or linear w term", |s| !s.contains(&(0, 0)) && !s.contains(&(0, 1)))
}

fn unit_map(delta: u32, support: &BTreeSet<(u32, u32)>) -> SkewProduct {
    let one = Complex64::new(1.0, 0.0);
    SkewProduct::new(UniPoly::monomial(delta, one), BiPoly::new(support.iter().map(|&k| (k, one)))).unwrap()
}

fn poly(support: &BTreeSet<(u32, u32)>) -> BiPoly {
    BiPoly::new(support.iter().map(|&k| (k, Complex64::new(1.0, 0.0))))
}

fn intercepts_of(vertices: &[(u32, u32)]) -> Vec<Rational> {
    vertices
        .windows(2)
        .map(|p| {
            let ((n0, m0), (n1, m1)) = (p[0], p[1]);
            // y-intercept of the line through the two vertices
            let slope = rat(m1 as i64 - m0 as i64, n1 as i64 - n0 as i64);
            rat(m0 as i64, 1) - slope * rat(n0 as i64, 1)
        })
        .collect()
}

// a support with a middle vertex and a δ that makes it dominant
fn case4_input() -> impl Strategy<Value = (BTreeSet<(u32, u32)>, u32)> {
    map_support().prop_filter_map("needs a middle dominant vertex", |s| {
        let np = newton_polygon(&poly(&s)).ok()?;
        let t = np.intercepts().to_vec();
        (1..np.len().saturating_sub(1)).find_map(|k| {
            let lo = t[k];
            let hi = t[k - 1];
            let delta = lo.ceil().to_integer().max(2);
            (rat(delta, 1) <= hi && delta <= 30).then_some((s.clone(), delta as u32))
        })
    })
}

fn weight_grid(top: Rational, marks: &[Rational]) -> Vec<Rational> {
    let mut g: Vec<Rational> = (0..=50).map(|k| top * rat(k, 50)).collect();
    g.extend_from_slice(marks);
    g.sort();
    g.dedup();
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn hull_matches_brute_force(s in support_strategy(12, 9)) {
        let np = newton_polygon(&poly(&s)).unwrap();
        let oracle = hull_vertices_brute_force(&s);
        prop_assert_eq!(np.vertices(), &oracle[..]);
        prop_assert_eq!(np.intercepts(), &intercepts_of(&oracle)[..]);
        prop_assert!(np.intercepts().windows(2).all(|t| t[0] > t[1]));
    }

    #[test]
    fn classification_is_total(s in map_support(), delta in 2u32..=12) {
        let c = classify_support(s.iter().copied(), delta).unwrap();
        let t = c.polygon.intercepts().to_vec();
        let dl = rat(delta as i64, 1);
        for term in &c.dominant {
            let k = term.vertex;
            prop_assert!(k == 0 || dl <= t[k - 1]);
            prop_assert!(k + 1 == c.polygon.len() || t[k] <= dl);
            let expected = match (c.polygon.len(), k) {
                (1, _) => Case::One,
                (_, 0) => Case::Three,
                (s, k) if k + 1 == s => Case::Two,
                _ => Case::Four,
            };
            prop_assert_eq!(term.case, expected);
            if delta > term.d {
                prop_assert_eq!(term.alpha(delta), Some(rat(term.gamma as i64, (delta - term.d) as i64)));
            }
        }
        prop_assert_eq!(c.flags.two_dominant_terms, t.contains(&dl));
        prop_assert_eq!(c.dominant.len(), if c.flags.two_dominant_terms { 2 } else { 1 });
        let expected_c = if c.gamma() > 0 || delta <= c.d() { delta } else { c.d() };
        prop_assert_eq!(c.c_infinity, expected_c);
        prop_assert_eq!(c.lambda, delta.max(c.d()));
    }

    #[test]
    fn case2_interval_is_the_inequality_set(s in map_support(), delta in 2u32..=12) {
        let c = classify_support(s.iter().copied(), delta).unwrap();
        let Some(term) = c.term(Case::Two) else { return Ok(()); };
        let interval = weight_interval_for(&c, term).unwrap();
        let (g, d, dl) = (term.gamma as i64, term.d as i64, delta as i64);
        for num in 1..=60i64 {
            for den in [1i64, 2, 3, 4, 5, 7] {
                let l = rat(num, den * 4);
                let lhs = l * rat(dl, 1);
                let mid = rat(g, 1) + l * rat(d, 1);
                let holds = lhs <= mid && s.iter().all(|&(i, j)| mid <= rat(i as i64, 1) + l * rat(j as i64, 1));
                prop_assert_eq!(interval.contains(l), holds, "l = {}", l);
            }
        }
        prop_assert!(interval.contains(term.l1));
    }

    #[test]
    fn d_value_is_support_minimum(s in map_support(), num in 1i64..=20, den in 1i64..=20) {
        let l = rat(num, den);
        let dv = d_value(&poly(&s), l).unwrap();
        let brute = s.iter().map(|&(i, j)| rat(i as i64, 1) / l + rat(j as i64, 1)).min().unwrap();
        prop_assert_eq!(dv.d, brute);
        let np = newton_polygon(&poly(&s)).unwrap();
        prop_assert!(np.vertices().contains(&dv.vertex));
        prop_assert_eq!(rat(dv.vertex.0 as i64, 1) / l + rat(dv.vertex.1 as i64, 1), brute);
    }

    #[test]
    fn rectangle_is_union_of_fibers((s, delta) in case4_input()) {
        let c = classify_support(s.iter().copied(), delta).unwrap();
        let rect = case4_rectangle(&c).unwrap();
        let first = case4_first_interval(&c).unwrap();
        let term = c.term(Case::Four).unwrap();
        let top = term.upper_weight().unwrap();
        let alpha = term.alpha(delta).unwrap();
        prop_assert_eq!(first.lo, term.l1);
        let grid_a = weight_grid(top, &[term.l1, alpha, top]);
        let grid_b = weight_grid(top, &[alpha - term.l1, top - alpha, top - term.l1]);
        for &a in &grid_a {
            for &b in &grid_b {
                let in_union = first.contains(a)
                    && b > rat(0, 1)
                    && case4_second_interval(&c, a).unwrap().contains(b);
                prop_assert_eq!(rect.contains(a, b), in_union, "({}, {})", a, b);
            }
        }
        prop_assert_eq!(rect.sum.hi, Some(top));
    }

    #[test]
    fn blowup_flags_match_tables(s in map_support(), delta in 2u32..=8, l in 1u32..=4) {
        let f = unit_map(delta, &s);
        let c = skewprod::classify(&f).unwrap();
        let t = check_blowup_tables(&f, rat(l as i64, 1)).unwrap();
        match blowup_pi1(&f, &c, l) {
            Ok(r) => {
                prop_assert!(t.holomorphic);
                prop_assert_eq!(r.superattracting_at_origin, t.superattracting);
                prop_assert_eq!(r.degenerates_axis, t.degenerates);
                let term = c.primary();
                let direct = term.gamma as i64 + l as i64 * (term.d as i64 - delta as i64);
                prop_assert_eq!(r.gamma_tilde, rat(direct, 1));
                prop_assert_eq!(r.exponent_map.len(), s.len());
            }
            Err(Error::NotHolomorphic { .. }) => prop_assert!(!t.holomorphic),
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn rational_arithmetic_is_exact(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50, e in -50i64..50) {
        let (x, y, z) = (rat(a, b), rat(c, d), rat(e, 7));
        prop_assert_eq!((x + y) + z, x + (y + z));
        if x != rat(0, 1) {
            prop_assert_eq!(x / x, rat(1, 1));
        }
    }

    #[test]
    fn wide_matches_f64(ar in -1.0f64..1.0, ai in -1.0f64..1.0, br in -1.0f64..1.0, bi in -1.0f64..1.0, k in 1u32..200) {
        let (a, b) = (Complex64::new(ar, ai), Complex64::new(br, bi));
        prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
        let (wa, wb) = (Wide::from(a), Wide::from(b));
        prop_assert!(((wa * wb).to_c64() - a * b).norm() <= 1e-15 * (a * b).norm());
        prop_assert!(((wa / wb).to_c64() - a / b).norm() <= 1e-15 * (a / b).norm());
        prop_assert!(((wa + wb).to_c64() - (a + b)).norm() <= 1e-15 * (a.norm() + b.norm()));
        use skewprod::algebra::Scalar;
        let big = wa.ipow(k * 50);
        let expected = (k * 50) as f64 * a.norm().ln();
        prop_assert!((big.ln_abs() - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        prop_assert_eq!(wa.abs_lt(&wb), a.norm() < b.norm());
    }

    #[test]
    fn iterate_agrees_with_eval(s in map_support(), delta in 2u32..=5, zr in -0.9f64..0.9, wr in -0.9f64..0.9) {
        let f = unit_map(delta, &s);
        let orbit = iterate(&f, Complex64::new(zr, 0.3 * zr), Complex64::new(wr, -0.2), 12, 1e12);
        for pair in orbit.points.windows(2) {
            prop_assert_eq!(f.eval(pair[0].z, pair[0].w), (pair[1].z, pair[1].w));
        }
    }

    #[test]
    fn labels_only_refine(zr in -0.8f64..0.8, zi in -0.8f64..0.8, wr in -1.5f64..1.5, wi in -1.5f64..1.5, b1 in 0usize..30, extra in 1usize..40) {
        let one = Complex64::new(1.0, 0.0);
        let f = SkewProduct::new(UniPoly::monomial(2, one), BiPoly::new([((1, 3), one), ((0, 4), one)])).unwrap();
        let u = WedgeSpec::lower(rat(1, 1), 0.05);
        let (z, w) = (Complex64::new(zr, zi), Complex64::new(wr, wi));
        let early = classify_point(&f, &u, z, w, b1);
        let late = classify_point(&f, &u, z, w, b1 + extra);
        if !early.undecided {
            prop_assert_eq!(early, late);
        }
    }

    #[test]
    fn lower_wedges_nest(num in 1i64..12, den in 1i64..6, bump in 1i64..12, r in 0.01f64..1.0, seed in 0u64..1000) {
        let l = rat(num, den);
        let inner = WedgeSpec::lower(l + rat(bump, 4), r);
        let outer = WedgeSpec::lower(l, r);
        let mut rng = sample_rng(seed, 0);
        for _ in 0..50 {
            let (z, w) = inner.sample(&mut rng);
            if inner.contains(z, w) {
                prop_assert!(outer.contains(z, w));
            }
        }
    }

    #[test]
    fn two_weight_wedges_nest((s, delta) in case4_input(), pa in 0i64..=20, pb in 1i64..=20, r in 0.01f64..0.5, seed in 0u64..1000) {
        // a pair inside the rectangle gives a wedge inside the extreme one,
        // once the radius is shrunk to r^(l2/l2')
        let c = classify_support(s.iter().copied(), delta).unwrap();
        let rect = case4_rectangle(&c).unwrap();
        let term = c.term(Case::Four).unwrap();
        let top = term.upper_weight().unwrap();
        let pick = |lo: Rational, hi: Rational, k: i64| lo + (hi - lo) * rat(k, 20);
        let a = pick(rect.first.lo, rect.first.hi.unwrap(), pa.min(19));
        let b = pick(rect.sum.lo, rect.sum.hi.unwrap(), pb) - a;
        if !rect.contains(a, b) {
            return Ok(());
        }
        let (l1, l2) = (term.l1, top - term.l1);
        let outer = WedgeSpec::Between { l1, l2, r };
        let r_inner = r.min(r.powf(ratio_f64(l2) / ratio_f64(b)));
        let inner = WedgeSpec::Between { l1: a, l2: b, r: r_inner };
        let mut rng = sample_rng(seed, 1);
        for _ in 0..50 {
            let (z, w) = inner.sample(&mut rng);
            if inner.contains(z, w) {
                prop_assert!(outer.contains(z, w), "{:?} {:?}", z, w);
            }
        }
    }

    #[test]
    fn strict_middle_wedges_are_disjoint((s, delta) in case4_input(), r in 0.01f64..0.9, seed in 0u64..1000) {
        let c = classify_support(s.iter().copied(), delta).unwrap();
        let term = c.term(Case::Four).unwrap();
        let t = c.polygon.intercepts();
        let dl = rat(delta as i64, 1);
        prop_assume!(t[term.vertex] < dl && dl < t[term.vertex - 1]);
        let alpha = term.alpha(delta).unwrap();
        let top = term.upper_weight().unwrap();
        let left = WedgeSpec::Between { l1: term.l1, l2: alpha - term.l1, r };
        let right = WedgeSpec::Between { l1: alpha, l2: top - alpha, r };
        let mut rng = sample_rng(seed, 2);
        for _ in 0..50 {
            let (z, w) = left.sample(&mut rng);
            prop_assert!(!(left.contains(z, w) && right.contains(z, w)));
            let (z, w) = right.sample(&mut rng);
            prop_assert!(!(left.contains(z, w) && right.contains(z, w)));
        }
    }
}
