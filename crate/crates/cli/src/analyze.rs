//! The `analyze` report: one `key: value` per line, stable across runs.

use std::fmt::Write as _;

use skewprod::algebra::Rational;
use skewprod::blowup::{blowup_pi1, check_blowup_tables, transformed_support};
use skewprod::newton::DominantTerm;
use skewprod::weights::{case4_rectangle, d_value, weight_interval_for, WeightInterval};
use skewprod::{Case, Classification, SkewProduct};

fn opt(r: Option<Rational>) -> String {
    r.map_or_else(|| "inf".to_string(), |x| x.to_string())
}

fn pairs(v: impl IntoIterator<Item = (u32, u32)>) -> String {
    v.into_iter().map(|(i, j)| format!("({i},{j})")).collect::<Vec<_>>().join(" ")
}

fn term_lines(out: &mut String, key: &str, c: &Classification, t: &DominantTerm) {
    writeln!(out, "{key}.vertex: ({},{})", t.gamma, t.d).unwrap();
    writeln!(out, "{key}.case: {}", t.case).unwrap();
    writeln!(out, "{key}.gamma: {}", t.gamma).unwrap();
    writeln!(out, "{key}.d: {}", t.d).unwrap();
    writeln!(out, "{key}.l1: {}", t.l1).unwrap();
    writeln!(out, "{key}.l2: {}", opt(t.l2)).unwrap();
    let interval = if t.case == Case::Four {
        case4_rectangle(c).map(|r| {
            let corner = r.excluded_corner.map_or("none".to_string(), |(a, b)| format!("({a}, {b})"));
            format!("first {} sum {} excluded {corner}", r.first, r.sum)
        })
    } else {
        weight_interval_for(c, t).map(|i: WeightInterval| i.to_string())
    };
    match interval {
        Ok(s) => writeln!(out, "{key}.weights: {s}").unwrap(),
        Err(e) => writeln!(out, "{key}.weights: unavailable ({e})").unwrap(),
    }
}

/// Classification, weights, `D_l` for the given weights and an optional blow-up.
pub fn analyze_report(f: &SkewProduct, c: &Classification, weights: &[Rational], blowup: Option<u32>) -> String {
    let mut out = String::new();
    writeln!(out, "delta: {}", c.delta).unwrap();
    writeln!(out, "support: {}", pairs(f.q().support())).unwrap();
    writeln!(out, "vertices: {}", pairs(c.polygon.vertices().iter().copied())).unwrap();
    let t: Vec<String> = c.polygon.intercepts().iter().map(|x| x.to_string()).collect();
    writeln!(out, "intercepts: {}", if t.is_empty() { "none".to_string() } else { t.join(" ") }).unwrap();
    writeln!(out, "case: {}", c.case()).unwrap();
    term_lines(&mut out, "dominant", c, c.primary());
    if let Some(alt) = c.alternate() {
        term_lines(&mut out, "alternate", c, alt);
    } else {
        writeln!(out, "alternate: none").unwrap();
    }
    writeln!(out, "alpha: {}", c.alpha.map_or("undefined".to_string(), |a| a.to_string())).unwrap();
    writeln!(out, "lambda: {}", c.lambda).unwrap();
    writeln!(out, "c_infinity: {}", c.c_infinity).unwrap();
    let fl = &c.flags;
    writeln!(
        out,
        "flags: two_dominant_terms={} special_case={} d_ge_2={} gamma_positive={}",
        fl.two_dominant_terms, fl.special_case, fl.d_at_least_2, fl.gamma_positive
    )
    .unwrap();
    for &l in weights {
        match d_value(f.q(), l) {
            Ok(dv) => {
                let star = dv.d_star.map_or("none".to_string(), |x| x.to_string());
                writeln!(out, "D[{l}]: {} at ({},{}) attaining {} d_star {star}", dv.d, dv.vertex.0, dv.vertex.1, pairs(dv.attaining.iter().copied())).unwrap();
            }
            Err(e) => writeln!(out, "D[{l}]: error ({e})").unwrap(),
        }
    }
    if let Some(l) = blowup {
        writeln!(out, "blowup.l: {l}").unwrap();
        match check_blowup_tables(f, Rational::from_integer(l as i64)) {
            Ok(t) => writeln!(
                out,
                "blowup.predicted: holomorphic={} superattracting={} degenerates={}",
                t.holomorphic, t.superattracting, t.degenerates
            )
            .unwrap(),
            Err(e) => writeln!(out, "blowup.predicted: error ({e})").unwrap(),
        }
        match blowup_pi1(f, c, l) {
            Ok(r) => {
                writeln!(out, "blowup.support: {}", pairs(transformed_support(&r))).unwrap();
                writeln!(out, "blowup.gamma_tilde: {}", r.gamma_tilde).unwrap();
                writeln!(out, "blowup.superattracting: {}", r.superattracting_at_origin).unwrap();
                writeln!(out, "blowup.degenerates: {}", r.degenerates_axis).unwrap();
            }
            Err(e) => writeln!(out, "blowup.error: {e}").unwrap(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use skewprod::algebra::{rat, BiPoly, UniPoly};

    #[test]
    fn report_for_case_two_with_d_zero() {
        let one = Complex64::new(1.0, 0.0);
        let f = SkewProduct::new(UniPoly::monomial(2, one), BiPoly::new([((0, 4), one), ((2, 1), one), ((3, 0), one)])).unwrap();
        let c = skewprod::classify(&f).unwrap();
        let r = analyze_report(&f, &c, &[rat(1, 1)], Some(1));
        for line in [
            "vertices: (0,4) (2,1) (3,0)",
            "intercepts: 4 3",
            "case: Case2",
            "dominant.vertex: (3,0)",
            "dominant.l1: 1",
            "dominant.weights: [1, 3/2]",
            "alpha: 3/2",
            "c_infinity: 2",
            "D[1]: 3 at (3,0) attaining (2,1) (3,0) d_star 4",
            "blowup.support: (1,0) (1,1) (2,4)",
            "blowup.gamma_tilde: 1",
        ] {
            assert!(r.lines().any(|l| l == line), "missing {line:?} in\n{r}");
        }
    }
}
