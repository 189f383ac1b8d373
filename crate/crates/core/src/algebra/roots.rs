use nalgebra::DMatrix;
use num_complex::Complex64;

/// Roots of `Σ c[k] x^k` (dense, ascending) via the companion matrix, each
/// polished by a few Newton steps. Leading zeros are trimmed; an all-zero
/// polynomial has no roots.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let Some(deg) = coeffs.iter().rposition(|&c| c != zero) else {
        return Vec::new();
    };
    // exact roots at the origin first; the companion matrix of x^k is nilpotent
    let low = coeffs.iter().position(|&c| c != zero).unwrap();
    let mut roots = vec![zero; low];
    let core = &coeffs[low..=deg];
    let n = core.len() - 1;
    if n == 0 {
        return roots;
    }
    let lead = core[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..n {
        m[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..n {
        m[(k, n - 1)] = -core[k] / lead;
    }
    let eig: Vec<Complex64> = match m.try_schur(1e-15, 10_000).and_then(|s| s.eigenvalues()) {
        Some(v) => v.iter().copied().collect(),
        None => aberth(core),
    };
    roots.extend(eig.into_iter().map(|r| polish(core, r)));
    roots
}

// simultaneous iteration, used only if the Schur iteration does not converge
fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs[..n].iter().map(|c| (c / coeffs[n]).norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / n as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(coeffs, z[i]);
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn horner(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn polish(coeffs: &[Complex64], mut x: Complex64) -> Complex64 {
    for _ in 0..4 {
        let (p, dp) = horner(coeffs, x);
        if dp.norm() == 0.0 {
            break;
        }
        let next = x - p / dp;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        // keep the step only if it does not make things worse
        if horner(coeffs, next).0.norm() <= p.norm() {
            x = next;
        } else {
            break;
        }
    }
    x
}
