//! Raster output: 8-bit binary PGM, a CSV of the raw values and a `.meta`
//! sidecar declaring how one became the other.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};
use skewprod::format::canonical_text;
use skewprod::{Classification, GreenKind, GreenValue, SkewProduct};

use crate::grid::{evaluate_grid, fmt_f, green_csv, green_row, GreenRow, Slice, Window};
use crate::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RenderJob {
    pub kind: GreenKind,
    pub slice: Slice,
    pub window: Window,
    /// Fixed affine clamp `(lo, hi)`; `None` takes the finite range of the data.
    pub clamp: Option<(f64, f64)>,
    /// Output stem; `.pgm`, `.csv` and `.meta` are appended.
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub pgm: PathBuf,
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub clamp: (f64, f64),
    pub nan_count: usize,
}

pub fn map_hash(f: &SkewProduct) -> String {
    let digest = Sha256::digest(canonical_text(f).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `−∞ → 0`, `+∞ → 255`, undefined → 128, finite values clamped affinely.
pub fn gray(v: &GreenValue, (lo, hi): (f64, f64)) -> u8 {
    match v.finite() {
        Some(x) => {
            let t = if hi > lo { (x - lo) / (hi - lo) } else { 0.5 };
            (t.clamp(0.0, 1.0) * 255.0).round() as u8
        }
        None => match *v {
            GreenValue::NegInf => 0,
            GreenValue::PosInf => 255,
            _ => 128,
        },
    }
}

pub fn auto_clamp(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|x| x.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

pub fn pgm_bytes(nx: usize, ny: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

pub fn render_rows(f: &SkewProduct, c: &Classification, job: &RenderJob, cfg: &RunConfig) -> Result<Vec<GreenRow>> {
    cfg.validate()?;
    evaluate_grid(job.slice, &job.window, cfg, |z, w| green_row(f, c, job.kind, z, w, cfg))
}

pub fn render(f: &SkewProduct, c: &Classification, job: &RenderJob, cfg: &RunConfig) -> Result<RenderOutput> {
    if let Some((lo, hi)) = job.clamp {
        anyhow::ensure!(lo.is_finite() && hi.is_finite() && lo < hi, "clamp must be finite with lo < hi");
    }
    let rows = render_rows(f, c, job, cfg)?;
    let clamp = job.clamp.unwrap_or_else(|| auto_clamp(rows.iter().filter_map(|r| r.value.finite())));
    let pixels: Vec<u8> = rows.iter().map(|r| gray(&r.value, clamp)).collect();
    let nan_count = rows.iter().filter(|r| matches!(r.value, GreenValue::Undefined)).count();

    let out = RenderOutput {
        pgm: with_ext(&job.out, "pgm"),
        csv: with_ext(&job.out, "csv"),
        meta: with_ext(&job.out, "meta"),
        clamp,
        nan_count,
    };
    if let Some(dir) = job.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(&out.pgm, pgm_bytes(job.window.nx, job.window.ny, &pixels)).with_context(|| format!("writing {}", out.pgm.display()))?;
    fs::write(&out.csv, green_csv(&rows)).with_context(|| format!("writing {}", out.csv.display()))?;
    fs::write(&out.meta, meta_text(f, job, cfg, clamp, nan_count)).with_context(|| format!("writing {}", out.meta.display()))?;
    Ok(out)
}

// thread count is left out on purpose: the output does not depend on it
fn meta_text(f: &SkewProduct, job: &RenderJob, cfg: &RunConfig, clamp: (f64, f64), nan_count: usize) -> String {
    let w = &job.window;
    let mut s = String::new();
    writeln!(s, "map_sha256: {}", map_hash(f)).unwrap();
    writeln!(s, "function: {}", job.kind.name()).unwrap();
    writeln!(s, "slice: {}", job.slice.describe()).unwrap();
    writeln!(s, "window.center: {} {}", fmt_f(w.center.re), fmt_f(w.center.im)).unwrap();
    writeln!(s, "window.size: {} {}", fmt_f(w.width), fmt_f(w.height)).unwrap();
    writeln!(s, "window.pixels: {} {}", w.nx, w.ny).unwrap();
    writeln!(s, "clamp: {} {} ({})", fmt_f(clamp.0), fmt_f(clamp.1), if job.clamp.is_some() { "fixed" } else { "auto" }).unwrap();
    writeln!(s, "palette: affine gray, -inf=0 +inf=255 undefined=128").unwrap();
    writeln!(s, "undefined_pixels: {nan_count}").unwrap();
    writeln!(s, "cfg: n_max={} tol={} escape_radius={} seed={}", cfg.n_max, fmt_f(cfg.tol), fmt_f(cfg.escape_radius), cfg.seed).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn palette() {
        assert_eq!(gray(&GreenValue::NegInf, (0.0, 1.0)), 0);
        assert_eq!(gray(&GreenValue::PosInf, (0.0, 1.0)), 255);
        assert_eq!(gray(&GreenValue::Undefined, (0.0, 1.0)), 128);
        assert_eq!(gray(&GreenValue::Finite(0.5), (0.0, 1.0)), 128);
        assert_eq!(gray(&GreenValue::Finite(7.0), (0.0, 1.0)), 255);
        assert_eq!(auto_clamp([f64::NAN, 2.0, -1.0].into_iter()), (-1.0, 2.0));
    }

    #[test]
    fn files_are_written_and_stable() {
        let dir = tempfile::tempdir().unwrap();
        let f = SkewProduct::monomial(2, 1, 3).unwrap();
        let c = skewprod::classify(&f).unwrap();
        let job = RenderJob {
            kind: GreenKind::Alpha,
            slice: Slice::Fiber(Complex64::new(0.5, 0.0)),
            window: Window { center: Complex64::new(0.0, 0.0), width: 2.0, height: 2.0, nx: 9, ny: 7 },
            clamp: None,
            out: dir.path().join("a/img"),
        };
        let cfg = RunConfig { threads: Some(1), ..Default::default() };
        let a = render(&f, &c, &job, &cfg).unwrap();
        let first = (fs::read(&a.pgm).unwrap(), fs::read(&a.csv).unwrap(), fs::read(&a.meta).unwrap());
        assert!(first.0.starts_with(b"P5\n9 7\n255\n"));
        assert_eq!(first.0.len(), 11 + 63);
        assert_eq!(String::from_utf8(first.1.clone()).unwrap().lines().count(), 64);
        let b = render(&f, &c, &RenderJob { out: dir.path().join("a/img"), ..job.clone() }, &RunConfig { threads: Some(3), ..cfg }).unwrap();
        assert_eq!(first, (fs::read(&b.pgm).unwrap(), fs::read(&b.csv).unwrap(), fs::read(&b.meta).unwrap()));
    }
}
