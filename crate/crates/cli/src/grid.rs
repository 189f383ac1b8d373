//! Point and grid evaluation of the estimators, and their CSV form.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use skewprod::algebra::rat;
use skewprod::bottcher::{bottcher, BottcherEstimate};
use skewprod::green::estimate;
use skewprod::{Case, Classification, GreenKind, GreenValue, SkewProduct, WedgeSpec};

use crate::RunConfig;

pub const MAX_PIXELS: usize = 8192;

/// Which complex line is rasterized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slice {
    /// `z` fixed, the window is in `w`.
    Fiber(Complex64),
    /// `w` fixed, the window is in `z`.
    ZSlice(Complex64),
}

impl Slice {
    pub fn point(&self, v: Complex64) -> (Complex64, Complex64) {
        match *self {
            Slice::Fiber(z) => (z, v),
            Slice::ZSlice(w) => (v, w),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Slice::Fiber(z) => format!("fiber z={} {}", fmt_f(z.re), fmt_f(z.im)),
            Slice::ZSlice(w) => format!("z_slice w={} {}", fmt_f(w.re), fmt_f(w.im)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0 && self.width.is_finite() && self.height.is_finite()) {
            bail!("window must have positive finite size");
        }
        if self.nx == 0 || self.ny == 0 || self.nx > MAX_PIXELS || self.ny > MAX_PIXELS {
            bail!("pixels per side must be in 1..={MAX_PIXELS}");
        }
        Ok(())
    }

    /// Pixel centers; row 0 is the top edge.
    pub fn pixel(&self, ix: usize, iy: usize) -> Complex64 {
        let x = -0.5 * self.width + (ix as f64 + 0.5) * self.width / self.nx as f64;
        let y = 0.5 * self.height - (iy as f64 + 0.5) * self.height / self.ny as f64;
        self.center + Complex64::new(x, y)
    }
}

/// Wedge used for the Böttcher coordinate at the primary dominant term.
pub fn default_wedge(c: &Classification, r: f64) -> WedgeSpec {
    let t = c.primary();
    match t.case {
        Case::One => WedgeSpec::lower(rat(0, 1), r),
        Case::Two => WedgeSpec::lower(t.l1, r),
        Case::Three => WedgeSpec::Between { l1: rat(0, 1), l2: t.l2.unwrap(), r },
        Case::Four => WedgeSpec::Between { l1: t.l1, l2: t.upper_weight().unwrap() - t.l1, r },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenRow {
    pub z: Complex64,
    pub w: Complex64,
    pub value: GreenValue,
    pub n_used: usize,
    pub termination: String,
    pub residual: f64,
}

pub fn green_row(f: &SkewProduct, c: &Classification, kind: GreenKind, z: Complex64, w: Complex64, cfg: &RunConfig) -> GreenRow {
    match estimate(f, c, kind, z, w, &cfg.green()) {
        Ok(e) => GreenRow { z, w, value: e.value, n_used: e.n_used, termination: e.termination.to_string(), residual: e.residual },
        Err(_) => GreenRow { z, w, value: GreenValue::Undefined, n_used: 0, termination: "error".into(), residual: f64::NAN },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BottcherRow {
    pub z: Complex64,
    pub w: Complex64,
    pub estimate: Option<BottcherEstimate>,
    pub error: Option<String>,
}

pub fn bottcher_row(f: &SkewProduct, c: &Classification, region: &WedgeSpec, z: Complex64, w: Complex64, cfg: &RunConfig) -> BottcherRow {
    match bottcher(f, c, region, z, w, &cfg.green()) {
        Ok(e) => BottcherRow { z, w, estimate: Some(e), error: None },
        Err(e) => BottcherRow { z, w, estimate: None, error: Some(e.to_string()) },
    }
}

/// Row-major evaluation over the window; rows are computed in parallel and
/// reassembled in order, so the result does not depend on the thread count.
pub fn evaluate_grid<T: Send>(slice: Slice, window: &Window, cfg: &RunConfig, eval: impl Fn(Complex64, Complex64) -> T + Sync) -> Result<Vec<T>> {
    window.validate()?;
    let rows: Vec<Vec<T>> = cfg.install(|| {
        (0..window.ny)
            .into_par_iter()
            .map(|iy| {
                (0..window.nx)
                    .map(|ix| {
                        let (z, w) = slice.point(window.pixel(ix, iy));
                        eval(z, w)
                    })
                    .collect()
            })
            .collect()
    })?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.17e}")
    }
}

pub const GREEN_HEADER: &str = "z_re,z_im,w_re,w_im,value,n_used,termination,residual";
pub const BOTTCHER_HEADER: &str = "z_re,z_im,w_re,w_im,phi1_re,phi1_im,phi2_re,phi2_im,n_used,conj_residual,id_deviation,status";

pub fn green_csv(rows: &[GreenRow]) -> String {
    let mut out = String::from(GREEN_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f(r.z.re),
            fmt_f(r.z.im),
            fmt_f(r.w.re),
            fmt_f(r.w.im),
            r.value,
            r.n_used,
            r.termination,
            fmt_f(r.residual)
        )
        .unwrap();
    }
    out
}

pub fn bottcher_csv(rows: &[BottcherRow]) -> String {
    let mut out = String::from(BOTTCHER_HEADER);
    out.push('\n');
    for r in rows {
        let coords = [r.z.re, r.z.im, r.w.re, r.w.im].map(fmt_f).join(",");
        match (&r.estimate, &r.error) {
            (Some(e), _) => {
                let status = if e.no_theorem { "no_theorem" } else { "ok" };
                let vals = [e.phi1.re, e.phi1.im, e.phi2.re, e.phi2.im].map(fmt_f).join(",");
                writeln!(out, "{coords},{vals},{},{},{},{status}", e.n_used, fmt_f(e.conj_residual), fmt_f(e.id_deviation)).unwrap();
            }
            (None, err) => {
                let msg = err.as_deref().unwrap_or("error").replace(',', ";");
                writeln!(out, "{coords},nan,nan,nan,nan,0,nan,nan,error: {msg}").unwrap();
            }
        }
    }
    out
}
