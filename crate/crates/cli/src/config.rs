use anyhow::{bail, Result};
use skewprod::GreenConfig;

/// Knobs shared by every subcommand. Defaults match the estimator defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub n_max: usize,
    pub tol: f64,
    pub escape_radius: f64,
    pub seed: u64,
    /// Worker threads; `None` lets rayon decide. Output does not depend on it.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GreenConfig::default();
        RunConfig { n_max: g.n_max, tol: g.tol, escape_radius: g.escape_radius, seed: 0, threads: None }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            bail!("n_max must be positive");
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("tol must be positive, got {}", self.tol);
        }
        if !(self.escape_radius > 1.0 && self.escape_radius.is_finite()) {
            bail!("escape radius must exceed 1, got {}", self.escape_radius);
        }
        if self.threads == Some(0) {
            bail!("thread count must be positive");
        }
        Ok(())
    }

    pub fn green(&self) -> GreenConfig {
        GreenConfig { n_max: self.n_max, tol: self.tol, escape_radius: self.escape_radius, ratio_escape: self.escape_radius }
    }

    /// Run `op` on a pool of the configured size.
    pub fn install<T: Send>(&self, op: impl FnOnce() -> T + Send) -> Result<T> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            b = b.num_threads(n);
        }
        Ok(b.build()?.install(op))
    }
}
