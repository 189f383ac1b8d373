use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use skewprod::algebra::Rational;
use skewprod::format::parse_map;
use skewprod::regions::{verify_invariance, EQUALITY_BAND};
use skewprod::{classify, Classification, GreenKind, SkewProduct, WedgeSpec};
use skewprod_cli::analyze::analyze_report;
use skewprod_cli::grid::{bottcher_csv, bottcher_row, default_wedge, evaluate_grid, green_csv, green_row, Slice, Window};
use skewprod_cli::render::{render, RenderJob};
use skewprod_cli::suites::{report_detail, run_suite, witness_wedge};
use skewprod_cli::RunConfig;

#[derive(Parser)]
#[command(name = "skewprod", version, about = "Classification, Green functions and Böttcher coordinates of superattracting skew products")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Iteration budget of the estimators
    #[arg(long, global = true, env = "SKEWPROD_N_MAX")]
    n_max: Option<usize>,
    /// Convergence tolerance on increments
    #[arg(long, global = true, env = "SKEWPROD_TOL")]
    tol: Option<f64>,
    #[arg(long, global = true, env = "SKEWPROD_ESCAPE_RADIUS")]
    escape_radius: Option<f64>,
    /// Seed for sampled checks
    #[arg(long, global = true, env = "SKEWPROD_SEED")]
    seed: Option<u64>,
    /// Worker threads; output does not depend on it
    #[arg(long, global = true, env = "SKEWPROD_THREADS")]
    threads: Option<usize>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            n_max: self.n_max.unwrap_or(d.n_max),
            tol: self.tol.unwrap_or(d.tol),
            escape_radius: self.escape_radius.unwrap_or(d.escape_radius),
            seed: self.seed.unwrap_or(d.seed),
            threads: self.threads,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Newton polygon, case, weights and flags as `key: value` lines
    Analyze {
        file: PathBuf,
        /// Also report the blow-up (z, c) -> (z, z^l c) at this integer weight
        #[arg(long)]
        blowup: Option<u32>,
        /// Report D_l at these weights (comma separated fractions)
        #[arg(long, value_delimiter = ',')]
        weights: Vec<Rational>,
    },
    /// Evaluate a Green function or the Böttcher coordinate at points or on a grid
    Green {
        file: PathBuf,
        /// Gp, Gza, Gzi, Gzap, Gz, Gf, Gfa or bottcher
        #[arg(long)]
        function: String,
        /// z_re,z_im,w_re,w_im (repeatable)
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
        /// Evaluate on the window instead of at points
        #[arg(long)]
        grid: bool,
        #[command(flatten)]
        window: WindowArgs,
        /// Wedge radius for the Böttcher coordinate
        #[arg(long, default_value_t = 1e-2)]
        radius: f64,
        /// CSV output; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rasterize a Green function to PGM with CSV and metadata sidecars
    Render {
        file: PathBuf,
        /// Gp, Gza, Gzi, Gzap, Gz, Gf or Gfa
        #[arg(long)]
        function: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Fixed gray scale lo,hi; default is the finite data range
        #[arg(long, allow_hyphen_values = true)]
        clamp: Option<String>,
        /// Output stem; .pgm, .csv and .meta are appended
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite, or sample invariance of a wedge for a map
    Verify {
        /// Map file for a custom invariance check
        file: Option<PathBuf>,
        /// monomial, invariance, hull, semiconjugate or all
        #[arg(long)]
        suite: Option<String>,
        /// lower, plus, between, outer, s_out or s_in
        #[arg(long)]
        wedge: Option<String>,
        /// l, or l1,l2 for two-weight wedges
        #[arg(long, value_delimiter = ',')]
        weights: Vec<Rational>,
        /// r1,r2 (lower, plus), r (between, s_out, s_in) or r,r3 (outer); lower and plus derive r1 from r2 = 0.1 when absent
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
}

#[derive(Args)]
struct WindowArgs {
    /// Rasterize the fiber over z = re,im
    #[arg(long, allow_hyphen_values = true, conflicts_with = "slice_w")]
    fiber: Option<String>,
    /// Rasterize the z-plane at w = re,im
    #[arg(long, allow_hyphen_values = true)]
    slice_w: Option<String>,
    /// Window center re,im
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    center: String,
    #[arg(long, default_value_t = 2.0)]
    width: f64,
    #[arg(long, default_value_t = 2.0)]
    height: f64,
    /// nx or nx,ny
    #[arg(long, default_value = "256")]
    pixels: String,
}

fn floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s.split(',').map(|t| t.trim().parse::<f64>()).collect::<Result<_, _>>().with_context(|| format!("{what}: {s:?}"))?;
    if v.len() != n {
        bail!("{what} needs {n} comma separated numbers, got {s:?}");
    }
    Ok(v)
}

fn complex(s: &str, what: &str) -> Result<Complex64> {
    let v = floats(s, 2, what)?;
    Ok(Complex64::new(v[0], v[1]))
}

impl WindowArgs {
    fn slice(&self) -> Result<Slice> {
        match (&self.fiber, &self.slice_w) {
            (Some(z), None) => Ok(Slice::Fiber(complex(z, "--fiber")?)),
            (None, Some(w)) => Ok(Slice::ZSlice(complex(w, "--slice-w")?)),
            _ => bail!("give exactly one of --fiber or --slice-w"),
        }
    }

    fn window(&self) -> Result<Window> {
        let px: Vec<usize> = self.pixels.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>().context("--pixels")?;
        let (nx, ny) = match px[..] {
            [n] => (n, n),
            [a, b] => (a, b),
            _ => bail!("--pixels takes nx or nx,ny"),
        };
        let w = Window { center: complex(&self.center, "--center")?, width: self.width, height: self.height, nx, ny };
        w.validate()?;
        Ok(w)
    }
}

fn load(path: &PathBuf) -> Result<(SkewProduct, Classification)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_map(&text)?;
    let c = classify(&parsed.map)?;
    Ok((parsed.map, c))
}

fn kind(name: &str) -> Result<GreenKind> {
    GreenKind::from_name(name).ok_or_else(|| anyhow!("unknown function {name:?}; expected Gp, Gza, Gzi, Gzap, Gz, Gf or Gfa"))
}

fn emit(out: &Option<PathBuf>, text: String) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn custom_wedge(f: &SkewProduct, wedge: &str, weights: &[Rational], radii: &[f64]) -> Result<WedgeSpec> {
    let one = |v: &[Rational]| match v {
        [l] => Ok(*l),
        _ => Err(anyhow!("--weights needs one value for {wedge}")),
    };
    let two = |v: &[Rational]| match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(anyhow!("--weights needs l1,l2 for {wedge}")),
    };
    let spec = match (wedge, radii) {
        ("lower" | "plus", []) => {
            let w = witness_wedge(f, one(weights)?, 0.1)?;
            match (wedge, w) {
                ("plus", WedgeSpec::Lower { l, r1, r2 }) => WedgeSpec::Plus { l, r1, r2 },
                (_, w) => w,
            }
        }
        ("lower", &[r1, r2]) => WedgeSpec::Lower { l: one(weights)?, r1, r2 },
        ("plus", &[r1, r2]) => WedgeSpec::Plus { l: one(weights)?, r1, r2 },
        ("between", &[r]) => {
            let (l1, l2) = two(weights)?;
            WedgeSpec::Between { l1, l2, r }
        }
        ("outer", &[r, r3]) => WedgeSpec::Outer { l: one(weights)?, r, r3 },
        ("s_out", &[r]) => {
            let (l1, l2) = two(weights)?;
            WedgeSpec::SOut { l1, l2, r, band: EQUALITY_BAND }
        }
        ("s_in", &[r]) => {
            let (l1, l2) = two(weights)?;
            WedgeSpec::SIn { l1, l2, r, band: EQUALITY_BAND }
        }
        ("lower" | "plus" | "between" | "outer" | "s_out" | "s_in", _) => bail!("wrong number of --radii for {wedge}"),
        _ => bail!("unknown wedge {wedge:?}"),
    };
    spec.validate()?;
    Ok(spec)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = cli.run.config()?;
    match cli.cmd {
        Command::Analyze { file, blowup, weights } => {
            let (f, c) = load(&file)?;
            print!("{}", analyze_report(&f, &c, &weights, blowup));
            Ok(true)
        }
        Command::Green { file, function, point, grid, window, radius, out } => {
            let (f, c) = load(&file)?;
            let points: Vec<(Complex64, Complex64)> = point
                .iter()
                .map(|p| floats(p, 4, "--point").map(|v| (Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))))
                .collect::<Result<_>>()?;
            if grid == !points.is_empty() {
                bail!("give either --point (repeatable) or --grid");
            }
            let text = if function == "bottcher" {
                let region = default_wedge(&c, radius);
                let eval = |z, w| bottcher_row(&f, &c, &region, z, w, &cfg);
                let rows = if grid {
                    evaluate_grid(window.slice()?, &window.window()?, &cfg, eval)?
                } else {
                    points.iter().map(|&(z, w)| eval(z, w)).collect()
                };
                bottcher_csv(&rows)
            } else {
                let k = kind(&function)?;
                let eval = |z, w| green_row(&f, &c, k, z, w, &cfg);
                let rows = if grid {
                    evaluate_grid(window.slice()?, &window.window()?, &cfg, eval)?
                } else {
                    points.iter().map(|&(z, w)| eval(z, w)).collect()
                };
                green_csv(&rows)
            };
            emit(&out, text)?;
            Ok(true)
        }
        Command::Render { file, function, window, clamp, out } => {
            let (f, c) = load(&file)?;
            let clamp = clamp.map(|s| floats(&s, 2, "--clamp").map(|v| (v[0], v[1]))).transpose()?;
            let job = RenderJob { kind: kind(&function)?, slice: window.slice()?, window: window.window()?, clamp, out };
            let r = render(&f, &c, &job, &cfg)?;
            println!("wrote {} {} {}", r.pgm.display(), r.csv.display(), r.meta.display());
            Ok(true)
        }
        Command::Verify { file, suite, wedge, weights, radii, samples } => match (suite, file) {
            (Some(s), None) => {
                let checks = run_suite(&s, &cfg)?;
                for c in &checks {
                    println!("{c}");
                }
                let failed = checks.iter().filter(|c| !c.pass).count();
                println!("{} checks, {failed} failed", checks.len());
                Ok(failed == 0)
            }
            (None, Some(file)) => {
                let (f, _) = load(&file)?;
                let spec = custom_wedge(&f, wedge.as_deref().ok_or_else(|| anyhow!("--wedge is required with a map file"))?, &weights, &radii)?;
                let rep = verify_invariance(&f, &spec, samples, cfg.seed)?;
                println!("{} invariance {}", if rep.passed() { "pass" } else { "FAIL" }, report_detail(&spec, &rep));
                if let Some(v) = rep.violations.first() {
                    println!("first_violation: index={} z={} w={} image=({}, {})", v.index, v.z, v.w, v.image.0, v.image.1);
                }
                Ok(rep.passed())
            }
            _ => bail!("give either --suite or a map file"),
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
