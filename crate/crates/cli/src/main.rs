//! Command-line front end: computes joint-spectrum polynomials, component
//! decompositions, and full reducibility reports for matrix tuples stored as
//! JSON fixtures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use jspec::criteria::{self, AnalyzeOptions};
use jspec::decomposition;
use jspec::io::{self, LoadedTuple};
use jspec::matrix::CMat;
use jspec::pencil::{self, spectrum_polynomial};
use jspec::poly::MultiPoly;
use jspec::scalar::Exact;

#[derive(Parser)]
#[command(name = "jspec", version, about = "Joint spectra of matrix tuples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Clone)]
struct GlobalArgs {
    /// RNG seed (falls back to JSPEC_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Eigenvalue clustering factor override.
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,
    /// Projection-equality tolerance override.
    #[arg(long, global = true)]
    tol_eq: Option<f64>,
    /// Scalar domain for spectrum output.
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Component subset, 1-based, e.g. "1,3".
    #[arg(long, global = true)]
    subset: Option<String>,
    /// Monodromy loop budget.
    #[arg(long, global = true, default_value_t = 24)]
    max_loops: usize,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Print the joint spectrum polynomial.
    Spectrum {
        file: PathBuf,
        /// Also write a CSV of the real 2-D slice det(x1 A1 + x2 A2 - I) = 0.
        #[arg(long)]
        slice: Option<PathBuf>,
    },
    /// Decompose the spectrum into irreducible components.
    Decompose { file: PathBuf },
    /// Full reducibility analysis with certificates.
    Analyze { file: PathBuf },
    /// Constancy probe of the subset projection under transform perturbations.
    Probe { file: PathBuf },
    /// Generate a planted-instance fixture with a known invariant subspace.
    Plant {
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 10.0)]
        conditioning: f64,
        #[arg(long)]
        selfadjoint: bool,
    },
    /// Check a claimed invariant subspace against a tuple.
    Verify {
        file: PathBuf,
        /// Basis: "e1,e3" for coordinate vectors, or @path to a JSON file of
        /// basis columns.
        #[arg(long)]
        basis: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's help/version output is a success, not a usage error
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    if let Some(f) = cli.global.tol_cluster {
        pencil::set_cluster_factor(f);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn seed_of(g: &GlobalArgs) -> u64 {
    g.seed
        .or_else(|| std::env::var("JSPEC_SEED").ok()?.parse().ok())
        .unwrap_or(0)
}

fn parse_subset(s: &str) -> jspec::Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            let idx: usize = p
                .trim()
                .parse()
                .map_err(|_| jspec::Error::InvalidInput(format!("bad subset entry {p:?}")))?;
            if idx == 0 {
                return Err(jspec::Error::InvalidInput(
                    "subset entries are 1-based".into(),
                ));
            }
            Ok(idx - 1)
        })
        .collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> jspec::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn exact_poly_json(p: &MultiPoly<Exact>) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (e, c) in &p.terms {
        let key = e
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",");
        map.insert(key, serde_json::Value::String(c.to_string()));
    }
    serde_json::Value::Object(map)
}

fn run(cli: &Cli) -> jspec::Result<()> {
    let g = &cli.global;
    let seed = seed_of(g);
    match &cli.command {
        Command::Spectrum { file, slice } => {
            let loaded = io::parse_tuple(file)?;
            let value = match (&loaded, g.mode.unwrap_or(mode_of(&loaded))) {
                (LoadedTuple::Exact(t), Mode::Exact) => serde_json::json!({
                    "mode": "exact",
                    "n": t.n(), "N": t.size(), "shift": t.shift,
                    "polynomial": exact_poly_json(&spectrum_polynomial(t)?),
                }),
                (LoadedTuple::Float(_), Mode::Exact) => {
                    return Err(jspec::Error::ModeMismatch);
                }
                (_, Mode::Float) => {
                    let t = loaded.to_float();
                    serde_json::json!({
                        "mode": "float",
                        "n": t.n(), "N": t.size(), "shift": t.shift,
                        "polynomial": io::poly_to_json(&spectrum_polynomial(&t)?),
                    })
                }
            };
            if let Some(path) = slice {
                let csv = io::slice_csv(&loaded.to_float(), 3.0, 201)?;
                std::fs::write(path, csv)?;
            }
            emit(&g.out, &serde_json::to_string_pretty(&value).unwrap())
        }
        Command::Decompose { file } => {
            let t = io::parse_tuple(file)?.to_float();
            let d = decomposition::decompose(&t, seed, g.max_loops)?;
            emit(
                &g.out,
                &serde_json::to_string_pretty(&decomposition_json(&d)).unwrap(),
            )
        }
        Command::Analyze { file } => {
            let start = Instant::now();
            let t = io::parse_tuple(file)?.to_float();
            let opts = options_from(g, seed);
            let report = criteria::analyze(&t, &opts)?;
            let rf = io::report_file(
                &report,
                io::ToleranceRecord {
                    cluster_factor: g.tol_cluster.unwrap_or(1e-7),
                    tol_eq: g.tol_eq,
                    tol_const: opts.tol_const,
                },
                start.elapsed().as_millis(),
            );
            eprintln!(
                "verdict: {}",
                if rf.reducible { "reducible" } else { "irreducible" }
            );
            emit(&g.out, &serde_json::to_string_pretty(&rf).unwrap())
        }
        Command::Probe { file } => {
            let t = io::parse_tuple(file)?.to_float();
            let d = decomposition::decompose(&t, seed, g.max_loops)?;
            let subsets: Vec<Vec<usize>> = match &g.subset {
                Some(s) => vec![parse_subset(s)?],
                None => criteria::enumerate_subsets(d.k(), t.selfadjoint),
            };
            let mut row0 = vec![Complex64::new(0.0, 0.0); t.n()];
            row0[0] = Complex64::new(1.0, 0.0);
            let mut results = Vec::new();
            for subset in subsets {
                let m = criteria::constancy_probe(&t, &d, &subset, &row0, 1e-3, !t.selfadjoint)?;
                results.push(serde_json::json!({
                    "subset": subset.iter().map(|s| s + 1).collect::<Vec<_>>(),
                    "max_derivative_norm": m,
                }));
            }
            emit(
                &g.out,
                &serde_json::to_string_pretty(&serde_json::Value::Array(results)).unwrap(),
            )
        }
        Command::Plant {
            size,
            n,
            d,
            conditioning,
            selfadjoint,
        } => {
            let inst = io::plant_instance(*size, *n, *d, seed, *conditioning, *selfadjoint)?;
            let file = io::emit_float_tuple(&inst.tuple);
            let mut value = serde_json::to_value(&file).unwrap();
            // Ground truth rides along as an extra key; parsers ignore it.
            let basis: Vec<Vec<[f64; 2]>> = (0..inst.basis.ncols)
                .map(|j| {
                    (0..inst.basis.nrows)
                        .map(|i| [inst.basis[(i, j)].re, inst.basis[(i, j)].im])
                        .collect()
                })
                .collect();
            value["planted_basis"] = serde_json::to_value(basis).unwrap();
            emit(&g.out, &serde_json::to_string_pretty(&value).unwrap())
        }
        Command::Verify { file, basis } => {
            let t = io::parse_tuple(file)?.to_float();
            let b = parse_basis(basis, t.size(), file)?;
            let resid = criteria::verify_invariance(&t, &b);
            let max = resid.iter().cloned().fold(0.0, f64::max);
            let tau = 1e-8 * (1.0 + t.norm_scale());
            let value = serde_json::json!({
                "residuals": resid,
                "max_residual": max,
                "invariant": max <= tau,
            });
            emit(&g.out, &serde_json::to_string_pretty(&value).unwrap())
        }
    }
}

fn mode_of(loaded: &LoadedTuple) -> Mode {
    match loaded {
        LoadedTuple::Exact(_) => Mode::Exact,
        LoadedTuple::Float(_) => Mode::Float,
    }
}

fn options_from(g: &GlobalArgs, seed: u64) -> AnalyzeOptions {
    AnalyzeOptions {
        seed,
        loop_budget: g.max_loops,
        subsets: g
            .subset
            .as_deref()
            .map(|s| parse_subset(s).map(|v| vec![v]))
            .transpose()
            .unwrap_or(None),
        tol_eq: g.tol_eq,
        ..Default::default()
    }
}

fn decomposition_json(d: &decomposition::ComponentDecomposition) -> serde_json::Value {
    serde_json::json!({
        "components": d.components.iter().map(|c| serde_json::json!({
            "degree": c.degree,
            "multiplicity": c.multiplicity,
            "intersections": c.intersections.iter().map(|line| {
                line.iter().map(|t| [t.re, t.im]).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "base_direction": d.base_direction.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        "loops_run": d.loop_log.len(),
    })
}

/// `"e1,e3"` builds coordinate columns; `"@path"` loads JSON columns of
/// `[re, im]` pairs.
fn parse_basis(spec: &str, size: usize, tuple_path: &Path) -> jspec::Result<CMat<Complex64>> {
    if let Some(path) = spec.strip_prefix('@') {
        let resolved = tuple_path.parent().map_or_else(
            || PathBuf::from(path),
            |dir| {
                let p = PathBuf::from(path);
                if p.is_absolute() {
                    p
                } else {
                    dir.join(p)
                }
            },
        );
        let text = std::fs::read_to_string(resolved)?;
        let cols: Vec<Vec<[f64; 2]>> = serde_json::from_str(&text)?;
        let ncols = cols.len();
        if ncols == 0 || cols.iter().any(|c| c.len() != size) {
            return Err(jspec::Error::InvalidInput(format!(
                "basis columns must each have {size} entries"
            )));
        }
        return Ok(CMat::from_fn(size, ncols, |i, j| {
            Complex64::new(cols[j][i][0], cols[j][i][1])
        }));
    }
    let idx: Vec<usize> = spec
        .split(',')
        .map(|p| {
            let p = p.trim();
            let k: usize = p
                .strip_prefix('e')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| {
                    jspec::Error::InvalidInput(format!("bad basis vector {p:?} (expected e<k>)"))
                })?;
            if k == 0 || k > size {
                return Err(jspec::Error::InvalidInput(format!(
                    "basis vector {p:?} out of range 1..={size}"
                )));
            }
            Ok(k - 1)
        })
        .collect::<jspec::Result<_>>()?;
    Ok(CMat::from_fn(size, idx.len(), |i, j| {
        if i == idx[j] {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}
