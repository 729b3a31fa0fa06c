use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use tetrapack::cluster::{build_cluster, ClusterError, SwivelParams};
use tetrapack::optimizer::{
    maximize_density, optimize_lattice, sweep, Family, InitialBasis, OptimizeError, OptimizerConfig, PackingResult,
    Variant,
};
use tetrapack::packing::{default_cutoff, LatticeBasis};
use tetrapack::verify::{
    build_sym_packing, certify, recheck, reference_constants, sym_basis, fmt_sig, write_certificates, VerifyError, CERT_TOL,
};
use tetrapack_cli::document::{parse_result, write_result};
use tetrapack_cli::manifest::{manifest_path, RunManifest};
use tetrapack_cli::mesh::{packing_objects, write_obj};
use tetrapack_cli::table::write_csv;
use tetrapack_cli::exit;

/// Dense packings of regular tetrahedra from swiveled nine-tetrahedron
/// clusters.
#[derive(Debug, Parser)]
#[command(name = "tetrapack", version, about, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest accepted penetration (optimize) or certificate tolerance (verify).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Neighbor cutoff radius; defaults to 2.5 times the cluster circumradius.
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    /// Iteration cap of the outer search, or of the inner solve when u and v are fixed.
    #[arg(long, global = true)]
    max_iter: Option<u64>,
    /// Output file; standard output when omitted. A manifest is written next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize the lattice for one cluster, or search for the densest cluster
    /// when u and v are omitted.
    Optimize {
        #[arg(long, requires = "v")]
        u: Option<f64>,
        #[arg(long, requires = "u")]
        v: Option<f64>,
        /// free, G, Ga, Gb or Gab.
        #[arg(long, default_value = "free")]
        variant: Variant,
    },
    /// Tabulate the density over a grid of the parameter square.
    Sweep {
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long, default_value = "free")]
        variant: Variant,
    },
    /// Issue separating-plane certificates for a result document.
    Verify {
        /// Result document to certify.
        #[arg(required_unless_present = "sym")]
        input: Option<PathBuf>,
        /// Certify the closed-form symmetric packing instead.
        #[arg(long, conflicts_with = "input")]
        sym: bool,
        /// Scale the basis before certifying.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
    /// Write the tetrahedra of a packing as a mesh.
    Export {
        #[arg(required_unless_present = "sym")]
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "input")]
        sym: bool,
        #[arg(long, default_value = "obj")]
        format: String,
        /// Include cluster translates within this many cutoff radii.
        #[arg(long, default_value_t = 0)]
        shells: u32,
    },
    /// Print reference densities and the symmetric packing's closed forms.
    Reference,
}

/// Marks errors caused by malformed user input.
#[derive(Debug)]
struct BadInput(String);

impl std::fmt::Display for BadInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for BadInput {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<BadInput>().is_some() {
        return exit::USAGE;
    }
    for cause in err.chain() {
        if cause.downcast_ref::<ClusterError>().is_some() {
            return exit::USAGE;
        }
        if let Some(e) = cause.downcast_ref::<OptimizeError>() {
            return match e {
                OptimizeError::Cluster(_) | OptimizeError::UnknownVariant(_) | OptimizeError::GridTooSmall(_) => {
                    exit::USAGE
                }
                OptimizeError::InfeasibleStart(_) | OptimizeError::Singular { .. } => exit::INFEASIBLE,
                OptimizeError::NotConverged(_) => exit::NOT_CONVERGED,
                _ => exit::FAILURE,
            };
        }
        if let Some(VerifyError::Format { .. } | VerifyError::Cluster(_)) = cause.downcast_ref::<VerifyError>() {
            return exit::USAGE;
        }
    }
    exit::FAILURE
}

struct Output<'a> {
    path: Option<&'a Path>,
    manifest: RunManifest,
}

impl Output<'_> {
    fn emit(mut self, text: &str) -> Result<()> {
        match self.path {
            None => std::io::stdout().write_all(text.as_bytes())?,
            Some(p) => {
                fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
                self.manifest.outputs.push(p.to_path_buf());
                self.manifest.write(&manifest_path(p))?;
            }
        }
        Ok(())
    }
}

fn read_input(path: &Path, manifest: &mut RunManifest) -> Result<(SwivelParams<f64>, LatticeBasis<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    manifest.add_input(path, text.as_bytes());
    let doc = parse_result(&text).map_err(|e| e.context(BadInput(format!("malformed result document {}", path.display()))))?;
    Ok((doc.params, doc.basis))
}

fn load_packing(
    input: &Option<PathBuf>,
    sym: bool,
    manifest: &mut RunManifest,
) -> Result<(SwivelParams<f64>, LatticeBasis<f64>)> {
    match (input, sym) {
        (_, true) => Ok((SwivelParams::new(0.0, 0.0)?, sym_basis())),
        (Some(p), false) => read_input(p, manifest),
        (None, false) => bail!(BadInput("an input file or --sym is required".into())),
    }
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let mut config = OptimizerConfig {
        cutoff: cli.cutoff,
        ..OptimizerConfig::default()
    };
    if let Some(t) = cli.tol {
        config.constraint_tol = t;
    }
    let mut manifest = RunManifest::new(match &cli.command {
        Command::Optimize { .. } => "optimize",
        Command::Sweep { .. } => "sweep",
        Command::Verify { .. } => "verify",
        Command::Export { .. } => "export",
        Command::Reference => "reference",
    });
    for (k, v) in [("tol", cli.tol), ("cutoff", cli.cutoff)] {
        if let Some(v) = v {
            manifest.set(k, v);
        }
    }
    if let Some(n) = cli.max_iter {
        manifest.set("max_iter", n);
    }
    if let Some(n) = cli.threads {
        manifest.set("threads", n);
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Optimize { u, v, variant } => {
            config.variant = variant;
            manifest.set("variant", variant);
            let result: Result<PackingResult, OptimizeError> = match (u, v) {
                (Some(u), Some(v)) => {
                    manifest.set("u", u);
                    manifest.set("v", v);
                    if let Some(n) = cli.max_iter {
                        config.max_iterations = n as usize;
                    }
                    let cluster = build_cluster(SwivelParams::new(u, v)?, 1)?;
                    optimize_lattice(&cluster, InitialBasis::SymParadigm, &config)
                }
                _ => {
                    if let Some(n) = cli.max_iter {
                        config.outer_max_iterations = n;
                    }
                    let family = Family::discover(&config)?;
                    let best = maximize_density(&family, &config)?;
                    eprintln!("outer search: {} inner solves", best.evaluations);
                    if best.result.converged {
                        Ok(best.result)
                    } else {
                        Err(OptimizeError::NotConverged(Box::new(best.result)))
                    }
                }
            };
            let (result, code) = match result {
                Ok(r) => (r, exit::OK),
                Err(OptimizeError::NotConverged(best)) => (*best, exit::NOT_CONVERGED),
                Err(e) => return Err(e.into()),
            };
            eprintln!(
                "u = {:.12} v = {:.12} V = {:.12} D = {:.12} converged = {}",
                result.params.u, result.params.v, result.volume, result.density, result.converged
            );
            Output { path: out, manifest }.emit(&write_result(&result)?)?;
            Ok(code)
        }
        Command::Sweep { grid, variant } => {
            manifest.set("grid", grid);
            manifest.set("variant", variant);
            let family = Family::discover(&config)?;
            let samples = sweep(&family, grid, variant)?;
            let ok = samples.iter().filter(|s| s.converged).count();
            eprintln!("{ok} of {} samples converged", samples.len());
            Output { path: out, manifest }.emit(&write_csv(&samples))?;
            Ok(if ok == 0 { exit::NOT_CONVERGED } else { exit::OK })
        }
        Command::Verify { input, sym, scale } => {
            let (params, basis) = load_packing(&input, sym, &mut manifest)?;
            if scale.is_nan() || scale <= 0.0 {
                bail!(BadInput(format!("scale must be positive, got {scale}")));
            }
            manifest.set("scale", scale);
            let cluster = build_cluster(params, 1)?;
            let cutoff = cli.cutoff.unwrap_or_else(|| default_cutoff(&cluster));
            let report = certify(&cluster, &basis.scaled(scale), cutoff, cli.tol.unwrap_or(CERT_TOL))?;
            let issues = recheck(&report)?;
            eprintln!(
                "{} pairs, {} failures, max penetration {:.3e}, certified shell {:.6}, recheck issues {}",
                report.certificates.len(),
                report.failures.len(),
                report.max_penetration(),
                report.certified_shell,
                issues.len()
            );
            for f in &report.failures {
                eprintln!("overlap: {f}");
            }
            Output { path: out, manifest }.emit(&write_certificates(&report))?;
            Ok(if report.is_certified() && issues.is_empty() {
                exit::OK
            } else {
                exit::INFEASIBLE
            })
        }
        Command::Export {
            input,
            sym,
            format,
            shells,
        } => {
            if format != "obj" {
                bail!(BadInput(format!("unknown export format `{format}` (supported: obj)")));
            }
            manifest.set("format", &format);
            manifest.set("shells", shells);
            let (params, basis) = load_packing(&input, sym, &mut manifest)?;
            let cluster = build_cluster(params, 1)?;
            let unit = cli.cutoff.unwrap_or_else(|| default_cutoff(&cluster));
            let objects = packing_objects(&cluster, &basis, unit * f64::from(shells));
            eprintln!("{} tetrahedra", objects.len());
            Output { path: out, manifest }.emit(&write_obj(&objects))?;
            Ok(exit::OK)
        }
        Command::Reference => {
            let mut text = String::new();
            for c in reference_constants() {
                text.push_str(&format!("{:<24} {}  # {}\n", c.name, fmt_sig(c.value), c.description));
            }
            let (sym, _) = build_sym_packing();
            let b = &sym.basis;
            for (name, v) in [("sym_a", b.a), ("sym_b", b.b), ("sym_c", b.c), ("sym_d", b.d)] {
                text.push_str(&format!(
                    "{:<24} {} {} {}\n",
                    name,
                    fmt_sig(v.x),
                    fmt_sig(v.y),
                    fmt_sig(v.z)
                ));
            }
            Output { path: out, manifest }.emit(&text)?;
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
