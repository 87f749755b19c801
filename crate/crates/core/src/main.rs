use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use clifford_hinf::calculus::{evaluate, ContourEngine};
use clifford_hinf::io::{self, calculus_result_value, FrameReport};
use clifford_hinf::quadratic::{FrameSampler, QuadGridConfig};
use clifford_hinf::slice::IntrinsicFunction;
use clifford_hinf::spectrum::{check_bisectorial, SliceGrid};
use clifford_hinf::verify::{default_f_list, default_g_list, run_theorem_suite, SuiteConfig};
use clifford_hinf::{CliffordOperator, Error};

#[derive(Parser)]
#[command(name = "clifford-hinf", version, about = "S-spectrum scans, H-infinity calculus and quadratic estimates for Clifford operators")]
struct Cli {
    /// Worker threads; defaults to RAYON_NUM_THREADS or the core count.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan sigma_min of Q_s[T] on a slice grid and write CSV.
    Spectrum(SpectrumArgs),
    /// Check bisectoriality of angle omega and tabulate C_phi.
    Bisect(Common),
    /// Evaluate registry functions of T.
    Calc(CalcArgs),
    /// Frame bounds of g on T and T*.
    Frame(FrameArgs),
    /// Run the full inequality suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Operator JSON file.
    #[arg(long)]
    operator: PathBuf,
    #[arg(long, default_value_t = 0.4)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.7)]
    phi: f64,
    /// Contour nodes per ray.
    #[arg(long, default_value_t = 2001)]
    nodes: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    operator: PathBuf,
    /// `xmin:xmax:nx,ymin:ymax:ny`; defaults to 1.25 ||T|| around the origin.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalcArgs {
    #[command(flatten)]
    common: Common,
    /// Function registry JSON file.
    #[arg(long)]
    function: PathBuf,
}

#[derive(Args)]
struct FrameArgs {
    #[command(flatten)]
    common: Common,
    /// Registry file for g; defaults to e, e^2 and e + e^2.
    #[arg(long)]
    g: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Registry file for f; defaults to the built-in registry.
    #[arg(long)]
    function: Option<PathBuf>,
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_grid(text: &str) -> Result<SliceGrid, Error> {
    let bad = || Error::Argument(format!("grid must read xmin:xmax:nx,ymin:ymax:ny, got {text:?}"));
    let (xs, ys) = text.split_once(',').ok_or_else(bad)?;
    let axis = |s: &str| -> Result<(f64, f64, usize), Error> {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 3 {
            return Err(bad());
        }
        Ok((p[0].trim().parse().map_err(|_| bad())?, p[1].trim().parse().map_err(|_| bad())?, p[2].trim().parse().map_err(|_| bad())?))
    };
    let (x0, x1, nx) = axis(xs)?;
    let (y0, y1, ny) = axis(ys)?;
    SliceGrid::new(x0, x1, nx, y0, y1, ny)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => writeln!(std::io::stdout().lock(), "{text}")?,
    }
    Ok(())
}

fn operator_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn suite_config(c: &Common, seed: u64) -> SuiteConfig {
    SuiteConfig { omega: c.omega, theta: c.theta, phi: c.phi, seed, contour_nodes: c.nodes, ..Default::default() }
}

fn registry(path: &Option<PathBuf>, theta: f64, default: fn(f64) -> clifford_hinf::Result<Vec<IntrinsicFunction>>) -> Result<Vec<IntrinsicFunction>, Error> {
    match path {
        Some(p) => io::read_registry(p, theta),
        None => default(theta),
    }
}

/// Certified engine on `t`, or the reason it could not be built.
fn engine(t: &CliffordOperator, c: &Common) -> Result<ContourEngine, Error> {
    let cfg = suite_config(c, 0);
    let report = check_bisectorial(t, c.omega, &cfg.ray_plan())?;
    ContourEngine::new(t, &report, &cfg.contour(t.n()))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Spectrum(a) => {
            let t = io::read_operator(&a.operator)?;
            let grid = match &a.grid {
                Some(g) => parse_grid(g)?,
                None => SliceGrid::around(t.norm()),
            };
            match &a.out {
                Some(p) => {
                    io::emit_heatmap(&t, &grid, p)?;
                }
                None => {
                    let scan = clifford_hinf::spectrum::scan_spectrum_slice(&t, &grid)?;
                    io::write_scan_csv(&scan, std::io::stdout().lock())?;
                }
            }
            Ok(0)
        }
        Command::Bisect(c) => {
            let t = io::read_operator(&c.operator)?;
            let report = check_bisectorial(&t, c.omega, &suite_config(&c, 0).ray_plan())?;
            emit(&c.out, &serde_json::to_string_pretty(&report).expect("serializable"))?;
            if report.passed() {
                Ok(0)
            } else {
                eprintln!("not bisectorial: {}", report.reason.as_deref().unwrap_or("certificate failed"));
                Ok(2)
            }
        }
        Command::Calc(a) => {
            let t = io::read_operator(&a.common.operator)?;
            let fs = io::read_registry(&a.function, a.common.theta)?;
            let eng = engine(&t, &a.common)?;
            let mut out = Vec::new();
            for f in &fs {
                let mut v = calculus_result_value(&evaluate(&eng, f)?);
                v["function"] = json!(f.name());
                out.push(v);
            }
            emit(&a.common.out, &serde_json::to_string_pretty(&out).expect("serializable"))?;
            Ok(0)
        }
        Command::Frame(a) => {
            let t = io::read_operator(&a.common.operator)?;
            let ta = t.adjoint();
            let gs = registry(&a.g, a.common.theta, default_g_list)?;
            let (eng, eng_adj) = (engine(&t, &a.common)?, engine(&ta, &a.common)?);
            let mut out = Vec::new();
            for g in &gs {
                let b = FrameSampler::new(g, &eng, &QuadGridConfig::for_norm(t.norm()))?.frame_bounds();
                let ba = FrameSampler::new(g, &eng_adj, &QuadGridConfig::for_norm(ta.norm()))?.frame_bounds();
                out.push(json!({ "g": g.name(), "operator": FrameReport::from(&b), "adjoint": FrameReport::from(&ba) }));
            }
            emit(&a.common.out, &serde_json::to_string_pretty(&out).expect("serializable"))?;
            Ok(0)
        }
        Command::Verify(a) => {
            let t = io::read_operator(&a.common.operator)?;
            let gs = registry(&a.g, a.common.theta, default_g_list)?;
            let fs = registry(&a.function, a.common.theta, default_f_list)?;
            let report = run_theorem_suite(&operator_id(&a.common.operator), &t, &gs, &fs, &suite_config(&a.common, a.seed));
            emit(&a.common.out, &report.to_json())?;
            if let Some(reason) = &report.short_circuit {
                eprintln!("calculus stages skipped: {reason}");
            }
            for f in &report.failures {
                eprintln!("stage {} failed: {}", f.stage, f.reason);
            }
            for r in report.records.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {}: {} > {} + {}", r.name, r.lhs, r.rhs, r.tolerance);
            }
            Ok(report.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
