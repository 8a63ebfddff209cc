use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bures_core::curvature::{
    codazzi_residual, frame_curvature, riemann, scalar_curvature_closed_form,
};
use bures_core::invariants::invariant_row;
use bures_core::metric::{closed_form_ab, metric};
use bures_core::quadrature::{interior_point, survey, ym_actions, Actions, Estimate};
use bures_core::spin7::decompose;
use bures_core::state_space::{ZETA1_MAX, ZETA2_MAX};
use bures_core::validation::{run_all, ValidationOptions, MARGIN, SEPARATION};
use bures_core::{BuresError, InvariantRow, PairIndex, ParameterPoint, QuadratureSpec, Spectrum};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Geometry of the qutrit Bures manifold.
#[derive(Debug, Parser)]
#[command(name = "bures", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every acceptance check; exits 1 if any check fails.
    Validate {
        /// Metric calibration under test (the oracles keep 1/2).
        #[arg(long, default_value_t = 0.5)]
        calibration: f64,
        /// Monte-Carlo samples for the quadrature checks.
        #[arg(long, default_value_t = 20_000)]
        mc_samples: u64,
        /// Lattice nodes per axis for the quadrature checks.
        #[arg(long, default_value_t = 4)]
        lattice_nodes: u32,
        #[arg(long, default_value_t = ValidationOptions::default().seed)]
        seed: u64,
    },
    /// Pointwise geometry at one point, as JSON.
    Point {
        /// alpha tau a beta b theta zeta1 zeta2
        #[arg(required = true, num_args = 8, value_names = ["ALPHA", "TAU", "A", "BETA", "B", "THETA", "ZETA1", "ZETA2"], allow_negative_numbers = true)]
        coords: Vec<f64>,
    },
    /// Integrated invariant table for the fields bures, asd, sd and diff.
    Table {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Monte-Carlo sample count.
        #[arg(long, required_if_eq("method", "mc"))]
        samples: Option<u64>,
        /// Lattice nodes per axis.
        #[arg(long, required_if_eq("method", "lattice"))]
        nodes: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Yang-Mills actions of F, F+ and F- from a Monte-Carlo run.
    Action {
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Normalized Codazzi residual at seeded interior points.
    Codazzi {
        #[arg(long, default_value_t = 20)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The subexpressions A and B over a (zeta1, zeta2) grid, as CSV.
    AbScan {
        /// Points per axis, endpoints included.
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Mc,
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] BuresError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0} of the checks failed")]
    ChecksFailed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numeric_domain() => 3,
            _ => 1,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn validate(options: ValidationOptions) -> CliResult {
    let outcomes = run_all(&options)?;
    for o in &outcomes {
        println!("{o}");
    }
    match outcomes.iter().filter(|o| !o.passed).count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}

#[derive(Serialize)]
struct PairSingularValues {
    pair: [usize; 2],
    values: [f64; 8],
}

#[derive(Serialize)]
struct Invariants {
    bures: InvariantRow,
    self_dual: InvariantRow,
    anti_self_dual: InvariantRow,
}

#[derive(Serialize)]
struct PointReport {
    point: ParameterPoint,
    spectrum: Spectrum,
    g: Vec<Vec<f64>>,
    g_inv: Vec<Vec<f64>>,
    sqrt_det: f64,
    scalar_curvature: f64,
    scalar_curvature_closed_form: f64,
    codazzi_residual: f64,
    invariants: Invariants,
    singular_values: Vec<PairSingularValues>,
}

fn rows(m: &bures_core::metric::Matrix8) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn point(coords: &[f64]) -> CliResult {
    let x: [f64; 8] = coords.try_into().expect("clap enforces eight values");
    let p = ParameterPoint::from_array(x);
    p.check_domain()?;
    let m = metric(&p)?;
    let r = riemann(&p)?;
    let f = frame_curvature(&p)?;
    let (plus, minus) = decompose(&f);
    let report = PointReport {
        point: p,
        spectrum: p.spectrum(),
        g: rows(&m.g),
        g_inv: rows(&m.g_inv),
        sqrt_det: m.sqrt_det,
        scalar_curvature: r.scalar,
        scalar_curvature_closed_form: scalar_curvature_closed_form(&p.spectrum())?,
        codazzi_residual: codazzi_residual(&p)?,
        invariants: Invariants {
            bures: invariant_row(&f),
            self_dual: invariant_row(&plus),
            anti_self_dual: invariant_row(&minus),
        },
        singular_values: PairIndex::new()
            .iter()
            .zip(f.singular_values())
            .map(|((a, b), values)| PairSingularValues {
                pair: [a, b],
                values,
            })
            .collect(),
    };
    emit(None, &to_json(&report))
}

fn table(spec: QuadratureSpec, out: Option<&Path>, format: Format) -> CliResult {
    let s = survey(&spec)?;
    let text = match format {
        Format::Csv => s.to_csv()?,
        Format::Json => to_json(&s),
    };
    emit(out, &text)
}

fn action(samples: u64, seed: u64) -> CliResult {
    let Actions {
        total,
        self_dual,
        anti_self_dual,
    } = ym_actions(&QuadratureSpec::monte_carlo(samples, seed))?;
    let line = |name: &str, e: &Estimate, reference: f64| {
        println!(
            "{name:<15} {:.10e} +- {:.3e}  (reference {reference:e})",
            e.value,
            e.stderr.unwrap_or(f64::NAN)
        )
    };
    line("total", &total, 0.0145485);
    line("self_dual", &self_dual, 5.33255e6);
    line("anti_self_dual", &anti_self_dual, 5.33268e6);
    println!(
        "additivity_defect {:.3e}  evaluated {} rejected {}",
        Actions {
            total,
            self_dual,
            anti_self_dual
        }
        .additivity_defect(),
        total.n_evaluated,
        total.n_rejected
    );
    Ok(())
}

fn codazzi(samples: u64, seed: u64) -> CliResult {
    let mut worst = f64::INFINITY;
    for i in 0..samples {
        let p = interior_point(seed, i, MARGIN, SEPARATION);
        let r = codazzi_residual(&p)?;
        worst = worst.min(r);
        println!("{i:>4} {:?} {r:.6e}", p.to_array());
    }
    println!("min residual {worst:.6e}");
    Ok(())
}

fn ab_scan(grid: u32, out: &Path) -> CliResult {
    let mut text = String::from("zeta1,zeta2,A,B\n");
    let steps = (grid - 1) as f64;
    for i in 0..grid {
        let zeta1 = ZETA1_MAX * i as f64 / steps;
        for j in 0..grid {
            let zeta2 = ZETA2_MAX * j as f64 / steps;
            let (a, b) = closed_form_ab(&Spectrum::from_angles(zeta1, zeta2));
            text.push_str(&format!("{zeta1:.16e},{zeta2:.16e},{a:.16e},{b:.16e}\n"));
        }
    }
    emit(Some(out), &text)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Validate {
            calibration,
            mc_samples,
            lattice_nodes,
            seed,
        } => validate(ValidationOptions {
            calibration,
            mc_samples,
            lattice_nodes,
            seed,
            ..ValidationOptions::default()
        }),
        Command::Point { coords } => point(&coords),
        Command::Table {
            method,
            samples,
            nodes,
            seed,
            out,
            format,
        } => {
            let spec = match method {
                MethodArg::Mc => {
                    QuadratureSpec::monte_carlo(samples.expect("required by clap"), seed)
                }
                MethodArg::Lattice => QuadratureSpec::lattice(nodes.expect("required by clap")),
            };
            table(spec, out.as_deref(), format)
        }
        Command::Action { samples, seed } => action(samples, seed),
        Command::Codazzi { samples, seed } => codazzi(samples, seed),
        Command::AbScan { grid, out } => ab_scan(grid, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bures: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
