use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use qplasma::conductivity::{k0_limit, small_q_coefficients};
use qplasma::sweep::{fmt_num, run_sweep, to_json, write_csv, Axis, Model, Scale, SweepSpec};
use qplasma::verify::run_verify;
use qplasma::{Backend, EvalSettings};

#[derive(Parser)]
#[command(
    name = "qplasma",
    version,
    about = "Transverse conductivity of a quantum collisional plasma"
)]
struct Cli {
    /// Evaluation backend for the dispersion functions.
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Rational)]
    backend: BackendArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Rational,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Q,
    X,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate models at one point.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        q: f64,
        /// Also evaluate the Fermi-Dirac conductivity at this chemical potential.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Models to evaluate (comma separated or repeated).
        #[arg(
            long = "model",
            value_delimiter = ',',
            default_value = "classic,sigma1,sigma2,full,lindhard,difference"
        )]
        models: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Sweep q or x and write one record per (point, model).
    Sweep {
        #[arg(long, value_enum)]
        axis: AxisArg,
        #[arg(long, allow_hyphen_values = true)]
        min: f64,
        #[arg(long, allow_hyphen_values = true)]
        max: f64,
        #[arg(long)]
        n: usize,
        /// Logarithmic spacing.
        #[arg(long)]
        log: bool,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.1)]
        x: f64,
        #[arg(long, default_value_t = 0.01)]
        y: f64,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long, value_delimiter = ',', default_value = "classic,full,lindhard")]
        models: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Run every self-check and print residuals; exit status 1 if any fails.
    Verify {
        #[command(flatten)]
        tuning: Tuning,
        /// Pole-pair prefactor to use instead of 1/2 (for sensitivity tests).
        #[arg(long, hide = true)]
        sigma2_coefficient: Option<f64>,
        /// Also write the report to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Print the k = 0 conductivity and small-q expansion coefficients.
    Limits {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long)]
        y: f64,
        /// Number of coefficients C_0, C_2, ...
        #[arg(long, default_value_t = 5)]
        terms: usize,
    },
}

#[derive(clap::Args)]
struct Tuning {
    /// Relative tolerance for adaptive quadrature paths.
    #[arg(long)]
    tol: Option<f64>,
    /// Points per direction for 3-D grids.
    #[arg(long)]
    grid: Option<usize>,
}

impl Tuning {
    fn settings(&self, backend: BackendArg) -> anyhow::Result<EvalSettings> {
        let mut s = EvalSettings::default().with_backend(match backend {
            BackendArg::Rational => Backend::Rational,
            BackendArg::Quadrature => Backend::Quadrature,
        });
        if let Some(t) = self.tol {
            s.tol_rel = t;
        }
        if let Some(n) = self.grid {
            s.grid_n_3d = n;
        }
        s.validate()?;
        Ok(s)
    }
}

fn parse_models(names: &[String]) -> anyhow::Result<Vec<Model>> {
    names
        .iter()
        .filter(|n| !n.trim().is_empty())
        .map(|n| n.parse::<Model>().with_context(|| format!("model `{n}`")))
        .collect()
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("QPLASMA_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("QPLASMA_THREADS=`{v}` is not a thread count"))?;
        if n == 0 {
            bail!("QPLASMA_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn emit(
    rows: &[qplasma::sweep::SweepRow],
    format: Format,
    out: Option<&PathBuf>,
) -> anyhow::Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => {
            Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match format {
        Format::Csv => write_csv(rows, &mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &to_json(rows))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Eval {
            x,
            y,
            q,
            alpha,
            models,
            format,
            tuning,
        } => {
            let settings = tuning.settings(cli.backend)?;
            let mut models = parse_models(&models)?;
            if let Some(a) = alpha {
                models.push(format!("degenerate({a})").parse()?);
            }
            let pt = qplasma::DimensionlessPoint::new(x, y, q)?;
            let values = models
                .iter()
                .map(|m| (*m, m.evaluate(&pt, &settings).map_err(|e| e.to_string())))
                .collect();
            let row = qplasma::sweep::SweepRow { x, y, q, values };
            emit(std::slice::from_ref(&row), format, None)?;
            let failed = row.values.iter().any(|(_, v)| v.is_err());
            Ok(if failed {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Sweep {
            axis,
            min,
            max,
            n,
            log,
            x,
            y,
            q,
            models,
            format,
            out,
            tuning,
        } => {
            let settings = tuning.settings(cli.backend)?;
            let spec = SweepSpec {
                axis: match axis {
                    AxisArg::Q => Axis::Q,
                    AxisArg::X => Axis::X,
                },
                x,
                y,
                q,
                start: min,
                stop: max,
                count: n,
                scale: if log { Scale::Log } else { Scale::Linear },
                models: parse_models(&models)?,
            };
            let rows = run_sweep(&spec, &settings)?;
            emit(&rows, format, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            tuning,
            sigma2_coefficient,
            log,
        } => {
            let mut settings = tuning.settings(cli.backend)?;
            if let Some(c) = sigma2_coefficient {
                settings.sigma2_coefficient = c;
            }
            let report = run_verify(&settings);
            println!("{report}");
            if let Some(path) = log {
                std::fs::write(&path, format!("{report}\n"))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Limits { x, y, terms } => {
            let k0 = k0_limit(x, y);
            println!("k0 {} {}", fmt_num(k0.re), fmt_num(k0.im));
            for (k, c) in small_q_coefficients(x, y, terms)?.iter().enumerate() {
                println!("C{} {} {}", 2 * k, fmt_num(c.re), fmt_num(c.im));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
