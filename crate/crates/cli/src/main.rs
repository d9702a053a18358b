use std::fmt::Display;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use yieldcurve::calibration::{calibrate, CalibrationOptions, CalibrationProblem};
use yieldcurve::equivalence::{
    random_knot_curves, scan, tenor_quadratic_check, Deviation, EquivalencePair, KnotCurve,
    RandomCurveSpec,
};
use yieldcurve::io::{
    parse_knot_table, parse_quotes, sample_curve, write_knot_table, write_report,
};
use yieldcurve::{CurveScheme, Error, Execution, SlopeScheme};

/// Tolerance for the equivalence report.
const REPORT_TOLERANCE: f64 = 1e-11;
const ONE_DAY: f64 = 1.0 / 365.0;

#[derive(Parser)]
#[command(
    name = "yieldcurve",
    version,
    about = "Discount curve construction and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a curve to par quotes and write its knot table.
    Calibrate {
        #[arg(long)]
        quotes: PathBuf,
        /// bessel, c2, smart-quad, area-preserving, harmonic, rational, van-albada or lavery
        #[arg(long)]
        scheme: CurveScheme,
        #[arg(long)]
        out: PathBuf,
        /// Lavery needs an LP per residual evaluation and is slow.
        #[arg(long)]
        allow_lavery: bool,
    },
    /// Sample a calibrated curve on a uniform grid.
    Sample {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = ONE_DAY)]
        step: f64,
        /// Tenor of the discrete forward column, in years.
        #[arg(long, default_value_t = ONE_DAY)]
        tenor: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the forward/spline equivalences and the tenor-forward structure.
    EquivalenceReport {
        /// Calibrate these quotes instead of drawing random curves.
        #[arg(long)]
        quotes: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Sample points per curve.
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        /// Number of random curves.
        #[arg(long, default_value_t = 100)]
        curves: usize,
    },
}

enum Failure {
    Input(String),
    Numeric(String),
}

impl Failure {
    fn input(e: impl Display) -> Self {
        Failure::Input(e.to_string())
    }

    /// Domain errors from bad arguments are input errors; the rest are numeric.
    fn from_lib(e: Error) -> Self {
        match e {
            Error::SchemeNotAllowed(_)
            | Error::InvalidGrid(_)
            | Error::InvalidInstrument(..)
            | Error::DateBeforeValuation { .. }
            | Error::EmptySchedule { .. }
            | Error::InvalidProblem(_)
            | Error::InvalidPeriod { .. }
            | Error::InvalidTenor(..)
            | Error::UnknownScheme(_) => Failure::Input(e.to_string()),
            e => Failure::Numeric(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Calibrate {
            quotes,
            scheme,
            out,
            allow_lavery,
        } => run_calibrate(&quotes, scheme, &out, allow_lavery),
        Command::Sample {
            curve,
            from,
            to,
            step,
            tenor,
            out,
        } => run_sample(&curve, from, to, step, tenor, &out),
        Command::EquivalenceReport {
            quotes,
            seed,
            points,
            curves,
        } => run_equivalence(quotes.as_deref(), seed, points, curves),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run_calibrate(
    quotes: &Path,
    scheme: CurveScheme,
    out: &Path,
    allow_lavery: bool,
) -> Result<(), Failure> {
    if scheme.is_lavery() && !allow_lavery {
        return Err(Failure::Input(
            "lavery calibration solves an LP per residual evaluation; pass --allow-lavery".into(),
        ));
    }
    let file = parse_quotes(quotes).map_err(Failure::input)?;
    let problem = CalibrationProblem::new(file.valuation_date, file.quotes, scheme)
        .map_err(Failure::from_lib)?;
    let opts = CalibrationOptions {
        allow_lavery,
        ..Default::default()
    };
    let r = calibrate(&problem, &opts).map_err(Failure::from_lib)?;
    println!("scheme: {scheme}");
    println!("iterations: {}", r.iterations);
    println!("max residual: {:.3e}", r.max_residual());
    if !r.converged {
        return Err(Failure::Numeric(format!("no convergence ({:?})", r.stop)));
    }
    write_knot_table(out, &r.curve).map_err(Failure::input)
}

fn run_sample(
    curve: &Path,
    from: f64,
    to: f64,
    step: f64,
    tenor: f64,
    out: &Path,
) -> Result<(), Failure> {
    let curve = parse_knot_table(curve).map_err(Failure::input)?;
    let rows = sample_curve(&curve, from, to, step, tenor).map_err(Failure::from_lib)?;
    let file = File::create(out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    write_report(BufWriter::new(file), &rows)
        .map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    println!("rows: {}", rows.len());
    Ok(())
}

fn run_equivalence(
    quotes: Option<&Path>,
    seed: u64,
    points: usize,
    count: usize,
) -> Result<(), Failure> {
    let curves: Vec<KnotCurve> = match quotes {
        Some(path) => {
            let file = parse_quotes(path).map_err(Failure::input)?;
            let problem = CalibrationProblem::new(
                file.valuation_date,
                file.quotes,
                CurveScheme::Spline(SlopeScheme::C2Natural),
            )
            .map_err(Failure::from_lib)?;
            let r =
                calibrate(&problem, &CalibrationOptions::default()).map_err(Failure::from_lib)?;
            if !r.converged {
                return Err(Failure::Numeric(format!(
                    "calibration did not converge ({:?})",
                    r.stop
                )));
            }
            println!(
                "curve: {} calibrated with c2, max residual {:.3e}",
                path.display(),
                r.max_residual()
            );
            vec![KnotCurve::from_zero_curve(&r.curve)]
        }
        None => {
            println!("curves: {count} random (seed {seed})");
            random_knot_curves(seed, count, &RandomCurveSpec::default())
        }
    };
    println!("points per curve: {points}");
    let exec = Execution::default();
    let mut worst: f64 = 0.0;
    let mut line = |label: &str, value: f64| {
        worst = worst.max(value);
        println!("{label:<34} {value:.3e}");
    };
    for (label, pair) in [
        (
            "smart-quad vs bessel (max rel)",
            EquivalencePair::SmartQuadraticBessel,
        ),
        (
            "area-preserving vs c2 (max rel)",
            EquivalencePair::AreaPreservingC2,
        ),
    ] {
        let dev: Deviation = scan(&curves, pair, points, exec).map_err(Failure::from_lib)?;
        line(label, dev.max_rel);
    }
    let (mut cubic, mut sampled) = (0.0f64, 0.0f64);
    for c in &curves {
        let zc = c
            .zero_curve(CurveScheme::Spline(SlopeScheme::C2Natural))
            .map_err(Failure::from_lib)?;
        let tc = tenor_quadratic_check(&zc, ONE_DAY, points).map_err(Failure::from_lib)?;
        cubic = cubic.max(tc.max_cubic_rel);
        sampled = sampled.max(tc.max_sampled_rel);
    }
    line("1d tenor forward cubic term (rel)", cubic);
    line("1d tenor forward sampled (rel)", sampled);
    if worst < REPORT_TOLERANCE {
        println!("result: PASS (all < {REPORT_TOLERANCE:e})");
        Ok(())
    } else {
        Err(Failure::Numeric(format!(
            "deviation {worst:.3e} exceeds {REPORT_TOLERANCE:e}"
        )))
    }
}
