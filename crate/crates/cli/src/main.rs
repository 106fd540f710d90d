#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use ultrafid::inversion::{fid_certificate, g_inverse, voiculescu, GridSpec};
use ultrafid::measures::{
    check_beta_square, check_beta_symmetric, poincare_report, stieltjes_invert, linspace,
    DensityGrid,
};
use ultrafid::suite::run_suite;
use ultrafid::tolerances::{CERTIFICATE_TOLERANCE, INVERSION_RESIDUAL};
use ultrafid::transforms::{parse_complex, SlitPoint, Ultraspherical};
use ultrafid::{Complex64, UltraIndex};

use output::{csv_table, emit, to_json, Format};

#[derive(Parser)]
#[command(name = "ultrafid", version, about = "Cauchy transforms, inverses and infinite divisibility certificates for the ultraspherical laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Out {
    /// Output file; written atomically. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Log-spaced radii times angles in (0, pi).
#[derive(Args)]
struct Polar {
    #[arg(long, default_value_t = 1e-2)]
    r_min: f64,
    #[arg(long, default_value_t = 1e2)]
    r_max: f64,
    #[arg(long, default_value_t = 64)]
    nr: usize,
    #[arg(long, default_value_t = 64)]
    ntheta: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate G_n at the given points, or on the polar grid.
    Eval {
        #[arg(long)]
        n: i64,
        /// Point such as `0.5-1.2i`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        z: Vec<String>,
        #[command(flatten)]
        grid: Polar,
        #[command(flatten)]
        out: Out,
    },
    /// Invert G_n on the lower half-plane grid (conjugated polar grid) and report residuals.
    Invert {
        #[arg(long)]
        n: i64,
        /// Target such as `0.3-0.3i`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        w: Vec<String>,
        #[arg(long, default_value_t = 1e-2)]
        r_min: f64,
        #[arg(long, default_value_t = 1e1)]
        r_max: f64,
        #[arg(long, default_value_t = 32)]
        nr: usize,
        #[arg(long, default_value_t = 32)]
        ntheta: usize,
        #[arg(long, default_value_t = INVERSION_RESIDUAL)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Voiculescu transform phi_n on the polar grid or at given points.
    Phi {
        #[arg(long)]
        n: i64,
        #[arg(long, allow_hyphen_values = true)]
        z: Vec<String>,
        #[command(flatten)]
        grid: Polar,
        #[command(flatten)]
        out: Out,
    },
    /// Certify Im phi_n <= tol on the polar grid. JSON by default.
    Certify {
        #[arg(long)]
        n: i64,
        #[command(flatten)]
        grid: Polar,
        #[arg(long, default_value_t = CERTIFICATE_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Run the identity residual suite; prints the max-residual table unless
    /// --out or --format asks for CSV/JSON.
    Identities {
        #[arg(long)]
        n: i64,
        #[command(flatten)]
        out: Out,
    },
    /// Density on an equispaced grid; with --eps, recovered by Stieltjes inversion.
    Density {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 401)]
        nx: usize,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        out: Out,
    },
    /// Compare the affine and square push-forwards with their Beta laws.
    BetaCheck {
        #[arg(long)]
        n: i64,
        /// Cell-centred points in (0, 1).
        #[arg(long, default_value_t = 200)]
        nx: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Sup distance of the normalized densities to the Gaussian.
    Converge {
        #[arg(long, value_delimiter = ',', default_values_t = [1i64, 2, 5, 10, 20, 50])]
        n: Vec<i64>,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        x_max: f64,
        #[arg(long, default_value_t = 2001)]
        nx: usize,
        #[command(flatten)]
        out: Out,
    },
}

enum Failure {
    /// Bad flags or configuration; exit 2.
    Usage(String),
    /// Numerical failure; exit 1.
    Runtime(String),
}

type Run<T> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

fn runtime(e: ultrafid::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn index(n: i64) -> Run<UltraIndex> {
    UltraIndex::new(n).map_err(|e| Failure::Usage(e.to_string()))
}

fn positive(name: &str, v: f64) -> Run<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        usage(format!("--{name} must be positive and finite, got {v}"))
    }
}

fn count(name: &str, v: usize) -> Run<usize> {
    if v >= 2 {
        Ok(v)
    } else {
        usage(format!("--{name} must be at least 2, got {v}"))
    }
}

fn polar(r_min: f64, r_max: f64, nr: usize, ntheta: usize) -> Run<GridSpec> {
    let spec = GridSpec {
        r_min: positive("r-min", r_min)?,
        r_max: positive("r-max", r_max)?,
        nr: count("nr", nr)?,
        ntheta: count("ntheta", ntheta)?,
    };
    if !(spec.r_max > spec.r_min) {
        return usage("--r-max must exceed --r-min");
    }
    Ok(spec)
}

fn points(texts: &[String]) -> Run<Vec<Complex64>> {
    texts
        .iter()
        .map(|t| parse_complex(t).map_err(|e| Failure::Usage(format!("{t:?}: {e}"))))
        .collect()
}

fn line(x_min: f64, x_max: f64, nx: usize) -> Run<Vec<f64>> {
    count("nx", nx)?;
    linspace(x_min, x_max, nx).map_err(|_| Failure::Usage("need finite --x-min < --x-max".into()))
}

#[derive(Serialize)]
struct PointRow {
    z: [f64; 2],
    value: [f64; 2],
}

#[derive(Serialize)]
struct InverseRow {
    w: [f64; 2],
    z: [f64; 2],
    residual: f64,
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    max_residual: f64,
    tolerance: f64,
    pass: bool,
}

fn point_rows(z: &[Complex64], v: &[Complex64], header: [&str; 4], fmt: Format) -> String {
    match fmt {
        Format::Csv => csv_table(&header, z.iter().zip(v).map(|(z, v)| vec![z.re, z.im, v.re, v.im])),
        Format::Json => to_json(
            &z.iter()
                .zip(v)
                .map(|(z, v)| PointRow { z: [z.re, z.im], value: [v.re, v.im] })
                .collect::<Vec<_>>(),
        ),
    }
}

/// Returns whether every check passed.
fn run(cmd: Command) -> Run<bool> {
    match cmd {
        Command::Eval { n, z, grid, out } => {
            let n = index(n)?;
            let zs = if z.is_empty() { polar(grid.r_min, grid.r_max, grid.nr, grid.ntheta)?.points() } else { points(&z)? };
            let pts = zs
                .iter()
                .map(|&z| SlitPoint::new(z).map_err(|e| Failure::Usage(e.to_string())))
                .collect::<Run<Vec<_>>>()?;
            let g = Ultraspherical::cached(n);
            let vals: Vec<Complex64> = pts.par_iter().map(|p| g.value(p)).collect();
            let text = point_rows(&zs, &vals, ["z_re", "z_im", "g_re", "g_im"], out.format.unwrap_or(Format::Csv));
            write(&out, &text)?;
            Ok(true)
        }
        Command::Invert { n, w, r_min, r_max, nr, ntheta, tol, out } => {
            let n = index(n)?;
            let tol = positive("tol", tol)?;
            let ws = if w.is_empty() {
                polar(r_min, r_max, nr, ntheta)?.points().into_iter().map(|z| z.conj()).collect()
            } else {
                points(&w)?
            };
            let res = ws
                .par_iter()
                .map(|&w| g_inverse(n, w))
                .collect::<ultrafid::Result<Vec<_>>>()
                .map_err(runtime)?;
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => csv_table(
                    &["w_re", "w_im", "z_re", "z_im", "residual"],
                    res.iter().map(|r| vec![r.target.re, r.target.im, r.preimage.re, r.preimage.im, r.final_residual]),
                ),
                Format::Json => to_json(
                    &res.iter()
                        .map(|r| InverseRow {
                            w: [r.target.re, r.target.im],
                            z: [r.preimage.re, r.preimage.im],
                            residual: r.final_residual,
                        })
                        .collect::<Vec<_>>(),
                ),
            };
            write(&out, &text)?;
            Ok(res.iter().all(|r| r.final_residual <= tol))
        }
        Command::Phi { n, z, grid, out } => {
            let n = index(n)?;
            let zs = if z.is_empty() { polar(grid.r_min, grid.r_max, grid.nr, grid.ntheta)?.points() } else { points(&z)? };
            if let Some(bad) = zs.iter().find(|z| !(z.im > 0.0)) {
                return usage(format!("phi needs points in the upper half-plane, got {bad}"));
            }
            let vals = zs
                .par_iter()
                .map(|&z| voiculescu(n, z))
                .collect::<ultrafid::Result<Vec<_>>>()
                .map_err(runtime)?;
            let text = point_rows(&zs, &vals, ["z_re", "z_im", "phi_re", "phi_im"], out.format.unwrap_or(Format::Csv));
            write(&out, &text)?;
            Ok(true)
        }
        Command::Certify { n, grid, tol, out } => {
            let n = index(n)?;
            let spec = polar(grid.r_min, grid.r_max, grid.nr, grid.ntheta)?;
            let tol = positive("tol", tol)?;
            let cert = fid_certificate(n, &spec, tol).map_err(runtime)?;
            let text = match out.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut s = cert.record().to_json();
                    s.push('\n');
                    s
                }
                Format::Csv => csv_table(
                    &["z_re", "z_im", "im_phi"],
                    cert.grid.iter().zip(&cert.im_phi).map(|(z, v)| vec![z.re, z.im, *v]),
                ),
            };
            write(&out, &text)?;
            Ok(cert.passed())
        }
        Command::Identities { n, out } => {
            let n = index(n)?;
            let report = run_suite(n).map_err(runtime)?;
            if out.out.is_none() && out.format.is_none() {
                write(&out, &report.to_table())?;
                return Ok(report.passed());
            }
            eprint!("{}", report.to_table());
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => report.to_csv(),
                Format::Json => to_json(&report),
            };
            write(&out, &text)?;
            Ok(report.passed())
        }
        Command::Density { n, x_min, x_max, nx, eps, out } => {
            let n = index(n)?;
            let xs = line(x_min, x_max, nx)?;
            let grid = match eps {
                None => DensityGrid::sample(n, x_min, x_max, nx).map_err(runtime)?,
                Some(eps) => {
                    let eps = positive("eps", eps)?;
                    if xs.iter().any(|x| !(x.abs() < 2.0)) {
                        return usage("Stieltjes inversion needs --x-min and --x-max inside (-2, 2)");
                    }
                    let values = xs
                        .iter()
                        .map(|&x| stieltjes_invert(n, x, eps))
                        .collect::<ultrafid::Result<Vec<_>>>()
                        .map_err(runtime)?;
                    DensityGrid::new(xs, values).map_err(runtime)?
                }
            };
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => grid.to_csv(),
                Format::Json => to_json(&grid),
            };
            write(&out, &text)?;
            Ok(true)
        }
        Command::BetaCheck { n, nx, tol, out } => {
            let n = index(n)?;
            let nx = count("nx", nx)?;
            let tol = positive("tol", tol)?;
            let grid: Vec<f64> = (0..nx).map(|k| (k as f64 + 0.5) / nx as f64).collect();
            let sym = check_beta_symmetric(n, &grid).map_err(runtime)?;
            let sq = check_beta_square(n, &grid).map_err(runtime)?;
            let rows: Vec<CheckRow> = [("symmetric", sym), ("square", sq.square), ("complement", sq.complement)]
                .into_iter()
                .map(|(check, r)| CheckRow { check, max_residual: r, tolerance: tol, pass: r <= tol })
                .collect();
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut s = String::from("check,max_residual,tolerance,pass\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{},{},{},{}\n",
                            r.check,
                            ultrafid::format::fmt_float(r.max_residual),
                            ultrafid::format::fmt_float(r.tolerance),
                            r.pass
                        ));
                    }
                    s
                }
                Format::Json => to_json(&rows),
            };
            write(&out, &text)?;
            Ok(rows.iter().all(|r| r.pass))
        }
        Command::Converge { n, x_min, x_max, nx, out } => {
            let ns = n.into_iter().map(index).collect::<Run<Vec<_>>>()?;
            if ns.is_empty() {
                return usage("--n needs at least one index");
            }
            let xs = line(x_min, x_max, nx)?;
            let report = poincare_report(&ns, &xs).map_err(runtime)?;
            let text = match out.format.unwrap_or(Format::Csv) {
                Format::Csv => report.to_csv(),
                Format::Json => to_json(&report),
            };
            write(&out, &text)?;
            Ok(report.is_strictly_decreasing())
        }
    }
}

fn write(out: &Out, text: &str) -> Run<()> {
    emit(out.out.as_deref(), text).map_err(|e| Failure::Runtime(format!("writing output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
