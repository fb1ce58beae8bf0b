//! Command-line front end. Every subcommand writes CSV: a header row, comma
//! separated, floats with 17 significant digits, rows in grid order.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 domain or branch error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::evolution::{super_gaussian, BeamSolution, HeatSolution};
use crate::expr::{parse, Expr};
use crate::jet::Jet;
use crate::oracles::{finite_difference, grid_points, heat_convolve, integrate, Domain, QuadratureSpec};
use crate::specfun::{hermite, modified_hermite_order2, trunc_exp};
use crate::umbral::{
    dual_gaussian_integral, dual_shifted_gaussian_integral, phi_expansion, phi_integral,
    umbral_image_integral, DualIntegralResult,
};
use crate::verify::{self, Mutation, VerifyOptions};
use crate::{evolution, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Heat `--verify` tolerance against the convolution oracle.
const HEAT_TOL: f64 = 1e-7;
/// `deriv --verify` tolerance, relative to `max(1, |f^(m)|)`.
const DERIV_TOL: f64 = 1e-5;
const WEYL_TOL: f64 = 1e-4;
const QUAD_TOL: f64 = 1e-8;

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DomainError { .. }
        | Error::BranchViolation(_)
        | Error::NonDifferentiablePoint { .. }
        | Error::SingularLeadingCoefficient(_)
        | Error::SingularDenominator(_)
        | Error::NegativeBaseRealFractionalPower { .. } => EXIT_DOMAIN,
        _ => EXIT_USAGE,
    }
}

/// Uniform grid `min:max:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> impl Iterator<Item = f64> {
        grid_points(self.min, self.max, self.n)
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected min:max:n, got `{s}`"));
        };
        let min: f64 = lo.trim().parse().map_err(|_| format!("bad grid minimum `{lo}`"))?;
        let max: f64 = hi.trim().parse().map_err(|_| format!("bad grid maximum `{hi}`"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("bad grid size `{n}`"))?;
        if n < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(format!("grid `{s}` needs n >= 2 and max > min"));
        }
        Ok(Grid { min, max, n })
    }
}

#[derive(Debug, Parser)]
#[command(name = "dualjet", version, about = "Higher-order dual numbers: derivatives, dual Gaussian integrals and evolution closed forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write CSV here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derivatives f^(m)(x), m = 0..k, from one jet evaluation.
    Deriv(DerivArgs),
    /// Heat equation with initial data exp(-a x^2) e_k(-b x^2).
    Heat(HeatArgs),
    /// Free Schrodinger evolution of the flattened beam exp(-alpha x^2) e_m(x^2).
    Beam(BeamArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
    /// Two-variable Hermite polynomials H_n(x, y), n = 0..k.
    Hermite(HermiteArgs),
    /// Dual-parameter integrals, term by term.
    Integral(IntegralArgs),
    /// Solution of dF/dtau = (gamma d/dx - z x) F with F(x, 0) = f(x).
    Weyl(WeylArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct DerivArgs {
    #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
    pub function: String,
    #[arg(short = 'x')]
    pub x: f64,
    #[arg(short = 'k', long = "order", default_value_t = 1)]
    pub order: usize,
    /// Add a central finite-difference column (k <= 4).
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct HeatArgs {
    #[arg(short = 'a')]
    pub a: f64,
    #[arg(short = 'b', default_value_t = 0.0)]
    pub b: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(short = 'k', long = "order", default_value_t = 2)]
    pub order: usize,
    #[arg(long, default_value = "-3:3:61", allow_hyphen_values = true)]
    pub grid: Grid,
    /// Add the heat-kernel convolution oracle and its error.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct BeamArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(short = 'm', default_value_t = 2)]
    pub m: usize,
    /// One time, or a comma-separated list with --norm.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub tau: Vec<f64>,
    #[arg(long, default_value = "-4:4:81", allow_hyphen_values = true)]
    pub grid: Grid,
    /// Print the L2 norm per tau instead of the field.
    #[arg(long)]
    pub norm: bool,
    /// Add the super-Gaussian exp(-|x|^p) as a reference column.
    #[arg(short = 'p')]
    pub p: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Flip the sign of the expanded heat series.
    HeatSign,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run one module only.
    #[arg(long, value_parser = verify::MODULES)]
    pub only: Option<String>,
    /// Mutation hook for testing the suite itself.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct HermiteArgs {
    #[arg(short = 'x')]
    pub x: f64,
    #[arg(short = 'y', default_value_t = 0.0)]
    pub y: f64,
    /// Highest degree.
    #[arg(short = 'k', long = "order", default_value_t = 4)]
    pub order: usize,
    /// Dual part of y: adds the second-order modified Hermite H_n(x, y + eps b).
    #[arg(short = 'b')]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Integral of exp(-alpha x^2 + z x).
    ShiftedGaussian,
    /// Integral of exp(-z x^2).
    Gaussian,
    /// Integral of 1/(1 + z x^2).
    Rational,
    /// Formal image of the rational family under v^s -> 1/Gamma(s).
    UmbralImage,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct IntegralArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(short = 'a')]
    pub a: f64,
    #[arg(short = 'b', default_value_t = 0.0)]
    pub b: f64,
    /// Gaussian width for the shifted family.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(short = 'k', long = "order", default_value_t = 2)]
    pub order: usize,
    /// Add a quadrature column for each partial sum.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct WeylArgs {
    #[arg(short = 'f', long = "function", allow_hyphen_values = true)]
    pub function: String,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(short = 'a', default_value_t = 0.0)]
    pub a: f64,
    #[arg(short = 'b', default_value_t = 0.0)]
    pub b: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(short = 'k', long = "order", default_value_t = 2)]
    pub order: usize,
    #[arg(long, default_value = "-3:3:61", allow_hyphen_values = true)]
    pub grid: Grid,
    /// Add the finite-difference PDE residual per point.
    #[arg(long)]
    pub verify: bool,
}

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    VerificationFailed(String),
}

/// CSV writer with the fixed float format.
struct Csv<'a> {
    out: &'a mut dyn Write,
}

enum Cell {
    Int(usize),
    Float(f64),
}

impl<'a> Csv<'a> {
    fn header(&mut self, names: &[&str]) -> io::Result<()> {
        writeln!(self.out, "{}", names.join(","))
    }

    fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        let text: Vec<String> = cells
            .iter()
            .map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Float(v) => format_float(*v),
            })
            .collect();
        writeln!(self.out, "{}", text.join(","))
    }
}

/// 17 significant digits, `.` decimal point.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = std::result::Result<Status, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    let result = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                let r = dispatch(&cli.command, &mut w, stderr);
                match w.flush() {
                    Ok(()) => r,
                    Err(e) => Err(Failure::Io(e)),
                }
            }
            Err(e) => Err(Failure::Usage(format!("cannot create {}: {e}", path.display()))),
        },
        None => dispatch(&cli.command, stdout, stderr),
    };
    match result {
        Ok(Status::Ok) => EXIT_OK,
        Ok(Status::VerificationFailed(msg)) => {
            let _ = writeln!(stderr, "verification failed: {msg}");
            EXIT_VERIFY
        }
        Err(Failure::Lib(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut csv = Csv { out };
    match cmd {
        Command::Deriv(a) => cmd_deriv(a, &mut csv),
        Command::Heat(a) => cmd_heat(a, &mut csv),
        Command::Beam(a) => cmd_beam(a, &mut csv),
        Command::Verify(a) => cmd_verify(a, csv.out, err),
        Command::Hermite(a) => cmd_hermite(a, &mut csv),
        Command::Integral(a) => cmd_integral(a, &mut csv),
        Command::Weyl(a) => cmd_weyl(a, &mut csv),
    }
}

fn parse_function(text: &str) -> std::result::Result<Expr, Failure> {
    // a syntax error is always a usage error, whatever its variant maps to
    parse(text).map_err(|e| Failure::Usage(e.to_string()))
}

fn cmd_deriv(args: &DerivArgs, csv: &mut Csv) -> CmdResult {
    let e = parse_function(&args.function)?;
    if args.order < 1 {
        return Err(Failure::Usage("order k must be at least 1".into()));
    }
    if args.verify && args.order > 4 {
        return Err(Failure::Usage("--verify supports k <= 4".into()));
    }
    let derivs = e.derivatives_at(args.x, args.order)?;
    if !args.verify {
        csv.header(&["m", "value"])?;
        for (m, d) in derivs.iter().enumerate() {
            csv.row(&[Cell::Int(m), Cell::Float(*d)])?;
        }
        return Ok(Status::Ok);
    }
    csv.header(&["m", "value", "finite_difference", "abs_err"])?;
    let mut worst: Option<usize> = None;
    for (m, d) in derivs.iter().enumerate() {
        let fd = if m == 0 {
            e.eval_f64(args.x)?
        } else {
            finite_difference(|t| e.eval_f64(t).unwrap_or(f64::NAN), args.x, m, None)?
        };
        let gap = (fd - d).abs();
        if !(gap <= DERIV_TOL * d.abs().max(1.0)) {
            worst.get_or_insert(m);
        }
        csv.row(&[Cell::Int(m), Cell::Float(*d), Cell::Float(fd), Cell::Float(gap)])?;
    }
    Ok(match worst {
        None => Status::Ok,
        Some(m) => Status::VerificationFailed(format!("finite difference disagrees at m = {m}")),
    })
}

fn cmd_heat(args: &HeatArgs, csv: &mut Csv) -> CmdResult {
    let sol = HeatSolution::new(args.a, args.b, args.order, args.tau)?;
    if !args.verify {
        csv.header(&["x", "value"])?;
        for x in args.grid.points() {
            csv.row(&[Cell::Float(x), Cell::Float(sol.eval(x))])?;
        }
        return Ok(Status::Ok);
    }
    if !(args.a > 0.0) || args.tau < 0.0 {
        return Err(Failure::Usage("--verify needs a > 0 and tau >= 0".into()));
    }
    csv.header(&["x", "value", "oracle", "abs_err"])?;
    let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: args.a });
    let mut max_err: f64 = 0.0;
    for x in args.grid.points() {
        let value = sol.eval(x);
        let oracle = if args.tau == 0.0 {
            sol.initial(x)
        } else {
            heat_convolve(|s| sol.initial(s), x, args.tau, &spec)?
        };
        let gap = (value - oracle).abs();
        max_err = if gap.is_nan() { f64::INFINITY } else { max_err.max(gap) };
        csv.row(&[Cell::Float(x), Cell::Float(value), Cell::Float(oracle), Cell::Float(gap)])?;
    }
    Ok(if max_err <= HEAT_TOL {
        Status::Ok
    } else {
        Status::VerificationFailed(format!("max abs_err {max_err:.3e} exceeds {HEAT_TOL:e}"))
    })
}

fn cmd_beam(args: &BeamArgs, csv: &mut Csv) -> CmdResult {
    if args.tau.is_empty() {
        return Err(Failure::Usage("--tau needs at least one value".into()));
    }
    let beams = args
        .tau
        .iter()
        .map(|&t| BeamSolution::new(args.alpha, args.m, t))
        .collect::<Result<Vec<_>>>()?;
    if args.norm {
        csv.header(&["tau", "norm"])?;
        for b in &beams {
            csv.row(&[Cell::Float(b.tau), Cell::Float(b.norm(1e-10)?)])?;
        }
        return Ok(Status::Ok);
    }
    let [beam] = beams[..] else {
        return Err(Failure::Usage("field output takes a single --tau; use --norm for several".into()));
    };
    let mut header = vec!["x", "re", "im", "intensity"];
    if args.p.is_some() {
        header.push("super_gaussian");
    }
    csv.header(&header)?;
    for x in args.grid.points() {
        let psi = beam.eval(x);
        let mut row = vec![Cell::Float(x), Cell::Float(psi.re), Cell::Float(psi.im), Cell::Float(psi.norm_sqr())];
        if let Some(p) = args.p {
            row.push(Cell::Float(super_gaussian(x, p)));
        }
        csv.row(&row)?;
    }
    Ok(Status::Ok)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CmdResult {
    let options = VerifyOptions {
        only: args.only.clone(),
        mutation: args.inject_fault.map(|Fault::HeatSign| Mutation::HeatSign),
    };
    let report = verify::run(&options)?;
    write!(out, "{report}")?;
    Ok(if report.passed() {
        Status::Ok
    } else {
        Status::VerificationFailed(format!("{} propert{} failed", report.failures(), if report.failures() == 1 { "y" } else { "ies" }))
    })
}

fn cmd_hermite(args: &HermiteArgs, csv: &mut Csv) -> CmdResult {
    match args.b {
        None => {
            csv.header(&["n", "value"])?;
            for n in 0..=args.order {
                csv.row(&[Cell::Int(n), Cell::Float(hermite(n, &args.x, &args.y)?)])?;
            }
        }
        Some(b) => {
            csv.header(&["n", "value", "modified"])?;
            for n in 0..=args.order {
                csv.row(&[
                    Cell::Int(n),
                    Cell::Float(hermite(n, &args.x, &args.y)?),
                    Cell::Float(modified_hermite_order2(n, args.x, args.y, b)?),
                ])?;
            }
        }
    }
    Ok(Status::Ok)
}

fn integral_result(args: &IntegralArgs) -> Result<DualIntegralResult> {
    let (a, b, k) = (args.a, args.b, args.order);
    match args.family {
        Family::ShiftedGaussian => dual_shifted_gaussian_integral(args.alpha, a, b, k),
        Family::Gaussian => dual_gaussian_integral(a, b, k),
        Family::Rational => phi_integral(a, b, k),
        Family::UmbralImage => umbral_image_integral(a, b, k),
    }
}

/// Quadrature of the order-`r` truncated integrand.
fn integral_quadrature(args: &IntegralArgs, r: usize) -> Result<f64> {
    let (a, b, alpha) = (args.a, args.b, args.alpha);
    match args.family {
        Family::ShiftedGaussian => {
            let spec = QuadratureSpec::new(Domain::GaussianTails { center: a / (2.0 * alpha), rate: alpha });
            integrate(|x| (-alpha * x * x + a * x).exp() * trunc_exp(r, b * x), &spec)
        }
        Family::Gaussian => {
            let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: a });
            integrate(|x| (-a * x * x).exp() * trunc_exp(r, -b * x * x), &spec)
        }
        Family::Rational => integrate(
            |x| phi_expansion(x, a, b, r).unwrap_or(f64::NAN),
            &QuadratureSpec::new(Domain::AlgebraicTails),
        ),
        Family::UmbralImage => Err(Error::InvalidArgument(
            "the umbral image is a formal integral and has no quadrature oracle".into(),
        )),
    }
}

fn cmd_integral(args: &IntegralArgs, csv: &mut Csv) -> CmdResult {
    let result = integral_result(args)?;
    if args.verify && args.family == Family::UmbralImage {
        return Err(Failure::Usage("--verify is not available for umbral-image".into()));
    }
    let mut header = vec!["r", "term", "partial_sum"];
    if args.verify {
        header.extend(["quadrature", "rel_err"]);
    }
    csv.header(&header)?;
    let mut partial = 0.0;
    let mut worst: f64 = 0.0;
    for (r, term) in result.series_terms.iter().enumerate() {
        partial += term;
        let mut row = vec![Cell::Int(r), Cell::Float(*term), Cell::Float(partial)];
        if args.verify {
            let quad = integral_quadrature(args, r)?;
            let rel = (quad - partial).abs() / partial.abs().max(f64::MIN_POSITIVE);
            worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
            row.extend([Cell::Float(quad), Cell::Float(rel)]);
        }
        csv.row(&row)?;
    }
    let tol = if args.family == Family::Rational { 1e-6 } else { QUAD_TOL };
    Ok(if worst <= tol {
        Status::Ok
    } else {
        Status::VerificationFailed(format!("max rel_err {worst:.3e} exceeds {tol:e}"))
    })
}

fn cmd_weyl(args: &WeylArgs, csv: &mut Csv) -> CmdResult {
    let e = parse_function(&args.function)?;
    let f = |s: f64| e.eval_f64(s);
    let field = |x: f64, t: f64| evolution::weyl_evolve_jet(f, args.gamma, args.a, args.b, x, t, args.order);
    if !args.verify {
        csv.header(&["x", "value"])?;
        for x in args.grid.points() {
            csv.row(&[Cell::Float(x), Cell::Float(field(x, args.tau)?.dneq())])?;
        }
        return Ok(Status::Ok);
    }
    csv.header(&["x", "value", "residual"])?;
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for x in args.grid.points() {
        let centre = field(x, args.tau)?;
        let residual = pde_residual(&centre, [
            &field(x, args.tau + h)?,
            &field(x, args.tau - h)?,
            &field(x + h, args.tau)?,
            &field(x - h, args.tau)?,
        ], x, h, args);
        worst = if residual.is_nan() { f64::INFINITY } else { worst.max(residual) };
        csv.row(&[Cell::Float(x), Cell::Float(centre.dneq()), Cell::Float(residual)])?;
    }
    Ok(if worst <= WEYL_TOL {
        Status::Ok
    } else {
        Status::VerificationFailed(format!("max residual {worst:.3e} exceeds {WEYL_TOL:e}"))
    })
}

/// Largest per-coefficient residual of `∂_τF_n - γ∂_xF_n + a x F_n + b x F_{n-1}`.
fn pde_residual(centre: &Jet, [tp, tm, xp, xm]: [&Jet; 4], x: f64, h: f64, args: &WeylArgs) -> f64 {
    (0..=centre.order())
        .map(|n| {
            let dt = (tp.coeff(n) - tm.coeff(n)) / (2.0 * h);
            let dx = (xp.coeff(n) - xm.coeff(n)) / (2.0 * h);
            let lower = if n > 0 { centre.coeff(n - 1) } else { 0.0 };
            (dt - args.gamma * dx + args.a * x * centre.coeff(n) + args.b * x * lower).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("dualjet").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn grid_parsing() {
        assert_eq!("-1:2:4".parse::<Grid>(), Ok(Grid { min: -1.0, max: 2.0, n: 4 }));
        assert!("1:1:4".parse::<Grid>().is_err());
        assert!("0:1:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
    }

    #[test]
    fn deriv_rows() {
        let (code, out, _) = run_str(&["deriv", "-f", "x", "-x", "5", "-k", "2"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "m,value");
        assert_eq!(lines[1], format!("0,{}", format_float(5.0)));
        assert_eq!(lines[2], format!("1,{}", format_float(1.0)));
        assert_eq!(lines[3], format!("2,{}", format_float(0.0)));
    }

    #[test]
    fn deriv_gaussian_at_one() {
        let (code, out, _) = run_str(&["deriv", "-f", "exp(-x^2)", "-x", "1", "-k", "3"]);
        assert_eq!(code, 0);
        let e = (-1.0f64).exp();
        let want = [e, -2.0 * e, 2.0 * e, 4.0 * e];
        for (line, w) in out.lines().skip(1).zip(want) {
            let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!((v - w).abs() <= 1e-15, "{line}");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["deriv", "-f", "ln(x", "-x", "1"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["deriv", "-f", "ln(x)", "-x", "-1"]).0, EXIT_DOMAIN);
        assert_eq!(run_str(&["heat", "-a", "1", "--tau", "-0.3"]).0, EXIT_DOMAIN);
        assert_eq!(run_str(&["beam", "--alpha", "0"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["verify", "--only", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn heat_verify_meets_tolerance() {
        let (code, out, err) = run_str(&["heat", "-a", "1", "-b", "0.2", "--tau", "0.1", "-k", "2", "--grid", "-2:2:9", "--verify"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().next(), Some("x,value,oracle,abs_err"));
        assert_eq!(out.lines().count(), 10);
    }

    #[test]
    fn beam_at_zero_is_real() {
        let (code, out, _) = run_str(&["beam", "--alpha", "1", "-m", "2", "--tau", "0", "--grid", "-2:2:5"]);
        assert_eq!(code, 0);
        for line in out.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert!(v[2].abs() < 1e-14);
            let y = crate::evolution::flattened_profile(v[0], 1.0, 2).unwrap();
            assert!((v[3] - y * y).abs() <= 1e-14);
        }
    }

    #[test]
    fn integral_families() {
        let (code, out, _) = run_str(&["integral", "gaussian", "-a", "1", "-b", "1", "-k", "2"]);
        assert_eq!(code, 0);
        let last: f64 = out.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert!((last - 0.875 * std::f64::consts::PI.sqrt()).abs() <= 1e-12);
        assert_eq!(run_str(&["integral", "umbral-image", "-a", "1", "--verify"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["integral", "rational", "-a", "1", "-b", "0.3", "--verify"]).0, EXIT_OK);
    }
}
