//! The invariant suite behind `dualjet verify`.
//!
//! Every property is measured, not just asserted: each [`Check`] carries the
//! largest error seen over its sample and the tolerance it is held to.
//! Sampling is seeded, so two runs print the same report.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evolution::{
    flattened_profile, glaisher, heat_compact_series_signed, heat_dual_gaussian,
    heat_dual_gaussian_jet, heat_second_order_terms, schrodinger_flattened, weyl_evolve,
    weyl_evolve_jet, BeamSolution, HeatSolution, HEAT_SERIES_SIGN,
};
use crate::expr::{parse, BinaryOp, Expr, UnaryOp};
use crate::jet::{DerivativeSource, Elementary, Jet};
use crate::matrix::{apply_fn, epsilon_power, eval_bracket, DnuMatrix, Orientation};
use crate::oracles::{finite_difference, heat_convolve, integrate, Domain, QuadratureSpec};
use crate::scalar::Ring;
use crate::specfun::{
    dual_gaussian_derivative, dual_gaussian_derivative_double_sum, gamma, hermite,
    hermite_egf_partial, lacunary_h20_partial, lorentzian_derivatives, modified_hermite_order2,
    trunc_exp,
};
use crate::umbral::{
    dual_gaussian_integral, dual_gaussian_integral_jet, dual_shifted_gaussian_integral,
    phi_expansion, phi_integral, recip_gamma_half_minus,
};
use crate::{Error, Result};

/// Module names accepted by [`VerifyOptions::only`].
pub const MODULES: [&str; 7] = [
    "jet_core",
    "matrix_rep",
    "specfun",
    "umbral",
    "evolution",
    "oracles",
    "expr",
];

/// Expressions and evaluation points for the derivative-coherence check.
pub const EXPRESSION_CORPUS: [(&str, f64); 10] = [
    ("exp(-x^2)", 0.3),
    ("x*sin(x)", 0.7),
    ("ln(1+x^2)", 0.5),
    ("sqrt(1+x)", 0.4),
    ("1/(1+x^2)", 0.3),
    ("exp(x)*cos(x)", 0.2),
    ("x^3 - 2*x + 1", 1.5),
    ("abs(x)*exp(x)", -0.8),
    ("x^2.5", 1.3),
    ("cos(x^2)", 0.8),
];

/// Deliberate faults used to show the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Flip the sign `σ` of the expanded heat series.
    HeatSign,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Restrict the run to one module.
    pub only: Option<String>,
    pub mutation: Option<Mutation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub module: &'static str,
    pub property: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
    /// Set when the property could not be evaluated at all.
    pub failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.max_error <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            write!(
                f,
                "{status}  {:<11} {:<58} max_err={:.3e} tol={:.0e}",
                c.module, c.property, c.max_error, c.tolerance
            )?;
            if let Some(reason) = &c.failure {
                write!(f, "  ({reason})")?;
            }
            writeln!(f)?;
        }
        let total = self.checks.len();
        writeln!(f, "{} of {total} properties passed", total - self.failures())
    }
}

/// Running maximum that treats NaN as an infinite error.
#[derive(Debug, Clone, Copy, Default)]
struct MaxErr(f64);

impl MaxErr {
    fn push(&mut self, e: f64) {
        self.0 = if e.is_nan() { f64::INFINITY } else { self.0.max(e) };
    }

    fn rel(&mut self, got: f64, want: f64, scale: f64) {
        self.push((got - want).abs() / scale.max(f64::MIN_POSITIVE));
    }
}

struct Suite {
    mutation: Option<Mutation>,
    checks: Vec<Check>,
    module: &'static str,
}

impl Suite {
    fn check(&mut self, property: &'static str, tolerance: f64, body: impl FnOnce() -> Result<f64>) {
        let (max_error, failure) = match body() {
            Ok(e) => (e, None),
            Err(err) => (f64::INFINITY, Some(err.to_string())),
        };
        self.checks.push(Check {
            module: self.module,
            property,
            max_error,
            tolerance,
            failure,
        });
    }
}

type Group = fn(&mut Suite);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs the suite. Fails only if `only` names no module.
pub fn run(options: &VerifyOptions) -> Result<Report> {
    if let Some(name) = &options.only {
        if !MODULES.contains(&name.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown module `{name}`; expected one of {}",
                MODULES.join(", ")
            )));
        }
    }
    let mut suite = Suite {
        mutation: options.mutation,
        checks: Vec::new(),
        module: "",
    };
    let groups: [(&str, Group); 7] = [
        ("jet_core", jet_core),
        ("matrix_rep", matrix_rep),
        ("specfun", specfun),
        ("umbral", umbral),
        ("evolution", evolution),
        ("oracles", oracles),
        ("expr", expr),
    ];
    for (name, group) in groups {
        if options.only.as_deref().is_none_or(|o| o == name) {
            suite.module = name;
            group(&mut suite);
        }
    }
    Ok(Report { checks: suite.checks })
}

fn random_jet(r: &mut ChaCha8Rng, order: usize, lo: f64, hi: f64) -> Jet {
    Jet::from_coeffs((0..=order).map(|_| r.gen_range(lo..hi)).collect())
}

/// Largest coefficient gap, relative to the largest coefficient magnitude (at least 1).
fn jet_gap(a: &Jet, b: &Jet) -> f64 {
    let scale = a
        .coeffs()
        .iter()
        .chain(b.coeffs())
        .fold(1.0f64, |m, c| m.max(c.abs()));
    (0..=a.order().max(b.order()))
        .map(|m| (a.coeff(m) - b.coeff(m)).abs() / scale)
        .fold(0.0, f64::max)
}

fn bitwise_gap(a: f64, b: f64) -> f64 {
    if a.to_bits() == b.to_bits() {
        0.0
    } else {
        (a - b).abs().max(f64::MIN_POSITIVE)
    }
}

fn jet_core(s: &mut Suite) {
    s.check("ring laws on 1000 random jets (k <= 8, [-2,2])", 1e-12, || {
        let mut r = rng(1);
        let mut err = MaxErr::default();
        for _ in 0..1000 {
            let k = r.gen_range(0..=8);
            let (u, v, w) = (
                random_jet(&mut r, k, -2.0, 2.0),
                random_jet(&mut r, k, -2.0, 2.0),
                random_jet(&mut r, k, -2.0, 2.0),
            );
            err.push(jet_gap(&(&u + &v), &(&v + &u)));
            err.push(jet_gap(&(&u * &v), &(&v * &u)));
            err.push(jet_gap(&(&(&u + &v) + &w), &(&u + &(&v + &w))));
            err.push(jet_gap(&(&(&u * &v) * &w), &(&u * &(&v * &w))));
            err.push(jet_gap(&(&u * &(&v + &w)), &(&(&u * &v) + &(&u * &w))));
        }
        Ok(err.0)
    });

    s.check("ring laws exact on integer coefficients", 0.0, || {
        let mut r = rng(2);
        let mut err = MaxErr::default();
        for _ in 0..300 {
            let k = r.gen_range(0..=8);
            let mut int_jet = || Jet::from_coeffs((0..=k).map(|_| r.gen_range(-9i32..=9) as f64).collect());
            let (u, v, w) = (int_jet(), int_jet(), int_jet());
            for (a, b) in [
                (&(&u * &v) * &w, &u * &(&v * &w)),
                (&u * &(&v + &w), &(&u * &v) + &(&u * &w)),
                (&u * &v, &v * &u),
            ] {
                err.push(if a == b { 0.0 } else { 1.0 });
            }
        }
        Ok(err.0)
    });

    s.check("nilpotency: eps^(k+1) = 0 exactly", 0.0, || {
        let mut err = MaxErr::default();
        for k in 0..=16 {
            let e = Jet::<f64>::epsilon(k);
            for p in [e.powi(k as i32 + 1)?, e.pow_u(k as u32 + 1)] {
                err.push(p.coeffs().iter().fold(0.0, |m: f64, c| m.max(c.abs())));
            }
            let last = e.pow_u(k as u32);
            err.push((last.coeff(k) - 1.0).abs());
        }
        Ok(err.0)
    });

    s.check("inverse law u * inv(u) = 1 (|c0| in [1,2], |c_m| <= 1)", 1e-12, || {
        let mut r = rng(3);
        let mut err = MaxErr::default();
        for _ in 0..500 {
            let k = r.gen_range(0..=8);
            let mut u = random_jet(&mut r, k, -1.0, 1.0).into_coeffs();
            u[0] = r.gen_range(1.0..2.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
            let u = Jet::from_coeffs(u);
            err.push(jet_gap(&(&u * &u.inv()?), &Jet::unit(k)));
        }
        Ok(err.0)
    });

    s.check("lift homomorphism exp(u+v) = exp(u) exp(v)", 1e-12, || {
        let mut r = rng(4);
        let mut err = MaxErr::default();
        for _ in 0..500 {
            let k = r.gen_range(0..=8);
            let (u, v) = (random_jet(&mut r, k, -1.0, 1.0), random_jet(&mut r, k, -1.0, 1.0));
            err.push(jet_gap(&(&u + &v).exp(), &(&u.exp() * &v.exp())));
        }
        Ok(err.0)
    });

    s.check("dneq linearity (bitwise, integer data)", 0.0, || {
        let mut r = rng(5);
        let mut err = MaxErr::default();
        for _ in 0..300 {
            let k = r.gen_range(0..=8);
            let mut int_jet = || Jet::from_coeffs((0..=k).map(|_| r.gen_range(-50i32..=50) as f64).collect());
            let (u, v) = (int_jet(), int_jet());
            let (a, b) = (r.gen_range(-5i32..=5) as f64, r.gen_range(-5i32..=5) as f64);
            let lhs = (&u.scale(a) + &v.scale(b)).dneq();
            err.push(bitwise_gap(lhs, a * u.dneq() + b * v.dneq()));
        }
        Ok(err.0)
    });

    s.check("derivative of x sin x: m=3 closed form", 1e-13, || {
        let x = 0.7;
        let t = Jet::variable(x, 1.0, 3);
        let d3 = (&t * &t.sin()).extract_derivative(3)?;
        let want: f64 = -3.0 * x.sin() - x * x.cos();
        Ok((d3 - want).abs() / want.abs())
    });
}

fn lorentzian_source() -> impl Fn(f64, usize) -> Result<Vec<f64>> {
    lorentzian_derivatives
}

fn matrix_rep(s: &mut Suite) {
    s.check("bracket of apply_fn = dneq of lift (k <= 8)", 1e-12, || {
        let mut r = rng(11);
        let mut err = MaxErr::default();
        let lorentz = lorentzian_source();
        for _ in 0..200 {
            let k = r.gen_range(1..=8);
            let (x, y) = (r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
            let source: &dyn DerivativeSource<f64> = match r.gen_range(0..4) {
                0 => &Elementary::Exp,
                1 => &Elementary::Sin,
                2 => &Elementary::Cos,
                _ => &lorentz,
            };
            let m = apply_fn(source, x, y, k + 1)?;
            let scale = m.row(0).iter().map(|v| v.abs()).sum::<f64>();
            let jet = Jet::variable(x, y, k).lift(source)?;
            err.rel(eval_bracket(&m), jet.dneq(), scale);
        }
        Ok(err.0)
    });

    s.check("shift matrices: (eps_k^+-)^k = 0 in integers", 0.0, || {
        let mut err = MaxErr::default();
        for k in 2..=16 {
            for orientation in [Orientation::Upper, Orientation::Lower] {
                let e: DnuMatrix<i64> = epsilon_power(k, orientation, 1)?;
                err.push(if e.pow(k as u32).is_zero() { 0.0 } else { 1.0 });
                err.push(if e.pow(k as u32 - 1).is_zero() { 1.0 } else { 0.0 });
            }
        }
        Ok(err.0)
    });

    s.check("apply_fn(exp)^2 = apply_fn(exp(2x))", 1e-12, || {
        let mut err = MaxErr::default();
        let double = |t: f64, n: usize| -> Result<Vec<f64>> {
            Ok((0..n).map(|m| 2f64.powi(m as i32) * (2.0 * t).exp()).collect())
        };
        for (x, y, k) in [(0.2, 0.9, 6), (-0.7, 1.3, 9), (1.1, -0.4, 4)] {
            let e = apply_fn(&Elementary::Exp, x, y, k)?;
            let want = apply_fn(&double, x, y, k)?;
            let got = e.matmul(&e);
            let scale = want.row(0).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..k {
                for j in 0..k {
                    err.rel(got.get(i, j), want.get(i, j), scale);
                }
            }
        }
        Ok(err.0)
    });
}

/// `Σ |terms|` of `H_n(x, y)`; the natural scale for Hermite identities.
fn hermite_scale(n: usize, x: f64, y: f64) -> Result<f64> {
    hermite(n, &x.abs(), &y.abs())
}

fn specfun(s: &mut Suite) {
    s.check("e_n' = e_(n-1) by central difference, h=1e-4", 1e-8, || {
        let h = 1e-4;
        let mut err = MaxErr::default();
        for n in 1..=10 {
            for i in 0..=20 {
                let x = -1.0 + 0.1 * i as f64;
                let d = (trunc_exp(n, x + h) - trunc_exp(n, x - h)) / (2.0 * h);
                err.push((d - trunc_exp(n - 1, x)).abs());
            }
        }
        Ok(err.0)
    });

    s.check("H_(n+1) = x H_n + 2yn H_(n-1), integer arguments", 0.0, || {
        let mut err = MaxErr::default();
        for n in 1..=10 {
            for x in -3..=3 {
                for y in -3..=3 {
                    let (x, y) = (x as f64, y as f64);
                    let lhs = hermite(n + 1, &x, &y)?;
                    let rhs = x * hermite(n, &x, &y)? + 2.0 * y * n as f64 * hermite(n - 1, &x, &y)?;
                    err.push((lhs - rhs).abs());
                }
            }
        }
        Ok(err.0)
    });

    s.check("H_(n+1) = x H_n + 2yn H_(n-1), n <= 20, random points", 1e-10, || {
        let mut r = rng(21);
        let mut err = MaxErr::default();
        for _ in 0..100 {
            let (x, y) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            for n in 1..20 {
                let lhs = hermite(n + 1, &x, &y)?;
                let rhs = x * hermite(n, &x, &y)? + 2.0 * y * n as f64 * hermite(n - 1, &x, &y)?;
                err.rel(lhs, rhs, hermite_scale(n + 1, x, y)?);
            }
        }
        Ok(err.0)
    });

    s.check("d/dx H_n = n H_(n-1) against finite difference", 1e-6, || {
        let mut r = rng(22);
        let mut err = MaxErr::default();
        for _ in 0..100 {
            let (x, y) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            for n in 1..=20 {
                let fd = finite_difference(|t| hermite(n, &t, &y).unwrap_or(f64::NAN), x, 1, None)?;
                let exact = n as f64 * hermite(n - 1, &x, &y)?;
                err.rel(fd, exact, n as f64 * hermite_scale(n - 1, x, y)?);
            }
        }
        Ok(err.0)
    });

    s.check("d2/dx2 H_n = d/dy H_n (finite difference in y)", 1e-6, || {
        let mut r = rng(23);
        let mut err = MaxErr::default();
        for _ in 0..100 {
            let (x, y) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            for n in 2..=20 {
                let fd = finite_difference(|t| hermite(n, &x, &t).unwrap_or(f64::NAN), y, 1, None)?;
                let exact = (n * (n - 1)) as f64 * hermite(n - 2, &x, &y)?;
                err.rel(fd, exact, (n * (n - 1)) as f64 * hermite_scale(n - 2, x, y)?);
            }
        }
        Ok(err.0)
    });

    s.check("ODE 2y n(n-1) H_(n-2) + x n H_(n-1) - n H_n = 0", 1e-10, || {
        let mut r = rng(24);
        let mut err = MaxErr::default();
        for _ in 0..100 {
            let (x, y) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
            for n in 2..=20 {
                let nf = n as f64;
                let residual = 2.0 * y * nf * (nf - 1.0) * hermite(n - 2, &x, &y)?
                    + x * nf * hermite(n - 1, &x, &y)?
                    - nf * hermite(n, &x, &y)?;
                err.push(residual.abs() / (nf * hermite_scale(n, x, y)?));
            }
        }
        Ok(err.0)
    });

    s.check("ODE with y a jet, coefficient-wise", 1e-10, || {
        let mut r = rng(25);
        let mut err = MaxErr::default();
        for _ in 0..100 {
            let (x, a, b) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-1.0..1.0));
            let k = r.gen_range(1..=4);
            let xj = Jet::constant(x, k);
            let y = Jet::variable(a, b, k);
            let ya = Jet::variable(a.abs(), b.abs(), k);
            for n in 2..=20 {
                let nf = n as f64;
                let residual = y.scale(2.0 * nf * (nf - 1.0)) * hermite(n - 2, &xj, &y)?
                    + hermite(n - 1, &xj, &y)?.scale(x * nf)
                    - hermite(n, &xj, &y)?.scale(nf);
                let scale = hermite(n, &Jet::constant(x.abs(), k), &ya)?;
                for m in 0..=k {
                    err.push(residual.coeff(m).abs() / (nf * scale.coeff(m)).max(nf));
                }
            }
        }
        Ok(err.0)
    });

    s.check("hermite over order-0 jets equals scalar (bitwise)", 0.0, || {
        let mut r = rng(26);
        let mut err = MaxErr::default();
        for _ in 0..100 {
            let (x, y) = (r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
            for n in 0..=20 {
                let j = hermite(n, &Jet::constant(x, 0), &Jet::constant(y, 0))?;
                err.push(bitwise_gap(j.value(), hermite(n, &x, &y)?));
            }
        }
        Ok(err.0)
    });

    s.check("modified Hermite three-term formula = jet ring (n <= 10)", 1e-12, || {
        let mut r = rng(27);
        let mut err = MaxErr::default();
        for _ in 0..100 {
            let (x, a, b) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-1.0..1.0));
            for n in 0..=10 {
                let jet = hermite(n, &Jet::constant(x, 2), &Jet::variable(a, b, 2))?.dneq();
                let scale = hermite(n, &Jet::constant(x.abs(), 2), &Jet::variable(a.abs(), b.abs(), 2))?.dneq();
                err.rel(modified_hermite_order2(n, x, a, b)?, jet, scale.max(1.0));
            }
        }
        Ok(err.0)
    });

    s.check("generating function partial sum -> exp(xt + yt^2)", 1e-12, || {
        let (t, x, y): (f64, f64, f64) = (0.3, 0.5, 0.2);
        let want: f64 = (x * t + y * t * t).exp();
        Ok((hermite_egf_partial(t, x, y, 30) - want).abs() / want)
    });

    s.check("lacunary series -> Glaisher form (|4 lambda y| < 1)", 1e-10, || {
        let mut err = MaxErr::default();
        for (alpha, x, tau) in [(0.2, 0.5, 0.1), (0.5, -1.0, 0.2), (1.0, 0.3, 0.05)] {
            let want = glaisher(alpha, x, tau)?;
            err.rel(lacunary_h20_partial(-alpha, x, tau, 40), want, want);
        }
        Ok(err.0)
    });

    s.check("dual Gaussian derivative: jet path = double sum", 1e-12, || {
        let mut err = MaxErr::default();
        for (n, a, b, x, k) in [(2, 1.0, 0.3, 0.5, 2), (3, 0.7, -0.2, 0.8, 3), (5, 1.2, 0.1, -0.4, 4), (0, 0.8, 0.35, 0.9, 2)] {
            let jet = dual_gaussian_derivative(n, a, b, x, k)?;
            err.rel(dual_gaussian_derivative_double_sum(n, a, b, x, k)?, jet, jet.abs().max(1.0));
        }
        Ok(err.0)
    });
}

fn umbral(s: &mut Suite) {
    s.check("shifted Gaussian closed form vs quadrature", 1e-8, || {
        let mut err = MaxErr::default();
        for alpha in [0.5, 1.0, 2.0] {
            for a in [0.0, 0.5] {
                for b in [0.1, 0.3] {
                    for k in [1, 2, 3, 5] {
                        let closed = dual_shifted_gaussian_integral(alpha, a, b, k)?.value;
                        let spec = QuadratureSpec::new(Domain::GaussianTails { center: a / (2.0 * alpha), rate: alpha });
                        let quad = integrate(|x| (-alpha * x * x + a * x).exp() * trunc_exp(k, b * x), &spec)?;
                        err.rel(quad, closed, closed.abs());
                    }
                }
            }
        }
        Ok(err.0)
    });

    s.check("dual Gaussian binomial series vs quadrature", 1e-8, || {
        let mut err = MaxErr::default();
        for a in [0.5, 1.0, 2.0] {
            for b in [-0.5, 0.1, 0.5] {
                for k in [1, 2, 3, 5] {
                    let closed = dual_gaussian_integral(a, b, k)?.value;
                    let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: a });
                    let quad = integrate(|x| (-a * x * x).exp() * trunc_exp(k, -b * x * x), &spec)?;
                    err.rel(quad, closed, closed.abs());
                }
            }
        }
        Ok(err.0)
    });

    s.check("dual Gaussian (a,b,k)=(1,1,2) equals 0.875 sqrt(pi)", 1e-12, || {
        Ok((dual_gaussian_integral(1.0, 1.0, 2)?.value - 0.875 * PI.sqrt()).abs())
    });

    s.check("series terms sum to value", 1e-14, || {
        let mut err = MaxErr::default();
        for k in 0..=8 {
            for r in [
                dual_shifted_gaussian_integral(0.5, 0.5, 0.3, k)?,
                dual_gaussian_integral(1.3, -0.4, k)?,
                phi_integral(2.0, 0.5, k)?,
            ] {
                err.rel(r.series_terms.iter().sum(), r.value, r.value.abs().max(1.0));
            }
        }
        Ok(err.0)
    });

    s.check("binomial path = jet powf path (k <= 10)", 1e-13, || {
        let mut err = MaxErr::default();
        for (a, b) in [(0.8, -0.3), (2.0, 0.7), (1.0, 1.0)] {
            for k in 0..=10 {
                let bin = dual_gaussian_integral(a, b, k)?.value;
                err.rel(dual_gaussian_integral_jet(a, b, k)?.value, bin, bin.abs());
            }
        }
        Ok(err.0)
    });

    s.check("1/Gamma(1/2 - r): reflection = direct (r <= 12)", 1e-12, || {
        let mut err = MaxErr::default();
        for r in 0..=12 {
            let direct = 1.0 / gamma(0.5 - r as f64);
            let reflected = recip_gamma_half_minus(r);
            err.rel(reflected, direct, direct.abs());
        }
        Ok(err.0)
    });

    s.check("rational family: pi z^(-1/2) vs quadrature", 1e-6, || {
        let mut err = MaxErr::default();
        for (a, b) in [(1.0, 0.3), (2.0, -0.4), (0.5, 0.1)] {
            for k in [0, 1, 2, 3] {
                let closed = phi_integral(a, b, k)?.value;
                let quad = integrate(
                    |x| phi_expansion(x, a, b, k).unwrap_or(f64::NAN),
                    &QuadratureSpec::new(Domain::AlgebraicTails),
                )?;
                err.rel(quad, closed, closed.abs());
            }
        }
        Ok(err.0)
    });
}

fn heat_cases() -> Vec<(f64, f64, f64, usize)> {
    let mut cases = Vec::new();
    for (a, b) in [(1.0, 0.2), (0.5, -0.3), (2.0, 0.4)] {
        for tau in [0.01, 0.1, 0.5] {
            for k in 0..=4 {
                cases.push((a, b, tau, k));
            }
        }
    }
    cases
}

fn evolution(s: &mut Suite) {
    let sign = match s.mutation {
        Some(Mutation::HeatSign) => -HEAT_SERIES_SIGN,
        None => HEAT_SERIES_SIGN,
    };
    let xs: Vec<f64> = (0..=8).map(|i| -2.0 + 0.5 * i as f64).collect();

    s.check("tau = 0 reproduces the initial data (heat, beam, Weyl)", 1e-13, || {
        let mut err = MaxErr::default();
        let f = parse("exp(-x^2)*cos(x)")?;
        for &x in &xs {
            for k in 0..=4 {
                let h = HeatSolution::new(1.0, 0.3, k, 0.0)?;
                err.rel(h.eval(x), h.initial(x), 1.0);
            }
            for (alpha, m) in [(1.0, 2), (0.8, 4)] {
                let psi = schrodinger_flattened(x, 0.0, alpha, m)?;
                err.rel(psi.re, flattened_profile(x, alpha, m)?, 1.0);
                err.push(psi.im.abs());
            }
            let w = weyl_evolve(|t| f.eval_f64(t), 1.0, 0.5, 0.2, x, 0.0, 3)?;
            err.rel(w, f.eval_f64(x)?, 1.0);
        }
        Ok(err.0)
    });

    s.check("heat: jet path = compact Hermite series", 1e-11, || {
        let mut err = MaxErr::default();
        for (a, b, tau, k) in heat_cases() {
            for &x in &xs {
                let series: f64 = heat_compact_series_signed(a, b, x, tau, k, sign)?.iter().sum();
                err.rel(series, heat_dual_gaussian(a, b, x, tau, k)?, 1.0);
            }
        }
        Ok(err.0)
    });

    s.check("heat: jet path = heat-kernel convolution", 1e-7, || {
        let mut err = MaxErr::default();
        for (a, b, tau, k) in heat_cases() {
            let initial = HeatSolution::new(a, b, k, 0.0)?;
            let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: a });
            for &x in &xs {
                let conv = heat_convolve(|s| initial.initial(s), x, tau, &spec)?;
                err.rel(heat_dual_gaussian(a, b, x, tau, k)?, conv, 1.0);
            }
        }
        Ok(err.0)
    });

    s.check("heat k=2: literal second-order terms = jet coefficients", 1e-11, || {
        let mut err = MaxErr::default();
        for (a, b) in [(1.0, 0.2), (0.5, -0.3)] {
            for tau in [0.01, 0.1, 0.5] {
                for &x in &xs {
                    let literal = heat_second_order_terms(a, b, x, tau)?;
                    let jet = heat_dual_gaussian_jet(a, b, x, tau, 2)?;
                    let series = heat_compact_series_signed(a, b, x, tau, 2, sign)?;
                    for n in 0..3 {
                        err.rel(jet.coeff(n), literal[n], 1.0);
                        err.rel(series[n], literal[n], 1.0);
                    }
                }
            }
        }
        Ok(err.0)
    });

    s.check("heat b = 0 reduces to the Glaisher form", 1e-13, || {
        let mut err = MaxErr::default();
        for tau in [0.01, 0.1, 0.5] {
            for &x in &xs {
                for k in 0..=4 {
                    err.rel(heat_dual_gaussian(1.3, 0.0, x, tau, k)?, glaisher(1.3, x, tau)?, 1.0);
                }
            }
        }
        Ok(err.0)
    });

    s.check("Schrodinger: L2 norm conserved over tau in {0, 0.1, 0.5}", 1e-6, || {
        let mut err = MaxErr::default();
        for (alpha, m) in [(1.0, 2), (0.8, 4)] {
            let n0 = BeamSolution::new(alpha, m, 0.0)?.norm(1e-10)?;
            for tau in [0.1, 0.5] {
                err.rel(BeamSolution::new(alpha, m, tau)?.norm(1e-10)?, n0, n0);
            }
        }
        Ok(err.0)
    });

    s.check("Weyl: per-coefficient PDE residual, h=1e-4, 21 points", 1e-4, || {
        let f = parse("exp(-x^2)")?;
        let (gamma, a, b, k, tau, h) = (1.0, 0.5, 0.2, 2, 0.3, 1e-4);
        let mut err = MaxErr::default();
        for i in 0..21 {
            let x = -2.0 + 0.2 * i as f64;
            let field = |x: f64, t: f64| weyl_evolve_jet(|s| f.eval_f64(s), gamma, a, b, x, t, k);
            let centre = field(x, tau)?;
            let (tp, tm) = (field(x, tau + h)?, field(x, tau - h)?);
            let (xp, xm) = (field(x + h, tau)?, field(x - h, tau)?);
            for n in 0..=k {
                let dt = (tp.coeff(n) - tm.coeff(n)) / (2.0 * h);
                let dx = (xp.coeff(n) - xm.coeff(n)) / (2.0 * h);
                let lower = if n > 0 { centre.coeff(n - 1) } else { 0.0 };
                let residual = dt - gamma * dx + a * x * centre.coeff(n) + b * x * lower;
                err.push(residual.abs());
            }
        }
        Ok(err.0)
    });

    s.check("Weyl: z = 0 is pure advection", 1e-13, || {
        let f = parse("exp(-x^2)")?;
        let mut err = MaxErr::default();
        for &x in &xs {
            for tau in [0.1, 0.7] {
                let w = weyl_evolve(|s| f.eval_f64(s), 1.5, 0.0, 0.0, x, tau, 3)?;
                err.rel(w, f.eval_f64(x + 1.5 * tau)?, 1.0);
            }
        }
        Ok(err.0)
    });
}

fn oracles(s: &mut Suite) {
    s.check("quadrature: |I(tol/2) - I(tol)| / tol, Gaussian", 1.0, || {
        let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: 1.0 });
        let mut err = MaxErr::default();
        for tol in [1e-6, 1e-8, 1e-10] {
            let coarse = integrate(|x| (-x * x).exp(), &spec.with_tol(tol))?;
            let fine = integrate(|x| (-x * x).exp(), &spec.with_tol(tol / 2.0))?;
            err.push((coarse - fine).abs() / tol);
        }
        Ok(err.0)
    });

    s.check("quadrature: Gaussian integral = sqrt(pi)", 1e-10, || {
        let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: 1.0 });
        Ok((integrate(|x| (-x * x).exp(), &spec)? - PI.sqrt()).abs())
    });

    s.check("heat kernel mass = 1 for tau in [1e-3, 1]", 1e-12, || {
        let spec = QuadratureSpec::new(Domain::AlgebraicTails).with_tol(1e-13);
        let mut err = MaxErr::default();
        for tau in [1e-3, 1e-2, 0.1, 0.5, 1.0] {
            err.push((heat_convolve(|_| 1.0, 0.3, tau, &spec)? - 1.0).abs());
        }
        Ok(err.0)
    });

    s.check("finite differences of exp, orders 1-3", 1e-5, || {
        let mut err = MaxErr::default();
        for x in [-1.0f64, 0.5, 2.0] {
            for m in 1..=3 {
                err.rel(finite_difference(f64::exp, x, m, None)?, x.exp(), x.exp());
            }
        }
        Ok(err.0)
    });
}

/// Random expression trees that parse back to themselves.
fn random_expr(r: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || r.gen_bool(0.3) {
        return if r.gen_bool(0.5) {
            Expr::Var
        } else {
            Expr::Literal((r.gen_range(0.0..10.0f64) * 100.0).round() / 100.0)
        };
    }
    match r.gen_range(0..3) {
        0 => {
            let ops = [UnaryOp::Neg, UnaryOp::Exp, UnaryOp::Sin, UnaryOp::Cos, UnaryOp::Ln, UnaryOp::Sqrt, UnaryOp::Abs];
            let op = ops[r.gen_range(0..ops.len())];
            Expr::unary(op, random_expr(r, depth - 1))
        }
        1 => {
            let ops = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div];
            let op = ops[r.gen_range(0..ops.len())];
            Expr::binary(op, random_expr(r, depth - 1), random_expr(r, depth - 1))
        }
        _ => Expr::binary(BinaryOp::Pow, random_expr(r, depth - 1), Expr::Literal(r.gen_range(0..5) as f64)),
    }
}

fn expr(s: &mut Suite) {
    s.check("parse(print(e)) = e on 500 random trees", 0.0, || {
        let mut r = rng(41);
        let mut err = MaxErr::default();
        for _ in 0..500 {
            let e = random_expr(&mut r, 4);
            err.push(if parse(&e.to_string()).as_ref() == Ok(&e) { 0.0 } else { 1.0 });
        }
        Ok(err.0)
    });

    s.check("order-0 jet evaluation equals scalar evaluation (bitwise)", 0.0, || {
        let mut r = rng(42);
        let mut err = MaxErr::default();
        for _ in 0..500 {
            let e = random_expr(&mut r, 4);
            let x = r.gen_range(-3.0..3.0);
            err.push(match (e.eval_f64(x), e.eval(&Jet::constant(x, 0))) {
                (Ok(a), Ok(b)) if a.is_nan() && b.value().is_nan() => 0.0,
                (Ok(a), Ok(b)) => bitwise_gap(a, b.value()),
                (Err(_), Err(_)) => 0.0,
                _ => 1.0,
            });
        }
        Ok(err.0)
    });

    s.check("corpus: m! c_m = finite difference (m <= 3, relative)", 1e-5, || {
        let mut err = MaxErr::default();
        for (text, x) in EXPRESSION_CORPUS {
            let e = parse(text)?;
            let derivs = e.derivatives_at(x, 3)?;
            for (m, d) in derivs.iter().enumerate().skip(1) {
                let fd = finite_difference(|t| e.eval_f64(t).unwrap_or(f64::NAN), x, m, None)?;
                err.rel(fd, *d, d.abs());
            }
        }
        Ok(err.0)
    });

    s.check("documented examples", 0.0, || {
        let mut err = MaxErr::default();
        let e = parse("exp(-x^2)")?;
        let expected = Expr::unary(
            UnaryOp::Exp,
            Expr::unary(UnaryOp::Neg, Expr::binary(BinaryOp::Pow, Expr::Var, Expr::Literal(2.0))),
        );
        err.push(if e == expected { 0.0 } else { 1.0 });
        let c = e.eval(&Jet::variable(1.0, 1.0, 2))?;
        let inv_e = (-1.0f64).exp();
        for (got, want) in c.coeffs().iter().zip([inv_e, -2.0 * inv_e, inv_e]) {
            err.push((got - want).abs() / inv_e);
        }
        err.push((parse("2+3*x")?.eval_f64(4.0)? - 14.0).abs());
        let offset = match parse("exp(-x^2") {
            Err(Error::Syntax { offset, .. }) => offset,
            _ => usize::MAX,
        };
        err.push(if offset == 8 { 0.0 } else { 1.0 });
        err.push(if matches!(parse("ln(x)")?.eval_f64(-1.0), Err(Error::DomainError { .. })) { 0.0 } else { 1.0 });
        Ok(err.0)
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn only_filters_to_one_module() {
        let report = run(&VerifyOptions {
            only: Some("jet_core".into()),
            mutation: None,
        })
        .unwrap();
        assert!(!report.checks.is_empty());
        assert!(report.checks.iter().all(|c| c.module == "jet_core"));
        assert!(run(&VerifyOptions {
            only: Some("nope".into()),
            mutation: None,
        })
        .is_err());
    }

    #[test]
    fn heat_sign_mutation_is_detected() {
        let opts = VerifyOptions {
            only: Some("evolution".into()),
            mutation: Some(Mutation::HeatSign),
        };
        let report = run(&opts).unwrap();
        assert!(!report.passed());
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed()).map(|c| c.property).collect();
        assert!(failed.iter().any(|p| p.contains("compact Hermite")), "{failed:?}");
    }
}
