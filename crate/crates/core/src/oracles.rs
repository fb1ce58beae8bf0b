//! Independent numerical ground truth: finite differences, adaptive Simpson
//! quadrature and heat-kernel convolution.
//!
//! Nothing in here touches jet arithmetic, so these routines can check the
//! closed forms elsewhere in the crate.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::{Error, Result};

/// `ln(1e18)`: Gaussian tails are cut where the envelope drops below 1e-18.
const GAUSSIAN_CUTOFF: f64 = 41.446_531_673_892_82;

/// Integration domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Finite interval `[lo, hi]`.
    Interval(f64, f64),
    /// The real line for an integrand bounded by `C·exp(-rate (x-center)²)`;
    /// truncated where that envelope falls below 1e-18 of its peak.
    GaussianTails { center: f64, rate: f64 },
    /// The real line for an integrand decaying at least like `1/x²`; mapped to
    /// `(-π/2, π/2)` by `x = tan u`.
    AlgebraicTails,
}

impl Domain {
    /// Finite window carrying the mass of a Gaussian-tailed integrand.
    pub fn gaussian_window(center: f64, rate: f64) -> (f64, f64) {
        let w = (GAUSSIAN_CUTOFF / rate).sqrt();
        (center - w, center + w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub max_depth: usize,
    pub domain: Domain,
}

impl QuadratureSpec {
    pub fn new(domain: Domain) -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
            domain,
        }
    }

    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Uniformly sampled profile `values[i] ≈ f(x0 + i·dx)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T = f64> {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<T>,
}

impl<T> GridFunction<T> {
    pub fn new(x0: f64, dx: f64, values: Vec<T>) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::InvalidArgument(format!("grid spacing {dx} must be positive")));
        }
        if values.is_empty() {
            return Err(Error::InvalidArgument("grid has no samples".into()));
        }
        Ok(Self { x0, dx, values })
    }

    /// Samples `n ≥ 2` points spanning `[lo, hi]` inclusive.
    pub fn sample(lo: f64, hi: f64, n: usize, f: impl FnMut(f64) -> T) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "grid {lo}:{hi}:{n} needs n >= 2 and hi > lo"
            )));
        }
        let dx = (hi - lo) / (n - 1) as f64;
        let values = grid_points(lo, hi, n).map(f).collect();
        Self::new(lo, dx, values)
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, &T)> + '_ {
        self.values.iter().enumerate().map(|(i, v)| (self.x(i), v))
    }
}

/// `n` evenly spaced points from `lo` to `hi`, endpoints exact.
pub fn grid_points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n && n > 1 { hi } else { lo + i as f64 * step })
}

/// Step balancing truncation and round-off: `ε^{1/(m+2)} · max(1, |x|)`.
pub fn default_step(m: usize, x: f64) -> f64 {
    f64::EPSILON.powf(1.0 / (m as f64 + 2.0)) * x.abs().max(1.0)
}

/// Second-order central difference for the `m`-th derivative, `m ∈ 1..=4`.
pub fn finite_difference(f: impl Fn(f64) -> f64, x: f64, m: usize, h: Option<f64>) -> Result<f64> {
    if !(1..=4).contains(&m) {
        return Err(Error::UnsupportedOrder(m));
    }
    let h = h.unwrap_or_else(|| default_step(m, x));
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step {h} must be positive")));
    }
    let d = match m {
        1 => (f(x + h) - f(x - h)) / (2.0 * h),
        2 => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
        3 => (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) / (2.0 * h * h * h),
        _ => {
            (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h))
                / (h * h * h * h)
        }
    };
    Ok(d)
}

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: usize,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(&self, a: f64, fa: f64, m: f64, fm: f64, b: f64, fb: f64, whole: f64, tol: f64, depth: usize) -> Result<f64> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let (flm, frm) = ((self.f)(lm), (self.f)(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if delta.abs() <= 15.0 * tol.max(floor) {
            return Ok(left + right + delta / 15.0);
        }
        if depth >= self.max_depth {
            return Err(Error::MaxDepthExceeded(self.max_depth));
        }
        let l = self.recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1)?;
        let r = self.recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1)?;
        Ok(l + r)
    }
}

const INITIAL_PANELS: usize = 16;

fn adaptive_simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64, max_depth: usize) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let s = Simpson { f, max_depth };
    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut total = 0.0;
    for p in 0..INITIAL_PANELS {
        let a = lo + p as f64 * width;
        let b = if p + 1 == INITIAL_PANELS { hi } else { a + width };
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += s.recurse(a, fa, m, fm, b, fb, whole, tol / INITIAL_PANELS as f64, 0)?;
    }
    Ok(total)
}

/// Adaptive composite Simpson to `spec.abs_tol`.
pub fn integrate(f: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(spec.abs_tol > 0.0) {
        return Err(Error::InvalidArgument("abs_tol must be positive".into()));
    }
    match spec.domain {
        Domain::Interval(lo, hi) => {
            if hi < lo {
                return Ok(-adaptive_simpson(&f, hi, lo, spec.abs_tol, spec.max_depth)?);
            }
            adaptive_simpson(&f, lo, hi, spec.abs_tol, spec.max_depth)
        }
        Domain::GaussianTails { center, rate } => {
            if !(rate > 0.0) {
                return Err(Error::NonpositiveWidth(rate));
            }
            let (lo, hi) = Domain::gaussian_window(center, rate);
            adaptive_simpson(&f, lo, hi, spec.abs_tol, spec.max_depth)
        }
        Domain::AlgebraicTails => {
            // the integrand tends to a finite limit at ±π/2; sample just inside
            let edge = FRAC_PI_2 - 1e-8;
            let g = |u: f64| {
                let u = u.clamp(-edge, edge);
                let c = u.cos();
                f(u.tan()) / (c * c)
            };
            adaptive_simpson(&g, -FRAC_PI_2, FRAC_PI_2, spec.abs_tol, spec.max_depth)
        }
    }
}

/// `(4πτ)^{-1/2} ∫ exp(-(x-s)²/4τ) f0(s) ds`.
///
/// The kernel is cut at `|s - x| ≤ 8√(2τ)`; `spec.domain` describes where `f0`
/// lives (an interval or a Gaussian envelope) and the two windows are
/// intersected. `AlgebraicTails` means "no decay information".
pub fn heat_convolve(f0: impl Fn(f64) -> f64, x: f64, tau: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("diffusion time {tau} must be positive")));
    }
    let reach = 8.0 * (2.0 * tau).sqrt();
    let (mut lo, mut hi) = (x - reach, x + reach);
    match spec.domain {
        Domain::Interval(a, b) => {
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        Domain::GaussianTails { center, rate } => {
            if !(rate > 0.0) {
                return Err(Error::NonpositiveWidth(rate));
            }
            let (a, b) = Domain::gaussian_window(center, rate);
            lo = lo.max(a);
            hi = hi.min(b);
        }
        Domain::AlgebraicTails => {}
    }
    let norm = 1.0 / (4.0 * PI * tau).sqrt();
    let kernel = |s: f64| {
        let d = x - s;
        norm * (-d * d / (4.0 * tau)).exp() * f0(s)
    };
    let inner = QuadratureSpec {
        domain: Domain::Interval(lo, hi),
        ..*spec
    };
    integrate(kernel, &inner)
}
