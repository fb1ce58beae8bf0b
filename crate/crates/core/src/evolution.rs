//! Closed-form evolution of dual-Gaussian initial data.
//!
//! * Heat equation `∂_τ F = ∂_x² F`, `F(x,0) = exp(-ẑx²)`.
//! * Free Schrödinger equation `i∂_τ Ψ = -∂_x² Ψ` for flattened beams
//!   `Y(x;α|m) = e^{-αx²} e_m(x²)`, which are `exp(-ẑx²)` with `ẑ = α - ε`.
//! * The advection-type problem `∂_τ F = (γ∂_x - ẑx) F` solved by
//!   disentangling the exponential.
//!
//! In every case the closed form is evaluated with `ẑ` a jet and projected at
//! the end. Expanded Hermite-series forms are provided as cross-checks.

use num_complex::Complex64;

use crate::jet::Jet;
use crate::oracles::{integrate, Domain, QuadratureSpec};
use crate::scalar::Ring;
use crate::specfun::{factorial, hermite, trunc_exp};
use crate::{Error, Result};

/// Sign of `b/γ²` in the expanded heat series. Fixed by agreement with the
/// jet evaluation; the alternating form is the correct one.
pub const HEAT_SERIES_SIGN: f64 = -1.0;

/// `γ(c, τ) = 1 + 4cτ`.
pub fn gamma_factor(c: f64, tau: f64) -> f64 {
    1.0 + 4.0 * c * tau
}

fn real_branch(a: f64, tau: f64) -> Result<f64> {
    let g = gamma_factor(a, tau);
    if !(g > 0.0) {
        return Err(Error::BranchViolation(g));
    }
    Ok(g)
}

/// Heat semigroup applied to a Gaussian:
/// `(1+4τα)^{-1/2} exp(-αx²/(1+4τα))`.
pub fn glaisher(alpha: f64, x: f64, tau: f64) -> Result<f64> {
    let g = real_branch(alpha, tau)?;
    Ok((-alpha * x * x / g).exp() / g.sqrt())
}

/// Un-projected heat solution `(1+4τẑ)^{-1/2} exp(-ẑx²/(1+4τẑ))` with
/// `ẑ = a + εb` at order `k`.
pub fn heat_dual_gaussian_jet(a: f64, b: f64, x: f64, tau: f64, k: usize) -> Result<Jet> {
    real_branch(a, tau)?;
    let z = Jet::variable(a, b, k);
    let g = &Jet::unit(k) + &z.scale(4.0 * tau);
    let amplitude = g.powf(-0.5)?;
    let phase = z.scale(-x * x).div(&g)?.exp();
    Ok(&amplitude * &phase)
}

/// Heat solution with initial data `e^{-ax²} e_k(-bx²)`.
pub fn heat_dual_gaussian(a: f64, b: f64, x: f64, tau: f64, k: usize) -> Result<f64> {
    Ok(heat_dual_gaussian_jet(a, b, x, tau, k)?.dneq())
}

/// Expanded form
/// `(e^{-ax²/γ}/√γ) Σ_{n≤k} (σ b/γ²)^n H_{2n}(x, τγ)/n!`, term by term,
/// with an explicit sign `σ`. [`heat_compact_series`] uses
/// [`HEAT_SERIES_SIGN`]; other signs exist for mutation testing.
pub fn heat_compact_series_signed(a: f64, b: f64, x: f64, tau: f64, k: usize, sign: f64) -> Result<Vec<f64>> {
    let g = real_branch(a, tau)?;
    let pre = (-a * x * x / g).exp() / g.sqrt();
    let lambda = sign * b / (g * g);
    (0..=k)
        .map(|n| Ok(pre * lambda.powi(n as i32) * hermite(2 * n, &x, &(tau * g))? / factorial(n)))
        .collect()
}

pub fn heat_compact_series(a: f64, b: f64, x: f64, tau: f64, k: usize) -> Result<Vec<f64>> {
    heat_compact_series_signed(a, b, x, tau, k, HEAT_SERIES_SIGN)
}

/// The second-order expansion written out literally:
/// `(e^{-ax²/γ}/√γ) [1, -b H_2(x,τγ)/γ², b² H_4(x,τγ)/(2γ⁴)]`.
pub fn heat_second_order_terms(a: f64, b: f64, x: f64, tau: f64) -> Result<[f64; 3]> {
    let g = real_branch(a, tau)?;
    let pre = (-a * x * x / g).exp() / g.sqrt();
    let y = tau * g;
    let h2 = x * x + 2.0 * y;
    let h4 = x.powi(4) + 12.0 * x * x * y + 12.0 * y * y;
    Ok([pre, -pre * b / (g * g) * h2, pre * b * b / (2.0 * g.powi(4)) * h4])
}

/// Heat-type solution for fixed `(a, b, k, τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatSolution {
    pub a: f64,
    pub b: f64,
    pub k: usize,
    pub tau: f64,
}

impl HeatSolution {
    /// Negative `τ` is accepted while `1 + 4τa > 0`; the closed form is then
    /// the backward solution.
    pub fn new(a: f64, b: f64, k: usize, tau: f64) -> Result<Self> {
        if tau.is_nan() {
            return Err(Error::InvalidArgument("time is NaN".into()));
        }
        real_branch(a, tau)?;
        Ok(Self { a, b, k, tau })
    }

    pub fn eval(&self, x: f64) -> f64 {
        heat_dual_gaussian(self.a, self.b, x, self.tau, self.k).expect("branch checked at construction")
    }

    /// `e^{-ax²} e_k(-bx²)`.
    pub fn initial(&self, x: f64) -> f64 {
        (-self.a * x * x).exp() * trunc_exp(self.k, -self.b * x * x)
    }
}

fn positive_width(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(Error::NonpositiveWidth(alpha));
    }
    Ok(())
}

/// Flattened profile `Y(x;α|m) = e^{-αx²} e_m(x²)`.
pub fn flattened_profile(x: f64, alpha: f64, m: usize) -> Result<f64> {
    positive_width(alpha)?;
    Ok((-alpha * x * x).exp() * trunc_exp(m, x * x))
}

/// `Y(x;α|m)` as the projection of `exp(-ẑ(α,-1) x²)`.
pub fn flattened_profile_dual(x: f64, alpha: f64, m: usize) -> Result<f64> {
    positive_width(alpha)?;
    Ok(Jet::variable(alpha, -1.0, m).scale(-x * x).exp().dneq())
}

/// Flat-top `exp(-|x|^p)`, `p ≥ 1`.
pub fn super_gaussian(x: f64, p: u32) -> f64 {
    (-x.abs().powi(p as i32)).exp()
}

/// Un-projected `Ψ = (1+4iτẑ)^{-1/2} exp(-ẑx²/(1+4iτẑ))`, `ẑ = α - ε`, order `m`.
///
/// The radicand's leading term `1 + 4iτα` has real part 1, so the principal
/// branch is continuous in `τ`.
pub fn schrodinger_flattened_jet(x: f64, tau: f64, alpha: f64, m: usize) -> Result<Jet<Complex64>> {
    positive_width(alpha)?;
    let z = Jet::variable(alpha, -1.0, m).to_complex();
    let g = &Jet::unit(m) + &z.scale_by(Complex64::new(0.0, 4.0 * tau));
    let amplitude = g.powf(-0.5)?;
    let phase = z.scale(-x * x).div(&g)?.exp();
    Ok(&amplitude * &phase)
}

/// Paraxial evolution of the flattened beam `Y(x;α|m)`.
pub fn schrodinger_flattened(x: f64, tau: f64, alpha: f64, m: usize) -> Result<Complex64> {
    Ok(schrodinger_flattened_jet(x, tau, alpha, m)?.dneq())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSolution {
    pub alpha: f64,
    pub m: usize,
    pub tau: f64,
}

impl BeamSolution {
    pub fn new(alpha: f64, m: usize, tau: f64) -> Result<Self> {
        positive_width(alpha)?;
        Ok(Self { alpha, m, tau })
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        schrodinger_flattened(x, self.tau, self.alpha, self.m).expect("width checked at construction")
    }

    /// Decay rate of `|Ψ|²`: `2 Re(α/(1+4iτα)) = 2α/(1+16τ²α²)`.
    pub fn intensity_decay_rate(&self) -> f64 {
        let (a, t) = (self.alpha, self.tau);
        2.0 * a / (1.0 + 16.0 * t * t * a * a)
    }

    /// `∫|Ψ(x,τ)|² dx` by adaptive quadrature. The window is set by half the
    /// intensity decay rate to leave room for the polynomial factor.
    pub fn norm(&self, abs_tol: f64) -> Result<f64> {
        let spec = QuadratureSpec::new(Domain::GaussianTails {
            center: 0.0,
            rate: 0.5 * self.intensity_decay_rate(),
        })
        .with_tol(abs_tol);
        integrate(|x| self.eval(x).norm_sqr(), &spec)
    }
}

/// Un-projected solution of `∂_τ F = (γ∂_x - ẑx) F`, `F(x,0) = f(x)`:
/// `exp(-τ²γẑ/2) exp(-ẑxτ) f(x + γτ)`.
pub fn weyl_evolve_jet<F>(f: F, gamma: f64, a: f64, b: f64, x: f64, tau: f64, k: usize) -> Result<Jet>
where
    F: Fn(f64) -> Result<f64>,
{
    let z = Jet::variable(a, b, k);
    let advected = f(x + gamma * tau)?;
    let envelope = z.scale(-(0.5 * tau * tau * gamma + x * tau)).exp();
    Ok(envelope.scale(advected))
}

pub fn weyl_evolve<F>(f: F, gamma: f64, a: f64, b: f64, x: f64, tau: f64, k: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(weyl_evolve_jet(f, gamma, a, b, x, tau, k)?.dneq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::heat_convolve;
    use approx::assert_relative_eq;

    #[test]
    fn glaisher_cases() {
        assert_eq!(glaisher(0.7, 1.3, 0.0).unwrap(), (-0.7f64 * 1.69).exp());
        assert_eq!(glaisher(0.0, 3.0, 0.4).unwrap(), 1.0);
        assert!(matches!(glaisher(1.0, 0.0, -0.3), Err(Error::BranchViolation(_))));
        let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: 0.5 });
        let conv = heat_convolve(|s| (-0.5 * s * s).exp(), 0.8, 0.2, &spec).unwrap();
        assert!((glaisher(0.5, 0.8, 0.2).unwrap() - conv).abs() < 1e-8);
    }

    #[test]
    fn heat_degenerations() {
        let (a, b, x): (f64, f64, f64) = (1.2, 0.3, 0.7);
        for k in 0..5 {
            let init = (-a * x * x).exp() * trunc_exp(k, -b * x * x);
            assert_relative_eq!(heat_dual_gaussian(a, b, x, 0.0, k).unwrap(), init, max_relative = 1e-13);
        }
        assert_relative_eq!(
            heat_dual_gaussian(a, 0.0, x, 0.3, 3).unwrap(),
            glaisher(a, x, 0.3).unwrap(),
            max_relative = 1e-14
        );
        assert!(matches!(heat_dual_gaussian(1.0, 0.2, 0.0, -0.3, 2), Err(Error::BranchViolation(_))));
    }

    #[test]
    fn heat_second_order_matches_jet_termwise() {
        let (a, b, x, tau) = (1.0, 0.2, 0.5, 0.1);
        let jet = heat_dual_gaussian_jet(a, b, x, tau, 2).unwrap();
        let lit = heat_second_order_terms(a, b, x, tau).unwrap();
        let compact = heat_compact_series(a, b, x, tau, 2).unwrap();
        for i in 0..3 {
            assert!((jet.coeff(i) - lit[i]).abs() <= 1e-11, "term {i}");
            assert!((compact[i] - lit[i]).abs() <= 1e-11, "term {i}");
        }
        let flipped: f64 = heat_compact_series_signed(a, b, x, tau, 2, 1.0).unwrap().iter().sum();
        assert!((flipped - jet.dneq()).abs() > 1e-3);
    }

    #[test]
    fn heat_solution_type() {
        let s = HeatSolution::new(0.8, 0.25, 3, 0.0).unwrap();
        for x in [-1.0, 0.0, 0.6] {
            assert!((s.eval(x) - s.initial(x)).abs() <= 1e-13);
        }
        assert!(HeatSolution::new(1.0, 0.0, 1, -0.5).is_err());
    }

    #[test]
    fn flattened_profiles() {
        assert_relative_eq!(flattened_profile(0.9, 0.6, 0).unwrap(), (-0.6f64 * 0.81).exp());
        assert_eq!(flattened_profile(0.0, 0.6, 5).unwrap(), 1.0);
        let d = flattened_profile_dual(1.2, 0.6, 4).unwrap();
        let p = flattened_profile(1.2, 0.6, 4).unwrap();
        assert!((d - p).abs() <= 1e-13);
        assert!(matches!(flattened_profile(1.0, 0.0, 2), Err(Error::NonpositiveWidth(_))));
    }

    #[test]
    fn super_gaussians() {
        for x in [-1.3, 0.2, 2.0] {
            assert_eq!(super_gaussian(x, 2), (-x * x).exp());
        }
        for p in 1..9 {
            assert_eq!(super_gaussian(0.0, p), 1.0);
            assert_eq!(super_gaussian(1.0, p), (-1.0f64).exp());
        }
    }

    #[test]
    fn schrodinger_initial_and_scalar_cases() {
        for x in [-2.0, -0.3, 0.0, 1.1] {
            let psi = schrodinger_flattened(x, 0.0, 1.0, 2).unwrap();
            assert!((psi.re - flattened_profile(x, 1.0, 2).unwrap()).abs() <= 1e-13);
            assert!(psi.im.abs() < 1e-14);
            let (tau, alpha) = (0.3, 0.9);
            let g = Complex64::new(1.0, 4.0 * tau * alpha);
            let gauss = (-alpha * x * x / g).exp() / g.sqrt();
            let psi0 = schrodinger_flattened(x, tau, alpha, 0).unwrap();
            assert!((psi0 - gauss).norm() <= 1e-14);
        }
    }

    #[test]
    fn beam_norm_is_conserved() {
        let norms: Vec<f64> = [0.0, 0.1, 0.5]
            .iter()
            .map(|&t| BeamSolution::new(1.0, 2, t).unwrap().norm(1e-11).unwrap())
            .collect();
        for n in &norms[1..] {
            assert!((n - norms[0]).abs() <= 1e-6 * norms[0], "{norms:?}");
        }
    }

    #[test]
    fn weyl_degenerations() {
        let f = |s: f64| Ok((-s * s).exp());
        for x in [-1.0, 0.2, 0.9] {
            assert_eq!(weyl_evolve(f, 1.0, 0.5, 0.2, x, 0.0, 2).unwrap(), (-x * x).exp());
            assert_eq!(weyl_evolve(f, 1.3, 0.0, 0.0, x, 0.4, 3).unwrap(), f(x + 1.3 * 0.4).unwrap());
        }
    }
}
