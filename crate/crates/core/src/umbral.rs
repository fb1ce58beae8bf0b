//! Closed forms for integrals containing the dual parameter `ẑ = a + εb`.
//!
//! Each integral is evaluated as if `ẑ` were an ordinary number and projected
//! at order `k` afterwards, so every result is a finite sum. The per-power
//! contributions are kept in [`DualIntegralResult::series_terms`].

use std::f64::consts::PI;

use crate::jet::Jet;
use crate::specfun::{binomial, factorial, gamma, hermite, recip_gamma};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DualIntegralResult {
    /// Projected value (sum of `series_terms`).
    pub value: f64,
    pub order: usize,
    /// Contribution of `ε^r` for `r = 0..=order`.
    pub series_terms: Vec<f64>,
}

impl DualIntegralResult {
    fn from_terms(series_terms: Vec<f64>) -> Self {
        let value = series_terms.iter().sum();
        Self {
            value,
            order: series_terms.len() - 1,
            series_terms,
        }
    }

    /// Magnitude of the highest retained term. Large values flag parameter
    /// regimes (e.g. `|b/a| ≥ 1`) where the truncation is far from any
    /// convergent limit; nothing is rejected on this basis.
    pub fn last_term_magnitude(&self) -> f64 {
        self.series_terms.last().map_or(0.0, |t| t.abs())
    }
}

fn positive(width: f64) -> Result<()> {
    if !(width > 0.0) {
        return Err(Error::NonpositiveWidth(width));
    }
    Ok(())
}

/// `∫ exp(-αx² + ẑx) dx = √(π/α) e^{a²/4α} Σ_{r≤k} H_r(ab/2α, b²/4α)/r!`.
pub fn dual_shifted_gaussian_integral(alpha: f64, a: f64, b: f64, k: usize) -> Result<DualIntegralResult> {
    positive(alpha)?;
    let pre = (PI / alpha).sqrt() * (a * a / (4.0 * alpha)).exp();
    let (hx, hy) = (a * b / (2.0 * alpha), b * b / (4.0 * alpha));
    let terms = (0..=k)
        .map(|r| Ok(pre * hermite(r, &hx, &hy)? / factorial(r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DualIntegralResult::from_terms(terms))
}

/// `∫ exp(-ẑx²) dx = √(π/ẑ) ≐ √(π/a) Σ_{r≤k} C(-1/2, r) (b/a)^r`.
pub fn dual_gaussian_integral(a: f64, b: f64, k: usize) -> Result<DualIntegralResult> {
    positive(a)?;
    let pre = (PI / a).sqrt();
    let ratio = b / a;
    let terms = (0..=k)
        .map(|r| pre * binomial(-0.5, r) * ratio.powi(r as i32))
        .collect();
    Ok(DualIntegralResult::from_terms(terms))
}

/// [`dual_gaussian_integral`] computed as `√π · ẑ^{-1/2}` in jet arithmetic.
pub fn dual_gaussian_integral_jet(a: f64, b: f64, k: usize) -> Result<DualIntegralResult> {
    positive(a)?;
    let root = Jet::variable(a, b, k).powf(-0.5)?;
    let terms = root.coeffs().iter().map(|c| c * PI.sqrt()).collect();
    Ok(DualIntegralResult::from_terms(terms))
}

/// Truncated expansion of `Φ(x) = 1/(1 + ẑx²)`:
/// `(1/(1+ax²)) Σ_{r≤k} (-bx²/(1+ax²))^r`.
pub fn phi_expansion(x: f64, a: f64, b: f64, k: usize) -> Result<f64> {
    let d = 1.0 + a * x * x;
    if d.abs() <= crate::jet::SINGULARITY_TOLERANCE {
        return Err(Error::SingularDenominator(x));
    }
    let q = -b * x * x / d;
    let mut term = 1.0 / d;
    let mut sum = 0.0;
    for _ in 0..=k {
        sum += term;
        term *= q;
    }
    Ok(sum)
}

/// `∫ dx/(1 + ẑx²) = π ẑ^{-1/2}`, projected at order `k`.
pub fn phi_integral(a: f64, b: f64, k: usize) -> Result<DualIntegralResult> {
    positive(a)?;
    let root = Jet::variable(a, b, k).powf(-0.5)?;
    let terms = root.coeffs().iter().map(|c| c * PI).collect();
    Ok(DualIntegralResult::from_terms(terms))
}

/// Formal integration `Î(v^α) = 1/Γ(α)`; zero at the poles of Γ.
pub fn formal_integration(alpha: f64) -> f64 {
    recip_gamma(alpha)
}

/// `1/Γ(1/2 - r)` through the reflection identity
/// `Γ(1/2 - r) = (-1)^r π / Γ(1/2 + r)`.
pub fn recip_gamma_half_minus(r: usize) -> f64 {
    let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * gamma(0.5 + r as f64) / PI
}

/// `Î[∫ v Φ(x; a, vb) dx] ≐ √(π/a) Σ_{r≤k} (b/a)^r / (Γ(1/2 - r) (r!)²)`.
pub fn umbral_image_integral(a: f64, b: f64, k: usize) -> Result<DualIntegralResult> {
    positive(a)?;
    let pre = (PI / a).sqrt();
    let ratio = b / a;
    let terms = (0..=k)
        .map(|r| {
            let rf = factorial(r);
            pre * ratio.powi(r as i32) * recip_gamma_half_minus(r) / (rf * rf)
        })
        .collect();
    Ok(DualIntegralResult::from_terms(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{integrate, Domain, QuadratureSpec};
    use crate::specfun::trunc_exp;
    use approx::assert_relative_eq;

    fn sqrt_pi() -> f64 {
        PI.sqrt()
    }

    #[test]
    fn shifted_gaussian() {
        for k in [0, 1, 4] {
            let r = dual_shifted_gaussian_integral(1.5, 0.7, 0.0, k).unwrap();
            assert_relative_eq!(r.value, (PI / 1.5).sqrt() * (0.49f64 / 6.0).exp(), max_relative = 1e-15);
        }
        let r = dual_shifted_gaussian_integral(1.0, 0.0, 1.0, 1).unwrap();
        assert_relative_eq!(r.value, sqrt_pi(), max_relative = 1e-15);
        assert_eq!(r.series_terms[1], 0.0);

        let (alpha, a, b, k) = (1.0, 0.5, 0.3, 3);
        let spec = QuadratureSpec::new(Domain::GaussianTails { center: a / (2.0 * alpha), rate: alpha });
        let quad = integrate(|x| (-alpha * x * x + a * x).exp() * trunc_exp(k, b * x), &spec).unwrap();
        let r = dual_shifted_gaussian_integral(alpha, a, b, k).unwrap();
        assert_relative_eq!(r.value, quad, max_relative = 1e-8);
        assert!(matches!(dual_shifted_gaussian_integral(0.0, 1.0, 1.0, 1), Err(Error::NonpositiveWidth(_))));
    }

    #[test]
    fn dual_gaussian() {
        assert_relative_eq!(dual_gaussian_integral(2.0, 0.0, 5).unwrap().value, (PI / 2.0).sqrt());
        let r = dual_gaussian_integral(1.0, 1.0, 2).unwrap();
        assert!((r.value - 0.875 * sqrt_pi()).abs() <= 1e-12);
        let spec = QuadratureSpec::new(Domain::GaussianTails { center: 0.0, rate: 1.0 });
        let quad = integrate(|x| (-x * x).exp() * trunc_exp(2, -x * x), &spec).unwrap();
        assert!((quad - r.value).abs() <= 1e-8);
        for k in 0..=10 {
            let a = dual_gaussian_integral(0.8, -0.3, k).unwrap();
            let j = dual_gaussian_integral_jet(0.8, -0.3, k).unwrap();
            assert!((a.value - j.value).abs() <= 1e-13 * a.value.abs());
        }
        assert!(dual_gaussian_integral(-1.0, 0.0, 1).is_err());
    }

    #[test]
    fn series_terms_sum_to_value() {
        let r = dual_shifted_gaussian_integral(0.5, 0.5, 0.3, 5).unwrap();
        let s: f64 = r.series_terms.iter().sum();
        assert!((s - r.value).abs() <= 1e-14 * r.value.abs());
        assert_eq!(r.order, 5);
        let big = dual_gaussian_integral(1.0, 3.0, 6).unwrap();
        assert!(big.last_term_magnitude() > 1.0);
    }

    #[test]
    fn rational_expansion() {
        assert_relative_eq!(phi_expansion(0.4, 2.0, 0.0, 3).unwrap(), 1.0 / 1.32);
        assert_relative_eq!(phi_expansion(0.4, 2.0, 5.0, 0).unwrap(), 1.0 / 1.32);
        let (x, a, b, k) = (0.5, 1.0, 0.4, 3);
        let jet = Jet::variable(1.0 + a * x * x, b * x * x, k).inv().unwrap().dneq();
        assert!((phi_expansion(x, a, b, k).unwrap() - jet).abs() <= 1e-13);
        assert_eq!(phi_expansion(1.0, -1.0, 0.3, 2), Err(Error::SingularDenominator(1.0)));
    }

    #[test]
    fn rational_integral() {
        assert_relative_eq!(phi_integral(4.0, 0.0, 3).unwrap().value, PI / 2.0);
        assert_relative_eq!(phi_integral(4.0, 9.0, 0).unwrap().value, PI / 2.0);
        let (a, b, k) = (1.0, 0.3, 2);
        let quad = integrate(|x| phi_expansion(x, a, b, k).unwrap(), &QuadratureSpec::new(Domain::AlgebraicTails)).unwrap();
        assert!((quad - phi_integral(a, b, k).unwrap().value).abs() <= 1e-6);
    }

    #[test]
    fn formal_integration_values() {
        assert_relative_eq!(formal_integration(0.5), 1.0 / sqrt_pi(), max_relative = 1e-14);
        assert_relative_eq!(formal_integration(1.0), 1.0, max_relative = 1e-14);
        assert_eq!(formal_integration(0.0), 0.0);
        assert_eq!(formal_integration(-2.0), 0.0);
    }

    #[test]
    fn umbral_image() {
        let a = 2.5;
        assert_relative_eq!(umbral_image_integral(a, 0.7, 0).unwrap().value, (1.0 / a).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(umbral_image_integral(a, 0.0, 6).unwrap().value, (1.0 / a).sqrt(), max_relative = 1e-14);
        // 1/Γ(-1/2) = -1/(2√π); times √π gives -1/2
        let r = umbral_image_integral(1.0, 1.0, 1).unwrap();
        assert_relative_eq!(r.series_terms[1], -0.5, max_relative = 1e-14);
        for r in 0..=12 {
            let direct = 1.0 / gamma(0.5 - r as f64);
            assert_relative_eq!(recip_gamma_half_minus(r), direct, max_relative = 1e-12);
        }
    }
}
