//! Truncated exponentials, two-variable Hermite polynomials and relatives.
//!
//! `H_n(x, y) = n! Σ_{r ≤ n/2} x^{n-2r} y^r / ((n-2r)! r!)` is evaluated over
//! any [`Ring`], so passing a jet `a + εb` for `y` gives the modified
//! polynomials `H_n(x, a + εb)` with no extra code.

use num_complex::Complex64;

use crate::jet::Jet;
use crate::scalar::Ring;
use crate::{Error, Result};

/// Largest Hermite degree accepted by the public evaluators.
pub const MAX_DEGREE: usize = 64;

/// `n!` as a double, by iterative product.
pub fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Generalized binomial coefficient `C(α, r) = α(α-1)…(α-r+1)/r!`.
pub fn binomial(alpha: f64, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, j| acc * (alpha - j as f64) / (j + 1) as f64)
}

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: MAX_DEGREE,
        });
    }
    Ok(())
}

/// Truncated exponential `e_n(x) = Σ_{r≤n} x^r/r!`, summed in ascending `r`
/// with Neumaier compensation.
pub fn trunc_exp(n: usize, x: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    for r in 0..=n {
        if r > 0 {
            term *= x / r as f64;
        }
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `scale · H_n(x, y)` with the coefficients built by the ratio recurrence
/// `c_{r+1} = c_r (n-2r)(n-2r-1)/(r+1)`, so no factorial is ever formed.
fn hermite_scaled<R: Ring>(n: usize, x: &R, y: &R, scale: f64) -> R {
    let half = n / 2;
    let mut xp = Vec::with_capacity(n + 1);
    xp.push(R::one());
    for i in 1..=n {
        xp.push(if i == 1 { x.clone() } else { xp[i - 1].clone() * x.clone() });
    }
    let mut acc = xp[n].scale(scale);
    let mut yp = R::one();
    let mut coef = scale;
    for r in 0..half {
        coef *= ((n - 2 * r) * (n - 2 * r - 1)) as f64 / (r + 1) as f64;
        yp = if r == 0 { y.clone() } else { yp * y.clone() };
        acc = acc + (xp[n - 2 * (r + 1)].clone() * yp.clone()).scale(coef);
    }
    acc
}

/// Two-variable Hermite polynomial `H_n(x, y)` over any ring.
pub fn hermite<R: Ring>(n: usize, x: &R, y: &R) -> Result<R> {
    check_degree(n)?;
    Ok(hermite_scaled(n, x, y, 1.0))
}

/// Derivatives of `1/(1+x²)` up to `count - 1`, from
/// `d^m/dx^m (1+x²)^{-1} = (-1)^m m! Im (x-i)^{-(m+1)}`.
pub fn lorentzian_derivatives(x: f64, count: usize) -> Result<Vec<f64>> {
    let r = Complex64::new(x, -1.0).inv();
    let mut p = r;
    let mut out = Vec::with_capacity(count);
    for m in 0..count {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * factorial(m) * p.im);
        p *= r;
    }
    Ok(out)
}

/// Partial sum `Σ_{n≤N} t^n H_n(x,y)/n!` of the generating function
/// `exp(xt + yt²)`.
pub fn hermite_egf_partial(t: f64, x: f64, y: f64, terms: usize) -> f64 {
    let mut tn = 1.0;
    let mut sum = 0.0;
    for n in 0..=terms {
        if n > 0 {
            tn *= t / n as f64;
        }
        if tn == 0.0 {
            break;
        }
        sum += hermite_scaled(n, &x, &y, tn);
    }
    sum
}

/// Hermite-based truncated exponential `Σ_{r≤k} H_r(x,y)/r!`.
pub fn hermite_trunc_exp(k: usize, x: f64, y: f64) -> f64 {
    (0..=k)
        .map(|r| hermite_scaled(r, &x, &y, 1.0 / factorial(r)))
        .sum()
}

/// `Σ_{n≤N} λ^n H_{2n}(x,y)/n!`.
///
/// With `λ = -α`, `y = τ` this converges to the Glaisher form
/// `(1+4τα)^{-1/2} exp(-αx²/(1+4τα))` when `|4λy| < 1`. Outside that range the
/// partial sum is still returned.
pub fn lacunary_h20_partial(lambda: f64, x: f64, y: f64, terms: usize) -> f64 {
    let mut ln = 1.0;
    let mut sum = 0.0;
    for n in 0..=terms {
        if n > 0 {
            ln *= lambda / n as f64;
        }
        if ln == 0.0 {
            break;
        }
        sum += hermite_scaled(2 * n, &x, &y, ln);
    }
    sum
}

/// `∂_x^n e^{αx²} = H_n(2αx, α) e^{αx²}`.
pub fn gaussian_derivative(n: usize, alpha: f64, x: f64) -> Result<f64> {
    Ok(hermite(n, &(2.0 * alpha * x), &alpha)? * (alpha * x * x).exp())
}

/// `∂_x^n e^{-ẑx²}` for `ẑ = a + εb`, projected at order `k`.
///
/// Computed as `H_n(-2ẑx, -ẑ) e^{-ẑx²}` in jet arithmetic. See
/// [`dual_gaussian_derivative_double_sum`] for the expanded series.
pub fn dual_gaussian_derivative(n: usize, a: f64, b: f64, x: f64, k: usize) -> Result<f64> {
    let z = Jet::variable(a, b, k);
    let h = hermite(n, &z.scale(-2.0 * x), &-&z)?;
    let g = z.scale(-x * x).exp();
    Ok((&h * &g).dneq())
}

/// The same quantity as [`dual_gaussian_derivative`] from the explicit double
/// series `n! Σ_r Σ_s (-1)^{n-r+s} 2^{n-2r} x^{n-2r+2s} ẑ^{n-r+s} / ((n-2r)! r! s!)`,
/// where each `ẑ^p` is projected by the binomial theorem. The inner sum over
/// `s` runs until its terms stop contributing.
pub fn dual_gaussian_derivative_double_sum(
    n: usize,
    a: f64,
    b: f64,
    x: f64,
    k: usize,
) -> Result<f64> {
    check_degree(n)?;
    let projected_power = |p: usize| -> f64 {
        (0..=p.min(k))
            .map(|j| binomial(p as f64, j) * a.powi((p - j) as i32) * b.powi(j as i32))
            .sum()
    };
    let nf = factorial(n);
    let mut total = 0.0;
    for r in 0..=n / 2 {
        let outer = nf * 2f64.powi((n - 2 * r) as i32) / (factorial(n - 2 * r) * factorial(r));
        let mut inner = 0.0;
        let mut quiet = 0;
        for s in 0..2000usize {
            let sign = if (n - r + s).is_multiple_of(2) { 1.0 } else { -1.0 };
            let xp = x.powi((n - 2 * r + 2 * s) as i32);
            let term = sign * xp / factorial(s) * projected_power(n - r + s);
            inner += term;
            if s > n && term.abs() <= 1e-18 * inner.abs().max(1e-300) {
                quiet += 1;
                if quiet >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        total += outer * inner;
    }
    Ok(total)
}

/// Second-order truncation of the modified Hermite polynomial:
/// `H_n(x,a) + b ∂_a H_n(x,a) + ½ b² ∂_a² H_n(x,a)`, using
/// `∂_y H_n = n(n-1) H_{n-2}`.
pub fn modified_hermite_order2(n: usize, x: f64, a: f64, b: f64) -> Result<f64> {
    check_degree(n)?;
    let h = |m: usize| hermite_scaled(m, &x, &a, 1.0);
    let mut v = h(n);
    if n >= 2 {
        v += b * (n * (n - 1)) as f64 * h(n - 2);
    }
    if n >= 4 {
        v += 0.5 * b * b * (n * (n - 1) * (n - 2) * (n - 3)) as f64 * h(n - 4);
    }
    Ok(v)
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, &p)| acc + p / (z + (i + 1) as f64))
}

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// `Γ(x)`. Arguments below 1/2 are shifted up with `Γ(x) = Γ(x+1)/x`, so no
/// reflection formula is involved. Poles return infinity.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return f64::INFINITY;
    }
    if x < 0.5 {
        let mut shifted = x;
        let mut denom = 1.0;
        while shifted < 0.5 {
            denom *= shifted;
            shifted += 1.0;
        }
        return gamma(shifted) / denom;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power to postpone overflow
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * std::f64::consts::PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z)
}

/// `1/Γ(x)`, exactly zero at the poles `0, -1, -2, …`.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn lorentzian_closed_forms() {
        let x: f64 = 0.6;
        let d = lorentzian_derivatives(x, 3).unwrap();
        let q = 1.0 + x * x;
        assert_relative_eq!(d[0], 1.0 / q, max_relative = 1e-15);
        assert_relative_eq!(d[1], -2.0 * x / (q * q), max_relative = 1e-14);
        assert_relative_eq!(d[2], (6.0 * x * x - 2.0) / q.powi(3), max_relative = 1e-13);
    }

    #[test]
    fn truncated_exponential() {
        assert_eq!(trunc_exp(2, 1.0), 2.5);
        for x in [-3.0, 0.0, 0.5, 7.0] {
            assert_eq!(trunc_exp(0, x), 1.0);
        }
        assert_relative_eq!(trunc_exp(40, 1.0), std::f64::consts::E, max_relative = 1e-15);
    }

    #[test]
    fn trunc_exp_derivative_lowers_index() {
        let h = 1e-4;
        for n in 1..=10 {
            for x in [-1.5, 0.3, 2.0] {
                let fd = (trunc_exp(n, x + h) - trunc_exp(n, x - h)) / (2.0 * h);
                assert!((fd - trunc_exp(n - 1, x)).abs() <= 1e-7, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn hermite_small_cases() {
        assert_eq!(hermite(2, &3.0, &1.0).unwrap(), 11.0);
        assert_eq!(hermite(0, &0.4, &-2.0).unwrap(), 1.0);
        assert_eq!(hermite(3, &2.0, &1.0).unwrap(), 20.0);
        assert_eq!(hermite(1, &0.7, &5.0).unwrap(), 0.7);
        assert!(matches!(
            hermite(65, &1.0, &1.0),
            Err(Error::DegreeTooLarge { degree: 65, .. })
        ));
    }

    #[test]
    fn hermite_recurrence_exact_on_integers() {
        // all values are integers well below 2^53
        for x in -3..=3 {
            for y in -2..=2 {
                let (x, y) = (x as f64, y as f64);
                for n in 1..10 {
                    let lhs = hermite(n + 1, &x, &y).unwrap();
                    let rhs = x * hermite(n, &x, &y).unwrap()
                        + 2.0 * y * n as f64 * hermite(n - 1, &x, &y).unwrap();
                    assert_eq!(lhs, rhs, "n={n} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn generating_function() {
        assert_eq!(hermite_egf_partial(0.0, 2.0, 3.0, 7), 1.0);
        assert_relative_eq!(
            hermite_egf_partial(0.3, 0.5, 0.2, 30),
            (0.15f64 + 0.018).exp(),
            max_relative = 1e-12
        );
        assert_eq!(hermite_egf_partial(0.4, 1.5, 9.0, 1), 1.0 + 0.4 * 1.5);
    }

    #[test]
    fn hermite_based_truncated_exponential() {
        assert_eq!(hermite_trunc_exp(0, 3.0, 4.0), 1.0);
        assert_eq!(hermite_trunc_exp(1, 0.25, 4.0), 1.25);
        assert_eq!(hermite_trunc_exp(2, 0.0, 0.25), 1.25);
    }

    #[test]
    fn lacunary_reaches_glaisher() {
        assert_eq!(lacunary_h20_partial(0.0, 1.0, 2.0, 10), 1.0);
        assert_eq!(lacunary_h20_partial(-0.7, 1.0, 2.0, 0), 1.0);
        let (alpha, x, tau): (f64, f64, f64) = (0.2, 0.5, 0.1);
        let g = 1.0 + 4.0 * tau * alpha;
        let closed = (-alpha * x * x / g).exp() / g.sqrt();
        assert_relative_eq!(lacunary_h20_partial(-alpha, x, tau, 40), closed, epsilon = 1e-10);
    }

    #[test]
    fn gaussian_derivatives() {
        let (a, x) = (-0.5, 0.4);
        assert_eq!(gaussian_derivative(0, a, x).unwrap(), (a * x * x).exp());
        assert_relative_eq!(
            gaussian_derivative(1, a, x).unwrap(),
            2.0 * a * x * (a * x * x).exp(),
            max_relative = 1e-15
        );
        let fd = crate::oracles::finite_difference(|s: f64| (-0.5 * s * s).exp(), x, 3, Some(1e-3)).unwrap();
        assert!((gaussian_derivative(3, a, x).unwrap() - fd).abs() < 1e-4);
    }

    #[test]
    fn dual_gaussian_derivative_paths() {
        for n in 0..6 {
            let jet = dual_gaussian_derivative(n, 1.1, 0.0, 0.6, 3).unwrap();
            assert_relative_eq!(jet, gaussian_derivative(n, -1.1, 0.6).unwrap(), max_relative = 1e-13);
        }
        let (a, b, x): (f64, f64, f64) = (0.8, 0.35, 0.9);
        let closed = (-a * x * x).exp() * (1.0 - b * x * x + (b * x * x).powi(2) / 2.0);
        assert_relative_eq!(dual_gaussian_derivative(0, a, b, x, 2).unwrap(), closed, max_relative = 1e-14);
        let jet = dual_gaussian_derivative(2, 1.0, 0.3, 0.5, 2).unwrap();
        let sum = dual_gaussian_derivative_double_sum(2, 1.0, 0.3, 0.5, 2).unwrap();
        assert!((jet - sum).abs() <= 1e-12, "{jet} vs {sum}");
    }

    #[test]
    fn modified_hermite_truncation() {
        for n in 0..8 {
            assert_eq!(modified_hermite_order2(n, 0.3, 0.7, 0.0).unwrap(), hermite(n, &0.3, &0.7).unwrap());
        }
        assert_eq!(modified_hermite_order2(1, 0.45, 0.2, 0.9).unwrap(), 0.45);
        let (n, x, a, b) = (4, 0.7, 0.2, 0.1);
        let jet = hermite(n, &Jet::constant(x, 2), &Jet::variable(a, b, 2)).unwrap().dneq();
        assert_relative_eq!(modified_hermite_order2(n, x, a, b).unwrap(), jet, max_relative = 1e-12);
    }

    #[test]
    fn gamma_values() {
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_relative_eq!(gamma(0.5), sqrt_pi, max_relative = 1e-14);
        assert_relative_eq!(gamma(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(6.0), 120.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5), -2.0 * sqrt_pi, max_relative = 1e-14);
        assert_relative_eq!(ln_gamma(10.0), 362_880f64.ln(), max_relative = 1e-14);
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-3.0), 0.0);
        assert_relative_eq!(recip_gamma(0.5), 1.0 / sqrt_pi, max_relative = 1e-14);
        assert_relative_eq!(gamma(170.5), ln_gamma(170.5).exp(), max_relative = 1e-11);
    }

    #[test]
    fn order_zero_jets_match_scalars_bitwise() {
        for n in 0..20 {
            let s = hermite(n, &0.37, &-1.3).unwrap();
            let j = hermite(n, &Jet::constant(0.37, 0), &Jet::constant(-1.3, 0)).unwrap();
            assert_eq!(j.coeffs(), &[s]);
        }
    }

    proptest! {
        #[test]
        fn hermite_identities(x in -2.0f64..2.0, y in -1.0f64..1.0, n in 2usize..=20) {
            let h = |m: usize| hermite(m, &x, &y).unwrap();
            let scale = (2..=n).map(|m| h(m).abs()).fold(1.0, f64::max) * (n * n) as f64;
            // three-term recurrence
            prop_assert!((h(n + 1) - x * h(n) - 2.0 * y * n as f64 * h(n - 1)).abs() <= 1e-13 * scale * n as f64);
            // ODE 2y H'' + x H' - n H = 0
            let ode = 2.0 * y * (n * (n - 1)) as f64 * h(n - 2) + x * n as f64 * h(n - 1) - n as f64 * h(n);
            prop_assert!(ode.abs() <= 1e-13 * scale);
        }
    }
}
