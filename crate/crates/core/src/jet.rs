//! Order-`k` dual numbers stored as truncated coefficient vectors.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::scalar::{Ring, Scalar, ScalarKind};
use crate::specfun::factorial;
use crate::{Error, Result};

/// `|c_0|` at or below this value is treated as zero by [`Jet::inv`] and
/// [`Jet::powf`]. It only guards against underflow.
pub const SINGULARITY_TOLERANCE: f64 = 1e-300;

/// Truncated power series `c_0 + c_1 ε + … + c_k ε^k` with `ε^{k+1} = 0`.
///
/// The order `k` is `coeffs.len() - 1`. Binary operations on jets of
/// different orders zero-pad the lower one, so a constant of order 0 acts as a
/// scalar in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<T = f64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    /// Builds a jet from `c_0..c_k`.
    ///
    /// # Panics
    ///
    /// If `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least one coefficient");
        Self { coeffs }
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut coeffs = vec![T::zero(); order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(T::zero(), order)
    }

    pub fn unit(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    /// `x + ε y` truncated at `order`; the `ε` term is dropped when `order == 0`.
    ///
    /// With `y = 1` this seeds forward-mode differentiation; with `x = a`,
    /// `y = b` it is the dual parameter `a + εb`.
    pub fn variable(x: T, y: T, order: usize) -> Self {
        let mut j = Self::constant(x, order);
        if order >= 1 {
            j.coeffs[1] = y;
        }
        j
    }

    /// The nilpotent unit `ε` itself.
    pub fn epsilon(order: usize) -> Self {
        Self::variable(T::zero(), T::one(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `ε^m`, zero above the order.
    pub fn coeff(&self, m: usize) -> T {
        self.coeffs.get(m).copied().unwrap_or_else(T::zero)
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    pub fn kind(&self) -> ScalarKind {
        T::KIND
    }

    /// Re-expresses the jet at another order: pads with zeros or drops terms.
    pub fn with_order(&self, order: usize) -> Self {
        let coeffs = (0..=order).map(|m| self.coeff(m)).collect();
        Self { coeffs }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Jet<U> {
        Jet {
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn to_complex(&self) -> Jet<Complex64> {
        self.map(Scalar::into_complex)
    }

    pub fn scale_by(&self, c: T) -> Self {
        self.map(|x| x * c)
    }

    /// The nilpotent part `u - c_0`.
    pub fn nilpotent_part(&self) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = T::zero();
        h
    }

    /// Umbral projection: drop powers above the order, then set `ε = 1`.
    pub fn dneq(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, &c| acc + c)
    }

    /// `m! c_m`, i.e. `f^{(m)}(x)` when the jet is `f(x + ε)`.
    pub fn extract_derivative(&self, m: usize) -> Result<T> {
        if m > self.order() {
            return Err(Error::IndexOutOfRange {
                index: m,
                order: self.order(),
            });
        }
        Ok(self.coeffs[m] * T::from_real(factorial(m)))
    }

    fn check_leading(&self) -> Result<()> {
        let c0 = self.coeffs[0];
        if c0.abs() <= SINGULARITY_TOLERANCE {
            return Err(Error::SingularLeadingCoefficient(c0.abs()));
        }
        Ok(())
    }

    /// Multiplicative inverse via `d_0 = 1/c_0`,
    /// `d_m = -(1/c_0) Σ_{j=1}^{m} c_j d_{m-j}`.
    pub fn inv(&self) -> Result<Self> {
        self.check_leading()?;
        let c = &self.coeffs;
        let r = c[0].recip();
        let mut d = Vec::with_capacity(c.len());
        d.push(r);
        for m in 1..c.len() {
            let s = (1..=m).fold(T::zero(), |acc, j| acc + c[j] * d[m - j]);
            d.push(-(s * r));
        }
        Ok(Self { coeffs: d })
    }

    /// `self / rhs` by forward substitution, so an order-0 quotient is exactly
    /// the scalar quotient.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        rhs.check_leading()?;
        let order = self.order().max(rhs.order());
        let v0 = rhs.coeffs[0];
        let mut q: Vec<T> = Vec::with_capacity(order + 1);
        for m in 0..=order {
            let s = (1..=m.min(rhs.order())).fold(T::zero(), |acc, j| acc + rhs.coeffs[j] * q[m - j]);
            q.push((self.coeff(m) - s) / v0);
        }
        Ok(Self { coeffs: q })
    }

    /// Integer power; negative exponents go through [`Jet::inv`].
    pub fn powi(&self, n: i32) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow_u(n as u32).with_order(self.order()))
        } else {
            Ok(self.inv()?.pow_u(n.unsigned_abs()).with_order(self.order()))
        }
    }

    /// Real power `u^α` on the principal branch.
    ///
    /// Integer exponents use repeated squaring (and are fine at `c_0 = 0` when
    /// non-negative). Fractional powers of a real jet need `c_0 > 0`; promote
    /// with [`Jet::to_complex`] for the principal complex branch.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        if alpha.fract() == 0.0 && alpha.abs() < i32::MAX as f64 {
            return self.powi(alpha as i32);
        }
        self.lift(&Elementary::Pow(alpha))
    }

    /// Analytic lift `Σ_{m≤k} f^{(m)}(c_0)/m! · h^m` with `h = u - c_0`.
    pub fn lift<S: DerivativeSource<T> + ?Sized>(&self, f: &S) -> Result<Self> {
        let k = self.order();
        let derivs = f.derivatives(self.coeffs[0], k + 1)?;
        debug_assert_eq!(derivs.len(), k + 1);
        let h = self.nilpotent_part();
        // Horner in the nilpotent part.
        let mut acc = Self::constant(derivs[k] / T::from_real(factorial(k)), k);
        for m in (0..k).rev() {
            acc = &acc * &h;
            acc.coeffs[0] = acc.coeffs[0] + derivs[m] / T::from_real(factorial(m));
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Self {
        self.lift(&Elementary::Exp).expect("exp is entire")
    }

    pub fn sin(&self) -> Self {
        self.lift(&Elementary::Sin).expect("sin is entire")
    }

    pub fn cos(&self) -> Self {
        self.lift(&Elementary::Cos).expect("cos is entire")
    }

    pub fn ln(&self) -> Result<Self> {
        self.lift(&Elementary::Ln)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.lift(&Elementary::Sqrt)
    }
}

/// Supplies `f(x), f'(x), …, f^{(count-1)}(x)` at a point.
pub trait DerivativeSource<T> {
    fn derivatives(&self, x: T, count: usize) -> Result<Vec<T>>;
}

impl<T, F> DerivativeSource<T> for F
where
    F: Fn(T, usize) -> Result<Vec<T>>,
{
    fn derivatives(&self, x: T, count: usize) -> Result<Vec<T>> {
        self(x, count)
    }
}

/// Built-in functions with closed-form derivatives of every order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Elementary {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    Pow(f64),
}

impl Elementary {
    pub fn name(&self) -> &'static str {
        match self {
            Elementary::Exp => "exp",
            Elementary::Ln => "ln",
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Sqrt => "sqrt",
            Elementary::Pow(_) => "pow",
        }
    }

    /// Scalar value `f(x)` with the same domain checks as the derivatives.
    pub fn eval<T: Scalar>(&self, x: T) -> Result<T> {
        Ok(self.derivatives(x, 1)?[0])
    }
}

fn is_real_nonpositive<T: Scalar>(x: T) -> bool {
    T::KIND == ScalarKind::Real && x.re() <= 0.0
}

impl<T: Scalar> DerivativeSource<T> for Elementary {
    fn derivatives(&self, x: T, count: usize) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(count);
        match *self {
            Elementary::Exp => out.resize(count, x.exp()),
            Elementary::Sin | Elementary::Cos => {
                let (s, c) = (x.sin(), x.cos());
                let cycle = [s, c, -s, -c];
                let start = if *self == Elementary::Sin { 0 } else { 1 };
                out.extend((0..count).map(|m| cycle[(start + m) % 4]));
            }
            Elementary::Ln => {
                if is_real_nonpositive(x) || x.abs() == 0.0 {
                    return Err(Error::domain("ln", x));
                }
                if count > 0 {
                    out.push(x.ln());
                }
                let r = x.recip();
                let mut d = r;
                for m in 1..count {
                    out.push(d);
                    d = d * r * T::from_real(-(m as f64));
                }
            }
            Elementary::Sqrt => {
                if T::KIND == ScalarKind::Real && x.re() < 0.0 {
                    return Err(Error::domain("sqrt", x));
                }
                if x.abs() == 0.0 && count > 1 {
                    return Err(Error::NonDifferentiablePoint {
                        function: "sqrt",
                        argument: format!("{x:?}"),
                    });
                }
                if count > 0 {
                    out.push(x.sqrt());
                }
                out.extend(pow_derivatives(x, 0.5, count).into_iter().skip(1));
            }
            Elementary::Pow(alpha) => {
                let integral = alpha.fract() == 0.0;
                if !integral && is_real_nonpositive(x) && x.re() < 0.0 {
                    return Err(Error::NegativeBaseRealFractionalPower {
                        base: x.re(),
                        exponent: alpha,
                    });
                }
                let nonneg_int = integral && alpha >= 0.0;
                if !nonneg_int && x.abs() <= SINGULARITY_TOLERANCE && (count > 1 || alpha < 0.0) {
                    return Err(Error::SingularLeadingCoefficient(x.abs()));
                }
                out = pow_derivatives(x, alpha, count);
            }
        }
        Ok(out)
    }
}

/// `f^{(m)}(x) = α(α-1)…(α-m+1) x^{α-m}` for `f = t^α`.
fn pow_derivatives<T: Scalar>(x: T, alpha: f64, count: usize) -> Vec<T> {
    let mut falling = 1.0;
    (0..count)
        .map(|m| {
            if m > 0 {
                falling *= alpha - (m - 1) as f64;
            }
            if falling == 0.0 {
                T::zero()
            } else {
                x.powf(alpha - m as f64) * T::from_real(falling)
            }
        })
        .collect()
}

fn zip_with<T: Scalar>(u: &Jet<T>, v: &Jet<T>, f: impl Fn(T, T) -> T) -> Jet<T> {
    let order = u.order().max(v.order());
    Jet {
        coeffs: (0..=order).map(|m| f(u.coeff(m), v.coeff(m))).collect(),
    }
}

/// Truncated Cauchy product at the larger of the two orders.
fn cauchy<T: Scalar>(u: &Jet<T>, v: &Jet<T>) -> Jet<T> {
    let order = u.order().max(v.order());
    let (a, b) = (&u.coeffs, &v.coeffs);
    let coeffs = (0..=order)
        .map(|m| {
            let lo = m.saturating_sub(b.len() - 1);
            let hi = m.min(a.len() - 1);
            if lo > hi {
                return T::zero();
            }
            (lo + 1..=hi).fold(a[lo] * b[m - lo], |acc, j| acc + a[j] * b[m - j])
        })
        .collect();
    Jet { coeffs }
}

impl<T: Scalar> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Self) -> Jet<T> {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: Self) -> Jet<T> {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Self) -> Jet<T> {
        cauchy(self, rhs)
    }
}

impl<T: Scalar> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        self.map(|c| -c)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl<T: Scalar> $tr for Jet<T> {
            type Output = Jet<T>;
            fn $m(self, rhs: Self) -> Jet<T> {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl<T: Scalar> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

// Mixed real/complex arithmetic promotes to complex.
macro_rules! mixed {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Jet<Complex64>> for Jet<f64> {
            type Output = Jet<Complex64>;
            fn $m(self, rhs: Jet<Complex64>) -> Jet<Complex64> {
                self.to_complex().$m(rhs)
            }
        }
        impl $tr<Jet<f64>> for Jet<Complex64> {
            type Output = Jet<Complex64>;
            fn $m(self, rhs: Jet<f64>) -> Jet<Complex64> {
                self.$m(rhs.to_complex())
            }
        }
    )*};
}
mixed!(Add add, Sub sub, Mul mul);

impl From<Jet<f64>> for Jet<Complex64> {
    fn from(j: Jet<f64>) -> Self {
        j.to_complex()
    }
}

impl<T: Scalar> Ring for Jet<T> {
    fn from_f64(c: f64) -> Self {
        Jet::constant(T::from_real(c), 0)
    }

    fn scale(&self, c: f64) -> Self {
        self.map(|x| x * T::from_real(c))
    }
}
