//! Scalar fields and the commutative-ring interface shared by scalars and jets.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex64, ComplexFloat};

/// Which field a value's coefficients live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarKind {
    Real,
    Complex,
}

impl ScalarKind {
    /// Kind of the result of a binary operation; `Real` promotes to `Complex`.
    pub fn promote(self, other: ScalarKind) -> ScalarKind {
        if self == ScalarKind::Complex || other == ScalarKind::Complex {
            ScalarKind::Complex
        } else {
            ScalarKind::Real
        }
    }
}

/// Coefficient field of a jet: `f64` or `Complex64`.
pub trait Scalar: ComplexFloat<Real = f64> + From<f64> + Debug + Send + Sync + 'static {
    const KIND: ScalarKind;

    fn into_complex(self) -> Complex64;

    fn from_real(c: f64) -> Self {
        <Self as From<f64>>::from(c)
    }
}

impl Scalar for f64 {
    const KIND: ScalarKind = ScalarKind::Real;

    fn into_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    const KIND: ScalarKind = ScalarKind::Complex;

    fn into_complex(self) -> Complex64 {
        self
    }
}

/// Commutative ring with a real scalar action.
///
/// Special functions in [`crate::specfun`] are written against this trait so
/// that the same code evaluates over `f64`, `Complex64` and jets of either.
pub trait Ring:
    Clone + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    /// Embeds a real constant.
    fn from_f64(c: f64) -> Self;

    fn scale(&self, c: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    /// Non-negative integer power by repeated squaring.
    fn pow_u(&self, mut n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut first = true;
        while n > 0 {
            if n & 1 == 1 {
                acc = if first { base.clone() } else { acc * base.clone() };
                first = false;
            }
            n >>= 1;
            if n > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Ring for f64 {
    fn from_f64(c: f64) -> Self {
        c
    }

    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

impl Ring for Complex64 {
    fn from_f64(c: f64) -> Self {
        Complex64::new(c, 0.0)
    }

    fn scale(&self, c: f64) -> Self {
        self * c
    }
}
