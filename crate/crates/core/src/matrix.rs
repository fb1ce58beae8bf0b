//! Shift-matrix realization of the nilpotent unit.
//!
//! `ε_k^+` has ones on the first superdiagonal and `ε_k^-` on the first
//! subdiagonal; both satisfy `(ε_k^±)^k = 0`. A function applied to
//! `x·1_k + y·ε_k^+` is an upper-triangular Toeplitz matrix whose first row
//! holds the Taylor terms, and [`eval_bracket`] sums that row.

use std::ops::{Add, Mul};

use num_traits::{One, Zero};

use crate::jet::DerivativeSource;
use crate::scalar::Scalar;
use crate::specfun::factorial;
use crate::{Error, Result};

/// Matrices larger than this are refused.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Superdiagonal shift, `δ_{j,i+1}`.
    Upper,
    /// Subdiagonal shift, `δ_{j,i-1}`.
    Lower,
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DnuMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

fn check_dim(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::DimensionTooSmall(k));
    }
    if k > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "matrix dimension {k} exceeds {MAX_DIM}"
        )));
    }
    Ok(())
}

impl<T: Copy + Zero + One + Add<Output = T> + Mul<Output = T>> DnuMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![T::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = T::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let s = (0..n).fold(T::zero(), |acc, l| acc + self.get(i, l) * rhs.get(l, j));
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(self.dim), |acc, _| acc.matmul(self))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

/// `(ε_k^±)^ℓ` with entries `δ_{j, i±ℓ}`; zero once `ℓ ≥ k`.
pub fn epsilon_power<T>(k: usize, orientation: Orientation, power: usize) -> Result<DnuMatrix<T>>
where
    T: Copy + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    check_dim(k)?;
    let mut m = DnuMatrix::zeros(k);
    for i in 0..k {
        let j = match orientation {
            Orientation::Upper => i.checked_add(power).filter(|&j| j < k),
            Orientation::Lower => i.checked_sub(power),
        };
        if let Some(j) = j {
            m.set(i, j, T::one());
        }
    }
    Ok(m)
}

/// `f(x·1_k + y·ε_k^+) = Σ_{m<k} y^m f^{(m)}(x)/m! · (ε_k^+)^m`.
pub fn apply_fn<T, S>(f: &S, x: T, y: T, k: usize) -> Result<DnuMatrix<T>>
where
    T: Scalar,
    S: DerivativeSource<T> + ?Sized,
{
    check_dim(k)?;
    let derivs = f.derivatives(x, k)?;
    let mut yp = T::one();
    let diag: Vec<T> = (0..k)
        .map(|m| {
            if m > 0 {
                yp = yp * y;
            }
            yp * derivs[m] / T::from_real(factorial(m))
        })
        .collect();
    let mut out = DnuMatrix::zeros(k);
    for i in 0..k {
        for j in i..k {
            out.set(i, j, diag[j - i]);
        }
    }
    Ok(out)
}

/// Order-`k` evaluation `⟨e_1| M |1⟩`: the sum of the first row.
pub fn eval_bracket<T>(m: &DnuMatrix<T>) -> T
where
    T: Copy + Zero + One + Add<Output = T> + Mul<Output = T>,
{
    m.row(0).iter().fold(T::zero(), |acc, &v| acc + v)
}

/// `exp(ε_{n+1}^+ x) |1⟩ = (e_n(x), e_{n-1}(x), …, e_1(x), 1)`.
///
/// The exponential of the nilpotent shift is the finite sum
/// `Σ_{r≤n} x^r/r! (ε^+)^r`, assembled here as a Toeplitz matrix.
pub fn trunc_exp_stack(n: usize, x: f64) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    let dim = n + 1;
    let mut e = DnuMatrix::<f64>::zeros(dim);
    let mut term = 1.0;
    for r in 0..dim {
        if r > 0 {
            term *= x / r as f64;
        }
        for i in 0..dim - r {
            e.set(i, i + r, term);
        }
    }
    e.mul_vec(&vec![1.0; dim])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{Elementary, Jet};
    use crate::specfun::trunc_exp;
    use approx::assert_relative_eq;

    #[test]
    fn shift_matrices() {
        let e: DnuMatrix<i64> = epsilon_power(2, Orientation::Upper, 1).unwrap();
        assert_eq!(e.row(0), &[0, 1]);
        assert_eq!(e.row(1), &[0, 0]);
        assert!(epsilon_power::<i64>(3, Orientation::Upper, 3).unwrap().is_zero());
        let up: DnuMatrix<i64> = epsilon_power(3, Orientation::Upper, 1).unwrap();
        let down: DnuMatrix<i64> = epsilon_power(3, Orientation::Lower, 1).unwrap();
        assert_eq!(down, up.transpose());
        assert_eq!(epsilon_power::<i64>(1, Orientation::Upper, 1), Err(Error::DimensionTooSmall(1)));
    }

    #[test]
    fn shift_powers_are_exact() {
        for k in 2..=12 {
            for orientation in [Orientation::Upper, Orientation::Lower] {
                let e: DnuMatrix<i64> = epsilon_power(k, orientation, 1).unwrap();
                for l in 0..=k + 1 {
                    assert_eq!(e.pow(l as u32), epsilon_power(k, orientation, l).unwrap());
                }
                assert!(e.pow(k as u32).is_zero());
            }
        }
    }

    #[test]
    fn first_order_dual_identity() {
        let (x, y) = (0.4, 1.7);
        let m = apply_fn(&Elementary::Sin, x, y, 2).unwrap();
        assert_eq!(m.row(0), &[x.sin(), y * x.cos()]);
        assert_eq!(m.row(1), &[0.0, x.sin()]);
        let c = apply_fn(&|_x: f64, n: usize| -> Result<Vec<f64>> {
            let mut v = vec![0.0; n];
            v[0] = 3.5;
            Ok(v)
        }, 1.0, 2.0, 4)
        .unwrap();
        assert_eq!(c, {
            let mut i = DnuMatrix::<f64>::identity(4);
            i.entries.iter_mut().for_each(|e| *e *= 3.5);
            i
        });
    }

    #[test]
    fn first_row_is_jet() {
        let (x, y) = (0.3, -0.8);
        for k in 2..9 {
            let m = apply_fn(&Elementary::Exp, x, y, k).unwrap();
            let jet = Jet::variable(x, y, k - 1).exp();
            for (a, b) in m.row(0).iter().zip(jet.coeffs()) {
                assert_relative_eq!(a, b, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn bracket() {
        assert_eq!(eval_bracket(&DnuMatrix::<f64>::identity(3)), 1.0);
        for k in 1..8 {
            let m = apply_fn(&Elementary::Exp, 0.0, 1.0, k + 1).unwrap();
            let j = Jet::variable(0.0, 1.0, k).exp();
            assert_relative_eq!(eval_bracket(&m), j.dneq(), max_relative = 1e-14);
        }
    }

    #[test]
    fn functions_of_matrices_multiply() {
        let (x, y) = (0.2, 0.9);
        let e = apply_fn(&Elementary::Exp, x, y, 6).unwrap();
        let e2 = apply_fn(&|t: f64, n: usize| -> Result<Vec<f64>> { Ok(vec![(2.0 * t).exp(); n].iter().enumerate().map(|(m, v)| v * 2f64.powi(m as i32)).collect()) }, x, y, 6).unwrap();
        let prod = e.matmul(&e);
        for i in 0..6 {
            for j in 0..6 {
                assert!((prod.get(i, j) - e2.get(i, j)).abs() <= 1e-12 * e2.get(0, 0));
            }
        }
    }

    #[test]
    fn truncated_exponential_stack() {
        assert_eq!(trunc_exp_stack(2, 1.0), vec![2.5, 2.0, 1.0]);
        assert_eq!(trunc_exp_stack(0, 3.3), vec![1.0]);
        let (n, x, h) = (6, 0.7, 1e-5);
        let s = trunc_exp_stack(n, x);
        for (i, v) in s.iter().enumerate() {
            assert_relative_eq!(*v, trunc_exp(n - i, x), max_relative = 1e-15);
        }
        let (sp, sm) = (trunc_exp_stack(n, x + h), trunc_exp_stack(n, x - h));
        for i in 0..n {
            let d = (sp[i] - sm[i]) / (2.0 * h);
            assert!((d - s[i + 1]).abs() < 1e-8, "component {i}");
        }
    }
}
