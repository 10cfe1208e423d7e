//! Signature (inertia), pseudoinverse, spectral norm and definiteness of
//! dense matrices.

use std::fmt;
use std::ops::Add;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SymmetricEigen};
use crate::scalar::Real;

/// Inertia `(n+, n-, n0)` of a symmetric matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn new(n_plus: usize, n_minus: usize, n_zero: usize) -> Self {
        Self { n_plus, n_minus, n_zero }
    }

    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }
}

impl Add for Signature {
    type Output = Signature;

    fn add(self, rhs: Signature) -> Signature {
        Signature::new(self.n_plus + rhs.n_plus, self.n_minus + rhs.n_minus, self.n_zero + rhs.n_zero)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n_plus, self.n_minus, self.n_zero)
    }
}

/// Zero threshold used throughout: `tol · max(1, max|λ|)`.
pub fn zero_threshold<T: Real>(eig: &SymmetricEigen<T>, tol: T) -> T {
    tol * eig.max_abs().max(T::one())
}

fn checked_eigen<T: Real>(a: &ArrayView2<'_, T>) -> Result<SymmetricEigen<T>> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if !linalg::all_finite(a) {
        return Err(Error::NonFinite);
    }
    Ok(linalg::symmetric_eigen(a))
}

pub fn signature_from_eigen<T: Real>(eig: &SymmetricEigen<T>, tol: T) -> Signature {
    let thr = zero_threshold(eig, tol);
    eig.values.iter().fold(Signature::default(), |mut s, &l| {
        if l.abs() <= thr {
            s.n_zero += 1;
        } else if l > T::zero() {
            s.n_plus += 1;
        } else {
            s.n_minus += 1;
        }
        s
    })
}

/// Counts positive, negative and zero eigenvalues of `(A + Aᵀ)/2`.
pub fn signature_of<T: Real>(a: &ArrayView2<'_, T>, tol: T) -> Result<Signature> {
    Ok(signature_from_eigen(&checked_eigen(a)?, tol))
}

/// Moore–Penrose pseudoinverse of a symmetric matrix by spectral inversion of
/// the eigenvalues above the zero threshold.
pub fn pseudoinverse<T: Real>(a: &ArrayView2<'_, T>, tol: T) -> Result<Array2<T>> {
    let eig = checked_eigen(a)?;
    let thr = zero_threshold(&eig, tol);
    let n = a.nrows();
    let mut out = Array2::<T>::zeros((n, n));
    for (k, &l) in eig.values.iter().enumerate() {
        if l.abs() <= thr {
            continue;
        }
        let v = eig.vectors.column(k);
        let inv = T::one() / l;
        for i in 0..n {
            let vi = v[i] * inv;
            for j in 0..n {
                out[[i, j]] += vi * v[j];
            }
        }
    }
    Ok(linalg::symmetrize(&out.view()))
}

/// Largest singular value of a real (possibly rectangular) matrix.
pub fn spectral_norm<T: Real>(a: &ArrayView2<'_, T>) -> Result<T> {
    if !linalg::all_finite(a) {
        return Err(Error::NonFinite);
    }
    if a.is_empty() {
        return Ok(T::zero());
    }
    // Gram matrix on the smaller side.
    let gram = if a.nrows() <= a.ncols() { a.dot(&a.t()) } else { a.t().dot(a) };
    let eig = linalg::symmetric_eigen(&gram.view());
    let top = eig.values.last().copied().unwrap_or(T::zero());
    Ok(top.max(T::zero()).sqrt())
}

/// Largest singular value of a complex matrix via its real embedding
/// `[[Re, -Im], [Im, Re]]`, whose singular values are those of the input,
/// each repeated twice.
pub fn complex_spectral_norm<T: Real>(a: &ArrayView2<'_, Complex<T>>) -> Result<T> {
    let (r, c) = a.dim();
    let mut emb = Array2::<T>::zeros((2 * r, 2 * c));
    for i in 0..r {
        for j in 0..c {
            let z = a[[i, j]];
            emb[[i, j]] = z.re;
            emb[[i, j + c]] = -z.im;
            emb[[i + r, j]] = z.im;
            emb[[i + r, j + c]] = z.re;
        }
    }
    spectral_norm(&emb.view())
}

/// Positive semi-definite test: no eigenvalue below `-tol · max(1, max|λ|)`.
pub fn is_psd<T: Real>(a: &ArrayView2<'_, T>, tol: T) -> Result<bool> {
    Ok(signature_of(a, tol)?.n_minus == 0)
}

/// Smallest eigenvalue of a symmetric matrix (`+∞` for an empty one).
pub fn min_eigenvalue<T: Real>(a: &ArrayView2<'_, T>) -> Result<T> {
    Ok(checked_eigen(a)?.values.first().copied().unwrap_or(T::infinity()))
}

/// Largest eigenvalue magnitude of a symmetric matrix.
pub fn spectral_radius<T: Real>(a: &ArrayView2<'_, T>) -> Result<T> {
    Ok(checked_eigen(a)?.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn triangle_laplacian() -> Array2<f64> {
        array![[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]]
    }

    #[test]
    fn signature_identity() {
        let a = Array2::<f64>::eye(3);
        assert_eq!(signature_of(&a.view(), 1e-9).unwrap(), Signature::new(3, 0, 0));
    }

    #[test]
    fn signature_triangle_laplacian() {
        assert_eq!(signature_of(&triangle_laplacian().view(), 1e-9).unwrap(), Signature::new(2, 0, 1));
    }

    #[test]
    fn signature_diagonal() {
        let a = array![[1.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, 0.0]];
        assert_eq!(signature_of(&a.view(), 1e-9).unwrap(), Signature::new(1, 1, 1));
    }

    #[test]
    fn signature_rejects_non_finite() {
        let a = array![[1.0, f64::NAN], [f64::NAN, 1.0]];
        assert_eq!(signature_of(&a.view(), 1e-9), Err(Error::NonFinite));
    }

    #[test]
    fn signature_symmetrizes_input() {
        // (A + Aᵀ)/2 = [[0, 1], [1, 0]], eigenvalues ±1.
        let a = array![[0.0, 2.0], [0.0, 0.0]];
        assert_eq!(signature_of(&a.view(), 1e-9).unwrap(), Signature::new(1, 1, 0));
    }

    #[test]
    fn pseudoinverse_examples() {
        let id = Array2::<f64>::eye(3);
        assert_eq!(pseudoinverse(&id.view(), 1e-9).unwrap(), id);

        let d = array![[2.0, 0.0], [0.0, 0.0]];
        let p = pseudoinverse(&d.view(), 1e-9).unwrap();
        assert_relative_eq!(p[[0, 0]], 0.5, epsilon = 1e-15);
        assert_eq!(p[[1, 1]], 0.0);

        let l = triangle_laplacian();
        let lp = pseudoinverse(&l.view(), 1e-9).unwrap();
        let back = l.dot(&lp).dot(&l);
        for (x, y) in back.iter().zip(l.iter()) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn spectral_norm_examples() {
        let d = array![[3.0, 0.0], [0.0, -5.0]];
        assert_relative_eq!(spectral_norm(&d.view()).unwrap(), 5.0, max_relative = 1e-12);

        // u = (1, 2, 1, 1), |u|² = 7
        let u = array![1.0, 2.0, 1.0, 1.0];
        let outer = Array2::from_shape_fn((4, 4), |(i, j)| u[i] * u[j]);
        assert_relative_eq!(spectral_norm(&outer.view()).unwrap(), 7.0, max_relative = 1e-12);

        let rect = array![[1.0, 0.0, 0.0], [0.0, 0.0, 2.0]];
        assert_relative_eq!(spectral_norm(&rect.view()).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn complex_norm_matches_modulus() {
        let a = array![[Complex::new(3.0, 4.0)]];
        assert_relative_eq!(complex_spectral_norm(&a.view()).unwrap(), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn psd_examples() {
        assert!(is_psd(&triangle_laplacian().view(), 1e-9).unwrap());
        // path 0-1-2 with weights (1, -0.1)
        let l = array![[1.0, -1.0, 0.0], [-1.0, 0.9, 0.1], [0.0, 0.1, -0.1]];
        assert!(!is_psd(&l.view(), 1e-9).unwrap());
        assert!(is_psd(&Array2::<f64>::zeros((3, 3)).view(), 1e-9).unwrap());
    }

    #[test]
    fn empty_matrix() {
        let e = Array2::<f64>::zeros((0, 0));
        assert_eq!(signature_of(&e.view(), 1e-9).unwrap(), Signature::default());
        assert_eq!(spectral_norm(&e.view()).unwrap(), 0.0);
    }
}
