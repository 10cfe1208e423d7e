//! Dense kernels shared by the analysis modules: a cyclic Jacobi symmetric
//! eigensolver and LU factorization with partial pivoting.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Array2<T>,
}

impl<T: Real> SymmetricEigen<T> {
    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

pub fn all_finite<T: Real>(a: &ArrayView2<'_, T>) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// `(A + Aᵀ) / 2`.
pub fn symmetrize<T: Real>(a: &ArrayView2<'_, T>) -> Array2<T> {
    let half = T::lit(0.5);
    let n = a.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| (a[[i, j]] + a[[j, i]]) * half)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// The input is symmetrized first. Residuals are at the level of a few
/// machine epsilons times `‖A‖`, independent of eigenvalue clustering.
pub fn symmetric_eigen<T: Real>(a: &ArrayView2<'_, T>) -> SymmetricEigen<T> {
    assert_eq!(a.nrows(), a.ncols(), "eigendecomposition needs a square matrix");
    let n = a.nrows();
    let mut m = symmetrize(a);
    let mut v = Array2::<T>::eye(n);

    let frob = m.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt();
    let stop = T::epsilon() * T::lit(0.25) * frob;

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off.sqrt() <= stop || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == T::zero() {
                    continue;
                }
                let app = m[[p, p]];
                let aqq = m[[q, q]];
                // Entry too small to change either diagonal value.
                let g = apq.abs() * T::lit(100.0);
                if app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[[p, q]] = T::zero();
                    m[[q, p]] = T::zero();
                    continue;
                }
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                m[[p, q]] = T::zero();
                m[[q, p]] = T::zero();

                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let vectors = v.select(Axis(1), &order);
    SymmetricEigen { values, vectors }
}

/// LU factorization `P A = L U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Array2<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factor(a: &ArrayView2<'_, T>) -> Result<Self> {
        assert_eq!(a.nrows(), a.ncols(), "LU needs a square matrix");
        let n = a.nrows();
        let mut lu = a.to_owned();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|i| (i, lu[[i, k]].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == T::zero() || !pmax.is_finite() {
                return Err(Error::Singular { what: "matrix", ratio: 0.0 });
            }
            if piv != k {
                for j in 0..n {
                    lu.swap([k, j], [piv, j]);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[[k, k]];
            for i in (k + 1)..n {
                let f = lu[[i, k]] / pivot;
                lu[[i, k]] = f;
                if f != T::zero() {
                    for j in (k + 1)..n {
                        let ukj = lu[[k, j]];
                        lu[[i, j]] -= f * ukj;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve_vec(&self, b: &[T]) -> Array1<T> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[[i, j]] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[[i, j]] * x[j];
            }
            x[i] = s / self.lu[[i, i]];
        }
        Array1::from(x)
    }

    pub fn solve(&self, b: &ArrayView2<'_, T>) -> Array2<T> {
        let mut out = Array2::zeros(b.raw_dim());
        for (j, col) in b.axis_iter(Axis(1)).enumerate() {
            let x = self.solve_vec(&col.to_vec());
            out.column_mut(j).assign(&x);
        }
        out
    }

    pub fn inverse(&self) -> Array2<T> {
        let n = self.dim();
        self.solve(&Array2::<T>::eye(n).view())
    }
}

/// Returns `A⁻¹` for a symmetric matrix after rejecting near-singular input:
/// singular when `min |λ| ≤ rel_threshold · max |λ|`.
pub fn checked_symmetric_inverse<T: Real>(
    a: &ArrayView2<'_, T>,
    rel_threshold: T,
    what: &'static str,
) -> Result<Array2<T>> {
    if !all_finite(a) {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let eig = symmetric_eigen(a);
    let max = eig.max_abs();
    let min = eig.values.iter().fold(T::infinity(), |m, v| m.min(v.abs()));
    if max == T::zero() || min <= rel_threshold * max {
        let ratio = if max == T::zero() { 0.0 } else { (min / max).to_f64().unwrap_or(0.0) };
        return Err(Error::Singular { what, ratio });
    }
    let inv = Lu::factor(a)?.inverse();
    Ok(symmetrize(&inv.view()))
}
