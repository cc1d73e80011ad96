//! Dense complex linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

fn all_finite<'a>(it: impl IntoIterator<Item = &'a C64>) -> bool {
    it.into_iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn solve(a: &CMatrix, b: &CVector, context: &str) -> Result<CVector> {
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::SingularSystem { context: context.to_string() })?;
    if !all_finite(x.iter()) {
        return Err(Error::SingularSystem { context: context.to_string() });
    }
    Ok(x)
}

pub fn solve_matrix(a: &CMatrix, b: &CMatrix, context: &str) -> Result<CMatrix> {
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::SingularSystem { context: context.to_string() })?;
    if !all_finite(x.iter()) {
        return Err(Error::SingularSystem { context: context.to_string() });
    }
    Ok(x)
}

pub fn inverse(a: &CMatrix, context: &str) -> Result<CMatrix> {
    solve_matrix(a, &CMatrix::identity(a.nrows(), a.ncols()), context)
}

/// 2-norm condition number from the singular values; infinite when singular.
pub fn condition_number(a: &CMatrix) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues and right eigenvectors (unit-norm columns) of a general complex matrix.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: CMatrix,
}

pub fn eig(m: &CMatrix) -> Result<Eigen> {
    let n = m.nrows();
    if !all_finite(m.iter()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let scale = max_abs(&t).max(f64::MIN_POSITIVE);
    let tiny = 1e-14 * scale;
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (i, &lambda) in values.iter().enumerate() {
        let mut x = CVector::zeros(n);
        x[i] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut s = C64::new(0.0, 0.0);
            for l in j + 1..=i {
                s += t[(j, l)] * x[l];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < tiny {
                d = C64::new(tiny, 0.0);
            }
            x[j] = -s / d;
        }
        let v = &q * x;
        let nv = v.norm();
        vectors.set_column(i, &(v / C64::new(nv, 0.0)));
    }
    Ok(Eigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eig_residual_and_trace() {
        let n = 6;
        let m = CMatrix::from_fn(n, n, |i, j| {
            C64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0)
        });
        let e = eig(&m).unwrap();
        for i in 0..n {
            let v = e.vectors.column(i).into_owned();
            let r = &m * &v - &v * e.values[i];
            assert!(r.norm() < 1e-10 * max_abs(&m), "residual {}", r.norm());
        }
        let tr: C64 = (0..n).map(|i| m[(i, i)]).sum();
        let sum: C64 = e.values.iter().sum();
        assert!((tr - sum).norm() < 1e-10);
    }

    #[test]
    fn singular_detected() {
        let a = CMatrix::zeros(3, 3);
        assert!(solve(&a, &CVector::zeros(3), "zero").is_err());
        assert!(condition_number(&a).is_infinite());
    }
}
