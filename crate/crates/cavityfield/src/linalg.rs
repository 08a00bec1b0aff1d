//! Dense linear-algebra helpers shared by the mapping and solver modules.
//!
//! Everything is a thin wrapper over nalgebra LU factorizations. Each factor
//! carries a cheap condition estimate (ratio of extreme pivot magnitudes);
//! that is coarse, but it is only used for diagnostics and for refusing
//! outright singular systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Condition estimate above which a solve is reported as singular.
const SINGULAR_THRESHOLD: f64 = 1e14;

fn pivot_ratio_complex(lu: &nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let u = lu.u();
    let n = u.nrows().min(u.ncols());
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..n {
        let m = u[(i, i)].norm();
        lo = lo.min(m);
        hi = hi.max(m);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

fn pivot_ratio_real(lu: &nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let u = lu.u();
    let n = u.nrows().min(u.ncols());
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for i in 0..n {
        let m = u[(i, i)].abs();
        lo = lo.min(m);
        hi = hi.max(m);
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// LU factorization of a complex dense matrix, reusable across solves.
pub struct ComplexLu {
    lu: nalgebra::linalg::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
    context: &'static str,
}

impl ComplexLu {
    pub fn factor(matrix: DMatrix<Complex64>, context: &'static str) -> Result<Self> {
        let lu = matrix.lu();
        let condition = pivot_ratio_complex(&lu);
        if !condition.is_finite() || condition > SINGULAR_THRESHOLD {
            return Err(Error::SingularSystem { context, condition });
        }
        Ok(Self {
            lu,
            condition,
            context,
        })
    }

    pub fn solve(&self, rhs: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        self.lu.solve(rhs).ok_or(Error::SingularSystem {
            context: self.context,
            condition: self.condition,
        })
    }

    /// Pivot-ratio condition estimate of the factored matrix.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }
}

/// Solves a real dense system once, returning the solution and a condition
/// estimate.
pub fn solve_real(
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
    context: &'static str,
) -> Result<(DVector<f64>, f64)> {
    let lu = matrix.lu();
    let condition = pivot_ratio_real(&lu);
    if !condition.is_finite() || condition > SINGULAR_THRESHOLD {
        return Err(Error::SingularSystem { context, condition });
    }
    let x = lu
        .solve(&rhs)
        .ok_or(Error::SingularSystem { context, condition })?;
    Ok((x, condition))
}

/// Solves a complex dense system once.
pub fn solve_complex(
    matrix: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
    context: &'static str,
) -> Result<(DVector<Complex64>, f64)> {
    let lu = ComplexLu::factor(matrix, context)?;
    let x = lu.solve(&rhs)?;
    Ok((x, lu.condition_estimate()))
}

/// Complex least squares via the normal equations.
///
/// The overdetermined systems this crate builds are near-orthogonal (unit
/// modulus Laurent bases with oversampled nodes, condition ~1), so squaring
/// the condition number is harmless and keeps the path deterministic.
pub fn lstsq_complex(
    matrix: &DMatrix<Complex64>,
    rhs: &DVector<Complex64>,
    context: &'static str,
) -> Result<(DVector<Complex64>, f64)> {
    let at = matrix.adjoint();
    let normal = &at * matrix;
    let b = &at * rhs;
    solve_complex(normal, b, context)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn complex_lu_roundtrip() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C::new(2.0, 1.0),
                C::new(0.0, -1.0),
                C::new(1.0, 0.0),
                C::new(3.0, 2.0),
            ],
        );
        let x_true = DVector::from_vec(vec![C::new(1.0, -2.0), C::new(0.5, 0.25)]);
        let b = &m * &x_true;
        let (x, cond) = solve_complex(m, b, "test").unwrap();
        assert!((x - x_true).norm() < 1e-12);
        assert!(cond >= 1.0);
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let err = solve_real(m, DVector::from_vec(vec![1.0, 2.0]), "test").unwrap_err();
        assert!(matches!(err, Error::SingularSystem { .. }));
    }

    #[test]
    fn least_squares_recovers_exact_fit() {
        // 4 samples of a degree-1 model: overdetermined but consistent.
        let m = DMatrix::from_fn(4, 2, |i, j| {
            let t = C::new(0.0, std::f64::consts::PI * i as f64 / 2.0).exp();
            if j == 0 {
                C::new(1.0, 0.0)
            } else {
                t
            }
        });
        let coef = DVector::from_vec(vec![C::new(2.0, 0.0), C::new(0.0, 1.0)]);
        let b = &m * &coef;
        let (x, _) = lstsq_complex(&m, &b, "test").unwrap();
        assert!((x - coef).norm() < 1e-12);
    }
}
