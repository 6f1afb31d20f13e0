//! Model abstraction shared by all estimators.
//!
//! A [`GsaModel`] is a pure function from a vector of standard-normal
//! coordinates to a scalar output. Any marginal transforms (uniform through
//! `Φ`, lognormal through `exp`) happen inside the model, so the estimators
//! only ever see the standardized coordinate space.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// A deterministic scalar-output model over standard-normal coordinates.
///
/// Evaluations must be pure; failures are signalled by returning a non-finite
/// value, which the estimators turn into an error naming the offending row.
pub trait GsaModel<R: Scalar>: Sync {
    fn dimension(&self) -> usize;

    fn factor_names(&self) -> Vec<String>;

    /// Indices of the correlated coordinate pair, when the model has one.
    fn correlated_pair(&self) -> Option<(usize, usize)> {
        None
    }

    fn eval(&self, coords: &[R]) -> R;
}

impl<R: Scalar, M: GsaModel<R> + ?Sized> GsaModel<R> for &M {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn factor_names(&self) -> Vec<String> {
        (**self).factor_names()
    }

    fn correlated_pair(&self) -> Option<(usize, usize)> {
        (**self).correlated_pair()
    }

    fn eval(&self, coords: &[R]) -> R {
        (**self).eval(coords)
    }
}

/// Evaluates every row of `rows`, optionally in parallel.
///
/// The output order is the row order either way, so results do not depend on
/// the parallelism degree. `label` names the matrix in error messages.
pub fn evaluate_rows<R: Scalar, M: GsaModel<R>>(
    model: &M,
    rows: &Matrix<R>,
    parallel: bool,
    label: &str,
) -> Result<Vec<R>> {
    let values: Vec<R> = if parallel {
        (0..rows.nrows())
            .into_par_iter()
            .map(|i| model.eval(rows.row(i)))
            .collect()
    } else {
        (0..rows.nrows()).map(|i| model.eval(rows.row(i))).collect()
    };
    if let Some(row) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEvaluation { matrix: label.to_string(), row });
    }
    Ok(values)
}

/// Wraps a model so that an independent standard coordinate pair `(u_i, u_j)`
/// is turned into a correlated pair before evaluation:
/// `x_i = u_i`, `x_j = rho·u_i + sqrt(1 − rho²)·u_j`.
///
/// Used by the grouped estimator, which pick-freezes the pair as one group of
/// independent coordinates while the model sees the joint distribution.
pub struct PairCorrelated<M, R> {
    inner: M,
    first: usize,
    second: usize,
    rho: R,
    scale: R,
}

impl<R: Scalar, M: GsaModel<R>> PairCorrelated<M, R> {
    pub fn new(inner: M, rho: R) -> Result<Self> {
        let (first, second) = inner.correlated_pair().ok_or_else(|| {
            Error::InvalidArgument("model does not declare a correlated pair".into())
        })?;
        if !rho.is_finite() || rho.abs() >= R::one() {
            return Err(Error::InvalidCorrelation(rho.to_f64().unwrap_or(f64::NAN)));
        }
        let scale = (R::one() - rho * rho).sqrt();
        Ok(Self { inner, first, second, rho, scale })
    }
}

impl<R: Scalar, M: GsaModel<R>> GsaModel<R> for PairCorrelated<M, R> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn factor_names(&self) -> Vec<String> {
        self.inner.factor_names()
    }

    fn correlated_pair(&self) -> Option<(usize, usize)> {
        Some((self.first, self.second))
    }

    fn eval(&self, coords: &[R]) -> R {
        let mut x = coords.to_vec();
        x[self.second] = self.rho * coords[self.first] + self.scale * coords[self.second];
        self.inner.eval(&x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{AlgebraicModel, ModelId};
    use crate::sampling::{standard_normal_matrix, RandomStream, SequenceKind};

    #[test]
    fn parallel_and_serial_evaluation_agree() {
        let model = AlgebraicModel::new(ModelId::Model3);
        let rows_vec: Vec<Vec<f64>> = standard_normal_matrix(
            SequenceKind::PseudoRandom,
            RandomStream::new(1),
            1000,
            4,
        );
        let rows = Matrix::from_rows(&rows_vec);
        let serial = evaluate_rows(&model, &rows, false, "A").unwrap();
        let parallel = evaluate_rows(&model, &rows, true, "A").unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn non_finite_output_is_reported_with_row() {
        struct Bad;
        impl GsaModel<f64> for Bad {
            fn dimension(&self) -> usize {
                1
            }
            fn factor_names(&self) -> Vec<String> {
                vec!["x".into()]
            }
            fn eval(&self, c: &[f64]) -> f64 {
                if c[0] > 0.0 {
                    f64::NAN
                } else {
                    c[0]
                }
            }
        }
        let rows = Matrix::from_rows(&[vec![-1.0], vec![2.0]]);
        let err = evaluate_rows(&Bad, &rows, false, "B").unwrap_err();
        match err {
            Error::NonFiniteEvaluation { matrix, row } => {
                assert_eq!(matrix, "B");
                assert_eq!(row, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pair_correlation_reproduces_target_rho() {
        let model = PairCorrelated::new(AlgebraicModel::new(ModelId::Model3), 0.7f64).unwrap();
        let n = 200_000;
        let rows: Vec<Vec<f64>> = standard_normal_matrix(
            SequenceKind::PseudoRandom,
            RandomStream::new(9),
            n,
            4,
        );
        // Reconstruct what the model sees for the pair and measure correlation.
        let mut sum_xy = 0.0;
        for r in &rows {
            let x1 = r[0];
            let x4 = 0.7 * r[0] + (1.0f64 - 0.49).sqrt() * r[3];
            sum_xy += x1 * x4;
        }
        let corr = sum_xy / n as f64;
        assert!((corr - 0.7).abs() < 0.01, "corr {corr}");
        assert_eq!(model.correlated_pair(), Some((0, 3)));
    }
}
