//! The three algebraic benchmark models.
//!
//! All use four standard-normal factors with `(X1, X4)` as the correlated
//! pair; `X4` is inert in models 1 and 2:
//!
//! ```text
//! model1: Y = X1 + X2 + X2·X3
//! model2: Y = X1 + X2 + X1·X3
//! model3: Y = X1 + X2 + X3 + X4
//! ```

use crate::error::Result;
use crate::latent::{self, LatentDecomposition};
use crate::model::GsaModel;
use crate::scalar::Scalar;

/// Benchmark model identifier; string forms match the CLI config ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    Model1,
    Model2,
    Model3,
}

impl ModelId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::Model1 => "model1",
            ModelId::Model2 => "model2",
            ModelId::Model3 => "model3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "model1" => Some(ModelId::Model1),
            "model2" => Some(ModelId::Model2),
            "model3" => Some(ModelId::Model3),
            _ => None,
        }
    }
}

/// A benchmark model over the raw factor space `(X1, X2, X3, X4)`.
#[derive(Debug, Clone, Copy)]
pub struct AlgebraicModel {
    pub id: ModelId,
}

impl AlgebraicModel {
    pub fn new(id: ModelId) -> Self {
        Self { id }
    }

    pub fn eval_at<R: Scalar>(&self, x: &[R]) -> R {
        debug_assert_eq!(x.len(), 4);
        match self.id {
            ModelId::Model1 => x[0] + x[1] + x[1] * x[2],
            ModelId::Model2 => x[0] + x[1] + x[0] * x[2],
            ModelId::Model3 => x[0] + x[1] + x[2] + x[3],
        }
    }
}

impl<R: Scalar> GsaModel<R> for AlgebraicModel {
    fn dimension(&self) -> usize {
        4
    }

    fn factor_names(&self) -> Vec<String> {
        vec!["X1".into(), "X2".into(), "X3".into(), "X4".into()]
    }

    fn correlated_pair(&self) -> Option<(usize, usize)> {
        Some((0, 3))
    }

    fn eval(&self, coords: &[R]) -> R {
        self.eval_at(coords)
    }
}

/// A benchmark model lifted onto the independent factor set
/// `(eps1, X2, X3, eps4, eta)` via a latent decomposition of `(X1, X4)`.
#[derive(Debug, Clone, Copy)]
pub struct LiftedModel<R> {
    pub base: AlgebraicModel,
    pub decomposition: LatentDecomposition<R>,
}

/// Builds the lifted model for the given correlation.
pub fn latent_lift<R: Scalar>(base: AlgebraicModel, rho: R) -> Result<LiftedModel<R>> {
    Ok(LiftedModel { base, decomposition: latent::decompose(rho)? })
}

impl<R: Scalar> LiftedModel<R> {
    /// Evaluates at `(eps1, x2, x3, eps4, eta)` where the unique variances
    /// are supplied pre-scaled to variance `1 − |rho|`.
    pub fn eval_lifted(&self, v: &[R]) -> R {
        debug_assert_eq!(v.len(), 5);
        let (eps1, x2, x3, eps4, eta) = (v[0], v[1], v[2], v[3], v[4]);
        let (x1, x4) = latent::reconstruct_pair(eta, eps1, eps4, &self.decomposition);
        self.base.eval_at(&[x1, x2, x3, x4])
    }
}

/// The lifted model takes standard-normal coordinates for every factor, so
/// the unique-variance coordinates are scaled by `sqrt(1 − |rho|)` before the
/// reconstruction. Sensitivity indices are invariant to that scaling.
impl<R: Scalar> GsaModel<R> for LiftedModel<R> {
    fn dimension(&self) -> usize {
        5
    }

    fn factor_names(&self) -> Vec<String> {
        vec!["eps1".into(), "X2".into(), "X3".into(), "eps4".into(), "eta".into()]
    }

    fn eval(&self, coords: &[R]) -> R {
        let s1 = self.decomposition.sigma1_sq.sqrt();
        let s4 = self.decomposition.sigma2_sq.sqrt();
        self.eval_lifted(&[coords[0] * s1, coords[1], coords[2], coords[3] * s4, coords[4]])
    }
}
