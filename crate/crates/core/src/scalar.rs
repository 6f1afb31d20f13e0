//! Scalar abstraction: every numeric routine in this crate is generic over
//! [`Scalar`], implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Floating-point scalar the library computes with.
///
/// `cast` converts `f64` literals (physiological tables, solver coefficients)
/// into the working precision once, at construction time.
pub trait Scalar:
    Float + NumAssign + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn cast(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 constant must be representable")
    }

    /// Draws one standard-normal variate from `rng`.
    fn standard_normal<G: Rng + ?Sized>(rng: &mut G) -> Self;

    /// Draws one uniform variate on `[0, 1)` from `rng`.
    fn standard_uniform<G: Rng + ?Sized>(rng: &mut G) -> Self;
}

impl Scalar for f64 {
    fn standard_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
        rng.sample(StandardNormal)
    }

    fn standard_uniform<G: Rng + ?Sized>(rng: &mut G) -> Self {
        rng.random()
    }
}

impl Scalar for f32 {
    fn standard_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
        rng.sample(StandardNormal)
    }

    fn standard_uniform<G: Rng + ?Sized>(rng: &mut G) -> Self {
        rng.random()
    }
}

/// Two, as a scalar. Comes up often enough in the estimators to warrant this.
pub fn two<R: Scalar>() -> R {
    R::one() + R::one()
}

/// `1/2`, as a scalar.
pub fn half<R: Scalar>() -> R {
    R::one() / two()
}
