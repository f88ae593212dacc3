//! Scalar abstraction so the search machinery runs on `f32` or `f64`.
//!
//! The shipped binaries and experiment configurations instantiate everything
//! with `f64` (see the aliases in the crate root); `f32` support exists for
//! callers that trade precision for memory.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar the optimizer, environments, and policies are generic over.
pub trait Scalar:
    num_traits::Float
    + num_traits::NumAssign
    + num_traits::ToPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::str::FromStr
    + Send
    + Sync
    + 'static
{
    /// Draw a standard-normal variate from `rng`.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw a uniform variate in `[0, 1)` from `rng`.
    fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Widen or narrow an `f64` constant (configuration values, literals).
    fn from_real(value: f64) -> Self;

    /// Exact conversion from a small count (population sizes, horizons).
    fn from_count(n: usize) -> Self;

    /// Narrowing view used for reporting and statistics.
    fn to_real(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.random::<$t>()
            }

            fn from_real(value: f64) -> Self {
                value as $t
            }

            fn from_count(n: usize) -> Self {
                n as $t
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
