//! Floating-point scalar abstraction.
//!
//! All channel math in this crate is written against [`Scalar`] so the same
//! generator runs in `f32` or `f64`. The simulator binary and the bundled
//! configs use the `f64` lane; `f32` exists for memory-bound sweeps.

use rand::distributions::uniform::SampleUniform;
use rand::Rng;
use rand_distr::Distribution;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Floating-point scalar: `f32` or `f64`.
///
/// Besides the usual `num_traits` arithmetic, the trait carries the random
/// draws the generator needs, so generic code never has to thread
/// distribution bounds around.
pub trait Scalar:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::NumAssign
    + SampleUniform
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Draw from the standard normal distribution N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw uniformly from [0, 1).
    fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw uniformly from the open interval (0, 1).
    fn open_01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Draw from Beta(alpha, beta). Panics if the shape parameters are not
    /// both positive and finite; validate configs before sampling.
    fn beta_sample<R: Rng + ?Sized>(alpha: Self, beta: Self, rng: &mut R) -> Self;

    /// Convert an `f64` literal. Lossy for `f32`; panics on non-representable
    /// values, which cannot happen for the in-range constants used here.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range for scalar type")
    }

    /// Speed of light in this scalar type, m/s.
    fn c0() -> Self {
        Self::lit(SPEED_OF_LIGHT)
    }

    /// 10^(x/10): dB power value to linear.
    fn db_to_linear(self) -> Self {
        Self::lit(10.0).powf(self / Self::lit(10.0))
    }

    /// 10·log10(x): linear power value to dB.
    fn linear_to_db(self) -> Self {
        Self::lit(10.0) * self.log10()
    }
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(rand_distr::StandardNormal)
            }

            fn uniform_01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.gen()
            }

            fn open_01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                rng.sample(rand_distr::Open01)
            }

            fn beta_sample<R: Rng + ?Sized>(alpha: Self, beta: Self, rng: &mut R) -> Self {
                rand_distr::Beta::new(alpha, beta)
                    .expect("invalid Beta shape parameters")
                    .sample(rng)
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
