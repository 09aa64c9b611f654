//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Two-tier tolerance pair: `eq` decides "numerically zero", `nonzero`
/// decides "robustly nonzero". Values strictly between the two are neither.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    pub eq: T,
    pub nonzero: T,
}

impl<T: Real> Tolerances<T> {
    pub const DEFAULT_EQ: f64 = 1e-9;
    pub const DEFAULT_NONZERO: f64 = 1e-6;

    pub fn new(eq: T, nonzero: T) -> Self {
        Self { eq, nonzero }
    }

    /// Tolerances suited to the scalar's precision: the `f64` defaults, or
    /// loosened proportionally to machine epsilon for narrower types.
    pub fn for_precision() -> Self {
        let ratio = T::epsilon().as_f64() / f64::EPSILON;
        let scale = ratio.sqrt().max(1.0);
        Self { eq: T::lit(Self::DEFAULT_EQ * scale), nonzero: T::lit(Self::DEFAULT_NONZERO * scale) }
    }

    pub fn is_valid(&self) -> bool {
        self.eq > T::zero() && self.nonzero > T::zero() && self.eq < self.nonzero
    }
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self::new(T::lit(Self::DEFAULT_EQ), T::lit(Self::DEFAULT_NONZERO))
    }
}
