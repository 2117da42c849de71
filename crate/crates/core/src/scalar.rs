use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar used by every field, force and fitness computation.
///
/// Implemented for `f32` and `f64`. Randomness is always drawn as `f64` and
/// converted, so seeded runs produce the same draws regardless of `T`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal or draw.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits in a float")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `[x]⁺`
#[inline]
pub fn pos_part<T: Scalar>(x: T) -> T {
    x.max(T::zero())
}

/// `[x]⁻`, returned as a nonnegative magnitude.
#[inline]
pub fn neg_part<T: Scalar>(x: T) -> T {
    (-x).max(T::zero())
}

/// Sign with `sign(0) = 0`; `Float::signum` maps `+0` to `1`.
#[inline]
pub fn sign0<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}
