//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point type the library is generic over.
///
/// Implemented for `f32`, `f64` and the extended-precision types in
/// [`crate::extended`]. Tolerances are specified as `f64` and converted
/// with [`Real::of`].
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    /// Lossy conversion back to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::of(n as f64)
    }

    fn from_i64_lossy(n: i64) -> Self {
        Self::of(n as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

/// Modulus without the overflow guard of `hypot`; extended types lack a
/// native `hypot`, and magnitudes here never approach the overflow range.
pub(crate) fn cabs<T: Real>(z: Cplx<T>) -> T {
    let (a, b) = (z.re.abs(), z.im.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == T::zero() {
        return T::zero();
    }
    let r = small / big;
    big * (T::one() + r * r).sqrt()
}

/// Argument folded into `[0, 2π)`.
pub(crate) fn arg_2pi<T: Real>(z: Cplx<T>) -> T {
    let a = z.im.atan2(z.re);
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}

/// Converts a complex value between scalar types through `f64`-exact parts.
pub fn cast_complex<T: Real, U: Real>(z: Cplx<T>) -> Cplx<U> {
    Complex::new(cast_real(z.re), cast_real(z.im))
}

/// Converts between scalar types. Extended types expose their components so
/// widening conversions are exact.
pub fn cast_real<T: Real, U: Real>(x: T) -> U {
    let mut rest = x;
    let mut acc = U::zero();
    for _ in 0..4 {
        let part = rest.to_f64().unwrap_or(f64::NAN);
        acc += U::of(part);
        if part == 0.0 || !part.is_finite() {
            break;
        }
        rest -= T::of(part);
    }
    acc
}
