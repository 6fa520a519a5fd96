//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use ndarray::{Array1, Array2};
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar the library is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance used for invariant checks when the caller does not supply one.
    fn default_tolerance() -> Self;

    /// Converts an `f64` literal. Every `f64` value is representable (possibly rounded) in the
    /// supported scalar types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Real for f64 {
    fn default_tolerance() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }
}

pub type C<T> = Complex<T>;
pub type CMatrix<T> = Array2<Complex<T>>;
pub type CVector<T> = Array1<Complex<T>>;

#[inline]
pub(crate) fn real<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn scale<T: Real>(z: C<T>, s: T) -> C<T> {
    Complex::new(z.re * s, z.im * s)
}
