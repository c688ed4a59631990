//! Scalar abstraction shared by the quantum engine.
//!
//! Everything in [`hilbert`](crate::hilbert), [`dynamics`](crate::dynamics),
//! [`compiler`](crate::compiler) and [`lindblad`](crate::lindblad) is generic
//! over a real scalar `T: Real`; in practice this is `f64` (or `f32` for quick
//! low-precision runs).

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Real floating point scalar usable by the engine: f32 or f64.
pub trait Real: RealField + Copy + ToPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a real scalar.
pub type Amplitude<T> = Complex<T>;

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    nalgebra::convert(x)
}

/// Converts a scalar back into `f64`.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A tolerance of `x`, floored at a small multiple of the scalar's epsilon so
/// that f64 thresholds stay meaningful when instantiated with f32.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    let floor = T::default_epsilon() * lit::<T>(64.0);
    let x = lit::<T>(x);
    if x > floor {
        x
    } else {
        floor
    }
}

/// e^{iφ}
#[inline]
pub fn cis<T: Real>(phase: T) -> Complex<T> {
    Complex::new(phase.cos(), phase.sin())
}

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}

#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn argument<T: Real>(z: Complex<T>) -> T {
    z.im.atan2(z.re)
}

#[inline]
pub fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Reduces an angle into the half-open interval (−π, π].
pub fn wrap_phase<T: Real>(phase: T) -> T {
    let two_pi = T::two_pi();
    let mut p = phase % two_pi;
    if p > T::pi() {
        p -= two_pi;
    } else if p <= -T::pi() {
        p += two_pi;
    }
    p
}

/// Reduces a nonnegative angle into [0, period).
pub fn reduce_angle<T: Real>(angle: T, period: T) -> T {
    let mut a = angle % period;
    if a < T::zero() {
        a += period;
    }
    if a >= period {
        a = T::zero();
    }
    a
}
