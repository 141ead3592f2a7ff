//! Scalar abstraction shared by every numeric module.
//!
//! All dense linear algebra is generic over the real scalar so the same code
//! runs in `f64` (the default) and `f32`. Combinatorial code (typicality)
//! uses exact rational arithmetic instead and is scalar-free.

use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable throughout the crate.
///
/// `nalgebra::RealField` brings the transcendental functions needed by the
/// spectral routines; the `num_traits` casts bridge to literals and counters.
pub trait Real:
    nalgebra::RealField + FromPrimitive + ToPrimitive + Copy + Default + std::iter::Sum
{
    /// Cast an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Cast a `usize` (dimension, count) into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("dimension fits scalar")
    }

    /// Modulus of a complex number over this scalar.
    fn cx_abs(z: Cx<Self>) -> Self {
        z.norm_sqr().sqrt()
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }
}

impl Real for f64 {}
impl Real for f32 {}

/// Complex number over the crate scalar.
pub type Cx<T> = Complex<T>;

pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::of(re), T::of(im))
}

pub fn c_one<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

pub fn c_zero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}
