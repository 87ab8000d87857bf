//! Scalar abstractions shared by the expression evaluator, the jet type and
//! the tensor kernels.
//!
//! Tensor algebra that needs only ring operations is written against
//! [`Field`], so it runs over exact rationals as well as floats. Anything
//! that takes square roots or compares against tolerances uses [`Real`].

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive, Num};

pub trait Field:
    Num + Copy + Neg<Output = Self> + FromPrimitive + Debug + Send + Sync + 'static
{
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("small integer not representable")
    }
}

impl<T> Field for T where
    T: Num + Copy + Neg<Output = T> + FromPrimitive + Debug + Send + Sync + 'static
{
}

pub trait Real: Field + Float {
    /// Converts an `f64` literal. Panics only for types that cannot hold it.
    fn lit(v: f64) -> Self {
        <Self as num_traits::NumCast>::from(v).expect("literal not representable")
    }

    fn as_f64(self) -> f64 {
        <Self as num_traits::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where T: Field + Float {}

/// Scalar-like values the metric expression language can be evaluated over:
/// plain floats or [`Jet3`](crate::jet::Jet3).
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Extra information needed to build a constant (the variable count for jets).
    type Context: Copy;

    fn constant(ctx: Self::Context, v: f64) -> Self;
    /// The order-zero part, used for domain checks.
    fn real(&self) -> f64;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn tan(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn atan(&self) -> Self;
    fn powi(&self, k: i32) -> Self;
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            type Context = ();

            fn constant(_: (), v: f64) -> Self {
                v as $t
            }
            fn real(&self) -> f64 {
                *self as f64
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn tan(&self) -> Self {
                <$t>::tan(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn atan(&self) -> Self {
                <$t>::atan(*self)
            }
            fn powi(&self, k: i32) -> Self {
                <$t>::powi(*self, k)
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);
