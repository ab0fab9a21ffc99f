//! Input-driven reservoir (echo state network) dynamics treated as a
//! skew-product flow: cocycle runs, pullback-attractor sampling, periodic
//! fixed-point orbits, Jacobian/rank diagnostics, conditional Lyapunov
//! exponents and fractal dimension estimation for the resulting point clouds.
//!
//! All numerics are generic over the scalar type through [`RealScalar`];
//! concrete `f64`/`f32` aliases for the main types live at the crate root.

pub mod dimension;
pub mod drivers;
pub mod error;
pub mod jacobian;
pub(crate) mod linalg;
pub mod pullback;
pub mod reservoir;

pub use error::{CoreError, Result};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Scalar type for every state-space computation: `f32`, `f64`, or any other
/// real field with the num-traits casts the library needs.
pub trait RealScalar: RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync {}

impl<T> RealScalar for T where T: RealField + FromPrimitive + ToPrimitive + Copy + Send + Sync {}

/// Lossless-enough conversion from an `f64` literal into the working scalar.
pub(crate) fn cvt<T: RealScalar>(v: f64) -> T {
    T::from_f64(v).expect("finite f64 must convert into the scalar type")
}

pub type ReservoirParams64 = reservoir::ReservoirParams<f64>;
pub type ReservoirParams32 = reservoir::ReservoirParams<f32>;
pub type ContractionReport64 = reservoir::ContractionReport<f64>;
pub type OdeSystem64 = drivers::OdeSystem<f64>;
pub type Trajectory64 = drivers::Trajectory<f64>;
pub type InputWindow64 = drivers::InputWindow<f64>;
pub type InputWindow32 = drivers::InputWindow<f32>;
pub type CocycleRun64 = pullback::CocycleRun<f64>;
pub type PointCloud64 = pullback::PointCloud<f64>;
pub type PointCloud32 = pullback::PointCloud<f32>;
pub type FixedPointResult64 = pullback::FixedPointResult<f64>;
pub type RankReport64 = jacobian::RankReport<f64>;
pub type SpectrumReport64 = jacobian::SpectrumReport<f64>;
pub type ScalingCurve64 = dimension::ScalingCurve<f64>;
pub type DimensionEstimate64 = dimension::DimensionEstimate<f64>;
