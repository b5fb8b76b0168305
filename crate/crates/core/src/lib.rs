//! Geometry-based stochastic channel generator for extremely large-scale
//! MIMO arrays in the upper mid-band, with a spherical-wavefront near-field
//! extension and two spatial non-stationarity models (stochastic visibility
//! regions and physical knife-edge blockers) layered on a cluster/ray
//! small-scale engine, plus a Monte Carlo harness for capacity and
//! coupling-loss evaluation.
//!
//! All numerics are generic over the [`Scalar`] float type; the simulator
//! binary and the bundled configs run the `f64` lane.

pub mod config;
pub mod error;
pub mod export;
pub mod geometry;
pub mod metrics;
pub mod nearfield;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod smallscale;
pub mod sns_blocker;
pub mod sns_stochastic;
pub mod sns_ue;
pub mod synthesis;

pub use error::{Error, Result};
pub use scalar::{Scalar, SPEED_OF_LIGHT};

use serde::Deserialize;

/// Deployment scenario, selecting the shipped near-field and SNS parameter
/// defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Scenario {
    UMa,
    UMi,
    InH,
    InF,
    RMa,
    SMa,
}

/// f64 instantiations of the common geometry types.
pub type Vec3d = geometry::Vec3<f64>;
pub type Vec3f = geometry::Vec3<f32>;
