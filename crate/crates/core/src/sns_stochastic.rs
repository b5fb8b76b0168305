//! Stochastic BS-side spatial non-stationarity: SNS classification from a
//! per-UE probability, power-correlated visibility probabilities,
//! rectangular visibility regions on the array face, and the per-element
//! exponential roll-off attenuation outside them.
//!
//! Element coordinates live in the array's local 2-D plane in meters:
//! horizontal in [0, W], vertical in [0, H] (see
//! [`crate::geometry::ArrayGeometry::plane_coords`]).

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::Scenario;
use rand::Rng;

/// Floor applied when clipping visibility probabilities, keeping the VR area
/// positive when the fitted noise term goes negative.
const VP_FLOOR: f64 = 1e-3;

/// Stochastic SNS scenario parameters.
#[derive(Debug, Clone, Copy)]
pub struct SnsScenarioParams<F> {
    /// SNS probability distribution: Normal(mu, sigma), clipped to [0, 1].
    pub pr_mu: F,
    pub pr_sigma: F,
    /// Visibility-probability model V = A·exp(-(Pmax - P)/R) + B + xi.
    pub vp_a: F,
    pub vp_b: F,
    /// Decay constant R in dB; irrelevant (and may be absent) when A = 0.
    pub vp_r: Option<F>,
    /// Variance of the noise term xi.
    pub vp_noise_var: F,
    /// Roll-off factor C controlling attenuation outside the VR.
    pub rolloff: F,
}

impl<F: Scalar> SnsScenarioParams<F> {
    /// Shipped per-scenario defaults (roll-off 13 everywhere).
    pub fn for_scenario(scenario: Scenario) -> Self {
        let (mu, sigma, a, b, r, var) = match scenario {
            Scenario::UMa => (0.56, 0.20, 0.15, 0.45, Some(33.0), 0.0015),
            Scenario::UMi => (0.49, 0.18, 0.12, 0.48, Some(50.0), 0.001),
            Scenario::InH => (0.31, 0.08, 0.0, 0.60, None, 0.0011),
            Scenario::InF => (0.32, 0.06, 0.0, 0.57, None, 0.002),
            Scenario::RMa => (0.14, 0.08, 0.16, 0.74, Some(60.0), 0.0016),
            Scenario::SMa => (0.24, 0.07, 0.06, 0.56, Some(23.0), 0.0013),
        };
        Self {
            pr_mu: F::lit(mu),
            pr_sigma: F::lit(sigma),
            vp_a: F::lit(a),
            vp_b: F::lit(b),
            vp_r: r.map(F::lit),
            vp_noise_var: F::lit(var),
            rolloff: F::lit(13.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pr_sigma < F::zero() {
            return Err(Error::InvalidConfig("pr_sigma must be >= 0".into()));
        }
        if self.vp_b < F::zero() || self.vp_b > F::one() {
            return Err(Error::InvalidConfig("vp_b must be in [0, 1]".into()));
        }
        if !(self.rolloff > F::zero()) {
            return Err(Error::InvalidConfig("rolloff must be > 0".into()));
        }
        if self.vp_a != F::zero() && self.vp_r.is_none() {
            return Err(Error::InvalidConfig(
                "vp_r is required when vp_a is nonzero".into(),
            ));
        }
        if self.vp_noise_var < F::zero() {
            return Err(Error::InvalidConfig("vp_noise_var must be >= 0".into()));
        }
        Ok(())
    }
}

/// Per-UE SNS probability: Normal(mu, sigma) clipped to [0, 1].
pub fn sample_sns_probability<F: Scalar, R: Rng + ?Sized>(
    params: &SnsScenarioParams<F>,
    rng: &mut R,
) -> F {
    let draw = params.pr_mu + F::standard_normal(rng) * params.pr_sigma;
    draw.max(F::zero()).min(F::one())
}

/// SNS classification of a drop's clusters. In LOS condition the LOS path is
/// treated as one extra cluster and carries its own flag.
#[derive(Debug, Clone)]
pub struct SnsClassification {
    pub clusters: Vec<bool>,
    pub los: Option<bool>,
}

/// Independent Bernoulli(pr_sns) classification per cluster, plus the LOS
/// cluster when present. Cluster flags are drawn first, then the LOS flag.
pub fn classify_clusters<F: Scalar, R: Rng + ?Sized>(
    pr_sns: F,
    n_clusters: usize,
    los: bool,
    rng: &mut R,
) -> SnsClassification {
    let clusters = (0..n_clusters)
        .map(|_| F::uniform_01(rng) < pr_sns)
        .collect();
    let los = los.then(|| F::uniform_01(rng) < pr_sns);
    SnsClassification { clusters, los }
}

/// Visibility probability from the power-correlated model
/// V = A·exp(-(Pmax - P)/R) + B + xi, clipped to (VP_FLOOR, 1]. Powers in dB.
/// The exponential term is skipped when A = 0.
pub fn visibility_probability<F: Scalar, R: Rng + ?Sized>(
    p_db: F,
    p_max_db: F,
    params: &SnsScenarioParams<F>,
    rng: &mut R,
) -> F {
    let noise = F::standard_normal(rng) * params.vp_noise_var.sqrt();
    let decay = if params.vp_a == F::zero() {
        F::zero()
    } else {
        let r = params.vp_r.expect("vp_r validated for A != 0");
        params.vp_a * (-(p_max_db - p_db) / r).exp()
    };
    (decay + params.vp_b + noise)
        .max(F::lit(VP_FLOOR))
        .min(F::one())
}

/// Which array corner anchors the VR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    BottomLeft = 0,
    BottomRight = 1,
    TopLeft = 2,
    TopRight = 3,
}

impl Corner {
    fn from_index(i: usize) -> Self {
        match i {
            0 => Corner::BottomLeft,
            1 => Corner::BottomRight,
            2 => Corner::TopLeft,
            _ => Corner::TopRight,
        }
    }
}

/// Rectangular visibility region anchored at one array corner.
#[derive(Debug, Clone, Copy)]
pub struct VisibilityRegion<F> {
    /// Reference corner coordinates.
    pub x0: F,
    pub y0: F,
    pub corner: Corner,
    /// VR width and height.
    pub a: F,
    pub b: F,
    /// VR corner diagonally opposite the reference corner.
    pub xa: F,
    pub yb: F,
    /// Array corner on the diagonal from the reference corner.
    pub x_far: F,
    pub y_far: F,
    /// Distance from (xa, yb) to (x_far, y_far).
    pub diagonal: F,
}

/// Generate a VR with area V·W·H: width a ~ U(V·W, W), height b = V·H·W/a,
/// reference corner uniform over the four array corners.
pub fn generate_vr<F: Scalar, R: Rng + ?Sized>(
    v: F,
    width: F,
    height: F,
    rng: &mut R,
) -> VisibilityRegion<F> {
    let lo = v * width;
    let a = if lo >= width {
        width
    } else {
        rng.gen_range(lo..width)
    };
    let b = v * height * width / a;
    let corner = Corner::from_index(rng.gen_range(0..4usize));
    let (x0, y0) = match corner {
        Corner::BottomLeft => (F::zero(), F::zero()),
        Corner::BottomRight => (width, F::zero()),
        Corner::TopLeft => (F::zero(), height),
        Corner::TopRight => (width, height),
    };
    let sx = if x0 == F::zero() { F::one() } else { -F::one() };
    let sy = if y0 == F::zero() { F::one() } else { -F::one() };
    let xa = x0 + sx * a;
    let yb = y0 + sy * b;
    let x_far = width - x0;
    let y_far = height - y0;
    let diagonal = ((x_far - xa).powi(2) + (y_far - yb).powi(2)).sqrt();
    VisibilityRegion {
        x0,
        y0,
        corner,
        a,
        b,
        xa,
        yb,
        x_far,
        y_far,
        diagonal,
    }
}

/// Per-element power attenuation factor: 1 inside the VR, exponential
/// roll-off exp(-C·d/D) outside, with d the distance to the nearest point on
/// the VR boundary. A VR covering the whole array (D = 0) attenuates nothing.
pub fn attenuation_factor<F: Scalar>(x: F, y: F, vr: &VisibilityRegion<F>, rolloff: F) -> F {
    let in_x = (x - vr.x0).abs() <= vr.a;
    let in_y = (y - vr.y0).abs() <= vr.b;
    if in_x && in_y {
        return F::one();
    }
    if vr.diagonal <= F::zero() {
        return F::one();
    }
    let d = if !in_x && in_y {
        (x - vr.xa).abs()
    } else if in_x && !in_y {
        (y - vr.yb).abs()
    } else {
        ((x - vr.xa).powi(2) + (y - vr.yb).powi(2)).sqrt()
    };
    (-rolloff * d / vr.diagonal).exp()
}

/// Attenuation over every element plane coordinate; `None` stands for an SS
/// cluster (all ones).
pub fn attenuation_field<F: Scalar>(
    vr: Option<&VisibilityRegion<F>>,
    coords: &[(F, F)],
    rolloff: F,
) -> Vec<F> {
    match vr {
        None => vec![F::one(); coords.len()],
        Some(vr) => coords
            .iter()
            .map(|&(x, y)| attenuation_factor(x, y, vr, rolloff))
            .collect(),
    }
}

/// Full per-cluster visibility state.
#[derive(Debug, Clone)]
pub struct ClusterVisibility<F> {
    pub is_sns: bool,
    /// Visibility probability; 1 for SS clusters.
    pub vp: F,
    pub region: Option<VisibilityRegion<F>>,
    /// Per-grid-position attenuation, aligned with `plane_coords`.
    pub alpha: Vec<F>,
}

impl<F: Scalar> ClusterVisibility<F> {
    /// Spatially stationary cluster: no attenuation anywhere.
    pub fn stationary(n_positions: usize) -> Self {
        Self {
            is_sns: false,
            vp: F::one(),
            region: None,
            alpha: vec![F::one(); n_positions],
        }
    }
}

/// Build the visibility state for one cluster. For SNS clusters this draws
/// the VP from the cluster's power gap to the strongest cluster, generates
/// the VR, and evaluates the attenuation field.
pub fn cluster_visibility<F: Scalar, R: Rng + ?Sized>(
    is_sns: bool,
    p_db: F,
    p_max_db: F,
    width: F,
    height: F,
    coords: &[(F, F)],
    params: &SnsScenarioParams<F>,
    rng: &mut R,
) -> ClusterVisibility<F> {
    if !is_sns {
        return ClusterVisibility::stationary(coords.len());
    }
    let vp = visibility_probability(p_db, p_max_db, params, rng);
    let vr = generate_vr(vp, width, height, rng);
    let alpha = attenuation_field(Some(&vr), coords, params.rolloff);
    ClusterVisibility {
        is_sns: true,
        vp,
        region: Some(vr),
        alpha,
    }
}
