//! Per-drop cluster/ray small-scale parameter generation: exponential delay
//! profile, power law with per-cluster shadowing, inverse-Gaussian angle
//! mapping, XPR and polarization phases, absolute delays, and the sub-cluster
//! split of the two strongest clusters.
//!
//! No scenario constants are hard-coded here; everything arrives through
//! [`ScenarioParams`], normally populated from the simulator config file.

use crate::error::{Error, Result};
use crate::geometry::wrap_angle;
use crate::nearfield::NearFieldParams;
use crate::scalar::Scalar;
use crate::sns_stochastic::SnsScenarioParams;
use crate::Scenario;
use rand::Rng;

/// Scenario-level small-scale parameter set.
#[derive(Debug, Clone)]
pub struct ScenarioParams<F> {
    pub scenario: Scenario,
    /// Cluster count N.
    pub n_clusters: usize,
    /// Rays per cluster M.
    pub rays_per_cluster: usize,
    /// Delay spread DS, seconds.
    pub delay_spread: F,
    /// Delay distribution proportionality factor r_tau (> 1).
    pub delay_scaling: F,
    /// Per-cluster shadowing standard deviation, dB.
    pub cluster_shadowing_db: F,
    /// Azimuth/zenith spreads of departure/arrival, degrees.
    pub asd_deg: F,
    pub asa_deg: F,
    pub zsd_deg: F,
    pub zsa_deg: F,
    /// Ricean K-factor mean and std, dB.
    pub k_mean_db: F,
    pub k_std_db: F,
    /// XPR mean and std, dB.
    pub xpr_mean_db: F,
    pub xpr_std_db: F,
    /// Cluster delay spread c_DS, seconds (sub-cluster offsets scale).
    pub cluster_delay_spread: F,
    /// Excess-delay lognormal parameters: delta_tau = 10^X seconds with
    /// X ~ N(mu, sigma). Applied in NLOS condition only.
    pub excess_delay_lg_mu: F,
    pub excess_delay_lg_sigma: F,
    /// Azimuth/zenith inverse-Gaussian envelope scaling constants.
    pub c_phi: F,
    pub c_theta: F,
    /// Intra-cluster angular spreads, degrees.
    pub cluster_asd_deg: F,
    pub cluster_asa_deg: F,
    pub cluster_zsd_deg: F,
    pub cluster_zsa_deg: F,
    /// Fixed ray offset table; length must equal `rays_per_cluster`,
    /// unit RMS by convention.
    pub ray_offsets: Vec<F>,
    /// Ray partition (0-indexed) and delay-offset multipliers for the
    /// sub-cluster split of the two strongest clusters.
    pub subcluster_rays: [Vec<usize>; 3],
    pub subcluster_offset_scale: [F; 3],
    /// Whether cluster powers feeding the visibility-probability model are
    /// post-K-factor scaled in LOS (see `sns_stochastic`).
    pub vp_power_post_k: bool,
    /// Near-field propagation parameters (specular count, Beta shapes).
    pub near_field: NearFieldParams<F>,
    /// Stochastic SNS parameters.
    pub sns: SnsScenarioParams<F>,
}

impl<F: Scalar> ScenarioParams<F> {
    pub fn validate(&self) -> Result<()> {
        if self.n_clusters < self.near_field.n_spec + 1 {
            return Err(Error::InvalidConfig(format!(
                "cluster count {} must be >= n_spec + 1 = {}",
                self.n_clusters,
                self.near_field.n_spec + 1
            )));
        }
        if self.rays_per_cluster == 0 {
            return Err(Error::InvalidConfig("rays_per_cluster must be >= 1".into()));
        }
        for (name, v) in [
            ("delay_spread", self.delay_spread),
            ("asd_deg", self.asd_deg),
            ("asa_deg", self.asa_deg),
            ("zsd_deg", self.zsd_deg),
            ("zsa_deg", self.zsa_deg),
        ] {
            if !(v > F::zero()) {
                return Err(Error::InvalidConfig(format!("{name} must be > 0")));
            }
        }
        if !(self.delay_scaling > F::one()) {
            return Err(Error::InvalidConfig("delay_scaling must be > 1".into()));
        }
        if self.ray_offsets.len() != self.rays_per_cluster {
            return Err(Error::InvalidConfig(format!(
                "ray_offsets has {} entries, expected rays_per_cluster = {}",
                self.ray_offsets.len(),
                self.rays_per_cluster
            )));
        }
        let mut seen = vec![false; self.rays_per_cluster];
        for set in &self.subcluster_rays {
            for &m in set {
                if m >= self.rays_per_cluster || seen[m] {
                    return Err(Error::InvalidConfig(
                        "subcluster_rays must partition 0..rays_per_cluster".into(),
                    ));
                }
                seen[m] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidConfig(
                "subcluster_rays must cover every ray index".into(),
            ));
        }
        self.near_field.validate()?;
        self.sns.validate()?;
        Ok(())
    }
}

/// Ray angles, radians.
#[derive(Debug, Clone, Copy)]
pub struct RayAngles<F> {
    pub aod: F,
    pub zod: F,
    pub aoa: F,
    pub zoa: F,
}

/// Polarization phases, radians in [0, 2pi).
#[derive(Debug, Clone, Copy)]
pub struct PolPhases<F> {
    pub tt: F,
    pub tp: F,
    pub pt: F,
    pub pp: F,
}

/// LOS direction angles of a drop (departure at TX, arrival at RX).
#[derive(Debug, Clone, Copy)]
pub struct LosAngles<F> {
    pub aod: F,
    pub zod: F,
    pub aoa: F,
    pub zoa: F,
}

/// Sub-cluster split of the two strongest clusters.
#[derive(Debug, Clone)]
pub struct SubClusterMap<F> {
    /// Indices of the two split clusters (strongest first).
    pub split_clusters: [usize; 2],
    /// Ray index sets R_1, R_2, R_3 (0-indexed, disjoint cover of 0..M).
    pub ray_sets: [Vec<usize>; 3],
    /// Delay offsets per sub-cluster, seconds.
    pub delay_offsets: [F; 3],
}

impl<F: Scalar> SubClusterMap<F> {
    pub fn is_split(&self, cluster: usize) -> bool {
        self.split_clusters.contains(&cluster)
    }

    /// Sub-cluster index of ray `m` (0, 1, or 2).
    pub fn subcluster_of_ray(&self, m: usize) -> usize {
        for (i, set) in self.ray_sets.iter().enumerate() {
            if set.contains(&m) {
                return i;
            }
        }
        // validate() guarantees the partition covers every ray.
        unreachable!("ray index outside sub-cluster partition")
    }
}

/// Per-drop small-scale parameter set.
#[derive(Debug, Clone)]
pub struct ClusterSet<F> {
    /// Relative cluster delays, seconds; sorted ascending with delays[0] = 0.
    pub delays: Vec<F>,
    /// Normalized cluster powers, sum = 1.
    pub powers: Vec<F>,
    /// Per (cluster, ray) angles.
    pub angles: Vec<Vec<RayAngles<F>>>,
    /// Per (cluster, ray) XPR, linear.
    pub xpr: Vec<Vec<F>>,
    /// Per (cluster, ray) polarization phases.
    pub phases: Vec<Vec<PolPhases<F>>>,
    /// Absolute delays per cluster: d_3D/c + tau_n + delta_tau, seconds.
    pub absolute_delays: Vec<F>,
    /// Excess delay of the drop, seconds (0 in LOS condition).
    pub excess_delay: F,
    /// Sub-cluster split, present once `split_subclusters` has run.
    pub subclusters: Option<SubClusterMap<F>>,
}

impl<F: Scalar> ClusterSet<F> {
    pub fn n_clusters(&self) -> usize {
        self.delays.len()
    }

    pub fn rays_per_cluster(&self) -> usize {
        self.angles.first().map_or(0, |a| a.len())
    }
}

/// Exponential-profile relative delays: -r_tau·DS·ln U, sorted, min shifted
/// to zero.
pub fn generate_delays<F: Scalar, R: Rng + ?Sized>(
    params: &ScenarioParams<F>,
    rng: &mut R,
) -> Vec<F> {
    let scale = params.delay_scaling * params.delay_spread;
    let mut delays: Vec<F> = (0..params.n_clusters)
        .map(|_| -scale * F::open_01(rng).ln())
        .collect();
    delays.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min = delays[0];
    for d in &mut delays {
        *d -= min;
    }
    delays
}

/// Cluster powers: exponential delay weighting with per-cluster lognormal
/// shadowing, normalized to unit sum.
pub fn generate_powers<F: Scalar, R: Rng + ?Sized>(
    delays: &[F],
    params: &ScenarioParams<F>,
    rng: &mut R,
) -> Vec<F> {
    let r_tau = params.delay_scaling;
    let ds = params.delay_spread;
    let mut powers: Vec<F> = delays
        .iter()
        .map(|&tau| {
            let shadow_db = F::standard_normal(rng) * params.cluster_shadowing_db;
            (-tau * (r_tau - F::one()) / (r_tau * ds)).exp() * (-shadow_db).db_to_linear()
        })
        .collect();
    let total: F = powers.iter().copied().sum();
    for p in &mut powers {
        *p /= total;
    }
    powers
}

/// LOS correction factors for the angle envelope constants (functions of the
/// Ricean K-factor in dB).
fn c_phi_los_factor<F: Scalar>(k_db: F) -> F {
    F::lit(1.1035) - F::lit(0.028) * k_db - F::lit(0.002) * k_db * k_db
        + F::lit(0.0001) * k_db * k_db * k_db
}

fn c_theta_los_factor<F: Scalar>(k_db: F) -> F {
    F::lit(1.3086) + F::lit(0.0339) * k_db - F::lit(0.0077) * k_db * k_db
        + F::lit(0.0002) * k_db * k_db * k_db
}

/// Per-ray angles from the inverse-Gaussian envelope mapping: stronger
/// clusters land nearer the LOS direction; fixed intra-cluster offsets scale
/// with the cluster angular spreads. Zenith angles are clipped to [0, pi].
///
/// `k_db` is the drop's Ricean K-factor in dB, used only in LOS condition to
/// rescale the envelope constants and pin cluster 1 to the LOS direction.
pub fn generate_angles<F: Scalar, R: Rng + ?Sized>(
    powers: &[F],
    params: &ScenarioParams<F>,
    los_angles: LosAngles<F>,
    los: bool,
    k_db: F,
    rng: &mut R,
) -> Vec<Vec<RayAngles<F>>> {
    let n = powers.len();
    let m = params.rays_per_cluster;
    let deg = F::PI() / F::lit(180.0);
    let p_max = powers.iter().copied().fold(F::zero(), F::max);

    let c_phi = if los {
        params.c_phi * c_phi_los_factor(k_db)
    } else {
        params.c_phi
    };
    let c_theta = if los {
        params.c_theta * c_theta_los_factor(k_db)
    } else {
        params.c_theta
    };

    // Azimuth envelope: phi'_n = 2(AS/1.4)·sqrt(-ln(P_n/P_max))/C_phi.
    let azimuth_centers = |spread_deg: F, center: F, rng: &mut R| -> Vec<F> {
        let spread = spread_deg * deg;
        let sigma_jitter = spread / F::lit(7.0);
        let mut first_term = F::zero();
        let mut out = Vec::with_capacity(n);
        for (i, &p) in powers.iter().enumerate() {
            let envelope =
                F::lit(2.0) * (spread / F::lit(1.4)) * (-(p / p_max).ln()).max(F::zero()).sqrt()
                    / c_phi;
            let sign = if F::uniform_01(rng) < F::lit(0.5) {
                F::one()
            } else {
                -F::one()
            };
            let jitter = F::standard_normal(rng) * sigma_jitter;
            let term = sign * envelope + jitter;
            if i == 0 {
                first_term = term;
            }
            let angle = if los { term - first_term } else { term } + center;
            out.push(angle);
        }
        out
    };

    // Zenith envelope: theta'_n = -ZS·ln(P_n/P_max)/C_theta.
    let zenith_centers = |spread_deg: F, center: F, rng: &mut R| -> Vec<F> {
        let spread = spread_deg * deg;
        let sigma_jitter = spread / F::lit(7.0);
        let mut first_term = F::zero();
        let mut out = Vec::with_capacity(n);
        for (i, &p) in powers.iter().enumerate() {
            let envelope = -spread * (p / p_max).ln() / c_theta;
            let sign = if F::uniform_01(rng) < F::lit(0.5) {
                F::one()
            } else {
                -F::one()
            };
            let jitter = F::standard_normal(rng) * sigma_jitter;
            let term = sign * envelope + jitter;
            if i == 0 {
                first_term = term;
            }
            let angle = if los { term - first_term } else { term } + center;
            out.push(angle);
        }
        out
    };

    let aod_c = azimuth_centers(params.asd_deg, los_angles.aod, rng);
    let aoa_c = azimuth_centers(params.asa_deg, los_angles.aoa, rng);
    let zod_c = zenith_centers(params.zsd_deg, los_angles.zod, rng);
    let zoa_c = zenith_centers(params.zsa_deg, los_angles.zoa, rng);

    let c_asd = params.cluster_asd_deg * deg;
    let c_asa = params.cluster_asa_deg * deg;
    let c_zsd = params.cluster_zsd_deg * deg;
    let c_zsa = params.cluster_zsa_deg * deg;

    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let off = params.ray_offsets[j];
                    RayAngles {
                        aod: wrap_angle(aod_c[i] + c_asd * off),
                        zod: (zod_c[i] + c_zsd * off).clamp(F::zero(), F::PI()),
                        aoa: wrap_angle(aoa_c[i] + c_asa * off),
                        zoa: (zoa_c[i] + c_zsa * off).clamp(F::zero(), F::PI()),
                    }
                })
                .collect()
        })
        .collect()
}

/// XPR values (linear) and the four i.i.d. uniform polarization phases per
/// ray.
pub fn generate_xpr_phases<F: Scalar, R: Rng + ?Sized>(
    params: &ScenarioParams<F>,
    rng: &mut R,
) -> (Vec<Vec<F>>, Vec<Vec<PolPhases<F>>>) {
    let two_pi = F::lit(2.0) * F::PI();
    let mut xpr = Vec::with_capacity(params.n_clusters);
    let mut phases = Vec::with_capacity(params.n_clusters);
    for _ in 0..params.n_clusters {
        let mut row_x = Vec::with_capacity(params.rays_per_cluster);
        let mut row_p = Vec::with_capacity(params.rays_per_cluster);
        for _ in 0..params.rays_per_cluster {
            let x_db = params.xpr_mean_db + F::standard_normal(rng) * params.xpr_std_db;
            row_x.push(x_db.db_to_linear());
            row_p.push(PolPhases {
                tt: F::uniform_01(rng) * two_pi,
                tp: F::uniform_01(rng) * two_pi,
                pt: F::uniform_01(rng) * two_pi,
                pp: F::uniform_01(rng) * two_pi,
            });
        }
        xpr.push(row_x);
        phases.push(row_p);
    }
    (xpr, phases)
}

/// Absolute delays: d_3D/c + tau_n + delta_tau. The excess delay delta_tau is
/// zero in LOS condition and one lognormal draw per drop otherwise.
///
/// Returns (absolute delays per cluster, delta_tau).
pub fn absolute_delays<F: Scalar, R: Rng + ?Sized>(
    delays: &[F],
    d_3d: F,
    los: bool,
    params: &ScenarioParams<F>,
    rng: &mut R,
) -> (Vec<F>, F) {
    let excess = if los {
        F::zero()
    } else {
        let x = params.excess_delay_lg_mu + F::standard_normal(rng) * params.excess_delay_lg_sigma;
        F::lit(10.0).powf(x)
    };
    let base = d_3d / F::c0() + excess;
    (delays.iter().map(|&t| base + t).collect(), excess)
}

/// Attach the sub-cluster split to the two strongest clusters (ties broken
/// by lower index). Errors if fewer than two clusters exist.
pub fn split_subclusters<F: Scalar>(
    clusters: &mut ClusterSet<F>,
    params: &ScenarioParams<F>,
) -> Result<()> {
    let n = clusters.n_clusters();
    if n < 2 {
        return Err(Error::TooFewClusters(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        clusters.powers[b]
            .partial_cmp(&clusters.powers[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let split = [order[0], order[1]];
    let offsets = [
        params.subcluster_offset_scale[0] * params.cluster_delay_spread,
        params.subcluster_offset_scale[1] * params.cluster_delay_spread,
        params.subcluster_offset_scale[2] * params.cluster_delay_spread,
    ];
    clusters.subclusters = Some(SubClusterMap {
        split_clusters: split,
        ray_sets: params.subcluster_rays.clone(),
        delay_offsets: offsets,
    });
    Ok(())
}

/// Default TR 38.901-style ray partition for M = 20 (0-indexed).
pub fn default_subcluster_rays() -> [Vec<usize>; 3] {
    [
        vec![0, 1, 2, 3, 4, 5, 6, 7, 18, 19],
        vec![8, 9, 10, 11, 16, 17],
        vec![12, 13, 14, 15],
    ]
}

/// Default unit-RMS ray offsets for M = 20.
pub fn default_ray_offsets<F: Scalar>() -> Vec<F> {
    [
        0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715, 0.5129, -0.5129,
        0.6797, -0.6797, 0.8844, -0.8844, 1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551,
    ]
    .iter()
    .map(|&x| F::lit(x))
    .collect()
}
