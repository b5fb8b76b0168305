//! Near-field propagation: spherical-wave-source distances per cluster and
//! the element-wise phase/angle machinery built on them.
//!
//! Clusters are split into specular reflections (the strongest few, whose
//! source distance equals the full propagation path length) and non-specular
//! ones, whose BS-side scaling factor is a Beta draw and whose UE-side factor
//! is its complement.

use crate::error::{Error, Result};
use crate::geometry::{angles_from_vector, Vec3};
use crate::scalar::Scalar;
use crate::smallscale::ClusterSet;
use crate::Scenario;
use rand::Rng;

/// Near-field scenario parameters: specular cluster count and the Beta
/// distribution shapes for non-specular BS-side scaling factors.
#[derive(Debug, Clone, Copy)]
pub struct NearFieldParams<F> {
    pub n_spec: usize,
    pub beta_alpha: F,
    pub beta_beta: F,
}

impl<F: Scalar> NearFieldParams<F> {
    /// Shipped per-scenario defaults. RMa and SMa reuse the UMa values, which
    /// the source material does not list separately.
    pub fn for_scenario(scenario: Scenario) -> Self {
        let (n_spec, a, b) = match scenario {
            Scenario::UMa | Scenario::RMa | Scenario::SMa => (2, 1.93, 1.33),
            Scenario::UMi => (2, 1.53, 1.42),
            Scenario::InH => (4, 1.25, 1.27),
            Scenario::InF => (4, 1.38, 1.26),
        };
        Self {
            n_spec,
            beta_alpha: F::lit(a),
            beta_beta: F::lit(b),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta_alpha > F::zero() && self.beta_beta > F::zero()) {
            return Err(Error::InvalidConfig(
                "Beta shape parameters must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Indices of the `n_spec` strongest-power clusters, ties broken by lower
/// index. Returned ascending.
pub fn assign_specular_clusters<F: Scalar>(powers: &[F], n_spec: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..powers.len()).collect();
    order.sort_by(|&a, &b| powers[b].partial_cmp(&powers[a]).unwrap().then(a.cmp(&b)));
    let mut top: Vec<usize> = order.into_iter().take(n_spec).collect();
    top.sort_unstable();
    top
}

/// BS-side scaling factor: 1 for specular clusters, Beta(alpha, beta) in
/// (0, 1) otherwise.
pub fn sample_scaling_factor_bs<F: Scalar, R: Rng + ?Sized>(
    is_specular: bool,
    params: &NearFieldParams<F>,
    rng: &mut R,
) -> F {
    if is_specular {
        return F::one();
    }
    loop {
        let s = F::beta_sample(params.beta_alpha, params.beta_beta, rng);
        if s > F::zero() && s < F::one() {
            return s;
        }
    }
}

/// UE-side scaling factor: 1 for specular clusters, 1 - s_BS otherwise.
pub fn scaling_factor_ue<F: Scalar>(s_bs: F, is_specular: bool) -> F {
    if is_specular {
        F::one()
    } else {
        F::one() - s_bs
    }
}

/// Source distance s · (d_3D + tau·c + delta_tau·c), meters.
pub fn source_distance<F: Scalar>(s: F, d_3d: F, tau: F, excess_delay: F) -> F {
    s * (d_3d + tau * F::c0() + excess_delay * F::c0())
}

/// Direction vector from an element to the spherical-wave source:
/// d·r_hat - d_elem. Errors when the element coincides with the source.
pub fn element_direction_vector<F: Scalar>(
    d: F,
    r_hat: Vec3<F>,
    d_elem: Vec3<F>,
) -> Result<Vec3<F>> {
    let w = r_hat.scale(d) - d_elem;
    if w.norm() < F::lit(1e-9) {
        return Err(Error::SourceInsideArray);
    }
    Ok(w)
}

/// Element-wise near-field phase 2π(d - ‖d·r_hat - d_elem‖)/λ, radians,
/// unwrapped (not reduced mod 2π).
///
/// Evaluated in the cancellation-free form
/// (2·d·(r_hat·d_elem) - ‖d_elem‖²) / (d + ‖d·r_hat - d_elem‖)
/// so the far-field limit stays accurate at large d.
pub fn nearfield_phase_delta<F: Scalar>(
    d: F,
    r_hat: Vec3<F>,
    d_elem: Vec3<F>,
    lambda: F,
) -> Result<F> {
    let w = element_direction_vector(d, r_hat, d_elem)?;
    let num = F::lit(2.0) * d * r_hat.dot(d_elem) - d_elem.norm_sq();
    let delta = num / (d + w.norm());
    Ok(F::lit(2.0) * F::PI() * delta / lambda)
}

/// Exact per-pair LOS geometry between one TX and one RX element.
#[derive(Debug, Clone, Copy)]
pub struct PairwiseLink<F> {
    /// Euclidean distance |r_{u,s}|, meters.
    pub distance: F,
    /// Departure angles at the TX element (of the vector rx - tx).
    pub zod: F,
    pub aod: F,
    /// Arrival angles at the RX element (of the vector tx - rx).
    pub zoa: F,
    pub aoa: F,
}

/// Exact propagation distance and per-pair departure/arrival angles for a
/// TX/RX element pair. Errors on coincident positions.
pub fn los_pairwise<F: Scalar>(tx_elem: Vec3<F>, rx_elem: Vec3<F>) -> Result<PairwiseLink<F>> {
    let v = rx_elem - tx_elem;
    let dist = v.norm();
    if !(dist > F::zero()) {
        return Err(Error::CoincidentElements);
    }
    let (zod, aod) = angles_from_vector(v)?;
    let (zoa, aoa) = angles_from_vector(-v)?;
    Ok(PairwiseLink {
        distance: dist,
        zod,
        aod,
        zoa,
        aoa,
    })
}

/// Per-cluster spherical-source scaling factors and distances. Split
/// clusters carry one (d1, d2) pair per sub-cluster delay; the rest carry a
/// single pair.
#[derive(Debug, Clone)]
pub struct SphericalSourceDistances<F> {
    pub specular: Vec<bool>,
    pub s_bs: Vec<F>,
    pub s_ue: Vec<F>,
    /// BS-to-source distances: d1[cluster][subcluster-or-0].
    pub d1: Vec<Vec<F>>,
    /// UE-to-source distances: d2[cluster][subcluster-or-0].
    pub d2: Vec<Vec<F>>,
}

impl<F: Scalar> SphericalSourceDistances<F> {
    pub fn n_clusters(&self) -> usize {
        self.specular.len()
    }
}

/// Generate scaling factors and source distances for every cluster of a
/// drop. Sub-cluster delays are used for the two split (strongest) clusters,
/// cluster delays otherwise; the excess delay is the drop-level draw already
/// stored in the cluster set.
pub fn generate_source_distances<F: Scalar, R: Rng + ?Sized>(
    clusters: &ClusterSet<F>,
    params: &NearFieldParams<F>,
    d_3d: F,
    rng: &mut R,
) -> SphericalSourceDistances<F> {
    let n = clusters.n_clusters();
    let spec_set = assign_specular_clusters(&clusters.powers, params.n_spec.min(n));
    let mut specular = vec![false; n];
    for &i in &spec_set {
        specular[i] = true;
    }

    let mut s_bs = Vec::with_capacity(n);
    let mut s_ue = Vec::with_capacity(n);
    for &spec in &specular {
        let s = sample_scaling_factor_bs(spec, params, rng);
        s_bs.push(s);
        s_ue.push(scaling_factor_ue(s, spec));
    }

    let excess = clusters.excess_delay;
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for c in 0..n {
        let delays: Vec<F> = match &clusters.subclusters {
            Some(map) if map.is_split(c) => map
                .delay_offsets
                .iter()
                .map(|&off| clusters.delays[c] + off)
                .collect(),
            _ => vec![clusters.delays[c]],
        };
        let mut row1 = Vec::with_capacity(delays.len());
        let mut row2 = Vec::with_capacity(delays.len());
        for &t in &delays {
            let full = source_distance(F::one(), d_3d, t, excess);
            let a = source_distance(s_bs[c], d_3d, t, excess);
            // Subtraction keeps d1 + d2 equal to the full path length exactly
            // for non-specular clusters (s_BS + s_UE = 1).
            let b = if specular[c] { full } else { full - a };
            row1.push(a);
            row2.push(b);
        }
        d1.push(row1);
        d2.push(row2);
    }

    SphericalSourceDistances {
        specular,
        s_bs,
        s_ue,
        d1,
        d2,
    }
}
