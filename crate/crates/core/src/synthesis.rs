//! Channel coefficient synthesis: far-field and near-field LOS/NLOS ray
//! coefficients, Ricean K-factor combination, sub-cluster delay taps, and
//! the SNS attenuation prefactors.

use crate::error::{Error, Result};
use crate::geometry::{angles_from_vector, FieldPattern, Rot3, Vec3};
use crate::nearfield::{los_pairwise, nearfield_phase_delta, SphericalSourceDistances};
use crate::scalar::Scalar;
use crate::smallscale::{ClusterSet, PolPhases};
use num_complex::Complex;

/// Far-field (plane wave) or near-field (spherical wavefront) synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMode {
    FarField,
    NearField,
}

/// Feature flags describing what went into a realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModeFlags {
    pub near_field: bool,
    pub sns_stochastic: bool,
    pub sns_blocker: bool,
    pub sns_ue: bool,
}

impl ModeFlags {
    /// Compact label used in metrics files, e.g. `nf+sns-stoch`.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.near_field {
            parts.push("nf");
        }
        if self.sns_stochastic {
            parts.push("sns-stoch");
        }
        if self.sns_blocker {
            parts.push("sns-block");
        }
        if self.sns_ue {
            parts.push("sns-ue");
        }
        if parts.is_empty() {
            "base".into()
        } else {
            parts.join("+")
        }
    }

    pub fn mode(&self) -> PropagationMode {
        if self.near_field {
            PropagationMode::NearField
        } else {
            PropagationMode::FarField
        }
    }
}

/// 2x2 polarization coupling matrix.
#[derive(Debug, Clone, Copy)]
pub struct PolarizationMatrix<F> {
    pub m: [[Complex<F>; 2]; 2],
}

impl<F: Scalar> PolarizationMatrix<F> {
    /// NLOS matrix from the XPR (linear) and the four random phases.
    pub fn from_xpr_phases(kappa: F, phases: &PolPhases<F>) -> Self {
        let inv = (F::one() / kappa).sqrt();
        let e = |p: F| Complex::from_polar(F::one(), p);
        Self {
            m: [
                [e(phases.tt), e(phases.tp).scale(inv)],
                [e(phases.pt).scale(inv), e(phases.pp)],
            ],
        }
    }

    /// LOS matrix diag(1, -1).
    pub fn los() -> Self {
        let zero = Complex::new(F::zero(), F::zero());
        Self {
            m: [
                [Complex::new(F::one(), F::zero()), zero],
                [zero, Complex::new(-F::one(), F::zero())],
            ],
        }
    }

    /// Row-vector · matrix · column-vector contraction.
    pub fn contract(
        &self,
        rx: (Complex<F>, Complex<F>),
        tx: (Complex<F>, Complex<F>),
    ) -> Complex<F> {
        rx.0 * (self.m[0][0] * tx.0 + self.m[0][1] * tx.1)
            + rx.1 * (self.m[1][0] * tx.0 + self.m[1][1] * tx.1)
    }

    /// Matrix · column-vector product.
    pub fn apply(&self, tx: (Complex<F>, Complex<F>)) -> (Complex<F>, Complex<F>) {
        (
            self.m[0][0] * tx.0 + self.m[0][1] * tx.1,
            self.m[1][0] * tx.0 + self.m[1][1] * tx.1,
        )
    }
}

/// Pattern plus orientation of one array, for field evaluation in its local
/// frame.
pub struct PatternContext<'a, F> {
    pub pattern: &'a FieldPattern<F>,
    pub rotation: &'a Rot3<F>,
}

impl<F: Scalar> PatternContext<'_, F> {
    /// Field components for a ray arriving/departing along `dir` (global
    /// frame, pointing toward the source), with the element's slant.
    pub fn field(&self, dir: Vec3<F>, slant: F) -> Result<(Complex<F>, Complex<F>)> {
        let local = self.rotation.apply_inverse(dir);
        let (zen, az) = angles_from_vector(local)?;
        Ok(self.pattern.evaluate(zen, az, slant))
    }
}

/// Unit-modulus Doppler rotation exp(j·2π·(r_rx·v)·t/λ).
pub fn doppler_term<F: Scalar>(r_rx: Vec3<F>, velocity: Vec3<F>, t: F, lambda: F) -> Complex<F> {
    let phase = F::lit(2.0) * F::PI() * r_rx.dot(velocity) * t / lambda;
    Complex::from_polar(F::one(), phase)
}

/// Inputs of one NLOS ray coefficient for one element pair.
#[derive(Debug, Clone)]
pub struct RayInputs<F> {
    pub lambda: F,
    /// P_n / M.
    pub power_over_rays: F,
    /// BS-side SNS attenuation for this (element, cluster/ray).
    pub alpha: F,
    /// UE-side SNS attenuation for this element.
    pub beta: F,
    pub polarization: PolarizationMatrix<F>,
    /// Global spherical unit vectors toward the effective sources.
    pub r_tx: Vec3<F>,
    pub r_rx: Vec3<F>,
    /// Element location vectors relative to the array reference points.
    pub tx_offset: Vec3<F>,
    pub rx_offset: Vec3<F>,
    pub tx_slant: F,
    pub rx_slant: F,
    /// Spherical-source distances; ignored in far-field mode.
    pub d1: F,
    pub d2: F,
    pub velocity: Vec3<F>,
    pub time: F,
}

/// One NLOS ray coefficient. Near-field mode substitutes element-wise
/// spherical phases and evaluates the patterns at element-wise angles;
/// Doppler keeps the far-field arrival vector in both modes.
pub fn nlos_ray_coefficient<F: Scalar>(
    mode: PropagationMode,
    tx: &PatternContext<'_, F>,
    rx: &PatternContext<'_, F>,
    inp: &RayInputs<F>,
) -> Result<Complex<F>> {
    let two_pi = F::lit(2.0) * F::PI();
    let (tx_field, rx_field, phase_tx, phase_rx) = match mode {
        PropagationMode::FarField => {
            let tx_field = tx.field(inp.r_tx, inp.tx_slant)?;
            let rx_field = rx.field(inp.r_rx, inp.rx_slant)?;
            let phase_tx = two_pi * inp.r_tx.dot(inp.tx_offset) / inp.lambda;
            let phase_rx = two_pi * inp.r_rx.dot(inp.rx_offset) / inp.lambda;
            (tx_field, rx_field, phase_tx, phase_rx)
        }
        PropagationMode::NearField => {
            let w_tx = inp.r_tx.scale(inp.d1) - inp.tx_offset;
            let w_rx = inp.r_rx.scale(inp.d2) - inp.rx_offset;
            let tx_field = tx.field(w_tx, inp.tx_slant)?;
            let rx_field = rx.field(w_rx, inp.rx_slant)?;
            let phase_tx = nearfield_phase_delta(inp.d1, inp.r_tx, inp.tx_offset, inp.lambda)?;
            let phase_rx = nearfield_phase_delta(inp.d2, inp.r_rx, inp.rx_offset, inp.lambda)?;
            (tx_field, rx_field, phase_tx, phase_rx)
        }
    };
    let scale = (inp.beta * inp.alpha).sqrt() * inp.power_over_rays.sqrt();
    let pol = inp.polarization.contract(rx_field, tx_field);
    let rotation = Complex::from_polar(F::one(), phase_tx + phase_rx);
    let doppler = doppler_term(inp.r_rx, inp.velocity, inp.time, inp.lambda);
    Ok(pol * rotation * doppler * Complex::new(scale, F::zero()))
}

/// Inputs of the LOS coefficient for one element pair.
#[derive(Debug, Clone)]
pub struct LosInputs<F> {
    pub lambda: F,
    pub d_3d: F,
    /// SNS attenuation of the LOS cluster at this TX element.
    pub alpha: F,
    pub beta: F,
    /// Absolute reference positions of the arrays.
    pub tx_ref: Vec3<F>,
    pub rx_ref: Vec3<F>,
    pub tx_offset: Vec3<F>,
    pub rx_offset: Vec3<F>,
    pub tx_slant: F,
    pub rx_slant: F,
    pub velocity: Vec3<F>,
    pub time: F,
}

/// LOS coefficient. Far-field mode uses the reference-point direction and
/// per-element plane-wave phases; near-field mode uses the exact per-pair
/// element distance and angles.
pub fn los_coefficient<F: Scalar>(
    mode: PropagationMode,
    tx: &PatternContext<'_, F>,
    rx: &PatternContext<'_, F>,
    inp: &LosInputs<F>,
) -> Result<Complex<F>> {
    let two_pi = F::lit(2.0) * F::PI();
    let r_vec = inp.rx_ref - inp.tx_ref;
    let r_tx_los = r_vec.normalized()?;
    let r_rx_los = -r_tx_los;
    let doppler = doppler_term(r_rx_los, inp.velocity, inp.time, inp.lambda);
    let pol = PolarizationMatrix::<F>::los();

    let (tx_field, rx_field, phase) = match mode {
        PropagationMode::FarField => {
            let tx_field = tx.field(r_tx_los, inp.tx_slant)?;
            let rx_field = rx.field(r_rx_los, inp.rx_slant)?;
            let phase = -two_pi * inp.d_3d / inp.lambda
                + two_pi * r_rx_los.dot(inp.rx_offset) / inp.lambda
                + two_pi * r_tx_los.dot(inp.tx_offset) / inp.lambda;
            (tx_field, rx_field, phase)
        }
        PropagationMode::NearField => {
            let link = los_pairwise(inp.tx_ref + inp.tx_offset, inp.rx_ref + inp.rx_offset)?;
            let dir_tx = (inp.rx_ref + inp.rx_offset) - (inp.tx_ref + inp.tx_offset);
            let tx_field = tx.field(dir_tx, inp.tx_slant)?;
            let rx_field = rx.field(-dir_tx, inp.rx_slant)?;
            // exp(-j2π d_3D/λ)·exp(-j2π(|r| - d_3D)/λ) = exp(-j2π|r|/λ).
            let phase = -two_pi * link.distance / inp.lambda;
            (tx_field, rx_field, phase)
        }
    };
    let scale = (inp.beta * inp.alpha).sqrt();
    let rotation = Complex::from_polar(F::one(), phase);
    Ok(pol.contract(rx_field, tx_field) * rotation * doppler * Complex::new(scale, F::zero()))
}

/// One channel tap: absolute delay plus complex amplitude.
#[derive(Debug, Clone, Copy)]
pub struct Tap<F> {
    pub delay: F,
    pub amplitude: Complex<F>,
}

/// CIR of a single (u, s) link as a list of taps on exact delays.
#[derive(Debug, Clone)]
pub struct ChannelRealization<F> {
    pub taps: Vec<Tap<F>>,
}

impl<F: Scalar> ChannelRealization<F> {
    /// Sum of tap powers.
    pub fn total_power(&self) -> F {
        self.taps
            .iter()
            .map(|t| t.amplitude.norm_sqr())
            .fold(F::zero(), |a, b| a + b)
    }

    /// Narrowband (delay-integrated) complex channel gain.
    pub fn narrowband_sum(&self) -> Complex<F> {
        self.taps
            .iter()
            .fold(Complex::new(F::zero(), F::zero()), |a, t| a + t.amplitude)
    }
}

/// All (u, s) links of one drop, u-major.
#[derive(Debug, Clone)]
pub struct ChannelMatrix<F> {
    pub n_rx: usize,
    pub n_tx: usize,
    pub links: Vec<ChannelRealization<F>>,
    pub drop_id: u64,
    pub time: F,
    pub flags: ModeFlags,
}

impl<F: Scalar> ChannelMatrix<F> {
    pub fn link(&self, u: usize, s: usize) -> &ChannelRealization<F> {
        &self.links[u * self.n_tx + s]
    }
}

/// Drop-level synthesis parameters.
#[derive(Debug, Clone)]
pub struct DropConfig<F> {
    pub d_3d: F,
    pub lambda: F,
    pub velocity: Vec3<F>,
    pub time: F,
    /// Ricean K-factor, linear. Zero removes the LOS tap entirely.
    pub k_factor: F,
    pub los: bool,
    pub flags: ModeFlags,
    pub drop_id: u64,
}

/// One array's synthesis-ready description.
pub struct ArrayElements<'a, F> {
    /// Per grid position offsets relative to the reference point.
    pub offsets: &'a [Vec3<F>],
    pub polarizations: usize,
    pub single_pol_slant: F,
    pub pattern: &'a FieldPattern<F>,
    pub rotation: &'a Rot3<F>,
    /// Absolute reference position.
    pub reference: Vec3<F>,
}

impl<F: Scalar> ArrayElements<'_, F> {
    pub fn num_elements(&self) -> usize {
        self.offsets.len() * self.polarizations
    }

    fn position_of(&self, e: usize) -> usize {
        e / self.polarizations
    }

    fn slant_of(&self, e: usize) -> F {
        if self.polarizations == 1 {
            self.single_pol_slant
        } else if e % 2 == 0 {
            F::FRAC_PI_4()
        } else {
            -F::FRAC_PI_4()
        }
    }

    fn context(&self) -> PatternContext<'_, F> {
        PatternContext {
            pattern: self.pattern,
            rotation: self.rotation,
        }
    }
}

/// BS-side SNS attenuation per TX grid position.
#[derive(Debug, Clone)]
pub enum BsAttenuation<F> {
    /// Feature off: every factor 1.
    Off,
    /// Stochastic model: one field per cluster (rays inherit it), plus the
    /// LOS cluster field when present.
    PerCluster {
        alpha: Vec<Vec<F>>,
        los: Option<Vec<F>>,
    },
    /// Blocker model: one field per (cluster, ray), plus LOS.
    PerRay {
        alpha: Vec<Vec<Vec<F>>>,
        los: Option<Vec<F>>,
    },
}

impl<F: Scalar> BsAttenuation<F> {
    fn cluster_ray(&self, cluster: usize, ray: usize, pos: usize) -> F {
        match self {
            BsAttenuation::Off => F::one(),
            BsAttenuation::PerCluster { alpha, .. } => alpha[cluster][pos],
            BsAttenuation::PerRay { alpha, .. } => alpha[cluster][ray][pos],
        }
    }

    fn los(&self, pos: usize) -> F {
        match self {
            BsAttenuation::Off => F::one(),
            BsAttenuation::PerCluster { los, .. } | BsAttenuation::PerRay { los, .. } => {
                los.as_ref().map_or(F::one(), |v| v[pos])
            }
        }
    }

    fn validate(&self, n_clusters: usize, n_rays: usize, n_pos: usize) -> Result<()> {
        let check_field = |name: &str, v: &Vec<F>| {
            if v.len() != n_pos {
                return Err(Error::InconsistentClusters(format!(
                    "{name} attenuation field has {} entries for {n_pos} positions",
                    v.len()
                )));
            }
            Ok(())
        };
        match self {
            BsAttenuation::Off => Ok(()),
            BsAttenuation::PerCluster { alpha, los } => {
                if alpha.len() != n_clusters {
                    return Err(Error::InconsistentClusters(format!(
                        "per-cluster attenuation covers {} of {n_clusters} clusters",
                        alpha.len()
                    )));
                }
                for a in alpha {
                    check_field("cluster", a)?;
                }
                los.as_ref().map_or(Ok(()), |v| check_field("los", v))
            }
            BsAttenuation::PerRay { alpha, los } => {
                if alpha.len() != n_clusters {
                    return Err(Error::InconsistentClusters(format!(
                        "per-ray attenuation covers {} of {n_clusters} clusters",
                        alpha.len()
                    )));
                }
                for c in alpha {
                    if c.len() != n_rays {
                        return Err(Error::InconsistentClusters(format!(
                            "per-ray attenuation has {} of {n_rays} rays",
                            c.len()
                        )));
                    }
                    for a in c {
                        check_field("ray", a)?;
                    }
                }
                los.as_ref().map_or(Ok(()), |v| check_field("los", v))
            }
        }
    }
}

/// Complete input set for CIR assembly.
pub struct SynthesisInputs<'a, F: Scalar> {
    pub drop: &'a DropConfig<F>,
    pub tx: ArrayElements<'a, F>,
    pub rx: ArrayElements<'a, F>,
    pub clusters: &'a ClusterSet<F>,
    /// Present in near-field mode.
    pub nearfield: Option<&'a SphericalSourceDistances<F>>,
    pub bs_attenuation: &'a BsAttenuation<F>,
    /// UE-side attenuation per RX grid position (ones when the feature is
    /// off).
    pub ue_attenuation: &'a [F],
}

/// Tap layout of a drop: LOS tap first when present, then one tap per
/// (cluster, sub-cluster) delay in cluster order.
struct TapGroup<F> {
    cluster: usize,
    /// Rays contributing to this tap.
    rays: Vec<usize>,
    delay: F,
    d1: F,
    d2: F,
}

fn tap_groups<F: Scalar>(
    clusters: &ClusterSet<F>,
    nf: Option<&SphericalSourceDistances<F>>,
) -> Vec<TapGroup<F>> {
    let m = clusters.rays_per_cluster();
    let mut groups = Vec::new();
    for n in 0..clusters.n_clusters() {
        match &clusters.subclusters {
            Some(map) if map.is_split(n) => {
                for (i, rays) in map.ray_sets.iter().enumerate() {
                    groups.push(TapGroup {
                        cluster: n,
                        rays: rays.clone(),
                        delay: clusters.absolute_delays[n] + map.delay_offsets[i],
                        d1: nf.map_or(F::one(), |nf| nf.d1[n][i]),
                        d2: nf.map_or(F::one(), |nf| nf.d2[n][i]),
                    });
                }
            }
            _ => {
                groups.push(TapGroup {
                    cluster: n,
                    rays: (0..m).collect(),
                    delay: clusters.absolute_delays[n],
                    d1: nf.map_or(F::one(), |nf| nf.d1[n][0]),
                    d2: nf.map_or(F::one(), |nf| nf.d2[n][0]),
                });
            }
        }
    }
    groups
}

/// Assemble the full U x S channel matrix of one drop.
///
/// NLOS rays are scaled by sqrt(1/(K_R+1)) and grouped on their cluster or
/// sub-cluster delays; in LOS condition with K_R > 0 an extra tap at the
/// direct-path delay carries the LOS coefficient scaled by
/// sqrt(K_R/(K_R+1)).
pub fn assemble_cir<F: Scalar>(inputs: &SynthesisInputs<'_, F>) -> Result<ChannelMatrix<F>> {
    let drop = inputs.drop;
    let clusters = inputs.clusters;
    let n_clusters = clusters.n_clusters();
    let n_rays = clusters.rays_per_cluster();
    let n_tx_pos = inputs.tx.offsets.len();
    let n_rx_pos = inputs.rx.offsets.len();
    let n_tx = inputs.tx.num_elements();
    let n_rx = inputs.rx.num_elements();
    let mode = drop.flags.mode();

    inputs
        .bs_attenuation
        .validate(n_clusters, n_rays, n_tx_pos)?;
    if inputs.ue_attenuation.len() != n_rx_pos {
        return Err(Error::InconsistentClusters(format!(
            "UE attenuation has {} entries for {} RX positions",
            inputs.ue_attenuation.len(),
            n_rx_pos
        )));
    }
    if let Some(nf) = inputs.nearfield {
        if nf.n_clusters() != n_clusters {
            return Err(Error::InconsistentClusters(format!(
                "near-field data covers {} of {n_clusters} clusters",
                nf.n_clusters()
            )));
        }
    }
    if mode == PropagationMode::NearField && inputs.nearfield.is_none() {
        return Err(Error::InconsistentClusters(
            "near-field mode without source distances".into(),
        ));
    }

    let two_pi = F::lit(2.0) * F::PI();
    let lambda = drop.lambda;
    let nlos_scale = (F::one() / (drop.k_factor + F::one())).sqrt();
    let groups = tap_groups(clusters, inputs.nearfield);
    let los_tap = drop.los && drop.k_factor > F::zero();
    let n_taps = groups.len() + usize::from(los_tap);

    let zero = Complex::new(F::zero(), F::zero());
    let mut acc: Vec<Vec<Complex<F>>> = vec![vec![zero; n_rx * n_tx]; n_taps];

    let tx_ctx = inputs.tx.context();
    let rx_ctx = inputs.rx.context();

    // Per-element factor buffers reused across rays.
    let mut tx_vec: Vec<(Complex<F>, Complex<F>)> = vec![(zero, zero); n_tx];
    let mut rx_vec: Vec<(Complex<F>, Complex<F>)> = vec![(zero, zero); n_rx];

    let tap_offset = usize::from(los_tap);
    for (g_idx, group) in groups.iter().enumerate() {
        let n = group.cluster;
        let sqrt_p = (clusters.powers[n] / F::from_usize(n_rays).unwrap()).sqrt() * nlos_scale;
        for &m_ray in &group.rays {
            let ang = &clusters.angles[n][m_ray];
            let r_tx = crate::geometry::spherical_unit_vector(ang.zod, ang.aod);
            let r_rx = crate::geometry::spherical_unit_vector(ang.zoa, ang.aoa);
            let pol =
                PolarizationMatrix::from_xpr_phases(clusters.xpr[n][m_ray], &clusters.phases[n][m_ray]);
            let doppler = doppler_term(r_rx, drop.velocity, drop.time, lambda);
            let common = doppler * Complex::new(sqrt_p, F::zero());

            // TX element factors: field · phase · sqrt(alpha), then fold the
            // polarization matrix in so the pair loop is a 2-vector dot.
            for s in 0..n_tx {
                let pos = inputs.tx.position_of(s);
                let slant = inputs.tx.slant_of(s);
                let offset = inputs.tx.offsets[pos];
                let (field, phase) = match mode {
                    PropagationMode::FarField => (
                        tx_ctx.field(r_tx, slant)?,
                        two_pi * r_tx.dot(offset) / lambda,
                    ),
                    PropagationMode::NearField => {
                        let w = r_tx.scale(group.d1) - offset;
                        (
                            tx_ctx.field(w, slant)?,
                            nearfield_phase_delta(group.d1, r_tx, offset, lambda)?,
                        )
                    }
                };
                let a = inputs.bs_attenuation.cluster_ray(n, m_ray, pos).sqrt();
                let rot = Complex::from_polar(a, phase);
                tx_vec[s] = pol.apply((field.0 * rot, field.1 * rot));
            }

            for u in 0..n_rx {
                let pos = inputs.rx.position_of(u);
                let slant = inputs.rx.slant_of(u);
                let offset = inputs.rx.offsets[pos];
                let (field, phase) = match mode {
                    PropagationMode::FarField => (
                        rx_ctx.field(r_rx, slant)?,
                        two_pi * r_rx.dot(offset) / lambda,
                    ),
                    PropagationMode::NearField => {
                        let w = r_rx.scale(group.d2) - offset;
                        (
                            rx_ctx.field(w, slant)?,
                            nearfield_phase_delta(group.d2, r_rx, offset, lambda)?,
                        )
                    }
                };
                let b = inputs.ue_attenuation[pos].sqrt();
                let rot = Complex::from_polar(b, phase) * common;
                rx_vec[u] = (field.0 * rot, field.1 * rot);
            }

            let tap = &mut acc[tap_offset + g_idx];
            for u in 0..n_rx {
                let (r0, r1) = rx_vec[u];
                let row = &mut tap[u * n_tx..(u + 1) * n_tx];
                for (s, out) in row.iter_mut().enumerate() {
                    let (t0, t1) = tx_vec[s];
                    *out += r0 * t0 + r1 * t1;
                }
            }
        }
    }

    if los_tap {
        let los_scale = (drop.k_factor / (drop.k_factor + F::one())).sqrt();
        let tap = &mut acc[0];
        for u in 0..n_rx {
            for s in 0..n_tx {
                let inp = LosInputs {
                    lambda,
                    d_3d: drop.d_3d,
                    alpha: inputs.bs_attenuation.los(inputs.tx.position_of(s)),
                    beta: inputs.ue_attenuation[inputs.rx.position_of(u)],
                    tx_ref: inputs.tx.reference,
                    rx_ref: inputs.rx.reference,
                    tx_offset: inputs.tx.offsets[inputs.tx.position_of(s)],
                    rx_offset: inputs.rx.offsets[inputs.rx.position_of(u)],
                    tx_slant: inputs.tx.slant_of(s),
                    rx_slant: inputs.rx.slant_of(u),
                    velocity: drop.velocity,
                    time: drop.time,
                };
                let c = los_coefficient(mode, &tx_ctx, &rx_ctx, &inp)?;
                tap[u * n_tx + s] = c * Complex::new(los_scale, F::zero());
            }
        }
    }

    let mut delays = Vec::with_capacity(n_taps);
    if los_tap {
        delays.push(drop.d_3d / F::c0());
    }
    delays.extend(groups.iter().map(|g| g.delay));

    let links = (0..n_rx * n_tx)
        .map(|idx| ChannelRealization {
            taps: delays
                .iter()
                .enumerate()
                .map(|(t, &delay)| Tap {
                    delay,
                    amplitude: acc[t][idx],
                })
                .collect(),
        })
        .collect();

    Ok(ChannelMatrix {
        n_rx,
        n_tx,
        links,
        drop_id: drop.drop_id,
        time: drop.time,
        flags: drop.flags,
    })
}
