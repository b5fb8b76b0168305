//! Drop-based Monte Carlo driver: UE placement, the extended coefficient
//! generation procedure with the near-field and SNS steps, and metric
//! evaluation.

use crate::error::{Error, Result};
use crate::geometry::{angles_from_vector, element_positions, ArrayGeometry, FieldPattern, Vec3};
use crate::metrics::{
    aggregate_cdf, capacity, coupling_loss, CMatrix, MetricSample, PathLossModel,
};
use crate::nearfield::{generate_source_distances, SphericalSourceDistances};
use crate::rng::{stream_rng, StreamId};
use crate::scalar::Scalar;
use crate::smallscale::{
    absolute_delays, generate_angles, generate_delays, generate_powers, generate_xpr_phases,
    split_subclusters, ClusterSet, LosAngles, ScenarioParams,
};
use crate::sns_blocker::{scene_attenuation, Scene};
use crate::sns_stochastic::{
    classify_clusters, cluster_visibility, sample_sns_probability, ClusterVisibility,
    SnsClassification,
};
use crate::sns_ue::{sample_usage_scenario, ue_attenuation, UeAttenuationTable,
    UsageProbabilities, UsageScenario};
use crate::synthesis::{
    assemble_cir, ArrayElements, BsAttenuation, ChannelMatrix, DropConfig, ModeFlags,
    SynthesisInputs,
};
use crate::Scenario;
use rand::Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Receiver stand-in distance for blocker evaluation when near-field source
/// distances are not generated (pure far-field mode).
const FAR_FIELD_SOURCE_DISTANCE_M: f64 = 1e4;

/// Fully resolved simulation inputs (see [`crate::config::SimulationConfig::build`]).
pub struct RunInputs<F: Scalar> {
    pub scenario: Scenario,
    pub carrier_hz: f64,
    pub lambda: F,
    pub los: bool,
    pub params: ScenarioParams<F>,
    pub bs: ArrayGeometry<F>,
    pub bs_pattern: FieldPattern<F>,
    pub ue: ArrayGeometry<F>,
    pub ue_pattern: FieldPattern<F>,
    pub ue_velocity: Vec3<F>,
    pub time: F,
    pub scene: Scene<F>,
    pub ue_probs: UsageProbabilities<F>,
    pub ue_table: UeAttenuationTable<F>,
    pub nearest_band: bool,
    pub pathloss: PathLossModel<F>,
    pub n_ues: usize,
    pub drop_radius: F,
    pub min_distance_2d: F,
    pub seed: u64,
    /// Linear SNR for capacity evaluation.
    pub snr: F,
    pub flags: ModeFlags,
}

/// Everything one drop produced; the heavyweight members feed the report
/// subcommands and tests.
pub struct DropOutput<F: Scalar> {
    pub ue_index: usize,
    pub position: Vec3<F>,
    pub d_3d: F,
    pub k_factor: F,
    pub clusters: ClusterSet<F>,
    pub nearfield: Option<SphericalSourceDistances<F>>,
    pub classification: Option<SnsClassification>,
    pub visibility: Option<Vec<ClusterVisibility<F>>>,
    pub los_visibility: Option<ClusterVisibility<F>>,
    pub usage: Option<UsageScenario>,
    pub channel: ChannelMatrix<F>,
    pub metric: MetricSample<F>,
}

/// Uniform placement in an annulus (2-D disc with a minimum-distance floor)
/// around the BS.
fn place_ue<F: Scalar, R: Rng + ?Sized>(
    radius: F,
    min_2d: F,
    height: F,
    rng: &mut R,
) -> Vec3<F> {
    let u = F::uniform_01(rng);
    let r = (min_2d * min_2d + u * (radius * radius - min_2d * min_2d)).sqrt();
    let phi = F::uniform_01(rng) * F::lit(2.0) * F::PI();
    Vec3::new(r * phi.cos(), r * phi.sin(), height)
}

/// Cluster powers in dB as the VP model sees them: optionally post-K-factor
/// scaled, with the LOS path appended as one extra entry when present.
fn vp_powers_db<F: Scalar>(
    powers: &[F],
    k_factor: F,
    los: bool,
    post_k: bool,
) -> (Vec<F>, Option<F>) {
    let (scale, los_power) = if los {
        if post_k {
            (
                F::one() / (k_factor + F::one()),
                Some(k_factor / (k_factor + F::one())),
            )
        } else {
            (F::one(), Some(k_factor))
        }
    } else {
        (F::one(), None)
    };
    let floor = F::lit(1e-30);
    let cluster_db: Vec<F> = powers
        .iter()
        .map(|&p| (p * scale).max(floor).linear_to_db())
        .collect();
    let los_db = los_power.map(|p| p.max(floor).linear_to_db());
    (cluster_db, los_db)
}

/// Run the full generation procedure for one UE index.
pub fn run_drop<F: Scalar>(inputs: &RunInputs<F>, ue_index: usize) -> Result<DropOutput<F>> {
    let params = &inputs.params;
    let flags = inputs.flags;
    let seed = inputs.seed;
    let ue = ue_index as u64;
    let lambda = inputs.lambda;

    // Placement and large-scale geometry.
    let mut placement_rng = stream_rng(seed, ue, StreamId::Placement);
    let position = place_ue(
        inputs.drop_radius,
        inputs.min_distance_2d,
        inputs.ue.reference_point.z,
        &mut placement_rng,
    );
    let bs_ref = inputs.bs.reference_point;
    let los_vector = position - bs_ref;
    let d_3d = los_vector.norm();
    let (los_zod, los_aod) = angles_from_vector(los_vector)?;
    let (los_zoa, los_aoa) = angles_from_vector(-los_vector)?;
    let los_angles = LosAngles {
        aod: los_aod,
        zod: los_zod,
        aoa: los_aoa,
        zoa: los_zoa,
    };

    // Ricean K-factor.
    let (k_factor, k_db) = if inputs.los {
        let mut k_rng = stream_rng(seed, ue, StreamId::KFactor);
        let k_db = params.k_mean_db + F::standard_normal(&mut k_rng) * params.k_std_db;
        (k_db.db_to_linear(), k_db)
    } else {
        (F::zero(), F::zero())
    };

    // Small-scale parameters, each concern on its own stream.
    let delays = generate_delays(params, &mut stream_rng(seed, ue, StreamId::Delays));
    let powers = generate_powers(&delays, params, &mut stream_rng(seed, ue, StreamId::Powers));
    let angles = generate_angles(
        &powers,
        params,
        los_angles,
        inputs.los,
        k_db,
        &mut stream_rng(seed, ue, StreamId::Angles),
    );
    let (xpr, phases) =
        generate_xpr_phases(params, &mut stream_rng(seed, ue, StreamId::XprPhases));
    let (abs_delays, excess) = absolute_delays(
        &delays,
        d_3d,
        inputs.los,
        params,
        &mut stream_rng(seed, ue, StreamId::ExcessDelay),
    );
    let mut clusters = ClusterSet {
        delays,
        powers,
        angles,
        xpr,
        phases,
        absolute_delays: abs_delays,
        excess_delay: excess,
        subclusters: None,
    };
    split_subclusters(&mut clusters, params)?;

    // Near-field spherical-source distances.
    let nearfield = if flags.near_field {
        Some(generate_source_distances(
            &clusters,
            &params.near_field,
            d_3d,
            &mut stream_rng(seed, ue, StreamId::NfScaling),
        ))
    } else {
        None
    };

    let bs_plane = inputs.bs.plane_coords();
    let bs_offsets = element_positions(&inputs.bs);
    let n_bs_pos = inputs.bs.num_positions();

    // BS-side SNS.
    let mut classification = None;
    let mut visibility = None;
    let mut los_visibility = None;
    let bs_attenuation = if flags.sns_stochastic {
        let mut class_rng = stream_rng(seed, ue, StreamId::SnsClassify);
        let pr = sample_sns_probability(&params.sns, &mut class_rng);
        let class = classify_clusters(pr, clusters.n_clusters(), inputs.los, &mut class_rng);
        let (cluster_db, los_db) =
            vp_powers_db(&clusters.powers, k_factor, inputs.los, params.vp_power_post_k);
        let p_max = cluster_db
            .iter()
            .copied()
            .chain(los_db)
            .fold(F::neg_infinity(), F::max);
        let width = inputs.bs.width();
        let height = inputs.bs.height();
        let mut vis_rng = stream_rng(seed, ue, StreamId::SnsVisibility);
        let vis: Vec<ClusterVisibility<F>> = (0..clusters.n_clusters())
            .map(|n| {
                cluster_visibility(
                    class.clusters[n],
                    cluster_db[n],
                    p_max,
                    width,
                    height,
                    &bs_plane,
                    &params.sns,
                    &mut vis_rng,
                )
            })
            .collect();
        let los_vis = match (class.los, los_db) {
            (Some(true), Some(db)) => cluster_visibility(
                true,
                db,
                p_max,
                width,
                height,
                &bs_plane,
                &params.sns,
                &mut vis_rng,
            ),
            _ => ClusterVisibility::stationary(n_bs_pos),
        };
        let att = BsAttenuation::PerCluster {
            alpha: vis.iter().map(|v| v.alpha.clone()).collect(),
            los: inputs.los.then(|| los_vis.alpha.clone()),
        };
        classification = Some(class);
        visibility = Some(vis);
        los_visibility = Some(los_vis);
        att
    } else if flags.sns_blocker {
        blocker_attenuation(inputs, &clusters, nearfield.as_ref(), &bs_offsets, bs_ref, position)?
    } else {
        BsAttenuation::Off
    };

    // UE-side SNS.
    let n_ue_pos = inputs.ue.num_positions();
    let (usage, ue_alpha) = if flags.sns_ue {
        let kind = sample_usage_scenario(
            &inputs.ue_probs,
            &mut stream_rng(seed, ue, StreamId::UeUsage),
        );
        let beta: Vec<F> = (0..n_ue_pos)
            .map(|pos| {
                ue_attenuation(
                    kind,
                    inputs.carrier_hz,
                    pos,
                    &inputs.ue_table,
                    inputs.nearest_band,
                )
            })
            .collect::<Result<_>>()?;
        (Some(kind), beta)
    } else {
        (None, vec![F::one(); n_ue_pos])
    };

    // Coefficient synthesis.
    let ue_offsets = element_positions(&inputs.ue);
    let bs_rotation = inputs.bs.rotation();
    let ue_rotation = inputs.ue.rotation();
    let drop = DropConfig {
        d_3d,
        lambda,
        velocity: inputs.ue_velocity,
        time: inputs.time,
        k_factor,
        los: inputs.los,
        flags,
        drop_id: ue,
    };
    let channel = assemble_cir(&SynthesisInputs {
        drop: &drop,
        tx: ArrayElements {
            offsets: &bs_offsets,
            polarizations: inputs.bs.polarizations,
            single_pol_slant: inputs.bs.single_pol_slant,
            pattern: &inputs.bs_pattern,
            rotation: &bs_rotation,
            reference: bs_ref,
        },
        rx: ArrayElements {
            offsets: &ue_offsets,
            polarizations: inputs.ue.polarizations,
            single_pol_slant: inputs.ue.single_pol_slant,
            pattern: &inputs.ue_pattern,
            rotation: &ue_rotation,
            reference: position,
        },
        clusters: &clusters,
        nearfield: nearfield.as_ref(),
        bs_attenuation: &bs_attenuation,
        ue_attenuation: &ue_alpha,
    })?;

    // Metrics.
    let h = CMatrix::from_channel(&channel);
    let cap = capacity(&h, inputs.snr)?;
    let pl = inputs.pathloss.path_loss_db(d_3d);
    let sf = inputs
        .pathloss
        .sample_shadowing(&mut stream_rng(seed, ue, StreamId::Shadowing));
    let cl = coupling_loss(&channel, pl, sf);
    let metric = MetricSample {
        ue: ue_index,
        capacity_bpshz: cap,
        coupling_loss_db: cl,
        mode: flags.label(),
    };

    Ok(DropOutput {
        ue_index,
        position,
        d_3d,
        k_factor,
        clusters,
        nearfield,
        classification,
        visibility,
        los_visibility,
        usage,
        channel,
        metric,
    })
}

/// Per-(cluster, ray, element) attenuation from the physical blocker scene.
/// The receiver end of a departure ray is the cluster's spherical-wave
/// source when near-field distances exist, or a distant point along the ray
/// otherwise; the LOS ray uses the UE reference point.
fn blocker_attenuation<F: Scalar>(
    inputs: &RunInputs<F>,
    clusters: &ClusterSet<F>,
    nearfield: Option<&SphericalSourceDistances<F>>,
    bs_offsets: &[Vec3<F>],
    bs_ref: Vec3<F>,
    ue_position: Vec3<F>,
) -> Result<BsAttenuation<F>> {
    let scene = &inputs.scene;
    let lambda = inputs.lambda;
    let t = inputs.time;
    let far = F::lit(FAR_FIELD_SOURCE_DISTANCE_M);
    let n = clusters.n_clusters();
    let m = clusters.rays_per_cluster();
    let mut alpha = Vec::with_capacity(n);
    for c in 0..n {
        let mut per_ray = Vec::with_capacity(m);
        for ray in 0..m {
            let ang = &clusters.angles[c][ray];
            let r_tx = crate::geometry::spherical_unit_vector(ang.zod, ang.aod);
            let d1 = match (nearfield, &clusters.subclusters) {
                (Some(nf), Some(map)) if map.is_split(c) => {
                    nf.d1[c][map.subcluster_of_ray(ray)]
                }
                (Some(nf), _) => nf.d1[c][0],
                (None, _) => far,
            };
            let source = bs_ref + r_tx.scale(d1);
            let field: Vec<F> = bs_offsets
                .iter()
                .map(|&off| scene_attenuation(scene, bs_ref + off, source, lambda, t))
                .collect::<Result<_>>()?;
            per_ray.push(field);
        }
        alpha.push(per_ray);
    }
    let los = if inputs.los {
        Some(
            bs_offsets
                .iter()
                .map(|&off| scene_attenuation(scene, bs_ref + off, ue_position, lambda, t))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    Ok(BsAttenuation::PerRay { alpha, los })
}

/// Full Monte Carlo outputs.
pub struct SimulationOutput<F> {
    pub samples: Vec<MetricSample<F>>,
    pub capacity_cdf: Vec<(F, F)>,
    pub coupling_cdf: Vec<(F, F)>,
}

/// Run every UE drop (in parallel when the `parallel` feature is on; results
/// are collected in UE order either way) and aggregate the metric CDFs.
pub fn run_drop_loop<F: Scalar>(inputs: &RunInputs<F>) -> Result<SimulationOutput<F>> {
    let indices: Vec<usize> = (0..inputs.n_ues).collect();

    #[cfg(feature = "parallel")]
    let samples: Vec<MetricSample<F>> = indices
        .par_iter()
        .map(|&i| run_drop(inputs, i).map(|d| d.metric))
        .collect::<Result<_>>()?;

    #[cfg(not(feature = "parallel"))]
    let samples: Vec<MetricSample<F>> = indices
        .iter()
        .map(|&i| run_drop(inputs, i).map(|d| d.metric))
        .collect::<Result<_>>()?;

    let capacity_cdf = aggregate_cdf(
        &samples
            .iter()
            .map(|s| s.capacity_bpshz)
            .collect::<Vec<_>>(),
    )?;
    // Coupling loss can be -inf for an all-zero channel; keep the CDF finite
    // by flagging that explicitly instead.
    let coupling: Vec<F> = samples.iter().map(|s| s.coupling_loss_db).collect();
    if coupling.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteChannel);
    }
    let coupling_cdf = aggregate_cdf(&coupling)?;
    Ok(SimulationOutput {
        samples,
        capacity_cdf,
        coupling_cdf,
    })
}

/// One row of the near-field diagnostic report: element-wise phase and angle
/// deltas between near- and far-field parameterizations, for one cluster.
pub struct NearFieldReportRow<F> {
    pub cluster: usize,
    pub element: usize,
    pub phase_near_rad: F,
    pub phase_far_rad: F,
    pub aod_delta_rad: F,
    pub zod_delta_rad: F,
}

/// Per-element near-field deltas for one UE drop (first sub-cluster of each
/// cluster, BS side). Requires the near-field feature.
pub fn nearfield_report<F: Scalar>(
    inputs: &RunInputs<F>,
    ue_index: usize,
) -> Result<Vec<NearFieldReportRow<F>>> {
    let drop = run_drop(inputs, ue_index)?;
    let nf = drop.nearfield.as_ref().ok_or_else(|| {
        Error::InvalidConfig("nearfield-report needs the near_field feature enabled".into())
    })?;
    let offsets = element_positions(&inputs.bs);
    let two_pi = F::lit(2.0) * F::PI();
    let mut rows = Vec::new();
    for (n, d1_list) in nf.d1.iter().enumerate() {
        let ang = &drop.clusters.angles[n][0];
        let r_tx = crate::geometry::spherical_unit_vector(ang.zod, ang.aod);
        let d1 = d1_list[0];
        for (e, &off) in offsets.iter().enumerate() {
            let w = crate::nearfield::element_direction_vector(d1, r_tx, off)?;
            let (zod_e, aod_e) = angles_from_vector(w)?;
            let phase_near =
                crate::nearfield::nearfield_phase_delta(d1, r_tx, off, inputs.lambda)?;
            let phase_far = two_pi * r_tx.dot(off) / inputs.lambda;
            rows.push(NearFieldReportRow {
                cluster: n,
                element: e,
                phase_near_rad: phase_near,
                phase_far_rad: phase_far,
                aod_delta_rad: crate::geometry::wrap_angle(aod_e - ang.aod),
                zod_delta_rad: zod_e - ang.zod,
            });
        }
    }
    Ok(rows)
}

/// Attenuation raster of one cluster for one UE drop: (cluster index,
/// rows, cols, row-major alpha). Picks the requested cluster or the first
/// SNS cluster. Requires the stochastic SNS feature.
pub fn sns_field<F: Scalar>(
    inputs: &RunInputs<F>,
    ue_index: usize,
    cluster: Option<usize>,
) -> Result<(usize, usize, usize, Vec<F>)> {
    let drop = run_drop(inputs, ue_index)?;
    let vis = drop.visibility.as_ref().ok_or_else(|| {
        Error::InvalidConfig("sns-field needs the sns_stochastic feature enabled".into())
    })?;
    let idx = match cluster {
        Some(c) if c < vis.len() => c,
        Some(c) => {
            return Err(Error::InvalidConfig(format!(
                "cluster {c} out of range (drop has {})",
                vis.len()
            )))
        }
        None => vis.iter().position(|v| v.is_sns).unwrap_or(0),
    };
    Ok((
        idx,
        inputs.bs.rows,
        inputs.bs.cols,
        vis[idx].alpha.clone(),
    ))
}

/// Per-element blocker loss for the direct ray of one UE drop:
/// (element index, plane coords, loss dB). Requires a configured scene.
pub fn blockage_demo<F: Scalar>(
    inputs: &RunInputs<F>,
    ue_index: usize,
) -> Result<Vec<(usize, F, F, F)>> {
    if inputs.scene.blockers.is_empty() {
        return Err(Error::InvalidConfig(
            "blockage-demo needs at least one configured blocker".into(),
        ));
    }
    let mut placement_rng = stream_rng(inputs.seed, ue_index as u64, StreamId::Placement);
    let position = place_ue(
        inputs.drop_radius,
        inputs.min_distance_2d,
        inputs.ue.reference_point.z,
        &mut placement_rng,
    );
    let offsets = element_positions(&inputs.bs);
    let plane = inputs.bs.plane_coords();
    let bs_ref = inputs.bs.reference_point;
    offsets
        .iter()
        .zip(plane.iter())
        .enumerate()
        .map(|(e, (&off, &(x, y)))| {
            let alpha = scene_attenuation(
                &inputs.scene,
                bs_ref + off,
                position,
                inputs.lambda,
                inputs.time,
            )?;
            Ok((e, x, y, -alpha.linear_to_db()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimulationConfig;
    use crate::test_fixtures::test_config_toml;
    use std::path::Path;

    fn run_inputs(mutate: impl FnOnce(String) -> String) -> RunInputs<f64> {
        let text = mutate(test_config_toml());
        SimulationConfig::parse(&text, Path::new("."))
            .unwrap()
            .build::<f64>()
            .unwrap()
    }

    #[test]
    fn placement_respects_annulus() {
        let inputs = run_inputs(|t| t.replace("min_distance_2d_m = 0.0", "min_distance_2d_m = 3.0"));
        for i in 0..200 {
            let d = run_drop(&inputs, i).unwrap();
            let r2d = (d.position.x * d.position.x + d.position.y * d.position.y).sqrt();
            assert!(r2d >= 3.0 - 1e-12 && r2d <= 10.0 + 1e-12, "r = {r2d}");
            assert_eq!(d.position.z, 1.0);
        }
    }

    #[test]
    fn base_run_matches_direct_pipeline() {
        // All features off: the drop is exactly the far-field SS pipeline.
        let inputs = run_inputs(|t| t);
        let d = run_drop(&inputs, 0).unwrap();
        assert!(d.nearfield.is_none());
        assert!(d.visibility.is_none());
        assert!(d.usage.is_none());
        assert_eq!(d.metric.mode, "base");
        assert!(d.metric.capacity_bpshz > 0.0);
        assert!(d.metric.coupling_loss_db.is_finite());
    }

    #[test]
    fn same_seed_same_metrics() {
        let inputs = run_inputs(|t| t);
        let a = run_drop_loop(&inputs).unwrap();
        let b = run_drop_loop(&inputs).unwrap();
        for (x, y) in a.samples.iter().zip(b.samples.iter()) {
            assert_eq!(x.capacity_bpshz.to_bits(), y.capacity_bpshz.to_bits());
            assert_eq!(x.coupling_loss_db.to_bits(), y.coupling_loss_db.to_bits());
        }
    }

    #[test]
    fn feature_streams_do_not_disturb_small_scale() {
        // Enabling near-field must not change any small-scale draw.
        let base = run_inputs(|t| t);
        let nf = run_inputs(|t| t.replace("near_field = false", "near_field = true"));
        let a = run_drop(&base, 3).unwrap();
        let b = run_drop(&nf, 3).unwrap();
        assert_eq!(a.clusters.delays, b.clusters.delays);
        assert_eq!(a.clusters.powers, b.clusters.powers);
        for (ra, rb) in a
            .clusters
            .angles
            .iter()
            .flatten()
            .zip(b.clusters.angles.iter().flatten())
        {
            assert_eq!(ra.aoa.to_bits(), rb.aoa.to_bits());
            assert_eq!(ra.zod.to_bits(), rb.zod.to_bits());
        }
        assert!(b.nearfield.is_some());
    }

    #[test]
    fn sns_stochastic_features_populate() {
        let inputs = run_inputs(|t| t.replace("sns_stochastic = false", "sns_stochastic = true"));
        let d = run_drop(&inputs, 1).unwrap();
        let vis = d.visibility.unwrap();
        assert_eq!(vis.len(), inputs.params.n_clusters);
        for v in &vis {
            assert_eq!(v.alpha.len(), inputs.bs.num_positions());
            assert!(v.alpha.iter().all(|&a| a > 0.0 && a <= 1.0));
            if !v.is_sns {
                assert!(v.alpha.iter().all(|&a| a == 1.0));
            }
        }
        assert_eq!(d.metric.mode, "sns-stoch");
    }

    #[test]
    fn distant_blockers_leave_cir_bit_exact() {
        // A scene whose screens never intersect any ray's shadow region
        // reproduces the unblocked CIR exactly.
        let base = run_inputs(|t| t);
        let blocked = run_inputs(|t| {
            t.replace(
                "[pathloss]",
                "[[blockers]]\nkind = \"billboard\"\ncenter_m = [0.0, 500.0, 2.0]\nwidth_m = 2.0\nheight_m = 2.0\n\n\
                 [[blockers]]\nkind = \"pillar\"\ncenter_m = [-300.0, 0.0, 1.5]\nwidth_m = 0.6\nheight_m = 3.0\n\n[pathloss]",
            )
            .replace("sns_blocker = false", "sns_blocker = true")
        });
        for ue in 0..4 {
            let a = run_drop(&base, ue).unwrap();
            let b = run_drop(&blocked, ue).unwrap();
            for (la, lb) in a.channel.links.iter().zip(b.channel.links.iter()) {
                for (ta, tb) in la.taps.iter().zip(lb.taps.iter()) {
                    assert_eq!(ta.amplitude, tb.amplitude);
                    assert_eq!(ta.delay, tb.delay);
                }
            }
        }
    }

    #[test]
    fn ue_attenuation_uniform_across_clusters() {
        // One beta per RX element, applied identically to every tap: the
        // attenuated link is the base link scaled by sqrt(beta(u)).
        use crate::sns_ue::{FrequencyBand, UeAttenuationTable, UsageScenario};
        let base = run_inputs(|t| t);
        let mut attenuated = run_inputs(|t| t);
        attenuated.flags.sns_ue = true;
        // Deterministic usage draw: everything obstructed, always one-hand.
        attenuated.ue_probs.obstructed = 1.0;
        attenuated.ue_probs.one_hand = 1.0;
        attenuated.ue_probs.two_hand = 0.0;
        attenuated.ue_probs.head_one_hand = 0.0;
        let betas_db = [2.0, 5.0, 1.0, 7.5];
        let mut table = UeAttenuationTable::new();
        for (pos, &db) in betas_db.iter().enumerate() {
            table.insert(UsageScenario::OneHand, FrequencyBand::From1To8p4GHz, pos, db);
        }
        attenuated.ue_table = table;
        let a = run_drop(&base, 2).unwrap();
        let b = run_drop(&attenuated, 2).unwrap();
        assert_eq!(b.usage, Some(UsageScenario::OneHand));
        for u in 0..a.channel.n_rx {
            let scale = 10f64.powf(-betas_db[u] / 10.0).sqrt();
            for s in 0..a.channel.n_tx {
                for (ta, tb) in a
                    .channel
                    .link(u, s)
                    .taps
                    .iter()
                    .zip(b.channel.link(u, s).taps.iter())
                {
                    let expect = ta.amplitude * num_complex::Complex::new(scale, 0.0);
                    assert!(
                        (tb.amplitude - expect).norm() < 1e-15,
                        "tap not uniformly scaled by beta"
                    );
                }
            }
        }
    }

    #[test]
    fn report_helpers_run() {
        let inputs = run_inputs(|t| {
            t.replace("near_field = false", "near_field = true")
                .replace("sns_stochastic = false", "sns_stochastic = true")
        });
        let rows = nearfield_report(&inputs, 0).unwrap();
        assert_eq!(
            rows.len(),
            inputs.params.n_clusters * inputs.bs.num_positions()
        );
        let (_idx, r, c, alpha) = sns_field(&inputs, 0, None).unwrap();
        assert_eq!(alpha.len(), r * c);
    }
}
