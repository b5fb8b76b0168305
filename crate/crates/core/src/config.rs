//! Simulator configuration: one TOML file with named sections, resolved
//! into the runtime parameter types.
//!
//! Scenario-dependent constants that the channel model itself does not fix
//! (delay/angular spreads, K-factor, path loss, and so on) always come from
//! this file; the bundled configs ship plausible, non-normative values. The
//! near-field and SNS sections may be omitted, in which case the shipped
//! per-scenario defaults apply.

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, FieldPattern, Vec3};
use crate::metrics::{PathLossKind, PathLossModel};
use crate::nearfield::NearFieldParams;
use crate::scalar::Scalar;
use crate::smallscale::{default_ray_offsets, default_subcluster_rays, ScenarioParams};
use crate::sns_blocker::{Blocker, BlockerKind, Scene};
use crate::sns_stochastic::SnsScenarioParams;
use crate::sns_ue::{UeAttenuationTable, UsageProbabilities};
use crate::synthesis::ModeFlags;
use crate::Scenario;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub scenario: ScenarioSection,
    pub smallscale: SmallScaleSection,
    pub arrays: ArraysSection,
    #[serde(default)]
    pub nearfield: Option<NearFieldSection>,
    #[serde(default)]
    pub sns_stochastic: Option<SnsStochasticSection>,
    #[serde(default)]
    pub blockers: Vec<BlockerSection>,
    #[serde(default)]
    pub ue_sns: UeSnsSection,
    pub pathloss: PathLossSection,
    pub simulation: SimSection,
    /// Directory of the config file, for resolving relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: Scenario,
    pub carrier_hz: f64,
    pub los: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallScaleSection {
    pub n_clusters: usize,
    pub rays_per_cluster: usize,
    pub delay_spread_s: f64,
    pub delay_scaling: f64,
    pub cluster_shadowing_db: f64,
    pub asd_deg: f64,
    pub asa_deg: f64,
    pub zsd_deg: f64,
    pub zsa_deg: f64,
    pub k_mean_db: f64,
    pub k_std_db: f64,
    pub xpr_mean_db: f64,
    pub xpr_std_db: f64,
    pub cluster_delay_spread_s: f64,
    pub excess_delay_lg_mu: f64,
    pub excess_delay_lg_sigma: f64,
    pub c_phi: f64,
    pub c_theta: f64,
    pub cluster_asd_deg: f64,
    pub cluster_asa_deg: f64,
    pub cluster_zsd_deg: f64,
    pub cluster_zsa_deg: f64,
    /// Ray offset table; defaults to the 20-ray table.
    #[serde(default)]
    pub ray_offsets: Option<Vec<f64>>,
    /// 1-indexed sub-cluster ray partition; defaults to the M = 20 split.
    #[serde(default)]
    pub subcluster_rays: Option<[Vec<usize>; 3]>,
    #[serde(default = "default_subcluster_offsets")]
    pub subcluster_offset_scale: [f64; 3],
    #[serde(default = "default_true")]
    pub vp_power_post_k: bool,
}

fn default_subcluster_offsets() -> [f64; 3] {
    [0.0, 1.28, 2.56]
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraysSection {
    pub bs: ArraySection,
    pub ue: ArraySection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArraySection {
    pub rows: usize,
    pub cols: usize,
    pub spacing_h_wavelengths: f64,
    pub spacing_v_wavelengths: f64,
    pub polarizations: usize,
    #[serde(default)]
    pub single_pol_slant_deg: f64,
    #[serde(default)]
    pub bearing_deg: f64,
    #[serde(default)]
    pub downtilt_deg: f64,
    #[serde(default)]
    pub slant_deg: f64,
    pub height_m: f64,
    pub pattern: PatternSection,
    #[serde(default)]
    pub velocity_mps: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PatternSection {
    Isotropic,
    Directional {
        max_gain_dbi: f64,
        theta_3db_deg: f64,
        phi_3db_deg: f64,
        sla_v_db: f64,
        a_max_db: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NearFieldSection {
    pub n_spec: usize,
    pub beta_alpha: f64,
    pub beta_beta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnsStochasticSection {
    pub pr_mu: f64,
    pub pr_sigma: f64,
    pub vp_a: f64,
    pub vp_b: f64,
    #[serde(default)]
    pub vp_r: Option<f64>,
    pub vp_noise_var: f64,
    #[serde(default = "default_rolloff")]
    pub rolloff: f64,
}

fn default_rolloff() -> f64 {
    13.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockerSection {
    pub kind: BlockerKind,
    pub center_m: [f64; 3],
    pub width_m: f64,
    pub height_m: f64,
    #[serde(default)]
    pub velocity_mps: [f64; 3],
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct UeSnsSection {
    #[serde(default)]
    pub table_path: Option<PathBuf>,
    #[serde(default)]
    pub nearest_band: bool,
    #[serde(default)]
    pub p_obstructed: Option<f64>,
    #[serde(default)]
    pub p_one_hand: Option<f64>,
    #[serde(default)]
    pub p_two_hand: Option<f64>,
    #[serde(default)]
    pub p_head_one_hand: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum PathLossSection {
    #[serde(rename = "log-distance")]
    LogDistance {
        intercept_db: f64,
        exponent: f64,
        shadowing_std_db: f64,
    },
    #[serde(rename = "table")]
    Table {
        points: Vec<[f64; 2]>,
        shadowing_std_db: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n_ues: usize,
    pub drop_radius_m: f64,
    #[serde(default)]
    pub min_distance_2d_m: f64,
    pub seed: u64,
    pub snr_db: f64,
    #[serde(default)]
    pub time_s: f64,
    pub features: FeaturesSection,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FeaturesSection {
    #[serde(default)]
    pub near_field: bool,
    #[serde(default)]
    pub sns_stochastic: bool,
    #[serde(default)]
    pub sns_blocker: bool,
    #[serde(default)]
    pub sns_ue: bool,
}

impl FeaturesSection {
    pub fn flags(&self) -> ModeFlags {
        ModeFlags {
            near_field: self.near_field,
            sns_stochastic: self.sns_stochastic,
            sns_blocker: self.sns_blocker,
            sns_ue: self.sns_ue,
        }
    }
}

impl SimulationConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: SimulationConfig =
            toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    pub fn wavelength(&self) -> f64 {
        crate::scalar::SPEED_OF_LIGHT / self.scenario.carrier_hz
    }

    fn array_geometry<F: Scalar>(&self, section: &ArraySection) -> ArrayGeometry<F> {
        let lambda = self.wavelength();
        let deg = std::f64::consts::PI / 180.0;
        ArrayGeometry {
            rows: section.rows,
            cols: section.cols,
            spacing_h: F::lit(section.spacing_h_wavelengths * lambda),
            spacing_v: F::lit(section.spacing_v_wavelengths * lambda),
            polarizations: section.polarizations,
            single_pol_slant: F::lit(section.single_pol_slant_deg * deg),
            reference_point: Vec3::new(F::zero(), F::zero(), F::lit(section.height_m)),
            bearing: F::lit(section.bearing_deg * deg),
            downtilt: F::lit(section.downtilt_deg * deg),
            slant: F::lit(section.slant_deg * deg),
        }
    }

    fn pattern<F: Scalar>(section: &PatternSection) -> FieldPattern<F> {
        match section {
            PatternSection::Isotropic => FieldPattern::Isotropic,
            PatternSection::Directional {
                max_gain_dbi,
                theta_3db_deg,
                phi_3db_deg,
                sla_v_db,
                a_max_db,
            } => FieldPattern::Directional {
                max_gain_dbi: F::lit(*max_gain_dbi),
                theta_3db_deg: F::lit(*theta_3db_deg),
                phi_3db_deg: F::lit(*phi_3db_deg),
                sla_v_db: F::lit(*sla_v_db),
                a_max_db: F::lit(*a_max_db),
            },
        }
    }

    pub fn scenario_params<F: Scalar>(&self) -> Result<ScenarioParams<F>> {
        let ss = &self.smallscale;
        let near_field = match &self.nearfield {
            Some(nf) => NearFieldParams {
                n_spec: nf.n_spec,
                beta_alpha: F::lit(nf.beta_alpha),
                beta_beta: F::lit(nf.beta_beta),
            },
            None => NearFieldParams::for_scenario(self.scenario.name),
        };
        let sns = match &self.sns_stochastic {
            Some(s) => SnsScenarioParams {
                pr_mu: F::lit(s.pr_mu),
                pr_sigma: F::lit(s.pr_sigma),
                vp_a: F::lit(s.vp_a),
                vp_b: F::lit(s.vp_b),
                vp_r: s.vp_r.map(F::lit),
                vp_noise_var: F::lit(s.vp_noise_var),
                rolloff: F::lit(s.rolloff),
            },
            None => SnsScenarioParams::for_scenario(self.scenario.name),
        };
        let ray_offsets = match &ss.ray_offsets {
            Some(v) => v.iter().map(|&x| F::lit(x)).collect(),
            None => default_ray_offsets(),
        };
        // Config partitions are 1-indexed like the usual tables.
        let subcluster_rays = match &ss.subcluster_rays {
            Some(sets) => {
                let mut out: [Vec<usize>; 3] = [vec![], vec![], vec![]];
                for (i, set) in sets.iter().enumerate() {
                    for &m in set {
                        if m == 0 {
                            return Err(Error::InvalidConfig(
                                "subcluster_rays entries are 1-indexed".into(),
                            ));
                        }
                        out[i].push(m - 1);
                    }
                }
                out
            }
            None => default_subcluster_rays(),
        };
        let params = ScenarioParams {
            scenario: self.scenario.name,
            n_clusters: ss.n_clusters,
            rays_per_cluster: ss.rays_per_cluster,
            delay_spread: F::lit(ss.delay_spread_s),
            delay_scaling: F::lit(ss.delay_scaling),
            cluster_shadowing_db: F::lit(ss.cluster_shadowing_db),
            asd_deg: F::lit(ss.asd_deg),
            asa_deg: F::lit(ss.asa_deg),
            zsd_deg: F::lit(ss.zsd_deg),
            zsa_deg: F::lit(ss.zsa_deg),
            k_mean_db: F::lit(ss.k_mean_db),
            k_std_db: F::lit(ss.k_std_db),
            xpr_mean_db: F::lit(ss.xpr_mean_db),
            xpr_std_db: F::lit(ss.xpr_std_db),
            cluster_delay_spread: F::lit(ss.cluster_delay_spread_s),
            excess_delay_lg_mu: F::lit(ss.excess_delay_lg_mu),
            excess_delay_lg_sigma: F::lit(ss.excess_delay_lg_sigma),
            c_phi: F::lit(ss.c_phi),
            c_theta: F::lit(ss.c_theta),
            cluster_asd_deg: F::lit(ss.cluster_asd_deg),
            cluster_asa_deg: F::lit(ss.cluster_asa_deg),
            cluster_zsd_deg: F::lit(ss.cluster_zsd_deg),
            cluster_zsa_deg: F::lit(ss.cluster_zsa_deg),
            ray_offsets,
            subcluster_rays,
            subcluster_offset_scale: [
                F::lit(ss.subcluster_offset_scale[0]),
                F::lit(ss.subcluster_offset_scale[1]),
                F::lit(ss.subcluster_offset_scale[2]),
            ],
            vp_power_post_k: ss.vp_power_post_k,
            near_field,
            sns,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn scene<F: Scalar>(&self) -> Scene<F> {
        Scene {
            blockers: self
                .blockers
                .iter()
                .map(|b| Blocker {
                    kind: b.kind,
                    center: Vec3::new(
                        F::lit(b.center_m[0]),
                        F::lit(b.center_m[1]),
                        F::lit(b.center_m[2]),
                    ),
                    width: F::lit(b.width_m),
                    height: F::lit(b.height_m),
                    velocity: Vec3::new(
                        F::lit(b.velocity_mps[0]),
                        F::lit(b.velocity_mps[1]),
                        F::lit(b.velocity_mps[2]),
                    ),
                })
                .collect(),
        }
    }

    pub fn pathloss<F: Scalar>(&self) -> PathLossModel<F> {
        match &self.pathloss {
            PathLossSection::LogDistance {
                intercept_db,
                exponent,
                shadowing_std_db,
            } => PathLossModel {
                kind: PathLossKind::LogDistance {
                    intercept_db: F::lit(*intercept_db),
                    exponent: F::lit(*exponent),
                },
                shadowing_std_db: F::lit(*shadowing_std_db),
            },
            PathLossSection::Table {
                points,
                shadowing_std_db,
            } => PathLossModel {
                kind: PathLossKind::Table {
                    points: points.iter().map(|p| (F::lit(p[0]), F::lit(p[1]))).collect(),
                },
                shadowing_std_db: F::lit(*shadowing_std_db),
            },
        }
    }

    pub fn usage_probabilities<F: Scalar>(&self) -> UsageProbabilities<F> {
        let d = UsageProbabilities::<F>::default();
        UsageProbabilities {
            obstructed: self.ue_sns.p_obstructed.map_or(d.obstructed, F::lit),
            one_hand: self.ue_sns.p_one_hand.map_or(d.one_hand, F::lit),
            two_hand: self.ue_sns.p_two_hand.map_or(d.two_hand, F::lit),
            head_one_hand: self.ue_sns.p_head_one_hand.map_or(d.head_one_hand, F::lit),
        }
    }

    pub fn ue_table<F: Scalar>(&self) -> Result<UeAttenuationTable<F>> {
        match &self.ue_sns.table_path {
            None => Ok(UeAttenuationTable::new()),
            Some(p) => {
                let path = if p.is_absolute() {
                    p.clone()
                } else {
                    self.base_dir.join(p)
                };
                UeAttenuationTable::load(&path)
            }
        }
    }

    /// Resolve and validate everything into the runtime input set.
    pub fn build<F: Scalar>(&self) -> Result<crate::sim::RunInputs<F>> {
        let params = self.scenario_params::<F>()?;
        let flags = self.simulation.features.flags();
        if flags.sns_stochastic && flags.sns_blocker {
            return Err(Error::InvalidConfig(
                "sns_stochastic and sns_blocker are mutually exclusive at the BS side".into(),
            ));
        }
        if self.simulation.n_ues == 0 {
            return Err(Error::InvalidConfig("n_ues must be >= 1".into()));
        }
        if !(self.simulation.drop_radius_m > 0.0) {
            return Err(Error::InvalidConfig("drop_radius_m must be > 0".into()));
        }
        if self.simulation.min_distance_2d_m < 0.0
            || self.simulation.min_distance_2d_m >= self.simulation.drop_radius_m
        {
            return Err(Error::InvalidConfig(
                "min_distance_2d_m must be in [0, drop_radius_m)".into(),
            ));
        }
        if flags.sns_blocker && self.blockers.is_empty() {
            return Err(Error::InvalidConfig(
                "sns_blocker is enabled but no blockers are configured".into(),
            ));
        }
        let bs = self.array_geometry::<F>(&self.arrays.bs);
        let ue = self.array_geometry::<F>(&self.arrays.ue);
        bs.validate()?;
        ue.validate()?;
        let scene = self.scene::<F>();
        scene.validate()?;
        let pathloss = self.pathloss::<F>();
        pathloss.validate()?;
        let probs = self.usage_probabilities::<F>();
        probs.validate()?;
        let table = self.ue_table::<F>()?;
        if flags.sns_ue {
            if table.is_empty() {
                return Err(Error::InvalidConfig(
                    "sns_ue is enabled but no attenuation table is configured".into(),
                ));
            }
            // Every grip scenario must cover every UE grid position at the
            // carrier band (or the nearest band when that fallback is on).
            use crate::sns_ue::{band_for_frequency, nearest_band, ue_attenuation, UsageScenario};
            let fc = self.scenario.carrier_hz;
            if band_for_frequency(fc).is_none() && !self.ue_sns.nearest_band {
                return Err(Error::NoBandData { freq_hz: fc });
            }
            let _ = nearest_band(fc);
            for kind in [
                UsageScenario::OneHand,
                UsageScenario::TwoHand,
                UsageScenario::HeadOneHand,
            ] {
                for pos in 0..ue.num_positions() {
                    ue_attenuation(kind, fc, pos, &table, self.ue_sns.nearest_band)?;
                }
            }
        }
        Ok(crate::sim::RunInputs {
            scenario: self.scenario.name,
            carrier_hz: self.scenario.carrier_hz,
            lambda: F::lit(self.wavelength()),
            los: self.scenario.los,
            params,
            bs,
            bs_pattern: Self::pattern(&self.arrays.bs.pattern),
            ue,
            ue_pattern: Self::pattern(&self.arrays.ue.pattern),
            ue_velocity: Vec3::new(
                F::lit(self.arrays.ue.velocity_mps[0]),
                F::lit(self.arrays.ue.velocity_mps[1]),
                F::lit(self.arrays.ue.velocity_mps[2]),
            ),
            time: F::lit(self.simulation.time_s),
            scene,
            ue_probs: probs,
            ue_table: table,
            nearest_band: self.ue_sns.nearest_band,
            pathloss,
            n_ues: self.simulation.n_ues,
            drop_radius: F::lit(self.simulation.drop_radius_m),
            min_distance_2d: F::lit(self.simulation.min_distance_2d_m),
            seed: self.simulation.seed,
            snr: F::lit(self.simulation.snr_db).db_to_linear(),
            flags,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::test_config_toml;

    #[test]
    fn parse_and_build() {
        let cfg = SimulationConfig::parse(&test_config_toml(), Path::new(".")).unwrap();
        let run = cfg.build::<f64>().unwrap();
        assert_eq!(run.scenario, Scenario::InH);
        assert!(run.los);
        assert!((run.lambda - 299_792_458.0 / 7.0e9).abs() < 1e-12);
        assert_eq!(run.bs.num_elements(), 64);
        // Defaults pulled from the shipped per-scenario tables.
        assert_eq!(run.params.near_field.n_spec, 4);
        assert_eq!(run.params.sns.vp_b, 0.60);
    }

    #[test]
    fn both_bs_sns_modes_rejected() {
        let text = test_config_toml()
            .replace("sns_stochastic = false", "sns_stochastic = true")
            .replace("sns_blocker = false", "sns_blocker = true");
        let cfg = SimulationConfig::parse(&text, Path::new(".")).unwrap();
        // A blocker section is also required, but the mutual exclusion trips
        // first.
        assert!(matches!(
            cfg.build::<f64>(),
            Err(Error::InvalidConfig(msg)) if msg.contains("mutually exclusive")
        ));
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = test_config_toml().replace("los = true", "los = true\nbogus_field = 3");
        assert!(SimulationConfig::parse(&text, Path::new(".")).is_err());
    }

    #[test]
    fn zero_ues_rejected() {
        let text = test_config_toml().replace("n_ues = 4", "n_ues = 0");
        let cfg = SimulationConfig::parse(&text, Path::new(".")).unwrap();
        assert!(cfg.build::<f64>().is_err());
    }
}
