//! Command-line front end of the XL-MIMO channel simulator.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use xlchan_core::config::{FeaturesSection, SimulationConfig};
use xlchan_core::export;
use xlchan_core::sim::{self, RunInputs};

#[derive(Parser)]
#[command(
    name = "xlchansim",
    about = "Drop-based XL-MIMO channel simulator with near-field and spatial \
             non-stationarity features",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Simulation config file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of UE drops.
    #[arg(long)]
    ues: Option<usize>,
    /// Override the feature set: comma list of nf, sns-stoch, sns-block,
    /// sns-ue, or "none".
    #[arg(long)]
    features: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo drop loop and write metrics and CDF files.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also dump the (u=0, s=0) power delay profile of this UE.
        #[arg(long)]
        dump_pdp: Option<usize>,
        /// Also dump the full binary tap file of this UE.
        #[arg(long)]
        dump_taps: Option<usize>,
    },
    /// Dump per-element near-field phase/angle deltas for one UE link.
    NearfieldReport {
        #[command(flatten)]
        common: CommonArgs,
        /// UE index to report.
        #[arg(long, default_value_t = 0)]
        ue: usize,
    },
    /// Dump the attenuation field of one cluster as a CSV raster.
    SnsField {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0)]
        ue: usize,
        /// Cluster index; defaults to the first SNS cluster of the drop.
        #[arg(long)]
        cluster: Option<usize>,
    },
    /// Dump per-element blocker loss for the direct ray of one UE.
    BlockageDemo {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0)]
        ue: usize,
    },
}

fn parse_features(spec: &str) -> Result<FeaturesSection> {
    let mut f = FeaturesSection::default();
    if spec.trim() == "none" {
        return Ok(f);
    }
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token {
            "nf" => f.near_field = true,
            "sns-stoch" => f.sns_stochastic = true,
            "sns-block" => f.sns_blocker = true,
            "sns-ue" => f.sns_ue = true,
            other => bail!("unknown feature token '{other}'"),
        }
    }
    Ok(f)
}

fn load_inputs(common: &CommonArgs) -> Result<RunInputs<f64>> {
    let mut cfg = SimulationConfig::load(&common.config)
        .with_context(|| format!("loading config {}", common.config.display()))?;
    if let Some(seed) = common.seed {
        cfg.simulation.seed = seed;
    }
    if let Some(ues) = common.ues {
        cfg.simulation.n_ues = ues;
    }
    if let Some(spec) = &common.features {
        cfg.simulation.features = parse_features(spec)?;
    }
    Ok(cfg.build::<f64>()?)
}

fn writer(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| {
        format!("creating {}", path.display())
    })?))
}

fn init_thread_pool() {
    if let Ok(spec) = std::env::var("XLCHANSIM_THREADS") {
        match spec.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("ignoring invalid XLCHANSIM_THREADS='{spec}'"),
        }
    }
}

fn main() -> Result<()> {
    init_thread_pool();
    match Cli::parse().command {
        Command::Simulate {
            common,
            dump_pdp,
            dump_taps,
        } => {
            let inputs = load_inputs(&common)?;
            let label = inputs.flags.label();
            let aperture =
                (inputs.bs.width().powi(2) + inputs.bs.height().powi(2)).sqrt();
            eprintln!(
                "simulate: {} UEs, scenario {:?}, features [{}], seed {}",
                inputs.n_ues, inputs.scenario, label, inputs.seed
            );
            eprintln!(
                "BS aperture {:.2} m, Fraunhofer boundary {:.1} m, drop radius {:.1} m",
                aperture,
                xlchan_core::geometry::fraunhofer_distance(aperture, inputs.lambda),
                inputs.drop_radius
            );
            let output = sim::run_drop_loop(&inputs)?;
            export::write_metrics_csv(&output.samples, &mut writer(&common.out, "metrics.csv")?)?;
            export::write_cdf_csv(
                &output.capacity_cdf,
                &mut writer(&common.out, "capacity_cdf.csv")?,
            )?;
            export::write_cdf_csv(
                &output.coupling_cdf,
                &mut writer(&common.out, "coupling_loss_cdf.csv")?,
            )?;
            for (ue, kind) in [(dump_pdp, "pdp"), (dump_taps, "taps")] {
                let Some(ue) = ue else { continue };
                if ue >= inputs.n_ues {
                    bail!("--dump-{kind} index {ue} out of range (n_ues = {})", inputs.n_ues);
                }
                let drop = sim::run_drop(&inputs, ue)?;
                if kind == "pdp" {
                    export::write_pdp_csv(
                        drop.channel.link(0, 0),
                        &mut writer(&common.out, &format!("pdp_ue{ue}.csv"))?,
                    )?;
                } else {
                    export::write_tap_dump(
                        &drop.channel,
                        &mut writer(&common.out, &format!("taps_ue{ue}.bin"))?,
                    )?;
                }
            }
            let med_cap = output.capacity_cdf[output.capacity_cdf.len() / 2].0;
            let med_cl = output.coupling_cdf[output.coupling_cdf.len() / 2].0;
            eprintln!("median capacity {med_cap:.3} bps/Hz, median coupling loss {med_cl:.2} dB");
            Ok(())
        }
        Command::NearfieldReport { common, ue } => {
            let inputs = load_inputs(&common)?;
            let rows = sim::nearfield_report(&inputs, ue)?;
            export::write_nearfield_report(
                &rows,
                &mut writer(&common.out, "nearfield_report.csv")?,
            )?;
            Ok(())
        }
        Command::SnsField {
            common,
            ue,
            cluster,
        } => {
            let inputs = load_inputs(&common)?;
            let (idx, rows, cols, alpha) = sim::sns_field(&inputs, ue, cluster)?;
            eprintln!("sns-field: cluster {idx}, {rows}x{cols} raster");
            export::write_alpha_raster(
                rows,
                cols,
                &alpha,
                &mut writer(&common.out, "sns_field.csv")?,
            )?;
            Ok(())
        }
        Command::BlockageDemo { common, ue } => {
            let inputs = load_inputs(&common)?;
            let rows = sim::blockage_demo(&inputs, ue)?;
            export::write_blockage_csv(&rows, &mut writer(&common.out, "blockage_demo.csv")?)?;
            Ok(())
        }
    }
}
