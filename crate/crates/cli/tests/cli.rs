//! End-to-end checks of the compiled binary: subcommands, outputs, feature
//! overrides, determinism, and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_xlchansim")
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("xlchansim_cli_tests").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

const CONFIG: &str = r#"
[scenario]
name = "InH"
carrier_hz = 7.0e9
los = true

[smallscale]
n_clusters = 8
rays_per_cluster = 20
delay_spread_s = 20.0e-9
delay_scaling = 3.0
cluster_shadowing_db = 3.0
asd_deg = 30.0
asa_deg = 40.0
zsd_deg = 3.0
zsa_deg = 5.0
k_mean_db = 9.0
k_std_db = 3.0
xpr_mean_db = 10.0
xpr_std_db = 3.0
cluster_delay_spread_s = 3.9e-9
excess_delay_lg_mu = -7.8
excess_delay_lg_sigma = 0.3
c_phi = 1.018
c_theta = 0.9
cluster_asd_deg = 5.0
cluster_asa_deg = 8.0
cluster_zsd_deg = 2.0
cluster_zsa_deg = 3.0

[arrays.bs]
rows = 4
cols = 8
spacing_h_wavelengths = 0.5
spacing_v_wavelengths = 0.5
polarizations = 1
height_m = 3.0
pattern = { kind = "isotropic" }

[arrays.ue]
rows = 1
cols = 2
spacing_h_wavelengths = 0.5
spacing_v_wavelengths = 0.5
polarizations = 1
height_m = 1.0
pattern = { kind = "isotropic" }

[[blockers]]
kind = "billboard"
center_m = [3.0, 0.5, 2.0]
width_m = 2.0
height_m = 1.5

[ue_sns]
table_path = "ue_table.csv"

[pathloss]
kind = "log-distance"
intercept_db = 49.3
exponent = 1.73
shadowing_std_db = 3.0

[simulation]
n_ues = 6
drop_radius_m = 8.0
min_distance_2d_m = 0.0
seed = 99
snr_db = 10.0

[simulation.features]
near_field = true
sns_stochastic = true
sns_blocker = false
sns_ue = false
"#;

const UE_TABLE: &str = "\
scenario,band,element_index,attenuation_db
one_hand,1-8.4ghz,0,3.0
one_hand,1-8.4ghz,1,2.0
two_hand,1-8.4ghz,0,6.0
two_hand,1-8.4ghz,1,5.0
head_one_hand,1-8.4ghz,0,9.0
head_one_hand,1-8.4ghz,1,8.0
";

fn setup(dir: &Path) -> PathBuf {
    let config = dir.join("sim.toml");
    fs::write(&config, CONFIG).unwrap();
    fs::write(dir.join("ue_table.csv"), UE_TABLE).unwrap();
    config
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .env("XLCHANSIM_THREADS", "2")
        .output()
        .expect("binary runs")
}

#[test]
fn simulate_writes_outputs() {
    let dir = workdir("simulate");
    let config = setup(&dir);
    let out = dir.join("out");
    let result = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--dump-pdp",
        "0",
        "--dump-taps",
        "1",
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("ue_id,mode,capacity_bpshz,coupling_loss_db"));
    assert_eq!(metrics.lines().count(), 7); // header + 6 UEs
    assert!(metrics.lines().nth(1).unwrap().contains("nf+sns-stoch"));
    let cdf = fs::read_to_string(out.join("capacity_cdf.csv")).unwrap();
    assert!(cdf.starts_with("value,probability"));
    assert!(out.join("coupling_loss_cdf.csv").exists());
    let pdp = fs::read_to_string(out.join("pdp_ue0.csv")).unwrap();
    assert!(pdp.starts_with("delay_ns,power_db"));
    // Tap dump header: magic + version + U + S.
    let taps = fs::read(out.join("taps_ue1.bin")).unwrap();
    assert_eq!(&taps[0..4], b"XLCH");
    assert_eq!(u32::from_le_bytes(taps[4..8].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(taps[8..12].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(taps[12..16].try_into().unwrap()), 32);
    assert_eq!((taps.len() - 16) % (24 * 2 * 32), 0);
}

#[test]
fn same_seed_is_byte_identical() {
    let dir = workdir("determinism");
    let config = setup(&dir);
    let (o1, o2) = (dir.join("o1"), dir.join("o2"));
    for out in [&o1, &o2] {
        let result = run(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    assert_eq!(
        fs::read(o1.join("metrics.csv")).unwrap(),
        fs::read(o2.join("metrics.csv")).unwrap()
    );
    assert_eq!(
        fs::read(o1.join("capacity_cdf.csv")).unwrap(),
        fs::read(o2.join("capacity_cdf.csv")).unwrap()
    );
}

#[test]
fn feature_override_changes_mode_label() {
    let dir = workdir("features");
    let config = setup(&dir);
    let out = dir.join("out");
    let result = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--features",
        "nf,sns-ue",
        "--ues",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.contains("nf+sns-ue"));
    // "none" disables everything.
    let result = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--features",
        "none",
        "--ues",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.lines().nth(1).unwrap().contains(",base,"));
}

#[test]
fn report_subcommands_write_files() {
    let dir = workdir("reports");
    let config = setup(&dir);
    let out = dir.join("out");
    let result = run(&[
        "nearfield-report",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let report = fs::read_to_string(out.join("nearfield_report.csv")).unwrap();
    assert!(report.starts_with("cluster,element,phase_near_rad,phase_far_rad"));
    assert_eq!(report.lines().count(), 1 + 8 * 32); // header + clusters x elements

    let result = run(&[
        "sns-field",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let raster = fs::read_to_string(out.join("sns_field.csv")).unwrap();
    assert_eq!(raster.lines().count(), 4);
    assert_eq!(raster.lines().next().unwrap().split(',').count(), 8);

    let result = run(&[
        "blockage-demo",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let demo = fs::read_to_string(out.join("blockage_demo.csv")).unwrap();
    assert!(demo.starts_with("element,x_m,y_m,loss_db"));
    assert_eq!(demo.lines().count(), 1 + 32);
}

#[test]
fn invalid_inputs_fail_nonzero() {
    let dir = workdir("failures");
    let config = setup(&dir);
    // Unknown feature token.
    let result = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--features",
        "warp-drive",
        "--out",
        dir.join("o").to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    // Both BS-side SNS models at once.
    let result = run(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--features",
        "sns-stoch,sns-block",
        "--out",
        dir.join("o").to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("mutually exclusive"));
    // Missing config file.
    let result = run(&["simulate", "--config", "/nonexistent.toml"]);
    assert!(!result.status.success());
}

#[test]
fn bundled_configs_stay_valid() {
    // The repo ships umi.toml / inh.toml; they must parse, build, and run.
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["umi.toml", "inh.toml"] {
        let dir = workdir(&format!("bundled_{name}"));
        let result = run(&[
            "simulate",
            "--config",
            root.join(name).to_str().unwrap(),
            "--ues",
            "2",
            "--out",
            dir.join("out").to_str().unwrap(),
        ]);
        assert!(
            result.status.success(),
            "bundled config {name} failed: {}",
            String::from_utf8_lossy(&result.stderr)
        );
    }
}
