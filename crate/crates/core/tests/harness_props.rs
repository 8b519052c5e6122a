use std::io::Write;

use proptest::prelude::*;
use qrps_core::harness::{
    fit_linear, fit_power_law, parse_numeric_csv, ratio_csv, ratio_experiment, scaling_csv, scaling_experiment, Config,
    ReportMode,
};
use qrps_core::noise::NoiseModel;
use qrps_core::Error;
use qrps_oracles::grover_oracle;

fn small(seed: u64) -> Config {
    let mut config = Config::default();
    config.experiment.seed = seed;
    config.experiment.shots = 400;
    config.experiment.epsilons = vec![0.2742, 0.0504, 0.0204];
    config.experiment.classical_runs = 200;
    config.noise = NoiseModel { detuning: -0.015, detect_bright_as_dark: 0.02, ..NoiseModel::ideal() };
    config
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampled_rows_are_self_consistent(seed in any::<u64>()) {
        let out = scaling_experiment(&small(seed)).unwrap();
        for row in &out.rows {
            prop_assert_eq!(row.counts.iter().sum::<u64>(), row.shots);
            prop_assert!((row.eps_tilde - row.b00 - row.b01).abs() < 1e-15);
            prop_assert!((row.cost - (2 * row.k + 1) as f64 / row.eps_tilde).abs() < 1e-9 * row.cost);
            prop_assert!((row.a00 + row.a01 - row.epsilon).abs() < 1e-15);
        }
    }
}

#[test]
fn csv_output_depends_only_on_seed() {
    let a = scaling_csv(&scaling_experiment(&small(3)).unwrap().rows);
    let b = scaling_csv(&scaling_experiment(&small(3)).unwrap().rows);
    let c = scaling_csv(&scaling_experiment(&small(4)).unwrap().rows);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let r1 = ratio_csv(&ratio_experiment(&small(3)).unwrap().rows);
    assert_eq!(r1, ratio_csv(&ratio_experiment(&small(3)).unwrap().rows));
}

#[test]
fn ideal_scaling_matches_closed_form() {
    let mut config = Config::default();
    config.experiment.classical_runs = 100;
    let out = scaling_experiment(&config).unwrap();
    for row in &out.rows {
        assert!((row.eps_tilde - grover_oracle(row.epsilon, row.k)).abs() < 1e-9, "ε = {}", row.epsilon);
    }
    let (header, rows) = parse_numeric_csv(&scaling_csv(&out.rows)).unwrap();
    assert_eq!(rows.len(), out.rows.len());
    assert!(header.iter().any(|h| h == "cost"));
}

#[test]
fn ideal_ratio_rows_preserve_input() {
    let out = ratio_experiment(&Config::default()).unwrap();
    for row in &out.rows {
        assert!((row.ratio_out() - row.ratio_in()).abs() < 1e-9 * row.ratio_in().max(1.0));
    }
    for (k, fit) in &out.fits {
        assert!((fit.slope - 1.0).abs() < 1e-6, "k = {k}");
    }
}

#[test]
fn config_file_round_trip() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        file,
        "[experiment]\nseed = 9\nshots = 100\nepsilons = [0.1, 0.05]\nreport = \"sampled\"\n\n[noise]\ndetuning = -0.04\n"
    )
    .unwrap();
    let config = Config::load(file.path()).unwrap();
    assert_eq!(config.experiment.seed, 9);
    assert_eq!(config.experiment.report, ReportMode::Sampled);
    assert_eq!(config.noise.detuning, -0.04);
    assert_eq!(config.experiment.classical_runs, Config::default().experiment.classical_runs);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "[noise]\ndetunning = 0.1\n").unwrap();
    assert!(matches!(Config::load(bad.path()), Err(Error::Config(_))));
}

#[test]
fn fits_recover_known_laws() {
    let points: Vec<(f64, f64)> = [0.3, 0.1, 0.03, 0.01].iter().map(|&e: &f64| (e, 2.0 * e.powf(-0.5))).collect();
    let fit = fit_power_law(&points).unwrap();
    assert!((fit.xi - 0.5).abs() < 1e-12);
    let line: Vec<(f64, f64, f64)> = (1..6).map(|i| (i as f64, 3.0 * i as f64 + 0.5, 0.1)).collect();
    let fit = fit_linear(&line).unwrap();
    assert!((fit.slope - 3.0).abs() < 1e-12 && (fit.intercept - 0.5).abs() < 1e-12);
    assert!(fit_power_law(&[(0.1, 1.0)]).is_err());
}
