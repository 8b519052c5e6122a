use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qrps_core::deliberation::{learning_demo, Backend, LearningConfig, LearningTrace};
use qrps_core::harness::{
    column, dd_check, detuning_csv, fit_linear, fit_power_law, fit_power_law_weighted, fmt_g, learning_comparison,
    numeric_csv, parse_numeric_csv, plot_stub, ratio_csv, ratio_experiment, scaling_csv, scaling_experiment, Config,
    PowerLawFit,
};
use qrps_core::noise::{Fidelity, NoiseModel};
use qrps_core::qsim::stream_rng;
use qrps_core::Error;

#[derive(Parser, Debug)]
#[command(name = "qrps", version, about = "Rank-one quantum deliberation experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Campaign seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Shots per configuration
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Output CSV path (stdout when omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML config with [experiment], [noise] and [pulses] sections
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    fidelity: Option<FidelityArg>,
    /// Detuning ratio Δω/Ω
    #[arg(long, global = true, allow_hyphen_values = true, conflicts_with = "ideal")]
    detuning: Option<f64>,
    /// Dephasing exponent γτ per diffusion step
    #[arg(long, global = true, conflicts_with = "ideal")]
    dephasing: Option<f64>,
    /// Detection errors: bright read as dark, dark read as bright
    #[arg(long, global = true, num_args = 2, value_names = ["D_B", "D_D"], conflicts_with = "ideal")]
    detect: Option<Vec<f64>>,
    /// Switch every noise channel off
    #[arg(long, global = true)]
    ideal: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FidelityArg {
    Gate,
    Pulse,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FitKind {
    Power,
    Linear,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cost against ε with the optimal number of diffusion steps
    Scaling {
        /// Weight the power-law fit by the cost errors
        #[arg(long)]
        weighted: bool,
    },
    /// Output against input ratio of the two flagged actions
    Ratio,
    /// Pulse-level detuning sweep and decoupling window fidelities
    DdCheck,
    /// Flag-removal learning demo, quantum against classical
    LearnDemo {
        #[arg(long, default_value_t = 100)]
        actions: usize,
        /// Rewarded actions (comma separated)
        #[arg(long, value_delimiter = ',', default_value = "0")]
        rewarded: Vec<usize>,
        /// Clips per action in the stationary distribution
        #[arg(long, default_value_t = 4)]
        clip_factor: usize,
        #[arg(long, default_value_t = 1000)]
        runs: u64,
    },
    /// Fit a CSV written by `scaling` (power law) or `ratio` (lines per k)
    Fit {
        csv: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<FitKind>,
        #[arg(long)]
        weighted: bool,
    },
}

fn build_config(g: &Global) -> Result<Config, Error> {
    let mut config = match &g.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = g.seed {
        config.experiment.seed = seed;
    }
    if let Some(shots) = g.shots {
        config.experiment.shots = shots;
    }
    if let Some(f) = g.fidelity {
        config.pulses.fidelity = match f {
            FidelityArg::Gate => Fidelity::Gate,
            FidelityArg::Pulse => Fidelity::Pulse,
        };
    }
    if let Some(d) = g.detuning {
        config.noise.detuning = d;
    }
    if let Some(d) = g.dephasing {
        config.noise.dephasing = d;
    }
    if let Some(d) = &g.detect {
        config.noise.detect_bright_as_dark = d[0];
        config.noise.detect_dark_as_bright = d[1];
    }
    if g.ideal {
        config.noise = NoiseModel::ideal();
    }
    config.validate()?;
    Ok(config)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Writes `csv` to `--out` (plus a plot stub) or to stdout.
fn emit(out: Option<&Path>, csv: &str, ratio: bool) -> Result<(), Error> {
    match out {
        Some(path) => {
            std::fs::write(path, csv)?;
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out.csv");
            std::fs::write(sibling(path, "_plot.py"), plot_stub(name, ratio))?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// Summary text goes to stderr when the CSV occupies stdout.
fn report(out: Option<&Path>, text: &str) {
    if out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
}

fn describe_power(label: &str, fit: Option<PowerLawFit>) -> String {
    match fit {
        Some(f) => format!("{label}: xi = {:.4} +/- {:.4} ({} points)\n", f.xi, f.xi_err, f.points),
        None => format!("{label}: fewer than 3 points, no fit\n"),
    }
}

fn trace_lines(trace: &LearningTrace, out: &mut String) {
    for (i, s) in trace.steps.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            trace.backend,
            i + 1,
            s.flagged,
            fmt_g(s.epsilon),
            s.action,
            s.up_calls,
            s.cumulative_up_calls,
            u8::from(s.rewarded)
        )
        .unwrap();
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let out = cli.global.out.as_deref();
    match cli.command {
        Command::Scaling { weighted } => {
            let mut config = build_config(&cli.global)?;
            config.experiment.weighted_fit |= weighted;
            let result = scaling_experiment(&config)?;
            emit(out, &scaling_csv(&result.rows), false)?;
            let classical: Vec<Vec<f64>> = result.classical.iter().map(|&(e, c)| vec![e, c]).collect();
            if let Some(path) = out {
                std::fs::write(sibling(path, "_classical.csv"), numeric_csv(&["epsilon", "cost"], &classical))?;
            }
            let mut text = describe_power("quantum", result.fit);
            text += &describe_power("classical", result.classical_fit);
            report(out, &text);
        }
        Command::Ratio => {
            let config = build_config(&cli.global)?;
            let result = ratio_experiment(&config)?;
            emit(out, &ratio_csv(&result.rows), true)?;
            let mut text = String::new();
            for (k, f) in &result.fits {
                writeln!(
                    text,
                    "k = {k}: slope = {:.4} +/- {:.4}, intercept = {:.4} +/- {:.4}",
                    f.slope, f.slope_err, f.intercept, f.intercept_err
                )
                .unwrap();
            }
            report(out, &text);
        }
        Command::DdCheck => {
            let config = build_config(&cli.global)?;
            let result = dd_check(&config)?;
            emit(out, &detuning_csv(&result.curves), false)?;
            let window: Vec<Vec<f64>> =
                result.window.iter().map(|w| vec![w.detuning, w.ur14, w.constant_phase, w.unprotected]).collect();
            let window_csv = numeric_csv(&["detuning", "ur14", "constant_phase", "unprotected"], &window);
            match out {
                Some(path) => std::fs::write(sibling(path, "_window.csv"), &window_csv)?,
                None => eprint!("{window_csv}"),
            }
            let mut text = String::new();
            for (d, rows) in &result.curves {
                let costs: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.cost)).collect();
                writeln!(text, "detuning {d}: cost {}", costs.join(" ")).unwrap();
            }
            report(out, &text);
        }
        Command::LearnDemo { actions, rewarded, clip_factor, runs } => {
            let config = build_config(&cli.global)?;
            let seed = config.experiment.seed;
            let demo = LearningConfig::new(actions, rewarded, Backend::Quantum).with_clip_factor(clip_factor);
            let summary = learning_comparison(&demo, runs, seed)?;
            let mut csv = String::from("backend,step,flagged,epsilon,action,up_calls,cumulative_up_calls,rewarded\n");
            for backend in [Backend::Quantum, Backend::Classical] {
                let cfg = LearningConfig { backend, ..demo.clone() };
                trace_lines(&learning_demo(&cfg, &mut stream_rng(seed, u64::MAX))?, &mut csv);
            }
            emit_plain(out, &csv)?;
            let mut text = String::new();
            for (name, s) in [("quantum", summary.quantum), ("classical", summary.classical)] {
                writeln!(
                    text,
                    "{name}: mean U_P calls {:.2} +/- {:.2}, mean interactions {:.2} ({} runs)",
                    s.mean_calls, s.sem_calls, s.mean_interactions, summary.runs
                )
                .unwrap();
            }
            report(out, &text);
        }
        Command::Fit { csv, kind, weighted } => {
            let text = std::fs::read_to_string(&csv)?;
            let (header, rows) = parse_numeric_csv(&text)?;
            let has = |name: &str| header.iter().any(|h| h == name);
            let kind = kind.unwrap_or(if has("r_out") { FitKind::Linear } else { FitKind::Power });
            match kind {
                FitKind::Power => {
                    let eps = column(&header, &rows, "epsilon")?;
                    let cost = column(&header, &rows, "cost")?;
                    let fit = if weighted {
                        let err = column(&header, &rows, "err_cost")?;
                        fit_power_law_weighted(
                            &eps.iter().zip(&cost).zip(&err).map(|((&e, &c), &s)| (e, c, s)).collect::<Vec<_>>(),
                        )?
                    } else {
                        fit_power_law(&eps.iter().copied().zip(cost.iter().copied()).collect::<Vec<_>>())?
                    };
                    print!("{}", describe_power("power law", Some(fit)));
                }
                FitKind::Linear => {
                    let ks = column(&header, &rows, "k")?;
                    let x = column(&header, &rows, "r_in")?;
                    let y = column(&header, &rows, "r_out")?;
                    let s = column(&header, &rows, "err_r_out")?;
                    let mut seen: Vec<f64> = Vec::new();
                    for &k in &ks {
                        if !seen.contains(&k) {
                            seen.push(k);
                        }
                    }
                    for k in seen {
                        let pts: Vec<(f64, f64, f64)> =
                            (0..ks.len()).filter(|&i| ks[i] == k).map(|i| (x[i], y[i], s[i])).collect();
                        let f = fit_linear(&pts)?;
                        println!(
                            "k = {k}: slope = {:.4} +/- {:.4}, intercept = {:.4} +/- {:.4}",
                            f.slope, f.slope_err, f.intercept, f.intercept_err
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

fn emit_plain(out: Option<&Path>, csv: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
