use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use replical::diagnostics::{bad_fraction, classify_thresholds, profile_run, IntervalProfile, ThresholdFlag};
use replical::harness::{
    label_complexity_sweep, run_paired_trials, ClassSpec, Experiment, ExperimentConfig, Exportable, Format,
    ReplicabilityReport, OUT_DIR_ENV,
};
use replical::hypothesis::{disagreement_coefficient, noise_rate};
use replical::shared_randomness::Seed;
use replical::{Algorithm, Error, Result, RunResult};

#[derive(Parser)]
#[command(name = "replical", version, about = "Replicable active learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the disagreement coefficient, noise rate and best hypothesis.
    Theta(Common),
    /// Run one learner and print its result.
    Run(Common),
    /// Run paired trials sharing a random string and report agreement.
    Pair(Common),
    /// Mean label cost per accuracy and algorithm.
    Sweep(SweepArgs),
    /// Interval profile and bad-threshold flags of one replicable run.
    Gridcheck(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Algorithm name; the sweep accepts a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    algo: Vec<Algorithm>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Constant label-noise rate on the target.
    #[arg(long)]
    nu: Option<f64>,
    /// Class generator: thresholds, intervals or worst_case.
    #[arg(long)]
    class: Option<String>,
    #[arg(long)]
    domain_size: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, value_name = "HEX")]
    b_seed: Option<Seed>,
    #[arg(long, value_name = "HEX")]
    data_seed: Option<Seed>,
    /// Output file; relative paths resolve against $REPLICAL_OUT_DIR when set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// text, json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Constant override, KEY=VAL; repeatable.
    #[arg(long = "constants", value_name = "KEY=VAL")]
    constants: Vec<String>,
    #[arg(long)]
    stream_accounting: bool,
    /// Run trials in parallel.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated accuracies.
    #[arg(long, value_delimiter = ',', required = true)]
    eps_list: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
enum OutFormat {
    Text,
    Data(Format),
}

fn parse_format(s: Option<&str>, default: OutFormat) -> Result<OutFormat> {
    match s {
        None => Ok(default),
        Some(t) if t.eq_ignore_ascii_case("text") => Ok(OutFormat::Text),
        Some(t) => t.parse().map(OutFormat::Data),
    }
}

/// Config file first, then flag overrides.
fn build_config(c: &Common, allow_many_algos: bool) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if !allow_many_algos && c.algo.len() > 1 {
        return Err(Error::Input("only one --algo is allowed here".into()));
    }
    if let Some(&a) = c.algo.first() {
        cfg.algorithm = a;
    }
    match (&c.class, c.domain_size) {
        (Some(name), size) => {
            let size = size.or_else(|| current_domain_size(&cfg.class)).unwrap_or(128);
            cfg.class = ClassSpec::generator(name, size)?;
        }
        (None, Some(size)) => {
            cfg.class = match cfg.class {
                ClassSpec::Thresholds { .. } => ClassSpec::Thresholds { domain_size: size },
                ClassSpec::Intervals { .. } => ClassSpec::Intervals { domain_size: size },
                ClassSpec::WorstCase { .. } => ClassSpec::WorstCase { domain_size: size },
                ClassSpec::Explicit { .. } => {
                    return Err(Error::Input("--domain-size cannot resize an explicit class".into()))
                }
            }
        }
        (None, None) => {}
    }
    if let Some(v) = c.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = c.delta {
        cfg.delta = v;
    }
    if let Some(v) = c.rho {
        cfg.rho = Some(v);
    }
    if let Some(v) = c.nu {
        cfg.nu = Some(v);
    }
    if let Some(v) = c.trials {
        cfg.trials = v;
    }
    if let Some(v) = c.b_seed {
        cfg.b_seed = v;
    }
    if let Some(v) = c.data_seed {
        cfg.data_seed = v;
    }
    for a in &c.constants {
        cfg.constants.apply_assignment(a)?;
    }
    cfg.stream_accounting |= c.stream_accounting;
    cfg.parallel |= c.parallel;
    cfg.validate()?;
    Ok(cfg)
}

fn current_domain_size(class: &ClassSpec) -> Option<usize> {
    match class {
        ClassSpec::Thresholds { domain_size }
        | ClassSpec::Intervals { domain_size }
        | ClassSpec::WorstCase { domain_size } => Some(*domain_size),
        ClassSpec::Explicit { .. } => None,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let path = match std::env::var_os(OUT_DIR_ENV) {
                Some(dir) if path.is_relative() => Path::new(&dir).join(path),
                _ => path.to_path_buf(),
            };
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, text)?;
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(e.to_string()))
}

#[derive(Serialize)]
struct ThetaReport {
    theta: f64,
    nu: f64,
    h_star: usize,
    h_star_name: String,
    class_size: usize,
    domain_size: usize,
}

fn cmd_theta(c: &Common) -> Result<String> {
    let cfg = build_config(c, false)?;
    let (class, model) = cfg.build()?;
    let (nu, best) = noise_rate(&class, &model)?;
    let report = ThetaReport {
        theta: disagreement_coefficient(&class, &model, best)?,
        nu,
        h_star: best,
        h_star_name: class.name(best),
        class_size: class.len(),
        domain_size: class.domain_size(),
    };
    match parse_format(c.format.as_deref(), OutFormat::Text)? {
        OutFormat::Text => Ok(format!(
            "theta={}\nnu={}\nh_star={} ({})\n",
            report.theta, report.nu, report.h_star, report.h_star_name
        )),
        OutFormat::Data(Format::Json) => json(&report),
        OutFormat::Data(Format::Csv) => Ok(format!(
            "theta,nu,h_star\n{},{},{}\n",
            report.theta, report.nu, report.h_star
        )),
    }
}

fn cmd_run(c: &Common) -> Result<String> {
    let cfg = build_config(c, false)?;
    let exp = Experiment::new(cfg.clone())?;
    let result = exp.run_single(cfg.b_seed, cfg.data_seed)?;
    match parse_format(c.format.as_deref(), OutFormat::Data(Format::Json))? {
        OutFormat::Data(Format::Json) => json(&result),
        OutFormat::Text => Ok(run_summary(&result)),
        OutFormat::Data(Format::Csv) => Err(Error::Input("run output is JSON or text".into())),
    }
}

fn run_summary(r: &RunResult) -> String {
    format!(
        "algorithm={}\nhypothesis={}\nsignature={}\nlabels_used={}\nunlabeled_used={}\nrounds={}\ntheta={}\n",
        r.algorithm, r.hypothesis, r.signature, r.labels_used, r.unlabeled_used, r.rounds, r.theta
    )
}

fn pair_summary(r: &ReplicabilityReport) -> String {
    let mut s = format!(
        "algorithm={}\npairs={}\nagreements={}\nagreement_rate={}\nagreement_95={:.4}..{:.4}\n",
        r.algorithm, r.pairs, r.agreements, r.agreement_rate, r.agreement_low, r.agreement_high
    );
    for (i, side) in r.sides.iter().enumerate() {
        s += &format!(
            "side{}: completed={} mean_error={:.6} max_error={:.6} within_target={}\n",
            i + 1,
            side.completed,
            side.mean_error,
            side.max_error,
            side.within_target
        );
    }
    s += &format!(
        "labels_mean={} labels_max={}\nunlabeled_mean={} unlabeled_max={}\nhalving={}/{}\n",
        r.labels_mean, r.labels_max, r.unlabeled_mean, r.unlabeled_max, r.halving.halved, r.halving.transitions
    );
    for (k, v) in &r.failures {
        s += &format!("failures.{k}={v}\n");
    }
    s
}

fn cmd_pair(c: &Common) -> Result<String> {
    let cfg = build_config(c, false)?;
    let report = run_paired_trials(&cfg)?;
    match parse_format(c.format.as_deref(), OutFormat::Text)? {
        OutFormat::Text => Ok(pair_summary(&report)),
        OutFormat::Data(f) => report.render(f),
    }
}

fn cmd_sweep(a: &SweepArgs) -> Result<String> {
    let cfg = build_config(&a.common, true)?;
    let algos = if a.common.algo.is_empty() {
        vec![cfg.algorithm]
    } else {
        a.common.algo.clone()
    };
    let table = label_complexity_sweep(&cfg, &a.eps_list, &algos)?;
    match parse_format(a.common.format.as_deref(), OutFormat::Data(Format::Csv))? {
        OutFormat::Text | OutFormat::Data(Format::Csv) => table.to_csv(),
        OutFormat::Data(Format::Json) => table.render(Format::Json),
    }
}

#[derive(Serialize)]
struct GridReport {
    profile: IntervalProfile,
    flags: Vec<ThresholdFlag>,
    bad_fraction: f64,
}

fn cmd_gridcheck(c: &Common) -> Result<String> {
    let mut cfg = build_config(c, false)?;
    if !c.algo.is_empty() && !matches!(cfg.algorithm, Algorithm::Replical | Algorithm::Replica2) {
        return Err(Error::WrongSetting("gridcheck needs replical or replica2".into()));
    }
    if !matches!(cfg.algorithm, Algorithm::Replical | Algorithm::Replica2) {
        cfg.algorithm = if cfg.nu.is_some() { Algorithm::Replica2 } else { Algorithm::Replical };
    }
    let rho = cfg
        .rho
        .ok_or_else(|| Error::Parameter("gridcheck needs --rho".into()))?;
    let exp = Experiment::new(cfg.clone())?;
    let result = exp.run_single(cfg.b_seed, cfg.data_seed)?;
    let profile = profile_run(&exp.class, &exp.model, &result)?;
    let flags = classify_thresholds(&profile, rho);
    let report = GridReport {
        bad_fraction: bad_fraction(&profile, rho),
        flags,
        profile,
    };
    match parse_format(c.format.as_deref(), OutFormat::Text)? {
        OutFormat::Data(Format::Json) => json(&report),
        OutFormat::Data(Format::Csv) => Err(Error::Input("gridcheck output is text or JSON".into())),
        OutFormat::Text => {
            let g = report.profile.grid;
            let mut s = format!(
                "algorithm={} v_init={:.6} spacing={:.6} thresholds={} selected={} below={} above={} bad_fraction={:.4}\n",
                result.algorithm, g.v_init, g.spacing, g.count, g.selected_index, report.profile.below,
                report.profile.above, report.bad_fraction
            );
            s += "interval\tlow\thigh\tcount\tcumulative\tcrowded\tsteep\n";
            for (i, &count) in report.profile.counts.iter().enumerate() {
                let low = g.v_init + i as f64 * g.spacing;
                let (crowded, steep) = match i {
                    0 => ("-".to_string(), "-".to_string()),
                    _ => {
                        let f = report.flags[i - 1];
                        (f.crowded.to_string(), f.steep.to_string())
                    }
                };
                s += &format!(
                    "{i}\t{low:.6}\t{:.6}\t{count}\t{}\t{crowded}\t{steep}\n",
                    low + g.spacing,
                    report.profile.cumulative[i]
                );
            }
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (result, out) = match &cli.command {
        Command::Theta(c) => (cmd_theta(c), c.out.as_deref()),
        Command::Run(c) => (cmd_run(c), c.out.as_deref()),
        Command::Pair(c) => (cmd_pair(c), c.out.as_deref()),
        Command::Sweep(a) => (cmd_sweep(a), a.common.out.as_deref()),
        Command::Gridcheck(c) => (cmd_gridcheck(c), c.out.as_deref()),
    };
    match result.and_then(|text| emit(&text, out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("replical: {e}");
            ExitCode::from(if e.is_parameter_like() { 3 } else { 4 })
        }
    }
}
