use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use super::config::{ExperimentConfig, OutputFormat, SweepAxis, SweepSpec, DEFAULT_MAX_RUNS};
use super::report::{emit_sweep_plotdata, write_jsonl, RunHeader};
use crate::error::{Error, Result};
use crate::hanaoka::HanaokaParams;
use crate::harness::{
    run_attack, AttackKind, AttackSpec, GcParams, P2Params, ProtocolParams, Strategy, TrialReport,
};
use crate::mqds::{MeasurementKind, MqdsParams, ThresholdScale};
use crate::quantum::code::CodeSpec;

/// Process exit statuses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(i32)]
pub enum ExitStatus {
    Success = 0,
    ConfigError = 1,
    BoundViolation = 2,
    RuntimeFailure = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    /// Parameter and configuration problems map to 1, the rest to 3.
    pub fn for_error(e: &Error) -> Self {
        match e {
            Error::NotPrime(_)
            | Error::ModulusOutOfRange(_)
            | Error::InvalidParameter { .. }
            | Error::ThresholdOrder { .. }
            | Error::Unsupported { .. }
            | Error::SweepTooLarge { .. }
            | Error::Config(_) => ExitStatus::ConfigError,
            _ => ExitStatus::RuntimeFailure,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qsig",
    version,
    about = "Simulate unconditionally secure signature schemes and attacks on them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Write reports here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Exit 0 even when an empirical rate exceeds its analytic bound.
    #[arg(long)]
    no_check_bounds: bool,
}

fn kebab<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_code(s: &str) -> std::result::Result<CodeSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug, Clone)]
struct AttackArgs {
    /// none | forge | repudiate | tamper-keys
    #[arg(long, value_parser = kebab::<AttackKind>, default_value = "none")]
    attack: AttackKind,
    #[arg(long)]
    injections: Option<usize>,
    #[arg(long)]
    overlap: Option<f64>,
}

impl AttackArgs {
    fn strategy(&self) -> Strategy {
        Strategy {
            injections: self.injections,
            overlap: self.overlap,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Polynomial unconditionally secure signatures over a prime field.
    Hanaoka {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        omega: usize,
        #[arg(long, default_value_t = 1)]
        psi: u32,
        #[arg(long, default_value_t = 101)]
        q: u64,
        #[command(flatten)]
        attack: AttackArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Classical three-party signatures from pairwise secret keys.
    P2 {
        #[arg(long = "L", default_value_t = 64)]
        l: usize,
        #[arg(long = "sa", default_value_t = 0.0)]
        s_a: f64,
        #[arg(long = "sv", default_value_t = 0.1)]
        s_v: f64,
        #[command(flatten)]
        attack: AttackArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Fingerprint-state one-time signatures with SWAP-test key checks.
    GcQds {
        #[arg(long = "M", default_value_t = 64)]
        m: usize,
        /// Key length; selects `hadamard:L` unless `--code` is given.
        #[arg(long = "L")]
        l: Option<usize>,
        /// default | identity:L | hadamard:L | random:L:m:seed
        #[arg(long, value_parser = parse_code)]
        code: Option<CodeSpec>,
        #[arg(long = "sa", default_value_t = 0.0)]
        s_a: f64,
        #[arg(long = "sv", default_value_t = 0.2)]
        s_v: f64,
        #[arg(long = "T", default_value_t = 1)]
        t: usize,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[command(flatten)]
        attack: AttackArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Coherent-state signatures with a symmetrising multiport.
    Mqds {
        #[arg(long = "L", default_value_t = 1000)]
        l: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long = "sa", default_value_t = 0.0)]
        s_a: f64,
        #[arg(long = "sv", default_value_t = 0.05)]
        s_v: f64,
        /// usd | use
        #[arg(long, value_parser = kebab::<MeasurementKind>, default_value = "usd")]
        measurement: MeasurementKind,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        /// expected-conclusive | signature-length
        #[arg(long, value_parser = kebab::<ThresholdScale>, default_value = "expected-conclusive")]
        scale: ThresholdScale,
        #[command(flatten)]
        attack: AttackArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Run one attack described by a config file or a JSON spec.
    Attack {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Run an attack over a grid of one or two parameters.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Axis as `name=v1,v2,...`; overrides any sweep in the config.
        #[arg(long = "axis", value_parser = parse_axis)]
        axes: Vec<SweepAxis>,
        #[arg(long)]
        max_runs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct Source {
    /// Experiment config, TOML when the extension is `.toml`, JSON otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline JSON attack spec.
    #[arg(long)]
    spec: Option<String>,
}

fn parse_axis(s: &str) -> std::result::Result<SweepAxis, String> {
    let (name, values) = s.split_once('=').ok_or("expected name=v1,v2,...")?;
    let values = values
        .split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(SweepAxis {
        parameter: name.trim().to_string(),
        values,
    })
}

impl Source {
    fn load(&self) -> Result<ExperimentConfig> {
        match (&self.config, &self.spec) {
            (Some(p), _) => ExperimentConfig::from_file(p),
            (None, Some(s)) => serde_json::from_str::<AttackSpec>(s)
                .map(ExperimentConfig::single)
                .map_err(|e| Error::Config(format!("--spec: {e}"))),
            (None, None) => Err(Error::Config(
                "one of --config or --spec is required".into(),
            )),
        }
    }
}

const DEFAULT_TRIALS: u64 = 10_000;

fn flag_spec(params: ProtocolParams, attack: &AttackArgs, common: &Common) -> ExperimentConfig {
    ExperimentConfig::single(AttackSpec {
        params,
        attack: attack.attack,
        strategy: attack.strategy(),
        trials: common.trials.unwrap_or(DEFAULT_TRIALS),
        seed: common.seed.unwrap_or(0),
    })
}

fn build_config(cmd: Command) -> Result<(ExperimentConfig, bool)> {
    let (mut cfg, common) = match cmd {
        Command::Hanaoka {
            n,
            omega,
            psi,
            q,
            attack,
            common,
        } => (
            flag_spec(
                ProtocolParams::Hanaoka(HanaokaParams { n, omega, psi, q }),
                &attack,
                &common,
            ),
            common,
        ),
        Command::P2 {
            l,
            s_a,
            s_v,
            attack,
            common,
        } => (
            flag_spec(
                ProtocolParams::P2(P2Params { l, s_a, s_v }),
                &attack,
                &common,
            ),
            common,
        ),
        Command::GcQds {
            m,
            l,
            code,
            s_a,
            s_v,
            t,
            rounds,
            noise,
            attack,
            common,
        } => {
            let code = match (code, l) {
                (Some(c), None) => c,
                (Some(c), Some(l)) => {
                    let built = c.build()?;
                    if built.input_len() != l {
                        return Err(Error::Config(format!(
                            "--L {l} disagrees with --code {c} (key length {})",
                            built.input_len()
                        )));
                    }
                    c
                }
                (None, Some(l)) => CodeSpec::Hadamard { l },
                (None, None) => CodeSpec::Default,
            };
            let p = GcParams {
                m,
                code,
                s_a,
                s_v,
                rounds,
                noise,
                t,
            };
            (
                flag_spec(ProtocolParams::GcQds(p), &attack, &common),
                common,
            )
        }
        Command::Mqds {
            l,
            alpha,
            s_a,
            s_v,
            measurement,
            noise,
            scale,
            attack,
            common,
        } => {
            let p = MqdsParams {
                l,
                alpha,
                s_a,
                s_v,
                measurement,
                noise,
                scale,
            };
            (flag_spec(ProtocolParams::Mqds(p), &attack, &common), common)
        }
        Command::Attack { source, common } => {
            let mut cfg = source.load()?;
            if cfg.sweep.is_some() {
                return Err(Error::Config(
                    "config contains a sweep; use the sweep subcommand".into(),
                ));
            }
            override_common(&mut cfg, &common);
            (cfg, common)
        }
        Command::Sweep {
            source,
            axes,
            max_runs,
            common,
        } => {
            let mut cfg = source.load()?;
            if !axes.is_empty() {
                cfg.sweep = Some(SweepSpec {
                    axes,
                    max_runs: DEFAULT_MAX_RUNS,
                });
            }
            let sweep = cfg.sweep.as_mut().ok_or_else(|| {
                Error::Config("sweep needs --axis or a sweep section in the config".into())
            })?;
            if let Some(cap) = max_runs {
                sweep.max_runs = cap;
            }
            override_common(&mut cfg, &common);
            (cfg, common)
        }
    };
    if let Some(out) = &common.out {
        cfg.output = Some(out.clone());
    }
    if let Some(f) = common.format {
        cfg.format = f;
    }
    cfg.validate()?;
    Ok((cfg, !common.no_check_bounds))
}

fn override_common(cfg: &mut ExperimentConfig, common: &Common) {
    if let Some(t) = common.trials {
        cfg.spec.trials = t;
    }
    if let Some(s) = common.seed {
        cfg.spec.seed = s;
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub header: RunHeader,
    pub reports: Vec<TrialReport>,
    /// Parameter columns for tabular output.
    pub columns: Vec<String>,
}

impl RunOutput {
    pub fn violates_bound(&self) -> bool {
        self.reports.iter().any(TrialReport::violates_bound)
    }

    pub fn write<W: Write>(&self, w: W, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Json => write_jsonl(w, &self.header, &self.reports),
            OutputFormat::Csv => emit_sweep_plotdata(w, &self.columns, &self.reports),
        }
    }
}

/// Validates and runs `cfg`; sweep points run sequentially in grid order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let (reports, columns) = match &cfg.sweep {
        None => {
            let r = run_attack(&cfg.spec)?;
            // `injections` already has a statistics column.
            let cols = r
                .parameters
                .keys()
                .filter(|k| *k != "injections")
                .cloned()
                .collect();
            (vec![r], cols)
        }
        Some(sweep) => {
            let mut reports = Vec::with_capacity(sweep.runs());
            for point in sweep.points() {
                let mut spec = cfg.spec.clone();
                for (name, v) in &point {
                    spec.set(name, *v)?;
                }
                reports.push(run_attack(&spec)?);
            }
            (
                reports,
                sweep.axes.iter().map(|a| a.parameter.clone()).collect(),
            )
        }
    };
    Ok(RunOutput {
        header: RunHeader::new(cfg),
        reports,
        columns,
    })
}

fn emit(cfg: &ExperimentConfig, out: &RunOutput, stdout: &mut dyn Write) -> Result<()> {
    match &cfg.output {
        Some(path) => {
            let f =
                File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            out.write(BufWriter::new(f), cfg.format)
        }
        None => out.write(stdout, cfg.format),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                ExitStatus::ConfigError.code()
            } else {
                let _ = write!(stdout, "{e}");
                ExitStatus::Success.code()
            };
        }
    };
    let (cfg, check_bounds) = match build_config(cli.command) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return ExitStatus::for_error(&e).code();
        }
    };
    let result = run_experiment(&cfg).and_then(|out| emit(&cfg, &out, stdout).map(|()| out));
    match result {
        Ok(out) if check_bounds && out.violates_bound() => {
            for r in out.reports.iter().filter(|r| r.violates_bound()) {
                let _ = writeln!(
                    stderr,
                    "bound violation: {} {} {:?}: empirical {} > bound {}",
                    r.protocol,
                    r.attack.name(),
                    r.parameters,
                    r.empirical,
                    r.bound.unwrap_or(f64::NAN)
                );
            }
            ExitStatus::BoundViolation.code()
        }
        Ok(_) => ExitStatus::Success.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            ExitStatus::for_error(&e).code()
        }
    }
}
