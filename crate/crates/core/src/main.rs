use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;

use pointer_core::grid::{Grid, Wavefunction};
use pointer_core::pointer::PointerPair;
use pointer_core::reproduction;
use pointer_core::sweep::run::{analyze_pair, Point};
use pointer_core::sweep::{
    emit, parse_config, ConfigError, Envelope, Family, OutputFormat, Param, RunOptions, RunRecord, SweepSpec,
};
use pointer_core::Error;

const EXIT_SYNTAX: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_ALL_FAILED: u8 = 4;
/// Non-zero exit for `paper-check` when a check fails.
const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Parser)]
#[command(name = "pointer", version, about = "Idealness of pointer states in qubit measurements")]
struct Cli {
    /// Sweep configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides `output.format` from the config.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for Monte-Carlo sampling; overrides `seed` from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Add columns with the uncorrected literal closed forms.
    #[arg(long, global = true)]
    paper_literal: bool,
    /// Fail points whose window guard is exceeded instead of flagging them.
    #[arg(long, global = true)]
    strict_window: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvelopeArg {
    Gaussian,
    Triangular,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian pointer with the standard coupling.
    Gaussian {
        #[arg(long, default_value_t = 1.0)]
        sigma0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        g: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Monte-Carlo channel samples (0 disables).
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
    /// Squeezed pointer with correlation parameter C.
    Squeezed {
        #[arg(long, default_value_t = 1.0)]
        sigma0: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        g: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long = "c", short = 'C', default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
    /// Faithful pointer built from an envelope of width sigma0.
    Faithful {
        #[arg(long, default_value_t = 1.0)]
        sigma0: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Exponential tilt u'.
        #[arg(long, default_value_t = 0.0)]
        tilt: f64,
        #[arg(long, value_enum, default_value = "gaussian")]
        envelope: EnvelopeArg,
    },
    /// Certify a sampled pair read from CSV (columns x,plus_re,plus_im,minus_re,minus_im).
    Certify {
        input: PathBuf,
        /// Support threshold relative to the peak of |ψ₊||ψ₋|.
        #[arg(long, default_value_t = pointer_core::ideality::DEFAULT_MASS_FLOOR)]
        mass_floor: f64,
    },
    /// Run the sweep described by --config.
    Sweep,
    /// Run the reference regression checks.
    PaperCheck,
}

enum Failure {
    Syntax(String),
    Validation(String),
    Io(String),
    AllFailed,
    ChecksFailed,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Syntax(_) | Self::Io(_) => EXIT_SYNTAX,
            Self::Validation(_) => EXIT_VALIDATION,
            Self::AllFailed => EXIT_ALL_FAILED,
            Self::ChecksFailed => EXIT_CHECK_FAILED,
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Syntax(_) => Self::Syntax(e.to_string()),
            ConfigError::Validation { .. } => Self::Validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Syntax(m) | Failure::Validation(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::AllFailed => eprintln!("error: every sweep point failed"),
                Failure::ChecksFailed => eprintln!("error: some checks failed"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Gaussian { sigma0, g, t, samples } => {
            let mut spec = base_spec(cli, Family::Gaussian)?;
            set_all(&mut spec, &[(Param::Sigma0, *sigma0), (Param::G, *g), (Param::T, *t)])?;
            spec.samples = *samples;
            sweep(cli, spec)
        }
        Command::Squeezed { sigma0, g, t, c, samples } => {
            let mut spec = base_spec(cli, Family::Squeezed)?;
            set_all(&mut spec, &[(Param::Sigma0, *sigma0), (Param::G, *g), (Param::T, *t), (Param::C, *c)])?;
            spec.samples = *samples;
            sweep(cli, spec)
        }
        Command::Faithful { sigma0, theta, s, tilt, envelope } => {
            let mut spec = base_spec(cli, Family::Faithful)?;
            set_all(
                &mut spec,
                &[(Param::Sigma0, *sigma0), (Param::Theta, *theta), (Param::S, *s), (Param::Tilt, *tilt)],
            )?;
            spec.envelope = match envelope {
                EnvelopeArg::Gaussian => Envelope::Gaussian,
                EnvelopeArg::Triangular => Envelope::Triangular,
            };
            sweep(cli, spec)
        }
        Command::Sweep => {
            let path = cli
                .config
                .as_ref()
                .ok_or_else(|| Failure::Syntax("`sweep` needs --config <path>".into()))?;
            let mut spec = load_config(path)?;
            apply_overrides(cli, &mut spec);
            sweep(cli, spec)
        }
        Command::Certify { input, mass_floor } => certify(cli, input, *mass_floor),
        Command::PaperCheck => {
            let mut all = true;
            let mut text = String::new();
            for result in reproduction::run_all() {
                all &= result.passed;
                text.push_str(&format!("{result}\n"));
            }
            text.push_str(if all { "all checks passed\n" } else { "some checks failed\n" });
            write_output(cli, &text)?;
            if all {
                Ok(())
            } else {
                Err(Failure::ChecksFailed)
            }
        }
    }
}

fn load_config(path: &Path) -> Result<SweepSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

/// Spec for the single-point commands: the config file when given (its
/// family must match), otherwise defaults.
fn base_spec(cli: &Cli, family: Family) -> Result<SweepSpec, Failure> {
    let mut spec = match &cli.config {
        Some(path) => {
            let spec = load_config(path)?;
            if spec.family != family {
                return Err(Failure::Validation(format!(
                    "invalid value for `family`: config has `{}`, command is `{family}`",
                    spec.family
                )));
            }
            spec
        }
        None => SweepSpec::new(family),
    };
    apply_overrides(cli, &mut spec);
    Ok(spec)
}

fn apply_overrides(cli: &Cli, spec: &mut SweepSpec) {
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    match cli.format {
        Some(FormatArg::Csv) => spec.format = OutputFormat::Csv,
        Some(FormatArg::Json) => spec.format = OutputFormat::Json,
        None => {}
    }
}

fn set_all(spec: &mut SweepSpec, values: &[(Param, f64)]) -> Result<(), Failure> {
    for &(p, v) in values {
        spec.set(p, v)?;
    }
    Ok(())
}

fn options(cli: &Cli) -> RunOptions {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    RunOptions {
        workers: workers.max(1),
        strict_window: cli.strict_window,
    }
}

fn sweep(cli: &Cli, spec: SweepSpec) -> Result<(), Failure> {
    spec.validate()?;
    let records = pointer_core::sweep::run_sweep(&spec, options(cli)).map_err(|e| Failure::Io(e.to_string()))?;
    write_output(cli, &emit(&records, Some(&spec), spec.format, cli.paper_literal))?;
    if !records.is_empty() && records.iter().all(RunRecord::failed) {
        for r in &records {
            if let Some(e) = &r.error {
                eprintln!("point {}: {e}", r.point.index);
            }
        }
        return Err(Failure::AllFailed);
    }
    Ok(())
}

fn write_output(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

#[derive(Deserialize)]
struct SampleRow {
    x: f64,
    plus_re: f64,
    plus_im: f64,
    minus_re: f64,
    minus_im: f64,
}

/// Relative tolerance on node positions when checking grid uniformity.
const UNIFORM_TOL: f64 = 1e-9;

fn read_pair(path: &Path) -> Result<PointerPair, Failure> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let rows: Vec<SampleRow> = reader
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Syntax(format!("{}: {e}", path.display())))?;
    let n = rows.len();
    if n < 3 || n % 2 == 0 {
        return Err(Failure::Validation(format!("input needs an odd number (>= 3) of samples, got {n}")));
    }
    let grid = Grid::new(rows[0].x, rows[n - 1].x, n).map_err(|e| Failure::Validation(e.to_string()))?;
    let h = grid.step();
    if let Some(i) = (0..n).find(|&i| (rows[i].x - grid.node(i)).abs() > UNIFORM_TOL * h.max(grid.node(i).abs())) {
        return Err(Failure::Validation(format!("sample {i} at x = {} breaks the uniform grid", rows[i].x)));
    }
    let amps = |f: fn(&SampleRow) -> Complex64| -> Result<Wavefunction, Failure> {
        let values = rows.iter().map(f).collect();
        Wavefunction::new(grid, values).map_err(|e| Failure::Validation(e.to_string()))
    };
    let plus = amps(|r| Complex64::new(r.plus_re, r.plus_im))?;
    let minus = amps(|r| Complex64::new(r.minus_re, r.minus_im))?;
    let normalize = |w: Wavefunction| w.normalize().map_err(|e: Error| Failure::Validation(e.to_string()));
    Ok(PointerPair {
        plus: normalize(plus)?,
        minus: normalize(minus)?,
    })
}

fn certify(cli: &Cli, input: &Path, mass_floor: f64) -> Result<(), Failure> {
    if !(mass_floor > 0.0 && mass_floor < 1.0) {
        return Err(Failure::Validation("invalid value for `mass_floor`: must lie in (0, 1)".into()));
    }
    let pair = read_pair(input)?;
    let mut rec = RunRecord::new(Point::new(0, Family::External, Vec::new()));
    rec.grid = Some(*pair.grid());
    if pair.check_window().is_err() {
        rec.flags.push("window_guard".into());
    }
    let spec = SweepSpec::new(Family::Gaussian);
    let seed = cli.seed.unwrap_or(0);
    if let Err(e) = analyze_pair(&pair, mass_floor, &spec.qubit, 0, seed, &mut rec) {
        return Err(Failure::Validation(e.to_string()));
    }
    let format = match cli.format {
        Some(FormatArg::Json) => OutputFormat::Json,
        _ => OutputFormat::Csv,
    };
    write_output(cli, &emit(&[rec], None, format, cli.paper_literal))
}
