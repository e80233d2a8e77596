//! Flag parsing and the top-level run loop shared by the binary and tests.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use ncdirac::hamiltonians::QThetaMode;

use crate::config::{read_config_file, resolve, Command, ConfigError, Format, RunConfig};
use crate::record::{to_json, write_csv, ErrorKind, ErrorRecord, ResultRecord, VERSION};
use crate::run::execute;

/// Numerical experiments on the (noncommutative) Dirac and Pauli equations in
/// a planar field.
///
/// Settings resolve as built-in defaults, then `--config`, then flags.
#[derive(Debug, Clone, Parser)]
#[command(name = "ncdirac", version, allow_negative_numbers = true)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,

    /// `key = value` or JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long)]
    pub output: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Rayon worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,

    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub margin: Option<usize>,
    /// Oscillator length used when there is no field.
    #[arg(long)]
    pub osc_length: Option<f64>,

    #[arg(long)]
    pub m0: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub c_list: Option<Vec<f64>>,
    #[arg(long)]
    pub e: Option<f64>,
    #[arg(long)]
    pub hbar: Option<f64>,

    /// Symmetric-gauge magnetic field.
    #[arg(long = "B")]
    pub b: Option<f64>,
    /// Gradient of the scalar potential, `gx,gy`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub a0: Option<Vec<f64>>,
    /// `fixed-cyclotron` or `fixed-field`.
    #[arg(long)]
    pub field_scaling: Option<String>,

    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub theta_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub eta_list: Option<Vec<f64>>,
    /// Maclaurin order of the NC Pauli operator in `nc-sweep`.
    #[arg(long)]
    pub order: Option<u32>,
    /// Orders compared by `series`.
    #[arg(long, value_delimiter = ',')]
    pub orders: Option<Vec<u32>>,
    /// Number of levels to report.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, value_enum)]
    pub qtheta_mode: Option<QThetaModeArg>,

    #[arg(long)]
    pub seed: Option<u64>,
    /// Random vector pairs for the Pauli product identity.
    #[arg(long)]
    pub pairs: Option<usize>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum QThetaModeArg {
    Sigma,
    UpperBlock,
}

impl From<QThetaModeArg> for QThetaMode {
    fn from(m: QThetaModeArg) -> Self {
        match m {
            QThetaModeArg::Sigma => QThetaMode::Sigma,
            QThetaModeArg::UpperBlock => QThetaMode::UpperBlock,
        }
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl Cli {
    /// Flags as `key = value` pairs; `f64` display is shortest-round-trip, so
    /// nothing is lost in the conversion.
    pub fn flag_pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(&str, String)> = Vec::new();
        let mut push = |k, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        push("basis.n_max", self.n_max.map(|v| v.to_string()));
        push("basis.margin", self.margin.map(|v| v.to_string()));
        push("basis.osc_length", self.osc_length.map(|v| v.to_string()));
        push("phys.m0", self.m0.map(|v| v.to_string()));
        push("phys.c", self.c.map(|v| v.to_string()));
        push("phys.c_list", self.c_list.as_deref().map(join));
        push("phys.e", self.e.map(|v| v.to_string()));
        push("phys.hbar", self.hbar.map(|v| v.to_string()));
        push("potential.B", self.b.map(|v| v.to_string()));
        push("potential.a0", self.a0.as_deref().map(join));
        push("potential.field_scaling", self.field_scaling.clone());
        push("nc.theta", self.theta.map(|v| v.to_string()));
        push("nc.theta_list", self.theta_list.as_deref().map(join));
        push("nc.eta_list", self.eta_list.as_deref().map(join));
        push("series.order", self.order.map(|v| v.to_string()));
        push("series.orders", self.orders.as_deref().map(join));
        push("levels", self.levels.map(|v| v.to_string()));
        push("qtheta_mode", self.qtheta_mode.map(|m| QThetaMode::from(m).as_str().to_string()));
        push("output.path", self.output.clone());
        push("output.format", self.format.map(|f| if f == Format::Json { "json" } else { "csv" }.to_string()));
        push("seed", self.seed.map(|v| v.to_string()));
        push("pairs", self.pairs.map(|v| v.to_string()));
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(p) => read_config_file(p)?,
            None => Vec::new(),
        };
        resolve(self.command, &file, &self.flag_pairs())
    }
}

/// Outcome of a resolved run, before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub record: ResultRecord,
    pub exit_code: i32,
}

/// Runs a resolved configuration, optionally on a dedicated thread pool.
pub fn run_config(cfg: &RunConfig, threads: Option<usize>) -> Invocation {
    let start = Instant::now();
    let result = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(cfg)),
            Err(e) => Err(ncdirac::Error::Numerical(format!("cannot start thread pool: {e}"))),
        },
        None => execute(cfg),
    };
    let wall_time = start.elapsed().as_secs_f64();
    let (payload, error) = match result {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(ErrorRecord::from(&e))),
    };
    let exit_code = error.as_ref().map_or(0, |e| e.kind.exit_code());
    let record = ResultRecord {
        command: cfg.command.as_str().to_string(),
        config: cfg.clone(),
        version: VERSION.to_string(),
        wall_time,
        payload,
        error,
    };
    Invocation { record, exit_code }
}

fn emit(record: &ResultRecord, format: Format, path: Option<&str>) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    match (format, &record.payload) {
        (Format::Json, _) => writeln!(sink, "{}", to_json(record))?,
        (Format::Csv, Some(p)) => write_csv(p, &mut sink).map_err(io::Error::other)?,
        // CSV has no place for an error; stderr carries it
        (Format::Csv, None) => {}
    }
    sink.flush()
}

/// Parses, runs and writes; returns the process exit code.
pub fn invoke(cli: &Cli) -> i32 {
    let cfg = match cli.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ErrorKind::Validation.exit_code();
        }
    };
    let inv = run_config(&cfg, cli.threads);
    if let Some(err) = &inv.record.error {
        eprintln!("error: {}", err.message);
    }
    if let Err(e) = emit(&inv.record, cfg.output.format, cfg.output.path.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ErrorKind::Internal.exit_code();
    }
    inv.exit_code
}
