//! `direx` command-line interface.
//!
//! Results go to files or stdout; failures print
//! `{"error":{"code":..,"message":..}}` on stderr and exit nonzero.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use direx::copulas::{
    copula_level_sets, CopulaError, CopulaFamily, CopulaModel, JointModel, Orientation,
};
use direx::detector::{detect, DetectError, DetectionConfig, Label, Mode};
use direx::directions::{first_pca_direction, DirectionError, PcaScaling};
use direx::floodcase::{run_experiment_with, DamSpec, ExperimentConfig, FloodError, ReplicaRun};
use direx::io::{
    format_f64, load_csv, write_csv, write_labeled_csv, DirectionSpec, IoError, RunConfig,
};

#[derive(Parser)]
#[command(name = "direx", version, about = "Directional multivariate extremes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label each row of a CSV as upper, quantile or lower.
    Detect(DetectArgs),
    /// Draw a sample from a joint model (the dam flood model by default).
    Simulate(SimulateArgs),
    /// Run the dam flood experiment.
    Flood(FloodArgs),
    /// Print the first principal direction of a CSV sample.
    Pca(PcaArgs),
    /// Classify a lattice on the unit square by copula level.
    Levelsets(LevelsetArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Survival,
    Distribution,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Survival => Mode::Survival,
            ModeArg::Distribution => Mode::Distribution,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalingArg {
    Covariance,
    Correlation,
}

impl From<ScalingArg> for PcaScaling {
    fn from(s: ScalingArg) -> Self {
        match s {
            ScalingArg::Covariance => PcaScaling::Covariance,
            ScalingArg::Correlation => PcaScaling::Correlation,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// JSON run configuration; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Labeled CSV destination (stdout summary is always printed).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    /// `e`, `pca`, a sign pattern like `+-`, or comma-separated components.
    #[arg(long, allow_hyphen_values = true)]
    direction: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long, value_enum)]
    pca_scaling: Option<ScalingArg>,
    /// Accepted for uniformity; detection is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON joint model; the dam flood model when omitted.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    rows: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FloodArgs {
    #[arg(long, default_value_t = 20)]
    replicas: usize,
    #[arg(long, default_value_t = 1000)]
    years: usize,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "survival")]
    mode: ModeArg,
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON dam specification; the calibrated default when omitted.
    #[arg(long)]
    dam: Option<PathBuf>,
    /// Per-event CSV for all replicas.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Aggregate JSON report; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct PcaArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "covariance")]
    scaling: ScalingArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gaussian,
    Frank,
    Gumbel,
    Independence,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Plain,
    Survival,
    Rot90,
    Rot270,
}

#[derive(Args)]
struct LevelsetArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// rho for Gaussian, theta for Frank and Gumbel.
    #[arg(long, allow_hyphen_values = true)]
    param: Option<f64>,
    #[arg(long, value_enum, default_value = "plain")]
    orientation: OrientationArg,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    grid: usize,
    #[arg(long)]
    output: Option<PathBuf>,
}

struct CliError {
    code: &'static str,
    message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let code = match &e {
            IoError::File { .. } => "io",
            IoError::Parse { .. } => "parse_error",
            IoError::NonFiniteValue { .. } => "non_finite_value",
            IoError::Csv(_) => "csv",
            IoError::Json(_) => "json",
            IoError::SchemaVersion(_) => "schema_version",
            IoError::DirectionSpec(_) | IoError::Geometry(_) => "direction_invalid",
            IoError::Direction(_) => "pca_failed",
            IoError::Sample(_) => "sample_invalid",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<DetectError> for CliError {
    fn from(e: DetectError) -> Self {
        let code = match e {
            DetectError::Geometry(_) => "direction_invalid",
            _ => "config_invalid",
        };
        CliError::new(code, e.to_string())
    }
}

impl From<DirectionError> for CliError {
    fn from(e: DirectionError) -> Self {
        CliError::new("pca_failed", e.to_string())
    }
}

impl From<CopulaError> for CliError {
    fn from(e: CopulaError) -> Self {
        CliError::new("model_invalid", e.to_string())
    }
}

impl From<FloodError> for CliError {
    fn from(e: FloodError) -> Self {
        CliError::new("flood_failed", e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("json", e.to_string())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes JSON to `path` or stdout, newline-terminated.
fn emit_json(value: &Value, path: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}")?;
            w.flush()?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn run_detect(a: DetectArgs) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig {
            schema_version: direx::io::CONFIG_SCHEMA_VERSION,
            mode: Mode::Survival,
            alpha: f64::NAN,
            slack: None,
            direction: DirectionSpec::default(),
            pca_scaling: PcaScaling::Covariance,
            input: None,
            output: None,
            seed: 0,
        },
    };
    if let Some(v) = a.alpha {
        cfg.alpha = v;
    }
    if let Some(d) = &a.direction {
        cfg.direction = DirectionSpec::parse(d)?;
    }
    if let Some(m) = a.mode {
        cfg.mode = m.into();
    }
    if a.slack.is_some() {
        cfg.slack = a.slack;
    }
    if let Some(s) = a.pca_scaling {
        cfg.pca_scaling = s.into();
    }
    if a.input.is_some() {
        cfg.input = a.input.clone();
    }
    if a.output.is_some() {
        cfg.output = a.output.clone();
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if cfg.alpha.is_nan() {
        return Err(CliError::new("config_invalid", "--alpha is required"));
    }
    let input = cfg
        .input
        .clone()
        .ok_or_else(|| CliError::new("config_invalid", "--input is required"))?;

    let sample = load_csv(&input)?;
    let u = cfg.direction.resolve(&sample, cfg.pca_scaling)?;
    let mut dc = DetectionConfig::new(cfg.alpha, u.clone()).with_mode(cfg.mode);
    dc.slack = cfg.slack;
    let det = detect(&sample, &dc)?;

    if let Some(out) = &cfg.output {
        let mut w = create(out)?;
        write_labeled_csv(&sample, &det, &mut w)?;
        w.flush()?;
    }
    let summary = json!({
        "schema_version": direx::io::CONFIG_SCHEMA_VERSION,
        "rows": sample.nrows(),
        "columns": sample.column_names(),
        "alpha": cfg.alpha,
        "slack": det.slack,
        "mode": cfg.mode,
        "direction": u.components(),
        "direction_spec": cfg.direction,
        "counts": {
            "upper": det.count(Label::Upper),
            "quantile": det.count(Label::Quantile),
            "lower": det.count(Label::Lower),
        },
    });
    emit_json(&summary, None)
}

fn run_simulate(a: SimulateArgs) -> Result<(), CliError> {
    let model: JointModel = match &a.model {
        Some(p) => read_json(p)?,
        None => JointModel::flood_default(),
    };
    model.validate()?;
    if a.rows == 0 {
        return Err(CliError::new("config_invalid", "--rows must be positive"));
    }
    let s = model.sample(a.rows, a.seed)?;
    match &a.output {
        Some(p) => {
            let mut w = create(p)?;
            write_csv(&s, &mut w)?;
            w.flush()?;
        }
        None => write_csv(&s, io::stdout().lock())?,
    }
    Ok(())
}

fn write_replica_rows<W: Write>(w: &mut csv_lite::Writer<W>, r: &ReplicaRun) -> io::Result<()> {
    for (i, row) in r.sample.rows().enumerate() {
        let o = &r.outcomes[i];
        w.row(&[
            r.index.to_string(),
            format_f64(row[0]),
            format_f64(row[1]),
            format_f64(row[2]),
            format_f64(r.classical.probabilities[i].value()),
            format_f64(r.pca.probabilities[i].value()),
            r.classical.labels[i].as_str().to_string(),
            r.pca.labels[i].as_str().to_string(),
            format_f64(o.max_level),
            o.class.as_str().to_string(),
        ])?;
    }
    Ok(())
}

/// Minimal writer for rows that are already formatted and never need quoting.
mod csv_lite {
    use std::io::{self, Write};

    pub struct Writer<W: Write>(pub W);

    impl<W: Write> Writer<W> {
        pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
            writeln!(self.0, "{}", cells.join(","))
        }
    }
}

fn run_flood(a: FloodArgs) -> Result<(), CliError> {
    let mut cfg =
        ExperimentConfig::new(a.replicas, a.years, a.alpha, a.seed).with_mode(a.mode.into());
    cfg.slack = a.slack;
    if let Some(p) = &a.dam {
        cfg.dam = read_json::<DamSpec>(p)?;
    }
    let mut rows = match &a.output {
        Some(p) => {
            let mut w = csv_lite::Writer(create(p)?);
            w.row(
                &[
                    "replica",
                    "Q",
                    "V",
                    "L",
                    "P_e",
                    "P_pca",
                    "label_e",
                    "label_pca",
                    "max_level",
                    "class",
                ]
                .map(String::from),
            )?;
            Some(w)
        }
        None => None,
    };
    let mut write_err = None;
    let report = run_experiment_with(&cfg, |r| {
        if let Some(w) = rows.as_mut() {
            if let Err(e) = write_replica_rows(w, r) {
                write_err.get_or_insert(e);
            }
        }
    })?;
    if let Some(e) = write_err {
        return Err(e.into());
    }
    if let Some(mut w) = rows {
        w.0.flush()?;
    }
    let mut value = serde_json::to_value(&report)?;
    value["dam"] = serde_json::to_value(&cfg.dam)?;
    emit_json(&value, a.report.as_deref())
}

fn run_pca(a: PcaArgs) -> Result<(), CliError> {
    let s = load_csv(&a.input)?;
    let pc = first_pca_direction(&s, a.scaling.into())?;
    let value = json!({
        "columns": s.column_names(),
        "scaling": PcaScaling::from(a.scaling),
        "direction": pc.direction.components(),
        "eigenvalue": pc.eigenvalue,
        "eigenvalues": pc.eigenvalues,
        "explained_variance_ratio": pc.explained_variance_ratio(),
    });
    emit_json(&value, a.output.as_deref())
}

fn run_levelsets(a: LevelsetArgs) -> Result<(), CliError> {
    let need = |name: &str| {
        a.param
            .ok_or_else(|| CliError::new("config_invalid", format!("--param ({name}) is required")))
    };
    let family = match a.family {
        FamilyArg::Gaussian => CopulaFamily::Gaussian { rho: need("rho")? },
        FamilyArg::Frank => CopulaFamily::Frank {
            theta: need("theta")?,
        },
        FamilyArg::Gumbel => CopulaFamily::Gumbel {
            theta: need("theta")?,
        },
        FamilyArg::Independence => CopulaFamily::Independence,
    };
    let orientation = match a.orientation {
        OrientationArg::Plain => Orientation::Plain,
        OrientationArg::Survival => Orientation::Survival,
        OrientationArg::Rot90 => Orientation::Rot90,
        OrientationArg::Rot270 => Orientation::Rot270,
    };
    let c = CopulaModel::oriented(family, orientation)?;
    let g = copula_level_sets(&c, a.alpha, a.grid)?;
    let mut out: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    writeln!(out, "v1,v2,C,label")?;
    for i in 0..g.grid {
        for j in 0..g.grid {
            writeln!(
                out,
                "{},{},{},{}",
                format_f64(g.coordinate(i)),
                format_f64(g.coordinate(j)),
                format_f64(g.value(i, j)),
                g.label(i, j).as_str()
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::new("usage", e.to_string().trim_end());
            report(&err);
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Detect(a) => run_detect(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Flood(a) => run_flood(a),
        Command::Pca(a) => run_pca(a),
        Command::Levelsets(a) => run_levelsets(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::from(1)
        }
    }
}

fn report(e: &CliError) {
    let v = json!({ "error": { "code": e.code, "message": e.message } });
    eprintln!("{v}");
}
