//! Command-line front end: `analyze`, `find-observables`, `simulate`,
//! `reconstruct`.
//!
//! Exit codes: 0 success, 2 input/parse errors, 3 numerical failure,
//! 4 observable search exhausted, 5 invalid density matrix, 6 rank-deficient
//! reconstruction.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::algebra::ToleranceConfig;
use crate::analysis::{
    find_observables, measurement_budget, spectral_report, verify_observables, SpectralReport,
};
use crate::error::{Error, Result};
use crate::io::{self, ComplexEntry, MatrixJson, ModelFile};
use crate::model::{build_generator, laser_cooling_model, LindbladModel};
use crate::tomography::{
    default_time_grid, reconstruct, simulate_measurements, state_distance, MeasurementRecord,
    ReconstructOptions,
};

pub const TOLERANCE_ENV: &str = "STROBE_TOMO_TOLERANCE";
pub const TOOL_NAME: &str = "strobe-tomo";

#[derive(Debug, Parser)]
#[command(
    name = "strobe-tomo",
    version,
    about = "Stroboscopic tomography for Lindblad generators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum, index of cyclicity, minimal polynomial and measurement budget.
    Analyze(AnalyzeArgs),
    /// Search for a minimal observable set satisfying the Krylov spanning condition.
    FindObservables(FindArgs),
    /// Simulate stroboscopic expectation values on the default time grid.
    Simulate(SimulateArgs),
    /// Reconstruct the initial state from a measurement record.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Args)]
pub struct ModelSource {
    /// Model JSON file.
    #[arg(required_unless_present_all = ["gamma1", "gamma2"], conflicts_with_all = ["gamma1", "gamma2"])]
    pub model: Option<PathBuf>,
    /// Decay rate of |1⟩⟨2| for the built-in three-level laser-cooling model.
    #[arg(long, requires = "gamma2", allow_negative_numbers = true)]
    pub gamma1: Option<f64>,
    /// Decay rate of |3⟩⟨2| for the built-in three-level laser-cooling model.
    #[arg(long, requires = "gamma1", allow_negative_numbers = true)]
    pub gamma2: Option<f64>,
}

impl ModelSource {
    fn load(&self) -> Result<LindbladModel> {
        match (&self.model, self.gamma1, self.gamma2) {
            (Some(path), _, _) => load_model(path),
            (None, Some(g1), Some(g2)) => laser_cooling_model(g1, g2),
            _ => Err(Error::InvalidInput(
                "give a model file or both --gamma1 and --gamma2".into(),
            )),
        }
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Emit the report as JSON.
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    /// Emit a human-readable report (default).
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct FindArgs {
    #[command(flatten)]
    pub source: ModelSource,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_attempts: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub model: PathBuf,
    pub state: PathBuf,
    pub observables: PathBuf,
    /// Standard deviation of additive Gaussian noise per measurement.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    pub model: PathBuf,
    pub observables: PathBuf,
    pub record: PathBuf,
    /// True initial state, for error reporting.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Skip eigenvalue clipping of the estimate.
    #[arg(long)]
    pub no_project: bool,
    #[arg(long)]
    pub json: bool,
}

/// Process exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. } | Error::Numerical(_) => 3,
        Error::SearchExhausted { .. } => 4,
        Error::InvalidState(_) => 5,
        Error::RankDeficient { .. } => 6,
        _ => 2,
    }
}

/// Tolerances with `rank_rtol` taken from the environment override, if set.
pub fn tolerance_from_env(value: Option<&str>) -> Result<ToleranceConfig> {
    let base = ToleranceConfig::default();
    match value {
        None => Ok(base),
        Some(v) => {
            let rtol: f64 = v.trim().parse().map_err(|_| {
                Error::Parse(format!("{TOLERANCE_ENV}: cannot parse `{v}` as a number"))
            })?;
            base.with_rank_rtol(rtol)
                .map_err(|e| Error::Parse(format!("{TOLERANCE_ENV}: {e}")))
        }
    }
}

fn load_model(path: &Path) -> Result<LindbladModel> {
    io::parse_model(&io::read_text(path)?).map_err(|e| match e {
        Error::InvalidModel(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn write_output(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueJson {
    pub re: f64,
    pub im: f64,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReportJson {
    pub dim: usize,
    pub distinct_eigenvalues: Vec<EigenvalueJson>,
    pub eta: usize,
    pub mu: usize,
    pub min_poly: Vec<ComplexEntry>,
    pub static_observable_count: usize,
    pub measurement_budget: usize,
    /// Observables the stroboscopic scheme uses (η).
    pub observables_required: usize,
}

impl From<&SpectralReport> for SpectralReportJson {
    fn from(r: &SpectralReport) -> Self {
        Self {
            dim: r.dim,
            distinct_eigenvalues: r
                .distinct_eigenvalues
                .iter()
                .map(|e| EigenvalueJson {
                    re: e.value.re,
                    im: e.value.im,
                    algebraic_multiplicity: e.algebraic,
                    geometric_multiplicity: e.geometric,
                })
                .collect(),
            eta: r.eta,
            mu: r.mu,
            min_poly: r.min_poly.iter().map(|&z| z.into()).collect(),
            static_observable_count: r.static_observable_count,
            measurement_budget: r.measurement_budget,
            observables_required: r.eta,
        }
    }
}

/// Self-contained analysis output: the model echo and tolerances are enough
/// to re-run the analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReportDocument {
    pub tool: String,
    pub version: String,
    pub tolerance: ToleranceConfig,
    pub model: ModelFile,
    pub report: SpectralReportJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionDocument {
    pub rho_hat: MatrixJson,
    pub projected: bool,
    pub min_eigenvalue: f64,
    pub residual_norm: f64,
    pub design_rank: usize,
    pub design_condition: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frobenius_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_distance: Option<f64>,
}

fn fmt_complex(re: f64, im: f64) -> String {
    format!(
        "{re:.10} {} {:.10}i",
        if im < 0.0 { '-' } else { '+' },
        im.abs()
    )
}

/// Builds the analysis document for `model`.
pub fn analysis_document(
    model: &LindbladModel,
    tol: &ToleranceConfig,
) -> Result<AnalysisReportDocument> {
    let gen = build_generator(model)?;
    let report = spectral_report(&gen, tol)?;
    Ok(AnalysisReportDocument {
        tool: TOOL_NAME.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        tolerance: *tol,
        model: ModelFile::from_model(model),
        report: (&report).into(),
    })
}

fn analysis_text(doc: &AnalysisReportDocument) -> String {
    let r = &doc.report;
    let mut s = String::new();
    s += &format!(
        "model: N = {}, {} jump operator(s), generator {}x{}\n",
        r.dim,
        doc.model.jumps.len(),
        r.dim * r.dim,
        r.dim * r.dim
    );
    s += "distinct eigenvalues:\n";
    for e in &r.distinct_eigenvalues {
        s += &format!(
            "  {:<36} algebraic {:>3}  geometric {:>3}\n",
            fmt_complex(e.re, e.im),
            e.algebraic_multiplicity,
            e.geometric_multiplicity
        );
    }
    s += &format!("minimal polynomial degree mu = {}\n", r.mu);
    s += "minimal polynomial coefficients (ascending):\n";
    for (k, c) in r.min_poly.iter().enumerate() {
        s += &format!("  c{k} = {}\n", fmt_complex(c.re, c.im));
    }
    s += &format!("index of cyclicity eta = {}\n", r.eta);
    s += &format!("observables (stroboscopic) = {}\n", r.observables_required);
    s += &format!(
        "observables (static, N^2-1) = {}\n",
        r.static_observable_count
    );
    s += &format!("instants per observable <= {}\n", r.mu);
    s += &format!("measurement budget eta*mu = {}\n", r.measurement_budget);
    s
}

/// Runs a parsed command, writing normal output to `stdout`.
pub fn run(
    cli: Cli,
    tol: &ToleranceConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    match cli.command {
        Command::Analyze(args) => {
            let model = args.source.load()?;
            let doc = analysis_document(&model, tol)?;
            let text = if args.json {
                serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
            } else {
                analysis_text(&doc)
            };
            write_output(None, &text, stdout)
        }
        Command::FindObservables(args) => {
            let model = args.source.load()?;
            let gen = build_generator(&model)?;
            let set = find_observables(&gen, tol, args.seed, args.max_attempts)?;
            let v = verify_observables(&gen, &set, tol)?;
            let json = io::observables_to_json(&set) + "\n";
            write_output(args.out.as_deref(), &json, stdout)?;
            let msg = format!(
                "found {} observables; achieved rank {} of {} (ok = {})\n",
                set.len(),
                v.achieved_rank,
                v.required,
                v.ok
            );
            // keep stdout pure JSON when the set itself goes there
            let sink: &mut dyn Write = if args.out.is_some() { stdout } else { stderr };
            let _ = sink.write_all(msg.as_bytes());
            Ok(())
        }
        Command::Simulate(args) => {
            let model = load_model(&args.model)?;
            let rho0 = io::parse_state(&io::read_text(&args.state)?)?;
            let set = io::parse_observables(&io::read_text(&args.observables)?)?;
            if rho0.dim() != model.dim() {
                return Err(Error::InvalidState(format!(
                    "state is {0}x{0} but the model has dimension {1}",
                    rho0.dim(),
                    model.dim()
                )));
            }
            let gen = build_generator(&model)?;
            let report = spectral_report(&gen, tol)?;
            let (_, mu, _) = measurement_budget(&report);
            let grid = default_time_grid(&report, mu)?;
            let record = simulate_measurements(&model, &rho0, &set, &grid, args.sigma, args.seed)?;
            write_output(args.out.as_deref(), &record.to_csv_string(), stdout)
        }
        Command::Reconstruct(args) => {
            let model = load_model(&args.model)?;
            let set = io::parse_observables(&io::read_text(&args.observables)?)?;
            let record = MeasurementRecord::read_csv_file(&args.record)?;
            let truth = args
                .truth
                .as_deref()
                .map(|p| io::parse_state(&io::read_text(p)?))
                .transpose()?;
            let options = ReconstructOptions {
                project: !args.no_project,
                tol: *tol,
                ..ReconstructOptions::default()
            };
            let result = reconstruct(&model, &set, &record, &options, truth.as_ref())?;
            let trace_distance = truth
                .as_ref()
                .map(|t| state_distance(&result.rho_hat, t).map(|d| d.trace_distance))
                .transpose()?;
            let min_eigenvalue = result
                .rho_hat
                .eigenvalues()?
                .first()
                .copied()
                .unwrap_or(0.0);
            let doc = ReconstructionDocument {
                rho_hat: io::matrix_to_json(result.rho_hat.matrix()),
                projected: options.project,
                min_eigenvalue,
                residual_norm: result.residual_norm,
                design_rank: result.design_rank,
                design_condition: result.design_condition,
                frobenius_error: result.frobenius_error,
                trace_distance,
            };
            let text = if args.json {
                serde_json::to_string_pretty(&doc).expect("document serializes") + "\n"
            } else {
                reconstruction_text(&doc, &result.rho_hat)
            };
            write_output(None, &text, stdout)
        }
    }
}

fn reconstruction_text(doc: &ReconstructionDocument, rho: &crate::model::DensityMatrix) -> String {
    let m = rho.matrix();
    let mut s = String::from("reconstructed initial state:\n");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|z| fmt_complex(z.re, z.im)).collect();
        s += &format!("  [{}]\n", row.join(", "));
    }
    s += &format!("projected: {}\n", doc.projected);
    s += &format!("min eigenvalue: {:.6e}\n", doc.min_eigenvalue);
    s += &format!("residual norm: {:.6e}\n", doc.residual_norm);
    s += &format!("design rank: {}\n", doc.design_rank);
    s += &format!("design condition number: {:.6e}\n", doc.design_condition);
    if let Some(f) = doc.frobenius_error {
        s += &format!("frobenius error: {f:.6e}\n");
    }
    if let Some(t) = doc.trace_distance {
        s += &format!("trace distance: {t:.6e}\n");
    }
    s
}
