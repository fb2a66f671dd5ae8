//! Stroboscopic measurement simulation and linear-inversion reconstruction.
//!
//! The unknown initial state is expanded over the orthonormal hermitian basis,
//! `ρ₀ = Σ_k x_k B_k` with real `x_k`. A measurement of `Q_i` at time `t_j`
//! is linear in the coefficients, `⟨Q_i⟩(t_j) = Σ_k x_k tr(Q_i e^{t_j 𝕃}[B_k])`,
//! so the data determine `ρ₀` exactly when the design matrix has rank `N²`.
//! A heavily weighted row `tr ρ₀ = 1` is appended before solving.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::algebra::{self, hermitian_basis, ComplexMatrix, ToleranceConfig};
use crate::analysis::{ObservableSet, SpectralReport};
use crate::error::{Error, Result};
use crate::model::{build_generator, evolve_with, DensityMatrix, LindbladModel};
use crate::random::seeded_rng;

/// Largest imaginary part tolerated in a noiseless expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// Strictly increasing, positive, finite measurement instants.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    instants: Vec<f64>,
}

impl TimeGrid {
    pub fn new(instants: Vec<f64>) -> Result<Self> {
        if instants.is_empty() {
            return Err(Error::InvalidInput("time grid is empty".into()));
        }
        if let Some(t) = instants.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(Error::InvalidInput(format!(
                "time grid instants must be positive and finite, got {t}"
            )));
        }
        if instants.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "time grid instants must be strictly increasing".into(),
            ));
        }
        Ok(Self { instants })
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }
}

/// `t_j = j Δt` for `j = 1..=mu`, with `Δt = 1 / max|Re λ|` over the nonzero
/// eigenvalues (or 1 when there are none with nonzero real part).
///
/// This is a convenient default, not an optimized choice of instants.
pub fn default_time_grid(report: &SpectralReport, mu: usize) -> Result<TimeGrid> {
    if mu == 0 {
        return Err(Error::InvalidInput("mu must be at least 1".into()));
    }
    let rate = report.max_abs_real_nonzero();
    let dt = if rate > 0.0 { 1.0 / rate } else { 1.0 };
    TimeGrid::new((1..=mu).map(|j| j as f64 * dt).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub observable_index: usize,
    pub time: f64,
    pub value: f64,
    pub sigma: f64,
}

/// Expectation values `⟨Q_i⟩(t_j)` with their noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    entries: Vec<Measurement>,
    observable_count: usize,
    grid: TimeGrid,
}

impl MeasurementRecord {
    /// Validates entries; the grid is the sorted set of distinct entry times.
    pub fn new(entries: Vec<Measurement>, observable_count: usize) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("measurement record is empty".into()));
        }
        for (row, m) in entries.iter().enumerate() {
            if m.observable_index >= observable_count {
                return Err(Error::InvalidInput(format!(
                    "row {row}: observable_index {} out of range for {observable_count} observables",
                    m.observable_index
                )));
            }
            if !m.value.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "row {row}: value is not finite"
                )));
            }
            if !(m.sigma.is_finite() && m.sigma >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "row {row}: sigma must be finite and >= 0"
                )));
            }
            if !(m.time.is_finite() && m.time > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "row {row}: time must be positive and finite"
                )));
            }
        }
        let mut times: Vec<f64> = entries.iter().map(|m| m.time).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        Ok(Self {
            entries,
            observable_count,
            grid: TimeGrid::new(times)?,
        })
    }

    pub fn entries(&self) -> &[Measurement] {
        &self.entries
    }

    pub fn observable_count(&self) -> usize {
        self.observable_count
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Parse(format!("csv write: {e}"));
        w.write_record(["observable_index", "time", "value", "sigma"])
            .map_err(csv_err)?;
        for m in &self.entries {
            w.write_record([
                m.observable_index.to_string(),
                format!("{:.16e}", m.time),
                format!("{:.16e}", m.value),
                format!("{:.16e}", m.sigma),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<record>".into(),
            source: e,
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = r
            .headers()
            .map_err(|e| Error::Parse(format!("record csv: {e}")))?
            .clone();
        let expected = ["observable_index", "time", "value", "sigma"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Parse(format!(
                "record csv: header must be `{}`, got `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (row, rec) in r.deserialize::<Measurement>().enumerate() {
            entries
                .push(rec.map_err(|e| Error::Parse(format!("record csv row {}: {e}", row + 1)))?);
        }
        let count = entries
            .iter()
            .map(|m| m.observable_index + 1)
            .max()
            .unwrap_or(0);
        Self::new(entries, count).map_err(|e| Error::Parse(format!("record csv: {e}")))
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::read_csv(file)
    }
}

/// Real expectation value `tr(Q ρ)`; errors when the imaginary part exceeds
/// [`EXPECTATION_IMAG_TOL`].
fn expectation(q: &ComplexMatrix, rho: &ComplexMatrix) -> Result<f64> {
    // tr(Qρ) = Σ_ij Q_ij ρ_ji = hs_inner(Q†, ρ); Q is hermitian
    let z = algebra::hs_inner(&q.adjoint(), rho)?;
    if z.im.abs() > EXPECTATION_IMAG_TOL {
        return Err(Error::Numerical(format!(
            "expectation value has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Simulates `⟨Q_i⟩(t_j) + N(0, σ²)` for every observable and instant,
/// observable-major. Deterministic for a fixed `seed`.
pub fn simulate_measurements(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    set: &ObservableSet,
    grid: &TimeGrid,
    noise_sigma: f64,
    seed: u64,
) -> Result<MeasurementRecord> {
    if rho0.dim() != model.dim() || set.dim() != model.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: model {}, state {}, observables {}",
            model.dim(),
            rho0.dim(),
            set.dim()
        )));
    }
    let noise = Normal::new(0.0, noise_sigma).map_err(|_| {
        Error::InvalidInput(format!(
            "noise sigma must be finite and >= 0, got {noise_sigma}"
        ))
    })?;
    let gen = build_generator(model)?;
    let states = grid
        .instants()
        .iter()
        .map(|&t| evolve_with(&gen.propagator(t)?, rho0))
        .collect::<Result<Vec<_>>>()?;

    let mut rng = seeded_rng(seed);
    let mut entries = Vec::with_capacity(set.len() * grid.len());
    for (i, q) in set.iter().enumerate() {
        for (&t, rho_t) in grid.instants().iter().zip(&states) {
            let mut value = expectation(q, rho_t.matrix())?;
            if noise_sigma > 0.0 {
                value += noise.sample(&mut rng);
            }
            entries.push(Measurement {
                observable_index: i,
                time: t,
                value,
                sigma: noise_sigma,
            });
        }
    }
    MeasurementRecord::new(entries, set.len())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructOptions {
    /// Clip negative eigenvalues and renormalize the estimate.
    pub project: bool,
    /// Weight of the `tr ρ = 1` row relative to the data rows.
    pub trace_weight: f64,
    pub tol: ToleranceConfig,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        Self {
            project: true,
            trace_weight: 1e3,
            tol: ToleranceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub rho_hat: DensityMatrix,
    /// `‖A x - b‖₂` over the data rows (before projection).
    pub residual_norm: f64,
    pub design_rank: usize,
    /// `σ_max / σ_min` of the design matrix (trace row at unit weight).
    pub design_condition: f64,
    pub frobenius_error: Option<f64>,
    /// Coefficients of the unprojected estimate in the hermitian basis.
    pub coefficients: Vec<f64>,
}

/// Reconstructs the initial state from a measurement record.
pub fn reconstruct(
    model: &LindbladModel,
    set: &ObservableSet,
    record: &MeasurementRecord,
    options: &ReconstructOptions,
    truth: Option<&DensityMatrix>,
) -> Result<ReconstructionResult> {
    options.tol.validate()?;
    let n = model.dim();
    if set.dim() != n {
        return Err(Error::InvalidInput(format!(
            "observables are {0}x{0} but the model has dimension {n}",
            set.dim()
        )));
    }
    if record.observable_count() > set.len() {
        return Err(Error::InvalidInput(format!(
            "record references {} observables but the set has {}",
            record.observable_count(),
            set.len()
        )));
    }
    if let Some(t) = truth {
        if t.dim() != n {
            return Err(Error::InvalidInput(
                "truth state has the wrong dimension".into(),
            ));
        }
    }
    let gen = build_generator(model)?;
    let basis = hermitian_basis(n.max(2))?;
    let n2 = n * n;

    // evolved basis elements per distinct instant
    let times = record.grid().instants();
    let mut evolved: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(times.len());
    for &t in times {
        let prop = gen.propagator(t)?;
        evolved.push(
            basis
                .iter()
                .map(|b| algebra::unvec(&prop.apply(&algebra::vec(b))?, n))
                .collect::<Result<Vec<_>>>()?,
        );
    }

    let rows = record.entries().len() + 1;
    let mut design = ComplexMatrix::zeros(rows, n2);
    let mut rhs = vec![C64::new(0.0, 0.0); rows];
    for (r, m) in record.entries().iter().enumerate() {
        let slot = times
            .binary_search_by(|t| t.total_cmp(&m.time))
            .expect("grid holds every entry time");
        let q = &set.observables()[m.observable_index];
        for (k, bk) in evolved[slot].iter().enumerate() {
            design[(r, k)] = C64::new(expectation(q, &bk.hermitian_part())?, 0.0);
        }
        rhs[r] = C64::new(m.value, 0.0);
    }
    let trace_row = rows - 1;
    for (k, b) in basis.iter().enumerate() {
        design[(trace_row, k)] = C64::new(b.trace().re, 0.0);
    }
    rhs[trace_row] = C64::new(1.0, 0.0);

    let sv = algebra::singular_values(&design);
    let smax = sv.first().copied().unwrap_or(0.0);
    let design_rank = sv
        .iter()
        .filter(|&&s| s > options.tol.rank_rtol * smax)
        .count();
    if design_rank < n2 {
        return Err(Error::RankDeficient {
            achieved: design_rank,
            required: n2,
        });
    }
    let smin = sv.get(n2 - 1).copied().unwrap_or(0.0);
    let design_condition = smax / smin;

    let mut weighted = design.clone();
    for k in 0..n2 {
        weighted[(trace_row, k)] *= options.trace_weight;
    }
    let mut weighted_rhs = rhs.clone();
    weighted_rhs[trace_row] *= options.trace_weight;
    let x = algebra::lstsq(&weighted, &weighted_rhs, f64::EPSILON)?;
    let coefficients: Vec<f64> = x.iter().map(|z| z.re).collect();

    let fitted = design.apply(&x)?;
    let residual_norm = fitted[..trace_row]
        .iter()
        .zip(&rhs[..trace_row])
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();

    let mut estimate = ComplexMatrix::zeros(n, n);
    for (b, &c) in basis.iter().zip(&coefficients) {
        estimate += &b.scale_real(c);
    }
    let estimate = estimate.hermitian_part();
    let rho_hat = if options.project {
        project_to_density(&estimate)?
    } else {
        DensityMatrix::new_unchecked(estimate)
    };
    let frobenius_error = truth.map(|t| (rho_hat.matrix() - t.matrix()).frobenius_norm());
    Ok(ReconstructionResult {
        rho_hat,
        residual_norm,
        design_rank,
        design_condition,
        frobenius_error,
        coefficients,
    })
}

/// Clips negative eigenvalues of a hermitian matrix to zero and rescales the
/// spectrum to unit trace.
pub fn project_to_density(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let (values, vectors) = algebra::hermitian_eigen(m)?;
    let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numerical(
            "estimate has no positive spectrum to project onto".into(),
        ));
    }
    let d: Vec<C64> = clipped.iter().map(|&v| C64::new(v / total, 0.0)).collect();
    let rho = (&(&vectors * &ComplexMatrix::from_diag(&d)) * &vectors.adjoint()).hermitian_part();
    Ok(DensityMatrix::new_unchecked(rho))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDistance {
    pub frobenius: f64,
    pub trace_distance: f64,
}

/// Frobenius distance and trace distance `½ Σ |eig(ρ - σ)|`.
pub fn state_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<StateDistance> {
    if rho.dim() != sigma.dim() {
        return Err(Error::ShapeMismatch {
            op: "state_distance",
            left: rho.matrix().shape(),
            right: sigma.matrix().shape(),
        });
    }
    let diff = rho.matrix() - sigma.matrix();
    let eig = algebra::hermitian_eigenvalues(&diff)?;
    Ok(StateDistance {
        frobenius: diff.frobenius_norm(),
        trace_distance: 0.5 * eig.iter().map(|v| v.abs()).sum::<f64>(),
    })
}
