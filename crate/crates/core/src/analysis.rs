//! Tomography resource bounds and observable-set verification.
//!
//! The index of cyclicity `η` (largest geometric multiplicity of the
//! generator spectrum) is the minimal number of distinct observables; the
//! degree `μ` of the minimal polynomial bounds the number of measurement
//! instants per observable. A candidate set `{Q_i}` is informationally
//! complete when the Krylov spaces `span{Q_i, 𝕃*Q_i, …, (𝕃*)^{μ-1} Q_i}`
//! together span the `N²`-dimensional real space of hermitian operators.

use num_complex::Complex64 as C64;

use crate::algebra::{
    self, eigenvalues, hermitian_basis, kernel_dim, minimal_polynomial, ComplexMatrix,
    ToleranceConfig,
};
use crate::error::{Error, Result};
use crate::model::Superoperator;
use crate::random::{random_hermitian, substream};

#[derive(Debug, Clone, PartialEq)]
pub struct DistinctEigenvalue {
    pub value: C64,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    /// Hilbert-space dimension `N` of the analyzed generator.
    pub dim: usize,
    /// Sorted by decreasing real part, then decreasing imaginary part.
    pub distinct_eigenvalues: Vec<DistinctEigenvalue>,
    pub eta: usize,
    pub mu: usize,
    /// Monic, ascending degree.
    pub min_poly: Vec<C64>,
    /// `N² - 1`, the observable count of static tomography.
    pub static_observable_count: usize,
    /// `η · μ`.
    pub measurement_budget: usize,
}

impl SpectralReport {
    pub fn is_diagonalizable(&self) -> bool {
        self.distinct_eigenvalues
            .iter()
            .all(|e| e.algebraic == e.geometric)
    }

    /// Largest `|Re λ|` over eigenvalues that are not numerically zero.
    pub fn max_abs_real_nonzero(&self) -> f64 {
        self.distinct_eigenvalues
            .iter()
            .filter(|e| e.value.norm() > 0.0)
            .map(|e| e.value.re.abs())
            .fold(0.0, f64::max)
    }
}

/// Groups eigenvalues whose mutual distance is within the clustering radius
/// (single linkage), returning `(mean, count)` per cluster.
fn cluster_eigenvalues(values: &[C64], rtol: f64, scale: f64) -> Vec<(C64, usize)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let radius = rtol * (1.0 + values[i].norm().max(values[j].norm())) * scale;
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut clusters: Vec<(usize, C64, usize)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let root = find(&mut parent, i);
        match clusters.iter_mut().find(|c| c.0 == root) {
            Some(c) => {
                c.1 += v;
                c.2 += 1;
            }
            None => clusters.push((root, v, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(_, sum, count)| (sum / count as f64, count))
        .collect()
}

/// Spectrum with multiplicities, `η`, `μ` and the minimal polynomial.
pub fn spectral_report(gen: &Superoperator, tol: &ToleranceConfig) -> Result<SpectralReport> {
    tol.validate()?;
    let m = gen.matrix();
    let n2 = m.rows();
    let values = eigenvalues(m)?;
    let scale = m.max_abs().max(1.0);
    let mut distinct: Vec<DistinctEigenvalue> =
        cluster_eigenvalues(&values, tol.eig_cluster_rtol, scale)
            .into_iter()
            .map(|(value, algebraic)| {
                // snap roundoff-level parts so exact zeros print as zeros
                let snap = |x: f64| {
                    if x.abs() <= f64::EPSILON * 64.0 * scale {
                        0.0
                    } else {
                        x
                    }
                };
                let value = C64::new(snap(value.re), snap(value.im));
                let geometric = kernel_dim(&m.shift_diagonal(value), tol).clamp(1, algebraic);
                DistinctEigenvalue {
                    value,
                    algebraic,
                    geometric,
                }
            })
            .collect();
    distinct.sort_by(|a, b| {
        b.value
            .re
            .total_cmp(&a.value.re)
            .then(b.value.im.total_cmp(&a.value.im))
    });
    debug_assert_eq!(distinct.iter().map(|d| d.algebraic).sum::<usize>(), n2);

    let min_poly = minimal_polynomial(m, tol)?;
    let eta = distinct.iter().map(|d| d.geometric).max().unwrap_or(0);
    let mu = min_poly.len() - 1;
    let dim = gen.dim();
    Ok(SpectralReport {
        dim,
        distinct_eigenvalues: distinct,
        eta,
        mu,
        min_poly,
        static_observable_count: dim * dim - 1,
        measurement_budget: eta * mu,
    })
}

/// `(η, μ, η·μ)`.
pub fn measurement_budget(report: &SpectralReport) -> (usize, usize, usize) {
    (report.eta, report.mu, report.eta * report.mu)
}

/// A non-empty list of hermitian `N`×`N` observables.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    observables: Vec<ComplexMatrix>,
}

impl ObservableSet {
    pub fn new(observables: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = observables.first() else {
            return Err(Error::InvalidInput("observable set is empty".into()));
        };
        let n = first.ensure_square("observable")?;
        let atol = ToleranceConfig::default().hermiticity_atol;
        for (i, q) in observables.iter().enumerate() {
            if q.shape() != (n, n) {
                return Err(Error::InvalidInput(format!(
                    "observable {i} is {}x{}, expected {n}x{n}",
                    q.rows(),
                    q.cols()
                )));
            }
            q.ensure_hermitian(&format!("observable {i}"), atol)?;
        }
        Ok(Self { observables })
    }

    pub fn dim(&self) -> usize {
        self.observables[0].rows()
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexMatrix> {
        self.observables.iter()
    }

    /// Same set with one more observable appended.
    pub fn with(&self, q: ComplexMatrix) -> Result<Self> {
        let mut obs = self.observables.clone();
        obs.push(q);
        Self::new(obs)
    }
}

/// `[Q, 𝕃*Q, …, (𝕃*)^{μ-1} Q]` where `𝕃*` is the Hilbert–Schmidt adjoint.
pub fn krylov_subspace(
    gen: &Superoperator,
    q: &ComplexMatrix,
    mu: usize,
) -> Result<Vec<ComplexMatrix>> {
    if q.shape() != (gen.dim(), gen.dim()) {
        return Err(Error::ShapeMismatch {
            op: "krylov_subspace",
            left: (gen.dim(), gen.dim()),
            right: q.shape(),
        });
    }
    q.ensure_hermitian("observable", ToleranceConfig::default().hermiticity_atol)?;
    let dual = gen.matrix().adjoint();
    krylov_with(&dual, q, mu)
}

fn krylov_with(dual: &ComplexMatrix, q: &ComplexMatrix, mu: usize) -> Result<Vec<ComplexMatrix>> {
    let n = q.rows();
    let mut out = Vec::with_capacity(mu);
    let mut current = q.clone();
    for k in 0..mu {
        if k > 0 {
            current = algebra::unvec(&dual.apply(&algebra::vec(&current))?, n)?;
        }
        out.push(current.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    pub achieved_rank: usize,
    pub required: usize,
}

/// Reusable spanning-condition checker for one generator.
///
/// Holds `μ`, the hermitian basis and the dual generator scaled to unit
/// spectral norm (scaling leaves every Krylov span unchanged and keeps the
/// powers comparable in size for the rank threshold).
#[derive(Debug, Clone)]
pub struct Verifier {
    dim: usize,
    mu: usize,
    basis: Vec<ComplexMatrix>,
    scaled_dual: ComplexMatrix,
    tol: ToleranceConfig,
}

impl Verifier {
    pub fn new(gen: &Superoperator, tol: &ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        let mu = minimal_polynomial(gen.matrix(), tol)?.len() - 1;
        Self::with_depth(gen, mu, tol)
    }

    /// Verifier with an explicit Krylov depth.
    pub fn with_depth(gen: &Superoperator, mu: usize, tol: &ToleranceConfig) -> Result<Self> {
        let dim = gen.dim();
        let norm = algebra::singular_values(gen.matrix())
            .first()
            .copied()
            .unwrap_or(0.0);
        let dual = gen.matrix().adjoint();
        let scaled_dual = if norm > 0.0 {
            dual.scale_real(1.0 / norm)
        } else {
            dual
        };
        Ok(Self {
            dim,
            mu,
            basis: hermitian_basis(dim.max(2))?,
            scaled_dual,
            tol: *tol,
        })
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn verify(&self, set: &ObservableSet) -> Result<Verification> {
        if set.dim() != self.dim {
            return Err(Error::ShapeMismatch {
                op: "verify_observables",
                left: (self.dim, self.dim),
                right: (set.dim(), set.dim()),
            });
        }
        let required = self.dim * self.dim;
        let mut rows: Vec<C64> = Vec::with_capacity(set.len() * self.mu * required);
        for q in set.iter() {
            for x in krylov_with(&self.scaled_dual, q, self.mu)? {
                for b in &self.basis {
                    rows.push(C64::new(algebra::hs_inner(b, &x)?.re, 0.0));
                }
            }
        }
        let stacked = ComplexMatrix::from_vec(set.len() * self.mu, required, rows)?;
        let achieved_rank = algebra::rank(&stacked, &self.tol);
        Ok(Verification {
            ok: achieved_rank == required,
            achieved_rank,
            required,
        })
    }
}

/// Checks whether the Krylov spaces of `set` span the hermitian operators.
pub fn verify_observables(
    gen: &Superoperator,
    set: &ObservableSet,
    tol: &ToleranceConfig,
) -> Result<Verification> {
    Verifier::new(gen, tol)?.verify(set)
}

/// Seeded random search for `η` observables passing [`verify_observables`].
///
/// Attempt `k` draws its observables from substream `k` of `seed`, so the
/// result depends only on `seed`.
pub fn find_observables(
    gen: &Superoperator,
    tol: &ToleranceConfig,
    seed: u64,
    max_attempts: usize,
) -> Result<ObservableSet> {
    let report = spectral_report(gen, tol)?;
    let verifier = Verifier::with_depth(gen, report.mu, tol)?;
    let n = gen.dim();
    let mut best_rank = 0;
    for attempt in 0..max_attempts {
        let mut rng = substream(seed, attempt as u64);
        let candidate = ObservableSet::new(
            (0..report.eta)
                .map(|_| random_hermitian(n, &mut rng))
                .collect(),
        )?;
        let v = verifier.verify(&candidate)?;
        if v.ok {
            return Ok(candidate);
        }
        best_rank = best_rank.max(v.achieved_rank);
    }
    Err(Error::SearchExhausted {
        attempts: max_attempts,
        best_rank,
        required: n * n,
    })
}
