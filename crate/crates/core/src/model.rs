//! Lindblad master-equation models and their vectorized generators.
//!
//! A model is `dρ/dt = -i[H, ρ] + Σ_k γ_k (L_k ρ L_k† - ½{L_k†L_k, ρ})` with a
//! constant Hamiltonian. Vectorization is row-stacking throughout, so
//! `vec(AXB) = (A ⊗ Bᵀ) vec(X)` and the generator becomes
//!
//! ```text
//! 𝕃 = -i(H ⊗ I - I ⊗ Hᵀ) + Σ_k γ_k [L_k ⊗ L̄_k - ½(L_k†L_k ⊗ I + I ⊗ (L_k†L_k)ᵀ)]
//! ```

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, expm, kron, unvec, vec, ComplexMatrix, ToleranceConfig};
use crate::error::{Error, Result};

/// Trace must equal one to this absolute tolerance.
pub const TRACE_ATOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for a stored density matrix.
pub const STATE_EIGEN_FLOOR: f64 = -1e-10;
/// Smallest eigenvalue accepted after time evolution (expm roundoff).
pub const EVOLVE_EIGEN_FLOOR: f64 = -1e-8;
/// Generator trace-preservation tolerance, relative to `1 + max|𝕃|`.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub rate: f64,
    pub operator: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    dim: usize,
    hamiltonian: ComplexMatrix,
    jumps: Vec<Jump>,
}

impl LindbladModel {
    pub fn new(dim: usize, hamiltonian: ComplexMatrix, jumps: Vec<Jump>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dim: must be at least 1".into()));
        }
        if hamiltonian.shape() != (dim, dim) {
            return Err(Error::InvalidModel(format!(
                "hamiltonian: expected {dim}x{dim}, got {}x{}",
                hamiltonian.rows(),
                hamiltonian.cols()
            )));
        }
        let atol = ToleranceConfig::default().hermiticity_atol;
        if !hamiltonian.is_hermitian(atol) {
            return Err(Error::InvalidModel(format!(
                "hamiltonian: not hermitian (max |H - H†| = {:e})",
                hamiltonian.hermiticity_deviation()
            )));
        }
        for (k, jump) in jumps.iter().enumerate() {
            if !(jump.rate.is_finite() && jump.rate >= 0.0) {
                return Err(Error::InvalidModel(format!(
                    "jumps[{k}].rate: must be finite and >= 0, got {}",
                    jump.rate
                )));
            }
            if jump.operator.shape() != (dim, dim) {
                return Err(Error::InvalidModel(format!(
                    "jumps[{k}].matrix: expected {dim}x{dim}, got {}x{}",
                    jump.operator.rows(),
                    jump.operator.cols()
                )));
            }
        }
        Ok(Self {
            dim,
            hamiltonian,
            jumps,
        })
    }

    /// Model with zero Hamiltonian and no dissipation.
    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, ComplexMatrix::zeros(dim, dim), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }
}

/// Three-level laser-cooling model: `H = 0`, decay channels `|1⟩⟨2|` at rate
/// `gamma1` and `|3⟩⟨2|` at rate `gamma2` (levels 1-based, computational basis).
pub fn laser_cooling_model(gamma1: f64, gamma2: f64) -> Result<LindbladModel> {
    for (name, g) in [("gamma1", gamma1), ("gamma2", gamma2)] {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidModel(format!(
                "{name}: rate must be finite and >= 0, got {g}"
            )));
        }
    }
    LindbladModel::new(
        3,
        ComplexMatrix::zeros(3, 3),
        vec![
            Jump {
                rate: gamma1,
                operator: ComplexMatrix::ket_bra(3, 0, 1),
            },
            Jump {
                rate: gamma2,
                operator: ComplexMatrix::ket_bra(3, 2, 1),
            },
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VecConvention {
    RowStacking,
}

/// The `N²`×`N²` generator acting on row-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
    convention: VecConvention,
}

impl Superoperator {
    /// Wraps an arbitrary `N²`×`N²` matrix. Only the shape is checked; use
    /// [`Superoperator::trace_defect`] to test trace preservation.
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (dim * dim, dim * dim) {
            return Err(Error::InvalidInput(format!(
                "superoperator for dim {dim} must be {0}x{0}, got {1}x{2}",
                dim * dim,
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self {
            dim,
            matrix,
            convention: VecConvention::RowStacking,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn convention(&self) -> VecConvention {
        self.convention
    }

    /// `max |vec(I)† 𝕃|`: zero for trace-preserving generators.
    pub fn trace_defect(&self) -> f64 {
        let n = self.dim;
        (0..n * n)
            .map(|col| {
                (0..n)
                    .map(|d| self.matrix[(d * n + d, col)])
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_defect() <= TRACE_PRESERVATION_TOL * (1.0 + self.matrix.max_abs())
    }

    /// Applies 𝕃 to an `N`×`N` operator.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(x)?;
        unvec(&self.matrix.apply(&vec(x))?, self.dim)
    }

    /// Applies the Hilbert–Schmidt adjoint 𝕃* (conjugate transpose of the
    /// matrix under row-stacking) to an `N`×`N` operator.
    pub fn apply_dual(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_operand(x)?;
        unvec(&self.matrix.adjoint().apply(&vec(x))?, self.dim)
    }

    /// `exp(t 𝕃)` as an `N²`×`N²` matrix.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "evolution time must be finite and >= 0, got {t}"
            )));
        }
        expm(&self.matrix.scale_real(t))
    }

    fn check_operand(&self, x: &ComplexMatrix) -> Result<()> {
        if x.shape() != (self.dim, self.dim) {
            return Err(Error::ShapeMismatch {
                op: "superoperator",
                left: (self.dim, self.dim),
                right: x.shape(),
            });
        }
        Ok(())
    }
}

/// Builds the vectorized generator of `model`.
pub fn build_generator(model: &LindbladModel) -> Result<Superoperator> {
    let n = model.dim();
    let ident = ComplexMatrix::identity(n);
    let h = model.hamiltonian();
    let neg_i = C64::new(0.0, -1.0);
    let mut gen = (&kron(h, &ident) - &kron(&ident, &h.transpose())).scale(neg_i);

    for jump in model.jumps() {
        if jump.rate == 0.0 {
            continue;
        }
        let l = &jump.operator;
        let ldag_l = &l.adjoint() * l;
        let mut term = kron(l, &l.conj());
        let anti = &kron(&ldag_l, &ident) + &kron(&ident, &ldag_l.transpose());
        term = &term - &anti.scale_real(0.5);
        gen += &term.scale_real(jump.rate);
    }

    let sup = Superoperator::from_matrix(n, gen)?;
    if !sup.is_trace_preserving() {
        return Err(Error::Numerical(format!(
            "generator is not trace preserving (defect {:e})",
            sup.trace_defect()
        )));
    }
    Ok(sup)
}

/// Hermitian, unit-trace, positive semidefinite `N`×`N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_floor(matrix, STATE_EIGEN_FLOOR)
    }

    fn with_floor(matrix: ComplexMatrix, floor: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() == 0 {
            return Err(Error::InvalidState(format!(
                "expected a non-empty square matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let atol = ToleranceConfig::default().hermiticity_atol;
        if !matrix.is_hermitian(atol) {
            return Err(Error::InvalidState(format!(
                "not hermitian (max |ρ - ρ†| = {:e})",
                matrix.hermiticity_deviation()
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_ATOL {
            return Err(Error::InvalidState(format!(
                "trace is {} (expected 1)",
                tr.re
            )));
        }
        let min_eig = algebra::hermitian_eigenvalues(&matrix)?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < floor {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:e} below floor {floor:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix known to be hermitian with unit trace but not
    /// necessarily positive (unprojected reconstructions).
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// Pure state `|k⟩⟨k|` (0-based).
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        Self::new(ComplexMatrix::ket_bra(dim, k, k))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        algebra::hermitian_eigenvalues(&self.matrix)
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        algebra::hs_inner(&self.matrix, &self.matrix)
            .expect("square")
            .re
    }
}

/// Evolves `rho0` for time `t` under `gen`: `unvec(exp(t𝕃) vec(ρ₀))`.
pub fn evolve(gen: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if rho0.dim() != gen.dim() {
        return Err(Error::ShapeMismatch {
            op: "evolve",
            left: (gen.dim(), gen.dim()),
            right: rho0.matrix().shape(),
        });
    }
    let prop = gen.propagator(t)?;
    evolve_with(&prop, rho0)
}

/// Applies a precomputed propagator `exp(t𝕃)` to a state.
pub fn evolve_with(propagator: &ComplexMatrix, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let n = rho0.dim();
    if propagator.shape() != (n * n, n * n) {
        return Err(Error::ShapeMismatch {
            op: "evolve",
            left: propagator.shape(),
            right: rho0.matrix().shape(),
        });
    }
    let out = unvec(&propagator.apply(&vec(rho0.matrix()))?, n)?.hermitian_part();
    DensityMatrix::with_floor(out, EVOLVE_EIGEN_FLOOR).map_err(|e| {
        Error::Numerical(format!(
            "evolved state violates density-matrix invariants: {e}"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// The 9×9 generator written out entry by entry (1-based positions).
    fn laser_cooling_golden(g1: f64, g2: f64) -> ComplexMatrix {
        let s = g1 + g2;
        let mut m = ComplexMatrix::zeros(9, 9);
        m[(0, 4)] = r(g1);
        m[(8, 4)] = r(g2);
        m[(4, 4)] = r(-s);
        for d in [1, 3, 5, 7] {
            m[(d, d)] = r(-0.5 * s);
        }
        m
    }

    #[test]
    fn laser_cooling_jumps_sit_in_computational_basis() {
        let m = laser_cooling_model(1.0, 2.0).unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(m.hamiltonian(), &ComplexMatrix::zeros(3, 3));
        let j = m.jumps();
        assert_eq!(j.len(), 2);
        assert_eq!((j[0].rate, j[1].rate), (1.0, 2.0));
        assert_eq!(j[0].operator, ComplexMatrix::ket_bra(3, 0, 1));
        assert_eq!(j[1].operator, ComplexMatrix::ket_bra(3, 2, 1));
    }

    #[test]
    fn laser_cooling_rejects_negative_rate() {
        assert!(matches!(
            laser_cooling_model(-1.0, 2.0),
            Err(Error::InvalidModel(_))
        ));
        assert!(laser_cooling_model(1.0, f64::NAN).is_err());
    }

    #[test]
    fn generator_matches_golden_matrix() {
        for (g1, g2) in [(1.0, 2.0), (0.5, 0.5), (3.0, 0.0), (0.0, 0.0), (1.0, 0.0)] {
            let gen = build_generator(&laser_cooling_model(g1, g2).unwrap()).unwrap();
            assert_eq!(gen.matrix(), &laser_cooling_golden(g1, g2), "({g1},{g2})");
            assert_eq!(gen.convention(), VecConvention::RowStacking);
        }
    }

    #[test]
    fn hamiltonian_commutator_oracle() {
        let h = ComplexMatrix::from_diag(&[r(1.0), r(-1.0)]);
        let model = LindbladModel::new(2, h.clone(), vec![]).unwrap();
        let gen = build_generator(&model).unwrap();
        let x = ComplexMatrix::ket_bra(2, 0, 1);
        // oracle: -i[H, X] directly
        let comm = (&(&h * &x) - &(&x * &h)).scale(C64::new(0.0, -1.0));
        let got = gen.apply(&x).unwrap();
        assert!(got.max_abs_diff(&comm) < 1e-15);
        assert!(got.max_abs_diff(&x.scale(C64::new(0.0, -2.0))) < 1e-15);
    }

    #[test]
    fn dissipator_matches_direct_formula() {
        let mut rng = crate::random::seeded_rng(19);
        for n in 2..=4 {
            let model = crate::random::random_model(n, &mut rng);
            let gen = build_generator(&model).unwrap();
            let x = crate::random::complex_gaussian_matrix(n, n, &mut rng);
            let h = model.hamiltonian();
            let mut want = (&(h * &x) - &(&x * h)).scale(C64::new(0.0, -1.0));
            for j in model.jumps() {
                let l = &j.operator;
                let ld = l.adjoint();
                let ldl = &ld * l;
                let d = &(&(l * &x) * &ld) - &(&(&ldl * &x) + &(&x * &ldl)).scale_real(0.5);
                want += &d.scale_real(j.rate);
            }
            assert!(gen.apply(&x).unwrap().max_abs_diff(&want) < 1e-12);
            assert!(gen.is_trace_preserving());
        }
    }

    #[test]
    fn zero_model_gives_zero_generator() {
        let gen = build_generator(&LindbladModel::zero(3).unwrap()).unwrap();
        assert_eq!(gen.matrix(), &ComplexMatrix::zeros(9, 9));
    }

    #[test]
    fn model_validation_names_fields() {
        let bad_h = ComplexMatrix::ket_bra(2, 0, 1);
        let err = LindbladModel::new(2, bad_h, vec![]).unwrap_err();
        assert!(err.to_string().contains("hamiltonian"));
        let err = LindbladModel::new(
            2,
            ComplexMatrix::zeros(2, 2),
            vec![Jump {
                rate: 1.0,
                operator: ComplexMatrix::zeros(3, 3),
            }],
        )
        .unwrap_err();
        assert!(err.to_string().contains("jumps[0].matrix"));
        let err = LindbladModel::new(
            2,
            ComplexMatrix::zeros(2, 2),
            vec![Jump {
                rate: -0.1,
                operator: ComplexMatrix::zeros(2, 2),
            }],
        )
        .unwrap_err();
        assert!(err.to_string().contains("jumps[0].rate"));
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let gen = build_generator(&laser_cooling_model(1.0, 2.0).unwrap()).unwrap();
        let rho = crate::random::random_density(3, &mut crate::random::seeded_rng(1));
        let out = evolve(&gen, &rho, 0.0).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn excited_state_decay_closed_form() {
        let (g1, g2) = (1.0, 2.0);
        let s = g1 + g2;
        let gen = build_generator(&laser_cooling_model(g1, g2).unwrap()).unwrap();
        let rho0 = DensityMatrix::basis_state(3, 1).unwrap();
        for t in [0.01, 0.3, 1.0, 2.5, 7.0] {
            let out = evolve(&gen, &rho0, t).unwrap();
            let e = (-s * t).exp();
            let want =
                ComplexMatrix::from_diag(&[r(g1 / s * (1.0 - e)), r(e), r(g2 / s * (1.0 - e))]);
            assert!(out.matrix().max_abs_diff(&want) < 1e-10, "t={t}");
        }
        let out = evolve(&gen, &rho0, 100.0 / s).unwrap();
        let want = ComplexMatrix::from_diag(&[r(g1 / s), r(0.0), r(g2 / s)]);
        assert!(out.matrix().max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn evolve_errors() {
        let gen = build_generator(&laser_cooling_model(1.0, 2.0).unwrap()).unwrap();
        let rho2 = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(matches!(
            evolve(&gen, &rho2, 1.0),
            Err(Error::ShapeMismatch { .. })
        ));
        let rho3 = DensityMatrix::basis_state(3, 0).unwrap();
        assert!(evolve(&gen, &rho3, -1.0).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_diag(&[r(1.5), r(-0.5)])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::ket_bra(2, 0, 1)).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(2).scale_real(0.5)).is_ok());
    }
}
