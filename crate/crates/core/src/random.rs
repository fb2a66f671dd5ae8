//! Seeded random sampling of matrices, states and models.
//!
//! All sampling goes through [`ChaCha8Rng`] so that a seed fixes every draw
//! on every platform. Independent substreams (one per search attempt or trial)
//! are derived with [`substream`], which keeps results independent of the
//! order in which attempts are evaluated.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::ComplexMatrix;
use crate::model::{DensityMatrix, Jump, LindbladModel};

pub type StreamRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn complex_gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `(G + G†) / 2` with i.i.d. complex Gaussian `G`.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    complex_gaussian_matrix(n, n, rng).hermitian_part()
}

/// `G G† / tr(G G†)`: full-rank with probability one.
pub fn random_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = complex_gaussian_matrix(n, n, rng);
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.scale_real(1.0 / tr).hermitian_part())
        .expect("normalized Wishart matrix is a valid state")
}

/// Random GKLS model: hermitian Hamiltonian, 1 to 3 complex jump operators
/// with rates uniform in `[0, 1)`.
pub fn random_model(n: usize, rng: &mut impl Rng) -> LindbladModel {
    let hamiltonian = random_hermitian(n, rng);
    let count = rng.random_range(1..=3);
    let jumps = (0..count)
        .map(|_| Jump {
            rate: rng.random::<f64>(),
            operator: complex_gaussian_matrix(n, n, rng).scale_real(0.5),
        })
        .collect();
    LindbladModel::new(n, hamiltonian, jumps).expect("random model is valid")
}
