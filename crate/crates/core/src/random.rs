//! Seeded random sampling of matrices, states and operations.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream)`, so trial
//! `k` of a randomized suite always sees the same numbers regardless of how
//! the trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{DensityOperator, QuantumOperation};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, hermitian_part, identity, polar_unitary, trace, ComplexMatrix, ComplexVector,
};
use crate::reversal::CodeSubspace;

/// Generator for substream `stream` of root seed `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_c64<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

/// Square matrix with iid standard complex Gaussian entries.
pub fn random_ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_ginibre_rect(n, n, rng)
}

pub fn random_ginibre_rect<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = random_c64(rng);
        }
    }
    m
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    hermitian_part(&random_ginibre(n, rng))
}

/// `G†G` for a Ginibre `G`.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(n, rng);
    hermitian_part(&(g.adjoint() * g))
}

/// Haar-distributed unitary (polar factor of a Ginibre matrix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_ginibre(n, rng);
    polar_unitary(&g).expect("Ginibre matrices are finite")
}

pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(n, |_, _| random_c64(rng));
    let norm = v.norm();
    v.unscale(norm)
}

/// Full-rank density operator from the Hilbert–Schmidt ensemble.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityOperator {
    let w = random_psd(n, rng);
    let t = trace(&w).re;
    DensityOperator::new(w.unscale(t)).expect("normalized PSD matrix")
}

/// Random density operator of the given rank.
pub fn random_density_of_rank<R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    rng: &mut R,
) -> DensityOperator {
    let g = random_ginibre_rect(n, rank, rng);
    let w = hermitian_part(&(&g * g.adjoint()));
    let t = trace(&w).re;
    DensityOperator::new(w.unscale(t)).expect("normalized PSD matrix")
}

/// Trace-preserving operation with `n_kraus` operators: the blocks of a random isometry.
pub fn random_channel<R: Rng + ?Sized>(
    dim: usize,
    n_kraus: usize,
    rng: &mut R,
) -> QuantumOperation {
    let stacked = random_ginibre_rect(dim * n_kraus, dim, rng);
    // Orthonormalize the columns: V = G (G†G)^{-1/2}.
    let gram = hermitian_part(&(stacked.adjoint() * &stacked));
    let inv_root = crate::linalg::inverse_sqrt_psd(&gram, 1e-14).expect("Gram matrices are PSD");
    let iso = stacked * inv_root;
    let kraus = (0..n_kraus)
        .map(|k| iso.rows(k * dim, dim).into_owned())
        .collect();
    QuantumOperation::new(kraus).expect("isometry blocks form a trace-preserving operation")
}

/// Trace-decreasing operation: a random channel followed by scaling each
/// Kraus operator by a factor in `[0.3, 1)`.
pub fn random_subchannel<R: Rng + ?Sized>(
    dim: usize,
    n_kraus: usize,
    rng: &mut R,
) -> QuantumOperation {
    let tp = random_channel(dim, n_kraus, rng);
    let kraus = tp
        .kraus()
        .iter()
        .map(|a| a.scale(rng.random_range(0.3..1.0)))
        .collect();
    QuantumOperation::new(kraus).expect("scaled-down channel stays trace-nonincreasing")
}

/// Random `n × n` unitary matrix acting on Kraus indices.
pub fn random_kraus_mixing<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    if n == 0 {
        return identity(0);
    }
    random_unitary(n, rng)
}

/// Code spanned by `logical` Haar-random orthonormal vectors.
pub fn random_code<R: Rng + ?Sized>(
    physical: usize,
    logical: usize,
    rng: &mut R,
) -> Result<CodeSubspace> {
    if logical > physical {
        return Err(Error::InvalidCode(format!(
            "{logical} code vectors in dimension {physical}"
        )));
    }
    CodeSubspace::new(
        random_unitary(physical, rng)
            .columns(0, logical)
            .into_owned(),
    )
}

/// Operation reversible on `code`: each of `n_errors` operators maps the
/// code isometrically onto its own block of a random orthonormal basis, with
/// random weights and overall scale `μ² ∈ [0.5, 1]`; the list is then mixed
/// by a random unitary on the Kraus index.
pub fn random_reversible_operation<R: Rng + ?Sized>(
    code: &CodeSubspace,
    n_errors: usize,
    rng: &mut R,
) -> Result<QuantumOperation> {
    let (big, small) = (code.physical_dim(), code.logical_dim());
    if n_errors == 0 || n_errors * small > big {
        return Err(Error::DimensionMismatch(format!(
            "{n_errors} orthogonal images of a {small}-dimensional code do not fit in dimension {big}"
        )));
    }
    let frame = random_unitary(big, rng);
    let weights: Vec<f64> = (0..n_errors).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mu_squared: f64 = rng.random_range(0.5..=1.0);
    let pure: Vec<ComplexMatrix> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| {
            (frame.columns(k * small, small) * code.isometry().adjoint())
                .scale((mu_squared * w / total).sqrt())
        })
        .collect();
    let mixing = random_kraus_mixing(n_errors, rng);
    let kraus = (0..n_errors)
        .map(|b| {
            pure.iter()
                .enumerate()
                .fold(ComplexMatrix::zeros(big, big), |acc, (a, m)| {
                    acc + m.map(|z| z * mixing[(b, a)])
                })
        })
        .collect();
    QuantumOperation::new(kraus)
}

/// Adds complex Gaussian noise of size `eps` to every operator, then
/// rescales if needed so the result stays trace-nonincreasing.
pub fn perturb_operation<R: Rng + ?Sized>(
    op: &QuantumOperation,
    eps: f64,
    rng: &mut R,
) -> QuantumOperation {
    let dim = op.dim();
    let noisy: Vec<ComplexMatrix> = op
        .kraus()
        .iter()
        .map(|a| a + random_ginibre(dim, rng).scale(eps))
        .collect();
    let completeness = noisy.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, a| {
        acc + a.adjoint() * a
    });
    let top =
        crate::linalg::eigvals_hermitian(&hermitian_part(&completeness)).expect("Hermitian")[0];
    let shrink = if top > 1.0 { 1.0 / top.sqrt() } else { 1.0 };
    QuantumOperation::new(noisy.into_iter().map(|a| a.scale(shrink)).collect())
        .expect("rescaled below the identity")
}
