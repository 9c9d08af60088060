//! Quantum operations given by operator decompositions.

use crate::error::{Error, Result};
use crate::linalg::{
    check_finite, complete_to_unitary, default_hermitian_tol, eig_hermitian, eigvals_hermitian,
    hermitian_part, hermiticity_defect, identity, is_positive_definite, kron, matmul, max_abs_diff,
    partial_trace, psd_order, sqrt_psd, trace, unitarity_defect, ComplexMatrix, ComplexVector,
    TAU_PSD,
};
use crate::superop::{ReferenceFrame, Superoperator};

/// Probabilities at or below this floor cannot be normalized away.
pub const TAU_PROB: f64 = 1e-12;

/// Environment eigenvalues at or below this floor contribute no Kraus operators.
pub const ENV_EIGENVALUE_FLOOR: f64 = 1e-14;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "matrix is {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_finite(&matrix)?;
        let defect = hermiticity_defect(&matrix);
        if defect > 1e-12 {
            return Err(Error::InvalidState(format!(
                "not Hermitian (asymmetry {defect:e})"
            )));
        }
        let tr = trace(&matrix).re;
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let matrix = hermitian_part(&matrix);
        let shifted = &matrix + identity(matrix.nrows()).scale(1e-10);
        if !is_positive_definite(&shifted) {
            let min = eigvals_hermitian(&matrix)?.last().copied().unwrap_or(0.0);
            if min < -1e-10 {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(DensityOperator { matrix })
    }

    /// Symmetrizes and rescales to unit trace before validating.
    pub fn normalized(matrix: &ComplexMatrix) -> Result<Self> {
        let h = hermitian_part(matrix);
        let tr = trace(&h).re;
        if tr <= TAU_PROB {
            return Err(Error::ZeroProbability(tr));
        }
        Self::new(h.unscale(tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator {
            matrix: identity(dim).unscale(dim as f64),
        }
    }

    pub fn pure(state: &ComplexVector) -> Result<Self> {
        let norm = state.norm();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = state.unscale(norm);
        Self::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn sqrt(&self) -> ComplexMatrix {
        sqrt_psd(&self.matrix).expect("validated density operator")
    }
}

/// Trace-nonincreasing operation `A ↦ Σ_α A_α A A_α†`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOperation {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumOperation {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = kraus.first().map(|a| a.nrows()).ok_or_else(|| {
            Error::DimensionMismatch("operation needs at least one operator".into())
        })?;
        for a in &kraus {
            if a.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "decomposition operator is {}x{}, expected {dim}x{dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            check_finite(a)?;
        }
        let op = QuantumOperation { dim, kraus };
        // A Cholesky factor of (1+τ)1 - Σ A†A exists exactly when the bound
        // holds strictly; the eigenvalues settle the borderline cases.
        let completeness = op.completeness();
        let slack = identity(dim).scale(1.0 + TAU_PSD) - &completeness;
        if !is_positive_definite(&slack) {
            let top = eigvals_hermitian(&completeness)?
                .first()
                .copied()
                .unwrap_or(0.0);
            if top > 1.0 + TAU_PSD {
                return Err(Error::NotTraceNonincreasing(top));
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `Σ_α A_α†A_α`, which is the adjoint map applied to the identity.
    pub fn completeness(&self) -> ComplexMatrix {
        let sum = self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, a| {
                acc + matmul(&a.adjoint(), a)
            });
        hermitian_part(&sum)
    }

    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        max_abs_diff(&self.completeness(), &identity(self.dim)) <= tol
    }

    pub fn superoperator(&self) -> Superoperator {
        Superoperator::from_kraus(&self.kraus).expect("validated operators")
    }

    fn check_state(&self, rho: &ComplexMatrix) -> Result<()> {
        if rho.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, operation acts on dimension {}",
                rho.nrows(),
                rho.ncols(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `Σ_α A_α ρ A_α†`.
    pub fn apply_unnormalized(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        Ok(self
            .kraus
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, a| {
                acc + matmul(&matmul(a, rho), &a.adjoint())
            }))
    }

    /// `tr(ρ Σ_α A_α†A_α)`.
    pub fn probability(&self, rho: &ComplexMatrix) -> Result<f64> {
        self.check_state(rho)?;
        Ok(trace(&(rho * self.completeness())).re)
    }

    fn probability_above_floor(&self, rho: &DensityOperator) -> Result<f64> {
        let p = self.probability(rho.matrix())?;
        if p <= TAU_PROB {
            return Err(Error::ZeroProbability(p));
        }
        Ok(p)
    }

    /// Output state conditioned on the operation having occurred.
    pub fn apply_normalized(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.probability_above_floor(rho)?;
        DensityOperator::normalized(&self.apply_unnormalized(rho.matrix())?)
    }

    /// Decomposition operators `A_α √ρ / √p` of the joint-state superoperator.
    pub fn a_rho_kraus(&self, rho: &DensityOperator) -> Result<Vec<ComplexMatrix>> {
        self.check_state(rho.matrix())?;
        let p = self.probability_above_floor(rho)?;
        let root = rho.sqrt();
        let norm = p.sqrt();
        Ok(self
            .kraus
            .iter()
            .map(|a| (a * &root).unscale(norm))
            .collect())
    }

    /// `𝒜_ρ = 𝒜 ∘ (√ρ ⊗ √ρ) / tr 𝒜(ρ)`.
    pub fn a_rho(&self, rho: &DensityOperator) -> Result<Superoperator> {
        Superoperator::from_kraus(&self.a_rho_kraus(rho)?)
    }

    /// Nonzero spectrum of `𝒜_ρ`, descending.
    ///
    /// Computed from the Gram matrix `G_{αβ} = tr(ρ A_α†A_β) / p` of the
    /// decomposition operators, which shares its nonzero eigenvalues with
    /// the `D² × D²` left-right matrix.
    pub fn a_rho_spectrum(&self, rho: &DensityOperator) -> Result<Vec<f64>> {
        let gram = self.a_rho_gram(rho)?;
        eigvals_hermitian(&gram)
    }

    pub fn a_rho_gram(&self, rho: &DensityOperator) -> Result<ComplexMatrix> {
        self.check_state(rho.matrix())?;
        let p = self.probability_above_floor(rho)?;
        let n = self.kraus.len();
        let rho_m = rho.matrix();
        let mut gram = ComplexMatrix::zeros(n, n);
        for a in 0..n {
            let left = self.kraus[a].adjoint();
            for b in a..n {
                let g = trace(&(rho_m * &left * &self.kraus[b])) / p;
                gram[(a, b)] = g;
                gram[(b, a)] = g.conj();
            }
        }
        Ok(gram)
    }

    /// Orthogonal eigen-decomposition `𝒜_ρ = Σ λ_α τ_α ⊗ τ_α†` with unit-norm
    /// eigen-operators, descending in `λ`, for eigenvalues above `1e-12 · λ_max`.
    pub fn a_rho_eigenoperators(&self, rho: &DensityOperator) -> Result<Vec<(f64, ComplexMatrix)>> {
        let gram = self.a_rho_gram(rho)?;
        let eig = eig_hermitian(&gram, default_hermitian_tol(&gram))?;
        let kraus = self.a_rho_kraus(rho)?;
        let cutoff = 1e-12 * eig.max().max(0.0);
        let mut out = Vec::new();
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda <= cutoff || lambda <= 0.0 {
                continue;
            }
            let c = eig.vector(k);
            let tau = kraus
                .iter()
                .zip(c.iter())
                .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, (op, &w)| {
                    acc + op.map(|z| z * w)
                });
            out.push((lambda, tau.unscale(lambda.sqrt())));
        }
        Ok(out)
    }

    /// `σ = √ρ (Σ_α A_α†A_α) √ρ / p`, the reduced input state seen by the
    /// reference once the operation has occurred.
    pub fn sigma(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.check_state(rho.matrix())?;
        let p = self.probability_above_floor(rho)?;
        let root = rho.sqrt();
        DensityOperator::normalized(&(&root * self.completeness() * &root).unscale(p))
    }

    /// State of the reference after the operation: the transpose of `σ`
    /// with respect to the frame bases.
    pub fn reference_state_after(
        &self,
        rho: &DensityOperator,
        frame: &ReferenceFrame,
    ) -> Result<DensityOperator> {
        let sigma = self.sigma(rho)?;
        DensityOperator::normalized(&frame.transpose_to_reference(sigma.matrix())?)
    }

    /// Unitary coupling to a pure environment that realizes this operation.
    ///
    /// The environment has one level per decomposition operator, starts in
    /// `|0⟩`, and is fully observed. The coupling maps `|ψ⟩ ⊗ |0⟩` to
    /// `Σ_α A_α|ψ⟩ ⊗ |α⟩`; the remaining columns come from orthonormalizing
    /// the standard basis against those.
    pub fn dilate(&self) -> Result<EnvironmentModel> {
        let deviation = max_abs_diff(&self.completeness(), &identity(self.dim));
        if deviation > 1e-10 {
            return Err(Error::NotTracePreserving(deviation));
        }
        let d = self.dim;
        let n = self.kraus.len();
        let total = d * n;
        let mut iso = ComplexMatrix::zeros(total, d);
        for (alpha, a) in self.kraus.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    iso[(i * n + alpha, j)] = a[(i, j)];
                }
            }
        }
        let completed = complete_to_unitary(&iso)?;
        // Place the isometry's columns at |j⟩⊗|0⟩ and the completion elsewhere.
        let mut unitary = ComplexMatrix::zeros(total, total);
        let mut spare = d;
        for col in 0..total {
            let source = if col % n == 0 {
                col / n
            } else {
                spare += 1;
                spare - 1
            };
            unitary.set_column(col, &completed.column(source));
        }
        let mut env_state = ComplexMatrix::zeros(n, n);
        env_state[(0, 0)] = crate::linalg::c64(1.0, 0.0);
        EnvironmentModel::new(d, unitary, env_state, identity(n))
    }
}

/// System coupled unitarily to an environment, with the environment
/// observed on a subspace afterwards. Tensor ordering is system ⊗ environment.
#[derive(Debug, Clone)]
pub struct EnvironmentModel {
    system_dim: usize,
    env_dim: usize,
    unitary: ComplexMatrix,
    env_state: ComplexMatrix,
    observation: ComplexMatrix,
}

impl EnvironmentModel {
    /// `observation` holds the orthonormal vectors `|g_k⟩` as columns.
    pub fn new(
        system_dim: usize,
        unitary: ComplexMatrix,
        env_state: ComplexMatrix,
        observation: ComplexMatrix,
    ) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidModel(m));
        if system_dim == 0 || !env_state.is_square() || env_state.nrows() == 0 {
            return invalid("system and environment dimensions must be positive".into());
        }
        let env_dim = env_state.nrows();
        let total = system_dim * env_dim;
        if unitary.shape() != (total, total) {
            return invalid(format!(
                "coupling is {}x{}, expected {total}x{total}",
                unitary.nrows(),
                unitary.ncols()
            ));
        }
        check_finite(&unitary)?;
        check_finite(&env_state)?;
        check_finite(&observation)?;
        let udef = unitarity_defect(&unitary);
        if udef > 1e-10 {
            return invalid(format!("coupling is not unitary (defect {udef:e})"));
        }
        let tr = trace(&env_state).re;
        if (tr - 1.0).abs() > 1e-12 {
            return invalid(format!("environment state has trace {tr}"));
        }
        let hdef = hermiticity_defect(&env_state);
        if hdef > 1e-12 {
            return invalid(format!("environment state is not Hermitian ({hdef:e})"));
        }
        let min = eigvals_hermitian(&env_state)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -1e-10 {
            return invalid(format!("environment state has negative eigenvalue {min:e}"));
        }
        if observation.nrows() != env_dim || observation.ncols() > env_dim {
            return invalid(format!(
                "observation basis is {}x{} for environment dimension {env_dim}",
                observation.nrows(),
                observation.ncols()
            ));
        }
        let overlap = observation.adjoint() * &observation;
        if max_abs_diff(&overlap, &identity(observation.ncols())) > 1e-10 {
            return invalid("observation vectors are not orthonormal".into());
        }
        Ok(EnvironmentModel {
            system_dim,
            env_dim,
            unitary,
            env_state: hermitian_part(&env_state),
            observation,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn env_state(&self) -> &ComplexMatrix {
        &self.env_state
    }

    pub fn observation_basis(&self) -> &ComplexMatrix {
        &self.observation
    }

    /// Projector `P^E` onto the observed environment subspace.
    pub fn env_projector(&self) -> ComplexMatrix {
        &self.observation * self.observation.adjoint()
    }

    /// `tr_E[(1 ⊗ P^E) U (ρ ⊗ ρ^E) U† (1 ⊗ P^E)]`, computed on the joint space.
    pub fn post_state(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.system_dim, self.system_dim) {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let p = kron(&identity(self.system_dim), &self.env_projector());
        let joint = &p * &self.unitary * kron(rho, &self.env_state) * self.unitary.adjoint() * &p;
        partial_trace(&joint, &[self.system_dim, self.env_dim], &[0])
    }

    /// Decomposition operators `A_{kl} = √λ_l ⟨g_k|U|φ_l⟩`, ordered with `k` major.
    pub fn kraus(&self) -> Result<QuantumOperation> {
        let (d, de) = (self.system_dim, self.env_dim);
        let eig = eig_hermitian(&self.env_state, default_hermitian_tol(&self.env_state))?;
        let mut kraus = Vec::new();
        for k in 0..self.observation.ncols() {
            let g = self.observation.column(k);
            for (l, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda <= ENV_EIGENVALUE_FLOOR {
                    continue;
                }
                let phi = eig.vector(l);
                let weight = lambda.sqrt();
                let a = ComplexMatrix::from_fn(d, d, |i, j| {
                    let mut acc = crate::linalg::c64(0.0, 0.0);
                    for x in 0..de {
                        let gx = g[x].conj();
                        if gx.norm_sqr() == 0.0 {
                            continue;
                        }
                        for y in 0..de {
                            acc += gx * self.unitary[(i * de + x, j * de + y)] * phi[y];
                        }
                    }
                    acc * weight
                });
                kraus.push(a);
            }
        }
        if kraus.is_empty() {
            return Err(Error::InvalidModel("no observed outcomes".into()));
        }
        QuantumOperation::new(kraus).map_err(|e| Error::InvalidModel(e.to_string()))
    }
}

/// Checks `σ ≤ ρ / p` for an operation and input state.
pub fn sigma_bounded_by_input(
    op: &QuantumOperation,
    rho: &DensityOperator,
    tol: f64,
) -> Result<bool> {
    let p = op.probability(rho.matrix())?;
    if p <= TAU_PROB {
        return Err(Error::ZeroProbability(p));
    }
    let sigma = op.sigma(rho)?;
    psd_order(&rho.matrix().unscale(p), sigma.matrix(), tol)
}
