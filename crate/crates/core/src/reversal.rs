//! Reversibility of operations on a code subspace.
//!
//! An operation is reversible on `C` exactly when every block
//! `P_C A_β†A_α P_C` is a common multiple of `P_C`. The multiples form a
//! positive matrix; diagonalizing it yields a canonical decomposition whose
//! operators map `C` unitarily onto mutually orthogonal images, and the
//! reversal sends each image back.

use rand::SeedableRng;

use crate::channels::{DensityOperator, QuantumOperation, TAU_PROB};
use crate::entfid::{entropy_exchange, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::linalg::{
    complete_to_unitary, default_hermitian_tol, eig_hermitian, flatten_row_major, hermitian_part,
    identity, inverse_sqrt_psd, matmul, max_abs_diff, polar_isometry, trace, ComplexMatrix,
    ComplexVector,
};
use crate::random::random_ginibre;

/// Canonical eigenvalues at or below this are dropped from the decomposition.
pub const LAMBDA_CUTOFF: f64 = 1e-12;

/// Number of random code states probed by [`verify_reversal`].
pub const VERIFY_STATES: usize = 10;

const VERIFY_SEED: u64 = 0x5eed_c0de;

/// Subspace spanned by the orthonormal columns of an isometry.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSubspace {
    isometry: ComplexMatrix,
}

impl CodeSubspace {
    pub fn new(isometry: ComplexMatrix) -> Result<Self> {
        let (big, small) = isometry.shape();
        if small == 0 || big == 0 {
            return Err(Error::DegenerateCode);
        }
        if small > big {
            return Err(Error::InvalidCode(format!(
                "{small} code vectors in dimension {big}"
            )));
        }
        crate::linalg::check_finite(&isometry)?;
        let defect = max_abs_diff(&(isometry.adjoint() * &isometry), &identity(small));
        if defect > 1e-12 {
            return Err(Error::InvalidCode(format!(
                "columns are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(CodeSubspace { isometry })
    }

    /// Code spanned by the given orthonormal vectors.
    pub fn from_vectors(vectors: &[ComplexVector]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::DegenerateCode)?;
        if vectors.iter().any(|v| v.len() != first.len()) {
            return Err(Error::InvalidCode(
                "code vectors of different lengths".into(),
            ));
        }
        Self::new(ComplexMatrix::from_columns(vectors))
    }

    pub fn physical_dim(&self) -> usize {
        self.isometry.nrows()
    }

    pub fn logical_dim(&self) -> usize {
        self.isometry.ncols()
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    pub fn projector(&self) -> ComplexMatrix {
        hermitian_part(&(&self.isometry * self.isometry.adjoint()))
    }

    /// `P_C / d`.
    pub fn maximally_mixed(&self) -> DensityOperator {
        DensityOperator::normalized(&self.projector()).expect("nonzero projector")
    }

    /// Embeds a logical density matrix: `W ρ W†`.
    pub fn embed(&self, logical: &ComplexMatrix) -> Result<DensityOperator> {
        if logical.shape() != (self.logical_dim(), self.logical_dim()) {
            return Err(Error::DimensionMismatch(format!(
                "logical state is {}x{}, code dimension is {}",
                logical.nrows(),
                logical.ncols(),
                self.logical_dim()
            )));
        }
        DensityOperator::normalized(&(&self.isometry * logical * self.isometry.adjoint()))
    }

    /// Random mixed state supported in the code.
    pub fn random_state<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> DensityOperator {
        let g = random_ginibre(self.logical_dim(), rng);
        self.embed(&(g.adjoint() * g))
            .expect("Gram matrices are PSD")
    }

    fn check_operation(&self, op: &QuantumOperation) -> Result<()> {
        if op.dim() != self.physical_dim() {
            return Err(Error::DimensionMismatch(format!(
                "operation acts on dimension {}, code lives in dimension {}",
                op.dim(),
                self.physical_dim()
            )));
        }
        Ok(())
    }
}

/// Outcome of the algebraic reversibility test.
#[derive(Debug, Clone)]
pub struct ReversibilityReport {
    pub reversible: bool,
    pub mu_squared: f64,
    /// Unit-trace matrix `m_{αβ}` with `P_C A_β†A_α P_C ≈ μ² m_{αβ} P_C`.
    pub m_matrix: ComplexMatrix,
    /// Largest Frobenius distance between a block and its best multiple of `P_C`.
    pub max_violation: f64,
}

/// Reads `μ² m_{αβ} = tr(P_C A_β†A_α P_C) / d` and measures how far each
/// block is from being that multiple of `P_C`.
pub fn check_algebraic_reversibility(
    op: &QuantumOperation,
    code: &CodeSubspace,
    tol: f64,
) -> Result<ReversibilityReport> {
    code.check_operation(op)?;
    let d = code.logical_dim();
    let restricted: Vec<ComplexMatrix> = op.kraus().iter().map(|a| a * code.isometry()).collect();
    let n = restricted.len();
    let mut m = ComplexMatrix::zeros(n, n);
    let mut violation: f64 = 0.0;
    let one = identity(d);
    for alpha in 0..n {
        for beta in 0..n {
            let block = restricted[beta].adjoint() * &restricted[alpha];
            let value = trace(&block) / d as f64;
            m[(alpha, beta)] = value;
            violation = violation.max((block - one.map(|z| z * value)).norm());
        }
    }
    let mu_squared = trace(&m).re;
    if mu_squared <= TAU_PROB {
        return Err(Error::ZeroRestriction(mu_squared));
    }
    let m_matrix = hermitian_part(&m.unscale(mu_squared));
    let min_eig = eig_hermitian(&m_matrix, default_hermitian_tol(&m_matrix))?.min();
    let reversible = violation <= tol * code.physical_dim() as f64 && min_eig >= -tol;
    Ok(ReversibilityReport {
        reversible,
        mu_squared,
        m_matrix,
        max_violation: violation,
    })
}

/// Decomposition adapted to the code: `Ã_α P_C = μ √λ_α U_α P_C` with the
/// images `P_α = U_α P_C U_α†` mutually orthogonal.
#[derive(Debug, Clone)]
pub struct CanonicalDecomposition {
    pub lambdas: Vec<f64>,
    pub canonical_kraus: Vec<ComplexMatrix>,
    pub unitaries: Vec<ComplexMatrix>,
    pub image_projectors: Vec<ComplexMatrix>,
    pub mu_squared: f64,
    pub code: CodeSubspace,
}

impl CanonicalDecomposition {
    /// `P_N = Σ_α P_α`.
    pub fn image_projector(&self) -> ComplexMatrix {
        let dim = self.code.physical_dim();
        self.image_projectors
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, p| acc + p)
    }
}

pub fn canonical_decomposition(
    op: &QuantumOperation,
    code: &CodeSubspace,
    tol: f64,
) -> Result<CanonicalDecomposition> {
    let report = check_algebraic_reversibility(op, code, tol)?;
    if !report.reversible {
        return Err(Error::NotReversible(report.max_violation));
    }
    let eig = eig_hermitian(&report.m_matrix, default_hermitian_tol(&report.m_matrix))?;
    let mut out = CanonicalDecomposition {
        lambdas: Vec::new(),
        canonical_kraus: Vec::new(),
        unitaries: Vec::new(),
        image_projectors: Vec::new(),
        mu_squared: report.mu_squared,
        code: code.clone(),
    };
    let dim = op.dim();
    let code_frame = complete_to_unitary(code.isometry())?;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= tol.max(LAMBDA_CUTOFF) {
            continue;
        }
        let u = eig.vector(k);
        let combined = op
            .kraus()
            .iter()
            .zip(u.iter())
            .fold(ComplexMatrix::zeros(dim, dim), |acc, (a, w)| {
                acc + a.map(|z| z * w.conj())
            });
        // Polar factor of Ã P_C on its support, extended to a full unitary.
        let on_code = polar_isometry(&(&combined * code.isometry()))?;
        let unitary = matmul(&complete_to_unitary(&on_code)?, &code_frame.adjoint());
        let image = hermitian_part(&(&on_code * on_code.adjoint()));
        out.lambdas.push(lambda);
        out.canonical_kraus.push(combined);
        out.unitaries.push(unitary);
        out.image_projectors.push(image);
    }
    Ok(out)
}

/// Reversal with decomposition operators `U_α† P_α`.
pub fn reversal_operation(canon: &CanonicalDecomposition) -> QuantumOperation {
    let kraus = canon
        .unitaries
        .iter()
        .zip(&canon.image_projectors)
        .map(|(u, p)| matmul(&u.adjoint(), p))
        .collect();
    QuantumOperation::new(kraus).expect("orthogonal images give a trace-nonincreasing reversal")
}

/// How closely a candidate reversal undoes an operation on the code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReversalCheck {
    pub mu_squared: f64,
    /// Largest entry of `ℛ∘𝒜_C - μ² P_C ⊗ P_C` over code-basis inputs.
    pub composition_deviation: f64,
    /// Largest entry of `ℛ(ρ′) - ρ` over random code states.
    pub state_deviation: f64,
}

impl ReversalCheck {
    pub fn max_deviation(&self) -> f64 {
        self.composition_deviation.max(self.state_deviation)
    }

    pub fn certifies(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

/// Composes `reversal ∘ op` on inputs supported in the code and compares with
/// `μ²` times the identity there; also checks that normalized outputs of
/// random code states are mapped back to the inputs.
pub fn verify_reversal(
    reversal: &QuantumOperation,
    op: &QuantumOperation,
    code: &CodeSubspace,
) -> Result<ReversalCheck> {
    code.check_operation(op)?;
    code.check_operation(reversal)?;
    let w = code.isometry();
    let (big, small) = w.shape();
    let mu_squared = op
        .kraus()
        .iter()
        .map(|a| (a * w).norm_squared())
        .sum::<f64>()
        / small as f64;
    if mu_squared <= TAU_PROB {
        return Err(Error::ZeroRestriction(mu_squared));
    }

    // Entry ((l,a),(m,b)) is ⟨l| ℛ∘𝒜(W|a⟩⟨b|W†) |m⟩.
    let size = big * small;
    let mut composed = ComplexMatrix::zeros(size, size);
    let one = crate::linalg::c64(1.0, 0.0);
    let damaged: Vec<ComplexMatrix> = op.kraus().iter().map(|a| a * w).collect();
    let mut chains = Vec::with_capacity(damaged.len() * reversal.kraus().len());
    for r in reversal.kraus() {
        for aw in &damaged {
            let chain = r * aw;
            let flat = flatten_row_major(&chain);
            composed.ger(one, &flat, &flat.conjugate(), one);
            chains.push(chain);
        }
    }
    let code_flat = flatten_row_major(w);
    let target = (&code_flat * code_flat.adjoint()).scale(mu_squared);
    let composition_deviation = max_abs_diff(&composed, &target);

    // Code states W σ W† are pushed through in factored form.
    let through = |ops: &[ComplexMatrix], sigma: &ComplexMatrix| {
        ops.iter().fold(ComplexMatrix::zeros(big, big), |acc, k| {
            acc + k * sigma * k.adjoint()
        })
    };
    let mut state_deviation: f64 = 0.0;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(VERIFY_SEED);
    for _ in 0..VERIFY_STATES {
        let g = random_ginibre(small, &mut rng);
        let sigma = g.adjoint() * &g;
        let sigma = sigma.unscale(trace(&sigma).re);
        let p = trace(&through(&damaged, &sigma)).re;
        if p <= TAU_PROB {
            return Err(Error::ZeroProbability(p));
        }
        let back = through(&chains, &sigma).unscale(p);
        state_deviation = state_deviation.max(max_abs_diff(&back, &(w * &sigma * w.adjoint())));
    }
    Ok(ReversalCheck {
        mu_squared,
        composition_deviation,
        state_deviation,
    })
}

/// Decomposition operators `√ρ A_α† / √p` of the ordinary adjoint of `𝒜_ρ`.
///
/// This adjoint is the reversal already sandwiched by the output state,
/// `ℛ ∘ (√ρ′ ⊗ √ρ′)`.
pub fn a_rho_adjoint_kraus(
    op: &QuantumOperation,
    rho: &DensityOperator,
    tol: f64,
) -> Result<Vec<ComplexMatrix>> {
    op.a_rho(rho)?.ordinary_adjoint().kraus(tol)
}

/// Reversal read off from the adjoint of `𝒜_ρ` for a state `ρ` whose support
/// is the whole code: each adjoint decomposition operator is multiplied on
/// the right by the pseudo-inverse square root of `ρ′`.
pub fn reversal_via_adjoint(
    op: &QuantumOperation,
    code: &CodeSubspace,
    rho: &DensityOperator,
    tol: f64,
) -> Result<QuantumOperation> {
    let report = check_algebraic_reversibility(op, code, tol)?;
    if !report.reversible {
        return Err(Error::NotReversible(report.max_violation));
    }
    let projector = code.projector();
    let outside = max_abs_diff(&(&projector * rho.matrix() * &projector), rho.matrix());
    if outside > 1e-10 {
        return Err(Error::InvalidState(format!(
            "state leaks outside the code ({outside:e})"
        )));
    }
    let logical = code.isometry().adjoint() * rho.matrix() * code.isometry();
    let smallest = eig_hermitian(&logical, default_hermitian_tol(&logical))?.min();
    if smallest <= 1e-10 {
        return Err(Error::InvalidState(format!(
            "state does not cover the whole code (smallest weight {smallest:e})"
        )));
    }
    let output = op.apply_normalized(rho)?;
    let unsandwich = inverse_sqrt_psd(output.matrix(), 1e-12)?;
    let kraus = a_rho_adjoint_kraus(op, rho, tol)?
        .into_iter()
        .map(|k| k * &unsandwich)
        .collect();
    QuantumOperation::new(kraus)
}

/// Verdicts of the two information-theoretic conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoConditions {
    /// `P_C 𝒜^×(1) P_C = μ² P_C`.
    pub cond1: bool,
    pub mu_squared: f64,
    /// `S(ρ) = S(ρ′) - S_e` at `ρ = P_C / d`.
    pub cond2: bool,
    /// `S(ρ′) - S_e - S(ρ)` in bits.
    pub entropy_gap: f64,
}

impl InfoConditions {
    pub fn holds(&self) -> bool {
        self.cond1 && self.cond2
    }
}

pub fn check_info_conditions(
    op: &QuantumOperation,
    code: &CodeSubspace,
    tol: f64,
    entropy_tol: f64,
) -> Result<InfoConditions> {
    code.check_operation(op)?;
    let projector = code.projector();
    let squeezed = &projector * op.completeness() * &projector;
    let mu_squared = trace(&squeezed).re / code.logical_dim() as f64;
    if mu_squared <= TAU_PROB {
        return Err(Error::ZeroRestriction(mu_squared));
    }
    let cond1 = max_abs_diff(&squeezed, &projector.scale(mu_squared)) <= tol;

    let rho = code.maximally_mixed();
    let output = op.apply_normalized(&rho)?;
    let entropy_gap =
        von_neumann_entropy(&output) - entropy_exchange(op, &rho)? - von_neumann_entropy(&rho);
    let cond2 = entropy_gap.abs() <= entropy_tol;
    Ok(InfoConditions {
        cond1,
        mu_squared,
        cond2,
        entropy_gap,
    })
}
