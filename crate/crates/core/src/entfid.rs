//! Entropy exchange, entanglement fidelity and the bounds tying them together.
//!
//! All entropies are in bits. The anti-Fano bound uses base 2 as well, which
//! keeps it consistent with the entropy it is computed from.

use serde::{Deserialize, Serialize};

use crate::channels::{DensityOperator, QuantumOperation};
use crate::error::{Error, Result};
use crate::linalg::{
    eigvals_hermitian, identity, max_abs_diff, polar_unitary, trace, ComplexMatrix,
};

/// Eigenvalues at or below this contribute nothing to an entropy.
pub const ENTROPY_FLOOR: f64 = 1e-15;

/// Slack applied when checking the bound relations.
pub const BOUND_SLACK: f64 = 1e-9;

/// `-Σ w log₂ w` over the given weights.
pub fn shannon_entropy(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|&&w| w > ENTROPY_FLOOR)
        .map(|&w| -w * w.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entropy of the spectrum of a Hermitian matrix.
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_entropy(&eigvals_hermitian(m)?))
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    matrix_entropy(rho.matrix()).expect("validated density operator")
}

/// `h(x) = -x log₂ x - (1-x) log₂(1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(x, "[0, 1]"));
    }
    Ok(shannon_entropy(&[x, 1.0 - x]))
}

/// Entropy of the joint-state superoperator `𝒜_ρ`.
pub fn entropy_exchange(op: &QuantumOperation, rho: &DensityOperator) -> Result<f64> {
    Ok(shannon_entropy(&op.a_rho_spectrum(rho)?))
}

/// `Σ_α |tr(A_α ρ)|² / tr 𝒜(ρ)`.
pub fn entanglement_fidelity(op: &QuantumOperation, rho: &DensityOperator) -> Result<f64> {
    let p = op.probability(rho.matrix())?;
    if p <= crate::channels::TAU_PROB {
        return Err(Error::ZeroProbability(p));
    }
    let overlap: f64 = op
        .kraus()
        .iter()
        .map(|a| trace(&(a * rho.matrix())).norm_sqr())
        .sum();
    Ok((overlap / p).clamp(0.0, 1.0))
}

/// `Tr(𝒜_ρ²) = Σ λ_α²`.
pub fn quadratic_entropy(op: &QuantumOperation, rho: &DensityOperator) -> Result<f64> {
    Ok(op.a_rho_spectrum(rho)?.iter().map(|l| l * l).sum())
}

/// Fidelity, purity measures and the four bounds relating them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub dim: usize,
    pub entanglement_fidelity: f64,
    pub entropy_exchange_bits: f64,
    pub quadratic_entropy: f64,
    pub lambda1: f64,
    /// `h(F_e) + (1 - F_e) log₂(D² - 1)`, an upper bound on the entropy exchange.
    pub fano_bound: f64,
    /// `F_e² + (1 - F_e)² / (D² - 1)`, a lower bound on the quadratic entropy.
    pub quad_fano_bound: f64,
    /// `2^(-2 S_e)`, a lower bound on the fidelity after unitary correction.
    pub anti_fano_entropy_bound: f64,
    /// `Tr(𝒜_ρ²)²`, a lower bound on the fidelity after unitary correction.
    pub anti_fano_quad_bound: f64,
}

impl FidelityReport {
    pub fn fano_holds(&self, slack: f64) -> bool {
        self.entropy_exchange_bits <= self.fano_bound + slack
    }

    pub fn quad_fano_holds(&self, slack: f64) -> bool {
        self.quadratic_entropy >= self.quad_fano_bound - slack
    }

    /// Anti-Fano relations, meaningful once the operation has been corrected.
    pub fn anti_fano_holds(&self, slack: f64) -> bool {
        self.entanglement_fidelity >= self.anti_fano_entropy_bound - slack
    }

    pub fn quad_anti_fano_holds(&self, slack: f64) -> bool {
        self.entanglement_fidelity >= self.anti_fano_quad_bound - slack
    }

    pub fn lambda_bound_holds(&self, slack: f64) -> bool {
        self.entanglement_fidelity >= self.lambda1 * self.lambda1 - slack
    }
}

/// Evaluates fidelity, purity and all bounds for `op` acting on `rho`.
pub fn fano_check(op: &QuantumOperation, rho: &DensityOperator) -> Result<FidelityReport> {
    let spectrum = op.a_rho_spectrum(rho)?;
    let fe = entanglement_fidelity(op, rho)?;
    let se = shannon_entropy(&spectrum);
    let quad: f64 = spectrum.iter().map(|l| l * l).sum();
    let lambda1 = spectrum.first().copied().unwrap_or(0.0);
    let d2m1 = (op.dim() * op.dim()) as f64 - 1.0;
    let h = binary_entropy(fe)?;
    let (fano_bound, quad_fano_bound) = if d2m1 > 0.0 {
        (
            h + (1.0 - fe) * d2m1.log2(),
            fe * fe + (1.0 - fe).powi(2) / d2m1,
        )
    } else {
        // One-dimensional systems have F_e = 1 and no error directions.
        (h, fe * fe)
    };
    Ok(FidelityReport {
        dim: op.dim(),
        entanglement_fidelity: fe,
        entropy_exchange_bits: se,
        quadratic_entropy: quad,
        lambda1,
        fano_bound,
        quad_fano_bound,
        anti_fano_entropy_bound: (-2.0 * se).exp2(),
        anti_fano_quad_bound: quad * quad,
    })
}

/// Result of undoing the dominant unitary part of an operation.
#[derive(Debug, Clone)]
pub struct UnitaryCorrection {
    /// `U† ⊗ U ∘ 𝒜`.
    pub corrected: QuantumOperation,
    pub unitary: ComplexMatrix,
    /// Largest eigenvalue of `𝒜_ρ`.
    pub lambda1: f64,
    /// Unit-norm eigen-operator for `lambda1`.
    pub top_eigenoperator: ComplexMatrix,
    /// Report evaluated on the corrected operation.
    pub report: FidelityReport,
}

/// Finds `U` from the polar form of the top eigen-operator of `𝒜_ρ` and
/// prepends `U†` to every decomposition operator.
pub fn unitary_correction(
    op: &QuantumOperation,
    rho: &DensityOperator,
) -> Result<UnitaryCorrection> {
    let deviation = max_abs_diff(&op.completeness(), &identity(op.dim()));
    if deviation > 1e-10 {
        return Err(Error::NotTracePreserving(deviation));
    }
    let parts = op.a_rho_eigenoperators(rho)?;
    let (lambda1, tau) = parts
        .into_iter()
        .next()
        .ok_or(Error::ZeroProbability(0.0))?;
    let unitary = polar_unitary(&tau)?;
    let back = unitary.adjoint();
    let corrected = QuantumOperation::new(op.kraus().iter().map(|a| &back * a).collect())?;
    let report = fano_check(&corrected, rho)?;
    Ok(UnitaryCorrection {
        corrected,
        unitary,
        lambda1,
        top_eigenoperator: tau,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        basis_outer, c64, kron, partial_trace, psd_order, sigma_x, sigma_y, sigma_z, sqrt_psd,
    };
    use crate::random::{
        random_channel, random_density, random_subchannel, random_unitary, rng_for,
    };
    use crate::superop::{ReferenceFrame, Superoperator};

    fn depolarizing(p: f64) -> QuantumOperation {
        let w = (p / 3.0).sqrt();
        QuantumOperation::new(vec![
            identity(2).scale((1.0 - p).sqrt()),
            sigma_x().scale(w),
            sigma_y().scale(w),
            sigma_z().scale(w),
        ])
        .unwrap()
    }

    fn half() -> DensityOperator {
        DensityOperator::maximally_mixed(2)
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOperator::new(basis_outer(3, 1, 1)).unwrap();
        assert_eq!(von_neumann_entropy(&pure), 0.0);
        assert!((von_neumann_entropy(&half()) - 1.0).abs() < 1e-14);
        let d = DensityOperator::new(ComplexMatrix::from_diagonal(
            &crate::ComplexVector::from_vec(vec![c64(0.25, 0.), c64(0.75, 0.)]),
        ))
        .unwrap();
        // -¼ log₂ ¼ - ¾ log₂ ¾
        let expected = 0.5 + 0.75 * (4.0f64 / 3.0).log2();
        assert!((von_neumann_entropy(&d) - expected).abs() < 1e-14);
        assert!((von_neumann_entropy(&d) - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn binary_entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.1).unwrap() - 0.468996).abs() < 1e-6);
        assert!((binary_entropy(0.3).unwrap() - binary_entropy(0.7).unwrap()).abs() < 1e-15);
        assert!(matches!(binary_entropy(1.5), Err(Error::Domain(..))));
    }

    #[test]
    fn entropy_exchange_examples() {
        let mut rng = rng_for(51, 0);
        let u = QuantumOperation::new(vec![random_unitary(3, &mut rng)]).unwrap();
        assert!(
            entropy_exchange(&u, &random_density(3, &mut rng))
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!((entropy_exchange(&depolarizing(0.75), &half()).unwrap() - 2.0).abs() < 1e-12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let deph = QuantumOperation::new(vec![identity(2).scale(r), sigma_z().scale(r)]).unwrap();
        assert!((entropy_exchange(&deph, &half()).unwrap() - 1.0).abs() < 1e-12);
        assert!((quadratic_entropy(&deph, &half()).unwrap() - 0.5).abs() < 1e-14);
        assert!((quadratic_entropy(&depolarizing(0.75), &half()).unwrap() - 0.25).abs() < 1e-14);
        assert!(
            (quadratic_entropy(&u, &DensityOperator::maximally_mixed(3)).unwrap() - 1.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = rng_for(52, 0);
        let id = QuantumOperation::new(vec![identity(3)]).unwrap();
        assert!(
            (entanglement_fidelity(&id, &random_density(3, &mut rng)).unwrap() - 1.0).abs() < 1e-14
        );
        assert!((entanglement_fidelity(&depolarizing(0.3), &half()).unwrap() - 0.7).abs() < 1e-14);
        let p: f64 = 0.4;
        let phase = QuantumOperation::new(vec![
            identity(2).scale((1.0 - p).sqrt()),
            sigma_z().scale(p.sqrt()),
        ])
        .unwrap();
        let ground = DensityOperator::new(basis_outer(2, 0, 0)).unwrap();
        assert!((entanglement_fidelity(&phase, &ground).unwrap() - 1.0).abs() < 1e-14);
    }

    /// `ρ^{RQ'}` from the purification `|Φ_√ρ⟩` pushed through a dilation.
    fn joint_state_via_dilation(op: &QuantumOperation, rho: &DensityOperator) -> ComplexMatrix {
        let d = op.dim();
        let model = op.dilate().unwrap();
        let n = model.env_dim();
        let frame = ReferenceFrame::standard(d);
        let phi = frame.vec(&sqrt_psd(rho.matrix()).unwrap()).unwrap();
        let env0 = crate::linalg::basis_vector(n, 0);
        let start = phi.kronecker(&env0);
        let coupling = kron(&identity(d), model.unitary());
        let out = coupling * start;
        let pure = &out * out.adjoint();
        partial_trace(&pure, &[d, d, n], &[0, 1]).unwrap()
    }

    #[test]
    fn entropy_exchange_three_ways() {
        for trial in 0..10 {
            let mut rng = rng_for(53, trial);
            let op = random_channel(2, 1 + trial as usize % 4, &mut rng);
            let rho = random_density(2, &mut rng);
            let via_gram = entropy_exchange(&op, &rho).unwrap();
            let frame = ReferenceFrame::standard(2);
            let choi = op.a_rho(&rho).unwrap().choi(&frame).unwrap();
            let via_choi = matrix_entropy(&choi).unwrap();
            let joint = joint_state_via_dilation(&op, &rho);
            let via_dilation = matrix_entropy(&joint).unwrap();
            assert!((via_gram - via_choi).abs() < 1e-8);
            assert!((via_gram - via_dilation).abs() < 1e-8);

            let phi = frame.vec(&sqrt_psd(rho.matrix()).unwrap()).unwrap();
            let fe = phi.dotc(&(&joint * &phi)).re;
            assert!((fe - entanglement_fidelity(&op, &rho).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn fidelity_is_invariant_under_kraus_mixing() {
        let mut rng = rng_for(54, 0);
        let op = random_subchannel(3, 3, &mut rng);
        let rho = random_density(3, &mut rng);
        let v = random_unitary(3, &mut rng);
        let mixed: Vec<_> = (0..3)
            .map(|b| {
                op.kraus()
                    .iter()
                    .enumerate()
                    .fold(ComplexMatrix::zeros(3, 3), |acc, (a, k)| {
                        acc + k.map(|z| z * v[(b, a)])
                    })
            })
            .collect();
        let rotated = QuantumOperation::new(mixed).unwrap();
        let lhs = entanglement_fidelity(&op, &rho).unwrap();
        let rhs = entanglement_fidelity(&rotated, &rho).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn fidelity_one_iff_a_rho_is_root_pair() {
        let mut rng = rng_for(55, 0);
        let rho = random_density(2, &mut rng);
        let id = QuantumOperation::new(vec![identity(2)]).unwrap();
        let root = rho.sqrt();
        let expected = Superoperator::from_operator_pairs(&[(root.clone(), root)]).unwrap();
        assert!(id.a_rho(&rho).unwrap().max_abs_diff(&expected) < 1e-14);
        assert!((entanglement_fidelity(&id, &rho).unwrap() - 1.0).abs() < 1e-14);
        let noisy = depolarizing(0.1);
        assert!(noisy.a_rho(&rho).unwrap().max_abs_diff(&expected) > 1e-3);
        assert!(entanglement_fidelity(&noisy, &rho).unwrap() < 1.0 - 1e-3);
    }

    #[test]
    fn fano_examples() {
        let id = QuantumOperation::new(vec![identity(2)]).unwrap();
        let r = fano_check(&id, &half()).unwrap();
        assert!((r.entanglement_fidelity - 1.0).abs() < 1e-14);
        assert!(r.fano_bound.abs() < 1e-12 && r.entropy_exchange_bits.abs() < 1e-12);
        assert!(
            (r.quad_fano_bound - 1.0).abs() < 1e-12 && (r.quadratic_entropy - 1.0).abs() < 1e-12
        );

        let r = fano_check(&depolarizing(0.3), &half()).unwrap();
        assert!((r.entanglement_fidelity - 0.7).abs() < 1e-14);
        let se = -0.7 * 0.7f64.log2() - 0.3 * 0.1f64.log2();
        assert!((r.entropy_exchange_bits - se).abs() < 1e-12);
        assert!((r.entropy_exchange_bits - 1.357).abs() < 1e-3);
        let bound = binary_entropy(0.7).unwrap() + 0.3 * 3f64.log2();
        assert!((r.fano_bound - bound).abs() < 1e-12);
        assert!((r.fano_bound - r.entropy_exchange_bits).abs() < 1e-12);
        assert!(r.fano_holds(BOUND_SLACK) && r.quad_fano_holds(BOUND_SLACK));
    }

    #[test]
    fn fano_random_suite() {
        for trial in 0..100 {
            let mut rng = rng_for(56, trial);
            let dim = 2 + trial as usize % 3;
            let op = random_subchannel(dim, 1 + trial as usize % 5, &mut rng);
            let rho = random_density(dim, &mut rng);
            let r = fano_check(&op, &rho).unwrap();
            assert!(r.fano_holds(BOUND_SLACK), "trial {trial}: {r:?}");
            assert!(r.quad_fano_holds(BOUND_SLACK), "trial {trial}: {r:?}");
            assert!(r.lambda1 >= r.quadratic_entropy - 1e-10);
            assert!(-r.lambda1.log2() <= r.entropy_exchange_bits + 1e-10);
        }
    }

    #[test]
    fn correction_of_unitary_is_identity() {
        let mut rng = rng_for(57, 0);
        let v = random_unitary(3, &mut rng);
        let rho = random_density(3, &mut rng);
        let c = unitary_correction(&QuantumOperation::new(vec![v]).unwrap(), &rho).unwrap();
        assert!((c.lambda1 - 1.0).abs() < 1e-12);
        assert!((c.report.entanglement_fidelity - 1.0).abs() < 1e-12);
        let k = &c.corrected.kraus()[0];
        let phase = trace(k) / 3.0;
        assert!(max_abs_diff(k, &identity(3).map(|z| z * phase)) < 1e-10);
    }

    #[test]
    fn correction_of_depolarizing() {
        let c = unitary_correction(&depolarizing(0.2), &half()).unwrap();
        assert!((c.lambda1 - 0.8).abs() < 1e-14);
        let phase = c.unitary[(0, 0)];
        assert!(max_abs_diff(&c.unitary, &identity(2).map(|z| z * phase)) < 1e-12);
        assert!((c.report.entanglement_fidelity - 0.8).abs() < 1e-12);
        assert!(c.report.lambda_bound_holds(BOUND_SLACK));
    }

    #[test]
    fn correction_undoes_a_rotation() {
        let mut rng = rng_for(58, 0);
        let v = random_unitary(2, &mut rng);
        let base = depolarizing(0.2);
        let rotated = QuantumOperation::new(base.kraus().iter().map(|a| &v * a).collect()).unwrap();
        let c = unitary_correction(&rotated, &half()).unwrap();
        let frame = ReferenceFrame::standard(2);
        let lhs = c.corrected.superoperator().choi(&frame).unwrap();
        let rhs = base.superoperator().choi(&frame).unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-8);
    }

    #[test]
    fn correction_requires_trace_preservation() {
        let proj = QuantumOperation::new(vec![basis_outer(2, 0, 0)]).unwrap();
        assert!(matches!(
            unitary_correction(&proj, &half()),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn anti_fano_random_suite() {
        for trial in 0..50 {
            let mut rng = rng_for(59, trial);
            let dim = 2 + trial as usize % 2;
            let op = random_channel(dim, 1 + trial as usize % 4, &mut rng);
            let rho = random_density(dim, &mut rng);
            let c = unitary_correction(&op, &rho).unwrap();
            let r = &c.report;
            assert!(r.lambda_bound_holds(BOUND_SLACK), "trial {trial}");
            assert!(r.anti_fano_holds(BOUND_SLACK), "trial {trial}");
            assert!(r.quad_anti_fano_holds(BOUND_SLACK), "trial {trial}");

            let sigma1 = c.top_eigenoperator.adjoint() * &c.top_eigenoperator;
            let lhs = rho.sqrt();
            let rhs = sqrt_psd(&sigma1).unwrap().scale(c.lambda1.sqrt());
            assert!(psd_order(&lhs, &rhs, 1e-9).unwrap(), "trial {trial}");
        }
    }
}
