//! Reversing a bit flip on the first qubit of the three-bit repetition code,
//! and the verdict for a phase flip on the same code.

use qops::channels::QuantumOperation;
use qops::linalg::{basis_vector, identity, kron, sigma_x, sigma_z, ComplexMatrix};
use qops::reversal::{
    canonical_decomposition, check_algebraic_reversibility, reversal_operation, verify_reversal,
    CodeSubspace,
};

fn on_first_qubit(m: &ComplexMatrix) -> ComplexMatrix {
    kron(m, &identity(4))
}

fn main() -> qops::Result<()> {
    let code = CodeSubspace::from_vectors(&[basis_vector(8, 0), basis_vector(8, 7)])?;
    let p: f64 = 0.25;

    let bit_flip = QuantumOperation::new(vec![
        identity(8).scale((1.0 - p).sqrt()),
        on_first_qubit(&sigma_x()).scale(p.sqrt()),
    ])?;
    let report = check_algebraic_reversibility(&bit_flip, &code, 1e-9)?;
    println!(
        "bit flip: reversible = {}, mu^2 = {:.6}",
        report.reversible, report.mu_squared
    );

    let canon = canonical_decomposition(&bit_flip, &code, 1e-9)?;
    println!("canonical weights: {:?}", canon.lambdas);
    let reversal = reversal_operation(&canon);
    let check = verify_reversal(&reversal, &bit_flip, &code)?;
    println!("reversal residual: {:.2e}", check.max_deviation());

    let phase_flip = QuantumOperation::new(vec![
        identity(8).scale((1.0 - p).sqrt()),
        on_first_qubit(&sigma_z()).scale(p.sqrt()),
    ])?;
    let report = check_algebraic_reversibility(&phase_flip, &code, 1e-9)?;
    println!(
        "phase flip: reversible = {}, violation = {:.3}",
        report.reversible, report.max_violation
    );
    Ok(())
}
