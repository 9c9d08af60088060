//! Fano-type bounds for a noisy rotation before and after undoing its
//! dominant unitary part.

use qops::channels::{DensityOperator, QuantumOperation};
use qops::entfid::{fano_check, unitary_correction, FidelityReport};
use qops::linalg::{identity, sigma_x, sigma_y, sigma_z};
use qops::random::{random_unitary, rng_for};

fn show(tag: &str, r: &FidelityReport) {
    println!("{tag}:");
    println!(
        "  F_e = {:.6}, S_e = {:.6} bits, Tr(A_rho^2) = {:.6}",
        r.entanglement_fidelity, r.entropy_exchange_bits, r.quadratic_entropy
    );
    println!(
        "  S_e <= {:.6}, Tr(A_rho^2) >= {:.6}",
        r.fano_bound, r.quad_fano_bound
    );
    println!(
        "  F_e >= {:.6} and F_e >= {:.6} (after correction)",
        r.anti_fano_entropy_bound, r.anti_fano_quad_bound
    );
}

fn main() -> qops::Result<()> {
    let p: f64 = 0.2;
    let w = (p / 3.0).sqrt();
    let v = random_unitary(2, &mut rng_for(5, 0));
    let kraus = [
        identity(2).scale((1.0 - p).sqrt()),
        sigma_x().scale(w),
        sigma_y().scale(w),
        sigma_z().scale(w),
    ]
    .iter()
    .map(|k| &v * k)
    .collect();
    let op = QuantumOperation::new(kraus)?;
    let rho = DensityOperator::maximally_mixed(2);

    show("rotated depolarizing channel", &fano_check(&op, &rho)?);
    let fixed = unitary_correction(&op, &rho)?;
    println!("largest joint-state weight: {:.6}", fixed.lambda1);
    show("after unitary correction", &fixed.report);
    Ok(())
}
