//! A random channel, its environment model and the joint-state superoperator
//! built from an input state.

use qops::entfid::{entanglement_fidelity, entropy_exchange, von_neumann_entropy};
use qops::linalg::max_abs_diff;
use qops::random::{random_channel, random_density, rng_for};

fn main() -> qops::Result<()> {
    let mut rng = rng_for(42, 0);
    let op = random_channel(3, 2, &mut rng);
    let rho = random_density(3, &mut rng);

    let model = op.dilate()?;
    println!(
        "system dimension {}, environment dimension {}",
        model.system_dim(),
        model.env_dim()
    );
    let direct = op.apply_unnormalized(rho.matrix())?;
    let through_env = model.post_state(rho.matrix())?;
    println!(
        "environment model deviation: {:.2e}",
        max_abs_diff(&direct, &through_env)
    );

    let weights = op.a_rho_spectrum(&rho)?;
    let shown: Vec<String> = weights.iter().map(|l| format!("{l:.6}")).collect();
    println!("joint-state weights: {}", shown.join(" "));
    println!("input entropy: {:.6} bits", von_neumann_entropy(&rho));
    println!(
        "output entropy: {:.6} bits",
        von_neumann_entropy(&op.apply_normalized(&rho)?)
    );
    println!("entropy exchange: {:.6} bits", entropy_exchange(&op, &rho)?);
    println!(
        "entanglement fidelity: {:.6}",
        entanglement_fidelity(&op, &rho)?
    );
    Ok(())
}
