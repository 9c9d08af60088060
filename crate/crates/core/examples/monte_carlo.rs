//! Logical failure rates under independent per-qubit noise.
//!
//! Usage: `cargo run --release --example monte_carlo -- [p] [trials] [seed]`

use qops::shorcode::{classical_repetition, shor_monte_carlo};

fn main() -> qops::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p = args.first().and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let trials = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let shor = shor_monte_carlo(p, trials, seed)?;
    println!(
        "nine-qubit code: failure rate {:.5}, mean fidelity {:.6}",
        shor.failure_rate, shor.mean_fidelity
    );
    for (k, (n, f)) in shor
        .trials_by_error_count
        .iter()
        .zip(&shor.failures_by_error_count)
        .enumerate()
    {
        if *n > 0 {
            println!("  {k} errors: {n} trials, {f} failures");
        }
    }

    let classical = classical_repetition(p, trials, seed)?;
    println!(
        "repetition code: empirical {:.5}, exact {:.5}, leading order {:.5}",
        classical.empirical_rate, classical.exact_rate, classical.leading_order
    );
    Ok(())
}
