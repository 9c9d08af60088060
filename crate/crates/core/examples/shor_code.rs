//! The nine-qubit code: error table, syndrome correction of every single-qubit
//! Pauli error, and recovery from amplitude decay.

use qops::linalg::c64;
use qops::shorcode::{
    apply_error, correct, correct_decay_demo, decode, encode, syndrome_measure, table1, table1_tsv,
    ErrorSpec, LogicalQubit,
};

fn main() -> qops::Result<()> {
    let q = LogicalQubit::normalized(c64(0.6, 0.0), c64(0.0, 0.8))?;

    let rows = table1(&q);
    for line in table1_tsv(&rows).lines().take(4) {
        println!("{}", line.chars().take(110).collect::<String>());
    }
    println!("... {} rows in total", rows.len());

    let encoded = encode(&q);
    let mut worst: f64 = 0.0;
    for (i, e) in ErrorSpec::all_single_qubit().iter().enumerate() {
        let (outcome, collapsed) = syndrome_measure(&apply_error(&encoded, e)?, i as u64)?;
        worst = worst.max(1.0 - q.fidelity(&decode(&correct(&collapsed, &outcome)?)?));
    }
    println!("worst infidelity over 27 single-qubit errors: {worst:.1e}");

    let demo = correct_decay_demo(&q, 5, 0.5, 3)?;
    for line in &demo.transcript {
        println!("{line}");
    }
    Ok(())
}
