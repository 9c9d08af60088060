//! Kraus, left-right and Choi views of one superoperator, and a map that
//! fails complete positivity.

use qops::linalg::{identity, sigma_x, sigma_y, sigma_z, unitarity_defect};
use qops::superop::{unitary_relating, ReferenceFrame, Superoperator};

fn main() -> qops::Result<()> {
    let p: f64 = 0.3;
    let w = (p / 3.0).sqrt();
    let kraus = vec![
        identity(2).scale((1.0 - p).sqrt()),
        sigma_x().scale(w),
        sigma_y().scale(w),
        sigma_z().scale(w),
    ];
    let depolarizing = Superoperator::from_kraus(&kraus)?;

    let frame = ReferenceFrame::standard(2);
    let choi = depolarizing.choi(&frame)?;
    let rebuilt = Superoperator::from_choi(&choi, &frame)?;
    println!(
        "Choi round trip deviation: {:.2e}",
        rebuilt.max_abs_diff(&depolarizing)
    );

    let extracted = depolarizing.kraus(1e-12)?;
    println!("Kraus operators from the spectrum: {}", extracted.len());
    let v = unitary_relating(&kraus, &extracted, 1e-9)?;
    println!(
        "relating matrix is {}x{}, unitarity defect {:.2e}",
        v.nrows(),
        v.ncols(),
        unitarity_defect(&v)
    );

    println!(
        "completely positive: {}",
        depolarizing.is_completely_positive(1e-10)
    );
    println!(
        "trace preserving: {}",
        depolarizing.is_trace_preserving(1e-10)
    );

    let transpose = Superoperator::from_ordinary_fn(2, |a| a.transpose())?;
    let spectrum = transpose.lr_eig(1e-12)?;
    println!(
        "transpose map: completely positive = {}, smallest left-right eigenvalue = {:.3}",
        transpose.is_completely_positive(1e-10),
        spectrum.min()
    );
    Ok(())
}
