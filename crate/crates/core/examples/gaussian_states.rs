//! Building Gaussian states and reading off their symplectic structure.

use cv_thermo::gaussian::{
    apply_symplectic, beamsplitter_50_50, check_physical, condition_on_measurement,
    squeezed_vacuum, symplectic_eigenvalues, tmsv, vacuum, williamson, GaussianState,
    RankOneMeasurement,
};
use nalgebra::{DMatrix, DVector};

pub fn run_example() -> cv_thermo::Result<()> {
    let sq = squeezed_vacuum(0.1)?;
    println!("squeezed vacuum r=0.1:{}", sq.cov());
    println!(
        "symplectic eigenvalues: {:?}",
        symplectic_eigenvalues(sq.cov())?
    );

    // TMSV two ways: directly, and as two opposite squeezers on a beamsplitter
    let u = 0.25_f64;
    let r = 2.0 / (u + 1.0 / u);
    let input = GaussianState::new(
        DVector::zeros(4),
        DMatrix::from_diagonal(&DVector::from_vec(vec![u, 1.0 / u, 1.0 / u, u])),
    )?;
    let built = apply_symplectic(&beamsplitter_50_50(), &input)?;
    let direct = tmsv(r)?;
    println!(
        "tmsv(r={r:.4}) vs beamsplitter construction: max diff {:.1e}",
        (built.cov() - direct.cov()).amax()
    );

    let noisy = GaussianState::new(
        DVector::zeros(2),
        DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 2.0]),
    )?;
    let w = williamson(noisy.cov())?;
    println!(
        "Williamson ν = {:?}, S ={}",
        w.eigenvalues,
        w.transform.matrix()
    );

    let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5]));
    let ph = check_physical(&bad)?;
    println!(
        "diag(0.5, 0.5): physical = {}, min ν = {}",
        ph.is_physical, ph.min_symplectic_eigenvalue
    );

    // measuring the auxiliary of a TMSV steers the probe
    let pair = tmsv(0.2)?;
    let hom = condition_on_measurement(&pair, 1, &RankOneMeasurement::homodyne(0.0)?)?;
    let het = condition_on_measurement(&pair, 1, &RankOneMeasurement::heterodyne())?;
    println!("after homodyne on the auxiliary:{}", hom.cov());
    println!("after heterodyne on the auxiliary:{}", het.cov());
    println!("vacuum for comparison:{}", vacuum(1)?.cov());
    Ok(())
}

fn main() -> cv_thermo::Result<()> {
    run_example()
}
