//! Maximum-likelihood thermometry against the Cramér–Rao bound.

use cv_thermo::estimator::{
    default_bracket, mle_temperature, mse_study, sample_homodyne, HomodyneModel, JointModel,
};

pub fn run_example() -> cv_thermo::Result<()> {
    let steady = HomodyneModel::steady_state(0.2, 1.0, 0.0)?;
    let batch = sample_homodyne(&steady, 1.0, 100_000, 1)?;
    let est = mle_temperature(&batch, default_bracket(1.0))?;
    println!(
        "one batch of 1e5 homodyne outcomes: T̂ = {:.5}",
        est.temperature
    );

    for m in [100, 1_000, 10_000] {
        let rep = mse_study(&steady, 1.0, m, 500, 2024)?;
        println!(
            "steady state M={m:>6}: MSE {:.4e}, CRB {:.4e}, ratio {:.3}",
            rep.empirical_mse, rep.crb, rep.ratio
        );
    }

    let joint = JointModel::new(0.2, 1.0, 1e-3, 2.026e-3)?;
    let rep = mse_study(&joint, 1.0, 10_000, 500, 7)?;
    println!(
        "\njoint measurement near its optimal time:\n{}",
        rep.to_key_value()
    );
    Ok(())
}

fn main() -> cv_thermo::Result<()> {
    run_example()
}
