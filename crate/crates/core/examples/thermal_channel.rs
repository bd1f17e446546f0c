//! A single mode relaxing towards a thermal bath.

use cv_thermo::channel::{evolve_single, evolve_two_mode, lyapunov_ode_evolve, ChannelParams};
use cv_thermo::gaussian::{squeezed_vacuum, tmsv, GaussianState};
use nalgebra::{DMatrix, DVector};

pub fn run_example() -> cv_thermo::Result<()> {
    let p = ChannelParams::new(0.2, 1.0, 1.0)?;
    println!(
        "ν = {:.12}, ∂ν/∂T = {:.12}, n̄ = {:.6}",
        p.nu(),
        p.dnu_dt(),
        p.mean_occupation()
    );

    let sq = squeezed_vacuum(1e-2)?;
    println!("{:>8} {:>14} {:>14}", "γt", "σ11", "σ22");
    for gt in [0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0, 40.0] {
        let s = evolve_single(sq.cov(), &p, gt / p.gamma())?;
        println!("{gt:>8} {:>14.8} {:>14.8}", s[(0, 0)], s[(1, 1)]);
    }

    // correlations with an idle auxiliary decay at half the rate
    let pair = evolve_two_mode(tmsv(0.5)?.cov(), &p, 2.0)?;
    println!("TMSV(0.5) after t=2:{pair}");

    // the closed form against RK4 on the lab-frame moment equations
    let fast = ChannelParams::new(0.2, 10.0, 1.0)?;
    let start = GaussianState::new(
        DVector::zeros(2),
        DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 2.0])),
    )?;
    let period = 2.0 * std::f64::consts::PI / fast.omega();
    let exact = evolve_single(start.cov(), &fast, period)?;
    for dt in [1e-2, 1e-3, 1e-4] {
        let ode = lyapunov_ode_evolve(&start, &fast, period, dt)?;
        println!(
            "RK4 dt={dt:e}: max error {:.3e}",
            (ode.cov() - &exact).amax()
        );
    }
    Ok(())
}

fn main() -> cv_thermo::Result<()> {
    run_example()
}
