//! Entangled probes: a beamsplitter and two homodynes against one homodyne.

use cv_thermo::channel::ChannelParams;
use cv_thermo::fisher::{
    cfi_gaussian, cfi_joint_short, cfi_joint_two_mode, homodyne_optimum, joint_optimum,
    joint_output_derivative, joint_output_state, joint_readout, qfi, tmsv_probe,
};

pub fn run_example() -> cv_thermo::Result<()> {
    let p = ChannelParams::new(0.2, 1.0, 1.0)?;
    let r = 1e-3;

    let single = homodyne_optimum(r, &p)?;
    let joint = joint_optimum(r, &p)?;
    println!(
        "single-mode homodyne: rate {:.4} at t = {:.5e}",
        single.rate, single.t
    );
    println!(
        "joint measurement:    rate {:.4} at t = {:.5e}",
        joint.rate, joint.t
    );
    println!("advantage: {:.4}", joint.rate / single.rate);

    // the closed form against the full two-mode pipeline
    let t = joint.t;
    let (s, d) = tmsv_probe(r, &p, t)?;
    let out = joint_output_state(&s)?;
    let dout = joint_output_derivative(&d);
    let generic = cfi_gaussian(
        out.cov(),
        &dout.cov,
        out.mean(),
        &dout.mean,
        &joint_readout(),
    )?;
    println!(
        "at the optimum: closed {:.10}, pipeline {:.10}, short-time {:.10}, QFI {:.10}",
        cfi_joint_two_mode(r, &p, t)?.value,
        generic,
        cfi_joint_short(r, &p, t)?.value,
        qfi(&s, &d)?,
    );
    Ok(())
}

fn main() -> cv_thermo::Result<()> {
    run_example()
}
