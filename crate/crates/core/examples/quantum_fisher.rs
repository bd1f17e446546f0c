//! Quantum Fisher information of squeezed probes and the classical bound.

use cv_thermo::channel::ChannelParams;
use cv_thermo::fisher::{
    classical_bound, evolve_with_derivative, qfi, qfi_rate_single_closed, qfi_rate_single_short,
    squeezed_probe, tmsv_probe, DerivativeSpec,
};
use cv_thermo::gaussian::coherent;
use nalgebra::DVector;

pub fn run_example() -> cv_thermo::Result<()> {
    let p = ChannelParams::new(0.2, 1.0, 1.0)?;
    let r = 1e-3;

    println!(
        "{:>10} {:>14} {:>14} {:>14} {:>14}",
        "γt", "vacuum rate", "squeezed rate", "generic", "two-mode"
    );
    for gt in [1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0] {
        let t = gt / p.gamma();
        let (s, d) = squeezed_probe(r, &p, t)?;
        let (s2, d2) = tmsv_probe(r, &p, t)?;
        println!(
            "{gt:>10} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
            classical_bound(&p, t)?.rate,
            qfi_rate_single_closed(r, &p, t)?.rate,
            qfi(&s, &d)? / t,
            qfi(&s2, &d2)? / t,
        );
    }

    // displacement carries no temperature information
    let c = coherent(DVector::from_vec(vec![3.0, -1.0]))?;
    let (s, d) = evolve_with_derivative(&c, &p, 1.0, DerivativeSpec::Analytic)?;
    println!(
        "coherent probe at t=1: {:.12} (bound {:.12})",
        qfi(&s, &d)?,
        classical_bound(&p, 1.0)?.value
    );

    // at short times the rate is limited by γtν² against the squeezing 2νr
    for gt in [1e-5, 1e-4, 1e-3] {
        let t = gt / p.gamma();
        let short = qfi_rate_single_short(r, &p, t)?;
        println!(
            "γt={gt:e}: exact {:.4}, short-time {:.4} (in regime: {})",
            qfi_rate_single_closed(r, &p, t)?.rate,
            short.result.rate,
            short.in_regime
        );
    }
    Ok(())
}

fn main() -> cv_thermo::Result<()> {
    run_example()
}
