//! Classical Fisher information of rank-one Gaussian measurements.

use cv_thermo::channel::ChannelParams;
use cv_thermo::fisher::{
    cfi_homodyne_approx, cfi_homodyne_closed, cfi_rank1_general, default_ls, default_thetas,
    homodyne_optimum, measurement_grid, optimize_gaussian_measurement, qfi, squeezed_probe,
};
use cv_thermo::gaussian::RankOneMeasurement;

pub fn run_example() -> cv_thermo::Result<()> {
    let p = ChannelParams::new(0.2, 1.0, 1.0)?;
    let r = 1e-3;

    for gt in [1e-4, 1e-2, 1.0] {
        let t = gt / p.gamma();
        let (s, d) = squeezed_probe(r, &p, t)?;
        let best = optimize_gaussian_measurement(s.cov(), &d.cov)?;
        let (a, b) = (s.cov()[(0, 0)], s.cov()[(1, 1)]);
        let het = cfi_rank1_general(a, b, &p, t, &RankOneMeasurement::heterodyne())?;
        println!(
            "γt={gt:e}: QFI {:.6e}, best rank-one {:.6e} (L={:.3e}, θ={:.3}), homodyne {:.6e}, heterodyne {:.6e}",
            qfi(&s, &d)?,
            best.value,
            best.measurement.l(),
            best.measurement.theta(),
            cfi_homodyne_closed(r, &p, t, 0.0)?.value,
            het.value,
        );
    }

    // the θ-L landscape at one time; θ = 0 reads the squeezed quadrature
    let t = 0.05;
    let (s, d) = squeezed_probe(r, &p, t)?;
    let ls = default_ls();
    let grid = measurement_grid(s.cov(), &d.cov, &default_thetas(), &ls)?;
    for j in (0..ls.len()).step_by(12) {
        println!(
            "L={:.2e}: best θ index {}, CFI {:.6e}",
            ls[j],
            grid.argmax_theta(j),
            grid.get(0, j)
        );
    }

    let opt = homodyne_optimum(r, &p)?;
    let approx = cfi_homodyne_approx(r, &p, opt.t)?;
    println!(
        "homodyne optimum: t = {:.5e}, rate {:.4} (short-time form {:.4})",
        opt.t, opt.rate, approx.rate
    );
    Ok(())
}

fn main() -> cv_thermo::Result<()> {
    run_example()
}
