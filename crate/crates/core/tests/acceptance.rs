//! End-to-end acceptance checks, one report line per criterion.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cv_thermo::channel::{
    evolve_single, evolve_single_lab_frame, lyapunov_ode_evolve,
    lyapunov_ode_evolve_with_sensitivity, ChannelParams,
};
use cv_thermo::estimator::{mse_study, HomodyneModel};
use cv_thermo::fisher::{
    cfi_gaussian, cfi_homodyne_closed, cfi_joint_two_mode, cfi_rank1_general, classical_bound,
    default_ls, default_thetas, evolve_with_derivative, homodyne_optimum, joint_optimum,
    joint_output_derivative, joint_output_state, joint_readout, measurement_grid,
    optimize_gaussian_measurement, qfi, qfi_general, qfi_rate_single_closed, squeezed_probe,
    tmsv_probe, DerivativeSpec, GaussianMeasurement,
};
use cv_thermo::gaussian::{check_physical, coherent, squeezed_vacuum, vacuum, RankOneMeasurement};
use cv_thermo::sweep::{run_sweep, with_threads, SweepConfig, SweepSpec, Table};

const NU: f64 = 2.163_953_413_738_652_8;
const DNU: f64 = 1.841_347_188_415_584_6;

type Outcome = (bool, String);

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn fig_params() -> ChannelParams {
    ChannelParams::new(0.2, 1.0, 1.0).unwrap()
}

/// Every covariance produced while checking criteria 1–7.
#[derive(Default)]
struct States(Vec<DMatrix<f64>>);

impl States {
    fn push(&mut self, cov: &DMatrix<f64>) {
        self.0.push(cov.clone());
    }
}

fn closed_forms_match_generic(states: &mut States) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 4];
    for _ in 0..200 {
        let temp = rng.gen_range(0.1..=10.0);
        let gamma = rng.gen_range(0.05..=1.0);
        let r = 1.0 - rng.gen::<f64>(); // (0, 1]
        let t = rng.gen_range(1e-4..=50.0);
        let p = ChannelParams::new(gamma, 1.0, temp).unwrap();

        let (s, d) = squeezed_probe(r, &p, t).unwrap();
        states.push(s.cov());
        let generic = qfi(&s, &d).unwrap();
        worst[0] = worst[0].max(rel(
            qfi_rate_single_closed(r, &p, t).unwrap().value,
            generic,
        ));

        let hom = GaussianMeasurement::rank_one(&RankOneMeasurement::homodyne(0.0).unwrap(), 0, 1)
            .unwrap();
        let generic = cfi_gaussian(s.cov(), &d.cov, s.mean(), &d.mean, &hom).unwrap();
        worst[1] = worst[1].max(rel(
            cfi_homodyne_closed(r, &p, t, 0.0).unwrap().value,
            generic,
        ));

        let meas = RankOneMeasurement::new(
            1.0 - rng.gen::<f64>(),
            rng.gen_range(0.0..std::f64::consts::PI),
        )
        .unwrap();
        let m = GaussianMeasurement::rank_one(&meas, 0, 1).unwrap();
        let generic = cfi_gaussian(s.cov(), &d.cov, s.mean(), &d.mean, &m).unwrap();
        let closed = cfi_rank1_general(s.cov()[(0, 0)], s.cov()[(1, 1)], &p, t, &meas).unwrap();
        worst[3] = worst[3].max(rel(closed.value, generic));

        if r < 1.0 {
            let (s2, d2) = tmsv_probe(r, &p, t).unwrap();
            let out = joint_output_state(&s2).unwrap();
            let dout = joint_output_derivative(&d2);
            states.push(s2.cov());
            states.push(out.cov());
            let generic = cfi_gaussian(
                out.cov(),
                &dout.cov,
                out.mean(),
                &dout.mean,
                &joint_readout(),
            )
            .unwrap();
            worst[2] = worst[2].max(rel(cfi_joint_two_mode(r, &p, t).unwrap().value, generic));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let max = worst.iter().cloned().fold(0.0, f64::max);
    (
        max <= 1e-8 && secs < 10.0,
        format!(
            "max rel err: QFI {:.1e}, homodyne {:.1e}, joint {:.1e}, rank-one {:.1e}; {secs:.2} s",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn classical_bound_holds(states: &mut States) -> Outcome {
    let p = fig_params();
    let t = 0.5;
    let (vs, vd) =
        evolve_with_derivative(&vacuum(1).unwrap(), &p, t, DerivativeSpec::Analytic).unwrap();
    let q_vac = qfi(&vs, &vd).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mean = DVector::from_vec(vec![rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)]);
        let c = coherent(mean).unwrap();
        // the mean decays independently of T, which finite differences confirm
        let fd = DerivativeSpec::finite_difference(1e-6).unwrap();
        let (s, d) = evolve_with_derivative(&c, &p, t, fd).unwrap();
        let (_, da) = evolve_with_derivative(&c, &p, t, DerivativeSpec::Analytic).unwrap();
        states.push(s.cov());
        worst = worst.max(d.mean.amax());
        worst = worst.max(rel(qfi(&s, &da).unwrap(), q_vac));
    }
    let t2 = 1e-2 / p.gamma();
    let ratio =
        qfi_rate_single_closed(1e-3, &p, t2).unwrap().rate / classical_bound(&p, t2).unwrap().rate;
    (
        worst <= 1e-12 && ratio > 5.0,
        format!("coherent vs vacuum max deviation {worst:.1e}; squeezed/vacuum rate at γt=1e-2: {ratio:.2}"),
    )
}

fn steady_state_values(states: &mut States) -> Outcome {
    let p = fig_params();
    let t = 40.0 / p.gamma();
    let (s, d) = squeezed_probe(1e-3, &p, t).unwrap();
    states.push(s.cov());
    let q = qfi(&s, &d).unwrap();
    let hom =
        GaussianMeasurement::rank_one(&RankOneMeasurement::homodyne(0.0).unwrap(), 0, 1).unwrap();
    let c = cfi_gaussian(s.cov(), &d.cov, s.mean(), &d.mean, &hom).unwrap();
    let q_ref = DNU * DNU / (NU * NU - 1.0);
    let c_ref = DNU * DNU / (2.0 * NU * NU);
    let (eq, ec) = (rel(q, q_ref), rel(c, c_ref));
    (
        eq <= 1e-6 && ec <= 1e-6 && rel(q_ref, 0.92067) < 1e-5 && rel(c_ref, 0.36201) < 1e-4,
        format!("QFI {q:.8} (rel {eq:.1e}), homodyne CFI {c:.8} (rel {ec:.1e})"),
    )
}

fn optimal_measurement_structure(states: &mut States) -> Outcome {
    let p = fig_params();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let thetas = default_thetas();
    let ls = default_ls();
    let (mut theta_ok, mut short_ok, mut short_cases) = (0, 0, 0);
    for k in 0..20 {
        let r = 10f64.powf(rng.gen_range(-3.0..-0.05));
        // half the inputs in the short-time regime γt ≤ 1e-3
        let gt = if k % 2 == 0 {
            10f64.powf(rng.gen_range(-4.0..-3.0))
        } else {
            10f64.powf(rng.gen_range(-3.0..0.5))
        };
        let t = gt / p.gamma();
        let (s, d) = squeezed_probe(r, &p, t).unwrap();
        states.push(s.cov());
        let grid = measurement_grid(s.cov(), &d.cov, &thetas, &ls).unwrap();
        if (0..ls.len()).all(|j| grid.argmax_theta(j) == 0) {
            theta_ok += 1;
        }
        if gt <= 1e-3 {
            short_cases += 1;
            let best = optimize_gaussian_measurement(s.cov(), &d.cov).unwrap();
            if best.measurement.is_homodyne() && best.value >= grid.max() {
                short_ok += 1;
            }
        }
    }
    (
        theta_ok == 20 && short_ok == short_cases,
        format!("θ*=0 in {theta_ok}/20 inputs; homodyne optimal in {short_ok}/{short_cases} short-time inputs"),
    )
}

fn two_mode_advantage(states: &mut States) -> Outcome {
    let p = fig_params();
    let h = homodyne_optimum(1e-3, &p).unwrap();
    let j = joint_optimum(1e-3, &p).unwrap();
    let (s, _) = tmsv_probe(1e-3, &p, j.t).unwrap();
    states.push(s.cov());
    states.push(joint_output_state(&s).unwrap().cov());
    let (s1, _) = squeezed_probe(1e-3, &p, h.t).unwrap();
    states.push(s1.cov());
    let ratio = j.rate / h.rate;
    (
        (1.5..=2.0).contains(&ratio),
        format!(
            "joint {:.4} at t={:.4e}, homodyne {:.4} at t={:.4e}, ratio {ratio:.4}",
            j.rate, j.t, h.rate, h.t
        ),
    )
}

fn ode_oracle(states: &mut States) -> Outcome {
    let omega0 = 10.0;
    let p = ChannelParams::new(0.2, omega0, 1.0).unwrap();
    let t = 2.0 * std::f64::consts::PI / omega0;
    let init = cv_thermo::gaussian::GaussianState::new(
        DVector::zeros(2),
        DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 2.0])),
    )
    .unwrap();
    let exact = evolve_single(init.cov(), &p, t).unwrap();
    let errs: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&dt| {
            let s = lyapunov_ode_evolve(&init, &p, t, dt).unwrap();
            states.push(s.cov());
            (s.cov() - &exact).amax()
        })
        .collect();
    let orders = [(errs[0] / errs[1]).log10(), (errs[1] / errs[2]).log10()];

    let p1 = fig_params();
    let mut worst = 0.0f64;
    for (r, t) in [(1e-3, 0.37), (0.3, 2.9), (0.8, 11.3)] {
        let sq = squeezed_vacuum(r).unwrap();
        let lab = lyapunov_ode_evolve_with_sensitivity(&sq, &p1, t, 1e-4).unwrap();
        states.push(lab.state.cov());
        let q_lab = qfi_general(
            lab.state.cov(),
            &lab.cov_temperature_derivative,
            lab.state.mean(),
            &DVector::zeros(2),
        )
        .unwrap();
        let closed = evolve_single_lab_frame(&sq, &p1, t).unwrap();
        states.push(closed.cov());
        let (s, d) = squeezed_probe(r, &p1, t).unwrap();
        worst = worst.max(rel(q_lab, qfi(&s, &d).unwrap()));
    }
    (
        orders.iter().all(|&o| o >= 3.8) && worst <= 1e-6,
        format!(
            "errors {:.2e}/{:.2e}/{:.2e}, orders {:.2}, {:.2}; lab vs interaction-picture QFI rel {worst:.1e}",
            errs[0], errs[1], errs[2], orders[0], orders[1]
        ),
    )
}

fn cramer_rao_saturation(states: &mut States) -> Outcome {
    let model = HomodyneModel::steady_state(0.2, 1.0, 0.0).unwrap();
    let p = fig_params();
    let (s, _) = squeezed_probe(1e-3, &p, model.t).unwrap();
    states.push(s.cov());
    let start = Instant::now();
    let report = with_threads(1, || mse_study(&model, 1.0, 10_000, 500, 2024))
        .unwrap()
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    (
        (0.9..=1.2).contains(&report.ratio) && secs < 60.0,
        format!(
            "MSE {:.4e}, CRB {:.4e}, ratio {:.4}, mean T̂ {:.5}; {secs:.2} s single-threaded",
            report.empirical_mse, report.crb, report.ratio, report.t_hat_mean
        ),
    )
}

fn physicality(states: &States) -> Outcome {
    let mut min = f64::INFINITY;
    let mut bad = 0;
    for cov in &states.0 {
        let ph = check_physical(cov).unwrap();
        min = min.min(ph.min_symplectic_eigenvalue);
        if !ph.is_physical {
            bad += 1;
        }
    }
    (
        bad == 0 && min >= 1.0 - 1e-9,
        format!(
            "{} states, {bad} unphysical, min symplectic eigenvalue {min:.12}",
            states.0.len()
        ),
    )
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn golden_regeneration() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut identical = true;
    for name in ["fig3", "fig4", "fig6", "appendix-b"] {
        let cfg = SweepConfig::load(&manifest_dir().join(format!("configs/{name}.toml"))).unwrap();
        let spec = SweepSpec::resolve(&cfg).unwrap();
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        identical &= a.to_csv() == b.to_csv();
        let text =
            std::fs::read_to_string(manifest_dir().join(format!("golden/{name}.csv"))).unwrap();
        let golden = Table::from_csv(&text).unwrap();
        let fresh = Table::from_csv(&a.to_csv()).unwrap();
        if golden.header != fresh.header || golden.rows.len() != fresh.rows.len() {
            return (false, format!("{name}: shape differs from golden file"));
        }
        for (g, f) in golden.rows.iter().zip(&fresh.rows) {
            for (x, y) in g.iter().zip(f) {
                worst = worst.max(rel(*x, *y));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-9 && identical && secs < 120.0,
        format!("max rel deviation from golden {worst:.1e}, repeat runs byte-identical: {identical}; {secs:.2} s"),
    )
}

#[test]
fn acceptance_criteria() {
    let mut states = States::default();
    let results: Vec<(&str, Outcome)> = vec![
        (
            "closed forms vs generic formulas",
            closed_forms_match_generic(&mut states),
        ),
        ("classical bound", classical_bound_holds(&mut states)),
        ("steady-state values", steady_state_values(&mut states)),
        (
            "optimal measurement structure",
            optimal_measurement_structure(&mut states),
        ),
        ("two-mode advantage", two_mode_advantage(&mut states)),
        ("ODE oracle", ode_oracle(&mut states)),
        ("Cramér–Rao saturation", cramer_rao_saturation(&mut states)),
        ("physicality", physicality(&states)),
        ("golden CSVs", golden_regeneration()),
    ];
    // written past the harness's capture so the lines always appear
    let mut err = std::io::stderr().lock();
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        let _ = writeln!(
            err,
            "acceptance {} [{}] {name}: {detail}",
            i + 1,
            if *ok { "PASS" } else { "FAIL" }
        );
    }
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, (_, (ok, _)))| !ok)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
