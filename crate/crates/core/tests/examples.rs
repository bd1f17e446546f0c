//! Runs every example so they stay in sync with the library.

#[allow(dead_code)]
#[path = "../examples/gaussian_states.rs"]
mod gaussian_states;

#[allow(dead_code)]
#[path = "../examples/thermal_channel.rs"]
mod thermal_channel;

#[allow(dead_code)]
#[path = "../examples/quantum_fisher.rs"]
mod quantum_fisher;

#[allow(dead_code)]
#[path = "../examples/gaussian_measurements.rs"]
mod gaussian_measurements;

#[allow(dead_code)]
#[path = "../examples/two_mode_advantage.rs"]
mod two_mode_advantage;

#[allow(dead_code)]
#[path = "../examples/cramer_rao_study.rs"]
mod cramer_rao_study;

#[allow(dead_code)]
#[path = "../examples/figure_sweeps.rs"]
mod figure_sweeps;

#[test]
fn gaussian_states_runs() {
    gaussian_states::run_example().unwrap();
}

#[test]
fn thermal_channel_runs() {
    thermal_channel::run_example().unwrap();
}

#[test]
fn quantum_fisher_runs() {
    quantum_fisher::run_example().unwrap();
}

#[test]
fn gaussian_measurements_runs() {
    gaussian_measurements::run_example().unwrap();
}

#[test]
fn two_mode_advantage_runs() {
    two_mode_advantage::run_example().unwrap();
}

#[test]
fn cramer_rao_study_runs() {
    cramer_rao_study::run_example().unwrap();
}

#[test]
fn figure_sweeps_runs() {
    figure_sweeps::run_example().unwrap();
}
