//! Scenario sweeps as CSV tables.

use cv_thermo::sweep::{preset, run_sweep, Scenario, SweepConfig, SweepSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = preset(Scenario::Fig4);
    cfg.points = Some(6);
    let spec = SweepSpec::resolve(&cfg).map_err(|p| p.join("; "))?;
    print!("{}", run_sweep(&spec)?.to_csv());

    let custom = SweepConfig::from_toml(
        r#"
        quantities = ["qfi_rate", "classical_bound", "cfi_hom_rate"]
        T = 0.2
        gamma = 0.1
        t_min = 1e-3
        t_max = 10.0
        points = 5
        "#,
    )?;
    let spec = SweepSpec::resolve(&custom).map_err(|p| p.join("; "))?;
    let table = run_sweep(&spec)?;
    println!();
    print!("{}", table.to_csv());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
