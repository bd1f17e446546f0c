use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cv-thermo"));
    c.env_remove("CV_THERMO_SEED");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("c.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn field<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

#[test]
fn sweep_writes_golden_table() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig3", "fig4", "fig6", "appendix-b"] {
        let out = dir.path().join(format!("{name}.csv"));
        let o = run(bin()
            .args(["sweep", "--config"])
            .arg(config(&format!("{name}.toml")))
            .arg("--out")
            .arg(&out)
            .args(["--threads", "2"]));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let fresh = std::fs::read(&out).unwrap();
        let golden =
            std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("golden/{name}.csv")))
                .unwrap();
        assert_eq!(fresh, golden, "{name}");
    }
}

#[test]
fn sweep_output_independent_of_threads() {
    let one = run(bin()
        .args(["sweep", "--config"])
        .arg(config("fig4.toml"))
        .args(["--threads", "1"]));
    let many = run(bin()
        .args(["sweep", "--config"])
        .arg(config("fig4.toml"))
        .args(["--threads", "4"]));
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn sweep_csv_format() {
    let o = run(bin()
        .args(["sweep", "--config"])
        .arg(config("fig3.toml"))
        .args([
            "--scenario",
            "custom",
            "--quantities",
            "qfi,classical_bound",
            "--points",
            "5",
        ]));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,qfi,classical_bound");
    assert_eq!(lines.len(), 6);
    for l in &lines[1..] {
        assert!(!l.ends_with(','));
        let cells: Vec<&str> = l.split(',').collect();
        assert_eq!(cells.len(), 3);
        for c in cells {
            let mantissa = c.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(
                mantissa.chars().filter(char::is_ascii_digit).count(),
                12,
                "{c}"
            );
            c.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn estimate_is_reproducible() {
    let args = ["estimate", "--M", "1000", "--trials", "100", "--seed", "3"];
    let a = run(bin()
        .args(args)
        .arg("--config")
        .arg(config("steady-state.toml")));
    let b = run(bin()
        .args(args)
        .arg("--config")
        .arg(config("steady-state.toml")));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let report = stdout(&a);
    for key in [
        "T_true",
        "t",
        "M",
        "trials",
        "seed",
        "T_hat",
        "empirical_mse",
        "fisher",
        "crb",
        "ratio",
        "clipped",
        "status",
    ] {
        field(&report, key);
    }
    assert_eq!(field(&report, "seed"), "3");
    let ratio: f64 = field(&report, "ratio").parse().unwrap();
    assert!(ratio > 0.0 && ratio < 10.0);
}

#[test]
fn estimate_steady_state_saturates_bound() {
    let o = run(bin()
        .args(["estimate", "--M", "10000", "--trials", "500"])
        .arg("--config")
        .arg(config("steady-state.toml")));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout(&o);
    let ratio: f64 = field(&report, "ratio").parse().unwrap();
    assert!((0.9..=1.2).contains(&ratio), "{report}");
    assert_eq!(field(&report, "status"), "pass");
}

#[test]
fn estimate_joint_measurement() {
    let o = run(bin()
        .args(["estimate", "--M", "2000", "--trials", "200"])
        .arg("--config")
        .arg(config("joint.toml")));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(field(&stdout(&o), "seed"), "7");
}

#[test]
fn raw_samples_dump() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("samples.txt");
    let o = run(bin()
        .args(["estimate", "--M", "50", "--trials", "100", "--seed", "12"])
        .arg("--config")
        .arg(config("steady-state.toml"))
        .arg("--samples")
        .arg(&dump));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&dump).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# seed=12 T=1 t=200 L=0");
    let values: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 50);
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "T = 1.0\nomega = 1.0\ngamma = 0.2\n");
    let base = ["estimate", "--M", "100", "--trials", "100", "--config"];

    let o = run(bin().args(base).arg(&cfg));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no seed"));

    let o = run(bin().args(base).arg(&cfg).env("CV_THERMO_SEED", "5"));
    assert_eq!(field(&stdout(&o), "seed"), "5");

    let o = run(bin()
        .args(base)
        .arg(&cfg)
        .args(["--seed", "9"])
        .env("CV_THERMO_SEED", "5"));
    assert_eq!(field(&stdout(&o), "seed"), "9");

    // a seed in the file beats the environment
    let o = run(bin()
        .args(base)
        .arg(config("joint.toml"))
        .env("CV_THERMO_SEED", "5"));
    assert_eq!(field(&stdout(&o), "seed"), "7");
}

#[test]
fn validate_reports_problems() {
    let o = run(bin()
        .args(["validate", "--config"])
        .arg(config("fig3.toml")));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ok");

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r = 0.0\n");
    let o = run(bin().args(["validate", "--config"]).arg(&cfg));
    assert_ne!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("r must be in (0,1]"), "{}", stdout(&o));

    let cfg = write_config(
        dir.path(),
        "scenario = \"custom\"\nquantities = [\"qfi_rate\"]\nt_min = 0.0\nspacing = \"linear\"\n",
    );
    let o = run(bin().args(["validate", "--config"]).arg(&cfg));
    assert_ne!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("qfi_rate"), "{}", stdout(&o));
}

#[test]
fn bad_input_is_an_error() {
    let o = run(bin().args(["sweep", "--config", "/nonexistent.toml"]));
    assert_eq!(o.status.code(), Some(2));
    let o = run(bin()
        .args(["sweep", "--config"])
        .arg(config("fig3.toml"))
        .args(["--scenario", "fig9"]));
    assert_ne!(o.status.code(), Some(0));
    let o = run(bin().args(["validate", "--config", "/nonexistent.toml"]));
    assert_eq!(o.status.code(), Some(2));
}
