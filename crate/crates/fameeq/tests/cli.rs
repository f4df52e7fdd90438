use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fameeq::io::{read_channel, EqualizerFixture, QuantizationFixture};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fameeq"))
}

fn smoke_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/smoke.toml")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn missing_config_exits_2_and_names_the_path() {
    let o = run(bin().args(["ber-sweep", "--config", "/nonexistent/fameeq.toml"]));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/fameeq.toml"), "{}", stderr(&o));
}

#[test]
fn malformed_config_exits_2_with_a_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "seed = 1\n[sim]\nantennas = \"many\"\n").unwrap();
    let o = run(bin().arg("ber-sweep").arg("--config").arg(&p));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(bin().arg("frobnicate")).status.code(), Some(2));
    assert_eq!(run(bin().args(["ber-sweep", "--equalizer", "flmmse"])).status.code(), Some(2));
}

fn sweep_csv(out: &Path, threads: &str, extra: &[&str]) -> String {
    let o = run(bin()
        .arg("ber-sweep")
        .arg("--config")
        .arg(smoke_config())
        .arg("--out")
        .arg(out)
        .args(extra)
        .env("FAMEEQ_THREADS", threads));
    assert!(o.status.success(), "{}", stderr(&o));
    std::fs::read_to_string(out.join("ber.csv")).unwrap()
}

#[test]
fn smoke_sweep_writes_one_row_per_point_and_equalizer() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sweep_csv(dir.path(), "1", &[]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "snr_db,equalizer,bits,ber,fer,bit_errors,bits_counted,frames");
    assert_eq!(lines.len(), 1 + 2 * 3);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ber.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 42);
    assert_eq!(json["config"]["users"], 2);
}

#[test]
fn same_seed_gives_identical_csv_for_any_worker_count() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let one = sweep_csv(a.path(), "1", &[]);
    assert_eq!(one, sweep_csv(b.path(), "1", &[]));
    assert_eq!(one, sweep_csv(c.path(), "4", &[]));
    let d = tempfile::tempdir().unwrap();
    assert_ne!(one, sweep_csv(d.path(), "1", &["--seed", "43"]));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sweep_csv(
        dir.path(),
        "1",
        &["--snr", "-3,0,3", "--equalizer", "FAME_FBS,1", "--frames", "1"],
    );
    let lines: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("-3,FAME_FBS,1,"));
    assert!(lines.iter().all(|l| l.ends_with(",1")));
}

#[test]
fn mse_check_passes_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["mse-check", "--seed", "3", "--out"]).arg(dir.path()));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{out}{}", stderr(&o));
    assert!(out.lines().any(|l| l.starts_with("PASS")), "{out}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mse_check.json")).unwrap()).unwrap();
    let inst = v["instances"].as_array().unwrap();
    assert_eq!(inst.len(), 21);
    assert!(inst[20]["analytic"].as_f64().unwrap() < 1e-10);
}

#[test]
fn mse_check_fails_with_exit_1_when_tolerance_is_impossible() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("strict.toml");
    std::fs::write(&p, "[mse_check]\ninstances = 2\ndraws = 1000\ntolerance = 1e-9\n").unwrap();
    let o = run(bin().arg("mse-check").arg("--config").arg(&p));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn oracle_gap_ratios_and_determinism() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = run(bin().args(["oracle-gap", "--seed", "9", "--out"]).arg(d.path()));
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let csv = std::fs::read_to_string(a.path().join("oracle_gap.csv")).unwrap();
    assert_eq!(csv, std::fs::read_to_string(b.path().join("oracle_gap.csv")).unwrap());
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 100);
    for r in &rows {
        assert!(r[5] >= 1.0 - 1e-12 && r[6] >= 1.0 - 1e-12, "{r:?}");
    }
}

#[test]
fn oracle_gap_over_budget_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("big.toml");
    std::fs::write(&p, "[oracle_gap]\nantennas = 16\nbits = 2\n").unwrap();
    let o = run(bin().arg("oracle-gap").arg("--config").arg(&p));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("budget"), "{}", stderr(&o));
}

#[test]
fn quantize_demo_prints_bins_and_writes_fixtures() {
    let o = run(bin().args(["quantize-demo", "--bits", "2", "--values", "1.0-0.1i,0+-1i,0.49+0.51i"]));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.contains("w_max 1"), "{out}");
    assert!(out.contains("\n0,1,-0.1,3,-1,0.75,-0.25\n"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let o = run(bin().args(["quantize-demo", "--bits", "3", "--seed", "4", "--out"]).arg(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    let q: QuantizationFixture =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("quantization.json")).unwrap()).unwrap();
    assert_eq!(q.bits, 3);
    assert!(q.integers.iter().flatten().all(|v| v % 2 != 0 && v.abs() <= 7));
    let ch = read_channel(std::fs::File::open(dir.path().join("channel.bin")).unwrap()).unwrap();
    assert_eq!((ch.antennas(), ch.users(), ch.subcarriers()), (4, 2, 1));
    let fx: EqualizerFixture =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("flmmse.json")).unwrap()).unwrap();
    assert_eq!(fx.rows.len(), 2);
    assert_eq!(fx.rows[0].integers.len(), 4);

    let o = run(bin().args(["quantize-demo", "--values", "abc"]));
    assert_eq!(o.status.code(), Some(2));
}
