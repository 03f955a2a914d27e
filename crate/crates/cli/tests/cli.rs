use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qubit_retro::channel::{adjoint, ChannelRep, Ptm};
use qubit_retro::schema::{parse_channel, ChannelSpec};
use qubit_retro_cli::{run, Inputs, RunConfig, EXIT_INPUT, EXIT_NOT_CPTP, EXIT_NO_INVERSE, EXIT_OK};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qubit-retro"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn invoke(args: &[&str], files: &[(&str, &Path)]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    for (flag, path) in files {
        cmd.arg(format!("--{flag}")).arg(path);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn invert_completely_depolarizing_is_discard_and_prepare() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", r#"{"kind":"pauli","p":[0.25,0.25,0.25,0.25]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0.6,0,0]}"#);
    let out_dir = dir.path().join("out");
    let out = invoke(&["invert"], &[("channel", &ch), ("state", &st), ("out", &out_dir)]);
    assert_eq!(code(&out), i32::from(EXIT_OK), "{}", stdout(&out));
    assert!(stdout(&out).contains("discards its input"));

    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("invert.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "inverse");
    assert!((report["a"][0][1].as_f64().unwrap() - 0.6).abs() < 1e-15);
    assert!(report["residual"].as_f64().unwrap() <= 1e-12);
    let inverse = parse_channel(&fs::read_to_string(out_dir.join("inverse.json")).unwrap()).unwrap();
    let mut want = [[0.0; 4]; 4];
    want[0][0] = 1.0;
    want[1][0] = 0.6;
    assert!(inverse.ptm().max_abs_diff(&Ptm(want)) < 1e-12);
}

#[test]
fn invert_off_axis_two_entry_channel_exits_2() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", r#"{"kind":"pauli","p":[0.5,0.5,0,0]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0,0.4,0.3]}"#);
    let out_dir = dir.path().join("out");
    let out = invoke(&["invert"], &[("channel", &ch), ("state", &st), ("out", &out_dir)]);
    assert_eq!(code(&out), i32::from(EXIT_NO_INVERSE));
    assert!(stdout(&out).contains("not unscathed"));
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("invert.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "no-inverse");
    assert!(report["witness"]["direct_residuals"].is_array());
}

#[test]
fn invert_infeasible_state_reports_failed_condition() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", r#"{"kind":"pauli","p":[0.95,0.05,0,0.0]}"#);
    let dep = write(dir.path(), "dep.json", r#"{"kind":"pauli","p":[0.91,0.03,0.03,0.03]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0,0,0.99]}"#);
    let out = invoke(&["invert"], &[("channel", &ch), ("state", &st)]);
    assert_eq!(code(&out), i32::from(EXIT_NO_INVERSE));
    let out = invoke(&["invert"], &[("channel", &dep), ("state", &st)]);
    assert_eq!(code(&out), i32::from(EXIT_NO_INVERSE));
    assert!(stdout(&out).contains("feasibility condition"));
}

#[test]
fn invert_kraus_unitary_gives_adjoint() {
    let dir = TempDir::new().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let body = format!(r#"{{"kind":"kraus","ops":[[[{h},0],[{h},0],[{h},0],[-{h},0]]]}}"#);
    let ch = write(dir.path(), "ch.json", &body);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0.1,0.5,-0.7]}"#);
    let out_dir = dir.path().join("out");
    let out = invoke(&["invert"], &[("channel", &ch), ("state", &st), ("out", &out_dir)]);
    assert_eq!(code(&out), i32::from(EXIT_OK));
    let report: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("invert.json")).unwrap()).unwrap();
    assert!(report["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["route"], "adjoint");
    let inverse = parse_channel(&fs::read_to_string(out_dir.join("inverse.json")).unwrap()).unwrap();
    let e = parse_channel(&body).unwrap();
    assert!(inverse.ptm().max_abs_diff(&adjoint(&e).ptm()) < 1e-10);
}

#[test]
fn non_unital_channel_is_rejected() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", r#"{"kind":"kraus","ops":[[[1,0],[0,0],[0,0],[0.6,0]],[[0,0],[0.8,0],[0,0],[0,0]]]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0,0,0]}"#);
    let out = invoke(&["invert"], &[("channel", &ch), ("state", &st)]);
    assert_eq!(code(&out), i32::from(EXIT_INPUT));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not unital") && err.contains("column 0"), "{err}");
}

#[test]
fn malformed_input_exits_1() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind":"pauli","p":[0.5]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0,0,0]}"#);
    assert_eq!(code(&invoke(&["invert"], &[("channel", &bad), ("state", &st)])), 1);
    assert_eq!(code(&invoke(&["invert"], &[("state", &st)])), 1);
    assert_eq!(code(&invoke(&["scan", "--family", "sideways"], &[])), 1);
    assert_eq!(code(&invoke(&["scan", "--family", "bb84", "--tol", "-1"], &[])), 1);
}

#[test]
fn verify_round_trips_invert_output() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", r#"{"kind":"pauli","p":[0.7,0.1,0.15,0.05]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0.2,-0.3,0.25]}"#);
    let out_dir = dir.path().join("out");
    let out = invoke(&["invert"], &[("channel", &ch), ("state", &st), ("out", &out_dir)]);
    assert_eq!(code(&out), i32::from(EXIT_OK), "{}", stdout(&out));
    let inv = out_dir.join("inverse.json");
    let vdir = dir.path().join("verify");
    let out = invoke(&["verify"], &[("channel", &ch), ("state", &st), ("inverse", &inv), ("out", &vdir)]);
    assert_eq!(code(&out), i32::from(EXIT_OK), "{}", stdout(&out));
    let report: Value = serde_json::from_str(&fs::read_to_string(vdir.join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["forward"].as_array().unwrap().len(), 3);
    assert_eq!(report["reversed"].as_array().unwrap().len(), 3);
    assert!(report["max_discrepancy"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn verify_adjoint_at_maximally_mixed_and_perturbed_candidate() {
    let dir = TempDir::new().unwrap();
    let m = [1.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.4, 0.0, 0.0, -0.4, 0.3, 0.0, 0.0, 0.0, 0.0, 0.5];
    let e = ChannelRep::Ptm(Ptm(std::array::from_fn(|i| std::array::from_fn(|j| m[4 * i + j]))));
    let ch = write(dir.path(), "ch.json", &serde_json::to_string(&ChannelSpec::from_channel(&e)).unwrap());
    let adj = write(dir.path(), "adj.json", &serde_json::to_string(&ChannelSpec::from_channel(&adjoint(&e))).unwrap());
    let mu = write(dir.path(), "mu.json", r#"{"bloch":[0,0,0]}"#);
    let vdir = dir.path().join("v");
    let out = invoke(&["verify"], &[("channel", &ch), ("state", &mu), ("inverse", &adj), ("out", &vdir)]);
    assert_eq!(code(&out), i32::from(EXIT_OK), "{}", stdout(&out));
    let report: Value = serde_json::from_str(&fs::read_to_string(vdir.join("verify.json")).unwrap()).unwrap();
    assert!(report["max_discrepancy"].as_f64().unwrap() <= 1e-12);

    let mut t = adjoint(&e).ptm();
    t.0[1][1] *= 0.9;
    let perturbed = write(dir.path(), "pert.json", &serde_json::to_string(&ChannelSpec::from_channel(&ChannelRep::Ptm(t))).unwrap());
    let out = invoke(&["verify"], &[("channel", &ch), ("state", &mu), ("inverse", &perturbed)]);
    assert_eq!(code(&out), i32::from(EXIT_INPUT));
    assert!(stdout(&out).contains("asymmetric"));
}

#[test]
fn verify_rejects_non_cptp_candidate() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", r#"{"kind":"pauli","p":[0.7,0.1,0.1,0.1]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0,0,0]}"#);
    let bad = write(dir.path(), "bad.json", r#"{"kind":"ptm","m":[1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,-1]}"#);
    let out = invoke(&["verify"], &[("channel", &ch), ("state", &st), ("inverse", &bad)]);
    assert_eq!(code(&out), i32::from(EXIT_NOT_CPTP));
}

#[test]
fn scan_writes_csv_and_svg() {
    let dir = TempDir::new().unwrap();
    let out = invoke(&["scan", "--family", "depolarizing", "--resolution", "51", "--out"], &[]);
    assert_eq!(code(&out), 1, "--out needs a value");
    let out = bin()
        .args(["scan", "--family", "depolarizing", "--resolution", "41", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("chi"));
    let csv = fs::read_to_string(dir.path().join("depolarizing_41.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1681);
    let p75 = format!("{:.16e}", 0.75);
    let col: Vec<&&str> = rows.iter().filter(|r| r.starts_with(&format!("{p75},"))).collect();
    assert_eq!(col.len(), 41);
    assert!(col.iter().all(|r| r.split(',').nth(2) == Some("1")));
    assert!(dir.path().join("depolarizing_41.svg").exists());

    let out = bin().args(["scan", "--family", "bb84", "--resolution", "51", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(dir.path().join("bb84_51.csv")).unwrap();
    let verdicts: Vec<&str> = csv.lines().skip(1).map(|r| r.split(',').nth(2).unwrap()).collect();
    for i in 0..51 {
        for j in 0..51 {
            assert_eq!(verdicts[i * 51 + j], verdicts[(50 - i) * 51 + j]);
        }
    }
}

#[test]
fn scan_to_unwritable_path_fails() {
    let dir = TempDir::new().unwrap();
    let blocker = write(dir.path(), "file", "x");
    let out = bin().args(["scan", "--family", "bb84", "--resolution", "5", "--out"]).arg(blocker.join("sub")).output().unwrap();
    assert_eq!(code(&out), 1);
}

#[test]
fn three_entry_summary_and_determinism() {
    let dir = TempDir::new().unwrap();
    let args = ["three-entry", "--samples", "100", "--seed", "3", "--out"];
    let a = bin().args(args).arg(dir.path().join("a")).output().unwrap();
    let b = bin().args(["scan", "--family", "three-entry", "--samples", "100", "--seed", "3", "--out"]).arg(dir.path().join("b")).output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    assert!(stdout(&a).contains("84 of 84"));
    let ca = fs::read(dir.path().join("a/three-entry_8.csv")).unwrap();
    let cb = fs::read(dir.path().join("b/three-entry_8.csv")).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn kraus_and_unscathed_commands() {
    let dir = TempDir::new().unwrap();
    let ch = write(dir.path(), "ch.json", r#"{"kind":"pauli","p":[0,0,0.5,0.5]}"#);
    let st = write(dir.path(), "st.json", r#"{"bloch":[0.7,0,0]}"#);
    let out_dir = dir.path().join("out");
    let out = invoke(&["kraus"], &[("channel", &ch), ("out", &out_dir)]);
    assert_eq!(code(&out), 0);
    let k: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("kraus.json")).unwrap()).unwrap();
    assert_eq!(k["kraus"].as_array().unwrap().len(), 2);
    let out = invoke(&["unscathed"], &[("channel", &ch), ("state", &st)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("unscathed: yes (P(rho) = s2 rho s2)"), "{}", stdout(&out));
}

#[test]
fn runner_is_callable_in_process() {
    let dir = TempDir::new().unwrap();
    let inputs = Inputs {
        family: Some(qubit_retro_cli::ScanFamily::Bb84),
        resolution: Some(9),
        tol: 1e-9,
        out: Some(dir.path().to_path_buf()),
        ..Inputs::default()
    };
    let cfg = RunConfig::new(qubit_retro_cli::Command::Scan, inputs).unwrap();
    let mut sink = Vec::new();
    assert_eq!(run(&cfg, &mut sink).unwrap(), EXIT_OK);
    assert!(String::from_utf8(sink).unwrap().contains("cells: 81"));
    assert!(RunConfig::new(qubit_retro_cli::Command::Scan, Inputs { tol: 0.0, ..Inputs::default() }).is_err());
}
