use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hardylab::gridfn::{Extension, GridFunction};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hardylab"))
}

fn run_in(dir: &Path, args: &[&str]) -> (Output, Value) {
    let out = bin().current_dir(dir).args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out, json)
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn fixtures() -> TempDir {
    let dir = TempDir::new().unwrap();
    write(&dir, "tent.csv", "r,value\n1,1\n2,0\n");
    write(&dir, "one.json", r#"{"segments":[{"lo":0,"hi":"inf","terms":[{"c":1}]}]}"#);
    write(&dir, "isq.json", r#"{"segments":[{"lo":0,"hi":"inf","terms":[{"c":1,"a":-2}]}]}"#);
    write(
        &dir,
        "q.json",
        r#"{"segments":[{"lo":0,"hi":1,"terms":[]},{"lo":1,"hi":"inf","terms":[{"c":0.2,"a":-2}]}]}"#,
    );
    write(&dir, "u.csv", "r,value\n0.5,0.2\n1,1\n2,0.7\n4,0.1\n8,0\n");
    dir
}

#[test]
fn verify_tent() {
    let dir = fixtures();
    let (out, json) = run_in(dir.path(), &["verify", "--u", "tent.csv", "--p", "2"]);
    assert!(out.status.success());
    let r = &json["result"];
    assert_eq!(r["improved_lhs"], 2.0);
    assert!((r["classical_lhs"].as_f64().unwrap() - (4.0 - 4.0 * 2f64.ln())).abs() < 1e-12);
    assert_eq!(r["holds"]["improved"], true);
    assert_eq!(json["command_echo"][0], "verify");
    assert!(json["wall_time_ms"].is_number());
    assert_eq!(json["tool_version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn verify_weighted() {
    let dir = fixtures();
    let (out, json) =
        run_in(dir.path(), &["verify", "--u", "u.csv", "--p", "2", "--weights", "isq.json", "--v", "one.json"]);
    assert!(out.status.success());
    let w = &json["result"]["weighted"];
    assert_eq!(w["holds_overline"], true);
    assert!((w["overline"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn p_below_one_is_rejected() {
    let dir = fixtures();
    let (out, json) = run_in(
        dir.path(),
        &["constants", "--p", "0.5", "--v", "one.json", "--w", "isq.json", "--variant", "overline"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(json["error"]["message"].as_str().unwrap().contains("p must exceed 1"));
    assert_eq!(json["error"]["kind"], "precondition");
}

#[test]
fn unknown_flag_is_rejected() {
    let dir = fixtures();
    let (out, json) = run_in(dir.path(), &["verify", "--u", "tent.csv", "--p", "2", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json["error"]["kind"], "usage");
}

#[test]
fn missing_file_is_an_input_error() {
    let dir = fixtures();
    let (out, json) = run_in(dir.path(), &["verify", "--u", "nope.csv", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json["error"]["message"].as_str().unwrap().contains("nope.csv"));
}

#[test]
fn help_exits_zero() {
    let out = bin().args(["sharp", "--help"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("--eps"));
}

#[test]
fn constants_closed_form() {
    let dir = fixtures();
    let (out, json) = run_in(
        dir.path(),
        &["constants", "--v", "one.json", "--w", "isq.json", "--p", "2", "--variant", "underline"],
    );
    assert!(out.status.success());
    assert!((json["result"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((json["result"]["upper_bound_on_C"].as_f64().unwrap() - 4.0).abs() < 1e-5);
}

#[test]
fn constants_interval_needs_radius() {
    let dir = fixtures();
    let (out, _) = run_in(
        dir.path(),
        &["constants", "--v", "one.json", "--w", "isq.json", "--p", "2", "--variant", "overline", "--interval", "origin-interval"],
    );
    assert_eq!(out.status.code(), Some(2));
    let (out, json) = run_in(
        dir.path(),
        &[
            "constants", "--v", "one.json", "--w", "isq.json", "--p", "2", "--variant", "overline",
            "--interval", "origin-interval", "--interval-R", "1",
        ],
    );
    assert!(out.status.success(), "{json}");
    assert_eq!(json["result"]["variant"]["interval"]["type"], "origin-interval");
}

#[test]
fn spectrum_subcritical_is_certified() {
    let dir = fixtures();
    let (out, json) = run_in(dir.path(), &["spectrum", "--q", "q.json", "--dim", "3"]);
    assert!(out.status.success());
    let r = &json["result"];
    assert_eq!(r["certificate"]["status"], "finite-certified");
    assert_eq!(r["totals"], serde_json::json!([0, 0, 0]));
    assert_eq!(r["sectors"].as_array().unwrap().len(), 9);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = fixtures();
    let args = ["spectrum", "--q", "q.json", "--dim", "3", "--no-timing"];
    let a = bin().current_dir(dir.path()).args(args).env("HARDYLAB_THREADS", "1").output().unwrap();
    let b = bin().current_dir(dir.path()).args(args).env("HARDYLAB_THREADS", "4").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn duality_reports_extremizer_check() {
    let dir = fixtures();
    write(&dir, "g.csv", "r,value\n0,1\n1,3\n2,0.5\n3,0\n");
    let (out, json) = run_in(dir.path(), &["duality", "--g", "g.csv", "--family", "nu_upper", "--alpha", "1"]);
    assert!(out.status.success());
    let r = &json["result"];
    let v = r["value"].as_f64().unwrap();
    let s = r["extremizer_check"]["sup_pairing"].as_f64().unwrap();
    assert!((v - s).abs() <= 1e-12 * v);
    let (_, json) = run_in(dir.path(), &["duality", "--g", "g.csv", "--family", "mu_lower", "--alpha", "1"]);
    assert!(json["result"]["extremizer_check"].is_null());
}

#[test]
fn transform_outputs_round_trip() {
    let dir = fixtures();
    let (out, json) = run_in(
        dir.path(),
        &["transform", "--op", "substitute", "--v", "one.json", "--w", "isq.json", "--u", "u.csv", "--p", "2", "--out", "ut.csv"],
    );
    assert!(out.status.success(), "{json}");
    let csv = json["result"]["u_tilde_csv"].as_str().unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("ut.csv")).unwrap(), csv);
    let g = GridFunction::read_csv(csv.as_bytes(), Extension::LinearToZeroAtOrigin).unwrap();
    assert_eq!(g.to_csv(), csv);

    let (out, json) = run_in(dir.path(), &["transform", "--op", "logmap", "--w", "one.json", "--u", "u.csv", "--R", "2"]);
    // W must vanish below R
    assert_eq!(out.status.code(), Some(2), "{json}");
}

#[test]
fn invert_is_an_involution() {
    let dir = fixtures();
    let (_, json) = run_in(dir.path(), &["transform", "--op", "invert", "--v", "one.json", "--w", "isq.json", "--p", "3"]);
    write(&dir, "vi.json", &json["result"]["v"].to_string());
    write(&dir, "wi.json", &json["result"]["w"].to_string());
    let (_, back) = run_in(dir.path(), &["transform", "--op", "invert", "--v", "vi.json", "--w", "wi.json", "--p", "3"]);
    assert_eq!(back["result"]["v"]["segments"][0]["a"], 0.0);
    assert_eq!(back["result"]["w"]["segments"][0]["a"], -2.0);
}

#[test]
fn rearrange_sorts_cells() {
    let dir = fixtures();
    write(&dir, "f.csv", "r,value\n1,3\n2,1\n3,2\n4,0\n");
    let (out, json) = run_in(dir.path(), &["rearrange", "--f", "f.csv"]);
    assert!(out.status.success());
    assert_eq!(json["result"]["fstar_csv"], "r,value\n0.0,3.0\n1.0,2.0\n2.0,1.0\n3.0,0.0\n");
}

#[test]
fn sharp_sandwich() {
    let dir = fixtures();
    let (out, json) = run_in(
        dir.path(),
        &["sharp", "--v", "one.json", "--w", "isq.json", "--p", "2", "--eps", "1e-3", "--L", "1e3", "--n", "400"],
    );
    assert!(out.status.success(), "{json}");
    let r = &json["result"];
    assert_eq!(r["ordered"], true);
    assert!(r["estimate"].as_f64().unwrap() <= 4.0);
}
