use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hecke-forge"));
    cmd.args(args).env_remove("HECKE_FORGE_CACHE");
    if let Some(dir) = cache {
        cmd.env("HECKE_FORGE_CACHE", dir);
    }
    cmd.output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn satake_a1_mu2_text() {
    let v = json_of(&run(&["compute", "satake", "--type", "A1", "--mu", "2"], None));
    assert_eq!(v["value"]["text"], "(v^4)*t[2] + (v^4 - v^2)*t[1] + (v^4 - v^2)*t[0] + (v^4 - v^2)*t[-1] + (v^4)*t[-2]");
}

#[test]
fn character_of_zero_is_one() {
    let out = run(&["compute", "character", "--type", "B2", "--mu", "0,0", "--output", "text"], None);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "(1)*t[0, 0]");
}

#[test]
fn kl_polynomial_and_cache_fill() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(&run(&["compute", "kl", "--type", "A1", "--x", "s", "--y", "s,s0,s"], Some(dir.path())));
    assert_eq!(v["text"], "1");
    let stats = json_of(&run(&["cache", "stats", "--type", "A1"], Some(dir.path())));
    assert!(stats["entries"].as_u64().unwrap() > 0);
    let again = json_of(&run(&["compute", "kl", "--type", "A1", "--x", "s", "--y", "s,s0,s"], Some(dir.path())));
    assert_eq!(again, v);
    json_of(&run(&["cache", "clear", "--type", "A1"], Some(dir.path())));
    let stats = json_of(&run(&["cache", "stats", "--type", "A1"], Some(dir.path())));
    assert_eq!(stats["entries"], 0);
}

#[test]
fn env_overrides_cache_flag() {
    let flag = tempfile::tempdir().unwrap();
    let env = tempfile::tempdir().unwrap();
    let flag_s = flag.path().to_str().unwrap();
    let v = json_of(&run(&["cache", "path", "--type", "A2", "--cache", flag_s], Some(env.path())));
    assert!(v["path"].as_str().unwrap().starts_with(env.path().to_str().unwrap()));
}

#[test]
fn verify_lk_a1_passes() {
    let v = json_of(&run(&["verify", "--suite", "lk", "--type", "A1", "--max-height", "6"], None));
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["suite"], "lk");
}

#[test]
fn corrupted_cache_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = run(&["cache", "path", "--type", "A1", "--output", "text"], Some(dir.path()));
    let path = String::from_utf8(path.stdout).unwrap();
    json_of(&run(&["compute", "kl", "--type", "A1", "--x", "e", "--y", "s,s0"], Some(dir.path())));
    let mut body = std::fs::read_to_string(path.trim()).unwrap();
    body.push_str("{not json\n");
    std::fs::write(path.trim(), body).unwrap();
    let out = run(&["cache", "stats", "--type", "A1"], Some(dir.path()));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn bad_input_exits_2() {
    for args in [
        &["compute", "satake", "--type", "E8", "--mu", "1"][..],
        &["compute", "satake", "--type", "A1", "--mu", "-1"],
        &["compute", "satake", "--type", "A1", "--lattice", "xx", "--mu", "1"],
        &["compute", "kl", "--type", "A1", "--x", "s7", "--y", "s"],
        &["verify", "nosuch", "--type", "A1"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args, None).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn json_output_is_byte_deterministic() {
    let args = ["compute", "zonal", "--type", "B2", "--lattice", "ad", "--mu", "1,0"];
    let a = run(&args, None);
    let b = run(&args, None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}
