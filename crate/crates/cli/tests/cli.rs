use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ainf_cli::modelfile::ModelFile;

fn ainf(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ainf"))
        .args(args)
        .env("AINF_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path();
    assert_eq!(code(&ainf(&["verify", "3", "1", "2"], c)), 0);
    assert_eq!(code(&ainf(&["verify", "--p", "4", "--n", "1", "--q", "2"], c)), 2);
    assert_eq!(code(&ainf(&["verify", "--p", "5", "--n", "1", "--q", "3"], c)), 2);
    assert_eq!(code(&ainf(&["transfer", "--p", "3", "--n", "1", "--q", "1"], c)), 2);
    assert_eq!(code(&ainf(&["transfer", "--p", "5", "--n", "1", "--q", "2", "--window", "6"], c)), 3);
    // clap's own usage errors
    assert_eq!(code(&ainf(&["frobnicate"], c)), 2);
    assert_eq!(code(&ainf(&["verify", "--p", "x"], c)), 2);
}

#[test]
fn flags_and_positionals_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = ainf(&["transfer", "5", "1", "2"], dir.path());
    let b = ainf(&["transfer", "--p", "5", "--n", "1", "--q", "2"], dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn model_files_are_byte_identical() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let f1 = out.path().join("a.model");
    let f2 = out.path().join("b.model");
    let f3 = out.path().join("c.model");
    let args = |f: &Path| vec!["transfer".to_string(), "5".into(), "1".into(), "2".into(), "--out".into(), f.display().to_string()];
    let run = |f: &Path, c: &Path| {
        let a = args(f);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        ainf(&a, c)
    };
    let r1 = run(&f1, d1.path());
    assert!(stderr(&r1).contains("cache miss"), "{}", stderr(&r1));
    let r2 = run(&f2, d1.path());
    assert!(stderr(&r2).contains("cache hit"), "{}", stderr(&r2));
    run(&f3, d2.path());
    let b1 = fs::read(&f1).unwrap();
    assert_eq!(b1, fs::read(&f2).unwrap());
    assert_eq!(b1, fs::read(&f3).unwrap());
    let text = String::from_utf8(b1).unwrap();
    let parsed = ModelFile::parse(&text).unwrap();
    assert_eq!(parsed.emit(), text);
    assert!(parsed.to_algebra().is_ok());
}

#[test]
fn corrupt_cache_entries_are_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let f1 = out.path().join("a.model");
    let f2 = out.path().join("b.model");
    let f1s = f1.display().to_string();
    let f2s = f2.display().to_string();
    assert_eq!(code(&ainf(&["loops", "3", "1", "2", "--out", &f1s], dir.path())), 0);
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1, "no stray temporary files");
    let cached = &entries[0];
    let mut text = fs::read_to_string(cached).unwrap();
    text = text.replacen("operation 2", "operation 2 ", 1).replacen("1:", "2:", 1);
    fs::write(cached, text).unwrap();
    let r = ainf(&["loops", "3", "1", "2", "--out", &f2s], dir.path());
    assert_eq!(code(&r), 0);
    assert!(stderr(&r).contains("cache rebuilt"), "{}", stderr(&r));
    assert_eq!(fs::read(&f1).unwrap(), fs::read(&f2).unwrap());
    assert_eq!(fs::read(&f1).unwrap(), fs::read(cached).unwrap());
}

#[test]
fn json_reports_parse() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in ["verify", "transfer", "massey", "check-stasheff", "loops", "classify"] {
        let o = ainf(&[cmd, "5", "1", "2", "--json"], dir.path());
        assert_eq!(code(&o), 0, "{cmd}: {}", stderr(&o));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["command"], cmd);
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn json_model_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let f = out.path().join("m.json");
    let fs_ = f.display().to_string();
    let o = ainf(&["model", "3", "1", "2", "--window", "8", "--json", "--out", &fs_], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&f).unwrap();
    let m = ModelFile::from_json(&text).unwrap();
    assert_eq!(m.to_json(), text);
    assert_eq!(m.arity_bound, 2);
}

#[test]
fn other_commands_succeed() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["check-stasheff", "7", "1", "3"],
        vec!["classify", "5", "1", "2", "--arity", "6", "--window", "2"],
        vec!["massey", "3", "1", "2"],
        vec!["loops", "5", "1", "4"],
        vec!["model", "3", "1", "2", "--window", "8"],
    ] {
        let o = ainf(&args, dir.path());
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
        assert!(!o.stdout.is_empty());
    }
}
