//! End-to-end runs of the `voxbox` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn voxbox(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_voxbox"))
        .current_dir(dir)
        .env_remove("VOXBOX_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stats(out: &Output) -> Vec<(String, String)> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn stat(out: &Output, key: &str) -> String {
    stats(out).into_iter().find(|(k, _)| k == key).map(|(_, v)| v).unwrap_or_else(|| panic!("missing stat {key}"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn constant_field(dir: &Path) {
    let mut s = String::from("VVF 2 1 4 4\n7\n7\n");
    for _ in 0..16 {
        s.push_str("7\n");
    }
    write(dir, "c.vvf", &s);
    write(dir, "c.poly", "x1\n");
}

#[test]
fn constant_field_is_one_entry_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    constant_field(dir.path());
    let a = voxbox(dir.path(), &["compress", "--field", "c.vvf", "--poly", "c.poly", "--eps", "1/10", "--out", "a.vbx"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stat(&a, "entries"), "1");
    let b = voxbox(dir.path(), &["compress", "--field", "c.vvf", "--poly", "c.poly", "--eps", "1/10", "--out", "b.vbx"]);
    assert_eq!(std::fs::read(dir.path().join("a.vbx")).unwrap(), std::fs::read(dir.path().join("b.vbx")).unwrap());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn eps_must_be_below_one() {
    let dir = tempfile::tempdir().unwrap();
    constant_field(dir.path());
    let out = voxbox(dir.path(), &["compress", "--field", "c.vvf", "--poly", "c.poly", "--eps", "1", "--out", "a.vbx"]);
    assert_eq!(out.status.code(), Some(1));
    let out = voxbox(dir.path(), &["compress", "--field", "c.vvf", "--poly", "c.poly", "--eps", "1/2", "--mode", "exact", "--out", "a.vbx"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn roundtrip_verifies_and_corruption_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut s = String::from("VVF 2 2 3 4\n0 0\n3 3\n");
    for i in 0..12 {
        s.push_str(&format!("{}/4 {}/5\n", i % 4, i / 4));
    }
    write(d, "f.vvf", &s);
    write(d, "f.poly", "# energy\nx1*x1-x2+1/3*x1*x2\n");
    let c = voxbox(d, &["compress", "--field", "f.vvf", "--poly", "f.poly", "--eps", "1/10", "--out", "f.vbx"]);
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stderr));
    let r = voxbox(d, &["decompress", "--code", "f.vbx", "--out", "g.vvf", "--verify", "--field", "f.vvf"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(stat(&r, "violations"), "0");

    let bytes = std::fs::read(d.join("f.vbx")).unwrap();
    std::fs::write(d.join("cut.vbx"), &bytes[..bytes.len() / 2]).unwrap();
    let bad = voxbox(d, &["decompress", "--code", "cut.vbx", "--out", "h.vvf"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("malformed"));

    write(d, "small.vvf", "VVF 1 2 2\n0 0\n1 1\n0 0\n1 1\n");
    let mismatch = voxbox(d, &["decompress", "--code", "f.vbx", "--out", "g.vvf", "--verify", "--field", "small.vvf"]);
    assert_eq!(mismatch.status.code(), Some(1));

    let missing = voxbox(d, &["decompress", "--code", "nope.vbx", "--out", "g.vvf"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut s = String::from("VVF 2 1 6 5\n0\n29\n");
    for i in 0..30 {
        s.push_str(&format!("{}\n", (i * 7) % 30));
    }
    write(d, "t.vvf", &s);
    write(d, "t.poly", "1/10*x1\n");
    let mut outputs = Vec::new();
    for threads in ["1", "3", "8"] {
        let name = format!("t{threads}.vbx");
        let o = voxbox(d, &["compress", "--threads", threads, "--field", "t.vvf", "--poly", "t.poly", "--eps", "1/4", "--out", &name]);
        assert_eq!(o.status.code(), Some(0));
        outputs.push((o.stdout, std::fs::read(d.join(&name)).unwrap()));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let env = Command::new(env!("CARGO_BIN_EXE_voxbox"))
        .current_dir(d)
        .env("VOXBOX_THREADS", "2")
        .args(["compress", "--field", "t.vvf", "--poly", "t.poly", "--eps", "1/4", "--out", "e.vbx"])
        .output()
        .unwrap();
    assert_eq!(env.stdout, outputs[0].0);
}

#[test]
fn generators_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let g = voxbox(d, &["gen", "special3sc", "--m", "2", "--out", "a.s3sc"]);
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(stat(&g, "n"), "3");
    let v = voxbox(d, &["gen", "vgrid", "--instance", "a.s3sc", "--out", "a.rs"]);
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stat(&v, "q"), "20");
    assert!(stat(&v, "complement").parse::<usize>().unwrap() <= 40);
    let a = voxbox(d, &["gen", "apx", "--instance", "a.s3sc", "--field", "x.vvf", "--poly", "x.poly"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stat(&a, "alpha"), "1/130");
    let c = voxbox(d, &["compress", "--field", "x.vvf", "--poly", "x.poly", "--eps", "1/10", "--out", "x.vbx"]);
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stderr));

    let bad = voxbox(d, &["gen", "special3sc", "--m", "3", "--out", "b.s3sc"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn fig3_matrix_instance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = voxbox(d, &["gen", "np-matrix", "--fig3", "--k-prime", "6", "--field", "m.vvf", "--poly", "m.poly"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stat(&o, "m"), "5");
    assert_eq!(stat(&o, "ones"), "16");
    let field = std::fs::read_to_string(d.join("m.vvf")).unwrap();
    assert!(field.lines().any(|l| l.starts_with("VVF 2 1 5 5")));
    let k_bits: usize = stat(&o, "k_bits").parse().unwrap();
    let c = voxbox(d, &["compress", "--field", "m.vvf", "--poly", "m.poly", "--eps", "1/10", "--mode", "exact", "--budget", "25", "--out", "m.vbx"]);
    assert_eq!(c.status.code(), Some(0));
    let bits: usize = stat(&c, "bit_length").parse().unwrap();
    assert!(bits <= k_bits);
}

#[test]
fn cover_complement_of_a_centered_box() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "c.rs", "RS 2 4 1\n2 2 3 3\n");
    let o = voxbox(d, &["cover-complement", "--input", "c.rs", "--out", "h.rs"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stat(&o, "complement"), "4");
    assert_eq!(stat(&o, "pixel_check"), "ok");
    write(d, "t.rs", "RS 2 2 2\n1 1 2 1\n1 2 2 2\n");
    let t = voxbox(d, &["cover-complement", "--input", "t.rs", "--out", "h2.rs"]);
    assert_eq!(stat(&t, "complement"), "0");
    write(d, "o.rs", "RS 2 2 1\n1 1 3 3\n");
    assert_eq!(voxbox(d, &["cover-complement", "--input", "o.rs", "--out", "h3.rs"]).status.code(), Some(1));
}
