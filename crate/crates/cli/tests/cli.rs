use std::process::Command;

use pgcolor_core::certificate::Certificate;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pgcolor")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn space_summaries() {
    for (n, q, want) in [
        ("3", "2", "15 points, 35 lines, 7 lines/point"),
        ("2", "2", "7 points, 7 lines, 3 lines/point"),
        ("5", "2", "63 points, 651 lines, 31 lines/point"),
    ] {
        let (code, out, _) = run(&["space", n, q]);
        assert_eq!(code, 0);
        assert!(out.starts_with(want), "{out}");
    }
    let (code, _, err) = run(&["space", "3", "6"]);
    assert_eq!(code, 2);
    assert!(err.contains("error"), "{err}");
}

#[test]
fn construct_rejects_bad_shapes() {
    let (code, _, err) = run(&["construct", "7", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("3*2^i - 1"), "{err}");
}

#[test]
fn round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["--jobs", "1", "construct", "5", "2", "--out", p]).0, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let cert = Certificate::from_json(&text).unwrap();
    let (code, out, _) = run(&["verify", p, "--checker", "naive-pairwise"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("colors=127 proper=true complete=true"), "{out}");
    assert_eq!(Certificate::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap(), cert);

    let mut flipped = cert.clone();
    let colors = flipped.payload.get_mut("colors").unwrap();
    colors[0] = if colors[0] == 1 { 2 } else { 1 };
    let fp = dir.path().join("flipped.json");
    std::fs::write(&fp, flipped.to_json()).unwrap();
    let (code, _, err) = run(&["verify", fp.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("first: payload hash"), "{err}");

    let mut wrong_space = cert.clone();
    wrong_space.header.space.line_table_sha256 = "ff".repeat(32);
    let wp = dir.path().join("wrong.json");
    std::fs::write(&wp, wrong_space.to_json()).unwrap();
    let (code, _, err) = run(&["verify", wp.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line table hash"), "{err}");

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(run(&["verify", garbage.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["pg32", "verify", p]).0, 2);
}

#[test]
fn pg32_commands() {
    let (code, out, _) = run(&["pg32", "certificate"]);
    assert_eq!(code, 0);
    let cert = Certificate::from_json(&out).unwrap();
    assert_eq!(cert.verdicts.colors, Some(18));
    assert!(cert.notes.iter().any(|n| n.contains("MX")));

    let (code, out, _) = run(&["pg32", "exclude19", "--budget", "0"]);
    assert_eq!(code, 3);
    assert!(out.contains("Inconclusive"), "{out}");
}

#[test]
fn spreads_and_packings() {
    let (code, out, _) = run(&["spread", "3", "3", "--method", "regulus-switch"]);
    assert_eq!(code, 0);
    assert!(out.contains("regular=false"), "{out}");
    let (code, _, err) = run(&["spread", "3", "2", "--method", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("field-reduction"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let (code, out, _) = run(&["packing", "3", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("13 spreads"), "{out}");
    assert_eq!(run(&["verify", path.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["packing", "3", "3", "--budget", "2"]).0, 3);

    let sp = dir.path().join("s.json");
    assert_eq!(run(&["packing", "5", "2", "--out", sp.to_str().unwrap()]).0, 0);
    let (code, out, _) = run(&["verify", sp.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("partition=true parts=127"), "{out}");
}

#[test]
fn bounds_rows() {
    let (code, out, _) = run(&["bounds", "--n", "2,3,5", "--q", "2,3", "--json"]);
    assert_eq!(code, 0);
    let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
    let row = |n: u64, q: u64| rows.as_array().unwrap().iter().find(|r| r["n"] == n && r["q"] == q).unwrap().clone();
    assert_eq!(row(3, 2)["upper_psi"], 27);
    assert_eq!(row(3, 2)["chromatic_upper"], 15);
    assert_eq!(row(5, 2)["lower_alpha"], 127);
    assert_eq!(row(5, 2)["upper_psi"], 246);
    assert_eq!(row(2, 3)["upper_psi"], 14);
    assert_eq!(row(2, 3)["plane_exact"], 13);
}
