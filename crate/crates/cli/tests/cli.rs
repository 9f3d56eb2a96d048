use ep_core::graph::InstanceJson;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn epm(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_epm"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(o).trim()).unwrap()
}

#[test]
fn corner_frame_packs_one() {
    let inst = epm(&["gen", "figure1", "--n", "4"], "");
    assert!(inst.status.success());
    let out = epm(&["pack", "--h", "K1", "--l", "3"], &stdout(&inst));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["nu"], 1);
}

#[test]
fn grid_exports_four_cycle() {
    let inst = epm(&["gen", "grid", "--g", "2", "--h", "2"], "");
    let out = epm(&["export", "dot"], &stdout(&inst));
    let dot = stdout(&out);
    assert!(dot.starts_with("graph G {"));
    assert_eq!(dot.matches(" -- ").count(), 4);
    for e in ["0 -- 1", "0 -- 2", "1 -- 3", "2 -- 3"] {
        assert!(dot.contains(e), "{dot}");
    }
}

#[test]
fn mader_sweep_has_no_violation() {
    let out = epm(
        &[
            "duality-check",
            "--h",
            "K1",
            "--l",
            "2",
            "--k",
            "2",
            "--bound",
            "mader",
            "--exhaustive",
            "6",
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["violations"], 0);
    assert!(v["instances"].as_u64().unwrap() >= 143);
}

#[test]
fn generated_instances_round_trip() {
    let cases: [&[&str]; 4] = [
        &["gen", "grid", "--g", "3", "--h", "4", "--z-blocks", "2"],
        &["gen", "figure1", "--n", "5"],
        &["gen", "negative", "--l", "4", "--n", "1", "--h", "2K1"],
        &["gen", "random", "--n", "8", "--seed", "7"],
    ];
    for args in cases {
        let text = stdout(&epm(args, ""));
        let parsed: InstanceJson = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(parsed.to_canonical_string(), text.trim());
        parsed.to_rooted().unwrap();
    }
}

#[test]
fn exit_codes() {
    assert_eq!(epm(&["pack", "--h", "K1"], "").status.code(), Some(1));
    assert_eq!(
        epm(&["pack", "--h", "K1", "--l", "1"], "not json")
            .status
            .code(),
        Some(1)
    );
    let fails = epm(
        &["verify-negative", "--l", "3", "--n", "1", "--x", "20"],
        "",
    );
    assert_eq!(fails.status.code(), Some(2));
    assert_eq!(json(&fails)["survives_small_deletions"], false);
    let tiny = epm(&["gen", "figure1", "--n", "3"], "");
    let undecided = epm(
        &["--budget", "1", "cover", "--h", "K1", "--l", "3"],
        &stdout(&tiny),
    );
    assert_eq!(undecided.status.code(), Some(3));
}

#[test]
fn td_validate_reports_violation() {
    let dir = std::env::temp_dir().join(format!("epm-td-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    let bad = dir.join("bad.json");
    std::fs::write(
        &good,
        r#"{"tree_edges":[[0,1]],"bags":{"0":[0,1],"1":[1,2]}}"#,
    )
    .unwrap();
    std::fs::write(&bad, r#"{"tree_edges":[[0,1]],"bags":{"0":[0,1],"1":[2]}}"#).unwrap();
    let path = r#"{"n":3,"edges":[[0,1],[1,2]],"z":[[0]]}"#;
    let ok = epm(&["td", "validate", "--td", good.to_str().unwrap()], path);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["width"], 1);
    let no = epm(&["td", "validate", "--td", bad.to_str().unwrap()], path);
    assert_eq!(no.status.code(), Some(2));
    let hit = epm(
        &["td", "pack-or-hit", "--h", "K1", "--l", "1", "--k", "2"],
        path,
    );
    assert_eq!(hit.status.code(), Some(0));
}

#[test]
fn pipeline_traces_branches() {
    let inst = epm(
        &["gen", "grid", "--g", "12", "--h", "12", "--z-blocks", "6"],
        "",
    );
    let out = epm(
        &[
            "pipeline", "--h", "K1", "--l", "2", "--k", "1", "--grid", "--trace",
        ],
        &stdout(&inst),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["status"], "ok");
    let trace = String::from_utf8(out.stderr).unwrap();
    for line in trace.lines() {
        let e: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(e["branch"].is_string());
    }
}

#[test]
fn linkage_and_rooted_grid() {
    let inst = stdout(&epm(
        &["gen", "grid", "--g", "8", "--h", "8", "--z-blocks", "4"],
        "",
    ));
    let lk = epm(
        &["find", "linkage", "--k", "1", "--l", "2", "--y", "56,63"],
        &inst,
    );
    assert_eq!(lk.status.code(), Some(0));
    let rgm = epm(
        &[
            "find",
            "rooted-grid",
            "--g",
            "3",
            "--k",
            "1",
            "--l",
            "1",
            "--permissive",
        ],
        &inst,
    );
    assert_eq!(
        rgm.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&rgm.stderr)
    );
}
