use std::io::Write;
use std::process::{Command, Output, Stdio};

fn leibniz(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_leibniz"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn family_pipes_into_check() {
    let fam = leibniz(&["family", "F1", "--n", "5", "--params", "theta=1"], None);
    assert_eq!(fam.status.code(), Some(0), "{}", stderr(&fam));
    let chk = leibniz(&["check", "-"], Some(&stdout(&fam)));
    assert_eq!(chk.status.code(), Some(0));
    assert!(stdout(&chk).starts_with("pass"));
}

#[test]
fn check_reports_failures_with_exit_one() {
    // [e0,e0]=e1, [e0,e1]=e2 is not Leibniz without [e1,e0]
    let file = r#"{"version":1,"dimension":3,"entries":[
        {"i":0,"j":0,"k":1,"coeff":"1"},
        {"i":0,"j":1,"k":2,"coeff":"1"}]}"#;
    let o = leibniz(&["check", "-"], Some(file));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("fail"));
}

#[test]
fn malformed_files_exit_two_with_location() {
    let o = leibniz(&["check", "-"], Some(r#"{"version":1,"dimension":2,"entries":[{"i":0,"j":0,"k":1,"coeff":"x"}]}"#));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("entries[0].coeff"), "{}", stderr(&o));
    let o = leibniz(&["check", "-"], Some("{\n\"version\": 1,\n\"dimension\": 2,\n"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    let o = leibniz(&["check", "/nonexistent/file.json"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_names_give_catalog_hints() {
    let o = leibniz(&["family", "F9", "--n", "5"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("known families"));
    let o = leibniz(&["verify", "thm99", "--n", "5"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("prop32-nonexist"));
}

#[test]
fn series_of_abelian() {
    let file = r#"{"version":1,"dimension":4,"entries":[]}"#;
    let o = leibniz(&["series", "-"], Some(file));
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("lower central series: [4, 0]"), "{out}");
    assert!(out.contains("nilpotent: yes (index 2)"), "{out}");
}

#[test]
fn out_file_round_trips() {
    let dir = std::env::temp_dir().join(format!("leibniz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("l2.json");
    let p = path.to_str().unwrap();
    let o = leibniz(&["family", "L2", "--n", "6", "--params", "beta=-3/2", "--out", p], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"-3/2\""));
    let o = leibniz(&["check", p], None);
    assert_eq!(o.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn derive_reports_rank() {
    let fam = stdout(&leibniz(&["family", "Ln", "--n", "5"], None));
    let o = leibniz(&["derive", "-", "--nil-independent"], Some(&fam));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nil-independent derivations: 2"), "{}", stdout(&o));
}

#[test]
fn extend_emits_machine_transcript() {
    let fam = stdout(&leibniz(&["family", "F1", "--n", "5", "--params", "theta=1"], None));
    let o = leibniz(&["extend", "-", "--hypotheses", "a1=1", "--format", "machine"], Some(&fam));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(last["rule"], "contradiction");
    assert_eq!(last["replays"], true);
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["rule"].is_string());
    }
}

#[test]
fn verify_range_passes_and_is_stable() {
    let args = ["verify", "prop32-nonexist", "--n", "5..8", "--format", "machine", "--seed", "7"];
    let a = leibniz(&args, None);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(stdout(&a).lines().count(), 4);
    let b = leibniz(&args, None);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_rejects_inadmissible_and_large_n() {
    let o = leibniz(&["verify", "thm36-class", "--n", "5"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("even n"));
    let o = leibniz(&["verify", "all", "--n", "5..13"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn conjecture_summary() {
    let o = leibniz(&["conjecture", "--variant", "A", "--n", "6", "--trials", "5", "--seed", "1"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("(5/5)"));
    let o = leibniz(&["conjecture", "--variant", "C", "--n", "6"], None);
    assert_eq!(o.status.code(), Some(2));
}
