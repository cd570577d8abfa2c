use std::path::Path;
use std::process::{Command, Output};

use resolve_core::report::{key_text, Status, TreeReport};

fn run(problem: &str, extra: &[&str]) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("problem.json");
    std::fs::write(&input, problem).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_resolve"))
        .arg("--input")
        .arg(&input)
        .args(extra)
        .output()
        .unwrap();
    (out, dir)
}

fn json_report(problem: &str, extra: &[&str]) -> (i32, TreeReport) {
    let mut args = vec!["--format", "json"];
    args.extend_from_slice(extra);
    let (out, _dir) = run(problem, &args);
    let report = TreeReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    (out.status.code().unwrap(), report)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CUSP_EMBEDDED: &str = r#"{"vars":["x","y"],"gens":["x^2+y^5"],"mode":"embedded"}"#;

#[test]
fn embedded_curve_exits_zero_with_trace() {
    let (code, r) = json_report(CUSP_EMBEDDED, &[]);
    assert_eq!(code, 0);
    assert_eq!(r.status, Status::Ok);
    let first: Vec<&str> = r.trace[0].inv.iter().map(String::as_str).collect();
    assert_eq!(&first[..3], &["2", "0", "5/2"]);
    let last = r.trace.last().unwrap();
    assert_eq!(last.inv, vec!["1", "0", "inf"]);
    assert_eq!(last.nu, "0");
    assert_eq!(r.trace[1].nu, "3/2");
}

#[test]
fn zero_generator_is_an_input_error() {
    let (out, _d) = run(r#"{"variables":["x"],"generators":["0"]}"#, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ideal is zero"), "{}", stderr(&out));
}

#[test]
fn cube_with_mark_two_takes_one_blowup() {
    let (code, r) = json_report(
        r#"{"variables":["x"],"generators":["x^3"],"mark":2,"mode":"resolve"}"#,
        &[],
    );
    assert_eq!(code, 0);
    assert_eq!(r.nodes.len(), 2);
    assert_eq!(r.blowups, 1);
    assert_eq!(r.nodes[0].center.as_deref(), Some(&["x".to_string()][..]));
    let leaf = &r.nodes[1];
    assert_eq!(leaf.ideal, vec!["x"]);
    assert_eq!(leaf.mark, 2);
    assert!(leaf.certificate.as_ref().unwrap().passed());
}

#[test]
fn json_round_trip_reproduces_certificates() {
    for (problem, mode) in [
        (CUSP_EMBEDDED, "embedded"),
        (r#"{"vars":["x","y"],"gens":["x*y*(x+y)"]}"#, "principalize"),
        (
            r#"{"vars":["x","y"],"gens":["x^2-y^3","x*y^2"],"mark":2}"#,
            "resolve",
        ),
        (
            r#"{"vars":["x","y"],"gens":["x^2-y^3","x*y^2"]}"#,
            "principalize",
        ),
        (r#"{"vars":["x","y"],"gens":["x*y^2-1"]}"#, "embedded"),
        (r#"{"vars":["x","y","z"],"gens":["x^2-y^2*z"]}"#, "embedded"),
    ] {
        let (code, r) = json_report(problem, &["--mode", mode]);
        assert_eq!(code, 0, "{problem}");
        let text = serde_json::to_string(&r).unwrap();
        let back = TreeReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        let fresh = back.reverify().unwrap();
        let recorded: Vec<_> = r
            .nodes
            .iter()
            .filter_map(|n| n.certificate.clone().map(|c| (n.chart.clone(), c)))
            .collect();
        assert!(!recorded.is_empty());
        assert_eq!(fresh, recorded, "{problem}");
    }
}

#[test]
fn tampered_leaf_fails_reverification() {
    let (_, mut r) = json_report(
        r#"{"vars":["x","y"],"gens":["x^2+y^3"]}"#,
        &["--mode", "principalize"],
    );
    let leaf = r
        .nodes
        .iter_mut()
        .find(|n| n.certificate.is_some())
        .unwrap();
    leaf.total = vec!["x^2 + y^3".into()];
    let results = r.reverify().unwrap();
    assert!(results.iter().any(|(_, c)| !c.passed()));
}

#[test]
fn text_and_json_share_key_sequence() {
    let (code, r) = json_report(CUSP_EMBEDDED, &[]);
    assert_eq!(code, 0);
    let (out, _d) = run(CUSP_EMBEDDED, &["--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let from_text: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split_once(" key ").map(|(_, k)| k))
        .map(|k| {
            k.split(" center ")
                .next()
                .unwrap()
                .split(" ideal ")
                .next()
                .unwrap()
        })
        .collect();
    let from_json: Vec<String> = r
        .nodes
        .iter()
        .filter_map(|n| n.key.as_ref().map(key_text))
        .collect();
    assert_eq!(from_text, from_json);
}

#[test]
fn depth_cap_exits_two_with_partial_tree() {
    let (code, r) = json_report(CUSP_EMBEDDED, &["--max-depth", "1"]);
    assert_eq!(code, 2);
    assert_eq!(r.status, Status::Exhausted);
    assert!(!r.nodes.is_empty());
    assert!(r.error.as_deref().unwrap().contains("chart"));
}

#[test]
fn malformed_inputs_exit_one() {
    for bad in [
        r#"{"vars":["x"],"gens":["x^"]}"#,
        r#"{"vars":["x"],"gens":["y"]}"#,
        r#"{"vars":["x"],"gens":[]}"#,
        r#"{"vars":["x","y"],"gens":["x"],"boundary":[{"id":"A","variable":"z"}]}"#,
        r#"{"vars":["x","y"],"gens":["x"],"boundary":[{"id":"A","variable":"x"},{"id":"B","variable":"x"}]}"#,
        r#"{"vars":["x"],"gens":["x"],"mark":0}"#,
        r#"{"vars":["x"],"gens":["x^2"],"mode":"embedded"}"#,
        "not json",
    ] {
        let (out, _d) = run(bad, &[]);
        assert_eq!(out.status.code(), Some(1), "{bad}: {}", stderr(&out));
    }
    let (out, _d) = run(CUSP_EMBEDDED, &["--trace", "3"]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn unalignable_root_locus_is_a_math_failure() {
    let (code, r) = json_report(
        r#"{"vars":["x","y"],"gens":["x*y^2-1"]}"#,
        &["--mode", "principalize"],
    );
    assert_eq!(code, 4);
    assert_eq!(r.status, Status::Failed);
    assert!(r.error.unwrap().contains("not monomializable"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p.json");
    let target = dir.path().join("report.json");
    std::fs::write(&input, CUSP_EMBEDDED).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_resolve"))
        .args(["--format", "json", "--trace", "1", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).contains("blow-ups"));
    let r = TreeReport::from_json(&std::fs::read_to_string(Path::new(&target)).unwrap()).unwrap();
    assert_eq!(r.blowups, 4);
}

#[test]
fn boundary_and_variant_are_honoured() {
    let p = r#"{"vars":["x","y"],"gens":["x^2*y^3"],"mark":4,"boundary":[{"id":"A","variable":"x"},{"id":"B","variable":"y"}],"mode":"resolve"}"#;
    let (code, r) = json_report(p, &["--variant", "bv"]);
    assert_eq!(code, 0);
    assert!(matches!(
        r.variant,
        resolve_core::marked::Variant::BravoVillamayor
    ));
    assert_eq!(r.nodes[0].boundary.len(), 2);
    assert_eq!(r.nodes[0].stage, "2b");
    assert!(r.blowups >= 1);
}
