use std::path::Path;
use std::process::Command;

fn qbar(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qbar"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn workspace(schedule: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qbar(dir.path(), &["tower", "build"]).0, 0);
    for p in schedule {
        assert_eq!(qbar(dir.path(), &["tower", "extend", p]).0, 0);
    }
    dir
}

fn record(stdout: &str) -> serde_json::Value {
    let start = stdout.find('{').unwrap();
    serde_json::from_str(&stdout[start..]).unwrap()
}

#[test]
fn tower_lifecycle() {
    let dir = workspace(&[]);
    let (code, out, _) = qbar(dir.path(), &["tower", "show"]);
    assert_eq!(code, 0);
    assert!(out.contains("degrees [1]\n"));
    assert_eq!(qbar(dir.path(), &["tower", "extend", "x^2-2"]).0, 0);
    let (_, out, _) = qbar(dir.path(), &["tower", "show"]);
    assert!(out.contains("degrees [1, 2]\n"));
    let (code, _, err) = qbar(dir.path(), &["tower", "extend", "x^2-4"]);
    assert!(code > 2);
    assert!(err.contains("reducible"));
}

#[test]
fn missing_and_corrupt_cache() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = qbar(dir.path(), &["tower", "show"]);
    assert!(code > 2);
    assert!(err.contains("tower build"));
    let dir = workspace(&["x^2-2"]);
    let path = dir.path().join("qbar-tower.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let i = text.rfind("\"1/1\"").unwrap();
    std::fs::write(&path, format!("{}\"2/1\"{}", &text[..i], &text[i + 5..])).unwrap();
    let (code, _, err) = qbar(dir.path(), &["tower", "show"]);
    assert!(code > 2);
    assert!(err.contains("invalid tower cache"), "{err}");
}

#[test]
fn tree_listing_and_dot() {
    let dir = workspace(&["x^2-2", "x^2-3"]);
    let (_, out, _) = qbar(dir.path(), &["tree", "list", "0"]);
    assert_eq!(out.lines().count(), 1);
    let (_, out, _) = qbar(dir.path(), &["tree", "list", "2"]);
    assert_eq!(out.lines().count(), 4);
    let (code, _, _) = qbar(dir.path(), &["tree", "list", "3"]);
    assert!(code > 2);
    let (_, dot, _) = qbar(dir.path(), &["tree", "dot"]);
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(edges.len(), 2 + 4);
    for n in ["1:0", "1:1", "2:0", "2:1", "2:2", "2:3"] {
        let incoming = edges.iter().filter(|e| e.contains(&format!("-> \"{n}\""))).count();
        assert_eq!(incoming, 1, "{n}");
    }
}

#[test]
fn group_operations() {
    let dir = workspace(&["x^3-2"]);
    for i in 0..6 {
        let sel = format!("1:{i}");
        let (_, inv, _) = qbar(dir.path(), &["aut", "invert", &sel]);
        let (_, prod, _) = qbar(dir.path(), &["aut", "compose", &sel, inv.trim()]);
        let (_, id, _) = qbar(dir.path(), &["aut", "apply", prod.trim(), "z^2 + 3/2*z - 7"]);
        assert_eq!(id.trim(), "z^2 + 3/2*z - 7");
    }
    let dir = workspace(&["x^2-2", "x^2-3"]);
    for i in 0..4 {
        let sel = format!("2:{i}");
        assert_eq!(qbar(dir.path(), &["aut", "invert", &sel]).1.trim(), sel);
    }
    assert!(qbar(dir.path(), &["aut", "compose", "1:0", "2:0"]).0 > 2);
    assert!(qbar(dir.path(), &["aut", "invert", "2:9"]).0 > 2);
    assert!(qbar(dir.path(), &["aut", "invert", "nonsense"]).0 > 2);
}

#[test]
fn check_exit_codes() {
    let dir = workspace(&["x^2-2"]);
    let (code, out, _) = qbar(dir.path(), &["check", "eval", "exists G1. exists G2. ~(G1=G2)", "--depth", "1"]);
    assert_eq!(code, 0);
    assert_eq!(record(&out)["verdict"], "true");
    let (code, _, _) = qbar(dir.path(), &["check", "eval", "exists G1. exists G2. ~(G1=G2)", "--depth", "0"]);
    assert_eq!(code, 1);
    let (code, out, _) = qbar(dir.path(), &["check", "theory", "forall G. G=e", "--depth", "1"]);
    assert_eq!(code, 1);
    assert_eq!(record(&out)["verdict"], "false");
    let (code, _, _) = qbar(dir.path(), &["check", "theory", "exists G. ~(G=e)", "--depth", "0"]);
    assert_eq!(code, 2);
    let (code, _, err) = qbar(dir.path(), &["check", "witness", "forall G. exists H. forall K. (~(G = H) & K = K)"]);
    assert!(code > 2);
    assert!(err.contains("Σ2-separated"));
    assert!(qbar(dir.path(), &["check", "eval", "exists G. G = "]).0 > 2);
    assert!(qbar(dir.path(), &["check", "eval", "exists G. G = a0"]).0 > 2);
    assert!(qbar(dir.path(), &["frobnicate"]).0 > 2);
}

#[test]
fn square_root_witness_record() {
    let dir = workspace(&["x^2-2", "x^4-2", "x^2-3"]);
    let (code, out, _) = qbar(
        dir.path(),
        &["--format", "record", "check", "witness", "exists G. G*G = a0", "--params", "a0=square:random", "--seed", "3", "--depth", "3"],
    );
    assert_eq!(code, 0);
    let rec = record(&out);
    assert_eq!(rec["verdict"], "witness");
    assert_eq!(rec["depth"], 3);
    let chain = rec["witness"].as_array().unwrap();
    assert_eq!(chain.len(), 4);
    // each g at level n squares to a0 there
    for n in 0..chain.len() {
        let path: Vec<String> = (0..=n).map(|k| format!("{k}:{}", chain[k][0])).collect();
        let params = format!("a0=square:random,a1={}", path.join("/"));
        let depth = n.to_string();
        let args = ["check", "eval", "a1*a1 = a0", "--params", &params, "--seed", "3", "--depth", &depth];
        assert_eq!(qbar(dir.path(), &args).0, 0, "level {n}");
    }
}

#[test]
fn formula_classes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = qbar(dir.path(), &["formula", "exists G. (G*G = a0 & ~(G = e))"]);
    assert_eq!(code, 0);
    assert!(out.contains("classes: sigma1-separated, existential-prenex"), "{out}");
}
