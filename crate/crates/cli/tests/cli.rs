use std::process::{Command, Output};

fn iwasawa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn predict_row() {
    let o = iwasawa(&["predict", "--p", "3", "--f", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("0.5601, 0.2801, 0.1050"));
}

#[test]
fn lambda_prints_witnesses() {
    let o = iwasawa(&["lambda", "--p", "13", "--char", "3:2^1", "--i", "1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("rank = r1"), "{s}");
    let lam: u64 = s.split("lambda = ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(lam >= 2);
    assert!(s.contains("v(L_p(0, chi psi))"), "{s}");

    let o = iwasawa(&["lambda", "--p", "13", "--disc", "-3", "--i", "1", "--threshold", "1", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], true);
}

#[test]
fn trivial_zero_search() {
    let o = iwasawa(&["trivial-zeros", "--char", "4:3^1", "--p-max", "500"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("[]"));
    let o = iwasawa(&["trivial-zeros", "--disc", "-3", "--p-max", "200", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ps: Vec<u64> = v.as_array().unwrap().iter().map(|h| h["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, vec![13, 181]);
}

#[test]
fn scan_writes_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.jsonl");
    let o = iwasawa(&[
        "scan", "--p", "5", "--order", "2", "--cond-max", "150", "--rank", "1", "--jobs", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("predicted"));
    let text = std::fs::read_to_string(&out).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["p", "char", "i", "rank", "lambda", "lower_bound", "method", "n", "prec", "f", "e", "runtime_ms"] {
        assert!(first.get(key).is_some(), "missing {key}");
    }
    assert_eq!(first["rank"], "r1");
}

#[test]
fn exit_codes() {
    assert_eq!(iwasawa(&["predict"]).status.code(), Some(1));
    assert_eq!(iwasawa(&["lambda", "--p", "13", "--char", "3:2^1"]).status.code(), Some(1));
    assert_eq!(iwasawa(&["lambda", "--p", "13", "--char", "nonsense"]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_iwasawa"))
        .args(["lambda", "--p", "13", "--disc", "-3", "--i", "1"])
        .env("IWASAWA_PREC_CEILING", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_iwasawa"))
        .args(["lambda", "--p", "13", "--disc", "-3", "--i", "1", "--threshold", "2", "--precision", "2"])
        .env("IWASAWA_PREC_CEILING", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(iwasawa(&["validate", "--suite", "routes"]).status.code(), Some(0));
}
