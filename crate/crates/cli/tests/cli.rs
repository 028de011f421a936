use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fricke")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = run(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn qexp_first_coefficients() {
    let v = json(&["qexp", "-k", "4", "-p", "5", "-M", "1"]);
    assert_eq!(v[0]["series"]["coeffs"], serde_json::json!(["1/1", "120/13"]));
    let v = json(&["qexp", "--form", "delta5", "-M", "3"]);
    assert_eq!(v[0]["series"]["coeffs"][0], "0/1");
    assert_eq!(v[0]["series"]["coeffs"][1], "1/1");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["qexp", "-k", "5", "-p", "5"][..],
        &["certify", "--lemma", "bogus"],
        &["certify", "--triples", "p9-a1"],
        &["zeros", "-k", "8", "-p", "11"],
        &["eval", "-k", "8", "-p", "5"],
        &["zeros", "-k", "8", "-p", "5", "--samples", "2"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn zeros_small_weights() {
    let v = json(&["zeros", "-k", "8", "-p", "5"]);
    assert_eq!((v[0]["zeros_a1"].as_u64(), v[0]["zeros_a2"].as_u64()), (Some(1), Some(1)));
    assert_eq!(v[0]["verdict"], "all_on_arc");
    let v = json(&["zeros", "-k", "12", "-p", "7"]);
    assert_eq!(v[0]["arc_zeros"].as_array().unwrap().len(), 4);
    let v = json(&["zeros", "-k", "6", "-p", "5"]);
    assert_eq!(v[0]["arc_zeros"].as_array().unwrap().len(), 0);
    let orders: Vec<u64> = v[0]["corner_orders"].as_array().unwrap().iter().map(|c| c["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, vec![1, 1, 1]);
}

#[test]
fn certify_one_lemma() {
    let o = run(&["certify", "--lemma", "L7-4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("direct check k=8 PASS"), "{s}");
    let v = json(&["certify", "--triples", "p5-a2-r2"]);
    assert_eq!(v["triples"].as_array().unwrap().len(), 3);
    assert_eq!(v["pass"], true);
}

#[test]
fn csv_has_header() {
    let o = run(&["classify", "-p", "5", "-k", "4..20", "--format", "csv"]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("k,p,residue,alpha_pk,case,cover,status"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = std::env::temp_dir().join(format!("fricke-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.toml");
    std::fs::write(&cfg, "precision_bits = 64\nformat = \"json\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = run(&["--config", c, "eval", "-k", "4", "-p", "5", "--theta", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let short = v["value"]["value"].as_str().unwrap().len();
    let o = run(&["--config", c, "--precision-bits", "256", "eval", "-k", "4", "-p", "5", "--theta", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"]["value"].as_str().unwrap().len() > short + 40);
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run(&["--config", c, "tables"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_fricke"))
        .args(["eval", "-k", "4", "-p", "7", "--re", "0.1", "--im", "0.5", "--format", "json"])
        .env("FRICKE_PRECISION_BITS", "300")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["value"]["re"].as_str().unwrap().len() > 80);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("fricke-out-{}.json", std::process::id()));
    let o = run(&["tables", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["p7"].as_array().unwrap().len(), 3);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn deterministic_json() {
    let a = stdout(&run(&["classify", "-k", "300..340", "--probe", "0.01", "--format", "json"]));
    let b = stdout(&run(&["classify", "-k", "300..340", "--probe", "0.01", "--format", "json", "--jobs", "2"]));
    assert_eq!(a, b);
    assert!(a.contains("\"probes\""));
}
