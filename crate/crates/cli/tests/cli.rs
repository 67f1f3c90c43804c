use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_teichkit"))
}

/// Fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("teichkit-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &PathBuf, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stdout));
    })
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

const IDENTITY: &str = r#"{"rho": 2.0, "coeffs": [[1, 0]]}"#;
const CURVE: &str = r#"{"f0": {"rho": 2.0, "coeffs": [[0.5, 0]]},
  "phi": {"kind": "one_differential", "coeffs": [[0.3, 0], [0, 0.1]]},
  "q": [[0.5, 0]], "k": {"center": [0, 0], "radius": 0.9}}"#;

#[test]
fn analyze_identity_is_zero() {
    let d = scratch("analyze");
    let f = write(&d, "f.json", IDENTITY);
    let o = run(&["--N", "8", "analyze", &f]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["truncation"], 8);
    for key in ["pre_schwarzian", "schwarzian", "beta_hat"] {
        let cs = v[key]["coeffs"].as_array().unwrap();
        assert!(cs.iter().all(|z| c(z) == (0.0, 0.0)), "{key}");
    }
    assert_eq!(c(&v["chi"]["c"]), (1.0, 0.0));
    assert_eq!(v["norms"]["pre_schwarzian"]["value"].as_f64(), Some(0.0));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let d = scratch("malformed");
    let f = write(&d, "bad.json", "{\"rho\": 2.0,\n \"coeffs\": [[1, 0],\n");
    let o = run(&["analyze", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line"), "{err}");

    let g = write(&d, "zero.json", r#"{"rho": 2.0, "coeffs": [[0, 0], [1, 0]]}"#);
    let o = run(&["analyze", &g]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["analyze", d.join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let d = scratch("config");
    let cfg = write(&d, "run.toml", "N = 16\nbogus = 1\n");
    assert_eq!(run(&["--config", &cfg, "verify", "identities"]).status.code(), Some(2));
}

#[test]
fn verify_identities_passes_and_is_deterministic() {
    let a = run(&["--seed", "7", "verify", "identities"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let v = json(&a);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 7);
    let b = run(&["--seed", "7", "verify", "identities"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_names_failing_corpus_map() {
    let d = scratch("corpus");
    let corpus = write(
        &d,
        "corpus.json",
        r#"[{"rho": 2.0, "coeffs": [[1, 0], [0.1, 0]]}, {"rho": 2.0, "coeffs": [[0, 0], [1, 0]]}]"#,
    );
    let o = run(&["verify", "identities", "--corpus", &corpus]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let cases: Vec<String> = v["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["case"].as_str().unwrap().to_owned())
        .collect();
    assert!(cases.iter().any(|c| c.starts_with("map 1 (precondition)")), "{cases:?}");
    assert!(!cases.iter().any(|c| c.starts_with("map 0")), "{cases:?}");
}

#[test]
fn weld_unweld_round_trip() {
    let d = scratch("weld");
    let gamma = write(&d, "gamma.json", r#"{"modes": 2, "u_coeffs": [[0, 0], [0, -0.04], [0.01, 0]]}"#);
    let pair = d.join("pair.json");
    let o = run(&["--out", pair.to_str().unwrap(), "weld", "--gamma", &gamma, "--m", "0.3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seam residual"));

    let o = run(&["unweld", "--f", pair.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert!((v["m"].as_f64().unwrap() - 0.3).abs() < 1e-8);
    let u = v["gamma"]["u_coeffs"].as_array().unwrap();
    let c1 = c(&u[1]);
    let c2 = c(&u[2]);
    assert!(c1.0.abs() < 1e-8 && (c1.1 + 0.04).abs() < 1e-8, "{c1:?}");
    assert!((c2.0 - 0.01).abs() < 1e-8 && c2.1.abs() < 1e-8, "{c2:?}");
}

#[test]
fn chart_with_infinity() {
    let d = scratch("chart");
    let pts = write(&d, "pts.json", r#"{"points": [[0, 0], "inf"]}"#);
    let o = run(&["chart", "--points", &pts]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let charts = v["charts"].as_array().unwrap();
    assert_eq!(charts.len(), 2);
    assert_eq!(charts[1]["point"], "inf");
    assert_eq!(charts[1]["index"], 1);

    let dup = write(&d, "dup.json", r#"{"points": [[1, 0], [1, 0]]}"#);
    assert_eq!(run(&["chart", "--points", &dup]).status.code(), Some(2));
}

#[test]
fn nonoverlap_pass_and_fail() {
    let d = scratch("nonoverlap");
    let ok = write(
        &d,
        "ok.json",
        r#"{"points": [[0, 0], [1, 0], "inf"],
            "maps": [{"rho": 2, "coeffs": [[0.5, 0]]}, {"rho": 2, "coeffs": [[0.5, 0], [0.1, 0]]},
                     {"rho": 2, "coeffs": [[0.5, 0]]}]}"#,
    );
    let o = run(&["nonoverlap", &ok]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "pass");

    let chart = |i: usize, p: f64| {
        format!(
            r#"{{"index": {i}, "point": [{p}, 0], "zeta": {{"a": [1, 0], "b": [{}, 0], "c": [0, 0], "d": [1, 0]}},
                "domain": null, "k": {{"center": [0, 0], "radius": 0.9}}}}"#,
            -p
        )
    };
    let bad = write(
        &d,
        "bad.json",
        &format!(
            r#"{{"charts": [{}, {}], "maps": [{{"rho": 2, "coeffs": [[0.5, 0]]}}, {{"rho": 2, "coeffs": [[0.5, 0]]}}]}}"#,
            chart(0, -0.4),
            chart(1, 0.4)
        ),
    );
    let o = run(&["nonoverlap", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["verdict"], "fail");
}

#[test]
fn transition_check_is_holomorphic() {
    let d = scratch("transition");
    let pts = write(&d, "pts.json", r#"{"points": [[0, 0], [1, 0]]}"#);
    let o = run(&["chart", "--points", &pts, "--index", "0"]);
    let chart = json(&o)["charts"][0].to_string();
    let from = write(&d, "c.json", &chart);
    let psi = write(&d, "psi.json", r#"{"rho": 2, "coeffs": [[0.5, 0], [0.1, 0]]}"#);
    let o = run(&["transition", "--from", &from, "--to", &from, "--psi", &psi, "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    // Same chart on both sides: the transition is ψ itself.
    let cs = v["map"]["coeffs"].as_array().unwrap();
    assert!((c(&cs[0]).0 - 0.5).abs() < 1e-12 && (c(&cs[1]).0 - 0.1).abs() < 1e-12);
    assert!(v["holomorphy"]["cr_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn gateaux_csv() {
    let d = scratch("gateaux");
    let curve = write(&d, "curve.json", CURVE);
    let o = run(&["gateaux", &curve]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,residual,second_order_lhs,observed_constant,bound_holds");
    assert!(lines.len() > 3);
    for row in &lines[1..lines.len() - 1] {
        assert_eq!(row.split(',').count(), 5);
        assert!(row.ends_with("true"), "{row}");
    }
    assert!(lines.last().unwrap().starts_with("# summary") && text.contains("passed=true"));
}

#[test]
fn plot_boundary_of_identity_is_unit_circle() {
    let d = scratch("plot");
    let f = write(&d, "f.json", IDENTITY);
    let o = run(&["plot", &f, "--kind", "polyline", "--samples", "64"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 64);
    for r in rows {
        let v: Vec<f64> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1].hypot(v[2]) - 1.0).abs() < 1e-12);
    }

    let o = run(&["plot", &f]);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<path d=\"M1.000000 "));
    assert_eq!(run(&["plot", &f]).stdout, svg.as_bytes());
}

#[test]
fn plot_heat_and_seam() {
    let d = scratch("heat");
    let f = write(&d, "f.json", r#"{"rho": 2, "coeffs": [[1, 0], [0.2, 0]]}"#);
    let o = run(&["plot", &f, "--kind", "heat"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("r,theta,x,y,weighted_modulus\n"));
    assert!(text.lines().count() > 100);

    let gamma = write(&d, "gamma.json", r#"{"modes": 1, "u_coeffs": [[0, 0], [0, -0.04]]}"#);
    let pair = d.join("pair.json");
    run(&["--out", pair.to_str().unwrap(), "weld", "--gamma", &gamma]);
    let o = run(&["plot", pair.to_str().unwrap(), "--kind", "seam", "--gamma", &gamma, "--samples", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    for r in text.lines().skip(1) {
        let res: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(res < 1e-6, "{r}");
    }
    let o = run(&["plot", pair.to_str().unwrap(), "--kind", "seam"]);
    assert_eq!(o.status.code(), Some(2));
}
