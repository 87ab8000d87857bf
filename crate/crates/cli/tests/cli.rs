use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SPHERE4: &str = r#"{"dimension":4,"coordinates":["x","y","z","w"],
 "g":[["4/(1+x^2+y^2+z^2+w^2)^2",0,0,0],[0,"4/(1+x^2+y^2+z^2+w^2)^2",0,0],
      [0,0,"4/(1+x^2+y^2+z^2+w^2)^2",0],[0,0,0,"4/(1+x^2+y^2+z^2+w^2)^2"]],
 "domain":{"x":[-1,1],"y":[-1,1],"z":[-1,1],"w":[-1,1]}}"#;

const GENERIC4: &str = r#"{"dimension":4,"coordinates":["x","y","z","w"],
 "g":[["1+x*y+z^2","0.1*w",0,"0.2*x*z"],[null,"1+y*z-w^2","0.1*x^2",0],
      [null,null,"exp(0.3*x*w)","0.1*y"],[null,null,null,"1+0.2*sin(y*z)"]],
 "domain":{"x":[-0.5,0.5],"y":[-0.5,0.5],"z":[-0.5,0.5],"w":[-0.5,0.5]}}"#;

// dt² + h(x, y, z)
const PRODUCT4: &str = r#"{"dimension":4,"coordinates":["t","x","y","z"],
 "g":[[1,0,0,0],[null,"1+x*y+0.3*sin(z)","0.1*z^2","0.05*x"],
      [null,null,"exp(0.2*x*z)","0.1*y"],[null,null,null,"1+0.2*y^2"]],
 "domain":{"t":[-0.5,0.5],"x":[-0.5,0.5],"y":[-0.5,0.5],"z":[-0.5,0.5]}}"#;

const GENERIC3: &str = r#"{"dimension":3,"coordinates":["x","y","z"],
 "g":[["1+x*y+z^2","0.1*z",0],[null,"1+y*z","0.1*x^2"],[null,null,"exp(0.3*x*y)"]],
 "domain":{"x":[-0.5,0.5],"y":[-0.5,0.5],"z":[-0.5,0.5]}}"#;

const FLAT3: &str = r#"{"dimension":3,"coordinates":["x","y","z"],
 "g":[[1,0,0],[0,1,0],[0,0,1]],"domain":{"x":[-1,1],"y":[-1,1],"z":[-1,1]}}"#;

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(TempDir::new().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }
}

fn lcw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcw")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sphere_scalar_curvature() {
    let d = Dir::new();
    let m = d.file("s.json", SPHERE4);
    let v = json(&lcw(&["curvature", p(&m), "--point", "0.1,-0.2,0.3,0"]));
    let s = v["results"][0]["scalar"].as_f64().unwrap();
    assert!((s - 12.0).abs() < 1e-9, "{s}");
}

#[test]
fn sphere_is_weyl_negligible() {
    let d = Dir::new();
    let m = d.file("s.json", SPHERE4);
    let out = lcw(&["obstruct", p(&m), "--point", "0.3,0.1,0,0"]);
    let v = json(&out);
    assert_eq!(v["points"][0]["verdict"], "weyl_negligible");
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("inconclusive"));
}

#[test]
fn generic_metric_is_certified() {
    let d = Dir::new();
    for (name, body, pt) in [("g4.json", GENERIC4, "0.1,0.2,0.3,-0.1"), ("g3.json", GENERIC3, "0.1,0.2,0.3")] {
        let m = d.file(name, body);
        let out = lcw(&["obstruct", p(&m), "--point", pt]);
        let v = json(&out);
        assert_eq!(v["points"][0]["verdict"], "no_lcw_certified", "{name}");
        assert_eq!(
            v["headline"],
            "no limiting Carleman weight exists on any neighborhood containing this point"
        );
    }
}

#[test]
fn product_metric_is_inconclusive() {
    let d = Dir::new();
    let m = d.file("p.json", PRODUCT4);
    let v = json(&lcw(&["obstruct", p(&m), "--point", "0.1,0.2,-0.1,0.3", "--point", "0,0,0,0"]));
    for pt in v["points"].as_array().unwrap() {
        assert_eq!(pt["detail"], "eigenflag_within_tol");
        assert!(pt["obstruction"].as_f64().unwrap() < 1e-8);
    }
    assert!(v["headline"].as_str().unwrap().starts_with("inconclusive"));
}

#[test]
fn flat_three_dimensional_is_zero() {
    let d = Dir::new();
    let m = d.file("f.json", FLAT3);
    let v = json(&lcw(&["obstruct", p(&m)]));
    assert_eq!(v["points"][0]["verdict"], "zero");
}

#[test]
fn scan_csv_layout() {
    let d = Dir::new();
    let m = d.file("g.json", GENERIC3);
    let out = lcw(&["scan", p(&m), "--grid", "2,1,3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,x2,x3,norm,obstruction,verdict");
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines[1].starts_with("-5.0000000000000000e-1,0.0000000000000000e0,-5.0000000000000000e-1,"));
}

#[test]
fn outputs_are_deterministic() {
    let d = Dir::new();
    let m = d.file("g.json", GENERIC4);
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| lcw(&["scan", p(&m), "--grid", "2,1,1,2", "--seed", "5"]).stdout)
        .collect();
    assert_eq!(runs[0], runs[1]);
    let a = lcw(&["sample", "--dimension", "4", "--count", "5", "--seed", "9", "--format", "csv"]);
    let b = lcw(&["sample", "--dimension", "4", "--count", "5", "--seed", "9", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.starts_with(b"index,residual\n"));
}

#[test]
fn out_flag_writes_file() {
    let d = Dir::new();
    let m = d.file("s.json", SPHERE4);
    let target = d.0.path().join("report.json");
    let out = lcw(&["obstruct", p(&m), "--out", p(&target)]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["dimension"], 4);
}

#[test]
fn zero_curvature_perturbation_is_flat() {
    let d = Dir::new();
    let zeros = vec![vec![0.0; 6]; 6];
    let c = d.file("r.json", &serde_json::json!({"dimension": 4, "operator": zeros}).to_string());
    let out = lcw(&["perturb", p(&c)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = d.0.path().join("m.json");
    std::fs::write(&m, &out.stdout).unwrap();
    let v = json(&lcw(&["curvature", p(&m), "--point", "0,0,0,0"]));
    let norms = &v["results"][0]["norms"];
    for key in ["riemann", "weyl"] {
        assert_eq!(norms[key].as_f64().unwrap(), 0.0, "{key}");
    }
}

#[test]
fn solve_cy_reaches_target() {
    let v = json(&lcw(&["solve-cy", "--target", "0.01,0,0,-0.02,0.003,0.01"]));
    let achieved = &v["achieved"];
    let target = [[0.01, 0.0, 0.0], [0.0, -0.02, 0.003], [0.0, 0.003, 0.01]];
    for i in 0..3 {
        for j in 0..3 {
            let a = achieved[i][j].as_f64().unwrap();
            assert!((a - target[i][j]).abs() < 1e-9, "[{i}][{j}] {a}");
        }
    }
    assert_eq!(v["classification"], "nonsingular");
}

#[test]
fn exit_codes() {
    let d = Dir::new();
    let bad = d.file("bad.json", "{not json");
    assert_eq!(lcw(&["obstruct", p(&bad)]).status.code(), Some(2));
    let missing = d.0.path().join("missing.json");
    assert_eq!(lcw(&["obstruct", p(&missing)]).status.code(), Some(5));
    let m = d.file("g.json", GENERIC4);
    assert_eq!(lcw(&["obstruct", p(&m), "--point", "0.1,0.2"]).status.code(), Some(2));
    assert_eq!(lcw(&["obstruct", p(&m), "--point", "3,0,0,0"]).status.code(), Some(3));
    // Not trace-free: rejected as input.
    assert_eq!(lcw(&["solve-cy", "--target", "1,0,0,1,0,1"]).status.code(), Some(2));
    // Too large for a positive metric on the box.
    assert_eq!(lcw(&["solve-cy", "--target", "500,0,0,-500,0,0"]).status.code(), Some(3));
}
