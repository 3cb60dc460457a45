use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hydrolimit")).args(args).output().unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn riemann_prints_pattern_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let out = cli(&["riemann", "--left", "1,0,1", "--right", "8,0,0.8", "--time", "1", "--out", csv.to_str().unwrap(), "--n", "11"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["s3"].as_f64().unwrap() > 0.0);
    assert_eq!(header(&csv), "x,v,u1,theta,rho,p");
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 12);
}

#[test]
fn riemann_reports_bad_input() {
    let out = cli(&["riemann", "--left", "1,0", "--right", "1,0,1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn profile_writes_both_layouts() {
    let dir = tempfile::tempdir().unwrap();
    let pat = write(dir.path(), "p.cfg", "left = 0.8, 0, 1.025\nright = 1, 0, 1\nn = 201\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = ["profile", "--pattern", pat.to_str().unwrap(), "--eps", "0.01", "--time", "0.3", "--out"];
    assert!(cli(&[&base[..], &[a.to_str().unwrap()]].concat()).status.success());
    assert!(cli(&[&base[..], &[b.to_str().unwrap(), "--decompose"]].concat()).status.success());
    assert_eq!(header(&a), "x,v,u1,theta,E,v_euler,u1_euler,theta_euler");
    assert_eq!(header(&b), "x,v,u1,theta,V_R1,d1,V_CD,V_S3,b1");
}

#[test]
fn kinetic_writes_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "k.cfg",
        "left = 1, 0, 1\nright = 1.2, 0, 0.9\neps = 0.01\nn_x = 100\nn_xi = 48\nx_span = -2, 2\n\
         t_end = 0.2\nsnapshots = 0.1, 0.2\ninit_mode = A\n",
    );
    let out = dir.path().join("out");
    let res = cli(&["--sequential", "kinetic", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for k in 0..2 {
        let f = out.join(format!("kinetic_{k:03}.csv"));
        assert_eq!(header(&f), "x,rho,u1,theta,E,micro_norm");
    }
}

#[test]
fn sweep_writes_reports_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.cfg",
        "left = 0.8, 0, 1.025\nright = 1, 0, 1\neps_list = 0.04, 0.02, 0.01\nx_span = -4, 4\nn_x = 1200\n\
         n_xi = 48\nh = 0.1\nT = 0.3\nn_snapshots = 2\nrefine_check = false\ninit_mode = A\n",
    );
    let out = dir.path().join("sweep");
    let res = cli(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(header(&out.join("sweep.csv")), "eps,sup_error,l2_error,fitted_order,envelope_ratio");
    assert_eq!(std::fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count(), 4);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
    assert!(out.join("snapshot_eps2_t1.csv").exists());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "k.cfg", "left = 1, 0, 1\nright = 1, 0, 1\nepsilon = 0.1\n");
    let res = cli(&["kinetic", "--config", cfg.to_str().unwrap()]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("epsilon"));
}
