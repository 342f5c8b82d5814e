use std::process::{Command, Output};

fn nto1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nto1")).args(args).env_remove("NTO1_NIGHTLY").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_cube_over_gf7() {
    let o = nto1(&["classify", "--field", "p=7,m=1", "--poly", "x^3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["exception"], serde_json::json!([[0], 1]));
}

#[test]
fn de3p3_over_gf27_has_13_positive_rows() {
    let o = nto1(&["verify-theorem", "de3p3", "--field", "p=3,m=3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("#schema=verify-theorem/de3p3/v1"));
    assert_eq!(lines.next(), Some("p,m,a,b,predicted,brute_force"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 729);
    assert!(rows.iter().all(|r| r[4] == r[5]));
    assert_eq!(rows.iter().filter(|r| r[5] == "true").count(), 13);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["--seed", "11", "verify-theorem", "piecewisegenerel", "--field", "p=13,m=1"];
    let a = nto1(&args);
    let b = nto1(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = nto1(&["--seed", "12", "verify-theorem", "piecewisegenerel", "--field", "p=13,m=1"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = nto1(&["--threads", "1", "--seed", "4", "verify-theorem", "walsh", "--field", "p=3,m=2"]);
    let four = nto1(&["--threads", "4", "--seed", "4", "verify-theorem", "walsh", "--field", "p=3,m=2"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn disagreement_exits_1_with_witness() {
    let o = nto1(&["lowdeg", "--field", "p=5,m=1", "--degree", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("3-to-1"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(nto1(&["classify", "--field", "p=7", "--poly", "x"]).status.code(), Some(2));
    assert_eq!(nto1(&["classify", "--field", "p=7,m=1", "--poly", "y^2"]).status.code(), Some(2));
    assert_eq!(nto1(&["verify-theorem", "nope"]).status.code(), Some(2));
    assert_eq!(nto1(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn gate_exits_3_unless_nightly() {
    let o = nto1(&["classify", "--field", "p=2,m=14", "--poly", "x^3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = nto1(&["--nightly", "field", "--field", "p=2,m=14"]);
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_nto1"))
        .args(["field", "--field", "p=2,m=14"])
        .env("NTO1_NIGHTLY", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn construct_gouzao1_agrees() {
    let o = nto1(&["construct", "gouzao1", "--q1", "27", "--m", "1", "--delta", "beta^7"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["agree"], true);
    assert_eq!(v["field"]["m"], 6);
}

#[test]
fn construct_rejects_violated_hypothesis() {
    // gcd(r, s) = gcd(3, 3) != 1 over GF(7)
    let o = nto1(&["construct", "miu2", "--field", "p=7,m=1", "--params", "r=3,a=1,b=2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = nto1(&["construct", "miu2", "--field", "p=7,m=1", "--params", "r=3,a=1,b=2", "--permissive"]);
    assert_ne!(o.status.code(), Some(2));
}

#[test]
fn walsh_table_and_sum() {
    let o = nto1(&["walsh", "--field", "p=3,m=2", "--poly", "x^3 - x"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("#schema=walsh/v1\nv,walsh\n"));
    assert_eq!(text.lines().count(), 2 + 9 + 1);
    // x^3 - x on GF(9) is 3-to-1, so the sum meets the bound
    let last = text.lines().last().unwrap();
    let sum = last.split(',').next().unwrap().trim_start_matches("#char_sum=");
    let bound = last.split(',').nth(1).unwrap().trim_start_matches("bound=");
    assert_eq!(sum, bound);
}

#[test]
fn sweep_relabels_schema() {
    let o = nto1(&["sweep", "miu3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("#schema=sweep/miu3/v1\n"));
}

#[test]
fn random_diagram_is_seeded() {
    let a = nto1(&["--seed", "5", "diagram"]);
    let b = nto1(&["--seed", "5", "diagram"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
