use std::path::PathBuf;
use std::process::{Command, Output};

fn ivpp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ivpp")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

#[test]
fn lists_the_builtin_map() {
    let o = ivpp(&["maps", "list", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let recs = json_lines(&o);
    assert_eq!(recs[0]["name"], "toda3");
    assert_eq!(recs[0]["dim"], 6);
    assert_eq!(recs[0]["invariants"], serde_json::json!(["r", "t", "f", "g"]));
}

#[test]
fn shown_map_parses_back() {
    let o = ivpp(&["maps", "show"]);
    assert_eq!(code(&o), 0);
    let path = scratch("toda_copy.map", &stdout(&o));
    let again = ivpp(&["invariants", "verify", "--map-file", path.to_str().unwrap()]);
    assert_eq!(code(&again), 0, "{}", stderr(&again));
    assert_eq!(stdout(&again).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn invariants_hold_exactly() {
    let o = ivpp(&["invariants", "verify", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    for r in json_lines(&o) {
        assert_eq!(r["passed"], true);
        assert_eq!(r["residual"], "0");
    }
}

#[test]
fn false_invariant_exits_one() {
    let path = scratch("swap.map", "map swap\nvars x y\ninv a = x\ninv b = x + y\nX = y\nY = x\n");
    let o = ivpp(&["invariants", "verify", "--map-file", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("FAIL a"), "{out}");
    assert!(out.contains("PASS b"), "{out}");
}

#[test]
fn input_errors_exit_two() {
    let path = scratch("broken.map", "map broken\nvars x y\nX = y +\nY = x\n");
    let o = ivpp(&["invariants", "verify", "--map-file", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    assert_eq!(code(&ivpp(&["maps", "show", "--map", "nope"])), 2);
    assert_eq!(code(&ivpp(&["verify", "--period", "4", "--gamma", "t*f+", "--gamma", "g"])), 2);
    assert_eq!(code(&ivpp(&["sc", "probe", "--h", "1,1,2"])), 2);
    assert_eq!(code(&ivpp(&["derive", "--period", "6..3"])), 2);
}

#[test]
fn sigma_checks_the_shipped_parameterization() {
    let o = ivpp(&["sigma", "verify"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 6);
    let b = ivpp(&["sigma", "build", "--format", "machine"]);
    let recs = json_lines(&b);
    assert_eq!(recs.iter().filter(|r| r["condition"] == "zero").count(), 2);
    assert_eq!(recs.iter().filter(|r| r["condition"] == "invariant").count(), 4);
}

#[test]
fn sigma_solve_matches_the_shipped_parameterization() {
    let o = ivpp(&["sigma", "solve", "--order", "v,u,z,y,x,w"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = scratch("solved.param", &stdout(&o));
    let check = ivpp(&["sigma", "verify", "--param-file", path.to_str().unwrap()]);
    assert_eq!(code(&check), 0);
    let bad = ivpp(&["sigma", "solve", "--order", "x,y"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn short_trace_reports_no_recovery() {
    let o = ivpp(&["sc", "trace", "--kmax", "2", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let recs = json_lines(&o);
    assert_eq!(recs.len(), 3 * 6 + 1);
    assert_eq!(recs[6]["tag"], "INF");
    assert_eq!(recs[7]["value"], "-g/f");
    assert!(recs.last().unwrap()["recovery_index"].is_null());
}

#[test]
fn probe_spikes_inside_the_window() {
    let o = ivpp(&["sc", "probe", "--h", "1,1,2,1", "--steps", "5", "--format", "machine"]);
    assert_eq!(code(&o), 0);
    let mags: Vec<f64> = json_lines(&o).iter().map(|r| r["approx"].as_str().unwrap().parse().unwrap()).collect();
    assert_eq!(mags.len(), 6);
    assert!(mags[1..5].iter().all(|m| *m > 1e3));
    assert!(mags[5] < 10.0);
    assert_eq!(code(&ivpp(&["sc", "probe", "--h", "1,1,2,1", "--delta", "0"])), 2);
}

#[test]
fn period_two_derivation_is_refused() {
    let o = ivpp(&["derive", "--period", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("period 2 is not reachable"), "{}", stderr(&o));
}

#[test]
fn derives_the_period_three_and_four_pairs() {
    let o = ivpp(&["derive", "--period", "3,4", "--format", "machine"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let recs = json_lines(&o);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["period"], 3);
    assert_eq!(recs[0]["gammas"], serde_json::json!(["f", "t*g"]));
    assert_eq!(recs[1]["period"], 4);
    assert_eq!(recs[1]["gammas"], serde_json::json!(["r*f^2 - t*g^2", "t*f + g"]));
}

#[test]
fn verifies_shipped_and_given_pairs() {
    let o = ivpp(&["verify", "--period", "4", "--format", "machine"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let recs = json_lines(&o);
    let summary = recs.last().unwrap();
    assert_eq!(summary["witnesses"], 20);
    assert!(summary["max_residual"].as_str().unwrap().parse::<f64>().unwrap() <= 1e-9);
    assert_eq!(recs.len(), 21);

    let given = ivpp(&["verify", "--period", "4", "--gamma", "r*f^2 - t*g^2", "--gamma", "t*f + g", "--samples", "4"]);
    assert_eq!(code(&given), 0);
    assert!(stdout(&given).contains("4 witnesses"));
}

#[test]
fn corrupted_gamma_fails_verification() {
    let o = ivpp(&["verify", "--period", "4", "--gamma", "r*f^2 - t*g^2", "--gamma", "t*f + g + 1", "--samples", "5"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("verification failed"), "{}", stderr(&o));
}

#[test]
fn period_two_surfaces_verify() {
    let o = ivpp(&["verify", "--period", "2", "--samples", "10", "--format", "machine"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json_lines(&o).last().unwrap()["witnesses"], 10);
}

#[test]
fn machine_output_is_reproducible() {
    let args = ["verify", "--period", "5", "--samples", "5", "--seed", "7", "--format", "machine"];
    let a = ivpp(&args);
    let b = ivpp(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = ivpp(&["verify", "--period", "5", "--samples", "5", "--seed", "8", "--format", "machine"]);
    assert_ne!(a.stdout, c.stdout);
}
