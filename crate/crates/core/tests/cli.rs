use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use qpainleve::exact::rat;
use qpainleve::params::{parse_params, Family, ParamSet};
use qpainleve::report::{CheckRecord, Status};
use qpainleve::task::{TaskKind, VerifyTask};

fn qpainleve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpainleve")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn weyl_report_shape_and_determinism() {
    let a = qpainleve(&["verify", "weyl", "--N", "1", "--seed", "7", "--json"]);
    let b = qpainleve(&["verify", "weyl", "--N", "1", "--seed", "7", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.is_empty());
    let v = json(&a);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["environment"]["seed"], 7);
    assert_eq!(v["task"]["kind"], "weyl");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["residual"].is_string() && c.get("millis").is_none()));
}

#[test]
fn timings_are_opt_in() {
    let out = qpainleve(&["verify", "weyl", "--N", "1", "--timings", "--json"]);
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["millis"].is_number()));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "pde", "--family", "III", "--N", "2", "--hbar", "1"][..],
        &["verify", "pde", "--family", "II", "--N", "1", "--m", "1", "--hbar", "1", "--mode", "exact"][..],
        &["verify", "radial", "--N", "2"][..],
        &["verify", "weyl", "--N", "2", "--prec", "16"][..],
    ] {
        let out = qpainleve(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(json(&out)["error"].is_string());
    }
    let out = qpainleve(&["verify", "n1", "--family", "IV", "--m", "1", "--params", "b=1/0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_identity_exits_1() {
    let out = qpainleve(&["verify", "pde", "--family", "II", "--N", "2", "--m", "2", "--hbar", "1", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    let detail = v["checks"][0]["detail"].as_str().unwrap();
    assert!(detail.contains("factor N"), "{detail}");
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = std::env::temp_dir().join(format!("qpainleve-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "# defaults\nfamily = IV\nm = 2\nparams = b=-1/3\nseed = 3\n").unwrap();
    let out = qpainleve(&["verify", "n1", "--config", cfg.to_str().unwrap(), "--seed", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["environment"]["seed"], 5);
    assert_eq!(v["task"]["params"], "family=IV,m=2,b=-1/3");
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(qpainleve(&["verify", "weyl", "--N", "1", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn print_hamiltonian_fills_integral_parameters() {
    let out = qpainleve(&["print", "hamiltonian", "--kind", "nagoya", "--family", "II", "--m", "1", "--hbar", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.is_empty());
}

#[test]
fn missing_keys_follow_the_family() {
    let p = ParamSet::new(Family::VI).with_rat("hbar", rat(1, 2)).unwrap();
    let mut task = VerifyTask::new(TaskKind::PdeSymbolic, p);
    assert_eq!(task.missing(), vec!["N", "m", "b", "c"]);
    task.set("N", "2").unwrap();
    task.set("m", "1").unwrap();
    task.set("b", "-1/3").unwrap();
    task.set("c", "-1/5").unwrap();
    assert!(task.validate().is_ok());
    assert!(VerifyTask::new(TaskKind::Eom, ParamSet::new(Family::I)).validate().is_err());
}

fn status() -> impl Strategy<Value = Status> {
    prop_oneof![Just(Status::Pass), Just(Status::Fail), Just(Status::ResolvedWithCorrection)]
}

proptest! {
    #[test]
    fn params_render_round_trips(
        vals in proptest::collection::vec((-50i64..50, 1i64..30), 5),
        n in 1usize..5,
    ) {
        let mut p = ParamSet::new(Family::V);
        p.n = Some(n);
        for (k, (num, den)) in ["hbar", "a", "b", "c", "t"].iter().zip(&vals) {
            let v = if *k == "hbar" && *num == 0 { rat(1, *den) } else { rat(*num, *den) };
            p.set_rat(k, v).unwrap();
        }
        prop_assert_eq!(parse_params(&p.render()).unwrap(), p);
    }

    #[test]
    fn combined_status_is_the_worst(statuses in proptest::collection::vec(status(), 0..8)) {
        let recs: Vec<CheckRecord> = statuses
            .iter()
            .map(|s| CheckRecord::new("x", "x", *s != Status::Fail, "0").with_status(*s))
            .collect();
        let expect = if statuses.contains(&Status::Fail) {
            Status::Fail
        } else if statuses.contains(&Status::ResolvedWithCorrection) {
            Status::ResolvedWithCorrection
        } else {
            Status::Pass
        };
        prop_assert_eq!(Status::combine(&recs), expect);
    }
}
