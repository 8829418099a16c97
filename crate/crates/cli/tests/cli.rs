use std::path::Path;
use std::process::{Command, Output};

use heyde_cli::report::Status;
use heyde_cli::{load_scenario, run_scenario, Format, RunOptions, Scenario, BUNDLED};

fn heyde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heyde"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bundled_expectations_hold() {
    for (name, _) in BUNDLED {
        let s = load_scenario(name).unwrap();
        let r = run_scenario(&s, &RunOptions::default()).unwrap();
        let bad: Vec<_> = r
            .checks
            .iter()
            .filter(|c| c.status == Status::Mismatch)
            .map(|c| format!("{}: {}", c.name, c.summary))
            .collect();
        assert!(bad.is_empty(), "{name}: {bad:?}");
        assert_eq!(
            r.summary.expectations,
            r.checks.len(),
            "{name} has unannotated checks"
        );
    }
}

#[test]
fn structured_reports_are_reproducible() {
    let s = load_scenario("remark_3_1").unwrap();
    for workers in [1, 3] {
        let opts = RunOptions {
            workers,
            ..RunOptions::default()
        };
        let a = run_scenario(&s, &opts).unwrap().emit(Format::Structured);
        let b = run_scenario(&s, &opts).unwrap().emit(Format::Structured);
        assert_eq!(a, b);
        assert!(!a.contains("wall_time"));
    }
}

#[test]
fn seed_override_changes_sampling_only() {
    let s = load_scenario("remark_3_1").unwrap();
    let opts = RunOptions {
        seed: Some(99),
        ..RunOptions::default()
    };
    let r = run_scenario(&s, &opts).unwrap();
    assert_eq!(r.environment.seed, 99);
    assert_eq!(r.summary.mismatches, 0);
}

#[test]
fn coset_family_records() {
    let s = load_scenario("remark_3_1").unwrap();
    let r = run_scenario(&s, &RunOptions::default()).unwrap();
    let by = |name: &str| r.checks.iter().find(|c| c.name == name).unwrap();
    assert!(!by("condition1").verdict);
    assert!(by("eq2 on the grid").max_residual.unwrap() < 1e-9);
    assert_eq!(
        by("mu1 is not a product").detail["certificate"]["failed_step"],
        "product_form"
    );
    assert!(by("sampled conditional symmetry").p_value.unwrap() > 0.01);
    assert!(by("perturbed pair is asymmetric").p_value.unwrap() < 0.01);
}

#[test]
fn cross_term_certificate() {
    let s = load_scenario("remark_2_2").unwrap();
    let r = run_scenario(&s, &RunOptions::default()).unwrap();
    let d = &r.checks[4].detail["certificate"];
    assert!(d["cross_term"].as_f64().unwrap().abs() > 0.5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(
        dir.path(),
        "ok.toml",
        "schema = 1\ngroup = { type = \"finite\", moduli = [3] }\nautomorphism = { scalar = 1 }\n\
         [[checks]]\nkind = \"condition1\"\nexpect = true\n",
    );
    let out = heyde(&["run", &ok]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).matches(" ok ").count(),
        1
    );

    let bad = write(
        dir.path(),
        "bad.toml",
        "schema = 1\ngroup = { type = \"finite\", moduli = [3] }\nautomorphism = { scalar = 1 }\n\
         [[checks]]\nkind = \"condition1\"\nexpect = false\n",
    );
    let out = heyde(&["run", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("MISMATCH"));

    let unknown = write(dir.path(), "unknown.toml", "schema = 1\nfoo = 2\n");
    let out = heyde(&["run", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field `foo`"));

    let broken = write(
        dir.path(),
        "broken.toml",
        "schema = 1\ngroup = { type = \"finite\"\n",
    );
    let out = heyde(&["run", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let dangling = write(
        dir.path(),
        "dangling.toml",
        "schema = 1\ngroup = { type = \"finite\", moduli = [2] }\n\
         [[checks]]\nkind = \"pd\"\ndistribution = \"nope\"\n",
    );
    let out = heyde(&["run", &dangling]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`nope`"));

    let big = write(
        dir.path(),
        "big.toml",
        "schema = 1\ngroup = { type = \"finite\", moduli = [1000, 1000] }\n",
    );
    assert_eq!(heyde(&["run", &big]).status.code(), Some(3));

    assert_eq!(heyde(&["run", "no_such_scenario"]).status.code(), Some(2));
}

#[test]
fn wrong_check_for_group_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "s.toml",
        "schema = 1\ngroup = { type = \"finite\", moduli = [2] }\nautomorphism = { scalar = 1 }\n\
         [distributions]\nm = { type = \"uniform\" }\n",
    );
    assert_eq!(heyde(&["run", &p]).status.code(), Some(2));
    let p = write(
        dir.path(),
        "t.toml",
        "schema = 1\ngroup = { type = \"finite\", moduli = [2] }\nautomorphism = { scalar = 1 }\n\
         [distributions]\nm = { type = \"haar\" }\n\
         [[checks]]\nkind = \"eq2_grid\"\nmu1 = \"m\"\nmu2 = \"m\"\n",
    );
    let out = heyde(&["run", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eq2_exact"));
}

#[test]
fn tolerance_override() {
    let out = heyde(&["run", "remark_2_2", "--tolerance", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    let out = heyde(&["run", "remark_2_2", "--tolerance", "1e-6"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn empty_scenario_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "empty.toml",
        "schema = 1\ndescription = \"nothing\"\n",
    );
    let out = heyde(&["run", &p]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("scenario  empty\n"));
    assert!(text.contains("tolerances"));
    assert!(!text.contains("verdict"));
}

#[test]
fn structured_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = heyde(&[
        "run",
        "solenoid_gauss",
        "--format",
        "structured",
        "--out",
        out_path.to_str().unwrap(),
        "--timings",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["summary"]["mismatches"], 0);
    assert!(v["checks"][0]["wall_time_ms"].is_number());
    assert_eq!(v["checks"][7]["detail"]["solenoid_kernel_order"], 1);
}

#[test]
fn list_and_describe() {
    let out = heyde(&["list-scenarios"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for (name, _) in BUNDLED {
        assert!(text.contains(name));
    }
    let out = heyde(&["describe", "prop_2_1_adic"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("truncation"));
}

#[test]
fn distributions_compose() {
    let text = r#"
schema = 1
group = { type = "finite", moduli = [4] }
automorphism = { scalar = 1 }

[distributions]
a = { type = "finite", probs = [0.5, 0.5, 0, 0] }
b = { type = "point", x = [2] }
c = { type = "convolve", parts = ["a", "b"] }
d = { type = "shift", base = "a", x = [2] }
h = { type = "haar", generators = [[2]] }

[[checks]]
kind = "localize"
distribution = "h"
generators = [[2]]
expect = true

[[checks]]
kind = "localize"
distribution = "c"
generators = [[2]]
expect = false

[[checks]]
name = "convolution equals shift"
kind = "eq2_exact"
mu1 = "c"
mu2 = "d"
"#;
    let s = Scenario::parse("compose", text).unwrap();
    let r = run_scenario(&s, &RunOptions::default()).unwrap();
    assert_eq!(r.summary.mismatches, 0);
    assert_eq!(r.checks[2].status, Status::Unchecked);
}

#[test]
fn self_reference_is_rejected() {
    let text = "schema = 1\ngroup = { type = \"finite\", moduli = [2] }\n\
                [distributions]\na = { type = \"shift\", base = \"a\", x = [1] }\n";
    let s = Scenario::parse("loop", text).unwrap();
    let e = run_scenario(&s, &RunOptions::default()).unwrap_err();
    assert!(e.to_string().contains("refers to itself"), "{e}");
}
