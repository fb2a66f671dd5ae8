use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use strobe_tomo::io::{model_to_json, observables_to_json, parse_observables, state_to_json};
use strobe_tomo::random::{random_density, seeded_rng};
use strobe_tomo::{
    laser_cooling_model, ComplexMatrix, DensityMatrix, LindbladModel, ObservableSet,
};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_strobe-tomo"));
    cmd.env_remove("STROBE_TOMO_TOLERANCE");
    cmd
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"))
        .join("cli")
        .join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(path: &Path, text: &str) -> PathBuf {
    std::fs::write(path, text).unwrap();
    path.to_path_buf()
}

#[test]
fn analyze_laser_cooling_json() {
    let o = run(bin().args(["analyze", "--gamma1", "1", "--gamma2", "2", "--json"]));
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    let r = &v["report"];
    assert_eq!(r["eta"], 4);
    assert_eq!(r["mu"], 3);
    assert_eq!(r["measurement_budget"], 12);
    assert_eq!(r["static_observable_count"], 8);
    assert_eq!(r["observables_required"], 4);
    assert_eq!(r["min_poly"].as_array().unwrap().len(), 4);
    assert_eq!(v["model"]["dim"], 3);
}

#[test]
fn analyze_text_is_default() {
    let o = run(bin().args(["analyze", "--gamma1", "1", "--gamma2", "2"]));
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("index of cyclicity eta = 4"), "{text}");
    assert!(text.contains("measurement budget eta*mu = 12"));
}

#[test]
fn analyze_report_echo_reproduces() {
    let dir = scratch("echo");
    let o = run(bin().args(["analyze", "--gamma1", "0.5", "--gamma2", "3", "--json"]));
    let v = json(&o);
    let model = write(&dir.join("model.json"), &v["model"].to_string());
    let again = json(&run(bin().arg("analyze").arg(&model).arg("--json")));
    assert_eq!(again["report"], v["report"]);
}

#[test]
fn analyze_zero_model_file() {
    let dir = scratch("zero");
    let model = write(&dir.join("model.json"), r#"{"dim": 3}"#);
    let o = run(bin().arg("analyze").arg(&model).arg("--json"));
    assert!(o.status.success(), "{}", stderr(&o));
    let r = &json(&o)["report"];
    assert_eq!(r["eta"], 9);
    assert_eq!(r["mu"], 1);
    assert_eq!(r["measurement_budget"], 9);
}

#[test]
fn malformed_models_name_the_field() {
    let dir = scratch("malformed");
    let cases = [
        (
            r#"{"dim": 2, "hamiltonian": [[{"re": 1}, {"re": 0, "im": 1}], [{"re": 0, "im": 1}, {"re": 0}]]}"#,
            "hamiltonian",
        ),
        (
            r#"{"dim": 2, "jumps": [{"rate": -1, "matrix": [[{"re": 0}, {"re": 1}], [{"re": 0}, {"re": 0}]]}]}"#,
            "jumps[0].rate",
        ),
        (
            r#"{"dim": 2, "jumps": [{"rate": 1, "matrix": [[{"re": 0}, {"re": 1}]]}]}"#,
            "jumps[0].matrix",
        ),
        (r#"{"dim": 2, "bogus": 1}"#, "bogus"),
        ("not json", "model"),
    ];
    for (k, (text, field)) in cases.iter().enumerate() {
        let path = write(&dir.join(format!("m{k}.json")), text);
        let o = run(bin().arg("analyze").arg(&path));
        assert_eq!(o.status.code(), Some(2), "case {k}");
        assert!(stderr(&o).contains(field), "case {k}: {}", stderr(&o));
    }
}

#[test]
fn missing_model_file_exits_2() {
    let o = run(bin().args(["analyze", "/nonexistent/model.json"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn find_observables_is_deterministic() {
    let a = run(bin().args([
        "find-observables",
        "--gamma1",
        "1",
        "--gamma2",
        "2",
        "--seed",
        "9",
    ]));
    let b = run(bin().args([
        "find-observables",
        "--gamma1",
        "1",
        "--gamma2",
        "2",
        "--seed",
        "9",
    ]));
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let set = parse_observables(&stdout(&a)).unwrap();
    assert_eq!(set.len(), 4);
    assert!(stderr(&a).contains("ok = true"));
}

#[test]
fn find_observables_zero_two_level_model() {
    let dir = scratch("zero2");
    let model = write(&dir.join("model.json"), r#"{"dim": 2}"#);
    let out = dir.join("obs.json");
    let o = run(bin()
        .arg("find-observables")
        .arg(&model)
        .arg("--out")
        .arg(&out));
    assert!(o.status.success(), "{}", stderr(&o));
    let set = parse_observables(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(set.len(), 4);
}

#[test]
fn find_observables_exhausted_exits_4() {
    let o = run(bin().args([
        "find-observables",
        "--gamma1",
        "1",
        "--gamma2",
        "2",
        "--max-attempts",
        "0",
    ]));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

struct Pipeline {
    dir: PathBuf,
    model: PathBuf,
    state: PathBuf,
    observables: PathBuf,
}

fn pipeline(name: &str, state: &DensityMatrix) -> Pipeline {
    let dir = scratch(name);
    let model = write(
        &dir.join("model.json"),
        &model_to_json(&laser_cooling_model(1.0, 2.0).unwrap()),
    );
    let state = write(&dir.join("state.json"), &state_to_json(state));
    let observables = dir.join("obs.json");
    let o = run(bin()
        .arg("find-observables")
        .arg(&model)
        .arg("--seed")
        .arg("3")
        .arg("--out")
        .arg(&observables));
    assert!(o.status.success(), "{}", stderr(&o));
    Pipeline {
        dir,
        model,
        state,
        observables,
    }
}

#[test]
fn simulate_identity_observable_reads_one() {
    let p = pipeline("identity", &random_density(3, &mut seeded_rng(1)));
    let set = ObservableSet::new(vec![ComplexMatrix::identity(3)]).unwrap();
    let obs = write(&p.dir.join("id.json"), &observables_to_json(&set));
    let o = run(bin().arg("simulate").arg(&p.model).arg(&p.state).arg(&obs));
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("observable_index,time,value,sigma"));
    let mut rows = 0;
    for line in lines {
        let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!((value - 1.0).abs() <= 1e-12, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 3);
}

#[test]
fn simulate_input_errors() {
    let p = pipeline("sim-errors", &random_density(3, &mut seeded_rng(2)));
    let o = run(bin()
        .arg("simulate")
        .arg(&p.model)
        .arg(p.dir.join("missing.json"))
        .arg(&p.observables));
    assert_eq!(o.status.code(), Some(2));

    let bad = write(
        &p.dir.join("bad.json"),
        r#"[[{"re": 2}, {"re": 0}, {"re": 0}], [{"re": 0}, {"re": -1}, {"re": 0}], [{"re": 0}, {"re": 0}, {"re": 0}]]"#,
    );
    let o = run(bin()
        .arg("simulate")
        .arg(&p.model)
        .arg(&bad)
        .arg(&p.observables));
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));

    let small = write(
        &p.dir.join("small.json"),
        &state_to_json(&DensityMatrix::basis_state(2, 0).unwrap()),
    );
    let o = run(bin()
        .arg("simulate")
        .arg(&p.model)
        .arg(&small)
        .arg(&p.observables));
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn full_pipeline_noiseless() {
    let truth = random_density(3, &mut seeded_rng(4));
    let p = pipeline("full", &truth);
    let record = p.dir.join("record.csv");
    let o = run(bin()
        .arg("simulate")
        .arg(&p.model)
        .arg(&p.state)
        .arg(&p.observables)
        .arg("--out")
        .arg(&record));
    assert!(o.status.success(), "{}", stderr(&o));
    let o = run(bin()
        .arg("reconstruct")
        .arg(&p.model)
        .arg(&p.observables)
        .arg(&record)
        .arg("--truth")
        .arg(&p.state)
        .arg("--json"));
    assert!(o.status.success(), "{}", stderr(&o));
    let v = json(&o);
    assert!(v["frobenius_error"].as_f64().unwrap() <= 1e-8, "{v}");
    assert_eq!(v["design_rank"], 9);
    assert_eq!(v["projected"], true);

    let text = run(bin()
        .arg("reconstruct")
        .arg(&p.model)
        .arg(&p.observables)
        .arg(&record));
    assert!(stdout(&text).contains("design rank: 9"));
}

#[test]
fn noisy_pipeline_projection_toggle() {
    let truth = DensityMatrix::basis_state(3, 0).unwrap();
    let p = pipeline("noisy", &truth);
    let record = p.dir.join("record.csv");
    let o = run(bin()
        .arg("simulate")
        .arg(&p.model)
        .arg(&p.state)
        .arg(&p.observables)
        .args(["--sigma", "0.01", "--seed", "5", "--out"])
        .arg(&record));
    assert!(o.status.success());
    let recon = |extra: &[&str]| {
        let o = run(bin()
            .arg("reconstruct")
            .arg(&p.model)
            .arg(&p.observables)
            .arg(&record)
            .arg("--json")
            .args(extra));
        assert!(o.status.success(), "{}", stderr(&o));
        json(&o)
    };
    let projected = recon(&[]);
    let raw = recon(&["--no-project"]);
    assert_eq!(raw["projected"], false);
    assert!(projected["min_eigenvalue"].as_f64().unwrap() >= -1e-12);
    assert!(raw["min_eigenvalue"].as_f64().unwrap() < 0.0, "{raw}");
}

#[test]
fn three_observables_are_rank_deficient() {
    let truth = random_density(3, &mut seeded_rng(6));
    let p = pipeline("deficient", &truth);
    let full = parse_observables(&std::fs::read_to_string(&p.observables).unwrap()).unwrap();
    let three = ObservableSet::new(full.observables()[..3].to_vec()).unwrap();
    let obs = write(&p.dir.join("three.json"), &observables_to_json(&three));
    let record = p.dir.join("record.csv");
    let o = run(bin()
        .arg("simulate")
        .arg(&p.model)
        .arg(&p.state)
        .arg(&obs)
        .arg("--out")
        .arg(&record));
    assert!(o.status.success());
    let o = run(bin()
        .arg("reconstruct")
        .arg(&p.model)
        .arg(&obs)
        .arg(&record));
    assert_eq!(o.status.code(), Some(6), "{}", stderr(&o));
}

#[test]
fn tolerance_environment_override() {
    let o = run(bin()
        .env("STROBE_TOMO_TOLERANCE", "1e-6")
        .args(["analyze", "--gamma1", "1", "--gamma2", "2", "--json"]));
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["tolerance"]["rank_rtol"], 1e-6);
    assert_eq!(v["report"]["eta"], 4);

    let o = run(bin()
        .env("STROBE_TOMO_TOLERANCE", "abc")
        .args(["analyze", "--gamma1", "1", "--gamma2", "2"]));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("STROBE_TOMO_TOLERANCE"));
}

#[test]
fn model_file_roundtrip_through_cli() {
    let dir = scratch("roundtrip");
    let model = LindbladModel::zero(2).unwrap();
    let path = write(&dir.join("m.json"), &model_to_json(&model));
    let o = run(bin().arg("analyze").arg(&path).arg("--json"));
    assert!(o.status.success());
    assert_eq!(json(&o)["report"]["eta"], 4);
}
