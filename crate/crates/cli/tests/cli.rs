use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcontact"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("run bcontact")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Fixture {
        let dir = TempDir::new().unwrap();
        let tau = std::f64::consts::TAU;
        write(
            dir.path(),
            "s2xs1.json",
            &format!(
                r#"{{"coords": ["theta", "h", "phi"], "box": [[0, {tau}], [-0.5, 0.5], [0, {tau}]], "z": "h", "m": 1, "periodic": ["theta", "phi"]}}"#
            ),
        );
        write(
            dir.path(),
            "inv.json",
            &format!(r#"{{"coords": ["t", "phi", "theta"], "box": [[-1, 1], [0, {tau}], [0, {tau}]], "periodic": ["phi", "theta"]}}"#),
        );
        write(
            dir.path(),
            "ep.json",
            r#"{"coords": ["t", "x1", "z"], "box": [[-1, 1], [-1, 1], [-1, 1]], "z": "z", "m": 1}"#,
        );
        write(
            dir.path(),
            "torus2.json",
            &format!(r#"{{"coords": ["z", "y", "phi"], "box": [[-1, 1], [0, {tau}], [0, {tau}]], "z": "z", "m": 2, "periodic": ["y", "phi"]}}"#),
        );
        write(
            dir.path(),
            "r4.json",
            r#"{"coords": ["t", "x", "y", "z"], "box": [[-1, 1], [-1, 1], [-1, 1], [-1, 1]], "z": "z", "m": 1}"#,
        );
        write(
            dir.path(),
            "m2.json",
            r#"{"source": {"coords": ["x", "y", "z"], "box": [[-1, 1], [-1, 1], [-1, 1]], "z": "z", "m": 1},
                "components": ["-1", "x", "y", "z"]}"#,
        );
        Fixture { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }
}

const S2: &str = "sin(phi)*D(theta)+cos(phi)*B";
const EP: &str = "D(t) + x1*B";

#[test]
fn check_reports_contact() {
    let f = Fixture::new();
    let out = run(&["check", "--chart", &f.path("s2xs1.json"), "--form", S2, "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "check");
    assert_eq!(v["verdict"], "contact");
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["grid_off_z"], 200);
    assert_eq!(v["config"]["grid_on_z"], 100);
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["inputs"]["form"], S2);
    for key in ["metrics", "witnesses", "artifacts"] {
        assert!(!v[key].is_null(), "{key}");
    }
    assert!(v.get("timestamp").is_none());
}

#[test]
fn non_contact_form_exits_one() {
    let f = Fixture::new();
    let out = run(&["check", "--chart", &f.path("s2xs1.json"), "--form", "D(theta)", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "not_contact");
}

#[test]
fn input_errors_exit_two() {
    let f = Fixture::new();
    let cases: Vec<Vec<String>> = vec![
        vec!["check".into(), "--chart".into(), f.path("missing.json"), "--form".into(), S2.into()],
        vec!["check".into(), "--chart".into(), f.path("s2xs1.json"), "--form".into(), "sin(".into()],
        vec!["check".into(), "--chart".into(), f.path("s2xs1.json"), "--form".into(), "D(q)".into()],
        vec!["check".into(), "--chart".into(), f.path("s2xs1.json")],
        vec!["check".into(), "--chart".into(), f.path("s2xs1.json"), "--form".into(), S2.into(), "--grid".into(), "0".into()],
        vec!["frobnicate".into()],
        vec!["catalog".into(), "show".into(), "no_such_entry".into()],
        vec!["catalog".into(), "verify".into()],
        vec!["desing".into(), "--chart".into(), f.path("inv.json"), "--form".into(), "cos(phi)*D(t)+sin(phi)*D(theta)".into()],
    ];
    for args in cases {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn reports_are_reproducible_without_timestamp() {
    let f = Fixture::new();
    let args = ["theta", "--chart", &f.path("s2xs1.json"), "--form", S2, "--no-timestamp"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let stamped = json(&run(&["theta", "--chart", &f.path("s2xs1.json"), "--form", S2]));
    assert!(stamped["timestamp"].is_string());
}

#[test]
fn out_flag_writes_the_report() {
    let f = Fixture::new();
    let out_path = f.path("report.json");
    let out = run(&["reeb", "--chart", &f.path("ep.json"), "--form", EP, "--out", &out_path, "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["artifacts"]["reeb"], "P(t)");
    assert_eq!(v["config"]["out"], out_path.as_str());
}

#[test]
fn form_file_accepts_literal_and_document() {
    let f = Fixture::new();
    let lit = write(f.dir.path(), "form.txt", &format!("{EP}\n"));
    let out = run(&["check", "--chart", &f.path("ep.json"), "--form-file", lit.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(json(&out)["verdict"], "contact");

    // a symplectization artifact is itself a form document
    let sym = json(&run(&["symplectize", "--chart", &f.path("ep.json"), "--form", EP, "--no-timestamp"]));
    assert_eq!(sym["verdict"], "symplectic");
    let doc = write(f.dir.path(), "omega.json", &sym["artifacts"]["omega"].to_string());
    let out = run(&["check", "--form-file", doc.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(2), "a 2-form is not a contact candidate");
}

#[test]
fn reeb_hamiltonian_and_classify() {
    let f = Fixture::new();
    let ep = f.path("ep.json");
    let v = json(&run(&["hamiltonian", "--chart", &ep, "--form", EP, "--hamiltonian", "x1", "--no-timestamp"]));
    assert_eq!(v["passed"], true);
    assert!(v["artifacts"]["field"].is_string());
    let v = json(&run(&[
        "classify", "--chart", &ep, "--form", EP, "--point", "t=0,x1=0,z=0", "--point", "x1=0.5,z=0", "--no-timestamp",
    ]));
    assert_eq!(v["metrics"]["cases"], serde_json::json!(["1a", "1b"]));
    let out = run(&["classify", "--chart", &ep, "--form", EP, "--point", "z=0.5"]);
    assert_eq!(out.status.code(), Some(2), "point off Z");
}

#[test]
fn theta_on_the_compact_example() {
    let f = Fixture::new();
    let chart = f.path("s2xs1.json");
    for extra in [None, Some("--pointwise")] {
        let mut args = vec!["theta", "--chart", &chart, "--form", S2, "--no-timestamp"];
        args.extend(extra);
        let v = json(&run(&args));
        assert_eq!(v["verdict"], "nondegenerate");
        assert_eq!(v["metrics"]["sign"], 1);
        assert!(v["metrics"]["clusters"].as_u64().unwrap() >= 2);
    }
}

#[test]
fn jacobi_and_transversality() {
    let f = Fixture::new();
    let ep = f.path("ep.json");
    for extra in [vec![], vec!["--pointwise"], vec!["--vector", "x1*P(x1)"]] {
        let mut args = vec!["jacobi", "--chart", &ep, "--form", EP, "--no-timestamp"];
        args.extend(extra.iter().copied());
        let v = json(&run(&args));
        assert_eq!(v["verdict"], "jacobi", "{extra:?}");
    }
    let out = run(&["jacobi", "--chart", &ep, "--form", EP, "--vector", "P(x1)", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1), "not a Liouville field");
    assert_eq!(json(&out)["verdict"], "failed");

    let v = json(&run(&["transversality", "--chart", &ep, "--form", EP, "--no-timestamp"]));
    assert_eq!(v["verdict"], "transversal");
    let t2 = f.path("torus2.json");
    let out = run(&["transversality", "--chart", &t2, "--form", "sin(phi)*B + cos(phi)*D(y)", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "not_transversal");
}

#[test]
fn poissonize_reports_top_power_residuals() {
    let f = Fixture::new();
    let v = json(&run(&["poissonize", "--chart", &f.path("s2xs1.json"), "--form", S2, "--no-timestamp"]));
    assert_eq!(v["verdict"], "poisson");
    assert!(v["metrics"]["top_power_binomial_residual"].as_f64().unwrap() < 1e-8);
    assert!(v["metrics"]["top_power_residual"].as_f64().unwrap() > 0.1);
}

#[test]
fn contract_onto_a_hyperplane() {
    let f = Fixture::new();
    let v = json(&run(&[
        "contract",
        "--chart",
        &f.path("r4.json"),
        "--form",
        "W(B, D(t)) + W(D(x), D(y))",
        "--vector",
        "t*P(t) + x*P(x)",
        "--map-file",
        &f.path("m2.json"),
        "--no-timestamp",
    ]));
    assert_eq!(v["verdict"], "contact");
    assert_eq!(v["artifacts"]["alpha"]["form"], "B + x*D(y)");
}

#[test]
fn desing_sing_and_fold() {
    let f = Fixture::new();
    let v = json(&run(&[
        "desing", "--chart", &f.path("torus2.json"), "--form", "sin(phi)*B + cos(phi)*D(y)", "--eps", "0.1", "--no-timestamp",
    ]));
    assert_eq!(v["verdict"], "contact");
    assert!(v["artifacts"]["form"]["chart"]["z"].is_null(), "output chart is smooth");
    assert!(v["metrics"]["coincidence_residual"].as_f64().unwrap() <= 1e-10);

    let inv = f.path("inv.json");
    let form = "cos(phi)*D(t)+sin(phi)*D(theta)";
    let out = run(&["sing", "--kind", "even", "--k", "1", "--eps", "0.1", "--chart", &inv, "--form", form, "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let comps = v["artifacts"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0]["chart"]["m"], 2);
    assert_eq!(comps[0]["chart"]["z"], "t");
    assert_eq!(comps[0]["contact"], "contact");

    let v = json(&run(&["sing", "--kind", "odd", "--eps", "0.1", "--chart", &inv, "--form", form, "--no-timestamp"]));
    assert_eq!(v["artifacts"]["components"].as_array().unwrap().len(), 2);

    let v = json(&run(&["sing", "--fold", "--eps", "0.4", "--chart", &inv, "--form", form, "--no-timestamp"]));
    assert_eq!(v["verdict"], "folded");
    assert_eq!(v["metrics"]["fold_components"], 2);
}

#[test]
fn converge_writes_csv() {
    let f = Fixture::new();
    let csv = f.path("table.csv");
    let out = run(&[
        "converge", "--chart", &f.path("torus2.json"), "--form", "sin(phi)*B + cos(phi)*D(y)", "--csv", &csv, "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "converging");
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("eps,j,sup_diff\n"));
}

#[test]
fn catalog_list_show_verify() {
    let v = json(&run(&["catalog", "list", "--no-timestamp"]));
    let names: Vec<&str> = v["artifacts"]["entries"].as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    assert!(names.contains(&"s2xs1") && names.contains(&"jacobi_model_odd"));
    let v = json(&run(&["catalog", "show", "s2xs1", "--no-timestamp"]));
    assert_eq!(v["artifacts"]["entry"]["chart"]["z"], "h");
    let out = run(&["catalog", "verify", "extended_phase_space_n1", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "all_passed");
    assert_eq!(v["witnesses"][0]["name"], "extended_phase_space_n1");
}
