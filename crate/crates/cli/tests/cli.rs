use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn iris() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/iris.csv")
}

fn hbx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbx")).args(args).output().unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key)?.trim().split(' ').next()?.parse().ok())
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
}

fn fit(dir: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut args = vec!["fit", "--data", iris(), "--label", "species", "--out", arg(&out)];
    args.extend_from_slice(extra);
    let o = hbx(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    assert_eq!(hbx(&[]).status.code(), Some(2));
    assert_eq!(hbx(&["fit", "--algo", "nope", "--data", "x.csv", "--out", "m.json"]).status.code(), Some(2));
    let base = ["fit", "--data", iris(), "--label", "species", "--out", arg(&out)];
    let with = |extra: &[&str]| {
        let mut a = base.to_vec();
        a.extend_from_slice(extra);
        hbx(&a).status.code()
    };
    assert_eq!(with(&["--theta", "1.5"]), Some(2));
    assert_eq!(with(&["--theta", "0"]), Some(2));
    assert_eq!(with(&["--gamma", "-1"]), Some(2));
    assert_eq!(with(&["--gamma", "abc"]), Some(2));
    assert_eq!(with(&["--algo", "bagging", "--sample-rate", "0"]), Some(2));
    assert_eq!(with(&["--epochs", "0"]), Some(2));
    assert!(!out.exists());
    assert_eq!(hbx(&["fit", "--data", "missing.csv", "--out", arg(&out)]).status.code(), Some(1));
    assert_eq!(hbx(&["fit", "--data", iris(), "--label", "nope", "--out", arg(&out)]).status.code(), Some(1));
    assert_eq!(hbx(&["eval", "--model", "missing.json", "--data", iris()]).status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_hbx")).args(base).env("HBX_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_is_echoed_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = hbx(&["fit", "--data", iris(), "--label", "species", "--theta", "0.3", "--out", arg(&out)]);
    let err = String::from_utf8(o.stderr).unwrap();
    let line = err.lines().find(|l| l.starts_with("config: ")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&line["config: ".len()..]).unwrap();
    assert_eq!(json["learner"]["params"]["theta"], 0.3);
    assert_eq!(json["run"]["command"], "fit");
}

#[test]
fn tiny_theta_model_reproduces_its_training_labels() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit(dir.path(), "tiny.json", &["--theta", "0.001"]);
    let o = hbx(&["eval", "--model", arg(&model), "--data", iris()]);
    assert_eq!(value(&stdout(&o), "accuracy"), 1.0);

    let o = hbx(&["predict", "--model", arg(&model), "--data", iris()]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,predicted,membership"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 150);
    assert!(rows[0].starts_with("0,setosa,"));
    assert!(rows[149].starts_with("149,virginica,"));
}

#[test]
fn holdout_flow_uses_stored_scaler() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(iris()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let (mut train, mut test) = (vec![header.to_string()], vec![header.to_string()]);
    for (i, l) in lines.enumerate() {
        if i % 10 < 3 { &mut test } else { &mut train }.push(l.to_string());
    }
    let train_path = dir.path().join("train.csv");
    let test_path = dir.path().join("test.csv");
    fs::write(&train_path, train.join("\n") + "\n").unwrap();
    fs::write(&test_path, test.join("\n") + "\n").unwrap();
    let model = dir.path().join("m.json");
    let o = hbx(&[
        "fit",
        "--algo",
        "onln-gfmm",
        "--theta",
        "0.1",
        "--data",
        arg(&train_path),
        "--label",
        "species",
        "--out",
        arg(&model),
    ]);
    assert!(o.status.success());
    let o = hbx(&["eval", "--model", arg(&model), "--data", arg(&test_path)]);
    assert!(o.status.success());
    assert!(value(&stdout(&o), "accuracy") >= 0.9);
}

#[test]
fn cv_and_gridsearch_report() {
    let o = hbx(&["cv", "--theta", "0.1", "--k", "5", "--seed", "7", "--data", iris(), "--label", "species"]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("fold ")).count(), 5);
    let mean = value(&out, "mean");
    assert!((0.88..=1.0).contains(&mean));

    let o =
        hbx(&["gridsearch", "--data", iris(), "--label", "species", "--grid", "theta=0.05,0.2", "--grid", "gamma=1,2"]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("cell ")).count(), 4);
    assert!(out.lines().any(|l| l.starts_with("best theta=")));
    assert!(out.lines().any(|l| l.starts_with("best_config {")));
    let o = hbx(&["gridsearch", "--data", iris(), "--label", "species", "--grid", "theta"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn prune_edit_and_merge_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit(dir.path(), "m.json", &["--theta", "0.1"]);
    let pruned = dir.path().join("p.json");
    let o = hbx(&["prune", "--model", arg(&model), "--data", iris(), "--out", arg(&pruned)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("boxes "));
    let o = hbx(&["eval", "--model", arg(&pruned), "--data", iris()]);
    assert!(value(&stdout(&o), "accuracy") > 0.9);

    let edited = dir.path().join("edited.csv");
    let o = hbx(&["edit", "--data", iris(), "--label", "species", "--repeats", "2", "--out", arg(&edited)]);
    assert!(o.status.success());
    let kept = value(&stdout(&o), "kept") as usize;
    let text = fs::read_to_string(&edited).unwrap();
    assert_eq!(text.lines().count(), kept + 1);
    assert!(text.starts_with("sepal_length,sepal_width,petal_length,petal_width,species\n"));
    let refit = dir.path().join("refit.json");
    let o = hbx(&["fit", "--data", arg(&edited), "--label", "species", "--out", arg(&refit)]);
    assert!(o.status.success());

    let bag = fit(dir.path(), "bag.json", &["--algo", "bagging", "--members", "4"]);
    let merged = dir.path().join("merged.json");
    let o = hbx(&["merge", "--model", arg(&bag), "--model", arg(&model), "--theta", "0.2", "--out", arg(&merged)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = hbx(&["eval", "--model", arg(&merged), "--data", iris()]);
    assert!(value(&stdout(&o), "accuracy") > 0.9);

    let rh = fit(dir.path(), "rh.json", &["--algo", "random-hyperboxes", "--members", "4"]);
    let o = hbx(&["merge", "--model", arg(&rh), "--out", arg(&merged)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn explain_and_boundary_exports() {
    let dir = tempfile::tempdir().unwrap();
    let model = fit(dir.path(), "m.json", &["--theta", "0.2"]);
    let pc = dir.path().join("pc.csv");
    let o = hbx(&["explain", "--model", arg(&model), "--data", iris(), "--row", "75", "--parallel", arg(&pc)]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["predicted"], 2);
    assert_eq!(json["per_class"].as_array().unwrap().len(), 3);
    let rows = fs::read_to_string(&pc).unwrap();
    assert_eq!(rows.lines().count(), 1 + 4 + 3 * 8);

    let o = hbx(&["boundary", "--model", arg(&model), "--out", arg(&dir.path().join("g.csv"))]);
    assert_eq!(o.status.code(), Some(1));

    let two = dir.path().join("two.csv");
    let mut text = String::from("a,b,label\n");
    for i in 0..20 {
        let x = i as f64 / 20.0;
        let y = (i * 7 % 20) as f64 / 20.0;
        text.push_str(&format!("{x},{y},{}\n", if x < 0.5 { "left" } else { "right" }));
    }
    fs::write(&two, text).unwrap();
    let m2 = dir.path().join("two.json");
    assert!(hbx(&["fit", "--data", arg(&two), "--theta", "0.3", "--out", arg(&m2)]).status.success());
    let grid = dir.path().join("grid.csv");
    let boxes = dir.path().join("boxes.json");
    let o = hbx(&["boundary", "--model", arg(&m2), "--resolution", "10", "--out", arg(&grid), "--boxes", arg(&boxes)]);
    assert!(o.status.success());
    let g = fs::read_to_string(&grid).unwrap();
    assert_eq!(g.lines().count(), 101);
    assert!(g.lines().nth(1).unwrap().ends_with(",left"));
    assert!(g.lines().last().unwrap().ends_with(",right"));
    let b: serde_json::Value = serde_json::from_str(&fs::read_to_string(&boxes).unwrap()).unwrap();
    assert!(!b.as_array().unwrap().is_empty());
}

#[test]
fn no_scale_requires_normalized_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = hbx(&["fit", "--no-scale", "--data", iris(), "--label", "species", "--out", arg(&out)]);
    assert_eq!(o.status.code(), Some(1));
}
