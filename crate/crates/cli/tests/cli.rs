use std::path::Path;
use std::process::{Command, Output};

fn pogrid(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pogrid"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

const SMALL: &str = r#"
instances = [1.0]

[grid]
origin = [-4.0, -4.0]
cell_length = 1.0
cell_width = 1.0
cols = 32
rows = 8

[hypotheses]
n_lon = 3
n_lat = 3

[forest]
n_trees = 10
"#;

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(pogrid(d, &[]).status.code(), Some(2));
    assert_eq!(pogrid(d, &["train"]).status.code(), Some(2));
    assert_eq!(
        pogrid(
            d,
            &[
                "--config",
                "missing.toml",
                "train",
                "--dataset",
                "x",
                "--out",
                "m"
            ]
        )
        .status
        .code(),
        Some(2)
    );
    std::fs::write(d.join("bad.toml"), "colour = 3\n").unwrap();
    let out = pogrid(
        d,
        &[
            "--config",
            "bad.toml",
            "generate-dataset",
            "--preset",
            "straight-road",
            "--out",
            "ds",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert!(!d.join("ds").exists());
}

#[test]
fn domain_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = pogrid(d, &["simulate", "--scene", "nowhere.toml", "--out", "sim"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.toml"));
    std::fs::write(d.join("model.pgrf"), b"not a model").unwrap();
    std::fs::write(d.join("scene.toml"), "").unwrap();
    let out = pogrid(
        d,
        &[
            "predict",
            "--model",
            "model.pgrf",
            "--scene",
            "scene.toml",
            "--out",
            "p",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn small_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("small.toml"), SMALL).unwrap();
    let run = |args: &[&str]| {
        let mut full = vec!["--config", "small.toml"];
        full.extend_from_slice(args);
        let out = pogrid(d, &full);
        assert!(
            out.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).unwrap()
    };
    run(&[
        "generate-dataset",
        "--preset",
        "straight-road",
        "--out",
        "ds",
    ]);
    assert!(d.join("ds/manifest.json").exists());
    assert!(d.join("ds/scenes/0299/scene.toml").exists());
    run(&["train", "--dataset", "ds", "--out", "model.pgrf"]);
    run(&[
        "predict",
        "--model",
        "model.pgrf",
        "--scene",
        "ds/scenes/0007/scene.toml",
        "--out",
        "pred",
    ]);
    assert!(d.join("pred/pog_0.grid").exists());
    run(&[
        "predict",
        "--model",
        "model.pgrf",
        "--aog",
        "ds/scenes/0007/aog.grid",
        "--out",
        "pred2",
    ]);
    assert_eq!(
        std::fs::read(d.join("pred/pog_0.grid")).unwrap(),
        std::fs::read(d.join("pred2/pog_0.grid")).unwrap()
    );
    let table = run(&[
        "evaluate",
        "--model",
        "model.pgrf",
        "--dataset",
        "ds",
        "--out",
        "report.json",
    ]);
    assert!(table.starts_with("t_pred"));
    assert!(d.join("report.csv").exists());
    let bench = run(&[
        "benchmark",
        "--model",
        "model.pgrf",
        "--scene",
        "ds/scenes/0007/scene.toml",
        "--reps",
        "10",
    ]);
    assert!(bench.contains("speedup"));
    let out = pogrid(
        d,
        &[
            "--config",
            "small.toml",
            "benchmark",
            "--model",
            "model.pgrf",
            "--scene",
            "ds/scenes/0007/scene.toml",
            "--reps",
            "3",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}
