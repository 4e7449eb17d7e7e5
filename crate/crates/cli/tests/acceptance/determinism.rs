//! The command-line pipeline run twice with one seed but different thread
//! counts writes byte-identical artifacts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

const CONFIG: &str = r#"
seed = 7
instances = [0.5, 1.0, 2.0]

[grid]
origin = [0.0, -12.0]
cell_length = 2.0
cell_width = 2.0
cols = 20
rows = 20

[forest]
n_trees = 30
"#;

fn pogrid(root: &Path, jobs: usize, args: &[&str]) -> Result<(), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_pogrid"))
        .current_dir(root)
        .args(["--config", "run.toml", "--jobs", &jobs.to_string()])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if output.status.success() {
        Ok(())
    } else {
        Err(format!(
            "pogrid {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&output.stderr)
        ))
    }
}

fn pipeline(root: &Path, jobs: usize) -> Result<(), String> {
    std::fs::write(root.join("run.toml"), CONFIG).map_err(|e| e.to_string())?;
    let scene = "dataset/scenes/0005/scene.toml";
    pogrid(
        root,
        jobs,
        &[
            "generate-dataset",
            "--preset",
            "intersection",
            "--out",
            "dataset",
        ],
    )?;
    pogrid(
        root,
        jobs,
        &["simulate", "--scene", scene, "--out", "simulated"],
    )?;
    pogrid(
        root,
        jobs,
        &["train", "--dataset", "dataset", "--out", "model.pgrf"],
    )?;
    pogrid(
        root,
        jobs,
        &[
            "predict",
            "--model",
            "model.pgrf",
            "--scene",
            scene,
            "--out",
            "predicted",
        ],
    )?;
    pogrid(
        root,
        jobs,
        &[
            "evaluate",
            "--model",
            "model.pgrf",
            "--dataset",
            "dataset",
            "--out",
            "report.json",
        ],
    )?;
    pogrid(
        root,
        jobs,
        &[
            "criticality",
            "--scene",
            scene,
            "--model",
            "model.pgrf",
            "--out",
            "criticality.json",
        ],
    )
}

fn files(root: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), bytes);
            }
        }
    }
    Ok(out)
}

pub fn run() -> Result<String, String> {
    let (a, b) = (
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    );
    pipeline(a.path(), 1)?;
    pipeline(b.path(), 4)?;
    let (fa, fb) = (files(a.path())?, files(b.path())?);
    if fa.keys().ne(fb.keys()) {
        return Err("the two runs wrote different file sets".into());
    }
    let differing: Vec<_> = fa
        .iter()
        .filter(|(k, v)| fb[*k] != **v)
        .map(|(k, _)| k.display().to_string())
        .collect();
    if !differing.is_empty() {
        return Err(format!(
            "files differ between --jobs 1 and 4: {differing:?}"
        ));
    }
    let bytes: usize = fa.values().map(Vec::len).sum();
    Ok(format!(
        "{} artifacts ({:.1} MB) identical under --jobs 1 and 4",
        fa.len(),
        bytes as f64 / 1e6
    ))
}
