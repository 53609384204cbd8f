use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_voxemo");

/// Small three-class corpus: 12 half-second clips per class.
const SMALL_SPEC: &str = r#"
duration_secs = 0.5
clips_per_class = 12
sample_rate = 16000
seed = 77

[[profiles]]
label = "Sadness"
base_f0 = 160.0
f0_slope = -30.0
f0_jitter_pct = 4.0
energy_level = 0.2
envelope = { kind = "decaying", rate = 1.2 }

[[profiles]]
label = "Neutral"
base_f0 = 220.0
f0_slope = 0.0
f0_jitter_pct = 4.0
energy_level = 0.35
envelope = { kind = "flat" }

[[profiles]]
label = "Happiness"
base_f0 = 280.0
f0_slope = 60.0
f0_jitter_pct = 4.0
energy_level = 0.6
envelope = { kind = "modulated", rate_hz = 4.0, depth = 0.6 }
"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn small_corpus(dir: &Path, name: &str, seed: &str) -> PathBuf {
    fs::write(dir.join("small.toml"), SMALL_SPEC).unwrap();
    ok(
        dir,
        &[
            "--quiet",
            "--seed",
            seed,
            "synth",
            "--spec",
            "small.toml",
            "--out",
            name,
        ],
    );
    dir.join(name)
}

fn tree_bytes(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn end_to_end_predicts_a_fresh_sad_clip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    small_corpus(dir, "train", "77");
    ok(
        dir,
        &[
            "extract",
            "--manifest",
            "train/manifest.csv",
            "--model",
            "model2",
            "--out",
            "m2.txt",
        ],
    );
    let matrix = fs::read_to_string(dir.join("m2.txt")).unwrap();
    assert_eq!(matrix.lines().count(), 36);
    assert!(matrix.lines().all(|l| l.split(',').count() == 87));
    ok(dir, &["train", "--features", "m2.txt", "--out", "model.txt"]);

    // Different seed: unseen clips from the same profiles.
    small_corpus(dir, "probe", "1234");
    for i in 0..3 {
        let wav = format!("probe/clips/Sadness_{i:03}.wav");
        assert_eq!(
            ok(dir, &["predict", "--model", "model.txt", "--wav", &wav]),
            "Sadness\n"
        );
    }
    let verbose = ok(
        dir,
        &[
            "predict",
            "--model",
            "model.txt",
            "--wav",
            "probe/clips/Happiness_000.wav",
            "--verbose",
        ],
    );
    let lines: Vec<&str> = verbose.lines().collect();
    assert_eq!(lines[0], "Happiness");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("Happiness,Neutral,"));
}

#[test]
fn artifacts_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    small_corpus(dir, "a", "5");
    small_corpus(dir, "b", "5");
    let (ta, tb) = (tree_bytes(&dir.join("a")), tree_bytes(&dir.join("b")));
    assert_eq!(ta.len(), 37);
    assert_eq!(ta, tb);

    for out in ["x1.txt", "x2.txt"] {
        ok(
            dir,
            &[
                "--quiet",
                "extract",
                "--manifest",
                "a/manifest.csv",
                "--model",
                "model1",
                "--out",
                out,
            ],
        );
    }
    assert_eq!(
        fs::read(dir.join("x1.txt")).unwrap(),
        fs::read(dir.join("x2.txt")).unwrap()
    );

    for out in ["t1.txt", "t2.txt"] {
        ok(dir, &["--seed", "3", "train", "--features", "x1.txt", "--out", out]);
    }
    assert_eq!(
        fs::read(dir.join("t1.txt")).unwrap(),
        fs::read(dir.join("t2.txt")).unwrap()
    );

    let args = [
        "--quiet",
        "--seed",
        "9",
        "crossval",
        "--manifest",
        "a/manifest.csv",
        "--model",
        "model1",
        "--k",
        "3",
    ];
    let first = ok(dir, &args);
    assert_eq!(first, ok(dir, &args));
    assert!(first.starts_with("Training Model\tFeatures Combination"));
    assert!(first.contains("Model 1\tMFCC+LPCC\t"));
    assert!(first.contains("model1,3,mean,"));
}

#[test]
fn grid_search_trains_a_model() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    small_corpus(dir, "c", "8");
    ok(
        dir,
        &[
            "--quiet",
            "extract",
            "--manifest",
            "c/manifest.csv",
            "--model",
            "model1",
            "--out",
            "x.txt",
        ],
    );
    let out = run(
        dir,
        &["train", "--features", "x.txt", "--out", "g.txt", "--grid", "--k", "3"],
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid search: C = "));
    assert!(fs::read_to_string(dir.join("g.txt"))
        .unwrap()
        .starts_with("voxemo-svm 1\n"));
}

#[test]
fn confusion_report_from_label_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::write(dir.join("actual.txt"), "Sadness\nSadness\nNeutral\nNeutral\nsad\n").unwrap();
    fs::write(
        dir.join("assigned.txt"),
        "Sadness\nNeutral\nNeutral\nNeutral\nSadness\n",
    )
    .unwrap();
    let report = ok(
        dir,
        &["confusion", "--actual", "actual.txt", "--assigned", "assigned.txt"],
    );
    let expected = "Act / Listn\tNeu\tSad\nNeu\t100.0\t0.0\nSad\t33.3\t66.7\n\naccuracy\t80.0\n";
    assert!(report.starts_with(expected), "{report}");
    assert!(report.contains("min\tSadness\t66.7\n"));

    fs::write(dir.join("short.txt"), "Sadness\n").unwrap();
    assert_eq!(
        code(dir, &["confusion", "--actual", "actual.txt", "--assigned", "short.txt"]),
        2
    );
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(code(dir, &["--help"]), 0);
    assert_eq!(code(dir, &["--version"]), 0);
    assert_eq!(code(dir, &[]), 1);
    assert_eq!(code(dir, &["frobnicate"]), 1);
    assert_eq!(
        code(
            dir,
            &["extract", "--manifest", "m.csv", "--model", "model3", "--out", "x"]
        ),
        1
    );
    assert_eq!(
        code(
            dir,
            &["crossval", "--manifest", "m.csv", "--model", "model1", "--k", "1"]
        ),
        1
    );
    assert_eq!(code(dir, &["train", "--features", "missing.txt", "--out", "x"]), 2);
    assert_eq!(
        code(
            dir,
            &[
                "extract",
                "--manifest",
                "missing.csv",
                "--model",
                "model1",
                "--out",
                "x"
            ]
        ),
        2
    );
    fs::write(
        dir.join("bad.csv"),
        "path,emotion,speaker_id,sex,age_band,kind,text\na.wav,joy,s,F,18-25,word,\n",
    )
    .unwrap();
    let out = run(
        dir,
        &["extract", "--manifest", "bad.csv", "--model", "model1", "--out", "x"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown emotion `joy`"));
    assert!(out.stdout.is_empty());
    fs::write(dir.join("bad.toml"), "clips_per_class = 3\n").unwrap();
    assert_eq!(code(dir, &["synth", "--spec", "bad.toml", "--out", "o"]), 2);
}

#[test]
fn shipped_spec_synthesizes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let spec = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/four_class.toml");
    ok(dir, &["--quiet", "synth", "--spec", spec, "--out", "four"]);
    let manifest = fs::read_to_string(dir.join("four/manifest.csv")).unwrap();
    assert_eq!(manifest.lines().filter(|l| l.contains(",Anger,")).count(), 50);
    assert_eq!(fs::read_dir(dir.join("four/clips")).unwrap().count(), 200);
}
