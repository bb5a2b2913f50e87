use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_abelian-walk"));
    cmd.env_remove("ABELIAN_WALK_SEED");
    cmd
}

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_config(sub: &str, config: &Path, extra: &[&str]) -> Output {
    let mut cmd = bin();
    cmd.arg(sub).arg("--config").arg(config).args(extra);
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn walk_csv_header_and_initial_row() {
    let out = run_config("walk", &example("z5.json"), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,q_0,q_1,q_2,q_3,q_4,entropy_nats,gini,tv_to_u")
    );
    assert_eq!(
        lines.next(),
        Some("0,1.0,0.0,0.0,0.0,0.0,0.0,0.666666666667,0.8")
    );
    assert_eq!(
        lines.next(),
        Some("1,0.5,0.5,0.0,0.0,0.0,0.69314718056,0.5,0.6")
    );
    assert_eq!(text.lines().count(), 1 + 9);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for sub in ["walk", "spectrum", "polytope", "verify", "run"] {
        for format in ["csv", "json"] {
            let a = run_config(sub, &example("hw3.json"), &["--format", format]);
            let b = run_config(sub, &example("hw3.json"), &["--format", format]);
            assert!(
                a.status.success(),
                "{sub} {format}: {}",
                String::from_utf8_lossy(&a.stderr)
            );
            assert_eq!(a.stdout, b.stdout, "{sub} {format}");
        }
    }
    let a = run_config("quantum", &example("povm_d3.json"), &["--format", "json"]);
    let b = run_config("quantum", &example("povm_d3.json"), &["--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn files_in_out_dir_match_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        "walk",
        &example("z5.json"),
        &["--out", dir.path().to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names, ["z5_trajectory.csv"]);
    let stdout = run_config("walk", &example("z5.json"), &[]).stdout;
    assert_eq!(
        std::fs::read(dir.path().join("z5_trajectory.csv")).unwrap(),
        stdout
    );
}

#[test]
fn failed_run_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run_config(
        "walk",
        &example("corrupted_matrix.json"),
        &["--out", out_dir.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!out_dir.exists() || std::fs::read_dir(&out_dir).unwrap().next().is_none());
}

#[test]
fn zero_steps_gives_only_the_initial_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "zero.json",
        r#"{"name":"zero","group":{"kind":"cyclic","d":4},"step_distribution":[0.5,0.5,0,0],"initial":{"delta":2},"steps":0}"#,
    );
    let out = run_config("walk", &cfg, &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "n,q_0,q_1,q_2,q_3,entropy_nats,gini,tv_to_u\n0,0.0,0.0,1.0,0.0,0.0,0.6,0.75\n"
    );
}

#[test]
fn exit_code_two_for_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.json", "{ not json"),
        (
            "type.json",
            r#"{"name":"x","group":{"kind":"cyclic","d":"five"},"step_distribution":[1],"steps":1}"#,
        ),
        (
            "unknown.json",
            r#"{"name":"x","group":{"kind":"cyclic","d":2},"step_distribution":[1,0],"steps":1,"colour":"red"}"#,
        ),
    ];
    for (name, body) in cases {
        let cfg = write_config(dir.path(), name, body);
        let out = run_config("walk", &cfg, &[]);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let missing = run_config("walk", &dir.path().join("absent.json"), &[]);
    assert_ne!(missing.status.code(), Some(0));
    assert_eq!(run(&["walk"]).status.code(), Some(2));
    assert_eq!(
        run(&["walk", "--config", "x", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn exit_code_three_for_invalid_mathematics() {
    let out = run_config("walk", &example("corrupted_matrix.json"), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("transition_matrix"));

    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "negative.json",
            r#"{"name":"x","group":{"kind":"cyclic","d":3},"step_distribution":[1.2,-0.2,0],"steps":1}"#,
        ),
        (
            "sum.json",
            r#"{"name":"x","group":{"kind":"cyclic","d":3},"step_distribution":[0.5,0.2,0],"steps":1}"#,
        ),
        (
            "length.json",
            r#"{"name":"x","group":{"kind":"cyclic","d":3},"step_distribution":[0.5,0.5],"steps":1}"#,
        ),
        (
            "order.json",
            r#"{"name":"x","group":{"kind":"cyclic","d":0},"step_distribution":[],"steps":1}"#,
        ),
    ];
    for (name, body) in cases {
        let cfg = write_config(dir.path(), name, body);
        let out = run_config("walk", &cfg, &[]);
        assert_eq!(
            out.status.code(),
            Some(3),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn exit_code_four_for_oversized_input() {
    let dir = tempfile::tempdir().unwrap();
    let big = write_config(
        dir.path(),
        "big.json",
        r#"{"name":"big","group":{"kind":"cyclic","d":100},"step_distribution":{"binomial":0.5},"steps":2}"#,
    );
    let polytope = run_config("polytope", &big, &[]);
    assert_eq!(
        polytope.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&polytope.stderr)
    );
    let huge = write_config(
        dir.path(),
        "huge.json",
        r#"{"name":"huge","group":{"kind":"cyclic","d":5},"step_distribution":[1,0,0,0,0],"steps":100000000}"#,
    );
    assert_eq!(run_config("walk", &huge, &[]).status.code(), Some(4));
}

#[test]
fn verify_passes_on_bundled_configs() {
    for name in [
        "z5.json",
        "hw3_binomial.json",
        "hw3.json",
        "povm_d3.json",
        "projective_d5.json",
    ] {
        let out = run_config("verify", &example(name), &[]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(
            out.status.success(),
            "{name}:\n{text}{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!text.contains("FAIL"), "{name}:\n{text}");
    }
}

#[test]
fn bundled_configs_run_every_subcommand() {
    for name in ["z5.json", "hw3_binomial.json"] {
        for sub in ["walk", "spectrum", "polytope", "run"] {
            for format in ["csv", "json"] {
                let out = run_config(sub, &example(name), &["--format", format]);
                assert!(
                    out.status.success(),
                    "{sub} {name}: {}",
                    String::from_utf8_lossy(&out.stderr)
                );
                if format == "json" {
                    serde_json::from_slice::<serde_json::Value>(&out.stdout).expect("valid json");
                }
            }
        }
    }
}

#[test]
fn polytope_json_lists_vertices() {
    let out = run_config("polytope", &example("z5.json"), &["--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let points = row["points"].as_array().unwrap();
        assert_eq!(points.len() as u64, row["vertices"].as_u64().unwrap());
        for p in points {
            let sum: f64 = p
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_f64().unwrap())
                .sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }
    assert_eq!(
        rows[0]["points"][1],
        serde_json::json!([0.0, 1.0, 0.0, 0.0, 0.0])
    );
}

#[test]
fn seed_variable_overrides_config() {
    let cfg = example("povm_d3.json");
    let args = |cmd: &mut Command| {
        cmd.arg("quantum")
            .arg("--config")
            .arg(&cfg)
            .args(["--format", "json"]);
    };
    let mut plain = bin();
    args(&mut plain);
    let plain = plain.output().unwrap();
    let mut same = bin();
    args(&mut same);
    let same = same.env("ABELIAN_WALK_SEED", "7").output().unwrap();
    let mut other = bin();
    args(&mut other);
    let other = other.env("ABELIAN_WALK_SEED", "8").output().unwrap();
    assert!(plain.status.success() && same.status.success() && other.status.success());
    assert_eq!(plain.stdout, same.stdout);
    assert_ne!(plain.stdout, other.stdout);

    let mut bad = bin();
    args(&mut bad);
    assert_eq!(
        bad.env("ABELIAN_WALK_SEED", "seven")
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn quantum_subcommand_needs_a_quantum_config() {
    let out = run_config("quantum", &example("z5.json"), &[]);
    assert_eq!(out.status.code(), Some(3));
}
