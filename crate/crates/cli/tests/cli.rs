use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn nikhp(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nikhp"))
        .args(args)
        .env("NIKHP_CACHE_DIR", cache)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn reference() -> String {
    configs().join("reference.toml").to_string_lossy().into_owned()
}

#[test]
fn malformed_system_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(
        dir.path(),
        "bad.toml",
        "schema = \"nikhp-system/1\"\nkind = \"nikishin\"\n\n[[measure]]\ninterval = [\"-1\", \"1\"]\ndensity = \"chebyshev\"\nwidth = 3\n",
    );
    let exp = write(
        dir.path(),
        "exp.toml",
        &format!("schema = \"nikhp-experiment/1\"\nsystem = \"{sys}\"\nbudget = 2\n"),
    );
    let out = nikhp(dir.path(), &["certify", "--config", &exp, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("width"), "{err}");
}

#[test]
fn unknown_experiment_keys_and_mismatched_commands_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let r = reference();
    let typo = write(
        dir.path(),
        "typo.toml",
        &format!("schema = \"nikhp-experiment/1\"\nsystem = \"{r}\"\nbudgte = 2\n"),
    );
    let out = nikhp(dir.path(), &["certify", "--config", &typo]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budgte"));

    let zeros = configs().join("zeros.toml");
    let out = nikhp(dir.path(), &["certify", "--config", zeros.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zeros"));

    let out = nikhp(dir.path(), &["certify", "--config", &typo, "--precision", "16"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unmet_criteria_exit_one_with_reports() {
    let dir = tempfile::tempdir().unwrap();
    let r = reference();
    let exp = write(
        dir.path(),
        "tight.toml",
        &format!("schema = \"nikhp-experiment/1\"\nsystem = \"{r}\"\nindex = [2, 1]\npoints = [\"5+2i\"]\ntolerance = \"1e-300\"\n"),
    );
    let out_dir = dir.path().join("out");
    let out = nikhp(dir.path(), &["connection", "--config", &exp, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
    assert!(out_dir.join("connection.csv").exists());
}

#[test]
fn loss_of_normality_is_a_solver_failure() {
    let dir = tempfile::tempdir().unwrap();
    let r = reference();
    let exp = write(
        dir.path(),
        "low.toml",
        &format!(
            "schema = \"nikhp-experiment/1\"\nsystem = \"{r}\"\nprecision = 64\ngrid = 300\npoints = [\"3\"]\n\n[schedule]\nkind = \"diagonal\"\nfrom = 10\nto = 24\n"
        ),
    );
    let out = nikhp(dir.path(), &["weak", "--config", &exp, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("normality"));
}

#[test]
fn repeated_runs_hit_the_cache_and_match_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let zeros = configs().join("zeros.toml");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let first = nikhp(&cache, &["zeros", "--config", zeros.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(String::from_utf8_lossy(&first.stderr).contains("0 hits"));
    let second = nikhp(
        &cache,
        &["zeros", "--config", zeros.to_str().unwrap(), "--out", b.to_str().unwrap(), "--workers", "1"],
    );
    assert_eq!(second.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&second.stderr).contains(" 0 misses"));
    for f in ["summary.json", "zeros.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn seeds_change_probes_only_through_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cert = configs().join("certify.toml");
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let o = nikhp(
            &dir.path().join("cache"),
            &["certify", "--config", cert.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed],
        );
        assert_eq!(o.status.code(), Some(0));
        fs::read_to_string(out.join("probe.csv")).unwrap()
    };
    assert_eq!(run("a", "7"), run("b", "7"));
    assert_ne!(run("a", "7"), run("c", "8"));
}
