//! Acceptance run: one line per criterion, nonzero exit when any fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command as Process, ExitCode};
use std::time::Instant;

use nikhp_cli::config::Command;
use nikhp_cli::report::Summary;
use nikhp_cli::{run, Overrides};
use serde_json::Value;

type Verdict = Result<(bool, String), String>;

struct Env {
    tmp: tempfile::TempDir,
    cache: PathBuf,
    runs: usize,
}

impl Env {
    fn new() -> Env {
        let tmp = tempfile::tempdir().expect("temporary directory");
        let cache = tmp.path().join("cache");
        Env { tmp, cache, runs: 0 }
    }

    fn configs(&self) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
    }

    fn system(&self, name: &str) -> String {
        let p = self.configs().join(name);
        p.canonicalize().unwrap_or(p).to_string_lossy().replace('\\', "/")
    }

    /// Experiment file in the scratch directory.
    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.tmp.path().join(name);
        fs::write(&p, text).expect("writing experiment file");
        p
    }

    fn run(&mut self, command: Command, config: &Path) -> Result<(Summary, PathBuf), String> {
        self.runs += 1;
        let out = self.tmp.path().join(format!("out-{}", self.runs));
        let ov = Overrides {
            out: Some(out),
            cache_dir: Some(self.cache.clone()),
            ..Overrides::default()
        };
        run(command, config, &ov)
            .map(|o| (o.summary, o.out_dir))
            .map_err(|f| f.to_string())
    }
}

fn check<'a>(s: &'a Summary, name: &str) -> Result<&'a nikhp_core::asymptotics::Check, String> {
    s.checks
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| format!("no check named `{name}`"))
}

fn failing(s: &Summary) -> Vec<String> {
    s.checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect()
}

fn num(v: &Value, path: &[&str]) -> Result<f64, String> {
    let mut cur = v;
    for p in path {
        cur = &cur[*p];
    }
    cur.as_f64().ok_or_else(|| format!("missing number at {}", path.join(".")))
}

fn csv_rows(path: &Path) -> Result<Vec<BTreeMap<String, String>>, String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    r.deserialize().map(|row| row.map_err(|e| e.to_string())).collect()
}

fn field(row: &BTreeMap<String, String>, key: &str) -> Result<f64, String> {
    row.get(key)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("bad `{key}` cell"))
}

fn certify(env: &mut Env, budget: usize) -> Result<(Summary, f64), String> {
    let sys = env.system("reference.toml");
    let cfg = env.write(
        &format!("certify-{budget}.toml"),
        &format!("schema = \"nikhp-experiment/1\"\nsystem = \"{sys}\"\nprecision = 256\nbudget = {budget}\ntolerance = \"1e-30\"\n"),
    );
    let t = Instant::now();
    let (s, _) = env.run(Command::Certify, &cfg)?;
    Ok((s, t.elapsed().as_secs_f64()))
}

fn c1(env: &mut Env) -> Verdict {
    let (s, secs) = certify(env, 8)?;
    let n = check(&s, "normality")?;
    let indices = num(&s.results, &["indices"])?;
    let normal = num(&s.results, &["normal_indices"])?;
    let margin = num(&s.results, &["min_margin"])?;
    let floor = 2f64.powi(-128);
    let pass = n.pass && indices == 44.0 && normal == 44.0 && margin > floor && secs < 300.0;
    Ok((pass, format!("{normal}/{indices} indices normal, smallest margin {margin:.3e} > 2^-128, {secs:.1} s")))
}

fn c2(env: &mut Env) -> Verdict {
    let (s, _) = certify(env, 10)?;
    let r = num(&s.results, &["max_residual"])?;
    let pass = check(&s, "orthogonality residuals")?.pass && r < 1e-30;
    Ok((pass, format!("largest residual {r:.3e} over |n| <= 10")))
}

fn all_checks(env: &mut Env, command: Command, file: &str) -> Verdict {
    let cfg = env.configs().join(file);
    let (s, _) = env.run(command, &cfg)?;
    let bad = failing(&s);
    let detail = s.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ");
    Ok((s.pass && bad.is_empty(), detail))
}

fn c5(env: &mut Env) -> Verdict {
    let cfg = env.configs().join("connection.toml");
    let (s, _) = env.run(Command::Connection, &cfg)?;
    let rows = num(&s.results, &["rows"])?;
    let worst = num(&s.results, &["largest"])?;
    Ok((s.pass && rows == 5.0 && worst < 1e-30, format!("n = (3,2), {rows} points, largest residual {worst:.3e}")))
}

fn c6(env: &mut Env) -> Verdict {
    let t = Instant::now();
    let (s, _) = env.run(Command::Equilibrium, &env.configs().join("arcsine.toml"))?;
    let sys = env.system("wide.toml");
    let cfg = env.write(
        "wide.toml",
        &format!("schema = \"nikhp-experiment/1\"\nsystem = \"{sys}\"\ngrid = 2000\n"),
    );
    let (w, _) = env.run(Command::Equilibrium, &cfg)?;
    let secs = t.elapsed().as_secs_f64();
    let d = num(&s.results, &["oracle", "kolmogorov"])?;
    let om = s.results["omegas"][0].as_f64().ok_or("missing omega")?;
    let om_wide = w.results["omegas"][0].as_f64().ok_or("missing omega")?;
    let shift = om_wide - om;
    let ln2 = 2f64.ln();
    let pass = s.pass && d < 1e-3 && (om - ln2).abs() < 1e-3 && (shift + ln2).abs() < 1e-3 && secs < 120.0;
    Ok((
        pass,
        format!("Kolmogorov {d:.3e}, omega {om:.6} (log 2 = {ln2:.6}), shift on [-2,2] {shift:.6}, {secs:.1} s"),
    ))
}

fn c7(env: &mut Env) -> Verdict {
    let (s, _) = env.run(Command::Equilibrium, &env.configs().join("equilibrium.toml"))?;
    let kkt = num(&s.results, &["kkt"])?;
    let masses: Vec<f64> = s.results["masses"]
        .as_array()
        .ok_or("missing masses")?
        .iter()
        .filter_map(Value::as_f64)
        .collect();
    let worst = masses.iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
    let pass = s.pass && kkt < 1e-6 && masses.len() == 2 && worst < 1e-12;
    Ok((pass, format!("KKT residual {kkt:.3e}, largest mass deviation {worst:.1e}")))
}

fn c8(env: &mut Env) -> Verdict {
    let sys = env.system("chebyshev.toml");
    let cfg = env.write(
        "weak-m1.toml",
        &format!(
            "schema = \"nikhp-experiment/1\"\nsystem = \"{sys}\"\ngrid = 1000\npoints = [\"3\"]\ntolerance = \"0.15\"\n\n[schedule]\nkind = \"diagonal\"\nfrom = 5\nto = 20\n"
        ),
    );
    let (_, dir) = env.run(Command::Weak, &cfg)?;
    let rows = csv_rows(&dir.join("weak.csv"))?;
    let at = |q: &str| {
        rows.iter()
            .find(|r| r["total"] == "20" && r["quantity"] == q)
            .ok_or_else(|| format!("no {q} row at n = 20"))
    };
    let root = field(at("q")?, "measured")?.exp();
    let exact = (3.0 + 8f64.sqrt()) / 2.0;
    let rel = (root / exact - 1.0).abs();
    let ks = field(at("kolmogorov")?, "measured")?;
    Ok((
        rel < 0.05 && ks < 0.06,
        format!("|Q_20(3)|^(1/20) = {root:.6} against {exact:.6} (error {rel:.2e}), Kolmogorov {ks:.4}"),
    ))
}

fn c9(env: &mut Env) -> Verdict {
    let (s, _) = env.run(Command::Weak, &env.configs().join("weak.toml"))?;
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["kolmogorov trend j=1", "kolmogorov trend j=2", "psi nth root j=1", "psi nth root j=2"] {
        let c = check(&s, name)?;
        pass &= c.pass;
        parts.push(format!("{name}: {}", c.detail));
    }
    Ok((pass, parts.join("; ")))
}

fn c10(env: &mut Env) -> Verdict {
    let (_, dir) = env.run(Command::Rate, &env.configs().join("rate.toml"))?;
    let rows = csv_rows(&dir.join("rate.csv"))?;
    let target = -2.0 * (3.0 + 8f64.sqrt()).ln();
    let last = rows.iter().find(|r| r["total"] == "30").ok_or("no row at n = 30")?;
    let r30 = field(last, "measured")?;
    let rel = (r30 / target - 1.0).abs();
    let mut negative = true;
    for r in &rows {
        if field(r, "total")? >= 3.0 {
            negative &= field(r, "measured")? < 0.0;
        }
    }
    Ok((
        rel < 0.1 && negative,
        format!("r(30, 3) = {r30:.6} against {target:.6} (error {rel:.2e}), negative for n >= 3: {negative}"),
    ))
}

fn c11(env: &mut Env) -> Verdict {
    let exact = (2.0 + 3f64.sqrt()) / 2.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for sys in ["chebyshev.toml", "legendre.toml"] {
        let path = env.system(sys);
        let cfg = env.write(
            &format!("ratio-{sys}"),
            &format!(
                "schema = \"nikhp-experiment/1\"\nsystem = \"{path}\"\npoints = [\"2\"]\n\n[schedule]\nkind = \"diagonal\"\nfrom = 26\nto = 30\n"
            ),
        );
        let (_, dir) = env.run(Command::Ratio, &cfg)?;
        let rows = csv_rows(&dir.join("ratio.csv"))?;
        let row = rows
            .iter()
            .find(|r| r["family"] == "type-ii" && r["total"] == "30")
            .ok_or("no ratio at n = 30")?;
        let v = field(row, "re")?;
        let err = (v - exact).abs();
        pass &= err < 1e-2;
        parts.push(format!("{}: {v:.8} (error {err:.1e})", sys.trim_end_matches(".toml")));
    }
    Ok((pass, format!("{} against {exact:.8}", parts.join(", "))))
}

fn c12(env: &mut Env) -> Verdict {
    let (s, dir) = env.run(Command::Ratio, &env.configs().join("ratio.toml"))?;
    let rows = csv_rows(&dir.join("boundary.csv"))?;
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 1..=2 {
        let n = rows.iter().filter(|r| r["k"] == k.to_string()).count();
        let c = check(&s, &format!("boundary product constant on Delta_{k}"))?;
        pass &= c.pass && n >= 5;
        parts.push(format!("Delta_{k}: {n} points, {}", c.detail));
    }
    let stab = check(&s, "Q ratio deltas decrease over the last three steps")?;
    pass &= stab.pass;
    parts.push(format!("stabilization: {}", stab.detail));
    Ok((pass, parts.join("; ")))
}

fn c13(env: &mut Env) -> Verdict {
    let cache = env.tmp.path().join("cache-13");
    let mut dirs = Vec::new();
    for (i, extra) in [&[][..], &["--workers", "1"][..]].iter().enumerate() {
        for file in ["certify.toml", "zeros.toml", "connection.toml"] {
            let cmd = file.trim_end_matches(".toml");
            let out = env.tmp.path().join(format!("det-{i}")).join(cmd);
            let status = Process::new(env!("CARGO_BIN_EXE_nikhp"))
                .arg(cmd)
                .arg("--config")
                .arg(env.configs().join(file))
                .arg("--out")
                .arg(&out)
                .args(*extra)
                .env("NIKHP_CACHE_DIR", &cache)
                .output()
                .map_err(|e| e.to_string())?;
            if status.status.code() != Some(0) {
                return Ok((false, format!("{cmd} exited with {:?}", status.status.code())));
            }
        }
        dirs.push(env.tmp.path().join(format!("det-{i}")));
    }
    let mut files = 0;
    for cmd in ["certify", "zeros", "connection"] {
        let a = dirs[0].join(cmd);
        let mut names: Vec<_> = fs::read_dir(&a).map_err(|e| e.to_string())?.flatten().map(|e| e.file_name()).collect();
        names.sort();
        for name in names {
            let x = fs::read(a.join(&name)).map_err(|e| e.to_string())?;
            let y = fs::read(dirs[1].join(cmd).join(&name)).map_err(|e| e.to_string())?;
            if x != y {
                return Ok((false, format!("{cmd}/{} differs", name.to_string_lossy())));
            }
            files += 1;
        }
    }
    Ok((true, format!("{files} report files identical across a cold and a warm-cache single-worker run")))
}

fn main() -> ExitCode {
    let mut env = Env::new();
    let criteria: [(&str, fn(&mut Env) -> Verdict); 13] = [
        ("perfectness certificate", c1),
        ("orthogonality residuals", c2),
        ("zero counts", |e| all_checks(e, Command::Zeros, "zeros.toml")),
        ("interlacing", |e| all_checks(e, Command::Interlace, "interlace.toml")),
        ("connection identities", c5),
        ("equilibrium oracle", c6),
        ("vector equilibrium", c7),
        ("weak asymptotics, one measure", c8),
        ("weak asymptotics, two measures", c9),
        ("convergence rate", c10),
        ("ratio asymptotics, one measure", c11),
        ("ratio boundary condition", c12),
        ("determinism", c13),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (pass, detail) = match f(&mut env) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} [{:.1} s]: {detail}", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
