use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdet"))
        .args(args)
        .env_remove("RDET_N_MAX")
        .env_remove("RDET_M_CAP")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn rqa_into(dir: &Path, threads: &str) -> Vec<Vec<u8>> {
    let path = |name: &str| dir.join(name).to_str().unwrap().to_string();
    let out = rdet(&[
        "rqa", "--threads", threads, "--map", "logistic:3.9", "--x0", "0.3", "--transient", "100", "--eps", "0.02",
        "--n", "1024", "--m", "12", "--csv", &path("p.csv"), "--json", &path("p.json"), "--plot", &path("p.pbm"),
        "--pgm", &path("p.pgm"), "--runs", &path("runs.json"), "--trajectory", &path("x.csv"),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    ["p.csv", "p.json", "p.pbm", "p.pgm", "runs.json", "x.csv"]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let one = rqa_into(a.path(), "1");
    let four = rqa_into(b.path(), "4");
    for (k, (x, y)) in one.iter().zip(&four).enumerate() {
        if k == 1 {
            // the embedded config records paths and thread count
            let strip = |bytes: &[u8]| {
                let mut v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
                v.as_object_mut().unwrap().remove("config");
                v
            };
            assert_eq!(strip(x), strip(y));
        } else {
            assert!(x == y, "output {k} differs between thread counts");
        }
    }
    assert!(one[2].starts_with(b"P4\n1024 1024\n"));
    assert_eq!(one[2].len(), "P4\n1024 1024\n".len() + 1024 * 128);
    assert!(one[3].starts_with(b"P5\n1024 1024\n255\n"));
    let csv = String::from_utf8(one[0].clone()).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "m,n,C,rdet,rqa_det");
}

#[test]
fn saved_config_replays_identically() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("direct.csv");
    let args = [
        "rqa", "--map", "tent:2.0", "--x0", "0.2", "--eps", "1/20", "--n", "512", "--m", "8", "--csv",
        csv.to_str().unwrap(),
    ];
    assert_eq!(code(&rdet(&args)), 0);
    let direct = fs::read(&csv).unwrap();

    let mut printed = args.to_vec();
    printed.push("--print-config");
    let out = rdet(&printed);
    assert_eq!(code(&out), 0);
    assert!(!direct.is_empty());
    fs::remove_file(&csv).unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, &out.stdout).unwrap();
    assert_eq!(code(&rdet(&["run", "--config", cfg.to_str().unwrap()])), 0);
    assert_eq!(fs::read(&csv).unwrap(), direct);
}

#[test]
fn construct_writes_valid_system() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("sys.json");
    let out = rdet(&["construct", "--kind", "ternary", "--depth", "3", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&out_path).unwrap()).unwrap();
    assert_eq!(v["levels"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&rdet(&["rqa", "--map", "logistic:3.2"])), 2, "missing radius");
    assert_eq!(code(&rdet(&["rqa", "--map", "logistic:7", "--eps", "0.1"])), 2, "bad parameter");
    assert_eq!(code(&rdet(&["frobnicate"])), 2);
    assert_eq!(code(&rdet(&["construct", "--kind", "theorem3", "--stages", "99"])), 3);
    let over = Command::new(env!("CARGO_BIN_EXE_rdet"))
        .args(["rqa", "--map", "logistic:3.2", "--eps", "0.1", "--n", "4096"])
        .env("RDET_N_MAX", "1000")
        .output()
        .unwrap();
    assert_eq!(code(&over), 3);
    assert_eq!(code(&rdet(&["reproduce", "four-fifths", "--t", "2..4"])), 0);
    assert_eq!(code(&rdet(&["reproduce", "theorem-example", "--stages", "2"])), 0);
}

#[test]
fn help_exits_cleanly() {
    let out = rdet(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep"));
}
