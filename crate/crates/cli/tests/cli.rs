use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn ellbf(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ellbf"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &[u8]) -> Vec<u8> {
    let out = ellbf(args, stdin);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn code(args: &[&str], stdin: &[u8]) -> i32 {
    ellbf(args, stdin).status.code().unwrap()
}

fn precompute(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let mut args = vec!["precompute", "--p", "998244353", "--delta", "4", "--seed", "3", "--out", &path];
    args.extend(extra);
    ok(&args, b"");
    path
}

fn numbers(bytes: &[u8]) -> Vec<Vec<u64>> {
    String::from_utf8(bytes.to_vec())
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"], b""), 0);
    assert_eq!(code(&["--version"], b""), 0);
    assert_eq!(code(&["--no-such-flag"], b""), 1);
    assert_eq!(code(&["search"], b""), 1);
    assert_eq!(code(&["search", "--p", "100"], b""), 1);
    assert_eq!(code(&["search", "--p", "10007", "--delta", "3", "--curve", "1,2,3,4,5", "--t", "1,1"], b""), 2);
    assert_eq!(code(&["eval", "--tower", "/nonexistent.json"], b""), 2);
}

#[test]
fn search_is_deterministic_and_config_is_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "p = 10007\ndelta = 2\nseed = 4\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = ok(&["--config", cfg, "search", "--delta", "3"], b"");
    let b = ok(&["search", "--p", "10007", "--delta", "3", "--seed", "4"], b"");
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().contains("delta = 3"));
    fs::write(dir.path().join("bad.conf"), "modulus = 7\n").unwrap();
    assert_eq!(
        code(&["--config", dir.path().join("bad.conf").to_str().unwrap(), "search"], b""),
        1
    );
}

#[test]
fn eval_interp_text_and_binary() {
    let dir = tempfile::tempdir().unwrap();
    let tw = precompute(dir.path(), "b.json", &[]);
    let x = b"1 2 3 4 5 6 7 8 9 10 11 12 13 14 15 16\n0 0 0 0 0 0 0 0 0 0 0 0 0 0 0 998244352\n";
    let y = ok(&["eval", "--tower", &tw], x);
    assert_eq!(numbers(&y).len(), 2);
    assert_eq!(ok(&["interp", "--tower", &tw], &y), x.to_vec());
    let framed = ok(&["eval", "--tower", &tw, "--binary"], x);
    assert!(framed.starts_with(b"EBF1"));
    // two frames of 16 four-byte residues
    assert_eq!(framed.len(), 2 * (16 + 16 * 4));
    assert_eq!(ok(&["interp", "--tower", &tw], &framed), x.to_vec());
    assert_eq!(code(&["eval", "--tower", &tw], b"1 2 3"), 2);
    assert_eq!(code(&["eval", "--tower", &tw], b"1 2 x"), 1);
}

#[test]
fn corrupted_tower_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let tw = precompute(dir.path(), "b.json", &[]);
    let text = fs::read_to_string(&tw).unwrap();
    let bad = dir.path().join("bad.json");
    let tampered = text.replacen("\"p\":998244353", "\"p\":998244354", 1);
    assert_ne!(tampered, text);
    fs::write(&bad, tampered).unwrap();
    let bad = bad.to_str().unwrap();
    assert_eq!(code(&["eval", "--tower", bad], b"1"), 2);
    fs::write(dir.path().join("junk.json"), "{").unwrap();
    assert_eq!(code(&["eval", "--tower", dir.path().join("junk.json").to_str().unwrap()], b"1"), 2);
    assert_eq!(code(&["selftest", "--max-delta", "4", "--oracle-delta", "3", "--tower", bad], b""), 3);
}

#[test]
fn ring_product_matches_pointwise_values() {
    let dir = tempfile::tempdir().unwrap();
    let b = precompute(dir.path(), "b.json", &[]);
    let r = precompute(dir.path(), "r.json", &["--use-r"]);
    let f = "3 1 4 1 5 9 2 6 5 3 5 8 9 7 9 3";
    let g = "2 7 1 8 2 8 1 8 2 8 4 5 9 0 4 5";
    let fg = ok(&["mul", "--tower-b", &b, "--tower-r", &r], format!("{f}\n{g}\n").as_bytes());
    let p = 998244353u128;
    let vals = |s: &[u8]| numbers(&ok(&["eval", "--tower", &b], s)).remove(0);
    let (vf, vg, vfg) = (vals(f.as_bytes()), vals(g.as_bytes()), vals(&fg));
    for k in 0..16 {
        assert_eq!((vf[k] as u128 * vg[k] as u128 % p) as u64, vfg[k]);
    }
    assert_eq!(code(&["mul", "--tower-b", &b, "--tower-r", &r], f.as_bytes()), 1);
}

#[test]
fn precompute_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let args = ["precompute", "--p", "10007", "--delta", "3", "--cache-dir", c];
    ok(&args, b"");
    let entries: Vec<_> = fs::read_dir(&cache).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let err = ellbf(&args, b"");
    assert!(String::from_utf8_lossy(&err.stderr).contains("cached"));
}

#[test]
fn goppa_encode_and_check() {
    let src = ["--p", "10007", "--delta", "3", "--seed", "1"];
    let enc: Vec<&str> = ["goppa", "encode"].iter().chain(&src).copied().collect();
    let chk: Vec<&str> = ["goppa", "check"].iter().chain(&src).copied().collect();
    let w = ok(&enc, b"1 2 3 4\n0 0 0 5\n");
    let words = numbers(&w);
    assert_eq!(words.len(), 2);
    assert_eq!(words[0].len(), 8);
    assert_eq!(String::from_utf8(ok(&chk, &w)).unwrap(), "ok 1 2 3 4\nok 0 0 0 5\n");
    let mut bad = words[0].clone();
    bad[3] = (bad[3] + 1) % 10007;
    let line = bad.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    assert_eq!(String::from_utf8(ok(&chk, line.as_bytes())).unwrap(), "reject\n");
}

#[test]
fn lwe_roundtrip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let (pk, sk) = (f("pk.json"), f("sk.json"));
    ok(&["lwe", "keygen", "--preset", "toy", "--pk", &pk, "--sk", &sk, "--seed", "1"], b"");
    for (bit, seed) in [("0", "2"), ("1", "3"), ("1", "4"), ("0", "5")] {
        let ct = f(&format!("ct{seed}.json"));
        ok(&["lwe", "enc", "--pk", &pk, "--message", bit, "--out", &ct, "--seed", seed], b"");
        let out = ok(&["lwe", "dec", "--sk", &sk, "--ct", &ct], b"");
        assert_eq!(String::from_utf8(out).unwrap().trim(), bit);
    }
    assert_eq!(code(&["lwe", "enc", "--pk", &pk, "--message", "01"], b""), 1);
    assert_eq!(code(&["lwe", "keygen", "--preset", "huge", "--pk", &pk, "--sk", &sk], b""), 1);
}

#[derive(serde::Deserialize)]
struct Row {
    d: usize,
    algorithm: String,
    wall_time: f64,
    op_count: u64,
}

#[test]
fn bench_csv_parses_and_scales() {
    let out = ok(&["bench", "--min-delta", "6", "--max-delta", "9", "--reps", "1"], b"");
    let rows: Vec<Row> = csv::Reader::from_reader(out.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows.len(), 4 * 6);
    let count = |d: usize, a: &str| rows.iter().find(|r| r.d == d && r.algorithm == a).unwrap().op_count;
    for d in [64, 128, 256] {
        let ratio = count(2 * d, "ell_eval") as f64 / count(d, "ell_eval") as f64;
        assert!(ratio < 2.5, "ell_eval count ratio {ratio} at d = {d}");
    }
    for d in [64, 128, 256, 512] {
        assert!(count(d, "ntt_eval") < count(d, "ell_eval"));
        assert!(count(d, "ntt_interp") < count(d, "ell_interp"));
    }
    assert!(rows.iter().all(|r| r.wall_time >= 0.0));
}

#[test]
fn selftest_passes() {
    let out = ok(&["selftest", "--max-delta", "8"], b"");
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");
    assert_eq!(text.lines().count(), 6);
}
