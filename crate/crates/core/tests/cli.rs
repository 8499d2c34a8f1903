//! End-to-end runs of the `fklens` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fklens::cli::image_io::{parse_cart_csv, parse_pgm, parse_polar_csv};
use fklens::cli::{EXIT_CACHE, EXIT_DIMENSION, EXIT_FORMAT, EXIT_IO, EXIT_USAGE, EXIT_VERIFY_FAILED};
use fklens::kernel_cache::{CacheKey, HEADER_LEN};
use fklens::{GridSpec, KernelParams};

fn letter_r() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/letter_r.pgm")
}

fn fklens(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fklens")).args(args).env("FKLENS_CACHE_DIR", cache).output().expect("run fklens")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn max_dev(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn rotate_by_zero_reproduces_csv_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    std::fs::write(&input, "1.5+0.25i,-2+0i,0+1i\n0.125-3i,7+0i,0+0i\n-1-0i,2+2i,3-0.5i\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = fklens(dir.path(), &["transform", "rotate", "--theta", "0", "--in", s(&input), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = parse_cart_csv(&std::fs::read_to_string(&input).unwrap()).unwrap();
    let b = parse_cart_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(a.pixels, b.pixels);
}

#[test]
fn letter_r_map_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (polar, cart, mag) = (dir.path().join("p.csv"), dir.path().join("c.csv"), dir.path().join("p.pgm"));
    let o = fklens(
        dir.path(),
        &[
            "transform",
            "map",
            "--to",
            "polar",
            "--in",
            s(&letter_r()),
            "--out",
            s(&polar),
            "--mag",
            s(&mag),
            "--j",
            "8",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = fklens(dir.path(), &["transform", "map", "--to", "cart", "--in", s(&polar), "--out", s(&cart)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let original = parse_pgm(&std::fs::read(letter_r()).unwrap()).unwrap();
    let back = parse_cart_csv(&std::fs::read_to_string(&cart).unwrap()).unwrap();
    assert!(max_dev(original.pixels.as_slice(), back.pixels.as_slice()) < 1e-9);
    let p = parse_polar_csv(&std::fs::read_to_string(&polar).unwrap()).unwrap();
    assert_eq!(p.spec.side(), 17);
    assert!(std::fs::read(&mag).unwrap().starts_with(b"P5\n"));
}

#[test]
fn half_turn_is_point_reflection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = fklens(dir.path(), &["transform", "rotate", "--theta", "180deg", "--in", s(&letter_r()), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let original = parse_pgm(&std::fs::read(letter_r()).unwrap()).unwrap();
    let rotated = parse_cart_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let spec = &original.spec;
    let mut worst: f64 = 0.0;
    for q in fklens::grids::enumerate_cartesian(spec) {
        let a = original.pixels[spec.cart_index(q.qx, q.qy).unwrap()];
        let b = rotated.pixels[spec.cart_index(-q.qx, -q.qy).unwrap()];
        worst = worst.max((a - b).norm());
    }
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn polar_rotation_and_other_ops_run() {
    let dir = tempfile::tempdir().unwrap();
    let polar = dir.path().join("p.csv");
    assert!(fklens(dir.path(), &["transform", "map", "--to", "polar", "--in", s(&letter_r()), "--out", s(&polar)])
        .status
        .success());
    for op in [
        vec!["rotate", "--theta", "0.3rad"],
        vec!["gyrate", "--psi", "-0.4"],
        vec!["frft", "--omega", "1.1"],
        vec!["aniso", "--phi", "30deg"],
        vec!["u2", "--omega", "0.1", "--phi", "0.2", "--theta", "0.3", "--psi", "0.4"],
    ] {
        for input in [letter_r(), polar.clone()] {
            let out = dir.path().join("o.csv");
            let mut args = vec!["transform"];
            args.extend(&op);
            args.extend(["--in", s(&input), "--out", s(&out)]);
            let o = fklens(dir.path(), &args);
            assert!(o.status.success(), "{op:?}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
}

#[test]
fn outputs_are_deterministic_and_cache_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = fklens(dir.path(), &["transform", "gyrate", "--psi", "0.7", "--in", s(&letter_r()), "--out", s(out)]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let key = CacheKey::new(&GridSpec::from_side(17).unwrap(), KernelParams::Gyration { psi: 0.7 }).unwrap();
    let file = dir.path().join(key.file_name());
    assert_eq!(std::fs::metadata(&file).unwrap().len() as usize, HEADER_LEN + 16 * 289 * 289 + 4);

    // A corrupted cache entry is reported, not used.
    let mut bytes = std::fs::read(&file).unwrap();
    bytes[HEADER_LEN + 100] ^= 1;
    std::fs::write(&file, bytes).unwrap();
    let o = fklens(dir.path(), &["transform", "gyrate", "--psi", "0.7", "--in", s(&letter_r()), "--out", s(&a)]);
    assert_eq!(o.status.code(), Some(EXIT_CACHE));
}

#[test]
fn verify_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = fklens(dir.path(), &["verify", "--j", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("group kernels: pass"));
    assert!(fklens(dir.path(), &["verify", "--j", "1/2"]).status.success());
    assert_eq!(fklens(dir.path(), &["verify", "--j", "2", "--perturb"]).status.code(), Some(EXIT_VERIFY_FAILED));
    assert_eq!(fklens(dir.path(), &["verify", "--j", "17/2"]).status.code(), Some(EXIT_USAGE));
}

#[test]
fn bench_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = fklens(dir.path(), &["bench", "--n", "3,5", "--reps", "2"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let width = lines[0].split(',').count();
    for l in &lines[1..] {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f.len(), width);
        assert!(f[2].parse::<f64>().is_ok() && f[3].parse::<f64>().is_ok());
    }
    assert!(lines[2].starts_with("5,") && lines[2].ends_with(",625,10052"));
}

#[test]
fn basis_command_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = fklens(dir.path(), &["basis", "--kind", "polar", "--j", "1", "--out", s(&out)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 81);
    assert!(text.starts_with("row,col,re,im\n"));
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.csv");
    let bad = dir.path().join("image.txt");
    std::fs::write(&bad, "hello").unwrap();
    let missing = dir.path().join("missing.pgm");
    let r = letter_r();
    let cases: [(Vec<&str>, i32); 5] = [
        (vec!["transform", "rotate", "--theta", "1", "--in", s(&r), "--out", s(&out), "--j", "3"], EXIT_DIMENSION),
        (vec!["transform", "rotate", "--theta", "1", "--in", s(&bad), "--out", s(&out)], EXIT_FORMAT),
        (vec!["transform", "rotate", "--theta", "1", "--in", s(&missing), "--out", s(&out)], EXIT_IO),
        (vec!["transform", "rotate", "--theta", "1grad", "--in", s(&r), "--out", s(&out)], EXIT_USAGE),
        (vec!["transform", "map", "--to", "cart", "--in", s(&r), "--out", s(&out)], EXIT_USAGE),
    ];
    for (args, code) in cases {
        assert_eq!(fklens(dir.path(), &args).status.code(), Some(code), "{args:?}");
    }
    let help = fklens(dir.path(), &["--help"]);
    assert!(help.status.success());
    assert!(String::from_utf8(help.stdout).unwrap().contains("Exit codes"));
}
