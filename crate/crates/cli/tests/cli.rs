use std::path::PathBuf;
use std::process::{Command, Output};

use fractal_spectra::analysis::{GramReport, SigmaProfile};
use fractal_spectra::boundary::ParsevalReport;
use fractal_spectra::complement::DualSets;
use fractal_spectra::hadamard::HadamardVerdict;
use fractal_spectra_cli::{
    BoundaryReport, ClassifyReport, ComplementingReport, CyclesReport, FactorizeReport,
    KernelReport, MuhatReport, PairList, SpectralReport, SpectrumReport, SweepReport,
};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn fspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares stdout with a stored file; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, args: &[&str], code: i32) {
    let o = fspec(args);
    assert_eq!(o.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &o.stdout).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(stdout(&o), expected, "{name}");
}

#[test]
fn golden_spectral_pair() {
    check_golden("spectral_jp.json", &["spectral", "--R", "4", "--B", "0,2", "--L", "0,1"], 0);
}

#[test]
fn golden_lebesgue_with_cycle() {
    check_golden("spectral_cycle.json", &["spectral", "--R", "2", "--B", "0,1", "--L", "0,1"], 1);
}

#[test]
fn golden_dual() {
    check_golden("dual_4.json", &["dual", "--A", "0,2", "--Ap", "0,1", "--R", "4"], 0);
}

#[test]
fn golden_hadamard() {
    check_golden("hadamard.json", &["hadamard", "--R", "4", "--B", "0,2", "--L", "0,3"], 0);
    check_golden("hadamard_fail.json", &["hadamard", "--R", "3", "--B", "0,2", "--L", "0,1"], 1);
}

#[test]
fn golden_spectrum() {
    check_golden("spectrum.csv", &["spectrum", "--R", "4", "--L", "0,1", "--degree", "2", "--out", "csv"], 0);
}

#[test]
fn golden_cycles() {
    check_golden("cycles.json", &["cycles", "--R", "4", "--B", "0,2", "--L", "0,3"], 0);
}

#[test]
fn golden_complementing() {
    check_golden("pairs_6.csv", &["complementing", "--R", "6", "--out", "csv"], 0);
}

#[test]
fn golden_sigma() {
    check_golden(
        "sigma.csv",
        &["sigma", "--R", "4", "--B", "0,2", "--L", "0,1", "--degree", "3", "--grid", "-0.5:0.5:0.25", "--out", "csv"],
        0,
    );
}

#[test]
fn golden_factorize() {
    check_golden(
        "factorize.csv",
        &["factorize", "--R", "4", "--A", "0,2", "--Ap", "0,1", "--samples", "4", "--seed", "7", "--out", "csv"],
        0,
    );
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["complementing", "--R", "4", "--A", "0,2", "--Ap", "0,1"], 0),
        (&["complementing", "--R", "4", "--A", "0,1", "--Ap", "0,1"], 1),
        (&["spectral", "--R", "3", "--B", "0,2", "--L", "0,1"], 1),
        (&["spectral", "--R", "1", "--B", "0,2", "--L", "0,1"], 2),
        (&["dual", "--A", "0,1", "--Ap", "0,1", "--R", "4"], 2),
        (&["kernel", "--R", "4", "--L", "0,1", "--z", "0.99+0.5i"], 2),
        (&["kernel", "--R", "4", "--L", "0,1", "--z", "oops"], 2),
        (&["muhat", "--R", "4", "--B", "0,2", "--t", "1", "--tol", "-1"], 2),
        (&["muhat", "--R", "4", "--B", "0,2", "--t", "2", "--tol", "1e-16"], 1),
        (&["muhat", "--R", "4", "--B", "0,2"], 2),
        (&["sigma", "--R", "4", "--B", "0,2", "--L", "0,1", "--grid", "0:1"], 2),
        (&["boundary", "--R", "4", "--B", "0,2", "--L", "0,1", "--degree", "1", "--f", "3:1", "--z", "0.1"], 2),
        (&["classify", "--R", "4", "--B", "0,2", "--L", "0,2", "--degree", "2", "--t", "0.1"], 1),
        (&["spectral", "--R", "4", "--B", "0,2", "--L", "0,1", "--out", "x.txt"], 2),
        (&["nonsense"], 2),
    ];
    for (args, code) in cases {
        let o = fspec(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        if *code == 2 {
            assert!(!o.stderr.is_empty(), "{args:?}");
        }
    }
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(args: &[&str]) -> T {
    let o = fspec(args);
    assert!(o.status.code().unwrap() <= 1, "{args:?}");
    let text = stdout(&o);
    let parsed: T = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    let again: serde_json::Value = serde_json::to_value(&parsed).unwrap();
    let original: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(again, original, "{args:?}");
    parsed
}

#[test]
fn json_reports_round_trip() {
    let jp = ["--R", "4", "--B", "0,2", "--L", "0,1", "--degree", "2"];
    let with = |head: &[&'static str], tail: &[&'static str]| -> Vec<&'static str> {
        head.iter().chain(jp.iter()).chain(tail.iter()).copied().collect()
    };
    let m: MuhatReport = round_trip(&["muhat", "--R", "4", "--B", "0,2", "--grid", "0:3:0.5"]);
    assert_eq!(m.values.len(), 7);
    let h: HadamardVerdict = round_trip(&["hadamard", "--R", "4", "--B", "0,2", "--L", "0,1"]);
    assert!(h.hadamard && h.exact);
    let c: ComplementingReport = round_trip(&["complementing", "--R", "4", "--A", "0,2", "--Ap", "0,1"]);
    assert!(c.complementing);
    let p: PairList = round_trip(&["complementing", "--R", "4"]);
    assert!(p.pairs.contains(&(vec![0, 2], vec![0, 1])));
    let d: DualSets = round_trip(&["dual", "--A", "0,2", "--Ap", "0,1", "--R", "4"]);
    assert_eq!((d.l, d.l_prime), (vec![0, 1], vec![0, 2]));
    let cy: CyclesReport = round_trip(&["cycles", "--R", "2", "--B", "0,1", "--L", "0,1"]);
    assert_eq!(cy.cycles.len(), 2);
    let s: SpectralReport = round_trip(&["spectral", "--R", "4", "--B", "0,2", "--L", "0,1"]);
    assert!(s.verdict.spectral);
    let sp: SpectrumReport = round_trip(&["spectrum", "--R", "4", "--L", "0,1", "--degree", "2"]);
    assert_eq!(sp.gamma, vec![0, 1, 4, 5, 16, 17, 20, 21]);
    let sg: SigmaProfile = round_trip(&with(&["sigma"], &["--t", "0.1,0.4"]));
    assert_eq!(sg.values.len(), 2);
    let g: GramReport = round_trip(&with(&["gram"], &[]));
    assert_eq!(g.gamma.len(), 8);
    let cl: ClassifyReport = round_trip(&with(&["classify"], &["--t", "0.1"]));
    assert!(cl.system.orthogonal && cl.membership.orthogonal);
    let k: KernelReport = round_trip(&["kernel", "--R", "4", "--L", "0,1", "--z", "0.3-0.4i", "--x", "0.25"]);
    assert!(k.agree);
    let f: FactorizeReport = round_trip(&["factorize", "--R", "6", "--A", "0,3", "--Ap", "0,1,2", "--samples", "3"]);
    assert!(f.certified);
    let b: BoundaryReport = round_trip(&with(&["boundary"], &["--f", "0:1,5:0.5i", "--z", "0.2+0.1i", "--level", "8"]));
    assert!(b.consistent);
    let pr: ParsevalReport = round_trip(&with(&["parseval"], &["--f", "0:1,5:0.5i", "--level", "8"]));
    assert!(pr.gap < 1e-12);
    let sw: SweepReport = round_trip(&["sweep", "--from", "2", "--to", "6", "--samples", "2"]);
    assert!(sw.all_passed && !sw.rows.is_empty());
}

#[test]
fn fixed_seed_is_byte_identical() {
    let args = ["factorize", "--R", "8", "--A", "0,4", "--Ap", "0,1,2,3", "--samples", "20", "--seed", "3"];
    let a = fspec(&args);
    let b = fspec(&args);
    assert_eq!(a.stdout, b.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_fspec"))
        .args(args)
        .env("FS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
    let other = fspec(&["factorize", "--R", "8", "--A", "0,4", "--Ap", "0,1,2,3", "--samples", "20", "--seed", "4"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_fspec"))
        .args(["spectrum", "--R", "4", "--L", "0,1"])
        .env("FS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ifs_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let ifs = dir.path().join("jp.json");
    std::fs::write(&ifs, r#"{"R": 4, "B": [0, 2]}"#).unwrap();
    let out = dir.path().join("sigma.csv");
    let o = fspec(&[
        "sigma", "--ifs", ifs.to_str().unwrap(), "--L", "0,1", "--t", "0,0.5",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,sigma_lower,err");
    assert!(lines[1].starts_with("0.0,1.0,"));
    assert_eq!(lines.len(), 3);

    let conflict = fspec(&["sigma", "--ifs", ifs.to_str().unwrap(), "--R", "4", "--L", "0,1", "--t", "0"]);
    assert_eq!(conflict.status.code(), Some(2));
    let missing = fspec(&["sigma", "--ifs", "/nonexistent.json", "--L", "0,1", "--t", "0"]);
    assert_eq!(missing.status.code(), Some(2));
}
