use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twin-sieve"))
}

#[test]
fn wheel_prints_the_seven_table() {
    let out = bin()
        .args(["wheel", "--max-level", "7", "--print-table"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("  11   13   17   19   29   31"), "{s}");
    assert!(s.contains(" 191  193  197  199  209  211"), "{s}");
    assert!(s.contains("(12 deleted)"));
}

#[test]
fn wheel_csv() {
    let out = bin()
        .args([
            "wheel",
            "--max-level",
            "5",
            "--print-table",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("row,column,value,mark"), "{s}");
}

#[test]
fn count_at_8009() {
    let out = bin().args(["count", "--p", "8009"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "594636");
    let out = bin()
        .args(["count", "--p", "101", "--counting", "pairs"])
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "202");
}

#[test]
fn errors_exit_nonzero_with_one_line() {
    for args in [
        &["count", "--p", "100"][..],
        &["wheel", "--max-level", "29"],
        &["estimate", "--p", "101", "--method", "eq99"],
    ] {
        let out = bin().args(args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(!err.trim().is_empty());
    }
    for args in [
        &["count", "--p", "100"][..],
        &["count", "--q", "5"],
        &["wheel", "--max-level", "29"],
    ] {
        let out = bin().args(args).output().unwrap();
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.trim().lines().count(), 1, "{args:?}: {err}");
    }
}

#[test]
fn table_and_figure_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["table", "--primes", "101,199"])
        .env("TWIN_SIEVE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("table4.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("p,actual,eq7,r,eq15"));
    assert!(csv.contains("101,404,395,"));

    let out = bin()
        .args(["figure", "--primes", "101,8009", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let dat = std::fs::read_to_string(dir.path().join("eq7.dat")).unwrap();
    assert!(dat.starts_with("101 -2.34"), "{dat}");
    assert!(dat.contains("8009 5.11"), "{dat}");
}

#[test]
fn estimate_methods() {
    for m in ["eq7", "eq15", "eq16"] {
        let out = bin()
            .args(["estimate", "--p", "1009", "--method", m])
            .output()
            .unwrap();
        assert!(out.status.success(), "{m}");
        assert!(String::from_utf8(out.stdout).unwrap().contains("rounded ="));
    }
}
