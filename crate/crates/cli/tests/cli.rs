use std::process::{Command, Output};

fn mmlag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmlag")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_terms_reproduces_the_table() {
    let o = mmlag(&["count-terms", "--max-h", "10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().last(), Some("10,3010"));
    let counts: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, ["1", "3", "11", "30", "77", "176", "385", "792", "1575", "3010"]);
}

#[test]
fn count_grid() {
    let o = mmlag(&["count-terms", "--grid", "--max-k", "8", "--max-h", "6"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1 + 9 * 7);
    assert!(out.contains("\n2,1,4\n"));
}

#[test]
fn free_energy_catalog_has_fourteen_entries() {
    let o = mmlag(&["diagrams", "--k", "0", "--h", "2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 14);
}

#[test]
fn dot_files_are_written() {
    let dir = std::env::temp_dir().join(format!("mmlag-dot-{}", std::process::id()));
    let o = mmlag(&["diagrams", "--k", "1", "--h", "1", "--dot", dir.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("3 diagrams\n"));
    let n = std::fs::read_dir(&dir).unwrap().count();
    assert_eq!(n, 4);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn cross_check_is_equal() {
    let o = mmlag(&["cross-check", "--h", "2", "--s", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("EQUAL"));
}

#[test]
fn outputs_are_byte_stable() {
    for args in [&["correlator", "--k", "1", "--h", "2", "--s", "1"][..], &["lambda", "--h", "4", "--json"]] {
        assert_eq!(mmlag(args).stdout, mmlag(args).stdout);
    }
}

#[test]
fn lambda_verify_reports_the_sign_mismatch() {
    assert_eq!(mmlag(&["lambda-verify", "--max-h", "3"]).status.code(), Some(0));
    let o = mmlag(&["lambda-verify", "--max-h", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("h=4 differs in all 30 coefficients by an overall sign"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["frobnicate"][..],
        &["lambda", "--h", "2", "--unknown"],
        &["diagrams", "--k", "2", "--h", "0"],
        &["curve", "--config", "/nonexistent.json", "--moments", "2"],
    ] {
        assert_eq!(mmlag(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_gaussian() {
    let cfg = std::env::temp_dir().join(format!("mmlag-gauss-{}.json", std::process::id()));
    std::fs::write(&cfg, r#"{"t": [0, 0.5]}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let value = |args: &[&str]| -> f64 {
        let o = mmlag(args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o).lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!((value(&["curve", "--config", cfg, "--eval", "--free-energy", "2"]) + 1.0 / 240.0).abs() < 1e-9);
    let w = value(&["curve", "--config", cfg, "--eval", "--k", "1", "--h", "2", "--at", "3"]);
    assert!((w - 210.0 / 5f64.powf(5.5)).abs() < 1e-9);
    let o = mmlag(&["curve", "--config", cfg, "--moments", "2"]);
    assert!(stdout(&o).starts_with("generator,value_re,value_im\ny1_1,"));
    assert_eq!(mmlag(&["curve", "--config", cfg, "--eval", "--k", "1", "--h", "2"]).status.code(), Some(2));
    std::fs::remove_file(cfg).unwrap();
}
