use std::path::PathBuf;

use symplie::cli::run;

fn sym(args: &[&str]) -> symplie::cli::Outcome {
    run(std::iter::once("symplie").chain(args.iter().copied()))
}

fn temp_catalog(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("symplie-cli-{}-{name}.mcalg", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn validate_bundled_reports_the_one_jacobi_failure() {
    let o = sym(&["validate"]);
    assert_eq!(o.code, 1, "{}", o.stderr);
    assert!(o.stdout.contains("FAIL N6_10: d^2 e1 = (e2^w1^w2)"), "{}", o.stdout);
    assert!(o.stdout.contains("PASS g5_36"));
    assert!(o.stdout.starts_with("erratum "));
    assert!(o.stdout.trim_end().ends_with("80 algebras, 79 pass, 1 fail"), "{}", o.stdout);
}

#[test]
fn validate_custom_files() {
    let good = temp_catalog("good", "algebra h3 dim 3\n  d w3 = w1^w2\nend\n");
    let o = sym(&["validate", good.to_str().unwrap()]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "PASS h3\n1 algebras, 1 pass, 0 fail\n"));

    // d d w1 = w2^w4^w3
    let broken = temp_catalog("broken", "algebra bad4 dim 4\n  d w1 = w2^w3\n  d w2 = w2^w4\nend\n");
    let o = sym(&["validate", broken.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.starts_with("FAIL bad4: d^2 w1 = "), "{}", o.stdout);

    let garbled = temp_catalog("garbled", "algebra x dim 3\n  d w4 = w1^w2\nend\n");
    let o = sym(&["validate", garbled.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    let location = format!("{}:2", garbled.display());
    assert!(o.stderr.contains(&location), "{}", o.stderr);
    for p in [good, broken, garbled] {
        let _ = std::fs::remove_file(p);
    }
}

#[test]
fn analyze_text_json_and_params() {
    let o = sym(&["analyze", "N6_1"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("7 branch(es), 3 symplectic"), "{}", o.stdout);
    assert!(o.stdout.contains("[gamma = 0, delta + 1 = 0] symplectic"));

    let o = sym(&["analyze", "g5_37+L1", "--json"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let reports = v.as_array().expect("one report per branch");
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["name"], "g5_37+L1");
    assert_eq!(reports[0]["symplectic"], true);

    let o = sym(&["analyze", "N6_1", "--mode", "instantiated", "--params", "alpha=2", "beta=3/2", "gamma=-1", "delta=0"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("1 branch(es), 1 symplectic"), "{}", o.stdout);

    let o = sym(&["analyze", "A3_3+A3_3"]);
    assert!(o.stdout.contains("0 symplectic"), "{}", o.stdout);
}

#[test]
fn analyze_errors_exit_2() {
    for args in [
        vec!["analyze", "N6_99"],
        vec!["analyze", "A3_4(0)"],
        vec!["analyze", "N6_1", "--mode", "instantiated"],
        vec!["analyze", "N6_1", "--params", "alpha"],
        vec!["analyze", "N6_1", "--mode", "sideways"],
    ] {
        let o = sym(&args);
        assert_eq!(o.code, 2, "{args:?}: {}", o.stdout);
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn tables_diff_and_json() {
    let o = sym(&["tables", "T1", "--diff"]);
    assert_eq!(o.code, 1, "{}", o.stderr);
    assert!(o.stdout.contains("MATCH       A3,4^-1 + A3,4^-1"), "{}", o.stdout);
    assert!(o.stdout.contains("summary: 3 MATCH, 2 MISMATCH"), "{}", o.stdout);

    let o = sym(&["tables", "t1", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["families"].as_array().unwrap().len(), 14);

    let o = sym(&["tables", "T4"]);
    assert_eq!(o.code, 2);
    let o = sym(&["tables", "T2", "--diff", "/nonexistent/table.json"]);
    assert_eq!(o.code, 2);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(sym(&["--help"]).code, 0);
    assert_eq!(sym(&["--version"]).code, 0);
    assert_eq!(sym(&[]).code, 2);
}
