//! One line per acceptance criterion. Criteria listed by
//! `verify::expected_failure` are reported as FAIL without failing the run;
//! every other failure, or an expected failure that starts passing, does.

use mmlag_core::verify::{expected_failure, run_all};

fn main() {
    println!("acceptance criteria");
    let reports = run_all(|r| println!("{}", r.line()));
    let mut unexpected = Vec::new();
    for r in &reports {
        match (r.passed, expected_failure(r.id)) {
            (false, Some(why)) => println!("note: criterion {} is a known failure: {why}", r.id),
            (true, Some(_)) => unexpected.push(format!("criterion {} passed but is listed as a known failure", r.id)),
            (false, None) => unexpected.push(format!("criterion {} failed", r.id)),
            (true, None) => {}
        }
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria pass", reports.len());
    if !unexpected.is_empty() {
        for u in &unexpected {
            eprintln!("{u}");
        }
        std::process::exit(1);
    }
}
