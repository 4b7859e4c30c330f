use sbo_core::{run_all, run_suite, Config, Error, SUITES};

#[test]
fn every_suite_passes_on_a_small_grid() {
    let cfg = Config { n_max: 3, order_max: 2 };
    for report in run_all(&cfg).unwrap() {
        let failures: Vec<_> = report.failures().map(|c| format!("{} {}", c.name, c.params)).collect();
        assert!(failures.is_empty(), "{}: {failures:?}", report.suite);
        assert!(!report.cases.is_empty(), "{} ran no cases", report.suite);
    }
}

#[test]
fn suites_are_named_and_reported_in_order() {
    let reports = run_all(&Config { n_max: 2, order_max: 1 }).unwrap();
    let names: Vec<_> = reports.iter().map(|r| r.suite.as_str()).collect();
    assert_eq!(names, SUITES);
}

#[test]
fn unknown_suite_is_an_error() {
    assert!(matches!(run_suite("nonsense", &Config::default()), Err(Error::Range(_))));
}

#[test]
fn report_json_carries_every_case() {
    let report = run_suite("hodge", &Config { n_max: 3, order_max: 2 }).unwrap();
    let v = report.to_json();
    assert_eq!(v["suite"], "hodge");
    assert_eq!(v["cases"].as_array().unwrap().len(), report.cases.len());
}
