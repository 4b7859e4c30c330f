use std::process::{Command, Output};

fn sbo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbo")).args(args).output().expect("sbo runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const FORM: &str = r#"{"ambient_dim":3,"degree":1,"terms":[{"index":[1],"coeff":[{"exponents":[1,0,2],"lambda_coeffs":[["1","0"]]}]}]}"#;

#[test]
fn coeffs_at_a_rational_point() {
    let o = sbo(&["coeffs", "--n", "3", "--order", "2", "--lambda", "1/2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coefficients"]["a"][2], "1");
    assert_eq!(v["coefficients"]["a"][1], "2");
}

#[test]
fn family_prints_in_the_operator_language() {
    let o = sbo(&["family", "--n", "3", "--type", "1", "--p", "0", "--order", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("iota"), "{}", stdout(&o));
}

#[test]
fn family_json_round_trips() {
    let o = sbo(&["family", "--n", "4", "--type", "2", "--p", "2", "--order", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let e = sbo_core::OpExpr::from_json(&v).unwrap();
    let again = sbo_core::family(&sbo_core::FamilySpec::new(2, 4, 2, 2, sbo_core::Presentation::Normal)).unwrap();
    assert!(sbo_core::ops_equal(&e, &again).unwrap());
}

#[test]
fn apply_family_and_text_operator() {
    let o = sbo(&["apply", "--n", "3", "--type", "1", "--p", "1", "--order", "2", "--lambda", "3", "--form", FORM]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "[(24)*x1] dx1");
    let o = sbo(&["apply", "--n", "3", "--op", "dbar", "--form", FORM]);
    assert_eq!(stdout(&o).trim(), "[(-2)*x1*x3] dx1^dx3");
}

#[test]
fn singular_vector_is_annihilated() {
    let o = sbo(&["singular", "--n", "4", "--type", "3", "--p", "0", "--order", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["annihilated"], true);
}

#[test]
fn check_exits_with_failure_count() {
    let o = sbo(&["check", "--suite", "curved", "--n-max", "3", "--order-max", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS curved"));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(sbo(&["check", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(sbo(&["apply", "--n", "3", "--op", "d d", "--form", FORM]).status.code(), Some(2));
    assert_eq!(sbo(&["coeffs", "--n", "3", "--order", "2", "--lambda", "1/0"]).status.code(), Some(2));
}
