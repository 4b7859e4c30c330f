//! One line per acceptance criterion, each backed by the matching identity suite.

use std::process::Command;
use std::time::{Duration, Instant};

use sbo_core::{run_suite, Config};

struct Criterion {
    label: &'static str,
    suites: &'static [&'static str],
    cfg: Config,
    budget: Option<Duration>,
    required_cases: &'static [&'static str],
}

const fn cfg(n_max: usize, order_max: u32) -> Config {
    Config { n_max, order_max }
}

const CRITERIA: [Criterion; 10] = [
    Criterion { label: "coefficient identities, n 2..6, N <= 6", suites: &["coeffs"], cfg: cfg(6, 6), budget: Some(Duration::from_secs(5)), required_cases: &["recurrence-even", "gamma-split", "gegenbauer-as-jacobi", "even-gegenbauer-expansion"] },
    Criterion { label: "low-order displays", suites: &["low-order"], cfg: cfg(5, 4), budget: Some(Duration::from_secs(5)), required_cases: &["third-type-display", "fourth-type-display"] },
    Criterion { label: "normal and geometric presentations agree, n <= 5, order <= 5", suites: &["presentation"], cfg: cfg(5, 5), budget: Some(Duration::from_secs(60)), required_cases: &["normal-equals-geometric"] },
    Criterion {
        label: "equivariance with negative controls, n <= 5, order <= 3",
        suites: &["equivariance"],
        cfg: cfg(5, 3),
        budget: Some(Duration::from_secs(120)),
        required_cases: &["family-intertwines", "middle-degree-intertwines", "perturbed-family-is-rejected", "wrong-shift-is-rejected"],
    },
    Criterion { label: "singular vectors", suites: &["singular"], cfg: cfg(5, 4), budget: Some(Duration::from_secs(120)), required_cases: &["annihilated", "profile-ode-system", "ansatz-unique-generic", "ansatz-third-type", "ansatz-fourth-type", "translates-to-family", "perturbed-vector-is-rejected"] },
    Criterion { label: "Hodge conjugation, n <= 5, order <= 5", suites: &["hodge"], cfg: cfg(5, 5), budget: None, required_cases: &["star-d", "second-type-is-conjugated-first-type", "fourth-type-is-conjugated-third-type"] },
    Criterion { label: "factorizations, n <= 5, order <= 5", suites: &["main-fact", "supp-fact"], cfg: cfg(5, 5), budget: None, required_cases: &["renormalized-boundary-factor", "first-type-through-d", "second-type-after-deltabar", "first-type-through-d-vanishing"] },
    Criterion { label: "gauge companions and Q-polynomials, n <= 7", suites: &["gauge-q"], cfg: cfg(7, 6), budget: None, required_cases: &["gauge-companion-on-closed-forms", "q-polynomial-on-closed-forms", "holographic-q-curvature", "critical-branson-gover-double-factorization"] },
    Criterion { label: "planar comparison, m <= 5", suites: &["kkp"], cfg: cfg(5, 5), budget: None, required_cases: &["planar-comparison"] },
    Criterion { label: "curved flat limit", suites: &["curved"], cfg: cfg(5, 4), budget: None, required_cases: &["curved-first-type-flat-limit", "curved-second-type-flat-limit"] },
];

fn judge(c: &Criterion) -> (bool, String) {
    let start = Instant::now();
    let mut total = 0;
    let mut failed = Vec::new();
    let mut names = Vec::new();
    for suite in c.suites {
        match run_suite(suite, &c.cfg) {
            Ok(r) => {
                total += r.cases.len();
                failed.extend(r.failures().take(3).map(|f| format!("{} {}", f.name, f.params)));
                names.extend(r.cases.into_iter().map(|k| k.name));
            }
            Err(e) => failed.push(format!("{suite}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    let missing: Vec<_> = c.required_cases.iter().filter(|r| !names.iter().any(|n| n == *r)).collect();
    let in_time = c.budget.is_none_or(|b| elapsed <= b);
    let ok = failed.is_empty() && missing.is_empty() && in_time && total > 0;
    let mut detail = format!("{total} cases, {:.2} s", elapsed.as_secs_f64());
    if !failed.is_empty() {
        detail += &format!("; failing: {failed:?}");
    }
    if !missing.is_empty() {
        detail += &format!("; missing cases: {missing:?}");
    }
    if !in_time {
        detail += &format!("; over budget {:?}", c.budget.unwrap());
    }
    (ok, detail)
}

fn cli_check() -> (bool, String) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_sbo"))
        .args(["check", "--suite", "all", "--n-max", "5", "--order-max", "4"])
        .output()
        .expect("sbo runs");
    let elapsed = start.elapsed();
    let ok = out.status.success() && elapsed <= Duration::from_secs(600);
    let mut detail = format!("exit {:?}, {:.2} s", out.status.code(), elapsed.as_secs_f64());
    if !ok {
        detail += &format!("\n{}", String::from_utf8_lossy(&out.stdout));
    }
    (ok, detail)
}

#[test]
fn acceptance() {
    let mut all = true;
    for (k, c) in CRITERIA.iter().enumerate() {
        let (ok, detail) = judge(c);
        all &= ok;
        println!("criterion {:>2} {} {}: {detail}", k + 1, if ok { "PASS" } else { "FAIL" }, c.label);
    }
    let (ok, detail) = cli_check();
    all &= ok;
    println!("criterion 11 {} sbo check --suite all --n-max 5 --order-max 4: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(all, "some acceptance criteria failed");
}
