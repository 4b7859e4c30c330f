//! Named identity suites and the report format they share.
//!
//! Every case is an exact comparison.  A failing case carries a concrete
//! counterexample: for operator identities a monomial basis form together
//! with the nonzero residual, for scalar identities both sides.

mod algebra;
mod factor;
mod ops;
mod vectors;

use std::time::Instant;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{Mono, MultiIndex, PolyForm};
use crate::operators::{op_equal, Atom, OpExpr, Sig};
use crate::scalars::{GaussianRational, Rational, Scalar};

/// Grid limits shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Largest ambient dimension.
    pub n_max: usize,
    /// Largest operator order or homogeneity.
    pub order_max: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config { n_max: 5, order_max: 4 }
    }
}

/// One checked identity instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub name: String,
    /// Parameters such as `n`, `p`, `N`, `k` and the `lambda` mode.
    pub params: Value,
    pub pass: bool,
    /// First counterexample, present exactly when the case fails.
    pub counterexample: Option<Value>,
    pub micros: u128,
}

impl CaseResult {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "params": self.params,
            "pass": self.pass,
            "counterexample": self.counterexample.clone().unwrap_or(Value::Null),
            "micros": self.micros,
        })
    }
}

/// All cases of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
    pub millis: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "passed": self.passed(),
            "cases_total": self.cases.len(),
            "cases_failed": self.failures().count(),
            "millis": self.millis,
            "cases": self.cases.iter().map(CaseResult::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Suite names accepted by [`run_suite`], in the order [`run_all`] runs them.
pub const SUITES: [&str; 11] = [
    "coeffs",
    "low-order",
    "presentation",
    "equivariance",
    "singular",
    "hodge",
    "main-fact",
    "supp-fact",
    "gauge-q",
    "kkp",
    "curved",
];

/// Runs one named suite.
pub fn run_suite(name: &str, cfg: &Config) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rec = Recorder::default();
    match name {
        "coeffs" => algebra::coeffs(&mut rec),
        "kkp" => algebra::kkp(&mut rec),
        "low-order" => ops::low_order(&mut rec, cfg),
        "presentation" => ops::presentation(&mut rec, cfg),
        "equivariance" => ops::equivariance(&mut rec, cfg),
        "hodge" => ops::hodge(&mut rec, cfg),
        "curved" => ops::curved(&mut rec, cfg),
        "singular" => vectors::singular(&mut rec, cfg),
        "main-fact" => factor::main_fact(&mut rec, cfg),
        "supp-fact" => factor::supp_fact(&mut rec, cfg),
        "gauge-q" => factor::gauge_q(&mut rec, cfg),
        other => return Err(Error::Range(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")))),
    }
    Ok(SuiteReport { suite: name.to_string(), cases: rec.cases, millis: start.elapsed().as_millis() })
}

/// Runs every suite in [`SUITES`].
pub fn run_all(cfg: &Config) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, cfg)).collect()
}

/// Result of a single comparison.
pub(crate) enum Outcome {
    Pass,
    Fail(Value),
}

impl Outcome {
    pub(crate) fn from_bool(ok: bool, detail: Value) -> Outcome {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail(detail)
        }
    }
}

/// Collects cases; an error inside a case becomes a failure of that case.
#[derive(Default)]
pub(crate) struct Recorder {
    cases: Vec<CaseResult>,
}

impl Recorder {
    pub(crate) fn check(&mut self, name: &str, params: Value, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let (pass, counterexample) = match f() {
            Ok(Outcome::Pass) => (true, None),
            Ok(Outcome::Fail(v)) => (false, Some(v)),
            Err(e) => (false, Some(json!({ "error": e.to_string() }))),
        };
        self.cases.push(CaseResult {
            name: name.to_string(),
            params,
            pass,
            counterexample,
            micros: start.elapsed().as_micros(),
        });
    }
}

fn witness_json(basis_form: &PolyForm, residual: &PolyForm) -> Value {
    json!({ "basis_form": basis_form.to_json(), "residual": residual.to_json() })
}

/// Exact operator equality.
pub(crate) fn same(a: &OpExpr, b: &OpExpr) -> Result<Outcome> {
    Ok(match op_equal(a, b)? {
        None => Outcome::Pass,
        Some(w) => Outcome::Fail(witness_json(&w.basis_form, &w.residual)),
    })
}

pub(crate) fn vanishes(a: &OpExpr) -> Result<Outcome> {
    same(a, &OpExpr::zero(a.source(), a.target()))
}

/// Equality after restriction to closed forms.
///
/// Closed polynomial forms are spanned by the constant forms and the exact
/// forms `dbar(x^gamma dx_I)`.  The operators compared here have constant
/// coefficients, so the difference is tested on constant forms directly and
/// on exact forms through the composite `(a - b) dbar`.
pub(crate) fn same_on_closed(a: &OpExpr, b: &OpExpr) -> Result<Outcome> {
    let diff = a.minus(b)?;
    let src = diff.source();
    let (n, p) = (src.ambient_dim, src.degree);
    for idx in MultiIndex::all(n, p as usize) {
        let w = PolyForm::basis(n, idx, Mono::one());
        let r = diff.apply(&w)?;
        if !r.is_zero() {
            return Ok(Outcome::Fail(witness_json(&w, &r)));
        }
    }
    if p >= 1 {
        let dbar = OpExpr::atom(Atom::D, Sig::ambient(n, p - 1))?;
        let composite = diff.after(&dbar)?;
        if let Some(w) = op_equal(&composite, &OpExpr::zero(composite.source(), composite.target()))? {
            let closed = w.basis_form.d();
            return Ok(Outcome::Fail(json!({
                "primitive": w.basis_form.to_json(),
                "basis_form": closed.to_json(),
                "residual": w.residual.to_json(),
            })));
        }
    }
    Ok(Outcome::Pass)
}

pub(crate) fn same_scalar(a: &Scalar, b: &Scalar) -> Outcome {
    Outcome::from_bool(a == b, json!({ "lhs": a.to_string(), "rhs": b.to_string() }))
}

pub(crate) fn q(num: i64, den: i64) -> Rational {
    Rational::frac(num, den)
}

pub(crate) fn int(k: i64) -> Rational {
    Rational::from_int(k)
}

/// `e` with `lambda` set to `x`.
pub(crate) fn at(e: &OpExpr, x: &Rational) -> OpExpr {
    e.specialize(&GaussianRational::real(x.clone()))
}

/// `c * e` for a rational constant.
pub(crate) fn times(c: &Rational, e: OpExpr) -> OpExpr {
    OpExpr::scale(Scalar::from_rational(c.clone()), e)
}

pub(crate) fn sign(k: i64) -> Rational {
    int(if k.rem_euclid(2) == 0 { 1 } else { -1 })
}

pub(crate) fn star(sig: Sig) -> Result<OpExpr> {
    OpExpr::atom(Atom::Star, sig)
}

/// `outer ∘ e ∘ inner`, listed left to right.
pub(crate) fn sandwich(outer: OpExpr, e: OpExpr, inner: OpExpr) -> Result<OpExpr> {
    OpExpr::compose(vec![outer, e, inner])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &Config::default()).is_err());
    }

    #[test]
    fn failing_case_carries_witness() {
        let s = Sig::ambient(3, 1);
        let a = OpExpr::scale(Scalar::lambda_plus(1), OpExpr::atom(Atom::Pullback, s).unwrap());
        let b = OpExpr::scale(Scalar::lambda_plus(2), OpExpr::atom(Atom::Pullback, s).unwrap());
        let mut rec = Recorder::default();
        rec.check("shifted", json!({}), || same(&a, &b));
        rec.check("equal", json!({}), || same(&a, &a));
        assert!(!rec.cases[0].pass);
        assert!(rec.cases[0].counterexample.as_ref().unwrap()["residual"].is_object());
        assert!(rec.cases[1].pass && rec.cases[1].counterexample.is_none());
    }

    #[test]
    fn closed_form_restriction() {
        let s = Sig::ambient(3, 1);
        let a = OpExpr::chain(s, &[Atom::Pullback, Atom::Delta, Atom::D]).unwrap();
        let zero = OpExpr::zero(s, Sig::slice(3, 1));
        assert!(matches!(same_on_closed(&a, &zero).unwrap(), Outcome::Pass));
        assert!(matches!(vanishes(&a).unwrap(), Outcome::Fail(_)));
    }
}
