//! Singular vectors: annihilation, middle-degree projections, the ODE systems,
//! uniqueness inside the ansatz and the translation into operators.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use super::{int, Config, Outcome, Recorder};
use crate::error::Result;
use crate::exterior::{MultiIndex, PolyForm};
use crate::operators::families::{family, FamilySpec, MiddleCase, MiddleVariant, Presentation};
use crate::scalars::{GaussianRational, Rational, Scalar};
use crate::singular::{
    build, first_type_profiles, middle_projections, ode_residuals, proportionality, solve_ansatz, translate,
    vanishing_checks_up_to, verify_annihilated, SingularVector,
};

const SEED: u64 = 0x5b0_2024;

/// Non-integral rationals with denominators 7, 11 or 13.
fn random_weights(count: usize) -> Vec<Rational> {
    let mut rng = StdRng::seed_from_u64(SEED);
    (0..count)
        .map(|_| {
            let den = [7i64, 11, 13][rng.gen_range(0..3)];
            let mut num = rng.gen_range(-40i64..=40);
            if num % den == 0 {
                num += 1;
            }
            Rational::frac(num, den)
        })
        .collect()
}

fn annihilated(v: &SingularVector) -> Result<Outcome> {
    let r = verify_annihilated(v)?;
    Ok(Outcome::from_bool(
        r.passed(),
        json!(r
            .failures
            .iter()
            .take(3)
            .map(|(idx, j, res)| json!({ "source_index": idx.axes(), "j": j, "residual": res.to_json() }))
            .collect::<Vec<_>>()),
    ))
}

/// Constant `c` with `a = c b` on every value.
fn data_ratio(a: &BTreeMap<MultiIndex, PolyForm>, b: &BTreeMap<MultiIndex, PolyForm>) -> Option<GaussianRational> {
    let (idx, form) = b.iter().find(|(_, f)| !f.is_zero())?;
    let (fi, mono, cb) = form.iter_terms().next()?;
    let ca = a.get(idx)?.coeff(fi).terms().get(&mono).cloned().unwrap_or_else(Scalar::zero);
    let c = ca.checked_div(cb).ok()?.as_constant()?;
    let scaled = Scalar::constant(c.clone());
    let agrees = a.len() == b.len()
        && b.iter().all(|(k, f)| a.get(k).is_some_and(|g| g.sub(&f.scale(&scaled)).is_ok_and(|r| r.is_zero())));
    agrees.then_some(c)
}

fn buildable(ty: u8, n: usize, p: usize, m: u32) -> bool {
    match ty {
        1 => p < n,
        2 => (1..=n).contains(&p),
        3 => m >= 1 && (p == 0 || (m == 1 && p + 2 <= n)),
        _ => m >= 1 && (p == n || (m == 1 && (2..=n).contains(&p))),
    }
}

pub(super) fn singular(rec: &mut Recorder, cfg: &Config) {
    for n in 2..=cfg.n_max {
        for ty in 1..=4u8 {
            for p in 0..=n {
                for m in 0..=cfg.order_max {
                    if !buildable(ty, n, p, m) {
                        continue;
                    }
                    let par = json!({ "type": ty, "n": n, "p": p, "N": m });
                    rec.check("annihilated", par.clone(), || annihilated(&build(ty, n, p, m)?));
                    let constant = translate(&build(ty, n, p, m).expect("buildable"))
                        .and_then(|t| proportionality(&t, &family(&FamilySpec::new(ty, n, p, m, Presentation::Normal))?));
                    let label = match &constant {
                        Ok(Some(c)) => json!(c.to_string()),
                        _ => json!(null),
                    };
                    let mut par = par;
                    par["constant"] = label;
                    rec.check("translates-to-family", par, || {
                        Ok(match constant? {
                            Some(c) if !c.is_zero() => Outcome::Pass,
                            other => Outcome::Fail(json!({ "constant": other.map(|c| c.to_string()) })),
                        })
                    });
                }
            }
        }
        let cases: &[MiddleCase] = if n % 2 == 1 { &[MiddleCase::OddLower, MiddleCase::OddUpper] } else { &[MiddleCase::Even] };
        for &case in cases {
            for plus in [true, false] {
                let v = MiddleVariant { case, plus };
                for m in 0..=cfg.order_max {
                    let par = json!({ "n": n, "case": format!("{case:?}"), "plus": plus, "N": m });
                    rec.check("middle-degree-annihilated", par, || {
                        let base = v.source_degree(n)? - usize::from(case == MiddleCase::OddUpper);
                        annihilated(&middle_projections(&build(1, n, base, m)?, v)?)
                    });
                }
            }
        }
        for p in 0..n {
            for odd in [false, true] {
                for big in 0..=cfg.order_max / 2 {
                    let order = 2 * big + u32::from(odd);
                    if order > cfg.order_max || order < 2 {
                        continue;
                    }
                    let par = json!({ "n": n, "p": p, "N": order });
                    rec.check("profile-ode-system", par, || {
                        let (pp, qq, rr) = first_type_profiles(n, p, big, odd)?;
                        let res = ode_residuals(n, p, big, odd, &pp, &qq, &rr);
                        let bad: Vec<_> =
                            res.iter().enumerate().filter(|(_, r)| !r.is_zero()).map(|(k, r)| json!({ "equation": k, "residual": format!("{r:?}") })).collect();
                        Ok(Outcome::from_bool(bad.is_empty(), json!(bad)))
                    });
                }
            }
        }
    }
    rec.check("perturbed-vector-is-rejected", json!({ "type": 1, "n": 3, "p": 1, "N": 2 }), || {
        let v = build(1, 3, 1, 2)?;
        let mut terms = v.terms.clone();
        terms[0].coeff = &terms[0].coeff * &Scalar::from_int(2);
        let bad = SingularVector::from_terms(v.n, v.degree, v.source_degree, v.homogeneity, v.vtype, None, terms)?;
        Ok(match annihilated(&bad)? {
            Outcome::Pass => Outcome::Fail(json!({ "error": "perturbed vector was annihilated" })),
            Outcome::Fail(_) => Outcome::Pass,
        })
    });
    ansatz(rec, cfg);
    match vanishing_checks_up_to(cfg.n_max, cfg.order_max) {
        Ok(checks) => {
            for c in checks {
                rec.check("vanishing-identity", json!({ "identity": c.name }), || {
                    Ok(Outcome::from_bool(c.pass, json!({ "identity": c.name })))
                });
            }
        }
        Err(e) => rec.check("vanishing-identity", json!({}), || Err(e)),
    }
}

fn ansatz(rec: &mut Recorder, cfg: &Config) {
    let weights = random_weights(5);
    let order_max = cfg.order_max.min(3);
    for n in 2..=cfg.n_max {
        for m in 0..=order_max {
            for (ty, p_range, shift) in [(1u8, 0..n, 0usize), (2, 1..n + 1, 1)] {
                for p in p_range {
                    for x in &weights {
                        let par = json!({ "type": ty, "n": n, "p": p, "N": m, "lambda": x.to_string() });
                        rec.check("ansatz-unique-generic", par, || {
                            let sol = solve_ansatz(n, p, p - shift, m, &GaussianRational::real(x.clone()))?;
                            let expected = build(ty, n, p, m)?.specialize(x);
                            let ratio = sol.basis.first().and_then(|b| data_ratio(&b.data, &expected.data));
                            Ok(Outcome::from_bool(
                                sol.dimension == 1 && ratio.is_some_and(|c| !c.is_zero()),
                                json!({ "dimension": sol.dimension }),
                            ))
                        });
                    }
                }
            }
            if m == 0 {
                continue;
            }
            let mi = m as i64;
            for p in 0..n.saturating_sub(1) {
                let pi = p as i64;
                let mut candidates = vec![int(mi - 1), int(-pi), weights[0].clone()];
                candidates.dedup();
                for x in candidates {
                    let expect = (p == 0 && x == int(mi - 1)) || (m == 1 && x == int(-pi));
                    let par = json!({ "type": 3, "n": n, "p": p, "N": m, "lambda": x.to_string(), "expected_dimension": u8::from(expect) });
                    rec.check("ansatz-third-type", par, || {
                        let sol = solve_ansatz(n, p, p + 1, m, &GaussianRational::real(x.clone()))?;
                        let ok = if expect {
                            let v = build(3, n, p, m)?;
                            sol.dimension == 1 && data_ratio(&sol.basis[0].data, &v.data).is_some_and(|c| !c.is_zero())
                        } else {
                            sol.dimension == 0
                        };
                        Ok(Outcome::from_bool(ok, json!({ "dimension": sol.dimension })))
                    });
                }
            }
            for p in 2..=n {
                let d = p as i64 - n as i64;
                let mut candidates = vec![int(mi - 1), int(d), weights[0].clone()];
                candidates.dedup();
                for x in candidates {
                    let expect = (p == n && x == int(mi - 1)) || (m == 1 && x == int(d));
                    let par = json!({ "type": 4, "n": n, "p": p, "N": m, "lambda": x.to_string(), "expected_dimension": u8::from(expect) });
                    rec.check("ansatz-fourth-type", par, || {
                        let sol = solve_ansatz(n, p, p - 2, m, &GaussianRational::real(x.clone()))?;
                        let ok = if expect {
                            let v = build(4, n, p, m)?;
                            sol.dimension == 1 && data_ratio(&sol.basis[0].data, &v.data).is_some_and(|c| !c.is_zero())
                        } else {
                            sol.dimension == 0
                        };
                        Ok(Outcome::from_bool(ok, json!({ "dimension": sol.dimension })))
                    });
                }
            }
        }
    }
}
