//! Operator-level suites: low-order displays, the two presentations,
//! equivariance, Hodge conjugation and the flat limit of the curved families.

use serde_json::json;

use super::{int, q, same, sandwich, sign, star, times, Config, Outcome, Recorder};
use crate::dsl::{parse_op, Bindings};
use crate::error::Result;
use crate::operators::families::{
    curved_first, curved_second, family, family_first, family_fourth, family_second, family_third, middle_degree,
    FamilySpec, MiddleCase, MiddleVariant, Presentation,
};
use crate::operators::{normalize, op_equal, Atom, OpExpr, Sig};
use crate::rep::check_intertwining_at;
use crate::scalars::{GaussianRational, Scalar};
use crate::singular::{build, SingularVector, SvTerm, SvWord, VType};

/// Structural equality of the normalized word expansions.
fn same_display(built: &OpExpr, text: &str, bind: &Bindings) -> Result<Outcome> {
    let parsed = parse_op(text, bind)?;
    if normalize(built) == normalize(&parsed) {
        return Ok(Outcome::Pass);
    }
    let semantic = op_equal(built, &parsed)?;
    Ok(Outcome::Fail(json!({
        "display": text,
        "equal_as_operators": semantic.is_none(),
        "witness": semantic.map(|w| json!({ "basis_form": w.basis_form.to_json(), "residual": w.residual.to_json() })),
    })))
}

fn lam2(c: i64) -> Scalar {
    Scalar::linear(int(2), int(c))
}

fn t(word: SvWord, xi: u32, lap: u32, coeff: Scalar) -> SvTerm {
    SvTerm { word, xi_n_power: xi, lap_power: lap, coeff }
}

/// Printed singular vectors of the first type, homogeneity at most three.
fn first_vector_display(n: i64, p: i64, m: u32) -> Vec<SvTerm> {
    use SvWord::{AIe, EnIe, Id};
    let third = Scalar::from_rational(q(1, 3));
    match m {
        0 => vec![t(Id, 0, 0, Scalar::lambda_plus(p))],
        1 => vec![t(Id, 1, 0, Scalar::lambda_plus(p - 1)), t(EnIe, 0, 0, Scalar::one())],
        2 => vec![
            t(Id, 0, 1, Scalar::lambda_plus(p - 2)),
            t(Id, 2, 0, -(&lam2(n - 3) * &Scalar::lambda_plus(p - 2))),
            t(EnIe, 1, 0, &Scalar::from_int(-2) * &lam2(n - 3)),
            t(AIe, 0, 0, Scalar::from_int(2)),
        ],
        _ => vec![
            t(Id, 1, 1, Scalar::lambda_plus(p - 3)),
            t(Id, 3, 0, -(&(&third * &lam2(n - 5)) * &Scalar::lambda_plus(p - 3))),
            t(EnIe, 0, 1, Scalar::one()),
            t(EnIe, 2, 0, -lam2(n - 5)),
            t(AIe, 1, 0, Scalar::from_int(2)),
        ],
    }
}

/// Printed singular vectors of the second type, homogeneity at most three.
fn second_vector_display(n: i64, p: i64, m: u32) -> Vec<SvTerm> {
    use SvWord::{EnAIe, A, En};
    let third = Scalar::from_rational(q(1, 3));
    let c = n - p;
    match m {
        0 => vec![t(En, 0, 0, -Scalar::lambda_plus(c))],
        1 => vec![t(En, 1, 0, -Scalar::lambda_plus(c - 1)), t(A, 0, 0, Scalar::one())],
        2 => vec![
            t(En, 0, 1, -Scalar::lambda_plus(c)),
            t(En, 2, 0, &lam2(n - 3) * &Scalar::lambda_plus(c - 2)),
            t(A, 1, 0, &Scalar::from_int(-2) * &lam2(n - 3)),
            t(EnAIe, 0, 0, Scalar::from_int(2)),
        ],
        _ => vec![
            t(En, 1, 1, -Scalar::lambda_plus(c - 1)),
            t(En, 3, 0, &(&third * &lam2(n - 5)) * &Scalar::lambda_plus(c - 3)),
            t(A, 0, 1, Scalar::one()),
            t(A, 2, 0, -lam2(n - 5)),
            t(EnAIe, 1, 0, Scalar::from_int(2)),
        ],
    }
}

const FIRST_NORMAL: [&str; 4] = [
    "(lambda+p) iota",
    "(lambda+p-1) iota dn + d iota i_n",
    "(lambda+p-2) Delta iota + (2*lambda+n-3) (lambda+p-2) iota dn^2 + 2 (2*lambda+n-3) d iota i_n dn + 2 d delta iota",
    "(lambda+p-3) Delta iota dn + Delta d iota i_n + 2 d delta iota dn + 1/3 (2*lambda+n-5) (lambda+p-3) iota dn^3 \
     + (2*lambda+n-5) d iota i_n dn^2",
];

const FIRST_GEOMETRIC: [&str; 3] = [
    "(lambda+p) d iota i_n + (lambda+p-1) iota i_n dbar",
    "(2*lambda+n-2) ((lambda+p) d delta + (lambda+p-2) delta d) iota \
     - (2*lambda+n-3) iota ((lambda+p) dbar deltabar + (lambda+p-2) deltabar dbar)",
    "1/3 (2*lambda+n-2) (lambda+p) d delta d iota i_n - 1/3 (2*lambda+n-5) (lambda+p-3) iota i_n dbar deltabar dbar \
     + 1/3 (2*lambda+n-2) (lambda+p-3) delta d iota i_n dbar - 1/3 (2*lambda+n-5) (lambda+p) d iota i_n dbar deltabar \
     + 1/3 (2*(lambda+p-3)*(2*lambda+n-2) + 3*(lambda+n-p)) d delta iota i_n dbar",
];

const SECOND_NORMAL: [&str; 4] = [
    "- (lambda+n-p) iota i_n",
    "- (lambda+n-p-1) iota i_n dn - delta iota",
    "- (lambda+n-p) Delta iota i_n - (2*lambda+n-3) (lambda+n-p-2) iota i_n dn^2 - 2 (2*lambda+n-3) delta iota dn \
     + 2 d delta iota i_n",
    "- (lambda+n-p-1) Delta iota i_n dn - Delta delta iota + 2 d delta iota i_n dn \
     - 1/3 (2*lambda+n-5) (lambda+n-p-3) iota i_n dn^3 - (2*lambda+n-5) delta iota dn^2",
];

const SECOND_GEOMETRIC: [&str; 3] = [
    "- (lambda+n-p) delta iota + (lambda+n-p-1) iota deltabar",
    "- (2*lambda+n-2) ((lambda+n-p) delta d + (lambda+n-p-2) d delta) iota i_n \
     + (2*lambda+n-3) iota i_n ((lambda+n-p) deltabar dbar + (lambda+n-p-2) dbar deltabar)",
    "- 1/3 (2*lambda+n-2) (lambda+n-p) delta d delta iota - 1/3 (2*lambda+n-5) (lambda+n-p-3) iota deltabar dbar deltabar \
     + 1/3 (2*lambda+n-2) (lambda+n-p-3) d delta iota deltabar + 1/3 (2*lambda+n-5) (lambda+n-p) delta iota deltabar dbar \
     + 1/3 (2*(lambda+n-p-3)*(2*lambda+n-2) + 3*(lambda+p)) delta d iota deltabar",
];

const THIRD: [&str; 4] = [
    "d iota",
    "d iota dn",
    "d delta d iota + (n+1) d iota dn^2",
    "1/3 (n+1) d iota dn^3 + d delta d iota dn",
];

/// Printed without the pullback in the last order; it is restored here.
const FOURTH: [&str; 4] = [
    "- delta iota i_n",
    "- delta iota i_n dn",
    "- (n+1) delta iota i_n dn^2 - delta d delta iota i_n",
    "- 1/3 (n+1) delta iota i_n dn^3 - delta d delta iota i_n dn",
];

pub(super) fn low_order(rec: &mut Recorder, cfg: &Config) {
    for n in 2..=cfg.n_max {
        let ni = n as i64;
        for m in 0..=3u32 {
            for p in 0..n {
                rec.check("first-type-vector-display", json!({ "n": n, "p": p, "N": m, "lambda": "symbolic" }), || {
                    let shown = SingularVector::from_terms(n, p, p, m, VType::First, None, first_vector_display(ni, p as i64, m))?;
                    let built = build(1, n, p, m)?;
                    Ok(Outcome::from_bool(shown.data == built.data, json!({ "built": built.to_json(), "shown": shown.to_json() })))
                });
                rec.check("first-type-normal-display", json!({ "n": n, "p": p, "N": m, "lambda": "symbolic" }), || {
                    same_display(&family_first(n, p, m)?, FIRST_NORMAL[m as usize], &Bindings::new(n, p))
                });
                if m >= 1 {
                    rec.check("first-type-geometric-display", json!({ "n": n, "p": p, "N": m, "lambda": "symbolic" }), || {
                        let spec = FamilySpec::new(1, n, p, m, Presentation::Geometric);
                        same_display(&family(&spec)?, FIRST_GEOMETRIC[m as usize - 1], &Bindings::new(n, p))
                    });
                }
            }
            for p in 1..=n {
                rec.check("second-type-vector-display", json!({ "n": n, "p": p, "N": m, "lambda": "symbolic" }), || {
                    let shown =
                        SingularVector::from_terms(n, p, p - 1, m, VType::Second, None, second_vector_display(ni, p as i64, m))?;
                    let built = build(2, n, p, m)?;
                    Ok(Outcome::from_bool(shown.data == built.data, json!({ "built": built.to_json(), "shown": shown.to_json() })))
                });
                rec.check("second-type-normal-display", json!({ "n": n, "p": p, "N": m, "lambda": "symbolic" }), || {
                    same_display(&family_second(n, p, m)?, SECOND_NORMAL[m as usize], &Bindings::new(n, p))
                });
                if m >= 1 {
                    rec.check("second-type-geometric-display", json!({ "n": n, "p": p, "N": m, "lambda": "symbolic" }), || {
                        let spec = FamilySpec::new(2, n, p, m, Presentation::Geometric);
                        same_display(&family(&spec)?, SECOND_GEOMETRIC[m as usize - 1], &Bindings::new(n, p))
                    });
                }
            }
        }
        for p in 0..n.saturating_sub(1) {
            rec.check("third-type-vector-display", json!({ "n": n, "p": p, "N": 1, "lambda": -(p as i64) }), || {
                let shown = SingularVector::from_terms(
                    n,
                    p,
                    p + 1,
                    1,
                    VType::Third,
                    Some(int(-(p as i64))),
                    vec![t(SvWord::Ie, 0, 0, Scalar::one())],
                )?;
                let built = build(3, n, p, 1)?;
                Ok(Outcome::from_bool(shown.data == built.data && built.lambda == shown.lambda, json!({ "built": built.to_json() })))
            });
        }
        for p in 2..=n {
            let lam = p as i64 - ni;
            rec.check("fourth-type-vector-display", json!({ "n": n, "p": p, "N": 1, "lambda": lam }), || {
                let shown = SingularVector::from_terms(
                    n,
                    p,
                    p - 2,
                    1,
                    VType::Fourth,
                    Some(int(lam)),
                    vec![t(SvWord::EnA, 0, 0, Scalar::one())],
                )?;
                let built = build(4, n, p, 1)?;
                Ok(Outcome::from_bool(shown.data == built.data && built.lambda == shown.lambda, json!({ "built": built.to_json() })))
            });
        }
        for m in 1..=4u32 {
            let prev = int(m as i64 - 1);
            let par = json!({ "n": n, "N": m, "lambda": m - 1 });
            rec.check("third-type-display", par.clone(), || same_display(&family_third(n, 0, m)?, THIRD[m as usize - 1], &Bindings::new(n, 0)));
            rec.check("third-type-as-derivative", par.clone(), || {
                let inner = super::at(&family_first(n, 0, m - 1)?.derivative(), &prev);
                let d = OpExpr::atom(Atom::D, inner.target())?;
                same(&d.after(&inner)?, &parse_op(THIRD[m as usize - 1], &Bindings::new(n, 0))?)
            });
            rec.check("fourth-type-display", par.clone(), || {
                same_display(&family_fourth(n, n, m)?, FOURTH[m as usize - 1], &Bindings::new(n, n))
            });
            rec.check("fourth-type-as-derivative", par, || {
                let inner = super::at(&family_second(n, n, m - 1)?.derivative(), &prev);
                let delta = OpExpr::atom(Atom::Delta, inner.target())?;
                same(&delta.after(&inner)?, &parse_op(FOURTH[m as usize - 1], &Bindings::new(n, n))?)
            });
        }
    }
}

pub(super) fn presentation(rec: &mut Recorder, cfg: &Config) {
    for n in 2..=cfg.n_max {
        for ty in 1..=2u8 {
            for p in 0..=n {
                for m in 0..=cfg.order_max {
                    let normal = FamilySpec::new(ty, n, p, m, Presentation::Normal);
                    if normal.validate().is_err() {
                        continue;
                    }
                    let geo = FamilySpec { presentation: Presentation::Geometric, ..normal };
                    rec.check(
                        "normal-equals-geometric",
                        json!({ "type": ty, "n": n, "p": p, "N": m, "lambda": "symbolic" }),
                        || same(&family(&normal)?, &family(&geo)?),
                    );
                }
            }
        }
    }
}

fn middle_variants(n: usize) -> Vec<MiddleVariant> {
    let cases: &[MiddleCase] = if n % 2 == 1 { &[MiddleCase::OddLower, MiddleCase::OddUpper] } else { &[MiddleCase::Even] };
    cases.iter().flat_map(|&case| [true, false].map(|plus| MiddleVariant { case, plus })).collect()
}

fn intertwines(d: &OpExpr, shift: u32, lambda: &Scalar) -> Result<Outcome> {
    let (s, tg) = (d.source(), d.target());
    let r = check_intertwining_at(d, s.ambient_dim, s.degree as usize, tg.degree as usize, shift, lambda)?;
    Ok(Outcome::from_bool(r.passed(), r.to_json()))
}

pub(super) fn equivariance(rec: &mut Recorder, cfg: &Config) {
    for n in 2..=cfg.n_max {
        for ty in 1..=4u8 {
            for p in 0..=n {
                for m in 0..=cfg.order_max {
                    let spec = FamilySpec::new(ty, n, p, m, Presentation::Normal);
                    if spec.validate().is_err() {
                        continue;
                    }
                    let (lambda, label) = match spec.fixed_lambda() {
                        Some(x) => (Scalar::from_rational(x.clone()), json!(x.to_string())),
                        None => (Scalar::lambda(), json!("symbolic")),
                    };
                    rec.check("family-intertwines", json!({ "type": ty, "n": n, "p": p, "N": m, "lambda": label }), || {
                        intertwines(&family(&spec)?, m, &lambda)
                    });
                }
            }
        }
        for v in middle_variants(n) {
            for m in 0..=cfg.order_max {
                let par = json!({ "n": n, "case": format!("{:?}", v.case), "plus": v.plus, "N": m, "lambda": "symbolic" });
                rec.check("middle-degree-intertwines", par, || intertwines(&middle_degree(n, v, m)?, m, &Scalar::lambda()));
            }
        }
    }
    rec.check("perturbed-family-is-rejected", json!({ "n": 3, "p": 1, "N": 2, "lambda": "symbolic" }), || {
        let d = family_first(3, 1, 2)?;
        let extra = OpExpr::chain(d.source(), &[Atom::Pullback, Atom::Dn, Atom::Dn])?;
        Ok(match intertwines(&d.plus(&extra)?, 2, &Scalar::lambda())? {
            Outcome::Pass => Outcome::Fail(json!({ "error": "perturbed operator passed the equivariance check" })),
            Outcome::Fail(_) => Outcome::Pass,
        })
    });
    rec.check("wrong-shift-is-rejected", json!({ "n": 3, "p": 1, "N": 2, "shift": 1, "lambda": "symbolic" }), || {
        Ok(match intertwines(&family_first(3, 1, 2)?, 1, &Scalar::lambda())? {
            Outcome::Pass => Outcome::Fail(json!({ "error": "wrong weight shift passed the equivariance check" })),
            Outcome::Fail(_) => Outcome::Pass,
        })
    });
}

fn chain(src: Sig, atoms: &[Atom]) -> Result<OpExpr> {
    OpExpr::chain(src, atoms)
}

/// Relations between `d`, `delta`, `Delta` and the Hodge star on forms of degree `p` over `sig`.
fn hodge_calculus(rec: &mut Recorder, sig: Sig) {
    use Atom::{Delta as DL, Lap, Star as S, D};
    let m = sig.form_dim() as i64;
    let p = sig.degree as i64;
    let par = json!({ "dim": m, "side": format!("{:?}", sig.side), "p": p });
    rec.check("star-squared", par.clone(), || same(&chain(sig, &[S, S])?, &times(&sign(p * (m - p)), OpExpr::id(sig))));
    rec.check("star-laplacian", par.clone(), || same(&chain(sig, &[S, Lap])?, &chain(sig, &[Lap, S])?));
    if p >= 1 {
        rec.check("star-d-star", par.clone(), || same(&chain(sig, &[S, D, S])?, &times(&sign(m * (p + 1) + 1), chain(sig, &[DL])?)));
    }
    if p < m {
        rec.check("star-d", par.clone(), || same(&chain(sig, &[S, D])?, &times(&sign(p + 1), chain(sig, &[DL, S])?)));
        rec.check("star-delta-star", par.clone(), || same(&chain(sig, &[S, DL, S])?, &times(&sign(m * (p + 1)), chain(sig, &[D])?)));
    }
    if p >= 1 {
        rec.check("star-delta", par.clone(), || same(&chain(sig, &[S, DL])?, &times(&sign(p), chain(sig, &[D, S])?)));
    }
    if p >= 1 && p < m {
        rec.check("star-d-delta", par.clone(), || same(&chain(sig, &[S, D, DL])?, &chain(sig, &[DL, D, S])?));
        rec.check("star-delta-d", par, || same(&chain(sig, &[S, DL, D])?, &chain(sig, &[D, DL, S])?));
    }
}

pub(super) fn hodge(rec: &mut Recorder, cfg: &Config) {
    use Atom::{InsertNormal as IN, Pullback as PB, Star as S};
    for n in 2..=cfg.n_max {
        let ni = n as i64;
        for p in 0..=n {
            hodge_calculus(rec, Sig::ambient(n, p as i32));
        }
        for p in 0..n {
            hodge_calculus(rec, Sig::slice(n, p as i32));
        }
        for p in 0..=n {
            let pi = p as i64;
            let src = Sig::ambient(n, p as i32);
            let par = json!({ "n": n, "p": p });
            if p < n {
                rec.check("star-conjugates-normal-pullback", par.clone(), || {
                    same(&chain(src, &[S, IN, S])?, &times(&sign((pi + 1) * (ni - 1)), chain(src, &[PB])?))
                });
            }
            if p >= 1 {
                rec.check("star-conjugates-pullback", par, || {
                    same(&chain(src, &[S, PB, S])?, &times(&sign(pi * ni + 1), chain(src, &[IN])?))
                });
            }
        }
        for p in 1..=n {
            for m in 1..=cfg.order_max {
                let par = json!({ "n": n, "p": p, "N": m, "lambda": "symbolic" });
                rec.check("second-type-is-conjugated-first-type", par, || {
                    let inner = family_first(n, n - p, m)?;
                    let rhs = sandwich(star(inner.target())?, inner, star(Sig::ambient(n, p as i32))?)?;
                    same(&family_second(n, p, m)?, &times(&sign(p as i64 * ni), rhs))
                });
            }
        }
        for m in 1..=cfg.order_max {
            let par = json!({ "n": n, "N": m, "lambda": m - 1 });
            rec.check("fourth-type-is-conjugated-third-type", par, || {
                let inner = family_third(n, 0, m)?;
                let rhs = sandwich(star(inner.target())?, inner, star(Sig::ambient(n, n as i32))?)?;
                same(&family_fourth(n, n, m)?, &times(&sign(ni + 1), rhs))
            });
        }
        for qd in 1..n.saturating_sub(1) {
            let qi = qd as i64;
            let par = json!({ "n": n, "q": qd, "N": 1, "lambda": -qi });
            rec.check("first-order-fourth-type-is-conjugated-third-type", par, || {
                let inner = family_third(n, qd, 1)?;
                let rhs = sandwich(star(inner.target())?, inner, star(Sig::ambient(n, (n - qd) as i32))?)?;
                same(&family_fourth(n, n - qd, 1)?, &times(&sign(qi + (ni - qi) * ni), rhs))
            });
        }
    }
}

pub(super) fn curved(rec: &mut Recorder, cfg: &Config) {
    let one = GaussianRational::one();
    for n in 2..=cfg.n_max {
        for p in 0..n {
            let par = json!({ "n": n, "p": p, "N": 1, "lambda": "symbolic" });
            rec.check("curved-first-type-flat-limit", par, || {
                let shift = GaussianRational::from_int(1 - p as i64);
                same(&curved_first(n, p)?, &family_first(n, p, 1)?.substitute(&one, &shift))
            });
        }
        for p in 1..=n {
            let par = json!({ "n": n, "p": p, "N": 1, "lambda": "symbolic" });
            rec.check("curved-second-type-flat-limit", par, || {
                let shift = GaussianRational::from_int(2 - p as i64);
                same(&curved_second(n, p)?, &family_second(n, p, 1)?.substitute(&one, &shift))
            });
        }
    }
}
