//! Coefficient identities and the comparison with the planar operators built
//! from Gegenbauer polynomials in `d/dy / (i d/dx)`.

use serde_json::json;

use super::{int, q, same_scalar, Outcome, Recorder};
use crate::coeffs::{
    a, a_closed, alpha, b, b_closed, beta, even_gegenbauer_sum, f21_terminating, gamma, gamma_pm, gegenbauer_c,
    gegenbauer_order, jacobi_p, odd_gegenbauer_sum, pochhammer, UniPoly,
};
use crate::error::Result;
use crate::exterior::{Mono, MultiIndex, Poly, PolyForm};
use crate::operators::families::family_second;
use crate::scalars::{binomial, factorial, GaussianRational, Rational, Scalar};

const COEFF_N: std::ops::RangeInclusive<i64> = 2..=6;
const COEFF_ORDER: u32 = 6;

fn s(r: Rational) -> Scalar {
    Scalar::from_rational(r)
}

fn si(k: i64) -> Scalar {
    Scalar::from_int(k)
}

fn binom(top: u32, k: u32) -> Scalar {
    s(binomial(top, k))
}

fn same_poly(x: &UniPoly, y: &UniPoly) -> Outcome {
    let show = |p: &UniPoly| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>();
    Outcome::from_bool(x == y, json!({ "lhs": show(x), "rhs": show(y) }))
}

pub(super) fn coeffs(rec: &mut Recorder) {
    let lam = Scalar::lambda();
    for n in COEFF_N {
        for big in 0..=COEFF_ORDER {
            let bn = big as i64;
            let par = |j: u32| json!({ "n": n, "N": big, "j": j, "lambda": "symbolic" });
            for j in 1..=big {
                let jj = j as i64;
                rec.check("recurrence-even", par(j), || {
                    let lhs = &(&si((bn - jj + 1) * (2 * bn - 2 * jj + 1)) * &a(big, j - 1, n)?)
                        + &(&(&si(jj) * &Scalar::linear(int(2), int(n - 4 * bn + 2 * jj - 1))) * &a(big, j, n)?);
                    Ok(same_scalar(&lhs, &Scalar::zero()))
                });
                rec.check("recurrence-odd", par(j), || {
                    let lhs = &(&si((bn - jj + 1) * (2 * bn - 2 * jj + 3)) * &b(big, j - 1, n)?)
                        + &(&(&si(jj) * &Scalar::linear(int(2), int(n - 4 * bn + 2 * jj - 3))) * &b(big, j, n)?);
                    Ok(same_scalar(&lhs, &Scalar::zero()))
                });
            }
            for j in 0..=big {
                rec.check("closed-form-even", par(j), || Ok(same_scalar(&a(big, j, n)?, &a_closed(big, j, n)?)));
                rec.check("closed-form-odd", par(j), || Ok(same_scalar(&b(big, j, n)?, &b_closed(big, j, n)?)));
            }
            for i in 0..=big {
                let sum_of = |coef: &dyn Fn(u32) -> Result<Scalar>| -> Result<Scalar> {
                    let mut acc = Scalar::zero();
                    for j in 0..=(big - i) {
                        let sg = if (big - j - i) % 2 == 0 { 1 } else { -1 };
                        acc = &acc + &(&(&si(sg) * &binom(big - j, i)) * &coef(j)?);
                    }
                    Ok(acc)
                };
                rec.check("alpha-from-even-coefficients", par(i), || {
                    Ok(same_scalar(&sum_of(&|j| a(big, j, n))?, &alpha(big, i, n)?))
                });
                rec.check("beta-from-odd-coefficients", par(i), || {
                    Ok(same_scalar(&sum_of(&|j| b(big, j, n))?, &beta(big, i, n)?))
                });
            }
            for p in 0..=n {
                for i in 1..=big {
                    let ii = i as i64;
                    let par = json!({ "n": n, "N": big, "p": p, "i": i, "lambda": "symbolic" });
                    rec.check("gamma-from-beta", par.clone(), || {
                        let rhs = &(&Scalar::lambda_plus(p - 2 * ii) * &beta(big, i, n)?)
                            - &(&Scalar::lambda_plus(p - 2 * ii + 1) * &beta(big, i - 1, n)?);
                        Ok(same_scalar(&gamma(big, i, p, n)?, &rhs))
                    });
                    rec.check("gamma-split", par, || {
                        let rhs = &gamma_pm(big, i, p, n, true)? + &gamma_pm(big, i, p, n, false)?;
                        Ok(same_scalar(&gamma(big, i, p, n)?, &rhs))
                    });
                }
            }
            let par = json!({ "n": n, "N": big, "lambda": "symbolic" });
            let shift = Scalar::lambda_plus_q(&q(n, 2) - &int(bn));
            let c = Scalar::linear(int(-1), &int(1) - &q(n, 2));
            rec.check("alpha-generating-polynomial", par.clone(), || {
                let pre = &s(&(&Rational::from_int(4).pow(big) * &factorial(big)) * &factorial(2 * big).recip()?)
                    * &pochhammer(&shift, big);
                let bb = Scalar::linear(int(-1), &(&int(bn) + &q(1, 2)) - &q(n, 2));
                let gen = UniPoly::new((0..=big).map(|i| alpha(big, i, n)).collect::<Result<Vec<_>>>()?);
                Ok(same_poly(&gen, &f21_terminating(big, &bb, &c, &pre)?))
            });
            rec.check("beta-generating-polynomial", par.clone(), || {
                let pre = &s(&(&Rational::from_int(4).pow(big) * &factorial(big)) * &factorial(2 * big + 1).recip()?)
                    * &pochhammer(&shift, big);
                let bb = Scalar::linear(int(-1), &(&int(bn) + &q(3, 2)) - &q(n, 2));
                let gen = UniPoly::new((0..=big).map(|i| beta(big, i, n)).collect::<Result<Vec<_>>>()?);
                Ok(same_poly(&gen, &f21_terminating(big, &bb, &c, &pre)?))
            });
            let ord = gegenbauer_order(n);
            let nf = s(factorial(big));
            rec.check("even-gegenbauer-expansion", par.clone(), || {
                let lhs = gegenbauer_c(2 * big, &ord).scale(&nf);
                let rhs = even_gegenbauer_sum(big, n).scale(&pochhammer(&ord, big));
                Ok(same_poly(&lhs, &rhs))
            });
            rec.check("odd-gegenbauer-expansion", par, || {
                let lhs = gegenbauer_c(2 * big + 1, &ord).scale(&nf);
                let rhs = odd_gegenbauer_sum(big, n).scale(&(&si(2) * &pochhammer(&ord, big + 1)));
                Ok(same_poly(&lhs, &rhs))
            });
        }
    }
    let half_up = Scalar::lambda_plus_q(q(1, 2));
    let reflect = |p: UniPoly| p.map(|c| c.compose_affine(&GaussianRational::from_int(-1), &GaussianRational::from_int(-1)));
    for big in 0..=COEFF_ORDER {
        let par = json!({ "n": 2, "N": big, "lambda": "symbolic" });
        let nf = s(factorial(big));
        rec.check("planar-even-gegenbauer", par.clone(), || {
            let lhs = gegenbauer_c(2 * big, &half_up).scale(&nf);
            let rhs = reflect(even_gegenbauer_sum(big, 2)).scale(&pochhammer(&half_up, big));
            Ok(same_poly(&lhs, &rhs))
        });
        rec.check("planar-odd-gegenbauer", par, || {
            let lhs = gegenbauer_c(2 * big + 1, &half_up).scale(&nf);
            let rhs = reflect(odd_gegenbauer_sum(big, 2)).scale(&(&si(2) * &pochhammer(&half_up, big + 1)));
            Ok(same_poly(&lhs, &rhs))
        });
    }
    for m in 0..=COEFF_ORDER {
        let par = json!({ "m": m, "alpha": "lambda" });
        let half = s(q(1, 2));
        rec.check("gegenbauer-as-jacobi", par.clone(), || {
            let shifted = &lam + &half;
            let lhs = gegenbauer_c(m, &lam).scale(&pochhammer(&shifted, m));
            let ab = &lam - &half;
            let rhs = jacobi_p(m, &ab, &ab)?.scale(&pochhammer(&(&si(2) * &lam), m));
            Ok(same_poly(&lhs, &rhs))
        });
        rec.check("gegenbauer-as-hypergeometric", par.clone(), || {
            let shifted = &lam + &half;
            let two = &si(2) * &lam;
            let lhs = gegenbauer_c(m, &lam).scale(&(&s(factorial(m)) * &pochhammer(&shifted, m)));
            let pre = &pochhammer(&two, m) * &pochhammer(&shifted, m);
            let f = f21_terminating(m, &(&two + &si(m as i64)), &shifted, &pre)?;
            let rhs = f.compose_affine(&s(q(-1, 2)), &s(q(1, 2)));
            Ok(same_poly(&lhs, &rhs))
        });
        rec.check("chu-vandermonde", par, || {
            let bb = &lam + &si(1);
            let cc = Scalar::linear(int(2), int(3));
            let f = f21_terminating(m, &bb, &cc, &pochhammer(&cc, m))?;
            Ok(same_scalar(&f.eval(&Scalar::one()), &pochhammer(&(&cc - &bb), m)))
        });
    }
}

/// Constant-coefficient operator `sum c x^a y^b -> c d_x^a d_y^b` on the plane.
#[derive(Default)]
struct PlanarOp(Vec<(u32, u32, Scalar)>);

impl PlanarOp {
    /// `(i d_x)^r C_r^alpha(d_y / (i d_x))`.
    fn gegenbauer(r: i64, alpha: &Scalar) -> PlanarOp {
        if r < 0 {
            return PlanarOp::default();
        }
        let r = r as u32;
        let c = gegenbauer_c(r, alpha);
        let mut out = Vec::new();
        for k in 0..=r {
            let ck = c.coeff(k as usize);
            if !ck.is_zero() {
                out.push((r - k, k, ck.scale(&GaussianRational::i_pow((r - k) as i64))));
            }
        }
        PlanarOp(out)
    }

    fn then_d(&self, ax: u32, ay: u32, c: &Scalar) -> PlanarOp {
        PlanarOp(self.0.iter().map(|(x, y, k)| (x + ax, y + ay, k * c)).collect())
    }

    fn plus(mut self, other: PlanarOp) -> PlanarOp {
        self.0.extend(other.0);
        self
    }

    fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ax, ay, c) in &self.0 {
            let mut g = f.clone();
            for _ in 0..*ax {
                g = g.partial(0);
            }
            for _ in 0..*ay {
                g = g.partial(1);
            }
            out.add_scaled(&g, c);
        }
        out
    }
}

fn kkp_first(m: i64) -> PlanarOp {
    let c = &si(m) * &Scalar::linear(int(2), int(m - 1));
    PlanarOp::gegenbauer(m - 1, &Scalar::lambda_plus_q(q(1, 2))).then_d(1, 0, &c)
}

fn kkp_second(m: i64) -> PlanarOp {
    let lam = Scalar::lambda();
    let c1 = &(&(&si(2) * &lam.pow(2)) + &(&si(2 * (m - 1)) * &lam)) + &si(m * (m - 1));
    let c2 = &Scalar::lambda_plus(-1) * &Scalar::linear(int(2), int(1));
    let g1 = PlanarOp::gegenbauer(m - 1, &Scalar::lambda_plus_q(q(1, 2)));
    let g2 = PlanarOp::gegenbauer(m - 2, &Scalar::lambda_plus_q(q(3, 2)));
    g1.then_d(0, 1, &c1).plus(g2.then_d(2, 0, &c2)).plus(g2.then_d(0, 2, &c2))
}

/// Constant in front of the family of the second type at `-lambda`.
fn kkp_constant(m: u32) -> Result<Scalar> {
    let big = m / 2;
    let sg = if big % 2 == 0 { 1 } else { -1 };
    let poch = pochhammer(&Scalar::lambda_plus_q(q(1, 2)), big);
    if m % 2 == 0 {
        Ok(&s(&int(2 * sg) * &factorial(big - 1).recip()?) * &poch)
    } else {
        let c = &int(2 * sg * (2 * big as i64 + 1)) * &factorial(big).recip()?;
        Ok(&(&s(c) * &poch) * &Scalar::lambda_plus(big as i64))
    }
}

pub(super) fn kkp(rec: &mut Recorder) {
    for m in 1..=5u32 {
        let mi = m as i64;
        let ops = (kkp_first(mi), kkp_second(mi));
        let family = match family_second(2, 1, m) {
            Ok(f) => f.substitute(&GaussianRational::from_int(-1), &GaussianRational::zero()),
            Err(e) => {
                rec.check("planar-comparison", json!({ "m": m }), || Err(e));
                continue;
            }
        };
        let constant = match kkp_constant(m) {
            Ok(c) => c,
            Err(e) => {
                rec.check("planar-comparison", json!({ "m": m }), || Err(e));
                continue;
            }
        };
        for deg in 0..=m.max(4) {
            for mono in Mono::all_of_degree(2, deg) {
                for (slot, op) in [(0usize, &ops.0), (1usize, &ops.1)] {
                    let par = json!({ "n": 2, "m": m, "slot": if slot == 0 { "dx" } else { "dy" }, "monomial": mono.exponents(2), "lambda": "symbolic" });
                    rec.check("planar-comparison", par, || {
                        let f = Poly::monomial(mono);
                        let lhs = op.apply(&f).restrict_zero(1);
                        let omega = PolyForm::basis(2, MultiIndex::single(slot), mono);
                        let image = family.apply(&omega)?;
                        let rhs = image.coeff(MultiIndex::empty()).scale(&constant);
                        let lhs_f = PolyForm::function(1, lhs);
                        let rhs_f = PolyForm::function(1, rhs);
                        Ok(Outcome::from_bool(
                            lhs_f == rhs_f,
                            json!({ "basis_form": omega.to_json(), "lhs": lhs_f.to_json(), "rhs": rhs_f.to_json() }),
                        ))
                    });
                }
            }
        }
    }
}
