//! Infinitesimal conformal actions on polynomial forms and the Fourier-side
//! operators `P_j(lambda)`.
//!
//! The action on `p`-forms of weight `lambda` is the Lie derivative along the
//! conformal vector field of the generator, with the weight entering as
//! `-lambda` times the conformal factor.  With this convention the pullback
//! and `i_n` both intertwine without any `p`-dependent shift.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{monomial_basis, Poly, PolyForm};
use crate::operators::{CompiledOp, OpExpr};
use crate::scalars::Scalar;

/// Basis elements of the conformal Lie algebra (indices are 0-based axes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Eplus(usize),
    Eminus(usize),
    GradingE,
    Rotation(usize, usize),
}

impl Generator {
    /// All generators preserving the hyperplane `x_n = 0` in `R^n`.
    pub fn tangential(n: usize) -> Vec<Generator> {
        let m = n - 1;
        let mut out = Vec::new();
        for j in 0..m {
            out.push(Generator::Eplus(j));
            out.push(Generator::Eminus(j));
        }
        out.push(Generator::GradingE);
        for i in 0..m {
            for j in i + 1..m {
                out.push(Generator::Rotation(i, j));
            }
        }
        out
    }

    fn check(&self, dim: usize) -> Result<()> {
        let ok = match *self {
            Generator::Eplus(j) | Generator::Eminus(j) => j < dim,
            Generator::GradingE => true,
            Generator::Rotation(i, j) => i < j && j < dim,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Range(format!("generator {self} on R^{dim}")))
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Eplus(j) => write!(f, "E+_{}", j + 1),
            Generator::Eminus(j) => write!(f, "E-_{}", j + 1),
            Generator::GradingE => write!(f, "E"),
            Generator::Rotation(i, j) => write!(f, "M_{}{}", i + 1, j + 1),
        }
    }
}

fn norm_sq(dim: usize) -> Poly {
    let mut p = Poly::zero();
    for k in 0..dim {
        p.add_assign(&Poly::constant(Scalar::one()).mul_coord(k).mul_coord(k));
    }
    p
}

/// `sum_k x_k d/dx_k` on coefficients, as an explicit derivation.
fn euler_field(w: &PolyForm) -> PolyForm {
    w.euler_degree()
}

/// The dual action of `g` on `w` (a `p`-form on `R^n`, `n = w.dim()`) at weight `lambda`.
pub fn act(lambda: &Scalar, g: Generator, w: &PolyForm) -> Result<PolyForm> {
    let dim = w.dim();
    g.check(dim)?;
    match g {
        Generator::Eminus(j) => w.partial(j),
        Generator::GradingE => {
            let mut out = euler_field(w);
            out.add_scaled(w, &-lambda.clone())?;
            Ok(out)
        }
        Generator::Rotation(i, j) => {
            let mut out = w.partial(j)?.mul_coord(i);
            out.add_scaled(&w.partial(i)?.mul_coord(j), &Scalar::from_int(-1))?;
            out.add_scaled(&w.interior(j)?.ext(i)?, &Scalar::one())?;
            out.add_scaled(&w.interior(i)?.ext(j)?, &Scalar::from_int(-1))?;
            Ok(out)
        }
        Generator::Eplus(j) => {
            let half = Scalar::frac(-1, 2);
            let mut out = w.partial(j)?.mul_poly(&norm_sq(dim)).scale(&half);
            out.add_scaled(&euler_field(w).mul_coord(j), &Scalar::one())?;
            out.add_scaled(&w.mul_coord(j), &-lambda.clone())?;
            out.add_scaled(&w.euler_insert(false).ext(j)?, &Scalar::one())?;
            out.add_scaled(&w.interior(j)?.alpha_wedge(false), &Scalar::from_int(-1))?;
            Ok(out)
        }
    }
}

/// `act_dual(n, lambda, p, g, w)`: [`act`] with the ambient dimension and degree checked.
pub fn act_dual(n: usize, lambda: &Scalar, p: usize, g: Generator, w: &PolyForm) -> Result<PolyForm> {
    if w.dim() != n || w.degree() != p as i32 {
        return Err(Error::Dimension(format!(
            "expected a {p}-form on R^{n}, got a {}-form on R^{}",
            w.degree(),
            w.dim()
        )));
    }
    act(lambda, g, w)
}

/// `P_j(lambda) v = (1/2 xi_j Lap_xi + (lambda - E_xi) d_j) v - d_xi(i_j v) - e_j ∧ delta_xi v`
/// on polynomial forms in `xi`, where `Lap_xi` is the sum of second derivatives.
pub fn fourier_p(lambda: &Scalar, j: usize, v: &PolyForm) -> Result<PolyForm> {
    let dim = v.dim();
    if j >= dim {
        return Err(Error::Range(format!("P_{} on R^{dim}", j + 1)));
    }
    let mut out = v.laplacian().mul_coord(j).scale(&Scalar::frac(-1, 2));
    let dj = v.partial(j)?;
    out.add_scaled(&dj, lambda)?;
    out.add_scaled(&dj.euler_degree(), &Scalar::from_int(-1))?;
    out.add_scaled(&v.interior(j)?.d(), &Scalar::from_int(-1))?;
    out.add_scaled(&v.codifferential().ext(j)?, &Scalar::from_int(-1))?;
    Ok(out)
}

/// `fourier_P(n, lambda, p, j, v)` with the shape of `v` checked.
#[allow(non_snake_case)]
pub fn fourier_P(n: usize, lambda: &Scalar, p: usize, j: usize, v: &PolyForm) -> Result<PolyForm> {
    if v.dim() != n || v.degree() != p as i32 {
        return Err(Error::Dimension(format!("expected a {p}-form in {n} variables")));
    }
    fourier_p(lambda, j, v)
}

/// A nonzero residual found while checking equivariance.
#[derive(Debug, Clone, PartialEq)]
pub struct IntertwiningFailure {
    pub generator: Generator,
    pub basis_form: PolyForm,
    pub residual: PolyForm,
}

/// Outcome of [`check_intertwining`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntertwiningReport {
    pub case: String,
    pub checked: usize,
    pub failures: Vec<IntertwiningFailure>,
}

impl IntertwiningReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One JSON object per failure, or a single passing entry.
    pub fn to_json(&self) -> Value {
        if self.failures.is_empty() {
            return json!([{
                "case": self.case,
                "generator": Value::Null,
                "basis_form": Value::Null,
                "residual_nonzero": false,
                "residual": Value::Null,
            }]);
        }
        Value::Array(
            self.failures
                .iter()
                .map(|f| {
                    json!({
                        "case": self.case,
                        "generator": f.generator.to_string(),
                        "basis_form": f.basis_form.to_json(),
                        "residual_nonzero": true,
                        "residual": f.residual.to_json(),
                    })
                })
                .collect(),
        )
    }
}

/// Checks `D act(lambda, p) = act(lambda - shift, q) D` for every tangential
/// generator on the monomial basis of degree at most `shift + 2`, with `lambda`
/// symbolic.  Collection stops after eight failures.
pub fn check_intertwining(d: &OpExpr, n: usize, p: usize, q: usize, shift: u32) -> Result<IntertwiningReport> {
    check_intertwining_at(d, n, p, q, shift, &Scalar::lambda())
}

/// [`check_intertwining`] at a given weight (symbolic or numeric).
pub fn check_intertwining_at(
    d: &OpExpr,
    n: usize,
    p: usize,
    q: usize,
    shift: u32,
    lambda: &Scalar,
) -> Result<IntertwiningReport> {
    let src = d.source();
    let tgt = d.target();
    if src.ambient_dim != n || src.degree != p as i32 || tgt.degree != q as i32 || tgt.form_dim() != n - 1 {
        return Err(Error::Signature(format!("operator {src} -> {tgt} does not map {p}-forms on R^{n} to {q}-forms on R^{}", n - 1)));
    }
    let op: CompiledOp = d.compiled();
    let target_lambda = lambda - &Scalar::from_int(shift as i64);
    let gens = Generator::tangential(n);
    let mut report = IntertwiningReport { case: format!("{src} -> {tgt}, order {shift}"), checked: 0, failures: Vec::new() };
    for w in monomial_basis(n, p, shift + 2) {
        let dw = op.apply(&w)?;
        for &g in &gens {
            let left = op.apply(&act(lambda, g, &w)?)?;
            let right = act(&target_lambda, g, &dw)?;
            let res = left.sub(&right)?;
            report.checked += 1;
            if !res.is_zero() {
                report.failures.push(IntertwiningFailure { generator: g, basis_form: w.clone(), residual: res });
                if report.failures.len() >= 8 {
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// `[act(a), act(b)]` applied to `w`.
pub fn bracket(lambda: &Scalar, a: Generator, b: Generator, w: &PolyForm) -> Result<PolyForm> {
    let ab = act(lambda, a, &act(lambda, b, w)?)?;
    let ba = act(lambda, b, &act(lambda, a, w)?)?;
    ab.sub(&ba)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{MultiIndex, Mono};
    use crate::operators::families::{family_first, family_second};

    fn x(n: usize, exps: &[u32], axes: &[usize]) -> PolyForm {
        PolyForm::basis(n, MultiIndex::from_axes(axes).unwrap(), Mono::from_exponents(exps).unwrap())
    }

    #[test]
    fn documented_actions() {
        let lam = Scalar::lambda();
        let one = x(3, &[0, 0, 0], &[]);
        let out = act(&lam, Generator::Eplus(1), &one).unwrap();
        assert_eq!(out, PolyForm::term(3, MultiIndex::empty(), Mono::var(1), -Scalar::lambda()));
        let xj = x(3, &[0, 1, 0], &[]);
        assert_eq!(act(&lam, Generator::Eminus(1), &xj).unwrap(), one);
        let w = x(3, &[0, 0, 0], &[2]);
        let out = act(&lam, Generator::Eplus(0), &w).unwrap();
        assert_eq!(out.coeff(MultiIndex::single(0)).terms().get(&Mono::var(2)), Some(&Scalar::one()));
    }

    #[test]
    fn fourier_examples() {
        let lam = Scalar::lambda();
        let xin = x(3, &[0, 0, 1], &[]);
        for j in 0..2 {
            assert!(fourier_p(&lam, j, &xin).unwrap().is_zero());
        }
        let xij = x(3, &[1, 0, 0], &[]);
        assert_eq!(fourier_p(&lam, 0, &xij).unwrap(), PolyForm::term(3, MultiIndex::empty(), Mono::one(), lam));
    }

    #[test]
    fn grading_bracket() {
        let lam = Scalar::lambda();
        for w in monomial_basis(3, 1, 2) {
            for j in 0..3 {
                let b = bracket(&lam, Generator::GradingE, Generator::Eplus(j), &w).unwrap();
                assert_eq!(b, act(&lam, Generator::Eplus(j), &w).unwrap());
            }
        }
    }

    #[test]
    fn low_order_intertwiners() {
        for p in 0..3 {
            let d0 = family_first(3, p, 0).unwrap();
            assert!(check_intertwining(&d0, 3, p, p, 0).unwrap().passed());
            let d1 = family_first(3, p, 1).unwrap();
            assert!(check_intertwining(&d1, 3, p, p, 1).unwrap().passed());
        }
        let d = family_second(3, 2, 1).unwrap();
        assert!(check_intertwining(&d, 3, 2, 1, 1).unwrap().passed());
        let shifted = family_first(3, 1, 0).unwrap();
        assert!(!check_intertwining(&shifted, 3, 1, 1, 1).unwrap().passed());
    }
}
