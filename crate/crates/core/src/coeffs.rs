//! Coefficient families: Pochhammer symbols, terminating hypergeometric
//! sums, Gegenbauer and Jacobi polynomials, and the coefficients
//! `a`, `b`, `alpha`, `beta`, `gamma` that enter every operator family.
//!
//! Every coefficient is a [`Scalar`], i.e. an exact polynomial in `lambda`.
//! The dimension `n` is an explicit parameter throughout.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::{binomial, factorial, GaussianRational, Rational, Scalar};

/// A polynomial in an auxiliary variable (`z` or `t`) with [`Scalar`]
/// coefficients, ascending powers, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UniPoly(Vec<Scalar>);

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn constant(c: Scalar) -> Self {
        UniPoly::new(vec![c])
    }

    /// The variable itself.
    pub fn var() -> Self {
        UniPoly::new(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(|s| s.is_zero()) {
            c.pop();
        }
        UniPoly(c)
    }

    /// `c * var^k`.
    pub fn monomial(k: usize, c: Scalar) -> Self {
        let mut v = vec![Scalar::zero(); k + 1];
        v[k] = c;
        UniPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn scale(&self, s: &Scalar) -> UniPoly {
        UniPoly::new(self.0.iter().map(|c| c * s).collect())
    }

    /// Formal derivative in the auxiliary variable.
    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Scalar::from_int(k as i64))
                .collect(),
        )
    }

    /// Multiplies by `var^k`.
    pub fn shift_up(&self, k: usize) -> UniPoly {
        if self.is_zero() {
            return UniPoly::zero();
        }
        let mut v = vec![Scalar::zero(); k];
        v.extend(self.0.iter().cloned());
        UniPoly::new(v)
    }

    /// Substitutes `var -> a*var + b`.
    pub fn compose_affine(&self, a: &Scalar, b: &Scalar) -> UniPoly {
        let inner = UniPoly::new(vec![b.clone(), a.clone()]);
        let mut acc = UniPoly::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * &inner) + &UniPoly::constant(c.clone());
        }
        acc
    }

    /// Applies a map to every coefficient.
    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> UniPoly {
        UniPoly::new(self.0.iter().map(f).collect())
    }

    /// Evaluates the auxiliary variable at a Scalar.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let len = self.0.len().max(rhs.0.len());
        UniPoly::new((0..len).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let len = self.0.len().max(rhs.0.len());
        UniPoly::new((0..len).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }
}

fn q(num: i64, den: i64) -> Scalar {
    Scalar::frac(num, den)
}

fn int(k: i64) -> Scalar {
    Scalar::from_int(k)
}

fn rat(r: Rational) -> Scalar {
    Scalar::from_rational(r)
}

/// `2*lambda + c` for an integer `c`.
fn two_lambda_plus(c: i64) -> Scalar {
    Scalar::linear(Rational::from_int(2), Rational::from_int(c))
}

/// Rising factorial `(a)_l = a(a+1)…(a+l-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Scalar, l: u32) -> Scalar {
    let mut acc = Scalar::one();
    for k in 0..l {
        acc = &acc * &(a + &int(k as i64));
    }
    acc
}

/// `prefactor * 2F1(-m, b; c; z)` as a polynomial in `z`.
///
/// Each term `prefactor * (-m)_k (b)_k / ((c)_k k!)` is formed by exact
/// polynomial division, so the prefactor must absorb the denominators.
/// With a constant `c` the division is by a nonzero number.
pub fn f21_terminating(m: u32, b: &Scalar, c: &Scalar, prefactor: &Scalar) -> Result<UniPoly> {
    let minus_m = int(-(m as i64));
    let mut out = Vec::with_capacity(m as usize + 1);
    for k in 0..=m {
        let num = &(&(prefactor * &pochhammer(&minus_m, k)) * &pochhammer(b, k)) * &rat(factorial(k).recip()?);
        let den = pochhammer(c, k);
        out.push(num.checked_div(&den)?);
    }
    Ok(UniPoly::new(out))
}

/// Gegenbauer polynomial `C_m^alpha(z)` via its explicit Taylor expansion.
pub fn gegenbauer_c(m: u32, alpha: &Scalar) -> UniPoly {
    let mut out = vec![Scalar::zero(); m as usize + 1];
    for k in 0..=m / 2 {
        let pow = m - 2 * k;
        let c = &pochhammer(alpha, m - k)
            * &rat(&(&factorial(k) * &factorial(pow)).recip().expect("nonzero")
                * &Rational::from_int(2).pow(pow));
        out[pow as usize] = if k % 2 == 0 { c } else { -c };
    }
    UniPoly::new(out)
}

/// Jacobi polynomial `P_m^{(alpha, beta)}(z)`.
pub fn jacobi_p(m: u32, alpha: &Scalar, beta: &Scalar) -> Result<UniPoly> {
    let a1 = alpha + &Scalar::one();
    let b = &(&a1 + beta) + &int(m as i64);
    let pre = &pochhammer(&a1, m) * &rat(factorial(m).recip()?);
    let in_x = f21_terminating(m, &b, &a1, &pre)?;
    Ok(in_x.compose_affine(&q(-1, 2), &q(1, 2)))
}

fn check_range(j: u32, top: u32, what: &str) -> Result<()> {
    if j > top {
        return Err(Error::Range(format!("{what} index {j} exceeds {top}")));
    }
    Ok(())
}

/// Even Gegenbauer coefficient `a_j^{(N)}(lambda)` in dimension `n`, normalized by `a_N^{(N)} = 1`.
pub fn a(big_n: u32, j: u32, n: i64) -> Result<Scalar> {
    check_range(j, big_n, "a")?;
    let nn = big_n as i64;
    let mut acc = rat(
        &(&Rational::from_int(-2).pow(big_n - j) * &factorial(big_n))
            * &(&factorial(j) * &factorial(2 * (big_n - j))).recip()?,
    );
    for k in j..big_n {
        acc = &acc * &two_lambda_plus(-4 * nn + 2 * k as i64 + n + 1);
    }
    Ok(acc)
}

/// Odd Gegenbauer coefficient `b_j^{(N)}(lambda)` in dimension `n`, normalized by `b_N^{(N)} = 1`.
pub fn b(big_n: u32, j: u32, n: i64) -> Result<Scalar> {
    check_range(j, big_n, "b")?;
    let nn = big_n as i64;
    let mut acc = rat(
        &(&Rational::from_int(-2).pow(big_n - j) * &factorial(big_n))
            * &(&factorial(j) * &factorial(2 * (big_n - j) + 1)).recip()?,
    );
    for k in j..big_n {
        acc = &acc * &two_lambda_plus(-4 * nn + 2 * k as i64 + n - 1);
    }
    Ok(acc)
}

/// `a_j^{(N)}` with the out-of-range convention `a_j = 0` for `j < 0` or `j > N`.
pub fn a_or_zero(big_n: i64, j: i64, n: i64) -> Scalar {
    if big_n < 0 || j < 0 || j > big_n {
        Scalar::zero()
    } else {
        a(big_n as u32, j as u32, n).expect("in range")
    }
}

/// `b_j^{(N)}` with the out-of-range convention `b_j = 0`.
pub fn b_or_zero(big_n: i64, j: i64, n: i64) -> Scalar {
    if big_n < 0 || j < 0 || j > big_n {
        Scalar::zero()
    } else {
        b(big_n as u32, j as u32, n).expect("in range")
    }
}

/// Closed Pochhammer-quotient form of `a_j^{(N)}`, used as an independent check.
pub fn a_closed(big_n: u32, j: u32, n: i64) -> Result<Scalar> {
    check_range(j, big_n, "a")?;
    if j == big_n {
        return Ok(Scalar::one());
    }
    let base = Scalar::lambda_plus_q(&Rational::frac(n, 2) - &Rational::frac(4 * big_n as i64 - 1, 2));
    let ratio = pochhammer(&base, big_n).checked_div(&pochhammer(&base, j))?;
    let c = &(&Rational::from_int(-4).pow(big_n - j) * &factorial(big_n))
        * &(&factorial(j) * &factorial(2 * (big_n - j))).recip()?;
    Ok(&ratio * &rat(c))
}

/// Closed Pochhammer-quotient form of `b_j^{(N)}`.
pub fn b_closed(big_n: u32, j: u32, n: i64) -> Result<Scalar> {
    check_range(j, big_n, "b")?;
    if j == big_n {
        return Ok(Scalar::one());
    }
    let base = Scalar::lambda_plus_q(&Rational::frac(n, 2) - &Rational::frac(4 * big_n as i64 + 1, 2));
    let ratio = pochhammer(&base, big_n).checked_div(&pochhammer(&base, j))?;
    let c = &(&Rational::from_int(-4).pow(big_n - j) * &factorial(big_n))
        * &(&factorial(j) * &factorial(2 * (big_n - j) + 1)).recip()?;
    Ok(&ratio * &rat(c))
}

fn sign_scalar(k: u32) -> Scalar {
    if k % 2 == 0 {
        Scalar::one()
    } else {
        int(-1)
    }
}

/// `alpha_i^{(N)}(lambda)` in dimension `n`.
pub fn alpha(big_n: u32, i: u32, n: i64) -> Result<Scalar> {
    check_range(i, big_n, "alpha")?;
    let nn = big_n as i64;
    let c = &(&(&Rational::from_int(2).pow(big_n) * &factorial(big_n)) * &factorial(2 * big_n).recip()?)
        * &binomial(big_n, i);
    let mut acc = &sign_scalar(i) * &rat(c);
    for k in (i + 1)..=big_n {
        acc = &acc * &two_lambda_plus(n - 2 * k as i64);
    }
    for k in 1..=i {
        acc = &acc * &two_lambda_plus(n - 2 * k as i64 - 2 * nn + 1);
    }
    Ok(acc)
}

/// `beta_i^{(N)}(lambda)` in dimension `n`.
pub fn beta(big_n: u32, i: u32, n: i64) -> Result<Scalar> {
    check_range(i, big_n, "beta")?;
    let nn = big_n as i64;
    let c = &(&(&Rational::from_int(2).pow(big_n) * &factorial(big_n)) * &factorial(2 * big_n + 1).recip()?)
        * &binomial(big_n, i);
    let mut acc = &sign_scalar(i) * &rat(c);
    for k in (i + 1)..=big_n {
        acc = &acc * &two_lambda_plus(n - 2 * k as i64);
    }
    for k in 1..=i {
        acc = &acc * &two_lambda_plus(n - 2 * k as i64 - 2 * nn - 1);
    }
    Ok(acc)
}

/// `gamma_i^{(N)}(lambda; p)` in dimension `n`, for `1 <= i <= N`.
pub fn gamma(big_n: u32, i: u32, p: i64, n: i64) -> Result<Scalar> {
    if i == 0 {
        return Err(Error::Range("gamma index starts at 1".into()));
    }
    check_range(i, big_n, "gamma")?;
    let nn = big_n as i64;
    let ii = i as i64;
    let c = &(&(&Rational::from_int(2).pow(big_n) * &factorial(big_n))
        * &(&Rational::from_int(nn + 1) * &factorial(2 * big_n + 1)).recip()?)
        * &binomial(big_n + 1, i);
    let bracket = &(&(&Scalar::lambda_plus(p - 2 * nn - 1) * &int(nn + 1)) * &two_lambda_plus(n - 2 * ii))
        + &(&Scalar::lambda_plus(n - p) * &int((2 * nn + 1) * (nn - ii + 1)));
    let mut acc = &(&sign_scalar(i) * &rat(c)) * &bracket;
    for k in (i + 1)..=big_n {
        acc = &acc * &two_lambda_plus(n - 2 * k as i64);
    }
    for k in 1..i {
        acc = &acc * &two_lambda_plus(n - 2 * k as i64 - 2 * nn - 1);
    }
    Ok(acc)
}

/// The summands `gamma^{(N),+}` (`plus = true`) and `gamma^{(N),-}` of `gamma`.
pub fn gamma_pm(big_n: u32, i: u32, p: i64, n: i64, plus: bool) -> Result<Scalar> {
    if i == 0 {
        return Err(Error::Range("gamma index starts at 1".into()));
    }
    check_range(i, big_n, "gamma")?;
    let nn = big_n as i64;
    let mut acc = if plus {
        let c = &(&(&Rational::from_int(2).pow(big_n) * &factorial(big_n)) * &factorial(2 * big_n + 1).recip()?)
            * &binomial(big_n + 1, i);
        let mut acc = &(&sign_scalar(i) * &rat(c)) * &Scalar::lambda_plus(p - 2 * nn - 1);
        for k in i..=big_n {
            acc = &acc * &two_lambda_plus(n - 2 * k as i64);
        }
        acc
    } else {
        let c = &(&(&Rational::from_int(2).pow(big_n) * &factorial(big_n)) * &factorial(2 * big_n).recip()?)
            * &binomial(big_n, i);
        let mut acc = &(&sign_scalar(i) * &rat(c)) * &Scalar::lambda_plus(n - p);
        for k in (i + 1)..=big_n {
            acc = &acc * &two_lambda_plus(n - 2 * k as i64);
        }
        acc
    };
    for k in 1..i {
        acc = &acc * &two_lambda_plus(n - 2 * k as i64 - 2 * nn - 1);
    }
    Ok(acc)
}

/// `sum_j a_j^{(N)}(lambda) (-1)^j z^{2N-2j}` as a polynomial in `z`.
pub fn even_gegenbauer_sum(big_n: u32, n: i64) -> UniPoly {
    let mut out = UniPoly::zero();
    for j in 0..=big_n {
        let c = &sign_scalar(j) * &a(big_n, j, n).expect("in range");
        out = &out + &UniPoly::monomial((2 * big_n - 2 * j) as usize, c);
    }
    out
}

/// `sum_j b_j^{(N)}(lambda) (-1)^j z^{2N+1-2j}`.
pub fn odd_gegenbauer_sum(big_n: u32, n: i64) -> UniPoly {
    let mut out = UniPoly::zero();
    for j in 0..=big_n {
        let c = &sign_scalar(j) * &b(big_n, j, n).expect("in range");
        out = &out + &UniPoly::monomial((2 * big_n + 1 - 2 * j) as usize, c);
    }
    out
}

/// The Gegenbauer order `-lambda - (n-1)/2` attached to dimension `n`.
pub fn gegenbauer_order(n: i64) -> Scalar {
    Scalar::linear(Rational::from_int(-1), Rational::frac(1 - n, 2))
}

/// Evaluates a Scalar at a rational `lambda`.
pub fn at(s: &Scalar, x: &Rational) -> GaussianRational {
    s.eval_at(&GaussianRational::real(x.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert!(pochhammer(&Scalar::lambda(), 0).is_one());
        assert_eq!(pochhammer(&int(3), 2), int(12));
        assert_eq!(pochhammer(&Scalar::lambda(), 2), &(&Scalar::lambda() * &Scalar::lambda()) + &Scalar::lambda());
    }

    #[test]
    fn hypergeometric_examples() {
        let bb = Scalar::lambda_plus(2);
        let cc = int(5);
        let one = f21_terminating(1, &bb, &cc, &Scalar::one()).unwrap();
        assert_eq!(one, UniPoly::new(vec![Scalar::one(), -(&bb * &q(1, 5))]));
        assert_eq!(f21_terminating(0, &bb, &cc, &Scalar::one()).unwrap(), UniPoly::constant(Scalar::one()));
        for m in 0..5u32 {
            let c = Scalar::lambda_plus(7);
            let b = int(3);
            let val = f21_terminating(m, &b, &c, &pochhammer(&c, m)).unwrap().eval(&Scalar::one());
            assert_eq!(val, pochhammer(&(&c - &b), m));
        }
    }

    #[test]
    fn gegenbauer_examples() {
        let al = Scalar::lambda();
        let c2 = gegenbauer_c(2, &al);
        let expect = UniPoly::new(vec![-al.clone(), Scalar::zero(), &(&int(2) * &al) * &Scalar::lambda_plus(1)]);
        assert_eq!(c2, expect);
        assert_eq!(gegenbauer_c(0, &al), UniPoly::constant(Scalar::one()));
    }

    #[test]
    fn low_coefficients() {
        let n = 4;
        assert!(a(1, 1, n).unwrap().is_one());
        assert_eq!(a(1, 0, n).unwrap(), -two_lambda_plus(n - 3));
        assert_eq!(b(1, 0, n).unwrap(), &q(-1, 3) * &two_lambda_plus(n - 5));
        assert_eq!(alpha(2, 1, n).unwrap(), &(&q(-2, 3) * &two_lambda_plus(n - 4)) * &two_lambda_plus(n - 5));
        assert_eq!(beta(1, 0, n).unwrap(), &q(1, 3) * &two_lambda_plus(n - 2));
        assert!(a(1, 2, n).is_err());
    }
}
