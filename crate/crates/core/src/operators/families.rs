//! Builders for the symmetry breaking families and the operators they factor through.
//!
//! Families of the first and second type carry `lambda` symbolically.  Third and
//! fourth type operators only exist at one value of `lambda`; their coefficients
//! are evaluated there and [`FamilySpec::fixed_lambda`] reports that value.

use crate::coeffs;
use crate::error::{Error, Result};
use crate::operators::{Atom, OpExpr, Sig};
use crate::scalars::{GaussianRational, Rational, Scalar};

use Atom::{Delta as DL, InsertNormal as IN, Lap, Pullback as PB, D, Dn};

/// Which theorem's form a builder follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Presentation {
    /// Powers of the Laplacian and normal derivatives.
    Normal,
    /// Compositions of `d`, `delta`, `dbar`, `deltabar` around the pullback.
    Geometric,
}

/// Parameters selecting one operator of one family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub family_type: u8,
    pub n: usize,
    pub p: usize,
    pub order: u32,
    pub presentation: Presentation,
}

impl FamilySpec {
    pub fn new(family_type: u8, n: usize, p: usize, order: u32, presentation: Presentation) -> Self {
        FamilySpec { family_type, n, p, order, presentation }
    }

    /// Checks the degree and order window of the family.
    pub fn validate(&self) -> Result<()> {
        let (n, p, m) = (self.n, self.p, self.order);
        if n < 2 || n > 8 {
            return Err(Error::Range(format!("ambient dimension {n} outside 2..=8")));
        }
        let ok = match self.family_type {
            1 => p < n,
            2 => (1..=n).contains(&p),
            3 => m >= 1 && ((p == 0) || (m == 1 && p + 2 <= n)),
            4 => m >= 1 && ((p == n) || (m == 1 && (2..=n).contains(&p))),
            t => return Err(Error::Range(format!("family type {t} not in 1..=4"))),
        };
        if !ok {
            return Err(match self.family_type {
                1 | 2 => Error::Range(format!("degree {p} outside the range of type {} on R^{n}", self.family_type)),
                _ => Error::Unsupported(format!(
                    "no type-{} operator of order {m} on {p}-forms of R^{n}",
                    self.family_type
                )),
            });
        }
        Ok(())
    }

    pub fn source(&self) -> Sig {
        Sig::ambient(self.n, self.p as i32)
    }

    pub fn target(&self) -> Sig {
        let p = self.p as i32;
        let q = match self.family_type {
            1 => p,
            2 => p - 1,
            3 => p + 1,
            _ => p - 2,
        };
        Sig::slice(self.n, q)
    }

    /// The value of `lambda` at which a type 3 or 4 operator is equivariant.
    pub fn fixed_lambda(&self) -> Option<Rational> {
        let (n, p, m) = (self.n as i64, self.p as i64, self.order as i64);
        match self.family_type {
            3 if p == 0 => Some(Rational::from_int(m - 1)),
            3 => Some(Rational::from_int(-p)),
            4 if p == n => Some(Rational::from_int(m - 1)),
            4 => Some(Rational::from_int(p - n)),
            _ => None,
        }
    }
}

fn rep(block: &[Atom], k: u32) -> Vec<Atom> {
    let mut out = Vec::with_capacity(block.len() * k as usize);
    for _ in 0..k {
        out.extend_from_slice(block);
    }
    out
}

fn cat(parts: &[&[Atom]]) -> Vec<Atom> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

fn int(k: i64) -> Scalar {
    Scalar::from_int(k)
}

fn sgn(k: i64) -> Scalar {
    int(if k.rem_euclid(2) == 0 { 1 } else { -1 })
}

/// `s(lambda + c)`.
fn shifted(s: &Scalar, c: i64) -> Scalar {
    s.shift(&Rational::from_int(c))
}

/// `s` evaluated at the rational point `x`, as a constant.
pub(crate) fn value_at(s: &Scalar, x: &Rational) -> Scalar {
    Scalar::constant(s.eval_at(&GaussianRational::real(x.clone())))
}

/// Accumulates `c * word` summands of one signature, skipping zero coefficients.
struct Terms {
    source: Sig,
    target: Sig,
    parts: Vec<OpExpr>,
}

impl Terms {
    fn new(source: Sig, target: Sig) -> Self {
        Terms { source, target, parts: Vec::new() }
    }

    fn push(&mut self, c: Scalar, atoms: Vec<Atom>) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let e = OpExpr::chain(self.source, &atoms)?;
        if e.target() != self.target {
            return Err(Error::Signature(format!("summand lands in {} instead of {}", e.target(), self.target)));
        }
        self.parts.push(if c.is_one() { e } else { OpExpr::scale(c, e) });
        Ok(())
    }

    fn finish(self) -> Result<OpExpr> {
        if self.parts.len() == 1 {
            return Ok(self.parts.into_iter().next().expect("one part"));
        }
        OpExpr::sum_typed(self.parts, self.source, self.target)
    }
}

/// Builds any family member.
pub fn family(spec: &FamilySpec) -> Result<OpExpr> {
    spec.validate()?;
    let geo = spec.presentation == Presentation::Geometric && spec.order > 0;
    match (spec.family_type, geo) {
        (1, false) => first_normal(spec),
        (1, true) => first_geometric(spec),
        (2, false) => second_normal(spec),
        (2, true) => second_geometric(spec),
        (3, _) => third(spec),
        _ => fourth(spec),
    }
}

/// First type family `D_N^{(p -> p)}(lambda)` in normal presentation.
pub fn family_first(n: usize, p: usize, order: u32) -> Result<OpExpr> {
    family(&FamilySpec::new(1, n, p, order, Presentation::Normal))
}

/// Second type family `D_N^{(p -> p-1)}(lambda)` in normal presentation.
pub fn family_second(n: usize, p: usize, order: u32) -> Result<OpExpr> {
    family(&FamilySpec::new(2, n, p, order, Presentation::Normal))
}

/// Third type operator `D_N^{(p -> p+1)}` (at its fixed `lambda`).
pub fn family_third(n: usize, p: usize, order: u32) -> Result<OpExpr> {
    family(&FamilySpec::new(3, n, p, order, Presentation::Normal))
}

/// Fourth type operator `D_N^{(p -> p-2)}` (at its fixed `lambda`).
pub fn family_fourth(n: usize, p: usize, order: u32) -> Result<OpExpr> {
    family(&FamilySpec::new(4, n, p, order, Presentation::Normal))
}

fn first_normal(s: &FamilySpec) -> Result<OpExpr> {
    let (n, p) = (s.n as i64, s.p as i64);
    let mut t = Terms::new(s.source(), s.target());
    let lam_p = |c: i64| Scalar::lambda_plus(p + c);
    if s.order % 2 == 0 {
        let nn = s.order / 2;
        let big = nn as i64;
        for j in 0..=nn {
            let jj = j as i64;
            let lap = rep(&[Lap], j);
            let pj = &lam_p(-2 * big) * &coeffs::a(nn, j, n)?;
            t.push(&sgn(big - jj) * &pj, cat(&[&lap, &[PB], &rep(&[Dn], 2 * (nn - j))]))?;
            if j < nn {
                let qj = &(&int(-2 * big) * &Scalar::linear(Rational::from_int(2), Rational::from_int(n - 2 * big - 1)))
                    * &shifted(&coeffs::b(nn - 1, j, n)?, -1);
                t.push(&sgn(big - jj) * &qj, cat(&[&lap, &[D, IN], &rep(&[Dn], 2 * (nn - j) - 1)]))?;
                let rj = &int(2 * big) * &shifted(&coeffs::a(nn - 1, j, n)?, -1);
                t.push(&sgn(big - jj - 1) * &rj, cat(&[&lap, &[D, DL, PB], &rep(&[Dn], 2 * (nn - j) - 2)]))?;
            }
        }
    } else {
        let nn = (s.order - 1) / 2;
        let big = nn as i64;
        for j in 0..=nn {
            let jj = j as i64;
            let lap = rep(&[Lap], j);
            let pj = &lam_p(-2 * big - 1) * &coeffs::b(nn, j, n)?;
            t.push(&sgn(big - jj) * &pj, cat(&[&lap, &[PB], &rep(&[Dn], 2 * (nn - j) + 1)]))?;
            let qj = shifted(&coeffs::a(nn, j, n)?, -1);
            t.push(&sgn(big - jj) * &qj, cat(&[&lap, &[D, IN], &rep(&[Dn], 2 * (nn - j))]))?;
            if j < nn {
                let rj = &int(2 * big) * &shifted(&coeffs::b(nn - 1, j, n)?, -1);
                t.push(&sgn(big - jj - 1) * &rj, cat(&[&lap, &[D, DL, PB], &rep(&[Dn], 2 * (nn - j) - 1)]))?;
            }
        }
    }
    t.finish()
}

fn second_normal(s: &FamilySpec) -> Result<OpExpr> {
    let (n, p) = (s.n as i64, s.p as i64);
    let mut t = Terms::new(s.source(), s.target());
    if s.order % 2 == 0 {
        let nn = s.order / 2;
        let big = nn as i64;
        for j in 0..=nn {
            let jj = j as i64;
            let lap = rep(&[Lap], j);
            let pj = &Scalar::lambda_plus(n - p - 2 * big + 2 * jj) * &coeffs::a(nn, j, n)?;
            t.push(&sgn(big - jj + 1) * &pj, cat(&[&lap, &[IN], &rep(&[Dn], 2 * (nn - j))]))?;
            if j < nn {
                let qj = &(&int(-2 * big) * &Scalar::linear(Rational::from_int(2), Rational::from_int(n - 2 * big - 1)))
                    * &shifted(&coeffs::b(nn - 1, j, n)?, -1);
                t.push(&sgn(big - jj - 1) * &qj, cat(&[&lap, &[DL, PB], &rep(&[Dn], 2 * (nn - j) - 1)]))?;
                let rj = &int(2 * big) * &shifted(&coeffs::a(nn - 1, j, n)?, -1);
                t.push(&sgn(big - jj - 1) * &rj, cat(&[&lap, &[D, DL, IN], &rep(&[Dn], 2 * (nn - j) - 2)]))?;
            }
        }
    } else {
        let nn = (s.order - 1) / 2;
        let big = nn as i64;
        for j in 0..=nn {
            let jj = j as i64;
            let lap = rep(&[Lap], j);
            let pj = &Scalar::lambda_plus(n - p - 2 * big + 2 * jj - 1) * &coeffs::b(nn, j, n)?;
            t.push(&sgn(big - jj + 1) * &pj, cat(&[&lap, &[IN], &rep(&[Dn], 2 * (nn - j) + 1)]))?;
            let qj = shifted(&coeffs::a(nn, j, n)?, -1);
            t.push(&sgn(big - jj - 1) * &qj, cat(&[&lap, &[DL, PB], &rep(&[Dn], 2 * (nn - j))]))?;
            if j < nn {
                let rj = &int(2 * big) * &shifted(&coeffs::b(nn - 1, j, n)?, -1);
                t.push(&sgn(big - jj - 1) * &rj, cat(&[&lap, &[D, DL, IN], &rep(&[Dn], 2 * (nn - j) - 1)]))?;
            }
        }
    }
    t.finish()
}

const DD: [Atom; 2] = [D, DL];
const DDB: [Atom; 2] = [DL, D];

fn first_geometric(s: &FamilySpec) -> Result<OpExpr> {
    let (n, p) = (s.n as i64, s.p as i64);
    let mut t = Terms::new(s.source(), s.target());
    let lam_p = |c: i64| Scalar::lambda_plus(p + c);
    if s.order % 2 == 0 {
        let nn = s.order / 2;
        let big = nn as i64;
        for i in 0..=nn {
            let al = coeffs::alpha(nn, i, n)?;
            t.push(&lam_p(0) * &al, cat(&[&rep(&DD, nn - i), &[PB], &rep(&DD, i)]))?;
            if i >= 1 && i < nn {
                t.push(&lam_p(-2 * i as i64) * &al, cat(&[&rep(&DD, nn - i), &[PB], &rep(&DDB, i)]))?;
            }
            t.push(&lam_p(-2 * big) * &al, cat(&[&rep(&DDB, nn - i), &[PB], &rep(&DDB, i)]))?;
        }
    } else {
        let nn = (s.order - 1) / 2;
        let big = nn as i64;
        for i in 0..=nn {
            let be = coeffs::beta(nn, i, n)?;
            if i >= 1 {
                let g = coeffs::gamma(nn, i, p, n)?;
                t.push(g, cat(&[&rep(&DD, nn - i), &[D, IN], &rep(&DDB, i)]))?;
            }
            t.push(&lam_p(0) * &be, cat(&[&rep(&DD, nn - i), &[D, IN], &rep(&DD, i)]))?;
            t.push(&lam_p(-2 * big - 1) * &be, cat(&[&rep(&DDB, nn - i), &[IN, D], &rep(&DDB, i)]))?;
        }
    }
    t.finish()
}

fn second_geometric(s: &FamilySpec) -> Result<OpExpr> {
    let (n, p) = (s.n as i64, s.p as i64);
    let mut t = Terms::new(s.source(), s.target());
    let lam_q = |c: i64| Scalar::lambda_plus(n - p + c);
    if s.order % 2 == 0 {
        let nn = s.order / 2;
        let big = nn as i64;
        for i in 0..=nn {
            let al = coeffs::alpha(nn, i, n)?;
            t.push(-(&lam_q(-2 * big) * &al), cat(&[&rep(&DD, nn - i), &[IN], &rep(&DD, i)]))?;
            if i >= 1 && i < nn {
                t.push(-(&lam_q(-2 * i as i64) * &al), cat(&[&rep(&DDB, nn - i), &[IN], &rep(&DD, i)]))?;
            }
            t.push(-(&lam_q(0) * &al), cat(&[&rep(&DDB, nn - i), &[IN], &rep(&DDB, i)]))?;
        }
    } else {
        let nn = (s.order - 1) / 2;
        let big = nn as i64;
        for i in 0..=nn {
            let be = coeffs::beta(nn, i, n)?;
            if i >= 1 {
                let g = coeffs::gamma(nn, i, n - p, n)?;
                t.push(-g, cat(&[&rep(&DDB, nn - i), &[DL, PB], &rep(&DD, i)]))?;
            }
            t.push(&lam_q(-2 * big - 1) * &be, cat(&[&rep(&DD, nn - i), &[PB, DL], &rep(&DD, i)]))?;
            t.push(-(&lam_q(0) * &be), cat(&[&rep(&DDB, nn - i), &[DL, PB], &rep(&DDB, i)]))?;
        }
    }
    t.finish()
}

fn third(s: &FamilySpec) -> Result<OpExpr> {
    let n = s.n as i64;
    let mut t = Terms::new(s.source(), s.target());
    if s.order == 1 {
        t.push(Scalar::one(), vec![D, PB])?;
        return t.finish();
    }
    let lam = s.fixed_lambda().expect("type 3 has a fixed lambda");
    let geo = s.presentation == Presentation::Geometric;
    if s.order % 2 == 0 {
        let nn = s.order / 2;
        let big = nn as i64;
        for j in 0..nn {
            if geo {
                let c = value_at(&coeffs::beta(nn - 1, j, n)?, &lam);
                let word = cat(&[&rep(&DD, nn - j - 1), &[D, IN, D], &rep(&DDB, j)]);
                t.push(c, word)?;
            } else {
                let c = value_at(&coeffs::b(nn - 1, j, n)?, &lam);
                let word = cat(&[&[D], &rep(&DDB, j), &[PB], &rep(&[Dn], 2 * (nn - j) - 1)]);
                t.push(&sgn(big - j as i64 - 1) * &c, word)?;
            }
        }
    } else {
        let nn = (s.order - 1) / 2;
        let big = nn as i64;
        for j in 0..=nn {
            if geo {
                let c = value_at(&coeffs::alpha(nn, j, n)?, &lam);
                t.push(c, cat(&[&rep(&DD, nn - j), &[D, PB], &rep(&DDB, j)]))?;
            } else {
                let c = value_at(&coeffs::a(nn, j, n)?, &lam);
                let word = cat(&[&[D], &rep(&DDB, j), &[PB], &rep(&[Dn], 2 * (nn - j))]);
                t.push(&sgn(big - j as i64) * &c, word)?;
            }
        }
    }
    t.finish()
}

fn fourth(s: &FamilySpec) -> Result<OpExpr> {
    let n = s.n as i64;
    let mut t = Terms::new(s.source(), s.target());
    if s.order == 1 && s.p < s.n {
        t.push(Scalar::one(), vec![DL, IN])?;
        return t.finish();
    }
    let lam = s.fixed_lambda().expect("type 4 has a fixed lambda");
    let geo = s.presentation == Presentation::Geometric;
    if s.order % 2 == 0 {
        let nn = s.order / 2;
        let big = nn as i64;
        for j in 0..nn {
            if geo {
                let c = value_at(&coeffs::beta(nn - 1, j, n)?, &lam);
                let word = cat(&[&rep(&DDB, nn - j - 1), &[DL, PB, DL], &rep(&DD, j)]);
                t.push(c, word)?;
            } else {
                let c = value_at(&coeffs::b(nn - 1, j, n)?, &lam);
                let word = cat(&[&[DL], &rep(&DD, j), &[IN], &rep(&[Dn], 2 * (nn - j) - 1)]);
                t.push(&sgn(big - j as i64) * &c, word)?;
            }
        }
    } else {
        let nn = (s.order - 1) / 2;
        let big = nn as i64;
        for j in 0..=nn {
            if geo {
                let c = value_at(&coeffs::alpha(nn, j, n)?, &lam);
                t.push(-c, cat(&[&rep(&DDB, nn - j), &[DL, IN], &rep(&DD, j)]))?;
            } else {
                let c = value_at(&coeffs::a(nn, j, n)?, &lam);
                let word = cat(&[&[DL], &rep(&DD, j), &[IN], &rep(&[Dn], 2 * (nn - j))]);
                t.push(&sgn(big - j as i64 + 1) * &c, word)?;
            }
        }
    }
    t.finish()
}

/// The three middle-degree situations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MiddleCase {
    /// `n` odd, `p = (n-1)/2`: project the image onto a `star`-eigenspace.
    OddLower,
    /// `n` odd, `p = (n+1)/2`: precompose with `star_bar`, then project.
    OddUpper,
    /// `n` even, `p = n/2`: restrict to a `star_bar`-eigenspace.
    Even,
}

/// A middle-degree variant: the case and the sign of the eigenspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MiddleVariant {
    pub case: MiddleCase,
    pub plus: bool,
}

impl MiddleVariant {
    /// Form degree of the source.
    pub fn source_degree(&self, n: usize) -> Result<usize> {
        match self.case {
            MiddleCase::OddLower | MiddleCase::OddUpper if n % 2 == 0 => {
                Err(Error::Range(format!("odd middle-degree case needs odd n, got {n}")))
            }
            MiddleCase::Even if n % 2 == 1 => Err(Error::Range(format!("even middle-degree case needs even n, got {n}"))),
            MiddleCase::OddLower => Ok((n - 1) / 2),
            MiddleCase::OddUpper => Ok((n + 1) / 2),
            MiddleCase::Even => Ok(n / 2),
        }
    }
}

/// `1/2 (1 ± mu^{-1} star)` on middle-degree forms, with `mu = 1` for even and `mu = i` for odd degree.
pub fn hodge_projection(sig: Sig, plus: bool) -> Result<OpExpr> {
    let dim = sig.form_dim();
    if dim % 2 == 1 || sig.degree * 2 != dim as i32 {
        return Err(Error::Range(format!("{sig} is not of middle degree")));
    }
    let mu_inv = if sig.degree % 2 == 0 { GaussianRational::one() } else { -GaussianRational::i() };
    let half = GaussianRational::frac(1, 2);
    let c = if plus { &half * &mu_inv } else { -(&half * &mu_inv) };
    let star = OpExpr::atom(Atom::Star, sig)?;
    OpExpr::sum(vec![
        OpExpr::scale(Scalar::constant(half), OpExpr::id(sig)),
        OpExpr::scale(Scalar::constant(c), star),
    ])
}

/// Middle-degree families built from the first type family of order `order`.
pub fn middle_degree(n: usize, variant: MiddleVariant, order: u32) -> Result<OpExpr> {
    let p = variant.source_degree(n)?;
    match variant.case {
        MiddleCase::OddLower => {
            let d = family_first(n, p, order)?;
            hodge_projection(d.target(), variant.plus)?.after(&d)
        }
        MiddleCase::OddUpper => {
            let d = family_first(n, p - 1, order)?;
            let star = OpExpr::atom(Atom::Star, Sig::ambient(n, p as i32))?;
            let pr = hodge_projection(d.target(), variant.plus)?;
            OpExpr::compose(vec![pr, d, star])
        }
        MiddleCase::Even => {
            let d = family_first(n, p, order)?;
            d.after(&hodge_projection(d.source(), variant.plus)?)
        }
    }
}

fn half_dim_plus(sig: Sig, c: i64) -> Scalar {
    Scalar::from_rational(&Rational::frac(sig.form_dim() as i64, 2) + &Rational::from_int(c))
}

/// Branson-Gover operator `(m/2-p+N)(delta d)^N + (m/2-p-N)(d delta)^N` on the forms described by `sig`.
pub fn branson_gover_on(sig: Sig, order_half: u32) -> Result<OpExpr> {
    let p = sig.degree as i64;
    let big = order_half as i64;
    let mut t = Terms::new(sig, sig);
    t.push(half_dim_plus(sig, -p + big), rep(&DDB, order_half))?;
    t.push(half_dim_plus(sig, -p - big), rep(&DD, order_half))?;
    if t.parts.is_empty() {
        return Ok(OpExpr::zero(sig, sig));
    }
    t.finish()
}

/// `L_{2N}^{(p)}` on `R^m`, realized on the slice of `R^{m+1}`.
pub fn branson_gover(m: usize, p: usize, order_half: u32) -> Result<OpExpr> {
    branson_gover_on(Sig::slice(m + 1, p as i32), order_half)
}

/// `Lbar_{2N}^{(p)}` on the ambient `R^n`.
pub fn branson_gover_bar(n: usize, p: usize, order_half: u32) -> Result<OpExpr> {
    branson_gover_on(Sig::ambient(n, p as i32), order_half)
}

/// `L_{2N}^{(p)} / (m/2-p+N)`, leading term `(delta d)^N`.
pub fn branson_gover_renormalized(sig: Sig, order_half: u32) -> Result<OpExpr> {
    let c = half_dim_plus(sig, -(sig.degree as i64) + order_half as i64);
    let inv = c.as_constant().ok_or(Error::DivisionByZero)?.recip()?;
    Ok(OpExpr::scale(Scalar::constant(inv), branson_gover_on(sig, order_half)?))
}

fn critical_power(m: usize, q: usize) -> Result<u32> {
    if m % 2 == 1 || 2 * q > m {
        return Err(Error::Range(format!("critical operators need even m and q <= m/2, got m={m}, q={q}")));
    }
    Ok((m / 2 - q) as u32)
}

/// Gauge companion `G^{(q)} = delta (d delta)^{m/2-q}` on `q`-forms of `R^m`, `m` even.
pub fn gauge_companion(m: usize, q: usize) -> Result<OpExpr> {
    let k = critical_power(m, q)?;
    OpExpr::chain(Sig::slice(m + 1, q as i32), &cat(&[&[DL], &rep(&DD, k)]))
}

/// Critical Q-curvature operator `Q^{(q)} = (d delta)^{m/2-q}` on closed `q`-forms of `R^m`, `m` even.
pub fn q_curvature_op(m: usize, q: usize) -> Result<OpExpr> {
    let k = critical_power(m, q)?;
    OpExpr::chain(Sig::slice(m + 1, q as i32), &rep(&DD, k))
}

/// Q-curvature polynomial `sum_i alpha_i (d delta)^{N-i} iota^* (dbar deltabar)^i`.
pub fn q_poly(n: usize, p: usize, order_half: u32) -> Result<OpExpr> {
    let src = Sig::ambient(n, p as i32);
    let mut t = Terms::new(src, Sig::slice(n, p as i32));
    for i in 0..=order_half {
        let al = coeffs::alpha(order_half, i, n as i64)?;
        t.push(al, cat(&[&rep(&DD, order_half - i), &[PB], &rep(&DD, i)]))?;
    }
    t.finish()
}

/// Renormalized even-order families evaluated at `lambda0`.
///
/// Type 1 divides by `lambda+p-2N`, type 2 by `lambda+n-p`.  When the divisor
/// vanishes at `lambda0` the quotient is the limit `D'(lambda0)` provided
/// `D(lambda0) = 0`; otherwise `None` is returned.
pub fn renormalized_family(family_type: u8, n: usize, p: usize, order: u32, lambda0: &Rational) -> Result<Option<OpExpr>> {
    if order % 2 == 1 {
        return Err(Error::Unsupported("renormalized families are even order".into()));
    }
    let spec = FamilySpec::new(family_type, n, p, order, Presentation::Normal);
    let d = family(&spec)?;
    let divisor = match family_type {
        1 => Scalar::lambda_plus(p as i64 - order as i64),
        2 => Scalar::lambda_plus(n as i64 - p as i64),
        _ => return Err(Error::Unsupported("renormalization applies to types 1 and 2".into())),
    };
    let x = GaussianRational::real(lambda0.clone());
    let dv = divisor.eval_at(&x);
    let at = d.specialize(&x);
    if !dv.is_zero() {
        return Ok(Some(OpExpr::scale(Scalar::constant(dv.recip()?), at)));
    }
    if !super::ops_equal(&at, &OpExpr::zero(at.source(), at.target()))? {
        return Ok(None);
    }
    Ok(Some(d.derivative().specialize(&x)))
}

/// First-order curved family of the first type at `H = 0`:
/// `mu iota^* i_n dbar + (mu+1) d iota^* i_n`.
pub fn curved_first(n: usize, p: usize) -> Result<OpExpr> {
    let src = Sig::ambient(n, p as i32);
    let mut t = Terms::new(src, Sig::slice(n, p as i32));
    t.push(Scalar::lambda(), vec![IN, D])?;
    t.push(Scalar::lambda_plus(1), vec![D, IN])?;
    t.finish()
}

/// First-order curved family of the second type at `H = 0`:
/// `(n-2p+mu+1) iota^* deltabar - (n-2p+mu+2) delta iota^*`.
pub fn curved_second(n: usize, p: usize) -> Result<OpExpr> {
    let src = Sig::ambient(n, p as i32);
    let c = n as i64 - 2 * p as i64;
    let mut t = Terms::new(src, Sig::slice(n, p as i32 - 1));
    t.push(Scalar::lambda_plus(c + 1), vec![PB, DL])?;
    t.push(-Scalar::lambda_plus(c + 2), vec![DL, PB])?;
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{MultiIndex, Mono, PolyForm};
    use crate::operators::ops_equal;

    #[test]
    fn zeroth_order() {
        let e = family_first(4, 2, 0).unwrap();
        let expect = OpExpr::scale(Scalar::lambda_plus(2), OpExpr::atom(PB, Sig::ambient(4, 2)).unwrap());
        assert_eq!(e, expect);
        let e = family_second(4, 1, 0).unwrap();
        let expect = OpExpr::scale(-Scalar::lambda_plus(3), OpExpr::atom(IN, Sig::ambient(4, 1)).unwrap());
        assert!(ops_equal(&e, &expect).unwrap());
    }

    #[test]
    fn first_order_on_xn_dx1() {
        let e = family_first(3, 1, 1).unwrap();
        let w = PolyForm::basis(3, MultiIndex::single(0), Mono::from_exponents(&[0, 0, 1]).unwrap());
        let out = e.apply(&w).unwrap();
        assert_eq!(out, PolyForm::term(2, MultiIndex::single(0), Mono::one(), Scalar::lambda()));
    }

    #[test]
    fn presentations_agree_small() {
        for t in 1..=2u8 {
            for order in 0..=3 {
                for p in 0..=3usize {
                    let normal = FamilySpec::new(t, 3, p, order, Presentation::Normal);
                    if normal.validate().is_err() {
                        continue;
                    }
                    let geo = FamilySpec { presentation: Presentation::Geometric, ..normal };
                    let a = family(&normal).unwrap();
                    let b = family(&geo).unwrap();
                    assert!(ops_equal(&a, &b).unwrap(), "type {t} p {p} order {order}");
                }
            }
        }
    }

    #[test]
    fn projections() {
        let s = Sig::slice(3, 1);
        let plus = hodge_projection(s, true).unwrap();
        let minus = hodge_projection(s, false).unwrap();
        assert!(ops_equal(&plus.plus(&minus).unwrap(), &OpExpr::id(s)).unwrap());
        assert!(ops_equal(&plus.after(&plus).unwrap(), &plus).unwrap());
        assert!(ops_equal(&plus.after(&minus).unwrap(), &OpExpr::zero(s, s)).unwrap());
    }

    #[test]
    fn bg_on_functions_is_a_laplacian_power() {
        let l = branson_gover(3, 0, 2).unwrap();
        let lap2 = OpExpr::scale(Scalar::frac(7, 2), OpExpr::chain(Sig::slice(4, 0), &[Lap, Lap]).unwrap());
        assert!(ops_equal(&l, &lap2).unwrap());
    }
}
