//! Singular vectors in the Fourier picture.
//!
//! A singular vector is a homomorphism from `Lambda^q(R^{n-1})` into
//! polynomial `p`-forms in `xi_1, .., xi_n`.  It is stored twice: as a list of
//! structured terms `c * xi_n^a |xi'|^{2j} W` (with `W` one of the basic
//! homomorphisms) and as its values on the standard basis of `Lambda^q(R^{n-1})`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::coeffs::{a as coef_a, b as coef_b, UniPoly};
use crate::error::{Error, Result};
use crate::exterior::{Mono, MultiIndex, Poly, PolyForm};
use crate::linalg::Matrix;
use crate::operators::families::{value_at, MiddleCase, MiddleVariant};
use crate::operators::{Atom, OpExpr, Sig};
use crate::rep::fourier_p;
use crate::scalars::{GaussianRational, Rational, Scalar};

/// The basic homomorphisms; `E_n` is the normal vector, `i_E` inserts
/// `sum xi_k e_k`, `A` wedges with `alpha = sum xi_k e_k` (tangential `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SvWord {
    Id,
    EnIe,
    AIe,
    En,
    A,
    EnAIe,
    Ie,
    EnA,
}

impl SvWord {
    /// Polynomial degree contributed by the word itself.
    pub fn xi_degree(&self) -> u32 {
        match self {
            SvWord::Id | SvWord::En => 0,
            SvWord::EnIe | SvWord::A | SvWord::Ie | SvWord::EnA => 1,
            SvWord::AIe | SvWord::EnAIe => 2,
        }
    }

    /// Change of form degree from the source `q` to the image `p`.
    pub fn degree_shift(&self) -> i32 {
        match self {
            SvWord::Id | SvWord::EnIe | SvWord::AIe => 0,
            SvWord::En | SvWord::A | SvWord::EnAIe => 1,
            SvWord::Ie => -1,
            SvWord::EnA => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SvWord::Id => "id",
            SvWord::EnIe => "E_n^i_E",
            SvWord::AIe => "alpha^i_E",
            SvWord::En => "E_n",
            SvWord::A => "alpha",
            SvWord::EnAIe => "E_n^alpha^i_E",
            SvWord::Ie => "i_E",
            SvWord::EnA => "E_n^alpha",
        }
    }

    /// Applies the word to a constant tangential form embedded in `R^n`.
    pub fn apply(&self, w: &PolyForm) -> Result<PolyForm> {
        let normal = w.dim() - 1;
        Ok(match self {
            SvWord::Id => w.clone(),
            SvWord::EnIe => w.euler_insert(true).ext(normal)?,
            SvWord::AIe => w.euler_insert(true).alpha_wedge(true),
            SvWord::En => w.ext(normal)?,
            SvWord::A => w.alpha_wedge(true),
            SvWord::EnAIe => w.euler_insert(true).alpha_wedge(true).ext(normal)?,
            SvWord::Ie => w.euler_insert(true),
            SvWord::EnA => w.alpha_wedge(true).ext(normal)?,
        })
    }

    /// Image under dualization: a constant and the slice operators placed
    /// left of `iota^*` (or `iota^* i_n` when the word contains `E_n`).
    fn dual(&self) -> (GaussianRational, &'static [Atom], bool) {
        let i = GaussianRational::i();
        match self {
            SvWord::Id => (GaussianRational::one(), &[], false),
            SvWord::EnIe => (i, &[Atom::D], true),
            SvWord::AIe => (GaussianRational::one(), &[Atom::D, Atom::Delta], false),
            SvWord::En => (GaussianRational::one(), &[], true),
            SvWord::A => (-i, &[Atom::Delta], false),
            SvWord::EnAIe => (GaussianRational::one(), &[Atom::D, Atom::Delta], true),
            SvWord::Ie => (i, &[Atom::D], false),
            SvWord::EnA => (-i, &[Atom::Delta], true),
        }
    }
}

/// One summand `coeff * xi_n^xi_n_power * |xi'|^(2 lap_power) * word`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvTerm {
    pub word: SvWord,
    pub xi_n_power: u32,
    pub lap_power: u32,
    pub coeff: Scalar,
}

/// Which family a vector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VType {
    First,
    Second,
    Third,
    Fourth,
    Middle(MiddleVariant),
}

impl VType {
    pub fn label(&self) -> String {
        match self {
            VType::First => "1".into(),
            VType::Second => "2".into(),
            VType::Third => "3".into(),
            VType::Fourth => "4".into(),
            VType::Middle(v) => {
                let s = if v.plus { "+" } else { "-" };
                match v.case {
                    MiddleCase::OddLower => format!("1a{s}"),
                    MiddleCase::OddUpper => format!("1b{s}"),
                    MiddleCase::Even => format!("2{s}"),
                }
            }
        }
    }
}

/// A homogeneous homomorphism `Lambda^q(R^{n-1}) -> Pol_N(R^n) ⊗ Lambda^p(R^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularVector {
    pub n: usize,
    /// Form degree `p` of the values.
    pub degree: usize,
    /// Form degree `q` of the source.
    pub source_degree: usize,
    pub homogeneity: u32,
    pub vtype: VType,
    /// `None` when `lambda` is symbolic.
    pub lambda: Option<Rational>,
    /// Structured terms; empty for projected middle-degree vectors.
    pub terms: Vec<SvTerm>,
    /// Values on `e_I`, `I` running over `q`-subsets of the tangential axes.
    pub data: BTreeMap<MultiIndex, PolyForm>,
}

fn tangential_norm_pow(n: usize, j: u32) -> Poly {
    let mut sq = Poly::zero();
    for k in 0..n - 1 {
        sq.add_term(Mono::var(k).mul(&Mono::var(k)), Scalar::one());
    }
    let mut out = Poly::constant(Scalar::one());
    for _ in 0..j {
        out = out.mul(&sq);
    }
    out
}

fn xi_n_pow(n: usize, a: u32) -> Poly {
    let mut exps = vec![0u32; n];
    exps[n - 1] = a;
    Poly::monomial(Mono::from_exponents(&exps).expect("small exponent"))
}

fn term_data(n: usize, q: usize, t: &SvTerm) -> Result<BTreeMap<MultiIndex, PolyForm>> {
    let factor = tangential_norm_pow(n, t.lap_power).mul(&xi_n_pow(n, t.xi_n_power));
    let mut out = BTreeMap::new();
    for idx in MultiIndex::all(n - 1, q) {
        let w = PolyForm::basis(n, idx, Mono::one());
        let img = t.word.apply(&w)?.mul_poly(&factor).scale(&t.coeff);
        out.insert(idx, img);
    }
    Ok(out)
}

fn assemble(n: usize, p: usize, q: usize, terms: &[SvTerm]) -> Result<BTreeMap<MultiIndex, PolyForm>> {
    let mut data: BTreeMap<MultiIndex, PolyForm> =
        MultiIndex::all(n - 1, q).into_iter().map(|i| (i, PolyForm::zero(n, p as i32))).collect();
    for t in terms {
        if t.word.degree_shift() != p as i32 - q as i32 {
            return Err(Error::Dimension(format!("word {} does not map {q}-forms to {p}-forms", t.word.name())));
        }
        for (idx, img) in term_data(n, q, t)? {
            data.get_mut(&idx).expect("same index set").add_scaled(&img, &Scalar::one())?;
        }
    }
    Ok(data)
}

impl SingularVector {
    pub fn from_terms(
        n: usize,
        degree: usize,
        source_degree: usize,
        homogeneity: u32,
        vtype: VType,
        lambda: Option<Rational>,
        terms: Vec<SvTerm>,
    ) -> Result<Self> {
        let terms: Vec<SvTerm> = terms.into_iter().filter(|t| !t.coeff.is_zero()).collect();
        let data = assemble(n, degree, source_degree, &terms)?;
        Ok(SingularVector { n, degree, source_degree, homogeneity, vtype, lambda, terms, data })
    }

    /// The weight at which annihilation is tested.
    pub fn weight(&self) -> Scalar {
        match &self.lambda {
            Some(l) => Scalar::from_rational(l.clone()),
            None => Scalar::lambda(),
        }
    }

    /// Evaluates the `lambda`-dependence at `x`.
    pub fn specialize(&self, x: &Rational) -> SingularVector {
        let gx = GaussianRational::real(x.clone());
        let f = |s: &Scalar| Scalar::constant(s.eval_at(&gx));
        SingularVector {
            lambda: Some(x.clone()),
            terms: self.terms.iter().map(|t| SvTerm { coeff: f(&t.coeff), ..t.clone() }).collect(),
            data: self.data.iter().map(|(k, v)| (*k, v.map_coeffs(f))).collect(),
            ..self.clone()
        }
    }

    /// Derivative in `lambda` (keeps `lambda` symbolic).
    pub fn derivative(&self) -> SingularVector {
        let f = |s: &Scalar| s.d_dlambda();
        SingularVector {
            terms: self.terms.iter().map(|t| SvTerm { coeff: f(&t.coeff), ..t.clone() }).collect(),
            data: self.data.iter().map(|(k, v)| (*k, v.map_coeffs(f))).collect(),
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.values().all(|v| v.is_zero())
    }

    /// Extends `xi`-linearly to a polynomial form on the source side (embedded in `R^n`).
    pub fn apply_to(&self, w: &PolyForm) -> Result<PolyForm> {
        let mut out = PolyForm::zero(self.n, self.degree as i32);
        for (idx, poly) in w.terms() {
            let img = self
                .data
                .get(idx)
                .ok_or_else(|| Error::Dimension(format!("no value on e_{idx:?}")))?;
            out.add_scaled(&img.mul_poly(poly), &Scalar::one())?;
        }
        Ok(out)
    }

    /// `v ∘ i_E` (`by_alpha = false`) or `v ∘ (alpha ∧)` (`by_alpha = true`).
    pub fn compose(&self, by_alpha: bool) -> Result<BTreeMap<MultiIndex, PolyForm>> {
        let q = if by_alpha { self.source_degree as i64 - 1 } else { self.source_degree as i64 + 1 };
        if q < 0 || q as usize > self.n - 1 {
            return Ok(BTreeMap::new());
        }
        let mut out = BTreeMap::new();
        for idx in MultiIndex::all(self.n - 1, q as usize) {
            let w = PolyForm::basis(self.n, idx, Mono::one());
            let w = if by_alpha { w.alpha_wedge(true) } else { w.euler_insert(true) };
            out.insert(idx, self.apply_to(&w)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "degree": self.degree,
            "source_degree": self.source_degree,
            "homogeneity": self.homogeneity,
            "vtype": self.vtype.label(),
            "lambda": match &self.lambda { Some(l) => Value::String(l.to_string()), None => Value::String("lambda".into()) },
            "terms": self.terms.iter().map(|t| json!({
                "word": t.word.name(),
                "xi_n_power": t.xi_n_power,
                "lap_power": t.lap_power,
                "coeff": t.coeff.to_string(),
            })).collect::<Vec<_>>(),
            "data": self.data.iter().map(|(k, v)| json!({
                "source": k.axes().iter().map(|a| a + 1).collect::<Vec<_>>(),
                "value": v.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn sh(s: &Scalar, c: i64) -> Scalar {
    s.shift(&Rational::from_int(c))
}

fn push_t(terms: &mut Vec<SvTerm>, word: SvWord, total: u32, j: u32, coeff: Scalar) {
    let used = 2 * j + word.xi_degree();
    debug_assert!(used <= total);
    terms.push(SvTerm { word, xi_n_power: total - used, lap_power: j, coeff });
}

/// First type `v_M^{(p -> p)}(lambda)`, `0 <= p <= n-1`.
pub fn build_first(n: usize, p: usize, order: u32) -> Result<SingularVector> {
    if n < 2 || p > n - 1 {
        return Err(Error::Range(format!("first type needs 0 <= p <= n-1, got p={p}, n={n}")));
    }
    let (ni, pi) = (n as i64, p as i64);
    let mut t = Vec::new();
    let m = order;
    if m % 2 == 1 {
        let big = (m - 1) / 2;
        let bn = big as i64;
        for j in 0..=big {
            let pj = &Scalar::lambda_plus(pi - 2 * bn - 1) * &coef_b(big, j, ni)?;
            push_t(&mut t, SvWord::Id, m, j, pj);
            push_t(&mut t, SvWord::EnIe, m, j, sh(&coef_a(big, j, ni)?, -1));
            if j < big {
                push_t(&mut t, SvWord::AIe, m, j, &Scalar::from_int(2 * bn) * &sh(&coef_b(big - 1, j, ni)?, -1));
            }
        }
    } else {
        let big = m / 2;
        let bn = big as i64;
        for j in 0..=big {
            let pj = &Scalar::lambda_plus(pi - 2 * bn) * &coef_a(big, j, ni)?;
            push_t(&mut t, SvWord::Id, m, j, pj);
            if j < big {
                let q = &(&Scalar::from_int(-2 * bn) * &Scalar::lambda_plus_q(Rational::frac(ni - 2 * bn - 1, 2)))
                    * &(&Scalar::from_int(2) * &sh(&coef_b(big - 1, j, ni)?, -1));
                push_t(&mut t, SvWord::EnIe, m, j, q);
                push_t(&mut t, SvWord::AIe, m, j, &Scalar::from_int(2 * bn) * &sh(&coef_a(big - 1, j, ni)?, -1));
            }
        }
    }
    SingularVector::from_terms(n, p, p, m, VType::First, None, t)
}

/// Second type `v_M^{(p-1 -> p)}(lambda)`, `1 <= p <= n`.
pub fn build_second(n: usize, p: usize, order: u32) -> Result<SingularVector> {
    if n < 2 || p == 0 || p > n {
        return Err(Error::Range(format!("second type needs 1 <= p <= n, got p={p}, n={n}")));
    }
    let (ni, pi) = (n as i64, p as i64);
    let mut t = Vec::new();
    let m = order;
    if m % 2 == 1 {
        let big = (m - 1) / 2;
        let bn = big as i64;
        for j in 0..=big {
            let jj = j as i64;
            let pj = -(&Scalar::lambda_plus(ni - pi - 2 * bn + 2 * jj - 1) * &coef_b(big, j, ni)?);
            push_t(&mut t, SvWord::En, m, j, pj);
            push_t(&mut t, SvWord::A, m, j, sh(&coef_a(big, j, ni)?, -1));
            if j < big {
                push_t(&mut t, SvWord::EnAIe, m, j, &Scalar::from_int(2 * bn) * &sh(&coef_b(big - 1, j, ni)?, -1));
            }
        }
    } else {
        let big = m / 2;
        let bn = big as i64;
        for j in 0..=big {
            let jj = j as i64;
            let pj = -(&Scalar::lambda_plus(ni - pi - 2 * bn + 2 * jj) * &coef_a(big, j, ni)?);
            push_t(&mut t, SvWord::En, m, j, pj);
            if j < big {
                let q = &(&Scalar::from_int(-2 * bn) * &Scalar::lambda_plus_q(Rational::frac(ni - 2 * bn - 1, 2)))
                    * &(&Scalar::from_int(2) * &sh(&coef_b(big - 1, j, ni)?, -1));
                push_t(&mut t, SvWord::A, m, j, q);
                push_t(&mut t, SvWord::EnAIe, m, j, &Scalar::from_int(2 * bn) * &sh(&coef_a(big - 1, j, ni)?, -1));
            }
        }
    }
    SingularVector::from_terms(n, p, p - 1, m, VType::Second, None, t)
}

/// Fixed-weight Gegenbauer profile shared by the third and fourth types.
fn fixed_profile(n: usize, order: u32, word: SvWord) -> Result<(Vec<SvTerm>, Rational)> {
    let ni = n as i64;
    let mut t = Vec::new();
    if order % 2 == 0 {
        let big = order / 2;
        let lam = Rational::from_int(order as i64 - 1);
        for j in 0..big {
            push_t(&mut t, word, order, j, value_at(&coef_b(big - 1, j, ni)?, &lam));
        }
        Ok((t, lam))
    } else {
        let big = (order - 1) / 2;
        let lam = Rational::from_int(order as i64 - 1);
        for j in 0..=big {
            push_t(&mut t, word, order, j, value_at(&coef_a(big, j, ni)?, &lam));
        }
        Ok((t, lam))
    }
}

/// Third type `v_M^{(p+1 -> p)}` with values in `p`-forms: `i_E` at
/// `lambda = -p` for `M = 1`, and a Gegenbauer profile for `p = 0`.
pub fn build_third(n: usize, p: usize, order: u32) -> Result<SingularVector> {
    if n < 2 || p + 2 > n || order == 0 || (order > 1 && p != 0) {
        return Err(Error::Unsupported(format!("no third type vector of homogeneity {order} with values in {p}-forms on R^{n}")));
    }
    let (terms, lam) = if order == 1 {
        (vec![SvTerm { word: SvWord::Ie, xi_n_power: 0, lap_power: 0, coeff: Scalar::one() }], Rational::from_int(-(p as i64)))
    } else {
        fixed_profile(n, order, SvWord::Ie)?
    };
    SingularVector::from_terms(n, p, p + 1, order, VType::Third, Some(lam), terms)
}

/// Fourth type `v_M^{(p-2 -> p)}`: `E_n ∧ alpha` at `lambda = p-n` for `M = 1`,
/// and a Gegenbauer profile for `p = n`.
pub fn build_fourth(n: usize, p: usize, order: u32) -> Result<SingularVector> {
    if n < 2 || p < 2 || p > n || order == 0 || (order > 1 && p != n) {
        return Err(Error::Unsupported(format!("no fourth type vector of homogeneity {order} with values in {p}-forms on R^{n}")));
    }
    let (terms, lam) = if order == 1 {
        (vec![SvTerm { word: SvWord::EnA, xi_n_power: 0, lap_power: 0, coeff: Scalar::one() }], Rational::from_int(p as i64 - n as i64))
    } else {
        fixed_profile(n, order, SvWord::EnA)?
    };
    SingularVector::from_terms(n, p, p - 2, order, VType::Fourth, Some(lam), terms)
}

/// Builds the vector belonging to the family operator of the given type on `p`-forms.
pub fn build(family_type: u8, n: usize, p: usize, order: u32) -> Result<SingularVector> {
    match family_type {
        1 => build_first(n, p, order),
        2 => build_second(n, p, order),
        3 => build_third(n, p, order),
        4 => build_fourth(n, p, order),
        t => Err(Error::Range(format!("family type {t} not in 1..=4"))),
    }
}

/// `1/2 (w ± mu^{-1} star w)` on a middle-degree form.
fn project(w: &PolyForm, plus: bool) -> PolyForm {
    let mu_inv = if w.degree() % 2 == 0 { GaussianRational::one() } else { -GaussianRational::i() };
    let half = GaussianRational::frac(1, 2);
    let c = if plus { &half * &mu_inv } else { -(&half * &mu_inv) };
    let mut out = w.scale(&Scalar::constant(half));
    out.add_scaled(&w.hodge_star(), &Scalar::constant(c)).expect("middle degree");
    out
}

/// Middle-degree vectors obtained from a first type vector `v`.
///
/// `OddLower` restricts the source to an eigenspace of `star` on `R^{n-1}`,
/// `OddUpper` additionally applies `star_bar` to the values, and `Even`
/// projects the values onto an eigenspace of `star_bar`.
pub fn middle_projections(v: &SingularVector, variant: MiddleVariant) -> Result<SingularVector> {
    let n = v.n;
    let base = match variant.case {
        MiddleCase::OddUpper => variant.source_degree(n)? - 1,
        _ => variant.source_degree(n)?,
    };
    if v.vtype != VType::First || v.degree != base {
        return Err(Error::Unsupported(format!("middle projection needs a first type vector on {base}-forms")));
    }
    let mut data = BTreeMap::new();
    let mut degree = v.degree;
    for idx in v.data.keys() {
        let img = match variant.case {
            MiddleCase::Even => project(&v.data[idx], variant.plus),
            MiddleCase::OddLower | MiddleCase::OddUpper => {
                let src = PolyForm::basis(n - 1, *idx, Mono::one());
                let pr = project(&src, variant.plus).extend();
                let img = v.apply_to(&pr)?;
                if variant.case == MiddleCase::OddUpper {
                    degree = n - v.degree;
                    img.hodge_star()
                } else {
                    img
                }
            }
        };
        data.insert(*idx, img);
    }
    Ok(SingularVector {
        degree,
        vtype: VType::Middle(variant),
        terms: Vec::new(),
        data,
        ..v.clone()
    })
}

/// Nonzero `P_j` images found by [`verify_annihilated`].
#[derive(Debug, Clone, PartialEq)]
pub struct AnnihilationReport {
    pub failures: Vec<(MultiIndex, usize, PolyForm)>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Applies every `P_j(lambda)`, `j <= n-1`, to every value of `v`.
pub fn verify_annihilated(v: &SingularVector) -> Result<AnnihilationReport> {
    let lam = v.weight();
    let mut failures = Vec::new();
    for (idx, img) in &v.data {
        for j in 0..v.n - 1 {
            let r = fourier_p(&lam, j, img)?;
            if !r.is_zero() {
                failures.push((*idx, j, r));
            }
        }
    }
    Ok(AnnihilationReport { failures })
}

fn up(f: &UniPoly) -> UniPoly {
    f.shift_up(1)
}

fn sc(c: Scalar, f: &UniPoly) -> UniPoly {
    f.scale(&c)
}

fn int(k: i64) -> Scalar {
    Scalar::from_int(k)
}

/// `2t(t+1) F'' + a t F' + b F' + c F` with the constants given as scalars.
fn gegenbauer_op(f: &UniPoly, a: Scalar, b: Scalar, c: Scalar) -> UniPoly {
    let f1 = f.derivative();
    let f2 = f1.derivative();
    let t2 = &up(&up(&f2)) + &up(&f2);
    let mut out = sc(int(2), &t2);
    out = &out + &sc(a, &up(&f1));
    out = &out + &sc(b, &f1);
    &out + &sc(c, f)
}

/// The six residuals of the ODE system equivalent to annihilation of a first
/// type vector of homogeneity `2N+1` (`odd`) or `2N`, for given `P, Q, R`.
pub fn ode_residuals(n: usize, p: usize, big_n: u32, odd: bool, pp: &UniPoly, qq: &UniPoly, rr: &UniPoly) -> Vec<UniPoly> {
    let (ni, pi, bn) = (n as i64, p as i64, big_n as i64);
    let lam2 = |c: i64| Scalar::linear(Rational::from_int(2), Rational::from_int(c));
    let lam = Scalar::lambda_plus;
    let two_t_d = |f: &UniPoly| sc(int(2), &up(&f.derivative()));
    if odd {
        vec![
            gegenbauer_op(pp, int(1 - 4 * bn), lam2(ni - 4 * bn - 1), int(bn * (2 * bn + 1))),
            &(&(&sc(int(2), &pp.derivative()) + &sc(int(2 * bn), qq)) - &two_t_d(qq))
                + &(&two_t_d(rr) + &sc(lam(ni - pi - 2 * bn), rr)),
            &sc(int(-2), &pp.derivative()) + &sc(lam(pi - 2 * bn - 1), rr),
            &(&two_t_d(pp) - &sc(int(2 * bn + 1), pp)) + &sc(lam(pi - 2 * bn - 1), qq),
            &(&gegenbauer_op(qq, int(3 - 4 * bn), lam2(ni - 4 * bn + 1), int(bn * (2 * bn - 1))) + &two_t_d(rr))
                - &sc(int(2 * bn - 1), rr),
            gegenbauer_op(rr, int(5 - 4 * bn), lam2(ni - 4 * bn + 1), int((bn - 1) * (2 * bn - 1))),
        ]
    } else {
        vec![
            gegenbauer_op(pp, int(3 - 4 * bn), lam2(ni - 4 * bn + 1), int(bn * (2 * bn - 1))),
            &(&(&sc(int(2), &pp.derivative()) + &sc(int(2 * bn - 1), qq)) - &two_t_d(qq))
                + &(&two_t_d(rr) + &sc(lam(ni - pi - 2 * bn + 1), rr)),
            &sc(int(-2), &pp.derivative()) + &sc(lam(pi - 2 * bn), rr),
            &(&two_t_d(pp) - &sc(int(2 * bn), pp)) + &sc(lam(pi - 2 * bn), qq),
            &(&gegenbauer_op(qq, int(5 - 4 * bn), lam2(ni - 4 * bn + 3), int((bn - 1) * (2 * bn - 1))) + &two_t_d(rr))
                - &sc(int(2 * bn - 2), rr),
            gegenbauer_op(rr, int(7 - 4 * bn), lam2(ni - 4 * bn + 3), int((bn - 1) * (2 * bn - 3))),
        ]
    }
}

/// The `t`-polynomials `P, Q, R` of the first type vector of homogeneity `2N+1` (`odd`) or `2N`.
pub fn first_type_profiles(n: usize, p: usize, big_n: u32, odd: bool) -> Result<(UniPoly, UniPoly, UniPoly)> {
    let order = if odd { 2 * big_n + 1 } else { 2 * big_n };
    let v = build_first(n, p, order)?;
    let mut cols: [Vec<Scalar>; 3] = Default::default();
    for t in &v.terms {
        let k = match t.word {
            SvWord::Id => 0,
            SvWord::EnIe => 1,
            _ => 2,
        };
        let col = &mut cols[k];
        if col.len() <= t.lap_power as usize {
            col.resize(t.lap_power as usize + 1, Scalar::zero());
        }
        col[t.lap_power as usize] = t.coeff.clone();
    }
    let [a, b, c] = cols;
    Ok((UniPoly::new(a), UniPoly::new(b), UniPoly::new(c)))
}

/// Ansatz words for a homomorphism from `q`-forms to `p`-forms.
fn ansatz_words(p: usize, q: usize) -> Result<&'static [SvWord]> {
    let d = p as i64 - q as i64;
    Ok(match d {
        0 => &[SvWord::Id, SvWord::EnIe, SvWord::AIe],
        1 => &[SvWord::En, SvWord::A, SvWord::EnAIe],
        -1 => &[SvWord::Ie],
        2 => &[SvWord::EnA],
        _ => return Err(Error::Range(format!("no homomorphisms from {q}-forms to {p}-forms"))),
    })
}

/// Every basic homogeneous homomorphism of degree `order` from `q`-forms to `p`-forms.
pub fn ansatz_terms(p: usize, q: usize, order: u32) -> Result<Vec<SvTerm>> {
    let mut out = Vec::new();
    for &w in ansatz_words(p, q)? {
        let mut j = 0;
        while 2 * j + w.xi_degree() <= order {
            out.push(SvTerm { word: w, xi_n_power: order - 2 * j - w.xi_degree(), lap_power: j, coeff: Scalar::one() });
            j += 1;
        }
    }
    Ok(out)
}

/// Solutions of the annihilation equations inside the ansatz span at `lambda0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSolution {
    /// Dimension of the space of annihilated homomorphisms.
    pub dimension: usize,
    /// A basis of that space.
    pub basis: Vec<SingularVector>,
}

fn flatten(
    keys: &mut BTreeMap<(MultiIndex, usize, MultiIndex, Mono), usize>,
    block: usize,
    idx: MultiIndex,
    form: &PolyForm,
) -> Result<Vec<(usize, GaussianRational)>> {
    let mut out = Vec::new();
    for (fi, mono, c) in form.iter_terms() {
        let c = c.as_constant().ok_or_else(|| Error::Unsupported("ansatz needs numeric lambda".into()))?;
        let next = keys.len();
        let row = *keys.entry((idx, block, fi, mono)).or_insert(next);
        out.push((row, c));
    }
    Ok(out)
}

fn to_matrix(cols: &[Vec<(usize, GaussianRational)>], rows: usize) -> Matrix {
    let mut m = Matrix::zeros(rows, cols.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, v) in col {
            let cur = m.get(*r, c) + v;
            m.set(*r, c, cur);
        }
    }
    m
}

/// Solves `P_j(lambda0) v = 0` (`j <= n-1`) over the span of the basic
/// homomorphisms of degree `order` from `q`-forms to `p`-forms.
pub fn solve_ansatz(n: usize, p: usize, q: usize, order: u32, lambda0: &GaussianRational) -> Result<AnsatzSolution> {
    if p > n || q > n - 1 {
        return Err(Error::Range(format!("degrees p={p}, q={q} on R^{n}")));
    }
    let terms = ansatz_terms(p, q, order)?;
    let lam = Scalar::constant(lambda0.clone());
    let mut vkeys = BTreeMap::new();
    let mut pkeys = BTreeMap::new();
    let mut vcols = Vec::new();
    let mut pcols = Vec::new();
    for t in &terms {
        let data = term_data(n, q, t)?;
        let mut vc = Vec::new();
        let mut pc = Vec::new();
        for (idx, img) in &data {
            vc.extend(flatten(&mut vkeys, 0, *idx, img)?);
            for j in 0..n - 1 {
                pc.extend(flatten(&mut pkeys, j, *idx, &fourier_p(&lam, j, img)?)?);
            }
        }
        vcols.push(vc);
        pcols.push(pc);
    }
    let a = to_matrix(&vcols, vkeys.len());
    let b = to_matrix(&pcols, pkeys.len());
    let dimension = a.rank() - b.rank();
    let kernel = b.nullspace();
    let mut basis: Vec<SingularVector> = Vec::new();
    let mut images: Vec<Vec<(usize, GaussianRational)>> = Vec::new();
    let vtype = match p as i64 - q as i64 {
        0 => VType::First,
        1 => VType::Second,
        -1 => VType::Third,
        _ => VType::Fourth,
    };
    for c in kernel {
        let mut col: Vec<(usize, GaussianRational)> = Vec::new();
        for (k, coef) in c.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            col.extend(vcols[k].iter().map(|(r, v)| (*r, v * coef)));
        }
        let mut trial = images.clone();
        trial.push(col);
        if to_matrix(&trial, vkeys.len()).rank() == trial.len() {
            images = trial;
            let st: Vec<SvTerm> = terms
                .iter()
                .zip(c.iter())
                .map(|(t, k)| SvTerm { coeff: Scalar::constant(k.clone()), ..t.clone() })
                .collect();
            let lam_r = if lambda0.is_real() { Some(lambda0.re.clone()) } else { None };
            basis.push(SingularVector::from_terms(n, p, q, order, vtype, lam_r, st)?);
        }
    }
    debug_assert_eq!(basis.len(), dimension);
    Ok(AnsatzSolution { dimension, basis })
}

/// The differential operator dual to `v`: `xi_j -> i d_j`, `E_n ∧ -> i_n`,
/// `i_E -> i d`, `alpha ∧ -> -i delta`, applied term by term.
pub fn translate(v: &SingularVector) -> Result<OpExpr> {
    if v.terms.is_empty() && !v.is_zero() {
        return Err(Error::Unsupported("translation needs the structured form of the vector".into()));
    }
    let src = Sig::ambient(v.n, v.degree as i32);
    let target = Sig::slice(v.n, v.source_degree as i32);
    let mut parts = Vec::new();
    for t in &v.terms {
        let (k, slice, normal) = t.word.dual();
        let mut atoms = vec![Atom::Lap; t.lap_power as usize];
        atoms.extend_from_slice(slice);
        atoms.push(if normal { Atom::InsertNormal } else { Atom::Pullback });
        atoms.extend(std::iter::repeat(Atom::Dn).take(t.xi_n_power as usize));
        let c = &k * &GaussianRational::i_pow(t.xi_n_power as i64);
        let e = OpExpr::chain(src, &atoms)?;
        parts.push(OpExpr::scale(t.coeff.scale(&c), e));
    }
    OpExpr::sum_typed(parts, src, target)
}

/// Constant `c` with `a = c b`, if one exists (`None` also when `b = 0 != a`).
pub fn proportionality(a: &OpExpr, b: &OpExpr) -> Result<Option<GaussianRational>> {
    let la = a.compile();
    let lb = b.compile();
    let Some((w, cb)) = lb.terms().iter().next() else {
        return Ok(if la.is_zero() { Some(GaussianRational::zero()) } else { None });
    };
    let ca = la.terms().get(w).cloned().unwrap_or_else(Scalar::zero);
    let ratio = match ca.checked_div(cb) {
        Ok(r) => r,
        Err(_) => return Ok(None),
    };
    let Some(c) = ratio.as_constant() else {
        return Ok(None);
    };
    let diff = a.minus(&OpExpr::scale(Scalar::constant(c.clone()), b.clone()))?;
    if crate::operators::ops_equal(&diff, &OpExpr::zero(a.source(), a.target()))? {
        Ok(Some(c))
    } else {
        Ok(None)
    }
}

/// Outcome of one identity among singular vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct VanishingCheck {
    pub name: String,
    pub pass: bool,
}

fn data_zero(d: &BTreeMap<MultiIndex, PolyForm>) -> bool {
    d.values().all(|v| v.is_zero())
}

/// The vanishing identities and the derivative descriptions of the third
/// and fourth type vectors, for `n <= n_max` and homogeneity `<= order_max`.
pub fn vanishing_checks_up_to(n_max: usize, order_max: u32) -> Result<Vec<VanishingCheck>> {
    let mut out = Vec::new();
    for n in 2..=n_max {
        for m in 1..=order_max {
            let mi = m as i64;
            for p in 0..n {
                let v = build_first(n, p, m)?.specialize(&Rational::from_int(mi - p as i64));
                out.push(VanishingCheck {
                    name: format!("first type at N-p composed with i_E (n={n}, p={p}, N={m})"),
                    pass: data_zero(&v.compose(false)?),
                });
            }
            for p in 1..=n {
                let v = build_second(n, p, m)?.specialize(&Rational::from_int(mi - n as i64 + p as i64));
                out.push(VanishingCheck {
                    name: format!("second type at N-n+p composed with alpha (n={n}, p={p}, N={m})"),
                    pass: data_zero(&v.compose(true)?),
                });
            }
            let at = Rational::from_int(mi - 1);
            let third = build_third(n, 0, m)?;
            let derived = build_first(n, 0, m - 1)?.derivative().specialize(&at).compose(false)?;
            out.push(VanishingCheck {
                name: format!("third type as a lambda-derivative (n={n}, N={m})"),
                pass: third.data == derived,
            });
            let fourth = build_fourth(n, n, m)?;
            let derived: BTreeMap<MultiIndex, PolyForm> = build_second(n, n, m - 1)?
                .derivative()
                .specialize(&at)
                .compose(true)?
                .into_iter()
                .map(|(k, v)| (k, v.neg()))
                .collect();
            out.push(VanishingCheck {
                name: format!("fourth type as a lambda-derivative (n={n}, N={m})"),
                pass: fourth.data == derived,
            });
        }
    }
    Ok(out)
}

/// [`vanishing_checks_up_to`] on the default grid `n <= 5`, homogeneity `<= 4`.
pub fn vanishing_checks() -> Result<Vec<VanishingCheck>> {
    vanishing_checks_up_to(5, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::families::{family_first, family_second};

    #[test]
    fn low_homogeneity_first_type() {
        let v0 = build_first(3, 1, 0).unwrap();
        assert_eq!(v0.terms.len(), 1);
        assert_eq!(v0.terms[0].coeff, Scalar::lambda_plus(1));
        let v1 = build_first(3, 1, 1).unwrap();
        assert_eq!(v1.terms[0].coeff, Scalar::lambda());
        assert_eq!(v1.terms[1].word, SvWord::EnIe);
        assert!(v1.terms[1].coeff.is_one());
    }

    #[test]
    fn annihilated_low() {
        for m in 0..=3 {
            for p in 0..3 {
                assert!(verify_annihilated(&build_first(3, p, m).unwrap()).unwrap().passed(), "first p={p} m={m}");
                assert!(verify_annihilated(&build_second(3, p + 1, m).unwrap()).unwrap().passed(), "second p={} m={m}", p + 1);
            }
        }
    }

    #[test]
    fn translation_matches_builders() {
        for m in 0..=3 {
            let t = translate(&build_first(4, 1, m).unwrap()).unwrap();
            let c = proportionality(&t, &family_first(4, 1, m).unwrap()).unwrap();
            assert!(c.is_some_and(|c| !c.is_zero()), "m={m}");
            let t = translate(&build_second(4, 2, m).unwrap()).unwrap();
            let c = proportionality(&t, &family_second(4, 2, m).unwrap()).unwrap();
            assert!(c.is_some_and(|c| !c.is_zero()), "m={m}");
        }
    }

    #[test]
    fn vanishing_first_homogeneity_one() {
        let v = build_first(3, 0, 1).unwrap().specialize(&Rational::one());
        assert!(v.is_zero());
    }
}
