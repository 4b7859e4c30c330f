//! Polynomial differential forms on `R^m` and the flat exterior calculus.
//!
//! Axes are 0-based internally (`0..m`) and 1-based in text and JSON.
//! The last axis `m-1` plays the role of the normal direction `x_n`.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalars::{binomial, GaussianRational, Rational, Scalar};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// A strictly increasing set of axes, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct MultiIndex(pub u16);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(0)
    }

    pub fn single(k: usize) -> Self {
        MultiIndex(1 << k)
    }

    /// Builds from 0-based axes in any order; fails on repeats.
    pub fn from_axes(axes: &[usize]) -> Result<Self> {
        let mut bits = 0u16;
        for &a in axes {
            if a >= MAX_DIM || bits & (1 << a) != 0 {
                return Err(Error::Range(format!("bad multi-index {axes:?}")));
            }
            bits |= 1 << a;
        }
        Ok(MultiIndex(bits))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0 & (1 << k) != 0
    }

    /// Ascending 0-based axes.
    pub fn axes(&self) -> Vec<usize> {
        (0..16).filter(|&k| self.contains(k)).collect()
    }

    /// Number of members strictly below `k`.
    pub fn count_below(&self, k: usize) -> usize {
        (self.0 & ((1u16 << k) - 1)).count_ones() as usize
    }

    pub fn insert(&self, k: usize) -> Self {
        MultiIndex(self.0 | (1 << k))
    }

    pub fn remove(&self, k: usize) -> Self {
        MultiIndex(self.0 & !(1 << k))
    }

    /// Complement inside `0..m`.
    pub fn complement(&self, m: usize) -> Self {
        MultiIndex(!self.0 & ((1u16 << m) - 1))
    }

    /// All subsets of `0..m` of size `p`, in increasing bitmask order.
    pub fn all(m: usize, p: usize) -> Vec<MultiIndex> {
        (0u16..(1u16 << m))
            .filter(|b| b.count_ones() as usize == p)
            .map(MultiIndex)
            .collect()
    }
}

fn sign_of(k: usize) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        Rational::from_int(-1)
    }
}

/// Sign of the shuffle that sorts the concatenation `(I, J)` of disjoint sets.
pub fn shuffle_sign(i: MultiIndex, j: MultiIndex) -> i64 {
    let mut inversions = 0;
    for a in i.axes() {
        inversions += j.count_below(a);
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// A monomial `x^gamma`, eight bits per exponent.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(pub u64);

impl Mono {
    pub fn one() -> Self {
        Mono(0)
    }

    pub fn var(k: usize) -> Self {
        Mono(1 << (8 * k))
    }

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_DIM {
            return Err(Error::Dimension(format!("{} variables", exps.len())));
        }
        let mut bits = 0u64;
        for (k, &e) in exps.iter().enumerate() {
            if e > 255 {
                return Err(Error::Range(format!("exponent {e} too large")));
            }
            bits |= (e as u64) << (8 * k);
        }
        Ok(Mono(bits))
    }

    pub fn exp(&self, k: usize) -> u32 {
        ((self.0 >> (8 * k)) & 0xff) as u32
    }

    pub fn exponents(&self, m: usize) -> Vec<u32> {
        (0..m).map(|k| self.exp(k)).collect()
    }

    pub fn degree(&self) -> u32 {
        (0..MAX_DIM).map(|k| self.exp(k)).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0 + other.0)
    }

    /// Lowers exponent `k` by one; `None` when it is zero.
    pub fn lower(&self, k: usize) -> Option<Mono> {
        if self.exp(k) == 0 {
            None
        } else {
            Some(Mono(self.0 - (1 << (8 * k))))
        }
    }

    /// Highest variable index with nonzero exponent, plus one.
    pub fn support_dim(&self) -> usize {
        (0..MAX_DIM).rev().find(|&k| self.exp(k) > 0).map_or(0, |k| k + 1)
    }

    /// All monomials in `m` variables of total degree exactly `deg`.
    pub fn all_of_degree(m: usize, deg: u32) -> Vec<Mono> {
        fn rec(m: usize, k: usize, left: u32, cur: u64, out: &mut Vec<Mono>) {
            if k + 1 == m {
                out.push(Mono(cur | ((left as u64) << (8 * k))));
                return;
            }
            for e in (0..=left).rev() {
                rec(m, k + 1, left - e, cur | ((e as u64) << (8 * k)), out);
            }
        }
        let mut out = Vec::new();
        if m == 0 {
            if deg == 0 {
                out.push(Mono::one());
            }
            return out;
        }
        rec(m, 0, deg, 0, &mut out);
        out
    }
}

/// A polynomial in `x_1..x_m` with [`Scalar`] coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poly {
    terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::term(Mono::one(), c)
    }

    pub fn term(m: Mono, c: Scalar) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn monomial(m: Mono) -> Self {
        Poly::term(m, Scalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Scalar> {
        &self.terms
    }

    pub fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = &*e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(*m, c * s);
        }
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        let mut out = Poly::zero();
        out.add_scaled(self, s);
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    pub fn mul_mono(&self, m: Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|(a, c)| (a.mul(&m), c.clone())).collect() }
    }

    /// `x_k * f`.
    pub fn mul_coord(&self, k: usize) -> Poly {
        self.mul_mono(Mono::var(k))
    }

    /// `df/dx_k`.
    pub fn partial(&self, k: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if let Some(low) = m.lower(k) {
                out.add_term(low, c.scale(&GaussianRational::from_int(m.exp(k) as i64)));
            }
        }
        out
    }

    /// Substitutes `x_k = 0`.
    pub fn restrict_zero(&self, k: usize) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp(k) == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Applies a map to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Largest total degree, `None` for zero.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            if !c.is_one() || m.degree() == 0 {
                factors.push(format!("({c})"));
            }
            for k in 0..MAX_DIM {
                match m.exp(k) {
                    0 => {}
                    1 => factors.push(format!("{var}{}", k + 1)),
                    e => factors.push(format!("{var}{}^{e}", k + 1)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// A `p`-form on `R^m` with polynomial coefficients.
///
/// Degrees outside `0..=m` are allowed and denote the zero space, so that
/// `delta` of a function or `d` of a top form stay well typed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyForm {
    dim: usize,
    degree: i32,
    terms: BTreeMap<MultiIndex, Poly>,
}

impl PolyForm {
    pub fn zero(dim: usize, degree: i32) -> Self {
        assert!(dim <= MAX_DIM, "ambient dimension {dim} exceeds {MAX_DIM}");
        PolyForm { dim, degree, terms: BTreeMap::new() }
    }

    /// `c * x^gamma dx_I`.
    pub fn term(dim: usize, idx: MultiIndex, mono: Mono, c: Scalar) -> Self {
        let mut f = PolyForm::zero(dim, idx.len() as i32);
        f.add_term(idx, mono, c);
        f
    }

    /// `x^gamma dx_I` with unit coefficient.
    pub fn basis(dim: usize, idx: MultiIndex, mono: Mono) -> Self {
        Self::term(dim, idx, mono, Scalar::one())
    }

    /// The constant function `c`.
    pub fn function(dim: usize, p: Poly) -> Self {
        let mut f = PolyForm::zero(dim, 0);
        f.add_poly(MultiIndex::empty(), &p);
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Poly> {
        &self.terms
    }

    pub fn coeff(&self, idx: MultiIndex) -> Poly {
        self.terms.get(&idx).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, idx: MultiIndex, mono: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(idx.len() as i32, self.degree);
        let entry = self.terms.entry(idx).or_default();
        entry.add_term(mono, c);
        if entry.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn add_poly(&mut self, idx: MultiIndex, p: &Poly) {
        self.add_poly_scaled(idx, p, &Scalar::one());
    }

    fn add_poly_scaled(&mut self, idx: MultiIndex, p: &Poly, s: &Scalar) {
        if p.is_zero() || s.is_zero() {
            return;
        }
        let entry = self.terms.entry(idx).or_default();
        entry.add_scaled(p, s);
        if entry.is_zero() {
            self.terms.remove(&idx);
        }
    }

    fn check_same(&self, other: &PolyForm) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::Dimension(format!(
                "forms of type ({}, {}) and ({}, {})",
                self.dim, self.degree, other.dim, other.degree
            )));
        }
        Ok(())
    }

    /// `self += s * other`; both must share dimension and degree.
    pub fn add_scaled(&mut self, other: &PolyForm, s: &Scalar) -> Result<()> {
        self.check_same(other)?;
        for (idx, p) in &other.terms {
            self.add_poly_scaled(*idx, p, s);
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyForm) -> Result<PolyForm> {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &PolyForm) -> Result<PolyForm> {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::from_int(-1))?;
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            out.add_poly_scaled(*idx, p, s);
        }
        out
    }

    pub fn neg(&self) -> PolyForm {
        self.scale(&Scalar::from_int(-1))
    }

    /// Applies a map to every coefficient Scalar.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            let q = p.map_coeffs(&f);
            if !q.is_zero() {
                out.terms.insert(*idx, q);
            }
        }
        out
    }

    /// Evaluates every coefficient at `lambda = x`.
    pub fn eval_lambda(&self, x: &GaussianRational) -> PolyForm {
        self.map_coeffs(|c| Scalar::constant(c.eval_at(x)))
    }

    /// Coefficientwise multiplication by a polynomial.
    pub fn mul_poly(&self, q: &Poly) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            out.add_poly(*idx, &p.mul(q));
        }
        out
    }

    pub fn mul_coord(&self, k: usize) -> PolyForm {
        self.map_polys(|p| p.mul_coord(k))
    }

    fn map_polys(&self, f: impl Fn(&Poly) -> Poly) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            let q = f(p);
            if !q.is_zero() {
                out.terms.insert(*idx, q);
            }
        }
        out
    }

    fn check_axis(&self, k: usize) -> Result<()> {
        if k >= self.dim {
            return Err(Error::Range(format!("axis {} outside 1..={}", k + 1, self.dim)));
        }
        Ok(())
    }

    /// Coefficientwise `d/dx_k`.
    pub fn partial(&self, k: usize) -> Result<PolyForm> {
        self.check_axis(k)?;
        Ok(self.map_polys(|p| p.partial(k)))
    }

    /// Contraction `i_{e_k}`.
    pub fn interior(&self, k: usize) -> Result<PolyForm> {
        self.check_axis(k)?;
        let mut out = PolyForm::zero(self.dim, self.degree - 1);
        for (idx, p) in &self.terms {
            if idx.contains(k) {
                let s = sign_of(idx.count_below(k));
                out.add_poly_scaled(idx.remove(k), p, &Scalar::from_rational(s));
            }
        }
        Ok(out)
    }

    /// Exterior multiplication `dx_k ∧ ·`.
    pub fn ext(&self, k: usize) -> Result<PolyForm> {
        self.check_axis(k)?;
        let mut out = PolyForm::zero(self.dim, self.degree + 1);
        for (idx, p) in &self.terms {
            if !idx.contains(k) {
                let s = sign_of(idx.count_below(k));
                out.add_poly_scaled(idx.insert(k), p, &Scalar::from_rational(s));
            }
        }
        Ok(out)
    }

    fn axes(&self, tangential: bool) -> usize {
        if tangential {
            self.dim.saturating_sub(1)
        } else {
            self.dim
        }
    }

    /// Exterior derivative `sum_k dx_k ∧ d/dx_k`; tangential variant skips the last axis.
    pub fn d_with(&self, tangential: bool) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree + 1);
        for (idx, p) in &self.terms {
            for k in 0..self.axes(tangential) {
                if idx.contains(k) {
                    continue;
                }
                let dp = p.partial(k);
                let s = sign_of(idx.count_below(k));
                out.add_poly_scaled(idx.insert(k), &dp, &Scalar::from_rational(s));
            }
        }
        out
    }

    pub fn d(&self) -> PolyForm {
        self.d_with(false)
    }

    /// Codifferential `-sum_k i_{e_k} d/dx_k`.
    pub fn delta_with(&self, tangential: bool) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree - 1);
        for (idx, p) in &self.terms {
            for k in 0..self.axes(tangential) {
                if !idx.contains(k) {
                    continue;
                }
                let dp = p.partial(k);
                let s = -sign_of(idx.count_below(k));
                out.add_poly_scaled(idx.remove(k), &dp, &Scalar::from_rational(s));
            }
        }
        out
    }

    pub fn codifferential(&self) -> PolyForm {
        self.delta_with(false)
    }

    /// Hodge Laplacian `-sum_k d^2/dx_k^2`.
    pub fn laplacian_with(&self, tangential: bool) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            for k in 0..self.axes(tangential) {
                out.add_poly_scaled(*idx, &p.partial(k).partial(k), &Scalar::from_int(-1));
            }
        }
        out
    }

    pub fn laplacian(&self) -> PolyForm {
        self.laplacian_with(false)
    }

    /// Hodge star for the orientation `dx_1 ∧ … ∧ dx_m`.
    pub fn hodge_star(&self) -> PolyForm {
        let m = self.dim;
        let new_deg = m as i32 - self.degree;
        let mut out = PolyForm::zero(m, new_deg);
        for (idx, p) in &self.terms {
            let c = idx.complement(m);
            let s = shuffle_sign(*idx, c);
            out.add_poly_scaled(c, p, &Scalar::from_int(s));
        }
        out
    }

    /// `i_E = sum_k x_k i_{e_k}`.
    pub fn euler_insert(&self, tangential: bool) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree - 1);
        for k in 0..self.axes(tangential) {
            let t = self.interior(k).expect("axis in range").mul_coord(k);
            out.add_scaled(&t, &Scalar::one()).expect("same type");
        }
        out
    }

    /// `alpha ∧ · = sum_k x_k dx_k ∧ ·`.
    pub fn alpha_wedge(&self, tangential: bool) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree + 1);
        for k in 0..self.axes(tangential) {
            let t = self.ext(k).expect("axis in range").mul_coord(k);
            out.add_scaled(&t, &Scalar::one()).expect("same type");
        }
        out
    }

    /// Euler operator `sum_k x_k d/dx_k`, i.e. multiplication by the polynomial degree.
    pub fn euler_degree(&self) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            for (m, c) in p.terms() {
                let deg = m.degree();
                if deg > 0 {
                    out.add_term(*idx, *m, c.scale(&GaussianRational::from_int(deg as i64)));
                }
            }
        }
        out
    }

    /// Pullback to the hyperplane `x_m = 0`, landing on `R^{m-1}`.
    pub fn pullback(&self) -> Result<PolyForm> {
        if self.dim == 0 {
            return Err(Error::Dimension("pullback from R^0".into()));
        }
        let last = self.dim - 1;
        let mut out = PolyForm::zero(last, self.degree);
        for (idx, p) in &self.terms {
            if idx.contains(last) {
                continue;
            }
            let q = p.restrict_zero(last);
            if !q.is_zero() {
                out.terms.insert(*idx, q);
            }
        }
        Ok(out)
    }

    /// Drops every component containing `dx_m` and reinterprets the rest as a form
    /// on `R^{m-1}`, leaving the polynomial coefficients untouched.
    pub fn drop_normal_components(&self) -> Result<PolyForm> {
        if self.dim == 0 {
            return Err(Error::Dimension("restriction from R^0".into()));
        }
        let last = self.dim - 1;
        let mut out = PolyForm::zero(last, self.degree);
        for (idx, p) in &self.terms {
            if !idx.contains(last) {
                out.terms.insert(*idx, p.clone());
            }
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!("wedge of forms on R^{} and R^{}", self.dim, other.dim)));
        }
        let mut out = PolyForm::zero(self.dim, self.degree + other.degree);
        for (i, p) in &self.terms {
            for (j, q) in &other.terms {
                if i.0 & j.0 != 0 {
                    continue;
                }
                let s = shuffle_sign(*i, *j);
                out.add_poly_scaled(MultiIndex(i.0 | j.0), &p.mul(q), &Scalar::from_int(s));
            }
        }
        Ok(out)
    }

    /// Embeds a form on `R^m` into `R^{m+1}` (no dependence on the new axis).
    pub fn extend(&self) -> PolyForm {
        PolyForm { dim: self.dim + 1, degree: self.degree, terms: self.terms.clone() }
    }

    /// Keeps only monomials of total degree `deg`.
    pub fn homogeneous_part(&self, deg: u32) -> PolyForm {
        let mut out = PolyForm::zero(self.dim, self.degree);
        for (idx, p) in &self.terms {
            for (m, c) in p.terms() {
                if m.degree() == deg {
                    out.add_term(*idx, *m, c.clone());
                }
            }
        }
        out
    }

    /// `Some(k)` when every monomial has total degree `k`; zero forms report `None`.
    pub fn homogeneity(&self) -> Option<u32> {
        let mut deg = None;
        for p in self.terms.values() {
            for m in p.terms().keys() {
                match deg {
                    None => deg = Some(m.degree()),
                    Some(d) if d != m.degree() => return None,
                    _ => {}
                }
            }
        }
        deg
    }

    /// Iterates `(index, monomial, coefficient)` triples.
    pub fn iter_terms(&self) -> impl Iterator<Item = (MultiIndex, Mono, &Scalar)> {
        self.terms.iter().flat_map(|(i, p)| p.terms().iter().map(move |(m, c)| (*i, *m, c)))
    }

    /// Number of stored `(index, monomial)` pairs.
    pub fn num_terms(&self) -> usize {
        self.terms.values().map(|p| p.terms().len()).sum()
    }

    /// Serializes to the documented JSON layout.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(idx, p)| {
                let coeff: Vec<Value> = p
                    .terms()
                    .iter()
                    .map(|(m, c)| json!({"exponents": m.exponents(self.dim), "lambda_coeffs": scalar_to_json(c)}))
                    .collect();
                let index: Vec<usize> = idx.axes().iter().map(|a| a + 1).collect();
                json!({"index": index, "coeff": coeff})
            })
            .collect();
        json!({"ambient_dim": self.dim, "degree": self.degree, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<PolyForm> {
        let bad = |what: &str| Error::Json(format!("form: {what}"));
        let dim = v["ambient_dim"].as_u64().ok_or_else(|| bad("ambient_dim"))? as usize;
        let degree = v["degree"].as_i64().ok_or_else(|| bad("degree"))? as i32;
        if dim > MAX_DIM {
            return Err(Error::Dimension(format!("ambient_dim {dim}")));
        }
        let mut out = PolyForm::zero(dim, degree);
        for t in v["terms"].as_array().ok_or_else(|| bad("terms"))? {
            let axes: Vec<usize> = t["index"]
                .as_array()
                .ok_or_else(|| bad("index"))?
                .iter()
                .map(|a| a.as_u64().filter(|&a| a >= 1 && a as usize <= dim).map(|a| a as usize - 1))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("index entry"))?;
            let idx = MultiIndex::from_axes(&axes)?;
            if idx.len() as i32 != degree {
                return Err(bad("index length differs from degree"));
            }
            for c in t["coeff"].as_array().ok_or_else(|| bad("coeff"))? {
                let exps: Vec<u32> = c["exponents"]
                    .as_array()
                    .ok_or_else(|| bad("exponents"))?
                    .iter()
                    .map(|e| e.as_u64().map(|e| e as u32))
                    .collect::<Option<_>>()
                    .ok_or_else(|| bad("exponent entry"))?;
                if exps.len() != dim {
                    return Err(bad("exponent vector length"));
                }
                let mono = Mono::from_exponents(&exps)?;
                out.add_term(idx, mono, scalar_from_json(&c["lambda_coeffs"])?);
            }
        }
        Ok(out)
    }

    /// Text rendering with a chosen coordinate name (`x` or `xi`).
    pub fn display_with(&self, var: &str) -> String {
        struct D<'a>(&'a PolyForm, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, self.1)
            }
        }
        D(self, var).to_string()
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, var: &str) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, p) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[")?;
            p.fmt_with(f, var)?;
            write!(f, "]")?;
            if !idx.is_empty() {
                let parts: Vec<String> = idx.axes().iter().map(|a| format!("d{var}{}", a + 1)).collect();
                write!(f, " {}", parts.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, "x")
    }
}

/// `[["re","im"], ...]` by ascending power of lambda.
pub fn scalar_to_json(s: &Scalar) -> Value {
    Value::Array(
        s.coeffs()
            .iter()
            .map(|c| json!([c.re.to_string(), c.im.to_string()]))
            .collect(),
    )
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar> {
    let arr = v.as_array().ok_or_else(|| Error::Json("lambda_coeffs must be an array".into()))?;
    let mut coeffs = Vec::with_capacity(arr.len());
    for c in arr {
        let pair = c.as_array().filter(|p| p.len() == 2).ok_or_else(|| Error::Json("expected [re, im]".into()))?;
        let part = |x: &Value| -> Result<Rational> {
            match x {
                Value::String(s) => s.parse(),
                Value::Number(n) => n.to_string().parse(),
                _ => Err(Error::Json("rational must be a string".into())),
            }
        };
        coeffs.push(GaussianRational::new(part(&pair[0])?, part(&pair[1])?));
    }
    Ok(Scalar::from_coeffs(coeffs))
}

/// All `x^gamma dx_I` with `|gamma| <= max_degree` and `|I| = p`.
pub fn monomial_basis(m: usize, p: usize, max_degree: u32) -> Vec<PolyForm> {
    (0..=max_degree).flat_map(|k| homogeneous_basis(m, p, k)).collect()
}

/// All `x^gamma dx_I` with `|gamma| = degree` and `|I| = p`.
pub fn homogeneous_basis(m: usize, p: usize, degree: u32) -> Vec<PolyForm> {
    if p > m {
        return Vec::new();
    }
    let monos = Mono::all_of_degree(m, degree);
    let mut out = Vec::new();
    for idx in MultiIndex::all(m, p) {
        for mono in &monos {
            out.push(PolyForm::basis(m, idx, *mono));
        }
    }
    out
}

/// Size of [`monomial_basis`]: `C(m,p) * C(m+max_degree, m)`.
pub fn monomial_basis_len(m: usize, p: usize, max_degree: u32) -> Rational {
    &binomial(m as u32, p as u32) * &binomial(m as u32 + max_degree, m as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dx(m: usize, axes: &[usize]) -> PolyForm {
        PolyForm::basis(m, MultiIndex::from_axes(axes).unwrap(), Mono::one())
    }

    fn xform(m: usize, exps: &[u32], axes: &[usize]) -> PolyForm {
        PolyForm::basis(m, MultiIndex::from_axes(axes).unwrap(), Mono::from_exponents(exps).unwrap())
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(dx(2, &[0]).wedge(&dx(2, &[1])).unwrap(), dx(2, &[0, 1]));
        assert!(dx(2, &[0]).wedge(&dx(2, &[0])).unwrap().is_zero());
        let a = xform(2, &[1, 0], &[0]);
        let b = xform(2, &[0, 1], &[1]);
        assert_eq!(a.wedge(&b).unwrap(), xform(2, &[1, 1], &[0, 1]));
    }

    #[test]
    fn d_examples() {
        assert_eq!(xform(2, &[1, 1], &[0]).d(), xform(2, &[1, 0], &[0, 1]).neg());
        assert!(dx(3, &[1]).d().is_zero());
        assert_eq!(xform(3, &[0, 0, 1], &[0]).d(), dx(3, &[0, 2]).neg());
    }

    #[test]
    fn delta_examples() {
        assert_eq!(xform(2, &[1, 0], &[0]).codifferential(), PolyForm::function(2, Poly::constant(Scalar::from_int(-1))));
        assert!(dx(2, &[0]).codifferential().is_zero());
        let w = xform(2, &[2, 0], &[1]);
        let lap = w.d().codifferential().add(&w.codifferential().d()).unwrap();
        assert_eq!(lap, dx(2, &[1]).scale(&Scalar::from_int(-2)));
        assert_eq!(lap, w.laplacian());
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(dx(2, &[0]).hodge_star(), dx(2, &[1]));
        assert_eq!(dx(2, &[1]).hodge_star(), dx(2, &[0]).neg());
        assert_eq!(dx(3, &[0, 1]).hodge_star(), dx(3, &[2]));
        assert_eq!(dx(4, &[0, 1]).hodge_star().hodge_star(), dx(4, &[0, 1]));
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(dx(3, &[2, 0]).scale(&Scalar::from_int(-1)).interior(2).unwrap(), dx(3, &[0]));
        let e = dx(2, &[0, 1]).euler_insert(false);
        assert_eq!(e, xform(2, &[1, 0], &[1]).sub(&xform(2, &[0, 1], &[0])).unwrap());
        let one = PolyForm::function(3, Poly::constant(Scalar::one()));
        assert_eq!(one.alpha_wedge(true), xform(3, &[1, 0, 0], &[0]).add(&xform(3, &[0, 1, 0], &[1])).unwrap());
        assert!(dx(2, &[0]).interior(5).is_err());
    }

    #[test]
    fn pullback_examples() {
        let w = xform(3, &[0, 0, 1], &[0]).add(&dx(3, &[2])).unwrap();
        assert!(w.pullback().unwrap().is_zero());
        assert_eq!(xform(3, &[1, 0, 0], &[0]).pullback().unwrap(), xform(2, &[1, 0], &[0]));
        let g = xform(3, &[1, 0, 0], &[0, 1]).add(&xform(3, &[0, 0, 1], &[0, 1])).unwrap();
        assert_eq!(g.pullback().unwrap(), xform(2, &[1, 0], &[0, 1]));
    }

    #[test]
    fn basis_counts() {
        assert_eq!(monomial_basis(1, 0, 1).len(), 2);
        assert_eq!(monomial_basis(2, 1, 0).len(), 2);
        assert_eq!(monomial_basis(2, 1, 1).len(), 6);
        for m in 1..=5 {
            for p in 0..=m {
                for k in 0..4 {
                    assert_eq!(Rational::from_int(monomial_basis(m, p, k).len() as i64), monomial_basis_len(m, p, k));
                }
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let w = xform(3, &[2, 0, 1], &[0, 2]).scale(&Scalar::lambda_plus(3));
        assert_eq!(PolyForm::from_json(&w.to_json()).unwrap(), w);
    }
}
