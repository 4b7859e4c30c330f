//! Typed operator expressions, their evaluation on polynomial forms, and an
//! exact equality test.
//!
//! An [`OpExpr`] is built from a small set of [`Atom`]s acting either on
//! forms on the ambient space `R^n` or on the slice `R^{n-1}`.  Every
//! expression carries its source and target [`Sig`].
//!
//! Evaluation compiles the tree into a linear combination of words (atom
//! sequences in application order) stored in a trie, so common prefixes are
//! computed once.

pub mod families;

use std::cell::RefCell;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{scalar_from_json, scalar_to_json, MultiIndex, Mono, Poly, PolyForm};
use crate::scalars::{GaussianRational, Scalar};

/// Which of the two Euclidean spaces a form lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Ambient,
    Slice,
}

/// Signature of a form space: the ambient dimension `n`, the form degree and
/// the side.  Slice forms live on `R^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sig {
    pub ambient_dim: usize,
    pub degree: i32,
    pub side: Side,
}

impl Sig {
    pub fn ambient(n: usize, p: i32) -> Self {
        Sig { ambient_dim: n, degree: p, side: Side::Ambient }
    }

    pub fn slice(n: usize, p: i32) -> Self {
        Sig { ambient_dim: n, degree: p, side: Side::Slice }
    }

    /// Dimension of the space the forms live on.
    pub fn form_dim(&self) -> usize {
        match self.side {
            Side::Ambient => self.ambient_dim,
            Side::Slice => self.ambient_dim - 1,
        }
    }

    fn with_degree(&self, degree: i32) -> Sig {
        Sig { degree, ..*self }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient_dim": self.ambient_dim,
            "degree": self.degree,
            "side": match self.side { Side::Ambient => "ambient", Side::Slice => "slice" },
        })
    }

    pub fn from_json(v: &Value) -> Result<Sig> {
        let n = v
            .get("ambient_dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("signature needs ambient_dim".into()))? as usize;
        let degree = v
            .get("degree")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Json("signature needs degree".into()))? as i32;
        let side = match v.get("side").and_then(Value::as_str) {
            Some("ambient") => Side::Ambient,
            Some("slice") => Side::Slice,
            _ => return Err(Error::Json("side must be \"ambient\" or \"slice\"".into())),
        };
        if side == Side::Slice && n == 0 {
            return Err(Error::Json("slice of R^0".into()));
        }
        Ok(Sig { ambient_dim: n, degree, side })
    }
}

impl fmt::Display for Sig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Side::Ambient => "ambient",
            Side::Slice => "slice",
        };
        write!(f, "{}-forms on R^{} ({side})", self.degree, self.form_dim())
    }
}

/// Elementary operators.
///
/// `D`, `Delta`, `Lap` and `Star` act on whichever side their source lives;
/// the remaining ones need ambient input.  `Lap` is the Hodge Laplacian
/// `d delta + delta d`, and the `Tan*` atoms are the versions that only use
/// the first `n-1` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    D,
    Delta,
    Lap,
    Star,
    Dn,
    InteriorN,
    Pullback,
    InsertNormal,
    TanD,
    TanDelta,
    TanLap,
    Id,
}

impl Atom {
    pub const ALL: [Atom; 12] = [
        Atom::D,
        Atom::Delta,
        Atom::Lap,
        Atom::Star,
        Atom::Dn,
        Atom::InteriorN,
        Atom::Pullback,
        Atom::InsertNormal,
        Atom::TanD,
        Atom::TanDelta,
        Atom::TanLap,
        Atom::Id,
    ];

    /// Target signature for the given source, or an error if the atom cannot act there.
    pub fn target(&self, src: Sig) -> Result<Sig> {
        let need_ambient = |what: &str| -> Result<()> {
            if src.side != Side::Ambient {
                return Err(Error::Signature(format!("{what} needs ambient input, got {src}")));
            }
            if src.ambient_dim == 0 {
                return Err(Error::Signature(format!("{what} on R^0")));
            }
            Ok(())
        };
        match self {
            Atom::D => Ok(src.with_degree(src.degree + 1)),
            Atom::Delta => Ok(src.with_degree(src.degree - 1)),
            Atom::Lap | Atom::Id => Ok(src),
            Atom::Star => Ok(src.with_degree(src.form_dim() as i32 - src.degree)),
            Atom::Dn | Atom::TanLap => {
                need_ambient(self.name())?;
                Ok(src)
            }
            Atom::TanD => {
                need_ambient(self.name())?;
                Ok(src.with_degree(src.degree + 1))
            }
            Atom::InteriorN | Atom::TanDelta => {
                need_ambient(self.name())?;
                Ok(src.with_degree(src.degree - 1))
            }
            Atom::Pullback => {
                need_ambient(self.name())?;
                Ok(Sig::slice(src.ambient_dim, src.degree))
            }
            Atom::InsertNormal => {
                need_ambient(self.name())?;
                Ok(Sig::slice(src.ambient_dim, src.degree - 1))
            }
        }
    }

    /// Differential order: one for first-order operators, two for Laplacians.
    pub fn order(&self) -> u32 {
        match self {
            Atom::D | Atom::Delta | Atom::Dn | Atom::TanD | Atom::TanDelta => 1,
            Atom::Lap | Atom::TanLap => 2,
            _ => 0,
        }
    }

    /// Stable identifier used in JSON.
    pub fn name(&self) -> &'static str {
        match self {
            Atom::D => "d",
            Atom::Delta => "delta",
            Atom::Lap => "laplacian",
            Atom::Star => "hodge",
            Atom::Dn => "dn",
            Atom::InteriorN => "interior_n",
            Atom::Pullback => "pullback",
            Atom::InsertNormal => "insert_normal",
            Atom::TanD => "tangential_d",
            Atom::TanDelta => "tangential_delta",
            Atom::TanLap => "tangential_laplacian",
            Atom::Id => "id",
        }
    }

    pub fn from_name(s: &str) -> Option<Atom> {
        Atom::ALL.iter().copied().find(|a| a.name() == s)
    }

    /// Surface token in the operator language for an atom acting on `side`.
    pub fn token(&self, side: Side) -> &'static str {
        let amb = side == Side::Ambient;
        match self {
            Atom::D => if amb { "dbar" } else { "d" },
            Atom::Delta => if amb { "deltabar" } else { "delta" },
            Atom::Lap => if amb { "Delta_bar" } else { "Delta" },
            Atom::Star => if amb { "star_bar" } else { "star" },
            Atom::Dn => "dn",
            Atom::InteriorN => "i_n",
            Atom::Pullback => "iota",
            Atom::InsertNormal => "iota i_n",
            Atom::TanD => "dtan",
            Atom::TanDelta => "deltatan",
            Atom::TanLap => "Deltatan",
            Atom::Id => "id",
        }
    }
}

/// How atoms act: on honest polynomial forms, or on full symbols where `d/dx_k`
/// is replaced by multiplication with `xi_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Field,
    Symbol,
}

fn minus_norm_sq(dim: usize) -> Poly {
    let mut p = Poly::zero();
    for k in 0..dim {
        let mut e = [0u32; 8];
        e[k] = 2;
        p.add_term(Mono::from_exponents(&e[..dim.max(1)]).expect("small"), Scalar::from_int(-1));
    }
    p
}

/// Applies one atom.  `w` must carry the atom's source type.
pub fn apply_atom(atom: Atom, w: &PolyForm, mode: Mode) -> Result<PolyForm> {
    let dim = w.dim();
    let last = dim.checked_sub(1);
    let need_last = || last.ok_or_else(|| Error::Dimension("normal direction on R^0".into()));
    Ok(match (mode, atom) {
        (_, Atom::Id) => w.clone(),
        (_, Atom::Star) => w.hodge_star(),
        (_, Atom::InteriorN) => w.interior(need_last()?)?,
        (Mode::Field, Atom::D) => w.d(),
        (Mode::Field, Atom::Delta) => w.codifferential(),
        (Mode::Field, Atom::Lap) => w.laplacian(),
        (Mode::Field, Atom::Dn) => w.partial(need_last()?)?,
        (Mode::Field, Atom::Pullback) => w.pullback()?,
        (Mode::Field, Atom::InsertNormal) => w.interior(need_last()?)?.pullback()?,
        (Mode::Field, Atom::TanD) => w.d_with(true),
        (Mode::Field, Atom::TanDelta) => w.delta_with(true),
        (Mode::Field, Atom::TanLap) => w.laplacian_with(true),
        (Mode::Symbol, Atom::D) => w.alpha_wedge(false),
        (Mode::Symbol, Atom::Delta) => w.euler_insert(false).neg(),
        (Mode::Symbol, Atom::Lap) => w.mul_poly(&minus_norm_sq(dim)),
        (Mode::Symbol, Atom::Dn) => w.mul_coord(need_last()?),
        (Mode::Symbol, Atom::Pullback) => w.drop_normal_components()?,
        (Mode::Symbol, Atom::InsertNormal) => w.interior(need_last()?)?.drop_normal_components()?,
        (Mode::Symbol, Atom::TanD) => w.alpha_wedge(true),
        (Mode::Symbol, Atom::TanDelta) => w.euler_insert(true).neg(),
        (Mode::Symbol, Atom::TanLap) => w.mul_poly(&minus_norm_sq(dim.saturating_sub(1))),
    })
}

/// Expression node.  `Compose` lists factors in printed order, so the last
/// entry is applied first.  The zero operator is an empty `Sum`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Atom(Atom),
    Compose(Vec<OpExpr>),
    Sum(Vec<OpExpr>),
    Scale(Scalar, Box<OpExpr>),
}

/// A well-typed operator expression.
#[derive(Debug, Clone, PartialEq)]
pub struct OpExpr {
    node: Node,
    source: Sig,
    target: Sig,
}

/// A word in application order: `word[0]` acts first.
pub type Word = Vec<Atom>;

/// Finite linear combination of words with `lambda`-polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinComb {
    terms: BTreeMap<Word, Scalar>,
}

impl LinComb {
    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut o) => {
                let v = o.get() + &c;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb, s: &Scalar) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c * s);
        }
    }

    /// `self` applied after `first`.
    fn after(&self, first: &LinComb) -> LinComb {
        let mut out = LinComb::default();
        for (w1, c1) in &first.terms {
            for (w2, c2) in &self.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> LinComb {
        let mut out = LinComb::default();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Largest differential order of a word.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|w| w.iter().map(Atom::order).sum()).max().unwrap_or(0)
    }
}

impl OpExpr {
    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn source(&self) -> Sig {
        self.source
    }

    pub fn target(&self) -> Sig {
        self.target
    }

    pub fn atom(a: Atom, source: Sig) -> Result<OpExpr> {
        let target = a.target(source)?;
        Ok(OpExpr { node: Node::Atom(a), source, target })
    }

    pub fn id(source: Sig) -> OpExpr {
        OpExpr { node: Node::Atom(Atom::Id), source, target: source }
    }

    pub fn zero(source: Sig, target: Sig) -> OpExpr {
        OpExpr { node: Node::Sum(Vec::new()), source, target }
    }

    /// Composition in printed order: `compose([A, B])` is `A ∘ B`.
    pub fn compose(parts: Vec<OpExpr>) -> Result<OpExpr> {
        let (first, last) = match (parts.last(), parts.first()) {
            (Some(f), Some(l)) => (f.source, l.target),
            _ => return Err(Error::Signature("empty composition".into())),
        };
        for pair in parts.windows(2) {
            if pair[1].target != pair[0].source {
                return Err(Error::Signature(format!(
                    "cannot compose: {} does not feed {}",
                    pair[1].target, pair[0].source
                )));
            }
        }
        Ok(OpExpr { node: Node::Compose(parts), source: first, target: last })
    }

    /// A sum of at least one operator sharing the same signature.
    pub fn sum(parts: Vec<OpExpr>) -> Result<OpExpr> {
        let Some(head) = parts.first() else {
            return Err(Error::Signature("empty sum has no signature".into()));
        };
        let (s, t) = (head.source, head.target);
        Self::sum_typed(parts, s, t)
    }

    /// A sum with explicit signature; empty input gives the zero operator.
    pub fn sum_typed(parts: Vec<OpExpr>, source: Sig, target: Sig) -> Result<OpExpr> {
        for p in &parts {
            if p.source != source || p.target != target {
                return Err(Error::Signature(format!(
                    "summand {} -> {} in a sum of type {} -> {}",
                    p.source, p.target, source, target
                )));
            }
        }
        Ok(OpExpr { node: Node::Sum(parts), source, target })
    }

    pub fn scale(s: Scalar, e: OpExpr) -> OpExpr {
        let (source, target) = (e.source, e.target);
        OpExpr { node: Node::Scale(s, Box::new(e)), source, target }
    }

    /// A flat composition of atoms given in printed order, typed from `source`.
    /// A single atom is returned bare and an empty list gives the identity.
    pub fn chain(source: Sig, atoms: &[Atom]) -> Result<OpExpr> {
        let mut sig = source;
        let mut parts = Vec::with_capacity(atoms.len());
        for a in atoms.iter().rev() {
            let e = OpExpr::atom(*a, sig)?;
            sig = e.target;
            parts.push(e);
        }
        parts.reverse();
        match parts.len() {
            0 => Ok(OpExpr::id(source)),
            1 => Ok(parts.pop().expect("one element")),
            _ => OpExpr::compose(parts),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &OpExpr) -> Result<OpExpr> {
        OpExpr::compose(vec![self.clone(), first.clone()])
    }

    pub fn plus(&self, other: &OpExpr) -> Result<OpExpr> {
        OpExpr::sum(vec![self.clone(), other.clone()])
    }

    pub fn minus(&self, other: &OpExpr) -> Result<OpExpr> {
        OpExpr::sum(vec![self.clone(), OpExpr::scale(Scalar::from_int(-1), other.clone())])
    }

    /// Expands into a linear combination of words.  `InsertNormal` becomes
    /// `InteriorN` followed by `Pullback`; identities disappear.
    pub fn compile(&self) -> LinComb {
        match &self.node {
            Node::Atom(Atom::Id) => {
                let mut lc = LinComb::default();
                lc.add_term(Vec::new(), Scalar::one());
                lc
            }
            Node::Atom(Atom::InsertNormal) => {
                let mut lc = LinComb::default();
                lc.add_term(vec![Atom::InteriorN, Atom::Pullback], Scalar::one());
                lc
            }
            Node::Atom(a) => {
                let mut lc = LinComb::default();
                lc.add_term(vec![*a], Scalar::one());
                lc
            }
            Node::Sum(parts) => {
                let mut lc = LinComb::default();
                for p in parts {
                    lc.add_scaled(&p.compile(), &Scalar::one());
                }
                lc
            }
            Node::Scale(s, e) => e.compile().map_coeffs(|c| c * s),
            Node::Compose(parts) => {
                let mut acc: Option<LinComb> = None;
                for p in parts.iter().rev() {
                    let lc = p.compile();
                    acc = Some(match acc {
                        None => lc,
                        Some(first) => lc.after(&first),
                    });
                }
                acc.unwrap_or_default()
            }
        }
    }

    /// Differential order of the expanded operator.
    pub fn order(&self) -> u32 {
        self.compile().order()
    }

    /// Rebuilds a flat expression `sum c_w w` from a word combination.
    pub fn from_lincomb(lc: &LinComb, source: Sig, target: Sig) -> Result<OpExpr> {
        let mut parts = Vec::new();
        for (w, c) in lc.terms() {
            let printed: Vec<Atom> = w.iter().rev().copied().collect();
            let e = OpExpr::chain(source, &printed)?;
            if e.target != target {
                return Err(Error::Signature(format!("word lands in {} instead of {target}", e.target)));
            }
            parts.push(if c.is_one() { e } else { OpExpr::scale(c.clone(), e) });
        }
        OpExpr::sum_typed(parts, source, target)
    }

    /// Applies a ring map to every scalar, e.g. evaluation or an affine change of `lambda`.
    pub fn map_scalars(&self, f: &dyn Fn(&Scalar) -> Scalar) -> OpExpr {
        let node = match &self.node {
            Node::Atom(a) => Node::Atom(*a),
            Node::Compose(ps) => Node::Compose(ps.iter().map(|p| p.map_scalars(f)).collect()),
            Node::Sum(ps) => Node::Sum(ps.iter().map(|p| p.map_scalars(f)).collect()),
            Node::Scale(s, e) => Node::Scale(f(s), Box::new(e.map_scalars(f))),
        };
        OpExpr { node, source: self.source, target: self.target }
    }

    /// Evaluation at `lambda = x`.
    pub fn specialize(&self, x: &GaussianRational) -> OpExpr {
        self.map_scalars(&|s| Scalar::constant(s.eval_at(x)))
    }

    /// Substitutes `lambda -> a*lambda + b`.
    pub fn substitute(&self, a: &GaussianRational, b: &GaussianRational) -> OpExpr {
        self.map_scalars(&|s| s.compose_affine(a, b))
    }

    /// `d/dlambda`, pushed through sums, scalings (Leibniz) and compositions.
    pub fn derivative(&self) -> OpExpr {
        let zero = OpExpr::zero(self.source, self.target);
        match &self.node {
            Node::Atom(_) => zero,
            Node::Sum(ps) => OpExpr {
                node: Node::Sum(ps.iter().map(OpExpr::derivative).filter(|e| !e.is_trivially_zero()).collect()),
                source: self.source,
                target: self.target,
            },
            Node::Scale(s, e) => {
                let mut parts = Vec::new();
                let ds = s.d_dlambda();
                if !ds.is_zero() {
                    parts.push(OpExpr::scale(ds, (**e).clone()));
                }
                let de = e.derivative();
                if !de.is_trivially_zero() {
                    parts.push(OpExpr::scale(s.clone(), de));
                }
                OpExpr { node: Node::Sum(parts), source: self.source, target: self.target }
            }
            Node::Compose(ps) => {
                let mut parts = Vec::new();
                for k in 0..ps.len() {
                    let dk = ps[k].derivative();
                    if dk.is_trivially_zero() {
                        continue;
                    }
                    let mut factors = ps.clone();
                    factors[k] = dk;
                    parts.push(OpExpr { node: Node::Compose(factors), source: self.source, target: self.target });
                }
                OpExpr { node: Node::Sum(parts), source: self.source, target: self.target }
            }
        }
    }

    /// True for an empty sum, possibly nested or scaled.
    pub fn is_trivially_zero(&self) -> bool {
        match &self.node {
            Node::Sum(ps) => ps.iter().all(OpExpr::is_trivially_zero),
            Node::Scale(s, e) => s.is_zero() || e.is_trivially_zero(),
            Node::Compose(ps) => ps.iter().any(OpExpr::is_trivially_zero),
            Node::Atom(_) => false,
        }
    }

    /// Compiles for repeated application.
    pub fn compiled(&self) -> CompiledOp {
        CompiledOp::new(&self.compile(), self.source, self.target)
    }

    /// One-off application to a form of the source type.
    pub fn apply(&self, w: &PolyForm) -> Result<PolyForm> {
        self.compiled().apply(w)
    }

    /// Serialized tree with signatures.
    pub fn to_json(&self) -> Value {
        let node = match &self.node {
            Node::Atom(a) => json!({ "atom": a.name() }),
            Node::Compose(ps) => json!({ "compose": ps.iter().map(OpExpr::to_json).collect::<Vec<_>>() }),
            Node::Sum(ps) => json!({ "sum": ps.iter().map(OpExpr::to_json).collect::<Vec<_>>() }),
            Node::Scale(s, e) => json!({ "scale": { "scalar": scalar_to_json(s), "expr": e.to_json() } }),
        };
        json!({ "source": self.source.to_json(), "target": self.target.to_json(), "node": node })
    }

    /// Parses and re-checks an operator from [`OpExpr::to_json`] output.
    pub fn from_json(v: &Value) -> Result<OpExpr> {
        let source = Sig::from_json(v.get("source").ok_or_else(|| Error::Json("missing source".into()))?)?;
        let target = Sig::from_json(v.get("target").ok_or_else(|| Error::Json("missing target".into()))?)?;
        let node = v.get("node").ok_or_else(|| Error::Json("missing node".into()))?;
        let list = |key: &str| -> Result<Option<Vec<OpExpr>>> {
            match node.get(key) {
                None => Ok(None),
                Some(Value::Array(items)) => Ok(Some(items.iter().map(OpExpr::from_json).collect::<Result<_>>()?)),
                Some(_) => Err(Error::Json(format!("{key} must be an array"))),
            }
        };
        let e = if let Some(name) = node.get("atom") {
            let name = name.as_str().ok_or_else(|| Error::Json("atom must be a string".into()))?;
            let a = Atom::from_name(name).ok_or_else(|| Error::Json(format!("unknown atom {name}")))?;
            OpExpr::atom(a, source)?
        } else if let Some(ps) = list("compose")? {
            OpExpr::compose(ps)?
        } else if let Some(ps) = list("sum")? {
            OpExpr::sum_typed(ps, source, target)?
        } else if let Some(sc) = node.get("scale") {
            let s = scalar_from_json(sc.get("scalar").ok_or_else(|| Error::Json("scale needs scalar".into()))?)?;
            let e = OpExpr::from_json(sc.get("expr").ok_or_else(|| Error::Json("scale needs expr".into()))?)?;
            OpExpr::scale(s, e)
        } else {
            return Err(Error::Json("unknown node kind".into()));
        };
        if e.source != source || e.target != target {
            return Err(Error::Json("stored signature disagrees with the tree".into()));
        }
        Ok(e)
    }
}

impl fmt::Display for OpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::dsl::pretty_print(self))
    }
}

#[derive(Debug, Default)]
struct TrieNode {
    coeff: Option<Scalar>,
    children: Vec<(Atom, TrieNode)>,
}

impl TrieNode {
    fn insert(&mut self, w: &[Atom], c: &Scalar) {
        match w.split_first() {
            None => self.coeff = Some(c.clone()),
            Some((a, rest)) => {
                let pos = match self.children.iter().position(|(b, _)| b == a) {
                    Some(k) => k,
                    None => {
                        self.children.push((*a, TrieNode::default()));
                        self.children.len() - 1
                    }
                };
                self.children[pos].1.insert(rest, c);
            }
        }
    }

    fn eval(&self, w: &PolyForm, mode: Mode, out: &mut PolyForm) -> Result<()> {
        if let Some(c) = &self.coeff {
            out.add_scaled(w, c)?;
        }
        for (a, child) in &self.children {
            let next = apply_atom(*a, w, mode)?;
            if !next.is_zero() {
                child.eval(&next, mode, out)?;
            }
        }
        Ok(())
    }
}

/// A compiled operator with a cache of images of unit basis forms.
#[derive(Debug)]
pub struct CompiledOp {
    source: Sig,
    target: Sig,
    trie: TrieNode,
    order: u32,
    cache: RefCell<HashMap<(MultiIndex, Mono), PolyForm>>,
}

impl CompiledOp {
    pub fn new(lc: &LinComb, source: Sig, target: Sig) -> CompiledOp {
        let mut trie = TrieNode::default();
        for (w, c) in lc.terms() {
            trie.insert(w, c);
        }
        CompiledOp { source, target, trie, order: lc.order(), cache: RefCell::new(HashMap::new()) }
    }

    pub fn source(&self) -> Sig {
        self.source
    }

    pub fn target(&self) -> Sig {
        self.target
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn zero_out(&self) -> PolyForm {
        PolyForm::zero(self.target.form_dim(), self.target.degree)
    }

    fn check_input(&self, w: &PolyForm) -> Result<()> {
        if w.dim() != self.source.form_dim() || w.degree() != self.source.degree {
            return Err(Error::Signature(format!(
                "operator on {} applied to a {}-form on R^{}",
                self.source,
                w.degree(),
                w.dim()
            )));
        }
        Ok(())
    }

    fn unit_image(&self, idx: MultiIndex, m: Mono) -> Result<PolyForm> {
        if let Some(img) = self.cache.borrow().get(&(idx, m)) {
            return Ok(img.clone());
        }
        let mut out = self.zero_out();
        let b = PolyForm::basis(self.source.form_dim(), idx, m);
        self.trie.eval(&b, Mode::Field, &mut out)?;
        self.cache.borrow_mut().insert((idx, m), out.clone());
        Ok(out)
    }

    pub fn apply(&self, w: &PolyForm) -> Result<PolyForm> {
        self.check_input(w)?;
        let mut out = self.zero_out();
        for (idx, m, c) in w.iter_terms() {
            let img = self.unit_image(idx, m)?;
            out.add_scaled(&img, c)?;
        }
        Ok(out)
    }

    /// Full symbol: images of the constant basis forms with `d/dx_k -> xi_k`.
    pub fn symbol(&self) -> Result<Vec<(MultiIndex, PolyForm)>> {
        let dim = self.source.form_dim();
        let p = self.source.degree;
        if p < 0 || p as usize > dim {
            return Ok(Vec::new());
        }
        let mut res = Vec::new();
        for idx in MultiIndex::all(dim, p as usize) {
            let mut out = self.zero_out();
            self.trie.eval(&PolyForm::basis(dim, idx, Mono::one()), Mode::Symbol, &mut out)?;
            res.push((idx, out));
        }
        Ok(res)
    }
}

/// A basis form on which two operators differ, and the difference of their images.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub basis_form: PolyForm,
    pub residual: PolyForm,
}

fn check_same_sig(a: &OpExpr, b: &OpExpr) -> Result<()> {
    if a.source != b.source || a.target != b.target {
        return Err(Error::Signature(format!(
            "comparing {} -> {} with {} -> {}",
            a.source, a.target, b.source, b.target
        )));
    }
    Ok(())
}

/// Exact equality of two constant-coefficient operators with `lambda` symbolic.
///
/// Both sides are reduced to their full symbols, which determine the
/// operators.  On failure the witness is a monomial form `x^beta dx_I` read off
/// from the first nonzero symbol entry; its residual is nonzero.
pub fn op_equal(a: &OpExpr, b: &OpExpr) -> Result<Option<Witness>> {
    check_same_sig(a, b)?;
    let mut diff = a.compile();
    diff.add_scaled(&b.compile(), &Scalar::from_int(-1));
    if diff.is_zero() {
        return Ok(None);
    }
    let op = CompiledOp::new(&diff, a.source, a.target);
    for (idx, sym) in op.symbol()? {
        if let Some((_, m, _)) = sym.iter_terms().next() {
            let basis_form = PolyForm::basis(a.source.form_dim(), idx, m);
            let residual = op.apply(&basis_form)?;
            return Ok(Some(Witness { basis_form, residual }));
        }
    }
    Ok(None)
}

/// Convenience wrapper returning a plain boolean.
pub fn ops_equal(a: &OpExpr, b: &OpExpr) -> Result<bool> {
    Ok(op_equal(a, b)?.is_none())
}

/// Equality tested on every monomial basis form of polynomial degree at most `bound`.
pub fn op_equal_bounded(a: &OpExpr, b: &OpExpr, bound: u32) -> Result<Option<Witness>> {
    check_same_sig(a, b)?;
    let mut diff = a.compile();
    diff.add_scaled(&b.compile(), &Scalar::from_int(-1));
    let op = CompiledOp::new(&diff, a.source, a.target);
    let dim = a.source.form_dim();
    let p = a.source.degree;
    if diff.is_zero() || p < 0 || p as usize > dim {
        return Ok(None);
    }
    for basis_form in crate::exterior::monomial_basis(dim, p as usize, bound) {
        let residual = op.apply(&basis_form)?;
        if !residual.is_zero() {
            return Ok(Some(Witness { basis_form, residual }));
        }
    }
    Ok(None)
}

fn rewrite_once(w: &[Atom]) -> Option<(i64, Word)> {
    use Atom::*;
    for k in 0..w.len().saturating_sub(1) {
        let (a, b) = (w[k], w[k + 1]);
        if a == b && matches!(a, D | Delta | InteriorN | TanD | TanDelta) {
            return Some((0, Vec::new()));
        }
        let swapped = match (a, b) {
            (D, Pullback) | (TanD, Pullback) => Some((D, 1)),
            (TanDelta, Pullback) => Some((Delta, 1)),
            (TanLap, Pullback) => Some((Lap, 1)),
            _ => None,
        };
        if let Some((slice_atom, sign)) = swapped {
            let mut out = w[..k].to_vec();
            out.push(Pullback);
            out.push(slice_atom);
            out.extend_from_slice(&w[k + 2..]);
            return Some((sign, out));
        }
        if k + 2 < w.len() && (a, b, w[k + 2]) == (Delta, InteriorN, Pullback) {
            let mut out = w[..k].to_vec();
            out.extend_from_slice(&[InteriorN, Pullback, Delta]);
            out.extend_from_slice(&w[k + 3..]);
            return Some((-1, out));
        }
    }
    None
}

/// Canonical word expansion used for structural comparison.
///
/// Besides collecting like words it applies the identities `d d = 0`,
/// `delta delta = 0`, `i_n i_n = 0`, `iota^* dbar = d iota^*` (and the
/// tangential analogues) and `iota^* i_n deltabar = -delta iota^* i_n`.
pub fn normalize(e: &OpExpr) -> LinComb {
    let mut current = e.compile();
    loop {
        let mut changed = false;
        let mut next = LinComb::default();
        for (w, c) in current.terms() {
            match rewrite_once(w) {
                Some((sign, nw)) => {
                    changed = true;
                    if sign != 0 {
                        next.add_term(nw, c * &Scalar::from_int(sign));
                    }
                }
                None => next.add_term(w.clone(), c.clone()),
            }
        }
        current = next;
        if !changed {
            return current;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(dim: usize, exps: &[u32], axes: &[usize]) -> PolyForm {
        let mut e = exps.to_vec();
        e.resize(dim, 0);
        PolyForm::basis(dim, MultiIndex::from_axes(axes).unwrap(), Mono::from_exponents(&e).unwrap())
    }

    #[test]
    fn identity_and_scaling() {
        let w = x(3, &[1, 2, 0], &[1]);
        assert_eq!(OpExpr::id(Sig::ambient(3, 1)).apply(&w).unwrap(), w);
        let d2 = OpExpr::scale(Scalar::from_int(2), OpExpr::atom(Atom::D, Sig::slice(3, 0)).unwrap());
        let x1 = x(2, &[1], &[]);
        assert_eq!(d2.apply(&x1).unwrap(), PolyForm::term(2, MultiIndex::single(0), Mono::one(), 2.into()));
    }

    #[test]
    fn pullback_kills_normal_differential() {
        let e = OpExpr::chain(Sig::ambient(3, 0), &[Atom::Pullback, Atom::D]).unwrap();
        assert!(e.apply(&x(3, &[0, 0, 1], &[])).unwrap().is_zero());
    }

    #[test]
    fn chain_types_and_rejects() {
        let e = OpExpr::chain(Sig::ambient(4, 2), &[Atom::D, Atom::InsertNormal, Atom::Dn]).unwrap();
        assert_eq!(e.target(), Sig::slice(4, 2));
        assert!(OpExpr::chain(Sig::ambient(4, 2), &[Atom::Dn, Atom::Pullback]).is_err());
    }

    #[test]
    fn symbol_equality_detects_scalar_change() {
        let s = Sig::ambient(3, 1);
        let a = OpExpr::scale(Scalar::lambda_plus(1), OpExpr::atom(Atom::Pullback, s).unwrap());
        let b = OpExpr::scale(Scalar::lambda_plus(2), OpExpr::atom(Atom::Pullback, s).unwrap());
        assert!(ops_equal(&a, &a).unwrap());
        let wit = op_equal(&a, &b).unwrap().unwrap();
        assert!(wit.basis_form.homogeneity() == Some(0));
        assert!(!wit.residual.is_zero());
    }

    #[test]
    fn dd_is_zero_and_commutations() {
        let s = Sig::ambient(4, 1);
        let dd = OpExpr::chain(s, &[Atom::D, Atom::D]).unwrap();
        assert!(ops_equal(&dd, &OpExpr::zero(s, Sig::ambient(4, 3))).unwrap());
        let lhs = OpExpr::chain(s, &[Atom::Pullback, Atom::D]).unwrap();
        let rhs = OpExpr::chain(s, &[Atom::D, Atom::Pullback]).unwrap();
        assert!(ops_equal(&lhs, &rhs).unwrap());
        let lhs = OpExpr::chain(Sig::ambient(4, 2), &[Atom::InsertNormal, Atom::Delta]).unwrap();
        let rhs = OpExpr::scale(
            Scalar::from_int(-1),
            OpExpr::chain(Sig::ambient(4, 2), &[Atom::Delta, Atom::InsertNormal]).unwrap(),
        );
        assert!(ops_equal(&lhs, &rhs).unwrap());
        assert_eq!(normalize(&lhs), normalize(&rhs));
    }

    #[test]
    fn symbol_and_basis_modes_agree() {
        let s = Sig::ambient(3, 1);
        let lap = OpExpr::atom(Atom::Lap, s).unwrap();
        let dd = OpExpr::chain(s, &[Atom::D, Atom::Delta]).unwrap().plus(&OpExpr::chain(s, &[Atom::Delta, Atom::D]).unwrap()).unwrap();
        assert!(ops_equal(&lap, &dd).unwrap());
        assert!(op_equal_bounded(&lap, &dd, 3).unwrap().is_none());
        let tan = OpExpr::atom(Atom::TanLap, s).unwrap();
        assert!(op_equal(&lap, &tan).unwrap().is_some());
        assert!(op_equal_bounded(&lap, &tan, 2).unwrap().is_some());
    }

    #[test]
    fn specialize_and_derivative() {
        let s = Sig::ambient(3, 1);
        let e = OpExpr::scale(Scalar::lambda_plus(1), OpExpr::atom(Atom::Pullback, s).unwrap());
        assert!(e.specialize(&GaussianRational::from_int(-1)).compile().is_zero());
        let de = e.derivative();
        assert!(ops_equal(&de, &OpExpr::atom(Atom::Pullback, s).unwrap()).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let s = Sig::ambient(3, 1);
        let e = OpExpr::chain(s, &[Atom::D, Atom::InsertNormal, Atom::Dn]).unwrap();
        let e = OpExpr::scale(Scalar::lambda_plus(-1), e);
        assert_eq!(OpExpr::from_json(&e.to_json()).unwrap(), e);
    }
}
