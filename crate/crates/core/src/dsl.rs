//! The operator language: tokenizer, parser and pretty printer.
//!
//! Atoms are juxtaposed to compose (rightmost acts first), `+`/`-` add,
//! coefficients precede the operator they scale, and `^k` repeats a factor.
//! Unbarred tokens (`d`, `delta`, `Delta`, `star`) act on `R^{n-1}`, barred
//! ones (`dbar`, `deltabar`, `Delta_bar`, `star_bar`) on `R^n`.

use crate::error::{Error, Result};
use crate::operators::{Atom, Node, OpExpr, Side, Sig};
use crate::scalars::{GaussianRational, Rational, Scalar};

/// Values of the named integers `n`, `p` and `N` that may appear in coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bindings {
    pub n: usize,
    pub p: usize,
    pub big_n: Option<i64>,
}

impl Bindings {
    pub fn new(n: usize, p: usize) -> Self {
        Bindings { n, p, big_n: None }
    }

    pub fn with_order(mut self, big_n: i64) -> Self {
        self.big_n = Some(big_n);
        self
    }

    fn lookup(&self, name: &str) -> Option<i64> {
        match name {
            "n" => Some(self.n as i64),
            "p" => Some(self.p as i64),
            "N" => self.big_n,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|x| x.1).collect();
            let v = s.parse::<i64>().map_err(|_| Error::Syntax { pos, msg: format!("integer {s} too large") })?;
            out.push(Token { tok: Tok::Int(v), pos });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().map(|x| x.1).collect()), pos });
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
        } else {
            return Err(Error::Syntax { pos, msg: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

/// An atom token together with the side it insists on.
#[derive(Debug, Clone, Copy)]
struct AtomTok {
    atom: Atom,
    side: Option<Side>,
}

fn atom_token(name: &str) -> Option<AtomTok> {
    let (atom, side) = match name {
        "d" => (Atom::D, Some(Side::Slice)),
        "dbar" => (Atom::D, Some(Side::Ambient)),
        "delta" => (Atom::Delta, Some(Side::Slice)),
        "deltabar" => (Atom::Delta, Some(Side::Ambient)),
        "Delta" => (Atom::Lap, Some(Side::Slice)),
        "Delta_bar" => (Atom::Lap, Some(Side::Ambient)),
        "star" => (Atom::Star, Some(Side::Slice)),
        "star_bar" => (Atom::Star, Some(Side::Ambient)),
        "dn" => (Atom::Dn, None),
        "i_n" => (Atom::InteriorN, None),
        "iota" => (Atom::Pullback, None),
        "dtan" => (Atom::TanD, None),
        "deltatan" => (Atom::TanDelta, None),
        "Deltatan" => (Atom::TanLap, None),
        "id" => (Atom::Id, None),
        _ => return None,
    };
    Some(AtomTok { atom, side })
}

/// Untyped syntax tree.
#[derive(Debug, Clone)]
enum Ast {
    Atom(AtomTok, usize),
    Compose(Vec<Ast>),
    Sum(Vec<Ast>),
    Scale(Scalar, Box<Ast>),
    Zero,
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    end: usize,
    bind: &'a Bindings,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.pos).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn is_atom_at(&self, k: usize) -> bool {
        matches!(self.toks.get(k).map(|t| &t.tok), Some(Tok::Ident(s)) if atom_token(s).is_some())
    }

    /// Whether the parenthesized group opening at the cursor contains no atom tokens.
    fn paren_is_scalar(&self) -> bool {
        let mut depth = 0usize;
        let mut k = self.at;
        while let Some(t) = self.toks.get(k) {
            match &t.tok {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') => {
                    depth -= 1;
                    if depth == 0 {
                        return true;
                    }
                }
                Tok::Ident(_) if self.is_atom_at(k) => return false,
                _ => {}
            }
            k += 1;
        }
        true
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut terms = Vec::new();
        let lead_neg = self.eat('-');
        let first = self.term()?;
        terms.push(if lead_neg { negate(first) } else { first });
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                let t = self.term()?;
                terms.push(negate(t));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { Ast::Sum(terms) })
    }

    fn starts_coeff(&self) -> bool {
        match self.peek() {
            Some(Tok::Int(_)) => true,
            Some(Tok::Ident(s)) => s == "lambda" || s == "i" || self.bind.lookup(s).is_some() && atom_token(s).is_none(),
            Some(Tok::Sym('(')) => self.paren_is_scalar(),
            _ => false,
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => atom_token(s).is_some(),
            Some(Tok::Sym('(')) => !self.paren_is_scalar(),
            _ => false,
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let start = self.pos();
        let mut coeffs = Vec::new();
        let mut lone_zero = false;
        while self.starts_coeff() {
            lone_zero = coeffs.is_empty() && self.peek() == Some(&Tok::Int(0));
            coeffs.push(self.coeff()?);
        }
        let body = if self.starts_factor() {
            Some(self.chain()?)
        } else {
            None
        };
        let body = match body {
            Some(b) => b,
            None if coeffs.is_empty() => return Err(Error::Syntax { pos: start, msg: "expected an operator or coefficient".into() }),
            None if lone_zero && coeffs.len() == 1 => return Ok(Ast::Zero),
            None => Ast::Atom(AtomTok { atom: Atom::Id, side: None }, start),
        };
        Ok(coeffs.into_iter().rev().fold(body, |acc, c| Ast::Scale(c, Box::new(acc))))
    }

    fn coeff(&mut self) -> Result<Scalar> {
        let pos = self.pos();
        let c = if let (Some(Tok::Int(k)), Some(Tok::Sym('/'))) = (self.peek().cloned(), self.toks.get(self.at + 1).map(|t| &t.tok)) {
            self.at += 2;
            match self.peek().cloned() {
                Some(Tok::Int(0)) => return Err(Error::Syntax { pos, msg: "zero denominator".into() }),
                Some(Tok::Int(d)) => {
                    self.at += 1;
                    Scalar::frac(k, d)
                }
                _ => return self.err("expected a denominator"),
            }
        } else {
            self.scalar_power()?
        };
        if self.eat('*') && !self.starts_coeff() && !self.starts_factor() {
            return self.err("expected a coefficient or an operator after '*'");
        }
        Ok(c)
    }

    fn scalar_atom(&mut self) -> Result<Scalar> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.at += 1;
                Ok(Scalar::from_int(k))
            }
            Some(Tok::Ident(s)) => {
                self.at += 1;
                match s.as_str() {
                    "lambda" => Ok(Scalar::lambda()),
                    "i" => Ok(Scalar::constant(GaussianRational::i())),
                    other => match self.bind.lookup(other) {
                        Some(v) => Ok(Scalar::from_int(v)),
                        None => Err(Error::Syntax { pos, msg: format!("unknown name {other:?} in a coefficient") }),
                    },
                }
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let s = self.scalar_sum()?;
                self.expect(')')?;
                Ok(s)
            }
            _ => self.err("expected a scalar"),
        }
    }

    fn scalar_sum(&mut self) -> Result<Scalar> {
        let mut acc = if self.eat('-') { -self.scalar_product()? } else { self.scalar_product()? };
        loop {
            if self.eat('+') {
                acc = &acc + &self.scalar_product()?;
            } else if self.eat('-') {
                acc = &acc - &self.scalar_product()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn scalar_product(&mut self) -> Result<Scalar> {
        let mut acc = self.scalar_power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.scalar_power()?;
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.at += 1;
                let d = self.scalar_power()?;
                acc = acc.checked_div(&d).map_err(|e| Error::Syntax { pos, msg: e.to_string() })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn scalar_power(&mut self) -> Result<Scalar> {
        let base = self.scalar_atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.peek().cloned() {
            Some(Tok::Int(k)) if k <= 64 => {
                self.at += 1;
                Ok(k as u32)
            }
            Some(Tok::Ident(s)) if self.bind.lookup(&s).is_some_and(|v| (0..=64).contains(&v)) => {
                self.at += 1;
                Ok(self.bind.lookup(&s).expect("checked") as u32)
            }
            _ => self.err("expected a small nonnegative exponent"),
        }
    }

    fn chain(&mut self) -> Result<Ast> {
        let mut parts: Vec<Ast> = Vec::new();
        while self.starts_factor() {
            let prim = self.primary()?;
            if self.eat('^') {
                let k = self.exponent()?;
                for _ in 0..k {
                    parts.push(prim.clone());
                }
                if k == 0 {
                    parts.push(Ast::Atom(AtomTok { atom: Atom::Id, side: None }, self.pos()));
                }
            } else {
                parts.push(prim);
            }
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one factor") } else { Ast::Compose(parts) })
    }

    fn primary(&mut self) -> Result<Ast> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                let at = atom_token(&s).expect("checked by starts_factor");
                self.at += 1;
                if at.atom == Atom::Pullback && self.peek() == Some(&Tok::Ident("i_n".into())) {
                    self.at += 1;
                    return Ok(Ast::Atom(AtomTok { atom: Atom::InsertNormal, side: None }, pos));
                }
                Ok(Ast::Atom(at, pos))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.err("expected an operator"),
        }
    }
}

fn negate(a: Ast) -> Ast {
    match a {
        Ast::Scale(c, x) => Ast::Scale(-c, x),
        Ast::Zero => Ast::Zero,
        other => Ast::Scale(Scalar::from_int(-1), Box::new(other)),
    }
}

fn typed(ast: &Ast, src: Sig) -> Result<OpExpr> {
    match ast {
        Ast::Atom(at, pos) => {
            if let Some(side) = at.side {
                if side != src.side {
                    return Err(Error::Signature(format!(
                        "at {pos}: {} cannot act on {src}",
                        at.atom.token(side)
                    )));
                }
            }
            OpExpr::atom(at.atom, src).map_err(|e| Error::Signature(format!("at {pos}: {e}")))
        }
        Ast::Compose(parts) => {
            let mut sig = src;
            let mut out = Vec::with_capacity(parts.len());
            for p in parts.iter().rev() {
                let e = typed(p, sig)?;
                sig = e.target();
                out.push(e);
            }
            out.reverse();
            OpExpr::compose(out)
        }
        Ast::Sum(terms) => {
            let mut out = Vec::new();
            let mut zeros = 0usize;
            for t in terms {
                match t {
                    Ast::Zero => zeros += 1,
                    _ => out.push(typed(t, src)?),
                }
            }
            let target = out.first().map(|e| e.target()).unwrap_or(src);
            let mut all = Vec::with_capacity(terms.len());
            let mut it = out.into_iter();
            for t in terms {
                match t {
                    Ast::Zero => all.push(OpExpr::zero(src, target)),
                    _ => all.push(it.next().expect("typed summand")),
                }
            }
            let _ = zeros;
            OpExpr::sum_typed(all, src, target)
        }
        Ast::Scale(c, x) => Ok(OpExpr::scale(c.clone(), typed(x, src)?)),
        Ast::Zero => Ok(OpExpr::zero(src, src)),
    }
}

fn parse_ast(text: &str, bind: &Bindings) -> Result<Ast> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), bind };
    let ast = p.expr()?;
    if p.at < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(ast)
}

/// Parses `text` as an operator on the given source forms.
pub fn parse_op_on(text: &str, source: Sig, bind: &Bindings) -> Result<OpExpr> {
    typed(&parse_ast(text, bind)?, source)
}

/// Parses `text` as an operator on `p`-forms, on `R^n` if it types there and on
/// `R^{n-1}` otherwise.
pub fn parse_op(text: &str, bind: &Bindings) -> Result<OpExpr> {
    let ast = parse_ast(text, bind)?;
    let p = bind.p as i32;
    match typed(&ast, Sig::ambient(bind.n, p)) {
        Ok(e) => Ok(e),
        Err(first) => typed(&ast, Sig::slice(bind.n, p)).map_err(|_| first),
    }
}

fn scalar_text(s: &Scalar) -> String {
    if *s == Scalar::lambda() {
        return "lambda".into();
    }
    if let Some(c) = s.as_constant() {
        if c.is_real() && !c.re.is_negative() && c.re.is_integer() {
            return c.re.to_string();
        }
    }
    format!("({s})")
}

fn is_negative(s: &Scalar) -> bool {
    s.to_string().starts_with('-')
}

/// Renders an expression in the operator language; [`parse_op`] reads it back
/// to the same tree.
pub fn pretty_print(e: &OpExpr) -> String {
    let mut out = String::new();
    print_expr(e, &mut out);
    out
}

fn print_expr(e: &OpExpr, out: &mut String) {
    match e.node() {
        Node::Sum(terms) if terms.is_empty() => out.push('0'),
        Node::Sum(terms) => {
            for (k, t) in terms.iter().enumerate() {
                match t.node() {
                    Node::Scale(s, inner) if is_negative(s) => {
                        out.push_str(if k == 0 { "- " } else { " - " });
                        let mag = -s.clone();
                        if mag.is_one() && !matches!(inner.node(), Node::Scale(..)) {
                            print_child(inner, out, false);
                        } else {
                            out.push_str(&scalar_text(&mag));
                            out.push(' ');
                            print_child(inner, out, false);
                        }
                    }
                    _ => {
                        if k > 0 {
                            out.push_str(" + ");
                        }
                        print_term(t, out);
                    }
                }
            }
        }
        Node::Scale(s, inner) if is_negative(s) => {
            out.push_str("- ");
            let mag = -s.clone();
            if !(mag.is_one() && !matches!(inner.node(), Node::Scale(..))) {
                out.push_str(&scalar_text(&mag));
                out.push(' ');
            }
            print_child(inner, out, false);
        }
        _ => print_term(e, out),
    }
}

/// A summand: anything but a sum, printed without surrounding parentheses.
fn print_term(e: &OpExpr, out: &mut String) {
    match e.node() {
        Node::Scale(s, inner) => {
            out.push_str(&scalar_text(s));
            out.push(' ');
            print_child(inner, out, false);
        }
        Node::Sum(_) => {
            out.push('(');
            print_expr(e, out);
            out.push(')');
        }
        _ => print_chain(e, out),
    }
}

/// Body of a scaled term or a factor of a composition.
fn print_child(e: &OpExpr, out: &mut String, in_compose: bool) {
    match e.node() {
        Node::Atom(_) => print_chain(e, out),
        Node::Compose(_) if !in_compose => print_chain(e, out),
        Node::Scale(..) if !in_compose => print_term(e, out),
        _ => {
            out.push('(');
            print_expr(e, out);
            out.push(')');
        }
    }
}

fn print_chain(e: &OpExpr, out: &mut String) {
    match e.node() {
        Node::Atom(a) => out.push_str(a.token(e.source().side)),
        Node::Compose(parts) => {
            let mut k = 0;
            let mut prev_pullback = false;
            let mut first = true;
            while k < parts.len() {
                let mut run = 1;
                while k + run < parts.len() && parts[k + run] == parts[k] && compressible(&parts[k]) {
                    run += 1;
                }
                if !first {
                    out.push(' ');
                }
                first = false;
                let part = &parts[k];
                match part.node() {
                    Node::Atom(Atom::InteriorN) if prev_pullback => out.push_str("(i_n)"),
                    Node::Atom(_) => print_chain(part, out),
                    _ => print_child(part, out, true),
                }
                if run > 1 {
                    out.push_str(&format!("^{run}"));
                }
                prev_pullback = run == 1 && matches!(part.node(), Node::Atom(Atom::Pullback));
                k += run;
            }
        }
        _ => print_expr(e, out),
    }
}

fn compressible(e: &OpExpr) -> bool {
    !matches!(e.node(), Node::Atom(Atom::InsertNormal) | Node::Atom(Atom::Pullback) | Node::Atom(Atom::Id))
}

/// Parses a standalone scalar such as `2*lambda^2-1/3*lambda+1`.
pub fn parse_scalar(text: &str, bind: &Bindings) -> Result<Scalar> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), bind };
    let s = p.scalar_sum()?;
    if p.at < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(s)
}

/// Parses `num` or `num/den` into a rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    text.trim().parse::<Rational>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::families::family_first;
    use crate::operators::ops_equal;

    #[test]
    fn prints_first_order_family() {
        let b = |p| pretty_print(&family_first(4, p, 1).unwrap());
        assert_eq!(b(2), "(lambda+1) iota dn + d iota i_n");
        assert_eq!(b(1), "lambda iota dn + d iota i_n");
    }

    #[test]
    fn dd_is_zero() {
        let e = parse_op("d d", &Bindings::new(4, 1)).unwrap();
        assert_eq!(e.source().side, Side::Slice);
        assert!(e.compile().is_zero() || ops_equal(&e, &OpExpr::zero(e.source(), e.target())).unwrap());
    }

    #[test]
    fn powers_of_groups() {
        let e = parse_op("(d delta)^2 iota", &Bindings::new(4, 1)).unwrap();
        assert_eq!(e.source(), Sig::ambient(4, 1));
        assert_eq!(e.order(), 4);
        assert_eq!(pretty_print(&e), "(d delta)^2 iota");
    }

    #[test]
    fn round_trips() {
        let bind = Bindings::new(4, 2).with_order(3);
        for text in [
            "(lambda+p-1) iota dn + d iota i_n",
            "- 2 dn^3 + (1/3*lambda^2) Delta_bar",
            "iota (i_n) dbar - (lambda-1) iota i_n dbar",
            "2 (-3) iota",
            "0",
            "(i) star_bar + 1/2 id",
            "lambda^2 dn",
        ] {
            let e = parse_op(text, &bind).unwrap();
            let again = parse_op(&pretty_print(&e), &bind).unwrap();
            assert_eq!(e, again, "{text} -> {}", pretty_print(&e));
        }
    }

    #[test]
    fn star_scales() {
        let bind = Bindings::new(4, 1);
        let spelled = parse_op("(lambda+1) * iota", &bind).unwrap();
        assert_eq!(spelled, parse_op("(lambda+1) iota", &bind).unwrap());
        let product = parse_op("2*lambda * 3/2 * (d delta)^2 iota", &bind).unwrap();
        assert!(ops_equal(&product, &parse_op("(3*lambda) d delta d delta iota", &bind).unwrap()).unwrap());
        assert!(parse_op("lambda * + iota", &bind).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_op("d + + d", &Bindings::new(3, 0)) {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_op("dbar iota", &Bindings::new(3, 0)).is_err());
    }
}
