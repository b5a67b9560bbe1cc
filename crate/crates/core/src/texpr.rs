//! Tensor-leg notation: `S^{12} S^{13} S^{23}`, `R+^{12} T^{1[3]} T^{2[3]}`, `L^{[2]3}`.
//!
//! Superscripts name global positions. A bare digit is a matrix leg, `[k]` (or `[k']`)
//! an algebra slot. Positions are laid out in label order, primed slots right after
//! their base, and products carry the super sign of that layout.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presentations::{Elem, Family, Gen, Presentation, Word};
use crate::qscalar::QField;
use crate::supertensor::{unit_parity, TensorOperator, Unit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Leg(u32),
    Slot { idx: u32, primed: bool },
}

impl Label {
    fn order_key(&self) -> (u32, bool) {
        match *self {
            Label::Leg(i) => (i, false),
            Label::Slot { idx, primed } => (idx, primed),
        }
    }

    fn is_leg(&self) -> bool {
        matches!(self, Label::Leg(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub labels: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Product(Vec<Symbol>),
    Equation(Vec<Symbol>, Vec<Symbol>),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{{", self.name)?;
        for l in &self.labels {
            match l {
                Label::Leg(i) => write!(f, "{i}")?,
                Label::Slot { idx, primed } => write!(f, "[{idx}{}]", if *primed { "'" } else { "" })?,
            }
        }
        write!(f, "}}")
    }
}

fn render_product(p: &[Symbol]) -> String {
    p.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Product(p) => write!(f, "{}", render_product(p)),
            Expr::Equation(l, r) => write!(f, "{} == {}", render_product(l), render_product(r)),
        }
    }
}

struct Parser<'a> {
    s: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn digits(&mut self) -> Result<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digit"));
        }
        let t: String = self.s[start..self.pos].iter().collect();
        t.parse().map_err(|_| self.err("label too large"))
    }

    fn symbol(&mut self) -> Result<Symbol> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return Err(self.err("expected symbol name"));
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        if matches!(self.peek(), Some('+') | Some('-')) {
            self.pos += 1;
        }
        let name: String = self.s[start..self.pos].iter().collect();
        self.expect('^')?;
        self.expect('{')?;
        let mut labels = Vec::new();
        loop {
            match self.peek() {
                Some('}') => {
                    self.pos += 1;
                    break;
                }
                Some('[') => {
                    self.pos += 1;
                    let idx = self.digits()?;
                    let primed = matches!(self.peek(), Some('\'') | Some('\u{2032}'));
                    if primed {
                        self.pos += 1;
                    }
                    self.expect(']')?;
                    labels.push(Label::Slot { idx, primed });
                }
                Some(c) if c.is_ascii_digit() => {
                    labels.push(Label::Leg(c.to_digit(10).unwrap()));
                    self.pos += 1;
                }
                None => return Err(self.err("unbalanced brace")),
                Some(_) => return Err(self.err("unexpected character in superscript")),
            }
        }
        if labels.is_empty() {
            return Err(self.err("empty superscript"));
        }
        let mut seen = BTreeSet::new();
        if !labels.iter().all(|l| seen.insert(l.order_key())) {
            return Err(self.err("repeated label"));
        }
        Ok(Symbol { name, labels })
    }

    fn product(&mut self) -> Result<Vec<Symbol>> {
        let mut out = Vec::new();
        loop {
            self.ws();
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() => out.push(self.symbol()?),
                _ => break,
            }
        }
        if out.is_empty() {
            return Err(self.err("empty product"));
        }
        Ok(out)
    }
}

/// Parses a product or an equation `lhs == rhs`.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { s: text.chars().collect(), pos: 0, _src: text };
    let lhs = p.product()?;
    p.ws();
    if p.peek().is_none() {
        return Ok(Expr::Product(lhs));
    }
    p.expect('=')?;
    p.expect('=')?;
    let rhs = p.product()?;
    p.ws();
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(Expr::Equation(lhs, rhs))
}

/// One tensor factor at a position: a matrix unit (`None` = identity) or a slot word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Factor {
    Leg(Option<Unit>),
    Slot(Word),
}

impl Factor {
    fn parity(&self) -> u32 {
        match self {
            Factor::Leg(None) => 0,
            Factor::Leg(Some(u)) => unit_parity(*u),
            Factor::Slot(w) => w.iter().map(|g| g.parity()).sum::<u32>() % 2,
        }
    }
}

/// Matrix whose entries live in an ordered tensor product of algebra slots.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedTensor<K> {
    labels: Vec<Label>,
    entries: BTreeMap<Vec<Factor>, K>,
}

impl<K: QField> MixedTensor<K> {
    pub fn zero(labels: Vec<Label>) -> Self {
        MixedTensor { labels, entries: BTreeMap::new() }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Factor>, &K)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn add_entry(&mut self, key: Vec<Factor>, c: K) {
        if c.is_zero() {
            return;
        }
        match self.entries.get_mut(&key) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.entries.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.entries.insert(key, c);
            }
        }
    }

    fn unit_key(&self) -> Vec<Factor> {
        self.labels.iter().map(|l| if l.is_leg() { Factor::Leg(None) } else { Factor::Slot(Vec::new()) }).collect()
    }

    fn check_labels(&self, o: &Self) -> Result<()> {
        if self.labels != o.labels {
            return Err(Error::Arity("mixed tensors over different positions".into()));
        }
        Ok(())
    }

    /// Positional super product: legs compose as matrix units, slots concatenate,
    /// sign `(-1)^{sum_{i>j} |a_i||b_j|}` over positions.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_labels(o)?;
        let mut out = MixedTensor::zero(self.labels.clone());
        let pb_all: Vec<(Vec<u32>, &Vec<Factor>, &K)> =
            o.entries.iter().map(|(k, v)| (k.iter().map(|f| f.parity()).collect(), k, v)).collect();
        for (ka, va) in &self.entries {
            let pa: Vec<u32> = ka.iter().map(|f| f.parity()).collect();
            'b: for (pb, kb, vb) in &pb_all {
                let mut key = Vec::with_capacity(ka.len());
                for (fa, fb) in ka.iter().zip(kb.iter()) {
                    key.push(match (fa, fb) {
                        (Factor::Leg(None), x) | (x, Factor::Leg(None)) => x.clone(),
                        (Factor::Leg(Some(x)), Factor::Leg(Some(y))) => {
                            if x.1 != y.0 {
                                continue 'b;
                            }
                            Factor::Leg(Some((x.0, y.1)))
                        }
                        (Factor::Slot(x), Factor::Slot(y)) => {
                            let mut w = x.clone();
                            w.extend(y.iter().copied());
                            Factor::Slot(w)
                        }
                        _ => return Err(Error::Arity("leg meets slot".into())),
                    });
                }
                let mut sign = 0;
                for i in 0..pa.len() {
                    if pa[i] == 1 {
                        sign += pb[..i].iter().sum::<u32>();
                    }
                }
                out.add_entry(key, K::sign(sign) * va.clone() * (*vb).clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut out = MixedTensor::zero(self.labels.clone());
        for (k, v) in &self.entries {
            out.add_entry(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_labels(o)?;
        let mut out = self.clone();
        for (k, v) in &o.entries {
            out.add_entry(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-K::one()))
    }

    /// Rewrites every slot word with `f` (e.g. a normal form), expanding multilinearly.
    pub fn map_slots(&self, f: impl Fn(usize, &Word) -> Result<Elem<K>>) -> Result<Self> {
        let mut out = MixedTensor::zero(self.labels.clone());
        for (k, v) in &self.entries {
            let mut partial: Vec<(Vec<Factor>, K)> = vec![(Vec::new(), v.clone())];
            for (i, fac) in k.iter().enumerate() {
                match fac {
                    Factor::Leg(_) => partial.iter_mut().for_each(|(p, _)| p.push(fac.clone())),
                    Factor::Slot(w) => {
                        let e = f(i, w)?;
                        let mut next = Vec::new();
                        for (p, c) in &partial {
                            for (w2, c2) in e.terms() {
                                let mut p2 = p.clone();
                                p2.push(Factor::Slot(w2.clone()));
                                next.push((p2, c.clone() * c2.clone()));
                            }
                        }
                        partial = next;
                    }
                }
            }
            for (p, c) in partial {
                out.add_entry(p, c);
            }
        }
        Ok(out)
    }

    /// Splits keys into (leg part, slot part) and collects the slot-side combinations.
    pub fn group_by_legs(&self) -> BTreeMap<Vec<Option<Unit>>, BTreeMap<Vec<Word>, K>> {
        let mut out: BTreeMap<Vec<Option<Unit>>, BTreeMap<Vec<Word>, K>> = BTreeMap::new();
        for (k, v) in &self.entries {
            let mut legs = Vec::new();
            let mut slots = Vec::new();
            for f in k {
                match f {
                    Factor::Leg(u) => legs.push(*u),
                    Factor::Slot(w) => slots.push(w.clone()),
                }
            }
            out.entry(legs).or_default().insert(slots, v.clone());
        }
        out
    }

    pub fn first_difference(&self, o: &Self) -> Option<(Vec<Factor>, K, K)> {
        let keys: BTreeSet<&Vec<Factor>> = self.entries.keys().chain(o.entries.keys()).collect();
        keys.into_iter().find_map(|k| {
            let a = self.entries.get(k).cloned().unwrap_or_else(K::zero);
            let b = o.entries.get(k).cloned().unwrap_or_else(K::zero);
            (a != b).then(|| (k.clone(), a, b))
        })
    }
}

pub fn render_key(key: &[Factor]) -> String {
    key.iter()
        .map(|f| match f {
            Factor::Leg(None) => "1".to_string(),
            Factor::Leg(Some((r, c))) => format!("E[{r},{c}]"),
            Factor::Slot(w) if w.is_empty() => "1".to_string(),
            Factor::Slot(w) => w.iter().map(|g| g.to_string()).collect::<Vec<_>>().join("*"),
        })
        .collect::<Vec<_>>()
        .join(" (x) ")
}

/// A generator matrix `sum E_{row,col} (x) c g`.
#[derive(Clone, Debug)]
pub struct GenMatrix<K> {
    pub entries: Vec<(Unit, K, Gen)>,
}

#[derive(Clone, Debug)]
pub enum Binding<K> {
    Op(TensorOperator<K>),
    Gens(GenMatrix<K>),
}

/// Symbol bindings plus the presentations used to normal-order slot words.
#[derive(Clone, Debug)]
pub struct Env<K> {
    bindings: HashMap<String, Binding<K>>,
    algebras: Vec<Arc<Presentation<K>>>,
}

impl<K: QField> Default for Env<K> {
    fn default() -> Self {
        Env { bindings: HashMap::new(), algebras: Vec::new() }
    }
}

impl<K: QField> Env<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind_op(&mut self, name: &str, op: TensorOperator<K>) -> &mut Self {
        self.bindings.insert(name.to_string(), Binding::Op(op));
        self
    }

    pub fn bind_gens(&mut self, name: &str, m: GenMatrix<K>) -> &mut Self {
        self.bindings.insert(name.to_string(), Binding::Gens(m));
        self
    }

    /// Registers a presentation; slot words of its family are normal-ordered in it.
    pub fn add_algebra(&mut self, p: Arc<Presentation<K>>) -> &mut Self {
        self.algebras.retain(|a| a.family() != p.family());
        self.algebras.push(p);
        self
    }

    fn algebra_for(&self, fam: Family) -> Option<&Arc<Presentation<K>>> {
        self.algebras.iter().find(|a| a.family() == fam)
    }

    fn place(&self, sym: &Symbol, universe: &[Label]) -> Result<MixedTensor<K>> {
        let binding = self.bindings.get(&sym.name).ok_or_else(|| Error::Unbound(sym.name.clone()))?;
        let pos = |l: &Label| universe.iter().position(|u| u == l).expect("label in universe");
        let mut out = MixedTensor::zero(universe.to_vec());
        let base = out.unit_key();
        match binding {
            Binding::Op(op) => {
                if !sym.labels.iter().all(|l| l.is_leg()) || sym.labels.len() != op.legs().len() {
                    return Err(Error::Arity(format!("{} has {} legs", sym, op.legs().len())));
                }
                for (k, v) in op.entries() {
                    let mut key = base.clone();
                    for (l, &u) in sym.labels.iter().zip(k) {
                        key[pos(l)] = Factor::Leg(Some(u));
                    }
                    out.add_entry(key, v.clone());
                }
            }
            Binding::Gens(m) => {
                let legs: Vec<&Label> = sym.labels.iter().filter(|l| l.is_leg()).collect();
                let slots: Vec<&Label> = sym.labels.iter().filter(|l| !l.is_leg()).collect();
                if legs.len() != 1 || slots.len() != 1 {
                    return Err(Error::Arity(format!("{sym} needs one leg and one slot")));
                }
                for (u, c, g) in &m.entries {
                    let mut key = base.clone();
                    key[pos(legs[0])] = Factor::Leg(Some(*u));
                    key[pos(slots[0])] = Factor::Slot(vec![*g]);
                    out.add_entry(key, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// Evaluates a product over the given position universe, without reducing slots.
    pub fn eval_free(&self, prod: &[Symbol], universe: &[Label]) -> Result<MixedTensor<K>> {
        let mut acc: Option<MixedTensor<K>> = None;
        for s in prod {
            let t = self.place(s, universe)?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.mul(&t)?,
            });
        }
        acc.ok_or_else(|| Error::Arity("empty product".into()))
    }

    /// Normal-orders every slot in the registered presentations.
    pub fn reduce(&self, t: &MixedTensor<K>) -> Result<MixedTensor<K>> {
        t.map_slots(|_, w| {
            let Some(first) = w.first() else { return Ok(Elem::one()) };
            if w.iter().any(|g| g.fam != first.fam) {
                return Err(Error::SlotMismatch(format!("{} and others in one slot", first)));
            }
            match self.algebra_for(first.fam) {
                Some(p) => Ok(p.normal_form(w)),
                None => Ok(Elem::from_word(w.clone())),
            }
        })
    }

    /// Evaluates and normal-orders a product or both sides of an equation.
    pub fn evaluate(&self, e: &Expr) -> Result<(MixedTensor<K>, Option<MixedTensor<K>>)> {
        let universe = universe_of(e)?;
        match e {
            Expr::Product(p) => Ok((self.reduce(&self.eval_free(p, &universe)?)?, None)),
            Expr::Equation(l, r) => {
                Ok((self.reduce(&self.eval_free(l, &universe)?)?, Some(self.reduce(&self.eval_free(r, &universe)?)?)))
            }
        }
    }
}

/// Sorted positions used by an expression; a label must be consistently leg or slot.
pub fn universe_of(e: &Expr) -> Result<Vec<Label>> {
    let syms: Vec<&Symbol> = match e {
        Expr::Product(p) => p.iter().collect(),
        Expr::Equation(l, r) => l.iter().chain(r.iter()).collect(),
    };
    let mut seen: BTreeMap<(u32, bool), Label> = BTreeMap::new();
    for s in syms {
        for l in &s.labels {
            if let Some(prev) = seen.insert(l.order_key(), *l) {
                if prev.is_leg() != l.is_leg() {
                    return Err(Error::Arity(format!("position {} used as both leg and slot", l.order_key().0)));
                }
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// Outcome of an identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub pass: bool,
    pub entries: usize,
    pub witness: Option<String>,
}

/// Evaluates both sides of an equation and compares them entrywise.
pub fn check_identity<K: QField>(eq: &Expr, env: &Env<K>) -> Result<IdentityReport> {
    let Expr::Equation(..) = eq else {
        return Err(Error::Arity("not an equation".into()));
    };
    let (l, r) = env.evaluate(eq)?;
    let r = r.expect("equation has two sides");
    let entries = l.len().max(r.len());
    Ok(match l.first_difference(&r) {
        None => IdentityReport { pass: true, entries, witness: None },
        Some((k, a, b)) => IdentityReport {
            pass: false,
            entries,
            witness: Some(format!("at {}: lhs {} rhs {}", render_key(&k), a, b)),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::Scalar;
    use crate::supertensor::{build_j, build_s};

    #[test]
    fn parse_structure() {
        let e = parse("S^{12} S^{13} S^{23} == S^{23} S^{13} S^{12}").unwrap();
        match &e {
            Expr::Equation(l, r) => {
                assert_eq!(l.len(), 3);
                assert_eq!(r[0].labels, vec![Label::Leg(2), Label::Leg(3)]);
            }
            _ => panic!("expected equation"),
        }
        let e = parse("R+^{12} T^{1[3]} T^{2[3]} == T^{2[3]} T^{1[3]} S^{12}").unwrap();
        assert_eq!(universe_of(&e).unwrap().len(), 3);
        let e = parse("L^{[3]4} T^{1[3']}").unwrap();
        assert_eq!(
            universe_of(&e).unwrap(),
            vec![
                Label::Leg(1),
                Label::Slot { idx: 3, primed: false },
                Label::Slot { idx: 3, primed: true },
                Label::Leg(4)
            ]
        );
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse("S^{12"), Err(Error::Parse { .. })));
        assert!(parse("S^{}").is_err());
        assert!(parse("S^{11}").is_err());
        assert!(parse("== S^{12}").is_err());
        assert!(universe_of(&parse("S^{12} T^{[1]3}").unwrap()).is_err());
    }

    #[test]
    fn j_squared_is_minus_identity() {
        let mut env = Env::<Scalar>::new();
        env.bind_op("J", build_j(2));
        let (t, _) = env.evaluate(&parse("J^{1} J^{1}").unwrap()).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t
            .entries()
            .all(|(k, v)| matches!(k[0], Factor::Leg(Some((a, b))) if a == b) && *v == -Scalar::from_int(1)));
    }

    #[test]
    fn leg_swap_is_not_symmetric() {
        let mut env = Env::<Scalar>::new();
        env.bind_op("S", build_s(1));
        let r = check_identity(&parse("S^{12} == S^{21}").unwrap(), &env).unwrap();
        assert!(!r.pass);
        assert!(r.witness.is_some());
        let r = check_identity(&parse("S^{12} S^{13} S^{23} == S^{23} S^{13} S^{12}").unwrap(), &env).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn unbound_symbol() {
        let env = Env::<Scalar>::new();
        assert!(matches!(env.evaluate(&parse("X^{1}").unwrap()), Err(Error::Unbound(_))));
    }
}
