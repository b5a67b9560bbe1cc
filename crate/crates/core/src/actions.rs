//! Generator-level actions of `U_q(q_n)` (and `U_q(q_m)^cop`) on the presented algebras,
//! read off matrix equations and extended to words through the coproduct.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::presentations::{resolve_alias, word_parity, Elem, Family, Gen, Presentation, SlotTensor, Word};
use crate::qscalar::QField;
use crate::report::Check;
use crate::supertensor::{build_s, build_s_inv, build_s_tilde, index_set, parity};
use crate::texpr::{parse, universe_of, Env, Expr, Factor, GenMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    Phi,
    PhiPi,
    PhiBar,
    PhiBarPi,
    Psi,
    PsiBar,
}

impl ActionKind {
    pub const ALL: [ActionKind; 6] = [
        ActionKind::Phi,
        ActionKind::PhiPi,
        ActionKind::PhiBar,
        ActionKind::PhiBarPi,
        ActionKind::Psi,
        ActionKind::PsiBar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Phi => "phi",
            ActionKind::PhiPi => "phipi",
            ActionKind::PhiBar => "phibar",
            ActionKind::PhiBarPi => "phibarpi",
            ActionKind::Psi => "psi",
            ActionKind::PsiBar => "psibar",
        }
    }

    pub fn parse(s: &str) -> Option<ActionKind> {
        ActionKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn family(self) -> Family {
        match self {
            ActionKind::Phi | ActionKind::Psi => Family::A,
            ActionKind::PhiPi => Family::APi,
            ActionKind::PhiBar | ActionKind::PsiBar => Family::Bar,
            ActionKind::PhiBarPi => Family::BarPi,
        }
    }

    pub fn coproduct(self) -> Coproduct {
        match self {
            ActionKind::Psi | ActionKind::PsiBar => Coproduct::Cop,
            _ => Coproduct::Plain,
        }
    }

    /// The matrix product whose `(leg 1, slot 2, leg 3)` entries define the action.
    pub fn defining_product(self) -> &'static str {
        match self {
            ActionKind::Phi => "T^{1[2]} S^{13}",
            ActionKind::PhiPi => "Tcheck^{1[2]} S^{13}",
            ActionKind::PhiBar => "Sinv^{13} Tbar^{1[2]}",
            ActionKind::PhiBarPi => "Sinv^{13} Tbarcheck^{1[2]}",
            ActionKind::Psi => "Sinv^{13} T^{1[2]}",
            ActionKind::PsiBar => "Tbar^{1[2]} Stilde^{13}",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coproduct {
    Plain,
    Cop,
}

/// `Phi_{L_{ab}}(g)` for every `a <= b` in `I_{m|m}` and every generator `g`.
#[derive(Debug)]
pub struct ActionTable<K> {
    pub kind: ActionKind,
    pub m: usize,
    target: Arc<Presentation<K>>,
    table: BTreeMap<(i32, i32), BTreeMap<Gen, Elem<K>>>,
    alias_failure: Option<String>,
    memo: Mutex<HashMap<(i32, i32, Word), Elem<K>>>,
}

pub fn counit<K: QField>(a: i32, b: i32) -> K {
    K::from_i64((a == b) as i64)
}

/// Generator matrix over all frames `I_{m|m}`, with alias spellings for the missing half.
fn full_frame_matrix<K: QField>(fam: Family, m: usize, n: usize) -> GenMatrix<K> {
    let mut entries = Vec::new();
    for &f in &index_set(m) {
        for &a in &index_set(n) {
            let g = Gen::new(fam, f, a);
            match fam {
                Family::A => entries.push(((f, a), K::one(), g)),
                _ => entries.push(((a, f), K::sign(parity(a) * (parity(f) + parity(a))), g)),
            }
        }
    }
    GenMatrix { entries }
}

/// Expands the action's defining matrix equation and equates coefficients.
pub fn derive_action<K: QField>(kind: ActionKind, target: Arc<Presentation<K>>) -> Result<ActionTable<K>> {
    let fam = kind.family();
    if target.family() != fam {
        return Err(Error::Params(format!("{} acts on {}, not {}", kind.name(), fam.name(), target.family().name())));
    }
    let n = target.n();
    let frames = target.frames().len();
    let full = matches!(kind, ActionKind::Psi | ActionKind::PsiBar);
    let m = if full { frames } else { n };
    let gm = if full {
        full_frame_matrix::<K>(fam, frames, n)
    } else {
        crate::presentations::generator_matrix::<K>(fam, target.frames(), n)
    };
    let lookup: HashMap<(i32, i32), (K, Gen)> = gm.entries.iter().map(|(u, c, g)| (*u, (c.clone(), *g))).collect();
    let mut env = Env::new();
    env.bind_gens(fam.matrix_symbol(), gm);
    if full {
        env.bind_op("Sinv", build_s_inv(m)).bind_op("Stilde", build_s_tilde(m));
    } else {
        env.bind_op("S", build_s(n)).bind_op("Sinv", build_s_inv(n));
    }
    let e = parse(kind.defining_product())?;
    let Expr::Product(p) = &e else { unreachable!("defining product") };
    let t = env.eval_free(p, &universe_of(&e)?)?;

    let mut table: BTreeMap<(i32, i32), BTreeMap<Gen, Elem<K>>> = BTreeMap::new();
    let mut via_alias: BTreeMap<(i32, i32), BTreeMap<Gen, Elem<K>>> = BTreeMap::new();
    let mut alias_failure = None;
    for (key, c) in t.entries() {
        let (Factor::Leg(Some(rc)), Factor::Slot(w), Factor::Leg(Some((x, y)))) = (&key[0], &key[1], &key[2]) else {
            return Err(Error::Arity(format!("unexpected entry shape in {}", kind.defining_product())));
        };
        if x > y {
            alias_failure.get_or_insert_with(|| format!("entry below the diagonal at L[{x},{y}]"));
            continue;
        }
        let (coef_t, g0) = lookup[rc].clone();
        let (s0, g0c) = resolve_alias(g0);
        let (s1, img) = resolve_alias(w[0]);
        let v = c.clone() * K::sign((parity(*x) + parity(*y)) * (parity(rc.0) + parity(rc.1)) + s0 + s1) / coef_t;
        let dest = if g0c == g0 { &mut table } else { &mut via_alias };
        let slot = dest.entry((*x, *y)).or_default().entry(g0c).or_default();
        slot.add_term(vec![img], v);
    }
    for (xy, gens) in &via_alias {
        for (g, e) in gens {
            let canon = table.get(xy).and_then(|t| t.get(g)).cloned().unwrap_or_default();
            if *e != canon && alias_failure.is_none() {
                alias_failure = Some(format!("L[{},{}] on {g}: {canon} vs alias {e}", xy.0, xy.1));
            }
        }
    }
    for t in table.values_mut() {
        t.retain(|_, e| !e.is_zero());
    }
    Ok(ActionTable { kind, m, target, table, alias_failure, memo: Mutex::new(HashMap::new()) })
}

impl<K: QField> ActionTable<K> {
    pub fn target(&self) -> &Arc<Presentation<K>> {
        &self.target
    }

    pub fn coproduct(&self) -> Coproduct {
        self.kind.coproduct()
    }

    /// Acting-algebra index set `I_{m|m}`.
    pub fn indices(&self) -> Vec<i32> {
        index_set(self.m)
    }

    /// All `(a, b)` with `a <= b`.
    pub fn pairs(&self) -> Vec<(i32, i32)> {
        let idx = self.indices();
        idx.iter().flat_map(|&a| idx.iter().filter(move |&&b| a <= b).map(move |&b| (a, b))).collect()
    }

    /// Image of a generator; alias spellings are resolved first.
    pub fn on_gen(&self, a: i32, b: i32, g: Gen) -> Elem<K> {
        let (s, g) = resolve_alias(g);
        self.table.get(&(a, b)).and_then(|t| t.get(&g)).map(|e| e.scale(&K::sign(s))).unwrap_or_default()
    }

    pub fn alias_failure(&self) -> Option<&str> {
        self.alias_failure.as_deref()
    }

    fn check_indices(&self, a: i32, b: i32) -> Result<()> {
        let idx = self.indices();
        for i in [a, b] {
            if !idx.contains(&i) {
                return Err(Error::Index(i));
            }
        }
        if a > b {
            return Err(Error::Index(a));
        }
        Ok(())
    }

    /// Action on a word in the free algebra via the coproduct `L_ab -> sum_c L_ac (x) L_cb`.
    pub fn apply_word(&self, a: i32, b: i32, w: &[Gen]) -> Elem<K> {
        match w.len() {
            0 => return Elem::one().scale(&counit(a, b)),
            1 => return self.on_gen(a, b, w[0]),
            _ => {}
        }
        let key = (a, b, w.to_vec());
        if let Some(e) = self.memo.lock().expect("memo lock").get(&key) {
            return e.clone();
        }
        let (head, rest) = w.split_at(1);
        let ph = word_parity(head);
        let mut out = Elem::zero();
        for c in self.indices().into_iter().filter(|&c| a <= c && c <= b) {
            let (s, l, r) = match self.coproduct() {
                Coproduct::Plain => {
                    ((parity(c) + parity(b)) * ph, self.apply_word(a, c, head), self.apply_word(c, b, rest))
                }
                Coproduct::Cop => (
                    (parity(a) + parity(c)) * (parity(c) + parity(b) + ph),
                    self.apply_word(c, b, head),
                    self.apply_word(a, c, rest),
                ),
            };
            if l.is_zero() || r.is_zero() {
                continue;
            }
            out.add_scaled(&l.concat(&r), &K::sign(s));
        }
        self.memo.lock().expect("memo lock").insert(key, out.clone());
        out
    }

    /// `L_ab . x`, normal-ordered in the target algebra.
    pub fn apply(&self, a: i32, b: i32, x: &Elem<K>) -> Result<Elem<K>> {
        self.check_indices(a, b)?;
        let mut out = Elem::zero();
        for (w, c) in x.terms() {
            out.add_scaled(&self.apply_word(a, b, w), c);
        }
        Ok(self.target.reduce(&out))
    }

    /// Same table with one entry negated.
    pub fn with_negated_entry(&self, a: i32, b: i32, g: Gen) -> ActionTable<K> {
        let mut table = self.table.clone();
        if let Some(e) = table.get_mut(&(a, b)).and_then(|t| t.get_mut(&g)) {
            *e = e.scale(&-K::one());
        }
        ActionTable {
            kind: self.kind,
            m: self.m,
            target: self.target.clone(),
            table,
            alias_failure: self.alias_failure.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = ((i32, i32), Gen, &Elem<K>)> {
        self.table.iter().flat_map(|(xy, t)| t.iter().map(move |(g, e)| (*xy, *g, e)))
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries()
            .map(|((a, b), g, e)| json!({"a": a, "b": b, "gen": g.to_string(), "image": e.to_string()}))
            .collect();
        json!({"action": self.kind.name(), "m": self.m, "target": self.target.family().name(), "entries": entries})
    }
}

impl<K: QField> fmt::Display for ActionTable<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((a, b), g, e) in self.entries() {
            writeln!(f, "L[{a},{b}] . {g} = {e}")?;
        }
        Ok(())
    }
}

/// `L_ab` on an `N`-fold tensor product through the iterated coproduct
/// `sum L_{a c1} (x) L_{c1 c2} (x) ... (x) L_{c_{N-1} b}` with Koszul signs.
pub fn act_tensor<K: QField, const N: usize>(
    acts: [&ActionTable<K>; N],
    a: i32,
    b: i32,
    t: &SlotTensor<K, N>,
) -> Result<SlotTensor<K, N>> {
    let idx = acts[0].indices();
    if acts.iter().any(|x| x.m != acts[0].m || x.coproduct() != Coproduct::Plain) {
        return Err(Error::Params("tensor action needs plain actions of one algebra".into()));
    }
    fn rec<K: QField>(
        acts: &[&ActionTable<K>],
        idx: &[i32],
        x: i32,
        y: i32,
        ws: &[Word],
    ) -> Result<Vec<(Vec<Word>, K)>> {
        if ws.len() == 1 {
            let e = acts[0].apply(x, y, &Elem::from_word(ws[0].clone()))?;
            return Ok(e.terms().map(|(w, c)| (vec![w.clone()], c.clone())).collect());
        }
        let p = word_parity(&ws[0]);
        let mut out = Vec::new();
        for &c in idx.iter().filter(|&&c| x <= c && c <= y) {
            let head = acts[0].apply(x, c, &Elem::from_word(ws[0].clone()))?;
            if head.is_zero() {
                continue;
            }
            let tail = rec(&acts[1..], idx, c, y, &ws[1..])?;
            let s = K::sign((parity(c) + parity(y)) * p);
            for (w, u) in head.terms() {
                for (rest, v) in &tail {
                    let mut key = vec![w.clone()];
                    key.extend(rest.iter().cloned());
                    out.push((key, s.clone() * u.clone() * v.clone()));
                }
            }
        }
        Ok(out)
    }
    let mut out = SlotTensor::zero();
    for (ws, c) in t.terms() {
        for (key, v) in rec(&acts, &idx, a, b, ws)? {
            out.add_term(key.try_into().expect("slot count"), c.clone() * v);
        }
    }
    Ok(out)
}

/// Every `L_ab` sends every defining relation of the target to zero.
pub fn check_well_defined<K: QField>(act: &ActionTable<K>) -> Check {
    let mut c = Check::new(format!(
        "{} on {}_{{{},{}}} preserves the defining relations",
        act.kind.name(),
        act.target().family().name(),
        act.target().frames().len(),
        act.target().n()
    ));
    let rels = act.target().relation_elements();
    for (a, b) in act.pairs() {
        for rel in &rels {
            let v = act.apply(a, b, rel).expect("indices in range");
            c.record(v.is_zero(), || format!("L[{a},{b}] . ({rel}) = {v}"));
        }
    }
    if let Some(f) = act.alias_failure() {
        c.record(false, || format!("alias incoherence: {f}"));
    }
    c
}

/// `a1_{ab} a2_{cd} = (-1)^{(|a|+|b|)(|c|+|d|)} a2_{cd} a1_{ab}` on generators and degree-2 words.
pub fn check_supercommute<K: QField>(a1: &ActionTable<K>, a2: &ActionTable<K>) -> Result<Check> {
    if !Arc::ptr_eq(a1.target(), a2.target()) && a1.target().family() != a2.target().family() {
        return Err(Error::Params("actions on different algebras".into()));
    }
    let p = a1.target();
    let mut words: Vec<Word> = p.gens().iter().map(|g| vec![*g]).collect();
    for g in p.gens() {
        for h in p.gens() {
            words.push(vec![*g, *h]);
        }
    }
    let mut c = Check::new(format!("{} and {} super-commute", a1.kind.name(), a2.kind.name()));
    for (a, b) in a1.pairs() {
        for (u, v) in a2.pairs() {
            let s = K::sign((parity(a) + parity(b)) * (parity(u) + parity(v)));
            for w in &words {
                let x = p.normal_form(w);
                let l = a1.apply(a, b, &a2.apply(u, v, &x)?)?;
                let r = a2.apply(u, v, &a1.apply(a, b, &x)?)?;
                let d = l.sub(&r.scale(&s));
                c.record(d.is_zero(), || {
                    format!("L[{a},{b}], L'[{u},{v}] on {}: {d}", crate::presentations::render_word(w))
                });
            }
        }
    }
    Ok(c)
}

/// Negates table entries one at a time until well-definedness breaks.
pub fn corrupted_table_witness<K: QField>(act: &ActionTable<K>) -> Option<String> {
    let keys: Vec<((i32, i32), Gen)> = act.entries().map(|(xy, g, _)| (xy, g)).collect();
    keys.into_iter().find_map(|((a, b), g)| {
        let bad = act.with_negated_entry(a, b, g);
        let c = check_well_defined(&bad);
        (!c.pass).then(|| format!("negated L[{a},{b}] on {g}: {}", c.detail.unwrap_or_default()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::Scalar;
    use num_traits::{One, Zero};

    fn phi(frames: usize, n: usize) -> ActionTable<Scalar> {
        let p = Arc::new(Presentation::new(Family::A, frames, n).unwrap());
        derive_action(ActionKind::Phi, p).unwrap()
    }

    #[test]
    fn diagonal_entries() {
        let a = phi(1, 2);
        let t = |w| Gen::new(Family::A, 1, w);
        assert_eq!(a.on_gen(1, 1, t(1)), Elem::gen(t(1)).scale(&Scalar::q()));
        assert_eq!(a.on_gen(1, 1, t(2)), Elem::gen(t(2)));
        assert_eq!(a.on_gen(-1, -1, t(1)), Elem::gen(t(1)).scale(&Scalar::qpow(-1)));
    }

    #[test]
    fn unit_and_square() {
        let a = phi(1, 1);
        let t11 = Gen::new(Family::A, 1, 1);
        assert_eq!(a.apply(1, 1, &Elem::one()).unwrap(), Elem::one());
        assert!(a.apply(-1, 1, &Elem::one()).unwrap().is_zero());
        let sq = a.apply(1, 1, &Elem::from_word(vec![t11, t11])).unwrap();
        assert_eq!(sq, Elem::from_word(vec![t11, t11]).scale(&Scalar::qpow(2)));
    }

    #[test]
    fn index_errors() {
        let a = phi(1, 1);
        assert!(matches!(a.apply(2, 2, &Elem::one()), Err(Error::Index(2))));
        assert!(a.apply(1, -1, &Elem::one()).is_err());
    }

    #[test]
    fn counit_values() {
        assert_eq!(counit::<Scalar>(1, 1), Scalar::one());
        assert!(counit::<Scalar>(1, 2).is_zero());
        assert!(counit::<Scalar>(-1, 1).is_zero());
    }
}
