//! Invariant elements of `A_{r,n} (x) A^Pi_{k,n} (x) Abar_{s,n} (x) Abar^Pi_{l,n}`
//! and their verification through the fourfold tensor action.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::actions::{act_tensor, derive_action, ActionKind, ActionTable};
use crate::braidiso::{tau, tau_bar};
use crate::error::Result;
use crate::presentations::{resolve_alias, Family, Gen, Presentation, SlotTensor, Word};
use crate::qscalar::QField;
use crate::report::Check;
use crate::supertensor::{index_set, parity};

pub type TensorElement4<K> = SlotTensor<K, 4>;

/// Sign conventions for the `y` and `z` families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `y` with `(-1)^{|p|}`, `z` without.
    Corrected,
    /// `y` without a sign, `z` with `(-1)^{|p|}`.
    Literal,
}

#[derive(Clone, Debug)]
pub struct Invariant<K> {
    pub family: char,
    pub indices: (i32, i32),
    pub elem: TensorElement4<K>,
}

/// The four slot algebras with their `U_q(q_n)` actions.
pub struct Setting<K> {
    pub n: usize,
    pub algebras: [Arc<Presentation<K>>; 4],
    pub actions: [ActionTable<K>; 4],
}

impl<K: QField> Setting<K> {
    pub fn new(n: usize, r: usize, k: usize, s: usize, l: usize) -> Result<Self> {
        Self::with_families(n, [(Family::A, r), (Family::APi, k), (Family::Bar, s), (Family::BarPi, l)])
    }

    /// Slots after `1 (x) tau (x) 1 (x) tau-bar`: `A_r (x) A_k (x) Abar_s (x) Abar_l`.
    pub fn transported(n: usize, r: usize, k: usize, s: usize, l: usize) -> Result<Self> {
        Self::with_families(n, [(Family::A, r), (Family::A, k), (Family::Bar, s), (Family::Bar, l)])
    }

    fn with_families(n: usize, fams: [(Family, usize); 4]) -> Result<Self> {
        let mut algebras = Vec::new();
        let mut actions = Vec::new();
        for (fam, frames) in fams {
            let p = Arc::new(Presentation::new(fam, frames, n)?);
            let kind = match fam {
                Family::A => ActionKind::Phi,
                Family::APi => ActionKind::PhiPi,
                Family::Bar => ActionKind::PhiBar,
                Family::BarPi => ActionKind::PhiBarPi,
            };
            actions.push(derive_action(kind, p.clone())?);
            algebras.push(p);
        }
        let (Ok(algebras), Ok(actions)) = (algebras.try_into(), actions.try_into()) else { unreachable!("four slots") };
        Ok(Setting { n, algebras, actions })
    }

    /// `L_ab` through the threefold iterated coproduct.
    pub fn act4(&self, a: i32, b: i32, z: &TensorElement4<K>) -> Result<TensorElement4<K>> {
        let [a0, a1, a2, a3] = &self.actions;
        act_tensor([a0, a1, a2, a3], a, b, z)
    }

    pub fn pairs(&self) -> Vec<(i32, i32)> {
        self.actions[0].pairs()
    }
}

fn one_term<K: QField>(slots: [Option<Gen>; 4], c: K) -> TensorElement4<K> {
    let mut c = c;
    let ws: [Word; 4] = slots.map(|g| match g {
        None => Vec::new(),
        Some(g) => {
            let (s, h) = resolve_alias(g);
            if s == 1 {
                c = -c.clone();
            }
            vec![h]
        }
    });
    let mut t = TensorElement4::zero();
    t.add_term(ws, c);
    t
}

/// `x_{i alpha}`, `y_{j alpha}`, `z_{i beta}`, `w_{j beta}` for `i <= r`, `j <= k`,
/// `1 <= alpha <= s`, `-l <= beta <= -1`.
pub fn build_xyzw<K: QField>(r: usize, k: usize, s: usize, l: usize, n: usize, v: Variant) -> Vec<Invariant<K>> {
    let idx = index_set(n);
    let sg = |p: i32| K::sign(parity(p));
    let mut out = Vec::new();
    let mut push = |family, indices, terms: Vec<TensorElement4<K>>| {
        let mut elem = TensorElement4::zero();
        for t in terms {
            elem.add_scaled(&t, &K::one());
        }
        out.push(Invariant { family, indices, elem });
    };
    for i in 1..=r as i32 {
        for al in 1..=s as i32 {
            let terms = idx
                .iter()
                .map(|&p| {
                    one_term(
                        [Some(Gen::new(Family::A, i, p)), None, Some(Gen::new(Family::Bar, al, p)), None],
                        K::one(),
                    )
                })
                .collect();
            push('x', (i, al), terms);
        }
    }
    for j in 1..=k as i32 {
        for al in 1..=s as i32 {
            let terms = idx
                .iter()
                .map(|&p| {
                    let c = if v == Variant::Corrected { sg(p) } else { K::one() };
                    one_term([None, Some(Gen::new(Family::APi, j, -p)), Some(Gen::new(Family::Bar, al, p)), None], c)
                })
                .collect();
            push('y', (j, al), terms);
        }
    }
    for i in 1..=r as i32 {
        for be in -(l as i32)..=-1 {
            let terms = idx
                .iter()
                .map(|&p| {
                    let c = if v == Variant::Literal { sg(p) } else { K::one() };
                    one_term([Some(Gen::new(Family::A, i, p)), None, None, Some(Gen::new(Family::BarPi, be, -p))], c)
                })
                .collect();
            push('z', (i, be), terms);
        }
    }
    for j in 1..=k as i32 {
        for be in -(l as i32)..=-1 {
            let terms = idx
                .iter()
                .map(|&p| {
                    one_term(
                        [None, Some(Gen::new(Family::APi, j, p)), None, Some(Gen::new(Family::BarPi, be, p))],
                        sg(p),
                    )
                })
                .collect();
            push('w', (j, be), terms);
        }
    }
    out
}

/// First `(a, b)` with `L_ab . z != delta_ab z`, if any.
pub fn invariance_failure<K: QField>(set: &Setting<K>, z: &TensorElement4<K>) -> Result<Option<String>> {
    for (a, b) in set.pairs() {
        let got = set.act4(a, b, z)?;
        let want = if a == b { z.clone() } else { TensorElement4::zero() };
        let d = got.sub(&want);
        if !d.is_zero() {
            return Ok(Some(format!("L[{a},{b}] . ({z}) - eps(L[{a},{b}]) z = {d}")));
        }
    }
    Ok(None)
}

/// `L_ab . z = eps(L_ab) z` for every generator `L_ab`.
pub fn check_invariant<K: QField>(set: &Setting<K>, z: &TensorElement4<K>, name: &str) -> Result<Check> {
    let mut c = Check::new(format!("{name} is invariant"));
    for (a, b) in set.pairs() {
        let got = set.act4(a, b, z)?;
        let want = if a == b { z.clone() } else { TensorElement4::zero() };
        let d = got.sub(&want);
        c.record(d.is_zero(), || format!("L[{a},{b}]: {d}"));
    }
    Ok(c)
}

/// Applies `1 (x) tau (x) 1 (x) tau-bar`.
pub fn transport<K: QField>(z: &TensorElement4<K>) -> TensorElement4<K> {
    let mut out = TensorElement4::zero();
    for (ws, c) in z.terms() {
        let mut c = c.clone();
        let mut ws = ws.clone();
        for (i, f) in [(1usize, tau::<K> as fn(Gen) -> (K, Gen)), (3, tau_bar::<K>)] {
            ws[i] = ws[i]
                .iter()
                .map(|g| {
                    let (s, h) = f(*g);
                    c = c.clone() * s;
                    h
                })
                .collect();
        }
        out.add_term(ws, c);
    }
    out
}

/// Invariance under random products `L_ab L_cd` of generators.
pub fn check_products<K: QField>(
    set: &Setting<K>,
    z: &TensorElement4<K>,
    name: &str,
    trials: usize,
    seed: u64,
) -> Result<Check> {
    let pairs = set.pairs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Check::new(format!("{name} is invariant under products of two generators"));
    for _ in 0..trials {
        let (a, b) = pairs[rng.gen_range(0..pairs.len())];
        let (u, v) = pairs[rng.gen_range(0..pairs.len())];
        let got = set.act4(a, b, &set.act4(u, v, z)?)?;
        let want = if a == b && u == v { z.clone() } else { TensorElement4::zero() };
        let d = got.sub(&want);
        c.record(d.is_zero(), || format!("L[{a},{b}] L[{u},{v}]: {d}"));
    }
    Ok(c)
}

pub fn to_json<K: QField>(invs: &[Invariant<K>]) -> Value {
    Value::Array(
        invs.iter()
            .map(|i| json!({"family": i.family.to_string(), "indices": [i.indices.0, i.indices.1], "element": i.elem.to_string()}))
            .collect(),
    )
}

/// Every family at `(n, r, k, s, l)`, the transported copies, products, and negative controls.
pub fn invariant_checks<K: QField>(
    n: usize,
    r: usize,
    k: usize,
    s: usize,
    l: usize,
    families: &[char],
    seed: u64,
) -> Result<Vec<Check>> {
    let set = Setting::<K>::new(n, r, k, s, l)?;
    let moved = Setting::<K>::transported(n, r, k, s, l)?;
    let invs: Vec<Invariant<K>> =
        build_xyzw(r, k, s, l, n, Variant::Corrected).into_iter().filter(|i| families.contains(&i.family)).collect();
    let mut checks = Vec::new();
    for fam in families {
        let mut c = Check::new(format!("all {fam} elements are invariant"));
        let mut t = Check::new(format!("all {fam} elements stay invariant after 1 (x) tau (x) 1 (x) tau_bar"));
        for inv in invs.iter().filter(|i| i.family == *fam) {
            let tag = format!("{fam}[{},{}]", inv.indices.0, inv.indices.1);
            let f = invariance_failure(&set, &inv.elem)?;
            c.record(f.is_none(), || format!("{tag}: {}", f.clone().unwrap_or_default()));
            let f = invariance_failure(&moved, &transport(&inv.elem))?;
            t.record(f.is_none(), || format!("{tag}: {}", f.clone().unwrap_or_default()));
        }
        checks.push(c);
        checks.push(t);
    }
    if n == 1 {
        if let Some(inv) = invs.first() {
            checks.push(check_products(
                &set,
                &inv.elem,
                &format!("{}[{},{}]", inv.family, inv.indices.0, inv.indices.1),
                20,
                seed,
            )?);
        }
    }
    if r >= 1 {
        let t11 = one_term([Some(Gen::new(Family::A, 1, 1)), None, None, None], K::one());
        checks.push(Check::control("t[1,1] (x) 1 (x) 1 (x) 1 is not invariant", invariance_failure(&set, &t11)?));
    }
    let literal = build_xyzw::<K>(r, k, s, l, n, Variant::Literal);
    for fam in ['y', 'z'] {
        if !families.contains(&fam) {
            continue;
        }
        if let Some(inv) = literal.iter().find(|i| i.family == fam) {
            let f = invariance_failure(&set, &inv.elem)?;
            checks.push(Check::control(format!("{fam} with the first-displayed signs is not invariant"), f));
        }
    }
    if let Some(x) = invs.iter().find(|i| i.family == 'x') {
        let mut bad = TensorElement4::zero();
        for (i, (ws, c)) in x.elem.terms().enumerate() {
            let c = if i == 0 { -c.clone() } else { c.clone() };
            bad.add_term(ws.clone(), c);
        }
        checks.push(Check::control("x with one sign flipped is not invariant", invariance_failure(&set, &bad)?));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::Scalar;

    #[test]
    fn x11_expansion_at_n1() {
        let invs = build_xyzw::<Scalar>(1, 0, 1, 0, 1, Variant::Corrected);
        assert_eq!(invs.len(), 1);
        let x = &invs[0].elem;
        let t = |f, w| vec![Gen::new(Family::A, f, w)];
        let tb = |f, w| vec![Gen::new(Family::Bar, f, w)];
        let mut want = TensorElement4::zero();
        want.add_term([t(1, -1), vec![], tb(-1, 1), vec![]], Scalar::from_int(-1));
        want.add_term([t(1, 1), vec![], tb(-1, -1), vec![]], Scalar::from_int(1));
        assert_eq!(*x, want);
    }

    #[test]
    fn empty_ranges_leave_only_x() {
        let invs = build_xyzw::<Scalar>(2, 0, 1, 0, 1, Variant::Corrected);
        assert!(invs.iter().all(|i| i.family == 'x'));
        assert_eq!(invs.len(), 2);
    }

    #[test]
    fn unit_is_invariant() {
        let set = Setting::<Scalar>::new(1, 1, 1, 1, 1).unwrap();
        let one = TensorElement4::pure([vec![], vec![], vec![], vec![]]);
        assert!(invariance_failure(&set, &one).unwrap().is_none());
    }
}
