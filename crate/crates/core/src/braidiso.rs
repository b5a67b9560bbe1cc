//! Braidings `Theta`, `Theta-bar` and their transports, braided tensor products,
//! the embeddings `iota`, and the isomorphisms `sigma`, `sigma-bar`, `tau`, `tau-bar`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::actions::{act_tensor, derive_action, ActionKind, ActionTable};
use crate::error::{Error, Result};
use crate::presentations::{generator_matrix, rank_of, render_word, Elem, Family, Gen, Presentation, SlotTensor, Word};
use crate::qscalar::QField;
use crate::report::Check;
use crate::supertensor::{build_s, parity};
use crate::texpr::{parse, universe_of, Env, Expr, Factor};

pub type Tensor2<K> = SlotTensor<K, 2>;

type GenRule<K> = Vec<(Gen, Gen, K)>;
type WordImage<K> = Vec<((Word, Word), K)>;

/// A twisting map `left (x) right -> right (x) left`, given on generators and
/// extended to words through the two hexagon identities.
#[derive(Debug)]
pub struct Braiding<K> {
    pub name: String,
    left: Arc<Presentation<K>>,
    right: Arc<Presentation<K>>,
    table: HashMap<(Gen, Gen), GenRule<K>>,
    memo: Mutex<HashMap<(Word, Word), WordImage<K>>>,
}

impl<K: QField> Braiding<K> {
    fn derive(name: &str, left: Arc<Presentation<K>>, right: Arc<Presentation<K>>, equation: &str) -> Result<Self> {
        if left.n() != right.n() {
            return Err(Error::Params("braiding needs a common n".into()));
        }
        let n = left.n();
        let mut env = Env::<K>::new();
        env.bind_gens("Tl", generator_matrix(left.family(), left.frames(), n))
            .bind_gens("Tr", generator_matrix(right.family(), right.frames(), n))
            .bind_op("S", build_s(n));
        let e = parse(equation)?;
        let Expr::Equation(l, r) = &e else { unreachable!("braiding equation") };
        let uni = universe_of(&e)?;
        let lhs = env.eval_free(l, &uni)?;
        let rhs = env.eval_free(r, &uni)?;
        let single = |f: &Factor| match f {
            Factor::Slot(w) if w.len() == 1 => Some(w[0]),
            _ => None,
        };
        let mut inputs: HashMap<(Factor, Factor), (K, Gen, Gen)> = HashMap::new();
        for (key, c) in lhs.entries() {
            let (Some(y), Some(x)) = (single(&key[2]), single(&key[3])) else {
                return Err(Error::Arity("braiding input entry".into()));
            };
            if inputs.insert((key[0].clone(), key[1].clone()), (c.clone(), y, x)).is_some() {
                return Err(Error::Arity("braiding input entries are not separated by legs".into()));
            }
        }
        let mut acc: BTreeMap<(Gen, Gen), BTreeMap<(Gen, Gen), K>> = BTreeMap::new();
        for (key, c) in rhs.entries() {
            let (Some(x2), Some(y2)) = (single(&key[2]), single(&key[3])) else {
                return Err(Error::Arity("braiding output entry".into()));
            };
            let (lc, y, x) = inputs
                .get(&(key[0].clone(), key[1].clone()))
                .cloned()
                .ok_or_else(|| Error::Arity("output entry without input".into()))?;
            let slot = acc.entry((y, x)).or_default().entry((x2, y2)).or_insert_with(K::zero);
            *slot = slot.clone() + c.clone() / lc;
        }
        let table = acc
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().filter(|(_, c)| !c.is_zero()).map(|((a, b), c)| (a, b, c)).collect()))
            .collect();
        Ok(Braiding { name: name.into(), left, right, table, memo: Mutex::new(HashMap::new()) })
    }

    /// `Theta : A_{k,n} (x) A_{r,n} -> A_{r,n} (x) A_{k,n}`.
    pub fn theta(a_k: Arc<Presentation<K>>, a_r: Arc<Presentation<K>>) -> Result<Self> {
        Self::derive("theta", a_k, a_r, "Tl^{1[3]} Tr^{2[4]} == Tr^{2[3]} Tl^{1[4]} S^{12}")
    }

    /// `Theta-bar : Abar_{l,n} (x) Abar_{s,n} -> Abar_{s,n} (x) Abar_{l,n}`.
    pub fn theta_bar(abar_l: Arc<Presentation<K>>, abar_s: Arc<Presentation<K>>) -> Result<Self> {
        Self::derive("theta_bar", abar_l, abar_s, "Tl^{1[3]} Tr^{2[4]} == S^{12} Tr^{2[3]} Tl^{1[4]}")
    }

    /// `(1 (x) back) . self . (into (x) 1)` with a new left algebra.
    pub fn transported(
        &self,
        name: &str,
        new_left: Arc<Presentation<K>>,
        into: impl Fn(Gen) -> (K, Gen),
        back: impl Fn(Gen) -> (K, Gen),
    ) -> Self {
        let mut table = HashMap::new();
        for &y in new_left.gens() {
            let (s, y0) = into(y);
            for &x in self.right.gens() {
                let rule: GenRule<K> = self
                    .table
                    .get(&(y0, x))
                    .map(|r| {
                        r.iter()
                            .map(|(x2, y2, c)| {
                                let (t, y3) = back(*y2);
                                (*x2, y3, c.clone() * s.clone() * t)
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                table.insert((y, x), rule);
            }
        }
        Braiding {
            name: name.into(),
            left: new_left,
            right: self.right.clone(),
            table,
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// Copy with one generator-level coefficient negated.
    pub fn with_negated(&self, y: Gen, x: Gen, i: usize) -> Self {
        let mut table = self.table.clone();
        if let Some(t) = table.get_mut(&(y, x)).and_then(|r| r.get_mut(i)) {
            t.2 = -t.2.clone();
        }
        Braiding {
            name: format!("{} (corrupted)", self.name),
            left: self.left.clone(),
            right: self.right.clone(),
            table,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn left(&self) -> &Arc<Presentation<K>> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Presentation<K>> {
        &self.right
    }

    /// `Theta(y (x) x)` for generators.
    pub fn on_gens(&self, y: Gen, x: Gen) -> Tensor2<K> {
        let mut t = Tensor2::zero();
        for (a, b, c) in self.table.get(&(y, x)).into_iter().flatten() {
            t.add_term([vec![*a], vec![*b]], c.clone());
        }
        t
    }

    /// Recursive extension to free words; the image is not normal-ordered.
    pub fn on_words(&self, y: &[Gen], x: &[Gen]) -> WordImage<K> {
        if y.is_empty() || x.is_empty() {
            return vec![((x.to_vec(), y.to_vec()), K::one())];
        }
        if y.len() == 1 && x.len() == 1 {
            return self
                .table
                .get(&(y[0], x[0]))
                .map(|r| r.iter().map(|(a, b, c)| ((vec![*a], vec![*b]), c.clone())).collect())
                .unwrap_or_default();
        }
        let key = (y.to_vec(), x.to_vec());
        if let Some(v) = self.memo.lock().expect("memo lock").get(&key) {
            return v.clone();
        }
        let mut acc: BTreeMap<(Word, Word), K> = BTreeMap::new();
        let mut push = |k: (Word, Word), c: K| {
            let e = acc.entry(k).or_insert_with(K::zero);
            *e = e.clone() + c;
        };
        if x.len() > 1 {
            let (g, rest) = x.split_at(1);
            for ((xa, ya), c) in self.on_words(y, g) {
                for ((xb, yb), d) in self.on_words(&ya, rest) {
                    let mut w = xa.clone();
                    w.extend(xb);
                    push((w, yb), c.clone() * d);
                }
            }
        } else {
            let (yp, h) = y.split_at(y.len() - 1);
            for ((xa, ya), c) in self.on_words(h, x) {
                for ((xb, yb), d) in self.on_words(yp, &xa) {
                    let mut w = yb;
                    w.extend(ya.iter().copied());
                    push((xb, w), c.clone() * d);
                }
            }
        }
        let out: WordImage<K> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.memo.lock().expect("memo lock").insert(key, out.clone());
        out
    }

    /// `Theta` on an element of `left (x) right`, normal-ordered in `right (x) left`.
    pub fn apply(&self, t: &Tensor2<K>) -> Tensor2<K> {
        let mut out = Tensor2::zero();
        for ([y, x], c) in t.terms() {
            for ((a, b), d) in self.on_words(y, x) {
                out.add_term([a, b], c.clone() * d);
            }
        }
        out.reduce([&self.right, &self.left])
    }

    pub fn apply_elems(&self, y: &Elem<K>, x: &Elem<K>) -> Tensor2<K> {
        self.apply(&Tensor2::from_elems([y, x]))
    }
}

fn words_upto<K: QField>(p: &Presentation<K>, d: usize) -> Vec<Word> {
    (1..=d).flat_map(|k| p.normal_words(k)).collect()
}

/// Both hexagon identities on all generator triples, plus random normal words of degree `<= 2`.
pub fn check_hexagons<K: QField>(b: &Braiding<K>, random: usize, seed: u64) -> Vec<Check> {
    let (l, r) = (b.left(), b.right());
    let mut triples1: Vec<(Word, Word, Word)> = Vec::new();
    let mut triples2: Vec<(Word, Word, Word)> = Vec::new();
    for &y in l.gens() {
        for &x in r.gens() {
            for &x2 in r.gens() {
                triples1.push((vec![y], vec![x], vec![x2]));
            }
            for &y2 in l.gens() {
                triples2.push((vec![y], vec![y2], vec![x]));
            }
        }
    }
    let lw = words_upto(l, 2);
    let rw = words_upto(r, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if !lw.is_empty() && !rw.is_empty() {
        for _ in 0..random {
            let pick = |rng: &mut ChaCha8Rng, v: &Vec<Word>| v[rng.gen_range(0..v.len())].clone();
            triples1.push((pick(&mut rng, &lw), pick(&mut rng, &rw), pick(&mut rng, &rw)));
            triples2.push((pick(&mut rng, &lw), pick(&mut rng, &lw), pick(&mut rng, &rw)));
        }
    }
    let mut h1 = Check::new(format!("{}: hexagon Theta(y (x) x x') = (mu (x) 1)(1 (x) Theta)(Theta (x) 1)", b.name));
    for (y, x, x2) in &triples1 {
        let lhs = b.apply_elems(&Elem::from_word(y.clone()), &r.normal_form(&[x.as_slice(), x2].concat()));
        let mut rhs = Tensor2::zero();
        for ([xa, ya], c) in b.apply(&Tensor2::pure([y.clone(), x.clone()])).terms() {
            for ([xb, yb], d) in b.apply(&Tensor2::pure([ya.clone(), x2.clone()])).terms() {
                let prod = r.normal_form(&[xa.as_slice(), xb].concat());
                rhs.add_scaled(&Tensor2::from_elems([&prod, &Elem::from_word(yb.clone())]), &(c.clone() * d.clone()));
            }
        }
        let d = lhs.sub(&rhs);
        h1.record(d.is_zero(), || format!("y={} x={} x'={}: {d}", render_word(y), render_word(x), render_word(x2)));
    }
    let mut h2 = Check::new(format!("{}: hexagon Theta(y y' (x) x) = (1 (x) mu)(Theta (x) 1)(1 (x) Theta)", b.name));
    for (y, y2, x) in &triples2 {
        let lhs = b.apply_elems(&l.normal_form(&[y.as_slice(), y2].concat()), &Elem::from_word(x.clone()));
        let mut rhs = Tensor2::zero();
        for ([xa, ya], c) in b.apply(&Tensor2::pure([y2.clone(), x.clone()])).terms() {
            for ([xb, yb], d) in b.apply(&Tensor2::pure([y.clone(), xa.clone()])).terms() {
                let prod = l.normal_form(&[yb.as_slice(), ya].concat());
                rhs.add_scaled(&Tensor2::from_elems([&Elem::from_word(xb.clone()), &prod]), &(c.clone() * d.clone()));
            }
        }
        let d = lhs.sub(&rhs);
        h2.record(d.is_zero(), || format!("y={} y'={} x={}: {d}", render_word(y), render_word(y2), render_word(x)));
    }
    vec![h1, h2]
}

/// `Theta(rel (x) g) = 0` and `Theta(g (x) rel) = 0` for every defining relation and generator.
pub fn check_kills_relations<K: QField>(b: &Braiding<K>) -> Check {
    let mut c = Check::new(format!("{}: annihilates defining-relation differences", b.name));
    for rel in b.left().relation_elements() {
        for &x in b.right().gens() {
            let v = b.apply(&Tensor2::from_elems([&rel, &Elem::gen(x)]));
            c.record(v.is_zero(), || format!("({rel}) (x) {x}: {v}"));
        }
    }
    for rel in b.right().relation_elements() {
        for &y in b.left().gens() {
            let v = b.apply(&Tensor2::from_elems([&Elem::gen(y), &rel]));
            c.record(v.is_zero(), || format!("{y} (x) ({rel}): {v}"));
        }
    }
    c
}

fn module_hom_failure<K: QField>(
    b: &Braiding<K>,
    act_l: &ActionTable<K>,
    act_r: &ActionTable<K>,
    inputs: &[Tensor2<K>],
    c: &mut Check,
) -> Result<()> {
    for (a, bb) in act_l.pairs() {
        for t in inputs {
            let lhs = b.apply(&act_tensor([act_l, act_r], a, bb, t)?);
            let rhs = act_tensor([act_r, act_l], a, bb, &b.apply(t))?;
            let d = lhs.sub(&rhs);
            c.record(d.is_zero(), || format!("L[{a},{bb}] on {t}: {d}"));
        }
    }
    Ok(())
}

fn module_hom_inputs<K: QField>(l: &Presentation<K>, r: &Presentation<K>) -> Vec<Tensor2<K>> {
    let mut v = Vec::new();
    for y in words_upto(l, 2) {
        for &x in r.gens() {
            v.push(Tensor2::pure([y.clone(), vec![x]]));
        }
    }
    v
}

/// `Theta(L_ab . (y (x) x)) = L_ab . Theta(y (x) x)` for `y` of degree `<= 2`, `x` a generator.
pub fn check_theta_module_hom<K: QField>(r: usize, k: usize, n: usize) -> Result<Vec<Check>> {
    let a_k = Arc::new(Presentation::<K>::new(Family::A, k, n)?);
    let a_r = Arc::new(Presentation::new(Family::A, r, n)?);
    let th = Braiding::theta(a_k.clone(), a_r.clone())?;
    let phi_k = derive_action(ActionKind::Phi, a_k.clone())?;
    let phi_r = derive_action(ActionKind::Phi, a_r.clone())?;
    let inputs = module_hom_inputs(&a_k, &a_r);
    let mut c = Check::new(format!("theta is a U_q(q_{n})-module map on A_{k} (x) A_{r}"));
    module_hom_failure(&th, &phi_k, &phi_r, &inputs, &mut c)?;
    let mut control = None;
    'outer: for &y in a_k.gens() {
        for &x in a_r.gens() {
            for i in 0..th.on_gens(y, x).len() {
                let bad = th.with_negated(y, x, i);
                let mut cc = Check::new("");
                module_hom_failure(&bad, &phi_k, &phi_r, &inputs, &mut cc)?;
                if !cc.pass {
                    control =
                        Some(format!("negated term {i} of Theta({y} (x) {x}): {}", cc.detail.unwrap_or_default()));
                    break 'outer;
                }
            }
        }
    }
    Ok(vec![c, Check::control("sign-corrupted theta is not a module map", control)])
}

/// `A_first (x) A_second` with product `(mu (x) mu)(1 (x) Theta (x) 1)`.
pub struct BraidedAlgebra<K> {
    pub first: Arc<Presentation<K>>,
    pub second: Arc<Presentation<K>>,
    pub braiding: Arc<Braiding<K>>,
}

impl<K: QField> BraidedAlgebra<K> {
    pub fn new(braiding: Arc<Braiding<K>>) -> Self {
        BraidedAlgebra { first: braiding.right().clone(), second: braiding.left().clone(), braiding }
    }

    pub fn mul(&self, u: &Tensor2<K>, v: &Tensor2<K>) -> Tensor2<K> {
        let mut out = Tensor2::zero();
        for ([x, y], c) in u.terms() {
            for ([x2, y2], d) in v.terms() {
                for ((xa, ya), e) in self.braiding.on_words(y, x2) {
                    let w1 = [x.as_slice(), &xa].concat();
                    let w2 = [ya.as_slice(), y2].concat();
                    out.add_term([w1, w2], c.clone() * d.clone() * e);
                }
            }
        }
        out.reduce([&self.first, &self.second])
    }

    /// Normal monomial pairs of total degree `d`.
    pub fn basis(&self, d: usize) -> Vec<[Word; 2]> {
        let mut out = Vec::new();
        for d1 in 0..=d {
            let xs = if d1 == 0 { vec![Vec::new()] } else { self.first.normal_words(d1) };
            let ys = if d == d1 { vec![Vec::new()] } else { self.second.normal_words(d - d1) };
            for x in &xs {
                for y in &ys {
                    out.push([x.clone(), y.clone()]);
                }
            }
        }
        out
    }

    pub fn dim(&self, d: usize) -> u64 {
        (0..=d).map(|i| self.first.dim_component(i) * self.second.dim_component(d - i)).sum()
    }
}

pub fn iota<K: QField>(p: i32, e: &Elem<K>) -> Elem<K> {
    e.map_gens(|g| (K::one(), g.shifted(p)))
}

/// `x (x) y -> iota_shift(x) iota_0(y)` into `target`.
pub fn sigma<K: QField>(target: &Presentation<K>, shift: i32, t: &Tensor2<K>) -> Elem<K> {
    let mut out = Elem::zero();
    for ([x, y], c) in t.terms() {
        let w: Word = x.iter().map(|g| g.shifted(shift)).chain(y.iter().copied()).collect();
        out.add_scaled(&target.normal_form(&w), c);
    }
    out
}

/// Checks for `sigma : A_{r,n} (x) A_{k,n} -> A_{r+k,n}` (or `sigma-bar` on the dual side).
pub fn check_sigma<K: QField>(r: usize, k: usize, n: usize, bar: bool, max_deg: usize) -> Result<Vec<Check>> {
    let fam = if bar { Family::Bar } else { Family::A };
    let first = Arc::new(Presentation::new(fam, r, n)?);
    let second = Arc::new(Presentation::new(fam, k, n)?);
    let target = Presentation::new(fam, r + k, n)?;
    let br = if bar {
        Braiding::theta_bar(second.clone(), first.clone())?
    } else {
        Braiding::theta(second.clone(), first.clone())?
    };
    let alg = BraidedAlgebra::new(Arc::new(br));
    let name = if bar { "sigma_bar" } else { "sigma" };
    let shift = k as i32;
    let s = |t: &Tensor2<K>| sigma(&target, shift, t);

    let mut gen_pairs = Check::new(format!(
        "{name}((1 (x) y)(x (x) 1)) = {name}(1 (x) y) {name}(x (x) 1), y of degree 1, x of degree <= 2"
    ));
    for y in second.gens() {
        for x in words_upto(&first, 2) {
            let u = Tensor2::pure([Vec::new(), vec![*y]]);
            let v = Tensor2::pure([x.clone(), Vec::new()]);
            let lhs = s(&alg.mul(&u, &v));
            let rhs = target.elem_mul(&s(&u), &s(&v));
            let d = lhs.sub(&rhs);
            gen_pairs.record(d.is_zero(), || format!("y={y} x={}: {d}", render_word(&x)));
        }
    }

    let mut hom = Check::new(format!("{name} is multiplicative on basis pairs of total degree <= {max_deg}"));
    let basis: Vec<(usize, [Word; 2])> =
        (1..max_deg).flat_map(|d| alg.basis(d).into_iter().map(move |b| (d, b))).collect();
    for (d1, u) in &basis {
        for (d2, v) in &basis {
            if d1 + d2 > max_deg {
                continue;
            }
            let (u, v) = (Tensor2::pure(u.clone()), Tensor2::pure(v.clone()));
            let d = s(&alg.mul(&u, &v)).sub(&target.elem_mul(&s(&u), &s(&v)));
            hom.record(d.is_zero(), || format!("{u} * {v}: {d}"));
        }
    }

    let mut bij = Check::new(format!("{name} has full rank in each degree <= {max_deg}"));
    for d in 0..=max_deg {
        let imgs: Vec<Elem<K>> = alg.basis(d).into_iter().map(|b| s(&Tensor2::pure(b))).collect();
        let (dom, rank, cod) = (alg.dim(d), rank_of(&imgs) as u64, target.dim_component(d));
        bij.record(dom == imgs.len() as u64 && rank == dom && rank == cod, || {
            format!("degree {d}: domain {dom}, rank {rank}, codomain {cod}")
        });
    }

    let kind = if bar { ActionKind::PhiBar } else { ActionKind::Phi };
    let a1 = derive_action(kind, first.clone())?;
    let a2 = derive_action(kind, second.clone())?;
    let target = Arc::new(target);
    let at = derive_action(kind, target.clone())?;
    let mut modmap = Check::new(format!("{name} commutes with the U_q(q_{n}) action on generators"));
    let mut inputs = Vec::new();
    for &x in first.gens() {
        inputs.push(Tensor2::pure([vec![x], Vec::new()]));
        for &y in second.gens() {
            inputs.push(Tensor2::pure([vec![x], vec![y]]));
        }
    }
    for &y in second.gens() {
        inputs.push(Tensor2::pure([Vec::new(), vec![y]]));
    }
    for (a, b) in at.pairs() {
        for t in &inputs {
            let lhs = sigma(&target, shift, &act_tensor([&a1, &a2], a, b, t)?);
            let rhs = at.apply(a, b, &sigma(&target, shift, t))?;
            let d = lhs.sub(&rhs);
            modmap.record(d.is_zero(), || format!("L[{a},{b}] on {t}: {d}"));
        }
    }
    Ok(vec![gen_pairs, hom, bij, modmap])
}

/// `tau(t^pi_{ia}) = (-1)^{|a|} t_{i,-a}`.
pub fn tau<K: QField>(g: Gen) -> (K, Gen) {
    (K::sign(parity(g.weight)), Gen::new(Family::A, g.frame, -g.weight))
}

/// `tau^{-1}(t_{ia}) = -(-1)^{|a|} t^pi_{i,-a}`.
pub fn tau_inv<K: QField>(g: Gen) -> (K, Gen) {
    (-K::sign(parity(g.weight)), Gen::new(Family::APi, g.frame, -g.weight))
}

/// `tau-bar(tbar^pi_{alpha b}) = -tbar_{alpha,-b}`.
pub fn tau_bar<K: QField>(g: Gen) -> (K, Gen) {
    (-K::one(), Gen::new(Family::Bar, g.frame, -g.weight))
}

pub fn tau_bar_inv<K: QField>(g: Gen) -> (K, Gen) {
    (-K::one(), Gen::new(Family::BarPi, g.frame, -g.weight))
}

/// `tbar^pi_{alpha b} -> (-1)^{|-b|} tbar_{alpha,-b}`, the entrywise reading of `(J (x) 1) Tbar`.
pub fn tau_bar_literal<K: QField>(g: Gen) -> (K, Gen) {
    (K::sign(parity(-g.weight)), Gen::new(Family::Bar, g.frame, -g.weight))
}

pub fn tau_bar_literal_inv<K: QField>(g: Gen) -> (K, Gen) {
    (K::sign(parity(g.weight)), Gen::new(Family::BarPi, g.frame, -g.weight))
}

pub fn map_hom<K: QField>(target: &Presentation<K>, f: impl Fn(Gen) -> (K, Gen), e: &Elem<K>) -> Elem<K> {
    target.reduce(&e.map_gens(f))
}

type GenMap<K> = fn(Gen) -> (K, Gen);

/// `f : src -> tgt` with inverse `finv`: both respect relations, are mutually inverse,
/// and intertwine the given actions on generators and degree-2 words.
pub fn check_iso_intertwining<K: QField>(
    name: &str,
    src: Arc<Presentation<K>>,
    tgt: Arc<Presentation<K>>,
    f: GenMap<K>,
    finv: GenMap<K>,
    src_kind: ActionKind,
    tgt_kind: ActionKind,
) -> Result<Vec<Check>> {
    let mut hom = Check::new(format!("{name} sends defining relations to zero"));
    for rel in src.relation_elements() {
        let v = map_hom(&tgt, f, &rel);
        hom.record(v.is_zero(), || format!("{name}({rel}) = {v}"));
    }
    let mut hom_inv = Check::new(format!("{name}^-1 sends defining relations to zero"));
    for rel in tgt.relation_elements() {
        let v = map_hom(&src, finv, &rel);
        hom_inv.record(v.is_zero(), || format!("{name}^-1({rel}) = {v}"));
    }
    let mut inv = Check::new(format!("{name}^-1 {name} = id and {name} {name}^-1 = id on generators"));
    for &g in src.gens() {
        let v = map_hom(&src, finv, &map_hom(&tgt, f, &Elem::gen(g)));
        inv.record(v == Elem::gen(g), || format!("{g} -> {v}"));
    }
    for &g in tgt.gens() {
        let v = map_hom(&tgt, f, &map_hom(&src, finv, &Elem::gen(g)));
        inv.record(v == Elem::gen(g), || format!("{g} -> {v}"));
    }
    let a_src = derive_action(src_kind, src.clone())?;
    let a_tgt = derive_action(tgt_kind, tgt.clone())?;
    let mut tw = Check::new(format!("{name} intertwines {} and {}", src_kind.name(), tgt_kind.name()));
    let words: Vec<Word> = words_upto(&src, 2);
    for (a, b) in a_src.pairs() {
        for w in &words {
            let x = Elem::from_word(w.clone());
            let lhs = a_tgt.apply(a, b, &map_hom(&tgt, f, &x))?;
            let rhs = map_hom(&tgt, f, &a_src.apply(a, b, &x)?);
            let d = lhs.sub(&rhs);
            tw.record(d.is_zero(), || format!("L[{a},{b}] on {}: {d}", render_word(w)));
        }
    }
    Ok(vec![hom, hom_inv, inv, tw])
}

/// Associativity of the braided product of `A_{r,n} (x) A_{k,n}` on generator-type triples,
/// and the two iterated `sigma`s onto `A_{r+k+p,n}` for the triple product.
pub fn assoc_check<K: QField>(r: usize, k: usize, p: usize, n: usize, max_deg: usize) -> Result<Vec<Check>> {
    let pres = |m: usize| Presentation::<K>::new(Family::A, m, n).map(Arc::new);
    let (a_r, a_k, a_p) = (pres(r)?, pres(k)?, pres(p)?);
    let (a_rk, a_kp, a_all) = (pres(r + k)?, pres(k + p)?, pres(r + k + p)?);
    let rk = BraidedAlgebra::new(Arc::new(Braiding::theta(a_k.clone(), a_r.clone())?));
    let left = BraidedAlgebra::new(Arc::new(Braiding::theta(a_p.clone(), a_rk.clone())?));
    let right = BraidedAlgebra::new(Arc::new(Braiding::theta(a_kp.clone(), a_r.clone())?));

    let gens2: Vec<Tensor2<K>> = a_r
        .gens()
        .iter()
        .map(|&g| Tensor2::pure([vec![g], Vec::new()]))
        .chain(a_k.gens().iter().map(|&g| Tensor2::pure([Vec::new(), vec![g]])))
        .collect();
    let mut assoc = Check::new(format!("braided product on A_{r} (x) A_{k} is associative on generator triples"));
    for u in &gens2 {
        for v in &gens2 {
            for w in &gens2 {
                let d = rk.mul(&rk.mul(u, v), w).sub(&rk.mul(u, &rk.mul(v, w)));
                assoc.record(d.is_zero(), || format!("({u}) ({v}) ({w}): {d}"));
            }
        }
    }

    // Triple monomials x (x) y (x) z, placed in both bracketings.
    let triple_basis = |d: usize| -> Vec<[Word; 3]> {
        let mut out = Vec::new();
        for dx in 0..=d {
            for dy in 0..=d - dx {
                let dz = d - dx - dy;
                let nw = |p: &Presentation<K>, e: usize| if e == 0 { vec![Vec::new()] } else { p.normal_words(e) };
                for x in nw(&a_r, dx) {
                    for y in nw(&a_k, dy) {
                        for z in nw(&a_p, dz) {
                            out.push([x.clone(), y.clone(), z.clone()]);
                        }
                    }
                }
            }
        }
        out
    };
    let (k_i, p_i) = (k as i32, p as i32);
    let to_left = |t: &[Word; 3]| -> Tensor2<K> {
        let xy = sigma(&a_rk, k_i, &Tensor2::pure([t[0].clone(), t[1].clone()]));
        Tensor2::from_elems([&xy, &Elem::from_word(t[2].clone())])
    };
    let to_right = |t: &[Word; 3]| -> Tensor2<K> {
        let yz = sigma(&a_kp, p_i, &Tensor2::pure([t[1].clone(), t[2].clone()]));
        Tensor2::from_elems([&Elem::from_word(t[0].clone()), &yz])
    };
    let s_left = |t: &Tensor2<K>| sigma(&a_all, p_i, t);
    let s_right = |t: &Tensor2<K>| sigma(&a_all, (k + p) as i32, t);

    let mut iter = Check::new("iterated sigmas agree on triple monomials");
    let mut triple_hom =
        Check::new(format!("both bracketings of A_{r} (x) A_{k} (x) A_{p} give the product of A_{}", r + k + p));
    let mut rank =
        Check::new(format!("A_{r} (x) A_{k} (x) A_{p} -> A_{} has full rank in each degree <= {max_deg}", r + k + p));
    let bases: Vec<Vec<[Word; 3]>> = (0..=max_deg).map(triple_basis).collect();
    for (d, b) in bases.iter().enumerate() {
        let imgs: Vec<Elem<K>> = b.iter().map(|t| s_left(&to_left(t))).collect();
        for (t, img) in b.iter().zip(&imgs) {
            let other = s_right(&to_right(t));
            iter.record(*img == other, || format!("{}: {img} vs {other}", render_triple(t)));
        }
        let rk_ = rank_of(&imgs) as u64;
        let cod = a_all.dim_component(d);
        rank.record(rk_ == b.len() as u64 && rk_ == cod, || {
            format!("degree {d}: domain {}, rank {rk_}, codomain {cod}", b.len())
        });
    }
    for d1 in 1..max_deg {
        for d2 in 1..=max_deg - d1 {
            for u in &bases[d1] {
                for v in &bases[d2] {
                    let via_left = s_left(&left.mul(&to_left(u), &to_left(v)));
                    let via_right = s_right(&right.mul(&to_right(u), &to_right(v)));
                    let direct = a_all.elem_mul(&s_left(&to_left(u)), &s_left(&to_left(v)));
                    triple_hom.record(via_left == direct && via_right == direct, || {
                        format!("{} * {}: {via_left} | {via_right} | {direct}", render_triple(u), render_triple(v))
                    });
                }
            }
        }
    }
    Ok(vec![assoc, iter, triple_hom, rank])
}

fn render_triple(t: &[Word; 3]) -> String {
    format!("{} (x) {} (x) {}", render_word(&t[0]), render_word(&t[1]), render_word(&t[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::Scalar;

    #[test]
    fn theta_on_unit_is_flip() {
        let a = Arc::new(Presentation::<Scalar>::new(Family::A, 1, 1).unwrap());
        let th = Braiding::theta(a.clone(), a.clone()).unwrap();
        let x = Elem::gen(a.gens()[0]);
        assert_eq!(th.apply_elems(&Elem::one(), &x), Tensor2::from_elems([&x, &Elem::one()]));
        assert_eq!(th.apply_elems(&x, &Elem::one()), Tensor2::from_elems([&Elem::one(), &x]));
    }

    #[test]
    fn tau_round_trip() {
        for w in [-2, -1, 1, 2] {
            let g = Gen::new(Family::APi, 1, w);
            let (s, h) = tau::<Scalar>(g);
            let (t, back) = tau_inv::<Scalar>(h);
            assert_eq!((s * t, back), (Scalar::from_int(1), g));
        }
        assert_eq!(tau::<Scalar>(Gen::new(Family::APi, 1, 1)), (Scalar::from_int(1), Gen::new(Family::A, 1, -1)));
    }
}
