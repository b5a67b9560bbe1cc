//! Super index sets and sparse multi-leg operators over `I_{m|m}`.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qscalar::QField;

/// `|i|`: 0 for positive indices, 1 for negative ones.
pub fn parity(i: i32) -> u32 {
    (i < 0) as u32
}

/// `I_{n|n} = {-n, .., -1, 1, .., n}` in its total order.
pub fn index_set(n: usize) -> Vec<i32> {
    let n = n as i32;
    (-n..=-1).chain(1..=n).collect()
}

/// `phi(i, j) = (-1)^{|j|} (delta_{ij} + delta_{i,-j})`.
pub fn phi_exp(i: i32, j: i32) -> i32 {
    let d = (i == j) as i32 + (i == -j) as i32;
    if j < 0 {
        -d
    } else {
        d
    }
}

pub fn delta(a: bool) -> i64 {
    a as i64
}

/// Matrix unit `E_{row,col}`.
pub type Unit = (i32, i32);

pub fn unit_parity(u: Unit) -> u32 {
    (parity(u.0) + parity(u.1)) % 2
}

/// Sparse operator on `legs.len()` tensor legs, entries keyed by one matrix unit per leg.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator<K> {
    legs: Vec<usize>,
    entries: BTreeMap<Vec<Unit>, K>,
}

impl<K: QField> TensorOperator<K> {
    pub fn zero(legs: Vec<usize>) -> Self {
        TensorOperator { legs, entries: BTreeMap::new() }
    }

    pub fn identity(legs: Vec<usize>) -> Self {
        let mut keys: Vec<Vec<Unit>> = vec![vec![]];
        for &m in &legs {
            keys = keys
                .into_iter()
                .flat_map(|k| {
                    index_set(m).into_iter().map(move |i| {
                        let mut k = k.clone();
                        k.push((i, i));
                        k
                    })
                })
                .collect();
        }
        let entries = keys.into_iter().map(|k| (k, K::one())).collect();
        TensorOperator { legs, entries }
    }

    pub fn legs(&self) -> &[usize] {
        &self.legs
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Unit>, &K)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &[Unit]) -> K {
        self.entries.get(key).cloned().unwrap_or_else(K::zero)
    }

    /// Adds `c` to the entry at `key`, dropping it if it cancels.
    pub fn add_entry(&mut self, key: Vec<Unit>, c: K) {
        debug_assert_eq!(key.len(), self.legs.len());
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

    fn check_legs(&self, o: &Self) -> Result<()> {
        if self.legs != o.legs {
            return Err(Error::Size(format!("{:?} vs {:?}", self.legs, o.legs)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_legs(o)?;
        let mut out = self.clone();
        for (k, v) in &o.entries {
            out.add_entry(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &K) -> Self {
        let mut out = TensorOperator::zero(self.legs.clone());
        for (k, v) in &self.entries {
            out.add_entry(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.scale(&-K::one()))
    }

    /// Entries that connect indices of mixed total parity make the operator inhomogeneous.
    pub fn parity(&self) -> Option<u32> {
        let mut p = None;
        for k in self.entries.keys() {
            let e = k.iter().map(|&u| unit_parity(u)).sum::<u32>() % 2;
            match p {
                None => p = Some(e),
                Some(q) if q != e => return None,
                _ => {}
            }
        }
        Some(p.unwrap_or(0))
    }

    fn mul_with(&self, o: &Self, signed: bool) -> Result<Self> {
        self.check_legs(o)?;
        let mut by_rows: HashMap<Vec<i32>, Vec<(&Vec<Unit>, &K)>> = HashMap::new();
        for (k, v) in &o.entries {
            by_rows.entry(k.iter().map(|u| u.0).collect()).or_default().push((k, v));
        }
        let mut out = TensorOperator::zero(self.legs.clone());
        for (ka, va) in &self.entries {
            let cols: Vec<i32> = ka.iter().map(|u| u.1).collect();
            let Some(list) = by_rows.get(&cols) else { continue };
            for (kb, vb) in list {
                let mut sign = 0u32;
                if signed {
                    for (i, &ua) in ka.iter().enumerate() {
                        let pa = unit_parity(ua);
                        if pa == 0 {
                            continue;
                        }
                        for kbj in kb.iter().take(i) {
                            sign += pa * unit_parity(*kbj);
                        }
                    }
                }
                let key = ka.iter().zip(kb.iter()).map(|(a, b)| (a.0, b.1)).collect();
                out.add_entry(key, K::sign(sign) * va.clone() * (*vb).clone());
            }
        }
        Ok(out)
    }

    /// Product in `End(V)^{(x)k}` with the super tensor sign
    /// `(a_1 (x) .. (x) a_k)(b_1 (x) .. (x) b_k) = (-1)^{sum_{i>j} |a_i||b_j|} a_1b_1 (x) .. (x) a_kb_k`.
    pub fn op_mul(&self, o: &Self) -> Result<Self> {
        self.mul_with(o, true)
    }

    /// Leg-wise composition without any sign; kept as a control.
    pub fn op_mul_plain(&self, o: &Self) -> Result<Self> {
        self.mul_with(o, false)
    }

    /// `self (x) o` on concatenated legs, coefficients taken literally.
    pub fn tensor(&self, o: &Self) -> Self {
        let mut legs = self.legs.clone();
        legs.extend(&o.legs);
        let mut out = TensorOperator::zero(legs);
        for (ka, va) in &self.entries {
            for (kb, vb) in &o.entries {
                let mut k = ka.clone();
                k.extend(kb.iter().copied());
                out.add_entry(k, va.clone() * vb.clone());
            }
        }
        out
    }

    /// Places `self` on the 1-based leg `positions` of a `total.len()`-leg space,
    /// identity elsewhere, with no sign insertion.
    pub fn embed_legs(&self, positions: &[usize], total: &[usize]) -> Result<Self> {
        if positions.len() != self.legs.len() {
            return Err(Error::Size(format!("{} legs placed on {} positions", self.legs.len(), positions.len())));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) || positions.iter().any(|&p| p == 0 || p > total.len()) {
            return Err(Error::Size(format!("bad positions {positions:?}")));
        }
        for (&p, &m) in positions.iter().zip(&self.legs) {
            if total[p - 1] != m {
                return Err(Error::Size(format!("leg {p} has size {} not {m}", total[p - 1])));
            }
        }
        let others: Vec<usize> = (1..=total.len()).filter(|p| !positions.contains(p)).collect();
        let ident = TensorOperator::<K>::identity(others.iter().map(|&p| total[p - 1]).collect());
        let mut out = TensorOperator::zero(total.to_vec());
        for (k, v) in &self.entries {
            for ki in ident.entries.keys() {
                let mut key = vec![(0, 0); total.len()];
                for (&p, &u) in positions.iter().zip(k) {
                    key[p - 1] = u;
                }
                for (&p, &u) in others.iter().zip(ki) {
                    key[p - 1] = u;
                }
                out.add_entry(key, v.clone());
            }
        }
        Ok(out)
    }

    /// Entries whose every row and column index satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(i32) -> bool) -> Self {
        let mut out = TensorOperator::zero(self.legs.clone());
        for (k, v) in &self.entries {
            if k.iter().all(|&(r, c)| keep(r) && keep(c)) {
                out.add_entry(k.clone(), v.clone());
            }
        }
        out
    }

    /// First key where two operators differ.
    pub fn first_difference(&self, o: &Self) -> Option<(Vec<Unit>, K, K)> {
        let mut keys: Vec<&Vec<Unit>> = self.entries.keys().chain(o.entries.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find_map(|k| {
            let (a, b) = (self.get(k), o.get(k));
            (a != b).then(|| (k.clone(), a, b))
        })
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(k, v)| json!([k.iter().map(|u| vec![u.0, u.1]).collect::<Vec<_>>(), v.to_string()]))
            .collect();
        json!({ "legs": self.legs, "entries": entries })
    }
}

fn two_leg<K: QField>(m: usize) -> TensorOperator<K> {
    TensorOperator::zero(vec![m, m])
}

/// `S = sum q^{phi(i,j)} E_ii (x) E_jj + xi sum_{i<j} (-1)^{|i|} (E_ji + E_{-j,-i}) (x) E_ij`.
pub fn build_s<K: QField>(n: usize) -> TensorOperator<K> {
    s_family(n, 1)
}

/// `S^{-1}`: the same shape with `q -> q^{-1}`.
pub fn build_s_inv<K: QField>(n: usize) -> TensorOperator<K> {
    s_family(n, -1)
}

fn s_family<K: QField>(n: usize, e: i32) -> TensorOperator<K> {
    let mut s = two_leg(n);
    let xi = if e > 0 { K::xi() } else { -K::xi() };
    for &i in &index_set(n) {
        for &j in &index_set(n) {
            s.add_entry(vec![(i, i), (j, j)], K::qpow(e * phi_exp(i, j)));
            if i < j {
                let c = K::sign(parity(i)) * xi.clone();
                s.add_entry(vec![(j, i), (i, j)], c.clone());
                s.add_entry(vec![(-j, -i), (i, j)], c);
            }
        }
    }
    s
}

/// `J = sum_a (-1)^{|a|} E_{-a,a}`.
pub fn build_j<K: QField>(n: usize) -> TensorOperator<K> {
    let mut j = TensorOperator::zero(vec![n]);
    for &a in &index_set(n) {
        j.add_entry(vec![(-a, a)], K::sign(parity(a)));
    }
    j
}

/// `S_J = -sum q^{-phi(a,b)} E_aa (x) E_bb + xi sum_{b<a} (-1)^{|a|} (E_ba + E_{-b,-a}) (x) E_ab`.
pub fn build_s_j<K: QField>(n: usize) -> TensorOperator<K> {
    let mut s = two_leg(n);
    for &a in &index_set(n) {
        for &b in &index_set(n) {
            s.add_entry(vec![(a, a), (b, b)], -K::qpow(-phi_exp(a, b)));
            if b < a {
                let c = K::sign(parity(a)) * K::xi();
                s.add_entry(vec![(b, a), (a, b)], c.clone());
                s.add_entry(vec![(-b, -a), (a, b)], c);
            }
        }
    }
    s
}

/// `(1 (x) J) S (1 (x) J)`.
pub fn conjugate_s_by_j<K: QField>(n: usize) -> TensorOperator<K> {
    let one_j = TensorOperator::identity(vec![n]).tensor(&build_j(n));
    one_j.op_mul(&build_s(n)).and_then(|x| x.op_mul(&one_j)).expect("matching legs")
}

/// Positive block of `S`: `sum_{i,j>0} q^{delta_ij} E_ii (x) E_jj + xi sum_{0<i<j} E_ji (x) E_ij`.
pub fn build_r_plus<K: QField>(m: usize) -> TensorOperator<K> {
    let mut r = two_leg(m);
    for i in 1..=m as i32 {
        for j in 1..=m as i32 {
            r.add_entry(vec![(i, i), (j, j)], K::qpow((i == j) as i32));
            if i < j {
                r.add_entry(vec![(j, i), (i, j)], K::xi());
            }
        }
    }
    r
}

/// Negative block of `S`: `sum q^{-delta_ij} E_ii (x) E_jj - xi sum_{j<i<0} E_ij (x) E_ji`.
pub fn build_r_minus<K: QField>(m: usize) -> TensorOperator<K> {
    r_minus_shape(m, false)
}

/// The negative-block formula with the transposed off-diagonal term `E_ji (x) E_ij`, `j<i`.
pub fn build_r_minus_transposed<K: QField>(m: usize) -> TensorOperator<K> {
    r_minus_shape(m, true)
}

fn r_minus_shape<K: QField>(m: usize, transposed: bool) -> TensorOperator<K> {
    let mut r = two_leg(m);
    let m = m as i32;
    for i in -m..0 {
        for j in -m..0 {
            r.add_entry(vec![(i, i), (j, j)], K::qpow(-((i == j) as i32)));
            if j < i {
                let key = if transposed { vec![(j, i), (i, j)] } else { vec![(i, j), (j, i)] };
                r.add_entry(key, -K::xi());
            }
        }
    }
    r
}

/// `D^{e} = sum_{alpha=1}^m q^{2 e alpha} (E_aa + E_{-a,-a})`.
pub fn build_d<K: QField>(m: usize, e: i32) -> TensorOperator<K> {
    let mut d = TensorOperator::zero(vec![m]);
    for &a in &index_set(m) {
        d.add_entry(vec![(a, a)], K::qpow(2 * e * a.abs()));
    }
    d
}

/// `S~ = (1 (x) D) S (1 (x) D^{-1})` written out entrywise.
pub fn build_s_tilde<K: QField>(m: usize) -> TensorOperator<K> {
    let mut s = two_leg(m);
    for &i in &index_set(m) {
        for &j in &index_set(m) {
            s.add_entry(vec![(i, i), (j, j)], K::qpow(phi_exp(i, j)));
            if i < j {
                let c = K::sign(parity(i)) * K::xi() * K::qpow(2 * (i.abs() - j.abs()));
                s.add_entry(vec![(j, i), (i, j)], c.clone());
                s.add_entry(vec![(-j, -i), (i, j)], c);
            }
        }
    }
    s
}

/// `(1 (x) D) S (1 (x) D^{-1})` by multiplication.
pub fn conjugate_s_by_d<K: QField>(m: usize) -> TensorOperator<K> {
    let one = TensorOperator::identity(vec![m]);
    let d = one.tensor(&build_d(m, 1));
    let di = one.tensor(&build_d(m, -1));
    d.op_mul(&build_s(m)).and_then(|x| x.op_mul(&di)).expect("matching legs")
}

fn ybe_sides<K: QField>(
    op: &TensorOperator<K>,
    mul: impl Fn(&TensorOperator<K>, &TensorOperator<K>) -> Result<TensorOperator<K>>,
) -> Result<(TensorOperator<K>, TensorOperator<K>)> {
    if op.legs().len() != 2 || op.legs()[0] != op.legs()[1] {
        return Err(Error::Size("yang-baxter needs two equal legs".into()));
    }
    let m = op.legs()[0];
    let t = [m, m, m];
    let a12 = op.embed_legs(&[1, 2], &t)?;
    let a13 = op.embed_legs(&[1, 3], &t)?;
    let a23 = op.embed_legs(&[2, 3], &t)?;
    let lhs = mul(&mul(&a12, &a13)?, &a23)?;
    let rhs = mul(&mul(&a23, &a13)?, &a12)?;
    Ok((lhs, rhs))
}

/// `op^{12} op^{13} op^{23} = op^{23} op^{13} op^{12}`; returns the first differing entry.
pub fn ybe_witness<K: QField>(op: &TensorOperator<K>) -> Result<Option<(Vec<Unit>, K, K)>> {
    let (l, r) = ybe_sides(op, |a, b| a.op_mul(b))?;
    Ok(l.first_difference(&r))
}

pub fn check_ybe<K: QField>(op: &TensorOperator<K>) -> bool {
    matches!(ybe_witness(op), Ok(None))
}

/// The Yang-Baxter check with sign-free leg composition.
pub fn check_ybe_plain<K: QField>(op: &TensorOperator<K>) -> bool {
    ybe_sides(op, |a, b| a.op_mul_plain(b)).is_ok_and(|(l, r)| l == r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::Scalar;

    type Op = TensorOperator<Scalar>;

    #[test]
    fn phi_values() {
        assert_eq!(phi_exp(1, 1), 1);
        assert_eq!(phi_exp(1, -1), -1);
        assert_eq!(phi_exp(1, 2), 0);
        assert_eq!(phi_exp(-2, 2), 1);
    }

    #[test]
    fn s_at_n1_by_hand() {
        // q E11(x)E11 + q E-1-1(x)E11 + q^-1 E11(x)E-1-1 + q^-1 E-1-1(x)E-1-1 - xi (E1,-1 + E-1,1)(x)E-1,1
        let q = Scalar::q;
        let qi = || Scalar::qpow(-1);
        let mut expect = Op::zero(vec![1, 1]);
        expect.add_entry(vec![(1, 1), (1, 1)], q());
        expect.add_entry(vec![(-1, -1), (1, 1)], q());
        expect.add_entry(vec![(1, 1), (-1, -1)], qi());
        expect.add_entry(vec![(-1, -1), (-1, -1)], qi());
        expect.add_entry(vec![(1, -1), (-1, 1)], -Scalar::xi());
        expect.add_entry(vec![(-1, 1), (-1, 1)], -Scalar::xi());
        assert_eq!(build_s::<Scalar>(1), expect);
        assert!(build_s::<Scalar>(2).get(&[(1, 1), (2, 2)]) == Scalar::from_int(1));
    }

    #[test]
    fn j_squares_to_minus_one() {
        let j = build_j::<Scalar>(2);
        assert_eq!(j.op_mul(&j).unwrap(), Op::identity(vec![2]).scale(&-Scalar::from_int(1)));
        assert_eq!(j.parity(), Some(1));
        assert_eq!(build_s::<Scalar>(2).parity(), Some(0));
    }

    #[test]
    fn r_plus_single_block() {
        let mut e = Op::zero(vec![1, 1]);
        e.add_entry(vec![(1, 1), (1, 1)], Scalar::q());
        assert_eq!(build_r_plus::<Scalar>(1), e);
    }

    #[test]
    fn diagonal_part_satisfies_ybe() {
        let s = build_s::<Scalar>(2).restrict(|_| true);
        let mut d = Op::zero(vec![2, 2]);
        for (k, v) in s.entries() {
            if k.iter().all(|u| u.0 == u.1) {
                d.add_entry(k.clone(), v.clone());
            }
        }
        assert!(check_ybe(&d));
    }

    #[test]
    fn perturbed_s_fails_ybe() {
        let mut s = build_s::<Scalar>(1);
        s.add_entry(vec![(1, 1), (-1, 1)], Scalar::from_int(1));
        assert!(!check_ybe(&s));
    }

    #[test]
    fn embed_identity_and_errors() {
        let s = build_s::<Scalar>(1);
        assert_eq!(s.embed_legs(&[1, 2], &[1, 1]).unwrap(), s);
        assert!(s.embed_legs(&[2, 1], &[1, 1, 1]).is_err());
        assert!(s.embed_legs(&[1, 2], &[1, 2]).is_err());
    }
}
