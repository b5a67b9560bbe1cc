//! Exact arithmetic in the field Q(q) of rational functions in one indeterminate.
//!
//! [`Scalar`] keeps a canonical reduced fraction so that equality is structural.
//! [`QField`] is the coefficient interface the rest of the crate is generic over;
//! [`QAt`] is a second instance with `q` specialised to a fixed rational number.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Field of coefficients containing a distinguished element `q`.
pub trait QField:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn q() -> Self;

    fn from_i64(v: i64) -> Self;

    /// `q^k` for any integer `k`.
    fn qpow(k: i32) -> Self {
        let base = if k >= 0 { Self::q() } else { Self::one() / Self::q() };
        let mut out = Self::one();
        for _ in 0..k.unsigned_abs() {
            out = out * base.clone();
        }
        out
    }

    /// `xi = q - q^{-1}`.
    fn xi() -> Self {
        Self::q() - Self::qpow(-1)
    }

    /// `(-1)^e`.
    fn sign(e: u32) -> Self {
        if e.is_multiple_of(2) {
            Self::one()
        } else {
            -Self::one()
        }
    }
}

/// Integer polynomial, coefficients from degree 0 upwards, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Poly(Vec<BigInt>);

impl Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }

    fn constant(c: BigInt) -> Self {
        Poly(vec![c]).trimmed()
    }

    fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k];
        v.push(c);
        Poly(v).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lc(&self) -> &BigInt {
        self.0.last().expect("nonzero polynomial")
    }

    fn low_order(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly(self.0[k..].to_vec())
    }

    fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut v = vec![BigInt::zero(); k];
        v.extend(self.0.iter().cloned());
        Poly(v)
    }

    fn add(&self, o: &Poly) -> Poly {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut v = long.0.clone();
        for (a, b) in v.iter_mut().zip(short.0.iter()) {
            *a += b;
        }
        Poly(v).trimmed()
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly(v).trimmed()
    }

    fn scale(&self, c: &BigInt) -> Poly {
        Poly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }

    fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn div_int(&self, c: &BigInt) -> Poly {
        Poly(self.0.iter().map(|x| x / c).collect())
    }

    fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content();
        let p = self.div_int(&c);
        if p.lc().is_negative() {
            p.neg()
        } else {
            p
        }
    }

    fn pseudo_rem(&self, b: &Poly) -> Poly {
        let mut r = self.clone();
        let db = b.degree();
        let lb = b.lc().clone();
        while !r.is_zero() && r.degree() >= db {
            let shift = r.degree() - db;
            let lr = r.lc().clone();
            r = r.scale(&lb).sub(&b.shift_up(shift).scale(&lr));
        }
        r
    }

    /// Primitive gcd over Z[q] with positive leading coefficient.
    fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.primitive();
        let mut b = o.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.degree() == 0 {
                return Poly::constant(BigInt::one());
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    /// Exact quotient; `d` must divide `self` in Z[q].
    fn exact_div(&self, d: &Poly) -> Poly {
        if d.degree() == 0 {
            return self.div_int(&d.0[0]);
        }
        let mut r = self.clone();
        let dd = d.degree();
        let mut quot = vec![BigInt::zero(); self.0.len().saturating_sub(dd).max(1)];
        while !r.is_zero() && r.degree() >= dd {
            let shift = r.degree() - dd;
            let c = r.lc() / d.lc();
            r = r.sub(&d.shift_up(shift).scale(&c));
            quot[shift] = c;
        }
        debug_assert!(r.is_zero(), "inexact polynomial division");
        Poly(quot).trimmed()
    }

    fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if neg {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            match (k, a.is_one()) {
                (0, _) => s.push_str(&a.to_string()),
                (_, true) => {}
                (_, false) => {
                    s.push_str(&a.to_string());
                    s.push('*');
                }
            }
            match k {
                0 => {}
                1 => s.push('q'),
                _ => s.push_str(&format!("q^{k}")),
            }
        }
        s
    }

    fn term_count(&self) -> usize {
        self.0.iter().filter(|c| !c.is_zero()).count()
    }
}

/// Element of Q(q) as a canonical reduced fraction of integer polynomials.
///
/// Canonical form: numerator and denominator coprime, denominator with positive
/// leading coefficient, joint integer content 1, zero stored as `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    fn from_parts(num: Poly, den: Poly) -> Scalar {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Scalar::zero();
        }
        // q-power part
        let vn = num.low_order();
        let vd = den.low_order();
        let m = vn.min(vd);
        let mut n = num.shift_down(vn);
        let mut d = den.shift_down(vd);
        if n.degree() > 0 && d.degree() > 0 {
            let g = n.gcd(&d);
            if g.degree() > 0 {
                n = n.exact_div(&g);
                d = d.exact_div(&g);
            }
        }
        let mut n = n.shift_up(vn - m);
        let mut d = d.shift_up(vd - m);
        let c = n.content().gcd(&d.content());
        if !c.is_one() {
            n = n.div_int(&c);
            d = d.div_int(&c);
        }
        if d.lc().is_negative() {
            n = n.neg();
            d = d.neg();
        }
        Scalar { num: n, den: d }
    }

    /// Builds `num/den` from coefficient lists (lowest degree first).
    pub fn from_coeffs(num: &[i64], den: &[i64]) -> Result<Scalar> {
        let n = Poly(num.iter().map(|&c| BigInt::from(c)).collect()).trimmed();
        let d = Poly(den.iter().map(|&c| BigInt::from(c)).collect()).trimmed();
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::from_parts(n, d))
    }

    pub fn from_int(v: i64) -> Scalar {
        Scalar::from_bigint(BigInt::from(v))
    }

    pub fn from_bigint(v: BigInt) -> Scalar {
        if v.is_zero() {
            return Scalar::zero();
        }
        Scalar { num: Poly::constant(v), den: Poly::constant(BigInt::one()) }
    }

    pub fn numerator_coeffs(&self) -> Vec<BigInt> {
        self.num.0.clone()
    }

    pub fn denominator_coeffs(&self) -> Vec<BigInt> {
        self.den.0.clone()
    }

    /// Re-canonicalises; the identity on values already built by this module.
    pub fn normalize(&self) -> Scalar {
        Scalar::from_parts(self.num.clone(), self.den.clone())
    }

    pub fn checked_div(&self, o: &Scalar) -> Result<Scalar> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::from_parts(self.num.mul(&o.den), self.den.mul(&o.num)))
    }

    /// Value at a rational point.
    pub fn eval_at(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Pole(x.to_string()));
        }
        Ok(self.num.eval(x) / d)
    }

    /// Classical limit `q -> 1`.
    pub fn eval_at_one(&self) -> Result<BigRational> {
        self.eval_at(&BigRational::one())
    }

    fn add_ref(&self, o: &Scalar) -> Scalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Scalar::from_parts(self.num.add(&o.num), self.den.clone());
        }
        Scalar::from_parts(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    fn mul_ref(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        Scalar::from_parts(self.num.mul(&o.num), self.den.mul(&o.den))
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar { num: Poly::zero(), den: Poly::constant(BigInt::one()) }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::from_int(1)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.add_ref(&o)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.add_ref(&-o)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.mul_ref(&o)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    /// Panics on a zero divisor; use [`Scalar::checked_div`] for a `Result`.
    fn div(self, o: Scalar) -> Scalar {
        self.checked_div(&o).expect("division by zero in Q(q)")
    }
}

impl QField for Scalar {
    fn q() -> Self {
        Scalar { num: Poly::monomial(BigInt::one(), 1), den: Poly::constant(BigInt::one()) }
    }

    fn from_i64(v: i64) -> Self {
        Scalar::from_int(v)
    }

    fn qpow(k: i32) -> Self {
        let m = Poly::monomial(BigInt::one(), k.unsigned_abs() as usize);
        let one = Poly::constant(BigInt::one());
        match k.cmp(&0) {
            Ordering::Less => Scalar { num: one, den: m },
            _ => Scalar { num: m, den: one },
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = if self.num.term_count() > 1 { format!("({})", self.num.render()) } else { self.num.render() };
        if self.den.term_count() == 1 && self.den.degree() == 0 && self.den.lc().is_one() {
            return f.write_str(&self.num.render());
        }
        let bare = self.den.term_count() == 1 && (self.den.degree() == 0 || self.den.lc().is_one());
        let den = if bare { self.den.render() } else { format!("({})", self.den.render()) };
        write!(f, "{num}/{den}")
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct PolyParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> PolyParser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Option<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn poly(&mut self) -> Result<Poly> {
        if self.eat(b'(') {
            let p = self.sum()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            return Ok(p);
        }
        self.sum()
    }

    fn sum(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero();
        let mut first = true;
        loop {
            let neg = if self.eat(b'-') {
                true
            } else if self.eat(b'+') || first {
                false
            } else {
                break;
            };
            acc = acc.add(&self.term(neg)?);
            first = false;
            match self.peek() {
                Some(b'+') | Some(b'-') => {}
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self, neg: bool) -> Result<Poly> {
        let coeff = self.int();
        let has_coeff = coeff.is_some();
        let mut c = coeff.unwrap_or_else(BigInt::one);
        if neg {
            c = -c;
        }
        if has_coeff && !self.eat(b'*') && self.peek() != Some(b'q') {
            return Ok(Poly::constant(c));
        }
        if !self.eat(b'q') {
            return Err(self.err("expected integer or 'q'"));
        }
        let mut k = 1usize;
        if self.eat(b'^') {
            let e = self.int().ok_or_else(|| self.err("expected exponent"))?;
            k = e.try_into().map_err(|_| self.err("exponent too large"))?;
        }
        Ok(Poly::monomial(c, k))
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses the rendered form `p/r`, e.g. `(q^2-1)/q` or `3*q^2-1`.
    fn from_str(s: &str) -> Result<Scalar> {
        let mut p = PolyParser { s: s.as_bytes(), pos: 0 };
        let num = p.poly()?;
        let den = if p.eat(b'/') { p.poly()? } else { Poly::constant(BigInt::one()) };
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::from_parts(num, den))
    }
}

/// Q with `q` specialised to the rational number `N/D`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QAt<const N: i64, const D: i64>(pub BigRational);

impl<const N: i64, const D: i64> QAt<N, D> {
    pub fn point() -> BigRational {
        BigRational::new(BigInt::from(N), BigInt::from(D))
    }

    /// Specialisation homomorphism from Q(q).
    pub fn from_scalar(s: &Scalar) -> Result<Self> {
        s.eval_at(&Self::point()).map(QAt)
    }
}

impl<const N: i64, const D: i64> fmt::Display for QAt<N, D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const N: i64, const D: i64> Zero for QAt<N, D> {
    fn zero() -> Self {
        QAt(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const N: i64, const D: i64> One for QAt<N, D> {
    fn one() -> Self {
        QAt(BigRational::one())
    }
}

impl<const N: i64, const D: i64> Neg for QAt<N, D> {
    type Output = Self;
    fn neg(self) -> Self {
        QAt(-self.0)
    }
}

macro_rules! qat_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl<const N: i64, const D: i64> $tr for QAt<N, D> {
            type Output = Self;
            fn $m(self, o: Self) -> Self {
                QAt(self.0 $op o.0)
            }
        }
    };
}
qat_binop!(Add, add, +);
qat_binop!(Sub, sub, -);
qat_binop!(Mul, mul, *);
qat_binop!(Div, div, /);

impl<const N: i64, const D: i64> QField for QAt<N, D> {
    fn q() -> Self {
        QAt(Self::point())
    }
    fn from_i64(v: i64) -> Self {
        QAt(BigRational::from_integer(BigInt::from(v)))
    }
}

/// `q = 7/3`, the specialisation used as an independent numeric route.
pub type Q73 = QAt<7, 3>;

/// `xi = q - q^{-1}` in Q(q).
pub fn xi_const() -> Scalar {
    Scalar::xi()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn xi_is_canonical() {
        assert_eq!(xi_const().to_string(), "(q^2-1)/q");
        assert_eq!(xi_const() * Scalar::q(), s("q^2-1"));
        assert!(xi_const().eval_at_one().unwrap().is_zero());
    }

    #[test]
    fn common_factor_cancels() {
        assert_eq!(s("q^2-1") / s("q^3-q"), Scalar::qpow(-1));
        assert!((Scalar::q() + -Scalar::q()).is_zero());
    }

    #[test]
    fn pole_at_one() {
        assert!(matches!(s("1/(q-1)").eval_at_one(), Err(Error::Pole(_))));
        assert_eq!(Scalar::qpow(-1).eval_at_one().unwrap(), BigRational::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(Scalar::q().checked_div(&Scalar::zero()), Err(Error::DivisionByZero)));
        assert!("q/0".parse::<Scalar>().is_err());
    }

    #[test]
    fn sign_normalisation() {
        let a = Scalar::from_coeffs(&[2, 0, 2], &[0, -4]).unwrap();
        assert_eq!(a.to_string(), "(-q^2-1)/(2*q)");
        assert_eq!(a.denominator_coeffs(), vec![BigInt::zero(), BigInt::from(2)]);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("q^".parse::<Scalar>().is_err());
        assert!("(q+1".parse::<Scalar>().is_err());
        assert!("q q".parse::<Scalar>().is_err());
    }

    #[test]
    fn specialisation_matches_eval() {
        let x = s("(q^3+2*q-5)/(q^2+1)");
        let y = s("(q-3)/q^4");
        let lhs = Q73::from_scalar(&(x.clone() * y.clone() + x.clone())).unwrap();
        let rhs = Q73::from_scalar(&x).unwrap() * Q73::from_scalar(&y).unwrap() + Q73::from_scalar(&x).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(Q73::xi(), Q73::from_scalar(&xi_const()).unwrap());
    }
}
