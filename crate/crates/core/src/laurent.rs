//! Exact Laurent polynomials in one variable `q`.
//!
//! A [`LaurentPoly`] is a finite map from integer exponents to nonzero
//! coefficients. Graded dimensions, Grothendieck-group coordinates and form
//! values all live here. The textual form lists terms by decreasing exponent,
//! `3*q^2 + 1 - q^-1`, and is stable enough to be used in golden files.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::scalar::Coeff;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentPoly<C> {
    terms: BTreeMap<i32, C>,
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, C::one())
    }

    /// The variable `q`.
    pub fn q() -> Self {
        Self::monomial(1, C::one())
    }

    /// `q^e`.
    pub fn q_pow(e: i32) -> Self {
        Self::monomial(e, C::one())
    }

    pub fn monomial(exp: i32, coeff: C) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(C::from_int(c))
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed and zero results dropped.
    pub fn from_terms<I: IntoIterator<Item = (i32, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, &c);
        }
        p
    }

    /// `q + q^-1`, the graded rank of the Frobenius algebra.
    pub fn q_plus_q_inv() -> Self {
        Self::from_terms([(1, C::one()), (-1, C::one())])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, exp: i32) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &C)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, exp: i32, c: &C) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(C::zero);
        *entry = entry.add_ck(c);
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, x)| (*e, x.mul_ck(c))).collect() }
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// The involution `q -> q^-1`.
    pub fn bar(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    pub fn is_bar_invariant(&self) -> bool {
        self.terms.iter().all(|(e, c)| self.terms.get(&-e) == Some(c))
    }

    /// Value at `q = 1`.
    pub fn eval_one(&self) -> C {
        self.terms.values().fold(C::zero(), |acc, c| acc.add_ck(c))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// True if every coefficient is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Membership in `q^-1 Z[q^-1]`.
    pub fn in_q_inv_z_q_inv(&self) -> bool {
        self.max_exp().is_none_or(|e| e <= -1)
    }

    /// Membership in `1 + q^-1 Z[q^-1]`.
    pub fn in_one_plus_q_inv_z_q_inv(&self) -> bool {
        (self - &Self::one()).in_q_inv_z_q_inv()
    }

    /// `±q^s` for some `s`: the units of `Z[q, q^-1]`.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().is_some_and(|c| c.is_unit())
    }

    /// Exact division; `None` when `divisor` does not divide `self` in
    /// `Z[q, q^-1]` or `divisor` is zero.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (db_hi, db_c) = divisor.terms.iter().next_back().map(|(e, c)| (*e, c.clone()))?;
        let db_lo = divisor.min_exp()?;
        let span = db_hi - db_lo;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&hi, c)) = rem.terms.iter().next_back() {
            let lo = rem.min_exp().unwrap();
            if hi - lo < span {
                return None;
            }
            let (qc, r) = c.div_rem(&db_c);
            if !r.is_zero() {
                return None;
            }
            let t = Self::monomial(hi - db_hi, qc);
            rem = &rem - &(&t * divisor);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// The quantum integer `[j] = (q^j - q^-j)/(q - q^-1)`, as the explicit sum
    /// `q^(j-1) + q^(j-3) + ... + q^(1-j)`. `[-j] = -[j]`.
    pub fn quantum_integer(j: i64) -> Self {
        let n = j.unsigned_abs() as i32;
        let p = Self::from_terms((0..n).map(|t| (n - 1 - 2 * t, C::one())));
        if j < 0 {
            -p
        } else {
            p
        }
    }

    /// `[j]! = [1][2]...[j]`, with `[0]! = 1`.
    pub fn quantum_factorial(j: u32) -> Self {
        (1..=j as i64).fold(Self::one(), |acc, t| &acc * &Self::quantum_integer(t))
    }

    /// Converts coefficients to another integer type.
    pub fn convert<D: Coeff>(&self) -> LaurentPoly<D> {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let d: D = c.to_string().parse().ok().expect("coefficient does not fit target type");
                    (*e, d)
                })
                .collect(),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<C: Coeff> $tr<LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coeff> $tr<&LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$method(rhs)
            }
        }
        impl<C: Coeff> $tr<LaurentPoly<C>> for &LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $method(self, rhs: LaurentPoly<C>) -> LaurentPoly<C> {
                self.$method(&rhs)
            }
        }
    };
}

impl<C: Coeff> Add<&LaurentPoly<C>> for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coeff> Sub<&LaurentPoly<C>> for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coeff> Mul<&LaurentPoly<C>> for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, &ca.mul_ck(cb));
            }
        }
        out
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<C: Coeff> AddAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &LaurentPoly<C>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c);
        }
    }
}

impl<C: Coeff> SubAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &LaurentPoly<C>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, &-c.clone());
        }
    }
}

impl<C: Coeff> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        LaurentPoly { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl<C: Coeff> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        -self.clone()
    }
}

impl<C: Coeff> std::iter::Sum for LaurentPoly<C> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| &acc + &x)
    }
}

impl<C: Coeff> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let var = match *e {
                0 => None,
                1 => Some("q".to_string()),
                e => Some(format!("q^{e}")),
            };
            match var {
                None => write!(f, "{abs}")?,
                Some(v) if abs.is_one() => write!(f, "{v}")?,
                Some(v) => write!(f, "{abs}*{v}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl<C: Coeff> FromStr for LaurentPoly<C> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        // Split into signed terms; a '-' directly after '^' belongs to the exponent.
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && prev != Some('^') {
                if !cur.is_empty() {
                    pieces.push((neg, std::mem::take(&mut cur)));
                } else if prev.is_some() {
                    return Err(Error::Parse(format!("dangling sign in {s:?}")));
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
            prev = Some(ch);
        }
        if cur.is_empty() {
            return Err(Error::Parse(format!("trailing sign in {s:?}")));
        }
        pieces.push((neg, cur));

        let bad = |t: &str| Error::Parse(format!("bad term {t:?}"));
        let mut out = Self::zero();
        for (neg, term) in pieces {
            let (coeff_str, var_str) = match term.find('q') {
                None => (term.as_str(), None),
                Some(pos) => {
                    let head = &term[..pos];
                    let head = head.strip_suffix('*').unwrap_or(head);
                    (head, Some(&term[pos + 1..]))
                }
            };
            let mut c: C = if coeff_str.is_empty() {
                C::one()
            } else {
                coeff_str.parse().map_err(|_| bad(&term))?
            };
            let e: i32 = match var_str {
                None => 0,
                Some("") => 1,
                Some(rest) => rest.strip_prefix('^').ok_or_else(|| bad(&term))?.parse().map_err(|_| bad(&term))?,
            };
            if var_str.is_none() && coeff_str.is_empty() {
                return Err(bad(&term));
            }
            if neg {
                c = -c;
            }
            out.add_term(e, &c);
        }
        Ok(out)
    }
}

impl<C: Coeff> Serialize for LaurentPoly<C> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            let key = e.to_string();
            match c.to_i64() {
                Some(v) => map.serialize_entry(&key, &v)?,
                None => map.serialize_entry(&key, &c.to_string())?,
            }
        }
        map.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Str(String),
}

impl<'de, C: Coeff> Deserialize<'de> for LaurentPoly<C> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PolyVisitor<C>(std::marker::PhantomData<C>);

        impl<'de, C: Coeff> Visitor<'de> for PolyVisitor<C> {
            type Value = LaurentPoly<C>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map from exponent strings to integer coefficients")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut out = LaurentPoly::zero();
                while let Some((k, v)) = access.next_entry::<String, CoeffRepr>()? {
                    let e: i32 = k.parse().map_err(de::Error::custom)?;
                    let c: C = match v {
                        CoeffRepr::Int(i) => C::from_int(i),
                        CoeffRepr::Str(s) => s.parse().map_err(|_| de::Error::custom("bad coefficient"))?,
                    };
                    out.add_term(e, &c);
                }
                Ok(out)
            }
        }

        deserializer.deserialize_map(PolyVisitor(std::marker::PhantomData))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type P = LaurentPoly<BigInt>;

    fn p(s: &str) -> P {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let s = P::q_plus_q_inv();
        assert_eq!(&s * &s, p("q^2 + 2 + q^-2"));
        assert_eq!(&s + &P::zero(), s);
        assert_eq!(&(P::q() - P::one()) * &(P::q() + P::one()), p("q^2 - 1"));
    }

    #[test]
    fn bar_examples() {
        assert_eq!(p("q^2 + 1").bar(), p("q^-2 + 1"));
        assert_eq!(P::q_plus_q_inv().bar(), P::q_plus_q_inv());
    }

    #[test]
    fn quantum_numbers() {
        assert_eq!(P::quantum_integer(2), P::q_plus_q_inv());
        assert_eq!(P::quantum_integer(1), P::one());
        assert_eq!(P::quantum_integer(0), P::zero());
        assert_eq!(P::quantum_factorial(0), P::one());
        // [3]! = (q^2 + 1 + q^-2)(q + q^-1), expanded by hand.
        assert_eq!(P::quantum_factorial(3), p("q^3 + 2*q + 2*q^-1 + q^-3"));
        assert_eq!(P::quantum_integer(-2), -P::q_plus_q_inv());
    }

    #[test]
    fn quantum_integer_clears_denominator() {
        let d = P::q() - P::q_pow(-1);
        for j in 0..=12 {
            assert_eq!(&P::quantum_integer(j) * &d, P::q_pow(j as i32) - P::q_pow(-(j as i32)));
            assert_eq!(P::quantum_integer(j).eval_one(), BigInt::from(j));
        }
    }

    #[test]
    fn display_format() {
        let x = P::from_terms([(2, BigInt::from(3)), (0, BigInt::from(1)), (-1, BigInt::from(-1))]);
        assert_eq!(x.to_string(), "3*q^2 + 1 - q^-1");
        assert_eq!(P::zero().to_string(), "0");
        assert_eq!(p("-q - 2*q^-3").to_string(), "-q - 2*q^-3");
        assert!("q +".parse::<P>().is_err());
        assert!("".parse::<P>().is_err());
    }

    #[test]
    fn json_form() {
        let x = p("3*q^2 - q^-1");
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"-1":-1,"2":3}"#);
        let back: P = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn exact_division() {
        let s = P::q_plus_q_inv();
        let a = &s.pow(3) * &p("q^5 - 2");
        assert_eq!(a.div_exact(&s), Some(&s.pow(2) * &p("q^5 - 2")));
        assert_eq!(p("q + 1").div_exact(&p("2")), None);
        assert_eq!(p("q^2 + 1").div_exact(&s), Some(p("q")));
        assert_eq!(p("q^2 + 2").div_exact(&s), None);
        assert_eq!(P::zero().div_exact(&s), Some(P::zero()));
    }

    #[test]
    fn small_coefficient_types_agree() {
        let a: LaurentPoly<i64> = "q^2 - 3 + q^-1".parse().unwrap();
        let b: LaurentPoly<i64> = "2*q - q^-4".parse().unwrap();
        let big = &a.convert::<BigInt>() * &b.convert::<BigInt>();
        assert_eq!((&a * &b).convert::<BigInt>(), big);
    }

    fn arb_poly() -> impl Strategy<Value = P> {
        proptest::collection::vec((-6i32..6, -20i64..20), 0..6)
            .prop_map(|ts| P::from_terms(ts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
    }

    proptest! {
        #[test]
        fn bar_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
            prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
            prop_assert_eq!(a.bar().bar(), a.clone());
        }

        #[test]
        fn eval_one_is_ring_hom(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!((&a * &b).eval_one(), a.eval_one() * b.eval_one());
            prop_assert_eq!((&a + &b).eval_one(), a.eval_one() + b.eval_one());
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            prop_assert_eq!(a.to_string().parse::<P>().unwrap(), a);
        }

        #[test]
        fn no_zero_coefficients_stored(a in arb_poly(), b in arb_poly()) {
            let c = &(&a * &b) - &(&b * &a);
            prop_assert!(c.is_zero());
            prop_assert!((&a * &b).terms().all(|(_, c)| !num_traits::Zero::is_zero(c)));
        }
    }
}
