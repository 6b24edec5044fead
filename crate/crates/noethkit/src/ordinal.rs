//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An ordinal is a list of `(exponent, coefficient)` terms with strictly
//! decreasing exponents and positive coefficients; zero is the empty list.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("zero has no indecomposability status")]
    Zero,
    #[error("ordinal syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("terms are not in Cantor normal form: {0}")]
    NotNormal(String),
}

/// One `ω^exponent · coefficient` summand.
///
/// The derived order (exponent first, then coefficient) together with the
/// lexicographic order on term lists is exactly the ordinal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub exponent: Ordinal,
    pub coefficient: BigUint,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordinal {
    terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from(1u64)
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal { terms: vec![Term { exponent: e, coefficient: BigUint::one() }] }
    }

    /// `ω^e · c`, or zero when `c = 0`.
    pub fn monomial(e: Ordinal, c: impl Into<BigUint>) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        Ordinal { terms: vec![Term { exponent: e, coefficient: c }] }
    }

    /// Builds an ordinal from terms that must already be in normal form.
    pub fn from_terms(terms: Vec<(Ordinal, BigUint)>) -> Result<Self, OrdinalError> {
        for w in terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(OrdinalError::NotNormal("exponents must strictly decrease".into()));
            }
        }
        if terms.iter().any(|(_, c)| c.is_zero()) {
            return Err(OrdinalError::NotNormal("coefficients must be positive".into()));
        }
        Ok(Ordinal {
            terms: terms.into_iter().map(|(exponent, coefficient)| Term { exponent, coefficient }).collect(),
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    pub fn to_u64(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => t.coefficient.to_u64(),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.classify(), Classification::Limit)
    }

    pub fn classify(&self) -> Classification {
        match self.terms.last() {
            None => Classification::Zero,
            Some(t) if t.exponent.is_zero() => {
                let mut terms = self.terms.clone();
                let last = terms.last_mut().expect("non-empty");
                last.coefficient -= 1u32;
                if last.coefficient.is_zero() {
                    terms.pop();
                }
                Classification::Successor(Ordinal { terms })
            }
            Some(_) => Classification::Limit,
        }
    }

    /// True iff the ordinal is a power `ω^γ`.
    pub fn is_indecomposable(&self) -> Result<bool, OrdinalError> {
        match self.terms.as_slice() {
            [] => Err(OrdinalError::Zero),
            [t] => Ok(t.coefficient.is_one()),
            _ => Ok(false),
        }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// Ordinal (non-commutative) sum.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> =
            self.terms.iter().take_while(|t| t.exponent > lead.exponent).cloned().collect();
        let mut rest = other.terms.iter();
        if let Some(same) = self.terms.iter().find(|t| t.exponent == lead.exponent) {
            let first = rest.next().expect("non-empty");
            terms.push(Term {
                exponent: first.exponent.clone(),
                coefficient: &same.coefficient + &first.coefficient,
            });
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    /// Hessenberg natural sum: termwise merge of the normal forms.
    pub fn natural_sum(&self, other: &Ordinal) -> Ordinal {
        let mut terms: Vec<Term> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let next = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => match a.exponent.cmp(&b.exponent) {
                    Ordering::Greater => {
                        i += 1;
                        a.clone()
                    }
                    Ordering::Less => {
                        j += 1;
                        b.clone()
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        Term { exponent: a.exponent.clone(), coefficient: &a.coefficient + &b.coefficient }
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    a.clone()
                }
                (None, Some(b)) => {
                    j += 1;
                    b.clone()
                }
                (None, None) => unreachable!(),
            };
            terms.push(next);
        }
        Ordinal { terms }
    }

    /// The unique `c` with `prefix + c = self`, when `prefix <= self`.
    pub fn left_sub(&self, prefix: &Ordinal) -> Option<Ordinal> {
        if prefix > self {
            return None;
        }
        for (k, t) in self.terms.iter().enumerate() {
            match prefix.terms.get(k) {
                None => return Some(Ordinal { terms: self.terms[k..].to_vec() }),
                Some(p) if p == t => continue,
                Some(p) => {
                    if p.exponent == t.exponent {
                        let mut terms = vec![Term {
                            exponent: t.exponent.clone(),
                            coefficient: &t.coefficient - &p.coefficient,
                        }];
                        terms.extend(self.terms[k + 1..].iter().cloned());
                        return Some(Ordinal { terms });
                    }
                    return Some(Ordinal { terms: self.terms[k..].to_vec() });
                }
            }
        }
        Some(Ordinal::zero())
    }

    /// `ω^e` for the last term `ω^e · c` of a non-zero ordinal.
    pub fn last_power(&self) -> Option<Ordinal> {
        self.terms.last().map(|t| Ordinal::omega_pow(t.exponent.clone()))
    }

    /// Canonical text without spaces, grouping exponents with braces.
    pub fn to_compact(&self) -> String {
        self.render(true)
    }

    fn render(&self, compact: bool) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let sep = if compact { "+" } else { " + " };
        self.terms
            .iter()
            .map(|t| {
                let c = &t.coefficient;
                match t.exponent.to_u64() {
                    Some(0) => c.to_string(),
                    Some(1) => format!("w*{c}"),
                    Some(n) => format!("w^{n}*{c}"),
                    None => {
                        let e = t.exponent.render(compact);
                        if compact {
                            format!("w^{{{e}}}*{c}")
                        } else {
                            format!("w^({e})*{c}")
                        }
                    }
                }
            })
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::monomial(Ordinal::zero(), n)
    }
}

impl Add for &Ordinal {
    type Output = Ordinal;
    fn add(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::add(self, rhs)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(false))
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let o = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(o)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> OrdinalError {
        OrdinalError::Parse { offset: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            acc = acc.add(&self.term()?);
        }
        Ok(acc)
    }

    fn nat(&mut self) -> Result<BigUint, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a natural number"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.eat(b'^') { self.exponent()? } else { Ordinal::one() };
                let coefficient = if self.eat(b'*') { self.nat()? } else { BigUint::one() };
                Ok(Ordinal::monomial(exponent, coefficient))
            }
            Some(b'(') | Some(b'{') => self.group(),
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::monomial(Ordinal::zero(), self.nat()?)),
            _ => Err(self.err("expected a term")),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'(') | Some(b'{') => self.group(),
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            _ => Ok(Ordinal::monomial(Ordinal::zero(), self.nat()?)),
        }
    }

    fn group(&mut self) -> Result<Ordinal, OrdinalError> {
        let close = match self.peek() {
            Some(b'(') => b')',
            _ => b'}',
        };
        self.pos += 1;
        let inner = self.sum()?;
        if !self.eat(close) {
            return Err(self.err("unclosed group"));
        }
        Ok(inner)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Small(u64),
    Big(String),
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<(&Ordinal, Coefficient)> = self
            .terms
            .iter()
            .map(|t| {
                let c = match t.coefficient.to_u64() {
                    Some(n) => Coefficient::Small(n),
                    None => Coefficient::Big(t.coefficient.to_string()),
                };
                (&t.exponent, c)
            })
            .collect();
        terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<(Ordinal, Coefficient)> = Vec::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.len());
        for (e, c) in raw {
            let c = match c {
                Coefficient::Small(n) => BigUint::from(n),
                Coefficient::Big(s) => s.parse().map_err(D::Error::custom)?,
            };
            terms.push((e, c));
        }
        Ordinal::from_terms(terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    /// Small ordinals with exponents up to `ω + 2`.
    pub fn arb_ordinal() -> impl Strategy<Value = Ordinal> {
        let exps = prop::sample::select(vec![
            Ordinal::zero(),
            Ordinal::from(1),
            Ordinal::from(2),
            Ordinal::from(3),
            Ordinal::omega(),
            Ordinal::omega().succ(),
            Ordinal::omega().succ().succ(),
        ]);
        prop::collection::vec((exps, 1u64..5), 0..4).prop_map(|mut ts| {
            ts.sort_by(|a, b| b.0.cmp(&a.0));
            ts.dedup_by(|a, b| a.0 == b.0);
            Ordinal::from_terms(ts.into_iter().map(|(e, c)| (e, BigUint::from(c))).collect()).unwrap()
        })
    }

    #[test]
    fn examples_cmp() {
        assert_eq!(Ordinal::zero().cmp(&Ordinal::zero()), Ordering::Equal);
        assert_eq!(ord("w").cmp(&ord("w+1")), Ordering::Less);
        assert_eq!(ord("w^2").cmp(&ord("w*5+3")), Ordering::Greater);
    }

    #[test]
    fn cmp_matches_table_below_omega_cubed() {
        // ω^2·a + ω·b + c ordered by the tuple (a, b, c).
        let mut table = Vec::new();
        for a in 0..3u64 {
            for b in 0..4u64 {
                for c in 0..4u64 {
                    let o = Ordinal::monomial(Ordinal::from(2), a)
                        .add(&Ordinal::monomial(Ordinal::one(), b))
                        .add(&Ordinal::from(c));
                    table.push(((a, b, c), o));
                }
            }
        }
        for (ka, a) in &table {
            for (kb, b) in &table {
                assert_eq!(a.cmp(b), ka.cmp(kb), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn examples_add() {
        assert_eq!(Ordinal::one().add(&Ordinal::omega()), Ordinal::omega());
        assert_eq!(Ordinal::omega().add(&Ordinal::one()), ord("w+1"));
        assert_eq!(ord("w*2+3").add(&ord("w+1")), ord("w*3+1"));
    }

    #[test]
    fn add_matches_concatenation_below_omega_squared() {
        // (b, c) stands for ω·b + c; concatenating order types absorbs c1 when b2 > 0.
        let concat = |(b1, c1): (u64, u64), (b2, c2): (u64, u64)| {
            if b2 > 0 {
                (b1 + b2, c2)
            } else {
                (b1, c1 + c2)
            }
        };
        let of = |(b, c): (u64, u64)| Ordinal::monomial(Ordinal::one(), b).add(&Ordinal::from(c));
        for x in [(0, 0), (0, 3), (1, 0), (2, 3), (1, 1)] {
            for y in [(0, 0), (0, 2), (1, 1), (3, 0)] {
                assert_eq!(of(x).add(&of(y)), of(concat(x, y)));
            }
        }
    }

    #[test]
    fn examples_classify() {
        assert_eq!(Ordinal::zero().classify(), Classification::Zero);
        assert_eq!(ord("w+1").classify(), Classification::Successor(Ordinal::omega()));
        assert_eq!(ord("w^2*3").classify(), Classification::Limit);
    }

    #[test]
    fn examples_indecomposable() {
        assert_eq!(Ordinal::one().is_indecomposable(), Ok(true));
        assert_eq!(ord("w*2").is_indecomposable(), Ok(false));
        assert_eq!(ord("w^w").is_indecomposable(), Ok(true));
        assert_eq!(Ordinal::zero().is_indecomposable(), Err(OrdinalError::Zero));
    }

    #[test]
    fn omega_to_omega_has_no_proper_split() {
        let beta = ord("w^w");
        for k in 0..5u64 {
            for c in 1..4u64 {
                for tail in 0..3u64 {
                    let gamma = Ordinal::monomial(Ordinal::from(k), c).add(&Ordinal::from(tail));
                    for delta_k in 0..5u64 {
                        let delta = Ordinal::monomial(Ordinal::from(delta_k), 2u64);
                        assert_ne!(gamma.add(&delta), beta);
                    }
                }
            }
        }
    }

    #[test]
    fn examples_natural_sum() {
        assert_eq!(Ordinal::zero().natural_sum(&Ordinal::omega()), Ordinal::omega());
        assert_eq!(ord("w+1").natural_sum(&Ordinal::omega()), ord("w*2+1"));
    }

    #[test]
    fn natural_sum_matches_merge_and_sort() {
        let merge = |a: &Ordinal, b: &Ordinal| {
            let mut all: Vec<(Ordinal, BigUint)> = a
                .terms()
                .iter()
                .chain(b.terms())
                .map(|t| (t.exponent.clone(), t.coefficient.clone()))
                .collect();
            all.sort_by(|x, y| y.0.cmp(&x.0));
            let mut out: Vec<(Ordinal, BigUint)> = Vec::new();
            for (e, c) in all {
                match out.last_mut() {
                    Some(last) if last.0 == e => last.1 += c,
                    _ => out.push((e, c)),
                }
            }
            Ordinal::from_terms(out).unwrap()
        };
        for a in ["0", "w+1", "w^2*3+w+2", "w^w+5"] {
            for b in ["w", "w^2+7", "3", "w^(w+1)*2"] {
                assert_eq!(ord(a).natural_sum(&ord(b)), merge(&ord(a), &ord(b)));
            }
        }
    }

    #[test]
    fn text_form() {
        assert_eq!(ord("w^2*3 + w*1 + 2").to_string(), "w^2*3 + w*1 + 2");
        assert_eq!(ord("w^2*3+w+2").to_string(), "w^2*3 + w*1 + 2");
        assert_eq!(Ordinal::zero().to_string(), "0");
        assert_eq!(ord("w^(w+1)*2").to_compact(), "w^{w*1+1}*2");
        assert_eq!(ord("1 + w"), Ordinal::omega());
        assert!("w^".parse::<Ordinal>().is_err());
        assert!("w+)".parse::<Ordinal>().is_err());
    }

    #[test]
    fn left_sub_examples() {
        assert_eq!(ord("w*2+3").left_sub(&ord("w+5")), Some(ord("w+3")));
        assert_eq!(ord("w").left_sub(&ord("7")), Some(ord("w")));
        assert_eq!(ord("w+1").left_sub(&ord("1")), Some(ord("w+1")));
        assert_eq!(ord("3").left_sub(&ord("w")), None);
        assert_eq!(ord("w^2+w").last_power(), Some(ord("w")));
    }

    #[test]
    fn json_is_nested_term_arrays() {
        let o = ord("w^2*3 + 2");
        let j = serde_json::to_string(&o).unwrap();
        assert_eq!(j, "[[[[[],2]],3],[[],2]]");
        assert_eq!(serde_json::from_str::<Ordinal>(&j).unwrap(), o);
        assert!(serde_json::from_str::<Ordinal>("[[[],1],[[],2]]").is_err());
    }

    proptest! {
        #[test]
        fn total_order(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
            prop_assert_eq!(a.cmp(&b) == Ordering::Equal, a == b);
        }

        #[test]
        fn add_laws(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
            prop_assert_eq!(Ordinal::zero().add(&a), a.clone());
            prop_assert_eq!(a.succ().classify(), Classification::Successor(a.clone()));
            prop_assert!(a.add(&b) >= b);
        }

        #[test]
        fn natural_sum_laws(a in arb_ordinal(), b in arb_ordinal(), c in arb_ordinal()) {
            prop_assert_eq!(a.natural_sum(&b), b.natural_sum(&a));
            prop_assert_eq!(a.natural_sum(&b).natural_sum(&c), a.natural_sum(&b.natural_sum(&c)));
            prop_assert!(a.natural_sum(&b) >= a.add(&b));
            prop_assert!(a.natural_sum(&b.succ()) > a.natural_sum(&b));
        }

        #[test]
        fn left_sub_inverts_add(a in arb_ordinal(), b in arb_ordinal()) {
            prop_assert_eq!(a.add(&b).left_sub(&a), Some(b.clone()));
        }

        #[test]
        fn text_and_json_round_trip(a in arb_ordinal()) {
            let printed = a.to_string();
            prop_assert_eq!(printed.parse::<Ordinal>().unwrap(), a.clone());
            prop_assert_eq!(printed.parse::<Ordinal>().unwrap().to_string(), printed);
            prop_assert_eq!(a.to_compact().parse::<Ordinal>().unwrap(), a.clone());
            let j = serde_json::to_string(&a).unwrap();
            prop_assert_eq!(serde_json::from_str::<Ordinal>(&j).unwrap(), a);
        }
    }
}
