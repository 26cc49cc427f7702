//! The integral group ring with the `w`-twisted involution and augmentation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::presentation::{format_word, GroupElement, RewritingSystem, Word};

/// A homomorphism from the group to `{+1, -1}`, given on generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrientationChar(Vec<i8>);

impl OrientationChar {
    /// Entries must be `+1` or `-1`; anything negative counts as `-1`.
    pub fn new(signs: Vec<i8>) -> Self {
        OrientationChar(signs.into_iter().map(|s| if s < 0 { -1 } else { 1 }).collect())
    }

    pub fn trivial(rank: usize) -> Self {
        OrientationChar(vec![1; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn value(&self, generator: usize) -> i8 {
        self.0[generator]
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&s| s == 1)
    }

    pub fn of_word(&self, w: &Word) -> i8 {
        w.letters()
            .iter()
            .fold(1, |acc, l| acc * self.0[l.generator()])
    }

    pub fn of_element(&self, g: &GroupElement) -> i8 {
        self.of_word(g.word())
    }
}

/// A finitely supported integer combination of group elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElt(BTreeMap<GroupElement, BigInt>);

impl RingElt {
    pub fn zero() -> Self {
        RingElt(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::monomial(GroupElement::identity(), 1)
    }

    pub fn monomial(g: GroupElement, c: impl Into<BigInt>) -> Self {
        let mut r = RingElt::zero();
        r.add_term(g, c.into());
        r
    }

    /// `g - 1`.
    pub fn minus_one(g: GroupElement) -> Self {
        let mut r = RingElt::monomial(g, 1);
        r.add_term(GroupElement::identity(), BigInt::from(-1));
        r
    }

    pub fn of_word(w: &Word, rs: &RewritingSystem) -> Result<Self> {
        Ok(Self::monomial(rs.normal_form(w)?, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.0.iter()
    }

    pub fn coeff(&self, g: &GroupElement) -> BigInt {
        self.0.get(g).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, g: GroupElement, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(g) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &RingElt) -> RingElt {
        let mut r = self.clone();
        for (g, c) in other.terms() {
            r.add_term(g.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &RingElt) -> RingElt {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RingElt {
        RingElt(self.0.iter().map(|(g, c)| (g.clone(), -c)).collect())
    }

    pub fn scale(&self, k: &BigInt) -> RingElt {
        if k.is_zero() {
            return RingElt::zero();
        }
        RingElt(self.0.iter().map(|(g, c)| (g.clone(), c * k)).collect())
    }

    /// Bilinear product with every group product normalized.
    pub fn mul(&self, other: &RingElt, rs: &RewritingSystem) -> Result<RingElt> {
        let mut r = RingElt::zero();
        for (g, c) in self.terms() {
            for (h, d) in other.terms() {
                r.add_term(rs.multiply(g, h)?, c * d);
            }
        }
        Ok(r)
    }

    /// `u * self` for a group element `u`.
    pub fn left_mul(&self, u: &GroupElement, rs: &RewritingSystem) -> Result<RingElt> {
        let mut r = RingElt::zero();
        for (g, c) in self.terms() {
            r.add_term(rs.multiply(u, g)?, c.clone());
        }
        Ok(r)
    }

    /// `self * u` for a group element `u`.
    pub fn right_mul(&self, u: &GroupElement, rs: &RewritingSystem) -> Result<RingElt> {
        let mut r = RingElt::zero();
        for (g, c) in self.terms() {
            r.add_term(rs.multiply(g, u)?, c.clone());
        }
        Ok(r)
    }

    /// Term-by-term `g ↦ w(g) g^-1`.
    pub fn involute(&self, w: &OrientationChar, rs: &RewritingSystem) -> Result<RingElt> {
        let mut r = RingElt::zero();
        for (g, c) in self.terms() {
            let s = w.of_element(g);
            r.add_term(rs.inverse(g)?, c * BigInt::from(s));
        }
        Ok(r)
    }

    /// `Σ coeff(g) w(g)`.
    pub fn augment(&self, w: &OrientationChar) -> BigInt {
        self.terms()
            .map(|(g, c)| c * BigInt::from(w.of_element(g)))
            .sum()
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        Value::Array(
            self.terms()
                .map(|(g, c)| json!({"elt": format_word(g.word(), names), "coeff": bigint_json(c)}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value, parse: impl Fn(&str) -> Result<Word>, rs: &RewritingSystem) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Malformed("ring element must be a list".into()))?;
        let mut r = RingElt::zero();
        for t in arr {
            let elt = t
                .get("elt")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Malformed("term missing `elt`".into()))?;
            let coeff = t
                .get("coeff")
                .ok_or_else(|| Error::Malformed("term missing `coeff`".into()))
                .and_then(bigint_from_json)?;
            r.add_term(rs.normal_form(&parse(elt)?)?, coeff);
        }
        Ok(r)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (g, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let word = format_word(g.word(), names);
            if g.is_identity() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&word);
            } else {
                s.push_str(&format!("{a}*({word})"));
            }
        }
        s
    }
}

pub(crate) fn bigint_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => json!(v),
        None => json!(c.to_string()),
    }
}

pub(crate) fn bigint_from_json(v: &Value) -> Result<BigInt> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    v.as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Malformed(format!("not an integer: {v}")))
}
