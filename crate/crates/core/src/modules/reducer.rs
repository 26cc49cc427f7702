use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::foxres::Resolved;
use crate::groupring::{bigint_json, OrientationChar, RingElt};
use crate::presentation::{BsCoords, Family, GroupElement, TorusState};

/// Basis element of a canonical form in the dualizing module.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DualKey {
    /// The generator of an infinite cyclic module.
    Unit,
    /// A word in `Z/m * Z/n` given by its syllables `(is_b, exponent)`.
    Syllables(Vec<(bool, u32)>),
    /// The class of `t^level a_y`-type elements: translation part `num / m^den`
    /// reduced modulo `m^(level+1)`.
    Shifted { level: i64, num: BigInt, den: u32 },
}

/// Integer combination of [`DualKey`]s in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualClass(BTreeMap<DualKey, BigInt>);

impl DualClass {
    pub fn zero() -> Self {
        DualClass::default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DualKey, &BigInt)> {
        self.0.iter()
    }

    fn add_term(&mut self, k: DualKey, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(k.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.0.remove(&k);
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.0
                .iter()
                .map(|(k, c)| json!({"basis": key_label(k), "coeff": bigint_json(c)}))
                .collect(),
        )
    }
}

pub(crate) fn key_label(k: &DualKey) -> String {
    match k {
        DualKey::Unit => "1".into(),
        DualKey::Syllables(s) if s.is_empty() => "1".into(),
        DualKey::Syllables(s) => s
            .iter()
            .map(|&(b, e)| format!("{}^{e}", if b { "b" } else { "a" }))
            .collect::<Vec<_>>()
            .join(" "),
        DualKey::Shifted { level, num, den } => format!("t^{level} a_[{num}/m^{den}]"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReducerKind {
    /// Nothing in degree two: no relators.
    Zero,
    /// The module is infinite cyclic and the class is the twisted augmentation.
    Augmentation,
    /// `Z[Ḡ]` modulo the right ideal pieces `μ_a`, `μ_b` with `Ḡ = Z/m * Z/n`.
    TorusKnot { m: u32, n: u32 },
    /// Direct limit over levels of `Z[Z[1/m] / m^(level+1)]`.
    BaumslagSolitar { m: i64 },
}

/// Canonical forms for `λ q0 ∈ Q̄_0` modulo the image of `Q̄_1`.
#[derive(Clone, Debug)]
pub struct ModuleReducer {
    kind: ReducerKind,
    w: OrientationChar,
}

pub fn dual_module_reducer(res: &Resolved) -> Result<ModuleReducer> {
    let w = res.orientation().clone();
    let trivial = w.is_trivial();
    let family = res
        .family()
        .ok_or_else(|| Error::NoReducer("user-supplied presentations".into()))?;
    let kind = match family {
        Family::Free(_) => ReducerKind::Zero,
        Family::Surface(_) | Family::FreeByZ(1) | Family::Bs(1) => ReducerKind::Augmentation,
        Family::TorusKnot(m, n) if trivial => ReducerKind::TorusKnot { m, n },
        Family::Bs(m) if m >= 2 && trivial => ReducerKind::BaumslagSolitar { m },
        other => {
            return Err(Error::NoReducer(format!(
                "{other} with orientation {:?}",
                w.values()
            )))
        }
    };
    Ok(ModuleReducer { kind, w })
}

impl ModuleReducer {
    pub fn kind(&self) -> &ReducerKind {
        &self.kind
    }

    pub fn reduce(&self, x: &RingElt) -> DualClass {
        let mut out = DualClass::zero();
        match &self.kind {
            ReducerKind::Zero => {}
            ReducerKind::Augmentation => out.add_term(DualKey::Unit, x.augment(&self.w)),
            ReducerKind::TorusKnot { m, n } => {
                for (g, c) in x.terms() {
                    let s = TorusState::of_word(*m, *n, g.word());
                    torus_reduce(*m, *n, s.syllables, c.clone(), &mut out);
                }
            }
            ReducerKind::BaumslagSolitar { m } => return bs_reduce(*m, x),
        }
        out
    }

    pub fn reduce_element(&self, g: &GroupElement) -> DualClass {
        self.reduce(&RingElt::monomial(g.clone(), 1))
    }
}

/// Removes a trailing `a^(m-1)` (or `b^(n-1)`) using `w μ = 0`.
fn torus_reduce(m: u32, n: u32, mut syl: Vec<(bool, u32)>, mut c: BigInt, out: &mut DualClass) {
    while let Some((is_b, e)) = syl.last().copied() {
        if e + 1 != if is_b { n } else { m } {
            break;
        }
        syl.pop();
        for i in 1..e {
            let mut v = syl.clone();
            v.push((is_b, i));
            out.add_term(DualKey::Syllables(v), -c.clone());
        }
        // the i = 0 term continues with the shorter word
        c = -c;
    }
    out.add_term(DualKey::Syllables(syl), c);
}

fn mpow(m: i64, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(m), e as usize)
}

/// Canonical `(num, den)` for `num / m^den` modulo `m^(level+1)`.
fn bs_key(m: i64, num: &BigInt, den: u32, level: i64) -> (BigInt, u32) {
    let min_den = (-(level + 1)).max(0);
    let e = (den as i64).max(min_den);
    let modulus = mpow(m, level + 1 + e);
    let mut x = (num * mpow(m, e - den as i64)).mod_floor(&modulus);
    let mut e = e;
    let mb = BigInt::from(m);
    while e > min_den && x.is_multiple_of(&mb) {
        x /= &mb;
        e -= 1;
    }
    (x, e as u32)
}

/// The `m` classes at `level + 1` summing to the class at `level`.
fn bs_lifts(m: i64, num: &BigInt, den: u32, level: i64) -> Vec<(BigInt, u32)> {
    let e = (den as i64).max(-(level + 1)).max(0);
    let base = num * mpow(m, e - den as i64);
    let step = mpow(m, level + 1 + e);
    (0..m)
        .map(|i| bs_key(m, &(&base + &step * BigInt::from(i)), e as u32, level + 1))
        .collect()
}

fn bs_reduce(m: i64, x: &RingElt) -> DualClass {
    let mut by_level: BTreeMap<i64, BTreeMap<(BigInt, u32), BigInt>> = BTreeMap::new();
    for (g, c) in x.terms() {
        let co = BsCoords::of_word(m, g.word());
        let key = bs_key(m, &co.num, co.den, co.shift);
        *by_level.entry(co.shift).or_default().entry(key).or_default() += c;
    }
    let Some(&top) = by_level.keys().next_back() else {
        return DualClass::zero();
    };
    // push everything to the top level
    let mut current: BTreeMap<(BigInt, u32), BigInt> = BTreeMap::new();
    let low = *by_level.keys().next().expect("nonempty");
    for level in low..=top {
        let mut next: BTreeMap<(BigInt, u32), BigInt> = BTreeMap::new();
        if let Some(terms) = by_level.remove(&level) {
            for (k, c) in terms {
                *current.entry(k).or_default() += c;
            }
        }
        if level == top {
            break;
        }
        for ((num, den), c) in current {
            for l in bs_lifts(m, &num, den, level) {
                *next.entry(l).or_default() += &c;
            }
        }
        current = next;
    }
    current.retain(|_, c| !c.is_zero());
    // pull down blocks with constant coefficients
    let mut out = DualClass::zero();
    let mut level = top;
    while !current.is_empty() {
        let mut blocks: BTreeMap<(BigInt, u32), Vec<((BigInt, u32), BigInt)>> = BTreeMap::new();
        for ((num, den), c) in current {
            let parent = bs_key(m, &num, den, level - 1);
            blocks.entry(parent).or_default().push(((num, den), c));
        }
        let mut pulled = BTreeMap::new();
        for (parent, members) in blocks {
            let constant = members.len() == m as usize
                && members.iter().all(|(_, c)| *c == members[0].1);
            if constant {
                pulled.insert(parent, members[0].1.clone());
            } else {
                for ((num, den), c) in members {
                    out.add_term(DualKey::Shifted { level, num, den }, c);
                }
            }
        }
        current = pulled;
        level -= 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin_family;

    fn setup(f: Family) -> (Resolved, ModuleReducer) {
        let res = Resolved::from_family(&builtin_family(f).unwrap()).unwrap();
        let red = dual_module_reducer(&res).unwrap();
        (res, red)
    }

    fn elt(res: &Resolved, s: &str) -> RingElt {
        RingElt::of_word(&res.presentation().parse_word(s).unwrap(), res.rewriting()).unwrap()
    }

    #[test]
    fn bs_a_cubed_is_a() {
        let (res, red) = setup(Family::Bs(2));
        assert_eq!(red.reduce(&elt(&res, "a^3")), red.reduce(&elt(&res, "a")));
        assert_ne!(red.reduce(&elt(&res, "a^2")), red.reduce(&elt(&res, "a")));
    }

    #[test]
    fn bs_push_relation() {
        // g ≡ g t μ
        let (res, red) = setup(Family::Bs(2));
        let g = elt(&res, "t^-1 a");
        let pushed = elt(&res, "t^-1 a t").add(&elt(&res, "t^-1 a t a"));
        assert_eq!(red.reduce(&g), red.reduce(&pushed));
        assert_eq!(red.reduce(&g).terms().count(), 1);
    }

    #[test]
    fn bs_relations_vanish() {
        let (res, red) = setup(Family::Bs(3));
        for x in 0..2 {
            let rel = res.dual().entry(x, 0);
            for s in ["1", "t", "a t^-2 a", "t^-1 a^-1"] {
                let v = elt(&res, s).mul(rel, res.rewriting()).unwrap();
                assert!(red.reduce(&v).is_zero(), "{s} x={x}");
            }
        }
    }

    #[test]
    fn surface_class_is_augmentation() {
        let (res, red) = setup(Family::Surface(2));
        let c = red.reduce(&elt(&res, "a b"));
        assert_eq!(c.terms().collect::<Vec<_>>(), vec![(&DualKey::Unit, &BigInt::from(1))]);
    }

    #[test]
    fn torus_relations_vanish() {
        let (res, red) = setup(Family::TorusKnot(2, 3));
        for x in 0..2 {
            let rel = res.dual().entry(x, 0);
            for s in ["1", "a b", "b^-1 a", "a^2 b a^-1"] {
                let v = elt(&res, s).mul(rel, res.rewriting()).unwrap();
                assert!(red.reduce(&v).is_zero(), "{s} x={x}");
            }
        }
        // a^2 is central and acts trivially
        assert_eq!(red.reduce(&elt(&res, "b a^2")), red.reduce(&elt(&res, "b")));
    }

    #[test]
    fn no_reducer_for_free_by_z_rank_two() {
        let res = Resolved::from_family(&builtin_family(Family::FreeByZ(2)).unwrap()).unwrap();
        assert!(matches!(dual_module_reducer(&res), Err(Error::NoReducer(_))));
    }
}
