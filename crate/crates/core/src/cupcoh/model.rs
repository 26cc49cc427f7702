use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::CoinvClass;
use crate::error::{Error, Result};
use crate::foxres::Resolved;
use crate::groupring::{bigint_json, OrientationChar, RingElt};
use crate::modules::reducer::key_label;
use crate::modules::{
    dual_module_reducer, AbPresentation, ColumnEchelon, DualKey, IntMatrix, ModuleReducer,
    ReducerKind, SparseVec,
};
use crate::presentation::{BsCoords, GroupElement, TorusState};

/// Which finite description of `Z^w ⊗_G (D̄ ⊗ D̄)` is used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// No relators: the module is zero.
    Zero,
    /// `D̄ ≅ Z` through `ε_w`; the coinvariants are `Z / modulus`.
    Augmentation { modulus: BigInt },
    /// Exact: `Z[Z/m * Z/n]` modulo `μ_a`, `μ_b` on both sides, with the
    /// words not starting or ending in `a^(m-1)`, `b^(n-1)` as a basis.
    TorusKnot { m: u32, n: u32 },
    /// Exact on the left factor; the right factor's relations are
    /// instantiated over a window of group elements.
    BaumslagSolitar { m: i64 },
}

#[derive(Debug)]
struct Window {
    index: BTreeMap<DualKey, usize>,
    keys: Vec<DualKey>,
    columns: Vec<SparseVec>,
    echelon: ColumnEchelon,
}

/// A finite model of the coinvariants of `D̄ ⊗ D̄` under the diagonal action,
/// elements being represented by `[q_s ⊗ g q_s']`.
#[derive(Debug)]
pub struct CoinvariantsModel {
    kind: ModelKind,
    truncation: u32,
    reducer: Option<ModuleReducer>,
    w: OrientationChar,
    window: OnceLock<Window>,
}

pub fn coinvariants_model(res: &Resolved, truncation: u32) -> Result<CoinvariantsModel> {
    if truncation == 0 {
        return Err(Error::TruncationTooSmall("truncation 0 has no generators".into()));
    }
    if res.relator_count() > 1 {
        return Err(Error::Unsupported(
            "coinvariant models need at most one relator".into(),
        ));
    }
    let reducer = dual_module_reducer(res)?;
    let w = res.orientation().clone();
    let kind = match reducer.kind() {
        ReducerKind::Zero => ModelKind::Zero,
        ReducerKind::Augmentation => {
            let mut modulus = BigInt::zero();
            for x in 0..res.rank() {
                let fox = res.resolution().fox_entry(0, x);
                modulus = modulus.gcd(&fox.augment(&OrientationChar::trivial(res.rank())));
                modulus = modulus.gcd(&fox.augment(&w));
            }
            ModelKind::Augmentation { modulus }
        }
        ReducerKind::TorusKnot { m, n } => ModelKind::TorusKnot { m: *m, n: *n },
        ReducerKind::BaumslagSolitar { m } => ModelKind::BaumslagSolitar { m: *m },
    };
    Ok(CoinvariantsModel {
        kind,
        truncation,
        reducer: Some(reducer),
        w,
        window: OnceLock::new(),
    })
}

/// Removes full syllables at either end using `μ v = v μ = 0`.
fn torus_two_sided(m: u32, n: u32, syl: Vec<(bool, u32)>, c: BigInt, out: &mut BTreeMap<DualKey, BigInt>) {
    let full = |&(b, e): &(bool, u32)| e + 1 == if b { n } else { m };
    let mut work = vec![(syl, c)];
    while let Some((syl, c)) = work.pop() {
        if let Some(&(b, e)) = syl.last().filter(|s| full(s)) {
            let rest = &syl[..syl.len() - 1];
            for i in 0..e {
                let mut v = rest.to_vec();
                if i > 0 {
                    v.push((b, i));
                }
                work.push((v, -c.clone()));
            }
        } else if let Some(&(b, e)) = syl.first().filter(|s| full(s)) {
            let rest = &syl[1..];
            for i in 0..e {
                let mut v = Vec::with_capacity(syl.len());
                if i > 0 {
                    v.push((b, i));
                }
                v.extend_from_slice(rest);
                work.push((v, -c.clone()));
            }
        } else {
            let k = DualKey::Syllables(syl);
            let e = out.entry(k.clone()).or_default();
            *e += c;
            if e.is_zero() {
                out.remove(&k);
            }
        }
    }
}

fn class_json(terms: &BTreeMap<DualKey, BigInt>) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|(k, c)| json!({"basis": key_label(k), "coeff": bigint_json(c)}))
            .collect(),
    )
}

/// Syllable words with at most `len` syllables.
fn syllable_words(m: u32, n: u32, len: u32) -> Vec<Vec<(bool, u32)>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<(bool, u32)>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for b in [false, true] {
                if w.last().is_some_and(|&(lb, _)| lb == b) {
                    continue;
                }
                for e in 1..if b { n } else { m } {
                    let mut v = w.clone();
                    v.push((b, e));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

impl CoinvariantsModel {
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, ModelKind::BaumslagSolitar { .. })
    }

    fn part(c: &CoinvClass) -> RingElt {
        c.part(0, 0).cloned().unwrap_or_else(RingElt::zero)
    }

    /// Canonical form on the exactly reduced side.
    pub fn reduce(&self, c: &CoinvClass) -> BTreeMap<DualKey, BigInt> {
        let x = Self::part(c);
        let mut out = BTreeMap::new();
        match &self.kind {
            ModelKind::Zero => {}
            ModelKind::Augmentation { modulus } => {
                let mut v = x.augment(&self.w);
                if !modulus.is_zero() {
                    v = v.mod_floor(&modulus.abs());
                }
                if !v.is_zero() {
                    out.insert(DualKey::Unit, v);
                }
            }
            ModelKind::TorusKnot { m, n } => {
                for (g, c) in x.terms() {
                    let s = TorusState::of_word(*m, *n, g.word());
                    torus_two_sided(*m, *n, s.syllables, c.clone(), &mut out);
                }
            }
            ModelKind::BaumslagSolitar { .. } => {
                let reducer = self.reducer.as_ref().expect("reducer");
                for (k, c) in reducer.reduce(&x).terms() {
                    out.insert(k.clone(), c.clone());
                }
            }
        }
        out
    }

    pub fn class_to_json(&self, c: &CoinvClass) -> Value {
        class_json(&self.reduce(c))
    }

    /// Group elements `k` whose relations `fox_x · k` are instantiated.
    fn window_elements(&self, res: &Resolved, m: i64) -> Result<Vec<GroupElement>> {
        let b = self.truncation as i64;
        let mut out = Vec::new();
        for shift in -b..=b {
            for den in 0..=self.truncation {
                let top = num_traits::pow(BigInt::from(m), (den + self.truncation + 1) as usize);
                let mut num = BigInt::zero();
                while num < top {
                    let co = BsCoords::from_parts(m, num.clone(), den, shift);
                    if co.den == den {
                        out.push(res.rewriting().normal_form(&co.to_word())?);
                    }
                    num += 1;
                }
            }
        }
        Ok(out)
    }

    fn window(&self, res: &Resolved) -> Result<&Window> {
        if let Some(w) = self.window.get() {
            return Ok(w);
        }
        let ModelKind::BaumslagSolitar { m } = self.kind else {
            return Err(Error::Inconsistent("window requested for an exact model".into()));
        };
        let reducer = self.reducer.as_ref().expect("reducer");
        let elements = self.window_elements(res, m)?;
        let rs = res.rewriting();
        let rels: Vec<Vec<(DualKey, BigInt)>> = (0..res.rank())
            .flat_map(|x| elements.iter().map(move |k| (x, k)))
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(x, k)| {
                let v = res.resolution().fox_entry(0, x).right_mul(k, rs)?;
                Ok(reducer.reduce(&v).terms().map(|(k, c)| (k.clone(), c.clone())).collect())
            })
            .collect::<Result<_>>()?;
        let mut index = BTreeMap::new();
        for rel in &rels {
            for (k, _) in rel {
                let next = index.len();
                index.entry(k.clone()).or_insert(next);
            }
        }
        let columns: Vec<SparseVec> = rels
            .into_iter()
            .map(|rel| rel.into_iter().map(|(k, c)| (index[&k], c)).collect())
            .collect();
        let mut keys = vec![DualKey::Unit; index.len()];
        for (k, &i) in &index {
            keys[i] = k.clone();
        }
        let echelon = ColumnEchelon::new(columns.clone());
        Ok(self.window.get_or_init(|| Window { index, keys, columns, echelon }))
    }

    /// Whether the class vanishes. Truncated models fail with
    /// [`Error::TruncationEscape`] when the window cannot decide.
    pub fn is_zero(&self, res: &Resolved, c: &CoinvClass) -> Result<bool> {
        let reduced = self.reduce(c);
        if reduced.is_empty() {
            return Ok(true);
        }
        if self.is_exact() {
            return Ok(false);
        }
        let window = self.window(res)?;
        let mut v = SparseVec::new();
        for (k, c) in &reduced {
            let Some(&i) = window.index.get(k) else {
                return Err(Error::TruncationEscape(format!(
                    "{} is untouched by the relations at truncation {}",
                    key_label(k),
                    self.truncation
                )));
            };
            v.insert(i, c.clone());
        }
        Ok(window.echelon.contains(&v))
    }

    /// Finite presentation of the model at the truncation.
    pub fn presentation(&self, res: &Resolved) -> Result<AbPresentation> {
        match &self.kind {
            ModelKind::Zero => AbPresentation::new(Vec::new(), IntMatrix::zeros(0, 0)),
            ModelKind::Augmentation { modulus } => {
                let mut rel = IntMatrix::zeros(0, 1);
                if !modulus.is_zero() {
                    rel.push_row(vec![modulus.abs()]);
                }
                AbPresentation::new(vec!["[q ⊗ q]".into()], rel)
            }
            ModelKind::TorusKnot { m, n } => {
                let full = |&(b, e): &(bool, u32)| e + 1 == if b { *n } else { *m };
                let labels: Vec<String> = syllable_words(*m, *n, self.truncation)
                    .into_iter()
                    .filter(|s| !s.first().is_some_and(full) && !s.last().is_some_and(full))
                    .map(|s| key_label(&DualKey::Syllables(s)))
                    .collect();
                let k = labels.len();
                AbPresentation::new(labels, IntMatrix::zeros(0, k))
            }
            ModelKind::BaumslagSolitar { m } => {
                let gens: BTreeSet<DualKey> = bs_spanning_elements(res, *m, self.truncation)?
                    .iter()
                    .flat_map(|g| self.reduce(&CoinvClass::single(0, 0, g.clone())).into_keys())
                    .collect();
                let pos: BTreeMap<&DualKey, usize> = gens.iter().enumerate().map(|(i, k)| (k, i)).collect();
                let window = self.window(res)?;
                let mut rel = IntMatrix::zeros(0, gens.len());
                let keys = &window.keys;
                let mut seen = BTreeSet::new();
                for col in &window.columns {
                    if col.is_empty() || !col.keys().all(|i| pos.contains_key(&keys[*i])) {
                        continue;
                    }
                    let mut row = vec![BigInt::zero(); gens.len()];
                    for (i, c) in col {
                        row[pos[&keys[*i]]] = c.clone();
                    }
                    if seen.insert(row.clone()) {
                        rel.push_row(row);
                    }
                }
                AbPresentation::new(gens.iter().map(key_label).collect(), rel)
            }
        }
    }
}

/// `(x, n)` with `|n| <= level`, `x = k / m^level`, `0 <= x < m^(n+1)`.
pub(crate) fn bs_spanning_elements(res: &Resolved, m: i64, level: u32) -> Result<Vec<GroupElement>> {
    let l = level as i64;
    let mut out = Vec::new();
    for n in -l..=l {
        let count = num_traits::pow(BigInt::from(m), (n + 1 + l) as usize);
        let mut k = BigInt::zero();
        while k < count {
            let co = BsCoords::from_parts(m, k.clone(), level, n);
            out.push(res.rewriting().normal_form(&co.to_word())?);
            k += 1;
        }
    }
    Ok(out)
}

pub(crate) fn torus_spanning_elements(res: &Resolved, m: u32, n: u32, level: u32) -> Result<Vec<GroupElement>> {
    let full = |&(b, e): &(bool, u32)| e + 1 == if b { n } else { m };
    syllable_words(m, n, level)
        .into_iter()
        .filter(|s| !s.last().is_some_and(full))
        .map(|syllables| {
            let st = TorusState { syllables, central: 0 };
            res.rewriting().normal_form(&st.to_word(m))
        })
        .collect()
}
