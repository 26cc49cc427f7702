//! Chain-level cup products with the dualizing module, the swap involution on
//! coinvariants, the mod-2 invariant of a mapping torus and the orbits of
//! k-invariants for surface groups.

mod delta;
mod model;
mod orbits;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

pub use delta::{delta_invariant, DeltaReport};
pub use model::{coinvariants_model, CoinvariantsModel, ModelKind};
pub use orbits::{apply_translation, pd2_orbit_reps, OrbitReport};

use crate::diagonal::{raw_terms_json, verify_j2, PBasis, QBasis, TensorElt};
use crate::error::{Error, Result};
use crate::foxres::Resolved;
use crate::groupring::RingElt;
use crate::presentation::{format_word, GroupElement};

/// `ξ: P2 → D̄` by its values: `ξ(p_r) = Σ_s values[r][s] q_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    values: Vec<Vec<RingElt>>,
}

impl Cocycle {
    pub fn zero(res: &Resolved) -> Self {
        let n = res.relator_count();
        Cocycle {
            values: vec![vec![RingElt::zero(); n]; n],
        }
    }

    pub fn new(res: &Resolved, values: Vec<Vec<RingElt>>) -> Result<Self> {
        let n = res.relator_count();
        if values.len() != n || values.iter().any(|v| v.len() != n) {
            return Err(Error::WrongContext(format!("cocycle needs {n} × {n} values")));
        }
        Ok(Cocycle { values })
    }

    /// `ξ(p_r) = g q_s`, zero on the other relators.
    pub fn single(res: &Resolved, r: usize, s: usize, g: GroupElement) -> Result<Self> {
        let mut c = Cocycle::zero(res);
        if r >= c.values.len() || s >= c.values.len() {
            return Err(Error::WrongContext(format!("no relator {}", r.max(s))));
        }
        c.values[r][s] = RingElt::monomial(g, 1);
        Ok(c)
    }

    pub fn value(&self, r: usize, s: usize) -> &RingElt {
        &self.values[r][s]
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect())
                .collect(),
        }
    }

    pub fn to_json(&self, res: &Resolved) -> Value {
        let names = res.presentation().generators();
        let mut out = Vec::new();
        for (r, row) in self.values.iter().enumerate() {
            for (s, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out.push(json!({
                        "p": PBasis::P2(r).label(res),
                        "q": QBasis::Q0(s).label(res),
                        "coeff": v.to_json(names),
                    }));
                }
            }
        }
        Value::Array(out)
    }
}

/// Element of `Z^w ⊗_G (D̄ ⊗ D̄)` as `Σ [q_s ⊗ λ q_s']`, keyed by `(s, s')`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoinvClass(BTreeMap<(usize, usize), RingElt>);

impl CoinvClass {
    pub fn zero() -> Self {
        CoinvClass::default()
    }

    pub fn single(s: usize, t: usize, g: GroupElement) -> Self {
        let mut c = CoinvClass::zero();
        c.add_part(s, t, &RingElt::monomial(g, 1));
        c
    }

    pub fn part(&self, s: usize, t: usize) -> Option<&RingElt> {
        self.0.get(&(s, t))
    }

    fn add_part(&mut self, s: usize, t: usize, x: &RingElt) {
        let e = self.0.entry((s, t)).or_default();
        *e = e.add(x);
        if e.is_zero() {
            self.0.remove(&(s, t));
        }
    }

    pub fn add(&self, other: &CoinvClass) -> CoinvClass {
        let mut out = self.clone();
        for ((s, t), x) in &other.0 {
            out.add_part(*s, *t, x);
        }
        out
    }

    pub fn neg(&self) -> CoinvClass {
        CoinvClass(self.0.iter().map(|(k, x)| (*k, x.neg())).collect())
    }

    pub fn sub(&self, other: &CoinvClass) -> CoinvClass {
        self.add(&other.neg())
    }
}

/// `h(ξ) = Σ_r [q_r ⊗ ξ(p_r)]`.
pub fn h_map(res: &Resolved, xi: &Cocycle) -> CoinvClass {
    let mut out = CoinvClass::zero();
    for r in 0..res.relator_count() {
        for s in 0..res.relator_count() {
            out.add_part(r, s, xi.value(r, s));
        }
    }
    out
}

/// Swaps the factors: `[q_s ⊗ g q_t] ↦ [g q_t ⊗ q_s] = w(g) [q_t ⊗ g^-1 q_s]`.
pub fn tau(res: &Resolved, c: &CoinvClass) -> Result<CoinvClass> {
    let mut out = CoinvClass::zero();
    for ((s, t), x) in &c.0 {
        out.add_part(*t, *s, &x.involute(res.orientation(), res.rewriting())?);
    }
    Ok(out)
}

/// `(ξ ⊗ η)(j2)`: each `c (g p_r ⊗ h q_s)` with `ξ(p_r) ∋ d k q_t` contributes
/// `c d [g k q_t ⊗ h q_s] = c d w(gk) [q_t ⊗ (gk)^-1 h q_s]`. Only meaningful
/// for a `j2` that passes verification.
pub fn cup_with_identity(res: &Resolved, xi: &Cocycle, j2: &TensorElt) -> Result<CoinvClass> {
    let rs = res.rewriting();
    let w = res.orientation();
    let mut out = CoinvClass::zero();
    for ((p, q, g, h), c) in j2.terms() {
        let (PBasis::P2(r), QBasis::Q0(s)) = (*p, *q) else {
            continue;
        };
        for t in 0..res.relator_count() {
            let mut part = RingElt::zero();
            for (k, d) in xi.value(r, t).terms() {
                let gk = rs.multiply(g, k)?;
                let sign = BigInt::from(w.of_element(&gk));
                part.add_term(rs.multiply(&rs.inverse(&gk)?, h)?, c * d * sign);
            }
            out.add_part(t, s, &part);
        }
    }
    Ok(out)
}

/// Per-cocycle outcome of the cup relation check.
#[derive(Clone, Debug)]
pub struct CocycleVerdict {
    pub label: String,
    pub cup: Value,
    pub expected: Value,
    pub agrees: bool,
}

#[derive(Clone, Debug)]
pub struct CupReport {
    pub family: Option<String>,
    pub truncation: u32,
    pub exact: bool,
    pub j2_valid: bool,
    /// Terms of `∂j2 - j1(∂1*)` when `j2` fails verification.
    pub defect: Vec<Value>,
    pub cocycles: Vec<CocycleVerdict>,
}

impl CupReport {
    pub fn holds(&self) -> bool {
        self.j2_valid && self.cocycles.iter().all(|c| c.agrees)
    }

    pub fn disagreements(&self) -> usize {
        self.cocycles.iter().filter(|c| !c.agrees).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family,
            "truncation": self.truncation,
            "exact_model": self.exact,
            "j2_valid": self.j2_valid,
            "defect": self.defect,
            "holds": self.holds(),
            "cocycles": self.cocycles.iter().map(|c| json!({
                "cocycle": c.label,
                "cup": c.cup,
                "minus_tau_h": c.expected,
                "agrees": c.agrees,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Compares `ξ ∪ id` with `-τ(h(ξ))` inside `model` for every cocycle.
pub fn check_cup_relation(
    res: &Resolved,
    model: &CoinvariantsModel,
    spanning: &[(String, Cocycle)],
    j2: &TensorElt,
) -> Result<CupReport> {
    let report = verify_j2(res, j2)?;
    let mut out = CupReport {
        family: res.family().map(|f| f.to_string()),
        truncation: model.truncation(),
        exact: model.is_exact(),
        j2_valid: report.pass,
        defect: raw_terms_json(res, &report.defect),
        cocycles: Vec::new(),
    };
    if !report.pass {
        return Ok(out);
    }
    out.cocycles = spanning
        .par_iter()
        .map(|(label, xi)| {
            let cup = cup_with_identity(res, xi, j2)?;
            let expected = tau(res, &h_map(res, xi))?.neg();
            let agrees = model.is_zero(res, &cup.sub(&expected))?;
            Ok(CocycleVerdict {
                label: label.clone(),
                cup: model.class_to_json(&cup),
                expected: model.class_to_json(&expected),
                agrees,
            })
        })
        .collect::<Result<_>>()?;
    Ok(out)
}

/// Cocycles supported on one basis element of the truncated dualizing module.
pub fn spanning_cocycles(res: &Resolved, model: &CoinvariantsModel) -> Result<Vec<(String, Cocycle)>> {
    let names = res.presentation().generators();
    let elements = match model.kind() {
        ModelKind::Zero => Vec::new(),
        ModelKind::Augmentation { .. } => vec![GroupElement::identity()],
        ModelKind::TorusKnot { m, n } => model::torus_spanning_elements(res, *m, *n, model.truncation())?,
        ModelKind::BaumslagSolitar { m } => model::bs_spanning_elements(res, *m, model.truncation())?,
    };
    elements
        .into_iter()
        .map(|g| {
            let word = format_word(g.word(), names);
            let label = format!("{} ↦ {} {}", PBasis::P2(0).label(res), word, QBasis::Q0(0).label(res));
            Ok((label, Cocycle::single(res, 0, 0, g)?))
        })
        .collect()
}
