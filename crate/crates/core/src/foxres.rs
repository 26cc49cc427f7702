//! Fox derivatives, the free resolution of `Z` they give, and its twisted dual.
//!
//! Bases: `p0`, `p1_x` (one per generator), `p2_r` (one per relator) for the
//! resolution; `1*` (top degree), `q1_x`, `q0_r` for the dual.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groupring::{OrientationChar, RingElt};
use crate::presentation::{Family, FamilyContext, GroupElement, Presentation, RewritingSystem, Word};

/// `∂w/∂x_gen` in the group ring of the free group on `rank` generators.
pub fn fox_derivative(word: &Word, gen: usize, rank: usize) -> Result<RingElt> {
    if gen >= rank {
        return Err(Error::UnknownGenerator(format!("g{gen}")));
    }
    let mut out = RingElt::zero();
    let mut prefix = Word::identity();
    for &l in word.letters() {
        if l.generator() >= rank {
            return Err(Error::UnknownGenerator(format!("g{}", l.generator())));
        }
        if l.generator() == gen && !l.is_inverse() {
            out.add_term(GroupElement::from_normal_word(prefix.clone()), BigInt::from(1));
        }
        push_reduced(&mut prefix, l);
        if l.generator() == gen && l.is_inverse() {
            out.add_term(GroupElement::from_normal_word(prefix.clone()), BigInt::from(-1));
        }
    }
    Ok(out)
}

fn push_reduced(w: &mut Word, l: crate::presentation::Letter) {
    if w.letters().last() == Some(&l.inverse()) {
        let mut v = std::mem::take(w).into_letters();
        v.pop();
        *w = Word::from_letters(v);
    } else {
        w.push(l);
    }
}

/// Maps a free-group-ring element into the group ring of `rs`.
pub fn reduce_into(x: &RingElt, rs: &RewritingSystem) -> Result<RingElt> {
    let mut out = RingElt::zero();
    for (g, c) in x.terms() {
        out.add_term(rs.normal_form(g.word())?, c.clone());
    }
    Ok(out)
}

/// The length-two free resolution `0 → P2 → P1 → P0 → Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolution {
    rank: usize,
    relators: usize,
    /// `[r][x]`: Fox derivatives in the free group ring.
    free_fox: Vec<Vec<RingElt>>,
    /// `[r][x]`: the same, reduced into the group.
    fox: Vec<Vec<RingElt>>,
    /// `[x]`: `x - 1`.
    d1: Vec<RingElt>,
}

impl Resolution {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relator_count(&self) -> usize {
        self.relators
    }

    /// Coefficient of `p1_x` in `∂p2_r`, reduced into the group.
    pub fn fox_entry(&self, r: usize, x: usize) -> &RingElt {
        &self.fox[r][x]
    }

    pub fn free_fox_entry(&self, r: usize, x: usize) -> &RingElt {
        &self.free_fox[r][x]
    }

    /// `∂p1_x = (x - 1) p0`.
    pub fn d1(&self, x: usize) -> &RingElt {
        &self.d1[x]
    }
}

pub fn build_resolution(p: &Presentation, rs: &RewritingSystem) -> Result<Resolution> {
    let rank = p.rank();
    if rs.rank() != rank {
        return Err(Error::WrongContext(format!(
            "rewriting system of rank {} for {} generators",
            rs.rank(),
            rank
        )));
    }
    let mut free_fox = Vec::new();
    let mut fox = Vec::new();
    for r in p.relators() {
        let row: Vec<RingElt> = (0..rank)
            .map(|x| fox_derivative(r, x, rank))
            .collect::<Result<_>>()?;
        fox.push(row.iter().map(|e| reduce_into(e, rs)).collect::<Result<Vec<_>>>()?);
        free_fox.push(row);
    }
    let d1 = (0..rank)
        .map(|x| Ok(RingElt::minus_one(rs.generator(x, 1)?)))
        .collect::<Result<_>>()?;
    Ok(Resolution {
        rank,
        relators: p.relators().len(),
        free_fox,
        fox,
        d1,
    })
}

/// `Σ_x (∂r/∂x)(x - 1) - (r - 1)` in the free group ring; zero for every word.
pub fn fundamental_identity_defect(word: &Word, rank: usize) -> Result<RingElt> {
    let free = RewritingSystem::free(rank);
    let mut sum = RingElt::zero();
    for x in 0..rank {
        let d = fox_derivative(word, x, rank)?;
        let xm1 = RingElt::minus_one(free.generator(x, 1)?);
        sum = sum.add(&d.mul(&xm1, &free)?);
    }
    let r = RingElt::minus_one(free.normal_form(word)?);
    Ok(sum.sub(&r))
}

/// The dual complex with twisted left structure.
#[derive(Clone, Debug, PartialEq)]
pub struct DualComplex {
    /// `[x]`: `x̄ - 1`, the coefficient of `q1_x` in `∂1*`.
    top: Vec<RingElt>,
    /// `[x][r]`: `r̄_x`, the coefficient of `q0_r` in `∂q1_x`.
    d1: Vec<Vec<RingElt>>,
}

impl DualComplex {
    pub fn top_entry(&self, x: usize) -> &RingElt {
        &self.top[x]
    }

    pub fn entry(&self, x: usize, r: usize) -> &RingElt {
        &self.d1[x][r]
    }
}

/// Dualizes and checks that the boundary squares to zero.
pub fn dualize_resolution(
    res: &Resolution,
    w: &OrientationChar,
    rs: &RewritingSystem,
) -> Result<DualComplex> {
    let mut top = Vec::with_capacity(res.rank);
    for x in 0..res.rank {
        let g = rs.generator(x, 1)?;
        top.push(RingElt::monomial(g, 1).involute(w, rs)?.sub(&RingElt::one()));
    }
    let mut d1 = vec![Vec::with_capacity(res.relators); res.rank];
    for (x, row) in d1.iter_mut().enumerate() {
        for r in 0..res.relators {
            row.push(res.fox[r][x].involute(w, rs)?);
        }
    }
    let dual = DualComplex { top, d1 };
    for r in 0..res.relators {
        let mut s = RingElt::zero();
        for x in 0..res.rank {
            s = s.add(&dual.top[x].mul(&dual.d1[x][r], rs)?);
        }
        if !s.is_zero() {
            return Err(Error::Inconsistent(format!(
                "dual boundary does not square to zero on relator {r}"
            )));
        }
    }
    Ok(dual)
}

/// A group with its resolution and dual complex.
#[derive(Clone, Debug)]
pub struct Resolved {
    presentation: Presentation,
    rewriting: RewritingSystem,
    family: Option<Family>,
    resolution: Resolution,
    dual: DualComplex,
}

impl Resolved {
    pub fn new(presentation: Presentation, rewriting: RewritingSystem) -> Result<Self> {
        Self::build(presentation, rewriting, None)
    }

    pub fn from_family(ctx: &FamilyContext) -> Result<Self> {
        Self::build(
            ctx.presentation().clone(),
            ctx.rewriting().clone(),
            Some(ctx.family()),
        )
    }

    fn build(presentation: Presentation, rewriting: RewritingSystem, family: Option<Family>) -> Result<Self> {
        let resolution = build_resolution(&presentation, &rewriting)?;
        let dual = dualize_resolution(&resolution, presentation.orientation(), &rewriting)?;
        Ok(Resolved {
            presentation,
            rewriting,
            family,
            resolution,
            dual,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn rewriting(&self) -> &RewritingSystem {
        &self.rewriting
    }

    pub fn family(&self) -> Option<Family> {
        self.family
    }

    pub fn resolution(&self) -> &Resolution {
        &self.resolution
    }

    pub fn dual(&self) -> &DualComplex {
        &self.dual
    }

    pub fn orientation(&self) -> &OrientationChar {
        self.presentation.orientation()
    }

    pub fn rank(&self) -> usize {
        self.presentation.rank()
    }

    pub fn relator_count(&self) -> usize {
        self.presentation.relators().len()
    }

    /// True for the built-in families, whose presentations are aspherical.
    pub fn aspherical_known(&self) -> bool {
        self.family.is_some()
    }

    pub fn generator_label(&self, x: usize) -> String {
        self.presentation.generators()[x].clone()
    }

    pub fn relator_label(&self, r: usize) -> String {
        relator_label(r, self.relator_count())
    }

    pub fn format(&self, x: &RingElt) -> String {
        x.format(self.presentation.generators())
    }

    /// Basis-labelled boundary matrices of both complexes.
    pub fn to_json(&self) -> Value {
        let names = self.presentation.generators();
        let rank = self.rank();
        let nrel = self.relator_count();
        let d1: Vec<Value> = (0..rank)
            .map(|x| {
                json!({"basis": format!("p1_{}", names[x]), "p0": self.resolution.d1[x].to_json(names)})
            })
            .collect();
        let d2: Vec<Value> = (0..nrel)
            .map(|r| {
                let entries: Vec<Value> = (0..rank)
                    .map(|x| {
                        json!({
                            "target": format!("p1_{}", names[x]),
                            "reduced": self.resolution.fox[r][x].to_json(names),
                            "free": self.resolution.free_fox[r][x].to_json(names),
                        })
                    })
                    .collect();
                json!({"basis": format!("p2_{}", self.relator_label(r)), "entries": entries})
            })
            .collect();
        let top: Vec<Value> = (0..rank)
            .map(|x| json!({"target": format!("q1_{}", names[x]), "coeff": self.dual.top[x].to_json(names)}))
            .collect();
        let dq1: Vec<Value> = (0..rank)
            .map(|x| {
                let entries: Vec<Value> = (0..nrel)
                    .map(|r| {
                        json!({
                            "target": format!("q0_{}", self.relator_label(r)),
                            "coeff": self.dual.d1[x][r].to_json(names),
                        })
                    })
                    .collect();
                json!({"basis": format!("q1_{}", names[x]), "entries": entries})
            })
            .collect();
        json!({
            "generators": names,
            "relators": self.presentation.relators().iter().map(|r| self.presentation.format_word(r)).collect::<Vec<_>>(),
            "aspherical_known": self.aspherical_known(),
            "resolution": {"d1": d1, "d2": d2},
            "dual": {"d_top": top, "d1": dq1},
        })
    }
}

pub fn relator_label(r: usize, count: usize) -> String {
    if count == 1 {
        "r".into()
    } else {
        format!("r{}", r + 1)
    }
}
