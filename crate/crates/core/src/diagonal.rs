//! Low-degree components of a diagonal approximation `P → P ⊗ Q̄`, verification
//! of degree-two candidates and a bounded search for them.
//!
//! Elements of `P ⊗ Q̄` are integer combinations of `(g p ⊗ h q)` for basis
//! elements `p`, `q` and group elements `g`, `h`. The group acts diagonally.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::foxres::{fox_derivative, Resolved};
use crate::groupring::{bigint_json, RingElt};
use crate::modules::{ColumnEchelon, SparseVec};
use crate::presentation::{Family, GroupElement, Letter, Word};

/// Default cap on the size of [`build_dictionary`]'s output.
pub const DEFAULT_DICTIONARY_CAP: usize = 200;

/// The sign of the second summand in `∂(p ⊗ q) = ∂p ⊗ q ± p ⊗ ∂q` is
/// `(-1)^deg(p)`. Calibrated once on `torus(2, 3)`; see `koszul_calibration`.
const KOSZUL: bool = true;

/// Basis of the resolution `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PBasis {
    P0,
    P1(usize),
    P2(usize),
}

impl PBasis {
    pub fn degree(self) -> usize {
        match self {
            PBasis::P0 => 0,
            PBasis::P1(_) => 1,
            PBasis::P2(_) => 2,
        }
    }

    pub fn label(self, res: &Resolved) -> String {
        match self {
            PBasis::P0 => "p0".into(),
            PBasis::P1(x) => format!("p1_{}", res.generator_label(x)),
            PBasis::P2(r) => format!("p2_{}", res.relator_label(r)),
        }
    }

    pub fn parse(res: &Resolved, s: &str) -> Result<Self> {
        if s == "p0" {
            return Ok(PBasis::P0);
        }
        if let Some(g) = s.strip_prefix("p1_") {
            return find_generator(res, g).map(PBasis::P1);
        }
        if let Some(r) = s.strip_prefix("p2_") {
            return find_relator(res, r).map(PBasis::P2);
        }
        Err(Error::Malformed(format!("unknown resolution basis `{s}`")))
    }
}

/// Basis of the dual complex `Q̄`; `Top` is `1*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QBasis {
    Top,
    Q1(usize),
    Q0(usize),
}

impl QBasis {
    pub fn degree(self) -> usize {
        match self {
            QBasis::Top => 2,
            QBasis::Q1(_) => 1,
            QBasis::Q0(_) => 0,
        }
    }

    pub fn label(self, res: &Resolved) -> String {
        match self {
            QBasis::Top => "1*".into(),
            QBasis::Q1(x) => format!("q1_{}", res.generator_label(x)),
            QBasis::Q0(r) => format!("q0_{}", res.relator_label(r)),
        }
    }

    pub fn parse(res: &Resolved, s: &str) -> Result<Self> {
        if s == "1*" {
            return Ok(QBasis::Top);
        }
        if let Some(g) = s.strip_prefix("q1_") {
            return find_generator(res, g).map(QBasis::Q1);
        }
        if let Some(r) = s.strip_prefix("q0_") {
            return find_relator(res, r).map(QBasis::Q0);
        }
        Err(Error::Malformed(format!("unknown dual basis `{s}`")))
    }
}

fn find_generator(res: &Resolved, name: &str) -> Result<usize> {
    res.presentation()
        .generator_index(name)
        .ok_or_else(|| Error::WrongContext(format!("no generator `{name}`")))
}

fn find_relator(res: &Resolved, label: &str) -> Result<usize> {
    (0..res.relator_count())
        .find(|&r| res.relator_label(r) == label)
        .ok_or_else(|| Error::WrongContext(format!("no relator `{label}`")))
}

pub type TensorKey = (PBasis, QBasis, GroupElement, GroupElement);

/// Finite integer combination of `(g p ⊗ h q)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorElt(BTreeMap<TensorKey, BigInt>);

impl TensorElt {
    pub fn zero() -> Self {
        TensorElt::default()
    }

    /// `1·p ⊗ 1·q`.
    pub fn basis(p: PBasis, q: QBasis) -> Self {
        let mut t = TensorElt::zero();
        t.add_term(p, q, GroupElement::identity(), GroupElement::identity(), BigInt::one());
        t
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

    pub fn terms(&self) -> impl Iterator<Item = (&TensorKey, &BigInt)> {
        self.0.iter()
    }

    pub fn coeff(&self, key: &TensorKey) -> BigInt {
        self.0.get(key).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, p: PBasis, q: QBasis, left: GroupElement, right: GroupElement, c: BigInt) {
        self.add_key((p, q, left, right), c);
    }

    fn add_key(&mut self, key: TensorKey, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(key) {
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

    pub fn add(&self, other: &TensorElt) -> TensorElt {
        let mut r = self.clone();
        for (k, c) in other.terms() {
            r.add_key(k.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &TensorElt) -> TensorElt {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TensorElt {
        TensorElt(self.0.iter().map(|(k, c)| (k.clone(), -c)).collect())
    }

    pub fn scale(&self, k: &BigInt) -> TensorElt {
        if k.is_zero() {
            return TensorElt::zero();
        }
        TensorElt(self.0.iter().map(|(key, c)| (key.clone(), c * k)).collect())
    }

    /// Diagonal action: `u · (g p ⊗ h q) = (ug p ⊗ uh q)`.
    pub fn act(&self, u: &RingElt, res: &Resolved) -> Result<TensorElt> {
        let rs = res.rewriting();
        let mut out = TensorElt::zero();
        for (v, cv) in u.terms() {
            for ((p, q, g, h), c) in self.terms() {
                out.add_term(*p, *q, rs.multiply(v, g)?, rs.multiply(v, h)?, cv * c);
            }
        }
        Ok(out)
    }

    /// Terms whose basis pair satisfies `keep`.
    pub fn restrict(&self, keep: impl Fn(PBasis, QBasis) -> bool) -> TensorElt {
        TensorElt(
            self.0
                .iter()
                .filter(|((p, q, _, _), _)| keep(*p, *q))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        )
    }

    /// Total degree, `None` for zero; mixed degrees are an error.
    pub fn degree(&self) -> Result<Option<usize>> {
        let mut degs = self.0.keys().map(|(p, q, _, _)| p.degree() + q.degree());
        let Some(d) = degs.next() else {
            return Ok(None);
        };
        if degs.any(|e| e != d) {
            return Err(Error::Malformed("tensor element mixes total degrees".into()));
        }
        Ok(Some(d))
    }

    /// Largest absolute coefficient.
    pub fn max_coeff(&self) -> BigInt {
        self.0.values().map(|c| c.abs()).max().unwrap_or_default()
    }
}

fn check_context(res: &Resolved, e: &TensorElt) -> Result<()> {
    let rank = res.rank();
    let nrel = res.relator_count();
    for (p, q, g, h) in e.0.keys() {
        let p_ok = match p {
            PBasis::P0 => true,
            PBasis::P1(x) => *x < rank,
            PBasis::P2(r) => *r < nrel,
        };
        let q_ok = match q {
            QBasis::Top => true,
            QBasis::Q1(x) => *x < rank,
            QBasis::Q0(r) => *r < nrel,
        };
        let w_ok = [g, h]
            .iter()
            .all(|u| u.word().max_generator().is_none_or(|m| m < rank));
        if !(p_ok && q_ok && w_ok) {
            return Err(Error::WrongContext(format!(
                "term {p:?} ⊗ {q:?} does not belong to a group with {rank} generators and {nrel} relators"
            )));
        }
    }
    Ok(())
}

/// Boundary in the total complex.
pub fn tensor_boundary(res: &Resolved, e: &TensorElt) -> Result<TensorElt> {
    boundary_with(res, e, KOSZUL)
}

fn boundary_with(res: &Resolved, e: &TensorElt, koszul: bool) -> Result<TensorElt> {
    check_context(res, e)?;
    let rs = res.rewriting();
    let fox = res.resolution();
    let dual = res.dual();
    let mut out = TensorElt::zero();
    for ((p, q, g, h), c) in e.terms() {
        match p {
            PBasis::P0 => {}
            PBasis::P1(x) => {
                let gx = rs.multiply(g, &rs.generator(*x, 1)?)?;
                out.add_term(PBasis::P0, *q, gx, h.clone(), c.clone());
                out.add_term(PBasis::P0, *q, g.clone(), h.clone(), -c);
            }
            PBasis::P2(r) => {
                for x in 0..res.rank() {
                    for (u, d) in fox.fox_entry(*r, x).terms() {
                        out.add_term(PBasis::P1(x), *q, rs.multiply(g, u)?, h.clone(), c * d);
                    }
                }
            }
        }
        let c = if koszul && p.degree() % 2 == 1 { -c } else { c.clone() };
        match q {
            QBasis::Q0(_) => {}
            QBasis::Q1(x) => {
                for r in 0..res.relator_count() {
                    for (u, d) in dual.entry(*x, r).terms() {
                        out.add_term(*p, QBasis::Q0(r), g.clone(), rs.multiply(h, u)?, &c * d);
                    }
                }
            }
            QBasis::Top => {
                for x in 0..res.rank() {
                    for (u, d) in dual.top_entry(x).terms() {
                        out.add_term(*p, QBasis::Q1(x), g.clone(), rs.multiply(h, u)?, &c * d);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The chain map in degrees 0 and 1.
#[derive(Clone, Debug)]
pub struct DiagonalMaps {
    j0: Vec<TensorElt>,
    j1: Vec<TensorElt>,
}

impl DiagonalMaps {
    pub fn j0(&self, r: usize) -> &TensorElt {
        &self.j0[r]
    }

    pub fn j1(&self, x: usize) -> &TensorElt {
        &self.j1[x]
    }

    /// `j1(∂1*) = Σ_x (x̄ - 1) j1(q1_x)`.
    pub fn j1_of_top_boundary(&self, res: &Resolved) -> Result<TensorElt> {
        let mut out = TensorElt::zero();
        for x in 0..res.rank() {
            out = out.add(&self.j1[x].act(res.dual().top_entry(x), res)?);
        }
        Ok(out)
    }
}

/// How the terms `e_k r_k` of `r̄_x` and the words for `r_k` are chosen in `j1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Expansion {
    /// Terms collected in the group ring; each `r_k` is written as a shortest
    /// word. Ties go to the first shortlex geodesic unless the family ships
    /// a closed-form `j2`, in which case the first tie resolution (in
    /// lexicographic order of choices) under which it verifies is used.
    #[default]
    Geodesic,
    /// Like [`Expansion::Geodesic`] but always the first shortlex geodesic.
    ShortlexGeodesic,
    /// One term per term of the free-group Fox derivative, with the free
    /// word `w(p) p^-1` for a prefix `p`.
    Free,
    /// Terms collected in the group ring, each with its normal-form word.
    Collected,
}

/// Geodesics longer than this fall back to the normal-form word.
pub const GEODESIC_MAX_LEN: usize = 8;
const GEODESIC_WORD_CAP: usize = 2_000_000;
const TIE_COMBINATION_CAP: usize = 4096;

/// `j0(q0_r) = p0 ⊗ q0_r` and
/// `j1(q1_x) = p0 ⊗ q1_x + Σ_r Σ_k e_k Σ_y (∂r_k/∂y) p1_y ⊗ r_k q0_r`
/// for `r̄_x = Σ_k e_k r_k`.
pub fn build_j01(res: &Resolved) -> Result<DiagonalMaps> {
    build_j01_with(res, Expansion::default())
}

/// Shortest freely reduced words for each target, in shortlex order.
fn geodesics(res: &Resolved, targets: &BTreeSet<GroupElement>) -> Result<HashMap<GroupElement, Vec<Word>>> {
    let rs = res.rewriting();
    let rank = res.rank();
    let mut found: HashMap<GroupElement, Vec<Word>> = HashMap::new();
    let mut frontier = vec![Word::identity()];
    let mut seen = 0usize;
    for len in 0..=GEODESIC_MAX_LEN {
        if len > 0 {
            let mut next = Vec::new();
            for w in &frontier {
                let last = w.letters().last().copied();
                for g in 0..rank {
                    for inv in [false, true] {
                        let l = Letter::new(g, inv);
                        if last == Some(l.inverse()) {
                            continue;
                        }
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        seen += frontier.len();
        if seen > GEODESIC_WORD_CAP {
            break;
        }
        let hits: Vec<(GroupElement, Word)> = frontier
            .par_iter()
            .filter_map(|w| match rs.normal_form(w) {
                Ok(g) if targets.contains(&g) && !found.contains_key(&g) => Some(Ok((g, w.clone()))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<_>>()?;
        for (g, w) in hits {
            found.entry(g).or_default().push(w);
        }
        if targets.iter().all(|t| found.contains_key(t)) {
            break;
        }
    }
    Ok(found)
}

type WordTerms = Vec<Vec<Vec<(Word, BigInt)>>>;

/// Word options per term of `r̄_x`: all shortest words, or the normal form.
fn geodesic_options(res: &Resolved) -> Result<Vec<Vec<Vec<(Vec<Word>, BigInt)>>>> {
    let targets = (0..res.rank())
        .flat_map(|x| (0..res.relator_count()).map(move |r| (x, r)))
        .flat_map(|(x, r)| res.dual().entry(x, r).terms().map(|(u, _)| u.clone()).collect::<Vec<_>>())
        .collect();
    let geo = geodesics(res, &targets)?;
    Ok((0..res.rank())
        .map(|x| {
            (0..res.relator_count())
                .map(|r| {
                    res.dual()
                        .entry(x, r)
                        .terms()
                        .map(|(u, e)| {
                            let opts = geo.get(u).cloned().unwrap_or_else(|| vec![u.word().clone()]);
                            (opts, e.clone())
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

fn pick(options: &[Vec<Vec<(Vec<Word>, BigInt)>>], choice: &HashMap<(usize, usize, usize), usize>) -> WordTerms {
    options
        .iter()
        .enumerate()
        .map(|(x, row)| {
            row.iter()
                .enumerate()
                .map(|(r, ts)| {
                    ts.iter()
                        .enumerate()
                        .map(|(k, (opts, e))| {
                            let i = choice.get(&(x, r, k)).copied().unwrap_or(0);
                            (opts[i].clone(), e.clone())
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn geodesic_maps(res: &Resolved, resolve_ties: bool) -> Result<DiagonalMaps> {
    let options = geodesic_options(res)?;
    let first = build_j01_from_words(res, &pick(&options, &HashMap::new()))?;
    let Some(target) = resolve_ties.then(|| builtin_candidate(res).ok()).flatten() else {
        return Ok(first);
    };
    let ties: Vec<((usize, usize, usize), usize)> = options
        .iter()
        .enumerate()
        .flat_map(|(x, row)| {
            row.iter().enumerate().flat_map(move |(r, ts)| {
                ts.iter()
                    .enumerate()
                    .filter(|(_, (o, _))| o.len() > 1)
                    .map(move |(k, (o, _))| ((x, r, k), o.len()))
            })
        })
        .collect();
    let total = ties.iter().try_fold(1usize, |acc, (_, n)| acc.checked_mul(*n));
    if ties.is_empty() || total.is_none_or(|t| t > TIE_COMBINATION_CAP) {
        return Ok(first);
    }
    // odometer over tie choices, first slot varying slowest
    let mut digits = vec![0usize; ties.len()];
    loop {
        let choice = ties.iter().zip(&digits).map(|((key, _), &d)| (*key, d)).collect();
        let maps = build_j01_from_words(res, &pick(&options, &choice))?;
        if verify_j2_with(res, &maps, &target)?.pass {
            return Ok(maps);
        }
        let mut i = digits.len();
        loop {
            if i == 0 {
                return Ok(first);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < ties[i].1 {
                break;
            }
            digits[i] = 0;
        }
    }
}

pub fn build_j01_with(res: &Resolved, expansion: Expansion) -> Result<DiagonalMaps> {
    let w = res.orientation();
    let terms: WordTerms = match expansion {
        Expansion::Geodesic => return geodesic_maps(res, true),
        Expansion::ShortlexGeodesic => return geodesic_maps(res, false),
        Expansion::Free => (0..res.rank())
            .map(|x| {
                (0..res.relator_count())
                    .map(|r| {
                        res.resolution()
                            .free_fox_entry(r, x)
                            .terms()
                            .map(|(p, e)| (p.word().inverse(), e * BigInt::from(w.of_word(p.word()))))
                            .collect()
                    })
                    .collect()
            })
            .collect(),
        Expansion::Collected => (0..res.rank())
            .map(|x| {
                (0..res.relator_count())
                    .map(|r| {
                        res.dual()
                            .entry(x, r)
                            .terms()
                            .map(|(u, e)| (u.word().clone(), e.clone()))
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    };
    build_j01_from_words(res, &terms)
}

/// `j1` from an explicit expansion: `terms[x][r]` lists `(word, e)` with
/// `Σ e · word = r̄_x` in the group ring.
pub fn build_j01_from_words(res: &Resolved, terms: &[Vec<Vec<(Word, BigInt)>>]) -> Result<DiagonalMaps> {
    let rs = res.rewriting();
    let rank = res.rank();
    let j0 = (0..res.relator_count())
        .map(|r| TensorElt::basis(PBasis::P0, QBasis::Q0(r)))
        .collect();
    let mut j1 = Vec::with_capacity(rank);
    for x in 0..rank {
        let mut t = TensorElt::basis(PBasis::P0, QBasis::Q1(x));
        for r in 0..res.relator_count() {
            let mut sum = RingElt::zero();
            for (word, e) in &terms[x][r] {
                let u = rs.normal_form(word)?;
                sum.add_term(u.clone(), e.clone());
                for y in 0..rank {
                    for (l, c) in fox_derivative(word, y, rank)?.terms() {
                        let l = rs.normal_form(l.word())?;
                        t.add_term(PBasis::P1(y), QBasis::Q0(r), l, u.clone(), e * c);
                    }
                }
            }
            if &sum != res.dual().entry(x, r) {
                return Err(Error::InvalidParams(format!(
                    "expansion for generator {x}, relator {r} does not sum to the dual boundary entry"
                )));
            }
        }
        j1.push(t);
    }
    Ok(DiagonalMaps { j0, j1 })
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub pass: bool,
    /// `∂(candidate) - j1(∂1*)`.
    pub defect: TensorElt,
}

impl VerifyReport {
    pub fn summary(&self) -> String {
        if self.pass {
            "pass, defect = 0".into()
        } else {
            format!("fail, defect has {} terms", self.defect.len())
        }
    }

    pub fn to_json(&self, res: &Resolved) -> Value {
        json!({
            "verdict": if self.pass { "pass" } else { "fail" },
            "defect_terms": self.defect.len(),
            "defect": raw_terms_json(res, &self.defect),
        })
    }
}

pub fn verify_j2(res: &Resolved, candidate: &TensorElt) -> Result<VerifyReport> {
    verify_j2_with(res, &build_j01(res)?, candidate)
}

pub fn verify_j2_with(res: &Resolved, maps: &DiagonalMaps, candidate: &TensorElt) -> Result<VerifyReport> {
    check_context(res, candidate)?;
    match candidate.degree()? {
        None | Some(2) => {}
        Some(d) => {
            return Err(Error::InvalidParams(format!(
                "candidate has total degree {d}, expected 2"
            )))
        }
    }
    let defect = tensor_boundary(res, candidate)?.sub(&maps.j1_of_top_boundary(res)?);
    Ok(VerifyReport {
        pass: defect.is_zero(),
        defect,
    })
}

/// `1 ⊗ 1* - Σ_x x̄ (p1_x ⊗ q1_x)`, with `x̄ = w(x) x^-1`.
fn ansatz_base(res: &Resolved) -> Result<TensorElt> {
    let rs = res.rewriting();
    let w = res.orientation();
    let mut t = TensorElt::basis(PBasis::P0, QBasis::Top);
    for x in 0..res.rank() {
        let xi = rs.generator(x, -1)?;
        t.add_term(PBasis::P1(x), QBasis::Q1(x), xi.clone(), xi, BigInt::from(-w.value(x)));
    }
    Ok(t)
}

/// `1 ⊗ 1* - Σ_x x̄ (p1_x ⊗ q1_x) - Σ_r u_r (p2_r ⊗ q0_r)`.
pub fn ansatz_candidate(res: &Resolved, units: &[GroupElement]) -> Result<TensorElt> {
    if units.len() != res.relator_count() {
        return Err(Error::InvalidParams(format!(
            "{} units for {} relators",
            units.len(),
            res.relator_count()
        )));
    }
    let mut t = ansatz_base(res)?;
    for (r, u) in units.iter().enumerate() {
        t.add_term(PBasis::P2(r), QBasis::Q0(r), u.clone(), u.clone(), BigInt::from(-1));
    }
    Ok(t)
}

/// Length of the relator prefix whose inverse is `u_r` in the shipped candidates.
fn builtin_prefix_len(res: &Resolved) -> Option<usize> {
    let trivial = res.orientation().is_trivial();
    match res.family()? {
        Family::Free(_) => Some(0),
        Family::FreeByZ(_) | Family::Bs(_) if trivial => Some(2),
        Family::TorusKnot(m, _) if trivial => Some(m as usize),
        Family::Surface(2) if trivial => Some(4),
        _ => None,
    }
}

/// The shipped closed-form degree-two term for the built-in families.
pub fn builtin_candidate(res: &Resolved) -> Result<TensorElt> {
    let len = builtin_prefix_len(res).ok_or_else(|| {
        Error::Unsupported(match res.family() {
            Some(f) => format!("no built-in candidate for {f} with this orientation"),
            None => "no built-in candidate for user presentations".into(),
        })
    })?;
    let rs = res.rewriting();
    let units = res
        .presentation()
        .relators()
        .iter()
        .map(|r| rs.normal_form(&r.subword(0, len).inverse()))
        .collect::<Result<Vec<_>>>()?;
    ansatz_candidate(res, &units)
}

/// Inverses of all contiguous segments of relator `r`.
fn segment_inverses(res: &Resolved, r: usize) -> Result<BTreeSet<GroupElement>> {
    let rel = &res.presentation().relators()[r];
    let mut out = BTreeSet::new();
    for i in 0..=rel.len() {
        for j in i..=rel.len() {
            out.insert(res.rewriting().normal_form(&rel.subword(i, j).inverse())?);
        }
    }
    Ok(out)
}

/// The units `u_r` if `candidate` has the ansatz shape with each `u_r` the
/// inverse of a segment of its relator.
pub fn ansatz_units(res: &Resolved, candidate: &TensorElt) -> Result<Option<Vec<GroupElement>>> {
    let mut units = Vec::with_capacity(res.relator_count());
    for r in 0..res.relator_count() {
        let part = candidate.restrict(|p, q| p == PBasis::P2(r) && q == QBasis::Q0(r));
        let mut it = part.terms();
        let (Some(((_, _, g, h), c)), None) = (it.next(), it.next()) else {
            return Ok(None);
        };
        if g != h || *c != BigInt::from(-1) || !segment_inverses(res, r)?.contains(g) {
            return Ok(None);
        }
        units.push(g.clone());
    }
    Ok((ansatz_candidate(res, &units)? == *candidate).then_some(units))
}

fn shortlex_key(g: &GroupElement) -> (usize, Vec<usize>) {
    (g.word().len(), g.word().letters().iter().map(|l| l.index()).collect())
}

/// Identity, generators and their inverses, relator segments and their
/// inverses, and all pairwise products of those; the first `cap` in shortlex
/// order of normal forms.
pub fn build_dictionary(res: &Resolved, cap: usize) -> Result<Vec<GroupElement>> {
    let rs = res.rewriting();
    let mut base = BTreeSet::new();
    base.insert(GroupElement::identity());
    for x in 0..res.rank() {
        base.insert(rs.generator(x, 1)?);
        base.insert(rs.generator(x, -1)?);
    }
    for r in 0..res.relator_count() {
        for s in segment_inverses(res, r)? {
            base.insert(rs.inverse(&s)?);
            base.insert(s);
        }
    }
    let base: Vec<GroupElement> = base.into_iter().collect();
    let products: Vec<GroupElement> = base
        .par_iter()
        .map(|a| base.iter().map(|b| rs.multiply(a, b)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut all: Vec<GroupElement> = base.into_iter().chain(products).collect::<BTreeSet<_>>().into_iter().collect();
    all.sort_by_cached_key(shortlex_key);
    all.truncate(cap);
    Ok(all)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    /// Found with every `u_r` taken from the dictionary in the ansatz shape.
    Ansatz,
    /// Found by solving the full linear system.
    LinearSystem,
    EmptyDictionary,
    NoSolution,
    /// Solvable, but no solution found within the coefficient bound.
    BoundExceeded,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub candidate: Option<TensorElt>,
    /// Unknowns in the linear system; zero when the ansatz succeeded first.
    pub unknowns: usize,
    /// Rank of the linear system, when it was built.
    pub rank: usize,
    /// Ansatz-shape units of the returned candidate, if it has that shape.
    pub ansatz_units: Option<Vec<GroupElement>>,
}

impl SearchOutcome {
    fn empty(status: SearchStatus, unknowns: usize, rank: usize) -> Self {
        SearchOutcome {
            status,
            candidate: None,
            unknowns,
            rank,
            ansatz_units: None,
        }
    }

    pub fn to_json(&self, res: &Resolved) -> Value {
        let names = res.presentation().generators();
        json!({
            "status": format!("{:?}", self.status),
            "unknowns": self.unknowns,
            "rank": self.rank,
            "matches_ansatz": self.ansatz_units.is_some(),
            "ansatz_units": self.ansatz_units.as_ref().map(|us| {
                us.iter().map(|u| crate::presentation::format_word(u.word(), names)).collect::<Vec<_>>()
            }),
            "candidate": self.candidate.as_ref().map(|c| tensor_to_json(res, c)),
        })
    }
}

/// Solves `∂c = j1(∂1*)` for `c` supported on `u · (p ⊗ q)` with `u` in the
/// dictionary, trying the ansatz shape first.
pub fn search_j2(res: &Resolved, dictionary: &[GroupElement], coeff_bound: &BigInt) -> Result<SearchOutcome> {
    search(res, dictionary, coeff_bound, true)
}

/// [`search_j2`] without the ansatz seed.
pub fn search_j2_linear(res: &Resolved, dictionary: &[GroupElement], coeff_bound: &BigInt) -> Result<SearchOutcome> {
    search(res, dictionary, coeff_bound, false)
}

fn search(res: &Resolved, dictionary: &[GroupElement], bound: &BigInt, seed: bool) -> Result<SearchOutcome> {
    if dictionary.is_empty() {
        return Ok(SearchOutcome::empty(SearchStatus::EmptyDictionary, 0, 0));
    }
    let maps = build_j01(res)?;
    let target = maps.j1_of_top_boundary(res)?;
    if seed && bound >= &BigInt::one() {
        if let Some(c) = search_ansatz(res, dictionary, &target)? {
            if verify_j2_with(res, &maps, &c)?.pass {
                let units = ansatz_units(res, &c)?;
                return Ok(SearchOutcome {
                    status: SearchStatus::Ansatz,
                    candidate: Some(c),
                    unknowns: 0,
                    rank: 0,
                    ansatz_units: units,
                });
            }
        }
    }
    search_linear(res, &maps, dictionary, &target, bound)
}

/// Per relator, the first dictionary element `u` with `u · ∂(p2_r ⊗ q0_r)`
/// equal to the `q0_r` part of the base defect.
fn search_ansatz(res: &Resolved, dictionary: &[GroupElement], target: &TensorElt) -> Result<Option<TensorElt>> {
    let defect = tensor_boundary(res, &ansatz_base(res)?)?.sub(target);
    let mut units = Vec::with_capacity(res.relator_count());
    for r in 0..res.relator_count() {
        let want = defect.restrict(|_, q| q == QBasis::Q0(r));
        let face = tensor_boundary(res, &TensorElt::basis(PBasis::P2(r), QBasis::Q0(r)))?;
        let hits = dictionary
            .par_iter()
            .map(|u| Ok(face.act(&RingElt::monomial(u.clone(), 1), res)? == want))
            .collect::<Result<Vec<bool>>>()?;
        match hits.iter().position(|&h| h) {
            Some(i) => units.push(dictionary[i].clone()),
            None => return Ok(None),
        }
    }
    ansatz_candidate(res, &units).map(Some)
}

fn degree_two_pairs(res: &Resolved) -> Vec<(PBasis, QBasis)> {
    let mut pairs = vec![(PBasis::P0, QBasis::Top)];
    for x in 0..res.rank() {
        for y in 0..res.rank() {
            pairs.push((PBasis::P1(x), QBasis::Q1(y)));
        }
    }
    for r in 0..res.relator_count() {
        for s in 0..res.relator_count() {
            pairs.push((PBasis::P2(r), QBasis::Q0(s)));
        }
    }
    pairs
}

fn search_linear(
    res: &Resolved,
    maps: &DiagonalMaps,
    dictionary: &[GroupElement],
    target: &TensorElt,
    bound: &BigInt,
) -> Result<SearchOutcome> {
    let pairs = degree_two_pairs(res);
    let boundaries = pairs
        .iter()
        .map(|&(p, q)| tensor_boundary(res, &TensorElt::basis(p, q)))
        .collect::<Result<Vec<_>>>()?;
    // unknown (i, k) is dictionary[i] acting on pairs[k]
    let unknowns: Vec<(usize, usize)> = (0..dictionary.len())
        .flat_map(|i| (0..pairs.len()).map(move |k| (i, k)))
        .collect();
    let images = unknowns
        .par_iter()
        .map(|&(i, k)| boundaries[k].act(&RingElt::monomial(dictionary[i].clone(), 1), res))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: HashMap<TensorKey, usize> = HashMap::new();
    let mut index = |key: &TensorKey| {
        let n = rows.len();
        *rows.entry(key.clone()).or_insert(n)
    };
    let columns: Vec<SparseVec> = images
        .iter()
        .map(|img| img.terms().map(|(k, c)| (index(k), c.clone())).collect())
        .collect();
    let rhs: SparseVec = target.terms().map(|(k, c)| (index(k), c.clone())).collect();
    let echelon = ColumnEchelon::new(columns);
    let rank = echelon.rank();
    let Some(mut x) = echelon.solve(&rhs) else {
        return Ok(SearchOutcome::empty(SearchStatus::NoSolution, unknowns.len(), rank));
    };
    shrink(&mut x, echelon.kernel());
    if x.values().any(|c| &c.abs() > bound) {
        return Ok(SearchOutcome::empty(SearchStatus::BoundExceeded, unknowns.len(), rank));
    }
    let mut cand = TensorElt::zero();
    for (j, c) in &x {
        let (i, k) = unknowns[*j];
        let (p, q) = pairs[k];
        let u = dictionary[i].clone();
        cand.add_term(p, q, u.clone(), u, c.clone());
    }
    if !verify_j2_with(res, maps, &cand)?.pass {
        return Err(Error::Inconsistent("linear-system solution fails verification".into()));
    }
    let units = ansatz_units(res, &cand)?;
    Ok(SearchOutcome {
        status: SearchStatus::LinearSystem,
        candidate: Some(cand),
        unknowns: unknowns.len(),
        rank,
        ansatz_units: units,
    })
}

fn norm(x: &SparseVec) -> (BigInt, BigInt) {
    let max = x.values().map(|c| c.abs()).max().unwrap_or_default();
    let l1 = x.values().map(|c| c.abs()).sum();
    (max, l1)
}

/// Greedy descent on `(max, l1)` by adding kernel vectors.
fn shrink(x: &mut SparseVec, kernel: &[SparseVec]) {
    const MAX_PASSES: usize = 50;
    for _ in 0..MAX_PASSES {
        let mut improved = false;
        for k in kernel {
            for sign in [BigInt::one(), -BigInt::one()] {
                let mut y = x.clone();
                crate::modules::axpy(&mut y, &sign, k);
                if norm(&y) < norm(x) {
                    *x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Grouped form: `coeff · (p ⊗ right · q)` with `coeff` acting diagonally.
fn grouped(res: &Resolved, e: &TensorElt) -> Result<BTreeMap<(PBasis, QBasis, GroupElement), RingElt>> {
    let rs = res.rewriting();
    let mut out: BTreeMap<(PBasis, QBasis, GroupElement), RingElt> = BTreeMap::new();
    for ((p, q, g, h), c) in e.terms() {
        let v = rs.multiply(&rs.inverse(g)?, h)?;
        out.entry((*p, *q, v)).or_default().add_term(g.clone(), c.clone());
    }
    Ok(out)
}

/// JSON: `{family, degree, terms: [{p, q, right, coeff}]}`.
pub fn tensor_to_json(res: &Resolved, e: &TensorElt) -> Value {
    let names = res.presentation().generators();
    let terms: Vec<Value> = match grouped(res, e) {
        Ok(g) => g
            .iter()
            .map(|((p, q, v), coeff)| {
                json!({
                    "p": p.label(res),
                    "q": q.label(res),
                    "right": crate::presentation::format_word(v.word(), names),
                    "coeff": coeff.to_json(names),
                })
            })
            .collect(),
        Err(_) => raw_terms_json(res, e),
    };
    json!({
        "family": res.family().map(|f| f.to_string()),
        "degree": e.degree().ok().flatten(),
        "terms": terms,
    })
}

pub(crate) fn raw_terms_json(res: &Resolved, e: &TensorElt) -> Vec<Value> {
    let names = res.presentation().generators();
    e.terms()
        .map(|((p, q, g, h), c)| {
            json!({
                "p": p.label(res),
                "q": q.label(res),
                "left": crate::presentation::format_word(g.word(), names),
                "right": crate::presentation::format_word(h.word(), names),
                "coeff": bigint_json(c),
            })
        })
        .collect()
}

pub fn tensor_from_json(res: &Resolved, v: &Value) -> Result<TensorElt> {
    if let Some(f) = v.get("family").and_then(Value::as_str) {
        let here = res.family().map(|f| f.to_string());
        if here.as_deref() != Some(f) {
            return Err(Error::WrongContext(format!(
                "candidate is for {f}, context is {}",
                here.unwrap_or_else(|| "a user presentation".into())
            )));
        }
    }
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Malformed("candidate needs a `terms` list".into()))?;
    let rs = res.rewriting();
    let parse = |s: &str| res.presentation().parse_word(s);
    let mut out = TensorElt::zero();
    for t in terms {
        let field = |k: &str| {
            t.get(k)
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Malformed(format!("term missing `{k}`")))
        };
        let p = PBasis::parse(res, field("p")?)?;
        let q = QBasis::parse(res, field("q")?)?;
        let right = match t.get("right").and_then(Value::as_str) {
            Some(s) => rs.normal_form(&parse(s)?)?,
            None => GroupElement::identity(),
        };
        let coeff = RingElt::from_json(
            t.get("coeff").ok_or_else(|| Error::Malformed("term missing `coeff`".into()))?,
            parse,
            rs,
        )?;
        for (g, c) in coeff.terms() {
            out.add_term(p, q, g.clone(), rs.multiply(g, &right)?, c.clone());
        }
    }
    Ok(out)
}

/// Human-readable `coeff·(p ⊗ right q)` sum.
pub fn format_tensor(res: &Resolved, e: &TensorElt) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let names = res.presentation().generators();
    let Ok(groups) = grouped(res, e) else {
        return format!("{} terms", e.len());
    };
    groups
        .iter()
        .map(|((p, q, v), coeff)| {
            let qs = if v.is_identity() {
                q.label(res)
            } else {
                format!("{} {}", crate::presentation::format_word(v.word(), names), q.label(res))
            };
            format!("({})·({} ⊗ {qs})", coeff.format(names), p.label(res))
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::builtin_family;

    fn resolved(f: Family) -> Resolved {
        Resolved::from_family(&builtin_family(f).unwrap()).unwrap()
    }

    #[test]
    fn j0_and_j1_form_a_chain_map() {
        for f in [Family::Bs(2), Family::TorusKnot(2, 3), Family::Surface(2), Family::FreeByZ(2)] {
            let res = resolved(f);
            for e in [Expansion::Geodesic, Expansion::ShortlexGeodesic, Expansion::Free, Expansion::Collected] {
                let maps = build_j01_with(&res, e).unwrap();
                for x in 0..res.rank() {
                    let lhs = tensor_boundary(&res, maps.j1(x)).unwrap();
                    let mut rhs = TensorElt::zero();
                    for r in 0..res.relator_count() {
                        rhs = rhs.add(&maps.j0(r).act(res.dual().entry(x, r), &res).unwrap());
                    }
                    assert_eq!(lhs, rhs, "{f} x={x} {e:?}");
                }
            }
        }
    }

    #[test]
    fn closed_forms_depend_on_the_words_in_j1() {
        let check = |f: Family, e: Expansion| {
            let res = resolved(f);
            let maps = build_j01_with(&res, e).unwrap();
            verify_j2_with(&res, &maps, &builtin_candidate(&res).unwrap()).unwrap().pass
        };
        assert!(!check(Family::TorusKnot(2, 3), Expansion::Collected));
        assert!(check(Family::Bs(2), Expansion::Collected));
        assert!(!check(Family::Bs(2), Expansion::Free));
        assert!(check(Family::TorusKnot(2, 3), Expansion::ShortlexGeodesic));
        // baBA = cdCD has two geodesics; the closed form needs both
        assert!(!check(Family::Surface(2), Expansion::ShortlexGeodesic));
        assert!(check(Family::Surface(2), Expansion::Geodesic));
    }

    #[test]
    fn free_group_j1_is_plain() {
        let res = resolved(Family::Free(2));
        let maps = build_j01(&res).unwrap();
        assert_eq!(maps.j1(1), &TensorElt::basis(PBasis::P0, QBasis::Q1(1)));
    }

    #[test]
    fn boundary_of_edge_vertex() {
        let res = resolved(Family::Bs(2));
        let b = tensor_boundary(&res, &TensorElt::basis(PBasis::P1(0), QBasis::Q0(0))).unwrap();
        let a = res.rewriting().generator(0, 1).unwrap();
        let mut want = TensorElt::zero();
        want.add_term(PBasis::P0, QBasis::Q0(0), a, GroupElement::identity(), BigInt::one());
        want.add_term(PBasis::P0, QBasis::Q0(0), GroupElement::identity(), GroupElement::identity(), -BigInt::one());
        assert_eq!(b, want);
    }

    #[test]
    fn builtins_pass() {
        for f in [
            Family::Free(2),
            Family::FreeByZ(1),
            Family::FreeByZ(2),
            Family::TorusKnot(2, 3),
            Family::TorusKnot(3, 4),
            Family::Surface(2),
            Family::Bs(2),
            Family::Bs(3),
        ] {
            let res = resolved(f);
            let c = builtin_candidate(&res).unwrap();
            let rep = verify_j2(&res, &c).unwrap();
            assert!(rep.pass, "{f}: {}", format_tensor(&res, &rep.defect));
            assert!(tensor_boundary(&res, &tensor_boundary(&res, &c).unwrap()).unwrap().is_zero());
            assert!(ansatz_units(&res, &c).unwrap().is_some());
        }
    }

    #[test]
    fn koszul_calibration() {
        let res = resolved(Family::TorusKnot(2, 3));
        let c = builtin_candidate(&res).unwrap();
        let maps = build_j01(&res).unwrap();
        let target = maps.j1_of_top_boundary(&res).unwrap();
        assert_eq!(boundary_with(&res, &c, KOSZUL).unwrap(), target);
        assert_ne!(boundary_with(&res, &c, !KOSZUL).unwrap(), target);
    }

    #[test]
    fn zero_candidate_fails() {
        let res = resolved(Family::Bs(2));
        let rep = verify_j2(&res, &TensorElt::zero()).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.defect, build_j01(&res).unwrap().j1_of_top_boundary(&res).unwrap().neg());
    }

    #[test]
    fn wrong_degree_and_context() {
        let res = resolved(Family::Bs(2));
        let bad = TensorElt::basis(PBasis::P1(0), QBasis::Q0(0));
        assert!(matches!(verify_j2(&res, &bad), Err(Error::InvalidParams(_))));
        let alien = TensorElt::basis(PBasis::P2(3), QBasis::Q0(0));
        assert!(matches!(verify_j2(&res, &alien), Err(Error::WrongContext(_))));
    }

    #[test]
    fn json_round_trip_and_family_check() {
        let res = resolved(Family::Bs(2));
        let c = builtin_candidate(&res).unwrap();
        let v = tensor_to_json(&res, &c);
        assert_eq!(tensor_from_json(&res, &v).unwrap(), c);
        let other = resolved(Family::Bs(3));
        assert!(matches!(tensor_from_json(&other, &v), Err(Error::WrongContext(_))));
    }

    #[test]
    fn search_on_free_group_and_empty_dictionary() {
        let res = resolved(Family::Free(2));
        let dict = build_dictionary(&res, DEFAULT_DICTIONARY_CAP).unwrap();
        let out = search_j2(&res, &dict, &BigInt::from(1)).unwrap();
        assert_eq!(out.status, SearchStatus::Ansatz);
        assert_eq!(out.candidate.unwrap(), builtin_candidate(&res).unwrap());
        let out = search_j2(&resolved(Family::Bs(2)), &[], &BigInt::from(1)).unwrap();
        assert_eq!(out.status, SearchStatus::EmptyDictionary);
        assert!(out.candidate.is_none());
    }

    #[test]
    fn linear_search_on_torus() {
        let res = resolved(Family::TorusKnot(2, 3));
        let dict = build_dictionary(&res, 60).unwrap();
        let out = search_j2_linear(&res, &dict, &BigInt::from(5)).unwrap();
        assert_eq!(out.status, SearchStatus::LinearSystem);
        assert!(verify_j2(&res, out.candidate.as_ref().unwrap()).unwrap().pass);
    }
}
