use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::word::{Letter, Word};
use crate::error::{Error, Result};

pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// A word in canonical normal form for some [`RewritingSystem`].
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElement(Word);

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement(Word::identity())
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Wraps a word the caller knows to be in normal form.
    pub(crate) fn from_normal_word(w: Word) -> Self {
        GroupElement(w)
    }
}

/// Total order on words used to orient rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordOrder {
    /// Length first, then lexicographic by the letter ranks.
    ShortLex { ranks: Vec<u32> },
    /// Two-level wreath order: compare the heavy-letter subsequences by shortlex,
    /// then the blocks of light letters between them, left to right, by shortlex.
    Wreath { ranks: Vec<u32>, heavy: Vec<bool> },
}

impl WordOrder {
    /// Shortlex with `g0 < g0^-1 < g1 < g1^-1 < ...`.
    pub fn shortlex_default(rank: usize) -> Self {
        WordOrder::ShortLex {
            ranks: (0..2 * rank as u32).collect(),
        }
    }

    /// Shortlex where generators are ranked in the given order, each followed by its inverse.
    pub fn shortlex_by_generators(order: &[usize]) -> Self {
        let mut ranks = vec![0u32; 2 * order.len()];
        for (pos, &g) in order.iter().enumerate() {
            ranks[Letter::new(g, false).index()] = 2 * pos as u32;
            ranks[Letter::new(g, true).index()] = 2 * pos as u32 + 1;
        }
        WordOrder::ShortLex { ranks }
    }

    fn shortlex(ranks: &[u32], u: &[Letter], v: &[Letter]) -> Ordering {
        u.len().cmp(&v.len()).then_with(|| {
            for (a, b) in u.iter().zip(v) {
                match ranks[a.index()].cmp(&ranks[b.index()]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }

    pub fn compare(&self, u: &Word, v: &Word) -> Ordering {
        match self {
            WordOrder::ShortLex { ranks } => Self::shortlex(ranks, u.letters(), v.letters()),
            WordOrder::Wreath { ranks, heavy } => {
                let is_heavy = |l: &Letter| heavy[l.index()];
                let hu: Vec<Letter> = u.letters().iter().copied().filter(is_heavy).collect();
                let hv: Vec<Letter> = v.letters().iter().copied().filter(is_heavy).collect();
                match Self::shortlex(ranks, &hu, &hv) {
                    Ordering::Equal => {}
                    o => return o,
                }
                let bu: Vec<&[Letter]> = u.letters().split(is_heavy).collect();
                let bv: Vec<&[Letter]> = v.letters().split(is_heavy).collect();
                for (x, y) in bu.iter().zip(&bv) {
                    match Self::shortlex(ranks, x, y) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

/// How words are brought to normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reducer {
    /// Rewriting by an ordered list of string rules.
    Rules(Vec<Rule>),
    /// `<a, t | t a t^-1 a^-m>`, generator 0 = `a`, 1 = `t`. Normal forms
    /// `t^-p a^k t^q` with `p, q >= 0` and `m ∤ k` whenever `p, q > 0`.
    BaumslagSolitar { m: i64 },
    /// `<a, b | a^m b^-n>`, generator 0 = `a`, 1 = `b`. Normal forms are an
    /// alternating product of syllables `a^i` (0<i<m), `b^j` (0<j<n), followed
    /// by a power of the central element `a^m`.
    TorusKnot { m: u32, n: u32 },
}

#[derive(Clone, Debug)]
pub struct RewritingSystem {
    rank: usize,
    reducer: Reducer,
    order: WordOrder,
    confluent: bool,
    step_budget: usize,
    /// Rules indexed by the last letter of their left-hand side.
    by_last: Vec<Vec<usize>>,
}

impl PartialEq for RewritingSystem {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.reducer == other.reducer && self.order == other.order
    }
}

impl RewritingSystem {
    /// Free reduction only: the free group on `rank` generators.
    pub fn free(rank: usize) -> Self {
        let mut rules = Vec::new();
        for g in 0..rank {
            for inv in [false, true] {
                let l = Letter::new(g, inv);
                rules.push(Rule {
                    lhs: Word::from_letters(vec![l, l.inverse()]),
                    rhs: Word::identity(),
                });
            }
        }
        let mut rs = Self::from_rules(rank, rules, WordOrder::shortlex_default(rank));
        rs.confluent = true;
        rs
    }

    /// Unverified rule system; call [`RewritingSystem::check_confluence`] to mark it.
    pub fn from_rules(rank: usize, rules: Vec<Rule>, order: WordOrder) -> Self {
        let mut by_last = vec![Vec::new(); 2 * rank];
        for (i, r) in rules.iter().enumerate() {
            if let Some(l) = r.lhs.letters().last() {
                by_last[l.index()].push(i);
            }
        }
        RewritingSystem {
            rank,
            reducer: Reducer::Rules(rules),
            order,
            confluent: false,
            step_budget: DEFAULT_STEP_BUDGET,
            by_last,
        }
    }

    pub fn baumslag_solitar(m: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("bs(m) needs m != 0".into()));
        }
        Ok(Self::dedicated(2, Reducer::BaumslagSolitar { m }))
    }

    pub fn torus_knot(m: u32, n: u32) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidParams("torus knot needs m, n >= 2".into()));
        }
        Ok(Self::dedicated(2, Reducer::TorusKnot { m, n }))
    }

    fn dedicated(rank: usize, reducer: Reducer) -> Self {
        RewritingSystem {
            rank,
            reducer,
            order: WordOrder::shortlex_default(rank),
            // dedicated reducers compute a canonical form directly
            confluent: true,
            step_budget: DEFAULT_STEP_BUDGET,
            by_last: vec![Vec::new(); 2 * rank],
        }
    }

    pub fn with_step_budget(mut self, budget: usize) -> Self {
        self.step_budget = budget;
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }

    pub fn order(&self) -> &WordOrder {
        &self.order
    }

    pub fn is_confluent(&self) -> bool {
        self.confluent
    }

    pub fn rules(&self) -> &[Rule] {
        match &self.reducer {
            Reducer::Rules(r) => r,
            _ => &[],
        }
    }

    /// Every rule is strictly decreasing in the declared order.
    pub fn rules_are_decreasing(&self) -> bool {
        self.rules()
            .iter()
            .all(|r| self.order.compare(&r.lhs, &r.rhs) == Ordering::Greater)
    }

    pub fn normal_form(&self, w: &Word) -> Result<GroupElement> {
        if !self.confluent {
            return Err(Error::NotConfluent(
                "normal forms requested from an unverified system".into(),
            ));
        }
        self.reduce_word(w).map(GroupElement)
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        if b.is_identity() {
            return Ok(a.clone());
        }
        if a.is_identity() {
            return Ok(b.clone());
        }
        self.normal_form(&a.0.concat(&b.0))
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.normal_form(&a.0.inverse())
    }

    pub fn generator(&self, g: usize, exponent: i32) -> Result<GroupElement> {
        self.normal_form(&Word::letter(g, exponent))
    }

    fn reduce_word(&self, w: &Word) -> Result<Word> {
        match &self.reducer {
            Reducer::Rules(rules) => self.reduce_by_rules(rules, w),
            Reducer::BaumslagSolitar { m } => Ok(BsCoords::of_word(*m, w).to_word()),
            Reducer::TorusKnot { m, n } => {
                let mut s = TorusState::default();
                for &l in w.letters() {
                    s.push(*m, *n, l);
                }
                Ok(s.to_word(*m))
            }
        }
    }

    fn reduce_by_rules(&self, rules: &[Rule], w: &Word) -> Result<Word> {
        let mut input: VecDeque<Letter> = w.letters().iter().copied().collect();
        let mut out: Vec<Letter> = Vec::with_capacity(w.len());
        let mut steps = 0usize;
        'outer: while let Some(l) = input.pop_front() {
            out.push(l);
            for &ri in &self.by_last[l.index()] {
                let lhs = rules[ri].lhs.letters();
                if lhs.len() <= out.len() && out[out.len() - lhs.len()..] == *lhs {
                    steps += 1;
                    if steps > self.step_budget {
                        return Err(Error::StepBudget(self.step_budget));
                    }
                    out.truncate(out.len() - lhs.len());
                    for &r in rules[ri].rhs.letters().iter().rev() {
                        input.push_front(r);
                    }
                    continue 'outer;
                }
            }
        }
        Ok(Word::from_letters(out))
    }

    /// Resolves every critical pair (suffix/prefix overlaps and inclusions) of a
    /// rule system. Dedicated reducers are checked on all words up to `max_len`
    /// against the given relators instead. Marks the system confluent on success.
    pub fn check_confluence(&mut self, relators: &[Word], max_len: usize) -> Result<bool> {
        let ok = match &self.reducer {
            Reducer::Rules(rules) => {
                let rules = rules.clone();
                let mut ok = true;
                'pairs: for r1 in &rules {
                    for r2 in &rules {
                        for (a, b) in critical_pairs(r1, r2) {
                            if self.reduce_by_rules(&rules, &a)? != self.reduce_by_rules(&rules, &b)? {
                                ok = false;
                                break 'pairs;
                            }
                        }
                    }
                }
                ok
            }
            _ => self.bounded_soundness(relators, max_len)?,
        };
        self.confluent = ok;
        Ok(ok)
    }

    fn bounded_soundness(&self, relators: &[Word], max_len: usize) -> Result<bool> {
        let words = all_words(self.rank, max_len);
        for w in &words {
            let nf = self.reduce_word(w)?;
            if self.reduce_word(&nf)? != nf {
                return Ok(false);
            }
            for g in 0..self.rank {
                for inv in [false, true] {
                    let l = Letter::new(g, inv);
                    let mut lw = nf.clone();
                    lw.push(l);
                    lw.push(l.inverse());
                    if self.reduce_word(&lw)? != nf {
                        return Ok(false);
                    }
                }
            }
            for r in relators {
                if self.reduce_word(&w.concat(r))? != nf || self.reduce_word(&r.concat(w))? != nf {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn critical_pairs(r1: &Rule, r2: &Rule) -> Vec<(Word, Word)> {
    let l1 = r1.lhs.letters();
    let l2 = r2.lhs.letters();
    let mut out = Vec::new();
    // suffix of l1 = prefix of l2
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            let a = r1.rhs.concat(&Word::from_letters(l2[k..].to_vec()));
            let b = Word::from_letters(l1[..l1.len() - k].to_vec()).concat(&r2.rhs);
            out.push((a, b));
        }
    }
    // l2 inside l1
    if l2.len() < l1.len() || (l2.len() == l1.len() && r1 != r2) {
        for start in 0..=(l1.len() - l2.len()) {
            if l1[start..start + l2.len()] == *l2 {
                let b = Word::from_letters(l1[..start].to_vec())
                    .concat(&r2.rhs)
                    .concat(&Word::from_letters(l1[start + l2.len()..].to_vec()));
                out.push((r1.rhs.clone(), b));
            }
        }
    }
    out
}

/// All words over `rank` generators of length at most `max_len` (not reduced).
pub(crate) fn all_words(rank: usize, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..rank {
                for inv in [false, true] {
                    let mut v = w.clone();
                    v.push(Letter::new(g, inv));
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Caps for bounded Knuth–Bendix completion.
#[derive(Clone, Copy, Debug)]
pub struct CompletionLimits {
    pub max_rules: usize,
    pub max_lhs_len: usize,
    pub max_rounds: usize,
}

impl Default for CompletionLimits {
    fn default() -> Self {
        CompletionLimits {
            max_rules: 500,
            max_lhs_len: 24,
            max_rounds: 50,
        }
    }
}

/// Bounded Knuth–Bendix completion of the group presentation under `order`.
/// Fails with [`Error::NotConfluent`] when a cap is hit.
pub fn knuth_bendix(
    rank: usize,
    relators: &[Word],
    order: WordOrder,
    limits: CompletionLimits,
) -> Result<RewritingSystem> {
    let mut pending: Vec<(Word, Word)> = Vec::new();
    for g in 0..rank {
        for inv in [false, true] {
            let l = Letter::new(g, inv);
            pending.push((Word::from_letters(vec![l, l.inverse()]), Word::identity()));
        }
    }
    for r in relators {
        pending.push((r.free_reduce(), Word::identity()));
    }
    let mut rules: Vec<Rule> = Vec::new();

    let build = |rules: &[Rule]| {
        let mut rs = RewritingSystem::from_rules(rank, rules.to_vec(), order.clone());
        rs.step_budget = DEFAULT_STEP_BUDGET;
        rs
    };

    for _round in 0..limits.max_rounds {
        while let Some((u, v)) = pending.pop() {
            let rs = build(&rules);
            let u = rs.reduce_by_rules(&rules, &u)?;
            let v = rs.reduce_by_rules(&rules, &v)?;
            if u == v {
                continue;
            }
            let (lhs, rhs) = match order.compare(&u, &v) {
                Ordering::Greater => (u, v),
                _ => (v, u),
            };
            if lhs.len() > limits.max_lhs_len || rules.len() >= limits.max_rules {
                return Err(Error::NotConfluent(format!(
                    "completion exceeded caps ({} rules, lhs length {})",
                    rules.len(),
                    lhs.len()
                )));
            }
            // interreduce: rules whose lhs contains the new lhs go back to pending
            let new_rule = Rule { lhs, rhs };
            let mut kept = Vec::with_capacity(rules.len() + 1);
            for r in rules.drain(..) {
                if contains(&r.lhs, &new_rule.lhs) {
                    pending.push((r.lhs, r.rhs));
                } else {
                    kept.push(r);
                }
            }
            kept.push(new_rule);
            let rs = build(&kept);
            for r in kept.iter_mut() {
                r.rhs = rs.reduce_by_rules(rs.rules(), &r.rhs)?;
            }
            rules = kept;
        }
        let rs = build(&rules);
        let mut found = BTreeSet::new();
        for r1 in &rules {
            for r2 in &rules {
                for (a, b) in critical_pairs(r1, r2) {
                    let a = rs.reduce_by_rules(&rules, &a)?;
                    let b = rs.reduce_by_rules(&rules, &b)?;
                    if a != b {
                        found.insert((a, b));
                    }
                }
            }
        }
        if found.is_empty() {
            rules.sort_by(|x, y| order.compare(&x.lhs, &y.lhs));
            let mut rs = build(&rules);
            rs.confluent = true;
            return Ok(rs);
        }
        pending.extend(found);
    }
    Err(Error::NotConfluent(format!(
        "no completion within {} rounds",
        limits.max_rounds
    )))
}

fn contains(hay: &Word, needle: &Word) -> bool {
    let h = hay.letters();
    let n = needle.letters();
    n.len() <= h.len() && h.windows(n.len()).any(|w| w == n)
}

/// Coordinates of an element of `Z[1/m] ⋊ Z`: `(num / m^den, shift)`, where
/// `a = (1, 0)` and `t = (0, 1)` acts by multiplication by `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BsCoords {
    pub m: i64,
    pub num: BigInt,
    pub den: u32,
    pub shift: i64,
}

impl BsCoords {
    pub fn identity(m: i64) -> Self {
        BsCoords {
            m,
            num: BigInt::zero(),
            den: 0,
            shift: 0,
        }
    }

    pub fn of_word(m: i64, w: &Word) -> Self {
        let mut c = BsCoords::identity(m);
        for &l in w.letters() {
            c.push(l);
        }
        c
    }

    fn mpow(&self, e: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.m), e as usize)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = 0;
            return;
        }
        if self.m.abs() == 1 {
            self.den = 0;
            return;
        }
        let m = BigInt::from(self.m);
        while self.den > 0 && self.num.is_multiple_of(&m) {
            self.num /= &m;
            self.den -= 1;
        }
    }

    fn push(&mut self, l: Letter) {
        if l.generator() == 1 {
            self.shift += l.exponent() as i64;
            return;
        }
        let eps = BigInt::from(l.exponent());
        if self.m.abs() == 1 {
            let sign = if self.m == -1 && self.shift.rem_euclid(2) == 1 { -1 } else { 1 };
            self.num += eps * sign;
            return;
        }
        if self.shift >= 0 {
            let add = self.mpow(self.shift as u32 + self.den);
            self.num += eps * add;
        } else {
            let need = (-self.shift) as u32;
            if need > self.den {
                self.num *= self.mpow(need - self.den);
                self.den = need;
            }
            let add = self.mpow(self.den - need);
            self.num += eps * add;
        }
        self.normalize();
    }

    /// `t^-p a^k t^q` with `p = max(den, -shift)`.
    pub fn to_word(&self) -> Word {
        let p = (self.den as i64).max(-self.shift).max(0);
        let k = &self.num * self.mpow((p - self.den as i64) as u32);
        let q = self.shift + p;
        let mut letters = Word::power(1, -p).into_letters();
        let kk = k.abs().to_u64().expect("exponent too large for a word");
        letters.extend(std::iter::repeat_n(Letter::new(0, k.is_negative()), kk as usize));
        letters.extend(Word::power(1, q).into_letters());
        Word::from_letters(letters)
    }

    /// `x = num / m^den` as the pair, and the `t`-shift.
    pub fn from_parts(m: i64, num: BigInt, den: u32, shift: i64) -> Self {
        let mut c = BsCoords { m, num, den, shift };
        c.normalize();
        c
    }
}

/// Syllable stack for the amalgam `Z *_Z Z`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct TorusState {
    /// `(is_b, exponent)` with `0 < exponent < m` (or `< n`), alternating.
    pub syllables: Vec<(bool, u32)>,
    pub central: i64,
}

impl TorusState {
    pub fn push(&mut self, m: u32, n: u32, l: Letter) {
        let is_b = l.generator() == 1;
        let order = if is_b { n } else { m };
        let top = self.syllables.last().copied();
        match (top, l.is_inverse()) {
            (Some((b, e)), false) if b == is_b => {
                if e + 1 == order {
                    self.syllables.pop();
                    self.central += 1;
                } else {
                    self.syllables.last_mut().unwrap().1 = e + 1;
                }
            }
            (Some((b, e)), true) if b == is_b => {
                if e == 1 {
                    self.syllables.pop();
                } else {
                    self.syllables.last_mut().unwrap().1 = e - 1;
                }
            }
            (_, false) => self.syllables.push((is_b, 1)),
            (_, true) => {
                self.syllables.push((is_b, order - 1));
                self.central -= 1;
            }
        }
    }

    pub fn of_word(m: u32, n: u32, w: &Word) -> Self {
        let mut s = TorusState::default();
        for &l in w.letters() {
            s.push(m, n, l);
        }
        s
    }

    pub fn to_word(&self, m: u32) -> Word {
        let mut letters = Vec::new();
        let k = self.central * m as i64;
        let last = self.syllables.len().saturating_sub(1);
        for (i, &(is_b, e)) in self.syllables.iter().enumerate() {
            let g = is_b as usize;
            if i == last && !is_b {
                // merge the trailing a-syllable with the central power
                letters.extend(Word::power(0, e as i64 + k).into_letters());
                return Word::from_letters(letters);
            }
            letters.extend(Word::power(g, e as i64).into_letters());
        }
        letters.extend(Word::power(0, k).into_letters());
        Word::from_letters(letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        // a=0 A, t/b=1 T/B, more letters c,d...
        s.chars()
            .map(|c| {
                let g = (c.to_ascii_lowercase() as u8 - b'a') as usize;
                let g = match c.to_ascii_lowercase() {
                    't' => 1,
                    'x' => 0,
                    _ => g,
                };
                Letter::new(g, c.is_uppercase())
            })
            .collect()
    }

    #[test]
    fn bs_conjugation_rule() {
        let rs = RewritingSystem::baumslag_solitar(2).unwrap();
        let nf = rs.normal_form(&w("taT")).unwrap();
        assert_eq!(nf.word(), &w("aa"));
        let nf = rs.normal_form(&w("TaaT")).unwrap();
        // t^-1 a^2 t^-1 = a t^-2
        assert_eq!(nf, rs.normal_form(&w("aTT")).unwrap());
        assert_eq!(rs.normal_form(&w("Tat")).unwrap().word(), &w("Tat"));
    }

    #[test]
    fn bs_normal_form_shape() {
        for m in [2i64, 3, -2] {
            let rs = RewritingSystem::baumslag_solitar(m).unwrap();
            for word in all_words(2, 6) {
                let g = rs.normal_form(&word).unwrap();
                let l = g.word().letters();
                let p = l.iter().take_while(|x| x.generator() == 1 && x.is_inverse()).count();
                let q = l.iter().rev().take_while(|x| x.generator() == 1 && !x.is_inverse()).count();
                let mid = &l[p..l.len() - q];
                assert!(mid.iter().all(|x| x.generator() == 0));
                assert!(mid.windows(2).all(|x| x[0] == x[1]));
                if p > 0 && q > 0 {
                    assert!(mid.len() as i64 % m != 0, "{word:?} -> {g:?}");
                }
            }
        }
    }

    #[test]
    fn torus_knot_central_element() {
        let rs = RewritingSystem::torus_knot(2, 3).unwrap();
        let c = rs.normal_form(&w("aa")).unwrap();
        assert_eq!(c, rs.normal_form(&w("bbb")).unwrap());
        assert_eq!(rs.normal_form(&w("abAB")).unwrap().word(), &w("ababbAAAA"));
        // a^2 commutes with b
        assert_eq!(
            rs.normal_form(&w("aab")).unwrap(),
            rs.normal_form(&w("baa")).unwrap()
        );
        assert!(rs.normal_form(&w("aaBBB")).unwrap().is_identity());
    }

    #[test]
    fn free_reduction_system_is_confluent() {
        let mut rs = RewritingSystem::free(2);
        assert!(rs.check_confluence(&[], 0).unwrap());
        assert!(rs.normal_form(&w("abBA")).unwrap().is_identity());
    }

    #[test]
    fn knuth_bendix_completes_z_squared() {
        let rel = w("abAB");
        let rs = knuth_bendix(2, &[rel], WordOrder::shortlex_default(2), CompletionLimits::default())
            .unwrap();
        assert_eq!(rs.rules().len(), 8);
        assert!(rs.rules_are_decreasing());
        assert_eq!(rs.normal_form(&w("ba")).unwrap().word(), &w("ab"));
    }

    #[test]
    fn knuth_bendix_reports_failure_under_caps() {
        let limits = CompletionLimits {
            max_rules: 20,
            max_lhs_len: 8,
            max_rounds: 5,
        };
        let e = knuth_bendix(2, &[w("aaBBB")], WordOrder::shortlex_default(2), limits).unwrap_err();
        assert!(matches!(e, Error::NotConfluent(_)));
    }

    #[test]
    fn step_budget_is_enforced() {
        // a -> aa is not terminating; the system is flagged confluent by hand to reach the budget
        let rules = vec![Rule {
            lhs: w("a"),
            rhs: w("aa"),
        }];
        let mut rs = RewritingSystem::from_rules(1, rules, WordOrder::shortlex_default(1))
            .with_step_budget(100);
        rs.confluent = true;
        assert_eq!(rs.normal_form(&w("a")).unwrap_err(), Error::StepBudget(100));
    }

    #[test]
    fn unverified_system_refuses_normal_forms() {
        let rs = RewritingSystem::from_rules(1, vec![], WordOrder::shortlex_default(1));
        assert!(matches!(rs.normal_form(&w("a")), Err(Error::NotConfluent(_))));
    }

    #[test]
    fn wreath_order_orients_bs2_alternative_rules() {
        let order = WordOrder::Wreath {
            ranks: vec![0, 1, 2, 3],
            heavy: vec![false, false, true, true],
        };
        assert_eq!(order.compare(&w("aat"), &w("ta")), Ordering::Greater);
        assert_eq!(order.compare(&w("At"), &w("atA")), Ordering::Greater);
        assert_eq!(order.compare(&w("aT"), &w("Taa")), Ordering::Greater);
    }
}
