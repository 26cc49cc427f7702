use std::fmt;

use super::rewriting::{knuth_bendix, CompletionLimits, RewritingSystem, Rule, WordOrder};
use super::word::{Letter, Word};
use super::Presentation;
use crate::error::{Error, Result};
use crate::groupring::OrientationChar;

/// Built-in example families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Free group of the given rank.
    Free(usize),
    /// `F(X) × Z` with `|X|` free generators.
    FreeByZ(usize),
    /// `<a, b | a^m b^-n>`.
    TorusKnot(u32, u32),
    /// Orientable surface group of the given genus.
    Surface(usize),
    /// `Z[1/m] ⋊ Z = <a, t | t a t^-1 a^-m>`.
    Bs(i64),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Free(_) => "free",
            Family::FreeByZ(_) => "freeByZ",
            Family::TorusKnot(..) => "torusKnot",
            Family::Surface(_) => "surface",
            Family::Bs(_) => "bs",
        }
    }

    pub fn params(&self) -> Vec<i64> {
        match *self {
            Family::Free(r) | Family::FreeByZ(r) | Family::Surface(r) => vec![r as i64],
            Family::TorusKnot(m, n) => vec![m as i64, n as i64],
            Family::Bs(m) => vec![m],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::FreeByZ(0) => Err(Error::InvalidParams("freeByZ needs |X| >= 1".into())),
            Family::TorusKnot(m, n) if m < 2 || n < 2 => {
                Err(Error::InvalidParams("torusKnot needs m, n >= 2".into()))
            }
            Family::Surface(0) => Err(Error::InvalidParams("surface needs genus >= 1".into())),
            Family::Bs(0) => Err(Error::InvalidParams("bs needs m != 0".into())),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.params().iter().map(|x| x.to_string()).collect();
        write!(f, "{}({})", self.name(), p.join(","))
    }
}

/// A built-in group together with its verified normal forms.
#[derive(Clone, Debug)]
pub struct FamilyContext {
    family: Family,
    presentation: Presentation,
    rewriting: RewritingSystem,
}

impl PartialEq for FamilyContext {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.presentation == other.presentation
            && self.rewriting == other.rewriting
    }
}

fn numbered(prefix: &str, count: usize) -> Vec<String> {
    if count == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=count).map(|i| format!("{prefix}{i}")).collect()
    }
}

fn commutator(x: usize, y: usize) -> Vec<Letter> {
    vec![
        Letter::new(x, false),
        Letter::new(y, false),
        Letter::new(x, true),
        Letter::new(y, true),
    ]
}

const BOUNDED_CHECK_LEN: usize = 4;

/// Builds a built-in family with the trivial orientation character.
pub fn builtin_family(family: Family) -> Result<FamilyContext> {
    family.validate()?;
    let (names, relators, rewriting) = match family {
        Family::Free(r) => (numbered("x", r), vec![], RewritingSystem::free(r)),
        Family::FreeByZ(k) => {
            let mut names = vec!["t".to_string()];
            names.extend(numbered("x", k));
            let relators: Vec<Word> = (1..=k)
                .map(|x| Word::from_letters(commutator(0, x)))
                .collect();
            let order: Vec<usize> = (1..=k).chain(std::iter::once(0)).collect();
            let rs = knuth_bendix(
                k + 1,
                &relators,
                WordOrder::shortlex_by_generators(&order),
                CompletionLimits::default(),
            )?;
            (names, relators, rs)
        }
        Family::TorusKnot(m, n) => {
            let rel = Word::power(0, m as i64).concat(&Word::power(1, -(n as i64)));
            let mut rs = RewritingSystem::torus_knot(m, n)?;
            verify_bounded(&mut rs, &rel)?;
            (vec!["a".into(), "b".into()], vec![rel], rs)
        }
        Family::Surface(g) => {
            let names = surface_names(g);
            let mut rel = Vec::new();
            for i in 0..g {
                rel.extend(commutator(2 * i, 2 * i + 1));
            }
            let rel = Word::from_letters(rel);
            let order: Vec<usize> = (0..g).map(|i| 2 * i).chain((0..g).map(|i| 2 * i + 1)).collect();
            let limits = CompletionLimits {
                max_rules: 4000,
                max_lhs_len: 4 * g + 2,
                max_rounds: 100,
            };
            let rs = knuth_bendix(
                2 * g,
                std::slice::from_ref(&rel),
                WordOrder::shortlex_by_generators(&order),
                limits,
            )?;
            (names, vec![rel], rs)
        }
        Family::Bs(m) => {
            let rel = Word::from_letters(vec![
                Letter::new(1, false),
                Letter::new(0, false),
                Letter::new(1, true),
            ])
            .concat(&Word::power(0, -m));
            let mut rs = RewritingSystem::baumslag_solitar(m)?;
            verify_bounded(&mut rs, &rel)?;
            (vec!["a".into(), "t".into()], vec![rel], rs)
        }
    };
    let rank = names.len();
    let presentation = Presentation::new(names, relators, OrientationChar::trivial(rank))?;
    Ok(FamilyContext {
        family,
        presentation,
        rewriting,
    })
}

fn verify_bounded(rs: &mut RewritingSystem, rel: &Word) -> Result<()> {
    if !rs.check_confluence(std::slice::from_ref(rel), BOUNDED_CHECK_LEN)? {
        return Err(Error::Inconsistent(
            "dedicated reducer failed its bounded soundness check".into(),
        ));
    }
    Ok(())
}

fn surface_names(g: usize) -> Vec<String> {
    if 2 * g <= 26 {
        (0..2 * g).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=g)
            .flat_map(|i| [format!("a{i}"), format!("b{i}")])
            .collect()
    }
}

impl FamilyContext {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn rewriting(&self) -> &RewritingSystem {
        &self.rewriting
    }

    pub fn orientation(&self) -> &OrientationChar {
        self.presentation.orientation()
    }

    /// Same group with orientation character `w`; fails if `w` is `-1` on a relator.
    pub fn with_orientation(&self, w: OrientationChar) -> Result<Self> {
        Ok(FamilyContext {
            family: self.family,
            presentation: self.presentation.with_orientation(w)?,
            rewriting: self.rewriting.clone(),
        })
    }

    /// Swaps in another confluent system for the same group.
    pub fn with_rewriting(&self, rs: RewritingSystem) -> Result<Self> {
        if rs.rank() != self.presentation.rank() {
            return Err(Error::InvalidParams(format!(
                "system has rank {} but the presentation has {} generators",
                rs.rank(),
                self.presentation.rank()
            )));
        }
        if !rs.is_confluent() {
            return Err(Error::NotConfluent("replacement system is not verified".into()));
        }
        for r in self.presentation.relators() {
            if !rs.normal_form(r)?.is_identity() {
                return Err(Error::Inconsistent(format!(
                    "relator `{}` is not trivial under the replacement system",
                    self.presentation.format_word(r)
                )));
            }
        }
        Ok(FamilyContext {
            family: self.family,
            presentation: self.presentation.clone(),
            rewriting: rs,
        })
    }

    /// Whether a closed-form degree-2 diagonal term is shipped for this context.
    pub fn has_builtin_candidate(&self) -> bool {
        match self.family {
            Family::Free(_) => true,
            Family::Surface(g) => g == 2 && self.orientation().is_trivial(),
            _ => self.orientation().is_trivial(),
        }
    }
}

/// A second confluent system for `bs(2)`, oriented by a wreath order with `t`
/// heavy. Its normal forms differ from the dedicated reducer's.
pub fn bs2_wreath_system() -> Result<RewritingSystem> {
    let a = Letter::new(0, false);
    let t = Letter::new(1, false);
    let (aa, ta) = (a.inverse(), t.inverse());
    let w = |ls: &[Letter]| Word::from_letters(ls.to_vec());
    let rules = vec![
        Rule { lhs: w(&[a, aa]), rhs: w(&[]) },
        Rule { lhs: w(&[aa, a]), rhs: w(&[]) },
        Rule { lhs: w(&[t, ta]), rhs: w(&[]) },
        Rule { lhs: w(&[ta, t]), rhs: w(&[]) },
        Rule { lhs: w(&[a, a, t]), rhs: w(&[t, a]) },
        Rule { lhs: w(&[aa, t]), rhs: w(&[a, t, aa]) },
        Rule { lhs: w(&[a, ta]), rhs: w(&[ta, a, a]) },
        Rule { lhs: w(&[aa, ta]), rhs: w(&[ta, aa, aa]) },
    ];
    let order = WordOrder::Wreath {
        ranks: vec![0, 1, 2, 3],
        heavy: vec![false, false, true, true],
    };
    let mut rs = RewritingSystem::from_rules(2, rules, order);
    if !rs.rules_are_decreasing() || !rs.check_confluence(&[], 0)? {
        return Err(Error::NotConfluent("wreath system for bs(2)".into()));
    }
    Ok(rs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_genus_two_matches_the_standard_presentation() {
        let ctx = builtin_family(Family::Surface(2)).unwrap();
        let p = ctx.presentation();
        assert_eq!(p.format_word(&p.relators()[0]), "a b a^-1 b^-1 c d c^-1 d^-1");
        assert!(ctx.rewriting().is_confluent());
        assert_eq!(ctx.rewriting().rules().len(), 16);
        assert!(ctx.rewriting().rules_are_decreasing());
    }

    #[test]
    fn free_by_z_commutes() {
        let ctx = builtin_family(Family::FreeByZ(1)).unwrap();
        let p = ctx.presentation();
        let w = p.parse_word("t x t^-1 x^-1").unwrap();
        assert!(ctx.rewriting().normal_form(&w).unwrap().is_identity());
        let ctx = builtin_family(Family::FreeByZ(2)).unwrap();
        let p = ctx.presentation();
        let u = p.parse_word("t x1 x2").unwrap();
        let v = p.parse_word("x1 x2 t").unwrap();
        let rs = ctx.rewriting();
        assert_eq!(rs.normal_form(&u).unwrap(), rs.normal_form(&v).unwrap());
        let u = p.parse_word("x1 x2").unwrap();
        let v = p.parse_word("x2 x1").unwrap();
        assert_ne!(rs.normal_form(&u).unwrap(), rs.normal_form(&v).unwrap());
    }

    #[test]
    fn bs_presentation_and_normal_form() {
        let ctx = builtin_family(Family::Bs(2)).unwrap();
        let p = ctx.presentation();
        assert_eq!(p.format_word(&p.relators()[0]), "t a t^-1 a^-1 a^-1");
        let nf = ctx.rewriting().normal_form(&p.parse_word("t a t^-1").unwrap()).unwrap();
        assert_eq!(p.format_word(nf.word()), "a a");
    }

    #[test]
    fn free_family_has_no_relators() {
        let ctx = builtin_family(Family::Free(3)).unwrap();
        assert!(ctx.presentation().relators().is_empty());
        assert_eq!(ctx.rewriting().rules().len(), 6);
    }

    #[test]
    fn invalid_params_are_rejected() {
        for f in [Family::Bs(0), Family::TorusKnot(1, 3), Family::Surface(0), Family::FreeByZ(0)] {
            assert!(matches!(builtin_family(f), Err(Error::InvalidParams(_))));
        }
    }

    #[test]
    fn wreath_system_agrees_with_dedicated_reducer_on_equality() {
        let alt = bs2_wreath_system().unwrap();
        let ctx = builtin_family(Family::Bs(2)).unwrap();
        let words = super::super::rewriting::all_words(2, 5);
        let ded: Vec<_> = words.iter().map(|w| ctx.rewriting().normal_form(w).unwrap()).collect();
        let wr: Vec<_> = words.iter().map(|w| alt.normal_form(w).unwrap()).collect();
        for i in 0..words.len() {
            for j in (i + 1)..words.len().min(i + 40) {
                assert_eq!(ded[i] == ded[j], wr[i] == wr[j]);
            }
        }
        assert!(ctx.with_rewriting(alt).is_ok());
    }
}
