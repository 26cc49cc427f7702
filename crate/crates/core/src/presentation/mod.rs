//! Finite presentations, words and canonical normal forms.
//!
//! The file format is line oriented:
//!
//! ```text
//! # Baumslag-Solitar group Z*_2
//! gens a t
//! rel t a t^-1 a^-2
//! w a:+ t:+
//! ```
//!
//! `g^k` is sugar for `|k|` copies of `g` or `g^-1`. A missing `w` line means
//! the trivial orientation character.

mod family;
mod rewriting;
mod word;

pub use family::{bs2_wreath_system, builtin_family, Family, FamilyContext};
pub(crate) use rewriting::{BsCoords, TorusState};
pub use rewriting::{
    knuth_bendix, CompletionLimits, GroupElement, Reducer, RewritingSystem, Rule, WordOrder,
    DEFAULT_STEP_BUDGET,
};
pub use word::{format_word, Letter, Word};

use crate::error::{Error, Result};
use crate::groupring::OrientationChar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<String>,
    relators: Vec<Word>,
    orientation: OrientationChar,
}

impl Presentation {
    /// Validates the invariants: relators freely reduced and nontrivial, symbols
    /// declared, and `w(r) = +1` on every relator.
    pub fn new(
        generators: Vec<String>,
        relators: Vec<Word>,
        orientation: OrientationChar,
    ) -> Result<Self> {
        if orientation.rank() != generators.len() {
            return Err(Error::InvalidParams(format!(
                "orientation has {} entries for {} generators",
                orientation.rank(),
                generators.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for g in &generators {
            if !seen.insert(g.as_str()) {
                return Err(Error::InvalidParams(format!("generator `{g}` declared twice")));
            }
        }
        let mut reduced = Vec::with_capacity(relators.len());
        for r in relators {
            if r.max_generator().is_some_and(|g| g >= generators.len()) {
                return Err(Error::InvalidParams("relator uses an undeclared generator".into()));
            }
            let r = r.free_reduce();
            if r.is_empty() {
                return Err(Error::TrivialRelator { line: 0 });
            }
            if orientation.of_word(&r) != 1 {
                return Err(Error::OrientationOnRelator {
                    relator: format_word(&r, &generators),
                });
            }
            reduced.push(r);
        }
        Ok(Presentation {
            generators,
            relators: reduced,
            orientation,
        })
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn orientation(&self) -> &OrientationChar {
        &self.orientation
    }

    /// Same group with a different orientation character.
    pub fn with_orientation(&self, w: OrientationChar) -> Result<Self> {
        Presentation::new(self.generators.clone(), self.relators.clone(), w)
    }

    pub fn generator_index(&self, symbol: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == symbol)
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word(w, &self.generators)
    }

    /// Parses a word in the whitespace-token syntax (`1` is the empty word).
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word_tokens(text, &self.generators, 1, 1)
    }

    /// Serializes in the presentation file format; parsing the output gives back `self`.
    pub fn to_file_string(&self) -> String {
        let mut s = format!("gens {}\n", self.generators.join(" "));
        for r in &self.relators {
            s.push_str(&format!("rel {}\n", self.format_word(r)));
        }
        let w: Vec<String> = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let sign = if self.orientation.value(i) == 1 { '+' } else { '-' };
                format!("{g}:{sign}")
            })
            .collect();
        if !w.is_empty() {
            s.push_str(&format!("w {}\n", w.join(" ")));
        }
        s
    }
}

fn parse_word_tokens(text: &str, gens: &[String], line: usize, col0: usize) -> Result<Word> {
    let mut letters = Vec::new();
    let mut offset = 0;
    for token in text.split_whitespace() {
        let pos = text[offset..].find(token).map(|p| p + offset).unwrap_or(offset);
        offset = pos + token.len();
        let column = col0 + pos;
        if token == "1" {
            continue;
        }
        let (sym, exp) = match token.split_once('^') {
            Some((s, e)) => {
                let k: i64 = e.parse().map_err(|_| Error::Syntax {
                    line,
                    column: column + s.len() + 1,
                    message: format!("bad exponent `{e}`"),
                })?;
                (s, k)
            }
            None => (token, 1),
        };
        if sym.is_empty() {
            return Err(Error::Syntax {
                line,
                column,
                message: "missing generator before `^`".into(),
            });
        }
        let g = gens
            .iter()
            .position(|x| x == sym)
            .ok_or_else(|| Error::UndeclaredGenerator {
                symbol: sym.to_string(),
                line,
                column,
            })?;
        letters.extend(Word::power(g, exp).into_letters());
    }
    Ok(Word::from_letters(letters))
}

fn is_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses the presentation file format.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut gens: Option<Vec<String>> = None;
    let mut relators: Vec<(usize, Word)> = Vec::new();
    let mut orientation: Option<(usize, Vec<(String, i8, usize)>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let (directive, rest) = match trimmed.find(char::is_whitespace) {
            Some(p) => (&trimmed[..p], &trimmed[p..]),
            None => (trimmed, ""),
        };
        let rest_col = indent + directive.len() + 1;
        match directive {
            "gens" => {
                if gens.is_some() {
                    return Err(Error::Syntax {
                        line: line_no,
                        column: indent + 1,
                        message: "duplicate `gens` directive".into(),
                    });
                }
                let mut list = Vec::new();
                for tok in rest.split_whitespace() {
                    if !is_symbol(tok) {
                        let col = rest_col + rest.find(tok).unwrap_or(0);
                        return Err(Error::Syntax {
                            line: line_no,
                            column: col,
                            message: format!("invalid generator symbol `{tok}`"),
                        });
                    }
                    if list.iter().any(|g| g == tok) {
                        return Err(Error::Syntax {
                            line: line_no,
                            column: rest_col + rest.find(tok).unwrap_or(0),
                            message: format!("generator `{tok}` declared twice"),
                        });
                    }
                    list.push(tok.to_string());
                }
                gens = Some(list);
            }
            "rel" => {
                let g = gens.as_ref().ok_or_else(|| Error::Syntax {
                    line: line_no,
                    column: indent + 1,
                    message: "`rel` before `gens`".into(),
                })?;
                if rest.trim() == "(none)" {
                    continue;
                }
                let w = parse_word_tokens(rest, g, line_no, rest_col)?;
                let w = w.free_reduce();
                if w.is_empty() {
                    return Err(Error::TrivialRelator { line: line_no });
                }
                relators.push((line_no, w));
            }
            "w" => {
                if orientation.is_some() {
                    return Err(Error::Syntax {
                        line: line_no,
                        column: indent + 1,
                        message: "duplicate `w` directive".into(),
                    });
                }
                let mut entries = Vec::new();
                let mut offset = 0;
                for tok in rest.split_whitespace() {
                    let pos = rest[offset..].find(tok).map(|p| p + offset).unwrap_or(offset);
                    offset = pos + tok.len();
                    let col = rest_col + pos;
                    let (sym, sign) = tok.split_once(':').ok_or_else(|| Error::Syntax {
                        line: line_no,
                        column: col,
                        message: format!("expected `sym:+` or `sym:-`, found `{tok}`"),
                    })?;
                    let s = match sign {
                        "+" | "+1" => 1,
                        "-" | "-1" => -1,
                        _ => {
                            return Err(Error::Syntax {
                                line: line_no,
                                column: col + sym.len() + 1,
                                message: format!("bad sign `{sign}`"),
                            })
                        }
                    };
                    entries.push((sym.to_string(), s, col));
                }
                orientation = Some((line_no, entries));
            }
            other => {
                return Err(Error::Syntax {
                    line: line_no,
                    column: indent + 1,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }

    let gens = gens.ok_or_else(|| Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `gens` directive".into(),
    })?;
    let mut w = vec![1i8; gens.len()];
    if let Some((line_no, entries)) = orientation {
        let mut set = vec![false; gens.len()];
        for (sym, s, col) in entries {
            let i = gens
                .iter()
                .position(|g| *g == sym)
                .ok_or_else(|| Error::UndeclaredGenerator {
                    symbol: sym.clone(),
                    line: line_no,
                    column: col,
                })?;
            w[i] = s;
            set[i] = true;
        }
        if let Some(i) = set.iter().position(|b| !b) {
            return Err(Error::MissingOrientation(gens[i].clone()));
        }
    }
    let orientation = OrientationChar::new(w);
    for (_, r) in &relators {
        if orientation.of_word(r) != 1 {
            return Err(Error::OrientationOnRelator {
                relator: format_word(r, &gens),
            });
        }
    }
    Presentation::new(gens, relators.into_iter().map(|(_, r)| r).collect(), orientation)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_baumslag_solitar() {
        let p = parse_presentation("gens a t\nrel t a t^-1 a^-2\nw a:+ t:+\n").unwrap();
        assert_eq!(p.generators(), &["a".to_string(), "t".to_string()]);
        assert_eq!(p.relators().len(), 1);
        assert_eq!(p.format_word(&p.relators()[0]), "t a t^-1 a^-1 a^-1");
        assert!(p.orientation().is_trivial());
    }

    #[test]
    fn parses_free_group_without_relators() {
        let p = parse_presentation("gens x\nrel (none)\n").unwrap();
        assert_eq!(p.rank(), 1);
        assert!(p.relators().is_empty());
    }

    #[test]
    fn rejects_trivial_relator() {
        let e = parse_presentation("gens a\nrel a a^-1\n").unwrap_err();
        assert_eq!(e, Error::TrivialRelator { line: 2 });
        assert!(e.to_string().contains("trivial relator"));
    }

    #[test]
    fn rejects_undeclared_generator_with_position() {
        let e = parse_presentation("gens a\nrel a b\n").unwrap_err();
        assert_eq!(
            e,
            Error::UndeclaredGenerator {
                symbol: "b".into(),
                line: 2,
                column: 7
            }
        );
    }

    #[test]
    fn rejects_orientation_nontrivial_on_relator() {
        let e = parse_presentation("gens a b\nrel a b\nw a:- b:+\n").unwrap_err();
        assert!(matches!(e, Error::OrientationOnRelator { .. }));
    }

    #[test]
    fn syntax_errors_report_line_and_column() {
        let e = parse_presentation("gens a\nrel a^x\n").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 2, column: 7, .. }), "{e:?}");
        let e = parse_presentation("# c\nfoo a\n").unwrap_err();
        assert!(matches!(e, Error::Syntax { line: 2, column: 1, .. }));
    }

    #[test]
    fn comments_and_sugar() {
        let p = parse_presentation("gens a b # two gens\n  rel a^2 b^-3 # torus\n").unwrap();
        assert_eq!(p.relators()[0].len(), 5);
    }

    #[test]
    fn file_round_trip() {
        let src = "gens a b c d\nrel a b a^-1 b^-1 c d c^-1 d^-1\nw a:+ b:- c:+ d:+\n";
        let p = parse_presentation(src).unwrap();
        assert_eq!(parse_presentation(&p.to_file_string()).unwrap(), p);
    }
}
