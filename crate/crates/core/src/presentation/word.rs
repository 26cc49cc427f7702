use std::fmt;

/// A generator or its inverse, packed as `2 * generator + inverse_bit`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u32) << 1 | inverse as u32)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    /// `+1` or `-1`.
    pub fn exponent(self) -> i32 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Dense index in `0..2 * rank`, usable for per-letter tables.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.generator())?;
        if self.is_inverse() {
            write!(f, "^-1")?;
        }
        Ok(())
    }
}

/// A sequence of letters. Not necessarily freely reduced; see [`Word::free_reduce`].
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letter(generator: usize, exponent: i32) -> Self {
        Word::power(generator, exponent as i64)
    }

    /// `g^k` spelled out with `|k|` letters.
    pub fn power(generator: usize, k: i64) -> Self {
        let l = Letter::new(generator, k < 0);
        Word(vec![l; k.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Plain concatenation; no reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut sums = vec![0i64; rank];
        for l in &self.0 {
            sums[l.generator()] += l.exponent() as i64;
        }
        sums
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator()).max()
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Writes `w` as whitespace-separated tokens `g` / `g^-1`.
pub fn format_word(w: &Word, names: &[String]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::with_capacity(w.len());
    for l in w.letters() {
        let name = names
            .get(l.generator())
            .cloned()
            .unwrap_or_else(|| format!("g{}", l.generator()));
        if l.is_inverse() {
            parts.push(format!("{name}^-1"));
        } else {
            parts.push(name);
        }
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction_cancels_adjacent_pairs() {
        let x = Letter::new(0, false);
        let y = Letter::new(1, false);
        let w = Word::from_letters(vec![x, y, y.inverse(), x.inverse(), y]);
        assert_eq!(w.free_reduce(), Word::from_letters(vec![y]));
        assert!(Word::from_letters(vec![x, x.inverse()]).free_reduce().is_empty());
    }

    #[test]
    fn inverse_reverses_and_flips() {
        let a = Letter::new(0, false);
        let t = Letter::new(1, false);
        let w = Word::from_letters(vec![t, a, t.inverse()]);
        assert_eq!(w.inverse(), Word::from_letters(vec![t, a.inverse(), t.inverse()]));
        assert!(w.concat(&w.inverse()).free_reduce().is_empty());
    }

    #[test]
    fn formatting() {
        let names = vec!["a".to_string(), "t".to_string()];
        let w = Word::from_letters(vec![Letter::new(1, false), Letter::new(0, true)]);
        assert_eq!(format_word(&w, &names), "t a^-1");
        assert_eq!(format_word(&Word::identity(), &names), "1");
    }
}
