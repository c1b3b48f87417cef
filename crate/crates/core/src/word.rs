//! Words in a free group, stored as signed generator indices.
//!
//! Letter `+k` is the k-th generator (1-based) and `-k` its inverse. Letters
//! only appear at I/O boundaries: lower case for a generator, upper case for
//! its inverse.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<i32>);

impl Word {
    /// Builds the freely reduced word from arbitrary letters.
    ///
    /// Panics if a letter is zero.
    pub fn new(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for x in letters {
            assert!(x != 0, "zero is not a letter");
            if out.last() == Some(&-x) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Word(out)
    }

    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(k: usize) -> Self {
        Word(vec![k as i32])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|x| -x).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(other.0.iter()).copied())
    }

    /// `self^n`; negative exponents use the inverse.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            letters.extend_from_slice(&base.0);
        }
        Word::new(letters)
    }

    /// `c · self · c⁻¹`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.concat(self).concat(&c.inverse())
    }

    /// Strips inverse pairs from the two ends, giving a cyclically reduced
    /// word conjugate to `self`.
    pub fn cyclically_reduced(&self) -> Word {
        let w = &self.0;
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == -w[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        Word(w[lo..hi].to_vec())
    }

    /// Largest generator index used, 0 for the identity.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Exponent sum of each generator, indexed from 0.
    pub fn exponent_sums(&self, generators: usize) -> Vec<i64> {
        let mut v = vec![0i64; generators];
        for &x in &self.0 {
            v[x.unsigned_abs() as usize - 1] += x.signum() as i64;
        }
        v
    }

    /// Applies a generator relabelling `k -> map[k-1]` (1-based targets).
    pub fn relabel(&self, map: &[usize]) -> Word {
        Word::new(self.0.iter().map(|&x| x.signum() * map[x.unsigned_abs() as usize - 1] as i32))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Freely reduces a letter sequence.
pub fn free_reduce(letters: &[i32]) -> Word {
    Word::new(letters.iter().copied())
}

/// Parses letter syntax over single-letter generator names.
pub fn parse_word(text: &str, generator_names: &[String]) -> Result<Word> {
    let mut letters = Vec::with_capacity(text.len());
    for ch in text.chars() {
        if ch.is_whitespace() || ch == '*' || ch == '.' {
            continue;
        }
        let lower = ch.to_lowercase().next().unwrap_or(ch);
        let pos = generator_names
            .iter()
            .position(|n| n.chars().eq(std::iter::once(lower)))
            .ok_or_else(|| Error::UnknownLetter {
                letter: ch,
                word: text.to_string(),
            })?;
        let k = pos as i32 + 1;
        letters.push(if ch.is_uppercase() { -k } else { k });
    }
    Ok(Word::new(letters))
}

/// Renders a word back into letter syntax when every generator name is a
/// single lower-case letter; otherwise falls back to `g3^-1 g1` style tokens.
pub fn render_word(w: &Word, generator_names: &[String]) -> String {
    let single = generator_names
        .iter()
        .all(|n| n.chars().count() == 1 && n.chars().all(|c| c.is_ascii_lowercase()));
    if single {
        w.letters()
            .iter()
            .map(|&x| {
                let c = generator_names[x.unsigned_abs() as usize - 1].chars().next().unwrap();
                if x < 0 {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    } else {
        w.letters()
            .iter()
            .map(|&x| {
                let name = generator_names
                    .get(x.unsigned_abs() as usize - 1)
                    .cloned()
                    .unwrap_or_else(|| format!("g{}", x.unsigned_abs()));
                if x < 0 {
                    format!("{name}^-1")
                } else {
                    name
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn parse_examples() {
        let ab = names("ab");
        assert_eq!(parse_word("", &ab).unwrap(), Word::identity());
        assert_eq!(parse_word("aB", &ab).unwrap().letters(), &[1, -2]);
        assert_eq!(parse_word("aAb", &ab).unwrap().letters(), &[2]);
    }

    #[test]
    fn unknown_letter_is_named() {
        match parse_word("abz", &names("ab")) {
            Err(Error::UnknownLetter { letter, .. }) => assert_eq!(letter, 'z'),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(&[1, -1]).is_empty());
        assert!(free_reduce(&[1, 2, -2, -1]).is_empty());
        assert_eq!(free_reduce(&[1, 2, -1]).letters(), &[1, 2, -1]);
    }

    #[test]
    fn cyclic_reduction() {
        assert_eq!(Word::new([1, 2, 3, -1]).cyclically_reduced().letters(), &[2, 3]);
        assert_eq!(Word::new([1, 1]).cyclically_reduced().letters(), &[1, 1]);
    }

    #[test]
    fn pow_and_inverse() {
        let w = Word::new([1, 2]);
        assert_eq!(w.pow(2).letters(), &[1, 2, 1, 2]);
        assert_eq!(w.pow(-1), w.inverse());
        assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn render_fallback_for_long_alphabets() {
        let long: Vec<String> = (1..=30).map(|i| format!("s{i}")).collect();
        assert_eq!(render_word(&Word::new([1, -30]), &long), "s1 s30^-1");
    }

    fn letters() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec((1i32..=3, any::<bool>()).prop_map(|(k, s)| if s { k } else { -k }), 0..40)
    }

    proptest! {
        #[test]
        fn reduce_idempotent_and_shrinking(v in letters()) {
            let w = free_reduce(&v);
            prop_assert!(w.len() <= v.len());
            prop_assert_eq!(free_reduce(w.letters()), w.clone());
            for pair in w.letters().windows(2) {
                prop_assert!(pair[0] != -pair[1]);
            }
        }

        #[test]
        fn render_then_parse_is_identity(v in letters()) {
            let abc = names("abc");
            let w = free_reduce(&v);
            prop_assert_eq!(parse_word(&render_word(&w, &abc), &abc).unwrap(), w);
        }
    }
}
