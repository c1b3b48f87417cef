//! Finite group presentations with optional cusp (peripheral) data and
//! torsion representatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{render_word, Word};

/// Generators of one cusp subgroup.
///
/// For a link complement this is a (meridian, longitude) pair. Orbifold cusps
/// whose stabilizer needs more generators (rotations about the cusp) carry
/// them in `extra`; they only enlarge the orbit computation in cusp counting
/// and are never used as filling curves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralPair {
    pub meridian: Word,
    pub longitude: Word,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<Word>,
}

impl PeripheralPair {
    pub fn new(meridian: Word, longitude: Word) -> Self {
        PeripheralPair {
            meridian,
            longitude,
            extra: Vec::new(),
        }
    }

    /// Meridian, longitude and extras.
    pub fn generators(&self) -> impl Iterator<Item = &Word> {
        [&self.meridian, &self.longitude].into_iter().chain(self.extra.iter())
    }
}

/// A word of finite order `order` in the group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionRep {
    pub word: Word,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    pub generator_names: Vec<String>,
    pub relators: Vec<Word>,
    #[serde(default)]
    pub peripheral: Vec<PeripheralPair>,
    #[serde(default)]
    pub torsion_reps: Vec<TorsionRep>,
}

impl GroupPresentation {
    /// Builds and validates a presentation. Generator names default to
    /// `a, b, c, ...` when `names` is `None`.
    pub fn new(generator_count: usize, relators: Vec<Word>, names: Option<Vec<String>>) -> Result<Self> {
        let generator_names = names.unwrap_or_else(|| default_names(generator_count));
        let p = GroupPresentation {
            generator_names,
            relators,
            peripheral: Vec::new(),
            torsion_reps: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_peripheral(mut self, peripheral: Vec<PeripheralPair>) -> Result<Self> {
        self.peripheral = peripheral;
        self.validate()?;
        Ok(self)
    }

    pub fn with_torsion(mut self, torsion: Vec<TorsionRep>) -> Result<Self> {
        self.torsion_reps = torsion;
        self.validate()?;
        Ok(self)
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    pub fn cusp_count(&self) -> usize {
        self.peripheral.len()
    }

    /// Checks letter ranges, reduction and torsion orders.
    pub fn validate(&self) -> Result<()> {
        let g = self.generator_count();
        if g == 0 {
            return Err(Error::Validation("presentation needs at least one generator".into()));
        }
        let check = |w: &Word, what: &str| -> Result<()> {
            if w.max_generator() > g {
                return Err(Error::Validation(format!(
                    "{what} {w} uses a generator outside 1..={g}"
                )));
            }
            if Word::new(w.letters().iter().copied()) != *w {
                return Err(Error::Validation(format!("{what} {w} is not freely reduced")));
            }
            Ok(())
        };
        for r in &self.relators {
            check(r, "relator")?;
        }
        for p in &self.peripheral {
            for w in p.generators() {
                check(w, "peripheral word")?;
            }
        }
        for t in &self.torsion_reps {
            check(&t.word, "torsion word")?;
            if t.order < 2 {
                return Err(Error::Validation(format!("torsion order {} is below 2", t.order)));
            }
        }
        Ok(())
    }

    /// Relator exponent-sum matrix (rows = relators, columns = generators).
    pub fn abelianized_relations(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|r| r.exponent_sums(self.generator_count()))
            .collect()
    }

    /// Same group with generators renumbered: old generator `k` becomes
    /// `perm[k-1]` (1-based).
    pub fn relabel_generators(&self, perm: &[usize]) -> GroupPresentation {
        let g = self.generator_count();
        let mut names = vec![String::new(); g];
        for (old, &new) in perm.iter().enumerate() {
            names[new - 1] = self.generator_names[old].clone();
        }
        GroupPresentation {
            generator_names: names,
            relators: self.relators.iter().map(|r| r.relabel(perm)).collect(),
            peripheral: self
                .peripheral
                .iter()
                .map(|p| PeripheralPair {
                    meridian: p.meridian.relabel(perm),
                    longitude: p.longitude.relabel(perm),
                    extra: p.extra.iter().map(|w| w.relabel(perm)).collect(),
                })
                .collect(),
            torsion_reps: self
                .torsion_reps
                .iter()
                .map(|t| TorsionRep {
                    word: t.word.relabel(perm),
                    order: t.order,
                })
                .collect(),
        }
    }

    pub fn render(&self, w: &Word) -> String {
        render_word(w, &self.generator_names)
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    if n <= 26 {
        (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    } else {
        (1..=n).map(|i| format!("s{i}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_letters() {
        let r = GroupPresentation::new(1, vec![Word::new([1, 2])], None);
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn rejects_small_torsion_order() {
        let p = GroupPresentation::new(1, vec![], None).unwrap();
        let r = p.with_torsion(vec![TorsionRep {
            word: Word::generator(1),
            order: 1,
        }]);
        assert!(r.is_err());
    }

    #[test]
    fn relabel_swaps_generators() {
        let p = GroupPresentation::new(2, vec![Word::new([1, 1, 2])], None).unwrap();
        let q = p.relabel_generators(&[2, 1]);
        assert_eq!(q.relators[0].letters(), &[2, 2, 1]);
        assert_eq!(q.generator_names, vec!["b".to_string(), "a".to_string()]);
    }
}
