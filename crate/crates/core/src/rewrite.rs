//! Reidemeister–Schreier rewriting: presentations and abelianized relations
//! of finite-index subgroups given by complete coset tables.

use std::collections::HashMap;

use crate::coset::CosetTable;
use crate::presentation::{default_names, GroupPresentation, PeripheralPair};
use crate::word::Word;

/// Spanning tree of the coset graph, discovered breadth-first from coset 0,
/// and the numbering of the Schreier generators (non-tree forward edges).
#[derive(Clone, Debug)]
pub struct SchreierTransversal {
    generators: usize,
    index: usize,
    /// Representative word of each coset (`0 · rep[c] = c`).
    pub representatives: Vec<Word>,
    /// `edge_gen[c * g + (k-1)]` = Schreier generator number (1-based) for the
    /// edge `c --k--> c·k`, or 0 for a tree edge.
    edge_gen: Vec<u32>,
    schreier_count: usize,
}

impl SchreierTransversal {
    pub fn new(t: &CosetTable) -> Self {
        let g = t.generator_count();
        let n = t.index();
        let mut representatives = vec![None; n];
        let mut tree = vec![false; n * g];
        representatives[0] = Some(Word::identity());
        let mut queue = vec![0usize];
        let mut head = 0;
        while head < queue.len() {
            let c = queue[head];
            head += 1;
            for col in 0..2 * g {
                let d = t.act_col(c, col);
                if representatives[d].is_some() {
                    continue;
                }
                let k = col / 2 + 1;
                let letter = if col % 2 == 0 { k as i32 } else { -(k as i32) };
                let rep = representatives[c].as_ref().expect("visited").concat(&Word::new([letter]));
                representatives[d] = Some(rep);
                if col % 2 == 0 {
                    tree[c * g + (k - 1)] = true;
                } else {
                    tree[d * g + (k - 1)] = true;
                }
                queue.push(d);
            }
        }
        let mut edge_gen = vec![0u32; n * g];
        let mut next = 0u32;
        for c in 0..n {
            for k in 0..g {
                if !tree[c * g + k] {
                    next += 1;
                    edge_gen[c * g + k] = next;
                }
            }
        }
        SchreierTransversal {
            generators: g,
            index: n,
            representatives: representatives.into_iter().map(|r| r.expect("transitive table")).collect(),
            edge_gen,
            schreier_count: next as usize,
        }
    }

    /// Number of Schreier generators, `index·(g−1) + 1`.
    pub fn schreier_count(&self) -> usize {
        self.schreier_count
    }

    /// Parent word giving Schreier generator `s` (1-based): `rep(c)·k·rep(c·k)⁻¹`.
    pub fn schreier_word(&self, t: &CosetTable, s: usize) -> Word {
        let pos = self.edge_gen.iter().position(|&x| x as usize == s).expect("valid Schreier generator");
        let (c, k) = (pos / self.generators, pos % self.generators + 1);
        let d = t.act(c, k as i32);
        self.representatives[c]
            .concat(&Word::generator(k))
            .concat(&self.representatives[d].inverse())
    }

    /// Rewrites `w` read from coset `c`, returning the Schreier word for
    /// `rep(c)·w·rep(c·w)⁻¹` and the end coset.
    pub fn rewrite_from(&self, t: &CosetTable, c: usize, w: &Word) -> (Word, usize) {
        let mut out = Vec::new();
        let mut x = c;
        for &letter in w.letters() {
            let k = letter.unsigned_abs() as usize;
            if letter > 0 {
                let s = self.edge_gen[x * self.generators + k - 1];
                if s != 0 {
                    out.push(s as i32);
                }
                x = t.act(x, letter);
            } else {
                let y = t.act(x, letter);
                let s = self.edge_gen[y * self.generators + k - 1];
                if s != 0 {
                    out.push(-(s as i32));
                }
                x = y;
            }
        }
        (Word::new(out), x)
    }

    /// Exponent-sum vector of the rewrite of `w` from `c`, accumulated
    /// without building the word.
    pub fn abelian_rewrite(&self, t: &CosetTable, c: usize, w: &Word, acc: &mut [i64]) -> usize {
        let mut x = c;
        for &letter in w.letters() {
            let k = letter.unsigned_abs() as usize;
            if letter > 0 {
                let s = self.edge_gen[x * self.generators + k - 1];
                if s != 0 {
                    acc[s as usize - 1] += 1;
                }
                x = t.act(x, letter);
            } else {
                let y = t.act(x, letter);
                let s = self.edge_gen[y * self.generators + k - 1];
                if s != 0 {
                    acc[s as usize - 1] -= 1;
                }
                x = y;
            }
        }
        x
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

/// Exponent-sum matrix of all parent relators rewritten from every coset,
/// one row per (relator, coset), one column per Schreier generator.
pub fn abelianized_subgroup_relations(p: &GroupPresentation, t: &CosetTable) -> (Vec<Vec<i64>>, usize) {
    let tr = SchreierTransversal::new(t);
    let cols = tr.schreier_count();
    let mut rows = Vec::with_capacity(p.relators.len() * t.index());
    for r in &p.relators {
        for c in 0..t.index() {
            let mut acc = vec![0i64; cols];
            let end = tr.abelian_rewrite(t, c, r, &mut acc);
            debug_assert_eq!(end, c);
            if acc.iter().any(|&x| x != 0) {
                rows.push(acc);
            }
        }
    }
    (rows, cols)
}

/// Peripheral pairs of the cover: for each parent cusp and each orbit of its
/// meridian/longitude on the cosets, a basis of the stabilizer lattice of the
/// orbit representative, rewritten into Schreier generators.
///
/// Returns `None` when some parent cusp carries extra stabilizer generators;
/// the lattice construction assumes a rank-2 abelian cusp group.
pub fn cover_peripheral(p: &GroupPresentation, t: &CosetTable, tr: &SchreierTransversal) -> Option<Vec<PeripheralPair>> {
    let n = t.index();
    let mut out = Vec::new();
    for pair in &p.peripheral {
        if !pair.extra.is_empty() {
            return None;
        }
        let m = t.word_permutation(&pair.meridian);
        let l = t.word_permutation(&pair.longitude);
        let mut seen = vec![false; n];
        for o in 0..n {
            if seen[o] {
                continue;
            }
            // m-cycle through o, with positions.
            let mut cycle_pos = HashMap::new();
            let mut x = o;
            let mut k = 0i64;
            loop {
                cycle_pos.insert(x, k);
                k += 1;
                x = m[x];
                if x == o {
                    break;
                }
            }
            let mut j0 = 0i64;
            let mut y = o;
            let s = loop {
                j0 += 1;
                y = l[y];
                if let Some(&pos) = cycle_pos.get(&y) {
                    break pos;
                }
            };
            // Orbit of o under the abelian group <m, l>.
            let mut stack = vec![o];
            seen[o] = true;
            while let Some(z) = stack.pop() {
                for nz in [m[z], l[z]] {
                    if !seen[nz] {
                        seen[nz] = true;
                        stack.push(nz);
                    }
                }
            }
            let meridian = pair.meridian.pow(k);
            let longitude = pair.longitude.pow(j0).concat(&pair.meridian.pow(-s));
            let (mw, me) = tr.rewrite_from(t, o, &meridian);
            let (lw, le) = tr.rewrite_from(t, o, &longitude);
            debug_assert_eq!(me, o);
            debug_assert_eq!(le, o);
            out.push(PeripheralPair::new(mw, lw));
        }
    }
    Some(out)
}

/// Full Reidemeister–Schreier presentation of the subgroup, with cover
/// peripheral data when available. Generators are named `s1, s2, ...` (or
/// letters when few enough) and are then thinned by generator elimination.
pub fn subgroup_presentation(p: &GroupPresentation, t: &CosetTable) -> GroupPresentation {
    let tr = SchreierTransversal::new(t);
    let mut relators = Vec::with_capacity(p.relators.len() * t.index());
    for r in &p.relators {
        for c in 0..t.index() {
            let (w, end) = tr.rewrite_from(t, c, r);
            debug_assert_eq!(end, c);
            relators.push(w);
        }
    }
    let peripheral = cover_peripheral(p, t, &tr).unwrap_or_default();
    let raw = Raw {
        generators: tr.schreier_count(),
        relators,
        peripheral,
    };
    raw.eliminate().into_presentation()
}

struct Raw {
    generators: usize,
    relators: Vec<Word>,
    peripheral: Vec<PeripheralPair>,
}

/// Longest relator used to eliminate a generator; keeps substitution growth in
/// check.
const MAX_ELIMINATION_LENGTH: usize = 16;

impl Raw {
    /// Repeatedly removes a generator that occurs exactly once in some short
    /// relator, substituting its expression everywhere.
    fn eliminate(mut self) -> Raw {
        let mut alive = vec![true; self.generators + 1];
        loop {
            self.relators = tidy(std::mem::take(&mut self.relators));
            let mut best: Option<(usize, usize, usize)> = None; // (len, relator, generator)
            for (i, r) in self.relators.iter().enumerate() {
                if r.len() > MAX_ELIMINATION_LENGTH || best.is_some_and(|b| b.0 <= r.len()) {
                    continue;
                }
                let mut counts: HashMap<usize, usize> = HashMap::new();
                for &x in r.letters() {
                    *counts.entry(x.unsigned_abs() as usize).or_default() += 1;
                }
                if let Some(g) = r
                    .letters()
                    .iter()
                    .map(|x| x.unsigned_abs() as usize)
                    .find(|g| counts[g] == 1)
                {
                    best = Some((r.len(), i, g));
                }
            }
            let Some((_, i, g)) = best else { break };
            let r = self.relators.swap_remove(i);
            // r = u · g^e · v  =>  g^e = u⁻¹ v⁻¹ (cyclically), g = (v·u)⁻¹ or its inverse.
            let pos = r.letters().iter().position(|x| x.unsigned_abs() as usize == g).unwrap();
            let e = r.letters()[pos];
            let rot = Word::new(r.letters()[pos + 1..].iter().chain(r.letters()[..pos].iter()).copied());
            // g^e · rot = 1  =>  g^e = rot⁻¹
            let value = if e > 0 { rot.inverse() } else { rot };
            let subst = |w: &Word| -> Word {
                Word::new(w.letters().iter().flat_map(|&x| {
                    if x.unsigned_abs() as usize == g {
                        if x > 0 {
                            value.letters().to_vec()
                        } else {
                            value.inverse().letters().to_vec()
                        }
                    } else {
                        vec![x]
                    }
                }))
            };
            self.relators = self.relators.iter().map(subst).collect();
            for pp in &mut self.peripheral {
                pp.meridian = subst(&pp.meridian);
                pp.longitude = subst(&pp.longitude);
                pp.extra = pp.extra.iter().map(subst).collect();
            }
            alive[g] = false;
        }
        // Renumber surviving generators.
        let mut map = vec![0usize; self.generators + 1];
        let mut next = 0;
        for g in 1..=self.generators {
            if alive[g] {
                next += 1;
                map[g] = next;
            }
        }
        let relabel = |w: &Word| w.relabel(&map[1..]);
        Raw {
            generators: next,
            relators: tidy(self.relators.iter().map(relabel).collect()),
            peripheral: self
                .peripheral
                .iter()
                .map(|pp| PeripheralPair {
                    meridian: relabel(&pp.meridian),
                    longitude: relabel(&pp.longitude),
                    extra: pp.extra.iter().map(relabel).collect(),
                })
                .collect(),
        }
    }

    fn into_presentation(self) -> GroupPresentation {
        // A trivial subgroup keeps one generator, killed by a relator.
        let (count, relators) = if self.generators == 0 {
            (1, vec![Word::generator(1)])
        } else {
            (self.generators, self.relators)
        };
        let mut p = GroupPresentation::new(count, relators, Some(default_names(count)))
            .expect("rewritten words are reduced and in range");
        p.peripheral = self.peripheral;
        p
    }
}

/// Cyclically reduces relators, drops trivial ones and duplicates up to
/// rotation and inversion, and sorts by length.
fn tidy(relators: Vec<Word>) -> Vec<Word> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for r in relators {
        let r = r.cyclically_reduced();
        if r.is_empty() {
            continue;
        }
        if seen.insert(cyclic_key(&r)) {
            out.push(r);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Least rotation of the word or its inverse.
fn cyclic_key(w: &Word) -> Vec<i32> {
    let mut best: Option<Vec<i32>> = None;
    for v in [w.letters().to_vec(), w.inverse().letters().to_vec()] {
        for i in 0..v.len() {
            let rot: Vec<i32> = v[i..].iter().chain(v[..i].iter()).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::enumerate_cosets;
    use crate::word::parse_word;

    fn pres(gens: &str, rels: &[&str]) -> GroupPresentation {
        let names: Vec<String> = gens.chars().map(|c| c.to_string()).collect();
        let relators = rels.iter().map(|r| parse_word(r, &names).unwrap()).collect();
        GroupPresentation::new(names.len(), relators, Some(names)).unwrap()
    }

    #[test]
    fn schreier_generator_count_is_nielsen_schreier() {
        let p = pres("ab", &["aa", "bbb", "abababab"]);
        let t = enumerate_cosets(&p, &[Word::generator(2)], 1000).unwrap();
        let tr = SchreierTransversal::new(&t);
        assert_eq!(tr.schreier_count(), t.index() + 1);
        for s in 1..=tr.schreier_count() {
            let w = tr.schreier_word(&t, s);
            assert_eq!(t.trace(0, &w), 0);
        }
    }

    #[test]
    fn rewrite_inverts_schreier_word() {
        let p = pres("ab", &["aa", "bbb", "abababab"]);
        let t = enumerate_cosets(&p, &[Word::generator(2)], 1000).unwrap();
        let tr = SchreierTransversal::new(&t);
        for s in 1..=tr.schreier_count() {
            let (w, end) = tr.rewrite_from(&t, 0, &tr.schreier_word(&t, s));
            assert_eq!(end, 0);
            assert_eq!(w.letters(), &[s as i32]);
        }
    }

    #[test]
    fn subgroup_of_finite_group_has_right_order() {
        // <b> in S4 is cyclic of order 3.
        let p = pres("ab", &["aa", "bbb", "abababab"]);
        let t = enumerate_cosets(&p, &[Word::generator(2)], 1000).unwrap();
        let h = subgroup_presentation(&p, &t);
        assert_eq!(crate::coset::group_order(&h, 1000), Some(3));
        // Trivial subgroup of S3 has the trivial group as presentation.
        let p = pres("ab", &["aa", "bbb", "abab"]);
        let t = enumerate_cosets(&p, &[], 1000).unwrap();
        let h = subgroup_presentation(&p, &t);
        assert_eq!(crate::coset::group_order(&h, 1000), Some(1));
    }

    #[test]
    fn cyclic_key_identifies_rotations_and_inverses() {
        let w = Word::new([1, 2, -1, 3]);
        let rot = Word::new([3, 1, 2, -1]);
        assert_eq!(cyclic_key(&w), cyclic_key(&rot));
        assert_eq!(cyclic_key(&w), cyclic_key(&w.inverse()));
    }
}
