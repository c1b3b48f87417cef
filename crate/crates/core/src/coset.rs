//! Todd–Coxeter coset enumeration (Felsch strategy) and complete coset
//! tables.
//!
//! Internally a letter is a column: generator `k` (1-based) occupies column
//! `2(k-1)` and its inverse column `2(k-1)+1`, so `col ^ 1` is the inverse
//! column. Cosets are 0-based; coset 0 is the subgroup itself.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::GroupPresentation;
use crate::word::Word;

const NONE: u32 = u32::MAX;

#[inline]
pub(crate) fn column(letter: i32) -> usize {
    let k = letter.unsigned_abs() as usize - 1;
    2 * k + usize::from(letter < 0)
}

/// Column sequence of a word.
pub(crate) fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|&x| column(x)).collect()
}

/// A complete coset table: the right action of the generators on the cosets
/// of a subgroup of finite index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CosetTable {
    generators: usize,
    index: usize,
    /// `entries[c * 2g + col]`.
    entries: Vec<u32>,
    #[serde(default)]
    base_subgroup_words: Vec<Word>,
}

impl CosetTable {
    /// Table from generator images (0-based permutations). Inverse columns are
    /// derived; fails if an image is not a bijection.
    pub fn from_permutations(images: &[Vec<usize>]) -> Result<Self> {
        let generators = images.len();
        let index = images.first().map_or(1, |p| p.len());
        let width = 2 * generators;
        let mut entries = vec![NONE; index * width];
        for (k, img) in images.iter().enumerate() {
            if img.len() != index {
                return Err(Error::Input("generator images have different degrees".into()));
            }
            let mut seen = vec![false; index];
            for (c, &d) in img.iter().enumerate() {
                if d >= index || seen[d] {
                    return Err(Error::Input(format!("image of generator {} is not a permutation", k + 1)));
                }
                seen[d] = true;
                entries[c * width + 2 * k] = d as u32;
                entries[d * width + 2 * k + 1] = c as u32;
            }
        }
        Ok(CosetTable {
            generators,
            index,
            entries,
            base_subgroup_words: Vec::new(),
        })
    }

    pub(crate) fn from_raw(generators: usize, index: usize, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), index * 2 * generators);
        CosetTable {
            generators,
            index,
            entries,
            base_subgroup_words: Vec::new(),
        }
    }

    pub fn with_subgroup_words(mut self, words: Vec<Word>) -> Self {
        self.base_subgroup_words = words;
        self
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn subgroup_words(&self) -> &[Word] {
        &self.base_subgroup_words
    }

    #[allow(dead_code)]
    pub(crate) fn raw(&self) -> &[u32] {
        &self.entries
    }

    #[inline]
    pub(crate) fn act_col(&self, coset: usize, col: usize) -> usize {
        self.entries[coset * 2 * self.generators + col] as usize
    }

    /// Image of `coset` under one letter.
    #[inline]
    pub fn act(&self, coset: usize, letter: i32) -> usize {
        self.act_col(coset, column(letter))
    }

    /// Image of `coset` under a word, read left to right.
    pub fn trace(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, &x| self.act(c, x))
    }

    /// Permutation induced by generator `k` (1-based).
    pub fn image(&self, k: usize) -> Vec<usize> {
        (0..self.index).map(|c| self.act_col(c, 2 * (k - 1))).collect()
    }

    /// Permutation induced by a word.
    pub fn word_permutation(&self, w: &Word) -> Vec<usize> {
        (0..self.index).map(|c| self.trace(c, w)).collect()
    }

    /// Checks completeness, relator closure, subgroup stabilisation of coset 0
    /// and transitivity.
    pub fn check_invariants(&self, p: &GroupPresentation) -> Result<()> {
        if p.generator_count() != self.generators {
            return Err(Error::Validation("generator count mismatch".into()));
        }
        let width = 2 * self.generators;
        for c in 0..self.index {
            for col in 0..width {
                let d = self.entries[c * width + col];
                if d == NONE || d as usize >= self.index {
                    return Err(Error::Validation(format!("entry ({c},{col}) undefined")));
                }
                if self.entries[d as usize * width + (col ^ 1)] as usize != c {
                    return Err(Error::Validation(format!("entry ({c},{col}) has no matching inverse")));
                }
            }
        }
        for r in &p.relators {
            for c in 0..self.index {
                if self.trace(c, r) != c {
                    return Err(Error::Validation(format!("relator {} moves coset {c}", p.render(r))));
                }
            }
        }
        for w in &self.base_subgroup_words {
            if self.trace(0, w) != 0 {
                return Err(Error::Validation(format!("subgroup word {} moves coset 0", p.render(w))));
            }
        }
        if !self.is_transitive() {
            return Err(Error::Validation("action is not transitive".into()));
        }
        Ok(())
    }

    pub fn is_transitive(&self) -> bool {
        let mut seen = vec![false; self.index];
        let mut queue = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(c) = queue.pop() {
            for col in 0..2 * self.generators {
                let d = self.act_col(c, col);
                if !seen[d] {
                    seen[d] = true;
                    count += 1;
                    queue.push(d);
                }
            }
        }
        count == self.index
    }

    /// Renumbering of the cosets in breadth-first order from `base`, scanning
    /// columns in order. Returns `order[new] = old`.
    pub(crate) fn bfs_order(&self, base: usize) -> Vec<usize> {
        let mut newnum = vec![usize::MAX; self.index];
        let mut order = Vec::with_capacity(self.index);
        newnum[base] = 0;
        order.push(base);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            for col in 0..2 * self.generators {
                let d = self.act_col(c, col);
                if newnum[d] == usize::MAX {
                    newnum[d] = order.len();
                    order.push(d);
                }
            }
            i += 1;
        }
        order
    }

    /// The table renumbered by breadth-first scan from `base`.
    pub fn standardize_from(&self, base: usize) -> CosetTable {
        let order = self.bfs_order(base);
        let mut newnum = vec![0u32; self.index];
        for (n, &old) in order.iter().enumerate() {
            newnum[old] = n as u32;
        }
        let width = 2 * self.generators;
        let mut entries = vec![NONE; self.index * width];
        for (n, &old) in order.iter().enumerate() {
            for col in 0..width {
                entries[n * width + col] = newnum[self.act_col(old, col)];
            }
        }
        CosetTable {
            generators: self.generators,
            index: self.index,
            entries,
            base_subgroup_words: self.base_subgroup_words.clone(),
        }
    }

    /// Canonical numbering fixing coset 0.
    pub fn standardize(&self) -> CosetTable {
        self.standardize_from(0)
    }

    /// Lexicographically least standardization over all base points: one
    /// representative per conjugacy class of the subgroup.
    pub fn conjugacy_canonical(&self) -> CosetTable {
        (0..self.index)
            .map(|b| self.standardize_from(b))
            .min_by(|x, y| x.entries.cmp(&y.entries))
            .expect("table has at least one coset")
    }

    /// Same table with the cosets relabelled by `perm` (old -> new), used in
    /// tests to scramble a table.
    pub fn renumber(&self, perm: &[usize]) -> CosetTable {
        let width = 2 * self.generators;
        let mut entries = vec![NONE; self.index * width];
        for c in 0..self.index {
            for col in 0..width {
                entries[perm[c] * width + col] = perm[self.act_col(c, col)] as u32;
            }
        }
        CosetTable {
            generators: self.generators,
            index: self.index,
            entries,
            base_subgroup_words: self.base_subgroup_words.clone(),
        }
    }

    /// Generator images as 0-based permutations.
    pub fn images(&self) -> Vec<Vec<usize>> {
        (1..=self.generators).map(|k| self.image(k)).collect()
    }
}

/// The action of the generators on the cosets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationRep {
    pub degree: usize,
    /// One 0-based permutation per generator.
    pub images: Vec<Vec<usize>>,
}

impl PermutationRep {
    pub fn word_image(&self, w: &Word) -> Vec<usize> {
        (0..self.degree)
            .map(|c| {
                w.letters().iter().fold(c, |p, &x| {
                    let img = &self.images[x.unsigned_abs() as usize - 1];
                    if x > 0 {
                        img[p]
                    } else {
                        img.iter().position(|&q| q == p).expect("bijection")
                    }
                })
            })
            .collect()
    }
}

pub fn permutation_rep(t: &CosetTable) -> PermutationRep {
    PermutationRep {
        degree: t.index(),
        images: t.images(),
    }
}

/// Enumeration ran out of room.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow {
    pub live_cosets: usize,
}

/// Felsch-style enumeration of the cosets of `⟨subgroup_gens⟩`.
///
/// Returns a standardized complete table, or [`Overflow`] when the number of
/// live cosets would exceed `max_cosets`.
pub fn enumerate_cosets(
    p: &GroupPresentation,
    subgroup_gens: &[Word],
    max_cosets: usize,
) -> std::result::Result<CosetTable, Overflow> {
    assert!(max_cosets >= 1, "max_cosets must be positive");
    let mut e = Enumerator::new(p, subgroup_gens, max_cosets);
    e.run()?;
    let table = e.compact().standardize().with_subgroup_words(subgroup_gens.to_vec());
    debug_assert!(table.check_invariants(p).is_ok());
    Ok(table)
}

/// Order of the group if enumeration over the trivial subgroup completes.
pub fn group_order(p: &GroupPresentation, max_cosets: usize) -> Option<usize> {
    enumerate_cosets(p, &[], max_cosets).ok().map(|t| t.index())
}

struct Enumerator {
    width: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max_cosets: usize,
    /// Cyclic rotations of relators and their inverses, grouped by first column.
    rotations: Vec<Vec<Vec<usize>>>,
    relators: Vec<Vec<usize>>,
    subgroup: Vec<Vec<usize>>,
    deductions: Vec<(u32, usize)>,
    /// Lowest coset that may still have an undefined entry.
    cursor: usize,
}

impl Enumerator {
    fn new(p: &GroupPresentation, subgroup_gens: &[Word], max_cosets: usize) -> Self {
        let width = 2 * p.generator_count();
        let mut rotations = vec![Vec::new(); width];
        let mut relators = Vec::new();
        for r in &p.relators {
            let r = r.cyclically_reduced();
            if r.is_empty() {
                continue;
            }
            for w in [r.clone(), r.inverse()] {
                let cols = columns(&w);
                for i in 0..cols.len() {
                    let rot: Vec<usize> = cols[i..].iter().chain(cols[..i].iter()).copied().collect();
                    rotations[rot[0]].push(rot);
                }
            }
            relators.push(columns(&r));
        }
        for list in rotations.iter_mut() {
            list.sort();
            list.dedup();
        }
        Enumerator {
            width,
            table: vec![NONE; width],
            parent: vec![0],
            live: 1,
            max_cosets,
            rotations,
            relators,
            subgroup: subgroup_gens.iter().filter(|w| !w.is_empty()).map(columns).collect(),
            deductions: Vec::new(),
            cursor: 0,
        }
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.width + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, d: u32) {
        self.table[c as usize * self.width + col] = d;
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    fn new_coset(&mut self) -> u32 {
        let n = self.parent.len() as u32;
        self.parent.push(n);
        self.table.extend(std::iter::repeat_n(NONE, self.width));
        self.live += 1;
        n
    }

    fn define(&mut self, c: u32, col: usize) -> std::result::Result<(), Overflow> {
        if self.live >= self.max_cosets {
            return Err(Overflow { live_cosets: self.live });
        }
        if self.parent.len() > 4 * self.max_cosets + 1024 {
            self.compact_in_place();
        }
        let c = self.rep(c);
        let d = self.new_coset();
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        self.deductions.push((c, col));
        Ok(())
    }

    /// Scans `word` (columns) from coset `c` in both directions; fills a single
    /// gap or reports a coincidence.
    fn scan_and_deduce(&mut self, c: u32, word: &[usize]) {
        let n = word.len();
        let mut f = c;
        let mut i = 0;
        while i < n {
            let next = self.get(f, word[i]);
            if next == NONE {
                break;
            }
            f = next;
            i += 1;
        }
        if i == n {
            if f != c {
                self.coincidence(f, c);
            }
            return;
        }
        let mut b = c;
        let mut j = n;
        while j > i {
            let next = self.get(b, word[j - 1] ^ 1);
            if next == NONE {
                break;
            }
            b = next;
            j -= 1;
        }
        if j == i {
            if f != b {
                self.coincidence(f, b);
            }
        } else if j == i + 1 {
            let col = word[i];
            self.set(f, col, b);
            self.set(b, col ^ 1, f);
            self.deductions.push((f, col));
        }
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut VecDeque<u32>) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.live -= 1;
        queue.push_back(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = VecDeque::new();
        self.merge(a, b, &mut queue);
        while let Some(dead) = queue.pop_front() {
            for col in 0..self.width {
                let d = self.get(dead, col);
                if d == NONE {
                    continue;
                }
                if self.get(d, col ^ 1) == dead {
                    self.set(d, col ^ 1, NONE);
                }
                let mu = self.rep(dead);
                let nu = self.rep(d);
                let mu_x = self.get(mu, col);
                if mu_x != NONE {
                    self.merge(nu, mu_x, &mut queue);
                } else {
                    let nu_inv = self.get(nu, col ^ 1);
                    if nu_inv != NONE {
                        self.merge(mu, nu_inv, &mut queue);
                    } else {
                        self.set(mu, col, nu);
                        self.set(nu, col ^ 1, mu);
                        self.deductions.push((mu, col));
                    }
                }
            }
        }
        self.cursor = 0;
    }

    fn process_deductions(&mut self) {
        while let Some((c, col)) = self.deductions.pop() {
            if !self.is_live(c) {
                continue;
            }
            let d = self.get(c, col);
            if d == NONE {
                continue;
            }
            for k in 0..self.rotations[col].len() {
                if !self.is_live(c) {
                    break;
                }
                let word = std::mem::take(&mut self.rotations[col][k]);
                self.scan_and_deduce(c, &word);
                self.rotations[col][k] = word;
            }
            let inv = col ^ 1;
            let d = self.rep(d);
            for k in 0..self.rotations[inv].len() {
                if !self.is_live(d) {
                    break;
                }
                let word = std::mem::take(&mut self.rotations[inv][k]);
                self.scan_and_deduce(d, &word);
                self.rotations[inv][k] = word;
            }
            self.scan_subgroup();
        }
    }

    fn scan_subgroup(&mut self) {
        for k in 0..self.subgroup.len() {
            let w = std::mem::take(&mut self.subgroup[k]);
            self.scan_and_deduce(0, &w);
            self.subgroup[k] = w;
        }
    }

    fn first_gap(&mut self) -> Option<(u32, usize)> {
        let n = self.parent.len();
        while self.cursor < n {
            let c = self.cursor as u32;
            if self.is_live(c) {
                for col in 0..self.width {
                    if self.get(c, col) == NONE {
                        return Some((c, col));
                    }
                }
            }
            self.cursor += 1;
        }
        None
    }

    /// Full relator check over all live cosets; returns false if anything
    /// changed.
    fn verify_all(&mut self) -> bool {
        let before = (self.live, self.deductions.len());
        for c in 0..self.parent.len() as u32 {
            for k in 0..self.relators.len() {
                if !self.is_live(c) {
                    break;
                }
                let w = std::mem::take(&mut self.relators[k]);
                self.scan_and_deduce(c, &w);
                self.relators[k] = w;
            }
        }
        self.scan_subgroup();
        before == (self.live, self.deductions.len()) && self.deductions.is_empty()
    }

    fn run(&mut self) -> std::result::Result<(), Overflow> {
        self.scan_subgroup();
        loop {
            self.process_deductions();
            match self.first_gap() {
                Some((c, col)) => self.define(c, col)?,
                None => {
                    if self.verify_all() {
                        return Ok(());
                    }
                    self.cursor = 0;
                }
            }
        }
    }

    /// Drops dead cosets, renumbering live ones in order.
    fn compact_in_place(&mut self) {
        self.process_deductions();
        let n = self.parent.len();
        let mut newnum = vec![NONE; n];
        let mut next = 0u32;
        for (c, slot) in newnum.iter_mut().enumerate() {
            if self.parent[c] == c as u32 {
                *slot = next;
                next += 1;
            }
        }
        let mut table = vec![NONE; next as usize * self.width];
        for c in 0..n {
            if newnum[c] == NONE {
                continue;
            }
            for col in 0..self.width {
                let d = self.table[c * self.width + col];
                if d != NONE {
                    let r = self.rep(d);
                    table[newnum[c] as usize * self.width + col] = newnum[r as usize];
                }
            }
        }
        self.table = table;
        self.parent = (0..next).collect();
        self.deductions.clear();
        self.cursor = 0;
    }

    fn compact(mut self) -> CosetTable {
        self.compact_in_place();
        let index = self.parent.len();
        CosetTable::from_raw(self.width / 2, index, self.table)
    }
}
