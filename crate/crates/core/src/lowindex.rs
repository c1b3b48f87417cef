//! Conjugacy classes of subgroups of small index by backtracking over partial
//! coset tables, with in-search canonicity pruning.
//!
//! The search fills the first undefined table entry (row-major, columns
//! `gen1, gen1⁻¹, gen2, …`) with either an existing coset whose inverse slot
//! is free or a fresh coset, propagates relator deductions, and rejects any
//! partial table that is not lexicographically least among its
//! re-standardizations from other base points. Each surviving complete table
//! is the canonical representative of one conjugacy class.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coset::{columns, CosetTable};
use crate::error::{Error, Result};
use crate::homology::{table_homology, AbelianGroupType};
use crate::presentation::GroupPresentation;
use crate::rewrite::SchreierTransversal;

const NONE: u32 = u32::MAX;

/// Search limits. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn seconds(s: f64) -> Self {
        Budget {
            max_nodes: None,
            max_seconds: Some(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoveringType {
    Cyclic,
    Regular,
    Irregular,
}

impl CoveringType {
    /// Three-letter prefix used in covering tables.
    pub fn prefix(self) -> &'static str {
        match self {
            CoveringType::Cyclic => "cyc",
            CoveringType::Regular => "reg",
            CoveringType::Irregular => "irr",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTags {
    pub torsion_free: Option<bool>,
    pub covering_type: Option<CoveringType>,
    pub cusps: Option<usize>,
    pub homology: Option<AbelianGroupType>,
}

/// One conjugacy class of subgroups, represented by its canonical table.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    pub parent: Arc<GroupPresentation>,
    pub index: usize,
    pub table: CosetTable,
    pub tags: ClassTags,
}

impl SubgroupClass {
    pub fn new(parent: Arc<GroupPresentation>, table: CosetTable) -> Self {
        SubgroupClass {
            parent,
            index: table.index(),
            table,
            tags: ClassTags::default(),
        }
    }

    /// Fills covering type, homology, cusps (when peripheral data exists) and
    /// torsion-freeness (when torsion data exists).
    pub fn annotate(&mut self) {
        self.tags.covering_type = Some(covering_type(self));
        self.tags.homology = Some(table_homology(&self.parent, &self.table));
        if !self.parent.peripheral.is_empty() {
            self.tags.cusps = cusp_count(self).ok();
        }
        self.tags.torsion_free = is_torsion_free(self).ok();
    }

    pub fn annotated(mut self) -> Self {
        self.annotate();
        self
    }
}

/// `counts[i]` = number of classes of index `i + 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureVector {
    pub counts: Vec<u64>,
}

impl SignatureVector {
    /// Count at index `d ≥ 2`.
    pub fn at(&self, d: usize) -> Option<u64> {
        d.checked_sub(2).and_then(|i| self.counts.get(i)).copied()
    }

    /// Largest index covered.
    pub fn depth(&self) -> usize {
        self.counts.len() + 1
    }
}

/// Extra search constraints.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// Prune tables in which some torsion representative has a short cycle.
    pub torsion_free_only: bool,
}

/// Result of a (possibly interrupted) search.
#[derive(Clone, Debug)]
pub struct LowIndexOutcome {
    /// Classes sorted by index, then canonical table.
    pub classes: Vec<SubgroupClass>,
    /// Largest index whose classes are complete.
    pub completed_index: usize,
    pub exhausted: bool,
    pub nodes: u64,
}

impl LowIndexOutcome {
    pub fn signature(&self) -> SignatureVector {
        let depth = self.completed_index;
        let mut counts = vec![0u64; depth.saturating_sub(1)];
        for c in &self.classes {
            if (2..=depth).contains(&c.index) {
                counts[c.index - 2] += 1;
            }
        }
        SignatureVector { counts }
    }
}

/// Exactly one class per conjugacy class of subgroups of index `1..=d_max`,
/// sorted by index then canonical table.
pub fn low_index_classes(p: &GroupPresentation, d_max: usize, budget: Budget) -> Result<Vec<SubgroupClass>> {
    let out = low_index_search(p, d_max, budget, SearchOptions::default());
    if out.exhausted {
        return Err(Error::BudgetExhausted {
            completed_index: out.completed_index,
        });
    }
    Ok(out.classes)
}

/// Cardinality signature `[η₂, …, η_{d_max}]`.
pub fn eta_signature(p: &GroupPresentation, d_max: usize, budget: Budget) -> Result<SignatureVector> {
    let out = low_index_search(p, d_max, budget, SearchOptions::default());
    if out.exhausted {
        return Err(Error::BudgetExhausted {
            completed_index: out.completed_index,
        });
    }
    Ok(out.signature())
}

/// Index-by-index search that stops cleanly when the budget runs out.
pub fn low_index_search(p: &GroupPresentation, d_max: usize, budget: Budget, opts: SearchOptions) -> LowIndexOutcome {
    assert!(d_max >= 1, "d_max must be at least 1");
    let parent = Arc::new(p.clone());
    let shared = Shared::new(budget);
    let spec = SearchSpec::new(p, opts);
    let mut classes = Vec::new();
    let mut completed = 0;
    for d in 1..=d_max {
        match search_index(&spec, d, &shared) {
            Some(tables) => {
                classes.extend(tables.into_iter().map(|t| SubgroupClass::new(parent.clone(), t)));
                completed = d;
            }
            None => break,
        }
    }
    LowIndexOutcome {
        classes,
        completed_index: completed,
        exhausted: completed < d_max,
        nodes: shared.nodes.load(Ordering::Relaxed),
    }
}

/// Classes of exactly index `d` (convenience for callers that do not need
/// lower indices).
pub fn classes_of_index(p: &GroupPresentation, d: usize, budget: Budget, opts: SearchOptions) -> Result<Vec<SubgroupClass>> {
    let parent = Arc::new(p.clone());
    let shared = Shared::new(budget);
    let spec = SearchSpec::new(p, opts);
    match search_index(&spec, d, &shared) {
        Some(tables) => Ok(tables.into_iter().map(|t| SubgroupClass::new(parent.clone(), t)).collect()),
        None => Err(Error::BudgetExhausted {
            completed_index: d - 1,
        }),
    }
}

/// True iff, for every torsion representative `(t, n)`, every cycle of `t` on
/// the cosets has length exactly `n`.
///
/// Parents with an empty torsion list are torsion-free. The test detects
/// conjugates of powers of the listed representatives only, so the list must
/// be complete up to conjugacy and powers.
pub fn is_torsion_free(s: &SubgroupClass) -> Result<bool> {
    Ok(s.parent
        .torsion_reps
        .iter()
        .all(|t| all_cycles_have_length(&s.table.word_permutation(&t.word), t.order as usize)))
}

fn all_cycles_have_length(perm: &[usize], n: usize) -> bool {
    let mut seen = vec![false; perm.len()];
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len != n {
            return false;
        }
    }
    true
}

/// Regular iff every base point yields the same standardized table (all point
/// stabilizers coincide); cyclic iff additionally some element acts as a
/// full-length cycle.
pub fn covering_type(s: &SubgroupClass) -> CoveringType {
    let t = &s.table;
    let base = t.standardize_from(0);
    if !(1..t.index()).all(|b| t.standardize_from(b) == base) {
        return CoveringType::Irregular;
    }
    // Regular: the image group has order `index`, one element per coset, namely
    // the image of the transversal word of that coset.
    let tr = SchreierTransversal::new(t);
    let n = t.index();
    let cyclic = n == 1
        || tr.representatives.iter().any(|w| {
            let perm = t.word_permutation(w);
            let mut x = perm[0];
            let mut len = 1;
            while x != 0 {
                x = perm[x];
                len += 1;
            }
            len == n
        });
    if cyclic {
        CoveringType::Cyclic
    } else {
        CoveringType::Regular
    }
}

/// Sum over parent cusps of the number of orbits of the cusp subgroup on the
/// cosets.
pub fn cusp_count(s: &SubgroupClass) -> Result<usize> {
    if s.parent.peripheral.is_empty() {
        return Err(Error::Precondition("parent has no peripheral data".into()));
    }
    let n = s.table.index();
    let mut total = 0;
    for pair in &s.parent.peripheral {
        let perms: Vec<Vec<usize>> = pair.generators().map(|w| s.table.word_permutation(w)).collect();
        let mut seen = vec![false; n];
        for start in 0..n {
            if seen[start] {
                continue;
            }
            total += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for p in &perms {
                    if !seen[p[x]] {
                        seen[p[x]] = true;
                        stack.push(p[x]);
                    }
                }
            }
        }
    }
    Ok(total)
}

struct Shared {
    budget: Budget,
    start: Instant,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Shared {
    fn new(budget: Budget) -> Self {
        Shared {
            budget,
            start: Instant::now(),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    /// Adds `n` visited nodes; returns false once the budget is spent.
    fn charge(&self, n: u64) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        let over_nodes = self.budget.max_nodes.is_some_and(|m| total > m);
        let over_time = self
            .budget
            .max_seconds
            .is_some_and(|s| self.start.elapsed() > Duration::from_secs_f64(s));
        if over_nodes || over_time {
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

/// Relator data prepared once per presentation.
struct SearchSpec {
    generators: usize,
    width: usize,
    /// Cyclic rotations of relators and inverses, grouped by first column.
    rotations: Vec<Vec<Vec<usize>>>,
    relators: Vec<Vec<usize>>,
    /// Torsion words as columns with their orders (for optional pruning).
    torsion: Vec<(Vec<usize>, usize)>,
    torsion_free_only: bool,
}

impl SearchSpec {
    fn new(p: &GroupPresentation, opts: SearchOptions) -> Self {
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
            list.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            list.dedup();
        }
        let mut torsion: Vec<(Vec<usize>, usize)> = p
            .torsion_reps
            .iter()
            .map(|t| (columns(&t.word), t.order as usize))
            .collect();
        torsion.sort_by_key(|t| t.0.len() * t.1);
        SearchSpec {
            generators: p.generator_count(),
            width,
            rotations,
            relators,
            torsion,
            torsion_free_only: opts.torsion_free_only,
        }
    }
}

/// Mutable search state with an undo trail.
#[derive(Clone)]
struct State {
    width: usize,
    index: usize,
    table: Vec<u32>,
    /// Number of cosets in use.
    n: usize,
    trail: Vec<u32>,
    deductions: Vec<(u32, usize)>,
    cursor: usize,
    // Scratch buffers for the canonicity test.
    map: Vec<u32>,
    order: Vec<u32>,
}

impl State {
    fn new(spec: &SearchSpec, index: usize) -> Self {
        State {
            width: spec.width,
            index,
            table: vec![NONE; index * spec.width],
            n: 1,
            trail: Vec::with_capacity(index * spec.width),
            deductions: Vec::new(),
            cursor: 0,
            map: vec![NONE; index],
            order: Vec::with_capacity(index),
        }
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.width + col]
    }

    #[inline]
    fn set_pair(&mut self, c: u32, col: usize, d: u32) {
        let a = c as usize * self.width + col;
        let b = d as usize * self.width + (col ^ 1);
        self.table[a] = d;
        self.table[b] = c;
        self.trail.push(a as u32);
        if a != b {
            self.trail.push(b as u32);
        }
        self.deductions.push((c, col));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let pos = self.trail.pop().unwrap();
            self.table[pos as usize] = NONE;
        }
    }

    /// First undefined entry at or after the cursor.
    fn next_gap(&mut self) -> Option<(u32, usize)> {
        let limit = self.n * self.width;
        while self.cursor < limit {
            if self.table[self.cursor] == NONE {
                return Some(((self.cursor / self.width) as u32, self.cursor % self.width));
            }
            self.cursor += 1;
        }
        None
    }

    /// Scans one relator rotation from `c`; fills a single gap. Returns false
    /// on a contradiction.
    #[inline]
    fn scan(&mut self, c: u32, word: &[usize]) -> bool {
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
            return f == c;
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
            return f == b;
        }
        if j == i + 1 {
            let col = word[i];
            if self.get(b, col ^ 1) != NONE {
                return false;
            }
            self.set_pair(f, col, b);
        }
        true
    }

    fn propagate(&mut self, spec: &SearchSpec) -> bool {
        while let Some((c, col)) = self.deductions.pop() {
            for w in &spec.rotations[col] {
                if !self.scan(c, w) {
                    self.deductions.clear();
                    return false;
                }
            }
        }
        true
    }

    /// Partial canonicity: no base point `b ≠ 0` gives a standardized table
    /// that is already lexicographically smaller on the determined prefix.
    fn is_canonical(&mut self) -> bool {
        let width = self.width;
        for b in 1..self.n as u32 {
            for m in self.map.iter_mut() {
                *m = NONE;
            }
            self.order.clear();
            self.map[b as usize] = 0;
            self.order.push(b);
            let mut i = 0;
            let verdict = 'scan: loop {
                if i >= self.order.len() {
                    break 'scan 0i8;
                }
                let old = self.order[i];
                for col in 0..width {
                    let here = self.table[i * width + col];
                    let there = self.table[old as usize * width + col];
                    if here == NONE || there == NONE {
                        break 'scan 0;
                    }
                    let mut mapped = self.map[there as usize];
                    if mapped == NONE {
                        mapped = self.order.len() as u32;
                        self.map[there as usize] = mapped;
                        self.order.push(there);
                    }
                    if mapped < here {
                        break 'scan -1;
                    }
                    if mapped > here {
                        break 'scan 1;
                    }
                }
                i += 1;
            };
            if verdict < 0 {
                return false;
            }
        }
        true
    }

    /// Rejects tables where a torsion word provably has a cycle shorter than
    /// its order.
    fn torsion_ok(&self, spec: &SearchSpec, complete: bool) -> bool {
        for (w, order) in &spec.torsion {
            if !complete && w.len() * order > 8 {
                continue;
            }
            for c in 0..self.n as u32 {
                let mut x = c;
                'powers: for k in 1..=*order {
                    for &col in w {
                        let y = self.get(x, col);
                        if y == NONE {
                            break 'powers;
                        }
                        x = y;
                    }
                    if x == c {
                        if k < *order {
                            return false;
                        }
                        break;
                    }
                    if k == *order {
                        // t^order must fix every coset.
                        return false;
                    }
                }
            }
        }
        true
    }

    fn to_table(&self, generators: usize) -> CosetTable {
        CosetTable::from_raw(generators, self.index, self.table.clone())
    }
}

/// Complete canonical tables of exactly index `d`, or `None` if the budget
/// ran out.
fn search_index(spec: &SearchSpec, d: usize, shared: &Shared) -> Option<Vec<CosetTable>> {
    if d == 1 {
        // The whole group: one coset fixed by everything.
        let t = CosetTable::from_raw(spec.generators, 1, vec![0; spec.width]);
        if spec.torsion_free_only && !spec.torsion.is_empty() {
            return Some(Vec::new());
        }
        return Some(vec![t]);
    }
    let mut found = Vec::new();
    // Breadth-first expansion to a frontier, then parallel depth-first search.
    let target = 64 * rayon::current_num_threads().max(1);
    let mut frontier = vec![State::new(spec, d)];
    for _ in 0..6 {
        if frontier.len() >= target {
            break;
        }
        let mut next = Vec::new();
        for mut s in frontier {
            if !shared.charge(1) {
                return None;
            }
            match s.next_gap() {
                None => {
                    if let Some(t) = finish(spec, &s) {
                        found.push(t);
                    }
                }
                Some((c, col)) => {
                    for e in branch_targets(&s, col) {
                        let mut child = s.clone();
                        if try_assign(spec, &mut child, c, col, e) {
                            child.trail.clear();
                            next.push(child);
                        }
                    }
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let results: Vec<Option<Vec<CosetTable>>> = frontier
        .into_par_iter()
        .map(|mut s| {
            let mut out = Vec::new();
            let mut local = 0u64;
            if dfs(spec, &mut s, shared, &mut out, &mut local) {
                shared.charge(local);
                Some(out)
            } else {
                None
            }
        })
        .collect();
    for r in results {
        found.extend(r?);
    }
    found.sort();
    found.dedup();
    Some(found)
}

fn branch_targets(s: &State, col: usize) -> Vec<u32> {
    let mut v: Vec<u32> = (0..s.n as u32).filter(|&e| s.get(e, col ^ 1) == NONE).collect();
    if s.n < s.index {
        v.push(s.n as u32);
    }
    v
}

/// Assigns `c·col = e` (creating coset `e` if new) and propagates; leaves the
/// state modified (caller undoes on failure via the trail).
fn try_assign(spec: &SearchSpec, s: &mut State, c: u32, col: usize, e: u32) -> bool {
    if e as usize == s.n {
        s.n += 1;
    }
    s.set_pair(c, col, e);
    s.propagate(spec) && s.is_canonical() && (!spec.torsion_free_only || s.torsion_ok(spec, false))
}

fn finish(spec: &SearchSpec, s: &State) -> Option<CosetTable> {
    if s.n != s.index {
        return None;
    }
    if spec.torsion_free_only && !s.torsion_ok(spec, true) {
        return None;
    }
    let t = s.to_table(spec.generators);
    debug_assert!(spec
        .relators
        .iter()
        .all(|r| (0..s.index as u32).all(|c| r.iter().fold(c, |x, &col| s.get(x, col)) == c)));
    Some(t)
}

const CHARGE_EVERY: u64 = 4096;

/// Returns false when the budget is exhausted.
fn dfs(spec: &SearchSpec, s: &mut State, shared: &Shared, out: &mut Vec<CosetTable>, local: &mut u64) -> bool {
    *local += 1;
    if *local >= CHARGE_EVERY {
        if !shared.charge(*local) {
            return false;
        }
        *local = 0;
    }
    let Some((c, col)) = s.next_gap() else {
        if let Some(t) = finish(spec, s) {
            out.push(t);
        }
        return true;
    };
    let mark = s.trail.len();
    let (saved_n, saved_cursor) = (s.n, s.cursor);
    let limit = if s.n < s.index { s.n + 1 } else { s.n };
    for e in 0..limit as u32 {
        if (e as usize) < s.n && s.get(e, col ^ 1) != NONE {
            continue;
        }
        if try_assign(spec, s, c, col, e) && !dfs(spec, s, shared, out, local) {
            return false;
        }
        s.undo_to(mark);
        s.deductions.clear();
        s.n = saved_n;
        s.cursor = saved_cursor;
    }
    true
}
