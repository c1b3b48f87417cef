//! Smith normal form over the integers and first homology of subgroups.
//!
//! Relation matrices follow the convention "rows are relations, columns are
//! generators": the presented group is `Z^cols / rowspace(M)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coset::CosetTable;
use crate::error::{Error, Result};
use crate::lowindex::SubgroupClass;
use crate::presentation::GroupPresentation;
use crate::rewrite::{abelianized_subgroup_relations, SchreierTransversal};

/// Dense integer matrix with arbitrary-precision entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    /// From row vectors; all rows must have length `cols`.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = IntegerMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.entries[i * cols + j] = x.into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    fn at(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self.entries[src * self.cols + j] * q;
            self.entries[dst * self.cols + j] -= v;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = &self.entries[i * self.cols + src] * q;
            self.entries[i * self.cols + dst] -= v;
        }
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * other.get(k, j);
                    *out.at(i, j) += v;
                }
            }
        }
        out
    }
}

/// Result of [`smith_normal_form`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero diagonal entries, positive, each dividing the next.
    pub diagonal: Vec<BigInt>,
    /// Free rank of the cokernel, `cols − rank`.
    pub free_rank: usize,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Diagonalizes `m` by unimodular row and column operations, pivoting on the
/// entry of least absolute value.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Least nonzero |entry| in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = a.get(i, j);
                if !v.is_zero() && pivot.is_none_or(|(pi, pj)| v.abs() < a.get(pi, pj).abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                a.row_sub(i, t, &q);
                if !a.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                a.col_sub(j, t, &q);
                if !a.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A smaller remainder appeared in row/column t: move it to the pivot.
                let mut best = (t, t);
                for i in t..rows {
                    let v = a.get(i, t);
                    if !v.is_zero() && v.abs() < a.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    let v = a.get(t, j);
                    if !v.is_zero() && v.abs() < a.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                a.swap_rows(t, best.0);
                a.swap_cols(t, best.1);
                continue;
            }
            // Row and column cleared; enforce divisibility of the rest.
            let p = a.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = -BigInt::one();
                    a.row_sub(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            let v = -a.get(t, t).clone();
            *a.at(t, t) = v;
        }
        t += 1;
    }
    let diagonal: Vec<BigInt> = (0..t).map(|i| a.get(i, i).clone()).collect();
    debug_assert!(diagonal.windows(2).all(|w| w[1].is_multiple_of(&w[0])));
    SmithForm {
        free_rank: cols - diagonal.len(),
        diagonal,
    }
}

/// A finitely generated abelian group `Z^free_rank ⊕ Z/t₁ ⊕ … ⊕ Z/tₖ` with
/// `t₁ | t₂ | … | tₖ`, each `tᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianGroupType {
    pub free_rank: usize,
    #[serde(with = "bigint_list")]
    pub torsion: Vec<BigInt>,
}

mod bigint_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let texts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        texts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| t.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl AbelianGroupType {
    pub fn free(rank: usize) -> Self {
        AbelianGroupType {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Normalizes an arbitrary list of cyclic orders (0 meaning `Z`, 1
    /// ignored) into invariant-factor form.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let free_rank = orders.iter().filter(|&&q| q == 0).count();
        let mut torsion: Vec<BigInt> = orders.iter().filter(|&&q| q > 1).map(|&q| BigInt::from(q)).collect();
        // Diagonal matrix SNF gives invariant factors.
        let n = torsion.len();
        let mut m = IntegerMatrix::zeros(n, n);
        for (i, q) in torsion.drain(..).enumerate() {
            *m.at(i, i) = q;
        }
        let snf = smith_normal_form(&m);
        AbelianGroupType {
            free_rank,
            torsion: snf.torsion(),
        }
    }

    pub fn from_smith(s: &SmithForm) -> Self {
        AbelianGroupType {
            free_rank: s.free_rank,
            torsion: s.torsion(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Torsion as machine integers, when they fit.
    pub fn torsion_u64(&self) -> Option<Vec<u64>> {
        self.torsion.iter().map(|t| t.to_u64()).collect()
    }

    /// Primary (prime-power) decomposition of the torsion part, sorted; two
    /// groups are isomorphic iff free ranks and these lists agree.
    pub fn elementary_divisors(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for t in &self.torsion {
            let mut n = t.clone();
            let mut p = BigInt::from(2);
            while &p * &p <= n {
                let mut q = BigInt::one();
                while n.is_multiple_of(&p) {
                    n /= &p;
                    q *= &p;
                }
                if !q.is_one() {
                    out.push(q);
                }
                p += 1;
            }
            if !n.is_one() {
                out.push(n);
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for AbelianGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_homology(self))
    }
}

/// Compact notation: `1/q` for `Z/q`, `1` for `Z`, `^{+s}` for repeats, terms
/// joined by `+`, torsion first in ascending order; the trivial group is `0`.
pub fn format_homology(h: &AbelianGroupType) -> String {
    let mut terms = Vec::new();
    let mut torsion = h.torsion.clone();
    torsion.sort();
    let mut i = 0;
    while i < torsion.len() {
        let mut j = i;
        while j < torsion.len() && torsion[j] == torsion[i] {
            j += 1;
        }
        let s = j - i;
        if s == 1 {
            terms.push(format!("1/{}", torsion[i]));
        } else {
            terms.push(format!("1/{}^{{+{s}}}", torsion[i]));
        }
        i = j;
    }
    match h.free_rank {
        0 => {}
        1 => terms.push("1".into()),
        s => terms.push(format!("1^{{+{s}}}")),
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Parses the compact notation, also accepting the looser forms found in
/// printed tables: `1+1`, `1^{2}`, `\frac{1}{3}^{+2}`, `Z/2+Z`, and spaces.
pub fn parse_homology(text: &str) -> Result<AbelianGroupType> {
    let mut cleaned: String = text.chars().filter(|c| !c.is_whitespace() && *c != '$').collect();
    // \frac{1}{q} -> 1/q
    while let Some(at) = cleaned.find("\\frac{1}{") {
        let start = at + "\\frac{1}{".len();
        let Some(len) = cleaned[start..].find('}') else {
            break;
        };
        let q = cleaned[start..start + len].to_string();
        cleaned.replace_range(at..start + len + 1, &format!("1/{q}"));
    }
    if cleaned == "0" || cleaned.is_empty() {
        return Ok(AbelianGroupType::free(0));
    }
    let bad = || Error::Input(format!("cannot parse homology {text:?}"));
    let mut orders = Vec::new();
    // Split on '+' outside braces.
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in cleaned.chars() {
        match ch {
            '{' => {
                depth += 1;
                cur.push(ch)
            }
            '}' => {
                depth -= 1;
                cur.push(ch)
            }
            '+' if depth == 0 => terms.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    terms.push(cur);
    for term in terms {
        let (base, rep) = match term.split_once('^') {
            Some((b, e)) => {
                let e = e.trim_start_matches('{').trim_end_matches('}').trim_start_matches('+');
                (b.to_string(), e.parse::<usize>().map_err(|_| bad())?)
            }
            None => (term.clone(), 1),
        };
        let q: u64 = if base == "1" || base == "Z" {
            0
        } else if let Some(d) = base.strip_prefix("1/").or_else(|| base.strip_prefix("Z/")) {
            d.parse().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        orders.extend(std::iter::repeat_n(q, rep));
    }
    Ok(AbelianGroupType::from_cyclic_orders(&orders))
}

impl FromStr for AbelianGroupType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_homology(s)
    }
}

/// Abelianization of a presentation.
pub fn presentation_homology(p: &GroupPresentation) -> AbelianGroupType {
    let rows = p.abelianized_relations();
    let m = IntegerMatrix::from_rows(&rows, p.generator_count());
    AbelianGroupType::from_smith(&smith_normal_form(&m))
}

/// First homology of the subgroup described by `t`: rewritten relators
/// abelianized over the Schreier generators.
pub fn table_homology(p: &GroupPresentation, t: &CosetTable) -> AbelianGroupType {
    let (rows, cols) = abelianized_subgroup_relations(p, t);
    assert_eq!(
        cols,
        t.index() * (p.generator_count() - 1) + 1,
        "Schreier generator count must be index·(g−1)+1"
    );
    debug_assert_eq!(cols, SchreierTransversal::new(t).schreier_count());
    let m = IntegerMatrix::from_rows(&rows, cols);
    let snf = smith_normal_form(&m);
    assert_eq!(snf.free_rank, cols - snf.rank());
    AbelianGroupType::from_smith(&snf)
}

/// First homology of the subgroup class (cached in its tags when present).
pub fn subgroup_homology(s: &SubgroupClass) -> AbelianGroupType {
    if let Some(h) = &s.tags.homology {
        return h.clone();
    }
    table_homology(&s.parent, &s.table)
}
