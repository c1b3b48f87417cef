//! Point-line geometry read off the triple products `tr(ΠᵢΠⱼΠₖ)` of an orbit,
//! and recognition of the Hesse configuration, GQ(2,2) and the Petersen
//! graph by exact isomorphism.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recognized {
    HesseConfiguration,
    Gq22,
    PetersenComponent,
    None,
}

/// How the lines were chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineRule {
    /// Triples sharing one triple-product value (real part, |imaginary part|).
    ValueCluster,
    /// All triples with pairwise nonzero overlaps whose triple product is real.
    RealTriples,
    /// Triangles of the graph on the non-fiducial points joining `i, j` when
    /// `tr(Π₀ΠᵢΠⱼ)` is real and nonzero.
    AnchoredReal,
    /// No structure found.
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryInvariants {
    pub rule: LineRule,
    /// Triple-product value defining the lines, for the value-cluster rule.
    pub line_value: Option<(f64, f64)>,
    pub points: usize,
    pub lines: usize,
    /// Distinct line sizes.
    pub points_per_line: Vec<usize>,
    /// (lines through a point, number of such points).
    pub lines_per_point: Vec<(usize, usize)>,
    /// Sorted degree sequence of the pair graph.
    pub pair_graph_degrees: Vec<usize>,
    pub pair_graph_girth: Option<usize>,
    pub recognized_as: Recognized,
    /// Lines as sorted point lists (orbit indices).
    pub line_list: Vec<Vec<usize>>,
}

/// An abstract incidence structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub points: Vec<usize>,
    pub lines: Vec<Vec<usize>>,
}

impl Incidence {
    fn new(mut lines: Vec<Vec<usize>>) -> Self {
        for l in lines.iter_mut() {
            l.sort();
        }
        lines.sort();
        lines.dedup();
        let points: BTreeSet<usize> = lines.iter().flatten().copied().collect();
        Incidence {
            points: points.into_iter().collect(),
            lines,
        }
    }

    /// No two points on two common lines.
    fn is_partial_linear_space(&self) -> bool {
        let mut pairs = BTreeSet::new();
        for l in &self.lines {
            for (a, &x) in l.iter().enumerate() {
                for &y in &l[a + 1..] {
                    if !pairs.insert((x, y)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn lines_through(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for l in &self.lines {
            for &p in l {
                *m.entry(p).or_insert(0) += 1;
            }
        }
        m
    }

    fn constant_lines_per_point(&self) -> bool {
        let m = self.lines_through();
        let mut vals = m.values();
        match vals.next() {
            None => false,
            Some(first) => vals.all(|v| v == first),
        }
    }

    /// Collinearity graph on `points` (indices into `self.points`).
    pub fn pair_graph(&self) -> Graph {
        let idx: BTreeMap<usize, usize> = self.points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut g = Graph::empty(self.points.len());
        for l in &self.lines {
            for (a, x) in l.iter().enumerate() {
                for y in &l[a + 1..] {
                    g.add_edge(idx[x], idx[y]);
                }
            }
        }
        g
    }

    /// Exact isomorphism test by backtracking over point bijections.
    pub fn isomorphic(&self, other: &Incidence) -> bool {
        if self.points.len() != other.points.len() || self.lines.len() != other.lines.len() {
            return false;
        }
        let mut sizes_a: Vec<usize> = self.lines.iter().map(Vec::len).collect();
        let mut sizes_b: Vec<usize> = other.lines.iter().map(Vec::len).collect();
        sizes_a.sort();
        sizes_b.sort();
        if sizes_a != sizes_b {
            return false;
        }
        let relabel = |inc: &Incidence| -> (usize, Vec<Vec<usize>>) {
            let idx: BTreeMap<usize, usize> = inc.points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
            (inc.points.len(), inc.lines.iter().map(|l| l.iter().map(|p| idx[p]).collect()).collect())
        };
        let (n, la) = relabel(self);
        let (_, lb) = relabel(other);
        let set_b: BTreeSet<Vec<usize>> = lb.iter().cloned().collect();
        let deg = |lines: &[Vec<usize>]| {
            let mut d = vec![0usize; n];
            for l in lines {
                for &p in l {
                    d[p] += 1;
                }
            }
            d
        };
        let (da, db) = (deg(&la), deg(&lb));
        let mut by_point: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, l) in la.iter().enumerate() {
            for &p in l {
                by_point[p].push(i);
            }
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        #[allow(clippy::too_many_arguments)]
        fn go(
            k: usize,
            n: usize,
            la: &[Vec<usize>],
            by_point: &[Vec<usize>],
            set_b: &BTreeSet<Vec<usize>>,
            da: &[usize],
            db: &[usize],
            map: &mut [usize],
            used: &mut [bool],
        ) -> bool {
            if k == n {
                return true;
            }
            for t in 0..n {
                if used[t] || da[k] != db[t] {
                    continue;
                }
                map[k] = t;
                used[t] = true;
                let ok = by_point[k].iter().all(|&li| {
                    let l = &la[li];
                    if l.iter().any(|&p| p > k) {
                        return true;
                    }
                    let mut img: Vec<usize> = l.iter().map(|&p| map[p]).collect();
                    img.sort();
                    set_b.contains(&img)
                });
                if ok && go(k + 1, n, la, by_point, set_b, da, db, map, used) {
                    return true;
                }
                used[t] = false;
                map[k] = usize::MAX;
            }
            false
        }
        go(0, n, &la, &by_point, &set_b, &da, &db, &mut map, &mut used)
    }
}

/// Simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.adj.iter().map(BTreeSet::len).collect();
        d.sort();
        d
    }

    /// Length of a shortest cycle, `None` for a forest.
    pub fn girth(&self) -> Option<usize> {
        let n = self.order();
        let mut best: Option<usize> = None;
        for s in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut parent = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adj[x] {
                    if dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        parent[y] = x;
                        queue.push_back(y);
                    } else if parent[x] != y {
                        let len = dist[x] + dist[y] + 1;
                        if best.is_none_or(|b| len < b) {
                            best = Some(len);
                        }
                    }
                }
            }
        }
        best
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                for &y in &self.adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                }
                i += 1;
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let idx: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut g = Graph::empty(vertices.len());
        for &v in vertices {
            for w in &self.adj[v] {
                if let Some(&j) = idx.get(w) {
                    g.add_edge(idx[&v], j);
                }
            }
        }
        g
    }

    /// Exact isomorphism by backtracking with degree pruning.
    pub fn isomorphic(&self, other: &Graph) -> bool {
        let n = self.order();
        if n != other.order() || self.degrees() != other.degrees() {
            return false;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(k: usize, a: &Graph, b: &Graph, map: &mut [usize], used: &mut [bool]) -> bool {
            let n = a.order();
            if k == n {
                return true;
            }
            for t in 0..n {
                if used[t] || a.adj[k].len() != b.adj[t].len() {
                    continue;
                }
                let ok = (0..k).all(|j| a.adj[k].contains(&j) == b.adj[t].contains(&map[j]));
                if !ok {
                    continue;
                }
                map[k] = t;
                used[t] = true;
                if go(k + 1, a, b, map, used) {
                    return true;
                }
                used[t] = false;
            }
            false
        }
        go(0, self, other, &mut map, &mut used)
    }
}

/// The affine plane of order 3: 9 points, 12 lines of 3.
pub fn hesse_configuration() -> Incidence {
    let pt = |x: usize, y: usize| 3 * x + y;
    let mut lines = Vec::new();
    for (a, b) in [(0usize, 1usize), (1, 0), (1, 1), (1, 2)] {
        for c in 0..3 {
            let l: Vec<usize> = (0..3)
                .flat_map(|x| (0..3).map(move |y| (x, y)))
                .filter(|&(x, y)| (a * x + b * y) % 3 == c)
                .map(|(x, y)| pt(x, y))
                .collect();
            lines.push(l);
        }
    }
    Incidence::new(lines)
}

/// The generalized quadrangle of order two: non-zero vectors of F₂⁴ with the
/// symplectic form, lines the totally isotropic 2-spaces.
pub fn gq22() -> Incidence {
    let form = |u: usize, v: usize| {
        let (a1, b1, a2, b2) = (u >> 3 & 1, u >> 2 & 1, u >> 1 & 1, u & 1);
        let (c1, d1, c2, d2) = (v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1);
        (a1 * d1 + b1 * c1 + a2 * d2 + b2 * c2) % 2
    };
    let mut lines = Vec::new();
    for u in 1..16usize {
        for v in u + 1..16 {
            if form(u, v) == 0 {
                lines.push(vec![u, v, u ^ v]);
            }
        }
    }
    Incidence::new(lines)
}

/// The Petersen graph as the Kneser graph K(5,2).
pub fn petersen() -> Graph {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let mut g = Graph::empty(10);
    for (i, p) in pairs.iter().enumerate() {
        for (j, q) in pairs.iter().enumerate() {
            if p.0 != q.0 && p.0 != q.1 && p.1 != q.0 && p.1 != q.1 {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Recognizes an incidence structure against the built-in catalog.
pub fn recognize(inc: &Incidence) -> Recognized {
    if inc.points.len() <= 16 {
        if inc.isomorphic(&hesse_configuration()) {
            return Recognized::HesseConfiguration;
        }
        if inc.isomorphic(&gq22()) {
            return Recognized::Gq22;
        }
    }
    let g = inc.pair_graph();
    let pet = petersen();
    if g.components().iter().any(|c| c.len() == 10 && g.induced(c).isomorphic(&pet)) {
        return Recognized::PetersenComponent;
    }
    Recognized::None
}

fn triple(states: &[State], i: usize, j: usize, k: usize) -> Complex64 {
    states[i].dotc(&states[j]) * states[j].dotc(&states[k]) * states[k].dotc(&states[i])
}

/// Lines from the triple-product values. Rules are tried in order (single
/// value cluster, all real triples, fiducial-anchored real graph) and the first
/// recognized geometry wins; otherwise the value-cluster structure is reported.
pub fn triple_product_geometry(states: &[State], tol: f64) -> GeometryInvariants {
    let clustered = value_cluster_lines(states, tol);
    if let Some((inc, value)) = &clustered {
        let r = recognize(inc);
        if r != Recognized::None {
            return invariants(LineRule::ValueCluster, Some(*value), inc, r);
        }
    }
    for (rule, inc) in [
        (LineRule::RealTriples, real_triple_lines(states, tol)),
        (LineRule::AnchoredReal, anchored_lines(states, tol)),
    ] {
        if !inc.lines.is_empty() {
            let r = recognize(&inc);
            if r != Recognized::None {
                return invariants(rule, None, &inc, r);
            }
        }
    }
    match clustered {
        Some((inc, value)) => invariants(LineRule::ValueCluster, Some(value), &inc, Recognized::None),
        None => invariants(LineRule::Empty, None, &Incidence::new(Vec::new()), Recognized::None),
    }
}

fn invariants(rule: LineRule, value: Option<(f64, f64)>, inc: &Incidence, r: Recognized) -> GeometryInvariants {
    let g = inc.pair_graph();
    let mut ppl: Vec<usize> = inc.lines.iter().map(Vec::len).collect();
    ppl.sort();
    ppl.dedup();
    let mut lpp: BTreeMap<usize, usize> = BTreeMap::new();
    for v in inc.lines_through().values() {
        *lpp.entry(*v).or_insert(0) += 1;
    }
    let out = GeometryInvariants {
        rule,
        line_value: value,
        points: inc.points.len(),
        lines: inc.lines.len(),
        points_per_line: ppl,
        lines_per_point: lpp.into_iter().collect(),
        pair_graph_degrees: g.degrees(),
        pair_graph_girth: g.girth(),
        recognized_as: r,
        line_list: inc.lines.clone(),
    };
    debug_assert_eq!(
        out.lines_per_point.iter().map(|(k, m)| k * m).sum::<usize>(),
        inc.lines.iter().map(Vec::len).sum::<usize>()
    );
    out
}

/// Clusters triple products of triples with pairwise nonzero overlaps by
/// (real part, |imaginary part|); picks the smallest-modulus cluster whose
/// triples form a partial linear space with constant lines per point,
/// preferring more lines and then larger real part on ties.
fn value_cluster_lines(states: &[State], tol: f64) -> Option<(Incidence, (f64, f64))> {
    let n = states.len();
    let overlap_ok = |i: usize, j: usize| states[i].dotc(&states[j]).norm() > tol;
    let mut centers: Vec<(f64, f64)> = Vec::new();
    let mut members: Vec<Vec<Vec<usize>>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !overlap_ok(i, j) {
                continue;
            }
            for k in j + 1..n {
                if !overlap_ok(i, k) || !overlap_ok(j, k) {
                    continue;
                }
                let t = triple(states, i, j, k);
                let key = (t.re, t.im.abs());
                let slot = centers
                    .iter()
                    .position(|c| (c.0 - key.0).abs() <= tol && (c.1 - key.1).abs() <= tol);
                match slot {
                    Some(s) => members[s].push(vec![i, j, k]),
                    None => {
                        centers.push(key);
                        members.push(vec![vec![i, j, k]]);
                    }
                }
            }
        }
    }
    let mut candidates: Vec<(f64, usize, f64, Incidence)> = Vec::new();
    for (c, m) in centers.iter().zip(members) {
        let inc = Incidence::new(m);
        if inc.lines.len() >= 2 && inc.is_partial_linear_space() && inc.constant_lines_per_point() {
            candidates.push((c.0.hypot(c.1), inc.lines.len(), c.0, inc));
        }
    }
    candidates.sort_by(|a, b| {
        if (a.0 - b.0).abs() > tol {
            a.0.total_cmp(&b.0)
        } else {
            b.1.cmp(&a.1).then(b.2.total_cmp(&a.2))
        }
    });
    // Report the value as the cluster's (real, |imag|) center.
    candidates.into_iter().next().map(|(_, _, _, inc)| {
        let l = &inc.lines[0];
        let t = triple(states, l[0], l[1], l[2]);
        (inc, (t.re, t.im.abs()))
    })
}

fn real_triple_lines(states: &[State], tol: f64) -> Incidence {
    let n = states.len();
    let overlap_ok = |i: usize, j: usize| states[i].dotc(&states[j]).norm() > tol;
    let mut lines = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !overlap_ok(i, j) {
                continue;
            }
            for k in j + 1..n {
                if overlap_ok(i, k) && overlap_ok(j, k) && triple(states, i, j, k).im.abs() <= tol {
                    lines.push(vec![i, j, k]);
                }
            }
        }
    }
    Incidence::new(lines)
}

/// Triangles of the graph on points `1..n` joining `i, j` when
/// `tr(Π₀ΠᵢΠⱼ)` is real and nonzero.
fn anchored_lines(states: &[State], tol: f64) -> Incidence {
    let n = states.len();
    let mut g = Graph::empty(n);
    for i in 1..n {
        for j in i + 1..n {
            let t = triple(states, 0, i, j);
            if t.norm() > tol && t.im.abs() <= tol {
                g.add_edge(i, j);
            }
        }
    }
    let mut lines = Vec::new();
    for i in 1..n {
        for &j in g.adj[i].range(i + 1..) {
            for &k in g.adj[j].range(j + 1..) {
                if g.adj[i].contains(&k) {
                    lines.push(vec![i, j, k]);
                }
            }
        }
    }
    Incidence::new(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mic::pauli::{pauli_orbit, root_of_unity, PauliGroupSpec};

    fn unit(v: &[Complex64]) -> State {
        let s = State::from_column_slice(v);
        let n = s.norm();
        s / Complex64::new(n, 0.0)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn catalog_shapes() {
        let h = hesse_configuration();
        assert_eq!((h.points.len(), h.lines.len()), (9, 12));
        assert!(h.is_partial_linear_space());
        let q = gq22();
        assert_eq!((q.points.len(), q.lines.len()), (15, 15));
        assert!(q.lines_through().values().all(|&v| v == 3));
        let p = petersen();
        assert_eq!(p.degrees(), vec![3; 10]);
        assert_eq!(p.girth(), Some(5));
    }

    #[test]
    fn isomorphism_survives_relabelling() {
        let h = hesse_configuration();
        let perm = [4usize, 7, 1, 8, 0, 2, 6, 3, 5];
        let moved = Incidence::new(h.lines.iter().map(|l| l.iter().map(|&p| perm[p] + 100).collect()).collect());
        assert!(moved.isomorphic(&h));
        assert_eq!(recognize(&moved), Recognized::HesseConfiguration);
        assert!(!gq22().isomorphic(&h));
    }

    #[test]
    fn petersen_component_is_recognized() {
        // Lines of size 2 realize the Petersen graph as a pair graph, next to
        // an unrelated triangle.
        let p = petersen();
        let mut lines: Vec<Vec<usize>> = Vec::new();
        for (a, nb) in p.adj.iter().enumerate() {
            for &b in nb.range(a + 1..) {
                lines.push(vec![a, b]);
            }
        }
        lines.push(vec![20, 21, 22]);
        assert_eq!(recognize(&Incidence::new(lines)), Recognized::PetersenComponent);
        // A 10-cycle with chords is 3-regular but not Petersen (girth 4).
        let mut g = Graph::empty(10);
        for i in 0..10 {
            g.add_edge(i, (i + 1) % 10);
            g.add_edge(i, (i + 5) % 10);
        }
        assert_eq!(g.degrees(), vec![3; 10]);
        assert!(!g.isomorphic(&p));
    }

    #[test]
    fn hesse_sic_geometry() {
        let g = PauliGroupSpec::default_for(3).unwrap();
        let orbit = pauli_orbit(&unit(&[c(0.), c(1.), c(-1.)]), &g).unwrap();
        let geo = triple_product_geometry(&orbit, 1e-7);
        assert_eq!(geo.recognized_as, Recognized::HesseConfiguration);
        assert_eq!((geo.points, geo.lines), (9, 12));
        assert_eq!(geo.lines_per_point, vec![(4, 9)]);
        assert_eq!(geo.points_per_line, vec![3]);
    }

    #[test]
    fn both_magic_signs_give_hesse() {
        let g = PauliGroupSpec::default_for(3).unwrap();
        let orbit = pauli_orbit(&unit(&[c(0.), c(1.), c(1.)]), &g).unwrap();
        let geo = triple_product_geometry(&orbit, 1e-7);
        assert_eq!(geo.recognized_as, Recognized::HesseConfiguration);
        assert_eq!(geo.rule, LineRule::RealTriples);
    }

    #[test]
    fn two_qubit_mic_geometry_is_gq22() {
        let g = PauliGroupSpec::default_for(4).unwrap();
        let w = root_of_unity(3, 1);
        let orbit = pauli_orbit(&unit(&[c(0.), c(1.), w, w * w]), &g).unwrap();
        let geo = triple_product_geometry(&orbit, 1e-7);
        assert_eq!(geo.recognized_as, Recognized::Gq22);
        assert_eq!((geo.points, geo.lines), (15, 15));
        assert_eq!(geo.points_per_line, vec![3]);
        let total: usize = geo.lines_per_point.iter().map(|(k, m)| k * m).sum();
        assert_eq!(total, geo.lines * 3);
    }
}
