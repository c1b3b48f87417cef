//! Brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use bianchi_core::{GroupPresentation, Word};

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

fn satisfies(w: &Word, perms: &[Vec<usize>], invs: &[Vec<usize>]) -> bool {
    (0..perms[0].len()).all(|start| {
        let mut x = start;
        for &l in w.letters() {
            let k = l.unsigned_abs() as usize - 1;
            x = if l > 0 { perms[k][x] } else { invs[k][x] };
        }
        x == start
    })
}

fn transitive(perms: &[Vec<usize>]) -> bool {
    let d = perms[0].len();
    let mut seen = vec![false; d];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for p in perms {
            for y in [p[x], inverse(p)[x]] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Number of conjugacy classes of index-`d` subgroups: transitive actions on
/// `d` points satisfying every relator, up to relabelling the points.
pub fn transitive_tuple_eta(p: &GroupPresentation, d: usize) -> u64 {
    let n = p.generator_count();
    let all = permutations(d);
    let mut classes = std::collections::BTreeSet::new();
    let mut idx = vec![0usize; n];
    loop {
        let perms: Vec<Vec<usize>> = idx.iter().map(|&i| all[i].clone()).collect();
        let invs: Vec<Vec<usize>> = perms.iter().map(|q| inverse(q)).collect();
        if p.relators.iter().all(|w| satisfies(w, &perms, &invs)) && transitive(&perms) {
            let canon = all
                .iter()
                .map(|s| {
                    let si = inverse(s);
                    perms.iter().map(|g| (0..d).map(|x| s[g[si[x]]]).collect::<Vec<_>>()).collect::<Vec<_>>()
                })
                .min()
                .unwrap();
            classes.insert(canon);
        }
        let mut k = 0;
        loop {
            if k == n {
                return classes.len() as u64;
            }
            idx[k] += 1;
            if idx[k] < all.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| (0..n).filter(|i| b >> i & 1 == 1).collect())
        .collect()
}

/// Nonzero invariant factors from determinantal divisors: `d_k` is the gcd of
/// all `k × k` minors and the `k`-th factor is `d_k / d_{k-1}`.
pub fn determinantal_invariant_factors(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect()).collect();
                g = gcd(g, det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}
