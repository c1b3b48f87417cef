//! Stabilizer states and the non-stabilizer test.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::{root_of_unity, PauliFlavor, PauliGroupSpec, State};

/// Whether the exact stabilizer catalog is available for this group. When it
/// is not (composite qudit dimensions), [`non_stabilizer`] falls back to the
/// weaker "eigenvector of some non-identity Pauli" test.
pub fn has_exact_catalog(g: &PauliGroupSpec) -> bool {
    match g.flavor {
        PauliFlavor::MultiQubit => g.dimension == 2 || g.dimension == 4,
        PauliFlavor::QuditWeylHeisenberg => is_prime(g.dimension),
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Stabilizer states of the group: `d(d+1)` states from the `d+1` mutually
/// unbiased eigenbases for prime qudit dimension, 60 states for two qubits.
/// Empty when no exact catalog is available.
pub fn stabilizer_catalog(g: &PauliGroupSpec) -> Vec<State> {
    let d = g.dimension;
    let ops = g.operators();
    match g.flavor {
        PauliFlavor::QuditWeylHeisenberg if is_prime(d) => {
            // Maximal abelian subgroups are generated by Z and by X Z^b.
            let mut gens = vec![ops[1].clone()];
            for b in 0..d {
                gens.push(ops[d + b].clone());
            }
            gens.iter().flat_map(|u| eigenbasis(u, d)).collect()
        }
        PauliFlavor::MultiQubit if d == 2 => [1usize, 2, 3].iter().flat_map(|&k| eigenbasis(&ops[k], 2)).collect(),
        PauliFlavor::MultiQubit if d == 4 => {
            let mut out = Vec::new();
            for (p, q) in commuting_pairs(&ops) {
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        let id = DMatrix::<Complex64>::identity(4, 4);
                        let proj = (&id + &ops[p] * Complex64::new(s1, 0.0)) * (&id + &ops[q] * Complex64::new(s2, 0.0));
                        out.push(best_column(&proj));
                    }
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

/// One generating pair for each of the 15 maximal commuting sets of
/// non-identity two-qubit Paulis.
fn commuting_pairs(ops: &[DMatrix<Complex64>]) -> Vec<(usize, usize)> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for p in 1..16 {
        for q in p + 1..16 {
            if (&ops[p] * &ops[q] - &ops[q] * &ops[p]).norm() > 1e-9 {
                continue;
            }
            let r = (1..16)
                .find(|&r| {
                    let prod = &ops[p] * &ops[q];
                    let overlap = (ops[r].adjoint() * &prod).trace().norm();
                    (overlap - 4.0).abs() < 1e-9
                })
                .expect("product of Paulis is a Pauli up to phase");
            let mut key = [p, q, r];
            key.sort();
            if seen.insert(key) {
                out.push((p, q));
            }
        }
    }
    out
}

/// Normalized column of largest norm.
fn best_column(m: &DMatrix<Complex64>) -> State {
    let col = (0..m.ncols())
        .max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm()))
        .expect("nonempty");
    let v = m.column(col).into_owned();
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Eigenvectors of a unitary `u` with `u^d ∝ I` and `d` distinct eigenvalues,
/// via the spectral projectors `(1/d) Σⱼ (λ̄u)ʲ`.
fn eigenbasis(u: &DMatrix<Complex64>, d: usize) -> Vec<State> {
    let n = u.nrows();
    let mut ud = DMatrix::<Complex64>::identity(n, n);
    for _ in 0..d {
        ud = &ud * u;
    }
    let phase = ud[(0, 0)];
    let scale = Complex64::from_polar(1.0, -phase.arg() / d as f64);
    let v = u * scale;
    (0..d)
        .map(|k| {
            let lam = root_of_unity(d, -(k as i64));
            let mut acc = DMatrix::<Complex64>::zeros(n, n);
            let mut pow = DMatrix::<Complex64>::identity(n, n);
            let step = &v * lam;
            for _ in 0..d {
                acc += &pow;
                pow = &pow * &step;
            }
            best_column(&acc)
        })
        .collect()
}

/// False iff `f` is (within `tol`, up to phase) a stabilizer state.
///
/// Uses the exact catalog when available; otherwise reports false whenever
/// `f` is an eigenvector of any non-identity Pauli element (a heuristic).
pub fn non_stabilizer(f: &State, g: &PauliGroupSpec, tol: f64) -> bool {
    if f.len() != g.dimension {
        return false;
    }
    if has_exact_catalog(g) {
        let catalog = stabilizer_catalog(g);
        !catalog.iter().any(|s| (s.dotc(f).norm() - 1.0).abs() < tol)
    } else {
        !g.operators()
            .iter()
            .skip(1)
            .any(|op| (f.dotc(&(op * f)).norm() - 1.0).abs() < tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(v: &[Complex64]) -> State {
        let s = State::from_column_slice(v);
        let n = s.norm();
        s / c(n, 0.0)
    }

    #[test]
    fn catalog_sizes() {
        assert_eq!(stabilizer_catalog(&PauliGroupSpec::default_for(2).unwrap()).len(), 6);
        assert_eq!(stabilizer_catalog(&PauliGroupSpec::default_for(3).unwrap()).len(), 12);
        assert_eq!(stabilizer_catalog(&PauliGroupSpec::default_for(4).unwrap()).len(), 60);
        assert_eq!(stabilizer_catalog(&PauliGroupSpec::default_for(5).unwrap()).len(), 30);
        assert!(stabilizer_catalog(&PauliGroupSpec::default_for(6).unwrap()).is_empty());
    }

    #[test]
    fn qutrit_catalog_states_are_distinct_and_unbiased() {
        let cat = stabilizer_catalog(&PauliGroupSpec::default_for(3).unwrap());
        for (i, a) in cat.iter().enumerate() {
            assert!((a.norm() - 1.0).abs() < 1e-12);
            for b in &cat[i + 1..] {
                let o = a.dotc(b).norm_sqr();
                assert!(o < 1e-12 || (o - 1.0 / 3.0).abs() < 1e-12, "overlap {o}");
            }
        }
    }

    #[test]
    fn two_qubit_catalog_states_are_distinct() {
        let cat = stabilizer_catalog(&PauliGroupSpec::default_for(4).unwrap());
        for (i, a) in cat.iter().enumerate() {
            for b in &cat[i + 1..] {
                assert!(a.dotc(b).norm() < 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn non_stabilizer_examples() {
        let g3 = PauliGroupSpec::default_for(3).unwrap();
        assert!(!non_stabilizer(&unit(&[c(1., 0.), c(0., 0.), c(0., 0.)]), &g3, 1e-9));
        assert!(non_stabilizer(&unit(&[c(0., 0.), c(1., 0.), c(-1., 0.)]), &g3, 1e-9));
        let g2 = PauliGroupSpec::default_for(2).unwrap();
        assert!(!non_stabilizer(&unit(&[c(1., 0.), c(1., 0.)]), &g2, 1e-9));
        let g6 = PauliGroupSpec::default_for(6).unwrap();
        let mut e0 = vec![c(0., 0.); 6];
        e0[0] = c(1., 0.);
        assert!(!non_stabilizer(&unit(&e0), &g6, 1e-9));
        assert!(!has_exact_catalog(&g6));
    }
}
