//! Gram matrix rank, Hermitian angle spectrum and the SIC test.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{projector_sum, State};

/// Default relative threshold for the Gram rank.
pub const GRAM_TOL: f64 = 1e-8;
/// Default clustering tolerance for overlap moduli.
pub const ANGLE_TOL: f64 = 1e-7;

/// `Gᵢⱼ = |⟨ψᵢ|ψⱼ⟩|²`.
pub fn gram_matrix(states: &[State]) -> DMatrix<f64> {
    let n = states.len();
    DMatrix::from_fn(n, n, |i, j| states[i].dotc(&states[j]).norm_sqr())
}

/// Number of eigenvalues of the (positive semidefinite) Gram matrix above
/// `tol` times the largest one.
pub fn gram_rank(states: &[State], tol: f64) -> usize {
    if states.is_empty() {
        return 0;
    }
    let eig = SymmetricEigen::new(gram_matrix(states));
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if max == 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&x| x.abs() > tol * max).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleClass {
    pub value: f64,
    pub multiplicity: usize,
}

/// Distinct `|⟨ψᵢ|ψⱼ⟩|`, `i < j`, clustered within `tol`, ascending.
pub fn angle_spectrum(states: &[State], tol: f64) -> Vec<AngleClass> {
    let mut values = Vec::with_capacity(states.len() * states.len() / 2);
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            values.push(states[i].dotc(&states[j]).norm());
        }
    }
    cluster_sorted(values, tol)
        .into_iter()
        .map(|(value, multiplicity)| AngleClass { value, multiplicity })
        .collect()
}

/// Groups sorted reals into runs whose consecutive gaps are at most `tol`;
/// each run is reported by its mean.
pub(crate) fn cluster_sorted(mut values: Vec<f64>, tol: f64) -> Vec<(f64, usize)> {
    values.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some((sum, count, last)) if v - *last <= tol => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(sum, count, _)| (sum / count as f64, count)).collect()
}

/// All off-diagonal `|⟨ψᵢ|ψⱼ⟩|²` equal `1/(d+1)` within `tol`.
pub fn is_sic(states: &[State], tol: f64) -> bool {
    let Some(d) = states.first().map(|s| s.len()) else {
        return false;
    };
    if states.len() != d * d {
        return false;
    }
    let target = 1.0 / (d as f64 + 1.0);
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            if (states[i].dotc(&states[j]).norm_sqr() - target).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Largest entry modulus of `Σᵢ Πᵢ / d − I`.
pub fn resolution_defect(states: &[State]) -> f64 {
    let Some(d) = states.first().map(|s| s.len()) else {
        return 0.0;
    };
    let sum = projector_sum(states) / Complex64::new(d as f64, 0.0);
    let diff = sum - DMatrix::<Complex64>::identity(d, d);
    diff.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mic::pauli::{pauli_orbit, PauliGroupSpec};

    fn state(v: &[Complex64]) -> State {
        let s = State::from_column_slice(v);
        let n = s.norm();
        s / Complex64::new(n, 0.0)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hesse_fiducial_is_sic() {
        let g = PauliGroupSpec::default_for(3).unwrap();
        let orbit = pauli_orbit(&state(&[c(0., 0.), c(1., 0.), c(-1., 0.)]), &g).unwrap();
        assert_eq!(gram_rank(&orbit, GRAM_TOL), 9);
        let spec = angle_spectrum(&orbit, ANGLE_TOL);
        assert_eq!(spec.len(), 1);
        assert!((spec[0].value - 0.5).abs() < 1e-10);
        assert_eq!(spec[0].multiplicity, 36);
        assert!(is_sic(&orbit, 1e-10));
        assert!(resolution_defect(&orbit) < 1e-10);
    }

    #[test]
    fn basis_state_is_not_a_mic() {
        for d in 2..=6 {
            let g = PauliGroupSpec::default_for(d).unwrap();
            let mut v = vec![c(0., 0.); d];
            v[0] = c(1., 0.);
            let orbit = pauli_orbit(&state(&v), &g).unwrap();
            assert_eq!(gram_rank(&orbit, GRAM_TOL), d);
            assert!(!is_sic(&orbit, 1e-10));
        }
        let g = PauliGroupSpec::default_for(2).unwrap();
        let orbit = pauli_orbit(&state(&[c(1., 0.), c(0., 0.)]), &g).unwrap();
        let values: Vec<f64> = angle_spectrum(&orbit, ANGLE_TOL).iter().map(|a| a.value).collect();
        assert_eq!(values.len(), 2);
        assert!(values[0].abs() < 1e-12 && (values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clustering_merges_close_values() {
        let out = cluster_sorted(vec![0.5, 0.1, 0.5 + 1e-9, 0.1 - 1e-9, 0.9], 1e-7);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].1, 2);
        assert_eq!(out[2].1, 1);
    }
}
