//! Generalized Pauli groups: qudit clock-and-shift and multi-qubit tensor
//! Paulis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type State = DVector<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PauliFlavor {
    QuditWeylHeisenberg,
    MultiQubit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliGroupSpec {
    pub dimension: usize,
    pub flavor: PauliFlavor,
}

impl PauliGroupSpec {
    pub fn new(dimension: usize, flavor: PauliFlavor) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Input("dimension must be at least 2".into()));
        }
        if flavor == PauliFlavor::MultiQubit && !dimension.is_power_of_two() {
            return Err(Error::Input(format!("{dimension} is not a power of two")));
        }
        Ok(PauliGroupSpec { dimension, flavor })
    }

    /// Two-qubit Paulis for d = 4, clock-and-shift otherwise.
    pub fn default_for(dimension: usize) -> Result<Self> {
        let flavor = if dimension == 4 {
            PauliFlavor::MultiQubit
        } else {
            PauliFlavor::QuditWeylHeisenberg
        };
        PauliGroupSpec::new(dimension, flavor)
    }

    pub fn qubits(&self) -> Option<usize> {
        match self.flavor {
            PauliFlavor::MultiQubit => Some(self.dimension.trailing_zeros() as usize),
            PauliFlavor::QuditWeylHeisenberg => None,
        }
    }

    /// One operator per projective group element, identity first. Qudit order:
    /// `X^a Z^b` at position `a·d + b`; qubit order: tensor words over
    /// `I, X, Y, Z` read lexicographically, first qubit most significant.
    pub fn operators(&self) -> Vec<DMatrix<Complex64>> {
        let d = self.dimension;
        match self.flavor {
            PauliFlavor::QuditWeylHeisenberg => {
                let x = shift(d);
                let z = clock(d);
                let mut out = Vec::with_capacity(d * d);
                let mut xa = DMatrix::identity(d, d);
                for _ in 0..d {
                    let mut zb = DMatrix::identity(d, d);
                    for _ in 0..d {
                        out.push(&xa * &zb);
                        zb = &zb * &z;
                    }
                    xa = &xa * &x;
                }
                out
            }
            PauliFlavor::MultiQubit => {
                let n = self.qubits().expect("multi-qubit");
                let singles = single_qubit_paulis();
                let mut out = Vec::with_capacity(d * d);
                for code in 0..4usize.pow(n as u32) {
                    let mut m = DMatrix::<Complex64>::identity(1, 1);
                    for q in (0..n).rev() {
                        let digit = (code / 4usize.pow(q as u32)) % 4;
                        m = m.kronecker(&singles[digit]);
                    }
                    out.push(m);
                }
                out
            }
        }
    }
}

/// `X|j⟩ = |j+1 mod d⟩`.
pub fn shift(d: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        m[((j + 1) % d, j)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `Z|j⟩ = ωʲ|j⟩`, `ω = e^{2πi/d}`.
pub fn clock(d: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    for j in 0..d {
        m[(j, j)] = root_of_unity(d, j as i64);
    }
    m
}

pub fn root_of_unity(n: usize, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

/// I, X, Y, Z.
pub fn single_qubit_paulis() -> [DMatrix<Complex64>; 4] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]),
        DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    ]
}

/// The `d²` states `D·ψ`, one per projective Pauli element.
pub fn pauli_orbit(psi: &State, g: &PauliGroupSpec) -> Result<Vec<State>> {
    if psi.len() != g.dimension {
        return Err(Error::Input(format!(
            "state has dimension {} but the Pauli group acts on dimension {}",
            psi.len(),
            g.dimension
        )));
    }
    Ok(g.operators().iter().map(|op| op * psi).collect())
}

/// `Σᵢ |ψᵢ⟩⟨ψᵢ|`.
pub fn projector_sum(states: &[State]) -> DMatrix<Complex64> {
    let d = states.first().map_or(0, |s| s.len());
    let mut acc = DMatrix::zeros(d, d);
    for s in states {
        acc += s * s.adjoint();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize, k: usize) -> State {
        let mut v = State::zeros(d);
        v[k] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn multi_qubit_requires_power_of_two() {
        assert!(PauliGroupSpec::new(6, PauliFlavor::MultiQubit).is_err());
        assert!(PauliGroupSpec::new(4, PauliFlavor::MultiQubit).is_ok());
        assert_eq!(PauliGroupSpec::default_for(4).unwrap().flavor, PauliFlavor::MultiQubit);
        assert_eq!(PauliGroupSpec::default_for(5).unwrap().flavor, PauliFlavor::QuditWeylHeisenberg);
    }

    #[test]
    fn operator_counts_and_unitarity() {
        for g in [
            PauliGroupSpec::default_for(2).unwrap(),
            PauliGroupSpec::default_for(3).unwrap(),
            PauliGroupSpec::default_for(4).unwrap(),
            PauliGroupSpec::new(4, PauliFlavor::QuditWeylHeisenberg).unwrap(),
            PauliGroupSpec::default_for(6).unwrap(),
        ] {
            let ops = g.operators();
            assert_eq!(ops.len(), g.dimension * g.dimension);
            for op in &ops {
                let u = op * op.adjoint();
                assert!((u - DMatrix::identity(g.dimension, g.dimension)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn qubit_orbit_of_zero_has_two_projectors() {
        let g = PauliGroupSpec::default_for(2).unwrap();
        let orbit = pauli_orbit(&basis(2, 0), &g).unwrap();
        assert_eq!(orbit.len(), 4);
        let distinct: Vec<usize> = orbit.iter().map(|s| if s[0].norm() > 0.5 { 0 } else { 1 }).collect();
        assert!(distinct.contains(&0) && distinct.contains(&1));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = PauliGroupSpec::default_for(3).unwrap();
        assert!(pauli_orbit(&basis(2, 0), &g).is_err());
    }

    #[test]
    fn two_qubit_ordering_is_big_endian() {
        // Index 4 is X⊗I, which maps |00> to |10> (basis index 2).
        let g = PauliGroupSpec::default_for(4).unwrap();
        let ops = g.operators();
        let v = &ops[4] * basis(4, 0);
        assert!((v[2].re - 1.0).abs() < 1e-12);
    }
}
