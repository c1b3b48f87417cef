//! Pauli orbits of fiducial states, MIC/SIC certification, Born-rule
//! probabilities and projector geometry.

pub mod fiducial;
pub mod geometry;
pub mod gram;
pub mod pauli;
pub mod stabilizer;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use fiducial::{fiducials_from_perm_rep, FiducialOptions, FiducialState, Provenance};
pub use geometry::{triple_product_geometry, GeometryInvariants, LineRule, Recognized};
pub use gram::{angle_spectrum, gram_matrix, gram_rank, is_sic, resolution_defect, AngleClass, ANGLE_TOL, GRAM_TOL};
pub use pauli::{pauli_orbit, PauliFlavor, PauliGroupSpec, State};
pub use stabilizer::{has_exact_catalog, non_stabilizer, stabilizer_catalog};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicReport {
    pub dimension: usize,
    pub flavor: PauliFlavor,
    pub fiducial: FiducialState,
    pub gram_rank: usize,
    pub angle_classes: Vec<AngleClass>,
    pub is_sic: bool,
    pub is_mic: bool,
    pub resolution_defect: f64,
    pub geometry: GeometryInvariants,
    /// The non-stabilizer test used for this group is the heuristic one.
    pub stabilizer_test_heuristic: bool,
}

/// Orbit, Gram rank, angle spectrum, SIC test (within `tol` on squared
/// overlaps) and triple-product geometry of one fiducial.
pub fn mic_report(f: &FiducialState, g: &PauliGroupSpec, tol: f64) -> Result<MicReport> {
    let orbit = pauli_orbit(&f.amplitudes, g)?;
    let d = g.dimension;
    let rank = gram_rank(&orbit, GRAM_TOL);
    let angles = angle_spectrum(&orbit, ANGLE_TOL);
    let sic = is_sic(&orbit, tol);
    Ok(MicReport {
        dimension: d,
        flavor: g.flavor,
        fiducial: f.clone(),
        gram_rank: rank,
        angle_classes: angles,
        is_sic: sic,
        is_mic: rank == d * d,
        resolution_defect: resolution_defect(&orbit),
        geometry: triple_product_geometry(&orbit, ANGLE_TOL),
        stabilizer_test_heuristic: !has_exact_catalog(g),
    })
}

/// Born-rule probabilities `tr(ρΠᵢ)/d` of the POVM `Eᵢ = Πᵢ/d`.
pub fn povm_probabilities(rho: &DMatrix<Complex64>, states: &[State]) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-10;
    let d = rho.nrows();
    if rho.ncols() != d || d == 0 {
        return Err(Error::Input("density operator must be square".into()));
    }
    if states.len() != d * d || states.iter().any(|s| s.len() != d) {
        return Err(Error::Input(format!("expected {} states of dimension {d}", d * d)));
    }
    if (rho - rho.adjoint()).iter().any(|z| z.norm() > TOL) {
        return Err(Error::Input("density operator is not Hermitian".into()));
    }
    if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > TOL {
        return Err(Error::Input("density operator does not have unit trace".into()));
    }
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let real = DMatrix::<f64>::from_fn(2 * d, 2 * d, |i, j| {
        let z = herm[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    if SymmetricEigen::new(real).eigenvalues.iter().any(|&l| l < -TOL) {
        return Err(Error::Input("density operator is not positive semidefinite".into()));
    }
    Ok(states
        .iter()
        .map(|s| (s.dotc(&(rho * s))).re / d as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sic_probabilities() {
        let g = PauliGroupSpec::default_for(3).unwrap();
        let f = FiducialState::from_amplitudes(&[c(0., 0.), c(1., 0.), c(-1., 0.)]);
        let orbit = pauli_orbit(&f.amplitudes, &g).unwrap();
        let rho = &f.amplitudes * f.amplitudes.adjoint();
        let p = povm_probabilities(&rho, &orbit).unwrap();
        assert!((p[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!(p[1..].iter().all(|x| (x - 1.0 / 12.0).abs() < 1e-12));
        let mixed = DMatrix::<Complex64>::identity(3, 3) / c(3., 0.);
        assert!(povm_probabilities(&mixed, &orbit).unwrap().iter().all(|x| (x - 1.0 / 9.0).abs() < 1e-12));
    }

    #[test]
    fn invalid_density_operators() {
        let g = PauliGroupSpec::default_for(2).unwrap();
        let f = FiducialState::from_amplitudes(&[c(1., 0.), c(0., 0.)]);
        let orbit = pauli_orbit(&f.amplitudes, &g).unwrap();
        let not_psd = DMatrix::from_row_slice(2, 2, &[c(1.5, 0.), c(0., 0.), c(0., 0.), c(-0.5, 0.)]);
        assert!(povm_probabilities(&not_psd, &orbit).is_err());
        let not_herm = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.), c(0.3, 0.), c(0., 0.), c(0.5, 0.)]);
        assert!(povm_probabilities(&not_herm, &orbit).is_err());
        let trace2 = DMatrix::<Complex64>::identity(2, 2);
        assert!(povm_probabilities(&trace2, &orbit).is_err());
    }

    #[test]
    fn reports() {
        let g3 = PauliGroupSpec::default_for(3).unwrap();
        let r = mic_report(&FiducialState::from_amplitudes(&[c(0., 0.), c(1., 0.), c(-1., 0.)]), &g3, 1e-10).unwrap();
        assert!(r.is_sic && r.is_mic && r.angle_classes.len() == 1);
        let g4 = PauliGroupSpec::default_for(4).unwrap();
        let w6 = pauli::root_of_unity(6, 1);
        let f = FiducialState::from_amplitudes(&[c(0., 0.), c(1., 0.), -w6, w6 - c(1., 0.)]);
        let r = mic_report(&f, &g4, 1e-10).unwrap();
        assert_eq!(r.gram_rank, 16);
        assert!(r.is_mic && !r.is_sic);
        assert!(r.angle_classes.len() >= 2);
        let r = mic_report(&FiducialState::from_amplitudes(&[c(1., 0.), c(0., 0.), c(0., 0.)]), &g3, 1e-10).unwrap();
        assert!(!r.is_mic);
    }
}
