//! Candidate fiducial states: cycle-supported eigenvectors of permutation
//! matrices coming from coset actions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{root_of_unity, PauliGroupSpec, State};
use super::stabilizer::non_stabilizer;
use crate::coset::PermutationRep;
use crate::word::{render_word, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Free-form label of the covering the permutations came from.
    pub source: String,
    /// Word whose permutation matrix the state is an eigenvector of.
    pub word: String,
    /// The supporting cycle, in order (0-based points).
    pub cycle: Vec<usize>,
    /// Eigenvalue `e^{2πi j/ℓ}` recorded as `(j, ℓ)`.
    pub eigenvalue: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiducialState {
    #[serde(with = "amplitudes")]
    pub amplitudes: State,
    pub provenance: Provenance,
}

mod amplitudes {
    use super::State;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &State, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = v.iter().map(|z| (z.re, z.im)).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<State, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(d)?;
        Ok(State::from_iterator(pairs.len(), pairs.into_iter().map(|(re, im)| Complex64::new(re, im))))
    }
}

impl FiducialState {
    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// A state with no provenance, normalized.
    pub fn from_amplitudes(amps: &[Complex64]) -> Self {
        let v = State::from_column_slice(amps);
        let n = v.norm();
        FiducialState {
            amplitudes: v / Complex64::new(n, 0.0),
            provenance: Provenance {
                source: "given".into(),
                word: String::new(),
                cycle: Vec::new(),
                eigenvalue: (0, 1),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct FiducialOptions {
    /// Also use products of generators up to this word length.
    pub max_word_length: usize,
    pub source: String,
    pub tol: f64,
    /// Drop stabilizer states.
    pub filter_stabilizer: bool,
}

impl Default for FiducialOptions {
    fn default() -> Self {
        FiducialOptions {
            max_word_length: 2,
            source: String::new(),
            tol: 1e-9,
            filter_stabilizer: true,
        }
    }
}

/// Words over the generators and inverses of length `1..=max_len`, freely
/// reduced and deduplicated, shortest first.
fn words(generators: usize, max_len: usize) -> Vec<Word> {
    let letters: Vec<i32> = (1..=generators as i32).flat_map(|k| [k, -k]).collect();
    let mut out: Vec<Word> = Vec::new();
    let mut layer: Vec<Word> = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &x in &letters {
                if w.letters().last() == Some(&-x) {
                    continue;
                }
                let nw = Word::new(w.letters().iter().copied().chain([x]));
                next.push(nw);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = perm[x];
        }
        out.push(c);
    }
    out
}

/// Cycle-supported eigenvectors of the permutation matrices of the generator
/// images (and of words up to the configured length), deduplicated up to
/// phase and, unless disabled, filtered to non-stabilizer states.
pub fn fiducials_from_perm_rep(r: &PermutationRep, g: &PauliGroupSpec, opts: &FiducialOptions) -> Vec<FiducialState> {
    let d = r.degree;
    let names: Vec<String> = crate::presentation::default_names(r.images.len());
    let mut out: Vec<FiducialState> = Vec::new();
    for w in words(r.images.len(), opts.max_word_length.max(1)) {
        let perm = r.word_image(&w);
        for cyc in cycles(&perm) {
            let l = cyc.len();
            if l < 2 {
                continue;
            }
            for j in 0..l {
                let mut v = State::zeros(d);
                for (k, &x) in cyc.iter().enumerate() {
                    v[x] = root_of_unity(l, -((j * k) as i64)) / (l as f64).sqrt();
                }
                if out.iter().any(|f| (f.amplitudes.dotc(&v).norm() - 1.0).abs() < opts.tol) {
                    continue;
                }
                if opts.filter_stabilizer && (d != g.dimension || !non_stabilizer(&v, g, opts.tol)) {
                    continue;
                }
                out.push(FiducialState {
                    amplitudes: v,
                    provenance: Provenance {
                        source: opts.source.clone(),
                        word: render_word(&w, &names),
                        cycle: cyc.clone(),
                        eigenvalue: (j, l),
                    },
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(images: Vec<Vec<usize>>) -> PermutationRep {
        PermutationRep {
            degree: images[0].len(),
            images,
        }
    }

    fn contains(fs: &[FiducialState], want: &[Complex64]) -> bool {
        let w = FiducialState::from_amplitudes(want).amplitudes;
        fs.iter().any(|f| (f.amplitudes.dotc(&w).norm() - 1.0).abs() < 1e-10)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transposition_gives_magic_qutrit_states() {
        let r = rep(vec![vec![0, 2, 1]]);
        let g = PauliGroupSpec::default_for(3).unwrap();
        let opts = FiducialOptions {
            filter_stabilizer: false,
            ..Default::default()
        };
        let fs = fiducials_from_perm_rep(&r, &g, &opts);
        assert!(contains(&fs, &[c(0., 0.), c(1., 0.), c(-1., 0.)]));
        assert!(contains(&fs, &[c(0., 0.), c(1., 0.), c(1., 0.)]));
    }

    #[test]
    fn three_cycle_gives_two_qubit_fiducial() {
        let r = rep(vec![vec![0, 2, 3, 1]]);
        let g = PauliGroupSpec::default_for(4).unwrap();
        let fs = fiducials_from_perm_rep(&r, &g, &FiducialOptions::default());
        let w3 = root_of_unity(3, 1);
        assert!(contains(&fs, &[c(0., 0.), c(1., 0.), w3, w3 * w3]));
        // Same state written with sixth roots: (0, 1, ω₆−1, −ω₆).
        let w6 = root_of_unity(6, 1);
        assert!(contains(&fs, &[c(0., 0.), c(1., 0.), w6 - c(1., 0.), -w6]));
    }

    #[test]
    fn identity_permutation_gives_nothing() {
        let r = rep(vec![vec![0, 1, 2]]);
        let g = PauliGroupSpec::default_for(3).unwrap();
        assert!(fiducials_from_perm_rep(&r, &g, &FiducialOptions::default()).is_empty());
    }

    #[test]
    fn candidates_are_unit_eigenvectors() {
        let r = rep(vec![vec![1, 2, 0, 4, 3], vec![0, 3, 4, 1, 2]]);
        let g = PauliGroupSpec::default_for(5).unwrap();
        let opts = FiducialOptions {
            filter_stabilizer: false,
            ..Default::default()
        };
        for f in fiducials_from_perm_rep(&r, &g, &opts) {
            assert!((f.amplitudes.norm() - 1.0).abs() < 1e-12);
        }
    }
}
