//! Finitely presented groups of Bianchi orbifolds and link complements, their
//! low-index subgroups (covers), first homology of covers, Dehn filling, and
//! the quantum side: Pauli orbits of permutation-derived fiducial states and
//! MIC/SIC certification.
//!
//! The pipeline runs bottom-up:
//!
//! * [`word`], [`presentation`], [`census`]: words, presentations, and the
//!   shipped census of groups with peripheral structure.
//! * [`coset`]: Todd–Coxeter enumeration and coset tables.
//! * [`lowindex`]: conjugacy classes of subgroups of small index, torsion
//!   filtering, covering type and cusp counts.
//! * [`homology`] and [`rewrite`]: Reidemeister–Schreier rewriting and Smith
//!   normal form.
//! * [`topo`]: Dehn filling and invariant fingerprints along filling chains.
//! * [`mic`]: fiducial states, Pauli orbits, Gram rank, triple-product geometry.
//! * [`reproduce`]: table-level reproduction reports used by the CLI.

pub mod census;
pub mod coset;
pub mod error;
pub mod homology;
pub mod lowindex;
pub mod mic;
pub mod presentation;
pub mod reproduce;
pub mod rewrite;
pub mod topo;
pub mod word;

pub use census::{load_census, validate_census_entry, Census, CensusEntry, Expected, ValidationReport};
pub use coset::{enumerate_cosets, group_order, permutation_rep, CosetTable, PermutationRep};
pub use error::{Error, Result};
pub use homology::{format_homology, parse_homology, smith_normal_form, subgroup_homology, AbelianGroupType, IntegerMatrix};
pub use lowindex::{
    classes_of_index, covering_type, cusp_count, eta_signature, is_torsion_free, low_index_classes, low_index_search,
    Budget, CoveringType, LowIndexOutcome, SearchOptions, SignatureVector, SubgroupClass,
};
pub use mic::{mic_report, povm_probabilities, MicReport};
pub use presentation::{GroupPresentation, PeripheralPair, TorsionRep};
pub use reproduce::{reproduce, ReproduceOptions, ReproductionReport, RowVerdict, Target};
pub use rewrite::subgroup_presentation;
pub use topo::{
    chain_walk, dehn_fill, fingerprint, invariants_match, load_chain, ChainReport, ChainStep, FillingSlope,
    InvariantFingerprint,
};
pub use word::{free_reduce, parse_word, render_word, Word};

/// Location of the census shipped with this crate.
pub fn default_census_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("census.json")
}

/// Location of the shipped filling chain.
pub fn default_chain_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("chain.json")
}
