//! Dehn filling at the level of presentations, invariant fingerprints and
//! verification of filling chains.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::census::{Census, CensusEntry};
use crate::coset::group_order;
use crate::error::{Error, Result};
use crate::homology::{format_homology, parse_homology, presentation_homology, AbelianGroupType};
use crate::lowindex::{low_index_search, Budget, SearchOptions, SignatureVector};
use crate::presentation::GroupPresentation;

/// Coset limit used when probing whether a fingerprinted group is finite.
pub const FINGERPRINT_ORDER_LIMIT: usize = 50_000;

/// A filling slope `(p, q)`: the meridian goes to `m^p l^q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct FillingSlope {
    p: i64,
    q: i64,
}

impl FillingSlope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::Input("slope (0,0) is not a curve".into()));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::Input(format!("slope ({p},{q}) is not primitive")));
        }
        Ok(FillingSlope { p, q })
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> i64 {
        self.q
    }

    pub fn negated(self) -> Self {
        FillingSlope { p: -self.p, q: -self.q }
    }
}

impl TryFrom<[i64; 2]> for FillingSlope {
    type Error = Error;

    fn try_from(v: [i64; 2]) -> Result<Self> {
        FillingSlope::new(v[0], v[1])
    }
}

impl From<FillingSlope> for [i64; 2] {
    fn from(s: FillingSlope) -> Self {
        [s.p, s.q]
    }
}

impl fmt::Display for FillingSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Fills cusp `cusp` of the entry's presentation with slope `s`.
pub fn dehn_fill(e: &CensusEntry, cusp: usize, s: FillingSlope) -> Result<GroupPresentation> {
    fill_presentation(&e.presentation, cusp, s)
}

/// Appends `m^p · l^q` for the chosen cusp and drops its peripheral pair.
pub fn fill_presentation(p: &GroupPresentation, cusp: usize, s: FillingSlope) -> Result<GroupPresentation> {
    let Some(pair) = p.peripheral.get(cusp) else {
        return Err(Error::Input(format!(
            "cusp {cusp} out of range: the group has {} cusps",
            p.peripheral.len()
        )));
    };
    let relator = pair.meridian.pow(s.p).concat(&pair.longitude.pow(s.q));
    let mut out = p.clone();
    out.relators.push(relator);
    out.peripheral.remove(cusp);
    out.validate()?;
    Ok(out)
}

/// Invariants used to tell groups apart: necessary, never sufficient, for
/// isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantFingerprint {
    /// η₂ … η_depth; shorter than requested when the budget ran out.
    pub eta: SignatureVector,
    pub depth: usize,
    #[serde(serialize_with = "ser_homology", deserialize_with = "de_homology")]
    pub homology: AbelianGroupType,
    pub cusps: usize,
    /// Group order when coset enumeration finished within the limit.
    pub order: Option<usize>,
}

fn ser_homology<S: serde::Serializer>(h: &AbelianGroupType, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_homology(h))
}

fn de_homology<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<AbelianGroupType, D::Error> {
    let text = String::deserialize(d)?;
    parse_homology(&text).map_err(serde::de::Error::custom)
}

impl InvariantFingerprint {
    /// Requested depth fully reached.
    pub fn complete(&self) -> bool {
        self.eta.depth() >= self.depth
    }
}

/// Fingerprint of a presentation; `eta` is truncated at the last complete
/// index when the budget runs out.
pub fn fingerprint(p: &GroupPresentation, depth: usize, budget: Budget) -> InvariantFingerprint {
    let homology = presentation_homology(p);
    // A finite group is recognized before the subgroup search, which would
    // otherwise enumerate every small subgroup of it.
    let order = if homology.free_rank == 0 {
        group_order(p, FINGERPRINT_ORDER_LIMIT)
    } else {
        None
    };
    let search = low_index_search(p, depth.max(1), budget, SearchOptions::default());
    InvariantFingerprint {
        eta: search.signature(),
        depth,
        homology,
        cusps: p.cusp_count(),
        order,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    /// Budget ran out before every compared quantity was available; the parts
    /// that were compared agree.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchReport {
    pub target: String,
    pub computed: InvariantFingerprint,
    pub reference: InvariantFingerprint,
    pub eta_agrees: bool,
    pub homology_agrees: bool,
    pub cusps_agree: bool,
    pub verdict: Verdict,
}

fn compare(target: &str, computed: InvariantFingerprint, reference: InvariantFingerprint) -> MatchReport {
    let common = computed.eta.counts.len().min(reference.eta.counts.len());
    let eta_agrees = computed.eta.counts[..common] == reference.eta.counts[..common];
    let homology_agrees = computed.homology == reference.homology;
    let cusps_agree = computed.cusps == reference.cusps;
    let complete = computed.complete() && reference.complete();
    let verdict = if !(eta_agrees && homology_agrees && cusps_agree) {
        Verdict::Inconsistent
    } else if complete {
        Verdict::Consistent
    } else {
        Verdict::Partial
    };
    MatchReport {
        target: target.to_string(),
        computed,
        reference,
        eta_agrees,
        homology_agrees,
        cusps_agree,
        verdict,
    }
}

/// Compares the fingerprints of `p` and of the target's own presentation.
pub fn invariants_match(p: &GroupPresentation, target: &CensusEntry, depth: usize, budget: Budget) -> MatchReport {
    assert!(depth >= 2, "depth must be at least 2");
    let computed = fingerprint(p, depth, budget);
    let reference = fingerprint(&target.presentation, depth, budget);
    compare(&target.name, computed, reference)
}

/// Which cusp a chain step fills.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CuspChoice {
    Index(usize),
    Search,
}

impl Serialize for CuspChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CuspChoice::Index(i) => s.serialize_u64(*i as u64),
            CuspChoice::Search => s.serialize_str("search"),
        }
    }
}

impl<'de> Deserialize<'de> for CuspChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Index(i) => Ok(CuspChoice::Index(i)),
            Raw::Word(w) if w == "search" => Ok(CuspChoice::Search),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("cusp must be an integer or \"search\", got {w:?}"))),
        }
    }
}

/// One step of a filling chain. A step with `to: None` is terminal and
/// checks the filled group against `order` and `homology` instead.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub from: String,
    pub cusp: CuspChoice,
    pub slope: FillingSlope,
    #[serde(default)]
    pub to: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<String>,
}

pub fn load_chain(path: &Path) -> Result<Vec<ChainStep>> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepReport {
    pub from: String,
    pub to: Option<String>,
    pub slope: FillingSlope,
    /// Cusps tried, with their verdicts.
    pub attempts: Vec<(usize, Verdict)>,
    /// First cusp giving a consistent (or, failing that, partial) match.
    pub chosen_cusp: Option<usize>,
    pub report: Option<MatchReport>,
    pub terminal_order: Option<usize>,
    pub terminal_homology: Option<String>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub depth: usize,
    pub steps: Vec<StepReport>,
}

impl ChainReport {
    pub fn all_consistent(&self) -> bool {
        self.steps.iter().all(|s| s.verdict == Verdict::Consistent)
    }
}

/// Coset limit for the terminal finiteness check.
pub const TERMINAL_ORDER_LIMIT: usize = 100_000;

/// Walks the chain: fills each step and matches it against the next entry.
pub fn chain_walk(census: &Census, steps: &[ChainStep], depth: usize, budget: Budget) -> Result<ChainReport> {
    for s in steps {
        census.get(&s.from)?;
        if let Some(t) = &s.to {
            census.get(t)?;
        }
    }
    let mut reference_cache: HashMap<String, InvariantFingerprint> = HashMap::new();
    let mut reports = Vec::with_capacity(steps.len());
    for step in steps {
        let from = census.get(&step.from)?;
        let cusps: Vec<usize> = match step.cusp {
            CuspChoice::Index(i) => vec![i],
            CuspChoice::Search => (0..from.presentation.cusp_count()).collect(),
        };
        match &step.to {
            Some(to_name) => {
                let to = census.get(to_name)?;
                let reference = reference_cache
                    .entry(to.name.clone())
                    .or_insert_with(|| fingerprint(&to.presentation, depth, budget))
                    .clone();
                let mut attempts = Vec::new();
                let mut best: Option<(usize, MatchReport)> = None;
                for &c in &cusps {
                    let filled = dehn_fill(from, c, step.slope)?;
                    let report = compare(&to.name, fingerprint(&filled, depth, budget), reference.clone());
                    attempts.push((c, report.verdict));
                    let better = match &best {
                        None => true,
                        Some((_, b)) => rank(report.verdict) > rank(b.verdict),
                    };
                    if better {
                        best = Some((c, report));
                    }
                    if best.as_ref().is_some_and(|b| b.1.verdict == Verdict::Consistent) {
                        break;
                    }
                }
                let (chosen, report) = best.map(|(c, r)| (Some(c), Some(r))).unwrap_or((None, None));
                let verdict = report.as_ref().map_or(Verdict::Inconsistent, |r| r.verdict);
                reports.push(StepReport {
                    from: from.name.clone(),
                    to: Some(to.name.clone()),
                    slope: step.slope,
                    attempts,
                    chosen_cusp: if verdict == Verdict::Inconsistent { None } else { chosen },
                    report,
                    terminal_order: None,
                    terminal_homology: None,
                    verdict,
                });
            }
            None => {
                let mut attempts = Vec::new();
                let mut chosen = None;
                let mut last = (None, String::new());
                for &c in &cusps {
                    let filled = dehn_fill(from, c, step.slope)?;
                    let order = group_order(&filled, TERMINAL_ORDER_LIMIT);
                    let h = format_homology(&presentation_homology(&filled));
                    let order_ok = step.order.is_none_or(|o| order == Some(o));
                    let h_ok = match &step.homology {
                        None => true,
                        Some(want) => parse_homology(want).ok() == Some(presentation_homology(&filled)),
                    };
                    let v = if order_ok && h_ok {
                        Verdict::Consistent
                    } else {
                        Verdict::Inconsistent
                    };
                    attempts.push((c, v));
                    last = (order, h);
                    if v == Verdict::Consistent {
                        chosen = Some(c);
                        break;
                    }
                }
                reports.push(StepReport {
                    from: from.name.clone(),
                    to: None,
                    slope: step.slope,
                    attempts,
                    chosen_cusp: chosen,
                    report: None,
                    terminal_order: last.0,
                    terminal_homology: Some(last.1),
                    verdict: if chosen.is_some() {
                        Verdict::Consistent
                    } else {
                        Verdict::Inconsistent
                    },
                });
            }
        }
    }
    Ok(ChainReport { depth, steps: reports })
}

fn rank(v: Verdict) -> u8 {
    match v {
        Verdict::Inconsistent => 0,
        Verdict::Partial => 1,
        Verdict::Consistent => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::parse_census;

    fn entry(json: &str) -> CensusEntry {
        parse_census(json).unwrap().remove(0)
    }

    const TREFOIL: &str = r#"[{"name": "trefoil", "generators": ["a", "b"], "relators": ["aaBBB"],
        "peripheral": [{"m": "Ba", "l": "aaAbAbAbAbAbAb"}]}]"#;

    #[test]
    fn slope_validation() {
        assert!(FillingSlope::new(0, 0).is_err());
        assert!(FillingSlope::new(2, 4).is_err());
        assert!(FillingSlope::new(-1, 1).is_ok());
        assert!(FillingSlope::new(1, 0).is_ok());
        let s: FillingSlope = serde_json::from_str("[-1, 1]").unwrap();
        assert_eq!((s.p(), s.q()), (-1, 1));
        assert!(serde_json::from_str::<FillingSlope>("[0, 0]").is_err());
    }

    #[test]
    fn fill_appends_relator_and_drops_cusp() {
        let e = entry(TREFOIL);
        let f = dehn_fill(&e, 0, FillingSlope::new(1, 0).unwrap()).unwrap();
        assert_eq!(f.relators.len(), 2);
        assert!(f.peripheral.is_empty());
        assert!(dehn_fill(&e, 1, FillingSlope::new(1, 0).unwrap()).is_err());
    }

    #[test]
    fn meridian_filling_of_trefoil_is_trivial() {
        let e = entry(TREFOIL);
        let f = dehn_fill(&e, 0, FillingSlope::new(1, 0).unwrap()).unwrap();
        assert_eq!(group_order(&f, 1000), Some(1));
    }

    #[test]
    fn opposite_slopes_give_same_fingerprint() {
        let e = entry(TREFOIL);
        let s = FillingSlope::new(1, 2).unwrap();
        let a = fingerprint(&dehn_fill(&e, 0, s).unwrap(), 3, Budget::unlimited());
        let b = fingerprint(&dehn_fill(&e, 0, s.negated()).unwrap(), 3, Budget::unlimited());
        assert_eq!(a, b);
    }

    #[test]
    fn cusp_choice_serde() {
        assert_eq!(serde_json::from_str::<CuspChoice>("2").unwrap(), CuspChoice::Index(2));
        assert_eq!(serde_json::from_str::<CuspChoice>("\"search\"").unwrap(), CuspChoice::Search);
        assert!(serde_json::from_str::<CuspChoice>("\"all\"").is_err());
    }
}
