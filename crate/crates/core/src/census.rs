//! The census file: named presentations with peripheral words, torsion
//! representatives and expected invariants.

use std::collections::HashSet;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::homology::{parse_homology, presentation_homology};
use crate::lowindex::{cusp_count, low_index_search, Budget, SearchOptions};
use crate::presentation::{GroupPresentation, PeripheralPair, TorsionRep};
use crate::word::{parse_word, render_word};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    /// Class counts from index 2 upward.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cusps: Option<usize>,
    #[serde(default, rename = "ideal", skip_serializing_if = "Option::is_none")]
    pub congruence_ideal: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub name: String,
    pub aliases: Vec<String>,
    pub presentation: GroupPresentation,
    pub expected: Option<Expected>,
    /// Known disagreements between sources, reported by validation.
    pub discrepancies: Vec<String>,
}

impl CensusEntry {
    pub fn matches_name(&self, name: &str) -> bool {
        self.name.eq_ignore_ascii_case(name) || self.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
    }

    fn check(&self) -> Result<()> {
        self.presentation.validate()?;
        if let Some(c) = self.expected.as_ref().and_then(|e| e.cusps) {
            if c != self.presentation.cusp_count() {
                return Err(Error::Validation(format!(
                    "entry {}: expected {} cusps but {} peripheral pairs are listed",
                    self.name,
                    c,
                    self.presentation.cusp_count()
                )));
            }
        }
        Ok(())
    }

    /// JSON object in the census format.
    pub fn to_json(&self) -> Value {
        let p = &self.presentation;
        let names = &p.generator_names;
        let word = |w| Value::String(render_word(w, names));
        let mut obj = Map::new();
        obj.insert("name".into(), Value::String(self.name.clone()));
        obj.insert("aliases".into(), serde_json::to_value(&self.aliases).expect("strings"));
        obj.insert("generators".into(), serde_json::to_value(names).expect("strings"));
        obj.insert("relators".into(), Value::Array(p.relators.iter().map(word).collect()));
        obj.insert(
            "peripheral".into(),
            Value::Array(
                p.peripheral
                    .iter()
                    .map(|pp| {
                        let mut o = Map::new();
                        o.insert("m".into(), word(&pp.meridian));
                        o.insert("l".into(), word(&pp.longitude));
                        if !pp.extra.is_empty() {
                            o.insert("x".into(), Value::Array(pp.extra.iter().map(word).collect()));
                        }
                        Value::Object(o)
                    })
                    .collect(),
            ),
        );
        obj.insert(
            "torsion".into(),
            Value::Array(
                p.torsion_reps
                    .iter()
                    .map(|t| serde_json::json!({"word": render_word(&t.word, names), "order": t.order}))
                    .collect(),
            ),
        );
        if let Some(e) = &self.expected {
            obj.insert("expected".into(), serde_json::to_value(e).expect("plain data"));
        }
        if !self.discrepancies.is_empty() {
            obj.insert("discrepancies".into(), serde_json::to_value(&self.discrepancies).expect("strings"));
        }
        Value::Object(obj)
    }
}

/// A loaded census with name lookup.
#[derive(Clone, Debug, Default)]
pub struct Census {
    pub entries: Vec<CensusEntry>,
}

impl Census {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(Census {
            entries: load_census(path)?,
        })
    }

    /// Entry by name or alias (case-insensitive).
    pub fn get(&self, name: &str) -> Result<&CensusEntry> {
        self.entries
            .iter()
            .find(|e| e.matches_name(name))
            .ok_or_else(|| Error::Input(format!("no census entry named {name:?}")))
    }

    pub fn to_json_string(&self) -> String {
        let arr = Value::Array(self.entries.iter().map(CensusEntry::to_json).collect());
        serde_json::to_string_pretty(&arr).expect("serializable")
    }
}

pub fn load_census(path: &Path) -> Result<Vec<CensusEntry>> {
    let text = std::fs::read_to_string(path)?;
    parse_census(&text)
}

/// Parses census JSON text; entries keep file order.
pub fn parse_census(text: &str) -> Result<Vec<CensusEntry>> {
    let root: Value = serde_json::from_str(text)?;
    let Value::Array(items) = root else {
        return Err(Error::Parse {
            entry: "<root>".into(),
            field: "<root>".into(),
            message: "top level must be an array".into(),
        });
    };
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let entry = parse_entry(i, item)?;
        if !seen.insert(entry.name.clone()) {
            return Err(Error::Validation(format!("duplicate census name {:?}", entry.name)));
        }
        entry.check()?;
        out.push(entry);
    }
    Ok(out)
}

fn field<T: DeserializeOwned>(obj: &Map<String, Value>, entry: &str, key: &str) -> Result<Option<T>> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| Error::Parse {
            entry: entry.to_string(),
            field: key.to_string(),
            message: e.to_string(),
        }),
    }
}

fn required<T: DeserializeOwned>(obj: &Map<String, Value>, entry: &str, key: &str) -> Result<T> {
    field(obj, entry, key)?.ok_or_else(|| Error::Parse {
        entry: entry.to_string(),
        field: key.to_string(),
        message: "missing".into(),
    })
}

#[derive(Deserialize)]
struct RawPeripheral {
    m: String,
    l: String,
    #[serde(default)]
    x: Vec<String>,
}

#[derive(Deserialize)]
struct RawTorsion {
    word: String,
    order: u32,
}

fn parse_entry(i: usize, item: &Value) -> Result<CensusEntry> {
    let placeholder = format!("#{i}");
    let Value::Object(obj) = item else {
        return Err(Error::Parse {
            entry: placeholder,
            field: "<entry>".into(),
            message: "entry must be an object".into(),
        });
    };
    let name: String = required(obj, &placeholder, "name")?;
    let n = name.as_str();
    let aliases: Vec<String> = field(obj, n, "aliases")?.unwrap_or_default();
    let generators: Vec<String> = required(obj, n, "generators")?;
    if generators.is_empty() {
        return Err(Error::Parse {
            entry: name.clone(),
            field: "generators".into(),
            message: "at least one generator is required".into(),
        });
    }
    for g in &generators {
        if g.chars().count() != 1 || !g.chars().all(|c| c.is_lowercase()) {
            return Err(Error::Parse {
                entry: name.clone(),
                field: "generators".into(),
                message: format!("generator name {g:?} is not a single lower-case letter"),
            });
        }
    }
    let word = |text: &str, key: &str| {
        parse_word(text, &generators).map_err(|e| Error::Parse {
            entry: name.clone(),
            field: key.to_string(),
            message: e.to_string(),
        })
    };
    let relator_texts: Vec<String> = required(obj, n, "relators")?;
    let relators = relator_texts
        .iter()
        .map(|r| word(r, "relators"))
        .collect::<Result<Vec<_>>>()?;
    let raw_peripheral: Vec<RawPeripheral> = field(obj, n, "peripheral")?.unwrap_or_default();
    let mut peripheral = Vec::with_capacity(raw_peripheral.len());
    for pp in &raw_peripheral {
        peripheral.push(PeripheralPair {
            meridian: word(&pp.m, "peripheral")?,
            longitude: word(&pp.l, "peripheral")?,
            extra: pp.x.iter().map(|x| word(x, "peripheral")).collect::<Result<_>>()?,
        });
    }
    let raw_torsion: Vec<RawTorsion> = field(obj, n, "torsion")?.unwrap_or_default();
    let mut torsion_reps = Vec::with_capacity(raw_torsion.len());
    for t in &raw_torsion {
        if t.order < 2 {
            return Err(Error::Parse {
                entry: name.clone(),
                field: "torsion".into(),
                message: format!("order {} is below 2", t.order),
            });
        }
        torsion_reps.push(TorsionRep {
            word: word(&t.word, "torsion")?,
            order: t.order,
        });
    }
    let expected: Option<Expected> = field(obj, n, "expected")?;
    let discrepancies: Vec<String> = field(obj, n, "discrepancies")?.unwrap_or_default();
    let presentation = GroupPresentation {
        generator_names: generators.clone(),
        relators,
        peripheral,
        torsion_reps,
    };
    Ok(CensusEntry {
        name,
        aliases,
        presentation,
        expected,
        discrepancies,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Match,
    Mismatch,
    SkippedBudget,
    NotListed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub quantity: String,
    pub expected: Option<String>,
    pub computed: Option<String>,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub entry: String,
    pub depth: usize,
    pub checks: Vec<Check>,
    pub discrepancies: Vec<String>,
}

impl ValidationReport {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Mismatch)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Mismatch)
    }
}

/// Recomputes η up to index `depth`, whole-group homology and cusp count, and
/// compares them with the entry's expected values.
pub fn validate_census_entry(e: &CensusEntry, depth: usize) -> ValidationReport {
    validate_census_entry_with_budget(e, depth, Budget::unlimited())
}

pub fn validate_census_entry_with_budget(e: &CensusEntry, depth: usize, budget: Budget) -> ValidationReport {
    assert!(depth >= 1, "depth must be at least 1");
    let expected = e.expected.clone().unwrap_or_default();
    let p = &e.presentation;
    let mut checks = Vec::new();

    let h = presentation_homology(p);
    let computed_h = crate::homology::format_homology(&h);
    checks.push(match &expected.homology {
        Some(want) => Check {
            quantity: "homology".into(),
            expected: Some(want.clone()),
            computed: Some(computed_h.clone()),
            status: match parse_homology(want) {
                Ok(w) if w == h => CheckStatus::Match,
                _ => CheckStatus::Mismatch,
            },
        },
        None => Check {
            quantity: "homology".into(),
            expected: None,
            computed: Some(computed_h),
            status: CheckStatus::NotListed,
        },
    });

    let search = low_index_search(p, depth, budget, SearchOptions::default());
    if !p.peripheral.is_empty() {
        let whole = search.classes.iter().find(|c| c.index == 1);
        let computed = whole.and_then(|c| cusp_count(c).ok());
        checks.push(Check {
            quantity: "cusps".into(),
            expected: expected.cusps.map(|c| c.to_string()),
            computed: computed.map(|c| c.to_string()),
            status: match (expected.cusps, computed) {
                (None, _) => CheckStatus::NotListed,
                (Some(_), None) => CheckStatus::SkippedBudget,
                (Some(a), Some(b)) if a == b => CheckStatus::Match,
                _ => CheckStatus::Mismatch,
            },
        });
    }

    let sig = search.signature();
    for d in 2..=depth {
        let want = expected.eta.as_ref().and_then(|v| v.get(d - 2)).copied();
        let got = sig.at(d);
        let status = match (want, got) {
            (None, _) => CheckStatus::NotListed,
            (Some(_), None) => CheckStatus::SkippedBudget,
            (Some(a), Some(b)) if a == b => CheckStatus::Match,
            _ => CheckStatus::Mismatch,
        };
        checks.push(Check {
            quantity: format!("eta[{d}]"),
            expected: want.map(|v| v.to_string()),
            computed: got.map(|v| v.to_string()),
            status,
        });
    }
    ValidationReport {
        entry: e.name.clone(),
        depth,
        checks,
        discrepancies: e.discrepancies.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"[
      {"name": "K", "aliases": ["knot"], "generators": ["a", "b"],
       "relators": ["abbbaBAAB"],
       "peripheral": [{"m": "a", "l": "bA"}], "torsion": [],
       "expected": {"eta": [999], "homology": "1", "cusps": 1}, "colour": "ignored"}
    ]"#;

    #[test]
    fn parses_and_ignores_unknown_keys() {
        let entries = parse_census(SMALL).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].presentation.cusp_count(), 1);
        assert!(entries[0].matches_name("KNOT"));
    }

    #[test]
    fn forced_mismatch_is_reported() {
        let e = &parse_census(SMALL).unwrap()[0];
        let r = validate_census_entry(e, 2);
        let eta = r.checks.iter().find(|c| c.quantity == "eta[2]").unwrap();
        assert_eq!(eta.status, CheckStatus::Mismatch);
        let h = r.checks.iter().find(|c| c.quantity == "homology").unwrap();
        assert_eq!(h.status, CheckStatus::Match);
        assert!(!r.all_match());
    }

    #[test]
    fn malformed_record_names_entry_and_field() {
        let bad = r#"[{"name": "X", "generators": ["a"], "relators": "aa"}]"#;
        match parse_census(bad) {
            Err(Error::Parse { entry, field, .. }) => {
                assert_eq!(entry, "X");
                assert_eq!(field, "relators");
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = r#"[{"name": "Y", "generators": ["a"], "relators": ["az"]}]"#;
        match parse_census(bad) {
            Err(Error::Parse { entry, field, .. }) => assert_eq!((entry.as_str(), field.as_str()), ("Y", "relators")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let dup = r#"[{"name": "X", "generators": ["a"], "relators": []},
                      {"name": "X", "generators": ["a"], "relators": []}]"#;
        assert!(matches!(parse_census(dup), Err(Error::Validation(_))));
    }

    #[test]
    fn cusp_count_must_match_peripheral_pairs() {
        let bad = r#"[{"name": "X", "generators": ["a"], "relators": [],
                       "peripheral": [], "expected": {"cusps": 2}}]"#;
        assert!(matches!(parse_census(bad), Err(Error::Validation(_))));
    }

    #[test]
    fn round_trip_preserves_entries() {
        let entries = parse_census(SMALL).unwrap();
        let text = Census { entries: entries.clone() }.to_json_string();
        assert_eq!(parse_census(&text).unwrap(), entries);
    }
}
