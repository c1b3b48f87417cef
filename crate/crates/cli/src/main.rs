//! `bianchi`: census queries, subgroup, homology and MIC computations, chain
//! verification and table reproduction.
//!
//! Exit codes: 0 normal, 1 budget exhausted (a partial report is still
//! printed), 2 bad input.

mod text;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use bianchi_core::census::CheckStatus;
use bianchi_core::homology::presentation_homology;
use bianchi_core::lowindex::{ClassTags, SearchOptions};
use bianchi_core::mic::{fiducials_from_perm_rep, FiducialOptions, PauliFlavor, PauliGroupSpec};
use bianchi_core::topo::Verdict;
use bianchi_core::{
    census::validate_census_entry_with_budget, chain_walk, classes_of_index, default_census_path, default_chain_path,
    dehn_fill, fingerprint, format_homology, group_order, load_chain, low_index_search, mic_report, permutation_rep,
    reproduce, subgroup_presentation, Budget, Census, CensusEntry, Error, FillingSlope, GroupPresentation,
    ReproduceOptions, SubgroupClass, Target,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "bianchi", version, about = "Low-index covers of Bianchi and link groups, and the MICs they carry")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Census file (JSON).
    #[arg(long, global = true, env = "BIANCHI_CENSUS")]
    census: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Coset limit for order computations.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_cosets: usize,
    /// Wall-clock limit per search.
    #[arg(long, global = true, default_value_t = 600.0)]
    max_seconds: f64,
    /// Node limit per search.
    #[arg(long, global = true)]
    max_nodes: Option<u64>,
    /// Largest subgroup index for signatures.
    #[arg(long, global = true, default_value_t = 4)]
    max_index: usize,
    /// Also run stretch rows.
    #[arg(long, global = true)]
    stretch: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Flavor {
    Qudit,
    MultiQubit,
}

#[derive(Args, Debug)]
struct ClassRef {
    #[arg(long)]
    group: String,
    #[arg(long)]
    index: Option<usize>,
    /// Class id as listed by `subgroups`.
    #[arg(long)]
    class: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conjugacy classes of subgroups of one index.
    Subgroups {
        #[arg(long)]
        group: String,
        #[arg(long)]
        index: usize,
        /// Keep torsion-free classes only.
        #[arg(long)]
        torsion_free: bool,
    },
    /// Cardinality signature η₂..η_max-index.
    Signature {
        #[arg(long)]
        group: String,
    },
    /// First homology of a group or of a cover.
    Homology {
        #[command(flatten)]
        target: ClassRef,
        /// Include the rewritten presentation of the cover.
        #[arg(long)]
        presentation: bool,
    },
    /// Cusp count of a group or of a cover.
    Cusps {
        #[command(flatten)]
        target: ClassRef,
    },
    /// Dehn filling of one cusp.
    Fill {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 0)]
        cusp: usize,
        /// Slope as `p,q`.
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Walks a filling chain.
    Chain {
        /// Chain file (JSON); the shipped chain by default.
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// MIC reports for candidate fiducials of a cover.
    Mic {
        #[command(flatten)]
        target: ClassRef,
        /// Pauli group; qudit for d ≠ 4 and multi-qubit for d = 4 by default.
        #[arg(long, value_enum)]
        flavor: Option<Flavor>,
        /// Also report candidates that are not MICs.
        #[arg(long)]
        all: bool,
        /// Longest word whose permutation matrix is diagonalized.
        #[arg(long, default_value_t = 2)]
        max_word_length: usize,
        /// Tolerance on squared overlaps for the SIC test.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Row-by-row reproduction of a published table.
    Reproduce {
        #[arg(long)]
        target: String,
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Recomputes census invariants and compares them with the listed values.
    ValidateCensus {
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

/// A command's result and whether some budget ran out.
struct Outcome {
    value: Value,
    exhausted: bool,
}

impl Outcome {
    fn done(value: Value) -> Self {
        Outcome { value, exhausted: false }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = run(&cli).or_else(|e| match e.downcast_ref::<Error>() {
        Some(Error::BudgetExhausted { completed_index }) => Ok(Outcome {
            value: json!({ "budget_exhausted": true, "completed_index": completed_index }),
            exhausted: true,
        }),
        _ => Err(e),
    });
    match result {
        Ok(out) => {
            let name = command_name(&cli.command);
            let mut envelope = json!({ "command": name, "result": out.value });
            if !cli.global.deterministic {
                let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
                envelope["generated_at"] = json!(now);
            }
            match cli.global.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&envelope).expect("serializable")),
                Format::Text => print!("{}", text::render(&envelope)),
            }
            if out.exhausted {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Subgroups { .. } => "subgroups",
        Command::Signature { .. } => "signature",
        Command::Homology { .. } => "homology",
        Command::Cusps { .. } => "cusps",
        Command::Fill { .. } => "fill",
        Command::Chain { .. } => "chain",
        Command::Mic { .. } => "mic",
        Command::Reproduce { .. } => "reproduce",
        Command::ValidateCensus { .. } => "validate-census",
    }
}

fn budget(g: &Global) -> Budget {
    Budget {
        max_nodes: g.max_nodes,
        max_seconds: Some(g.max_seconds),
    }
}

fn load(g: &Global) -> anyhow::Result<Census> {
    let path = g.census.clone().unwrap_or_else(default_census_path);
    Census::load(&path).with_context(|| format!("loading census {}", path.display()))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    let census = load(g)?;
    match &cli.command {
        Command::Subgroups { group, index, torsion_free } => subgroups(&census, g, group, *index, *torsion_free),
        Command::Signature { group } => signature(census.get(group)?, g),
        Command::Homology { target, presentation } => homology(&census, g, target, *presentation),
        Command::Cusps { target } => cusps(&census, g, target),
        Command::Fill { group, cusp, slope, depth } => fill(census.get(group)?, g, *cusp, slope, *depth),
        Command::Chain { chain, depth } => chain_cmd(&census, g, chain.as_ref(), *depth),
        Command::Mic { target, flavor, all, max_word_length, tol } => {
            mic(&census, g, target, *flavor, *all, *max_word_length, *tol)
        }
        Command::Reproduce { target, group, depth } => {
            let target: Target = target.parse()?;
            let opts = ReproduceOptions {
                budget: budget(g),
                stretch: g.stretch,
                group: group.clone(),
                depth: *depth,
            };
            let report = reproduce(&census, target, &opts)?;
            Ok(Outcome {
                exhausted: report.rows.iter().any(|r| r.watermark.budget_exhausted),
                value: serde_json::to_value(&report)?,
            })
        }
        Command::ValidateCensus { group, depth } => validate(&census, g, group.as_deref(), *depth),
    }
}

fn tags_json(t: &ClassTags) -> Value {
    json!({
        "covering_type": t.covering_type,
        "homology": t.homology.as_ref().map(format_homology),
        "cusps": t.cusps,
        "torsion_free": t.torsion_free,
    })
}

fn class_json(id: usize, s: &SubgroupClass) -> Value {
    let perms: serde_json::Map<String, Value> = s
        .parent
        .generator_names
        .iter()
        .zip(s.table.images())
        .map(|(n, img)| (n.clone(), json!(img)))
        .collect();
    let mut v = json!({ "id": id, "index": s.index });
    if let (Value::Object(m), Value::Object(t)) = (&mut v, tags_json(&s.tags)) {
        m.extend(t);
        m.insert("permutations".into(), Value::Object(perms));
    }
    v
}

fn classes(census: &Census, g: &Global, group: &str, index: usize) -> anyhow::Result<Vec<SubgroupClass>> {
    if index == 0 {
        bail!(Error::Input("index must be positive".into()));
    }
    let e = census.get(group)?;
    let cl = classes_of_index(&e.presentation, index, budget(g), SearchOptions::default())?;
    Ok(cl.into_iter().map(SubgroupClass::annotated).collect())
}

fn pick_class(census: &Census, g: &Global, r: &ClassRef) -> anyhow::Result<Option<SubgroupClass>> {
    match (r.index, r.class) {
        (None, None) => Ok(None),
        (Some(index), Some(id)) => {
            let mut cl = classes(census, g, &r.group, index)?;
            if id >= cl.len() {
                bail!(Error::Input(format!("{} has {} classes of index {index}; no class {id}", r.group, cl.len())));
            }
            Ok(Some(cl.swap_remove(id)))
        }
        _ => bail!(Error::Input("--index and --class go together".into())),
    }
}

fn subgroups(census: &Census, g: &Global, group: &str, index: usize, torsion_free: bool) -> anyhow::Result<Outcome> {
    let cl = classes(census, g, group, index)?;
    let listed: Vec<Value> = cl
        .iter()
        .enumerate()
        .filter(|(_, s)| !torsion_free || s.tags.torsion_free == Some(true))
        .map(|(i, s)| class_json(i, s))
        .collect();
    Ok(Outcome::done(json!({ "group": group, "index": index, "count": listed.len(), "classes": listed })))
}

fn signature(e: &CensusEntry, g: &Global) -> anyhow::Result<Outcome> {
    if g.max_index < 2 {
        bail!(Error::Input("--max-index must be at least 2".into()));
    }
    let out = low_index_search(&e.presentation, g.max_index, budget(g), SearchOptions::default());
    Ok(Outcome {
        value: json!({
            "group": e.name,
            "eta": out.signature().counts,
            "requested_index": g.max_index,
            "completed_index": out.completed_index,
        }),
        exhausted: out.exhausted,
    })
}

fn render_presentation(p: &GroupPresentation) -> Value {
    json!({
        "generators": p.generator_names,
        "relators": p.relators.iter().map(|w| p.render(w)).collect::<Vec<_>>(),
    })
}

fn homology(census: &Census, g: &Global, r: &ClassRef, with_presentation: bool) -> anyhow::Result<Outcome> {
    let e = census.get(&r.group)?;
    match pick_class(census, g, r)? {
        None => Ok(Outcome::done(json!({
            "group": e.name,
            "homology": format_homology(&presentation_homology(&e.presentation)),
        }))),
        Some(s) => {
            let mut v = json!({
                "group": e.name,
                "index": s.index,
                "class": r.class,
                "homology": s.tags.homology.as_ref().map(format_homology),
            });
            if with_presentation {
                v["presentation"] = render_presentation(&subgroup_presentation(&s.parent, &s.table));
            }
            Ok(Outcome::done(v))
        }
    }
}

fn cusps(census: &Census, g: &Global, r: &ClassRef) -> anyhow::Result<Outcome> {
    let e = census.get(&r.group)?;
    let v = match pick_class(census, g, r)? {
        None => json!({ "group": e.name, "cusps": e.presentation.cusp_count() }),
        Some(s) => json!({ "group": e.name, "index": s.index, "class": r.class, "cusps": s.tags.cusps }),
    };
    Ok(Outcome::done(v))
}

fn parse_slope(s: &str) -> anyhow::Result<FillingSlope> {
    let bad = || Error::Input(format!("slope must look like p,q; got {s:?}"));
    let (p, q) = s.trim_matches(|c| c == '(' || c == ')').split_once(',').ok_or_else(bad)?;
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: i64 = q.trim().parse().map_err(|_| bad())?;
    Ok(FillingSlope::new(p, q)?)
}

fn fill(e: &CensusEntry, g: &Global, cusp: usize, slope: &str, depth: usize) -> anyhow::Result<Outcome> {
    if depth < 2 {
        bail!(Error::Input("--depth must be at least 2".into()));
    }
    let slope = parse_slope(slope)?;
    let filled = dehn_fill(e, cusp, slope)?;
    let fp = fingerprint(&filled, depth, budget(g));
    let order = if fp.homology.free_rank == 0 {
        group_order(&filled, g.max_cosets)
    } else {
        None
    };
    Ok(Outcome {
        exhausted: !fp.complete(),
        value: json!({
            "group": e.name,
            "cusp": cusp,
            "slope": slope,
            "presentation": render_presentation(&filled),
            "fingerprint": fp,
            "order": order,
        }),
    })
}

fn chain_cmd(census: &Census, g: &Global, path: Option<&PathBuf>, depth: usize) -> anyhow::Result<Outcome> {
    if depth < 2 {
        bail!(Error::Input("--depth must be at least 2".into()));
    }
    let steps = load_chain(&path.cloned().unwrap_or_else(default_chain_path))?;
    let report = chain_walk(census, &steps, depth, budget(g))?;
    Ok(Outcome {
        exhausted: report.steps.iter().any(|s| s.verdict == Verdict::Partial),
        value: json!({ "all_consistent": report.all_consistent(), "report": report }),
    })
}

fn mic(
    census: &Census,
    g: &Global,
    r: &ClassRef,
    flavor: Option<Flavor>,
    all: bool,
    max_word_length: usize,
    tol: f64,
) -> anyhow::Result<Outcome> {
    let Some(s) = pick_class(census, g, r)? else {
        bail!(Error::Input("mic needs --index and --class".into()));
    };
    let d = s.index;
    let spec = match flavor {
        None => PauliGroupSpec::default_for(d)?,
        Some(Flavor::Qudit) => PauliGroupSpec::new(d, PauliFlavor::QuditWeylHeisenberg)?,
        Some(Flavor::MultiQubit) => PauliGroupSpec::new(d, PauliFlavor::MultiQubit)?,
    };
    let opts = FiducialOptions {
        max_word_length,
        source: format!("{} index {} class {}", r.group, d, r.class.unwrap_or(0)),
        ..FiducialOptions::default()
    };
    let fiducials = fiducials_from_perm_rep(&permutation_rep(&s.table), &spec, &opts);
    let mut reports = Vec::new();
    for f in &fiducials {
        let rep = mic_report(f, &spec, tol)?;
        if all || rep.is_mic {
            reports.push(rep);
        }
    }
    Ok(Outcome::done(json!({
        "group": r.group,
        "index": d,
        "class": r.class,
        "class_tags": tags_json(&s.tags),
        "candidates": fiducials.len(),
        "mics": reports.iter().filter(|m| m.is_mic).count(),
        "sics": reports.iter().filter(|m| m.is_sic).count(),
        "reports": reports,
    })))
}

fn validate(census: &Census, g: &Global, group: Option<&str>, depth: usize) -> anyhow::Result<Outcome> {
    if depth < 1 {
        bail!(Error::Input("--depth must be at least 1".into()));
    }
    let entries: Vec<&CensusEntry> = match group {
        Some(name) => vec![census.get(name)?],
        None => census.entries.iter().collect(),
    };
    let reports: Vec<_> = entries
        .into_iter()
        .map(|e| validate_census_entry_with_budget(e, depth, budget(g)))
        .collect();
    let exhausted = reports
        .iter()
        .any(|r| r.checks.iter().any(|c| c.status == CheckStatus::SkippedBudget));
    Ok(Outcome {
        exhausted,
        value: json!({
            "entries": reports.len(),
            "all_match": reports.iter().all(|r| r.all_match()),
            "reports": reports,
        }),
    })
}
