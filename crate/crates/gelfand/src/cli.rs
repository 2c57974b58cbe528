//! Command-line surface: `analyze`, `dual-search`, `table`, `check`, `equiv`,
//! `validate`. All output is assembled deterministically (no timestamps), so
//! identical invocations produce byte-identical bytes.
//!
//! Exit codes: 0 ok, 1 usage, 2 check failure, 3 inconclusive.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use num::complex::Complex64;

use crate::catalog::{
    self, dual_search, instantiate, mini_catalog, parse_catalog, parse_recipe, PairRecipe,
};
use crate::cyclo::CycNum;
use crate::perm::{GroupPair, PairFile};
use crate::scheme::{antiautomorphism_certificate, brute_force_gelfand, burnside_rank, OrbitalScheme};
use crate::spectral::{
    build_triple, check_idempotency, eigen_split_exact, invariant_violations,
    reconstruct_idempotents, validate_septuple, CharacterTriple,
};
use crate::triples::{
    conjecture_comparison, dual_triple, find_isomorphism, integrality_test, is_tensor_irreducible,
    self_duality, self_duality_convention_disagreement, splitting_field, symmetry_group,
    ConjectureVerdict, TripleIsomorphism,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "gelfand",
    about = "Exact character triples, duality and classification for finite Gelfand pairs",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// Recipe string, e.g. "symmetric 7", "wreath 4 2", "semidirect 7 ; 2"
    #[arg(long)]
    recipe: Option<String>,
    /// Pair file path (degree/generator/base lines)
    #[arg(long)]
    pair: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of one pair: scheme, triple, arithmetic and duality
    Analyze {
        #[command(flatten)]
        source: SourceArgs,
        /// Machine-readable key=value output
        #[arg(long)]
        machine: bool,
        /// Add clearly-labeled numeric renderings next to exact values
        #[arg(long)]
        approx: bool,
    },
    /// Search a catalog of sources for realizations of the dual triple
    DualSearch {
        #[command(flatten)]
        source: SourceArgs,
        /// Catalog file with one recipe per line (default: shipped mini-catalog)
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        machine: bool,
    },
    /// Classification table of canonical triples realized by the catalog
    Table {
        #[arg(long, default_value_t = 7)]
        max_degree: usize,
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long)]
        machine: bool,
    },
    /// Integrality tests only
    Check {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        machine: bool,
    },
    /// Strong Hecke equivalence diagram over a catalog of pairs
    Equiv {
        /// Catalog file with one recipe per line
        #[arg(long)]
        catalog: String,
        /// Node budget per edge search
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        machine: bool,
    },
    /// Exhaustive invariant sweep across a catalog (and optional triple files)
    Validate {
        /// Catalog file (default: shipped mini-catalog plus degree-8 family pairs)
        #[arg(long)]
        catalog: Option<String>,
        /// Serialized triple files to validate
        #[arg(long)]
        triple: Vec<String>,
    },
}

/// Run with explicit arguments; returns the exit code and the full output.
pub fn run(args: &[String]) -> (i32, String) {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return (EXIT_USAGE, e.to_string());
        }
    };
    let mut out = String::new();
    let code = match cli.command {
        Command::Analyze {
            source,
            machine,
            approx,
        } => cmd_analyze(&mut out, &source, machine, approx),
        Command::DualSearch {
            source,
            catalog,
            machine,
        } => cmd_dual_search(&mut out, &source, catalog.as_deref(), machine),
        Command::Table {
            max_degree,
            catalog,
            machine,
        } => cmd_table(&mut out, max_degree, catalog.as_deref(), machine),
        Command::Check { source, machine } => cmd_check(&mut out, &source, machine),
        Command::Equiv {
            catalog,
            budget,
            machine,
        } => cmd_equiv(&mut out, &catalog, budget, machine),
        Command::Validate { catalog, triple } => cmd_validate(&mut out, catalog.as_deref(), &triple),
    };
    (code, out)
}

fn load_source(source: &SourceArgs) -> Result<(String, GroupPair), String> {
    match (&source.recipe, &source.pair) {
        (Some(r), None) => {
            let recipe = parse_recipe(r).map_err(|e| e.to_string())?;
            let pair = instantiate(&recipe).map_err(|e| e.to_string())?;
            Ok((recipe.to_string(), pair))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {}", path, e))?;
            let pf = PairFile::parse(&text).map_err(|e| e.to_string())?;
            Ok((format!("file {}", path), pf.to_pair().map_err(|e| e.to_string())?))
        }
        _ => Err("exactly one of --recipe or --pair is required".to_string()),
    }
}

fn load_catalog(path: Option<&str>) -> Result<Vec<PairRecipe>, String> {
    match path {
        None => Ok(mini_catalog()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {}", p, e))?;
            parse_catalog(&text).map_err(|e| e.to_string())
        }
    }
}

fn perm_one_line(p: &[usize]) -> String {
    p.iter()
        .map(|&v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn approx_str(v: &CycNum) -> String {
    let z: Complex64 = v.to_complex();
    if z.im.abs() < 1e-9 {
        format!("{:.4}", z.re)
    } else {
        format!("{:.4}{:+.4}i", z.re, z.im)
    }
}

fn matrix_lines(out: &mut String, t: &CharacterTriple, approx: bool) {
    for row in t.c() {
        let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
        writeln!(out, "  [{}]", cells.join(", ")).unwrap();
        if approx {
            let cells: Vec<String> = row.iter().map(approx_str).collect();
            writeln!(out, "    (approx: [{}])", cells.join(", ")).unwrap();
        }
    }
}

fn witness_str(w: &TripleIsomorphism) -> String {
    format!(
        "sigma = ({}), tau = ({})",
        perm_one_line(&w.sigma),
        perm_one_line(&w.tau)
    )
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn cmd_analyze(out: &mut String, source: &SourceArgs, machine: bool, approx: bool) -> i32 {
    let (label, pair) = match load_source(source) {
        Ok(v) => v,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_USAGE;
        }
    };
    let scheme = OrbitalScheme::build(&pair);
    if machine {
        writeln!(out, "pair={}", label).unwrap();
        writeln!(out, "x={}", pair.degree()).unwrap();
        writeln!(out, "group_order={}", pair.group().order()).unwrap();
        writeln!(out, "stabilizer_order={}", pair.stabilizer().order()).unwrap();
        writeln!(
            out,
            "suborbits={}",
            scheme
                .suborbit_sizes()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
        .unwrap();
        writeln!(out, "gelfand={}", scheme.is_gelfand()).unwrap();
    } else {
        writeln!(out, "pair: {}", label).unwrap();
        writeln!(
            out,
            "|X| = {}  |G| = {}  |H| = {}",
            pair.degree(),
            pair.group().order(),
            pair.stabilizer().order()
        )
        .unwrap();
        writeln!(
            out,
            "suborbit sizes: {}",
            scheme
                .suborbit_sizes()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        )
        .unwrap();
        let cert = antiautomorphism_certificate(&pair);
        writeln!(
            out,
            "gelfand: {}{}",
            if scheme.is_gelfand() { "yes" } else { "no" },
            match cert {
                Some(c) => format!(" (anti-automorphism certificate: {})", c.name),
                None => String::new(),
            }
        )
        .unwrap();
    }
    if !scheme.is_gelfand() {
        writeln!(
            out,
            "convolution is noncommutative; spectral data unavailable"
        )
        .unwrap();
        return EXIT_OK;
    }
    let triple = match build_triple(&scheme) {
        Ok(t) => t,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_CHECK_FAILED;
        }
    };
    let sf = splitting_field(&triple);
    let integ = integrality_test(&triple);
    let sd = self_duality(&triple);
    if machine {
        out.push_str(&triple.serialize());
        writeln!(out, "conductor={}", sf.conductor).unwrap();
        writeln!(out, "galois={}", sf.galois_name()).unwrap();
        writeln!(out, "galois_order={}", sf.galois_order).unwrap();
        writeln!(out, "integral={}", integ.is_integral()).unwrap();
        writeln!(
            out,
            "self_dual={}",
            match &sd {
                None => "no".to_string(),
                Some(w) if w.is_identity() => "identity".to_string(),
                Some(_) => "nontrivial".to_string(),
            }
        )
        .unwrap();
    } else {
        let a_str: Vec<String> = triple.a().iter().map(|v| v.to_string()).collect();
        let b_str: Vec<String> = triple.b().iter().map(|v| v.to_string()).collect();
        writeln!(out, "A = {}", a_str.join(" ")).unwrap();
        writeln!(out, "B = {}", b_str.join(" ")).unwrap();
        writeln!(out, "C:").unwrap();
        matrix_lines(out, &triple, approx);
        writeln!(out, "mu = ({})", perm_one_line(triple.mu())).unwrap();
        writeln!(out, "pi = ({})", perm_one_line(triple.pi())).unwrap();
        writeln!(
            out,
            "splitting field: conductor {}, Gal(L/Q) = {} (order {})",
            sf.conductor,
            sf.galois_name(),
            sf.galois_order
        )
        .unwrap();
        match &integ.dual_structure_constants {
            Ok(()) => writeln!(out, "dual structure constants: pass").unwrap(),
            Err(w) => writeln!(
                out,
                "dual structure constants: FAIL at (i,j,m) = ({},{},{}), value {}",
                w.indices[0], w.indices[1], w.indices[2], w.value
            )
            .unwrap(),
        }
        match &integ.ratio_integrality {
            Ok(()) => writeln!(out, "ratio integrality: pass").unwrap(),
            Err(w) => writeln!(
                out,
                "ratio integrality: FAIL at (i,s) = ({},{}), value {}",
                w.indices[0], w.indices[1], w.value
            )
            .unwrap(),
        }
        writeln!(
            out,
            "integral triple: {}",
            if integ.is_integral() { "yes" } else { "no" }
        )
        .unwrap();
        match &sd {
            None => writeln!(out, "self-dual: no").unwrap(),
            Some(w) if w.is_identity() => {
                writeln!(out, "self-dual: yes (identity witness)").unwrap()
            }
            Some(w) => writeln!(out, "self-dual: yes ({})", witness_str(w)).unwrap(),
        }
        match conjecture_comparison(&pair, &triple) {
            ConjectureVerdict::Agree => {
                writeln!(out, "Gal(L/Q) vs N(H)/H: agree").unwrap();
            }
            ConjectureVerdict::Disagree {
                galois,
                normalizer_quotient,
            } => {
                writeln!(
                    out,
                    "Gal(L/Q) vs N(H)/H: disagree (Gal invariants {:?}, N(H)/H invariants {:?})",
                    galois, normalizer_quotient
                )
                .unwrap();
            }
            ConjectureVerdict::Untested(reason) => {
                writeln!(out, "Gal(L/Q) vs N(H)/H: untested ({})", reason).unwrap();
            }
        }
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn cmd_check(out: &mut String, source: &SourceArgs, machine: bool) -> i32 {
    let (label, pair) = match load_source(source) {
        Ok(v) => v,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_USAGE;
        }
    };
    let scheme = OrbitalScheme::build(&pair);
    if !scheme.is_gelfand() {
        writeln!(out, "{}: not a Gelfand pair", label).unwrap();
        return EXIT_INCONCLUSIVE;
    }
    let triple = match build_triple(&scheme) {
        Ok(t) => t,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_CHECK_FAILED;
        }
    };
    let report = integrality_test(&triple);
    if machine {
        writeln!(out, "pair={}", label).unwrap();
        writeln!(
            out,
            "dual_structure_constants={}",
            report.dual_structure_constants.is_ok()
        )
        .unwrap();
        writeln!(out, "ratio_integrality={}", report.ratio_integrality.is_ok()).unwrap();
        writeln!(out, "integral={}", report.is_integral()).unwrap();
    } else {
        writeln!(out, "pair: {}", label).unwrap();
        match &report.dual_structure_constants {
            Ok(()) => writeln!(out, "dual structure constants: pass").unwrap(),
            Err(w) => writeln!(
                out,
                "dual structure constants: FAIL at (i,j,m) = ({},{},{}), value {}",
                w.indices[0], w.indices[1], w.indices[2], w.value
            )
            .unwrap(),
        }
        match &report.ratio_integrality {
            Ok(()) => writeln!(out, "ratio integrality: pass").unwrap(),
            Err(w) => writeln!(
                out,
                "ratio integrality: FAIL at (i,s) = ({},{}), value {}",
                w.indices[0], w.indices[1], w.value
            )
            .unwrap(),
        }
    }
    if report.is_integral() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

// ---------------------------------------------------------------------------
// dual search
// ---------------------------------------------------------------------------

fn cmd_dual_search(
    out: &mut String,
    source: &SourceArgs,
    catalog: Option<&str>,
    machine: bool,
) -> i32 {
    let (label, pair) = match load_source(source) {
        Ok(v) => v,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_USAGE;
        }
    };
    let sources = match load_catalog(catalog) {
        Ok(s) => s,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_USAGE;
        }
    };
    let scheme = OrbitalScheme::build(&pair);
    if !scheme.is_gelfand() {
        writeln!(out, "{}: not a Gelfand pair", label).unwrap();
        return EXIT_INCONCLUSIVE;
    }
    let triple = match build_triple(&scheme) {
        Ok(t) => t,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_CHECK_FAILED;
        }
    };
    let report = dual_search(&triple, &sources);
    if machine {
        writeln!(out, "target={}", label).unwrap();
        writeln!(out, "integral={}", report.integral).unwrap();
        writeln!(out, "matches={}", report.matches.len()).unwrap();
        for (recipe, wit) in &report.matches {
            writeln!(
                out,
                "match recipe={:?} sigma={} tau={}",
                recipe.to_string(),
                perm_one_line(&wit.sigma),
                perm_one_line(&wit.tau)
            )
            .unwrap();
        }
        writeln!(out, "realizations={}", report.realization_count).unwrap();
    } else {
        writeln!(out, "target: {}", label).unwrap();
        writeln!(
            out,
            "integrality pre-filter: {}",
            if report.integral {
                "pass"
            } else {
                "fail (no dual pair can exist)"
            }
        )
        .unwrap();
        if report.matches.is_empty() {
            writeln!(out, "dual realizations found: none").unwrap();
        } else {
            writeln!(out, "dual realizations found:").unwrap();
            for (recipe, wit) in &report.matches {
                writeln!(out, "  {}  ({})", recipe, witness_str(wit)).unwrap();
            }
        }
        writeln!(
            out,
            "realizations of the target triple among sources (lower bound for r(C)): {}",
            report.realization_count
        )
        .unwrap();
        for (recipe, msg) in &report.failures {
            writeln!(out, "  note: {} failed: {}", recipe, msg).unwrap();
        }
    }
    if !report.integral {
        EXIT_CHECK_FAILED
    } else if report.matches.is_empty() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    }
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

pub struct TableEntry {
    pub triple: CharacterTriple,
    pub recipes: Vec<PairRecipe>,
    pub gal: String,
    pub out_col: String,
    pub self_dual: Option<bool>,
    pub dual_of: Option<usize>,
    pub starred: bool,
}

/// Build the classification rows for |X| ≤ max_degree from a catalog:
/// distinct canonical triples, tensor-irreducible only, with realization
/// counts, Galois data and dual pairings.
pub fn classification_table(
    max_degree: usize,
    recipes: &[PairRecipe],
) -> Result<Vec<(usize, Vec<TableEntry>)>, String> {
    let mut items: Vec<(PairRecipe, CharacterTriple, GroupPair)> = Vec::new();
    for recipe in recipes {
        let Ok(pair) = instantiate(recipe) else {
            continue;
        };
        if pair.degree() > max_degree {
            continue;
        }
        let scheme = OrbitalScheme::build(&pair);
        if !scheme.is_gelfand() {
            continue;
        }
        let triple = build_triple(&scheme).map_err(|e| e.to_string())?;
        items.push((recipe.clone(), triple, pair));
    }
    // group by isomorphism
    let mut classes: Vec<(usize, Vec<usize>)> = Vec::new();
    for idx in 0..items.len() {
        let t = &items[idx].1;
        let mut placed = false;
        for (rep, members) in classes.iter_mut() {
            let rt = &items[*rep].1;
            if rt.x_size() == t.x_size() && find_isomorphism(rt, t).is_some() {
                members.push(idx);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push((idx, vec![idx]));
        }
    }
    // tensor-irreducible filter
    let mut kept: Vec<(usize, Vec<usize>)> = Vec::new();
    for (rep, members) in classes {
        match is_tensor_irreducible(&items[rep].1, crate::triples::ENUMERATION_BOUND) {
            Ok(true) => kept.push((rep, members)),
            Ok(false) => {}
            Err(_) => kept.push((rep, members)), // rank above the bound: keep, not attempted
        }
    }
    // dual pairings among kept classes
    let duals: Vec<Option<usize>> = kept
        .iter()
        .map(|(rep, _)| {
            let dual = dual_triple(&items[*rep].1);
            kept.iter()
                .position(|(r2, _)| find_isomorphism(&items[*r2].1, &dual).is_some())
        })
        .collect();
    let mut by_degree: Vec<(usize, Vec<TableEntry>)> = Vec::new();
    for (class_idx, (rep, members)) in kept.iter().enumerate() {
        let t = items[*rep].1.clone();
        let x = t.x_size();
        let sf = splitting_field(&t);
        let sd = self_duality(&t).map(|w| w.is_identity());
        let starred = sd == Some(false);
        let out_col = match conjecture_comparison(&items[*rep].2, &t) {
            ConjectureVerdict::Agree => sf.galois_name(),
            ConjectureVerdict::Disagree {
                normalizer_quotient,
                ..
            } => {
                if normalizer_quotient.is_empty() {
                    "1".to_string()
                } else {
                    normalizer_quotient
                        .iter()
                        .map(|d| format!("Z{}", d))
                        .collect::<Vec<_>>()
                        .join(" x ")
                }
            }
            ConjectureVerdict::Untested(_) => "?".to_string(),
        };
        let entry = TableEntry {
            triple: t,
            recipes: members.iter().map(|&m| items[m].0.clone()).collect(),
            gal: sf.galois_name(),
            out_col,
            self_dual: sd,
            dual_of: duals[class_idx],
            starred,
        };
        match by_degree.iter_mut().find(|(d, _)| *d == x) {
            Some((_, list)) => list.push(entry),
            None => by_degree.push((x, vec![entry])),
        }
    }
    by_degree.sort_by_key(|(d, _)| *d);
    Ok(by_degree)
}

fn cmd_table(out: &mut String, max_degree: usize, catalog: Option<&str>, machine: bool) -> i32 {
    const TABLE_DEGREE_BOUND: usize = 30;
    if max_degree > TABLE_DEGREE_BOUND {
        writeln!(
            out,
            "error: --max-degree {} exceeds the configured bound {}",
            max_degree, TABLE_DEGREE_BOUND
        )
        .unwrap();
        return EXIT_USAGE;
    }
    let recipes = match load_catalog(catalog) {
        Ok(r) => r,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_USAGE;
        }
    };
    let table = match classification_table(max_degree, &recipes) {
        Ok(t) => t,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_CHECK_FAILED;
        }
    };
    let mut counter = 0usize;
    for (x, entries) in &table {
        if !machine {
            writeln!(out, "|X| = {}", x).unwrap();
        }
        for e in entries {
            counter += 1;
            if machine {
                writeln!(
                    out,
                    "entry idx={} x={} rank={} count={} gal={} out={} self_dual={} star={} dual_of={}",
                    counter,
                    x,
                    e.triple.rank(),
                    e.recipes.len(),
                    e.gal,
                    e.out_col,
                    match e.self_dual {
                        None => "no",
                        Some(true) => "identity",
                        Some(false) => "nontrivial",
                    },
                    if e.starred { "yes" } else { "no" },
                    match e.dual_of {
                        Some(d) => (d + 1).to_string(),
                        None => "-".to_string(),
                    }
                )
                .unwrap();
                out.push_str(&e.triple.serialize());
            } else {
                let star = if e.starred { " *" } else { "" };
                writeln!(
                    out,
                    "  entry {}{}  (rank {}, realizations >= {})",
                    counter,
                    star,
                    e.triple.rank(),
                    e.recipes.len()
                )
                .unwrap();
                matrix_lines(out, &e.triple, false);
                writeln!(out, "    N(H)/H = {}, Gal(L/Q) = {}", e.out_col, e.gal).unwrap();
                match e.self_dual {
                    Some(true) => writeln!(out, "    self-dual (identity witness)").unwrap(),
                    Some(false) => writeln!(out, "    self-dual (nontrivial witness)").unwrap(),
                    None => {}
                }
                writeln!(
                    out,
                    "    realized by: {}",
                    e.recipes
                        .iter()
                        .map(|r| r.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                )
                .unwrap();
            }
        }
    }
    // mark dual pairings in a trailer so entry numbering is already known
    let mut idx = 0usize;
    let flat: Vec<&TableEntry> = table.iter().flat_map(|(_, es)| es.iter()).collect();
    for e in &flat {
        idx += 1;
        if let Some(d) = e.dual_of {
            if d + 1 != idx {
                writeln!(out, "dual pair: entry {} <-> entry {}", idx, d + 1).unwrap();
            }
        } else {
            writeln!(out, "entry {} has no dual realization in the catalog", idx).unwrap();
        }
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// equiv
// ---------------------------------------------------------------------------

fn cmd_equiv(out: &mut String, catalog: &str, budget: u64, _machine: bool) -> i32 {
    let recipes = match load_catalog(Some(catalog)) {
        Ok(r) => r,
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_USAGE;
        }
    };
    let mut nodes = Vec::new();
    for recipe in &recipes {
        match instantiate(recipe) {
            Ok(pair) => nodes.push((recipe.to_string(), pair)),
            Err(e) => {
                writeln!(out, "error: {}: {}", recipe, e).unwrap();
                return EXIT_USAGE;
            }
        }
    }
    match crate::heckemaps::search_equivalences(&nodes, budget) {
        Ok(graph) => {
            out.push_str(&graph.format());
            if graph.exhausted.is_empty() {
                EXIT_OK
            } else {
                EXIT_INCONCLUSIVE
            }
        }
        Err(e) => {
            writeln!(out, "error: {}", e).unwrap();
            return EXIT_CHECK_FAILED;
        }
    }
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// The default validation corpus: the mini-catalog plus degree-8 family pairs
/// so the |X| ≤ 8 oracle sweep has its full range.
pub fn validation_corpus() -> Vec<PairRecipe> {
    let mut recipes = mini_catalog();
    for extra in [
        "symmetric 8",
        "cyclic 8",
        "abelian 2 4",
        "abelian 2 2 2",
        "wreath 4 2",
        "wreath 2 4",
        "young 2 5",
    ] {
        recipes.push(parse_recipe(extra).expect("static recipe"));
    }
    recipes
}

struct Sweep<'a> {
    out: &'a mut String,
    checks: usize,
    failure: Option<String>,
}

impl<'a> Sweep<'a> {
    fn check(&mut self, label: &str, repro: &str, ok: bool) {
        if self.failure.is_some() {
            return;
        }
        self.checks += 1;
        if !ok {
            self.failure = Some(format!("{} (reproduce: {})", label, repro));
            writeln!(self.out, "FAIL {}", label).unwrap();
            writeln!(self.out, "  reproduce: {}", repro).unwrap();
        }
    }
}

fn cmd_validate(out: &mut String, catalog: Option<&str>, triple_files: &[String]) -> i32 {
    let recipes = match catalog {
        None => validation_corpus(),
        Some(p) => match load_catalog(Some(p)) {
            Ok(r) => r,
            Err(e) => {
                writeln!(out, "error: {}", e).unwrap();
                return EXIT_USAGE;
            }
        },
    };
    if recipes.is_empty() && triple_files.is_empty() {
        writeln!(out, "warning: 0 checks were executed (empty corpus)").unwrap();
        return EXIT_OK;
    }
    let mut sweep = Sweep {
        out,
        checks: 0,
        failure: None,
    };
    match catalog::validate_embedded_data() {
        Ok(()) => sweep.checks += 1,
        Err(e) => sweep.check(&format!("embedded data validation: {}", e), "validate", false),
    }
    for recipe in &recipes {
        if sweep.failure.is_some() {
            break;
        }
        let repro = format!("gelfand analyze --recipe \"{}\"", recipe);
        let pair = match instantiate(recipe) {
            Ok(p) => p,
            Err(e) => {
                sweep.check(&format!("instantiate {}: {}", recipe, e), &repro, false);
                break;
            }
        };
        // permutation-layer invariants
        sweep.check(
            &format!("{}: |G| = |X|·|H|", recipe),
            &repro,
            pair.group().order() == pair.degree() as u128 * pair.stabilizer().order(),
        );
        let exp = pair.group().exponent_bound();
        let mut state = 0xabcdu64;
        let mut membership_ok = true;
        let mut exponent_ok = true;
        for _ in 0..100 {
            let x = pair.group().random_element(&mut state);
            if !pair.group().contains(&x) {
                membership_ok = false;
            }
            if exp % x.order() != 0 {
                exponent_ok = false;
            }
        }
        let gens = pair.group().generators();
        for i in 0..gens.len().min(3) {
            for j in 0..gens.len().min(3) {
                let prod = gens[i].compose(&gens[j]);
                if !pair.group().contains(&prod) {
                    membership_ok = false;
                }
                for g3 in gens.iter().take(3) {
                    if !pair.group().contains(&prod.compose(g3)) {
                        membership_ok = false;
                    }
                }
            }
        }
        sweep.check(&format!("{}: membership probes", recipe), &repro, membership_ok);
        sweep.check(
            &format!("{}: exponent bound divisibility", recipe),
            &repro,
            exponent_ok,
        );
        // scheme invariants
        let scheme = OrbitalScheme::build(&pair);
        let r = scheme.rank();
        let x = scheme.degree();
        let sizes = scheme.suborbit_sizes().to_vec();
        sweep.check(
            &format!("{}: suborbits partition X", recipe),
            &repro,
            sizes.iter().sum::<usize>() == x,
        );
        let mut inter_ok = true;
        let mut mu_ok = true;
        let mu = scheme.mu().to_vec();
        for i in 0..r {
            if mu[mu[i]] != i || sizes[i] != sizes[mu[i]] {
                mu_ok = false;
            }
            for s in 0..r {
                let row: i64 = (0..r).map(|j| scheme.a(i, j, s)).sum();
                if row as usize != sizes[i] {
                    inter_ok = false;
                }
                if scheme.a(0, i, s) != i64::from(i == s) {
                    inter_ok = false;
                }
            }
            for j in 0..r {
                let lhs: i64 = (0..r)
                    .map(|s| scheme.a(i, j, s) * (x * sizes[s]) as i64)
                    .sum();
                if lhs as usize != x * sizes[i] * sizes[j] {
                    inter_ok = false;
                }
                for s in 0..r {
                    if scheme.a(i, j, s) < 0
                        || sizes[s] as i64 * scheme.a(i, j, s)
                            != sizes[mu[s]] as i64 * scheme.a(mu[j], mu[i], mu[s])
                    {
                        inter_ok = false;
                    }
                }
            }
        }
        sweep.check(
            &format!("{}: intersection identities", recipe),
            &repro,
            inter_ok,
        );
        sweep.check(&format!("{}: pairing involution", recipe), &repro, mu_ok);
        if let Some(burnside) = burnside_rank(&pair, 100_000) {
            sweep.check(
                &format!("{}: Burnside rank", recipe),
                &repro,
                burnside == r,
            );
        }
        if x <= 12 {
            sweep.check(
                &format!("{}: Gelfand matches matrix commutativity", recipe),
                &repro,
                scheme.is_gelfand() == brute_force_gelfand(&scheme),
            );
        }
        if !scheme.is_gelfand() {
            continue;
        }
        // spectral invariants
        let triple = match build_triple(&scheme) {
            Ok(t) => t,
            Err(e) => {
                sweep.check(&format!("{}: build_triple: {}", recipe, e), &repro, false);
                break;
            }
        };
        sweep.check(
            &format!("{}: triple identities", recipe),
            &repro,
            invariant_violations(triple.data()).is_empty(),
        );
        sweep.check(
            &format!("{}: eigenvalue integrality", recipe),
            &repro,
            triple.ratios_integral(),
        );
        sweep.check(
            &format!("{}: septuple identities", recipe),
            &repro,
            validate_septuple(triple.data()).is_ok(),
        );
        let _ = reconstruct_idempotents(&triple); // asserts D·D⁻¹ = I
        sweep.check(
            &format!("{}: idempotency of reconstructed projectors", recipe),
            &repro,
            check_idempotency(&scheme, &triple).is_ok(),
        );
        // oracle equivalence for |X| ≤ 8
        if x <= 8 {
            match eigen_split_exact(&scheme) {
                Ok(exact_cols) => {
                    let hybrid_cols = crate::spectral::eigen_split(&scheme).unwrap();
                    sweep.check(
                        &format!("{}: hybrid pipeline matches exact oracle", recipe),
                        &repro,
                        exact_cols == hybrid_cols,
                    );
                }
                Err(e) => {
                    sweep.check(
                        &format!("{}: exact oracle: {}", recipe, e),
                        &repro,
                        false,
                    );
                }
            }
        }
        // duality invariants
        let dd = dual_triple(&dual_triple(&triple));
        sweep.check(
            &format!("{}: double dual is isomorphic", recipe),
            &repro,
            find_isomorphism(&triple, &dd).is_some(),
        );
        // the two intertwining conventions are implemented literally per
        // definition; disagreement is flagged, never failed
        if self_duality_convention_disagreement(&triple) {
            writeln!(
                sweep.out,
                "note: {}: self-duality witness existence differs between the two intertwining conventions",
                recipe
            )
            .unwrap();
        }
        sweep.checks += 1;
        if r <= 8 {
            if let Ok(syms) = symmetry_group(&triple, 8) {
                let id_present = syms.iter().any(|s| {
                    s.galois == 1
                        && s.sigma.iter().enumerate().all(|(i, &v)| i == v)
                        && s.tau.iter().enumerate().all(|(i, &v)| i == v)
                });
                sweep.check(
                    &format!("{}: symmetry group contains the identity", recipe),
                    &repro,
                    id_present,
                );
                let gal_count = splitting_field(&triple).galois_order;
                let galois_seen: std::collections::BTreeSet<u64> =
                    syms.iter().map(|s| s.galois).collect();
                sweep.check(
                    &format!("{}: Galois symmetries present", recipe),
                    &repro,
                    galois_seen.len() as u64 >= gal_count,
                );
            }
        }
        // closed-form duals agree with the dual transform
        if matches!(
            recipe,
            PairRecipe::Wreath(..) | PairRecipe::Semidirect(..)
        ) && pair.degree() <= 16
        {
            if let Some(dr) = catalog::dual_recipe(recipe) {
                let ok = instantiate(&dr)
                    .ok()
                    .map(|dp| OrbitalScheme::build(&dp))
                    .filter(|s| s.is_gelfand())
                    .and_then(|s| build_triple(&s).ok())
                    .map(|dt| find_isomorphism(&dt, &dual_triple(&triple)).is_some())
                    .unwrap_or(false);
                sweep.check(
                    &format!("{}: closed-form dual realizes the dual triple", recipe),
                    &repro,
                    ok,
                );
            }
        }
        // identity self-map is a strong equivalence; Hecke ⟹ strong observed
        let analysis = crate::heckemaps::analyze_map(&crate::heckemaps::PairMap {
            source: pair.clone(),
            target: pair.clone(),
            images: pair.group().generators().to_vec(),
        });
        sweep.check(
            &format!("{}: identity map is strong", recipe),
            &repro,
            analysis.class == crate::heckemaps::MapClass::Strong,
        );
        sweep.check(
            &format!("{}: hecke implies strong", recipe),
            &repro,
            !analysis.hecke_bijection || analysis.strong_bijection,
        );
    }
    // integrality is necessary for realized duals: for every catalog triple
    // whose dual is realized by some catalog pair, the test must pass
    if sweep.failure.is_none() {
        let mut triples: Vec<(PairRecipe, CharacterTriple)> = Vec::new();
        for recipe in &recipes {
            if let Ok(pair) = instantiate(recipe) {
                let scheme = OrbitalScheme::build(&pair);
                if scheme.is_gelfand() {
                    if let Ok(t) = build_triple(&scheme) {
                        triples.push((recipe.clone(), t));
                    }
                }
            }
        }
        for (recipe, t) in &triples {
            let dual = dual_triple(t);
            let realized = triples
                .iter()
                .any(|(_, s)| s.x_size() == dual.x_size() && find_isomorphism(s, &dual).is_some());
            if realized {
                sweep.check(
                    &format!("{}: integrality necessary for realized dual", recipe),
                    &format!("gelfand check --recipe \"{}\"", recipe),
                    integrality_test(t).is_integral(),
                );
            }
        }
    }
    // serialized triple files
    for path in triple_files {
        let repro = format!("gelfand validate --triple {}", path);
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                sweep.check(&format!("read {}: {}", path, e), &repro, false);
                continue;
            }
        };
        match CharacterTriple::parse(&text) {
            Ok(data) => {
                let violations = invariant_violations(&data);
                sweep.check(
                    &format!("{}: triple identities ({:?})", path, violations),
                    &repro,
                    violations.is_empty(),
                );
                let sept = validate_septuple(&data);
                sweep.check(
                    &format!(
                        "{}: septuple identities ({})",
                        path,
                        match &sept {
                            Ok(_) => "ok".to_string(),
                            Err(v) => v.join("; "),
                        }
                    ),
                    &repro,
                    sept.is_ok(),
                );
            }
            Err(e) => {
                sweep.check(&format!("{}: parse: {}", path, e), &repro, false);
            }
        }
    }
    let checks = sweep.checks;
    let failed = sweep.failure.is_some();
    if failed {
        writeln!(out, "validation FAILED after {} checks", checks).unwrap();
        EXIT_CHECK_FAILED
    } else {
        writeln!(out, "validation passed: {} checks", checks).unwrap();
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut full = vec!["gelfand".to_string()];
        full.extend(args.iter().map(|s| s.to_string()));
        run(&full)
    }

    #[test]
    fn analyze_symmetric_7() {
        let (code, out) = run_args(&["analyze", "--recipe", "symmetric 7"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("[1, 6]"));
        assert!(out.contains("[6, -6]"));
        assert!(out.contains("self-dual: yes (identity witness)"));
    }

    #[test]
    fn analyze_wreath_42_matches_paper_matrix() {
        let (code, out) = run_args(&["analyze", "--recipe", "wreath 4 2"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("[1, 1, 6]"));
        assert!(out.contains("[3, 3, -6]"));
        assert!(out.contains("[4, -4, 0]"));
    }

    #[test]
    fn analyze_degenerate_rank_one() {
        let (code, out) = run_args(&["analyze", "--recipe", "cyclic 1"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("[1]"));
    }

    #[test]
    fn determinism_and_machine_round_trip() {
        let (c1, out1) = run_args(&["analyze", "--recipe", "semidirect 7 ; 2", "--machine"]);
        let (c2, out2) = run_args(&["analyze", "--recipe", "semidirect 7 ; 2", "--machine"]);
        assert_eq!(c1, EXIT_OK);
        assert_eq!(c1, c2);
        assert_eq!(out1, out2);
        // the serialized triple block round-trips
        let triple_block: String = out1
            .lines()
            .filter(|l| {
                l.starts_with("X ")
                    || l.starts_with("A ")
                    || l.starts_with("B ")
                    || l.starts_with("C ")
                    || l.starts_with("mu ")
                    || l.starts_with("pi ")
            })
            .map(|l| format!("{}\n", l))
            .collect();
        let data = CharacterTriple::parse(&triple_block).unwrap();
        let rebuilt = CharacterTriple::from_data(data).unwrap();
        assert_eq!(rebuilt.x_size(), 7);
        assert_eq!(rebuilt.rank(), 3);
    }

    #[test]
    fn check_exit_codes() {
        let (code, _) = run_args(&["check", "--recipe", "symmetric 5"]);
        assert_eq!(code, EXIT_OK);
        let (code, out) = run_args(&["check", "--recipe", "young 2 5"]);
        assert_eq!(code, EXIT_CHECK_FAILED);
        assert!(out.contains("ratio integrality: FAIL"));
        let (code, _) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, _) = run_args(&["analyze"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn validate_catches_corrupted_triples() {
        use crate::catalog::{parse_recipe, triple_of_recipe};
        let t = triple_of_recipe(&parse_recipe("symmetric 5").unwrap()).unwrap();
        let mut text = t.serialize();
        // corrupt one C entry
        text = text.replace("C 1;4 1;-4", "C 1;4 1;-5");
        assert_ne!(text, t.serialize());
        let dir = std::env::temp_dir().join("gelfand_corrupt_triple_test");
        std::fs::create_dir_all(&dir).unwrap();
        let good = dir.join("good.triple");
        let bad = dir.join("bad.triple");
        std::fs::write(&good, t.serialize()).unwrap();
        std::fs::write(&bad, &text).unwrap();
        let empty = dir.join("empty.catalog");
        std::fs::write(&empty, "").unwrap();
        let (code, out) = run_args(&[
            "validate",
            "--catalog",
            empty.to_str().unwrap(),
            "--triple",
            good.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK, "{}", out);
        let (code, out) = run_args(&[
            "validate",
            "--catalog",
            empty.to_str().unwrap(),
            "--triple",
            bad.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_CHECK_FAILED);
        assert!(out.contains("E:compatibility") || out.contains("row sum"), "{}", out);
    }

    #[test]
    fn analyze_reports_non_gelfand_pairs() {
        let (code, out) = run_args(&["analyze", "--recipe", "file s3_regular.pair"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("gelfand: no"));
        assert!(out.contains("noncommutative"));
    }

    #[test]
    fn table_output_is_deterministic() {
        let (c1, out1) = run_args(&["table", "--max-degree", "4"]);
        let (c2, out2) = run_args(&["table", "--max-degree", "4"]);
        assert_eq!(c1, EXIT_OK);
        assert_eq!(c1, c2);
        assert_eq!(out1, out2);
        assert!(out1.contains("|X| = 4"));
    }

    #[test]
    fn validate_empty_corpus_warns() {
        let dir = std::env::temp_dir().join("gelfand_empty_catalog_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.catalog");
        std::fs::write(&path, "# nothing here\n").unwrap();
        let (code, out) = run_args(&["validate", "--catalog", path.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("warning: 0 checks were executed"));
    }
}
