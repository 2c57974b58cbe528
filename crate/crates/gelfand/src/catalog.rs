//! Pair constructors for every family in the classification, embedded
//! generator data for the sporadic examples, ingestion of external pair
//! files, and the dual-pair search harness.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::perm::{
    product_action, AntiAutoHint, GroupPair, PairFile, PermError, PermGroup, Permutation,
};
use crate::scheme::OrbitalScheme;
use crate::spectral::{build_triple, CharacterTriple, SpectralError};
use crate::triples::{dual_triple, find_isomorphism, integrality_test, TripleIsomorphism};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

/// Cap on |G| for constructions that enumerate group elements.
const ENUMERATION_LIMIT: u128 = 1 << 20;

// ---------------------------------------------------------------------------
// recipes
// ---------------------------------------------------------------------------

/// Action of a finite group on a finite abelian group `A = Z_{d1}×…×Z_{dm}`,
/// given by invertible integer matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemidirectData {
    pub cyclic_orders: Vec<u64>,
    /// Row-major matrices acting on column vectors of A-coordinates.
    pub h_gens: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairRecipe {
    Symmetric(usize),
    CyclicRegular(usize),
    AbelianRegular(Vec<u64>),
    Wreath(usize, usize),
    Diagonal(Box<PairRecipe>),
    Semidirect(SemidirectData),
    Young(usize, usize),
    TwistedSquare(Box<PairRecipe>),
    File(String),
}

impl fmt::Display for PairRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairRecipe::Symmetric(n) => write!(f, "symmetric {}", n),
            PairRecipe::CyclicRegular(n) => write!(f, "cyclic {}", n),
            PairRecipe::AbelianRegular(ds) => {
                write!(f, "abelian")?;
                for d in ds {
                    write!(f, " {}", d)?;
                }
                Ok(())
            }
            PairRecipe::Wreath(n, k) => write!(f, "wreath {} {}", n, k),
            PairRecipe::Diagonal(inner) => write!(f, "diagonal {}", inner),
            PairRecipe::Semidirect(data) => {
                write!(f, "semidirect")?;
                for d in &data.cyclic_orders {
                    write!(f, " {}", d)?;
                }
                for m in &data.h_gens {
                    write!(f, " ;")?;
                    for row in m {
                        for v in row {
                            write!(f, " {}", v)?;
                        }
                    }
                }
                Ok(())
            }
            PairRecipe::Young(k, n) => write!(f, "young {} {}", k, n),
            PairRecipe::TwistedSquare(inner) => write!(f, "twisted_square {}", inner),
            PairRecipe::File(path) => write!(f, "file {}", path),
        }
    }
}

/// Parse one recipe line, e.g. `wreath 3 2`, `semidirect 7 ; 2`,
/// `diagonal sym 3`, `file path.pair`.
pub fn parse_recipe(line: &str) -> Result<PairRecipe, CatalogError> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let bad = |msg: &str| CatalogError::InvalidRecipe(format!("{}: {:?}", msg, line));
    if toks.is_empty() {
        return Err(bad("empty recipe"));
    }
    let int = |s: &str| -> Result<usize, CatalogError> {
        s.parse().map_err(|_| bad("expected an integer"))
    };
    match toks[0] {
        "symmetric" | "sym" => {
            if toks.len() != 2 {
                return Err(bad("symmetric takes one argument"));
            }
            Ok(PairRecipe::Symmetric(int(toks[1])?))
        }
        "cyclic" => {
            if toks.len() != 2 {
                return Err(bad("cyclic takes one argument"));
            }
            Ok(PairRecipe::CyclicRegular(int(toks[1])?))
        }
        "abelian" => {
            if toks.len() < 2 {
                return Err(bad("abelian takes cyclic orders"));
            }
            let ds = toks[1..]
                .iter()
                .map(|t| t.parse::<u64>().map_err(|_| bad("bad order")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PairRecipe::AbelianRegular(ds))
        }
        "wreath" => {
            if toks.len() != 3 {
                return Err(bad("wreath takes two arguments"));
            }
            Ok(PairRecipe::Wreath(int(toks[1])?, int(toks[2])?))
        }
        "young" => {
            if toks.len() != 3 {
                return Err(bad("young takes two arguments"));
            }
            Ok(PairRecipe::Young(int(toks[1])?, int(toks[2])?))
        }
        "diagonal" => {
            let inner = parse_recipe(&toks[1..].join(" "))?;
            Ok(PairRecipe::Diagonal(Box::new(inner)))
        }
        "twisted_square" | "twisted" => {
            let inner = parse_recipe(&toks[1..].join(" "))?;
            Ok(PairRecipe::TwistedSquare(Box::new(inner)))
        }
        "semidirect" => {
            let rest = line
                .trim_start()
                .strip_prefix("semidirect")
                .unwrap()
                .trim();
            let sections: Vec<&str> = rest.split(';').map(|s| s.trim()).collect();
            if sections.is_empty() || sections[0].is_empty() {
                return Err(bad("semidirect needs cyclic orders"));
            }
            let orders: Vec<u64> = sections[0]
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("bad order")))
                .collect::<Result<Vec<_>, _>>()?;
            let m = orders.len();
            let mut h_gens = Vec::new();
            for sec in &sections[1..] {
                let entries: Vec<i64> = sec
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|_| bad("bad matrix entry")))
                    .collect::<Result<Vec<_>, _>>()?;
                if entries.len() != m * m {
                    return Err(bad("matrix entry count must be m·m"));
                }
                let matrix: Vec<Vec<i64>> =
                    entries.chunks(m).map(|row| row.to_vec()).collect();
                h_gens.push(matrix);
            }
            Ok(PairRecipe::Semidirect(SemidirectData {
                cyclic_orders: orders,
                h_gens,
            }))
        }
        "file" => {
            if toks.len() != 2 {
                return Err(bad("file takes a path"));
            }
            Ok(PairRecipe::File(toks[1].to_string()))
        }
        _ => Err(bad("unknown recipe kind")),
    }
}

/// Parse a catalog: one recipe per line, `#` comments.
pub fn parse_catalog(text: &str) -> Result<Vec<PairRecipe>, CatalogError> {
    let mut out = Vec::new();
    for raw in text.lines() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_recipe(line)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// embedded data
// ---------------------------------------------------------------------------

/// Pair files shipped with the crate; `file NAME` resolves here when no file
/// of that name exists on disk.
pub fn builtin_pair_files() -> &'static HashMap<&'static str, &'static str> {
    use std::sync::OnceLock;
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut m = HashMap::new();
        m.insert("m11.pair", include_str!("../data/m11.pair"));
        m.insert("m12.pair", include_str!("../data/m12.pair"));
        m.insert(
            "psl2_11_in_m12.pair",
            include_str!("../data/psl2_11_in_m12.pair"),
        );
        m.insert(
            "m12_psl211_cosets.pair",
            include_str!("../data/m12_psl211_cosets.pair"),
        );
        m.insert("psl32.pair", include_str!("../data/psl32.pair"));
        m.insert("psl25.pair", include_str!("../data/psl25.pair"));
        m.insert("pgl25.pair", include_str!("../data/pgl25.pair"));
        m.insert("a4_natural.pair", include_str!("../data/a4_natural.pair"));
        m.insert("a5_natural.pair", include_str!("../data/a5_natural.pair"));
        m.insert("a6_natural.pair", include_str!("../data/a6_natural.pair"));
        m.insert("a7_natural.pair", include_str!("../data/a7_natural.pair"));
        m.insert("s4_faces.pair", include_str!("../data/s4_faces.pair"));
        m.insert("a4_pairs.pair", include_str!("../data/a4_pairs.pair"));
        m.insert(
            "z2xa4_faces.pair",
            include_str!("../data/z2xa4_faces.pair"),
        );
        m.insert("z3xs3.pair", include_str!("../data/z3xs3.pair"));
        m.insert("t10_deg6.pair", include_str!("../data/t10_deg6.pair"));
        m.insert("s3_regular.pair", include_str!("../data/s3_regular.pair"));
        m
    })
}

/// The shipped mini-catalog: the full transitive census for |X| ≤ 7.
pub fn mini_catalog_text() -> &'static str {
    include_str!("../data/mini_catalog.txt")
}

pub fn mini_catalog() -> Vec<PairRecipe> {
    parse_catalog(mini_catalog_text()).expect("the shipped catalog parses")
}

// ---------------------------------------------------------------------------
// instantiation
// ---------------------------------------------------------------------------

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Induced action of a group on the k-subsets of its point set, with the
/// base subset {0..k−1}.
pub fn subsets_action(group: &PermGroup, k: usize) -> Result<GroupPair, CatalogError> {
    let n = group.degree();
    if k == 0 || k > n {
        return Err(CatalogError::InvalidRecipe(format!(
            "subset size {} out of range for degree {}",
            k, n
        )));
    }
    // enumerate k-subsets in lexicographic order
    let mut subsets: Vec<Vec<usize>> = Vec::with_capacity(binomial(n, k));
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        subsets.push(cur.clone());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if cur[i] != i + n - k {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                cur.clear();
                break;
            }
        }
        if cur.is_empty() {
            break;
        }
        if subsets.len() > 1 && subsets.last() == Some(&subsets[subsets.len() - 2]) {
            subsets.pop();
            break;
        }
    }
    let index: HashMap<Vec<usize>, usize> = subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let mut gens = Vec::new();
    for g in group.generators() {
        let images: Vec<usize> = subsets
            .iter()
            .map(|s| {
                let mut img: Vec<usize> = s.iter().map(|&p| g.apply(p)).collect();
                img.sort_unstable();
                index[&img]
            })
            .collect();
        gens.push(Permutation::from_images(images)?);
    }
    let big = PermGroup::from_generators(subsets.len(), gens)?;
    Ok(GroupPair::new(big, 0)?)
}

fn wreath_pair(n: usize, k: usize) -> Result<GroupPair, CatalogError> {
    if n == 0 || k == 0 {
        return Err(CatalogError::InvalidRecipe(
            "wreath parameters must be positive".into(),
        ));
    }
    let degree = n * k;
    let mut gens: Vec<Permutation> = Vec::new();
    // S_n inside block 0
    if n >= 2 {
        let mut tr: Vec<usize> = (0..degree).collect();
        tr.swap(0, 1);
        gens.push(Permutation::from_images(tr).unwrap());
        let mut cyc: Vec<usize> = (0..degree).collect();
        for i in 0..n {
            cyc[i] = (i + 1) % n;
        }
        gens.push(Permutation::from_images(cyc).unwrap());
    }
    // S_k on the blocks
    if k >= 2 {
        let mut swap: Vec<usize> = (0..degree).collect();
        for i in 0..n {
            swap[i] = n + i;
            swap[n + i] = i;
        }
        gens.push(Permutation::from_images(swap).unwrap());
        let cyc: Vec<usize> = (0..degree)
            .map(|p| {
                let (i, j) = (p % n, p / n);
                ((j + 1) % k) * n + i
            })
            .collect();
        gens.push(Permutation::from_images(cyc).unwrap());
    }
    let group = PermGroup::from_generators(degree, gens)?;
    Ok(GroupPair::new(group, 0)?)
}

fn abelian_regular_pair(orders: &[u64]) -> Result<GroupPair, CatalogError> {
    if orders.is_empty() || orders.iter().any(|&d| d == 0) {
        return Err(CatalogError::InvalidRecipe(
            "abelian orders must be positive".into(),
        ));
    }
    let degree: u64 = orders.iter().product();
    if degree as u128 > ENUMERATION_LIMIT {
        return Err(CatalogError::InvalidRecipe("abelian group too large".into()));
    }
    let degree = degree as usize;
    let strides: Vec<usize> = {
        let mut s = vec![1usize; orders.len()];
        for i in (0..orders.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * orders[i + 1] as usize;
        }
        s
    };
    let decode = |mut p: usize| -> Vec<u64> {
        let mut x = Vec::with_capacity(orders.len());
        for i in 0..orders.len() {
            x.push((p / strides[i]) as u64 % orders[i]);
            p %= strides[i];
        }
        x
    };
    let encode = |x: &[u64]| -> usize {
        x.iter()
            .enumerate()
            .map(|(i, &v)| (v % orders[i]) as usize * strides[i])
            .sum()
    };
    let mut gens = Vec::new();
    for (i, &d) in orders.iter().enumerate() {
        if d == 1 {
            continue;
        }
        let images: Vec<usize> = (0..degree)
            .map(|p| {
                let mut x = decode(p);
                x[i] = (x[i] + 1) % d;
                encode(&x)
            })
            .collect();
        gens.push(Permutation::from_images(images)?);
    }
    let group = PermGroup::from_generators(degree, gens)?;
    Ok(GroupPair::new(group, 0)?)
}

fn semidirect_pair(data: &SemidirectData) -> Result<GroupPair, CatalogError> {
    let orders = &data.cyclic_orders;
    let base = abelian_regular_pair(orders)?;
    let degree = base.degree();
    let m = orders.len();
    let strides: Vec<usize> = {
        let mut s = vec![1usize; m];
        for i in (0..m.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * orders[i + 1] as usize;
        }
        s
    };
    let decode = |mut p: usize| -> Vec<i64> {
        let mut x = Vec::with_capacity(m);
        for i in 0..m {
            x.push((p / strides[i]) as i64 % orders[i] as i64);
            p %= strides[i];
        }
        x
    };
    let encode = |x: &[i64]| -> usize {
        x.iter()
            .enumerate()
            .map(|(i, &v)| (v.rem_euclid(orders[i] as i64)) as usize * strides[i])
            .sum()
    };
    let mut gens: Vec<Permutation> = base.group().generators().to_vec();
    let translation_count = gens.len();
    for matrix in &data.h_gens {
        if matrix.len() != m || matrix.iter().any(|row| row.len() != m) {
            return Err(CatalogError::InvalidRecipe(
                "semidirect matrix has the wrong shape".into(),
            ));
        }
        // well-definedness: d_i | φ_{ij}·d_j
        for i in 0..m {
            for j in 0..m {
                if (matrix[i][j] as i128 * orders[j] as i128) % orders[i] as i128 != 0 {
                    return Err(CatalogError::InvalidRecipe(format!(
                        "matrix entry ({},{}) does not respect the cyclic orders",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let images: Vec<usize> = (0..degree)
            .map(|p| {
                let x = decode(p);
                let y: Vec<i64> = (0..m)
                    .map(|i| {
                        (0..m)
                            .map(|j| matrix[i][j].wrapping_mul(x[j]))
                            .sum::<i64>()
                            .rem_euclid(orders[i] as i64)
                    })
                    .collect();
                encode(&y)
            })
            .collect();
        let perm = Permutation::from_images(images).map_err(|_| {
            CatalogError::InvalidRecipe("semidirect matrix is not invertible".into())
        })?;
        gens.push(perm);
    }
    let group = PermGroup::from_generators(degree, gens)?;
    let pair = GroupPair::new(group, 0)?;
    // the anti-involution ν(a, h) = (h⁻¹(a), h⁻¹): translations are fixed,
    // matrix generators invert
    let hint_images: Vec<Permutation> = pair
        .group()
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            if i < translation_count {
                g.clone()
            } else {
                g.inverse()
            }
        })
        .collect();
    Ok(pair.with_antiauto_hint(AntiAutoHint {
        name: "semidirect anti-involution".to_string(),
        images: hint_images,
    }))
}

fn diagonal_pair(inner: &GroupPair) -> Result<GroupPair, CatalogError> {
    let g = inner.group();
    let elems = g.elements(ENUMERATION_LIMIT).ok_or_else(|| {
        CatalogError::InvalidRecipe("diagonal group too large to enumerate".into())
    })?;
    let index: HashMap<&Permutation, usize> =
        elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let id_pos = index[&Permutation::identity(g.degree())];
    let mut gens = Vec::new();
    for gen in g.generators() {
        let left: Vec<usize> = elems.iter().map(|x| index[&gen.compose(x)]).collect();
        gens.push(Permutation::from_images(left)?);
        let gi = gen.inverse();
        let right: Vec<usize> = elems.iter().map(|x| index[&x.compose(&gi)]).collect();
        gens.push(Permutation::from_images(right)?);
    }
    let group = PermGroup::from_generators(elems.len(), gens)?;
    Ok(GroupPair::new(group, id_pos)?)
}

/// Left coset action of a group on the cosets of an enumerable subgroup;
/// the base point is the coset of the identity.
pub fn coset_action(group: &PermGroup, subgroup: &PermGroup) -> Result<GroupPair, CatalogError> {
    let h_elems = subgroup.elements(ENUMERATION_LIMIT).ok_or_else(|| {
        CatalogError::InvalidRecipe("subgroup too large to enumerate".into())
    })?;
    let canon = |g: &Permutation| -> Permutation {
        h_elems.iter().map(|h| g.compose(h)).min().unwrap()
    };
    let id = canon(&Permutation::identity(group.degree()));
    let mut reps: Vec<Permutation> = vec![id.clone()];
    let mut index: HashMap<Permutation, usize> = HashMap::new();
    index.insert(id, 0);
    let mut head = 0;
    while head < reps.len() {
        let r = reps[head].clone();
        head += 1;
        for gen in group.generators() {
            let target = canon(&gen.compose(&r));
            if !index.contains_key(&target) {
                index.insert(target.clone(), reps.len());
                reps.push(target);
            }
        }
    }
    let degree = reps.len();
    let mut gens = Vec::new();
    for gen in group.generators() {
        let images: Vec<usize> = reps.iter().map(|r| index[&canon(&gen.compose(r))]).collect();
        gens.push(Permutation::from_images(images)?);
    }
    let big = PermGroup::from_generators(degree, gens)?;
    Ok(GroupPair::new(big, 0)?)
}

fn resolve_pair_file(path: &str) -> Result<PairFile, CatalogError> {
    if std::path::Path::new(path).exists() {
        let text = std::fs::read_to_string(path).map_err(|e| CatalogError::Io {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        return Ok(PairFile::parse(&text)?);
    }
    if let Some(text) = builtin_pair_files().get(path) {
        return Ok(PairFile::parse(text)?);
    }
    Err(CatalogError::Io {
        path: path.to_string(),
        message: "no such file on disk or among the built-in pair files".to_string(),
    })
}

/// Instantiate a recipe into a transitive pair of the predicted degree.
pub fn instantiate(recipe: &PairRecipe) -> Result<GroupPair, CatalogError> {
    let pair = match recipe {
        PairRecipe::Symmetric(n) => {
            if *n == 0 {
                return Err(CatalogError::InvalidRecipe("symmetric 0".into()));
            }
            GroupPair::new(crate::perm::symmetric_group(*n), 0)?
        }
        PairRecipe::CyclicRegular(n) => {
            if *n == 0 {
                return Err(CatalogError::InvalidRecipe("cyclic 0".into()));
            }
            GroupPair::new(crate::perm::cyclic_group(*n), 0)?
        }
        PairRecipe::AbelianRegular(orders) => abelian_regular_pair(orders)?,
        PairRecipe::Wreath(n, k) => wreath_pair(*n, *k)?,
        PairRecipe::Diagonal(inner) => {
            let inner_pair = instantiate(inner)?;
            diagonal_pair(&inner_pair)?
        }
        PairRecipe::Semidirect(data) => semidirect_pair(data)?,
        PairRecipe::Young(k, n) => {
            subsets_action(&crate::perm::symmetric_group(*n), *k)?
        }
        PairRecipe::TwistedSquare(inner) => {
            let p = instantiate(inner)?;
            product_action(&p, &p, true)?
        }
        PairRecipe::File(path) => resolve_pair_file(path)?.to_pair()?,
    };
    // degree check against the recipe's prediction
    let predicted = predicted_degree(recipe);
    if let Some(d) = predicted {
        if d != pair.degree() {
            return Err(CatalogError::InvalidRecipe(format!(
                "recipe {} produced degree {} instead of {}",
                recipe,
                pair.degree(),
                d
            )));
        }
    }
    Ok(pair)
}

fn predicted_degree(recipe: &PairRecipe) -> Option<usize> {
    match recipe {
        PairRecipe::Symmetric(n) | PairRecipe::CyclicRegular(n) => Some(*n),
        PairRecipe::AbelianRegular(orders) => {
            Some(orders.iter().product::<u64>() as usize)
        }
        PairRecipe::Wreath(n, k) => Some(n * k),
        PairRecipe::Semidirect(d) => Some(d.cyclic_orders.iter().product::<u64>() as usize),
        PairRecipe::Young(k, n) => Some(binomial(*n, *k)),
        PairRecipe::TwistedSquare(inner) => predicted_degree(inner).map(|d| 2 * d),
        PairRecipe::Diagonal(_) | PairRecipe::File(_) => None,
    }
}

/// Closed-form dual recipe when one exists.
pub fn dual_recipe(recipe: &PairRecipe) -> Option<PairRecipe> {
    match recipe {
        PairRecipe::Symmetric(n) => Some(PairRecipe::Symmetric(*n)),
        PairRecipe::CyclicRegular(n) => Some(PairRecipe::CyclicRegular(*n)),
        PairRecipe::AbelianRegular(d) => Some(PairRecipe::AbelianRegular(d.clone())),
        PairRecipe::Wreath(n, k) => Some(PairRecipe::Wreath(*k, *n)),
        PairRecipe::Semidirect(data) => {
            // adjoint action on the Pontryagin dual: transposed matrices
            let m = data.cyclic_orders.len();
            let transposed: Vec<Vec<Vec<i64>>> = data
                .h_gens
                .iter()
                .map(|mat| {
                    (0..m)
                        .map(|i| (0..m).map(|j| mat[j][i]).collect())
                        .collect()
                })
                .collect();
            Some(PairRecipe::Semidirect(SemidirectData {
                cyclic_orders: data.cyclic_orders.clone(),
                h_gens: transposed,
            }))
        }
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// dual search
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct DualSearchReport {
    /// Whether the target passed the integrality pre-filter.
    pub integral: bool,
    /// Sources whose triple realizes the dual of the target, with witnesses.
    pub matches: Vec<(PairRecipe, TripleIsomorphism)>,
    /// Sources whose triple is isomorphic to the target itself (a lower bound
    /// on the realization count r(C)).
    pub realization_count: usize,
    /// Per-source failures (wrong degree sources are silently skipped).
    pub failures: Vec<(PairRecipe, String)>,
}

/// Search a list of sources for realizations of the dual of `target`.
///
/// Sources are instantiated only when their degree can match `|X|`; failures
/// are collected, never fatal. The integrality pre-filter prunes targets whose
/// dual cannot come from any pair.
pub fn dual_search(target: &CharacterTriple, sources: &[PairRecipe]) -> DualSearchReport {
    let mut report = DualSearchReport {
        integral: integrality_test(target).is_integral(),
        matches: Vec::new(),
        realization_count: 0,
        failures: Vec::new(),
    };
    let dual = dual_triple(target);
    for recipe in sources {
        if let Some(d) = predicted_degree(recipe) {
            if d != target.x_size() {
                continue;
            }
        }
        let outcome: Result<(), String> = (|| {
            let pair = instantiate(recipe).map_err(|e| e.to_string())?;
            if pair.degree() != target.x_size() {
                return Ok(()); // wrong degree after instantiation: skip
            }
            let scheme = OrbitalScheme::build(&pair);
            if !scheme.is_gelfand() {
                return Ok(());
            }
            let triple = build_triple(&scheme).map_err(|e: SpectralError| e.to_string())?;
            if find_isomorphism(&triple, target).is_some() {
                report.realization_count += 1;
            }
            if report.integral {
                if let Some(wit) = find_isomorphism(&triple, &dual) {
                    report.matches.push((recipe.clone(), wit));
                }
            }
            Ok(())
        })();
        if let Err(msg) = outcome {
            report.failures.push((recipe.clone(), msg));
        }
    }
    report
}

/// Count catalog realizations of a triple (used for the classification table).
pub fn realization_sources(
    target: &CharacterTriple,
    sources: &[PairRecipe],
) -> Vec<PairRecipe> {
    let mut out = Vec::new();
    for recipe in sources {
        if let Some(d) = predicted_degree(recipe) {
            if d != target.x_size() {
                continue;
            }
        }
        let Ok(pair) = instantiate(recipe) else {
            continue;
        };
        if pair.degree() != target.x_size() {
            continue;
        }
        let scheme = OrbitalScheme::build(&pair);
        if !scheme.is_gelfand() {
            continue;
        }
        let Ok(triple) = build_triple(&scheme) else {
            continue;
        };
        if find_isomorphism(&triple, target).is_some() {
            out.push(recipe.clone());
        }
    }
    out
}

/// Convenience: recipe → validated triple.
pub fn triple_of_recipe(recipe: &PairRecipe) -> Result<CharacterTriple, String> {
    let pair = instantiate(recipe).map_err(|e| e.to_string())?;
    let scheme = OrbitalScheme::build(&pair);
    if !scheme.is_gelfand() {
        return Err("pair is not Gelfand".to_string());
    }
    build_triple(&scheme).map_err(|e| e.to_string())
}

/// Sporadic data sanity: orders and transitivity degrees of the embedded
/// generator sets, checked at load.
pub fn validate_embedded_data() -> Result<(), String> {
    let checks: [(&str, u128, usize); 6] = [
        ("m11.pair", 7920, 11),
        ("m12.pair", 95040, 12),
        ("psl2_11_in_m12.pair", 660, 12),
        ("psl32.pair", 168, 7),
        ("psl25.pair", 60, 6),
        ("pgl25.pair", 120, 6),
    ];
    for (name, order, degree) in checks {
        let text = builtin_pair_files()
            .get(name)
            .ok_or_else(|| format!("{} missing", name))?;
        let pf = PairFile::parse(text).map_err(|e| format!("{}: {}", name, e))?;
        if pf.degree != degree {
            return Err(format!("{}: degree {} ≠ {}", name, pf.degree, degree));
        }
        let group = PermGroup::from_generators(pf.degree, pf.generators.clone())
            .map_err(|e| format!("{}: {}", name, e))?;
        if group.order() != order {
            return Err(format!("{}: order {} ≠ {}", name, group.order(), order));
        }
    }
    // M11 is 4-transitive on 11 points: the orbit of a 4-tuple is full
    let m11 = resolve_pair_file("m11.pair").map_err(|e| e.to_string())?;
    let g = PermGroup::from_generators(m11.degree, m11.generators).unwrap();
    let mut tuples: Vec<[usize; 4]> = vec![[0, 1, 2, 3]];
    let mut seen: std::collections::HashSet<[usize; 4]> = tuples.iter().copied().collect();
    let mut head = 0;
    while head < tuples.len() {
        let t = tuples[head];
        head += 1;
        for gen in g.generators() {
            let img = [
                gen.apply(t[0]),
                gen.apply(t[1]),
                gen.apply(t[2]),
                gen.apply(t[3]),
            ];
            if seen.insert(img) {
                tuples.push(img);
            }
        }
    }
    if tuples.len() != 11 * 10 * 9 * 8 {
        return Err(format!(
            "m11 is not 4-transitive: {} ordered 4-tuples reached",
            tuples.len()
        ));
    }
    // PSL2(11) really sits inside M12 on the same 12 points
    let m12 = resolve_pair_file("m12.pair").map_err(|e| e.to_string())?;
    let m12g = PermGroup::from_generators(m12.degree, m12.generators).unwrap();
    let psl = resolve_pair_file("psl2_11_in_m12.pair").map_err(|e| e.to_string())?;
    for gen in &psl.generators {
        if !m12g.contains(gen) {
            return Err("psl2_11 generators do not lie in m12".to_string());
        }
    }
    Ok(())
}

/// The degree-22 sporadic pair (A_6, M11): M11 acting on the cosets of the
/// index-2 subgroup A_6 of a point stabilizer M10. A_6 is recovered as the
/// subgroup generated by the squares of M10 (its abelianization is Z_2).
/// The dual is realized by the twisted square of the natural action.
pub fn m11_degree22_pair() -> Result<GroupPair, CatalogError> {
    let m11 = resolve_pair_file("m11.pair")?.to_pair()?;
    let m10 = m11.stabilizer();
    let squares = {
        let elems = m10.elements(ENUMERATION_LIMIT).ok_or_else(|| {
            CatalogError::InvalidRecipe("stabilizer too large to enumerate".into())
        })?;
        let gens: Vec<Permutation> = elems.iter().map(|g| g.compose(g)).collect();
        PermGroup::from_generators(m11.degree(), gens)?
    };
    if squares.order() != 360 {
        return Err(CatalogError::InvalidRecipe(format!(
            "expected A_6 of order 360 inside M10, found order {}",
            squares.order()
        )));
    }
    coset_action(m11.group(), &squares)
}

/// The self-dual sporadic pair (PSL2(11), M12) on 144 cosets (shipped as a
/// frozen pair file; regenerate with `coset_action` from the m12 data).
pub fn m12_psl211_pair() -> Result<GroupPair, CatalogError> {
    instantiate(&PairRecipe::File("m12_psl211_cosets.pair".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;
    use num::rational::BigRational;
    use crate::cyclo::CycNum;

    fn rat(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn recipe_lines_round_trip() {
        for line in [
            "symmetric 7",
            "cyclic 12",
            "abelian 2 2",
            "wreath 3 2",
            "young 2 5",
            "diagonal symmetric 3",
            "twisted_square file m11.pair",
            "semidirect 7 ; 2",
            "semidirect 3 3 ; 0 2 1 0",
            "file m11.pair",
        ] {
            let recipe = parse_recipe(line).unwrap();
            let printed = recipe.to_string();
            assert_eq!(parse_recipe(&printed).unwrap(), recipe);
        }
        assert!(parse_recipe("frobnicate 3").is_err());
        assert!(parse_recipe("wreath 3").is_err());
    }

    #[test]
    fn family_instantiations_have_predicted_shapes() {
        let w = instantiate(&parse_recipe("wreath 4 2").unwrap()).unwrap();
        assert_eq!(w.degree(), 8);
        assert_eq!(w.group().order(), 24 * 24 * 2);

        let sd = instantiate(&parse_recipe("semidirect 7 ; 2").unwrap()).unwrap();
        assert_eq!(sd.degree(), 7);
        assert_eq!(sd.group().order(), 21);

        let d = instantiate(&parse_recipe("diagonal symmetric 3").unwrap()).unwrap();
        assert_eq!(d.degree(), 6);
        assert_eq!(d.group().order(), 36);
        assert_eq!(d.stabilizer().order(), 6);

        let y = instantiate(&parse_recipe("young 2 5").unwrap()).unwrap();
        assert_eq!(y.degree(), 10);
        assert_eq!(y.group().order(), 120);
        assert_eq!(y.stabilizer().order(), 12);

        let ab = instantiate(&parse_recipe("abelian 2 2").unwrap()).unwrap();
        assert_eq!(ab.degree(), 4);
        assert_eq!(ab.group().order(), 4);
    }

    #[test]
    fn embedded_data_is_valid() {
        validate_embedded_data().unwrap();
    }

    #[test]
    fn dual_recipes() {
        assert_eq!(
            dual_recipe(&parse_recipe("wreath 2 3").unwrap()),
            Some(parse_recipe("wreath 3 2").unwrap())
        );
        assert_eq!(
            dual_recipe(&parse_recipe("symmetric 5").unwrap()),
            Some(parse_recipe("symmetric 5").unwrap())
        );
        let sd = dual_recipe(&parse_recipe("semidirect 7 ; 2").unwrap()).unwrap();
        // 1×1 matrices are self-transposed
        assert_eq!(sd, parse_recipe("semidirect 7 ; 2").unwrap());
        assert!(dual_recipe(&parse_recipe("young 2 5").unwrap()).is_none());
    }

    #[test]
    fn semidirect_rejects_bad_matrices() {
        // non-invertible action
        assert!(instantiate(&parse_recipe("semidirect 4 ; 2").unwrap()).is_err());
        // incompatible with mixed orders: the Z_2 coordinate cannot feed the
        // Z_4 coordinate
        assert!(instantiate(&parse_recipe("semidirect 2 4 ; 1 0 1 1").unwrap()).is_err());
        // the other triangular direction is well-defined
        assert!(instantiate(&parse_recipe("semidirect 2 4 ; 1 1 0 1").unwrap()).is_ok());
    }

    #[test]
    fn semidirect_pairs_carry_certificates() {
        let pair = instantiate(&parse_recipe("semidirect 7 ; 2").unwrap()).unwrap();
        let cert = crate::scheme::antiautomorphism_certificate(&pair).unwrap();
        assert_eq!(cert.name, "semidirect anti-involution");
        // ({1}, Z_3) built from the cyclic recipe has no attached hint and μ
        // is nontrivial, so the certificate is absent
        let z3 = instantiate(&parse_recipe("cyclic 3").unwrap()).unwrap();
        assert!(crate::scheme::antiautomorphism_certificate(&z3).is_none());
    }

    #[test]
    fn f21_triple_is_the_starred_entry() {
        let t = triple_of_recipe(&parse_recipe("semidirect 7 ; 2").unwrap()).unwrap();
        assert_eq!(t.x_size(), 7);
        assert_eq!(t.rank(), 3);
        assert_eq!(t.b(), &[rat(1), rat(3), rat(3)]);
        let z = |e: u64| CycNum::root_of_unity(7, e);
        let p1 = CycNum::from_int(3) * (z(3) + z(5) + z(6));
        assert!(t.c()[1][1] == p1 || t.c()[1][2] == p1);
        // row sums (7, 0, 0)
        let row0: CycNum = t.c()[0]
            .iter()
            .fold(CycNum::zero(), |acc, e| acc + e.clone());
        assert_eq!(row0, CycNum::from_int(7));
    }

    #[test]
    fn semidirect_triple_matches_character_sums() {
        // independent oracle: C_{ij} = Σ_{χ in o(χ_j), a in o(a_i)} χ^{-1}(a)
        // for A = Z_7 with H = <mult by 2>; orbits {0}, {1,2,4}, {3,6,5}
        let orbits: [&[u64]; 3] = [&[0], &[1, 2, 4], &[3, 6, 5]];
        let mut c = vec![vec![CycNum::zero(); 3]; 3];
        for (i, o_a) in orbits.iter().enumerate() {
            for (j, o_chi) in orbits.iter().enumerate() {
                let mut acc = CycNum::zero();
                for &a in o_a.iter() {
                    for &y in o_chi.iter() {
                        // χ_y(a)^{-1} = ζ_7^{-ya}
                        acc = acc + CycNum::root_of_unity(7, (7 - (y * a) % 7) % 7);
                    }
                }
                c[i][j] = acc;
            }
        }
        let x = BigRational::from_integer(BigInt::from(7));
        let a: Vec<BigRational> = (0..3)
            .map(|i| c[i][0].as_rational().unwrap() * &x)
            .collect();
        let b: Vec<BigRational> = (0..3).map(|j| c[0][j].as_rational().unwrap()).collect();
        let mut mu = vec![0usize; 3];
        let mut pi = vec![0usize; 3];
        for i in 0..3 {
            let conj_row: Vec<CycNum> = c[i].iter().map(|e| e.conjugate()).collect();
            mu[i] = (0..3).position(|i2| c[i2] == conj_row).unwrap();
        }
        for j in 0..3 {
            pi[j] = (0..3)
                .position(|j2| (0..3).all(|i| c[i][j2] == c[i][j].conjugate()))
                .unwrap();
        }
        let expected = CharacterTriple::from_data(crate::spectral::TripleData {
            x_size: 7,
            a,
            b,
            c,
            mu,
            pi,
        })
        .unwrap();
        let computed = triple_of_recipe(&parse_recipe("semidirect 7 ; 2").unwrap()).unwrap();
        assert!(find_isomorphism(&computed, &expected).is_some());
    }

    #[test]
    fn mini_catalog_parses_and_counts() {
        let recipes = mini_catalog();
        assert!(recipes.len() >= 30);
    }

    #[test]
    fn coset_action_rebuilds_small_quotients() {
        // S_4 on the cosets of a point stabilizer recovers the natural action
        let s4 = crate::perm::symmetric_group(4);
        let st = s4.stabilizer(0).unwrap();
        let pair = coset_action(&s4, &st).unwrap();
        assert_eq!(pair.degree(), 4);
        assert_eq!(pair.group().order(), 24);
    }
}
