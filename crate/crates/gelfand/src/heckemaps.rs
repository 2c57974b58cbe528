//! Hecke equivalence between pairs: verification of given maps and bounded
//! search for strong equivalences, reproducing the equivalence diagrams.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::perm::{graph_evaluate, graph_group, GroupPair, PermGroup, Permutation};
use crate::scheme::OrbitalScheme;
use crate::spectral::build_triple;
use crate::triples::find_isomorphism;

#[derive(Debug, Error)]
pub enum HeckeError {
    #[error("pairs must be Gelfand with pairwise isomorphic triples: {0}")]
    Precondition(String),
}

/// A candidate map of pairs: images of every source generator in the target
/// group.
#[derive(Clone, Debug)]
pub struct PairMap {
    pub source: GroupPair,
    pub target: GroupPair,
    pub images: Vec<Permutation>,
}

/// Classification of a candidate map, strongest property that holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapClass {
    /// The generator images do not extend to a homomorphism.
    NotHom,
    /// A homomorphism, but not a Hecke or strong equivalence (possibly not
    /// even mapping H into H').
    Hom,
    /// Induces a bijection on double cosets but not on X. For finite Gelfand
    /// pairs this contradicts the implication from Hecke to strong
    /// equivalence; validation sweeps report any such witness.
    Hecke,
    /// Induces a bijection on X = G/H.
    Strong,
}

/// Full analysis behind [`verify_map`].
#[derive(Clone, Debug)]
pub struct MapAnalysis {
    pub class: MapClass,
    pub is_hom: bool,
    pub maps_h_into_h: bool,
    pub hecke_bijection: bool,
    pub strong_bijection: bool,
}

/// Decide what a generator-image assignment is: the graph-subgroup order test
/// certifies the homomorphism, orbit computations decide the induced maps on
/// X and on double cosets.
pub fn analyze_map(map: &PairMap) -> MapAnalysis {
    analyze_images(&map.source, &map.target, &map.images)
}

/// Borrowing core of [`analyze_map`]; the search loops call this directly so
/// candidate tuples never clone the pairs.
pub fn analyze_images(
    source: &GroupPair,
    target: &GroupPair,
    images: &[Permutation],
) -> MapAnalysis {
    let d1 = source.degree();
    let d2 = target.degree();
    let gens = source.group().generators();
    let not_hom = MapAnalysis {
        class: MapClass::NotHom,
        is_hom: false,
        maps_h_into_h: false,
        hecke_bijection: false,
        strong_bijection: false,
    };
    if images.len() != gens.len() {
        return not_hom;
    }
    // cheap necessary conditions before the graph test: the order of the
    // image of any short word must divide the order of the word
    for (g, im) in gens.iter().zip(images) {
        if g.order() % im.order() != 0 {
            return not_hom;
        }
    }
    for a in 0..gens.len() {
        for b in 0..gens.len() {
            let w = gens[a].compose(&gens[b]);
            let wi = images[a].compose(&images[b]);
            if w.order() % wi.order() != 0 {
                return not_hom;
            }
            let w3 = w.compose(&gens[a]);
            let wi3 = wi.compose(&images[a]);
            if w3.order() % wi3.order() != 0 {
                return not_hom;
            }
        }
    }
    let pairs: Vec<(Permutation, Permutation)> = gens
        .iter()
        .cloned()
        .zip(images.iter().cloned())
        .collect();
    let Ok(graph) = graph_group(d1, d2, &pairs) else {
        return not_hom;
    };
    if graph.order() != source.group().order() {
        return not_hom;
    }
    let phi = |x: &Permutation| graph_evaluate(&graph, d1, d2, x);
    // H must land inside H'
    let mut maps_h = true;
    for h in source.stabilizer().generators() {
        match phi(h) {
            Some(img) if target.stabilizer().contains(&img) => {}
            _ => {
                maps_h = false;
                break;
            }
        }
    }
    if !maps_h {
        return MapAnalysis {
            class: MapClass::Hom,
            is_hom: true,
            maps_h_into_h: false,
            hecke_bijection: false,
            strong_bijection: false,
        };
    }
    // induced point map gH ↦ φ(g)H', via a single BFS transversal
    let x0 = source.base_point();
    let x0t = target.base_point();
    let mut point_image = vec![usize::MAX; d1];
    {
        let mut reps: Vec<Option<Permutation>> = vec![None; d1];
        reps[x0] = Some(Permutation::identity(d1));
        let mut queue = vec![x0];
        let mut head = 0;
        while head < queue.len() {
            let p = queue[head];
            head += 1;
            let rep = reps[p].clone().unwrap();
            for g in gens {
                let q = g.apply(p);
                if reps[q].is_none() {
                    reps[q] = Some(g.compose(&rep));
                    queue.push(q);
                }
            }
        }
        for p in 0..d1 {
            let g = reps[p].as_ref().expect("transitive");
            let img = phi(g).expect("hom evaluates everywhere");
            point_image[p] = img.apply(x0t);
        }
    }
    let strong = d1 == d2 && {
        let mut seen = vec![false; d2];
        point_image.iter().all(|&q| {
            if seen[q] {
                false
            } else {
                seen[q] = true;
                true
            }
        })
    };
    // induced suborbit map
    let suborbit_of = |pair: &GroupPair| -> Vec<usize> {
        let mut idx = vec![usize::MAX; pair.degree()];
        for (i, orbit) in pair.stabilizer().orbits().into_iter().enumerate() {
            for p in orbit {
                idx[p] = i;
            }
        }
        idx
    };
    let src_orbit = suborbit_of(source);
    let dst_orbit = suborbit_of(target);
    let src_count = src_orbit.iter().max().map(|&m| m + 1).unwrap_or(0);
    let dst_count = dst_orbit.iter().max().map(|&m| m + 1).unwrap_or(0);
    let mut induced = vec![usize::MAX; src_count];
    let mut well_defined = true;
    for p in 0..d1 {
        let (i, j) = (src_orbit[p], dst_orbit[point_image[p]]);
        if induced[i] == usize::MAX {
            induced[i] = j;
        } else if induced[i] != j {
            well_defined = false;
            break;
        }
    }
    let hecke = well_defined && src_count == dst_count && {
        let mut seen = vec![false; dst_count];
        induced.iter().all(|&j| {
            if j == usize::MAX || seen[j] {
                false
            } else {
                seen[j] = true;
                true
            }
        })
    };
    let class = if strong {
        MapClass::Strong
    } else if hecke {
        MapClass::Hecke
    } else {
        MapClass::Hom
    };
    MapAnalysis {
        class,
        is_hom: true,
        maps_h_into_h: true,
        hecke_bijection: hecke,
        strong_bijection: strong,
    }
}

pub fn verify_map(map: &PairMap) -> MapClass {
    analyze_map(map).class
}

// ---------------------------------------------------------------------------
// equivalence search
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct GraphEdge {
    pub from: usize,
    pub to: usize,
    pub images: Vec<Permutation>,
}

#[derive(Debug)]
pub struct EquivalenceGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<GraphEdge>,
    /// Ordered pairs whose search ran out of budget.
    pub exhausted: Vec<(usize, usize)>,
}

impl EquivalenceGraph {
    /// Line format `source -> target : images…` plus a connectivity summary.
    pub fn format(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let images: Vec<String> = e.images.iter().map(|p| p.cycle_string()).collect();
            writeln!(
                out,
                "{} -> {} : {}",
                self.nodes[e.from],
                self.nodes[e.to],
                images.join(" ")
            )
            .unwrap();
        }
        for (a, b) in &self.exhausted {
            writeln!(
                out,
                "# budget exhausted: {} -> {}",
                self.nodes[*a], self.nodes[*b]
            )
            .unwrap();
        }
        writeln!(
            out,
            "connected: {}",
            if self.is_connected() { "yes" } else { "no" }
        )
        .unwrap();
        let terminals: Vec<&str> = self
            .terminals()
            .into_iter()
            .map(|i| self.nodes[i].as_str())
            .collect();
        writeln!(out, "terminal: {}", terminals.join(", ")).unwrap();
        out
    }

    /// Connectivity of the underlying undirected graph (identity self-loops
    /// ignored).
    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return true;
        }
        let mut reach = vec![false; n];
        reach[0] = true;
        let mut frontier = vec![0usize];
        while let Some(v) = frontier.pop() {
            for e in &self.edges {
                for (a, b) in [(e.from, e.to), (e.to, e.from)] {
                    if a == v && !reach[b] {
                        reach[b] = true;
                        frontier.push(b);
                    }
                }
            }
        }
        reach.iter().all(|&r| r)
    }

    /// Nodes with no outgoing edge to a different node.
    pub fn terminals(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&v| !self.edges.iter().any(|e| e.from == v && e.to != v))
            .collect()
    }
}

/// Search every ordered pair of nodes for a strong Hecke equivalence by
/// backtracking over generator images, constrained by element orders and
/// H → H' containment; each edge search stops after `budget` candidate
/// tuples. Deterministic traversal.
pub fn search_equivalences(
    pairs: &[(String, GroupPair)],
    budget: u64,
) -> Result<EquivalenceGraph, HeckeError> {
    // precondition: all Gelfand, pairwise isomorphic triples
    let mut triples = Vec::new();
    for (name, pair) in pairs {
        let scheme = OrbitalScheme::build(pair);
        if !scheme.is_gelfand() {
            return Err(HeckeError::Precondition(format!("{} is not Gelfand", name)));
        }
        let t = build_triple(&scheme)
            .map_err(|e| HeckeError::Precondition(format!("{}: {}", name, e)))?;
        triples.push(t);
    }
    for i in 1..triples.len() {
        if find_isomorphism(&triples[0], &triples[i]).is_none() {
            return Err(HeckeError::Precondition(format!(
                "triples of {} and {} are not isomorphic",
                pairs[0].0, pairs[i].0
            )));
        }
    }
    let mut edges = Vec::new();
    let mut exhausted = Vec::new();
    for (i, (_, src)) in pairs.iter().enumerate() {
        // identity self-loop
        edges.push(GraphEdge {
            from: i,
            to: i,
            images: src.group().generators().to_vec(),
        });
        for (j, (_, dst)) in pairs.iter().enumerate() {
            if i == j {
                continue;
            }
            match find_strong_map(src, dst, budget) {
                SearchOutcome::Found(images) => edges.push(GraphEdge {
                    from: i,
                    to: j,
                    images,
                }),
                SearchOutcome::Absent => {}
                SearchOutcome::Exhausted => exhausted.push((i, j)),
            }
        }
    }
    Ok(EquivalenceGraph {
        nodes: pairs.iter().map(|(n, _)| n.clone()).collect(),
        edges,
        exhausted,
    })
}

enum SearchOutcome {
    Found(Vec<Permutation>),
    Absent,
    Exhausted,
}

/// Elements of `group` by exact order, enumerated deterministically.
fn elements_of_order(group: &PermGroup, order: u128, limit: u128) -> Option<Vec<Permutation>> {
    let mut out = Vec::new();
    let complete = group.for_each_element(limit, &mut |g| {
        if g.order() == order {
            out.push(g.clone());
        }
    });
    if complete {
        Some(out)
    } else {
        None
    }
}

/// Try to find a two-element generating set by seeded sampling; keeps the
/// image-tuple space of the search small for sources with many generators.
fn small_generating_set(group: &PermGroup) -> Option<(Permutation, Permutation)> {
    let mut state = 0x9e37u64;
    let sample: Vec<Permutation> = (0..16).map(|_| group.random_element(&mut state)).collect();
    for a in &sample {
        for b in &sample {
            if a == b {
                continue;
            }
            let sub = PermGroup::from_generators(group.degree(), vec![a.clone(), b.clone()])
                .expect("elements are valid permutations");
            if sub.order() == group.order() {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

fn find_strong_map(src: &GroupPair, dst: &GroupPair, budget: u64) -> SearchOutcome {
    // a strong equivalence is injective on groups
    if src.group().order() > dst.group().order() {
        return SearchOutcome::Absent;
    }
    const ELEMENT_LIMIT: u128 = 1 << 20;
    let original_gens = src.group().generators().to_vec();
    if original_gens.is_empty() {
        // trivial source group: the empty assignment is the only map
        return if analyze_images(src, dst, &[]).strong_bijection {
            SearchOutcome::Found(Vec::new())
        } else {
            SearchOutcome::Absent
        };
    }
    // search over a two-element generating set when one exists, then carry
    // the found homomorphism back to the original generators
    let (search_src, shrunk): (GroupPair, bool) = if original_gens.len() > 2 {
        match small_generating_set(src.group()) {
            Some((a, b)) => {
                let regenerated =
                    PermGroup::from_generators(src.degree(), vec![a, b]).expect("valid");
                match GroupPair::new(regenerated, src.base_point()) {
                    Ok(p) => (p, true),
                    Err(_) => (src.clone(), false),
                }
            }
            None => (src.clone(), false),
        }
    } else {
        (src.clone(), false)
    };
    let src = &search_src;
    let gens = src.group().generators().to_vec();
    let mut candidate_lists: Vec<Vec<Permutation>> = Vec::new();
    for g in &gens {
        match elements_of_order(dst.group(), g.order(), ELEMENT_LIMIT) {
            Some(list) if !list.is_empty() => candidate_lists.push(list),
            _ => return SearchOutcome::Absent,
        }
    }
    // reduce the first generator's candidates to representatives modulo
    // H'-conjugation: composing a map with conjugation by h' ∈ H' preserves
    // the H → H' containment and the bijection properties
    let h_gens: Vec<Permutation> = dst.stabilizer().generators().to_vec();
    {
        let list = &mut candidate_lists[0];
        let mut reps: Vec<Permutation> = Vec::new();
        let mut seen: HashMap<Permutation, ()> = HashMap::new();
        for x in list.iter() {
            if seen.contains_key(x) {
                continue;
            }
            // close the conjugation orbit of x under H' generators
            let mut orbit = vec![x.clone()];
            seen.insert(x.clone(), ());
            let mut head = 0;
            while head < orbit.len() {
                let y = orbit[head].clone();
                head += 1;
                for h in &h_gens {
                    let conj = h.compose(&y).compose(&h.inverse());
                    if !seen.contains_key(&conj) {
                        seen.insert(conj.clone(), ());
                        orbit.push(conj);
                    }
                }
            }
            reps.push(x.clone());
        }
        *list = reps;
    }
    let mut assignment: Vec<usize> = vec![0; gens.len()];
    let mut spent: u64 = 0;
    loop {
        spent += 1;
        if spent > budget {
            return SearchOutcome::Exhausted;
        }
        let images: Vec<Permutation> = assignment
            .iter()
            .enumerate()
            .map(|(m, &idx)| candidate_lists[m][idx].clone())
            .collect();
        if analyze_images(src, dst, &images).strong_bijection {
            if !shrunk {
                return SearchOutcome::Found(images);
            }
            // express the original generators through the verified graph
            let pairs: Vec<(Permutation, Permutation)> =
                gens.iter().cloned().zip(images.iter().cloned()).collect();
            let Ok(graph) = graph_group(src.degree(), dst.degree(), &pairs) else {
                return SearchOutcome::Absent;
            };
            let originals: Option<Vec<Permutation>> = original_gens
                .iter()
                .map(|g| graph_evaluate(&graph, src.degree(), dst.degree(), g))
                .collect();
            match originals {
                Some(images) => return SearchOutcome::Found(images),
                None => return SearchOutcome::Absent,
            }
        }
        // next tuple
        let mut pos = gens.len();
        loop {
            if pos == 0 {
                return SearchOutcome::Absent;
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < candidate_lists[pos].len() {
                break;
            }
            assignment[pos] = 0;
            if pos == 0 {
                return SearchOutcome::Absent;
            }
        }
    }
}

/// Compose two maps along a shared middle pair; the composed images verify as
/// a map from the first source to the final target.
pub fn compose_maps(first: &PairMap, second: &PairMap) -> Option<PairMap> {
    let d1 = second.source.degree();
    let d2 = second.target.degree();
    let pairs: Vec<(Permutation, Permutation)> = second
        .source
        .group()
        .generators()
        .iter()
        .cloned()
        .zip(second.images.iter().cloned())
        .collect();
    let graph = graph_group(d1, d2, &pairs).ok()?;
    if graph.order() != second.source.group().order() {
        return None;
    }
    let images: Vec<Permutation> = first
        .images
        .iter()
        .map(|img| graph_evaluate(&graph, d1, d2, img))
        .collect::<Option<Vec<_>>>()?;
    Some(PairMap {
        source: first.source.clone(),
        target: second.target.clone(),
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{instantiate, parse_recipe};
    use crate::perm::{alternating_group, symmetric_group};

    fn pair_of(g: PermGroup) -> GroupPair {
        GroupPair::new(g, 0).unwrap()
    }

    #[test]
    fn inclusion_a6_a7_to_s6_s7_is_strong() {
        let a7 = pair_of(alternating_group(7));
        let s7 = pair_of(symmetric_group(7));
        let images = a7.group().generators().to_vec();
        let map = PairMap {
            source: a7,
            target: s7,
            images,
        };
        assert_eq!(verify_map(&map), MapClass::Strong);
    }

    #[test]
    fn identity_map_is_strong() {
        let s5 = pair_of(symmetric_group(5));
        let map = PairMap {
            source: s5.clone(),
            target: s5.clone(),
            images: s5.group().generators().to_vec(),
        };
        assert_eq!(verify_map(&map), MapClass::Strong);
    }

    #[test]
    fn crushing_maps_classify_correctly() {
        let s3 = pair_of(symmetric_group(3));
        // (1 2) ↦ (1 2), (1 2 3) ↦ (1 2): the 3-cycle's relation breaks
        let map = PairMap {
            source: s3.clone(),
            target: s3.clone(),
            images: vec![
                Permutation::parse_cycles("(1 2)", 3).unwrap(),
                Permutation::parse_cycles("(1 2)", 3).unwrap(),
            ],
        };
        assert_eq!(verify_map(&map), MapClass::NotHom);
        // (1 2) ↦ (1 2), (1 2 3) ↦ id is the sign map composed with a
        // section: a genuine homomorphism, but H does not land in H
        let map = PairMap {
            source: s3.clone(),
            target: s3.clone(),
            images: vec![
                Permutation::parse_cycles("(1 2)", 3).unwrap(),
                Permutation::identity(3),
            ],
        };
        let analysis = analyze_map(&map);
        assert_eq!(analysis.class, MapClass::Hom);
        assert!(analysis.is_hom && !analysis.maps_h_into_h);
    }

    #[test]
    fn degree7_diagram_is_connected_with_terminal_s7() {
        let nodes = vec![
            (
                "(S_4, PSL(3,2))".to_string(),
                instantiate(&parse_recipe("file psl32.pair").unwrap()).unwrap(),
            ),
            (
                "(A_6, A_7)".to_string(),
                pair_of(alternating_group(7)),
            ),
            ("(S_6, S_7)".to_string(), pair_of(symmetric_group(7))),
        ];
        let graph = search_equivalences(&nodes, 1_000_000).unwrap();
        assert!(graph.is_connected());
        let terminals = graph.terminals();
        assert_eq!(terminals, vec![2]);
        // every found edge verifies strong, and composable edges compose
        for e in &graph.edges {
            let map = PairMap {
                source: nodes[e.from].1.clone(),
                target: nodes[e.to].1.clone(),
                images: e.images.clone(),
            };
            assert_eq!(verify_map(&map), MapClass::Strong);
        }
        let ab = graph
            .edges
            .iter()
            .find(|e| e.from == 0 && e.to == 1)
            .or_else(|| graph.edges.iter().find(|e| e.from == 0 && e.to == 2));
        assert!(ab.is_some(), "PSL(3,2) node connects into the chain");
        // found edges compose: any pair of chained edges verifies as a map
        let as_map = |e: &GraphEdge| PairMap {
            source: nodes[e.from].1.clone(),
            target: nodes[e.to].1.clone(),
            images: e.images.clone(),
        };
        for e1 in &graph.edges {
            for e2 in &graph.edges {
                if e1.to == e2.from && e1.from != e1.to && e2.from != e2.to {
                    let composed = compose_maps(&as_map(e1), &as_map(e2)).unwrap();
                    assert_eq!(verify_map(&composed), MapClass::Strong);
                }
            }
        }
    }

    #[test]
    fn mismatched_triples_are_rejected() {
        let nodes = vec![
            ("a".to_string(), pair_of(symmetric_group(7))),
            ("b".to_string(), pair_of(symmetric_group(6))),
        ];
        assert!(matches!(
            search_equivalences(&nodes, 1000),
            Err(HeckeError::Precondition(_))
        ));
    }

    #[test]
    fn single_pair_graph_has_identity_loop() {
        let nodes = vec![("s5".to_string(), pair_of(symmetric_group(5)))];
        let graph = search_equivalences(&nodes, 1000).unwrap();
        assert_eq!(graph.edges.len(), 1);
        assert_eq!(graph.edges[0].from, 0);
        assert_eq!(graph.edges[0].to, 0);
        assert!(graph.format().contains("terminal: s5"));
    }
}
