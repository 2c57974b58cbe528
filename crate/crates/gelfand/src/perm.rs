//! Permutation groups with a base and strong generating set.
//!
//! Points are 0-based internally; the text formats use 1-based disjoint-cycle
//! notation. The Schreier–Sims construction is deterministic so that orders,
//! orbit numberings and traversal orders are reproducible across runs.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PermError {
    #[error("generator images are not a bijection")]
    NonBijection,
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("group is not transitive on its point set")]
    Intransitive,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Bound up to which [`PermGroup::exponent_bound`] enumerates elements and
/// returns the exact exponent; above it the group order is returned instead
/// (always a valid multiple of the exponent).
pub const EXPONENT_ENUMERATION_BOUND: u128 = 1_000_000;

// ---------------------------------------------------------------------------
// Permutation
// ---------------------------------------------------------------------------

/// A bijection of `{0..degree−1}` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NonBijection);
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// Function composition: `(a.compose(b))(x) = a(b(x))` — apply `b` first.
    pub fn compose(&self, b: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), b.degree());
        Permutation {
            images: b.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u128 {
        let mut seen = vec![false; self.degree()];
        let mut ord: u128 = 1;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len: u128 = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x];
                len += 1;
            }
            ord = lcm_u128(ord, len);
        }
        ord
    }

    /// Nontrivial cycles, each rotated to start at its smallest point and
    /// sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }

    /// 1-based disjoint-cycle notation; the identity prints as `()`.
    pub fn cycle_string(&self) -> String {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return "()".to_string();
        }
        cycles
            .iter()
            .map(|c| {
                let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
                format!("({})", pts.join(" "))
            })
            .collect()
    }

    /// Parse 1-based disjoint-cycle notation such as `(1 2)(3 4)`.
    pub fn parse_cycles(s: &str, degree: usize) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        let body = s.trim();
        let mut rest = body;
        while !rest.trim().is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| PermError::Parse(format!("expected '(' in {:?}", body)))?;
            if !rest[..open].trim().is_empty() {
                return Err(PermError::Parse(format!("garbage in {:?}", body)));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| PermError::Parse(format!("unbalanced '(' in {:?}", body)))?;
            if close < open {
                return Err(PermError::Parse(format!("unbalanced ')' in {:?}", body)));
            }
            let inner = &rest[open + 1..close];
            rest = &rest[close + 1..];
            let pts: Vec<usize> = inner
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| PermError::Parse(format!("bad point {:?}", t)))
                })
                .collect::<Result<_, _>>()?;
            if pts.is_empty() {
                continue; // "()" is the identity cycle
            }
            for &p in &pts {
                if p == 0 || p > degree {
                    return Err(PermError::PointOutOfRange { point: p, degree });
                }
                if used[p - 1] {
                    return Err(PermError::Parse(format!(
                        "point {} repeated; cycles must be disjoint",
                        p
                    )));
                }
                used[p - 1] = true;
            }
            for i in 0..pts.len() {
                images[pts[i] - 1] = pts[(i + 1) % pts.len()] - 1;
            }
        }
        Permutation::from_images(images)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_string())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{}", self.cycle_string())
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u128(a, b) * b
    }
}

// ---------------------------------------------------------------------------
// base and strong generating set
// ---------------------------------------------------------------------------

struct Level {
    point: usize,
    /// Strong generators whose fixed base prefix is exactly this level.
    gens: Vec<Permutation>,
    /// orbit point -> coset representative t with t(base point) = orbit point
    transversal: HashMap<usize, Permutation>,
    /// BFS discovery order of the orbit.
    orbit: Vec<usize>,
}

pub(crate) struct Bsgs {
    degree: usize,
    levels: Vec<Level>,
}

impl Bsgs {
    fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Generators of the level-`i` stabilizer subgroup: every strong generator
    /// attached at depth ≥ i.
    fn gens_from(&self, i: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        for l in &self.levels[i.min(self.levels.len())..] {
            out.extend(l.gens.iter().cloned());
        }
        out
    }

    fn recompute_level(&mut self, i: usize) {
        let gens = self.gens_from(i);
        let point = self.levels[i].point;
        let mut transversal = HashMap::new();
        let mut orbit = vec![point];
        transversal.insert(point, Permutation::identity(self.degree));
        let mut head = 0;
        while head < orbit.len() {
            let beta = orbit[head];
            head += 1;
            let t = transversal[&beta].clone();
            for g in &gens {
                let target = g.apply(beta);
                if !transversal.contains_key(&target) {
                    transversal.insert(target, g.compose(&t));
                    orbit.push(target);
                }
            }
        }
        self.levels[i].transversal = transversal;
        self.levels[i].orbit = orbit;
    }

    /// Strip `g` through levels starting at `from`; returns the residue and
    /// the level at which stripping stopped.
    fn strip(&self, g: Permutation, from: usize) -> (Permutation, usize) {
        let mut g = g;
        for i in from..self.levels.len() {
            let beta = g.apply(self.levels[i].point);
            match self.levels[i].transversal.get(&beta) {
                Some(t) => g = t.inverse().compose(&g),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    fn order(&self) -> u128 {
        self.levels
            .iter()
            .fold(1u128, |acc, l| acc * l.orbit.len() as u128)
    }

    fn contains(&self, g: &Permutation) -> bool {
        let (res, _) = self.strip(g.clone(), 0);
        res.is_identity()
    }

    fn build(degree: usize, generators: &[Permutation], base_hints: &[usize]) -> Bsgs {
        let mut bsgs = Bsgs {
            degree,
            levels: Vec::new(),
        };
        // Seed base points from the hints that the group actually moves, in
        // hint order, so callers can pin the leading base point.
        for &h in base_hints {
            if generators.iter().any(|g| g.apply(h) != h) {
                bsgs.levels.push(Level {
                    point: h,
                    gens: Vec::new(),
                    transversal: HashMap::new(),
                    orbit: Vec::new(),
                });
            }
        }
        for i in 0..bsgs.levels.len() {
            bsgs.recompute_level(i);
        }
        for g in generators {
            if !g.is_identity() && !bsgs.contains(g) {
                bsgs.add_generator(g.clone());
            }
        }
        // Close under Schreier generators, deepest level first.
        let mut i = bsgs.levels.len() as isize - 1;
        while i >= 0 {
            match bsgs.close_level(i as usize) {
                None => i -= 1,
                Some(j) => i = j as isize,
            }
        }
        bsgs
    }

    /// Insert a nonidentity element known to lie in the group, attaching it at
    /// the level matching its fixed base prefix; extends the base when needed.
    /// Returns the level it was attached to.
    fn add_generator(&mut self, g: Permutation) -> usize {
        let mut fixed = 0;
        while fixed < self.levels.len()
            && g.apply(self.levels[fixed].point) == self.levels[fixed].point
        {
            fixed += 1;
        }
        if fixed == self.levels.len() {
            // fixes the whole base: a new base point is required
            let point = (0..self.degree)
                .find(|&p| g.apply(p) != p)
                .expect("nonidentity permutation moves a point");
            self.levels.push(Level {
                point,
                gens: Vec::new(),
                transversal: HashMap::new(),
                orbit: Vec::new(),
            });
        }
        self.levels[fixed].gens.push(g);
        for i in 0..=fixed.min(self.levels.len() - 1) {
            self.recompute_level(i);
        }
        fixed
    }

    /// Test all Schreier generators of level `i`; on discovering a new strong
    /// generator, attach it and report the level to restart from.
    fn close_level(&mut self, i: usize) -> Option<usize> {
        let gens = self.gens_from(i);
        let orbit = self.levels[i].orbit.clone();
        for beta in orbit {
            let t_beta = self.levels[i].transversal[&beta].clone();
            for s in &gens {
                let target = s.apply(beta);
                let t_target = self.levels[i].transversal[&target].clone();
                let schreier = t_target.inverse().compose(&s.compose(&t_beta));
                if schreier.is_identity() {
                    continue;
                }
                let (residue, _) = self.strip(schreier, i + 1);
                if !residue.is_identity() {
                    let lvl = self.add_generator(residue);
                    return Some(lvl);
                }
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// PermGroup
// ---------------------------------------------------------------------------

/// A finite permutation group with membership, order and orbit queries backed
/// by a deterministic base-and-strong-generating-set structure.
///
/// Immutable after construction; freely shareable across threads.
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    bsgs: Arc<Bsgs>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        PermGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            bsgs: Arc::clone(&self.bsgs),
        }
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup(degree {}, order {}, {} generators)",
            self.degree,
            self.order(),
            self.generators.len()
        )
    }
}

impl PermGroup {
    pub fn from_generators(degree: usize, gens: Vec<Permutation>) -> Result<Self, PermError> {
        Self::from_generators_with_base_hint(degree, gens, &[])
    }

    pub fn from_generators_with_base_hint(
        degree: usize,
        gens: Vec<Permutation>,
        hints: &[usize],
    ) -> Result<Self, PermError> {
        for g in &gens {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(g.degree(), degree));
            }
        }
        let bsgs = Arc::new(Bsgs::build(degree, &gens, hints));
        Ok(PermGroup {
            degree,
            generators: gens,
            bsgs,
        })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_generators(degree, Vec::new()).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> u128 {
        self.bsgs.order()
    }

    pub fn base(&self) -> Vec<usize> {
        self.bsgs.base()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.bsgs.contains(g)
    }

    /// Orbit of `point`, ascending.
    pub fn orbit(&self, point: usize) -> Result<Vec<usize>, PermError> {
        if point >= self.degree {
            return Err(PermError::PointOutOfRange {
                point,
                degree: self.degree,
            });
        }
        let mut seen = vec![false; self.degree];
        let mut queue = vec![point];
        seen[point] = true;
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        queue.sort_unstable();
        Ok(queue)
    }

    /// Orbit partition of all points; orbits sorted by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if !assigned[p] {
                let orb = self.orbit(p).unwrap();
                for &x in &orb {
                    assigned[x] = true;
                }
                out.push(orb);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).unwrap().len() == self.degree
    }

    /// An element mapping `from` to `to`, when one exists.
    pub fn witness_mapping(&self, from: usize, to: usize) -> Option<Permutation> {
        if from >= self.degree || to >= self.degree {
            return None;
        }
        let mut reps: HashMap<usize, Permutation> = HashMap::new();
        reps.insert(from, Permutation::identity(self.degree));
        let mut queue = vec![from];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            if reps.contains_key(&to) {
                break;
            }
            let t = reps[&x].clone();
            for g in &self.generators {
                let y = g.apply(x);
                if !reps.contains_key(&y) {
                    reps.insert(y, g.compose(&t));
                    queue.push(y);
                }
            }
        }
        reps.remove(&to)
    }

    /// Stabilizer of `point` as a group in its own right.
    pub fn stabilizer(&self, point: usize) -> Result<PermGroup, PermError> {
        if point >= self.degree {
            return Err(PermError::PointOutOfRange {
                point,
                degree: self.degree,
            });
        }
        let chain = Bsgs::build(self.degree, &self.generators, &[point]);
        let gens = if chain.levels.first().map(|l| l.point) == Some(point) {
            chain.gens_from(1)
        } else {
            // the group fixes `point` already
            self.generators.clone()
        };
        PermGroup::from_generators(self.degree, gens)
    }

    /// Visit every element exactly once (product of transversal chains) while
    /// the group order stays within `limit`; returns false when it exceeds it.
    pub fn for_each_element<F: FnMut(&Permutation)>(&self, limit: u128, f: &mut F) -> bool {
        if self.order() > limit {
            return false;
        }
        fn rec<F: FnMut(&Permutation)>(bsgs: &Bsgs, level: usize, acc: &Permutation, f: &mut F) {
            if level == bsgs.levels.len() {
                f(acc);
                return;
            }
            for beta in &bsgs.levels[level].orbit {
                let t = &bsgs.levels[level].transversal[beta];
                rec(bsgs, level + 1, &acc.compose(t), f);
            }
        }
        rec(&self.bsgs, 0, &Permutation::identity(self.degree), f);
        true
    }

    /// All elements, when the order is at most `limit`.
    pub fn elements(&self, limit: u128) -> Option<Vec<Permutation>> {
        let mut out = Vec::new();
        if self.for_each_element(limit, &mut |g| out.push(g.clone())) {
            Some(out)
        } else {
            None
        }
    }

    /// Uniformly random element driven by a caller-owned deterministic state.
    pub fn random_element(&self, state: &mut u64) -> Permutation {
        let mut acc = Permutation::identity(self.degree);
        for level in &self.bsgs.levels {
            *state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let idx = ((*state >> 33) as usize) % level.orbit.len();
            let beta = level.orbit[idx];
            acc = acc.compose(&level.transversal[&beta]);
        }
        acc
    }

    /// A positive integer divisible by the order of every element: the exact
    /// exponent when the order is within [`EXPONENT_ENUMERATION_BOUND`], the
    /// group order otherwise.
    pub fn exponent_bound(&self) -> u128 {
        let mut exp: u128 = 1;
        let complete = self.for_each_element(EXPONENT_ENUMERATION_BOUND, &mut |g| {
            exp = lcm_u128(exp, g.order());
        });
        if complete {
            exp
        } else {
            self.order()
        }
    }
}

// ---------------------------------------------------------------------------
// GroupPair
// ---------------------------------------------------------------------------

/// A candidate involutive anti-automorphism attached to a pair by its
/// constructor, given by the images of the group generators.
#[derive(Clone, Debug)]
pub struct AntiAutoHint {
    pub name: String,
    pub images: Vec<Permutation>,
}

/// A transitive group together with the stabilizer of a designated base point
/// — the artifact's unit of input.
#[derive(Clone, Debug)]
pub struct GroupPair {
    group: PermGroup,
    base_point: usize,
    stabilizer: PermGroup,
    antiauto_hints: Vec<AntiAutoHint>,
}

impl GroupPair {
    pub fn new(group: PermGroup, base_point: usize) -> Result<Self, PermError> {
        if base_point >= group.degree() {
            return Err(PermError::PointOutOfRange {
                point: base_point,
                degree: group.degree(),
            });
        }
        if !group.is_transitive() {
            return Err(PermError::Intransitive);
        }
        let stabilizer = group.stabilizer(base_point)?;
        assert_eq!(
            group.order(),
            stabilizer.order() * group.degree() as u128,
            "orbit-stabilizer identity violated"
        );
        Ok(GroupPair {
            group,
            base_point,
            stabilizer,
            antiauto_hints: Vec::new(),
        })
    }

    /// The pair `({1}, G)` of a group acting on itself by left translations.
    pub fn regular(point_group: &PermGroup) -> Result<Self, PermError> {
        let elems = point_group.elements(1 << 20).ok_or(PermError::Intransitive)?;
        let index: HashMap<&Permutation, usize> =
            elems.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let id_pos = index[&Permutation::identity(point_group.degree())];
        let mut gens = Vec::new();
        for g in point_group.generators() {
            let images: Vec<usize> = elems.iter().map(|x| index[&g.compose(x)]).collect();
            gens.push(Permutation::from_images(images)?);
        }
        let group = PermGroup::from_generators(elems.len(), gens)?;
        GroupPair::new(group, id_pos)
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn base_point(&self) -> usize {
        self.base_point
    }

    pub fn stabilizer(&self) -> &PermGroup {
        &self.stabilizer
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn with_antiauto_hint(mut self, hint: AntiAutoHint) -> Self {
        self.antiauto_hints.push(hint);
        self
    }

    pub fn antiauto_hints(&self) -> &[AntiAutoHint] {
        &self.antiauto_hints
    }
}

/// Direct or Z_2-twisted product of two pairs acting on the disjoint union of
/// their point sets.
///
/// With `twist` the two degrees must agree and the swap of the two blocks is
/// added as a generator; the result is then transitive whenever the factors
/// are. Without it the orbits stay disconnected and pair construction reports
/// `Intransitive`.
pub fn product_action(
    gp1: &GroupPair,
    gp2: &GroupPair,
    twist: bool,
) -> Result<GroupPair, PermError> {
    let d1 = gp1.degree();
    let d2 = gp2.degree();
    if twist && d1 != d2 {
        return Err(PermError::DegreeMismatch(d1, d2));
    }
    let degree = d1 + d2;
    let mut gens = Vec::new();
    for g in gp1.group().generators() {
        let mut images: Vec<usize> = (0..degree).collect();
        for (p, img) in images.iter_mut().enumerate().take(d1) {
            *img = g.apply(p);
        }
        gens.push(Permutation::from_images(images)?);
    }
    for g in gp2.group().generators() {
        let mut images: Vec<usize> = (0..degree).collect();
        for p in 0..d2 {
            images[d1 + p] = d1 + g.apply(p);
        }
        gens.push(Permutation::from_images(images)?);
    }
    if twist {
        let images: Vec<usize> = (0..degree)
            .map(|p| if p < d1 { p + d1 } else { p - d1 })
            .collect();
        gens.push(Permutation::from_images(images)?);
    }
    let group = PermGroup::from_generators(degree, gens)?;
    GroupPair::new(group, gp1.base_point())
}

// ---------------------------------------------------------------------------
// homomorphism graphs
// ---------------------------------------------------------------------------

/// The subgroup of `Sym(X ⊔ X')` generated by `(g_i, images_i)`.
///
/// Its order equals `|⟨g_i⟩|` exactly when `g_i ↦ images_i` extends to a
/// well-defined homomorphism (the graph then projects bijectively onto the
/// source). Base points are pinned inside the source block so that
/// [`graph_evaluate`] can read images off the transversal chain.
pub fn graph_group(
    d1: usize,
    d2: usize,
    pairs: &[(Permutation, Permutation)],
) -> Result<PermGroup, PermError> {
    let degree = d1 + d2;
    let mut gens = Vec::new();
    for (g, h) in pairs {
        if g.degree() != d1 {
            return Err(PermError::DegreeMismatch(g.degree(), d1));
        }
        if h.degree() != d2 {
            return Err(PermError::DegreeMismatch(h.degree(), d2));
        }
        let images: Vec<usize> = (0..degree)
            .map(|p| {
                if p < d1 {
                    g.apply(p)
                } else {
                    d1 + h.apply(p - d1)
                }
            })
            .collect();
        gens.push(Permutation::from_images(images)?);
    }
    let hints: Vec<usize> = (0..d1).collect();
    PermGroup::from_generators_with_base_hint(degree, gens, &hints)
}

/// Evaluate the homomorphism encoded by a verified graph group on an arbitrary
/// source element; `None` when `x` is not in the projection.
pub fn graph_evaluate(
    graph: &PermGroup,
    d1: usize,
    d2: usize,
    x: &Permutation,
) -> Option<Permutation> {
    if x.degree() != d1 || graph.degree() != d1 + d2 {
        return None;
    }
    // If any base point lies in the image block the graph is not a function
    // graph over the source; refuse to evaluate.
    if graph.bsgs.levels.iter().any(|l| l.point >= d1) {
        return None;
    }
    let mut g: Vec<usize> = (0..d1 + d2).collect();
    for p in 0..d1 {
        g[p] = x.apply(p);
    }
    let mut g = Permutation::from_images(g).ok()?;
    let mut product = Permutation::identity(d1 + d2);
    for level in &graph.bsgs.levels {
        let beta = g.apply(level.point);
        let t = level.transversal.get(&beta)?;
        product = product.compose(t);
        g = t.inverse().compose(&g);
    }
    if (0..d1).any(|p| g.apply(p) != p) {
        return None;
    }
    let images: Vec<usize> = (d1..d1 + d2).map(|p| product.apply(p) - d1).collect();
    Permutation::from_images(images).ok()
}

// ---------------------------------------------------------------------------
// pair file format
// ---------------------------------------------------------------------------

/// Line-oriented pair file: `degree N`, one generator per line in 1-based
/// disjoint-cycle notation, optional `base K` (default 1), `#` comments.
#[derive(Clone, Debug)]
pub struct PairFile {
    pub degree: usize,
    pub generators: Vec<Permutation>,
    /// 0-based base point.
    pub base_point: usize,
}

impl PairFile {
    pub fn parse(text: &str) -> Result<PairFile, PermError> {
        let mut degree: Option<usize> = None;
        let mut generators = Vec::new();
        let mut base_point = 0usize;
        for raw in text.lines() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("degree") {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| PermError::Parse(format!("bad degree line {:?}", raw)))?;
                if n == 0 {
                    return Err(PermError::Parse("degree must be positive".into()));
                }
                degree = Some(n);
            } else if let Some(rest) = line.strip_prefix("base") {
                let k: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| PermError::Parse(format!("bad base line {:?}", raw)))?;
                if k == 0 {
                    return Err(PermError::Parse("base point is 1-based".into()));
                }
                base_point = k - 1;
            } else {
                let d = degree
                    .ok_or_else(|| PermError::Parse("generator before degree line".into()))?;
                generators.push(Permutation::parse_cycles(line, d)?);
            }
        }
        let degree = degree.ok_or_else(|| PermError::Parse("missing degree line".into()))?;
        if base_point >= degree {
            return Err(PermError::PointOutOfRange {
                point: base_point,
                degree,
            });
        }
        Ok(PairFile {
            degree,
            generators,
            base_point,
        })
    }

    pub fn format(&self) -> String {
        let mut out = format!("degree {}\n", self.degree);
        for g in &self.generators {
            out.push_str(&g.cycle_string());
            out.push('\n');
        }
        if self.base_point != 0 {
            out.push_str(&format!("base {}\n", self.base_point + 1));
        }
        out
    }

    pub fn to_pair(&self) -> Result<GroupPair, PermError> {
        let group = PermGroup::from_generators(self.degree, self.generators.clone())?;
        GroupPair::new(group, self.base_point)
    }
}

// ---------------------------------------------------------------------------
// stock constructions used across the crate
// ---------------------------------------------------------------------------

/// Symmetric group S_n in its natural action.
pub fn symmetric_group(n: usize) -> PermGroup {
    let mut gens = Vec::new();
    if n >= 2 {
        let mut tr: Vec<usize> = (0..n).collect();
        tr.swap(0, 1);
        gens.push(Permutation::from_images(tr).unwrap());
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        gens.push(Permutation::from_images(cycle).unwrap());
    }
    PermGroup::from_generators(n, gens).unwrap()
}

/// Alternating group A_n in its natural action.
pub fn alternating_group(n: usize) -> PermGroup {
    let mut gens = Vec::new();
    if n >= 3 {
        let mut three: Vec<usize> = (0..n).collect();
        three[0] = 1;
        three[1] = 2;
        three[2] = 0;
        gens.push(Permutation::from_images(three).unwrap());
        if n > 3 {
            if n % 2 == 1 {
                let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
                gens.push(Permutation::from_images(cycle).unwrap());
            } else {
                // an (n−1)-cycle on the last n−1 points is even for even n
                let mut c: Vec<usize> = (0..n).collect();
                for (i, img) in c.iter_mut().enumerate().skip(1) {
                    *img = if i + 1 < n { i + 1 } else { 1 };
                }
                gens.push(Permutation::from_images(c).unwrap());
            }
        }
    }
    PermGroup::from_generators(n, gens).unwrap()
}

/// Cyclic group Z_n acting regularly.
pub fn cyclic_group(n: usize) -> PermGroup {
    let mut gens = Vec::new();
    if n >= 2 {
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        gens.push(Permutation::from_images(cycle).unwrap());
    }
    PermGroup::from_generators(n, gens).unwrap()
}
