//! Enumeration of the normal fan of a credal polytope by walking the
//! adjacency graph of its maximal elementary simplicial cones.
//!
//! A node is a set of `n - 1` support vectors (by universe index) whose cone,
//! together with the constant line, is a MESC and which are all tight at a
//! common extreme point. Neighbours are found by dropping one generator and
//! trying every other support vector on the opposite side of the shared
//! hyperplane.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::cones::{
    are_adjacent, hyperplane_normal, is_constant, is_mesc, ConeError, SupportUniverse,
};
use crate::exactla::{
    dot, format_rat, format_vector, in_nonneg_span, ones, LinAlgError, Rat, RatMatrix, RatVector,
};
use crate::polytope::{lp_min_simplex, HPolytope, PolytopeError};

/// Direction attempts before the walk gives up on finding a seed MESC.
pub const SEED_ATTEMPTS: u64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("equality rows must all be multiples of the normalization p·1 = 1")]
    NotCredal,
    #[error("generator system has no unique solution")]
    Singular,
    #[error("no seed MESC found after {0} directions")]
    SeedExhausted(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MescNode {
    /// Sorted universe indices of the one-sided generators.
    pub gens: Vec<usize>,
    /// The extreme point at which every generator is tight.
    pub vertex: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MescGraph {
    pub universe: SupportUniverse,
    /// Sorted by generator key.
    pub nodes: Vec<MescNode>,
    /// Pairs of node indices, smaller index first.
    pub edges: BTreeSet<(usize, usize)>,
    /// `(node, dropped generator)` pairs for which no neighbour was found.
    pub unmatched: Vec<(usize, usize)>,
}

impl MescGraph {
    /// Assembles a graph from generator keys, their vertices and adjacency
    /// between keys. Duplicate keys collapse.
    pub fn from_parts(
        universe: SupportUniverse,
        nodes: BTreeMap<Vec<usize>, RatVector>,
        edges: impl IntoIterator<Item = (Vec<usize>, Vec<usize>)>,
    ) -> Self {
        let index: BTreeMap<&Vec<usize>, usize> =
            nodes.keys().enumerate().map(|(i, k)| (k, i)).collect();
        let edges = edges
            .into_iter()
            .filter_map(|(a, b)| {
                let (i, j) = (*index.get(&a)?, *index.get(&b)?);
                (i != j).then(|| (i.min(j), i.max(j)))
            })
            .collect();
        let nodes = nodes
            .into_iter()
            .map(|(gens, vertex)| MescNode { gens, vertex })
            .collect();
        Self {
            universe,
            nodes,
            edges,
            unmatched: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Distinct certified extreme points, sorted.
    pub fn vertices(&self) -> Vec<RatVector> {
        let set: BTreeSet<&RatVector> = self.nodes.iter().map(|n| &n.vertex).collect();
        set.into_iter().cloned().collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn generator_vectors(&self, node: usize) -> Vec<RatVector> {
        self.nodes[node]
            .gens
            .iter()
            .map(|&i| self.universe.get(i).clone())
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Undirected DOT graph; node labels are the certified vertices.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph mesc {\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"({})\"];", format_vector(&node.vertex));
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -- n{b};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let universe: Vec<Vec<String>> = self
            .universe
            .vectors()
            .iter()
            .map(|v| v.iter().map(format_rat).collect())
            .collect();
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                json!({
                    "id": i,
                    "generators": n.gens,
                    "vertex": n.vertex.iter().map(format_rat).collect::<Vec<_>>(),
                })
            })
            .collect();
        let edges: Vec<[usize; 2]> = self.edges.iter().map(|&(a, b)| [a, b]).collect();
        json!({ "universe": universe, "nodes": nodes, "edges": edges })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphReport {
    pub nodes: usize,
    pub edges: usize,
    pub vertices: usize,
    pub connected: bool,
    /// degree -> number of nodes
    pub degree_histogram: BTreeMap<usize, usize>,
    pub expected_degree: usize,
    pub regular: bool,
}

pub fn verify_graph(g: &MescGraph, expected_degree: usize) -> GraphReport {
    let mut degree_histogram = BTreeMap::new();
    for d in g.degrees() {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    let regular = degree_histogram.keys().all(|&d| d == expected_degree);
    GraphReport {
        nodes: g.nodes.len(),
        edges: g.edges.len(),
        vertices: g.vertices().len(),
        connected: g.is_connected(),
        degree_histogram,
        expected_degree,
        regular,
    }
}

/// Unique point with `p·g = b` for each generator and `p·1 = 1`.
pub fn extreme_point_of(gens: &[RatVector], bounds: &[Rat]) -> Result<RatVector, FanError> {
    let dim = gens.first().map(Vec::len).ok_or(FanError::Singular)?;
    let mut rows = gens.to_vec();
    rows.push(ones(dim));
    let mut rhs = bounds.to_vec();
    rhs.push(Rat::one());
    RatMatrix::with_cols(rows, dim)?
        .solve_unique(&rhs)?
        .ok_or(FanError::Singular)
}

/// Representative of `v` modulo positive scaling and adding constants.
fn direction_key(v: &[Rat]) -> Option<RatVector> {
    let shifted: RatVector = v.iter().map(|x| x - &v[0]).collect();
    let lead = shifted.iter().find(|x| !x.is_zero())?.abs();
    Some(shifted.iter().map(|x| x / &lead).collect())
}

/// A credal polytope prepared for walking: support vectors up to
/// equivalence, each with its support-function value as bound.
#[derive(Clone, Debug)]
pub struct FanProblem {
    h: HPolytope,
    universe: SupportUniverse,
    bounds: Vec<Option<Rat>>,
}

impl FanProblem {
    pub fn new(h: &HPolytope, universe: &SupportUniverse) -> Result<Self, FanError> {
        let n = h.dim();
        for e in h.equalities() {
            if !is_constant(&e.normal) || e.normal[0] != e.bound {
                return Err(FanError::NotCredal);
            }
        }
        let mut keys: Vec<RatVector> = Vec::new();
        let mut kept = Vec::new();
        for v in universe.vectors() {
            match direction_key(v) {
                Some(k) if !keys.contains(&k) => {
                    keys.push(k);
                    kept.push(v.clone());
                }
                _ => {}
            }
        }
        if kept.is_empty() {
            kept.push(ones(n));
        }
        let universe = SupportUniverse::new(kept).map_err(|_| FanError::Singular)?;
        let bounds = universe
            .vectors()
            .iter()
            .map(|v| {
                if is_constant(v) {
                    Ok(None)
                } else {
                    Ok(Some(lp_min_simplex(h, v)?.0))
                }
            })
            .collect::<Result<Vec<_>, PolytopeError>>()?;
        Ok(Self {
            h: h.clone(),
            universe,
            bounds,
        })
    }

    pub fn universe(&self) -> &SupportUniverse {
        &self.universe
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    fn vectors(&self, idx: &[usize]) -> Vec<RatVector> {
        idx.iter().map(|&i| self.universe.get(i).clone()).collect()
    }

    /// Solved point of a generator set, if it lies in the polytope.
    fn feasible_point(&self, idx: &[usize]) -> Option<RatVector> {
        let bounds: Vec<Rat> = idx
            .iter()
            .map(|&i| self.bounds[i].clone().expect("nonconstant"))
            .collect();
        let p = extreme_point_of(&self.vectors(idx), &bounds).ok()?;
        self.h.contains(&p).then_some(p)
    }

    fn node(&self, mut idx: Vec<usize>) -> Option<MescNode> {
        idx.sort_unstable();
        let vertex = self.feasible_point(&idx)?;
        is_mesc(&self.vectors(&idx), &self.universe).then_some(MescNode { gens: idx, vertex })
    }

    /// All nodes obtained from `node` by swapping out `gens[drop]` across
    /// the shared facet.
    pub fn neighbor_candidates(
        &self,
        node: &MescNode,
        drop: usize,
    ) -> Result<Vec<MescNode>, FanError> {
        let n = self.dim();
        let dropped = node.gens[drop];
        let shared: Vec<usize> = node
            .gens
            .iter()
            .copied()
            .filter(|&g| g != dropped)
            .collect();
        let t = hyperplane_normal(&self.vectors(&shared), n)?;
        let side = dot(self.universe.get(dropped), &t);
        let own = self.vectors(&node.gens);
        let mut out = Vec::new();
        for f in self.universe.generator_indices() {
            if node.gens.contains(&f) || !(dot(self.universe.get(f), &t) * &side).is_negative() {
                continue;
            }
            let mut idx = shared.clone();
            idx.push(f);
            let Some(candidate) = self.node(idx) else {
                continue;
            };
            if are_adjacent(&own, &self.vectors(&candidate.gens))? {
                out.push(candidate);
            }
        }
        out.sort();
        Ok(out)
    }

    /// A seed MESC containing a generic direction drawn from `attempt`.
    fn seed(&self, direction: &[Rat]) -> Result<Option<MescNode>, FanError> {
        let n = self.dim();
        let (_, x) = lp_min_simplex(&self.h, direction)?;
        let active: Vec<usize> = self
            .universe
            .generator_indices()
            .filter(|&i| {
                dot(self.universe.get(i), &x) == *self.bounds[i].as_ref().expect("nonconstant")
            })
            .collect();
        let Some(w) = in_nonneg_span(&self.vectors(&active), &[ones(n)], direction)? else {
            return Ok(None);
        };
        let mut gens: Vec<usize> = active
            .iter()
            .zip(&w.alpha)
            .filter(|(_, a)| a.is_positive())
            .map(|(&i, _)| i)
            .collect();
        if gens.len() + 1 != n {
            return Ok(None);
        }
        // Stellar refinement: while another support vector lies in the cone,
        // swap it in for the generator it can replace without losing the
        // direction.
        loop {
            let vecs = self.vectors(&gens);
            let mut basis = vecs.clone();
            basis.push(ones(n));
            let cols = RatMatrix::with_cols(basis, n)?.transpose();
            let Some(alpha) = cols.solve_square(direction)? else {
                return Ok(None);
            };
            let inside = self.universe.generator_indices().find_map(|f| {
                if gens.contains(&f) {
                    return None;
                }
                let gamma = cols.solve_square(self.universe.get(f)).ok()??;
                gamma[..n - 1]
                    .iter()
                    .all(|g| !g.is_negative())
                    .then_some((f, gamma))
            });
            let Some((f, gamma)) = inside else {
                break;
            };
            let mut best: Option<(usize, Rat)> = None;
            for k in 0..n - 1 {
                if gamma[k].is_positive() {
                    let ratio = &alpha[k] / &gamma[k];
                    if best.as_ref().is_none_or(|(_, r)| ratio < *r) {
                        best = Some((k, ratio));
                    }
                }
            }
            let Some((k, ratio)) = best else {
                return Ok(None);
            };
            if ratio.is_zero() {
                return Ok(None);
            }
            gens[k] = f;
        }
        Ok(self.node(gens))
    }

    pub fn walk(&self, seed: Option<&[Rat]>) -> Result<MescGraph, FanError> {
        let start = match seed {
            Some(d) => self.seed(d)?,
            None => None,
        };
        let start = match start {
            Some(s) => s,
            None => {
                let mut found = None;
                for attempt in 0..SEED_ATTEMPTS {
                    if let Some(s) = self.seed(&generic_direction(self.dim(), attempt))? {
                        found = Some(s);
                        break;
                    }
                }
                found.ok_or(FanError::SeedExhausted(SEED_ATTEMPTS))?
            }
        };

        let mut nodes: BTreeMap<Vec<usize>, RatVector> = BTreeMap::new();
        let mut edges: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        let mut unmatched_keys = Vec::new();
        let mut queue = VecDeque::new();
        nodes.insert(start.gens.clone(), start.vertex.clone());
        queue.push_back(start);
        while let Some(node) = queue.pop_front() {
            for drop in 0..node.gens.len() {
                let found = self.neighbor_candidates(&node, drop)?;
                if found.is_empty() {
                    unmatched_keys.push((node.gens.clone(), node.gens[drop]));
                }
                for c in found {
                    edges.push((node.gens.clone(), c.gens.clone()));
                    if !nodes.contains_key(&c.gens) {
                        nodes.insert(c.gens.clone(), c.vertex.clone());
                        queue.push_back(c);
                    }
                }
            }
        }
        let mut graph = MescGraph::from_parts(self.universe.clone(), nodes, edges);
        let index: BTreeMap<Vec<usize>, usize> = graph
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.gens.clone(), i))
            .collect();
        graph.unmatched = unmatched_keys
            .into_iter()
            .map(|(k, g)| (index[&k], g))
            .collect();
        graph.unmatched.sort_unstable();
        Ok(graph)
    }
}

/// Deterministic direction with pairwise distinct rational entries.
pub fn generic_direction(n: usize, attempt: u64) -> RatVector {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + attempt);
    let mut out: RatVector = Vec::with_capacity(n);
    while out.len() < n {
        let v = Rat::new(
            rng.gen_range(-1_000_000i64..=1_000_000).into(),
            rng.gen_range(1i64..=997).into(),
        );
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Walks the MESC graph of `h` over `universe`, starting from the cone
/// containing `seed` when one is given and usable.
pub fn walk(
    h: &HPolytope,
    universe: &SupportUniverse,
    seed: Option<&[Rat]>,
) -> Result<MescGraph, FanError> {
    FanProblem::new(h, universe)?.walk(seed)
}
