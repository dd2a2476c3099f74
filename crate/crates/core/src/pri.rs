//! Probability-interval models: per-outcome bounds `l ≤ P({x}) ≤ u`.
//!
//! The fan of such a model is made of cones `N(x, A, B)` where `A` is the
//! high side, carrying the active lower bounds (generators `1_y`), and `B`
//! is the low side, carrying the active upper bounds (generators
//! `1_{z^c}`). The walk over these cones needs no linear algebra.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::chains2mono::{ChainError, LowerProbability};
use crate::cones::SupportUniverse;
use crate::credal::{Event, Gamble, LowerPrevision, OutcomeSpace, Provenance};
use crate::exactla::{ones, unit, Rat, RatVector};
use crate::fanwalk::{generic_direction, MescGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PriError {
    #[error("expected {expected} bounds, got {found}")]
    Length { expected: usize, found: usize },
    #[error("bounds for outcome {0} violate 0 ≤ l ≤ u ≤ 1")]
    Bounds(usize),
    #[error("interval model is not coherent")]
    Incoherent,
    #[error("cone {0:?} does not certify an extreme point")]
    NotExtreme(PriCone),
    #[error("gamble has {found} values, outcome space has {expected}")]
    GambleLength { expected: usize, found: usize },
    #[error(transparent)]
    Chain(#[from] ChainError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriModel {
    space: OutcomeSpace,
    lower: Vec<Rat>,
    upper: Vec<Rat>,
}

impl PriModel {
    pub fn new(space: OutcomeSpace, lower: Vec<Rat>, upper: Vec<Rat>) -> Result<Self, PriError> {
        let n = space.len();
        for v in [&lower, &upper] {
            if v.len() != n {
                return Err(PriError::Length {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        for x in 0..n {
            if lower[x].is_negative() || lower[x] > upper[x] || upper[x] > Rat::one() {
                return Err(PriError::Bounds(x));
            }
        }
        Ok(Self {
            space,
            lower,
            upper,
        })
    }

    /// Same bounds `[l, u]` on every outcome of `x1..xn`.
    pub fn uniform(n: usize, l: Rat, u: Rat) -> Result<Self, PriError> {
        let space = OutcomeSpace::numbered(n).map_err(|_| PriError::Length {
            expected: 2,
            found: n,
        })?;
        Self::new(space, vec![l; n], vec![u; n])
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn lower(&self) -> &[Rat] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rat] {
        &self.upper
    }

    /// Singleton rows `P({x}) ≥ l(x)` and complement rows
    /// `P({x}^c) ≥ 1 - u(x)`.
    pub fn to_lower_prevision(&self) -> LowerPrevision {
        let n = self.n();
        let mut lp = LowerPrevision::new(self.space.clone());
        for x in 0..n {
            lp.add_event_lower(Event::singleton(x), self.lower[x].clone())
                .expect("lengths match");
        }
        for x in 0..n {
            let comp = Event::singleton(x).complement(n);
            lp.push(
                Gamble::indicator(n, comp),
                Rat::one() - &self.upper[x],
                Provenance::Conjugate,
            )
            .expect("lengths match");
        }
        lp
    }
}

/// Singletons at `0..n`, complements at `n..2n`, the constant at `2n`.
pub fn pri_universe(n: usize) -> SupportUniverse {
    let mut v: Vec<RatVector> = (0..n).map(|i| unit(n, i)).collect();
    for i in 0..n {
        let mut c = ones(n);
        c[i] = Rat::zero();
        v.push(c);
    }
    SupportUniverse::new(v).expect("nonempty")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriCoherence {
    pub coherent: bool,
    /// `Σ l ≤ 1 ≤ Σ u`, i.e. the credal set is nonempty.
    pub avoids_sure_loss: bool,
    /// The tightest bounds with the same credal set, when it is nonempty.
    pub repaired: Option<(Vec<Rat>, Vec<Rat>)>,
}

/// Every bound is reachable: `l(x) + Σ_{y≠x} u(y) ≥ 1` and
/// `u(x) + Σ_{y≠x} l(y) ≤ 1` for all `x`.
pub fn is_coherent_pri(m: &PriModel) -> PriCoherence {
    let sl: Rat = m.lower.iter().sum();
    let su: Rat = m.upper.iter().sum();
    let one = Rat::one();
    let avoids_sure_loss = sl <= one && su >= one;
    if !avoids_sure_loss {
        return PriCoherence {
            coherent: false,
            avoids_sure_loss,
            repaired: None,
        };
    }
    let n = m.n();
    let mut lo = Vec::with_capacity(n);
    let mut up = Vec::with_capacity(n);
    for x in 0..n {
        let reach_l = &one - (&su - &m.upper[x]);
        let reach_u = &one - (&sl - &m.lower[x]);
        lo.push(m.lower[x].clone().max(reach_l));
        up.push(m.upper[x].clone().min(reach_u));
    }
    let coherent = lo == m.lower && up == m.upper;
    PriCoherence {
        coherent,
        avoids_sure_loss,
        repaired: Some((lo, up)),
    }
}

/// The cone `N(x, A, B)`: gambles with `f ≥ f(x)` on `A`, `f ≤ f(x)` on
/// `B` and `f = f(x)` elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PriCone {
    pub center: usize,
    /// High side, lower bounds active.
    pub above: Event,
    /// Low side, upper bounds active.
    pub below: Event,
}

impl PriCone {
    /// `A ∪ B = {x}^c` with `A`, `B` disjoint and nonempty.
    pub fn is_maximal(&self, n: usize) -> bool {
        let others = Event::singleton(self.center).complement(n);
        !self.above.is_empty()
            && !self.below.is_empty()
            && self.above.intersection(self.below).is_empty()
            && self.above.union(self.below) == others
    }

    /// Sorted indices into [`pri_universe`].
    pub fn generator_indices(&self, n: usize) -> Vec<usize> {
        let mut g: Vec<usize> = self.above.indices().collect();
        g.extend(self.below.indices().map(|z| n + z));
        g
    }

    pub fn generators(&self, n: usize) -> Vec<RatVector> {
        let u = pri_universe(n);
        self.generator_indices(n)
            .into_iter()
            .map(|i| u.get(i).clone())
            .collect()
    }

    /// Number of maximal comonotone cones inside, `|A|!·|B|!`.
    pub fn comonotone_cones_in(&self) -> BigUint {
        factorial(self.above.len()) * factorial(self.below.len())
    }
}

pub fn comonotone_cones_in(c: &PriCone) -> BigUint {
    c.comonotone_cones_in()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Outside,
    Boundary,
    RelativeInterior,
}

pub fn cone_membership(c: &PriCone, f: &Gamble) -> Membership {
    let n = f.len();
    let fx = &f.0[c.center];
    let mut strict = true;
    for y in 0..n {
        if y == c.center {
            continue;
        }
        let fy = &f.0[y];
        let ok = if c.above.contains(y) {
            fy >= fx
        } else if c.below.contains(y) {
            fy <= fx
        } else {
            fy == fx
        };
        if !ok {
            return Membership::Outside;
        }
        if (c.above.contains(y) || c.below.contains(y)) && fy == fx {
            strict = false;
        }
    }
    if strict && !c.above.is_empty() && !c.below.is_empty() {
        Membership::RelativeInterior
    } else {
        Membership::Boundary
    }
}

/// `N(x, {f > f(x)}, {f < f(x)})`, absent when either side is empty.
pub fn locate_cone(f: &Gamble, x: usize) -> Option<PriCone> {
    let n = f.len();
    let above = Event::from_indices((0..n).filter(|&y| f.0[y] > f.0[x]));
    let below = Event::from_indices((0..n).filter(|&y| f.0[y] < f.0[x]));
    (!above.is_empty() && !below.is_empty()).then_some(PriCone {
        center: x,
        above,
        below,
    })
}

fn remainder(m: &PriModel, c: &PriCone) -> Rat {
    let mut r = Rat::one();
    for y in c.above.indices() {
        r -= &m.lower[y];
    }
    for z in c.below.indices() {
        r -= &m.upper[z];
    }
    r
}

fn vertex_unchecked(m: &PriModel, c: &PriCone) -> Option<RatVector> {
    let r = remainder(m, c);
    if r < m.lower[c.center] || r > m.upper[c.center] {
        return None;
    }
    let mut p = m.lower.clone();
    for z in c.below.indices() {
        p[z] = m.upper[z].clone();
    }
    p[c.center] = r;
    Some(p)
}

/// `P|_A = l`, `P|_B = u`, `P(x) = 1 - Σ_A l - Σ_B u`, if that lies in
/// `[l(x), u(x)]`.
pub fn vertex_for_cone(m: &PriModel, c: &PriCone) -> Result<Option<RatVector>, PriError> {
    if !is_coherent_pri(m).coherent {
        return Err(PriError::Incoherent);
    }
    Ok(if c.is_maximal(m.n()) {
        vertex_unchecked(m, c)
    } else {
        None
    })
}

/// Which replacement produced a neighbouring cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// `N(x, A\{y}, B∪{y})`
    A1,
    /// `N(y, (A\{y})∪{x}, B)`
    A2,
    /// `N(x, A∪{z}, B\{z})`
    B1,
    /// `N(z, A, (B\{z})∪{x})`
    B2,
}

fn neighbors_unchecked(m: &PriModel, c: &PriCone) -> Vec<(PriCone, Rule)> {
    let r = remainder(m, c);
    let x = c.center;
    let (l, u) = (&m.lower, &m.upper);
    let mut out = Vec::new();
    for y in c.above.indices() {
        let r2 = &r + &l[y] - &l[x];
        if c.above.len() > 1 && r2 >= u[y] {
            out.push((
                PriCone {
                    center: x,
                    above: c.above.without(y),
                    below: c.below.with(y),
                },
                Rule::A1,
            ));
        }
        if r2 <= u[y] {
            out.push((
                PriCone {
                    center: y,
                    above: c.above.without(y).with(x),
                    below: c.below,
                },
                Rule::A2,
            ));
        }
    }
    for z in c.below.indices() {
        let s = &r + &u[z] - &u[x];
        if c.below.len() > 1 && s <= l[z] {
            out.push((
                PriCone {
                    center: x,
                    above: c.above.with(z),
                    below: c.below.without(z),
                },
                Rule::B1,
            ));
        }
        if s >= l[z] {
            out.push((
                PriCone {
                    center: z,
                    above: c.above,
                    below: c.below.without(z).with(x),
                },
                Rule::B2,
            ));
        }
    }
    out
}

/// Adjacent extreme-point cones of `c`, one per dropped generator, two on
/// a borderline tie.
pub fn pri_neighbors(m: &PriModel, c: &PriCone) -> Result<Vec<(PriCone, Rule)>, PriError> {
    if vertex_for_cone(m, c)?.is_none() {
        return Err(PriError::NotExtreme(*c));
    }
    Ok(neighbors_unchecked(m, c))
}

/// Index `k` (0-based) into `order` with
/// `l(x_k) ≤ 1 - Σ_{i>k} l - Σ_{i<k} u ≤ u(x_k)`, preferring interior
/// positions.
fn split_index(m: &PriModel, order: &[usize]) -> Option<(usize, Rat)> {
    let n = order.len();
    let total_l: Rat = m.lower.iter().sum();
    let mut prefix_u = Rat::zero();
    let mut suffix_l = total_l;
    let mut edge = None;
    for (k, &xk) in order.iter().enumerate() {
        suffix_l -= &m.lower[xk];
        let pk = Rat::one() - &suffix_l - &prefix_u;
        if m.lower[xk] <= pk && pk <= m.upper[xk] {
            if k > 0 && k + 1 < n {
                return Some((k, pk));
            }
            edge.get_or_insert((k, pk));
        }
        prefix_u += &m.upper[xk];
    }
    edge
}

/// Outcomes sorted by nondecreasing `f`, ties by index.
fn ascending(f: &Gamble) -> Vec<usize> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f.0[a].cmp(&f.0[b]).then(a.cmp(&b)));
    order
}

/// A minimizer of `f` over the credal set, built from the split index.
pub fn minimizer_pri(m: &PriModel, f: &Gamble) -> Result<RatVector, PriError> {
    if f.len() != m.n() {
        return Err(PriError::GambleLength {
            expected: m.n(),
            found: f.len(),
        });
    }
    if !is_coherent_pri(m).coherent {
        return Err(PriError::Incoherent);
    }
    let order = ascending(f);
    let (k, pk) = split_index(m, &order).ok_or(PriError::Incoherent)?;
    let mut p = vec![Rat::zero(); m.n()];
    for (i, &xi) in order.iter().enumerate() {
        p[xi] = if i < k {
            m.upper[xi].clone()
        } else if i > k {
            m.lower[xi].clone()
        } else {
            pk.clone()
        };
    }
    Ok(p)
}

pub fn natural_extension_pri(m: &PriModel, f: &Gamble) -> Result<Rat, PriError> {
    Ok(f.expectation(&minimizer_pri(m, f)?))
}

/// The cone seeded by a generic gamble: `x_k` in the middle, the outcomes
/// below it on the upper-bound side.
fn seed_cone(m: &PriModel, f: &Gamble) -> Option<PriCone> {
    let order = ascending(f);
    let (k, _) = split_index(m, &order)?;
    let n = order.len();
    if k == 0 || k + 1 == n {
        return None;
    }
    Some(PriCone {
        center: order[k],
        above: Event::from_indices(order[k + 1..].iter().copied()),
        below: Event::from_indices(order[..k].iter().copied()),
    })
}

#[derive(Clone, Debug)]
pub struct PriEnumeration {
    /// Distinct extreme points, sorted.
    pub vertices: Vec<RatVector>,
    /// Every visited cone, sorted.
    pub cones: Vec<PriCone>,
    /// The cone graph over [`pri_universe`].
    pub graph: MescGraph,
    /// Dropped generators that had two valid replacements. Nonzero means
    /// the cones found overlap (several triangulations of one normal cone).
    pub ties: usize,
}

/// Walks the cone graph with the replacement rules and collects the
/// certified extreme points.
pub fn enumerate_extreme_pri(m: &PriModel) -> Result<PriEnumeration, PriError> {
    if !is_coherent_pri(m).coherent {
        return Err(PriError::Incoherent);
    }
    let n = m.n();
    let seed = (0..64)
        .find_map(|a| seed_cone(m, &Gamble::new(generic_direction(n, a))))
        .ok_or(PriError::Incoherent)?;
    let mut seen: BTreeMap<PriCone, RatVector> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut queue = VecDeque::new();
    let v0 = vertex_unchecked(m, &seed).ok_or(PriError::NotExtreme(seed))?;
    seen.insert(seed, v0);
    queue.push_back(seed);
    let mut ties = 0;
    while let Some(c) = queue.pop_front() {
        let nbs = neighbors_unchecked(m, &c);
        ties += nbs.len().saturating_sub(n - 1);
        for (nb, _) in nbs {
            edges.push((c.generator_indices(n), nb.generator_indices(n)));
            if let Entry::Vacant(slot) = seen.entry(nb) {
                slot.insert(vertex_unchecked(m, &nb).ok_or(PriError::NotExtreme(nb))?);
                queue.push_back(nb);
            }
        }
    }
    let vertices: BTreeSet<RatVector> = seen.values().cloned().collect();
    let nodes = seen
        .iter()
        .map(|(c, v)| (c.generator_indices(n), v.clone()))
        .collect();
    Ok(PriEnumeration {
        vertices: vertices.into_iter().collect(),
        cones: seen.keys().copied().collect(),
        graph: MescGraph::from_parts(pri_universe(n), nodes, edges),
        ties,
    })
}

/// `L(A) = max(Σ_A l, 1 - Σ_{A^c} u)`.
pub fn induced_2mono(m: &PriModel) -> Result<LowerProbability, PriError> {
    let n = m.n();
    let full = Event::full(n);
    Ok(LowerProbability::from_fn(m.space.clone(), |a| {
        let inside: Rat = a.indices().map(|x| m.lower[x].clone()).sum();
        let outside: Rat = a.complement(n).indices().map(|x| m.upper[x].clone()).sum();
        if a.is_empty() {
            Rat::zero()
        } else if a == full {
            Rat::one()
        } else {
            inside.max(Rat::one() - outside)
        }
    })?)
}

fn factorial(k: usize) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `(n(n-1), n!/(⌊(n-1)/2⌋!·⌈(n-1)/2⌉!))`: the range of the number of MESCs
/// of a probability-interval fan on `n ≥ 3` outcomes.
pub fn count_bounds(n: usize) -> (BigUint, BigUint) {
    let lower = BigUint::from(n) * BigUint::from(n.saturating_sub(1));
    let h = n.saturating_sub(1);
    let upper = factorial(n) / (factorial(h / 2) * factorial(h - h / 2));
    (lower, upper)
}
