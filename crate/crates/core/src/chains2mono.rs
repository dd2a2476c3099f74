//! 2-monotone lower probabilities: supermodularity, chain extreme points,
//! the fan of maximal-chain cones, comonotonicity and the Choquet integral.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cones::Cone;
use crate::credal::{
    all_events_universe, CredalError, Event, Gamble, LowerPrevision, OutcomeSpace,
};
use crate::exactla::{Rat, RatVector};
use crate::fanwalk::MescGraph;

/// Largest space for which every event value is stored.
pub const MAX_OUTCOMES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error(transparent)]
    Credal(#[from] CredalError),
    #[error("lower probability tables are limited to {MAX_OUTCOMES} outcomes, got {0}")]
    TooManyOutcomes(usize),
    #[error("expected {expected} event values, got {found}")]
    TableLength { expected: usize, found: usize },
    #[error("lower probability of the empty set must be 0")]
    EmptyNotZero,
    #[error("lower probability of the full space must be 1")]
    FullNotOne,
    #[error("not monotone: L({0}) > L({1})")]
    NotMonotone(Event, Event),
    #[error("not a chain of strictly increasing events ending in the full space")]
    BadChain,
}

/// A lower probability on every event, stored by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerProbability {
    space: OutcomeSpace,
    values: Vec<Rat>,
}

impl LowerProbability {
    /// `values[mask]` is `L` of the event with that bitmask.
    pub fn new(space: OutcomeSpace, values: Vec<Rat>) -> Result<Self, ChainError> {
        let n = space.len();
        if n > MAX_OUTCOMES {
            return Err(ChainError::TooManyOutcomes(n));
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(ChainError::TableLength {
                expected,
                found: values.len(),
            });
        }
        if !values[0].is_zero() {
            return Err(ChainError::EmptyNotZero);
        }
        if !values[expected - 1].is_one() {
            return Err(ChainError::FullNotOne);
        }
        for mask in 0..expected {
            for i in 0..n {
                let bigger = mask | (1 << i);
                if bigger != mask && values[mask] > values[bigger] {
                    return Err(ChainError::NotMonotone(
                        Event(mask as u64),
                        Event(bigger as u64),
                    ));
                }
            }
        }
        Ok(Self { space, values })
    }

    pub fn from_fn(space: OutcomeSpace, f: impl Fn(Event) -> Rat) -> Result<Self, ChainError> {
        let n = space.len();
        if n > MAX_OUTCOMES {
            return Err(ChainError::TooManyOutcomes(n));
        }
        let values = (0..1u64 << n).map(|m| f(Event(m))).collect();
        Self::new(space, values)
    }

    /// The additive lower probability of a mass vector.
    pub fn additive(space: OutcomeSpace, p: &[Rat]) -> Result<Self, ChainError> {
        Self::from_fn(space, |e| e.indices().map(|i| p[i].clone()).sum())
    }

    /// `L(A) = 0` for every proper event.
    pub fn vacuous(space: OutcomeSpace) -> Result<Self, ChainError> {
        let full = space.full_event();
        Self::from_fn(space, |e| if e == full { Rat::one() } else { Rat::zero() })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.len()
    }

    pub fn value(&self, e: Event) -> &Rat {
        &self.values[e.0 as usize]
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    /// Every proper nonempty event as a lower assessment.
    pub fn to_lower_prevision(&self) -> LowerPrevision {
        let n = self.n();
        let mut lp = LowerPrevision::new(self.space.clone());
        for mask in 1..(1u64 << n) - 1 {
            lp.add_event_lower(Event(mask), self.values[mask as usize].clone())
                .expect("lengths match");
        }
        lp
    }

    /// `P(A) ≥ L(A)` for every event and `Σ p = 1`.
    pub fn dominated_by(&self, p: &[Rat]) -> bool {
        if p.iter().any(Signed::is_negative) || p.iter().sum::<Rat>() != Rat::one() {
            return false;
        }
        (0..self.values.len())
            .all(|m| Event(m as u64).indices().map(|i| &p[i]).sum::<Rat>() >= self.values[m])
    }
}

/// First pair `(A, B)` with `L(A∪B) + L(A∩B) < L(A) + L(B)`, if any.
pub fn two_monotone_violation(l: &LowerProbability) -> Option<(Event, Event)> {
    let size = l.values.len() as u64;
    for a in 0..size {
        for b in a + 1..size {
            let (ea, eb) = (Event(a), Event(b));
            if ea.is_subset(eb) || eb.is_subset(ea) {
                continue;
            }
            if l.value(ea.union(eb)) + l.value(ea.intersection(eb)) < l.value(ea) + l.value(eb) {
                return Some((ea, eb));
            }
        }
    }
    None
}

pub fn is_two_monotone(l: &LowerProbability) -> bool {
    two_monotone_violation(l).is_none()
}

/// Strict inequality for every incomparable pair.
pub fn is_strictly_supermodular(l: &LowerProbability) -> bool {
    let size = l.values.len() as u64;
    (0..size).all(|a| {
        (a + 1..size).all(|b| {
            let (ea, eb) = (Event(a), Event(b));
            ea.is_subset(eb)
                || eb.is_subset(ea)
                || l.value(ea.union(eb)) + l.value(ea.intersection(eb)) > l.value(ea) + l.value(eb)
        })
    })
}

/// Strictly increasing events `A_1 ⊂ ... ⊂ A_k = Ω`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventChain {
    sets: Vec<Event>,
}

impl EventChain {
    pub fn new(sets: Vec<Event>, n: usize) -> Result<Self, ChainError> {
        let ok = sets.last() == Some(&Event::full(n))
            && sets.first().is_some_and(|e| !e.is_empty())
            && sets
                .windows(2)
                .all(|w| w[0].is_subset(w[1]) && w[0] != w[1]);
        if ok {
            Ok(Self { sets })
        } else {
            Err(ChainError::BadChain)
        }
    }

    /// Maximal chain adding outcomes in the given order.
    pub fn from_order(order: &[usize]) -> Self {
        let mut acc = Event::EMPTY;
        let sets = order
            .iter()
            .map(|&i| {
                acc = acc.with(i);
                acc
            })
            .collect();
        Self { sets }
    }

    pub fn sets(&self) -> &[Event] {
        &self.sets
    }

    pub fn is_maximal(&self) -> bool {
        self.sets.iter().enumerate().all(|(i, e)| e.len() == i + 1)
    }

    /// Order in which a maximal chain adds outcomes.
    pub fn order(&self) -> Vec<usize> {
        let mut prev = Event::EMPTY;
        self.sets
            .iter()
            .flat_map(|&e| {
                let added: Vec<usize> = e.difference(prev).indices().collect();
                prev = e;
                added
            })
            .collect()
    }

    /// Indicators of the proper members.
    pub fn generators(&self, n: usize) -> Vec<RatVector> {
        self.sets[..self.sets.len() - 1]
            .iter()
            .map(|e| e.indicator(n))
            .collect()
    }
}

/// Every maximal chain on `n` outcomes, in lexicographic order of the
/// outcome orderings.
pub fn maximal_chains(n: usize) -> Vec<EventChain> {
    (0..n)
        .permutations(n)
        .map(|p| EventChain::from_order(&p))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainVertex {
    pub point: RatVector,
    /// Whether the point is in the credal set of `L`.
    pub feasible: bool,
}

/// The mass vector with `P(A_i) = L(A_i)` along a maximal chain.
pub fn chain_vertex(l: &LowerProbability, chain: &EventChain) -> ChainVertex {
    let n = l.n();
    let mut point = vec![Rat::zero(); n];
    let mut prev = Event::EMPTY;
    for &e in chain.sets() {
        for i in e.difference(prev).indices() {
            point[i] = l.value(e) - l.value(prev);
        }
        prev = e;
    }
    let feasible = l.dominated_by(&point);
    ChainVertex { point, feasible }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainEnumeration {
    /// One point per maximal chain, `n!` in total.
    pub raw: usize,
    /// Distinct points, sorted.
    pub vertices: Vec<RatVector>,
    /// False if some chain point fell outside the credal set.
    pub all_feasible: bool,
}

pub fn enumerate_extreme_2mono(l: &LowerProbability) -> ChainEnumeration {
    let mut set = BTreeSet::new();
    let mut raw = 0;
    let mut all_feasible = true;
    for chain in maximal_chains(l.n()) {
        let v = chain_vertex(l, &chain);
        all_feasible &= v.feasible;
        set.insert(v.point);
        raw += 1;
    }
    ChainEnumeration {
        raw,
        vertices: set.into_iter().collect(),
        all_feasible,
    }
}

pub fn chain_cone(chain: &EventChain, n: usize) -> Cone {
    Cone::credal(chain.generators(n), n).expect("indicators are nonzero")
}

pub fn chain_fan(n: usize) -> Vec<Cone> {
    maximal_chains(n).iter().map(|c| chain_cone(c, n)).collect()
}

/// The `n - 1` chains obtained by replacing `A_i` with
/// `A_{i-1} ∪ (A_{i+1} \ A_i)` for each proper member.
pub fn chain_neighbors(chain: &EventChain) -> Vec<EventChain> {
    let sets = chain.sets();
    (0..sets.len() - 1)
        .map(|i| {
            let before = if i == 0 { Event::EMPTY } else { sets[i - 1] };
            let mut out = sets.to_vec();
            out[i] = before.union(sets[i + 1].difference(sets[i]));
            EventChain { sets: out }
        })
        .collect()
}

/// Universe indices of a chain's proper members in [`all_events_universe`].
fn chain_key(chain: &EventChain) -> Vec<usize> {
    let mut k: Vec<usize> = chain.sets()[..chain.sets().len() - 1]
        .iter()
        .map(|e| e.0 as usize - 1)
        .collect();
    k.sort_unstable();
    k
}

/// The chain fan as a MESC graph over all event indicators, each node
/// carrying its chain vertex under `l`.
pub fn chain_graph(l: &LowerProbability) -> MescGraph {
    let n = l.n();
    let mut nodes = BTreeMap::new();
    let mut edges = Vec::new();
    for chain in maximal_chains(n) {
        let key = chain_key(&chain);
        nodes.insert(key.clone(), chain_vertex(l, &chain).point);
        for nb in chain_neighbors(&chain) {
            edges.push((key.clone(), chain_key(&nb)));
        }
    }
    MescGraph::from_parts(all_events_universe(n), nodes, edges)
}

/// Maximal chain of upper level sets of `f`; ties broken by outcome index.
pub fn chain_for(f: &Gamble) -> EventChain {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f.0[b].cmp(&f.0[a]).then(a.cmp(&b)));
    EventChain::from_order(&order)
}

/// `min f + Σ gap_j · L({f ≥ v_j})` over the sorted distinct values `v_j`.
pub fn choquet(l: &LowerProbability, f: &Gamble) -> Rat {
    let values: BTreeSet<&Rat> = f.0.iter().collect();
    let mut it = values.into_iter();
    let Some(first) = it.next() else {
        return Rat::zero();
    };
    let mut total = first.clone();
    let mut prev = first;
    for v in it {
        let upper = Event::from_indices((0..f.len()).filter(|&i| f.0[i] >= *v));
        total += (v - prev) * l.value(upper);
        prev = v;
    }
    total
}

/// A common nondecreasing ordering of the outcomes exists.
pub fn is_comonotone(fs: &[Gamble]) -> bool {
    let Some(n) = fs.first().map(Gamble::len) else {
        return true;
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        fs.iter()
            .map(|f| f.0[a].cmp(&f.0[b]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    fs.iter()
        .all(|f| order.windows(2).all(|w| f.0[w[0]] <= f.0[w[1]]))
}

/// No pair of gambles orders a pair of outcomes strictly oppositely.
pub fn is_comonotone_pairwise(fs: &[Gamble]) -> bool {
    let n = fs.first().map_or(0, Gamble::len);
    fs.iter().tuple_combinations().all(|(f, g)| {
        (0..n).tuple_combinations().all(|(x, y)| {
            let df = &f.0[x] - &f.0[y];
            let dg = &g.0[x] - &g.0[y];
            !(df * dg).is_negative()
        })
    })
}

/// The upper level sets of all the gambles together form a chain.
pub fn is_comonotone_levelsets(fs: &[Gamble]) -> bool {
    let mut sets = BTreeSet::new();
    for f in fs {
        for v in &f.0 {
            sets.insert(Event::from_indices((0..f.len()).filter(|&i| f.0[i] >= *v)));
        }
    }
    let sets: Vec<Event> = sets.into_iter().collect();
    sets.iter()
        .tuple_combinations()
        .all(|(a, b)| a.is_subset(*b) || b.is_subset(*a))
}

/// Comonotone pairs on which `ext` is not additive.
pub fn comonotone_additivity_failures<E>(
    ext: E,
    pairs: &[(Gamble, Gamble)],
) -> Vec<(Gamble, Gamble)>
where
    E: Fn(&Gamble) -> Rat,
{
    pairs
        .iter()
        .filter(|(f, g)| is_comonotone(&[f.clone(), g.clone()]))
        .filter(|(f, g)| ext(&(f + g)) != ext(f) + ext(g))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::{are_adjacent, is_mesc};
    use crate::credal::{lower_envelope, oracle_vertex_points, CredalSet};
    use crate::exactla::{int, rat};

    fn space(n: usize) -> OutcomeSpace {
        OutcomeSpace::numbered(n).unwrap()
    }

    /// Singletons 1/10, doubletons 1/2 on three outcomes.
    fn strict3() -> LowerProbability {
        LowerProbability::from_fn(space(3), |e| match e.len() {
            0 => int(0),
            1 => rat(1, 10),
            2 => rat(1, 2),
            _ => int(1),
        })
        .unwrap()
    }

    fn failing3() -> LowerProbability {
        LowerProbability::from_fn(space(3), |e| match e.0 {
            0b011 | 0b110 => rat(3, 4),
            0b111 => int(1),
            _ => int(0),
        })
        .unwrap()
    }

    #[test]
    fn table_validation() {
        assert_eq!(
            LowerProbability::new(space(2), vec![int(0), int(0), int(0)]),
            Err(ChainError::TableLength {
                expected: 4,
                found: 3
            })
        );
        assert_eq!(
            LowerProbability::new(space(2), vec![int(0), rat(1, 2), int(0), rat(1, 3)]),
            Err(ChainError::FullNotOne)
        );
        assert!(LowerProbability::new(space(2), vec![int(0), int(1), int(0), rat(1, 1)]).is_ok());
    }

    #[test]
    fn two_monotone_examples() {
        assert!(is_two_monotone(
            &LowerProbability::vacuous(space(3)).unwrap()
        ));
        let p = [rat(1, 2), rat(1, 3), rat(1, 6)];
        assert!(is_two_monotone(
            &LowerProbability::additive(space(3), &p).unwrap()
        ));
        assert!(is_strictly_supermodular(&strict3()));
        let bad = failing3();
        assert_eq!(
            two_monotone_violation(&bad),
            Some((Event(0b011), Event(0b110)))
        );
    }

    #[test]
    fn chain_vertex_examples() {
        let chain = EventChain::from_order(&[0, 1, 2]);
        let v = chain_vertex(&strict3(), &chain);
        assert_eq!(v.point, vec![rat(1, 10), rat(2, 5), rat(1, 2)]);
        assert!(v.feasible);
        let vac = LowerProbability::vacuous(space(3)).unwrap();
        let v = chain_vertex(&vac, &EventChain::from_order(&[2, 0, 1]));
        assert_eq!(v.point, vec![int(0), int(1), int(0)]);
    }

    #[test]
    fn enumeration_matches_oracle() {
        let l = strict3();
        let e = enumerate_extreme_2mono(&l);
        assert_eq!(e.raw, 6);
        assert_eq!(e.vertices.len(), 6);
        assert_eq!(
            e.vertices,
            oracle_vertex_points(&l.to_lower_prevision()).unwrap()
        );
        let p = [rat(1, 2), rat(1, 3), rat(1, 6)];
        let add = LowerProbability::additive(space(3), &p).unwrap();
        assert_eq!(enumerate_extreme_2mono(&add).vertices, vec![p.to_vec()]);
        let vac = enumerate_extreme_2mono(&LowerProbability::vacuous(space(3)).unwrap());
        assert_eq!(vac.vertices.len(), 3);
    }

    #[test]
    fn chain_cones_are_mescs() {
        for n in 2..=4 {
            let universe = all_events_universe(n);
            for chain in maximal_chains(n) {
                assert!(is_mesc(&chain.generators(n), &universe));
            }
        }
        assert_eq!(chain_fan(2).len(), 2);
        let f = Gamble::from_ints(&[3, 2, 1]);
        assert_eq!(chain_for(&f), EventChain::from_order(&[0, 1, 2]));
        assert!(chain_cone(&chain_for(&f), 3)
            .in_relative_interior(&f.0)
            .unwrap());
    }

    #[test]
    fn neighbors_are_adjacent_transpositions() {
        let c = EventChain::from_order(&[0, 1, 2]);
        let nb = chain_neighbors(&c);
        assert_eq!(nb[0], EventChain::from_order(&[1, 0, 2]));
        assert_eq!(nb[1], EventChain::from_order(&[0, 2, 1]));
        for chain in maximal_chains(4) {
            let nbs = chain_neighbors(&chain);
            assert_eq!(nbs.len(), 3);
            for nb in nbs {
                assert!(nb.is_maximal());
                assert!(are_adjacent(&chain.generators(4), &nb.generators(4)).unwrap());
            }
        }
    }

    #[test]
    fn comonotone_variants() {
        let g = |v: &[i64]| Gamble::from_ints(v);
        assert!(is_comonotone(&[g(&[1, 2, 3])]));
        assert!(is_comonotone(&[g(&[1, 2, 3]), g(&[0, 0, 5])]));
        assert!(!is_comonotone(&[g(&[1, 2]), g(&[2, 1])]));
        let sets = [
            vec![g(&[1, 1, 2]), g(&[0, 1, 1])],
            vec![g(&[1, 2, 0]), g(&[0, 1, -1]), g(&[5, 5, 5])],
            vec![g(&[0, 1, 0]), g(&[1, 0, 0])],
        ];
        for fs in &sets {
            assert_eq!(is_comonotone(fs), is_comonotone_pairwise(fs));
            assert_eq!(is_comonotone(fs), is_comonotone_levelsets(fs));
        }
    }

    #[test]
    fn choquet_examples() {
        let l = strict3();
        assert_eq!(choquet(&l, &Gamble::indicator(3, Event(0b011))), rat(1, 2));
        let p = [rat(1, 2), rat(1, 3), rat(1, 6)];
        let add = LowerProbability::additive(space(3), &p).unwrap();
        let f = Gamble::from_ints(&[4, -2, 7]);
        assert_eq!(choquet(&add, &f), f.expectation(&p));
        let cs = CredalSet::new(l.to_lower_prevision()).unwrap();
        for f in [[3, 2, 1], [0, 5, -1], [2, 2, 7]] {
            let f = Gamble::from_ints(&f);
            assert_eq!(choquet(&l, &f), cs.natural_extension(&f).unwrap());
        }
    }

    #[test]
    fn non_two_monotone_choquet_misses_the_envelope() {
        let l = failing3();
        let f = &Gamble::indicator(3, Event(0b011)) + &Gamble::indicator(3, Event(0b110));
        assert_eq!(choquet(&l, &f), int(1));
        assert_eq!(
            lower_envelope(&l.to_lower_prevision(), &f).unwrap(),
            rat(3, 2)
        );
    }

    #[test]
    fn comonotone_harness() {
        let l = strict3();
        let f = Gamble::from_ints(&[3, 2, 1]);
        let g = Gamble::from_ints(&[1, 2, 3]);
        let h = Gamble::from_ints(&[5, 1, 0]);
        let pairs = vec![(f.clone(), h.clone()), (f.clone(), g.clone())];
        assert!(comonotone_additivity_failures(|x| choquet(&l, x), &pairs).is_empty());
        // opposite orderings: strictly superadditive
        assert!(choquet(&l, &(&f + &g)) > choquet(&l, &f) + choquet(&l, &g));
    }

    #[test]
    fn chain_graph_shape() {
        let l = LowerProbability::vacuous(space(4)).unwrap();
        let g = chain_graph(&l);
        assert_eq!(g.node_count(), 24);
        assert!(g.degrees().iter().all(|&d| d == 3));
        assert!(g.is_connected());
    }
}
