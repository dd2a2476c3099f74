//! Lower previsions as finite collections of assessments, their credal sets
//! as polytopes, coherence, natural extension and the event-collection MESC
//! filters.

use std::fmt;
use std::ops::{Add, Neg};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::cones::{check_mesc, MescViolation, SupportUniverse};
use crate::exactla::{dot, int, ones, unit, Rat, RatVector};
use crate::polytope::{
    self, lp_min_over, lp_min_simplex, normal_cone_at, vertices_bruteforce, Constraint,
    EnumerationStatus, HPolytope, OracleLimits, PolytopeError, VertexEnumeration,
};

/// Largest outcome space representable with bitmask events.
pub const MAX_OUTCOMES: usize = 63;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CredalError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("outcome space needs at least two outcomes, got {0}")]
    TooFewOutcomes(usize),
    #[error("outcome space limited to {MAX_OUTCOMES} outcomes, got {0}")]
    TooManyOutcomes(usize),
    #[error("duplicate outcome label {0:?}")]
    DuplicateLabel(String),
    #[error("gamble has {found} values, outcome space has {expected}")]
    GambleLength { expected: usize, found: usize },
    #[error("lower prevision is not coherent")]
    Incoherent,
    #[error("credal set is empty")]
    EmptyCredalSet,
}

/// Finite, ordered sample space. The order fixes coordinates everywhere.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OutcomeSpace {
    names: Vec<String>,
}

impl OutcomeSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, CredalError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() < 2 {
            return Err(CredalError::TooFewOutcomes(names.len()));
        }
        if names.len() > MAX_OUTCOMES {
            return Err(CredalError::TooManyOutcomes(names.len()));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(CredalError::DuplicateLabel(a.clone()));
            }
        }
        Ok(Self { names })
    }

    /// Outcomes labelled `x1`, ..., `xn`.
    pub fn numbered(n: usize) -> Result<Self, CredalError> {
        Self::new((1..=n).map(|i| format!("x{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn label(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.len())
    }
}

/// Subset of the outcome space as a bitmask over outcome indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Event(pub u64);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub fn full(n: usize) -> Self {
        Event(if n >= 64 { u64::MAX } else { (1u64 << n) - 1 })
    }

    pub fn singleton(i: usize) -> Self {
        Event(1u64 << i)
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Event(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn difference(self, other: Event) -> Event {
        Event(self.0 & !other.0)
    }

    pub fn complement(self, n: usize) -> Event {
        Event(!self.0 & Event::full(n).0)
    }

    pub fn with(self, i: usize) -> Event {
        Event(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Event {
        Event(self.0 & !(1u64 << i))
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }

    pub fn indicator(self, n: usize) -> RatVector {
        (0..n)
            .map(|i| {
                if self.contains(i) {
                    Rat::one()
                } else {
                    Rat::zero()
                }
            })
            .collect()
    }

    /// Labels joined by `|` in space order, e.g. `"x1|x3"`.
    pub fn label(self, space: &OutcomeSpace) -> String {
        self.indices()
            .filter(|&i| i < space.len())
            .map(|i| space.label(i))
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.indices().map(|i| format!("x{}", i + 1)).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// A real-valued map on the outcome space, stored by coordinate.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gamble(pub RatVector);

impl Gamble {
    pub fn new(values: RatVector) -> Self {
        Gamble(values)
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Gamble(values.iter().map(|&v| int(v)).collect())
    }

    pub fn indicator(n: usize, event: Event) -> Self {
        Gamble(event.indicator(n))
    }

    pub fn constant(n: usize, c: Rat) -> Self {
        Gamble(vec![c; n])
    }

    pub fn values(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: &Rat) -> Gamble {
        Gamble(self.0.iter().map(|x| x * c).collect())
    }

    pub fn min_value(&self) -> Rat {
        self.0.iter().min().cloned().unwrap_or_default()
    }

    pub fn max_value(&self) -> Rat {
        self.0.iter().max().cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }

    /// Expectation under the mass vector `p`.
    pub fn expectation(&self, p: &[Rat]) -> Rat {
        dot(&self.0, p)
    }
}

impl Add for &Gamble {
    type Output = Gamble;

    fn add(self, rhs: &Gamble) -> Gamble {
        Gamble(crate::exactla::add(&self.0, &rhs.0))
    }
}

impl Neg for &Gamble {
    type Output = Gamble;

    fn neg(self) -> Gamble {
        Gamble(self.0.iter().map(|x| -x).collect())
    }
}

/// Where an assessment came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Direct,
    /// Converted from an upper bound on the negated gamble.
    Conjugate,
    /// Nonnegativity row `p·1_x ≥ 0`.
    Convention,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assessment {
    pub gamble: Gamble,
    pub lower: Rat,
    pub provenance: Provenance,
}

/// Finitely many lower-expectation bounds on one outcome space. Holds at
/// most one assessment per distinct gamble; repeated bounds keep the
/// tighter value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerPrevision {
    space: OutcomeSpace,
    assessments: Vec<Assessment>,
}

impl LowerPrevision {
    /// The vacuous model: no assessments.
    pub fn new(space: OutcomeSpace) -> Self {
        Self {
            space,
            assessments: Vec::new(),
        }
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn assessments(&self) -> &[Assessment] {
        &self.assessments
    }

    /// Adds `L(gamble) ≥ lower` with an explicit provenance tag.
    pub fn push(
        &mut self,
        gamble: Gamble,
        lower: Rat,
        provenance: Provenance,
    ) -> Result<(), CredalError> {
        if gamble.len() != self.dim() {
            return Err(CredalError::GambleLength {
                expected: self.dim(),
                found: gamble.len(),
            });
        }
        match self.assessments.iter_mut().find(|a| a.gamble == gamble) {
            Some(existing) => {
                if lower > existing.lower {
                    existing.lower = lower;
                    existing.provenance = provenance;
                }
            }
            None => self.assessments.push(Assessment {
                gamble,
                lower,
                provenance,
            }),
        }
        Ok(())
    }

    pub fn add_lower(&mut self, gamble: Gamble, lower: Rat) -> Result<(), CredalError> {
        self.push(gamble, lower, Provenance::Direct)
    }

    /// Upper bound `U(f) = u`, stored as the lower bound `L(-f) = -u`.
    pub fn add_upper(&mut self, gamble: Gamble, upper: Rat) -> Result<(), CredalError> {
        self.push(-&gamble, -upper, Provenance::Conjugate)
    }

    pub fn add_event_lower(&mut self, event: Event, lower: Rat) -> Result<(), CredalError> {
        let n = self.dim();
        self.add_lower(Gamble::indicator(n, event), lower)
    }

    pub fn add_event_upper(&mut self, event: Event, upper: Rat) -> Result<(), CredalError> {
        let n = self.dim();
        self.add_upper(Gamble::indicator(n, event), upper)
    }
}

/// Origin of one inequality row of a credal polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowOrigin {
    Assessment(usize),
    /// Nonnegativity of the given outcome.
    Nonnegativity(usize),
}

/// H-representation of a credal set plus the support vectors that can
/// generate its normal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CredalRep {
    pub polytope: HPolytope,
    pub universe: SupportUniverse,
    /// One entry per inequality row of `polytope`.
    pub rows: Vec<RowOrigin>,
    /// Nonnegativity rows implied by the remaining rows. They stay in the
    /// polytope but are left out of the universe.
    pub redundant: Vec<usize>,
}

/// Builds `{p : p·f ≥ L(f) for each assessment, p·1_x ≥ 0, p·1_Ω = 1}`.
///
/// A nonnegativity row is omitted outright when an assessment already
/// bounds `1_x` from below by something nonnegative, and marked redundant
/// when the minimum of `p(x)` over all other rows is already `≥ 0`.
pub fn build_credal_hrep(lp: &LowerPrevision) -> Result<CredalRep, CredalError> {
    let n = lp.dim();
    let mut ineq = Vec::new();
    let mut rows = Vec::new();
    for (i, a) in lp.assessments.iter().enumerate() {
        ineq.push(Constraint::new(a.gamble.0.clone(), a.lower.clone()));
        rows.push(RowOrigin::Assessment(i));
    }
    for x in 0..n {
        let e = unit(n, x);
        let covered = lp
            .assessments
            .iter()
            .any(|a| a.gamble.0 == e && !a.lower.is_negative());
        if !covered {
            ineq.push(Constraint::new(e, Rat::zero()));
            rows.push(RowOrigin::Nonnegativity(x));
        }
    }
    let eq = vec![Constraint::new(ones(n), Rat::one())];
    let polytope = HPolytope::new(n, ineq, eq)?;

    let mut redundant = Vec::new();
    for (row, origin) in rows.iter().enumerate() {
        let RowOrigin::Nonnegativity(x) = *origin else {
            continue;
        };
        match lp_min_simplex(&polytope.without_inequality(row), &unit(n, x)) {
            Ok((value, _)) if !value.is_negative() => redundant.push(row),
            _ => {}
        }
    }
    let vectors = polytope
        .inequalities()
        .iter()
        .enumerate()
        .filter(|(i, _)| !redundant.contains(i))
        .map(|(_, c)| c.normal.clone())
        .collect::<Vec<_>>();
    let vectors = if vectors.is_empty() {
        vec![ones(n)]
    } else {
        vectors
    };
    let universe = SupportUniverse::new(vectors).map_err(|_| CredalError::EmptyCredalSet)?;
    Ok(CredalRep {
        polytope,
        universe,
        rows,
        redundant,
    })
}

/// Per-assessment minima over the credal set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceReport {
    pub coherent: bool,
    pub nonempty: bool,
    /// `attained[i]` is the minimum of assessment `i`'s gamble, when the
    /// credal set is nonempty.
    pub attained: Vec<Option<Rat>>,
}

/// A coherent lower prevision with its credal set, ready for repeated
/// natural-extension queries.
///
/// Minima come from a scan of the brute-force vertex set when the polytope
/// is within the oracle limits, and from the exact simplex method otherwise.
#[derive(Clone, Debug)]
pub struct CredalSet {
    lp: LowerPrevision,
    rep: CredalRep,
    vertices: Option<VertexEnumeration>,
}

fn minimize(
    rep: &CredalRep,
    vertices: Option<&VertexEnumeration>,
    f: &[Rat],
) -> Result<Rat, PolytopeError> {
    match vertices {
        Some(v) => Ok(lp_min_over(v, f)?.0),
        None => Ok(lp_min_simplex(&rep.polytope, f)?.0),
    }
}

fn oracle_vertices(rep: &CredalRep) -> Result<Option<VertexEnumeration>, PolytopeError> {
    if OracleLimits::default().admits(&rep.polytope) {
        Ok(Some(vertices_bruteforce(&rep.polytope)?))
    } else {
        Ok(None)
    }
}

fn coherence_of(
    lp: &LowerPrevision,
    rep: &CredalRep,
    vertices: Option<&VertexEnumeration>,
) -> Result<CoherenceReport, CredalError> {
    let nonempty = match vertices {
        Some(v) => v.status != EnumerationStatus::Empty,
        None => lp_min_simplex(&rep.polytope, &ones(lp.dim())).is_ok(),
    };
    if !nonempty {
        return Ok(CoherenceReport {
            coherent: false,
            nonempty,
            attained: vec![None; lp.assessments.len()],
        });
    }
    let mut attained = Vec::with_capacity(lp.assessments.len());
    let mut coherent = true;
    for a in &lp.assessments {
        let m = minimize(rep, vertices, &a.gamble.0)?;
        coherent &= m == a.lower;
        attained.push(Some(m));
    }
    Ok(CoherenceReport {
        coherent,
        nonempty,
        attained,
    })
}

/// Coherent iff the credal set is nonempty and every bound is attained.
pub fn is_coherent(lp: &LowerPrevision) -> Result<CoherenceReport, CredalError> {
    let rep = build_credal_hrep(lp)?;
    let vertices = oracle_vertices(&rep)?;
    coherence_of(lp, &rep, vertices.as_ref())
}

impl CredalSet {
    /// Fails with [`CredalError::Incoherent`] unless `lp` is coherent.
    pub fn new(lp: LowerPrevision) -> Result<Self, CredalError> {
        let rep = build_credal_hrep(&lp)?;
        let vertices = oracle_vertices(&rep)?;
        let report = coherence_of(&lp, &rep, vertices.as_ref())?;
        if !report.coherent {
            return Err(CredalError::Incoherent);
        }
        Ok(Self { lp, rep, vertices })
    }

    pub fn lower_prevision(&self) -> &LowerPrevision {
        &self.lp
    }

    pub fn rep(&self) -> &CredalRep {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.lp.dim()
    }

    /// Oracle vertex set, if the polytope is within the oracle limits.
    pub fn oracle(&self) -> Option<&VertexEnumeration> {
        self.vertices.as_ref()
    }

    /// `min_{P ∈ credal set} P(f)`.
    pub fn natural_extension(&self, f: &Gamble) -> Result<Rat, CredalError> {
        if f.len() != self.dim() {
            return Err(CredalError::GambleLength {
                expected: self.dim(),
                found: f.len(),
            });
        }
        Ok(minimize(&self.rep, self.vertices.as_ref(), &f.0)?)
    }

    /// Exact additivity of the natural extension on `g`, `h` taken from the
    /// normal cone at `vertex`. `None` when either gamble is outside that
    /// cone (the check does not apply).
    pub fn cone_additivity_check(
        &self,
        vertex: &[Rat],
        g: &Gamble,
        h: &Gamble,
    ) -> Result<Option<bool>, CredalError> {
        let cone = normal_cone_at(&self.rep.polytope, vertex)?;
        let inside = |f: &Gamble| cone.contains(&f.0).map_err(PolytopeError::from);
        if !inside(g)? || !inside(h)? {
            return Ok(None);
        }
        let lhs = self.natural_extension(&(g + h))?;
        let rhs = self.natural_extension(g)? + self.natural_extension(h)?;
        Ok(Some(lhs == rhs))
    }
}

/// `min P(f)` over the credal set of `lp`, without requiring coherence.
/// Fails only when the credal set is empty.
pub fn lower_envelope(lp: &LowerPrevision, f: &Gamble) -> Result<Rat, CredalError> {
    let rep = build_credal_hrep(lp)?;
    lp_min_simplex(&rep.polytope, &f.0)
        .map(|(v, _)| v)
        .map_err(|e| match e {
            PolytopeError::Empty => CredalError::EmptyCredalSet,
            other => other.into(),
        })
}

/// Natural extension of a coherent `lp` at `f`.
pub fn natural_extension(lp: &LowerPrevision, f: &Gamble) -> Result<Rat, CredalError> {
    CredalSet::new(lp.clone())?.natural_extension(f)
}

/// Failures of the coherence axioms on a sample.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    /// `E(f) < min f`.
    pub sure_gain: Vec<Gamble>,
    /// `E(λf) ≠ λE(f)`, with the offending `λ`.
    pub homogeneity: Vec<(Gamble, Rat)>,
    /// `E(f+g) < E(f) + E(g)`.
    pub superlinearity: Vec<(Gamble, Gamble)>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.sure_gain.is_empty() && self.homogeneity.is_empty() && self.superlinearity.is_empty()
    }
}

/// Checks accepting sure gains, positive homogeneity (for λ ∈ {0, 1, 2, 5})
/// and superlinearity of `ext` on the sampled pairs.
pub fn check_axioms<E>(ext: E, pairs: &[(Gamble, Gamble)]) -> AxiomReport
where
    E: Fn(&Gamble) -> Rat,
{
    let mut report = AxiomReport::default();
    let lambdas = [0, 1, 2, 5].map(int);
    for (f, g) in pairs {
        for h in [f, g] {
            let value = ext(h);
            if value < h.min_value() {
                report.sure_gain.push(h.clone());
            }
            for l in &lambdas {
                if ext(&h.scaled(l)) != l * &value {
                    report.homogeneity.push((h.clone(), l.clone()));
                }
            }
        }
        if ext(&(f + g)) < ext(f) + ext(g) {
            report.superlinearity.push((f.clone(), g.clone()));
        }
    }
    report
}

/// Collection of events; `Ω` is expected to be a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventCollection {
    events: Vec<Event>,
}

impl EventCollection {
    pub fn new(events: impl IntoIterator<Item = Event>) -> Self {
        let mut out: Vec<Event> = Vec::new();
        for e in events {
            if !out.contains(&e) {
                out.push(e);
            }
        }
        Self { events: out }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }
}

/// Why an event collection cannot generate a MESC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventMescReason {
    MissingFullSpace,
    Disjoint(Event, Event),
    CoversSpace(Event, Event),
    NotFullDimensional,
    LinearlyDependent,
    /// `1_event = Σ alpha_i 1_{A_i} + beta 1_Ω` with all `alpha_i ≥ 0`,
    /// coefficients listed for the non-`Ω` members in collection order.
    ContainsIndicator {
        event: Event,
        alpha: Vec<Rat>,
        beta: Rat,
    },
}

/// Universe of all nonempty event indicators, indexed by `mask - 1`.
pub fn all_events_universe(n: usize) -> SupportUniverse {
    let vectors = (1..=Event::full(n).0)
        .map(|m| Event(m).indicator(n))
        .collect();
    SupportUniverse::new(vectors).expect("nonempty universe")
}

/// MESC test for the cone of an event collection against all event
/// indicators. The cheap necessary filters run first: every pair must
/// intersect and no two proper members may cover `Ω`.
pub fn is_event_mesc(col: &EventCollection, n: usize) -> Result<(), EventMescReason> {
    let full = Event::full(n);
    if !col.events.contains(&full) {
        return Err(EventMescReason::MissingFullSpace);
    }
    for (i, &a) in col.events.iter().enumerate() {
        for &b in &col.events[i..] {
            if a.intersection(b).is_empty() {
                return Err(EventMescReason::Disjoint(a, b));
            }
            if a != full && b != full && a != b && a.union(b) == full {
                return Err(EventMescReason::CoversSpace(a, b));
            }
        }
    }
    let proper: Vec<Event> = col.events.iter().copied().filter(|&e| e != full).collect();
    let gens: Vec<RatVector> = proper.iter().map(|e| e.indicator(n)).collect();
    let universe = all_events_universe(n);
    check_mesc(&gens, &universe).map_err(|v| match v {
        MescViolation::NotFullDimensional { .. } => EventMescReason::NotFullDimensional,
        MescViolation::LinearlyDependent => EventMescReason::LinearlyDependent,
        MescViolation::ContainsSupport { index, alpha, beta } => {
            EventMescReason::ContainsIndicator {
                event: Event(index as u64 + 1),
                alpha,
                beta,
            }
        }
    })
}

/// Oracle vertex points of the credal set of `lp` (no coherence check).
pub fn oracle_vertex_points(lp: &LowerPrevision) -> Result<Vec<RatVector>, CredalError> {
    let rep = build_credal_hrep(lp)?;
    Ok(polytope::vertices_bruteforce(&rep.polytope)?.points())
}
