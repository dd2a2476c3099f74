//! Polyhedra given by linear constraints, the brute-force vertex oracle,
//! active sets and normal cones.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::Signed;
use thiserror::Error;

use crate::cones::Cone;
use crate::exactla::{dot, LinAlgError, Rat, RatMatrix, RatVector};
use crate::simplex::{self, LpOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Cone(#[from] crate::cones::ConeError),
    #[error("polytope needs at least one constraint")]
    NoConstraints,
    #[error("point violates constraint {0:?}")]
    Infeasible(ConstraintRef),
    #[error("feasible set is empty")]
    Empty,
    #[error("feasible set is unbounded")]
    Unbounded,
    #[error("vertex oracle limited to dimension {max_dim} and {max_constraints} constraints (got {dim}, {constraints})")]
    OracleLimit {
        dim: usize,
        constraints: usize,
        max_dim: usize,
        max_constraints: usize,
    },
}

/// A single linear constraint `x·normal (≥ or =) bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub normal: RatVector,
    pub bound: Rat,
}

impl Constraint {
    pub fn new(normal: RatVector, bound: Rat) -> Self {
        Self { normal, bound }
    }

    pub fn slack(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - &self.bound
    }
}

/// Index of a constraint within an [`HPolytope`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintRef {
    Inequality(usize),
    Equality(usize),
}

/// `{x : x·f ≥ b for every inequality, x·f = b for every equality}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    dim: usize,
    inequalities: Vec<Constraint>,
    equalities: Vec<Constraint>,
}

/// An extreme point together with the constraints tight there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub point: RatVector,
    pub active: BTreeSet<ConstraintRef>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationStatus {
    Bounded,
    Empty,
    Unbounded,
}

/// Output of [`vertices_bruteforce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexEnumeration {
    /// Sorted lexicographically, no duplicates.
    pub vertices: Vec<Vertex>,
    pub status: EnumerationStatus,
}

impl VertexEnumeration {
    pub fn points(&self) -> Vec<RatVector> {
        self.vertices.iter().map(|v| v.point.clone()).collect()
    }
}

/// Size caps for the subset-enumeration oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_dim: usize,
    pub max_constraints: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_dim: 6,
            max_constraints: 25,
        }
    }
}

impl OracleLimits {
    pub fn admits(&self, h: &HPolytope) -> bool {
        h.dim <= self.max_dim && h.constraint_count() <= self.max_constraints
    }
}

impl HPolytope {
    pub fn new(
        dim: usize,
        inequalities: Vec<Constraint>,
        equalities: Vec<Constraint>,
    ) -> Result<Self, PolytopeError> {
        if inequalities.is_empty() && equalities.is_empty() {
            return Err(PolytopeError::NoConstraints);
        }
        for c in inequalities.iter().chain(&equalities) {
            if c.normal.len() != dim {
                return Err(LinAlgError::DimensionMismatch {
                    expected: dim,
                    found: c.normal.len(),
                }
                .into());
            }
        }
        Ok(Self {
            dim,
            inequalities,
            equalities,
        })
    }

    /// The probability simplex `{x ≥ 0, Σx = 1}` in dimension `n`.
    pub fn simplex(n: usize) -> Self {
        let ineq = (0..n)
            .map(|i| Constraint::new(crate::exactla::unit(n, i), Rat::default()))
            .collect();
        let eq = vec![Constraint::new(
            crate::exactla::ones(n),
            crate::exactla::int(1),
        )];
        Self::new(n, ineq, eq).expect("well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inequalities(&self) -> &[Constraint] {
        &self.inequalities
    }

    pub fn equalities(&self) -> &[Constraint] {
        &self.equalities
    }

    pub fn constraint(&self, r: ConstraintRef) -> &Constraint {
        match r {
            ConstraintRef::Inequality(i) => &self.inequalities[i],
            ConstraintRef::Equality(i) => &self.equalities[i],
        }
    }

    pub fn constraint_count(&self) -> usize {
        self.inequalities.len() + self.equalities.len()
    }

    /// First violated constraint, if any.
    pub fn violation(&self, x: &[Rat]) -> Option<ConstraintRef> {
        let ineq = self
            .inequalities
            .iter()
            .position(|c| c.slack(x).is_negative())
            .map(ConstraintRef::Inequality);
        ineq.or_else(|| {
            self.equalities
                .iter()
                .position(|c| !num_traits::Zero::is_zero(&c.slack(x)))
                .map(ConstraintRef::Equality)
        })
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        x.len() == self.dim && self.violation(x).is_none()
    }

    /// Equivalent description with every equality replaced by the pair of
    /// inequalities `x·f ≥ b` and `x·(-f) ≥ -b`.
    pub fn split_equalities(&self) -> Self {
        let mut ineq = self.inequalities.clone();
        for c in &self.equalities {
            ineq.push(c.clone());
            ineq.push(Constraint::new(
                c.normal.iter().map(|x| -x).collect(),
                -&c.bound,
            ));
        }
        Self {
            dim: self.dim,
            inequalities: ineq,
            equalities: Vec::new(),
        }
    }

    /// Same polytope without one inequality row.
    pub fn without_inequality(&self, index: usize) -> Self {
        let mut out = self.clone();
        out.inequalities.remove(index);
        out
    }

    fn lp_rows(&self) -> (Vec<(RatVector, Rat)>, Vec<(RatVector, Rat)>) {
        let pairs = |cs: &[Constraint]| {
            cs.iter()
                .map(|c| (c.normal.clone(), c.bound.clone()))
                .collect::<Vec<_>>()
        };
        (pairs(&self.inequalities), pairs(&self.equalities))
    }
}

/// Every extreme point, found by solving each full-rank choice of tight
/// constraints and keeping the feasible solutions.
///
/// This is the slow, trusted baseline. Equalities are part of every
/// candidate system; duplicates (degenerate vertices with several bases) are
/// merged by exact point equality.
pub fn vertices_bruteforce(h: &HPolytope) -> Result<VertexEnumeration, PolytopeError> {
    vertices_bruteforce_with(h, OracleLimits::default())
}

pub fn vertices_bruteforce_with(
    h: &HPolytope,
    limits: OracleLimits,
) -> Result<VertexEnumeration, PolytopeError> {
    if !limits.admits(h) {
        return Err(PolytopeError::OracleLimit {
            dim: h.dim,
            constraints: h.constraint_count(),
            max_dim: limits.max_dim,
            max_constraints: limits.max_constraints,
        });
    }
    let eq_rows: Vec<RatVector> = h.equalities.iter().map(|c| c.normal.clone()).collect();
    let eq_rank = RatMatrix::with_cols(eq_rows.clone(), h.dim)?.rank();
    let need = h.dim.saturating_sub(eq_rank);
    let mut points: BTreeSet<RatVector> = BTreeSet::new();
    if need <= h.inequalities.len() {
        for subset in (0..h.inequalities.len()).combinations(need) {
            let mut rows = eq_rows.clone();
            let mut rhs: Vec<Rat> = h.equalities.iter().map(|c| c.bound.clone()).collect();
            for &i in &subset {
                rows.push(h.inequalities[i].normal.clone());
                rhs.push(h.inequalities[i].bound.clone());
            }
            let m = RatMatrix::with_cols(rows, h.dim)?;
            if let Some(x) = m.solve_unique(&rhs)? {
                if h.contains(&x) {
                    points.insert(x);
                }
            }
        }
    }
    let status = if points.is_empty() {
        EnumerationStatus::Empty
    } else if is_bounded(h) {
        EnumerationStatus::Bounded
    } else {
        EnumerationStatus::Unbounded
    };
    let vertices = points
        .into_iter()
        .map(|point| Vertex {
            active: active_set_unchecked(h, &point),
            point,
        })
        .collect();
    Ok(VertexEnumeration { vertices, status })
}

/// True when every coordinate is bounded in both directions over `h`.
/// Nonempty input assumed.
pub fn is_bounded(h: &HPolytope) -> bool {
    let (ineq, eq) = h.lp_rows();
    (0..h.dim).all(|i| {
        [1i64, -1].iter().all(|&s| {
            let mut c = crate::exactla::zeros(h.dim);
            c[i] = crate::exactla::int(s);
            !matches!(
                simplex::minimize_free(&ineq, &eq, &c),
                Err(LpOutcome::Unbounded)
            )
        })
    })
}

fn active_set_unchecked(h: &HPolytope, x: &[Rat]) -> BTreeSet<ConstraintRef> {
    let ineq = h
        .inequalities
        .iter()
        .enumerate()
        .filter(|(_, c)| num_traits::Zero::is_zero(&c.slack(x)))
        .map(|(i, _)| ConstraintRef::Inequality(i));
    let eq = (0..h.equalities.len()).map(ConstraintRef::Equality);
    ineq.chain(eq).collect()
}

/// Constraints tight at a feasible `x`; equalities are always included.
pub fn active_set(h: &HPolytope, x: &[Rat]) -> Result<BTreeSet<ConstraintRef>, PolytopeError> {
    if x.len() != h.dim {
        return Err(LinAlgError::DimensionMismatch {
            expected: h.dim,
            found: x.len(),
        }
        .into());
    }
    if let Some(v) = h.violation(x) {
        return Err(PolytopeError::Infeasible(v));
    }
    Ok(active_set_unchecked(h, x))
}

/// Normal cone at `x`: active inequality normals generate it, equality
/// normals span its lineality space.
pub fn normal_cone_at(h: &HPolytope, x: &[Rat]) -> Result<Cone, PolytopeError> {
    let active = active_set(h, x)?;
    let mut gens = Vec::new();
    let mut lin = Vec::new();
    for r in active {
        let normal = h.constraint(r).normal.clone();
        match r {
            ConstraintRef::Inequality(_) => gens.push(normal),
            ConstraintRef::Equality(_) => lin.push(normal),
        }
    }
    Ok(Cone::new(gens, lin)?)
}

/// Minimum of `x·f` over `h` by scanning the oracle vertex set. Ties go to
/// the lexicographically smallest minimizer.
pub fn lp_min(h: &HPolytope, f: &[Rat]) -> Result<(Rat, Vertex), PolytopeError> {
    let vertices = vertices_bruteforce(h)?;
    lp_min_over(&vertices, f)
}

/// [`lp_min`] over an already computed vertex set.
pub fn lp_min_over(
    vertices: &VertexEnumeration,
    f: &[Rat],
) -> Result<(Rat, Vertex), PolytopeError> {
    match vertices.status {
        EnumerationStatus::Empty => return Err(PolytopeError::Empty),
        EnumerationStatus::Unbounded => return Err(PolytopeError::Unbounded),
        EnumerationStatus::Bounded => {}
    }
    let mut best: Option<(Rat, &Vertex)> = None;
    // vertices are sorted, so keeping the first strict minimum is the
    // lexicographic tie-break
    for v in &vertices.vertices {
        let value = dot(&v.point, f);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, v));
        }
    }
    let (value, v) = best.ok_or(PolytopeError::Empty)?;
    Ok((value, v.clone()))
}

/// Minimum of `x·f` over `h` by the exact simplex method; no size cap.
pub fn lp_min_simplex(h: &HPolytope, f: &[Rat]) -> Result<(Rat, RatVector), PolytopeError> {
    let (ineq, eq) = h.lp_rows();
    simplex::minimize_free(&ineq, &eq, f).map_err(|o| match o {
        LpOutcome::Unbounded => PolytopeError::Unbounded,
        _ => PolytopeError::Empty,
    })
}
