//! Polyhedral cones with a lineality part: membership, relative interiors,
//! simpliciality, the maximal elementary simplicial cone (MESC) test and the
//! sign test for adjacency of two MESCs.
//!
//! Throughout, the constant-one vector is a full line (lineality), never a
//! one-sided generator.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactla::{
    dot, in_nonneg_span, is_zero_vector, ones, LinAlgError, Rat, RatMatrix, RatVector,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("zero vector cannot be a cone generator")]
    ZeroGenerator,
    #[error("cone is not simplicial")]
    NotSimplicial,
    #[error("adjacency precondition violated: {0}")]
    Precondition(String),
}

/// `cone(generators) + span(lineality)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    generators: Vec<RatVector>,
    lineality: Vec<RatVector>,
    dim: usize,
}

/// True if `v` is a nonzero multiple of the constant-one vector.
pub fn is_constant(v: &[Rat]) -> bool {
    match v.first() {
        Some(first) => !first.is_zero() && v.iter().all(|x| x == first),
        None => false,
    }
}

impl Cone {
    /// Generators are stored sorted; zero generators are rejected.
    pub fn new(
        mut generators: Vec<RatVector>,
        lineality: Vec<RatVector>,
    ) -> Result<Self, ConeError> {
        let dim = generators.first().or(lineality.first()).map_or(0, Vec::len);
        for g in generators.iter().chain(&lineality) {
            if g.len() != dim {
                return Err(LinAlgError::DimensionMismatch {
                    expected: dim,
                    found: g.len(),
                }
                .into());
            }
        }
        if generators.iter().any(|g| is_zero_vector(g)) {
            return Err(ConeError::ZeroGenerator);
        }
        generators.sort();
        generators.dedup();
        Ok(Self {
            generators,
            lineality,
            dim,
        })
    }

    /// Cone over `generators` with the constant-one line as lineality;
    /// constant generators are folded into that line.
    pub fn credal(generators: Vec<RatVector>, dim: usize) -> Result<Self, ConeError> {
        let gens = generators.into_iter().filter(|g| !is_constant(g)).collect();
        let mut cone = Self::new(gens, vec![ones(dim)])?;
        cone.dim = dim;
        Ok(cone)
    }

    pub fn generators(&self) -> &[RatVector] {
        &self.generators
    }

    pub fn lineality(&self) -> &[RatVector] {
        &self.lineality
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the linear hull.
    pub fn dimension(&self) -> usize {
        let rows = self
            .generators
            .iter()
            .chain(&self.lineality)
            .cloned()
            .collect();
        RatMatrix::with_cols(rows, self.dim)
            .expect("checked on construction")
            .rank()
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool, ConeError> {
        Ok(in_nonneg_span(&self.generators, &self.lineality, v)?.is_some())
    }

    fn is_simplicial_with_lineality(&self) -> bool {
        self.generators.len() + self.lineality.len() == self.dimension()
    }

    /// Unique expansion `v = Σ α g + Σ β l` for a simplicial cone; `None`
    /// when `v` is outside the linear hull.
    pub fn coordinates(&self, v: &[Rat]) -> Result<Option<(Vec<Rat>, Vec<Rat>)>, ConeError> {
        if !self.is_simplicial_with_lineality() {
            return Err(ConeError::NotSimplicial);
        }
        let cols: Vec<RatVector> = self
            .generators
            .iter()
            .chain(&self.lineality)
            .cloned()
            .collect();
        let m = RatMatrix::with_cols(cols, self.dim)?.transpose();
        Ok(m.solve_unique(v)?.map(|mut c| {
            let beta = c.split_off(self.generators.len());
            (c, beta)
        }))
    }

    /// Strictly positive coefficient on every generator. Only defined for
    /// simplicial cones.
    pub fn in_relative_interior(&self, v: &[Rat]) -> Result<bool, ConeError> {
        Ok(self
            .coordinates(v)?
            .is_some_and(|(alpha, _)| alpha.iter().all(Signed::is_positive)))
    }
}

pub fn is_simplicial(gens: &[RatVector]) -> bool {
    let dim = gens.first().map_or(0, Vec::len);
    match RatMatrix::with_cols(gens.to_vec(), dim) {
        Ok(m) => m.rank() == gens.len(),
        Err(_) => false,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("support universe is empty")]
    Empty,
    #[error("zero vector in support universe")]
    ZeroVector,
}

/// The full set of support vectors in play. Always contains the
/// constant-one vector and no duplicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportUniverse {
    vectors: Vec<RatVector>,
    dim: usize,
}

impl SupportUniverse {
    /// Deduplicates (keeping first occurrences) and appends `1_Ω` if absent.
    pub fn new(vectors: Vec<RatVector>) -> Result<Self, UniverseError> {
        let dim = vectors.first().map(Vec::len).ok_or(UniverseError::Empty)?;
        let mut out: Vec<RatVector> = Vec::with_capacity(vectors.len() + 1);
        for v in vectors {
            if v.len() != dim {
                return Err(LinAlgError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                }
                .into());
            }
            if is_zero_vector(&v) {
                return Err(UniverseError::ZeroVector);
            }
            if !out.contains(&v) {
                out.push(v);
            }
        }
        let one = ones(dim);
        if !out.contains(&one) {
            out.push(one);
        }
        Ok(Self { vectors: out, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[RatVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, i: usize) -> &RatVector {
        &self.vectors[i]
    }

    pub fn index_of(&self, v: &[Rat]) -> Option<usize> {
        self.vectors.iter().position(|u| u.as_slice() == v)
    }

    /// Indices of the vectors that can act as one-sided generators.
    pub fn generator_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vectors.len()).filter(|&i| !is_constant(&self.vectors[i]))
    }
}

/// Why a generator set fails to be a MESC.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MescViolation {
    /// Together with the constant line the generators do not span the space
    /// (or there are too many of them).
    NotFullDimensional {
        generators: usize,
        dim: usize,
    },
    LinearlyDependent,
    /// Universe vector `index` lies in the cone, with the given expansion.
    ContainsSupport {
        index: usize,
        alpha: Vec<Rat>,
        beta: Rat,
    },
}

/// Checks the three MESC conditions: full dimension modulo the constant
/// line, linear independence, and no other support vector inside.
pub fn check_mesc(gens: &[RatVector], universe: &SupportUniverse) -> Result<(), MescViolation> {
    let dim = universe.dim();
    let proper: Vec<RatVector> = gens.iter().filter(|g| !is_constant(g)).cloned().collect();
    if proper.len() + 1 != dim {
        return Err(MescViolation::NotFullDimensional {
            generators: proper.len(),
            dim,
        });
    }
    let mut basis = proper.clone();
    basis.push(ones(dim));
    let m = RatMatrix::with_cols(basis, dim).map_err(|_| MescViolation::NotFullDimensional {
        generators: proper.len(),
        dim,
    })?;
    if m.rank() != dim {
        return Err(MescViolation::LinearlyDependent);
    }
    let columns = m.transpose();
    for i in universe.generator_indices() {
        let v = universe.get(i);
        if proper.contains(v) {
            continue;
        }
        let mut coeffs = columns
            .solve_square(v)
            .expect("square by construction")
            .expect("basis is nonsingular");
        let beta = coeffs.pop().expect("dim ≥ 1");
        if coeffs.iter().all(|a| !a.is_negative()) {
            return Err(MescViolation::ContainsSupport {
                index: i,
                alpha: coeffs,
                beta,
            });
        }
    }
    Ok(())
}

pub fn is_mesc(gens: &[RatVector], universe: &SupportUniverse) -> bool {
    check_mesc(gens, universe).is_ok()
}

/// Normal of the hyperplane `span(shared ∪ {1_Ω})`, first nonzero entry
/// scaled to one.
pub fn hyperplane_normal(shared: &[RatVector], dim: usize) -> Result<RatVector, ConeError> {
    let mut rows: Vec<RatVector> = shared.to_vec();
    rows.push(ones(dim));
    let kernel = RatMatrix::with_cols(rows, dim)?.nullspace();
    if kernel.len() != 1 {
        return Err(ConeError::Precondition(format!(
            "shared generators span codimension {}, expected 1",
            kernel.len()
        )));
    }
    let mut t = kernel.into_iter().next().expect("one kernel vector");
    let lead = t
        .iter()
        .find(|x| !x.is_zero())
        .cloned()
        .expect("nonzero kernel vector");
    let inv = Rat::one() / lead;
    for x in t.iter_mut() {
        *x *= &inv;
    }
    Ok(t)
}

/// Adjacency of two MESCs that differ in exactly one generator: the swapped
/// generators must lie strictly on opposite sides of the shared hyperplane.
pub fn are_adjacent(g1: &[RatVector], g2: &[RatVector]) -> Result<bool, ConeError> {
    let a: Vec<&RatVector> = g1.iter().filter(|g| !is_constant(g)).collect();
    let b: Vec<&RatVector> = g2.iter().filter(|g| !is_constant(g)).collect();
    let dim = a.first().or(b.first()).map_or(0, |v| v.len());
    let shared: Vec<RatVector> = a
        .iter()
        .filter(|g| b.contains(g))
        .map(|g| (*g).clone())
        .collect();
    let only_a: Vec<&RatVector> = a.iter().copied().filter(|g| !b.contains(g)).collect();
    let only_b: Vec<&RatVector> = b.iter().copied().filter(|g| !a.contains(g)).collect();
    if a.len() != b.len() || only_a.len() != 1 || only_b.len() != 1 {
        return Err(ConeError::Precondition(format!(
            "generator sets share {} of {} and {} generators",
            shared.len(),
            a.len(),
            b.len()
        )));
    }
    let t = hyperplane_normal(&shared, dim)?;
    let s = dot(only_a[0], &t) * dot(only_b[0], &t);
    Ok(s.is_negative())
}
