//! Exact rational scalars, vectors and matrices.
//!
//! Everything here is exact: rationals are arbitrary precision and kept in
//! lowest terms, elimination is fraction-free over the integers wherever the
//! output does not itself need to be rational. There is no tolerance anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::simplex::{self, LpOutcome};

/// Arbitrary precision rational, always normalized (`0` is `0/1`).
pub type Rat = BigRational;

/// Dense exact vector; its length is the ambient dimension.
pub type RatVector = Vec<Rat>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRatError {
    #[error("empty rational literal")]
    Empty,
    #[error("rational literal too long ({0} bytes)")]
    TooLong(usize),
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

const MAX_LITERAL_LEN: usize = 4096;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

pub fn zeros(n: usize) -> RatVector {
    vec![Rat::zero(); n]
}

pub fn ones(n: usize) -> RatVector {
    vec![Rat::one(); n]
}

/// Unit vector `e_i` of length `n`.
pub fn unit(n: usize, i: usize) -> RatVector {
    let mut v = zeros(n);
    v[i] = Rat::one();
    v
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-0.125"`.
///
/// The result is reduced to lowest terms, so `"2/4"` parses to `1/2`.
pub fn parse_rat(text: &str) -> Result<Rat, ParseRatError> {
    if text.is_empty() {
        return Err(ParseRatError::Empty);
    }
    if text.len() > MAX_LITERAL_LEN {
        return Err(ParseRatError::TooLong(text.len()));
    }
    let invalid = || ParseRatError::Invalid(text.to_string());
    let (negative, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        if !is_digits(num) || !is_digits(den) {
            return Err(invalid());
        }
        let den: BigInt = den.parse().map_err(|_| invalid())?;
        if den.is_zero() {
            return Err(ParseRatError::ZeroDenominator(text.to_string()));
        }
        Rat::new(num.parse().map_err(|_| invalid())?, den)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if !is_digits(whole) || !is_digits(frac) {
            return Err(invalid());
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| invalid())?;
        Rat::new(digits, scale)
    } else {
        if !is_digits(body) {
            return Err(invalid());
        }
        Rat::from_integer(body.parse().map_err(|_| invalid())?)
    };
    Ok(if negative { -value } else { value })
}

/// Canonical `"p/q"` form, or `"p"` when the denominator is one.
pub fn format_rat(value: &Rat) -> String {
    value.to_string()
}

/// Comma separated canonical entries, e.g. `"1/2,1/3,1/6"`.
pub fn format_vector(v: &[Rat]) -> String {
    v.iter().map(format_rat).collect::<Vec<_>>().join(",")
}

/// Decimal approximation rounded to `digits` fractional digits.
pub fn to_decimal(value: &Rat, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (value * Rat::from_integer(scale.clone()))
        .round()
        .to_integer();
    let negative = scaled.is_negative();
    let (whole, frac) = scaled.abs().div_rem(&scale);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{frac:0>digits$}")
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add(a: &[Rat], b: &[Rat]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rat], b: &[Rat]) -> RatVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Rat, v: &[Rat]) -> RatVector {
    v.iter().map(|x| c * x).collect()
}

pub fn is_zero_vector(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Multiplies `v` by the least common multiple of its denominators.
fn integer_row(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

/// Dense rectangular matrix of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: Vec<RatVector>,
    cols: usize,
}

/// Result of fraction-free forward elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

/// Bareiss elimination restricted to the first `active_cols` columns. Rows
/// may carry extra trailing columns (an augmented right-hand side) that are
/// transformed along with the rest.
fn bareiss(mut a: Vec<Vec<BigInt>>, active_cols: usize) -> Echelon {
    let m = a.len();
    let width = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..active_cols {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..m {
            for j in c + 1..width {
                let v = &a[i][j] * &a[r][c] - &a[i][c] * &a[r][j];
                debug_assert!((&v % &prev).is_zero());
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: a, pivots }
}

impl RatMatrix {
    /// Builds a matrix from rows; every row must have the same length.
    pub fn new(rows: Vec<RatVector>) -> Result<Self, LinAlgError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::with_cols(rows, cols)
    }

    /// Like [`RatMatrix::new`] but fixes the column count, so an empty row
    /// list still has a well defined shape.
    pub fn with_cols(rows: Vec<RatVector>, cols: usize) -> Result<Self, LinAlgError> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(LinAlgError::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { rows, cols })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| unit(n, i)).collect(),
            cols: n,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![zeros(cols); rows],
            cols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[RatVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.rows[i]
    }

    pub fn transpose(&self) -> Self {
        let rows = (0..self.cols)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        Self {
            rows,
            cols: self.rows.len(),
        }
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<RatVector, LinAlgError> {
        self.check_len(v.len(), self.cols)?;
        Ok(self.rows.iter().map(|r| dot(r, v)).collect())
    }

    fn check_len(&self, found: usize, expected: usize) -> Result<(), LinAlgError> {
        if found != expected {
            return Err(LinAlgError::DimensionMismatch { expected, found });
        }
        Ok(())
    }

    /// Exact rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let rows = self.rows.iter().map(|r| integer_row(r)).collect();
        bareiss(rows, self.cols).pivots.len()
    }

    /// Unique solution of `M x = b` for square `M`, `None` when singular.
    pub fn solve_square(&self, b: &[Rat]) -> Result<Option<RatVector>, LinAlgError> {
        if self.nrows() != self.cols {
            return Err(LinAlgError::NotSquare {
                rows: self.nrows(),
                cols: self.cols,
            });
        }
        self.solve_unique(b)
    }

    /// Unique solution of `M x = b` for any shape: `None` if the system is
    /// inconsistent or has more than one solution.
    pub fn solve_unique(&self, b: &[Rat]) -> Result<Option<RatVector>, LinAlgError> {
        self.check_len(b.len(), self.nrows())?;
        let n = self.cols;
        let augmented = self
            .rows
            .iter()
            .zip(b)
            .map(|(r, bi)| {
                let mut row = r.clone();
                row.push(bi.clone());
                integer_row(&row)
            })
            .collect();
        let Echelon { rows, pivots } = bareiss(augmented, n);
        if pivots.len() < n {
            return Ok(None);
        }
        if rows[n..].iter().any(|r| !r[n].is_zero()) {
            return Ok(None);
        }
        let mut x = zeros(n);
        for i in (0..n).rev() {
            let row = &rows[i];
            let mut acc = Rat::from_integer(row[n].clone());
            for j in i + 1..n {
                acc -= Rat::from_integer(row[j].clone()) * &x[j];
            }
            x[i] = acc / Rat::from_integer(row[i].clone());
        }
        Ok(Some(x))
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut a = self.rows.clone();
        let m = a.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m {
                break;
            }
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(p, r);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            for i in 0..m {
                if i != r && !a[i][c].is_zero() {
                    let factor = a[i][c].clone();
                    for j in c..self.cols {
                        let delta = &factor * &a[r][j];
                        a[i][j] -= delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (
            Self {
                rows: a,
                cols: self.cols,
            },
            pivots,
        )
    }

    /// Basis of `{x : M x = 0}`; empty when the kernel is trivial.
    pub fn nullspace(&self) -> Vec<RatVector> {
        let (reduced, pivots) = self.rref();
        let free = (0..self.cols).filter(|c| !pivots.contains(c));
        free.map(|f| {
            let mut v = zeros(self.cols);
            v[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -reduced.rows[i][f].clone();
            }
            v
        })
        .collect()
    }
}

/// Witness for `v = Σ α_g g + Σ β_l l` with `α ≥ 0` and `β` free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanWitness {
    pub alpha: Vec<Rat>,
    pub beta: Vec<Rat>,
}

impl SpanWitness {
    /// Recombines the witness; equals the target vector when valid.
    pub fn reconstruct(
        &self,
        gens: &[RatVector],
        lineality: &[RatVector],
        dim: usize,
    ) -> RatVector {
        let mut out = zeros(dim);
        for (c, g) in self
            .alpha
            .iter()
            .zip(gens)
            .chain(self.beta.iter().zip(lineality))
        {
            for (o, x) in out.iter_mut().zip(g) {
                *o += c * x;
            }
        }
        out
    }
}

/// Decides whether `v` lies in `cone(gens) + span(lineality)`.
///
/// Solved as an exact phase-one feasibility problem in which each lineality
/// vector contributes a `+l` and a `-l` column. The returned witness is a
/// basic solution, so its nonzero `alpha` entries belong to linearly
/// independent generators.
pub fn in_nonneg_span(
    gens: &[RatVector],
    lineality: &[RatVector],
    v: &[Rat],
) -> Result<Option<SpanWitness>, LinAlgError> {
    let dim = v.len();
    if let Some(bad) = gens.iter().chain(lineality).find(|g| g.len() != dim) {
        return Err(LinAlgError::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    let mut columns: Vec<RatVector> = gens.to_vec();
    for l in lineality {
        columns.push(l.clone());
        columns.push(l.iter().map(|x| -x).collect());
    }
    let a = RatMatrix::with_cols(columns, dim)?.transpose();
    let cost = zeros(a.ncols());
    match simplex::minimize(&a, v, &cost) {
        LpOutcome::Optimal { x, .. } => {
            let alpha = x[..gens.len()].to_vec();
            let beta = (0..lineality.len())
                .map(|i| &x[gens.len() + 2 * i] - &x[gens.len() + 2 * i + 1])
                .collect();
            Ok(Some(SpanWitness { alpha, beta }))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> RatVector {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::new(rows.iter().map(|r| v(r)).collect()).unwrap()
    }

    #[test]
    fn parse_and_format_are_canonical() {
        assert_eq!(parse_rat("2/4").unwrap(), rat(1, 2));
        assert_eq!(parse_rat("-3").unwrap(), int(-3));
        assert_eq!(parse_rat("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rat("-0/5").unwrap(), int(0));
        assert_eq!(format_rat(&rat(6, -4)), "-3/2");
        assert_eq!(format_rat(&int(7)), "7");
        assert_eq!(format_rat(&int(0)), "0");
        for bad in [
            "", "1/0", "a", "1/", "/2", "1.2.3", "1/-2", " 1", "--1", "1e3",
        ] {
            assert!(parse_rat(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(1, 3), 12), "0.333333333333");
        assert_eq!(to_decimal(&rat(-2, 3), 4), "-0.6667");
        assert_eq!(to_decimal(&int(5), 2), "5.00");
    }

    #[test]
    fn solve_square_examples() {
        let id = RatMatrix::identity(3);
        assert_eq!(
            id.solve_square(&v(&[1, 2, 3])).unwrap(),
            Some(v(&[1, 2, 3]))
        );
        let sym = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(
            sym.solve_square(&v(&[1, 0])).unwrap(),
            Some(vec![rat(1, 2), rat(1, 2)])
        );
        let singular = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(singular.solve_square(&v(&[1, 2])).unwrap(), None);
        assert_eq!(singular.solve_square(&v(&[1, 5])).unwrap(), None);
    }

    #[test]
    fn solve_rejects_bad_shapes() {
        let rect = m(&[&[1, 0, 0], &[0, 1, 0]]);
        assert!(matches!(
            rect.solve_square(&v(&[1, 1])),
            Err(LinAlgError::NotSquare { .. })
        ));
        let id = RatMatrix::identity(2);
        assert!(matches!(
            id.solve_square(&v(&[1, 1, 1])),
            Err(LinAlgError::DimensionMismatch { .. })
        ));
        assert!(RatMatrix::new(vec![v(&[1, 2]), v(&[1])]).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(RatMatrix::zeros(3, 4).rank(), 0);
        assert_eq!(RatMatrix::identity(5).rank(), 5);
        // 1_{x1,x2}, 1_{x2,x3}, 1_{x1,x3}, 1_Ω on four outcomes
        let rows = m(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[1, 0, 1, 0], &[1, 1, 1, 1]]);
        assert_eq!(rows.rank(), 4);
        let with_rationals =
            RatMatrix::new(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(3, 2), int(1)]]).unwrap();
        assert_eq!(with_rationals.rank(), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert!(RatMatrix::identity(3).nullspace().is_empty());
        let ones_row = m(&[&[1, 1, 1]]);
        let kernel = ones_row.nullspace();
        assert_eq!(kernel.len(), 2);
        for k in &kernel {
            assert!(k.iter().sum::<Rat>().is_zero());
        }
        assert_eq!(RatMatrix::new(kernel).unwrap().rank(), 2);
        // kernel of {1_{x1}, 1_Ω} on three outcomes is span{(0,1,-1)}
        let rows = m(&[&[1, 0, 0], &[1, 1, 1]]);
        let kernel = rows.nullspace();
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0], v(&[0, -1, 1]));
    }

    #[test]
    fn nonneg_span_examples() {
        let one = ones(4);
        let gens = vec![v(&[1, 1, 0, 0]), v(&[0, 1, 1, 0]), v(&[1, 0, 1, 0])];
        let target = v(&[1, 1, 1, 0]);
        let w = in_nonneg_span(&gens, std::slice::from_ref(&one), &target)
            .unwrap()
            .unwrap();
        assert_eq!(w.alpha, vec![rat(1, 2); 3]);
        assert_eq!(w.beta, vec![int(0)]);
        assert_eq!(w.reconstruct(&gens, &[one], 4), target);

        let e1 = v(&[1, 0, 0]);
        assert!(
            in_nonneg_span(std::slice::from_ref(&e1), &[ones(3)], &v(&[0, 1, 0]))
                .unwrap()
                .is_none()
        );
        let w = in_nonneg_span(&[e1.clone(), v(&[0, 1, 0])], &[], &e1)
            .unwrap()
            .unwrap();
        assert_eq!(w.reconstruct(&[e1.clone(), v(&[0, 1, 0])], &[], 3), e1);
    }

    #[test]
    fn nonneg_span_of_zero_and_negated_generator() {
        let gens = vec![v(&[1, 0]), v(&[0, 1])];
        assert!(in_nonneg_span(&gens, &[], &v(&[0, 0])).unwrap().is_some());
        assert!(in_nonneg_span(&gens, &[], &v(&[-1, 0])).unwrap().is_none());
    }
}
