//! Dense two-phase simplex over exact rationals.
//!
//! Solves `min c·y` subject to `A y = b`, `y ≥ 0`. Pivoting follows Bland's
//! rule, which cannot cycle, so the method terminates on degenerate problems
//! too. Problem sizes here are desk scale, so the tableau stays dense.

use num_traits::{One, Signed, Zero};

use crate::exactla::{Rat, RatMatrix, RatVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        x: RatVector,
        value: Rat,
        /// Column indices of the final basis, one per nonredundant row.
        basis: Vec<usize>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[Rat], allowed: usize) -> Vec<Rat> {
        (0..allowed)
            .map(|j| {
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &cost[b] * &self.rows[i][j];
                    }
                }
                r
            })
            .collect()
    }

    /// Runs Bland-rule pivots on the first `allowed` columns. Returns
    /// `false` if the objective is unbounded below.
    fn optimize(&mut self, cost: &[Rat], allowed: usize) -> bool {
        loop {
            let reduced = self.reduced_costs(cost, allowed);
            let Some(enter) = (0..allowed).find(|&j| reduced[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, enter);
        }
    }
}

/// Minimizes `cost·y` over `{y ≥ 0 : a y = b}`.
pub fn minimize(a: &RatMatrix, b: &[Rat], cost: &[Rat]) -> LpOutcome {
    let m = a.nrows();
    let n = a.ncols();
    assert_eq!(b.len(), m, "right-hand side length");
    assert_eq!(cost.len(), n, "cost length");

    // Phase one: artificial columns n..n+m, rows sign-normalized so b ≥ 0.
    let width = n + m;
    let rows = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let mut row: Vec<Rat> = a
                .row(i)
                .iter()
                .map(|x| if flip { -x } else { x.clone() })
                .collect();
            row.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
            row.push(if flip { -&b[i] } else { b[i].clone() });
            row
        })
        .collect();
    let mut t = Tableau {
        rows,
        basis: (n..n + m).collect(),
        width,
    };
    let mut phase_one = vec![Rat::zero(); width];
    for c in phase_one.iter_mut().skip(n) {
        *c = Rat::one();
    }
    let bounded = t.optimize(&phase_one, width);
    debug_assert!(bounded);
    let infeasibility: Rat = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &c)| c >= n)
        .map(|(i, _)| t.rhs(i).clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }

    // Drive zero-valued artificials out of the basis; rows where that is
    // impossible are linearly dependent and get dropped.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] < n {
            i += 1;
            continue;
        }
        match (0..n).find(|&j| !t.rows[i][j].is_zero()) {
            Some(j) => {
                t.pivot(i, j);
                i += 1;
            }
            None => {
                t.rows.remove(i);
                t.basis.remove(i);
            }
        }
    }

    let mut phase_two = cost.to_vec();
    phase_two.extend((0..m).map(|_| Rat::zero()));
    if !t.optimize(&phase_two, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &c) in t.basis.iter().enumerate() {
        x[c] = t.rhs(i).clone();
    }
    let value = x.iter().zip(cost).map(|(xi, ci)| xi * ci).sum();
    LpOutcome::Optimal {
        x,
        value,
        basis: t.basis.clone(),
    }
}

/// Minimizes `cost·p` over `{p : p·f ≥ b_f (rows of ineq), p·e = d (rows of eq)}`
/// with `p` unrestricted in sign, by splitting `p = p⁺ - p⁻` and adding
/// surplus columns.
pub fn minimize_free(
    ineq: &[(RatVector, Rat)],
    eq: &[(RatVector, Rat)],
    cost: &[Rat],
) -> Result<(Rat, RatVector), LpOutcome> {
    let n = cost.len();
    let s = ineq.len();
    let width = 2 * n + s;
    let mut rows = Vec::with_capacity(s + eq.len());
    let mut rhs = Vec::with_capacity(s + eq.len());
    for (k, (f, b)) in ineq.iter().enumerate() {
        let mut row = vec![Rat::zero(); width];
        for j in 0..n {
            row[j] = f[j].clone();
            row[n + j] = -&f[j];
        }
        row[2 * n + k] = -Rat::one();
        rows.push(row);
        rhs.push(b.clone());
    }
    for (f, b) in eq {
        let mut row = vec![Rat::zero(); width];
        for j in 0..n {
            row[j] = f[j].clone();
            row[n + j] = -&f[j];
        }
        rows.push(row);
        rhs.push(b.clone());
    }
    let mut c = vec![Rat::zero(); width];
    for j in 0..n {
        c[j] = cost[j].clone();
        c[n + j] = -&cost[j];
    }
    let a = RatMatrix::with_cols(rows, width).expect("rows built with fixed width");
    match minimize(&a, &rhs, &c) {
        LpOutcome::Optimal { x, value, .. } => {
            let p = (0..n).map(|j| &x[j] - &x[n + j]).collect();
            Ok((value, p))
        }
        other => Err(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, rat};

    fn row(xs: &[i64]) -> RatVector {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_optimum() {
        // min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = RatMatrix::new(vec![row(&[1, 2, 1, 0]), row(&[3, 1, 0, 1])]).unwrap();
        let out = minimize(&a, &row(&[4, 6]), &row(&[-1, -1, 0, 0]));
        let LpOutcome::Optimal { x, value, .. } = out else {
            panic!("expected optimum");
        };
        assert_eq!(value, rat(-14, 5));
        assert_eq!(x[0], rat(8, 5));
        assert_eq!(x[1], rat(6, 5));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = RatMatrix::new(vec![row(&[1, 1])]).unwrap();
        assert_eq!(
            minimize(&a, &row(&[-1]), &row(&[0, 0])),
            LpOutcome::Infeasible
        );
        let a = RatMatrix::new(vec![row(&[1, -1])]).unwrap();
        assert_eq!(
            minimize(&a, &row(&[0]), &row(&[-1, 0])),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = RatMatrix::new(vec![row(&[1, 1]), row(&[2, 2])]).unwrap();
        let LpOutcome::Optimal { value, basis, .. } = minimize(&a, &row(&[1, 2]), &row(&[1, 2]))
        else {
            panic!("expected optimum");
        };
        assert_eq!(value, int(1));
        assert_eq!(basis.len(), 1);
    }

    #[test]
    fn free_variables_over_simplex() {
        let ineq: Vec<_> = (0..3)
            .map(|i| {
                let mut e = row(&[0, 0, 0]);
                e[i] = int(1);
                (e, int(0))
            })
            .collect();
        let eq = vec![(row(&[1, 1, 1]), int(1))];
        let (value, p) = minimize_free(&ineq, &eq, &row(&[3, -2, 1])).unwrap();
        assert_eq!(value, int(-2));
        assert_eq!(p, row(&[0, 1, 0]));
    }
}
