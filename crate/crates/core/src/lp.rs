//! Dense two-phase tableau simplex with Bland's rule, generic over [`Scalar`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `min cᵀx` subject to `rows` and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub rows: Vec<Row<T>>,
}

#[derive(Debug, Clone)]
pub struct Row<T> {
    pub coeffs: Vec<T>,
    pub sense: Sense,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub value: T,
    pub point: Vec<T>,
    /// One multiplier per row: `c = Aᵀy + reduced costs`. Nonnegative on `≥` rows, nonpositive on `≤` rows.
    pub duals: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

const MAX_PIVOTS: usize = 200_000;

impl<T: Scalar> LinearProgram<T> {
    pub fn new(objective: Vec<T>) -> Self {
        Self { objective, rows: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<T>, sense: Sense, rhs: T) {
        self.rows.push(Row { coeffs, sense, rhs });
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.vars();
        if let Some(i) = self.rows.iter().position(|r| r.coeffs.len() != n) {
            return Err(Error::Input(format!("LP row {i} has wrong length")));
        }
        Ok(())
    }
}

/// Solves the LP, reporting infeasibility and unboundedness as outcomes.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpOutcome<T>> {
    lp.validate()?;
    Tableau::build(lp).run()
}

/// Solves the LP and treats anything but an optimum as an error.
pub fn lp_minimize<T: Scalar>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    match solve(lp)? {
        LpOutcome::Optimal(s) => Ok(s),
        LpOutcome::Infeasible => Err(Error::Lp("infeasible".into())),
        LpOutcome::Unbounded => Err(Error::Lp("unbounded".into())),
    }
}

struct Tableau<T> {
    body: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    vars: usize,
    cols: usize,
    artificial_from: usize,
    identity_col: Vec<usize>,
    flipped: Vec<bool>,
    cost: Vec<T>,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let m = lp.rows.len();
        let vars = lp.vars();
        let mut flipped = vec![false; m];
        let mut senses = Vec::with_capacity(m);
        for (i, r) in lp.rows.iter().enumerate() {
            let flip = r.rhs < T::zero();
            flipped[i] = flip;
            senses.push(match (r.sense, flip) {
                (Sense::Le, true) => Sense::Ge,
                (Sense::Ge, true) => Sense::Le,
                (s, _) => s,
            });
        }
        let slack_count = senses.iter().filter(|s| **s != Sense::Eq).count();
        let art_count = senses.iter().filter(|s| **s != Sense::Le).count();
        let artificial_from = vars + slack_count;
        let cols = artificial_from + art_count;
        let mut body = vec![vec![T::zero(); cols]; m];
        let mut rhs = Vec::with_capacity(m);
        let mut basis = vec![0; m];
        let mut identity_col = vec![0; m];
        let (mut next_slack, mut next_art) = (vars, artificial_from);
        for (i, r) in lp.rows.iter().enumerate() {
            let sign = if flipped[i] { -T::one() } else { T::one() };
            for (j, a) in r.coeffs.iter().enumerate() {
                body[i][j] = sign.clone() * a.clone();
            }
            rhs.push(sign * r.rhs.clone());
            match senses[i] {
                Sense::Le => {
                    body[i][next_slack] = T::one();
                    basis[i] = next_slack;
                    identity_col[i] = next_slack;
                    next_slack += 1;
                }
                Sense::Ge => {
                    body[i][next_slack] = -T::one();
                    next_slack += 1;
                    body[i][next_art] = T::one();
                    basis[i] = next_art;
                    identity_col[i] = next_art;
                    next_art += 1;
                }
                Sense::Eq => {
                    body[i][next_art] = T::one();
                    basis[i] = next_art;
                    identity_col[i] = next_art;
                    next_art += 1;
                }
            }
        }
        let mut cost = vec![T::zero(); cols];
        cost[..vars].clone_from_slice(&lp.objective);
        Self { body, rhs, basis, vars, cols, artificial_from, identity_col, flipped, cost }
    }

    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut rc = cost.to_vec();
        for (i, row) in self.body.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    rc[j] = rc[j].clone() - cb.clone() * a.clone();
                }
            }
        }
        rc
    }

    fn pivot(&mut self, r: usize, c: usize, rc: &mut [T]) {
        let p = self.body[r][c].clone();
        for a in self.body[r].iter_mut() {
            if !a.is_zero() {
                *a = a.clone() / p.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let pivot_row = self.body[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.body.len() {
            if i == r {
                continue;
            }
            let f = self.body[i][c].clone();
            if f.is_zero() {
                continue;
            }
            for (a, b) in self.body[i].iter_mut().zip(&pivot_row) {
                if !b.is_zero() {
                    *a = a.clone() - f.clone() * b.clone();
                }
            }
            self.body[i][c] = T::zero();
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        let f = rc[c].clone();
        if !f.is_zero() {
            for (a, b) in rc.iter_mut().zip(&pivot_row) {
                if !b.is_zero() {
                    *a = a.clone() - f.clone() * b.clone();
                }
            }
            rc[c] = T::zero();
        }
        self.basis[r] = c;
    }

    /// Bland's rule iterations over columns `< limit`. Returns false on unboundedness.
    fn optimize(&mut self, rc: &mut [T], limit: usize) -> Result<bool> {
        let eps = T::tol();
        let neg_eps = -eps.clone();
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..limit).find(|&j| rc[j] < neg_eps) else {
                return Ok(true);
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.body.len() {
                let a = &self.body[i][c];
                if *a <= eps {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            match best {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c, rc),
            }
        }
        Err(Error::Lp("pivot limit reached".into()))
    }

    fn run(mut self) -> Result<LpOutcome<T>> {
        let art = self.artificial_from;
        if art < self.cols {
            let mut phase1 = vec![T::zero(); self.cols];
            for c in phase1[art..].iter_mut() {
                *c = T::one();
            }
            let mut rc = self.reduced_costs(&phase1);
            self.optimize(&mut rc, self.cols)?;
            let infeasibility = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(b, _)| **b >= art)
                .fold(T::zero(), |acc, (_, v)| acc + v.clone());
            if infeasibility > T::tol() {
                return Ok(LpOutcome::Infeasible);
            }
            for r in 0..self.body.len() {
                if self.basis[r] < art {
                    continue;
                }
                if let Some(c) = (0..art).find(|&j| !self.body[r][j].near_zero()) {
                    self.pivot(r, c, &mut rc);
                }
            }
        }
        let cost = self.cost.clone();
        let mut rc = self.reduced_costs(&cost);
        if !self.optimize(&mut rc, art)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut point = vec![T::zero(); self.vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.vars {
                point[b] = self.rhs[i].clone();
            }
        }
        let value = point
            .iter()
            .zip(&self.cost)
            .fold(T::zero(), |acc, (x, c)| acc + x.clone() * c.clone());
        let duals = (0..self.body.len())
            .map(|i| {
                let col = self.identity_col[i];
                let y = self
                    .body
                    .iter()
                    .zip(&self.basis)
                    .fold(T::zero(), |acc, (row, &b)| acc + cost[b].clone() * row[col].clone());
                if self.flipped[i] {
                    -y
                } else {
                    y
                }
            })
            .collect();
        Ok(LpOutcome::Optimal(LpSolution { value, point, duals }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn q(a: i64, b: i64) -> BigRational {
        ratio(a, b)
    }

    #[test]
    fn forced_single_variable() {
        let mut lp = LinearProgram::new(vec![q(1, 1)]);
        lp.push(vec![q(1, 1)], Sense::Ge, q(1, 1));
        let s = lp_minimize(&lp).unwrap();
        assert_eq!(s.value, q(1, 1));
        assert_eq!(s.point, vec![q(1, 1)]);
        assert_eq!(s.duals, vec![q(1, 1)]);
    }

    #[test]
    fn half_weight_edge_covering() {
        let mut lp = LinearProgram::new(vec![q(1, 1), q(1, 1)]);
        lp.push(vec![q(1, 1), q(1, 2)], Sense::Ge, q(1, 1));
        lp.push(vec![q(1, 2), q(1, 1)], Sense::Ge, q(1, 1));
        let s = lp_minimize(&lp).unwrap();
        assert_eq!(s.value, q(4, 3));
        assert_eq!(s.point, vec![q(2, 3), q(2, 3)]);
    }

    #[test]
    fn reports_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.push(vec![1.0], Sense::Le, -1.0);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.push(vec![-1.0], Sense::Le, 1.0);
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_rows_and_negative_rhs() {
        // min x + 2y  s.t. x + y = 3, x - y >= -1  →  x = 3, y = 0
        let mut lp = LinearProgram::new(vec![q(1, 1), q(2, 1)]);
        lp.push(vec![q(1, 1), q(1, 1)], Sense::Eq, q(3, 1));
        lp.push(vec![q(1, 1), q(-1, 1)], Sense::Ge, q(-1, 1));
        let s = lp_minimize(&lp).unwrap();
        assert_eq!(s.value, q(3, 1));
        // strong duality: bᵀy = value
        let by = q(3, 1) * s.duals[0].clone() + q(-1, 1) * s.duals[1].clone();
        assert_eq!(by, s.value);
    }
}
