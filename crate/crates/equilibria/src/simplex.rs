//! Two-phase tableau simplex with Bland's rule. Exact under the rational
//! backend; sized for the small feasibility problems of this crate.

use ebw_core::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<P: Scalar> {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<P>, value: P },
}

impl<P: Scalar> LpOutcome<P> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

/// maximize c·x subject to the rows and x ≥ 0.
#[derive(Clone, Debug)]
pub struct LinearProgram<P: Scalar> {
    n: usize,
    objective: Vec<P>,
    rows: Vec<(Vec<P>, Relation, P)>,
}

impl<P: Scalar> LinearProgram<P> {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            n,
            objective: vec![P::zero(); n],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn maximize(mut self, c: Vec<P>) -> Self {
        assert_eq!(c.len(), self.n, "objective length");
        self.objective = c;
        self
    }

    pub fn constraint(&mut self, coeffs: Vec<P>, rel: Relation, rhs: P) {
        assert_eq!(coeffs.len(), self.n, "constraint length");
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome<P> {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau<P: Scalar> {
    n: usize,
    width: usize,
    artificial_from: usize,
    rows: Vec<Vec<P>>,
    basis: Vec<usize>,
}

impl<P: Scalar> Tableau<P> {
    fn build(lp: &LinearProgram<P>) -> Self {
        let m = lp.rows.len();
        let n_slack = lp.rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let normalized: Vec<(Vec<P>, Relation, P)> = lp
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < P::zero() {
                    let flip = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|x| -x.clone()).collect(), flip, -b.clone())
                } else {
                    (a.clone(), *rel, b.clone())
                }
            })
            .collect();
        let n_art = normalized.iter().filter(|r| r.1 != Relation::Le).count();
        let artificial_from = lp.n + n_slack;
        let width = artificial_from + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut t) = (lp.n, artificial_from);
        for (a, rel, b) in normalized {
            let mut row = a;
            row.resize(width + 1, P::zero());
            row[width] = b;
            match rel {
                Relation::Le => {
                    row[s] = P::one();
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -P::one();
                    s += 1;
                    row[t] = P::one();
                    basis.push(t);
                    t += 1;
                }
                Relation::Eq => {
                    row[t] = P::one();
                    basis.push(t);
                    t += 1;
                }
            }
            rows.push(row);
        }
        Tableau {
            n: lp.n,
            width,
            artificial_from,
            rows,
            basis,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            *x = x.clone() / p.clone();
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        self.basis[r] = c;
    }

    /// Optimizes `cost` over the columns below `limit`; false when unbounded.
    fn optimize(&mut self, cost: &[P], limit: usize) -> bool {
        loop {
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let z: P = self
                    .rows
                    .iter()
                    .zip(&self.basis)
                    .map(|(row, &b)| cost[b].clone() * row[j].clone())
                    .sum();
                cost[j].clone() - z > P::zero()
            });
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, P)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j] > P::zero() {
                    let ratio = row[self.width].clone() / row[j].clone();
                    let better = match &leave {
                        None => true,
                        Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((i, _)) => self.pivot(i, j),
            }
        }
    }

    fn run(mut self, objective: &[P]) -> LpOutcome<P> {
        let mut phase1 = vec![P::zero(); self.width];
        for c in phase1.iter_mut().skip(self.artificial_from) {
            *c = -P::one();
        }
        self.optimize(&phase1, self.width);
        let infeasibility: P = self
            .rows
            .iter()
            .zip(&self.basis)
            .filter(|(_, &b)| b >= self.artificial_from)
            .map(|(row, _)| row[self.width].clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_from {
                match (0..self.artificial_from).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let mut cost = objective.to_vec();
        cost.resize(self.width, P::zero());
        if !self.optimize(&cost, self.artificial_from) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![P::zero(); self.n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n {
                x[b] = row[self.width].clone();
            }
        }
        let value = x.iter().zip(objective).map(|(a, b)| a.clone() * b.clone()).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebw_core::{q, Rational};

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36.
        let mut lp = LinearProgram::<Rational>::new(2).maximize(vec![q(3, 1), q(5, 1)]);
        lp.constraint(vec![q(1, 1), q(0, 1)], Relation::Le, q(4, 1));
        lp.constraint(vec![q(0, 1), q(2, 1)], Relation::Le, q(12, 1));
        lp.constraint(vec![q(3, 1), q(2, 1)], Relation::Le, q(18, 1));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![q(2, 1), q(6, 1)],
                value: q(36, 1)
            }
        );
    }

    #[test]
    fn equality_and_ge_rows() {
        // max −x − y, x + y = 1, x ≥ 1/3 → value −1 with x ≥ 1/3.
        let mut lp = LinearProgram::<Rational>::new(2).maximize(vec![q(-1, 1), q(-1, 1)]);
        lp.constraint(vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1));
        lp.constraint(vec![q(1, 1), q(0, 1)], Relation::Ge, q(1, 3));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(-1, 1));
                assert!(x[0] >= q(1, 3));
            }
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<Rational>::new(1);
        lp.constraint(vec![q(1, 1)], Relation::Ge, q(2, 1));
        lp.constraint(vec![q(1, 1)], Relation::Le, q(1, 1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::<Rational>::new(1).maximize(vec![q(1, 1)]);
        lp.constraint(vec![q(1, 1)], Relation::Ge, q(0, 1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // −x ≤ −2 ⇔ x ≥ 2; max −x → x = 2.
        let mut lp = LinearProgram::<Rational>::new(1).maximize(vec![q(-1, 1)]);
        lp.constraint(vec![q(-1, 1)], Relation::Le, q(-2, 1));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![q(2, 1)],
                value: q(-2, 1)
            }
        );
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::<Rational>::new(2).maximize(vec![q(1, 1), q(0, 1)]);
        lp.constraint(vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1));
        lp.constraint(vec![q(2, 1), q(2, 1)], Relation::Eq, q(2, 1));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![q(1, 1), q(0, 1)],
                value: q(1, 1)
            }
        );
    }
}
