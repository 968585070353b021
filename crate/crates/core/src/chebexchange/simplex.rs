//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Variables are free; each is split into a nonnegative pair internally. The
//! problems solved here have a few dozen rows at most.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::lu_solve_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective·x` over free `x` subject to linear rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Result<&mut Self> {
        if coeffs.len() != self.num_vars {
            return Err(Error::InvalidInput(format!(
                "constraint has {} coefficients, program has {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("constraint data must be finite".into()));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub optimum: f64,
    pub solution: Vec<f64>,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;

struct Tableau {
    /// rows × (cols + 1), last column is the right-hand side
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for x in self.rows[r].iter_mut() {
            *x /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= f * p);
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland-rule simplex iterations for `cost` over the allowed columns.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool], max_iter: usize) -> Result<()> {
        let rhs = self.cols;
        for _ in 0..max_iter {
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&b, row)| cost[b] * row[j])
                        .sum::<f64>();
                reduced < -COST_TOL
            });
            let Some(j) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j] > PIVOT_TOL {
                    let ratio = row[rhs].max(0.0) / row[j];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14 * lr.abs().max(1.0)
                                || (ratio <= lr + 1e-14 * lr.abs().max(1.0) && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((i, _)) => self.pivot(i, j),
                None => return Err(Error::LpUnbounded),
            }
        }
        Err(Error::InvalidInput(format!("simplex exceeded {max_iter} pivots")))
    }
}

/// Largest constraint violation of `x`, relative to the row scale.
fn violation(lp: &LinearProgram, x: &[f64]) -> f64 {
    lp.constraints
        .iter()
        .map(|c| {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let scale = 1.0 + c.rhs.abs() + c.coeffs.iter().zip(x).map(|(a, v)| (a * v).abs()).sum::<f64>();
            let gap = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            if gap.is_nan() { f64::INFINITY } else { gap.max(0.0) / scale }
        })
        .fold(0.0, f64::max)
}

/// Solves `lp` to an optimal vertex. The basic solution is re-solved from the
/// original data once the optimal basis is known.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.num_vars;
    let m = lp.constraints.len();

    // standard form: [x+ | x- | slack/surplus | artificial], rhs >= 0
    let n_split = 2 * n;
    let n_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let mut std_rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut std_rhs = Vec::with_capacity(m);
    let mut slack_col = vec![None; m];
    let mut needs_artificial = vec![false; m];
    let mut next_slack = n_split;
    for (i, con) in lp.constraints.iter().enumerate() {
        let flip = con.rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n_split + n_slack];
        for (k, &a) in con.coeffs.iter().enumerate() {
            row[k] = sign * a;
            row[n + k] = -sign * a;
        }
        let relation = match (con.relation, flip) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        match relation {
            Relation::Le => {
                row[next_slack] = 1.0;
                slack_col[i] = Some(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                needs_artificial[i] = true;
            }
            Relation::Eq => needs_artificial[i] = true,
        }
        std_rows.push(row);
        std_rhs.push(sign * con.rhs);
    }
    let n_std = n_split + n_slack;
    let n_art = needs_artificial.iter().filter(|&&a| a).count();
    let cols = n_std + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = n_std;
    for i in 0..m {
        let mut row = std_rows[i].clone();
        row.resize(cols + 1, 0.0);
        row[cols] = std_rhs[i];
        if needs_artificial[i] {
            row[next_art] = 1.0;
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack_col[i].unwrap());
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, basis, cols };
    let max_iter = 50 * (m + cols) + 1000;

    if n_art > 0 {
        let mut cost1 = vec![0.0; cols];
        cost1[n_std..].iter_mut().for_each(|c| *c = 1.0);
        tab.optimize(&cost1, &vec![true; cols], max_iter)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.rows)
            .filter(|(b, _)| **b >= n_std)
            .map(|(_, row)| row[cols])
            .sum();
        let scale = 1.0 + std_rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if infeasibility > 1e-9 * scale {
            return Err(Error::LpInfeasible);
        }
        // drive zero-level artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n_std {
                match (0..n_std).find(|&j| !tab.basis.contains(&j) && tab.rows[i][j].abs() > PIVOT_TOL) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                        std_rows.remove(i);
                        std_rhs.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost2 = vec![0.0; cols];
    for (k, &c) in lp.objective.iter().enumerate() {
        cost2[k] = c;
        cost2[n + k] = -c;
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < n_std).collect();
    tab.optimize(&cost2, &allowed, max_iter)?;

    let mut x_std = vec![0.0; n_std];
    for (row, &b) in tab.rows.iter().zip(&tab.basis) {
        x_std[b] = row[cols];
    }
    // Re-solve the basic system from the original data. Near-singular bases
    // can make this worse than the tableau values, so keep whichever
    // candidate violates the original constraints less.
    let mr = tab.rows.len();
    if mr > 0 {
        let mut bmat = vec![0.0; mr * mr];
        for i in 0..mr {
            for (k, &b) in tab.basis.iter().enumerate() {
                bmat[i * mr + k] = std_rows[i][b];
            }
        }
        let mut rhs = std_rhs.clone();
        if lu_solve_in_place(&mut bmat, mr, &mut rhs, 1) {
            let mut refined = x_std.clone();
            for (k, &b) in tab.basis.iter().enumerate() {
                refined[b] = rhs[k];
            }
            let to_free = |x: &[f64]| -> Vec<f64> { (0..n).map(|k| x[k] - x[n + k]).collect() };
            if violation(lp, &to_free(&refined)) <= violation(lp, &to_free(&x_std)) {
                x_std = refined;
            }
        }
    }

    let solution: Vec<f64> = (0..n).map(|k| x_std[k] - x_std[n + k]).collect();
    let optimum = lp.objective.iter().zip(&solution).map(|(c, x)| c * x).sum();
    Ok(LpSolution { optimum, solution })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add(vec![1.0], Relation::Ge, 3.0).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!((s.optimum - 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add(vec![1.0], Relation::Ge, 3.0).unwrap();
        lp.add(vec![1.0], Relation::Le, 2.0).unwrap();
        assert_eq!(solve_lp(&lp), Err(Error::LpInfeasible));

        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add(vec![1.0], Relation::Le, 2.0).unwrap();
        assert_eq!(solve_lp(&lp), Err(Error::LpUnbounded));
    }

    #[test]
    fn two_variable_minimax() {
        // min r  s.t.  -r <= c <= r,  c e^{-0.2} = 1
        let e = (-0.2f64).exp();
        let mut lp = LinearProgram::new(vec![0.0, 1.0]);
        lp.add(vec![1.0, -1.0], Relation::Le, 0.0).unwrap();
        lp.add(vec![-1.0, -1.0], Relation::Le, 0.0).unwrap();
        lp.add(vec![e, 0.0], Relation::Eq, 1.0).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!((s.optimum - 0.2f64.exp()).abs() < 1e-14);
        assert!((s.solution[0] - 0.2f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn textbook_program() {
        // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
        let mut lp = LinearProgram::new(vec![-3.0, -5.0]);
        lp.add(vec![1.0, 0.0], Relation::Le, 4.0).unwrap();
        lp.add(vec![0.0, 2.0], Relation::Le, 12.0).unwrap();
        lp.add(vec![3.0, 2.0], Relation::Le, 18.0).unwrap();
        lp.add(vec![1.0, 0.0], Relation::Ge, 0.0).unwrap();
        lp.add(vec![0.0, 1.0], Relation::Ge, 0.0).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!((s.optimum + 36.0).abs() < 1e-12);
        assert!((s.solution[0] - 2.0).abs() < 1e-12 && (s.solution[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add(vec![1.0, 1.0], Relation::Eq, 2.0).unwrap();
        lp.add(vec![2.0, 2.0], Relation::Eq, 4.0).unwrap();
        lp.add(vec![1.0, 0.0], Relation::Ge, 0.5).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert!((s.optimum - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_rows() {
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        assert!(lp.add(vec![1.0], Relation::Le, 0.0).is_err());
    }
}
