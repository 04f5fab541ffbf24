//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves `minimize c·x subject to A·x = b, x ≥ 0`. Problems here have a
//! handful of rows and at most a few thousand columns, so a dense tableau is
//! adequate.

/// Phase-one objective above this value means infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
const REDUCED_COST_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    /// Smallest total constraint violation phase one could reach.
    Infeasible { residual: f64 },
    Unbounded,
    PivotLimit,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. } | LpOutcome::Unbounded)
    }
}

/// Equality-form linear program.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
}

impl LinearProgram {
    /// `rows` are the rows of `A`; every row must have `cost.len()` entries.
    pub fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>, cost: Vec<f64>) -> Self {
        assert_eq!(rows.len(), rhs.len(), "one right-hand side per row");
        assert!(rows.iter().all(|r| r.len() == cost.len()), "ragged constraint matrix");
        Self { rows, rhs, cost }
    }

    /// Pure feasibility problem (zero objective).
    pub fn feasibility(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Self {
        let n = rows.first().map_or(0, Vec::len);
        Self::new(rows, rhs, vec![0.0; n])
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(&self.cost)
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// `m + 1` rows of `n + m + 1` entries; the last row holds reduced costs,
    /// the last column the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    redundant: Vec<bool>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.cost.len();
        let width = n + m + 1;
        let mut t = vec![vec![0.0; width]; m + 1];
        for i in 0..m {
            let sign = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
            for (cell, &a) in t[i].iter_mut().zip(&lp.rows[i]) {
                *cell = sign * a;
            }
            t[i][n + i] = 1.0;
            t[i][width - 1] = sign * lp.rhs[i];
        }
        // phase-one reduced costs: minimize the sum of artificials
        for j in (0..n).chain([width - 1]) {
            t[m][j] = -(0..m).map(|i| t[i][j]).sum::<f64>();
        }
        Self {
            m,
            n,
            t,
            basis: (n..n + m).collect(),
            redundant: vec![false; m],
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.n + self.m]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.n + self.m + 1;
        let p = self.t[row][col];
        for j in 0..width {
            self.t[row][j] /= p;
        }
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let f = self.t[i][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..width {
                self.t[i][j] -= f * self.t[row][j];
            }
            self.t[i][col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule over columns `0..limit`. Returns `Err(true)` on
    /// unboundedness, `Err(false)` when the pivot cap is hit.
    fn iterate(&mut self, limit: usize) -> Result<(), bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..limit).find(|&j| self.t[self.m][j] < -REDUCED_COST_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if self.redundant[i] {
                    continue;
                }
                let a = self.t[i][col];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - 1e-14
                            || (ratio <= best + 1e-14 && self.basis[i] < self.basis[r])
                        {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(true),
            }
        }
        Err(false)
    }

    fn run(mut self, cost: &[f64]) -> LpOutcome {
        let (m, n) = (self.m, self.n);
        match self.iterate(n) {
            Ok(()) => {}
            Err(false) => return LpOutcome::PivotLimit,
            // phase one is bounded below by zero
            Err(true) => unreachable!("phase one cannot be unbounded"),
        }
        let residual = -self.t[m][n + m];
        if residual > FEASIBILITY_TOL {
            return LpOutcome::Infeasible { residual };
        }

        // drive remaining artificials out of the basis
        for i in 0..m {
            if self.basis[i] < n {
                continue;
            }
            match (0..n).find(|&j| self.t[i][j].abs() > 1e-9) {
                Some(j) => self.pivot(i, j),
                None => self.redundant[i] = true,
            }
        }

        // phase two reduced costs
        let width = n + m + 1;
        for j in 0..width {
            let cj = if j < n { cost[j] } else { 0.0 };
            let cb: f64 = (0..m)
                .filter(|&i| !self.redundant[i])
                .map(|i| {
                    let b = self.basis[i];
                    let c = if b < n { cost[b] } else { 0.0 };
                    c * self.t[i][j]
                })
                .sum();
            self.t[m][j] = if j == width - 1 { -cb } else { cj - cb };
        }
        match self.iterate(n) {
            Ok(()) => {}
            Err(true) => return LpOutcome::Unbounded,
            Err(false) => return LpOutcome::PivotLimit,
        }

        let mut x = vec![0.0; n];
        for i in 0..m {
            let b = self.basis[i];
            if b < n {
                x[b] = self.rhs(i).max(0.0);
            }
        }
        let objective = x.iter().zip(cost).map(|(a, c)| a * c).sum();
        LpOutcome::Optimal { x, objective }
    }
}
