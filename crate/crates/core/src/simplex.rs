//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Solves `maximize c.x` subject to a list of `<=`, `=` or `>=` rows and
//! `x >= 0`. Intended for the small LPs built by [`crate::grasp`]: tens of
//! variables, a dozen or two rows. Everything is dense and deterministic.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Pivot and reduced-cost tolerance.
pub const PIVOT_EPS: f64 = 1e-10;
/// Phase-one objective above which the problem is declared infeasible,
/// relative to the right-hand-side scale.
pub const FEASIBILITY_EPS: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    Dimension {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("non-finite coefficient in constraint {row}")]
    NonFinite { row: usize },
    #[error("linear program is infeasible (phase-one residual {residual})")]
    Infeasible { residual: f64 },
    #[error("linear program is unbounded (entering column {column})")]
    Unbounded { column: usize },
    #[error("simplex stopped after {iterations} iterations; basis {basis:?}")]
    IterationLimit {
        iterations: usize,
        basis: Vec<usize>,
    },
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::build(self)?.run(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows x (cols + 1)`; the last entry of each row is the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    n_orig: usize,
    iterations: usize,
    rhs_scale: f64,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Result<Self, LpError> {
        let n = lp.num_vars();
        for (row, c) in lp.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(LpError::Dimension {
                    row,
                    expected: n,
                    got: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite { row });
            }
        }

        // Normalize to non-negative right-hand sides.
        let rows: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let flipped = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();

        let mut kinds = vec![ColumnKind::Original; n];
        let mut slack_col = Vec::with_capacity(rows.len());
        let mut art_col = Vec::with_capacity(rows.len());
        for (_, rel, _) in &rows {
            slack_col.push(match rel {
                Relation::Eq => None,
                _ => {
                    kinds.push(ColumnKind::Slack);
                    Some(kinds.len() - 1)
                }
            });
        }
        for (_, rel, _) in &rows {
            art_col.push(match rel {
                Relation::Le => None,
                _ => {
                    kinds.push(ColumnKind::Artificial);
                    Some(kinds.len() - 1)
                }
            });
        }

        let width = kinds.len() + 1;
        let mut t = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let mut rhs_scale: f64 = 1.0;
        for (i, (coeffs, rel, rhs)) in rows.into_iter().enumerate() {
            let mut r = vec![0.0; width];
            r[..n].copy_from_slice(&coeffs);
            if let Some(s) = slack_col[i] {
                r[s] = if rel == Relation::Le { 1.0 } else { -1.0 };
            }
            if let Some(a) = art_col[i] {
                r[a] = 1.0;
                basis.push(a);
            } else {
                basis.push(slack_col[i].expect("<= rows carry a slack"));
            }
            r[width - 1] = rhs;
            rhs_scale = rhs_scale.max(rhs);
            t.push(r);
        }

        Ok(Self {
            t,
            basis,
            kinds,
            n_orig: n,
            iterations: 0,
            rhs_scale,
        })
    }

    fn cols(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.iterations += 1;
    }

    /// Maximizes `cost` over columns allowed by `allowed`.
    fn optimize(
        &mut self,
        cost: &[f64],
        allowed: impl Fn(ColumnKind) -> bool,
        max_iterations: usize,
    ) -> Result<(), LpError> {
        let width = self.cols();
        loop {
            if self.iterations >= max_iterations {
                return Err(LpError::IterationLimit {
                    iterations: self.iterations,
                    basis: self.basis.clone(),
                });
            }
            // Bland: lowest-index improving column.
            let mut entering = None;
            for j in 0..width {
                if !allowed(self.kinds[j]) || self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j];
                for (i, &b) in self.basis.iter().enumerate() {
                    reduced -= cost[b] * self.t[i][j];
                }
                if reduced > PIVOT_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };

            let mut leaving: Option<(usize, f64)> = None;
            for (i, r) in self.t.iter().enumerate() {
                let a = r[col];
                if a > PIVOT_EPS {
                    let ratio = r[width] / a;
                    leaving = match leaving {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - PIVOT_EPS
                                || (ratio <= lr + PIVOT_EPS && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leaving else {
                return Err(LpError::Unbounded { column: col });
            };
            self.pivot(row, col);
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        let width = self.cols();
        let has_artificial = self.kinds.contains(&ColumnKind::Artificial);

        if has_artificial {
            let phase1: Vec<f64> = self
                .kinds
                .iter()
                .map(|k| {
                    if *k == ColumnKind::Artificial {
                        -1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            self.optimize(&phase1, |_| true, lp.max_iterations)?;
            let residual: f64 = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| self.kinds[b] == ColumnKind::Artificial)
                .map(|(i, _)| self.t[i][width])
                .sum();
            if residual > FEASIBILITY_EPS * self.rhs_scale {
                return Err(LpError::Infeasible { residual });
            }
            // Drive zero-level artificials out of the basis; drop rows that
            // turn out to be redundant.
            let mut i = 0;
            while i < self.t.len() {
                if self.kinds[self.basis[i]] == ColumnKind::Artificial {
                    let replacement = (0..width).find(|&j| {
                        self.kinds[j] != ColumnKind::Artificial && self.t[i][j].abs() > 1e-9
                    });
                    match replacement {
                        Some(j) => {
                            self.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            self.t.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut cost = vec![0.0; width];
        cost[..self.n_orig].copy_from_slice(&lp.objective);
        self.optimize(&cost, |k| k != ColumnKind::Artificial, lp.max_iterations)?;

        let mut x = vec![0.0; self.n_orig];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_orig {
                // Clip round-off below zero.
                x[b] = self.t[i][width].max(0.0);
            }
        }
        let objective = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            iterations: self.iterations,
        })
    }
}
