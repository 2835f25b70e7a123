//! Thin dense wrapper over `microlp` for the small linear programs used by
//! support values, hull membership and degradedness feasibility.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A dense LP: optimize `objective · x` over rows and per-variable bounds.
#[derive(Clone, Debug)]
pub struct DenseLp {
    pub maximize: bool,
    pub objective: Vec<f64>,
    pub bounds: Vec<(f64, f64)>,
    pub rows: Vec<Row>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

impl DenseLp {
    /// Nonnegative variables with no rows yet.
    pub fn nonnegative(objective: Vec<f64>, maximize: bool) -> Self {
        let n = objective.len();
        Self {
            maximize,
            objective,
            bounds: vec![(0.0, f64::INFINITY); n],
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.rows.push(Row { coeffs, sense, rhs });
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let direction = if self.maximize {
            OptimizationDirection::Maximize
        } else {
            OptimizationDirection::Minimize
        };
        let mut problem = Problem::new(direction);
        let vars: Vec<_> = self
            .objective
            .iter()
            .zip(&self.bounds)
            .map(|(&c, &b)| problem.add_var(c, b))
            .collect();
        for row in &self.rows {
            let terms: Vec<_> = row
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0.0)
                .map(|(j, &c)| (vars[j], c))
                .collect();
            let op = match row.sense {
                Sense::Le => ComparisonOp::Le,
                Sense::Eq => ComparisonOp::Eq,
                Sense::Ge => ComparisonOp::Ge,
            };
            if terms.is_empty() {
                let ok = match row.sense {
                    Sense::Le => 0.0 <= row.rhs + 1e-12,
                    Sense::Ge => 0.0 >= row.rhs - 1e-12,
                    Sense::Eq => row.rhs.abs() <= 1e-12,
                };
                if !ok {
                    return Ok(LpOutcome::Infeasible);
                }
                continue;
            }
            problem.add_constraint(terms.as_slice(), op, row.rhs);
        }
        match problem.solve() {
            Ok(SolveOutcome::Solution(sol)) => {
                let x = vars.iter().map(|&v| sol.var_value_raw(v)).collect();
                Ok(LpOutcome::Optimal {
                    value: sol.objective(),
                    x,
                })
            }
            Ok(SolveOutcome::Interrupted(_)) => {
                Err(Error::SolverStall("LP solve interrupted".into()))
            }
            Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
            Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
            Err(e) => Err(Error::SolverStall(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_box() {
        let mut lp = DenseLp::nonnegative(vec![1.0, 1.0], true);
        lp.push(vec![1.0, 0.0], Sense::Le, 0.7);
        lp.push(vec![1.0, 1.0], Sense::Le, 1.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = DenseLp::nonnegative(vec![1.0], true);
        lp.push(vec![1.0], Sense::Le, -1.0);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Infeasible));
        let lp = DenseLp::nonnegative(vec![1.0], true);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Unbounded));
    }
}
