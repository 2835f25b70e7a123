use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{DenseLp, LpOutcome, Sense};

/// Feasibility slack used by vertex checks and membership.
pub const FEAS_TOL: f64 = 1e-9;

/// `coeffs · rates <= bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub bound: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, bound: f64) -> Self {
        Self { coeffs, bound }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.coeffs.iter().zip(point).map(|(a, x)| a * x).sum()
    }
}

/// A polytope in the nonnegative orthant of named rate coordinates.
///
/// Nonnegativity of every coordinate is implicit; equalities such as
/// `Re = 0` are stored as `Re <= 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatePolytope {
    coords: Vec<String>,
    constraints: Vec<Constraint>,
    label: String,
}

impl RatePolytope {
    pub fn new<S: AsRef<str>>(coords: &[S], constraints: Vec<Constraint>) -> Result<Self> {
        let d = coords.len();
        for c in &constraints {
            if c.coeffs.len() != d {
                return Err(Error::DimensionMismatch(format!(
                    "constraint over {} coordinates in a {d}-dimensional polytope",
                    c.coeffs.len()
                )));
            }
            if !c.bound.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invalid("non-finite constraint".into()));
            }
        }
        Ok(Self {
            coords: coords.iter().map(|s| s.as_ref().to_string()).collect(),
            constraints,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, polytope has {}",
                point.len(),
                self.dim()
            )));
        }
        Ok(point.iter().all(|&x| x >= -tol) && self.constraints.iter().all(|c| c.eval(point) <= c.bound + tol))
    }

    fn lp(&self, objective: Vec<f64>, maximize: bool, fixed: &[(usize, f64)]) -> DenseLp {
        let mut lp = DenseLp::nonnegative(objective, maximize);
        for c in &self.constraints {
            lp.push(c.coeffs.clone(), Sense::Le, c.bound);
        }
        for &(k, v) in fixed {
            let mut e = vec![0.0; self.dim()];
            e[k] = 1.0;
            lp.push(e, Sense::Eq, v);
        }
        lp
    }

    /// Optimum of `direction · x` over the polytope intersected with the
    /// fixed coordinate values; `None` if that set is empty.
    pub fn optimize(&self, direction: &[f64], maximize: bool, fixed: &[(usize, f64)]) -> Result<Option<(f64, Vec<f64>)>> {
        match self.lp(direction.to_vec(), maximize, fixed).solve()? {
            LpOutcome::Optimal { value, x } => Ok(Some((value, x))),
            LpOutcome::Infeasible => Ok(None),
            LpOutcome::Unbounded => Err(Error::Unbounded(direction.to_vec())),
        }
    }

    pub fn is_empty(&self) -> Result<bool> {
        if self.constraints.iter().all(|c| c.bound >= 0.0) {
            return Ok(false);
        }
        Ok(self.optimize(&vec![0.0; self.dim()], true, &[])?.is_none())
    }

    /// Support value `max direction · x`; `None` for an empty polytope.
    pub fn support(&self, direction: &[f64]) -> Result<Option<f64>> {
        Ok(self.optimize(direction, true, &[])?.map(|(v, _)| v))
    }

    /// All vertices, sorted and deduplicated at [`super::DEDUP_TOL`].
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        let d = self.dim();
        // rows a·x <= b including -x_k <= 0
        let mut rows: Vec<(Vec<f64>, f64)> = self.constraints.iter().map(|c| (c.coeffs.clone(), c.bound)).collect();
        for k in 0..d {
            let mut e = vec![0.0; d];
            e[k] = -1.0;
            rows.push((e, 0.0));
        }
        if d == 0 {
            return Ok(vec![vec![]]);
        }
        if binomial(rows.len(), d) > super::MAX_VERTEX_CANDIDATES {
            return Err(Error::VertexEnumerationOverflow {
                limit: super::MAX_VERTICES,
            });
        }
        let mut found: Vec<Vec<f64>> = Vec::new();
        let mut subset: Vec<usize> = (0..d).collect();
        loop {
            if let Some(x) = solve_square(&rows, &subset) {
                if rows.iter().all(|(a, b)| dot(a, &x) <= b + FEAS_TOL) {
                    found.push(x);
                    if found.len() > super::MAX_VERTICES * 4 {
                        // heavy degeneracy; dedupe before giving up
                        found = super::dedup_points(found);
                        if found.len() > super::MAX_VERTICES {
                            return Err(Error::VertexEnumerationOverflow {
                                limit: super::MAX_VERTICES,
                            });
                        }
                    }
                }
            }
            if !next_combination(&mut subset, rows.len()) {
                break;
            }
        }
        let found = super::dedup_points(found);
        if found.len() > super::MAX_VERTICES {
            return Err(Error::VertexEnumerationOverflow {
                limit: super::MAX_VERTICES,
            });
        }
        Ok(found)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k as u128 {
        r = r * (n as u128 - i) / (i + 1);
    }
    r.min(usize::MAX as u128) as usize
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solves the square system picked by `subset` with partial pivoting.
fn solve_square(rows: &[(Vec<f64>, f64)], subset: &[usize]) -> Option<Vec<f64>> {
    let d = subset.len();
    let mut m: Vec<Vec<f64>> = subset
        .iter()
        .map(|&r| {
            let mut row = rows[r].0.clone();
            row.push(rows[r].1);
            row
        })
        .collect();
    for col in 0..d {
        let pivot = (col..d).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        for r in 0..d {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    for c in col..=d {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some(
        (0..d)
            .map(|i| {
                let v = m[i][d] / m[i][i];
                if v.abs() < 1e-13 {
                    0.0
                } else {
                    v
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> RatePolytope {
        RatePolytope::new(
            &["a", "b"],
            vec![Constraint::new(vec![1.0, 0.0], 1.0), Constraint::new(vec![0.0, 1.0], 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn box_vertices() {
        let v = unit_box().vertices().unwrap();
        assert_eq!(v, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn single_active_bound_sets_the_support() {
        let p = RatePolytope::new(
            &["R0", "R1", "Re"],
            vec![
                Constraint::new(vec![0.0, 1.0, 0.0], 0.7),
                Constraint::new(vec![1.0, 1.0, 0.0], 2.0),
                Constraint::new(vec![0.0, -1.0, 1.0], 0.0),
            ],
        )
        .unwrap();
        assert!((p.support(&[0.0, 1.0, 0.0]).unwrap().unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn negative_bound_can_empty_a_piece() {
        let p = RatePolytope::new(&["a"], vec![Constraint::new(vec![1.0], -0.1)]).unwrap();
        assert!(p.is_empty().unwrap());
        assert!(p.vertices().unwrap().is_empty());
    }

    #[test]
    fn missing_bound_is_unbounded() {
        let p = RatePolytope::new(&["a", "b"], vec![Constraint::new(vec![1.0, 0.0], 1.0)]).unwrap();
        assert!(matches!(p.support(&[0.0, 1.0]), Err(Error::Unbounded(_))));
    }

    #[test]
    fn combinations_cover_all_subsets() {
        let mut c = vec![0, 1];
        let mut n = 1;
        while next_combination(&mut c, 5) {
            n += 1;
        }
        assert_eq!(n, binomial(5, 2));
    }
}
