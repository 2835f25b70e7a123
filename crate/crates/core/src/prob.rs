//! Row-stochastic tables and small simplex helpers shared across modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for row sums of conditional tables built in code.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// A dense row-stochastic matrix `p(col | row)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Kernel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Kernel {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "kernel needs at least one row and column, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "kernel {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (i, row) in data.chunks(cols).enumerate() {
            check_distribution(row, &format!("row {i}"), ROW_SUM_TOL)?;
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged kernel rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { rows: n, cols: n, data }
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![1.0 / cols as f64; rows * cols],
        }
    }

    /// Binary symmetric law with crossover `flip`.
    pub fn bsc(flip: f64) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: vec![1.0 - flip, flip, flip, 1.0 - flip],
        }
    }

    /// Deterministic kernel sending row `i` to column `map[i]`.
    pub fn deterministic(map: &[usize], cols: usize) -> Self {
        let mut data = vec![0.0; map.len() * cols];
        for (i, &c) in map.iter().enumerate() {
            data[i * cols + c] = 1.0;
        }
        Self { rows: map.len(), cols, data }
    }

    /// Each row repeated `times` times consecutively.
    pub fn repeat_rows(&self, times: usize) -> Self {
        let mut data = Vec::with_capacity(self.data.len() * times);
        for row in self.data.chunks(self.cols) {
            for _ in 0..times {
                data.extend_from_slice(row);
            }
        }
        Self {
            rows: self.rows * times,
            cols: self.cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Largest absolute entrywise difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Kernel) -> Option<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

impl TryFrom<Vec<Vec<f64>>> for Kernel {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Kernel::from_rows(rows)
    }
}

impl From<Kernel> for Vec<Vec<f64>> {
    fn from(k: Kernel) -> Self {
        k.to_rows()
    }
}

/// Checks a probability vector: entries in [0,1], sum within `tol` of one.
pub fn check_distribution(p: &[f64], what: &str, tol: f64) -> Result<()> {
    if p.is_empty() {
        return Err(Error::DimensionMismatch(format!("{what} is empty")));
    }
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::NegativeProbability {
                location: format!("{what}[{i}]"),
                value: v,
            });
        }
        if v > 1.0 + tol {
            return Err(Error::Invalid(format!("{what}[{i}] = {v} exceeds 1")));
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::RowSumViolation {
            row: what.to_string(),
            sum,
            tolerance: tol,
        });
    }
    Ok(())
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    let total: f64 = out.iter().sum();
    for x in &mut out {
        *x /= total;
    }
    out
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_lands_on_simplex() {
        let p = project_simplex(&[0.9, 0.4, -0.2]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.0));
        assert!((p[0] - 0.75).abs() < 1e-12 && (p[1] - 0.25).abs() < 1e-12);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn binary_entropy_reference_values() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.11) - 0.499_915_958).abs() < 1e-8);
    }

    #[test]
    fn kernel_rejects_bad_rows() {
        assert!(Kernel::new(1, 2, vec![0.5, 0.4]).is_err());
        assert!(Kernel::new(1, 2, vec![1.2, -0.2]).is_err());
        assert!(Kernel::new(1, 2, vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-17);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-16).abs() < 1e-30);
    }
}
