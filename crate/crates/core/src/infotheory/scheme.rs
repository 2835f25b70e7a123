//! Factored input distributions over auxiliary variables and channel inputs.
//!
//! Every scheme can be flattened into a list of probability vectors
//! ("blocks"), one per simplex it lives on. The optimizer searches over
//! blocks; [`AnyScheme::from_blocks`] rebuilds the typed scheme.

use serde::{Deserialize, Serialize};

use crate::channel::Alphabets;
use crate::error::{Error, Result};
use crate::prob::{check_distribution, Kernel, ROW_SUM_TOL};

/// Joint table `p(q, x2)` stored as rows over `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct PairTable {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl PairTable {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "pair table {rows}x{cols} with {} entries",
                data.len()
            )));
        }
        check_distribution(&data, "p(q, x2)", ROW_SUM_TOL)?;
        Ok(Self { rows, cols, data })
    }

    /// Product `p(q) p(x2)`.
    pub fn product(pq: &[f64], px2: &[f64]) -> Result<Self> {
        let data = pq.iter().flat_map(|a| px2.iter().map(move |b| a * b)).collect();
        Self::new(pq.len(), px2.len(), data)
    }

    pub fn uniform(rows: usize, cols: usize) -> Self {
        let n = (rows * cols) as f64;
        Self {
            rows,
            cols,
            data: vec![1.0 / n; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, q: usize, x2: usize) -> f64 {
        self.data[q * self.cols + x2]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

impl TryFrom<Vec<Vec<f64>>> for PairTable {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged p(q, x2) rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }
}

impl From<PairTable> for Vec<Vec<f64>> {
    fn from(t: PairTable) -> Self {
        t.data.chunks(t.cols).map(<[f64]>::to_vec).collect()
    }
}

/// `p(q, x2) p(u | q) p(x1 | u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeOneSet {
    pub p_qx2: PairTable,
    pub p_u_given_q: Kernel,
    pub p_x1_given_u: Kernel,
}

/// `p(q, x2) p(u | q) p(x1 | u) p(v | q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeOneSetOuter {
    pub p_qx2: PairTable,
    pub p_u_given_q: Kernel,
    pub p_x1_given_u: Kernel,
    pub p_v_given_q: Kernel,
}

/// `p(q) p(u | q) p(x1 | u) p(v | q) p(x2 | v)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeTwoSet {
    pub p_q: Vec<f64>,
    pub p_u_given_q: Kernel,
    pub p_x1_given_u: Kernel,
    pub p_v_given_q: Kernel,
    pub p_x2_given_v: Kernel,
}

/// `p(q, x2) p(x1 | q)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeDegraded {
    pub p_qx2: PairTable,
    pub p_x1_given_q: Kernel,
}

fn expect_rows(k: &Kernel, rows: usize, what: &str) -> Result<()> {
    if k.rows() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} rows, expected {rows}",
            k.rows()
        )));
    }
    Ok(())
}

fn expect_cols(cols: usize, want: usize, what: &str) -> Result<()> {
    if cols != want {
        return Err(Error::DimensionMismatch(format!(
            "{what} ranges over {cols} symbols, channel has {want}"
        )));
    }
    Ok(())
}

impl SchemeOneSet {
    pub fn new(p_qx2: PairTable, p_u_given_q: Kernel, p_x1_given_u: Kernel) -> Result<Self> {
        let s = Self {
            p_qx2,
            p_u_given_q,
            p_x1_given_u,
        };
        s.check_shape()?;
        Ok(s)
    }

    fn check_shape(&self) -> Result<()> {
        expect_rows(&self.p_u_given_q, self.p_qx2.rows(), "p(u|q)")?;
        expect_rows(&self.p_x1_given_u, self.p_u_given_q.cols(), "p(x1|u)")
    }

    /// `U = X1` with `p(x1 | q)` given directly.
    pub fn with_u_equal_x1(p_qx2: PairTable, p_x1_given_q: Kernel) -> Result<Self> {
        let x1 = p_x1_given_q.cols();
        Self::new(p_qx2, p_x1_given_q, Kernel::identity(x1))
    }

    pub fn q_size(&self) -> usize {
        self.p_qx2.rows()
    }

    pub fn u_size(&self) -> usize {
        self.p_u_given_q.cols()
    }

    pub fn check_compatible(&self, a: &Alphabets) -> Result<()> {
        self.check_shape()?;
        expect_cols(self.p_x1_given_u.cols(), a.x1, "p(x1|u)")?;
        expect_cols(self.p_qx2.cols(), a.x2, "p(q,x2)")
    }
}

impl SchemeOneSetOuter {
    pub fn new(p_qx2: PairTable, p_u_given_q: Kernel, p_x1_given_u: Kernel, p_v_given_q: Kernel) -> Result<Self> {
        let s = Self {
            p_qx2,
            p_u_given_q,
            p_x1_given_u,
            p_v_given_q,
        };
        s.check_shape()?;
        Ok(s)
    }

    /// Adds an auxiliary `V` to a one-set scheme.
    pub fn extend(base: &SchemeOneSet, p_v_given_q: Kernel) -> Result<Self> {
        Self::new(
            base.p_qx2.clone(),
            base.p_u_given_q.clone(),
            base.p_x1_given_u.clone(),
            p_v_given_q,
        )
    }

    pub fn base(&self) -> SchemeOneSet {
        SchemeOneSet {
            p_qx2: self.p_qx2.clone(),
            p_u_given_q: self.p_u_given_q.clone(),
            p_x1_given_u: self.p_x1_given_u.clone(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        self.base().check_shape()?;
        expect_rows(&self.p_v_given_q, self.p_qx2.rows(), "p(v|q)")
    }

    pub fn v_size(&self) -> usize {
        self.p_v_given_q.cols()
    }

    pub fn check_compatible(&self, a: &Alphabets) -> Result<()> {
        self.check_shape()?;
        self.base().check_compatible(a)
    }
}

impl SchemeTwoSet {
    pub fn new(
        p_q: Vec<f64>,
        p_u_given_q: Kernel,
        p_x1_given_u: Kernel,
        p_v_given_q: Kernel,
        p_x2_given_v: Kernel,
    ) -> Result<Self> {
        let s = Self {
            p_q,
            p_u_given_q,
            p_x1_given_u,
            p_v_given_q,
            p_x2_given_v,
        };
        s.check_shape()?;
        Ok(s)
    }

    /// `U = X1`, `V = X2`, `|Q| = 1`, independent inputs.
    pub fn direct(px1: &[f64], px2: &[f64]) -> Result<Self> {
        Self::new(
            vec![1.0],
            Kernel::new(1, px1.len(), px1.to_vec())?,
            Kernel::identity(px1.len()),
            Kernel::new(1, px2.len(), px2.to_vec())?,
            Kernel::identity(px2.len()),
        )
    }

    fn check_shape(&self) -> Result<()> {
        check_distribution(&self.p_q, "p(q)", ROW_SUM_TOL)?;
        let q = self.p_q.len();
        expect_rows(&self.p_u_given_q, q, "p(u|q)")?;
        expect_rows(&self.p_v_given_q, q, "p(v|q)")?;
        expect_rows(&self.p_x1_given_u, self.p_u_given_q.cols(), "p(x1|u)")?;
        expect_rows(&self.p_x2_given_v, self.p_v_given_q.cols(), "p(x2|v)")
    }

    pub fn check_compatible(&self, a: &Alphabets) -> Result<()> {
        self.check_shape()?;
        expect_cols(self.p_x1_given_u.cols(), a.x1, "p(x1|u)")?;
        expect_cols(self.p_x2_given_v.cols(), a.x2, "p(x2|v)")
    }

    /// Exchanges the two users (`U <-> V`, `X1 <-> X2`).
    pub fn swap_users(&self) -> Self {
        Self {
            p_q: self.p_q.clone(),
            p_u_given_q: self.p_v_given_q.clone(),
            p_x1_given_u: self.p_x2_given_v.clone(),
            p_v_given_q: self.p_u_given_q.clone(),
            p_x2_given_v: self.p_x1_given_u.clone(),
        }
    }
}

impl SchemeDegraded {
    pub fn new(p_qx2: PairTable, p_x1_given_q: Kernel) -> Result<Self> {
        expect_rows(&p_x1_given_q, p_qx2.rows(), "p(x1|q)")?;
        Ok(Self { p_qx2, p_x1_given_q })
    }

    /// The same input law written as a one-set scheme with `U = X1`.
    pub fn as_one_set(&self) -> SchemeOneSet {
        SchemeOneSet {
            p_qx2: self.p_qx2.clone(),
            p_u_given_q: self.p_x1_given_q.clone(),
            p_x1_given_u: Kernel::identity(self.p_x1_given_q.cols()),
        }
    }

    pub fn check_compatible(&self, a: &Alphabets) -> Result<()> {
        expect_rows(&self.p_x1_given_q, self.p_qx2.rows(), "p(x1|q)")?;
        expect_cols(self.p_x1_given_q.cols(), a.x1, "p(x1|q)")?;
        expect_cols(self.p_qx2.cols(), a.x2, "p(q,x2)")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    OneSet,
    OneSetOuter,
    TwoSet,
    Degraded,
}

/// Cardinalities that fix the simplex layout of a scheme family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeShape {
    pub kind: SchemeKind,
    pub q: usize,
    pub u: usize,
    pub v: usize,
    pub x1: usize,
    pub x2: usize,
}

impl SchemeShape {
    /// `(number of simplices, simplex size)` in block order.
    pub fn layout(&self) -> Vec<(usize, usize)> {
        let Self { q, u, v, x1, x2, .. } = *self;
        match self.kind {
            SchemeKind::OneSet => vec![(1, q * x2), (q, u), (u, x1)],
            SchemeKind::OneSetOuter => vec![(1, q * x2), (q, u), (u, x1), (q, v)],
            SchemeKind::TwoSet => vec![(1, q), (q, u), (u, x1), (q, v), (v, x2)],
            SchemeKind::Degraded => vec![(1, q * x2), (q, x1)],
        }
    }

    /// Simplex sizes, one entry per block.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.layout()
            .into_iter()
            .flat_map(|(count, size)| std::iter::repeat_n(size, count))
            .collect()
    }
}

/// A scheme of any family, as exported in witness files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnyScheme {
    OneSet(SchemeOneSet),
    OneSetOuter(SchemeOneSetOuter),
    TwoSet(SchemeTwoSet),
    Degraded(SchemeDegraded),
}

fn split_kernel(blocks: &mut std::slice::Iter<'_, Vec<f64>>, rows: usize, cols: usize) -> Result<Kernel> {
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let b = blocks
            .next()
            .ok_or_else(|| Error::DimensionMismatch("too few blocks".into()))?;
        if b.len() != cols {
            return Err(Error::DimensionMismatch(format!("block of {} entries, expected {cols}", b.len())));
        }
        data.extend_from_slice(b);
    }
    Kernel::new(rows, cols, data)
}

impl AnyScheme {
    pub fn kind(&self) -> SchemeKind {
        match self {
            AnyScheme::OneSet(_) => SchemeKind::OneSet,
            AnyScheme::OneSetOuter(_) => SchemeKind::OneSetOuter,
            AnyScheme::TwoSet(_) => SchemeKind::TwoSet,
            AnyScheme::Degraded(_) => SchemeKind::Degraded,
        }
    }

    pub fn check_compatible(&self, a: &Alphabets) -> Result<()> {
        match self {
            AnyScheme::OneSet(s) => s.check_compatible(a),
            AnyScheme::OneSetOuter(s) => s.check_compatible(a),
            AnyScheme::TwoSet(s) => s.check_compatible(a),
            AnyScheme::Degraded(s) => s.check_compatible(a),
        }
    }

    /// Flattens into one probability vector per simplex, in layout order.
    pub fn to_blocks(&self) -> Vec<Vec<f64>> {
        let rows = |k: &Kernel| k.to_rows();
        match self {
            AnyScheme::OneSet(s) => [vec![s.p_qx2.data().to_vec()], rows(&s.p_u_given_q), rows(&s.p_x1_given_u)].concat(),
            AnyScheme::OneSetOuter(s) => [
                vec![s.p_qx2.data().to_vec()],
                rows(&s.p_u_given_q),
                rows(&s.p_x1_given_u),
                rows(&s.p_v_given_q),
            ]
            .concat(),
            AnyScheme::TwoSet(s) => [
                vec![s.p_q.clone()],
                rows(&s.p_u_given_q),
                rows(&s.p_x1_given_u),
                rows(&s.p_v_given_q),
                rows(&s.p_x2_given_v),
            ]
            .concat(),
            AnyScheme::Degraded(s) => [vec![s.p_qx2.data().to_vec()], rows(&s.p_x1_given_q)].concat(),
        }
    }

    pub fn from_blocks(shape: &SchemeShape, blocks: &[Vec<f64>]) -> Result<Self> {
        let SchemeShape { q, u, v, x1, x2, .. } = *shape;
        let mut it = blocks.iter();
        let pair = |it: &mut std::slice::Iter<'_, Vec<f64>>| -> Result<PairTable> {
            let b = it.next().ok_or_else(|| Error::DimensionMismatch("too few blocks".into()))?;
            PairTable::new(q, x2, b.clone())
        };
        let scheme = match shape.kind {
            SchemeKind::OneSet => {
                let p_qx2 = pair(&mut it)?;
                AnyScheme::OneSet(SchemeOneSet::new(p_qx2, split_kernel(&mut it, q, u)?, split_kernel(&mut it, u, x1)?)?)
            }
            SchemeKind::OneSetOuter => {
                let p_qx2 = pair(&mut it)?;
                AnyScheme::OneSetOuter(SchemeOneSetOuter::new(
                    p_qx2,
                    split_kernel(&mut it, q, u)?,
                    split_kernel(&mut it, u, x1)?,
                    split_kernel(&mut it, q, v)?,
                )?)
            }
            SchemeKind::TwoSet => {
                let p_q = it.next().ok_or_else(|| Error::DimensionMismatch("too few blocks".into()))?.clone();
                AnyScheme::TwoSet(SchemeTwoSet::new(
                    p_q,
                    split_kernel(&mut it, q, u)?,
                    split_kernel(&mut it, u, x1)?,
                    split_kernel(&mut it, q, v)?,
                    split_kernel(&mut it, v, x2)?,
                )?)
            }
            SchemeKind::Degraded => {
                let p_qx2 = pair(&mut it)?;
                AnyScheme::Degraded(SchemeDegraded::new(p_qx2, split_kernel(&mut it, q, x1)?)?)
            }
        };
        if it.next().is_some() {
            return Err(Error::DimensionMismatch("too many blocks".into()));
        }
        Ok(scheme)
    }
}
