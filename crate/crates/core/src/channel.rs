//! Discrete memoryless GMAC transition laws `p(y, y1, y2 | x1, x2)`.
//!
//! A [`ChannelSpec`] is immutable once validated. Besides storage it offers
//! the per-receiver marginal kernels, the two degradedness tests for the
//! wiretapper output `Y2` relative to the destination output `Y`, and a
//! builder for channels that are degraded by construction.
//!
//! Degradedness verdicts look only at `Y` and `Y2`; the output at user 1
//! plays no role in them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{DenseLp, LpOutcome, Sense};
use crate::prob::Kernel;

/// Rows whose sum deviates from one by more than this are rejected.
pub const VALIDATION_TOL: f64 = 1e-6;

/// Row-sum tolerance required of channel files.
pub const FILE_ROW_TOL: f64 = 1e-9;

/// Default entrywise tolerance for degradedness verdicts.
pub const DEGRADED_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabets {
    pub x1: usize,
    pub x2: usize,
    pub y: usize,
    pub y1: usize,
    pub y2: usize,
}

impl Alphabets {
    pub fn new(x1: usize, x2: usize, y: usize, y1: usize, y2: usize) -> Self {
        Self { x1, x2, y, y1, y2 }
    }

    pub fn inputs(&self) -> usize {
        self.x1 * self.x2
    }

    pub fn outputs(&self) -> usize {
        self.y * self.y1 * self.y2
    }

    pub fn table_len(&self) -> usize {
        self.inputs() * self.outputs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    Destination,
    User1,
    User2,
}

/// Validated transition law, stored dense in `[x1][x2][y][y1][y2]` order.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSpec {
    sizes: Alphabets,
    prob: Vec<f64>,
}

/// Conditional law of one receiver's output given `(x1, x2)`; rows are
/// indexed `x1 * |X2| + x2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalKernel {
    pub receiver: Receiver,
    pub table: Kernel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PhysicallyDegraded,
    StochasticallyDegraded,
    NotDegraded,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::PhysicallyDegraded => "physically-degraded",
            Verdict::StochasticallyDegraded => "stochastically-degraded",
            Verdict::NotDegraded => "not-degraded",
        }
    }

    pub fn is_degraded(&self) -> bool {
        !matches!(self, Verdict::NotDegraded)
    }
}

/// Outcome of a degradedness test. The witness kernel `p(y2 | y, x2)` has
/// rows indexed `y * |X2| + x2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegradednessCertificate {
    pub verdict: Verdict,
    pub witness: Option<Kernel>,
    pub residual: f64,
}

impl ChannelSpec {
    /// Validates a flat table with the library tolerance.
    pub fn new(sizes: Alphabets, prob: Vec<f64>) -> Result<Self> {
        validate_channel(prob, sizes, VALIDATION_TOL)
    }

    pub fn sizes(&self) -> Alphabets {
        self.sizes
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    #[inline]
    pub fn index(&self, x1: usize, x2: usize, y: usize, y1: usize, y2: usize) -> usize {
        let s = &self.sizes;
        (((x1 * s.x2 + x2) * s.y + y) * s.y1 + y1) * s.y2 + y2
    }

    #[inline]
    pub fn p(&self, x1: usize, x2: usize, y: usize, y1: usize, y2: usize) -> f64 {
        self.prob[self.index(x1, x2, y, y1, y2)]
    }

    /// Output block for one input pair, laid out `[y][y1][y2]`.
    pub fn block(&self, x1: usize, x2: usize) -> &[f64] {
        let len = self.sizes.outputs();
        let start = (x1 * self.sizes.x2 + x2) * len;
        &self.prob[start..start + len]
    }

    pub fn marginal_kernel(&self, receiver: Receiver) -> MarginalKernel {
        let s = self.sizes;
        let cols = match receiver {
            Receiver::Destination => s.y,
            Receiver::User1 => s.y1,
            Receiver::User2 => s.y2,
        };
        let mut data = vec![0.0; s.inputs() * cols];
        for x1 in 0..s.x1 {
            for x2 in 0..s.x2 {
                let row = x1 * s.x2 + x2;
                for y in 0..s.y {
                    for y1 in 0..s.y1 {
                        for y2 in 0..s.y2 {
                            let c = match receiver {
                                Receiver::Destination => y,
                                Receiver::User1 => y1,
                                Receiver::User2 => y2,
                            };
                            data[row * cols + c] += self.p(x1, x2, y, y1, y2);
                        }
                    }
                }
            }
        }
        let table = Kernel::new(s.inputs(), cols, data)
            .expect("marginal of a validated channel is row-stochastic");
        MarginalKernel { receiver, table }
    }

    /// Joint law of `(Y, Y2)` given `(x1, x2)`, flattened `[y][y2]`.
    fn destination_wiretap_block(&self, x1: usize, x2: usize) -> Vec<f64> {
        let s = self.sizes;
        let mut out = vec![0.0; s.y * s.y2];
        for y in 0..s.y {
            for y1 in 0..s.y1 {
                for y2 in 0..s.y2 {
                    out[y * s.y2 + y2] += self.p(x1, x2, y, y1, y2);
                }
            }
        }
        out
    }

    /// Exchanges the roles of the two users: `X1 <-> X2`, `Y1 <-> Y2`.
    pub fn swap_users(&self) -> ChannelSpec {
        let s = self.sizes;
        let t = Alphabets::new(s.x2, s.x1, s.y, s.y2, s.y1);
        let mut prob = vec![0.0; t.table_len()];
        for x1 in 0..s.x1 {
            for x2 in 0..s.x2 {
                for y in 0..s.y {
                    for y1 in 0..s.y1 {
                        for y2 in 0..s.y2 {
                            let j = (((x2 * t.x2 + x1) * t.y + y) * t.y1 + y2) * t.y2 + y1;
                            prob[j] = self.p(x1, x2, y, y1, y2);
                        }
                    }
                }
            }
        }
        ChannelSpec { sizes: t, prob }
    }

    /// Renames wiretapper symbols: old `y2` becomes `perm[y2]`.
    pub fn relabel_y2(&self, perm: &[usize]) -> Result<ChannelSpec> {
        let s = self.sizes;
        let mut seen = vec![false; s.y2];
        if perm.len() != s.y2 || perm.iter().any(|&p| p >= s.y2 || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Invalid("relabeling is not a permutation".into()));
        }
        let mut prob = vec![0.0; s.table_len()];
        for x1 in 0..s.x1 {
            for x2 in 0..s.x2 {
                for y in 0..s.y {
                    for y1 in 0..s.y1 {
                        for y2 in 0..s.y2 {
                            prob[self.index(x1, x2, y, y1, perm[y2])] = self.p(x1, x2, y, y1, y2);
                        }
                    }
                }
            }
        }
        Ok(ChannelSpec { sizes: s, prob })
    }

    /// Product channel from three independent per-receiver kernels, each
    /// with rows indexed `x1 * |X2| + x2`.
    pub fn from_marginals(x1: usize, x2: usize, dest: &Kernel, user1: &Kernel, user2: &Kernel) -> Result<Self> {
        for k in [dest, user1, user2] {
            if k.rows() != x1 * x2 {
                return Err(Error::DimensionMismatch(format!(
                    "kernel has {} rows, expected {}",
                    k.rows(),
                    x1 * x2
                )));
            }
        }
        let sizes = Alphabets::new(x1, x2, dest.cols(), user1.cols(), user2.cols());
        let mut prob = Vec::with_capacity(sizes.table_len());
        for row in 0..x1 * x2 {
            for y in 0..sizes.y {
                for y1 in 0..sizes.y1 {
                    for y2 in 0..sizes.y2 {
                        prob.push(dest.get(row, y) * user1.get(row, y1) * user2.get(row, y2));
                    }
                }
            }
        }
        ChannelSpec::new(sizes, prob)
    }

    /// Random channel with Dirichlet(1) output blocks.
    pub fn random<R: Rng>(sizes: Alphabets, rng: &mut R) -> Self {
        let mut prob = Vec::with_capacity(sizes.table_len());
        for _ in 0..sizes.inputs() {
            let mut block: Vec<f64> = (0..sizes.outputs())
                .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                .collect();
            let total: f64 = block.iter().sum();
            block.iter_mut().for_each(|v| *v /= total);
            prob.extend(block);
        }
        ChannelSpec::new(sizes, prob).expect("normalized by construction")
    }

    /// A random modification of the joint output law that leaves all three
    /// per-receiver marginals untouched. Each move adds and subtracts mass on
    /// a 2x2 rectangle of output pairs while the third output is held fixed.
    pub fn perturb_preserving_marginals<R: Rng>(&self, rng: &mut R, moves: usize) -> ChannelSpec {
        let s = self.sizes;
        let mut prob = self.prob.clone();
        let idx = |x: usize, y: usize, y1: usize, y2: usize| {
            ((x * s.y + y) * s.y1 + y1) * s.y2 + y2
        };
        for _ in 0..moves {
            let x = rng.gen_range(0..s.inputs());
            // choose which pair of outputs forms the rectangle
            let axis = rng.gen_range(0..3);
            let (na, nb) = match axis {
                0 => (s.y, s.y2),
                1 => (s.y, s.y1),
                _ => (s.y1, s.y2),
            };
            if na < 2 || nb < 2 {
                continue;
            }
            let a0 = rng.gen_range(0..na);
            let a1 = (a0 + rng.gen_range(1..na)) % na;
            let b0 = rng.gen_range(0..nb);
            let b1 = (b0 + rng.gen_range(1..nb)) % nb;
            let fixed_n = match axis {
                0 => s.y1,
                1 => s.y2,
                _ => s.y,
            };
            let f = rng.gen_range(0..fixed_n);
            let at = |a: usize, b: usize| match axis {
                0 => idx(x, a, f, b),
                1 => idx(x, a, b, f),
                _ => idx(x, f, a, b),
            };
            let (p00, p11, p01, p10) = (at(a0, b0), at(a1, b1), at(a0, b1), at(a1, b0));
            let up = prob[p01].min(prob[p10]);
            let down = prob[p00].min(prob[p11]);
            let eps = rng.gen_range(-down..=up) * 0.9;
            prob[p00] += eps;
            prob[p11] += eps;
            prob[p01] -= eps;
            prob[p10] -= eps;
        }
        for v in &mut prob {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        ChannelSpec { sizes: s, prob }
    }

    /// Verdict on whether `Y2` is physically degraded with respect to `Y`.
    ///
    /// For each `(y, x2)` the candidate row `p(y2 | y, x2)` is read off the
    /// input `x1` with the largest `p(y | x1, x2)` (smallest index on ties),
    /// then every `x1` is checked against the product form. Rows with
    /// `p(y | x1, x2) = 0` for all `x1` are unconstrained and filled
    /// uniformly.
    pub fn check_physically_degraded(&self, tol: f64) -> DegradednessCertificate {
        let s = self.sizes;
        let dest = self.marginal_kernel(Receiver::Destination).table;
        let blocks: Vec<Vec<f64>> = (0..s.inputs())
            .map(|r| self.destination_wiretap_block(r / s.x2, r % s.x2))
            .collect();
        let mut witness = vec![0.0; s.y * s.x2 * s.y2];
        for y in 0..s.y {
            for x2 in 0..s.x2 {
                let row = y * s.x2 + x2;
                let best = (0..s.x1)
                    .map(|x1| (x1, dest.get(x1 * s.x2 + x2, y)))
                    .fold((0, 0.0), |acc, c| if c.1 > acc.1 { c } else { acc });
                let out = &mut witness[row * s.y2..(row + 1) * s.y2];
                if best.1 > 0.0 {
                    let block = &blocks[best.0 * s.x2 + x2];
                    for y2 in 0..s.y2 {
                        out[y2] = block[y * s.y2 + y2] / best.1;
                    }
                    let total: f64 = out.iter().sum();
                    out.iter_mut().for_each(|v| *v /= total);
                } else {
                    out.iter_mut().for_each(|v| *v = 1.0 / s.y2 as f64);
                }
            }
        }
        let mut residual: f64 = 0.0;
        for x1 in 0..s.x1 {
            for x2 in 0..s.x2 {
                let block = &blocks[x1 * s.x2 + x2];
                for y in 0..s.y {
                    let py = dest.get(x1 * s.x2 + x2, y);
                    for y2 in 0..s.y2 {
                        let k = witness[(y * s.x2 + x2) * s.y2 + y2];
                        residual = residual.max((block[y * s.y2 + y2] - py * k).abs());
                    }
                }
            }
        }
        let kernel = Kernel::new(s.y * s.x2, s.y2, witness).ok();
        if residual <= tol && kernel.is_some() {
            DegradednessCertificate {
                verdict: Verdict::PhysicallyDegraded,
                witness: kernel,
                residual,
            }
        } else {
            DegradednessCertificate {
                verdict: Verdict::NotDegraded,
                witness: None,
                residual,
            }
        }
    }

    /// Verdict on stochastic degradedness: does some `p(y2 | y, x2)` map the
    /// destination marginal onto the wiretapper marginal?
    ///
    /// Solved per `x2` as the LP `min t` subject to row-stochastic unknowns
    /// and `|sum_y p(y|x1,x2) k(y2|y,x2) - p(y2|x1,x2)| <= t`. The residual
    /// reported is recomputed from the returned kernel, so it is a true
    /// certificate in both outcomes.
    pub fn check_stochastically_degraded(&self, tol: f64) -> Result<DegradednessCertificate> {
        let s = self.sizes;
        let dest = self.marginal_kernel(Receiver::Destination).table;
        let tap = self.marginal_kernel(Receiver::User2).table;
        let mut witness = vec![0.0; s.y * s.x2 * s.y2];
        for x2 in 0..s.x2 {
            // variables: k[y][y2] then t
            let nk = s.y * s.y2;
            let mut objective = vec![0.0; nk + 1];
            objective[nk] = 1.0;
            let mut lp = DenseLp::nonnegative(objective, false);
            for y in 0..s.y {
                let mut c = vec![0.0; nk + 1];
                for y2 in 0..s.y2 {
                    c[y * s.y2 + y2] = 1.0;
                }
                lp.push(c, Sense::Eq, 1.0);
            }
            for x1 in 0..s.x1 {
                let row = x1 * s.x2 + x2;
                for y2 in 0..s.y2 {
                    let mut c = vec![0.0; nk + 1];
                    for y in 0..s.y {
                        c[y * s.y2 + y2] = dest.get(row, y);
                    }
                    let target = tap.get(row, y2);
                    let mut upper = c.clone();
                    upper[nk] = -1.0;
                    lp.push(upper, Sense::Le, target);
                    c[nk] = 1.0;
                    lp.push(c, Sense::Ge, target);
                }
            }
            let x = match lp.solve()? {
                LpOutcome::Optimal { x, .. } => x,
                other => {
                    return Err(Error::SolverStall(format!(
                        "degradedness LP for x2={x2} returned {other:?}"
                    )))
                }
            };
            for y in 0..s.y {
                let reachable = (0..s.x1).any(|x1| dest.get(x1 * s.x2 + x2, y) > 0.0);
                let out = &mut witness[(y * s.x2 + x2) * s.y2..(y * s.x2 + x2 + 1) * s.y2];
                if reachable {
                    for y2 in 0..s.y2 {
                        out[y2] = x[y * s.y2 + y2].max(0.0);
                    }
                    let total: f64 = out.iter().sum();
                    out.iter_mut().for_each(|v| *v /= total);
                } else {
                    out.iter_mut().for_each(|v| *v = 1.0 / s.y2 as f64);
                }
            }
        }
        let kernel = Kernel::new(s.y * s.x2, s.y2, witness)
            .map_err(|e| Error::SolverStall(format!("witness not stochastic: {e}")))?;
        let residual = cascade_residual(&dest, &tap, &kernel, s);
        let verdict = if residual <= tol {
            Verdict::StochasticallyDegraded
        } else {
            Verdict::NotDegraded
        };
        Ok(DegradednessCertificate {
            verdict,
            witness: verdict.is_degraded().then_some(kernel),
            residual,
        })
    }

    /// Physical test first, stochastic test when that fails.
    pub fn classify_degradedness(&self, tol: f64) -> Result<DegradednessCertificate> {
        let physical = self.check_physically_degraded(tol);
        if physical.verdict.is_degraded() {
            return Ok(physical);
        }
        self.check_stochastically_degraded(tol)
    }
}

/// `max |sum_y p(y|x) k(y2|y,x2) - p(y2|x)|` over all inputs and `y2`.
fn cascade_residual(dest: &Kernel, tap: &Kernel, kernel: &Kernel, s: Alphabets) -> f64 {
    let mut residual: f64 = 0.0;
    for x1 in 0..s.x1 {
        for x2 in 0..s.x2 {
            let row = x1 * s.x2 + x2;
            for y2 in 0..s.y2 {
                let v: f64 = (0..s.y)
                    .map(|y| dest.get(row, y) * kernel.get(y * s.x2 + x2, y2))
                    .sum();
                residual = residual.max((v - tap.get(row, y2)).abs());
            }
        }
    }
    residual
}

/// Checks shape, signs and per-input normalization of a raw table.
///
/// Rows whose sum deviates by at most `tol` are rescaled to sum to one (rows
/// that already sum to exactly one are left untouched); larger deviations
/// are rejected.
pub fn validate_channel(mut prob: Vec<f64>, sizes: Alphabets, tol: f64) -> Result<ChannelSpec> {
    let dims = [sizes.x1, sizes.x2, sizes.y, sizes.y1, sizes.y2];
    if dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "alphabet sizes must be positive, got {dims:?}"
        )));
    }
    if prob.len() != sizes.table_len() {
        return Err(Error::DimensionMismatch(format!(
            "table has {} entries, sizes {dims:?} need {}",
            prob.len(),
            sizes.table_len()
        )));
    }
    let block = sizes.outputs();
    for (r, row) in prob.chunks_mut(block).enumerate() {
        let (x1, x2) = (r / sizes.x2, r % sizes.x2);
        if let Some((i, &v)) = row.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::NegativeProbability {
                location: format!("(x1={x1}, x2={x2}) output {i}"),
                value: v,
            });
        }
        for (i, &v) in row.iter().enumerate() {
            if v > 1.0 + tol {
                return Err(Error::Invalid(format!(
                    "probability {v} above one at (x1={x1}, x2={x2}) output {i}"
                )));
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::RowSumViolation {
                row: format!("(x1={x1}, x2={x2})"),
                sum,
                tolerance: tol,
            });
        }
        if sum != 1.0 {
            row.iter_mut().for_each(|v| *v /= sum);
        }
    }
    Ok(ChannelSpec { sizes, prob })
}

/// Builds `p(y, y1, y2 | x1, x2) = main(y|x1,x2) side(y1|x1,x2) degrade(y2|y,x2)`.
///
/// `main` and `side` rows are indexed `x1 * x2_size + x2`; `degrade` rows are
/// indexed `y * x2_size + x2`. A missing `side` means `|Y1| = 1`.
pub fn compose_degraded_channel(
    x1_size: usize,
    x2_size: usize,
    main: &Kernel,
    degrade: &Kernel,
    side: Option<&Kernel>,
) -> Result<ChannelSpec> {
    let inputs = x1_size * x2_size;
    if main.rows() != inputs {
        return Err(Error::DimensionMismatch(format!(
            "main kernel has {} rows, expected {inputs}",
            main.rows()
        )));
    }
    if degrade.rows() != main.cols() * x2_size {
        return Err(Error::DimensionMismatch(format!(
            "degrade kernel has {} rows, expected |Y|*|X2| = {}",
            degrade.rows(),
            main.cols() * x2_size
        )));
    }
    let constant = Kernel::uniform(inputs, 1);
    let side = side.unwrap_or(&constant);
    if side.rows() != inputs {
        return Err(Error::DimensionMismatch(format!(
            "side kernel has {} rows, expected {inputs}",
            side.rows()
        )));
    }
    let sizes = Alphabets::new(x1_size, x2_size, main.cols(), side.cols(), degrade.cols());
    let mut prob = Vec::with_capacity(sizes.table_len());
    for x1 in 0..x1_size {
        for x2 in 0..x2_size {
            let row = x1 * x2_size + x2;
            for y in 0..sizes.y {
                for y1 in 0..sizes.y1 {
                    for y2 in 0..sizes.y2 {
                        prob.push(main.get(row, y) * side.get(row, y1) * degrade.get(y * x2_size + x2, y2));
                    }
                }
            }
        }
    }
    validate_channel(prob, sizes, VALIDATION_TOL)
}

/// On-disk channel document: sizes plus `p[x1][x2][y][y1][y2]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub x1: usize,
    pub x2: usize,
    pub y: usize,
    pub y1: usize,
    pub y2: usize,
    pub p: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
}

impl ChannelFile {
    pub fn into_spec(self) -> Result<ChannelSpec> {
        let sizes = Alphabets::new(self.x1, self.x2, self.y, self.y1, self.y2);
        let shape_err = |what: &str| {
            Error::DimensionMismatch(format!("nested array `p` has wrong length at {what}"))
        };
        if self.p.len() != sizes.x1 {
            return Err(shape_err("x1"));
        }
        let mut flat = Vec::with_capacity(sizes.table_len());
        for a in &self.p {
            if a.len() != sizes.x2 {
                return Err(shape_err("x2"));
            }
            for b in a {
                if b.len() != sizes.y {
                    return Err(shape_err("y"));
                }
                for c in b {
                    if c.len() != sizes.y1 {
                        return Err(shape_err("y1"));
                    }
                    for d in c {
                        if d.len() != sizes.y2 {
                            return Err(shape_err("y2"));
                        }
                        flat.extend_from_slice(d);
                    }
                }
            }
        }
        validate_channel(flat, sizes, FILE_ROW_TOL)
    }

    pub fn from_spec(spec: &ChannelSpec) -> Self {
        let s = spec.sizes();
        let p = (0..s.x1)
            .map(|x1| {
                (0..s.x2)
                    .map(|x2| {
                        (0..s.y)
                            .map(|y| {
                                (0..s.y1)
                                    .map(|y1| (0..s.y2).map(|y2| spec.p(x1, x2, y, y1, y2)).collect())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        ChannelFile {
            x1: s.x1,
            x2: s.x2,
            y: s.y,
            y1: s.y1,
            y2: s.y2,
            p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_table_is_accepted_unchanged() {
        let sizes = Alphabets::new(1, 1, 2, 1, 2);
        let raw = vec![0.5, 0.25, 0.125, 0.125];
        let spec = ChannelSpec::new(sizes, raw.clone()).unwrap();
        assert_eq!(spec.prob(), raw.as_slice());
    }

    #[test]
    fn slightly_off_row_is_renormalized() {
        let sizes = Alphabets::new(1, 1, 2, 1, 1);
        let spec = ChannelSpec::new(sizes, vec![0.5 + 1e-10, 0.5]).unwrap();
        let sum: f64 = spec.prob().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grossly_off_row_is_rejected() {
        let sizes = Alphabets::new(1, 1, 2, 1, 1);
        let err = ChannelSpec::new(sizes, vec![0.5, 0.4]).unwrap_err();
        assert!(matches!(err, Error::RowSumViolation { .. }));
        let err = ChannelSpec::new(sizes, vec![1.2, -0.2]).unwrap_err();
        assert!(matches!(err, Error::NegativeProbability { .. }));
        let err = ChannelSpec::new(sizes, vec![1.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn deterministic_destination_kernel_is_zero_one() {
        let k = fixtures::clean_mac().marginal_kernel(Receiver::Destination).table;
        for row in 0..4 {
            for col in 0..4 {
                assert_eq!(k.get(row, col), if row == col { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn uniform_channel_has_uniform_kernels() {
        let sizes = Alphabets::new(2, 2, 3, 2, 4);
        let n = sizes.outputs() as f64;
        let spec = ChannelSpec::new(sizes, vec![1.0 / n; sizes.table_len()]).unwrap();
        for (r, size) in [(Receiver::Destination, 3), (Receiver::User1, 2), (Receiver::User2, 4)] {
            let k = spec.marginal_kernel(r).table;
            assert!(k.data().iter().all(|&v| (v - 1.0 / size as f64).abs() < 1e-15));
        }
    }

    #[test]
    fn composed_channel_reproduces_its_main_factor() {
        let main = Kernel::from_rows(vec![
            vec![0.9, 0.1],
            vec![0.1, 0.9],
            vec![0.1, 0.9],
            vec![0.9, 0.1],
        ])
        .unwrap();
        let spec = fixtures::binary_degraded(0.1, 0.1);
        let k = spec.marginal_kernel(Receiver::Destination).table;
        assert!(k.max_abs_diff(&main).unwrap() < 1e-15);
    }

    #[test]
    fn cascade_flip_is_composed() {
        // p1(1-p2) + p2(1-p1) with p1 = p2 = 0.1
        let spec = fixtures::binary_degraded(0.1, 0.1);
        let k = spec.marginal_kernel(Receiver::User2).table;
        for x1 in 0..2 {
            for x2 in 0..2 {
                let row = x1 * 2 + x2;
                let flip = if (x1 ^ x2) == 0 { k.get(row, 1) } else { k.get(row, 0) };
                assert!((flip - 0.18).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn identity_factors_copy_inputs() {
        let spec = compose_degraded_channel(2, 2, &Kernel::identity(4), &Kernel::deterministic(&[0, 0, 1, 1, 2, 2, 3, 3], 4), None).unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let y = x1 * 2 + x2;
                assert_eq!(spec.p(x1, x2, y, 0, y), 1.0);
            }
        }
    }

    #[test]
    fn uniform_degrade_gives_independent_wiretap() {
        let spec = compose_degraded_channel(2, 1, &Kernel::bsc(0.2), &Kernel::uniform(2, 3), None).unwrap();
        let k = spec.marginal_kernel(Receiver::User2).table;
        assert!(k.data().iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn compose_rejects_mismatched_factors() {
        let err = compose_degraded_channel(2, 2, &Kernel::bsc(0.1), &Kernel::bsc(0.1), None).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn composed_channel_is_physically_degraded_with_its_factor() {
        let degrade = Kernel::from_rows(vec![
            vec![0.7, 0.2, 0.1],
            vec![0.3, 0.3, 0.4],
            vec![0.0, 0.5, 0.5],
            vec![0.6, 0.4, 0.0],
        ])
        .unwrap();
        let main = Kernel::from_rows(vec![vec![0.8, 0.2], vec![0.25, 0.75], vec![0.5, 0.5], vec![0.1, 0.9]]).unwrap();
        let spec = compose_degraded_channel(2, 2, &main, &degrade, None).unwrap();
        let cert = spec.check_physically_degraded(DEGRADED_TOL);
        assert_eq!(cert.verdict, Verdict::PhysicallyDegraded);
        assert!(cert.residual <= 1e-12);
        assert!(cert.witness.unwrap().max_abs_diff(&degrade).unwrap() < 1e-12);
    }

    #[test]
    fn copy_channel_has_identity_witness() {
        let cert = fixtures::y2_copy_of_y().check_physically_degraded(DEGRADED_TOL);
        assert_eq!(cert.verdict, Verdict::PhysicallyDegraded);
        let w = cert.witness.unwrap();
        // reachable rows (y, x2) with y = 2 x1 + x2 copy y to y2
        for y in 0..4 {
            for x2 in [y % 2] {
                for y2 in 0..4 {
                    assert_eq!(w.get(y * 2 + x2, y2), if y == y2 { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn noisy_destination_with_noiseless_wiretapper_is_not_degraded() {
        let spec = fixtures::noisy_main_clean_tap(0.1);
        assert_eq!(spec.check_physically_degraded(DEGRADED_TOL).verdict, Verdict::NotDegraded);
        let cert = spec.check_stochastically_degraded(DEGRADED_TOL).unwrap();
        assert_eq!(cert.verdict, Verdict::NotDegraded);
        assert!(cert.residual > 1e-3);
        assert!(cert.witness.is_none());
    }

    #[test]
    fn infeasibility_residual_matches_hand_bound() {
        // Y = X1 through BSC(0.1), Y2 = X1. Any k gives p(y2=0|x1=0) =
        // 0.9 k0 + 0.1 k1 and p(y2=0|x1=1) = 0.1 k0 + 0.9 k1 with k in [0,1];
        // the minimax residual against targets (1, 0) is 0.1.
        let cert = fixtures::noisy_main_clean_tap(0.1).check_stochastically_degraded(DEGRADED_TOL).unwrap();
        assert!((cert.residual - 0.1).abs() < 1e-9, "{}", cert.residual);
    }

    #[test]
    fn physically_degraded_implies_stochastic() {
        let spec = fixtures::binary_degraded(0.1, 0.2);
        let cert = spec.check_stochastically_degraded(DEGRADED_TOL).unwrap();
        assert_eq!(cert.verdict, Verdict::StochasticallyDegraded);
        assert!(cert.residual <= DEGRADED_TOL);
    }

    #[test]
    fn independent_copy_is_only_stochastically_degraded() {
        let spec = fixtures::identity_copy(0.1);
        assert_eq!(spec.check_physically_degraded(DEGRADED_TOL).verdict, Verdict::NotDegraded);
        let cert = spec.check_stochastically_degraded(DEGRADED_TOL).unwrap();
        assert_eq!(cert.verdict, Verdict::StochasticallyDegraded);
        let w = cert.witness.unwrap();
        assert!(w.max_abs_diff(&Kernel::identity(2).repeat_rows(2)).unwrap() < 1e-9);
    }

    #[test]
    fn relabeled_wiretap_is_degraded_through_the_permutation() {
        // Y2 is Y with symbols swapped, independent of x2.
        let perm = Kernel::deterministic(&[1, 1, 0, 0], 2);
        let spec = compose_degraded_channel(2, 2, &Kernel::from_rows(vec![
            vec![0.9, 0.1], vec![0.3, 0.7], vec![0.6, 0.4], vec![0.2, 0.8],
        ]).unwrap(), &perm, None).unwrap();
        let spec = ChannelSpec::from_marginals(
            2,
            2,
            &spec.marginal_kernel(Receiver::Destination).table,
            &Kernel::uniform(4, 1),
            &spec.marginal_kernel(Receiver::User2).table,
        )
        .unwrap();
        let cert = spec.check_stochastically_degraded(DEGRADED_TOL).unwrap();
        assert_eq!(cert.verdict, Verdict::StochasticallyDegraded);
        assert!(cert.witness.unwrap().max_abs_diff(&perm).unwrap() < 1e-9);
    }

    #[test]
    fn perturbation_preserves_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let spec = ChannelSpec::random(Alphabets::new(2, 2, 3, 2, 3), &mut rng);
        let moved = spec.perturb_preserving_marginals(&mut rng, 200);
        assert!(spec.prob().iter().zip(moved.prob()).any(|(a, b)| (a - b).abs() > 1e-6));
        for r in [Receiver::Destination, Receiver::User1, Receiver::User2] {
            let a = spec.marginal_kernel(r).table;
            let b = moved.marginal_kernel(r).table;
            assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn swapping_users_twice_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = ChannelSpec::random(Alphabets::new(2, 3, 2, 2, 3), &mut rng);
        assert_eq!(spec.swap_users().swap_users(), spec);
    }

    #[test]
    fn channel_file_round_trip_and_strict_sums() {
        let spec = fixtures::binary_degraded(0.1, 0.1);
        let file = ChannelFile::from_spec(&spec);
        let text = serde_json::to_string(&file).unwrap();
        let back: ChannelFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_spec().unwrap(), spec);

        let mut file = ChannelFile::from_spec(&spec);
        file.p[0][0][0][0][0] += 1e-8;
        assert!(matches!(file.into_spec(), Err(Error::RowSumViolation { .. })));
    }
}
