//! Rate regions as unions of polytopes over named coordinates, with the
//! convex hull of the union kept as a point cloud.

mod polytope;
mod split;

pub use polytope::{Constraint, RatePolytope, FEAS_TOL};
pub use split::{clip_plus_split, PlusConstraint, PolytopeTemplate};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{DenseLp, LpOutcome, Sense};
use polytope::dot;

/// Points closer than this (max norm) are the same point.
pub const DEDUP_TOL: f64 = 1e-9;

/// Frontier samples closer than this in both plane coordinates are merged.
pub const FRONTIER_MERGE_TOL: f64 = 1e-7;

/// Per-piece vertex limit.
pub const MAX_VERTICES: usize = 100_000;

/// Limit on candidate bases tried per piece.
pub(crate) const MAX_VERTEX_CANDIDATES: usize = 20_000_000;

/// Extreme point of a convexified region and the piece it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullPoint {
    pub coords: Vec<f64>,
    pub piece: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Pieces dropped because their constraints were infeasible.
    pub dropped_empty: usize,
    /// Pieces dropped by [`RateRegion::prune_dominated`].
    pub dropped_dominated: usize,
    pub warnings: Vec<String>,
}

/// A union of polytopes, optionally with its convex hull.
///
/// `provenance[i]` names the scheme (by position in the producing stream)
/// behind `pieces[i]`.
#[derive(Clone, Debug, Serialize)]
pub struct RateRegion {
    coords: Vec<String>,
    pieces: Vec<RatePolytope>,
    provenance: Vec<usize>,
    hull: Option<Vec<HullPoint>>,
    pub diagnostics: Diagnostics,
}

/// One frontier sample together with the pieces that realize it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub plane: [f64; 2],
    /// Full coordinate vector of the realizing point.
    pub point: Vec<f64>,
    /// `(weight, piece)` pairs; a single pair when no hull is used.
    pub support: Vec<(f64, usize)>,
}

impl RateRegion {
    /// Union of pieces; empty pieces are dropped and counted.
    pub fn from_pieces<S: AsRef<str>>(coords: &[S], pieces: Vec<RatePolytope>, provenance: Vec<usize>) -> Result<Self> {
        let coords: Vec<String> = coords.iter().map(|s| s.as_ref().to_string()).collect();
        if provenance.len() != pieces.len() {
            return Err(Error::DimensionMismatch("one provenance entry per piece".into()));
        }
        let mut region = Self {
            coords,
            pieces: Vec::new(),
            provenance: Vec::new(),
            hull: None,
            diagnostics: Diagnostics::default(),
        };
        for (p, src) in pieces.into_iter().zip(provenance) {
            region.push(p, src)?;
        }
        Ok(region)
    }

    pub fn empty<S: AsRef<str>>(coords: &[S]) -> Self {
        Self::from_pieces(coords, Vec::new(), Vec::new()).expect("no pieces to check")
    }

    /// Adds one piece; invalidates any cached hull.
    pub fn push(&mut self, piece: RatePolytope, source: usize) -> Result<()> {
        if piece.coords() != self.coords.as_slice() {
            return Err(Error::DimensionMismatch(format!(
                "piece over {:?} added to region over {:?}",
                piece.coords(),
                self.coords
            )));
        }
        self.hull = None;
        if piece.is_empty()? {
            self.diagnostics.dropped_empty += 1;
        } else {
            self.pieces.push(piece);
            self.provenance.push(source);
        }
        Ok(())
    }

    /// Attributes every piece to one source.
    pub fn with_source(mut self, source: usize) -> Self {
        self.provenance.iter_mut().for_each(|p| *p = source);
        self
    }

    pub fn extend(&mut self, other: RateRegion) -> Result<()> {
        self.diagnostics.dropped_empty += other.diagnostics.dropped_empty;
        self.diagnostics.warnings.extend(other.diagnostics.warnings);
        for (p, s) in other.pieces.into_iter().zip(other.provenance) {
            self.push(p, s)?;
        }
        Ok(())
    }

    /// Drops every piece contained in another piece with the same label and
    /// the same constraint coefficients, i.e. whose bounds are componentwise
    /// no larger. The union is unchanged; among equal pieces the earliest is
    /// kept. Clears any cached hull.
    pub fn prune_dominated(mut self) -> Self {
        let mut groups: BTreeMap<(&str, Vec<u64>), Vec<usize>> = BTreeMap::new();
        for (k, p) in self.pieces.iter().enumerate() {
            // adding 0.0 maps -0.0 to 0.0
            let key = p
                .constraints()
                .iter()
                .flat_map(|c| c.coeffs.iter().map(|v| (v + 0.0).to_bits()))
                .collect();
            groups.entry((p.label(), key)).or_default().push(k);
        }
        let bounds = |k: usize| -> Vec<f64> { self.pieces[k].constraints().iter().map(|c| c.bound).collect() };
        let groups: Vec<Vec<usize>> = groups.into_values().collect();
        let mut keep: Vec<usize> = groups
            .par_iter()
            .flat_map_iter(|members| {
                let mut order: Vec<(f64, usize, Vec<f64>)> =
                    members.iter().map(|&k| (bounds(k).iter().sum(), k, bounds(k))).collect();
                order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                let mut kept: Vec<(usize, Vec<f64>)> = Vec::new();
                for (_, k, b) in order {
                    let covered = kept.iter().any(|(_, c)| c.iter().zip(&b).all(|(x, y)| x >= y));
                    if !covered {
                        kept.push((k, b));
                    }
                }
                kept.into_iter().map(|(k, _)| k)
            })
            .collect();
        keep.sort_unstable();
        self.diagnostics.dropped_dominated += self.pieces.len() - keep.len();
        let mut pieces = std::mem::take(&mut self.pieces).into_iter().map(Some).collect::<Vec<_>>();
        self.pieces = keep.iter().map(|&k| pieces[k].take().expect("kept once")).collect();
        self.provenance = keep.iter().map(|&k| self.provenance[k]).collect();
        self.hull = None;
        self
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn coord_index(&self, name: &str) -> Result<usize> {
        self.coords
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn pieces(&self) -> &[RatePolytope] {
        &self.pieces
    }

    pub fn provenance(&self) -> &[usize] {
        &self.provenance
    }

    pub fn hull(&self) -> Option<&[HullPoint]> {
        self.hull.as_deref()
    }

    pub fn is_convexified(&self) -> bool {
        self.hull.is_some()
    }

    fn check_dim(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.coords.len() {
            return Err(Error::DimensionMismatch(format!(
                "{what} has {} coordinates, region has {}",
                v.len(),
                self.coords.len()
            )));
        }
        Ok(())
    }

    /// Membership: in some piece, or within `tol` (L1) of the hull once
    /// convexified.
    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(point, "point")?;
        match &self.hull {
            Some(h) => Ok(hull_distance(h, point)? <= tol),
            None => {
                for p in &self.pieces {
                    if p.contains(point, tol)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// `max direction · x` over the region (equal for the union and its hull).
    pub fn support(&self, direction: &[f64]) -> Result<f64> {
        self.check_dim(direction, "direction")?;
        if direction.iter().all(|&v| v == 0.0) {
            return Err(Error::Invalid("support direction must be nonzero".into()));
        }
        let mut best: Option<f64> = None;
        if self.pieces.is_empty() {
            if let Some(h) = &self.hull {
                best = h.iter().map(|p| dot(direction, &p.coords)).reduce(f64::max);
            }
        } else {
            let values: Vec<Option<f64>> = self
                .pieces
                .par_iter()
                .map(|p| p.support(direction))
                .collect::<Result<_>>()?;
            best = values.into_iter().flatten().reduce(f64::max);
        }
        best.ok_or(Error::EmptyRegion)
    }

    /// Caches the convex hull of the union.
    pub fn convexify(mut self) -> Result<Self> {
        let per_piece: Vec<Vec<Vec<f64>>> = self.pieces.par_iter().map(|p| p.vertices()).collect::<Result<_>>()?;
        let mut cloud: Vec<HullPoint> = per_piece
            .into_iter()
            .enumerate()
            .flat_map(|(piece, vs)| vs.into_iter().map(move |coords| HullPoint { coords, piece }))
            .collect();
        if cloud.is_empty() {
            return Err(Error::EmptyRegion);
        }
        cloud.sort_by(|a, b| cmp_points(&a.coords, &b.coords).then(a.piece.cmp(&b.piece)));
        let cloud = dedup_hull_points(cloud);
        self.hull = Some(prune_interior(cloud)?);
        Ok(self)
    }

    /// Pareto frontier of the 2-D slice through `fixed` in the `plane`
    /// coordinates, swept by directions `(cos t, sin t)`, `t` in `[0, pi/2]`.
    ///
    /// Coordinates neither in the plane nor fixed are projected out. On a
    /// convexified region the slice is taken through the hull.
    pub fn frontier(&self, plane: (&str, &str), fixed: &[(&str, f64)], resolution: usize) -> Result<Vec<FrontierPoint>> {
        if resolution < 2 {
            return Err(Error::Invalid("frontier resolution must be at least 2".into()));
        }
        let (i, j) = (self.coord_index(plane.0)?, self.coord_index(plane.1)?);
        if i == j {
            return Err(Error::Invalid("plane needs two distinct coordinates".into()));
        }
        let fixed: Vec<(usize, f64)> = fixed
            .iter()
            .map(|(n, v)| Ok((self.coord_index(n)?, *v)))
            .collect::<Result<_>>()?;
        if fixed.iter().any(|&(k, _)| k == i || k == j) {
            return Err(Error::Invalid("a plane coordinate cannot also be fixed".into()));
        }
        let d = self.coords.len();
        let thetas: Vec<f64> = (0..resolution)
            .map(|k| std::f64::consts::FRAC_PI_2 * k as f64 / (resolution - 1) as f64)
            .collect();
        let samples: Vec<Option<FrontierPoint>> = thetas
            .par_iter()
            .enumerate()
            .map(|(k, &t)| {
                let (c, s) = if k == 0 {
                    (1.0, 0.0)
                } else if k == resolution - 1 {
                    (0.0, 1.0)
                } else {
                    (t.cos(), t.sin())
                };
                let mut primary = vec![0.0; d];
                primary[i] = c;
                primary[j] = s;
                // among maximizers: lowest other coordinate on the axes,
                // otherwise the largest first coordinate
                let (secondary, maximize) = if k == 0 {
                    (unit(d, j), false)
                } else if k == resolution - 1 {
                    (unit(d, i), false)
                } else {
                    (unit(d, i), true)
                };
                match &self.hull {
                    Some(h) => hull_extreme(h, &primary, &secondary, maximize, &fixed),
                    None => self.pieces_extreme(&primary, &secondary, maximize, &fixed),
                }
            })
            .collect::<Result<_>>()?;
        let mut points: Vec<FrontierPoint> = samples.into_iter().flatten().collect();
        if points.is_empty() {
            return Err(Error::EmptySlice);
        }
        for p in &mut points {
            for v in &mut p.point {
                *v = clean(*v);
            }
            p.plane = [p.point[i], p.point[j]];
        }
        Ok(pareto_filter(points))
    }

    fn pieces_extreme(
        &self,
        primary: &[f64],
        secondary: &[f64],
        maximize: bool,
        fixed: &[(usize, f64)],
    ) -> Result<Option<FrontierPoint>> {
        let mut best: Option<(f64, usize)> = None;
        for (k, p) in self.pieces.iter().enumerate() {
            if let Some((v, _)) = p.optimize(primary, true, fixed)? {
                if best.is_none_or(|(b, _)| v > b + 1e-12) {
                    best = Some((v, k));
                }
            }
        }
        let Some((value, k)) = best else { return Ok(None) };
        let piece = &self.pieces[k];
        let mut constraints = piece.constraints().to_vec();
        constraints.push(Constraint::new(primary.iter().map(|v| -v).collect(), -(value - 1e-10)));
        let tied = RatePolytope::new(piece.coords(), constraints)?;
        let x = match tied.optimize(secondary, maximize, fixed)? {
            Some((_, x)) => x,
            None => piece.optimize(primary, true, fixed)?.map(|(_, x)| x).unwrap_or_default(),
        };
        Ok(Some(FrontierPoint {
            plane: [0.0, 0.0],
            point: x,
            support: vec![(1.0, k)],
        }))
    }
}

/// Convex hull of the union of `pieces`.
pub fn convexify(pieces: Vec<RatePolytope>) -> Result<RateRegion> {
    let coords: Vec<String> = match pieces.first() {
        Some(p) => p.coords().to_vec(),
        None => return Err(Error::EmptyRegion),
    };
    let n = pieces.len();
    RateRegion::from_pieces(&coords, pieces, (0..n).collect())?.convexify()
}

fn unit(d: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[k] = 1.0;
    e
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-12 {
        0.0
    } else {
        v
    }
}

fn cmp_points(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= DEDUP_TOL)
}

/// Sorts and removes near-duplicates, keeping the first of each cluster.
pub(crate) fn dedup_points(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| cmp_points(a, b));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        let dup = out
            .iter()
            .rev()
            .take_while(|q| q[0] >= p[0] - DEDUP_TOL)
            .any(|q| close(q, &p));
        if !dup {
            out.push(p);
        }
    }
    out
}

fn dedup_hull_points(sorted: Vec<HullPoint>) -> Vec<HullPoint> {
    let mut out: Vec<HullPoint> = Vec::with_capacity(sorted.len());
    for p in sorted {
        let dup = out
            .iter()
            .rev()
            .take_while(|q| q.coords[0] >= p.coords[0] - DEDUP_TOL)
            .any(|q| close(&q.coords, &p.coords));
        if !dup {
            out.push(p);
        }
    }
    out
}

/// L1 distance from `point` to the convex hull of `hull`.
fn hull_distance(hull: &[HullPoint], point: &[f64]) -> Result<f64> {
    let n = hull.len();
    let d = point.len();
    let mut objective = vec![0.0; n + 2 * d];
    objective[n..].iter_mut().for_each(|v| *v = 1.0);
    let mut lp = DenseLp::nonnegative(objective, false);
    let mut sum = vec![0.0; n + 2 * d];
    sum[..n].iter_mut().for_each(|v| *v = 1.0);
    lp.push(sum, Sense::Eq, 1.0);
    for k in 0..d {
        let mut row: Vec<f64> = hull.iter().map(|h| h.coords[k]).collect();
        row.extend((0..2 * d).map(|m| {
            if m == k {
                1.0
            } else if m == d + k {
                -1.0
            } else {
                0.0
            }
        }));
        lp.push(row, Sense::Eq, point[k]);
    }
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(value.max(0.0)),
        other => Err(Error::Internal(format!("hull distance LP returned {other:?}"))),
    }
}

/// Keeps a subset of points with the same convex hull.
fn prune_interior(cloud: Vec<HullPoint>) -> Result<Vec<HullPoint>> {
    let d = cloud[0].coords.len();
    if cloud.len() <= d + 1 {
        return Ok(cloud);
    }
    // seed with maximizers over all directions in {-1, 0, 1}^d
    let mut keep = vec![false; cloud.len()];
    let mut dir = vec![-1i32; d];
    loop {
        if dir.iter().any(|&v| v != 0) {
            let df: Vec<f64> = dir.iter().map(|&v| v as f64).collect();
            let mut best = 0;
            let mut best_v = f64::NEG_INFINITY;
            for (k, p) in cloud.iter().enumerate() {
                let v = dot(&df, &p.coords);
                if v > best_v + 1e-12 {
                    best = k;
                    best_v = v;
                }
            }
            keep[best] = true;
        }
        let mut pos = 0;
        while pos < d && dir[pos] == 1 {
            dir[pos] = -1;
            pos += 1;
        }
        if pos == d {
            break;
        }
        dir[pos] += 1;
    }
    let seeds: Vec<HullPoint> = cloud.iter().zip(&keep).filter(|(_, &k)| k).map(|(p, _)| p.clone()).collect();
    // everything outside the seed hull is a candidate; the candidates plus
    // the seeds span the full hull
    let outside: Vec<bool> = cloud
        .par_iter()
        .zip(keep.par_iter())
        .map(|(p, &k)| Ok(!k && hull_distance(&seeds, &p.coords)? > FEAS_TOL))
        .collect::<Result<_>>()?;
    let candidates: Vec<HullPoint> = cloud
        .iter()
        .zip(keep.iter().zip(&outside))
        .filter(|(_, (&k, &o))| k || o)
        .map(|(p, _)| p.clone())
        .collect();
    // a point inside the hull of the others is not extreme, and dropping
    // every non-extreme point at once keeps the hull
    let extreme: Vec<bool> = (0..candidates.len())
        .into_par_iter()
        .map(|k| {
            if candidates.len() <= d + 1 {
                return Ok(true);
            }
            let others: Vec<HullPoint> = candidates
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, p)| p.clone())
                .collect();
            Ok(hull_distance(&others, &candidates[k].coords)? > FEAS_TOL)
        })
        .collect::<Result<_>>()?;
    let mut kept: Vec<HullPoint> = candidates
        .into_iter()
        .zip(extreme)
        .filter(|(_, e)| *e)
        .map(|(p, _)| p)
        .collect();
    kept.sort_by(|a, b| cmp_points(&a.coords, &b.coords).then(a.piece.cmp(&b.piece)));
    Ok(kept)
}

/// Lexicographic LP optimum over the hull slice.
fn hull_extreme(
    hull: &[HullPoint],
    primary: &[f64],
    secondary: &[f64],
    maximize: bool,
    fixed: &[(usize, f64)],
) -> Result<Option<FrontierPoint>> {
    let n = hull.len();
    let proj = |dir: &[f64]| -> Vec<f64> { hull.iter().map(|h| dot(dir, &h.coords)).collect() };
    let base = || {
        let mut lp = DenseLp::nonnegative(proj(primary), true);
        lp.push(vec![1.0; n], Sense::Eq, 1.0);
        for &(k, v) in fixed {
            lp.push(hull.iter().map(|h| h.coords[k]).collect(), Sense::Eq, v);
        }
        lp
    };
    let first = base();
    let value = match first.solve()? {
        LpOutcome::Optimal { value, .. } => value,
        LpOutcome::Infeasible => return Ok(None),
        LpOutcome::Unbounded => return Err(Error::Internal("hull LP unbounded".into())),
    };
    let mut second = base();
    second.maximize = maximize;
    second.objective = proj(secondary);
    second.push(proj(primary), Sense::Ge, value - 1e-10);
    let lambda = match second.solve()? {
        LpOutcome::Optimal { x, .. } => x,
        _ => match first.solve()? {
            LpOutcome::Optimal { x, .. } => x,
            _ => return Err(Error::Internal("hull LP lost feasibility".into())),
        },
    };
    let d = primary.len();
    let mut point = vec![0.0; d];
    let mut support = Vec::new();
    for (h, &w) in hull.iter().zip(&lambda) {
        if w > 1e-12 {
            for k in 0..d {
                point[k] += w * h.coords[k];
            }
            support.push((w, h.piece));
        }
    }
    Ok(Some(FrontierPoint {
        plane: [0.0, 0.0],
        point,
        support,
    }))
}

/// Drops points strictly dominated in both plane coordinates, sorts by the
/// first coordinate (then the second, descending) and deduplicates.
fn pareto_filter(points: Vec<FrontierPoint>) -> Vec<FrontierPoint> {
    let dominated = |p: &FrontierPoint| {
        points
            .iter()
            .any(|q| q.plane[0] > p.plane[0] + DEDUP_TOL && q.plane[1] > p.plane[1] + DEDUP_TOL)
    };
    let mut kept: Vec<FrontierPoint> = points.iter().filter(|p| !dominated(p)).cloned().collect();
    kept.sort_by(|a, b| a.plane[0].total_cmp(&b.plane[0]).then(b.plane[1].total_cmp(&a.plane[1])));
    let mut out: Vec<FrontierPoint> = Vec::with_capacity(kept.len());
    for p in kept {
        // tie constraints leave ~1e-9 of LP slack, so use a looser test here
        let near = |q: &FrontierPoint| q.plane.iter().zip(&p.plane).all(|(x, y)| (x - y).abs() <= FRONTIER_MERGE_TOL);
        if out.last().is_none_or(|q| !near(q)) {
            out.push(p);
        }
    }
    out
}

/// Decimal rendering with `digits` significant digits, trailing zeros
/// trimmed.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0".into() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), v);
    // the exponent after rounding decides the decimal places
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let places = (digits as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{:.*}", places, v);
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Frontier CSV: header naming the plane, one row per point.
pub fn frontier_csv(plane: (&str, &str), points: &[FrontierPoint]) -> String {
    let mut out = format!("{},{}\n", plane.0, plane.1);
    for p in points {
        out.push_str(&format!("{},{}\n", format_sig(p.plane[0], 9), format_sig(p.plane[1], 9)));
    }
    out
}
