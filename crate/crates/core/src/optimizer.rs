//! Search over auxiliary distributions: region assembly and secrecy
//! capacity maximization.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Alphabets, ChannelSpec};
use crate::error::{Error, Result};
use crate::infotheory::{AnyScheme, SchemeKind, SchemeShape};
use crate::one_set_bounds::{
    degraded_polytope_unchecked, degraded_secrecy_capacity_value, flag_if_not_degraded, inner_polytope,
    outer_polytope, secrecy_capacity_value, secrecy_polytope,
};
use crate::prob::project_simplex;
use crate::regions::RateRegion;
use crate::two_set_bounds::{secrecy_inner_pieces, two_set_region_piece};

/// Largest grid `enumerate_schemes_grid` will walk.
pub const GRID_LIMIT: f64 = 1e8;

/// Schemes evaluated per parallel batch.
const BATCH: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "grid")]
    Grid,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "random+refine")]
    RandomRefine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// `[|Q|, |U|, |V|]`
    pub cardinalities: [usize; 3],
    pub strategy: Strategy,
    /// Points per simplex axis.
    pub grid_resolution: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub refine_iterations: usize,
    pub refine_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            cardinalities: [1, 2, 2],
            strategy: Strategy::Grid,
            grid_resolution: 5,
            sample_count: 200,
            seed: 0,
            refine_iterations: 50,
            refine_step: 0.1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cardinalities.contains(&0) {
            return Err(Error::Invalid("cardinalities must be at least 1".into()));
        }
        if self.grid_resolution < 2 {
            return Err(Error::Invalid("grid_resolution must be at least 2".into()));
        }
        if self.sample_count == 0 {
            return Err(Error::Invalid("sample_count must be at least 1".into()));
        }
        if !(self.refine_step.is_finite() && self.refine_step > 0.0) {
            return Err(Error::Invalid("refine_step must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }
}

/// Which per-scheme region a search assembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    InnerOneSet,
    OuterOneSet,
    SecrecyOneSet,
    Degraded,
    TwoSet,
    SecrecyTwoSet,
}

impl Bound {
    pub const ALL: [Bound; 6] = [
        Bound::InnerOneSet,
        Bound::OuterOneSet,
        Bound::SecrecyOneSet,
        Bound::Degraded,
        Bound::TwoSet,
        Bound::SecrecyTwoSet,
    ];

    /// Short name used on the command line.
    pub fn short_name(&self) -> &'static str {
        match self {
            Bound::InnerOneSet => "inner1",
            Bound::OuterOneSet => "outer1",
            Bound::SecrecyOneSet => "secrecy1",
            Bound::Degraded => "degraded",
            Bound::TwoSet => "two-set",
            Bound::SecrecyTwoSet => "secrecy2",
        }
    }

    pub fn long_name(&self) -> &'static str {
        match self {
            Bound::InnerOneSet => "inner-one-set",
            Bound::OuterOneSet => "outer-one-set",
            Bound::SecrecyOneSet => "secrecy-one-set",
            Bound::Degraded => "degraded",
            Bound::TwoSet => "two-set",
            Bound::SecrecyTwoSet => "secrecy-two-set",
        }
    }

    pub fn scheme_kind(&self) -> SchemeKind {
        match self {
            Bound::InnerOneSet | Bound::SecrecyOneSet => SchemeKind::OneSet,
            Bound::OuterOneSet => SchemeKind::OneSetOuter,
            Bound::Degraded => SchemeKind::Degraded,
            Bound::TwoSet | Bound::SecrecyTwoSet => SchemeKind::TwoSet,
        }
    }

    pub fn coords(&self) -> &'static [&'static str] {
        match self {
            Bound::InnerOneSet | Bound::OuterOneSet | Bound::Degraded => &crate::one_set_bounds::EQUIVOCATION_COORDS,
            Bound::SecrecyOneSet => &crate::one_set_bounds::SECRECY_COORDS,
            Bound::TwoSet => &crate::two_set_bounds::REGION_COORDS,
            Bound::SecrecyTwoSet => &crate::two_set_bounds::RATE_COORDS,
        }
    }

    /// Whether assembled regions are convexified. The five-dimensional
    /// region stays a piece list.
    pub fn convexifies(&self) -> bool {
        !matches!(self, Bound::TwoSet)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Bound::ALL
            .into_iter()
            .find(|b| b.short_name() == s || b.long_name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown bound `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    General,
    Degraded,
}

/// Largest `(|Q|, |U|, |V|)` accepted for a scheme family.
///
/// `V` and the two-set family have no bound of their own and reuse the
/// one-set ceilings.
pub fn cardinality_ceilings(kind: SchemeKind, sizes: Alphabets) -> [usize; 3] {
    let n = sizes.x1 * sizes.x2;
    let u = n * n + 4 * n + 3;
    match kind {
        SchemeKind::Degraded => [n + 1, 1, 1],
        _ => [n + 3, u, u],
    }
}

/// Scheme layout for `kind` on `sizes` with the configured cardinalities.
pub fn scheme_shape(kind: SchemeKind, sizes: Alphabets, config: &SearchConfig) -> Result<SchemeShape> {
    let [q, u, v] = config.cardinalities;
    let (u, v) = match kind {
        SchemeKind::OneSet => (u, 1),
        SchemeKind::OneSetOuter | SchemeKind::TwoSet => (u, v),
        SchemeKind::Degraded => (1, 1),
    };
    let ceil = cardinality_ceilings(kind, sizes);
    for ((name, got), max) in ["|Q|", "|U|", "|V|"].iter().zip([q, u, v]).zip(ceil) {
        if got > max {
            return Err(Error::Invalid(format!("{name} = {got} exceeds the ceiling {max} for this channel")));
        }
    }
    Ok(SchemeShape {
        kind,
        q,
        u,
        v,
        x1: sizes.x1,
        x2: sizes.x2,
    })
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of schemes on the grid of `shape` at `resolution`.
pub fn grid_count(shape: &SchemeShape, resolution: usize) -> f64 {
    let m = resolution.saturating_sub(1);
    shape
        .block_sizes()
        .iter()
        .map(|&n| binomial_f64(m + n - 1, n - 1).round())
        .product()
}

/// Points of the simplex of size `n` whose entries are multiples of
/// `1 / (resolution - 1)`, in lexicographic order.
pub fn simplex_grid(n: usize, resolution: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(n - 1, left - k, prefix, out);
            prefix.pop();
        }
    }
    let m = resolution - 1;
    let mut raw = Vec::new();
    rec(n, m, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|ks| ks.into_iter().map(|k| k as f64 / m as f64).collect())
        .collect()
}

/// Odometer over per-block simplex grids, last block fastest.
pub struct GridSchemes {
    shape: SchemeShape,
    grids: Vec<Vec<Vec<f64>>>,
    counter: Vec<usize>,
    done: bool,
}

impl Iterator for GridSchemes {
    type Item = Result<AnyScheme>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let blocks: Vec<Vec<f64>> = self.counter.iter().zip(&self.grids).map(|(&i, g)| g[i].clone()).collect();
        let mut pos = self.counter.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counter[pos] += 1;
            if self.counter[pos] < self.grids[pos].len() {
                break;
            }
            self.counter[pos] = 0;
        }
        Some(AnyScheme::from_blocks(&self.shape, &blocks))
    }
}

pub fn enumerate_schemes_grid(shape: &SchemeShape, resolution: usize) -> Result<GridSchemes> {
    if resolution < 2 {
        return Err(Error::Invalid("grid resolution must be at least 2".into()));
    }
    let count = grid_count(shape, resolution);
    if count > GRID_LIMIT {
        return Err(Error::GridTooLarge {
            count,
            limit: GRID_LIMIT,
        });
    }
    let sizes = shape.block_sizes();
    let mut cache: Vec<(usize, Vec<Vec<f64>>)> = Vec::new();
    let grids = sizes
        .iter()
        .map(|&n| {
            if let Some((_, g)) = cache.iter().find(|(m, _)| *m == n) {
                return g.clone();
            }
            let g = simplex_grid(n, resolution);
            cache.push((n, g.clone()));
            g
        })
        .collect();
    Ok(GridSchemes {
        shape: *shape,
        grids,
        counter: vec![0; sizes.len()],
        done: false,
    })
}

/// Schemes drawn with flat density on every simplex.
pub struct RandomSchemes {
    shape: SchemeShape,
    sizes: Vec<usize>,
    rng: ChaCha8Rng,
    remaining: usize,
}

impl Iterator for RandomSchemes {
    type Item = Result<AnyScheme>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let rng = &mut self.rng;
        let blocks: Vec<Vec<f64>> = self
            .sizes
            .iter()
            .map(|&n| {
                // normalized exponentials are uniform on the simplex
                let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                let total: f64 = w.iter().sum();
                w.into_iter().map(|x| x / total).collect()
            })
            .collect();
        Some(AnyScheme::from_blocks(&self.shape, &blocks))
    }
}

pub fn sample_schemes_random(shape: &SchemeShape, count: usize, seed: u64) -> Result<RandomSchemes> {
    if count == 0 {
        return Err(Error::Invalid("sample count must be at least 1".into()));
    }
    Ok(RandomSchemes {
        shape: *shape,
        sizes: shape.block_sizes(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        remaining: count,
    })
}

fn cmp_blocks(a: &[Vec<f64>], b: &[Vec<f64>]) -> Ordering {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Best scheme of a search and how many schemes were evaluated.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub value: f64,
    pub scheme: AnyScheme,
    pub evaluated: usize,
}

struct Best {
    value: f64,
    blocks: Vec<Vec<f64>>,
    scheme: AnyScheme,
}

impl Best {
    fn offer(slot: &mut Option<Best>, value: f64, scheme: AnyScheme) {
        let blocks = scheme.to_blocks();
        let better = match slot {
            None => true,
            Some(b) => value > b.value || (value == b.value && cmp_blocks(&blocks, &b.blocks) == Ordering::Less),
        };
        if better {
            *slot = Some(Best { value, blocks, scheme });
        }
    }
}

fn schemes(shape: &SchemeShape, config: &SearchConfig) -> Result<Box<dyn Iterator<Item = Result<AnyScheme>>>> {
    Ok(match config.strategy {
        Strategy::Grid => Box::new(enumerate_schemes_grid(shape, config.grid_resolution)?),
        Strategy::Random | Strategy::RandomRefine => {
            Box::new(sample_schemes_random(shape, config.sample_count, config.seed)?)
        }
    })
}

/// Runs `f` over the configured scheme stream in parallel batches and
/// hands the results to `merge` in stream order.
fn for_each_scheme<T, F, M>(shape: &SchemeShape, config: &SearchConfig, f: F, mut merge: M) -> Result<()>
where
    T: Send,
    F: Fn(&AnyScheme) -> Result<T> + Sync,
    M: FnMut(AnyScheme, T) -> Result<()>,
{
    let mut stream = schemes(shape, config)?;
    loop {
        let batch: Vec<AnyScheme> = stream.by_ref().take(BATCH).collect::<Result<_>>()?;
        if batch.is_empty() {
            return Ok(());
        }
        let results: Vec<T> = batch.par_iter().map(&f).collect::<Result<_>>()?;
        for (s, r) in batch.into_iter().zip(results) {
            merge(s, r)?;
        }
    }
}

/// Coordinate-wise perturb-and-project hill climbing. Each pass tries
/// `+step` and `-step` on every coordinate of every simplex; the step
/// halves after a pass without improvement.
pub fn refine_local<F>(
    objective: F,
    start: &AnyScheme,
    shape: &SchemeShape,
    config: &SearchConfig,
) -> Result<(AnyScheme, f64)>
where
    F: Fn(&AnyScheme) -> Result<f64>,
{
    let mut best = start.clone();
    let mut best_value = objective(start)?;
    let mut blocks = start.to_blocks();
    let mut step = config.refine_step;
    for _ in 0..config.refine_iterations {
        let mut improved = false;
        for b in 0..blocks.len() {
            if blocks[b].len() < 2 {
                continue;
            }
            for i in 0..blocks[b].len() {
                for sign in [1.0, -1.0] {
                    let mut moved = blocks[b].clone();
                    moved[i] += sign * step;
                    let moved = project_simplex(&moved);
                    if moved == blocks[b] {
                        continue;
                    }
                    let mut cand = blocks.clone();
                    cand[b] = moved;
                    let scheme = AnyScheme::from_blocks(shape, &cand)?;
                    let v = objective(&scheme)?;
                    if v.is_finite() && v > best_value + 1e-12 {
                        best_value = v;
                        best = scheme;
                        blocks = cand;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    Ok((best, best_value))
}

/// Maximizes a per-scheme objective over the configured search.
pub fn maximize<F>(shape: &SchemeShape, config: &SearchConfig, objective: F) -> Result<SearchOutcome>
where
    F: Fn(&AnyScheme) -> Result<f64> + Sync,
{
    config.validate()?;
    let mut best: Option<Best> = None;
    let mut evaluated = 0;
    for_each_scheme(shape, config, &objective, |s, v| {
        evaluated += 1;
        if v.is_finite() {
            Best::offer(&mut best, v, s);
        }
        Ok(())
    })?;
    let mut best = best.ok_or_else(|| Error::Internal("search visited no scheme with a finite value".into()))?;
    if config.strategy == Strategy::RandomRefine {
        let (s, v) = refine_local(&objective, &best.scheme, shape, config)?;
        if v > best.value {
            best = Best {
                value: v,
                blocks: s.to_blocks(),
                scheme: s,
            };
        }
    }
    Ok(SearchOutcome {
        value: best.value,
        scheme: best.scheme,
        evaluated,
    })
}

/// Best-found secrecy capacity at common rate `r0`, with its witness.
pub fn maximize_secrecy_capacity(
    channel: &ChannelSpec,
    r0: f64,
    config: &SearchConfig,
    variant: Variant,
) -> Result<SearchOutcome> {
    if !(r0.is_finite() && r0 >= 0.0) {
        return Err(Error::Invalid(format!("R0 must be nonnegative, got {r0}")));
    }
    let kind = match variant {
        Variant::General => SchemeKind::OneSet,
        Variant::Degraded => SchemeKind::Degraded,
    };
    let shape = scheme_shape(kind, channel.sizes(), config)?;
    maximize(&shape, config, |s| match s {
        AnyScheme::OneSet(s) => secrecy_capacity_value(s, channel, r0),
        AnyScheme::Degraded(s) => degraded_secrecy_capacity_value(s, channel, r0),
        other => Err(Error::Internal(format!("unexpected scheme kind {:?}", other.kind()))),
    })
}

/// Region of one scheme for `bound`.
pub fn scheme_region(bound: Bound, scheme: &AnyScheme, channel: &ChannelSpec) -> Result<RateRegion> {
    match (bound, scheme) {
        (Bound::InnerOneSet, AnyScheme::OneSet(s)) => inner_polytope(s, channel),
        (Bound::SecrecyOneSet, AnyScheme::OneSet(s)) => secrecy_polytope(s, channel),
        (Bound::OuterOneSet, AnyScheme::OneSetOuter(s)) => outer_polytope(s, channel),
        (Bound::Degraded, AnyScheme::Degraded(s)) => degraded_polytope_unchecked(s, channel),
        (Bound::TwoSet, AnyScheme::TwoSet(s)) => two_set_region_piece(s, channel),
        (Bound::SecrecyTwoSet, AnyScheme::TwoSet(s)) => secrecy_inner_pieces(s, channel),
        (b, s) => Err(Error::Invalid(format!(
            "bound {b} needs a {:?} scheme, got {:?}",
            b.scheme_kind(),
            s.kind()
        ))),
    }
}

/// Union over searched schemes, convexified where the dimension allows.
#[derive(Clone, Debug, Serialize)]
pub struct AssembledRegion {
    pub bound: Bound,
    pub config: SearchConfig,
    pub region: RateRegion,
    /// Piece provenance indexes into this list.
    pub witnesses: Vec<AnyScheme>,
}

pub fn assemble_region(channel: &ChannelSpec, bound: Bound, config: &SearchConfig) -> Result<AssembledRegion> {
    config.validate()?;
    let shape = scheme_shape(bound.scheme_kind(), channel.sizes(), config)?;
    let mut region = RateRegion::empty(bound.coords());
    let mut witnesses = Vec::new();
    for_each_scheme(
        &shape,
        config,
        |s| scheme_region(bound, s, channel),
        |s, r| {
            region.extend(r.with_source(witnesses.len()))?;
            witnesses.push(s);
            Ok(())
        },
    )?;
    if config.strategy == Strategy::RandomRefine {
        region
            .diagnostics
            .warnings
            .push("refinement needs a scalar objective; region assembled from the random samples only".into());
    }
    if bound == Bound::Degraded {
        region = flag_if_not_degraded(region, channel)?;
    }
    if region.pieces().is_empty() {
        return Err(Error::EmptyRegion);
    }
    if bound.convexifies() {
        region = region.convexify()?;
    } else {
        region = region.prune_dominated();
    }
    Ok(AssembledRegion {
        bound,
        config: config.clone(),
        region,
        witnesses,
    })
}
