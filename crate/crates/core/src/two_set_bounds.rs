//! Per-scheme regions when both users have confidential messages.
//!
//! Rate coordinates are `(R0, R1, R2)`; equivocation pairs are
//! `(R1e, R2e)`. The full region lives in `(R0, R1, R2, R1e, R2e)` and is
//! kept as a list of pieces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::infotheory::{assemble_joint_two_set, SchemeTwoSet};
use crate::regions::{clip_plus_split, Constraint, PolytopeTemplate, RatePolytope, RateRegion};

pub const RATE_COORDS: [&str; 3] = ["R0", "R1", "R2"];
pub const EQUIVOCATION_COORDS: [&str; 2] = ["R1e", "R2e"];
pub const REGION_COORDS: [&str; 5] = ["R0", "R1", "R2", "R1e", "R2e"];

/// Largest number of pieces one scheme may expand into.
pub const MAX_PIECES: usize = 64;

/// Lattice points an oracle call may visit.
pub const MAX_ORACLE_POINTS: usize = 50_000_000;

/// Information terms of one two-set scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoSetTerms {
    /// `I(U;Y|V,Q)`
    pub a: f64,
    /// `I(V;Y|U,Q)`
    pub b: f64,
    /// `I(U,V;Y|Q)`
    pub c: f64,
    /// `I(U,V,Q;Y)`
    pub d: f64,
    /// `I(U;Y2|X2,V,Q)`, leakage of user 1 to user 2
    pub e1: f64,
    /// `I(V;Y1|X1,U,Q)`, leakage of user 2 to user 1
    pub e2: f64,
}

impl TwoSetTerms {
    pub fn of_scheme(scheme: &SchemeTwoSet, channel: &ChannelSpec) -> Result<Self> {
        let j = assemble_joint_two_set(scheme, channel)?;
        let none: &[&str] = &[];
        Ok(Self {
            a: j.mutual_information(&["U"], &["Y"], &["V", "Q"])?,
            b: j.mutual_information(&["V"], &["Y"], &["U", "Q"])?,
            c: j.mutual_information(&["U", "V"], &["Y"], &["Q"])?,
            d: j.mutual_information(&["U", "V", "Q"], &["Y"], none)?,
            e1: j.mutual_information(&["U"], &["Y2"], &["X2", "V", "Q"])?,
            e2: j.mutual_information(&["V"], &["Y1"], &["X1", "U", "Q"])?,
        })
    }

    /// Terms of the same scheme with the users exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            e1: self.e2,
            e2: self.e1,
            ..*self
        }
    }
}

fn check_rates(r0: f64, r1: f64, r2: f64) -> Result<()> {
    if [r0, r1, r2].iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(Error::Invalid(format!("rates ({r0}, {r1}, {r2}) must be finite and nonnegative")));
    }
    Ok(())
}

pub fn mac_from_terms(t: TwoSetTerms) -> Result<RatePolytope> {
    Ok(RatePolytope::new(
        &RATE_COORDS,
        vec![
            Constraint::new(vec![0.0, 1.0, 0.0], t.a),
            Constraint::new(vec![0.0, 0.0, 1.0], t.b),
            Constraint::new(vec![0.0, 1.0, 1.0], t.c),
            Constraint::new(vec![1.0, 1.0, 1.0], t.d),
        ],
    )?
    .with_label("mac"))
}

/// MAC polytope of a scheme over `(R0, R1, R2)`.
pub fn mac_polytope(scheme: &SchemeTwoSet, channel: &ChannelSpec) -> Result<RatePolytope> {
    mac_from_terms(TwoSetTerms::of_scheme(scheme, channel)?)
}

/// Equivocation pieces `L1`, `L2` (`R2e = 0`) and `L3` (`R1e = 0`) at fixed
/// rates.
pub fn equivocation_from_terms(t: TwoSetTerms, r0: f64, r1: f64, r2: f64) -> Result<RateRegion> {
    check_rates(r0, r1, r2)?;
    let (x, y, s) = (vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]);
    let user1 = |tpl: &mut PolytopeTemplate| {
        tpl.le(x.clone(), r1)
            .le_plus(x.clone(), vec![0.0; 2], t.a - t.e1)
            .le_plus(x.clone(), vec![0.0; 2], t.c - r2 - t.e1)
            .le_plus(x.clone(), vec![0.0; 2], t.d - r0 - r2 - t.e1);
    };
    let user2 = |tpl: &mut PolytopeTemplate| {
        tpl.le(y.clone(), r2)
            .le_plus(y.clone(), vec![0.0; 2], t.b - t.e2)
            .le_plus(y.clone(), vec![0.0; 2], t.c - r1 - t.e2)
            .le_plus(y.clone(), vec![0.0; 2], t.d - r0 - r1 - t.e2);
    };

    let mut l1 = PolytopeTemplate::new(&EQUIVOCATION_COORDS, "L1");
    user1(&mut l1);
    user2(&mut l1);
    l1.le_plus(s.clone(), vec![0.0; 2], t.c - t.e1 - t.e2)
        .le_plus(s.clone(), vec![0.0; 2], t.d - r0 - t.e1 - t.e2);
    let mut l2 = PolytopeTemplate::new(&EQUIVOCATION_COORDS, "L2");
    l2.le(y.clone(), 0.0);
    user1(&mut l2);
    let mut l3 = PolytopeTemplate::new(&EQUIVOCATION_COORDS, "L3");
    l3.le(x.clone(), 0.0);
    user2(&mut l3);

    let mut region = RateRegion::empty(&EQUIVOCATION_COORDS);
    for tpl in [&l1, &l2, &l3] {
        for piece in clip_plus_split(tpl)? {
            region.push(piece, 0)?;
        }
    }
    Ok(region)
}

/// Explicit equivocation set at `(r0, r1, r2)`.
pub fn equivocation_set_explicit(
    scheme: &SchemeTwoSet,
    channel: &ChannelSpec,
    r0: f64,
    r1: f64,
    r2: f64,
) -> Result<RateRegion> {
    equivocation_from_terms(TwoSetTerms::of_scheme(scheme, channel)?, r0, r1, r2)
}

/// How the oracle ranges over the auxiliary rate pair `(R1', R2')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    /// `R1' >= R1` and `R2' >= R2`, lattice anchored at `(R1, R2)`.
    Coupled,
    /// Every `(R1', R2')` in the MAC slice, lattice anchored at the origin.
    Literal,
}

fn lattice_count(extent: f64, step: f64) -> usize {
    if extent < 0.0 {
        0
    } else {
        (extent / step + 1e-9).floor() as usize + 1
    }
}

/// Brute-force equivocation set: enumerates `(R1', R2')` on a step lattice
/// inside the MAC slice at `r0`, takes the union of the rectangles
/// `R1e <= min(R1, [R1' - e1]_+)`, `R2e <= min(R2, [R2' - e2]_+)` and
/// samples it.
///
/// The sample holds every `(i step, j step)` lattice point of the union
/// plus lattice-spaced points along each rectangle's top and right edges,
/// sorted and deduplicated. In [`OracleMode::Coupled`] mode it is empty
/// when `(r0, r1, r2)` lies outside the MAC polytope.
pub fn oracle_from_terms(
    t: TwoSetTerms,
    r0: f64,
    r1: f64,
    r2: f64,
    step: f64,
    mode: OracleMode,
) -> Result<Vec<[f64; 2]>> {
    check_rates(r0, r1, r2)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Invalid(format!("oracle step must be positive, got {step}")));
    }
    let (s1, s2) = match mode {
        OracleMode::Coupled => (r1, r2),
        OracleMode::Literal => (0.0, 0.0),
    };
    let cap1 = t.a.min(t.c - s2).min(t.d - r0 - s2);
    let n1 = lattice_count(cap1 - s1, step);
    let visits = (n1 as f64) * (lattice_count(t.b - s2, step) as f64);
    if visits > MAX_ORACLE_POINTS as f64 {
        return Err(Error::GridTooLarge {
            count: visits,
            limit: MAX_ORACLE_POINTS as f64,
        });
    }

    // for fixed R1' the rectangles nest in R2', so the largest R2' suffices
    let mut rects: Vec<(f64, f64)> = Vec::new();
    for k in 0..n1 {
        let p1 = s1 + k as f64 * step;
        let cap2 = t.b.min(t.c - p1).min(t.d - r0 - p1);
        let n2 = lattice_count(cap2 - s2, step);
        if n2 == 0 {
            continue;
        }
        let p2 = s2 + (n2 - 1) as f64 * step;
        let w = r1.min((p1 - t.e1).max(0.0));
        let h = r2.min((p2 - t.e2).max(0.0));
        rects.push((w, h));
    }

    let mut cloud: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut add = |x: f64, y: f64| {
        cloud.insert((x.to_bits(), y.to_bits()));
    };
    for &(w, h) in &rects {
        let (ni, nj) = (lattice_count(w, step), lattice_count(h, step));
        for i in 0..ni {
            let x = i as f64 * step;
            for j in 0..nj {
                add(x, j as f64 * step);
            }
            add(x, h);
        }
        for j in 0..nj {
            add(w, j as f64 * step);
        }
        add(w, h);
    }
    let mut out: Vec<[f64; 2]> = cloud.into_iter().map(|(x, y)| [f64::from_bits(x), f64::from_bits(y)]).collect();
    out.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    out.dedup();
    Ok(out)
}

pub fn equivocation_set_oracle(
    scheme: &SchemeTwoSet,
    channel: &ChannelSpec,
    r0: f64,
    r1: f64,
    r2: f64,
    step: f64,
    mode: OracleMode,
) -> Result<Vec<[f64; 2]>> {
    oracle_from_terms(TwoSetTerms::of_scheme(scheme, channel)?, r0, r1, r2, step, mode)
}

/// Five-dimensional pieces with the rates kept symbolic.
pub fn region_from_terms(t: TwoSetTerms) -> Result<RateRegion> {
    let z = [0.0; 5];
    let e = |i: usize, v: f64| {
        let mut c = z;
        c[i] = v;
        c
    };
    let vec_of = |c: [f64; 5]| c.to_vec();
    let (r0, r1, r2, x, y) = (0, 1, 2, 3, 4);
    let neg = |idx: &[usize]| {
        let mut c = z;
        for &i in idx {
            c[i] = -1.0;
        }
        c.to_vec()
    };
    let rates = |tpl: &mut PolytopeTemplate| {
        tpl.le(vec_of(e(r1, 1.0)), t.a)
            .le(vec_of(e(r2, 1.0)), t.b)
            .le(vec![0.0, 1.0, 1.0, 0.0, 0.0], t.c)
            .le(vec![1.0, 1.0, 1.0, 0.0, 0.0], t.d);
    };
    let user1 = |tpl: &mut PolytopeTemplate| {
        tpl.le(vec![0.0, -1.0, 0.0, 1.0, 0.0], 0.0)
            .le_plus(vec_of(e(x, 1.0)), vec![0.0; 5], t.a - t.e1)
            .le_plus(vec_of(e(x, 1.0)), neg(&[r2]), t.c - t.e1)
            .le_plus(vec_of(e(x, 1.0)), neg(&[r0, r2]), t.d - t.e1);
    };
    let user2 = |tpl: &mut PolytopeTemplate| {
        tpl.le(vec![0.0, 0.0, -1.0, 0.0, 1.0], 0.0)
            .le_plus(vec_of(e(y, 1.0)), vec![0.0; 5], t.b - t.e2)
            .le_plus(vec_of(e(y, 1.0)), neg(&[r1]), t.c - t.e2)
            .le_plus(vec_of(e(y, 1.0)), neg(&[r0, r1]), t.d - t.e2);
    };
    let sum = vec![0.0, 0.0, 0.0, 1.0, 1.0];

    let mut l1 = PolytopeTemplate::new(&REGION_COORDS, "L1");
    rates(&mut l1);
    user1(&mut l1);
    user2(&mut l1);
    l1.le_plus(sum.clone(), vec![0.0; 5], t.c - t.e1 - t.e2)
        .le_plus(sum, neg(&[r0]), t.d - t.e1 - t.e2);
    let mut l2 = PolytopeTemplate::new(&REGION_COORDS, "L2");
    rates(&mut l2);
    l2.le(vec_of(e(y, 1.0)), 0.0);
    user1(&mut l2);
    let mut l3 = PolytopeTemplate::new(&REGION_COORDS, "L3");
    rates(&mut l3);
    l3.le(vec_of(e(x, 1.0)), 0.0);
    user2(&mut l3);

    let mut region = RateRegion::empty(&REGION_COORDS);
    let mut produced = 0;
    for tpl in [&l1, &l2, &l3] {
        let bound = tpl.branch_bound();
        if bound > MAX_PIECES {
            return Err(Error::PieceExplosion {
                pieces: bound,
                limit: MAX_PIECES,
            });
        }
        let pieces = clip_plus_split(tpl)?;
        produced += pieces.len();
        if produced > MAX_PIECES {
            return Err(Error::PieceExplosion {
                pieces: produced,
                limit: MAX_PIECES,
            });
        }
        for piece in pieces {
            region.push(piece, 0)?;
        }
    }
    Ok(region)
}

/// Rate-equivocation pieces of one scheme over `(R0, R1, R2, R1e, R2e)`.
pub fn two_set_region_piece(scheme: &SchemeTwoSet, channel: &ChannelSpec) -> Result<RateRegion> {
    region_from_terms(TwoSetTerms::of_scheme(scheme, channel)?)
}

/// Secrecy pieces `Rs1`, `Rs2` (`R2 = 0`) and `Rs3` (`R1 = 0`); a piece
/// with a negative right-hand side is dropped.
pub fn secrecy_from_terms(t: TwoSetTerms) -> Result<RateRegion> {
    let rs1 = vec![
        Constraint::new(vec![0.0, 1.0, 0.0], t.a - t.e1),
        Constraint::new(vec![0.0, 0.0, 1.0], t.b - t.e2),
        Constraint::new(vec![0.0, 1.0, 1.0], t.c - t.e1 - t.e2),
        Constraint::new(vec![1.0, 1.0, 1.0], t.d - t.e1 - t.e2),
    ];
    let rs2 = vec![
        Constraint::new(vec![0.0, 0.0, 1.0], 0.0),
        Constraint::new(vec![0.0, 1.0, 0.0], t.a - t.e1),
        Constraint::new(vec![1.0, 1.0, 0.0], t.d - t.e1),
    ];
    let rs3 = vec![
        Constraint::new(vec![0.0, 1.0, 0.0], 0.0),
        Constraint::new(vec![0.0, 0.0, 1.0], t.b - t.e2),
        Constraint::new(vec![1.0, 0.0, 1.0], t.d - t.e2),
    ];
    let mut region = RateRegion::empty(&RATE_COORDS);
    for (label, cs) in [("Rs1", rs1), ("Rs2", rs2), ("Rs3", rs3)] {
        if cs.iter().any(|c| c.bound < 0.0) {
            region.diagnostics.dropped_empty += 1;
            continue;
        }
        region.push(RatePolytope::new(&RATE_COORDS, cs)?.with_label(label), 0)?;
    }
    Ok(region)
}

pub fn secrecy_inner_pieces(scheme: &SchemeTwoSet, channel: &ChannelSpec) -> Result<RateRegion> {
    secrecy_from_terms(TwoSetTerms::of_scheme(scheme, channel)?)
}
