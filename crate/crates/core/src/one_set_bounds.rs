//! Per-scheme regions when only user 1 has confidential messages.
//!
//! Coordinates are `(R0, R1, Re)` for capacity-equivocation regions and
//! `(R0, R1)` for secrecy regions.

use serde::Serialize;

use crate::channel::{ChannelSpec, DEGRADED_TOL};
use crate::error::Result;
use crate::infotheory::{
    assemble_joint_degraded, assemble_joint_one_set, assemble_joint_outer, SchemeDegraded, SchemeOneSet,
    SchemeOneSetOuter,
};
use crate::regions::{clip_plus_split, Constraint, PolytopeTemplate, RatePolytope, RateRegion};

pub const EQUIVOCATION_COORDS: [&str; 3] = ["R0", "R1", "Re"];
pub const SECRECY_COORDS: [&str; 2] = ["R0", "R1"];

/// Warning tag attached to degraded regions computed on a channel that
/// fails the degradedness test.
pub const NOT_DEGRADED_WARNING: &str = "NotDegradedWarning";

/// Information terms of one scheme.
///
/// For one-set schemes `a = I(U;Y|X2,Q)`, `b = I(U,X2,Q;Y)`,
/// `d = I(U;Y2|X2,Q)`. For degraded schemes `U` is `X1` and
/// `b = I(X1,X2;Y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneSetTerms {
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

impl OneSetTerms {
    pub fn of_scheme(scheme: &SchemeOneSet, channel: &ChannelSpec) -> Result<Self> {
        let j = assemble_joint_one_set(scheme, channel)?;
        Ok(Self {
            a: j.mutual_information(&["U"], &["Y"], &["X2", "Q"])?,
            b: j.mutual_information(&["U", "X2", "Q"], &["Y"], &[] as &[&str])?,
            d: j.mutual_information(&["U"], &["Y2"], &["X2", "Q"])?,
        })
    }

    pub fn of_degraded(scheme: &SchemeDegraded, channel: &ChannelSpec) -> Result<Self> {
        let j = assemble_joint_degraded(scheme, channel)?;
        Ok(Self {
            a: j.mutual_information(&["X1"], &["Y"], &["X2", "Q"])?,
            b: j.mutual_information(&["X1", "X2"], &["Y"], &[] as &[&str])?,
            d: j.mutual_information(&["X1"], &["Y2"], &["X2", "Q"])?,
        })
    }

    /// `max(0, min(a - d, b - d - r0))`.
    pub fn secrecy_value(&self, r0: f64) -> f64 {
        (self.a - self.d).min(self.b - self.d - r0).max(0.0)
    }
}

fn region(coords: &[&str], pieces: Vec<RatePolytope>) -> Result<RateRegion> {
    let n = pieces.len();
    RateRegion::from_pieces(coords, pieces, vec![0; n])
}

fn secrecy_piece(t: OneSetTerms, label: &str) -> Result<RateRegion> {
    let piece = RatePolytope::new(
        &SECRECY_COORDS,
        vec![
            Constraint::new(vec![0.0, 1.0], t.a - t.d),
            Constraint::new(vec![1.0, 1.0], t.b - t.d),
        ],
    )?
    .with_label(label);
    region(&SECRECY_COORDS, vec![piece])
}

/// Equivocation region with both `Re` bounds clipped at zero.
pub fn inner_from_terms(t: OneSetTerms) -> Result<RateRegion> {
    let mut tpl = PolytopeTemplate::new(&EQUIVOCATION_COORDS, "inner");
    tpl.le(vec![0.0, 1.0, 0.0], t.a)
        .le(vec![1.0, 1.0, 0.0], t.b)
        .le(vec![0.0, -1.0, 1.0], 0.0)
        .le_plus(vec![0.0, 0.0, 1.0], vec![0.0; 3], t.a - t.d)
        .le_plus(vec![0.0, 0.0, 1.0], vec![-1.0, 0.0, 0.0], t.b - t.d);
    region(&EQUIVOCATION_COORDS, clip_plus_split(&tpl)?)
}

/// Inner bound pieces for one scheme.
pub fn inner_polytope(scheme: &SchemeOneSet, channel: &ChannelSpec) -> Result<RateRegion> {
    inner_from_terms(OneSetTerms::of_scheme(scheme, channel)?)
}

/// Outer bound piece for one scheme, with the `Re` bounds unclipped; the
/// result is empty when those bounds are negative.
pub fn outer_polytope(scheme: &SchemeOneSetOuter, channel: &ChannelSpec) -> Result<RateRegion> {
    let j = assemble_joint_outer(scheme, channel)?;
    let none: &[&str] = &[];
    let a_v = j.mutual_information(&["U"], &["Y"], &["X2", "V"])?;
    let a = j.mutual_information(&["U"], &["Y"], &["X2", "Q"])?;
    let b = j.mutual_information(&["U", "X2", "Q"], &["Y"], none)?;
    let d = j.mutual_information(&["U"], &["Y2"], &["X2", "Q"])?;
    let piece = RatePolytope::new(
        &EQUIVOCATION_COORDS,
        vec![
            Constraint::new(vec![0.0, 1.0, 0.0], a_v),
            Constraint::new(vec![1.0, 1.0, 0.0], b),
            Constraint::new(vec![0.0, -1.0, 1.0], 0.0),
            Constraint::new(vec![0.0, 0.0, 1.0], a - d),
            Constraint::new(vec![1.0, 0.0, 1.0], b - d),
        ],
    )?
    .with_label("outer");
    region(&EQUIVOCATION_COORDS, vec![piece])
}

/// Secrecy region piece `{R1 <= a - d, R0 + R1 <= b - d}`.
pub fn secrecy_polytope(scheme: &SchemeOneSet, channel: &ChannelSpec) -> Result<RateRegion> {
    secrecy_piece(OneSetTerms::of_scheme(scheme, channel)?, "secrecy")
}

pub fn secrecy_capacity_value(scheme: &SchemeOneSet, channel: &ChannelSpec, r0: f64) -> Result<f64> {
    Ok(OneSetTerms::of_scheme(scheme, channel)?.secrecy_value(r0))
}

fn degraded_from_terms(t: OneSetTerms) -> Result<RateRegion> {
    let piece = RatePolytope::new(
        &EQUIVOCATION_COORDS,
        vec![
            Constraint::new(vec![0.0, 1.0, 0.0], t.a),
            Constraint::new(vec![1.0, 1.0, 0.0], t.b),
            Constraint::new(vec![0.0, -1.0, 1.0], 0.0),
            Constraint::new(vec![0.0, 0.0, 1.0], t.a - t.d),
            Constraint::new(vec![1.0, 0.0, 1.0], t.b - t.d),
        ],
    )?
    .with_label("degraded");
    region(&EQUIVOCATION_COORDS, vec![piece])
}

pub(crate) fn flag_if_not_degraded(mut r: RateRegion, channel: &ChannelSpec) -> Result<RateRegion> {
    let cert = channel.classify_degradedness(DEGRADED_TOL)?;
    if !cert.verdict.is_degraded() {
        r.diagnostics.warnings.push(format!(
            "{NOT_DEGRADED_WARNING}: wiretapper output is not a degraded version of the destination output (residual {:.3e})",
            cert.residual
        ));
    }
    Ok(r)
}

/// Degraded-channel region for one scheme, without the degradedness test.
pub fn degraded_polytope_unchecked(scheme: &SchemeDegraded, channel: &ChannelSpec) -> Result<RateRegion> {
    degraded_from_terms(OneSetTerms::of_degraded(scheme, channel)?)
}

/// Degraded-channel region; computed regardless of the channel, with a
/// warning in the diagnostics when the channel is not degraded.
pub fn degraded_polytope(scheme: &SchemeDegraded, channel: &ChannelSpec) -> Result<RateRegion> {
    flag_if_not_degraded(degraded_polytope_unchecked(scheme, channel)?, channel)
}

pub fn degraded_secrecy_polytope(scheme: &SchemeDegraded, channel: &ChannelSpec) -> Result<RateRegion> {
    secrecy_piece(OneSetTerms::of_degraded(scheme, channel)?, "degraded-secrecy")
}

pub fn degraded_secrecy_capacity_value(scheme: &SchemeDegraded, channel: &ChannelSpec, r0: f64) -> Result<f64> {
    Ok(OneSetTerms::of_degraded(scheme, channel)?.secrecy_value(r0))
}
