//! Joint distributions assembled from schemes and channels, with exact
//! entropies and mutual informations in bits.

mod joint;
mod scheme;

pub use joint::{entropy_of, JointPMF, MAX_JOINT_ENTRIES};
pub use scheme::{
    AnyScheme, PairTable, SchemeDegraded, SchemeKind, SchemeOneSet, SchemeOneSetOuter, SchemeShape, SchemeTwoSet,
};

use crate::channel::ChannelSpec;
use crate::error::Result;

/// `p(y, y2 | x1, x2)` laid out `[x1][x2][y][y2]`.
fn dest_and_tap(channel: &ChannelSpec) -> Vec<f64> {
    let s = channel.sizes();
    let mut out = vec![0.0; s.inputs() * s.y * s.y2];
    for x1 in 0..s.x1 {
        for x2 in 0..s.x2 {
            let base = (x1 * s.x2 + x2) * s.y * s.y2;
            for y in 0..s.y {
                for y1 in 0..s.y1 {
                    for y2 in 0..s.y2 {
                        out[base + y * s.y2 + y2] += channel.p(x1, x2, y, y1, y2);
                    }
                }
            }
        }
    }
    out
}

/// Joint over `(Q, U, X1, X2, Y, Y2)`.
pub fn assemble_joint_one_set(scheme: &SchemeOneSet, channel: &ChannelSpec) -> Result<JointPMF> {
    let s = channel.sizes();
    scheme.check_compatible(&s)?;
    let (nq, nu) = (scheme.q_size(), scheme.u_size());
    let vars = [("Q", nq), ("U", nu), ("X1", s.x1), ("X2", s.x2), ("Y", s.y), ("Y2", s.y2)];
    let len = joint::guard_entries(&vars)?;
    let ch = dest_and_tap(channel);
    let out_len = s.y * s.y2;
    let mut prob = Vec::with_capacity(len);
    for q in 0..nq {
        for u in 0..nu {
            let pu = scheme.p_u_given_q.get(q, u);
            for x1 in 0..s.x1 {
                let px1 = scheme.p_x1_given_u.get(u, x1);
                for x2 in 0..s.x2 {
                    let w = scheme.p_qx2.get(q, x2) * pu * px1;
                    let base = (x1 * s.x2 + x2) * out_len;
                    prob.extend(ch[base..base + out_len].iter().map(|c| w * c));
                }
            }
        }
    }
    JointPMF::new(&vars, prob)
}

/// Joint over `(Q, U, V, X1, X2, Y, Y2)` with `U` and `V` independent given `Q`.
pub fn assemble_joint_outer(scheme: &SchemeOneSetOuter, channel: &ChannelSpec) -> Result<JointPMF> {
    let s = channel.sizes();
    scheme.check_compatible(&s)?;
    let (nq, nu, nv) = (scheme.p_qx2.rows(), scheme.p_u_given_q.cols(), scheme.v_size());
    let vars = [
        ("Q", nq),
        ("U", nu),
        ("V", nv),
        ("X1", s.x1),
        ("X2", s.x2),
        ("Y", s.y),
        ("Y2", s.y2),
    ];
    let len = joint::guard_entries(&vars)?;
    let ch = dest_and_tap(channel);
    let out_len = s.y * s.y2;
    let mut prob = Vec::with_capacity(len);
    for q in 0..nq {
        for u in 0..nu {
            let pu = scheme.p_u_given_q.get(q, u);
            for v in 0..nv {
                let pv = scheme.p_v_given_q.get(q, v);
                for x1 in 0..s.x1 {
                    let px1 = scheme.p_x1_given_u.get(u, x1);
                    for x2 in 0..s.x2 {
                        let w = scheme.p_qx2.get(q, x2) * pu * pv * px1;
                        let base = (x1 * s.x2 + x2) * out_len;
                        prob.extend(ch[base..base + out_len].iter().map(|c| w * c));
                    }
                }
            }
        }
    }
    JointPMF::new(&vars, prob)
}

/// Joint over `(Q, U, V, X1, X2, Y, Y1, Y2)`.
pub fn assemble_joint_two_set(scheme: &SchemeTwoSet, channel: &ChannelSpec) -> Result<JointPMF> {
    let s = channel.sizes();
    scheme.check_compatible(&s)?;
    let (nq, nu, nv) = (scheme.p_q.len(), scheme.p_u_given_q.cols(), scheme.p_v_given_q.cols());
    let vars = [
        ("Q", nq),
        ("U", nu),
        ("V", nv),
        ("X1", s.x1),
        ("X2", s.x2),
        ("Y", s.y),
        ("Y1", s.y1),
        ("Y2", s.y2),
    ];
    let len = joint::guard_entries(&vars)?;
    let mut prob = Vec::with_capacity(len);
    for q in 0..nq {
        for u in 0..nu {
            let pu = scheme.p_q[q] * scheme.p_u_given_q.get(q, u);
            for v in 0..nv {
                let pv = scheme.p_v_given_q.get(q, v);
                for x1 in 0..s.x1 {
                    let px1 = scheme.p_x1_given_u.get(u, x1);
                    for x2 in 0..s.x2 {
                        let w = pu * pv * px1 * scheme.p_x2_given_v.get(v, x2);
                        prob.extend(channel.block(x1, x2).iter().map(|c| w * c));
                    }
                }
            }
        }
    }
    JointPMF::new(&vars, prob)
}

/// Joint over `(Q, X1, X2, Y, Y2)`.
pub fn assemble_joint_degraded(scheme: &SchemeDegraded, channel: &ChannelSpec) -> Result<JointPMF> {
    let s = channel.sizes();
    scheme.check_compatible(&s)?;
    let nq = scheme.p_qx2.rows();
    let vars = [("Q", nq), ("X1", s.x1), ("X2", s.x2), ("Y", s.y), ("Y2", s.y2)];
    let len = joint::guard_entries(&vars)?;
    let ch = dest_and_tap(channel);
    let out_len = s.y * s.y2;
    let mut prob = Vec::with_capacity(len);
    for q in 0..nq {
        for x1 in 0..s.x1 {
            let px1 = scheme.p_x1_given_q.get(q, x1);
            for x2 in 0..s.x2 {
                let w = scheme.p_qx2.get(q, x2) * px1;
                let base = (x1 * s.x2 + x2) * out_len;
                prob.extend(ch[base..base + out_len].iter().map(|c| w * c));
            }
        }
    }
    JointPMF::new(&vars, prob)
}
