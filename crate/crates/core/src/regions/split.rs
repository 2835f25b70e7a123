use super::polytope::{Constraint, RatePolytope};
use crate::error::{Error, Result};

/// `lhs · rates <= [inner · rates + constant]_+`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlusConstraint {
    pub lhs: Vec<f64>,
    pub inner: Vec<f64>,
    pub constant: f64,
}

impl PlusConstraint {
    pub fn new(lhs: Vec<f64>, inner: Vec<f64>, constant: f64) -> Self {
        Self { lhs, inner, constant }
    }

    /// Bracket without rate terms.
    pub fn constant(lhs: Vec<f64>, constant: f64) -> Self {
        let d = lhs.len();
        Self::new(lhs, vec![0.0; d], constant)
    }

    fn is_constant(&self) -> bool {
        self.inner.iter().all(|&v| v == 0.0)
    }

    fn support(&self) -> Vec<bool> {
        self.lhs.iter().map(|&v| v != 0.0).collect()
    }
}

/// Linear constraints plus positive-part constraints over shared coords.
#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeTemplate {
    pub coords: Vec<String>,
    pub linear: Vec<Constraint>,
    pub plus: Vec<PlusConstraint>,
    pub label: String,
}

impl PolytopeTemplate {
    pub fn new<S: AsRef<str>>(coords: &[S], label: impl Into<String>) -> Self {
        Self {
            coords: coords.iter().map(|s| s.as_ref().to_string()).collect(),
            linear: Vec::new(),
            plus: Vec::new(),
            label: label.into(),
        }
    }

    pub fn le(&mut self, coeffs: Vec<f64>, bound: f64) -> &mut Self {
        self.linear.push(Constraint::new(coeffs, bound));
        self
    }

    pub fn le_plus(&mut self, lhs: Vec<f64>, inner: Vec<f64>, constant: f64) -> &mut Self {
        self.plus.push(PlusConstraint::new(lhs, inner, constant));
        self
    }

    /// Upper bound on the number of pieces before pruning.
    pub fn branch_bound(&self) -> usize {
        let k = self.plus.iter().filter(|p| !p.is_constant()).count();
        1usize.checked_shl(k as u32).unwrap_or(usize::MAX)
    }
}

fn subset(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

struct Branch {
    constraints: Vec<Constraint>,
    zeroed: Vec<bool>,
    // supports of brackets resolved by their affine branch
    affine: Vec<Vec<bool>>,
}

/// Expands every positive-part constraint into the union
/// `{lhs <= inner + constant} ∪ {lhs <= 0}` and drops empty pieces.
///
/// Constant brackets are resolved without branching. A bracket whose
/// left-hand coordinates are already forced to zero is satisfied and
/// skipped, and a zero branch that would also zero an earlier affine
/// branch is skipped because the earlier zero branch covers it. Both rules
/// need nonnegative left-hand coefficients, which every template here has.
pub fn clip_plus_split(template: &PolytopeTemplate) -> Result<Vec<RatePolytope>> {
    let d = template.coords.len();
    for p in &template.plus {
        if p.lhs.len() != d || p.inner.len() != d {
            return Err(Error::DimensionMismatch("positive-part constraint dimension".into()));
        }
        if p.lhs.iter().any(|&v| v < 0.0) {
            return Err(Error::Invalid("positive-part constraints need nonnegative left-hand sides".into()));
        }
    }
    let mut order: Vec<&PlusConstraint> = template.plus.iter().filter(|p| p.is_constant()).collect();
    order.extend(template.plus.iter().filter(|p| !p.is_constant()));

    let mut branches = vec![Branch {
        constraints: template.linear.clone(),
        zeroed: vec![false; d],
        affine: Vec::new(),
    }];
    for p in order {
        let supp = p.support();
        let mut next = Vec::with_capacity(branches.len() * 2);
        for mut b in branches {
            if subset(&supp, &b.zeroed) {
                next.push(b);
                continue;
            }
            let zero_branch = || {
                let mut z = b.zeroed.clone();
                for (zi, &s) in z.iter_mut().zip(&supp) {
                    *zi |= s;
                }
                let mut c = b.constraints.clone();
                c.push(Constraint::new(p.lhs.clone(), 0.0));
                (c, z)
            };
            if p.is_constant() {
                if p.constant >= 0.0 {
                    // no zero branch exists here, so it cannot cover later ones
                    b.constraints.push(Constraint::new(p.lhs.clone(), p.constant));
                } else {
                    let (c, z) = zero_branch();
                    b.constraints = c;
                    b.zeroed = z;
                }
                next.push(b);
                continue;
            }
            let (zc, zz) = zero_branch();
            let covered = b.affine.iter().any(|s| subset(s, &zz));
            if !covered {
                next.push(Branch {
                    constraints: zc,
                    zeroed: zz,
                    affine: b.affine.clone(),
                });
            }
            let coeffs: Vec<f64> = p.lhs.iter().zip(&p.inner).map(|(l, i)| l - i).collect();
            b.constraints.push(Constraint::new(coeffs, p.constant));
            b.affine.push(supp.clone());
            next.push(b);
        }
        branches = next;
    }

    let mut out: Vec<RatePolytope> = Vec::new();
    for b in branches {
        let piece = RatePolytope::new(&template.coords, b.constraints)?.with_label(template.label.clone());
        if piece.is_empty()? || out.contains(&piece) {
            continue;
        }
        out.push(piece);
    }
    Ok(out)
}
