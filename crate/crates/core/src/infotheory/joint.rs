use crate::error::{Error, Result};

/// Upper limit on dense joint table entries.
pub const MAX_JOINT_ENTRIES: usize = 10_000_000;

/// Dense joint distribution over named finite random variables.
///
/// Entries are stored row-major with the first variable varying slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPMF {
    names: Vec<String>,
    sizes: Vec<usize>,
    prob: Vec<f64>,
}

impl JointPMF {
    pub fn new(vars: &[(&str, usize)], prob: Vec<f64>) -> Result<Self> {
        let entries = checked_entries(vars)?;
        if prob.len() != entries {
            return Err(Error::DimensionMismatch(format!(
                "joint over {vars:?} needs {entries} entries, got {}",
                prob.len()
            )));
        }
        if let Some(v) = prob.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::NegativeProbability {
                location: "joint".into(),
                value: *v,
            });
        }
        let mass: f64 = prob.iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::RowSumViolation {
                row: "joint".into(),
                sum: mass,
                tolerance: 1e-9,
            });
        }
        let mut names: Vec<String> = Vec::with_capacity(vars.len());
        for (name, _) in vars {
            if names.iter().any(|n| n == name) {
                return Err(Error::Invalid(format!("duplicate variable `{name}`")));
            }
            names.push((*name).to_string());
        }
        Ok(Self {
            names,
            sizes: vars.iter().map(|v| v.1).collect(),
            prob,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn prob(&self) -> &[f64] {
        &self.prob
    }

    pub fn total_mass(&self) -> f64 {
        self.prob.iter().sum()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Bitmask of variable positions for a list of names.
    pub fn mask<S: AsRef<str>>(&self, names: &[S]) -> Result<u64> {
        names
            .iter()
            .try_fold(0u64, |m, n| Ok(m | (1u64 << self.position(n.as_ref())?)))
    }

    /// Marginal table over the variables in `mask`, in joint order.
    ///
    /// Buckets accumulate in a fixed traversal order of the full table.
    pub fn marginal_mask(&self, mask: u64) -> Vec<f64> {
        let kept: Vec<usize> = (0..self.sizes.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let out_len: usize = kept.iter().map(|&i| self.sizes[i]).product();
        let mut out = vec![0.0; out_len.max(1)];
        if kept.is_empty() {
            out[0] = self.prob.iter().sum();
            return out;
        }
        // stride of each joint variable inside the marginal table (0 if dropped)
        let mut stride = vec![0usize; self.sizes.len()];
        let mut acc = 1;
        for &i in kept.iter().rev() {
            stride[i] = acc;
            acc *= self.sizes[i];
        }
        let mut digits = vec![0usize; self.sizes.len()];
        let mut target = 0usize;
        for &p in &self.prob {
            out[target] += p;
            // odometer increment, last variable fastest
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                target += stride[k];
                if digits[k] < self.sizes[k] {
                    break;
                }
                target -= stride[k] * digits[k];
                digits[k] = 0;
            }
        }
        out
    }

    /// Joint entropy in bits of the variables in `mask`.
    pub fn entropy_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        entropy_of(self.marginal_mask(mask))
    }

    /// `H(targets | given)` in bits. Overlapping sets are allowed, so
    /// `H(X | X) = 0`.
    pub fn entropy<S: AsRef<str>>(&self, targets: &[S], given: &[S]) -> Result<f64> {
        let t = self.mask(targets)?;
        let g = self.mask(given)?;
        Ok((self.entropy_mask(t | g) - self.entropy_mask(g)).max(0.0))
    }

    /// `I(a; b | given)` in bits, clamped at zero.
    pub fn mutual_information<S: AsRef<str>>(&self, a: &[S], b: &[S], given: &[S]) -> Result<f64> {
        let (a, b, g) = (self.mask(a)?, self.mask(b)?, self.mask(given)?);
        Ok(self.mutual_information_mask(a, b, g))
    }

    /// `H(A,G) + H(B,G) - H(A,B,G) - H(G)`, before clamping.
    pub fn mutual_information_raw_mask(&self, a: u64, b: u64, g: u64) -> f64 {
        self.entropy_mask(a | g) + self.entropy_mask(b | g) - self.entropy_mask(a | b | g) - self.entropy_mask(g)
    }

    pub fn mutual_information_mask(&self, a: u64, b: u64, g: u64) -> f64 {
        self.mutual_information_raw_mask(a, b, g).max(0.0)
    }
}

fn checked_entries(vars: &[(&str, usize)]) -> Result<usize> {
    let mut entries: usize = 1;
    for (name, size) in vars {
        if *size == 0 {
            return Err(Error::DimensionMismatch(format!("variable `{name}` has empty alphabet")));
        }
        entries = entries.saturating_mul(*size);
    }
    if entries > MAX_JOINT_ENTRIES {
        return Err(Error::JointTooLarge {
            entries,
            limit: MAX_JOINT_ENTRIES,
        });
    }
    Ok(entries)
}

pub(crate) fn guard_entries(vars: &[(&str, usize)]) -> Result<usize> {
    checked_entries(vars)
}

/// Entropy of a probability table in bits. Terms are summed in ascending
/// order of probability, so the result depends only on the multiset of
/// entries and relabelings give bitwise-equal values.
pub fn entropy_of(mut p: Vec<f64>) -> f64 {
    p.retain(|&v| v > 0.0);
    p.sort_by(f64::total_cmp);
    let h: f64 = p.iter().map(|&v| -v * v.log2()).sum();
    h.max(0.0)
}
