//! Exact finite-blocklength evaluation of binned random codes.
//!
//! A codebook maps `(w0, w1, j1)` to an `X1` sequence and `(w0, w2, j2)` to
//! an `X2` sequence; the bin indices `j1`, `j2` are the encoders' private
//! randomness. This binning layout is one standard instantiation of a
//! stochastic encoder. Every quantity is computed by full enumeration of
//! messages, bins and output sequences, so results are exact up to
//! floating point.

use std::collections::BTreeMap;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelSpec, Receiver};
use crate::error::{Error, Result};
use crate::prob::{check_distribution, CompensatedSum, Kernel, ROW_SUM_TOL};

/// Default bound on enumerated joint states.
pub const DEFAULT_MAX_STATES: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_MAX_STATES`].
pub const MAX_STATES_ENV: &str = "GMAC_MAX_STATES";

pub fn max_states() -> u64 {
    std::env::var(MAX_STATES_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STATES)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// Letters drawn i.i.d. from the input distribution.
    #[default]
    Random,
    /// Codebook entry `k` is the `k`-th sequence in lexicographic order;
    /// injective, needs `entries <= |X|^n`.
    Enumerative,
}

/// Per-letter input laws of the two users.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDist {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
}

impl InputDist {
    pub fn uniform(x1: usize, x2: usize) -> Self {
        Self {
            x1: vec![1.0 / x1 as f64; x1],
            x2: vec![1.0 / x2 as f64; x2],
        }
    }
}

/// Message and bin sizes of a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSizes {
    pub n: usize,
    #[serde(rename = "M0")]
    pub m0: usize,
    #[serde(rename = "M1")]
    pub m1: usize,
    #[serde(rename = "M2")]
    pub m2: usize,
    #[serde(rename = "J1")]
    pub j1: usize,
    #[serde(rename = "J2")]
    pub j2: usize,
}

impl CodeSizes {
    pub fn messages(&self) -> usize {
        self.m0 * self.m1 * self.m2
    }

    /// `(log M0, log M1, log M2) / n` in bits.
    pub fn rates(&self) -> [f64; 3] {
        let n = self.n as f64;
        [self.m0, self.m1, self.m2].map(|m| (m as f64).log2() / n)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || [self.m0, self.m1, self.m2, self.j1, self.j2].contains(&0) {
            return Err(Error::Invalid("blocklength, message and bin sizes must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub sizes: CodeSizes,
    pub seed: u64,
    pub construction: Construction,
    /// Input alphabet sizes.
    pub alphabets: [usize; 2],
    /// Sequence index (base `|X1|`, first letter most significant) for
    /// entry `(w0 * M1 + w1) * J1 + j1`.
    pub x1: Vec<usize>,
    /// Sequence index for entry `(w0 * M2 + w2) * J2 + j2`.
    pub x2: Vec<usize>,
}

fn checked_pow(base: usize, n: usize) -> Option<usize> {
    (0..n).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

fn pow_f64(base: usize, n: usize) -> f64 {
    (base as f64).powi(n as i32)
}

/// Joint states a full enumeration of `sizes` visits on `channel`.
pub fn enumeration_states(channel: &ChannelSpec, sizes: &CodeSizes) -> f64 {
    let s = channel.sizes();
    let codes = pow_f64(s.x1, sizes.n) * pow_f64(s.x2, sizes.n);
    let msgs = (sizes.messages() * sizes.j1 * sizes.j2) as f64;
    let outputs = pow_f64(s.y.max(s.y1).max(s.y2), sizes.n);
    (codes * msgs).max(msgs * outputs)
}

fn guard(channel: &ChannelSpec, sizes: &CodeSizes) -> Result<()> {
    let states = enumeration_states(channel, sizes);
    let limit = max_states();
    if states > limit as f64 {
        return Err(Error::EnumerationTooLarge { states, limit });
    }
    Ok(())
}

fn draw_book(rng: &mut ChaCha8Rng, entries: usize, n: usize, law: &[f64]) -> Result<Vec<usize>> {
    let pick = WeightedIndex::new(law).map_err(|e| Error::Invalid(format!("input distribution: {e}")))?;
    let q = law.len();
    Ok((0..entries)
        .map(|_| (0..n).fold(0, |acc, _| acc * q + pick.sample(rng)))
        .collect())
}

fn enumerate_book(entries: usize, n: usize, q: usize, who: &str) -> Result<Vec<usize>> {
    let total = checked_pow(q, n).unwrap_or(usize::MAX);
    if entries > total {
        return Err(Error::Invalid(format!(
            "{who} needs {entries} distinct codewords but only {total} sequences exist"
        )));
    }
    Ok((0..entries).collect())
}

#[allow(clippy::too_many_arguments)]
pub fn build_codebook(
    channel: &ChannelSpec,
    sizes: CodeSizes,
    input_dist: &InputDist,
    seed: u64,
    construction: Construction,
) -> Result<Codebook> {
    sizes.validate()?;
    guard(channel, &sizes)?;
    let s = channel.sizes();
    check_distribution(&input_dist.x1, "input_dist.x1", ROW_SUM_TOL)?;
    check_distribution(&input_dist.x2, "input_dist.x2", ROW_SUM_TOL)?;
    if input_dist.x1.len() != s.x1 || input_dist.x2.len() != s.x2 {
        return Err(Error::DimensionMismatch(format!(
            "input distributions over ({}, {}) symbols, channel has ({}, {})",
            input_dist.x1.len(),
            input_dist.x2.len(),
            s.x1,
            s.x2
        )));
    }
    let e1 = sizes.m0 * sizes.m1 * sizes.j1;
    let e2 = sizes.m0 * sizes.m2 * sizes.j2;
    let (x1, x2) = match construction {
        Construction::Random => {
            // one ChaCha stream per user, so user 2's code does not depend on M1
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed);
            r2.set_stream(1);
            (
                draw_book(&mut r1, e1, sizes.n, &input_dist.x1)?,
                draw_book(&mut r2, e2, sizes.n, &input_dist.x2)?,
            )
        }
        Construction::Enumerative => (
            enumerate_book(e1, sizes.n, s.x1, "user 1")?,
            enumerate_book(e2, sizes.n, s.x2, "user 2")?,
        ),
    };
    Ok(Codebook {
        sizes,
        seed,
        construction,
        alphabets: [s.x1, s.x2],
        x1,
        x2,
    })
}

impl Codebook {
    pub fn x1_index(&self, w0: usize, w1: usize, j1: usize) -> usize {
        self.x1[(w0 * self.sizes.m1 + w1) * self.sizes.j1 + j1]
    }

    pub fn x2_index(&self, w0: usize, w2: usize, j2: usize) -> usize {
        self.x2[(w0 * self.sizes.m2 + w2) * self.sizes.j2 + j2]
    }

    /// Letters of a sequence index over an alphabet of size `q`.
    pub fn letters(&self, index: usize, q: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.n];
        let mut rest = index;
        for t in (0..self.sizes.n).rev() {
            out[t] = rest % q;
            rest /= q;
        }
        out
    }

    fn check(&self, channel: &ChannelSpec) -> Result<()> {
        let s = channel.sizes();
        if self.alphabets != [s.x1, s.x2] {
            return Err(Error::DimensionMismatch("codebook built for other input alphabets".into()));
        }
        guard(channel, &self.sizes)
    }
}

/// Output-sequence likelihoods of one input-sequence pair through a
/// per-letter kernel with rows `x1 * |X2| + x2`.
fn sequence_law(book: &Codebook, kernel: &Kernel, x1: usize, x2: usize) -> Vec<f64> {
    let [_, q2] = book.alphabets;
    let a = book.letters(x1, book.alphabets[0]);
    let b = book.letters(x2, q2);
    let cols = kernel.cols();
    let mut law = vec![1.0];
    for t in 0..book.sizes.n {
        let row = kernel.row(a[t] * q2 + b[t]);
        let mut next = Vec::with_capacity(law.len() * cols);
        for &p in &law {
            next.extend(row.iter().map(|&c| p * c));
        }
        law = next;
    }
    law
}

/// Mean destination error of the maximum-likelihood decoder and the total
/// enumerated mass.
fn decode_stats(book: &Codebook, channel: &ChannelSpec) -> Result<(f64, f64)> {
    book.check(channel)?;
    let kernel = channel.marginal_kernel(Receiver::Destination).table;
    let z = book.sizes;
    let bins = (z.j1 * z.j2) as f64;
    // P(y | w) for every message triple, in index order
    let laws: Vec<Vec<f64>> = (0..z.messages())
        .into_par_iter()
        .map(|w| {
            let (w0, w1, w2) = (w / (z.m1 * z.m2), w / z.m2 % z.m1, w % z.m2);
            let mut acc: Vec<CompensatedSum> = Vec::new();
            for j1 in 0..z.j1 {
                for j2 in 0..z.j2 {
                    let law = sequence_law(book, &kernel, book.x1_index(w0, w1, j1), book.x2_index(w0, w2, j2));
                    if acc.is_empty() {
                        acc = vec![CompensatedSum::default(); law.len()];
                    }
                    for (a, p) in acc.iter_mut().zip(law) {
                        a.add(p);
                    }
                }
            }
            acc.into_iter().map(|a| a.value() / bins).collect()
        })
        .collect();
    let outputs = laws[0].len();
    let mut correct = CompensatedSum::default();
    let mut mass = CompensatedSum::default();
    for y in 0..outputs {
        // ties go to the smallest index; the value is the same either way
        let mut best = f64::NEG_INFINITY;
        for law in &laws {
            if law[y] > best {
                best = law[y];
            }
            mass.add(law[y]);
        }
        correct.add(best);
    }
    let m = z.messages() as f64;
    Ok((1.0 - correct.value() / m, mass.value() / m))
}

pub fn exact_error_probability(book: &Codebook, channel: &ChannelSpec) -> Result<f64> {
    Ok(decode_stats(book, channel)?.0.max(0.0))
}

/// Whose uncertainty [`exact_equivocation`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Listener {
    /// `H(W1 | Y2^n, X2^n, W0, W2) / n`
    User2AboutW1,
    /// `H(W2 | Y1^n, X1^n, W0, W1) / n`
    User1AboutW2,
    /// `H(W1 | Y^n, X2^n, W0, W2) / n`, the destination-side analog of the
    /// user-2 quantity.
    DestinationAboutW1,
}

/// Exact equivocation rate in bits per channel use.
pub fn exact_equivocation(book: &Codebook, channel: &ChannelSpec, listener: Listener) -> Result<f64> {
    book.check(channel)?;
    let z = book.sizes;
    let receiver = match listener {
        Listener::User2AboutW1 => Receiver::User2,
        Listener::User1AboutW2 => Receiver::User1,
        Listener::DestinationAboutW1 => Receiver::Destination,
    };
    let kernel = channel.marginal_kernel(receiver).table;
    let about_w1 = listener != Listener::User1AboutW2;
    // (secret size, own bins, other message size, other bins)
    let (ms, js, mo, jo) = if about_w1 {
        (z.m1, z.j1, z.m2, z.j2)
    } else {
        (z.m2, z.j2, z.m1, z.j1)
    };
    let secret_seq = |w0: usize, ws: usize, js: usize| {
        if about_w1 {
            book.x1_index(w0, ws, js)
        } else {
            book.x2_index(w0, ws, js)
        }
    };
    let known_seq = |w0: usize, wo: usize, jo: usize| {
        if about_w1 {
            book.x2_index(w0, wo, jo)
        } else {
            book.x1_index(w0, wo, jo)
        }
    };
    let law_of = |s: usize, k: usize| {
        if about_w1 {
            sequence_law(book, &kernel, s, k)
        } else {
            sequence_law(book, &kernel, k, s)
        }
    };

    // each (w0, w_other) group contributes independently
    let groups: Vec<CompensatedSum> = (0..z.m0 * mo)
        .into_par_iter()
        .map(|g| {
            let (w0, wo) = (g / mo, g % mo);
            // bins of the known user that share a sequence are merged
            let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
            for j in 0..jo {
                *seen.entry(known_seq(w0, wo, j)).or_default() += 1;
            }
            let mut h = CompensatedSum::default();
            for (&k, &count) in &seen {
                let p_known = count as f64 / jo as f64;
                // table[ws][y] = P(ws, y, known sequence | w0, wo)
                let table: Vec<Vec<f64>> = (0..ms)
                    .map(|ws| {
                        let mut acc: Vec<CompensatedSum> = Vec::new();
                        for j in 0..js {
                            let law = law_of(secret_seq(w0, ws, j), k);
                            if acc.is_empty() {
                                acc = vec![CompensatedSum::default(); law.len()];
                            }
                            for (a, p) in acc.iter_mut().zip(law) {
                                a.add(p);
                            }
                        }
                        let scale = p_known / (ms * js) as f64;
                        acc.into_iter().map(|a| a.value() * scale).collect()
                    })
                    .collect();
                for y in 0..table[0].len() {
                    let mut col = CompensatedSum::default();
                    for row in &table {
                        col.add(row[y]);
                    }
                    let col = col.value();
                    for row in &table {
                        let t = row[y];
                        if t > 0.0 {
                            h.add(t * (col / t).log2());
                        }
                    }
                }
            }
            h
        })
        .collect();
    let mut total = CompensatedSum::default();
    for g in groups {
        total.merge(g);
    }
    Ok((total.value() / (z.m0 * mo) as f64 / z.n as f64).max(0.0))
}

/// Outcome of one seeded codebook.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub seed: u64,
    pub error_probability: f64,
    pub equivocation_user2: f64,
    pub equivocation_user1: f64,
    /// `[R0, R1, R2]` in bits per channel use.
    pub rates: [f64; 3],
    /// Total probability of the enumerated joint.
    pub joint_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub reports: Vec<SimReport>,
    pub mean_error_probability: f64,
    pub mean_equivocation_user2: f64,
    pub mean_equivocation_user1: f64,
}

/// Simulation config file. `channel` is a channel file path, resolved
/// against the config file's directory, or a fixture name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<String>,
    #[serde(flatten)]
    pub sizes: CodeSizes,
    pub input_dist: InputDist,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub construction: Construction,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.sizes.validate()?;
        if c.seeds.is_empty() {
            return Err(Error::Invalid("seeds must not be empty".into()));
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn simulate_one(
    channel: &ChannelSpec,
    sizes: CodeSizes,
    input_dist: &InputDist,
    seed: u64,
    construction: Construction,
) -> Result<SimReport> {
    let book = build_codebook(channel, sizes, input_dist, seed, construction)?;
    let (pe, mass) = decode_stats(&book, channel)?;
    Ok(SimReport {
        seed,
        error_probability: pe.max(0.0),
        equivocation_user2: exact_equivocation(&book, channel, Listener::User2AboutW1)?,
        equivocation_user1: exact_equivocation(&book, channel, Listener::User1AboutW2)?,
        rates: sizes.rates(),
        joint_mass: mass,
    })
}

/// One report per seed plus seed averages.
pub fn simulate(
    channel: &ChannelSpec,
    sizes: CodeSizes,
    input_dist: &InputDist,
    seeds: &[u64],
    construction: Construction,
) -> Result<SimSummary> {
    if seeds.is_empty() {
        return Err(Error::Invalid("at least one seed is needed".into()));
    }
    let reports: Vec<SimReport> = seeds
        .iter()
        .map(|&s| simulate_one(channel, sizes, input_dist, s, construction))
        .collect::<Result<_>>()?;
    let mean = |f: fn(&SimReport) -> f64| {
        let mut acc = CompensatedSum::default();
        reports.iter().for_each(|r| acc.add(f(r)));
        acc.value() / reports.len() as f64
    };
    Ok(SimSummary {
        mean_error_probability: mean(|r| r.error_probability),
        mean_equivocation_user2: mean(|r| r.equivocation_user2),
        mean_equivocation_user1: mean(|r| r.equivocation_user1),
        reports,
    })
}

/// CSV with one row per seed.
pub fn reports_csv(reports: &[SimReport]) -> String {
    let mut out = String::from("seed,error_probability,equivocation_user2,equivocation_user1,R0,R1,R2\n");
    for r in reports {
        let cells: Vec<String> = [r.error_probability, r.equivocation_user2, r.equivocation_user1]
            .iter()
            .chain(&r.rates)
            .map(|&v| crate::regions::format_sig(v, 9))
            .collect();
        out.push_str(&format!("{},{}\n", r.seed, cells.join(",")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::compose_degraded_channel;
    use crate::fixtures;
    use crate::prob::Kernel;
    use proptest::prelude::*;

    fn sizes(n: usize, m: [usize; 3], j: [usize; 2]) -> CodeSizes {
        CodeSizes {
            n,
            m0: m[0],
            m1: m[1],
            m2: m[2],
            j1: j[0],
            j2: j[1],
        }
    }

    fn uniform22() -> InputDist {
        InputDist::uniform(2, 2)
    }

    #[test]
    fn pure_noise_wiretapper_learns_nothing() {
        let ch = fixtures::pure_noise_wiretap();
        for seed in 0..5 {
            let r = simulate_one(&ch, sizes(4, [1, 4, 1], [1, 1]), &uniform22(), seed, Construction::Random).unwrap();
            assert_eq!(r.equivocation_user2, 0.5);
            assert_eq!(r.equivocation_user2, r.rates[1]);
        }
    }

    #[test]
    fn singleton_message_has_zero_equivocation() {
        let ch = fixtures::leaky_xor(0.05, 0.2, 0.3);
        let book = build_codebook(&ch, sizes(3, [2, 1, 2], [1, 2]), &uniform22(), 1, Construction::Random).unwrap();
        assert_eq!(exact_equivocation(&book, &ch, Listener::User2AboutW1).unwrap(), 0.0);
    }

    #[test]
    fn blind_destination_guesses() {
        let ch = fixtures::blind_destination();
        for (m, j) in [([1, 4, 1], [1, 1]), ([2, 2, 2], [2, 1])] {
            let book = build_codebook(&ch, sizes(3, m, j), &uniform22(), 3, Construction::Random).unwrap();
            let total: usize = m.iter().product();
            assert_eq!(exact_error_probability(&book, &ch).unwrap(), 1.0 - 1.0 / total as f64);
        }
    }

    #[test]
    fn noiseless_destination_decodes_an_injective_code() {
        let ch = fixtures::clean_mac();
        let z = sizes(2, [1, 2, 2], [2, 2]);
        let r = simulate_one(&ch, z, &uniform22(), 0, Construction::Enumerative).unwrap();
        assert_eq!(r.error_probability, 0.0);
        assert_eq!(r.equivocation_user2, r.rates[1]);
        assert_eq!(r.equivocation_user1, r.rates[2]);
    }

    #[test]
    fn noiseless_wiretapper_decodes_w1() {
        let ch = fixtures::noiseless_wiretapper();
        let book = build_codebook(&ch, sizes(2, [1, 4, 1], [1, 1]), &uniform22(), 0, Construction::Enumerative).unwrap();
        assert_eq!(exact_equivocation(&book, &ch, Listener::User2AboutW1).unwrap(), 0.0);
    }

    #[test]
    fn repetition_code_matches_hand_computed_error() {
        // binary symmetric destination on X1 only, codewords 000 and 111
        let ch = fixtures::binary_wiretap(0.1, 0.5);
        let book = Codebook {
            sizes: sizes(3, [1, 2, 1], [1, 1]),
            seed: 0,
            construction: Construction::Enumerative,
            alphabets: [2, 1],
            x1: vec![0, 7],
            x2: vec![0],
        };
        let p: f64 = 0.1;
        let want = 3.0 * p * p * (1.0 - p) + p.powi(3);
        let got = exact_error_probability(&book, &ch).unwrap();
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }

    #[test]
    fn codebooks_are_seeded() {
        let ch = fixtures::leaky_xor(0.05, 0.2, 0.3);
        let z = sizes(4, [2, 2, 2], [2, 2]);
        let a = build_codebook(&ch, z, &uniform22(), 7, Construction::Random).unwrap();
        let b = build_codebook(&ch, z, &uniform22(), 7, Construction::Random).unwrap();
        let c = build_codebook(&ch, z, &uniform22(), 8, Construction::Random).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn letter_frequencies_follow_the_input_law() {
        let ch = fixtures::binary_wiretap(0.1, 0.2);
        let law = InputDist {
            x1: vec![0.3, 0.7],
            x2: vec![1.0],
        };
        let book = build_codebook(&ch, sizes(4, [1, 2500, 1], [1, 1]), &law, 11, Construction::Random).unwrap();
        let ones: usize = book.x1.iter().map(|&s| book.letters(s, 2).iter().sum::<usize>()).sum();
        let freq = ones as f64 / 10_000.0;
        assert!((freq - 0.7).abs() < 0.02, "{freq}");
    }

    #[test]
    fn oversized_enumerations_are_refused() {
        let ch = fixtures::leaky_xor(0.05, 0.2, 0.3);
        let r = build_codebook(&ch, sizes(8, [4, 4, 4], [4, 4]), &uniform22(), 0, Construction::Random);
        assert!(matches!(r, Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn enumerative_books_need_enough_sequences() {
        let ch = fixtures::clean_mac();
        let r = build_codebook(&ch, sizes(1, [1, 4, 1], [1, 1]), &uniform22(), 0, Construction::Enumerative);
        assert!(r.is_err());
    }

    #[test]
    fn blind_wiretapper_on_a_noiseless_code_keeps_w1_secret() {
        let ch = fixtures::clean_mac();
        let summary = simulate(&ch, sizes(2, [1, 2, 2], [1, 1]), &uniform22(), &[0, 1, 2], Construction::Enumerative).unwrap();
        assert_eq!(summary.reports.len(), 3);
        assert_eq!(summary.mean_error_probability, 0.0);
        assert_eq!(summary.mean_equivocation_user2, 0.5);
    }

    #[test]
    fn more_bins_confuse_a_noisy_wiretapper() {
        let ch = fixtures::binary_wiretap(0.05, 0.15);
        let law = InputDist {
            x1: vec![0.5, 0.5],
            x2: vec![1.0],
        };
        let seeds: Vec<u64> = (0..20).collect();
        let mut last = -1.0;
        for j1 in [1, 2, 4] {
            let s = simulate(&ch, sizes(4, [1, 2, 1], [j1, 1]), &law, &seeds, Construction::Random).unwrap();
            assert!(s.mean_equivocation_user2 >= last, "J1 = {j1}: {} < {last}", s.mean_equivocation_user2);
            last = s.mean_equivocation_user2;
        }
    }

    #[test]
    fn degraded_wiretapper_is_more_confused_than_the_destination() {
        // Y2 = Y through a BSC given X2, so H(W1 | Y2^n, ...) >= H(W1 | Y^n, ...)
        let main = Kernel::from_rows(vec![vec![0.9, 0.1], vec![0.9, 0.1], vec![0.1, 0.9], vec![0.1, 0.9]]).unwrap();
        let ch = compose_degraded_channel(2, 2, &main, &Kernel::bsc(0.2).repeat_rows(2), None).unwrap();
        let law = InputDist {
            x1: vec![0.5, 0.5],
            x2: vec![1.0, 0.0],
        };
        for seed in 0..10 {
            let book = build_codebook(&ch, sizes(3, [1, 4, 1], [2, 1]), &law, seed, Construction::Random).unwrap();
            let tap = exact_equivocation(&book, &ch, Listener::User2AboutW1).unwrap();
            let dest = exact_equivocation(&book, &ch, Listener::DestinationAboutW1).unwrap();
            assert!(tap >= dest - 1e-12, "seed {seed}: {tap} < {dest}");
        }
    }

    #[test]
    fn config_round_trips() {
        let text = r#"{"channel": "clean-mac", "n": 2, "M0": 1, "M1": 2, "M2": 2, "J1": 1, "J2": 1,
            "input_dist": {"x1": [0.5, 0.5], "x2": [0.5, 0.5]}, "seeds": [1, 2]}"#;
        let c = SimConfig::from_json(text).unwrap();
        assert_eq!(c.sizes.m1, 2);
        assert_eq!(c.construction, Construction::Random);
        let back = SimConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(SimConfig::from_json(&text.replace("[1, 2]", "[]")).is_err());
        assert!(SimConfig::from_json(&text.replace("\"n\": 2", "\"n\": 0")).is_err());
    }

    #[test]
    fn csv_has_one_row_per_seed() {
        let ch = fixtures::clean_mac();
        let s = simulate(&ch, sizes(2, [1, 2, 2], [1, 1]), &uniform22(), &[4, 5], Construction::Enumerative).unwrap();
        let csv = reports_csv(&s.reports);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("seed,error_probability"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn equivocation_is_bounded_and_label_free(
            seed in 0u64..500, m1 in 1usize..4, j1 in 1usize..3, flip in 0.01f64..0.49,
        ) {
            let ch = fixtures::leaky_xor(0.05, flip, 0.3);
            let book = build_codebook(&ch, sizes(3, [1, m1, 2], [j1, 1]), &uniform22(), seed, Construction::Random).unwrap();
            let e = exact_equivocation(&book, &ch, Listener::User2AboutW1).unwrap();
            prop_assert!(e >= 0.0 && e <= (m1 as f64).log2() / 3.0 + 1e-12);
            let swapped = ch.relabel_y2(&[1, 0]).unwrap();
            let e2 = exact_equivocation(&book, &swapped, Listener::User2AboutW1).unwrap();
            prop_assert!((e - e2).abs() < 1e-12);
            let (_, mass) = decode_stats(&book, &ch).unwrap();
            prop_assert!((mass - 1.0).abs() < 1e-9);
            let pe = exact_error_probability(&book, &ch).unwrap();
            prop_assert!((0.0..=1.0).contains(&pe));
        }
    }
}
