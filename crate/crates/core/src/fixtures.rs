//! Small named channels with known closed-form behaviour.
//!
//! Inputs are binary unless stated otherwise; rows of per-receiver kernels are
//! indexed `x1 * |X2| + x2`. Outputs not mentioned are constant (alphabet
//! size one).

use crate::channel::{compose_degraded_channel, ChannelSpec};
use crate::error::{Error, Result};
use crate::prob::Kernel;

fn constant(rows: usize) -> Kernel {
    Kernel::uniform(rows, 1)
}

/// `Y = (X1, X2)` noiseless, users blind. Secrecy region `{R1 <= 1, R0 + R1 <= 2}`.
pub fn clean_mac() -> ChannelSpec {
    ChannelSpec::from_marginals(2, 2, &Kernel::identity(4), &constant(4), &constant(4))
        .expect("valid fixture")
}

/// `Y = (X1, X2)` noiseless and user 2 hears `X1` noiselessly.
pub fn noiseless_wiretapper() -> ChannelSpec {
    let tap = Kernel::deterministic(&[0, 0, 1, 1], 2);
    ChannelSpec::from_marginals(2, 2, &Kernel::identity(4), &constant(4), &tap).expect("valid fixture")
}

/// `Y = (X1, X2)` noiseless and `Y2 = Y`.
pub fn y2_copy_of_y() -> ChannelSpec {
    compose_degraded_channel(
        2,
        2,
        &Kernel::identity(4),
        &Kernel::deterministic(&[0, 0, 1, 1, 2, 2, 3, 3], 4),
        None,
    )
    .expect("valid fixture")
}

/// `Y = (X1, X2)` noiseless, `Y2` uniform over two symbols regardless of inputs.
pub fn pure_noise_wiretap() -> ChannelSpec {
    ChannelSpec::from_marginals(2, 2, &Kernel::identity(4), &constant(4), &Kernel::uniform(4, 2))
        .expect("valid fixture")
}

/// Destination sees nothing: `Y` uniform over two symbols, users blind.
pub fn blind_destination() -> ChannelSpec {
    ChannelSpec::from_marginals(2, 2, &Kernel::uniform(4, 2), &constant(4), &constant(4))
        .expect("valid fixture")
}

fn xor_bsc(flip: f64) -> Kernel {
    // rows (x1, x2) -> y = x1 ^ x2 through a BSC
    let b = Kernel::bsc(flip);
    Kernel::from_rows(vec![b.row(0).to_vec(), b.row(1).to_vec(), b.row(1).to_vec(), b.row(0).to_vec()])
        .expect("valid rows")
}

/// `Y = X1 ^ X2 ^ N1`, `Y2 = Y ^ N2` with independent flips, user 1 blind.
pub fn binary_degraded(main_flip: f64, tap_flip: f64) -> ChannelSpec {
    compose_degraded_channel(2, 2, &xor_bsc(main_flip), &Kernel::bsc(tap_flip).repeat_rows(2), None)
        .expect("valid fixture")
}

/// `|X2| = 1`: `Y` is a noisy copy of `X1`, `Y2 = X1` noiselessly.
pub fn noisy_main_clean_tap(flip: f64) -> ChannelSpec {
    ChannelSpec::from_marginals(2, 1, &Kernel::bsc(flip), &constant(2), &Kernel::identity(2))
        .expect("valid fixture")
}

/// `Y = X1 ^ X2` through a BSC and `Y2` an independent draw from the same
/// law: marginally identical outputs, jointly not a cascade.
pub fn identity_copy(flip: f64) -> ChannelSpec {
    let law = xor_bsc(flip);
    ChannelSpec::from_marginals(2, 2, &law, &constant(4), &law).expect("valid fixture")
}

/// Binary wiretap channel with a silent second user: `Y = BSC(main)(X1)`,
/// `Y2 = BSC(tap)(X1)`.
pub fn binary_wiretap(main_flip: f64, tap_flip: f64) -> ChannelSpec {
    ChannelSpec::from_marginals(2, 1, &Kernel::bsc(main_flip), &constant(2), &Kernel::bsc(tap_flip))
        .expect("valid fixture")
}

/// Binary destination `Y = X1 ^ X2 ^ N` with user 2 hearing `X1` through a
/// BSC and user 1 hearing `X2` through a BSC.
pub fn leaky_xor(main_flip: f64, tap2_flip: f64, tap1_flip: f64) -> ChannelSpec {
    let hear_x1 = Kernel::from_rows(vec![
        Kernel::bsc(tap2_flip).row(0).to_vec(),
        Kernel::bsc(tap2_flip).row(0).to_vec(),
        Kernel::bsc(tap2_flip).row(1).to_vec(),
        Kernel::bsc(tap2_flip).row(1).to_vec(),
    ])
    .expect("valid rows");
    let hear_x2 = Kernel::from_rows(vec![
        Kernel::bsc(tap1_flip).row(0).to_vec(),
        Kernel::bsc(tap1_flip).row(1).to_vec(),
        Kernel::bsc(tap1_flip).row(0).to_vec(),
        Kernel::bsc(tap1_flip).row(1).to_vec(),
    ])
    .expect("valid rows");
    ChannelSpec::from_marginals(2, 2, &xor_bsc(main_flip), &hear_x2, &hear_x1).expect("valid fixture")
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "clean-mac",
    "noiseless-wiretapper",
    "y2-copy-of-y",
    "pure-noise-wiretap",
    "blind-destination",
    "binary-degraded",
    "noisy-main-clean-tap",
    "identity-copy",
    "binary-wiretap",
    "leaky-xor",
];

/// Fixture lookup with the default parameters used throughout the docs.
pub fn by_name(name: &str) -> Result<ChannelSpec> {
    Ok(match name {
        "clean-mac" => clean_mac(),
        "noiseless-wiretapper" => noiseless_wiretapper(),
        "y2-copy-of-y" => y2_copy_of_y(),
        "pure-noise-wiretap" => pure_noise_wiretap(),
        "blind-destination" => blind_destination(),
        "binary-degraded" => binary_degraded(0.1, 0.1),
        "noisy-main-clean-tap" => noisy_main_clean_tap(0.1),
        "identity-copy" => identity_copy(0.1),
        "binary-wiretap" => binary_wiretap(0.1, 0.25),
        "leaky-xor" => leaky_xor(0.05, 0.2, 0.3),
        other => {
            return Err(Error::Invalid(format!(
                "unknown fixture `{other}`, expected one of {NAMES:?}"
            )))
        }
    })
}
