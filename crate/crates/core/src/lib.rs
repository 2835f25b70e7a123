//! Rate-equivocation regions and secrecy capacity for discrete memoryless
//! generalized multiple access channels with confidential messages.

pub mod channel;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod infotheory;
pub mod lp;
pub mod one_set_bounds;
pub mod optimizer;
pub mod prob;
pub mod regions;
pub mod two_set_bounds;
pub mod wiretap_sim;

pub use error::{Error, Result};
