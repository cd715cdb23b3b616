//! Exact evaluation of randomized cardinal voting schemes against range voting.
//!
//! Every utility and probability is an exact [`Rational`]. Voters hold
//! [`Preference`]s over `m` candidates, a [`Profile`] collects `n` of them, and a
//! [`Mechanism`] maps a profile to a [`CandidateDistribution`]. On top of that
//! sit the exhaustive property checkers ([`properties`]), the adversarial and
//! structured profile families ([`generators`]) and the welfare-bound machinery
//! ([`bounds`]).
//!
//! Candidates and voters are 1-indexed wherever an index crosses the public
//! API. Slices (`values()`, `probs()`) are ordinary 0-based vectors, so
//! candidate `j` lives at position `j - 1`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod distribution;
mod error;
pub mod generators;
pub mod mechanisms;
pub mod perm;
pub mod preference;
pub mod profile;
pub mod properties;
pub mod rational;
pub mod welfare;

pub use distribution::CandidateDistribution;
pub use error::{Error, Result};
pub use mechanisms::Mechanism;
pub use preference::{normalize, Preference};
pub use profile::Profile;
pub use rational::Rational;
pub use welfare::{ratio, WelfareReport};
