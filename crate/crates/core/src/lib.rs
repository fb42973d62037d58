//! Finite-length security analysis of decoy-state BB84.
//!
//! Closed-form bounds live beside exact oracles small enough to enumerate:
//! [`privacy`] for Toeplitz hashing, [`oracle`] for Eve's states under Pauli
//! channels, [`bounds`] for the phase-error bounds, [`decoy`] and [`rates`]
//! for parameter estimation and key rates, and [`protocol`] for a seeded
//! simulation of a whole session.

pub mod bounds;
pub mod channel;
pub mod decoy;
pub mod error;
pub mod gf2;
pub mod oracle;
pub mod privacy;
pub mod protocol;
pub mod rates;

pub use error::{Error, Result};

// The guide's chapters, compiled so their examples run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/gf2.md")]
    mod gf2 {}
    #[doc = include_str!("../../../book/src/privacy.md")]
    mod privacy {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/decoy.md")]
    mod decoy {}
    #[doc = include_str!("../../../book/src/rates.md")]
    mod rates {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
