//! Simulation of multi-output quantum teleportation: exact protocols, device
//! noise from calibration data, state tomography and SWAP-optimal routing.

pub mod channels;
pub mod circuit;
pub mod error;
pub mod experiment;
pub mod protocols;
pub mod qstate;
pub mod tomography;
pub mod transpile;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/teleportation.md")]
    mod teleportation {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/routing.md")]
    mod routing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
