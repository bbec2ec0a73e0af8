//! Exit times of iterated Brownian motion (IBM) and Brownian-time Brownian
//! motion (BTBM) from bounded domains.
//!
//! * [`series`]: the exit law of Brownian motion from an interval, its
//!   derivatives and moments.
//! * [`domains`]: shapes, their geometry and comparison domains.
//! * [`bm_exit`]: exact and Euler sampling of Brownian exit times.
//! * [`iterated`]: survival curves and moments of the IBM and BTBM exit
//!   times by conditional Monte Carlo, quadrature or path simulation.
//! * [`verify`]: numerical checks of the isoperimetric and dominance
//!   inequalities.
//!
//! The guide in `book/` walks through each part; its examples run as
//! doctests of this crate.

pub mod bm_exit;
pub mod domains;
pub mod error;
pub mod estimate;
pub mod iterated;
pub mod quadrature;
pub mod rng;
pub mod series;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/interval.md")]
    mod interval {}
    #[doc = include_str!("../../../book/src/exit-times.md")]
    mod exit_times {}
    #[doc = include_str!("../../../book/src/iterated.md")]
    mod iterated {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
