//! Helically symmetric Navier–Stokes flows around the Lamb–Oseen vortex.
//!
//! The crate evolves the perturbation `v = u − a·u^LO(t)` of an Oseen
//! vortex of circulation `a` in a periodic box whose vertical period is one
//! helix pitch, and measures how it decays. See the `book/` directory for a
//! guided tour.

pub mod analytic;
pub mod decomposition;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod presets;
pub mod radial;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{PhysicalField, SpectralField};
pub use grid::GridSpec;

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/quickstart.md")]
    pub mod quickstart {}
    #[doc = include_str!("../../../book/src/fields.md")]
    pub mod fields {}
    #[doc = include_str!("../../../book/src/solver.md")]
    pub mod solver {}
    #[doc = include_str!("../../../book/src/diagnostics.md")]
    pub mod diagnostics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
