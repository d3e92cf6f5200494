//! Simulation and analysis toolkit for discrete time crystals in short,
//! disordered, periodically driven spin chains.
//!
//! The crate is organised bottom-up:
//!
//! - [`spinmodel`]: chain/noise/drive descriptions, disorder sampling, seeding.
//! - [`hilbert`]: dense product-basis algebra (Pauli strings, Hamiltonians,
//!   eigendecomposition propagators, expectations, single-site reductions).
//! - [`floquet`]: pulse unitaries, one-period operators and protocol execution.
//! - [`analysis`]: time averages and purity diagnostics.
//! - [`sweep`]: deterministic, parallel disorder-averaged parameter sweeps.
//! - [`oracle`]: an independent brute-force verification path.
//! - [`io`], [`presets`]: run configuration, CSV/SVG emission, named presets.
//!
//! Units: the drive period `T` is 1, so every energy is the dimensionless
//! product `E·T`. Basis convention: site 1 is the most significant bit of a
//! basis index and a 0 bit is spin up (σᶻ = +1).

pub mod analysis;
pub mod error;
pub mod floquet;
pub mod hilbert;
pub mod io;
pub mod oracle;
pub mod presets;
pub mod spinmodel;
pub mod sweep;

pub use error::{DtcError, Result};

/// Version tag recorded in result provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
