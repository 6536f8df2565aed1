//! Fock-space simulation and Bell-CHSH optimization under particle-number
//! superselection rules (SSR).
//!
//! The library enumerates truncated two-region Fock spaces, builds the quantum
//! states of interest (coherently split particles, spin pairs, spin coherent
//! states, Yurke beam-splitter configurations, finite separable ensembles),
//! applies the SSR sector-dephasing channel, and maximizes the CHSH functional
//! over local dichotomic observables with or without the SSR block-diagonality
//! constraint. A scenario runner ties these together into machine-readable
//! reports; the `ssrbell` binary exposes it on the command line.

pub mod bell;
pub mod entanglement;
mod error;
pub mod fock;
pub mod report;
pub mod scenario;
pub mod ssr;
pub mod states;

pub use error::{Error, Result};
pub use fock::{
    build_fock_space, embed_local, partial_trace, DensityMatrix, FockSpace, LocalOperator, Mode,
    OccupationState, Operator, Region, SectorLabel,
};
