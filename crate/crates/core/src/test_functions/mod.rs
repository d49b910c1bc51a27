//! The bump ψ and the family of cutoff, majorant and tilted test functions
//! derived from it.

pub mod bump;
pub mod cutoff;

pub use bump::{psi, psi_cdf, psi_hat, psi_jet};
pub use cutoff::{circle_frequency, in_closed_arc, interval_hat, CutoffDescriptor, CutoffKind, FourierNorms, Parity};
