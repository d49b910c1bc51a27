//! Complex length spectra, cutoff test functions, geodesic sums and
//! non-spherical trace formulas for cocompact Kleinian groups.

pub mod algebra;
pub mod diagnostics;
pub mod enumeration;
pub mod error;
pub mod io;
pub mod measures;
pub mod quadrature;
pub mod serde_complex;
pub mod spectrum;
pub mod summation;
pub mod sums;
pub mod test_functions;
pub mod trace_formula;

pub use error::{Error, Result};
