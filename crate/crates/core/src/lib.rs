//! Sharp Landau-type radii for three classes of bounded harmonic mappings
//! on the unit disc.
//!
//! For each class the crate computes the univalence radius `rho` (the
//! unique zero of the margin function) and the schlicht-disc radius `R`
//! (the peak value of the extremal profile), evaluates the special
//! functions those formulas need, and builds explicit non-injectivity
//! witnesses for the extremal maps just beyond `rho`.
//!
//! ```text
//! specfun   Lerch transcendent, dilogarithm, ln(1-z), compensated sums
//! series    coefficient bounds, margin J(r), majorant S(rho)
//! radii     rho / R per class, root solving, table grids
//! extremal  extremal maps, real profiles, peak search, witnesses
//! oracle    brute-force sums and the identity audit
//! tables    published reference tables and discrepancy flags
//! cli       `landau` command-line front end
//! ```

mod bisect;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod oracle;
pub mod radii;
pub mod series;
pub mod specfun;
pub mod tables;

pub use error::{Error, Result};
pub use series::{ClassSpec, CoeffRule, SumStart};
pub use specfun::{SumResult, ToleranceConfig};
