//! Exact intersection numbers on the moduli spaces of stable curves.
//!
//! Several independent routes compute the same numbers and are checked against
//! each other:
//!
//! * [`witten`]: ψ-class correlators by the DVV/Virasoro recursion, with the
//!   genus 0 and genus 1 closed formulas as oracles;
//! * [`kappa`]: mixed κ–ψ numbers, Kontsevich and Weil–Petersson volumes;
//! * [`virasoro`]: the truncated partition function and the operators `L_n`;
//! * [`stable_graphs`] and [`cohft`]: Givental's graph sum for CohFTs;
//! * [`tr`]: Eynard–Orantin recursion on local spectral curves;
//! * [`ribbon`]: Kontsevich's trivalent fatgraph sum;
//! * [`asymptotics`] and [`mirzakhani`]: floating-point validation.

pub mod asymptotics;
pub mod cohft;
pub mod error;
pub mod exact;
pub mod kappa;
pub mod mirzakhani;
pub mod ribbon;
pub mod stable_graphs;
pub mod tr;
pub mod virasoro;
pub mod witten;

pub use error::{Error, Result};
pub use exact::{PiPoly, Rational, Ring, VolumePoly};
pub use witten::{CorrelatorKey, WittenEngine};
