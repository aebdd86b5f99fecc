//! Exact scalar, polynomial and series arithmetic shared by every module.

pub mod numbers;
pub mod poly;
pub mod ring;
pub mod series;
pub mod volume;

pub use numbers::{
    bernoulli, binomial, double_factorial, factorial, format_rational, int, multinomial, parse_rational, rat, to_f64,
    zeta_negative_odd, Rational,
};
pub use poly::{HodgePoly, PiPoly, UniPoly};
pub use ring::Ring;
pub use series::TruncatedSeries;
pub use volume::{monomial_symmetric_f64, partition_of, Partition, VolumePoly};
