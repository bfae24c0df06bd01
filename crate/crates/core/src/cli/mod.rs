//! Support for the command-line experiment runner.

pub mod bessel;
pub mod experiments;
pub mod metric;
pub mod report;
