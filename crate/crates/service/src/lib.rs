//! Command line and HTTP front ends for the `kgval` validator.

pub mod api;
pub mod cli;
