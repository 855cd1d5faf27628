//! Numerical laboratory for the tronquee solutions of Painleve I in
//! Boutroux-like coordinates.
#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod borel;
pub mod cli_run;
pub mod config;
pub mod connection;
pub mod cycles;
pub mod error;
pub mod ode;
pub mod pole_sector;
pub mod quad;
pub mod rat;
pub mod series;

pub use error::{Error, Result};
