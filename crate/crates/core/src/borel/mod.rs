//! Borel plane: germs, continuation along rays, Laplace transforms and Stokes data.

pub mod germ;
pub mod laplace;
pub mod pade;
pub mod ray;
pub mod stokes;
pub mod sum;
pub mod toy;

pub use germ::{BorelGerm, BranchRule, ClosedForm, GermSource};
