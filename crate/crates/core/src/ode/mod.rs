//! Complex-path integration of the normalized equation.

pub mod dopri;
pub mod path;
pub mod poles;
pub mod seed;
pub mod system;

pub use path::{integrate_path, Chart, IntegrateOptions, Path, PoleRecord, Sample, Segment, SolutionTrace};
pub use poles::{detect_poles, detect_poles_with, laurent_fit, refine_pole};
pub use seed::{borel_seed, continue_around, far_field_init, tritronquee_seed, Continuations, Seed};
pub use system::{h_to_y, map_x_to_z, map_z_to_x, rhs_h, rhs_y, y_to_h, ZPoint};
