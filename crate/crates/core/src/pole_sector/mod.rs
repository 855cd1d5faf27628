//! Two-scale expansions near the first pole array, pole predictions and the integrability witness.

pub mod predict;
pub mod sweep;
pub mod ratfn;
pub mod two_scale;

pub use predict::{predict_pole, PolePrediction};
pub use ratfn::{Poly, RatFn};
pub use two_scale::{
    compute_f, compute_f_with, compute_g, eval_two_scale, integrability_witness, xi_of, Region, TwoScaleChart,
    TwoScaleValue,
};
pub use sweep::{compare_poles, two_scale_uniformity, PoleComparison, PoleRow, Uniformity, UniformityRow};
