//! Independent references for the closed forms: a Monte-Carlo simulator of
//! the channel and direct quadrature of the conditional integrals.

pub mod integral;
pub mod montecarlo;
pub mod rng;

pub use integral::{quad_cdf_sm1, quad_cdf_sm2, quad_pdf_sm1};
pub use montecarlo::{
    empirical_cdf, empirical_cdf_sorted, empirical_pdf, sample_shifted_sum, sample_sinr,
    sample_sinr_with_hops, wilson_interval, EmpiricalCurve, GainModel, SinrSampleSet, Z99,
};
