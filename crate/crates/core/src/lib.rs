//! Outage statistics for dual-hop amplify-and-forward relay links with an
//! arbitrary number of Rayleigh or Nakagami-m interferers.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the physical configuration and derived mean SNRs.
//! * [`charcoef`] turns a list of mean INRs into the partial-fraction
//!   coefficients of the aggregate interference density.
//! * [`specfun`] supplies log-gamma, digamma, Bessel K and the two
//!   Meijer-G families used by the closed forms.
//! * [`analytic`] evaluates the series CDFs and PDFs of the end-to-end SINR.
//! * [`oracle`] provides the two independent references: a counter-based
//!   Monte-Carlo simulator and direct quadrature of the conditional integrals.
//!
//! All quantities are linear ratios; decibels only appear in [`model::db_to_linear`]
//! and [`model::linear_to_db`].

pub mod analytic;
pub mod charcoef;
mod ddouble;
pub mod error;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod specfun;
mod sum;

pub use error::{Error, Result};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
