//! Special functions needed by the closed forms: log-gamma, digamma,
//! modified Bessel functions and the two Meijer-G families.

mod bessel;
mod gamma;
mod meijer;
mod mellin;

pub use bessel::{bessel_k0, bessel_k1, bessel_k1_scaled, one_minus_x_k1};
pub use gamma::{digamma, ln_binomial, ln_gamma, ln_gamma_complex, psi_k, EULER_GAMMA};
pub use meijer::{meijer_g_frac, meijer_g_frac_norm, meijer_g_ln, meijer_g_ln_norm};
pub use mellin::{mellin_barnes_oracle, MeijerFamily};
