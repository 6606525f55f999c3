//! Exact Laurent coefficients of the uniformizing maps for the complement of
//! the Mandelbrot set (`f_c(z) = z^2 - c`), and machine checks of their
//! 2-adic valuations.
//!
//! * [`dyadic`]: exact `K / 2^q` arithmetic and the valuation `ord`.
//! * [`combinatorics`]: factorial valuations, multinomial parity, compositions.
//! * [`series`]: truncated series algebra and two reversion algorithms.
//! * [`generator`]: `B_ℓ` from the critical orbit, `C_ℓ` by reversion.
//! * [`verifier`]: valuation checks with structured reports.

pub mod combinatorics;
pub mod dyadic;
pub mod generator;
pub mod series;
pub mod verifier;

pub use dyadic::{sum_with_order_certificate, Dyadic, OrderCertificate, Valuation};
pub use generator::{generate, phi_series, psi_series, GeneratorConfig, GeneratorError, Tables, ValidationLevel};
pub use series::{compose_check, revert_lemma5, revert_oracle, MonicSeries, SeriesError, UnitSeries};
pub use verifier::{VerificationReport, ValuationRecord};
