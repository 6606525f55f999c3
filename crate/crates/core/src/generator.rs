//! Laurent coefficients of `φ` and `ψ` for `f_c(z) = z^2 - c`.
//!
//! With `x = 1/c`, the normalized critical orbit `g_n = f_c^n(0) / c^{2^{n-1}}`
//! is a polynomial in `x` satisfying
//!
//! ```text
//! g_2 = 1 - x,    g_{n+1} = g_n^2 - x^{2^n - 1}
//! ```
//!
//! and `φ(c) = c · lim g_n^{1/2^{n-1}}`. Replacing `g_n` by `g_{n+1}` only
//! changes `g_n^{1/2^{n-1}}` from `x^{2^n - 1}` on, so once `2^n - 1 > L + 1`
//! the coefficients `B_0 … B_L` (read off `x^1 … x^{L+1}`) are final.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::p_of;
use crate::dyadic::Dyadic;
use crate::series::{compose_check, revert_lemma5, revert_oracle, MonicSeries, UnitSeries};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationLevel {
    None,
    /// Substitute `φ` into `ψ` and require the identity through index `L`.
    #[default]
    Cheap,
    /// `Cheap`, plus an independent reversion compared coefficient by
    /// coefficient.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub terms: usize,
    pub emit_psi: bool,
    pub validation: ValidationLevel,
}

impl GeneratorConfig {
    pub fn new(terms: usize) -> Self {
        GeneratorConfig {
            terms,
            emit_psi: true,
            validation: ValidationLevel::default(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("truncation index must be at least 1")]
    ZeroTerms,
    #[error("reversion paths disagree first at index {index}")]
    ReversionMismatch { index: usize },
    #[error("ψ∘φ = id holds only through index {valid_through:?}, expected {expected}")]
    CompositionFailure {
        valid_through: Option<usize>,
        expected: usize,
    },
}

/// Both coefficient tables for one truncation index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tables {
    pub phi: MonicSeries,
    pub psi: Option<MonicSeries>,
}

/// Smallest `n ≥ 2` with `2^n - 1 > L + 1`.
pub fn iterations_for(terms: usize) -> u32 {
    let mut n = 2u32;
    while (1usize << n) - 1 <= terms + 1 {
        n += 1;
    }
    n
}

/// `g_n` as a unit series in `x = 1/c`, truncated at `truncation`.
pub fn normalized_orbit(n: u32, truncation: usize) -> UnitSeries {
    assert!(n >= 2, "g_1 = -1 is not a unit series");
    let mut coeffs = vec![Dyadic::zero(); truncation + 1];
    coeffs[0] = Dyadic::one();
    if truncation >= 1 {
        coeffs[1] = Dyadic::from_int(-1);
    }
    let mut g = UnitSeries::new(coeffs).expect("constant term is 1");
    for m in 2..n {
        g = g.square();
        let k = (1usize << m) - 1;
        if k <= truncation {
            let mut coeffs = g.into_coeffs();
            coeffs[k] = &coeffs[k] - &Dyadic::one();
            g = UnitSeries::new(coeffs).expect("constant term is 1");
        }
    }
    g
}

/// `B_0 … B_L` from the iterate `g_n`; exact for `L` when `2^n - 1 > L + 1`.
pub fn phi_series_with_iterations(terms: usize, n: u32) -> MonicSeries {
    let root = normalized_orbit(n, terms + 1).root_pow2(n - 1);
    MonicSeries::from_normalized(&root)
}

/// `φ(c) = c + B_0 + B_1/c + … + B_L/c^L`.
pub fn phi_series(terms: usize) -> Result<MonicSeries, GeneratorError> {
    if terms == 0 {
        return Err(GeneratorError::ZeroTerms);
    }
    Ok(phi_series_with_iterations(terms, iterations_for(terms)))
}

/// A series of the hypothesis shape `B_ℓ = R_ℓ / 2^{p_ℓ}` from odd `R_ℓ`.
///
/// Panics if some numerator is even.
pub fn hypothesis_series(numerators: &[BigInt]) -> MonicSeries {
    let coeffs = numerators
        .iter()
        .enumerate()
        .map(|(ell, r)| {
            assert!(r.bit(0), "numerator {r} at index {ell} is even");
            Dyadic::new(r.clone(), p_of(ell as u64) as i64)
        })
        .collect();
    MonicSeries::new(coeffs)
}

/// Checks a reverted pair at the requested level.
pub fn validate_pair(
    phi: &MonicSeries,
    psi: &MonicSeries,
    level: ValidationLevel,
) -> Result<(), GeneratorError> {
    if level == ValidationLevel::None {
        return Ok(());
    }
    let l = phi.truncation();
    let valid = compose_check(psi, phi).expect("equal truncations");
    if valid != Some(l) {
        return Err(GeneratorError::CompositionFailure {
            valid_through: valid,
            expected: l,
        });
    }
    if level == ValidationLevel::Full {
        let oracle = revert_oracle(phi);
        if let Some(index) = (0..=l).find(|&i| oracle.coeff(i) != psi.coeff(i)) {
            return Err(GeneratorError::ReversionMismatch { index });
        }
    }
    Ok(())
}

/// `ψ(w) = w + C_0 + C_1/w + … + C_L/w^L`.
pub fn psi_series(terms: usize, level: ValidationLevel) -> Result<MonicSeries, GeneratorError> {
    Ok(generate(&GeneratorConfig {
        terms,
        emit_psi: true,
        validation: level,
    })?
    .psi
    .expect("psi requested"))
}

pub fn generate(config: &GeneratorConfig) -> Result<Tables, GeneratorError> {
    let phi = phi_series(config.terms)?;
    let psi = if config.emit_psi {
        let psi = revert_lemma5(&phi);
        validate_pair(&phi, &psi, config.validation)?;
        Some(psi)
    } else {
        None
    };
    Ok(Tables { phi, psi })
}
