//! Truncated formal series over [`Dyadic`].
//!
//! Two carriers are used:
//!
//! * [`UnitSeries`]: `1 + a_1 x + a_2 x^2 + … + a_L x^L`, a power series with
//!   constant term exactly one. Products, powers, inverses and `2^n`-th roots
//!   stay in this class and keep dyadic coefficients.
//! * [`MonicSeries`]: `w + c_0 + c_1/w + … + c_L/w^L`, the shape of both
//!   uniformizing maps at infinity. The leading `w` is implicit.
//!
//! Reversion of a monic series is implemented twice. [`revert_lemma5`] runs
//! the recursion `C_ℓ = -Σ_{k<ℓ} C_k M_{ℓ-k} - (M_{ℓ+1} - P_ℓ)` over the
//! weighted composition sums of [`mp_sequences`]. [`revert_oracle`] solves the
//! coefficient equations of `ψ(φ(c)) = c` directly through powers of
//! `c / φ(c)` and never touches `M` or `P`. [`compose_check`] substitutes one
//! series into the other by Horner's rule and reports how far the identity
//! holds.
//!
//! Truncation: a coefficient of index `n` of any result here depends only on
//! input coefficients of index `≤ n`, so every operation is exact through the
//! minimum input truncation and reports that index.

use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::binomial_row;
use crate::dyadic::Dyadic;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("unit series must have constant term 1, got {0}")]
    NonUnitConstant(String),
    #[error("unit series needs at least the constant term")]
    Empty,
    #[error("need coefficients through index {needed}, series is truncated at {have}")]
    InsufficientTruncation { needed: usize, have: usize },
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("declared truncation {declared} but {count} coefficients present")]
    BadLength { declared: usize, count: usize },
}

// Output length at which convolutions fan out over rayon.
const PAR_MIN_LEN: usize = 48;

/// `(a * b) mod x^len`, where `a[i] == 0` for `i < a_lo` and `b[i] == 0` for
/// `i < b_lo`.
fn convolve(a: &[Dyadic], a_lo: usize, b: &[Dyadic], b_lo: usize, len: usize) -> Vec<Dyadic> {
    let coeff = |d: usize| -> Dyadic {
        if d < a_lo + b_lo {
            return Dyadic::zero();
        }
        let lo = a_lo.max(d.saturating_sub(b.len().saturating_sub(1)));
        let hi = (d - b_lo).min(a.len().saturating_sub(1));
        if lo > hi {
            return Dyadic::zero();
        }
        Dyadic::dot((lo..=hi).map(|i| (&a[i], &b[d - i])))
    };
    if len >= PAR_MIN_LEN {
        (0..len).into_par_iter().map(coeff).collect()
    } else {
        (0..len).map(coeff).collect()
    }
}

fn mul_truncated(a: &[Dyadic], b: &[Dyadic], len: usize) -> Vec<Dyadic> {
    convolve(a, 0, b, 0, len)
}

/// Power series `1 + a_1 x + … + a_L x^L`.
#[derive(Clone, PartialEq, Eq)]
pub struct UnitSeries {
    coeffs: Vec<Dyadic>,
}

impl UnitSeries {
    /// Fails unless `coeffs[0] == 1`.
    pub fn new(coeffs: Vec<Dyadic>) -> Result<Self, SeriesError> {
        match coeffs.first() {
            None => Err(SeriesError::Empty),
            Some(c) if !c.is_one() => Err(SeriesError::NonUnitConstant(c.to_string())),
            Some(_) => Ok(UnitSeries { coeffs }),
        }
    }

    /// The constant series 1, truncated at `truncation`.
    pub fn one(truncation: usize) -> Self {
        let mut coeffs = vec![Dyadic::zero(); truncation + 1];
        coeffs[0] = Dyadic::one();
        UnitSeries { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Dyadic {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<Dyadic> {
        self.coeffs
    }

    pub fn truncate(&self, truncation: usize) -> Self {
        let n = (truncation + 1).min(self.coeffs.len());
        UnitSeries {
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Exact truncated product; truncation is the minimum of the operands'.
    pub fn mul(&self, other: &UnitSeries) -> UnitSeries {
        let len = self.coeffs.len().min(other.coeffs.len());
        UnitSeries {
            coeffs: mul_truncated(&self.coeffs, &other.coeffs, len),
        }
    }

    pub fn square(&self) -> UnitSeries {
        self.mul(self)
    }

    /// `self^e` by repeated squaring; `e == 0` gives 1.
    pub fn pow(&self, e: u64) -> UnitSeries {
        let mut result = UnitSeries::one(self.truncation());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        result
    }

    /// Multiplicative inverse `1 / self`.
    pub fn inverse(&self) -> UnitSeries {
        let a = &self.coeffs;
        let mut w: Vec<Dyadic> = Vec::with_capacity(a.len());
        w.push(Dyadic::one());
        for k in 1..a.len() {
            let s = Dyadic::dot((1..=k).map(|i| (&a[i], &w[k - i])));
            w.push(-s);
        }
        UnitSeries { coeffs: w }
    }

    /// The unique square root with constant term 1, solved coefficient by
    /// coefficient from `r^2 = self`.
    pub fn sqrt(&self) -> UnitSeries {
        let a = &self.coeffs;
        let mut r: Vec<Dyadic> = Vec::with_capacity(a.len());
        r.push(Dyadic::one());
        for k in 1..a.len() {
            // 2 r_k = a_k - Σ_{i=1}^{k-1} r_i r_{k-i}
            let cross = Dyadic::dot((1..=(k - 1) / 2).map(|i| (&r[i], &r[k - i])));
            let mut rk = &a[k].half() - &cross;
            if k % 2 == 0 {
                let mid = &r[k / 2];
                rk = &rk - &(mid * mid).half();
            }
            r.push(rk);
        }
        UnitSeries { coeffs: r }
    }

    /// The `2^n`-th root with constant term 1, by `n` successive square roots.
    pub fn root_pow2(&self, n: u32) -> UnitSeries {
        (0..n).fold(self.clone(), |acc, _| acc.sqrt())
    }
}

impl fmt::Debug for UnitSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter().map(|c| c.to_string())).finish()
    }
}

pub fn mul_unit(a: &UnitSeries, b: &UnitSeries) -> UnitSeries {
    a.mul(b)
}

pub fn pow_unit(a: &UnitSeries, e: u64) -> UnitSeries {
    a.pow(e)
}

pub fn root_pow2(a: &UnitSeries, n: u32) -> UnitSeries {
    a.root_pow2(n)
}

/// `w + c_0 + c_1/w + … + c_L/w^L`; the leading `w` is not stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MonicSeries {
    coeffs: Vec<Dyadic>,
}

impl MonicSeries {
    /// Series from `c_0, …, c_L`. An empty vector is promoted to `c_0 = 0`.
    pub fn new(mut coeffs: Vec<Dyadic>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Dyadic::zero());
        }
        MonicSeries { coeffs }
    }

    /// The identity series `w`, truncated at `truncation`.
    pub fn identity(truncation: usize) -> Self {
        MonicSeries {
            coeffs: vec![Dyadic::zero(); truncation + 1],
        }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Dyadic] {
        &self.coeffs
    }

    pub fn coeff(&self, ell: usize) -> &Dyadic {
        &self.coeffs[ell]
    }

    pub fn get(&self, ell: usize) -> Option<&Dyadic> {
        self.coeffs.get(ell)
    }

    pub fn into_coeffs(self) -> Vec<Dyadic> {
        self.coeffs
    }

    pub fn truncate(&self, truncation: usize) -> Self {
        let n = (truncation + 1).min(self.coeffs.len());
        MonicSeries {
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    /// Copy with `coeffs[ell]` replaced.
    pub fn with_coeff(&self, ell: usize, value: Dyadic) -> Self {
        let mut s = self.clone();
        s.coeffs[ell] = value;
        s
    }

    /// `φ(c)/c = 1 + c_0 x + c_1 x^2 + …` with `x = 1/w`, truncated at `L + 1`.
    pub fn normalized(&self) -> UnitSeries {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Dyadic::one());
        coeffs.extend(self.coeffs.iter().cloned());
        UnitSeries { coeffs }
    }

    /// Inverse of [`MonicSeries::normalized`]: reads `c_ℓ` off `x^{ℓ+1}`.
    pub fn from_normalized(u: &UnitSeries) -> Self {
        MonicSeries::new(u.coeffs()[1..].to_vec())
    }

    fn require(&self, needed: usize) -> Result<(), SeriesError> {
        if self.truncation() < needed {
            Err(SeriesError::InsufficientTruncation {
                needed,
                have: self.truncation(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Debug for MonicSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter().map(|c| c.to_string())).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    truncation: usize,
    coeffs: Vec<Dyadic>,
}

impl Serialize for MonicSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SeriesJson {
            truncation: self.truncation(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MonicSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(deserializer)?;
        if raw.coeffs.len() != raw.truncation + 1 {
            return Err(serde::de::Error::custom(SeriesError::BadLength {
                declared: raw.truncation,
                count: raw.coeffs.len(),
            }));
        }
        Ok(MonicSeries { coeffs: raw.coeffs })
    }
}

/// The weighted composition sums `M_1 … M_{m_max}` and `P_1 … P_{p_max}`.
///
/// With `U(x) = Σ_i B_i x^{i+1}`, the inner sums over tuples with
/// `Σ (i_t + 1) = k` are the coefficients `[x^k] U^j`, so
/// `M_k = Σ_j C(k, j) [x^k] U^j` and `P_k = Σ_j C(k, j) [x^{k+1}] U^j`.
/// The powers `U^j` are built incrementally; `U^j` vanishes below `x^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionSums {
    /// `m[k - 1] = M_k`.
    pub m: Vec<Dyadic>,
    /// `p[k - 1] = P_k`.
    pub p: Vec<Dyadic>,
}

impl CompositionSums {
    /// `M_k` for `k ≥ 1`.
    pub fn m_k(&self, k: usize) -> &Dyadic {
        &self.m[k - 1]
    }

    /// `P_k` for `k ≥ 1`.
    pub fn p_k(&self, k: usize) -> &Dyadic {
        &self.p[k - 1]
    }
}

pub fn mp_sequences(
    b: &MonicSeries,
    m_max: usize,
    p_max: usize,
) -> Result<CompositionSums, SeriesError> {
    // M_k reads B up to index k-1, P_k up to index k.
    let needed = m_max.saturating_sub(1).max(p_max);
    if m_max > 0 || p_max > 0 {
        b.require(needed)?;
    }
    let degree = m_max.max(p_max + 1);
    let j_max = m_max.max(p_max);

    let mut u = vec![Dyadic::zero(); degree + 1];
    for (i, slot) in u.iter_mut().enumerate().skip(1) {
        if let Some(c) = b.get(i - 1) {
            *slot = c.clone();
        }
    }

    let mut m = vec![Dyadic::zero(); m_max];
    let mut p = vec![Dyadic::zero(); p_max];
    let rows: Vec<Vec<BigInt>> = (0..=degree as u64)
        .map(|k| binomial_row(k).into_iter().map(BigInt::from).collect())
        .collect();

    let mut power = u.clone();
    for j in 1..=j_max {
        if j > 1 {
            power = convolve(&power, j - 1, &u, 1, degree + 1);
        }
        for k in j..=m_max {
            let term = power[k].mul_int(&rows[k][j]);
            m[k - 1] = &m[k - 1] + &term;
        }
        for k in j..=p_max {
            let term = power[k + 1].mul_int(&rows[k][j]);
            p[k - 1] = &p[k - 1] + &term;
        }
    }
    Ok(CompositionSums { m, p })
}

/// `M_1 … M_{k_max}`; needs `B` through index `k_max - 1`.
pub fn m_sequence(b: &MonicSeries, k_max: usize) -> Result<Vec<Dyadic>, SeriesError> {
    Ok(mp_sequences(b, k_max, 0)?.m)
}

/// `P_1 … P_{k_max}`; needs `B` through index `k_max`.
pub fn p_sequence(b: &MonicSeries, k_max: usize) -> Result<Vec<Dyadic>, SeriesError> {
    Ok(mp_sequences(b, 0, k_max)?.p)
}

/// Inverse series by the recursion over `M_k`, `P_k`.
///
/// `C_ℓ` consumes `M_{ℓ+1}` and `P_ℓ`, which read `B` only through index
/// `ℓ`; the result has the same truncation as `b`.
pub fn revert_lemma5(b: &MonicSeries) -> MonicSeries {
    let l = b.truncation();
    let sums = mp_sequences(b, l + 1, l).expect("truncation covers M_{L+1} and P_L");
    revert_with_sums(b, &sums)
}

/// [`revert_lemma5`] with precomputed sums (`M` through `L + 1`, `P` through `L`).
pub fn revert_with_sums(b: &MonicSeries, sums: &CompositionSums) -> MonicSeries {
    let l = b.truncation();
    let mut c: Vec<Dyadic> = Vec::with_capacity(l + 1);
    c.push(-b.coeff(0));
    for ell in 1..=l {
        let history = Dyadic::dot((0..ell).map(|k| (&c[k], sums.m_k(ell - k))));
        let tail = sums.m_k(ell + 1) - sums.p_k(ell);
        c.push(-(&history + &tail));
    }
    MonicSeries::new(c)
}

/// Inverse series by direct coefficient matching on `ψ(φ(c)) = c`.
///
/// With `x = 1/c` and `W = c/φ(c)`, the coefficient of `x^n` in
/// `ψ(φ(c)) - c` is `B_n + Σ_{ℓ=1}^{n} C_ℓ [x^{n-ℓ}] W^ℓ` for `n ≥ 1` and
/// `B_0 + C_0` for `n = 0`. Each equation is triangular in `C_n`.
pub fn revert_oracle(b: &MonicSeries) -> MonicSeries {
    let l = b.truncation();
    let w = b.normalized().truncate(l).inverse();
    let mut c: Vec<Dyadic> = Vec::with_capacity(l + 1);
    c.push(-b.coeff(0));
    // acc[n] = Σ_{ℓ < current} C_ℓ [x^{n-ℓ}] W^ℓ
    let mut acc = vec![Dyadic::zero(); l + 1];
    let mut power: Vec<Dyadic> = Vec::new();
    for ell in 1..=l {
        let cn = -(b.coeff(ell) + &acc[ell]);
        // W^ℓ is only read below x^{L-ℓ+1}.
        let len = l - ell + 1;
        power = if ell == 1 {
            w.coeffs()[..len].to_vec()
        } else {
            mul_truncated(&power, w.coeffs(), len)
        };
        if !cn.is_zero() {
            for n in ell + 1..=l {
                let t = &cn * &power[n - ell];
                acc[n] = &acc[n] + &t;
            }
        }
        c.push(cn);
    }
    MonicSeries::new(c)
}

/// The coefficients of `ψ(φ(c)) - c` in powers of `1/c`, through index `L`.
pub fn compose_residual(c: &MonicSeries, b: &MonicSeries) -> Result<Vec<Dyadic>, SeriesError> {
    if c.truncation() != b.truncation() {
        return Err(SeriesError::TruncationMismatch {
            left: c.truncation(),
            right: b.truncation(),
        });
    }
    let l = b.truncation();
    // y = 1/φ(c) = x W, as a power series in x.
    let w = b.normalized().truncate(l).inverse();
    let mut y = vec![Dyadic::zero(); l + 1];
    y[1..].clone_from_slice(&w.coeffs()[..l]);

    // Horner: S_L = C_L, S_ℓ = C_ℓ + y S_{ℓ+1}; only S_ℓ mod x^{L-ℓ+1} matters.
    let mut tail = Vec::new();
    for ell in (1..=l).rev() {
        let len = l - ell + 1;
        let mut s = if tail.is_empty() {
            vec![Dyadic::zero(); len]
        } else {
            convolve(&y, 1, &tail, 0, len)
        };
        s[0] = &s[0] + c.coeff(ell);
        tail = s;
    }
    let mut residual = if tail.is_empty() {
        vec![Dyadic::zero(); l + 1]
    } else {
        convolve(&y, 1, &tail, 0, l + 1)
    };
    residual[0] = &residual[0] + c.coeff(0);
    for (r, bn) in residual.iter_mut().zip(b.coeffs()) {
        *r = &*r + bn;
    }
    Ok(residual)
}

/// Largest `T ≤ L` such that `ψ(φ(c)) = c + 0 + 0/c + … + 0/c^T` exactly.
/// `None` when already the constant term fails.
pub fn compose_check(c: &MonicSeries, b: &MonicSeries) -> Result<Option<usize>, SeriesError> {
    let residual = compose_residual(c, b)?;
    Ok(match residual.iter().position(|r| !r.is_zero()) {
        None => Some(b.truncation()),
        Some(0) => None,
        Some(n) => Some(n - 1),
    })
}
