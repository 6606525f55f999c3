//! Binomials, multinomials and their parity; 2-adic valuation of factorials.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("parts sum to {actual}, expected {expected}")]
    PartsSumMismatch { expected: u64, actual: u64 },
    #[error("multinomial parts must be positive")]
    ZeroPart,
}

/// `ord(n!)` by Legendre's formula at p = 2: `n - s2(n)`.
pub fn ord_factorial(n: u64) -> u64 {
    n - u64::from(n.count_ones())
}

/// `ord(n!)` as `Σ_{i≥1} floor(n / 2^i)`.
pub fn ord_factorial_naive(n: u64) -> u64 {
    let mut total = 0;
    let mut q = n / 2;
    while q > 0 {
        total += q;
        q /= 2;
    }
    total
}

/// Denominator exponent `p_ℓ = ℓ + 1 + ord((ℓ+1)!)`, which also equals
/// `ord((2ℓ+2)!)`.
pub fn p_of(ell: u64) -> u64 {
    let p = ell + 1 + ord_factorial(ell + 1);
    debug_assert_eq!(p, ord_factorial(2 * ell + 2));
    p
}

/// Whether `k! / Π parts!` is odd, by carry-freeness of the binary sum of
/// the parts (Kummer).
pub fn multinomial_is_odd(k: u64, parts: &[u64]) -> Result<bool, CombinatoricsError> {
    check_parts(k, parts)?;
    Ok(carry_free(parts))
}

/// The carry-free test without the precondition checks.
pub fn carry_free(parts: &[u64]) -> bool {
    let mut seen = 0u64;
    for &p in parts {
        if seen & p != 0 {
            return false;
        }
        seen |= p;
    }
    true
}

fn check_parts(k: u64, parts: &[u64]) -> Result<(), CombinatoricsError> {
    if parts.contains(&0) {
        return Err(CombinatoricsError::ZeroPart);
    }
    let actual: u64 = parts.iter().sum();
    if actual != k {
        return Err(CombinatoricsError::PartsSumMismatch {
            expected: k,
            actual,
        });
    }
    Ok(())
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut acc = BigUint::one();
    row.push(acc.clone());
    for i in 0..n {
        acc = acc * (n - i) / (i + 1);
        row.push(acc.clone());
    }
    row
}

/// Exact multinomial `k! / Π parts!` (parts may be zero here).
pub fn multinomial(parts: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    let mut running = 0;
    for &p in parts {
        running += p;
        acc *= binomial(running, p);
    }
    acc
}

/// An ordered tuple `(i_1, …, i_j)` of non-negative integers. The sums used
/// throughout are over tuples with `Σ (i_t + 1) = k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    pub parts: Vec<u64>,
}

impl Composition {
    pub fn j(&self) -> usize {
        self.parts.len()
    }

    /// `I = Σ i_t`.
    pub fn index_sum(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// `k = Σ (i_t + 1)`.
    pub fn k(&self) -> u64 {
        self.index_sum() + self.parts.len() as u64
    }

    /// The shifted parts `i_t + 1`, which sum to `k`.
    pub fn shifted(&self) -> Vec<u64> {
        self.parts.iter().map(|i| i + 1).collect()
    }
}

/// Lexicographic odometer over all `(i_1, …, i_j)` with `Σ (i_t + 1) = k`.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<u64>>,
}

/// Streams every tuple with `j` entries and `Σ (i_t + 1) = k`, in
/// lexicographic order. There are `C(k-1, j-1)` of them; none when `j > k`
/// or `j == 0`.
pub fn compositions_summing_to(k: u64, j: usize) -> Compositions {
    let current = if j == 0 || j as u64 > k {
        None
    } else {
        let mut start = vec![0; j];
        start[j - 1] = k - j as u64;
        Some(start)
    };
    Compositions { current }
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let parts = self.current.take()?;
        let out = Composition {
            parts: parts.clone(),
        };
        self.current = advance(parts);
        Some(out)
    }
}

fn advance(mut parts: Vec<u64>) -> Option<Vec<u64>> {
    let j = parts.len();
    if j < 2 {
        return None;
    }
    if parts[j - 1] > 0 {
        parts[j - 2] += 1;
        parts[j - 1] -= 1;
        return Some(parts);
    }
    let s = (0..j - 1).rev().find(|&t| parts[t] > 0)?;
    if s == 0 {
        return None;
    }
    let v = parts[s];
    parts[s] = 0;
    parts[s - 1] += 1;
    parts[j - 1] = v - 1;
    Some(parts)
}

/// Brute-force check of
/// `Σ_{j=1}^{m} C(m, m-j) Σ_{r_1+…+r_j=n, r_t≥1} multinomial(n; r) = m^n`.
pub fn identity_a_check(m: u64, n: u64) -> bool {
    identity_a_lhs(m, n) == BigUint::from(m).pow(n as u32)
}

pub fn identity_a_lhs(m: u64, n: u64) -> BigUint {
    let mut total = BigUint::zero();
    for j in 1..=m.min(n) as usize {
        let inner: BigUint = compositions_summing_to(n, j)
            .map(|c| multinomial(&c.shifted()))
            .sum();
        total += binomial(m, m - j as u64) * inner;
    }
    total
}

/// Exact check of `Σ_{i=0}^{⌊n/2⌋} C(n, 2i) = 2^{n-1}`.
pub fn identity_b_check(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let lhs: BigUint = (0..=n / 2).map(|i| binomial(n, 2 * i)).sum();
    lhs == BigUint::one() << (n - 1) as usize
}
