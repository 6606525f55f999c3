//! Independent rational-arithmetic oracles for the generated coefficients.
//!
//! Nothing here uses the dyadic type or the series module for the expected
//! side: orbit polynomials are built with plain integer vectors, roots use the
//! power recurrence `r = a^α` over `BigRational`, and `ψ` comes from Lagrange
//! inversion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use mandel_laurent::generator::iterations_for;
use mandel_laurent::{phi_series, psi_series, Dyadic, ValidationLevel};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_rational(x: &Dyadic) -> BigRational {
    let e = x.exponent();
    if e >= 0 {
        BigRational::new(x.numerator().clone(), BigInt::one() << e as usize)
    } else {
        BigRational::from_integer(x.numerator() << (-e) as usize)
    }
}

fn mul(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `a^alpha` for `a_0 = 1`: `r_k = (1/k) Σ_{i=1}^{k} ((α+1) i - k) a_i r_{k-i}`.
fn power(a: &[BigRational], alpha: &BigRational, len: usize) -> Vec<BigRational> {
    let mut r = vec![BigRational::one()];
    for k in 1..len {
        let mut acc = BigRational::zero();
        for i in 1..=k.min(a.len() - 1) {
            let weight = (alpha + BigRational::one()) * rat(i as i64, 1) - rat(k as i64, 1);
            acc += weight * &a[i] * &r[k - i];
        }
        r.push(acc / rat(k as i64, 1));
    }
    r
}

/// `f_c^n(0) / c^{2^{n-1}}` in `x = 1/c`, as exact integers, through `x^len-1`.
fn orbit_integers(n: u32, len: usize) -> Vec<BigInt> {
    let mut g = vec![BigInt::zero(); len];
    g[0] = BigInt::one();
    g[1] = BigInt::from(-1);
    for m in 2..n {
        let mut sq = vec![BigInt::zero(); len];
        for i in 0..len {
            for j in 0..len - i {
                sq[i + j] += &g[i] * &g[j];
            }
        }
        let k = (1usize << m) - 1;
        if k < len {
            sq[k] -= 1;
        }
        g = sq;
    }
    g
}

fn phi_by_power_recurrence(terms: usize) -> Vec<BigRational> {
    let n = iterations_for(terms);
    let g: Vec<BigRational> = orbit_integers(n, terms + 2)
        .into_iter()
        .map(BigRational::from_integer)
        .collect();
    let alpha = BigRational::new(BigInt::one(), BigInt::one() << (n - 1) as usize);
    power(&g, &alpha, terms + 2)[1..].to_vec()
}

/// `C_ℓ` by Lagrange inversion: with `y = 1/φ` and `x = 1/c`,
/// `[y^n] x(y) = (1/n) [x^{n-1}] (φ/c)^n`, and `ψ(w) = 1/x(y)`.
fn psi_by_lagrange(b: &[BigRational]) -> Vec<BigRational> {
    let l = b.len() - 1;
    let len = l + 2;
    let mut normalized = vec![BigRational::one()];
    normalized.extend(b.iter().cloned());
    // h[n-1] = [y^n] x(y), n = 1..=L+2
    let mut h = Vec::with_capacity(len);
    let mut pow = vec![BigRational::one()];
    for n in 1..=len {
        pow = mul(&pow, &normalized, len);
        h.push(&pow[n - 1] / rat(n as i64, 1));
    }
    // 1 / H(y), H = Σ h[n-1] y^{n-1}, h[0] = 1
    let mut inv = vec![BigRational::one()];
    for k in 1..len {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            acc += &h[i] * &inv[k - i];
        }
        inv.push(-acc);
    }
    inv[1..].to_vec()
}

#[test]
fn hand_expansion_of_the_third_iterate() {
    // φ(c)/c = (1 - x)^{1/2} (1 - x^3 (1 - x)^{-2})^{1/4} + O(x^4)
    let one_minus_x = vec![BigRational::one(), rat(-1, 1)];
    let sqrt = power(&one_minus_x, &rat(1, 2), 4);
    assert_eq!(sqrt, vec![rat(1, 1), rat(-1, 2), rat(-1, 8), rat(-1, 16)]);
    // x^3 (1 - x)^{-2} = x^3 + O(x^4), so the second factor is 1 - x^3/4 + O(x^4)
    let second = power(
        &[BigRational::one(), BigRational::zero(), BigRational::zero(), rat(-1, 1)],
        &rat(1, 4),
        4,
    );
    let product = mul(&sqrt, &second, 4);
    assert_eq!(product, vec![rat(1, 1), rat(-1, 2), rat(-1, 8), rat(-5, 16)]);

    let phi = phi_series(2).unwrap();
    for ell in 0..3 {
        assert_eq!(to_rational(phi.coeff(ell)), product[ell + 1], "B_{ell}");
    }
    // C_0 = -B_0, C_1 = -B_1
    let psi = psi_series(2, ValidationLevel::Full).unwrap();
    assert_eq!(to_rational(psi.coeff(0)), rat(1, 2));
    assert_eq!(to_rational(psi.coeff(1)), rat(1, 8));
}

#[test]
fn phi_matches_rational_power_recurrence() {
    let terms = 48;
    let expected = phi_by_power_recurrence(terms);
    let phi = phi_series(terms).unwrap();
    for ell in 0..=terms {
        assert_eq!(to_rational(phi.coeff(ell)), expected[ell], "B_{ell}");
    }
}

#[test]
fn psi_matches_lagrange_inversion() {
    let terms = 40;
    let phi = phi_series(terms).unwrap();
    let b: Vec<BigRational> = phi.coeffs().iter().map(to_rational).collect();
    let expected = psi_by_lagrange(&b);
    let psi = psi_series(terms, ValidationLevel::Cheap).unwrap();
    for ell in 0..=terms {
        assert_eq!(to_rational(psi.coeff(ell)), expected[ell], "C_{ell}");
    }
    // values pinned from the oracle run above
    assert_eq!(expected[2], rat(1, 4));
    assert_eq!(expected[3], rat(15, 128));
    assert_eq!(expected[5], rat(-47, 1024));
}
