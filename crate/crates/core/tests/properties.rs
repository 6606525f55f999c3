use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mandel_laurent::combinatorics::{multinomial, multinomial_is_odd, p_of};
use mandel_laurent::generator::hypothesis_series;
use mandel_laurent::series::{compose_check, mp_sequences};
use mandel_laurent::verifier::{verify_induction_steps, verify_lemma7, verify_theorem4};
use mandel_laurent::{
    phi_series, revert_lemma5, revert_oracle, sum_with_order_certificate, Dyadic, MonicSeries,
    Valuation,
};

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (any::<i64>(), -40i64..40).prop_map(|(n, e)| Dyadic::new(n, e))
}

fn nonzero_dyadic() -> impl Strategy<Value = Dyadic> {
    dyadic().prop_filter("nonzero", |d| !d.is_zero())
}

fn positive_parts() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..20, 1..8).prop_filter("k ≤ 64", |v| v.iter().sum::<u64>() <= 64)
}

fn odd_numerators(len: usize) -> impl Strategy<Value = Vec<BigInt>> {
    prop::collection::vec((-(1i64 << 30)..(1i64 << 30)).prop_map(|n| BigInt::from(2 * n + 1)), len)
}

fn random_hypothesis(rng: &mut ChaCha8Rng, terms: usize) -> MonicSeries {
    let nums: Vec<BigInt> = (0..=terms)
        .map(|_| BigInt::from(rng.gen_range(-(1i64 << 24)..(1i64 << 24)) * 2 + 1))
        .collect();
    hypothesis_series(&nums)
}

proptest! {
    #[test]
    fn valuation_of_products_adds(x in dyadic(), y in dyadic()) {
        prop_assert_eq!((&x * &y).ord(), x.ord() + y.ord());
    }

    #[test]
    fn valuation_of_sums(x in dyadic(), y in dyadic()) {
        let s = &x + &y;
        prop_assert!(s.ord() >= x.ord().min(y.ord()));
        if x.ord() != y.ord() {
            prop_assert_eq!(s.ord(), x.ord().min(y.ord()));
        }
    }

    #[test]
    fn normalization_is_canonical(n in any::<i32>(), e in -30i64..30, shift in 0usize..20) {
        let direct = Dyadic::new(n, e);
        let scaled = Dyadic::new(BigInt::from(n) << shift, e + shift as i64);
        prop_assert_eq!(&direct, &scaled);
        prop_assert_eq!(Dyadic::new(direct.numerator().clone(), direct.exponent()), direct.clone());
        if !direct.is_zero() {
            prop_assert!(direct.numerator().bit(0));
            prop_assert_eq!(direct.ord(), Valuation::Finite(-direct.exponent()));
        }
    }

    #[test]
    fn string_form_round_trips(x in dyadic()) {
        let text = x.to_string();
        prop_assert_eq!(text.parse::<Dyadic>().unwrap(), x.clone());
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<Dyadic>(&json).unwrap(), x);
    }

    #[test]
    fn order_certificate_predicts_valuation(terms in prop::collection::vec(nonzero_dyadic(), 1..10)) {
        let cert = sum_with_order_certificate(&terms);
        if cert.attains_bound {
            prop_assert_eq!(cert.sum.ord(), cert.bound);
        } else {
            prop_assert!(cert.sum.ord() > cert.bound);
        }
    }

    #[test]
    fn carry_rule_matches_exact_parity(parts in positive_parts()) {
        let k = parts.iter().sum();
        prop_assert_eq!(multinomial_is_odd(k, &parts).unwrap(), multinomial(&parts).bit(0));
    }

    #[test]
    fn lemma6_on_hypothesis_shaped_coefficients(
        nums in odd_numerators(40),
        parts in prop::collection::vec(0u64..12, 1..6),
    ) {
        let k: u64 = parts.iter().map(|i| i + 1).sum();
        prop_assume!(k <= 40);
        let b = hypothesis_series(&nums);
        let product = parts.iter().fold(Dyadic::one(), |acc, &i| &acc * b.coeff(i as usize));
        let gap = product.ord().finite().unwrap() - b.coeff(k as usize - 1).ord().finite().unwrap();
        let shifted: Vec<u64> = parts.iter().map(|i| i + 1).collect();
        let multi = multinomial(&shifted);
        prop_assert_eq!(gap, multi.trailing_zeros().unwrap() as i64);
        prop_assert_eq!(gap == 0, multinomial_is_odd(k, &shifted).unwrap());
    }

    #[test]
    fn reversion_is_an_involution(nums in odd_numerators(18)) {
        let b = hypothesis_series(&nums);
        let c = revert_lemma5(&b);
        prop_assert_eq!(&revert_lemma5(&c), &b);
        prop_assert_eq!(&revert_oracle(&c), &b);
    }
}

#[test]
fn lemma6_on_mandelbrot_coefficients() {
    let b = phi_series(40).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..2000 {
        let j = rng.gen_range(1..=6);
        let parts: Vec<u64> = (0..j).map(|_| rng.gen_range(0..10)).collect();
        let k: u64 = parts.iter().map(|i| i + 1).sum();
        if k > 40 {
            continue;
        }
        let product = parts.iter().fold(Dyadic::one(), |acc, &i| &acc * b.coeff(i as usize));
        let gap = product.ord().finite().unwrap() - b.coeff(k as usize - 1).ord().finite().unwrap();
        let shifted: Vec<u64> = parts.iter().map(|i| i + 1).collect();
        assert!(gap >= 0);
        assert_eq!(gap == 0, multinomial_is_odd(k, &shifted).unwrap(), "{parts:?}");
    }
}

#[test]
fn oracle_equivalence_on_a_hundred_random_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for i in 0..100 {
        let b = random_hypothesis(&mut rng, 64);
        let c = revert_lemma5(&b);
        assert_eq!(revert_oracle(&b), c, "series #{i}");
        assert_eq!(compose_check(&c, &b), Ok(Some(64)), "series #{i}");
    }
}

#[test]
fn oracle_equivalence_on_mandelbrot_series() {
    let b = phi_series(64).unwrap();
    let c = revert_lemma5(&b);
    assert_eq!(revert_oracle(&b), c);
    assert_eq!(revert_lemma5(&c), b);
}

#[test]
fn theorem4_and_lemma7_hold_for_hypothesis_shaped_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..50 {
        let b = random_hypothesis(&mut rng, 64);
        let c = revert_lemma5(&b);
        let t4 = verify_theorem4(&c);
        assert!(t4.passed, "series #{i}: {t4}");
        assert!(verify_lemma7(&b, 64).passed, "series #{i}");
        assert!(verify_induction_steps(&b, &c).passed, "series #{i}");
    }
}

#[test]
fn hypothesis_series_have_the_stated_denominators() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let b = random_hypothesis(&mut rng, 30);
    for ell in 0..=30 {
        assert_eq!(b.coeff(ell).ord(), Valuation::Finite(-(p_of(ell as u64) as i64)));
    }
}

#[test]
fn m_and_p_are_deterministic() {
    let b = phi_series(60).unwrap();
    let first = mp_sequences(&b, 60, 60).unwrap();
    let second = mp_sequences(&b, 60, 60).unwrap();
    assert_eq!(first, second);
}
