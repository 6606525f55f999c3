//! `selftest`: brute-force identities, parity criteria and reversion
//! cross-checks, each reported as one PASS/FAIL line.

use std::fs;
use std::time::Instant;

use anyhow::Context;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mandel_laurent::combinatorics::{
    carry_free, identity_a_check, identity_b_check, multinomial, ord_factorial,
    ord_factorial_naive,
};
use mandel_laurent::generator::hypothesis_series;
use mandel_laurent::{
    compose_check, phi_series, revert_lemma5, revert_oracle, sum_with_order_certificate, Dyadic,
    MonicSeries, Valuation,
};

use crate::manifest::RunManifest;
use crate::{SelftestArgs, Status};

/// A parity rule for `k! / Π parts!`.
pub type ParityRule = fn(&[u64]) -> bool;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteOutcome {
    fn new(name: &'static str, failures: Vec<String>, checked: usize) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            format!("{checked} cases")
        } else {
            format!(
                "{} of {checked} cases failed, first: {}",
                failures.len(),
                failures[0]
            )
        };
        SuiteOutcome {
            name,
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} {}: {}", self.name, self.detail)
    }
}

pub fn identity_a_suite(max_n: u64) -> SuiteOutcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 1..=max_n {
        for m in 1..=n {
            checked += 1;
            if !identity_a_check(m, n) {
                failures.push(format!("m={m} n={n}"));
            }
        }
    }
    SuiteOutcome::new("identity-a", failures, checked)
}

pub fn identity_b_suite(max_n: u64) -> SuiteOutcome {
    let failures = (1..=max_n)
        .filter(|&n| !identity_b_check(n))
        .map(|n| format!("n={n}"))
        .collect();
    SuiteOutcome::new("identity-b", failures, max_n as usize)
}

pub fn ord_factorial_suite(max_n: u64) -> SuiteOutcome {
    let failures = (0..=max_n)
        .filter(|&n| ord_factorial(n) != ord_factorial_naive(n))
        .take(10)
        .map(|n| format!("n={n}"))
        .collect();
    SuiteOutcome::new("legendre", failures, max_n as usize + 1)
}

/// Positive parts summing to `k`, with a random number of cuts.
pub fn random_parts(rng: &mut impl Rng, k: u64) -> Vec<u64> {
    let density: f64 = rng.gen();
    let mut parts = Vec::new();
    let mut run = 1;
    for _ in 1..k {
        if rng.gen_bool(density) {
            parts.push(run);
            run = 1;
        } else {
            run += 1;
        }
    }
    parts.push(run);
    parts
}

pub fn lemma6_parity_suite(rng: &mut impl Rng, trials: usize, parity: ParityRule) -> SuiteOutcome {
    let mut failures = Vec::new();
    for _ in 0..trials {
        let k = rng.gen_range(1..=64);
        let parts = random_parts(rng, k);
        let exact_odd = multinomial(&parts).bit(0);
        if parity(&parts) != exact_odd {
            failures.push(format!("k={k} parts={parts:?}"));
        }
    }
    SuiteOutcome::new("lemma6-parity", failures, trials)
}

/// `ord(B_{i_1} ⋯ B_{i_j}) - ord(B_{k-1}) = ord(multinomial(k; i_t + 1)) ≥ 0`,
/// with equality exactly when `parity` says the multinomial is odd.
pub fn lemma6_valuation_suite(
    rng: &mut impl Rng,
    b: &MonicSeries,
    max_k: u64,
    trials: usize,
    parity: ParityRule,
) -> SuiteOutcome {
    let max_k = max_k.min(b.truncation() as u64 + 1);
    let mut failures = Vec::new();
    for _ in 0..trials {
        let k = rng.gen_range(1..=max_k);
        let shifted = random_parts(rng, k);
        let product = shifted
            .iter()
            .fold(Dyadic::one(), |acc, &s| &acc * b.coeff(s as usize - 1));
        let (Valuation::Finite(lhs), Valuation::Finite(rhs)) =
            (product.ord(), b.coeff(k as usize - 1).ord())
        else {
            failures.push(format!("k={k}: zero coefficient"));
            continue;
        };
        let gap = lhs - rhs;
        let multi = multinomial(&shifted);
        let expected_gap = multi.trailing_zeros().unwrap_or(0) as i64;
        let equality = gap == 0;
        if gap != expected_gap || gap < 0 || equality != parity(&shifted) {
            failures.push(format!("k={k} parts={shifted:?} gap={gap}"));
        }
    }
    SuiteOutcome::new("lemma6-valuation", failures, trials)
}

/// The order certificate predicts `ord(sum)` on random term lists.
pub fn order_fact_suite(rng: &mut impl Rng, trials: usize) -> SuiteOutcome {
    let mut failures = Vec::new();
    for t in 0..trials {
        let n = rng.gen_range(1..=12);
        let terms: Vec<Dyadic> = (0..n)
            .map(|_| {
                let num: i64 = rng.gen_range(-50..=50) * 2 + 1;
                Dyadic::new(num, rng.gen_range(-3..=6))
            })
            .collect();
        let cert = sum_with_order_certificate(&terms);
        let ord = cert.sum.ord();
        let ok = if cert.attains_bound {
            ord == cert.bound
        } else {
            ord > cert.bound
        };
        if !ok {
            failures.push(format!("trial {t}: {terms:?}"));
        }
    }
    SuiteOutcome::new("order-fact", failures, trials)
}

pub fn random_hypothesis_series(rng: &mut impl Rng, terms: usize) -> MonicSeries {
    let numerators: Vec<BigInt> = (0..=terms)
        .map(|_| BigInt::from(rng.gen_range(-(1i64 << 20)..(1i64 << 20)) * 2 + 1))
        .collect();
    hypothesis_series(&numerators)
}

pub fn oracle_suite(rng: &mut impl Rng, terms: usize, random_series: usize) -> SuiteOutcome {
    let mut inputs = vec![("mandelbrot".to_string(), phi_series(terms).expect("terms ≥ 1"))];
    for i in 0..random_series {
        inputs.push((format!("random#{i}"), random_hypothesis_series(rng, terms)));
    }
    let mut failures = Vec::new();
    for (name, b) in &inputs {
        let c = revert_lemma5(b);
        let oracle = revert_oracle(b);
        if let Some(idx) = (0..=terms).find(|&i| c.coeff(i) != oracle.coeff(i)) {
            failures.push(format!("{name}: reversions differ at {idx}"));
            continue;
        }
        let valid = compose_check(&c, b).expect("same truncation");
        if valid != Some(terms) {
            failures.push(format!("{name}: composition valid through {valid:?}"));
        }
    }
    SuiteOutcome::new("reversion-oracle", failures, inputs.len())
}

/// Every suite with the given parity rule.
pub fn suites(seed: u64, terms: usize, parity: ParityRule) -> Vec<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = phi_series(40).expect("terms ≥ 1");
    vec![
        identity_a_suite(10),
        identity_b_suite(30),
        ord_factorial_suite(1_000_000),
        lemma6_parity_suite(&mut rng, 1000, parity),
        lemma6_valuation_suite(&mut rng, &b, 40, 1000, parity),
        order_fact_suite(&mut rng, 1000),
        oracle_suite(&mut rng, terms, 20),
    ]
}

pub fn run(args: &SelftestArgs) -> anyhow::Result<Status> {
    let started = Instant::now();
    if args.terms == 0 {
        anyhow::bail!("selftest terms must be at least 1");
    }
    let outcomes = suites(args.seed, args.terms as usize, carry_free);
    let lines: Vec<String> = outcomes.iter().map(SuiteOutcome::line).collect();
    for line in &lines {
        println!("{line}");
    }
    let passed = outcomes.iter().all(|o| o.passed);
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        RunManifest::new("selftest", args, started.elapsed(), vec![], passed, lines)?
            .write(&dir.join("manifest.json"))?;
    }
    Ok(if passed { Status::Pass } else { Status::Violation })
}
