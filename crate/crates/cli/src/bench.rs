//! `bench`: generation and reversion timings with coefficient sizes.

use std::fs;
use std::io::{self, Write};
use std::time::Instant;

use anyhow::Context;

use mandel_laurent::{phi_series, revert_lemma5, MonicSeries};

use crate::manifest::{beside, RunManifest};
use crate::{BenchArgs, Status};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub terms: usize,
    pub generate_secs: f64,
    pub revert_secs: f64,
    pub max_b_numerator_bits: u64,
    pub max_c_numerator_bits: u64,
    pub max_b_exponent: i64,
}

fn max_bits(s: &MonicSeries) -> u64 {
    s.coeffs().iter().map(|c| c.numerator_bits()).max().unwrap_or(0)
}

pub fn measure(terms: usize) -> anyhow::Result<BenchRow> {
    let t0 = Instant::now();
    let phi = phi_series(terms)?;
    let generate_secs = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let psi = revert_lemma5(&phi);
    let revert_secs = t1.elapsed().as_secs_f64();
    Ok(BenchRow {
        terms,
        generate_secs,
        revert_secs,
        max_b_numerator_bits: max_bits(&phi),
        max_c_numerator_bits: max_bits(&psi),
        max_b_exponent: phi.coeffs().iter().map(|c| c.exponent()).max().unwrap_or(0),
    })
}

pub fn run(args: &BenchArgs) -> anyhow::Result<Status> {
    let started = Instant::now();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "terms",
        "generate_secs",
        "revert_secs",
        "max_b_numerator_bits",
        "max_c_numerator_bits",
        "max_b_exponent",
    ])?;
    let mut summary = Vec::new();
    for &terms in &args.terms {
        if terms == 0 {
            anyhow::bail!("bench terms must be at least 1");
        }
        let row = measure(terms as usize)?;
        w.write_record([
            row.terms.to_string(),
            format!("{:.6}", row.generate_secs),
            format!("{:.6}", row.revert_secs),
            row.max_b_numerator_bits.to_string(),
            row.max_c_numerator_bits.to_string(),
            row.max_b_exponent.to_string(),
        ])?;
        summary.push(format!(
            "L={} total {:.3}s",
            row.terms,
            row.generate_secs + row.revert_secs
        ));
    }
    let bytes = w.into_inner().context("flushing bench table")?;
    match &args.out {
        None => io::stdout().write_all(&bytes)?,
        Some(path) => {
            fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            RunManifest::new("bench", args, started.elapsed(), vec![path.clone()], true, summary)?
                .write(&beside(path))?;
        }
    }
    Ok(Status::Pass)
}
