//! `generate`: B and C tables in the exact dyadic string format.

use std::fs;
use std::io::{self, Write};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

use mandel_laurent::{MonicSeries, Tables};

use crate::cache::{self, TableError};
use crate::manifest::{beside, RunManifest};
use crate::{Format, GenerateArgs, Status};

/// `ell,B,C` rows for `0..=L`.
pub fn write_csv<W: Write>(phi: &MonicSeries, psi: &MonicSeries, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ell", "B", "C"])?;
    for ell in 0..=phi.truncation() {
        w.write_record([
            ell.to_string(),
            phi.coeff(ell).to_string(),
            psi.coeff(ell).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TablesJson<'a> {
    terms: usize,
    phi: &'a MonicSeries,
    psi: &'a MonicSeries,
}

pub fn write_json<W: Write>(phi: &MonicSeries, psi: &MonicSeries, mut out: W) -> io::Result<()> {
    let doc = TablesJson {
        terms: phi.truncation(),
        phi,
        psi,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")
}

pub fn render(tables: &Tables, format: Format) -> anyhow::Result<Vec<u8>> {
    let psi = tables.psi.as_ref().context("ψ table missing")?;
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(&tables.phi, psi, &mut buf)?,
        Format::Json => write_json(&tables.phi, psi, &mut buf)?,
    }
    Ok(buf)
}

/// Maps table acquisition failures onto exit statuses.
pub fn table_status(e: &TableError) -> Status {
    match e {
        TableError::Inconsistent(_) | TableError::CorruptCache { .. } => Status::Inconsistent,
        TableError::Io(_) => Status::Failure,
    }
}

pub fn run(args: &GenerateArgs) -> anyhow::Result<Status> {
    let started = Instant::now();
    let (tables, cached) = match cache::tables(args.terms as usize, args.validation.into()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(table_status(&e));
        }
    };
    let bytes = render(&tables, args.format)?;
    match &args.out {
        None => io::stdout().write_all(&bytes)?,
        Some(path) => {
            fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            let summary = vec![format!(
                "wrote indices 0..={} ({})",
                args.terms,
                if cached { "cached" } else { "computed" }
            )];
            RunManifest::new(
                "generate",
                args,
                started.elapsed(),
                vec![path.clone()],
                true,
                summary,
            )?
            .write(&beside(path))?;
        }
    }
    Ok(Status::Pass)
}
