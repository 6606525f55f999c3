//! `verify`: runs the selected checks and writes one report per check.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;

use mandel_laurent::series::mp_sequences;
use mandel_laurent::verifier::{
    verify_induction_steps_with, verify_lemma7_with, verify_theorem1, verify_theorem2,
    verify_theorem3, verify_theorem4,
};
use mandel_laurent::{Tables, VerificationReport};

use crate::cache;
use crate::manifest::RunManifest;
use crate::tables::table_status;
use crate::{Format, Status, Theorem, VerifyArgs};

pub fn reports(tables: &Tables, theorem: Theorem) -> Vec<VerificationReport> {
    let phi = &tables.phi;
    let psi = tables.psi.as_ref().expect("verification needs both tables");
    let mut out = Vec::new();
    if matches!(theorem, Theorem::One | Theorem::All) {
        out.push(verify_theorem1(phi));
    }
    if matches!(theorem, Theorem::Two | Theorem::All) {
        out.push(verify_theorem2(psi));
    }
    if matches!(theorem, Theorem::Three | Theorem::All) {
        out.push(verify_theorem3(psi));
    }
    if matches!(theorem, Theorem::Four | Theorem::All) {
        out.push(verify_theorem4(psi));
    }
    if matches!(theorem, Theorem::Induction | Theorem::All) {
        let l = phi.truncation();
        let sums = mp_sequences(phi, l + 1, l).expect("tables cover M_{L+1} and P_L");
        out.push(verify_lemma7_with(phi, &sums, l));
        out.push(verify_induction_steps_with(phi, psi, &sums));
    }
    out
}

/// The human-readable report; contains no timings so reruns are identical.
pub fn render_text(reports: &[VerificationReport]) -> String {
    let mut text = String::new();
    for r in reports {
        text.push_str(&r.to_string());
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.check.as_str())
        .collect();
    if failed.is_empty() {
        text.push_str(&format!("all {} checks passed\n", reports.len()));
    } else {
        text.push_str(&format!("failed: {}\n", failed.join(", ")));
    }
    text
}

pub fn render_file(report: &VerificationReport, format: Format) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, report)?;
            buf.push(b'\n');
        }
        Format::Csv => report.write_csv(&mut buf)?,
    }
    Ok(buf)
}

pub fn run(args: &VerifyArgs) -> anyhow::Result<Status> {
    let started = Instant::now();
    let (tables, cached) = match cache::tables(args.terms as usize, args.validation.into()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(table_status(&e));
        }
    };
    let reports = reports(&tables, args.theorem);
    io::stdout().write_all(render_text(&reports).as_bytes())?;
    let passed = reports.iter().all(|r| r.passed);

    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let ext = match args.format {
            Format::Json => "json",
            Format::Csv => "csv",
        };
        let mut outputs: Vec<PathBuf> = Vec::new();
        let mut summary = vec![if cached {
            "tables loaded from cache".to_string()
        } else {
            "tables computed".to_string()
        }];
        for r in &reports {
            let path = dir.join(format!("{}.{ext}", r.check.as_str()));
            fs::write(&path, render_file(r, args.format)?)
                .with_context(|| format!("writing {}", path.display()))?;
            outputs.push(path);
            summary.push(format!(
                "{} {} ({:.3}s)",
                r.check,
                if r.passed { "pass" } else { "fail" },
                r.wall_time.as_secs_f64()
            ));
        }
        RunManifest::new("verify", args, started.elapsed(), outputs, passed, summary)?
            .write(&dir.join("manifest.json"))?;
    }
    Ok(if passed { Status::Pass } else { Status::Violation })
}
