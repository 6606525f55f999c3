//! Checks of the 2-adic valuation statements over coefficient tables.
//!
//! The theorem checks look only at observed valuations and at [`p_of`]. The
//! `M`/`P` statements recompute the composition sums from `B` through
//! [`mp_sequences`]. Violations are collected for every index, never
//! fail-fast, and records are ordered by index so reports are deterministic.

use std::collections::BTreeSet;
use std::fmt;
use std::io;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::combinatorics::p_of;
use crate::dyadic::{Dyadic, Valuation};
use crate::series::{mp_sequences, CompositionSums, MonicSeries};

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => serializer.serialize_i64(*v),
            Valuation::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// `ord(B_ℓ) = -p_ℓ` (the `φ` side).
    Equality,
    /// `ℓ = 0` or odd, nonzero, `ord = -p_ℓ`.
    OddEquality,
    /// Even `ℓ ≥ 2`, nonzero, `ord > -p_ℓ`.
    EvenStrict,
    /// Zero at an index where it is forced.
    ForcedZero,
    /// Zero at an even index outside the forced set.
    ZeroAtEven,
    Violation,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Equality => "equality",
            Classification::OddEquality => "odd-equality",
            Classification::EvenStrict => "even-strict",
            Classification::ForcedZero => "forced-zero",
            Classification::ZeroAtEven => "zero-at-even",
            Classification::Violation => "violation",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Lemma7,
    InductionSteps,
}

impl CheckId {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Theorem1 => "theorem1",
            CheckId::Theorem2 => "theorem2",
            CheckId::Theorem3 => "theorem3",
            CheckId::Theorem4 => "theorem4",
            CheckId::Lemma7 => "lemma7",
            CheckId::InductionSteps => "induction-steps",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValuationRecord {
    pub ell: usize,
    pub expected_p: u64,
    pub observed_ord: Valuation,
    pub is_zero: bool,
    pub classification: Classification,
}

impl ValuationRecord {
    fn observe(ell: usize, value: &Dyadic, rule: fn(usize, u64, Valuation, bool) -> Classification) -> Self {
        let expected_p = p_of(ell as u64);
        let observed_ord = value.ord();
        let is_zero = value.is_zero();
        ValuationRecord {
            ell,
            expected_p,
            observed_ord,
            is_zero,
            classification: rule(ell, expected_p, observed_ord, is_zero),
        }
    }
}

fn exact(p: u64) -> Valuation {
    Valuation::Finite(-(p as i64))
}

/// `B_ℓ ≠ 0` and `ord(B_ℓ) = -p_ℓ`.
pub fn classify_phi(_ell: usize, expected_p: u64, observed: Valuation, is_zero: bool) -> Classification {
    if !is_zero && observed == exact(expected_p) {
        Classification::Equality
    } else {
        Classification::Violation
    }
}

/// The `ψ`-side dichotomy: equality at `ℓ = 0` and odd `ℓ`, strict
/// inequality or zero at even `ℓ ≥ 2`.
pub fn classify_psi(ell: usize, expected_p: u64, observed: Valuation, is_zero: bool) -> Classification {
    let bound = exact(expected_p);
    let equality_index = ell == 0 || ell % 2 == 1;
    match (is_zero, equality_index) {
        (true, true) => Classification::Violation,
        (true, false) if is_forced_zero(ell) => Classification::ForcedZero,
        (true, false) => Classification::ZeroAtEven,
        (false, true) if observed == bound => Classification::OddEquality,
        (false, false) if observed > bound => Classification::EvenStrict,
        (false, _) => Classification::Violation,
    }
}

/// At forced indices only zero passes.
pub fn classify_forced(_ell: usize, _expected_p: u64, _observed: Valuation, is_zero: bool) -> Classification {
    if is_zero {
        Classification::ForcedZero
    } else {
        Classification::Violation
    }
}

/// Whether `ℓ = (2l+1) 2^m` with `m ≥ 2` and `0 ≤ l ≤ 2^m - 3`.
pub fn is_forced_zero(ell: usize) -> bool {
    if ell == 0 {
        return false;
    }
    let m = ell.trailing_zeros();
    if m < 2 {
        return false;
    }
    let l = (ell >> m) / 2;
    l + 3 <= 1usize << m
}

/// `{ (2l+1) 2^m ≤ L : m ≥ 2, 0 ≤ l ≤ 2^m - 3 }`.
pub fn forced_zero_indices(terms: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut m = 2u32;
    while (1usize << m) <= terms {
        let step = 1usize << m;
        for l in 0..=step - 3 {
            let idx = (2 * l + 1) * step;
            if idx > terms {
                break;
            }
            out.insert(idx);
        }
        m += 1;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statement {
    /// `ord(M_k)` vs `ord(B_{k-1})`.
    Lemma7a,
    /// `ord(P_k)` vs `ord(B_k)`.
    Lemma7b,
    /// `ord(M_{ℓ+1} - P_ℓ) = ord(B_ℓ)`.
    StepI,
    /// `ord(C_0 M_ℓ) > ord(B_ℓ)`.
    StepII,
    /// odd `ℓ`: `ord(Σ_{k<ℓ} C_k M_{ℓ-k}) > ord(B_ℓ)`.
    StepIII,
    /// even `ℓ ≥ 2`: `ord(Σ_{k<ℓ} C_k M_{ℓ-k}) = ord(B_ℓ)`.
    StepIV,
}

impl Statement {
    pub fn as_str(self) -> &'static str {
        match self {
            Statement::Lemma7a => "lemma7a",
            Statement::Lemma7b => "lemma7b",
            Statement::StepI => "step-i",
            Statement::StepII => "step-ii",
            Statement::StepIII => "step-iii",
            Statement::StepIV => "step-iv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">")]
    Gt,
}

impl Relation {
    fn holds(self, lhs: Valuation, rhs: Valuation) -> bool {
        match self {
            Relation::Eq => lhs == rhs,
            Relation::Gt => lhs > rhs,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Gt => ">",
        }
    }
}

/// One order statement `lhs_ord <relation> rhs_ord` at index `ell`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub ell: usize,
    pub statement: Statement,
    pub lhs_ord: Valuation,
    pub relation: Relation,
    pub rhs_ord: Valuation,
    pub holds: bool,
}

impl StepRecord {
    fn new(ell: usize, statement: Statement, lhs: Valuation, relation: Relation, rhs: Valuation) -> Self {
        StepRecord {
            ell,
            statement,
            lhs_ord: lhs,
            relation,
            rhs_ord: rhs,
            holds: relation.holds(lhs, rhs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub check: CheckId,
    /// Inclusive index range examined.
    pub range: (usize, usize),
    pub passed: bool,
    pub records: Vec<ValuationRecord>,
    pub steps: Vec<StepRecord>,
    /// Observations reported without being asserted.
    pub notes: Vec<String>,
    /// Not serialized, so that reports are byte-reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl VerificationReport {
    fn finish(
        check: CheckId,
        range: (usize, usize),
        records: Vec<ValuationRecord>,
        steps: Vec<StepRecord>,
        notes: Vec<String>,
        started: Instant,
    ) -> Self {
        let passed = records
            .iter()
            .all(|r| r.classification != Classification::Violation)
            && steps.iter().all(|s| s.holds);
        VerificationReport {
            check,
            range,
            passed,
            records,
            steps,
            notes,
            wall_time: started.elapsed(),
        }
    }

    pub fn violations(&self) -> impl Iterator<Item = &ValuationRecord> {
        self.records
            .iter()
            .filter(|r| r.classification == Classification::Violation)
    }

    pub fn failed_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.steps.iter().filter(|s| !s.holds)
    }

    /// Smallest index with a violation.
    pub fn first_violation(&self) -> Option<usize> {
        let a = self.violations().map(|r| r.ell).min();
        let b = self.failed_steps().map(|s| s.ell).min();
        a.into_iter().chain(b).min()
    }

    /// CSV with columns `ell,expected_p,observed_ord,is_zero,classification`
    /// for theorem reports, `ell,statement,lhs_ord,relation,rhs_ord,holds`
    /// for the order-statement reports.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.steps.is_empty() {
            w.write_record(["ell", "expected_p", "observed_ord", "is_zero", "classification"])?;
            for r in &self.records {
                w.write_record([
                    r.ell.to_string(),
                    r.expected_p.to_string(),
                    r.observed_ord.to_string(),
                    r.is_zero.to_string(),
                    r.classification.to_string(),
                ])?;
            }
        } else {
            w.write_record(["ell", "statement", "lhs_ord", "relation", "rhs_ord", "holds"])?;
            for s in &self.steps {
                w.write_record([
                    s.ell.to_string(),
                    s.statement.as_str().to_string(),
                    s.lhs_ord.to_string(),
                    s.relation.as_str().to_string(),
                    s.rhs_ord.to_string(),
                    s.holds.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let count = self.records.len() + self.steps.len();
        writeln!(
            f,
            "{status} {} over {}..={} ({count} checks)",
            self.check, self.range.0, self.range.1
        )?;
        for r in self.violations() {
            writeln!(
                f,
                "  violation at ell={}: expected p={}, observed ord={}, zero={}",
                r.ell, r.expected_p, r.observed_ord, r.is_zero
            )?;
        }
        for s in self.failed_steps() {
            writeln!(
                f,
                "  violation at ell={}: {} requires {} {} {}",
                s.ell,
                s.statement.as_str(),
                s.lhs_ord,
                s.relation.as_str(),
                s.rhs_ord
            )?;
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        Ok(())
    }
}

/// Every `B_ℓ`, `ℓ ≤ L`, is nonzero with `ord(B_ℓ) = -p_ℓ`.
pub fn verify_theorem1(b: &MonicSeries) -> VerificationReport {
    let started = Instant::now();
    let records = b
        .coeffs()
        .iter()
        .enumerate()
        .map(|(ell, v)| ValuationRecord::observe(ell, v, classify_phi))
        .collect();
    VerificationReport::finish(CheckId::Theorem1, (0, b.truncation()), records, vec![], vec![], started)
}

/// `C_ℓ = 0` at every forced index; other zeros are only noted.
pub fn verify_theorem2(c: &MonicSeries) -> VerificationReport {
    let started = Instant::now();
    let l = c.truncation();
    let forced = forced_zero_indices(l);
    let records = forced
        .iter()
        .map(|&ell| ValuationRecord::observe(ell, c.coeff(ell), classify_forced))
        .collect();
    let mut notes = Vec::new();
    if forced.is_empty() {
        notes.push(format!("no forced-zero indices at or below {l}"));
    }
    let unforced: Vec<String> = (0..=l)
        .filter(|ell| c.coeff(*ell).is_zero() && !forced.contains(ell))
        .map(|ell| ell.to_string())
        .collect();
    if !unforced.is_empty() {
        notes.push(format!("zero outside the forced set at: {}", unforced.join(",")));
    }
    VerificationReport::finish(CheckId::Theorem2, (0, l), records, vec![], notes, started)
}

/// Odd `ℓ`: `C_ℓ ≠ 0` and `ord(C_ℓ) = -p_ℓ`.
pub fn verify_theorem3(c: &MonicSeries) -> VerificationReport {
    let started = Instant::now();
    let records = (1..=c.truncation())
        .step_by(2)
        .map(|ell| ValuationRecord::observe(ell, c.coeff(ell), classify_psi))
        .collect();
    VerificationReport::finish(CheckId::Theorem3, (0, c.truncation()), records, vec![], vec![], started)
}

/// `q_ℓ ≤ p_ℓ` for every `ℓ`, with equality exactly at `ℓ = 0` and odd `ℓ`.
pub fn verify_theorem4(c: &MonicSeries) -> VerificationReport {
    let started = Instant::now();
    let records = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(ell, v)| ValuationRecord::observe(ell, v, classify_psi))
        .collect();
    VerificationReport::finish(CheckId::Theorem4, (0, c.truncation()), records, vec![], vec![], started)
}

pub fn verify_theorem3_and_4(c: &MonicSeries) -> (VerificationReport, VerificationReport) {
    (verify_theorem3(c), verify_theorem4(c))
}

/// The `M_k`, `P_k` valuation statements for `1 ≤ k ≤ k_max`; `sums` must
/// hold `M`, `P` through `k_max`.
pub fn verify_lemma7_with(b: &MonicSeries, sums: &CompositionSums, k_max: usize) -> VerificationReport {
    let started = Instant::now();
    let mut steps = Vec::with_capacity(2 * k_max);
    for k in 1..=k_max {
        let relation = if k % 2 == 1 { Relation::Eq } else { Relation::Gt };
        steps.push(StepRecord::new(
            k,
            Statement::Lemma7a,
            sums.m_k(k).ord(),
            relation,
            b.coeff(k - 1).ord(),
        ));
        steps.push(StepRecord::new(
            k,
            Statement::Lemma7b,
            sums.p_k(k).ord(),
            relation,
            b.coeff(k).ord(),
        ));
    }
    VerificationReport::finish(CheckId::Lemma7, (1, k_max), vec![], steps, vec![], started)
}

/// `ord(M_k) ≥ ord(B_{k-1})` and `ord(P_k) ≥ ord(B_k)`, with equality iff `k`
/// is odd, for `1 ≤ k ≤ min(k_max, L)`.
pub fn verify_lemma7(b: &MonicSeries, k_max: usize) -> VerificationReport {
    let k_max = k_max.min(b.truncation());
    let sums = mp_sequences(b, k_max, k_max).expect("k_max clamped to truncation");
    verify_lemma7_with(b, &sums, k_max)
}

/// Steps (i)–(iv) for `1 ≤ ℓ ≤ L`; `sums` must hold `M` through `L + 1` and
/// `P` through `L`.
pub fn verify_induction_steps_with(
    b: &MonicSeries,
    c: &MonicSeries,
    sums: &CompositionSums,
) -> VerificationReport {
    let started = Instant::now();
    let l = b.truncation().min(c.truncation());
    let mut steps = Vec::with_capacity(3 * l);
    for ell in 1..=l {
        let target = b.coeff(ell).ord();
        let gap = sums.m_k(ell + 1) - sums.p_k(ell);
        steps.push(StepRecord::new(ell, Statement::StepI, gap.ord(), Relation::Eq, target));

        let lead = c.coeff(0) * sums.m_k(ell);
        steps.push(StepRecord::new(ell, Statement::StepII, lead.ord(), Relation::Gt, target));

        let history = Dyadic::dot((0..ell).map(|k| (c.coeff(k), sums.m_k(ell - k))));
        let (statement, relation) = if ell % 2 == 1 {
            (Statement::StepIII, Relation::Gt)
        } else {
            (Statement::StepIV, Relation::Eq)
        };
        steps.push(StepRecord::new(ell, statement, history.ord(), relation, target));
    }
    VerificationReport::finish(CheckId::InductionSteps, (1, l), vec![], steps, vec![], started)
}

pub fn verify_induction_steps(b: &MonicSeries, c: &MonicSeries) -> VerificationReport {
    let l = b.truncation().min(c.truncation());
    let b = b.truncate(l);
    let sums = mp_sequences(&b, l + 1, l).expect("truncation covers M_{L+1} and P_L");
    verify_induction_steps_with(&b, c, &sums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{phi_series, psi_series, ValidationLevel};

    #[test]
    fn forced_zero_examples() {
        assert_eq!(forced_zero_indices(16), BTreeSet::from([4, 8, 12, 16]));
        assert!(forced_zero_indices(3).is_empty());
        assert!(!forced_zero_indices(1000).contains(&20));
        let big = forced_zero_indices(256);
        for ell in [4, 8, 12, 16, 24, 40, 48, 56, 72, 88, 96, 256] {
            assert!(big.contains(&ell), "{ell}");
        }
    }

    #[test]
    fn forced_predicate_matches_enumeration() {
        let set = forced_zero_indices(4096);
        for ell in 0..=4096 {
            assert_eq!(is_forced_zero(ell), set.contains(&ell), "{ell}");
        }
    }

    #[test]
    fn classification_table() {
        use Classification::*;
        let f = Valuation::Finite;
        assert_eq!(classify_psi(0, 1, f(-1), false), OddEquality);
        assert_eq!(classify_psi(0, 1, f(0), false), Violation);
        assert_eq!(classify_psi(3, 7, f(-7), false), OddEquality);
        assert_eq!(classify_psi(3, 7, Valuation::Infinite, true), Violation);
        assert_eq!(classify_psi(2, 4, f(-2), false), EvenStrict);
        assert_eq!(classify_psi(2, 4, f(-4), false), Violation);
        assert_eq!(classify_psi(4, 7, Valuation::Infinite, true), ForcedZero);
        assert_eq!(classify_psi(20, 39, Valuation::Infinite, true), ZeroAtEven);
        assert_eq!(classify_phi(5, 10, f(-10), false), Equality);
        assert_eq!(classify_phi(5, 10, f(-9), false), Violation);
    }

    #[test]
    fn small_pipeline_passes_everything() {
        let b = phi_series(24).unwrap();
        let c = psi_series(24, ValidationLevel::Full).unwrap();
        let t1 = verify_theorem1(&b);
        assert!(t1.passed);
        assert_eq!(t1.records[0].observed_ord, Valuation::Finite(-1));
        assert_eq!(t1.records[3].observed_ord, Valuation::Finite(-7));
        let t2 = verify_theorem2(&c);
        assert!(t2.passed);
        assert_eq!(
            t2.records.iter().map(|r| r.ell).collect::<Vec<_>>(),
            vec![4, 8, 12, 16, 24]
        );
        let (t3, t4) = verify_theorem3_and_4(&c);
        assert!(t3.passed && t4.passed);
        assert_eq!(t4.records[1].observed_ord, Valuation::Finite(-3));
        assert_eq!(t4.records[2].classification, Classification::EvenStrict);
        assert!(verify_lemma7(&b, 24).passed);
        let steps = verify_induction_steps(&b, &c);
        assert!(steps.passed);
        let at = |ell, st| steps.steps.iter().find(|s| s.ell == ell && s.statement == st).unwrap();
        assert_eq!(at(1, Statement::StepI).lhs_ord, Valuation::Finite(-3));
        assert_eq!(at(2, Statement::StepIV).relation, Relation::Eq);
        assert_eq!(at(3, Statement::StepIII).relation, Relation::Gt);
    }

    #[test]
    fn violations_are_collected_exhaustively() {
        let c = psi_series(16, ValidationLevel::Cheap).unwrap();
        let bad = c
            .with_coeff(8, Dyadic::new(1, 3))
            .with_coeff(5, Dyadic::zero())
            .with_coeff(12, Dyadic::new(3, 5));
        let t2 = verify_theorem2(&bad);
        assert!(!t2.passed);
        assert_eq!(t2.violations().map(|r| r.ell).collect::<Vec<_>>(), vec![8, 12]);
        assert_eq!(t2.first_violation(), Some(8));
        let t4 = verify_theorem4(&bad);
        assert_eq!(t4.violations().map(|r| r.ell).collect::<Vec<_>>(), vec![5]);
        let text = t2.to_string();
        assert!(text.starts_with("FAIL theorem2"));
        assert!(text.contains("ell=8"));
    }

    #[test]
    fn theorem2_notes_empty_range() {
        let c = psi_series(3, ValidationLevel::Cheap).unwrap();
        let t2 = verify_theorem2(&c);
        assert!(t2.passed);
        assert!(t2.records.is_empty());
        assert!(t2.notes[0].contains("no forced-zero"));
    }

    #[test]
    fn csv_layout() {
        let c = psi_series(4, ValidationLevel::Cheap).unwrap();
        let mut buf = Vec::new();
        verify_theorem4(&c).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "ell,expected_p,observed_ord,is_zero,classification");
        assert_eq!(lines[1], "0,1,-1,false,odd-equality");
        assert_eq!(lines[5], "4,8,inf,true,forced-zero");
    }

    #[test]
    fn json_omits_wall_time() {
        let c = psi_series(4, ValidationLevel::Cheap).unwrap();
        let json = serde_json::to_string(&verify_theorem2(&c)).unwrap();
        assert!(!json.contains("wall"));
        assert!(json.contains(r#""observed_ord":"inf""#));
    }
}
