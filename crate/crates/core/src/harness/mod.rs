//! Sweeps over many semigroups, the example fixtures, and the theorem
//! checks that turn structural results into falsifiable properties.

pub mod fixtures;
pub mod sweep;
pub mod theorems;

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apery::{compute_apery, AperyData, Limits};
use crate::classify::{report_from_apery, ClassificationReport};
use crate::error::{Error, Result};
use crate::lattice::{AffineSemigroup, LatticeVector};

pub use fixtures::{run_fixtures, run_fixtures_with, Fixture, FixtureResult};
pub use sweep::{sweep, SweepSpec};
pub use theorems::{check_theorems, verify_theorems, CheckOutcome, CheckStatus, Violation};

/// Instances evaluated per parallel batch before results are emitted.
const CHUNK: usize = 4096;

pub const CSV_HEADER: [&str; 9] = ["generators", "d", "r", "is_cm", "type", "gorenstein", "ng", "gps", "violations"];

/// Apéry data and report of one semigroup.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub semigroup: AffineSemigroup,
    pub apery: AperyData,
    pub report: ClassificationReport,
}

pub fn analyze(s: &AffineSemigroup, limits: &Limits) -> Result<Analysis> {
    let apery = compute_apery(s, limits)?;
    let report = report_from_apery(s, &apery)?;
    Ok(Analysis {
        semigroup: s.clone(),
        apery,
        report,
    })
}

/// One line of the sweep's JSONL stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: u64,
    pub generators: Vec<LatticeVector>,
    pub report: Option<ClassificationReport>,
    pub error: Option<String>,
    pub violations: Vec<Violation>,
    pub checks: BTreeMap<String, CheckStatus>,
}

impl InstanceRecord {
    /// JSON with sorted keys, no trailing newline.
    pub fn to_json_line(&self) -> String {
        let value = serde_json::to_value(self).expect("records serialize");
        value.to_string()
    }

    /// Row matching [`CSV_HEADER`].
    pub fn csv_row(&self) -> [String; 9] {
        let flag = |b: Option<bool>| b.map_or_else(String::new, |b| b.to_string());
        let r = self.report.as_ref();
        [
            format_generators(&self.generators),
            r.map_or_else(String::new, |r| r.d.to_string()),
            r.map_or_else(String::new, |r| r.r.to_string()),
            flag(r.map(|r| r.is_cm)),
            r.map_or_else(String::new, |r| r.type_count.to_string()),
            flag(r.map(|r| r.is_gorenstein)),
            flag(r.and_then(|r| r.is_nearly_gorenstein)),
            flag(r.and_then(|r| r.is_gps)),
            self.violations.len().to_string(),
        ]
    }
}

/// `"6,0;0,6;2,1;1,2"`, the inline generator syntax of the command line.
pub fn format_generators(gens: &[LatticeVector]) -> String {
    gens.iter()
        .map(|g| g.coords().iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

/// Analyzes one instance and runs every theorem check on it. A
/// contradiction raised while classifying is itself a violation; other
/// errors are recorded on the line.
pub fn evaluate(index: u64, s: &AffineSemigroup, limits: &Limits) -> InstanceRecord {
    let generators: Vec<LatticeVector> = s.generators().cloned().collect();
    let mut record = InstanceRecord {
        index,
        generators: generators.clone(),
        report: None,
        error: None,
        violations: Vec::new(),
        checks: BTreeMap::new(),
    };
    let outcome = analyze(s, limits).and_then(|a| {
        let checks = check_theorems(&a.semigroup, &a.apery, &a.report)?;
        Ok((a, checks))
    });
    match outcome {
        Ok((a, checks)) => {
            for c in checks {
                if c.status == CheckStatus::Failed {
                    record.violations.push(Violation {
                        instance: generators.clone(),
                        property_name: c.name.clone(),
                        expected: c.expected.clone(),
                        observed: c.observed.clone(),
                    });
                }
                record.checks.insert(c.name, c.status);
            }
            record.report = Some(a.report);
        }
        Err(Error::Contradiction { property, detail }) => {
            record.violations.push(Violation {
                instance: generators,
                property_name: property,
                expected: "no contradiction".into(),
                observed: detail,
            });
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub passed: u64,
    pub skipped: u64,
    pub failed: u64,
}

/// Aggregate counts over a sweep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub instances: u64,
    pub errors: u64,
    pub cohen_macaulay: u64,
    pub gorenstein: u64,
    pub nearly_gorenstein: u64,
    pub gps: u64,
    pub violations: Vec<Violation>,
    pub checks: BTreeMap<String, CheckTally>,
    /// Type of every Cohen-Macaulay instance.
    pub type_histogram: BTreeMap<usize, u64>,
}

impl SweepSummary {
    fn new() -> Self {
        let mut s = SweepSummary::default();
        for name in theorems::ALL_CHECKS {
            s.checks.insert(name.to_string(), CheckTally::default());
        }
        s
    }

    fn absorb(&mut self, rec: &InstanceRecord) {
        self.instances += 1;
        if rec.error.is_some() {
            self.errors += 1;
        }
        if let Some(r) = &rec.report {
            if r.is_cm {
                self.cohen_macaulay += 1;
                *self.type_histogram.entry(r.type_count).or_default() += 1;
            }
            self.gorenstein += u64::from(r.is_gorenstein);
            self.nearly_gorenstein += u64::from(r.is_nearly_gorenstein == Some(true));
            self.gps += u64::from(r.is_gps == Some(true));
        }
        for (name, status) in &rec.checks {
            let t = self.checks.entry(name.clone()).or_default();
            match status {
                CheckStatus::Passed => t.passed += 1,
                CheckStatus::Skipped => t.skipped += 1,
                CheckStatus::Failed => t.failed += 1,
            }
        }
        self.violations.extend(rec.violations.iter().cloned());
    }

    /// Instances on which the named check's hypothesis held.
    pub fn activations(&self, name: &str) -> u64 {
        self.checks.get(name).map_or(0, |t| t.passed + t.failed)
    }
}

/// Runs a sweep with `jobs` workers, handing records to `sink` in instance
/// order. The output does not depend on `jobs`.
pub fn run_sweep<F>(spec: &SweepSpec, limits: &Limits, jobs: usize, mut sink: F) -> std::io::Result<SweepSummary>
where
    F: FnMut(&InstanceRecord) -> std::io::Result<()>,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(std::io::Error::other)?;
    let mut summary = SweepSummary::new();
    let mut stream = sweep(spec).enumerate();
    loop {
        let chunk: Vec<(usize, AffineSemigroup)> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let records: Vec<InstanceRecord> = if jobs <= 1 {
            chunk.iter().map(|(i, s)| evaluate(*i as u64, s, limits)).collect()
        } else {
            pool.install(|| chunk.par_iter().map(|(i, s)| evaluate(*i as u64, s, limits)).collect())
        };
        for rec in &records {
            summary.absorb(rec);
            sink(rec)?;
        }
    }
    Ok(summary)
}

/// Sweep writing JSONL and CSV to the given writers.
pub fn run_sweep_to<J: Write, C: Write>(
    spec: &SweepSpec,
    limits: &Limits,
    jobs: usize,
    mut jsonl: Option<J>,
    csv: Option<C>,
) -> std::io::Result<SweepSummary> {
    let mut csv = csv.map(|w| csv::Writer::from_writer(w));
    if let Some(w) = csv.as_mut() {
        w.write_record(CSV_HEADER)?;
    }
    let summary = run_sweep(spec, limits, jobs, |rec| {
        if let Some(w) = jsonl.as_mut() {
            writeln!(w, "{}", rec.to_json_line())?;
        }
        if let Some(w) = csv.as_mut() {
            w.write_record(rec.csv_row())?;
        }
        Ok(())
    })?;
    if let Some(w) = jsonl.as_mut() {
        w.flush()?;
    }
    if let Some(mut w) = csv {
        w.flush()?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_sweep_has_no_violations() {
        let spec = SweepSpec::exhaustive(2, 3, (1, 2));
        let summary = run_sweep(&spec, &Limits::default(), 1, |_| Ok(())).unwrap();
        assert!(summary.instances > 0);
        assert!(summary.violations.is_empty(), "{:?}", summary.violations);
        assert_eq!(summary.errors, 0);
    }

    #[test]
    fn parallel_output_matches_sequential() {
        let spec = SweepSpec::random(2, 5, (1, 3), 7, 40);
        let mut seq = Vec::new();
        let mut par = Vec::new();
        run_sweep_to(&spec, &Limits::default(), 1, Some(&mut seq), None::<Vec<u8>>).unwrap();
        run_sweep_to(&spec, &Limits::default(), 3, Some(&mut par), None::<Vec<u8>>).unwrap();
        assert!(!seq.is_empty());
        assert_eq!(seq, par);
    }

    #[test]
    fn csv_rows_follow_header() {
        let s = AffineSemigroup::build(&[[6, 0].into(), [0, 6].into(), [2, 1].into(), [1, 2].into()]).unwrap();
        let rec = evaluate(0, &s, &Limits::default());
        assert_eq!(
            rec.csv_row(),
            ["0,6;6,0;1,2;2,1", "2", "2", "true", "2", "false", "false", "true", "0"].map(String::from)
        );
        let line = rec.to_json_line();
        let back: InstanceRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn resource_limits_are_recorded() {
        let s = AffineSemigroup::build(&[[6, 0].into(), [0, 6].into(), [2, 1].into(), [1, 2].into()]).unwrap();
        let limits = Limits { l_max: 2, ..Limits::default() };
        let rec = evaluate(3, &s, &limits);
        assert!(rec.report.is_none());
        assert!(rec.error.is_some());
        assert!(rec.violations.is_empty());
    }
}
