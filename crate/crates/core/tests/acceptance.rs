//! Acceptance criteria, one test per criterion. Each prints a single
//! `PASS`/`FAIL` line straight to stdout so the verdicts show up in the
//! test log even when output capture is on.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use sgclass::apery::Limits;
use sgclass::classify::Ladder;
use sgclass::harness::{self, theorems, SweepSpec, SweepSummary};
use sgclass::membership::{member_dp, DEFAULT_BOX_BUDGET};
use sgclass::{AffineSemigroup, LatticeVector, MembershipEngine};

use common::*;

const ONE_SECOND: Duration = Duration::from_secs(1);

fn verdict(number: u32, title: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!("criterion {number} {status}: {title}");
    if !failures.is_empty() {
        line.push_str(&format!(" [{}]", failures.join("; ")));
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    assert!(failures.is_empty(), "{line}");
}

fn set(list: &[&[i64]]) -> BTreeSet<LatticeVector> {
    vs(list).into_iter().collect()
}

fn show(s: &BTreeSet<LatticeVector>) -> String {
    s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

struct Check(Vec<String>);

impl Check {
    fn that(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }

    fn sets(&mut self, name: &str, got: &[LatticeVector], want: &BTreeSet<LatticeVector>) {
        let got: BTreeSet<LatticeVector> = got.iter().cloned().collect();
        self.that(&got == want, || {
            format!("{name}: expected {{{}}}, got {{{}}}", show(want), show(&got))
        });
    }

    fn fast(&mut self, elapsed: Duration, limit: Duration) {
        self.that(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"));
    }
}

fn sum(terms: &[&[i64]]) -> LatticeVector {
    let d = terms[0].len();
    LatticeVector::new((0..d).map(|k| terms.iter().map(|t| t[k]).sum::<i64>()))
}

#[test]
fn criterion_1_not_nearly_gorenstein_example() {
    let start = Instant::now();
    let s = semigroup(&[&[6, 0], &[0, 6], &[2, 1], &[1, 2]]);
    let a = harness::analyze(&s, &Limits::default()).unwrap();
    let elapsed = start.elapsed();
    let r = &a.report;
    let mut c = Check(Vec::new());
    // 0, a3, 2a3, 3a3, a4, 2a4, 3a4, 3a3 + a4, a3 + 3a4 as listed
    let listed = set(&[&[0, 0], &[2, 1], &[4, 2], &[6, 3], &[1, 2], &[2, 4], &[3, 6], &[7, 5], &[5, 7]]);
    c.sets("apery set", &r.apery_elements, &listed);
    c.sets("maximal", &r.maximal, &set(&[&[7, 5], &[5, 7]]));
    c.that(r.is_cm, || "not Cohen-Macaulay".into());
    c.that(r.is_gps == Some(true), || format!("is_gps = {:?}", r.is_gps));
    c.that(r.is_nearly_gorenstein == Some(false), || format!("ng = {:?}", r.is_nearly_gorenstein));
    c.sets(
        "trace gaps",
        r.trace_gaps.as_deref().unwrap_or(&[]),
        &set(&[&[0, 0], &[2, 1], &[1, 2], &[3, 3]]),
    );
    c.fast(elapsed, ONE_SECOND);
    // independent recount, reported alongside the verdict
    let brute = brute_apery(&s);
    c.that(brute.len() == listed.len(), || {
        format!("exhaustive search finds {} Apéry elements", brute.len())
    });
    verdict(1, "notNG fixture: Apéry set, maximal, CM, GPS, not NG, trace gaps", &c.0);
}

#[test]
fn criterion_2_unique_certificates_for_rays() {
    let start = Instant::now();
    let a1: &[i64] = &[2, 0];
    let a2: &[i64] = &[0, 2];
    let m1: &[i64] = &[1, 1];
    let m2: &[i64] = &[1, 2];
    let m3: &[i64] = &[0, 3];
    let s = semigroup(&[a1, a2, &[0, 3], &[1, 1], &[1, 2]]);
    let a = harness::analyze(&s, &Limits::default()).unwrap();
    let elapsed = start.elapsed();
    let r = &a.report;
    let mut c = Check(Vec::new());
    c.sets("maximal", &r.maximal, &set(&[m1, m2, m3]));
    c.that(r.type_count == 3, || format!("type {}", r.type_count));
    c.that(r.is_nearly_gorenstein == Some(true), || "not NG".into());
    let t_of = |ray: &[i64]| {
        let k = r.extremal.iter().position(|x| x == &v(ray)).unwrap();
        r.t_map.get(&(k + 1)).cloned()
    };
    c.that(t_of(a1) == Some(v(m3)), || format!("T(a_1) = {:?}", t_of(a1)));
    c.that(t_of(a2) == Some(v(m2)), || format!("T(a_2) = {:?}", t_of(a2)));
    let table = [
        (m3, a1, m1, true),
        (m3, a1, m2, true),
        (m1, a1, m2, false),
        (m2, a1, m3, false),
        (m2, a2, m1, true),
        (m2, a2, m3, true),
        (m1, a2, m2, false),
        (m3, a2, m1, false),
    ];
    let engine = MembershipEngine::with_apery(&s, &a.apery);
    for (m, ai, n, want) in table {
        let z: Vec<i64> = (0..2).map(|k| m[k] + ai[k] - n[k]).collect();
        let by_engine = engine.member_apery(&v(&z)).unwrap();
        let by_oracle = member(&s, &z);
        c.that(by_engine == want && by_oracle == want, || {
            format!("{:?}+{:?}-{:?} membership {by_engine}/{by_oracle}, stated {want}", m, ai, n)
        });
    }
    c.fast(elapsed, ONE_SECOND);
    verdict(2, "ray certificate example: maximal, type 3, NG, T map, membership table", &c.0);
}

#[test]
fn criterion_3_type_equals_dimension() {
    let start = Instant::now();
    let s = semigroup(&[&[0, 3], &[3, 1], &[1, 2], &[2, 2], &[3, 3]]);
    let a = harness::analyze(&s, &Limits::default()).unwrap();
    let elapsed = start.elapsed();
    let r = &a.report;
    let mut c = Check(Vec::new());
    c.sets("maximal", &r.maximal, &set(&[&[5, 7], &[6, 6]]));
    c.that(r.type_count == 2 && r.d == 2, || format!("type {}, d {}", r.type_count, r.d));
    c.that(r.is_cm, || "not CM".into());
    c.that(r.is_nearly_gorenstein == Some(true), || "not NG".into());
    c.fast(elapsed, ONE_SECOND);
    verdict(3, "d=t=2 fixture: maximal, type 2 = d, CM, NG", &c.0);
}

#[test]
fn criterion_4_type_three_in_the_plane() {
    let start = Instant::now();
    let a1: &[i64] = &[5, 0];
    let a2: &[i64] = &[0, 3];
    let a3: &[i64] = &[3, 1];
    let a4: &[i64] = &[1, 2];
    let a5: &[i64] = &[2, 2];
    let s = semigroup(&[a1, a2, a3, a4, a5]);
    let a = harness::analyze(&s, &Limits::default()).unwrap();
    let elapsed = start.elapsed();
    let r = &a.report;
    let mut c = Check(Vec::new());
    c.sets("extremal", &r.extremal, &set(&[a1, a2]));
    c.sets("maximal", &r.maximal, &set(&[&[5, 10], &[8, 8], &[7, 9]]));
    c.that(r.type_count == 3, || format!("type {}", r.type_count));
    c.that(r.is_nearly_gorenstein == Some(true), || "not NG".into());
    let first = [sum(&[&[5, 10], a1]), sum(&[&[7, 9], a3]), sum(&[&[8, 8], a5])];
    let second = [sum(&[&[8, 8], a2]), sum(&[&[7, 9], a4]), sum(&[&[5, 10], a3])];
    for chain in [&first, &second] {
        c.that(chain.windows(2).all(|w| w[0] == w[1]), || format!("identity fails: {chain:?}"));
    }
    c.fast(elapsed, ONE_SECOND);
    verdict(4, "ex1 fixture: maximal, type 3, NG, stated identities", &c.0);
}

#[test]
fn criterion_5_three_dimensional_example() {
    let start = Instant::now();
    let a: [&[i64]; 6] = [&[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1]];
    let s = semigroup(&a);
    let an = harness::analyze(&s, &Limits::default()).unwrap();
    let elapsed = start.elapsed();
    let r = &an.report;
    let mut c = Check(Vec::new());
    c.sets("apery set", &r.apery_elements, &set(&[&[0, 0, 0], a[3], a[4], a[5]]));
    c.that(r.type_count == 3, || format!("type {}", r.type_count));
    c.that(r.is_cm, || "not CM".into());
    c.that(r.is_nearly_gorenstein == Some(true), || "not NG".into());
    for (lhs, rhs) in [
        (sum(&[a[5], a[0]]), sum(&[a[3], a[4]])),
        (sum(&[a[4], a[1]]), sum(&[a[3], a[5]])),
        (sum(&[a[3], a[2]]), sum(&[a[4], a[5]])),
    ] {
        c.that(lhs == rhs, || format!("identity {lhs} = {rhs} fails"));
    }
    c.fast(elapsed, ONE_SECOND);
    verdict(5, "ex2 fixture: Apéry set, type 3, CM, NG, stated identities", &c.0);
}

#[test]
fn criterion_6_membership_engines_agree() {
    let start = Instant::now();
    let spec = SweepSpec::random(2, 6, (0, 3), 20_240_611, 60);
    let instances: Vec<AffineSemigroup> = harness::sweep(&spec).collect();
    let mut c = Check(Vec::new());
    c.that(instances.len() >= 50, || format!("only {} instances", instances.len()));
    let mut disagreements = 0usize;
    let mut queries = 0usize;
    for s in &instances {
        let ap = sgclass::apery::compute_apery(s, &Limits::default()).unwrap();
        let engine = MembershipEngine::with_apery(s, &ap);
        for x in 0..=12 {
            for y in 0..=12 {
                let z = v(&[x, y]);
                let dp = member_dp(s, &z, DEFAULT_BOX_BUDGET).unwrap();
                let apery = engine.member_apery(&z).unwrap();
                queries += 1;
                if dp != apery {
                    disagreements += 1;
                }
            }
        }
    }
    c.that(disagreements == 0, || format!("{disagreements} disagreements in {queries} queries"));
    c.fast(start.elapsed(), Duration::from_secs(60));
    verdict(
        6,
        &format!("membership engines agree on {} instances, {queries} queries", instances.len()),
        &c.0,
    );
}

struct HashWriter(Sha256, u64);

impl Write for HashWriter {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.update(buf);
        self.1 += buf.len() as u64;
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

struct SweepRun {
    digest: Vec<u8>,
    bytes: u64,
    summary: SweepSummary,
    elapsed: Duration,
}

fn acceptance_sweep(jobs: usize) -> SweepRun {
    let spec = SweepSpec::exhaustive(2, 6, (2, 3));
    let start = Instant::now();
    let mut hasher = HashWriter(Sha256::new(), 0);
    let summary =
        harness::run_sweep_to(&spec, &Limits::default(), jobs, Some(&mut hasher), None::<Vec<u8>>).unwrap();
    SweepRun {
        digest: hasher.0.finalize().to_vec(),
        bytes: hasher.1,
        summary,
        elapsed: start.elapsed(),
    }
}

fn first_sweep() -> &'static SweepRun {
    static RUN: OnceLock<SweepRun> = OnceLock::new();
    RUN.get_or_init(|| acceptance_sweep(1))
}

#[test]
fn criterion_7_theorem_sweep_has_no_violations() {
    let run = first_sweep();
    let s = &run.summary;
    let mut c = Check(Vec::new());
    c.that(s.violations.is_empty(), || {
        format!("{} violations, first {:?}", s.violations.len(), s.violations.first())
    });
    c.that(s.errors == 0, || format!("{} instances failed to classify", s.errors));
    for (label, name) in [
        ("(a)", theorems::TYPE_AT_LEAST_D),
        ("(b)", theorems::CODIM_THREE_TYPE_BOUND),
        ("(f)", theorems::TYPE_TWO_MAXIMALS_IN_TRACE),
    ] {
        c.that(s.activations(name) > 0, || format!("check {label} {name} never activated"));
    }
    let activations: Vec<String> = theorems::ALL_CHECKS
        .iter()
        .map(|n| format!("{n}={}", s.activations(n)))
        .collect();
    verdict(
        7,
        &format!(
            "exhaustive d=2 max 6 codim 2..3: {} instances, {} violations, {:.0}s, activations {}",
            s.instances,
            s.violations.len(),
            run.elapsed.as_secs_f64(),
            activations.join(" ")
        ),
        &c.0,
    );
}

#[test]
fn criterion_8_non_cohen_macaulay_detection() {
    let start = Instant::now();
    let s = semigroup(&[&[4, 0], &[0, 4], &[1, 3], &[3, 1]]);
    let r = harness::analyze(&s, &Limits::default()).unwrap().report;
    let elapsed = start.elapsed();
    let mut c = Check(Vec::new());
    c.that(!r.is_cm, || "classified Cohen-Macaulay".into());
    match &r.cm_witness {
        None => c.0.push("no witness pair".into()),
        Some((w1, w2)) => {
            let brute = brute_apery(&s);
            c.that(w1 != w2, || "witness pair is not distinct".into());
            c.that(brute.contains(w1) && brute.contains(w2), || {
                format!("witness {w1}, {w2} not in the exhaustive Apéry set")
            });
            c.that(in_extremal_group(&s, &w1.checked_sub(w2).unwrap()), || {
                format!("{w1} - {w2} not in group(a_1, a_2)")
            });
        }
    }
    c.that(Ladder::new(&s, &harness::analyze(&s, &Limits::default()).unwrap().apery).is_err(), || {
        "trace queries accepted on a non-CM ring".into()
    });
    c.fast(elapsed, ONE_SECOND);
    verdict(8, &format!("non-CM detection with witness {:?}", r.cm_witness), &c.0);
}

#[test]
fn criterion_9_sweep_output_is_deterministic() {
    let first = first_sweep();
    let second = acceptance_sweep(2);
    let mut c = Check(Vec::new());
    c.that(first.bytes > 0, || "empty JSONL stream".into());
    c.that(first.digest == second.digest && first.bytes == second.bytes, || {
        format!("JSONL differs: {} vs {} bytes", first.bytes, second.bytes)
    });
    c.that(first.summary == second.summary, || "summaries differ".into());
    let hex: String = first.digest.iter().map(|b| format!("{b:02x}")).collect();
    verdict(
        9,
        &format!("two sweeps (1 and 2 workers) give identical JSONL, {} bytes, sha256 {hex}", first.bytes),
        &c.0,
    );
}
