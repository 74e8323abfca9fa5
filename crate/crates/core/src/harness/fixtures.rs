//! Worked examples with their stated data, recomputed and compared field by
//! field. Vectors are written in the order and labelling of the examples;
//! comparisons are order-insensitive where the data is a set.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::apery::Limits;
use crate::classify::Ladder;
use crate::error::Result;
use crate::lattice::{AffineSemigroup, LatticeVector};
use crate::membership::MembershipEngine;

use super::analyze;

/// A signed sum of vectors and whether it is claimed to lie in S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipClaim {
    pub terms: Vec<(i64, LatticeVector)>,
    pub in_semigroup: bool,
}

/// Expected data of one example. `None` and empty lists are not checked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expected {
    pub extremal: Option<Vec<LatticeVector>>,
    pub apery_elements: Option<Vec<LatticeVector>>,
    pub maximal: Option<Vec<LatticeVector>>,
    pub type_count: Option<usize>,
    pub is_cm: Option<bool>,
    pub is_gps: Option<bool>,
    pub is_nearly_gorenstein: Option<bool>,
    pub trace_gaps: Option<Vec<LatticeVector>>,
    /// `(a_i, T(a_i))` for extremal rays.
    pub t_map: Vec<(LatticeVector, LatticeVector)>,
    /// Generator and the maximal elements certifying its trace membership.
    pub certificates: Vec<(LatticeVector, Vec<LatticeVector>)>,
    /// Generator and how many maximal elements certify it.
    pub certificate_counts: Vec<(LatticeVector, usize)>,
    pub memberships: Vec<MembershipClaim>,
    /// Chains of sums claimed to be equal vectors.
    pub identities: Vec<Vec<Vec<LatticeVector>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub generators: Vec<LatticeVector>,
    pub expected: Expected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDiff {
    pub field: String,
    pub expected: String,
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub name: String,
    pub passed: bool,
    pub diffs: Vec<FieldDiff>,
    #[serde(skip)]
    pub elapsed: Duration,
}

fn v(c: &[i64]) -> LatticeVector {
    LatticeVector::from(c)
}

fn vs(list: &[&[i64]]) -> Vec<LatticeVector> {
    list.iter().map(|c| v(c)).collect()
}

fn claim(terms: &[(i64, &[i64])], in_semigroup: bool) -> MembershipClaim {
    MembershipClaim {
        terms: terms.iter().map(|&(k, c)| (k, v(c))).collect(),
        in_semigroup,
    }
}

fn not_ng() -> Fixture {
    let a1: &[i64] = &[6, 0];
    let a2: &[i64] = &[0, 6];
    let a3: &[i64] = &[2, 1];
    let a4: &[i64] = &[1, 2];
    let m1: &[i64] = &[7, 5];
    let m2: &[i64] = &[5, 7];
    Fixture {
        name: "notNG".into(),
        generators: vs(&[a1, a2, a3, a4]),
        expected: Expected {
            // 0, a3, 2a3, 3a3, a4, 2a4, 3a4, 3a3 + a4, a3 + 3a4
            apery_elements: Some(vs(&[&[0, 0], &[2, 1], &[4, 2], &[6, 3], &[1, 2], &[2, 4], &[3, 6], m1, m2])),
            maximal: Some(vs(&[m1, m2])),
            is_cm: Some(true),
            is_gps: Some(true),
            is_nearly_gorenstein: Some(false),
            trace_gaps: Some(vs(&[&[0, 0], a3, a4, &[3, 3]])),
            memberships: vec![
                claim(&[(1, a1), (1, m2), (-1, m1)], true),
                claim(&[(1, a2), (1, m1), (-1, m2)], true),
            ],
            identities: vec![
                vec![vs(&[a1, m2]), vs(&[m1, a3, a3])],
                vec![vs(&[a2, m1]), vs(&[m2, a4, a4])],
            ],
            ..Expected::default()
        },
    }
}

fn ray_certificate_uniqueness() -> Fixture {
    let a1: &[i64] = &[2, 0];
    let a2: &[i64] = &[0, 2];
    let a3: &[i64] = &[0, 3];
    let a4: &[i64] = &[1, 1];
    let a5: &[i64] = &[1, 2];
    let (m1, m2, m3) = (a4, a5, a3);
    Fixture {
        name: "rayCertificates".into(),
        generators: vs(&[a1, a2, a3, a4, a5]),
        expected: Expected {
            maximal: Some(vs(&[m1, m2, m3])),
            type_count: Some(3),
            is_cm: Some(true),
            is_nearly_gorenstein: Some(true),
            t_map: vec![(v(a1), v(m3)), (v(a2), v(m2))],
            certificates: vec![
                (v(a1), vs(&[m3])),
                (v(a2), vs(&[m2])),
                (v(a3), vs(&[m1, m2])),
            ],
            certificate_counts: vec![(v(a4), 2), (v(a5), 2)],
            memberships: vec![
                claim(&[(1, m3), (1, a1), (-1, m1)], true),
                claim(&[(1, m3), (1, a1), (-1, m2)], true),
                claim(&[(1, m1), (1, a1), (-1, m2)], false),
                claim(&[(1, m2), (1, a1), (-1, m3)], false),
                claim(&[(1, m2), (1, a2), (-1, m1)], true),
                claim(&[(1, m2), (1, a2), (-1, m3)], true),
                claim(&[(1, m1), (1, a2), (-1, m2)], false),
                claim(&[(1, m3), (1, a2), (-1, m1)], false),
            ],
            ..Expected::default()
        },
    }
}

fn type_equals_dimension() -> Fixture {
    Fixture {
        name: "d=t=2".into(),
        generators: vs(&[&[0, 3], &[3, 1], &[1, 2], &[2, 2], &[3, 3]]),
        expected: Expected {
            maximal: Some(vs(&[&[5, 7], &[6, 6]])),
            type_count: Some(2),
            is_cm: Some(true),
            is_nearly_gorenstein: Some(true),
            ..Expected::default()
        },
    }
}

fn ex1() -> Fixture {
    let a1: &[i64] = &[5, 0];
    let a2: &[i64] = &[0, 3];
    let a3: &[i64] = &[3, 1];
    let a4: &[i64] = &[1, 2];
    let a5: &[i64] = &[2, 2];
    let m1: &[i64] = &[5, 10];
    let m2: &[i64] = &[8, 8];
    let m3: &[i64] = &[7, 9];
    Fixture {
        name: "ex1".into(),
        generators: vs(&[a1, a2, a3, a4, a5]),
        expected: Expected {
            extremal: Some(vs(&[a1, a2])),
            maximal: Some(vs(&[m1, m2, m3])),
            type_count: Some(3),
            is_cm: Some(true),
            is_nearly_gorenstein: Some(true),
            identities: vec![
                vec![vs(&[m1, a1]), vs(&[m3, a3]), vs(&[m2, a5])],
                vec![vs(&[m2, a2]), vs(&[m3, a4]), vs(&[m1, a3])],
            ],
            ..Expected::default()
        },
    }
}

fn ex2() -> Fixture {
    let a: [&[i64]; 6] = [&[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1]];
    Fixture {
        name: "ex2".into(),
        generators: vs(&a),
        expected: Expected {
            extremal: Some(vs(&a[..3])),
            apery_elements: Some(vs(&[&[0, 0, 0], a[3], a[4], a[5]])),
            type_count: Some(3),
            is_cm: Some(true),
            is_nearly_gorenstein: Some(true),
            identities: vec![
                vec![vs(&[a[5], a[0]]), vs(&[a[3], a[4]])],
                vec![vs(&[a[4], a[1]]), vs(&[a[3], a[5]])],
                vec![vs(&[a[3], a[2]]), vs(&[a[4], a[5]])],
            ],
            ..Expected::default()
        },
    }
}

/// The five examples in their stated order.
pub fn registry() -> Vec<Fixture> {
    vec![not_ng(), ray_certificate_uniqueness(), type_equals_dimension(), ex1(), ex2()]
}

/// Makes the stated type of a fixture wrong, for exercising the diff
/// reporting.
pub fn corrupt(fixture: &mut Fixture) {
    fixture.expected.type_count = Some(fixture.expected.type_count.map_or(0, |t| t + 1));
}

fn show_set(vectors: &[LatticeVector]) -> String {
    let set: BTreeSet<&LatticeVector> = vectors.iter().collect();
    format!("{{{}}}", set.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))
}

struct Diffs(Vec<FieldDiff>);

impl Diffs {
    fn compare<T: PartialEq + std::fmt::Debug>(&mut self, field: &str, expected: &Option<T>, observed: T) {
        if let Some(e) = expected {
            if *e != observed {
                self.push(field, format!("{e:?}"), format!("{observed:?}"));
            }
        }
    }

    fn compare_sets(&mut self, field: &str, expected: &Option<Vec<LatticeVector>>, observed: &[LatticeVector]) {
        if let Some(e) = expected {
            let es: BTreeSet<&LatticeVector> = e.iter().collect();
            let os: BTreeSet<&LatticeVector> = observed.iter().collect();
            if es != os || e.len() != es.len() {
                let missing: Vec<LatticeVector> = es.difference(&os).map(|&v| v.clone()).collect();
                let extra: Vec<LatticeVector> = os.difference(&es).map(|&v| v.clone()).collect();
                self.push(
                    field,
                    format!("{} ({} elements)", show_set(e), e.len()),
                    format!(
                        "{} ({} elements; missing {}, extra {})",
                        show_set(observed),
                        observed.len(),
                        show_set(&missing),
                        show_set(&extra)
                    ),
                );
            }
        }
    }

    fn push(&mut self, field: &str, expected: String, observed: String) {
        self.0.push(FieldDiff {
            field: field.to_string(),
            expected,
            observed,
        });
    }
}

fn sum(terms: impl IntoIterator<Item = (i64, LatticeVector)>, dim: usize) -> Result<LatticeVector> {
    let terms: Vec<(i64, LatticeVector)> = terms.into_iter().collect();
    LatticeVector::zero(dim).checked_add_combination(terms.iter().map(|(k, v)| (*k, v)))
}

fn compare_fixture(fixture: &Fixture, limits: &Limits) -> Result<Vec<FieldDiff>> {
    let s = AffineSemigroup::build(&fixture.generators)?;
    let a = analyze(&s, limits)?;
    let rep = &a.report;
    let e = &fixture.expected;
    let dim = s.dim();
    let mut diffs = Diffs(Vec::new());

    diffs.compare_sets("extremal", &e.extremal, &rep.extremal);
    diffs.compare_sets("apery_elements", &e.apery_elements, &rep.apery_elements);
    diffs.compare_sets("maximal", &e.maximal, &rep.maximal);
    diffs.compare("type", &e.type_count, rep.type_count);
    diffs.compare("is_cm", &e.is_cm, rep.is_cm);
    diffs.compare("is_gps", &e.is_gps, rep.is_gps.unwrap_or(false));
    diffs.compare(
        "is_nearly_gorenstein",
        &e.is_nearly_gorenstein,
        rep.is_nearly_gorenstein.unwrap_or(false),
    );
    if e.trace_gaps.is_some() {
        match &rep.trace_gaps {
            Some(g) => diffs.compare_sets("trace_gaps", &e.trace_gaps, g),
            None => diffs.push("trace_gaps", show_set(e.trace_gaps.as_deref().unwrap()), "infinite".into()),
        }
    }

    for (ray, t) in &e.t_map {
        let observed = rep
            .extremal
            .iter()
            .position(|x| x == ray)
            .and_then(|k| rep.t_map.get(&(k + 1)));
        if observed != Some(t) {
            diffs.push(
                &format!("t_map[{ray}]"),
                t.to_string(),
                observed.map_or_else(|| "none".into(), |o| o.to_string()),
            );
        }
    }

    if !e.certificates.is_empty() || !e.certificate_counts.is_empty() {
        let ladder = Ladder::new(&s, &a.apery)?;
        let certifying = |g: &LatticeVector| -> Result<Vec<LatticeVector>> {
            Ok(ladder
                .trace_witnesses(g)?
                .into_iter()
                .map(|i| a.apery.maximal()[i].clone())
                .collect())
        };
        for (g, want) in &e.certificates {
            let got = certifying(g)?;
            diffs.compare_sets(&format!("certificates[{g}]"), &Some(want.clone()), &got);
        }
        for (g, want) in &e.certificate_counts {
            let got = certifying(g)?.len();
            diffs.compare(&format!("certificate_count[{g}]"), &Some(*want), got);
        }
    }

    let engine = MembershipEngine::with_apery(&s, &a.apery);
    for c in &e.memberships {
        let z = sum(c.terms.iter().cloned(), dim)?;
        let got = engine.member_apery(&z)?;
        if got != c.in_semigroup {
            let label = c
                .terms
                .iter()
                .map(|(k, v)| format!("{k:+}*{v}"))
                .collect::<Vec<_>>()
                .join(" ");
            diffs.push(&format!("membership[{label}]"), c.in_semigroup.to_string(), got.to_string());
        }
    }

    for chain in &e.identities {
        let sums = chain
            .iter()
            .map(|terms| sum(terms.iter().map(|t| (1, t.clone())), dim))
            .collect::<Result<Vec<_>>>()?;
        if sums.windows(2).any(|w| w[0] != w[1]) {
            let label = chain
                .iter()
                .map(|terms| terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+"))
                .collect::<Vec<_>>()
                .join(" = ");
            diffs.push(
                &format!("identity[{label}]"),
                "equal sums".into(),
                sums.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", "),
            );
        }
    }
    Ok(diffs.0)
}

pub fn run_fixtures_with(fixtures: &[Fixture], limits: &Limits) -> Vec<FixtureResult> {
    fixtures
        .iter()
        .map(|f| {
            let start = Instant::now();
            let diffs = compare_fixture(f, limits).unwrap_or_else(|err| {
                vec![FieldDiff {
                    field: "computation".into(),
                    expected: "success".into(),
                    observed: err.to_string(),
                }]
            });
            FixtureResult {
                name: f.name.clone(),
                passed: diffs.is_empty(),
                diffs,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

pub fn run_fixtures() -> Vec<FixtureResult> {
    run_fixtures_with(&registry(), &Limits::default())
}
