//! Cohen-Macaulay, Gorenstein, nearly Gorenstein and Gorenstein on the
//! punctured spectrum, decided from the maximal elements of Ap(S,E).
//!
//! With `max Ap(S,E) = {m_1..m_t}`, an element `b ∈ S` lies in the trace
//! ideal tr(S) iff some `m_i` has `b + m_i − m_j ∈ S` for every `j`. Every
//! predicate below reduces to membership queries of that shape.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::apery::{self, AperyData, Limits};
use crate::error::{Error, Result};
use crate::lattice::{AffineSemigroup, LatticeVector};
use crate::membership::MembershipEngine;

/// First pair `w_1 ≠ w_2` in Ap(S,E) whose difference lies in
/// group(a_1..a_d), or `None` when K[S] is Cohen-Macaulay.
///
/// Two vectors differ by an element of group(a_1..a_d) exactly when they
/// have the same class modulo that lattice, so one pass over the classes
/// replaces the pairwise test.
pub fn cm_witness(s: &AffineSemigroup, apery: &AperyData) -> Result<Option<(LatticeVector, LatticeVector)>> {
    let mut classes = BTreeMap::new();
    for w in apery.elements() {
        let class = s.extremal_class(w)?;
        if let Some(prev) = classes.insert(class, w) {
            return Ok(Some((prev.clone(), w.clone())));
        }
    }
    Ok(None)
}

pub fn is_cohen_macaulay(s: &AffineSemigroup, apery: &AperyData) -> Result<bool> {
    Ok(cm_witness(s, apery)?.is_none())
}

/// Answer to a trace-ideal membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceQuery {
    /// Least index `i` into `apery.maximal()` certifying membership.
    pub witness_index: Option<usize>,
}

impl TraceQuery {
    pub fn in_trace(&self) -> bool {
        self.witness_index.is_some()
    }
}

/// `S ∖ tr(S)`: finite exactly when tr(S) is primary to the maximal ideal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceGaps {
    Finite(Vec<LatticeVector>),
    InfiniteComplement,
}

/// The classification queries that are only meaningful for a Cohen-Macaulay
/// semigroup ring. Construction fails with [`Error::NotCohenMacaulay`]
/// otherwise.
#[derive(Debug, Clone, Copy)]
pub struct Ladder<'a> {
    s: &'a AffineSemigroup,
    apery: &'a AperyData,
    engine: MembershipEngine<'a>,
}

impl<'a> Ladder<'a> {
    pub fn new(s: &'a AffineSemigroup, apery: &'a AperyData) -> Result<Self> {
        if !is_cohen_macaulay(s, apery)? {
            return Err(Error::NotCohenMacaulay);
        }
        Ok(Ladder {
            s,
            apery,
            engine: MembershipEngine::with_apery(s, apery),
        })
    }

    pub fn engine(&self) -> &MembershipEngine<'a> {
        &self.engine
    }

    pub fn type_count(&self) -> usize {
        self.apery.maximal().len()
    }

    fn certifies(&self, b: &LatticeVector, i: usize) -> Result<bool> {
        let maximal = self.apery.maximal();
        let shifted = b.checked_add(&maximal[i])?;
        for mj in maximal {
            if !self.engine.member_apery(&shifted.checked_sub(mj)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every index `i` with `b + m_i − m_j ∈ S` for all `j`.
    pub fn trace_witnesses(&self, b: &LatticeVector) -> Result<Vec<usize>> {
        self.require_member(b)?;
        let mut out = Vec::new();
        for i in 0..self.type_count() {
            if self.certifies(b, i)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn in_trace(&self, b: &LatticeVector) -> Result<TraceQuery> {
        self.require_member(b)?;
        for i in 0..self.type_count() {
            if self.certifies(b, i)? {
                return Ok(TraceQuery {
                    witness_index: Some(i),
                });
            }
        }
        Ok(TraceQuery { witness_index: None })
    }

    fn require_member(&self, b: &LatticeVector) -> Result<()> {
        if !self.engine.member_apery(b)? {
            return Err(Error::NotInSemigroup(b.clone()));
        }
        Ok(())
    }

    pub fn is_gorenstein(&self) -> bool {
        self.type_count() == 1
    }

    /// Trace membership of every minimal generator, extremal rays first.
    pub fn generator_trace_flags(&self) -> Result<Vec<(LatticeVector, bool)>> {
        self.s
            .generators()
            .map(|g| Ok((g.clone(), self.in_trace(g)?.in_trace())))
            .collect()
    }

    pub fn is_nearly_gorenstein(&self) -> Result<bool> {
        for g in self.s.generators() {
            if !self.in_trace(g)?.in_trace() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `T(a_i)` for every 1-based ray index `i` with `a_i ∈ tr(S)`: the
    /// maximal element certifying it. The certificate must be unique, and
    /// distinct across rays once the type is at least two; a failure of
    /// either is reported as [`Error::Contradiction`].
    pub fn t_map(&self) -> Result<BTreeMap<usize, LatticeVector>> {
        let maximal = self.apery.maximal();
        let mut map = BTreeMap::new();
        for (k, a) in self.s.extremal().iter().enumerate() {
            let witnesses = self.trace_witnesses(a)?;
            match witnesses[..] {
                [] => {}
                [i] => {
                    map.insert(k + 1, maximal[i].clone());
                }
                _ => {
                    return Err(Error::Contradiction {
                        property: "unique trace certificate for an extremal ray".into(),
                        detail: format!(
                            "a_{} = {a} is certified by {}",
                            k + 1,
                            witnesses.iter().map(|&i| &maximal[i]).join(", ")
                        ),
                    })
                }
            }
        }
        if self.type_count() >= 2 {
            for ((r, mr), (q, mq)) in map.iter().tuple_combinations() {
                if mr == mq {
                    return Err(Error::Contradiction {
                        property: "distinct trace certificates across extremal rays".into(),
                        detail: format!("T(a_{r}) = T(a_{q}) = {mr}"),
                    });
                }
            }
        }
        Ok(map)
    }

    /// Least `λ_i` with `λ_i a_i ∈ tr(S)` for every ray, or `None` if some
    /// ray has no multiple in the trace.
    ///
    /// For a fixed certificate `m_r`, `λ a_i + m_r − m_j ∈ S` is upward
    /// closed in λ, so the simultaneous shift is the maximum over `j` of the
    /// individual minimal shifts; the best certificate is then chosen.
    pub fn gps_shifts(&self) -> Result<Option<Vec<u64>>> {
        let maximal = self.apery.maximal();
        let mut shifts = Vec::with_capacity(self.s.dim());
        for ray in 1..=self.s.dim() {
            let mut best: Option<u64> = None;
            'cert: for mr in maximal {
                let mut need = 0u64;
                for mj in maximal {
                    let answer = self.engine.shift_member(&mr.checked_sub(mj)?, ray)?;
                    match answer.minimal_lambda {
                        Some(l) => need = need.max(l),
                        None => continue 'cert,
                    }
                }
                best = Some(best.map_or(need, |b| b.min(need)));
            }
            match best {
                Some(l) => shifts.push(l),
                None => return Ok(None),
            }
        }
        Ok(Some(shifts))
    }

    pub fn is_gps(&self) -> Result<bool> {
        Ok(self.gps_shifts()?.is_some())
    }

    /// `S ∖ tr(S)`. Since `λ_k a_k ∈ tr(S)` and tr(S) is an ideal, every gap
    /// is `w + Σ n_k a_k` with `w ∈ Ap(S,E)` and `0 ≤ n_k < λ_k`.
    pub fn trace_gaps(&self) -> Result<TraceGaps> {
        let Some(shifts) = self.gps_shifts()? else {
            return Ok(TraceGaps::InfiniteComplement);
        };
        self.gaps_below(&shifts).map(TraceGaps::Finite)
    }

    fn gaps_below(&self, shifts: &[u64]) -> Result<Vec<LatticeVector>> {
        let mut gaps = BTreeSet::new();
        if shifts.contains(&0) {
            return Ok(Vec::new());
        }
        let ranges = shifts.iter().map(|&l| 0..l as i64);
        for offsets in ranges.multi_cartesian_product() {
            let base = LatticeVector::zero(self.s.dim())
                .checked_add_combination(offsets.iter().copied().zip(self.s.extremal()))?;
            for w in self.apery.elements() {
                let c = base.checked_add(w)?;
                if !self.in_trace(&c)?.in_trace() {
                    gaps.insert(c);
                }
            }
        }
        Ok(gaps.into_iter().collect())
    }
}

pub fn in_trace(s: &AffineSemigroup, apery: &AperyData, b: &LatticeVector) -> Result<TraceQuery> {
    Ladder::new(s, apery)?.in_trace(b)
}

pub fn is_gorenstein(s: &AffineSemigroup, apery: &AperyData) -> Result<bool> {
    Ok(Ladder::new(s, apery)?.is_gorenstein())
}

pub fn is_nearly_gorenstein(s: &AffineSemigroup, apery: &AperyData) -> Result<bool> {
    Ladder::new(s, apery)?.is_nearly_gorenstein()
}

pub fn t_map(s: &AffineSemigroup, apery: &AperyData) -> Result<BTreeMap<usize, LatticeVector>> {
    Ladder::new(s, apery)?.t_map()
}

pub fn is_gps(s: &AffineSemigroup, apery: &AperyData) -> Result<bool> {
    Ladder::new(s, apery)?.is_gps()
}

pub fn trace_gaps(s: &AffineSemigroup, apery: &AperyData) -> Result<TraceGaps> {
    Ladder::new(s, apery)?.trace_gaps()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorTrace {
    pub generator: LatticeVector,
    pub in_trace: bool,
}

/// Everything decided about one semigroup. Vector lists are sorted
/// lexicographically; optional fields are `null` when the ring is not
/// Cohen-Macaulay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub d: usize,
    pub r: usize,
    pub extremal: Vec<LatticeVector>,
    pub others: Vec<LatticeVector>,
    pub l_bounds: Vec<u64>,
    pub apery_elements: Vec<LatticeVector>,
    pub maximal: Vec<LatticeVector>,
    pub is_cm: bool,
    pub cm_witness: Option<(LatticeVector, LatticeVector)>,
    pub is_gorenstein: bool,
    pub is_nearly_gorenstein: Option<bool>,
    pub is_gps: Option<bool>,
    pub type_count: usize,
    pub qf: Vec<LatticeVector>,
    pub canonical_degrees: Vec<LatticeVector>,
    /// 1-based extremal index to `T(a_i)`.
    pub t_map: BTreeMap<usize, LatticeVector>,
    /// Whether each `T(a_i)` has a unique expression over the non-extremal generators.
    pub t_unique_expression: BTreeMap<usize, bool>,
    pub generator_trace_flags: Vec<GeneratorTrace>,
    pub gps_shifts: Option<Vec<u64>>,
    pub trace_gaps: Option<Vec<LatticeVector>>,
    pub caveats: Vec<String>,
}

impl ClassificationReport {
    /// Trace flag of a generator, if computed.
    pub fn generator_in_trace(&self, g: &LatticeVector) -> Option<bool> {
        self.generator_trace_flags
            .iter()
            .find(|f| &f.generator == g)
            .map(|f| f.in_trace)
    }

    pub fn embedding_dim(&self) -> usize {
        self.d + self.r
    }

    /// The implications every report must satisfy.
    fn check_invariants(&self) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::Contradiction {
                property: "report invariant".into(),
                detail: what.to_string(),
            })
        };
        if self.is_gorenstein && self.is_nearly_gorenstein == Some(false) {
            return fail("Gorenstein but not nearly Gorenstein");
        }
        if self.is_nearly_gorenstein == Some(true) && self.is_gps == Some(false) {
            return fail("nearly Gorenstein but not Gorenstein on the punctured spectrum");
        }
        if self.is_gorenstein != (self.is_cm && self.type_count == 1) {
            return fail("Gorenstein flag disagrees with CM and type 1");
        }
        if self.is_nearly_gorenstein == Some(true) && !self.is_gorenstein && self.type_count < self.d {
            return fail(&format!(
                "nearly Gorenstein, not Gorenstein, type {} < d = {}",
                self.type_count, self.d
            ));
        }
        Ok(())
    }
}

/// Runs the whole ladder on one semigroup.
pub fn classification_report(s: &AffineSemigroup, limits: &Limits) -> Result<ClassificationReport> {
    let apery = apery::compute_apery(s, limits)?;
    report_from_apery(s, &apery)
}

pub fn report_from_apery(s: &AffineSemigroup, apery: &AperyData) -> Result<ClassificationReport> {
    let qf = apery::quasi_frobenius(s, apery)?;
    let canonical_degrees = apery::canonical_generators(s, apery)?;
    let witness = cm_witness(s, apery)?;
    let mut caveats = Vec::new();

    let mut report = ClassificationReport {
        d: s.dim(),
        r: s.codim(),
        extremal: s.extremal().to_vec(),
        others: s.others().to_vec(),
        l_bounds: apery.l_bounds().to_vec(),
        apery_elements: apery.elements().to_vec(),
        maximal: apery.maximal().to_vec(),
        is_cm: witness.is_none(),
        cm_witness: witness.clone(),
        is_gorenstein: false,
        is_nearly_gorenstein: None,
        is_gps: None,
        type_count: qf.type_count,
        qf: qf.qf,
        canonical_degrees,
        t_map: BTreeMap::new(),
        t_unique_expression: BTreeMap::new(),
        generator_trace_flags: Vec::new(),
        gps_shifts: None,
        trace_gaps: None,
        caveats: Vec::new(),
    };

    if let Some((w1, w2)) = &witness {
        caveats.push(format!(
            "not Cohen-Macaulay: {w1} - {w2} lies in group(a_1..a_d)"
        ));
        caveats.push(
            "type_count is |max Ap(S,E)|; the Cohen-Macaulay type interpretation is invalid".into(),
        );
        caveats.push("nearly Gorenstein, GPS and trace data are undefined without Cohen-Macaulay".into());
        report.caveats = caveats;
        report.check_invariants()?;
        return Ok(report);
    }

    let ladder = Ladder::new(s, apery)?;
    let flags = ladder.generator_trace_flags()?;
    let t_map = ladder.t_map()?;
    let shifts = ladder.gps_shifts()?;

    report.is_gorenstein = ladder.is_gorenstein();
    report.is_nearly_gorenstein = Some(flags.iter().all(|(_, f)| *f));
    report.is_gps = Some(shifts.is_some());
    report.t_unique_expression = t_map
        .iter()
        .map(|(&i, m)| Ok((i, apery::unique_expression(apery, m)?)))
        .collect::<Result<_>>()?;
    report.t_map = t_map;
    report.generator_trace_flags = flags
        .into_iter()
        .map(|(generator, in_trace)| GeneratorTrace { generator, in_trace })
        .collect();
    match &shifts {
        Some(l) => report.trace_gaps = Some(ladder.gaps_below(l)?),
        None => caveats.push(
            "not Gorenstein on the punctured spectrum: S \\ tr(S) is infinite".into(),
        ),
    }
    report.gps_shifts = shifts;
    report.caveats = caveats;
    report.check_invariants()?;
    Ok(report)
}
