//! Structural facts about nearly Gorenstein simplicial semigroups, checked
//! as falsifiable properties on computed reports.

use serde::{Deserialize, Serialize};

use crate::apery::AperyData;
use crate::classify::{ClassificationReport, Ladder};
use crate::error::Result;
use crate::lattice::{AffineSemigroup, LatticeVector};
use crate::linalg;

/// NG and not Gorenstein ⇒ type ≥ d.
pub const TYPE_AT_LEAST_D: &str = "ng_type_at_least_d";
/// NG, not Gorenstein, r = 3 ⇒ type ≤ 3.
pub const CODIM_THREE_TYPE_BOUND: &str = "ng_codim3_type_at_most_3";
/// NG and type = d ⇒ edim ≥ 2d − 1; NG and type > d ⇒ edim ≥ 2d.
pub const EDIM_BOUND: &str = "ng_embedding_dimension_bound";
/// NG and some T(a_i) with a unique expression ⇒ type ≤ r + 1.
pub const UNIQUE_EXPRESSION_BOUND: &str = "ng_unique_expression_type_at_most_r_plus_1";
/// NG, r = 3 and some T(a_i) with a unique expression ⇒ type ≤ 3.
pub const CODIM_THREE_UNIQUE_EXPRESSION: &str = "ng_codim3_unique_expression_type_at_most_3";
/// type = 2 ⇒ both maximal Apéry elements lie in tr(S).
pub const TYPE_TWO_MAXIMALS_IN_TRACE: &str = "type2_maximals_in_trace";
/// Non-extremal generators on one line through 0 and two extremal rays in tr(S) ⇒ Gorenstein.
pub const COLLINEAR_FORCES_GORENSTEIN: &str = "collinear_nonextremal_forces_gorenstein";
/// Non-extremal generators in a hyperplane through 0 and all extremal rays in tr(S) ⇒ Gorenstein.
pub const HYPERPLANE_FORCES_GORENSTEIN: &str = "hyperplane_nonextremal_forces_gorenstein";
/// edim = 2d, E ⊆ tr(S) ≠ S ⇒ non-extremal generators independent, unique expressions.
pub const EDIM_2D_INDEPENDENT: &str = "edim_2d_nonextremal_independent";

pub const ALL_CHECKS: [&str; 9] = [
    TYPE_AT_LEAST_D,
    CODIM_THREE_TYPE_BOUND,
    EDIM_BOUND,
    UNIQUE_EXPRESSION_BOUND,
    CODIM_THREE_UNIQUE_EXPRESSION,
    TYPE_TWO_MAXIMALS_IN_TRACE,
    COLLINEAR_FORCES_GORENSTEIN,
    HYPERPLANE_FORCES_GORENSTEIN,
    EDIM_2D_INDEPENDENT,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Passed,
    /// The hypothesis did not hold; nothing was tested.
    Skipped,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    pub expected: String,
    pub observed: String,
}

/// A property whose hypothesis held while its conclusion failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Minimal generators, extremal rays first.
    pub instance: Vec<LatticeVector>,
    pub property_name: String,
    pub expected: String,
    pub observed: String,
}

fn outcome(name: &str, hypothesis: bool, holds: bool, expected: String, observed: String) -> CheckOutcome {
    let status = match (hypothesis, holds) {
        (false, _) => CheckStatus::Skipped,
        (true, true) => CheckStatus::Passed,
        (true, false) => CheckStatus::Failed,
    };
    CheckOutcome {
        name: name.to_string(),
        status,
        expected,
        observed,
    }
}

fn rank(vectors: &[LatticeVector]) -> Result<usize> {
    if vectors.is_empty() {
        return Ok(0);
    }
    let rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.coords().iter().map(|&x| x as i128).collect())
        .collect();
    linalg::rank(&rows)
}

/// Evaluates every check on one instance. Checks whose hypothesis fails are
/// reported as skipped.
pub fn check_theorems(
    s: &AffineSemigroup,
    apery: &AperyData,
    report: &ClassificationReport,
) -> Result<Vec<CheckOutcome>> {
    let d = report.d;
    let r = report.r;
    let t = report.type_count;
    let edim = report.embedding_dim();
    let ng = report.is_nearly_gorenstein == Some(true);
    let gor = report.is_gorenstein;
    let unique_t = report.t_unique_expression.values().any(|&u| u);
    let rays_in_trace: Vec<bool> = s
        .extremal()
        .iter()
        .map(|a| report.generator_in_trace(a) == Some(true))
        .collect();
    let rays_traced = rays_in_trace.iter().filter(|&&b| b).count();
    let others_rank = rank(s.others())?;

    let mut out = Vec::with_capacity(ALL_CHECKS.len());
    out.push(outcome(
        TYPE_AT_LEAST_D,
        ng && !gor,
        t >= d,
        format!("type >= {d}"),
        format!("type = {t}"),
    ));
    out.push(outcome(
        CODIM_THREE_TYPE_BOUND,
        ng && !gor && r == 3,
        t <= 3,
        "type <= 3".into(),
        format!("type = {t}"),
    ));
    let edim_needed = if t > d { 2 * d } else { 2 * d - 1 };
    out.push(outcome(
        EDIM_BOUND,
        ng && t >= d,
        edim >= edim_needed,
        format!("edim >= {edim_needed}"),
        format!("edim = {edim}, type = {t}"),
    ));
    out.push(outcome(
        UNIQUE_EXPRESSION_BOUND,
        ng && unique_t,
        t <= r + 1,
        format!("type <= {}", r + 1),
        format!("type = {t}"),
    ));
    out.push(outcome(
        CODIM_THREE_UNIQUE_EXPRESSION,
        ng && unique_t && r == 3,
        t <= 3,
        "type <= 3".into(),
        format!("type = {t}"),
    ));

    let (two_hyp, two_holds, two_obs) = if report.is_cm && t == 2 {
        let ladder = Ladder::new(s, apery)?;
        let flags = apery
            .maximal()
            .iter()
            .map(|m| Ok(ladder.in_trace(m)?.in_trace()))
            .collect::<Result<Vec<bool>>>()?;
        (true, flags.iter().all(|&f| f), format!("maximal trace flags {flags:?}"))
    } else {
        (false, true, String::new())
    };
    out.push(outcome(
        TYPE_TWO_MAXIMALS_IN_TRACE,
        two_hyp,
        two_holds,
        "both maximal elements in tr(S)".into(),
        two_obs,
    ));

    out.push(outcome(
        COLLINEAR_FORCES_GORENSTEIN,
        report.is_cm && d >= 2 && others_rank <= 1 && rays_traced >= 2,
        gor,
        "Gorenstein".into(),
        format!("type = {t}, extremal rays in trace = {rays_traced}"),
    ));
    out.push(outcome(
        HYPERPLANE_FORCES_GORENSTEIN,
        report.is_cm && others_rank < d && rays_traced == d,
        gor,
        "Gorenstein".into(),
        format!("type = {t}, rank of non-extremal generators = {others_rank}"),
    ));
    let all_unique = apery.all_reps().values().all(|reps| reps.len() == 1);
    out.push(outcome(
        EDIM_2D_INDEPENDENT,
        report.is_cm && edim == 2 * d && rays_traced == d && !gor,
        others_rank == d && all_unique,
        format!("rank {d} and unique expressions"),
        format!("rank {others_rank}, unique expressions: {all_unique}"),
    ));
    Ok(out)
}

/// The failed checks of [`check_theorems`], as violations.
pub fn verify_theorems(
    s: &AffineSemigroup,
    apery: &AperyData,
    report: &ClassificationReport,
) -> Result<Vec<Violation>> {
    Ok(check_theorems(s, apery, report)?
        .into_iter()
        .filter(|c| c.status == CheckStatus::Failed)
        .map(|c| Violation {
            instance: s.generators().cloned().collect(),
            property_name: c.name,
            expected: c.expected,
            observed: c.observed,
        })
        .collect())
}
