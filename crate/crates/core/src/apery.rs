//! The Apéry set of S with respect to its extremal rays, its maximal
//! elements, quasi-Frobenius elements and the canonical module degrees.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::lattice::{AffineSemigroup, LatticeVector};
use crate::membership::{MembershipEngine, ReachabilityTable, DEFAULT_BOX_BUDGET};

/// Default search cap for the `l_i` bounds.
pub const DEFAULT_L_MAX: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub l_max: u64,
    pub box_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            l_max: DEFAULT_L_MAX,
            box_budget: DEFAULT_BOX_BUDGET,
        }
    }
}

/// Ap(S,E) together with every coefficient tuple over the non-extremal
/// generators that produces each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AperyData {
    l_bounds: Vec<u64>,
    elements: Vec<LatticeVector>,
    reps: BTreeMap<LatticeVector, Vec<Vec<u64>>>,
    maximal: Vec<LatticeVector>,
}

impl AperyData {
    pub fn l_bounds(&self) -> &[u64] {
        &self.l_bounds
    }

    /// Sorted lexicographically.
    pub fn elements(&self) -> &[LatticeVector] {
        &self.elements
    }

    pub fn contains(&self, w: &LatticeVector) -> bool {
        self.elements.binary_search(w).is_ok()
    }

    /// Coefficient tuples `(n_1..n_r)` with `Σ n_i a_{d+i} = w`, sorted.
    pub fn reps(&self, w: &LatticeVector) -> Option<&[Vec<u64>]> {
        self.reps.get(w).map(Vec::as_slice)
    }

    pub fn all_reps(&self) -> &BTreeMap<LatticeVector, Vec<Vec<u64>>> {
        &self.reps
    }

    /// Maximal elements under ≼_S, sorted lexicographically.
    pub fn maximal(&self) -> &[LatticeVector] {
        &self.maximal
    }
}

/// `l_i = min{l ≥ 1 : l·a_{d+i} ∈ ℕa_1 + … + ℕa_d}` for each non-extremal generator.
pub fn compute_l_bounds(s: &AffineSemigroup, l_max: u64) -> Result<Vec<u64>> {
    s.others()
        .iter()
        .map(|g| {
            let mut multiple = g.clone();
            for l in 1..=l_max {
                if s.in_free_extremal_span(&multiple)? {
                    return Ok(l);
                }
                multiple = multiple.checked_add(g)?;
            }
            Err(Error::LBoundExceeded {
                generator: g.clone(),
                l_max,
            })
        })
        .collect()
}

/// Box DP that is rebuilt over a larger box whenever a query falls outside.
struct GrowingOracle {
    generators: Vec<LatticeVector>,
    table: Option<ReachabilityTable>,
    budget: u64,
}

impl GrowingOracle {
    fn new(s: &AffineSemigroup, budget: u64) -> Self {
        GrowingOracle {
            generators: s.generators().cloned().collect(),
            table: None,
            budget,
        }
    }

    fn contains(&mut self, z: &LatticeVector) -> Result<bool> {
        if !z.is_nonnegative() {
            return Ok(false);
        }
        if let Some(hit) = self.table.as_ref().and_then(|t| t.lookup(z)) {
            return Ok(hit);
        }
        let needed = match &self.table {
            Some(t) => LatticeVector::new(
                t.upper().coords().iter().zip(z.coords()).map(|(&u, &x)| u.max(x)),
            ),
            None => z.clone(),
        };
        let doubled = needed.checked_scale(2)?;
        let table = match ReachabilityTable::build(&self.generators, &doubled, self.budget) {
            Ok(t) => t,
            Err(Error::BoxTooLarge { .. }) => {
                ReachabilityTable::build(&self.generators, &needed, self.budget)?
            }
            Err(e) => return Err(e),
        };
        let hit = table.lookup(z).expect("box covers the query");
        self.table = Some(table);
        Ok(hit)
    }
}

/// Computes Ap(S,E), its representation lists and its maximal elements.
///
/// Candidates are the vectors `Σ n_i a_{d+i}` with `0 ≤ n_i < l_i`. Ap(S,E)
/// is closed under ≼_S from below, so a tuple can only produce an Apéry
/// element if every tuple obtained by decrementing one entry does; the
/// search therefore grows outward from the zero tuple and never visits a
/// tuple whose predecessors already left the set.
pub fn compute_apery(s: &AffineSemigroup, limits: &Limits) -> Result<AperyData> {
    let l_bounds = compute_l_bounds(s, limits.l_max)?;
    let mut oracle = GrowingOracle::new(s, limits.box_budget);
    let r = s.codim();

    let mut status: HashMap<LatticeVector, bool> = HashMap::new();
    let mut reps: BTreeMap<LatticeVector, Vec<Vec<u64>>> = BTreeMap::new();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue: VecDeque<(Vec<u64>, LatticeVector)> = VecDeque::new();
    let zero = vec![0u64; r];
    seen.insert(zero.clone());
    queue.push_back((zero, LatticeVector::zero(s.dim())));

    while let Some((tuple, vector)) = queue.pop_front() {
        let in_apery = match status.get(&vector) {
            Some(&known) => known,
            None => {
                let mut keep = true;
                for a in s.extremal() {
                    if oracle.contains(&vector.checked_sub(a)?)? {
                        keep = false;
                        break;
                    }
                }
                status.insert(vector.clone(), keep);
                keep
            }
        };
        if !in_apery {
            continue;
        }
        for j in 0..r {
            if tuple[j] + 1 >= l_bounds[j] {
                continue;
            }
            let mut next = tuple.clone();
            next[j] += 1;
            if seen.insert(next.clone()) {
                let w = vector.checked_add(&s.others()[j])?;
                queue.push_back((next, w));
            }
        }
        reps.entry(vector).or_default().push(tuple);
    }
    reps.values_mut().for_each(|t| t.sort());

    let elements: Vec<LatticeVector> = reps.keys().cloned().collect();
    let mut maximal = Vec::new();
    for m in &elements {
        let mut is_max = true;
        for w in &elements {
            if w != m && m.le_componentwise(w) && oracle.contains(&w.checked_sub(m)?)? {
                is_max = false;
                break;
            }
        }
        if is_max {
            maximal.push(m.clone());
        }
    }

    Ok(AperyData {
        l_bounds,
        elements,
        reps,
        maximal,
    })
}

/// `b ≼_S a`, i.e. `a − b ∈ S`.
pub fn precedes(engine: &MembershipEngine<'_>, b: &LatticeVector, a: &LatticeVector) -> Result<bool> {
    engine.member(&a.checked_sub(b)?)
}

/// Quasi-Frobenius elements `m − (a_1 + … + a_d)` over the maximal `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QfData {
    pub qf: Vec<LatticeVector>,
    /// |max Ap(S,E)|; the Cohen-Macaulay type only when K[S] is Cohen-Macaulay.
    pub type_count: usize,
}

pub fn quasi_frobenius(s: &AffineSemigroup, apery: &AperyData) -> Result<QfData> {
    let shift = s.extremal_sum()?;
    let mut qf = apery
        .maximal()
        .iter()
        .map(|m| m.checked_sub(&shift))
        .collect::<Result<Vec<_>>>()?;
    qf.sort();
    Ok(QfData {
        type_count: qf.len(),
        qf,
    })
}

/// Degrees `Σa_i − m` of the minimal generators of the canonical module.
pub fn canonical_generators(s: &AffineSemigroup, apery: &AperyData) -> Result<Vec<LatticeVector>> {
    let shift = s.extremal_sum()?;
    let mut degrees = apery
        .maximal()
        .iter()
        .map(|m| shift.checked_sub(m))
        .collect::<Result<Vec<_>>>()?;
    degrees.sort();
    Ok(degrees)
}

/// Whether `w` has exactly one expression over the non-extremal generators.
pub fn unique_expression(apery: &AperyData, w: &LatticeVector) -> Result<bool> {
    apery
        .reps(w)
        .map(|r| r.len() == 1)
        .ok_or_else(|| Error::NotAperyElement(w.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(list: &[&[i64]]) -> Vec<LatticeVector> {
        list.iter().map(|g| LatticeVector::from(*g)).collect()
    }

    fn vs(list: &[&[i64]]) -> Vec<LatticeVector> {
        let mut v = gens(list);
        v.sort();
        v
    }

    fn build(list: &[&[i64]]) -> AffineSemigroup {
        AffineSemigroup::build(&gens(list)).unwrap()
    }

    #[test]
    fn l_bounds() {
        let s = build(&[&[6, 0], &[0, 6], &[2, 1], &[1, 2]]);
        assert_eq!(compute_l_bounds(&s, DEFAULT_L_MAX).unwrap(), vec![6, 6]);
        let s = build(&[&[2, 0], &[0, 2], &[1, 1]]);
        assert_eq!(compute_l_bounds(&s, DEFAULT_L_MAX).unwrap(), vec![2]);
        let s = build(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(compute_l_bounds(&s, DEFAULT_L_MAX).unwrap(), vec![2, 2, 2]);
    }

    #[test]
    fn l_bound_cap() {
        let s = build(&[&[6, 0], &[0, 6], &[2, 1], &[1, 2]]);
        let err = compute_l_bounds(&s, 5).unwrap_err();
        assert!(matches!(err, Error::LBoundExceeded { l_max: 5, .. }));
    }

    #[test]
    fn apery_free() {
        let s = build(&[&[1, 0], &[0, 1]]);
        let ap = compute_apery(&s, &Limits::default()).unwrap();
        assert_eq!(ap.elements(), &vs(&[&[0, 0]]));
        assert_eq!(ap.maximal(), &vs(&[&[0, 0]]));
        assert!(unique_expression(&ap, &LatticeVector::zero(2)).unwrap());
    }

    #[test]
    fn apery_three_dimensional() {
        let s = build(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1]]);
        let ap = compute_apery(&s, &Limits::default()).unwrap();
        assert_eq!(ap.elements(), &vs(&[&[0, 0, 0], &[1, 1, 0], &[1, 0, 1], &[0, 1, 1]]));
        assert_eq!(ap.maximal(), &vs(&[&[1, 1, 0], &[1, 0, 1], &[0, 1, 1]]));
        assert!(unique_expression(&ap, &[1, 1, 0].into()).unwrap());
        let canon = canonical_generators(&s, &ap).unwrap();
        assert_eq!(canon, vs(&[&[1, 1, 2], &[1, 2, 1], &[2, 1, 1]]));
    }

    #[test]
    fn apery_not_ng_example() {
        let s = build(&[&[6, 0], &[0, 6], &[2, 1], &[1, 2]]);
        let ap = compute_apery(&s, &Limits::default()).unwrap();
        // Every a·(2,1) + b·(1,2) with both coordinates below 6.
        let expected = vs(&[
            &[0, 0], &[2, 1], &[4, 2], &[6, 3], &[1, 2], &[2, 4], &[3, 6],
            &[3, 3], &[5, 4], &[4, 5], &[7, 5], &[5, 7],
        ]);
        assert_eq!(ap.elements(), &expected);
        assert_eq!(ap.maximal(), &vs(&[&[7, 5], &[5, 7]]));
        // (7,5) = 3(2,1) + (1,2) only; tuples are over the sorted others [(1,2),(2,1)].
        assert_eq!(ap.reps(&[7, 5].into()).unwrap(), &[vec![1, 3]]);
        assert!(unique_expression(&ap, &[7, 5].into()).unwrap());
        assert!(matches!(
            unique_expression(&ap, &[6, 6].into()),
            Err(Error::NotAperyElement(_))
        ));

        let qf = quasi_frobenius(&s, &ap).unwrap();
        assert_eq!(qf.qf, vs(&[&[1, -1], &[-1, 1]]));
        assert_eq!(qf.type_count, 2);
        assert_eq!(canonical_generators(&s, &ap).unwrap(), vs(&[&[-1, 1], &[1, -1]]));

        let engine = MembershipEngine::with_apery(&s, &ap);
        assert!(precedes(&engine, &[2, 1].into(), &[7, 5].into()).unwrap());
        assert!(precedes(&engine, &[7, 5].into(), &[7, 5].into()).unwrap());
        assert!(!precedes(&engine, &[7, 5].into(), &[5, 7].into()).unwrap());
    }

    #[test]
    fn free_semigroup_qf() {
        let s = build(&[&[1, 0], &[0, 1]]);
        let ap = compute_apery(&s, &Limits::default()).unwrap();
        let qf = quasi_frobenius(&s, &ap).unwrap();
        assert_eq!(qf.qf, vs(&[&[-1, -1]]));
        assert_eq!(qf.type_count, 1);
        assert_eq!(canonical_generators(&s, &ap).unwrap(), vs(&[&[1, 1]]));
    }

    #[test]
    fn multiple_representations_merge() {
        // (2,2)+(2,2) = (1,2)+(3,2): both tuples land on (4,4).
        let s = build(&[&[5, 0], &[0, 5], &[1, 2], &[2, 2], &[3, 2]]);
        let ap = compute_apery(&s, &Limits::default()).unwrap();
        for (w, tuples) in ap.all_reps() {
            for t in tuples {
                let sum = LatticeVector::zero(2)
                    .checked_add_combination(t.iter().map(|&n| n as i64).zip(s.others()))
                    .unwrap();
                assert_eq!(&sum, w);
            }
        }
        if let Some(r) = ap.reps(&[4, 4].into()) {
            assert!(r.len() >= 2);
            assert!(!unique_expression(&ap, &[4, 4].into()).unwrap());
        }
    }
}
