//! Deciding `z ∈ S`: a brute-force reachability DP over the box below `z`,
//! and the Apéry decomposition `S = Ap(S,E) + ℕE`, which is exact once the
//! Apéry set is known.

use crate::apery::AperyData;
use crate::error::{Error, Result};
use crate::lattice::{AffineSemigroup, LatticeVector};

/// Default cap on the number of cells a reachability table may allocate.
pub const DEFAULT_BOX_BUDGET: u64 = 100_000_000;

/// Reachability of every point of the box `[0, upper]` from 0 by adding
/// generators, never leaving the box.
#[derive(Debug, Clone)]
pub struct ReachabilityTable {
    upper: LatticeVector,
    strides: Vec<usize>,
    cells: Vec<bool>,
}

impl ReachabilityTable {
    pub fn build(generators: &[LatticeVector], upper: &LatticeVector, budget: u64) -> Result<Self> {
        let d = upper.dim();
        let mut total: u128 = 1;
        for &u in upper.coords() {
            total = total.saturating_mul(u as u128 + 1);
        }
        if total > budget as u128 {
            return Err(Error::BoxTooLarge {
                target: upper.clone(),
                cells: total,
                budget,
            });
        }
        let extent: Vec<usize> = upper.coords().iter().map(|&u| u as usize + 1).collect();
        let mut strides = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * extent[k + 1];
        }
        let steps: Vec<(&[i64], usize)> = generators
            .iter()
            .filter(|g| g.le_componentwise(upper))
            .map(|g| (g.coords(), g.coords().iter().zip(&strides).map(|(&c, &s)| c as usize * s).sum()))
            .collect();

        let total = total as usize;
        let mut cells = vec![false; total];
        cells[0] = true;
        let mut point = vec![0i64; d];
        for idx in 1..total {
            // advance the mixed-radix counter to the coordinates of idx
            for k in (0..d).rev() {
                point[k] += 1;
                if point[k] < extent[k] as i64 {
                    break;
                }
                point[k] = 0;
            }
            cells[idx] = steps
                .iter()
                .any(|&(g, off)| g.iter().zip(&point).all(|(a, p)| a <= p) && cells[idx - off]);
        }
        Ok(ReachabilityTable {
            upper: upper.clone(),
            strides,
            cells,
        })
    }

    pub fn upper(&self) -> &LatticeVector {
        &self.upper
    }

    /// `None` when `z` lies outside the box on the upper side.
    pub fn lookup(&self, z: &LatticeVector) -> Option<bool> {
        if !z.is_nonnegative() {
            return Some(false);
        }
        if !z.le_componentwise(&self.upper) {
            return None;
        }
        let idx: usize = z.coords().iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum();
        Some(self.cells[idx])
    }
}

/// Membership in the monoid generated by `generators`, by box DP.
pub fn member_dp_generators(generators: &[LatticeVector], z: &LatticeVector, budget: u64) -> Result<bool> {
    if !z.is_nonnegative() {
        return Ok(false);
    }
    let table = ReachabilityTable::build(generators, z, budget)?;
    Ok(table.lookup(z).unwrap_or(false))
}

/// Brute-force membership oracle for `z ∈ S`.
pub fn member_dp(s: &AffineSemigroup, z: &LatticeVector, budget: u64) -> Result<bool> {
    s.check_dim(z)?;
    let gens: Vec<LatticeVector> = s.generators().cloned().collect();
    member_dp_generators(&gens, z, budget)
}

/// Outcome of the ray-shift question `∃λ ∈ ℕ: z + λ·a_i ∈ S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftAnswer {
    pub exists: bool,
    /// The least such λ; present iff `exists`.
    pub minimal_lambda: Option<u64>,
}

impl ShiftAnswer {
    const NONE: ShiftAnswer = ShiftAnswer {
        exists: false,
        minimal_lambda: None,
    };
}

/// Membership queries against one semigroup. Without an Apéry set only the
/// DP engine is available.
#[derive(Debug, Clone, Copy)]
pub struct MembershipEngine<'a> {
    semigroup: &'a AffineSemigroup,
    apery: Option<&'a AperyData>,
    budget: u64,
}

impl<'a> MembershipEngine<'a> {
    pub fn new(semigroup: &'a AffineSemigroup) -> Self {
        MembershipEngine {
            semigroup,
            apery: None,
            budget: DEFAULT_BOX_BUDGET,
        }
    }

    pub fn with_apery(semigroup: &'a AffineSemigroup, apery: &'a AperyData) -> Self {
        MembershipEngine {
            semigroup,
            apery: Some(apery),
            budget: DEFAULT_BOX_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn semigroup(&self) -> &'a AffineSemigroup {
        self.semigroup
    }

    pub fn apery(&self) -> Option<&'a AperyData> {
        self.apery
    }

    pub fn member_dp(&self, z: &LatticeVector) -> Result<bool> {
        member_dp(self.semigroup, z, self.budget)
    }

    /// `z ∈ S` iff `z − w ∈ ℕa_1 + … + ℕa_d` for some `w ∈ Ap(S,E)`.
    pub fn member_apery(&self, z: &LatticeVector) -> Result<bool> {
        let apery = self.apery.ok_or(Error::AperyMissing)?;
        self.semigroup.check_dim(z)?;
        if !z.is_nonnegative() {
            return Ok(false);
        }
        for w in apery.elements() {
            if !w.le_componentwise(z) {
                continue;
            }
            if self.semigroup.in_free_extremal_span(&z.checked_sub(w)?)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Uses the Apéry engine when attached, the DP otherwise.
    pub fn member(&self, z: &LatticeVector) -> Result<bool> {
        match self.apery {
            Some(_) => self.member_apery(z),
            None => self.member_dp(z),
        }
    }

    /// Decides `∃λ ∈ ℕ: z + λ·a_i ∈ S` for the 1-based ray index `i`.
    ///
    /// `z + λa_i ∈ S` iff some `w ∈ Ap(S,E)` has integral extremal
    /// coordinates `c` of `z − w` with `c_k ≥ 0` for `k ≠ i` and `c_i + λ ≥ 0`.
    pub fn shift_member(&self, z: &LatticeVector, ray: usize) -> Result<ShiftAnswer> {
        let apery = self.apery.ok_or(Error::AperyMissing)?;
        self.semigroup.ray(ray)?;
        self.semigroup.check_dim(z)?;
        let i = ray - 1;
        let mut best: Option<u64> = None;
        for w in apery.elements() {
            let Some(c) = self.semigroup.integral_extremal_coordinates(&z.checked_sub(w)?)? else {
                continue;
            };
            if c.iter().enumerate().any(|(k, &x)| k != i && x < 0) {
                continue;
            }
            let lambda = u64::try_from((-c[i]).max(0)).map_err(|_| Error::overflow("shift"))?;
            best = Some(best.map_or(lambda, |b| b.min(lambda)));
        }
        Ok(match best {
            Some(l) => ShiftAnswer {
                exists: true,
                minimal_lambda: Some(l),
            },
            None => ShiftAnswer::NONE,
        })
    }
}
