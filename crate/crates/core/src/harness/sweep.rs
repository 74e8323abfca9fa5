use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::lattice::{AffineSemigroup, LatticeVector};

/// Upper bound on rejection-sampling attempts per random instance.
const MAX_ATTEMPTS: usize = 100_000;

/// Which semigroups a sweep visits. With a `seed` the sweep draws
/// `count_limit` random instances; otherwise it enumerates every generator
/// set exhaustively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub d: usize,
    pub max_coordinate: i64,
    /// Inclusive range of codimensions r.
    pub codim_range: (usize, usize),
    pub count_limit: Option<usize>,
    pub seed: Option<u64>,
}

impl SweepSpec {
    pub fn exhaustive(d: usize, max_coordinate: i64, codim_range: (usize, usize)) -> Self {
        SweepSpec {
            d,
            max_coordinate,
            codim_range,
            count_limit: None,
            seed: None,
        }
    }

    pub fn random(d: usize, max_coordinate: i64, codim_range: (usize, usize), seed: u64, count: usize) -> Self {
        SweepSpec {
            d,
            max_coordinate,
            codim_range,
            count_limit: Some(count),
            seed: Some(seed),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.d == 0 {
            return Err("dimension must be positive".into());
        }
        if self.max_coordinate < 1 {
            return Err("max coordinate must be positive".into());
        }
        if self.codim_range.0 > self.codim_range.1 {
            return Err(format!(
                "empty codimension range {}..{}",
                self.codim_range.0, self.codim_range.1
            ));
        }
        if self.seed.is_some() && self.count_limit.is_none() {
            return Err("random sweeps need a count".into());
        }
        Ok(())
    }
}

/// All nonzero points of `[0, max]^d` in lexicographic order.
fn box_points(d: usize, max: i64) -> Vec<LatticeVector> {
    (0..d)
        .map(|_| 0..=max)
        .multi_cartesian_product()
        .map(LatticeVector::from)
        .filter(|v| !v.is_zero())
        .collect()
}

/// The instance stream of a sweep.
///
/// Exhaustive mode walks codimensions in increasing order and, within one
/// codimension, the `(d + r)`-subsets of the box in lexicographic order of
/// their sorted point lists; sets rejected by [`AffineSemigroup::build`]
/// are skipped. Distinct subsets are distinct generator sets, so no
/// instance repeats.
pub fn sweep(spec: &SweepSpec) -> Box<dyn Iterator<Item = AffineSemigroup> + Send> {
    let limit = spec.count_limit.unwrap_or(usize::MAX);
    match spec.seed {
        None => {
            let points = box_points(spec.d, spec.max_coordinate);
            let d = spec.d;
            let (lo, hi) = spec.codim_range;
            let iter = (lo..=hi)
                .flat_map(move |r| points.clone().into_iter().combinations(d + r))
                .filter_map(|set| AffineSemigroup::build(&set).ok());
            Box::new(iter.take(limit))
        }
        Some(seed) => {
            let spec = spec.clone();
            Box::new((0..limit as u64).filter_map(move |k| random_instance(&spec, seed, k)))
        }
    }
}

/// Instance `k` of a random sweep: an independent ChaCha stream per index,
/// so instances do not depend on evaluation order.
pub fn random_instance(spec: &SweepSpec, seed: u64, k: u64) -> Option<AffineSemigroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    let (lo, hi) = spec.codim_range;
    for _ in 0..MAX_ATTEMPTS {
        let r = rng.gen_range(lo..=hi);
        let gens: Vec<LatticeVector> = (0..spec.d + r)
            .map(|_| LatticeVector::new((0..spec.d).map(|_| rng.gen_range(0..=spec.max_coordinate))))
            .collect();
        if let Ok(s) = AffineSemigroup::build(&gens) {
            return Some(s);
        }
    }
    None
}
