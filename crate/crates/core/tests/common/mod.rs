//! Brute-force oracles shared by the integration tests. They use only the
//! generator lists of a semigroup, never the library's solvers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::Ratio;
use sgclass::{AffineSemigroup, LatticeVector};

pub fn v(c: &[i64]) -> LatticeVector {
    LatticeVector::from(c)
}

pub fn vs(list: &[&[i64]]) -> Vec<LatticeVector> {
    list.iter().map(|c| v(c)).collect()
}

pub fn semigroup(list: &[&[i64]]) -> AffineSemigroup {
    AffineSemigroup::build(&vs(list)).unwrap()
}

/// Reachability of every point in `[0, upper]` from 0 by generator steps.
pub struct Grid {
    upper: Vec<i64>,
    cells: Vec<bool>,
}

impl Grid {
    pub fn new(gens: &[LatticeVector], upper: &[i64]) -> Grid {
        let total: usize = upper.iter().map(|&u| u as usize + 1).product();
        let mut cells = vec![false; total];
        let points: Vec<Vec<i64>> = (0..total).map(|i| Self::point_of(upper, i)).collect();
        cells[0] = true;
        for (i, p) in points.iter().enumerate().skip(1) {
            cells[i] = gens.iter().any(|g| {
                let prev: Vec<i64> = p.iter().zip(g.coords()).map(|(a, b)| a - b).collect();
                prev.iter().all(|&x| x >= 0) && cells[Self::index_of(upper, &prev)]
            });
        }
        Grid {
            upper: upper.to_vec(),
            cells,
        }
    }

    fn point_of(upper: &[i64], mut i: usize) -> Vec<i64> {
        let mut p = vec![0; upper.len()];
        for k in (0..upper.len()).rev() {
            let ext = upper[k] as usize + 1;
            p[k] = (i % ext) as i64;
            i /= ext;
        }
        p
    }

    fn index_of(upper: &[i64], p: &[i64]) -> usize {
        p.iter().zip(upper).fold(0, |acc, (&x, &u)| acc * (u as usize + 1) + x as usize)
    }

    /// Membership for points inside the box; negative points are outside S.
    pub fn contains(&self, p: &[i64]) -> bool {
        if p.iter().any(|&x| x < 0) {
            return false;
        }
        assert!(p.iter().zip(&self.upper).all(|(x, u)| x <= u), "point outside oracle box");
        self.cells[Self::index_of(&self.upper, p)]
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.cells.len()).map(|i| Self::point_of(&self.upper, i))
    }
}

pub fn member(s: &AffineSemigroup, z: &[i64]) -> bool {
    if z.iter().any(|&x| x < 0) {
        return false;
    }
    let gens: Vec<LatticeVector> = s.generators().cloned().collect();
    Grid::new(&gens, z).contains(z)
}

/// Smallest l ≥ 1 with l·g in the monoid of the extremal rays.
pub fn l_bound(s: &AffineSemigroup, g: &LatticeVector) -> i64 {
    for l in 1..=10_000i64 {
        let m: Vec<i64> = g.coords().iter().map(|&x| x * l).collect();
        if Grid::new(s.extremal(), &m).contains(&m) {
            return l;
        }
    }
    panic!("no l bound below 10000 for {g}");
}

/// Ap(S,E) by exhaustive search over the box that contains every
/// `Σ n_i a_{d+i}` with `n_i < l_i`.
pub fn brute_apery(s: &AffineSemigroup) -> BTreeSet<LatticeVector> {
    let d = s.dim();
    let mut upper = vec![0i64; d];
    for g in s.others() {
        let l = l_bound(s, g);
        for k in 0..d {
            upper[k] += (l - 1) * g.coords()[k];
        }
    }
    let gens: Vec<LatticeVector> = s.generators().cloned().collect();
    let grid = Grid::new(&gens, &upper);
    grid.points()
        .filter(|p| grid.contains(p))
        .filter(|p| {
            s.extremal().iter().all(|a| {
                let q: Vec<i64> = p.iter().zip(a.coords()).map(|(x, y)| x - y).collect();
                !grid.contains(&q)
            })
        })
        .map(LatticeVector::from)
        .collect()
}

/// Solves `Σ x_i a_i = z` over the rationals by Gaussian elimination.
pub fn solve(columns: &[LatticeVector], z: &LatticeVector) -> Option<Vec<Ratio<i128>>> {
    let n = columns.len();
    let mut m: Vec<Vec<Ratio<i128>>> = (0..n)
        .map(|row| {
            let mut r: Vec<Ratio<i128>> = columns.iter().map(|c| Ratio::from(c.coords()[row] as i128)).collect();
            r.push(Ratio::from(z.coords()[row] as i128));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col] != Ratio::from(0))?;
        m.swap(col, pivot);
        let p = m[col][col];
        for x in m[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n]).collect())
}

/// `z ∈ group(a_1..a_d)`.
pub fn in_extremal_group(s: &AffineSemigroup, z: &LatticeVector) -> bool {
    solve(s.extremal(), z).unwrap().iter().all(|x| x.is_integer())
}

/// Maximal elements of a finite set under `b ≼ a iff a − b ∈ S`.
pub fn brute_maximal(s: &AffineSemigroup, set: &BTreeSet<LatticeVector>) -> BTreeSet<LatticeVector> {
    set.iter()
        .filter(|m| {
            !set.iter().any(|w| {
                w != *m && {
                    let diff: Vec<i64> = w.coords().iter().zip(m.coords()).map(|(a, b)| a - b).collect();
                    member(s, &diff)
                }
            })
        })
        .cloned()
        .collect()
}

/// Trace membership straight from the maximal elements.
pub fn brute_in_trace(s: &AffineSemigroup, maximal: &[LatticeVector], b: &LatticeVector) -> bool {
    maximal.iter().any(|mi| {
        maximal.iter().all(|mj| {
            let z: Vec<i64> = (0..s.dim())
                .map(|k| b.coords()[k] + mi.coords()[k] - mj.coords()[k])
                .collect();
            member(s, &z)
        })
    })
}
