//! Small exact integer linear algebra: determinants, rank, adjugates and
//! cone membership, all with checked `i128` arithmetic.

use itertools::Itertools;
use num_integer::Integer;

use crate::error::{Error, Result};

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(|| Error::overflow("i128 multiply"))
}

fn sub(a: i128, b: i128) -> Result<i128> {
    a.checked_sub(b).ok_or_else(|| Error::overflow("i128 subtract"))
}

pub(crate) fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or_else(|| Error::overflow("i128 add"))
}

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
pub(crate) fn det(matrix: &[Vec<i128>]) -> Result<i128> {
    let n = matrix.len();
    if n == 0 {
        return Ok(1);
    }
    let mut m = matrix.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = sub(mul(m[i][j], m[k][k])?, mul(m[i][k], m[k][j])?)?;
                m[i][j] = num / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Rank of a row list; rows are reduced by their gcd after each step so
/// entries stay small.
pub(crate) fn rank(rows: &[Vec<i128>]) -> Result<usize> {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..m.len() {
            if m[i][c] == 0 {
                continue;
            }
            let (a, b) = (m[r][c], m[i][c]);
            for j in c..cols {
                m[i][j] = sub(mul(m[i][j], a)?, mul(m[r][j], b)?)?;
            }
            let g = m[i].iter().fold(0i128, |g, &x| g.gcd(&x));
            if g > 1 {
                m[i].iter_mut().for_each(|x| *x /= g);
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    Ok(r)
}

/// Adjugate and determinant of a square matrix, with the determinant made
/// positive (both negated together when needed), so that
/// `matrix^{-1} = adj / det`.
pub(crate) fn adjugate(matrix: &[Vec<i128>]) -> Result<(Vec<Vec<i128>>, i128)> {
    let n = matrix.len();
    let mut d = det(matrix)?;
    let mut adj = vec![vec![0i128; n]; n];
    if n == 1 {
        adj[0][0] = 1;
    } else {
        for i in 0..n {
            for j in 0..n {
                // adj[i][j] is the (j, i) cofactor.
                let minor: Vec<Vec<i128>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| matrix[r][c]).collect())
                    .collect();
                let cof = det(&minor)?;
                adj[i][j] = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
    }
    if d < 0 {
        d = -d;
        adj.iter_mut().flatten().for_each(|x| *x = -*x);
    }
    Ok((adj, d))
}

/// Decides whether `target` is a nonnegative rational combination of
/// `columns`. By Carathéodory it suffices to try linearly independent
/// subsets; each one is solved with Cramer's rule on a nonsingular square
/// row selection and then checked against every equation.
pub(crate) fn cone_contains(columns: &[&[i64]], target: &[i64]) -> Result<bool> {
    let d = target.len();
    if target.iter().all(|&x| x == 0) {
        return Ok(true);
    }
    for size in 1..=columns.len().min(d) {
        for subset in (0..columns.len()).combinations(size) {
            if nonneg_solution(columns, &subset, target)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn nonneg_solution(columns: &[&[i64]], subset: &[usize], target: &[i64]) -> Result<bool> {
    let d = target.len();
    let k = subset.len();
    for rows in (0..d).combinations(k) {
        let square: Vec<Vec<i128>> = rows
            .iter()
            .map(|&r| subset.iter().map(|&c| columns[c][r] as i128).collect())
            .collect();
        let base = det(&square)?;
        if base == 0 {
            continue;
        }
        // Cramer numerators: lambda_j = dets[j] / base.
        let mut dets = Vec::with_capacity(k);
        for j in 0..k {
            let mut replaced = square.clone();
            for (ri, &r) in rows.iter().enumerate() {
                replaced[ri][j] = target[r] as i128;
            }
            dets.push(det(&replaced)?);
        }
        for r in 0..d {
            let mut lhs = 0i128;
            for (j, &c) in subset.iter().enumerate() {
                lhs = add(lhs, mul(dets[j], columns[c][r] as i128)?)?;
            }
            if lhs != mul(base, target[r] as i128)? {
                return Ok(false);
            }
        }
        // The solution is unique once a nonsingular selection exists.
        return Ok(dets.iter().all(|&x| x == 0 || (x > 0) == (base > 0)));
    }
    Ok(false)
}
