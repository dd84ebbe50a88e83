//! Exact conic-combination feasibility: is `c` a nonnegative combination of
//! the inequality rows? Phase-1 simplex over the rationals with Bland's rule.
//! This is the independent cross-check for ray-based validity answers.

use super::ConeError;
use crate::exact::{Int, Ratio};
use num::{One, Signed, Zero};

const PIVOT_LIMIT: usize = 2_000_000;

pub(super) fn in_conic_hull(
    dim: usize,
    rows: &[Vec<Int>],
    c: &[Ratio],
) -> Result<bool, ConeError> {
    if c.iter().all(|x| x.is_zero()) {
        return Ok(true);
    }
    if rows.is_empty() {
        return Ok(false);
    }
    let n = rows.len();

    // Equations: sum_i lambda_i rows[i][j] = c[j]. Flip rows where c[j] < 0 so
    // the right-hand side is nonnegative, then minimize the sum of artificial
    // variables s_j added one per equation.
    //
    // Tableau layout: columns 0..n are lambda, n..n+dim artificials, last is
    // the right-hand side. Row `dim` is the phase-1 objective.
    let mut t: Vec<Vec<Ratio>> = vec![vec![Ratio::zero(); n + dim + 1]; dim + 1];
    for j in 0..dim {
        let flip = c[j].is_negative();
        for (i, row) in rows.iter().enumerate() {
            let a = Ratio::from_integer(row[j].clone());
            t[j][i] = if flip { -a } else { a };
        }
        t[j][n + j] = Ratio::one();
        t[j][n + dim] = if flip { -c[j].clone() } else { c[j].clone() };
    }
    // Reduced costs for the all-artificial basis: objective row = sum of
    // constraint rows over the lambda columns; value = sum of right-hand sides.
    for j in 0..dim {
        for i in 0..n {
            let add = t[j][i].clone();
            t[dim][i] += add;
        }
        let add = t[j][n + dim].clone();
        t[dim][n + dim] += add;
    }

    let mut basis: Vec<usize> = (n..n + dim).collect();
    let mut pivots = 0;
    loop {
        // Bland: entering column = smallest index with positive reduced cost.
        let Some(enter) = (0..n + dim).find(|&i| t[dim][i].is_positive()) else {
            break;
        };
        // Ratio test; Bland tie-break on the smallest basis variable.
        let mut leave: Option<(usize, Ratio)> = None;
        for j in 0..dim {
            if !t[j][enter].is_positive() {
                continue;
            }
            let ratio = &t[j][n + dim] / &t[j][enter];
            let better = match &leave {
                None => true,
                Some((lj, lr)) => ratio < *lr || (ratio == *lr && basis[j] < basis[*lj]),
            };
            if better {
                leave = Some((j, ratio));
            }
        }
        let Some((lj, _)) = leave else {
            // Objective is bounded below by zero, so an unbounded direction
            // cannot occur; defensive exit keeps the check total.
            break;
        };
        let pivot = t[lj][enter].clone();
        for x in t[lj].iter_mut() {
            *x /= &pivot;
        }
        for j in 0..=dim {
            if j != lj && !t[j][enter].is_zero() {
                let f = t[j][enter].clone();
                for i in 0..n + dim + 1 {
                    let delta = &f * &t[lj][i];
                    t[j][i] -= delta;
                }
            }
        }
        basis[lj] = enter;
        pivots += 1;
        if pivots > PIVOT_LIMIT {
            return Err(ConeError::PivotLimitExceeded(PIVOT_LIMIT));
        }
    }

    Ok(t[dim][n + dim].is_zero())
}
