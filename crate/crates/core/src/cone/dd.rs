//! Double description: convert an H-representation to its generator
//! representation.
//!
//! Non-pointed cones are handled by factoring out the lineality space first:
//! the quotient cone is built in coordinates over an integer basis of the
//! orthogonal complement, so ray representatives come back orthogonal to the
//! lineality space. The pointed conversion is incremental insertion with the
//! combinatorial adjacency test, processing inequalities most-zeros-first.

use super::{ConeError, VRep};
use crate::exact::{canonical_integer_from_int, dot_int, invert, kernel_basis, rank, Int};
use num::{Signed, Zero};

pub(super) fn extreme_rays(
    dim: usize,
    inequalities: &[Vec<Int>],
    ray_limit: usize,
) -> Result<VRep, ConeError> {
    let lineality = if inequalities.is_empty() {
        kernel_basis(&[], dim)
    } else {
        kernel_basis(inequalities, dim)
    };

    if lineality.is_empty() {
        let mut rays = dd_pointed(dim, inequalities.to_vec(), ray_limit)?;
        rays.sort();
        return Ok(VRep { rays, lineality });
    }

    // Quotient coordinates: columns are an integer basis of the orthogonal
    // complement of the lineality space.
    let complement = kernel_basis(&lineality, dim);
    let qdim = complement.len();
    let mut projected: Vec<Vec<Int>> = Vec::new();
    for c in inequalities {
        let row: Vec<Int> = complement.iter().map(|b| dot_int(c, b)).collect();
        if let Some(canon) = canonical_integer_from_int(&row) {
            projected.push(canon);
        }
    }
    projected.sort();
    projected.dedup();

    let mut rays = Vec::new();
    if !projected.is_empty() {
        for y in dd_pointed(qdim, projected, ray_limit)? {
            let mut x = vec![Int::zero(); dim];
            for (j, b) in complement.iter().enumerate() {
                for i in 0..dim {
                    x[i] += &y[j] * &b[i];
                }
            }
            rays.push(canonical_integer_from_int(&x).expect("lifted ray is nonzero"));
        }
    }
    rays.sort();
    Ok(VRep { rays, lineality })
}

/// Tight-set bitset over inequality indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &BitSet) -> BitSet {
        BitSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    fn is_subset_of(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Ray {
    vec: Vec<Int>,
    tight: BitSet,
}

/// Incremental double description for a pointed cone (`rank(A) == dim`).
fn dd_pointed(
    dim: usize,
    mut ineqs: Vec<Vec<Int>>,
    ray_limit: usize,
) -> Result<Vec<Vec<Int>>, ConeError> {
    // Fixed insertion heuristic: most zero coefficients first, then
    // lexicographic. Sorting here also makes the output independent of the
    // caller's inequality order.
    ineqs.sort_by(|a, b| {
        let za = a.iter().filter(|x| x.is_zero()).count();
        let zb = b.iter().filter(|x| x.is_zero()).count();
        zb.cmp(&za).then_with(|| a.cmp(b))
    });
    let n = ineqs.len();

    // Initial full-rank basis in insertion order.
    let mut basis_rows: Vec<Vec<Int>> = Vec::new();
    let mut basis_idx: Vec<usize> = Vec::new();
    for (i, row) in ineqs.iter().enumerate() {
        basis_rows.push(row.clone());
        if rank(&basis_rows, dim) == basis_rows.len() {
            basis_idx.push(i);
            if basis_rows.len() == dim {
                break;
            }
        } else {
            basis_rows.pop();
        }
    }
    assert_eq!(
        basis_rows.len(),
        dim,
        "pointed cone must have full-rank inequality system"
    );

    let inverse = invert(&basis_rows).expect("independent rows are invertible");
    let mut rays: Vec<Ray> = Vec::new();
    for j in 0..dim {
        let col: Vec<_> = (0..dim).map(|i| inverse[i][j].clone()).collect();
        let vec = crate::exact::canonical_integer(&col).expect("inverse column is nonzero");
        let mut tight = BitSet::new(n);
        for (&k, _) in basis_idx.iter().zip(0..) {
            if dot_int(&ineqs[k], &vec).is_zero() {
                tight.set(k);
            }
        }
        rays.push(Ray { vec, tight });
    }

    let mut processed: Vec<usize> = basis_idx.clone();
    for k in 0..n {
        if basis_idx.contains(&k) {
            continue;
        }
        let row = &ineqs[k];
        let mut plus: Vec<usize> = Vec::new();
        let mut minus: Vec<usize> = Vec::new();
        let mut values: Vec<Int> = Vec::with_capacity(rays.len());
        for (idx, ray) in rays.iter_mut().enumerate() {
            let d = dot_int(row, &ray.vec);
            if d.is_zero() {
                ray.tight.set(k);
            } else if d.is_positive() {
                plus.push(idx);
            } else {
                minus.push(idx);
            }
            values.push(d);
        }

        let mut newborn: Vec<Ray> = Vec::new();
        for &p in &plus {
            for &m in &minus {
                let common = rays[p].tight.intersection(&rays[m].tight);
                // Necessary tight-count bound for adjacency, then the
                // combinatorial test: no third ray's tight set contains the
                // common set.
                if dim >= 2 && common.count() < dim - 2 {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(o, r)| o == p || o == m || !common.is_subset_of(&r.tight));
                if !adjacent {
                    continue;
                }
                let dp = &values[p];
                let dm = &values[m];
                let combo: Vec<Int> = rays[m]
                    .vec
                    .iter()
                    .zip(&rays[p].vec)
                    .map(|(mv, pv)| dp * mv - dm * pv)
                    .collect();
                let vec = canonical_integer_from_int(&combo).expect("combination is nonzero");
                let mut tight = BitSet::new(n);
                for &kk in processed.iter().chain(std::iter::once(&k)) {
                    if dot_int(&ineqs[kk], &vec).is_zero() {
                        tight.set(kk);
                    }
                }
                newborn.push(Ray { vec, tight });
                if rays.len() + newborn.len() > ray_limit {
                    return Err(ConeError::RayLimitExceeded {
                        limit: ray_limit,
                        at: k,
                    });
                }
            }
        }

        let minus_set: Vec<bool> = {
            let mut v = vec![false; rays.len()];
            for &m in &minus {
                v[m] = true;
            }
            v
        };
        let mut kept: Vec<Ray> = rays
            .drain(..)
            .enumerate()
            .filter_map(|(i, r)| (!minus_set[i]).then_some(r))
            .collect();
        kept.extend(newborn);
        rays = kept;
        processed.push(k);
    }

    Ok(rays.into_iter().map(|r| r.vec).collect())
}
