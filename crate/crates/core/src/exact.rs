//! Exact rational linear algebra shared by the entropy-functional algebra and
//! the cone engine. All vectors are dense; dimensions here are small (7 or 15).

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Int = BigInt;
pub type Ratio = BigRational;

/// Scale a nonzero rational vector to the primitive integer vector with
/// collective gcd 1, preserving orientation. Returns `None` for the zero vector.
pub fn canonical_integer(v: &[Ratio]) -> Option<Vec<Int>> {
    if v.iter().all(|x| x.is_zero()) {
        return None;
    }
    let mut den = Int::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<Int> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let mut g = Int::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    Some(ints.iter().map(|x| x / &g).collect())
}

/// Like [`canonical_integer`] but for integer input.
pub fn canonical_integer_from_int(v: &[Int]) -> Option<Vec<Int>> {
    if v.iter().all(|x| x.is_zero()) {
        return None;
    }
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    Some(v.iter().map(|x| x / &g).collect())
}

/// Canonical representative of a *line* (sign-insensitive): primitive integers
/// with the first nonzero entry positive.
pub fn canonical_line(v: &[Ratio]) -> Option<Vec<Int>> {
    let mut ints = canonical_integer(v)?;
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut ints {
                *x = -(x.clone());
            }
        }
    }
    Some(ints)
}

pub fn ratio_vec(v: &[Int]) -> Vec<Ratio> {
    v.iter().map(|x| Ratio::from_integer(x.clone())).collect()
}

pub fn int_to_f64(x: &Int) -> f64 {
    use num::ToPrimitive;
    x.to_f64().expect("integer out of f64 range")
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Int::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn dot_ratio_int(c: &[Ratio], h: &[Int]) -> Ratio {
    debug_assert_eq!(c.len(), h.len());
    let mut acc = Ratio::zero();
    for (x, y) in c.iter().zip(h) {
        acc += x * Ratio::from_integer(y.clone());
    }
    acc
}

pub fn dot_ratio(a: &[Ratio], b: &[Ratio]) -> Ratio {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Ratio::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Reduced row echelon form over the rationals. Returns the pivot column per row.
fn rref(mat: &mut Vec<Vec<Ratio>>, dim: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(pr) = (r..mat.len()).find(|&i| !mat[i][c].is_zero()) else {
            continue;
        };
        mat.swap(r, pr);
        let pv = mat[r][c].clone();
        for x in mat[r].iter_mut() {
            *x /= &pv;
        }
        for i in 0..mat.len() {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                for j in 0..dim {
                    let t = &f * &mat[r][j];
                    mat[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == mat.len() {
            break;
        }
    }
    pivots
}

pub fn rank(rows: &[Vec<Int>], dim: usize) -> usize {
    let mut mat: Vec<Vec<Ratio>> = rows.iter().map(|r| ratio_vec(r)).collect();
    rref(&mut mat, dim).len()
}

/// Basis of the kernel `{x : rows · x = 0}`, as sign-normalized primitive
/// integer vectors. Deterministic: one vector per free column, in column order.
pub fn kernel_basis(rows: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    let mut mat: Vec<Vec<Ratio>> = rows.iter().map(|r| ratio_vec(r)).collect();
    let pivots = rref(&mut mat, dim);
    let mut basis = Vec::new();
    for free in 0..dim {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Ratio::zero(); dim];
        v[free] = Ratio::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -mat[i][free].clone();
        }
        basis.push(canonical_line(&v).expect("kernel vector is nonzero"));
    }
    basis
}

/// Inverse of a square integer matrix over the rationals, or `None` if singular.
pub fn invert(rows: &[Vec<Int>]) -> Option<Vec<Vec<Ratio>>> {
    let n = rows.len();
    let mut aug: Vec<Vec<Ratio>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = ratio_vec(r);
            row.extend((0..n).map(|j| {
                if i == j {
                    Ratio::one()
                } else {
                    Ratio::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let pr = (c..n).find(|&i| !aug[i][c].is_zero())?;
        aug.swap(c, pr);
        let pv = aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x /= &pv;
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &aug[c][j];
                    aug[i][j] -= t;
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}
