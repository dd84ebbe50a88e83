//! Dense tensor-index helpers for multi-subsystem operators and the
//! deterministic Hermitian eigendecomposition used throughout.
//!
//! Convention: subsystem dims `[d_0, .., d_{k-1}]`, flat index with the last
//! subsystem varying fastest. Subsystem subsets are bitmasks with bit i for
//! position i.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Linear strides for each position (last fastest).
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Flat offsets of every joint index of the masked positions, other positions
/// fixed at zero. `offsets(dims, mask)[j]` enumerates the masked subsystem in
/// row-major order of the masked positions.
fn offsets(dims: &[usize], mask: u32) -> Vec<usize> {
    let st = strides(dims);
    let positions: Vec<usize> = (0..dims.len()).filter(|i| mask & (1 << i) != 0).collect();
    let mut out = vec![0usize];
    for &p in &positions {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for base in &out {
            for x in 0..dims[p] {
                next.push(base + x * st[p]);
            }
        }
        out = next;
    }
    out
}

pub fn masked_dim(dims: &[usize], mask: u32) -> usize {
    (0..dims.len())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| dims[i])
        .product()
}

/// Reduce a density operator to the masked positions.
pub fn partial_trace_mat(dims: &[usize], mat: &DMatrix<C64>, keep_mask: u32) -> DMatrix<C64> {
    let full_mask = (1u32 << dims.len()) - 1;
    let tr_mask = full_mask & !keep_mask;
    let keep_off = offsets(dims, keep_mask);
    let tr_off = offsets(dims, tr_mask);
    let dk = keep_off.len();
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    for (a, &ka) in keep_off.iter().enumerate() {
        for (b, &kb) in keep_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &tr_off {
                acc += mat[(ka + t, kb + t)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Reduced density operator of a pure state on the masked positions.
pub fn partial_trace_pure(dims: &[usize], vec: &DVector<C64>, keep_mask: u32) -> DMatrix<C64> {
    let full_mask = (1u32 << dims.len()) - 1;
    let tr_mask = full_mask & !keep_mask;
    let keep_off = offsets(dims, keep_mask);
    let tr_off = offsets(dims, tr_mask);
    let dk = keep_off.len();
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    for (a, &ka) in keep_off.iter().enumerate() {
        for (b, &kb) in keep_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &tr_off {
                acc += vec[ka + t] * vec[kb + t].conj();
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Embed an operator acting on the masked positions into the full space
/// (identity elsewhere).
pub fn lift_operator(dims: &[usize], mask: u32, op: &DMatrix<C64>) -> DMatrix<C64> {
    let full_mask = (1u32 << dims.len()) - 1;
    let rest_mask = full_mask & !mask;
    let sub_off = offsets(dims, mask);
    let rest_off = offsets(dims, rest_mask);
    let d = total_dim(dims);
    assert_eq!(op.nrows(), sub_off.len());
    let mut out = DMatrix::<C64>::zeros(d, d);
    for (a, &sa) in sub_off.iter().enumerate() {
        for (b, &sb) in sub_off.iter().enumerate() {
            let v = op[(a, b)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for &r in &rest_off {
                out[(sa + r, sb + r)] = v;
            }
        }
    }
    out
}

/// Apply a (possibly rectangular) operator to one subsystem of a vector,
/// replacing its dimension: `out = (I ⊗ op ⊗ I) vec`.
pub fn apply_rect_to_position(
    dims: &[usize],
    vec: &DVector<C64>,
    pos: usize,
    op: &DMatrix<C64>,
) -> (Vec<usize>, DVector<C64>) {
    let d_in = dims[pos];
    let d_out = op.nrows();
    assert_eq!(op.ncols(), d_in);
    let mut new_dims = dims.to_vec();
    new_dims[pos] = d_out;

    let left: usize = dims[..pos].iter().product();
    let right: usize = dims[pos + 1..].iter().product();
    let mut out = DVector::<C64>::zeros(left * d_out * right);
    for l in 0..left {
        for o in 0..d_out {
            for r in 0..right {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..d_in {
                    acc += op[(o, i)] * vec[(l * d_in + i) * right + r];
                }
                out[(l * d_out + o) * right + r] = acc;
            }
        }
    }
    (new_dims, out)
}

/// Same as [`apply_rect_to_position`] for the row index of a matrix: returns
/// `(I ⊗ op ⊗ I) · mat`.
pub fn apply_rect_to_rows(
    dims: &[usize],
    mat: &DMatrix<C64>,
    pos: usize,
    op: &DMatrix<C64>,
) -> (Vec<usize>, DMatrix<C64>) {
    let d_in = dims[pos];
    let d_out = op.nrows();
    assert_eq!(op.ncols(), d_in);
    let mut new_dims = dims.to_vec();
    new_dims[pos] = d_out;

    let left: usize = dims[..pos].iter().product();
    let right: usize = dims[pos + 1..].iter().product();
    let ncols = mat.ncols();
    let mut out = DMatrix::<C64>::zeros(left * d_out * right, ncols);
    for c in 0..ncols {
        for l in 0..left {
            for o in 0..d_out {
                for r in 0..right {
                    let mut acc = C64::new(0.0, 0.0);
                    for i in 0..d_in {
                        acc += op[(o, i)] * mat[((l * d_in + i) * right + r, c)];
                    }
                    out[((l * d_out + o) * right + r, c)] = acc;
                }
            }
        }
    }
    (new_dims, out)
}

/// Reorder subsystems: `perm[new_pos] = old_pos`.
pub fn permute_mat(dims: &[usize], mat: &DMatrix<C64>, perm: &[usize]) -> DMatrix<C64> {
    let d = total_dim(dims);
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    // map[old_flat] = new_flat
    let mut map = vec![0usize; d];
    for (old, m) in map.iter_mut().enumerate() {
        let mut new_idx = 0;
        for (np, &op) in perm.iter().enumerate() {
            let coord = (old / old_strides[op]) % dims[op];
            new_idx += coord * new_strides[np];
        }
        *m = new_idx;
    }
    let mut out = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(map[i], map[j])] = mat[(i, j)];
        }
    }
    out
}

/// Eigenvalue window treated as degenerate for basis canonicalization.
const DEGENERACY_TOL: f64 = 1e-10;

/// Hermitian eigendecomposition with a deterministic convention: eigenvalues
/// descending; within each (numerically) degenerate block the basis is
/// rebuilt by Gram-Schmidt over projected standard basis vectors; every
/// eigenvector has its first significant component rotated real positive.
pub fn canonical_eigh(mat: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = mat.nrows();
    let eig = mat.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("finite eigenvalues")
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &eig.eigenvectors.column(old));
    }

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end - 1] - values[end]).abs() <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            canonicalize_block(&mut vectors, start, end);
        }
        start = end;
    }

    for j in 0..n {
        phase_fix_column(&mut vectors, j);
    }
    (values, vectors)
}

/// Rebuild the basis of a degenerate eigenspace from projections of standard
/// basis vectors, making it independent of the eigensolver's arbitrary choice.
fn canonicalize_block(vectors: &mut DMatrix<C64>, start: usize, end: usize) {
    let n = vectors.nrows();
    let m = end - start;
    let block = vectors.columns(start, m).into_owned();
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(m);
    for i in 0..n {
        if basis.len() == m {
            break;
        }
        // Projection of e_i onto the eigenspace: block * (block^H e_i).
        let coeffs = block.adjoint() * DVector::<C64>::from_fn(n, |r, _| {
            if r == i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let mut v = &block * coeffs;
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / C64::new(norm, 0.0));
        }
    }
    // A full-rank eigenspace always yields m projections; fall back to the
    // solver's basis for any shortfall.
    for (k, b) in basis.into_iter().enumerate() {
        vectors.set_column(start + k, &b);
    }
}

fn phase_fix_column(vectors: &mut DMatrix<C64>, j: usize) {
    let n = vectors.nrows();
    for i in 0..n {
        let z = vectors[(i, j)];
        if z.norm() > 1e-9 {
            let phase = z.conj() / C64::new(z.norm(), 0.0);
            for r in 0..n {
                vectors[(r, j)] *= phase;
            }
            return;
        }
    }
}

/// Binary entropy sum over a spectrum, in bits. Eigenvalues below 1e-12 are
/// treated as exact zeros; the result is clamped nonnegative.
pub fn entropy_from_spectrum(eigenvalues: &[f64]) -> f64 {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l > 1e-12 {
            s -= l * l.log2();
        }
    }
    s.max(0.0)
}

/// Haar-distributed isometry (rows >= cols): QR of a complex Gaussian matrix
/// with the R diagonal rotated positive so the draw is well-defined.
pub fn haar_isometry<R: rand::Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    use rand_distr::{Distribution, StandardNormal};
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = DMatrix::<C64>::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    qr_orthonormalize(&g)
}

/// Thin Q factor with the R diagonal phase-fixed positive.
pub fn qr_orthonormalize(m: &DMatrix<C64>) -> DMatrix<C64> {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        let d = r[(j, j)];
        if d.norm() > 1e-300 {
            let phase = d / C64::new(d.norm(), 0.0);
            for i in 0..q.nrows() {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}
