//! Finite-dimensional density-matrix numerics: labelled subsystems, partial
//! trace, von Neumann entropy (bits), subset entropy vectors, and evaluation
//! of alpha functionals on tripartite states.

pub mod channel;
pub mod linalg;
mod states;

pub use channel::{random_local_channel, LocalChannel};
pub use states::{
    classical_copy_extension, classical_random_extension, named_state, random_mixed_state,
    random_pure_state, LocalSpec, StateFamily,
};

use crate::entropy_space::{AlphaFloat, ALPHA_SLOT_MASKS};
use linalg::{canonical_eigh, entropy_from_spectrum, partial_trace_mat, C64};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("matrix is {rows}x{cols}, expected square of size {expected}")]
    BadShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is not 1 (got {0:.12})")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),
    #[error("keep set must be nonempty")]
    EmptyKeep,
    #[error("subsystem dimension must be >= 1, got {0}")]
    BadDimension(usize),
    #[error("state has labels {got:?}, expected {expected:?}")]
    LabelMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },
    #[error("merge groups must cover the labels contiguously and in order")]
    BadMerge,
    #[error("not a probability vector: {0}")]
    BadProbabilityVector(String),
    #[error("antisymmetric subspace needs local dimension >= 2, got {0}")]
    AntisymmetricDimension(usize),
    #[error("bad state spec `{spec}`: {reason}")]
    BadStateSpec { spec: String, reason: String },
    #[error(transparent)]
    EntropySpace(#[from] crate::entropy_space::EntropySpaceError),
}

/// Complex Hermitian PSD unit-trace matrix with labelled subsystem dimensions.
/// Subsystem index order is the label order, last label varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<(String, usize)>,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<(String, usize)>, mat: DMatrix<C64>) -> Result<Self, QuantumError> {
        for (i, (l, d)) in dims.iter().enumerate() {
            if *d == 0 {
                return Err(QuantumError::BadDimension(*d));
            }
            if dims[..i].iter().any(|(other, _)| other == l) {
                return Err(QuantumError::DuplicateLabel(l.clone()));
            }
        }
        let total: usize = dims.iter().map(|(_, d)| d).product();
        if mat.nrows() != total || mat.ncols() != total {
            return Err(QuantumError::BadShape {
                rows: mat.nrows(),
                cols: mat.ncols(),
                expected: total,
            });
        }
        let mut herm = 0.0f64;
        for i in 0..total {
            for j in i..total {
                let diff = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                herm = herm.max(diff);
            }
        }
        if herm > HERMITICITY_TOL {
            return Err(QuantumError::NotHermitian(herm));
        }
        let trace: C64 = (0..total).map(|i| mat[(i, i)]).sum();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(QuantumError::BadTrace(trace.re));
        }
        let min_eig = mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b));
        if min_eig < -PSD_TOL {
            return Err(QuantumError::NotPositive(min_eig));
        }
        Ok(DensityMatrix { dims, mat })
    }

    pub fn from_pure(dims: Vec<(String, usize)>, state: &DVector<C64>) -> Result<Self, QuantumError> {
        let norm = state.norm();
        let normalized = state / C64::new(norm, 0.0);
        let mat = &normalized * normalized.adjoint();
        DensityMatrix::new(dims, mat)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.dims.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> &[(String, usize)] {
        &self.dims
    }

    pub fn dim_list(&self) -> Vec<usize> {
        self.dims.iter().map(|&(_, d)| d).collect()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize, QuantumError> {
        self.dims
            .iter()
            .find(|(l, _)| l == label)
            .map(|&(_, d)| d)
            .ok_or_else(|| QuantumError::UnknownLabel(label.to_string()))
    }

    pub fn total_dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    fn mask_of(&self, labels: &[&str]) -> Result<u32, QuantumError> {
        let mut mask = 0u32;
        for l in labels {
            let pos = self
                .dims
                .iter()
                .position(|(dl, _)| dl == l)
                .ok_or_else(|| QuantumError::UnknownLabel(l.to_string()))?;
            mask |= 1 << pos;
        }
        Ok(mask)
    }

    /// Reduced state on `keep`, labels preserved in original order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix, QuantumError> {
        if keep.is_empty() {
            return Err(QuantumError::EmptyKeep);
        }
        let mask = self.mask_of(keep)?;
        let dim_list = self.dim_list();
        let reduced = partial_trace_mat(&dim_list, &self.mat, mask);
        let new_dims: Vec<(String, usize)> = self
            .dims
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, d)| d.clone())
            .collect();
        Ok(DensityMatrix {
            dims: new_dims,
            mat: reduced,
        })
    }

    /// Same state with new labels, positionally.
    pub fn renamed(&self, labels: &[&str]) -> Result<DensityMatrix, QuantumError> {
        if labels.len() != self.dims.len() {
            return Err(QuantumError::LabelMismatch {
                expected: self.labels().iter().map(|s| s.to_string()).collect(),
                got: labels.iter().map(|s| s.to_string()).collect(),
            });
        }
        let dims = labels
            .iter()
            .zip(&self.dims)
            .map(|(l, (_, d))| (l.to_string(), *d))
            .collect();
        DensityMatrix::new(dims, self.mat.clone())
    }

    /// Subsystem reordering; `order` lists all labels exactly once.
    pub fn permute(&self, order: &[&str]) -> Result<DensityMatrix, QuantumError> {
        if order.len() != self.dims.len() {
            return Err(QuantumError::LabelMismatch {
                expected: self.labels().iter().map(|s| s.to_string()).collect(),
                got: order.iter().map(|s| s.to_string()).collect(),
            });
        }
        let mut perm = Vec::with_capacity(order.len());
        for l in order {
            let pos = self
                .dims
                .iter()
                .position(|(dl, _)| dl == l)
                .ok_or_else(|| QuantumError::UnknownLabel(l.to_string()))?;
            if perm.contains(&pos) {
                return Err(QuantumError::DuplicateLabel(l.to_string()));
            }
            perm.push(pos);
        }
        let dim_list = self.dim_list();
        let mat = linalg::permute_mat(&dim_list, &self.mat, &perm);
        let dims = perm.iter().map(|&p| self.dims[p].clone()).collect();
        Ok(DensityMatrix { dims, mat })
    }

    /// Merge contiguous label runs into composite subsystems; groups must
    /// cover all labels in order. The matrix is unchanged.
    pub fn merge_labels(&self, groups: &[(&str, &[&str])]) -> Result<DensityMatrix, QuantumError> {
        let mut cursor = 0usize;
        let mut new_dims = Vec::new();
        for (new_label, members) in groups {
            let mut d = 1usize;
            for m in *members {
                if cursor >= self.dims.len() || self.dims[cursor].0 != *m {
                    return Err(QuantumError::BadMerge);
                }
                d *= self.dims[cursor].1;
                cursor += 1;
            }
            new_dims.push((new_label.to_string(), d));
        }
        if cursor != self.dims.len() {
            return Err(QuantumError::BadMerge);
        }
        DensityMatrix::new(new_dims, self.mat.clone())
    }

    /// Tensor product; label sets must be disjoint.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix, QuantumError> {
        for (l, _) in &other.dims {
            if self.dims.iter().any(|(sl, _)| sl == l) {
                return Err(QuantumError::DuplicateLabel(l.clone()));
            }
        }
        let mut dims = self.dims.clone();
        dims.extend(other.dims.clone());
        Ok(DensityMatrix {
            dims,
            mat: self.mat.kronecker(&other.mat),
        })
    }

    /// Von Neumann entropy of the whole state, in bits.
    pub fn entropy_bits(&self) -> f64 {
        let eigs = self.mat.clone().symmetric_eigenvalues();
        entropy_from_spectrum(eigs.as_slice())
    }

    /// Entropy of the reduced state on `labels`, in bits.
    pub fn subsystem_entropy(&self, labels: &[&str]) -> Result<f64, QuantumError> {
        let mask = self.mask_of(labels)?;
        if mask == 0 {
            return Err(QuantumError::EmptyKeep);
        }
        let dim_list = self.dim_list();
        let reduced = partial_trace_mat(&dim_list, &self.mat, mask);
        let eigs = reduced.symmetric_eigenvalues();
        Ok(entropy_from_spectrum(eigs.as_slice()))
    }

    /// All 2^n - 1 subset entropies in canonical subset order; the bridge to
    /// the cone side.
    pub fn entropy_vector(&self) -> Vec<f64> {
        let n = self.dims.len();
        let dim_list = self.dim_list();
        (1u32..(1 << n))
            .map(|mask| {
                let reduced = partial_trace_mat(&dim_list, &self.mat, mask);
                let eigs = reduced.symmetric_eigenvalues();
                entropy_from_spectrum(eigs.as_slice())
            })
            .collect()
    }

    /// I_{X:Y} = S_X + S_Y - S_XY for two labels.
    pub fn mutual_information(&self, x: &str, y: &str) -> Result<f64, QuantumError> {
        Ok(self.subsystem_entropy(&[x])? + self.subsystem_entropy(&[y])?
            - self.subsystem_entropy(&[x, y])?)
    }

    /// Deterministic eigendecomposition (see [`linalg::canonical_eigh`]).
    pub fn eigendecomposition(&self) -> (Vec<f64>, DMatrix<C64>) {
        canonical_eigh(&self.mat)
    }

    pub fn expect_labels(&self, expected: &[&str]) -> Result<(), QuantumError> {
        if self.labels() != expected {
            return Err(QuantumError::LabelMismatch {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                got: self.labels().iter().map(|s| s.to_string()).collect(),
            });
        }
        Ok(())
    }
}

/// The seven subset entropies of a tripartite (A, B, V) state, in bits,
/// ordered like the alpha slots: (S_A, S_B, S_V, S_AB, S_AV, S_BV, S_ABV).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EntropyReport {
    pub bits: [f64; 7],
}

impl EntropyReport {
    pub fn of(rho: &DensityMatrix) -> Result<EntropyReport, QuantumError> {
        rho.expect_labels(&["A", "B", "V"])?;
        let h = rho.entropy_vector();
        // entropy_vector is in subset-mask order; reorder to alpha slots.
        let bits = std::array::from_fn(|slot| h[ALPHA_SLOT_MASKS[slot] as usize - 1]);
        Ok(EntropyReport { bits })
    }
}

/// f^alpha: dot product of an alpha vector with the subset entropies of a
/// tripartite state, in bits.
pub fn f_alpha(alpha: &AlphaFloat, rho: &DensityMatrix) -> Result<f64, QuantumError> {
    let report = EntropyReport::of(rho)?;
    Ok(alpha
        .coeffs
        .iter()
        .zip(report.bits.iter())
        .map(|(a, s)| a * s)
        .sum())
}
