//! Random local CPTP maps, sampled through Haar isometries (Stinespring
//! dilation with the environment traced out).

use super::linalg::{apply_rect_to_rows, haar_isometry, C64};
use super::{DensityMatrix, QuantumError};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// CPTP map bound to one subsystem label, stored as Kraus operators.
#[derive(Debug, Clone)]
pub struct LocalChannel {
    label: String,
    d_in: usize,
    d_out: usize,
    kraus: Vec<DMatrix<C64>>,
}

/// Sample a channel by drawing a Haar isometry d_in -> d_out * kraus_rank and
/// tracing the rank factor. Deterministic per seed.
pub fn random_local_channel(
    label: &str,
    d_in: usize,
    d_out: usize,
    kraus_rank: usize,
    seed: u64,
) -> LocalChannel {
    assert!(d_in >= 1 && d_out >= 1 && kraus_rank >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = haar_isometry(d_out * kraus_rank, d_in, &mut rng);
    // Kraus operator e is the e-th d_out-row block (environment index slower).
    let kraus = (0..kraus_rank)
        .map(|e| v.rows(e * d_out, d_out).into_owned())
        .collect();
    LocalChannel {
        label: label.to_string(),
        d_in,
        d_out,
        kraus,
    }
}

impl LocalChannel {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[DMatrix<C64>] {
        &self.kraus
    }

    /// Apply to the bound subsystem of a state: rho' = Σ K_i rho K_i^†.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, QuantumError> {
        let pos = rho
            .dims()
            .iter()
            .position(|(l, _)| l == &self.label)
            .ok_or_else(|| QuantumError::UnknownLabel(self.label.clone()))?;
        let dims = rho.dim_list();
        if dims[pos] != self.d_in {
            return Err(QuantumError::BadShape {
                rows: dims[pos],
                cols: dims[pos],
                expected: self.d_in,
            });
        }
        let mut new_dims_list = dims.clone();
        new_dims_list[pos] = self.d_out;
        let total_out: usize = new_dims_list.iter().product();
        let mut out = DMatrix::<C64>::zeros(total_out, total_out);
        for k in self.kraus.iter() {
            let (_, half) = apply_rect_to_rows(&dims, rho.matrix(), pos, k);
            let (_, full) = apply_rect_to_rows(&dims, &half.adjoint(), pos, k);
            out += full.adjoint();
        }
        let mut labelled = rho.dims().to_vec();
        labelled[pos].1 = self.d_out;
        DensityMatrix::new(labelled, out)
    }
}
