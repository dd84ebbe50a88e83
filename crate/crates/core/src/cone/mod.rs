//! Exact rational polyhedral cones: H-representation storage, double
//! description conversion to generators, intersection, and validity checks.
//!
//! Inequalities `c` mean `c · x >= 0`. All stored vectors are primitive
//! integer vectors (collective gcd 1); orientation matters for rays and
//! inequalities, while lineality vectors are sign-normalized.

mod dd;
mod farkas;

use crate::exact::{
    canonical_integer, dot_int, dot_ratio_int, kernel_basis, rank, ratio_vec, Int, Ratio,
};
use num::{Signed, Zero};
use once_cell::sync::OnceCell;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConeError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("cannot canonicalize the zero vector")]
    ZeroVector,
    #[error("double description exceeded the ray limit of {limit} at inequality {at}")]
    RayLimitExceeded { limit: usize, at: usize },
    #[error("simplex exceeded the pivot limit of {0}")]
    PivotLimitExceeded(usize),
}

/// Generator representation: extreme rays of the pointed quotient plus a basis
/// of the lineality space. Rays are orthogonal to every lineality vector, so
/// representatives are unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VRep {
    pub rays: Vec<Vec<Int>>,
    pub lineality: Vec<Vec<Int>>,
}

impl VRep {
    /// Flattened generating set: rays plus both orientations of each lineality
    /// basis vector, sorted. This is the presentation used by ray tables.
    pub fn generators(&self) -> Vec<Vec<Int>> {
        let mut out: Vec<Vec<Int>> = self.rays.clone();
        for v in &self.lineality {
            out.push(v.clone());
            out.push(v.iter().map(|x| -x.clone()).collect());
        }
        out.sort();
        out
    }
}

/// Maximum number of simultaneously live rays before double description gives
/// up with an explicit error.
pub const DEFAULT_RAY_LIMIT: usize = 500_000;

/// Polyhedral cone `{x : c · x >= 0 for all stored c}` with exact arithmetic.
#[derive(Debug)]
pub struct RationalCone {
    dim: usize,
    inequalities: Vec<Vec<Int>>,
    vrep: OnceCell<VRep>,
    ray_limit: usize,
}

impl Clone for RationalCone {
    fn clone(&self) -> Self {
        RationalCone {
            dim: self.dim,
            inequalities: self.inequalities.clone(),
            vrep: self.vrep.clone(),
            ray_limit: self.ray_limit,
        }
    }
}

impl RationalCone {
    /// Cone from rational inequality vectors; zero rows are dropped, the rest
    /// are canonicalized and deduplicated.
    pub fn from_inequalities<I>(dim: usize, ineqs: I) -> Result<Self, ConeError>
    where
        I: IntoIterator<Item = Vec<Ratio>>,
    {
        let mut set = BTreeSet::new();
        for row in ineqs {
            if row.len() != dim {
                return Err(ConeError::VectorLength {
                    expected: dim,
                    got: row.len(),
                });
            }
            if let Some(canon) = canonical_integer(&row) {
                set.insert(canon);
            }
        }
        Ok(RationalCone {
            dim,
            inequalities: set.into_iter().collect(),
            vrep: OnceCell::new(),
            ray_limit: DEFAULT_RAY_LIMIT,
        })
    }

    pub fn from_integer_inequalities<I>(dim: usize, ineqs: I) -> Result<Self, ConeError>
    where
        I: IntoIterator<Item = Vec<i64>>,
    {
        Self::from_inequalities(
            dim,
            ineqs.into_iter().map(|row| {
                row.into_iter()
                    .map(|x| Ratio::from_integer(Int::from(x)))
                    .collect()
            }),
        )
    }

    /// The full space: zero inequalities; generators are an empty ray list and
    /// a full lineality basis.
    pub fn full_space(dim: usize) -> Self {
        RationalCone {
            dim,
            inequalities: Vec::new(),
            vrep: OnceCell::new(),
            ray_limit: DEFAULT_RAY_LIMIT,
        }
    }

    pub fn with_ray_limit(mut self, limit: usize) -> Self {
        self.ray_limit = limit;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Canonical deduplicated H-representation.
    pub fn inequalities(&self) -> &[Vec<Int>] {
        &self.inequalities
    }

    /// Minimal generating set via double description, cached after the first
    /// call. Output is deterministic: rays and lineality are sorted.
    pub fn extreme_rays(&self) -> Result<&VRep, ConeError> {
        if let Some(v) = self.vrep.get() {
            return Ok(v);
        }
        let computed = dd::extreme_rays(self.dim, &self.inequalities, self.ray_limit)?;
        Ok(self.vrep.get_or_init(|| computed))
    }

    /// H-representation intersection: concatenate and deduplicate inequality
    /// lists. Any cached generator representation is dropped.
    pub fn intersect(&self, other: &RationalCone) -> Result<RationalCone, ConeError> {
        if self.dim != other.dim {
            return Err(ConeError::DimensionMismatch(self.dim, other.dim));
        }
        let mut set: BTreeSet<Vec<Int>> = self.inequalities.iter().cloned().collect();
        set.extend(other.inequalities.iter().cloned());
        Ok(RationalCone {
            dim: self.dim,
            inequalities: set.into_iter().collect(),
            vrep: OnceCell::new(),
            ray_limit: self.ray_limit.max(other.ray_limit),
        })
    }

    /// Exact point membership against the H-representation.
    pub fn contains_point(&self, x: &[Ratio]) -> Result<bool, ConeError> {
        if x.len() != self.dim {
            return Err(ConeError::VectorLength {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.inequalities.iter().all(|c| {
            !crate::exact::dot_ratio(&ratio_vec(c), x).is_negative()
        }))
    }

    /// Does `c · x >= 0` hold on the whole cone? Decided on the generator
    /// representation: nonnegative on every ray, zero on every lineality
    /// vector. Exact, no tolerance.
    pub fn implies(&self, c: &[Ratio]) -> Result<bool, ConeError> {
        if c.len() != self.dim {
            return Err(ConeError::VectorLength {
                expected: self.dim,
                got: c.len(),
            });
        }
        let v = self.extreme_rays()?;
        for r in &v.rays {
            if dot_ratio_int(c, r).is_negative() {
                return Ok(false);
            }
        }
        for l in &v.lineality {
            if !dot_ratio_int(c, l).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Independent route for [`RationalCone::implies`]: exact conic-combination
    /// feasibility (is `c` a nonnegative combination of the inequality rows?),
    /// decided by a phase-1 simplex over the rationals. Never consults the
    /// generator representation.
    pub fn implies_farkas(&self, c: &[Ratio]) -> Result<bool, ConeError> {
        if c.len() != self.dim {
            return Err(ConeError::VectorLength {
                expected: self.dim,
                got: c.len(),
            });
        }
        farkas::in_conic_hull(self.dim, &self.inequalities, c)
    }

    /// Rank of the inequality rows tight at `ray`, used by extremality checks:
    /// an extreme ray of a pointed `d`-dimensional cone has tight rank `d - 1`.
    pub fn tight_rank(&self, ray: &[Int]) -> Result<usize, ConeError> {
        if ray.len() != self.dim {
            return Err(ConeError::VectorLength {
                expected: self.dim,
                got: ray.len(),
            });
        }
        let tight: Vec<Vec<Int>> = self
            .inequalities
            .iter()
            .filter(|c| dot_int(c, ray).is_zero())
            .cloned()
            .collect();
        Ok(rank(&tight, self.dim))
    }

    /// Basis of the lineality space `{x : c · x = 0 for all inequalities}`.
    pub fn lineality_space(&self) -> Vec<Vec<Int>> {
        if self.inequalities.is_empty() {
            return kernel_basis(&[], self.dim);
        }
        kernel_basis(&self.inequalities, self.dim)
    }
}

/// Canonical primitive integer form of a nonzero rational ray, orientation
/// preserved: a ray and its negative canonicalize to distinct vectors.
pub fn canonicalize_ray(v: &[Ratio]) -> Result<Vec<Int>, ConeError> {
    canonical_integer(v).ok_or(ConeError::ZeroVector)
}
