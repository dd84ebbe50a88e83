//! Linear entropy functionals on multi-party systems.
//!
//! A functional is a coefficient per nonempty subset of a [`PartySet`];
//! evaluating it against a vector of subset entropies is a dot product.
//! Subsets are indexed by bitmask with the least-significant bit naming the
//! first party, so subset index and bitmask coincide (1 ..= 2^n - 1). The
//! empty set carries entropy 0 and is never stored.

use crate::exact::{Int, Ratio};
use num::Zero;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EntropySpaceError {
    #[error("party set needs at least two parties, got {0}")]
    TooFewParties(usize),
    #[error("party set supports at most {max} parties, got {got}")]
    TooManyParties { max: usize, got: usize },
    #[error("duplicate party label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown party label `{0}`")]
    UnknownLabel(String),
    #[error("subset mask {mask:#b} is out of range for {parties} parties")]
    SubsetOutOfRange { mask: u32, parties: usize },
    #[error("subsets overlap")]
    OverlappingSubsets,
    #[error("subset argument must be nonempty")]
    EmptySubset,
    #[error("party sets differ")]
    PartySetMismatch,
    #[error("grouping image of `{slot}` is empty but alpha touches it")]
    EmptyGroupingImage { slot: &'static str },
    #[error("entropy vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("coefficient does not fit in i64")]
    CoefficientOverflow,
}

/// Nonempty-or-empty subset of a party set, as a bitmask relative to the
/// party order. Only meaningful together with the `PartySet` it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }
}

/// Ordered set of distinct party labels; fixes subset indexing for everything
/// downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartySet {
    labels: Vec<String>,
}

impl PartySet {
    pub fn new<I, S>(labels: I) -> Result<Self, EntropySpaceError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(EntropySpaceError::TooFewParties(labels.len()));
        }
        if labels.len() > 16 {
            return Err(EntropySpaceError::TooManyParties {
                max: 16,
                got: labels.len(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(EntropySpaceError::DuplicateLabel(l.clone()));
            }
        }
        Ok(PartySet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of nonempty subsets, 2^n - 1; also the functional dimension.
    pub fn n_subsets(&self) -> usize {
        (1usize << self.labels.len()) - 1
    }

    pub fn full(&self) -> Subset {
        Subset((1u32 << self.labels.len()) - 1)
    }

    pub fn party(&self, label: &str) -> Result<Subset, EntropySpaceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| Subset(1 << i))
            .ok_or_else(|| EntropySpaceError::UnknownLabel(label.to_string()))
    }

    pub fn subset(&self, labels: &[&str]) -> Result<Subset, EntropySpaceError> {
        let mut mask = Subset::EMPTY;
        for l in labels {
            mask = mask.union(self.party(l)?);
        }
        Ok(mask)
    }

    pub fn check_subset(&self, s: Subset) -> Result<(), EntropySpaceError> {
        if s.0 > self.full().0 {
            return Err(EntropySpaceError::SubsetOutOfRange {
                mask: s.0,
                parties: self.len(),
            });
        }
        Ok(())
    }

    /// Concatenated labels in party order, e.g. "A1A2B".
    pub fn subset_label(&self, s: Subset) -> String {
        let mut out = String::new();
        for (i, l) in self.labels.iter().enumerate() {
            if s.0 & (1 << i) != 0 {
                out.push_str(l);
            }
        }
        out
    }

    /// Subset with canonical index `i` (1 ..= 2^n - 1).
    pub fn subset_from_index(&self, i: usize) -> Result<Subset, EntropySpaceError> {
        if i == 0 || i > self.n_subsets() {
            return Err(EntropySpaceError::SubsetOutOfRange {
                mask: i as u32,
                parties: self.len(),
            });
        }
        Ok(Subset(i as u32))
    }

    pub fn subset_index(&self, s: Subset) -> Result<usize, EntropySpaceError> {
        self.check_subset(s)?;
        Ok(s.0 as usize)
    }

    pub fn nonempty_subsets(&self) -> impl Iterator<Item = Subset> {
        (1..=self.n_subsets() as u32).map(Subset)
    }
}

/// Linear functional on subset entropies: one rational coefficient per
/// nonempty subset.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyFunctional {
    party_set: PartySet,
    coeffs: Vec<Ratio>,
}

impl EntropyFunctional {
    pub fn zero(party_set: &PartySet) -> Self {
        EntropyFunctional {
            party_set: party_set.clone(),
            coeffs: vec![Ratio::zero(); party_set.n_subsets()],
        }
    }

    pub fn party_set(&self) -> &PartySet {
        &self.party_set
    }

    pub fn coeff(&self, s: Subset) -> Result<&Ratio, EntropySpaceError> {
        if s.is_empty() {
            return Err(EntropySpaceError::EmptySubset);
        }
        self.party_set.check_subset(s)?;
        Ok(&self.coeffs[s.0 as usize - 1])
    }

    pub fn add_coeff(&mut self, s: Subset, value: Ratio) -> Result<(), EntropySpaceError> {
        if s.is_empty() {
            return Err(EntropySpaceError::EmptySubset);
        }
        self.party_set.check_subset(s)?;
        self.coeffs[s.0 as usize - 1] += value;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &EntropyFunctional) -> Result<EntropyFunctional, EntropySpaceError> {
        if self.party_set != other.party_set {
            return Err(EntropySpaceError::PartySetMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(EntropyFunctional {
            party_set: self.party_set.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &EntropyFunctional) -> Result<EntropyFunctional, EntropySpaceError> {
        self.add(&other.scaled(&-Ratio::from_integer(Int::from(1))))
    }

    pub fn scaled(&self, by: &Ratio) -> EntropyFunctional {
        EntropyFunctional {
            party_set: self.party_set.clone(),
            coeffs: self.coeffs.iter().map(|c| c * by).collect(),
        }
    }

    /// Dense coefficient vector in canonical subset order.
    pub fn coeff_vector(&self) -> &[Ratio] {
        &self.coeffs
    }

    /// Exact evaluation against a rational entropy vector.
    pub fn eval_exact(&self, h: &[Ratio]) -> Result<Ratio, EntropySpaceError> {
        if h.len() != self.coeffs.len() {
            return Err(EntropySpaceError::VectorLength {
                expected: self.coeffs.len(),
                got: h.len(),
            });
        }
        Ok(crate::exact::dot_ratio(&self.coeffs, h))
    }

    /// Float evaluation against a numerical entropy vector (canonical order).
    pub fn eval_f64(&self, h: &[f64]) -> Result<f64, EntropySpaceError> {
        if h.len() != self.coeffs.len() {
            return Err(EntropySpaceError::VectorLength {
                expected: self.coeffs.len(),
                got: h.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(h)
            .map(|(c, x)| ratio_to_f64(c) * x)
            .sum())
    }

    /// Nonzero coefficients as (subset-label, numerator, denominator) triples,
    /// in canonical subset order. This is the serialization format.
    pub fn to_triples(&self) -> Result<Vec<(String, i64, i64)>, EntropySpaceError> {
        let mut out = Vec::new();
        for s in self.party_set.nonempty_subsets() {
            let c = &self.coeffs[s.0 as usize - 1];
            if c.is_zero() {
                continue;
            }
            let numer = int_to_i64(c.numer())?;
            let denom = int_to_i64(c.denom())?;
            out.push((self.party_set.subset_label(s), numer, denom));
        }
        Ok(out)
    }
}

pub fn ratio_to_f64(r: &Ratio) -> f64 {
    use num::ToPrimitive;
    r.to_f64().expect("rational out of f64 range")
}

fn int_to_i64(x: &Int) -> Result<i64, EntropySpaceError> {
    use num::ToPrimitive;
    x.to_i64().ok_or(EntropySpaceError::CoefficientOverflow)
}

fn check_disjoint_nonempty(
    ps: &PartySet,
    required: &[Subset],
    optional: &[Subset],
) -> Result<(), EntropySpaceError> {
    for s in required {
        if s.is_empty() {
            return Err(EntropySpaceError::EmptySubset);
        }
    }
    let mut seen = Subset::EMPTY;
    for s in required.iter().chain(optional) {
        ps.check_subset(*s)?;
        if seen.intersects(*s) {
            return Err(EntropySpaceError::OverlappingSubsets);
        }
        seen = seen.union(*s);
    }
    Ok(())
}

/// Conditional mutual information I_{X:Y|Z} = S_{XZ} + S_{YZ} - S_{XYZ} - S_Z.
/// `z` may be empty (plain mutual information; the S_∅ term is dropped).
pub fn cmi_functional(
    ps: &PartySet,
    x: Subset,
    y: Subset,
    z: Subset,
) -> Result<EntropyFunctional, EntropySpaceError> {
    check_disjoint_nonempty(ps, &[x, y], &[z])?;
    let one = Ratio::from_integer(Int::from(1));
    let mut f = EntropyFunctional::zero(ps);
    f.add_coeff(x.union(z), one.clone())?;
    f.add_coeff(y.union(z), one.clone())?;
    f.add_coeff(x.union(y).union(z), -one.clone())?;
    if !z.is_empty() {
        f.add_coeff(z, -one)?;
    }
    Ok(f)
}

/// Weak-monotonicity functional S_{C|X} + S_{C|Y} = S_{CX} + S_{CY} - S_X - S_Y.
pub fn wm_functional(
    ps: &PartySet,
    c: Subset,
    x: Subset,
    y: Subset,
) -> Result<EntropyFunctional, EntropySpaceError> {
    check_disjoint_nonempty(ps, &[c, x, y], &[])?;
    let one = Ratio::from_integer(Int::from(1));
    let mut f = EntropyFunctional::zero(ps);
    f.add_coeff(c.union(x), one.clone())?;
    f.add_coeff(c.union(y), one.clone())?;
    f.add_coeff(x, -one.clone())?;
    f.add_coeff(y, -one)?;
    Ok(f)
}

/// Fixed order of the seven alpha slots: (A, B, V, AB, AV, BV, ABV).
pub const ALPHA_SLOT_LABELS: [&str; 7] = ["A", "B", "V", "AB", "AV", "BV", "ABV"];

/// Slot membership as bitmasks over (A=1, B=2, V=4), in slot order.
pub const ALPHA_SLOT_MASKS: [u8; 7] = [1, 2, 4, 3, 5, 6, 7];

/// Coefficient vector over nonempty subsets of {A, B, V}, exact-rational
/// flavor. Slot order matches [`ALPHA_SLOT_LABELS`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector {
    pub coeffs: [Ratio; 7],
}

impl AlphaVector {
    pub fn zero() -> Self {
        AlphaVector {
            coeffs: std::array::from_fn(|_| Ratio::zero()),
        }
    }

    pub fn from_integers(v: [i64; 7]) -> Self {
        AlphaVector {
            coeffs: std::array::from_fn(|i| Ratio::from_integer(Int::from(v[i]))),
        }
    }

    pub fn from_int_slice(v: &[Int]) -> Self {
        assert_eq!(v.len(), 7);
        AlphaVector {
            coeffs: std::array::from_fn(|i| Ratio::from_integer(v[i].clone())),
        }
    }

    /// Unit vector for a slot index (see [`ALPHA_SLOT_LABELS`]).
    pub fn unit(slot: usize) -> Self {
        let mut a = AlphaVector::zero();
        a.coeffs[slot] = Ratio::from_integer(Int::from(1));
        a
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &AlphaVector) -> AlphaVector {
        AlphaVector {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] + &other.coeffs[i]),
        }
    }

    pub fn scaled(&self, by: &Ratio) -> AlphaVector {
        AlphaVector {
            coeffs: std::array::from_fn(|i| &self.coeffs[i] * by),
        }
    }

    /// Exact conversion to the float flavor.
    pub fn to_float(&self) -> AlphaFloat {
        AlphaFloat {
            coeffs: std::array::from_fn(|i| ratio_to_f64(&self.coeffs[i])),
        }
    }
}

/// Float flavor of [`AlphaVector`], used by the numeric estimator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AlphaFloat {
    pub coeffs: [f64; 7],
}

impl AlphaFloat {
    pub fn new(coeffs: [f64; 7]) -> Self {
        AlphaFloat { coeffs }
    }

    pub fn scaled(&self, by: f64) -> AlphaFloat {
        AlphaFloat {
            coeffs: std::array::from_fn(|i| self.coeffs[i] * by),
        }
    }
}

/// Assignment of the three slots A, B, V to pairwise disjoint (possibly empty)
/// subsets of a party set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grouping {
    images: [Subset; 3],
}

impl Grouping {
    pub fn new(
        ps: &PartySet,
        a: Subset,
        b: Subset,
        v: Subset,
    ) -> Result<Self, EntropySpaceError> {
        for s in [a, b, v] {
            ps.check_subset(s)?;
        }
        if a.intersects(b) || a.intersects(v) || b.intersects(v) {
            return Err(EntropySpaceError::OverlappingSubsets);
        }
        Ok(Grouping { images: [a, b, v] })
    }

    pub fn image(&self, slot_bit: u8) -> Subset {
        let mut out = Subset::EMPTY;
        for (i, img) in self.images.iter().enumerate() {
            if slot_bit & (1 << i) != 0 {
                out = out.union(*img);
            }
        }
        out
    }
}

/// Substitute grouped subsystems into an alpha vector: returns
/// Σ_J α_J S_{g(J)} as a functional over the party set; coefficients on equal
/// unions accumulate. A slot with an empty image must not be touched by any
/// nonzero coefficient.
pub fn alpha_to_functional(
    alpha: &AlphaVector,
    ps: &PartySet,
    grouping: &Grouping,
) -> Result<EntropyFunctional, EntropySpaceError> {
    for (i, label) in ["A", "B", "V"].iter().enumerate() {
        if grouping.images[i].is_empty() {
            let touched = ALPHA_SLOT_MASKS
                .iter()
                .zip(&alpha.coeffs)
                .any(|(m, c)| m & (1 << i) != 0 && !c.is_zero());
            if touched {
                return Err(EntropySpaceError::EmptyGroupingImage { slot: label });
            }
        }
    }
    let mut f = EntropyFunctional::zero(ps);
    for (slot, mask) in ALPHA_SLOT_MASKS.iter().enumerate() {
        let c = &alpha.coeffs[slot];
        if c.is_zero() {
            continue;
        }
        let union = grouping.image(*mask);
        f.add_coeff(union, c.clone())?;
    }
    Ok(f)
}
