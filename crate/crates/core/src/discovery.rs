//! Discovery pipeline for monotone alpha cones.
//!
//! The entropy cone on four parties is carved out by every strong-
//! subadditivity and weak-monotonicity instance. Each monotonicity kind
//! induces a linear map from alpha space into that 15-dimensional functional
//! space; requiring the image to be valid on the entropy cone yields one
//! inequality per (kind, extreme ray) pair, and the resulting cones in R^7
//! are enumerated exactly.

use crate::cone::{ConeError, RationalCone};
use crate::entropy_space::{
    alpha_to_functional, cmi_functional, wm_functional, AlphaFloat, AlphaVector,
    EntropyFunctional, EntropySpaceError, Grouping, PartySet, Subset,
};
use crate::exact::{dot_ratio_int, Int, Ratio};
use crate::quantum::DensityMatrix;
use num::{Signed, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiscoveryError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    EntropySpace(#[from] EntropySpaceError),
    #[error("enumerated ray {ray:?} failed independent re-verification")]
    RayVerificationFailed { ray: Vec<i64> },
    #[error("unknown cone selector `{0}` (expected 00, 10, 01 or 11)")]
    BadSelector(String),
}

/// The four ways a processed subsystem can be handled: discarded (0-type) or
/// regrouped into the extension (1-type), on the A side or the B side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityKind {
    ZeroA,
    OneA,
    ZeroB,
    OneB,
}

impl MonotonicityKind {
    /// Four-party system the kind's inequality lives on.
    pub fn party_set(self) -> PartySet {
        match self {
            MonotonicityKind::ZeroA | MonotonicityKind::OneA => {
                PartySet::new(["A1", "A2", "B", "V"]).expect("valid party set")
            }
            MonotonicityKind::ZeroB | MonotonicityKind::OneB => {
                PartySet::new(["A", "B1", "B2", "V"]).expect("valid party set")
            }
        }
    }

    fn groupings(self, ps: &PartySet) -> (Grouping, Grouping) {
        let sub = |labels: &[&str]| ps.subset(labels).expect("labels from the kind's party set");
        match self {
            MonotonicityKind::ZeroA => (
                Grouping::new(ps, sub(&["A1", "A2"]), sub(&["B"]), sub(&["V"])).unwrap(),
                Grouping::new(ps, sub(&["A1"]), sub(&["B"]), sub(&["V"])).unwrap(),
            ),
            MonotonicityKind::OneA => (
                Grouping::new(ps, sub(&["A1", "A2"]), sub(&["B"]), sub(&["V"])).unwrap(),
                Grouping::new(ps, sub(&["A1"]), sub(&["B"]), sub(&["A2", "V"])).unwrap(),
            ),
            MonotonicityKind::ZeroB => (
                Grouping::new(ps, sub(&["A"]), sub(&["B1", "B2"]), sub(&["V"])).unwrap(),
                Grouping::new(ps, sub(&["A"]), sub(&["B1"]), sub(&["V"])).unwrap(),
            ),
            MonotonicityKind::OneB => (
                Grouping::new(ps, sub(&["A"]), sub(&["B1", "B2"]), sub(&["V"])).unwrap(),
                Grouping::new(ps, sub(&["A"]), sub(&["B1"]), sub(&["B2", "V"])).unwrap(),
            ),
        }
    }
}

/// Linear map R^7 -> R^15 attached to a monotonicity kind: the functional
/// before processing minus the functional after, column per alpha slot.
#[derive(Debug, Clone)]
pub struct MonotonicityMap {
    kind: MonotonicityKind,
    party_set: PartySet,
    columns: Vec<EntropyFunctional>,
}

pub fn monotonicity_map(kind: MonotonicityKind) -> MonotonicityMap {
    let ps = kind.party_set();
    let (pre, post) = kind.groupings(&ps);
    let columns = (0..7)
        .map(|slot| {
            let unit = AlphaVector::unit(slot);
            let before = alpha_to_functional(&unit, &ps, &pre).expect("nonempty images");
            let after = alpha_to_functional(&unit, &ps, &post).expect("nonempty images");
            before.sub(&after).expect("same party set")
        })
        .collect();
    MonotonicityMap {
        kind,
        party_set: ps,
        columns,
    }
}

impl MonotonicityMap {
    pub fn kind(&self) -> MonotonicityKind {
        self.kind
    }

    pub fn party_set(&self) -> &PartySet {
        &self.party_set
    }

    pub fn column(&self, slot: usize) -> &EntropyFunctional {
        &self.columns[slot]
    }

    pub fn apply(&self, alpha: &AlphaVector) -> EntropyFunctional {
        let mut out = EntropyFunctional::zero(&self.party_set);
        for (slot, col) in self.columns.iter().enumerate() {
            if !alpha.coeffs[slot].is_zero() {
                out = out
                    .add(&col.scaled(&alpha.coeffs[slot]))
                    .expect("same party set");
            }
        }
        out
    }
}

/// Every SSA instance I_{X:Y|Z} and WM instance S_{C|X} + S_{C|Y} over
/// nonempty pairwise-disjoint subsets (Z possibly empty) of the party set.
/// Duplicates (X <-> Y symmetry) are produced and removed downstream.
pub fn ssa_wm_functionals(ps: &PartySet) -> Vec<EntropyFunctional> {
    let full = ps.full().0;
    let mut out = Vec::new();
    for x in 1..=full {
        for y in 1..=full {
            if x >= y || x & y != 0 {
                continue;
            }
            let rest = full & !(x | y);
            let mut z = rest;
            loop {
                out.push(
                    cmi_functional(ps, Subset(x), Subset(y), Subset(z))
                        .expect("disjoint by construction"),
                );
                if z == 0 {
                    break;
                }
                z = (z - 1) & rest;
            }
        }
    }
    for c in 1..=full {
        for x in 1..=full {
            if x & c != 0 {
                continue;
            }
            for y in 1..=full {
                if y <= x || y & c != 0 || y & x != 0 {
                    continue;
                }
                out.push(
                    wm_functional(ps, Subset(c), Subset(x), Subset(y))
                        .expect("disjoint by construction"),
                );
            }
        }
    }
    out
}

/// Entropy cone on four parties: all SSA and WM instances as the
/// H-representation, extreme rays computed and cached.
pub fn build_entropy_cone() -> RationalCone {
    let ps = PartySet::new(["A1", "A2", "B", "V"]).expect("valid party set");
    let dim = ps.n_subsets();
    let ineqs = ssa_wm_functionals(&ps)
        .into_iter()
        .map(|f| f.coeff_vector().to_vec());
    let cone = RationalCone::from_inequalities(dim, ineqs).expect("consistent dimensions");
    cone.extreme_rays()
        .expect("fixed instance set stays far below the ray limit");
    cone
}

/// Process-wide entropy cone, built once.
pub fn entropy_cone() -> &'static RationalCone {
    static CONE: Lazy<RationalCone> = Lazy::new(build_entropy_cone);
    &CONE
}

/// Validity of `c >= 0` on a cone, decided on the generator representation.
pub fn valid_on_cone(c: &EntropyFunctional, cone: &RationalCone) -> Result<bool, ConeError> {
    cone.implies(c.coeff_vector())
}

/// Finiteness halfspace normal (alpha slot order): the sum of every
/// V-touching coefficient must be nonnegative, otherwise the optimized value
/// diverges to -infinity along maximally-mixed extensions.
pub const FINITENESS_NORMAL: [i64; 7] = [0, 0, 1, 0, 1, 1, 1];

pub fn finiteness_check(alpha: &AlphaVector) -> bool {
    let sum: Ratio = [2usize, 4, 5, 6]
        .iter()
        .map(|&i| alpha.coeffs[i].clone())
        .sum();
    !sum.is_negative()
}

/// Float-flavor finiteness check with a small tolerance for decimal input.
pub fn finiteness_check_float(alpha: &AlphaFloat) -> bool {
    let sum = alpha.coeffs[2] + alpha.coeffs[4] + alpha.coeffs[5] + alpha.coeffs[6];
    sum >= -1e-12
}

/// Purification duality on alpha vectors: swaps AV <-> BV and V <-> ABV,
/// fixing A, B, AB. An involution.
pub fn dual_alpha(alpha: &AlphaVector) -> AlphaVector {
    let c = &alpha.coeffs;
    AlphaVector {
        coeffs: [
            c[0].clone(),
            c[1].clone(),
            c[6].clone(),
            c[3].clone(),
            c[5].clone(),
            c[4].clone(),
            c[2].clone(),
        ],
    }
}

pub fn dual_alpha_float(alpha: &AlphaFloat) -> AlphaFloat {
    let c = &alpha.coeffs;
    AlphaFloat::new([c[0], c[1], c[6], c[3], c[5], c[4], c[2]])
}

/// The four named optimized measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedMeasure {
    P,
    Q,
    R,
    Sq,
}

impl std::str::FromStr for NamedMeasure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "P" | "p" => Ok(NamedMeasure::P),
            "Q" | "q" => Ok(NamedMeasure::Q),
            "R" | "r" => Ok(NamedMeasure::R),
            "sq" | "Sq" | "SQ" => Ok(NamedMeasure::Sq),
            other => Err(format!("unknown measure `{other}` (expected P, Q, R or sq)")),
        }
    }
}

impl std::fmt::Display for NamedMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NamedMeasure::P => write!(f, "P"),
            NamedMeasure::Q => write!(f, "Q"),
            NamedMeasure::R => write!(f, "R"),
            NamedMeasure::Sq => write!(f, "sq"),
        }
    }
}

pub fn named_alpha_exact(measure: NamedMeasure) -> AlphaVector {
    let half = Ratio::new(Int::from(1), Int::from(2));
    let mut a = AlphaVector::zero();
    match measure {
        NamedMeasure::P => {
            a.coeffs[4] = Ratio::from_integer(Int::from(1));
        }
        NamedMeasure::Q => {
            a.coeffs[0] = half.clone();
            a.coeffs[1] = half.clone();
            a.coeffs[4] = half.clone();
            a.coeffs[5] = -half;
        }
        NamedMeasure::R => {
            a.coeffs[2] = -half.clone();
            a.coeffs[3] = half.clone();
            a.coeffs[4] = Ratio::from_integer(Int::from(1));
            a.coeffs[6] = -half;
        }
        NamedMeasure::Sq => {
            a = AlphaVector::from_integers([0, 0, -1, 0, 1, 1, -1]);
        }
    }
    a
}

/// Float flavor of the named alpha vectors (exact conversion).
pub fn named_alpha(measure: NamedMeasure) -> AlphaFloat {
    named_alpha_exact(measure).to_float()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KindBit {
    Zero,
    One,
}

/// Which certificate is used on each side, plus the optional finiteness cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeSelector {
    pub a: KindBit,
    pub b: KindBit,
    pub finite: bool,
}

impl ConeSelector {
    pub fn parse(code: &str, finite: bool) -> Result<Self, DiscoveryError> {
        let bits: Vec<char> = code.chars().collect();
        if bits.len() != 2 {
            return Err(DiscoveryError::BadSelector(code.to_string()));
        }
        let bit = |c: char| match c {
            '0' => Ok(KindBit::Zero),
            '1' => Ok(KindBit::One),
            _ => Err(DiscoveryError::BadSelector(code.to_string())),
        };
        Ok(ConeSelector {
            a: bit(bits[0])?,
            b: bit(bits[1])?,
            finite,
        })
    }

    pub fn code(&self) -> String {
        let c = |k: KindBit| match k {
            KindBit::Zero => '0',
            KindBit::One => '1',
        };
        format!("{}{}", c(self.a), c(self.b))
    }

    /// Cone-column label: the bare code, prefixed with the finiteness cut
    /// marker when the halfspace is intersected.
    pub fn label(&self) -> String {
        if self.finite {
            format!("C∩{}", self.code())
        } else {
            self.code()
        }
    }

    pub fn a_kind(&self) -> MonotonicityKind {
        match self.a {
            KindBit::Zero => MonotonicityKind::ZeroA,
            KindBit::One => MonotonicityKind::OneA,
        }
    }

    pub fn b_kind(&self) -> MonotonicityKind {
        match self.b {
            KindBit::Zero => MonotonicityKind::ZeroB,
            KindBit::One => MonotonicityKind::OneB,
        }
    }
}

/// Advisory triviality tag for a discovered ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RayTag {
    ZeroCandidate,
    MutualInformationCandidate,
    NontrivialCandidate,
}

impl std::fmt::Display for RayTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RayTag::ZeroCandidate => write!(f, "zero-candidate"),
            RayTag::MutualInformationCandidate => write!(f, "mutual-information-candidate"),
            RayTag::NontrivialCandidate => write!(f, "nontrivial-candidate"),
        }
    }
}

/// Outcome of an alpha-cone enumeration: flattened generating set (quotient
/// rays plus both orientations of each lineality vector), sorted canonically.
#[derive(Debug, Clone)]
pub struct DiscoveryResult {
    pub selector: ConeSelector,
    pub generators: Vec<Vec<Int>>,
    pub quotient_rays: Vec<Vec<Int>>,
    pub lineality: Vec<Vec<Int>>,
    pub classifications: Vec<Option<RayTag>>,
}

impl DiscoveryResult {
    pub fn generator_set(&self) -> std::collections::BTreeSet<Vec<Int>> {
        self.generators.iter().cloned().collect()
    }
}

/// Enumerate the monotone cone for a selector: one inequality per (kind,
/// entropy-ray) pair, optionally intersected with the finiteness halfspace,
/// converted to generators and independently re-verified.
pub fn alpha_cone(
    selector: ConeSelector,
    entropy: &RationalCone,
) -> Result<DiscoveryResult, DiscoveryError> {
    let maps = [
        monotonicity_map(selector.a_kind()),
        monotonicity_map(selector.b_kind()),
    ];
    let vrep = entropy.extreme_rays()?;
    let mut ineqs: Vec<Vec<Ratio>> = Vec::new();
    for map in &maps {
        let columns: Vec<&EntropyFunctional> = (0..7).map(|j| map.column(j)).collect();
        let push_for = |h: &Vec<Int>, ineqs: &mut Vec<Vec<Ratio>>| {
            let row: Vec<Ratio> = columns
                .iter()
                .map(|col| dot_ratio_int(col.coeff_vector(), h))
                .collect();
            ineqs.push(row);
        };
        for h in &vrep.rays {
            push_for(h, &mut ineqs);
        }
        for l in &vrep.lineality {
            push_for(l, &mut ineqs);
            let neg: Vec<Int> = l.iter().map(|x| -x.clone()).collect();
            push_for(&neg, &mut ineqs);
        }
    }
    if selector.finite {
        ineqs.push(
            FINITENESS_NORMAL
                .iter()
                .map(|&x| Ratio::from_integer(Int::from(x)))
                .collect(),
        );
    }

    let cone = RationalCone::from_inequalities(7, ineqs)?;
    let v = cone.extreme_rays()?.clone();
    let generators = v.generators();

    // Independent re-verification: every generator must map, under both kind
    // maps, to a functional that is a conic combination of the SSA/WM rows.
    // The Farkas route never touches either double-description run.
    for g in &generators {
        let alpha = AlphaVector::from_int_slice(g);
        for map in &maps {
            let image = map.apply(&alpha);
            let ok_rays = valid_on_cone(&image, entropy)?;
            let ok_farkas = entropy.implies_farkas(image.coeff_vector())?;
            if !(ok_rays && ok_farkas) {
                return Err(DiscoveryError::RayVerificationFailed {
                    ray: g.iter().map(|x| int_to_i64_lossy(x)).collect(),
                });
            }
        }
    }

    let n = generators.len();
    Ok(DiscoveryResult {
        selector,
        generators,
        quotient_rays: v.rays,
        lineality: v.lineality,
        classifications: vec![None; n],
    })
}

fn int_to_i64_lossy(x: &Int) -> i64 {
    use num::ToPrimitive;
    x.to_i64().unwrap_or(i64::MAX)
}

/// Reference ray tables for the discovered cones, plus frozen regression
/// constants for the entropy cone itself.
pub mod tables {
    use super::*;

    /// Deduplicated SSA+WM instance count on four parties.
    pub const SSA_WM_INEQUALITY_COUNT: usize = 85;

    /// Extreme-ray count of the four-party SSA+WM cone (pointed).
    pub const ENTROPY_CONE_RAY_COUNT: usize = 59;

    /// 00 cone: five quotient rays plus the ±e_V line, seven generators.
    pub const RAYS_00: [[i64; 7]; 7] = [
        [1, 1, 0, -1, 0, 0, 0],
        [1, 0, 0, 0, -1, 0, 0],
        [0, 0, 0, 0, 1, 1, -1],
        [0, 0, 0, 1, 0, 0, -1],
        [0, 1, 0, 0, 0, -1, 0],
        [0, 0, 1, 0, 0, 0, 0],
        [0, 0, -1, 0, 0, 0, 0],
    ];

    /// 10 cone: six quotient rays plus the ±e_AV line, eight generators.
    pub const RAYS_10: [[i64; 7]; 8] = [
        [1, 1, 0, -1, 0, 0, 0],
        [0, 0, -1, 0, 0, 1, -1],
        [1, 0, -1, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, -1],
        [1, 1, 0, 0, 0, -1, 0],
        [0, 0, -1, 1, 0, 0, -1],
        [0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, -1, 0, 0],
    ];

    /// 00 cone cut by the finiteness halfspace: pointed, six rays.
    pub const RAYS_FINITE_00: [[i64; 7]; 6] = [
        [0, 0, 1, 0, 0, 0, 0],
        [1, 1, 0, -1, 0, 0, 0],
        [0, 0, -1, 0, 1, 1, -1],
        [0, 0, 1, 1, 0, 0, -1],
        [0, 1, 1, 0, 0, -1, 0],
        [1, 0, 1, 0, -1, 0, 0],
    ];

    /// 10 cone cut by the finiteness halfspace: pointed, seven rays.
    pub const RAYS_FINITE_10: [[i64; 7]; 7] = [
        [0, 0, 0, 0, 1, 0, 0],
        [1, 1, 0, -1, 0, 0, 0],
        [0, 0, -1, 0, 1, 1, -1],
        [1, 1, 0, 0, 1, -1, 0],
        [0, 0, -1, 1, 2, 0, -1],
        [0, 1, 0, 0, 1, 0, -1],
        [1, 0, -1, 0, 1, 0, 0],
    ];

    fn dual_image(rows: &[[i64; 7]]) -> Vec<[i64; 7]> {
        rows.iter()
            .map(|r| [r[0], r[1], r[6], r[3], r[5], r[4], r[2]])
            .collect()
    }

    /// Expected generator set for a selector. The 01 and 11 cones are the
    /// duality images of the 10 and 00 cones respectively.
    pub fn expected_generators(selector: ConeSelector) -> Vec<Vec<Int>> {
        let rows: Vec<[i64; 7]> = match (selector.a, selector.b, selector.finite) {
            (KindBit::Zero, KindBit::Zero, false) => RAYS_00.to_vec(),
            (KindBit::One, KindBit::Zero, false) => RAYS_10.to_vec(),
            (KindBit::Zero, KindBit::One, false) => dual_image(&RAYS_10),
            (KindBit::One, KindBit::One, false) => dual_image(&RAYS_00),
            (KindBit::Zero, KindBit::Zero, true) => RAYS_FINITE_00.to_vec(),
            (KindBit::One, KindBit::Zero, true) => RAYS_FINITE_10.to_vec(),
            (KindBit::Zero, KindBit::One, true) => dual_image(&RAYS_FINITE_10),
            (KindBit::One, KindBit::One, true) => dual_image(&RAYS_FINITE_00),
        };
        let mut out: Vec<Vec<Int>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Int::from(x)).collect())
            .collect();
        out.sort();
        out
    }
}

/// Configuration for the heuristic ray classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Tolerance for "is zero" / "equals the mutual information".
    pub epsilon: f64,
    pub d_v: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            epsilon: 1e-3,
            d_v: 2,
            restarts: 2,
            max_iters: 400,
            seed: 7,
        }
    }
}

/// Advisory triviality classification of a finite-measure ray: estimates the
/// optimized value on each sample and tags the ray `zero-candidate` when all
/// estimates vanish, `mutual-information-candidate` when all match I_{A:B},
/// and `nontrivial-candidate` otherwise. A tag is evidence, never a proof.
pub fn classify_ray(
    alpha: &AlphaFloat,
    samples: &[DensityMatrix],
    cfg: &ClassifyConfig,
) -> Result<RayTag, crate::estimator::EstimatorError> {
    use crate::estimator::{estimate_measure, EstimateConfig};
    let mut all_zero = true;
    let mut all_mi = true;
    for (i, sample) in samples.iter().enumerate() {
        let mi = sample.mutual_information("A", "B")?;
        let est = estimate_measure(
            alpha,
            sample,
            &EstimateConfig {
                d_v: cfg.d_v,
                d_f: None,
                restarts: cfg.restarts,
                max_iters: cfg.max_iters,
                seed: cfg.seed.wrapping_add(i as u64),
                extra_starts: Vec::new(),
            },
        )?;
        if est.value.abs() > cfg.epsilon {
            all_zero = false;
        }
        if (est.value - mi).abs() > cfg.epsilon {
            all_mi = false;
        }
        if !all_zero && !all_mi {
            return Ok(RayTag::NontrivialCandidate);
        }
    }
    if all_zero {
        Ok(RayTag::ZeroCandidate)
    } else if all_mi {
        Ok(RayTag::MutualInformationCandidate)
    } else {
        Ok(RayTag::NontrivialCandidate)
    }
}

/// Default sample states for classification: a maximally entangled pair, a
/// classically correlated pair, and a generic mixed pair. Together they
/// separate the three tags for every tabulated ray.
pub fn default_classify_samples() -> Result<Vec<DensityMatrix>, crate::quantum::QuantumError> {
    use crate::quantum::{named_state, StateFamily};
    Ok(vec![
        named_state(&StateFamily::Bell)?,
        named_state(&StateFamily::Classical {
            p: vec![0.5, 0.5],
        })?,
        named_state(&StateFamily::MixedRandom { d: 2, seed: 11 })?,
    ])
}

/// Classify every finite generator of a discovery result in place.
pub fn classify_result(
    result: &mut DiscoveryResult,
    samples: &[DensityMatrix],
    cfg: &ClassifyConfig,
) -> Result<(), crate::estimator::EstimatorError> {
    for (i, g) in result.generators.iter().enumerate() {
        let alpha = AlphaVector::from_int_slice(g);
        if !finiteness_check(&alpha) {
            result.classifications[i] = None;
            continue;
        }
        let tag = classify_ray(&alpha.to_float(), samples, cfg)?;
        result.classifications[i] = Some(tag);
    }
    Ok(())
}
