//! Exact discovery and numerical estimation of optimized bipartite
//! correlation measures.
//!
//! Two halves share one vocabulary:
//!
//! - an exact-arithmetic side ([`entropy_space`], [`cone`], [`discovery`])
//!   that enumerates the polyhedral cones of alpha vectors whose optimized
//!   measures are monotone under local processing, and
//! - a numerical side ([`quantum`], [`estimator`]) that evaluates and
//!   variationally minimizes those measures over state extensions.
//!
//! The boundary between the two is an explicit rational-to-float conversion,
//! never an implicit cast.

pub mod cone;
pub mod discovery;
pub mod entropy_space;
pub mod estimator;
pub mod exact;
pub mod io;
pub mod quantum;

pub use cone::{canonicalize_ray, ConeError, RationalCone, VRep};
pub use discovery::{
    alpha_cone, build_entropy_cone, classify_ray, dual_alpha, entropy_cone, finiteness_check,
    monotonicity_map, named_alpha, named_alpha_exact, ConeSelector, DiscoveryResult, KindBit,
    MonotonicityKind, NamedMeasure, RayTag,
};
pub use entropy_space::{
    alpha_to_functional, cmi_functional, wm_functional, AlphaFloat, AlphaVector,
    EntropyFunctional, PartySet, Subset,
};
pub use estimator::{
    closed_form, estimate_measure, extension_from_ansatz, lower_bound, purify,
    ClosedFormFamily, ClosedFormValue, EstimateConfig, ExtensionAnsatz, MeasureEstimate,
};
pub use quantum::{f_alpha, named_state, DensityMatrix, EntropyReport, StateFamily};
