//! End-to-end discovery pipeline checks: entropy-cone structure, reproduction
//! of the reference ray tables, duality closure, and the bridge between the
//! exact cones and actual quantum states.

use num::{Signed, Zero};
use once_cell::sync::Lazy;
use optcorr::discovery::{
    alpha_cone, classify_ray, default_classify_samples, dual_alpha, entropy_cone,
    finiteness_check, monotonicity_map, named_alpha, tables, ClassifyConfig, ConeSelector,
    MonotonicityKind, RayTag,
};
use optcorr::entropy_space::AlphaVector;
use optcorr::exact::{dot_int, ratio_vec, Int, Ratio};
use optcorr::quantum::random_mixed_state;
use optcorr::RationalCone;

fn assert_generators_match(selector: ConeSelector) {
    let result = alpha_cone(selector, entropy_cone()).expect("cone enumeration succeeds");
    let got = result.generator_set();
    let want: std::collections::BTreeSet<Vec<Int>> =
        tables::expected_generators(selector).into_iter().collect();
    assert_eq!(
        got,
        want,
        "generator set mismatch for cone {}",
        selector.label()
    );
}

#[test]
fn entropy_cone_has_frozen_shape() {
    let cone = entropy_cone();
    assert_eq!(cone.ambient_dim(), 15);
    assert_eq!(cone.inequalities().len(), tables::SSA_WM_INEQUALITY_COUNT);
    let v = cone.extreme_rays().unwrap();
    assert_eq!(v.rays.len(), tables::ENTROPY_CONE_RAY_COUNT);
    assert!(v.lineality.is_empty(), "the entropy cone is pointed");
}

#[test]
fn entropy_cone_rays_are_sound_and_extremal() {
    let cone = entropy_cone();
    let v = cone.extreme_rays().unwrap();
    for ray in &v.rays {
        for c in cone.inequalities() {
            assert!(
                !dot_int(c, ray).is_negative(),
                "ray {ray:?} violates an inequality"
            );
        }
        // Extremality: tight rows span a 14-dimensional space.
        assert_eq!(cone.tight_rank(ray).unwrap(), 14);
    }
}

#[test]
fn mutual_information_instance_is_enumerated() {
    // I_{A1:A2} as a coefficient vector: +1 on {A1}, +1 on {A2}, -1 on {A1,A2}.
    let cone = entropy_cone();
    let mut expected = vec![Int::from(0); 15];
    expected[0] = Int::from(1);
    expected[1] = Int::from(1);
    expected[2] = Int::from(-1);
    assert!(cone.inequalities().contains(&expected));
}

#[test]
fn product_of_maximally_mixed_qubits_lies_inside() {
    let cone = entropy_cone();
    let h: Vec<Ratio> = (1u32..16)
        .map(|mask| Ratio::from_integer(Int::from(mask.count_ones() as i64)))
        .collect();
    assert!(cone.contains_point(&h).unwrap());
}

#[test]
fn entropy_cone_round_trips_through_double_dual() {
    let cone = entropy_cone();
    let v1 = cone.extreme_rays().unwrap().clone();
    let dual = RationalCone::from_inequalities(
        15,
        v1.generators().iter().map(|g| ratio_vec(g)),
    )
    .unwrap();
    let dual_v = dual.extreme_rays().unwrap().clone();
    let double_dual = RationalCone::from_inequalities(
        15,
        dual_v.generators().iter().map(|g| ratio_vec(g)),
    )
    .unwrap();
    assert_eq!(double_dual.extreme_rays().unwrap(), &v1);
}

#[test]
fn table_one_reproduction() {
    assert_generators_match(ConeSelector::parse("00", false).unwrap());
    assert_generators_match(ConeSelector::parse("10", false).unwrap());
}

#[test]
fn table_two_reproduction() {
    assert_generators_match(ConeSelector::parse("00", true).unwrap());
    assert_generators_match(ConeSelector::parse("10", true).unwrap());
}

#[test]
fn duality_closure_direct_computation() {
    // The directly computed 01 and 11 cones equal the dual images of the 10
    // and 00 cones, with and without the finiteness cut.
    for finite in [false, true] {
        for (code, base) in [("01", "10"), ("11", "00")] {
            let direct = alpha_cone(
                ConeSelector::parse(code, finite).unwrap(),
                entropy_cone(),
            )
            .unwrap();
            let base_result = alpha_cone(
                ConeSelector::parse(base, finite).unwrap(),
                entropy_cone(),
            )
            .unwrap();
            let dual_image: std::collections::BTreeSet<Vec<Int>> = base_result
                .generators
                .iter()
                .map(|g| {
                    let alpha = AlphaVector::from_int_slice(g);
                    let beta = dual_alpha(&alpha);
                    optcorr::canonicalize_ray(&beta.coeffs).unwrap()
                })
                .collect();
            assert_eq!(
                direct.generator_set(),
                dual_image,
                "cone {code} (finite={finite}) is not the dual image of {base}"
            );
        }
    }
}

#[test]
fn lineality_structure_of_unrestricted_cones() {
    let r00 = alpha_cone(ConeSelector::parse("00", false).unwrap(), entropy_cone()).unwrap();
    assert_eq!(r00.lineality.len(), 1);
    assert_eq!(
        r00.lineality[0],
        vec![0, 0, 1, 0, 0, 0, 0]
            .into_iter()
            .map(Int::from)
            .collect::<Vec<_>>()
    );
    let r10 = alpha_cone(ConeSelector::parse("10", false).unwrap(), entropy_cone()).unwrap();
    assert_eq!(r10.lineality.len(), 1);
    assert_eq!(
        r10.lineality[0],
        vec![0, 0, 0, 0, 1, 0, 0]
            .into_iter()
            .map(Int::from)
            .collect::<Vec<_>>()
    );
    for finite in [
        alpha_cone(ConeSelector::parse("00", true).unwrap(), entropy_cone()).unwrap(),
        alpha_cone(ConeSelector::parse("10", true).unwrap(), entropy_cone()).unwrap(),
    ] {
        assert!(finite.lineality.is_empty(), "finite cones are pointed");
    }
}

/// Ray-route vs Farkas-route membership agreement on seeded random rational
/// functionals, over the cones the pipeline actually uses.
#[test]
fn farkas_cross_validation() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let entropy = entropy_cone();
    let alpha00 = {
        let r = alpha_cone(ConeSelector::parse("00", true).unwrap(), entropy).unwrap();
        RationalCone::from_inequalities(
            7,
            // Rebuild from its own H-representation for the membership test.
            r.generators.iter().map(|g| ratio_vec(g)),
        )
        .unwrap()
    };
    let mut checked = 0;
    let mut agree_true = 0;
    for _ in 0..60 {
        // Random small-rational functional in dimension 15.
        let c: Vec<Ratio> = (0..15)
            .map(|_| Ratio::new(Int::from(rng.gen_range(-3i64..=3)), Int::from(rng.gen_range(1i64..=2))))
            .collect();
        let by_rays = entropy.implies(&c).unwrap();
        let by_farkas = entropy.implies_farkas(&c).unwrap();
        assert_eq!(by_rays, by_farkas, "route disagreement on {c:?}");
        checked += 1;
        if by_rays {
            agree_true += 1;
        }
    }
    // Mix in conic combinations of actual inequalities so the "valid" branch
    // is exercised too.
    for _ in 0..60 {
        let ineqs = entropy.inequalities();
        let mut c = vec![Ratio::zero(); 15];
        for _ in 0..3 {
            let row = &ineqs[rng.gen_range(0..ineqs.len())];
            let w = Ratio::from_integer(Int::from(rng.gen_range(0i64..=2)));
            for (ci, ri) in c.iter_mut().zip(row) {
                *ci += &w * Ratio::from_integer(ri.clone());
            }
        }
        let by_rays = entropy.implies(&c).unwrap();
        let by_farkas = entropy.implies_farkas(&c).unwrap();
        assert!(by_rays && by_farkas, "conic combination must be valid");
        checked += 1;
        agree_true += 1;
    }
    for _ in 0..30 {
        let c: Vec<Ratio> = (0..7)
            .map(|_| Ratio::from_integer(Int::from(rng.gen_range(-2i64..=2))))
            .collect();
        assert_eq!(
            alpha00.implies(&c).unwrap(),
            alpha00.implies_farkas(&c).unwrap()
        );
        checked += 1;
    }
    assert!(checked >= 100);
    assert!(agree_true >= 60);
}

/// No discovered ray is ever contradicted by an actual quantum state: the
/// kind images evaluate nonnegatively on numerical entropy vectors of random
/// four-party states.
#[test]
fn discovered_rays_hold_on_random_states() {
    static ENTROPY_VECTORS: Lazy<Vec<Vec<f64>>> = Lazy::new(|| {
        (0..10_000)
            .map(|seed| {
                random_mixed_state(&[("P1", 2), ("P2", 2), ("P3", 2), ("P4", 2)], 9_000 + seed)
                    .unwrap()
                    .entropy_vector()
            })
            .collect()
    });
    let maps = [
        monotonicity_map(MonotonicityKind::ZeroA),
        monotonicity_map(MonotonicityKind::OneA),
        monotonicity_map(MonotonicityKind::ZeroB),
        monotonicity_map(MonotonicityKind::OneB),
    ];
    for finite in [false, true] {
        for code in ["00", "10", "01", "11"] {
            let selector = ConeSelector::parse(code, finite).unwrap();
            let result = alpha_cone(selector, entropy_cone()).unwrap();
            let kind_maps = [
                &maps[match selector.a_kind() {
                    MonotonicityKind::ZeroA => 0,
                    MonotonicityKind::OneA => 1,
                    _ => unreachable!(),
                }],
                &maps[match selector.b_kind() {
                    MonotonicityKind::ZeroB => 2,
                    MonotonicityKind::OneB => 3,
                    _ => unreachable!(),
                }],
            ];
            for g in &result.generators {
                let alpha = AlphaVector::from_int_slice(g);
                for map in kind_maps {
                    let image = map.apply(&alpha);
                    for h in ENTROPY_VECTORS.iter() {
                        let value = image.eval_f64(h).unwrap();
                        assert!(
                            value >= -1e-9,
                            "cone {} ray {g:?}: image dips to {value}",
                            selector.label()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn named_alphas_sit_in_the_finite_10_cone() {
    let expected = tables::expected_generators(ConeSelector::parse("10", true).unwrap());
    let contains = |alpha: &AlphaVector, scale: i64| {
        let scaled: Vec<Ratio> = alpha
            .coeffs
            .iter()
            .map(|c| c * Ratio::from_integer(Int::from(scale)))
            .collect();
        let canon = optcorr::canonicalize_ray(&scaled).unwrap();
        expected.contains(&canon)
    };
    use optcorr::discovery::{named_alpha_exact, NamedMeasure};
    assert!(contains(&named_alpha_exact(NamedMeasure::P), 1));
    assert!(contains(&named_alpha_exact(NamedMeasure::Q), 2));
    assert!(contains(&named_alpha_exact(NamedMeasure::R), 2));
    assert!(contains(&named_alpha_exact(NamedMeasure::Sq), 1));
}

/// Non-finite directions really do diverge: the functional strictly decreases
/// along maximally mixed extensions of growing dimension.
#[test]
fn non_finite_alpha_diverges_numerically() {
    use optcorr::entropy_space::AlphaFloat;
    use optcorr::quantum::{f_alpha, named_state, DensityMatrix, StateFamily};
    let rho = named_state(&StateFamily::MixedRandom { d: 2, seed: 3 }).unwrap();
    let minus_e_v = AlphaVector::from_integers([0, 0, -1, 0, 0, 0, 0]);
    assert!(!finiteness_check(&minus_e_v));
    let alpha_f = AlphaFloat::new([0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
    let mut previous = f64::INFINITY;
    for k in [2usize, 4, 8] {
        let mixed_v = DensityMatrix::new(
            vec![("V".to_string(), k)],
            nalgebra::DMatrix::from_diagonal_element(k, k, nalgebra::Complex::new(1.0 / k as f64, 0.0)),
        )
        .unwrap();
        let ext = rho.tensor(&mixed_v).unwrap();
        let value = f_alpha(&alpha_f, &ext).unwrap();
        assert!(
            value < previous - 0.5,
            "expected strict decrease, got {value} after {previous}"
        );
        previous = value;
    }
}

/// Advisory classification of the tabulated finite-cone rays: the zero ray,
/// the mutual-information ray, and the three nontrivial directions.
#[test]
fn classification_of_reference_rays() {
    let samples = default_classify_samples().unwrap();
    let cfg = ClassifyConfig::default();
    let tag_of = |row: [i64; 7]| {
        let alpha = AlphaVector::from_integers(row).to_float();
        classify_ray(&alpha, &samples, &cfg).unwrap()
    };
    // Finite-00 ray 1: S_V.
    assert_eq!(tag_of([0, 0, 1, 0, 0, 0, 0]), RayTag::ZeroCandidate);
    // Finite-00 ray 2: I_{A:B}.
    assert_eq!(
        tag_of([1, 1, 0, -1, 0, 0, 0]),
        RayTag::MutualInformationCandidate
    );
    // Finite-10 rays 7, 10, 11.
    assert_eq!(tag_of([0, 0, 0, 0, 1, 0, 0]), RayTag::NontrivialCandidate);
    assert_eq!(
        tag_of([1, 1, 0, 0, 1, -1, 0]),
        RayTag::NontrivialCandidate
    );
    assert_eq!(
        tag_of([0, 0, -1, 1, 2, 0, -1]),
        RayTag::NontrivialCandidate
    );
    let _ = named_alpha(optcorr::NamedMeasure::P);
}
