//! Named test-state families and seeded random state sampling.

use super::linalg::{haar_isometry, C64};
use super::{DensityMatrix, QuantumError};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Single-subsystem spec usable as a factor of a product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LocalSpec {
    MixedRandom { d: usize, seed: u64 },
}

/// Named bipartite state families reachable from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StateFamily {
    Bell,
    PureRandom { d: usize, seed: u64 },
    Classical { p: Vec<f64> },
    Antisymmetric { d: usize },
    SymmetricRandom { d: usize, seed: u64 },
    MixedRandom { d: usize, seed: u64 },
    Product { a: LocalSpec, b: LocalSpec },
}

impl StateFamily {
    /// Mini-grammar: `bell`, `classical:p1,p2,...`, `antisym:d`,
    /// `pure-random:d,seed`, `sym-random:d,seed`, `mixed-random:d,seed`,
    /// `product:<local>+<local>` with `<local>` = `mixed-random:d,seed`.
    pub fn parse(spec: &str) -> Result<StateFamily, QuantumError> {
        let bad = |reason: &str| QuantumError::BadStateSpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        if spec == "bell" {
            return Ok(StateFamily::Bell);
        }
        if let Some(rest) = spec.strip_prefix("classical:") {
            let p: Result<Vec<f64>, _> = rest.split(',').map(|t| t.trim().parse::<f64>()).collect();
            return Ok(StateFamily::Classical {
                p: p.map_err(|_| bad("probabilities must be numbers"))?,
            });
        }
        if let Some(rest) = spec.strip_prefix("antisym:") {
            let d = rest.trim().parse().map_err(|_| bad("dimension must be an integer"))?;
            return Ok(StateFamily::Antisymmetric { d });
        }
        if let Some(rest) = spec.strip_prefix("product:") {
            let parts: Vec<&str> = rest.split('+').collect();
            if parts.len() != 2 {
                return Err(bad("product takes two `+`-separated local specs"));
            }
            let local = |s: &str| -> Result<LocalSpec, QuantumError> {
                let (d, seed) = parse_d_seed(s.strip_prefix("mixed-random:").ok_or_else(
                    || bad("local specs must be mixed-random:d,seed"),
                )?)
                .ok_or_else(|| bad("local specs must be mixed-random:d,seed"))?;
                Ok(LocalSpec::MixedRandom { d, seed })
            };
            return Ok(StateFamily::Product {
                a: local(parts[0])?,
                b: local(parts[1])?,
            });
        }
        for (prefix, build) in [
            (
                "pure-random:",
                (|d, seed| StateFamily::PureRandom { d, seed }) as fn(usize, u64) -> StateFamily,
            ),
            ("sym-random:", |d, seed| StateFamily::SymmetricRandom { d, seed }),
            ("mixed-random:", |d, seed| StateFamily::MixedRandom { d, seed }),
        ] {
            if let Some(rest) = spec.strip_prefix(prefix) {
                let (d, seed) =
                    parse_d_seed(rest).ok_or_else(|| bad("expected d,seed with integers"))?;
                return Ok(build(d, seed));
            }
        }
        Err(bad(
            "expected bell | classical:.. | antisym:d | pure-random:d,seed | sym-random:d,seed | mixed-random:d,seed | product:..+..",
        ))
    }
}

fn parse_d_seed(s: &str) -> Option<(usize, u64)> {
    let (d, seed) = s.split_once(',')?;
    Some((d.trim().parse().ok()?, seed.trim().parse().ok()?))
}

/// Build a named bipartite state on labels (A, B).
pub fn named_state(family: &StateFamily) -> Result<DensityMatrix, QuantumError> {
    match family {
        StateFamily::Bell => {
            let inv = std::f64::consts::FRAC_1_SQRT_2;
            let mut v = DVector::<C64>::zeros(4);
            v[0] = C64::new(inv, 0.0);
            v[3] = C64::new(inv, 0.0);
            DensityMatrix::from_pure(vec![("A".into(), 2), ("B".into(), 2)], &v)
        }
        StateFamily::PureRandom { d, seed } => random_pure_state(&[("A", *d), ("B", *d)], *seed),
        StateFamily::Classical { p } => {
            check_probability_vector(p)?;
            let n = p.len();
            let mut mat = DMatrix::<C64>::zeros(n * n, n * n);
            for (i, &pi) in p.iter().enumerate() {
                let idx = i * n + i;
                mat[(idx, idx)] = C64::new(pi.max(0.0), 0.0);
            }
            DensityMatrix::new(vec![("A".into(), n), ("B".into(), n)], mat)
        }
        StateFamily::Antisymmetric { d } => {
            let d = *d;
            if d < 2 {
                return Err(QuantumError::AntisymmetricDimension(d));
            }
            let rank = d * (d - 1) / 2;
            let mut mat = DMatrix::<C64>::zeros(d * d, d * d);
            let weight = 1.0 / rank as f64;
            for i in 0..d {
                for j in (i + 1)..d {
                    let mut v = DVector::<C64>::zeros(d * d);
                    let inv = std::f64::consts::FRAC_1_SQRT_2;
                    v[i * d + j] = C64::new(inv, 0.0);
                    v[j * d + i] = C64::new(-inv, 0.0);
                    mat += &v * v.adjoint() * C64::new(weight, 0.0);
                }
            }
            DensityMatrix::new(vec![("A".into(), d), ("B".into(), d)], mat)
        }
        StateFamily::SymmetricRandom { d, seed } => {
            let d = *d;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            // Orthonormal basis of the symmetric subspace.
            let mut basis: Vec<DVector<C64>> = Vec::new();
            for i in 0..d {
                for j in i..d {
                    let mut v = DVector::<C64>::zeros(d * d);
                    if i == j {
                        v[i * d + i] = C64::new(1.0, 0.0);
                    } else {
                        let inv = std::f64::consts::FRAC_1_SQRT_2;
                        v[i * d + j] = C64::new(inv, 0.0);
                        v[j * d + i] = C64::new(inv, 0.0);
                    }
                    basis.push(v);
                }
            }
            let m = basis.len();
            let g = DMatrix::<C64>::from_fn(m, m, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re, im)
            });
            let mut block = &g * g.adjoint();
            let trace: f64 = (0..m).map(|i| block[(i, i)].re).sum();
            block /= C64::new(trace, 0.0);
            let mut mat = DMatrix::<C64>::zeros(d * d, d * d);
            for a in 0..m {
                for b in 0..m {
                    mat += &basis[a] * basis[b].adjoint() * block[(a, b)];
                }
            }
            DensityMatrix::new(vec![("A".into(), d), ("B".into(), d)], mat)
        }
        StateFamily::MixedRandom { d, seed } => random_mixed_state(&[("A", *d), ("B", *d)], *seed),
        StateFamily::Product { a, b } => {
            let build = |spec: &LocalSpec, label: &str| match spec {
                LocalSpec::MixedRandom { d, seed } => random_mixed_state(&[(label, *d)], *seed),
            };
            build(a, "A")?.tensor(&build(b, "B")?)
        }
    }
}

fn check_probability_vector(p: &[f64]) -> Result<(), QuantumError> {
    if p.is_empty() {
        return Err(QuantumError::BadProbabilityVector("empty".into()));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(QuantumError::BadProbabilityVector(format!(
            "sums to {sum}, expected 1"
        )));
    }
    if let Some(neg) = p.iter().find(|&&x| x < -1e-10) {
        return Err(QuantumError::BadProbabilityVector(format!(
            "negative entry {neg}"
        )));
    }
    Ok(())
}

/// Haar-random pure state on the given labelled subsystems.
pub fn random_pure_state(dims: &[(&str, usize)], seed: u64) -> Result<DensityMatrix, QuantumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = dims.iter().map(|&(_, d)| d).product();
    let v = haar_vector(total, &mut rng);
    DensityMatrix::from_pure(
        dims.iter().map(|&(l, d)| (l.to_string(), d)).collect(),
        &v,
    )
}

/// Random mixed state from the induced measure: partial trace of a Haar pure
/// state on the doubled space.
pub fn random_mixed_state(dims: &[(&str, usize)], seed: u64) -> Result<DensityMatrix, QuantumError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = dims.iter().map(|&(_, d)| d).product();
    let v = haar_vector(total * total, &mut rng);
    let rho = super::linalg::partial_trace_pure(&[total, total], &v, 0b01);
    DensityMatrix::new(
        dims.iter().map(|&(l, d)| (l.to_string(), d)).collect(),
        rho,
    )
}

pub(crate) fn haar_vector<R: rand::Rng>(dim: usize, rng: &mut R) -> DVector<C64> {
    let mut v = DVector::<C64>::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    v
}

/// The copy extension Σ p_i |iii><iii| of a classical state, on (A, B, V).
pub fn classical_copy_extension(p: &[f64]) -> Result<DensityMatrix, QuantumError> {
    check_probability_vector(p)?;
    let n = p.len();
    let mut mat = DMatrix::<C64>::zeros(n * n * n, n * n * n);
    for (i, &pi) in p.iter().enumerate() {
        let idx = (i * n + i) * n + i;
        mat[(idx, idx)] = C64::new(pi.max(0.0), 0.0);
    }
    DensityMatrix::new(
        vec![("A".into(), n), ("B".into(), n), ("V".into(), n)],
        mat,
    )
}

/// Seeded member of the general extension family of a classical state: a
/// mixture of vectors Σ_i √p_i |ii>|v_i^k> with each {v_i^k}_i orthonormal,
/// so the V marginal blocks are valid and Tr_V returns the classical state.
pub fn classical_random_extension(
    p: &[f64],
    d_v: usize,
    components: usize,
    seed: u64,
) -> Result<DensityMatrix, QuantumError> {
    check_probability_vector(p)?;
    let n = p.len();
    if d_v < n {
        return Err(QuantumError::BadDimension(d_v));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights: Vec<f64> = (0..components)
        .map(|_| {
            let x: f64 = StandardNormal.sample(&mut rng);
            x * x + 1e-3
        })
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut mat = DMatrix::<C64>::zeros(n * n * d_v, n * n * d_v);
    for &w in &weights {
        let frame = haar_isometry(d_v, n, &mut rng);
        let mut vec = DVector::<C64>::zeros(n * n * d_v);
        for i in 0..n {
            let amp = C64::new(p[i].max(0.0).sqrt(), 0.0);
            for v in 0..d_v {
                vec[(i * n + i) * d_v + v] = amp * frame[(v, i)];
            }
        }
        mat += &vec * vec.adjoint() * C64::new(w, 0.0);
    }
    DensityMatrix::new(
        vec![("A".into(), n), ("B".into(), n), ("V".into(), d_v)],
        mat,
    )
}
