//! Subjects for experiments: algebraic lines, rational controls, random
//! parameter matrices and nested `𝔅 ⊂ 𝔄` scenarios.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::geometry::{orthonormal_subspace, GeometryError, Subspace, ThetaMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("no algebraic line of degree {0} (supported: 2..=6)")]
    UnsupportedDegree(usize),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

type Result<T> = std::result::Result<T, ConstructionError>;

/// Monic polynomial per degree, coefficients from `x^0` upward.
fn defining_polynomial(degree: usize) -> Option<Vec<f64>> {
    let mut p = vec![0.0; degree + 1];
    p[degree] = 1.0;
    match degree {
        2 | 3 | 5 | 6 => {
            p[1] = -1.0;
            p[0] = -1.0;
        }
        4 => {
            p[3] = -1.0;
            p[0] = -1.0;
        }
        _ => return None,
    }
    Some(p)
}

fn horner(p: &[f64], x: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut dv = 0.0;
    for &c in p.iter().rev() {
        dv = dv * x + v;
        v = v * x + c;
    }
    (v, dv)
}

/// The real root in `(1, 2)` of the fixed polynomial of this degree:
/// `x²−x−1`, `x³−x−1`, `x⁴−x³−1`, `x⁵−x−1`, `x⁶−x−1`.
pub fn algebraic_root(degree: usize) -> Result<f64> {
    let p = defining_polynomial(degree).ok_or(ConstructionError::UnsupportedDegree(degree))?;
    let (mut lo, mut hi) = (1.0, 2.0);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if horner(&p, mid).0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let (v, dv) = horner(&p, x);
        let next = x - v / dv;
        if next == x {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// `span{(1, α, …, α^{degree−1})}` in `ℝ^degree`.
pub fn algebraic_power_line(degree: usize) -> Result<Subspace> {
    let alpha = algebraic_root(degree)?;
    let v: Vec<f64> = (0..degree as i32).map(|i| alpha.powi(i)).collect();
    Ok(orthonormal_subspace(&[v])?)
}

/// `span{(1, g)}` with `g` the golden ratio.
pub fn golden_line() -> Subspace {
    algebraic_power_line(2).expect("degree 2 is supported")
}

/// Span of integer vectors.
pub fn rational_subspace(basis: &[Vec<i64>]) -> Result<Subspace> {
    let real: Vec<Vec<f64>> = basis.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
    Ok(orthonormal_subspace(&real)?)
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Entries i.i.d. uniform on `[−R, R]`, determined by `(rows, cols, R, seed)`.
pub fn sample_theta(rows: usize, cols: usize, bound: f64, seed: u64) -> Result<ThetaMatrix> {
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(GeometryError::EntryBound { value: bound, bound }.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = (0..rows * cols).map(|_| bound * (2.0 * uniform(&mut rng) - 1.0)).collect();
    Ok(ThetaMatrix::new(rows, cols, entries, bound)?)
}

/// Uniform points of `[0, 1)^d`, one per call index.
pub fn sample_shift(d: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..d).map(|_| uniform(&mut rng)).collect()
}

/// Random subspace of dimension `k` in `ℝ^d`.
pub fn sample_subspace(d: usize, k: usize, seed: u64) -> Result<Subspace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| gaussian(&mut rng)).collect()).collect();
    Ok(orthonormal_subspace(&vectors)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BKind {
    Algebraic,
    GoldenEmbedded,
    Rational,
}

impl BKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BKind::Algebraic => "ALGEBRAIC",
            BKind::GoldenEmbedded => "GOLDEN_EMBEDDED",
            BKind::Rational => "RATIONAL",
        }
    }
}

impl fmt::Display for BKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ALGEBRAIC" => Ok(BKind::Algebraic),
            "GOLDEN_EMBEDDED" => Ok(BKind::GoldenEmbedded),
            "RATIONAL" => Ok(BKind::Rational),
            other => Err(format!("unknown subspace kind '{other}'")),
        }
    }
}

/// A subspace `𝔅` inside `𝔄 ⊂ ℝ^d` together with the parameters of the
/// sampled family `𝔆(Θ) ⊂ 𝔄`.
#[derive(Clone, Debug)]
pub struct ExperimentScenario {
    pub d: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub kind: BKind,
    pub a_space: Subspace,
    pub b_space: Subspace,
    pub theta_bound: f64,
    pub seed: u64,
}

pub const CONTAINMENT_TOL: f64 = 1e-9;

/// Build `𝔅` of the requested kind and extend it to `𝔄`.
///
/// `ALGEBRAIC` needs `b = 1` and `2 ≤ d ≤ 6`; `GOLDEN_EMBEDDED` needs
/// `b = 1`. For `RATIONAL`, `𝔅 = span{e_1..e_b}` and `𝔄 = span{e_1..e_a}`.
/// Otherwise `𝔄` is spanned by `𝔅` and seeded Gaussian directions.
pub fn build_scenario(
    d: usize,
    a: usize,
    b: usize,
    c: usize,
    kind: BKind,
    theta_bound: f64,
    seed: u64,
) -> Result<ExperimentScenario> {
    if !(1 <= b && b <= a && a < d) {
        return Err(ConstructionError::Dimension(format!("need 1 <= b <= a < d, got d={d} a={a} b={b}")));
    }
    if !(1 <= c && c < a) {
        return Err(ConstructionError::Dimension(format!("need 1 <= c < a, got a={a} c={c}")));
    }
    if !(theta_bound > 0.0) {
        return Err(GeometryError::EntryBound { value: theta_bound, bound: theta_bound }.into());
    }
    let unit = |i: usize| -> Vec<i64> { (0..d).map(|j| i64::from(i == j)).collect() };
    let (b_space, a_space) = match kind {
        BKind::Rational => (
            rational_subspace(&(0..b).map(unit).collect::<Vec<_>>())?,
            rational_subspace(&(0..a).map(unit).collect::<Vec<_>>())?,
        ),
        BKind::Algebraic | BKind::GoldenEmbedded => {
            if b != 1 {
                return Err(ConstructionError::Dimension(format!("{kind} needs b = 1, got {b}")));
            }
            let b_space = if kind == BKind::Algebraic {
                algebraic_power_line(d).map_err(|_| {
                    ConstructionError::Dimension(format!("no algebraic line in R^{d} (supported: 2..=6)"))
                })?
            } else {
                let g = algebraic_root(2)?;
                let mut v = vec![0.0; d];
                v[0] = 1.0;
                v[1] = g;
                orthonormal_subspace(&[v])?
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            let mut vectors: Vec<Vec<f64>> = (0..b).map(|j| b_space.basis_vector(j)).collect();
            for _ in b..a {
                vectors.push((0..d).map(|_| gaussian(&mut rng)).collect());
            }
            (b_space, orthonormal_subspace(&vectors)?)
        }
    };
    if !b_space.is_contained_in(&a_space, CONTAINMENT_TOL) {
        return Err(ConstructionError::Dimension("B is not contained in A".into()));
    }
    Ok(ExperimentScenario { d, a, b, c, kind, a_space, b_space, theta_bound, seed })
}
