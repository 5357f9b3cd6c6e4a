//! Covering analytics: the quantities `μ_T`, `M_T`, `λ_T`, partial sums of
//! the convergence series `Σ λ_T · φ^{a−c}(T) / T^{a−c}`, the closed-form
//! convergence classifier for power-log decay functions, and the exponent
//! bound for almost all `c`-dimensional subspaces.
//!
//! Dimensions follow the usual naming: `d` ambient, `a` the container 𝔄,
//! `b` the badly approximable 𝔅 ⊂ 𝔄, `c` the sampled 𝔆 ⊂ 𝔄.

use thiserror::Error;

use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("degenerate denominator in exponent bound: {0}")]
    DegenerateDenominator(String),
    #[error("invalid dimensions: {0}")]
    Dimensions(String),
    #[error("inadmissible decay function: {0}")]
    Inadmissible(String),
}

/// `ρ · T^{−γ} · log^C(max(T, 2))`.
///
/// The logarithm is clamped at `T = 2` so that small arguments stay finite
/// and positive for every log-power.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFunction {
    pub rho: f64,
    pub gamma: f64,
    pub logpow: f64,
}

impl DecayFunction {
    pub fn new(rho: f64, gamma: f64, logpow: f64) -> Self {
        Self { rho, gamma, logpow }
    }

    pub fn power(rho: f64, gamma: f64) -> Self {
        Self::new(rho, gamma, 0.0)
    }

    pub fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.rho * t.powf(-self.gamma);
        if self.logpow != 0.0 {
            v *= t.max(2.0).ln().powf(self.logpow);
        }
        v
    }

    /// Checks positivity, monotone decay and that `f(T)/T` strictly
    /// decreases, on a log-spaced grid of 1000 points in `[2, t_max]`.
    pub fn validate(&self, t_max: f64) -> Result<(), CoverError> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(CoverError::Inadmissible(format!("rho = {} must be positive", self.rho)));
        }
        if !(self.gamma >= 0.0) {
            return Err(CoverError::Inadmissible(format!("gamma = {} must be >= 0", self.gamma)));
        }
        let grid = log_grid(2.0, t_max.max(4.0), 1000);
        for w in grid.windows(2) {
            let (lo, hi) = (self.eval(w[0]), self.eval(w[1]));
            if !(lo > 0.0) || !(hi > 0.0) {
                return Err(CoverError::Inadmissible(format!("non-positive value near T = {}", w[1])));
            }
            if hi > lo * (1.0 + 1e-12) {
                return Err(CoverError::Inadmissible(format!(
                    "increases between T = {} and T = {}",
                    w[0], w[1]
                )));
            }
            if hi / w[1] >= lo / w[0] {
                return Err(CoverError::Inadmissible(format!(
                    "f(T)/T does not decrease between T = {} and T = {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Dimensions `(a, b, c, d)` with `b ≤ a < d` and `1 ≤ c < a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverParams {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl CoverParams {
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Result<Self, CoverError> {
        if !(b <= a && a < d && c >= 1 && c < a) {
            return Err(CoverError::Dimensions(format!(
                "need b <= a < d and 1 <= c < a, got a={a} b={b} c={c} d={d}"
            )));
        }
        Ok(Self { a, b, c, d })
    }
}

/// `μ_T`: zero below 1, otherwise
/// `(T/ψ)^{a−b} · max{1, (φ/ψ)^{d−a}}`.
pub fn mu(t: f64, p: &CoverParams, psi: &DecayFunction, phi: &DecayFunction) -> f64 {
    if t < 1.0 {
        return 0.0;
    }
    let (s, f) = (psi.eval(t), phi.eval(t));
    let base = (t / s).powi((p.a - p.b) as i32);
    let ratio = (f / s).powi((p.d - p.a) as i32);
    base * ratio.max(1.0)
}

/// Both case formulas of `μ_T` for `T ≥ 1`: `(T/ψ)^{a−b}` and
/// `T^{a−b} φ^{d−a} / ψ^{d−b}`, the latter written as
/// `(T/ψ)^{a−b} (φ/ψ)^{d−a}`.
pub fn mu_branches(t: f64, p: &CoverParams, psi: &DecayFunction, phi: &DecayFunction) -> (f64, f64) {
    let (s, f) = (psi.eval(t), phi.eval(t));
    let first = (t / s).powi((p.a - p.b) as i32);
    (first, first * (f / s).powi((p.d - p.a) as i32))
}

/// Arrays indexed by `T − 1` for `T = 1..=T_max`.
#[derive(Clone, Debug)]
pub struct CoverProfile {
    pub mu: Vec<f64>,
    pub m: Vec<f64>,
    pub lambda: Vec<f64>,
    pub term: Vec<f64>,
    pub partial_sum: Vec<f64>,
    /// Points where the normalization `ψ(T) ≤ T^{−b/(d−b)}` fails.
    pub warnings: Vec<String>,
}

impl CoverProfile {
    pub fn t_max(&self) -> usize {
        self.mu.len()
    }

    /// Partial sum up to and including `T` (0 for `T = 0`).
    pub fn partial_at(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            self.partial_sum[t - 1]
        }
    }
}

/// `M_T = Σ_{j=0}^{⌊log₂T⌋} μ(T/2^j)` for an arbitrary `μ` evaluated at real
/// arguments, together with `λ_T = M_T − M_{T−1}` and partial sums of
/// `λ_T · weight(T)`.
pub fn profile_with<M, W>(t_max: usize, mu_fn: M, weight: W) -> CoverProfile
where
    M: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let mut mu_v = Vec::with_capacity(t_max);
    let mut m_v = Vec::with_capacity(t_max);
    let mut lambda_v = Vec::with_capacity(t_max);
    let mut term_v = Vec::with_capacity(t_max);
    let mut partial_v = Vec::with_capacity(t_max);
    let mut previous = 0.0;
    let mut running = CompensatedSum::new();
    for t in 1..=t_max as u64 {
        let levels = 63 - t.leading_zeros();
        let tf = t as f64;
        let mut m = 0.0;
        for j in 0..=levels {
            m += mu_fn(tf / (1u64 << j) as f64);
        }
        let lambda = m - previous;
        previous = m;
        let term = lambda * weight(tf);
        running.add(term);
        mu_v.push(mu_fn(tf));
        m_v.push(m);
        lambda_v.push(lambda);
        term_v.push(term);
        partial_v.push(running.value());
    }
    CoverProfile {
        mu: mu_v,
        m: m_v,
        lambda: lambda_v,
        term: term_v,
        partial_sum: partial_v,
        warnings: Vec::new(),
    }
}

/// `g(T) = φ^{a−c}(T) / T^{a−c}`, the weight of `λ_T` in the series.
pub fn series_weight(t: f64, p: &CoverParams, phi: &DecayFunction) -> f64 {
    (phi.eval(t) / t).powi((p.a - p.c) as i32)
}

pub fn m_profile(
    t_max: usize,
    p: &CoverParams,
    psi: &DecayFunction,
    phi: &DecayFunction,
) -> CoverProfile {
    let mut profile =
        profile_with(t_max, |t| mu(t, p, psi, phi), |t| series_weight(t, p, phi));
    if p.d > p.b {
        let exponent = -(p.b as f64) / (p.d - p.b) as f64;
        let mut first_bad = None;
        let mut count = 0usize;
        for t in 2..=t_max {
            let tf = t as f64;
            if psi.eval(tf) > tf.powf(exponent) * (1.0 + 1e-12) {
                count += 1;
                first_bad.get_or_insert(t);
            }
        }
        if let Some(t) = first_bad {
            profile.warnings.push(format!(
                "psi(T) exceeds T^(-b/(d-b)) at {count} points in [2, {t_max}], first at T = {t}"
            ));
        }
    }
    profile
}

/// Upper bound for the exponent of almost every `c`-dimensional subspace of
/// 𝔄 given the exponent `ω` of a `b`-dimensional 𝔅 ⊂ 𝔄:
/// `(ω(d−b) + c − b)/(d − c)` when `c < b`, and `(ω(a−b) + c − b)/(a − c)`
/// otherwise.
pub fn theorem_bound(a: u32, b: u32, c: u32, d: u32, omega: f64) -> Result<f64, CoverError> {
    let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
    if c < b {
        if d == c {
            return Err(CoverError::DegenerateDenominator("c = d".into()));
        }
        Ok((omega * (d - b) + c - b) / (d - c))
    } else {
        if a == c {
            return Err(CoverError::DegenerateDenominator("c = a".into()));
        }
        Ok((omega * (a - b) + c - b) / (a - c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    Converges,
    Diverges,
    BoundaryConverges,
    BoundaryDiverges,
}

impl Convergence {
    pub fn is_boundary(self) -> bool {
        matches!(self, Convergence::BoundaryConverges | Convergence::BoundaryDiverges)
    }

    pub fn converges(self) -> bool {
        matches!(self, Convergence::Converges | Convergence::BoundaryConverges)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Convergence::Converges => "CONVERGES",
            Convergence::Diverges => "DIVERGES",
            Convergence::BoundaryConverges => "BOUNDARY_CONVERGES",
            Convergence::BoundaryDiverges => "BOUNDARY_DIVERGES",
        }
    }
}

/// Threshold exponent for `φ` given `ψ(T) = T^{−β} log^B T`.
pub fn convergence_threshold(p: &CoverParams, beta: f64) -> f64 {
    let (a, b, c, d) = (p.a as f64, p.b as f64, p.c as f64, p.d as f64);
    if p.c < p.b {
        (beta * (d - b) + c - b) / (d - c)
    } else {
        (beta * (a - b) + c - b) / (a - c)
    }
}

/// Closed-form convergence of the series for `ψ = T^{−β} log^B T` and
/// `φ = T^{−γ} log^C T`.
pub fn classify_convergence(
    p: &CoverParams,
    beta: f64,
    bpow: f64,
    gamma: f64,
    cpow: f64,
) -> Convergence {
    let threshold = convergence_threshold(p, beta);
    let tol = 1e-12 * threshold.abs().max(1.0);
    if gamma > threshold + tol {
        return Convergence::Converges;
    }
    if gamma < threshold - tol {
        return Convergence::Diverges;
    }
    let (a, b, c, d) = (p.a as f64, p.b as f64, p.c as f64, p.d as f64);
    let log_exponent = if p.c < p.b {
        cpow * (d - c) - bpow * (d - b)
    } else {
        cpow * (a - c) - bpow * (a - b)
    };
    if log_exponent < -1.0 - 1e-12 {
        Convergence::BoundaryConverges
    } else {
        Convergence::BoundaryDiverges
    }
}

/// Growth of the partial sums over the last decade of a profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthDiagnosis {
    /// `(S(T_max) − S(T_max/10)) / S(T_max/10)`.
    pub tail_growth: f64,
    /// Increment over the last decade divided by the increment over the one
    /// before it; well below one for a convergent series.
    pub decade_ratio: f64,
}

pub fn growth_diagnosis(profile: &CoverProfile) -> Option<GrowthDiagnosis> {
    let n = profile.t_max();
    if n < 100 {
        return None;
    }
    let (s2, s1, s0) = (profile.partial_at(n), profile.partial_at(n / 10), profile.partial_at(n / 100));
    Some(GrowthDiagnosis {
        tail_growth: (s2 - s1) / s1,
        decade_ratio: (s2 - s1) / (s1 - s0),
    })
}
