//! Irrationality measure functions by pruned enumeration of integer points.
//!
//! Two measure functions are supported:
//!
//! * `ψ_Θ(t) = min_{0<|x|≤t} max_j ‖θ_j · x‖` for a real `n × m` matrix, and
//! * `ψ_𝔅(t) = min dist(z, 𝔅)` over nonzero `z ∈ ℤ^d` in a sup-norm range,
//!   for a linear subspace 𝔅 ⊂ ℝ^d.
//!
//! Both are nonincreasing step functions of `t`. The engine scans dyadic
//! shells `r/2 < |z| ≤ r`, keeping the best value found so far as the
//! pruning threshold for the next shell, and records every strict drop.
//! Within a shell a subspace is treated as a graph over its best
//! conditioned coordinates, so the work per shell is `O(r^k)` for a
//! `k`-dimensional subspace and far less when the sorted-residue table of
//! [`crate::sieve`] applies.
//!
//! Witness ties are broken by taking the lexicographically smallest vector
//! whose first nonzero coordinate is positive. Results do not depend on the
//! execution mode or thread count.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::cover::DecayFunction;
use crate::geometry::{select_graph_coordinates, GeometryError, GraphCoordinates, Subspace, ThetaMatrix};
use crate::numeric::nearest_integer_distance;
use crate::parallel::Execution;
use crate::sieve::{slack, Candidates, Sieve, UNBOUNDED};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Largest box the exhaustive oracle will scan.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000_000;

/// Which integer points count for `ψ(t)`: `1 ≤ |z| < t` or `0 < |z| ≤ t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Hash)]
pub enum NormConvention {
    Strict,
    #[default]
    Inclusive,
}

impl NormConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            NormConvention::Strict => "strict",
            NormConvention::Inclusive => "inclusive",
        }
    }

    /// Largest admissible sup-norm at `t`, `None` for an empty range.
    pub fn norm_limit(self, t: u64) -> Option<u64> {
        let limit = match self {
            NormConvention::Inclusive => t,
            NormConvention::Strict => t.saturating_sub(1),
        };
        (limit >= 1).then_some(limit)
    }

    /// First `t` at which a point of sup-norm `norm` is admissible.
    pub fn first_t(self, norm: u64) -> u64 {
        match self {
            NormConvention::Inclusive => norm,
            NormConvention::Strict => norm + 1,
        }
    }
}

impl fmt::Display for NormConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" | "strict_upper" => Ok(NormConvention::Strict),
            "inclusive" | "inclusive_upper" => Ok(NormConvention::Inclusive),
            other => Err(format!("unknown norm convention '{other}'")),
        }
    }
}

/// What a measure function is computed for.
#[derive(Clone, Debug)]
pub enum Subject {
    Theta(ThetaMatrix),
    Subspace(Subspace),
}

impl Subject {
    pub fn describe(&self) -> String {
        match self {
            Subject::Theta(t) => format!("theta {}x{}", t.rows(), t.cols()),
            Subject::Subspace(s) => format!("subspace dim {} in R^{}", s.dim(), s.ambient_dim()),
        }
    }

    /// Length of witness vectors.
    pub fn witness_dim(&self) -> usize {
        match self {
            Subject::Theta(t) => t.cols(),
            Subject::Subspace(s) => s.ambient_dim(),
        }
    }

    /// The measure function's objective at an integer point.
    pub fn evaluate(&self, witness: &[i64]) -> f64 {
        match self {
            Subject::Theta(t) => theta_value(t, witness),
            Subject::Subspace(s) => subspace_value(s, witness),
        }
    }
}

/// Distance from `z` to `space`, with values inside the rounding error of
/// the stored basis reported as exactly 0.
fn subspace_value(space: &Subspace, z: &[i64]) -> f64 {
    let value = space.distance_int(z);
    let noise = 16.0 * f64::EPSILON * space.ambient_dim() as f64 * sup_norm(z) as f64;
    if value <= noise {
        0.0
    } else {
        value
    }
}

fn theta_value(theta: &ThetaMatrix, x: &[i64]) -> f64 {
    (0..theta.rows())
        .map(|j| nearest_integer_distance(theta.row(j), x, 0.0))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Approximation {
    pub value: f64,
    pub witness: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub t: u64,
    pub value: f64,
    pub witness: Vec<i64>,
}

/// Jump points of a measure function up to `t_max_scanned`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordTable {
    pub subject: String,
    pub convention: NormConvention,
    pub records: Vec<Record>,
    pub t_max_scanned: u64,
    /// Set when a record of value 0 closed the table.
    pub contains_integer_points: bool,
}

impl RecordTable {
    /// The step function at `t`; `None` before the first record or beyond
    /// the scanned range of an open table.
    pub fn value_at(&self, t: u64) -> Option<f64> {
        if t > self.t_max_scanned && !self.contains_integer_points {
            return None;
        }
        let idx = self.records.partition_point(|r| r.t <= t);
        (idx > 0).then(|| self.records[idx - 1].value)
    }

    /// Records with strictly positive value.
    pub fn positive_records(&self) -> &[Record] {
        let n = self.records.iter().take_while(|r| r.value > 0.0).count();
        &self.records[..n]
    }
}

#[derive(Debug, Clone, Error)]
pub enum EngineError {
    #[error("no nonzero integer point has sup-norm in the {convention} range at t = {t}")]
    EmptyRange { t: u64, convention: NormConvention },
    #[error("node budget {budget} exhausted ({nodes} nodes) after scanning up to t = {scanned}")]
    BudgetExceeded {
        budget: u64,
        nodes: u64,
        scanned: u64,
        partial: Option<Box<RecordTable>>,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug)]
struct Hit {
    norm: u64,
    value: f64,
    witness: Vec<i64>,
}

fn better(a: &(f64, &[i64]), b: &(f64, &[i64])) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Equal => a.1 < b.1,
        Ordering::Greater => false,
    }
}

fn sup_norm(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

fn first_nonzero_sign(v: &[i64]) -> i64 {
    v.iter().find(|&&x| x != 0).map_or(0, |x| x.signum())
}

/// Visit every integer vector in the product of inclusive ranges.
fn for_each_in_ranges(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    let mut w: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&w);
        let mut i = ranges.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if w[i] < ranges[i].1 {
                w[i] += 1;
                break;
            }
            w[i] = ranges[i].0;
        }
    }
}

enum Prepared<'a> {
    Theta(&'a ThetaMatrix),
    Subspace { space: &'a Subspace, graph: GraphCoordinates },
}

impl<'a> Prepared<'a> {
    fn new(subject: &'a Subject) -> Result<Self, EngineError> {
        match subject {
            Subject::Theta(t) => {
                if t.rows() == 0 || t.cols() == 0 {
                    return Err(EngineError::Invalid("theta must have at least one row and column".into()));
                }
                Ok(Prepared::Theta(t))
            }
            Subject::Subspace(s) => Ok(Prepared::Subspace { space: s, graph: select_graph_coordinates(s) }),
        }
    }

    fn sieve(&self, r: u64, threshold: f64) -> Sieve<'_> {
        let r = r as i64;
        match self {
            Prepared::Theta(t) => {
                let (m, n) = (t.cols(), t.rows());
                let delta = if threshold >= 0.5 {
                    f64::INFINITY
                } else {
                    threshold + slack(r as f64 * t.max_row_abs_sum())
                };
                Sieve {
                    m,
                    n,
                    rows: t.entries(),
                    offsets: vec![0.0; n],
                    free_lo: vec![-r; m],
                    free_hi: vec![r; m],
                    dep_lo: vec![-UNBOUNDED; n],
                    dep_hi: vec![UNBOUNDED; n],
                    delta,
                    half: true,
                }
            }
            Prepared::Subspace { graph, .. } => {
                let (m, n) = (graph.free.len(), graph.dependent.len());
                Sieve {
                    m,
                    n,
                    rows: graph.theta.entries(),
                    offsets: vec![0.0; n],
                    free_lo: vec![-r; m],
                    free_hi: vec![r; m],
                    dep_lo: vec![-r; n],
                    dep_hi: vec![r; n],
                    delta: graph_delta(graph, threshold, r as f64),
                    half: true,
                }
            }
        }
    }

    /// Points with `r_prev < |z| ≤ r` and value at most `threshold`.
    fn collect(&self, cands: &Candidates, r_prev: u64, threshold: f64) -> Vec<Hit> {
        let mut hits = Vec::new();
        match self {
            Prepared::Theta(t) => {
                for i in 0..cands.len() {
                    let (x, _) = cands.get(i);
                    let norm = sup_norm(x);
                    if norm <= r_prev {
                        continue;
                    }
                    let value = theta_value(t, x);
                    if value <= threshold {
                        hits.push(Hit { norm, value, witness: x.to_vec() });
                    }
                }
            }
            Prepared::Subspace { space, graph } => {
                let mut z = vec![0i64; space.ambient_dim()];
                for i in 0..cands.len() {
                    let (u, ranges) = cands.get(i);
                    let u_zero = u.iter().all(|&v| v == 0);
                    for (slot, &coord) in u.iter().zip(&graph.free) {
                        z[coord] = *slot;
                    }
                    for_each_in_ranges(ranges, |w| {
                        for (slot, &coord) in w.iter().zip(&graph.dependent) {
                            z[coord] = *slot;
                        }
                        let sign = first_nonzero_sign(&z);
                        if sign == 0 || (u_zero && sign < 0) {
                            return;
                        }
                        let norm = sup_norm(&z);
                        if norm <= r_prev {
                            return;
                        }
                        let witness: Vec<i64> =
                            if sign < 0 { z.iter().map(|v| -v).collect() } else { z.clone() };
                        let value = subspace_value(space, &witness);
                        if value <= threshold {
                            hits.push(Hit { norm, value, witness });
                        }
                    });
                }
            }
        }
        hits
    }
}

/// Per-row residual tolerance for points within `threshold` of a graph.
fn graph_delta(graph: &GraphCoordinates, threshold: f64, magnitude: f64) -> f64 {
    if threshold.is_infinite() {
        f64::INFINITY
    } else {
        threshold * graph.stretch() + slack(magnitude * (1.0 + graph.theta.max_row_abs_sum()))
    }
}

struct Staged {
    best: Option<Hit>,
    records: Vec<Hit>,
    scanned: u64,
    closed: bool,
    nodes: u64,
}

/// Configuration shared by all enumeration entry points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Engine {
    /// Upper bound on enumeration nodes per call.
    pub budget: u64,
    pub execution: Execution,
}

impl Default for Engine {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, execution: Execution::default() }
    }
}

impl Engine {
    pub fn new(budget: u64, execution: Execution) -> Self {
        Self { budget, execution }
    }

    pub fn sequential() -> Self {
        Self { execution: Execution::Sequential, ..Self::default() }
    }

    fn staged(&self, prep: &Prepared<'_>, limit: u64, close_on_zero: bool) -> Result<Staged, Staged> {
        let mut state = Staged { best: None, records: Vec::new(), scanned: 0, closed: false, nodes: 0 };
        while state.scanned < limit {
            let r = if state.scanned == 0 { 1 } else { (state.scanned * 2).min(limit) };
            let threshold = state.best.as_ref().map_or(f64::INFINITY, |b| b.value);
            let sieve = prep.sieve(r, threshold);
            if state.nodes.saturating_add(sieve.estimate_nodes()) > self.budget {
                return Err(state);
            }
            let cands = sieve.run(self.execution);
            state.nodes += cands.nodes;
            let mut hits = prep.collect(&cands, state.scanned, threshold);
            state.nodes += hits.len() as u64;
            hits.sort_by(|a, b| {
                a.norm
                    .cmp(&b.norm)
                    .then(a.value.total_cmp(&b.value))
                    .then_with(|| a.witness.cmp(&b.witness))
            });
            for h in hits {
                match &mut state.best {
                    None => {
                        state.records.push(h.clone());
                        state.best = Some(h);
                    }
                    Some(b) if h.value < b.value => {
                        state.records.push(h.clone());
                        *b = h;
                    }
                    Some(b) if h.value == b.value && h.witness < b.witness => {
                        b.witness = h.witness;
                    }
                    Some(_) => {}
                }
            }
            state.scanned = r;
            if close_on_zero && state.best.as_ref().is_some_and(|b| b.value == 0.0) {
                state.closed = true;
                break;
            }
        }
        Ok(state)
    }

    fn single(&self, subject: &Subject, limit: u64, convention: NormConvention) -> Result<Approximation, EngineError> {
        let prep = Prepared::new(subject)?;
        match self.staged(&prep, limit, false) {
            Ok(state) => {
                let best = state.best.expect("a nonempty range always yields a best point");
                Ok(Approximation { value: best.value, witness: best.witness })
            }
            Err(state) => Err(self.budget_error(subject, convention, state)),
        }
    }

    fn budget_error(&self, subject: &Subject, convention: NormConvention, state: Staged) -> EngineError {
        let scanned = if state.scanned == 0 { 0 } else { convention.first_t(state.scanned) };
        let partial = to_table(subject, convention, &state, scanned);
        EngineError::BudgetExceeded {
            budget: self.budget,
            nodes: state.nodes,
            scanned,
            partial: Some(Box::new(partial)),
        }
    }

    /// `ψ_Θ(t)` with the witness `x` (first nonzero coordinate positive).
    pub fn psi_theta(&self, theta: &ThetaMatrix, t: u64) -> Result<Approximation, EngineError> {
        if t == 0 {
            return Err(EngineError::EmptyRange { t, convention: NormConvention::Inclusive });
        }
        self.single(&Subject::Theta(theta.clone()), t, NormConvention::Inclusive)
    }

    /// `ψ_𝔅(t)` under the given norm convention.
    pub fn psi_subspace(
        &self,
        space: &Subspace,
        t: u64,
        convention: NormConvention,
    ) -> Result<Approximation, EngineError> {
        let limit = convention.norm_limit(t).ok_or(EngineError::EmptyRange { t, convention })?;
        self.single(&Subject::Subspace(space.clone()), limit, convention)
    }

    /// Measure function of either kind at `t`.
    pub fn psi(&self, subject: &Subject, t: u64, convention: NormConvention) -> Result<Approximation, EngineError> {
        let limit = convention.norm_limit(t).ok_or(EngineError::EmptyRange { t, convention })?;
        self.single(subject, limit, convention)
    }

    /// All records up to `t_max`. A record of value 0 closes the table.
    pub fn record_table(
        &self,
        subject: &Subject,
        t_max: u64,
        convention: NormConvention,
    ) -> Result<RecordTable, EngineError> {
        if t_max < 2 {
            return Err(EngineError::Invalid(format!("t_max = {t_max} must be at least 2")));
        }
        let limit = convention.norm_limit(t_max).ok_or(EngineError::EmptyRange { t: t_max, convention })?;
        let prep = Prepared::new(subject)?;
        match self.staged(&prep, limit, true) {
            Ok(state) => {
                let scanned = if state.closed { t_max } else { convention.first_t(state.scanned) };
                Ok(to_table(subject, convention, &state, scanned))
            }
            Err(state) => Err(self.budget_error(subject, convention, state)),
        }
    }

    fn graph_points(
        &self,
        space: &Subspace,
        graph: &GraphCoordinates,
        sieve: &Sieve<'_>,
        mut visit: impl FnMut(&[i64]),
    ) -> Result<(), EngineError> {
        if sieve.estimate_nodes() > self.budget {
            return Err(EngineError::BudgetExceeded {
                budget: self.budget,
                nodes: sieve.estimate_nodes(),
                scanned: 0,
                partial: None,
            });
        }
        let cands = sieve.run(self.execution);
        let mut z = vec![0i64; space.ambient_dim()];
        for i in 0..cands.len() {
            let (u, ranges) = cands.get(i);
            for (slot, &coord) in u.iter().zip(&graph.free) {
                z[coord] = *slot;
            }
            for_each_in_ranges(ranges, |w| {
                for (slot, &coord) in w.iter().zip(&graph.dependent) {
                    z[coord] = *slot;
                }
                visit(&z);
            });
        }
        Ok(())
    }

    fn box_sieve<'g>(graph: &'g GraphCoordinates, radius: i64, delta: f64) -> Sieve<'g> {
        let (m, n) = (graph.free.len(), graph.dependent.len());
        Sieve {
            m,
            n,
            rows: graph.theta.entries(),
            offsets: vec![0.0; n],
            free_lo: vec![-radius; m],
            free_hi: vec![radius; m],
            dep_lo: vec![-radius; n],
            dep_hi: vec![radius; n],
            delta,
            half: false,
        }
    }

    /// `#{z ∈ ℤ^d : |z| = T, dist(z, 𝔄) ≤ φ(T)}`.
    pub fn count_near_shell(&self, space: &Subspace, phi: &DecayFunction, t: u64) -> Result<u64, EngineError> {
        if t == 0 {
            return Err(EngineError::Invalid("T must be at least 1".into()));
        }
        let graph = select_graph_coordinates(space);
        let bound = phi.eval(t as f64);
        let sieve = Self::box_sieve(&graph, t as i64, graph_delta(&graph, bound, t as f64));
        let mut count = 0u64;
        self.graph_points(space, &graph, &sieve, |z| {
            if sup_norm(z) == t && subspace_value(space, z) <= bound {
                count += 1;
            }
        })?;
        Ok(count)
    }

    /// `#{z ∈ ℤ^d : T/2 < |z| ≤ T, dist(z, 𝔄) ≤ φ(|z|)}`.
    pub fn count_near_annulus(&self, space: &Subspace, phi: &DecayFunction, t: u64) -> Result<u64, EngineError> {
        if t == 0 {
            return Err(EngineError::Invalid("T must be at least 1".into()));
        }
        let graph = select_graph_coordinates(space);
        let lowest = t / 2 + 1;
        let widest = (lowest..=t).map(|j| phi.eval(j as f64)).fold(0.0, f64::max);
        let sieve = Self::box_sieve(&graph, t as i64, graph_delta(&graph, widest, t as f64));
        let mut count = 0u64;
        self.graph_points(space, &graph, &sieve, |z| {
            let norm = sup_norm(z);
            if norm >= lowest && subspace_value(space, z) <= phi.eval(norm as f64) {
                count += 1;
            }
        })?;
        Ok(count)
    }

    /// Integer points of `scale · Ω_T + shift`, where `Ω_T` is the set of
    /// `w` with `|w| ≤ T` and `dist(w, 𝔅) ≤ ψ(T)`. Sorted lexicographically.
    pub fn omega_lattice_points(
        &self,
        space: &Subspace,
        psi: &DecayFunction,
        t: f64,
        shift: &[f64],
        scale: f64,
    ) -> Result<Vec<Vec<i64>>, EngineError> {
        let d = space.ambient_dim();
        if shift.len() != d {
            return Err(GeometryError::Dimension(format!("shift has length {}, expected {d}", shift.len())).into());
        }
        if !(t >= 1.0) || !(scale > 0.0 && scale <= 1.0) {
            return Err(EngineError::Invalid(format!("need T >= 1 and scale in (0, 1], got T = {t}, scale = {scale}")));
        }
        let radius = scale * t;
        let bound = scale * psi.eval(t);
        let lo: Vec<i64> = shift.iter().map(|s| (s - radius).ceil() as i64).collect();
        let hi: Vec<i64> = shift.iter().map(|s| (s + radius).floor() as i64).collect();
        let graph = select_graph_coordinates(space);
        let theta = &graph.theta;
        let offsets: Vec<f64> = (0..graph.dependent.len())
            .map(|j| {
                shift[graph.dependent[j]]
                    - graph.free.iter().enumerate().map(|(i, &c)| theta.get(j, i) * shift[c]).sum::<f64>()
            })
            .collect();
        let magnitude = t + shift.iter().fold(0.0f64, |a, s| a.max(s.abs()));
        let sieve = Sieve {
            m: graph.free.len(),
            n: graph.dependent.len(),
            rows: theta.entries(),
            offsets,
            free_lo: graph.free.iter().map(|&c| lo[c]).collect(),
            free_hi: graph.free.iter().map(|&c| hi[c]).collect(),
            dep_lo: graph.dependent.iter().map(|&c| lo[c]).collect(),
            dep_hi: graph.dependent.iter().map(|&c| hi[c]).collect(),
            delta: graph_delta(&graph, bound, magnitude),
            half: false,
        };
        let mut points = Vec::new();
        let mut diff = vec![0.0; d];
        self.graph_points(space, &graph, &sieve, |z| {
            for i in 0..d {
                diff[i] = z[i] as f64 - shift[i];
            }
            if diff.iter().all(|x| x.abs() <= radius)
                && space.distance(&diff).expect("dimension checked") <= bound
            {
                points.push(z.to_vec());
            }
        })?;
        points.sort();
        Ok(points)
    }
}

fn to_table(subject: &Subject, convention: NormConvention, state: &Staged, scanned: u64) -> RecordTable {
    RecordTable {
        subject: subject.describe(),
        convention,
        records: state
            .records
            .iter()
            .map(|h| Record { t: convention.first_t(h.norm), value: h.value, witness: h.witness.clone() })
            .collect(),
        t_max_scanned: scanned,
        contains_integer_points: state.closed,
    }
}

/// Exhaustive oracle: `ψ(t)` for every `t = 0..=t_max` by scanning the whole
/// box without pruning. Entry `t` is `None` when the range is empty.
pub fn brute_force_profile(
    subject: &Subject,
    t_max: u64,
    convention: NormConvention,
) -> Result<Vec<Option<Approximation>>, EngineError> {
    let dim = subject.witness_dim();
    let Some(limit) = convention.norm_limit(t_max) else {
        return Ok(vec![None; t_max as usize + 1]);
    };
    let volume = (2.0 * limit as f64 + 1.0).powi(dim as i32);
    if volume > BRUTE_FORCE_LIMIT as f64 {
        return Err(EngineError::BudgetExceeded {
            budget: BRUTE_FORCE_LIMIT,
            nodes: volume as u64,
            scanned: 0,
            partial: None,
        });
    }
    let l = limit as i64;
    let mut shell_best: Vec<Option<(f64, Vec<i64>)>> = vec![None; limit as usize + 1];
    for_each_in_ranges(&vec![(-l, l); dim], |x| {
        if first_nonzero_sign(x) <= 0 {
            return;
        }
        let value = subject.evaluate(x);
        let slot = &mut shell_best[sup_norm(x) as usize];
        if slot.as_ref().is_none_or(|(v, _)| value < *v) {
            *slot = Some((value, x.to_vec()));
        }
    });
    let mut out = Vec::with_capacity(t_max as usize + 1);
    let mut running: Option<(f64, Vec<i64>)> = None;
    for t in 0..=t_max {
        if let Some(norm) = convention.norm_limit(t) {
            if let Some((v, w)) = &shell_best[norm as usize] {
                let replace = running.as_ref().is_none_or(|(rv, rw)| better(&(*v, w), &(*rv, rw)));
                if replace {
                    running = Some((*v, w.clone()));
                }
            }
        }
        out.push(running.as_ref().map(|(v, w)| Approximation { value: *v, witness: w.clone() }));
    }
    Ok(out)
}

/// Exhaustive oracle for a single `t`.
pub fn brute_force_psi(
    subject: &Subject,
    t: u64,
    convention: NormConvention,
) -> Result<Approximation, EngineError> {
    brute_force_profile(subject, t, convention)?
        .pop()
        .flatten()
        .ok_or(EngineError::EmptyRange { t, convention })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::orthonormal_subspace;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    fn theta(rows: usize, cols: usize, e: &[f64]) -> ThetaMatrix {
        ThetaMatrix::from_entries(rows, cols, e.to_vec()).unwrap()
    }

    #[test]
    fn zero_row_has_value_zero() {
        let a = Engine::default().psi_theta(&theta(1, 1, &[0.0]), 5).unwrap();
        assert_eq!(a, Approximation { value: 0.0, witness: vec![1] });
    }

    #[test]
    fn half_row() {
        let e = Engine::default();
        let th = theta(1, 1, &[0.5]);
        assert_eq!(e.psi_theta(&th, 1).unwrap().value, 0.5);
        assert_eq!(e.psi_theta(&th, 2).unwrap(), Approximation { value: 0.0, witness: vec![2] });
        let table = e.record_table(&Subject::Theta(th), 50, NormConvention::Inclusive).unwrap();
        let pairs: Vec<(u64, f64)> = table.records.iter().map(|r| (r.t, r.value)).collect();
        assert_eq!(pairs, vec![(1, 0.5), (2, 0.0)]);
        assert!(table.contains_integer_points);
    }

    #[test]
    fn rational_line_examples() {
        let e = Engine::default();
        let diag = orthonormal_subspace(&[vec![1.0, 1.0]]).unwrap();
        let a = e.psi_subspace(&diag, 2, NormConvention::Inclusive).unwrap();
        assert_eq!(a, Approximation { value: 0.0, witness: vec![1, 1] });
        let table = e.record_table(&Subject::Subspace(diag), 100, NormConvention::Inclusive).unwrap();
        assert_eq!(table.records.len(), 1);
        assert!(table.contains_integer_points);

        let x_axis = orthonormal_subspace(&[vec![1.0, 0.0, 0.0]]).unwrap();
        let a = e.psi_subspace(&x_axis, 1, NormConvention::Inclusive).unwrap();
        assert_eq!(a, Approximation { value: 0.0, witness: vec![1, 0, 0] });
    }

    #[test]
    fn strict_range_at_one_is_empty() {
        let x_axis = orthonormal_subspace(&[vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            Engine::default().psi_subspace(&x_axis, 1, NormConvention::Strict),
            Err(EngineError::EmptyRange { t: 1, .. })
        ));
    }

    #[test]
    fn golden_theta_records_are_fibonacci() {
        let table = Engine::default()
            .record_table(&Subject::Theta(theta(1, 1, &[GOLDEN])), 10_000, NormConvention::Inclusive)
            .unwrap();
        let ts: Vec<u64> = table.records.iter().map(|r| r.t).collect();
        let mut fib = vec![1u64, 2];
        while fib[fib.len() - 1] + fib[fib.len() - 2] <= 10_000 {
            fib.push(fib[fib.len() - 1] + fib[fib.len() - 2]);
        }
        assert_eq!(ts, fib);
    }

    #[test]
    fn shell_and_annulus_counts() {
        let e = Engine::default();
        let x_axis = orthonormal_subspace(&[vec![1.0, 0.0]]).unwrap();
        assert_eq!(e.count_near_shell(&x_axis, &DecayFunction::constant(0.4), 1).unwrap(), 2);
        assert_eq!(e.count_near_shell(&x_axis, &DecayFunction::constant(1.5), 1).unwrap(), 8);
        assert_eq!(e.count_near_annulus(&x_axis, &DecayFunction::constant(0.4), 4).unwrap(), 4);
    }

    #[test]
    fn omega_negative_control() {
        let diag = orthonormal_subspace(&[vec![1.0, 1.0]]).unwrap();
        let pts = Engine::default()
            .omega_lattice_points(&diag, &DecayFunction::power(0.1, 1.0), 10.0, &[0.0, 0.0], 1.0)
            .unwrap();
        assert!(pts.contains(&vec![1, 1]));
        assert!(pts.contains(&vec![0, 0]));
        assert_eq!(pts.len(), 21);
    }

    #[test]
    fn brute_force_matches_small_cases() {
        let th = Subject::Theta(theta(1, 1, &[0.5]));
        for t in 1..=10 {
            let b = brute_force_psi(&th, t, NormConvention::Inclusive).unwrap();
            let e = Engine::default().psi(&th, t, NormConvention::Inclusive).unwrap();
            assert_eq!(b, e);
        }
    }

    #[test]
    fn budget_is_enforced_with_partial_table() {
        let line = orthonormal_subspace(&[vec![1.0, GOLDEN]]).unwrap();
        let err = Engine::new(1_000, Execution::Sequential)
            .record_table(&Subject::Subspace(line), 100_000, NormConvention::Inclusive)
            .unwrap_err();
        match err {
            EngineError::BudgetExceeded { partial: Some(p), scanned, .. } => {
                assert!(scanned < 1_000 && scanned > 0);
                assert_eq!(p.t_max_scanned, scanned);
                assert!(!p.records.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
