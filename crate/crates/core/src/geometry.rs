//! Linear subspaces of ℝ^d, their projectors, and the graph parametrization
//! `{(x, Θx)}` used to describe a `c`-dimensional subspace inside an
//! `a`-dimensional ambient one.
//!
//! Every [`Subspace`] is immutable after construction and carries an
//! orthonormal basis together with the cached projector and its complement,
//! so distances are a single matrix-vector product.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::numeric::{dot2, norm2};

/// Relative threshold used for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Candidate coordinate sets whose smallest singular value is within this
/// factor of the best one are considered equally good; the lexicographically
/// first of them wins.
const CONDITIONING_SLACK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("spanning vectors have numerical rank {rank}, expected {count}")]
    RankDeficient { rank: usize, count: usize },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("entry {value} exceeds the bound {bound}")]
    EntryBound { value: f64, bound: f64 },
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

/// A proper `k`-dimensional linear subspace of ℝ^d.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: DMatrix<f64>,
    projector: DMatrix<f64>,
    complement: DMatrix<f64>,
}

impl Subspace {
    /// The zero subspace of ℝ^d.
    pub fn zero(ambient_dim: usize) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(GeometryError::Dimension("ambient dimension must be positive".into()));
        }
        Ok(Self::from_orthonormal(DMatrix::zeros(ambient_dim, 0)))
    }

    fn from_orthonormal(basis: DMatrix<f64>) -> Self {
        let d = basis.nrows();
        let projector = &basis * basis.transpose();
        let complement = DMatrix::identity(d, d) - &projector;
        Self { basis, projector, complement }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `d × k` matrix with orthonormal columns.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vector(&self, j: usize) -> Vec<f64> {
        self.basis.column(j).iter().copied().collect()
    }

    pub fn projector(&self) -> &DMatrix<f64> {
        &self.projector
    }

    /// `I − P`, the projector onto the orthogonal complement.
    pub fn complement_projector(&self) -> &DMatrix<f64> {
        &self.complement
    }

    /// Euclidean distance from `z` to the subspace.
    pub fn distance(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.ambient_dim() {
            return Err(GeometryError::Dimension(format!(
                "vector has length {}, ambient dimension is {}",
                z.len(),
                self.ambient_dim()
            )));
        }
        Ok(self.distance_unchecked(z.iter().copied()))
    }

    /// Distance of an integer point; the caller guarantees the length.
    pub(crate) fn distance_int(&self, z: &[i64]) -> f64 {
        self.distance_unchecked(z.iter().map(|&v| v as f64))
    }

    fn distance_unchecked<I>(&self, z: I) -> f64
    where
        I: Iterator<Item = f64> + Clone,
    {
        let d = self.ambient_dim();
        let mut residual = [0.0f64; MAX_STACK_DIM];
        let mut heap;
        let out: &mut [f64] = if d <= MAX_STACK_DIM {
            &mut residual[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        for (i, slot) in out.iter_mut().enumerate() {
            // row i of the symmetric complement projector == column i
            *slot = dot2(self.complement.column(i).iter().copied(), z.clone());
        }
        norm2(out)
    }

    /// Sine of the largest principal angle between two subspaces of equal
    /// dimension, computed as `‖(I − P_other)·B_self‖₂`.
    pub fn max_principal_angle(&self, other: &Subspace) -> Result<f64> {
        if self.ambient_dim() != other.ambient_dim() || self.dim() != other.dim() {
            return Err(GeometryError::Dimension(format!(
                "cannot compare a {}-subspace of R^{} with a {}-subspace of R^{}",
                self.dim(),
                self.ambient_dim(),
                other.dim(),
                other.ambient_dim()
            )));
        }
        if self.dim() == 0 {
            return Ok(0.0);
        }
        let m = &other.complement * &self.basis;
        let s = m.singular_values().max();
        Ok(s.clamp(0.0, 1.0).asin())
    }

    /// True when every basis vector of `self` lies within `tol` of `other`.
    pub fn is_contained_in(&self, other: &Subspace, tol: f64) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && (0..self.dim()).all(|j| {
                other.distance_unchecked(self.basis.column(j).iter().copied()) <= tol
            })
    }
}

const MAX_STACK_DIM: usize = 16;

/// Orthonormalize `vectors` (all of length `d`) by Householder QR with
/// column pivoting. The span must be proper and the vectors independent.
pub fn orthonormal_subspace(vectors: &[Vec<f64>]) -> Result<Subspace> {
    let count = vectors.len();
    let d = match vectors.first() {
        Some(v) => v.len(),
        None => {
            return Err(GeometryError::Dimension(
                "no spanning vectors; use Subspace::zero for the zero subspace".into(),
            ))
        }
    };
    if d == 0 || vectors.iter().any(|v| v.len() != d) {
        return Err(GeometryError::Dimension("spanning vectors have inconsistent lengths".into()));
    }
    if count >= d {
        return Err(GeometryError::Dimension(format!(
            "{count} vectors in R^{d} cannot span a proper subspace"
        )));
    }
    let m = DMatrix::from_fn(d, count, |i, j| vectors[j][i]);
    let largest = (0..count).map(|j| m.column(j).norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return Err(GeometryError::RankDeficient { rank: 0, count });
    }
    let qr = m.col_piv_qr();
    let r = qr.r();
    let rank = (0..count).take_while(|&i| r[(i, i)].abs() > RANK_TOL * largest).count();
    if rank < count {
        return Err(GeometryError::RankDeficient { rank, count });
    }
    let mut q = qr.q();
    for j in 0..count {
        let mut col = q.column_mut(j);
        if let Some(&lead) = col.iter().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                col.neg_mut();
            }
        }
    }
    Ok(Subspace::from_orthonormal(q))
}

/// Real `rows × cols` matrix with an entry bound `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    entry_bound: f64,
}

impl ThetaMatrix {
    /// Row-major entries; fails if any entry exceeds `entry_bound` in
    /// absolute value.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>, entry_bound: f64) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(GeometryError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if !(entry_bound > 0.0) || !entry_bound.is_finite() {
            return Err(GeometryError::Shape(format!("invalid entry bound {entry_bound}")));
        }
        if let Some(&bad) = entries.iter().find(|x| !x.is_finite() || x.abs() > entry_bound) {
            return Err(GeometryError::EntryBound { value: bad, bound: entry_bound });
        }
        Ok(Self { rows, cols, entries, entry_bound })
    }

    /// Bound taken as `max(1, max|θ_ij|)`.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        let bound = entries.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        Self::new(rows, cols, entries, bound)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols], entry_bound: 1.0 }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry_bound(&self) -> f64 {
        self.entry_bound
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_row_abs_sum(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.entries)
    }
}

/// Where a graph subspace lives: all of ℝ^d, or a subspace 𝔄 ⊂ ℝ^d whose
/// orthonormal basis provides the coordinates `u = (x, y)`.
#[derive(Clone, Copy, Debug)]
pub enum Ambient<'a> {
    Full(usize),
    Within(&'a Subspace),
}

impl Ambient<'_> {
    fn dims(&self) -> (usize, usize) {
        match self {
            Ambient::Full(d) => (*d, *d),
            Ambient::Within(s) => (s.dim(), s.ambient_dim()),
        }
    }
}

/// The subspace `{(x, Θx)}` of the ambient coordinates, embedded in ℝ^d.
///
/// `Θ` must have shape `(a − c) × c` where `a` is the ambient dimension.
pub fn graph_subspace(theta: &ThetaMatrix, ambient: Ambient<'_>) -> Result<Subspace> {
    let (a, d) = ambient.dims();
    let c = theta.cols();
    if c == 0 || c + theta.rows() != a {
        return Err(GeometryError::Shape(format!(
            "theta is {}x{}, ambient has dimension {a}",
            theta.rows(),
            c
        )));
    }
    if c >= d {
        return Err(GeometryError::Dimension(format!("a {c}-subspace of R^{d} is not proper")));
    }
    let vectors: Vec<Vec<f64>> = (0..c)
        .map(|j| {
            let mut u = vec![0.0; a];
            u[j] = 1.0;
            for i in 0..theta.rows() {
                u[c + i] = theta.get(i, j);
            }
            match ambient {
                Ambient::Full(_) => u,
                Ambient::Within(s) => {
                    let b = s.basis();
                    (0..d).map(|r| (0..a).map(|k| b[(r, k)] * u[k]).sum()).collect()
                }
            }
        })
        .collect();
    orthonormal_subspace(&vectors)
}

/// A subspace written as a graph over a set of its ambient coordinates:
/// the coordinates in `dependent` equal `Θ` applied to those in `free`.
#[derive(Clone, Debug)]
pub struct GraphCoordinates {
    pub free: Vec<usize>,
    pub dependent: Vec<usize>,
    pub theta: ThetaMatrix,
    /// Smallest singular value of the basis restricted to `free`.
    pub conditioning: f64,
}

impl GraphCoordinates {
    /// `sqrt(1 + ‖Θ‖_F²)`: for a point `z = (u, w)`, the residual
    /// `|w − Θu|₂` is at most this factor times the distance to the graph.
    pub fn stretch(&self) -> f64 {
        (1.0 + self.theta.frobenius_norm().powi(2)).sqrt()
    }

    pub fn ambient_dim(&self) -> usize {
        self.free.len() + self.dependent.len()
    }

    /// Rebuild the subspace described by this graph.
    pub fn subspace(&self) -> Result<Subspace> {
        let d = self.ambient_dim();
        let k = self.free.len();
        if k == 0 {
            return Subspace::zero(d);
        }
        let vectors: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let mut v = vec![0.0; d];
                v[self.free[j]] = 1.0;
                for (i, &dep) in self.dependent.iter().enumerate() {
                    v[dep] = self.theta.get(i, j);
                }
                v
            })
            .collect();
        orthonormal_subspace(&vectors)
    }
}

/// Choose `k` coordinates onto which the subspace projects bijectively and
/// express it as a graph over them.
///
/// Among all admissible coordinate sets the best conditioned ones (largest
/// smallest singular value of the restricted basis) are preferred; sets within
/// a factor two of the optimum are treated as ties and the lexicographically
/// first one is returned.
pub fn select_graph_coordinates(s: &Subspace) -> GraphCoordinates {
    let d = s.ambient_dim();
    let k = s.dim();
    if k == 0 {
        return GraphCoordinates {
            free: vec![],
            dependent: (0..d).collect(),
            theta: ThetaMatrix::zeros(d, 0),
            conditioning: 1.0,
        };
    }
    let b = s.basis();
    let scored: Vec<(Vec<usize>, f64)> = combinations(d, k)
        .into_iter()
        .map(|set| {
            let sub = DMatrix::from_fn(k, k, |i, j| b[(set[i], j)]);
            let sigma = sub.singular_values().min();
            (set, sigma)
        })
        .collect();
    let best = scored.iter().map(|(_, s)| *s).fold(0.0, f64::max);
    let (free, conditioning) = scored
        .into_iter()
        .find(|(_, s)| *s >= CONDITIONING_SLACK * best)
        .expect("a k-dimensional subspace projects bijectively onto some k coordinates");
    let dependent: Vec<usize> = (0..d).filter(|i| !free.contains(i)).collect();
    let restricted = DMatrix::from_fn(k, k, |i, j| b[(free[i], j)]);
    let inverse = restricted
        .try_inverse()
        .expect("selected coordinate block is nonsingular");
    let dep_block = DMatrix::from_fn(dependent.len(), k, |i, j| b[(dependent[i], j)]);
    let theta = dep_block * inverse;
    let entries: Vec<f64> = (0..theta.nrows())
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| theta[(i, j)])
        .collect();
    let theta = ThetaMatrix::from_entries(dependent.len(), k, entries)
        .expect("graph matrix of a subspace has finite entries");
    GraphCoordinates { free, dependent, theta, conditioning }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < n - k + i {
                current[i] += 1;
                for j in i + 1..k {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}
