//! Graphs, graph signals and signal covariances.
//!
//! Every builder returns an undirected graph with a symmetric, non-negative
//! weighted adjacency `W` with zero diagonal. The degree matrix and the
//! combinatorial Laplacian `L = D − W` are derived once at construction.

use std::collections::VecDeque;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, GlctError, Result};
use crate::scalar::{cabs, creal, Cplx, Real};

/// Attempts made by the random builders before giving up on connectivity.
pub const MAX_CONNECTIVITY_DRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph<T: Real> {
    n: usize,
    coords: Option<Vec<Vec<T>>>,
    adjacency: DMatrix<T>,
    degree: DVector<T>,
    laplacian: DMatrix<T>,
}

impl<T: Real> Graph<T> {
    /// Wraps a weighted adjacency matrix.
    ///
    /// The matrix must be exactly symmetric with a zero diagonal and finite,
    /// non-negative entries.
    pub fn from_adjacency(adjacency: DMatrix<T>, coords: Option<Vec<Vec<T>>>) -> Result<Self> {
        let n = adjacency.nrows();
        if n == 0 {
            return Err(GlctError::invalid("graph must have at least one vertex"));
        }
        check_dim(n, adjacency.ncols())?;
        for i in 0..n {
            if adjacency[(i, i)] != T::zero() {
                return Err(GlctError::invalid(format!("adjacency diagonal entry {i} is nonzero")));
            }
            for j in 0..n {
                let w = adjacency[(i, j)];
                if !w.is_finite() || w < T::zero() {
                    return Err(GlctError::invalid(format!("weight ({i},{j}) must be finite and non-negative")));
                }
                if w != adjacency[(j, i)] {
                    return Err(GlctError::invalid(format!("adjacency not symmetric at ({i},{j})")));
                }
            }
        }
        if let Some(c) = &coords {
            check_dim(n, c.len())?;
        }
        let degree = DVector::from_iterator(n, adjacency.row_iter().map(|r| r.sum()));
        let laplacian = DMatrix::from_diagonal(&degree) - &adjacency;
        Ok(Self { n, coords, adjacency, degree, laplacian })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> Option<&[Vec<T>]> {
        self.coords.as_deref()
    }

    pub fn adjacency(&self) -> &DMatrix<T> {
        &self.adjacency
    }

    pub fn degree(&self) -> &DVector<T> {
        &self.degree
    }

    pub fn laplacian(&self) -> &DMatrix<T> {
        &self.laplacian
    }

    /// Undirected edges `(i, j, w)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let w = self.adjacency[(i, j)];
                if w != T::zero() {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn is_connected(&self) -> bool {
        connected_components(&self.adjacency) == 1
    }
}

fn connected_components<T: Real>(w: &DMatrix<T>) -> usize {
    let n = w.nrows();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if !seen[v] && w[(u, v)] != T::zero() {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

/// A complex-valued signal indexed by graph vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal<T: Real>(pub DVector<Cplx<T>>);

impl<T: Real> GraphSignal<T> {
    pub fn new(values: DVector<Cplx<T>>) -> Self {
        Self(values)
    }

    pub fn from_real(values: &[T]) -> Self {
        Self(DVector::from_iterator(values.len(), values.iter().map(|&v| creal(v))))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &DVector<Cplx<T>> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<Cplx<T>> {
        self.0
    }
}

/// Hermitian positive semidefinite covariance of a graph signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalCovariance<T: Real> {
    c: DMatrix<Cplx<T>>,
}

impl<T: Real> SignalCovariance<T> {
    pub fn new(c: DMatrix<Cplx<T>>) -> Result<Self> {
        let n = c.nrows();
        check_dim(n, c.ncols())?;
        let herm_tol = T::lit(1e3 * T::SYMMETRY_TOL) * (T::one() + c.norm());
        for i in 0..n {
            for j in 0..n {
                if cabs(c[(i, j)] - c[(j, i)].conj()) > herm_tol {
                    return Err(GlctError::invalid(format!("covariance not Hermitian at ({i},{j})")));
                }
            }
        }
        let eig = SymmetricEigen::new(c.clone());
        let floor = -T::lit(1e-10) * (T::one() + eig.eigenvalues.amax());
        if eig.eigenvalues.iter().any(|&l| l < floor) {
            return Err(GlctError::invalid("covariance has a negative eigenvalue"));
        }
        Ok(Self { c })
    }

    pub fn from_real(c: &DMatrix<T>) -> Result<Self> {
        Self::new(c.map(creal))
    }

    pub fn identity(n: usize) -> Self {
        Self { c: DMatrix::identity(n, n) }
    }

    pub fn matrix(&self) -> &DMatrix<Cplx<T>> {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.c.nrows()
    }

    pub fn trace(&self) -> T {
        self.c.diagonal().iter().map(|z| z.re).fold(T::zero(), |a, b| a + b)
    }

    /// Largest eigenvalue of the covariance.
    pub fn spectral_radius(&self) -> T {
        SymmetricEigen::new(self.c.clone()).eigenvalues.amax()
    }
}

/// Edge weighting for k-nearest-neighbour graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Weighting {
    /// Binary weights.
    Unit,
    /// `exp(−‖x_i − x_j‖² / (2θ²))`; `theta: None` uses the mean length of the k-nn edges.
    Gaussian { theta: Option<f64> },
}

impl Default for Weighting {
    fn default() -> Self {
        Weighting::Gaussian { theta: None }
    }
}

fn sq_dist<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).fold(T::zero(), |s, v| s + v)
}

/// Symmetrized k-nearest-neighbour graph.
///
/// An edge joins `i` and `j` when either is among the other's `k` nearest
/// points. Equal distances are resolved in favour of the smaller vertex index.
pub fn build_knn_graph<T: Real>(coords: &[Vec<T>], k: usize, weighting: Weighting) -> Result<Graph<T>> {
    let n = coords.len();
    if n == 0 {
        return Err(GlctError::invalid("no points"));
    }
    if k == 0 || k >= n {
        return Err(GlctError::invalid(format!("k must satisfy 1 <= k < n (k={k}, n={n})")));
    }
    let dim = coords[0].len();
    for (i, p) in coords.iter().enumerate() {
        check_dim(dim, p.len())?;
        if p.iter().any(|v| !v.is_finite()) {
            return Err(GlctError::invalid(format!("point {i} has a non-finite coordinate")));
        }
    }

    let mut linked = vec![vec![false; n]; n];
    for i in 0..n {
        let mut order: Vec<(T, usize)> =
            (0..n).filter(|&j| j != i).map(|j| (sq_dist(&coords[i], &coords[j]), j)).collect();
        order.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite distances").then(x.1.cmp(&y.1)));
        for &(_, j) in order.iter().take(k) {
            linked[i][j] = true;
            linked[j][i] = true;
        }
    }

    let theta = match weighting {
        Weighting::Unit => None,
        Weighting::Gaussian { theta: Some(t) } => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(GlctError::invalid("gaussian theta must be positive"));
            }
            Some(T::lit(t))
        }
        Weighting::Gaussian { theta: None } => {
            let mut total = T::zero();
            let mut count = 0usize;
            for i in 0..n {
                for j in (i + 1)..n {
                    if linked[i][j] {
                        total += sq_dist(&coords[i], &coords[j]).sqrt();
                        count += 1;
                    }
                }
            }
            let mean = total / T::from_usize_lossy(count.max(1));
            // all points coincide: any positive scale gives unit weights
            Some(if mean > T::zero() { mean } else { T::one() })
        }
    };

    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if linked[i][j] {
                let weight = match theta {
                    None => T::one(),
                    Some(th) => (-sq_dist(&coords[i], &coords[j]) / (T::lit(2.0) * th * th)).exp(),
                };
                w[(i, j)] = weight;
                w[(j, i)] = weight;
            }
        }
    }
    Graph::from_adjacency(w, Some(coords.to_vec()))
}

fn redraw_until_connected<T: Real>(
    seed: u64,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<Graph<T>>,
) -> Result<Graph<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_CONNECTIVITY_DRAWS {
        let g = draw(&mut rng)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GlctError::ConstructionFailure(format!(
        "no connected graph after {MAX_CONNECTIVITY_DRAWS} draws (seed {seed})"
    )))
}

fn uniform_points<T: Real>(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<T>> {
    (0..n).map(|_| (0..dim).map(|_| T::lit(rng.random::<f64>())).collect()).collect()
}

/// k-nn graph over `n` points drawn uniformly in the unit square.
pub fn build_random_knn_graph<T: Real>(n: usize, k: usize, seed: u64, weighting: Weighting) -> Result<Graph<T>> {
    if n < 2 {
        return Err(GlctError::invalid("random k-nn graph needs n >= 2"));
    }
    redraw_until_connected(seed, |rng| build_knn_graph(&uniform_points(rng, n, 2), k, weighting))
}

/// Neighbour count used by [`build_sensor_graph`].
pub const SENSOR_NEIGHBORS: usize = 6;

/// Sensor-network style graph: uniform points in the unit square joined by a
/// gaussian-weighted 6-nn relation (fewer neighbours when `n ≤ 6`).
pub fn build_sensor_graph<T: Real>(n: usize, seed: u64) -> Result<Graph<T>> {
    if n < 2 {
        return Err(GlctError::invalid("sensor graph needs n >= 2"));
    }
    let k = SENSOR_NEIGHBORS.min(n - 1);
    redraw_until_connected(seed, |rng| build_knn_graph(&uniform_points(rng, n, 2), k, Weighting::default()))
}

/// Swiss-roll point cloud `(t cos t, h, t sin t)` with `t ∈ [1.5π, 4.5π]`,
/// `h ∈ [0, 21]`, joined by a gaussian-weighted k-nn relation.
pub fn build_swiss_roll_graph<T: Real>(n: usize, seed: u64, k: usize) -> Result<Graph<T>> {
    if n < 2 {
        return Err(GlctError::invalid("swiss roll graph needs n >= 2"));
    }
    redraw_until_connected(seed, |rng| {
        let pts: Vec<Vec<T>> = (0..n)
            .map(|_| {
                let t = 1.5 * std::f64::consts::PI * (1.0 + 2.0 * rng.random::<f64>());
                let h = 21.0 * rng.random::<f64>();
                vec![T::lit(t * t.cos()), T::lit(h), T::lit(t * t.sin())]
            })
            .collect();
        build_knn_graph(&pts, k, Weighting::default())
    })
}

/// Connectivity-based covariance `C/λ_max(C)` with `C_ii = 2`, `C_ij = 1` on
/// edges and zero elsewhere.
pub fn synthetic_autocorrelation<T: Real>(g: &Graph<T>) -> SignalCovariance<T> {
    let n = g.n();
    let w = g.adjacency();
    let c = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            T::lit(2.0)
        } else if w[(i, j)] != T::zero() {
            T::one()
        } else {
            T::zero()
        }
    });
    // the neighbourhood pattern alone is indefinite on most dense graphs, so
    // negative eigenvalues are clipped before normalizing
    let eig = SymmetricEigen::new(c);
    let clipped = eig.eigenvalues.map(|l| l.max(T::zero()));
    let lmax = clipped.max();
    let psd = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    let psd = (&psd + psd.transpose()) / (T::lit(2.0) * lmax);
    SignalCovariance { c: psd.map(creal) }
}

// ---------------------------------------------------------------------------
// CSV import / export

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(r)
}

fn parse_cell<V: std::str::FromStr>(cell: &str, line: usize, what: &str) -> Result<V> {
    cell.parse::<V>().map_err(|_| GlctError::Parse { line, message: format!("invalid {what} '{cell}'") })
}

fn is_header(record: &csv::StringRecord) -> bool {
    record.get(0).map(|c| c.parse::<f64>().is_err()).unwrap_or(false)
}

/// Reads an undirected edge list `i,j,w` (0-based). A header row is optional.
///
/// `n` defaults to one past the largest vertex index.
pub fn read_edge_list<T: Real, R: Read>(r: R, n: Option<usize>) -> Result<Graph<T>> {
    let mut edges = Vec::new();
    for (idx, rec) in csv_reader(r).records().enumerate() {
        let rec = rec?;
        let line = idx + 1;
        if idx == 0 && is_header(&rec) {
            continue;
        }
        if rec.len() != 3 {
            return Err(GlctError::Parse { line, message: format!("expected 3 fields, found {}", rec.len()) });
        }
        let i: usize = parse_cell(&rec[0], line, "vertex index")?;
        let j: usize = parse_cell(&rec[1], line, "vertex index")?;
        let w: f64 = parse_cell(&rec[2], line, "weight")?;
        if i == j {
            return Err(GlctError::Parse { line, message: "self loop".into() });
        }
        edges.push((i, j, w, line));
    }
    let max_index = edges.iter().map(|e| e.0.max(e.1)).max();
    let n = match (n, max_index) {
        (Some(n), Some(m)) if m >= n => {
            return Err(GlctError::invalid(format!("vertex {m} out of range for n={n}")));
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(GlctError::invalid("empty edge list and no vertex count")),
    };
    let mut w = DMatrix::zeros(n, n);
    for (i, j, weight, line) in edges {
        if w[(i, j)] != T::zero() {
            return Err(GlctError::Parse { line, message: format!("duplicate edge {i},{j}") });
        }
        w[(i, j)] = T::lit(weight);
        w[(j, i)] = T::lit(weight);
    }
    Graph::from_adjacency(w, None)
}

pub fn write_edge_list<T: Real, W: Write>(g: &Graph<T>, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["i", "j", "w"])?;
    for (i, j, w) in g.edges() {
        wr.write_record(&[i.to_string(), j.to_string(), format!("{w:e}")])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads coordinates `id,x,y[,z]`. Rows may appear in any order but ids must
/// cover `0..n` exactly once.
pub fn read_coords<T: Real, R: Read>(r: R) -> Result<Vec<Vec<T>>> {
    let mut rows: Vec<(usize, Vec<T>, usize)> = Vec::new();
    for (idx, rec) in csv_reader(r).records().enumerate() {
        let rec = rec?;
        let line = idx + 1;
        if idx == 0 && is_header(&rec) {
            continue;
        }
        if rec.len() < 3 || rec.len() > 4 {
            return Err(GlctError::Parse { line, message: format!("expected 3 or 4 fields, found {}", rec.len()) });
        }
        let id: usize = parse_cell(&rec[0], line, "node id")?;
        let point = rec.iter().skip(1).map(|c| parse_cell::<f64>(c, line, "coordinate").map(T::lit)).collect::<Result<Vec<T>>>()?;
        rows.push((id, point, line));
    }
    rows.sort_by_key(|r| r.0);
    let dim = rows.first().map(|r| r.1.len()).unwrap_or(0);
    for (expect, (id, p, line)) in rows.iter().enumerate() {
        if *id != expect {
            return Err(GlctError::Parse { line: *line, message: format!("node id {expect} missing or duplicated") });
        }
        if p.len() != dim {
            return Err(GlctError::Parse { line: *line, message: "inconsistent coordinate dimension".into() });
        }
    }
    Ok(rows.into_iter().map(|r| r.1).collect())
}

pub fn write_coords<T: Real, W: Write>(coords: &[Vec<T>], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    let dim = coords.first().map(|p| p.len()).unwrap_or(2);
    let mut header = vec!["id".to_string(), "x".into(), "y".into()];
    if dim == 3 {
        header.push("z".into());
    }
    wr.write_record(&header)?;
    for (i, p) in coords.iter().enumerate() {
        let mut row = vec![i.to_string()];
        row.extend(p.iter().map(|v| format!("{v:e}")));
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}
