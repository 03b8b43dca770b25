//! Similarity, co-occurrence and distance structures derived from the
//! citation matrix, and their binarized graphs.
//!
//! `axis = Cited` compares rows (cited vectors), `axis = Citing` compares
//! columns (citing vectors). The co-occurrence product `A·Aᵀ` (cited) or
//! `Aᵀ·A` (citing) is kept in exact integers; its positive off-diagonal
//! cells are exactly the pairs with positive cosine.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{CitationMatrix, Direction, JournalVector};
use crate::math::sqrt;
use crate::par::map_indices;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    CosineSimilarity,
    OneMinusCosine,
    EuclideanDistance,
    Cooccurrence,
}

impl MatrixKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatrixKind::CosineSimilarity => "cosine_similarity",
            MatrixKind::OneMinusCosine => "one_minus_cosine",
            MatrixKind::EuclideanDistance => "euclidean_distance",
            MatrixKind::Cooccurrence => "cooccurrence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalPolicy {
    /// `cell(i, i) = 0` for every `i`.
    Zeroed,
    Natural,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DistanceMetric {
    /// `1 − cos(x, y)`, in `[0, 1]` for nonnegative vectors.
    OneMinusCosine,
    /// L2 distance between probability-normalized vectors, in `[0, √2]`.
    RelativeEuclidean,
}

impl DistanceMetric {
    pub const ALL: [DistanceMetric; 2] = [DistanceMetric::OneMinusCosine, DistanceMetric::RelativeEuclidean];

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMetric::OneMinusCosine => "one_minus_cosine",
            DistanceMetric::RelativeEuclidean => "relative_euclidean",
        }
    }

    /// Largest value the metric can take.
    pub fn max_value(self) -> f64 {
        match self {
            DistanceMetric::OneMinusCosine => 1.0,
            DistanceMetric::RelativeEuclidean => core::f64::consts::SQRT_2,
        }
    }
}

impl core::str::FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "one_minus_cosine" | "cosine" => Ok(DistanceMetric::OneMinusCosine),
            "relative_euclidean" | "euclidean" => Ok(DistanceMetric::RelativeEuclidean),
            _ => Err(Error::UnknownName(s.into())),
        }
    }
}

/// Dense symmetric real matrix, lower triangle stored. Undefined cells are
/// `None` through [`SymmetricValueMatrix::get`].
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricValueMatrix {
    n: usize,
    kind: MatrixKind,
    diagonal: DiagonalPolicy,
    // Packed lower triangle, row-major; NaN marks an undefined cell.
    data: Vec<f64>,
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
    hi * (hi + 1) / 2 + lo
}

impl SymmetricValueMatrix {
    fn build<F>(n: usize, kind: MatrixKind, diagonal: DiagonalPolicy, cell: F) -> Self
    where
        F: Fn(usize, usize) -> Option<f64> + Sync + Send,
    {
        let rows = map_indices(n, |i| {
            (0..=i).map(|j| cell(i, j).unwrap_or(f64::NAN)).collect::<Vec<_>>()
        });
        Self {
            n,
            kind,
            diagonal,
            data: rows.concat(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn diagonal_policy(&self) -> DiagonalPolicy {
        self.diagonal
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.data[tri(i, j)];
        (!v.is_nan()).then_some(v)
    }

    /// Undirected graph with edge `(i, j)`, `i ≠ j`, iff `cell > threshold`.
    pub fn binarize_above(&self, threshold: f64) -> BinaryGraph {
        let mut edges = Vec::new();
        for i in 0..self.n {
            for j in 0..i {
                if self.get(i, j).is_some_and(|v| v > threshold) {
                    edges.push((j, i));
                }
            }
        }
        BinaryGraph::from_edges(self.n, false, edges)
    }
}

impl PairDistance for SymmetricValueMatrix {
    fn order(&self) -> usize {
        self.n
    }

    fn distance(&self, i: usize, j: usize) -> Option<f64> {
        self.get(i, j)
    }
}

/// Undirected edge `(i, j)` for every positive off-diagonal cell.
pub fn binarize(sym: &SymmetricValueMatrix) -> BinaryGraph {
    sym.binarize_above(0.0)
}

/// Unweighted graph in adjacency-list (CSR) form. No self-loops; undirected
/// graphs list every edge under both endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryGraph {
    n: usize,
    directed: bool,
    ptr: Vec<usize>,
    adj: Vec<u32>,
}

impl BinaryGraph {
    /// Builds a graph from `(from, to)` pairs. Self-loops and duplicates are
    /// dropped; for undirected graphs `(a, b)` and `(b, a)` are one edge.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut arcs: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
            if a == b {
                continue;
            }
            arcs.push((a as u32, b as u32));
            if !directed {
                arcs.push((b as u32, a as u32));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        Self::from_sorted_arcs(n, directed, &arcs)
    }

    fn from_sorted_arcs(n: usize, directed: bool, arcs: &[(u32, u32)]) -> Self {
        let mut ptr = vec![0usize; n + 1];
        for &(a, _) in arcs {
            ptr[a as usize + 1] += 1;
        }
        for i in 0..n {
            ptr[i + 1] += ptr[i];
        }
        Self {
            n,
            directed,
            ptr,
            adj: arcs.iter().map(|a| a.1).collect(),
        }
    }

    /// `rows[i]` are the sorted out-neighbours of `i`.
    pub(crate) fn from_adjacency(directed: bool, rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        let mut total = 0;
        for r in &rows {
            total += r.len();
            ptr.push(total);
        }
        Self {
            n,
            directed,
            ptr,
            adj: rows.concat(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Sorted out-neighbours (all neighbours when undirected).
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.ptr[v]..self.ptr[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.ptr[v + 1] - self.ptr[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    /// Arcs for directed graphs, edges for undirected ones.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.adj.len()
        } else {
            self.adj.len() / 2
        }
    }

    /// Edges as `(a, b)` pairs; undirected edges listed once with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .map(move |&b| (a, b as usize))
                .filter(move |&(a, b)| self.directed || a < b)
        })
    }

    pub fn transpose(&self) -> Self {
        if !self.directed {
            return self.clone();
        }
        let mut arcs: Vec<(u32, u32)> = self.edges().map(|(a, b)| (b as u32, a as u32)).collect();
        arcs.sort_unstable();
        Self::from_sorted_arcs(self.n, true, &arcs)
    }
}

/// Directed graph with arc `j → i` (citing to cited) for every positive
/// off-diagonal cell `(cited = i, citing = j)`.
pub fn binarize_directed(matrix: &CitationMatrix) -> BinaryGraph {
    let rows = (0..matrix.n())
        .map(|j| matrix.col(j).0.iter().copied().filter(|&i| i as usize != j).collect())
        .collect();
    BinaryGraph::from_adjacency(true, rows)
}

/// Exact co-occurrence product `A·Aᵀ` (cited) or `Aᵀ·A` (citing), stored
/// sparse with the diagonal. Symmetric by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    n: usize,
    axis: Direction,
    ptr: Vec<usize>,
    idx: Vec<u32>,
    val: Vec<u64>,
    diag: Vec<u64>,
}

type SliceFn = fn(&CitationMatrix, usize) -> (&[u32], &[u64]);

/// Computes the co-occurrence product in exact integer arithmetic.
///
/// Overflow of `u64` in any product or partial sum is an error.
pub fn cooccurrence(matrix: &CitationMatrix, axis: Direction) -> Result<CooccurrenceMatrix> {
    let n = matrix.n();
    // Along `axis`, a journal's vector is `outer(i)`; `inner(k)` lists the
    // journals whose vectors have a nonzero in position k.
    let (outer, inner): (SliceFn, SliceFn) = match axis {
        Direction::Cited => (CitationMatrix::row, CitationMatrix::col),
        Direction::Citing => (CitationMatrix::col, CitationMatrix::row),
    };

    let rows: Vec<Result<(Vec<u32>, Vec<u64>)>> = map_indices(n, |i| {
        let mut acc: Vec<u64> = vec![0; n];
        let mut touched: Vec<u32> = Vec::new();
        let (ks, xs) = outer(matrix, i);
        for (&k, &x) in ks.iter().zip(xs) {
            let (js, ys) = inner(matrix, k as usize);
            for (&j, &y) in js.iter().zip(ys) {
                let prod = x.checked_mul(y).ok_or(Error::Overflow("co-occurrence product"))?;
                let slot = &mut acc[j as usize];
                if *slot == 0 {
                    touched.push(j);
                }
                *slot = slot.checked_add(prod).ok_or(Error::Overflow("co-occurrence sum"))?;
            }
        }
        touched.sort_unstable();
        let vals = touched.iter().map(|&j| acc[j as usize]).collect();
        Ok((touched, vals))
    });

    let mut ptr = Vec::with_capacity(n + 1);
    ptr.push(0);
    let mut idx = Vec::new();
    let mut val = Vec::new();
    let mut diag = vec![0; n];
    for (i, r) in rows.into_iter().enumerate() {
        let (js, vs) = r?;
        if let Ok(k) = js.binary_search(&(i as u32)) {
            diag[i] = vs[k];
        }
        idx.extend(js);
        val.extend(vs);
        ptr.push(idx.len());
    }
    Ok(CooccurrenceMatrix {
        n,
        axis,
        ptr,
        idx,
        val,
        diag,
    })
}

impl CooccurrenceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn axis(&self) -> Direction {
        self.axis
    }

    /// Stored (nonzero) cells, diagonal included.
    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[u64]) {
        let r = self.ptr[i]..self.ptr[i + 1];
        (&self.idx[r.clone()], &self.val[r])
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return self.diag[i];
        }
        let (idx, val) = self.row(i);
        match idx.binary_search(&(j as u32)) {
            Ok(k) => val[k],
            Err(_) => 0,
        }
    }

    /// Squared norm of journal `i`'s vector.
    pub fn diag(&self, i: usize) -> u64 {
        self.diag[i]
    }

    /// Undirected graph of the positive off-diagonal cells.
    pub fn support_graph(&self) -> BinaryGraph {
        let rows = (0..self.n)
            .map(|i| self.row(i).0.iter().copied().filter(|&j| j as usize != i).collect())
            .collect();
        BinaryGraph::from_adjacency(false, rows)
    }

    /// Cosine computed from the product: `G_ij / √(G_ii·G_jj)`, exactly 1 when
    /// Cauchy-Schwarz holds with equality, 0 when either vector is zero.
    pub fn cosine(&self, i: usize, j: usize) -> f64 {
        cosine_from_gram(self.get(i, j), self.diag[i], self.diag[j])
    }

    /// Undirected graph with edge iff the cosine strictly exceeds `threshold`.
    /// With `threshold = 0` this equals [`CooccurrenceMatrix::support_graph`].
    pub fn cosine_graph(&self, threshold: f64) -> BinaryGraph {
        let rows = map_indices(self.n, |i| {
            let (idx, val) = self.row(i);
            idx.iter()
                .zip(val)
                .filter(|&(&j, &g)| {
                    j as usize != i && cosine_from_gram(g, self.diag[i], self.diag[j as usize]) > threshold
                })
                .map(|(&j, _)| j)
                .collect()
        });
        BinaryGraph::from_adjacency(false, rows)
    }

    /// Dense copy with kind [`MatrixKind::Cooccurrence`].
    pub fn to_value_matrix(&self) -> SymmetricValueMatrix {
        SymmetricValueMatrix::build(self.n, MatrixKind::Cooccurrence, DiagonalPolicy::Natural, |i, j| {
            Some(self.get(i, j) as f64)
        })
    }
}

fn cosine_from_gram(g: u64, gi: u64, gj: u64) -> f64 {
    if g == 0 || gi == 0 || gj == 0 {
        return 0.0;
    }
    let norms = gi as u128 * gj as u128;
    if (g as u128) * (g as u128) == norms {
        return 1.0;
    }
    (g as f64 / sqrt(norms as f64)).clamp(0.0, 1.0)
}

fn sparse_dot(a: (&[u32], &[u64]), b: (&[u32], &[u64])) -> f64 {
    let (ai, av) = a;
    let (bi, bv) = b;
    let (mut p, mut q) = (0, 0);
    let mut s = 0.0;
    while p < ai.len() && q < bi.len() {
        match ai[p].cmp(&bi[q]) {
            core::cmp::Ordering::Less => p += 1,
            core::cmp::Ordering::Greater => q += 1,
            core::cmp::Ordering::Equal => {
                s += av[p] as f64 * bv[q] as f64;
                p += 1;
                q += 1;
            }
        }
    }
    s
}

/// Pairwise cosine between rows (cited) or columns (citing).
///
/// Evaluated directly from the sparse vectors. Zero vectors have cosine 0
/// with everything, themselves included. Cost is quadratic in `n`.
pub fn cosine_matrix(matrix: &CitationMatrix, axis: Direction) -> SymmetricValueMatrix {
    let n = matrix.n();
    let squares: Vec<f64> = (0..n)
        .map(|i| {
            let (idx, val) = matrix.slice(i, axis);
            sparse_dot((idx, val), (idx, val))
        })
        .collect();
    SymmetricValueMatrix::build(n, MatrixKind::CosineSimilarity, DiagonalPolicy::Natural, |i, j| {
        if squares[i] == 0.0 || squares[j] == 0.0 {
            return Some(0.0);
        }
        let dot = sparse_dot(matrix.slice(i, axis), matrix.slice(j, axis));
        Some((dot / sqrt(squares[i] * squares[j])).clamp(0.0, 1.0))
    })
}

/// Entries of a journal vector divided by their sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    pub ids: Vec<usize>,
    pub probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn sum(&self) -> f64 {
        crate::math::compensated_sum(self.probs.iter().copied())
    }

    /// Divides by the current sum again; a fixed point for normalized input.
    pub fn renormalize(&self) -> Result<ProbabilityVector> {
        normalize(self.ids.clone(), self.probs.clone())
    }
}

fn normalize(ids: Vec<usize>, weights: Vec<f64>) -> Result<ProbabilityVector> {
    if ids.is_empty() {
        return Err(Error::Undefined("empty citation vector"));
    }
    let total = crate::math::compensated_sum(weights.iter().copied());
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidWeights("vector mass must be positive"));
    }
    Ok(ProbabilityVector {
        ids,
        probs: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// Relative frequency distribution of a journal vector. Support unchanged.
pub fn probability_normalize(v: &JournalVector<'_>) -> Result<ProbabilityVector> {
    normalize(v.ids().iter().map(|&i| i as usize).collect(), v.weights())
}

/// Distance between two journals, `None` when undefined.
pub trait PairDistance {
    fn order(&self) -> usize;
    fn distance(&self, i: usize, j: usize) -> Option<f64>;
}

/// Distances evaluated on demand from the exact co-occurrence product.
///
/// For `1 − cosine` this uses `G_ij / √(G_ii·G_jj)`. For relative Euclidean
/// distance between `p = x/S_x` and `q = y/S_y`:
///
/// `‖p − q‖² = (S_y²·G_xx + S_x²·G_yy − 2·S_x·S_y·G_xy) / (S_x·S_y)²`
///
/// with the numerator in 128-bit integers, so identical distributions give
/// exactly 0. Undefined when either vector is empty; `d(i, i) = 0`.
#[derive(Clone, Debug)]
pub struct GramDistance {
    gram: CooccurrenceMatrix,
    totals: Vec<u64>,
    metric: DistanceMetric,
}

impl GramDistance {
    pub fn new(matrix: &CitationMatrix, axis: Direction, metric: DistanceMetric) -> Result<Self> {
        Ok(Self::from_gram(matrix, cooccurrence(matrix, axis)?, metric))
    }

    /// Reuses an existing product; it must belong to `matrix`.
    pub fn from_gram(matrix: &CitationMatrix, gram: CooccurrenceMatrix, metric: DistanceMetric) -> Self {
        let axis = gram.axis();
        let totals = (0..matrix.n()).map(|i| matrix.slice(i, axis).1.iter().sum()).collect();
        Self { gram, totals, metric }
    }

    pub fn metric(&self) -> DistanceMetric {
        self.metric
    }

    pub fn gram(&self) -> &CooccurrenceMatrix {
        &self.gram
    }

    pub fn set_metric(&mut self, metric: DistanceMetric) {
        self.metric = metric;
    }

    pub fn with_metric(&self, metric: DistanceMetric) -> Self {
        Self { metric, ..self.clone() }
    }

    fn euclidean(&self, i: usize, j: usize) -> f64 {
        let (si, sj) = (self.totals[i] as u128, self.totals[j] as u128);
        let (gii, gjj, gij) = (
            self.gram.diag(i) as u128,
            self.gram.diag(j) as u128,
            self.gram.get(i, j) as u128,
        );
        let exact = (|| {
            let a = sj.checked_mul(sj)?.checked_mul(gii)?;
            let b = si.checked_mul(si)?.checked_mul(gjj)?;
            let c = si.checked_mul(sj)?.checked_mul(gij)?.checked_mul(2)?;
            a.checked_add(b)?.checked_sub(c)
        })();
        match exact {
            Some(num) => sqrt(num as f64) / (si as f64 * sj as f64),
            None => {
                let (si, sj) = (si as f64, sj as f64);
                let sq = gii as f64 / (si * si) + gjj as f64 / (sj * sj) - 2.0 * gij as f64 / (si * sj);
                sqrt(sq.max(0.0))
            }
        }
    }
}

impl PairDistance for GramDistance {
    fn order(&self) -> usize {
        self.gram.n()
    }

    fn distance(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(0.0);
        }
        if self.totals[i] == 0 || self.totals[j] == 0 {
            return None;
        }
        Some(match self.metric {
            DistanceMetric::OneMinusCosine => 1.0 - self.gram.cosine(i, j),
            DistanceMetric::RelativeEuclidean => self.euclidean(i, j),
        })
    }
}

/// Materialized distance matrix with a zeroed diagonal. Pairs involving an
/// empty vector are undefined.
pub fn distance_matrix(
    matrix: &CitationMatrix,
    axis: Direction,
    metric: DistanceMetric,
) -> Result<SymmetricValueMatrix> {
    Ok(distance_matrix_from(&GramDistance::new(matrix, axis, metric)?))
}

/// Materializes any on-demand distance with the same values.
pub fn distance_matrix_from(d: &GramDistance) -> SymmetricValueMatrix {
    let kind = match d.metric() {
        DistanceMetric::OneMinusCosine => MatrixKind::OneMinusCosine,
        DistanceMetric::RelativeEuclidean => MatrixKind::EuclideanDistance,
    };
    SymmetricValueMatrix::build(d.order(), kind, DiagonalPolicy::Zeroed, |i, j| d.distance(i, j))
}
