//! Freeman betweenness centrality on unweighted graphs (Brandes'
//! accumulation), plus degree and total-citation auxiliaries.
//!
//! Sources are processed in fixed blocks; each block accumulates its
//! sources in order and the block partials are summed in block order. The
//! result does not depend on thread count or scheduling.
//!
//! Sparse graphs use queue-based BFS per source. Dense graphs use a
//! batched formulation where each BFS level is a matrix product.

use alloc::vec;
use alloc::vec::Vec;

use crate::corpus::{CitationMatrix, Direction};
use crate::netspace::{binarize_directed, cooccurrence, BinaryGraph, CooccurrenceMatrix};
use crate::par::map_indices;
use crate::{Error, Result};

mod dense;

const SOURCE_BLOCK: usize = 64;

/// Arc density above which the batched dense formulation is used.
const DENSE_THRESHOLD: f64 = 0.03;
const DENSE_MIN_ORDER: usize = 512;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BetweennessMethod {
    /// Dense when the graph has at least 512 vertices and 3% arc density.
    #[default]
    Auto,
    Sparse,
    Dense,
}

struct Workspace {
    dist: Vec<i32>,
    sigma: Vec<f64>,
    coef: Vec<f64>,
    order: Vec<u32>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            dist: vec![-1; n],
            sigma: vec![0.0; n],
            coef: vec![0.0; n],
            order: Vec::with_capacity(n),
        }
    }
}

/// Adds the dependencies of every vertex on source `s` into `acc`.
fn single_source(graph: &BinaryGraph, s: usize, ws: &mut Workspace, acc: &mut [f64]) {
    let Workspace {
        dist,
        sigma,
        coef,
        order,
    } = ws;
    order.clear();
    order.push(s as u32);
    dist[s] = 0;
    sigma[s] = 1.0;

    let mut head = 0;
    while head < order.len() {
        let v = order[head] as usize;
        head += 1;
        let dv = dist[v];
        let sv = sigma[v];
        for &w in graph.neighbors(v) {
            let w = w as usize;
            if dist[w] < 0 {
                dist[w] = dv + 1;
                order.push(w as u32);
            }
            if dist[w] == dv + 1 {
                sigma[w] += sv;
            }
        }
    }

    // δ(v) = σ(v) · Σ_{w successor of v} (1 + δ(w)) / σ(w); the inner ratio
    // is kept in `coef` so each vertex only reads its successors.
    for &v in order.iter().rev() {
        let v = v as usize;
        let next = dist[v] + 1;
        let mut sum = 0.0;
        for &w in graph.neighbors(v) {
            if dist[w as usize] == next {
                sum += coef[w as usize];
            }
        }
        let delta = sigma[v] * sum;
        coef[v] = (1.0 + delta) / sigma[v];
        if v != s {
            acc[v] += delta;
        }
    }

    for &v in order.iter() {
        let v = v as usize;
        dist[v] = -1;
        sigma[v] = 0.0;
        coef[v] = 0.0;
    }
}

/// Unnormalized betweenness of every vertex.
///
/// Directed graphs sum over ordered pairs, undirected graphs over unordered
/// pairs. Pairs without a path contribute nothing.
pub fn betweenness(graph: &BinaryGraph) -> Vec<f64> {
    betweenness_with(graph, BetweennessMethod::Auto)
}

pub fn betweenness_with(graph: &BinaryGraph, method: BetweennessMethod) -> Vec<f64> {
    let n = graph.n();
    let use_dense = match method {
        BetweennessMethod::Auto => {
            let arcs: usize = (0..n).map(|v| graph.degree(v)).sum();
            n >= DENSE_MIN_ORDER && arcs as f64 >= DENSE_THRESHOLD * (n * n) as f64
        }
        BetweennessMethod::Sparse => false,
        BetweennessMethod::Dense => true,
    };
    let partials = if use_dense {
        let adj = dense::BitAdjacency::new(graph);
        map_indices(n.div_ceil(dense::BATCH), |b| {
            let mut acc = vec![0.0; n];
            dense::batch(&adj, b * dense::BATCH..n.min((b + 1) * dense::BATCH), &mut acc);
            acc
        })
    } else {
        map_indices(n.div_ceil(SOURCE_BLOCK), |b| {
            let mut ws = Workspace::new(n);
            let mut acc = vec![0.0; n];
            for s in b * SOURCE_BLOCK..n.min((b + 1) * SOURCE_BLOCK) {
                single_source(graph, s, &mut ws, &mut acc);
            }
            acc
        })
    };
    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    if !graph.is_directed() {
        for t in &mut total {
            *t /= 2.0;
        }
    }
    total
}

/// Freeman normalization: divide by the number of pairs not involving the
/// vertex, `(n−1)(n−2)` directed or half that undirected.
pub fn normalize_betweenness(scores: &[f64], directed: bool) -> Vec<f64> {
    let n = scores.len();
    if n < 3 {
        return vec![0.0; n];
    }
    let mut pairs = ((n - 1) * (n - 2)) as f64;
    if !directed {
        pairs /= 2.0;
    }
    scores.iter().map(|b| b / pairs).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CentralityVariant {
    /// Binarized citation graph, arcs from citing to cited journal.
    RawDirected,
    /// Binarized cosine (equivalently co-occurrence) graph of cited vectors.
    CosineCited,
    /// Binarized cosine (equivalently co-occurrence) graph of citing vectors.
    CosineCiting,
}

impl CentralityVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            CentralityVariant::RawDirected => "raw_directed",
            CentralityVariant::CosineCited => "cosine_cited",
            CentralityVariant::CosineCiting => "cosine_citing",
        }
    }

    pub fn cosine(direction: Direction) -> Self {
        match direction {
            Direction::Cited => CentralityVariant::CosineCited,
            Direction::Citing => CentralityVariant::CosineCiting,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CentralityResult {
    pub journal_id: usize,
    pub variant: CentralityVariant,
    pub betweenness: f64,
    pub normalized_betweenness: f64,
    pub indegree: usize,
    pub outdegree: usize,
}

/// Betweenness for the three distinct graph constructions.
///
/// Raw betweenness is a single column: a directed graph and its transpose
/// have identical betweenness, so cited and citing readings coincide.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralityTable {
    pub raw_directed: Vec<f64>,
    pub cosine_cited: Vec<f64>,
    pub cosine_citing: Vec<f64>,
    pub indegree: Vec<usize>,
    pub outdegree: Vec<usize>,
}

impl CentralityTable {
    pub fn scores(&self, variant: CentralityVariant) -> &[f64] {
        match variant {
            CentralityVariant::RawDirected => &self.raw_directed,
            CentralityVariant::CosineCited => &self.cosine_cited,
            CentralityVariant::CosineCiting => &self.cosine_citing,
        }
    }

    pub fn normalized(&self, variant: CentralityVariant) -> Vec<f64> {
        normalize_betweenness(self.scores(variant), variant == CentralityVariant::RawDirected)
    }

    pub fn results(&self, variant: CentralityVariant) -> Vec<CentralityResult> {
        let norm = self.normalized(variant);
        self.scores(variant)
            .iter()
            .zip(norm)
            .enumerate()
            .map(|(id, (&b, nb))| CentralityResult {
                journal_id: id,
                variant,
                betweenness: b,
                normalized_betweenness: nb,
                indegree: self.indegree[id],
                outdegree: self.outdegree[id],
            })
            .collect()
    }
}

/// All variants. With `cosine_threshold = 0` the cosine graphs are taken
/// from the co-occurrence support and no cosine matrix is materialized.
pub fn betweenness_all_variants(matrix: &CitationMatrix, cosine_threshold: f64) -> Result<CentralityTable> {
    let cited = cooccurrence(matrix, Direction::Cited)?;
    let citing = cooccurrence(matrix, Direction::Citing)?;
    Ok(betweenness_with_products(matrix, &cited, &citing, cosine_threshold))
}

/// As [`betweenness_all_variants`] with precomputed co-occurrence products.
pub fn betweenness_with_products(
    matrix: &CitationMatrix,
    cited: &CooccurrenceMatrix,
    citing: &CooccurrenceMatrix,
    cosine_threshold: f64,
) -> CentralityTable {
    let graph_of = |g: &CooccurrenceMatrix| {
        if cosine_threshold == 0.0 {
            g.support_graph()
        } else {
            g.cosine_graph(cosine_threshold)
        }
    };
    let n = matrix.n();
    CentralityTable {
        raw_directed: betweenness(&binarize_directed(matrix)),
        cosine_cited: betweenness(&graph_of(cited)),
        cosine_citing: betweenness(&graph_of(citing)),
        indegree: (0..n)
            .map(|i| off_diagonal_degree(matrix, i, Direction::Cited))
            .collect(),
        outdegree: (0..n)
            .map(|i| off_diagonal_degree(matrix, i, Direction::Citing))
            .collect(),
    }
}

fn off_diagonal_degree(matrix: &CitationMatrix, id: usize, direction: Direction) -> usize {
    let (idx, _) = matrix.slice(id, direction);
    idx.len() - usize::from(idx.binary_search(&(id as u32)).is_ok())
}

/// Degree (support without the diagonal) and total citations (with the
/// diagonal) of one journal vector. Cited gives indegree, citing outdegree.
pub fn degree(matrix: &CitationMatrix, id: usize, direction: Direction) -> Result<(usize, u64)> {
    if id >= matrix.n() {
        return Err(Error::UnknownJournal { id, n: matrix.n() });
    }
    let total = matrix.slice(id, direction).1.iter().sum();
    Ok((off_diagonal_degree(matrix, id, direction), total))
}
