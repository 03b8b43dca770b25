//! Batched-source Brandes for dense graphs.
//!
//! A batch of sources advances one BFS level at a time. Path counts of the
//! next level are a product of the adjacency restricted to (unvisited rows ×
//! current frontier) with the frontier's counts, and the dependency pass is
//! the same product in reverse. Adjacency is stored as bit rows and expanded
//! into `f64` tiles just before each product.

use alloc::vec;
use alloc::vec::Vec;

use crate::netspace::BinaryGraph;

pub(super) const BATCH: usize = 256;
const TILE_ROWS: usize = 256;

pub(super) struct BitAdjacency {
    n: usize,
    words: usize,
    /// Row `v` holds bit `w` iff arc `v → w`.
    out: Vec<u64>,
    /// Transposed bits; empty for undirected graphs.
    inc: Vec<u64>,
}

impl BitAdjacency {
    pub(super) fn new(graph: &BinaryGraph) -> Self {
        let n = graph.n();
        let words = n.div_ceil(64);
        let mut out = vec![0u64; n * words];
        let mut inc = if graph.is_directed() {
            vec![0u64; n * words]
        } else {
            Vec::new()
        };
        for v in 0..n {
            for &w in graph.neighbors(v) {
                let w = w as usize;
                out[v * words + w / 64] |= 1 << (w % 64);
                if graph.is_directed() {
                    inc[w * words + v / 64] |= 1 << (v % 64);
                }
            }
        }
        Self { n, words, out, inc }
    }

    fn out_row(&self, v: usize) -> &[u64] {
        &self.out[v * self.words..(v + 1) * self.words]
    }

    fn in_row(&self, v: usize) -> &[u64] {
        if self.inc.is_empty() {
            self.out_row(v)
        } else {
            &self.inc[v * self.words..(v + 1) * self.words]
        }
    }
}

#[inline]
fn bit(row: &[u64], j: usize) -> f64 {
    ((row[j / 64] >> (j % 64)) & 1) as f64
}

/// `out[r, s] = Σ_k tile(rows[r], cols[k]) · rhs[k, s]`, with `tile` read from
/// `row_of(rows[r])`. `rhs` is `cols.len() × b` row-major; `out` is
/// `rows.len() × b` row-major.
fn masked_product<'a, F>(row_of: F, rows: &[usize], cols: &[usize], rhs: &[f64], b: usize, out: &mut [f64])
where
    F: Fn(usize) -> &'a [u64],
{
    let k = cols.len();
    if rows.is_empty() {
        return;
    }
    if k == 0 {
        out.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let tile_rows = TILE_ROWS.min(rows.len());
    let mut tile = vec![0.0f64; tile_rows * k];
    for (chunk, dst) in rows.chunks(TILE_ROWS).zip(out.chunks_mut(TILE_ROWS * b)) {
        for (r, &v) in chunk.iter().enumerate() {
            let bits = row_of(v);
            let line = &mut tile[r * k..(r + 1) * k];
            for (slot, &c) in line.iter_mut().zip(cols) {
                *slot = bit(bits, c);
            }
        }
        // SAFETY: the tile is `chunk.len() × k`, rhs `k × b` and dst
        // `chunk.len() × b`, all row-major with the strides given.
        unsafe {
            matrixmultiply::dgemm(
                chunk.len(),
                k,
                b,
                1.0,
                tile.as_ptr(),
                k as isize,
                1,
                rhs.as_ptr(),
                b as isize,
                1,
                0.0,
                dst.as_mut_ptr(),
                b as isize,
                1,
            );
        }
    }
}

/// Adds the dependencies of every vertex on each source in `sources` into
/// `acc`.
pub(super) fn batch(adj: &BitAdjacency, sources: core::ops::Range<usize>, acc: &mut [f64]) {
    let n = adj.n;
    let b = sources.len();
    let mut dist = vec![-1i32; n * b];
    let mut sigma = vec![0.0f64; n * b];
    let mut levels: Vec<Vec<usize>> = Vec::new();

    let mut frontier: Vec<usize> = sources.clone().collect();
    for (s, v) in sources.clone().enumerate() {
        dist[v * b + s] = 0;
        sigma[v * b + s] = 1.0;
    }
    frontier.sort_unstable();

    let mut depth = 0i32;
    let mut rhs = Vec::new();
    let mut prod = Vec::new();
    while !frontier.is_empty() {
        let unvisited: Vec<usize> = (0..n)
            .filter(|&w| dist[w * b..(w + 1) * b].iter().any(|&d| d < 0))
            .collect();
        levels.push(core::mem::take(&mut frontier));
        if unvisited.is_empty() {
            break;
        }
        let current = levels.last().map(Vec::as_slice).unwrap_or_default();
        rhs.clear();
        for &v in current {
            for s in 0..b {
                let i = v * b + s;
                rhs.push(if dist[i] == depth { sigma[i] } else { 0.0 });
            }
        }
        prod.clear();
        prod.resize(unvisited.len() * b, 0.0);
        masked_product(|w| adj.in_row(w), &unvisited, current, &rhs, b, &mut prod);
        for (r, &w) in unvisited.iter().enumerate() {
            let mut reached = false;
            for s in 0..b {
                let i = w * b + s;
                let p = prod[r * b + s];
                if dist[i] < 0 && p > 0.0 {
                    dist[i] = depth + 1;
                    sigma[i] = p;
                    reached = true;
                }
            }
            if reached {
                frontier.push(w);
            }
        }
        depth += 1;
    }

    // Dependency pass, deepest level first. `coef = (1 + δ) / σ`.
    let mut coef = vec![0.0f64; n * b];
    for d in (0..levels.len()).rev() {
        let here = &levels[d];
        let depth = d as i32;
        let next: &[usize] = levels.get(d + 1).map(Vec::as_slice).unwrap_or_default();
        rhs.clear();
        for &w in next {
            for s in 0..b {
                let i = w * b + s;
                rhs.push(if dist[i] == depth + 1 { coef[i] } else { 0.0 });
            }
        }
        prod.clear();
        prod.resize(here.len() * b, 0.0);
        masked_product(|v| adj.out_row(v), here, next, &rhs, b, &mut prod);
        for (r, &v) in here.iter().enumerate() {
            for s in 0..b {
                let i = v * b + s;
                if dist[i] != depth {
                    continue;
                }
                let delta = sigma[i] * prod[r * b + s];
                coef[i] = (1.0 + delta) / sigma[i];
                if v != sources.start + s {
                    acc[v] += delta;
                }
            }
        }
    }
}
