//! Rao-Stirling diversity (quadratic entropy) of a journal's citation
//! distribution over a pairwise distance.

use alloc::vec::Vec;

use crate::corpus::{CitationMatrix, Direction};
use crate::netspace::{DistanceMetric, GramDistance, PairDistance, ProbabilityVector};
use crate::par::map_indices;
use crate::stats::{descriptive, Descriptive};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DiversityOptions {
    /// Count each unordered pair once instead of both orders (halves D).
    pub triangle_sum: bool,
    /// Drop the self-citation cell before normalizing `p`.
    pub exclude_self_citations_from_p: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaoStirling {
    pub value: f64,
    /// Pairs skipped because their distance is undefined.
    pub undefined_pairs: usize,
}

/// `D = Σ_{i≠j} p_i·p_j·d(i, j)` over the support of `p`.
///
/// Both orders of each pair are counted unless `triangle_sum` is set.
/// Undefined distances contribute nothing and are counted.
pub fn rao_stirling<D: PairDistance + ?Sized>(p: &ProbabilityVector, d: &D, triangle_sum: bool) -> Result<RaoStirling> {
    let sum = p.sum();
    if crate::math::abs(sum - 1.0) > 1e-9 {
        return Err(Error::NotNormalized { sum });
    }
    let mut total = 0.0;
    let mut undefined_pairs = 0;
    for a in 0..p.len() {
        let mut row = 0.0;
        for b in a + 1..p.len() {
            match d.distance(p.ids[a], p.ids[b]) {
                Some(dist) => row += p.probs[b] * dist,
                None => undefined_pairs += 1,
            }
        }
        total += p.probs[a] * row;
    }
    if !triangle_sum {
        total *= 2.0;
    }
    Ok(RaoStirling {
        value: total,
        undefined_pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiversityResult {
    pub journal_id: usize,
    pub direction: Direction,
    pub metric: DistanceMetric,
    /// `None` when the journal's vector is empty.
    pub d_value: Option<f64>,
    /// No off-diagonal mass: D is 0 by convention.
    pub degenerate: bool,
    pub undefined_pairs: usize,
}

/// Diversity of every journal in one direction under one metric.
pub fn diversity_all(
    matrix: &CitationMatrix,
    direction: Direction,
    metric: DistanceMetric,
    opts: DiversityOptions,
) -> Result<Vec<DiversityResult>> {
    let dist = GramDistance::new(matrix, direction, metric)?;
    diversity_with(matrix, direction, &dist, opts)
}

/// As [`diversity_all`] with a prepared distance; `dist` must be built on the
/// same direction's vectors.
pub fn diversity_with(
    matrix: &CitationMatrix,
    direction: Direction,
    dist: &GramDistance,
    opts: DiversityOptions,
) -> Result<Vec<DiversityResult>> {
    let metric = dist.metric();
    map_indices(matrix.n(), |id| {
        let v = matrix.vector(id, direction)?;
        let mut result = DiversityResult {
            journal_id: id,
            direction,
            metric,
            d_value: None,
            degenerate: false,
            undefined_pairs: 0,
        };
        if v.is_empty() {
            return Ok(result);
        }
        if v.off_diagonal_support() == 0 {
            result.d_value = Some(0.0);
            result.degenerate = true;
            return Ok(result);
        }
        let (ids, weights): (Vec<usize>, Vec<f64>) = v
            .iter()
            .filter(|&(j, _)| !(opts.exclude_self_citations_from_p && j == id))
            .map(|(j, c)| (j, c as f64))
            .unzip();
        let total: f64 = weights.iter().sum();
        let p = ProbabilityVector {
            ids,
            probs: weights.iter().map(|w| w / total).collect(),
        };
        let rs = rao_stirling(&p, dist, opts.triangle_sum)?;
        result.d_value = Some(rs.value);
        result.undefined_pairs = rs.undefined_pairs;
        Ok(result)
    })
    .into_iter()
    .collect()
}

/// Descriptive statistics of the defined D values.
pub fn diversity_summary(results: &[DiversityResult]) -> Result<Descriptive> {
    let values: Vec<f64> = results.iter().filter_map(|r| r.d_value).collect();
    descriptive(&values)
}
