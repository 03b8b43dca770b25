//! Evaluation statistics over indicator tables: ranks, Spearman correlation,
//! descriptive statistics, principal components and varimax rotation.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::math::{abs, compensated_sum, sqrt};
use crate::{Error, Result};

/// One cell of an indicator column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Value(f64),
    /// Defined only by convention (e.g. a single-entry vector).
    Degenerate(f64),
    Missing,
}

impl Cell {
    pub fn value(self) -> Option<f64> {
        match self {
            Cell::Value(v) | Cell::Degenerate(v) => Some(v),
            Cell::Missing => None,
        }
    }

    pub fn is_degenerate(self) -> bool {
        matches!(self, Cell::Degenerate(_))
    }

    /// The value if usable for analysis under the degeneracy policy.
    pub fn analysis_value(self, include_degenerate: bool) -> Option<f64> {
        match self {
            Cell::Value(v) => Some(v),
            Cell::Degenerate(v) if include_degenerate => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorColumn {
    pub name: String,
    pub cells: Vec<Cell>,
}

impl IndicatorColumn {
    pub fn values(&self, include_degenerate: bool) -> Vec<Option<f64>> {
        self.cells
            .iter()
            .map(|c| c.analysis_value(include_degenerate))
            .collect()
    }
}

/// Journals (rows) by named indicators (columns).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndicatorTable {
    pub ids: Vec<usize>,
    columns: Vec<IndicatorColumn>,
}

impl IndicatorTable {
    pub fn new(ids: Vec<usize>) -> Self {
        Self {
            ids,
            columns: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.ids.len()
    }

    pub fn push_column(&mut self, name: impl Into<String>, cells: Vec<Cell>) -> Result<()> {
        if cells.len() != self.ids.len() {
            return Err(Error::ColumnLength {
                expected: self.ids.len(),
                got: cells.len(),
            });
        }
        let name = name.into();
        if self.columns.iter().any(|c| c.name == name) {
            return Err(Error::DuplicateName(name));
        }
        self.columns.push(IndicatorColumn { name, cells });
        Ok(())
    }

    pub fn columns(&self) -> &[IndicatorColumn] {
        &self.columns
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn column(&self, name: &str) -> Result<&IndicatorColumn> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.into()))
    }

    /// Row subset in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            ids: rows.iter().map(|&r| self.ids[r]).collect(),
            columns: self
                .columns
                .iter()
                .map(|c| IndicatorColumn {
                    name: c.name.clone(),
                    cells: rows.iter().map(|&r| c.cells[r]).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SortOrder {
    Ascending,
    Descending,
}

/// Fractional ranks (1-based, ties averaged) in the given order. Missing
/// values share the positions after all present ones.
pub fn rank_column(values: &[Option<f64>], order: SortOrder) -> Vec<f64> {
    let mut present: Vec<(usize, f64)> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|v| (i, v)))
        .collect();
    present.sort_by(|a, b| match order {
        SortOrder::Ascending => a.1.total_cmp(&b.1),
        SortOrder::Descending => b.1.total_cmp(&a.1),
    });
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < present.len() {
        let mut end = start + 1;
        while end < present.len() && present[end].1 == present[start].1 {
            end += 1;
        }
        let r = (start + 1 + end) as f64 / 2.0;
        for &(i, _) in &present[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    let m = present.len();
    let missing = values.len() - m;
    if missing > 0 {
        let r = (m + 1 + values.len()) as f64 / 2.0;
        for (i, v) in values.iter().enumerate() {
            if v.is_none() {
                ranks[i] = r;
            }
        }
    }
    ranks
}

/// Ascending fractional ranks of a complete column.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let wrapped: Vec<Option<f64>> = values.iter().map(|&v| Some(v)).collect();
    rank_column(&wrapped, SortOrder::Ascending)
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::ColumnLength {
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let syy = compensated_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant column"));
    }
    Ok((sxy / sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpearmanResult {
    pub rho: f64,
    /// Two-tailed, from `t = ρ·√((n−2)/(1−ρ²))` with `n − 2` degrees of freedom.
    pub p_value: f64,
    /// Pairs with both sides present.
    pub n: usize,
}

/// Spearman's rank correlation over pairwise-complete observations.
pub fn spearman(x: &[Option<f64>], y: &[Option<f64>]) -> Result<SpearmanResult> {
    if x.len() != y.len() {
        return Err(Error::ColumnLength {
            expected: x.len(),
            got: y.len(),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = x.iter().zip(y).filter_map(|(a, b)| Some(((*a)?, (*b)?))).unzip();
    let n = xs.len();
    if n < 3 {
        return Err(Error::TooFewObservations { needed: 3, have: n });
    }
    let rho = pearson(&average_ranks(&xs), &average_ranks(&ys))?;
    Ok(SpearmanResult {
        rho,
        p_value: correlation_p_value(rho, n),
        n,
    })
}

/// Two-tailed p-value of a correlation coefficient via Student's t.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    if n < 3 {
        return f64::NAN;
    }
    let df = (n - 2) as f64;
    let denom = 1.0 - r * r;
    if denom <= 0.0 {
        return 0.0;
    }
    let t2 = r * r * df / denom;
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2)).clamp(0.0, 1.0)
}

/// `I_x(a, b)` by Lentz's continued fraction.
pub(crate) fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b) + a * libm::log(x) + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if abs(d) < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=300 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if abs(d) < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if abs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if abs(del - 1.0) < EPS {
            break;
        }
    }
    h
}

/// `**` below 0.01, `*` below 0.05.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Symmetric correlation matrix with per-pair p-values and sample sizes.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    pub rho: Vec<Vec<f64>>,
    pub p_value: Vec<Vec<f64>>,
    pub n: Vec<Vec<usize>>,
}

/// Spearman correlations among `columns`, pairwise-complete.
pub fn spearman_matrix(
    table: &IndicatorTable,
    columns: &[&str],
    include_degenerate: bool,
) -> Result<CorrelationMatrix> {
    if columns.len() < 2 {
        return Err(Error::TooFewObservations {
            needed: 2,
            have: columns.len(),
        });
    }
    let data: Vec<Vec<Option<f64>>> = columns
        .iter()
        .map(|c| Ok(table.column(c)?.values(include_degenerate)))
        .collect::<Result<_>>()?;
    let k = columns.len();
    let mut rho = vec![vec![1.0; k]; k];
    let mut p_value = vec![vec![0.0; k]; k];
    let mut n = vec![vec![0; k]; k];
    for a in 0..k {
        n[a][a] = data[a].iter().filter(|v| v.is_some()).count();
        for b in a + 1..k {
            let r = spearman(&data[a], &data[b])?;
            rho[a][b] = r.rho;
            rho[b][a] = r.rho;
            p_value[a][b] = r.p_value;
            p_value[b][a] = r.p_value;
            n[a][b] = r.n;
            n[b][a] = r.n;
        }
    }
    Ok(CorrelationMatrix {
        columns: columns.iter().map(|c| c.to_string()).collect(),
        rho,
        p_value,
        n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Descriptive {
    pub n: usize,
    pub mean: f64,
    /// Square root of the sample variance.
    pub std_dev: f64,
    /// Sample variance, `n − 1` denominator (0 for a single value).
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    /// `max − min`.
    pub range: f64,
    /// Distance of the maximum from zero, i.e. `max`.
    pub range_from_zero: f64,
}

pub fn descriptive(values: &[f64]) -> Result<Descriptive> {
    if values.is_empty() {
        return Err(Error::Empty("descriptive statistics input"));
    }
    let n = values.len();
    let mean = compensated_sum(values.iter().copied()) / n as f64;
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    let variance = if n > 1 { ss / (n - 1) as f64 } else { 0.0 };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Descriptive {
        n,
        mean,
        std_dev: sqrt(variance),
        variance,
        min,
        max,
        range: max - min,
        range_from_zero: max,
    })
}

/// Listwise-complete Pearson correlation matrix of the given columns.
pub fn correlation_listwise(
    table: &IndicatorTable,
    columns: &[&str],
    include_degenerate: bool,
) -> Result<(DMatrix<f64>, usize)> {
    let data: Vec<Vec<Option<f64>>> = columns
        .iter()
        .map(|c| Ok(table.column(c)?.values(include_degenerate)))
        .collect::<Result<_>>()?;
    let complete: Vec<usize> = (0..table.rows())
        .filter(|&r| data.iter().all(|col| col[r].is_some()))
        .collect();
    if complete.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            have: complete.len(),
        });
    }
    let cols: Vec<Vec<f64>> = data
        .iter()
        .map(|col| complete.iter().map(|&r| col[r].unwrap_or_default()).collect())
        .collect();
    let k = columns.len();
    let mut corr = DMatrix::identity(k, k);
    for a in 0..k {
        for b in a + 1..k {
            let r = pearson(&cols[a], &cols[b])?;
            corr[(a, b)] = r;
            corr[(b, a)] = r;
        }
    }
    Ok((corr, complete.len()))
}

/// Unrotated principal-component loadings.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaSolution {
    /// All eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Indicators × k; column c is eigenvector c scaled by √λ_c.
    pub loadings: DMatrix<f64>,
    /// Percent of total variance per retained component.
    pub variance_explained: Vec<f64>,
    pub cumulative_explained: Vec<f64>,
    /// Observations used (listwise).
    pub n_obs: usize,
}

/// Flips each column so its largest-magnitude entry is positive.
fn fix_signs(m: &mut DMatrix<f64>, companion: Option<&mut DMatrix<f64>>) {
    let mut flips = Vec::new();
    for c in 0..m.ncols() {
        let col = m.column(c);
        let mut best = 0.0;
        for &v in col.iter() {
            if abs(v) > abs(best) {
                best = v;
            }
        }
        flips.push(best < 0.0);
    }
    for (c, &flip) in flips.iter().enumerate() {
        if flip {
            m.column_mut(c).neg_mut();
        }
    }
    if let Some(comp) = companion {
        for (c, &flip) in flips.iter().enumerate() {
            if flip {
                comp.column_mut(c).neg_mut();
            }
        }
    }
}

/// Principal components of a correlation matrix, keeping `k`.
pub fn pca_from_correlation(corr: &DMatrix<f64>, k: usize, n_obs: usize) -> Result<PcaSolution> {
    let p = corr.nrows();
    let eig = SymmetricEigen::new(corr.clone());
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let trace: f64 = (0..p).map(|i| corr[(i, i)]).sum();
    let rank = eigenvalues.iter().filter(|&&l| l > 1e-10 * trace.max(1.0)).count();
    if k == 0 || k > rank {
        return Err(Error::Rank { requested: k, rank });
    }
    let mut loadings = DMatrix::zeros(p, k);
    for (c, &i) in order.iter().take(k).enumerate() {
        let scale = sqrt(eig.eigenvalues[i].max(0.0));
        for r in 0..p {
            loadings[(r, c)] = eig.eigenvectors[(r, i)] * scale;
        }
    }
    fix_signs(&mut loadings, None);
    let variance_explained: Vec<f64> = eigenvalues[..k].iter().map(|l| 100.0 * l / trace).collect();
    Ok(PcaSolution {
        cumulative_explained: cumulative(&variance_explained),
        eigenvalues,
        loadings,
        variance_explained,
        n_obs,
    })
}

fn cumulative(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// PCA on the listwise Pearson correlation matrix of `columns`.
pub fn pca(table: &IndicatorTable, columns: &[&str], k: usize, include_degenerate: bool) -> Result<PcaSolution> {
    if k > columns.len() {
        return Err(Error::Rank {
            requested: k,
            rank: columns.len(),
        });
    }
    let (corr, n_obs) = correlation_listwise(table, columns, include_degenerate)?;
    pca_from_correlation(&corr, k, n_obs)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarimaxOptions {
    pub kaiser_normalize: bool,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for VarimaxOptions {
    fn default() -> Self {
        Self {
            kaiser_normalize: true,
            tol: 1e-6,
            max_iter: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotatedFactorSolution {
    /// Indicators × k rotated loadings (`input · rotation`).
    pub loadings: DMatrix<f64>,
    /// k × k orthogonal matrix.
    pub rotation: DMatrix<f64>,
    /// Percent of total variance (number of indicators) per rotated factor.
    pub variance_explained: Vec<f64>,
    pub cumulative_explained: Vec<f64>,
    pub k: usize,
    pub converged: bool,
    /// Full sweeps over all factor pairs.
    pub iterations: usize,
}

/// Varimax criterion: sum over factors of the variance of squared loadings.
pub fn varimax_criterion(loadings: &DMatrix<f64>) -> f64 {
    let p = loadings.nrows() as f64;
    loadings
        .column_iter()
        .map(|col| {
            let s2: f64 = col.iter().map(|v| v * v).sum();
            let s4: f64 = col.iter().map(|v| v * v * v * v).sum();
            s4 / p - (s2 / p) * (s2 / p)
        })
        .sum()
}

fn row_norms(m: &DMatrix<f64>) -> Vec<f64> {
    m.row_iter().map(|r| sqrt(r.iter().map(|v| v * v).sum())).collect()
}

fn rotate_pair(m: &mut DMatrix<f64>, a: usize, b: usize, cos: f64, sin: f64) {
    for r in 0..m.nrows() {
        let (x, y) = (m[(r, a)], m[(r, b)]);
        m[(r, a)] = cos * x + sin * y;
        m[(r, b)] = -sin * x + cos * y;
    }
}

/// Orthogonal varimax rotation by pairwise planar rotations.
///
/// With Kaiser normalization each row is scaled to unit length before
/// rotating and scaled back afterwards. Sweeps stop when the relative change
/// of the criterion falls below `tol`.
pub fn varimax(loadings: &DMatrix<f64>, opts: VarimaxOptions) -> RotatedFactorSolution {
    let (p, k) = (loadings.nrows(), loadings.ncols());
    let mut work = loadings.clone();
    let norms = row_norms(loadings);
    if opts.kaiser_normalize {
        for (r, &h) in norms.iter().enumerate() {
            if h > 0.0 {
                work.row_mut(r).unscale_mut(h);
            }
        }
    }
    let mut rotation = DMatrix::identity(k, k);
    let mut iterations = 0;
    let mut converged = k < 2;

    if k >= 2 {
        let pf = p as f64;
        let mut crit = varimax_criterion(&work);
        while iterations < opts.max_iter {
            iterations += 1;
            for a in 0..k - 1 {
                for b in a + 1..k {
                    let (mut sa, mut sb, mut sc, mut sd) = (0.0, 0.0, 0.0, 0.0);
                    for r in 0..p {
                        let (x, y) = (work[(r, a)], work[(r, b)]);
                        let u = x * x - y * y;
                        let v = 2.0 * x * y;
                        sa += u;
                        sb += v;
                        sc += u * u - v * v;
                        sd += 2.0 * u * v;
                    }
                    let num = sd - 2.0 * sa * sb / pf;
                    let den = sc - (sa * sa - sb * sb) / pf;
                    let phi = libm::atan2(num, den) / 4.0;
                    if phi == 0.0 {
                        continue;
                    }
                    let (sin, cos) = (libm::sin(phi), libm::cos(phi));
                    rotate_pair(&mut work, a, b, cos, sin);
                    rotate_pair(&mut rotation, a, b, cos, sin);
                }
            }
            let next = varimax_criterion(&work);
            let change = abs(next - crit);
            crit = next;
            if change <= opts.tol * abs(next).max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
    }

    if opts.kaiser_normalize {
        for (r, &h) in norms.iter().enumerate() {
            if h > 0.0 {
                work.row_mut(r).scale_mut(h);
            }
        }
    }
    if k >= 2 {
        fix_signs(&mut work, Some(&mut rotation));
    }
    let variance_explained: Vec<f64> = work
        .column_iter()
        .map(|c| 100.0 * c.iter().map(|v| v * v).sum::<f64>() / p.max(1) as f64)
        .collect();
    RotatedFactorSolution {
        cumulative_explained: cumulative(&variance_explained),
        loadings: work,
        rotation,
        variance_explained,
        k,
        converged,
        iterations,
    }
}
