//! Loading, indicator computation and analysis scopes.

use interdisc_core::centrality::{betweenness, normalize_betweenness};
use interdisc_core::corpus::{subset, AnalysisScope, MetadataReport, SubsetMode};
use interdisc_core::diversity::{diversity_with, DiversityOptions};
use interdisc_core::netspace::{binarize_directed, cooccurrence, DistanceMetric, GramDistance};
use interdisc_core::stats::{Cell, IndicatorTable, SortOrder};
use interdisc_core::vector::{vector_indicators, VectorOptions};
use interdisc_core::{CitationMatrix, Direction, JournalRegistry};

use crate::config::{InputFormat, RunConfig, SubsetModeArg};
use crate::error::{CliError, CliResult};
use crate::io;

pub struct Corpus {
    pub registry: JournalRegistry,
    pub matrix: CitationMatrix,
    pub input_sha256: String,
    pub metadata: Option<MetadataReport>,
}

pub fn load_corpus(cfg: &RunConfig) -> CliResult<Corpus> {
    let path = cfg.input_path()?;
    let input_sha256 = io::sha256_file(path)?;
    let (mut registry, matrix) = match cfg.resolved_format()? {
        InputFormat::EdgeList => io::load_edge_list(path, cfg.min_count)?,
        InputFormat::MatrixMarket => io::load_matrix_market(path, cfg.names.as_deref())?,
    };
    let metadata = match &cfg.metadata {
        Some(meta) => Some(io::load_metadata(meta, &mut registry)?),
        None => None,
    };
    Ok(Corpus {
        registry,
        matrix,
        input_sha256,
        metadata,
    })
}

/// Indicator column names for one direction, in report order.
pub fn indicator_columns(direction: Direction) -> [&'static str; 12] {
    [
        "gini",
        "gini_normalized",
        "entropy",
        "entropy_normalized",
        "betweenness_raw",
        "betweenness_raw_normalized",
        "betweenness_cosine",
        "betweenness_cosine_normalized",
        "rao_stirling_one_minus_cosine",
        "rao_stirling_relative_euclidean",
        match direction {
            Direction::Cited => "indegree",
            Direction::Citing => "outdegree",
        },
        "total",
    ]
}

fn diversity_column(metric: DistanceMetric) -> &'static str {
    match metric {
        DistanceMetric::OneMinusCosine => "rao_stirling_one_minus_cosine",
        DistanceMetric::RelativeEuclidean => "rao_stirling_relative_euclidean",
    }
}

/// Gini is ranked ascending (low means even); everything else descending.
pub fn rank_order(column: &str) -> SortOrder {
    if column.starts_with("gini") {
        SortOrder::Ascending
    } else {
        SortOrder::Descending
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineOptions {
    pub cosine_threshold: f64,
    pub vector: VectorOptions,
    pub diversity: DiversityOptions,
}

impl From<&RunConfig> for PipelineOptions {
    fn from(c: &RunConfig) -> Self {
        Self {
            cosine_threshold: c.cosine_threshold,
            vector: VectorOptions {
                gini_include_zeros: c.gini_include_zeros,
            },
            diversity: DiversityOptions {
                triangle_sum: c.triangle_sum,
                exclude_self_citations_from_p: c.exclude_self_citations_from_p,
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct DirectionIndicators {
    pub direction: Direction,
    pub support: Vec<usize>,
    pub empty: Vec<bool>,
    /// Single-entry vector.
    pub degenerate: Vec<bool>,
    /// No off-diagonal mass, so diversity is 0 by convention.
    pub diversity_degenerate: Vec<bool>,
    pub undefined_pairs: Vec<[usize; 2]>,
    pub table: IndicatorTable,
}

impl DirectionIndicators {
    fn select_rows(&self, rows: &[usize]) -> Self {
        let pick = |v: &Vec<bool>| rows.iter().map(|&r| v[r]).collect();
        Self {
            direction: self.direction,
            support: rows.iter().map(|&r| self.support[r]).collect(),
            empty: pick(&self.empty),
            degenerate: pick(&self.degenerate),
            diversity_degenerate: pick(&self.diversity_degenerate),
            undefined_pairs: rows.iter().map(|&r| self.undefined_pairs[r]).collect(),
            table: self.table.select_rows(rows),
        }
    }
}

/// All twelve indicators for each requested direction. Metrics that are not
/// requested leave their diversity column missing.
pub fn compute_indicators(
    matrix: &CitationMatrix,
    directions: &[Direction],
    metrics: &[DistanceMetric],
    opts: PipelineOptions,
) -> CliResult<Vec<DirectionIndicators>> {
    let n = matrix.n();
    let raw = betweenness(&binarize_directed(matrix));
    let raw_norm = normalize_betweenness(&raw, true);

    let mut out = Vec::new();
    for &direction in directions {
        let mut support = Vec::with_capacity(n);
        let mut vec_cells: [Vec<Cell>; 4] = Default::default();
        let mut degree = Vec::with_capacity(n);
        let mut total = Vec::with_capacity(n);
        for id in 0..n {
            let v = matrix.vector(id, direction)?;
            support.push(v.support_size());
            degree.push(Cell::Value((v.support_size() - usize::from(v.diagonal() > 0)) as f64));
            total.push(Cell::Value(v.total() as f64));
            if v.is_empty() {
                vec_cells.iter_mut().for_each(|c| c.push(Cell::Missing));
                continue;
            }
            let r = vector_indicators(&v, n, opts.vector)?;
            let wrap = |x: f64| {
                if r.degenerate {
                    Cell::Degenerate(x)
                } else {
                    Cell::Value(x)
                }
            };
            vec_cells[0].push(wrap(r.gini));
            vec_cells[1].push(wrap(r.gini_normalized));
            vec_cells[2].push(wrap(r.entropy_bits));
            vec_cells[3].push(wrap(r.entropy_normalized));
        }

        let gram = cooccurrence(matrix, direction)?;
        let graph = if opts.cosine_threshold == 0.0 {
            gram.support_graph()
        } else {
            gram.cosine_graph(opts.cosine_threshold)
        };
        let cos_bc = betweenness(&graph);
        drop(graph);
        let cos_norm = normalize_betweenness(&cos_bc, false);

        let mut dist = GramDistance::from_gram(matrix, gram, DistanceMetric::OneMinusCosine);
        let mut diversity_cells: [Vec<Cell>; 2] = [vec![Cell::Missing; n], vec![Cell::Missing; n]];
        let mut diversity_degenerate = vec![false; n];
        let mut undefined_pairs = vec![[0usize; 2]; n];
        for (slot, metric) in DistanceMetric::ALL.into_iter().enumerate() {
            if !metrics.contains(&metric) {
                continue;
            }
            dist.set_metric(metric);
            for r in diversity_with(matrix, direction, &dist, opts.diversity)? {
                let id = r.journal_id;
                diversity_degenerate[id] = r.degenerate;
                undefined_pairs[id][slot] = r.undefined_pairs;
                diversity_cells[slot][id] = match r.d_value {
                    None => Cell::Missing,
                    Some(d) if r.degenerate => Cell::Degenerate(d),
                    Some(d) => Cell::Value(d),
                };
            }
        }

        let values = |xs: &[f64]| xs.iter().map(|&x| Cell::Value(x)).collect::<Vec<_>>();
        let names = indicator_columns(direction);
        let [gini, gini_n, ent, ent_n] = vec_cells;
        let [d_cos, d_euc] = diversity_cells;
        let columns = [
            gini,
            gini_n,
            ent,
            ent_n,
            values(&raw),
            values(&raw_norm),
            values(&cos_bc),
            values(&cos_norm),
            d_cos,
            d_euc,
            degree,
            total,
        ];
        let mut table = IndicatorTable::new((0..n).collect());
        for (name, cells) in names.into_iter().zip(columns) {
            table.push_column(name, cells)?;
        }
        out.push(DirectionIndicators {
            direction,
            empty: support.iter().map(|&s| s == 0).collect(),
            degenerate: support.iter().map(|&s| s == 1).collect(),
            support,
            diversity_degenerate,
            undefined_pairs,
            table,
        });
    }
    Ok(out)
}

/// Indicator results for the rows of an analysis scope.
#[derive(Clone, Debug)]
pub struct IndicatorRun {
    /// `"full"`, `"global_context"` or `"local_submatrix"`.
    pub scope: &'static str,
    /// Journal names per row.
    pub names: Vec<String>,
    /// Ids in the loaded corpus per row.
    pub ids: Vec<usize>,
    pub directions: Vec<DirectionIndicators>,
    /// Metadata columns per row: total cites, impact factor, immediacy.
    pub metadata: Vec<[Option<f64>; 3]>,
}

fn resolve_subset(cfg: &RunConfig, registry: &JournalRegistry) -> CliResult<Option<(Vec<usize>, SubsetMode)>> {
    let Some(s) = &cfg.subset else {
        return Ok(None);
    };
    let ids = if let Some(path) = &s.ids_file {
        io::load_name_list(path)?
            .iter()
            .map(|name| {
                registry
                    .id_of(name)
                    .ok_or_else(|| CliError::Data(format!("subset: unknown journal `{name}`")))
            })
            .collect::<CliResult<Vec<_>>>()?
    } else {
        let cat = s.category.as_deref().unwrap_or_default();
        let ids = registry.ids_in_category(cat);
        if ids.is_empty() {
            return Err(CliError::Data(format!("subset: no journals in category `{cat}`")));
        }
        ids
    };
    let mode = match s.mode {
        SubsetModeArg::Global => SubsetMode::GlobalContext,
        SubsetModeArg::Local => SubsetMode::LocalSubmatrix,
    };
    Ok(Some((ids, mode)))
}

fn metadata_row(registry: &JournalRegistry, id: usize) -> [Option<f64>; 3] {
    let m = &registry.get(id).map(|j| j.meta.clone()).unwrap_or_default();
    [m.total_cites.map(|v| v as f64), m.impact_factor, m.immediacy]
}

pub fn run_indicators(cfg: &RunConfig, corpus: &Corpus) -> CliResult<IndicatorRun> {
    let opts = PipelineOptions::from(cfg);
    let full_rows = |reg: &JournalRegistry| -> (Vec<String>, Vec<usize>) {
        (
            reg.iter().map(|(_, j)| j.name.clone()).collect(),
            (0..reg.len()).collect(),
        )
    };
    match resolve_subset(cfg, &corpus.registry)? {
        None => {
            let directions = compute_indicators(&corpus.matrix, &cfg.directions, &cfg.metrics, opts)?;
            let (names, ids) = full_rows(&corpus.registry);
            Ok(IndicatorRun {
                scope: "full",
                metadata: ids.iter().map(|&i| metadata_row(&corpus.registry, i)).collect(),
                names,
                ids,
                directions,
            })
        }
        Some((ids, mode)) => match subset(&corpus.matrix, &corpus.registry, &ids, mode)? {
            AnalysisScope::Global { ids } => {
                let all = compute_indicators(&corpus.matrix, &cfg.directions, &cfg.metrics, opts)?;
                Ok(IndicatorRun {
                    scope: "global_context",
                    names: ids.iter().map(|&i| corpus.registry.name(i).to_string()).collect(),
                    metadata: ids.iter().map(|&i| metadata_row(&corpus.registry, i)).collect(),
                    directions: all.iter().map(|d| d.select_rows(&ids)).collect(),
                    ids,
                })
            }
            AnalysisScope::Local {
                registry,
                matrix,
                original_ids,
            } => {
                let directions = compute_indicators(&matrix, &cfg.directions, &cfg.metrics, opts)?;
                Ok(IndicatorRun {
                    scope: "local_submatrix",
                    names: full_rows(&registry).0,
                    metadata: (0..registry.len()).map(|i| metadata_row(&registry, i)).collect(),
                    ids: original_ids,
                    directions,
                })
            }
        },
    }
}

pub const METADATA_COLUMNS: [&str; 3] = ["total_cites", "impact_factor", "immediacy"];

impl IndicatorRun {
    pub fn direction(&self, d: Direction) -> CliResult<&DirectionIndicators> {
        self.directions
            .iter()
            .find(|x| x.direction == d)
            .ok_or_else(|| CliError::Usage(format!("direction `{d}` was not computed")))
    }

    /// One table over all directions with columns named `<indicator>_<direction>`,
    /// plus any metadata columns that have at least one value.
    pub fn combined_table(&self) -> CliResult<IndicatorTable> {
        let mut t = IndicatorTable::new(self.ids.clone());
        for d in &self.directions {
            for col in d.table.columns() {
                t.push_column(format!("{}_{}", col.name, d.direction), col.cells.clone())?;
            }
        }
        for (k, name) in METADATA_COLUMNS.iter().enumerate() {
            if self.metadata.iter().any(|m| m[k].is_some()) {
                let cells = self
                    .metadata
                    .iter()
                    .map(|m| m[k].map_or(Cell::Missing, Cell::Value))
                    .collect();
                t.push_column(*name, cells)?;
            }
        }
        Ok(t)
    }

    /// The correlation and factor-analysis default: per direction Gini,
    /// entropy, cosine betweenness, both diversities and total citations, plus
    /// the raw directed betweenness once.
    pub fn default_analysis_columns(&self, metrics: &[DistanceMetric]) -> Vec<String> {
        let mut cols = Vec::new();
        for (k, d) in self.directions.iter().enumerate() {
            let dir = d.direction;
            cols.push(format!("gini_{dir}"));
            cols.push(format!("entropy_{dir}"));
            if k == 0 {
                cols.push(format!("betweenness_raw_{dir}"));
            }
            cols.push(format!("betweenness_cosine_{dir}"));
            for m in DistanceMetric::ALL {
                if metrics.contains(&m) {
                    cols.push(format!("{}_{dir}", diversity_column(m)));
                }
            }
            cols.push(format!("total_{dir}"));
        }
        cols
    }
}
