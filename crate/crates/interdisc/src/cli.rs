//! Command-line interface.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use interdisc_core::corpus::canonical_name;
use interdisc_core::netspace::{cooccurrence, cosine_matrix, distance_matrix, DistanceMetric};
use interdisc_core::stats::{pca, rank_column, spearman_matrix, varimax, VarimaxOptions};
use interdisc_core::Direction;

use crate::config::{InputFormat, RunConfig, SubsetModeArg};
use crate::error::{CliError, CliResult};
use crate::io;
use crate::pipeline::{load_corpus, rank_order, run_indicators, Corpus, IndicatorRun};
use crate::report::{self, FactorReport, RankedRow, Ranking, ReportContext};
use crate::synth::{generate, SyntheticSpec};

#[derive(Debug, Parser)]
#[command(
    name = "interdisc",
    version,
    about = "Journal interdisciplinarity indicators from citation matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute all indicators and write one CSV per direction plus JSON.
    Indicators(CommonArgs),
    /// Rank journals by one indicator.
    Rank(RankArgs),
    /// Spearman correlations among indicators.
    Correlate(CorrelateArgs),
    /// Principal components with varimax rotation.
    Factor(FactorArgs),
    /// Indicators for a journal subset (ids file or metadata category).
    Subset(CommonArgs),
    /// Generate a synthetic corpus with planted structure.
    Synth(SynthArgs),
    /// Write a similarity, distance or co-occurrence matrix as Matrix Market.
    ExportMatrix(ExportArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Edge-list CSV (`citing,cited,count`) or Matrix Market file.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Journal names for a Matrix Market input, one per line.
    #[arg(long)]
    pub names: Option<PathBuf>,
    /// Metadata CSV: name,category,total_cites,impact_factor,immediacy.
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    /// `cited`, `citing` or both, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub directions: Option<Vec<Direction>>,
    /// Distance metrics for diversity: `one_minus_cosine`, `relative_euclidean`.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Option<Vec<DistanceMetric>>,
    /// Drop cells below this count after summing duplicates.
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Keep only cosine links strictly above this value.
    #[arg(long)]
    pub cosine_threshold: Option<f64>,
    /// Count zero cells in the Gini population.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub gini_include_zeros: Option<bool>,
    /// Sum diversity over one triangle of the distance matrix (halves D).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub triangle_sum: Option<bool>,
    /// Drop the self-citation cell from p before computing diversity.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub exclude_self_citations: Option<bool>,
    /// Keep single-entry journals in correlations and factor analysis.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_degenerate: Option<bool>,
    /// Restrict to the journals named in this file.
    #[arg(long)]
    pub ids: Option<PathBuf>,
    /// Restrict to a metadata category.
    #[arg(long)]
    pub category: Option<String>,
    /// `global` keeps whole-corpus vectors; `local` cuts the submatrix first.
    #[arg(long, value_enum)]
    pub subset_mode: Option<SubsetModeArg>,
    /// Output directory.
    #[arg(long, short)]
    pub outdir: Option<PathBuf>,
    /// Recorded in reports; only the synthetic generator draws random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Indicator column, e.g. `gini` or `rao_stirling_one_minus_cosine`.
    #[arg(long)]
    pub indicator: String,
    #[arg(long, default_value = "cited")]
    pub direction: Direction,
    /// Length of the ranked list.
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    /// Journal to add below the top list.
    #[arg(long = "append")]
    pub append: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Columns as `<indicator>_<direction>`; defaults to the main indicators.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Columns as `<indicator>_<direction>`; defaults to the main indicators.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Number of components to retain.
    #[arg(long, short = 'k')]
    pub factors: Option<usize>,
    /// Rotate without Kaiser row normalization.
    #[arg(long)]
    pub no_kaiser: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// JSON corpus description for the generator.
    #[arg(long, conflicts_with = "planted")]
    pub spec: Option<PathBuf>,
    /// Use the built-in three-cluster corpus with two bridges and a generalist.
    #[arg(long)]
    pub planted: bool,
    /// Overrides the seed in the corpus description.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, short, default_value = "out")]
    pub outdir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExportKind {
    Cosine,
    OneMinusCosine,
    RelativeEuclidean,
    Cooccurrence,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub kind: ExportKind,
    #[arg(long, default_value = "cited")]
    pub direction: Direction,
    /// Output file; defaults to `<outdir>/<kind>_<direction>.mtx`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl CommonArgs {
    /// Config file (if any) overlaid with the flags given.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($field:ident, $value:expr) => {
                if let Some(v) = $value.clone() {
                    c.$field = v;
                }
            };
        }
        if self.input.is_some() {
            c.input = self.input.clone();
        }
        if self.format.is_some() {
            c.input_format = self.format;
        }
        if self.names.is_some() {
            c.names = self.names.clone();
        }
        if self.metadata.is_some() {
            c.metadata = self.metadata.clone();
        }
        set!(directions, self.directions);
        set!(metrics, self.metrics);
        set!(min_count, self.min_count);
        set!(cosine_threshold, self.cosine_threshold);
        set!(gini_include_zeros, self.gini_include_zeros);
        set!(triangle_sum, self.triangle_sum);
        set!(exclude_self_citations_from_p, self.exclude_self_citations);
        set!(include_degenerate, self.include_degenerate);
        set!(outdir, self.outdir);
        set!(seed, self.seed);
        if self.ids.is_some() || self.category.is_some() || self.subset_mode.is_some() {
            let mut s = c.subset.take().unwrap_or_default();
            if self.ids.is_some() {
                s.ids_file = self.ids.clone();
                s.category = None;
            }
            if self.category.is_some() {
                s.category = self.category.clone();
                s.ids_file = None;
            }
            if let Some(m) = self.subset_mode {
                s.mode = m;
            }
            c.subset = Some(s);
        }
        let mut dirs = Vec::new();
        for d in Direction::BOTH {
            if c.directions.contains(&d) {
                dirs.push(d);
            }
        }
        c.directions = dirs;
        let mut metrics = Vec::new();
        for m in DistanceMetric::ALL {
            if c.metrics.contains(&m) {
                metrics.push(m);
            }
        }
        c.metrics = metrics;
        c.validate()?;
        Ok(c)
    }
}

fn prepare(cfg: &RunConfig) -> CliResult<Corpus> {
    let corpus = load_corpus(cfg)?;
    if let Some(m) = &corpus.metadata {
        if !m.unmatched.is_empty() {
            eprintln!("warning: {} metadata rows matched no journal", m.unmatched.len());
        }
    }
    std::fs::create_dir_all(&cfg.outdir).map_err(|e| CliError::io(&cfg.outdir, e))?;
    Ok(corpus)
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

pub fn cmd_indicators(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let corpus = prepare(cfg)?;
    let run = run_indicators(cfg, &corpus)?;
    let ctx = ReportContext {
        config: cfg,
        input_sha256: &corpus.input_sha256,
    };
    report::write_indicators(&ctx, &run, &cfg.outdir)
}

/// Builds the ranking of one indicator column of an indicator run.
pub fn build_ranking(
    run: &IndicatorRun,
    indicator: &str,
    direction: Direction,
    top: usize,
    include_degenerate: bool,
    append: &[String],
) -> CliResult<Ranking> {
    let d = run.direction(direction)?;
    let col = d.table.column(indicator).map_err(|_| {
        let known: Vec<&str> = d.table.column_names().collect();
        CliError::Usage(format!(
            "unknown indicator `{indicator}`; expected one of {}",
            known.join(", ")
        ))
    })?;
    let order = rank_order(indicator);
    let values = col.values(include_degenerate);
    let excluded = if include_degenerate {
        0
    } else {
        col.cells.iter().filter(|c| c.is_degenerate()).count()
    };
    let ranks = rank_column(&values, order);
    let mut present: Vec<usize> = (0..values.len()).filter(|&r| values[r].is_some()).collect();
    present.sort_by(|&a, &b| ranks[a].total_cmp(&ranks[b]).then(run.ids[a].cmp(&run.ids[b])));
    present.truncate(top);
    let row = |r: usize, appended: bool| RankedRow {
        rank: values[r].map(|_| ranks[r]),
        id: run.ids[r],
        journal: run.names[r].clone(),
        value: col.cells[r].value(),
        degenerate: col.cells[r].is_degenerate(),
        appended,
    };
    let mut rows: Vec<RankedRow> = present.iter().map(|&r| row(r, false)).collect();
    for name in append {
        let key = canonical_name(name);
        let r = run
            .names
            .iter()
            .position(|n| canonical_name(n) == key)
            .ok_or_else(|| CliError::Data(format!("cannot append unknown journal `{name}`")))?;
        if !present.contains(&r) {
            rows.push(row(r, true));
        }
    }
    let warning = values
        .iter()
        .all(Option::is_none)
        .then(|| "no journal has a usable value; all are degenerate or undefined".to_string());
    Ok(Ranking {
        indicator: indicator.to_string(),
        direction,
        order,
        rows,
        excluded_degenerate: excluded,
        warning,
    })
}

fn resolve_columns(run: &IndicatorRun, cfg: &RunConfig, requested: &[String]) -> Vec<String> {
    if requested.is_empty() {
        run.default_analysis_columns(&cfg.metrics)
    } else {
        requested.to_vec()
    }
}

fn cmd_rank(args: &RankArgs) -> CliResult<()> {
    let cfg = args.common.resolve()?;
    if !cfg.directions.contains(&args.direction) {
        return Err(CliError::Usage(format!(
            "direction `{}` is not among the configured directions",
            args.direction
        )));
    }
    let corpus = prepare(&cfg)?;
    let run = run_indicators(&cfg, &corpus)?;
    let ranking = build_ranking(
        &run,
        &args.indicator,
        args.direction,
        args.top,
        cfg.include_degenerate,
        &args.append,
    )?;
    if let Some(w) = &ranking.warning {
        eprintln!("warning: {w}");
    }
    let ctx = ReportContext {
        config: &cfg,
        input_sha256: &corpus.input_sha256,
    };
    let path = report::write_ranking(&ctx, &ranking, &cfg.outdir)?;
    print!("{}", report::ranking_text(&ranking));
    announce(&[path]);
    Ok(())
}

fn cmd_correlate(args: &CorrelateArgs) -> CliResult<()> {
    let cfg = args.common.resolve()?;
    let corpus = prepare(&cfg)?;
    let run = run_indicators(&cfg, &corpus)?;
    let table = run.combined_table()?;
    let cols = resolve_columns(&run, &cfg, &args.columns);
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let cm = spearman_matrix(&table, &refs, cfg.include_degenerate)?;
    let ctx = ReportContext {
        config: &cfg,
        input_sha256: &corpus.input_sha256,
    };
    let paths = report::write_correlations(&ctx, &cm, &cfg.outdir)?;
    print!("{}", report::correlation_text(&cm));
    announce(&paths);
    Ok(())
}

/// PCA plus varimax over the chosen columns of an indicator run.
pub fn build_factors(
    run: &IndicatorRun,
    columns: &[String],
    k: usize,
    include_degenerate: bool,
    kaiser_normalize: bool,
) -> CliResult<FactorReport> {
    let table = run.combined_table()?;
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let solution = pca(&table, &refs, k, include_degenerate)?;
    let rotated = varimax(
        &solution.loadings,
        VarimaxOptions {
            kaiser_normalize,
            ..Default::default()
        },
    );
    Ok(FactorReport {
        columns: columns.to_vec(),
        pca: solution,
        rotated,
        kaiser_normalize,
    })
}

fn cmd_factor(args: &FactorArgs) -> CliResult<()> {
    let mut cfg = args.common.resolve()?;
    if let Some(k) = args.factors {
        cfg.factors = k;
        cfg.validate()?;
    }
    let corpus = prepare(&cfg)?;
    let run = run_indicators(&cfg, &corpus)?;
    let cols = resolve_columns(&run, &cfg, &args.columns);
    let f = build_factors(&run, &cols, cfg.factors, cfg.include_degenerate, !args.no_kaiser)?;
    let ctx = ReportContext {
        config: &cfg,
        input_sha256: &corpus.input_sha256,
    };
    let path = report::write_factors(&ctx, &f, &cfg.outdir)?;
    print!("{}", report::factors_text(&f));
    announce(&[path]);
    Ok(())
}

fn cmd_subset(args: &CommonArgs) -> CliResult<()> {
    let cfg = args.resolve()?;
    if cfg.subset.is_none() {
        return Err(CliError::Usage("subset needs --ids or --category".into()));
    }
    announce(&cmd_indicators(&cfg)?);
    Ok(())
}

/// Writes `synth_edges.csv` and `synth_truth.json` into `outdir`.
pub fn cmd_synth(spec: &SyntheticSpec, outdir: &Path) -> CliResult<Vec<PathBuf>> {
    let corpus = generate(spec)?;
    std::fs::create_dir_all(outdir).map_err(|e| CliError::io(outdir, e))?;
    let edges = outdir.join("synth_edges.csv");
    io::write_edge_list(io::create(&edges)?, &corpus.registry, &corpus.matrix)?;
    let truth = outdir.join("synth_truth.json");
    let text = serde_json::to_string_pretty(&corpus.truth)?;
    std::fs::write(&truth, text + "\n").map_err(|e| CliError::io(&truth, e))?;
    Ok(vec![edges, truth])
}

fn run_synth(args: &SynthArgs) -> CliResult<()> {
    let mut spec = match (&args.spec, args.planted) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            serde_json::from_str::<SyntheticSpec>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        (None, true) => SyntheticSpec::planted(0),
        (None, false) => return Err(CliError::Usage("synth needs --spec or --planted".into())),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    announce(&cmd_synth(&spec, &args.outdir)?);
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> CliResult<()> {
    let cfg = args.common.resolve()?;
    let corpus = prepare(&cfg)?;
    let (m, d) = (&corpus.matrix, args.direction);
    let sym = match args.kind {
        ExportKind::Cosine => cosine_matrix(m, d),
        ExportKind::OneMinusCosine => distance_matrix(m, d, DistanceMetric::OneMinusCosine)?,
        ExportKind::RelativeEuclidean => distance_matrix(m, d, DistanceMetric::RelativeEuclidean)?,
        ExportKind::Cooccurrence => cooccurrence(m, d)?.to_value_matrix(),
    };
    let kind = args
        .kind
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| cfg.outdir.join(format!("{kind}_{d}.mtx")));
    io::write_symmetric(io::create(&path)?, &sym)?;
    announce(&[path]);
    Ok(())
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Indicators(a) => {
            let cfg = a.resolve()?;
            announce(&cmd_indicators(&cfg)?);
            Ok(())
        }
        Command::Rank(a) => cmd_rank(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Factor(a) => cmd_factor(a),
        Command::Subset(a) => cmd_subset(a),
        Command::Synth(a) => run_synth(a),
        Command::ExportMatrix(a) => cmd_export(a),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
