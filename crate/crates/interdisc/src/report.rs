//! CSV and JSON report writers.
//!
//! Every report starts with the resolved configuration and the SHA-256 of the
//! input file. Reals are printed with nine significant digits.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use interdisc_core::stats::{
    significance_stars, Cell, CorrelationMatrix, PcaSolution, RotatedFactorSolution, SortOrder,
};
use interdisc_core::Direction;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::create;
use crate::pipeline::{IndicatorRun, METADATA_COLUMNS};

/// Loadings below this magnitude are left blank in printed tables.
pub const LOADING_DISPLAY_THRESHOLD: f64 = 0.1;

/// Rounds to nine significant digits.
pub fn round9(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return if v == 0.0 { 0.0 } else { v };
    }
    format!("{v:.8e}").parse().unwrap_or(v)
}

/// Shortest decimal text of `v` rounded to nine significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    format!("{}", round9(v))
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(round9(v)).map_or(Value::Null, Value::Number)
}

fn cell_text(c: Cell) -> String {
    c.value().map(format_float).unwrap_or_default()
}

fn cell_json(c: Cell) -> Value {
    c.value().map_or(Value::Null, num)
}

pub struct ReportContext<'a> {
    pub config: &'a RunConfig,
    pub input_sha256: &'a str,
}

impl ReportContext<'_> {
    fn header(&self, title: &str, notes: &[&str]) -> String {
        let mut s = format!("# interdisc {title}\n");
        s.push_str(&format!("# input_sha256: {}\n", self.input_sha256));
        s.push_str(&format!("# config: {}\n", self.config.to_json()));
        for n in notes {
            s.push_str(&format!("# {n}\n"));
        }
        s
    }

    fn provenance(&self) -> Value {
        json!({
            "input_sha256": self.input_sha256,
            "config": serde_json::to_value(self.config).unwrap_or(Value::Null),
        })
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, header: &str, rows: Vec<Vec<String>>) -> CliResult<()> {
    let mut out = create(path)?;
    out.write_all(header.as_bytes()).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.write_record(&r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn write_json(path: &Path, v: &Value) -> CliResult<()> {
    let mut out = create(path)?;
    let text = serde_json::to_string_pretty(v)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}

const INDICATOR_NOTES: [&str; 3] = [
    "betweenness_raw is one directed-graph column; cited and citing readings coincide and both files carry it",
    "empty cells: indicator undefined (empty vector); degenerate rows carry conventional zeros",
    "degree columns exclude the self-citation cell; total includes it",
];

/// `indicators_<direction>.csv` per direction plus `indicators.json`.
pub fn write_indicators(ctx: &ReportContext, run: &IndicatorRun, outdir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let has_meta: Vec<bool> = (0..3).map(|k| run.metadata.iter().any(|m| m[k].is_some())).collect();
    let mut json_dirs = Vec::new();
    for d in &run.directions {
        let cols: Vec<&str> = d.table.column_names().collect();
        let mut head = vec![
            "id",
            "journal",
            "support_size",
            "empty",
            "degenerate",
            "diversity_degenerate",
        ];
        head.extend(cols.iter().copied());
        for (k, m) in METADATA_COLUMNS.iter().enumerate() {
            if has_meta[k] {
                head.push(m);
            }
        }
        let mut rows = vec![head.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
        let mut json_rows = Vec::new();
        for r in 0..run.ids.len() {
            let mut row = vec![
                run.ids[r].to_string(),
                run.names[r].clone(),
                d.support[r].to_string(),
                d.empty[r].to_string(),
                d.degenerate[r].to_string(),
                d.diversity_degenerate[r].to_string(),
            ];
            let mut values = Map::new();
            for col in d.table.columns() {
                row.push(cell_text(col.cells[r]));
                values.insert(col.name.clone(), cell_json(col.cells[r]));
            }
            for (k, m) in METADATA_COLUMNS.iter().enumerate() {
                if has_meta[k] {
                    row.push(run.metadata[r][k].map(format_float).unwrap_or_default());
                    values.insert(m.to_string(), run.metadata[r][k].map_or(Value::Null, num));
                }
            }
            rows.push(row);
            json_rows.push(json!({
                "id": run.ids[r],
                "journal": run.names[r],
                "support_size": d.support[r],
                "empty": d.empty[r],
                "degenerate": d.degenerate[r],
                "diversity_degenerate": d.diversity_degenerate[r],
                "undefined_distance_pairs": {
                    "one_minus_cosine": d.undefined_pairs[r][0],
                    "relative_euclidean": d.undefined_pairs[r][1],
                },
                "values": values,
            }));
        }
        let path = outdir.join(format!("indicators_{}.csv", d.direction));
        let title = format!("indicators direction={} scope={}", d.direction, run.scope);
        write_csv(&path, &ctx.header(&title, &INDICATOR_NOTES), rows)?;
        written.push(path);
        json_dirs.push(json!({
            "direction": d.direction.as_str(),
            "columns": cols,
            "rows": json_rows,
        }));
    }
    let path = outdir.join("indicators.json");
    write_json(
        &path,
        &json!({
            "report": "indicators",
            "scope": run.scope,
            "provenance": ctx.provenance(),
            "notes": INDICATOR_NOTES,
            "directions": json_dirs,
        }),
    )?;
    written.push(path);
    Ok(written)
}

pub struct RankedRow {
    pub rank: Option<f64>,
    pub id: usize,
    pub journal: String,
    pub value: Option<f64>,
    pub degenerate: bool,
    pub appended: bool,
}

pub struct Ranking {
    pub indicator: String,
    pub direction: Direction,
    pub order: SortOrder,
    pub rows: Vec<RankedRow>,
    pub excluded_degenerate: usize,
    pub warning: Option<String>,
}

impl Ranking {
    pub fn file_name(&self) -> String {
        format!("ranking_{}_{}.csv", self.indicator, self.direction)
    }
}

pub fn write_ranking(ctx: &ReportContext, r: &Ranking, outdir: &Path) -> CliResult<PathBuf> {
    let order = match r.order {
        SortOrder::Ascending => "ascending",
        SortOrder::Descending => "descending",
    };
    let mut notes = vec![
        format!("indicator: {} direction: {} order: {order}", r.indicator, r.direction),
        format!("degenerate journals excluded: {}", r.excluded_degenerate),
    ];
    if let Some(w) = &r.warning {
        notes.push(format!("warning: {w}"));
    }
    let note_refs: Vec<&str> = notes.iter().map(String::as_str).collect();
    let mut rows = vec![["rank", "id", "journal", "value", "degenerate", "note"]
        .map(String::from)
        .to_vec()];
    for row in &r.rows {
        rows.push(vec![
            row.rank.map(format_float).unwrap_or_default(),
            row.id.to_string(),
            row.journal.clone(),
            row.value.map(format_float).unwrap_or_default(),
            row.degenerate.to_string(),
            if row.appended { "appended".into() } else { String::new() },
        ]);
    }
    let path = outdir.join(r.file_name());
    write_csv(&path, &ctx.header("ranking", &note_refs), rows)?;
    Ok(path)
}

pub fn ranking_text(r: &Ranking) -> String {
    let mut s = format!(
        "{} ({}), top {}\n",
        r.indicator,
        r.direction,
        r.rows.iter().filter(|x| !x.appended).count()
    );
    for row in &r.rows {
        let rank = row.rank.map(format_float).unwrap_or_else(|| "-".into());
        let mark = if row.appended { "  (appended)" } else { "" };
        s.push_str(&format!(
            "{rank:>6}  {:<40} {}{mark}\n",
            row.journal,
            row.value.map(format_float).unwrap_or_default()
        ));
    }
    if let Some(w) = &r.warning {
        s.push_str(&format!("warning: {w}\n"));
    }
    s
}

fn correlation_cell(cm: &CorrelationMatrix, i: usize, j: usize) -> String {
    if i == j {
        return "1".into();
    }
    format!("{}{}", format_float(cm.rho[i][j]), significance_stars(cm.p_value[i][j]))
}

const CORRELATION_NOTES: [&str; 3] = [
    "Spearman rho, pairwise-complete observations; ** p < 0.01, * p < 0.05 (two-tailed)",
    "per-pair n and exact p-values are in correlations.json",
    "degenerate journals excluded unless include_degenerate is set",
];

pub fn write_correlations(ctx: &ReportContext, cm: &CorrelationMatrix, outdir: &Path) -> CliResult<Vec<PathBuf>> {
    let k = cm.columns.len();
    let mut head = vec!["indicator".to_string()];
    head.extend(cm.columns.iter().cloned());
    let mut rows = vec![head];
    for i in 0..k {
        let mut row = vec![cm.columns[i].clone()];
        row.extend((0..k).map(|j| correlation_cell(cm, i, j)));
        rows.push(row);
    }
    let csv_path = outdir.join("correlations.csv");
    write_csv(&csv_path, &ctx.header("correlations", &CORRELATION_NOTES), rows)?;

    let grid = |f: &dyn Fn(usize, usize) -> Value| -> Value {
        Value::Array(
            (0..k)
                .map(|i| Value::Array((0..k).map(|j| f(i, j)).collect()))
                .collect(),
        )
    };
    let json_path = outdir.join("correlations.json");
    write_json(
        &json_path,
        &json!({
            "report": "correlations",
            "method": "spearman",
            "deletion": "pairwise",
            "provenance": ctx.provenance(),
            "columns": cm.columns,
            "rho": grid(&|i, j| num(cm.rho[i][j])),
            "p_value": grid(&|i, j| num(cm.p_value[i][j])),
            "n": grid(&|i, j| json!(cm.n[i][j])),
            "stars": grid(&|i, j| json!(if i == j { "" } else { significance_stars(cm.p_value[i][j]) })),
        }),
    )?;
    Ok(vec![csv_path, json_path])
}

pub fn correlation_text(cm: &CorrelationMatrix) -> String {
    let k = cm.columns.len();
    let w = cm.columns.iter().map(String::len).max().unwrap_or(0).max(8);
    let mut s = format!("{:w$}", "");
    for c in &cm.columns {
        s.push_str(&format!(" {:>14}", truncate(c, 14)));
    }
    s.push('\n');
    for i in 0..k {
        s.push_str(&format!("{:w$}", cm.columns[i]));
        for j in 0..k {
            let cell = if i == j {
                "1".to_string()
            } else {
                format!("{:.3}{}", cm.rho[i][j], significance_stars(cm.p_value[i][j]))
            };
            s.push_str(&format!(" {cell:>14}"));
        }
        s.push('\n');
    }
    s.push_str("** p < 0.01, * p < 0.05 (two-tailed)\n");
    s
}

fn truncate(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}

pub struct FactorReport {
    pub columns: Vec<String>,
    pub pca: PcaSolution,
    pub rotated: RotatedFactorSolution,
    pub kaiser_normalize: bool,
}

fn matrix_json(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| Value::Array(r.iter().map(|&v| num(v)).collect()))
            .collect(),
    )
}

fn display_loadings(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array(
        m.row_iter()
            .map(|r| {
                Value::Array(
                    r.iter()
                        .map(|&v| {
                            if v.abs() < LOADING_DISPLAY_THRESHOLD {
                                json!("")
                            } else {
                                json!(format!("{v:.3}"))
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn write_factors(ctx: &ReportContext, f: &FactorReport, outdir: &Path) -> CliResult<PathBuf> {
    let nums = |xs: &[f64]| Value::Array(xs.iter().map(|&x| num(x)).collect());
    let path = outdir.join("factors.json");
    write_json(
        &path,
        &json!({
            "report": "factors",
            "extraction": "principal components of the Pearson correlation matrix",
            "rotation": if f.kaiser_normalize { "varimax with Kaiser normalization" } else { "varimax" },
            "deletion": "listwise",
            "provenance": ctx.provenance(),
            "columns": f.columns,
            "k": f.rotated.k,
            "n_obs": f.pca.n_obs,
            "eigenvalues": nums(&f.pca.eigenvalues),
            "unrotated": {
                "loadings": matrix_json(&f.pca.loadings),
                "variance_explained_percent": nums(&f.pca.variance_explained),
                "cumulative_percent": nums(&f.pca.cumulative_explained),
            },
            "rotated": {
                "loadings": matrix_json(&f.rotated.loadings),
                "rotation_matrix": matrix_json(&f.rotated.rotation),
                "variance_explained_percent": nums(&f.rotated.variance_explained),
                "cumulative_percent": nums(&f.rotated.cumulative_explained),
                "converged": f.rotated.converged,
                "iterations": f.rotated.iterations,
                "display": display_loadings(&f.rotated.loadings),
                "display_threshold": LOADING_DISPLAY_THRESHOLD,
            },
        }),
    )?;
    Ok(path)
}

pub fn factors_text(f: &FactorReport) -> String {
    let k = f.rotated.k;
    let w = f.columns.iter().map(String::len).max().unwrap_or(0).max(8);
    let mut s = String::from("Rotated component matrix\n");
    s.push_str(&format!("{:w$}", ""));
    for c in 1..=k {
        s.push_str(&format!(" {c:>8}"));
    }
    s.push('\n');
    for (i, name) in f.columns.iter().enumerate() {
        s.push_str(&format!("{name:w$}"));
        for c in 0..k {
            let v = f.rotated.loadings[(i, c)];
            let cell = if v.abs() < LOADING_DISPLAY_THRESHOLD {
                String::new()
            } else {
                format!("{v:.3}")
            };
            s.push_str(&format!(" {cell:>8}"));
        }
        s.push('\n');
    }
    let cum = f.rotated.cumulative_explained.last().copied().unwrap_or(0.0);
    s.push_str(&format!(
        "Extraction: principal components. Rotation: {}.\n",
        if f.kaiser_normalize {
            "varimax with Kaiser normalization"
        } else {
            "varimax"
        }
    ));
    if f.rotated.converged {
        s.push_str(&format!("Rotation converged in {} iterations.\n", f.rotated.iterations));
    } else {
        s.push_str(&format!(
            "Rotation did not converge in {} iterations.\n",
            f.rotated.iterations
        ));
    }
    s.push_str(&format!("{k} components explain {cum:.1}% of the variance.\n"));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(2.0f64.sqrt()), "1.41421356");
        assert_eq!(format_float(123456789012.0), "123456789000");
        assert_eq!(format_float(-0.000123456789123), "-0.000123456789");
        assert_eq!(format_float(f64::NAN), "");
        assert_eq!(round9(-0.0), 0.0);
    }
}
