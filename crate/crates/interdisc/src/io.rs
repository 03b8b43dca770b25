//! File formats: edge-list CSV, Matrix Market coordinate files, metadata CSV
//! and journal-name lists.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use interdisc_core::corpus::{JournalMeta, MetadataRecord, MetadataReport};
use interdisc_core::netspace::{MatrixKind, SymmetricValueMatrix};
use interdisc_core::{CitationMatrix, JournalRegistry};

use crate::error::{CliError, CliResult};
use crate::report::format_float;

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn parse_err(line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("line {line}: {msg}"))
}

/// Reads a `citing,cited,count` CSV. Names are registered in order of first
/// appearance, citing column before cited column within a row.
pub fn read_edge_list<R: Read>(reader: R, min_count: u64) -> CliResult<(JournalRegistry, CitationMatrix)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(CliError::Data("empty corpus: edge list has no header".into())),
        Some(h) => h.map_err(|e| CliError::Data(format!("edge list header: {e}")))?,
    };
    let cols: Vec<String> = header.iter().map(str::to_ascii_lowercase).collect();
    if cols != ["citing", "cited", "count"] {
        return Err(parse_err(
            1,
            format!("expected header `citing,cited,count`, found `{}`", cols.join(",")),
        ));
    }

    let mut registry = JournalRegistry::new();
    let mut triplets = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e)
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(parse_err(line, format!("expected 3 fields, found {}", rec.len())));
        }
        if rec[0].is_empty() || rec[1].is_empty() {
            return Err(parse_err(line, "empty journal name"));
        }
        let count: u64 = rec[2]
            .parse()
            .map_err(|_| parse_err(line, format!("count `{}` is not a positive integer", &rec[2])))?;
        if count == 0 {
            return Err(parse_err(line, "count must be positive"));
        }
        let citing = registry.intern(&rec[0]);
        let cited = registry.intern(&rec[1]);
        triplets.push((cited, citing, count));
    }
    if triplets.is_empty() {
        return Err(CliError::Data("empty corpus: edge list has no rows".into()));
    }
    let matrix = CitationMatrix::from_triplets(registry.len(), triplets, min_count.max(1))?;
    Ok((registry, matrix))
}

pub fn load_edge_list(path: &Path, min_count: u64) -> CliResult<(JournalRegistry, CitationMatrix)> {
    read_edge_list(open(path)?, min_count).map_err(|e| e.context(path.display()))
}

/// Writes cells as `citing,cited,count`, citing-major.
pub fn write_edge_list<W: Write>(w: W, registry: &JournalRegistry, matrix: &CitationMatrix) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| CliError::Data(format!("writing edge list: {e}"));
    wtr.write_record(["citing", "cited", "count"]).map_err(io)?;
    for citing in 0..matrix.n() {
        let (ids, counts) = matrix.col(citing);
        for (&cited, &count) in ids.iter().zip(counts) {
            wtr.write_record([registry.name(citing), registry.name(cited as usize), &count.to_string()])
                .map_err(io)?;
        }
    }
    wtr.flush()
        .map_err(|e| CliError::Data(format!("writing edge list: {e}")))?;
    Ok(())
}

/// Reads a square `coordinate integer` Matrix Market file; row = cited,
/// column = citing. `general` and `symmetric` symmetry are accepted.
///
/// Journals are named `J<k>` (1-based) unless `names` is given.
pub fn read_matrix_market<R: BufRead>(
    reader: R,
    names: Option<Vec<String>>,
) -> CliResult<(JournalRegistry, CitationMatrix)> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));
    let (_, banner) = lines
        .next()
        .ok_or_else(|| CliError::Data("empty Matrix Market file".into()))?;
    let banner = banner.map_err(|e| CliError::Data(e.to_string()))?;
    let fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(parse_err(
            1,
            "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    if fields[3] != "integer" {
        return Err(parse_err(
            1,
            format!("unsupported field `{}`, expected integer", fields[3]),
        ));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut declared = 0usize;
    let mut triplets = Vec::new();
    for (line, text) in lines {
        let text = text.map_err(|e| CliError::Data(e.to_string()))?;
        let t = text.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(parse_err(line, "size line must be `rows cols entries`"));
                }
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(line, format!("bad size value `{s}`")))
                };
                let (r, c, e) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
                if r != c {
                    return Err(parse_err(
                        line,
                        format!("dimension error: matrix is {r}x{c}, not square"),
                    ));
                }
                size = Some((r, c));
                declared = e;
            }
            Some((n, _)) => {
                if parts.len() != 3 {
                    return Err(parse_err(line, "entry must be `row col value`"));
                }
                let idx = |s: &str| -> CliResult<usize> {
                    let v: usize = s.parse().map_err(|_| parse_err(line, format!("bad index `{s}`")))?;
                    if v == 0 || v > n {
                        return Err(parse_err(line, format!("index {v} outside 1..={n}")));
                    }
                    Ok(v - 1)
                };
                let (i, j) = (idx(parts[0])?, idx(parts[1])?);
                let v: i64 = parts[2]
                    .parse()
                    .map_err(|_| parse_err(line, format!("value `{}` is not an integer", parts[2])))?;
                if v < 0 {
                    return Err(parse_err(line, format!("value error: negative entry {v}")));
                }
                if symmetric && j > i {
                    return Err(parse_err(line, "symmetric storage expects the lower triangle"));
                }
                triplets.push((i, j, v as u64));
                if symmetric && i != j {
                    triplets.push((j, i, v as u64));
                }
            }
        }
    }
    let (n, _) = size.ok_or_else(|| CliError::Data("Matrix Market file has no size line".into()))?;
    let stored = if symmetric {
        triplets.iter().filter(|(i, j, _)| i >= j).count()
    } else {
        triplets.len()
    };
    if stored != declared {
        return Err(CliError::Data(format!(
            "Matrix Market header declares {declared} entries, found {stored}"
        )));
    }
    let registry = match names {
        Some(names) => {
            if names.len() != n {
                return Err(CliError::Data(format!(
                    "name list has {} entries for {n} journals",
                    names.len()
                )));
            }
            JournalRegistry::from_names(names)?
        }
        None => JournalRegistry::from_names((1..=n).map(|k| format!("J{k}")))?,
    };
    let matrix = CitationMatrix::from_triplets(n, triplets, 1)?;
    Ok((registry, matrix))
}

pub fn load_matrix_market(path: &Path, names: Option<&Path>) -> CliResult<(JournalRegistry, CitationMatrix)> {
    let names = names.map(load_name_list).transpose()?;
    read_matrix_market(open(path)?, names).map_err(|e| e.context(path.display()))
}

/// Writes a citation matrix as `coordinate integer general`.
pub fn write_matrix_market<W: Write>(mut w: W, matrix: &CitationMatrix) -> CliResult<()> {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate integer general\n");
    out.push_str("% rows: cited journals, columns: citing journals\n");
    out.push_str(&format!("{} {} {}\n", matrix.n(), matrix.n(), matrix.nnz()));
    for (i, j, v) in matrix.triplets() {
        out.push_str(&format!("{} {} {}\n", i + 1, j + 1, v));
    }
    w.write_all(out.as_bytes())
        .map_err(|e| CliError::Data(format!("writing matrix: {e}")))
}

/// Writes the lower triangle of a symmetric matrix. Co-occurrence counts are
/// written as integers and similarities omit zero cells; distance matrices
/// keep every defined cell, including zeros, so that an absent cell always
/// means "undefined".
pub fn write_symmetric<W: Write>(mut w: W, m: &SymmetricValueMatrix) -> CliResult<()> {
    let integer = m.kind() == MatrixKind::Cooccurrence;
    let keep_zeros = matches!(m.kind(), MatrixKind::OneMinusCosine | MatrixKind::EuclideanDistance);
    let mut body = String::new();
    let mut entries = 0usize;
    let mut undefined = 0usize;
    for i in 0..m.n() {
        for j in 0..=i {
            match m.get(i, j) {
                None => undefined += 1,
                Some(v) if v == 0.0 && !keep_zeros => {}
                Some(v) => {
                    entries += 1;
                    let cell = if integer {
                        format!("{}", v as u64)
                    } else {
                        format_float(v)
                    };
                    body.push_str(&format!("{} {} {}\n", i + 1, j + 1, cell));
                }
            }
        }
    }
    let field = if integer { "integer" } else { "real" };
    let mut out = format!("%%MatrixMarket matrix coordinate {field} symmetric\n");
    out.push_str(&format!("% kind: {}\n", m.kind().as_str()));
    if keep_zeros {
        out.push_str(&format!("% undefined cells omitted: {undefined}\n"));
    }
    out.push_str(&format!("{} {} {}\n", m.n(), m.n(), entries));
    out.push_str(&body);
    w.write_all(out.as_bytes())
        .map_err(|e| CliError::Data(format!("writing matrix: {e}")))
}

/// One name per line; blank lines and `#` comments are skipped.
pub fn read_name_list<R: BufRead>(reader: R) -> CliResult<Vec<String>> {
    let mut names = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| CliError::Data(e.to_string()))?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            names.push(t.to_string());
        }
    }
    Ok(names)
}

pub fn load_name_list(path: &Path) -> CliResult<Vec<String>> {
    read_name_list(open(path)?)
}

/// Reads `name,category,total_cites,impact_factor,immediacy`; trailing
/// fields and empty cells are optional.
pub fn read_metadata<R: Read>(reader: R) -> CliResult<Vec<MetadataRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| CliError::Data(format!("metadata header: {e}")))?
        .clone();
    const COLS: [&str; 5] = ["name", "category", "total_cites", "impact_factor", "immediacy"];
    if header.is_empty()
        || header.len() > COLS.len()
        || header.iter().zip(COLS).any(|(h, c)| !h.eq_ignore_ascii_case(c))
    {
        return Err(parse_err(1, format!("expected header prefix of `{}`", COLS.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() > COLS.len() {
            return Err(parse_err(line, format!("expected at most {} fields", COLS.len())));
        }
        let field = |k: usize| rec.get(k).filter(|s| !s.is_empty());
        let name = field(0).ok_or_else(|| parse_err(line, "missing journal name"))?;
        let real = |k: usize| -> CliResult<Option<f64>> {
            field(k)
                .map(|s| {
                    s.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite() && *v >= 0.0)
                        .ok_or_else(|| parse_err(line, format!("`{s}` is not a nonnegative number")))
                })
                .transpose()
        };
        let total_cites = field(2)
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| parse_err(line, format!("total_cites `{s}` is not a nonnegative integer")))
            })
            .transpose()?;
        out.push(MetadataRecord {
            name: name.to_string(),
            meta: JournalMeta {
                category: field(1).map(str::to_string),
                total_cites,
                impact_factor: real(3)?,
                immediacy: real(4)?,
            },
        });
    }
    Ok(out)
}

pub fn load_metadata(path: &Path, registry: &mut JournalRegistry) -> CliResult<MetadataReport> {
    let records = read_metadata(open(path)?).map_err(|e| e.context(path.display()))?;
    Ok(registry.attach_metadata(records)?)
}

/// Hex SHA-256 of a file's bytes.
pub fn sha256_file(path: &Path) -> CliResult<String> {
    let mut f = open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let k = f.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if k == 0 {
            break;
        }
        hasher.update(&buf[..k]);
    }
    Ok(hex::encode(hasher.finalize()))
}
