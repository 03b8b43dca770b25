//! Journal registry, the sparse citation matrix and per-journal vectors.
//!
//! Cell convention: `(i, j)` holds the number of citations from articles in
//! journal `j` to journal `i`. Row `i` is therefore the *cited* vector of
//! journal `i` and column `j` the *citing* vector of journal `j`. The
//! diagonal holds journal self-citations.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Which slice of the citation matrix describes a journal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Row: who cites the journal.
    Cited,
    /// Column: whom the journal cites.
    Citing,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Cited, Direction::Citing];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Cited => "cited",
            Direction::Citing => "citing",
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Cited => Direction::Citing,
            Direction::Citing => Direction::Cited,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cited" => Ok(Direction::Cited),
            "citing" => Ok(Direction::Citing),
            _ => Err(Error::UnknownName(s.into())),
        }
    }
}

/// Trim and case-fold. No abbreviation expansion.
pub fn canonical_name(name: &str) -> String {
    name.trim().to_lowercase()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct JournalMeta {
    pub category: Option<String>,
    pub total_cites: Option<u64>,
    pub impact_factor: Option<f64>,
    pub immediacy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Journal {
    pub name: String,
    pub meta: JournalMeta,
}

/// Dense ids `0..n` to journal names plus optional metadata.
///
/// Ids are assigned in first-appearance order of the canonical name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JournalRegistry {
    journals: Vec<Journal>,
    index: BTreeMap<String, usize>,
}

/// One metadata row, keyed by journal name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetadataRecord {
    pub name: String,
    pub meta: JournalMeta,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MetadataReport {
    pub attached: usize,
    /// Names present in the metadata but not in the registry.
    pub unmatched: Vec<String>,
}

impl JournalRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a registry from names in id order; duplicates are rejected.
    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut reg = Self::new();
        for name in names {
            let name = name.as_ref();
            if reg.id_of(name).is_some() {
                return Err(Error::DuplicateName(name.trim().into()));
            }
            reg.intern(name);
        }
        Ok(reg)
    }

    /// Returns the id for `name`, registering it if new.
    pub fn intern(&mut self, name: &str) -> usize {
        let key = canonical_name(name);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.journals.len();
        self.journals.push(Journal {
            name: name.trim().into(),
            meta: JournalMeta::default(),
        });
        self.index.insert(key, id);
        id
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.index.get(&canonical_name(name)).copied()
    }

    pub fn len(&self) -> usize {
        self.journals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.journals.is_empty()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.journals[id].name
    }

    pub fn get(&self, id: usize) -> Option<&Journal> {
        self.journals.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Journal)> {
        self.journals.iter().enumerate()
    }

    /// Attaches metadata by canonical name.
    ///
    /// Unknown names are collected in the report and otherwise ignored. Two
    /// rows for the same journal are a conflict.
    pub fn attach_metadata<I>(&mut self, records: I) -> Result<MetadataReport>
    where
        I: IntoIterator<Item = MetadataRecord>,
    {
        let mut seen = BTreeMap::new();
        let mut pending = Vec::new();
        let mut report = MetadataReport::default();
        for rec in records {
            let key = canonical_name(&rec.name);
            if seen.insert(key, ()).is_some() {
                return Err(Error::MetadataConflict(rec.name.trim().into()));
            }
            match self.id_of(&rec.name) {
                Some(id) => pending.push((id, rec.meta)),
                None => report.unmatched.push(rec.name.trim().into()),
            }
        }
        report.attached = pending.len();
        for (id, meta) in pending {
            self.journals[id].meta = meta;
        }
        Ok(report)
    }

    /// Ids whose category equals `category` (trimmed, case-insensitive).
    pub fn ids_in_category(&self, category: &str) -> Vec<usize> {
        let want = canonical_name(category);
        self.iter()
            .filter(|(_, j)| j.meta.category.as_deref().is_some_and(|c| canonical_name(c) == want))
            .map(|(id, _)| id)
            .collect()
    }

    fn restrict(&self, ids: &[usize]) -> Self {
        let mut reg = Self::new();
        for &id in ids {
            let j = &self.journals[id];
            let new_id = reg.intern(&j.name);
            reg.journals[new_id].meta = j.meta.clone();
        }
        reg
    }
}

/// One compressed axis of the matrix (CSR for rows, CSC for columns).
#[derive(Clone, Debug, PartialEq, Eq)]
struct Compressed {
    ptr: Vec<usize>,
    idx: Vec<u32>,
    val: Vec<u64>,
}

impl Compressed {
    fn slice(&self, i: usize) -> (&[u32], &[u64]) {
        let r = self.ptr[i]..self.ptr[i + 1];
        (&self.idx[r.clone()], &self.val[r])
    }
}

/// Sparse square matrix of aggregated citation counts.
///
/// Stored in both row-major and column-major form so that cited and citing
/// vectors are equally cheap. Zero counts are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CitationMatrix {
    n: usize,
    rows: Compressed,
    cols: Compressed,
}

impl CitationMatrix {
    /// Builds the matrix from `(cited, citing, count)` triplets.
    ///
    /// Duplicate cells are summed; cells whose summed count is below
    /// `min_count` are dropped, as are zero counts.
    pub fn from_triplets<I>(n: usize, triplets: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::Overflow("journal count"));
        }
        let mut cells: Vec<(u32, u32, u64)> = Vec::new();
        for (cited, citing, count) in triplets {
            if cited >= n {
                return Err(Error::UnknownJournal { id: cited, n });
            }
            if citing >= n {
                return Err(Error::UnknownJournal { id: citing, n });
            }
            if count > 0 {
                cells.push((cited as u32, citing as u32, count));
            }
        }
        cells.sort_unstable_by_key(|&(r, c, _)| (r, c));

        let mut merged: Vec<(u32, u32, u64)> = Vec::with_capacity(cells.len());
        for (r, c, v) in cells {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => {
                    last.2 = last
                        .2
                        .checked_add(v)
                        .ok_or(Error::Overflow("duplicate cell summation"))?;
                }
                _ => merged.push((r, c, v)),
            }
        }
        let threshold = min_count.max(1);
        merged.retain(|&(_, _, v)| v >= threshold);
        Ok(Self::from_sorted_cells(n, &merged))
    }

    /// `cells` sorted by (row, col), unique, all positive.
    fn from_sorted_cells(n: usize, cells: &[(u32, u32, u64)]) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_ptr = vec![0usize; n + 1];
        for &(r, c, _) in cells {
            row_ptr[r as usize + 1] += 1;
            col_ptr[c as usize + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
            col_ptr[i + 1] += col_ptr[i];
        }
        let rows = Compressed {
            ptr: row_ptr,
            idx: cells.iter().map(|c| c.1).collect(),
            val: cells.iter().map(|c| c.2).collect(),
        };
        // Row-major order visits each column's entries in increasing row
        // order, so the scatter below leaves every column sorted.
        let mut next = col_ptr.clone();
        let mut cidx = vec![0u32; cells.len()];
        let mut cval = vec![0u64; cells.len()];
        for &(r, c, v) in cells {
            let slot = next[c as usize];
            cidx[slot] = r;
            cval[slot] = v;
            next[c as usize] += 1;
        }
        let cols = Compressed {
            ptr: col_ptr,
            idx: cidx,
            val: cval,
        };
        Self { n, rows, cols }
    }

    /// Number of journals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.rows.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nnz() == 0
    }

    pub fn get(&self, cited: usize, citing: usize) -> u64 {
        let (idx, val) = self.rows.slice(cited);
        match idx.binary_search(&(citing as u32)) {
            Ok(k) => val[k],
            Err(_) => 0,
        }
    }

    /// Row `i` as (citing ids, counts), ids ascending.
    pub fn row(&self, i: usize) -> (&[u32], &[u64]) {
        self.rows.slice(i)
    }

    /// Column `j` as (cited ids, counts), ids ascending.
    pub fn col(&self, j: usize) -> (&[u32], &[u64]) {
        self.cols.slice(j)
    }

    /// Row for [`Direction::Cited`], column for [`Direction::Citing`].
    pub fn slice(&self, id: usize, direction: Direction) -> (&[u32], &[u64]) {
        match direction {
            Direction::Cited => self.row(id),
            Direction::Citing => self.col(id),
        }
    }

    pub fn vector(&self, id: usize, direction: Direction) -> Result<JournalVector<'_>> {
        if id >= self.n {
            return Err(Error::UnknownJournal { id, n: self.n });
        }
        let (ids, counts) = self.slice(id, direction);
        Ok(JournalVector {
            owner: id,
            direction,
            ids,
            counts,
        })
    }

    /// Iterates `(cited, citing, count)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (idx, val) = self.row(i);
            idx.iter().zip(val).map(move |(&j, &v)| (i, j as usize, v))
        })
    }

    pub fn total(&self) -> u128 {
        self.rows.val.iter().map(|&v| v as u128).sum()
    }

    pub fn row_sums(&self) -> Vec<u128> {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|&v| v as u128).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u128> {
        (0..self.n)
            .map(|j| self.col(j).1.iter().map(|&v| v as u128).sum())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            n: self.n,
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
    }

    /// Restriction to `ids` on both axes; `ids` must be sorted and unique.
    fn submatrix(&self, ids: &[usize]) -> Self {
        let mut remap = vec![u32::MAX; self.n];
        for (new, &old) in ids.iter().enumerate() {
            remap[old] = new as u32;
        }
        let mut cells = Vec::new();
        for (new_r, &old_r) in ids.iter().enumerate() {
            let (idx, val) = self.row(old_r);
            for (&c, &v) in idx.iter().zip(val) {
                let nc = remap[c as usize];
                if nc != u32::MAX {
                    cells.push((new_r as u32, nc, v));
                }
            }
        }
        // Rows are visited in increasing new order and `ids` is sorted, so
        // remapped columns stay ascending within each row.
        Self::from_sorted_cells(ids.len(), &cells)
    }
}

/// One journal's cited or citing vector, borrowed from the matrix.
#[derive(Clone, Copy, Debug)]
pub struct JournalVector<'a> {
    pub owner: usize,
    pub direction: Direction,
    ids: &'a [u32],
    counts: &'a [u64],
}

impl<'a> JournalVector<'a> {
    pub fn ids(&self) -> &'a [u32] {
        self.ids
    }

    pub fn counts(&self) -> &'a [u64] {
        self.counts
    }

    /// Number of nonzero entries, the diagonal included.
    pub fn support_size(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Self-citation count, zero when absent.
    pub fn diagonal(&self) -> u64 {
        match self.ids.binary_search(&(self.owner as u32)) {
            Ok(k) => self.counts[k],
            Err(_) => 0,
        }
    }

    /// Support size without the diagonal cell.
    pub fn off_diagonal_support(&self) -> usize {
        self.support_size() - usize::from(self.diagonal() > 0)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u64)> + 'a {
        self.ids.iter().zip(self.counts).map(|(&i, &c)| (i as usize, c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetMode {
    /// Indicators computed on the full matrix, reporting restricted to the ids.
    GlobalContext,
    /// A fresh re-indexed matrix restricted to the ids on both axes.
    LocalSubmatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnalysisScope {
    Global {
        /// Sorted, unique ids into the full matrix.
        ids: Vec<usize>,
    },
    Local {
        registry: JournalRegistry,
        matrix: CitationMatrix,
        /// `original_ids[k]` is the full-matrix id of local journal `k`.
        original_ids: Vec<usize>,
    },
}

/// Restricts an analysis to a set of journals. Ids are sorted and
/// de-duplicated; local ids follow that order.
pub fn subset(
    matrix: &CitationMatrix,
    registry: &JournalRegistry,
    ids: &[usize],
    mode: SubsetMode,
) -> Result<AnalysisScope> {
    if ids.is_empty() {
        return Err(Error::Empty("subset id list"));
    }
    let n = matrix.n();
    if let Some(&bad) = ids.iter().find(|&&id| id >= n || id >= registry.len()) {
        return Err(Error::UnknownJournal { id: bad, n });
    }
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    Ok(match mode {
        SubsetMode::GlobalContext => AnalysisScope::Global { ids },
        SubsetMode::LocalSubmatrix => AnalysisScope::Local {
            registry: registry.restrict(&ids),
            matrix: matrix.submatrix(&ids),
            original_ids: ids,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fixture4() -> CitationMatrix {
        // cited \ citing
        //      0  1  2  3
        // 0 [  4  2  0  1 ]
        // 1 [  0  3  5  0 ]
        // 2 [  1  0  0  2 ]
        // 3 [  0  0  6  0 ]
        CitationMatrix::from_triplets(
            4,
            vec![
                (0, 0, 4),
                (0, 1, 2),
                (0, 3, 1),
                (1, 1, 3),
                (1, 2, 5),
                (2, 0, 1),
                (2, 3, 2),
                (3, 2, 6),
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn duplicate_cells_are_summed() {
        let m = CitationMatrix::from_triplets(2, vec![(0, 1, 3), (0, 1, 2)], 1).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), 5);
    }

    #[test]
    fn min_count_drops_after_summation() {
        // A cited by B once, by C four times.
        let m = CitationMatrix::from_triplets(3, vec![(0, 1, 1), (0, 2, 4)], 2).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 2), 4);
        let m = CitationMatrix::from_triplets(3, vec![(0, 1, 1), (0, 1, 1)], 2).unwrap();
        assert_eq!(m.get(0, 1), 2);
    }

    #[test]
    fn out_of_range_triplet_is_rejected() {
        let err = CitationMatrix::from_triplets(2, vec![(0, 2, 1)], 1).unwrap_err();
        assert_eq!(err, Error::UnknownJournal { id: 2, n: 2 });
    }

    #[test]
    fn overflow_in_summation_is_detected() {
        let err = CitationMatrix::from_triplets(1, vec![(0, 0, u64::MAX), (0, 0, 1)], 1);
        assert!(matches!(err, Err(Error::Overflow(_))));
    }

    #[test]
    fn slices_match_hand_read_values() {
        let m = fixture4();
        let v = m.vector(0, Direction::Cited).unwrap();
        assert_eq!(v.ids(), &[0, 1, 3]);
        assert_eq!(v.counts(), &[4, 2, 1]);
        let v = m.vector(2, Direction::Citing).unwrap();
        assert_eq!(v.ids(), &[1, 3]);
        assert_eq!(v.counts(), &[5, 6]);
        assert_eq!(m.row_sums(), vec![7, 8, 3, 6]);
        assert_eq!(m.col_sums(), vec![5, 5, 11, 3]);
        assert_eq!(m.total(), 24);
    }

    #[test]
    fn diagonal_only_journal_has_support_one() {
        let m = CitationMatrix::from_triplets(2, vec![(0, 0, 7)], 1).unwrap();
        let v = m.vector(0, Direction::Cited).unwrap();
        assert_eq!(v.support_size(), 1);
        assert_eq!(v.diagonal(), 7);
        assert_eq!(v.off_diagonal_support(), 0);
    }

    #[test]
    fn citing_direction_convention() {
        // Only cell (A, B): B cites A. A's citing vector is empty.
        let m = CitationMatrix::from_triplets(2, vec![(0, 1, 2)], 1).unwrap();
        assert!(m.vector(0, Direction::Citing).unwrap().is_empty());
        assert_eq!(m.vector(1, Direction::Citing).unwrap().counts(), &[2]);
    }

    #[test]
    fn vector_rejects_out_of_range() {
        let m = fixture4();
        assert!(m.vector(4, Direction::Cited).is_err());
    }

    #[test]
    fn registry_canonicalizes_names() {
        let mut r = JournalRegistry::new();
        let a = r.intern("  Nature ");
        let b = r.intern("NATURE");
        assert_eq!(a, b);
        assert_eq!(r.name(a), "Nature");
        assert!(JournalRegistry::from_names(["x", "X "]).is_err());
    }

    #[test]
    fn metadata_attach_and_unmatched() {
        let mut r = JournalRegistry::from_names(["J1", "J2"]).unwrap();
        let meta = JournalMeta {
            category: Some("LIS".into()),
            total_cites: Some(100),
            impact_factor: Some(1.5),
            immediacy: Some(0.2),
        };
        let rep = r
            .attach_metadata(vec![
                MetadataRecord {
                    name: "j1".into(),
                    meta: meta.clone(),
                },
                MetadataRecord {
                    name: "Unknown".into(),
                    meta: JournalMeta::default(),
                },
            ])
            .unwrap();
        assert_eq!(rep.attached, 1);
        assert_eq!(rep.unmatched, vec![String::from("Unknown")]);
        assert_eq!(r.get(0).unwrap().meta, meta);
        assert_eq!(r.ids_in_category("lis"), vec![0]);

        let dup = r.attach_metadata(vec![
            MetadataRecord {
                name: "J2".into(),
                meta: JournalMeta::default(),
            },
            MetadataRecord {
                name: "j2".into(),
                meta: JournalMeta::default(),
            },
        ]);
        assert!(matches!(dup, Err(Error::MetadataConflict(_))));
    }

    #[test]
    fn local_submatrix_keeps_intra_pair_cells() {
        let m = fixture4();
        let reg = JournalRegistry::from_names(["a", "b", "c", "d"]).unwrap();
        let scope = subset(&m, &reg, &[2, 0], SubsetMode::LocalSubmatrix).unwrap();
        let AnalysisScope::Local {
            matrix,
            registry,
            original_ids,
        } = scope
        else {
            panic!("expected local scope")
        };
        assert_eq!(original_ids, vec![0, 2]);
        assert_eq!(registry.name(1), "c");
        assert_eq!(matrix.n(), 2);
        assert_eq!(matrix.get(0, 0), 4);
        assert_eq!(matrix.get(1, 0), 1);
        assert_eq!(matrix.get(0, 1), 0);
        assert_eq!(matrix.nnz(), 2);
    }

    #[test]
    fn full_id_set_subset_is_identity() {
        let m = fixture4();
        let reg = JournalRegistry::from_names(["a", "b", "c", "d"]).unwrap();
        let scope = subset(&m, &reg, &[3, 1, 2, 0], SubsetMode::LocalSubmatrix).unwrap();
        let AnalysisScope::Local { matrix, registry, .. } = scope else {
            panic!()
        };
        assert_eq!(matrix, m);
        assert_eq!(registry, reg);
        let again = subset(&matrix, &registry, &[0, 1, 2, 3], SubsetMode::LocalSubmatrix).unwrap();
        let AnalysisScope::Local { matrix: again, .. } = again else {
            panic!()
        };
        assert_eq!(again, m);
    }

    #[test]
    fn subset_errors() {
        let m = fixture4();
        let reg = JournalRegistry::from_names(["a", "b", "c", "d"]).unwrap();
        assert!(subset(&m, &reg, &[], SubsetMode::GlobalContext).is_err());
        assert_eq!(
            subset(&m, &reg, &[9], SubsetMode::GlobalContext).unwrap_err(),
            Error::UnknownJournal { id: 9, n: 4 }
        );
    }
}
