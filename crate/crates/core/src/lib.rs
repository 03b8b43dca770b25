//! Citation-based interdisciplinarity indicators for journals.
//!
//! The crate works on an aggregated journal-journal citation matrix where
//! cell `(i, j)` counts citations from journal `j` (citing) to journal `i`
//! (cited). It provides:
//!
//! - [`corpus`]: journal registry, sparse citation matrix, per-journal vectors
//!   and subsetting.
//! - [`vector`]: Gini coefficient and Shannon entropy of a citation vector.
//! - [`netspace`]: co-occurrence products, cosine similarity, distances and
//!   binarized graphs.
//! - [`centrality`]: Brandes betweenness on binarized graphs, degrees.
//! - [`diversity`]: Rao-Stirling (quadratic entropy) diversity.
//! - [`stats`]: ranks, Spearman correlation, descriptive statistics, PCA and
//!   varimax rotation.
//!
//! The crate is `no_std` (it needs `alloc`). The `parallel` feature pulls in
//! `std` and `rayon` for multi-threaded betweenness, co-occurrence and
//! diversity; results are bitwise identical with and without it.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod centrality;
pub mod corpus;
pub mod diversity;
mod error;
pub(crate) mod math;
pub mod netspace;
mod par;
pub mod stats;
pub mod vector;

pub use error::{Error, Result};

pub use corpus::{CitationMatrix, Direction, JournalRegistry, JournalVector};
