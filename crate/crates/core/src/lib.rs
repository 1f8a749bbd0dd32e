//! A miniature web information-retrieval pipeline.
//!
//! The crate covers the full path from a linked document collection to
//! measured retrieval quality:
//!
//! - [`corpus`]: canonical tokenization and seed-driven breadth-first
//!   ingestion of a corpus file, producing the document store and the link
//!   graph.
//! - [`webgraph`]: the directed page graph with out-degree, back-link, and
//!   induced-subgraph accessors.
//! - [`ranking`]: query-independent PageRank (literal and normalized
//!   variants) and query-dependent hub/authority scoring.
//! - [`dedup`]: w-shingling, 64-bit fingerprinting, and exact Jaccard
//!   resemblance for near-duplicate detection.
//! - [`index`]: an inverted index plus a two-stage query processor mixing a
//!   text score with a link-based prior.
//! - [`evaluation`]: qrels/run files, precision/recall curves with
//!   interpolation, discounted cumulative gain, and pooling.
//!
//! Everything is deterministic: identical inputs produce byte-identical
//! artifacts, with no randomness, timestamps, or iteration-order surprises.
//!
//! ```
//! use webir::corpus::{ingest, CorpusSource, CrawlPolicy};
//! use webir::index::{build_index, normalize_query, search};
//! use webir::ranking::{pagerank, PageRankParams};
//!
//! let source = CorpusSource::parse(
//!     "a\tu:a\tb\tweb search engines\n\
//!      b\tu:b\ta\tranking web pages\n",
//! )?;
//! let ingested = ingest(&source, &["a".to_owned()], &CrawlPolicy::default())?;
//! let index = build_index(&ingested.corpus)?;
//! let prior = pagerank(&ingested.graph, &PageRankParams::default())?;
//! let hits = search(&index, &prior, &normalize_query("Web!"), 0.7, 10)?;
//! assert_eq!(hits.ranked.len(), 2);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod corpus;
pub mod dedup;
pub mod evaluation;
pub mod index;
pub mod ranking;
pub mod webgraph;

pub use corpus::{canonicalize, ingest, Corpus, CorpusSource, CrawlPolicy, Document};
pub use dedup::{find_near_duplicates, resemblance, shingles, DuplicateReport, ShingleSet};
pub use evaluation::{
    dcg_at_k, interpolated_precision, make_gain, pool, pr_curve, precision_at_k, recall_at_k,
    DiscountSpec, GainKind, GainSpec, Qrels, RunSet,
};
pub use index::{build_index, normalize_query, search, InvertedIndex, NormalizedQuery};
pub use ranking::{
    build_query_subgraph, hits, pagerank, HitsParams, HubAuthScores, PageRankParams,
    PageRankVariant, RankVector,
};
pub use webgraph::WebGraph;
