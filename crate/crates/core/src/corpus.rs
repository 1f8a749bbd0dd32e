//! Corpus ingestion: canonical tokenization, link extraction, and
//! seed-driven breadth-first traversal of a linked document collection.
//!
//! The single ingestion source is a plain-text corpus file with one
//! document per line:
//!
//! ```text
//! doc_id<TAB>uri<TAB>comma-separated-outlink-doc_ids<TAB>raw text
//! ```
//!
//! Lines beginning with `#` are ignored. The outlink field may be empty.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::webgraph::WebGraph;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: duplicate doc_id {doc_id:?}")]
    DuplicateDocId { line: usize, doc_id: String },
    #[error("unknown seed {0:?}: not present in the corpus source")]
    UnknownSeed(String),
    #[error("crawl policy: max_docs must be positive")]
    ZeroMaxDocs,
}

/// One tokenized document together with its declared out-links.
///
/// `out_links` preserves the source record verbatim (file order, duplicates,
/// dangling targets included); deduplication happens at graph insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    pub uri: String,
    pub tokens: Vec<String>,
    pub out_links: Vec<String>,
}

/// An ingested document collection, iterated in doc_id order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    documents: BTreeMap<String, Document>,
}

impl Corpus {
    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.get(doc_id)
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.documents.contains_key(doc_id)
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Documents in ascending doc_id order.
    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.documents.values()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.documents.keys().map(String::as_str)
    }

    fn insert(&mut self, doc: Document) {
        self.documents.insert(doc.doc_id.clone(), doc);
    }

    /// Rebuilds a document store from every record of a source without
    /// traversal; used to reload persisted snapshots, where the ingestion
    /// pass already decided membership.
    pub fn from_source(source: &CorpusSource) -> Corpus {
        let mut corpus = Corpus::default();
        for record in source.records.values() {
            corpus.insert(Document {
                doc_id: record.doc_id.clone(),
                uri: record.uri.clone(),
                tokens: canonicalize(&record.text),
                out_links: record.out_links.clone(),
            });
        }
        corpus
    }

    /// Canonical snapshot in the corpus file format. The text field holds
    /// the canonical tokens joined by single spaces, so re-ingesting a
    /// snapshot reproduces the same corpus.
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        for doc in self.iter() {
            out.push_str(&doc.doc_id);
            out.push('\t');
            out.push_str(&doc.uri);
            out.push('\t');
            out.push_str(&doc.out_links.join(","));
            out.push('\t');
            out.push_str(&doc.tokens.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Traversal bounds for ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrawlPolicy {
    /// Maximum link distance from a seed (seeds are at depth 0).
    pub max_depth: usize,
    /// Maximum number of documents ingested; applied at dequeue time.
    pub max_docs: usize,
}

impl Default for CrawlPolicy {
    fn default() -> Self {
        CrawlPolicy {
            max_depth: usize::MAX,
            max_docs: usize::MAX,
        }
    }
}

/// Reduces raw text to its canonical token sequence: lowercase, then treat
/// every non-alphanumeric character as a separator. Two texts differing only
/// in case, punctuation, or whitespace map to the identical sequence, and
/// the reduction is idempotent.
pub fn canonicalize(raw_text: &str) -> Vec<String> {
    raw_text
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// One raw record of the corpus file, prior to tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub doc_id: String,
    pub uri: String,
    pub out_links: Vec<String>,
    pub text: String,
}

impl RawRecord {
    /// The declared out-link targets, in file order, duplicates preserved.
    pub fn extract_links(&self) -> &[String] {
        &self.out_links
    }
}

/// A parsed corpus file: the set of records ingestion can draw from.
#[derive(Debug, Clone, Default)]
pub struct CorpusSource {
    records: BTreeMap<String, RawRecord>,
}

impl CorpusSource {
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut records = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let record = parse_record(line, line_no)?;
            if records.contains_key(&record.doc_id) {
                return Err(CorpusError::DuplicateDocId {
                    line: line_no,
                    doc_id: record.doc_id,
                });
            }
            records.insert(record.doc_id.clone(), record);
        }
        Ok(CorpusSource { records })
    }

    pub fn get(&self, doc_id: &str) -> Option<&RawRecord> {
        self.records.get(doc_id)
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.records.contains_key(doc_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn parse_record(line: &str, line_no: usize) -> Result<RawRecord, CorpusError> {
    let fields: Vec<&str> = line.splitn(4, '\t').collect();
    if fields.len() != 4 {
        return Err(CorpusError::Malformed {
            line: line_no,
            msg: format!(
                "expected 4 tab-separated fields (doc_id, uri, outlinks, text), found {}",
                fields.len()
            ),
        });
    }
    let doc_id = fields[0];
    if doc_id.is_empty() {
        return Err(CorpusError::Malformed {
            line: line_no,
            msg: "empty doc_id".into(),
        });
    }
    if doc_id.contains(|c: char| c.is_whitespace() || c == ',') {
        return Err(CorpusError::Malformed {
            line: line_no,
            msg: format!("doc_id {doc_id:?} contains whitespace or a comma"),
        });
    }
    let mut out_links = Vec::new();
    for target in fields[2].split(',') {
        if target.is_empty() {
            continue;
        }
        if target.contains(|c: char| c.is_whitespace()) {
            return Err(CorpusError::Malformed {
                line: line_no,
                msg: format!("outlink target {target:?} contains whitespace"),
            });
        }
        out_links.push(target.to_owned());
    }
    Ok(RawRecord {
        doc_id: doc_id.to_owned(),
        uri: fields[1].to_owned(),
        out_links,
        text: fields[3].to_owned(),
    })
}

/// Result of ingestion: the document store, the web graph over ingested
/// documents, and the dangling link targets that were skipped because the
/// source does not contain them.
#[derive(Debug, Clone)]
pub struct IngestOutput {
    pub corpus: Corpus,
    pub graph: WebGraph,
    pub skipped_targets: BTreeSet<String>,
}

/// Breadth-first ingestion from `seeds`, following declared out-links.
///
/// The frontier is FIFO; children are enqueued in file order; each document
/// is visited at most once. `max_docs` is enforced at dequeue time and
/// `max_depth` bounds the link distance from the seeds. The resulting graph
/// has one node per ingested document and one edge per distinct
/// (source, target) pair whose target was ingested; self-links are dropped.
pub fn ingest(
    source: &CorpusSource,
    seeds: &[String],
    policy: &CrawlPolicy,
) -> Result<IngestOutput, CorpusError> {
    if policy.max_docs == 0 {
        return Err(CorpusError::ZeroMaxDocs);
    }
    for seed in seeds {
        if !source.contains(seed) {
            return Err(CorpusError::UnknownSeed(seed.clone()));
        }
    }

    let mut corpus = Corpus::default();
    let mut skipped = BTreeSet::new();
    let mut enqueued: BTreeSet<&str> = BTreeSet::new();
    let mut queue: VecDeque<(&str, usize)> = VecDeque::new();

    for seed in seeds {
        if enqueued.insert(seed.as_str()) {
            queue.push_back((seed.as_str(), 0));
        }
    }

    while let Some((doc_id, depth)) = queue.pop_front() {
        if corpus.len() == policy.max_docs {
            break;
        }
        let record = source.get(doc_id).expect("enqueued ids exist in source");
        corpus.insert(Document {
            doc_id: record.doc_id.clone(),
            uri: record.uri.clone(),
            tokens: canonicalize(&record.text),
            out_links: record.out_links.clone(),
        });
        if depth == policy.max_depth {
            continue;
        }
        for target in record.extract_links() {
            match source.get(target) {
                Some(child) => {
                    if enqueued.insert(&child.doc_id) {
                        queue.push_back((&child.doc_id, depth + 1));
                    }
                }
                None => {
                    skipped.insert(target.clone());
                }
            }
        }
    }

    let mut graph = WebGraph::new();
    for doc in corpus.iter() {
        graph.add_node(&doc.doc_id);
        for target in &doc.out_links {
            if corpus.contains(target) {
                graph.add_edge(&doc.doc_id, target);
            }
        }
    }

    Ok(IngestOutput {
        corpus,
        graph,
        skipped_targets: skipped,
    })
}
