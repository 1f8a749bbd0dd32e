//! Inverted index over the corpus and the two-stage query processor: a
//! query-dependent text score (length-normalized term frequency) mixed with
//! a query-independent prior (PageRank) by a convex weight `alpha`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::{canonicalize, Corpus};
use crate::ranking::RankVector;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("cannot index an empty corpus")]
    EmptyCorpus,
    #[error("query is empty after normalization")]
    EmptyQuery,
    #[error("prior does not cover indexed document {0:?}")]
    PriorMissing(String),
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("index dump line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

/// Fully inverted file: token -> postings sorted by doc_id, plus document
/// token counts for length normalization.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvertedIndex {
    postings: BTreeMap<String, Vec<(String, u64)>>,
    doc_lengths: BTreeMap<String, u64>,
}

impl InvertedIndex {
    pub fn postings(&self, token: &str) -> Option<&[(String, u64)]> {
        self.postings.get(token).map(Vec::as_slice)
    }

    pub fn doc_length(&self, doc_id: &str) -> Option<u64> {
        self.doc_lengths.get(doc_id).copied()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.doc_lengths.keys().map(String::as_str)
    }

    /// Sorted vocabulary.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.postings.len()
    }

    pub fn doc_count(&self) -> usize {
        self.doc_lengths.len()
    }

    /// Token-sorted text serialization:
    /// `token<TAB>doc_id:tf,doc_id:tf,...`
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        for (token, plist) in &self.postings {
            out.push_str(token);
            out.push('\t');
            let entries: Vec<String> = plist.iter().map(|(d, tf)| format!("{d}:{tf}")).collect();
            out.push_str(&entries.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses a dump produced by [`InvertedIndex::to_dump`]. Document
    /// lengths are recovered as the sum of term frequencies, which equals
    /// the token count because every token is indexed.
    pub fn from_dump(text: &str) -> Result<Self, IndexError> {
        let mut postings: BTreeMap<String, Vec<(String, u64)>> = BTreeMap::new();
        let mut doc_lengths: BTreeMap<String, u64> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((token, rest)) = line.split_once('\t') else {
                return Err(IndexError::Malformed {
                    line: line_no,
                    msg: "expected `token<TAB>postings`".into(),
                });
            };
            let mut plist = Vec::new();
            for entry in rest.split(',') {
                let Some((doc, tf_raw)) = entry.rsplit_once(':') else {
                    return Err(IndexError::Malformed {
                        line: line_no,
                        msg: format!("posting {entry:?} is not `doc_id:tf`"),
                    });
                };
                let tf: u64 = tf_raw.parse().map_err(|_| IndexError::Malformed {
                    line: line_no,
                    msg: format!("bad term frequency {tf_raw:?}"),
                })?;
                if tf == 0 {
                    return Err(IndexError::Malformed {
                        line: line_no,
                        msg: format!("term frequency for {doc:?} must be at least 1"),
                    });
                }
                *doc_lengths.entry(doc.to_owned()).or_insert(0) += tf;
                plist.push((doc.to_owned(), tf));
            }
            plist.sort();
            if plist.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(IndexError::Malformed {
                    line: line_no,
                    msg: "a document appears twice in one posting list".into(),
                });
            }
            if postings.insert(token.to_owned(), plist).is_some() {
                return Err(IndexError::Malformed {
                    line: line_no,
                    msg: format!("token {token:?} appears on two lines"),
                });
            }
        }
        Ok(InvertedIndex {
            postings,
            doc_lengths,
        })
    }
}

/// Builds the complete postings for every token of every document.
pub fn build_index(corpus: &Corpus) -> Result<InvertedIndex, IndexError> {
    if corpus.is_empty() {
        return Err(IndexError::EmptyCorpus);
    }
    let mut postings: BTreeMap<String, Vec<(String, u64)>> = BTreeMap::new();
    let mut doc_lengths = BTreeMap::new();
    for doc in corpus.iter() {
        doc_lengths.insert(doc.doc_id.clone(), doc.tokens.len() as u64);
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for token in &doc.tokens {
            *counts.entry(token).or_insert(0) += 1;
        }
        for (token, tf) in counts {
            postings
                .entry(token.to_owned())
                .or_default()
                .push((doc.doc_id.clone(), tf));
        }
    }
    // corpus iteration is doc_id-ordered, so postings are already sorted
    Ok(InvertedIndex {
        postings,
        doc_lengths,
    })
}

/// A query put through the same canonicalization as document text.
/// Duplicate terms are preserved and each occurrence contributes to scoring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedQuery {
    pub terms: Vec<String>,
}

pub fn normalize_query(raw: &str) -> NormalizedQuery {
    NormalizedQuery {
        terms: canonicalize(raw),
    }
}

/// Query-dependent text scores: for every document containing at least one
/// query term, the sum over query term occurrences of tf(term, doc) divided
/// by the document length. Order is unspecified.
pub fn text_scores(index: &InvertedIndex, query: &NormalizedQuery) -> Vec<(String, f64)> {
    let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
    for term in &query.terms {
        if let Some(plist) = index.postings(term) {
            for (doc, tf) in plist {
                let len = index.doc_length(doc).expect("posting doc is indexed");
                *scores.entry(doc).or_insert(0.0) += *tf as f64 / len as f64;
            }
        }
    }
    scores.into_iter().map(|(d, s)| (d.to_owned(), s)).collect()
}

/// One result row: scores that produced the ranking, alongside the mix.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub combined_score: f64,
    pub text_score: f64,
    /// Prior after normalization to max 1 over the candidate set.
    pub prior_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub ranked: Vec<ScoredDoc>,
    pub alpha: f64,
}

/// Two-stage retrieval: candidates are documents containing at least one
/// query term (OR semantics); `combined = alpha * text + (1 - alpha) *
/// prior/max_prior`; the top `limit` are returned sorted by descending
/// combined score, ties by ascending doc_id.
pub fn search(
    index: &InvertedIndex,
    prior: &RankVector,
    query: &NormalizedQuery,
    alpha: f64,
    limit: usize,
) -> Result<SearchResult, IndexError> {
    if query.terms.is_empty() {
        return Err(IndexError::EmptyQuery);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(IndexError::InvalidAlpha(alpha));
    }
    for doc in index.doc_ids() {
        if !prior.scores.contains_key(doc) {
            return Err(IndexError::PriorMissing(doc.to_owned()));
        }
    }

    let candidates = text_scores(index, query);
    let max_prior = candidates
        .iter()
        .map(|(d, _)| prior.scores[d])
        .fold(0.0, f64::max);

    let mut rows: Vec<ScoredDoc> = candidates
        .into_iter()
        .map(|(doc_id, text_score)| {
            let prior_score = if max_prior > 0.0 {
                prior.scores[&doc_id] / max_prior
            } else {
                0.0
            };
            ScoredDoc {
                combined_score: alpha * text_score + (1.0 - alpha) * prior_score,
                text_score,
                prior_score,
                doc_id,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.combined_score
            .partial_cmp(&a.combined_score)
            .expect("scores are finite")
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    rows.truncate(limit);
    Ok(SearchResult {
        ranked: rows,
        alpha,
    })
}
