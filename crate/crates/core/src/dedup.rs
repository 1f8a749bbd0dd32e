//! Near-duplicate detection: w-token shingling, 64-bit fingerprinting, and
//! exact Jaccard resemblance over fingerprint sets.
//!
//! Resemblance r(A, B) = |S(A) ∩ S(B)| / |S(A) ∪ S(B)| where S(D) is the
//! set of fingerprints of D's w-shingles. No sketching: corpora here are
//! small enough for exact all-pairs comparison.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::corpus::Corpus;

/// FNV-1a 64-bit offset basis.
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
/// FNV-1a 64-bit prime.
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
/// Byte placed between tokens so that ("a","b") and ("ab",) hash apart.
const TOKEN_SEPARATOR: u8 = 0x1f;

#[derive(Debug, Error)]
pub enum DedupError {
    #[error("window size must be at least 1")]
    ZeroWindow,
    #[error("shingle window mismatch: {0} vs {1}")]
    WindowMismatch(usize, usize),
    #[error("resemblance is undefined when both shingle sets are empty")]
    BothEmpty,
    #[error("threshold must lie in (0, 1], got {0}")]
    InvalidThreshold(f64),
}

/// All distinct contiguous w-token subsequences of `tokens`. Fewer than `w`
/// tokens yield the empty set.
pub fn shingles(tokens: &[String], w: usize) -> Result<BTreeSet<Vec<String>>, DedupError> {
    if w == 0 {
        return Err(DedupError::ZeroWindow);
    }
    if tokens.len() < w {
        return Ok(BTreeSet::new());
    }
    Ok(tokens.windows(w).map(<[String]>::to_vec).collect())
}

/// Deterministic 64-bit id for a shingle: FNV-1a over the tokens joined
/// with a single 0x1F separator byte.
pub fn fingerprint<S: AsRef<str>>(shingle: &[S]) -> u64 {
    let mut hash = FNV_OFFSET;
    let mut step = |byte: u8| {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(FNV_PRIME);
    };
    for (i, token) in shingle.iter().enumerate() {
        if i > 0 {
            step(TOKEN_SEPARATOR);
        }
        for &b in token.as_ref().as_bytes() {
            step(b);
        }
    }
    hash
}

/// The fingerprint set S(D) of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShingleSet {
    pub w: usize,
    pub prints: BTreeSet<u64>,
    pub source_doc: String,
}

impl ShingleSet {
    pub fn build(doc_id: &str, tokens: &[String], w: usize) -> Result<Self, DedupError> {
        let prints = shingles(tokens, w)?
            .iter()
            .map(|s| fingerprint(s))
            .collect();
        Ok(ShingleSet {
            w,
            prints,
            source_doc: doc_id.to_owned(),
        })
    }

    /// For tests and callers that already hold fingerprints.
    pub fn from_prints(doc_id: &str, w: usize, prints: BTreeSet<u64>) -> Self {
        ShingleSet {
            w,
            prints,
            source_doc: doc_id.to_owned(),
        }
    }

    pub fn len(&self) -> usize {
        self.prints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prints.is_empty()
    }
}

/// Exact Jaccard ratio of the two fingerprint sets.
pub fn resemblance(a: &ShingleSet, b: &ShingleSet) -> Result<f64, DedupError> {
    if a.w != b.w {
        return Err(DedupError::WindowMismatch(a.w, b.w));
    }
    if a.is_empty() && b.is_empty() {
        return Err(DedupError::BothEmpty);
    }
    let intersection = a.prints.intersection(&b.prints).count();
    let union = a.prints.len() + b.prints.len() - intersection;
    Ok(intersection as f64 / union as f64)
}

/// One reported near-duplicate pair, ids ordered ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DuplicatePair {
    pub doc_a: String,
    pub doc_b: String,
    pub resemblance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuplicateReport {
    pub pairs: Vec<DuplicatePair>,
    pub threshold: f64,
}

impl DuplicateReport {
    /// `doc_a<TAB>doc_b<TAB>resemblance` at six decimal places, sorted by
    /// descending resemblance then ids.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            out.push_str(&format!("{}\t{}\t{:.6}\n", p.doc_a, p.doc_b, p.resemblance));
        }
        out
    }
}

/// All unordered document pairs with resemblance at or above `threshold`.
/// Pairs where both documents have no shingles are skipped (resemblance is
/// undefined there).
pub fn find_near_duplicates(
    corpus: &Corpus,
    w: usize,
    threshold: f64,
) -> Result<DuplicateReport, DedupError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(DedupError::InvalidThreshold(threshold));
    }
    let sets: Vec<ShingleSet> = corpus
        .iter()
        .map(|doc| ShingleSet::build(&doc.doc_id, &doc.tokens, w))
        .collect::<Result<_, _>>()?;

    let mut pairs = Vec::new();
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            if sets[i].is_empty() && sets[j].is_empty() {
                continue;
            }
            let r = resemblance(&sets[i], &sets[j])?;
            if r >= threshold {
                pairs.push(DuplicatePair {
                    doc_a: sets[i].source_doc.clone(),
                    doc_b: sets[j].source_doc.clone(),
                    resemblance: r,
                });
            }
        }
    }
    pairs.sort_by(|a, b| {
        b.resemblance
            .partial_cmp(&a.resemblance)
            .expect("resemblance is finite")
            .then_with(|| a.doc_a.cmp(&b.doc_a))
            .then_with(|| a.doc_b.cmp(&b.doc_b))
    });
    Ok(DuplicateReport { pairs, threshold })
}
