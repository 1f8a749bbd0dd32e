//! Test-collection evaluation: qrels and run files, precision/recall at
//! rank cutoffs, precision-recall curves with interpolation, discounted
//! cumulative gain, and pooling.
//!
//! Precision and recall are computed in exact rational arithmetic
//! ([`Fraction`]) and converted to decimals only at output, so identities
//! like `precision@k * k = recall@k * R` hold exactly.
//!
//! File formats (whitespace-separated fields):
//! - qrels: `topic iter doc_id grade` (iter ignored on read, written as 0)
//! - run:   `topic Q0 doc_id rank score tag`

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use thiserror::Error;

pub type Fraction = Ratio<u64>;

pub fn fraction_to_f64(f: Fraction) -> f64 {
    *f.numer() as f64 / *f.denom() as f64
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: duplicate judgment for topic {topic} doc {doc_id}")]
    DuplicateJudgment {
        line: usize,
        topic: String,
        doc_id: String,
    },
    #[error("line {line}: duplicate document {doc_id} in topic {topic}")]
    DuplicateRunDoc {
        line: usize,
        topic: String,
        doc_id: String,
    },
    #[error("line {line}: duplicate rank {rank} in topic {topic}")]
    DuplicateRank {
        line: usize,
        topic: String,
        rank: u64,
    },
    #[error("line {line}: run tag {found:?} conflicts with {expected:?}")]
    InconsistentTag {
        line: usize,
        expected: String,
        found: String,
    },
    #[error("topic {topic}: scores increase from rank {rank} to {next}")]
    ScoresNotNonincreasing {
        topic: String,
        rank: usize,
        next: usize,
    },
    #[error("topic {0} has no relevant document; recall is undefined")]
    NoRelevantDocuments(String),
    #[error("rank cutoff must be at least 1")]
    InvalidCutoff,
    #[error("pool depth must be at least 1")]
    InvalidPoolDepth,
    #[error("gain specification: {0}")]
    InvalidGain(String),
}

/// Per-topic graded relevance judgments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
    grade_scale: u32,
}

impl Qrels {
    pub fn insert(&mut self, topic: &str, doc_id: &str, grade: u32) -> Result<(), EvalError> {
        let by_doc = self.judgments.entry(topic.to_owned()).or_default();
        if by_doc.contains_key(doc_id) {
            return Err(EvalError::DuplicateJudgment {
                line: 0,
                topic: topic.to_owned(),
                doc_id: doc_id.to_owned(),
            });
        }
        by_doc.insert(doc_id.to_owned(), grade);
        self.grade_scale = self.grade_scale.max(grade);
        Ok(())
    }

    /// Grade for (topic, doc); unjudged documents count as grade 0.
    pub fn grade(&self, topic: &str, doc_id: &str) -> u32 {
        self.judgments
            .get(topic)
            .and_then(|m| m.get(doc_id))
            .copied()
            .unwrap_or(0)
    }

    /// Binary relevance: grade >= 1.
    pub fn is_relevant(&self, topic: &str, doc_id: &str) -> bool {
        self.grade(topic, doc_id) >= 1
    }

    /// Number of known relevant documents for the topic.
    pub fn relevant_count(&self, topic: &str) -> u64 {
        self.judgments
            .get(topic)
            .map(|m| m.values().filter(|g| **g >= 1).count() as u64)
            .unwrap_or(0)
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn judged_count(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    /// Declared maximum grade (the top of the relevance scale).
    pub fn grade_scale(&self) -> u32 {
        self.grade_scale
    }

    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut qrels = Qrels::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(EvalError::Malformed {
                    line: line_no,
                    msg: format!(
                        "expected `topic iter doc_id grade`, found {} fields",
                        fields.len()
                    ),
                });
            }
            let grade: u32 = fields[3].parse().map_err(|_| EvalError::Malformed {
                line: line_no,
                msg: format!("bad grade {:?}", fields[3]),
            })?;
            qrels
                .insert(fields[0], fields[2], grade)
                .map_err(|e| match e {
                    EvalError::DuplicateJudgment { topic, doc_id, .. } => {
                        EvalError::DuplicateJudgment {
                            line: line_no,
                            topic,
                            doc_id,
                        }
                    }
                    other => other,
                })?;
        }
        Ok(qrels)
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        for (topic, by_doc) in &self.judgments {
            for (doc, grade) in by_doc {
                out.push_str(&format!("{topic} 0 {doc} {grade}\n"));
            }
        }
        out
    }
}

/// One retrieved document with its retrieval score.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedDoc {
    pub doc_id: String,
    pub score: f64,
}

/// A system's ranked output over a set of topics; rank is implied by
/// position, starting at 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSet {
    tag: String,
    topics: BTreeMap<String, Vec<RankedDoc>>,
}

impl RunSet {
    pub fn new(tag: &str) -> Self {
        RunSet {
            tag: tag.to_owned(),
            topics: BTreeMap::new(),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn topics(&self) -> impl Iterator<Item = &str> {
        self.topics.keys().map(String::as_str)
    }

    pub fn topic(&self, topic: &str) -> Option<&[RankedDoc]> {
        self.topics.get(topic).map(Vec::as_slice)
    }

    /// Appends a ranked list for a topic. Scores must be nonincreasing and
    /// documents distinct.
    pub fn set_topic(&mut self, topic: &str, ranked: Vec<RankedDoc>) -> Result<(), EvalError> {
        let mut seen = BTreeSet::new();
        for (i, d) in ranked.iter().enumerate() {
            if !seen.insert(d.doc_id.as_str()) {
                return Err(EvalError::DuplicateRunDoc {
                    line: 0,
                    topic: topic.to_owned(),
                    doc_id: d.doc_id.clone(),
                });
            }
            if i > 0 && ranked[i - 1].score < d.score {
                return Err(EvalError::ScoresNotNonincreasing {
                    topic: topic.to_owned(),
                    rank: i,
                    next: i + 1,
                });
            }
        }
        self.topics.insert(topic.to_owned(), ranked);
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, EvalError> {
        struct Row {
            line: usize,
            rank: u64,
            doc_id: String,
            score: f64,
        }
        let mut tag: Option<String> = None;
        let mut rows: BTreeMap<String, Vec<Row>> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(EvalError::Malformed {
                    line: line_no,
                    msg: format!(
                        "expected `topic Q0 doc_id rank score tag`, found {} fields",
                        fields.len()
                    ),
                });
            }
            let rank: u64 = fields[3].parse().map_err(|_| EvalError::Malformed {
                line: line_no,
                msg: format!("bad rank {:?}", fields[3]),
            })?;
            let score: f64 = fields[4].parse().map_err(|_| EvalError::Malformed {
                line: line_no,
                msg: format!("bad score {:?}", fields[4]),
            })?;
            if !score.is_finite() {
                return Err(EvalError::Malformed {
                    line: line_no,
                    msg: format!("score {score} is not finite"),
                });
            }
            match &tag {
                None => tag = Some(fields[5].to_owned()),
                Some(t) if t != fields[5] => {
                    return Err(EvalError::InconsistentTag {
                        line: line_no,
                        expected: t.clone(),
                        found: fields[5].to_owned(),
                    })
                }
                _ => {}
            }
            rows.entry(fields[0].to_owned()).or_default().push(Row {
                line: line_no,
                rank,
                doc_id: fields[2].to_owned(),
                score,
            });
        }

        let mut run = RunSet::new(tag.as_deref().unwrap_or(""));
        for (topic, mut topic_rows) in rows {
            topic_rows.sort_by_key(|r| r.rank);
            for w in topic_rows.windows(2) {
                if w[0].rank == w[1].rank {
                    return Err(EvalError::DuplicateRank {
                        line: w[1].line,
                        topic: topic.clone(),
                        rank: w[1].rank,
                    });
                }
            }
            let mut seen = BTreeSet::new();
            for r in &topic_rows {
                if !seen.insert(r.doc_id.as_str()) {
                    return Err(EvalError::DuplicateRunDoc {
                        line: r.line,
                        topic: topic.clone(),
                        doc_id: r.doc_id.clone(),
                    });
                }
            }
            let ranked: Vec<RankedDoc> = topic_rows
                .into_iter()
                .map(|r| RankedDoc {
                    doc_id: r.doc_id,
                    score: r.score,
                })
                .collect();
            for (i, w) in ranked.windows(2).enumerate() {
                if w[0].score < w[1].score {
                    return Err(EvalError::ScoresNotNonincreasing {
                        topic: topic.clone(),
                        rank: i + 1,
                        next: i + 2,
                    });
                }
            }
            run.topics.insert(topic, ranked);
        }
        Ok(run)
    }

    pub fn write(&self) -> String {
        let mut out = String::new();
        for (topic, ranked) in &self.topics {
            for (i, d) in ranked.iter().enumerate() {
                out.push_str(&format!(
                    "{topic} Q0 {} {} {} {}\n",
                    d.doc_id,
                    i + 1,
                    d.score,
                    self.tag
                ));
            }
        }
        out
    }
}

/// A cutoff measure value; `past_end` flags a cutoff beyond the list length
/// (the value is then computed over the available ranks).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutoffValue {
    pub value: Fraction,
    pub past_end: bool,
}

fn relevant_up_to(ranked: &[RankedDoc], qrels: &Qrels, topic: &str, k: usize) -> u64 {
    ranked
        .iter()
        .take(k)
        .filter(|d| qrels.is_relevant(topic, &d.doc_id))
        .count() as u64
}

/// relevant-in-top-k / k, with k as the divisor even past the list end.
pub fn precision_at_k(
    ranked: &[RankedDoc],
    qrels: &Qrels,
    topic: &str,
    k: usize,
) -> Result<CutoffValue, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidCutoff);
    }
    Ok(CutoffValue {
        value: Fraction::new(relevant_up_to(ranked, qrels, topic, k), k as u64),
        past_end: k > ranked.len(),
    })
}

/// relevant-in-top-k / total-known-relevant.
pub fn recall_at_k(
    ranked: &[RankedDoc],
    qrels: &Qrels,
    topic: &str,
    k: usize,
) -> Result<CutoffValue, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidCutoff);
    }
    let total = qrels.relevant_count(topic);
    if total == 0 {
        return Err(EvalError::NoRelevantDocuments(topic.to_owned()));
    }
    Ok(CutoffValue {
        value: Fraction::new(relevant_up_to(ranked, qrels, topic, k), total),
        past_end: k > ranked.len(),
    })
}

/// One raw point of the precision-recall curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrPoint {
    pub k: usize,
    pub recall: Fraction,
    pub precision: Fraction,
}

/// Raw (uninterpolated) precision-recall points at every rank 1..=len.
pub fn pr_curve(
    ranked: &[RankedDoc],
    qrels: &Qrels,
    topic: &str,
) -> Result<Vec<PrPoint>, EvalError> {
    let total = qrels.relevant_count(topic);
    if total == 0 {
        return Err(EvalError::NoRelevantDocuments(topic.to_owned()));
    }
    let mut points = Vec::with_capacity(ranked.len());
    let mut hits = 0u64;
    for (i, d) in ranked.iter().enumerate() {
        if qrels.is_relevant(topic, &d.doc_id) {
            hits += 1;
        }
        points.push(PrPoint {
            k: i + 1,
            recall: Fraction::new(hits, total),
            precision: Fraction::new(hits, (i + 1) as u64),
        });
    }
    Ok(points)
}

/// Maximum measured precision at any cutoff whose recall is no less than
/// `r`; zero when no cutoff qualifies.
pub fn interpolated_precision(curve: &[PrPoint], r: Fraction) -> Fraction {
    curve
        .iter()
        .filter(|p| p.recall >= r)
        .map(|p| p.precision)
        .max()
        .unwrap_or_else(|| Fraction::new(0, 1))
}

/// Interpolated precision at the standard grid r = 0.0, 0.1, ..., 1.0.
pub fn eleven_point_interpolation(curve: &[PrPoint]) -> Vec<(Fraction, Fraction)> {
    (0..=10)
        .map(|i| {
            let r = Fraction::new(i, 10);
            (r, interpolated_precision(curve, r))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainKind {
    /// grade g maps to gain g.
    Linear,
    /// grade g maps to gain 2^g - 1.
    Exponential,
}

/// Maps relevance grades to nonnegative gains; gain(0) = 0 and the table
/// is nondecreasing. Grades beyond the table clamp to the top gain.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSpec {
    values: Vec<f64>,
}

impl GainSpec {
    pub fn custom(values: Vec<f64>) -> Result<Self, EvalError> {
        if values.len() < 2 {
            return Err(EvalError::InvalidGain("need at least 2 grades".into()));
        }
        if values[0] != 0.0 {
            return Err(EvalError::InvalidGain("gain(0) must be 0".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) || values.iter().any(|v| *v < 0.0) {
            return Err(EvalError::InvalidGain(
                "gains must be nonnegative and nondecreasing".into(),
            ));
        }
        Ok(GainSpec { values })
    }

    pub fn gain(&self, grade: u32) -> f64 {
        let i = (grade as usize).min(self.values.len() - 1);
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Builds the linear or exponential gain table over `grades` grades.
pub fn make_gain(kind: GainKind, grades: u32) -> Result<GainSpec, EvalError> {
    if grades < 2 {
        return Err(EvalError::InvalidGain(format!(
            "need at least 2 grades, got {grades}"
        )));
    }
    let values = (0..grades)
        .map(|g| match kind {
            GainKind::Linear => g as f64,
            GainKind::Exponential => 2f64.powi(g as i32) - 1.0,
        })
        .collect();
    Ok(GainSpec { values })
}

/// Rank discount d(k) >= 1, nondecreasing in k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscountSpec {
    /// d(k) = log2(k + 1); d(1) = 1.
    Log2KPlus1,
    /// d(k) = max(1, log2 k); flat over the first two ranks.
    MaxOneLog2K,
    /// d(k) = 1 everywhere (no rank discounting).
    Flat,
}

impl DiscountSpec {
    pub fn discount(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        match self {
            DiscountSpec::Log2KPlus1 => ((k + 1) as f64).log2(),
            DiscountSpec::MaxOneLog2K => (k as f64).log2().max(1.0),
            DiscountSpec::Flat => 1.0,
        }
    }
}

/// Sum of discounted gains over ranks 1..=k; unjudged documents carry
/// grade 0.
pub fn dcg_at_k(
    ranked: &[RankedDoc],
    qrels: &Qrels,
    topic: &str,
    k: usize,
    gain: &GainSpec,
    discount: &DiscountSpec,
) -> Result<f64, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidCutoff);
    }
    Ok(ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| gain.gain(qrels.grade(topic, &d.doc_id)) / discount.discount(i + 1))
        .sum())
}

/// Union of each run's top-`depth` documents for `topic`, as
/// (topic, doc_id) pairs ready for judging.
pub fn pool(
    runs: &[RunSet],
    topic: &str,
    depth: usize,
) -> Result<BTreeSet<(String, String)>, EvalError> {
    if depth == 0 {
        return Err(EvalError::InvalidPoolDepth);
    }
    let mut pooled = BTreeSet::new();
    for run in runs {
        if let Some(ranked) = run.topic(topic) {
            for d in ranked.iter().take(depth) {
                pooled.insert((topic.to_owned(), d.doc_id.clone()));
            }
        }
    }
    Ok(pooled)
}

/// `k,recall,precision` lines, six decimal places.
pub fn curve_csv(curve: &[PrPoint]) -> String {
    let mut out = String::new();
    for p in curve {
        out.push_str(&format!(
            "{},{:.6},{:.6}\n",
            p.k,
            fraction_to_f64(p.recall),
            fraction_to_f64(p.precision)
        ));
    }
    out
}

/// `r,i_precision` lines for an interpolation grid.
pub fn interpolated_csv(grid: &[(Fraction, Fraction)]) -> String {
    let mut out = String::new();
    for (r, p) in grid {
        out.push_str(&format!(
            "{:.1},{:.6}\n",
            fraction_to_f64(*r),
            fraction_to_f64(*p)
        ));
    }
    out
}
