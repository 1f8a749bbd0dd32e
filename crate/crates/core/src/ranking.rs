//! Link-based ranking: query-independent PageRank and query-dependent
//! hub/authority scoring over a [`WebGraph`].
//!
//! PageRank comes in two variants. `literal` iterates
//! `PR(A) = (1-d) + d * (PR(T1)/C(T1) + ... + PR(Tn)/C(Tn))` from initial
//! scores 1; its fixed point sums to N on graphs without dangling nodes.
//! `normalized` iterates `PR(A) = (1-d)/N + d * sum PR(Ti)/C(Ti)` from 1/N,
//! redistributing dangling mass uniformly, so the scores always form a
//! probability distribution. On dangling-free graphs the two fixed points
//! differ exactly by the factor N.
//!
//! Hub/authority scoring applies the authority update (sum of hub scores of
//! pages pointing in), then the hub update (sum of authority scores of pages
//! pointed at), then L2 normalization, per iteration, until both vectors
//! move less than the tolerance in max-norm.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::index::{text_scores, InvertedIndex, NormalizedQuery};
use crate::webgraph::{GraphError, WebGraph};

#[derive(Debug, Error)]
pub enum RankError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("query matches no document; the query subgraph is empty")]
    EmptySubgraph,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("score dump line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PageRankVariant {
    /// The iterative formula as written, initial scores 1.
    Literal,
    /// Probability-distribution form with uniform dangling redistribution.
    Normalized,
}

impl PageRankVariant {
    pub fn tag(&self) -> &'static str {
        match self {
            PageRankVariant::Literal => "literal",
            PageRankVariant::Normalized => "normalized",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PageRankParams {
    /// Damping factor in (0, 1).
    pub damping: f64,
    /// L1 change between sweeps below which iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub variant: PageRankVariant,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tolerance: 1e-10,
            max_iterations: 200,
            variant: PageRankVariant::Normalized,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RankMeta {
    pub algorithm: &'static str,
    pub variant: &'static str,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// One score per graph node, all finite and nonnegative.
#[derive(Debug, Clone)]
pub struct RankVector {
    pub scores: BTreeMap<String, f64>,
    pub meta: RankMeta,
}

impl RankVector {
    /// Wraps precomputed scores, e.g. reloaded from a score dump.
    pub fn from_scores(scores: BTreeMap<String, f64>) -> Self {
        RankVector {
            scores,
            meta: RankMeta {
                algorithm: "pagerank",
                variant: "precomputed",
                iterations: 0,
                residual: 0.0,
                converged: true,
            },
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HitsParams {
    /// Max-norm change below which both vectors count as converged.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for HitsParams {
    fn default() -> Self {
        HitsParams {
            tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Hub and authority vectors, each of unit Euclidean norm unless the graph
/// is edgeless, in which case both are identically zero and `degenerate`
/// is set.
#[derive(Debug, Clone)]
pub struct HubAuthScores {
    pub auth: BTreeMap<String, f64>,
    pub hub: BTreeMap<String, f64>,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
}

/// Indexed adjacency shared by both algorithms: nodes in doc_id order.
struct Indexed<'g> {
    ids: Vec<&'g str>,
    /// per node: (source index, 1/out_degree(source)) over its back links
    weighted_back: Vec<Vec<(usize, f64)>>,
    back: Vec<Vec<usize>>,
    forward: Vec<Vec<usize>>,
    dangling: Vec<usize>,
}

impl<'g> Indexed<'g> {
    fn build(graph: &'g WebGraph) -> Self {
        let ids: Vec<&str> = graph.nodes().collect();
        let idx: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut weighted_back = Vec::with_capacity(ids.len());
        let mut back = Vec::with_capacity(ids.len());
        let mut forward = Vec::with_capacity(ids.len());
        let mut dangling = Vec::new();
        for (i, id) in ids.iter().enumerate() {
            let backs = graph.back_links(id).expect("node listed by graph");
            weighted_back.push(
                backs
                    .iter()
                    .map(|src| {
                        let j = idx[src.as_str()];
                        let c = graph.out_degree(src).expect("node listed by graph");
                        (j, 1.0 / c as f64)
                    })
                    .collect(),
            );
            back.push(backs.iter().map(|src| idx[src.as_str()]).collect());
            let fwd = graph.forward_links(id).expect("node listed by graph");
            forward.push(fwd.iter().map(|dst| idx[dst.as_str()]).collect());
            if fwd.is_empty() {
                dangling.push(i);
            }
        }
        Indexed {
            ids,
            weighted_back,
            back,
            forward,
            dangling,
        }
    }

    fn to_map(&self, values: &[f64]) -> BTreeMap<String, f64> {
        self.ids
            .iter()
            .zip(values)
            .map(|(id, v)| ((*id).to_owned(), *v))
            .collect()
    }
}

/// Iterates the chosen PageRank variant to its fixed point (Jacobi sweeps:
/// each sweep reads only the previous vector).
pub fn pagerank(graph: &WebGraph, params: &PageRankParams) -> Result<RankVector, RankError> {
    if !(params.damping > 0.0 && params.damping < 1.0) {
        return Err(RankError::InvalidParams(format!(
            "damping {} must lie strictly between 0 and 1",
            params.damping
        )));
    }
    check_iteration_params(params.tolerance, params.max_iterations)?;
    if graph.is_empty() {
        return Err(RankError::EmptyGraph);
    }
    let ix = Indexed::build(graph);
    let n = ix.ids.len();
    let d = params.damping;
    let (init, base) = match params.variant {
        PageRankVariant::Literal => (1.0, 1.0 - d),
        PageRankVariant::Normalized => (1.0 / n as f64, (1.0 - d) / n as f64),
    };

    let mut scores = vec![init; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut converged = false;

    while iterations < params.max_iterations {
        let dangling_term = match params.variant {
            PageRankVariant::Literal => 0.0,
            PageRankVariant::Normalized => {
                ix.dangling.iter().map(|&i| scores[i]).sum::<f64>() / n as f64
            }
        };
        for (slot, backs) in next.iter_mut().zip(&ix.weighted_back) {
            let mut inflow = 0.0;
            for &(j, inv_degree) in backs {
                inflow += scores[j] * inv_degree;
            }
            *slot = base + d * (inflow + dangling_term);
        }
        residual = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        iterations += 1;
        if residual < params.tolerance {
            converged = true;
            break;
        }
    }

    Ok(RankVector {
        scores: ix.to_map(&scores),
        meta: RankMeta {
            algorithm: "pagerank",
            variant: params.variant.tag(),
            iterations,
            residual,
            converged,
        },
    })
}

fn l2_normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn check_iteration_params(tolerance: f64, max_iterations: usize) -> Result<(), RankError> {
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(RankError::InvalidParams(format!(
            "tolerance {tolerance} must be positive"
        )));
    }
    if max_iterations == 0 {
        return Err(RankError::InvalidParams(
            "max_iterations must be at least 1".to_owned(),
        ));
    }
    Ok(())
}

/// Hub/authority scoring from all-ones initialization.
pub fn hits(graph: &WebGraph, params: &HitsParams) -> Result<HubAuthScores, RankError> {
    check_iteration_params(params.tolerance, params.max_iterations)?;
    if graph.is_empty() {
        return Err(RankError::EmptyGraph);
    }
    let ix = Indexed::build(graph);
    let n = ix.ids.len();

    if graph.is_edgeless() {
        return Ok(HubAuthScores {
            auth: ix.to_map(&vec![0.0; n]),
            hub: ix.to_map(&vec![0.0; n]),
            iterations: 0,
            converged: true,
            degenerate: true,
        });
    }

    let mut auth = vec![1.0; n];
    let mut hub = vec![1.0; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iterations {
        let mut new_auth = vec![0.0; n];
        for (score, backs) in new_auth.iter_mut().zip(&ix.back) {
            for &j in backs {
                *score += hub[j];
            }
        }
        let mut new_hub = vec![0.0; n];
        for (score, fwds) in new_hub.iter_mut().zip(&ix.forward) {
            for &j in fwds {
                *score += new_auth[j];
            }
        }
        l2_normalize(&mut new_auth);
        l2_normalize(&mut new_hub);
        let delta = max_abs_diff(&auth, &new_auth).max(max_abs_diff(&hub, &new_hub));
        auth = new_auth;
        hub = new_hub;
        iterations += 1;
        if delta < params.tolerance {
            converged = true;
            break;
        }
    }

    Ok(HubAuthScores {
        auth: ix.to_map(&auth),
        hub: ix.to_map(&hub),
        iterations,
        converged,
        degenerate: false,
    })
}

/// Builds the query-specific graph: the top `root_size` documents by text
/// score form the root set; with `expand`, every in- and out-neighbor of a
/// root page joins it; the result is the induced subgraph.
pub fn build_query_subgraph(
    index: &InvertedIndex,
    graph: &WebGraph,
    query: &NormalizedQuery,
    root_size: usize,
    expand: bool,
) -> Result<WebGraph, RankError> {
    let mut scored = text_scores(index, query);
    if scored.is_empty() {
        return Err(RankError::EmptySubgraph);
    }
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("text scores are finite")
            .then_with(|| a.0.cmp(&b.0))
    });
    let mut keep: std::collections::BTreeSet<String> = scored
        .into_iter()
        .take(root_size)
        .map(|(id, _)| id)
        .collect();
    if expand {
        let roots: Vec<String> = keep.iter().cloned().collect();
        for root in &roots {
            keep.extend(graph.back_links(root)?.iter().cloned());
            keep.extend(graph.forward_links(root)?.iter().cloned());
        }
    }
    Ok(graph.subgraph(&keep)?)
}

/// Formats `v` with 12 significant digits in positional notation.
pub fn format_significant(v: f64) -> String {
    const DIGITS: i32 = 12;
    if v == 0.0 || !v.is_finite() {
        return format!("{:.*}", (DIGITS - 1) as usize, 0.0);
    }
    let mut magnitude = v.abs().log10().floor() as i32;
    let mut out = format!("{v:.*}", (DIGITS - 1 - magnitude).max(0) as usize);
    // rounding can carry across a decade (0.999... -> 1.000...); reformat
    // at the post-rounding magnitude so exactly 12 digits remain
    let rounded: f64 = out.parse().expect("formatted float");
    if rounded != 0.0 {
        let rounded_magnitude = rounded.abs().log10().floor() as i32;
        if rounded_magnitude != magnitude {
            magnitude = rounded_magnitude;
            out = format!("{v:.*}", (DIGITS - 1 - magnitude).max(0) as usize);
        }
    }
    out
}

/// Score dump: `doc_id<TAB>score` at 12 significant digits, sorted by
/// descending score then ascending doc_id.
pub fn write_score_dump(scores: &BTreeMap<String, f64>) -> String {
    let mut rows: Vec<(&str, f64)> = scores.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    rows.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("scores are finite")
            .then_with(|| a.0.cmp(b.0))
    });
    let mut out = String::new();
    for (id, score) in rows {
        out.push_str(id);
        out.push('\t');
        out.push_str(&format_significant(score));
        out.push('\n');
    }
    out
}

pub fn parse_score_dump(text: &str) -> Result<BTreeMap<String, f64>, RankError> {
    let mut scores = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split('\t');
        let (Some(id), Some(raw), None) = (it.next(), it.next(), it.next()) else {
            return Err(RankError::Malformed {
                line: idx + 1,
                msg: "expected `doc_id<TAB>score`".into(),
            });
        };
        let score: f64 = raw.parse().map_err(|_| RankError::Malformed {
            line: idx + 1,
            msg: format!("unparseable score {raw:?}"),
        })?;
        scores.insert(id.to_owned(), score);
    }
    Ok(scores)
}
