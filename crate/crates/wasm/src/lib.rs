//! Browser bindings for the demo page: parameter-explorable link ranking,
//! precision-recall curves, and document resemblance. Each function takes
//! plain text from the page and returns a JSON string (`{"error": ...}` on
//! bad input) so the page needs no framework, just `JSON.parse`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use webir::corpus::canonicalize;
use webir::dedup::{resemblance, shingles, ShingleSet};
use webir::evaluation::{eleven_point_interpolation, fraction_to_f64, pr_curve, Qrels, RankedDoc};
use webir::ranking::{hits, pagerank, HitsParams, PageRankParams, PageRankVariant};
use webir::webgraph::WebGraph;

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| error_json(&e.to_string()))
}

fn error_json(msg: &str) -> String {
    #[derive(Serialize)]
    struct ErrorBody<'a> {
        error: &'a str,
    }
    serde_json::to_string(&ErrorBody { error: msg }).expect("error body serializes")
}

#[derive(Serialize)]
struct NodeScores {
    id: String,
    pagerank: f64,
    auth: f64,
    hub: f64,
}

#[derive(Serialize)]
struct GraphAnalysis {
    nodes: Vec<NodeScores>,
    edges: Vec<(String, String)>,
    pagerank_iterations: usize,
    pagerank_sum: f64,
    hits_iterations: usize,
    degenerate: bool,
}

/// Parses an edge list (`source target` per line; a lone id adds an
/// isolated node; `#` starts a comment) and scores every page with both
/// algorithms.
#[wasm_bindgen]
pub fn analyze_graph(edges: &str, damping: f64, variant: &str) -> String {
    let variant = match variant {
        "literal" => PageRankVariant::Literal,
        "normalized" => PageRankVariant::Normalized,
        other => return error_json(&format!("unknown variant {other:?}")),
    };
    if !(damping > 0.0 && damping < 1.0) {
        return error_json("damping must lie strictly between 0 and 1");
    }
    let mut graph = WebGraph::new();
    for line in edges.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match (fields.next(), fields.next(), fields.next()) {
            (Some(node), None, _) => graph.add_node(node),
            (Some(u), Some(v), None) => graph.add_edge(u, v),
            _ => return error_json(&format!("cannot parse line {line:?}")),
        }
    }
    if graph.is_empty() {
        return error_json("the graph has no nodes yet");
    }

    let params = PageRankParams {
        damping,
        variant,
        ..PageRankParams::default()
    };
    let ranks = match pagerank(&graph, &params) {
        Ok(r) => r,
        Err(e) => return error_json(&e.to_string()),
    };
    let ha = match hits(&graph, &HitsParams::default()) {
        Ok(h) => h,
        Err(e) => return error_json(&e.to_string()),
    };

    let nodes = graph
        .nodes()
        .map(|id| NodeScores {
            id: id.to_owned(),
            pagerank: ranks.scores[id],
            auth: ha.auth[id],
            hub: ha.hub[id],
        })
        .collect();
    to_json(&GraphAnalysis {
        nodes,
        edges: graph
            .edges()
            .map(|(u, v)| (u.to_owned(), v.to_owned()))
            .collect(),
        pagerank_iterations: ranks.meta.iterations,
        pagerank_sum: ranks.scores.values().sum(),
        hits_iterations: ha.iterations,
        degenerate: ha.degenerate,
    })
}

#[derive(Serialize)]
struct CurvePoint {
    k: usize,
    recall: f64,
    precision: f64,
    relevant: bool,
}

#[derive(Serialize)]
struct InterpolatedPoint {
    r: f64,
    precision: f64,
}

#[derive(Serialize)]
struct CurveAnalysis {
    points: Vec<CurvePoint>,
    interpolated: Vec<InterpolatedPoint>,
    retrieved: usize,
    relevant_retrieved: usize,
    total_relevant: u64,
}

/// Builds the precision-recall curve for one ranked list described as a
/// relevance pattern (`r`/`1` relevant, `n`/`0` not), judged against
/// `total_relevant` known relevant documents.
#[wasm_bindgen]
pub fn precision_recall(pattern: &str, total_relevant: u32) -> String {
    let mut flags = Vec::new();
    for token in pattern.split(|c: char| c.is_whitespace() || c == ',') {
        match token {
            "" => continue,
            "r" | "R" | "1" => flags.push(true),
            "n" | "N" | "0" => flags.push(false),
            other => {
                return error_json(&format!(
                    "cannot read {other:?}; use r/n or 1/0 separated by spaces"
                ))
            }
        }
    }
    if flags.is_empty() {
        return error_json("the judgment pattern is empty");
    }
    let found = flags.iter().filter(|f| **f).count() as u32;
    if total_relevant < found {
        return error_json(&format!(
            "total relevant ({total_relevant}) is below the {found} relevant in the pattern"
        ));
    }
    if total_relevant == 0 {
        return error_json("recall needs at least one relevant document");
    }

    let ranked: Vec<RankedDoc> = flags
        .iter()
        .enumerate()
        .map(|(i, _)| RankedDoc {
            doc_id: format!("d{i:03}"),
            score: (flags.len() - i) as f64,
        })
        .collect();
    let mut qrels = Qrels::default();
    for (i, rel) in flags.iter().enumerate() {
        qrels
            .insert("t", &format!("d{i:03}"), u32::from(*rel))
            .unwrap();
    }
    for i in 0..(total_relevant - found) {
        qrels.insert("t", &format!("unretrieved{i:04}"), 1).unwrap();
    }

    let curve = match pr_curve(&ranked, &qrels, "t") {
        Ok(c) => c,
        Err(e) => return error_json(&e.to_string()),
    };
    to_json(&CurveAnalysis {
        points: curve
            .iter()
            .zip(&flags)
            .map(|(p, rel)| CurvePoint {
                k: p.k,
                recall: fraction_to_f64(p.recall),
                precision: fraction_to_f64(p.precision),
                relevant: *rel,
            })
            .collect(),
        interpolated: eleven_point_interpolation(&curve)
            .into_iter()
            .map(|(r, p)| InterpolatedPoint {
                r: fraction_to_f64(r),
                precision: fraction_to_f64(p),
            })
            .collect(),
        retrieved: flags.len(),
        relevant_retrieved: found as usize,
        total_relevant: u64::from(total_relevant),
    })
}

#[derive(Serialize)]
struct ResemblanceAnalysis {
    resemblance: f64,
    tokens_a: usize,
    tokens_b: usize,
    shingles_a: usize,
    shingles_b: usize,
    shared: usize,
    shared_examples: Vec<String>,
}

/// Canonicalizes two texts, shingles them with window `w`, and reports the
/// exact Jaccard resemblance plus a few shared shingles for display.
#[wasm_bindgen]
pub fn compare_documents(text_a: &str, text_b: &str, w: usize) -> String {
    if w == 0 {
        return error_json("the shingle window must be at least 1 token");
    }
    let tokens_a = canonicalize(text_a);
    let tokens_b = canonicalize(text_b);
    let raw_a = match shingles(&tokens_a, w) {
        Ok(s) => s,
        Err(e) => return error_json(&e.to_string()),
    };
    let raw_b = match shingles(&tokens_b, w) {
        Ok(s) => s,
        Err(e) => return error_json(&e.to_string()),
    };
    let set_a = match ShingleSet::build("a", &tokens_a, w) {
        Ok(s) => s,
        Err(e) => return error_json(&e.to_string()),
    };
    let set_b = match ShingleSet::build("b", &tokens_b, w) {
        Ok(s) => s,
        Err(e) => return error_json(&e.to_string()),
    };
    let r = match resemblance(&set_a, &set_b) {
        Ok(r) => r,
        Err(e) => return error_json(&e.to_string()),
    };
    let shared_examples: Vec<String> = raw_a
        .intersection(&raw_b)
        .take(8)
        .map(|s| s.join(" "))
        .collect();
    to_json(&ResemblanceAnalysis {
        resemblance: r,
        tokens_a: tokens_a.len(),
        tokens_b: tokens_b.len(),
        shingles_a: set_a.len(),
        shingles_b: set_b.len(),
        shared: raw_a.intersection(&raw_b).count(),
        shared_examples,
    })
}
