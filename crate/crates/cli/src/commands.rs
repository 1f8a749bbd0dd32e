//! Command implementations. Every command validates its numeric settings
//! before touching any input, writes plain-text artifacts into the output
//! directory, and keeps stdout deterministic.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};

use webir::corpus::{ingest as bfs_ingest, Corpus, CorpusSource, CrawlPolicy};
use webir::dedup::find_near_duplicates;
use webir::evaluation::{
    curve_csv, dcg_at_k, eleven_point_interpolation, fraction_to_f64, interpolated_csv, make_gain,
    pool as pool_runs, pr_curve, precision_at_k, recall_at_k, DiscountSpec, GainKind, Qrels,
    RankedDoc, RunSet,
};
use webir::index::{build_index, normalize_query, search as query_index};
use webir::ranking::{
    build_query_subgraph, hits as hits_scores, pagerank, parse_score_dump, write_score_dump,
    HitsParams, PageRankParams, PageRankVariant, RankVector,
};
use webir::webgraph::WebGraph;

use crate::config::{pick, pick_required, FileConfig};
use crate::{
    Algorithm, CliError, DedupArgs, DiscountArg, EvalArgs, GainArg, IngestArgs, PoolArgs, RankArgs,
    SearchArgs, Variant,
};

pub const CORPUS_FILE: &str = "corpus.tsv";
pub const GRAPH_FILE: &str = "graph.tsv";
pub const PAGERANK_FILE: &str = "pagerank.tsv";
pub const HITS_AUTH_FILE: &str = "hits_auth.tsv";
pub const HITS_HUB_FILE: &str = "hits_hub.tsv";
pub const DUPLICATES_FILE: &str = "duplicates.tsv";
pub const POOL_FILE: &str = "pool.tsv";

fn data(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Data(e.into())
}

fn usage_check(ok: bool, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(msg.to_owned()))
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(CliError::Data)
}

fn write_text(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .map_err(CliError::Data)?;
    let path = dir.join(name);
    fs::write(&path, content)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(CliError::Data)?;
    Ok(path)
}

fn load_corpus(out_dir: &Path) -> Result<Corpus, CliError> {
    let path = out_dir.join(CORPUS_FILE);
    if !path.exists() {
        return Err(CliError::Data(anyhow!(
            "{} not found; run `webir ingest` first",
            path.display()
        )));
    }
    let source = CorpusSource::parse(&read_text(&path)?).map_err(data)?;
    Ok(Corpus::from_source(&source))
}

fn load_graph(out_dir: &Path, corpus: &Corpus) -> Result<WebGraph, CliError> {
    let path = out_dir.join(GRAPH_FILE);
    if !path.exists() {
        return Err(CliError::Data(anyhow!(
            "{} not found; run `webir ingest` first",
            path.display()
        )));
    }
    let mut graph = WebGraph::from_edge_dump(&read_text(&path)?).map_err(data)?;
    // the edge dump drops isolated pages; the corpus restores them
    for doc_id in corpus.doc_ids() {
        graph.add_node(doc_id);
    }
    Ok(graph)
}

fn load_prior(out_dir: &Path) -> Result<RankVector, CliError> {
    let path = out_dir.join(PAGERANK_FILE);
    if !path.exists() {
        return Err(CliError::Data(anyhow!(
            "{} not found; run `webir rank --algorithm pagerank` first",
            path.display()
        )));
    }
    let scores = parse_score_dump(&read_text(&path)?).map_err(data)?;
    Ok(RankVector::from_scores(scores))
}

pub fn ingest(args: &IngestArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    let corpus_path = pick_required(args.corpus.clone(), cfg.corpus.clone(), "--corpus")?;
    let seeds = pick_required(args.seeds.clone(), cfg.seeds.clone(), "--seeds")?;
    usage_check(!seeds.is_empty(), "--seeds must name at least one doc_id")?;
    let policy = CrawlPolicy {
        max_depth: pick(args.max_depth, cfg.crawl.max_depth, usize::MAX),
        max_docs: pick(args.max_docs, cfg.crawl.max_docs, usize::MAX),
    };
    usage_check(policy.max_docs >= 1, "--max-docs must be at least 1")?;

    let source = CorpusSource::parse(&read_text(&corpus_path)?).map_err(data)?;
    let out = bfs_ingest(&source, &seeds, &policy).map_err(data)?;
    write_text(out_dir, CORPUS_FILE, &out.corpus.to_snapshot())?;
    write_text(out_dir, GRAPH_FILE, &out.graph.to_edge_dump())?;
    println!("documents\t{}", out.corpus.len());
    println!("edges\t{}", out.graph.edge_count());
    println!("skipped_targets\t{}", out.skipped_targets.len());
    Ok(())
}

pub fn rank(args: &RankArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    match args.algorithm {
        Algorithm::Pagerank => rank_pagerank(args, cfg, out_dir),
        Algorithm::Hits => rank_hits(args, cfg, out_dir),
    }
}

fn parse_variant(cfg: &FileConfig) -> Result<Option<PageRankVariant>, CliError> {
    match cfg.pagerank.variant.as_deref() {
        None => Ok(None),
        Some("literal") => Ok(Some(PageRankVariant::Literal)),
        Some("normalized") => Ok(Some(PageRankVariant::Normalized)),
        Some(other) => Err(CliError::Data(anyhow!(
            "config: unknown pagerank variant {other:?} (expected literal or normalized)"
        ))),
    }
}

fn rank_pagerank(args: &RankArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    usage_check(
        args.query.is_none(),
        "--query applies only to --algorithm hits",
    )?;
    let variant = args
        .variant
        .map(|v| match v {
            Variant::Literal => PageRankVariant::Literal,
            Variant::Normalized => PageRankVariant::Normalized,
        })
        .or(parse_variant(cfg)?)
        .unwrap_or(PageRankVariant::Normalized);
    let params = PageRankParams {
        damping: pick(args.damping, cfg.pagerank.damping, 0.85),
        tolerance: pick(args.tolerance, cfg.pagerank.tolerance, 1e-10),
        max_iterations: pick(args.max_iterations, cfg.pagerank.max_iterations, 200),
        variant,
    };
    usage_check(
        params.damping > 0.0 && params.damping < 1.0,
        "--damping must lie strictly between 0 and 1",
    )?;
    usage_check(params.tolerance > 0.0, "--tolerance must be positive")?;
    usage_check(
        params.max_iterations >= 1,
        "--max-iterations must be at least 1",
    )?;

    let corpus = load_corpus(out_dir)?;
    let graph = load_graph(out_dir, &corpus)?;
    let ranks = pagerank(&graph, &params).map_err(data)?;
    if !ranks.meta.converged {
        return Err(CliError::NonConvergence(format!(
            "pagerank did not converge within {} iterations (residual {:e})",
            ranks.meta.iterations, ranks.meta.residual
        )));
    }
    write_text(out_dir, PAGERANK_FILE, &write_score_dump(&ranks.scores))?;
    println!("algorithm\tpagerank/{}", ranks.meta.variant);
    println!("nodes\t{}", ranks.scores.len());
    println!("iterations\t{}", ranks.meta.iterations);
    Ok(())
}

fn rank_hits(args: &RankArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    usage_check(
        args.damping.is_none() && args.variant.is_none(),
        "--damping and --variant apply only to --algorithm pagerank",
    )?;
    let Some(query_text) = &args.query else {
        return Err(CliError::Usage(
            "--algorithm hits requires --query".to_owned(),
        ));
    };
    let params = HitsParams {
        tolerance: pick(args.tolerance, cfg.hits.tolerance, 1e-12),
        max_iterations: pick(args.max_iterations, cfg.hits.max_iterations, 200),
    };
    let root_size = pick(args.root_size, cfg.hits.root_size, 20);
    let expand = if args.no_expand {
        false
    } else {
        cfg.hits.expand.unwrap_or(true)
    };
    usage_check(params.tolerance > 0.0, "--tolerance must be positive")?;
    usage_check(
        params.max_iterations >= 1,
        "--max-iterations must be at least 1",
    )?;
    usage_check(root_size >= 1, "--root-size must be at least 1")?;

    let query = normalize_query(query_text);
    usage_check(
        !query.terms.is_empty(),
        "--query is empty after normalization",
    )?;

    let corpus = load_corpus(out_dir)?;
    let graph = load_graph(out_dir, &corpus)?;
    let index = build_index(&corpus).map_err(data)?;
    let subgraph = build_query_subgraph(&index, &graph, &query, root_size, expand).map_err(data)?;
    let scores = hits_scores(&subgraph, &params).map_err(data)?;
    if !scores.converged {
        return Err(CliError::NonConvergence(format!(
            "hits did not converge within {} iterations",
            scores.iterations
        )));
    }
    write_text(out_dir, HITS_AUTH_FILE, &write_score_dump(&scores.auth))?;
    write_text(out_dir, HITS_HUB_FILE, &write_score_dump(&scores.hub))?;
    println!("algorithm\thits");
    println!("subgraph_nodes\t{}", subgraph.node_count());
    println!("iterations\t{}", scores.iterations);
    println!("degenerate\t{}", scores.degenerate);
    Ok(())
}

pub fn dedup(args: &DedupArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    let w = pick(args.w, cfg.dedup.w, 4);
    let threshold = pick(args.threshold, cfg.dedup.threshold, 0.9);
    usage_check(w >= 1, "--w must be at least 1")?;
    usage_check(
        threshold > 0.0 && threshold <= 1.0,
        "--threshold must lie in (0, 1]",
    )?;

    let corpus = load_corpus(out_dir)?;
    let report = find_near_duplicates(&corpus, w, threshold).map_err(data)?;
    write_text(out_dir, DUPLICATES_FILE, &report.to_tsv())?;
    println!("pairs\t{}", report.pairs.len());
    Ok(())
}

pub fn search(args: &SearchArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    let alpha = pick(args.alpha, cfg.search.alpha, 0.7);
    let limit = pick(args.limit, cfg.search.limit, 10);
    let tag = pick(args.tag.clone(), cfg.search.tag.clone(), "webir".to_owned());
    usage_check((0.0..=1.0).contains(&alpha), "--alpha must lie in [0, 1]")?;
    usage_check(limit >= 1, "--limit must be at least 1")?;

    let topics: Vec<(String, String)> = match (&args.query, &args.queries) {
        (Some(q), None) => {
            let topic = args
                .topic
                .clone()
                .ok_or_else(|| CliError::Usage("--query requires --topic".to_owned()))?;
            vec![(topic, q.clone())]
        }
        (None, Some(path)) => parse_queries_file(path)?,
        (None, None) => {
            return Err(CliError::Usage(
                "provide --query with --topic, or --queries FILE".to_owned(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let corpus = load_corpus(out_dir)?;
    let index = build_index(&corpus).map_err(data)?;
    let prior = load_prior(out_dir)?;

    let mut run = RunSet::new(&tag);
    let mut total = 0usize;
    for (topic, raw_query) in &topics {
        let query = normalize_query(raw_query);
        if query.terms.is_empty() {
            return Err(CliError::Data(anyhow!(
                "topic {topic}: query {raw_query:?} is empty after normalization"
            )));
        }
        let result = query_index(&index, &prior, &query, alpha, limit).map_err(data)?;
        total += result.ranked.len();
        let ranked: Vec<RankedDoc> = result
            .ranked
            .into_iter()
            .map(|row| RankedDoc {
                doc_id: row.doc_id,
                score: row.combined_score,
            })
            .collect();
        if !ranked.is_empty() {
            run.set_topic(topic, ranked).map_err(data)?;
        }
    }
    write_text(out_dir, &args.run_file, &run.write())?;
    println!("topics\t{}", topics.len());
    println!("results\t{total}");
    Ok(())
}

fn parse_queries_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = read_text(path)?;
    let mut queries = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((topic, query)) = line.split_once('\t') else {
            return Err(CliError::Data(anyhow!(
                "{}:{}: expected `topic_id<TAB>query`",
                path.display(),
                idx + 1
            )));
        };
        if !seen.insert(topic.to_owned()) {
            return Err(CliError::Data(anyhow!(
                "{}:{}: duplicate topic {topic}",
                path.display(),
                idx + 1
            )));
        }
        queries.push((topic.to_owned(), query.to_owned()));
    }
    Ok(queries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MeasureKind {
    Precision,
    Recall,
    Dcg,
}

fn parse_measure(spec: &str) -> Result<(MeasureKind, usize), CliError> {
    let err = || {
        CliError::Usage(format!(
            "measure {spec:?} is not of the form precision@K, recall@K, or dcg@K"
        ))
    };
    let (name, k_raw) = spec.split_once('@').ok_or_else(err)?;
    let kind = match name {
        "precision" => MeasureKind::Precision,
        "recall" => MeasureKind::Recall,
        "dcg" => MeasureKind::Dcg,
        _ => return Err(err()),
    };
    let k: usize = k_raw.parse().map_err(|_| err())?;
    usage_check(k >= 1, "measure cutoff must be at least 1")?;
    Ok((kind, k))
}

fn safe_name(topic: &str) -> String {
    topic
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

pub fn eval(args: &EvalArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    let default_measures = vec![
        "precision@10".to_owned(),
        "recall@10".to_owned(),
        "dcg@10".to_owned(),
    ];
    let specs = pick(
        args.measures.clone(),
        cfg.eval.measures.clone(),
        default_measures,
    );
    let measures: Vec<(String, MeasureKind, usize)> = specs
        .iter()
        .map(|s| parse_measure(s).map(|(kind, k)| (s.clone(), kind, k)))
        .collect::<Result<_, _>>()?;

    let gain_kind = match (args.gain, cfg.eval.gain.as_deref()) {
        (Some(GainArg::Linear), _) | (None, Some("linear")) | (None, None) => GainKind::Linear,
        (Some(GainArg::Exponential), _) | (None, Some("exponential")) => GainKind::Exponential,
        (None, Some(other)) => {
            return Err(CliError::Data(anyhow!(
                "config: unknown gain {other:?} (expected linear or exponential)"
            )))
        }
    };
    let discount = match (args.discount, cfg.eval.discount.as_deref()) {
        (Some(DiscountArg::Log2k1), _) | (None, Some("log2k1")) | (None, None) => {
            DiscountSpec::Log2KPlus1
        }
        (Some(DiscountArg::Maxlog2k), _) | (None, Some("maxlog2k")) => DiscountSpec::MaxOneLog2K,
        (Some(DiscountArg::Flat), _) | (None, Some("flat")) => DiscountSpec::Flat,
        (None, Some(other)) => {
            return Err(CliError::Data(anyhow!(
                "config: unknown discount {other:?} (expected log2k1, maxlog2k, or flat)"
            )))
        }
    };

    let run = RunSet::parse(&read_text(&args.run)?).map_err(data)?;
    let qrels = Qrels::parse(&read_text(&args.qrels)?).map_err(data)?;
    let grades = (qrels.grade_scale() + 1).max(2);
    let gain = make_gain(gain_kind, grades).map_err(data)?;

    for topic in run.topics() {
        let ranked = run.topic(topic).expect("topic listed by run");
        for (label, kind, k) in &measures {
            match kind {
                MeasureKind::Precision => {
                    let v = precision_at_k(ranked, &qrels, topic, *k).map_err(data)?;
                    print_measure(label, topic, fraction_to_f64(v.value), v.past_end);
                }
                MeasureKind::Recall => {
                    let v = recall_at_k(ranked, &qrels, topic, *k).map_err(data)?;
                    print_measure(label, topic, fraction_to_f64(v.value), v.past_end);
                }
                MeasureKind::Dcg => {
                    let v = dcg_at_k(ranked, &qrels, topic, *k, &gain, &discount).map_err(data)?;
                    print_measure(label, topic, v, *k > ranked.len());
                }
            }
        }
        if !args.no_curves {
            let curve = pr_curve(ranked, &qrels, topic).map_err(data)?;
            write_text(
                out_dir,
                &format!("curve_{}.csv", safe_name(topic)),
                &curve_csv(&curve),
            )?;
            write_text(
                out_dir,
                &format!("interpolated_{}.csv", safe_name(topic)),
                &interpolated_csv(&eleven_point_interpolation(&curve)),
            )?;
        }
    }
    Ok(())
}

fn print_measure(label: &str, topic: &str, value: f64, past_end: bool) {
    if past_end {
        println!("{label}\t{topic}\t{value:.4}\tpast-end");
    } else {
        println!("{label}\t{topic}\t{value:.4}");
    }
}

pub fn pool(args: &PoolArgs, cfg: &FileConfig, out_dir: &Path) -> Result<(), CliError> {
    let depth = pick(args.pool_depth, cfg.pool_depth, 10);
    usage_check(depth >= 1, "--pool-depth must be at least 1")?;
    usage_check(!args.runs.is_empty(), "--runs must name at least one file")?;

    let runs: Vec<RunSet> = args
        .runs
        .iter()
        .map(|p| RunSet::parse(&read_text(p)?).map_err(data))
        .collect::<Result<_, _>>()?;

    let topics: BTreeSet<String> = runs
        .iter()
        .flat_map(|r| r.topics().map(str::to_owned))
        .collect();
    let mut worksheet = String::new();
    let mut count = 0usize;
    for topic in &topics {
        for (t, doc) in pool_runs(&runs, topic, depth).map_err(data)? {
            worksheet.push_str(&format!("{t} {doc}\n"));
            count += 1;
        }
    }
    write_text(out_dir, POOL_FILE, &worksheet)?;
    println!("topics\t{}", topics.len());
    println!("pooled\t{count}");
    Ok(())
}
