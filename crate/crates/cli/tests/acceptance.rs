//! Acceptance suite. Each test implements one release criterion end to end,
//! self-contained (own fixtures, own brute-force oracles), and prints one
//! `criterion N: PASS` line on success:
//!
//! 1. evaluation worked-example reproduction (library and binary)
//! 2. shingling reproduction of the 4-shingle example
//! 3. exact gain tables
//! 4. PageRank vs brute-force oracle on random graphs, both variants
//! 5. HITS authority vs eigenvector oracle on random graphs
//! 6. metric property suite over 1000 randomized run/qrels pairs
//! 7. planted near-duplicate recovery with a raw-window Jaccard oracle
//! 8. byte-identical end-to-end pipeline runs and pooling containment
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use webir::corpus::{ingest, CorpusSource, CrawlPolicy};
use webir::dedup::{find_near_duplicates, resemblance, shingles, ShingleSet};
use webir::evaluation::{
    dcg_at_k, eleven_point_interpolation, make_gain, pr_curve, precision_at_k, recall_at_k,
    DiscountSpec, GainKind, Qrels, RankedDoc,
};
use webir::ranking::{hits, pagerank, HitsParams, PageRankParams, PageRankVariant};
use webir::webgraph::WebGraph;

type Fraction = Ratio<u64>;

fn assert_runtime(started: Instant, limit: Duration, criterion: &str) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < limit,
        "{criterion} exceeded its runtime budget: {elapsed:?} >= {limit:?}"
    );
}

// ---------------------------------------------------------------------
// criterion 1: worked-example reproduction
// ---------------------------------------------------------------------

fn worked_example_fixture() -> (Vec<RankedDoc>, Qrels) {
    let pattern = [1u32, 1, 1, 1, 1, 1, 0, 0, 1, 1];
    let run: Vec<RankedDoc> = (0..10)
        .map(|i| RankedDoc {
            doc_id: format!("r{:02}", i + 1),
            score: 10.0 - i as f64,
        })
        .collect();
    let mut qrels = Qrels::default();
    for (i, grade) in pattern.iter().enumerate() {
        qrels
            .insert("1", &format!("r{:02}", i + 1), *grade)
            .unwrap();
    }
    for i in 0..154 {
        qrels.insert("1", &format!("extra{i:03}"), 1).unwrap();
    }
    (run, qrels)
}

#[test]
fn criterion_1_worked_example_reproduction() {
    let started = Instant::now();

    let (run, qrels) = worked_example_fixture();
    assert_eq!(qrels.relevant_count("1"), 162);
    let p10 = precision_at_k(&run, &qrels, "1", 10).unwrap();
    assert_eq!(
        p10.value,
        Fraction::new(8, 10),
        "precision@10 must be 0.8 exactly"
    );
    let r10 = recall_at_k(&run, &qrels, "1", 10).unwrap();
    assert_eq!(r10.value, Fraction::new(8, 162));
    let as_f64 = *r10.value.numer() as f64 / *r10.value.denom() as f64;
    assert!((as_f64 - 0.049383).abs() < 1e-6);
    assert!((as_f64 - 8.0 / 162.0).abs() < 1e-9);

    // 20 relevant documents in the top 50
    let run50: Vec<RankedDoc> = (0..50)
        .map(|i| RankedDoc {
            doc_id: format!("e{i:02}"),
            score: 50.0 - i as f64,
        })
        .collect();
    let mut qrels50 = Qrels::default();
    for i in 0..50 {
        qrels50
            .insert("2", &format!("e{i:02}"), u32::from(i % 5 < 2))
            .unwrap();
    }
    let p50 = precision_at_k(&run50, &qrels50, "2", 50).unwrap();
    assert_eq!(
        p50.value,
        Fraction::new(20, 50),
        "precision@50 must be 0.4 exactly"
    );

    // the binary prints the same values at 4 decimal places
    let tmp = TempDir::new().unwrap();
    let mut run_text = String::new();
    let mut qrels_text = String::new();
    let pattern = [1, 1, 1, 1, 1, 1, 0, 0, 1, 1];
    for (i, rel) in pattern.iter().enumerate() {
        run_text.push_str(&format!(
            "1 Q0 r{:02} {} {} fixture\n",
            i + 1,
            i + 1,
            10 - i
        ));
        qrels_text.push_str(&format!("1 0 r{:02} {rel}\n", i + 1));
    }
    for i in 0..154 {
        qrels_text.push_str(&format!("1 0 extra{i:03} 1\n"));
    }
    fs::write(tmp.path().join("run.txt"), run_text).unwrap();
    fs::write(tmp.path().join("qrels.txt"), qrels_text).unwrap();
    let out = webir(
        tmp.path(),
        &[
            "eval",
            "--run",
            "run.txt",
            "--qrels",
            "qrels.txt",
            "--measures",
            "precision@10,recall@10",
            "--no-curves",
        ],
        &[],
    );
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        "precision@10\t1\t0.8000\nrecall@10\t1\t0.0494\n"
    );

    assert_runtime(started, Duration::from_secs(1), "criterion 1");
    println!("criterion 1 (worked-example reproduction): PASS");
}

// ---------------------------------------------------------------------
// criterion 2: shingling reproduction
// ---------------------------------------------------------------------

#[test]
fn criterion_2_shingling_reproduction() {
    let started = Instant::now();
    let tokens: Vec<String> = ["internet", "scaled", "data", "storage", "and", "analysis"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let got = shingles(&tokens, 4).unwrap();
    let expected: BTreeSet<Vec<String>> = [
        vec!["internet", "scaled", "data", "storage"],
        vec!["scaled", "data", "storage", "and"],
        vec!["data", "storage", "and", "analysis"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(str::to_owned).collect())
    .collect();
    assert_eq!(
        got, expected,
        "4-shingling must yield exactly these 3 shingles"
    );
    let prints = ShingleSet::build("d", &tokens, 4).unwrap();
    assert_eq!(prints.len(), 3);
    assert_runtime(started, Duration::from_secs(1), "criterion 2");
    println!("criterion 2 (shingling reproduction): PASS");
}

// ---------------------------------------------------------------------
// criterion 3: gain tables
// ---------------------------------------------------------------------

#[test]
fn criterion_3_gain_tables() {
    let started = Instant::now();
    let exponential = make_gain(GainKind::Exponential, 5).unwrap();
    assert_eq!(exponential.values(), &[0.0, 1.0, 3.0, 7.0, 15.0]);
    let linear = make_gain(GainKind::Linear, 3).unwrap();
    assert_eq!(linear.values(), &[0.0, 1.0, 2.0]);
    assert_runtime(started, Duration::from_secs(1), "criterion 3");
    println!("criterion 3 (gain tables): PASS");
}

// ---------------------------------------------------------------------
// random graphs and ranking oracles (criteria 4 and 5)
// ---------------------------------------------------------------------

fn node_name(i: usize) -> String {
    format!("n{i:03}")
}

fn random_edges(rng: &mut ChaCha8Rng, n: usize, dangling_free: bool) -> Vec<(usize, usize)> {
    let p = rng.gen_range(0.05..0.30);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    if dangling_free {
        for u in 0..n {
            if !edges.iter().any(|(s, _)| *s == u) {
                let mut v = rng.gen_range(0..n);
                if v == u {
                    v = (v + 1) % n;
                }
                edges.push((u, v));
            }
        }
    }
    edges.sort();
    edges.dedup();
    edges
}

fn graph_from(n: usize, edges: &[(usize, usize)]) -> WebGraph {
    let mut g = WebGraph::new();
    for i in 0..n {
        g.add_node(&node_name(i));
    }
    for (u, v) in edges {
        g.add_edge(&node_name(*u), &node_name(*v));
    }
    g
}

fn pagerank_oracle(
    n: usize,
    edges: &[(usize, usize)],
    damping: f64,
    variant: PageRankVariant,
    sweeps: usize,
) -> Vec<f64> {
    let mut out_degree = vec![0usize; n];
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v) in edges {
        out_degree[*u] += 1;
        incoming[*v].push(*u);
    }
    for list in &mut incoming {
        list.sort();
    }
    let (init, base) = match variant {
        PageRankVariant::Literal => (1.0, 1.0 - damping),
        PageRankVariant::Normalized => (1.0 / n as f64, (1.0 - damping) / n as f64),
    };
    let mut scores = vec![init; n];
    for _ in 0..sweeps {
        let dangling: f64 = match variant {
            PageRankVariant::Literal => 0.0,
            PageRankVariant::Normalized => (0..n)
                .filter(|i| out_degree[*i] == 0)
                .map(|i| scores[i])
                .sum(),
        };
        let mut next = vec![0.0; n];
        for v in 0..n {
            let mut inflow = 0.0;
            for &u in &incoming[v] {
                inflow += scores[u] / out_degree[u] as f64;
            }
            if let PageRankVariant::Normalized = variant {
                inflow += dangling / n as f64;
            }
            next[v] = base + damping * inflow;
        }
        scores = next;
    }
    scores
}

#[test]
fn criterion_4_pagerank_correctness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA4);

    // literal variant on 100 dangling-free graphs: mass N, oracle match,
    // and ranking-order agreement with the normalized variant
    for round in 0..100 {
        let n = rng.gen_range(2..=50);
        let edges = random_edges(&mut rng, n, true);
        let g = graph_from(n, &edges);

        let literal = pagerank(
            &g,
            &PageRankParams {
                variant: PageRankVariant::Literal,
                ..PageRankParams::default()
            },
        )
        .unwrap();
        assert!(
            literal.meta.converged,
            "round {round}: literal did not converge"
        );
        let sum: f64 = literal.scores.values().sum();
        assert!(
            (sum - n as f64).abs() < 1e-6,
            "round {round}: literal sum {sum} != {n}"
        );
        let oracle = pagerank_oracle(n, &edges, 0.85, PageRankVariant::Literal, 1000);
        for (i, want) in oracle.iter().enumerate() {
            let got = literal.scores[&node_name(i)];
            assert!(
                (got - want).abs() < 1e-8,
                "round {round} node {i}: {got} vs oracle {want}"
            );
        }

        let normalized = pagerank(
            &g,
            &PageRankParams {
                variant: PageRankVariant::Normalized,
                ..PageRankParams::default()
            },
        )
        .unwrap();
        // argsort agreement: every decisively ordered pair sorts the same way
        for i in 0..n {
            for j in (i + 1)..n {
                let (ni, nj) = (
                    normalized.scores[&node_name(i)],
                    normalized.scores[&node_name(j)],
                );
                if (ni - nj).abs() > 1e-7 {
                    let (li, lj) = (literal.scores[&node_name(i)], literal.scores[&node_name(j)]);
                    assert_eq!(
                        ni > nj,
                        li > lj,
                        "round {round}: variants order ({i}, {j}) differently"
                    );
                }
            }
        }
    }

    // normalized variant is a probability distribution on arbitrary random
    // graphs, dangling nodes included
    for round in 0..100 {
        let n = rng.gen_range(1..=50);
        let edges = random_edges(&mut rng, n, false);
        let g = graph_from(n, &edges);
        let normalized = pagerank(
            &g,
            &PageRankParams {
                variant: PageRankVariant::Normalized,
                ..PageRankParams::default()
            },
        )
        .unwrap();
        let sum: f64 = normalized.scores.values().sum();
        assert!((sum - 1.0).abs() < 1e-9, "round {round}: sum {sum} != 1");
    }

    assert_runtime(started, Duration::from_secs(10), "criterion 4");
    println!("criterion 4 (pagerank correctness): PASS");
}

/// Power iteration on the co-citation product (in-link transpose times
/// out-link matrix), started from the in-degree vector — the authority
/// vector after the first update from all-ones initialization — so oracle
/// and algorithm track the same component under tied eigenvalues.
fn hits_auth_oracle(n: usize, edges: &[(usize, usize)], steps: usize) -> Vec<f64> {
    let mut adj = vec![vec![0.0f64; n]; n];
    for (u, v) in edges {
        adj[*u][*v] = 1.0;
    }
    let mut ata = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            ata[i][j] = (0..n).map(|k| adj[k][i] * adj[k][j]).sum();
        }
    }
    let mut v: Vec<f64> = (0..n)
        .map(|i| adj.iter().map(|row| row[i]).sum::<f64>())
        .collect();
    for _ in 0..steps {
        let mut next = vec![0.0; n];
        for i in 0..n {
            next[i] = (0..n).map(|j| ata[i][j] * v[j]).sum();
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return next;
        }
        for x in &mut next {
            *x /= norm;
        }
        v = next;
    }
    v
}

#[test]
fn criterion_5_hits_correctness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA5);
    let params = HitsParams {
        tolerance: 1e-14,
        max_iterations: 2000,
    };

    for round in 0..100 {
        let n = rng.gen_range(2..=30);
        let mut edges = random_edges(&mut rng, n, false);
        if edges.is_empty() {
            edges.push((0, 1));
        }
        let g = graph_from(n, &edges);
        let got = hits(&g, &params).unwrap();
        let want = hits_auth_oracle(n, &edges, 1000);
        let got_vec: Vec<f64> = (0..n).map(|i| got.auth[&node_name(i)]).collect();
        let dot: f64 = got_vec.iter().zip(&want).map(|(a, b)| a * b).sum();
        let na: f64 = got_vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb: f64 = want.iter().map(|x| x * x).sum::<f64>().sqrt();
        let cosine = dot / (na * nb);
        assert!(
            cosine >= 1.0 - 1e-9,
            "round {round}: cosine {cosine} below 1 - 1e-9"
        );
    }

    // the shared-authority fixture
    let g = WebGraph::from_edges([("A", "B"), ("C", "B")]);
    let s = hits(&g, &HitsParams::default()).unwrap();
    let inv_sqrt2 = 1.0 / 2f64.sqrt();
    assert!((s.auth["B"] - 1.0).abs() < 1e-9);
    assert!((s.hub["A"] - inv_sqrt2).abs() < 1e-9);
    assert!((s.hub["C"] - inv_sqrt2).abs() < 1e-9);

    assert_runtime(started, Duration::from_secs(10), "criterion 5");
    println!("criterion 5 (hits correctness): PASS");
}

// ---------------------------------------------------------------------
// criterion 6: metric property suite
// ---------------------------------------------------------------------

fn random_metric_case(rng: &mut ChaCha8Rng, binary: bool) -> (Vec<RankedDoc>, Qrels) {
    let universe = rng.gen_range(5..40usize);
    let docs: Vec<String> = (0..universe).map(|i| format!("d{i:02}")).collect();
    let mut qrels = Qrels::default();
    let max_grade = if binary { 1 } else { 3 };
    let mut any_relevant = false;
    for doc in &docs {
        if rng.gen_bool(0.6) {
            let grade = rng.gen_range(0..=max_grade);
            any_relevant |= grade >= 1;
            qrels.insert("t", doc, grade).unwrap();
        }
    }
    if !any_relevant {
        qrels.insert("t", "forced-relevant", 1).unwrap();
    }
    let list_len = rng.gen_range(1..=universe);
    let mut pool = docs;
    for i in 0..list_len {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
    }
    let run = pool[..list_len]
        .iter()
        .enumerate()
        .map(|(i, d)| RankedDoc {
            doc_id: d.clone(),
            score: 1000.0 - i as f64,
        })
        .collect();
    (run, qrels)
}

#[test]
fn criterion_6_metric_property_suite() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA6);
    let graded_gain = make_gain(GainKind::Exponential, 4).unwrap();
    let binary_gain = make_gain(GainKind::Linear, 2).unwrap();

    for case in 0..1000 {
        let binary = case % 2 == 1;
        let (run, qrels) = random_metric_case(&mut rng, binary);
        let total = qrels.relevant_count("t");
        let curve = pr_curve(&run, &qrels, "t").unwrap();

        for w in curve.windows(2) {
            assert!(w[1].recall >= w[0].recall, "case {case}: recall decreased");
        }
        for k in 1..=run.len() {
            let p = precision_at_k(&run, &qrels, "t", k).unwrap();
            let r = recall_at_k(&run, &qrels, "t", k).unwrap();
            assert_eq!(
                p.value * Fraction::new(k as u64, 1),
                r.value * Fraction::new(total, 1),
                "case {case}: identity precision*k = recall*R failed at k={k}"
            );
        }
        let grid = eleven_point_interpolation(&curve);
        for w in grid.windows(2) {
            assert!(
                w[1].1 <= w[0].1,
                "case {case}: interpolated precision increased"
            );
        }
        let gain = if binary { &binary_gain } else { &graded_gain };
        let mut prev = 0.0;
        for k in 1..=run.len() {
            let v = dcg_at_k(&run, &qrels, "t", k, gain, &DiscountSpec::Log2KPlus1).unwrap();
            assert!(v + 1e-12 >= prev, "case {case}: dcg decreased at k={k}");
            prev = v;
        }
        // flat discount with the two-grade linear gain (grades clamp to 0/1,
        // i.e. binary relevance) counts the relevant docs in the top k
        for k in 1..=run.len() {
            let dcg = dcg_at_k(&run, &qrels, "t", k, &binary_gain, &DiscountSpec::Flat).unwrap();
            let p = precision_at_k(&run, &qrels, "t", k).unwrap();
            let scaled = p.value * Fraction::new(k as u64, 1);
            let scaled_f64 = *scaled.numer() as f64 / *scaled.denom() as f64;
            assert_eq!(
                dcg, scaled_f64,
                "case {case}: flat-discount DCG != k * precision at k={k}"
            );
        }
    }

    assert_runtime(started, Duration::from_secs(30), "criterion 6");
    println!("criterion 6 (metric property suite): PASS");
}

// ---------------------------------------------------------------------
// criterion 7: planted near-duplicate recovery
// ---------------------------------------------------------------------

#[test]
fn criterion_7_dedup_planted_pairs() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA7);
    let word = |rng: &mut ChaCha8Rng| format!("w{:03}", rng.gen_range(0..600));

    // exactly 50 documents: 40 independent + 5 pairs at 90% token overlap
    let mut docs: Vec<(String, Vec<String>)> = Vec::new();
    for i in 0..40 {
        let tokens: Vec<String> = (0..100).map(|_| word(&mut rng)).collect();
        docs.push((format!("base{i:02}"), tokens));
    }
    let mut expected = BTreeSet::new();
    for i in 0..5 {
        let original: Vec<String> = (0..100).map(|_| word(&mut rng)).collect();
        let mut variant = original.clone();
        let start = rng.gen_range(0..=90);
        for slot in variant.iter_mut().skip(start).take(10) {
            *slot = format!("alt{:03}", rng.gen_range(0..600));
        }
        expected.insert((format!("pair{i}a"), format!("pair{i}b")));
        docs.push((format!("pair{i}a"), original));
        docs.push((format!("pair{i}b"), variant));
    }
    let mut text = String::new();
    for (id, tokens) in &docs {
        text.push_str(&format!("{id}\tu:{id}\t\t{}\n", tokens.join(" ")));
    }
    let source = CorpusSource::parse(&text).unwrap();
    let seeds: Vec<String> = docs.iter().map(|(id, _)| id.clone()).collect();
    let corpus = ingest(&source, &seeds, &CrawlPolicy::default())
        .unwrap()
        .corpus;
    assert_eq!(corpus.len(), 50);

    let report = find_near_duplicates(&corpus, 4, 0.5).unwrap();
    let got: BTreeSet<(String, String)> = report
        .pairs
        .iter()
        .map(|p| (p.doc_a.clone(), p.doc_b.clone()))
        .collect();
    assert_eq!(
        got, expected,
        "exactly the 5 planted pairs must be reported"
    );

    // every pair's score matches the raw-window Jaccard oracle
    let all: Vec<_> = corpus.iter().collect();
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let wa: BTreeSet<&[String]> = all[i].tokens.windows(4).collect();
            let wb: BTreeSet<&[String]> = all[j].tokens.windows(4).collect();
            let inter = wa.intersection(&wb).count();
            let union = wa.len() + wb.len() - inter;
            let oracle = inter as f64 / union as f64;
            let a = ShingleSet::build(&all[i].doc_id, &all[i].tokens, 4).unwrap();
            let b = ShingleSet::build(&all[j].doc_id, &all[j].tokens, 4).unwrap();
            let got = resemblance(&a, &b).unwrap();
            assert!(
                (got - oracle).abs() < 1e-12,
                "{} vs {}: fingerprint {got} != oracle {oracle}",
                all[i].doc_id,
                all[j].doc_id
            );
        }
    }

    assert_runtime(started, Duration::from_secs(10), "criterion 7");
    println!("criterion 7 (planted near-duplicate recovery): PASS");
}

// ---------------------------------------------------------------------
// criterion 8: end-to-end determinism and pooling
// ---------------------------------------------------------------------

fn webir(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_webir"));
    cmd.current_dir(dir).args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

/// 100-document fixture: a deterministic pseudo-random link structure over
/// a 60-word vocabulary, 10 queries, and graded judgments.
fn pipeline_fixture(dir: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA8);
    let vocab: Vec<String> = (0..60).map(|i| format!("term{i:02}")).collect();
    let mut corpus = String::new();
    for i in 0..100 {
        let mut links = BTreeSet::new();
        for _ in 0..rng.gen_range(2..=4) {
            let t = rng.gen_range(0..100);
            if t != i {
                links.insert(format!("d{t:03}"));
            }
        }
        let words: Vec<&str> = (0..rng.gen_range(8..=20))
            .map(|_| vocab[rng.gen_range(0..vocab.len())].as_str())
            .collect();
        corpus.push_str(&format!(
            "d{i:03}\thttp://site/{i}\t{}\t{}\n",
            links.into_iter().collect::<Vec<_>>().join(","),
            words.join(" ")
        ));
    }
    fs::write(dir.join("corpus.tsv"), corpus).unwrap();

    let mut queries = String::new();
    for topic in 1..=10 {
        queries.push_str(&format!(
            "{topic}\t{} {}\n",
            vocab[(topic * 3) % 60],
            vocab[(topic * 11 + 5) % 60]
        ));
    }
    fs::write(dir.join("queries.tsv"), queries).unwrap();

    let mut qrels = String::new();
    for topic in 1..=10usize {
        for i in 0..100usize {
            let grade = if (i + 7 * topic) % 4 == 0 {
                1 + (i % 2)
            } else {
                0
            };
            qrels.push_str(&format!("{topic} 0 d{i:03} {grade}\n"));
        }
    }
    fs::write(dir.join("qrels.txt"), qrels).unwrap();
}

fn run_pipeline(dir: &Path, out: &str, env: &[(&str, &str)]) -> Vec<(String, Vec<u8>)> {
    let run_path = format!("{out}/run.tsv");
    let both_runs = format!("{out}/run.tsv,{out}/run-b.tsv");
    let steps: Vec<Vec<&str>> = vec![
        vec![
            "ingest",
            "--corpus",
            "corpus.tsv",
            "--seeds",
            "d000,d001,d002",
            "--max-docs",
            "100",
            "--out",
            out,
        ],
        vec!["rank", "--algorithm", "pagerank", "--out", out],
        vec!["search", "--queries", "queries.tsv", "--out", out],
        vec![
            "search",
            "--queries",
            "queries.tsv",
            "--alpha",
            "0.2",
            "--run-file",
            "run-b.tsv",
            "--out",
            out,
        ],
        vec![
            "eval",
            "--run",
            &run_path,
            "--qrels",
            "qrels.txt",
            "--measures",
            "precision@10,recall@10,dcg@10",
            "--out",
            out,
        ],
        vec![
            "pool",
            "--runs",
            &both_runs,
            "--pool-depth",
            "10",
            "--out",
            out,
        ],
    ];
    let mut stdout_log = String::new();
    for step in &steps {
        let result = webir(dir, step, env);
        assert!(
            result.status.success(),
            "step {step:?} failed: {}",
            String::from_utf8_lossy(&result.stderr)
        );
        stdout_log.push_str(&String::from_utf8_lossy(&result.stdout));
    }
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.join(out))
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.push(("stdout".to_owned(), stdout_log.into_bytes()));
    files.sort();
    files
}

#[test]
fn criterion_8_end_to_end_determinism_and_pooling() {
    let started = Instant::now();
    let tmp = TempDir::new().unwrap();
    pipeline_fixture(tmp.path());

    // two runs; the second under a different thread-count hint. The whole
    // pipeline is sequential by contract, so the setting must not matter.
    let first = run_pipeline(tmp.path(), "art-a", &[]);
    let second = run_pipeline(tmp.path(), "art-b", &[("RAYON_NUM_THREADS", "8")]);
    let names = |files: &[(String, Vec<u8>)]| -> Vec<String> {
        files.iter().map(|(n, _)| n.clone()).collect()
    };
    assert_eq!(names(&first), names(&second));
    for ((name_a, bytes_a), (_, bytes_b)) in first.iter().zip(&second) {
        assert_eq!(bytes_a, bytes_b, "artifact {name_a} differs between runs");
    }

    // pooling two runs at depth 10 contains both top-10 sets per topic and
    // never exceeds 20 documents per topic
    let run_a = webir::evaluation::RunSet::parse(
        &fs::read_to_string(tmp.path().join("art-a/run.tsv")).unwrap(),
    )
    .unwrap();
    let run_b = webir::evaluation::RunSet::parse(
        &fs::read_to_string(tmp.path().join("art-a/run-b.tsv")).unwrap(),
    )
    .unwrap();
    let sheet = fs::read_to_string(tmp.path().join("art-a/pool.tsv")).unwrap();
    let mut pooled: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for line in sheet.lines() {
        let (topic, doc) = line.split_once(' ').unwrap();
        pooled
            .entry(topic.to_owned())
            .or_default()
            .insert(doc.to_owned());
    }
    for run in [&run_a, &run_b] {
        for topic in run.topics() {
            let top10: BTreeSet<String> = run
                .topic(topic)
                .unwrap()
                .iter()
                .take(10)
                .map(|d| d.doc_id.clone())
                .collect();
            let pool_docs = &pooled[topic];
            assert!(
                top10.is_subset(pool_docs),
                "topic {topic}: pool misses part of a top-10 set"
            );
            assert!(pool_docs.len() <= 20, "topic {topic}: pool exceeds 2 * N");
        }
    }

    assert_runtime(started, Duration::from_secs(30), "criterion 8");
    println!("criterion 8 (end-to-end determinism and pooling): PASS");
}
