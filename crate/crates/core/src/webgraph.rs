//! Directed page graph with the degree and back-link accessors both ranking
//! algorithms need. Forward and backward adjacency are kept as exact
//! transposes; parallel edges and self-loops are dropped at insertion.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("edge dump line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

/// Directed graph over doc_ids. Neighbor sets iterate in doc_id order, so
/// every traversal over the graph is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WebGraph {
    nodes: BTreeSet<String>,
    forward: BTreeMap<String, BTreeSet<String>>,
    backward: BTreeMap<String, BTreeSet<String>>,
}

impl WebGraph {
    pub fn new() -> Self {
        WebGraph::default()
    }

    /// Convenience constructor; endpoints are added as nodes implicitly.
    pub fn from_edges<'a, I: IntoIterator<Item = (&'a str, &'a str)>>(edges: I) -> Self {
        let mut g = WebGraph::new();
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_node(&mut self, id: &str) {
        if self.nodes.insert(id.to_owned()) {
            self.forward.insert(id.to_owned(), BTreeSet::new());
            self.backward.insert(id.to_owned(), BTreeSet::new());
        }
    }

    /// Inserts the edge (u, v). Self-loops and repeated edges are no-ops.
    pub fn add_edge(&mut self, u: &str, v: &str) {
        if u == v {
            return;
        }
        self.add_node(u);
        self.add_node(v);
        self.forward.get_mut(u).unwrap().insert(v.to_owned());
        self.backward.get_mut(v).unwrap().insert(u.to_owned());
    }

    pub fn contains(&self, id: &str) -> bool {
        self.nodes.contains(id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.forward.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when the graph carries no edge at all.
    pub fn is_edgeless(&self) -> bool {
        self.edge_count() == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    /// Edges in lexicographic (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.forward
            .iter()
            .flat_map(|(u, vs)| vs.iter().map(move |v| (u.as_str(), v.as_str())))
    }

    /// Number of links going out of `page`.
    pub fn out_degree(&self, page: &str) -> Result<usize, GraphError> {
        self.forward
            .get(page)
            .map(BTreeSet::len)
            .ok_or_else(|| GraphError::UnknownNode(page.to_owned()))
    }

    /// Out-neighbors of `page`, sorted by doc_id.
    pub fn forward_links(&self, page: &str) -> Result<&BTreeSet<String>, GraphError> {
        self.forward
            .get(page)
            .ok_or_else(|| GraphError::UnknownNode(page.to_owned()))
    }

    /// Pages pointing at `page` (its back links), sorted by doc_id.
    pub fn back_links(&self, page: &str) -> Result<&BTreeSet<String>, GraphError> {
        self.backward
            .get(page)
            .ok_or_else(|| GraphError::UnknownNode(page.to_owned()))
    }

    /// Induced subgraph on `keep`. Errors if `keep` mentions unknown nodes.
    pub fn subgraph(&self, keep: &BTreeSet<String>) -> Result<WebGraph, GraphError> {
        for id in keep {
            if !self.contains(id) {
                return Err(GraphError::UnknownNode(id.clone()));
            }
        }
        let mut g = WebGraph::new();
        for id in keep {
            g.add_node(id);
            for v in &self.forward[id] {
                if keep.contains(v) {
                    g.add_edge(id, v);
                }
            }
        }
        Ok(g)
    }

    /// Canonical serialization: one `source<TAB>target` line per edge,
    /// sorted lexicographically.
    pub fn to_edge_dump(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.edges() {
            out.push_str(u);
            out.push('\t');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// Parses an edge dump produced by [`WebGraph::to_edge_dump`]. Isolated
    /// nodes do not appear in a dump; callers that need them must add them
    /// back via [`WebGraph::add_node`].
    pub fn from_edge_dump(text: &str) -> Result<WebGraph, GraphError> {
        let mut g = WebGraph::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split('\t');
            match (it.next(), it.next(), it.next()) {
                (Some(u), Some(v), None) if !u.is_empty() && !v.is_empty() => g.add_edge(u, v),
                _ => {
                    return Err(GraphError::Malformed {
                        line: idx + 1,
                        msg: "expected `source<TAB>target`".into(),
                    })
                }
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn figure1() -> WebGraph {
        WebGraph::from_edges([("A", "B"), ("C", "B")])
    }

    #[test]
    fn out_degree_isolated_node() {
        let mut g = WebGraph::new();
        g.add_node("X");
        assert_eq!(g.out_degree("X").unwrap(), 0);
    }

    #[test]
    fn out_degree_figure1() {
        assert_eq!(figure1().out_degree("A").unwrap(), 1);
    }

    #[test]
    fn back_links_figure1() {
        let g = figure1();
        let backs: Vec<&str> = g
            .back_links("B")
            .unwrap()
            .iter()
            .map(String::as_str)
            .collect();
        assert_eq!(backs, vec!["A", "C"]);
        assert!(g.back_links("A").unwrap().is_empty());
    }

    #[test]
    fn unknown_node_errors() {
        let g = figure1();
        assert!(matches!(g.out_degree("Z"), Err(GraphError::UnknownNode(_))));
        assert!(matches!(g.back_links("Z"), Err(GraphError::UnknownNode(_))));
        let keep: BTreeSet<String> = ["A".to_owned(), "Z".to_owned()].into();
        assert!(matches!(g.subgraph(&keep), Err(GraphError::UnknownNode(_))));
    }

    #[test]
    fn duplicate_edge_and_self_loop_are_noops() {
        let mut g = figure1();
        let (n, e) = (g.node_count(), g.edge_count());
        g.add_edge("A", "B");
        g.add_edge("A", "A");
        assert_eq!((g.node_count(), g.edge_count()), (n, e));
    }

    #[test]
    fn subgraph_identity_and_empty() {
        let g = figure1();
        let all: BTreeSet<String> = g.nodes().map(str::to_owned).collect();
        assert_eq!(g.subgraph(&all).unwrap(), g);
        let empty = g.subgraph(&BTreeSet::new()).unwrap();
        assert_eq!(empty.node_count(), 0);
        assert_eq!(empty.edge_count(), 0);
    }

    #[test]
    fn edge_dump_round_trip() {
        let g = figure1();
        let dump = g.to_edge_dump();
        assert_eq!(dump, "A\tB\nC\tB\n");
        assert_eq!(WebGraph::from_edge_dump(&dump).unwrap(), g);
        assert!(WebGraph::from_edge_dump("A only\n").is_err());
    }

    /// Random graph on `n` nodes whose edges are decided by the bit stream.
    fn build_random(n: usize, bits: &[bool]) -> WebGraph {
        let mut g = WebGraph::new();
        let names: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
        for name in &names {
            g.add_node(name);
        }
        let mut k = 0;
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    if bits.get(k).copied().unwrap_or(false) {
                        g.add_edge(&names[u], &names[v]);
                    }
                    k += 1;
                }
            }
        }
        g
    }

    proptest! {
        #[test]
        fn handshake_sum_of_out_degrees(n in 1usize..10, bits in proptest::collection::vec(any::<bool>(), 90)) {
            let g = build_random(n, &bits);
            let total: usize = g.nodes().map(|u| g.out_degree(u).unwrap()).sum();
            prop_assert_eq!(total, g.edge_count());
        }

        #[test]
        fn transpose_consistency(n in 1usize..10, bits in proptest::collection::vec(any::<bool>(), 90)) {
            let g = build_random(n, &bits);
            for u in g.nodes() {
                for v in g.forward_links(u).unwrap() {
                    prop_assert!(g.back_links(v).unwrap().contains(u));
                }
                for v in g.back_links(u).unwrap() {
                    prop_assert!(g.forward_links(v).unwrap().contains(u));
                }
            }
        }

        #[test]
        fn subgraph_matches_brute_force_filter(bits in proptest::collection::vec(any::<bool>(), 90), keep_bits in proptest::collection::vec(any::<bool>(), 10)) {
            let g = build_random(10, &bits);
            let keep: BTreeSet<String> = g
                .nodes()
                .enumerate()
                .filter(|(i, _)| keep_bits[*i])
                .map(|(_, id)| id.to_owned())
                .collect();
            let sub = g.subgraph(&keep).unwrap();
            let expected: BTreeSet<(String, String)> = g
                .edges()
                .filter(|(u, v)| keep.contains(*u) && keep.contains(*v))
                .map(|(u, v)| (u.to_owned(), v.to_owned()))
                .collect();
            let actual: BTreeSet<(String, String)> = sub
                .edges()
                .map(|(u, v)| (u.to_owned(), v.to_owned()))
                .collect();
            prop_assert_eq!(actual, expected);
            prop_assert_eq!(sub.nodes().count(), keep.len());
            // applying the same filter twice changes nothing
            prop_assert_eq!(&sub.subgraph(&keep).unwrap(), &sub);
        }
    }
}
