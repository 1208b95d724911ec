//! Directed causal graphs that may contain cycles.
//!
//! Adjacency is stored cause-row / effect-column. The children sets are kept in lockstep
//! with the matrix so either view can be used for queries.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of simple paths enumerated for a single query.
pub const DEFAULT_PATH_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalGraph {
    names: Vec<String>,
    adjacency: Vec<Vec<u8>>,
    children: Vec<BTreeSet<usize>>,
}

impl CausalGraph {
    /// Graph with no edges.
    pub fn empty(names: Vec<String>) -> Self {
        let n = names.len();
        Self {
            names,
            adjacency: vec![vec![0; n]; n],
            children: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(names);
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Builds a graph from a 0/1 matrix. Non-zero diagonal entries are rejected.
    pub fn from_adjacency(names: Vec<String>, adjacency: Vec<Vec<u8>>) -> Result<Self> {
        let n = names.len();
        if adjacency.len() != n || adjacency.iter().any(|r| r.len() != n) {
            return Err(Error::data(format!(
                "adjacency matrix must be {n}x{n} to match the node names"
            )));
        }
        let mut g = Self::empty(names);
        for (i, row) in adjacency.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => g.add_edge(i, j)?,
                    other => {
                        return Err(Error::data(format!(
                            "adjacency entry ({i}, {j}) is {other}, expected 0 or 1"
                        )))
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn adjacency(&self) -> &[Vec<u8>] {
        &self.adjacency
    }

    pub fn children(&self, i: usize) -> &BTreeSet<usize> {
        &self.children[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j] == 1
    }

    /// All edges in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(i, ch)| ch.iter().map(move |&j| (i, j)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(BTreeSet::len).sum()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        let n = self.node_count();
        if i >= n || j >= n {
            return Err(Error::param(format!(
                "edge ({i}, {j}) references a node outside 0..{n}"
            )));
        }
        if i == j {
            return Err(Error::param(format!(
                "self-loop on node {i} is not allowed"
            )));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.adjacency[i][j] = 1;
        self.children[i].insert(j);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_pair(i, j)?;
        self.adjacency[i][j] = 0;
        self.children[i].remove(&j);
        Ok(())
    }

    /// True when every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &CausalGraph) -> bool {
        self.node_count() == other.node_count()
            && self.edges().iter().all(|&(i, j)| other.has_edge(i, j))
    }

    /// Relabels nodes; `order[i]` is the old index of new node `i`.
    pub fn permuted(&self, order: &[usize]) -> Result<CausalGraph> {
        let n = self.node_count();
        let mut new_of_old = vec![usize::MAX; n];
        for (new, &old) in order.iter().enumerate() {
            if old >= n || new_of_old[old] != usize::MAX {
                return Err(Error::param("permutation is not a bijection"));
            }
            new_of_old[old] = new;
        }
        if order.len() != n {
            return Err(Error::param("permutation has the wrong length"));
        }
        let names = order.iter().map(|&o| self.names[o].clone()).collect();
        let edges: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(i, j)| (new_of_old[i], new_of_old[j]))
            .collect();
        CausalGraph::from_edges(names, &edges)
    }

    /// Visits every simple path `from ~> to` with at least two edges. The callback receives
    /// the full node sequence. Fails once more than `cap` paths have been seen.
    pub fn for_each_mediated_path(
        &self,
        from: usize,
        to: usize,
        cap: usize,
        mut visit: impl FnMut(&[usize]),
    ) -> Result<()> {
        let n = self.node_count();
        if from >= n || to >= n || from == to {
            return Ok(());
        }
        let mut on_path = vec![false; n];
        let mut path = vec![from];
        on_path[from] = true;
        let mut count = 0usize;
        // explicit DFS stack of child iterators
        let mut stack: Vec<Vec<usize>> = vec![self.children[from].iter().copied().collect()];
        while let Some(frontier) = stack.last_mut() {
            let Some(next) = frontier.pop() else {
                stack.pop();
                if let Some(v) = path.pop() {
                    on_path[v] = false;
                }
                continue;
            };
            if on_path[next] {
                continue;
            }
            if next == to {
                // the direct edge gives a one-edge path, which does not count
                if path.len() >= 2 {
                    count += 1;
                    if count > cap {
                        return Err(Error::PathLimit(cap));
                    }
                    path.push(to);
                    visit(&path);
                    path.pop();
                }
                continue;
            }
            on_path[next] = true;
            path.push(next);
            stack.push(self.children[next].iter().copied().collect());
        }
        Ok(())
    }

    /// Interior nodes of all simple paths `i ~> j` other than the direct edge.
    pub fn intermediate_nodes(&self, i: usize, j: usize) -> Result<BTreeSet<usize>> {
        self.intermediate_nodes_capped(i, j, DEFAULT_PATH_CAP)
    }

    pub fn intermediate_nodes_capped(
        &self,
        i: usize,
        j: usize,
        cap: usize,
    ) -> Result<BTreeSet<usize>> {
        let mut nodes = BTreeSet::new();
        self.for_each_mediated_path(i, j, cap, |p| {
            nodes.extend(p[1..p.len() - 1].iter().copied());
        })?;
        Ok(nodes)
    }

    /// True iff some simple path `i ~> j` has at least two edges.
    pub fn has_indirect_path(&self, i: usize, j: usize) -> bool {
        let n = self.node_count();
        if i >= n || j >= n || i == j {
            return false;
        }
        // reachability of j from any child of i without revisiting i
        let mut seen = vec![false; n];
        seen[i] = true;
        let mut stack: Vec<usize> = self.children[i]
            .iter()
            .copied()
            .filter(|&c| c != j)
            .collect();
        for &c in &stack {
            seen[c] = true;
        }
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                if c == j {
                    return true;
                }
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph causal {\n");
        for name in &self.names {
            let _ = writeln!(out, "  \"{}\";", escape_dot(name));
        }
        for (i, j) in self.edges() {
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\";",
                escape_dot(&self.names[i]),
                escape_dot(&self.names[j])
            );
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            names: self.names.clone(),
            adjacency: self.adjacency.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("graph document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| Error::data(format!("graph json: {e}")))?;
        Self::from_adjacency(doc.names, doc.adjacency)
    }

    /// Header of node names, then one cause-indexed row of 0/1 per node.
    pub fn to_matrix_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.names).expect("in-memory write");
        for row in &self.adjacency {
            w.write_record(row.iter().map(|v| v.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn from_matrix_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let names: Vec<String> = r
            .headers()
            .map_err(|e| Error::data(format!("matrix csv header: {e}")))?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let mut adjacency = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::data(format!("matrix csv row {}: {e}", line + 1)))?;
            let row = rec
                .iter()
                .map(|f| {
                    f.trim().parse::<u8>().map_err(|_| {
                        Error::data(format!("matrix csv row {}: bad entry `{f}`", line + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            adjacency.push(row);
        }
        Self::from_adjacency(names, adjacency)
    }

    pub fn export(&self, format: GraphFormat) -> String {
        match format {
            GraphFormat::Dot => self.to_dot(),
            GraphFormat::Json => self.to_json(),
            GraphFormat::MatrixCsv => self.to_matrix_csv(),
        }
    }

    pub fn import(text: &str, format: GraphFormat) -> Result<Self> {
        match format {
            GraphFormat::Json => Self::from_json(text),
            GraphFormat::MatrixCsv => Self::from_matrix_csv(text),
            GraphFormat::Dot => Err(Error::param("importing DOT is not supported")),
        }
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    names: Vec<String>,
    adjacency: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
    MatrixCsv,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(Self::Dot),
            "json" => Ok(Self::Json),
            "csv" | "matrix-csv" => Ok(Self::MatrixCsv),
            other => Err(Error::param(format!("unknown graph format `{other}`"))),
        }
    }
}

impl Serialize for CausalGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphDoc {
            names: self.names.clone(),
            adjacency: self.adjacency.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CausalGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = GraphDoc::deserialize(d)?;
        CausalGraph::from_adjacency(doc.names, doc.adjacency).map_err(serde::de::Error::custom)
    }
}

/// Names `v0, v1, ...`.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> CausalGraph {
        CausalGraph::from_edges(default_names(n), edges).unwrap()
    }

    #[test]
    fn add_remove_inverse_and_idempotent() {
        let base = g(3, &[(0, 1)]);
        let mut h = base.clone();
        h.add_edge(1, 2).unwrap();
        h.remove_edge(1, 2).unwrap();
        assert_eq!(h, base);
        h.add_edge(0, 1).unwrap();
        assert_eq!(h, base);
    }

    #[test]
    fn two_cycle_and_self_loop() {
        let mut h = g(2, &[(0, 1), (1, 0)]);
        assert!(h.has_edge(0, 1) && h.has_edge(1, 0));
        assert!(h.add_edge(1, 1).is_err());
        assert!(h.add_edge(0, 2).is_err());
    }

    #[test]
    fn mediated_chain() {
        let h = g(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(h.intermediate_nodes(0, 2).unwrap(), BTreeSet::from([1]));
        assert!(h.has_indirect_path(0, 2));
        assert!(!h.has_indirect_path(0, 1));
    }

    #[test]
    fn lone_edge() {
        let h = g(2, &[(0, 1)]);
        assert!(h.intermediate_nodes(0, 1).unwrap().is_empty());
        assert!(!h.has_indirect_path(0, 1));
    }

    #[test]
    fn chain_without_direct_edge() {
        assert!(g(3, &[(0, 1), (1, 2)]).has_indirect_path(0, 2));
    }

    #[test]
    fn diamond() {
        let h = g(4, &[(0, 1), (1, 3), (0, 2), (2, 3), (0, 3)]);
        assert_eq!(h.intermediate_nodes(0, 3).unwrap(), BTreeSet::from([1, 2]));
    }

    #[test]
    fn cycles_terminate() {
        let h = g(4, &[(0, 1), (1, 2), (2, 1), (2, 0), (2, 3), (0, 3), (3, 0)]);
        assert_eq!(h.intermediate_nodes(0, 3).unwrap(), BTreeSet::from([1, 2]));
        assert!(h.has_indirect_path(3, 1));
    }

    #[test]
    fn path_cap() {
        let n = 8;
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let h = g(n, &edges);
        assert!(matches!(
            h.intermediate_nodes_capped(0, 7, 100),
            Err(Error::PathLimit(100))
        ));
        // 1956 mediated simple paths between two nodes of K8, under the default cap
        assert_eq!(h.intermediate_nodes(0, 7).unwrap().len(), 6);
    }

    #[test]
    fn empty_matrix_csv() {
        let h = g(3, &[]);
        assert_eq!(h.to_matrix_csv(), "v0,v1,v2\n0,0,0\n0,0,0\n0,0,0\n");
    }

    #[test]
    fn chain_dot() {
        let dot = g(3, &[(0, 1), (1, 2)]).to_dot();
        assert_eq!(dot.matches("->").count(), 2);
        assert!(dot.contains("\"v0\" -> \"v1\""));
    }

    #[test]
    fn imports_reject_bad_input() {
        assert!(CausalGraph::from_matrix_csv("a,b\n0,1\n").is_err());
        assert!(CausalGraph::from_matrix_csv("a,b\n0,2\n0,0\n").is_err());
        assert!(CausalGraph::from_matrix_csv("a,b\n1,0\n0,0\n").is_err());
        assert!(CausalGraph::from_json("{\"names\":[\"a\"],\"adjacency\":[[0,0]]}").is_err());
    }

    #[test]
    fn permutation_relabels() {
        let h = g(3, &[(0, 1), (1, 2)]);
        let p = h.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.names(), &["v2", "v0", "v1"]);
        assert!(p.has_edge(1, 2) && p.has_edge(2, 0));
        assert_eq!(p.edge_count(), 2);
    }
}
