//! Unweighted graphs and the MaxCut cost observable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ObservableSum, PauliTerm};

/// Largest graph whose maximum cut is found by enumeration.
pub const MAX_ENUMERATION_NODES: usize = 20;

/// Simple undirected graph. Edges are stored as `(u, v)` with `u < v`,
/// sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Validation(format!("self-loop on node {a}")));
            }
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::Validation(format!("edge ({a}, {b}) outside {n_nodes} nodes")));
            }
            out.push((a.min(b), a.max(b)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Graph { n_nodes, edges: out })
    }

    /// Triangular prism: two triangles joined by a matching. 3-regular on 6
    /// nodes, maximum cut 7.
    pub fn prism() -> Self {
        Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]).expect("static graph")
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).expect("complete graph")
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    /// Edges crossing the partition; node `i` is on side `bits[i]`.
    pub fn cut_value(&self, bits: &[bool]) -> usize {
        self.edges.iter().filter(|&&(a, b)| bits[a] != bits[b]).count()
    }

    /// Maximum cut by enumeration, with one optimal assignment.
    pub fn max_cut(&self) -> Result<(usize, Vec<bool>)> {
        let n = self.n_nodes;
        if n > MAX_ENUMERATION_NODES {
            return Err(Error::Capacity {
                dim: n,
                max: MAX_ENUMERATION_NODES,
            });
        }
        let mut best = (0, vec![false; n]);
        // node 0 fixed to side 0 by symmetry
        for mask in 0..1usize << n.saturating_sub(1) {
            let bits: Vec<bool> = (0..n).map(|i| i > 0 && mask >> (i - 1) & 1 == 1).collect();
            let c = self.cut_value(&bits);
            if c > best.0 {
                best = (c, bits);
            }
        }
        Ok(best)
    }
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut n_nodes: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(body) = line.strip_prefix('#') {
            if let Some(v) = body.trim().strip_prefix("nodes:") {
                n_nodes = Some(v.trim().parse().map_err(|_| err(format!("bad node count `{}`", v.trim())))?);
            }
            continue;
        }
        let nums: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = nums.as_slice() else {
            return Err(err(format!("expected `u v`, got `{line}`")));
        };
        let parse = |s: &str| s.parse::<usize>().map_err(|_| err(format!("`{s}` is not a node index")));
        edges.push((parse(a)?, parse(b)?));
    }
    let n = n_nodes.ok_or(Error::Parse {
        line: 0,
        msg: "missing `# nodes: N` header".into(),
    })?;
    Graph::new(n, edges)
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    parse_graph(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

/// Cost observable `Σ_(u,v) ½(Z_u Z_v − I)`, whose value on a basis state
/// is minus its cut.
pub fn maxcut_to_ising(g: &Graph) -> Result<ObservableSum> {
    let n = g.n_nodes;
    let mut terms = Vec::with_capacity(g.edges.len() + 1);
    for &(a, b) in &g.edges {
        let letters: String = (0..n).map(|q| if q == a || q == b { 'Z' } else { 'I' }).collect();
        terms.push(PauliTerm::new(0.5, letters)?);
    }
    if !g.edges.is_empty() {
        terms.push(PauliTerm::new(-0.5 * g.edges.len() as f64, "I".repeat(n))?);
    }
    ObservableSum::new(n.max(1), terms)
}

/// Cut of `bitstring` (qubit 0 leftmost) divided by the maximum cut.
pub fn approximation_ratio(g: &Graph, bitstring: &str) -> Result<f64> {
    if bitstring.len() != g.n_nodes || !bitstring.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Validation(format!(
            "`{bitstring}` is not a {}-bit string",
            g.n_nodes
        )));
    }
    let (best, _) = g.max_cut()?;
    if best == 0 {
        return Ok(1.0);
    }
    let bits: Vec<bool> = bitstring.bytes().map(|b| b == b'1').collect();
    Ok(g.cut_value(&bits) as f64 / best as f64)
}
