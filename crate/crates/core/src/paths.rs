//! Recovering the directed prerequisite graph from a trained model and
//! analysing it: degrees, shortest paths, simple-path enumeration.
//!
//! Recovered graphs routinely contain cycles, so enumeration is bounded by
//! an explicit maximum path length and result cap, which keeps it total.

use std::collections::VecDeque;

use thiserror::Error;

use crate::graph::ConceptGraph;
use crate::model::{distmult_scores, encode_deterministic, ModelParams};

#[derive(Debug, Error)]
pub enum PathError {
    #[error("node {0} is outside this graph (has {1} nodes)")]
    UnknownNode(usize, usize),
    #[error("{0} must be at least 1")]
    ZeroBound(&'static str),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}

pub type Result<T> = std::result::Result<T, PathError>;

/// Directed graph of predicted prerequisite edges over target concepts.
///
/// Node indices are local (`0..node_count`); `node_ids` maps them back to
/// vocabulary concept ids.
#[derive(Debug, Clone)]
pub struct RecoveredGraph {
    node_ids: Vec<usize>,
    /// Outgoing neighbors per node, ascending, no self-edges.
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl RecoveredGraph {
    /// Build directly from directed edges over `0..n` (analysis of arbitrary
    /// digraphs, oracle tests). Self-edges are dropped, duplicates merged.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (p, q) in edges {
            if p != q && p < n && q < n {
                adjacency[p].push(q);
            }
        }
        let mut edge_count = 0;
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
            nbrs.dedup();
            edge_count += nbrs.len();
        }
        Self {
            node_ids: (0..n).collect(),
            adjacency,
            edge_count,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node_ids(&self) -> &[usize] {
        &self.node_ids
    }

    pub fn neighbors(&self, p: usize) -> &[usize] {
        &self.adjacency[p]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(p, nbrs)| nbrs.iter().map(move |&q| (p, q)))
    }

    /// Local node index of a vocabulary concept id.
    pub fn index_of(&self, concept_id: usize) -> Option<usize> {
        self.node_ids.iter().position(|&c| c == concept_id)
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.node_count() {
            return Err(PathError::UnknownNode(v, self.node_count()));
        }
        Ok(())
    }
}

/// Predict the directed prerequisite graph: edge `p -> q` iff the model's
/// probability for the ordered pair reaches `threshold`.
///
/// When `graph` mixes domains the recovery is restricted to target-domain
/// nodes (the domain whose relations are being predicted); a pure
/// single-domain graph is used whole.
pub fn recover_graph(
    params: &ModelParams,
    graph: &ConceptGraph,
    threshold: f64,
) -> Result<RecoveredGraph> {
    let enc = encode_deterministic(graph, &params.encoder)?;
    let logits = distmult_scores(&enc.z, &params.distmult)?;
    let labels = graph.domain_labels();
    let nodes: Vec<usize> = if labels.iter().any(|&l| l == 0.0) {
        (0..graph.node_count()).filter(|&p| labels[p] == 0.0).collect()
    } else {
        (0..graph.node_count()).collect()
    };
    let n = nodes.len();
    let mut adjacency = vec![Vec::new(); n];
    let mut edge_count = 0;
    for (i, &p) in nodes.iter().enumerate() {
        for (j, &q) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let probability = sigmoid(logits.get(p, q));
            if probability >= threshold {
                adjacency[i].push(j);
                edge_count += 1;
            }
        }
    }
    Ok(RecoveredGraph {
        node_ids: nodes.iter().map(|&p| graph.node_ids()[p]).collect(),
        adjacency,
        edge_count,
    })
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Per-node in/out degrees. The two totals both equal the edge count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeStats {
    pub out_degrees: Vec<usize>,
    pub in_degrees: Vec<usize>,
    pub edge_count: usize,
}

pub fn degree_stats(graph: &RecoveredGraph) -> DegreeStats {
    let n = graph.node_count();
    let mut out_degrees = vec![0; n];
    let mut in_degrees = vec![0; n];
    for (p, q) in graph.edges() {
        out_degrees[p] += 1;
        in_degrees[q] += 1;
    }
    DegreeStats {
        out_degrees,
        in_degrees,
        edge_count: graph.edge_count(),
    }
}

/// Minimum-hop directed path from `src` to `dst`, or `None` when
/// unreachable. Breadth-first with neighbors explored in ascending index
/// order, so among equally short paths the lexicographically smallest node
/// sequence is returned. `src == dst` yields the zero-length path `[src]`.
pub fn shortest_path(graph: &RecoveredGraph, src: usize, dst: usize) -> Result<Option<Vec<usize>>> {
    graph.check_node(src)?;
    graph.check_node(dst)?;
    if src == dst {
        return Ok(Some(vec![src]));
    }
    let n = graph.node_count();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    visited[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if !visited[v] {
                visited[v] = true;
                parent[v] = Some(u);
                if v == dst {
                    let mut path = vec![dst];
                    let mut cur = dst;
                    while let Some(p) = parent[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Ok(Some(path));
                }
                queue.push_back(v);
            }
        }
    }
    Ok(None)
}

/// Result of a bounded simple-path enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnumeration {
    /// Paths as node sequences, lexicographic order, each starting at `src`
    /// and ending at `dst` with no repeated vertex.
    pub paths: Vec<Vec<usize>>,
    /// Mean path length in edges over the returned paths.
    pub mean_length: Option<f64>,
    /// True when the `max_count` cap stopped the enumeration early.
    pub truncated: bool,
}

/// Depth-first enumeration of all simple directed paths from `src` to `dst`
/// with at most `max_len` edges, capped at `max_count` results.
///
/// Neighbors are explored in ascending order, which makes the output order
/// lexicographic by node sequence. Cycles are handled by the simple-path
/// constraint itself: a path may not revisit a vertex.
pub fn enumerate_simple_paths(
    graph: &RecoveredGraph,
    src: usize,
    dst: usize,
    max_len: usize,
    max_count: usize,
) -> Result<PathEnumeration> {
    graph.check_node(src)?;
    graph.check_node(dst)?;
    if max_len < 1 {
        return Err(PathError::ZeroBound("max_len"));
    }
    if max_count < 1 {
        return Err(PathError::ZeroBound("max_count"));
    }
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut truncated = false;
    let mut on_path = vec![false; graph.node_count()];
    let mut path = vec![src];
    on_path[src] = true;
    // Iterative DFS; stack[i] is the next neighbor index to try from path[i].
    let mut stack: Vec<usize> = vec![0];
    if src == dst {
        paths.push(path.clone());
    } else {
        'dfs: while !stack.is_empty() {
            let frame = stack.len() - 1;
            let u = path[frame];
            let neighbors = graph.neighbors(u);
            let mut advanced = false;
            while stack[frame] < neighbors.len() {
                let v = neighbors[stack[frame]];
                stack[frame] += 1;
                if on_path[v] {
                    continue;
                }
                if v == dst {
                    paths.push(path.iter().copied().chain([dst]).collect());
                    if paths.len() == max_count {
                        truncated = true;
                        break 'dfs;
                    }
                    continue;
                }
                if path.len() <= max_len.saturating_sub(1) {
                    // Entering v still leaves room for the edge to dst.
                    path.push(v);
                    on_path[v] = true;
                    stack.push(0);
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                let done = path.pop().expect("path tracks stack");
                on_path[done] = false;
                stack.pop();
            }
        }
    }
    let mean_length = if paths.is_empty() {
        None
    } else {
        Some(paths.iter().map(|p| (p.len() - 1) as f64).sum::<f64>() / paths.len() as f64)
    };
    Ok(PathEnumeration {
        paths,
        mean_length,
        truncated,
    })
}
