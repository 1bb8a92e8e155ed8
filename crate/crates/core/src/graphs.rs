//! Sender graphs: the pairwise exchange conditions induced by a utility
//! matrix.
//!
//! For distinct symbols `x`, `y` the *strong* sender graph `G_F` has the edge
//! `{x,y}` when `U(x,x) ≤ U(y,x)` **and** `U(y,y) ≤ U(x,y)` — each symbol
//! weakly prefers the other to be recovered in its place. The *weak* graph
//! `G_L` uses the same comparisons with **or**. Both rules are non-strict,
//! which is why the crate insists on exact rational arithmetic: a rounded tie
//! flips edges.

use std::collections::BTreeSet;

use crate::error::{GameError, Result};
use crate::game::UtilityMatrix;

/// Which edge rule produced a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GraphFlavor {
    Strong,
    Weak,
}

impl GraphFlavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            GraphFlavor::Strong => "strong",
            GraphFlavor::Weak => "weak",
        }
    }
}

/// An undirected simple graph on the symbol alphabet, tagged with the edge
/// rule that produced it. Stored as sorted adjacency sets; the solvers in
/// [`crate::cliques`] convert to per-vertex bitsets on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenderGraph {
    q: usize,
    flavor: GraphFlavor,
    adj: Vec<BTreeSet<usize>>,
}

impl SenderGraph {
    /// Builds a graph from an explicit edge list (used by tests and by the
    /// solver suites that exercise graphs directly).
    pub fn from_edges(q: usize, flavor: GraphFlavor, edges: &[(usize, usize)]) -> Result<Self> {
        if q == 0 {
            return Err(GameError::Domain("graph needs at least one vertex".into()));
        }
        let mut adj = vec![BTreeSet::new(); q];
        for &(x, y) in edges {
            if x >= q || y >= q {
                return Err(GameError::Domain(format!("edge ({x},{y}) outside vertex set of size {q}")));
            }
            if x == y {
                return Err(GameError::Domain(format!("self-loop at vertex {x}")));
            }
            adj[x].insert(y);
            adj[y].insert(x);
        }
        Ok(SenderGraph { q, flavor, adj })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn flavor(&self) -> GraphFlavor {
        self.flavor
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.adj[x].contains(&y)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    /// Edge list as sorted pairs `(min, max)`, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.q {
            for &y in self.adj[x].range(x + 1..) {
                out.push((x, y));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    /// True iff every pair inside `members` is an edge (singletons and the
    /// empty set count as cliques).
    pub fn is_clique(&self, members: &[usize]) -> bool {
        members
            .iter()
            .enumerate()
            .all(|(i, &x)| members[i + 1..].iter().all(|&y| self.has_edge(x, y)))
    }

    /// The complement graph (same vertex set and flavor tag).
    pub fn complement(&self) -> SenderGraph {
        let mut adj = vec![BTreeSet::new(); self.q];
        for x in 0..self.q {
            for y in 0..self.q {
                if x != y && !self.adj[x].contains(&y) {
                    adj[x].insert(y);
                }
            }
        }
        SenderGraph { q: self.q, flavor: self.flavor, adj }
    }

    /// Per-vertex adjacency bitsets. The clique machinery requires `q ≤ 64`;
    /// its own limits are far tighter, so this only guards the conversion.
    pub(crate) fn bitset_rows(&self) -> Result<Vec<u64>> {
        if self.q > 64 {
            return Err(GameError::SizeLimit(format!(
                "bitset adjacency supports at most 64 vertices, got {}",
                self.q
            )));
        }
        Ok(self
            .adj
            .iter()
            .map(|nbrs| nbrs.iter().fold(0u64, |m, &v| m | (1 << v)))
            .collect())
    }
}

fn build_graph(u: &UtilityMatrix, flavor: GraphFlavor) -> SenderGraph {
    let q = u.q();
    let mut adj = vec![BTreeSet::new(); q];
    for x in 0..q {
        for y in x + 1..q {
            let x_prefers_y = u.at(x, x) <= u.at(y, x);
            let y_prefers_x = u.at(y, y) <= u.at(x, y);
            let edge = match flavor {
                GraphFlavor::Strong => x_prefers_y && y_prefers_x,
                GraphFlavor::Weak => x_prefers_y || y_prefers_x,
            };
            if edge {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
    }
    SenderGraph { q, flavor, adj }
}

/// The strong sender graph `G_F`: edge `{x,y}` iff `U(x,x) ≤ U(y,x)` and
/// `U(y,y) ≤ U(x,y)`.
pub fn strong_sender_graph(u: &UtilityMatrix) -> SenderGraph {
    build_graph(u, GraphFlavor::Strong)
}

/// The weak sender graph `G_L`: edge `{x,y}` iff `U(x,x) ≤ U(y,x)` or
/// `U(y,y) ≤ U(x,y)`.
pub fn weak_sender_graph(u: &UtilityMatrix) -> SenderGraph {
    build_graph(u, GraphFlavor::Weak)
}
