//! Contention graph over flows.
//!
//! Vertices are flow indices. Two flows are in contention (share an edge)
//! when they share an endpoint node — half-duplex radios can never serve
//! both at once — or when their normalized pairwise interference reaches
//! the threshold sigma.

use std::io::Write;

use crate::error::Result;
use crate::model::{interference_power, Scenario};
use crate::params::SystemParams;

/// Immutable contention graph with the pairwise interference weights it was
/// built from. Adjacent (node-sharing) pairs carry no weight; their edge is
/// unconditional.
#[derive(Debug, Clone)]
pub struct ContentionGraph {
    n: usize,
    sigma: f64,
    adjacency: Vec<bool>,
    edges: Vec<bool>,
    weights: Vec<Option<f64>>,
}

impl ContentionGraph {
    /// Build a graph directly from an explicit edge list, treating every
    /// edge as unconditional (no weights). Useful for studying the
    /// scheduler on arbitrary graphs; production graphs come from
    /// [`build_graph`].
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = ContentionGraph {
            n,
            sigma: 0.0,
            adjacency: vec![false; n * n],
            edges: vec![false; n * n],
            weights: vec![None; n * n],
        };
        for &(i, j) in edges {
            assert!(i < n && j < n && i != j, "bad edge ({i},{j}) for n={n}");
            g.edges[i * n + j] = true;
            g.edges[j * n + i] = true;
            g.adjacency[i * n + j] = true;
            g.adjacency[j * n + i] = true;
        }
        g
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// Number of vertices (flows).
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Interference threshold the graph was built with.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Whether flows `i` and `j` contend.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges[self.idx(i, j)]
    }

    /// Whether flows `i` and `j` share an endpoint node.
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency[self.idx(i, j)]
    }

    /// Pairwise interference weight in watts; `None` for adjacent pairs and
    /// the diagonal, where no weight is evaluated.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.weights[self.idx(i, j)]
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has_edge(v, u))
    }

    /// All edges as ordered pairs (i < j).
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edge_list().len()
    }

    /// Write the graph as one `i j weight` line per edge. Adjacency edges,
    /// whose weight is never evaluated, print `inf`.
    pub fn export_edge_list<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (i, j) in self.edge_list() {
            match self.weight(i, j) {
                Some(w) => writeln!(out, "{i} {j} {w:e}")?,
                None => writeln!(out, "{i} {j} inf")?,
            }
        }
        Ok(())
    }
}

/// Whether two flows share an endpoint node in either role.
pub fn flows_adjacent(scenario: &Scenario, i: usize, j: usize) -> bool {
    let a = &scenario.flows[i];
    let b = &scenario.flows[j];
    a.sender == b.sender
        || a.sender == b.receiver
        || a.receiver == b.sender
        || a.receiver == b.receiver
}

/// Pairwise interference weight of two non-adjacent flows: the larger of the
/// two directed interference powers, both taken at maximum transmit power.
pub fn pair_weight(i: usize, j: usize, scenario: &Scenario, params: &SystemParams) -> Result<f64> {
    let pt = params.max_power_w;
    let j_into_i = interference_power(j, i, scenario, params, pt)?;
    let i_into_j = interference_power(i, j, scenario, params, pt)?;
    Ok(j_into_i.max(i_into_j))
}

/// Build the contention graph for a scenario.
///
/// Deterministic for fixed inputs; adjacency edges are unconditional, and a
/// non-adjacent pair is an edge exactly when `weight / Pt >= sigma`.
pub fn build_graph(scenario: &Scenario, params: &SystemParams) -> Result<ContentionGraph> {
    let n = scenario.flows.len();
    let mut g = ContentionGraph {
        n,
        sigma: params.sigma,
        adjacency: vec![false; n * n],
        edges: vec![false; n * n],
        weights: vec![None; n * n],
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let (edge, adj, weight) = if flows_adjacent(scenario, i, j) {
                (true, true, None)
            } else {
                let w = pair_weight(i, j, scenario, params)?;
                (w / params.max_power_w >= params.sigma, false, Some(w))
            };
            let (a, b) = (i * n + j, j * n + i);
            g.edges[a] = edge;
            g.edges[b] = edge;
            g.adjacency[a] = adj;
            g.adjacency[b] = adj;
            g.weights[a] = weight;
            g.weights[b] = weight;
        }
    }
    Ok(g)
}
