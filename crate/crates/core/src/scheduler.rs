//! Concurrent-transmission scheduling by iterated minimum-degree greedy
//! maximum-independent-set extraction.
//!
//! Each round pulls one independent set (a "pairing") out of the residual
//! contention graph until every flow is scheduled. Within a round, the
//! unvisited vertex of minimum residual degree joins the pairing and its
//! neighbors are discarded from the round.

use std::collections::BTreeSet;

use crate::contention::ContentionGraph;

/// One pairing: a set of mutually non-contending flows that transmit
/// concurrently for `theta` contiguous CTAs. The scheduler fills `flows`;
/// power control fills `theta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    /// Flow indices, ascending.
    pub flows: Vec<usize>,
    /// CTAs assigned to this pairing (0 until power control runs).
    pub theta: u32,
}

impl Pairing {
    pub fn new(flows: Vec<usize>) -> Self {
        Self { flows, theta: 0 }
    }
}

/// Degree of `vertex` counting only neighbors inside `active`.
pub fn vertex_degree(graph: &ContentionGraph, vertex: usize, active: &BTreeSet<usize>) -> usize {
    active
        .iter()
        .filter(|&&u| u != vertex && graph.has_edge(vertex, u))
        .count()
}

/// Partition all flows into pairings.
///
/// Deterministic: ties on minimum degree go to the lowest flow index, and
/// pairings are emitted in creation order.
pub fn schedule(graph: &ContentionGraph) -> Vec<Pairing> {
    let mut remaining: BTreeSet<usize> = (0..graph.vertex_count()).collect();
    let mut pairings = Vec::new();

    while !remaining.is_empty() {
        let mut unvisited = remaining.clone();
        let mut members = Vec::new();
        while !unvisited.is_empty() {
            // BTreeSet iterates ascending, so min_by_key keeps the lowest
            // index among equal degrees.
            let v = *unvisited
                .iter()
                .min_by_key(|&&v| vertex_degree(graph, v, &unvisited))
                .expect("unvisited set is non-empty");
            members.push(v);
            unvisited.remove(&v);
            unvisited.retain(|&u| !graph.has_edge(v, u));
        }
        members.sort_unstable();
        for v in &members {
            remaining.remove(v);
        }
        pairings.push(Pairing::new(members));
    }
    pairings
}
