//! Maximum induced matchings across cuts and linear mim-width certification.
//!
//! A maximum induced matching of a cut graph is a maximum independent set in
//! its edge-conflict graph: two crossing edges conflict when they share an
//! endpoint or when an endpoint of one is adjacent (across the cut) to an
//! endpoint of the other. The independent set is found by branch-and-bound
//! with a greedy clique-cover bound.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::bitset::Bitset;
use crate::graph::{prefix_cut, BipartiteCut, Graph, GraphError, LinearOrder, Vertex};

/// An induced matching of a cut graph, edges stored left endpoint first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchingWitness {
    pub edges: Vec<(Vertex, Vertex)>,
}

impl MatchingWitness {
    pub fn size(&self) -> usize {
        self.edges.len()
    }

    /// Checks that the edges are crossing edges of `cut`, pairwise disjoint,
    /// and that no crossing edge joins endpoints of two different members.
    pub fn is_induced_in(&self, cut: &BipartiteCut) -> bool {
        let crossing: HashSet<(Vertex, Vertex)> = cut.edges.iter().copied().collect();
        if !self.edges.iter().all(|e| crossing.contains(e)) {
            return false;
        }
        for (i, &(a1, b1)) in self.edges.iter().enumerate() {
            for &(a2, b2) in &self.edges[i + 1..] {
                if a1 == a2
                    || b1 == b2
                    || crossing.contains(&(a1, b2))
                    || crossing.contains(&(a2, b1))
                {
                    return false;
                }
            }
        }
        true
    }
}

fn conflict_graph(cut: &BipartiteCut) -> Vec<Bitset> {
    let m = cut.edges.len();
    let crossing: HashSet<(Vertex, Vertex)> = cut.edges.iter().copied().collect();
    let mut adj = vec![Bitset::new(m); m];
    for (i, &(a1, b1)) in cut.edges.iter().enumerate() {
        for (j, &(a2, b2)) in cut.edges.iter().enumerate().skip(i + 1) {
            if a1 == a2 || b1 == b2 || crossing.contains(&(a1, b2)) || crossing.contains(&(a2, b1))
            {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    adj
}

struct MisSearch<'a> {
    adj: &'a [Bitset],
    target: usize,
    current: Vec<usize>,
    best: Vec<usize>,
}

impl MisSearch<'_> {
    fn clique_cover_bound(&self, cand: &Bitset) -> usize {
        // Each class is a clique of the conflict graph; `common` holds the
        // vertices adjacent to every member so far.
        let mut commons: Vec<Bitset> = Vec::new();
        for v in cand.iter() {
            match commons.iter_mut().find(|c| c.contains(v)) {
                Some(common) => common.intersect_with(&self.adj[v]),
                None => commons.push(self.adj[v].clone()),
            }
        }
        commons.len()
    }

    fn search(&mut self, mut cand: Bitset) {
        if self.best.len() >= self.target {
            return;
        }
        let mark = self.current.len();
        // Vertices of degree at most one always belong to some maximum
        // independent set of what remains.
        loop {
            let low = cand
                .iter()
                .find(|&v| self.adj[v].intersection_len(&cand) <= 1);
            match low {
                Some(v) => {
                    self.current.push(v);
                    cand.remove(v);
                    cand.difference_with(&self.adj[v]);
                }
                None => break,
            }
        }
        if cand.is_empty() {
            if self.current.len() > self.best.len() {
                self.best = self.current.clone();
            }
        } else if self.current.len() + self.clique_cover_bound(&cand) > self.best.len() {
            let pivot = cand
                .iter()
                .max_by_key(|&v| (self.adj[v].intersection_len(&cand), std::cmp::Reverse(v)))
                .unwrap();
            let mut with = cand.clone();
            with.remove(pivot);
            with.difference_with(&self.adj[pivot]);
            self.current.push(pivot);
            self.search(with);
            self.current.pop();

            cand.remove(pivot);
            self.search(cand);
        }
        self.current.truncate(mark);
    }
}

/// Size of a maximum induced matching of `cut`, exact when at most `cap`.
/// When the maximum exceeds `cap`, returns `cap + 1` with a witness of that
/// size.
pub fn max_induced_matching(cut: &BipartiteCut, cap: usize) -> (usize, MatchingWitness) {
    let m = cut.edges.len();
    if m == 0 {
        return (0, MatchingWitness::default());
    }
    let adj = conflict_graph(cut);
    let mut search = MisSearch {
        adj: &adj,
        target: cap + 1,
        current: Vec::new(),
        best: Vec::new(),
    };
    search.search(Bitset::full(m));
    let mut chosen = search.best;
    chosen.truncate(cap + 1);
    chosen.sort_unstable();
    let witness = MatchingWitness {
        edges: chosen.iter().map(|&i| cut.edges[i]).collect(),
    };
    (witness.size(), witness)
}

/// Per-prefix certification result of a linear order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WidthReport {
    /// Width of the order, or `cap + 1` if some prefix exceeds the cap.
    pub width: usize,
    /// One-based prefix length attaining `width` (smallest such).
    pub position: usize,
    pub witness: MatchingWitness,
    /// Capped mim-value of every prefix `1..=n`.
    pub per_prefix: Vec<usize>,
    pub cap: usize,
}

impl WidthReport {
    pub fn within_cap(&self) -> bool {
        self.width <= self.cap
    }
}

/// Linear mim-width of `order`, computed prefix by prefix with early exit at
/// `cap`. Prefixes are evaluated in parallel; the result does not depend on
/// evaluation order.
pub fn mim_width(
    graph: &Graph,
    order: &LinearOrder,
    cap: usize,
) -> Result<WidthReport, GraphError> {
    let n = graph.vertex_count();
    if order.len() != n {
        return Err(GraphError::NotAPermutation);
    }
    if n == 0 {
        return Ok(WidthReport {
            width: 0,
            position: 0,
            witness: MatchingWitness::default(),
            per_prefix: Vec::new(),
            cap,
        });
    }
    let results: Vec<(usize, MatchingWitness)> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let cut = prefix_cut(graph, order, i).expect("position in range");
            max_induced_matching(&cut, cap)
        })
        .collect();
    let (best_index, _) = results
        .iter()
        .enumerate()
        .max_by_key(|(i, (size, _))| (*size, std::cmp::Reverse(*i)))
        .unwrap();
    Ok(WidthReport {
        width: results[best_index].0,
        position: best_index + 1,
        witness: results[best_index].1.clone(),
        per_prefix: results.iter().map(|(s, _)| *s).collect(),
        cap,
    })
}

/// Orders the left side of `cut` by neighborhood inclusion if the cut graph
/// is a chain graph.
pub fn is_chain_graph(cut: &BipartiteCut) -> Option<Vec<Vertex>> {
    let mut neighborhoods: HashMap<Vertex, HashSet<Vertex>> =
        cut.left.iter().map(|&a| (a, HashSet::new())).collect();
    for &(a, b) in &cut.edges {
        neighborhoods.entry(a).or_default().insert(b);
    }
    let mut order: Vec<Vertex> = neighborhoods.keys().copied().collect();
    order.sort_by_key(|a| (neighborhoods[a].len(), *a));
    let nested = order
        .windows(2)
        .all(|w| neighborhoods[&w[0]].is_subset(&neighborhoods[&w[1]]));
    nested.then_some(order)
}
