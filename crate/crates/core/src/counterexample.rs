//! The subdivision-clique construction for bipartite inputs and a search
//! for an input on which it fails: `G` has no Hamiltonian cycle while the
//! output `H` has one.

use std::collections::{BTreeMap, HashSet};
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::canon::canonical_form_colored;
use crate::graph::{Graph, Vertex};
use crate::ham::{find_ham_cycle, SearchOptions, SearchOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexampleError {
    #[error("{side}{index} has degree {degree}, expected 2 or 3")]
    DegreeViolation {
        side: char,
        index: usize,
        degree: usize,
    },
    #[error("sides have {a} and {b} vertices")]
    UnbalancedSides { a: usize, b: usize },
    #[error("edge a{a}b{b} is out of range or repeated")]
    BadEdge { a: usize, b: usize },
    #[error("search budget exhausted")]
    BudgetExhausted,
}

/// Bipartite graph with ordered sides `a_1..a_n` and `b_1..b_n`. Edges are
/// `(i, j)` for `a_i b_j`, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    a_count: usize,
    b_count: usize,
    edges: Vec<(usize, usize)>,
}

impl BipartiteInstance {
    pub fn new(
        a_count: usize,
        b_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CounterexampleError> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a == 0 || b == 0 || a > a_count || b > b_count || out.contains(&(a, b)) {
                return Err(CounterexampleError::BadEdge { a, b });
            }
            out.push((a, b));
        }
        out.sort_unstable();
        Ok(BipartiteInstance {
            a_count,
            b_count,
            edges: out,
        })
    }

    /// Parses the `a_i b_j` edges of a graph whose vertices `0..n` are `A`
    /// and `n..2n` are `B`.
    pub fn from_graph(graph: &Graph, n: usize) -> Result<Self, CounterexampleError> {
        let mut edges = Vec::new();
        for (u, v, _) in graph.edges() {
            if u >= n || v < n || v >= 2 * n {
                return Err(CounterexampleError::BadEdge {
                    a: u + 1,
                    b: v.saturating_sub(n) + 1,
                });
            }
            edges.push((u + 1, v - n + 1));
        }
        Self::new(n, graph.vertex_count().saturating_sub(n), edges)
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    pub fn b_count(&self) -> usize {
        self.b_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree_a(&self, i: usize) -> usize {
        self.edges.iter().filter(|e| e.0 == i).count()
    }

    pub fn degree_b(&self, j: usize) -> usize {
        self.edges.iter().filter(|e| e.1 == j).count()
    }

    /// `G` itself: `a_i` is vertex `i - 1`, `b_j` is vertex `a_count + j - 1`.
    pub fn graph(&self) -> Graph {
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (a - 1, self.a_count + b - 1));
        Graph::from_edges(self.a_count + self.b_count, edges).expect("validated edges")
    }

    /// Renumbers `A` so that the old `a_{order[k]}` becomes `a_{k+1}`.
    pub fn reorder_a(&self, order: &[usize]) -> Self {
        let mut rank = vec![0; self.a_count + 1];
        for (k, &old) in order.iter().enumerate() {
            rank[old] = k + 1;
        }
        let edges = self.edges.iter().map(|&(a, b)| (rank[a], b));
        Self::new(self.a_count, self.b_count, edges).expect("permutation of a valid instance")
    }

    fn check(&self) -> Result<(), CounterexampleError> {
        if self.a_count != self.b_count {
            return Err(CounterexampleError::UnbalancedSides {
                a: self.a_count,
                b: self.b_count,
            });
        }
        for i in 1..=self.a_count {
            let degree = self.degree_a(i);
            if !(2..=3).contains(&degree) {
                return Err(CounterexampleError::DegreeViolation {
                    side: 'a',
                    index: i,
                    degree,
                });
            }
        }
        for j in 1..=self.b_count {
            let degree = self.degree_b(j);
            if !(2..=3).contains(&degree) {
                return Err(CounterexampleError::DegreeViolation {
                    side: 'b',
                    index: j,
                    degree,
                });
            }
        }
        Ok(())
    }
}

/// Output of [`pp08_reduce`]. Vertex ids: `a_i` and `b_j` keep their ids from
/// [`BipartiteInstance::graph`], subdivision vertices follow in edge order,
/// then the twins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PP08Output {
    pub graph: Graph,
    /// Edge `(i, j)` of `G` to its subdivision vertex.
    pub subdivision: BTreeMap<(usize, usize), Vertex>,
    /// `b_j` of degree three to its twin.
    pub twins: BTreeMap<usize, Vertex>,
    a_count: usize,
}

impl PP08Output {
    pub fn label(&self, v: Vertex) -> String {
        let n = self.a_count;
        if v < n {
            return format!("a{}", v + 1);
        }
        if v < 2 * n {
            return format!("b{}", v - n + 1);
        }
        if let Some((&(i, j), _)) = self.subdivision.iter().find(|(_, &w)| w == v) {
            return format!("a{i}b{j}");
        }
        match self.twins.iter().find(|(_, &w)| w == v) {
            Some((j, _)) => format!("b{j}'"),
            None => v.to_string(),
        }
    }
}

/// Builds `H`: subdivide every edge, make the subdivision vertices a clique,
/// join each `a_i` to the subdivision vertices of all edges at `a_{i'}` with
/// `i' <= i`, and give every degree-3 `b_j` a twin with the same neighbourhood.
pub fn pp08_reduce(g: &BipartiteInstance) -> Result<PP08Output, CounterexampleError> {
    g.check()?;
    let n = g.a_count;
    let mut h = Graph::new(2 * n);
    let mut subdivision = BTreeMap::new();
    for &(i, j) in &g.edges {
        let s = h.add_vertex();
        h.add_edge(i - 1, s).expect("in range");
        h.add_edge(s, n + j - 1).expect("in range");
        subdivision.insert((i, j), s);
    }
    let subs: Vec<Vertex> = subdivision.values().copied().collect();
    for (k, &x) in subs.iter().enumerate() {
        for &y in &subs[k + 1..] {
            h.add_edge(x, y).expect("in range");
        }
    }
    for i in 1..=n {
        for (&(i2, _), &s) in &subdivision {
            if i2 < i {
                h.add_edge(i - 1, s).expect("in range");
            }
        }
    }
    let mut twins = BTreeMap::new();
    for j in 1..=n {
        if g.degree_b(j) == 3 {
            let neighbors = h.neighbors(n + j - 1).to_vec();
            let twin = h.add_vertex();
            for w in neighbors {
                h.add_edge(twin, w).expect("in range");
            }
            twins.insert(j, twin);
        }
    }
    Ok(PP08Output {
        graph: h,
        subdivision,
        twins,
        a_count: n,
    })
}

/// A bipartite `G` (with its `A` ordering applied) that has no Hamiltonian
/// cycle, its output under [`pp08_reduce`], and a Hamiltonian cycle of that output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub instance: BipartiteInstance,
    pub output: PP08Output,
    pub cycle: Vec<Vertex>,
}

/// Balanced bipartite graphs with `n + n` vertices and all degrees in
/// `{2, 3}`, one per isomorphism class that fixes the sides.
pub fn candidate_instances(n: usize) -> Vec<BipartiteInstance> {
    let rows: Vec<u32> = (0u32..1 << n)
        .filter(|r| (2..=3).contains(&r.count_ones()))
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut pick = vec![0usize; n];
    let colors: Vec<u32> = (0..2 * n).map(|v| u32::from(v >= n)).collect();
    fn next(pick: &mut [usize], bound: usize) -> bool {
        // Non-decreasing sequences over `0..bound`.
        for k in (0..pick.len()).rev() {
            if pick[k] + 1 < bound {
                pick[k] += 1;
                let v = pick[k];
                pick[k + 1..].iter_mut().for_each(|p| *p = v);
                return true;
            }
        }
        false
    }
    if n == 0 || rows.is_empty() {
        return out;
    }
    loop {
        let column_ok = (0..n).all(|j| {
            let d = pick.iter().filter(|&&r| rows[r] >> j & 1 == 1).count();
            (2..=3).contains(&d)
        });
        if column_ok {
            let edges = pick.iter().enumerate().flat_map(|(i, &r)| {
                let row = rows[r];
                (0..n)
                    .filter(move |j| row >> j & 1 == 1)
                    .map(move |j| (i + 1, j + 1))
            });
            let inst = BipartiteInstance::new(n, n, edges).expect("valid by construction");
            if seen.insert(canonical_form_colored(&inst.graph(), &colors)) {
                out.push(inst);
            }
        }
        if !next(&mut pick, rows.len()) {
            break;
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=n).collect();
    loop {
        out.push(current.clone());
        // Next permutation in lexicographic order.
        let Some(k) = (0..n.saturating_sub(1))
            .rev()
            .find(|&k| current[k] < current[k + 1])
        else {
            return out;
        };
        let l = (k + 1..n)
            .rev()
            .find(|&l| current[k] < current[l])
            .expect("exists");
        current.swap(k, l);
        current[k + 1..].reverse();
    }
}

/// Searches sizes in `n_range` in increasing order, candidates in
/// enumeration order, and `A` orderings lexicographically; returns the first
/// hit. `budget` caps the number of (graph, ordering) pairs examined.
pub fn search_counterexample(
    n_range: RangeInclusive<usize>,
    budget: Option<u64>,
) -> Result<Option<Counterexample>, CounterexampleError> {
    let opts = SearchOptions::default();
    let mut spent = 0u64;
    for n in n_range {
        let orders = permutations(n);
        for g in candidate_instances(n) {
            if find_ham_cycle(&g.graph(), &opts) != SearchOutcome::NotFound {
                continue;
            }
            for order in &orders {
                spent += 1;
                if budget.is_some_and(|b| spent > b) {
                    return Err(CounterexampleError::BudgetExhausted);
                }
                let instance = g.reorder_a(order);
                let output = pp08_reduce(&instance)?;
                if let SearchOutcome::Found(cycle) = find_ham_cycle(&output.graph, &opts) {
                    return Ok(Some(Counterexample {
                        instance,
                        output,
                        cycle,
                    }));
                }
            }
        }
    }
    Ok(None)
}
