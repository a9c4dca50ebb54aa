//! Exact Hamiltonian path and cycle search.
//!
//! Two engines: a bitmask dynamic program for graphs of at most
//! [`DP_MAX_VERTICES`] vertices, and a depth-first search for larger graphs
//! that prunes with degree counting, forced moves, and a connectivity plus
//! articulation-point test on the unvisited region.

use std::time::{Duration, Instant};

use crate::graph::{Graph, Vertex};

/// Largest graph handled by the dynamic-programming engine.
pub const DP_MAX_VERTICES: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Dynamic programming when small enough, otherwise backtracking.
    #[default]
    Auto,
    DynamicProgramming,
    Backtracking,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Required `(first, last)` vertices of the path.
    pub endpoints: Option<(Vertex, Vertex)>,
    /// Maximum number of search nodes; `None` is unbounded.
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Maximum number of paths returned by [`enumerate_ham_paths`].
    pub enumerate_limit: usize,
    /// Search the graph with its dummy edges removed.
    pub forbid_dummy: bool,
    pub engine: Engine,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            endpoints: None,
            node_budget: None,
            time_budget: None,
            enumerate_limit: usize::MAX,
            forbid_dummy: false,
            engine: Engine::Auto,
        }
    }
}

impl SearchOptions {
    pub fn with_endpoints(mut self, first: Vertex, last: Vertex) -> Self {
        self.endpoints = Some((first, last));
        self
    }

    pub fn with_node_budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.enumerate_limit = limit;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(Vec<Vertex>),
    NotFound,
    BudgetExceeded,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn path(&self) -> Option<&[Vertex]> {
        match self {
            SearchOutcome::Found(p) => Some(p),
            _ => None,
        }
    }
}

/// Paths found by [`enumerate_ham_paths`]; `complete` is false when a budget
/// stopped the search before the tree was exhausted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub paths: Vec<Vec<Vertex>>,
    pub complete: bool,
}

/// Finds a Hamiltonian path. With forced endpoints the path runs from the
/// first to the second.
pub fn find_ham_path(graph: &Graph, opts: &SearchOptions) -> SearchOutcome {
    let stripped;
    let graph = if opts.forbid_dummy {
        stripped = graph.without_dummy_edges();
        &stripped
    } else {
        graph
    };
    let n = graph.vertex_count();
    if let Some((s, t)) = opts.endpoints {
        if s >= n || t >= n || (s == t && n > 1) {
            return SearchOutcome::NotFound;
        }
    }
    if n == 0 {
        return SearchOutcome::NotFound;
    }
    if n == 1 {
        return SearchOutcome::Found(vec![0]);
    }
    if !graph.is_connected() || (0..n).filter(|&v| graph.degree(v) == 1).count() > 2 {
        return SearchOutcome::NotFound;
    }
    let use_dp = match opts.engine {
        Engine::Auto => n <= DP_MAX_VERTICES,
        Engine::DynamicProgramming => {
            assert!(n <= DP_MAX_VERTICES, "graph too large for the DP engine");
            true
        }
        Engine::Backtracking => false,
    };
    if use_dp {
        return dp_path(graph, opts.endpoints);
    }
    let mut search = Backtrack::new(graph, opts, 1);
    for (start, end) in path_starts(graph, opts.endpoints) {
        search.run_from(start, end, false);
        if !search.found.is_empty() {
            return SearchOutcome::Found(search.found.swap_remove(0));
        }
        if search.exhausted_budget {
            return SearchOutcome::BudgetExceeded;
        }
    }
    SearchOutcome::NotFound
}

/// Finds a Hamiltonian cycle, returned without repeating the first vertex.
pub fn find_ham_cycle(graph: &Graph, opts: &SearchOptions) -> SearchOutcome {
    let stripped;
    let graph = if opts.forbid_dummy {
        stripped = graph.without_dummy_edges();
        &stripped
    } else {
        graph
    };
    let n = graph.vertex_count();
    if n < 3 || !graph.is_connected() || (0..n).any(|v| graph.degree(v) < 2) {
        return SearchOutcome::NotFound;
    }
    let use_dp = match opts.engine {
        Engine::Auto => n <= DP_MAX_VERTICES,
        Engine::DynamicProgramming => true,
        Engine::Backtracking => false,
    };
    // Every Hamiltonian cycle uses two edges at the lowest-degree vertex
    // `root`, so it uses one of the edges to all but the last neighbor.
    let root = (0..n).min_by_key(|&v| (graph.degree(v), v)).unwrap();
    let nbrs = graph.neighbors(root);
    let mut search = Backtrack::new(graph, opts, 1);
    for &w in &nbrs[..nbrs.len() - 1] {
        if use_dp {
            if let SearchOutcome::Found(p) = dp_path(graph, Some((root, w))) {
                return SearchOutcome::Found(p);
            }
            continue;
        }
        search.run_from(root, Some(w), false);
        if !search.found.is_empty() {
            return SearchOutcome::Found(search.found.swap_remove(0));
        }
        if search.exhausted_budget {
            return SearchOutcome::BudgetExceeded;
        }
    }
    SearchOutcome::NotFound
}

/// Enumerates Hamiltonian paths, each reported once with its smaller
/// endpoint first (with forced endpoints, in the forced direction).
pub fn enumerate_ham_paths(graph: &Graph, opts: &SearchOptions) -> Enumeration {
    let stripped;
    let graph = if opts.forbid_dummy {
        stripped = graph.without_dummy_edges();
        &stripped
    } else {
        graph
    };
    let n = graph.vertex_count();
    let empty = |complete| Enumeration {
        paths: Vec::new(),
        complete,
    };
    if opts.enumerate_limit == 0 {
        return empty(false);
    }
    if n == 0 {
        return empty(true);
    }
    if n == 1 {
        return Enumeration {
            paths: vec![vec![0]],
            complete: true,
        };
    }
    if !graph.is_connected() {
        return empty(true);
    }
    let mut search = Backtrack::new(graph, opts, opts.enumerate_limit);
    let starts = path_starts(graph, opts.endpoints);
    // Starting from every vertex finds each path twice; keep one direction.
    let canonical = opts.endpoints.is_none() && starts.len() == n;
    for (start, end) in starts {
        search.run_from(start, end, canonical);
        if search.found.len() >= opts.enumerate_limit || search.exhausted_budget {
            break;
        }
    }
    if opts.endpoints.is_none() {
        for p in &mut search.found {
            if p[0] > p[n - 1] {
                p.reverse();
            }
        }
    }
    let complete = !search.exhausted_budget && search.found.len() < opts.enumerate_limit;
    Enumeration {
        paths: search.found,
        complete,
    }
}

/// Start vertices (and optional forced end) to try for a path search.
fn path_starts(
    graph: &Graph,
    endpoints: Option<(Vertex, Vertex)>,
) -> Vec<(Vertex, Option<Vertex>)> {
    if let Some((s, t)) = endpoints {
        return vec![(s, Some(t))];
    }
    let n = graph.vertex_count();
    let leaves: Vec<Vertex> = (0..n).filter(|&v| graph.degree(v) == 1).collect();
    match leaves.len() {
        0 => (0..n).map(|v| (v, None)).collect(),
        1 => vec![(leaves[0], None)],
        _ => vec![(leaves[0].min(leaves[1]), Some(leaves[0].max(leaves[1])))],
    }
}

fn dp_path(graph: &Graph, endpoints: Option<(Vertex, Vertex)>) -> SearchOutcome {
    let n = graph.vertex_count();
    let adj: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let full: usize = (1 << n) - 1;
    // ends[mask]: vertices that can end a Hamiltonian path of G[mask]
    // (starting at the forced start, if any).
    let mut ends = vec![0u32; 1 << n];
    match endpoints {
        Some((s, _)) => ends[1 << s] = 1 << s,
        None => (0..n).for_each(|v| ends[1 << v] = 1 << v),
    }
    for mask in 1..=full {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        let mut bits = e;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let mut ext = adj[v] & !(mask as u32);
            while ext != 0 {
                let w = ext.trailing_zeros() as usize;
                ext &= ext - 1;
                ends[mask | 1 << w] |= 1 << w;
            }
        }
    }
    let target_ends = match endpoints {
        Some((_, t)) => ends[full] & 1 << t,
        None => ends[full],
    };
    if target_ends == 0 {
        return SearchOutcome::NotFound;
    }
    // Walk back from the smallest admissible end.
    let mut v = target_ends.trailing_zeros() as usize;
    let mut mask = full;
    let mut path = vec![v];
    while mask.count_ones() > 1 {
        let rest = mask & !(1 << v);
        let prev = (0..n)
            .find(|&u| rest >> u & 1 == 1 && adj[v] >> u & 1 == 1 && ends[rest] >> u & 1 == 1)
            .expect("dp table is consistent");
        path.push(prev);
        mask = rest;
        v = prev;
    }
    path.reverse();
    SearchOutcome::Found(path)
}

struct Backtrack<'a> {
    graph: &'a Graph,
    n: usize,
    visited: Vec<bool>,
    /// Number of unvisited neighbors of each vertex.
    free_degree: Vec<usize>,
    path: Vec<Vertex>,
    found: Vec<Vec<Vertex>>,
    limit: usize,
    nodes: u64,
    node_budget: Option<u64>,
    deadline: Option<Instant>,
    exhausted_budget: bool,
    // scratch for the articulation test
    disc: Vec<usize>,
    low: Vec<usize>,
    separated: Vec<usize>,
}

impl<'a> Backtrack<'a> {
    fn new(graph: &'a Graph, opts: &SearchOptions, limit: usize) -> Self {
        let n = graph.vertex_count();
        Backtrack {
            graph,
            n,
            visited: vec![false; n],
            free_degree: (0..n).map(|v| graph.degree(v)).collect(),
            path: Vec::with_capacity(n),
            found: Vec::new(),
            limit,
            nodes: 0,
            node_budget: opts.node_budget,
            deadline: opts.time_budget.map(|d| Instant::now() + d),
            exhausted_budget: false,
            disc: vec![0; n],
            low: vec![0; n],
            separated: vec![0; n],
        }
    }

    fn visit(&mut self, v: Vertex) {
        self.visited[v] = true;
        self.path.push(v);
        for &w in self.graph.neighbors(v) {
            self.free_degree[w] -= 1;
        }
    }

    fn unvisit(&mut self, v: Vertex) {
        self.visited[v] = false;
        self.path.pop();
        for &w in self.graph.neighbors(v) {
            self.free_degree[w] += 1;
        }
    }

    fn run_from(&mut self, start: Vertex, end: Option<Vertex>, canonical: bool) {
        self.visit(start);
        self.extend(start, end, canonical);
        self.unvisit(start);
    }

    fn out_of_budget(&mut self) -> bool {
        self.nodes += 1;
        if let Some(b) = self.node_budget {
            if self.nodes > b {
                self.exhausted_budget = true;
            }
        }
        if self.nodes.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    self.exhausted_budget = true;
                }
            }
        }
        self.exhausted_budget
    }

    fn done(&self) -> bool {
        self.exhausted_budget || self.found.len() >= self.limit
    }

    fn extend(&mut self, head: Vertex, end: Option<Vertex>, canonical: bool) {
        if self.out_of_budget() {
            return;
        }
        if self.path.len() == self.n {
            let last = *self.path.last().unwrap();
            if end.is_none_or(|t| t == last) && (!canonical || self.path[0] < last) {
                self.found.push(self.path.clone());
            }
            return;
        }
        if !self.region_admissible(head, end) {
            return;
        }
        let remaining = self.n - self.path.len();
        let candidates: Vec<Vertex> = self
            .graph
            .neighbors(head)
            .iter()
            .copied()
            .filter(|&w| !self.visited[w])
            .collect();
        // An unvisited neighbor with no other unvisited neighbor must come
        // next, and then it must be the last vertex.
        let dead: Vec<Vertex> = candidates
            .iter()
            .copied()
            .filter(|&w| self.free_degree[w] == 0)
            .collect();
        if !dead.is_empty() {
            if dead.len() == 1 && remaining == 1 {
                self.step(dead[0], end, canonical);
            }
            return;
        }
        // A neighbor with exactly one other unvisited neighbor that is not
        // the designated end must be taken now or become the path's end.
        let forced: Vec<Vertex> = candidates
            .iter()
            .copied()
            .filter(|&w| self.free_degree[w] == 1 && Some(w) != end)
            .collect();
        let order: Vec<Vertex> = if forced.len() > 2 || (forced.len() == 2 && end.is_some()) {
            return;
        } else if forced.len() == 2 {
            // One is next and the other is the end.
            forced
        } else if forced.len() == 1 && end.is_some() {
            forced
        } else {
            let mut c = candidates;
            // Fewest onward options first.
            c.sort_by_key(|&w| (self.free_degree[w], w));
            c
        };
        for w in order {
            if Some(w) == end && remaining > 1 {
                continue;
            }
            self.step(w, end, canonical);
            if self.done() {
                return;
            }
        }
    }

    fn step(&mut self, w: Vertex, end: Option<Vertex>, canonical: bool) {
        self.visit(w);
        self.extend(w, end, canonical);
        self.unvisit(w);
    }

    /// The unvisited vertices plus `head` must admit a Hamiltonian path
    /// starting at `head` (and ending at `end`): checks degrees, connectivity
    /// and articulation points with one depth-first pass.
    fn region_admissible(&mut self, head: Vertex, end: Option<Vertex>) -> bool {
        let remaining = self.n - self.path.len();
        // An unvisited vertex with fewer than two usable neighbors must be
        // the end of the path.
        let mut must_end = None;
        for v in 0..self.n {
            if self.visited[v] {
                continue;
            }
            let usable = self.free_degree[v] + usize::from(self.graph.has_edge(head, v));
            if usable >= 2 || remaining == 1 {
                continue;
            }
            if usable == 0 || must_end.is_some() || end.is_some_and(|t| t != v) {
                return false;
            }
            must_end = Some(v);
        }
        let end = end.or(must_end);

        for v in 0..self.n {
            self.disc[v] = usize::MAX;
            self.separated[v] = 0;
        }
        self.disc[head] = 0;
        self.low[head] = 0;
        let mut time = 1;
        let mut root_children = 0;
        let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(head, usize::MAX, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, parent, idx) = *top;
            let nbrs = self.graph.neighbors(v);
            if idx < nbrs.len() {
                top.2 += 1;
                let w = nbrs[idx];
                if self.visited[w] && w != head {
                    continue;
                }
                if self.disc[w] == usize::MAX {
                    self.disc[w] = time;
                    self.low[w] = time;
                    time += 1;
                    if v == head {
                        root_children += 1;
                    }
                    stack.push((w, v, 0));
                } else if w != parent {
                    self.low[v] = self.low[v].min(self.disc[w]);
                }
                continue;
            }
            stack.pop();
            if parent == usize::MAX {
                continue;
            }
            self.low[parent] = self.low[parent].min(self.low[v]);
            // Removing `parent` cuts off the subtree of `v`. The path visits
            // `parent` once, so it can only finish inside one such subtree,
            // which must then hold the end.
            if parent != head && self.low[v] >= self.disc[parent] {
                self.separated[parent] += 1;
                if self.separated[parent] > 1 {
                    return false;
                }
                if let Some(t) = end {
                    if self.disc[t] < self.disc[v] || self.disc[t] >= time {
                        return false;
                    }
                }
            }
        }
        root_children <= 1 && time == remaining + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
    }

    fn all_engines() -> [SearchOptions; 2] {
        [
            SearchOptions::default().with_engine(Engine::DynamicProgramming),
            SearchOptions::default().with_engine(Engine::Backtracking),
        ]
    }

    #[test]
    fn path_examples() {
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        let star = graph(4, &[(0, 1), (0, 2), (0, 3)]);
        for opts in all_engines() {
            assert!(find_ham_path(&p3, &opts).is_found());
            assert_eq!(find_ham_path(&star, &opts), SearchOutcome::NotFound);
        }
    }

    #[test]
    fn cycle_examples() {
        for opts in all_engines() {
            assert!(find_ham_cycle(&cycle(4), &opts).is_found());
            let tree = graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
            assert_eq!(find_ham_cycle(&tree, &opts), SearchOutcome::NotFound);
            // K_{2,3} has no Hamiltonian cycle.
            let k23 = graph(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]);
            assert_eq!(find_ham_cycle(&k23, &opts), SearchOutcome::NotFound);
        }
    }

    #[test]
    fn enumeration_counts() {
        let opts = SearchOptions::default();
        let p3 = graph(3, &[(0, 1), (1, 2)]);
        assert_eq!(enumerate_ham_paths(&p3, &opts).paths, vec![vec![0, 1, 2]]);
        assert_eq!(enumerate_ham_paths(&cycle(4), &opts).paths.len(), 4);
        // 4! orderings, each undirected path counted from both ends.
        let k4 = enumerate_ham_paths(&complete(4), &opts);
        assert_eq!(k4.paths.len(), 12);
        assert!(k4.complete);
        assert!(k4.paths.iter().all(|p| p[0] < p[3]));
        let limited = enumerate_ham_paths(&complete(4), &SearchOptions::default().with_limit(5));
        assert_eq!(limited.paths.len(), 5);
        assert!(!limited.complete);
    }

    #[test]
    fn forced_endpoints() {
        let c5 = cycle(5);
        for opts in all_engines() {
            let out = find_ham_path(&c5, &opts.clone().with_endpoints(0, 1));
            assert_eq!(out, SearchOutcome::Found(vec![0, 4, 3, 2, 1]));
            let out = find_ham_path(&c5, &opts.with_endpoints(0, 2));
            assert_eq!(out, SearchOutcome::NotFound);
        }
    }

    #[test]
    fn budget_is_reported() {
        let g = complete(8);
        let opts = SearchOptions::default()
            .with_engine(Engine::Backtracking)
            .with_node_budget(3);
        assert_eq!(find_ham_path(&g, &opts), SearchOutcome::BudgetExceeded);
    }

    #[test]
    fn forbid_dummy_removes_edges() {
        let mut g = graph(3, &[(0, 1)]);
        g.add_edge_of_kind(1, 2, crate::graph::EdgeKind::Dummy)
            .unwrap();
        assert!(find_ham_path(&g, &SearchOptions::default()).is_found());
        let opts = SearchOptions {
            forbid_dummy: true,
            ..SearchOptions::default()
        };
        assert_eq!(find_ham_path(&g, &opts), SearchOutcome::NotFound);
    }
}
