//! Variable gadgets (chains of six-cycles) and clause gadgets with their
//! exhaustive contract check.
//!
//! A clause gadget has `k` distinguished pairs `(sigma_i, tau_i)`. In the
//! host graph the distinguished vertices are the only ones with outside
//! neighbors, one each, so any Hamiltonian path of the host meets the gadget
//! in a spanning collection of vertex-disjoint paths whose ends are all
//! distinguished. The contract requires every such collection to be a single
//! path joining some `sigma_i` to its own `tau_i`, and every pair to admit one.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};

/// Gadgets above this size are rejected by [`verify_gadget_contract`].
pub const MAX_VERIFIED_GADGET: usize = 30;

/// Size bound for shipped clause gadgets.
pub const MAX_CLAUSE_GADGET: usize = 27;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GadgetError {
    #[error("gadget must have at least one distinguished pair")]
    NoPairs,
    #[error("distinguished vertex {0} is used twice")]
    RepeatedTerminal(Vertex),
    #[error("distinguished vertex {0} out of range")]
    TerminalOutOfRange(Vertex),
    #[error("unsupported clause arity {0}")]
    UnsupportedArity(usize),
    #[error("search budget exhausted")]
    BudgetExhausted,
    #[error("catalog line {line}: {message}")]
    Catalog { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Vertices of one six-cycle `D_i^j`, in cycle order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleVertices {
    pub zero_in: Vertex,
    pub zero_out: Vertex,
    pub dot_out: Vertex,
    pub one_out: Vertex,
    pub one_in: Vertex,
    pub dot_in: Vertex,
}

impl CycleVertices {
    /// The six vertices in cycle order.
    pub fn in_cycle_order(&self) -> [Vertex; 6] {
        [
            self.zero_in,
            self.zero_out,
            self.dot_out,
            self.one_out,
            self.one_in,
            self.dot_in,
        ]
    }

    pub fn input(&self, side: bool) -> Vertex {
        if side {
            self.one_in
        } else {
            self.zero_in
        }
    }

    pub fn output(&self, side: bool) -> Vertex {
        if side {
            self.one_out
        } else {
            self.zero_out
        }
    }
}

/// Vertex ids of a variable gadget: endpoints plus one six-cycle per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableGadgetLayout {
    pub start: Vertex,
    pub end: Vertex,
    pub columns: Vec<CycleVertices>,
}

impl VariableGadgetLayout {
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        std::iter::once(self.start)
            .chain(self.columns.iter().flat_map(|c| c.in_cycle_order()))
            .chain(std::iter::once(self.end))
    }
}

/// Adds a variable gadget with `m` columns to `graph` and returns its layout.
pub fn add_variable_gadget(graph: &mut Graph, m: usize) -> VariableGadgetLayout {
    assert!(m >= 1, "variable gadget needs at least one column");
    let start = graph.add_vertex();
    let columns: Vec<CycleVertices> = (0..m)
        .map(|_| {
            let ids: Vec<Vertex> = (0..6).map(|_| graph.add_vertex()).collect();
            for k in 0..6 {
                graph.add_edge(ids[k], ids[(k + 1) % 6]).unwrap();
            }
            CycleVertices {
                zero_in: ids[0],
                zero_out: ids[1],
                dot_out: ids[2],
                one_out: ids[3],
                one_in: ids[4],
                dot_in: ids[5],
            }
        })
        .collect();
    let end = graph.add_vertex();
    for pair in columns.windows(2) {
        graph.add_edge(pair[0].one_out, pair[1].one_in).unwrap();
        graph.add_edge(pair[0].zero_out, pair[1].zero_in).unwrap();
    }
    graph.add_edge(start, columns[0].zero_in).unwrap();
    graph.add_edge(start, columns[0].one_in).unwrap();
    graph.add_edge(end, columns[m - 1].zero_out).unwrap();
    graph.add_edge(end, columns[m - 1].one_out).unwrap();
    VariableGadgetLayout {
        start,
        end,
        columns,
    }
}

/// Standalone variable gadget on `6m + 2` vertices.
pub fn build_variable_gadget(m: usize) -> (Graph, VariableGadgetLayout) {
    let mut graph = Graph::new(0);
    let layout = add_variable_gadget(&mut graph, m);
    (graph, layout)
}

/// A clause gadget: a graph with `k` distinguished `(sigma, tau)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseGadget {
    graph: Graph,
    pairs: Vec<(Vertex, Vertex)>,
}

impl ClauseGadget {
    pub fn new(graph: Graph, pairs: Vec<(Vertex, Vertex)>) -> Result<Self, GadgetError> {
        if pairs.is_empty() {
            return Err(GadgetError::NoPairs);
        }
        let mut seen = vec![false; graph.vertex_count()];
        for &v in pairs.iter().flat_map(|(s, t)| [s, t]) {
            if v >= seen.len() {
                return Err(GadgetError::TerminalOutOfRange(v));
            }
            if seen[v] {
                return Err(GadgetError::RepeatedTerminal(v));
            }
            seen[v] = true;
        }
        Ok(ClauseGadget { graph, pairs })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.pairs
    }

    pub fn arity(&self) -> usize {
        self.pairs.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_terminal(&self, v: Vertex) -> bool {
        self.pairs.iter().any(|&(s, t)| s == v || t == v)
    }

    /// Vertices in block order: `sigma_1, tau_1, ..., sigma_k, tau_k`, then
    /// the remaining vertices by id.
    pub fn block_order(&self) -> Vec<Vertex> {
        let mut order: Vec<Vertex> = self.pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
        order.extend((0..self.vertex_count()).filter(|&v| !self.is_terminal(v)));
        order
    }

    /// Catalog text: the graph text form followed by `pair <i> <sigma> <tau>`
    /// lines with 1-based pair indices.
    pub fn to_catalog_text(&self) -> String {
        let mut out = self.graph.to_text();
        for (i, (s, t)) in self.pairs.iter().enumerate() {
            let _ = writeln!(out, "pair {} {s} {t}", i + 1);
        }
        out
    }

    pub fn from_catalog_text(text: &str) -> Result<Self, GadgetError> {
        let (graph, rest) = Graph::parse_text_lenient(text)?;
        let mut pairs = Vec::new();
        for (line, content) in rest {
            let parts: Vec<&str> = content.split_whitespace().collect();
            if parts.is_empty() || parts[0].starts_with('#') {
                continue;
            }
            let err = |message: &str| GadgetError::Catalog {
                line,
                message: message.to_string(),
            };
            if parts[0] != "pair" || parts.len() != 4 {
                return Err(err("expected `pair <i> <sigma> <tau>`"));
            }
            let nums: Vec<usize> = parts[1..]
                .iter()
                .map(|t| t.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| err("bad number"))?;
            if nums[0] != pairs.len() + 1 {
                return Err(err("pair indices must be consecutive from 1"));
            }
            pairs.push((nums[1], nums[2]));
        }
        ClauseGadget::new(graph, pairs)
    }
}

/// Ways a gadget can fail its contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractViolation {
    #[error("gadget has {vertices} vertices, verification limit is {MAX_VERIFIED_GADGET}")]
    GadgetTooLarge { vertices: usize },
    #[error("distinguished vertex {0} has no neighbor inside the gadget")]
    IsolatedTerminal(Vertex),
    #[error("no Hamiltonian path joins the ends of pair {pair}")]
    Infeasible { pair: usize },
    #[error("spanning path system {paths:?} violates the single-pair rule")]
    CounterWitness { paths: Vec<Vec<Vertex>> },
}

/// Evidence that a gadget meets its contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractCertificate {
    /// For each pair `i`, a Hamiltonian path of the gadget from `sigma_i` to `tau_i`.
    pub routes: Vec<Vec<Vertex>>,
    /// Number of admissible spanning path systems enumerated.
    pub path_systems: usize,
}

/// Enumerates spanning linear forests in which every vertex of forest
/// degree at most one is a terminal and no component is a single vertex.
struct ForestEnumerator<'a> {
    graph: &'a Graph,
    /// Internal processing order and its inverse.
    order: Vec<Vertex>,
    rank: Vec<usize>,
    terminal: Vec<bool>,
    degree: Vec<u8>,
    other_end: Vec<Vertex>,
    chosen: Vec<(Vertex, Vertex)>,
}

impl<'a> ForestEnumerator<'a> {
    fn new(graph: &'a Graph, terminal: Vec<bool>) -> Self {
        let n = graph.vertex_count();
        // Breadth-first processing order keeps decided edges local.
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut head = order.len();
            order.push(root);
            while head < order.len() {
                let u = order[head];
                head += 1;
                for &w in graph.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        order.push(w);
                    }
                }
            }
        }
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        ForestEnumerator {
            graph,
            order,
            rank,
            terminal,
            degree: vec![0; n],
            other_end: (0..n).collect(),
            chosen: Vec::new(),
        }
    }

    fn min_degree(&self, v: Vertex) -> u8 {
        if self.terminal[v] {
            1
        } else {
            2
        }
    }

    fn run(&mut self, visit: &mut dyn FnMut(&[(Vertex, Vertex)]) -> bool) -> bool {
        self.process(0, visit)
    }

    /// Returns false when the visitor asked to stop.
    fn process(&mut self, idx: usize, visit: &mut dyn FnMut(&[(Vertex, Vertex)]) -> bool) -> bool {
        if idx == self.order.len() {
            return visit(&self.chosen);
        }
        let x = self.order[idx];
        let later: Vec<Vertex> = self
            .graph
            .neighbors(x)
            .iter()
            .copied()
            .filter(|&y| self.rank[y] > idx && self.degree[y] < 2)
            .collect();
        let have = self.degree[x];
        let lo = self.min_degree(x).saturating_sub(have) as usize;
        let hi = (2 - have) as usize;
        for extra in lo..=hi.min(later.len()) {
            if !self.choose(idx, x, &later, 0, extra, visit) {
                return false;
            }
        }
        true
    }

    fn choose(
        &mut self,
        idx: usize,
        x: Vertex,
        later: &[Vertex],
        from: usize,
        remaining: usize,
        visit: &mut dyn FnMut(&[(Vertex, Vertex)]) -> bool,
    ) -> bool {
        if remaining == 0 {
            if !self.later_feasible(idx, x) {
                return true;
            }
            return self.process(idx + 1, visit);
        }
        for k in from..later.len() {
            let y = later[k];
            if later.len() - k < remaining {
                break;
            }
            if self.degree[y] >= 2 || self.other_end[x] == y {
                continue;
            }
            // Join the fragments ending at x and y.
            let ex = self.other_end[x];
            let ey = self.other_end[y];
            let saved = (self.other_end[ex], self.other_end[ey]);
            self.other_end[ex] = ey;
            self.other_end[ey] = ex;
            self.degree[x] += 1;
            self.degree[y] += 1;
            self.chosen.push((x, y));
            let go_on = self.choose(idx, x, later, k + 1, remaining - 1, visit);
            self.chosen.pop();
            self.degree[x] -= 1;
            self.degree[y] -= 1;
            self.other_end[ex] = saved.0;
            self.other_end[ey] = saved.1;
            if !go_on {
                return false;
            }
        }
        true
    }

    /// After `x` is finalized, every later neighbor must still be able to
    /// reach its minimum forest degree through undecided edges.
    fn later_feasible(&self, idx: usize, x: Vertex) -> bool {
        self.graph
            .neighbors(x)
            .iter()
            .filter(|&&y| self.rank[y] > idx)
            .all(|&y| {
                let open = self
                    .graph
                    .neighbors(y)
                    .iter()
                    .filter(|&&z| self.rank[z] > idx && self.degree[z] < 2)
                    .count();
                self.degree[y] as usize + open >= self.min_degree(y) as usize
            })
    }
}

/// Splits a linear forest into its paths, each listed from its smaller end.
fn forest_paths(n: usize, edges: &[(Vertex, Vertex)]) -> Vec<Vec<Vertex>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut paths = Vec::new();
    for start in 0..n {
        if seen[start] || adj[start].len() > 1 {
            continue;
        }
        let mut path = vec![start];
        seen[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = adj[cur].iter().find(|&&w| w != prev && !seen[w]) {
            seen[next] = true;
            path.push(next);
            prev = cur;
            cur = next;
        }
        paths.push(path);
    }
    paths
}

/// Exhaustively checks the clause-gadget contract.
pub fn verify_gadget_contract(
    gadget: &ClauseGadget,
) -> Result<ContractCertificate, ContractViolation> {
    let graph = gadget.graph();
    let n = graph.vertex_count();
    if n > MAX_VERIFIED_GADGET {
        return Err(ContractViolation::GadgetTooLarge { vertices: n });
    }
    for &(s, t) in gadget.pairs() {
        for v in [s, t] {
            if graph.degree(v) == 0 {
                return Err(ContractViolation::IsolatedTerminal(v));
            }
        }
    }
    let terminal: Vec<bool> = (0..n).map(|v| gadget.is_terminal(v)).collect();
    let mut routes: Vec<Option<Vec<Vertex>>> = vec![None; gadget.arity()];
    let mut violation: Option<Vec<Vec<Vertex>>> = None;
    let mut systems = 0usize;
    let mut degree = vec![0u8; n];

    let mut enumerator = ForestEnumerator::new(graph, terminal);
    enumerator.run(&mut |edges| {
        systems += 1;
        degree.iter_mut().for_each(|d| *d = 0);
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let ends: Vec<Vertex> = (0..n).filter(|&v| degree[v] == 1).collect();
        let pair = (ends.len() == 2)
            .then(|| {
                gadget.pairs().iter().position(|&(s, t)| {
                    (s == ends[0] && t == ends[1]) || (s == ends[1] && t == ends[0])
                })
            })
            .flatten();
        match pair {
            Some(i) => {
                if routes[i].is_none() {
                    let mut path = forest_paths(n, edges).remove(0);
                    if path[0] != gadget.pairs()[i].0 {
                        path.reverse();
                    }
                    routes[i] = Some(path);
                }
                true
            }
            None => {
                violation = Some(forest_paths(n, edges));
                false
            }
        }
    });

    if let Some(paths) = violation {
        return Err(ContractViolation::CounterWitness { paths });
    }
    let routes = routes
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.ok_or(ContractViolation::Infeasible { pair: i + 1 }))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ContractCertificate {
        routes,
        path_systems: systems,
    })
}

/// How far a gadget is from meeting its contract; zero everywhere iff
/// [`verify_gadget_contract`] would succeed. Used to steer gadget search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct ContractDefects {
    pub infeasible_pairs: usize,
    /// Violating spanning path systems, counted up to the enumeration limit.
    pub bad_systems: usize,
}

impl ContractDefects {
    pub fn is_clean(&self) -> bool {
        self.infeasible_pairs == 0 && self.bad_systems == 0
    }

    /// Scalar objective for local search.
    pub fn score(&self) -> usize {
        self.bad_systems + 64 * self.infeasible_pairs
    }
}

/// Counts contract defects, stopping after `limit` violating path systems.
pub fn contract_defects(gadget: &ClauseGadget, limit: usize) -> ContractDefects {
    let graph = gadget.graph();
    let n = graph.vertex_count();
    let terminal: Vec<bool> = (0..n).map(|v| gadget.is_terminal(v)).collect();
    let mut feasible = vec![false; gadget.arity()];
    let mut bad = 0usize;
    let mut degree = vec![0u8; n];
    if gadget
        .pairs()
        .iter()
        .any(|&(s, t)| graph.degree(s) == 0 || graph.degree(t) == 0)
    {
        return ContractDefects {
            infeasible_pairs: gadget.arity(),
            bad_systems: limit,
        };
    }
    ForestEnumerator::new(graph, terminal).run(&mut |edges| {
        degree.iter_mut().for_each(|d| *d = 0);
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut ends = (0..n).filter(|&v| degree[v] == 1);
        let (a, b, extra) = (ends.next(), ends.next(), ends.next());
        let pair = match (a, b, extra) {
            (Some(a), Some(b), None) => gadget
                .pairs()
                .iter()
                .position(|&(s, t)| (s == a && t == b) || (s == b && t == a)),
            _ => None,
        };
        match pair {
            Some(i) => feasible[i] = true,
            None => bad += 1,
        }
        bad < limit
    });
    ContractDefects {
        infeasible_pairs: feasible.iter().filter(|&&f| !f).count(),
        bad_systems: bad,
    }
}

const GAMMA2: &str = include_str!("../catalog/gamma2.txt");
const GAMMA3: &str = include_str!("../catalog/gamma3.txt");

/// Seeds under which [`search_gadget`] produces the shipped gadgets, with
/// the size limits used.
pub const CATALOG_SEEDS: [(usize, usize, u64); 2] = [(2, 10, 3), (3, 27, 2)];

/// The shipped clause gadget with `k` pairs.
pub fn build_clause_gadget(k: usize) -> Result<ClauseGadget, GadgetError> {
    let text = match k {
        2 => GAMMA2,
        3 => GAMMA3,
        _ => return Err(GadgetError::UnsupportedArity(k)),
    };
    ClauseGadget::from_catalog_text(text)
}

/// Candidate family explored by [`search_gadget`]. Every candidate is the
/// union of one Hamiltonian route per pair, so feasibility holds by
/// construction and the search only has to remove bad path systems.
#[derive(Debug, Clone, Copy)]
enum Family {
    /// Routes are paths on `n` vertices.
    Plain(usize),
    /// Routes are directed paths on `n` base vertices; each base vertex
    /// becomes a path `in - mid - out` and an arc `u -> w` the edge
    /// `out(u) - in(w)`.
    Split(usize),
}

impl Family {
    fn base_vertices(self) -> usize {
        match self {
            Family::Plain(n) | Family::Split(n) => n,
        }
    }

    fn build(self, routes: &[Vec<usize>]) -> ClauseGadget {
        let k = routes.len();
        let (graph, pairs) = match self {
            Family::Plain(n) => {
                let mut g = Graph::new(n);
                for r in routes {
                    for w in r.windows(2) {
                        if !g.has_edge(w[0], w[1]) {
                            g.add_edge(w[0], w[1]).expect("route vertices in range");
                        }
                    }
                }
                (g, (0..k).map(|i| (2 * i, 2 * i + 1)).collect())
            }
            Family::Split(n) => {
                let mut g = Graph::new(3 * n);
                for v in 0..n {
                    g.add_edge(3 * v, 3 * v + 1).expect("fresh edge");
                    g.add_edge(3 * v + 1, 3 * v + 2).expect("fresh edge");
                }
                for r in routes {
                    for w in r.windows(2) {
                        let (a, b) = (3 * w[0] + 2, 3 * w[1]);
                        if !g.has_edge(a, b) {
                            g.add_edge(a, b).expect("route vertices in range");
                        }
                    }
                }
                (g, (0..k).map(|i| (6 * i, 6 * i + 5)).collect())
            }
        };
        ClauseGadget::new(graph, pairs).expect("distinct terminals")
    }
}

/// Local-search steps per restart of [`search_gadget`].
const SEARCH_RESTART_STEPS: usize = 3000;

/// Searches for a contract-passing gadget with `k` pairs and at most
/// `max_vertices` vertices by simulated annealing over unions of routes.
/// `budget` bounds the number of candidates evaluated. Returns `Ok(None)`
/// when no gadget of that size can exist, and the result depends only on
/// the arguments.
pub fn search_gadget(
    k: usize,
    max_vertices: usize,
    budget: u64,
    seed: u64,
) -> Result<Option<ClauseGadget>, GadgetError> {
    if !(2..=3).contains(&k) {
        return Err(GadgetError::UnsupportedArity(k));
    }
    if max_vertices < 2 * k {
        return Ok(None);
    }
    let max_vertices = max_vertices.min(MAX_VERIFIED_GADGET);
    let plain: Vec<Family> = (2 * k..=max_vertices).map(Family::Plain).collect();
    let split: Vec<Family> = (2 * k..=max_vertices / 3).map(Family::Split).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spent = 0u64;
    let score = |g: &ClauseGadget| contract_defects(g, 20_000).score();
    for restart in 0usize.. {
        let family = if split.is_empty() || restart % 2 == 0 && !plain.is_empty() {
            plain[(restart / 2) % plain.len()]
        } else {
            split[(restart / 2) % split.len()]
        };
        let n = family.base_vertices();
        let mut routes: Vec<Vec<usize>> = (0..k)
            .map(|i| {
                let mut middle: Vec<usize> = (0..n).filter(|&v| v / 2 != i).collect();
                middle.shuffle(&mut rng);
                let mut r = vec![2 * i];
                r.extend(middle);
                r.push(2 * i + 1);
                r
            })
            .collect();
        let mut current = score(&family.build(&routes));
        let mut temperature = 2.0f64;
        for _ in 0..SEARCH_RESTART_STEPS {
            if spent >= budget {
                return Err(GadgetError::BudgetExhausted);
            }
            spent += 1;
            let i = rng.gen_range(0..k);
            let previous = routes[i].clone();
            let a = rng.gen_range(1..n - 1);
            let b = rng.gen_range(1..n - 1);
            if rng.gen_bool(0.5) {
                routes[i].swap(a, b);
            } else {
                routes[i][a.min(b)..=a.max(b)].reverse();
            }
            let candidate = family.build(&routes);
            let s = score(&candidate);
            if s == 0 && verify_gadget_contract(&candidate).is_ok() {
                return Ok(Some(candidate));
            }
            let accept =
                s <= current || rng.gen_bool(((current as f64 - s as f64) / temperature).exp());
            if accept {
                current = s;
            } else {
                routes[i] = previous;
            }
            temperature = (temperature * 0.995).max(0.05);
        }
    }
    unreachable!("restart loop only exits by returning")
}
