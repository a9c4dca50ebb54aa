//! Simple undirected graphs with core/dummy edge marking, linear orders,
//! prefix cuts and the line-based text formats.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum EdgeKind {
    #[default]
    Core,
    Dummy,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Core => "core",
            EdgeKind::Dummy => "dummy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {count} vertices")]
    VertexOutOfRange { vertex: Vertex, count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("order is not a permutation of the vertex set")]
    NotAPermutation,
    #[error("prefix position {position} out of range 1..={len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Simple undirected graph on vertices `0..vertex_count`. Neighbor lists are
/// kept sorted; dummy edges are recorded as normalized `(min, max)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    dummy: BTreeSet<(Vertex, Vertex)>,
    edge_count: usize,
}

fn norm(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    pub fn new(vertex_count: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); vertex_count],
            dummy: BTreeSet::new(),
            edge_count: 0,
        }
    }

    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(vertex_count);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> Vertex {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        self.add_edge_of_kind(u, v, EdgeKind::Core)
    }

    pub fn add_edge_of_kind(
        &mut self,
        u: Vertex,
        v: Vertex,
        kind: EdgeKind,
    ) -> Result<(), GraphError> {
        let count = self.adj.len();
        for w in [u, v] {
            if w >= count {
                return Err(GraphError::VertexOutOfRange { vertex: w, count });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let pos = match self.adj[u].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u, v)),
            Err(pos) => pos,
        };
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        if kind == EdgeKind::Dummy {
            self.dummy.insert(norm(u, v));
        }
        self.edge_count += 1;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_kind(&self, u: Vertex, v: Vertex) -> Option<EdgeKind> {
        if !self.has_edge(u, v) {
            None
        } else if self.dummy.contains(&norm(u, v)) {
            Some(EdgeKind::Dummy)
        } else {
            Some(EdgeKind::Core)
        }
    }

    pub fn is_dummy(&self, u: Vertex, v: Vertex) -> bool {
        self.dummy.contains(&norm(u, v))
    }

    pub fn dummy_edges(&self) -> &BTreeSet<(Vertex, Vertex)> {
        &self.dummy
    }

    /// Edges as `(u, v, kind)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, EdgeKind)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(u, ns)| {
            ns.iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v, self.edge_kind(u, v).unwrap()))
        })
    }

    /// Copy of the graph with all dummy edges removed.
    pub fn without_dummy_edges(&self) -> Graph {
        let mut g = Graph::new(self.vertex_count());
        for (u, v, kind) in self.edges() {
            if kind == EdgeKind::Core {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Subgraph induced by `vertices` (duplicates ignored). Sub-vertex ids
    /// follow the sorted order of the kept vertices.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> Result<(Graph, InducedMap), GraphError> {
        let n = self.vertex_count();
        let mut keep: Vec<Vertex> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&v| v >= n) {
            return Err(GraphError::VertexOutOfRange {
                vertex: bad,
                count: n,
            });
        }
        let mut to_sub = vec![None; n];
        for (i, &v) in keep.iter().enumerate() {
            to_sub[v] = Some(i);
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                if let Some(j) = to_sub[w] {
                    if i < j {
                        g.add_edge_of_kind(i, j, self.edge_kind(v, w).unwrap())?;
                    }
                }
            }
        }
        Ok((
            g,
            InducedMap {
                to_sub,
                to_parent: keep,
            },
        ))
    }

    /// Line-based text form: `graph <n>` then `e <u> <v> <core|dummy>` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph {}\n", self.vertex_count());
        for (u, v, kind) in self.edges() {
            let _ = writeln!(out, "e {u} {v} {}", kind.as_str());
        }
        out
    }

    /// Parses the `graph`/`e` lines of a text file, ignoring other lines so
    /// that richer formats can share the reader. Returns the graph and the
    /// lines that were not consumed, with their 1-based line numbers.
    pub fn parse_text_lenient(text: &str) -> Result<(Graph, Vec<(usize, String)>), GraphError> {
        let mut graph: Option<Graph> = None;
        let mut rest = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let fmt_err = |message: &str| GraphError::Format {
                line: line_no,
                message: message.to_string(),
            };
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("graph") => {
                    if graph.is_some() {
                        return Err(fmt_err("duplicate graph header"));
                    }
                    let n: usize = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| fmt_err("bad vertex count"))?;
                    if parts.next().is_some() {
                        return Err(fmt_err("trailing tokens"));
                    }
                    graph = Some(Graph::new(n));
                }
                Some("e") => {
                    let g = graph
                        .as_mut()
                        .ok_or_else(|| fmt_err("edge before graph header"))?;
                    let u: Vertex = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| fmt_err("bad endpoint"))?;
                    let v: Vertex = parts
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| fmt_err("bad endpoint"))?;
                    let kind = match parts.next() {
                        Some("core") | None => EdgeKind::Core,
                        Some("dummy") => EdgeKind::Dummy,
                        Some(_) => return Err(fmt_err("edge kind must be core or dummy")),
                    };
                    g.add_edge_of_kind(u, v, kind)
                        .map_err(|e| fmt_err(&e.to_string()))?;
                }
                _ => rest.push((line_no, line.to_string())),
            }
        }
        let graph = graph.ok_or(GraphError::Format {
            line: 1,
            message: "missing graph header".into(),
        })?;
        Ok((graph, rest))
    }

    /// Strict parser: every nonblank line must be a `graph` or `e` line.
    pub fn from_text(text: &str) -> Result<Graph, GraphError> {
        let (graph, rest) = Self::parse_text_lenient(text)?;
        if let Some((line, _)) = rest.iter().find(|(_, l)| !l.trim().is_empty()) {
            return Err(GraphError::Format {
                line: *line,
                message: "unexpected line".into(),
            });
        }
        Ok(graph)
    }

    /// Graphviz export; dummy edges are drawn dashed.
    pub fn to_dot(&self, name: &str, label: impl Fn(Vertex) -> Option<String>) -> String {
        let mut out = format!("graph {name} {{\n  node [shape=circle, fontsize=10];\n");
        for v in 0..self.vertex_count() {
            match label(v) {
                Some(l) => {
                    let _ = writeln!(out, "  {v} [label=\"{}\"];", l.replace('"', "\\\""));
                }
                None => {
                    let _ = writeln!(out, "  {v};");
                }
            }
        }
        for (u, v, kind) in self.edges() {
            match kind {
                EdgeKind::Core => {
                    let _ = writeln!(out, "  {u} -- {v};");
                }
                EdgeKind::Dummy => {
                    let _ = writeln!(out, "  {u} -- {v} [style=dashed, color=gray];");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Vertex correspondence for [`Graph::induced_subgraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub to_sub: Vec<Option<Vertex>>,
    pub to_parent: Vec<Vertex>,
}

/// A permutation of the vertex set with constant-time rank lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrder {
    vertices: Vec<Vertex>,
    position: Vec<usize>,
}

impl LinearOrder {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self, GraphError> {
        let n = vertices.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(GraphError::NotAPermutation);
            }
            position[v] = i;
        }
        Ok(LinearOrder { vertices, position })
    }

    pub fn identity(n: usize) -> Self {
        LinearOrder::new((0..n).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Zero-based rank of `v`.
    pub fn position(&self, v: Vertex) -> usize {
        self.position[v]
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("order");
        for v in &self.vertices {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
        out
    }

    pub fn parse_line(line: &str) -> Result<Self, GraphError> {
        let mut parts = line.split_whitespace();
        if parts.next() != Some("order") {
            return Err(GraphError::Format {
                line: 1,
                message: "expected order line".into(),
            });
        }
        let vertices = parts
            .map(|t| t.parse::<Vertex>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| GraphError::Format {
                line: 1,
                message: "bad vertex in order".into(),
            })?;
        LinearOrder::new(vertices)
    }
}

/// The bipartite graph of edges crossing `(left, right)`. Edges are stored
/// left endpoint first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteCut {
    pub left: Vec<Vertex>,
    pub right: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

impl BipartiteCut {
    pub fn new(graph: &Graph, left: &[Vertex]) -> Self {
        let n = graph.vertex_count();
        let mut in_left = vec![false; n];
        for &v in left {
            in_left[v] = true;
        }
        let left: Vec<Vertex> = (0..n).filter(|&v| in_left[v]).collect();
        let right: Vec<Vertex> = (0..n).filter(|&v| !in_left[v]).collect();
        let edges = left
            .iter()
            .flat_map(|&a| {
                graph
                    .neighbors(a)
                    .iter()
                    .filter(|&&b| !in_left[b])
                    .map(move |&b| (a, b))
            })
            .collect();
        BipartiteCut { left, right, edges }
    }

    /// Builds a cut directly from its crossing edges.
    pub fn from_edges(left: Vec<Vertex>, right: Vec<Vertex>, edges: Vec<(Vertex, Vertex)>) -> Self {
        BipartiteCut { left, right, edges }
    }
}

/// Cut between the first `i` vertices of `order` and the rest.
pub fn prefix_cut(
    graph: &Graph,
    order: &LinearOrder,
    i: usize,
) -> Result<BipartiteCut, GraphError> {
    if i == 0 || i > order.len() {
        return Err(GraphError::PositionOutOfRange {
            position: i,
            len: order.len(),
        });
    }
    Ok(BipartiteCut::new(graph, &order.vertices()[..i]))
}
