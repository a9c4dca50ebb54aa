//! Compiles a normalized formula into a Hamiltonian Path instance together
//! with a linear order of small mim-width.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::formula::{Formula, Literal, NormalizationStatus, NormalizedFormula};
use crate::gadgets::{
    add_variable_gadget, build_clause_gadget, ClauseGadget, CycleVertices, GadgetError,
    VariableGadgetLayout,
};
use crate::graph::{EdgeKind, Graph, GraphError, LinearOrder, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("formula is not reducible (normalization status {0:?})")]
    NotReducible(NormalizationStatus),
    #[error("clause {clause} has {len} literals; only 2 or 3 are supported")]
    ClauseArityUnsupported { clause: usize, len: usize },
    #[error("instance is already a cycle instance")]
    AlreadyCycleKind,
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("instance line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("instance file does not match the construction: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Zero,
    One,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    In,
    Out,
}

/// Role of a vertex in the construction. Variable and clause indices are
/// 1-based; clause-gadget vertices keep their catalog id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    S,
    T,
    Apex,
    Start(usize),
    End(usize),
    Link(usize),
    Var {
        var: usize,
        column: usize,
        side: Side,
        dir: Direction,
    },
    Clause {
        clause: usize,
        local: usize,
    },
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexLabel::S => write!(f, "s"),
            VertexLabel::T => write!(f, "t"),
            VertexLabel::Apex => write!(f, "apex"),
            VertexLabel::Start(i) => write!(f, "s_i:{i}"),
            VertexLabel::End(i) => write!(f, "t_i:{i}"),
            VertexLabel::Link(i) => write!(f, "p_i:{i}"),
            VertexLabel::Var {
                var,
                column,
                side,
                dir,
            } => {
                let side = match side {
                    Side::Zero => "0",
                    Side::One => "1",
                    Side::Dot => "dot",
                };
                let dir = match dir {
                    Direction::In => "in",
                    Direction::Out => "out",
                };
                write!(f, "v:{var}:{column}:{side}:{dir}")
            }
            VertexLabel::Clause { clause, local } => write!(f, "cg:{clause}:{local}"),
        }
    }
}

impl FromStr for VertexLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad vertex label `{s}`");
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        Ok(match parts.as_slice() {
            ["s"] => VertexLabel::S,
            ["t"] => VertexLabel::T,
            ["apex"] => VertexLabel::Apex,
            ["s_i", i] => VertexLabel::Start(num(i)?),
            ["t_i", i] => VertexLabel::End(num(i)?),
            ["p_i", i] => VertexLabel::Link(num(i)?),
            ["v", i, j, side, dir] => VertexLabel::Var {
                var: num(i)?,
                column: num(j)?,
                side: match *side {
                    "0" => Side::Zero,
                    "1" => Side::One,
                    "dot" => Side::Dot,
                    _ => return Err(bad()),
                },
                dir: match *dir {
                    "in" => Direction::In,
                    "out" => Direction::Out,
                    _ => return Err(bad()),
                },
            },
            ["cg", j, local] => VertexLabel::Clause {
                clause: num(j)?,
                local: num(local)?,
            },
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Path,
    Cycle,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Path => "path",
            ProblemKind::Cycle => "cycle",
        }
    }
}

/// Attachment of literal `pair` of clause `clause` (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WiringRecord {
    pub clause: usize,
    pub pair: usize,
    pub literal: Literal,
    pub sigma: Vertex,
    pub tau: Vertex,
    /// `sigma` and the matching input vertex of the variable's column.
    pub sigma_edge: (Vertex, Vertex),
    /// `tau` and the matching output vertex.
    pub tau_edge: (Vertex, Vertex),
}

/// A copy of a clause gadget inside the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseCopy {
    /// Instance vertex of each catalog vertex.
    pub vertices: Vec<Vertex>,
    /// `(sigma_h, tau_h)` as instance vertices.
    pub pairs: Vec<(Vertex, Vertex)>,
    /// Catalog ids in block order.
    pub block_order: Vec<usize>,
}

/// A reduced instance: the graph, vertex labels, and the emitted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: Graph,
    labels: Vec<VertexLabel>,
    order: LinearOrder,
    formula: NormalizedFormula,
    kind: ProblemKind,
    s: Vertex,
    t: Vertex,
    apex: Option<Vertex>,
    links: Vec<Vertex>,
    variables: Vec<VariableGadgetLayout>,
    clauses: Vec<ClauseCopy>,
    wiring: Vec<WiringRecord>,
    source: Option<String>,
}

/// Builds the Hamiltonian Path instance of a reducible formula.
pub fn reduce(formula: &NormalizedFormula) -> Result<Instance, ReductionError> {
    if formula.status() != NormalizationStatus::Reducible {
        return Err(ReductionError::NotReducible(formula.status()));
    }
    let f = formula.formula();
    let n = f.num_vars();
    let m = f.num_clauses();
    for (j, clause) in f.clauses().iter().enumerate() {
        if !(2..=3).contains(&clause.len()) {
            return Err(ReductionError::ClauseArityUnsupported {
                clause: j + 1,
                len: clause.len(),
            });
        }
    }
    if n == 0 || m == 0 {
        return Err(ReductionError::NotReducible(formula.status()));
    }
    let catalog = [build_clause_gadget(2)?, build_clause_gadget(3)?];

    let mut graph = Graph::new(0);
    let mut labels = Vec::new();
    let fresh = |graph: &mut Graph, labels: &mut Vec<VertexLabel>, label| {
        labels.push(label);
        graph.add_vertex()
    };
    let s = fresh(&mut graph, &mut labels, VertexLabel::S);
    let t = fresh(&mut graph, &mut labels, VertexLabel::T);

    let mut links = Vec::new();
    let mut variables = Vec::with_capacity(n);
    for i in 1..=n {
        if i >= 2 {
            links.push(fresh(&mut graph, &mut labels, VertexLabel::Link(i)));
        }
        let layout = add_variable_gadget(&mut graph, m);
        labels.push(VertexLabel::Start(i));
        for j in 1..=m {
            let var = |side, dir| VertexLabel::Var {
                var: i,
                column: j,
                side,
                dir,
            };
            labels.extend([
                var(Side::Zero, Direction::In),
                var(Side::Zero, Direction::Out),
                var(Side::Dot, Direction::Out),
                var(Side::One, Direction::Out),
                var(Side::One, Direction::In),
                var(Side::Dot, Direction::In),
            ]);
        }
        labels.push(VertexLabel::End(i));
        variables.push(layout);
    }

    // Spine.
    graph.add_edge(s, variables[0].start)?;
    graph.add_edge(variables[n - 1].end, t)?;
    for i in 1..n {
        let p = links[i - 1];
        graph.add_edge(variables[i - 1].end, p)?;
        graph.add_edge(p, variables[i].start)?;
    }

    // Clause gadgets and their attachments.
    let mut clauses = Vec::with_capacity(m);
    let mut wiring = Vec::new();
    for (jdx, clause) in f.clauses().iter().enumerate() {
        let j = jdx + 1;
        let gadget: &ClauseGadget = &catalog[clause.len() - 2];
        let vertices: Vec<Vertex> = (0..gadget.vertex_count())
            .map(|local| {
                fresh(
                    &mut graph,
                    &mut labels,
                    VertexLabel::Clause { clause: j, local },
                )
            })
            .collect();
        for (u, v, _) in gadget.graph().edges() {
            graph.add_edge(vertices[u], vertices[v])?;
        }
        let pairs: Vec<(Vertex, Vertex)> = gadget
            .pairs()
            .iter()
            .map(|&(a, b)| (vertices[a], vertices[b]))
            .collect();
        for (h, (&lit, &(sigma, tau))) in clause.iter().zip(&pairs).enumerate() {
            let column = variables[lit.var() as usize - 1].columns[jdx];
            let side = lit.is_negated();
            let sigma_edge = (sigma, column.input(side));
            let tau_edge = (tau, column.output(side));
            graph.add_edge(sigma_edge.0, sigma_edge.1)?;
            graph.add_edge(tau_edge.0, tau_edge.1)?;
            wiring.push(WiringRecord {
                clause: j,
                pair: h + 1,
                literal: lit,
                sigma,
                tau,
                sigma_edge,
                tau_edge,
            });
        }
        clauses.push(ClauseCopy {
            vertices,
            pairs,
            block_order: gadget.block_order(),
        });
    }

    let mut instance = Instance {
        graph,
        labels,
        order: LinearOrder::identity(0),
        formula: formula.clone(),
        kind: ProblemKind::Path,
        s,
        t,
        apex: None,
        links,
        variables,
        clauses,
        wiring,
        source: None,
    };
    for (u, v) in dummy_edges(&instance) {
        instance.graph.add_edge_of_kind(u, v, EdgeKind::Dummy)?;
    }
    instance.order = build_linear_order(&instance);
    Ok(instance)
}

/// The dummy edges of an instance: links from every variable's outputs in
/// column `j` to the inputs of all earlier variables in column `j + 1`, and
/// from every `t_i` to every later `p_j` not already joined by the spine.
pub fn dummy_edges(instance: &Instance) -> Vec<(Vertex, Vertex)> {
    let n = instance.n();
    let m = instance.m();
    let mut edges = Vec::new();
    for j in 1..m {
        for i in 2..=n {
            for h in 1..i {
                let from = instance.column(i, j);
                let to = instance.column(h, j + 1);
                for b1 in [false, true] {
                    for b2 in [false, true] {
                        edges.push((from.output(b1), to.input(b2)));
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in i + 2..=n {
            edges.push((instance.end(i), instance.link(j)));
        }
    }
    edges
}

/// Closed-form number of dummy edges for `n` variables and `m` clauses.
pub fn dummy_edge_count(n: usize, m: usize) -> usize {
    2 * n * n.saturating_sub(1) * m.saturating_sub(1)
        + n.saturating_sub(1) * n.saturating_sub(2) / 2
}

/// The block order of the construction: variable columns left to right,
/// each column followed by its clause gadget, with the spine vertices placed
/// beside the gadgets they attach to.
pub fn build_linear_order(instance: &Instance) -> LinearOrder {
    let n = instance.n();
    let m = instance.m();
    let mut order = Vec::with_capacity(instance.graph.vertex_count());
    let column = |order: &mut Vec<Vertex>, i: usize, j: usize| {
        order.extend(instance.column(i, j).in_cycle_order());
    };
    let gadget = |order: &mut Vec<Vertex>, j: usize| {
        let copy = &instance.clauses[j - 1];
        order.extend(copy.block_order.iter().map(|&local| copy.vertices[local]));
    };
    order.push(instance.s);
    for i in 1..=n {
        if i >= 2 {
            order.push(instance.link(i));
        }
        order.push(instance.start(i));
        column(&mut order, i, 1);
        if m == 1 {
            order.push(instance.end(i));
        }
    }
    if m == 1 {
        order.push(instance.t);
        gadget(&mut order, 1);
    } else {
        gadget(&mut order, 1);
        for j in 2..m {
            for i in 1..=n {
                column(&mut order, i, j);
            }
            gadget(&mut order, j);
        }
        for i in 1..=n {
            column(&mut order, i, m);
            order.push(instance.end(i));
        }
        order.push(instance.t);
        gadget(&mut order, m);
    }
    if let Some(apex) = instance.apex {
        order.push(apex);
    }
    LinearOrder::new(order).expect("block order covers every vertex once")
}

/// Adds a vertex adjacent to exactly `s` and `t`, turning Hamiltonian paths
/// into Hamiltonian cycles. The new vertex goes last in the order.
pub fn to_cycle_instance(instance: &Instance) -> Result<Instance, ReductionError> {
    if instance.kind == ProblemKind::Cycle {
        return Err(ReductionError::AlreadyCycleKind);
    }
    let mut out = instance.clone();
    let apex = out.graph.add_vertex();
    out.labels.push(VertexLabel::Apex);
    out.graph.add_edge(apex, out.s)?;
    out.graph.add_edge(apex, out.t)?;
    out.apex = Some(apex);
    out.kind = ProblemKind::Cycle;
    out.order = build_linear_order(&out);
    Ok(out)
}

impl Instance {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn order(&self) -> &LinearOrder {
        &self.order
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn formula(&self) -> &NormalizedFormula {
        &self.formula
    }

    /// Number of variables.
    pub fn n(&self) -> usize {
        self.variables.len()
    }

    /// Number of clauses.
    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn s(&self) -> Vertex {
        self.s
    }

    pub fn t(&self) -> Vertex {
        self.t
    }

    pub fn apex(&self) -> Option<Vertex> {
        self.apex
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn label(&self, v: Vertex) -> VertexLabel {
        self.labels[v]
    }

    /// Inverse of [`Instance::label`].
    pub fn vertex(&self, label: VertexLabel) -> Option<Vertex> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Layout of the gadget of variable `i` (1-based).
    pub fn variable(&self, i: usize) -> &VariableGadgetLayout {
        &self.variables[i - 1]
    }

    /// Six-cycle `D_i^j` (both 1-based).
    pub fn column(&self, i: usize, j: usize) -> CycleVertices {
        self.variables[i - 1].columns[j - 1]
    }

    pub fn start(&self, i: usize) -> Vertex {
        self.variables[i - 1].start
    }

    pub fn end(&self, i: usize) -> Vertex {
        self.variables[i - 1].end
    }

    /// `p_i` for `2 <= i <= n`.
    pub fn link(&self, i: usize) -> Vertex {
        self.links[i - 2]
    }

    /// Clause gadget copy `j` (1-based).
    pub fn clause(&self, j: usize) -> &ClauseCopy {
        &self.clauses[j - 1]
    }

    pub fn wiring(&self) -> &[WiringRecord] {
        &self.wiring
    }

    /// Digest of the source file, if recorded.
    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn set_source(&mut self, digest: impl Into<String>) {
        self.source = Some(digest.into());
    }

    /// Serializes the instance. The text determines the instance: reading
    /// rebuilds it from the formula lines and checks the rest against it.
    pub fn to_text(&self) -> String {
        let mut out = String::from("c mimham instance\n");
        if let Some(src) = &self.source {
            let _ = writeln!(out, "source {src}");
        }
        let _ = writeln!(out, "kind {}", self.kind.as_str());
        let f = &self.formula;
        let _ = writeln!(out, "vars {}", f.original_num_vars());
        let varmap: Vec<String> = f.original_vars().iter().map(u32::to_string).collect();
        let _ = writeln!(out, "varmap {}", varmap.join(" "));
        let fixed: Vec<String> = f
            .fixed()
            .iter()
            .map(|(v, b)| format!("{v}={}", u8::from(*b)))
            .collect();
        if fixed.is_empty() {
            out.push_str("fixed\n");
        } else {
            let _ = writeln!(out, "fixed {}", fixed.join(" "));
        }
        for clause in f.formula().clauses() {
            let lits: Vec<String> = clause.iter().map(|l| l.to_dimacs().to_string()).collect();
            let _ = writeln!(out, "clause {}", lits.join(" "));
        }
        out.push_str(&self.graph.to_text());
        for (v, label) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "vlabel {v} {label}");
        }
        out.push_str(&self.order.to_text());
        out
    }

    pub fn from_text(text: &str) -> Result<Instance, ReductionError> {
        let raw = InstanceFile::parse(text)?;
        let formula = raw
            .formula
            .ok_or_else(|| ReductionError::Mismatch("missing formula lines".into()))?;
        let mut inst = reduce(&formula)?;
        if raw.kind == ProblemKind::Cycle {
            inst = to_cycle_instance(&inst)?;
        }
        if raw.graph != inst.graph {
            return Err(ReductionError::Mismatch("graph differs".into()));
        }
        if raw.labels.as_ref().is_some_and(|l| *l != inst.labels) {
            return Err(ReductionError::Mismatch("vertex labels differ".into()));
        }
        if raw.order.as_ref().is_some_and(|o| *o != inst.order) {
            return Err(ReductionError::Mismatch("order differs".into()));
        }
        inst.source = raw.source;
        Ok(inst)
    }

    /// DOT rendering with construction labels; dummy edges are dashed.
    pub fn to_dot(&self) -> String {
        self.graph
            .to_dot("instance", |v| Some(self.labels[v].to_string()))
    }
}

/// Loosely parsed instance file. Only the graph is required, so plain
/// graph-and-order files can be certified too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub graph: Graph,
    pub order: Option<LinearOrder>,
    pub labels: Option<Vec<VertexLabel>>,
    pub kind: ProblemKind,
    pub formula: Option<NormalizedFormula>,
    pub source: Option<String>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile, ReductionError> {
        let (graph, rest) = Graph::parse_text_lenient(text)?;
        let n = graph.vertex_count();
        let mut order = None;
        let mut labels: BTreeMap<usize, VertexLabel> = BTreeMap::new();
        let mut kind = ProblemKind::Path;
        let mut source = None;
        let mut vars: Option<usize> = None;
        let mut varmap: Option<Vec<u32>> = None;
        let mut fixed: BTreeMap<u32, bool> = BTreeMap::new();
        let mut clauses: Vec<Vec<Literal>> = Vec::new();
        for (line, content) in rest {
            let err = |message: String| ReductionError::Format { line, message };
            let mut parts = content.split_whitespace();
            let Some(head) = parts.next() else { continue };
            let args: Vec<&str> = parts.collect();
            match head {
                "c" => {}
                "source" => source = Some(args.join(" ")),
                "kind" => {
                    kind = match args.as_slice() {
                        ["path"] => ProblemKind::Path,
                        ["cycle"] => ProblemKind::Cycle,
                        _ => return Err(err("kind must be path or cycle".into())),
                    }
                }
                "vars" => {
                    vars = Some(
                        args.first()
                            .and_then(|t| t.parse().ok())
                            .ok_or_else(|| err("bad variable count".into()))?,
                    )
                }
                "varmap" => {
                    varmap = Some(
                        args.iter()
                            .map(|t| t.parse())
                            .collect::<Result<_, _>>()
                            .map_err(|_| err("bad variable".into()))?,
                    )
                }
                "fixed" => {
                    for tok in args {
                        let (v, b) = tok
                            .split_once('=')
                            .ok_or_else(|| err(format!("bad entry `{tok}`")))?;
                        let v: u32 = v.parse().map_err(|_| err(format!("bad entry `{tok}`")))?;
                        let b = match b {
                            "0" => false,
                            "1" => true,
                            _ => return Err(err(format!("bad entry `{tok}`"))),
                        };
                        fixed.insert(v, b);
                    }
                }
                "clause" => {
                    let lits = args
                        .iter()
                        .map(|t| t.parse::<i64>().ok().and_then(Literal::from_dimacs))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| err("bad literal".into()))?;
                    clauses.push(lits);
                }
                "vlabel" => {
                    let [id, label] = args.as_slice() else {
                        return Err(err("expected `vlabel <id> <label>`".into()));
                    };
                    let id: usize = id.parse().map_err(|_| err("bad vertex id".into()))?;
                    if id >= n {
                        return Err(err(format!("vertex {id} out of range")));
                    }
                    labels.insert(id, label.parse().map_err(err)?);
                }
                "order" => order = Some(LinearOrder::parse_line(&content)?),
                _ => return Err(err(format!("unknown line kind `{head}`"))),
            }
        }
        if order.as_ref().is_some_and(|o| o.len() != n) {
            return Err(GraphError::NotAPermutation.into());
        }
        let labels = if labels.is_empty() {
            None
        } else if labels.len() == n {
            Some(labels.into_values().collect())
        } else {
            return Err(ReductionError::Mismatch(
                "labels do not cover every vertex".into(),
            ));
        };
        let formula = match varmap {
            None if clauses.is_empty() => None,
            varmap => {
                let bad = |m: &str| ReductionError::Mismatch(m.into());
                let varmap = varmap.ok_or_else(|| bad("clause lines without varmap"))?;
                let reduced =
                    Formula::new(varmap.len(), clauses).map_err(|e| bad(&e.to_string()))?;
                let original = vars.unwrap_or(varmap.iter().copied().max().unwrap_or(0) as usize);
                Some(
                    NormalizedFormula::from_parts(reduced, varmap, fixed, original)
                        .ok_or_else(|| bad("formula lines are not in reducible form"))?,
                )
            }
        };
        Ok(InstanceFile {
            graph,
            order,
            labels,
            kind,
            formula,
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::normalize;

    fn reduced(n: usize, clauses: &[&[i64]]) -> Instance {
        let f = Formula::from_ints(n, clauses).unwrap();
        reduce(&NormalizedFormula::from_reducible(f).unwrap()).unwrap()
    }

    fn gamma(k: usize) -> usize {
        build_clause_gadget(k).unwrap().vertex_count()
    }

    #[test]
    fn sizes_follow_closed_form() {
        let inst = reduced(4, &[&[1, -2, 3], &[1, 3], &[-1, -3, -4]]);
        let expected = 2 + 3 + 8 + 6 * 4 * 3 + 2 * gamma(3) + gamma(2);
        assert_eq!(inst.graph().vertex_count(), expected);
        assert_eq!(inst.graph().dummy_edges().len(), dummy_edge_count(4, 3));
        assert_eq!(inst.wiring().len(), 8);
    }

    #[test]
    fn degrees() {
        let inst = reduced(3, &[&[1, -2, 3], &[-1, 2], &[2, 3]]);
        let g = inst.graph();
        assert_eq!(g.degree(inst.s()), 1);
        assert_eq!(g.degree(inst.t()), 1);
        for i in 1..=3 {
            for j in 1..=3 {
                let c = inst.column(i, j);
                assert_eq!(g.degree(c.dot_in), 2);
                assert_eq!(g.degree(c.dot_out), 2);
            }
        }
        for w in inst.wiring() {
            let copy = inst.clause(w.clause);
            for v in [w.sigma, w.tau] {
                let outside = g
                    .neighbors(v)
                    .iter()
                    .filter(|u| !copy.vertices.contains(u))
                    .count();
                assert_eq!(outside, 1);
            }
        }
    }

    #[test]
    fn dummy_counts() {
        assert_eq!(dummy_edge_count(2, 2), 4);
        assert_eq!(dummy_edge_count(2, 1), 0);
        assert_eq!(dummy_edge_count(3, 1), 1);
        assert_eq!(dummy_edge_count(1, 5), 0);
        for n in 1..=6 {
            for m in 1..=6 {
                let a = 2 * n * (n - 1) * (m - 1);
                let b = (1..=n)
                    .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
                    .filter(|&(i, j)| j != i + 1)
                    .count();
                assert_eq!(dummy_edge_count(n, m), a + b);
            }
        }
    }

    #[test]
    fn single_variable_has_no_dummies() {
        let inst = reduced(2, &[&[1, 2]]);
        assert_eq!(inst.graph().dummy_edges().len(), 0);
        let f = normalize(&Formula::from_ints(1, &[&[1, -1]]).unwrap());
        assert!(matches!(reduce(&f), Err(ReductionError::NotReducible(_))));
    }

    #[test]
    fn order_shape() {
        let inst = reduced(3, &[&[1, -2, 3], &[-1, 2], &[2, 3]]);
        let o = inst.order().vertices();
        assert_eq!(o[0], inst.s());
        assert_eq!(o[1], inst.start(1));
        let last_gadget = &inst.clause(3).vertices;
        assert!(last_gadget.contains(&o[o.len() - 1]));
        let t_pos = inst.order().position(inst.t());
        assert_eq!(t_pos + last_gadget.len() + 1, o.len());

        let one = reduced(2, &[&[1, -2]]);
        let labels: Vec<String> = one
            .order()
            .vertices()
            .iter()
            .map(|&v| one.label(v).to_string())
            .collect();
        assert_eq!(&labels[..3], ["s", "s_i:1", "v:1:1:0:in"]);
        assert_eq!(labels[8], "t_i:1");
        assert_eq!(labels[9], "p_i:2");
        assert_eq!(labels[18], "t");
    }

    #[test]
    fn cycle_variant() {
        let inst = reduced(2, &[&[1, 2], &[-1, -2]]);
        let cyc = to_cycle_instance(&inst).unwrap();
        let apex = cyc.apex().unwrap();
        assert_eq!(cyc.graph().degree(apex), 2);
        assert_eq!(cyc.order().vertices().last(), Some(&apex));
        assert_eq!(
            to_cycle_instance(&cyc),
            Err(ReductionError::AlreadyCycleKind)
        );
    }

    #[test]
    fn labels_round_trip() {
        let inst = reduced(2, &[&[1, -2], &[-1, 2]]);
        let cyc = to_cycle_instance(&inst).unwrap();
        for (v, l) in cyc.labels().iter().enumerate() {
            assert_eq!(l.to_string().parse::<VertexLabel>().unwrap(), *l);
            assert_eq!(cyc.vertex(*l), Some(v));
        }
        assert!("v:1:1:2:in".parse::<VertexLabel>().is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = normalize(&Formula::from_ints(5, &[&[1, -3], &[4], &[-4, 5, 1]]).unwrap());
        let mut inst = reduce(&f).unwrap();
        inst.set_source("sha256:abc");
        for candidate in [inst.clone(), to_cycle_instance(&inst).unwrap()] {
            let text = candidate.to_text();
            let back = Instance::from_text(&text).unwrap();
            assert_eq!(back, candidate);
            assert_eq!(back.to_text(), text);
        }
        let tampered = inst.to_text().replacen("e 0 ", "e 1 ", 1);
        assert!(Instance::from_text(&tampered).is_err());
    }
}
