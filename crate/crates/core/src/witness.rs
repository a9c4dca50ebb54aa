//! Translation between satisfying assignments and Hamiltonian paths of a
//! reduced instance, path validation, and the traversal-discipline checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{evaluate, Assignment};
use crate::gadgets::{build_clause_gadget, verify_gadget_contract, CycleVertices};
use crate::graph::{Graph, Vertex};
use crate::reduction::{Instance, ProblemKind};

/// First problem found by [`verify_path`]; `index` is a position in the sequence.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathViolation {
    #[error("empty vertex sequence")]
    Empty,
    #[error("position {index}: vertex {vertex} out of range")]
    OutOfRange { index: usize, vertex: Vertex },
    #[error("position {index}: vertex {vertex} repeats an earlier position")]
    Repeated { index: usize, vertex: Vertex },
    #[error("position {index}: {u} and {v} are not adjacent")]
    NotAdjacent { index: usize, u: Vertex, v: Vertex },
    #[error("position {index}: edge {u}-{v} is a dummy edge")]
    DummyEdge { index: usize, u: Vertex, v: Vertex },
    #[error("vertex {vertex} is not visited")]
    Missing { vertex: Vertex },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error("assignment leaves variable {0} unset")]
    IncompleteAssignment(u32),
    #[error("clause gadget has no route for pair {pair}")]
    GadgetRoutingFailure { pair: usize },
    #[error("not a Hamiltonian path of the instance: {0}")]
    NotAPath(PathViolation),
    #[error("path does not run between s and t")]
    WrongEnds,
    #[error("variable {var} is traversed irregularly at column {column}")]
    IrregularTraversal { var: usize, column: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Checks that `path` is a path of `graph`: vertices in range and distinct,
/// consecutive vertices adjacent, optionally no dummy edge, and optionally
/// every vertex visited.
pub fn verify_path(
    graph: &Graph,
    path: &[Vertex],
    require_hamiltonian: bool,
    forbid_dummy: bool,
) -> Result<(), PathViolation> {
    if path.is_empty() {
        return Err(PathViolation::Empty);
    }
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    for (index, &vertex) in path.iter().enumerate() {
        if vertex >= n {
            return Err(PathViolation::OutOfRange { index, vertex });
        }
        if seen[vertex] {
            return Err(PathViolation::Repeated { index, vertex });
        }
        seen[vertex] = true;
        if index > 0 {
            let u = path[index - 1];
            if !graph.has_edge(u, vertex) {
                return Err(PathViolation::NotAdjacent {
                    index,
                    u,
                    v: vertex,
                });
            }
            if forbid_dummy && graph.is_dummy(u, vertex) {
                return Err(PathViolation::DummyEdge {
                    index,
                    u,
                    v: vertex,
                });
            }
        }
    }
    if require_hamiltonian {
        if let Some(vertex) = seen.iter().position(|&s| !s) {
            return Err(PathViolation::Missing { vertex });
        }
    }
    Ok(())
}

/// [`verify_path`] plus the closing edge from the last vertex to the first.
pub fn verify_cycle(
    graph: &Graph,
    cycle: &[Vertex],
    forbid_dummy: bool,
) -> Result<(), PathViolation> {
    verify_path(graph, cycle, true, forbid_dummy)?;
    let (u, v) = (cycle[cycle.len() - 1], cycle[0]);
    let index = cycle.len();
    if cycle.len() < 3 || !graph.has_edge(u, v) {
        return Err(PathViolation::NotAdjacent { index, u, v });
    }
    if forbid_dummy && graph.is_dummy(u, v) {
        return Err(PathViolation::DummyEdge { index, u, v });
    }
    Ok(())
}

/// Builds the Hamiltonian path (or cycle, for cycle instances) encoding a
/// satisfying assignment of the instance's formula. Each clause gadget is
/// collected from its first literal that the assignment satisfies.
pub fn path_from_assignment(
    instance: &Instance,
    assignment: &Assignment,
) -> Result<Vec<Vertex>, WitnessError> {
    let formula = instance.formula().formula();
    for var in 1..=formula.num_vars() as u32 {
        if assignment.get(var).is_none() {
            return Err(WitnessError::IncompleteAssignment(var));
        }
    }
    if !evaluate(formula, assignment).map_err(|_| WitnessError::NotSatisfying)? {
        return Err(WitnessError::NotSatisfying);
    }
    let routes: BTreeMap<usize, Vec<Vec<usize>>> = [2, 3]
        .into_iter()
        .map(|k| {
            let gadget = build_clause_gadget(k).expect("shipped gadget loads");
            let routes = verify_gadget_contract(&gadget)
                .map(|c| c.routes)
                .unwrap_or_default();
            (k, routes)
        })
        .collect();

    // detours[(var, column)] = (clause, pair index)
    let mut detours: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for (jdx, clause) in formula.clauses().iter().enumerate() {
        let h = clause
            .iter()
            .position(|&lit| assignment.literal_true(lit) == Some(true))
            .expect("satisfied clause has a true literal");
        detours.insert((clause[h].var() as usize, jdx + 1), (jdx + 1, h));
    }

    let mut path = vec![instance.s()];
    for i in 1..=instance.n() {
        if i >= 2 {
            path.push(instance.link(i));
        }
        path.push(instance.start(i));
        let value = assignment.get(i as u32).expect("checked above");
        for j in 1..=instance.m() {
            let c = instance.column(i, j);
            // True-order enters on the 1-side and sweeps to the 0-side first.
            let (enter, leave) = (value, !value);
            path.extend([c.input(enter), c.dot_in, c.input(leave)]);
            if let Some(&(clause, h)) = detours.get(&(i, j)) {
                let copy = instance.clause(clause);
                let route = routes[&copy.pairs.len()]
                    .get(h)
                    .ok_or(WitnessError::GadgetRoutingFailure { pair: h + 1 })?;
                path.extend(route.iter().map(|&local| copy.vertices[local]));
            }
            path.extend([c.output(leave), c.dot_out, c.output(enter)]);
        }
        path.push(instance.end(i));
    }
    path.push(instance.t());
    if let Some(apex) = instance.apex() {
        path.push(apex);
    }
    Ok(path)
}

/// Rewrites a Hamiltonian path (or cycle) of the instance as the s-to-t
/// path it contains, starting at `s`.
pub fn oriented_path(instance: &Instance, walk: &[Vertex]) -> Result<Vec<Vertex>, WitnessError> {
    let g = instance.graph();
    let (s, t) = (instance.s(), instance.t());
    match instance.kind() {
        ProblemKind::Path => {
            verify_path(g, walk, true, false).map_err(WitnessError::NotAPath)?;
            let mut p = walk.to_vec();
            if p[0] == t {
                p.reverse();
            }
            if p[0] != s || p[p.len() - 1] != t {
                return Err(WitnessError::WrongEnds);
            }
            Ok(p)
        }
        ProblemKind::Cycle => {
            verify_cycle(g, walk, false).map_err(WitnessError::NotAPath)?;
            let apex = instance.apex().expect("cycle instance has an apex");
            let at = walk.iter().position(|&v| v == apex).expect("Hamiltonian");
            // Rotate so the apex is last, then orient from s.
            let mut p: Vec<Vertex> = walk[at + 1..].iter().chain(&walk[..at]).copied().collect();
            if p[0] == t {
                p.reverse();
            }
            if p[0] != s || p[p.len() - 1] != t {
                return Err(WitnessError::WrongEnds);
            }
            Ok(p)
        }
    }
}

/// How a path sweeps the columns of one variable gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraversalOrder {
    True,
    False,
    /// First column (1-based) where neither order holds.
    Irregular {
        column: usize,
    },
}

fn positions(n: usize, path: &[Vertex]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in path.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

fn is_subpath(pos: &[usize], seq: [Vertex; 3]) -> bool {
    let p: Vec<usize> = seq.iter().map(|&v| pos[v]).collect();
    p.iter().all(|&x| x != usize::MAX) && p[1] == p[0] + 1 && p[2] == p[1] + 1
}

fn adjacent_in_path(pos: &[usize], u: Vertex, v: Vertex) -> bool {
    pos[u] != usize::MAX && pos[v] != usize::MAX && pos[u].abs_diff(pos[v]) == 1
}

fn sweeps(pos: &[usize], c: &CycleVertices, side: bool) -> bool {
    is_subpath(pos, [c.input(side), c.dot_in, c.input(!side)])
        && is_subpath(pos, [c.output(!side), c.dot_out, c.output(side)])
}

/// Traversal order of columns `1..=upto` of variable `var` along a path
/// that starts at `s`.
pub fn traversal_order(
    instance: &Instance,
    path: &[Vertex],
    var: usize,
    upto: usize,
) -> TraversalOrder {
    let pos = positions(instance.graph().vertex_count(), path);
    let consistent = |side: bool| {
        (1..=upto).find(|&j| {
            let c = instance.column(var, j);
            let linked = j == upto || {
                let next = instance.column(var, j + 1);
                adjacent_in_path(&pos, c.output(side), next.input(side))
            };
            !(sweeps(&pos, &c, side) && linked)
        })
    };
    match (consistent(true), consistent(false)) {
        (None, _) => TraversalOrder::True,
        (_, None) => TraversalOrder::False,
        (Some(a), Some(b)) => TraversalOrder::Irregular { column: a.max(b) },
    }
}

/// Reads the assignment encoded by a Hamiltonian path (or cycle): true-order
/// sets a variable to 1, false-order to 0.
pub fn assignment_from_path(
    instance: &Instance,
    walk: &[Vertex],
) -> Result<Assignment, WitnessError> {
    let path = oriented_path(instance, walk)?;
    let mut assignment = Assignment::new();
    for i in 1..=instance.n() {
        match traversal_order(instance, &path, i, instance.m()) {
            TraversalOrder::True => assignment.set(i as u32, true),
            TraversalOrder::False => assignment.set(i as u32, false),
            TraversalOrder::Irregular { column } => {
                return Err(WitnessError::IrregularTraversal { var: i, column });
            }
        }
    }
    Ok(assignment)
}

/// Why a path fails the `(a, b)` discipline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RespectError {
    #[error(transparent)]
    NotAPath(#[from] WitnessError),
    #[error("condition {condition} fails: {detail}")]
    Violated { condition: u8, detail: String },
}

impl RespectError {
    pub fn condition(&self) -> Option<u8> {
        match self {
            RespectError::Violated { condition, .. } => Some(*condition),
            RespectError::NotAPath(_) => None,
        }
    }
}

/// Checks the five conditions of `(a, b)`-respectability (1-based `a`, `b`):
/// column precedence for variables before `a` and for the first `b`
/// columns of `a`, gadget precedence up to `a`, and true- or false-order
/// traversal of the same columns. Precedence is along the path from `s`.
pub fn check_respectable(
    instance: &Instance,
    walk: &[Vertex],
    a: usize,
    b: usize,
) -> Result<(), RespectError> {
    let path = oriented_path(instance, walk)?;
    let pos = positions(instance.graph().vertex_count(), &path);
    let cols = |i: usize, j: usize| instance.column(i, j).in_cycle_order();
    let precedes = |x: &[Vertex], y: &[Vertex]| {
        let last = x.iter().map(|&v| pos[v]).max().unwrap_or(0);
        y.iter().all(|&v| pos[v] > last) || x.is_empty()
    };
    let violated = |condition, detail: String| Err(RespectError::Violated { condition, detail });
    let m = instance.m();

    for i in 1..a {
        for j in 1..m {
            if !precedes(&cols(i, j), &cols(i, j + 1)) {
                return violated(1, format!("D_{i}^{j} does not precede D_{i}^{}", j + 1));
            }
        }
    }
    for j in 1..b {
        if !precedes(&cols(a, j), &cols(a, j + 1)) {
            return violated(2, format!("D_{a}^{j} does not precede D_{a}^{}", j + 1));
        }
    }
    let gadget = |i: usize| instance.variable(i).vertices().collect::<Vec<_>>();
    for i in 1..a {
        if !precedes(&gadget(i), &gadget(i + 1)) {
            return violated(
                3,
                format!("variable gadget {i} does not precede gadget {}", i + 1),
            );
        }
    }
    for i in 1..a {
        if let TraversalOrder::Irregular { column } = traversal_order(instance, &path, i, m) {
            return violated(4, format!("variable {i} irregular at column {column}"));
        }
    }
    if let TraversalOrder::Irregular { column } = traversal_order(instance, &path, a, b) {
        return violated(5, format!("variable {a} irregular at column {column}"));
    }
    Ok(())
}

/// True if every triple `(0in, dot-in, 1in)` and `(0out, dot-out, 1out)`
/// occupies consecutive positions of the walk.
pub fn consecutive_dt_check(instance: &Instance, walk: &[Vertex]) -> bool {
    let pos = positions(instance.graph().vertex_count(), walk);
    (1..=instance.n()).all(|i| {
        (1..=instance.m()).all(|j| {
            let c = instance.column(i, j);
            let run = |x: Vertex, mid: Vertex, y: Vertex| {
                is_subpath(&pos, [x, mid, y]) || is_subpath(&pos, [y, mid, x])
            };
            run(c.zero_in, c.dot_in, c.one_in) && run(c.zero_out, c.dot_out, c.one_out)
        })
    })
}

/// Witness file form: `path v1 v2 ... vN`.
pub fn path_to_text(path: &[Vertex]) -> String {
    let mut out = String::from("path");
    for v in path {
        let _ = write!(out, " {v}");
    }
    out.push('\n');
    out
}

pub fn parse_path_text(text: &str) -> Result<Vec<Vertex>, WitnessError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('c'));
    let (idx, line) = lines.next().ok_or(WitnessError::Format {
        line: 1,
        message: "missing path line".into(),
    })?;
    let err = |message: &str| WitnessError::Format {
        line: idx + 1,
        message: message.into(),
    };
    let mut parts = line.split_whitespace();
    if parts.next() != Some("path") {
        return Err(err("expected `path v1 ... vN`"));
    }
    let path = parts
        .map(|t| t.parse())
        .collect::<Result<Vec<Vertex>, _>>()
        .map_err(|_| err("bad vertex id"))?;
    if let Some((extra, _)) = lines.next() {
        return Err(WitnessError::Format {
            line: extra + 1,
            message: "unexpected line".into(),
        });
    }
    Ok(path)
}

/// Assignment file form: `assign var=0|1 ...` sorted by variable.
pub fn assignment_to_text(assignment: &Assignment) -> String {
    let mut out = String::from("assign");
    for (var, value) in assignment.iter() {
        let _ = write!(out, " {var}={}", u8::from(value));
    }
    out.push('\n');
    out
}

pub fn parse_assignment_text(text: &str) -> Result<Assignment, WitnessError> {
    let (idx, line) = text
        .lines()
        .enumerate()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(WitnessError::Format {
            line: 1,
            message: "missing assign line".into(),
        })?;
    let err = |message: String| WitnessError::Format {
        line: idx + 1,
        message,
    };
    let mut parts = line.split_whitespace();
    if parts.next() != Some("assign") {
        return Err(err("expected `assign var=0|1 ...`".into()));
    }
    let mut assignment = Assignment::new();
    for tok in parts {
        let parsed = tok.split_once('=').and_then(|(v, b)| {
            let v: u32 = v.parse().ok().filter(|&v| v > 0)?;
            let b = match b {
                "0" => false,
                "1" => true,
                _ => return None,
            };
            Some((v, b))
        });
        let (var, value) = parsed.ok_or_else(|| err(format!("bad entry `{tok}`")))?;
        if assignment.get(var).is_some() {
            return Err(err(format!("variable {var} assigned twice")));
        }
        assignment.set(var, value);
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Formula, NormalizedFormula};
    use crate::reduction::{reduce, to_cycle_instance};

    fn instance(n: usize, clauses: &[&[i64]]) -> Instance {
        let f = Formula::from_ints(n, clauses).unwrap();
        reduce(&NormalizedFormula::from_reducible(f).unwrap()).unwrap()
    }

    fn sample_instance() -> Instance {
        instance(4, &[&[1, -2, 3], &[1, 3], &[-1, -3, -4]])
    }

    fn sample_assignment() -> Assignment {
        [(1, false), (2, false), (3, true), (4, true)]
            .into_iter()
            .collect()
    }

    #[test]
    fn builds_valid_path() {
        let inst = sample_instance();
        let a = sample_assignment();
        let p = path_from_assignment(&inst, &a).unwrap();
        assert_eq!(verify_path(inst.graph(), &p, true, true), Ok(()));
        assert_eq!(p[0], inst.s());
        assert_eq!(p[1], inst.start(1));
        assert_eq!(assignment_from_path(&inst, &p).unwrap(), a);
        assert!(consecutive_dt_check(&inst, &p));
        assert_eq!(check_respectable(&inst, &p, inst.n(), inst.m()), Ok(()));
        let mut reversed = p.clone();
        reversed.reverse();
        assert_eq!(assignment_from_path(&inst, &reversed).unwrap(), a);
    }

    #[test]
    fn cycle_witness() {
        let inst = to_cycle_instance(&sample_instance()).unwrap();
        let a = sample_assignment();
        let c = path_from_assignment(&inst, &a).unwrap();
        assert_eq!(verify_cycle(inst.graph(), &c, true), Ok(()));
        let mut rotated = c.clone();
        rotated.rotate_left(17);
        assert_eq!(assignment_from_path(&inst, &rotated).unwrap(), a);
    }

    #[test]
    fn rejects_unsatisfying() {
        let inst = sample_instance();
        let bad: Assignment = [(1, false), (2, true), (3, false), (4, true)]
            .into_iter()
            .collect();
        assert_eq!(
            path_from_assignment(&inst, &bad),
            Err(WitnessError::NotSatisfying)
        );
        let partial: Assignment = [(1, true)].into_iter().collect();
        assert_eq!(
            path_from_assignment(&inst, &partial),
            Err(WitnessError::IncompleteAssignment(2))
        );
    }

    #[test]
    fn path_violations() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(verify_path(&g, &[0, 1, 2, 3], true, false), Ok(()));
        assert_eq!(
            verify_path(&g, &[0, 1, 0], false, false),
            Err(PathViolation::Repeated {
                index: 2,
                vertex: 0
            })
        );
        assert_eq!(
            verify_path(&g, &[0, 2], false, false),
            Err(PathViolation::NotAdjacent {
                index: 1,
                u: 0,
                v: 2
            })
        );
        assert_eq!(
            verify_path(&g, &[0, 1, 2], true, false),
            Err(PathViolation::Missing { vertex: 3 })
        );
        let mut d = g.clone();
        d.add_edge_of_kind(0, 3, crate::graph::EdgeKind::Dummy)
            .unwrap();
        assert_eq!(
            verify_path(&d, &[3, 0, 1, 2], true, true),
            Err(PathViolation::DummyEdge {
                index: 1,
                u: 3,
                v: 0
            })
        );
    }

    #[test]
    fn column_swap_breaks_respectability() {
        let inst = instance(2, &[&[1, 2], &[-1, -2]]);
        let a: Assignment = [(1, true), (2, false)].into_iter().collect();
        let p = path_from_assignment(&inst, &a).unwrap();
        // Swap the visits to D_1^1 and D_1^2 (vertex blocks, not a real path).
        let c1 = inst.column(1, 1).in_cycle_order();
        let c2 = inst.column(1, 2).in_cycle_order();
        let swapped: Vec<Vertex> = p
            .iter()
            .map(|v| {
                match (
                    c1.iter().position(|x| x == v),
                    c2.iter().position(|x| x == v),
                ) {
                    (Some(k), _) => c2[k],
                    (_, Some(k)) => c1[k],
                    _ => *v,
                }
            })
            .collect();
        assert!(check_respectable(&inst, &swapped, 2, 2).is_err());
        let mut split = p.clone();
        let k = split
            .iter()
            .position(|&v| v == inst.column(1, 1).dot_in)
            .unwrap();
        split.swap(k, k + 1);
        assert!(!consecutive_dt_check(&inst, &split));
    }

    #[test]
    fn file_formats() {
        let p = vec![3, 1, 2];
        assert_eq!(path_to_text(&p), "path 3 1 2\n");
        assert_eq!(parse_path_text("path 3 1 2\n").unwrap(), p);
        assert!(parse_path_text("walk 1 2").is_err());
        let a: Assignment = [(2, true), (1, false)].into_iter().collect();
        assert_eq!(assignment_to_text(&a), "assign 1=0 2=1\n");
        assert_eq!(parse_assignment_text("assign 1=0 2=1").unwrap(), a);
        assert!(parse_assignment_text("assign 1=2").is_err());
        assert!(parse_assignment_text("assign 1=0 1=1").is_err());
    }
}
