//! Canonical forms of small graphs (at most 32 vertices) and exhaustive
//! generation of graphs up to isomorphism.
//!
//! The canonical form is found by colour refinement followed by
//! individualisation, with pruning by the automorphisms discovered at
//! equal leaves.

use std::collections::HashSet;

use crate::graph::{Graph, Vertex};

pub const MAX_CANON_VERTICES: usize = 32;

/// Adjacency rows under the canonical labelling, plus the vertex colours in
/// canonical order. Two coloured graphs are isomorphic iff their forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    colors: Vec<u32>,
    rows: Vec<u32>,
}

impl CanonicalForm {
    pub fn vertex_count(&self) -> usize {
        self.rows.len()
    }

    /// Rebuilds the canonically labelled graph.
    pub fn to_graph(&self) -> Graph {
        let n = self.rows.len();
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if self.rows[u] >> v & 1 == 1 {
                    g.add_edge(u, v).expect("in range");
                }
            }
        }
        g
    }
}

fn rows_of(graph: &Graph) -> Vec<u32> {
    assert!(
        graph.vertex_count() <= MAX_CANON_VERTICES,
        "canonical forms support at most {MAX_CANON_VERTICES} vertices"
    );
    (0..graph.vertex_count())
        .map(|v| graph.neighbors(v).iter().fold(0u32, |acc, &w| acc | 1 << w))
        .collect()
}

pub fn canonical_form(graph: &Graph) -> CanonicalForm {
    canonical_form_colored(graph, &vec![0; graph.vertex_count()])
}

/// Canonical form where isomorphisms must preserve `colors`.
pub fn canonical_form_colored(graph: &Graph, colors: &[u32]) -> CanonicalForm {
    canonical_labeling(graph, colors).0
}

/// Canonical form together with the labelling: `labeling[v]` is the
/// canonical position of vertex `v`.
pub fn canonical_labeling(graph: &Graph, colors: &[u32]) -> (CanonicalForm, Vec<usize>) {
    let rows = rows_of(graph);
    let n = rows.len();
    assert_eq!(colors.len(), n, "one colour per vertex");
    let mut palette: Vec<u32> = colors.to_vec();
    palette.sort_unstable();
    palette.dedup();
    let cells: Vec<Vec<Vertex>> = palette
        .iter()
        .map(|&c| (0..n).filter(|&v| colors[v] == c).collect())
        .collect();
    let mut search = Search {
        rows: &rows,
        best: None,
        automorphisms: Vec::new(),
    };
    search.descend(refine(&rows, cells), &mut Vec::new());
    let (best_rows, labeling) = search.best.unwrap_or_default();
    let mut canon_colors = vec![0; n];
    for v in 0..n {
        canon_colors[labeling[v]] = colors[v];
    }
    (
        CanonicalForm {
            colors: canon_colors,
            rows: best_rows,
        },
        labeling,
    )
}

/// Splits cells by neighbour counts until the partition is equitable.
fn refine(rows: &[u32], mut cells: Vec<Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    let mut changed = true;
    while changed {
        changed = false;
        let mut k = 0;
        while k < cells.len() {
            let mut split_at = None;
            for splitter in 0..cells.len() {
                let mask = cells[splitter].iter().fold(0u32, |acc, &v| acc | 1 << v);
                let count = |v: Vertex| (rows[v] & mask).count_ones();
                let first = count(cells[k][0]);
                if cells[k].iter().any(|&v| count(v) != first) {
                    split_at = Some(mask);
                    break;
                }
            }
            if let Some(mask) = split_at {
                let mut cell = std::mem::take(&mut cells[k]);
                cell.sort_by_key(|&v| ((rows[v] & mask).count_ones(), v));
                let mut parts: Vec<Vec<Vertex>> = Vec::new();
                let mut last = None;
                for v in cell {
                    let c = (rows[v] & mask).count_ones();
                    if last != Some(c) {
                        parts.push(Vec::new());
                        last = Some(c);
                    }
                    parts.last_mut().expect("pushed").push(v);
                }
                cells.splice(k..=k, parts);
                changed = true;
            } else {
                k += 1;
            }
        }
    }
    cells
}

struct Search<'a> {
    rows: &'a [u32],
    best: Option<(Vec<u32>, Vec<usize>)>,
    automorphisms: Vec<Vec<Vertex>>,
}

enum Leaf {
    Continue,
    /// An automorphism was found; unwind to the node at this depth.
    Unwind(usize),
}

impl Search<'_> {
    fn permuted(&self, labeling: &[usize]) -> Vec<u32> {
        let n = self.rows.len();
        let mut out = vec![0u32; n];
        for u in 0..n {
            let mut row = 0u32;
            let mut bits = self.rows[u];
            while bits != 0 {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                row |= 1 << labeling[w];
            }
            out[labeling[u]] = row;
        }
        out
    }

    fn descend(&mut self, cells: Vec<Vec<Vertex>>, prefix: &mut Vec<Vertex>) -> Leaf {
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            return self.leaf(&cells, prefix);
        };
        let depth = prefix.len();
        let candidates = cells[target].clone();
        let mut explored: Vec<Vertex> = Vec::new();
        for &v in &candidates {
            if self.same_orbit(prefix, &explored, v) {
                continue;
            }
            explored.push(v);
            let mut next = cells.clone();
            let rest: Vec<Vertex> = next[target].iter().copied().filter(|&w| w != v).collect();
            next.splice(target..=target, [vec![v], rest]);
            prefix.push(v);
            let outcome = self.descend(refine(self.rows, next), prefix);
            prefix.pop();
            if let Leaf::Unwind(level) = outcome {
                if level < depth {
                    return outcome;
                }
            }
        }
        Leaf::Continue
    }

    fn leaf(&mut self, cells: &[Vec<Vertex>], prefix: &[Vertex]) -> Leaf {
        let n = self.rows.len();
        let mut labeling = vec![0; n];
        for (pos, cell) in cells.iter().enumerate() {
            labeling[cell[0]] = pos;
        }
        let rows = self.permuted(&labeling);
        match &self.best {
            None => {
                self.best = Some((rows, labeling));
                Leaf::Continue
            }
            Some((best, best_labeling)) if *best == rows => {
                // gamma = best^-1 o current
                let mut inverse = vec![0; n];
                for v in 0..n {
                    inverse[best_labeling[v]] = v;
                }
                let gamma: Vec<Vertex> = (0..n).map(|v| inverse[labeling[v]]).collect();
                let common = prefix.iter().take_while(|&&v| gamma[v] == v).count();
                self.automorphisms.push(gamma);
                Leaf::Unwind(common)
            }
            Some((best, _)) => {
                if rows < *best {
                    self.best = Some((rows, labeling));
                }
                Leaf::Continue
            }
        }
    }

    /// True if `v` lies in the orbit of an explored vertex under the found
    /// automorphisms that fix `prefix` pointwise.
    fn same_orbit(&self, prefix: &[Vertex], explored: &[Vertex], v: Vertex) -> bool {
        if explored.is_empty() {
            return false;
        }
        let n = self.rows.len();
        let mut parent: Vec<Vertex> = (0..n).collect();
        fn root(parent: &mut [Vertex], mut x: Vertex) -> Vertex {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for gamma in &self.automorphisms {
            if prefix.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            for x in 0..n {
                let (a, b) = (root(&mut parent, x), root(&mut parent, gamma[x]));
                parent[a] = b;
            }
        }
        let rv = root(&mut parent, v);
        explored.iter().any(|&e| root(&mut parent, e) == rv)
    }
}

/// Calls `visit` once for every graph on `n` vertices up to isomorphism.
/// Graphs are produced by adding a vertex to each graph on `n - 1` vertices
/// and keeping one representative per canonical form.
pub fn for_each_graph(n: usize, mut visit: impl FnMut(&Graph)) {
    for g in graphs_up_to_iso(n) {
        visit(&g.to_graph());
    }
}

/// All graphs on `n` vertices up to isomorphism, as canonical forms.
pub fn graphs_up_to_iso(n: usize) -> Vec<CanonicalForm> {
    assert!(n <= MAX_CANON_VERTICES);
    let mut level = vec![canonical_form(&Graph::new(0))];
    for size in 1..=n {
        let mut seen: HashSet<CanonicalForm> = HashSet::new();
        let mut next = Vec::new();
        for parent in &level {
            let base = parent.to_graph();
            for mask in 0u32..(1u32 << (size - 1)) {
                let mut g = base.clone();
                let v = g.add_vertex();
                for w in 0..size - 1 {
                    if mask >> w & 1 == 1 {
                        g.add_edge(v, w).expect("in range");
                    }
                }
                let form = canonical_form(&g);
                if seen.insert(form.clone()) {
                    next.push(form);
                }
            }
        }
        next.sort();
        level = next;
    }
    level
}
