use mimham_core::canon::{canonical_form, canonical_form_colored, graphs_up_to_iso};
use mimham_core::graph::Graph;
use proptest::prelude::*;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..n {
        out = out
            .iter()
            .flat_map(|p: &Vec<usize>| {
                (0..=p.len()).map(move |slot| {
                    let mut q = p.clone();
                    q.insert(slot, k);
                    q
                })
            })
            .collect();
    }
    out
}

/// Lexicographically least sorted edge list over all relabellings.
fn brute_canon(g: &Graph, colors: &[u32]) -> (Vec<u32>, Vec<(usize, usize)>) {
    let n = g.vertex_count();
    permutations(n)
        .into_iter()
        .map(|p| {
            let mut c = vec![0; n];
            for v in 0..n {
                c[p[v]] = colors[v];
            }
            let mut e: Vec<(usize, usize)> = g
                .edges()
                .map(|(u, v, _)| (p[u].min(p[v]), p[u].max(p[v])))
                .collect();
            e.sort_unstable();
            (c, e)
        })
        .min()
        .unwrap()
}

fn graph_on(n: usize) -> impl Strategy<Value = Graph> {
    (Just(n), 0.1f64..0.9).prop_flat_map(|(n, p)| {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        proptest::collection::vec(proptest::bool::weighted(p), pairs.len()).prop_map(move |mask| {
            let edges = pairs
                .iter()
                .zip(&mask)
                .filter(|(_, &on)| on)
                .map(|(&e, _)| e);
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    Graph::from_edges(
        g.vertex_count(),
        g.edges().map(|(u, v, _)| (perm[u], perm[v])),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn form_equality_is_isomorphism(
        (a, b, perm) in (1usize..=6).prop_flat_map(|n| {
            (graph_on(n), graph_on(n), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        }),
        copy in any::<bool>(),
        colored in any::<bool>(),
    ) {
        let n = a.vertex_count();
        let b = if copy { relabel(&a, &perm) } else { b };
        let colors: Vec<u32> = (0..n).map(|v| if colored { (v % 2) as u32 } else { 0 }).collect();
        let same = brute_canon(&a, &colors) == brute_canon(&b, &colors);
        prop_assert_eq!(canonical_form_colored(&a, &colors) == canonical_form_colored(&b, &colors), same);
    }

    #[test]
    fn relabelling_keeps_form(g in (1usize..=12).prop_flat_map(graph_on), perm in Just((0..12).collect::<Vec<usize>>()).prop_shuffle()) {
        let n = g.vertex_count();
        let perm: Vec<usize> = perm.into_iter().filter(|&v| v < n).collect();
        prop_assert_eq!(canonical_form(&g), canonical_form(&relabel(&g, &perm)));
    }
}

#[test]
fn generated_classes_match_brute_force_dedup() {
    for n in 0..=5 {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        let mut classes = std::collections::BTreeSet::new();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e);
            classes.insert(brute_canon(
                &Graph::from_edges(n, edges).unwrap(),
                &vec![0; n],
            ));
        }
        assert_eq!(graphs_up_to_iso(n).len(), classes.len(), "n = {n}");
    }
}
