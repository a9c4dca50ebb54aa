use mimham_core::formula::{
    normalize, Assignment, Formula, NormalizationStatus, NormalizedFormula,
};
use mimham_core::ham::{find_ham_path, SearchOptions};
use mimham_core::reduction::{dummy_edge_count, reduce, to_cycle_instance, Instance, VertexLabel};
use mimham_core::witness::{assignment_from_path, path_from_assignment, verify_cycle, verify_path};
use proptest::prelude::*;

fn arb_reducible() -> impl Strategy<Value = NormalizedFormula> {
    (2usize..=6, 1usize..=6)
        .prop_flat_map(|(n, m)| {
            let clause =
                proptest::sample::subsequence((1..=n as i64).collect::<Vec<_>>(), 2..=3.min(n))
                    .prop_flat_map(|vars| {
                        let k = vars.len();
                        (Just(vars), proptest::collection::vec(any::<bool>(), k))
                    })
                    .prop_map(|(vars, neg)| {
                        vars.iter()
                            .zip(neg)
                            .map(|(&v, s)| if s { -v } else { v })
                            .collect::<Vec<i64>>()
                    });
            (Just(n), proptest::collection::vec(clause, m))
        })
        .prop_filter_map("decided by normalization", |(n, clauses)| {
            let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
            let nf = normalize(&Formula::from_ints(n, &refs).unwrap());
            (nf.status() == NormalizationStatus::Reducible).then_some(nf)
        })
}

fn truth_table(f: &Formula) -> Option<Assignment> {
    let n = f.num_vars();
    (0u64..1 << n)
        .map(|mask| Assignment::from_mask(n, mask))
        .find(|a| {
            f.clauses()
                .iter()
                .all(|c| c.iter().any(|&l| a.get(l.var()) == Some(!l.is_negated())))
        })
}

fn expected_vertices(inst: &Instance) -> usize {
    let (n, m) = (inst.n(), inst.m());
    let gadgets: usize = inst
        .formula()
        .formula()
        .clauses()
        .iter()
        .map(|c| if c.len() == 2 { 8 } else { 24 })
        .sum();
    2 + (n - 1) + n * (6 * m + 2) + gadgets
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn structure_counts(nf in arb_reducible()) {
        let inst = reduce(&nf).unwrap();
        let (n, m) = (inst.n(), inst.m());
        let g = inst.graph();
        prop_assert_eq!(g.vertex_count(), expected_vertices(&inst));
        prop_assert_eq!(g.dummy_edges().len(), 2 * n * (n - 1) * (m - 1) + (n - 1) * (n.saturating_sub(2)) / 2);
        prop_assert_eq!(dummy_edge_count(n, m), g.dummy_edges().len());
        let mut order = inst.order().vertices().to_vec();
        order.sort_unstable();
        prop_assert_eq!(order, (0..g.vertex_count()).collect::<Vec<_>>());
        prop_assert_eq!(inst.wiring().len(), nf.formula().clauses().iter().map(Vec::len).sum::<usize>());
        for v in 0..g.vertex_count() {
            prop_assert_eq!(inst.vertex(inst.label(v)), Some(v));
        }
    }

    #[test]
    fn cycle_variant_adds_degree_two_apex(nf in arb_reducible()) {
        let inst = reduce(&nf).unwrap();
        let cyc = to_cycle_instance(&inst).unwrap();
        let apex = cyc.apex().unwrap();
        prop_assert_eq!(cyc.label(apex), VertexLabel::Apex);
        let mut nb = cyc.graph().neighbors(apex).to_vec();
        nb.sort_unstable();
        let mut st = vec![inst.s(), inst.t()];
        st.sort_unstable();
        prop_assert_eq!(nb, st);
        prop_assert_eq!(cyc.graph().vertex_count(), inst.graph().vertex_count() + 1);
        prop_assert_eq!(*cyc.order().vertices().last().unwrap(), apex);
    }

    #[test]
    fn text_round_trip(nf in arb_reducible(), cycle in any::<bool>()) {
        let mut inst = reduce(&nf).unwrap();
        if cycle {
            inst = to_cycle_instance(&inst).unwrap();
        }
        inst.set_source("sha256:00");
        let text = inst.to_text();
        let back = Instance::from_text(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn witnesses_round_trip(nf in arb_reducible()) {
        let inst = reduce(&nf).unwrap();
        let cyc = to_cycle_instance(&inst).unwrap();
        match truth_table(nf.formula()) {
            Some(a) => {
                let p = path_from_assignment(&inst, &a).unwrap();
                prop_assert_eq!(verify_path(inst.graph(), &p, true, true), Ok(()));
                prop_assert_eq!(assignment_from_path(&inst, &p).unwrap(), a.clone());
                let c = path_from_assignment(&cyc, &a).unwrap();
                prop_assert_eq!(verify_cycle(cyc.graph(), &c, true), Ok(()));
                prop_assert_eq!(assignment_from_path(&cyc, &c).unwrap(), a);
            }
            None => {
                prop_assert!(!find_ham_path(inst.graph(), &SearchOptions::default()).is_found());
            }
        }
    }
}

#[test]
fn corrupted_instance_files_are_rejected() {
    let f = Formula::from_ints(3, &[&[1, 2, -3], &[-1, 3]]).unwrap();
    let inst = reduce(&NormalizedFormula::from_reducible(f).unwrap()).unwrap();
    let text = inst.to_text();
    let edge_line = text.lines().find(|l| l.starts_with("e ")).unwrap();
    let without_edge = text.replacen(&format!("{edge_line}\n"), "", 1);
    assert!(Instance::from_text(&without_edge).is_err());
    let wrong_kind = text.replace("kind path", "kind cycle");
    assert!(Instance::from_text(&wrong_kind).is_err());
}
