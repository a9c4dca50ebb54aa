use mimham_core::formula::{normalize, parse_dimacs, sat_oracle, Formula, NormalizationStatus};
use proptest::prelude::*;

fn truth_table(n: usize, clauses: &[Vec<i64>]) -> bool {
    (0u32..1 << n).any(|mask| {
        clauses.iter().all(|c| {
            c.iter()
                .any(|&l| (mask >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0))
        })
    })
}

fn arb_clauses(
    max_vars: usize,
    max_clauses: usize,
) -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1..=max_vars).prop_flat_map(move |n| {
        let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, neg)| if neg { -v } else { v });
        (
            Just(n),
            proptest::collection::vec(proptest::collection::vec(lit, 1..=3), 0..=max_clauses),
        )
    })
}

fn formula(n: usize, clauses: &[Vec<i64>]) -> Formula {
    let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
    Formula::from_ints(n, &refs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dimacs_round_trip((n, clauses) in arb_clauses(8, 10)) {
        let f = formula(n, &clauses);
        let printed = f.to_dimacs();
        let back = parse_dimacs(printed.as_bytes()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(back.to_dimacs(), printed);
    }

    #[test]
    fn normalize_preserves_satisfiability((n, clauses) in arb_clauses(12, 14)) {
        let f = formula(n, &clauses);
        let expected = truth_table(n, &clauses);
        let nf = normalize(&f);
        let got = match nf.status() {
            NormalizationStatus::DecidedSat => true,
            NormalizationStatus::DecidedUnsat => false,
            NormalizationStatus::Reducible => {
                let g = nf.formula();
                for clause in g.clauses() {
                    prop_assert!((2..=3).contains(&clause.len()));
                    let mut vars: Vec<u32> = clause.iter().map(|l| l.var()).collect();
                    vars.dedup();
                    vars.sort_unstable();
                    vars.dedup();
                    prop_assert_eq!(vars.len(), clause.len());
                }
                let a = sat_oracle(g).unwrap();
                if let Some(a) = &a {
                    // The lifted assignment satisfies the original formula.
                    let lifted = nf.lift(a);
                    let value = |l: i64| lifted.get(l.unsigned_abs() as u32).unwrap_or(false) == (l > 0);
                    prop_assert!(clauses.iter().all(|c| c.iter().any(|&l| value(l))));
                }
                a.is_some()
            }
        };
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn oracle_matches_truth_table((n, clauses) in arb_clauses(10, 12)) {
        let f = formula(n, &clauses);
        prop_assert_eq!(sat_oracle(&f).unwrap().is_some(), truth_table(n, &clauses));
    }
}
