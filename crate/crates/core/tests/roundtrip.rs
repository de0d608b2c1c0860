//! Print/parse round-trip property: printing any well-formed theory and
//! parsing the result gives back a structurally equal theory, and printing
//! again reproduces the same text.

mod common;

use cohlog::syntax::{parse_theory, print_theory, Axiom, SchemaAxiom, Sequent, Theory};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_theory(seed: u64) -> Theory {
    let mut rng = StdRng::seed_from_u64(seed);
    let sig = common::oracle_signature();
    let mut thy = Theory { signature: sig.clone(), axioms: Vec::new() };
    for _ in 0..rng.gen_range(1..=5) {
        let axiom = match rng.gen_range(0..8) {
            0 => Axiom::Schema(SchemaAxiom::DistinctConstants {
                sort: "A".into(),
                constants: vec!["ca".into()],
            }),
            1 => Axiom::Schema(SchemaAxiom::CoverByConstants {
                sort: "B".into(),
                constants: vec!["cb".into()],
            }),
            2 => Axiom::Schema(SchemaAxiom::OpGraph {
                op: "u".into(),
                rows: vec![(vec!["ca".into()], "ca".into())],
            }),
            _ => {
                let ctx: Vec<String> = (0..rng.gen_range(0..=3))
                    .map(|_| sig.sorts[rng.gen_range(0..sig.sorts.len())].clone())
                    .collect();
                let side = |rng: &mut StdRng| {
                    (0..rng.gen_range(1..=2))
                        .map(|_| common::random_formula(rng, &sig, &ctx, 4))
                        .collect::<Vec<_>>()
                };
                let lhs = side(&mut rng);
                let rhs = side(&mut rng);
                Axiom::Sequent(Sequent { context: ctx, lhs, rhs })
            }
        };
        thy.axioms.push(axiom);
    }
    thy
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let thy = random_theory(seed);
        let printed = print_theory(&thy);
        let back = parse_theory(&printed)
            .unwrap_or_else(|e| panic!("reparse failed: {e}\n{printed}"));
        prop_assert_eq!(&thy, &back);
        prop_assert_eq!(print_theory(&back), printed);
    }
}
