//! End-to-end network pipeline tests: a frozen 4-bit regression table,
//! identity-network behavior, custom table activations, cross-layer ties,
//! and the enumeration guard.

mod common;

use cohlog::minifloat::{build_tables, oracle_eval, Decoded, FloatFormat, FloatTables};
use cohlog::nn::{
    apply_constraints, build_model, build_network, build_network_with_acts, infer, Architecture,
    NnError, ParamAssignment, TieConstraint,
};
use cohlog::semantics::check_model;
use num_traits::One;

fn tables(fmt: &str) -> FloatTables {
    build_tables(FloatFormat::parse(fmt).unwrap()).unwrap()
}

/// relu(3.0 * x - 2.0) at s1e2m1, computed once and frozen; guards against
/// regressions in rounding, specials, and the categorical pipeline alike.
const FROZEN_RELU_TABLE: [usize; 16] =
    [0x0, 0x0, 0x2, 0x6, 0x6, 0x6, 0x6, 0x7, 0x0, 0x0, 0x0, 0x0, 0x0, 0x0, 0x0, 0x7];

#[test]
fn frozen_regression_table() {
    let tables = tables("s1e2m1");
    let arch = Architecture::parse("1-relu-1", tables.format).unwrap();
    let nn = build_network(&arch, &tables).unwrap();
    let params = ParamAssignment { weights: vec![vec![vec![0x5]]], biases: vec![vec![0xc]] };
    let m = build_model(&nn, &tables, &params).unwrap();
    let ds = infer(&nn, &tables, &m).unwrap();
    for (x, &want) in FROZEN_RELU_TABLE.iter().enumerate() {
        assert_eq!(ds.output_tuple(x), vec![want], "input {x:#x}");
    }
}

#[test]
fn identity_network_fixes_everything_but_negative_zero() {
    let tables = tables("s1e2m1");
    let fmt = tables.format;
    let one = (0..fmt.size())
        .find(|&p| matches!(fmt.decode(p), Decoded::Finite { value, .. } if value.is_one()))
        .unwrap();
    let neg_zero = 1 << (fmt.exp_bits + fmt.man_bits);
    let arch = Architecture::parse("1-id-1", fmt).unwrap();
    let nn = build_network(&arch, &tables).unwrap();
    let params = ParamAssignment { weights: vec![vec![vec![one]]], biases: vec![vec![0]] };
    let m = build_model(&nn, &tables, &params).unwrap();
    let ds = infer(&nn, &tables, &m).unwrap();
    for x in 0..fmt.size() {
        // the layer always adds the +0 bias, so -0 lands on +0; NaN inputs
        // canonicalize through the arithmetic
        let want = if x == neg_zero {
            0
        } else if matches!(fmt.decode(x), Decoded::Nan) {
            tables.canonical_nan().unwrap()
        } else {
            x
        };
        assert_eq!(ds.output_tuple(x), vec![want], "input {x:#x}");
    }
}

#[test]
fn custom_table_activation_flows_through() {
    let tables = tables("s1e1m1");
    let r = tables.format.size();
    let arch = Architecture::parse("1-table:square-1", tables.format).unwrap();
    // x -> mul(x, x), a nontrivial total table
    let pairs: Vec<(usize, usize)> = (0..r).map(|p| (p, tables.mul(p, p))).collect();
    let act = tables.activation_from_pairs(&pairs).unwrap();
    let nn = build_network_with_acts(&arch, &tables, &[act.clone()]).unwrap();
    let params = ParamAssignment { weights: vec![vec![vec![2]]], biases: vec![vec![1]] };
    let m = build_model(&nn, &tables, &params).unwrap();
    assert!(check_model(&m, &nn.theory).unwrap().is_valid());
    let ds = infer(&nn, &tables, &m).unwrap();
    for x in 0..r {
        let want = oracle_eval(
            &tables,
            &arch.widths,
            &[act.clone()],
            &params.weights,
            &params.biases,
            &[x],
        )
        .unwrap();
        assert_eq!(ds.output_tuple(x), want, "input {x:#x}");
    }
}

#[test]
fn cross_layer_tie_is_enforced() {
    let tables = tables("s1e1m1");
    let arch = Architecture::parse("1-id-1-id-1", tables.format).unwrap();
    let nn = build_network(&arch, &tables).unwrap();
    let tied = apply_constraints(
        &nn,
        &[TieConstraint::parse_line("tie w[1][0,0] w[2][0,0]").unwrap()],
    )
    .unwrap();
    let good = ParamAssignment {
        weights: vec![vec![vec![3]], vec![vec![3]]],
        biases: vec![vec![0], vec![1]],
    };
    let m = build_model(&tied, &tables, &good).unwrap();
    assert!(check_model(&m, &tied.theory).unwrap().is_valid());
    let bad = ParamAssignment {
        weights: vec![vec![vec![3]], vec![vec![4]]],
        biases: vec![vec![0], vec![1]],
    };
    let mb = build_model(&tied, &tables, &bad).unwrap();
    assert!(!check_model(&mb, &tied.theory).unwrap().is_valid());
}

#[test]
fn enumeration_guard_rejects_large_domains() {
    let tables = tables("s1e2m1");
    let arch = Architecture::parse("6-id-1", tables.format).unwrap();
    let nn = build_network(&arch, &tables).unwrap();
    let params = ParamAssignment {
        weights: vec![vec![vec![0; 6]]],
        biases: vec![vec![0]],
    };
    let m = build_model(&nn, &tables, &params).unwrap();
    // 16^6 > 2^20 rows
    assert!(matches!(infer(&nn, &tables, &m), Err(NnError::DomainTooLarge(_))));
}

#[test]
fn bad_params_are_rejected_before_modeling() {
    let tables = tables("s1e1m1");
    let arch = Architecture::parse("2-id-1", tables.format).unwrap();
    let nn = build_network(&arch, &tables).unwrap();
    let wrong_shape = ParamAssignment { weights: vec![vec![vec![0]]], biases: vec![vec![0]] };
    assert!(matches!(
        build_model(&nn, &tables, &wrong_shape),
        Err(NnError::BadParamShape)
    ));
    let out_of_range =
        ParamAssignment { weights: vec![vec![vec![0, 9]]], biases: vec![vec![0]] };
    assert!(matches!(
        build_model(&nn, &tables, &out_of_range),
        Err(NnError::BadPattern(9))
    ));
}
