use proptest::prelude::*;

use tdqec::codes::{
    build_lookup_table, build_repetition, build_three_qubit, build_trickle_down, build_uncorrected,
    enumerate_trickle_projectors, n_proj_count, n_proj_lower_bound, verify_projector_relation, JumpSet, RepetitionCode,
};
use tdqec::opcore::bits::coset_weight;
use tdqec::opcore::{kl_check, to_dense, DenseOperator, DENSE_TOL};
use tdqec::Error;

fn code_up_to(max: usize) -> impl Strategy<Value = RepetitionCode> {
    (1..=(max - 1) / 2).prop_map(|k| build_repetition(2 * k + 1).unwrap())
}

#[test]
fn code_size_guards() {
    for bad in [0, 1, 2, 4, 64, 65] {
        assert_eq!(build_repetition(bad), Err(Error::InvalidCodeSize(bad)));
    }
    let code = build_repetition(7).unwrap();
    assert_eq!((code.n(), code.ell(), code.checks().len()), (7, 3, 6));
    let json = serde_json::to_string(&code).unwrap();
    assert_eq!(serde_json::from_str::<RepetitionCode>(&json).unwrap(), code);
    assert!(serde_json::from_str::<RepetitionCode>(r#"{"n":4}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Every lookup jump sends its whole syndrome class to the codespace.
    #[test]
    fn lookup_jumps_land_in_codespace(code in code_up_to(11)) {
        let n = code.n();
        let set = build_lookup_table(code, 1.0, 0.0).unwrap();
        prop_assert_eq!(set.corrections.len(), (1 << (n - 1)) - 1);
        let mut covered = 0usize;
        for j in &set.corrections {
            for s in j.domain.enumerate(n).unwrap() {
                covered += 1;
                let (to, _) = j.apply_bits(s).unwrap();
                prop_assert_eq!(coset_weight(to, n), 0);
                prop_assert_eq!(j.flip.weight(), coset_weight(s, n));
            }
        }
        // all states outside the codespace, each exactly once
        prop_assert_eq!(covered, (1 << n) - 2);
    }

    /// Trickle jumps lower coset weight by exactly one, and a state of
    /// weight c is touched by exactly c of them.
    #[test]
    fn trickle_lowers_weight_by_one(code in code_up_to(11)) {
        let n = code.n();
        let set = build_trickle_down(code, 1.0, 0.0, code.ell()).unwrap();
        prop_assert_eq!(set.corrections.len(), n);
        for s in 0..1u64 << n {
            let c = coset_weight(s, n);
            let mut hits = 0;
            for j in &set.corrections {
                if let Some((to, _)) = j.apply_bits(s) {
                    hits += 1;
                    prop_assert_eq!(coset_weight(to, n) + 1, c);
                }
            }
            prop_assert_eq!(hits, c);
        }
    }

    #[test]
    fn truncated_trickle_ignores_high_weights(code in code_up_to(9), m_frac in 0.0..1.0f64) {
        let n = code.n();
        let m = 1 + ((code.ell() - 1) as f64 * m_frac) as usize;
        let set = build_trickle_down(code, 1.0, 0.0, m).unwrap();
        for s in 0..1u64 << n {
            let active = set.corrections.iter().any(|j| j.acts_on(s));
            prop_assert_eq!(active, (1..=m).contains(&coset_weight(s, n)));
        }
    }

    #[test]
    fn jump_set_serde_round_trip(code in code_up_to(7), gc in 0.0..2.0f64, ge in 0.0..1.0f64) {
        let set = build_trickle_down(code, gc, ge, code.ell()).unwrap();
        let back: JumpSet = serde_json::from_str(&serde_json::to_string(&set).unwrap()).unwrap();
        prop_assert_eq!(back, set);
    }
}

#[test]
fn projector_count_matches_enumeration() {
    for n in (3..=11).step_by(2) {
        let code = build_repetition(n).unwrap();
        let count = n_proj_count(n, code.ell()).unwrap();
        for i in 0..n {
            assert_eq!(enumerate_trickle_projectors(code, i).unwrap() as u128, count, "n = {n}, i = {i}");
        }
    }
    assert_eq!(n_proj_count(11, 5).unwrap(), 386);
}

#[test]
fn projector_bound_holds_where_defined() {
    for n in (3..=63).step_by(2) {
        for ell in 1..=(n - 1) / 2 {
            match n_proj_lower_bound(n, ell) {
                Ok(b) => assert!(n_proj_count(n, ell).unwrap() as f64 >= b, "n = {n}, ell = {ell}"),
                Err(e) => assert!(matches!(e, Error::NotApplicable(_))),
            }
        }
    }
}

#[test]
fn projector_relation_holds() {
    for n in [3, 5, 7] {
        let code = build_repetition(n).unwrap();
        for i in 0..n {
            for j in 1..=code.ell() {
                let r = verify_projector_relation(code, i, j).unwrap();
                assert!(r.holds(), "n = {n}, i = {i}, j = {j}: {r:?}");
            }
        }
    }
}

fn dissipators(set: &JumpSet) -> Vec<Vec<(usize, usize, f64)>> {
    let mut out: Vec<_> = set
        .corrections
        .iter()
        .map(|j| {
            let m = to_dense(j, set.n()).unwrap().0;
            let mut e = Vec::new();
            for c in 0..m.ncols() {
                for r in 0..m.nrows() {
                    if m[(r, c)].norm() != 0.0 {
                        e.push((r, c, m[(r, c)].re));
                    }
                }
            }
            e
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

#[test]
fn three_qubit_schemes_coincide() {
    let code = build_repetition(3).unwrap();
    let gc = 0.37;
    let lookup = dissipators(&build_lookup_table(code, gc, 0.0).unwrap());
    assert_eq!(lookup, dissipators(&build_trickle_down(code, gc, 0.0, 1).unwrap()));
    assert_eq!(lookup, dissipators(&build_three_qubit(gc, 0.0).unwrap()));
}

#[test]
fn correctable_errors_satisfy_kl() {
    for n in [3, 5, 7] {
        let code = build_repetition(n).unwrap();
        let errors: Vec<DenseOperator> = (1..1u64 << n)
            .filter(|m| m.count_ones() as usize <= code.ell())
            .map(|m| {
                let j = tdqec::opcore::StructuredJump::new(
                    1.0,
                    tdqec::opcore::XString::new(m, n).unwrap(),
                    tdqec::opcore::IndicatorSet::All,
                    "e",
                );
                to_dense(&j, n).unwrap()
            })
            .collect();
        assert!(kl_check(&code.dense_codewords().unwrap(), &errors, DENSE_TOL).unwrap().satisfied, "n = {n}");
    }
}

#[test]
fn uncorrected_has_only_errors() {
    let set = build_uncorrected(build_repetition(5).unwrap(), 0.2).unwrap();
    assert!(set.corrections.is_empty());
    assert_eq!(set.errors.len(), 5);
    assert!((set.total_rate(0b10110) - 1.0).abs() < 1e-15);
}
