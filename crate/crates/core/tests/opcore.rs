use proptest::prelude::*;

use tdqec::opcore::bits::{coset_weight, erroneous_mask};
use tdqec::opcore::dense::pauli;
use tdqec::opcore::{
    projector_from_stabilizers, repetition_checks, syndrome_of, to_dense, BitString, IndicatorSet, QubitRole,
    StructuredJump, XString,
};

fn odd_n(max: usize) -> impl Strategy<Value = usize> {
    (1..=(max - 1) / 2).prop_map(|k| 2 * k + 1)
}

fn indicator(n: usize) -> impl Strategy<Value = IndicatorSet> {
    let ell = (n - 1) / 2;
    let checks = repetition_checks(n);
    let syn_bits = checks.len();
    prop_oneof![
        Just(IndicatorSet::All),
        prop::collection::vec(0..1u64 << n, 0..6).prop_map(IndicatorSet::explicit),
        (0..1u64 << syn_bits).prop_map(move |s| IndicatorSet::Syndrome { checks: checks.clone(), syndrome: s }),
        (0..=ell, 0..=ell, 0..n, any::<bool>(), any::<bool>()).prop_map(|(a, b, q, err, constrained)| {
            let role = if err { QubitRole::Erroneous(q) } else { QubitRole::Correct(q) };
            IndicatorSet::CosetWeight { lo: a.min(b), hi: a.max(b), qubit: constrained.then_some(role) }
        }),
    ]
}

fn jump(n: usize) -> impl Strategy<Value = StructuredJump> {
    (0.0..2.0f64, 0..1u64 << n, indicator(n))
        .prop_map(move |(a, mask, dom)| StructuredJump::new(a, XString::new(mask, n).unwrap(), dom, "j"))
}

proptest! {
    #[test]
    fn parse_display_round_trip(n in 1usize..=20, bits in any::<u64>()) {
        let b = BitString::new(bits & ((1u64 << n) - 1), n).unwrap();
        prop_assert_eq!(BitString::parse(&b.to_string()).unwrap(), b);
    }

    #[test]
    fn coset_weight_is_distance_to_nearest_codeword(n in odd_n(21), bits in any::<u64>()) {
        let b = BitString::new(bits & ((1u64 << n) - 1), n).unwrap();
        let w = b.weight();
        prop_assert_eq!(b.coset_weight(), w.min(n - w));
        prop_assert_eq!(b.complement().coset_weight(), b.coset_weight());
        prop_assert!(2 * b.coset_weight() < n);
        prop_assert_eq!(erroneous_mask(b.bits(), n).count_ones() as usize, b.coset_weight());
    }

    #[test]
    fn x_strings_compose_as_xor(n in 1usize..=30, a in any::<u64>(), b in any::<u64>()) {
        let m = (1u64 << n) - 1;
        let (xa, xb) = (XString::new(a & m, n).unwrap(), XString::new(b & m, n).unwrap());
        prop_assert_eq!(xa.compose(xb).unwrap().mask(), (a ^ b) & m);
        prop_assert_eq!(xa.compose(xa).unwrap(), XString::identity(n).unwrap());
    }

    #[test]
    fn symbolic_and_explicit_membership_agree((n, set) in odd_n(9).prop_flat_map(|n| (Just(n), indicator(n)))) {
        let explicit = set.to_explicit(n).unwrap();
        for s in 0..1u64 << n {
            prop_assert_eq!(set.contains_bits(s, n), explicit.contains_bits(s, n));
        }
        prop_assert_eq!(set.count(n).unwrap(), set.enumerate(n).unwrap().len());
    }

    #[test]
    fn dense_jump_has_diagonal_ldagl((n, j) in odd_n(7).prop_flat_map(|n| (Just(n), jump(n)))) {
        let l = to_dense(&j, n).unwrap();
        let k = l.adjoint().mul(&l);
        prop_assert!(k.max_off_diagonal() == 0.0);
        for s in 0..1u64 << n {
            let expected = if j.acts_on(s) { j.rate() } else { 0.0 };
            prop_assert!((k.0[(s as usize, s as usize)].re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_matches_dense_column((n, j) in odd_n(7).prop_flat_map(|n| (Just(n), jump(n)))) {
        let l = to_dense(&j, n).unwrap().0;
        for s in 0..1u64 << n {
            let col = l.column(s as usize);
            match j.apply_bits(s) {
                Some((to, amp)) => {
                    prop_assert!((col[to as usize].re - amp).abs() < 1e-15);
                    prop_assert_eq!(col.iter().filter(|z| z.norm() > 0.0).count(), usize::from(amp != 0.0));
                }
                None => prop_assert!(col.iter().all(|z| z.norm() == 0.0)),
            }
        }
    }
}

#[test]
fn syndromes_partition_into_coset_pairs() {
    for n in [3, 5, 7, 9] {
        let checks = repetition_checks(n);
        let mut seen = vec![0usize; 1 << checks.len()];
        for s in 0..1u64 << n {
            seen[syndrome_of(s, &checks) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c == 2), "n = {n}");
    }
}

#[test]
fn stabilizer_projector_matches_syndrome_domain() {
    let n = 5;
    let checks = repetition_checks(n);
    for syn in 0..1u64 << checks.len() {
        let flags: Vec<bool> = (0..checks.len()).map(|k| syn >> k & 1 == 1).collect();
        let p = projector_from_stabilizers(&checks, &flags, n).unwrap();
        let direct = IndicatorSet::Syndrome { checks: checks.clone(), syndrome: syn };
        assert_eq!(p.enumerate(n).unwrap(), direct.enumerate(n).unwrap());
    }
}

#[test]
fn dense_x_agrees_with_bit_convention() {
    // qubit 0 is the least significant bit
    let x0 = pauli::x(0, 3);
    assert_eq!(x0[(0b001, 0b000)].re, 1.0);
    assert_eq!(BitString::parse("100").unwrap().bits(), 0b001);
    assert_eq!(coset_weight(0b110, 3), 1);
}
