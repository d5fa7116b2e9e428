use proptest::prelude::*;

use tdqec::codes::build_repetition;
use tdqec::engines::weight_chain_generator;
use tdqec::ion::{
    build_ion_jump_set, kappa_eff, kappa_eff_reduced, rates_table, resonant_g, tone_rate, IonParams, Tone, ToneSet,
};

fn params() -> impl Strategy<Value = IonParams> {
    (0.1..5.0f64, 1.0..50.0f64, 1.0..20.0f64, 0.2..3.0f64, 0.1..2.0f64, 1usize..4).prop_map(
        |(omega, delta_big, delta_small, g_coupling, kappa_eng, sequential_groups)| IonParams {
            omega,
            delta_big,
            delta_small,
            g_coupling,
            kappa_eng,
            sequential_groups,
        },
    )
}

proptest! {
    #[test]
    fn peak_at_resonant_center(p in params(), x0 in 1usize..8) {
        let g = resonant_g(x0 as f64, &p).unwrap();
        let tuned = IonParams { g_coupling: g, ..p.clone() };
        let peak = kappa_eff(x0 as f64, &tuned).unwrap();
        prop_assert!((peak / p.peak_rate() - 1.0).abs() < 1e-12);
        for d in 1..4 {
            let (hi, lo) = (x0 as f64 + d as f64, x0 as f64 - d as f64);
            let a = kappa_eff(hi, &tuned).unwrap();
            prop_assert!(a < peak);
            prop_assert!((a - kappa_eff(2.0 * x0 as f64 - hi, &tuned).unwrap()).abs() <= 1e-12 * peak);
            prop_assert!((a - kappa_eff_reduced(hi, x0 as f64, &p)).abs() <= 1e-12 * peak);
            let _ = lo;
        }
    }

    #[test]
    fn undesired_mirrors_desired(p in params(), k in 1usize..6) {
        let n = 2 * k + 1;
        let tones = ToneSet::full(k);
        for row in rates_table(n, &p, &tones).unwrap() {
            let s = p.sequential_groups as f64;
            prop_assert_eq!(row.undesired_rate, tone_rate((n - row.c) as f64, &p, &tones).unwrap() / s);
            if row.c > 0 {
                prop_assert_eq!(row.desired_rate, tone_rate(row.c as f64, &p, &tones).unwrap() / s);
            }
        }
    }

    /// The ion scheme treats all qubits alike, so it reduces to a weight chain.
    #[test]
    fn ion_scheme_is_permutation_symmetric(p in params(), k in 1usize..4, ge in 0.0..0.5f64) {
        let code = build_repetition(2 * k + 1).unwrap();
        let set = build_ion_jump_set(code, &p, &ToneSet::full(k), ge).unwrap();
        prop_assert!(weight_chain_generator(code, &set).is_ok());
    }
}

#[test]
fn single_tone_center_and_width() {
    let p = IonParams {
        omega: 1.0,
        delta_big: 4.0,
        delta_small: 3.46,
        g_coupling: 1.66,
        kappa_eng: 1.0,
        sequential_groups: 1,
    };
    let c = p.center(p.g_coupling);
    assert!((c - 5.0).abs() < 0.1);
    assert!((p.half_width(p.g_coupling) - c / 8.0).abs() < 1e-12);
}

#[test]
fn tone_overrides_and_guards() {
    let p = IonParams {
        omega: 1.0,
        delta_big: 4.0,
        delta_small: 3.46,
        g_coupling: 1.66,
        kappa_eng: 1.0,
        sequential_groups: 1,
    };
    let explicit = ToneSet { tones: vec![Tone { x0: 2, g: Some(1.0) }] };
    let direct = kappa_eff(2.0, &IonParams { g_coupling: 1.0, ..p.clone() }).unwrap();
    assert_eq!(tone_rate(2.0, &p, &explicit).unwrap(), direct);
    assert!(ToneSet::single(0, None).validate(2).is_err());
    assert!(ToneSet::single(3, None).validate(2).is_err());
    assert!(rates_table(5, &IonParams { sequential_groups: 0, ..p }, &ToneSet::full(2)).is_err());
}
