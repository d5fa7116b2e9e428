use proptest::prelude::*;
use tdqec::engines::EngineKind;
use tdqec::pipeline::SchemeSpec;
use tdqec_cli::config::{ExperimentConfig, Grid, RateGrid, Spacing};

fn scheme() -> impl Strategy<Value = SchemeSpec> {
    prop_oneof![
        Just(SchemeSpec::LookupTable),
        proptest::option::of(1usize..4).prop_map(|m| SchemeSpec::TrickleDown { m }),
        Just(SchemeSpec::Uncorrected),
    ]
}

fn rates() -> impl Strategy<Value = RateGrid> {
    prop_oneof![
        prop::collection::btree_set(1u32..1_000_000, 1..6)
            .prop_map(|s| RateGrid::List(s.into_iter().map(|k| k as f64 * 1e-6 + 1e-9 / 3.0).collect())),
        (1e-4..0.1f64, 1.0..10.0f64, 1usize..40, any::<bool>()).prop_map(|(lo, f, points, log)| {
            RateGrid::Range(Grid { lo, hi: lo * f, points, spacing: if log { Spacing::Log } else { Spacing::Linear } })
        }),
    ]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    let engine = prop_oneof![
        Just(EngineKind::Chain),
        Just(EngineKind::Dense),
        Just(EngineKind::Mcwf),
        Just(EngineKind::Gillespie)
    ];
    (
        any::<u64>(),
        prop::collection::btree_set(1usize..8, 1..4),
        prop::collection::vec(scheme(), 1..4),
        rates(),
        0.0..10.0f64,
        engine,
        1usize..100_000,
        proptest::option::of(1e-6..1e-2f64),
        rates(),
        (1e-20..1e-3f64, proptest::option::of(1e-3..1.0f64)),
    )
        .prop_map(
            |(seed, ks, schemes, sim_rates, gamma_c, engine, n_traj, dt, sweep_rates, (target, prefactor))| {
                let mut cfg = ExperimentConfig { seed, ..ExperimentConfig::default() };
                let sizes: Vec<usize> = ks.into_iter().map(|k| 2 * k + 1).collect();
                cfg.simulate.sizes = sizes.clone();
                cfg.simulate.schemes = schemes.clone();
                cfg.simulate.gamma_e = sim_rates;
                cfg.simulate.gamma_c = gamma_c;
                cfg.simulate.engine = engine;
                cfg.simulate.n_traj = n_traj;
                cfg.simulate.dt = dt;
                cfg.sweep.sizes = sizes;
                cfg.sweep.schemes = schemes;
                cfg.sweep.gamma_e = sweep_rates;
                cfg.sweep.extrapolation.target = target;
                cfg.sweep.extrapolation.prefactor = prefactor;
                cfg
            },
        )
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_identity(cfg in config()) {
        cfg.validate().unwrap();
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml(), text);
        prop_assert_eq!(back.sha256(), cfg.sha256());
    }
}

#[test]
fn hash_tracks_content() {
    let a = ExperimentConfig::default();
    let b = ExperimentConfig { seed: 1, ..a.clone() };
    assert_ne!(a.sha256(), b.sha256());
    assert_eq!(a.sha256().len(), 64);
}
