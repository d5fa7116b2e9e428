use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson};

use tdqec::codes::{build_lookup_table, build_repetition, build_trickle_down, build_uncorrected, JumpSet};
use tdqec::engines::{
    codeword_start, gillespie_ensemble, infidelity_series, lindblad_dense_evolve, log_spaced, mcwf_ensemble,
    read_jsonl, weight_chain_generator, weight_chain_transient, write_jsonl, CosetPairState, DenseState, EngineKind,
    EngineOutput, JumpIndex, LogicalState, McwfState, SimConfig, TrajectoryRecord,
};
use tdqec::opcore::StateVector;
use tdqec::Error;

fn config(engine: EngineKind, t_grid: Vec<f64>, n_traj: usize, seed: u64) -> SimConfig {
    SimConfig {
        t_max: *t_grid.last().unwrap(),
        t_grid,
        n_traj,
        dt: None,
        master_seed: seed,
        engine,
        initial: LogicalState::default(),
    }
}

fn chain(set: &JumpSet, times: &[f64]) -> Vec<f64> {
    let gen = weight_chain_generator(set.code, set).unwrap();
    weight_chain_transient(&gen, &codeword_start(set.n()), times).unwrap().values
}

/// Three independent flips, each set with probability `(1 - e^{-2 g t}) / 2`;
/// majority vote fails when two or more are set.
fn uncorrected_three(ge: f64, t: f64) -> f64 {
    let p = 0.5 * (1.0 - (-2.0 * ge * t).exp());
    3.0 * p * p * (1.0 - p) + p * p * p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_matches_closed_form(ge in 0.01..2.0f64, t in 0.01..10.0f64) {
        let set = build_uncorrected(build_repetition(3).unwrap(), ge).unwrap();
        let v = chain(&set, &[t])[0];
        prop_assert!((v - uncorrected_three(ge, t)).abs() < 1e-12);
    }

    #[test]
    fn chain_distributions_are_stochastic(k in 1usize..7, gc in 0.0..3.0f64, ge in 0.001..1.0f64, t in 0.0..50.0f64) {
        let code = build_repetition(2 * k + 1).unwrap();
        let set = build_trickle_down(code, gc, ge, code.ell()).unwrap();
        let gen = weight_chain_generator(code, &set).unwrap();
        for p in gen.distributions(&codeword_start(code.n()), &[t]).unwrap() {
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn dense_lindblad_matches_chain(gc in 0.1..2.0f64, ge in 0.01..0.5f64, lookup in any::<bool>()) {
        let code = build_repetition(3).unwrap();
        let set = if lookup {
            build_lookup_table(code, gc, ge).unwrap()
        } else {
            build_trickle_down(code, gc, ge, 1).unwrap()
        };
        let times = log_spaced(0.05 / ge, 3.0 / ge, 8);
        let s = LogicalState::default();
        let rho0 = StateVector::logical(s.alpha, s.beta, 3).unwrap().projector();
        let states = lindblad_dense_evolve(&rho0, &set, &times).unwrap();
        for rho in &states {
            prop_assert!(rho.validate(1e-8).is_ok());
        }
        let dense = infidelity_series(&EngineOutput::Densities { times: times.clone(), states }, code, &s).unwrap();
        for (a, b) in dense.values.iter().zip(chain(&set, &times)) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }
}

/// Under pure bit-flip noise the number of jumps in `[0, T]` is Poisson
/// with mean `n ge T`; both stochastic engines must reproduce it.
fn poisson_chi2_pvalue(records: &[TrajectoryRecord], mean: f64) -> f64 {
    let top = 12usize;
    let mut observed = vec![0.0; top + 1];
    for r in records {
        observed[r.events.len().min(top)] += 1.0;
    }
    let dist = Poisson::new(mean).unwrap();
    let total = records.len() as f64;
    let mut expected: Vec<f64> = (0..top).map(|k| dist.pmf(k as u64) * total).collect();
    expected.push(total - expected.iter().sum::<f64>());
    // pool sparse bins so each expected count is at least 5
    let (mut chi2, mut bins, mut o_acc, mut e_acc) = (0.0, 0usize, 0.0, 0.0);
    for (o, e) in observed.iter().zip(&expected) {
        o_acc += o;
        e_acc += e;
        if e_acc >= 5.0 {
            chi2 += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
            bins += 1;
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 {
        chi2 += (o_acc - e_acc) * (o_acc - e_acc) / e_acc;
        bins += 1;
    }
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2)
}

#[test]
fn jump_counts_are_poisson() {
    let (ge, t) = (0.5, 2.0);
    let set = build_uncorrected(build_repetition(3).unwrap(), ge).unwrap();
    let cfg = config(EngineKind::Gillespie, vec![t], 10_000, 2024);
    let (_, gill) = gillespie_ensemble(&set, &cfg).unwrap();
    let (_, mcwf) = mcwf_ensemble(&set, &SimConfig { engine: EngineKind::Mcwf, ..cfg }).unwrap();
    for (name, recs) in [("gillespie", &gill), ("mcwf", &mcwf)] {
        let p = poisson_chi2_pvalue(recs, 3.0 * ge * t);
        assert!(p > 1e-3, "{name}: chi-square p-value {p}");
    }
}

/// A coset-pair superposition stays one under any sequence of jumps and
/// no-jump evolution.
#[test]
fn coset_pairs_are_closed() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for n in [3, 5] {
        let code = build_repetition(n).unwrap();
        for set in
            [build_lookup_table(code, 1.0, 0.3).unwrap(), build_trickle_down(code, 0.8, 0.3, code.ell()).unwrap()]
        {
            let idx = JumpIndex::new(&set);
            let s = LogicalState::default();
            let mut psi = DenseState::new(StateVector::logical(s.alpha, s.beta, n).unwrap()).unwrap();
            for _ in 0..200 {
                let rates = psi.jump_rates(&set, &idx);
                if !rates.is_empty() && rng.random::<f64>() < 0.5 {
                    let k = rates[rng.random_range(0..rates.len())].0;
                    psi.apply_jump(&set, k).unwrap();
                } else {
                    psi.damp(&set, &idx, 0.05).unwrap();
                }
                let support: Vec<usize> = (0..psi.amps.len()).filter(|&i| psi.amps[i].norm() > 1e-12).collect();
                assert!(support.len() <= 2, "support {support:?}");
                if support.len() == 2 {
                    assert_eq!(support[0] as u64 ^ support[1] as u64, (1u64 << n) - 1);
                }
                assert!((psi.amps.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn pair_state_matches_initial_logical_amplitudes() {
    let s = LogicalState::default();
    let psi = CosetPairState::logical(5, &s);
    assert_eq!((psi.s, psi.alpha, psi.beta), (0, s.alpha, s.beta));
    assert_eq!(psi.infidelity(build_repetition(5).unwrap(), &s).unwrap(), 0.0);
}

#[test]
fn short_time_growth_follows_order() {
    for n in [3, 5, 7] {
        let code = build_repetition(n).unwrap();
        let set = build_lookup_table(code, 1.0, 0.01).unwrap();
        let times = [0.01, 0.02];
        let v = chain(&set, &times);
        let slope = (v[1] / v[0]).ln() / 2f64.ln();
        assert!((slope - (code.ell() + 1) as f64).abs() < 0.05, "n = {n}: slope {slope}");
    }
}

#[test]
fn stochastic_engines_agree_with_chain_at_n3() {
    let code = build_repetition(3).unwrap();
    let set = build_trickle_down(code, 1.0, 0.2, 1).unwrap();
    let times = vec![1.0, 5.0, 15.0];
    let exact = chain(&set, &times);
    for engine in [EngineKind::Mcwf, EngineKind::Gillespie] {
        let cfg = config(engine, times.clone(), 4000, 5);
        let (series, _) = match engine {
            EngineKind::Mcwf => mcwf_ensemble(&set, &cfg).unwrap(),
            _ => gillespie_ensemble(&set, &cfg).unwrap(),
        };
        for (k, e) in exact.iter().enumerate() {
            let se = (e * (1.0 - e) / 4000.0).sqrt();
            assert!((series.values[k] - e).abs() < 4.0 * se, "{engine:?} t = {}", times[k]);
        }
    }
}

#[test]
fn seeds_determine_outputs() {
    let set = build_lookup_table(build_repetition(5).unwrap(), 1.0, 0.1).unwrap();
    let run = |seed, threads| {
        let cfg = config(EngineKind::Gillespie, log_spaced(0.1, 30.0, 10), 300, seed);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| (gillespie_ensemble(&set, &cfg).unwrap().1, mcwf_ensemble(&set, &cfg).unwrap().1))
    };
    let a = run(1, 1);
    assert_eq!(a, run(1, 3));
    assert_ne!(a.0, run(2, 1).0);
}

#[test]
fn jsonl_round_trip() {
    let set = build_trickle_down(build_repetition(5).unwrap(), 1.0, 0.3, 2).unwrap();
    let cfg = config(EngineKind::Gillespie, vec![1.0, 2.0, 4.0], 20, 3);
    let (_, recs) = gillespie_ensemble(&set, &cfg).unwrap();
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &recs).unwrap();
    assert_eq!(read_jsonl(&buf[..]).unwrap(), recs);
    assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 20);
}

#[test]
fn config_guards() {
    let set = build_lookup_table(build_repetition(3).unwrap(), 1.0, 0.1).unwrap();
    let mut cfg = config(EngineKind::Mcwf, vec![2.0, 1.0], 1, 0);
    assert!(matches!(mcwf_ensemble(&set, &cfg), Err(Error::InvalidConfig(_))));
    cfg.t_grid = vec![1.0, 2.0];
    cfg.t_max = 2.0;
    cfg.n_traj = 0;
    assert!(matches!(gillespie_ensemble(&set, &cfg), Err(Error::InvalidConfig(_))));
    cfg.n_traj = 1;
    cfg.dt = Some(0.2);
    assert!(matches!(mcwf_ensemble(&set, &cfg), Err(Error::TimeStepGuard(_))));
    let big = build_lookup_table(build_repetition(9).unwrap(), 1.0, 0.1).unwrap();
    let rho = StateVector::basis(0, 9).unwrap().projector();
    assert!(matches!(lindblad_dense_evolve(&rho, &big, &[1.0]), Err(Error::DimensionGuard { .. })));
}
