use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use tdqec::analysis::{
    extrapolate_qubits, lambda_estimate, threshold_estimate, Extrapolation, LambdaEstimate, PlTable, ThresholdResult,
    LAMBDA_MIN_SIZE,
};
use tdqec::codes::{
    build_lookup_table, build_repetition, build_trickle_down, enumerate_trickle_projectors, n_proj_count,
    n_proj_lower_bound, verify_projector_relation, JumpSet,
};
use tdqec::engines::{
    codeword_start, gillespie_ensemble, infidelity_series, lindblad_dense_evolve, mcwf_ensemble,
    weight_chain_generator, weight_chain_transient, write_jsonl, EngineKind, EngineOutput, SimConfig, TimeSeries,
    TrajectoryRecord,
};
use tdqec::ion::{rates_table, tone_rate};
use tdqec::opcore::bits::coset_weight;
use tdqec::opcore::{
    kl_check, kl_intersubspace_check, to_dense, DenseOperator, IndicatorSet, StateVector, StructuredJump, XString,
    DENSE_TOL,
};
use tdqec::pipeline::{sweep, SchemeSpec, Sweep};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::OutputDir;
use crate::plot;

fn cell_stem(n: usize, scheme: &str, gamma_e: f64) -> String {
    format!("n{n}_{scheme}_ge{gamma_e}")
}

struct SimCell {
    stem: String,
    series: TimeSeries,
    records: Option<Vec<TrajectoryRecord>>,
}

fn simulate_cell(cfg: &ExperimentConfig, spec: &SchemeSpec, n: usize, gamma_e: f64) -> CliResult<SimCell> {
    let s = &cfg.simulate;
    let jumps = spec.build(n, s.gamma_c, gamma_e)?;
    let times: Vec<f64> = s.times.values().iter().map(|t| t / gamma_e).collect();
    let (series, records) = match s.engine {
        EngineKind::Chain => {
            let gen = weight_chain_generator(jumps.code, &jumps)?;
            let mut series = weight_chain_transient(&gen, &codeword_start(n), &times)?;
            let k = s.initial.flip_factor();
            series.values.iter_mut().for_each(|v| *v *= k);
            (series, None)
        }
        EngineKind::Dense => {
            let rho0 = StateVector::logical(s.initial.alpha, s.initial.beta, n)?.projector();
            let states = lindblad_dense_evolve(&rho0, &jumps, &times)?;
            (infidelity_series(&EngineOutput::Densities { times, states }, jumps.code, &s.initial)?, None)
        }
        engine @ (EngineKind::Mcwf | EngineKind::Gillespie) => {
            let sim = SimConfig {
                t_max: times.last().copied().unwrap_or(0.0),
                t_grid: times,
                n_traj: s.n_traj,
                dt: s.dt,
                master_seed: cfg.seed,
                engine,
                initial: s.initial,
            };
            let (series, records) = if engine == EngineKind::Mcwf {
                mcwf_ensemble(&jumps, &sim)?
            } else {
                gillespie_ensemble(&jumps, &sim)?
            };
            (series, Some(records))
        }
    };
    Ok(SimCell { stem: cell_stem(n, &spec.name(), gamma_e), series, records })
}

/// Infidelity curves for every `(n, gamma_e, scheme)`.
pub fn cmd_simulate(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<()> {
    let s = &cfg.simulate;
    let gamma_es = s.gamma_e.values();
    let mut cells = Vec::new();
    for &n in &s.sizes {
        for &g in &gamma_es {
            for spec in &s.schemes {
                cells.push((n, g, spec));
            }
        }
    }
    let results: Vec<CliResult<(f64, SimCell)>> =
        cells.par_iter().map(|&(n, g, spec)| simulate_cell(cfg, spec, n, g).map(|c| (g, c))).collect();

    let mut plotted = Vec::new();
    for r in results {
        let (gamma_e, cell) = r?;
        let mut csv = Vec::new();
        cell.series.write_csv(&mut csv, gamma_e).map_err(CliError::io("formatting csv"))?;
        let name = format!("infidelity_{}.csv", cell.stem);
        out.write(&name, "infidelity vs time in units of 1/gamma_e", &csv)?;
        plotted.push((name, cell.stem.clone()));
        if let (true, Some(records)) = (s.write_trajectories, &cell.records) {
            let mut buf = Vec::new();
            write_jsonl(&mut buf, records)?;
            out.write(&format!("trajectories_{}.jsonl", cell.stem), "one trajectory record per line", &buf)?;
        }
    }
    out.write("plot_infidelity.gp", "gnuplot script for the infidelity curves", plot::infidelity(&plotted).as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct FitLine<'a> {
    scheme: &'a str,
    n: usize,
    gamma_e: f64,
    fit: &'a Option<tdqec::analysis::FitResult>,
    error: &'a Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SchemeAnalysis {
    pub scheme: String,
    pub threshold: Result<ThresholdResult, String>,
    pub lambda: Result<LambdaEstimate, String>,
    /// Prefactor used for the extrapolation and where it came from.
    pub prefactor: Result<(f64, String), String>,
    pub extrapolation: Result<Extrapolation, String>,
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Median of `p_L / (gamma_e / star)^(ell+1)` over sub-threshold cells of
/// the sizes that enter the Lambda fit.
fn estimate_prefactor(table: &PlTable, star: f64) -> Option<f64> {
    let mut logs = Vec::new();
    for (r, &n) in table.sizes.iter().enumerate() {
        if n < LAMBDA_MIN_SIZE {
            continue;
        }
        for (c, &g) in table.gamma_es.iter().enumerate() {
            if let Some(p) = table.values[r][c].filter(|p| *p > 0.0 && g < star) {
                let order = (n - 1) / 2 + 1;
                logs.push(p.ln() - order as f64 * (g / star).ln());
            }
        }
    }
    median(logs).map(f64::exp)
}

pub fn analyze(cfg: &ExperimentConfig, sw: &Sweep) -> SchemeAnalysis {
    let x = &cfg.sweep.extrapolation;
    let lambda = lambda_estimate(&sw.table).map_err(|e| e.to_string());
    let prefactor = match (x.prefactor, &lambda) {
        (Some(c), _) => Ok((c, "configured".to_string())),
        (None, Ok(l)) => estimate_prefactor(&sw.table, l.gamma_e_star)
            .map(|c| (c, "median over sub-threshold cells".to_string()))
            .ok_or_else(|| "no sub-threshold cells to estimate the prefactor".to_string()),
        (None, Err(e)) => Err(e.clone()),
    };
    let extrapolation = match (&lambda, &prefactor) {
        (Ok(l), Ok((c, _))) => {
            extrapolate_qubits(l.gamma_e_star, *c, x.gamma_e, x.target, x.convention).map_err(|e| e.to_string())
        }
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };
    SchemeAnalysis {
        scheme: sw.scheme.clone(),
        threshold: threshold_estimate(&sw.table).map_err(|e| e.to_string()),
        lambda,
        prefactor,
        extrapolation,
    }
}

/// Fitted logical error rates over sizes and error rates, then threshold,
/// Lambda and qubit-count extrapolation per scheme.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Vec<SchemeAnalysis>> {
    let w = &cfg.sweep;
    let gamma_es = w.gamma_e.values();
    let sweeps: Vec<Sweep> =
        w.schemes.iter().map(|spec| sweep(spec, &w.sizes, &gamma_es, w.gamma_c)).collect::<tdqec::Result<_>>()?;

    let mut fits = String::new();
    let mut table = String::from("scheme,n,gamma_e,p_l,epsilon,tau,converged\n");
    let mut lambda_csv = String::from("scheme,gamma_e,lambda\n");
    let mut analyses = Vec::new();
    for sw in &sweeps {
        for c in &sw.cells {
            let line = FitLine { scheme: &sw.scheme, n: c.n, gamma_e: c.gamma_e, fit: &c.fit, error: &c.error };
            fits.push_str(&serde_json::to_string(&line).expect("fit line serializes"));
            fits.push('\n');
            match &c.fit {
                Some(f) => writeln!(
                    table,
                    "{},{},{:e},{:e},{:e},{:e},{}",
                    sw.scheme, c.n, c.gamma_e, f.p_l, f.epsilon, f.tau, f.converged
                ),
                None => writeln!(table, "{},{},{:e},,,,false", sw.scheme, c.n, c.gamma_e),
            }
            .expect("writing to a String");
        }
        let a = analyze(cfg, sw);
        if let Ok(l) = &a.lambda {
            for p in &l.points {
                writeln!(lambda_csv, "{},{:e},{:e}", sw.scheme, p.gamma_e, p.mean).expect("writing to a String");
            }
        }
        analyses.push(a);
    }
    let mut analysis = serde_json::to_string_pretty(&analyses).expect("analysis serializes");
    analysis.push('\n');
    let names: Vec<String> = sweeps.iter().map(|s| s.scheme.clone()).collect();
    out.write("fits.jsonl", "one fit result per (scheme, n, gamma_e) cell", fits.as_bytes())?;
    out.write("p_l.csv", "fitted logical error rates", table.as_bytes())?;
    out.write("lambda.csv", "mean suppression factor per error rate", lambda_csv.as_bytes())?;
    out.write("analysis.json", "threshold, Lambda fit and extrapolation per scheme", analysis.as_bytes())?;
    out.write("plot_p_l.gp", "gnuplot script for p_L", plot::logical_rates(&names, &w.sizes).as_bytes())?;
    out.write("plot_lambda.gp", "gnuplot script for Lambda", plot::lambda(&names).as_bytes())?;
    Ok(analyses)
}

/// Engineered rates per coset weight and the continuous rate profile.
pub fn cmd_rates(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<()> {
    let r = &cfg.rates;
    let mut csv = String::from("c,desired_rate,undesired_rate,desired_normalized,undesired_normalized\n");
    for row in rates_table(r.n, &r.params, &r.tones)? {
        writeln!(
            csv,
            "{},{:e},{:e},{:e},{:e}",
            row.c, row.desired_rate, row.undesired_rate, row.desired_normalized, row.undesired_normalized
        )
        .expect("writing to a String");
    }
    let scale = r.params.peak_rate() * r.params.sequential_groups as f64;
    let mut profile = String::from("x,normalized_rate\n");
    let steps = (r.n as f64 / r.profile_step).round() as usize;
    for k in 0..=steps {
        let x = r.n as f64 * k as f64 / steps as f64;
        writeln!(profile, "{:e},{:e}", x, tone_rate(x, &r.params, &r.tones)? / scale).expect("writing to a String");
    }
    out.write("rates.csv", "desired and undesired rates per coset weight", csv.as_bytes())?;
    out.write(
        "rate_profile.csv",
        "engineered rate over continuous weight, normalized to the peak",
        profile.as_bytes(),
    )?;
    out.write("plot_rates.gp", "gnuplot script for the rate profile", plot::rates().as_bytes())?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

fn x_operator(mask: u64, n: usize) -> CliResult<DenseOperator> {
    let j = StructuredJump::new(1.0, XString::new(mask, n)?, IndicatorSet::All, "x");
    Ok(to_dense(&j, n)?)
}

fn sorted_dissipators(set: &JumpSet) -> CliResult<Vec<Vec<(usize, usize, f64)>>> {
    let mut out = Vec::new();
    for j in &set.corrections {
        let m = to_dense(j, set.n())?.0;
        let mut e = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)].norm() != 0.0 {
                    e.push((r, c, m[(r, c)].re));
                }
            }
        }
        out.push(e);
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite entries"));
    Ok(out)
}

fn verify_code(n: usize) -> CliResult<Vec<Check>> {
    let code = build_repetition(n)?;
    let ell = code.ell();
    let cw = code.dense_codewords()?;
    let low: Vec<u64> = (1..1u64 << n).filter(|m| m.count_ones() as usize <= ell).collect();
    let errors = low.iter().map(|&m| x_operator(m, n)).collect::<CliResult<Vec<_>>>()?;
    let kl = kl_check(&cw, &errors, DENSE_TOL)?;
    let mut checks = vec![check(
        format!("kl_standard_n{n}"),
        kl.satisfied,
        format!("{} errors of weight <= {ell}, max deviation {:.2e}", errors.len(), kl.max_deviation),
    )];

    let (mut cases, mut failed) = (0usize, 0usize);
    for base in std::iter::once(0).chain(low.iter().copied()) {
        let q = base.count_ones() as usize;
        for p in 1..=ell - q.min(ell) {
            let probes: Vec<u64> = low.iter().copied().filter(|m| m.count_ones() as usize == p).collect();
            for &a in &probes {
                for &b in &probes {
                    cases += 1;
                    if !kl_intersubspace_check(
                        &cw,
                        ell,
                        XString::new(base, n)?,
                        XString::new(a, n)?,
                        XString::new(b, n)?,
                        DENSE_TOL,
                    )? {
                        failed += 1;
                    }
                }
            }
        }
    }
    checks.push(check(format!("kl_intersubspace_n{n}"), failed == 0, format!("{cases} cases, {failed} failed")));

    let mut relation_failures = Vec::new();
    for i in 0..n {
        for j in 1..=ell {
            if !verify_projector_relation(code, i, j)?.holds() {
                relation_failures.push((i, j));
            }
        }
    }
    checks.push(check(
        format!("projector_relation_n{n}"),
        relation_failures.is_empty(),
        format!("{} (qubit, order) pairs, failures {relation_failures:?}", n * ell),
    ));

    let lookup = build_lookup_table(code, 1.0, 0.0)?;
    let mut lookup_ok = lookup.corrections.len() == (1 << (n - 1)) - 1;
    let mut covered = 0usize;
    for j in &lookup.corrections {
        for s in j.domain.enumerate(n)? {
            covered += 1;
            lookup_ok &= j.apply_bits(s).is_some_and(|(to, _)| coset_weight(to, n) == 0);
        }
    }
    lookup_ok &= covered == (1 << n) - 2;
    checks.push(check(
        format!("lookup_targets_n{n}"),
        lookup_ok,
        format!("{} jumps cover {covered} states", lookup.corrections.len()),
    ));

    let trickle = build_trickle_down(code, 1.0, 0.0, ell)?;
    let trickle_ok = (0..1u64 << n).all(|s| {
        let c = coset_weight(s, n);
        let hits: Vec<usize> =
            trickle.corrections.iter().filter_map(|j| j.apply_bits(s)).map(|(to, _)| coset_weight(to, n)).collect();
        hits.len() == c && hits.iter().all(|&w| w + 1 == c)
    });
    checks.push(check(format!("trickle_steps_n{n}"), trickle_ok, "every jump lowers coset weight by one"));
    Ok(checks)
}

/// Structural checks of the codes and schemes; the caller turns any
/// failure into exit code 3.
pub fn cmd_verify(cfg: &ExperimentConfig, out: &mut OutputDir) -> CliResult<Vec<Check>> {
    let v = &cfg.verify;
    let per_code: Vec<CliResult<Vec<Check>>> = v.kl_sizes.par_iter().map(|&n| verify_code(n)).collect();
    let mut checks = Vec::new();
    for c in per_code {
        checks.extend(c?);
    }

    for &n in &v.count_sizes {
        let code = build_repetition(n)?;
        let formula = n_proj_count(n, code.ell())?;
        let counts = (0..n).map(|i| enumerate_trickle_projectors(code, i)).collect::<tdqec::Result<Vec<_>>>()?;
        let ok = counts.iter().all(|&c| c as u128 == formula);
        checks.push(check(format!("projector_count_n{n}"), ok, format!("formula {formula}, enumerated {counts:?}")));
    }
    let eleven = n_proj_count(11, 5)?;
    checks.push(check("projector_count_reference", eleven == 386, format!("n = 11, ell = 5: {eleven}")));

    let (mut tested, mut violations) = (0usize, Vec::new());
    for n in (3..=v.bound_max).step_by(2) {
        for ell in 1..=(n - 1) / 2 {
            match n_proj_lower_bound(n, ell) {
                Ok(b) => {
                    tested += 1;
                    if (n_proj_count(n, ell)? as f64) < b {
                        violations.push((n, ell));
                    }
                }
                Err(tdqec::Error::NotApplicable(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    checks.push(check(
        "projector_lower_bound",
        violations.is_empty(),
        format!("{tested} (n, ell) cases up to n = {}, violations {violations:?}", v.bound_max),
    ));

    let code = build_repetition(3)?;
    let lookup = sorted_dissipators(&build_lookup_table(code, 0.37, 0.0)?)?;
    let trickle = sorted_dissipators(&build_trickle_down(code, 0.37, 0.0, 1)?)?;
    let three = sorted_dissipators(&SchemeSpec::ThreeQubit.build(3, 0.37, 0.0)?)?;
    checks.push(check(
        "three_qubit_schemes_coincide",
        lookup == trickle && lookup == three,
        "lookup, trickle-down and the three-qubit scheme have identical jumps at n = 3",
    ));

    let mut report = serde_json::to_string_pretty(&checks).expect("checks serialize");
    report.push('\n');
    out.write("verify.json", "verification checks", report.as_bytes())?;
    Ok(checks)
}
