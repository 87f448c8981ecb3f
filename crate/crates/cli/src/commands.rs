//! The five subcommands.

use std::path::Path;

use rayon::prelude::*;
use resonance_core::entanglement::Bipartition;
use resonance_core::predictor::epsilon::EpsilonSamples;
use resonance_core::predictor::params::wavepacket_params;
use resonance_core::predictor::regime::classify_regimes;
use resonance_core::predictor::robust::{scaling_fit, RobustnessResult};
use resonance_core::predictor::{crossover_time, RegimeReport};
use resonance_core::resonance::ResonancePlan;
use resonance_core::rotor::RotorLattice;
use resonance_core::series::{default_lattice, run_rotor, run_top, Propagation, RotorRun, RotorSeries};
use resonance_core::stats::LinearFit;
use resonance_core::top::{saturation_time, TopEngine};
use serde::Serialize;

use crate::config::{Config, System};
use crate::error::CliError;
use crate::output::{fmt_f64, RunOutput};

fn require_system(config: &Config, system: System, command: &str) -> Result<(), CliError> {
    if config.system != system {
        let needed = match system {
            System::Rotor => "rotor",
            System::Top => "top",
        };
        return Err(CliError::Validation(format!("system: `{command}` needs system = \"{needed}\"")));
    }
    Ok(())
}

fn rotor_run(config: &Config, plan: ResonancePlan, propagation: Propagation, partition: Option<Bipartition>) -> Result<RotorRun, CliError> {
    let potential = config.potential_spec()?;
    let initial = config.initial_state();
    let lattice = if config.engine.windows.is_empty() {
        default_lattice(&potential, &initial, config.steps, config.engine.window_margin, config.engine.max_dimension)?
    } else {
        let windows: Vec<(i64, i64)> = config.engine.windows.iter().map(|w| (w[0], w[1])).collect();
        RotorLattice::new(&windows, config.engine.max_dimension)?
    };
    Ok(RotorRun {
        potential,
        plan,
        initial,
        steps: config.steps,
        propagation,
        partition,
        options: config.engine_options(),
        lattice: Some(lattice),
    })
}

fn growth_warnings(out: &mut RunOutput, series: &RotorSeries, label: &str) {
    for g in &series.growth {
        out.warn(format!(
            "{label}window of rotor {} grown from {:?} to {:?} (tail mass {:e})",
            g.rotor + 1,
            g.from,
            g.to,
            g.tail_mass
        ));
    }
}

/// Evolves the configured rotors and writes `moments.csv` and `entropy.csv`.
pub fn simulate(config: &Config, out_dir: &Path) -> Result<RunOutput, CliError> {
    require_system(config, System::Rotor, "simulate")?;
    let mut out = RunOutput::create(out_dir, "simulate", config)?;
    let partition = config.bipartition()?;
    if partition.is_none() {
        out.warn("single rotor: entropy.csv is not written");
    }
    let run = rotor_run(config, config.plan()?, config.engine.propagation, partition)?;
    let series = run_rotor(&run)?;
    growth_warnings(&mut out, &series, "");
    out.set_dims(&series.dims);
    out.write_moments("p", &series.moments)?;
    if !series.entropy.is_empty() {
        out.write_entropy(&series.entropy)?;
    }
    Ok(out)
}

#[derive(Serialize)]
struct ClassificationReport {
    eligibility: String,
    /// 1-based.
    shifted: Vec<usize>,
    interaction_class: String,
    interaction_regime: String,
    selection_rule_consistent: bool,
    rotors: Vec<RotorReport>,
}

#[derive(Serialize)]
struct RotorReport {
    rotor: usize,
    class: String,
    regime: String,
    coupling_class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<ParamsReport>,
}

#[derive(Serialize)]
struct ParamsReport {
    alpha_plus: f64,
    alpha_minus: f64,
    lambda_plus: f64,
    lambda_minus: f64,
    kappa: f64,
}

impl From<&RegimeReport> for ClassificationReport {
    fn from(r: &RegimeReport) -> Self {
        Self {
            eligibility: format!("{:?}", r.eligibility).to_lowercase(),
            shifted: r.shifted.iter().map(|j| j + 1).collect(),
            interaction_class: r.interaction_class.to_string(),
            interaction_regime: r.interaction_regime.to_string(),
            selection_rule_consistent: r.selection_rule.is_consistent(),
            rotors: r
                .rotors
                .iter()
                .map(|x| RotorReport {
                    rotor: x.rotor + 1,
                    class: x.class.to_string(),
                    regime: x.regime.to_string(),
                    coupling_class: x.coupling_class.to_string(),
                    params: None,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct EstimateReport {
    value: f64,
    std_error: f64,
}

impl From<resonance_core::predictor::Estimate> for EstimateReport {
    fn from(e: resonance_core::predictor::Estimate) -> Self {
        Self {
            value: e.value,
            std_error: e.std_error,
        }
    }
}

#[derive(Serialize)]
struct EpsilonReport {
    samples: usize,
    seed: u64,
    mean_plus: EstimateReport,
    mean_minus: EstimateReport,
    plus_sq: EstimateReport,
    minus_sq: EstimateReport,
    cross: EstimateReport,
    total_sq: EstimateReport,
    norm: f64,
    s_odd: EstimateReport,
    crossover_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_plus_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_minus_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_cross: Option<f64>,
}

#[derive(Serialize)]
struct PredictReport {
    run_id: String,
    classification: ClassificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<EpsilonReport>,
}

/// Classification only.
pub fn classify(config: &Config, out_dir: &Path) -> Result<RunOutput, CliError> {
    require_system(config, System::Rotor, "classify")?;
    let part = config
        .bipartition()?
        .ok_or_else(|| CliError::Validation("resonance: classification needs at least two rotors".into()))?;
    let report = classify_regimes(&config.potential_spec()?, &config.plan()?, &part)?;
    let mut out = RunOutput::create(out_dir, "classify", config)?;
    #[derive(Serialize)]
    struct Doc {
        run_id: String,
        classification: ClassificationReport,
    }
    let doc = Doc {
        run_id: out.run_id().to_string(),
        classification: (&report).into(),
    };
    out.write_toml("report.toml", &doc)?;
    Ok(out)
}

/// Closed-form laws: regimes, wavepacket parameters, ε-moments and predicted curves.
pub fn predict(config: &Config, out_dir: &Path) -> Result<RunOutput, CliError> {
    require_system(config, System::Rotor, "predict")?;
    let mut out = RunOutput::create(out_dir, "predict", config)?;
    let v = config.potential_spec()?;
    let plan = config.plan()?;
    let part = config
        .bipartition()?
        .ok_or_else(|| CliError::Validation("resonance: prediction needs at least two rotors".into()))?;
    let initial = config.initial_state();
    let regimes = classify_regimes(&v, &plan, &part)?;
    let mut classification = ClassificationReport::from(&regimes);
    let mut params = Vec::with_capacity(v.rotor_count());
    for (j, rotor) in classification.rotors.iter_mut().enumerate() {
        let p = wavepacket_params(&v, j, &regimes.shifted, &initial)?;
        rotor.params = Some(ParamsReport {
            alpha_plus: p.alpha_plus,
            alpha_minus: p.alpha_minus,
            lambda_plus: p.lambda_plus,
            lambda_minus: p.lambda_minus,
            kappa: p.kappa,
        });
        params.push(p);
    }

    let (_, _, coupling) = v.split_interaction(part.a())?;
    let samples = if coupling.is_empty() {
        out.warn("no coupling across the bipartition: the predicted entropy is identically zero");
        None
    } else {
        Some(EpsilonSamples::draw(
            &coupling,
            &regimes.shifted,
            &part,
            &initial,
            config.predictor.samples,
            config.predictor.seed,
        )?)
    };
    let epsilon = match &samples {
        Some(s) => {
            let m = s.moments();
            let t_star = crossover_time(&m).unwrap_or(f64::INFINITY);
            Some(EpsilonReport {
                samples: m.samples,
                seed: m.seed,
                mean_plus: m.mean_plus.into(),
                mean_minus: m.mean_minus.into(),
                plus_sq: m.plus_sq.into(),
                minus_sq: m.minus_sq.into(),
                cross: m.cross.into(),
                total_sq: m.total_sq.into(),
                norm: m.norm,
                s_odd: m.s_odd.into(),
                crossover_time: t_star,
                exact_plus_sq: m.exact.map(|e| e.plus_sq),
                exact_minus_sq: m.exact.map(|e| e.minus_sq),
                exact_cross: m.exact.map(|e| e.cross),
            })
        }
        None => None,
    };

    let n = v.rotor_count();
    let mut header = vec!["t".to_string()];
    for j in 1..=n {
        header.extend([format!("D_{j}"), format!("sigma2_{j}")]);
    }
    header.extend(["s_lin".to_string(), "s_lin_std_error".to_string()]);
    let rows: Vec<Vec<String>> = (0..=config.steps)
        .map(|t| {
            let mut row = vec![t.to_string()];
            for p in &params {
                let (d, s2) = p.predict(t);
                row.extend([fmt_f64(d), fmt_f64(s2)]);
            }
            let e = samples.as_ref().map(|s| s.slin(t));
            row.push(fmt_f64(e.map_or(0.0, |e| e.value)));
            row.push(fmt_f64(e.map_or(0.0, |e| e.std_error)));
            row
        })
        .collect();
    out.write_csv("predicted.csv", &header, &rows)?;
    let report = PredictReport {
        run_id: out.run_id().to_string(),
        classification,
        epsilon,
    };
    out.write_toml("report.toml", &report)?;
    Ok(out)
}

#[derive(Serialize)]
struct DetuneReport {
    run_id: String,
    threshold: f64,
    /// 1-based.
    rotor: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling: Option<LinearFit>,
    points: Vec<DetunePoint>,
}

#[derive(Serialize)]
struct DetunePoint {
    delta_tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    agreement_time: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    early_exponent: Option<f64>,
}

/// Ideal run against one detuned run per `detune.delta_tau`, in parallel.
pub fn detune_scan(config: &Config, out_dir: &Path) -> Result<RunOutput, CliError> {
    require_system(config, System::Rotor, "detune-scan")?;
    let mut out = RunOutput::create(out_dir, "detune-scan", config)?;
    let scan = config
        .detune
        .as_ref()
        .ok_or_else(|| CliError::Validation("detune: required by detune-scan".into()))?;
    let base = config.plan()?;
    if !base.is_exact() {
        return Err(CliError::Validation(
            "resonance: detune-scan takes exact resonances and applies detune.delta_tau itself".into(),
        ));
    }
    let n = base.rotor_count();
    let observed = scan.rotor - 1;
    let mut plans = vec![(0.0, base.clone())];
    for &d in &scan.delta_tau {
        plans.push((d, base.with_detuning(&vec![d; n])?));
    }
    let runs: Vec<(f64, RotorSeries)> = plans
        .into_par_iter()
        .map(|(d, plan)| {
            let propagation = if d == 0.0 { config.engine.propagation } else { Propagation::Generic };
            let run = rotor_run(config, plan, propagation, None)?;
            Ok((d, run_rotor(&run)?))
        })
        .collect::<Result<_, CliError>>()?;

    let ideal = runs[0].1.second_moments(observed);
    out.set_dims(&runs[0].1.dims);
    let mut delta_rows = Vec::new();
    let mut td_rows = Vec::new();
    let mut points = Vec::new();
    let mut pairs = Vec::new();
    for (k, (d, series)) in runs.iter().enumerate() {
        growth_warnings(&mut out, series, &if k == 0 { "ideal run: ".to_string() } else { format!("delta_tau = {d:e}: ") });
        if k == 0 {
            continue;
        }
        let r = RobustnessResult::analyse(*d, &series.second_moments(observed), &ideal, scan.threshold)?;
        for p in &r.deviations {
            delta_rows.push(vec![fmt_f64(*d), p.t.to_string(), fmt_f64(p.delta)]);
        }
        match r.agreement_time {
            Some(t) => pairs.push((*d, t)),
            None => out.warn(format!(
                "delta_tau = {d:e}: deviation stays below {} for all {} steps",
                scan.threshold, config.steps
            )),
        }
        let slope = r.early_exponent.as_ref().map(|f| f.slope);
        td_rows.push(vec![
            fmt_f64(*d),
            r.agreement_time.map_or("inf".to_string(), |t| t.to_string()),
            slope.map_or(String::new(), fmt_f64),
        ]);
        points.push(DetunePoint {
            delta_tau: *d,
            agreement_time: r.agreement_time,
            early_exponent: slope,
        });
    }
    out.write_csv("delta.csv", &["delta_tau", "t", "delta"].map(String::from), &delta_rows)?;
    out.write_csv("tD.csv", &["delta_tau", "t_D", "early_exponent"].map(String::from), &td_rows)?;
    let scaling = match scaling_fit(&pairs) {
        Ok(f) => Some(f),
        Err(_) if scan.delta_tau.len() < 3 => None,
        Err(e) => {
            out.warn(format!("no scaling fit: {e}"));
            None
        }
    };
    let report = DetuneReport {
        run_id: out.run_id().to_string(),
        threshold: scan.threshold,
        rotor: scan.rotor,
        scaling,
        points,
    };
    out.write_toml("report.toml", &report)?;
    Ok(out)
}

#[derive(Serialize)]
struct TopReport {
    run_id: String,
    spin: u32,
    /// 1-based.
    shifted: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interaction_class: Option<String>,
    tops: Vec<TopEntry>,
}

#[derive(Serialize)]
struct TopEntry {
    top: usize,
    class: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<ParamsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    saturation_time: Option<f64>,
}

/// Evolves the configured tops; writes moments, `J_x` moments, entropy and predictions.
pub fn top_simulate(config: &Config, out_dir: &Path) -> Result<RunOutput, CliError> {
    require_system(config, System::Top, "top-simulate")?;
    let mut out = RunOutput::create(out_dir, "top-simulate", config)?;
    let spec = config.top_spec()?;
    let n = spec.top_count();
    let engine = TopEngine::new(spec.clone(), config.engine.max_dimension)?;
    let momenta = match &config.initial {
        crate::config::InitialConfig::MomentumEigenstate { momenta } => momenta.clone(),
        crate::config::InitialConfig::Coherent { .. } => {
            return Err(CliError::Validation("initial.type: tops start from momentum_eigenstate".into()))
        }
    };
    let initial = engine.initial_state(&momenta)?;
    let partition = config.bipartition()?;
    let series = run_top(&engine, &initial, config.steps, partition.as_ref())?;

    out.set_dims(&vec![spec.dimension(); n]);
    out.write_moments("jz", &series.moments)?;
    let mut header = vec!["t".to_string()];
    for j in 1..=n {
        header.extend([format!("mean_jx{j}"), format!("jx2_{j}")]);
    }
    let rows: Vec<Vec<String>> = (0..=config.steps)
        .map(|t| {
            let mut row = vec![t.to_string()];
            for j in 0..n {
                row.extend([fmt_f64(series.jx_mean[t][j]), fmt_f64(series.jx_second[t][j])]);
            }
            row
        })
        .collect();
    out.write_csv("jx.csv", &header, &rows)?;
    if !series.entropy.is_empty() {
        out.write_entropy(&series.entropy)?;
    }

    let mut tops = Vec::with_capacity(n);
    let mut params = Vec::with_capacity(n);
    for j in 0..n {
        let entry = match engine.top_params(j, &initial) {
            Ok(p) => {
                params.push(Some(p));
                TopEntry {
                    top: j + 1,
                    class: p.class.to_string(),
                    params: Some(ParamsReport {
                        alpha_plus: p.alpha_plus,
                        alpha_minus: p.alpha_minus,
                        lambda_plus: p.lambda_plus,
                        lambda_minus: p.lambda_minus,
                        kappa: p.kappa,
                    }),
                    saturation_time: saturation_time(spec.spin(), p.lambda_plus).ok(),
                }
            }
            Err(e) => {
                out.warn(format!("top {}: no linearised prediction: {e}", j + 1));
                params.push(None);
                TopEntry {
                    top: j + 1,
                    class: spec.effective_class(j).to_string(),
                    params: None,
                    saturation_time: None,
                }
            }
        };
        tops.push(entry);
    }
    if params.iter().any(Option::is_some) {
        let mut header = vec!["t".to_string()];
        for j in 1..=n {
            header.extend([format!("D_{j}"), format!("sigma2_{j}")]);
        }
        let rows: Vec<Vec<String>> = (0..=config.steps)
            .map(|t| {
                let mut row = vec![t.to_string()];
                for p in &params {
                    match p {
                        Some(p) => {
                            let (d, s2) = p.predict(t);
                            row.extend([fmt_f64(d), fmt_f64(s2)]);
                        }
                        None => row.extend([String::new(), String::new()]),
                    }
                }
                row
            })
            .collect();
        out.write_csv("predicted.csv", &header, &rows)?;
    }
    let report = TopReport {
        run_id: out.run_id().to_string(),
        spin: spec.spin(),
        shifted: spec.shifted().iter().map(|j| j + 1).collect(),
        interaction_class: partition.as_ref().map(|p| spec.interaction_class(p).to_string()),
        tops,
    };
    out.write_toml("report.toml", &report)?;
    Ok(out)
}
