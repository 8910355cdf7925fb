//! Command implementations.  Each builds a `CurveTable` from a validated
//! `RunConfig`; rendering and file output live in `main`.

use crate::config::{RunConfig, SweepConfig};
use crate::table::{Cell, CurveTable};

use cvteleport_core::{metrics, montecarlo, optics, teleporter};
use cvteleport_core::noise::NoiseBasis;
use cvteleport_core::teleporter::TeleporterConfig;
use cvteleport_core::{MetricsReport, Result, SqueezerSpec};

use rayon::prelude::*;

/// Spectrum-analyzer settings of the verification chain: traces centred
/// on the 8.4 MHz sideband, SNR read against the 8.35/8.45 MHz floor.
const SPECTRUM_CENTER: f64 = 8.4e6;
const SPECTRUM_SPAN: f64 = 0.2e6;
const SPECTRUM_RBW: f64 = 1.0e4;
const SPECTRUM_VBW: f64 = 30.0;
const SNR_OFFSETS: (f64, f64) = (8.35e6, 8.45e6);

fn base_table(columns: &[&str], config: &RunConfig, seed: Option<u64>) -> CurveTable {
    let mut table = CurveTable::new(columns);
    table.tag("config_sha256", config.sha256());
    table.tag("tool_version", env!("CARGO_PKG_VERSION"));
    if let Some(seed) = seed {
        table.tag("seed", seed);
    }
    table
}

fn push_metric(table: &mut CurveTable, key: &str, value: f64) {
    table.push(vec![Cell::from(key), Cell::from(value)]);
}

/// Single run: every figure of merit as a key/value table, with optional
/// Monte Carlo cross-checks of the output variances.
pub fn teleport(
    config: &RunConfig,
    samples: Option<usize>,
    seed: Option<u64>,
    oracle: bool,
) -> Result<CurveTable> {
    let mc = config.montecarlo.as_ref();
    let samples = samples.or(mc.map(|m| m.samples));
    let seed = seed.or(mc.map(|m| m.seed));
    let mut table = base_table(&["metric", "value"], config, seed.filter(|_| samples.is_some()));

    let report = metrics::evaluate(&config.teleporter)?;
    for (key, value) in scalar_metrics(&report) {
        push_metric(&mut table, key, value);
    }
    if let Some(duan) = report.duan {
        push_metric(&mut table, "duan", duan);
    }
    table.push(vec![
        "input_minimum_uncertainty".into(),
        flag(report.input_minimum_uncertainty),
    ]);
    table.push(vec!["beats_classical".into(), flag(report.beats_classical)]);
    table.push(vec![
        "beats_no_cloning".into(),
        flag(report.beats_no_cloning),
    ]);
    table.push(vec!["t_q_above_one".into(), flag(report.t_q_above_one)]);
    table.push(vec!["v_q_below_one".into(), flag(report.v_q_below_one)]);

    if let Some(n) = samples {
        let seed = seed.unwrap_or(0);
        let outcome = teleporter::teleport(&config.teleporter)?;
        let sp = montecarlo::sample(&outcome.output.x_plus, &outcome.basis, n, seed)?;
        let sm = montecarlo::sample(&outcome.output.x_minus, &outcome.basis, n, seed)?;
        let mp = montecarlo::estimate_moments(&sp)?;
        let mm = montecarlo::estimate_moments(&sm)?;
        push_metric(&mut table, "mc_samples", n as f64);
        push_metric(&mut table, "mc_v_out_plus", mp.variance);
        push_metric(&mut table, "mc_v_out_minus", mm.variance);
        push_metric(&mut table, "mc_mean_out_plus", mp.mean);
        push_metric(&mut table, "mc_mean_out_minus", mm.mean);
    }
    if oracle {
        let (op, om) = teleporter::closed_form_output_variances(&config.teleporter)?;
        push_metric(&mut table, "oracle_v_out_plus", op);
        push_metric(&mut table, "oracle_v_out_minus", om);
    }
    Ok(table)
}

fn flag(b: bool) -> Cell {
    Cell::Text(b.to_string())
}

fn scalar_metrics(r: &MetricsReport) -> Vec<(&'static str, f64)> {
    vec![
        ("fidelity", r.fidelity),
        ("k_plus", r.k_plus),
        ("k_minus", r.k_minus),
        ("t_plus", r.t_plus),
        ("t_minus", r.t_minus),
        ("t_q", r.t_q),
        ("v_cond_plus", r.v_cond_plus),
        ("v_cond_minus", r.v_cond_minus),
        ("v_q", r.v_q),
        ("v_cond_sum", r.v_cond_sum),
        ("gain_plus", r.gain_plus),
        ("gain_minus", r.gain_minus),
        ("v_in_plus", r.v_in_plus),
        ("v_in_minus", r.v_in_minus),
        ("v_out_plus", r.v_out_plus),
        ("v_out_minus", r.v_out_minus),
        ("alpha_in_plus", r.alpha_in_plus),
        ("alpha_in_minus", r.alpha_in_minus),
        ("alpha_out_plus", r.alpha_out_plus),
        ("alpha_out_minus", r.alpha_out_minus),
        ("fidelity_classical_limit", r.limits.classical_fidelity),
        ("fidelity_no_cloning_limit", r.limits.no_cloning_fidelity),
    ]
}

fn sweep_gains(sweep: &SweepConfig) -> Vec<(f64, f64)> {
    let steps = sweep.steps.max(1);
    (0..=steps)
        .map(|i| {
            let g = sweep.start + (sweep.stop - sweep.start) * i as f64 / steps as f64;
            (g, g * sweep.gain_ratio)
        })
        .collect()
}

/// Gain sweep at fixed resources: fidelity and T-V metrics along the
/// `gain_minus = ratio * gain_plus` line.
pub fn sweep_gain(config: &RunConfig) -> Result<CurveTable> {
    let sweep = config.sweep.clone().unwrap_or_default();
    let mut table = base_table(
        &[
            "gain_plus",
            "gain_minus",
            "fidelity",
            "t_q",
            "v_q",
            "v_out_plus",
            "v_out_minus",
        ],
        config,
        None,
    );
    let reports: Vec<Result<(f64, f64, MetricsReport)>> = sweep_gains(&sweep)
        .into_par_iter()
        .map(|(gp, gm)| {
            let run = TeleporterConfig {
                gain_plus: gp,
                gain_minus: gm,
                ..config.teleporter.clone()
            };
            metrics::evaluate(&run).map(|r| (gp, gm, r))
        })
        .collect();
    for entry in reports {
        let (gp, gm, r) = entry?;
        table.push(vec![
            gp.into(),
            gm.into(),
            r.fidelity.into(),
            r.t_q.into(),
            r.v_q.into(),
            r.v_out_plus.into(),
            r.v_out_minus.into(),
        ]);
    }
    Ok(table)
}

/// T-V diagram curves: the classical (vacuum-resource) gain trajectory,
/// the unity-gain trajectory over squeezing strength, and the configured
/// experiment's own gain trajectory.
pub fn tv_map(config: &RunConfig) -> Result<CurveTable> {
    let sweep = config.sweep.clone().unwrap_or_default();
    let mut table = base_table(
        &["family", "parameter", "gain_plus", "gain_minus", "t_q", "v_q"],
        config,
        None,
    );

    let families: Vec<(&str, Vec<(f64, TeleporterConfig)>)> = vec![
        (
            "classical_limit",
            sweep_gains(&sweep)
                .into_iter()
                .map(|(gp, gm)| {
                    (
                        gp,
                        TeleporterConfig {
                            gain_plus: gp,
                            gain_minus: gm,
                            ..TeleporterConfig::classical(config.teleporter.input)
                        },
                    )
                })
                .collect(),
        ),
        (
            "unity_gain",
            (0..=sweep.steps.max(1))
                .map(|i| {
                    // Squeezed variance from 1 (vacuum) down to strong
                    // squeezing, log-spaced.
                    let v = 10f64.powf(-2.0 * i as f64 / sweep.steps.max(1) as f64);
                    (
                        v,
                        TeleporterConfig {
                            opa1: SqueezerSpec::pure(v).expect("in-range by construction"),
                            opa2: SqueezerSpec::pure(v).expect("in-range by construction"),
                            ..TeleporterConfig::classical(config.teleporter.input)
                        },
                    )
                })
                .collect(),
        ),
        (
            "experiment",
            sweep_gains(&sweep)
                .into_iter()
                .map(|(gp, gm)| {
                    (
                        gp,
                        TeleporterConfig {
                            gain_plus: gp,
                            gain_minus: gm,
                            ..config.teleporter.clone()
                        },
                    )
                })
                .collect(),
        ),
    ];

    for (family, runs) in families {
        let reports: Vec<Result<(f64, MetricsReport)>> = runs
            .into_par_iter()
            .map(|(param, run)| metrics::evaluate(&run).map(|r| (param, r)))
            .collect();
        for entry in reports {
            let (param, r) = entry?;
            table.push(vec![
                family.into(),
                param.into(),
                r.gain_plus.into(),
                r.gain_minus.into(),
                r.t_q.into(),
                r.v_q.into(),
            ]);
        }
    }
    Ok(table)
}

/// Entanglement diagnostics of the resource pair: inseparability,
/// per-beam variances, and the squeezer strength inferred by undoing the
/// verification and propagation losses.
pub fn duan(config: &RunConfig) -> Result<CurveTable> {
    let tele = &config.teleporter;
    tele.validate()?;
    let mut table = base_table(&["metric", "value"], config, None);
    let mut basis = NoiseBasis::new();
    let pair = teleporter::resource_pair(tele, &mut basis)?;
    let duan = optics::duan_inseparability(&pair, &basis)?;
    let (va_p, va_m) = pair.beam_a.variances(&basis)?;
    let (vb_p, vb_m) = pair.beam_b.variances(&basis)?;

    push_metric(&mut table, "duan_inseparability", duan);
    push_metric(&mut table, "beam_a_v_plus", va_p);
    push_metric(&mut table, "beam_a_v_minus", va_m);
    push_metric(&mut table, "beam_b_v_plus", vb_p);
    push_metric(&mut table, "beam_b_v_minus", vb_m);

    // What a lossy verification homodyne would register, and the chain
    // inverted: first undo Victor's efficiency, then the propagation loss,
    // to recover the squeezer's own variance.
    let observed = tele.eta_victor * duan + (1.0 - tele.eta_victor);
    push_metric(&mut table, "observed_by_victor", observed);
    let at_teleporter = metrics::victor_correct(observed, tele.eta_victor)?;
    let inferred = metrics::victor_correct(at_teleporter, tele.eta_entanglement)?;
    push_metric(&mut table, "inferred_source_variance", inferred);
    push_metric(
        &mut table,
        "inferred_source_squeezing_db",
        metrics::variance_to_squeezing_db(inferred)?,
    );
    Ok(table)
}

/// Verification spectra: synthesized analyzer traces for the input and
/// output quadratures, with flat classical and no-cloning reference
/// levels, plus per-trace SNR in the provenance header.
pub fn spectrum(config: &RunConfig, seed: Option<u64>) -> Result<CurveTable> {
    let seed = seed
        .or(config.montecarlo.as_ref().map(|m| m.seed))
        .unwrap_or(0);
    let mut table = base_table(&["trace", "frequency_hz", "power_db"], config, Some(seed));

    let outcome = teleporter::teleport(&config.teleporter)?;
    let (vi_p, vi_m) = outcome.input_variances()?;
    let (vo_p, vo_m) = outcome.output_variances()?;
    let (ai_p, ai_m) = outcome.input.alphas();
    let (ao_p, ao_m) = outcome.output.alphas();

    let traces = [
        ("input_plus", vi_p, ai_p, seed),
        ("input_minus", vi_m, ai_m, seed.wrapping_add(1)),
        ("output_plus", vo_p, ao_p, seed.wrapping_add(2)),
        ("output_minus", vo_m, ao_m, seed.wrapping_add(3)),
    ];
    for (name, variance, alpha, trace_seed) in traces {
        let trace = montecarlo::synthesize_spectrum(
            variance,
            alpha,
            SPECTRUM_CENTER,
            SPECTRUM_SPAN,
            SPECTRUM_RBW,
            SPECTRUM_VBW,
            trace_seed,
        )?;
        let snr = montecarlo::extract_snr(&trace, SPECTRUM_CENTER, SNR_OFFSETS)?;
        table.tag(&format!("snr_{name}"), format!("{snr}"));
        for (f, p) in trace.frequencies.iter().zip(&trace.power_db) {
            table.push(vec![name.into(), (*f).into(), (*p).into()]);
        }
    }

    // Flat reference levels in the same grid so plots can overlay them.
    let limits = metrics::reference_limits();
    let classical_db = metrics::linear_to_db(3.0)?;
    let no_cloning_db = metrics::linear_to_db(2.0)?;
    debug_assert!((classical_db - limits.classical_noise_db).abs() < 1e-12);
    debug_assert!((no_cloning_db - limits.no_cloning_noise_db).abs() < 1e-12);
    let n = 501;
    for i in 0..n {
        let f = SPECTRUM_CENTER - SPECTRUM_SPAN / 2.0
            + SPECTRUM_SPAN * i as f64 / (n - 1) as f64;
        table.push(vec!["classical_limit".into(), f.into(), classical_db.into()]);
    }
    for i in 0..n {
        let f = SPECTRUM_CENTER - SPECTRUM_SPAN / 2.0
            + SPECTRUM_SPAN * i as f64 / (n - 1) as f64;
        table.push(vec![
            "no_cloning_limit".into(),
            f.into(),
            no_cloning_db.into(),
        ]);
    }
    Ok(table)
}
