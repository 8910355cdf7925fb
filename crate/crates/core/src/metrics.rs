//! Figures of merit: fidelity with gain penalty, signal transfer T_q,
//! conditional-variance product V_q, reference limits and dB utilities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics;
use crate::teleporter::{self, TeleporterConfig};

const FLAG_TOL: f64 = 1e-9;

/// Fixed reference boundaries of the protocol.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReferenceLimits {
    /// Best average fidelity without entanglement at unity gain.
    pub classical_fidelity: f64,
    /// Above this fidelity Bob is guaranteed to hold the best copy.
    pub no_cloning_fidelity: f64,
    /// Output noise of the classical teleporter at unity gain, in dB above
    /// the shot-noise limit (variance 3).
    pub classical_noise_db: f64,
    /// Output noise at the no-cloning boundary, in dB above the shot-noise
    /// limit (variance 2).
    pub no_cloning_noise_db: f64,
    /// The (T_q, V_q) point where both criteria meet the no-cloning bound.
    pub tv_boundary: (f64, f64),
}

/// The constant reference record.
pub fn reference_limits() -> ReferenceLimits {
    ReferenceLimits {
        classical_fidelity: 0.5,
        no_cloning_fidelity: 2.0 / 3.0,
        classical_noise_db: 10.0 * 3f64.log10(),
        no_cloning_noise_db: 10.0 * 2f64.log10(),
        tv_boundary: (1.0, 1.0),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub k_plus: f64,
    pub k_minus: f64,
}

/// Gaussian-state fidelity between input and output,
/// `F = 2 exp(-(k+ + k-)) sqrt(Vin+ Vin- / ((Vin+ + Vout+)(Vin- + Vout-)))`
/// with gain penalties `k+- = alpha_in+-^2 (1 - g+-)^2 / (Vin+- + Vout+-)`.
pub fn fidelity(
    v_in: (f64, f64),
    v_out: (f64, f64),
    alpha_in: (f64, f64),
    gain: (f64, f64),
) -> Result<FidelityResult> {
    for v in [v_in.0, v_in.1, v_out.0, v_out.1] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "fidelity requires positive variances, got {v}"
            )));
        }
    }
    let k_plus = alpha_in.0 * alpha_in.0 * (1.0 - gain.0) * (1.0 - gain.0) / (v_in.0 + v_out.0);
    let k_minus = alpha_in.1 * alpha_in.1 * (1.0 - gain.1) * (1.0 - gain.1) / (v_in.1 + v_out.1);
    let fidelity = 2.0
        * (-(k_plus + k_minus)).exp()
        * (v_in.0 * v_in.1 / ((v_in.0 + v_out.0) * (v_in.1 + v_out.1))).sqrt();
    Ok(FidelityResult {
        fidelity,
        k_plus,
        k_minus,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct TransferResult {
    pub t_plus: f64,
    pub t_minus: f64,
    pub t_q: f64,
}

/// Quadrature signal transfer coefficients `T+- = SNR_out / SNR_in` in the
/// power convention `SNR = alpha^2 / V`, so `T+- = g+-^2 Vin+- / Vout+-`,
/// and the two-quadrature sum
/// `T_q = T+ + T- - T+ T- (1 - 1/(Vin+ Vin-))`.
pub fn transfer(
    v_in: (f64, f64),
    v_out: (f64, f64),
    alpha_in: (f64, f64),
    gain: (f64, f64),
) -> Result<TransferResult> {
    if alpha_in.0 == 0.0 || alpha_in.1 == 0.0 {
        return Err(Error::UndefinedTransfer(
            "signal transfer requires nonzero input amplitude on both quadratures".into(),
        ));
    }
    for v in [v_in.0, v_in.1, v_out.0, v_out.1] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!(
                "transfer requires positive variances, got {v}"
            )));
        }
    }
    let t_plus = gain.0 * gain.0 * v_in.0 / v_out.0;
    let t_minus = gain.1 * gain.1 * v_in.1 / v_out.1;
    let t_q = t_plus + t_minus - t_plus * t_minus * (1.0 - 1.0 / (v_in.0 * v_in.1));
    Ok(TransferResult {
        t_plus,
        t_minus,
        t_q,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ConditionalResult {
    pub v_cond_plus: f64,
    pub v_cond_minus: f64,
    /// Product form, the primary conditional measure.
    pub v_q: f64,
    /// Sum form, reported alongside; more sensitive to gain asymmetry.
    pub v_sum: f64,
}

/// Conditional variances `V+- = Vout+- - g+-^2 Vin+-` measuring the noise
/// added by the teleporter, their product `V_q` and sum.
pub fn conditional(v_in: (f64, f64), v_out: (f64, f64), gain: (f64, f64)) -> Result<ConditionalResult> {
    let v_cond_plus = v_out.0 - gain.0 * gain.0 * v_in.0;
    let v_cond_minus = v_out.1 - gain.1 * gain.1 * v_in.1;
    if v_cond_plus < -FLAG_TOL || v_cond_minus < -FLAG_TOL {
        return Err(Error::ModelViolation(format!(
            "negative conditional variance ({v_cond_plus}, {v_cond_minus}): \
             output variances are inconsistent with the linear model"
        )));
    }
    let v_cond_plus = v_cond_plus.max(0.0);
    let v_cond_minus = v_cond_minus.max(0.0);
    Ok(ConditionalResult {
        v_cond_plus,
        v_cond_minus,
        v_q: v_cond_plus * v_cond_minus,
        v_sum: v_cond_plus + v_cond_minus,
    })
}

/// Linear noise power for a level in dB above the shot-noise limit.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Variance for a squeezing level quoted as positive dB below the
/// shot-noise limit.
pub fn squeezing_db_to_variance(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// dB above the shot-noise limit for a linear variance.
pub fn linear_to_db(v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!(
            "cannot express non-positive variance {v} in dB"
        )));
    }
    Ok(10.0 * v.log10())
}

/// Squeezing in positive dB below the shot-noise limit for a variance.
pub fn variance_to_squeezing_db(v: f64) -> Result<f64> {
    Ok(-linear_to_db(v)?)
}

/// Undo the verification homodyne's loss: the inverse of
/// `v -> eta v + (1 - eta)`.
pub fn victor_correct(v_measured: f64, eta_victor: f64) -> Result<f64> {
    if !(0.0 < eta_victor && eta_victor <= 1.0) {
        return Err(Error::Domain(format!(
            "eta_victor must lie in (0, 1], got {eta_victor}"
        )));
    }
    let corrected = (v_measured - (1.0 - eta_victor)) / eta_victor;
    if corrected < 0.0 {
        return Err(Error::Domain(format!(
            "measured variance {v_measured} implies a negative true variance at eta {eta_victor}"
        )));
    }
    Ok(corrected)
}

/// Every figure of merit for one teleporter configuration, with reference
/// limits and pass/fail flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub fidelity: f64,
    pub k_plus: f64,
    pub k_minus: f64,
    pub t_plus: f64,
    pub t_minus: f64,
    pub t_q: f64,
    pub v_cond_plus: f64,
    pub v_cond_minus: f64,
    pub v_q: f64,
    pub v_cond_sum: f64,
    pub gain_plus: f64,
    pub gain_minus: f64,
    pub v_in_plus: f64,
    pub v_in_minus: f64,
    pub v_out_plus: f64,
    pub v_out_minus: f64,
    pub alpha_in_plus: f64,
    pub alpha_in_minus: f64,
    pub alpha_out_plus: f64,
    pub alpha_out_minus: f64,
    /// Duan inseparability of the lossy resource pair, when entanglement
    /// diagnostics apply.
    pub duan: Option<f64>,
    /// The fidelity formula assumes a pure Gaussian input; false flags a
    /// mixed input (`Vin+ Vin- > 1`) where fidelity is only indicative.
    pub input_minimum_uncertainty: bool,
    pub beats_classical: bool,
    pub beats_no_cloning: bool,
    pub t_q_above_one: bool,
    pub v_q_below_one: bool,
    pub limits: ReferenceLimits,
}

/// Run the chain for a configuration and evaluate all metrics.
pub fn evaluate(config: &TeleporterConfig) -> Result<MetricsReport> {
    let outcome = teleporter::teleport(config)?;
    let v_in = outcome.input_variances()?;
    let v_out = outcome.output_variances()?;
    let alpha_in = outcome.input.alphas();
    let alpha_out = outcome.output.alphas();
    let gain = (config.gain_plus, config.gain_minus);

    let fid = fidelity(v_in, v_out, alpha_in, gain)?;
    let tr = transfer(v_in, v_out, alpha_in, gain)?;
    let cond = conditional(v_in, v_out, gain)?;

    let mut duan_basis = crate::noise::NoiseBasis::new();
    let pair = teleporter::resource_pair(config, &mut duan_basis)?;
    let duan = optics::duan_inseparability(&pair, &duan_basis)?;

    let limits = reference_limits();
    Ok(MetricsReport {
        fidelity: fid.fidelity,
        k_plus: fid.k_plus,
        k_minus: fid.k_minus,
        t_plus: tr.t_plus,
        t_minus: tr.t_minus,
        t_q: tr.t_q,
        v_cond_plus: cond.v_cond_plus,
        v_cond_minus: cond.v_cond_minus,
        v_q: cond.v_q,
        v_cond_sum: cond.v_sum,
        gain_plus: gain.0,
        gain_minus: gain.1,
        v_in_plus: v_in.0,
        v_in_minus: v_in.1,
        v_out_plus: v_out.0,
        v_out_minus: v_out.1,
        alpha_in_plus: alpha_in.0,
        alpha_in_minus: alpha_in.1,
        alpha_out_plus: alpha_out.0,
        alpha_out_minus: alpha_out.1,
        duan: Some(duan),
        input_minimum_uncertainty: (v_in.0 * v_in.1 - 1.0).abs() <= 1e-6,
        beats_classical: fid.fidelity > limits.classical_fidelity + FLAG_TOL,
        beats_no_cloning: fid.fidelity > limits.no_cloning_fidelity + FLAG_TOL,
        t_q_above_one: tr.t_q > 1.0 + FLAG_TOL,
        v_q_below_one: cond.v_q < 1.0 - FLAG_TOL,
        limits,
    })
}
