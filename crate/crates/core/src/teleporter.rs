//! The teleportation protocol chain: Alice's joint measurement of the input
//! with one entangled beam, the classical channel with independent
//! quadrature gains, and Bob's reconstruction on the second entangled beam,
//! plus a closed-form oracle for the output statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{FieldMode, LinearForm, NoiseBasis, SourceKind};
use crate::optics::{self, EprPair, SqueezerSpec};

/// The state handed to the teleporter: Gaussian noise plus coherent
/// amplitudes on both quadratures.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputState {
    #[serde(default = "one")]
    pub v_plus: f64,
    #[serde(default = "one")]
    pub v_minus: f64,
    #[serde(default)]
    pub alpha_plus: f64,
    #[serde(default)]
    pub alpha_minus: f64,
}

impl InputState {
    pub fn coherent(alpha_plus: f64, alpha_minus: f64) -> Self {
        InputState {
            v_plus: 1.0,
            v_minus: 1.0,
            alpha_plus,
            alpha_minus,
        }
    }
}

/// How Bob couples his displacement onto the second entangled beam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobCoupling {
    /// Lossless, perfectly transmitting displacement.
    IdealDisplacement,
    /// Displacement beam tapped in through a 98% transmitting beamsplitter;
    /// the entangled beam sees 2% loss and 2% of the displacement beam's
    /// vacuum noise enters.
    Tapped98_2,
}

fn one() -> f64 {
    1.0
}
fn default_coupling() -> BobCoupling {
    BobCoupling::IdealDisplacement
}

/// All physical parameters of one teleportation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeleporterConfig {
    pub opa1: SqueezerSpec,
    pub opa2: SqueezerSpec,
    /// Per-beam efficiency of the post-entanglement optics.
    #[serde(default = "one")]
    pub eta_entanglement: f64,
    /// Optional separate efficiency for Bob's beam; defaults to
    /// `eta_entanglement`.
    #[serde(default)]
    pub eta_entanglement_b: Option<f64>,
    /// Detection efficiency of Alice's measurement.
    #[serde(default = "one")]
    pub eta_alice: f64,
    /// Additive electronic variance on each of Alice's photocurrents, in
    /// shot-noise units, entering after efficiency scaling.
    #[serde(default)]
    pub dark_noise_alice: f64,
    #[serde(default = "one")]
    pub gain_plus: f64,
    #[serde(default = "one")]
    pub gain_minus: f64,
    #[serde(default = "default_coupling")]
    pub bob_coupling: BobCoupling,
    pub input: InputState,
    /// Efficiency of Victor's verification homodyne; measured variances are
    /// corrected back through this (see `metrics::victor_correct`).
    #[serde(default = "one")]
    pub eta_victor: f64,
}

impl TeleporterConfig {
    /// Vacuum entanglement resources: the classical teleporter.
    pub fn classical(input: InputState) -> Self {
        TeleporterConfig {
            opa1: SqueezerSpec::vacuum(),
            opa2: SqueezerSpec::vacuum(),
            eta_entanglement: 1.0,
            eta_entanglement_b: None,
            eta_alice: 1.0,
            dark_noise_alice: 0.0,
            gain_plus: 1.0,
            gain_minus: 1.0,
            bob_coupling: BobCoupling::IdealDisplacement,
            input,
            eta_victor: 1.0,
        }
    }

    /// Ideal chain fed by two identical minimum-uncertainty squeezers.
    pub fn with_pure_squeezing(v_squeezed: f64, input: InputState) -> Result<Self> {
        let spec = SqueezerSpec::pure(v_squeezed)?;
        Ok(TeleporterConfig {
            opa1: spec,
            opa2: spec,
            ..TeleporterConfig::classical(input)
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.opa1.validate()?;
        self.opa2.validate()?;
        for (name, eta) in [
            ("eta_entanglement", self.eta_entanglement),
            (
                "eta_entanglement_b",
                self.eta_entanglement_b.unwrap_or(self.eta_entanglement),
            ),
            ("eta_alice", self.eta_alice),
            ("eta_victor", self.eta_victor),
        ] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::Domain(format!(
                    "{name} must lie in [0, 1], got {eta}"
                )));
            }
        }
        if self.eta_alice == 0.0 {
            return Err(Error::Domain("eta_alice must be positive".into()));
        }
        if !(self.dark_noise_alice >= 0.0) {
            return Err(Error::Domain(format!(
                "dark_noise_alice must be >= 0, got {}",
                self.dark_noise_alice
            )));
        }
        if !self.gain_plus.is_finite() || !self.gain_minus.is_finite() {
            return Err(Error::Domain("gains must be finite".into()));
        }
        if !(self.input.v_plus > 0.0) || !(self.input.v_minus > 0.0) {
            return Err(Error::Domain("input variances must be positive".into()));
        }
        if self.input.v_plus * self.input.v_minus < 1.0 - 1e-3 {
            return Err(Error::Domain(format!(
                "input state violates the uncertainty product: {} * {} < 1",
                self.input.v_plus, self.input.v_minus
            )));
        }
        if !self.input.alpha_plus.is_finite() || !self.input.alpha_minus.is_finite() {
            return Err(Error::Domain("input amplitudes must be finite".into()));
        }
        Ok(())
    }

    fn eta_beam_b(&self) -> f64 {
        self.eta_entanglement_b.unwrap_or(self.eta_entanglement)
    }
}

/// A classical photocurrent record from Alice's measurement.
#[derive(Debug, Clone)]
pub struct Photocurrent {
    form: LinearForm,
}

impl Photocurrent {
    pub fn form(&self) -> &LinearForm {
        &self.form
    }
}

/// Everything produced by one run of the protocol chain.
#[derive(Debug)]
pub struct TeleportOutcome {
    pub output: FieldMode,
    pub input: FieldMode,
    pub photocurrent_plus: Photocurrent,
    pub photocurrent_minus: Photocurrent,
    pub basis: NoiseBasis,
}

impl TeleportOutcome {
    pub fn output_variances(&self) -> Result<(f64, f64)> {
        self.output.variances(&self.basis)
    }

    pub fn input_variances(&self) -> Result<(f64, f64)> {
        self.input.variances(&self.basis)
    }
}

/// Alice's joint measurement: the input is mixed with entangled beam `a` on
/// a 50/50 beamsplitter and the photocurrent sum (difference) reads out the
/// amplitude (phase) quadrature of the combination.
///
/// Returns classical records proportional to
/// `sqrt(eta) (X+_in + X+_a) + e+` and `sqrt(eta) (X-_in - X-_a) + e-`,
/// where `e+-` are independent electronic variables of variance `dark`.
pub fn alice_measure(
    input: &FieldMode,
    beam_a: &FieldMode,
    eta_alice: f64,
    dark: f64,
    basis: &mut NoiseBasis,
) -> Result<(Photocurrent, Photocurrent)> {
    if input.classical || beam_a.classical {
        return Err(Error::Usage(
            "alice_measure requires optical input and entangled modes".into(),
        ));
    }
    if !(0.0 < eta_alice && eta_alice <= 1.0) {
        return Err(Error::Domain(format!(
            "eta_alice must lie in (0, 1], got {eta_alice}"
        )));
    }
    let scale = eta_alice.sqrt();
    let e_plus_id = basis.register_electronic(dark)?;
    let e_minus_id = basis.register_electronic(dark)?;
    let e_plus = LinearForm::variable(basis, e_plus_id)?;
    let e_minus = LinearForm::variable(basis, e_minus_id)?;
    let m_plus = input
        .x_plus
        .combine(scale, &beam_a.x_plus, scale)?
        .combine(1.0, &e_plus, 1.0)?;
    let m_minus = input
        .x_minus
        .combine(scale, &beam_a.x_minus, -scale)?
        .combine(1.0, &e_minus, 1.0)?;
    Ok((
        Photocurrent { form: m_plus },
        Photocurrent { form: m_minus },
    ))
}

/// Per-quadrature noise penalty that Alice's measurement adds to the input:
/// the variances of entangled beam `a` plus dark noise referred through the
/// detection efficiency.  Their product is at least 1 for any physical
/// resource.
pub fn measurement_penalties(config: &TeleporterConfig) -> Result<(f64, f64)> {
    config.validate()?;
    let mut basis = NoiseBasis::new();
    let (beam_a, _) = entangled_beams(config, &mut basis)?;
    let (v_plus, v_minus) = beam_a.variances(&basis)?;
    let referred = config.dark_noise_alice / config.eta_alice;
    Ok((v_plus + referred, v_minus + referred))
}

/// Build the lossy entangled resource beams for a config.
pub fn entangled_beams(
    config: &TeleporterConfig,
    basis: &mut NoiseBasis,
) -> Result<(FieldMode, FieldMode)> {
    let pair = optics::epr_pair(basis, &config.opa1, &config.opa2)?;
    let beam_a = optics::loss(&pair.beam_a, config.eta_entanglement, basis)?;
    let beam_b = optics::loss(&pair.beam_b, config.eta_beam_b(), basis)?;
    Ok((beam_a, beam_b))
}

/// The lossy entangled pair as seen at the teleporter, for entanglement
/// diagnostics.
pub fn resource_pair(config: &TeleporterConfig, basis: &mut NoiseBasis) -> Result<EprPair> {
    let (beam_a, beam_b) = entangled_beams(config, basis)?;
    Ok(EprPair { beam_a, beam_b })
}

/// Bob's reconstruction: the photocurrents are referred back to input units
/// and fed forward onto entangled beam `b` so that the output coherent
/// amplitudes are exactly `g+- alpha_in+-`.
///
/// At unity gain the input-independent noise collapses onto the squeezed
/// EPR combinations.
#[allow(clippy::too_many_arguments)]
pub fn bob_reconstruct(
    beam_b: &FieldMode,
    m_plus: &Photocurrent,
    m_minus: &Photocurrent,
    g_plus: f64,
    g_minus: f64,
    coupling: BobCoupling,
    eta_alice: f64,
    basis: &mut NoiseBasis,
) -> Result<FieldMode> {
    if beam_b.classical {
        return Err(Error::Usage(
            "bob_reconstruct requires an optical entangled beam".into(),
        ));
    }
    if !(0.0 < eta_alice && eta_alice <= 1.0) {
        return Err(Error::Domain(format!(
            "eta_alice must lie in (0, 1], got {eta_alice}"
        )));
    }
    let beam = match coupling {
        BobCoupling::IdealDisplacement => beam_b.clone(),
        BobCoupling::Tapped98_2 => {
            // The entangled beam is 98% transmitted; 2% of the (quantum
            // noise limited) displacement beam's vacuum leaks in.  The
            // displacement amplitude itself is freely adjustable.
            let disp_vac = optics::vacuum_mode(basis)?;
            FieldMode::new(
                beam_b
                    .x_plus
                    .combine(0.98f64.sqrt(), &disp_vac.x_plus, 0.02f64.sqrt())?,
                beam_b
                    .x_minus
                    .combine(0.98f64.sqrt(), &disp_vac.x_minus, 0.02f64.sqrt())?,
            )
        }
    };
    let lambda_plus = g_plus / eta_alice.sqrt();
    let lambda_minus = g_minus / eta_alice.sqrt();
    let x_plus = m_plus.form().combine(lambda_plus, &beam.x_plus, -1.0)?;
    let x_minus = m_minus.form().combine(lambda_minus, &beam.x_minus, -1.0)?;
    Ok(FieldMode::new(x_plus, x_minus))
}

/// Run the whole protocol chain of the experiment for one configuration.
pub fn teleport(config: &TeleporterConfig) -> Result<TeleportOutcome> {
    config.validate()?;
    let mut basis = NoiseBasis::new();
    let (beam_a, beam_b) = entangled_beams(config, &mut basis)?;

    let kind = if config.input.v_plus == 1.0 && config.input.v_minus == 1.0 {
        SourceKind::Vacuum
    } else {
        SourceKind::Squeezed
    };
    let (p, m) = basis.register_source(config.input.v_plus, config.input.v_minus, kind)?;
    let input = optics::displace(
        &FieldMode::new(
            LinearForm::variable(&basis, p)?,
            LinearForm::variable(&basis, m)?,
        ),
        config.input.alpha_plus,
        config.input.alpha_minus,
    );

    let (m_plus, m_minus) = alice_measure(
        &input,
        &beam_a,
        config.eta_alice,
        config.dark_noise_alice,
        &mut basis,
    )?;
    let output = bob_reconstruct(
        &beam_b,
        &m_plus,
        &m_minus,
        config.gain_plus,
        config.gain_minus,
        config.bob_coupling,
        config.eta_alice,
        &mut basis,
    )?;
    Ok(TeleportOutcome {
        output,
        input,
        photocurrent_plus: m_plus,
        photocurrent_minus: m_minus,
        basis,
    })
}

/// Independent analytic oracle for the output variances of the chain.
///
/// Scope: ideal displacement coupling, zero dark noise, symmetric
/// post-entanglement loss.  With primes denoting post-loss variances
/// (`v' = eta v + 1 - eta`):
///
/// ```text
/// V_out+ = g+^2 V_in+ + (1+g+)^2/2 v_sq1' + (1-g+)^2/2 v_anti2'
/// V_out- = g-^2 V_in- + (1-g-)^2/2 v_anti1' + (1+g-)^2/2 v_sq2'
/// ```
pub fn closed_form_output_variances(config: &TeleporterConfig) -> Result<(f64, f64)> {
    config.validate()?;
    if config.bob_coupling != BobCoupling::IdealDisplacement {
        return Err(Error::OracleScope(
            "closed form covers ideal displacement coupling only".into(),
        ));
    }
    if config.dark_noise_alice != 0.0 {
        return Err(Error::OracleScope(
            "closed form covers zero dark noise only".into(),
        ));
    }
    if let Some(eta_b) = config.eta_entanglement_b {
        if eta_b != config.eta_entanglement {
            return Err(Error::OracleScope(
                "closed form covers symmetric post-entanglement loss only".into(),
            ));
        }
    }
    let eta = config.eta_entanglement;
    let prime = |v: f64| eta * v + (1.0 - eta);
    let (gp, gm) = (config.gain_plus, config.gain_minus);
    let v_plus = gp * gp * config.input.v_plus
        + (1.0 + gp) * (1.0 + gp) / 2.0 * prime(config.opa1.v_squeezed)
        + (1.0 - gp) * (1.0 - gp) / 2.0 * prime(config.opa2.v_antisqueezed);
    let v_minus = gm * gm * config.input.v_minus
        + (1.0 - gm) * (1.0 - gm) / 2.0 * prime(config.opa1.v_antisqueezed)
        + (1.0 + gm) * (1.0 + gm) / 2.0 * prime(config.opa2.v_squeezed);
    Ok((v_plus, v_minus))
}
