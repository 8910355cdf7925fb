//! Optical component library: squeezers, beamsplitters, phase shifts, loss
//! channels, EPR pair construction and the Duan inseparability diagnostic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{FieldMode, LinearForm, NoiseBasis, SourceKind};

// Loose enough to admit variances quoted as rounded dB figures.
const SPEC_TOL: f64 = 1e-3;

/// Which quadrature of a squeezed source sits below the shot-noise limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    AmplitudeSqueezed,
    PhaseSqueezed,
}

/// Output of one OPA, described purely by its quadrature variances in
/// shot-noise units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezerSpec {
    pub v_squeezed: f64,
    pub v_antisqueezed: f64,
    #[serde(default = "default_orientation")]
    pub orientation: Orientation,
}

fn default_orientation() -> Orientation {
    Orientation::AmplitudeSqueezed
}

impl SqueezerSpec {
    pub fn new(v_squeezed: f64, v_antisqueezed: f64, orientation: Orientation) -> Result<Self> {
        let spec = SqueezerSpec {
            v_squeezed,
            v_antisqueezed,
            orientation,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A minimum-uncertainty squeezer: the antisqueezed variance is the
    /// reciprocal of the squeezed one.
    pub fn pure(v_squeezed: f64) -> Result<Self> {
        if !(v_squeezed > 0.0) {
            return Err(Error::Domain(format!(
                "squeezed variance must be positive, got {v_squeezed}"
            )));
        }
        Self::new(
            v_squeezed,
            1.0 / v_squeezed,
            Orientation::AmplitudeSqueezed,
        )
    }

    /// The trivial squeezer: both quadratures at the shot-noise limit.
    pub fn vacuum() -> Self {
        SqueezerSpec {
            v_squeezed: 1.0,
            v_antisqueezed: 1.0,
            orientation: Orientation::AmplitudeSqueezed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_squeezed > 0.0) || !self.v_antisqueezed.is_finite() {
            return Err(Error::Domain(format!(
                "squeezer variances must be positive finite, got ({}, {})",
                self.v_squeezed, self.v_antisqueezed
            )));
        }
        if self.v_squeezed > 1.0 + SPEC_TOL || self.v_antisqueezed < 1.0 - SPEC_TOL {
            return Err(Error::Domain(format!(
                "squeezer requires v_squeezed <= 1 <= v_antisqueezed, got ({}, {})",
                self.v_squeezed, self.v_antisqueezed
            )));
        }
        if self.v_squeezed * self.v_antisqueezed < 1.0 - SPEC_TOL {
            return Err(Error::Domain(format!(
                "squeezer violates the uncertainty product: {} * {} < 1",
                self.v_squeezed, self.v_antisqueezed
            )));
        }
        Ok(())
    }
}

/// Two beams with quadrature correlations below vacuum.
#[derive(Debug, Clone)]
pub struct EprPair {
    pub beam_a: FieldMode,
    pub beam_b: FieldMode,
}

/// A fresh mode at the shot-noise limit on both quadratures.
pub fn vacuum_mode(basis: &mut NoiseBasis) -> Result<FieldMode> {
    let (p, m) = basis.register_source(1.0, 1.0, SourceKind::Vacuum)?;
    Ok(FieldMode::new(
        LinearForm::variable(basis, p)?,
        LinearForm::variable(basis, m)?,
    ))
}

/// A mode with one quadrature below and the conjugate above the shot-noise
/// limit, per `spec`.
pub fn squeezed_mode(basis: &mut NoiseBasis, spec: &SqueezerSpec) -> Result<FieldMode> {
    spec.validate()?;
    let (v_plus, v_minus) = match spec.orientation {
        Orientation::AmplitudeSqueezed => (spec.v_squeezed, spec.v_antisqueezed),
        Orientation::PhaseSqueezed => (spec.v_antisqueezed, spec.v_squeezed),
    };
    let kind = if v_plus == 1.0 && v_minus == 1.0 {
        SourceKind::Vacuum
    } else {
        SourceKind::Squeezed
    };
    let (p, m) = basis.register_source(v_plus, v_minus, kind)?;
    Ok(FieldMode::new(
        LinearForm::variable(basis, p)?,
        LinearForm::variable(basis, m)?,
    ))
}

fn require_optical(m: &FieldMode, what: &str) -> Result<()> {
    if m.classical {
        return Err(Error::Usage(format!(
            "{what} requires an optical (non-classical) mode"
        )));
    }
    Ok(())
}

/// Two-port beamsplitter with power transmittance `t`, real orthogonal
/// convention: `out1 = sqrt(T) m1 + sqrt(1-T) m2`,
/// `out2 = -sqrt(1-T) m1 + sqrt(T) m2`.
pub fn beamsplitter(m1: &FieldMode, m2: &FieldMode, t: f64) -> Result<(FieldMode, FieldMode)> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "beamsplitter transmittance must lie in [0, 1], got {t}"
        )));
    }
    require_optical(m1, "beamsplitter")?;
    require_optical(m2, "beamsplitter")?;
    let (ct, cr) = (t.sqrt(), (1.0 - t).sqrt());
    let out1 = FieldMode::new(
        m1.x_plus.combine(ct, &m2.x_plus, cr)?,
        m1.x_minus.combine(ct, &m2.x_minus, cr)?,
    );
    let out2 = FieldMode::new(
        m1.x_plus.combine(-cr, &m2.x_plus, ct)?,
        m1.x_minus.combine(-cr, &m2.x_minus, ct)?,
    );
    Ok((out1, out2))
}

/// Quadrature rotation: `X+ -> cos t X+ - sin t X-`,
/// `X- -> sin t X+ + cos t X-`.  Offsets rotate along with the noise.
pub fn phase_shift(m: &FieldMode, theta: f64) -> Result<FieldMode> {
    require_optical(m, "phase_shift")?;
    let (c, s) = (theta.cos(), theta.sin());
    Ok(FieldMode::new(
        m.x_plus.combine(c, &m.x_minus, -s)?,
        m.x_plus.combine(s, &m.x_minus, c)?,
    ))
}

/// Loss channel with efficiency `eta`: each quadrature becomes
/// `sqrt(eta) X + sqrt(1-eta) X_vac` with a fresh vacuum ancilla, so
/// `V' = eta V + (1 - eta)` and offsets scale by `sqrt(eta)`.
pub fn loss(m: &FieldMode, eta: f64, basis: &mut NoiseBasis) -> Result<FieldMode> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!(
            "loss efficiency must lie in [0, 1], got {eta}"
        )));
    }
    require_optical(m, "loss")?;
    let vac = vacuum_mode(basis)?;
    let (ct, cr) = (eta.sqrt(), (1.0 - eta).sqrt());
    Ok(FieldMode::new(
        m.x_plus.combine(ct, &vac.x_plus, cr)?,
        m.x_minus.combine(ct, &vac.x_minus, cr)?,
    ))
}

/// Set the coherent amplitudes of a mode; the noise is untouched.
pub fn displace(m: &FieldMode, alpha_plus: f64, alpha_minus: f64) -> FieldMode {
    FieldMode {
        x_plus: m.x_plus.with_offset(2.0 * alpha_plus),
        x_minus: m.x_minus.with_offset(2.0 * alpha_minus),
        classical: m.classical,
    }
}

/// Build an entangled pair by interfering two amplitude-squeezed beams with
/// a quarter-wave phase shift on a 50/50 beamsplitter.
///
/// The outputs satisfy `X+_a - X+_b = sqrt(2) X+_1` and
/// `X-_a + X-_b = sqrt(2) X+_2`, so both joint combinations carry the
/// squeezed variances of the two sources.
pub fn epr_pair(
    basis: &mut NoiseBasis,
    opa1: &SqueezerSpec,
    opa2: &SqueezerSpec,
) -> Result<EprPair> {
    if opa1.orientation != Orientation::AmplitudeSqueezed
        || opa2.orientation != Orientation::AmplitudeSqueezed
    {
        return Err(Error::Usage(
            "epr_pair expects two amplitude-squeezed sources".into(),
        ));
    }
    let m1 = squeezed_mode(basis, opa1)?;
    let m2 = squeezed_mode(basis, opa2)?;
    let m2_rot = phase_shift(&m2, std::f64::consts::FRAC_PI_2)?;
    // Sign convention: beam_a = (m1 + i m2)/sqrt(2), beam_b = (-m1 + i m2)/sqrt(2),
    // so that the X+ difference and X- sum are the squeezed combinations.
    let (beam_a, beam_b) = beamsplitter(&m1, &m2_rot, 0.5)?;
    Ok(EprPair { beam_a, beam_b })
}

/// Duan inseparability of a pair, normalized so that two coherent beams give
/// exactly 1: `(V(X+_a - X+_b) + V(X-_a + X-_b)) / 4`.
///
/// For the symmetric construction of [`epr_pair`] this equals the average of
/// the two squeezed variances.
pub fn duan_inseparability(pair: &EprPair, basis: &NoiseBasis) -> Result<f64> {
    let diff_plus = pair.beam_a.x_plus.combine(1.0, &pair.beam_b.x_plus, -1.0)?;
    let sum_minus = pair.beam_a.x_minus.combine(1.0, &pair.beam_b.x_minus, 1.0)?;
    Ok((basis.variance(&diff_plus)? + basis.variance(&sum_minus)?) / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn vacuum_mode_is_shot_noise_limited() {
        let mut basis = NoiseBasis::new();
        let m = vacuum_mode(&mut basis).unwrap();
        assert_eq!(m.variances(&basis).unwrap(), (1.0, 1.0));
        assert_eq!(m.alphas(), (0.0, 0.0));
        let m2 = vacuum_mode(&mut basis).unwrap();
        assert_eq!(basis.covariance(&m.x_plus, &m2.x_plus).unwrap(), 0.0);
    }

    #[test]
    fn squeezed_mode_orientations() {
        let mut basis = NoiseBasis::new();
        let amp = squeezed_mode(
            &mut basis,
            &SqueezerSpec::new(0.3311, 3.020, Orientation::AmplitudeSqueezed).unwrap(),
        )
        .unwrap();
        let (vp, vm) = amp.variances(&basis).unwrap();
        assert_relative_eq!(vp, 0.3311, max_relative = 1e-12);
        assert_relative_eq!(vm, 3.020, max_relative = 1e-12);

        let ph = squeezed_mode(
            &mut basis,
            &SqueezerSpec::new(0.4365, 2.291, Orientation::PhaseSqueezed).unwrap(),
        )
        .unwrap();
        let (vp, vm) = ph.variances(&basis).unwrap();
        assert_relative_eq!(vp, 2.291, max_relative = 1e-12);
        assert_relative_eq!(vm, 0.4365, max_relative = 1e-12);
    }

    #[test]
    fn trivial_squeezer_is_vacuum() {
        let mut basis = NoiseBasis::new();
        let m = squeezed_mode(&mut basis, &SqueezerSpec::vacuum()).unwrap();
        assert_eq!(m.variances(&basis).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn invalid_squeezer_rejected() {
        assert!(SqueezerSpec::new(0.44, 0.44, Orientation::AmplitudeSqueezed).is_err());
        assert!(SqueezerSpec::new(1.5, 2.0, Orientation::AmplitudeSqueezed).is_err());
    }

    #[test]
    fn beamsplitter_identity_and_vacuum_invariance() {
        let mut basis = NoiseBasis::new();
        let m1 = vacuum_mode(&mut basis).unwrap();
        let m2 = vacuum_mode(&mut basis).unwrap();
        let (a, b) = beamsplitter(&m1, &m2, 1.0).unwrap();
        assert_eq!(a.x_plus, m1.x_plus);
        assert_eq!(b.x_plus, m2.x_plus);
        for t in [0.5, 0.98] {
            let (a, b) = beamsplitter(&m1, &m2, t).unwrap();
            assert_relative_eq!(basis.variance(&a.x_plus).unwrap(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(basis.variance(&b.x_minus).unwrap(), 1.0, epsilon = 1e-12);
        }
        assert!(beamsplitter(&m1, &m2, 1.5).is_err());
    }

    #[test]
    fn phase_shift_swaps_squeezed_quadratures() {
        let mut basis = NoiseBasis::new();
        let spec = SqueezerSpec::pure(0.25).unwrap();
        let m = squeezed_mode(&mut basis, &spec).unwrap();
        let r = phase_shift(&m, std::f64::consts::FRAC_PI_2).unwrap();
        let (vp, vm) = r.variances(&basis).unwrap();
        assert_relative_eq!(vp, 4.0, max_relative = 1e-12);
        assert_relative_eq!(vm, 0.25, max_relative = 1e-12);

        let id = phase_shift(&m, 0.0).unwrap();
        assert_eq!(id.x_plus, m.x_plus);

        let pi = phase_shift(&displace(&m, 1.0, -2.0), std::f64::consts::PI).unwrap();
        let (vp, vm) = pi.variances(&basis).unwrap();
        assert_relative_eq!(vp, 0.25, max_relative = 1e-12);
        assert_relative_eq!(vm, 4.0, max_relative = 1e-12);
        let (ap, am) = pi.alphas();
        assert_relative_eq!(ap, -1.0, max_relative = 1e-12);
        assert_relative_eq!(am, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn loss_example_values() {
        let mut basis = NoiseBasis::new();
        let m = squeezed_mode(&mut basis, &SqueezerSpec::pure(0.3311).unwrap()).unwrap();
        let lossy = loss(&m, 0.84, &mut basis).unwrap();
        let (vp, _) = lossy.variances(&basis).unwrap();
        assert_relative_eq!(vp, 0.84 * 0.3311 + 0.16, max_relative = 1e-12);

        let id = loss(&m, 1.0, &mut basis).unwrap();
        assert_relative_eq!(
            basis.variance(&id.x_plus).unwrap(),
            0.3311,
            max_relative = 1e-12
        );

        let vac = vacuum_mode(&mut basis).unwrap();
        let lv = loss(&vac, 0.3, &mut basis).unwrap();
        assert_relative_eq!(basis.variance(&lv.x_plus).unwrap(), 1.0, epsilon = 1e-12);
        assert!(loss(&m, -0.1, &mut basis).is_err());
    }

    #[test]
    fn epr_pair_vacuum_sources_are_separable() {
        let mut basis = NoiseBasis::new();
        let pair = epr_pair(&mut basis, &SqueezerSpec::vacuum(), &SqueezerSpec::vacuum()).unwrap();
        assert_relative_eq!(
            duan_inseparability(&pair, &basis).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let (vp, vm) = pair.beam_a.variances(&basis).unwrap();
        assert_relative_eq!(vp, 1.0, epsilon = 1e-12);
        assert_relative_eq!(vm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn epr_pair_squeezed_combinations() {
        let mut basis = NoiseBasis::new();
        let spec = SqueezerSpec::pure(0.44).unwrap();
        let pair = epr_pair(&mut basis, &spec, &spec).unwrap();
        let diff = pair
            .beam_a
            .x_plus
            .combine(1.0 / 2f64.sqrt(), &pair.beam_b.x_plus, -1.0 / 2f64.sqrt())
            .unwrap();
        assert_relative_eq!(basis.variance(&diff).unwrap(), 0.44, max_relative = 1e-12);
        assert_relative_eq!(
            duan_inseparability(&pair, &basis).unwrap(),
            0.44,
            max_relative = 1e-12
        );
    }

    #[test]
    fn epr_single_beam_variances() {
        let mut basis = NoiseBasis::new();
        let spec = SqueezerSpec::new(0.3311, 3.020, Orientation::AmplitudeSqueezed).unwrap();
        let pair = epr_pair(&mut basis, &spec, &spec).unwrap();
        let (vp, vm) = pair.beam_a.variances(&basis).unwrap();
        assert_relative_eq!(vp, (0.3311 + 3.020) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(vm, (0.3311 + 3.020) / 2.0, max_relative = 1e-12);
        // Each beam alone is noisier than vacuum.
        assert!(vp * vm > 1.0);
    }

    #[test]
    fn duan_after_symmetric_loss() {
        let mut basis = NoiseBasis::new();
        let spec = SqueezerSpec::pure(0.3311).unwrap();
        let pair = epr_pair(&mut basis, &spec, &spec).unwrap();
        let pair = EprPair {
            beam_a: loss(&pair.beam_a, 0.84, &mut basis).unwrap(),
            beam_b: loss(&pair.beam_b, 0.84, &mut basis).unwrap(),
        };
        assert_relative_eq!(
            duan_inseparability(&pair, &basis).unwrap(),
            0.438,
            epsilon = 5e-4
        );
    }

    #[test]
    fn displace_sets_coherent_amplitudes() {
        let mut basis = NoiseBasis::new();
        let m = vacuum_mode(&mut basis).unwrap();
        let d = displace(&m, 2.9, 3.5);
        assert_eq!(d.alphas(), (2.9, 3.5));
        assert_eq!(d.variances(&basis).unwrap(), (1.0, 1.0));
        let same = displace(&m, 0.0, 0.0);
        assert_eq!(same.x_plus, m.x_plus);
    }

    proptest! {
        // loss(loss(m, e1), e2) matches loss(m, e1*e2) in variances and offsets.
        #[test]
        fn loss_composition(e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0, v in 0.2f64..1.0) {
            let mut basis = NoiseBasis::new();
            let m = displace(
                &squeezed_mode(&mut basis, &SqueezerSpec::pure(v).unwrap()).unwrap(),
                1.3,
                -0.4,
            );
            let twice = loss(&loss(&m, e1, &mut basis).unwrap(), e2, &mut basis).unwrap();
            let once = loss(&m, e1 * e2, &mut basis).unwrap();
            let (a1, a2) = (twice.variances(&basis).unwrap(), once.variances(&basis).unwrap());
            prop_assert!((a1.0 - a2.0).abs() < 1e-12);
            prop_assert!((a1.1 - a2.1).abs() < 1e-12);
            prop_assert!((twice.x_plus.offset - once.x_plus.offset).abs() < 1e-12);
            prop_assert!((twice.x_minus.offset - once.x_minus.offset).abs() < 1e-12);
        }

        // Uncorrelated inputs: the beamsplitter conserves summed variance.
        #[test]
        fn beamsplitter_conserves_variance(t in 0.0f64..=1.0, v1 in 0.3f64..1.0, v2 in 0.3f64..1.0) {
            let mut basis = NoiseBasis::new();
            let m1 = squeezed_mode(&mut basis, &SqueezerSpec::pure(v1).unwrap()).unwrap();
            let m2 = squeezed_mode(&mut basis, &SqueezerSpec::pure(v2).unwrap()).unwrap();
            let (a, b) = beamsplitter(&m1, &m2, t).unwrap();
            let sum_in = v1 + v2;
            let sum_out = basis.variance(&a.x_plus).unwrap() + basis.variance(&b.x_plus).unwrap();
            prop_assert!((sum_in - sum_out).abs() < 1e-12);
        }

        // Duan value of the pair equals the average of the squeezed variances.
        #[test]
        fn duan_closed_form(v1 in 0.05f64..=1.0, v2 in 0.05f64..=1.0) {
            let mut basis = NoiseBasis::new();
            let pair = epr_pair(
                &mut basis,
                &SqueezerSpec::pure(v1).unwrap(),
                &SqueezerSpec::pure(v2).unwrap(),
            ).unwrap();
            let duan = duan_inseparability(&pair, &basis).unwrap();
            prop_assert!((duan - (v1 + v2) / 2.0).abs() < 1e-12);
        }

        // Rotating by theta then -theta restores variances and offsets.
        #[test]
        fn phase_shift_round_trip(theta in -6.3f64..6.3) {
            let mut basis = NoiseBasis::new();
            let m = displace(
                &squeezed_mode(&mut basis, &SqueezerSpec::pure(0.5).unwrap()).unwrap(),
                0.7,
                -1.1,
            );
            let back = phase_shift(&phase_shift(&m, theta).unwrap(), -theta).unwrap();
            let (v1, v2) = m.variances(&basis).unwrap();
            let (w1, w2) = back.variances(&basis).unwrap();
            prop_assert!((v1 - w1).abs() < 1e-9);
            prop_assert!((v2 - w2).abs() < 1e-9);
            prop_assert!((m.x_plus.offset - back.x_plus.offset).abs() < 1e-9);
            prop_assert!((m.x_minus.offset - back.x_minus.offset).abs() < 1e-9);
        }
    }
}
