//! Exact second-moment bookkeeping.
//!
//! Every optical or electronic observable in the simulator is a linear
//! combination of independent zero-mean Gaussian source variables plus a
//! deterministic offset (the coherent amplitude part).  Variances and
//! covariances of such observables are therefore available in closed form,
//! with no sampling involved.
//!
//! Conventions: quadrature variances are dimensionless in shot-noise units,
//! with the vacuum state at exactly 1 on both quadratures.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Tolerance used for uncertainty-product checks at registration.  Loose
/// enough to admit source variances quoted as rounded dB figures.
const UNCERTAINTY_TOL: f64 = 1e-3;

static BASIS_COUNTER: AtomicU64 = AtomicU64::new(1);

/// Opaque handle to one source variable in a [`NoiseBasis`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// What kind of physical source a basis variable models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Vacuum,
    Squeezed,
    Antisqueezed,
    Electronic,
}

/// One independent zero-mean Gaussian source variable.
#[derive(Debug, Clone)]
pub struct SourceVariable {
    pub id: VarId,
    pub variance: f64,
    pub kind: SourceKind,
    /// Conjugate partner for optical quadrature pairs; `None` for
    /// electronic variables.
    pub conjugate_of: Option<VarId>,
}

/// Registry of the independent Gaussian sources underlying a simulation run.
///
/// Registration is the only mutation; all downstream values are immutable.
#[derive(Debug)]
pub struct NoiseBasis {
    id: u64,
    entries: Vec<SourceVariable>,
}

impl NoiseBasis {
    pub fn new() -> Self {
        NoiseBasis {
            id: BASIS_COUNTER.fetch_add(1, Ordering::Relaxed),
            entries: Vec::new(),
        }
    }

    /// Register a conjugate-paired optical source with quadrature variances
    /// `(v_plus, v_minus)`.  Returns the ids of the `+` and `-` variables.
    ///
    /// Physical source modes must satisfy `v_plus * v_minus >= 1`.
    pub fn register_source(
        &mut self,
        v_plus: f64,
        v_minus: f64,
        kind: SourceKind,
    ) -> Result<(VarId, VarId)> {
        if kind == SourceKind::Electronic {
            return Err(Error::Usage(
                "electronic variables are unpaired; use register_electronic".into(),
            ));
        }
        if !(v_plus > 0.0) || !(v_minus > 0.0) {
            return Err(Error::Domain(format!(
                "optical source variances must be positive, got ({v_plus}, {v_minus})"
            )));
        }
        if v_plus * v_minus < 1.0 - UNCERTAINTY_TOL {
            return Err(Error::Domain(format!(
                "uncertainty violation: v_plus * v_minus = {} < 1",
                v_plus * v_minus
            )));
        }
        let plus = VarId(self.entries.len());
        let minus = VarId(self.entries.len() + 1);
        self.entries.push(SourceVariable {
            id: plus,
            variance: v_plus,
            kind,
            conjugate_of: Some(minus),
        });
        self.entries.push(SourceVariable {
            id: minus,
            variance: v_minus,
            kind,
            conjugate_of: Some(plus),
        });
        Ok((plus, minus))
    }

    /// Register a single unpaired electronic noise variable.
    pub fn register_electronic(&mut self, variance: f64) -> Result<VarId> {
        if !(variance >= 0.0) {
            return Err(Error::Domain(format!(
                "electronic variance must be >= 0, got {variance}"
            )));
        }
        let id = VarId(self.entries.len());
        self.entries.push(SourceVariable {
            id,
            variance,
            kind: SourceKind::Electronic,
            conjugate_of: None,
        });
        Ok(id)
    }

    pub fn entries(&self) -> &[SourceVariable] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_form(&self, f: &LinearForm) -> Result<()> {
        if f.basis_id != self.id {
            return Err(Error::Usage(
                "linear form does not belong to this basis".into(),
            ));
        }
        Ok(())
    }

    /// Noise variance of a form: sum of c_i^2 * v_i; the offset carries no
    /// noise.
    pub fn variance(&self, f: &LinearForm) -> Result<f64> {
        self.check_form(f)?;
        Ok(f.coefficients
            .iter()
            .map(|(id, c)| c * c * self.entries[id.0].variance)
            .sum())
    }

    /// Covariance of two forms over this basis: sum of c_i * d_i * v_i.
    pub fn covariance(&self, f: &LinearForm, g: &LinearForm) -> Result<f64> {
        self.check_form(f)?;
        self.check_form(g)?;
        Ok(f.coefficients
            .iter()
            .filter_map(|(id, c)| g.coefficients.get(id).map(|d| c * d * self.entries[id.0].variance))
            .sum())
    }

    /// Iterate over conjugate pairs as `(plus_id, minus_id)`, each pair once.
    pub fn conjugate_pairs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.entries.iter().filter_map(|v| match v.conjugate_of {
            Some(conj) if v.id < conj => Some((v.id, conj)),
            _ => None,
        })
    }
}

impl Default for NoiseBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// An observable: sparse coefficients over basis variables plus a
/// deterministic offset.  For a quadrature mean the offset equals twice the
/// coherent amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    basis_id: u64,
    coefficients: BTreeMap<VarId, f64>,
    pub offset: f64,
}

impl LinearForm {
    /// The zero form (no noise, zero offset).
    pub fn zero(basis: &NoiseBasis) -> Self {
        LinearForm {
            basis_id: basis.id,
            coefficients: BTreeMap::new(),
            offset: 0.0,
        }
    }

    /// A form reading out a single basis variable with unit coefficient.
    pub fn variable(basis: &NoiseBasis, id: VarId) -> Result<Self> {
        if id.0 >= basis.entries.len() {
            return Err(Error::Usage(format!(
                "variable id {} not registered in basis",
                id.0
            )));
        }
        let mut coefficients = BTreeMap::new();
        coefficients.insert(id, 1.0);
        Ok(LinearForm {
            basis_id: basis.id,
            coefficients,
            offset: 0.0,
        })
    }

    /// Linear combination `ca * self + cb * other`.
    pub fn combine(&self, ca: f64, other: &LinearForm, cb: f64) -> Result<LinearForm> {
        if self.basis_id != other.basis_id {
            return Err(Error::Usage(
                "cannot combine linear forms over different bases".into(),
            ));
        }
        let mut coefficients = BTreeMap::new();
        for (&id, &c) in &self.coefficients {
            coefficients.insert(id, ca * c);
        }
        for (&id, &c) in &other.coefficients {
            *coefficients.entry(id).or_insert(0.0) += cb * c;
        }
        coefficients.retain(|_, c| *c != 0.0);
        Ok(LinearForm {
            basis_id: self.basis_id,
            coefficients,
            offset: ca * self.offset + cb * other.offset,
        })
    }

    /// The form scaled by a constant.
    pub fn scaled(&self, c: f64) -> LinearForm {
        let mut out = self.clone();
        for v in out.coefficients.values_mut() {
            *v *= c;
        }
        out.coefficients.retain(|_, c| *c != 0.0);
        out.offset *= c;
        out
    }

    pub fn with_offset(&self, offset: f64) -> LinearForm {
        let mut out = self.clone();
        out.offset = offset;
        out
    }

    pub fn coefficient(&self, id: VarId) -> f64 {
        self.coefficients.get(&id).copied().unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (VarId, f64)> + '_ {
        self.coefficients.iter().map(|(&id, &c)| (id, c))
    }
}

/// One optical beam: a pair of linear forms for the amplitude (`+`) and
/// phase (`-`) quadratures.
#[derive(Debug, Clone)]
pub struct FieldMode {
    pub x_plus: LinearForm,
    pub x_minus: LinearForm,
    /// Set once the value is derived from a measured photocurrent; optical
    /// transformations refuse classical modes.
    pub classical: bool,
}

impl FieldMode {
    pub fn new(x_plus: LinearForm, x_minus: LinearForm) -> Self {
        FieldMode {
            x_plus,
            x_minus,
            classical: false,
        }
    }

    /// Coherent amplitudes `(alpha_plus, alpha_minus)`; a quadrature mean is
    /// twice the coherent amplitude.
    pub fn alphas(&self) -> (f64, f64) {
        (self.x_plus.offset / 2.0, self.x_minus.offset / 2.0)
    }

    /// Quadrature noise variances `(V_plus, V_minus)`.
    pub fn variances(&self, basis: &NoiseBasis) -> Result<(f64, f64)> {
        Ok((basis.variance(&self.x_plus)?, basis.variance(&self.x_minus)?))
    }

    /// Commutator audit: the pairing sum over conjugate variable pairs.
    ///
    /// Equals exactly 1 for any mode built from optical operations alone,
    /// reflecting preservation of the canonical commutator.
    pub fn symplectic_pairing(&self, basis: &NoiseBasis) -> Result<f64> {
        if self.classical {
            return Err(Error::Usage(
                "symplectic pairing is undefined for a classical (measured) mode".into(),
            ));
        }
        basis.check_form(&self.x_plus)?;
        basis.check_form(&self.x_minus)?;
        let mut sum = 0.0;
        for (q, p) in basis.conjugate_pairs() {
            sum += self.x_plus.coefficient(q) * self.x_minus.coefficient(p)
                - self.x_minus.coefficient(q) * self.x_plus.coefficient(p);
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn vacuum_pair_saturates_uncertainty() {
        let mut basis = NoiseBasis::new();
        let (p, m) = basis.register_source(1.0, 1.0, SourceKind::Vacuum).unwrap();
        assert_eq!(basis.entries()[p.index()].variance, 1.0);
        assert_eq!(basis.entries()[m.index()].conjugate_of, Some(p));
    }

    #[test]
    fn pure_squeezed_pair_is_valid() {
        let mut basis = NoiseBasis::new();
        let r = basis.register_source(0.44, 1.0 / 0.44, SourceKind::Squeezed);
        assert!(r.is_ok());
    }

    #[test]
    fn uncertainty_violation_rejected() {
        let mut basis = NoiseBasis::new();
        let r = basis.register_source(0.44, 0.44, SourceKind::Squeezed);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn negative_variance_rejected() {
        let mut basis = NoiseBasis::new();
        assert!(basis
            .register_source(-1.0, 1.0, SourceKind::Vacuum)
            .is_err());
        assert!(basis.register_electronic(-0.1).is_err());
    }

    #[test]
    fn combine_identity_and_cancellation() {
        let mut basis = NoiseBasis::new();
        let (p, _) = basis.register_source(1.5, 1.5, SourceKind::Vacuum).unwrap();
        let f = LinearForm::variable(&basis, p).unwrap().with_offset(2.0);
        let zero = LinearForm::zero(&basis);
        let same = f.combine(1.0, &zero, 1.0).unwrap();
        assert_eq!(basis.variance(&same).unwrap(), 1.5);
        assert_eq!(same.offset, 2.0);
        let cancelled = f.combine(1.0, &f, -1.0).unwrap();
        assert_eq!(basis.variance(&cancelled).unwrap(), 0.0);
        assert_eq!(cancelled.offset, 0.0);
    }

    #[test]
    fn balanced_mix_of_unit_forms_has_unit_variance() {
        let mut basis = NoiseBasis::new();
        let (p1, _) = basis.register_source(1.0, 1.0, SourceKind::Vacuum).unwrap();
        let (p2, _) = basis.register_source(1.0, 1.0, SourceKind::Vacuum).unwrap();
        let f = LinearForm::variable(&basis, p1).unwrap();
        let g = LinearForm::variable(&basis, p2).unwrap();
        let h = f
            .combine(1.0 / 2f64.sqrt(), &g, 1.0 / 2f64.sqrt())
            .unwrap();
        assert_relative_eq!(basis.variance(&h).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn mismatched_basis_is_usage_error() {
        let mut b1 = NoiseBasis::new();
        let mut b2 = NoiseBasis::new();
        let (p1, _) = b1.register_source(1.0, 1.0, SourceKind::Vacuum).unwrap();
        let (p2, _) = b2.register_source(1.0, 1.0, SourceKind::Vacuum).unwrap();
        let f = LinearForm::variable(&b1, p1).unwrap();
        let g = LinearForm::variable(&b2, p2).unwrap();
        assert!(matches!(f.combine(1.0, &g, 1.0), Err(Error::Usage(_))));
        assert!(matches!(b1.variance(&g), Err(Error::Usage(_))));
    }

    #[test]
    fn squeezed_variance_matches_db_conversion() {
        let mut basis = NoiseBasis::new();
        let v = 10f64.powf(-0.48);
        let (p, _) = basis
            .register_source(v, 1.0 / v, SourceKind::Squeezed)
            .unwrap();
        let f = LinearForm::variable(&basis, p).unwrap();
        assert_relative_eq!(basis.variance(&f).unwrap(), 0.331131, max_relative = 1e-5);
    }

    #[test]
    fn scaled_form_variance_is_quadratic() {
        let mut basis = NoiseBasis::new();
        let (p, _) = basis.register_source(1.0, 1.0, SourceKind::Vacuum).unwrap();
        let f = LinearForm::variable(&basis, p).unwrap().scaled(2.0);
        assert_eq!(basis.variance(&f).unwrap(), 4.0);
    }

    #[test]
    fn covariance_examples() {
        let mut basis = NoiseBasis::new();
        let (p1, _) = basis
            .register_source(1.88, 1.88, SourceKind::Vacuum)
            .unwrap();
        let (p2, _) = basis.register_source(1.0, 1.0, SourceKind::Vacuum).unwrap();
        let f = LinearForm::variable(&basis, p1).unwrap();
        let g = LinearForm::variable(&basis, p2).unwrap();
        assert_eq!(basis.covariance(&f, &g).unwrap(), 0.0);
        assert_eq!(basis.covariance(&f, &f).unwrap(), 1.88);
        // out = g*in + noise with g = 1: covariance with input is V_in.
        let out = f.combine(1.0, &g, 1.0).unwrap();
        assert_relative_eq!(basis.covariance(&f, &out).unwrap(), 1.88, max_relative = 1e-12);
    }

    #[test]
    fn pairing_is_canonical_for_fresh_vacuum() {
        let mut basis = NoiseBasis::new();
        let m = optics::vacuum_mode(&mut basis).unwrap();
        assert_relative_eq!(m.symplectic_pairing(&basis).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pairing_survives_loss_and_beamsplitter() {
        let mut basis = NoiseBasis::new();
        let m1 = optics::vacuum_mode(&mut basis).unwrap();
        let lossy = optics::loss(&m1, 0.5, &mut basis).unwrap();
        assert_relative_eq!(
            lossy.symplectic_pairing(&basis).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let m2 = optics::vacuum_mode(&mut basis).unwrap();
        let (a, b) = optics::beamsplitter(&lossy, &m2, 0.5).unwrap();
        assert_relative_eq!(a.symplectic_pairing(&basis).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(b.symplectic_pairing(&basis).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pairing_rejects_classical_mode() {
        let mut basis = NoiseBasis::new();
        let mut m = optics::vacuum_mode(&mut basis).unwrap();
        m.classical = true;
        assert!(matches!(
            m.symplectic_pairing(&basis),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn variance_independent_of_registration_order() {
        // Same physical content registered in two orders gives the same
        // variance for the corresponding combination.
        let mut b1 = NoiseBasis::new();
        let (a1, _) = b1.register_source(0.5, 2.0, SourceKind::Squeezed).unwrap();
        let (c1, _) = b1.register_source(3.0, 1.0, SourceKind::Squeezed).unwrap();
        let mut b2 = NoiseBasis::new();
        let (c2, _) = b2.register_source(3.0, 1.0, SourceKind::Squeezed).unwrap();
        let (a2, _) = b2.register_source(0.5, 2.0, SourceKind::Squeezed).unwrap();
        let f1 = LinearForm::variable(&b1, a1)
            .unwrap()
            .combine(0.3, &LinearForm::variable(&b1, c1).unwrap(), -0.7)
            .unwrap();
        let f2 = LinearForm::variable(&b2, a2)
            .unwrap()
            .combine(0.3, &LinearForm::variable(&b2, c2).unwrap(), -0.7)
            .unwrap();
        assert_relative_eq!(
            b1.variance(&f1).unwrap(),
            b2.variance(&f2).unwrap(),
            max_relative = 1e-12
        );
    }

    proptest! {
        // variance(a f + b g) = a^2 V(f) + 2ab cov(f, g) + b^2 V(g)
        #[test]
        fn variance_bilinearity(
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            c1 in -2.0f64..2.0,
            c2 in -2.0f64..2.0,
            d1 in -2.0f64..2.0,
            d2 in -2.0f64..2.0,
            v1 in 0.1f64..5.0,
            v2 in 0.1f64..5.0,
        ) {
            let mut basis = NoiseBasis::new();
            let (p1, _) = basis.register_source(v1, 10.0 / v1, SourceKind::Squeezed).unwrap();
            let (p2, _) = basis.register_source(v2, 10.0 / v2, SourceKind::Squeezed).unwrap();
            let e1 = LinearForm::variable(&basis, p1).unwrap();
            let e2 = LinearForm::variable(&basis, p2).unwrap();
            let f = e1.combine(c1, &e2, c2).unwrap();
            let g = e1.combine(d1, &e2, d2).unwrap();
            let combined = f.combine(a, &g, b).unwrap();
            let lhs = basis.variance(&combined).unwrap();
            let rhs = a * a * basis.variance(&f).unwrap()
                + 2.0 * a * b * basis.covariance(&f, &g).unwrap()
                + b * b * basis.variance(&g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
        }

        // Pairing stays exactly 1 under random chains of optical operations.
        #[test]
        fn pairing_invariant_under_random_chain(
            ops in proptest::collection::vec((0u8..3, 0.0f64..1.0), 1..8),
        ) {
            let mut basis = NoiseBasis::new();
            let mut mode = optics::vacuum_mode(&mut basis).unwrap();
            for (op, x) in ops {
                mode = match op {
                    0 => optics::loss(&mode, x, &mut basis).unwrap(),
                    1 => optics::phase_shift(&mode, x * std::f64::consts::TAU).unwrap(),
                    _ => {
                        let other = optics::vacuum_mode(&mut basis).unwrap();
                        optics::beamsplitter(&mode, &other, x).unwrap().0
                    }
                };
            }
            let pairing = mode.symplectic_pairing(&basis).unwrap();
            prop_assert!((pairing - 1.0).abs() < 1e-12);
        }
    }
}
