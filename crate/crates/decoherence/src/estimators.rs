//! Closed-form decoherence-time estimators: the uncertainty-relation
//! energy/time converter and the four timescale formulas (ion/dipole
//! coupling, narrow/broad thermal-wavepacket regime).
//!
//! Notation bridge, recorded once: the interaction distance R is the
//! closest approach d of the derivation coordinates, and the kink
//! separation s is the superposition displacement x1. Substituting
//! lambda = hbar/sqrt(M kT) into the lambda-form narrow estimator
//! reproduces the sqrt(M kT) form exactly; the identity is tested.

use serde::Serialize;
use thiserror::Error;

use crate::interactions::{omega_dipole, InteractionError};
use crate::quantities::{
    thermal_wavelength, Constants, Quantity, QuantityError, DIPOLE_MOMENT, LENGTH, MASS,
    TEMPERATURE, TIME,
};
use crate::regimes::{classify_regime, Regime};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error("scenario invalid: {0}")]
    InvalidScenario(String),
    #[error("estimator produced a non-time dimension {0}")]
    NotATime(crate::quantities::Dimension),
}

/// Which formula produced a decoherence-time estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "EQ3_ION_NARROW")]
    IonNarrow,
    #[serde(rename = "EQ15_ION_NARROW_LAMBDA")]
    IonNarrowLambda,
    #[serde(rename = "EQ18_ION_BROAD")]
    IonBroad,
    #[serde(rename = "EQ21_DIPOLE_NARROW")]
    DipoleNarrow,
    #[serde(rename = "EQ22_DIPOLE_BROAD")]
    DipoleBroad,
    #[serde(rename = "ORACLE_QUADRATURE")]
    OracleQuadrature,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::IonNarrow => "EQ3_ION_NARROW",
            Method::IonNarrowLambda => "EQ15_ION_NARROW_LAMBDA",
            Method::IonBroad => "EQ18_ION_BROAD",
            Method::DipoleNarrow => "EQ21_DIPOLE_NARROW",
            Method::DipoleBroad => "EQ22_DIPOLE_BROAD",
            Method::OracleQuadrature => "ORACLE_QUADRATURE",
        }
    }
}

/// A decoherence time with the method and regime that produced it.
#[derive(Debug, Clone)]
pub struct TauEstimate {
    pub tau: Quantity,
    /// Decay rate 1/tau, s^-1.
    pub lambda_rate: Quantity,
    pub method: Method,
    pub regime: Regime,
    pub scenario_id: String,
}

impl TauEstimate {
    pub fn new(
        tau: Quantity,
        method: Method,
        regime: Regime,
        scenario_id: &str,
    ) -> Result<TauEstimate, EstimatorError> {
        if !tau.has_dim(TIME) {
            return Err(EstimatorError::NotATime(tau.dim()));
        }
        let tau = tau.expect_positive("tau")?;
        Ok(TauEstimate {
            tau,
            lambda_rate: tau.recip(),
            method,
            regime,
            scenario_id: scenario_id.to_string(),
        })
    }

    pub fn tau_s(&self) -> f64 {
        self.tau.value()
    }
}

/// System–environment parameters for one scenario.
///
/// `r` is the interaction distance (identified with the closest approach d)
/// and `s` the superposition separation (identified with x1).
#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub r: Quantity,
    pub s: Quantity,
    pub mass: Quantity,
    pub temperature: Quantity,
    /// Elementary charges in the interacting ring; q1 = N e.
    pub n_charges: u32,
    pub dipole_moment: Quantity,
    /// Dipole orientation angle, rad.
    pub alpha: f64,
    pub y1: Quantity,
    pub id: String,
}

impl ScenarioParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: &str,
        r_m: f64,
        s_m: f64,
        m_kg: f64,
        t_k: f64,
        n_charges: u32,
        p_cm: f64,
        alpha_rad: f64,
        y1_m: f64,
    ) -> Result<ScenarioParams, EstimatorError> {
        let params = ScenarioParams {
            r: Quantity::meters(r_m),
            s: Quantity::meters(s_m),
            mass: Quantity::kilograms(m_kg),
            temperature: Quantity::kelvin(t_k),
            n_charges,
            dipole_moment: crate::quantities::qty(p_cm, DIPOLE_MOMENT)?,
            alpha: alpha_rad,
            y1: Quantity::meters(y1_m),
            id: id.to_string(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        for (q, dim, name) in [
            (self.r, LENGTH, "R"),
            (self.s, LENGTH, "s"),
            (self.mass, MASS, "M"),
            (self.temperature, TEMPERATURE, "T"),
        ] {
            if !q.has_dim(dim) {
                return Err(QuantityError::DimensionMismatch(q.dim(), dim).into());
            }
            if q.value() <= 0.0 {
                return Err(EstimatorError::InvalidScenario(format!(
                    "{name} must be strictly positive, got {:e}",
                    q.value()
                )));
            }
        }
        if !self.dipole_moment.has_dim(DIPOLE_MOMENT) {
            return Err(
                QuantityError::DimensionMismatch(self.dipole_moment.dim(), DIPOLE_MOMENT).into(),
            );
        }
        if self.dipole_moment.value() < 0.0 {
            return Err(EstimatorError::InvalidScenario(format!(
                "p must be nonnegative, got {:e}",
                self.dipole_moment.value()
            )));
        }
        if !self.y1.has_dim(LENGTH) {
            return Err(QuantityError::DimensionMismatch(self.y1.dim(), LENGTH).into());
        }
        Ok(())
    }

    fn require_ring(&self) -> Result<(), EstimatorError> {
        if self.n_charges < 1 {
            return Err(EstimatorError::InvalidScenario(
                "ion scenario requires N >= 1".into(),
            ));
        }
        Ok(())
    }

    fn require_dipole(&self) -> Result<(), EstimatorError> {
        if self.dipole_moment.value() <= 0.0 {
            return Err(EstimatorError::InvalidScenario(
                "dipole scenario requires p > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn thermal_wavelength(&self) -> Result<Quantity, EstimatorError> {
        Ok(thermal_wavelength(self.mass, self.temperature)?)
    }

    fn regime(&self) -> Result<Regime, EstimatorError> {
        classify_regime(self.thermal_wavelength()?, self.r)
            .map_err(|e| EstimatorError::InvalidScenario(e.to_string()))
    }

    /// Ring charge N e.
    pub fn q1(&self) -> Quantity {
        Constants::published().elementary_charge * self.n_charges as f64
    }
}

/// E = hbar / t.
pub fn orch_or_energy(t: Quantity) -> Result<Quantity, EstimatorError> {
    if !t.has_dim(TIME) {
        return Err(QuantityError::DimensionMismatch(t.dim(), TIME).into());
    }
    let t = t.expect_positive("t")?;
    Ok(Constants::published().hbar / t)
}

/// t = hbar / E; exact inverse of [`orch_or_energy`].
pub fn orch_or_time(e: Quantity) -> Result<Quantity, EstimatorError> {
    if !e.has_dim(crate::quantities::ENERGY) {
        return Err(QuantityError::DimensionMismatch(e.dim(), crate::quantities::ENERGY).into());
    }
    let e = e.expect_positive("E")?;
    Ok(Constants::published().hbar / e)
}

/// tau = R^3 sqrt(M κ T) / (K N e^2 s). Narrow regime, ion coupling.
pub fn tau_ion_narrow(sc: &ScenarioParams) -> Result<TauEstimate, EstimatorError> {
    sc.validate()?;
    sc.require_ring()?;
    let c = Constants::published();
    let momentum = (sc.mass * c.kappa * sc.temperature).sqrt()?;
    let tau = sc.r.powi(3) * momentum
        / (c.coulomb_k * sc.q1() * c.elementary_charge * sc.s);
    TauEstimate::new(tau, Method::IonNarrow, sc.regime()?, &sc.id)
}

/// tau = hbar d^3 / (x1 λ K q1 q2), the wavepacket-scale form of the
/// narrow-regime ion estimator.
pub fn tau_ion_narrow_lambda(
    sc: &ScenarioParams,
    lambda: Quantity,
) -> Result<TauEstimate, EstimatorError> {
    sc.validate()?;
    sc.require_ring()?;
    if !lambda.has_dim(LENGTH) {
        return Err(QuantityError::DimensionMismatch(lambda.dim(), LENGTH).into());
    }
    let lambda = lambda.expect_positive("lambda")?;
    let c = Constants::published();
    let tau = c.hbar * sc.r.powi(3)
        / (sc.s * lambda * c.coulomb_k * sc.q1() * c.elementary_charge);
    TauEstimate::new(tau, Method::IonNarrowLambda, sc.regime()?, &sc.id)
}

/// tau = hbar^3 / (K q1 q2 x1 M κ T). Broad (low-temperature) regime,
/// ion coupling; order-of-magnitude by construction.
pub fn tau_ion_broad(sc: &ScenarioParams) -> Result<TauEstimate, EstimatorError> {
    sc.validate()?;
    sc.require_ring()?;
    let c = Constants::published();
    let tau = c.hbar.powi(3)
        / (c.coulomb_k * sc.q1() * c.elementary_charge * sc.s
            * sc.mass
            * c.kappa
            * sc.temperature);
    TauEstimate::new(tau, Method::IonBroad, sc.regime()?, &sc.id)
}

/// tau = d^4 sqrt(M κ T) Ω / (3 K q p s). Narrow regime, dipole coupling.
pub fn tau_dipole_narrow(sc: &ScenarioParams) -> Result<TauEstimate, EstimatorError> {
    sc.validate()?;
    sc.require_dipole()?;
    let omega = omega_dipole(sc.alpha)?;
    let c = Constants::published();
    let momentum = (sc.mass * c.kappa * sc.temperature).sqrt()?;
    let tau = sc.r.powi(4) * momentum * omega
        / (c.coulomb_k * c.elementary_charge * sc.dipole_moment * sc.s * 3.0);
    TauEstimate::new(tau, Method::DipoleNarrow, sc.regime()?, &sc.id)
}

/// Wavepacket-scale form of the narrow-regime dipole estimator:
/// tau = hbar d^4 Ω / (3 K q p s λ). Used by the oracle cross-checks.
pub fn tau_dipole_narrow_lambda(
    sc: &ScenarioParams,
    lambda: Quantity,
) -> Result<TauEstimate, EstimatorError> {
    sc.validate()?;
    sc.require_dipole()?;
    let omega = omega_dipole(sc.alpha)?;
    if !lambda.has_dim(LENGTH) {
        return Err(QuantityError::DimensionMismatch(lambda.dim(), LENGTH).into());
    }
    let lambda = lambda.expect_positive("lambda")?;
    let c = Constants::published();
    let tau = c.hbar * sc.r.powi(4) * omega
        / (c.coulomb_k * c.elementary_charge * sc.dipole_moment * sc.s * lambda * 3.0);
    TauEstimate::new(tau, Method::DipoleNarrow, sc.regime()?, &sc.id)
}

/// tau = hbar^4 (M κ T)^{-3/2} Ω / (3 K q p s). Broad regime, dipole
/// coupling.
pub fn tau_dipole_broad(sc: &ScenarioParams) -> Result<TauEstimate, EstimatorError> {
    sc.validate()?;
    sc.require_dipole()?;
    let omega = omega_dipole(sc.alpha)?;
    let c = Constants::published();
    let mkt32 = (sc.mass * c.kappa * sc.temperature).pow_half(3)?;
    let tau = c.hbar.powi(4) * omega
        / (mkt32 * c.coulomb_k * c.elementary_charge * sc.dipole_moment * sc.s * 3.0);
    TauEstimate::new(tau, Method::DipoleBroad, sc.regime()?, &sc.id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::PROTON_MASS;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    pub(crate) fn tegmark_ion() -> ScenarioParams {
        ScenarioParams::new(
            "tegmark-mt-ion",
            2.4e-8,
            2.4e-8,
            18.0 * PROTON_MASS,
            309.0,
            1000,
            0.0,
            0.0,
            0.0,
        )
        .unwrap()
    }

    pub(crate) fn hht_dipole() -> ScenarioParams {
        ScenarioParams::new(
            "hht-mt-dipole",
            2.4e-8,
            2.4e-8,
            18.0 * PROTON_MASS,
            309.0,
            1,
            1e-27,
            0.0,
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn orch_or_energy_frozen() {
        let e = orch_or_energy(Quantity::seconds(0.5)).unwrap();
        assert!(rel_err(e.value(), 2.109145338250204e-34) < 1e-12);
        let e = orch_or_energy(Quantity::seconds(0.025)).unwrap();
        assert!(rel_err(e.value(), 4.218290676500408e-33) < 1e-12);
    }

    #[test]
    fn orch_or_inverse_pair() {
        for t in [1e-13, 0.025, 0.5, 7.0] {
            let t = Quantity::seconds(t);
            let back = orch_or_time(orch_or_energy(t).unwrap()).unwrap();
            assert!(rel_err(back.value(), t.value()) < 1e-15);
            assert_eq!(back.dim(), TIME);
        }
        assert!(orch_or_energy(Quantity::seconds(0.0)).is_err());
        assert!(orch_or_energy(Quantity::seconds(-1.0)).is_err());
    }

    #[test]
    fn ion_narrow_frozen_value() {
        let est = tau_ion_narrow(&tegmark_ion()).unwrap();
        assert!(rel_err(est.tau_s(), 2.8304356113503094e-14) < 1e-12);
        assert_eq!(est.method, Method::IonNarrow);
        assert_eq!(est.regime, Regime::Narrow);
        assert!(rel_err(est.lambda_rate.value() * est.tau_s(), 1.0) < 1e-12);
    }

    #[test]
    fn ion_narrow_scalings() {
        let base = tau_ion_narrow(&tegmark_ion()).unwrap().tau_s();
        let mut sc = tegmark_ion();
        sc.s = sc.s * 2.0;
        assert!(rel_err(tau_ion_narrow(&sc).unwrap().tau_s(), base / 2.0) < 1e-12);
        let mut sc = tegmark_ion();
        sc.r = sc.r * 2.0;
        assert!(rel_err(tau_ion_narrow(&sc).unwrap().tau_s(), base * 8.0) < 1e-12);
    }

    #[test]
    fn ion_lambda_form_frozen_and_scaling() {
        let sc = tegmark_ion();
        let est = tau_ion_narrow_lambda(&sc, Quantity::meters(9.314579219680601e-12)).unwrap();
        assert!(rel_err(est.tau_s(), 2.8304356113503094e-14) < 1e-11);
        let half =
            tau_ion_narrow_lambda(&sc, Quantity::meters(2.0 * 9.314579219680601e-12)).unwrap();
        assert!(rel_err(half.tau_s(), est.tau_s() / 2.0) < 1e-12);
    }

    #[test]
    fn ion_lambda_identity_with_thermal_wavelength() {
        let sc = tegmark_ion();
        let lam = sc.thermal_wavelength().unwrap();
        let a = tau_ion_narrow_lambda(&sc, lam).unwrap().tau_s();
        let b = tau_ion_narrow(&sc).unwrap().tau_s();
        assert!(rel_err(a, b) < 1e-12);
    }

    #[test]
    fn ion_broad_frozen_values() {
        let est = tau_ion_broad(&tegmark_ion()).unwrap();
        assert!(rel_err(est.tau_s(), 1.6546619367203014e-24) < 1e-12);
        // the formula applies outside its regime here; the label records that
        assert_eq!(est.regime, Regime::Narrow);
        let mut cold = tegmark_ion();
        cold.temperature = Quantity::kelvin(1e-6);
        let est = tau_ion_broad(&cold).unwrap();
        assert!(rel_err(est.tau_s(), 5.112905384465732e-16) < 1e-12);
    }

    #[test]
    fn ion_broad_inverse_temperature_scaling() {
        let base = tau_ion_broad(&tegmark_ion()).unwrap().tau_s();
        let mut sc = tegmark_ion();
        sc.temperature = sc.temperature * 10.0;
        assert!(rel_err(tau_ion_broad(&sc).unwrap().tau_s(), base / 10.0) < 1e-12);
    }

    #[test]
    fn dipole_narrow_frozen_value() {
        let est = tau_dipole_narrow(&hht_dipole()).unwrap();
        assert!(rel_err(est.tau_s(), 3.622957582528396e-11) < 1e-12);
    }

    #[test]
    fn dipole_narrow_scalings() {
        let base = tau_dipole_narrow(&hht_dipole()).unwrap().tau_s();
        let mut sc = hht_dipole();
        sc.dipole_moment = sc.dipole_moment * 2.0;
        assert!(rel_err(tau_dipole_narrow(&sc).unwrap().tau_s(), base / 2.0) < 1e-12);
        // alpha = 0 means the geometric factor is exactly 1
        let mut tilted = hht_dipole();
        tilted.alpha = std::f64::consts::FRAC_PI_3;
        assert!(rel_err(tau_dipole_narrow(&tilted).unwrap().tau_s(), base * 2.0) < 1e-12);
    }

    #[test]
    fn dipole_alpha_near_half_pi_is_error() {
        let mut sc = hht_dipole();
        sc.alpha = std::f64::consts::FRAC_PI_2;
        assert!(matches!(
            tau_dipole_narrow(&sc),
            Err(EstimatorError::Interaction(
                InteractionError::GeometricFactorSingular(_)
            ))
        ));
        assert!(tau_dipole_broad(&sc).is_err());
    }

    #[test]
    fn dipole_broad_frozen_value_and_identity() {
        let sc = hht_dipole();
        let est = tau_dipole_broad(&sc).unwrap();
        assert!(rel_err(est.tau_s(), 8.219989168731401e-25) < 1e-12);
        // narrow form with d -> lambda reproduces the broad form
        let lam = sc.thermal_wavelength().unwrap();
        let mut swapped = sc.clone();
        swapped.r = lam;
        let a = tau_dipole_narrow(&swapped).unwrap().tau_s();
        assert!(rel_err(a, est.tau_s()) < 1e-12);
    }

    #[test]
    fn dipole_broad_t32_scaling() {
        let base = tau_dipole_broad(&hht_dipole()).unwrap().tau_s();
        let mut sc = hht_dipole();
        sc.temperature = sc.temperature * 4.0;
        assert!(rel_err(tau_dipole_broad(&sc).unwrap().tau_s(), base / 8.0) < 1e-12);
    }

    #[test]
    fn estimators_return_time_dimension() {
        let ion = tegmark_ion();
        let dip = hht_dipole();
        let lam = ion.thermal_wavelength().unwrap();
        for est in [
            tau_ion_narrow(&ion).unwrap(),
            tau_ion_narrow_lambda(&ion, lam).unwrap(),
            tau_ion_broad(&ion).unwrap(),
            tau_dipole_narrow(&dip).unwrap(),
            tau_dipole_broad(&dip).unwrap(),
        ] {
            assert_eq!(est.tau.dim(), TIME);
        }
    }

    #[test]
    fn invalid_scenarios_rejected() {
        assert!(ScenarioParams::new("bad", -1.0, 1e-8, 1e-26, 300.0, 1, 0.0, 0.0, 0.0).is_err());
        assert!(ScenarioParams::new("bad", 1e-8, 1e-8, 1e-26, 0.0, 1, 0.0, 0.0, 0.0).is_err());
        assert!(ScenarioParams::new("bad", 1e-8, 1e-8, 1e-26, 300.0, 1, -1e-27, 0.0, 0.0).is_err());
        let mut sc = tegmark_ion();
        sc.n_charges = 0;
        assert!(tau_ion_narrow(&sc).is_err());
    }
}
