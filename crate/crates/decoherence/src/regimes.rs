//! Thermal-wavepacket regime classification, the narrow/broad crossover
//! temperature, and temperature sweeps over the closed-form estimators
//! (optionally cross-checked against the quadrature oracle).

use serde::Serialize;
use thiserror::Error;

use crate::estimators::{
    tau_dipole_broad, tau_dipole_narrow, tau_ion_broad, tau_ion_narrow, EstimatorError,
    ScenarioParams,
};
use crate::evolution::{
    decay_curve, default_threshold, default_time_grid, extract_tau, EnsembleSpec,
    QuadratureConfig,
};
use crate::interactions::{
    coulomb_phase_fn, dipole_phase_fn, CoulombSystem, DipoleSystem, Interaction,
    InteractionError,
};
use crate::quantities::{Constants, Quantity, QuantityError, LENGTH, MASS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegimeError {
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

/// Band of the ratio λ/d: one decade of slack on each side of λ = d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    #[serde(rename = "narrow")]
    Narrow,
    #[serde(rename = "broad")]
    Broad,
    #[serde(rename = "intermediate")]
    Intermediate,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Narrow => write!(f, "narrow"),
            Regime::Broad => write!(f, "broad"),
            Regime::Intermediate => write!(f, "intermediate"),
        }
    }
}

/// Classify by λ/d: ≤ 0.1 narrow, ≥ 10 broad, otherwise intermediate.
pub fn classify_regime(lambda: Quantity, d: Quantity) -> Result<Regime, RegimeError> {
    for (q, name) in [(lambda, "lambda"), (d, "d")] {
        if !q.has_dim(LENGTH) {
            return Err(QuantityError::DimensionMismatch(q.dim(), LENGTH).into());
        }
        q.expect_positive(name)?;
    }
    let ratio = lambda.value() / d.value();
    Ok(if ratio <= 0.1 {
        Regime::Narrow
    } else if ratio >= 10.0 {
        Regime::Broad
    } else {
        Regime::Intermediate
    })
}

/// Temperature T* = ħ²/(M κ d²) at which the thermal wavelength equals d.
pub fn crossover_temperature(m: Quantity, d: Quantity) -> Result<Quantity, RegimeError> {
    if !m.has_dim(MASS) {
        return Err(QuantityError::DimensionMismatch(m.dim(), MASS).into());
    }
    if !d.has_dim(LENGTH) {
        return Err(QuantityError::DimensionMismatch(d.dim(), LENGTH).into());
    }
    let m = m.expect_positive("M")?;
    let d = d.expect_positive("d")?;
    let c = Constants::published();
    Ok(c.hbar.powi(2) / (m * c.kappa * d.powi(2)))
}

/// One temperature point of a sweep. Estimator failures leave the
/// corresponding cell empty and are described in `note`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub t_k: f64,
    pub lambda_m: f64,
    /// λ/d.
    pub ratio: f64,
    pub regime: Regime,
    pub tau_narrow_s: Option<f64>,
    pub tau_broad_s: Option<f64>,
    pub tau_oracle_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    pub t_min_k: f64,
    pub t_max_k: f64,
    pub points: usize,
    pub log_spacing: bool,
    pub with_oracle: bool,
}

/// Evaluate the narrow and broad closed forms (and optionally the oracle)
/// across a temperature grid.
pub fn temperature_sweep(
    sc: &ScenarioParams,
    interaction: Interaction,
    cfg: &SweepConfig,
) -> Result<Vec<SweepRow>, RegimeError> {
    sc.validate()?;
    if !(cfg.t_min_k > 0.0 && cfg.t_min_k < cfg.t_max_k) {
        return Err(RegimeError::InvalidSweep(format!(
            "need 0 < Tmin < Tmax, got [{}, {}]",
            cfg.t_min_k, cfg.t_max_k
        )));
    }
    if cfg.points < 2 {
        return Err(RegimeError::InvalidSweep(format!(
            "need at least 2 points, got {}",
            cfg.points
        )));
    }
    let grid = temperature_grid(cfg);
    grid.iter().map(|&t_k| sweep_row(sc, interaction, t_k, cfg.with_oracle)).collect()
}

fn temperature_grid(cfg: &SweepConfig) -> Vec<f64> {
    let n = cfg.points;
    (0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            if cfg.log_spacing {
                cfg.t_min_k * (cfg.t_max_k / cfg.t_min_k).powf(f)
            } else {
                cfg.t_min_k + f * (cfg.t_max_k - cfg.t_min_k)
            }
        })
        .collect()
}

/// Rows are pure functions of T, so sweeps can also be assembled point by
/// point.
pub fn sweep_row(
    sc: &ScenarioParams,
    interaction: Interaction,
    t_k: f64,
    with_oracle: bool,
) -> Result<SweepRow, RegimeError> {
    let mut at_t = sc.clone();
    at_t.temperature = Quantity::kelvin(t_k);
    let lambda = at_t.thermal_wavelength()?;
    let regime = classify_regime(lambda, at_t.r)?;
    let mut note: Option<String> = None;
    let note_err = |what: &str, e: String, note: &mut Option<String>| {
        let line = format!("{what}: {e}");
        *note = Some(match note.take() {
            Some(prev) => format!("{prev}; {line}"),
            None => line,
        });
    };

    let narrow = match interaction {
        Interaction::Ion => tau_ion_narrow(&at_t),
        Interaction::Dipole => tau_dipole_narrow(&at_t),
    };
    let tau_narrow_s = match narrow {
        Ok(est) => Some(est.tau_s()),
        Err(e) => {
            note_err("narrow", e.to_string(), &mut note);
            None
        }
    };
    let broad = match interaction {
        Interaction::Ion => tau_ion_broad(&at_t),
        Interaction::Dipole => tau_dipole_broad(&at_t),
    };
    let tau_broad_s = match broad {
        Ok(est) => Some(est.tau_s()),
        Err(e) => {
            note_err("broad", e.to_string(), &mut note);
            None
        }
    };
    let tau_oracle_s = if with_oracle {
        match oracle_tau(&at_t, interaction, lambda, regime) {
            Ok(tau) => Some(tau),
            Err(e) => {
                note_err("oracle", e.to_string(), &mut note);
                None
            }
        }
    } else {
        None
    };

    Ok(SweepRow {
        t_k,
        lambda_m: lambda.value(),
        ratio: lambda.value() / at_t.r.value(),
        regime,
        tau_narrow_s,
        tau_broad_s,
        tau_oracle_s,
        note,
    })
}

/// Oracle decoherence time for a scenario at its thermal wavelength, using
/// the default curve policy.
pub fn oracle_tau(
    sc: &ScenarioParams,
    interaction: Interaction,
    lambda: Quantity,
    regime: Regime,
) -> Result<f64, RegimeError> {
    let c = Constants::published();
    let ens = EnsembleSpec::new(lambda).map_err(evo_err)?;
    let quad = QuadratureConfig::default();
    let grid = default_time_grid(grid_center_tau(sc, interaction, lambda)?);
    let curve = match interaction {
        Interaction::Ion => {
            let sys = CoulombSystem::new(sc.q1(), c.elementary_charge, sc.r, sc.s, sc.y1)?;
            let f = coulomb_phase_fn(&sys);
            decay_curve(&f, &ens, &grid, &quad, &sc.id, interaction).map_err(evo_err)?
        }
        Interaction::Dipole => {
            let sys = DipoleSystem::new(
                sc.dipole_moment,
                sc.alpha,
                c.elementary_charge,
                sc.r,
                sc.s,
            )?;
            let f = dipole_phase_fn(&sys);
            decay_curve(&f, &ens, &grid, &quad, &sc.id, interaction).map_err(evo_err)?
        }
    };
    let est = extract_tau(&curve, default_threshold(), regime).map_err(evo_err)?;
    Ok(est.tau_s())
}

/// Timescale used to center oracle time grids: the wavepacket-scale form
/// with the full (λ² + d²) power, which interpolates the narrow and broad
/// closed forms and stays within a small factor of the true crossing in
/// every band.
pub fn grid_center_tau(
    sc: &ScenarioParams,
    interaction: Interaction,
    lambda: Quantity,
) -> Result<f64, RegimeError> {
    let c = Constants::published();
    let (lam, d, s) = (lambda.value(), sc.r.value(), sc.s.value());
    let hbar = Constants::hbar_si();
    Ok(match interaction {
        Interaction::Ion => {
            let kqq = c.coulomb_k.value() * sc.q1().value() * c.elementary_charge.value();
            hbar * (lam * lam + d * d).powf(1.5) / (kqq * s * lam)
        }
        Interaction::Dipole => {
            let omega = crate::interactions::omega_dipole(sc.alpha)?;
            let k3 = 3.0 * c.coulomb_k.value()
                * c.elementary_charge.value()
                * sc.dipole_moment.value()
                * s;
            hbar * (lam * lam + d * d).powi(2) * omega / (k3 * lam)
        }
    })
}

fn evo_err(e: crate::evolution::EvolutionError) -> RegimeError {
    RegimeError::InvalidSweep(e.to_string())
}
