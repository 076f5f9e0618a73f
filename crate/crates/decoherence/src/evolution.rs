//! Brute-force coherence oracle: numerically average the interaction
//! phase over a Gaussian ensemble of ion positions to get the normalized
//! coherence factor D(t), then extract a decoherence time from the decay
//! curve.
//!
//! The integrand oscillates violently at late times, so panels are split
//! until the phase change per panel is below `max_phase_step` before a
//! fixed-order Gauss–Legendre rule is applied. The oracle always
//! integrates the unapproximated potential, so it stays independent of
//! the closed forms it validates.

use std::sync::OnceLock;

use thiserror::Error;

use crate::estimators::{EstimatorError, Method, TauEstimate};
use crate::interactions::Interaction;
use crate::quantities::{Constants, Quantity, QuantityError, LENGTH, TIME};
use crate::regimes::Regime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("quadrature failed to converge on [{lo:e}, {hi:e}] (err {err:e}, tol {tol:e})")]
    Convergence { lo: f64, hi: f64, err: f64, tol: f64 },
    #[error("curve never crosses threshold {threshold} (minimum D = {min_value})")]
    NoCrossing { threshold: f64, min_value: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Gaussian ensemble of ion positions: weight exp[-(x2/2λ)^2], standard
/// deviation λ√2, integrated over ±truncation standard deviations.
#[derive(Debug, Clone, Copy)]
pub struct EnsembleSpec {
    pub lambda: Quantity,
    pub truncation: f64,
}

impl EnsembleSpec {
    pub fn new(lambda: Quantity) -> Result<EnsembleSpec, EvolutionError> {
        EnsembleSpec::with_truncation(lambda, 8.0)
    }

    pub fn with_truncation(lambda: Quantity, truncation: f64) -> Result<EnsembleSpec, EvolutionError> {
        if !lambda.has_dim(LENGTH) {
            return Err(QuantityError::DimensionMismatch(lambda.dim(), LENGTH).into());
        }
        let lambda = lambda.expect_positive("lambda")?;
        if !(truncation >= 4.0) {
            return Err(EvolutionError::InvalidInput(format!(
                "truncation must be >= 4, got {truncation}"
            )));
        }
        Ok(EnsembleSpec { lambda, truncation })
    }

    fn half_width(&self) -> f64 {
        self.truncation * self.lambda.value() * std::f64::consts::SQRT_2
    }
}

/// Controls for the oscillatory quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Maximum phase change per panel, rad.
    pub max_phase_step: f64,
    /// Total panel-split budget.
    pub max_subdivisions: u32,
    /// Relative tolerance on D(t).
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            max_phase_step: std::f64::consts::FRAC_PI_8,
            max_subdivisions: 2_000_000,
            rel_tol: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        if !(self.max_phase_step > 0.0 && self.max_phase_step <= std::f64::consts::FRAC_PI_2) {
            return Err(EvolutionError::InvalidInput(format!(
                "max_phase_step must be in (0, π/2], got {}",
                self.max_phase_step
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(EvolutionError::InvalidInput(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Sampled normalized coherence factor D(t).
#[derive(Debug, Clone)]
pub struct DecayCurve {
    pub scenario_id: String,
    pub times_s: Vec<f64>,
    pub values: Vec<f64>,
    pub interaction: Interaction,
}

/// Threshold at which a pure Gaussian envelope exp[-(t/τ)^2] crosses at
/// exactly t = τ.
pub fn default_threshold() -> f64 {
    (-1.0f64).exp()
}

/// D(t) = |∫ w(x2) exp[-i ΔV(x2) t/ħ] dx2| / ∫ w(x2) dx2.
///
/// `delta_v` maps an ion position in meters to an energy in joules.
pub fn coherence_factor(
    delta_v: &dyn Fn(f64) -> f64,
    ens: &EnsembleSpec,
    t: Quantity,
    cfg: &QuadratureConfig,
) -> Result<f64, EvolutionError> {
    if !t.has_dim(TIME) {
        return Err(QuantityError::DimensionMismatch(t.dim(), TIME).into());
    }
    if t.value() < 0.0 {
        return Err(EvolutionError::InvalidInput(format!(
            "t must be nonnegative, got {:e}",
            t.value()
        )));
    }
    cfg.validate()?;
    let (re, im, w) = integrate_phasor(delta_v, ens, t.value(), cfg)?;
    Ok(re.hypot(im) / w)
}

/// Pointwise [`coherence_factor`] over a time grid starting at t = 0.
pub fn decay_curve(
    delta_v: &dyn Fn(f64) -> f64,
    ens: &EnsembleSpec,
    t_grid_s: &[f64],
    cfg: &QuadratureConfig,
    scenario_id: &str,
    interaction: Interaction,
) -> Result<DecayCurve, EvolutionError> {
    if t_grid_s.is_empty() {
        return Err(EvolutionError::InvalidInput("empty time grid".into()));
    }
    if t_grid_s[0] != 0.0 {
        return Err(EvolutionError::InvalidInput(
            "time grid must start at 0".into(),
        ));
    }
    if !t_grid_s.windows(2).all(|w| w[0] < w[1]) {
        return Err(EvolutionError::InvalidInput(
            "time grid must be strictly increasing".into(),
        ));
    }
    let mut values = Vec::with_capacity(t_grid_s.len());
    for &t in t_grid_s {
        values.push(coherence_factor(delta_v, ens, Quantity::seconds(t), cfg)?);
    }
    Ok(DecayCurve {
        scenario_id: scenario_id.to_string(),
        times_s: t_grid_s.to_vec(),
        values,
        interaction,
    })
}

/// Default sampling policy: t = 0 followed by 60 geometric points over
/// [0.01 τ_est, 100 τ_est].
pub fn default_time_grid(tau_est_s: f64) -> Vec<f64> {
    let mut grid = Vec::with_capacity(61);
    grid.push(0.0);
    let lo = 0.01 * tau_est_s;
    let hi = 100.0 * tau_est_s;
    let n = 60;
    for i in 0..n {
        grid.push(lo * (hi / lo).powf(i as f64 / (n - 1) as f64));
    }
    grid
}

/// First crossing of `threshold`, log-interpolated between bracketing
/// samples. `regime` labels the estimate; the curve itself does not carry
/// the interaction distance needed to classify.
pub fn extract_tau(
    curve: &DecayCurve,
    threshold: f64,
    regime: Regime,
) -> Result<TauEstimate, EvolutionError> {
    if curve.times_s.len() < 2 {
        return Err(EvolutionError::InvalidInput(
            "curve needs at least 2 points".into(),
        ));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(EvolutionError::InvalidInput(format!(
            "threshold must be in (0, 1), got {threshold}"
        )));
    }
    let mut min_value = f64::INFINITY;
    for i in 0..curve.values.len() {
        let v = curve.values[i];
        min_value = min_value.min(v);
        if v < threshold && i > 0 {
            let (t0, t1) = (curve.times_s[i - 1], curve.times_s[i]);
            let (d0, d1) = (curve.values[i - 1], curve.values[i]);
            let (l0, l1) = (d0.ln(), d1.ln());
            let frac = (threshold.ln() - l0) / (l1 - l0);
            // log-linear in t unless the bracket starts at t = 0
            let tau = if t0 > 0.0 {
                (t0.ln() + frac * (t1.ln() - t0.ln())).exp()
            } else {
                t0 + frac * (t1 - t0)
            };
            return Ok(TauEstimate::new(
                Quantity::seconds(tau),
                Method::OracleQuadrature,
                regime,
                &curve.scenario_id,
            )?);
        }
    }
    Err(EvolutionError::NoCrossing {
        threshold,
        min_value,
    })
}

// ---------------------------------------------------------------------
// oscillatory quadrature internals

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Newton iteration on P_n; nodes on (-1, 1)
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn rules() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static RULES: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre(7), gauss_legendre(15)))
}

struct PanelResult {
    re: f64,
    im: f64,
    w: f64,
    err: f64,
    phase_span: f64,
}

fn eval_panel(
    delta_v: &dyn Fn(f64) -> f64,
    inv_two_lambda: f64,
    t_over_hbar: f64,
    lo: f64,
    hi: f64,
) -> PanelResult {
    let ((n7, w7), (n15, w15)) = rules();
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut acc15 = (0.0f64, 0.0f64, 0.0f64);
    let mut acc7 = (0.0f64, 0.0f64);
    let mut phase_min = f64::INFINITY;
    let mut phase_max = f64::NEG_INFINITY;
    for (x, w) in n15.iter().zip(w15) {
        let x2 = mid + half * x;
        let g = x2 * inv_two_lambda;
        let weight = (-g * g).exp();
        let phase = delta_v(x2) * t_over_hbar;
        phase_min = phase_min.min(phase);
        phase_max = phase_max.max(phase);
        acc15.0 += w * weight * phase.cos();
        acc15.1 -= w * weight * phase.sin();
        acc15.2 += w * weight;
    }
    for (x, w) in n7.iter().zip(w7) {
        let x2 = mid + half * x;
        let g = x2 * inv_two_lambda;
        let weight = (-g * g).exp();
        let phase = delta_v(x2) * t_over_hbar;
        acc7.0 += w * weight * phase.cos();
        acc7.1 -= w * weight * phase.sin();
    }
    let err = ((acc15.0 - acc7.0).powi(2) + (acc15.1 - acc7.1).powi(2)).sqrt() * half;
    PanelResult {
        re: acc15.0 * half,
        im: acc15.1 * half,
        w: acc15.2 * half,
        err,
        phase_span: phase_max - phase_min,
    }
}

fn integrate_phasor(
    delta_v: &dyn Fn(f64) -> f64,
    ens: &EnsembleSpec,
    t_s: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64, f64), EvolutionError> {
    let a = ens.half_width();
    let lambda = ens.lambda.value();
    let inv_two_lambda = 1.0 / (2.0 * lambda);
    let t_over_hbar = t_s / Constants::hbar_si();
    // full-line weight integral, used as the error scale
    let w_scale = 2.0 * lambda * std::f64::consts::PI.sqrt();

    let initial = 16usize;
    let mut stack: Vec<(f64, f64)> = (0..initial)
        .rev()
        .map(|i| {
            let lo = -a + 2.0 * a * i as f64 / initial as f64;
            let hi = -a + 2.0 * a * (i + 1) as f64 / initial as f64;
            (lo, hi)
        })
        .collect();
    let mut splits: u32 = 0;
    let mut acc = (0.0f64, 0.0f64, 0.0f64);
    while let Some((lo, hi)) = stack.pop() {
        let panel = eval_panel(delta_v, inv_two_lambda, t_over_hbar, lo, hi);
        let tol = cfg.rel_tol * w_scale * (hi - lo) / (2.0 * a);
        let needs_split = panel.phase_span > cfg.max_phase_step || panel.err > tol;
        if !needs_split {
            acc.0 += panel.re;
            acc.1 += panel.im;
            acc.2 += panel.w;
        } else if splits < cfg.max_subdivisions {
            splits += 1;
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
        } else if panel.err <= tol {
            // phase condition unmet but the embedded error estimate passes
            acc.0 += panel.re;
            acc.1 += panel.im;
            acc.2 += panel.w;
        } else {
            return Err(EvolutionError::Convergence {
                lo,
                hi,
                err: panel.err,
                tol,
            });
        }
    }
    Ok(acc)
}
