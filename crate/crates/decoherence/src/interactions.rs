//! System–environment interaction potentials: the exact and Taylor-expanded
//! Coulomb difference, the dipole difference term, and the kink dipole
//! profile along the microtubule axis.
//!
//! Geometry convention: the system sits at the origin, its superposed copy
//! at r1' = (x1, y1, 0); the environmental ion moves along the x axis at
//! r2 = (x2, d, 0) with closest approach d.

use serde::Serialize;
use thiserror::Error;

use crate::quantities::{Quantity, QuantityError, CHARGE, DIPOLE_MOMENT, LENGTH};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InteractionError {
    #[error(transparent)]
    Quantity(#[from] QuantityError),
    #[error("coincident points: |r2 - r1'| = 0 in exact Coulomb mode")]
    CoincidentPoints,
    #[error("dipole geometric factor diverges: |cos(alpha)| = {0:e} < 1e-9")]
    GeometricFactorSingular(f64),
}

/// Which interaction couples the system to the environmental ion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Interaction {
    Ion,
    Dipole,
}

impl std::fmt::Display for Interaction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Interaction::Ion => write!(f, "ion"),
            Interaction::Dipole => write!(f, "dipole"),
        }
    }
}

/// Charged ring (q1 = N e) interacting with an environmental ion (q2)
/// through the Coulomb potential.
#[derive(Debug, Clone, Copy)]
pub struct CoulombSystem {
    /// Macromolecule ring charge, C.
    pub q1: Quantity,
    /// Environmental ion charge, C.
    pub q2: Quantity,
    /// Closest approach, m.
    pub d: Quantity,
    /// Superposed-position displacement along x, m.
    pub x1: Quantity,
    /// Superposed-position displacement along y, m.
    pub y1: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoulombMode {
    /// 1/|r2 - r1'| - 1/|r2|, no expansion (z1 fixed to 0).
    Exact,
    /// Second-order Taylor difference K q1 q2 (x1 x2 + y1 d)/(x2^2+d^2)^{3/2}.
    Expanded,
}

impl CoulombSystem {
    pub fn new(
        q1: Quantity,
        q2: Quantity,
        d: Quantity,
        x1: Quantity,
        y1: Quantity,
    ) -> Result<CoulombSystem, InteractionError> {
        expect_dim(q1, CHARGE)?;
        expect_dim(q2, CHARGE)?;
        expect_dim(x1, LENGTH)?;
        expect_dim(y1, LENGTH)?;
        let d = d_positive(d)?;
        Ok(CoulombSystem { q1, q2, d, x1, y1 })
    }
}

/// Tubulin dipole interacting with an environmental ion of charge q.
#[derive(Debug, Clone, Copy)]
pub struct DipoleSystem {
    /// Dipole moment magnitude, C m.
    pub p: Quantity,
    /// Dipole orientation angle, rad; p_x = p cos(alpha), p_y = p sin(alpha).
    pub alpha: f64,
    /// Environmental ion charge, C.
    pub q: Quantity,
    /// Closest approach, m.
    pub d: Quantity,
    /// Superposition separation |r1'|, m.
    pub s: Quantity,
}

impl DipoleSystem {
    pub fn new(
        p: Quantity,
        alpha: f64,
        q: Quantity,
        d: Quantity,
        s: Quantity,
    ) -> Result<DipoleSystem, InteractionError> {
        expect_dim(p, DIPOLE_MOMENT)?;
        expect_dim(q, CHARGE)?;
        expect_dim(s, LENGTH)?;
        let d = d_positive(d)?;
        if p.value() < 0.0 || s.value() < 0.0 {
            return Err(QuantityError::NonPositive {
                name: "p and s must be nonnegative",
                value: p.value().min(s.value()),
            }
            .into());
        }
        Ok(DipoleSystem { p, alpha, q, d, s })
    }

    /// Geometric factor sec(alpha); errors near alpha = π/2 where it diverges.
    pub fn omega_dipole(&self) -> Result<f64, InteractionError> {
        omega_dipole(self.alpha)
    }
}

pub fn omega_dipole(alpha: f64) -> Result<f64, InteractionError> {
    let c = alpha.cos();
    if c.abs() < 1e-9 {
        return Err(InteractionError::GeometricFactorSingular(c.abs()));
    }
    Ok(1.0 / c)
}

/// Sign-function dipole profile of a kink centered at z0: +p0 past the
/// kink, -p0 before it, 0 at the center.
#[derive(Debug, Clone, Copy)]
pub struct KinkProfile {
    pub p0: Quantity,
    pub z0: Quantity,
}

pub fn kink_moment(profile: &KinkProfile, z: Quantity) -> Result<Quantity, InteractionError> {
    expect_dim(profile.p0, DIPOLE_MOMENT)?;
    expect_dim(profile.z0, LENGTH)?;
    expect_dim(z, LENGTH)?;
    let delta = z.value() - profile.z0.value();
    let sign = if delta > 0.0 {
        1.0
    } else if delta < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(profile.p0 * sign)
}

/// Potential difference V(R') - V(R) seen by the superposed ring charge,
/// at ion position x2.
pub fn coulomb_delta_v(
    sys: &CoulombSystem,
    x2: Quantity,
    mode: CoulombMode,
) -> Result<Quantity, InteractionError> {
    expect_dim(x2, LENGTH)?;
    let kq = crate::quantities::Constants::published().coulomb_k * sys.q1 * sys.q2;
    let r2_sq = (x2 * x2).try_add(sys.d * sys.d)?;
    match mode {
        CoulombMode::Expanded => {
            let num = (sys.x1 * x2).try_add(sys.y1 * sys.d)?;
            let denom = r2_sq.pow_half(3)?;
            Ok(kq * (num / denom))
        }
        CoulombMode::Exact => {
            let dx = x2.try_sub(sys.x1)?;
            let dy = sys.d.try_sub(sys.y1)?;
            let sep_sq = (dx * dx).try_add(dy * dy)?;
            if sep_sq.value() == 0.0 {
                return Err(InteractionError::CoincidentPoints);
            }
            let inv_sep = sep_sq.sqrt()?.recip();
            let inv_r2 = r2_sq.sqrt()?.recip();
            Ok(kq * inv_sep.try_sub(inv_r2)?)
        }
    }
}

/// Phase-generating dipole difference term
/// 3 K q s (p_x x2 + p_y d)/(x2^2 + d^2)^2.
pub fn dipole_delta_v(sys: &DipoleSystem, x2: Quantity) -> Result<Quantity, InteractionError> {
    expect_dim(x2, LENGTH)?;
    let px = sys.p * sys.alpha.cos();
    let py = sys.p * sys.alpha.sin();
    let num = (px * x2).try_add(py * sys.d)?;
    let denom = ((x2 * x2).try_add(sys.d * sys.d)?).powi(2);
    let k = crate::quantities::Constants::published().coulomb_k;
    Ok(k * sys.q * sys.s * (num / denom) * 3.0)
}

/// Raw-f64 evaluator of the expanded Coulomb difference, for the
/// quadrature oracle's inner loop. Same formula as
/// [`coulomb_delta_v`] in `Expanded` mode; equality is tested.
pub fn coulomb_phase_fn(sys: &CoulombSystem) -> impl Fn(f64) -> f64 {
    let kq = crate::quantities::COULOMB_K * sys.q1.value() * sys.q2.value();
    let (x1, y1, d) = (sys.x1.value(), sys.y1.value(), sys.d.value());
    move |x2: f64| kq * (x1 * x2 + y1 * d) / (x2 * x2 + d * d).powf(1.5)
}

/// Raw-f64 evaluator of the dipole difference term, mirror of
/// [`dipole_delta_v`].
pub fn dipole_phase_fn(sys: &DipoleSystem) -> impl Fn(f64) -> f64 {
    let k3 = 3.0 * crate::quantities::COULOMB_K * sys.q.value() * sys.s.value();
    let (px, py) = (
        sys.p.value() * sys.alpha.cos(),
        sys.p.value() * sys.alpha.sin(),
    );
    let d = sys.d.value();
    move |x2: f64| {
        let r = x2 * x2 + d * d;
        k3 * (px * x2 + py * d) / (r * r)
    }
}

fn expect_dim(q: Quantity, dim: crate::quantities::Dimension) -> Result<(), InteractionError> {
    if !q.has_dim(dim) {
        return Err(QuantityError::DimensionMismatch(q.dim(), dim).into());
    }
    Ok(())
}

fn d_positive(d: Quantity) -> Result<Quantity, InteractionError> {
    expect_dim(d, LENGTH)?;
    Ok(d.expect_positive("d")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantities::{qty, Quantity, DIPOLE_MOMENT, ENERGY};

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn cm(v: f64) -> Quantity {
        qty(v, DIPOLE_MOMENT).unwrap()
    }

    #[test]
    fn kink_signs() {
        let profile = KinkProfile {
            p0: cm(1e-27),
            z0: Quantity::meters(0.0),
        };
        let at = |z: f64| kink_moment(&profile, Quantity::meters(z)).unwrap().value();
        assert_eq!(at(5e-9), 1e-27);
        assert_eq!(at(-5e-9), -1e-27);
        assert_eq!(at(0.0), 0.0);
    }

    #[test]
    fn kink_odd_symmetry() {
        let profile = KinkProfile {
            p0: cm(2e-27),
            z0: Quantity::meters(1e-9),
        };
        for u in [1e-12, 3e-10, 7e-9] {
            let plus = kink_moment(&profile, Quantity::meters(1e-9 + u)).unwrap();
            let minus = kink_moment(&profile, Quantity::meters(1e-9 - u)).unwrap();
            assert_eq!(plus.value(), -minus.value());
        }
    }

    fn ring() -> CoulombSystem {
        CoulombSystem::new(
            Quantity::coulombs(1.6e-16),
            Quantity::coulombs(1.6e-19),
            Quantity::meters(2.4e-8),
            Quantity::meters(2.4e-8),
            Quantity::meters(0.0),
        )
        .unwrap()
    }

    #[test]
    fn coulomb_zero_separation_vanishes() {
        let mut sys = ring();
        sys.x1 = Quantity::meters(0.0);
        sys.y1 = Quantity::meters(0.0);
        for x2 in [-3e-8, 0.0, 1e-8] {
            let x2 = Quantity::meters(x2);
            assert_eq!(coulomb_delta_v(&sys, x2, CoulombMode::Expanded).unwrap().value(), 0.0);
            assert_eq!(coulomb_delta_v(&sys, x2, CoulombMode::Exact).unwrap().value(), 0.0);
        }
    }

    #[test]
    fn coulomb_expanded_frozen_value() {
        // frozen by direct evaluation of the closed expression
        let dv = coulomb_delta_v(&ring(), Quantity::meters(2.4e-8), CoulombMode::Expanded).unwrap();
        assert_eq!(dv.dim(), ENERGY);
        assert!(rel_err(dv.value(), 3.3941125496954286e-18) < 1e-12);
    }

    #[test]
    fn coulomb_expanded_linear_in_displacement() {
        let sys = ring();
        let x2 = Quantity::meters(1.1e-8);
        let base = coulomb_delta_v(&sys, x2, CoulombMode::Expanded).unwrap();
        for a in [0.5, 2.0, -3.0] {
            let scaled = CoulombSystem {
                x1: sys.x1 * a,
                y1: sys.y1 * a,
                ..sys
            };
            let dv = coulomb_delta_v(&scaled, x2, CoulombMode::Expanded).unwrap();
            assert!(rel_err(dv.value(), base.value() * a) < 1e-12);
        }
    }

    #[test]
    fn coulomb_exact_matches_expanded_for_small_displacement() {
        // x1/d = 1e-4, swept over x2 in [-d, d]
        let d = 2.4e-8;
        let sys = CoulombSystem::new(
            Quantity::coulombs(1.6e-16),
            Quantity::coulombs(1.6e-19),
            Quantity::meters(d),
            Quantity::meters(1e-4 * d),
            Quantity::meters(0.0),
        )
        .unwrap();
        for i in 0..41 {
            let x2 = Quantity::meters(-d + 2.0 * d * i as f64 / 40.0);
            // near x2 = 0 the exact form is a difference of nearly equal
            // reciprocals and cancels below double precision
            if x2.value().abs() < 1e-6 * d {
                continue;
            }
            let exact = coulomb_delta_v(&sys, x2, CoulombMode::Exact).unwrap().value();
            let expanded = coulomb_delta_v(&sys, x2, CoulombMode::Expanded).unwrap().value();
            if expanded != 0.0 {
                assert!(rel_err(exact, expanded) < 1e-3, "x2 = {:?}", x2);
            }
        }
    }

    #[test]
    fn coulomb_expansion_error_shrinks_with_ratio() {
        let d = 2.4e-8;
        let worst = |ratio: f64| -> f64 {
            let sys = CoulombSystem::new(
                Quantity::coulombs(1.6e-16),
                Quantity::coulombs(1.6e-19),
                Quantity::meters(d),
                Quantity::meters(ratio * d),
                Quantity::meters(0.0),
            )
            .unwrap();
            let mut w: f64 = 0.0;
            for i in 1..40 {
                let x2 = Quantity::meters(-d + 2.0 * d * i as f64 / 40.0);
                let exact = coulomb_delta_v(&sys, x2, CoulombMode::Exact).unwrap().value();
                let exp = coulomb_delta_v(&sys, x2, CoulombMode::Expanded).unwrap().value();
                if exp != 0.0 {
                    w = w.max(rel_err(exact, exp));
                }
            }
            w
        };
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&r| worst(r)).collect();
        assert!(errs[1] < errs[0]);
        assert!(errs[2] < errs[1]);
    }

    #[test]
    fn coulomb_exact_coincident_is_error() {
        let sys = CoulombSystem::new(
            Quantity::coulombs(1.6e-16),
            Quantity::coulombs(1.6e-19),
            Quantity::meters(2.4e-8),
            Quantity::meters(1e-8),
            Quantity::meters(2.4e-8), // y1 = d, so x2 = x1 is coincident
        )
        .unwrap();
        let got = coulomb_delta_v(&sys, Quantity::meters(1e-8), CoulombMode::Exact);
        assert!(matches!(got, Err(InteractionError::CoincidentPoints)));
    }

    fn dipole() -> DipoleSystem {
        DipoleSystem::new(
            cm(1e-27),
            0.0,
            Quantity::coulombs(1.6e-19),
            Quantity::meters(2.4e-8),
            Quantity::meters(2.4e-8),
        )
        .unwrap()
    }

    #[test]
    fn dipole_frozen_value() {
        let dv = dipole_delta_v(&dipole(), Quantity::meters(2.4e-8)).unwrap();
        assert_eq!(dv.dim(), ENERGY);
        assert!(rel_err(dv.value(), 1.875e-21) < 1e-12);
    }

    #[test]
    fn dipole_vanishes_without_moment_or_separation() {
        let mut sys = dipole();
        sys.p = cm(0.0);
        assert_eq!(dipole_delta_v(&sys, Quantity::meters(1e-8)).unwrap().value(), 0.0);
        let mut sys = dipole();
        sys.s = Quantity::meters(0.0);
        assert_eq!(dipole_delta_v(&sys, Quantity::meters(1e-8)).unwrap().value(), 0.0);
    }

    #[test]
    fn dipole_odd_in_x2_at_alpha_zero() {
        let sys = dipole();
        for x2 in [1e-9, 8e-9, 3e-8] {
            let plus = dipole_delta_v(&sys, Quantity::meters(x2)).unwrap().value();
            let minus = dipole_delta_v(&sys, Quantity::meters(-x2)).unwrap().value();
            assert!(rel_err(plus, -minus) < 1e-12);
        }
    }

    #[test]
    fn dipole_even_in_x2_at_alpha_half_pi() {
        let mut sys = dipole();
        sys.alpha = std::f64::consts::FRAC_PI_2;
        for x2 in [1e-9, 8e-9, 3e-8] {
            let plus = dipole_delta_v(&sys, Quantity::meters(x2)).unwrap().value();
            let minus = dipole_delta_v(&sys, Quantity::meters(-x2)).unwrap().value();
            assert!(rel_err(plus, minus) < 1e-10);
        }
    }

    #[test]
    fn omega_dipole_guard() {
        assert_eq!(omega_dipole(0.0).unwrap(), 1.0);
        assert!((omega_dipole(std::f64::consts::FRAC_PI_3).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            omega_dipole(std::f64::consts::FRAC_PI_2),
            Err(InteractionError::GeometricFactorSingular(_))
        ));
    }

    #[test]
    fn phase_fns_match_quantity_path() {
        let csys = ring();
        let f = coulomb_phase_fn(&csys);
        let dsys = dipole();
        let g = dipole_phase_fn(&dsys);
        for x2 in [-2.4e-8, -1e-9, 5e-9, 2.4e-8] {
            let via_qty = coulomb_delta_v(&csys, Quantity::meters(x2), CoulombMode::Expanded)
                .unwrap()
                .value();
            assert!(rel_err(f(x2), via_qty) < 1e-14);
            let via_qty = dipole_delta_v(&dsys, Quantity::meters(x2)).unwrap().value();
            assert!(rel_err(g(x2), via_qty) < 1e-14);
        }
    }
}
