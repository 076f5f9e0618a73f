//! Dimensioned scalars over five SI bases (mass, length, time,
//! temperature, electric charge) plus the fixed physical constants every
//! formula in this crate is evaluated with.
//!
//! Charge is a base dimension here instead of current: the formulas work
//! in charges q1, q2 and the Coulomb constant K, and that choice keeps
//! K's exponents small. Half-integer exponents are allowed (momentum-like
//! quantities such as sqrt(M kT) appear all over the estimators); anything
//! with a denominator above 2 is rejected as a likely formula typo.

use std::fmt;
use std::ops::{Div, Mul, Neg};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantityError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(Dimension, Dimension),
    #[error("square root of negative value {0}")]
    NegativeSqrt(f64),
    #[error("operation would produce an exponent denominator above 2")]
    FractionalExponent,
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("{name} must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// SI dimension as exponents over (mass, length, time, temperature, charge),
/// stored in half-units so that square roots stay exact.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension {
    /// Twice the exponent of each base, in the order M, L, T, Θ, Q.
    half: [i16; 5],
}

pub const DIMENSIONLESS: Dimension = Dimension::new(0, 0, 0, 0, 0);
pub const MASS: Dimension = Dimension::new(1, 0, 0, 0, 0);
pub const LENGTH: Dimension = Dimension::new(0, 1, 0, 0, 0);
pub const TIME: Dimension = Dimension::new(0, 0, 1, 0, 0);
pub const TEMPERATURE: Dimension = Dimension::new(0, 0, 0, 1, 0);
pub const CHARGE: Dimension = Dimension::new(0, 0, 0, 0, 1);
/// J = kg m^2 s^-2
pub const ENERGY: Dimension = Dimension::new(1, 2, -2, 0, 0);
/// s^-1
pub const RATE: Dimension = Dimension::new(0, 0, -1, 0, 0);
/// C m
pub const DIPOLE_MOMENT: Dimension = Dimension::new(0, 1, 0, 0, 1);

impl Dimension {
    pub const fn new(mass: i16, length: i16, time: i16, temperature: i16, charge: i16) -> Self {
        Dimension {
            half: [
                2 * mass,
                2 * length,
                2 * time,
                2 * temperature,
                2 * charge,
            ],
        }
    }

    pub fn is_dimensionless(&self) -> bool {
        self.half == [0; 5]
    }

    pub fn combine(self, other: Dimension) -> Dimension {
        let mut half = [0i16; 5];
        for i in 0..5 {
            half[i] = self.half[i] + other.half[i];
        }
        Dimension { half }
    }

    pub fn invert(self) -> Dimension {
        let mut half = self.half;
        for h in &mut half {
            *h = -*h;
        }
        Dimension { half }
    }

    pub fn powi(self, n: i16) -> Dimension {
        let mut half = self.half;
        for h in &mut half {
            *h *= n;
        }
        Dimension { half }
    }

    /// Halve every exponent. Fails if any exponent is already half-integer.
    pub fn sqrt(self) -> Result<Dimension, QuantityError> {
        let mut half = [0i16; 5];
        for i in 0..5 {
            if self.half[i] % 2 != 0 {
                return Err(QuantityError::FractionalExponent);
            }
            half[i] = self.half[i] / 2;
        }
        Ok(Dimension { half })
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return write!(f, "1");
        }
        const NAMES: [&str; 5] = ["M", "L", "T", "Th", "Q"];
        let mut first = true;
        for i in 0..5 {
            if self.half[i] == 0 {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if self.half[i] % 2 == 0 {
                write!(f, "{}^{}", NAMES[i], self.half[i] / 2)?;
            } else {
                write!(f, "{}^{}/2", NAMES[i], self.half[i])?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dimension({self})")
    }
}

/// A finite real value tagged with its SI dimension.
///
/// Multiplication and division are total (the exponents just add) and are
/// provided as operators; addition and comparison are only defined between
/// equal dimensions and are therefore fallible.
#[derive(Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    dim: Dimension,
}

/// Checked constructor; the only way to introduce a value.
pub fn qty(value: f64, dim: Dimension) -> Result<Quantity, QuantityError> {
    if !value.is_finite() {
        return Err(QuantityError::NonFinite(value));
    }
    Ok(Quantity { value, dim })
}

impl Quantity {
    pub fn dimensionless(value: f64) -> Quantity {
        Quantity::checked(value, DIMENSIONLESS)
    }

    pub fn seconds(value: f64) -> Quantity {
        Quantity::checked(value, TIME)
    }

    pub fn meters(value: f64) -> Quantity {
        Quantity::checked(value, LENGTH)
    }

    pub fn kilograms(value: f64) -> Quantity {
        Quantity::checked(value, MASS)
    }

    pub fn kelvin(value: f64) -> Quantity {
        Quantity::checked(value, TEMPERATURE)
    }

    pub fn coulombs(value: f64) -> Quantity {
        Quantity::checked(value, CHARGE)
    }

    pub fn joules(value: f64) -> Quantity {
        Quantity::checked(value, ENERGY)
    }

    fn checked(value: f64, dim: Dimension) -> Quantity {
        assert!(value.is_finite(), "non-finite quantity value {value}");
        Quantity { value, dim }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn has_dim(&self, dim: Dimension) -> bool {
        self.dim == dim
    }

    pub fn try_add(self, other: Quantity) -> Result<Quantity, QuantityError> {
        if self.dim != other.dim {
            return Err(QuantityError::DimensionMismatch(self.dim, other.dim));
        }
        qty(self.value + other.value, self.dim)
    }

    pub fn try_sub(self, other: Quantity) -> Result<Quantity, QuantityError> {
        self.try_add(-other)
    }

    pub fn try_cmp(self, other: Quantity) -> Result<std::cmp::Ordering, QuantityError> {
        if self.dim != other.dim {
            return Err(QuantityError::DimensionMismatch(self.dim, other.dim));
        }
        // values are finite by construction
        Ok(self.value.partial_cmp(&other.value).unwrap())
    }

    pub fn sqrt(self) -> Result<Quantity, QuantityError> {
        if self.value < 0.0 {
            return Err(QuantityError::NegativeSqrt(self.value));
        }
        Ok(Quantity::checked(self.value.sqrt(), self.dim.sqrt()?))
    }

    pub fn powi(self, n: i16) -> Quantity {
        Quantity::checked(self.value.powi(n as i32), self.dim.powi(n))
    }

    /// Raise to the half-integer power n/2.
    pub fn pow_half(self, n: i16) -> Result<Quantity, QuantityError> {
        self.powi(n).sqrt()
    }

    pub fn recip(self) -> Quantity {
        Quantity::checked(1.0 / self.value, self.dim.invert())
    }

    /// Error unless strictly positive; `name` labels the offending input.
    pub fn expect_positive(self, name: &'static str) -> Result<Quantity, QuantityError> {
        if self.value <= 0.0 {
            return Err(QuantityError::NonPositive {
                name,
                value: self.value,
            });
        }
        Ok(self)
    }
}

impl Mul for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: Quantity) -> Quantity {
        Quantity::checked(self.value * rhs.value, self.dim.combine(rhs.dim))
    }
}

impl Div for Quantity {
    type Output = Quantity;
    fn div(self, rhs: Quantity) -> Quantity {
        Quantity::checked(self.value / rhs.value, self.dim.combine(rhs.dim.invert()))
    }
}

impl Mul<f64> for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: f64) -> Quantity {
        Quantity::checked(self.value * rhs, self.dim)
    }
}

impl Div<f64> for Quantity {
    type Output = Quantity;
    fn div(self, rhs: f64) -> Quantity {
        Quantity::checked(self.value / rhs, self.dim)
    }
}

impl Neg for Quantity {
    type Output = Quantity;
    fn neg(self) -> Quantity {
        Quantity {
            value: -self.value,
            dim: self.dim,
        }
    }
}

impl fmt::Debug for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} [{}]", self.value, self.dim)
    }
}

/// The fixed constants all formulas are evaluated with. hbar is computed
/// from h, not taken from CODATA, so results match the published arithmetic.
#[derive(Clone, Copy, Debug)]
pub struct Constants {
    /// Planck constant, J s
    pub h: Quantity,
    /// Reduced Planck constant h/(2π), J s
    pub hbar: Quantity,
    /// Boltzmann constant, J/K
    pub kappa: Quantity,
    /// Coulomb constant, N m^2 C^-2
    pub coulomb_k: Quantity,
    /// Elementary charge, C
    pub elementary_charge: Quantity,
    /// Proton mass, kg
    pub proton_mass: Quantity,
}

/// J s = kg m^2 s^-1
const ACTION: Dimension = Dimension::new(1, 2, -1, 0, 0);
/// J/K
const ENTROPY: Dimension = Dimension::new(1, 2, -2, -1, 0);
/// N m^2 C^-2 = kg m^3 s^-2 C^-2
const COULOMB_CONST: Dimension = Dimension::new(1, 3, -2, 0, -2);

pub const PLANCK_H: f64 = 6.6260755e-34;
pub const BOLTZMANN: f64 = 1.38e-23;
pub const COULOMB_K: f64 = 9e9;
pub const ELEMENTARY_CHARGE: f64 = 1.6e-19;
pub const PROTON_MASS: f64 = 1.67e-27;

impl Constants {
    pub fn published() -> Constants {
        let h = Quantity::checked(PLANCK_H, ACTION);
        Constants {
            h,
            hbar: h / (2.0 * std::f64::consts::PI),
            kappa: Quantity::checked(BOLTZMANN, ENTROPY),
            coulomb_k: Quantity::checked(COULOMB_K, COULOMB_CONST),
            elementary_charge: Quantity::checked(ELEMENTARY_CHARGE, CHARGE),
            proton_mass: Quantity::checked(PROTON_MASS, MASS),
        }
    }

    /// Raw hbar in J s, for hot numeric loops.
    pub fn hbar_si() -> f64 {
        PLANCK_H / (2.0 * std::f64::consts::PI)
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::published()
    }
}

impl serde::Serialize for Constants {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Constants", 6)?;
        s.serialize_field("h_Js", &self.h.value())?;
        s.serialize_field("hbar_Js", &self.hbar.value())?;
        s.serialize_field("kappa_JperK", &self.kappa.value())?;
        s.serialize_field("coulombK_Nm2perC2", &self.coulomb_k.value())?;
        s.serialize_field("e_C", &self.elementary_charge.value())?;
        s.serialize_field("proton_mass_kg", &self.proton_mass.value())?;
        s.end()
    }
}

/// Thermal de Broglie wavelength hbar / sqrt(M κ T) of an environmental
/// particle of mass `m` at temperature `t`.
pub fn thermal_wavelength(m: Quantity, t: Quantity) -> Result<Quantity, QuantityError> {
    if !m.has_dim(MASS) {
        return Err(QuantityError::DimensionMismatch(m.dim(), MASS));
    }
    if !t.has_dim(TEMPERATURE) {
        return Err(QuantityError::DimensionMismatch(t.dim(), TEMPERATURE));
    }
    let m = m.expect_positive("mass")?;
    let t = t.expect_positive("temperature")?;
    let c = Constants::published();
    Ok(c.hbar / (m * c.kappa * t).sqrt()?)
}
