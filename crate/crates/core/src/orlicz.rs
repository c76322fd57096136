//! Power Orlicz functions `phi(t) = |t|^zeta / zeta` and the sub-Gaussian
//! standard `tau` of random coefficients.
//!
//! Two classes are distinguished:
//!
//! * [`PhiClass::ClassI`]: `zeta >= 2`,
//! * [`PhiClass::ClassII`]: `1 < zeta <= 2`.
//!
//! At `zeta = 2` both classes are admissible and the caller picks the tag.
//! The class decides which exponent is used when standards of independent
//! sums are combined (see [`PhiFunction::sum_exponent`]).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiClass {
    ClassI,
    ClassII,
}

impl PhiClass {
    pub fn admits(self, zeta: f64) -> bool {
        match self {
            PhiClass::ClassI => zeta >= 2.0,
            PhiClass::ClassII => zeta > 1.0 && zeta <= 2.0,
        }
    }
}

/// `phi(t) = |t|^zeta / zeta` together with its class tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiFunction {
    zeta: f64,
    class: PhiClass,
}

impl PhiFunction {
    pub fn new(zeta: f64, class: PhiClass) -> Result<Self> {
        if !zeta.is_finite() || zeta <= 1.0 {
            return Err(Error::Orlicz(format!("exponent zeta must be > 1, got {zeta}")));
        }
        if !class.admits(zeta) {
            return Err(Error::Orlicz(format!(
                "zeta = {zeta} is not admissible for {class:?} \
                 (ClassI needs zeta >= 2, ClassII needs 1 < zeta <= 2)"
            )));
        }
        Ok(Self { zeta, class })
    }

    /// Picks ClassI for `zeta >= 2` and ClassII otherwise.
    pub fn with_zeta(zeta: f64) -> Result<Self> {
        let class = if zeta >= 2.0 {
            PhiClass::ClassI
        } else {
            PhiClass::ClassII
        };
        Self::new(zeta, class)
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn class(&self) -> PhiClass {
        self.class
    }

    pub fn eval(&self, t: f64) -> f64 {
        t.abs().powf(self.zeta) / self.zeta
    }

    /// Whether `phi(|x|^{1/s})` is convex, which is what the power inequality
    /// for independent sums needs. For the power family this is `zeta >= s`.
    pub fn conjugate_power_valid(&self, s: f64) -> Result<bool> {
        check_power(s)?;
        Ok(self.zeta >= s)
    }

    /// Exponent used to combine standards of independent summands:
    /// 2 for ClassI, `zeta` for ClassII.
    pub fn sum_exponent(&self) -> f64 {
        match self.class {
            PhiClass::ClassI => 2.0,
            PhiClass::ClassII => self.zeta,
        }
    }

    /// Upper bound `(sum_k (|w_k| tau_k)^s)^{1/s}` on the standard of the
    /// weighted sum of independent coefficients.
    pub fn sum_standard(&self, terms: &[(RandomCoefficient, f64)], s: f64) -> Result<f64> {
        if !self.conjugate_power_valid(s)? {
            return Err(Error::Orlicz(format!(
                "phi(|x|^(1/s)) is not convex for zeta = {}, s = {s}",
                self.zeta
            )));
        }
        let total: f64 = terms
            .iter()
            .map(|(xi, w)| (w.abs() * xi.tau()).powf(s))
            .sum();
        Ok(total.powf(1.0 / s))
    }
}

fn check_power(s: f64) -> Result<()> {
    if !(s > 0.0 && s <= 2.0) {
        return Err(Error::Orlicz(format!("power s must lie in (0, 2], got {s}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// Centred normal with standard deviation `scale`.
    Gaussian { scale: f64 },
    /// Uniform on `[-half_width, half_width]`.
    SymmetricBounded { half_width: f64 },
}

/// A centred random coefficient with its sub-Gaussian standard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomCoefficient {
    distribution: Distribution,
    tau: f64,
}

impl RandomCoefficient {
    /// Normal coefficient. Its standard is the scale, which is exact for
    /// `zeta = 2`.
    pub fn gaussian(scale: f64) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 {
            return Err(Error::Orlicz(format!("gaussian scale must be >= 0, got {scale}")));
        }
        Ok(Self {
            distribution: Distribution::Gaussian { scale },
            tau: scale,
        })
    }

    /// Uniform coefficient on `[-b, b]`. The standard is taken as `b`, an
    /// upper bound for `zeta = 2` (E exp(l xi) <= exp(l^2 b^2 / 6)).
    pub fn bounded(half_width: f64) -> Result<Self> {
        if !half_width.is_finite() || half_width < 0.0 {
            return Err(Error::Orlicz(format!(
                "bounded half-width must be >= 0, got {half_width}"
            )));
        }
        Ok(Self {
            distribution: Distribution::SymmetricBounded { half_width },
            tau: half_width,
        })
    }

    /// Overrides the standard, e.g. with a value known for `zeta != 2`.
    pub fn with_tau(self, tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::Orlicz(format!("standard tau must be >= 0, got {tau}")));
        }
        if tau == 0.0 && !self.is_degenerate() {
            return Err(Error::Orlicz(
                "standard tau = 0 is only possible for the zero variable".into(),
            ));
        }
        Ok(Self { tau, ..self })
    }

    pub fn distribution(&self) -> Distribution {
        self.distribution
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_degenerate(&self) -> bool {
        match self.distribution {
            Distribution::Gaussian { scale } => scale == 0.0,
            Distribution::SymmetricBounded { half_width } => half_width == 0.0,
        }
    }

    pub fn std_dev(&self) -> f64 {
        match self.distribution {
            Distribution::Gaussian { scale } => scale,
            Distribution::SymmetricBounded { half_width } => half_width / 3f64.sqrt(),
        }
    }

    /// Exact moment generating function `E exp(lambda xi)`.
    pub fn mgf(&self, lambda: f64) -> f64 {
        match self.distribution {
            Distribution::Gaussian { scale } => (0.5 * (lambda * scale).powi(2)).exp(),
            Distribution::SymmetricBounded { half_width } => {
                let z = lambda * half_width;
                if z.abs() < 1e-8 {
                    1.0 + z * z / 6.0
                } else {
                    z.sinh() / z
                }
            }
        }
    }
}
