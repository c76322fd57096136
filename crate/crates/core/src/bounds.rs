//! Tail-probability bounds for `sup X`, `inf X` and `sup |X|`.
//!
//! Three evaluators share one query type:
//!
//! * [`z_generic`] minimizes the exponent
//!   `(1-p) phi(gamma l/(1-p)) + p phi(l beta/(1-p)) - l x` over `l > 0`
//!   numerically,
//! * [`z_closed_thm3`] uses the closed-form minimizer for the power family,
//! * [`z_closed_thm6`] is the interval specialization with `sigma(h) = C h^alpha`
//!   and `p = gamma / x`.
//!
//! Bounds larger than 1 are returned unchanged; callers decide whether they
//! are vacuous.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{averaged_entropy_factor, limiting_entropy_factor, EntropyExponent, IntervalSpace, Modulus};
use crate::minimize;
use crate::orlicz::{PhiClass, PhiFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Sup,
    Inf,
    Abs,
}

/// Non-exponential multiplier of the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyFactor {
    /// `2 (e/p)^{1/alpha}`.
    Limiting { alpha: f64 },
    /// `r^{-1}` of the averaged entropy integral with `r(t) = t^a`.
    Averaged {
        space: IntervalSpace,
        modulus: Modulus,
        exponent: EntropyExponent,
    },
}

impl EntropyFactor {
    pub fn value(&self, p: f64) -> Result<f64> {
        match self {
            EntropyFactor::Limiting { alpha } => limiting_entropy_factor(*alpha, p),
            EntropyFactor::Averaged {
                space,
                modulus,
                exponent,
            } => averaged_entropy_factor(space, modulus, exponent, p),
        }
    }
}

/// Which trailing factor the interval specialization uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Thm6Factor {
    /// `2 (e x / gamma)^{1/alpha}`, i.e. `2 (e/p)^{1/alpha}` at `p = gamma/x`.
    #[default]
    ProofConsistent,
    /// `2 (e x)^{1/alpha}` as printed in the statement.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailQuery {
    pub x: f64,
    pub p: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: PhiFunction,
    pub entropy: EntropyFactor,
}

impl TailQuery {
    pub fn new(x: f64, p: f64, beta: f64, gamma: f64, phi: PhiFunction, entropy: EntropyFactor) -> Result<Self> {
        let q = Self {
            x,
            p,
            beta,
            gamma,
            phi,
            entropy,
        };
        q.check()?;
        Ok(q)
    }

    fn check(&self) -> Result<()> {
        if !(self.x.is_finite() && self.x > 0.0) {
            return Err(Error::Bounds(format!("threshold x must be finite and > 0, got {}", self.x)));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::Bounds(format!("p must lie in (0, 1), got {}", self.p)));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Bounds(format!("beta must be finite and > 0, got {}", self.beta)));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::Bounds(format!("gamma must be finite and >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// `gamma^zeta (1-p) + p beta^zeta`.
    fn mixed_power(&self) -> f64 {
        let z = self.phi.zeta();
        self.gamma.powf(z) * (1.0 - self.p) + self.p * self.beta.powf(z)
    }

    /// Lower threshold on `x` for ClassI; `None` when no threshold applies.
    pub fn threshold(&self) -> Option<f64> {
        match self.phi.class() {
            PhiClass::ClassII => None,
            PhiClass::ClassI => {
                let v = self.beta.min(self.gamma);
                let vz = v.powf(self.phi.zeta() - 1.0);
                Some(if vz > 0.0 {
                    self.mixed_power() / ((1.0 - self.p) * vz)
                } else {
                    f64::INFINITY
                })
            }
        }
    }

    /// The exponent as a function of `lambda`.
    pub fn exponent_at(&self, lambda: f64) -> f64 {
        let q = 1.0 - self.p;
        q * self.phi.eval(self.gamma * lambda / q) + self.p * self.phi.eval(lambda * self.beta / q) - lambda * self.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    /// Probability bound, possibly above 1.
    pub value: f64,
    /// `ln(value)`; finite even where `value` underflows.
    pub log_value: f64,
    /// Minimal exponent.
    pub exponent: f64,
    pub entropy_factor: f64,
    pub lambda_opt: Option<f64>,
    /// Whether `x` clears the theorem's lower threshold.
    pub valid: bool,
    pub threshold: Option<f64>,
    pub side: Side,
}

impl TailBound {
    fn one_sided(exponent: f64, entropy_factor: f64, lambda_opt: Option<f64>, threshold: Option<f64>, x: f64) -> Self {
        let log_value = exponent + entropy_factor.ln();
        Self {
            value: log_value.exp(),
            log_value,
            exponent,
            entropy_factor,
            lambda_opt,
            valid: threshold.map_or(true, |t| x > t),
            threshold,
            side: Side::Sup,
        }
    }

    /// Re-expresses a one-sided bound for `side`; `Abs` doubles it.
    pub fn for_side(&self, side: Side) -> Self {
        let one = match self.side {
            Side::Abs => Self {
                value: 0.5 * self.value,
                log_value: self.log_value - std::f64::consts::LN_2,
                ..*self
            },
            _ => *self,
        };
        match side {
            Side::Abs => Self {
                value: 2.0 * one.value,
                log_value: one.log_value + std::f64::consts::LN_2,
                side,
                ..one
            },
            _ => Self { side, ..one },
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.value >= 1.0
    }
}

/// Numerical infimum over `lambda > 0`, searched in `ln(lambda)`.
pub fn z_generic(q: &TailQuery) -> Result<TailBound> {
    q.check()?;
    let entropy = q.entropy.value(q.p)?;
    let threshold = q.threshold();
    if q.gamma == 0.0 && q.beta == 0.0 {
        return Ok(TailBound::one_sided(f64::NEG_INFINITY, entropy, None, threshold, q.x));
    }
    let f = |t: f64| q.exponent_at(t.exp());
    let scale = q.x / q.gamma.max(q.beta).powf(q.phi.zeta());
    let start = if scale.is_finite() && scale > 0.0 { scale.ln() } else { 0.0 };
    let br = minimize::bracket(&f, start, 1.0, 200)
        .ok_or_else(|| Error::Bounds("exponent has no minimum over lambda > 0".into()))?;
    let m = minimize::brent(&f, br, 0.0, 1e-10, 500);
    if !m.fx.is_finite() {
        return Err(Error::Bounds(format!("non-finite minimal exponent {}", m.fx)));
    }
    Ok(TailBound::one_sided(m.fx, entropy, Some(m.x.exp()), threshold, q.x))
}

/// Closed-form infimum for `phi(t) = t^zeta / zeta`.
///
/// Minimizer `l = (x (1-p)^zeta / D)^{1/(zeta-1)}` and minimal exponent
/// `(1-zeta) (x (1-p))^{zeta/(zeta-1)} / (zeta D^{1/(zeta-1)})` with
/// `D = gamma^zeta (1-p) + p beta^zeta`. ClassI additionally needs
/// `x > D / ((1-p) min(beta, gamma)^{zeta-1})`.
pub fn z_closed_thm3(q: &TailQuery) -> Result<TailBound> {
    q.check()?;
    let entropy = q.entropy.value(q.p)?;
    let z = q.phi.zeta();
    let d = q.mixed_power();
    let threshold = q.threshold();
    if d == 0.0 {
        return Ok(TailBound::one_sided(f64::NEG_INFINITY, entropy, None, threshold, q.x));
    }
    let inv = 1.0 / (z - 1.0);
    let lambda = (q.x * (1.0 - q.p).powf(z) / d).powf(inv);
    let exponent = (1.0 - z) * (q.x * (1.0 - q.p)).powf(z * inv) / (z * d.powf(inv));
    Ok(TailBound::one_sided(exponent, entropy, Some(lambda), threshold, q.x))
}

/// Interval specialization with `sigma(h) = C h^alpha`, `beta = C (T/2)^alpha`
/// and `p = gamma / x`:
///
/// exponent `-(x-gamma)^{zeta/(zeta-1)} (zeta-1) x^{1/(zeta-1)} /
/// (zeta (gamma^zeta (x-gamma) + beta^zeta gamma)^{1/(zeta-1)})`.
///
/// The ClassI threshold is the quadratic-root form with `v = min(beta, gamma)`;
/// ClassII has none.
pub fn z_closed_thm6(
    x: f64,
    gamma: f64,
    phi: &PhiFunction,
    modulus: &Modulus,
    space: &IntervalSpace,
    factor: Thm6Factor,
) -> Result<TailBound> {
    if !(x.is_finite() && gamma.is_finite()) {
        return Err(Error::Bounds(format!("non-finite input x = {x}, gamma = {gamma}")));
    }
    if !(gamma > 0.0) {
        return Err(Error::Bounds(format!("gamma must be > 0 so that p = gamma/x > 0, got {gamma}")));
    }
    if !(x > gamma) {
        return Err(Error::Bounds(format!("x = {x} must exceed gamma = {gamma} so that p = gamma/x < 1")));
    }
    let z = phi.zeta();
    let inv = 1.0 / (z - 1.0);
    let beta = modulus.beta(space);
    let alpha = modulus.alpha();
    let excess = x - gamma;
    let denom = gamma.powf(z) * excess + beta.powf(z) * gamma;
    let exponent = -excess.powf(z * inv) * (z - 1.0) * x.powf(inv) / (z * denom.powf(inv));
    let e = std::f64::consts::E;
    let entropy = match factor {
        Thm6Factor::ProofConsistent => 2.0 * (e * x / gamma).powf(1.0 / alpha),
        Thm6Factor::Printed => 2.0 * (e * x).powf(1.0 / alpha),
    };
    let threshold = match phi.class() {
        PhiClass::ClassII => None,
        PhiClass::ClassI => Some(thm6_threshold(gamma, beta, z)),
    };
    // the Theorem-3 minimizer at p = gamma/x
    let p = gamma / x;
    let d = gamma.powf(z) * (1.0 - p) + p * beta.powf(z);
    let lambda = (x * (1.0 - p).powf(z) / d).powf(inv);
    Ok(TailBound::one_sided(exponent, entropy, Some(lambda), threshold, x))
}

/// `(gamma (v^{zeta-1}+1) + sqrt(gamma^2 (v^{zeta-1}+1)^2 + 4 v^{zeta-1} (beta^zeta - gamma^2)))
/// / (2 v^{zeta-1})`, `v = min(beta, gamma)`.
pub fn thm6_threshold(gamma: f64, beta: f64, zeta: f64) -> f64 {
    let v = beta.min(gamma);
    let vz = v.powf(zeta - 1.0);
    if vz <= 0.0 {
        return f64::INFINITY;
    }
    let b = gamma * (vz + 1.0);
    let disc = b * b + 4.0 * vz * (beta.powf(zeta) - gamma * gamma);
    (b + disc.max(0.0).sqrt()) / (2.0 * vz)
}

/// Evaluates `f` over a batch of queries in parallel.
pub fn evaluate_batch<F>(queries: &[TailQuery], f: F) -> Vec<Result<TailBound>>
where
    F: Fn(&TailQuery) -> Result<TailBound> + Sync + Send,
{
    queries.par_iter().map(f).collect()
}
