//! Metric structure of the parameter interval `[0, T]`: covering numbers,
//! the power modulus `sigma(h) = C h^alpha`, the radius value `beta`, and
//! the entropy integral that multiplies the exponential part of the tail
//! bounds.

use crate::error::{Error, Result};
use crate::quad;
use crate::special::hyp2f1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSpace {
    length: f64,
}

impl IntervalSpace {
    pub fn new(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Geometry(format!("interval length T must be > 0, got {length}")));
        }
        Ok(Self { length })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Chebyshev radius of `[0, T]`.
    pub fn radius(&self) -> f64 {
        0.5 * self.length
    }

    /// Covering-number bound `T/(2u) + 1` used inside every bound.
    pub fn massiveness(&self, u: f64) -> Result<f64> {
        check_radius(u)?;
        Ok(self.length / (2.0 * u) + 1.0)
    }

    /// Exact minimal number of closed radius-`u` balls covering `[0, T]`.
    pub fn covering_number(&self, u: f64) -> Result<u64> {
        check_radius(u)?;
        Ok(((self.length / (2.0 * u)).ceil() as u64).max(1))
    }
}

fn check_radius(u: f64) -> Result<()> {
    if !(u > 0.0) {
        return Err(Error::Geometry(format!("ball radius must be > 0, got {u}")));
    }
    Ok(())
}

/// `sigma(h) = C h^alpha`, `C >= 0`, `0 < alpha < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    c: f64,
    alpha: f64,
}

impl Modulus {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Geometry(format!("modulus constant C must be >= 0, got {c}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Geometry(format!("Hölder exponent alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(Self { c, alpha })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(Error::Geometry(format!("sigma needs h >= 0, got {h}")));
        }
        Ok(self.c * h.powf(self.alpha))
    }

    pub fn sigma_inverse(&self, y: f64) -> Result<f64> {
        if self.c == 0.0 {
            return Err(Error::Geometry("cannot invert sigma with C = 0".into()));
        }
        if !(y >= 0.0) {
            return Err(Error::Geometry(format!("sigma inverse needs y >= 0, got {y}")));
        }
        Ok((y / self.c).powf(1.0 / self.alpha))
    }

    /// `beta = sigma(T/2) = C (T/2)^alpha`.
    pub fn beta(&self, space: &IntervalSpace) -> f64 {
        self.c * space.radius().powf(self.alpha)
    }
}

/// Exponent `a` of the entropy function `r(t) = t^a`; needs `0 < a < alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyExponent {
    a: f64,
}

impl EntropyExponent {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Geometry(format!("entropy exponent must be > 0, got {a}")));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn eval(&self, t: f64) -> f64 {
        t.powf(self.a)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        y.powf(1.0 / self.a)
    }

    fn check_against(&self, modulus: &Modulus) -> Result<()> {
        if self.a >= modulus.alpha {
            return Err(Error::Geometry(format!(
                "entropy integral diverges: exponent a = {} must be < alpha = {}",
                self.a, modulus.alpha
            )));
        }
        Ok(())
    }
}

fn check_upper(space: &IntervalSpace, modulus: &Modulus, upper: f64) -> Result<f64> {
    let beta = modulus.beta(space);
    if !(upper > 0.0) {
        return Err(Error::Geometry(format!("entropy integral upper limit must be > 0, got {upper}")));
    }
    if upper > beta * (1.0 + 1e-12) {
        return Err(Error::Geometry(format!(
            "entropy integral upper limit {upper} exceeds beta = {beta}"
        )));
    }
    Ok(beta)
}

/// `int_0^upper r(N(sigma^{-1}(u))) du` with `N(v) = T/(2v) + 1` and
/// `r(t) = t^a`, in closed form.
///
/// With `K = (T/2) C^{1/alpha}` and `W = K upper^{-1/alpha} >= 1` the
/// substitution `y = w/(1+w)`, `w = K u^{-1/alpha}` turns the integral into
/// an incomplete beta function with a negative first parameter:
///
/// `alpha K^alpha * x^q / q * 2F1(q, 1 + alpha; q + 1; x)`,
/// `q = alpha - a`, `x = 1/(1 + W) <= 1/2`.
pub fn entropy_integral(
    space: &IntervalSpace,
    modulus: &Modulus,
    r: &EntropyExponent,
    upper: f64,
) -> Result<f64> {
    r.check_against(modulus)?;
    let beta = check_upper(space, modulus, upper)?;
    let alpha = modulus.alpha;
    let q = alpha - r.a;
    let k = space.radius() * modulus.c.powf(1.0 / alpha);
    // W = (beta / upper)^{1/alpha}, computed without forming K u^{-1/alpha}
    let w = (beta / upper).max(1.0).powf(1.0 / alpha);
    let x = 1.0 / (1.0 + w);
    Ok(alpha * k.powf(alpha) * x.powf(q) / q * hyp2f1(q, 1.0 + alpha, q + 1.0, x))
}

/// Same integral by adaptive quadrature after the substitution
/// `v = u^{1 - a/alpha}`, which makes the integrand bounded at 0.
/// Independent of the closed form; used to cross-check it.
pub fn entropy_integral_quadrature(
    space: &IntervalSpace,
    modulus: &Modulus,
    r: &EntropyExponent,
    upper: f64,
) -> Result<f64> {
    r.check_against(modulus)?;
    check_upper(space, modulus, upper)?;
    let m = 1.0 - r.a / modulus.alpha;
    let integrand = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let u = v.powf(1.0 / m);
        let inv = (u / modulus.c).powf(1.0 / modulus.alpha);
        let n = space.length / (2.0 * inv) + 1.0;
        r.eval(n) * u / (m * v)
    };
    let res = quad::integrate(integrand, 0.0, upper.powf(m), 0.0, 1e-12);
    Ok(res.value)
}

/// General form for a user-supplied covering function, entropy function and
/// modulus inverse. Integrated numerically.
pub fn entropy_integral_with<M, R, S>(massiveness: M, r: R, sigma_inverse: S, upper: f64) -> f64
where
    M: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    quad::integrate(|u| r(massiveness(sigma_inverse(u))), 0.0, upper, 0.0, 1e-10).value
}

/// `r^{-1}( (1/(beta p)) int_0^{beta p} r(N(sigma^{-1}(u))) du )`.
pub fn averaged_entropy_factor(
    space: &IntervalSpace,
    modulus: &Modulus,
    r: &EntropyExponent,
    p: f64,
) -> Result<f64> {
    check_p(p)?;
    let upper = modulus.beta(space) * p;
    let mean = entropy_integral(space, modulus, r, upper)? / upper;
    Ok(r.inverse(mean))
}

/// The `a -> 0` simplification `2 (e/p)^{1/alpha}` of the averaged factor.
/// It dominates the limit of [`averaged_entropy_factor`] as `a -> 0`.
pub fn limiting_entropy_factor(alpha: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Geometry(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(2.0 * (std::f64::consts::E / p).powf(1.0 / alpha))
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Geometry(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}
