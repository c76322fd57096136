//! Series representation `X(t) = sum_{k>=1} a_k(t) xi_k` of the process,
//! the approximations `â_k` that a model is actually built from, and the
//! standards `gamma_N` and moduli `sigma_N` of the model remainder.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{EntropyExponent, IntervalSpace, Modulus};
use crate::orlicz::{PhiClass, PhiFunction, RandomCoefficient};
use crate::special::{hurwitz_zeta, power_partial_sum};

/// Grid used for numerical suprema when a family has no analytic envelope.
pub const SUP_GRID_POINTS: usize = 4097;

/// Coefficient functions `a_k`, `k >= 1`, of a series representation.
///
/// Analytic envelopes are optional except for the tail sums of infinite
/// families: a model's guarantee is only as sound as the bound on the
/// neglected tail, so infinite families without one are rejected.
pub trait CoefficientFamily: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    /// Number of terms, `None` for an infinite series.
    fn term_count(&self) -> Option<usize>;

    fn value(&self, k: usize, t: f64) -> f64;

    /// `sup_t |a_k(t)|` when known in closed form.
    fn sup_abs(&self, _k: usize) -> Option<f64> {
        None
    }

    /// Closed form or dominating bound of `sum_{k>n} sup_t |a_k(t)|^s`.
    fn tail_sup_power(&self, _n: usize, _s: f64) -> Option<f64> {
        None
    }

    /// Constant `C_k` with `|a_k(t) - a_k(u)| <= C_k |t-u|^alpha`.
    fn hoelder(&self, _k: usize, _alpha: f64) -> Option<f64> {
        None
    }

    /// Bound of `sum_{k>n} C_k^s`.
    fn tail_hoelder_power(&self, _n: usize, _alpha: f64, _s: f64) -> Option<f64> {
        None
    }
}

/// Hölder constant of `A sin(w t + c)`: `|A| 2^{1-alpha} w^alpha`, from
/// `|sin x - sin y| <= min(|x - y|, 2)`.
fn trig_hoelder(amplitude: f64, freq: f64, alpha: f64) -> f64 {
    amplitude.abs() * 2f64.powf(1.0 - alpha) * freq.powf(alpha)
}

/// Karhunen–Loève expansion of the Wiener process on `[0, T]`:
/// `a_k(t) = sqrt(2T) sin((k - 1/2) pi t / T) / ((k - 1/2) pi)`.
#[derive(Debug, Clone)]
pub struct WienerKl {
    length: f64,
}

impl WienerKl {
    pub fn new(space: &IntervalSpace) -> Self {
        Self {
            length: space.length(),
        }
    }

    fn amplitude(&self, k: usize) -> f64 {
        (2.0 * self.length).sqrt() / ((k as f64 - 0.5) * std::f64::consts::PI)
    }

    fn freq(&self, k: usize) -> f64 {
        (k as f64 - 0.5) * std::f64::consts::PI / self.length
    }
}

impl CoefficientFamily for WienerKl {
    fn name(&self) -> &str {
        "wiener-kl"
    }

    fn term_count(&self) -> Option<usize> {
        None
    }

    fn value(&self, k: usize, t: f64) -> f64 {
        self.amplitude(k) * (self.freq(k) * t).sin()
    }

    fn sup_abs(&self, k: usize) -> Option<f64> {
        Some(self.amplitude(k))
    }

    fn tail_sup_power(&self, n: usize, s: f64) -> Option<f64> {
        // (2T)^{s/2} pi^{-s} sum_{k>n} (k - 1/2)^{-s}
        if s <= 1.0 {
            return None;
        }
        let pi = std::f64::consts::PI;
        Some((2.0 * self.length).powf(0.5 * s) * pi.powf(-s) * hurwitz_zeta(s, n as f64 + 0.5))
    }

    fn hoelder(&self, k: usize, alpha: f64) -> Option<f64> {
        Some(trig_hoelder(self.amplitude(k), self.freq(k), alpha))
    }

    fn tail_hoelder_power(&self, n: usize, alpha: f64, s: f64) -> Option<f64> {
        // C_k = sqrt(2T) 2^{1-alpha} T^{-alpha} pi^{alpha-1} (k - 1/2)^{alpha-1}
        let q = s * (1.0 - alpha);
        if q <= 1.0 {
            return None;
        }
        let pi = std::f64::consts::PI;
        let lead = (2.0 * self.length).sqrt() * 2f64.powf(1.0 - alpha) * self.length.powf(-alpha) * pi.powf(alpha - 1.0);
        Some(lead.powf(s) * hurwitz_zeta(q, n as f64 + 0.5))
    }
}

/// `a_k(t) = A k^{-d} cos(k pi t / T)`.
#[derive(Debug, Clone)]
pub struct DampedTrig {
    length: f64,
    amplitude: f64,
    decay: f64,
}

impl DampedTrig {
    pub fn new(space: &IntervalSpace, amplitude: f64, decay: f64) -> Result<Self> {
        if !(amplitude.is_finite() && decay.is_finite() && decay >= 0.0) {
            return Err(Error::Process(format!(
                "damped-trig needs finite amplitude and decay >= 0, got {amplitude}, {decay}"
            )));
        }
        Ok(Self {
            length: space.length(),
            amplitude,
            decay,
        })
    }

    fn coef(&self, k: usize) -> f64 {
        self.amplitude * (k as f64).powf(-self.decay)
    }

    fn freq(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.length
    }
}

impl CoefficientFamily for DampedTrig {
    fn name(&self) -> &str {
        "damped-trig"
    }

    fn term_count(&self) -> Option<usize> {
        None
    }

    fn value(&self, k: usize, t: f64) -> f64 {
        self.coef(k) * (self.freq(k) * t).cos()
    }

    fn sup_abs(&self, k: usize) -> Option<f64> {
        Some(self.coef(k).abs())
    }

    fn tail_sup_power(&self, n: usize, s: f64) -> Option<f64> {
        let q = self.decay * s;
        if q <= 1.0 {
            return None;
        }
        Some(self.amplitude.abs().powf(s) * hurwitz_zeta(q, n as f64 + 1.0))
    }

    fn hoelder(&self, k: usize, alpha: f64) -> Option<f64> {
        Some(trig_hoelder(self.coef(k), self.freq(k), alpha))
    }

    fn tail_hoelder_power(&self, n: usize, alpha: f64, s: f64) -> Option<f64> {
        let q = (self.decay - alpha) * s;
        if q <= 1.0 {
            return None;
        }
        let lead = self.amplitude.abs() * 2f64.powf(1.0 - alpha) * (std::f64::consts::PI / self.length).powf(alpha);
        Some(lead.powf(s) * hurwitz_zeta(q, n as f64 + 1.0))
    }
}

/// Finitely many terms `a_k(t) = A_k sin(k pi t / T)`.
#[derive(Debug, Clone)]
pub struct FiniteSine {
    length: f64,
    amplitudes: Vec<f64>,
}

impl FiniteSine {
    pub fn new(space: &IntervalSpace, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() || amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::Process("finite family needs at least one finite amplitude".into()));
        }
        Ok(Self {
            length: space.length(),
            amplitudes,
        })
    }

    fn freq(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.length
    }
}

impl CoefficientFamily for FiniteSine {
    fn name(&self) -> &str {
        "finite"
    }

    fn term_count(&self) -> Option<usize> {
        Some(self.amplitudes.len())
    }

    fn value(&self, k: usize, t: f64) -> f64 {
        match self.amplitudes.get(k.wrapping_sub(1)) {
            Some(a) => a * (self.freq(k) * t).sin(),
            None => 0.0,
        }
    }

    fn sup_abs(&self, k: usize) -> Option<f64> {
        Some(self.amplitudes.get(k.wrapping_sub(1)).map_or(0.0, |a| a.abs()))
    }

    fn tail_sup_power(&self, n: usize, s: f64) -> Option<f64> {
        Some(self.amplitudes.iter().skip(n).map(|a| a.abs().powf(s)).sum())
    }

    fn hoelder(&self, k: usize, alpha: f64) -> Option<f64> {
        Some(
            self.amplitudes
                .get(k.wrapping_sub(1))
                .map_or(0.0, |a| trig_hoelder(*a, self.freq(k), alpha)),
        )
    }

    fn tail_hoelder_power(&self, n: usize, alpha: f64, s: f64) -> Option<f64> {
        Some(
            (n + 1..=self.amplitudes.len())
                .map(|k| self.hoelder(k, alpha).unwrap().powf(s))
                .sum(),
        )
    }
}

/// Approximate coefficients `â_k(t) = a_k(t) + eps k^{-decay}`, so that
/// `delta_k(t) = |a_k(t) - â_k(t)| = eps k^{-decay}` for every `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub amplitude: f64,
    pub decay: f64,
}

impl Perturbation {
    pub fn new(amplitude: f64, decay: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude >= 0.0 && decay.is_finite() && decay >= 0.0) {
            return Err(Error::Process(format!(
                "approximation error needs amplitude >= 0 and decay >= 0, got {amplitude}, {decay}"
            )));
        }
        Ok(Self { amplitude, decay })
    }

    pub fn envelope(&self, k: usize) -> f64 {
        self.amplitude * (k as f64).powf(-self.decay)
    }
}

/// Distribution of the coefficients `xi_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum XiSequence {
    Iid(RandomCoefficient),
    PerTerm(Vec<RandomCoefficient>),
}

impl XiSequence {
    pub fn get(&self, k: usize) -> &RandomCoefficient {
        match self {
            XiSequence::Iid(xi) => xi,
            XiSequence::PerTerm(v) => &v[k - 1],
        }
    }
}

/// Remainder standard `gamma_N` and its two contributions, with
/// `gamma^s = approx^s + tail^s` (`s` = 2 for ClassI, `zeta` for ClassII).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaN {
    pub gamma: f64,
    pub approx_part: f64,
    pub tail_part: f64,
}

#[derive(Debug, Clone)]
pub struct ProcessSpec {
    pub space: IntervalSpace,
    /// `sigma(h) = C h^alpha` of the process itself.
    pub modulus: Modulus,
    pub entropy: EntropyExponent,
    pub phi: PhiFunction,
    pub family: Arc<dyn CoefficientFamily>,
    pub perturbation: Option<Perturbation>,
    pub xi: XiSequence,
}

impl ProcessSpec {
    pub fn new(
        space: IntervalSpace,
        modulus: Modulus,
        entropy: EntropyExponent,
        phi: PhiFunction,
        family: Arc<dyn CoefficientFamily>,
        perturbation: Option<Perturbation>,
        xi: XiSequence,
    ) -> Result<Self> {
        if entropy.a() >= modulus.alpha() {
            return Err(Error::Process(format!(
                "entropy exponent a = {} must be below alpha = {}",
                entropy.a(),
                modulus.alpha()
            )));
        }
        match (&xi, family.term_count()) {
            (XiSequence::PerTerm(v), Some(k)) if v.len() != k => {
                return Err(Error::Process(format!(
                    "{} coefficient distributions given for {k} terms",
                    v.len()
                )))
            }
            (XiSequence::PerTerm(_), None) => {
                return Err(Error::Process(
                    "per-term coefficient distributions need a finite family".into(),
                ))
            }
            _ => {}
        }
        let spec = Self {
            space,
            modulus,
            entropy,
            phi,
            family,
            perturbation,
            xi,
        };
        // refuse unsound specs up front
        spec.tail_power_sum(0, spec.sum_exponent())?;
        Ok(spec)
    }

    pub fn sum_exponent(&self) -> f64 {
        self.phi.sum_exponent()
    }

    pub fn term_count(&self) -> Option<usize> {
        self.family.term_count()
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.xi.get(k).tau()
    }

    pub fn coefficient(&self, k: usize, t: f64) -> f64 {
        self.family.value(k, t)
    }

    pub fn approx_coefficient(&self, k: usize, t: f64) -> f64 {
        let a = self.family.value(k, t);
        match self.perturbation {
            Some(pert) if self.term_count().map_or(true, |n| k <= n) => a + pert.envelope(k),
            _ => a,
        }
    }

    pub fn has_approximation_error(&self) -> bool {
        self.perturbation.map_or(false, |p| p.amplitude > 0.0)
    }

    pub fn sup_abs(&self, k: usize) -> f64 {
        self.family
            .sup_abs(k)
            .unwrap_or_else(|| grid_sup(|t| self.family.value(k, t), self.space.length(), SUP_GRID_POINTS))
    }

    /// `sup_t delta_k(t)`.
    pub fn delta_envelope(&self, k: usize) -> f64 {
        match (self.perturbation, self.term_count()) {
            (Some(_), Some(n)) if k > n => 0.0,
            (Some(p), _) => p.envelope(k),
            (None, _) => 0.0,
        }
    }

    /// `sum_{k<=n} tau_k^s sup delta_k^s`.
    pub fn approx_power_sum(&self, n: usize, s: f64) -> f64 {
        let Some(pert) = self.perturbation.filter(|p| p.amplitude > 0.0) else {
            return 0.0;
        };
        let n = self.term_count().map_or(n, |k| n.min(k));
        match &self.xi {
            XiSequence::Iid(xi) => {
                (xi.tau() * pert.amplitude).powf(s) * power_partial_sum(pert.decay * s, n)
            }
            XiSequence::PerTerm(_) => (1..=n).map(|k| (self.tau(k) * pert.envelope(k)).powf(s)).sum(),
        }
    }

    /// `sum_{k>n} tau_k^s sup |a_k|^s`.
    pub fn tail_power_sum(&self, n: usize, s: f64) -> Result<f64> {
        match (&self.xi, self.term_count()) {
            (XiSequence::PerTerm(_), Some(k)) => Ok((n + 1..=k).map(|j| (self.tau(j) * self.sup_abs(j)).powf(s)).sum()),
            (XiSequence::Iid(xi), Some(k)) => Ok((n + 1..=k).map(|j| (xi.tau() * self.sup_abs(j)).powf(s)).sum()),
            (XiSequence::Iid(xi), None) => self
                .family
                .tail_sup_power(n, s)
                .map(|t| xi.tau().powf(s) * t)
                .ok_or_else(|| {
                    Error::Process(format!(
                        "family '{}' has no summable tail envelope for exponent {s}; \
                         truncating an infinite series numerically would void the reliability guarantee",
                        self.family.name()
                    ))
                }),
            (XiSequence::PerTerm(_), None) => unreachable!("rejected at construction"),
        }
    }

    /// Upper bound on `sup_u tau(Delta_N(u))`:
    /// `(sum_{k<=N} tau_k^s sup delta_k^s + sum_{k>N} tau_k^s sup a_k^s)^{1/s}`.
    pub fn gamma_n(&self, n: usize) -> Result<GammaN> {
        let s = self.sum_exponent();
        let a = self.approx_power_sum(n, s);
        let b = self.tail_power_sum(n, s)?;
        Ok(GammaN {
            gamma: (a + b).powf(1.0 / s),
            approx_part: a.powf(1.0 / s),
            tail_part: b.powf(1.0 / s),
        })
    }

    /// Modulus `C_N h^alpha` of the remainder increments
    /// `Delta_N(t) - Delta_N(u)`, assembled from the Hölder constants of
    /// `delta_k` (k <= N) and `a_k` (k > N) with the independent-sum
    /// inequality.
    pub fn sigma_n_estimate(&self, n: usize) -> Result<Modulus> {
        let s = self.sum_exponent();
        let alpha = self.modulus.alpha();
        // delta_k is constant in t for the shift perturbation: no head term
        let tail = match (&self.xi, self.term_count()) {
            (_, Some(k)) => (n + 1..=k)
                .map(|j| {
                    self.family
                        .hoelder(j, alpha)
                        .map(|c| (self.tau(j) * c).powf(s))
                        .ok_or_else(|| missing_hoelder(self.family.name()))
                })
                .sum::<Result<f64>>()?,
            (XiSequence::Iid(xi), None) => {
                xi.tau().powf(s)
                    * self
                        .family
                        .tail_hoelder_power(n, alpha, s)
                        .ok_or_else(|| missing_hoelder(self.family.name()))?
            }
            (XiSequence::PerTerm(_), None) => unreachable!("rejected at construction"),
        };
        Modulus::new(tail.powf(1.0 / s), alpha)
    }

    /// Whether the (C1) Hölder constants are available at this alpha.
    pub fn has_hoelder_constants(&self) -> bool {
        self.sigma_n_estimate(0).is_ok()
    }

    pub fn class(&self) -> PhiClass {
        self.phi.class()
    }
}

fn missing_hoelder(name: &str) -> Error {
    Error::Process(format!(
        "family '{name}' has no summable Hölder constants at this alpha; the remainder modulus is unavailable"
    ))
}

/// `sup_{t in [0, T]} |f(t)|` on a uniform grid, refined by evaluating `f`
/// at the vertex of the parabola through the largest grid value and its
/// neighbours.
pub fn grid_sup<F: Fn(f64) -> f64>(f: F, length: f64, points: usize) -> f64 {
    let points = points.max(3);
    let h = length / (points - 1) as f64;
    let vals: Vec<f64> = (0..points).map(|i| f(i as f64 * h).abs()).collect();
    let (imax, &vmax) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    if imax == 0 || imax == points - 1 {
        return vmax;
    }
    let (l, c, r) = (vals[imax - 1], vals[imax], vals[imax + 1]);
    let curv = l - 2.0 * c + r;
    if curv >= 0.0 {
        return vmax;
    }
    let offset = 0.5 * (l - r) / curv;
    let t = (imax as f64 + offset.clamp(-1.0, 1.0)) * h;
    vmax.max(f(t).abs())
}
