//! Model-acceptance conditions and the search for the smallest truncation
//! level `N` with `P{sup |Delta_N| > delta} <= nu`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{z_closed_thm3, z_closed_thm6, EntropyFactor, Side, TailBound, TailQuery, Thm6Factor};
use crate::error::{Error, Result};
use crate::minimize;
use crate::orlicz::PhiClass;
use crate::process::{GammaN, ProcessSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// ClassI, free `p`, remainder modulus `sigma_N` and averaged entropy factor.
    T4,
    /// ClassII counterpart of `T4`, no threshold on `delta`.
    T5,
    /// ClassI, interval form with `p = gamma_N / delta`.
    T7,
    /// ClassII counterpart of `T7`.
    T8,
    /// `T7` with `gamma_N` from the coefficient sums and Hölder coefficients.
    T11,
    /// ClassII counterpart of `T11`.
    T12,
}

impl Theorem {
    pub fn class(self) -> PhiClass {
        match self {
            Theorem::T4 | Theorem::T7 | Theorem::T11 => PhiClass::ClassI,
            Theorem::T5 | Theorem::T8 | Theorem::T12 => PhiClass::ClassII,
        }
    }

    pub fn has_free_p(self) -> bool {
        matches!(self, Theorem::T4 | Theorem::T5)
    }

    /// Default for a class: the free-`p` form.
    pub fn default_for(class: PhiClass) -> Self {
        match class {
            PhiClass::ClassI => Theorem::T4,
            PhiClass::ClassII => Theorem::T5,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
            Theorem::T7 => "T7",
            Theorem::T8 => "T8",
            Theorem::T11 => "T11",
            Theorem::T12 => "T12",
        };
        f.write_str(s)
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t4" => Ok(Theorem::T4),
            "t5" => Ok(Theorem::T5),
            "t7" => Ok(Theorem::T7),
            "t8" => Ok(Theorem::T8),
            "t11" => Ok(Theorem::T11),
            "t12" => Ok(Theorem::T12),
            _ => Err(Error::Planner(format!("unknown theorem '{s}' (expected t4, t5, t7, t8, t11 or t12)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanOptions {
    pub thm6_factor: Thm6Factor,
    /// Largest `N` the search will consider.
    pub max_n: usize,
    /// Points of the logit-uniform grid the `p` search starts from.
    pub p_grid: usize,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            thm6_factor: Thm6Factor::default(),
            max_n: 1 << 24,
            p_grid: 97,
        }
    }
}

pub const P_MIN: f64 = 1e-6;
pub const P_MAX: f64 = 1.0 - 1e-6;

/// Outcome of one acceptance check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    /// Bound on `P{sup |Delta_N| > delta}`; may exceed 1 or be infinite.
    pub nu_bound: f64,
    pub log_nu: f64,
    pub valid: bool,
    pub p: Option<f64>,
    pub gamma: GammaN,
    pub beta: f64,
    pub threshold: Option<f64>,
    pub lambda_opt: Option<f64>,
}

impl Condition {
    pub fn passes(&self, nu_target: f64) -> bool {
        self.valid && self.nu_bound <= nu_target
    }

    fn exact(gamma: GammaN, beta: f64, p: Option<f64>) -> Self {
        Self {
            nu_bound: 0.0,
            log_nu: f64::NEG_INFINITY,
            valid: true,
            p,
            gamma,
            beta,
            threshold: None,
            lambda_opt: None,
        }
    }

    fn from_bound(b: &TailBound, gamma: GammaN, beta: f64, p: Option<f64>) -> Self {
        let abs = b.for_side(Side::Abs);
        Self {
            nu_bound: abs.value,
            log_nu: abs.log_value,
            valid: abs.valid,
            p,
            gamma,
            beta,
            threshold: abs.threshold,
            lambda_opt: abs.lambda_opt,
        }
    }
}

fn check_pairing(spec: &ProcessSpec, theorem: Theorem) -> Result<()> {
    if spec.class() != theorem.class() {
        return Err(Error::Planner(format!(
            "theorem {theorem} needs a {:?} phi, the spec declares {:?}",
            theorem.class(),
            spec.class()
        )));
    }
    if matches!(theorem, Theorem::T11 | Theorem::T12) && !spec.has_hoelder_constants() {
        return Err(Error::Planner(format!(
            "theorem {theorem} needs Hölder constants for every coefficient"
        )));
    }
    Ok(())
}

/// Evaluates the acceptance condition of `theorem` at level `n`.
///
/// `p` must be given or omitted according to the theorem: `T4`/`T5` take
/// an explicit `p` or optimize it when `None`; the interval forms fix
/// `p = gamma_N / delta` internally and reject an explicit one.
pub fn check_condition(
    spec: &ProcessSpec,
    n: usize,
    delta: f64,
    theorem: Theorem,
    p: Option<f64>,
    opts: &PlanOptions,
) -> Result<Condition> {
    check_pairing(spec, theorem)?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Planner(format!("delta must be finite and > 0, got {delta}")));
    }
    if !theorem.has_free_p() && p.is_some() {
        return Err(Error::Planner(format!("theorem {theorem} fixes p = gamma_N / delta; no p may be given")));
    }
    let gamma = spec.gamma_n(n)?;
    if theorem.has_free_p() {
        free_p_condition(spec, n, delta, gamma, p, opts)
    } else {
        interval_condition(spec, delta, gamma, opts)
    }
}

fn interval_condition(spec: &ProcessSpec, delta: f64, gamma: GammaN, opts: &PlanOptions) -> Result<Condition> {
    let beta = spec.modulus.beta(&spec.space);
    let g = gamma.gamma;
    if g == 0.0 {
        return Ok(Condition::exact(gamma, beta, None));
    }
    if delta <= g {
        // p = gamma/delta >= 1: the bound carries no information
        return Ok(Condition {
            nu_bound: f64::INFINITY,
            log_nu: f64::INFINITY,
            valid: false,
            p: None,
            gamma,
            beta,
            threshold: None,
            lambda_opt: None,
        });
    }
    let b = z_closed_thm6(delta, g, &spec.phi, &spec.modulus, &spec.space, opts.thm6_factor)?;
    Ok(Condition::from_bound(&b, gamma, beta, Some(g / delta)))
}

/// Largest `p` that keeps the ClassI threshold below `delta`:
/// `p/(1-p) < (delta v^{zeta-1} - gamma^zeta) / beta^zeta`.
fn p_upper(spec: &ProcessSpec, delta: f64, gamma: f64, beta: f64) -> Option<f64> {
    match spec.class() {
        PhiClass::ClassII => Some(P_MAX),
        PhiClass::ClassI => {
            let z = spec.phi.zeta();
            let v = gamma.min(beta);
            let r = (delta * v.powf(z - 1.0) - gamma.powf(z)) / beta.powf(z);
            if r > 0.0 {
                // stay strictly inside: the threshold inequality is strict
                Some((r / (1.0 + r) * (1.0 - 1e-9)).min(P_MAX))
            } else {
                None
            }
        }
    }
}

fn free_p_condition(
    spec: &ProcessSpec,
    n: usize,
    delta: f64,
    gamma: GammaN,
    p: Option<f64>,
    opts: &PlanOptions,
) -> Result<Condition> {
    let sigma_n = spec.sigma_n_estimate(n)?;
    let beta = sigma_n.beta(&spec.space);
    let g = gamma.gamma;
    if g == 0.0 {
        return Ok(Condition::exact(gamma, beta, p));
    }
    if beta == 0.0 {
        return Err(Error::Planner(format!(
            "degenerate remainder modulus at N = {n}: sigma_N vanishes while gamma_N = {g:e}"
        )));
    }
    let entropy = EntropyFactor::Averaged {
        space: spec.space,
        modulus: sigma_n,
        exponent: spec.entropy,
    };
    let eval = |p: f64| -> Result<Condition> {
        let q = TailQuery::new(delta, p, beta, g, spec.phi, entropy)?;
        let b = z_closed_thm3(&q)?;
        Ok(Condition::from_bound(&b, gamma, beta, Some(p)))
    };
    if let Some(p) = p {
        return eval(p);
    }
    // without a valid p, report the best invalid one
    let hi = p_upper(spec, delta, g, beta).unwrap_or(P_MAX);
    let best = optimize_p(&eval, P_MIN.min(hi * 0.5), hi, opts.p_grid)?;
    Ok(best)
}

/// Logit-uniform grid on `[lo, hi]`, then Brent on `ln nu` between the
/// neighbours of the best grid point.
fn optimize_p<F: Fn(f64) -> Result<Condition>>(eval: &F, lo: f64, hi: f64, points: usize) -> Result<Condition> {
    let points = points.max(3);
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let (a, b) = (logit(lo), logit(hi));
    let ps: Vec<f64> = (0..points)
        .map(|i| {
            let t = a + (b - a) * i as f64 / (points - 1) as f64;
            1.0 / (1.0 + (-t).exp())
        })
        .map(|p: f64| p.clamp(lo, hi))
        .collect();
    let mut best_i = 0;
    let mut best: Option<Condition> = None;
    for (i, &p) in ps.iter().enumerate() {
        let c = eval(p)?;
        if best.map_or(true, |b| c.log_nu < b.log_nu) {
            best = Some(c);
            best_i = i;
        }
    }
    let mut best = best.expect("grid is non-empty");
    let (l, r) = (ps[best_i.saturating_sub(1)], ps[(best_i + 1).min(points - 1)]);
    if r > l {
        let f = |t: f64| {
            let p = 1.0 / (1.0 + (-t).exp());
            eval(p.clamp(lo, hi)).map_or(f64::INFINITY, |c| c.log_nu)
        };
        let m = minimize::minimize_on(&f, logit(l), logit(r), 1e-10);
        let p = (1.0 / (1.0 + (-m.x).exp())).clamp(lo, hi);
        let c = eval(p)?;
        if c.log_nu < best.log_nu {
            best = c;
        }
    }
    Ok(best)
}

/// How the minimal `N` was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Bisection,
    /// The bound was not monotone in `N` over the searched range, or the
    /// coefficients carry approximation error.
    LinearScan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanResult {
    pub n: usize,
    pub p_opt: Option<f64>,
    pub nu_achieved: f64,
    pub gamma: GammaN,
    pub beta: f64,
    pub delta_threshold: Option<f64>,
    pub theorem: Theorem,
    pub search: SearchMode,
}

fn plan_result(n: usize, c: &Condition, theorem: Theorem, search: SearchMode) -> PlanResult {
    PlanResult {
        n,
        p_opt: if theorem.has_free_p() { c.p } else { None },
        nu_achieved: c.nu_bound,
        gamma: c.gamma,
        beta: c.beta,
        delta_threshold: c.threshold,
        theorem,
        search,
    }
}

/// Smallest `N` whose condition passes for `(delta, nu_target)`.
///
/// Exact coefficients: doubling then bisection, relying on the bound
/// decreasing in `N`; a rise observed while doubling switches to a linear
/// scan. With approximation error the bound is not monotone and the levels
/// are scanned one by one until the accumulated approximation part alone
/// rules out every larger `N`.
pub fn plan_minimal_n(
    spec: &ProcessSpec,
    delta: f64,
    nu_target: f64,
    theorem: Theorem,
    opts: &PlanOptions,
) -> Result<PlanResult> {
    if !(nu_target > 0.0 && nu_target < 1.0) {
        return Err(Error::Planner(format!("nu must lie in (0, 1), got {nu_target}")));
    }
    check_pairing(spec, theorem)?;
    let max_n = match spec.term_count() {
        Some(k) if !spec.has_approximation_error() => opts.max_n.min(k),
        _ => opts.max_n,
    };
    let check = |n: usize| check_condition(spec, n, delta, theorem, None, opts);
    if spec.has_approximation_error() {
        return scan_with_approximation(spec, delta, nu_target, theorem, opts, max_n);
    }

    let c0 = check(0)?;
    if c0.passes(nu_target) {
        return Ok(plan_result(0, &c0, theorem, SearchMode::Bisection));
    }
    // doubling
    let (mut lo, mut lo_c) = (0usize, c0);
    let mut monotone = true;
    let mut hi = None;
    let mut n = 1usize;
    loop {
        let n_eff = n.min(max_n);
        let c = check(n_eff)?;
        if c.valid && lo_c.valid && c.log_nu > lo_c.log_nu {
            monotone = false;
        }
        if c.passes(nu_target) {
            hi = Some((n_eff, c));
            break;
        }
        lo = n_eff;
        lo_c = c;
        if n_eff == max_n {
            break;
        }
        n = n.saturating_mul(2);
    }
    let Some((mut hi_n, mut hi_c)) = hi else {
        let last = check(max_n)?;
        let reason = if last.valid {
            format!("bound at N = {max_n} is {:.6e}", last.nu_bound)
        } else {
            format!("the threshold on delta is not met at N = {max_n}")
        };
        return Err(Error::Unreachable {
            nu_target,
            max_n,
            reason,
        });
    };
    if !monotone {
        return linear_scan(&check, nu_target, 0, hi_n, theorem);
    }
    // bisection on (lo, hi]
    while hi_n - lo > 1 {
        let mid = lo + (hi_n - lo) / 2;
        let c = check(mid)?;
        if c.passes(nu_target) {
            hi_n = mid;
            hi_c = c;
        } else {
            lo = mid;
        }
    }
    if hi_n > 0 && check(hi_n - 1)?.passes(nu_target) {
        return linear_scan(&check, nu_target, 0, hi_n, theorem);
    }
    Ok(plan_result(hi_n, &hi_c, theorem, SearchMode::Bisection))
}

fn linear_scan<F: Fn(usize) -> Result<Condition>>(
    check: &F,
    nu_target: f64,
    from: usize,
    to: usize,
    theorem: Theorem,
) -> Result<PlanResult> {
    for n in from..=to {
        let c = check(n)?;
        if c.passes(nu_target) {
            return Ok(plan_result(n, &c, theorem, SearchMode::LinearScan));
        }
    }
    Err(Error::Planner(format!("linear scan found no passing level in {from}..={to}")))
}

fn scan_with_approximation(
    spec: &ProcessSpec,
    delta: f64,
    nu_target: f64,
    theorem: Theorem,
    opts: &PlanOptions,
    max_n: usize,
) -> Result<PlanResult> {
    let mut floor: Option<(usize, Condition)> = None;
    let mut gamma_min = (0usize, f64::INFINITY);
    let mut prev_gamma = f64::INFINITY;
    for n in 0..=max_n {
        let c = check_condition(spec, n, delta, theorem, None, opts)?;
        if c.passes(nu_target) {
            return Ok(plan_result(n, &c, theorem, SearchMode::LinearScan));
        }
        if c.valid && floor.map_or(true, |(_, f)| c.log_nu < f.log_nu) {
            floor = Some((n, c));
        }
        let g = c.gamma.gamma;
        if g < gamma_min.1 {
            gamma_min = (n, g);
        }
        // Past the minimum of gamma_N the approximation part grows and
        // every later gamma_M is at least approx_part(N). Stop once that
        // part alone can no longer be accepted.
        let rising = g > prev_gamma;
        prev_gamma = g;
        if rising && approx_only_fails(spec, n, delta, nu_target, theorem, &c, opts)? {
            break;
        }
    }
    match floor {
        Some((n_at_floor, f)) => Err(Error::IrreducibleApproximation {
            floor_nu: f.nu_bound,
            n_at_floor,
            gamma_min: gamma_min.1,
            nu_target,
        }),
        None => Err(Error::IrreducibleApproximation {
            floor_nu: f64::INFINITY,
            n_at_floor: gamma_min.0,
            gamma_min: gamma_min.1,
            nu_target,
        }),
    }
}

/// Whether the condition fails with the tail removed, i.e. with
/// `gamma = approx_part(N)`.
fn approx_only_fails(
    spec: &ProcessSpec,
    n: usize,
    delta: f64,
    nu_target: f64,
    theorem: Theorem,
    at_n: &Condition,
    opts: &PlanOptions,
) -> Result<bool> {
    let a = at_n.gamma.approx_part;
    if a >= delta {
        return Ok(true);
    }
    let gamma = GammaN {
        gamma: a,
        approx_part: a,
        tail_part: 0.0,
    };
    let c = if theorem.has_free_p() {
        free_p_condition(spec, n, delta, gamma, None, opts)?
    } else {
        interval_condition(spec, delta, gamma, opts)?
    };
    Ok(!c.passes(nu_target))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub condition: Condition,
}

/// Conditions at each level of `ns`, evaluated concurrently.
pub fn sweep(
    spec: &ProcessSpec,
    delta: f64,
    theorem: Theorem,
    ns: &[usize],
    opts: &PlanOptions,
) -> Result<Vec<SweepRow>> {
    ns.par_iter()
        .map(|&n| {
            check_condition(spec, n, delta, theorem, None, opts).map(|condition| SweepRow { n, condition })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::z_closed_thm3;
    use crate::geometry::{EntropyExponent, IntervalSpace, Modulus};
    use crate::orlicz::{PhiFunction, RandomCoefficient};
    use crate::process::{FiniteSine, Perturbation, WienerKl, XiSequence};
    use std::sync::Arc;

    fn wiener(class: PhiClass, pert: Option<Perturbation>) -> ProcessSpec {
        let s = IntervalSpace::new(1.0).unwrap();
        ProcessSpec::new(
            s,
            Modulus::new(1.0, 0.4).unwrap(),
            EntropyExponent::new(0.2).unwrap(),
            PhiFunction::new(2.0, class).unwrap(),
            Arc::new(WienerKl::new(&s)),
            pert,
            XiSequence::Iid(RandomCoefficient::gaussian(1.0).unwrap()),
        )
        .unwrap()
    }

    fn finite(amps: Vec<f64>) -> ProcessSpec {
        let s = IntervalSpace::new(1.0).unwrap();
        ProcessSpec::new(
            s,
            Modulus::new(1.0, 0.4).unwrap(),
            EntropyExponent::new(0.2).unwrap(),
            PhiFunction::with_zeta(2.0).unwrap(),
            Arc::new(FiniteSine::new(&s, amps).unwrap()),
            None,
            XiSequence::Iid(RandomCoefficient::gaussian(1.0).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn theorem_parsing_and_pairing() {
        assert_eq!("T7".parse::<Theorem>().unwrap(), Theorem::T7);
        assert!("t9".parse::<Theorem>().is_err());
        let spec = wiener(PhiClass::ClassI, None);
        let opts = PlanOptions::default();
        assert!(check_condition(&spec, 3, 1.0, Theorem::T5, None, &opts).is_err());
        assert!(check_condition(&spec, 3, 1.0, Theorem::T7, Some(0.3), &opts).is_err());
    }

    #[test]
    fn exact_model_has_zero_bound() {
        let spec = finite(vec![1.0, 0.5]);
        let opts = PlanOptions::default();
        for th in [Theorem::T4, Theorem::T7, Theorem::T11] {
            let c = check_condition(&spec, 2, 0.01, th, None, &opts).unwrap();
            assert_eq!(c.nu_bound, 0.0);
            assert!(c.valid);
        }
        let plan = plan_minimal_n(&spec, 0.1, 0.01, Theorem::T4, &opts).unwrap();
        assert!(plan.n <= 2);
    }

    #[test]
    fn interval_form_matches_free_form_at_substituted_p() {
        let spec = wiener(PhiClass::ClassII, None);
        let opts = PlanOptions::default();
        let n = 20;
        let delta = 1.3;
        let c = check_condition(&spec, n, delta, Theorem::T8, None, &opts).unwrap();
        let g = spec.gamma_n(n).unwrap().gamma;
        let beta = spec.modulus.beta(&spec.space);
        let q = TailQuery::new(delta, g / delta, beta, g, spec.phi, EntropyFactor::Limiting { alpha: 0.4 }).unwrap();
        let b = z_closed_thm3(&q).unwrap().for_side(Side::Abs);
        assert!(((c.nu_bound - b.value) / b.value).abs() < 1e-12);
    }

    #[test]
    fn optimized_p_beats_grid() {
        let spec = wiener(PhiClass::ClassI, None);
        let opts = PlanOptions::default();
        let (n, delta) = (50, 0.8);
        let best = check_condition(&spec, n, delta, Theorem::T4, None, &opts).unwrap();
        assert!(best.valid);
        let p_hi = p_upper(&spec, delta, best.gamma.gamma, best.beta).unwrap();
        for i in 1..200 {
            let p = p_hi * i as f64 / 200.0;
            let c = check_condition(&spec, n, delta, Theorem::T4, Some(p), &opts).unwrap();
            assert!(c.valid);
            assert!(best.log_nu <= c.log_nu + 1e-9);
        }
        // just past the largest valid p the threshold fails
        let c = check_condition(&spec, n, delta, Theorem::T4, Some((p_hi * 1.001).min(0.999)), &opts).unwrap();
        assert!(!c.valid);
    }

    #[test]
    fn bound_monotone_in_n_and_delta() {
        let spec = wiener(PhiClass::ClassI, None);
        let opts = PlanOptions::default();
        let ns: Vec<usize> = (1..=200).collect();
        let rows = sweep(&spec, 0.5, Theorem::T4, &ns, &opts).unwrap();
        let valid: Vec<_> = rows.iter().filter(|r| r.condition.valid).collect();
        assert!(!valid.is_empty());
        for w in valid.windows(2) {
            assert!(w[1].condition.log_nu <= w[0].condition.log_nu + 1e-9, "N={}", w[1].n);
        }
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let d = 0.3 + 0.05 * i as f64;
            let c = check_condition(&spec, 30, d, Theorem::T4, None, &opts).unwrap();
            if c.valid {
                assert!(c.log_nu <= prev + 1e-9);
                prev = c.log_nu;
            }
        }
    }

    #[test]
    fn minimal_n_is_minimal() {
        let spec = wiener(PhiClass::ClassI, None);
        let opts = PlanOptions::default();
        let plan = plan_minimal_n(&spec, 0.5, 0.05, Theorem::T4, &opts).unwrap();
        assert_eq!(plan.search, SearchMode::Bisection);
        assert!(plan.nu_achieved <= 0.05);
        let before = check_condition(&spec, plan.n - 1, 0.5, Theorem::T4, None, &opts).unwrap();
        assert!(!before.passes(0.05));
        assert_eq!(plan, plan_minimal_n(&spec, 0.5, 0.05, Theorem::T4, &opts).unwrap());
    }

    #[test]
    fn interval_threshold_unreachable_for_small_delta() {
        let spec = wiener(PhiClass::ClassI, None);
        let opts = PlanOptions {
            max_n: 1 << 16,
            ..PlanOptions::default()
        };
        match plan_minimal_n(&spec, 0.5, 0.05, Theorem::T7, &opts) {
            Err(Error::Unreachable { reason, .. }) => assert!(reason.contains("threshold")),
            other => panic!("expected unreachable, got {other:?}"),
        }
    }

    #[test]
    fn irreducible_error_reported() {
        let spec = wiener(PhiClass::ClassI, Some(Perturbation::new(0.1, 0.0).unwrap()));
        let opts = PlanOptions::default();
        match plan_minimal_n(&spec, 2.5, 1e-4, Theorem::T7, &opts) {
            Err(Error::IrreducibleApproximation {
                floor_nu, n_at_floor, ..
            }) => {
                assert!(floor_nu > 1e-4 && floor_nu < 1.0);
                assert!(n_at_floor > 0);
            }
            other => panic!("expected irreducible error, got {other:?}"),
        }
        let ok = plan_minimal_n(&spec, 2.5, 0.01, Theorem::T7, &opts).unwrap();
        assert_eq!(ok.search, SearchMode::LinearScan);
        assert!(ok.nu_achieved <= 0.01);
    }

    #[test]
    fn degenerate_modulus_rejected() {
        // gamma_N > 0 from the approximation error but no Hölder mass left
        let s = IntervalSpace::new(1.0).unwrap();
        let spec = ProcessSpec::new(
            s,
            Modulus::new(1.0, 0.4).unwrap(),
            EntropyExponent::new(0.2).unwrap(),
            PhiFunction::with_zeta(2.0).unwrap(),
            Arc::new(FiniteSine::new(&s, vec![0.0, 0.0]).unwrap()),
            Some(Perturbation::new(0.1, 0.0).unwrap()),
            XiSequence::Iid(RandomCoefficient::gaussian(1.0).unwrap()),
        )
        .unwrap();
        let err = check_condition(&spec, 2, 1.0, Theorem::T4, None, &PlanOptions::default()).unwrap_err();
        assert!(err.to_string().contains("degenerate"));
    }
}
