//! Monte Carlo estimates of `P{max_grid |Delta_N| > delta}` and their
//! comparison with the planner's bounds.
//!
//! `X` is stood in for by the coupled `N_ref`-term sum with exact
//! coefficients, so `Delta_N = sum_{k<=N} xi_k (a_k - â_k) +
//! sum_{N<k<=N_ref} xi_k a_k`. The part of `X` beyond `N_ref` is bounded
//! analytically and reported. Maximizing over the grid instead of the whole
//! interval can only lower the empirical frequency.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::planner::{check_condition, PlanOptions, Theorem};
use crate::process::ProcessSpec;
use crate::simulate::{basis, fill_xi, gemm_acc, TimeGrid, BATCH};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub empirical_prob: f64,
    pub standard_error: f64,
    pub exceedances: u64,
    pub theoretical_bound: f64,
    /// Whether `delta` clears the theorem's threshold.
    pub bound_valid: bool,
    /// `empirical_prob <= theoretical_bound + 3 standard_error`.
    pub dominated: bool,
    pub n_paths: usize,
    pub n: usize,
    pub n_ref: usize,
    pub delta: f64,
    /// Bound on the standard of the neglected part of `X` beyond `N_ref`.
    pub remainder_gamma: f64,
    pub grid_size: usize,
    pub theorem: Theorem,
}

impl ValidationReport {
    /// Bound is informative here: valid and at most 1.
    pub fn is_checkable(&self) -> bool {
        self.bound_valid && self.theoretical_bound <= 1.0
    }

    /// A checkable bound that the simulation contradicts.
    pub fn is_violation(&self) -> bool {
        self.is_checkable() && !self.dominated
    }
}

/// Standard of `sum_{k>m} xi_k a_k` (no approximation error beyond `N_ref`).
pub fn remainder_gamma(spec: &ProcessSpec, m: usize) -> Result<f64> {
    let s = spec.sum_exponent();
    Ok(spec.tail_power_sum(m, s)?.powf(1.0 / s))
}

/// Reference level for a sweep: at least `4 N` and `N + 64` for the
/// largest `N`, and large enough that the neglected remainder has standard
/// below `delta_min / 100`.
pub fn reference_level(spec: &ProcessSpec, n_max: usize, delta_min: f64) -> Result<usize> {
    let floor = (4 * n_max).max(n_max + 64);
    let target = delta_min / 100.0;
    if remainder_gamma(spec, floor)? < target {
        return Ok(floor);
    }
    let mut hi = floor;
    while remainder_gamma(spec, hi)? >= target {
        if hi > 1 << 28 {
            return Err(Error::Validate(format!(
                "no reference level up to {hi} brings the remainder below {target:e}"
            )));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if remainder_gamma(spec, mid)? < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    pub grid: TimeGrid,
    pub n_paths: usize,
    pub seed: u64,
    pub theorem: Theorem,
    pub plan: PlanOptions,
    /// Explicit reference level; chosen by [`reference_level`] when absent.
    pub n_ref: Option<usize>,
}

pub fn estimate_exceedance(spec: &ProcessSpec, n: usize, delta: f64, cfg: &ValidationConfig) -> Result<ValidationReport> {
    Ok(estimate_sweep(spec, &[n], &[delta], cfg)?.remove(0))
}

/// Reports for every `(N, delta)` pair, all from the same coupled paths.
/// Ordered by `N` first, then `delta`, as given.
pub fn estimate_sweep(spec: &ProcessSpec, ns: &[usize], deltas: &[f64], cfg: &ValidationConfig) -> Result<Vec<ValidationReport>> {
    if ns.is_empty() || deltas.is_empty() {
        return Err(Error::Validate("need at least one N and one delta".into()));
    }
    if cfg.n_paths == 0 {
        return Err(Error::Validate("path count must be >= 1".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !(d.is_finite() && **d > 0.0)) {
        return Err(Error::Validate(format!("delta must be finite and > 0, got {d}")));
    }
    if *cfg.grid.points().last().unwrap() > spec.space.length() {
        return Err(Error::Validate("time grid exceeds the parameter interval".into()));
    }
    let n_max = *ns.iter().max().unwrap();
    let delta_min = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    let n_ref = match cfg.n_ref {
        None => reference_level(spec, n_max, delta_min)?,
        Some(m) => {
            let need = (4 * n_max).max(n_max + 64);
            if m < need {
                return Err(Error::Validate(format!("N_ref = {m} is below the required {need}")));
            }
            m
        }
    };
    let rem = remainder_gamma(spec, n_ref)?;
    if rem >= delta_min / 100.0 {
        return Err(Error::Validate(format!(
            "remainder beyond N_ref = {n_ref} has standard {rem:e}, not below delta/100 = {:e}",
            delta_min / 100.0
        )));
    }

    let counts = count_exceedances(spec, ns, deltas, n_ref, cfg)?;

    let mut reports = Vec::with_capacity(ns.len() * deltas.len());
    for (i, &n) in ns.iter().enumerate() {
        for (j, &delta) in deltas.iter().enumerate() {
            let c = check_condition(spec, n, delta, cfg.theorem, None, &cfg.plan)?;
            let hits = counts[i * deltas.len() + j];
            let p_hat = hits as f64 / cfg.n_paths as f64;
            let se = (p_hat * (1.0 - p_hat) / cfg.n_paths as f64).sqrt();
            reports.push(ValidationReport {
                empirical_prob: p_hat,
                standard_error: se,
                exceedances: hits,
                theoretical_bound: c.nu_bound,
                bound_valid: c.valid,
                dominated: p_hat <= c.nu_bound + 3.0 * se,
                n_paths: cfg.n_paths,
                n,
                n_ref,
                delta,
                remainder_gamma: rem,
                grid_size: cfg.grid.len(),
                theorem: cfg.theorem,
            });
        }
    }
    Ok(reports)
}

/// Exceedance counts, row-major over `(ns, deltas)`.
fn count_exceedances(
    spec: &ProcessSpec,
    ns: &[usize],
    deltas: &[f64],
    n_ref: usize,
    cfg: &ValidationConfig,
) -> Result<Vec<u64>> {
    let g = cfg.grid.len();
    let terms = spec.term_count().map_or(n_ref, |k| n_ref.min(k));
    let n_max = ns.iter().max().copied().unwrap_or(0).min(terms);
    // checkpoints in decreasing order, each with its index in `ns`
    let mut order: Vec<(usize, usize)> = ns.iter().map(|&n| n.min(terms)).enumerate().map(|(i, n)| (n, i)).collect();
    order.sort_unstable_by(|a, b| b.cmp(a));

    let full = basis(spec, 0, terms, &cfg.grid, false);
    let discrepancy = if spec.has_approximation_error() {
        let approx = basis(spec, 0, n_max, &cfg.grid, true);
        // a_k - â_k
        Some(full[..n_max * g].iter().zip(&approx).map(|(a, b)| a - b).collect::<Vec<f64>>())
    } else {
        None
    };

    let batches = cfg.n_paths.div_ceil(BATCH);
    let per_batch: Vec<Vec<u64>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let rows = BATCH.min(cfg.n_paths - b * BATCH);
            let mut xi = vec![0.0; rows * terms];
            for r in 0..rows {
                fill_xi(spec, cfg.seed, (b * BATCH + r) as u64, &mut xi[r * terms..(r + 1) * terms]);
            }
            let mut counts = vec![0u64; ns.len() * deltas.len()];
            let mut tail = vec![0.0; rows * g];
            let mut delta_n = vec![0.0; rows * g];
            let mut upper = terms;
            for &(n, idx) in &order {
                // tail += terms n < k <= upper
                gemm_acc(rows, upper - n, g, &xi[n..], terms, &full[n * g..upper * g], &mut tail);
                upper = n;
                delta_n.copy_from_slice(&tail);
                if let Some(d) = &discrepancy {
                    gemm_acc(rows, n, g, &xi, terms, &d[..n * g], &mut delta_n);
                }
                for r in 0..rows {
                    let m = delta_n[r * g..(r + 1) * g].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
                    for (j, &delta) in deltas.iter().enumerate() {
                        if m > delta {
                            counts[idx * deltas.len() + j] += 1;
                        }
                    }
                }
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; ns.len() * deltas.len()];
    for c in per_batch {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    Ok(total)
}
