//! Sample paths of `X_N(t) = sum_{k<=N} xi_k a_k(t)` on a time grid.
//!
//! Coefficients come from a counter-based generator: `xi_k` of path `i`
//! depends only on `(seed, i, k)`, so models of different sizes built from
//! the same seed share their leading coefficients and `X_M - X_N` is
//! exactly the sum of terms `N < k <= M`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::orlicz::{Distribution, RandomCoefficient};
use crate::process::ProcessSpec;

/// Paths generated together; bounds the working set of one GEMM.
pub const BATCH: usize = 256;

/// Default grid: `2^12 + 1` points.
pub const DEFAULT_GRID: usize = 4097;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>, length: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Simulate("time grid is empty".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Simulate("time grid must be strictly increasing".into()));
        }
        if points[0] < 0.0 || *points.last().unwrap() > length {
            return Err(Error::Simulate(format!("time grid must lie in [0, {length}]")));
        }
        Ok(Self { points })
    }

    /// `size` equispaced points including both end points.
    pub fn uniform(length: f64, size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::Simulate(format!("uniform grid needs at least 2 points, got {size}")));
        }
        let h = length / (size - 1) as f64;
        let mut points: Vec<f64> = (0..size).map(|i| i as f64 * h).collect();
        points[size - 1] = length;
        Self::new(points, length)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    pub grid: TimeGrid,
    /// Row-major `count x grid.len()`.
    pub values: Vec<f64>,
    pub count: usize,
    pub seed: u64,
    pub n_used: usize,
    pub use_approx: bool,
}

impl PathBatch {
    pub fn path(&self, i: usize) -> &[f64] {
        let g = self.grid.len();
        &self.values[i * g..(i + 1) * g]
    }
}

fn unit(u: u64) -> f64 {
    (u >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One coefficient from the next two words of `rng`. Every draw consumes
/// exactly two `u64`, whatever the distribution.
fn draw(rng: &mut ChaCha8Rng, xi: &RandomCoefficient) -> f64 {
    let u1 = rng.next_u64();
    let u2 = rng.next_u64();
    match xi.distribution() {
        Distribution::Gaussian { scale } => {
            // 1 - U lies in (0, 1]
            let r = (-2.0 * (1.0 - unit(u1)).ln()).sqrt();
            scale * r * (std::f64::consts::TAU * unit(u2)).cos()
        }
        Distribution::SymmetricBounded { half_width } => half_width * (2.0 * unit(u1) - 1.0),
    }
}

fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// `xi_k` of path `path`, addressed directly.
pub fn xi_at(spec: &ProcessSpec, seed: u64, path: u64, k: usize) -> f64 {
    assert!(k >= 1, "coefficients are indexed from 1");
    let mut rng = path_rng(seed, path);
    // two u64 = four 32-bit words per draw
    rng.set_word_pos(4 * (k as u128 - 1));
    draw(&mut rng, spec.xi.get(k))
}

/// `xi_1, ..., xi_n` of path `path` into `out`.
pub fn fill_xi(spec: &ProcessSpec, seed: u64, path: u64, out: &mut [f64]) {
    let mut rng = path_rng(seed, path);
    for (i, x) in out.iter_mut().enumerate() {
        *x = draw(&mut rng, spec.xi.get(i + 1));
    }
}

/// Rows `k = from+1 ..= to` of the basis on the grid, row-major.
pub fn basis(spec: &ProcessSpec, from: usize, to: usize, grid: &TimeGrid, use_approx: bool) -> Vec<f64> {
    let mut out = Vec::with_capacity((to - from) * grid.len());
    for k in from + 1..=to {
        for &t in grid.points() {
            out.push(if use_approx {
                spec.approx_coefficient(k, t)
            } else {
                spec.coefficient(k, t)
            });
        }
    }
    out
}

/// `c += a b` with `a: m x k`, `b: k x n`, `c: m x n`, all row-major, where
/// `a` has row stride `lda`.
pub(crate) fn gemm_acc(m: usize, k: usize, n: usize, a: &[f64], lda: usize, b: &[f64], c: &mut [f64]) {
    if m == 0 || k == 0 || n == 0 {
        return;
    }
    debug_assert!(a.len() >= (m - 1) * lda + k && b.len() >= k * n && c.len() >= m * n);
    // SAFETY: the slices cover the strided extents checked above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            lda as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            1.0,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

pub fn sample_paths(
    spec: &ProcessSpec,
    n: usize,
    grid: &TimeGrid,
    count: usize,
    seed: u64,
    use_approx: bool,
) -> Result<PathBatch> {
    if count == 0 {
        return Err(Error::Simulate("path count must be >= 1".into()));
    }
    if *grid.points().last().unwrap() > spec.space.length() {
        return Err(Error::Simulate("time grid exceeds the parameter interval".into()));
    }
    let n = spec.term_count().map_or(n, |k| n.min(k));
    let g = grid.len();
    let b = basis(spec, 0, n, grid, use_approx);
    let mut values = vec![0.0; count * g];
    values
        .par_chunks_mut(BATCH * g)
        .enumerate()
        .for_each(|(bi, chunk)| {
            let rows = chunk.len() / g;
            let mut xi = vec![0.0; rows * n];
            for r in 0..rows {
                fill_xi(spec, seed, (bi * BATCH + r) as u64, &mut xi[r * n..(r + 1) * n]);
            }
            gemm_acc(rows, n, g, &xi, n, &b, chunk);
        });
    Ok(PathBatch {
        grid: grid.clone(),
        values,
        count,
        seed,
        n_used: n,
        use_approx,
    })
}

/// Largest grid increment `|X(t_i) - X(t_j)|` with `|i - j| = lag`, per
/// lag, maximized over paths. A diagnostic for the increment modulus.
pub fn empirical_increment_sup(batch: &PathBatch, lags: &[usize]) -> Vec<f64> {
    lags.iter()
        .map(|&lag| {
            (0..batch.count)
                .map(|i| {
                    let p = batch.path(i);
                    p.iter()
                        .zip(p.iter().skip(lag))
                        .map(|(a, b)| (b - a).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max)
        })
        .collect()
}
