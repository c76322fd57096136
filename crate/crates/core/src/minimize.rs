//! One-dimensional minimization: downhill bracketing followed by Brent's
//! golden-section/parabolic refinement.

const GOLDEN: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// A triple `a < b < c` (or reversed) with `f(b) <= f(a)` and `f(b) <= f(c)`.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub fb: f64,
}

/// Expands geometrically from `x0` in the downhill direction until the
/// function turns up. Returns `None` if no turn is found within
/// `max_expansions` (monotone or unbounded below along the search line).
pub fn bracket<F: Fn(f64) -> f64>(f: &F, x0: f64, step: f64, max_expansions: usize) -> Option<Bracket> {
    let f0 = f(x0);
    let mut step = step;
    let mut f1 = f(x0 + step);
    if f1 > f0 {
        step = -step;
        f1 = f(x0 + step);
        if f1 >= f0 {
            return Some(Bracket {
                a: x0 - step,
                b: x0,
                c: x0 + step,
                fb: f0,
            });
        }
    }
    let (mut a, mut b) = (x0, x0 + step);
    let mut fb = f1;
    for _ in 0..max_expansions {
        step *= 2.0;
        let c = b + step;
        let fc = f(c);
        if fc >= fb {
            return Some(Bracket { a, b, c, fb });
        }
        a = b;
        b = c;
        fb = fc;
    }
    None
}

/// Brent's method on the bracketing interval spanned by `br`.
/// Stops when the interval is below `rel_tol * |x| + abs_tol`.
pub fn brent<F: Fn(f64) -> f64>(f: &F, br: Bracket, rel_tol: f64, abs_tol: f64, max_iter: usize) -> Minimum {
    let (mut a, mut b) = if br.a < br.c { (br.a, br.c) } else { (br.c, br.a) };
    let mut x = br.b;
    let mut w = x;
    let mut v = x;
    let mut fx = br.fb;
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for iter in 0..max_iter {
        let xm = 0.5 * (a + b);
        let tol1 = rel_tol * x.abs() + abs_tol.max(1e-300);
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Minimum {
                x,
                fx,
                iterations: iter,
                converged: true,
            };
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum {
        x,
        fx,
        iterations: max_iter,
        converged: false,
    }
}

/// Minimizes a unimodal `f` on the closed interval `[lo, hi]`, including the
/// endpoints as candidates.
pub fn minimize_on<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Minimum {
    let inner = lo + (1.0 - GOLDEN) * (hi - lo);
    let br = Bracket {
        a: lo,
        b: inner,
        c: hi,
        fb: f(inner),
    };
    let mut best = brent(f, br, tol, tol, 200);
    for end in [lo, hi] {
        let fe = f(end);
        if fe < best.fx {
            best = Minimum { x: end, fx: fe, ..best };
        }
    }
    best
}
