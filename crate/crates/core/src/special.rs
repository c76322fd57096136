//! Special functions used by the closed forms.

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Hurwitz zeta `sum_{k>=0} (k + a)^{-s}` for `s > 1`, `a > 0`, via
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1, a > 0");
    let shift = if a < 12.0 { (12.0 - a).ceil() as usize } else { 0 };
    let mut head = 0.0;
    for k in 0..shift {
        head += (k as f64 + a).powf(-s);
    }
    let m = a + shift as f64;
    let mut tail = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) / (2j)!
    let mut coef = s / 2.0;
    let mut pow = m.powf(-s - 1.0);
    let m2 = m * m;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b * coef * pow;
        tail += term;
        if term.abs() < 1e-17 * tail.abs() {
            break;
        }
        let j2 = 2.0 * (j as f64 + 1.0);
        coef *= (s + j2 - 1.0) * (s + j2) / ((j2 + 1.0) * (j2 + 2.0));
        pow /= m2;
    }
    head + tail
}

/// Trigamma `psi'(x) = sum_{k>=0} (k + x)^{-2}`.
pub fn trigamma(x: f64) -> f64 {
    hurwitz_zeta(2.0, x)
}

/// `sum_{k=1}^{n} k^{-r}` for `r >= 0`. Summed directly up to 4096 terms,
/// Euler–Maclaurin beyond.
pub fn power_partial_sum(r: f64, n: usize) -> f64 {
    const DIRECT: usize = 4096;
    if r == 0.0 {
        return n as f64;
    }
    let head_len = n.min(DIRECT);
    let head: f64 = (1..=head_len).map(|k| (k as f64).powf(-r)).sum();
    if n <= DIRECT {
        return head;
    }
    // sum_{k=M+1}^{N} f(k) = int_M^N f + (f(N) - f(M))/2 + (f'(N) - f'(M))/12 - (f'''(N) - f'''(M))/720
    let (m, nn) = (DIRECT as f64, n as f64);
    let f = |x: f64| x.powf(-r);
    let f1 = |x: f64| -r * x.powf(-r - 1.0);
    let f3 = |x: f64| -r * (r + 1.0) * (r + 2.0) * x.powf(-r - 3.0);
    let integral = if (r - 1.0).abs() < 1e-15 {
        (nn / m).ln()
    } else {
        (nn.powf(1.0 - r) - m.powf(1.0 - r)) / (1.0 - r)
    };
    head + integral + 0.5 * (f(nn) - f(m)) + (f1(nn) - f1(m)) / 12.0 - (f3(nn) - f3(m)) / 720.0
}

/// Gauss hypergeometric series `2F1(a, b; c; x)` for `0 <= x <= 0.9`.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64) -> f64 {
    assert!((0.0..=0.9).contains(&x), "hyp2f1 series used outside its range");
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    while n < 10_000.0 {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        n += 1.0;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_zeta_values() {
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        // sum 1/(k+1/2)^2 = pi^2/2
        assert!((trigamma(0.5) - pi * pi / 2.0).abs() < 1e-13);
    }

    #[test]
    fn matches_direct_summation() {
        for &(s, a) in &[(1.2, 0.5), (1.5, 3.25), (2.7, 40.0), (3.0, 0.1)] {
            let direct: f64 = (0..2_000_000).map(|k| (k as f64 + a).powf(-s)).sum();
            let m = 2_000_000.0 + a;
            let tail = m.powf(1.0 - s) / (s - 1.0) + 0.5 * m.powf(-s);
            let want = direct + tail;
            let got = hurwitz_zeta(s, a);
            assert!(((got - want) / want).abs() < 1e-9, "s={s} a={a} {got} {want}");
        }
    }

    #[test]
    fn partial_power_sums() {
        for &r in &[0.0, 0.3, 1.0, 2.0, 3.5] {
            for &n in &[0usize, 1, 10, 4096, 4097, 100_000] {
                let direct: f64 = (1..=n).map(|k| (k as f64).powf(-r)).sum();
                let got = power_partial_sum(r, n);
                assert!((got - direct).abs() <= 1e-11 * direct.max(1.0), "r={r} n={n} {got} {direct}");
            }
        }
    }

    #[test]
    fn hyp2f1_closed_forms() {
        // 2F1(1,1;2;x) = -ln(1-x)/x
        let x: f64 = 0.4;
        assert!((hyp2f1(1.0, 1.0, 2.0, x) + (1.0 - x).ln() / x).abs() < 1e-15);
        // 2F1(a,b;b;x) = (1-x)^{-a}
        assert!((hyp2f1(0.3, 1.7, 1.7, 0.5) - 0.5f64.powf(-0.3)).abs() < 1e-14);
    }
}
