//! Gamma-family helpers used by the power rule and endpoint regularization.

/// Euler gamma function.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

/// `1/Γ(x)`, taken as zero at the poles `x = 0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / gamma(x)
}

/// Riemann zeta function for real `s` in `(0, 1)`, via Borwein's accelerated
/// alternating series for the Dirichlet eta function.
pub fn zeta_critical(s: f64) -> f64 {
    assert!(s > 0.0 && s < 1.0, "zeta_critical expects 0 < s < 1, got {s}");
    const N: usize = 40;
    // d_k = n * sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!)
    let mut d = [0.0f64; N + 1];
    let n = N as f64;
    let mut term = 1.0 / n; // i = 0: (n-1)!/(n!) * n cancels below
    let mut acc = 0.0;
    for (i, di) in d.iter_mut().enumerate() {
        if i > 0 {
            let fi = i as f64;
            // ratio of consecutive summands
            term *= (n + fi - 1.0) * 4.0 * (n - fi + 1.0) / ((2.0 * fi - 1.0) * (2.0 * fi));
        }
        acc += term;
        *di = n * acc;
    }
    let dn = d[N];
    let mut eta = 0.0;
    for (k, dk) in d.iter().take(N).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        eta += sign * (dk - dn) / ((k + 1) as f64).powf(s);
    }
    eta = -eta / dn;
    eta / -((1.0 - s) * std::f64::consts::LN_2).exp_m1()
}
