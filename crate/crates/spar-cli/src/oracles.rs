//! Exact enumeration oracles for the closed-form moment identities, used by
//! the `check-lemmas` report.

/// Binomial pmf over 0..=n by multiplicative recurrence.
pub fn binom_pmf(n: usize, q: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; n + 1];
    if q >= 1.0 {
        pmf[n] = 1.0;
        return pmf;
    }
    pmf[0] = (1.0 - q).powi(n as i32);
    for x in 0..n {
        pmf[x + 1] = pmf[x] * ((n - x) as f64 / (x + 1) as f64) * (q / (1.0 - q));
    }
    pmf
}

/// Exact E[1 / (1 + X)^r] with X ~ Binom(p - 1, 1/m): the preimage-size
/// moments of a uniform random map restricted to a fixed column.
pub fn inverse_preimage_exact(p: usize, m: usize, r: i32) -> f64 {
    binom_pmf(p - 1, 1.0 / m as f64)
        .iter()
        .enumerate()
        .map(|(x, pr)| pr / (1.0 + x as f64).powi(r))
        .sum()
}

/// Exact E[X1 / (1 + X1 + X2)^r] with X1 ~ Binom(a_j, 1/m) and
/// X2 ~ Binom(p - 1 - a_j, 1/m) independent: the active-preimage ratio
/// moments.
pub fn active_ratio_exact(p: usize, m: usize, a_j: usize, r: i32) -> f64 {
    let q = 1.0 / m as f64;
    let pmf1 = binom_pmf(a_j, q);
    let pmf2 = binom_pmf(p - 1 - a_j, q);
    let mut total = 0.0;
    for (x1, pr1) in pmf1.iter().enumerate() {
        for (x2, pr2) in pmf2.iter().enumerate() {
            total += pr1 * pr2 * x1 as f64 / (1.0 + (x1 + x2) as f64).powi(r);
        }
    }
    total
}

/// Least-squares slope of ln(err) against ln(p).
pub fn log_log_slope(ps: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ps.iter().map(|&p| (p as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
