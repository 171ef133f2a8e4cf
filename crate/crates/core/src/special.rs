//! Log-space combinatorics and signed summation.

use statrs::function::gamma::ln_gamma;

const TABLE_LEN: usize = 256;

fn ln_factorial_table() -> &'static [f64; TABLE_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        for k in 1..TABLE_LEN {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        t
    })
}

/// `ln(n!)`, exact summation for small `n`, Lanczos `ln Γ(n + 1)` above.
pub fn ln_factorial(n: usize) -> f64 {
    if n < TABLE_LEN {
        ln_factorial_table()[n]
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `exponent * ln(base)` with the convention `0 * ln 0 = 0`.
pub(crate) fn ln_pow(base: f64, exponent: usize) -> f64 {
    if exponent == 0 {
        0.0
    } else {
        exponent as f64 * base.ln()
    }
}

/// A real term stored as sign and log-magnitude.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogTerm {
    pub sign: f64,
    pub ln_mag: f64,
}

/// Sums signed log-space terms, largest magnitude first.
pub(crate) fn signed_log_sum(terms: &mut [LogTerm]) -> f64 {
    let finite = terms.iter().filter(|t| t.ln_mag.is_finite()).count();
    if finite == 0 {
        return 0.0;
    }
    terms.sort_by(|a, b| b.ln_mag.total_cmp(&a.ln_mag));
    let top = terms[0].ln_mag;
    let mut acc = 0.0;
    for t in terms.iter().filter(|t| t.ln_mag.is_finite()) {
        acc += t.sign * (t.ln_mag - top).exp();
    }
    acc * top.exp()
}

/// Kahan-compensated sum.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in it {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_matches_product() {
        let mut p = 1.0_f64;
        for n in 1..=30usize {
            p *= n as f64;
            assert!((ln_factorial(n) - p.ln()).abs() < 1e-12);
        }
        assert_eq!(ln_factorial(0), 0.0);
    }

    #[test]
    fn table_and_gamma_agree_at_the_seam() {
        let table = ln_factorial(TABLE_LEN - 1) + (TABLE_LEN as f64).ln();
        assert!((table - ln_factorial(TABLE_LEN)).abs() / table < 1e-14);
    }

    #[test]
    fn binomial_small_values() {
        assert!((ln_binomial(10, 3).exp() - 120.0).abs() < 1e-9);
        assert_eq!(ln_binomial(3, 4), f64::NEG_INFINITY);
        assert_eq!(ln_binomial(7, 0), 0.0);
    }

    #[test]
    fn signed_sum_cancels() {
        let mut terms = vec![
            LogTerm { sign: 1.0, ln_mag: 3.0_f64.ln() },
            LogTerm { sign: -1.0, ln_mag: 2.0_f64.ln() },
            LogTerm { sign: 1.0, ln_mag: f64::NEG_INFINITY },
        ];
        assert!((signed_log_sum(&mut terms) - 1.0).abs() < 1e-15);
        assert_eq!(signed_log_sum(&mut []), 0.0);
    }
}
