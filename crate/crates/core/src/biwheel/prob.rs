//! Cut-size probabilities for random checker matchings, in log space.
//!
//! `P(u, c)` is the probability that a fixed set of `u` checkers has exactly
//! `c` matching edges leaving it when the `12n` checkers receive a uniformly
//! random perfect matching. `P'(u, c)` and `P''(u, c, k)` are the analogues
//! for a random bijection between the two halves of `6n` checkers, with the
//! set split evenly (`P'`) or as `u/2 + k` / `u/2 - k` (`P''`).

use num_rational::Ratio;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

fn ln_factorial(k: i64) -> f64 {
    debug_assert!(k >= 0);
    ln_gamma(k as f64 + 1.0)
}

fn ln_binom(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Log of the product of all odd naturals `<= n` (so `n!!` for odd `n`, and
/// `(n-1)!!` for even `n`, the number of perfect matchings on `n` points).
pub fn ln_odd_double_factorial(n: i64) -> f64 {
    let k = (n.max(0) + 1) / 2;
    ln_factorial(2 * k) - k as f64 * std::f64::consts::LN_2 - ln_factorial(k)
}

fn check_n(n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::input(format!("wheel size n must be >= 1, got {n}")));
    }
    Ok(())
}

/// `ln P(u, c)`. Returns `-inf` when the probability is zero (`c > u`, too
/// few outside checkers, or `u - c` odd).
pub fn prob_cut_standard(n: i64, u: i64, c: i64) -> Result<f64> {
    check_n(n)?;
    let total = 12 * n;
    if u < 0 || c < 0 || u > total {
        return Err(Error::input(format!("need 0 <= c and 0 <= u <= 12n, got u={u}, c={c}, n={n}")));
    }
    if c > u || c > total - u || (u - c) % 2 != 0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(ln_binom(u, c) + ln_binom(total - u, c) + ln_factorial(c)
        + ln_odd_double_factorial(u - c)
        + ln_odd_double_factorial(total - u - c)
        - ln_odd_double_factorial(total))
}

fn check_half_args(n: i64, u: i64, c: i64) -> Result<()> {
    check_n(n)?;
    if u < 0 || c < 0 || u % 2 != 0 || c % 2 != 0 {
        return Err(Error::input(format!("u and c must be non-negative and even, got u={u}, c={c}")));
    }
    if u / 2 > 6 * n {
        return Err(Error::input(format!("u/2 must be <= 6n, got u={u}, n={n}")));
    }
    Ok(())
}

/// `ln P'(u, c)`.
pub fn prob_cut_balanced(n: i64, u: i64, c: i64) -> Result<f64> {
    check_half_args(n, u, c)?;
    Ok(ln_unbalanced_unchecked(n, u, c, 0))
}

/// `ln P''(u, c, k)` for `0 <= k <= c/2`.
pub fn prob_cut_unbalanced(n: i64, u: i64, c: i64, k: i64) -> Result<f64> {
    check_half_args(n, u, c)?;
    if k < 0 || 2 * k > c {
        return Err(Error::input(format!("need 0 <= k <= c/2, got k={k}, c={c}")));
    }
    Ok(ln_unbalanced_unchecked(n, u, c, k))
}

fn ln_unbalanced_unchecked(n: i64, u: i64, c: i64, k: i64) -> f64 {
    let (hu, hc, ho) = (u / 2, c / 2, (12 * n - u) / 2);
    if c > u {
        return f64::NEG_INFINITY;
    }
    let terms = [
        ln_binom(hu + k, hc + k),
        ln_binom(hu - k, hc - k),
        ln_binom(ho - k, hc - k),
        ln_binom(ho + k, hc + k),
    ];
    if terms.iter().any(|t| t.is_infinite()) || (u - c) / 2 < 0 || 12 * n - u - c < 0 {
        return f64::NEG_INFINITY;
    }
    terms.iter().sum::<f64>() + ln_factorial(hc + k) + ln_factorial(hc - k)
        + ln_factorial((u - c) / 2)
        + ln_factorial((12 * n - u - c) / 2)
        - ln_factorial(6 * n)
}

/// Closed form of `P''(u, c, k+1) / P''(u, c, k)` as an exact rational:
/// `(1 - (2k+1)/(c/2+k+1)) (1 + (2k+1)/(u/2-k)) (1 + (2k+1)/((12n-u)/2-k))`.
pub fn closed_form_ratio(n: i64, u: i64, c: i64, k: i64) -> Ratio<i64> {
    let r = |a: i64, b: i64| Ratio::new(a, b);
    let step = 2 * k + 1;
    let first = Ratio::from_integer(1) - r(step, c / 2 + k + 1);
    if first == Ratio::from_integer(0) {
        return first;
    }
    first
        * (Ratio::from_integer(1) + r(step, u / 2 - k))
        * (Ratio::from_integer(1) + r(step, (12 * n - u) / 2 - k))
}

/// Whether `P''(u, c, k+1) < P''(u, c, k)`, decided twice: from the log
/// probabilities and from the exact closed-form ratio. Refuses inputs outside
/// `u <= 6n`, `c <= u/6`, `k <= c/2` (even `u`, `c`), and reports an
/// invariant error if the two computations disagree.
pub fn ratio_check(n: i64, u: i64, c: i64, k: i64) -> Result<bool> {
    check_half_args(n, u, c)?;
    if u > 6 * n || 6 * c > u || k < 0 || 2 * k > c {
        return Err(Error::input(format!(
            "outside u <= 6n, c <= u/6, 0 <= k <= c/2: n={n}, u={u}, c={c}, k={k}"
        )));
    }
    let here = ln_unbalanced_unchecked(n, u, c, k);
    let next = if 2 * (k + 1) > c { f64::NEG_INFINITY } else { ln_unbalanced_unchecked(n, u, c, k + 1) };
    let direct = next - here < 0.0;
    let closed = closed_form_ratio(n, u, c, k) < Ratio::from_integer(1);
    if direct != closed {
        return Err(Error::invariant(format!(
            "ratio verdicts disagree at n={n}, u={u}, c={c}, k={k}: direct {direct}, closed form {closed}"
        )));
    }
    Ok(closed)
}

#[derive(Clone, Debug, Default, PartialEq, serde::Serialize)]
pub struct ProbGridSummary {
    pub max_n: i64,
    /// Largest `|1 - sum_c P|` over `P` and `P'` for every `n <= max_n`, `u`.
    pub max_sum_error: f64,
    /// Largest `|P''(u, c, 0) - P'(u, c)|` (in probability, not log space).
    pub max_k0_difference: f64,
    pub ratio_cells: usize,
    pub ratio_true: usize,
    /// First cells (`[n, u, c, k]`) where the ratio check is false.
    pub ratio_false: Vec<[i64; 4]>,
}

/// Normalisation of all three distributions for `n <= max_n`, and the
/// decreasing-ratio check on `n` in `ratio_ns`, `c <= u/6`, `k <= c/2`.
pub fn probability_grid(max_n: i64, ratio_ns: std::ops::RangeInclusive<i64>) -> Result<ProbGridSummary> {
    let mut out = ProbGridSummary { max_n, ..Default::default() };
    for n in 1..=max_n {
        for u in 0..=12 * n {
            let standard: f64 = (0..=u).map(|c| prob_cut_standard(n, u, c).map(f64::exp)).sum::<Result<f64>>()?;
            out.max_sum_error = out.max_sum_error.max((1.0 - standard).abs());
            if u % 2 == 1 {
                continue;
            }
            let mut balanced = 0.0;
            for c in (0..=u).step_by(2) {
                let p = prob_cut_balanced(n, u, c)?.exp();
                balanced += p;
                let k0 = prob_cut_unbalanced(n, u, c, 0)?.exp();
                out.max_k0_difference = out.max_k0_difference.max((p - k0).abs());
            }
            out.max_sum_error = out.max_sum_error.max((1.0 - balanced).abs());
        }
    }
    for n in ratio_ns {
        for u in (2..=6 * n).step_by(2) {
            for c in (0..=u / 6).filter(|c| c % 2 == 0) {
                for k in 0..=c / 2 {
                    out.ratio_cells += 1;
                    if ratio_check(n, u, c, k)? {
                        out.ratio_true += 1;
                    } else if out.ratio_false.len() < 20 {
                        out.ratio_false.push([n, u, c, k]);
                    }
                }
            }
        }
    }
    Ok(out)
}
