//! Sums of the form `Σ_{k≥1} N(π²k²) / ∏_j (π²k² + b_j)`.
//!
//! The first `K` terms are summed directly. The remainder is expanded in
//! powers of `1/(π²k²)` and each power is summed exactly with a Hurwitz zeta
//! value, which removes the slow `1/K` truncation error of plain partial sums.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Bernoulli numbers B_2, B_4, ..., B_18.
const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

const MIN_DIRECT_TERMS: usize = 16;
const MAX_TAIL_TERMS: usize = 64;

/// Result of an accelerated series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    /// Terms summed directly.
    pub direct_terms: usize,
    /// Powers of `1/(π²k²)` used for the remainder.
    pub tail_terms: usize,
    /// Upper bound on the neglected part of the remainder expansion.
    pub tail_bound: f64,
}

/// `a^s ζ(s, a)` for `s ≥ 2`, `a ≥ 1`, by Euler–Maclaurin.
pub fn scaled_hurwitz_zeta(s: u32, a: f64) -> f64 {
    debug_assert!(s >= 2 && a >= 1.0);
    let sf = s as f64;
    let shift = (2.0 * (sf + 16.0) - a).ceil().max(0.0) as usize;
    let mut direct = 0.0;
    for j in (0..shift).rev() {
        direct += (a / (a + j as f64)).powi(s as i32);
    }
    let b = a + shift as f64;
    let mut corr = b / (sf - 1.0) + 0.5;
    // (s)_{2i-1} / (2i)! / b^{2i-1}
    let mut factor = sf / (2.0 * b);
    for (i, bern) in BERNOULLI.iter().enumerate() {
        let i = i + 1;
        corr += bern * factor;
        let m = 2 * i;
        factor *= (sf + m as f64 - 1.0) * (sf + m as f64) / ((m as f64 + 1.0) * (m as f64 + 2.0) * b * b);
    }
    direct + (a / b).powi(s as i32) * corr
}

thread_local! {
    static ZETA_CACHE: RefCell<HashMap<usize, Vec<f64>>> = RefCell::new(HashMap::new());
}

/// `a^{2m} ζ(2m, a)` for `m = 1..=MAX_TAIL_TERMS` with `a = k_last + 1`.
fn tail_zetas(k_last: usize) -> Vec<f64> {
    ZETA_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry(k_last)
            .or_insert_with(|| {
                let a = (k_last + 1) as f64;
                (1..=MAX_TAIL_TERMS)
                    .map(|m| scaled_hurwitz_zeta(2 * m as u32, a))
                    .collect()
            })
            .clone()
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of directly summed terms for the given poles: enough that every
/// pole sits below `1/16` of `π²(K+1)²`.
pub fn direct_terms_for(max_pole: f64) -> usize {
    let k = (4.0 * max_pole.max(0.0).sqrt() / PI).ceil();
    if k.is_finite() && k > MIN_DIRECT_TERMS as f64 {
        k as usize
    } else {
        MIN_DIRECT_TERMS
    }
}

/// Evaluates `Σ_{k≥1} N(u_k)/∏_j(u_k + b_j)` with `u_k = π²k²`.
///
/// `numerator` holds the polynomial coefficients in ascending powers of `u`;
/// its degree must be below `poles.len()`. Poles must be non-negative.
/// The expansion stops once a term drops below `tol` relative to the running total.
pub fn rational_series(numerator: &[f64], poles: &[f64], tol: f64) -> SeriesSum {
    let q = poles.len();
    assert!(numerator.len() <= q, "series does not converge");
    debug_assert!(poles.iter().all(|&b| b >= 0.0));
    let max_pole = poles.iter().copied().fold(0.0, f64::max);
    let kk = direct_terms_for(max_pole);

    let eval = |u: f64| {
        let mut num = 0.0;
        for &c in numerator.iter().rev() {
            num = num * u + c;
        }
        let den: f64 = poles.iter().map(|&b| u + b).product();
        num / den
    };
    let mut partial = 0.0;
    for k in (1..=kk).rev() {
        let kf = k as f64;
        partial += eval(PI * PI * kf * kf);
    }

    let a = (kk + 1) as f64;
    let big_u = PI * PI * a * a;
    let rho: Vec<f64> = poles.iter().map(|&b| b / big_u).collect();
    let rho_max = rho.iter().copied().fold(0.0, f64::max);
    // n'_i = n_i U^{i-q}
    let scaled_num: Vec<f64> = numerator
        .iter()
        .enumerate()
        .map(|(i, &c)| c * big_u.powi(i as i32 - q as i32))
        .collect();
    let num_abs: f64 = scaled_num.iter().map(|c| c.abs()).sum();

    // complete homogeneous symmetric polynomials h_m(ρ), m = 0..=MAX
    let mut h = vec![0.0; MAX_TAIL_TERMS + q + 1];
    h[0] = 1.0;
    for &r in &rho {
        for m in 1..h.len() {
            h[m] += r * h[m - 1];
        }
    }

    let zetas = tail_zetas(kk);
    let mut tail = 0.0;
    let mut used = 0;
    let mut quiet = 0;
    for s in 1..=MAX_TAIL_TERMS {
        let mut coef = 0.0;
        for (i, &n) in scaled_num.iter().enumerate() {
            if s + i < q {
                continue;
            }
            let m = s + i - q;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            coef += n * sign * h[m];
        }
        let term = coef * zetas[s - 1];
        tail += term;
        used = s;
        if term.abs() <= tol * (partial + tail).abs() {
            quiet += 1;
            if quiet == 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }

    // |C'_s| ≤ Σ|n'_i| · C(m+q-1, q-1) ρ_max^m with m = s - q (ρ_max ≤ 1/16 makes
    // this decreasing in m), and a^{2s} ζ(2s, a) ≤ a/(2s-1) + 1.
    let mut bound = 0.0;
    for s in used + 1..used + 400 {
        let m = s.saturating_sub(q);
        let c = num_abs * binomial(m + q - 1, q - 1) * rho_max.powi(m as i32);
        let z = a / (2.0 * s as f64 - 1.0) + 1.0;
        bound += c * z;
        if c * z < 1e-30 * bound.max(f64::MIN_POSITIVE) {
            break;
        }
    }

    SeriesSum {
        value: partial + tail,
        direct_terms: kk,
        tail_terms: used,
        tail_bound: bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_values() {
        // ζ(2) = π²/6, ζ(4) = π⁴/90
        assert!((scaled_hurwitz_zeta(2, 1.0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((scaled_hurwitz_zeta(4, 1.0) - PI.powi(4) / 90.0).abs() < 1e-15);
        // ζ(2, 3) = π²/6 - 1 - 1/4, scaled by 9
        let z = scaled_hurwitz_zeta(2, 3.0) / 9.0;
        assert!((z - (PI * PI / 6.0 - 1.25)).abs() < 1e-15);
        // 30-digit reference values
        let z = scaled_hurwitz_zeta(60, 20.0);
        assert!((z - 1.057067338551594931).abs() < 1e-15);
        let z = scaled_hurwitz_zeta(10, 17.0);
        assert!((z - 2.437540819172605582).abs() < 2e-15);
    }

    #[test]
    fn basel_sum() {
        // Σ 6/(π²k²) = 1
        let r = rational_series(&[6.0], &[0.0], 1e-16);
        assert!((r.value - 1.0).abs() < 1e-15, "{}", r.value);
    }

    #[test]
    fn coth_partial_fractions() {
        // Σ 1/(π²k² + y²) = (coth y - 1/y)/(2y), 30-digit reference values
        let cases = [
            (0.3f64, 0.1656751616473470935408),
            (2.0, 0.1343286801818870239695),
            (17.0, 0.0276816608996540800569),
            (150.0, 0.003311111111111111111111),
        ];
        for (y, exact) in cases {
            let r = rational_series(&[1.0], &[y * y], 1e-16);
            assert!((r.value - exact).abs() < 2e-15 * exact, "{y}: {} {exact}", r.value);
            assert!(r.tail_bound < 1e-14 * exact);
        }
    }
}
