//! Numeric kernels shared by the rate engines: entropy evaluated from
//! pair members, cancellation-free power differences, grid-seeded
//! golden-section search, and sign bisection.

use std::f64::consts::LN_2;

/// Binary Shannon entropy in bits. Assumes `x` in [0, 1]; both endpoints
/// return exactly 0.
pub(crate) fn entropy_bits(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    // ln_1p(-x) instead of (1 - x).ln() keeps the 1-x factor accurate for
    // small x.
    -(x * x.ln() + (1.0 - x) * (-x).ln_1p()) / LN_2
}

/// Entropy of u / (u + v) built from the two non-negative parts.
///
/// The ratio is formed from the smaller part, keeping the argument away
/// from 1. The direct ratio would round to exactly 1.0 once the smaller
/// part drops below one ulp of the sum and the entropy would silently
/// vanish, which is exactly the regime where the leakage terms of the
/// long-distance rates live.
pub(crate) fn entropy_from_parts(u: f64, v: f64) -> f64 {
    if u <= 0.0 || v <= 0.0 {
        return 0.0;
    }
    entropy_bits(u.min(v) / (u + v))
}

/// a^b - c^b evaluated as (a - c) * sum_i a^(b-1-i) c^i for 0 <= c <= a.
///
/// The caller supplies a - c separately so that an exactly known
/// difference survives even when a and c agree to nearly full precision.
pub(crate) fn diff_pow(a: f64, c: f64, b: u32, a_minus_c: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..b {
        acc += a.powi((b - 1 - i) as i32) * c.powi(i as i32);
    }
    a_minus_c * acc
}

/// For one factor pair returns ((even+odd)^b, (even+odd)^b + (even-odd)^b,
/// (even+odd)^b - (even-odd)^b).
///
/// The half that would subtract two nearly equal powers is routed through
/// [`diff_pow`]; the sum minus the absolute difference telescopes to twice
/// the smaller member, which is exact. The sign of (even-odd)^b depends on
/// the ordering of the pair and the parity of b, so the two halves swap
/// roles when the odd member dominates at odd b.
pub(crate) fn pow_pair(even: f64, odd: f64, b: u32) -> (f64, f64, f64) {
    let u = even + odd;
    let d_abs = (even - odd).abs();
    let ub = u.powi(b as i32);
    let sum = ub + d_abs.powi(b as i32);
    let diff = diff_pow(u, d_abs, b, 2.0 * even.min(odd));
    if even >= odd || b.is_multiple_of(2) {
        (ub, sum, diff)
    } else {
        (ub, diff, sum)
    }
}

/// 2 - phi, the interval reduction ratio of golden-section search.
const INV_GOLD: f64 = 0.381_966_011_250_105_1;

/// Minimizes `f` on [lo, hi]: a dense grid seeds a golden-section
/// refinement of the interval around the best grid point. Returns the
/// best point seen overall, so the result never regresses below the grid
/// scan even if the refinement stalls on a flat or noisy stretch.
pub(crate) fn grid_golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> (f64, f64) {
    debug_assert!(grid >= 2);
    if hi - lo < 1e-15 {
        let v = f(lo);
        return (lo, v);
    }
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::INFINITY;
    for i in 0..grid {
        let v = f(lo + step * i as f64);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let mut x1 = a + INV_GOLD * (b - a);
    let mut x2 = b - INV_GOLD * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + INV_GOLD * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - INV_GOLD * (b - a);
            f2 = f(x2);
        }
    }
    let (xm, fm) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if fm <= best_v {
        (xm, fm)
    } else {
        (lo + step * best_i as f64, best_v)
    }
}

/// Bisects to interval width `tol` assuming f(lo) > 0 and f(hi) <= 0;
/// returns the final midpoint.
pub(crate) fn bisect_positive_to_zero<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_endpoints_are_exact() {
        assert_eq!(entropy_bits(0.0), 0.0);
        assert_eq!(entropy_bits(1.0), 0.0);
        assert_eq!(entropy_bits(0.5), 1.0);
    }

    #[test]
    fn entropy_from_parts_handles_tiny_minority_part() {
        // u/(u+v) would round to exactly 1.0 here; the part-based form must
        // still see the 1e-20 admixture.
        let h = entropy_from_parts(1.0, 1e-20);
        assert!(h > 0.0);
        // H(eps) ~ eps * log2(1/eps) for small eps.
        let expected = 1e-20 * (1e-20f64).log2().abs() + 1e-20 / LN_2;
        assert!((h - expected).abs() < 1e-3 * expected);
    }

    #[test]
    fn entropy_from_parts_zero_mass_is_zero() {
        assert_eq!(entropy_from_parts(0.0, 0.3), 0.0);
        assert_eq!(entropy_from_parts(0.3, 0.0), 0.0);
        assert_eq!(entropy_from_parts(0.0, 0.0), 0.0);
    }

    #[test]
    fn diff_pow_matches_direct_difference_when_safe() {
        let (a, c, b) = (0.9f64, 0.7f64, 3u32);
        let direct = a.powi(3) - c.powi(3);
        assert!((diff_pow(a, c, b, a - c) - direct).abs() < 1e-15);
    }

    #[test]
    fn diff_pow_survives_catastrophic_cancellation() {
        // a and c agree to 15 digits; the direct difference keeps no
        // correct bits while the factored form is accurate.
        let a = 1.0;
        let eps = 1e-16;
        let c = a - eps;
        let got = diff_pow(a, c, 3, eps);
        let expected = 3.0 * eps; // (a^3 - c^3) ~ 3 a^2 eps
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn pow_pair_signs_follow_order_and_parity() {
        // Dominant odd member, even exponent: (even-odd)^2 is positive.
        let (ub, plus, minus) = pow_pair(0.2, 0.7, 2);
        assert!((ub - 0.81).abs() < 1e-15);
        assert!((plus - (0.81 + 0.25)).abs() < 1e-15);
        assert!((minus - (0.81 - 0.25)).abs() < 1e-15);
        // Dominant odd member, odd exponent: (even-odd)^3 is negative and
        // the halves swap.
        let (_, plus, minus) = pow_pair(0.2, 0.7, 3);
        assert!((plus - (0.729 - 0.125)).abs() < 1e-15);
        assert!((minus - (0.729 + 0.125)).abs() < 1e-15);
    }

    #[test]
    fn grid_golden_finds_quadratic_minimum() {
        let (x, v) = grid_golden_min(|x| (x - 0.3).powi(2), 0.0, 1.0, 50, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn grid_golden_degenerate_interval() {
        let (x, v) = grid_golden_min(|x| x + 1.0, 0.25, 0.25, 50, 1e-12);
        assert_eq!(x, 0.25);
        assert_eq!(v, 1.25);
    }

    #[test]
    fn bisect_locates_root() {
        let root = bisect_positive_to_zero(|x| 2.0 - x, 0.0, 10.0, 1e-9);
        assert!((root - 2.0).abs() < 1e-8);
    }
}
