//! Closed-form channel statistics for a symmetric mode-pairing link.
//!
//! The measurement node sits at the midpoint, so each arm spans half the
//! total distance and ends in a detector of efficiency `eta_d`; the
//! per-arm transmittance is `eta_s = eta_d * 10^(-alpha (L/2) / 10)`.
//! All quantities are per optical round unless stated otherwise, and every
//! operation here is a pure function of its inputs.

use crate::error::Error;
use crate::numeric;

/// Absolute slack granted to derived statistics before a range violation
/// becomes an error, covering floating-point rounding only.
const RANGE_SLACK: f64 = 1e-9;

/// How the single-photon Z-basis error rate is modeled.
///
/// The observed Z-basis error rate of paired rounds follows from the click
/// statistics, but the error rate conditioned on both senders emitting
/// exactly one photon is not directly observable and needs a modeling
/// choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EzzModel {
    /// Z errors among single-photon pairs come from dark counts alone,
    /// weighted by the same click-pattern decomposition that produces the
    /// observed pair error rate. This is the default.
    DarkCountSinglePhoton,
    /// Reuse the observed pair error rate unchanged.
    EqualObservedZ,
    /// Pin the value, for what-if studies. Must lie in [0, 0.5].
    Fixed(f64),
}

/// Physical and protocol parameters of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Detector efficiency, in (0, 1].
    pub eta_d: f64,
    /// Fiber attenuation in dB/km, non-negative.
    pub alpha: f64,
    /// Dark-count probability per detector per round, in [0, 0.5).
    pub p_d: f64,
    /// Error-correction inefficiency, at least 1.
    pub f: f64,
    /// Maximum number of rounds separating two clicks that may pair, at least 1.
    pub delta: u64,
    /// Misalignment error rate of the optical system, in [0, 0.5].
    pub e_d: f64,
    /// Error rate of vacuum-dominated detections, in [0, 1].
    pub e_0: f64,
    /// Model for the single-photon Z-basis error rate.
    pub e_zz_model: EzzModel,
}

impl SystemParams {
    /// Builds a parameter set with the conventional vacuum error rate of
    /// 0.5 and the default single-photon Z error model, rejecting any
    /// out-of-range field.
    pub fn new(
        eta_d: f64,
        alpha: f64,
        p_d: f64,
        f: f64,
        delta: u64,
        e_d: f64,
    ) -> Result<Self, Error> {
        SystemParams {
            eta_d,
            alpha,
            p_d,
            f,
            delta,
            e_d,
            e_0: 0.5,
            e_zz_model: EzzModel::DarkCountSinglePhoton,
        }
        .validated()
    }

    /// Reference operating point used by the command-line defaults and the
    /// regression tests: 20% detector efficiency, 0.2 dB/km fiber loss,
    /// 1.2e-8 dark counts per round, error-correction inefficiency 1.15,
    /// and a pairing interval of one million rounds.
    pub fn baseline(e_d: f64) -> Result<Self, Error> {
        Self::new(0.2, 0.2, 1.2e-8, 1.15, 1_000_000, e_d)
    }

    /// Returns `self` after re-checking every field range. Call this after
    /// building or mutating the struct directly.
    pub fn validated(self) -> Result<Self, Error> {
        let check = |ok: bool, name: &'static str, value: f64, range: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value, range })
            }
        };
        check(
            self.eta_d > 0.0 && self.eta_d <= 1.0,
            "eta_d",
            self.eta_d,
            "(0, 1]",
        )?;
        check(
            self.alpha >= 0.0 && self.alpha.is_finite(),
            "alpha",
            self.alpha,
            "[0, inf)",
        )?;
        check(
            self.p_d >= 0.0 && self.p_d < 0.5,
            "p_d",
            self.p_d,
            "[0, 0.5)",
        )?;
        check(self.f >= 1.0 && self.f.is_finite(), "f", self.f, "[1, inf)")?;
        check(self.delta >= 1, "delta", self.delta as f64, "[1, inf)")?;
        check(
            self.e_d >= 0.0 && self.e_d <= 0.5,
            "e_d",
            self.e_d,
            "[0, 0.5]",
        )?;
        check(
            self.e_0 >= 0.0 && self.e_0 <= 1.0,
            "e_0",
            self.e_0,
            "[0, 1]",
        )?;
        if let EzzModel::Fixed(v) = self.e_zz_model {
            check((0.0..=0.5).contains(&v), "e_zz_model", v, "[0, 0.5]")?;
        }
        Ok(self)
    }
}

/// Channel statistics derived for one operating point (distance, intensity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDerived {
    /// Per-arm transmittance including detector efficiency.
    pub eta_s: f64,
    /// Signal intensity (mean photon number per pulse).
    pub mu: f64,
    /// Per-round click probability.
    pub p: f64,
    /// Expected pairs per round under the pairing discipline.
    pub r_p: f64,
    /// Fraction of pairs usable in the key (Z) basis.
    pub r_s: f64,
    /// Observed error rate of Z-basis pairs.
    pub qber_z: f64,
    /// Exact value of 1 - `qber_z`.
    ///
    /// Carried separately because the error rate approaches 1 in the
    /// vacuum-dominated regime; the plain subtraction would lose every
    /// significant digit there and round the complement to zero, which in
    /// turn would zero the leakage entropy downstream.
    pub qber_z_complement: f64,
    /// Fraction of Z-basis pairs where each sender emitted exactly one photon.
    pub qbar11: f64,
    /// Yield of single-photon pairs in the test (X) basis.
    pub y11: f64,
    /// Single-photon error rate in the X basis.
    pub e_xx: f64,
    /// Modeled single-photon error rate in the Z basis.
    pub e_zz: f64,
}

/// Binary Shannon entropy in bits.
///
/// Arguments within 1e-15 of [0, 1] are snapped to the boundary; anything
/// further out is a domain error. Returns exactly 0 at 0 and 1.
pub fn binary_entropy(x: f64) -> Result<f64, Error> {
    if !(-1e-15..=1.0 + 1e-15).contains(&x) {
        return Err(Error::EntropyDomain { value: x });
    }
    Ok(numeric::entropy_bits(x.clamp(0.0, 1.0)))
}

/// Per-arm transmittance at total distance `l_km`, detector efficiency
/// included.
pub fn per_arm_transmittance(params: &SystemParams, l_km: f64) -> f64 {
    params.eta_d * 10f64.powf(-params.alpha * (l_km / 2.0) / 10.0)
}

/// Click term for light of intensity x = eta_s * mu reaching one detector
/// pair: 1 - (1 - 2 p_d) e^(-x), written through exp_m1 so the small-x
/// regime keeps full precision.
fn click_term(p_d: f64, x: f64) -> f64 {
    2.0 * p_d + (1.0 - 2.0 * p_d) * -(-x).exp_m1()
}

/// Per-round click probability, averaged over the four round
/// configurations: signal from one sender (twice), vacuum on both sides,
/// and signal from both senders.
pub fn click_probability(params: &SystemParams, eta_s: f64, mu: f64) -> f64 {
    let x = eta_s * mu;
    let one_side = click_term(params.p_d, x);
    let both_sides = click_term(params.p_d, 2.0 * x);
    0.25 * (2.0 * one_side + 2.0 * params.p_d + both_sides)
}

/// Expected pairs per round when two clicks at most `delta` rounds apart
/// form a pair.
///
/// Evaluates p s / (1 + s) with s = 1 - (1-p)^delta. The power is taken in
/// log space: delta is typically 1e6 and repeated multiplication would
/// drift long before that.
pub fn pair_rate(p: f64, delta: u64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let s = if p < 1.0 {
        -(delta as f64 * (-p).ln_1p()).exp_m1()
    } else {
        1.0
    };
    p * s / (1.0 + s)
}

/// Fraction of pairs whose clicks came one from each sender, making them
/// usable for key bits: a^2 / (8 p^2) with a the one-sided click term.
pub fn z_pair_ratio(
    params: &SystemParams,
    eta_s: f64,
    mu: f64,
    p: f64,
) -> Result<f64, Error> {
    let a = click_term(params.p_d, eta_s * mu);
    check_derived("r_s", a * a / (8.0 * p * p), 0.0, 1.0)
}

/// Observed error rate of Z-basis pairs: p_d c / (4 r_s p^2), with c the
/// both-sides click term.
///
/// Z errors in this model arise from dark counts only. The rate tends to 1
/// in the vacuum-dominated limit where dark counts supply both clicks of a
/// pair, which is why the admissible range is [0, 1] rather than [0, 0.5]:
/// intensity optimizers legitimately probe such operating points at long
/// distance before discarding them.
pub fn z_qber(
    params: &SystemParams,
    eta_s: f64,
    mu: f64,
    p: f64,
    r_s: f64,
) -> Result<f64, Error> {
    let c = click_term(params.p_d, 2.0 * eta_s * mu);
    check_derived("E_zz", 0.25 * params.p_d * c / (r_s * p * p), 0.0, 1.0)
}

/// Exact complement of [`z_qber`].
///
/// With a = 2 p_d + (1 - 2 p_d) k and k = 1 - e^(-x), the complement
/// numerator satisfies a^2 - 2 p_d c = (1 - 2 p_d) k^2 identically, so
/// 1 - E can be formed without subtracting two nearly equal quantities.
fn z_qber_complement(p_d: f64, x: f64) -> f64 {
    let k = -(-x).exp_m1();
    let a = 2.0 * p_d + (1.0 - 2.0 * p_d) * k;
    (1.0 - 2.0 * p_d) * k * k / (a * a)
}

/// Fraction of Z-basis pairs where each sender emitted exactly one photon:
/// P1^2 g^2 / (8 r_s p^2), with P1 = mu e^(-mu) the single-photon Poisson
/// weight and g the single-photon click term.
pub fn single_photon_pair_ratio(
    params: &SystemParams,
    eta_s: f64,
    mu: f64,
    p: f64,
    r_s: f64,
) -> Result<f64, Error> {
    let p1 = mu * (-mu).exp();
    let g = 2.0 * params.p_d + (1.0 - 2.0 * params.p_d) * eta_s;
    check_derived("qbar11", 0.125 * p1 * p1 * g * g / (r_s * p * p), 0.0, 1.0)
}

/// Yield and error rate of single-photon pairs in the X basis, for
/// possibly unequal arm transmittances. Returns (Y11, e_xx).
pub fn single_photon_x_stats(
    params: &SystemParams,
    eta_a: f64,
    eta_b: f64,
) -> Result<(f64, f64), Error> {
    let pd = params.p_d;
    let y11 = (1.0 - pd)
        * (1.0 - pd)
        * (eta_a * eta_b / 2.0
            + (2.0 * eta_a + 2.0 * eta_b - 3.0 * eta_a * eta_b) * pd
            + 4.0 * (1.0 - eta_a) * (1.0 - eta_b) * pd * pd);
    // Share of X-basis single-photon detections that carry the signal
    // rather than a dark count; the error rate interpolates between the
    // misalignment floor e_d (all signal) and the vacuum rate e_0.
    let e_xx = if pd == 0.0 {
        params.e_d
    } else {
        let signal_share = (1.0 - pd * pd) * (eta_a * eta_b / 2.0) / y11;
        params.e_0 - (params.e_0 - params.e_d) * signal_share
    };
    check_derived("e_xx", e_xx, 0.0, 0.5)?;
    Ok((y11, e_xx))
}

/// Single-photon Z-basis error rate under the configured model.
pub fn single_photon_z_error(
    params: &SystemParams,
    eta_s: f64,
    qber_z: f64,
) -> Result<f64, Error> {
    let e = match params.e_zz_model {
        EzzModel::DarkCountSinglePhoton => {
            // Click-pattern weights among single-photon pairs: correct
            // outcomes need one signal click per side (weight 2 A^2), error
            // outcomes pair a dark count with any click (weight 4 p_d B).
            let pd = params.p_d;
            let a = 2.0 * pd + (1.0 - 2.0 * pd) * eta_s;
            let b = 2.0 * pd + (1.0 - 2.0 * pd) * (2.0 - eta_s) * eta_s;
            let errors = 4.0 * pd * b;
            errors / (2.0 * a * a + errors)
        }
        EzzModel::EqualObservedZ => qber_z,
        EzzModel::Fixed(v) => v,
    };
    check_derived("e_zz", e, 0.0, 0.5)
}

/// Computes every channel statistic for one operating point.
pub fn derive_channel(
    params: &SystemParams,
    l_km: f64,
    mu: f64,
) -> Result<ChannelDerived, Error> {
    derive_channel_inner(params, l_km, mu).map_err(|e| e.at_point(l_km, mu))
}

fn derive_channel_inner(
    params: &SystemParams,
    l_km: f64,
    mu: f64,
) -> Result<ChannelDerived, Error> {
    if !(l_km >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "L",
            value: l_km,
            range: "[0, inf)",
        });
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "mu",
            value: mu,
            range: "(0, inf)",
        });
    }
    let eta_s = per_arm_transmittance(params, l_km);
    let p = check_derived("p", click_probability(params, eta_s, mu), 0.0, 1.0)?;
    let r_p = pair_rate(p, params.delta);
    if r_p > 0.5 * p + RANGE_SLACK {
        return Err(Error::DerivedOutOfRange {
            name: "r_p",
            value: r_p,
            lo: 0.0,
            hi: 0.5 * p,
        });
    }
    let r_s = z_pair_ratio(params, eta_s, mu, p)?;
    let qber_z = z_qber(params, eta_s, mu, p, r_s)?;
    let qber_z_complement = z_qber_complement(params.p_d, eta_s * mu);
    let qbar11 = single_photon_pair_ratio(params, eta_s, mu, p, r_s)?;
    let (y11, e_xx) = single_photon_x_stats(params, eta_s, eta_s)?;
    check_derived("Y11", y11, 0.0, 1.0)?;
    let e_zz = single_photon_z_error(params, eta_s, qber_z)?;
    Ok(ChannelDerived {
        eta_s,
        mu,
        p,
        r_p,
        r_s,
        qber_z,
        qber_z_complement,
        qbar11,
        y11,
        e_xx,
        e_zz,
    })
}

/// Rejects values outside [lo, hi] beyond floating-point slack rather than
/// clamping them; silent clamping would hide model-regime violations.
fn check_derived(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64, Error> {
    if value >= lo - RANGE_SLACK && value <= hi + RANGE_SLACK {
        Ok(value)
    } else {
        Err(Error::DerivedOutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> SystemParams {
        SystemParams::baseline(0.04).unwrap()
    }

    #[test]
    fn params_reject_out_of_range_fields() {
        assert!(SystemParams::new(0.0, 0.2, 1e-8, 1.15, 1_000_000, 0.04).is_err());
        assert!(SystemParams::new(0.2, -0.1, 1e-8, 1.15, 1_000_000, 0.04).is_err());
        assert!(SystemParams::new(0.2, 0.2, 0.5, 1.15, 1_000_000, 0.04).is_err());
        assert!(SystemParams::new(0.2, 0.2, 1e-8, 0.99, 1_000_000, 0.04).is_err());
        assert!(SystemParams::new(0.2, 0.2, 1e-8, 1.15, 0, 0.04).is_err());
        assert!(SystemParams::new(0.2, 0.2, 1e-8, 1.15, 1_000_000, 0.6).is_err());
        let mut p = baseline();
        p.e_zz_model = EzzModel::Fixed(0.7);
        assert!(p.validated().is_err());
        assert!(SystemParams::new(f64::NAN, 0.2, 1e-8, 1.15, 1_000_000, 0.04).is_err());
    }

    #[test]
    fn binary_entropy_boundaries_and_known_value() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        // Value frozen from an independent high-precision evaluation.
        assert!((binary_entropy(0.11).unwrap() - 0.499915958164528).abs() < 1e-12);
        // Snapping band vs. domain error.
        assert_eq!(binary_entropy(-5e-16).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0 + 5e-16).unwrap(), 0.0);
        assert!(binary_entropy(-1e-3).is_err());
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn per_arm_transmittance_known_points() {
        let p = baseline();
        assert_eq!(per_arm_transmittance(&p, 0.0), 0.2);
        assert!((per_arm_transmittance(&p, 100.0) - 0.02).abs() < 1e-15);
        // 0.2 * 10^(-4.82), frozen from an independent evaluation.
        assert!((per_arm_transmittance(&p, 482.0) - 3.0271224968724144e-6).abs() < 1e-18);
    }

    #[test]
    fn click_probability_limits_and_case_sum() {
        let mut p = baseline();
        p.p_d = 0.0;
        assert_eq!(click_probability(&p, 0.2, 0.0), 0.0);
        // Small-signal regime: p approaches eta_s * mu within 1%.
        let x = 0.01;
        let got = click_probability(&p, 0.02, x / 0.02);
        assert!((got - x).abs() / x < 0.01);
        // Case-by-case oracle: average the four round configurations
        // directly (one-sided signal twice, dark-only, both-sided signal).
        let p = baseline();
        let (eta_s, mu) = (0.02f64, 0.1f64);
        let x = eta_s * mu;
        let one = 1.0 - (1.0 - 2.0 * p.p_d) * (-x).exp();
        let dark = 2.0 * p.p_d;
        let both = 1.0 - (1.0 - 2.0 * p.p_d) * (-2.0 * x).exp();
        let oracle = 0.25 * (one + one + dark + both);
        let got = click_probability(&p, eta_s, mu);
        assert!((got - oracle).abs() < 1e-15);
    }

    #[test]
    fn pair_rate_limits_and_delta_one() {
        // Large pairing interval: r_p -> p/2.
        assert!((pair_rate(0.1, 1_000_000) - 0.05).abs() < 1e-9);
        // delta = 1 collapses to p^2 / (1 + p).
        let direct = 0.1 * 0.1 / 1.1;
        assert!((pair_rate(0.1, 1) - direct).abs() < 1e-15);
        assert_eq!(pair_rate(0.0, 5), 0.0);
        assert_eq!(pair_rate(1.0, 5), 0.5);
    }

    #[test]
    fn pair_rate_monotone_in_p_and_delta() {
        let ps = [1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.7, 1.0];
        for w in ps.windows(2) {
            for delta in [1, 2, 10, 1000] {
                assert!(pair_rate(w[0], delta) <= pair_rate(w[1], delta));
            }
        }
        for &p in &ps {
            for d in [1u64, 2, 5, 100, 10_000] {
                assert!(pair_rate(p, d) <= pair_rate(p, d + 1) + 1e-18);
            }
        }
    }

    #[test]
    fn z_pair_ratio_small_and_large_signal_limits() {
        let mut params = baseline();
        params.p_d = 0.0;
        // Small signal: both click terms scale linearly, p ~ x, r_s -> 1/8.
        let eta_s = 0.2;
        let mu = 1e-4 / eta_s;
        let p = click_probability(&params, eta_s, mu);
        let r_s = z_pair_ratio(&params, eta_s, mu, p).unwrap();
        assert!((r_s - 0.125).abs() / 0.125 < 0.01);
        assert!((r_s - 0.1250062499218698).abs() < 1e-12);
        // Saturated signal: a -> 1, p -> 3/4, r_s -> 2/9.
        let mu = 20.0 / eta_s;
        let p = click_probability(&params, eta_s, mu);
        let r_s = z_pair_ratio(&params, eta_s, mu, p).unwrap();
        assert!((r_s - 2.0 / 9.0).abs() < 1e-6);
    }

    #[test]
    fn z_qber_zero_without_dark_counts_and_matches_substituted_form() {
        let mut params = baseline();
        params.p_d = 0.0;
        let (eta_s, mu) = (0.02, 0.5);
        let p = click_probability(&params, eta_s, mu);
        let r_s = z_pair_ratio(&params, eta_s, mu, p).unwrap();
        assert_eq!(z_qber(&params, eta_s, mu, p, r_s).unwrap(), 0.0);

        // Algebraic-equivalence oracle: substituting r_s = a^2/(8p^2)
        // reduces the error rate to 2 p_d c / a^2. The click terms are
        // written through exp_m1 here too; the check targets the
        // cancellation of r_s and p, not the exponential itself.
        let params = baseline();
        let (eta_s, mu) = (3e-6, 0.5);
        let x = eta_s * mu;
        let p = click_probability(&params, eta_s, mu);
        let r_s = z_pair_ratio(&params, eta_s, mu, p).unwrap();
        let got = z_qber(&params, eta_s, mu, p, r_s).unwrap();
        let a = 2.0 * params.p_d + (1.0 - 2.0 * params.p_d) * -(-x).exp_m1();
        let c = 2.0 * params.p_d + (1.0 - 2.0 * params.p_d) * -(-2.0 * x).exp_m1();
        let oracle = 2.0 * params.p_d * c / (a * a);
        assert!((got - oracle).abs() / oracle < 1e-12);
        assert!((got - 0.031248062862273326).abs() < 1e-12);
    }

    #[test]
    fn z_qber_tends_to_one_in_vacuum_limit() {
        let params = baseline();
        let (eta_s, mu) = (1e-10, 0.01);
        let p = click_probability(&params, eta_s, mu);
        let r_s = z_pair_ratio(&params, eta_s, mu, p).unwrap();
        let e = z_qber(&params, eta_s, mu, p, r_s).unwrap();
        assert!(e > 0.99 && e <= 1.0 + 1e-9);
    }

    #[test]
    fn qber_complement_is_exact_partner() {
        let params = baseline();
        for l in [0.0, 100.0, 300.0, 500.0, 700.0] {
            for mu in [0.001, 0.05, 0.5, 1.0] {
                let ch = derive_channel(&params, l, mu).unwrap();
                assert!((ch.qber_z + ch.qber_z_complement - 1.0).abs() < 1e-9);
            }
        }
        // Deep vacuum regime: the complement must keep its tiny value even
        // though qber_z rounds to within an ulp of 1.
        let ch = derive_channel(&params, 900.0, 1e-4).unwrap();
        assert!(ch.qber_z_complement > 0.0);
        assert!(ch.qber_z_complement < 1e-3);
    }

    #[test]
    fn single_photon_pair_ratio_example_and_substituted_form() {
        let mut params = baseline();
        params.p_d = 0.0;
        let (eta_s, mu) = (0.02, 0.5);
        let p = click_probability(&params, eta_s, mu);
        let r_s = z_pair_ratio(&params, eta_s, mu, p).unwrap();
        let got = single_photon_pair_ratio(&params, eta_s, mu, p, r_s).unwrap();
        // Direct evaluation of (mu e^-mu eta_s)^2 / (1 - e^(-eta_s mu))^2.
        let oracle = (0.5 * (-0.5f64).exp() * 0.02).powi(2) / (-(-0.01f64).exp_m1()).powi(2);
        assert!((got - oracle).abs() / oracle < 1e-12);
        assert!((got - 0.37157359456510675).abs() < 1e-12);

        // Substituted form P1^2 g^2 / a^2 for nonzero dark counts.
        let params = baseline();
        let (eta_s, mu) = (0.002, 0.3);
        let p = click_probability(&params, eta_s, mu);
        let r_s = z_pair_ratio(&params, eta_s, mu, p).unwrap();
        let got = single_photon_pair_ratio(&params, eta_s, mu, p, r_s).unwrap();
        let p1 = mu * (-mu).exp();
        let g = 2.0 * params.p_d + (1.0 - 2.0 * params.p_d) * eta_s;
        let a = click_term(params.p_d, eta_s * mu);
        let oracle = p1 * p1 * g * g / (a * a);
        assert!((got - oracle).abs() / oracle < 1e-12);
    }

    #[test]
    fn x_stats_collapse_without_dark_counts() {
        let mut params = baseline();
        params.p_d = 0.0;
        let (y11, e_xx) = single_photon_x_stats(&params, 0.3, 0.07).unwrap();
        assert_eq!(y11, 0.3 * 0.07 / 2.0);
        assert_eq!(e_xx, params.e_d);
    }

    #[test]
    fn x_stats_dark_dominated_limit_and_reference_point() {
        let mut params = baseline();
        params.p_d = 0.01;
        let (_, e_xx) = single_photon_x_stats(&params, 1e-12, 1e-12).unwrap();
        assert!((e_xx - params.e_0).abs() < 1e-6);

        let params = baseline();
        let (y11, e_xx) = single_photon_x_stats(&params, 0.02, 0.02).unwrap();
        // Quoted-formula oracle.
        let pd = params.p_d;
        let y_oracle = (1.0 - pd).powi(2)
            * (0.02f64 * 0.02 / 2.0
                + (4.0 * 0.02 - 3.0 * 0.02 * 0.02) * pd
                + 4.0 * (1.0 - 0.02f64).powi(2) * pd * pd);
        let e_oracle =
            (0.5 * y_oracle - (0.5 - 0.04) * (1.0 - pd * pd) * 0.02 * 0.02 / 2.0) / y_oracle;
        assert!((y11 - y_oracle).abs() / y_oracle < 1e-12);
        assert!((e_xx - e_oracle).abs() < 1e-12);
        assert!((e_xx - 0.04000216383104161).abs() < 1e-12);
    }

    #[test]
    fn single_photon_z_error_models() {
        let mut params = baseline();
        params.p_d = 0.0;
        assert_eq!(single_photon_z_error(&params, 0.02, 0.3).unwrap(), 0.0);

        let mut params = baseline();
        params.e_zz_model = EzzModel::EqualObservedZ;
        assert_eq!(single_photon_z_error(&params, 0.02, 0.01).unwrap(), 0.01);
        params.e_zz_model = EzzModel::Fixed(0.007);
        assert_eq!(single_photon_z_error(&params, 0.02, 0.01).unwrap(), 0.007);

        // Configuration-enumeration oracle at a long-distance transmittance.
        let params = baseline();
        let eta_s = 3e-6;
        let pd = params.p_d;
        let correct = 2.0 * (2.0 * pd + (1.0 - 2.0 * pd) * eta_s).powi(2);
        let errors = 4.0 * pd * (2.0 * pd + (1.0 - 2.0 * pd) * (2.0 * eta_s - eta_s * eta_s));
        let oracle = errors / (correct + errors);
        let got = single_photon_z_error(&params, eta_s, 0.0).unwrap();
        assert!((got - oracle).abs() < 1e-15);
        assert!((got - 0.015563938531419783).abs() < 1e-15);
    }

    #[test]
    fn single_photon_z_error_stays_below_half() {
        let params = baseline();
        for eta_s in [1e-12, 1e-9, 1e-6, 1e-3, 0.2] {
            let e = single_photon_z_error(&params, eta_s, 0.0).unwrap();
            assert!((0.0..0.5).contains(&e));
        }
    }

    #[test]
    fn derive_channel_short_distance_reference() {
        let params = baseline();
        let ch = derive_channel(&params, 0.0, 0.5).unwrap();
        assert_eq!(ch.eta_s, 0.2);
        assert!(ch.qber_z < 1e-6);
        for v in [
            ch.p, ch.r_p, ch.r_s, ch.qber_z, ch.qbar11, ch.y11, ch.e_xx, ch.e_zz,
        ] {
            assert!(v.is_finite() && (0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn derive_channel_rejects_degenerate_inputs() {
        let params = baseline();
        assert!(derive_channel(&params, -1.0, 0.5).is_err());
        assert!(derive_channel(&params, 100.0, 0.0).is_err());
        assert!(derive_channel(&params, 100.0, -0.3).is_err());
    }

    #[test]
    fn derive_channel_error_carries_operating_point() {
        let params = baseline();
        let err = derive_channel(&params, 100.0, 0.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("L = 100"), "{msg}");
    }

    #[test]
    fn derived_statistics_stay_probabilities_across_sweep() {
        let params = baseline();
        for l in (0..=700).step_by(50) {
            for mu in [0.001, 0.01, 0.1, 0.5, 1.0] {
                let ch = derive_channel(&params, l as f64, mu).unwrap();
                for (name, v) in [
                    ("p", ch.p),
                    ("r_p", ch.r_p),
                    ("r_s", ch.r_s),
                    ("E_zz", ch.qber_z),
                    ("qbar11", ch.qbar11),
                    ("Y11", ch.y11),
                    ("e_xx", ch.e_xx),
                    ("e_zz", ch.e_zz),
                ] {
                    assert!(
                        (0.0..=1.0 + 1e-9).contains(&v),
                        "{name} = {v} at L={l} mu={mu}"
                    );
                }
                assert!(ch.r_p <= 0.5 * ch.p + 1e-9);
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn channel_fields_bounded(l in 0.0..700.0f64, mu in 1e-3..1.0f64) {
                let params = SystemParams::baseline(0.04).unwrap();
                let ch = derive_channel(&params, l, mu).unwrap();
                for v in [ch.p, ch.r_p, ch.r_s, ch.qber_z, ch.qbar11, ch.y11, ch.e_xx, ch.e_zz] {
                    prop_assert!((0.0..=1.0 + 1e-9).contains(&v));
                }
                prop_assert!(ch.r_p <= 0.5 * ch.p + 1e-9);
                prop_assert!((ch.qber_z + ch.qber_z_complement - 1.0).abs() < 1e-9);
            }

            #[test]
            fn pair_rate_bounded_by_half_p(p in 1e-6..1.0f64, delta in 1u64..1_000_000) {
                let r = pair_rate(p, delta);
                prop_assert!(r > 0.0);
                prop_assert!(r <= 0.5 * p + 1e-15);
            }
        }
    }
}
