//! Key-rate engines layered on the derived channel statistics.
//!
//! Three estimates of the asymptotic secret-key rate share the same
//! inputs. The device-level formula charges the observed error rates
//! directly. The information-theoretic bound additionally minimizes over
//! the unobserved decomposition of the single-photon channel, constrained
//! by the two measured error rates. The distillation variant folds that
//! decomposition through majority-style post-processing on blocks of `b`
//! key bits, trading throughput (a factor q_s / b) for error suppression,
//! and maximizes over the block size.

use crate::error::Error;
use crate::model::ChannelDerived;
use crate::numeric::{self, entropy_bits, entropy_from_parts};

/// Grid density for the one-dimensional decomposition search.
const LAMBDA_GRID: usize = 200;
/// Interval width at which golden-section refinement of lambda3 stops.
const LAMBDA_TOL: f64 = 1e-10;

/// Weights of the four-component decomposition of the single-photon pair
/// channel. The observable constraints are l1 + l3 = e_xx and
/// l2 + l3 = e_zz, with the weights summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaVector {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

/// Result of folding a weight vector through advantage distillation on a
/// block of `b` key bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdOutcome {
    /// Transformed weights, normalized to sum to one.
    pub lt0: f64,
    pub lt1: f64,
    pub lt2: f64,
    pub lt3: f64,
    /// Probability that a block survives distillation.
    pub q_s: f64,
    /// Error rate among surviving blocks.
    pub e_tilde: f64,
    /// Block size the transform was evaluated at.
    pub b: u32,
}

/// Term-level breakdown of one rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateComponents {
    /// Signed rate before flooring. Threshold searches bisect on this.
    pub raw: f64,
    /// Minimized entropy bracket that multiplies the single-photon term.
    pub bracket: f64,
    /// Error-correction leakage f * H(E).
    pub leak: f64,
    /// Block survival probability, 1 when no distillation runs.
    pub q_s: f64,
}

/// A rate value together with the witnesses needed to reproduce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// Secret bits per round, floored at 0.
    pub rate: f64,
    /// Block size that achieved the rate (1 when distillation is off).
    pub b_opt: u32,
    /// Intensity the channel was derived at.
    pub mu_opt: f64,
    /// Minimizing decomposition parameter.
    pub lambda3_opt: f64,
    pub components: RateComponents,
}

/// Builds the weight vector from the two error-rate constraints and the
/// free parameter lambda3.
///
/// Feasibility requires lambda3 in [max(0, e_xx + e_zz - 1),
/// min(e_xx, e_zz)]; a 1e-15 slack absorbs rounding at the endpoints and
/// components are snapped to 0 from below.
pub fn lambda_from_lambda3(e_xx: f64, e_zz: f64, lambda3: f64) -> Result<LambdaVector, Error> {
    let lo = (e_xx + e_zz - 1.0).max(0.0);
    let hi = e_xx.min(e_zz);
    if !(lambda3 >= lo - 1e-15 && lambda3 <= hi + 1e-15) {
        return Err(Error::InfeasibleLambda3 { lambda3, lo, hi });
    }
    let snap = |v: f64| if v < 0.0 { 0.0 } else { v };
    Ok(LambdaVector {
        l0: snap(1.0 - e_xx - e_zz + lambda3),
        l1: snap(e_xx - lambda3),
        l2: snap(e_zz - lambda3),
        l3: snap(lambda3),
    })
}

/// Entropy bracket of the information-theoretic rate:
/// 1 - (l0+l1) h(l1/(l0+l1)) - (l2+l3) h(l3/(l2+l3)), where a zero-mass
/// group contributes zero.
///
/// The result is clamped at 0. Mathematically it cannot go below: each
/// term is at most its group mass, and the masses sum to one.
pub fn info_key_fraction(lv: LambdaVector) -> f64 {
    let term01 = (lv.l0 + lv.l1) * entropy_from_parts(lv.l0, lv.l1);
    let term23 = (lv.l2 + lv.l3) * entropy_from_parts(lv.l2, lv.l3);
    (1.0 - term01 - term23).max(0.0)
}

/// Stationary point of the decomposition when both error rates equal Q:
/// the weights factor as ((1-Q)^2, Q(1-Q), Q(1-Q), Q^2) and the bracket
/// collapses to 1 - H(Q). Expects Q in [0, 0.5].
pub fn closed_form_lambda(q: f64) -> LambdaVector {
    let qc = 1.0 - q;
    LambdaVector {
        l0: qc * qc,
        l1: q * qc,
        l2: q * qc,
        l3: q * q,
    }
}

/// Folds the weights and the observed Z error rate through advantage
/// distillation on blocks of `b` bits.
///
/// Expects `e_zz` in [0, 0.5], where forming the complement by
/// subtraction is accurate. `b = 1` returns the inputs unchanged.
pub fn ad_transform(lv: LambdaVector, e_zz: f64, b: u32) -> AdOutcome {
    debug_assert!((0.0..=0.5).contains(&e_zz));
    if b <= 1 {
        return AdOutcome {
            lt0: lv.l0,
            lt1: lv.l1,
            lt2: lv.l2,
            lt3: lv.l3,
            q_s: 1.0,
            e_tilde: e_zz,
            b: 1,
        };
    }
    let tl = transform_lambda(lv, b);
    let eb = e_zz.powi(b as i32);
    let ecb = (1.0 - e_zz).powi(b as i32);
    let q_s = eb + ecb;
    AdOutcome {
        lt0: tl.l0,
        lt1: tl.l1,
        lt2: tl.l2,
        lt3: tl.l3,
        q_s,
        e_tilde: eb / q_s,
        b,
    }
}

/// Weight half of the distillation transform: each group (even, odd) maps
/// to ((u^b + d^b) / D, (u^b - d^b) / D) with u = even + odd,
/// d = even - odd, and D = 2 [(l0+l1)^b + (l2+l3)^b].
///
/// The denominator cannot vanish: l0 + l1 = 1 - e_zz >= 1/2 for any
/// vector built from the constraints, and the caller never feeds an
/// all-zero vector otherwise.
fn transform_lambda(lv: LambdaVector, b: u32) -> LambdaVector {
    let (u01, plus01, minus01) = numeric::pow_pair(lv.l0, lv.l1, b);
    let (u23, plus23, minus23) = numeric::pow_pair(lv.l2, lv.l3, b);
    let d = 2.0 * (u01 + u23);
    LambdaVector {
        l0: plus01 / d,
        l1: minus01 / d,
        l2: plus23 / d,
        l3: minus23 / d,
    }
}

/// Device-level rate r_p r_s (qbar11 (1 - H(e_xx)) - f H(E_zz)), floored
/// at 0.
pub fn rate_devicelevel(ch: &ChannelDerived, f: f64) -> f64 {
    rate_devicelevel_raw(ch, f).max(0.0)
}

/// Signed version of [`rate_devicelevel`], used by threshold searches.
pub(crate) fn rate_devicelevel_raw(ch: &ChannelDerived, f: f64) -> f64 {
    let bracket = 1.0 - entropy_bits(ch.e_xx);
    let leak = f * entropy_from_parts(ch.qber_z, ch.qber_z_complement);
    ch.r_p * ch.r_s * (ch.qbar11 * bracket - leak)
}

/// Information-theoretic rate with the decomposition minimized over
/// lambda3. The floored value is in `rate`; the signed one stays in
/// `components.raw`.
pub fn rate_info(ch: &ChannelDerived, f: f64) -> RateResult {
    result_from(rate_block(ch, f, 1), 1, ch.mu)
}

/// Distillation rate maximized over block sizes in [b_min, b_max]; ties
/// keep the smallest block. `b_min = b_max = 1` reproduces [`rate_info`]
/// exactly, including its floating-point evaluation order.
pub fn rate_ad(
    ch: &ChannelDerived,
    f: f64,
    b_min: u32,
    b_max: u32,
) -> Result<RateResult, Error> {
    if b_min < 1 || b_min > b_max {
        return Err(Error::InvalidRange {
            what: "block sizes must satisfy 1 <= b_min <= b_max",
        });
    }
    let mut best = rate_block(ch, f, b_min);
    let mut b_best = b_min;
    for b in b_min + 1..=b_max {
        let eval = rate_block(ch, f, b);
        if eval.raw > best.raw {
            best = eval;
            b_best = b;
        }
    }
    Ok(result_from(best, b_best, ch.mu))
}

struct BlockEval {
    raw: f64,
    bracket: f64,
    leak: f64,
    q_s: f64,
    lambda3: f64,
}

/// Evaluates the distillation rate expression at one block size,
/// minimizing the bracket over the decomposition. `b = 1` is the plain
/// information-theoretic rate.
fn rate_block(ch: &ChannelDerived, f: f64, b: u32) -> BlockEval {
    // The error-rate complement is carried exactly from the channel
    // derivation. Near maximal error rate (vacuum-dominated operating
    // points) e^b and (1-e)^b are within an ulp of each other in the
    // naive 1-e form, and the leakage entropy would collapse to 0,
    // turning hopeless operating points into phantom positive rates.
    let (eb, ecb) = if b == 1 {
        (ch.qber_z, ch.qber_z_complement)
    } else {
        (
            ch.qber_z.powi(b as i32),
            ch.qber_z_complement.powi(b as i32),
        )
    };
    let q_s = if b == 1 { 1.0 } else { eb + ecb };
    let q_pow = if b == 1 {
        ch.qbar11
    } else {
        ch.qbar11.powi(b as i32)
    };
    let leak = f * entropy_from_parts(eb, ecb);
    let (lambda3, bracket) = minimize_lambda3(ch.e_xx, ch.e_zz, |lv| {
        if b == 1 {
            info_key_fraction(lv)
        } else {
            info_key_fraction(transform_lambda(lv, b))
        }
    });
    let raw = (q_s / b as f64) * (ch.r_p * ch.r_s * (q_pow * bracket - leak));
    BlockEval {
        raw,
        bracket,
        leak,
        q_s,
        lambda3,
    }
}

/// Minimizes `objective` over the feasible lambda3 interval by dense grid
/// plus golden-section refinement; returns (lambda3, minimum).
fn minimize_lambda3(
    e_xx: f64,
    e_zz: f64,
    mut objective: impl FnMut(LambdaVector) -> f64,
) -> (f64, f64) {
    let lo = (e_xx + e_zz - 1.0).max(0.0);
    let hi = e_xx.min(e_zz);
    numeric::grid_golden_min(
        |l3| {
            let lv = lambda_from_lambda3(e_xx, e_zz, l3)
                .expect("probes stay inside the feasible interval");
            objective(lv)
        },
        lo,
        hi,
        LAMBDA_GRID,
        LAMBDA_TOL,
    )
}

fn result_from(eval: BlockEval, b: u32, mu: f64) -> RateResult {
    RateResult {
        rate: eval.raw.max(0.0),
        b_opt: b,
        mu_opt: mu,
        lambda3_opt: eval.lambda3,
        components: RateComponents {
            raw: eval.raw,
            bracket: eval.bracket,
            leak: eval.leak,
            q_s: eval.q_s,
        },
    }
}
