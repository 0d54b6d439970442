//! Intensity optimization, distance and QBER sweeps, zero-rate
//! thresholds, and the repeaterless benchmark curve.

use rayon::prelude::*;

use crate::error::Error;
use crate::model::{derive_channel, ChannelDerived, SystemParams};
use crate::numeric;
use crate::rates;

/// Intensity search domain. Mean photon numbers above 1 are never optimal
/// here: multi-photon emissions dilute the single-photon fraction faster
/// than they add clicks.
const MU_MIN: f64 = 1e-4;
const MU_MAX: f64 = 1.0;
/// Points of the log-spaced intensity grid searched before refinement.
const MU_GRID: usize = 60;
/// Relative intensity tolerance of the golden-section refinement.
const MU_TOL: f64 = 1e-4;
/// Distance at which bracket growth for the zero-rate search gives up.
const MAX_BRACKET_KM: f64 = 1e4;
/// Reported in place of the diverging repeaterless bound at zero distance.
const PLOB_CAP_DEFAULT: f64 = 10.0;

/// Which key-rate engine a search or witness column refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Device-level rate charging observed error rates directly.
    Original,
    /// Information-theoretic rate with the decomposition minimized.
    Info,
    /// Advantage distillation, maximized over block sizes.
    Ad,
}

/// Whether the intensity is optimized per operating point or pinned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuPolicy {
    Optimize,
    Fixed(f64),
}

/// Inputs of a distance sweep.
///
/// Every row evaluates all three engines, each at its own optimal
/// intensity (unless pinned); `engine` only selects which engine's
/// intensity and channel statistics fill the witness columns of the row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub params: SystemParams,
    pub engine: Engine,
    pub l_from: f64,
    pub l_to: f64,
    pub l_step: f64,
    pub mu_policy: MuPolicy,
    /// Block-size search range for the distillation engine.
    pub b_range: (u32, u32),
}

/// One distance-sweep row. Rates are floored at 0; channel statistics are
/// taken at the witness engine's intensity, while `b_opt` always comes
/// from the distillation engine at its own optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub l_km: f64,
    pub mu_opt: f64,
    pub b_opt: u32,
    pub rate_original: f64,
    pub rate_info: f64,
    pub rate_ad: f64,
    pub plob: f64,
    pub e_xx: f64,
    pub qber_z: f64,
    pub qbar11: f64,
    pub r_p: f64,
    pub r_s: f64,
}

/// Distance sweep output, sorted by distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    /// First distance where the distillation rate exceeds the device-level
    /// rate by more than 1e-6 relative, with both positive.
    pub fn crossover_distance(&self) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.rate_original > 0.0 && r.rate_ad > r.rate_original * (1.0 + 1e-6))
            .map(|r| r.l_km)
    }

    /// First distance where the optimal block size leaves 1 while the
    /// distillation rate is still positive.
    pub fn b_switch_distance(&self) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.b_opt > 1 && r.rate_ad > 0.0)
            .map(|r| r.l_km)
    }
}

/// One row of the synthetic QBER sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QberRow {
    pub q: f64,
    pub rate_info: f64,
    pub rate_ad: f64,
    pub b_opt: u32,
}

/// QBER sweep output, with the effective single-photon fraction it was
/// evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct QberTable {
    pub qbar11_eff: f64,
    pub rows: Vec<QberRow>,
}

/// Signed rate of one engine at a fixed operating point, plus the block
/// size that achieved it.
fn eval_engine(
    params: &SystemParams,
    l_km: f64,
    mu: f64,
    engine: Engine,
    b_range: (u32, u32),
) -> Result<(f64, u32), Error> {
    let ch = derive_channel(params, l_km, mu)?;
    Ok(match engine {
        Engine::Original => (rates::rate_devicelevel_raw(&ch, params.f), 1),
        Engine::Info => (rates::rate_info(&ch, params.f).components.raw, 1),
        Engine::Ad => {
            let res = rates::rate_ad(&ch, params.f, b_range.0, b_range.1)?;
            (res.components.raw, res.b_opt)
        }
    })
}

/// Maximizes the engine's rate over the intensity and returns
/// (mu_opt, rate) with the rate floored at 0. When no intensity yields a
/// positive rate, mu_opt is still the argmax of the signed rate.
pub fn optimize_mu(
    params: &SystemParams,
    l_km: f64,
    engine: Engine,
    b_range: (u32, u32),
) -> (f64, f64) {
    let (mu, raw) = optimize_mu_raw(params, l_km, engine, b_range);
    (mu, raw.max(0.0))
}

/// Signed-rate version of [`optimize_mu`]; threshold bisections need the
/// sign. The search runs on ln(mu), so the grid is log-spaced and the
/// golden-section tolerance is relative. Intensities where the model
/// leaves its validity domain are treated as rate minus infinity and never
/// win the argmax.
pub(crate) fn optimize_mu_raw(
    params: &SystemParams,
    l_km: f64,
    engine: Engine,
    b_range: (u32, u32),
) -> (f64, f64) {
    let (t_opt, neg_rate) = numeric::grid_golden_min(
        |t| match eval_engine(params, l_km, t.exp(), engine, b_range) {
            Ok((raw, _)) => -raw,
            Err(_) => f64::INFINITY,
        },
        MU_MIN.ln(),
        MU_MAX.ln(),
        MU_GRID,
        MU_TOL,
    );
    (t_opt.exp(), -neg_rate)
}

/// Sweeps the distance range of `spec`, one row per grid point. Rows are
/// computed in parallel but assembled in distance order, so the output is
/// deterministic.
pub fn scan_distance(spec: &ScanSpec) -> Result<ScanTable, Error> {
    if !(spec.l_from >= 0.0 && spec.l_from <= spec.l_to) {
        return Err(Error::InvalidRange {
            what: "distance range must satisfy 0 <= L_from <= L_to",
        });
    }
    if !(spec.l_step > 0.0) {
        return Err(Error::InvalidRange {
            what: "distance step must be positive",
        });
    }
    let n = ((spec.l_to - spec.l_from) / spec.l_step + 1e-9).floor() as usize + 1;
    let rows: Vec<Result<ScanRow, Error>> = (0..n)
        .into_par_iter()
        .map(|i| scan_row(spec, spec.l_from + i as f64 * spec.l_step))
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(ScanTable { rows })
}

fn scan_row(spec: &ScanSpec, l_km: f64) -> Result<ScanRow, Error> {
    let p = &spec.params;
    let at = |engine: Engine| -> Result<(f64, f64, u32), Error> {
        let mu = match spec.mu_policy {
            MuPolicy::Fixed(mu) => mu,
            MuPolicy::Optimize => optimize_mu(p, l_km, engine, spec.b_range).0,
        };
        let (raw, b) = eval_engine(p, l_km, mu, engine, spec.b_range)?;
        Ok((mu, raw.max(0.0), b))
    };
    let (mu_orig, rate_original, _) = at(Engine::Original)?;
    let (mu_info, rate_info, _) = at(Engine::Info)?;
    let (mu_ad, rate_ad, b_opt) = at(Engine::Ad)?;
    let mu_opt = match spec.engine {
        Engine::Original => mu_orig,
        Engine::Info => mu_info,
        Engine::Ad => mu_ad,
    };
    let ch = derive_channel(p, l_km, mu_opt)?;
    Ok(ScanRow {
        l_km,
        mu_opt,
        b_opt,
        rate_original,
        rate_info,
        rate_ad,
        plob: plob_bound(l_km, p.alpha),
        e_xx: ch.e_xx,
        qber_z: ch.qber_z,
        qbar11: ch.qbar11,
        r_p: ch.r_p,
        r_s: ch.r_s,
    })
}

/// Largest distance with positive optimal rate, found by growing a
/// bracket geometrically from [0, 100] km and bisecting the signed rate
/// to `tol_km` (0.5 km is the conventional choice).
///
/// Errors if the rate is non-positive already at zero distance, or if no
/// sign change appears below 10^4 km (a loss-free parameter set).
pub fn max_distance(
    params: &SystemParams,
    engine: Engine,
    b_range: (u32, u32),
    tol_km: f64,
) -> Result<f64, Error> {
    if !(tol_km > 0.0) {
        return Err(Error::InvalidRange {
            what: "distance tolerance must be positive",
        });
    }
    let raw_at = |l: f64| optimize_mu_raw(params, l, engine, b_range).1;
    if raw_at(0.0) <= 0.0 {
        return Err(Error::NoPositiveRate { at: "L = 0" });
    }
    let mut lo = 0.0;
    let mut hi = 100.0;
    while raw_at(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_BRACKET_KM {
            return Err(Error::NoSignChange {
                limit: MAX_BRACKET_KM,
            });
        }
    }
    Ok(numeric::bisect_positive_to_zero(raw_at, lo, hi, tol_km))
}

/// Channel with unit pairing prefactors and every error rate pinned to Q,
/// the abstraction level of the QBER sweep.
fn synthetic_channel(q: f64, qbar11_eff: f64) -> ChannelDerived {
    ChannelDerived {
        eta_s: 1.0,
        mu: 1.0,
        p: 1.0,
        r_p: 1.0,
        r_s: 1.0,
        qber_z: q,
        qber_z_complement: 1.0 - q,
        qbar11: qbar11_eff,
        y11: 1.0,
        e_xx: q,
        e_zz: q,
    }
}

/// Sweeps a common error rate Q applied to every error channel at once,
/// with unit pairing prefactors and a fixed effective single-photon
/// fraction. This isolates how the two bound engines degrade with noise,
/// independent of the optics.
pub fn scan_common_qber(
    params: &SystemParams,
    qbar11_eff: f64,
    q_from: f64,
    q_to: f64,
    q_step: f64,
    b_range: (u32, u32),
) -> Result<QberTable, Error> {
    if !(q_from >= 0.0 && q_from <= q_to && q_to <= 0.5) {
        return Err(Error::InvalidRange {
            what: "QBER range must satisfy 0 <= Q_from <= Q_to <= 0.5",
        });
    }
    if !(q_step > 0.0) {
        return Err(Error::InvalidRange {
            what: "QBER step must be positive",
        });
    }
    if !(qbar11_eff > 0.0 && qbar11_eff <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "qbar11_eff",
            value: qbar11_eff,
            range: "(0, 1]",
        });
    }
    let n = ((q_to - q_from) / q_step + 1e-9).floor() as usize + 1;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let q = q_from + i as f64 * q_step;
        let ch = synthetic_channel(q, qbar11_eff);
        let info = rates::rate_info(&ch, params.f);
        let ad = rates::rate_ad(&ch, params.f, b_range.0, b_range.1)?;
        rows.push(QberRow {
            q,
            rate_info: info.rate,
            rate_ad: ad.rate,
            b_opt: ad.b_opt,
        });
    }
    Ok(QberTable { qbar11_eff, rows })
}

/// Largest common error rate with positive rate on the synthetic channel,
/// bisected to `tol` in Q.
pub fn qber_threshold(
    params: &SystemParams,
    qbar11_eff: f64,
    engine: Engine,
    b_range: (u32, u32),
    tol: f64,
) -> Result<f64, Error> {
    if !(tol > 0.0) {
        return Err(Error::InvalidRange {
            what: "QBER tolerance must be positive",
        });
    }
    let raw_at = |q: f64| -> Result<f64, Error> {
        let ch = synthetic_channel(q, qbar11_eff);
        Ok(match engine {
            Engine::Original => rates::rate_devicelevel_raw(&ch, params.f),
            Engine::Info => rates::rate_info(&ch, params.f).components.raw,
            Engine::Ad => {
                rates::rate_ad(&ch, params.f, b_range.0, b_range.1)?
                    .components
                    .raw
            }
        })
    };
    if raw_at(0.0)? <= 0.0 {
        return Err(Error::NoPositiveRate { at: "Q = 0" });
    }
    if raw_at(0.5)? > 0.0 {
        return Err(Error::NoSignChange { limit: 0.5 });
    }
    let mut err = None;
    let root = numeric::bisect_positive_to_zero(
        |q| match raw_at(q) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                -1.0
            }
        },
        0.0,
        0.5,
        tol,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(root),
    }
}

/// Effective single-photon fraction that puts the zero crossing of the
/// plain bound engine exactly at `q_star`: f H(Q*) / (1 - H(Q*)).
pub fn calibrated_qbar11(f: f64, q_star: f64) -> Result<f64, Error> {
    if !(q_star > 0.0 && q_star < 0.5) {
        return Err(Error::InvalidParameter {
            name: "q_star",
            value: q_star,
            range: "(0, 0.5)",
        });
    }
    let h = crate::model::binary_entropy(q_star)?;
    Ok(f * h / (1.0 - h))
}

/// Repeaterless rate bound -log2(1 - eta) at end-to-end transmittance
/// eta = 10^(-alpha L / 10), detector efficiency excluded. Diverges at
/// zero distance; this form reports the capped value.
pub fn plob_bound(l_km: f64, alpha: f64) -> f64 {
    plob_bound_capped(l_km, alpha, PLOB_CAP_DEFAULT).0
}

/// [`plob_bound`] with an explicit cap; the flag reports whether the cap
/// replaced a larger or infinite value.
pub fn plob_bound_capped(l_km: f64, alpha: f64, cap: f64) -> (f64, bool) {
    let eta = 10f64.powf(-alpha * l_km / 10.0);
    let bound = -(-eta).ln_1p() / std::f64::consts::LN_2;
    if bound.is_finite() && bound <= cap {
        (bound, false)
    } else {
        (cap, true)
    }
}
