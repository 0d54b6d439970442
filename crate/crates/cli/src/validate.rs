//! The deterministic oracle suite behind the `validate` command.
//!
//! Each check pits an implementation path against an independent
//! prediction: pairing simulation against the closed-form pair rate,
//! block simulation against exhaustive pattern enumeration, enumeration
//! against the closed-form block statistics, and the numeric
//! decomposition minimizer against its closed-form optimum. Seeds are
//! derived per check, so a report is byte-identical for a given
//! `(seed, samples)` pair no matter how many threads run the simulations.

use serde::Serialize;

use mpqkd::mc::{enumerate_ad_block, mc_ad_block, mc_pair_rate};
use mpqkd::model::{binary_entropy, pair_rate};
use mpqkd::rates::rate_info;
use mpqkd::ChannelDerived;

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn within(name: String, observed: f64, expected: f64, tolerance: f64) -> Check {
        let pass = (observed - expected).abs() <= tolerance;
        Check {
            name,
            observed,
            expected,
            tolerance,
            pass,
        }
    }
}

#[derive(Serialize)]
pub struct Report {
    pub seed: u64,
    pub samples: u64,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

const PAIR_POINTS: [(f64, u64); 3] = [(0.1, 5), (0.01, 100), (0.5, 2)];
const BLOCK_POINTS: [(f64, u32); 2] = [(0.25, 2), (0.046, 3)];

pub fn run(seed: u64, samples: u64) -> Report {
    let mut checks = Vec::new();

    for (k, (p, delta)) in PAIR_POINTS.into_iter().enumerate() {
        let est = mc_pair_rate(p, delta, samples, seed.wrapping_add(k as u64));
        let expected = pair_rate(p, delta);
        checks.push(Check::within(
            format!("pair rate, p={p} delta={delta}"),
            est.mean,
            expected,
            3.0 * est.stderr,
        ));
    }

    for (k, (e, b)) in BLOCK_POINTS.into_iter().enumerate() {
        let (survival, error) = mc_ad_block(e, b, samples, seed.wrapping_add(3 + k as u64));
        let (q_s, e_tilde) = enumerate_ad_block(e, b).expect("block size within enumeration range");
        checks.push(Check::within(
            format!("block survival, E={e} b={b}"),
            survival.mean,
            q_s,
            3.0 * survival.stderr,
        ));
        checks.push(Check::within(
            format!("block error, E={e} b={b}"),
            error.mean,
            e_tilde,
            3.0 * error.stderr,
        ));
    }

    let (mut worst_q, mut worst_e) = (0.0f64, 0.0f64);
    for i in 0..=5 {
        let e = f64::from(i) * 0.1;
        for b in 1..=10 {
            let (q_s, e_tilde) = enumerate_ad_block(e, b).expect("small block");
            let eb = e.powi(b as i32);
            let cb = (1.0 - e).powi(b as i32);
            worst_q = worst_q.max((q_s - (eb + cb)).abs());
            let closed = if eb + cb > 0.0 { eb / (eb + cb) } else { 0.0 };
            worst_e = worst_e.max((e_tilde - closed).abs());
        }
    }
    checks.push(Check::within(
        "enumerated survival vs closed form, worst case".to_owned(),
        worst_q,
        0.0,
        1e-14,
    ));
    checks.push(Check::within(
        "enumerated block error vs closed form, worst case".to_owned(),
        worst_e,
        0.0,
        1e-14,
    ));

    let (mut worst_l3, mut worst_bracket) = (0.0f64, 0.0f64);
    for q in [0.02, 0.05, 0.1, 0.2, 0.3] {
        let res = rate_info(&symmetric_channel(q), 1.15);
        worst_l3 = worst_l3.max((res.lambda3_opt - q * q).abs());
        let closed = 1.0 - binary_entropy(q).expect("q in (0, 1)");
        worst_bracket = worst_bracket.max((res.components.bracket - closed).abs());
    }
    checks.push(Check::within(
        "decomposition minimizer vs closed-form optimum, worst case".to_owned(),
        worst_l3,
        0.0,
        1e-6,
    ));
    checks.push(Check::within(
        "key fraction at the optimum vs closed form, worst case".to_owned(),
        worst_bracket,
        0.0,
        1e-9,
    ));

    let all_pass = checks.iter().all(|c| c.pass);
    Report {
        seed,
        samples,
        checks,
        all_pass,
    }
}

/// A channel with unit prefactors whose X and Z error rates are both `q`,
/// so the decomposition optimum has its closed form.
fn symmetric_channel(q: f64) -> ChannelDerived {
    ChannelDerived {
        eta_s: 1.0,
        mu: 1.0,
        p: 1.0,
        r_p: 1.0,
        r_s: 1.0,
        qber_z: q,
        qber_z_complement: 1.0 - q,
        qbar11: 0.5,
        y11: 1.0,
        e_xx: q,
        e_zz: q,
    }
}
