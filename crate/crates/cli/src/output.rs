//! Stable textual encodings: scientific-notation cells, the scan CSV
//! layouts, and the JSON records printed by the point commands.

use std::io::Write;

use serde::Serialize;

use mpqkd::{ChannelDerived, QberTable, ScanTable};

/// Scientific notation with six digits after the point, the cell format
/// of every numeric CSV column except the distance. Negative zero is
/// normalized so a floored rate always prints as `0.000000e0`.
pub fn sci(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.6e}")
}

pub const SCAN_HEADER: [&str; 12] = [
    "L_km",
    "mu_opt",
    "b_opt",
    "rate_original",
    "rate_info",
    "rate_ad",
    "plob",
    "e_xx",
    "E_zz",
    "qbar11",
    "r_p",
    "r_s",
];

pub fn write_scan_csv<W: Write>(w: W, table: &ScanTable) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(SCAN_HEADER)?;
    for r in &table.rows {
        wtr.write_record([
            format!("{:.1}", r.l_km),
            sci(r.mu_opt),
            sci(r.b_opt as f64),
            sci(r.rate_original),
            sci(r.rate_info),
            sci(r.rate_ad),
            sci(r.plob),
            sci(r.e_xx),
            sci(r.qber_z),
            sci(r.qbar11),
            sci(r.r_p),
            sci(r.r_s),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub const QBER_HEADER: [&str; 4] = ["Q", "rate_info", "rate_ad", "b_opt"];

pub fn write_qber_csv<W: Write>(w: W, table: &QberTable) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(QBER_HEADER)?;
    for r in &table.rows {
        wtr.write_record([
            sci(r.q),
            sci(r.rate_info),
            sci(r.rate_ad),
            sci(r.b_opt as f64),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
pub struct ChannelRecord {
    pub eta_s: f64,
    pub mu: f64,
    pub p: f64,
    pub r_p: f64,
    pub r_s: f64,
    #[serde(rename = "E_zz")]
    pub qber_z: f64,
    pub qbar11: f64,
    #[serde(rename = "Y11")]
    pub y11: f64,
    pub e_xx: f64,
    pub e_zz: f64,
}

impl From<&ChannelDerived> for ChannelRecord {
    fn from(ch: &ChannelDerived) -> Self {
        ChannelRecord {
            eta_s: ch.eta_s,
            mu: ch.mu,
            p: ch.p,
            r_p: ch.r_p,
            r_s: ch.r_s,
            qber_z: ch.qber_z,
            qbar11: ch.qbar11,
            y11: ch.y11,
            e_xx: ch.e_xx,
            e_zz: ch.e_zz,
        }
    }
}

#[derive(Serialize)]
pub struct PointReport {
    #[serde(rename = "L_km")]
    pub l_km: f64,
    pub channel: ChannelRecord,
    pub rates: RatesRecord,
}

#[derive(Serialize)]
pub struct RatesRecord {
    pub original: OriginalRecord,
    pub info: InfoRecord,
    pub ad: AdRecord,
}

#[derive(Serialize)]
pub struct OriginalRecord {
    pub rate: f64,
    pub mu_opt: f64,
}

#[derive(Serialize)]
pub struct InfoRecord {
    pub rate: f64,
    pub mu_opt: f64,
    pub lambda3_opt: f64,
    pub bracket: f64,
}

#[derive(Serialize)]
pub struct AdRecord {
    pub rate: f64,
    pub mu_opt: f64,
    pub b_opt: u32,
    pub lambda3_opt: f64,
    pub q_s: f64,
    pub bracket: f64,
}

#[derive(Serialize)]
pub struct ThresholdsReport {
    pub l_max_km: EngineTriple,
    pub extension_km: f64,
    pub qber_threshold: QberThresholds,
    pub calibration: Calibration,
}

#[derive(Serialize)]
pub struct EngineTriple {
    pub original: f64,
    pub info: f64,
    pub ad: f64,
}

#[derive(Serialize)]
pub struct QberThresholds {
    pub original: f64,
    pub info: f64,
    pub ad: f64,
    pub ratio_ad_over_original: f64,
}

#[derive(Serialize)]
pub struct Calibration {
    pub qbar11_eff: f64,
    pub target_original_threshold: f64,
    pub error_correction_f: f64,
}
