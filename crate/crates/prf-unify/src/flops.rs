//! Per-output flop-count models.
//!
//! Closed-form cost models for the streaming polyphase scheme and the
//! best-linear-unbiased-interpolation (BLUI) alternative it replaces,
//! in both its arbitrary-variation and periodic-variation forms. All
//! counts are flops per output sample; the BLUI on-ground cost is the
//! matrix factorization work per distinct interpolation geometry.
//!
//! Everything here is plain integer/f64 arithmetic — the outputs are
//! flop counts, so nothing is generic over the scalar type.

use crate::error::{Error, Result};
use serde::Serialize;

/// Number of input samples inside the real-aperture interpolation
/// window: `Q = floor(2 L_RA / (PRI_in V_p))`.
pub fn blui_q(l_ra: f64, pri_in: f64, v_p: f64) -> Result<u64> {
    if !(l_ra > 0.0 && pri_in > 0.0 && v_p > 0.0) {
        return Err(Error::InvalidParameter("blui_q needs positive l_ra, pri_in, v_p".into()));
    }
    Ok((2.0 * l_ra / (pri_in * v_p)).floor() as u64)
}

/// New input samples per BLUI output in the periodic case:
/// `Psi = clamp(ceil(PRI_out / (L_BLUI mean[PRI_in])), 1, Q)`.
///
/// The ratio is frequently an exact integer that floating point
/// renders one ulp high (e.g. 1.11111 / (3 * 0.37037)), so the ceil is
/// taken with a small relative guard.
pub fn blui_psi(pri_out: f64, l_blui: u64, mean_pri_in: f64, q: u64) -> Result<u64> {
    if !(pri_out > 0.0 && mean_pri_in > 0.0) || l_blui == 0 || q == 0 {
        return Err(Error::InvalidParameter("blui_psi needs positive arguments".into()));
    }
    let ratio = pri_out / (l_blui as f64 * mean_pri_in);
    let psi = (ratio - 1e-9 * ratio.abs()).ceil() as u64;
    Ok(psi.clamp(1, q))
}

/// Period, in output samples, after which the periodic-BLUI geometry
/// repeats: `R = L_BLUI N_PRI mean[PRI_in] / PRI_out`.
pub fn blui_repeat(l_blui: u64, n_pri: u64, mean_pri_in: f64, pri_out: f64) -> Result<f64> {
    if !(pri_out > 0.0 && mean_pri_in > 0.0) || l_blui == 0 || n_pri == 0 {
        return Err(Error::InvalidParameter("blui_repeat needs positive arguments".into()));
    }
    Ok(l_blui as f64 * n_pri as f64 * mean_pri_in / pri_out)
}

/// On-board flops per output, arbitrary variation: `4 Q (N + 1) + 2 N`.
pub fn blui_onboard_arbitrary(q: u64, n_blui: u64) -> u64 {
    4 * q * (n_blui + 1) + 2 * n_blui
}

/// Uplinked floats per output, arbitrary variation: `2 Q`.
pub fn blui_uplink_arbitrary(q: u64) -> u64 {
    2 * q
}

/// On-ground flops per distinct geometry (Cholesky of the Gram matrix
/// plus the weight solve): `2 Q^3/3 + Q^2 (F_R + 3)/2 + Q (F_R - 7/3)/2 + F_R`.
pub fn blui_onground(q: u64, f_r: f64) -> u64 {
    let qf = q as f64;
    (2.0 * qf.powi(3) / 3.0 + qf * qf * (f_r + 3.0) / 2.0 + qf * (f_r - 7.0 / 3.0) / 2.0 + f_r).round() as u64
}

/// On-board flops per output, periodic variation: `4 (N Psi + Q) - 2`.
pub fn blui_onboard_periodic(q: u64, n_blui: u64, psi: u64) -> u64 {
    4 * (n_blui * psi + q) - 2
}

/// Uplinked floats per output, periodic variation: `N Psi + Q`.
pub fn blui_uplink_periodic(q: u64, n_blui: u64, psi: u64) -> u64 {
    n_blui * psi + q
}

/// On-board flops per output for the streaming polyphase scheme:
/// `round(4 N_pr PRI_out / mean[PRI_in])` (each incoming pulse touches
/// about `N_pr` outputs with one complex multiply-add each).
pub fn polyphase_onboard(npr: u64, pri_out: f64, mean_pri_in: f64) -> Result<u64> {
    if !(pri_out > 0.0 && mean_pri_in > 0.0) || npr == 0 {
        return Err(Error::InvalidParameter("polyphase_onboard needs positive arguments".into()));
    }
    Ok((4.0 * npr as f64 * pri_out / mean_pri_in).round() as u64)
}

/// An inclusive integer range (min over the PRI excursion, max).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FlopRange {
    pub min: u64,
    pub max: u64,
}

impl FlopRange {
    fn over_q(q_min: u64, q_max: u64, f: impl Fn(u64) -> u64) -> Self {
        FlopRange { min: f(q_min).min(f(q_max)), max: f(q_min).max(f(q_max)) }
    }
}

/// Cost comparison for one PRI variation.
#[derive(Debug, Clone, Serialize)]
pub struct FlopReport {
    pub label: String,
    pub pri_min: f64,
    pub pri_max: f64,
    pub mean_pri_in: f64,
    pub pri_out_arbitrary: f64,
    pub pri_out_periodic: f64,
    pub q: FlopRange,
    pub psi: u64,
    pub blui_uplink_arbitrary: FlopRange,
    pub blui_onboard_arbitrary: FlopRange,
    pub blui_onground: FlopRange,
    pub blui_uplink_periodic: FlopRange,
    pub blui_onboard_periodic: FlopRange,
    pub polyphase_onboard_arbitrary: u64,
    pub polyphase_onboard_periodic: u64,
}

/// Fixed comparison parameters.
#[derive(Debug, Clone, Copy)]
pub struct FlopParams {
    pub l_ra: f64,
    pub l_blui: u64,
    pub n_blui: u64,
    pub v_p: f64,
    pub f_r: f64,
    pub npr: u64,
}

impl Default for FlopParams {
    /// The comparison configuration used throughout: 10 m real
    /// aperture, 3x BLUI decimation, 9-tap Doppler filter, 7473 m/s
    /// platform, ~24 flops per rotation in the factorization, order-5
    /// polyphase prototype.
    fn default() -> Self {
        FlopParams { l_ra: 10.0, l_blui: 3, n_blui: 9, v_p: 7473.0, f_r: 24.0, npr: 5 }
    }
}

/// Evaluate the full comparison for one PRI excursion.
pub fn flop_report(
    label: &str,
    params: &FlopParams,
    pri_min: f64,
    pri_max: f64,
    mean_pri_in: f64,
    pri_out_arbitrary: f64,
    pri_out_periodic: f64,
) -> Result<FlopReport> {
    if !(pri_max >= pri_min && pri_min > 0.0) {
        return Err(Error::InvalidParameter("need 0 < pri_min <= pri_max".into()));
    }
    // Q shrinks as PRI grows: extremes of the excursion bound it.
    let q_hi = blui_q(params.l_ra, pri_min, params.v_p)?;
    let q_lo = blui_q(params.l_ra, pri_max, params.v_p)?;
    let psi = blui_psi(pri_out_periodic, params.l_blui, mean_pri_in, q_lo.max(1))?;
    Ok(FlopReport {
        label: label.to_string(),
        pri_min,
        pri_max,
        mean_pri_in,
        pri_out_arbitrary,
        pri_out_periodic,
        q: FlopRange { min: q_lo, max: q_hi },
        psi,
        blui_uplink_arbitrary: FlopRange::over_q(q_lo, q_hi, blui_uplink_arbitrary),
        blui_onboard_arbitrary: FlopRange::over_q(q_lo, q_hi, |q| blui_onboard_arbitrary(q, params.n_blui)),
        blui_onground: FlopRange::over_q(q_lo, q_hi, |q| blui_onground(q, params.f_r)),
        blui_uplink_periodic: FlopRange::over_q(q_lo, q_hi, |q| blui_uplink_periodic(q, params.n_blui, psi)),
        blui_onboard_periodic: FlopRange::over_q(q_lo, q_hi, |q| blui_onboard_periodic(q, params.n_blui, psi)),
        polyphase_onboard_arbitrary: polyphase_onboard(params.npr, pri_out_arbitrary, mean_pri_in)?,
        polyphase_onboard_periodic: polyphase_onboard(params.npr, pri_out_periodic, mean_pri_in)?,
    })
}

/// The three stock comparison columns: fast PRI excursion, elaborate
/// PRI excursion, and the spaceborne staggered system (where only the
/// mean PRI and output interval differ and the Q excursion matches the
/// elaborate case).
pub fn standard_reports() -> Result<Vec<FlopReport>> {
    let p = FlopParams::default();
    Ok(vec![
        flop_report("fast", &p, 0.349e-3, 0.421e-3, 0.385e-3, 0.417e-3, 0.770e-3)?,
        flop_report("elaborate", &p, 0.309e-3, 0.461e-3, 0.385e-3, 0.417e-3, 0.770e-3)?,
        flop_report("staggered", &p, 0.309e-3, 0.461e-3, 0.37037e-3, 1.11111e-3, 1.11111e-3)?,
    ])
}
