//! Output grid geometry.
//!
//! The resampler writes onto a uniform azimuth grid whose spacing is
//! tied to the processed Doppler bandwidth and the image FFT length.
//! This module derives every grid quantity from the radar geometry
//! (or accepts a directly measured scene extent), and provides the
//! affine map from along-track position to fractional output index
//! plus its quantization onto the dense (rate `L * PRF_out`) grid.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Inputs to [`design_output_grid`]. `aperture` short-circuits the
/// chirp-geometry derivation of the scene extent when the extent has
/// been measured directly.
#[derive(Debug, Clone)]
pub struct GridParams<T: Real> {
    pub n_fft: usize,
    pub k_cr: T,
    pub p_d: T,
    pub k_r: T,
    pub npr: usize,
    pub l: usize,
    pub gamma: T,
    pub lambda_c: T,
    pub b_chirp: T,
    pub r: T,
    pub v_p: T,
    pub u_min: T,
    pub u_max: T,
    /// Scene azimuth extent D in meters, overriding the chirp-derived value.
    pub aperture: Option<T>,
}

/// The fully derived grid. All lengths are meters, rates in Hz (the
/// spatial rate is cycles per meter).
#[derive(Debug, Clone, PartialEq)]
pub struct GridDesign<T: Real> {
    pub n_fft: usize,
    pub n_d: usize,
    pub n_xac: usize,
    pub npr: usize,
    pub l: usize,
    pub gamma: T,
    pub d: T,
    pub du_out: T,
    pub prf_out_spatial: T,
    pub prf_out_temporal: T,
    pub pbw: T,
    pub x_out: T,
    pub u_min: T,
    pub u_max: T,
    pub u_mid: T,
    pub v_p: T,
    pub lambda_c: T,
    pub r: T,
}

pub fn design_output_grid<T: Real>(p: &GridParams<T>) -> Result<GridDesign<T>> {
    if p.n_fft == 0 || p.l == 0 || p.npr < 3 || p.npr % 2 == 0 {
        return Err(Error::InvalidParameter("n_fft, l must be positive and npr odd >= 3".into()));
    }
    for (name, v) in [
        ("k_cr", p.k_cr),
        ("p_d", p.p_d),
        ("lambda_c", p.lambda_c),
        ("r", p.r),
        ("v_p", p.v_p),
    ] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be positive and finite")));
        }
    }
    if !(p.gamma > T::zero() && p.gamma < T::one()) {
        return Err(Error::InvalidParameter("gamma must lie in (0, 1)".into()));
    }
    if p.p_d < p.k_cr {
        return Err(Error::InvalidParameter("p_d must be >= k_cr (output cannot be finer than the dense image grid)".into()));
    }
    if !(p.u_max > p.u_min) {
        return Err(Error::InvalidParameter("aperture bounds require u_max > u_min".into()));
    }

    let d = match p.aperture {
        Some(d) => {
            if !(d > T::zero()) {
                return Err(Error::InvalidParameter("aperture extent must be positive".into()));
            }
            d
        }
        None => {
            if !(p.b_chirp > T::zero()) || !(p.k_r > T::zero()) {
                return Err(Error::InvalidParameter("b_chirp and k_r must be positive when deriving the extent".into()));
            }
            // Angular azimuth extent matched to the range resolution cell,
            // scaled to slant range.
            let dbeta = p.lambda_c * p.b_chirp / T::of(SPEED_OF_LIGHT) * (p.k_cr / p.k_r);
            p.r * dbeta
        }
    };

    let n_d = (T::of(p.n_fft as f64) * p.k_cr / p.p_d).floor().to_f64_lossy() as usize;
    if n_d == 0 {
        return Err(Error::InvalidParameter("derived output grid is empty (n_fft * k_cr / p_d < 1)".into()));
    }
    let n_xac = n_d + p.npr;
    let du_out = d / T::of(n_d as f64);
    let prf_out_spatial = T::one() / du_out;
    let prf_out_temporal = p.v_p * prf_out_spatial;
    let pbw = p.gamma * prf_out_temporal;
    let x_out = p.lambda_c / T::of(2.0) * p.r * prf_out_spatial;
    let u_mid = (p.u_min + p.u_max) * T::of(0.5);

    let min_span = T::of((p.npr + 1) as f64) * du_out;
    if p.u_max - p.u_min < min_span {
        return Err(Error::InvalidParameter(format!(
            "aperture span {} shorter than the filter footprint {}",
            p.u_max - p.u_min,
            min_span
        )));
    }

    Ok(GridDesign {
        n_fft: p.n_fft,
        n_d,
        n_xac,
        npr: p.npr,
        l: p.l,
        gamma: p.gamma,
        d,
        du_out,
        prf_out_spatial,
        prf_out_temporal,
        pbw,
        x_out,
        u_min: p.u_min,
        u_max: p.u_max,
        u_mid,
        v_p: p.v_p,
        lambda_c: p.lambda_c,
        r: p.r,
    })
}

impl<T: Real> GridDesign<T> {
    /// Affine position-to-fractional-index map:
    /// `alpha = (u - u_mid) / du_out + (n_d + 1) / 2`.
    pub fn map_position(&self, u: T) -> Result<T> {
        if !u.is_finite() {
            return Err(Error::InvalidParameter("position must be finite".into()));
        }
        if u < self.u_min || u > self.u_max {
            return Err(Error::OutOfAperture(u.to_f64_lossy(), self.u_min.to_f64_lossy(), self.u_max.to_f64_lossy()));
        }
        Ok((u - self.u_mid) / self.du_out + T::of((self.n_d + 1) as f64) * T::of(0.5))
    }

    /// Inverse of [`map_position`] (no aperture check).
    pub fn unmap_index(&self, alpha: T) -> T {
        (alpha - T::of((self.n_d + 1) as f64) * T::of(0.5)) * self.du_out + self.u_mid
    }

    /// Quantize a fractional index onto the dense grid: `ell = floor(L * alpha)`.
    /// The realignment error `u - unmap(ell / L)` is in `[0, du_out / L)`.
    pub fn align_to_dense_grid(&self, alpha: T) -> i64 {
        (T::of(self.l as f64) * alpha).floor().to_f64_lossy() as i64
    }

    /// Along-track position of output sample `j` (0-based).
    pub fn output_position(&self, j: usize) -> T {
        self.unmap_index(T::of(j as f64) + T::of(0.5))
    }
}
