//! Run configuration: the bridge between key=value config files and
//! the typed pipeline inputs.
//!
//! The defaults reproduce the staggered point-target scenario used by
//! the regression suite: an L-band spaceborne geometry at 1000 km
//! slant range with three scatterers and a 0.417 ms output interval.
//! Every default can be overridden from a config file; unknown keys
//! are rejected rather than ignored.

use crate::error::{Error, Result};
use crate::filter::{design_filter, polyphase_decompose, FirFilter, PolyphaseBank};
use crate::grid::{design_output_grid, GridDesign, GridParams};
use crate::metrics::WindowKind;
use crate::sim::{PriKind, Scatterer, Scene};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// PRI variation applied when simulating.
    pub pri: PriKind,
    /// Custom PRI parameters (min, max, mean in seconds, period in m);
    /// when absent the stock parameters for `pri` are used.
    pub pri_custom: Option<(f64, f64, f64, f64)>,

    pub npr: usize,
    pub l: usize,
    pub density: usize,
    pub gamma: f64,

    pub n_fft: usize,
    pub k_cr: f64,
    pub p_d: f64,
    pub k_r: f64,
    pub lambda_c: f64,
    pub b_chirp: f64,
    pub r: f64,
    pub v_p: f64,
    /// Scene azimuth extent in meters; `None` derives it from the chirp.
    pub aperture: Option<f64>,

    /// Scatterer along-track coordinates; all sit at broadside range `r`.
    pub scat_x: Vec<f64>,

    /// Hamming coefficient for the compression taper ("rect" => 1.0).
    pub window_alpha: f64,
    pub crop: bool,

    pub seed: u64,
    pub drop_fraction: f64,

    pub psd_p: f64,
    pub psd_segment: usize,
    pub psd_overlap: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pri_out = 0.417e-3;
        RunConfig {
            pri: PriKind::Slow,
            pri_custom: None,
            npr: 5,
            l: 64,
            density: 2048,
            gamma: 800.0 * pri_out, // processed bandwidth over output rate
            n_fft: 16384,
            k_cr: 1.2,
            p_d: 4.8,
            k_r: 1.0,
            lambda_c: 0.2384,
            b_chirp: 240.0e6,
            r: 1.0e6,
            v_p: 7473.0,
            aperture: Some(4096.0 * 7473.0 * pri_out),
            scat_x: vec![-17.0e3, 0.0, 17.0e3],
            window_alpha: 0.6,
            crop: false,
            seed: 0,
            drop_fraction: 0.0,
            psd_p: 0.3,
            psd_segment: 256,
            psd_overlap: 0.5,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| Error::Parse(format!("config key '{key}': {e}")))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_map(&crate::io::read_config(path)?)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut custom = (None, None, None, None);
        for (key, value) in map {
            match key.as_str() {
                "pri" => cfg.pri = PriKind::parse(value)?,
                "pri_min" => custom.0 = Some(parse::<f64>(key, value)?),
                "pri_max" => custom.1 = Some(parse::<f64>(key, value)?),
                "pri_mean" => custom.2 = Some(parse::<f64>(key, value)?),
                "pri_period_m" => custom.3 = Some(parse::<f64>(key, value)?),
                "npr" => cfg.npr = parse(key, value)?,
                "l" => cfg.l = parse(key, value)?,
                "density" => cfg.density = parse(key, value)?,
                "gamma" => cfg.gamma = parse(key, value)?,
                "n_fft" => cfg.n_fft = parse(key, value)?,
                "k_cr" => cfg.k_cr = parse(key, value)?,
                "p_d" => cfg.p_d = parse(key, value)?,
                "k_r" => cfg.k_r = parse(key, value)?,
                "lambda_c" => cfg.lambda_c = parse(key, value)?,
                "b_chirp" => cfg.b_chirp = parse(key, value)?,
                "r" => cfg.r = parse(key, value)?,
                "v_p" => cfg.v_p = parse(key, value)?,
                "aperture" => {
                    cfg.aperture = if value == "derived" { None } else { Some(parse(key, value)?) }
                }
                "scat_x" => {
                    cfg.scat_x = value
                        .split(',')
                        .map(|s| parse::<f64>(key, s.trim()))
                        .collect::<Result<Vec<_>>>()?
                }
                "window" => {
                    cfg.window_alpha = match value.as_str() {
                        "rect" => 1.0,
                        v => parse::<f64>(key, v)?,
                    }
                }
                "crop" => cfg.crop = parse(key, value)?,
                "seed" => cfg.seed = parse(key, value)?,
                "drop_fraction" => cfg.drop_fraction = parse(key, value)?,
                "psd_p" => cfg.psd_p = parse(key, value)?,
                "psd_segment" => cfg.psd_segment = parse(key, value)?,
                "psd_overlap" => cfg.psd_overlap = parse(key, value)?,
                other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
            }
        }
        if let (Some(mn), Some(mx), Some(mean), Some(period)) = custom {
            cfg.pri_custom = Some((mn, mx, mean, period));
        } else if custom != (None, None, None, None) {
            return Err(Error::Parse(
                "custom PRI needs all of pri_min, pri_max, pri_mean, pri_period_m".into(),
            ));
        }
        Ok(cfg)
    }

    pub fn window_kind(&self) -> WindowKind {
        if self.window_alpha >= 1.0 {
            WindowKind::Rect
        } else {
            WindowKind::Hamming { alpha: self.window_alpha }
        }
    }

    pub fn pri_sequence(&self) -> Result<crate::sim::PriSequence<f64>> {
        match self.pri_custom {
            Some((mn, mx, mean, period)) => crate::sim::gen_pri_sequence_custom(self.pri, mn, mx, mean, period),
            None => Ok(crate::sim::gen_pri_sequence(self.pri)),
        }
    }

    /// Design the output grid. The aperture bounds are set to the scene
    /// extent plus one filter footprint of padding on each side, so
    /// pulses feeding the edge output cells are kept.
    pub fn grid(&self) -> Result<GridDesign<f64>> {
        // First pass with open bounds just to learn D and du_out.
        let mut params = self.grid_params(-1.0e15, 1.0e15);
        let provisional = design_output_grid(&params)?;
        let pad = provisional.npr as f64 * provisional.du_out;
        let half = (provisional.d + pad) / 2.0;
        params.u_min = -half;
        params.u_max = half;
        design_output_grid(&params)
    }

    fn grid_params(&self, u_min: f64, u_max: f64) -> GridParams<f64> {
        GridParams {
            n_fft: self.n_fft,
            k_cr: self.k_cr,
            p_d: self.p_d,
            k_r: self.k_r,
            npr: self.npr,
            l: self.l,
            gamma: self.gamma,
            lambda_c: self.lambda_c,
            b_chirp: self.b_chirp,
            r: self.r,
            v_p: self.v_p,
            u_min,
            u_max,
            aperture: self.aperture,
        }
    }

    pub fn filter(&self) -> Result<FirFilter<f64>> {
        design_filter(self.npr, self.gamma, self.l, self.density)
    }

    pub fn bank(&self) -> Result<PolyphaseBank<f64>> {
        polyphase_decompose(&self.filter()?, self.l)
    }

    pub fn scene(&self) -> Scene<f64> {
        Scene {
            scatterers: self
                .scat_x
                .iter()
                .map(|&x| Scatterer { x, y: self.r, z: 0.0, reflectivity: num_complex::Complex::new(1.0, 0.0) })
                .collect(),
            lambda_c: self.lambda_c,
            y_c: 0.0,
            z_c: 0.0,
            v_p: self.v_p,
        }
    }
}
