//! Point-scatterer acquisition simulator and staggered-PRI timelines.
//!
//! Everything here is deliberately idealized: isotropic unit-pattern
//! scatterers, a straight-line platform track, and two-way geometric
//! phase only. That keeps the simulated pulses an exact ground truth
//! for the resampler instead of a second source of modelling error.
//!
//! PRI variation is described as a periodic waveform of along-track
//! position. Three stock shapes cover the interesting regimes: a slow
//! sweep (period much longer than the output cell), a fast sweep
//! (period shorter than the filter footprint), and an elaborate
//! two-scale sweep with a much larger excursion.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

/// One ideal point scatterer. Reflectivity is a complex amplitude.
#[derive(Debug, Clone)]
pub struct Scatterer<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub reflectivity: Complex<T>,
}

/// A scene: scatterers plus the platform/looking geometry needed to
/// turn along-track position into two-way range.
#[derive(Debug, Clone)]
pub struct Scene<T: Real> {
    pub scatterers: Vec<Scatterer<T>>,
    pub lambda_c: T,
    pub y_c: T,
    pub z_c: T,
    pub v_p: T,
}

/// A simulated (or recorded) pulse stream: one complex range-gated
/// sample per pulse at strictly increasing along-track positions.
#[derive(Debug, Clone)]
pub struct PulseSet<T: Real> {
    pub positions: Vec<T>,
    pub samples: Vec<Complex<T>>,
    pub v_p: T,
    pub lambda_c: T,
}

impl<T: Real> PulseSet<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Two-way geometric response of the scene at platform position `u`:
/// `sum_n sigma_n * exp(-j 2 (2 pi / lambda) D_n(u))` with
/// `D_n = sqrt((x_n - u)^2 + (y_n - y_c)^2 + (z_n - z_c)^2)`.
pub fn point_target_response<T: Real>(scene: &Scene<T>, u: T) -> Complex<T> {
    let k2 = T::of(2.0) * (T::of(2.0) * T::PI() / scene.lambda_c);
    let mut acc = Complex::new(T::zero(), T::zero());
    for s in &scene.scatterers {
        let dx = s.x - u;
        let dy = s.y - scene.y_c;
        let dz = s.z - scene.z_c;
        let dist = (dx * dx + dy * dy + dz * dz).sqrt();
        let phase = -k2 * dist;
        acc += s.reflectivity * Complex::new(phase.cos(), phase.sin());
    }
    acc
}

pub fn simulate_acquisition<T: Real>(scene: &Scene<T>, positions: &[T]) -> PulseSet<T> {
    let samples = positions.iter().map(|&u| point_target_response(scene, u)).collect();
    PulseSet { positions: positions.to_vec(), samples, v_p: scene.v_p, lambda_c: scene.lambda_c }
}

/// Stock PRI variation shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriKind {
    Constant,
    Slow,
    Fast,
    Elaborate,
}

impl PriKind {
    pub fn name(self) -> &'static str {
        match self {
            PriKind::Constant => "constant",
            PriKind::Slow => "slow",
            PriKind::Fast => "fast",
            PriKind::Elaborate => "elaborate",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(PriKind::Constant),
            "slow" => Ok(PriKind::Slow),
            "fast" => Ok(PriKind::Fast),
            "elaborate" => Ok(PriKind::Elaborate),
            other => Err(Error::Parse(format!("unknown PRI kind '{other}'"))),
        }
    }
}

/// Number of samples in the tabulated PRI waveform. A multiple of 8 so
/// every kink of the stock piecewise-linear shapes falls on a node and
/// linear interpolation reproduces them exactly.
pub const PRI_TABLE_LEN: usize = 4096;

/// A periodic PRI schedule over along-track position: one period of
/// the waveform tabulated densely, interpolated linearly, values
/// clamped to `[pri_min, pri_max]` and re-centered so the table mean
/// equals `pri_mean`.
#[derive(Debug, Clone)]
pub struct PriSequence<T: Real> {
    pub kind: PriKind,
    pub pri_min: T,
    pub pri_max: T,
    pub pri_mean: T,
    /// Spatial period of the variation in meters.
    pub period_m: T,
    table: Vec<T>,
}

/// Unit triangle: 0 at phase 0, +1 at 1/4, -1 at 3/4, 0 at 1.
fn unit_triangle(ph: f64) -> f64 {
    let ph = ph.rem_euclid(1.0);
    if ph < 0.25 {
        4.0 * ph
    } else if ph < 0.75 {
        2.0 - 4.0 * ph
    } else {
        4.0 * ph - 4.0
    }
}

/// Build one of the stock PRI schedules. The defaults reproduce the
/// three staggered test timelines around a 0.385 ms mean:
/// slow 0.375..0.395 ms over 580 m, fast 0.349..0.421 ms over 34 m,
/// elaborate 0.309..0.461 ms over 268 m (two triangles per period with
/// amplitudes 2h/3 and h/3).
pub fn gen_pri_sequence<T: Real>(kind: PriKind) -> PriSequence<T> {
    let (mn, mx, mean, period) = match kind {
        PriKind::Constant => (0.385e-3, 0.385e-3, 0.385e-3, 1000.0),
        PriKind::Slow => (0.375e-3, 0.395e-3, 0.385e-3, 580.0),
        PriKind::Fast => (0.349e-3, 0.421e-3, 0.385e-3, 34.0),
        PriKind::Elaborate => (0.309e-3, 0.461e-3, 0.385e-3, 268.0),
    };
    gen_pri_sequence_custom(kind, T::of(mn), T::of(mx), T::of(mean), T::of(period)).expect("stock parameters are valid")
}

/// Build a PRI schedule with explicit parameters. `kind` selects the
/// waveform shape; `Constant` ignores min/max.
pub fn gen_pri_sequence_custom<T: Real>(
    kind: PriKind,
    pri_min: T,
    pri_max: T,
    pri_mean: T,
    period_m: T,
) -> Result<PriSequence<T>> {
    if !(pri_min > T::zero()) || pri_max < pri_min || pri_mean < pri_min || pri_mean > pri_max {
        return Err(Error::InvalidParameter("need 0 < pri_min <= pri_mean <= pri_max".into()));
    }
    if !(period_m > T::zero()) {
        return Err(Error::InvalidParameter("PRI variation period must be positive".into()));
    }
    let n = PRI_TABLE_LEN;
    let mut table = vec![T::zero(); n];
    let mean = pri_mean.to_f64_lossy();
    let up = pri_max.to_f64_lossy() - mean;
    let down = mean - pri_min.to_f64_lossy();
    for (i, slot) in table.iter_mut().enumerate() {
        let ph = i as f64 / n as f64;
        let v = match kind {
            PriKind::Constant => mean,
            PriKind::Slow | PriKind::Fast => mean + up.min(down) * unit_triangle(ph),
            PriKind::Elaborate => {
                let h = up.min(down);
                if ph < 0.5 {
                    mean + 2.0 * h / 3.0 * unit_triangle(ph * 2.0)
                } else {
                    mean + h / 3.0 * unit_triangle(ph * 2.0)
                }
            }
        };
        *slot = T::of(v);
    }
    // Re-center so the table averages to the requested mean, then clamp.
    let avg: T = table.iter().copied().sum::<T>() / T::of(n as f64);
    let shift = pri_mean - avg;
    if shift.abs() > pri_mean * T::of(0.01) {
        return Err(Error::Numeric("PRI waveform mean off by more than 1% before re-centering".into()));
    }
    for slot in table.iter_mut() {
        *slot = (*slot + shift).max(pri_min).min(pri_max);
    }
    Ok(PriSequence { kind, pri_min, pri_max, pri_mean, period_m, table })
}

impl<T: Real> PriSequence<T> {
    /// PRI at a given phase of the period (any real; wraps).
    pub fn value_at_phase(&self, phase: T) -> T {
        let n = self.table.len();
        let t = (phase - phase.floor()) * T::of(n as f64);
        let i0 = t.floor().to_f64_lossy() as usize % n;
        let i1 = (i0 + 1) % n;
        let frac = t - t.floor();
        self.table[i0] * (T::one() - frac) + self.table[i1] * frac
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }
}

/// March a platform at `v_p` from `u_start` to `u_end`, emitting pulse
/// positions under the PRI schedule (phase referenced to `u_start`).
/// The spacing invariant `v_p * pri_min <= du <= v_p * pri_max` holds
/// for all consecutive positions.
pub fn positions_from_pri<T: Real>(seq: &PriSequence<T>, v_p: T, u_start: T, u_end: T) -> Result<Vec<T>> {
    if !(v_p > T::zero()) {
        return Err(Error::InvalidParameter("platform velocity must be positive".into()));
    }
    if !(u_end > u_start) {
        return Err(Error::InvalidParameter("need u_end > u_start".into()));
    }
    let mut out = Vec::new();
    let mut u = u_start;
    while u < u_end {
        out.push(u);
        let pri = seq.value_at_phase((u - u_start) / seq.period_m);
        u = u + v_p * pri;
    }
    Ok(out)
}

/// Bernoulli-gate a dense signal: each cell survives independently
/// with probability `p`. Returns the survivor mask.
pub fn gate_dense_signal(n: usize, p: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter("gating probability must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.gen::<f64>() < p).collect())
}

/// Remove `round(fraction * K)` pulses at uniformly random indices.
/// Models missing pulses (transmit blockage, dropped lines).
pub fn drop_samples<T: Real>(pulses: &PulseSet<T>, fraction: f64, seed: u64) -> Result<PulseSet<T>> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidParameter("drop fraction must lie in [0, 1)".into()));
    }
    let k = pulses.len();
    let n_drop = (fraction * k as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..k).collect();
    idx.shuffle(&mut rng);
    let mut kill = vec![false; k];
    for &i in idx.iter().take(n_drop) {
        kill[i] = true;
    }
    let mut positions = Vec::with_capacity(k - n_drop);
    let mut samples = Vec::with_capacity(k - n_drop);
    for i in 0..k {
        if !kill[i] {
            positions.push(pulses.positions[i]);
            samples.push(pulses.samples[i]);
        }
    }
    Ok(PulseSet { positions, samples, v_p: pulses.v_p, lambda_c: pulses.lambda_c })
}

/// Complex circular Gaussian noise, bandlimited to `|omega| <= band * pi`
/// by spectral masking, scaled to unit variance. Used as the hidden
/// dense signal in the reconstruction-fidelity checks.
pub fn bandlimited_noise<T: Real>(n: usize, band: f64, seed: u64) -> Result<Vec<Complex<T>>> {
    if n == 0 || !(band > 0.0 && band <= 1.0) {
        return Err(Error::InvalidParameter("need n > 0 and band in (0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec: Vec<Complex<T>> = (0..n)
        .map(|_| {
            // Box-Muller.
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            Complex::new(T::of(r * (2.0 * std::f64::consts::PI * u2).cos()), T::of(r * (2.0 * std::f64::consts::PI * u2).sin()))
        })
        .collect();
    // Mask in the frequency domain: bin k holds omega = 2 pi k / n wrapped to (-pi, pi].
    for (k, s) in spec.iter_mut().enumerate() {
        let mut w = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        if w > std::f64::consts::PI {
            w -= 2.0 * std::f64::consts::PI;
        }
        if w.abs() > band * std::f64::consts::PI {
            *s = Complex::new(T::zero(), T::zero());
        }
    }
    let mut planner = FftPlanner::<T>::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut spec);
    // Normalize to unit variance.
    let power: f64 = spec.iter().map(|c| c.norm_sqr().to_f64_lossy()).sum::<f64>() / n as f64;
    let scale = T::of(1.0 / power.sqrt());
    for s in spec.iter_mut() {
        *s = *s * scale;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scatterer_phase() {
        let scene = Scene::<f64> {
            scatterers: vec![Scatterer { x: 0.0, y: 1000.0, z: 0.0, reflectivity: Complex::new(1.0, 0.0) }],
            lambda_c: 0.2,
            y_c: 0.0,
            z_c: 0.0,
            v_p: 100.0,
        };
        let v = point_target_response(&scene, 0.0);
        // D = 1000, phase = -2 * (2 pi / 0.2) * 1000 = -20000 * pi (even multiple).
        assert!((v.re - 1.0).abs() < 1e-6 && v.im.abs() < 1e-6, "{v}");
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn response_is_superposition() {
        let mk = |xs: &[f64]| Scene {
            scatterers: xs
                .iter()
                .map(|&x| Scatterer { x, y: 5000.0, z: 0.0, reflectivity: Complex::new(0.8, 0.3) })
                .collect(),
            lambda_c: 0.031,
            y_c: 0.0,
            z_c: 0.0,
            v_p: 100.0,
        };
        let u = 37.5;
        let both = point_target_response(&mk(&[-10.0, 25.0]), u);
        let a = point_target_response(&mk(&[-10.0]), u);
        let b = point_target_response(&mk(&[25.0]), u);
        assert!((both - (a + b)).norm() < 1e-12);
    }

    #[test]
    fn stock_pri_sequences_hit_extremes_and_mean() {
        for kind in [PriKind::Slow, PriKind::Fast, PriKind::Elaborate] {
            let seq = gen_pri_sequence::<f64>(kind);
            let t = seq.table();
            let lo = t.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = t.iter().cloned().fold(0.0, f64::max);
            let avg = t.iter().sum::<f64>() / t.len() as f64;
            assert!(lo >= seq.pri_min - 1e-18 && hi <= seq.pri_max + 1e-18);
            assert!((avg - seq.pri_mean).abs() <= 0.01 * seq.pri_mean, "{kind:?} mean {avg}");
            // The symmetric stock shapes reach both extremes (elaborate only the 2h/3 lobe).
            let amp = match kind {
                PriKind::Elaborate => 2.0 / 3.0 * (seq.pri_max - seq.pri_mean),
                _ => seq.pri_max - seq.pri_mean,
            };
            assert!((hi - (seq.pri_mean + amp)).abs() < 1e-9 * seq.pri_mean);
            assert!((lo - (seq.pri_mean - amp)).abs() < 1e-9 * seq.pri_mean);
        }
    }

    #[test]
    fn value_at_phase_matches_closed_form_triangle() {
        let seq = gen_pri_sequence::<f64>(PriKind::Slow);
        let amp = 0.395e-3 - 0.385e-3;
        for &ph in &[0.0, 0.1, 0.25, 0.4, 0.5, 0.75, 0.9, 1.3, -0.2] {
            let expect = 0.385e-3 + amp * unit_triangle(ph);
            assert!((seq.value_at_phase(ph) - expect).abs() < 1e-15, "ph={ph}");
        }
    }

    #[test]
    fn positions_respect_spacing_invariant() {
        for kind in [PriKind::Slow, PriKind::Fast, PriKind::Elaborate] {
            let seq = gen_pri_sequence::<f64>(kind);
            let v_p = 7473.0;
            let us = positions_from_pri(&seq, v_p, -500.0, 500.0).unwrap();
            assert!(us.len() > 100);
            for w in us.windows(2) {
                let du = w[1] - w[0];
                assert!(du >= v_p * seq.pri_min - 1e-9 && du <= v_p * seq.pri_max + 1e-9, "{kind:?} du={du}");
            }
        }
    }

    #[test]
    fn constant_pri_positions_are_uniform() {
        let seq = gen_pri_sequence::<f64>(PriKind::Constant);
        let us = positions_from_pri(&seq, 1000.0, 0.0, 10.0).unwrap();
        for w in us.windows(2) {
            assert!((w[1] - w[0] - 0.385).abs() < 1e-12);
        }
    }

    #[test]
    fn gating_is_seeded_and_matches_rate() {
        let a = gate_dense_signal(100_000, 0.3, 7).unwrap();
        let b = gate_dense_signal(100_000, 0.3, 7).unwrap();
        assert_eq!(a, b);
        let rate = a.iter().filter(|&&x| x).count() as f64 / a.len() as f64;
        assert!((rate - 0.3).abs() < 0.01, "rate {rate}");
        let c = gate_dense_signal(100_000, 0.3, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn drop_samples_removes_exact_count() {
        let pulses = PulseSet {
            positions: (0..1000).map(|i| i as f64).collect(),
            samples: vec![Complex::new(1.0f64, 0.0); 1000],
            v_p: 100.0,
            lambda_c: 0.031,
        };
        let dropped = drop_samples(&pulses, 0.1, 3).unwrap();
        assert_eq!(dropped.len(), 900);
        // Order of the survivors is preserved.
        assert!(dropped.positions.windows(2).all(|w| w[1] > w[0]));
        let again = drop_samples(&pulses, 0.1, 3).unwrap();
        assert_eq!(again.positions, dropped.positions);
    }

    #[test]
    fn bandlimited_noise_spectrum_and_variance() {
        let n = 1 << 14;
        let band = 0.25;
        let x = bandlimited_noise::<f64>(n, band, 11).unwrap();
        let var: f64 = x.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 1e-9, "variance {var}");
        // Out-of-band energy must be at the numerical floor.
        let mut spec = x.clone();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(n).process(&mut spec);
        let mut inband = 0.0;
        let mut outband = 0.0;
        for (k, c) in spec.iter().enumerate() {
            let mut w = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            if w > std::f64::consts::PI {
                w -= 2.0 * std::f64::consts::PI;
            }
            if w.abs() <= band * std::f64::consts::PI {
                inband += c.norm_sqr();
            } else {
                outband += c.norm_sqr();
            }
        }
        assert!(outband < 1e-20 * inband);
    }
}
