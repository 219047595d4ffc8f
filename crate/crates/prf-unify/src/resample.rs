//! Streaming normalized-convolution resampler.
//!
//! The non-uniform pulse stream is treated as a sparsely gated version
//! of a hidden dense signal at rate `L * PRF_out`. Each incoming pulse
//! is snapped to its dense cell `ell`, which selects one polyphase
//! branch `x = m L - ell`; the branch taps are scattered into a complex
//! signal accumulator and a parallel real weight accumulator. At the
//! end the quotient of the two yields the uniform output — the running
//! weight is exactly the same filter applied to the gating pattern, so
//! the division undoes whatever fraction of the filter mass the gaps
//! removed.
//!
//! The state is fixed-size: two accumulators of length `n_xac = n_d +
//! npr` plus a dense-cell occupancy bitset for collision counting.
//! Ingestion never allocates, so arbitrarily long pulse streams run in
//! constant memory and the state can be checkpointed and resumed
//! mid-stream.

use crate::error::{Error, Result};
use crate::filter::PolyphaseBank;
use crate::grid::GridDesign;
use crate::scalar::Real;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex;
use std::io::{Read, Write};

/// Relative weight threshold below which an output cell counts as
/// starved: `w_eps = W_EPS_REL * max |f(n)|`.
pub const W_EPS_REL: f64 = 1e-9;

/// What to do with output cells whose accumulated weight is below
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroWeightPolicy {
    /// Emit zero there and report the indices.
    Zero,
    /// Fail the run.
    Error,
}

/// Outcome of feeding one pulse to the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestOutcome {
    /// Pulse landed on this dense cell.
    Accepted { cell: i64 },
    /// Position outside the aperture; counted, not accumulated.
    Dropped,
    /// Non-finite position or sample; counted, not accumulated.
    Rejected,
}

/// Branch selection for a dense cell: returns `(x, m)` with
/// `m = floor((ell - 1) / L) + 1` and `x = m L - ell` in `[0, L)`.
pub fn active_component(ell: i64, l: usize) -> (usize, i64) {
    let l = l as i64;
    let m = (ell - 1).div_euclid(l) + 1;
    let x = m * l - ell;
    debug_assert!((0..l).contains(&x));
    (x as usize, m)
}

/// Range of output-rate indices `n` (inclusive) that a pulse on dense
/// cell `ell` touches: `[floor((ell-1)/L) - (npr-1)/2, floor(ell/L) + (npr-1)/2]`.
pub fn target_output_range(ell: i64, l: usize, npr: usize) -> (i64, i64) {
    let l = l as i64;
    let off = ((npr - 1) / 2) as i64;
    ((ell - 1).div_euclid(l) - off, ell.div_euclid(l) + off)
}

#[derive(Debug, Clone)]
pub struct ResampleState<T: Real> {
    bank: PolyphaseBank<T>,
    grid: GridDesign<T>,
    y_acc: Vec<Complex<T>>,
    w_acc: Vec<T>,
    seen: Vec<u64>,
    cell_base: i64,
    ingested: u64,
    dropped: u64,
    rejected: u64,
    collisions: u64,
}

/// Summary returned by [`ResampleState::finalize`].
#[derive(Debug, Clone)]
pub struct FinalizeReport {
    pub starved: Vec<usize>,
    pub w_eps: f64,
    pub ingested: u64,
    pub dropped: u64,
    pub rejected: u64,
    pub collisions: u64,
}

/// Density diagnostics from [`ResampleState::sparsity_check`].
#[derive(Debug, Clone, Copy)]
pub struct SparsityReport {
    /// Fraction of dense cells occupied by at least one pulse.
    pub p_hat: f64,
    /// Mean accepted pulses per output cell.
    pub rho: f64,
    /// True when the dense rate dominates the input rate by at least 10x.
    pub ok: bool,
}

impl<T: Real> ResampleState<T> {
    pub fn new(bank: PolyphaseBank<T>, grid: GridDesign<T>) -> Result<Self> {
        if bank.l() != grid.l || bank.npr() != grid.npr {
            return Err(Error::InvalidParameter(format!(
                "bank (L={}, npr={}) does not match grid (L={}, npr={})",
                bank.l(),
                bank.npr(),
                grid.l,
                grid.npr
            )));
        }
        let n_xac = grid.n_xac;
        let off = ((grid.npr - 1) / 2) as i64;
        // Dense cells reachable by in-aperture pulses: n in [-off, n_xac-1-off]
        // maps back through ell in [L*(n-off)... ]; size the bitset for the
        // full dense span with the same symmetric padding.
        let n_cells = (n_xac + grid.npr) * grid.l;
        let cell_base = -(off + grid.npr as i64) * grid.l as i64;
        Ok(Self {
            bank,
            grid,
            y_acc: vec![Complex::new(T::zero(), T::zero()); n_xac],
            w_acc: vec![T::zero(); n_xac],
            seen: vec![0u64; (n_cells + 63) / 64],
            cell_base,
            ingested: 0,
            dropped: 0,
            rejected: 0,
            collisions: 0,
        })
    }

    pub fn grid(&self) -> &GridDesign<T> {
        &self.grid
    }

    pub fn bank(&self) -> &PolyphaseBank<T> {
        &self.bank
    }

    pub fn accumulator_len(&self) -> usize {
        self.y_acc.len()
    }

    pub fn counts(&self) -> (u64, u64, u64, u64) {
        (self.ingested, self.dropped, self.rejected, self.collisions)
    }

    /// Read-only view of the weight accumulator (f convolved with the gating
    /// realization, sampled on the output grid).
    pub fn weights(&self) -> &[T] {
        &self.w_acc
    }

    fn mark_seen(&mut self, ell: i64) -> bool {
        let idx = ell - self.cell_base;
        if idx < 0 || idx as usize >= self.seen.len() * 64 {
            return false;
        }
        let (word, bit) = ((idx / 64) as usize, (idx % 64) as u32);
        let prior = self.seen[word] & (1u64 << bit) != 0;
        self.seen[word] |= 1u64 << bit;
        prior
    }

    /// Scatter one dense-cell contribution into the accumulators. Core
    /// of the algorithm; [`Self::ingest_pulse`] is the position-mapping
    /// wrapper around it.
    pub fn ingest_cell(&mut self, ell: i64, value: Complex<T>) {
        let npr = self.bank.npr();
        let (x, m) = active_component(ell, self.bank.l());
        let (n_lo, n_hi) = target_output_range(ell, self.bank.l(), npr);
        let off = ((npr - 1) / 2) as i64;
        let tap_shift = ((npr + 1) / 2) as i64 - m;
        let comp = self.bank.component(x);
        for n in n_lo..=n_hi {
            let a = n + off;
            if a < 0 || a as usize >= self.y_acc.len() {
                continue;
            }
            let k = n + tap_shift;
            debug_assert!(k >= 0 && (k as usize) < comp.len());
            let t = comp[k as usize];
            let a = a as usize;
            self.y_acc[a] += value * t;
            self.w_acc[a] += t;
        }
        if self.mark_seen(ell) {
            self.collisions += 1;
        }
        self.ingested += 1;
    }

    /// Map a pulse at along-track position `u` to its dense cell and
    /// accumulate it. Pulses outside the aperture are dropped; pulses
    /// with non-finite position or value are rejected. Both are counted
    /// and neither is an error — real acquisitions contain them.
    pub fn ingest_pulse(&mut self, u: T, value: Complex<T>) -> IngestOutcome {
        if !u.is_finite() || !value.re.is_finite() || !value.im.is_finite() {
            self.rejected += 1;
            return IngestOutcome::Rejected;
        }
        let alpha = match self.grid.map_position(u) {
            Ok(a) => a,
            Err(_) => {
                self.dropped += 1;
                return IngestOutcome::Dropped;
            }
        };
        let ell = self.grid.align_to_dense_grid(alpha);
        self.ingest_cell(ell, value);
        IngestOutcome::Accepted { cell: ell }
    }

    pub fn sparsity_check(&self) -> SparsityReport {
        let occupied: u64 = self.seen.iter().map(|w| w.count_ones() as u64).sum();
        let dense_cells = (self.grid.n_d * self.grid.l) as f64;
        let p_hat = occupied as f64 / dense_cells;
        let rho = self.ingested as f64 / self.grid.n_d as f64;
        SparsityReport { p_hat, rho, ok: p_hat <= 0.1 }
    }

    /// Divide out the accumulated filter mass and trim the transient
    /// padding: the first `(npr-1)/2` and last `(npr+1)/2` accumulator
    /// cells fall outside the aperture and are discarded, leaving
    /// exactly `n_d` outputs. Cells whose weight is below
    /// `1e-9 * max|f|` are starved and handled per policy.
    pub fn finalize(&self, policy: ZeroWeightPolicy) -> Result<(Vec<Complex<T>>, FinalizeReport)> {
        let npr = self.bank.npr();
        let off = (npr - 1) / 2;
        let w_eps = self.bank.max_abs_tap() * T::of(W_EPS_REL);
        let mut out = Vec::with_capacity(self.grid.n_d);
        let mut starved = Vec::new();
        for j in 0..self.grid.n_d {
            let a = j + off;
            let w = self.w_acc[a];
            if w.abs() <= w_eps {
                starved.push(j);
                out.push(Complex::new(T::zero(), T::zero()));
            } else {
                out.push(self.y_acc[a] / w);
            }
        }
        if policy == ZeroWeightPolicy::Error && !starved.is_empty() {
            return Err(Error::StarvedOutputs { count: starved.len(), first: starved[0] });
        }
        Ok((
            out,
            FinalizeReport {
                starved,
                w_eps: w_eps.to_f64_lossy(),
                ingested: self.ingested,
                dropped: self.dropped,
                rejected: self.rejected,
                collisions: self.collisions,
            },
        ))
    }

    /// Serialize the full mutable state (accumulators, counters,
    /// occupancy) so a long acquisition can resume exactly where it
    /// stopped. Values are stored as f64 regardless of `T`.
    pub fn save_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"PUCK")?;
        w.write_u32::<LittleEndian>(1)?;
        w.write_u32::<LittleEndian>(self.bank.npr() as u32)?;
        w.write_u32::<LittleEndian>(self.bank.l() as u32)?;
        w.write_u64::<LittleEndian>(self.grid.n_d as u64)?;
        w.write_f64::<LittleEndian>(self.grid.du_out.to_f64_lossy())?;
        w.write_f64::<LittleEndian>(self.grid.u_mid.to_f64_lossy())?;
        for v in [self.ingested, self.dropped, self.rejected, self.collisions] {
            w.write_u64::<LittleEndian>(v)?;
        }
        for c in &self.y_acc {
            w.write_f64::<LittleEndian>(c.re.to_f64_lossy())?;
            w.write_f64::<LittleEndian>(c.im.to_f64_lossy())?;
        }
        for &t in &self.w_acc {
            w.write_f64::<LittleEndian>(t.to_f64_lossy())?;
        }
        w.write_u64::<LittleEndian>(self.seen.len() as u64)?;
        for &word in &self.seen {
            w.write_u64::<LittleEndian>(word)?;
        }
        Ok(())
    }

    /// Resume from a checkpoint written by [`Self::save_checkpoint`].
    /// The bank and grid are supplied by the caller (they are
    /// deterministic from the run config) and validated against the
    /// fingerprint in the header.
    pub fn load_checkpoint<R: Read>(bank: PolyphaseBank<T>, grid: GridDesign<T>, mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"PUCK" {
            return Err(Error::Parse("not a resampler checkpoint (bad magic)".into()));
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != 1 {
            return Err(Error::Parse(format!("unsupported checkpoint version {version}")));
        }
        let npr = r.read_u32::<LittleEndian>()? as usize;
        let l = r.read_u32::<LittleEndian>()? as usize;
        let n_d = r.read_u64::<LittleEndian>()? as usize;
        let du_out = r.read_f64::<LittleEndian>()?;
        let u_mid = r.read_f64::<LittleEndian>()?;
        if npr != bank.npr() || l != bank.l() || n_d != grid.n_d {
            return Err(Error::Parse("checkpoint does not match the supplied bank/grid shape".into()));
        }
        let rel = |a: f64, b: f64| (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0);
        if rel(du_out, grid.du_out.to_f64_lossy()) || rel(u_mid, grid.u_mid.to_f64_lossy()) {
            return Err(Error::Parse("checkpoint grid geometry differs from the supplied grid".into()));
        }
        let mut state = Self::new(bank, grid)?;
        state.ingested = r.read_u64::<LittleEndian>()?;
        state.dropped = r.read_u64::<LittleEndian>()?;
        state.rejected = r.read_u64::<LittleEndian>()?;
        state.collisions = r.read_u64::<LittleEndian>()?;
        for c in state.y_acc.iter_mut() {
            let re = r.read_f64::<LittleEndian>()?;
            let im = r.read_f64::<LittleEndian>()?;
            *c = Complex::new(T::of(re), T::of(im));
        }
        for t in state.w_acc.iter_mut() {
            *t = T::of(r.read_f64::<LittleEndian>()?);
        }
        let n_words = r.read_u64::<LittleEndian>()? as usize;
        if n_words != state.seen.len() {
            return Err(Error::Parse("checkpoint occupancy size mismatch".into()));
        }
        for word in state.seen.iter_mut() {
            *word = r.read_u64::<LittleEndian>()?;
        }
        Ok(state)
    }
}
