//! File formats: binary pulse streams, text tap files, CSV debug
//! dumps, and the key=value config dialect.
//!
//! The pulse codec stores positions at full f64 precision but sample
//! payloads as f32 pairs — positions control where energy lands on the
//! grid and need every bit, while the samples carry receiver noise
//! well above the f32 quantization floor.

use crate::error::{Error, Result};
use crate::grid::GridDesign;
use crate::scalar::Real;
use crate::sim::PulseSet;
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_complex::Complex;
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

const PULSE_MAGIC: &[u8; 4] = b"PPH1";
const PULSE_VERSION: u32 = 1;

/// Write a pulse stream: `PPH1`, version, count, v_p, lambda_c, then
/// (f64 position, f32 re, f32 im) per pulse, all little-endian.
pub fn write_pulses<T: Real, W: Write>(w: W, pulses: &PulseSet<T>) -> Result<()> {
    let mut w = BufWriter::new(w);
    w.write_all(PULSE_MAGIC)?;
    w.write_u32::<LittleEndian>(PULSE_VERSION)?;
    w.write_u64::<LittleEndian>(pulses.len() as u64)?;
    w.write_f64::<LittleEndian>(pulses.v_p.to_f64_lossy())?;
    w.write_f64::<LittleEndian>(pulses.lambda_c.to_f64_lossy())?;
    for (u, s) in pulses.positions.iter().zip(&pulses.samples) {
        w.write_f64::<LittleEndian>(u.to_f64_lossy())?;
        w.write_f32::<LittleEndian>(s.re.to_f64_lossy() as f32)?;
        w.write_f32::<LittleEndian>(s.im.to_f64_lossy() as f32)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pulses<T: Real, R: Read>(r: R) -> Result<PulseSet<T>> {
    let mut r = BufReader::new(r);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != PULSE_MAGIC {
        return Err(Error::Parse("not a pulse file (bad magic)".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != PULSE_VERSION {
        return Err(Error::Parse(format!("unsupported pulse file version {version}")));
    }
    let count = r.read_u64::<LittleEndian>()? as usize;
    let v_p = T::of(r.read_f64::<LittleEndian>()?);
    let lambda_c = T::of(r.read_f64::<LittleEndian>()?);
    let mut positions = Vec::with_capacity(count);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        positions.push(T::of(r.read_f64::<LittleEndian>()?));
        let re = r.read_f32::<LittleEndian>()?;
        let im = r.read_f32::<LittleEndian>()?;
        samples.push(Complex::new(T::of(re as f64), T::of(im as f64)));
    }
    Ok(PulseSet { positions, samples, v_p, lambda_c })
}

/// Debug CSV: header `position,re,im`, one pulse per row.
pub fn write_pulses_csv<T: Real, W: Write>(w: W, pulses: &PulseSet<T>) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "position,re,im")?;
    for (u, s) in pulses.positions.iter().zip(&pulses.samples) {
        writeln!(w, "{:.17e},{:.9e},{:.9e}", u.to_f64_lossy(), s.re.to_f64_lossy(), s.im.to_f64_lossy())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pulses_csv<T: Real, R: Read>(r: R, v_p: T, lambda_c: T) -> Result<PulseSet<T>> {
    let r = BufReader::new(r);
    let mut positions = Vec::new();
    let mut samples = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (lineno == 0 && line.starts_with("position")) {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |what: &str| -> Result<f64> {
            parts
                .next()
                .ok_or_else(|| Error::Parse(format!("CSV line {} missing {what}", lineno + 1)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("CSV line {}: {e}", lineno + 1)))
        };
        positions.push(T::of(next("position")?));
        let re = next("re")?;
        let im = next("im")?;
        samples.push(Complex::new(T::of(re), T::of(im)));
    }
    Ok(PulseSet { positions, samples, v_p, lambda_c })
}

/// Tap file: `# fir order=<N> pass=<x> stop=<y>` then one tap per line,
/// printed with 17 significant digits so f64 round-trips exactly.
pub fn write_taps<T: Real, W: Write>(w: W, filter: &crate::filter::FirFilter<T>) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(
        w,
        "# fir order={} pass={:.17e} stop={:.17e}",
        filter.order(),
        filter.passband_edge().to_f64_lossy(),
        filter.stopband_edge().to_f64_lossy()
    )?;
    for t in filter.taps() {
        writeln!(w, "{:.17e}", t.to_f64_lossy())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_taps<T: Real, R: Read>(r: R) -> Result<crate::filter::FirFilter<T>> {
    let mut lines = BufReader::new(r).lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty tap file".into()))??;
    if !header.starts_with("# fir ") {
        return Err(Error::Parse("tap file missing '# fir' header".into()));
    }
    let mut order = None;
    let mut pass = None;
    let mut stop = None;
    for field in header.trim_start_matches("# fir ").split_whitespace() {
        let (key, val) = field
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad tap header field '{field}'")))?;
        match key {
            "order" => order = Some(val.parse::<usize>().map_err(|e| Error::Parse(e.to_string()))?),
            "pass" => pass = Some(val.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
            "stop" => stop = Some(val.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?),
            other => return Err(Error::Parse(format!("unknown tap header key '{other}'"))),
        }
    }
    let (order, pass, stop) = match (order, pass, stop) {
        (Some(o), Some(p), Some(s)) => (o, p, s),
        _ => return Err(Error::Parse("tap header needs order, pass and stop".into())),
    };
    let mut taps = Vec::with_capacity(order + 1);
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        taps.push(T::of(line.parse::<f64>().map_err(|e| Error::Parse(e.to_string()))?));
    }
    if taps.len() != order + 1 {
        return Err(Error::Parse(format!("tap file claims order {} but holds {} taps", order, taps.len())));
    }
    crate::filter::FirFilter::new(taps, T::of(pass), T::of(stop))
}

/// Parse the `key = value` config dialect. `#` starts a comment,
/// blank lines are skipped, `include = path` splices another file
/// (paths resolve relative to the including file), later assignments
/// win.
pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    let mut stack: Vec<PathBuf> = Vec::new();
    read_config_into(path, &mut map, &mut stack)?;
    Ok(map)
}

fn read_config_into(path: &Path, map: &mut BTreeMap<String, String>, stack: &mut Vec<PathBuf>) -> Result<()> {
    let canon = path
        .canonicalize()
        .map_err(|e| Error::Parse(format!("cannot open config {}: {e}", path.display())))?;
    if stack.contains(&canon) {
        return Err(Error::Parse(format!("config include cycle at {}", path.display())));
    }
    stack.push(canon.clone());
    let text = std::fs::read_to_string(&canon)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected 'key = value'", path.display(), lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::Parse(format!("{}:{}: empty key or value", path.display(), lineno + 1)));
        }
        if key == "include" {
            let inc = canon.parent().unwrap_or_else(|| Path::new(".")).join(value);
            read_config_into(&inc, map, stack)?;
        } else {
            map.insert(key.to_string(), value.to_string());
        }
    }
    stack.pop();
    Ok(())
}

/// Serialize a grid design in the same key=value dialect.
pub fn write_grid_kv<T: Real, W: Write>(w: W, g: &GridDesign<T>) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "# derived output grid")?;
    writeln!(w, "n_fft = {}", g.n_fft)?;
    writeln!(w, "n_d = {}", g.n_d)?;
    writeln!(w, "n_xac = {}", g.n_xac)?;
    writeln!(w, "npr = {}", g.npr)?;
    writeln!(w, "l = {}", g.l)?;
    writeln!(w, "gamma = {:.17e}", g.gamma.to_f64_lossy())?;
    writeln!(w, "d = {:.17e}", g.d.to_f64_lossy())?;
    writeln!(w, "du_out = {:.17e}", g.du_out.to_f64_lossy())?;
    writeln!(w, "prf_out_spatial = {:.17e}", g.prf_out_spatial.to_f64_lossy())?;
    writeln!(w, "prf_out_temporal = {:.17e}", g.prf_out_temporal.to_f64_lossy())?;
    writeln!(w, "pbw = {:.17e}", g.pbw.to_f64_lossy())?;
    writeln!(w, "x_out = {:.17e}", g.x_out.to_f64_lossy())?;
    writeln!(w, "u_min = {:.17e}", g.u_min.to_f64_lossy())?;
    writeln!(w, "u_max = {:.17e}", g.u_max.to_f64_lossy())?;
    writeln!(w, "v_p = {:.17e}", g.v_p.to_f64_lossy())?;
    writeln!(w, "lambda_c = {:.17e}", g.lambda_c.to_f64_lossy())?;
    writeln!(w, "r = {:.17e}", g.r.to_f64_lossy())?;
    w.flush()?;
    Ok(())
}
