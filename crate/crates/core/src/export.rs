//! Result serialization: metrics and CDF CSVs, per-link PDP export, the
//! binary tap dump, and the diagnostic rasters.
//!
//! Tap dump layout: 16-byte header {magic "XLCH", version u32, U u32, S u32},
//! all little-endian, followed by float64 triplets (delay, re, im) for every
//! link in u-major order. Every link of a drop carries the same tap count,
//! so the per-link count is (file_len - 16) / (24·U·S).

use crate::error::{Error, Result};
use crate::metrics::MetricSample;
use crate::scalar::Scalar;
use crate::sim::NearFieldReportRow;
use crate::synthesis::{ChannelMatrix, ChannelRealization, Tap};
use num_complex::Complex;
use std::io::{Read, Write};

pub const TAP_DUMP_MAGIC: &[u8; 4] = b"XLCH";
pub const TAP_DUMP_VERSION: u32 = 1;

/// Metrics CSV: `ue_id,mode,capacity_bpshz,coupling_loss_db`.
pub fn write_metrics_csv<F: Scalar, W: Write>(
    samples: &[MetricSample<F>],
    out: &mut W,
) -> Result<()> {
    writeln!(out, "ue_id,mode,capacity_bpshz,coupling_loss_db")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{:.6},{:.6}",
            s.ue, s.mode, s.capacity_bpshz, s.coupling_loss_db
        )?;
    }
    Ok(())
}

/// CDF CSV: `value,probability`.
pub fn write_cdf_csv<F: Scalar, W: Write>(points: &[(F, F)], out: &mut W) -> Result<()> {
    writeln!(out, "value,probability")?;
    for (v, p) in points {
        writeln!(out, "{v:.6},{p:.8}")?;
    }
    Ok(())
}

/// Per-link power delay profile CSV: `delay_ns,power_db`.
pub fn write_pdp_csv<F: Scalar, W: Write>(link: &ChannelRealization<F>, out: &mut W) -> Result<()> {
    writeln!(out, "delay_ns,power_db")?;
    for tap in &link.taps {
        let p = tap.amplitude.norm_sqr();
        let p_db = if p > F::zero() {
            p.linear_to_db()
        } else {
            F::neg_infinity()
        };
        writeln!(out, "{:.4},{:.4}", tap.delay * F::lit(1e9), p_db)?;
    }
    Ok(())
}

/// Binary tap dump of a full drop.
pub fn write_tap_dump<F: Scalar, W: Write>(channel: &ChannelMatrix<F>, out: &mut W) -> Result<()> {
    out.write_all(TAP_DUMP_MAGIC)?;
    out.write_all(&TAP_DUMP_VERSION.to_le_bytes())?;
    out.write_all(&(channel.n_rx as u32).to_le_bytes())?;
    out.write_all(&(channel.n_tx as u32).to_le_bytes())?;
    for link in &channel.links {
        for tap in &link.taps {
            out.write_all(&tap.delay.to_f64().unwrap().to_le_bytes())?;
            out.write_all(&tap.amplitude.re.to_f64().unwrap().to_le_bytes())?;
            out.write_all(&tap.amplitude.im.to_f64().unwrap().to_le_bytes())?;
        }
    }
    Ok(())
}

/// Parse a tap dump back into (U, S, per-link taps). Counterpart of
/// [`write_tap_dump`]; used by tests and downstream consumers.
pub fn read_tap_dump<R: Read>(input: &mut R) -> Result<(u32, u32, Vec<Vec<Tap<f64>>>)> {
    let mut header = [0u8; 16];
    input.read_exact(&mut header)?;
    if &header[0..4] != TAP_DUMP_MAGIC {
        return Err(Error::ConfigParse("bad tap dump magic".into()));
    }
    let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
    if version != TAP_DUMP_VERSION {
        return Err(Error::ConfigParse(format!(
            "unsupported tap dump version {version}"
        )));
    }
    let u = u32::from_le_bytes(header[8..12].try_into().unwrap());
    let s = u32::from_le_bytes(header[12..16].try_into().unwrap());
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    let links = (u as usize) * (s as usize);
    if links == 0 || body.len() % 24 != 0 {
        return Err(Error::ConfigParse("malformed tap dump body".into()));
    }
    let total_taps = body.len() / 24;
    if total_taps % links != 0 {
        return Err(Error::ConfigParse("tap dump not divisible by links".into()));
    }
    let per_link = total_taps / links;
    let mut out = Vec::with_capacity(links);
    let mut offset = 0;
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
    for _ in 0..links {
        let mut taps = Vec::with_capacity(per_link);
        for _ in 0..per_link {
            taps.push(Tap {
                delay: f(&body[offset..offset + 8]),
                amplitude: Complex::new(
                    f(&body[offset + 8..offset + 16]),
                    f(&body[offset + 16..offset + 24]),
                ),
            });
            offset += 24;
        }
        out.push(taps);
    }
    Ok((u, s, out))
}

/// Attenuation raster as a rows x cols CSV matrix (row-major input).
pub fn write_alpha_raster<F: Scalar, W: Write>(
    rows: usize,
    cols: usize,
    alpha: &[F],
    out: &mut W,
) -> Result<()> {
    for r in 0..rows {
        let line: Vec<String> = (0..cols)
            .map(|c| format!("{:.6e}", alpha[r * cols + c]))
            .collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Near-field report CSV.
pub fn write_nearfield_report<F: Scalar, W: Write>(
    rows: &[NearFieldReportRow<F>],
    out: &mut W,
) -> Result<()> {
    writeln!(
        out,
        "cluster,element,phase_near_rad,phase_far_rad,aod_delta_rad,zod_delta_rad"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.9},{:.9},{:.9},{:.9}",
            r.cluster, r.element, r.phase_near_rad, r.phase_far_rad, r.aod_delta_rad,
            r.zod_delta_rad
        )?;
    }
    Ok(())
}

/// Per-element blocker loss CSV.
pub fn write_blockage_csv<F: Scalar, W: Write>(
    rows: &[(usize, F, F, F)],
    out: &mut W,
) -> Result<()> {
    writeln!(out, "element,x_m,y_m,loss_db")?;
    for (e, x, y, loss) in rows {
        writeln!(out, "{e},{x:.4},{y:.4},{loss:.6}")?;
    }
    Ok(())
}
