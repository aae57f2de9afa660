//! Flat binary persistence of fields with a JSON sidecar.
//!
//! Layout of the binary file: the 8-byte magic `LFPPFLD1`, the level `k` as a
//! little-endian `u32`, the sampler code as a `u8`, three zero bytes, then the
//! `n x n` values as row-major little-endian `f64`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FieldSample, GridSpec, Normalization, SamplerKind};
use crate::{Error, Result};

pub const FIELD_MAGIC: &[u8; 8] = b"LFPPFLD1";
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub level: u32,
    pub padding_factor: f64,
    pub sampler: SamplerKind,
    pub seed: u64,
    pub normalization: Normalization,
    /// Fourier variance offset in effect when the field was drawn.
    pub calibration_c0: Option<f64>,
}

pub fn encode_field<W: Write>(sample: &FieldSample, mut out: W) -> Result<()> {
    let mut header = [0u8; HEADER_LEN];
    header[..8].copy_from_slice(FIELD_MAGIC);
    header[8..12].copy_from_slice(&sample.spec.level().to_le_bytes());
    header[12] = sample.sampler_kind.code();
    out.write_all(&header)?;
    let mut body = Vec::with_capacity(sample.values.len() * 8);
    for v in &sample.values {
        body.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&body)?;
    Ok(())
}

/// Decodes the binary part; returns `(level, sampler, values)`.
pub fn decode_field<R: Read>(mut input: R) -> Result<(u32, SamplerKind, Vec<f64>)> {
    let mut header = [0u8; HEADER_LEN];
    input.read_exact(&mut header)?;
    if &header[..8] != FIELD_MAGIC {
        return Err(Error::InvalidGrid("bad field file magic".into()));
    }
    let level = u32::from_le_bytes(header[8..12].try_into().expect("4-byte slice"));
    let kind = SamplerKind::from_code(header[12])
        .ok_or_else(|| Error::InvalidGrid(format!("unknown sampler code {}", header[12])))?;
    let spec = GridSpec::with_level(level)?;
    let mut body = Vec::new();
    input.read_to_end(&mut body)?;
    if body.len() != spec.vertex_count() * 8 {
        return Err(Error::InvalidGrid(format!(
            "expected {} value bytes, found {}",
            spec.vertex_count() * 8,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((level, kind, values))
}

/// Writes `<stem>.bin` and `<stem>.json` into `dir`.
pub fn write_field(
    sample: &FieldSample,
    dir: &Path,
    stem: &str,
    calibration_c0: Option<f64>,
) -> Result<()> {
    let mut bin = Vec::new();
    encode_field(sample, &mut bin)?;
    fs::write(dir.join(format!("{stem}.bin")), bin)?;
    let meta = FieldMetadata {
        level: sample.spec.level(),
        padding_factor: sample.spec.padding_factor(),
        sampler: sample.sampler_kind,
        seed: sample.seed,
        normalization: sample.normalization,
        calibration_c0,
    };
    fs::write(
        dir.join(format!("{stem}.json")),
        serde_json::to_string_pretty(&meta)?,
    )?;
    Ok(())
}

pub fn read_field(dir: &Path, stem: &str) -> Result<(FieldSample, FieldMetadata)> {
    let (level, kind, values) = decode_field(fs::File::open(dir.join(format!("{stem}.bin")))?)?;
    let meta: FieldMetadata =
        serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
    if meta.level != level || meta.sampler != kind {
        return Err(Error::InvalidGrid("sidecar metadata disagrees with header".into()));
    }
    let spec = GridSpec::new(level, meta.padding_factor)?;
    let sample = FieldSample {
        spec,
        values,
        sampler_kind: kind,
        seed: meta.seed,
        normalization: meta.normalization,
    };
    Ok((sample, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_layered;

    #[test]
    fn header_layout_is_fixed() {
        let f = sample_layered(GridSpec::with_level(2).unwrap(), 5);
        let mut bytes = Vec::new();
        encode_field(&f, &mut bytes).unwrap();
        assert_eq!(&bytes[..8], b"LFPPFLD1");
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(bytes[12], 2);
        assert_eq!(&bytes[13..16], &[0, 0, 0]);
        assert_eq!(bytes.len(), 16 + 25 * 8);
        assert_eq!(&bytes[16..24], &f.values[0].to_le_bytes());
    }

    #[test]
    fn rejects_corrupt_input() {
        assert!(decode_field(&b"NOTAFIELD0000000"[..]).is_err());
        let f = sample_layered(GridSpec::with_level(1).unwrap(), 5);
        let mut bytes = Vec::new();
        encode_field(&f, &mut bytes).unwrap();
        bytes.pop();
        assert!(decode_field(&bytes[..]).is_err());
    }
}
