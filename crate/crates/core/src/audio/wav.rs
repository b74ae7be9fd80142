//! RIFF/WAVE reader and writer restricted to 16-bit integer PCM, one channel.
//!
//! Chunks other than `fmt ` and `data` are skipped. Samples are normalized
//! by 1/32768 on the way in and rounded (with clamping) on the way out.

use std::fs;
use std::path::Path;

use super::AudioBuffer;
use crate::error::{Error, Result};
use crate::scalar::Real;

const PCM_FORMAT: u16 = 1;
const PCM16_SCALE: f64 = 32768.0;

struct Format {
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn u16_at(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

pub fn read_wav<T: Real>(path: impl AsRef<Path>) -> Result<AudioBuffer<T>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_wav(&bytes)
}

pub(crate) fn decode_wav<T: Real>(bytes: &[u8]) -> Result<AudioBuffer<T>> {
    if bytes.len() < 12 {
        return Err(Error::MalformedWav("file shorter than RIFF header".into()));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::MalformedWav("missing RIFF/WAVE signature".into()));
    }

    let mut format: Option<Format> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return Err(Error::MalformedWav(format!("truncated chunk header at byte {pos}")));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| {
                Error::MalformedWav(format!(
                    "chunk {:?} claims {size} bytes past end of file",
                    String::from_utf8_lossy(id)
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(Error::MalformedWav("fmt chunk shorter than 16 bytes".into()));
                }
                let audio_format = u16_at(body, 0);
                if audio_format != PCM_FORMAT {
                    return Err(Error::UnsupportedFormat(format!(
                        "audio format {audio_format} (only integer PCM is accepted)"
                    )));
                }
                format = Some(Format {
                    channels: u16_at(body, 2),
                    sample_rate: u32_at(body, 4),
                    bits_per_sample: u16_at(body, 14),
                });
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are word aligned
        pos = body_end + (size & 1);
        if data.is_some() && format.is_some() {
            break;
        }
    }

    let format = format.ok_or_else(|| Error::MalformedWav("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::MalformedWav("missing data chunk".into()))?;
    if format.channels != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{} channels (only mono is accepted)",
            format.channels
        )));
    }
    if format.bits_per_sample != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "{} bits per sample (only 16-bit is accepted)",
            format.bits_per_sample
        )));
    }
    if format.sample_rate == 0 {
        return Err(Error::MalformedWav("zero sample rate".into()));
    }
    if data.len() % 2 != 0 {
        return Err(Error::MalformedWav("odd data chunk length for 16-bit PCM".into()));
    }

    let scale = T::lit(1.0 / PCM16_SCALE);
    let samples = data
        .chunks_exact(2)
        .map(|b| T::lit(f64::from(i16::from_le_bytes([b[0], b[1]]))) * scale)
        .collect();
    AudioBuffer::new(samples, format.sample_rate)
}

fn quantize<T: Real>(s: T) -> i16 {
    let v = (s.as_f64() * PCM16_SCALE).round();
    v.clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16
}

/// Serializes a buffer as a canonical 44-byte-header PCM16 mono WAV.
pub fn encode_wav<T: Real>(buf: &AudioBuffer<T>) -> Vec<u8> {
    let data_len = (buf.len() * 2) as u32;
    let rate = buf.sample_rate_hz();
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM_FORMAT.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in buf.samples() {
        out.extend_from_slice(&quantize(s).to_le_bytes());
    }
    out
}

pub fn write_wav<T: Real>(path: impl AsRef<Path>, buf: &AudioBuffer<T>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_wav(buf)).map_err(|e| Error::io(path, e))
}
